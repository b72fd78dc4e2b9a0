//! Event-response analytics over the index series.

pub mod events;
pub mod extrema;
pub mod series;
pub mod stats;

use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::IndexSeries;
use crate::linalg::Matrix;

pub use events::{
    event_day_comparison, event_indicator, Event, EventCalendar, EventComparison, EventIndicator,
};
pub use extrema::{detect_extrema, find_peaks, find_valleys, ExtremaReport, Extremum};
pub use series::{cumulative_change, daily_delta, date_gaps, rolling_mean, DateGap, DatedSeries};
pub use stats::{correlation_matrix, pearson, CorrelationMatrix, CorrelationResult};

pub const DEFAULT_WINDOW: usize = 7;

/// Which series is correlated with the event indicator.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Correlate {
    #[default]
    Delta,
    AbsDelta,
    Smoothed,
}

impl Correlate {
    pub fn name(self) -> &'static str {
        match self {
            Correlate::Delta => "delta",
            Correlate::AbsDelta => "abs_delta",
            Correlate::Smoothed => "smoothed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub window: usize,
    pub distance: usize,
    /// `None` means half the standard deviation of the smoothed series.
    pub prominence: Option<f64>,
    pub correlate: Correlate,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            window: DEFAULT_WINDOW,
            distance: extrema::DEFAULT_DISTANCE,
            prominence: None,
            correlate: Correlate::Delta,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventStats {
    pub correlate: Correlate,
    pub correlation: Option<CorrelationResult>,
    pub comparison: EventComparison,
    pub events_covered: usize,
    pub uncovered: Vec<Event>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub deltas: DatedSeries,
    pub smoothed: DatedSeries,
    pub cumulative: DatedSeries,
    /// Indices refer to `smoothed`.
    pub extrema: ExtremaReport,
    /// Aligned with `deltas`.
    pub indicator: EventIndicator,
    pub events: EventStats,
    pub correlations: Option<CorrelationMatrix>,
    pub gaps: Vec<DateGap>,
    pub warnings: Vec<String>,
}

/// Normalized feature columns (rows aligned with the index dates) used for
/// the correlation matrix.
#[derive(Debug, Clone, Copy)]
pub struct FeatureColumns<'a> {
    pub names: &'a [String],
    pub values: &'a Matrix,
}

pub fn analyze(
    series: &IndexSeries,
    calendar: &EventCalendar,
    features: Option<FeatureColumns<'_>>,
    config: &AnalysisConfig,
) -> Result<AnalysisReport> {
    if config.distance == 0 {
        return Err(Error::InvalidParameter(
            "extrema distance must be at least 1".into(),
        ));
    }
    if config.prominence.is_some_and(|p| p.is_nan() || p < 0.0) {
        return Err(Error::InvalidParameter(
            "prominence must be non-negative".into(),
        ));
    }
    let deltas = daily_delta(series)?;
    let smoothed = rolling_mean(&deltas, config.window).map_err(|_| {
        Error::InvalidParameter(format!(
            "series has {} deltas but the smoothing window is {}; need at least {} index values",
            deltas.len(),
            config.window,
            config.window + 1
        ))
    })?;
    let cumulative = cumulative_change(&deltas);
    let extrema = detect_extrema(&smoothed.values, config.distance, config.prominence);

    let mut warnings = Vec::new();
    let indicator = event_indicator(&deltas.dates, calendar);
    let series_indicator = event_indicator(&series.dates, calendar);
    if !series_indicator.uncovered.is_empty() {
        warnings.push(format!(
            "{} calendar event(s) fall on dates absent from the series",
            series_indicator.uncovered.len()
        ));
    }
    let (target, target_ind): (Vec<f64>, Vec<u8>) = match config.correlate {
        Correlate::Delta => (deltas.values.clone(), indicator.values.clone()),
        Correlate::AbsDelta => (
            deltas.values.iter().map(|v| v.abs()).collect(),
            indicator.values.clone(),
        ),
        Correlate::Smoothed => (
            smoothed.values.clone(),
            event_indicator(&smoothed.dates, calendar).values,
        ),
    };
    let ind_f: Vec<f64> = target_ind.iter().map(|v| *v as f64).collect();
    let correlation = match pearson(&target, &ind_f) {
        Ok(r) => Some(r),
        Err(e) => {
            warnings.push(format!("event correlation undefined: {e}"));
            None
        }
    };
    let comparison = event_day_comparison(&deltas.values, &indicator.values)?;
    if comparison.mean_event.is_none() {
        warnings.push("no event falls on a delta date; event mean undefined".into());
    }
    if comparison.mean_non_event.is_none() {
        warnings.push("every delta date is an event date; non-event mean undefined".into());
    }

    let correlations = match features {
        Some(f) => {
            if f.values.rows() != series.len() {
                return Err(Error::DimensionMismatch {
                    expected: series.len(),
                    actual: f.values.rows(),
                });
            }
            let mut names = f.names.to_vec();
            names.push("csei".into());
            let mut data = Vec::with_capacity(series.len() * names.len());
            for (row, c) in f.values.iter_rows().zip(&series.csei) {
                data.extend_from_slice(row);
                data.push(*c);
            }
            let m = Matrix::from_row_major(series.len(), names.len(), data)?;
            Some(correlation_matrix(&names, &m)?)
        }
        None => None,
    };

    let gaps = date_gaps(&series.dates);
    if !gaps.is_empty() {
        warnings.push(format!(
            "{} gap(s) longer than one day between retained dates",
            gaps.len()
        ));
    }

    Ok(AnalysisReport {
        events: EventStats {
            correlate: config.correlate,
            correlation,
            comparison,
            events_covered: calendar.len() - series_indicator.uncovered.len(),
            uncovered: series_indicator.uncovered,
        },
        deltas,
        smoothed,
        cumulative,
        extrema,
        indicator,
        correlations,
        gaps,
        warnings,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn flush<W: Write>(mut w: csv::Writer<W>) -> Result<()> {
    w.flush().map_err(|e| Error::Csv(e.into()))
}

fn write_series<W: Write>(out: W, name: &str, s: &DatedSeries) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["date", name])?;
    for (d, v) in s.dates.iter().zip(&s.values) {
        w.write_record([d.to_string(), v.to_string()])?;
    }
    flush(w)
}

impl AnalysisReport {
    pub fn write_deltas<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["date", "delta", "event"])?;
        for ((d, v), e) in self
            .deltas
            .dates
            .iter()
            .zip(&self.deltas.values)
            .zip(&self.indicator.values)
        {
            w.write_record([d.to_string(), v.to_string(), e.to_string()])?;
        }
        flush(w)
    }

    pub fn write_smoothed<W: Write>(&self, out: W) -> Result<()> {
        write_series(out, "smoothed", &self.smoothed)
    }

    pub fn write_cumulative<W: Write>(&self, out: W) -> Result<()> {
        write_series(out, "cumulative", &self.cumulative)
    }

    /// `kind,index,date,value,prominence`
    pub fn write_extrema<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["kind", "index", "date", "value", "prominence"])?;
        for (kind, list) in [
            ("peak", &self.extrema.peaks),
            ("valley", &self.extrema.valleys),
        ] {
            for e in list {
                w.write_record([
                    kind.to_string(),
                    e.index.to_string(),
                    self.smoothed.dates[e.index].to_string(),
                    e.value.to_string(),
                    e.prominence.to_string(),
                ])?;
            }
        }
        flush(w)
    }

    pub fn write_event_stats<W: Write>(&self, out: W) -> Result<()> {
        let e = &self.events;
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "correlate",
            "n",
            "r",
            "p_value",
            "mean_event",
            "mean_non_event",
            "n_event",
            "n_non_event",
            "events_covered",
            "events_uncovered",
        ])?;
        w.write_record([
            e.correlate.name().to_string(),
            e.correlation.map(|c| c.n.to_string()).unwrap_or_default(),
            opt(e.correlation.map(|c| c.r)),
            opt(e.correlation.map(|c| c.p_value)),
            opt(e.comparison.mean_event),
            opt(e.comparison.mean_non_event),
            e.comparison.n_event.to_string(),
            e.comparison.n_non_event.to_string(),
            e.events_covered.to_string(),
            e.uncovered.len().to_string(),
        ])?;
        flush(w)
    }

    /// Long format: `row,col,r,p_value,defined`. Empty when no feature
    /// columns were supplied.
    pub fn write_correlation_matrix<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["row", "col", "r", "p_value", "defined"])?;
        if let Some(c) = &self.correlations {
            for (i, a) in c.names.iter().enumerate() {
                for (j, b) in c.names.iter().enumerate() {
                    let cell = c.cells[i][j];
                    w.write_record([
                        a.clone(),
                        b.clone(),
                        opt(cell.map(|x| x.r)),
                        opt(cell.map(|x| x.p_value)),
                        u8::from(cell.is_some()).to_string(),
                    ])?;
                }
            }
        }
        flush(w)
    }

    pub fn summary_markdown(&self, config: &AnalysisConfig) -> String {
        let mut s = String::new();
        let e = &self.events;
        let _ = writeln!(s, "# CSEI analysis\n");
        let _ = writeln!(
            s,
            "- index values: {} ({} to {})",
            self.deltas.len() + 1,
            self.deltas
                .dates
                .first()
                .map(|d| d.to_string())
                .unwrap_or_default(),
            self.deltas
                .dates
                .last()
                .map(|d| d.to_string())
                .unwrap_or_default()
        );
        let _ = writeln!(s, "- smoothing window: {}", config.window);
        let _ = writeln!(
            s,
            "- extrema: distance {}, prominence {} ({} peaks, {} valleys)",
            self.extrema.distance,
            self.extrema.prominence,
            self.extrema.peaks.len(),
            self.extrema.valleys.len()
        );
        if let Some(last) = self.cumulative.values.last() {
            let _ = writeln!(s, "- cumulative change: {last}");
        }
        let _ = writeln!(s, "\n## Events\n");
        let _ = writeln!(
            s,
            "- calendar coverage: {} of {} events on retained dates",
            e.events_covered,
            e.events_covered + e.uncovered.len()
        );
        match e.correlation {
            Some(c) => {
                let _ = writeln!(
                    s,
                    "- Pearson ({} vs event indicator): r = {}, p = {}, n = {}",
                    e.correlate.name(),
                    c.r,
                    c.p_value,
                    c.n
                );
            }
            None => {
                let _ = writeln!(
                    s,
                    "- Pearson ({} vs event indicator): undefined",
                    e.correlate.name()
                );
            }
        }
        let fmt = |v: Option<f64>| v.map_or("undefined".to_string(), |x| x.to_string());
        let _ = writeln!(
            s,
            "- mean change on event days: {}",
            fmt(e.comparison.mean_event)
        );
        let _ = writeln!(
            s,
            "- mean change on non-event days: {}",
            fmt(e.comparison.mean_non_event)
        );
        for u in &e.uncovered {
            let _ = writeln!(s, "- not covered: {} {}", u.date, u.label);
        }
        if !self.gaps.is_empty() {
            let _ = writeln!(s, "\n## Date gaps\n");
            for g in &self.gaps {
                let _ = writeln!(s, "- {} to {}: {} days", g.from, g.to, g.days);
            }
        }
        if !self.warnings.is_empty() {
            let _ = writeln!(s, "\n## Warnings\n");
            for w in &self.warnings {
                let _ = writeln!(s, "- {w}");
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    fn series(start: &str, values: &[f64]) -> IndexSeries {
        let d0: NaiveDate = start.parse().unwrap();
        IndexSeries {
            dates: (0..values.len())
                .map(|i| d0 + chrono::Days::new(i as u64))
                .collect(),
            csei: values.to_vec(),
        }
    }

    #[test]
    fn report_on_short_series() {
        let s = series(
            "2020-03-08",
            &[0.1, 0.4, 0.3, 0.9, 0.2, 0.5, 0.5, 0.6, 0.1, 0.3],
        );
        let cfg = AnalysisConfig {
            window: 2,
            distance: 1,
            prominence: Some(0.0),
            correlate: Correlate::Delta,
        };
        let r = analyze(&s, &EventCalendar::bundled(), None, &cfg).unwrap();
        assert_eq!(r.deltas.len(), 9);
        assert_eq!(r.smoothed.len(), 8);
        assert_eq!(r.indicator.marked(), 1); // 2020-03-11
        assert_eq!(r.events.events_covered, 1);
        assert_eq!(r.events.uncovered.len(), 14);
        assert!(r.events.correlation.is_some());
        let last = *r.cumulative.values.last().unwrap();
        assert!((last - (0.3 - 0.1)).abs() < 1e-12);
        assert!(r.correlations.is_none());

        let mut buf = Vec::new();
        r.write_event_stats(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("correlate,n,r,p_value,mean_event,mean_non_event"));
    }

    #[test]
    fn window_longer_than_series_is_an_error() {
        let s = series("2020-03-08", &[0.1, 0.2, 0.3]);
        let err = analyze(
            &s,
            &EventCalendar::bundled(),
            None,
            &AnalysisConfig::default(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("window"));
    }

    #[test]
    fn no_event_dates_leaves_correlation_undefined() {
        let s = series(
            "2019-01-01",
            &[0.1, 0.4, 0.3, 0.9, 0.2, 0.5, 0.5, 0.6, 0.1, 0.3],
        );
        let cfg = AnalysisConfig {
            window: 3,
            ..Default::default()
        };
        let r = analyze(&s, &EventCalendar::bundled(), None, &cfg).unwrap();
        assert!(r.events.correlation.is_none());
        assert!(r.events.comparison.mean_event.is_none());
        assert!(r.summary_markdown(&cfg).contains("undefined"));
    }
}
