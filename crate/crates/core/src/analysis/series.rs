use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::index::IndexSeries;

/// Values keyed by the date each one ends on.
#[derive(Debug, Clone, PartialEq)]
pub struct DatedSeries {
    pub dates: Vec<NaiveDate>,
    pub values: Vec<f64>,
}

impl DatedSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `x(t) − x(t−1)` over consecutive elements.
pub fn first_difference(values: &[f64]) -> Vec<f64> {
    values.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Mean of every full trailing window of width `w`.
pub fn trailing_mean(values: &[f64], w: usize) -> Result<Vec<f64>> {
    if w == 0 {
        return Err(Error::InvalidParameter("window must be at least 1".into()));
    }
    if values.len() < w {
        return Err(Error::InvalidParameter(format!(
            "series of length {} is shorter than the window {w}",
            values.len()
        )));
    }
    Ok(values
        .windows(w)
        .map(|win| win.iter().sum::<f64>() / w as f64)
        .collect())
}

pub fn prefix_sums(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .scan(0.0, |acc, x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

/// Day-over-day change of the index; the change ending on date `t` is
/// labelled `t`.
pub fn daily_delta(series: &IndexSeries) -> Result<DatedSeries> {
    if series.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "daily delta needs at least 2 index values, got {}",
            series.len()
        )));
    }
    Ok(DatedSeries {
        dates: series.dates[1..].to_vec(),
        values: first_difference(&series.csei),
    })
}

/// Trailing rolling mean; output length is `len − w + 1`.
pub fn rolling_mean(delta: &DatedSeries, w: usize) -> Result<DatedSeries> {
    let values = trailing_mean(&delta.values, w)?;
    Ok(DatedSeries {
        dates: delta.dates[w - 1..].to_vec(),
        values,
    })
}

pub fn cumulative_change(delta: &DatedSeries) -> DatedSeries {
    DatedSeries {
        dates: delta.dates.clone(),
        values: prefix_sums(&delta.values),
    }
}

/// A break in day contiguity between consecutive retained dates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DateGap {
    pub from: NaiveDate,
    pub to: NaiveDate,
    pub days: i64,
}

/// Consecutive dates more than one day apart.
pub fn date_gaps(dates: &[NaiveDate]) -> Vec<DateGap> {
    dates
        .windows(2)
        .filter_map(|w| {
            let days = (w[1] - w[0]).num_days();
            (days > 1).then_some(DateGap {
                from: w[0],
                to: w[1],
                days,
            })
        })
        .collect()
}
