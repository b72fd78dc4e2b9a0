use std::collections::BTreeSet;
use std::io::Read;

use chrono::NaiveDate;
use serde::Serialize;

use crate::error::{Error, Result};

pub const BUNDLED_EVENTS_CSV: &str = include_str!("../../data/events.csv");

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Event {
    pub date: NaiveDate,
    pub label: String,
}

/// Dated events, unique and sorted by date.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventCalendar {
    events: Vec<Event>,
}

impl EventCalendar {
    pub fn new(mut events: Vec<Event>) -> Result<Self> {
        events.sort_by_key(|e| e.date);
        if let Some(w) = events.windows(2).find(|w| w[0].date == w[1].date) {
            return Err(Error::Schema(format!(
                "event calendar lists {} more than once",
                w[0].date
            )));
        }
        Ok(EventCalendar { events })
    }

    /// The fifteen-event default calendar shipped with the crate.
    pub fn bundled() -> Self {
        Self::read_csv(BUNDLED_EVENTS_CSV.as_bytes()).expect("bundled calendar")
    }

    /// `date,label` with ISO-8601 dates; `#` lines are comments.
    pub fn read_csv<R: Read>(source: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(source);
        let header: Vec<String> = r.headers()?.iter().map(|h| h.trim().to_string()).collect();
        if header.first().map(String::as_str) != Some("date") {
            return Err(Error::Schema(
                "events file must start with a `date` column".into(),
            ));
        }
        let label_col = header.iter().position(|h| h == "label");
        let mut events = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let date = rec[0].trim().parse().map_err(|_| {
                Error::Schema(format!("events row {}: bad date {:?}", i + 1, &rec[0]))
            })?;
            let label = label_col
                .and_then(|c| rec.get(c))
                .unwrap_or("")
                .trim()
                .to_string();
            events.push(Event { date, label });
        }
        Self::new(events)
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        self.events.binary_search_by_key(&date, |e| e.date).is_ok()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventIndicator {
    /// 1 on event dates, 0 elsewhere; aligned with the input dates.
    pub values: Vec<u8>,
    /// Calendar events whose date does not occur in the series.
    pub uncovered: Vec<Event>,
}

impl EventIndicator {
    pub fn as_f64(&self) -> Vec<f64> {
        self.values.iter().map(|v| *v as f64).collect()
    }

    pub fn marked(&self) -> usize {
        self.values.iter().filter(|v| **v == 1).count()
    }
}

pub fn event_indicator(dates: &[NaiveDate], calendar: &EventCalendar) -> EventIndicator {
    let present: BTreeSet<NaiveDate> = dates.iter().copied().collect();
    EventIndicator {
        values: dates
            .iter()
            .map(|d| u8::from(calendar.contains(*d)))
            .collect(),
        uncovered: calendar
            .events()
            .iter()
            .filter(|e| !present.contains(&e.date))
            .cloned()
            .collect(),
    }
}

/// Mean change on event and non-event days; `None` for an empty group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EventComparison {
    pub mean_event: Option<f64>,
    pub mean_non_event: Option<f64>,
    pub n_event: usize,
    pub n_non_event: usize,
}

pub fn event_day_comparison(delta: &[f64], indicator: &[u8]) -> Result<EventComparison> {
    if delta.len() != indicator.len() {
        return Err(Error::DimensionMismatch {
            expected: delta.len(),
            actual: indicator.len(),
        });
    }
    let (mut se, mut ne, mut sn, mut nn) = (0.0, 0usize, 0.0, 0usize);
    for (d, e) in delta.iter().zip(indicator) {
        if *e == 1 {
            se += d;
            ne += 1;
        } else {
            sn += d;
            nn += 1;
        }
    }
    Ok(EventComparison {
        mean_event: (ne > 0).then(|| se / ne as f64),
        mean_non_event: (nn > 0).then(|| sn / nn as f64),
        n_event: ne,
        n_non_event: nn,
    })
}
