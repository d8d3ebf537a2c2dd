//! Year-month dates. All windowing, policy and H-index comparisons in
//! this crate happen at month granularity; a missing publication month
//! defaults to June everywhere.

use serde::{Deserialize, Serialize};

pub const DEFAULT_MONTH: u32 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct YearMonth {
    pub year: i32,
    pub month: u32,
}

impl YearMonth {
    pub fn new(year: i32, month: u32) -> Self {
        debug_assert!((1..=12).contains(&month));
        YearMonth { year, month }
    }

    /// Publication date with the June default applied to a missing month.
    pub fn effective(year: i32, month: Option<u32>) -> Self {
        YearMonth { year, month: month.unwrap_or(DEFAULT_MONTH) }
    }

    /// Parse an ISO-8601 date or year-month ("2014-03-01", "2014-03").
    pub fn parse_iso(s: &str) -> Option<Self> {
        let mut parts = s.trim().split('-');
        let year: i32 = parts.next()?.parse().ok()?;
        let month: u32 = parts.next()?.parse().ok()?;
        if !(1..=12).contains(&month) {
            return None;
        }
        Some(YearMonth { year, month })
    }
}

/// Signed month difference `b - a`.
pub fn months_between(a: YearMonth, b: YearMonth) -> i64 {
    (i64::from(b.year) - i64::from(a.year)) * 12 + (i64::from(b.month) - i64::from(a.month))
}

impl std::fmt::Display for YearMonth {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}
