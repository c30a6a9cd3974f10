//! UTC instants and the small amount of time math the toolkit needs.

use chrono::{DateTime, Datelike, NaiveDate, TimeZone, Utc};

use crate::error::{Error, Result};

/// Seconds per day.
pub const SECONDS_PER_DAY: f64 = 86_400.0;

/// Julian date of the Unix epoch, 1970-01-01T00:00:00Z.
const UNIX_EPOCH_JD: f64 = 2_440_587.5;

/// A UTC instant stored as fractional seconds since the Unix epoch.
///
/// An `f64` second count keeps sub-microsecond resolution across the entire
/// era covered by two-line element sets, far finer than the one second
/// sampling quantum used downstream. UT1 is taken equal to UTC and leap
/// seconds are ignored, consistent with how distribution-format element
/// sets are produced and consumed.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct UtcTime(f64);

impl UtcTime {
    /// Builds an instant from seconds since 1970-01-01T00:00:00Z.
    pub fn from_unix_seconds(seconds: f64) -> Self {
        UtcTime(seconds)
    }

    /// Seconds since 1970-01-01T00:00:00Z.
    pub fn unix_seconds(self) -> f64 {
        self.0
    }

    /// Builds an instant from a chrono UTC datetime.
    pub fn from_datetime(dt: DateTime<Utc>) -> Self {
        UtcTime(dt.timestamp() as f64 + f64::from(dt.timestamp_subsec_nanos()) * 1e-9)
    }

    /// Parses an ISO 8601 / RFC 3339 timestamp such as
    /// `2026-03-01T12:00:00Z` or `2026-03-01T12:00:00+00:00`.
    pub fn parse_iso(text: &str) -> Result<Self> {
        let dt = DateTime::parse_from_rfc3339(text.trim())
            .map_err(|e| Error::Format(format!("bad timestamp {text:?}: {e}")))?;
        Ok(Self::from_datetime(dt.with_timezone(&Utc)))
    }

    /// Builds an instant from a year and a fractional day of year, where
    /// day 1.0 is January 1 at 00:00:00. This is the epoch convention of
    /// the two-line element format.
    pub fn from_year_day(year: i32, day_of_year: f64) -> Result<Self> {
        if !(1.0..367.0).contains(&day_of_year) {
            return Err(Error::Format(format!(
                "day of year {day_of_year} outside [1, 367) for year {year}"
            )));
        }
        let jan1 = NaiveDate::from_ymd_opt(year, 1, 1)
            .ok_or_else(|| Error::Format(format!("bad epoch year {year}")))?
            .and_hms_opt(0, 0, 0)
            .expect("midnight is always valid");
        let base = Utc.from_utc_datetime(&jan1);
        Ok(UtcTime(
            base.timestamp() as f64 + (day_of_year - 1.0) * SECONDS_PER_DAY,
        ))
    }

    /// The instant `seconds` later (negative values go backwards).
    pub fn plus_seconds(self, seconds: f64) -> Self {
        UtcTime(self.0 + seconds)
    }

    /// Seconds elapsed from `earlier` to `self`.
    pub fn seconds_since(self, earlier: UtcTime) -> f64 {
        self.0 - earlier.0
    }

    /// Julian date of this instant (UT1 = UTC).
    pub fn julian_date(self) -> f64 {
        UNIX_EPOCH_JD + self.0 / SECONDS_PER_DAY
    }

    /// Converts to a chrono datetime, rounded to the nearest nanosecond.
    pub fn to_datetime(self) -> DateTime<Utc> {
        let secs = self.0.floor();
        let nanos = ((self.0 - secs) * 1e9).round() as u32;
        let (secs, nanos) = if nanos >= 1_000_000_000 {
            (secs + 1.0, 0)
        } else {
            (secs, nanos)
        };
        Utc.timestamp_opt(secs as i64, nanos).single().expect("in range")
    }

    /// Formats as `YYYY-MM-DDTHH:MM:SSZ`, rounded to the nearest second.
    pub fn format_iso_seconds(self) -> String {
        let rounded = UtcTime(self.0.round());
        rounded.to_datetime().format("%Y-%m-%dT%H:%M:%SZ").to_string()
    }

    /// Year and fractional day of year of this instant, the inverse of
    /// [`UtcTime::from_year_day`].
    pub fn to_year_day(self) -> (i32, f64) {
        let dt = self.to_datetime();
        let year = dt.year();
        let jan1 = Utc
            .from_utc_datetime(
                &NaiveDate::from_ymd_opt(year, 1, 1)
                    .expect("valid")
                    .and_hms_opt(0, 0, 0)
                    .expect("valid"),
            )
            .timestamp() as f64;
        (year, 1.0 + (self.0 - jan1) / SECONDS_PER_DAY)
    }

    /// Total order despite the inner `f64` (no NaN instants are constructed
    /// by this crate).
    pub fn total_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl std::fmt::Display for UtcTime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.format_iso_seconds())
    }
}
