//! HTTP dates with full weekday and month names.

use std::fmt;

use chrono::{DateTime, Datelike, NaiveDate, NaiveDateTime, NaiveTime, Timelike, Utc};

use super::HttpError;

macro_rules! named_enum {
    ($ty:ident { $($v:ident),* $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum $ty { $($v),* }

        impl $ty {
            pub const ALL: &'static [$ty] = &[$($ty::$v),*];

            pub fn full_name(self) -> &'static str {
                match self { $($ty::$v => stringify!($v)),* }
            }

            pub fn abbrev(self) -> &'static str {
                &self.full_name()[..3]
            }

            /// Accepts the full name or the three-letter abbreviation, in
            /// any case.
            pub fn from_name(s: &str) -> Option<Self> {
                Self::ALL.iter().copied().find(|v| {
                    s.eq_ignore_ascii_case(v.full_name()) || s.eq_ignore_ascii_case(v.abbrev())
                })
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.full_name())
            }
        }
    };
}

named_enum!(Weekday { Monday, Tuesday, Wednesday, Thursday, Friday, Saturday, Sunday });
named_enum!(Month {
    January, February, March, April, May, June, July, August, September, October, November,
    December,
});

impl Month {
    fn number(self) -> u32 {
        Month::ALL.iter().position(|&m| m == self).expect("listed") as u32 + 1
    }
}

/// A calendar-valid instant in GMT, to the second.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HttpDate {
    weekday: Weekday,
    day: u32,
    month: Month,
    year: i32,
    hour: u32,
    minute: u32,
    second: u32,
}

fn bad(s: impl Into<String>) -> HttpError {
    HttpError::BadDate(s.into())
}

impl HttpDate {
    /// Builds a date from its parts; `time` is `HH:MM:SS`. The weekday must
    /// agree with the date.
    pub fn new(weekday: Weekday, day: u32, month: Month, year: i32, time: &str) -> Result<Self, HttpError> {
        let date = NaiveDate::from_ymd_opt(year, month.number(), day)
            .ok_or_else(|| bad(format!("no such day: {day} {month} {year}")))?;
        let t = NaiveTime::parse_from_str(time, "%H:%M:%S")
            .map_err(|_| bad(format!("bad time {time:?}")))?;
        let d = Self::from_naive(date.and_time(t));
        if d.weekday != weekday {
            return Err(bad(format!("{day} {month} {year} is a {}, not a {weekday}", d.weekday)));
        }
        Ok(d)
    }

    fn from_naive(dt: NaiveDateTime) -> Self {
        HttpDate {
            weekday: Weekday::ALL[dt.weekday().num_days_from_monday() as usize],
            day: dt.day(),
            month: Month::ALL[dt.month0() as usize],
            year: dt.year(),
            hour: dt.hour(),
            minute: dt.minute(),
            second: dt.second(),
        }
    }

    pub fn from_datetime(dt: DateTime<Utc>) -> Self {
        Self::from_naive(dt.naive_utc())
    }

    pub fn to_datetime(&self) -> DateTime<Utc> {
        NaiveDate::from_ymd_opt(self.year, self.month.number(), self.day)
            .and_then(|d| d.and_hms_opt(self.hour, self.minute, self.second))
            .expect("validated on construction")
            .and_utc()
    }

    pub fn weekday(&self) -> Weekday {
        self.weekday
    }

    pub fn day(&self) -> u32 {
        self.day
    }

    pub fn month(&self) -> Month {
        self.month
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn time(&self) -> String {
        format!("{:02}:{:02}:{:02}", self.hour, self.minute, self.second)
    }
}

/// `date('Tuesday',15,'January',1985,'06:14:02')`
impl fmt::Display for HttpDate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "date('{}',{},'{}',{},'{}')",
            self.weekday,
            self.day,
            self.month,
            self.year,
            self.time()
        )
    }
}

/// RFC 1123 wire form: `Tue, 15 Jan 1985 06:14:02 GMT`.
pub fn format_http_date(d: &HttpDate) -> String {
    format!(
        "{}, {:02} {} {:04} {} GMT",
        d.weekday.abbrev(),
        d.day,
        d.month.abbrev(),
        d.year,
        d.time()
    )
}

/// Parses the RFC 1123, RFC 850 and asctime forms. Two-digit years of 70
/// and above are taken as 19yy, others as 20yy. A weekday that disagrees
/// with the date is rejected.
pub fn parse_http_date(s: &str) -> Result<HttpDate, HttpError> {
    let s = s.trim();
    const FORMATS: &[&str] = &[
        "%a, %d %b %Y %H:%M:%S GMT",
        "%A, %d-%b-%y %H:%M:%S GMT",
        "%a %b %e %H:%M:%S %Y",
    ];
    FORMATS
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(s, f).ok())
        .map(HttpDate::from_naive)
        .ok_or_else(|| bad(format!("unrecognized date {s:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_the_example_date() {
        let d = HttpDate::new(Weekday::Tuesday, 15, Month::January, 1985, "06:14:02").unwrap();
        assert_eq!(format_http_date(&d), "Tue, 15 Jan 1985 06:14:02 GMT");
        assert_eq!(d.to_string(), "date('Tuesday',15,'January',1985,'06:14:02')");
        assert_eq!(parse_http_date(&format_http_date(&d)).unwrap(), d);
    }

    #[test]
    fn accepts_all_three_wire_forms() {
        let want = HttpDate::new(Weekday::Sunday, 6, Month::November, 1994, "08:49:37").unwrap();
        for s in [
            "Sun, 06 Nov 1994 08:49:37 GMT",
            "Sunday, 06-Nov-94 08:49:37 GMT",
            "Sun Nov  6 08:49:37 1994",
        ] {
            assert_eq!(parse_http_date(s).unwrap(), want, "{s}");
        }
        assert_eq!(parse_http_date("Monday, 06-Nov-23 08:49:37 GMT").unwrap().year(), 2023);
    }

    #[test]
    fn rejects_invalid_dates() {
        assert!(HttpDate::new(Weekday::Monday, 15, Month::January, 1985, "06:14:02").is_err());
        assert!(HttpDate::new(Weekday::Friday, 30, Month::February, 2001, "00:00:00").is_err());
        assert!(HttpDate::new(Weekday::Tuesday, 15, Month::January, 1985, "25:00:00").is_err());
        for s in ["", "yesterday", "Mon, 15 Jan 1985 06:14:02 GMT", "Tue, 32 Jan 1985 06:14:02 GMT"] {
            assert!(matches!(parse_http_date(s), Err(HttpError::BadDate(_))), "{s}");
        }
    }

    #[test]
    fn names() {
        assert_eq!(Weekday::from_name("wed"), Some(Weekday::Wednesday));
        assert_eq!(Month::from_name("October"), Some(Month::October));
        assert_eq!(Month::from_name("Oct."), None);
    }
}
