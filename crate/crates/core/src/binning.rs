//! Named group classes for wall count, music share and activity/interest
//! counts, and the age ranges used by the reports.

use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BinningError {
    #[error("negative value {0} cannot be binned")]
    Negative(i64),
    #[error("birthday {birthday} is after reference date {reference}")]
    BirthdayAfterReference {
        birthday: NaiveDate,
        reference: NaiveDate,
    },
}

macro_rules! named_enum {
    ($name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(try_from = "String", into = "String")]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                Self::ALL
                    .iter()
                    .copied()
                    .find(|v| v.as_str() == s)
                    .ok_or_else(|| format!("unknown {} '{}'", stringify!($name), s))
            }
        }

        impl TryFrom<String> for $name {
            type Error = String;

            fn try_from(s: String) -> Result<Self, Self::Error> {
                s.parse()
            }
        }

        impl From<$name> for String {
            fn from(v: $name) -> Self {
                v.as_str().to_owned()
            }
        }
    };
}

named_enum!(WallCountClass {
    VeryLow => "VeryLow",
    Low => "Low",
    Medium => "Medium",
    High => "High",
    VeryHigh => "VeryHigh",
});

named_enum!(ShareClass {
    Low => "Low",
    Medium => "Medium",
    High => "High",
});

named_enum!(AgeRange {
    UpTo19 => "UpTo19",
    From20To32 => "From20To32",
    From33To45 => "From33To45",
    Over45 => "Over45",
    Hidden => "Hidden",
});

/// Where the unassigned value 5 of the music/activity tables goes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapPolicy {
    #[default]
    FiveIsLow,
    FiveIsMedium,
}

impl FromStr for GapPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "five_is_low" => Ok(GapPolicy::FiveIsLow),
            "five_is_medium" => Ok(GapPolicy::FiveIsMedium),
            other => Err(format!("unknown gap policy '{other}'")),
        }
    }
}

fn non_negative(n: i64) -> Result<u64, BinningError> {
    u64::try_from(n).map_err(|_| BinningError::Negative(n))
}

pub fn bin_wall_count(n: i64) -> Result<WallCountClass, BinningError> {
    Ok(match non_negative(n)? {
        0..=9 => WallCountClass::VeryLow,
        10..=50 => WallCountClass::Low,
        51..=100 => WallCountClass::Medium,
        101..=200 => WallCountClass::High,
        _ => WallCountClass::VeryHigh,
    })
}

fn bin_share(n: i64, gap: GapPolicy) -> Result<ShareClass, BinningError> {
    Ok(match (non_negative(n)?, gap) {
        (0..=4, _) | (5, GapPolicy::FiveIsLow) => ShareClass::Low,
        (5..=15, _) => ShareClass::Medium,
        _ => ShareClass::High,
    })
}

pub fn bin_music_share(n: i64, gap: GapPolicy) -> Result<ShareClass, BinningError> {
    bin_share(n, gap)
}

pub fn bin_activities_interests(n: i64, gap: GapPolicy) -> Result<ShareClass, BinningError> {
    bin_share(n, gap)
}

/// Completed years between `birthday` and `reference`.
pub fn age_from_birthday(
    birthday: Option<NaiveDate>,
    reference: NaiveDate,
) -> Result<Option<u32>, BinningError> {
    let Some(birthday) = birthday else {
        return Ok(None);
    };
    if birthday > reference {
        return Err(BinningError::BirthdayAfterReference {
            birthday,
            reference,
        });
    }
    let mut years = reference.year() - birthday.year();
    if (reference.month(), reference.day()) < (birthday.month(), birthday.day()) {
        years -= 1;
    }
    Ok(Some(years as u32))
}

pub fn age_range(age: Option<i64>) -> Result<AgeRange, BinningError> {
    let Some(age) = age else {
        return Ok(AgeRange::Hidden);
    };
    Ok(match non_negative(age)? {
        0..=19 => AgeRange::UpTo19,
        20..=32 => AgeRange::From20To32,
        33..=45 => AgeRange::From33To45,
        _ => AgeRange::Over45,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn date(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    #[test]
    fn wall_count_table() {
        use WallCountClass::*;
        for (n, want) in [
            (0, VeryLow),
            (9, VeryLow),
            (10, Low),
            (50, Low),
            (51, Medium),
            (100, Medium),
            (101, High),
            (200, High),
            (201, VeryHigh),
        ] {
            assert_eq!(bin_wall_count(n), Ok(want), "n = {n}");
        }
        assert_eq!(bin_wall_count(-1), Err(BinningError::Negative(-1)));
    }

    #[test]
    fn share_tables() {
        use ShareClass::*;
        let low = GapPolicy::FiveIsLow;
        for (n, want) in [(0, Low), (4, Low), (5, Low), (6, Medium), (15, Medium), (16, High)] {
            assert_eq!(bin_music_share(n, low), Ok(want), "n = {n}");
        }
        assert_eq!(bin_activities_interests(0, low), Ok(Low));
        assert_eq!(bin_activities_interests(10, low), Ok(Medium));
        assert_eq!(bin_activities_interests(100, low), Ok(High));
        assert_eq!(bin_music_share(5, GapPolicy::FiveIsMedium), Ok(Medium));
        assert_eq!(bin_music_share(4, GapPolicy::FiveIsMedium), Ok(Low));
        assert!(bin_activities_interests(-3, low).is_err());
    }

    #[test]
    fn ages() {
        let r = date("2010-06-15");
        assert_eq!(age_from_birthday(Some(date("1990-06-15")), r), Ok(Some(20)));
        assert_eq!(age_from_birthday(Some(date("1990-06-16")), r), Ok(Some(19)));
        assert_eq!(age_from_birthday(None, r), Ok(None));
        assert_eq!(age_from_birthday(Some(r), r), Ok(Some(0)));
        assert!(age_from_birthday(Some(date("2010-06-16")), r).is_err());
        // leap day birthdays complete a year on Mar 1 in non-leap years
        assert_eq!(
            age_from_birthday(Some(date("2000-02-29")), date("2001-02-28")),
            Ok(Some(0))
        );
        assert_eq!(
            age_from_birthday(Some(date("2000-02-29")), date("2001-03-01")),
            Ok(Some(1))
        );
    }

    #[test]
    fn age_ranges() {
        use AgeRange::*;
        assert_eq!(age_range(Some(19)), Ok(UpTo19));
        assert_eq!(age_range(Some(20)), Ok(From20To32));
        assert_eq!(age_range(Some(32)), Ok(From20To32));
        assert_eq!(age_range(Some(33)), Ok(From33To45));
        assert_eq!(age_range(Some(45)), Ok(From33To45));
        assert_eq!(age_range(Some(46)), Ok(Over45));
        assert_eq!(age_range(None), Ok(Hidden));
        assert!(age_range(Some(-1)).is_err());
    }

    #[test]
    fn names_parse_back() {
        for c in WallCountClass::ALL {
            assert_eq!(c.as_str().parse::<WallCountClass>(), Ok(*c));
        }
        for c in AgeRange::ALL {
            assert_eq!(c.as_str().parse::<AgeRange>(), Ok(*c));
        }
        assert_eq!("five_is_medium".parse(), Ok(GapPolicy::FiveIsMedium));
    }

    proptest! {
        #[test]
        fn bins_are_monotone(a in 0i64..2000, b in 0i64..2000) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(bin_wall_count(lo)? <= bin_wall_count(hi)?);
            for gap in [GapPolicy::FiveIsLow, GapPolicy::FiveIsMedium] {
                prop_assert!(bin_music_share(lo, gap)? <= bin_music_share(hi, gap)?);
            }
            prop_assert!(age_range(Some(lo))? <= age_range(Some(hi))?);
        }
    }
}
