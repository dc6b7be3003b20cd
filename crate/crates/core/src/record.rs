//! Profiles with the fields derived by the classify and bin stages.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::binning::{
    age_from_birthday, age_range, bin_activities_interests, bin_music_share, bin_wall_count,
    AgeRange, BinningError, GapPolicy, ShareClass, WallCountClass,
};
use crate::ingest::Profile;
use crate::knn::ClassLabel;

/// Output of the classify stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifiedProfile {
    #[serde(flatten)]
    pub profile: Profile,
    pub about_me_class: ClassLabel,
}

/// Output of the bin stage; everything the ARFF and report stages read.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinnedProfile {
    #[serde(flatten)]
    pub profile: Profile,
    pub about_me_class: ClassLabel,
    pub age: Option<u32>,
    pub age_range: AgeRange,
    pub wall_count_class: WallCountClass,
    pub music_share_class: ShareClass,
    pub activity_interest_class: ShareClass,
}

impl BinnedProfile {
    pub fn from_classified(
        c: ClassifiedProfile,
        reference: NaiveDate,
        gap: GapPolicy,
    ) -> Result<Self, BinningError> {
        let p = &c.profile;
        let age = age_from_birthday(p.birthday, reference)?;
        Ok(Self {
            age,
            age_range: age_range(age.map(i64::from))?,
            wall_count_class: bin_wall_count(p.wall_count.into())?,
            music_share_class: bin_music_share(p.music_count.into(), gap)?,
            activity_interest_class: bin_activities_interests(
                p.activity_interest_count.into(),
                gap,
            )?,
            about_me_class: c.about_me_class,
            profile: c.profile,
        })
    }
}
