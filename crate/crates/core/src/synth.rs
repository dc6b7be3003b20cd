//! Seeded synthetic sample corpora and profile sets.
//!
//! Each class draws most of its words from its own vocabulary, some from the
//! next class's vocabulary and the rest from a shared pool, with function
//! words mixed in. Output depends only on the seed.

use chrono::{Days, NaiveDate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ingest::RawProfile;
use crate::knn::ClassLabel;

/// Class-specific vocabulary, indexed like [`ClassLabel::KNOWN`].
pub const CLASS_VOCAB: [[&str; 16]; 10] = [
    [
        "angry", "fight", "rage", "furious", "attack", "battle", "tough", "fierce", "punch",
        "shout", "temper", "brutal", "storm", "dominate", "crush", "rival",
    ],
    [
        "honest", "truth", "truthful", "genuine", "trust", "open", "frank", "straight",
        "transparent", "integrity", "candid", "fair", "real", "upright", "plain", "clear",
    ],
    [
        "love", "romance", "heart", "kiss", "candle", "roses", "darling", "dream", "moonlight",
        "sweetheart", "passion", "date", "poetry", "hug", "beloved", "valentine",
    ],
    [
        "sincere", "devoted", "committed", "earnest", "loyal", "dedicated", "serious", "faithful",
        "wholehearted", "steadfast", "promise", "dependable", "diligent", "careful", "respect",
        "duty",
    ],
    [
        "lie", "cheat", "fake", "trick", "scheme", "deceive", "sneaky", "pretend", "bluff", "con",
        "steal", "mask", "rumor", "betray", "hustle", "shady",
    ],
    [
        "friend", "friendly", "social", "party", "smile", "welcome", "buddy", "chat", "laugh",
        "together", "kind", "warm", "helpful", "cheerful", "neighbor", "company",
    ],
    [
        "learn", "study", "book", "knowledge", "curious", "science", "research", "course",
        "reading", "lecture", "skill", "explore", "discover", "student", "library", "practice",
    ],
    [
        "tradition", "family", "faith", "church", "custom", "order", "discipline", "classic",
        "heritage", "values", "modest", "stable", "rules", "elders", "duties", "routine",
    ],
    [
        "feel", "tears", "cry", "moody", "sensitive", "emotion", "sad", "lonely", "mood",
        "hurt", "tender", "sigh", "nostalgic", "anxious", "feelings", "miss",
    ],
    [
        "sleep", "lazy", "couch", "nap", "tired", "relax", "bed", "snooze", "idle", "slow",
        "weekend", "rest", "chill", "yawn", "procrastinate", "lounge",
    ],
];

pub const SHARED_VOCAB: [&str; 24] = [
    "life", "people", "music", "time", "world", "day", "good", "best", "things", "like",
    "really", "always", "new", "great", "work", "home", "city", "movies", "food", "travel",
    "games", "photos", "sports", "phone",
];

const FILLER: [&str; 12] = [
    "i", "am", "the", "and", "a", "to", "of", "my", "with", "is", "in", "me",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SyntheticSample {
    pub id: String,
    pub label: String,
    pub text: String,
}

/// Generates text for one class: 24 to 35 content words plus filler.
pub fn class_text(rng: &mut impl Rng, class_idx: usize) -> String {
    let own = &CLASS_VOCAB[class_idx];
    let neighbor = &CLASS_VOCAB[(class_idx + 1) % CLASS_VOCAB.len()];
    let len = rng.gen_range(24..36);
    let mut words: Vec<&str> = Vec::with_capacity(len + len / 3);
    for _ in 0..len {
        let roll: f64 = rng.gen();
        let word = if roll < 0.55 {
            own.choose(rng)
        } else if roll < 0.70 {
            neighbor.choose(rng)
        } else {
            SHARED_VOCAB.choose(rng)
        };
        words.push(word.copied().unwrap_or("life"));
        if rng.gen_bool(0.3) {
            words.push(FILLER.choose(rng).copied().unwrap_or("i"));
        }
    }
    let mut text = words.join(" ");
    if let Some(first) = text.get_mut(0..1) {
        first.make_ascii_uppercase();
    }
    text.push('.');
    text
}

/// `per_class` documents for each of the ten labels, ids `<label>-<nn>`,
/// grouped by class.
pub fn sample_corpus(seed: u64, per_class: usize) -> Vec<SyntheticSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(per_class * ClassLabel::KNOWN.len());
    for (ci, label) in ClassLabel::KNOWN.iter().enumerate() {
        for i in 0..per_class {
            out.push(SyntheticSample {
                id: format!("{}-{:03}", label.as_str().to_lowercase(), i),
                label: label.as_str().to_owned(),
                text: class_text(&mut rng, ci),
            });
        }
    }
    out
}

fn items(rng: &mut impl Rng, pool: &[&str], max: usize) -> Option<String> {
    let n = rng.gen_range(0..=max);
    if n == 0 {
        return None;
    }
    let picked: Vec<&str> = (0..n).filter_map(|_| pool.choose(rng).copied()).collect();
    Some(picked.join(", "))
}

/// Synthetic raw profiles relative to `reference`. About one in eight has a
/// hidden birthday; none are invalid.
pub fn profiles(seed: u64, count: usize, reference: NaiveDate) -> Vec<RawProfile> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hobbies = [
        "chess", "football", "cooking", "hiking", "gaming", "painting", "cycling", "reading",
        "dancing", "photography", "swimming", "guitar",
    ];
    (0..count)
        .map(|i| {
            let class_idx = rng.gen_range(0..CLASS_VOCAB.len());
            let birthday = if rng.gen_bool(0.125) {
                None
            } else {
                let days = rng.gen_range(13 * 365..70 * 365);
                reference
                    .checked_sub_days(Days::new(days))
                    .map(|d| d.format("%Y-%m-%d").to_string())
            };
            let gender = match rng.gen_range(0..10) {
                0..=4 => Some("male".to_owned()),
                5..=8 => Some("Female".to_owned()),
                _ => None,
            };
            RawProfile {
                record_id: format!("user-{i:05}"),
                birthday,
                about_me: Some(class_text(&mut rng, class_idx)),
                activities: items(&mut rng, &hobbies, 12),
                gender,
                interests: items(&mut rng, &hobbies, 10),
                wall_count: Some(rng.gen_range(0..300)),
                political: None,
                music_count: Some(rng.gen_range(0..25)),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_seeded() {
        assert_eq!(sample_corpus(7, 3), sample_corpus(7, 3));
        assert_ne!(sample_corpus(7, 3), sample_corpus(8, 3));
        let c = sample_corpus(1, 2);
        assert_eq!(c.len(), 20);
        assert_eq!(c[0].id, "aggressive-000");
        assert_eq!(c[13].label, "Eager_to_Learn");
    }

    #[test]
    fn vocabularies_do_not_collide() {
        let mut all: Vec<&str> = CLASS_VOCAB.iter().flatten().copied().collect();
        all.extend(SHARED_VOCAB);
        let n = all.len();
        all.sort_unstable();
        all.dedup();
        assert_eq!(all.len(), n);
        let stops = crate::textprep::StopwordList::english();
        assert!(all.iter().all(|w| !stops.contains(w)), "content word in stoplist");
        assert!(FILLER.iter().all(|w| stops.contains(w)));
    }

    #[test]
    fn profiles_are_valid() {
        let reference = NaiveDate::from_ymd_opt(2012, 1, 1).unwrap();
        let ps = profiles(3, 200, reference);
        let (ok, report) = crate::ingest::validate_and_filter(&ps, Some(reference));
        assert_eq!(ok.len(), 200, "{:?}", report.rejected);
        assert!(ok.iter().any(|p| p.birthday.is_none()));
    }
}
