//! A seeded generator of OLID-shaped tweets for demos and tests when the real
//! corpus is not at hand.
//!
//! Offensive tweets usually carry an insult word, targeted ones name an
//! individual, a group or some other entity, and a fraction of inoffensive
//! tweets borrow insult words too, so the tasks are learnable but not trivial.

use rand::seq::IndexedRandom;
use rand::Rng as _;

use super::{Dataset, Example, Label, Task};
use crate::{seeded_rng, Result, Rng};

const FILLER: &[&str] = &[
    "the", "a", "is", "are", "was", "this", "that", "and", "but", "so", "just", "really", "about", "with", "for", "on",
    "in", "at", "of", "to", "what", "when", "why", "how", "all", "more", "not", "very", "today", "again", "now",
    "time", "think", "know", "going", "said", "says", "make", "see", "got", "still", "even", "much", "many", "new",
    "good", "great", "best", "right", "real", "need",
];

const TOPIC: &[&str] = &[
    "vote",
    "election",
    "president",
    "policy",
    "game",
    "team",
    "season",
    "coach",
    "movie",
    "music",
    "weather",
    "school",
    "teacher",
    "students",
    "news",
    "story",
    "country",
    "city",
    "border",
    "law",
    "court",
    "gun",
    "control",
    "tax",
    "money",
    "jobs",
    "economy",
    "health",
    "care",
    "family",
    "friends",
    "weekend",
    "coffee",
    "dinner",
    "church",
    "phone",
    "twitter",
    "video",
    "book",
    "show",
    "ratings",
    "crowd",
    "rally",
    "speech",
    "debate",
    "campaign",
    "senate",
    "congress",
    "kavanaugh",
    "maga",
    "football",
    "player",
    "fans",
    "beach",
    "dog",
    "cats",
    "running",
    "played",
    "watching",
];

const INSULT: &[&str] = &[
    "idiot",
    "idiots",
    "stupid",
    "moron",
    "morons",
    "pathetic",
    "disgusting",
    "loser",
    "losers",
    "scum",
    "trash",
    "clown",
    "clowns",
    "hate",
    "hated",
    "sucks",
    "crap",
    "liar",
    "liars",
    "lying",
    "fool",
    "fools",
    "ugly",
    "dumb",
    "dumbest",
    "shit",
    "damn",
    "hell",
    "ass",
    "garbage",
    "evil",
    "crazy",
    "traitor",
    "coward",
    "cowards",
    "worthless",
];

const INDIVIDUAL: &[&str] = &["you", "your", "he", "she", "him", "her", "yourself"];
const GROUP: &[&str] = &[
    "they",
    "them",
    "liberals",
    "conservatives",
    "democrats",
    "republicans",
    "people",
    "antifa",
    "leftists",
    "women",
    "men",
];
const OTHER: &[&str] = &["media", "government", "company", "network", "league", "administration", "website"];
const HASHTAGS: &[&str] = &["#MAGA", "#KAG", "#Resist", "#NFL", "#news", "#QAnon", "#WalkAway"];
const DECOR: &[&str] = &["!!", "?", "...", "😂", "🙄", "💩", "&amp;", "URL", "2019", "100%", "🇺🇸"];

/// Knobs for [`synthetic_corpus`].
#[derive(Debug, Clone)]
pub struct SyntheticConfig {
    pub n_examples: usize,
    /// Share of OFF tweets.
    pub offensive_fraction: f64,
    /// Share of UNT tweets among OFF.
    pub untargeted_fraction: f64,
    /// Share of GRP and OTH among TIN; IND takes the rest.
    pub group_fraction: f64,
    pub other_fraction: f64,
    /// Probability that an OFF tweet contains an insult word.
    pub signal: f64,
    /// Probability that a NOT tweet contains an insult word anyway.
    pub noise: f64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            n_examples: 2000,
            offensive_fraction: 0.33,
            untargeted_fraction: 0.15,
            group_fraction: 0.3,
            other_fraction: 0.12,
            signal: 0.85,
            noise: 0.1,
        }
    }
}

/// Generate a fully annotated corpus (labels for A, B and C where the
/// hierarchy applies) as a task A dataset. Use [`Dataset::restrict_to`] to
/// obtain the task B or C view.
pub fn synthetic_corpus(config: &SyntheticConfig, seed: u64) -> Result<Dataset> {
    let mut rng = seeded_rng(seed);
    let mut examples = Vec::with_capacity(config.n_examples);
    for i in 0..config.n_examples {
        let offensive = rng.random_bool(config.offensive_fraction);
        let (a, b, c) = if !offensive {
            (Label::Not, None, None)
        } else if rng.random_bool(config.untargeted_fraction) {
            (Label::Off, Some(Label::Unt), None)
        } else {
            let u: f64 = rng.random();
            let c = if u < config.group_fraction {
                Label::Grp
            } else if u < config.group_fraction + config.other_fraction {
                Label::Oth
            } else {
                Label::Ind
            };
            (Label::Off, Some(Label::Tin), Some(c))
        };
        let text = compose(&mut rng, config, a, b, c);
        examples.push(Example::labeled(format!("SYN{i:05}"), text, Some(a), b, c)?);
    }
    Dataset::new(Task::A, examples)
}

fn compose(rng: &mut Rng, config: &SyntheticConfig, a: Label, b: Option<Label>, c: Option<Label>) -> String {
    let n_plain = rng.random_range(4..14);
    let mut words: Vec<String> = (0..n_plain)
        .map(|_| {
            let bank = if rng.random_bool(0.6) { FILLER } else { TOPIC };
            pick(rng, bank).to_string()
        })
        .collect();

    let insults = match a {
        Label::Off if rng.random_bool(config.signal) => rng.random_range(1..3),
        Label::Not if rng.random_bool(config.noise) => 1,
        _ => 0,
    };
    for _ in 0..insults {
        let w = pick(rng, INSULT);
        insert(rng, &mut words, w);
    }

    let target_bank = match (b, c) {
        (Some(Label::Tin), Some(Label::Ind)) => Some(INDIVIDUAL),
        (Some(Label::Tin), Some(Label::Grp)) => Some(GROUP),
        (Some(Label::Tin), Some(Label::Oth)) => Some(OTHER),
        // Inoffensive tweets mention people too.
        (None, None) if rng.random_bool(0.4) => Some(if rng.random_bool(0.5) { INDIVIDUAL } else { GROUP }),
        _ => None,
    };
    if let Some(bank) = target_bank {
        let w = pick(rng, bank);
        insert(rng, &mut words, w);
        if rng.random_bool(0.3) {
            let w = pick(rng, bank);
            insert(rng, &mut words, w);
        }
    }

    let mut text = String::new();
    if rng.random_bool(0.6) {
        text.push_str("@USER ");
    }
    for (i, w) in words.iter().enumerate() {
        if i > 0 {
            text.push(' ');
        }
        if i == 0 || rng.random_bool(0.05) {
            text.push_str(&capitalize(w));
        } else {
            text.push_str(w);
        }
        if rng.random_bool(0.08) {
            text.push_str(pick(rng, DECOR));
        }
    }
    if rng.random_bool(0.25) {
        text.push(' ');
        text.push_str(pick(rng, HASHTAGS));
    }
    text
}

fn pick<'a>(rng: &mut Rng, bank: &[&'a str]) -> &'a str {
    bank.choose(rng).expect("word banks are non-empty")
}

fn insert(rng: &mut Rng, words: &mut Vec<String>, word: &str) {
    let at = rng.random_range(0..=words.len());
    words.insert(at, word.to_string());
}

fn capitalize(w: &str) -> String {
    let mut chars = w.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}
