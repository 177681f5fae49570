//! Deterministic synthetic review corpora shaped like the gold-standard set:
//! 20 hotels, 20 truthful and 20 deceptive positive reviews each.

#![allow(dead_code)]

use opspam_core::corpus::{Corpus, Review};
use opspam_core::Label;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const HOTELS: usize = 20;
pub const PER_CLASS: usize = 20;

const FILLER: &[&str] = &[
    "the", "a", "and", "to", "was", "of", "in", "we", "it", "for", "is", "with", "room", "our", "at", "stay",
    "very", "this", "that", "were", "had", "on", "great", "staff", "they", "but", "nice", "would", "from", "be",
    "all", "there", "time", "you", "here", "again", "not", "check", "night", "service", "clean", "bed", "view",
    "desk", "front", "breakfast", "friendly", "walk", "restaurant", "lobby", "comfortable", "downtown", "street",
    "parking", "coffee", "elevator", "door", "water", "pool", "area", "morning", "early", "late", "day", "weekend",
    "trip", "city", "place", "price", "value", "recommend", "definitely", "also", "just", "one", "two", "us",
    "so", "really", "well", ",", ".", "!",
];

const DECEPTIVE: &[&str] = &[
    "chicago", "my", "hotel", "luxury", "experience", "hilton", "business", "vacation", "i", "spa", "looking",
    "while", "husband", "family", "amazing",
];

const TRUTHFUL: &[&str] = &[
    "-", "on", "location", ")", "(", "floor", "bathroom", "small", "helpful", "$", "block", "minutes", "corner",
    "street", "other",
];

pub fn hotel_name(h: usize) -> String {
    const NAMES: &[&str] = &[
        "affinia", "allegro", "amalfi", "ambassador", "conrad", "fairmont", "hardrock", "hilton", "homewood",
        "hyatt", "intercontinental", "james", "knickerbocker", "monaco", "omni", "palmer", "sheraton", "sofitel",
        "swissotel", "talbott",
    ];
    match NAMES.get(h) {
        Some(n) => n.to_string(),
        None => format!("hotel{h}"),
    }
}

/// One synthetic review body of roughly `words` tokens.
///
/// `strength` is the probability that a token comes from the class-favored
/// list rather than the shared Zipf filler.
fn body(rng: &mut ChaCha8Rng, label: Label, words: usize, strength: f64, zipf: &WeightedIndex<f64>) -> String {
    let favored = match label {
        Label::Truthful => TRUTHFUL,
        Label::Deceptive => DECEPTIVE,
    };
    let mut out: Vec<&str> = Vec::with_capacity(words);
    for _ in 0..words {
        let w = if rng.random_bool(strength) {
            favored[rng.random_range(0..favored.len())]
        } else {
            FILLER[zipf.sample(rng)]
        };
        out.push(w);
    }
    let mut text = out.join(" ");
    text.push_str(" .");
    text
}

#[derive(Debug, Clone, Copy)]
pub struct SynthParams {
    pub hotels: usize,
    pub per_class: usize,
    pub strength: f64,
    pub seed: u64,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self { hotels: HOTELS, per_class: PER_CLASS, strength: 0.04, seed: 1 }
    }
}

/// Reviews in hotel-major order; deceptive ones carry authoring minutes.
pub fn synth_reviews(p: SynthParams) -> Vec<Review> {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let zipf = WeightedIndex::new((1..=FILLER.len()).map(|r| 1.0 / r as f64)).unwrap();
    let mut out = Vec::with_capacity(p.hotels * p.per_class * 2);
    for h in 0..p.hotels {
        let hotel = hotel_name(h);
        for label in Label::ALL {
            for i in 0..p.per_class {
                let words = 30 + (rng.random::<f64>() * rng.random::<f64>() * 220.0) as usize;
                let text = body(&mut rng, label, words, p.strength, &zipf);
                let id = format!("{}/{}_{}_{}", label.as_str(), label.as_str().chars().next().unwrap(), hotel, i + 1);
                let mut r = Review::new(id, text, label, hotel.clone());
                r.star_rating = Some(5);
                if label == Label::Deceptive {
                    r.authoring_minutes = Some((rng.random::<f64>() * 30.0 * 100.0).round() / 100.0);
                }
                out.push(r);
            }
        }
    }
    out
}

pub fn synth_corpus(p: SynthParams) -> Corpus {
    Corpus::new(synth_reviews(p)).unwrap()
}
