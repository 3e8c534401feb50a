//! Seeded synthetic inputs shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `n` units of 8 to 30 tokens drawn from a `vocab`-word Zipf-ish vocabulary.
pub fn units(n: usize, vocab: usize, seed: u64) -> Vec<Vec<String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let len = rng.random_range(8..=30);
            (0..len).map(|_| word(&mut rng, vocab)).collect()
        })
        .collect()
}

/// A flat token sequence of length `n`.
pub fn tokens(n: usize, vocab: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| word(&mut rng, vocab)).collect()
}

fn word(rng: &mut ChaCha8Rng, vocab: usize) -> String {
    // squaring skews draws toward low ranks, like real text
    let u: f64 = rng.random();
    format!("w{}", (u * u * vocab as f64) as usize)
}

/// Wikitext with templates, links, refs, tables and `sections` headed sections.
pub fn wikitext(sections: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::from("{{Infobox thing\n| name = Thing\n| size = {{convert|3|km}}\n}}\n");
    let para = |rng: &mut ChaCha8Rng| {
        let words: Vec<String> = (0..rng.random_range(40..90)).map(|_| word(rng, 500)).collect();
        format!(
            "The '''{}''' is a [[{}|{}]] near {}.<ref name=\"a\">{{{{cite web|url=x}}}}</ref> {}.\n\n",
            words[0],
            words[1],
            words[2],
            words[3],
            words[4..].join(" ")
        )
    };
    out.push_str(&para(&mut rng));
    for s in 0..sections {
        out.push_str(&format!("== Section {s} ==\n"));
        for _ in 0..3 {
            out.push_str(&para(&mut rng));
        }
        out.push_str("{| class=\"wikitable\"\n|-\n| a || b\n|}\n\n");
    }
    out.push_str("[[Category:Things]]\n");
    out
}
