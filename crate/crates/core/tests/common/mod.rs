#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xlate_core::corpus::Corpus;
use xlate_core::report::Operator;
use xlate_core::{Algebra, Distribution, Limits, Mode, Prop, Side, StarProp, Translation};

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const CONSISTENT_CORPORA: [&str; 4] = ["oil", "platypus", "fig4", "nested-grids"];

pub fn corpus_dir(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

pub fn load_corpus(name: &str) -> Corpus {
    Corpus::load_dir(&corpus_dir(name), Limits::default()).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn corpus_translation(name: &str) -> Translation {
    load_corpus(name).resolved_translation().unwrap()
}

/// `n` mutually exclusive, jointly exhaustive atoms: `n` models.
pub fn exclusive_language(name: &str, prefix: &str, n: usize) -> Arc<Algebra> {
    let atoms: Vec<String> = (0..n).map(|k| format!("{prefix}{k}")).collect();
    let mut src = format!("language {name}\natoms: {}\nbelieve: {}\n", atoms.join(" "), atoms.join(" | "));
    for i in 0..n {
        for j in i + 1..n {
            src.push_str(&format!("believe: !({} & {})\n", atoms[i], atoms[j]));
        }
    }
    Arc::new(Algebra::from_source(&src, Limits::default()).unwrap())
}

/// `k` unconstrained atoms: `2^k` models.
pub fn free_language(name: &str, prefix: &str, k: usize) -> Arc<Algebra> {
    let atoms: Vec<String> = (0..k).map(|i| format!("{prefix}{i}")).collect();
    let src = format!("language {name}\natoms: {}\n", atoms.join(" "));
    Arc::new(Algebra::from_source(&src, Limits::default()).unwrap())
}

pub fn random_language(rng: &mut TestRng, name: &str, prefix: &str, max_models: usize) -> Arc<Algebra> {
    if max_models >= 2 && rng.random_bool(0.25) {
        let mut k = 1;
        while 1 << (k + 1) <= max_models && rng.random_bool(0.5) {
            k += 1;
        }
        free_language(name, prefix, k)
    } else {
        exclusive_language(name, prefix, rng.random_range(1..=max_models))
    }
}

pub fn random_prop(rng: &mut TestRng, a: &Algebra) -> Prop {
    Prop(rng.random_range(0..a.prop_count() as u64))
}

pub fn random_star_prop(rng: &mut TestRng, a: &Algebra) -> StarProp {
    a.from_index(rng.random_range(0..a.star_count()))
}

/// Outer atom images read off a random relation between the two sets of
/// atoms, some atoms also standing alone.
fn related_outers(rng: &mut TestRng, a1: &Algebra, a2: &Algebra) -> [Vec<StarProp>; 2] {
    let (n1, n2) = (a1.model_count(), a2.model_count());
    let mut pairs: Vec<(Option<usize>, Option<usize>)> = Vec::new();
    for x in 0..n1 {
        let partners = rng.random_range(0..=2usize.min(n2));
        for _ in 0..partners {
            pairs.push((Some(x), Some(rng.random_range(0..n2))));
        }
        if partners == 0 || rng.random_bool(0.15) {
            pairs.push((Some(x), None));
        }
    }
    for y in 0..n2 {
        let covered = pairs.iter().any(|&(_, b)| b == Some(y));
        if !covered || rng.random_bool(0.1) {
            if rng.random_bool(0.5) {
                pairs.push((None, Some(y)));
            } else {
                pairs.push((Some(rng.random_range(0..n1)), Some(y)));
            }
        }
    }
    let image = |side: Side, atom: usize| -> StarProp {
        let mut join = Prop::FALSE;
        for &(a, b) in &pairs {
            let (mine, theirs) = if side == Side::One { (a, b) } else { (b, a) };
            if mine == Some(atom) {
                match theirs {
                    Some(t) => join = join.join(Prop::singleton(t)),
                    None => return StarProp::Star,
                }
            }
        }
        StarProp::Prop(join)
    };
    [
        (0..n1).map(|x| image(Side::One, x)).collect(),
        (0..n2).map(|y| image(Side::Two, y)).collect(),
    ]
}

/// A random translation satisfying the consistency axioms, sometimes with
/// a perturbed atom image that happened to keep them.
pub fn consistent_instance(rng: &mut TestRng, max_models: usize) -> Translation {
    loop {
        let a1 = random_language(rng, "one", "p", max_models);
        let a2 = random_language(rng, "two", "q", max_models);
        let [mut o12, mut o21] = related_outers(rng, &a1, &a2);
        if rng.random_bool(0.3) {
            let side = if rng.random_bool(0.5) { Side::One } else { Side::Two };
            let (table, target) = match side {
                Side::One => (&mut o12, &a2),
                Side::Two => (&mut o21, &a1),
            };
            let k = rng.random_range(0..table.len());
            table[k] = random_star_prop(rng, target);
        }
        let t = Translation::from_atom_outers(a1, a2, &o12, &o21).unwrap();
        if t.is_consistent() {
            return t;
        }
    }
}

/// Change one entry of one operator table to a different value.
pub fn mutate(rng: &mut TestRng, t: &Translation) -> (Operator, StarProp, Translation) {
    loop {
        let from = if rng.random_bool(0.5) { Side::One } else { Side::Two };
        let mode = if rng.random_bool(0.5) { Mode::Inner } else { Mode::Outer };
        let op = Operator { from, mode };
        let x = StarProp::Prop(random_prop(rng, t.algebra(from)));
        let new = random_star_prop(rng, t.algebra(from.other()));
        if new != t.apply(from, mode, x) {
            return (op, x, t.with_entry(op, x, new).unwrap());
        }
    }
}

pub fn random_distribution(rng: &mut TestRng, states: usize) -> Distribution {
    let mut w: Vec<f64> = (0..states)
        .map(|_| if rng.random_bool(0.2) { 0.0 } else { rng.random::<f64>() })
        .collect();
    if w.iter().all(|&x| x == 0.0) {
        w[0] = 1.0;
    }
    let total: f64 = w.iter().sum();
    for x in &mut w {
        *x /= total;
    }
    Distribution::new(w).unwrap()
}
