//! Family generators shared by the integration tests.

#![allow(dead_code)]

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sparse_ekr::{GroundParams, KSet, SetFamily};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn params(n: u32, k: u32) -> GroundParams {
    GroundParams::new(n, k).unwrap()
}

/// All `(n, k)` with `n <= max_n` and `2 <= k < n/2`.
pub fn spectral_pairs(max_n: u32) -> Vec<GroundParams> {
    let mut out = Vec::new();
    for n in 5..=max_n {
        for k in 2..n {
            if 2 * k < n {
                out.push(params(n, k));
            }
        }
    }
    out
}

pub fn random_kset(p: GroundParams, rng: &mut impl Rng) -> KSet {
    let mut elems: Vec<u32> = (1..=p.n).collect();
    let (chosen, _) = elems.partial_shuffle(rng, p.k as usize);
    KSet::from_elements(p, chosen).unwrap()
}

/// Removes `remove` random members of `base` and adds `add` random non-members.
pub fn perturb(base: &SetFamily, remove: usize, add: usize, rng: &mut impl Rng) -> SetFamily {
    let p = base.params();
    let members: Vec<KSet> = base.iter().collect();
    let drop: Vec<KSet> = members
        .choose_multiple(rng, remove.min(members.len()))
        .copied()
        .collect();
    let room = (p.universe_size() - base.len() as u128) as usize;
    let mut extra = Vec::new();
    let mut guard = 0;
    while extra.len() < add.min(room) && guard < 100 * (add + 1) {
        guard += 1;
        let s = random_kset(p, rng);
        if !base.contains(s) && !extra.contains(&s) {
            extra.push(s);
        }
    }
    base.edited(&extra, &drop).unwrap()
}

/// A family of one of several random or structured shapes.
pub fn sweep_family(p: GroundParams, rng: &mut impl Rng) -> SetFamily {
    let star_size = p.star_size() as usize;
    let centre = rng.random_range(1..=p.n);
    match rng.random_range(0..7) {
        0 | 1 => {
            let m = rng.random_range(0..=p.universe_size());
            SetFamily::random(p, m, rng.random()).unwrap()
        }
        2 => SetFamily::star(p, centre).unwrap(),
        3 => {
            let s = rng.random_range(1..=3.min(p.n));
            let mut all: Vec<u32> = (1..=p.n).collect();
            let (c, _) = all.partial_shuffle(rng, s as usize);
            SetFamily::union_of_stars(p, c).unwrap()
        }
        4 => SetFamily::antistar(p, centre).unwrap(),
        5 => {
            let star = SetFamily::star(p, centre).unwrap();
            let a = rng.random_range(0..=star_size / 3);
            let b = rng.random_range(0..=star_size / 3);
            perturb(&star, a, b, rng)
        }
        _ => {
            let m = rng.random_range(0..=p.universe_size());
            SetFamily::random(p, m, rng.random())
                .unwrap()
                .complement()
                .unwrap()
        }
    }
}
