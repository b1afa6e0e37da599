//! Nearest unions of stars and the removal bound.
//!
//! `G_S` denotes the union of the stars centred at the elements of `S`; its
//! indicator is `max_{i ∈ S} x_i`. Distances are symmetric differences, which
//! only need `|F ∩ G_S|`: `|F Δ G_S| = |F| + |G_S| - 2|F ∩ G_S|` with
//! `|G_S| = C(n,k) - C(n-|S|,k)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::binom::binom;
use crate::error::{Error, Result};
use crate::family::{
    degree_profile, element_mask, family_stats, rational_to_f64, FamilyStats, GroundParams,
    SetFamily,
};
use crate::spectral::decompose_affine;

/// Largest number of candidate centre sets any exhaustive search visits.
pub const CENTER_SEARCH_GUARD: u128 = 1_000_000;

/// `ℓ` and the constant `C` shared by the removal bound, its regime
/// condition, and the centre-set search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RemovalConfig {
    pub ell: u32,
    pub c_const: f64,
}

impl RemovalConfig {
    pub fn new(ell: u32, c_const: f64) -> Result<Self> {
        if ell == 0 {
            return Err(Error::domain("ℓ must be a positive integer"));
        }
        if !(c_const > 1.0 && c_const.is_finite()) {
            return Err(Error::domain(format!(
                "constant C must be finite and > 1, got {c_const}"
            )));
        }
        Ok(RemovalConfig { ell, c_const })
    }
}

/// A centre set and the distance from a family to its union of stars (or to
/// the complement of that union).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CenterFit {
    pub centers: Vec<u32>,
    pub distance: u64,
}

/// All `s`-subsets of `[n]` as bit masks, in lexicographic order of their
/// sorted element lists.
pub fn combinations(n: u32, s: u32) -> Vec<u64> {
    if s > n {
        return Vec::new();
    }
    let s = s as usize;
    let mut idx: Vec<u32> = (0..s as u32).collect();
    let mut out = Vec::new();
    loop {
        out.push(idx.iter().fold(0u64, |m, &i| m | 1 << i));
        let Some(pos) = (0..s).rev().find(|&i| idx[i] < n - (s - i) as u32) else {
            return out;
        };
        idx[pos] += 1;
        for j in pos + 1..s {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn mask_elements(mask: u64) -> Vec<u32> {
    (0..64)
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| i + 1)
        .collect()
}

fn union_size(params: GroundParams, s: u32) -> u64 {
    (params.universe_size() - binom((params.n - s) as u64, params.k as u64)) as u64
}

/// `|F Δ G_S|`.
pub fn distance_to_union(family: &SetFamily, centers: u64) -> u64 {
    let s = centers.count_ones();
    let inside = family.count_meeting(centers);
    family.len() as u64 + union_size(family.params(), s) - 2 * inside
}

/// `|F Δ complement(G_S)|`.
pub fn distance_to_complement(family: &SetFamily, centers: u64) -> u64 {
    let params = family.params();
    let s = centers.count_ones();
    let outside = family.len() as u64 - family.count_meeting(centers);
    let comp = binom((params.n - s) as u64, params.k as u64) as u64;
    family.len() as u64 + comp - 2 * outside
}

fn guard_centers(params: GroundParams, sizes: impl Iterator<Item = u32>) -> Result<()> {
    let total: u128 = sizes.map(|s| binom(params.n as u64, s as u64)).sum();
    if total > CENTER_SEARCH_GUARD {
        return Err(Error::GuardExceeded {
            what: "exhaustive centre-set search".into(),
            size: total,
            limit: CENTER_SEARCH_GUARD,
        });
    }
    Ok(())
}

/// Exhaustive minimum of `|F Δ G_S|` over `|S| = ℓ`, ties to the
/// lexicographically smallest `S`.
pub fn nearest_union_exact(family: &SetFamily, ell: u32) -> Result<CenterFit> {
    let params = family.params();
    if ell == 0 || ell > params.n {
        return Err(Error::domain(format!("ℓ = {ell} must lie in [1, n]")));
    }
    guard_centers(params, std::iter::once(ell))?;
    let candidates = combinations(params.n, ell);
    let (distance, idx) = candidates
        .par_iter()
        .enumerate()
        .map(|(i, &mask)| (distance_to_union(family, mask), i))
        .min()
        .expect("at least one centre set");
    Ok(CenterFit {
        centers: mask_elements(candidates[idx]),
        distance,
    })
}

/// The `ℓ` elements of largest degree (ties to the smaller element) and the
/// exact distance to their union of stars.
pub fn nearest_union_heuristic(family: &SetFamily, ell: u32) -> Result<CenterFit> {
    let params = family.params();
    if ell == 0 || ell > params.n {
        return Err(Error::domain(format!("ℓ = {ell} must lie in [1, n]")));
    }
    let degrees = degree_profile(family);
    let mut order: Vec<u32> = (1..=params.n).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(degrees[i as usize - 1]), i));
    let mut centers = order[..ell as usize].to_vec();
    centers.sort_unstable();
    let distance = distance_to_union(family, element_mask(&centers));
    Ok(CenterFit { centers, distance })
}

/// Which approximant of the form `G_s` or `complement(G_s)` a family is
/// nearest to, in the labelling of the removal proof.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CaseLabel {
    /// `G_s` with `s <= ℓ - 1`.
    #[serde(rename = "i")]
    FewerStars,
    /// `G_s` with `s >= ℓ + 1`.
    #[serde(rename = "ii")]
    MoreStars,
    /// The complement of `G_0`, i.e. every k-set.
    #[serde(rename = "iii")]
    Everything,
    /// The complement of `G_s` with `s >= 2`.
    #[serde(rename = "iv")]
    SmallComplement,
    /// The complement of `G_1`, an anti-star.
    #[serde(rename = "v")]
    AntiStar,
    /// `G_ℓ`, a union of `ℓ` stars.
    #[serde(rename = "vi")]
    Union,
}

impl CaseLabel {
    fn of(ell: u32, s: u32, complemented: bool) -> Self {
        match (complemented, s) {
            (true, 0) => CaseLabel::Everything,
            (true, 1) => CaseLabel::AntiStar,
            (true, _) => CaseLabel::SmallComplement,
            (false, s) if s < ell => CaseLabel::FewerStars,
            (false, s) if s > ell => CaseLabel::MoreStars,
            (false, _) => CaseLabel::Union,
        }
    }

    pub fn roman(self) -> &'static str {
        match self {
            CaseLabel::FewerStars => "i",
            CaseLabel::MoreStars => "ii",
            CaseLabel::Everything => "iii",
            CaseLabel::SmallComplement => "iv",
            CaseLabel::AntiStar => "v",
            CaseLabel::Union => "vi",
        }
    }
}

impl std::fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({})", self.roman())
    }
}

/// Best approximant found by a centre-set search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Approximant {
    pub centers: Vec<u32>,
    pub complemented: bool,
    pub distance: u64,
}

/// Minimum of `|F Δ G_S|` and `|F Δ complement(G_S)|` over the given sizes
/// of `S`. Ties prefer smaller `|S|`, then lexicographically smaller `S`,
/// then the uncomplemented form.
fn search_approximants(family: &SetFamily, sizes: std::ops::RangeInclusive<u32>) -> Approximant {
    let n = family.params().n;
    let mut best: Option<(u64, u32, usize, bool, u64)> = None;
    for s in sizes {
        let candidates = combinations(n, s);
        let found = candidates
            .par_iter()
            .enumerate()
            .flat_map_iter(|(i, &mask)| {
                [
                    (distance_to_union(family, mask), s, i, false, mask),
                    (distance_to_complement(family, mask), s, i, true, mask),
                ]
            })
            .min();
        if let Some(f) = found {
            if best.is_none_or(|b| f < b) {
                best = Some(f);
            }
        }
    }
    let (distance, _, _, complemented, mask) = best.expect("size range is non-empty");
    Approximant {
        centers: mask_elements(mask),
        complemented,
        distance,
    }
}

/// Outcome of searching for a small centre set `S` such that `f` or `1 - f`
/// is close to `max_{i ∈ S} x_i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CenterSetReport {
    /// `‖f - g‖²` for the best affine `g`.
    pub eps_in: f64,
    /// Whether `eps_in < k/(128n)`, the range in which closeness is promised.
    pub in_scope: bool,
    /// `max(1, ⌈C n √eps_in / k⌉)`.
    pub s_bound: u32,
    pub best_s: Vec<u32>,
    /// True when `1 - f` rather than `f` is the close one.
    pub complemented: bool,
    /// `|F Δ H| / C(n,k)` for the best approximant `H`.
    pub closeness: f64,
    pub holds: bool,
}

fn s_bound(params: GroundParams, eps: f64, c_const: f64) -> u32 {
    let raw = (c_const * params.n as f64 * eps.max(0.0).sqrt() / params.k as f64).ceil();
    (raw.max(1.0) as u32).min(params.n)
}

/// Searches all `|S| <= s_bound`, including `S = ∅`, for both `f` and
/// `1 - f`.
pub fn center_set_check(family: &SetFamily, cfg: RemovalConfig) -> Result<CenterSetReport> {
    let params = family.params();
    if params.k < 2 {
        return Err(Error::domain("the centre-set search needs k >= 2"));
    }
    let dec = decompose_affine(family)?;
    let eps_in = dec.f2_norm_sq.max(0.0);
    let bound = s_bound(params, eps_in, cfg.c_const);
    guard_centers(params, 0..=bound)?;
    let best = search_approximants(family, 0..=bound);
    let closeness = best.distance as f64 / params.universe_size() as f64;
    Ok(CenterSetReport {
        eps_in,
        in_scope: eps_in < params.k as f64 / (128.0 * params.n as f64),
        s_bound: bound,
        best_s: best.centers,
        complemented: best.complemented,
        closeness,
        holds: closeness <= cfg.c_const * eps_in + 1e-12,
    })
}

/// One row of the size diagnostics: a candidate approximant and how its
/// size compares with the window `[(ℓ - 1/4), (ℓ + 1/4)]·C(n-1,k-1)` that any
/// `H` close to `F` must fall into.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseRow {
    pub label: CaseLabel,
    pub family: String,
    pub size: u128,
    /// `size / C(n-1,k-1)`.
    pub multiple: f64,
    pub in_window: bool,
    /// Whether the size is at least `(ℓ + 1/2)·C(n-1,k-1)`.
    pub above_half: bool,
    /// Smallest distance from `F` to an approximant of this shape with
    /// `|S|` as listed, if one exists.
    pub distance: Option<u64>,
}

/// Classification of the nearest approximant with supporting diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseReport {
    pub label: CaseLabel,
    pub nearest: Approximant,
    /// Largest `|S|` searched.
    pub searched_up_to: u32,
    /// True when the guard cut the search below `max(s_bound, ℓ + 1)`.
    pub truncated: bool,
    pub rows: Vec<CaseRow>,
    /// `dp(complement(G_1)) = C(n-1,k)·C(n-k-1,k)/2`.
    pub antistar_dp: u128,
    /// The smallest `β` a family this close to an anti-star could have,
    /// `(1/2 - 2Cε)(n-k)(n-2k)/k²`, with `ε` the removal error parameter.
    pub antistar_beta_floor: f64,
    /// Whether the family's `β` lies below that floor, excluding case (v).
    pub antistar_excluded: bool,
}

/// Labels the nearest approximant among `G_s` and `complement(G_s)` with
/// `|S| <= max(s_bound, ℓ + 1)`.
pub fn case_classify(family: &SetFamily, cfg: RemovalConfig) -> Result<CaseReport> {
    let params = family.params();
    let stats = family_stats(family, cfg.ell)?;
    let dec = decompose_affine(family)?;
    let (n, k) = (params.n, params.k);
    let ell = cfg.ell;
    let wanted = s_bound(params, dec.f2_norm_sq, cfg.c_const)
        .max(ell + 1)
        .min(n);
    let mut top = wanted;
    while top > ell && guard_centers(params, 0..=top).is_err() {
        top -= 1;
    }
    guard_centers(params, 0..=top)?;
    let nearest = search_approximants(family, 0..=top);
    let label = CaseLabel::of(ell, nearest.centers.len() as u32, nearest.complemented);

    let star = params.star_size();
    let total = params.universe_size();
    let kb = k as u64;
    let lo = ell as f64 - 0.25;
    let hi = ell as f64 + 0.25;
    let row = |label, family: String, size: u128, distance: Option<u64>| {
        let multiple = size as f64 / star as f64;
        CaseRow {
            label,
            family,
            size,
            multiple,
            in_window: multiple >= lo && multiple <= hi,
            above_half: multiple >= ell as f64 + 0.5,
            distance,
        }
    };
    let best_of = |s: u32, complemented: bool| -> Option<u64> {
        if s > top {
            return None;
        }
        combinations(n, s)
            .into_iter()
            .map(|m| {
                if complemented {
                    distance_to_complement(family, m)
                } else {
                    distance_to_union(family, m)
                }
            })
            .min()
    };
    let mut rows = Vec::new();
    if ell >= 2 {
        let s = ell - 1;
        rows.push(row(
            CaseLabel::FewerStars,
            format!("G_{s}"),
            union_size(params, s) as u128,
            best_of(s, false),
        ));
    }
    if ell < n {
        let s = ell + 1;
        rows.push(row(
            CaseLabel::MoreStars,
            format!("G_{s}"),
            union_size(params, s) as u128,
            best_of(s, false),
        ));
    }
    rows.push(row(
        CaseLabel::Everything,
        "~G_0".into(),
        total,
        best_of(0, true),
    ));
    if n >= 2 {
        rows.push(row(
            CaseLabel::SmallComplement,
            "~G_2".into(),
            binom((n - 2) as u64, kb),
            best_of(2, true),
        ));
    }
    rows.push(row(
        CaseLabel::AntiStar,
        "~G_1".into(),
        binom((n - 1) as u64, kb),
        best_of(1, true),
    ));
    rows.push(row(
        CaseLabel::Union,
        format!("G_{ell}"),
        union_size(params, ell) as u128,
        best_of(ell, false),
    ));

    let antistar_dp = binom((n - 1) as u64, kb) * binom((n - k - 1) as u64, kb) / 2;
    let eps = rational_to_f64(&removal_epsilon(&stats));
    let (nf, kf) = (n as f64, k as f64);
    let floor = (0.5 - 2.0 * cfg.c_const * eps) * (nf - kf) * (nf - 2.0 * kf) / (kf * kf);
    let beta = rational_to_f64(&stats.beta);
    Ok(CaseReport {
        label,
        nearest,
        searched_up_to: top,
        truncated: top < wanted,
        rows,
        antistar_dp,
        antistar_beta_floor: floor,
        antistar_excluded: beta < floor,
    })
}

/// `ε = ((2ℓ-1)α + 2β)·k/(n-2k)`.
pub fn removal_epsilon(stats: &FamilyStats) -> BigRational {
    let (n, k) = (stats.params.n as i64, stats.params.k as i64);
    stats.excess() * BigRational::new(k.into(), (n - 2 * k).into())
}

/// `((2ℓ-1)α + 2β)·n/(n-2k)·C(n-1,k-1)`, the removal bound divided by `C`.
pub fn removal_scale(stats: &FamilyStats) -> BigRational {
    let (n, k) = (stats.params.n as i64, stats.params.k as i64);
    stats.excess()
        * BigRational::new(n.into(), (n - 2 * k).into())
        * BigRational::from_integer(BigInt::from(stats.params.star_size()))
}

fn exact_constant(c: f64) -> BigRational {
    BigRational::from_float(c).unwrap_or_else(BigRational::zero)
}

/// Everything the removal bound says about one family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RemovalReport {
    pub stats: FamilyStats,
    pub c_const: f64,
    pub epsilon: f64,
    pub best_centers: Vec<u32>,
    pub distance: u64,
    /// `C((2ℓ-1)α + 2β)·n/(n-2k)·C(n-1,k-1)`.
    pub bound: f64,
    /// `n > 2kℓ²` and `max(2ℓ|α|, |β|) <= (n-2k)/((20C)²n)`.
    pub preconditions_met: bool,
    /// `distance <= bound`, decided in exact arithmetic.
    pub holds: bool,
    pub case_label: CaseLabel,
    pub case: CaseReport,
}

/// Evaluates the removal bound on a family. Requires `n > 2kℓ²`.
pub fn removal_check(family: &SetFamily, cfg: RemovalConfig) -> Result<RemovalReport> {
    let params = family.params();
    let (n, k, ell) = (params.n as u64, params.k as u64, cfg.ell as u64);
    if n <= 2 * k * ell * ell {
        return Err(Error::InvalidParams {
            n: params.n,
            k: params.k,
            reason: format!("the removal bound needs n > 2kℓ² = {}", 2 * k * ell * ell),
        });
    }
    let stats = family_stats(family, cfg.ell)?;
    let fit = nearest_union_exact(family, cfg.ell)?;
    let scale = removal_scale(&stats);
    let bound = exact_constant(cfg.c_const) * &scale;
    let holds = BigRational::from_integer(BigInt::from(fit.distance)) <= bound;
    let case = case_classify(family, cfg)?;
    Ok(RemovalReport {
        epsilon: rational_to_f64(&removal_epsilon(&stats)),
        c_const: cfg.c_const,
        best_centers: fit.centers,
        distance: fit.distance,
        bound: rational_to_f64(&bound),
        preconditions_met: stats.within_removal_regime(cfg.c_const),
        holds,
        case_label: case.label,
        case,
        stats,
    })
}

/// Result of calibrating the constant on a collection of families.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Calibration {
    /// Smallest constant `> 1` (to floating resolution) under which every
    /// family inside the regime satisfies the bound.
    pub c_star: f64,
    pub samples: usize,
    /// Families inside the regime at `c_star`.
    pub in_regime: usize,
    /// Largest `distance / scale` among those families.
    pub worst_ratio: f64,
    /// Whether the bound holds on every in-regime family at `c_star`.
    pub all_hold: bool,
}

struct Sample {
    distance: u64,
    scale: BigRational,
    stats: FamilyStats,
}

impl Sample {
    fn in_regime(&self, c: f64) -> bool {
        self.stats.within_removal_regime(c)
    }

    fn holds(&self, c: f64) -> bool {
        BigRational::from_integer(BigInt::from(self.distance)) <= exact_constant(c) * &self.scale
    }

    /// `distance / scale`, infinite when the scale vanishes but the
    /// distance does not.
    fn ratio(&self) -> f64 {
        if self.distance == 0 {
            0.0
        } else if self.scale <= BigRational::zero() {
            f64::INFINITY
        } else {
            (BigRational::from_integer(BigInt::from(self.distance)) / &self.scale)
                .to_f64()
                .unwrap_or(f64::INFINITY)
        }
    }

    /// Largest `C` for which the family is inside the regime:
    /// `sqrt((n-2k)/(n·dev))/20`.
    fn regime_ceiling(&self) -> f64 {
        let dev = rational_to_f64(&self.stats.deviation());
        let (n, k) = (self.stats.params.n as f64, self.stats.params.k as f64);
        if dev == 0.0 {
            f64::INFINITY
        } else {
            ((n - 2.0 * k) / (n * dev)).sqrt() / 20.0
        }
    }
}

/// Finds the smallest admissible constant for the removal bound on the given
/// `(family, ℓ)` samples. Samples with `n <= 2kℓ²` are skipped.
///
/// A family constrains `C` only while it is inside the regime, i.e. for
/// `C <= ceiling(F)`, and there it needs `C >= ratio(F)`. So
/// `C* = max(1, sup_F min(ratio(F), ceiling(F)))`, nudged upward past
/// floating ties and then verified exactly.
pub fn calibrate_constant(samples: &[(SetFamily, u32)]) -> Result<Calibration> {
    let prepared: Vec<Sample> = samples
        .par_iter()
        .filter(|(f, ell)| {
            let p = f.params();
            (p.n as u64) > 2 * p.k as u64 * (*ell as u64).pow(2)
        })
        .map(|(f, ell)| -> Result<Sample> {
            let stats = family_stats(f, *ell)?;
            let fit = nearest_union_exact(f, *ell)?;
            Ok(Sample {
                distance: fit.distance,
                scale: removal_scale(&stats),
                stats,
            })
        })
        .collect::<Result<_>>()?;
    let mut c = prepared
        .iter()
        .map(|s| s.ratio().min(s.regime_ceiling()))
        .fold(1.0f64, f64::max)
        .next_up();
    let mut all_hold = false;
    for _ in 0..64 {
        all_hold = prepared.iter().all(|s| !s.in_regime(c) || s.holds(c));
        if all_hold || !c.is_finite() {
            break;
        }
        c = c.next_up();
    }
    let in_regime: Vec<&Sample> = prepared.iter().filter(|s| s.in_regime(c)).collect();
    Ok(Calibration {
        c_star: c,
        samples: prepared.len(),
        in_regime: in_regime.len(),
        worst_ratio: in_regime.iter().map(|s| s.ratio()).fold(0.0, f64::max),
        all_hold,
    })
}
