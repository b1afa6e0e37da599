//! Random subgraphs `K_p(n, k)`: sampling, superstars, the probability that
//! the stars remain the largest independent sets, and the analytic bounds.
//!
//! Trial `t` draws one uniform per Kneser edge, in canonical edge order, from
//! a ChaCha8 stream keyed by `(master_seed, t)`, and keeps the edge when the
//! uniform is below `p`. The uniforms do not depend on `p`, so samples at
//! different `p` with the same seed are nested, and results do not depend on
//! how trials are spread over threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::binom::{binom_big, binom_i, ln_big, ln_binom};
use crate::error::{Error, Result};
use crate::family::GroundParams;
use crate::kneser::{max_independent_set_with, KneserGraph, MisOptions};

/// Default sharpness margin `ε`.
pub const DEFAULT_EPSILON: f64 = 0.1;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Inputs of a simulation run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdParams {
    pub params: GroundParams,
    pub p: f64,
    pub trials: u64,
    pub master_seed: u64,
    pub zeta: f64,
    pub epsilon: f64,
}

impl ThresholdParams {
    /// `ε` and `ζ = 1 + ε` take their defaults.
    pub fn new(params: GroundParams, p: f64, trials: u64, master_seed: u64) -> Result<Self> {
        params.require_graph()?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain(format!("p = {p} is not a probability")));
        }
        if trials == 0 {
            return Err(Error::domain("at least one trial is needed"));
        }
        Ok(ThresholdParams {
            params,
            p,
            trials,
            master_seed,
            zeta: 1.0 + DEFAULT_EPSILON,
            epsilon: DEFAULT_EPSILON,
        })
    }

    pub fn with_p(self, p: f64) -> Result<Self> {
        ThresholdParams::new(self.params, p, self.trials, self.master_seed)
    }
}

/// The retained edges of one trial, as `(u, v)` vertex indices with `u < v`
/// in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeSample {
    pub params: GroundParams,
    pub retained: Vec<(u32, u32)>,
}

/// Vertex and edge lists of `K(n, k)`, shared by every trial.
#[derive(Debug, Clone)]
pub struct Simulator {
    params: GroundParams,
    bits: Vec<u64>,
    edges: Vec<(u32, u32)>,
}

impl Simulator {
    pub fn new(params: GroundParams) -> Result<Self> {
        let g = KneserGraph::build(params)?;
        let bits = g.vertices().iter().map(|s| s.bits()).collect();
        let edges = g
            .graph()
            .edges()
            .map(|(u, v)| (u as u32, v as u32))
            .collect();
        Ok(Simulator {
            params,
            bits,
            edges,
        })
    }

    pub fn params(&self) -> GroundParams {
        self.params
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    fn rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(trial);
        rng
    }

    pub fn sample(&self, p: f64, master_seed: u64, trial: u64) -> EdgeSample {
        let mut rng = Self::rng(master_seed, trial);
        let retained = self
            .edges
            .iter()
            .filter(|_| rng.random::<f64>() < p)
            .copied()
            .collect();
        EdgeSample {
            params: self.params,
            retained,
        }
    }

    /// For each vertex, the union of its retained neighbours.
    fn neighbour_unions(&self, sample: &EdgeSample) -> Vec<u64> {
        let mut unions = vec![0u64; self.bits.len()];
        for &(u, v) in &sample.retained {
            unions[u as usize] |= self.bits[v as usize];
            unions[v as usize] |= self.bits[u as usize];
        }
        unions
    }

    /// Pairs `(x, F)` with `x ∉ F` such that no retained edge joins `F` to
    /// the star centred at `x`.
    pub fn count_superstars(&self, sample: &EdgeSample) -> u64 {
        let free = (self.params.n - self.params.k) as u64;
        self.neighbour_unions(sample)
            .iter()
            .map(|m| free - m.count_ones() as u64)
            .sum()
    }

    /// Whether the star centred at `centre` is a maximal independent set.
    pub fn star_is_maximal(&self, sample: &EdgeSample, centre: u32) -> bool {
        let bit = 1u64 << (centre - 1);
        self.neighbour_unions(sample)
            .iter()
            .zip(&self.bits)
            .all(|(m, b)| b & bit != 0 || m & bit != 0)
    }

    /// Exact check of `α = C(n-1,k-1)` on the sample.
    pub fn ekr_holds(&self, sample: &EdgeSample, uniqueness: bool) -> Result<EkrOutcome> {
        let superstars = self.count_superstars(sample);
        if superstars > 0 && !uniqueness {
            // A superstar is an independent set one larger than a star.
            return Ok(EkrOutcome {
                holds: false,
                superstars,
                alpha: None,
                only_stars: None,
            });
        }
        let g = KneserGraph::subgraph(
            self.params,
            sample
                .retained
                .iter()
                .map(|&(u, v)| (u as usize, v as usize)),
        )?;
        let r = max_independent_set_with(
            &g,
            MisOptions {
                uniqueness,
                ..MisOptions::default()
            },
        )?;
        Ok(EkrOutcome {
            holds: r.size as u128 == self.params.star_size(),
            superstars,
            alpha: Some(r.size),
            only_stars: r.is_unique_up_to_stars,
        })
    }

    fn run_trial(&self, p: f64, master_seed: u64, trial: u64) -> Result<(bool, u64)> {
        let sample = self.sample(p, master_seed, trial);
        let out = self.ekr_holds(&sample, false)?;
        Ok((out.holds, out.superstars))
    }

    /// Fraction of trials in which the stars are maximum independent sets.
    pub fn estimate(&self, tp: &ThresholdParams, workers: usize) -> Result<Estimate> {
        let trials: Vec<u64> = (0..tp.trials).collect();
        let run = || {
            trials
                .par_iter()
                .map(|&t| self.run_trial(tp.p, tp.master_seed, t))
                .collect::<Vec<_>>()
        };
        let results = with_workers(workers, run)?;
        let mut successes = 0u64;
        let mut superstars = 0u128;
        for (t, r) in results.into_iter().enumerate() {
            match r {
                Ok((holds, x)) => {
                    successes += holds as u64;
                    superstars += x as u128;
                }
                Err(e) => {
                    log::error!("trial {t} failed after {successes} successes in {t} trials: {e}");
                    return Err(e);
                }
            }
        }
        Ok(Estimate::new(tp.p, tp.trials, successes, superstars))
    }
}

fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::domain(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Result of checking one sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EkrOutcome {
    pub holds: bool,
    pub superstars: u64,
    /// Exact independence number, unless a superstar already settled the
    /// question.
    pub alpha: Option<usize>,
    pub only_stars: Option<bool>,
}

/// Success fraction with a Wilson 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub p: f64,
    pub trials: u64,
    pub successes: u64,
    pub fraction: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub mean_x: f64,
}

impl Estimate {
    fn new(p: f64, trials: u64, successes: u64, superstars: u128) -> Self {
        let (ci_lo, ci_hi) = wilson_interval(successes, trials);
        Estimate {
            p,
            trials,
            successes,
            fraction: successes as f64 / trials as f64,
            ci_lo,
            ci_hi,
            mean_x: superstars as f64 / trials as f64,
        }
    }
}

/// Wilson score interval at 95%.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (phat + z2 / (2.0 * n)) / denom;
    let half = Z95 * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 {
        0.0
    } else {
        (centre - half).max(0.0)
    };
    let hi = if successes == trials {
        1.0
    } else {
        (centre + half).min(1.0)
    };
    (lo, hi)
}

/// One sample of `K_p(n, k)` for the given trial.
pub fn sample_subgraph(tp: &ThresholdParams, trial_index: u64) -> Result<EdgeSample> {
    Ok(Simulator::new(tp.params)?.sample(tp.p, tp.master_seed, trial_index))
}

/// See [`Simulator::count_superstars`].
pub fn count_superstars(sample: &EdgeSample) -> Result<u64> {
    Ok(Simulator::new(sample.params)?.count_superstars(sample))
}

/// See [`Simulator::ekr_holds`].
pub fn ekr_holds(sample: &EdgeSample, uniqueness: bool) -> Result<EkrOutcome> {
    Simulator::new(sample.params)?.ekr_holds(sample, uniqueness)
}

/// See [`Simulator::estimate`].
pub fn estimate_probability(tp: &ThresholdParams, workers: usize) -> Result<Estimate> {
    Simulator::new(tp.params)?.estimate(tp, workers)
}

/// Empirical crossing of the success probability through one half.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdResult {
    pub p_half: f64,
    /// Final bracket.
    pub lo: f64,
    pub hi: f64,
    pub iterations: u32,
    pub p_c: f64,
    pub p_0: f64,
    /// Set when a larger `p` produced a clearly smaller success fraction.
    pub non_monotone: bool,
    pub evaluations: Vec<Estimate>,
}

/// Bracket width below which bisection stops.
pub const BRACKET_WIDTH: f64 = 0.02;

/// Bisects on `p` until the interval at the midpoint straddles one half or
/// the bracket is narrower than [`BRACKET_WIDTH`].
pub fn find_threshold(
    params: GroundParams,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<ThresholdResult> {
    let crit = critical_probabilities(params)?;
    let sim = Simulator::new(params)?;
    let base = ThresholdParams::new(params, 0.5, trials, seed)?;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut evaluations: Vec<Estimate> = Vec::new();
    let mut iterations = 0;
    let mut p_half = None;
    while hi - lo >= BRACKET_WIDTH {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        let est = sim.estimate(&base.with_p(mid)?, workers)?;
        evaluations.push(est);
        if est.ci_hi < 0.5 {
            lo = mid;
        } else if est.ci_lo > 0.5 {
            hi = mid;
        } else {
            p_half = Some(mid);
            break;
        }
    }
    let mut sorted = evaluations.clone();
    sorted.sort_by(|a, b| a.p.total_cmp(&b.p));
    let non_monotone = sorted.windows(2).any(|w| w[1].ci_hi < w[0].ci_lo);
    if non_monotone {
        log::warn!("success fraction is not monotone in p; the bracket is unreliable");
    }
    Ok(ThresholdResult {
        p_half: p_half.unwrap_or(0.5 * (lo + hi)),
        lo,
        hi,
        iterations,
        p_c: crit.p_c,
        p_0: crit.p_0,
        non_monotone,
        evaluations,
    })
}

/// `p_c = ln(n·C(n-1,k)) / C(n-k-1,k-1)` and
/// `p_0 = ((k+1) ln n - k ln k) / C(n-1,k-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalProbabilities {
    pub p_c: f64,
    pub p_0: f64,
}

fn ln_n_binom(params: GroundParams) -> f64 {
    (params.n as f64).ln() + ln_big(&binom_big(params.n as u64 - 1, params.k as u64))
}

pub fn critical_probabilities(params: GroundParams) -> Result<CriticalProbabilities> {
    let (n, k) = (params.n as u64, params.k as u64);
    if n < 2 * k + 2 {
        return Err(Error::InvalidParams {
            n: params.n,
            k: params.k,
            reason: "critical probabilities need n >= 2k + 2".into(),
        });
    }
    let cross = ln_big(&binom_big(n - k - 1, k - 1));
    let star = ln_big(&binom_big(n - 1, k - 1));
    let (nf, kf) = (n as f64, k as f64);
    Ok(CriticalProbabilities {
        p_c: (ln_n_binom(params).ln() - cross).exp(),
        p_0: (((kf + 1.0) * nf.ln() - kf * kf.ln()).ln() - star).exp(),
    })
}

/// Every analytic quantity from the threshold argument at `p = ζ p_c`.
///
/// Quantities that can leave the range of `f64` also come as natural logs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub n: u32,
    pub k: u32,
    pub zeta: f64,
    pub epsilon: f64,
    pub c_const: f64,
    pub p_c: f64,
    pub p_0: f64,
    /// `ζ p_c`, clamped to `[0, 1]`.
    pub p: f64,
    /// `E[X] = n·C(n-1,k)·(1-p)^C(n-k-1,k-1)`.
    pub ex_exact: f64,
    /// `(1 - (1-p)^C(n-k-1,k-1))^C(n-1,k)`, an upper bound on the chance
    /// that the stars are the largest independent sets.
    pub lower_bound_prob: f64,
    /// `(n·C(n-1,k))^(1-ζ)`, bounding `E[X]`.
    pub superstar_bound: f64,
    pub ln_superstar_bound: f64,
    /// Index of the near-star terms below.
    pub i: u64,
    pub j: u64,
    /// `k e² C(n-1,k)² / ((n-k) i²) · (n·C(n-1,k))^(-ζ(n-2k)/(Cn))`.
    pub near_star_base: f64,
    pub ln_near_star_base: f64,
    /// `n · base^i`, the `i`-th term of the near-star union bound.
    pub near_star_term: f64,
    pub ln_near_star_term: f64,
    /// `(ne/k · (n·C(n-1,k))^(-ζ(n-2k)/((20C)² n)))^C(n-1,k-1)`.
    pub far_family_bound: f64,
    pub ln_far_family_bound: f64,
    /// `⌈(ε/2)·C(n-k-1,k-1)⌉`.
    pub t0: u128,
    /// `⌈C(n-1,k-1)/(400C)⌉`.
    pub t1: u128,
    /// `z_{i,j} = n·C(C(n-1,k-1),i)·C(i·C(n-k,k),j)·(jp)^i·(1-p)^(j(C(n-k-1,k-1)-i))`.
    pub z_ij: f64,
    pub ln_z_ij: f64,
}

/// Inputs of [`analytic_bounds`] beyond `(n, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundInputs {
    pub zeta: f64,
    pub epsilon: f64,
    pub c_const: f64,
    pub i: u64,
    pub j: u64,
}

impl Default for BoundInputs {
    fn default() -> Self {
        BoundInputs {
            zeta: 1.0 + DEFAULT_EPSILON,
            epsilon: DEFAULT_EPSILON,
            c_const: 2.0,
            i: 1,
            j: 1,
        }
    }
}

/// `ln z_{i,j}`.
pub fn ln_z(params: GroundParams, p: f64, i: u64, j: u64) -> Result<f64> {
    let (n, k) = (params.n as i64, params.k as i64);
    let star = binom_i(n - 1, k - 1);
    let degree = binom_i(n - k, k);
    let cross = binom_i(n - k - 1, k - 1) as f64;
    if i as u128 > star {
        return Err(Error::domain(format!(
            "i = {i} exceeds C(n-1,k-1) = {star}"
        )));
    }
    let pool = i as u128 * degree;
    if j as u128 > pool {
        return Err(Error::domain(format!(
            "j = {j} exceeds i·C(n-k,k) = {pool}"
        )));
    }
    let (i_f, j_f) = (i as f64, j as f64);
    let jp = if i == 0 { 0.0 } else { i_f * (j_f * p).ln() };
    let missing = j_f * (cross - i_f);
    let q = if missing == 0.0 {
        0.0
    } else {
        missing * (-p).ln_1p()
    };
    Ok((n as f64).ln() + ln_binom(star as f64, i_f) + ln_binom(pool as f64, j_f) + jp + q)
}

pub fn analytic_bounds(params: GroundParams, inputs: BoundInputs) -> Result<BoundReport> {
    params.require_spectral()?;
    let BoundInputs {
        zeta,
        epsilon,
        c_const,
        i,
        j,
    } = inputs;
    if zeta.is_nan() || zeta <= 0.0 {
        return Err(Error::domain(format!("ζ = {zeta} must be positive")));
    }
    if c_const.is_nan() || c_const <= 0.0 {
        return Err(Error::domain(format!("C = {c_const} must be positive")));
    }
    if i == 0 {
        return Err(Error::domain("the near-star index i starts at 1"));
    }
    let crit = critical_probabilities(params)?;
    let (n, k) = (params.n as u64, params.k as u64);
    let (nf, kf) = (n as f64, k as f64);
    let p = (zeta * crit.p_c).clamp(0.0, 1.0);
    let cross = binom_big(n - k - 1, k - 1);
    let cross_f = ln_big(&cross).exp();
    let ln_outside = ln_big(&binom_big(n - 1, k));
    let ln_l = ln_n_binom(params);
    let ln_star = ln_big(&binom_big(n - 1, k - 1));
    let star_f = ln_star.exp();

    let ln_miss = if p == 1.0 {
        f64::NEG_INFINITY
    } else {
        cross_f * (-p).ln_1p()
    };
    let ex_exact = (nf.ln() + ln_outside + ln_miss).exp();
    // ln(1 - (1-p)^c) = ln(-expm1(c·ln(1-p)))
    let ln_success = (-ln_miss.exp_m1()).ln();
    let lower_bound_prob = (ln_outside.exp() * ln_success).exp();

    let ln_superstar_bound = (1.0 - zeta) * ln_l;
    let i_f = i as f64;
    let ln_near_star_base = kf.ln() + 2.0 + 2.0 * ln_outside
        - (nf - kf).ln()
        - 2.0 * i_f.ln()
        - zeta * (nf - 2.0 * kf) / (c_const * nf) * ln_l;
    let ln_near_star_term = nf.ln() + i_f * ln_near_star_base;
    let ln_far_family_bound = star_f
        * ((nf / kf).ln() + 1.0 - zeta * (nf - 2.0 * kf) / ((20.0 * c_const).powi(2) * nf) * ln_l);

    let t0 = (epsilon / 2.0 * cross_f).ceil().max(0.0) as u128;
    let t1 = (star_f / (400.0 * c_const)).ceil() as u128;
    let ln_z_ij = ln_z(params, p, i, j)?;

    Ok(BoundReport {
        n: params.n,
        k: params.k,
        zeta,
        epsilon,
        c_const,
        p_c: crit.p_c,
        p_0: crit.p_0,
        p,
        ex_exact,
        lower_bound_prob,
        superstar_bound: ln_superstar_bound.exp(),
        ln_superstar_bound,
        i,
        j,
        near_star_base: ln_near_star_base.exp(),
        ln_near_star_base,
        near_star_term: ln_near_star_term.exp(),
        ln_near_star_term,
        far_family_bound: ln_far_family_bound.exp(),
        ln_far_family_bound,
        t0,
        t1,
        z_ij: ln_z_ij.exp(),
        ln_z_ij,
    })
}

/// `(1 - (1-p)^C(n-k-1,k-1))^C(n-1,k)`.
pub fn no_superstar_probability(params: GroundParams, p: f64) -> f64 {
    let (n, k) = (params.n as u64, params.k as u64);
    let cross = ln_big(&binom_big(n - k - 1, k - 1)).exp();
    let outside = ln_big(&binom_big(n - 1, k)).exp();
    let ln_miss = if p >= 1.0 {
        f64::NEG_INFINITY
    } else {
        cross * (-p).ln_1p()
    };
    (outside * (-ln_miss.exp_m1()).ln()).exp()
}

/// `n·C(n-1,k)·(1-p)^C(n-k-1,k-1)`.
pub fn expected_superstars(params: GroundParams, p: f64) -> f64 {
    let (n, k) = (params.n as u64, params.k as u64);
    let cross = binom_i(n as i64 - k as i64 - 1, k as i64 - 1) as i32;
    (n as f64) * binom_i(n as i64 - 1, k as i64) as f64 * (1.0 - p).powi(cross)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u32, k: u32) -> GroundParams {
        GroundParams::new(n, k).unwrap()
    }

    #[test]
    fn critical_values() {
        let c = critical_probabilities(p(12, 2)).unwrap();
        assert!((c.p_c - 660f64.ln() / 9.0).abs() < 1e-14);
        assert!((c.p_c - 0.72137).abs() < 2e-5);
        assert!((c.p_0 - 0.55167).abs() < 1e-5);
        let c = critical_probabilities(p(64, 2)).unwrap();
        assert!((c.p_c - c.p_0).abs() / c.p_c < 0.15);
        assert!(critical_probabilities(p(5, 2)).is_err());
    }

    #[test]
    fn sampling_extremes() {
        let sim = Simulator::new(p(5, 2)).unwrap();
        assert!(sim.sample(0.0, 1, 0).retained.is_empty());
        assert_eq!(sim.sample(1.0, 1, 0).retained.len(), 15);
        assert_eq!(sim.sample(0.5, 9, 3), sim.sample(0.5, 9, 3));
        assert_ne!(sim.sample(0.5, 9, 3), sim.sample(0.5, 9, 4));
    }

    #[test]
    fn superstar_extremes() {
        let q = p(7, 2);
        let sim = Simulator::new(q).unwrap();
        assert_eq!(sim.count_superstars(&sim.sample(1.0, 0, 0)), 0);
        assert_eq!(sim.count_superstars(&sim.sample(0.0, 0, 0)), 7 * 15);
        assert!(sim.star_is_maximal(&sim.sample(1.0, 0, 0), 3));
        assert!(!sim.star_is_maximal(&sim.sample(0.0, 0, 0), 3));
    }

    #[test]
    fn ekr_extremes() {
        let sim = Simulator::new(p(6, 2)).unwrap();
        let full = sim.ekr_holds(&sim.sample(1.0, 0, 0), true).unwrap();
        assert!(full.holds && full.only_stars == Some(true));
        let empty = sim.ekr_holds(&sim.sample(0.0, 0, 0), false).unwrap();
        assert!(!empty.holds);
    }

    #[test]
    fn nested_samples() {
        let sim = Simulator::new(p(7, 2)).unwrap();
        for t in 0..20 {
            let lo = sim.sample(0.3, 5, t).retained;
            let hi = sim.sample(0.7, 5, t).retained;
            assert!(lo.iter().all(|e| hi.contains(e)));
        }
    }

    #[test]
    fn wilson_bounds() {
        let (lo, hi) = wilson_interval(50, 100);
        assert!(lo < 0.5 && hi > 0.5);
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
        assert_eq!(wilson_interval(0, 10).0, 0.0);
        assert_eq!(wilson_interval(10, 10).1, 1.0);
    }

    #[test]
    fn bound_values() {
        let b = analytic_bounds(
            p(12, 2),
            BoundInputs {
                zeta: 1.0,
                ..BoundInputs::default()
            },
        )
        .unwrap();
        assert_eq!(b.superstar_bound, 1.0);
        assert!((b.p_c - 0.72137).abs() < 2e-5);
        let b = analytic_bounds(
            p(12, 2),
            BoundInputs {
                zeta: 2.0,
                ..BoundInputs::default()
            },
        )
        .unwrap();
        assert!((b.superstar_bound - 1.0 / 660.0).abs() < 1e-15);
        assert_eq!(b.p, 1.0);
        assert_eq!(b.ex_exact, 0.0);
        assert!((ln_z(p(12, 2), 0.5, 0, 0).unwrap() - 12f64.ln()).abs() < 1e-12);
        assert!(ln_z(p(12, 2), 0.5, 12, 1).is_err());
        assert!(ln_z(p(12, 2), 0.5, 1, 46).is_err());
    }

    #[test]
    fn z_matches_direct_evaluation() {
        let q = p(9, 2);
        let pr: f64 = 0.3;
        let (i, j) = (2u64, 3u64);
        // n C(8,2) C(2·21,3) (j p)^i (1-p)^(j(6-i))
        let direct = 9.0 * 28.0 * 11480.0 * (3.0 * pr).powi(2) * (1.0 - pr).powi(3 * 4);
        let z = ln_z(q, pr, i, j).unwrap().exp();
        assert!((z - direct).abs() < 1e-9 * direct);
    }
}
