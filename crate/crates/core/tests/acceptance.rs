//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Runs with `harness = false` so the lines always show.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use sparse_ekr::baranyai::baranyai_partition;
use sparse_ekr::binom::binom;
use sparse_ekr::family::{disjoint_pairs, sym_diff_size};
use sparse_ekr::kneser::{extremal_subgraph, spectrum_cross_check, verify_ekr, KneserGraph};
use sparse_ekr::removal::{calibrate_constant, nearest_union_exact, removal_check, RemovalConfig};
use sparse_ekr::spectral::{
    decompose_affine, kneser_eigenvalue, quadratic_form, residual_bound_check,
};
use sparse_ekr::threshold::{
    critical_probabilities, expected_superstars, find_threshold, no_superstar_probability,
    Simulator, ThresholdParams,
};
use sparse_ekr::SetFamily;

use common::{params, perturb, rng, spectral_pairs, sweep_family};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// 1. Independence number and uniqueness of the stars on full Kneser graphs.
fn ekr_exactness() -> Outcome {
    let start = Instant::now();
    let mut cases = 0;
    let mut bad = Vec::new();
    // KSet is one machine word, so n stops at 64.
    for n in 4..=64u32 {
        for k in 2..=n / 2 {
            if binom(n as u64, k as u64) > 3000 {
                continue;
            }
            cases += 1;
            let p = params(n, k);
            match verify_ekr(p) {
                Ok(r) => {
                    let ok = r.alpha as u128 == p.star_size()
                        && (n == 2 * k || (r.maximum_sets == n as usize && r.only_stars));
                    if !ok {
                        bad.push(format!(
                            "({n},{k}) alpha={} sets={}",
                            r.alpha, r.maximum_sets
                        ));
                    }
                }
                Err(e) => bad.push(format!("({n},{k}) {e}")),
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = bad.is_empty() && elapsed < Duration::from_secs(600);
    outcome(
        pass,
        format!(
            "{cases} graphs, {:.1}s, failures: {:?}",
            elapsed.as_secs_f64(),
            bad
        ),
    )
}

/// 2. Dense adjacency spectra against the closed form.
fn spectrum_identity() -> Outcome {
    let mut cases = 0;
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    for n in 2..=64u32 {
        for k in 1..=n / 2 {
            if binom(n as u64, k as u64) > 500 {
                continue;
            }
            let p = params(n, k);
            cases += 1;
            let c = spectrum_cross_check(p).unwrap();
            worst = worst.max(c.max_error);
            // Independent multiplicity count of λ_1 from the numeric spectrum.
            let l1 = kneser_eigenvalue(p, 1).unwrap().value;
            let numeric_l1 = c.observed.iter().find(|(v, _)| *v == l1).map_or(0, |x| x.1);
            let l1_ok = c.lambda1_multiplicity == (n - 1) as u128
                && (n == 2 * k || numeric_l1 == (n - 1) as usize);
            if !(c.matches && c.max_error < 1e-6 && l1_ok) {
                bad.push(format!("({n},{k})"));
            }
        }
    }
    let petersen = spectrum_cross_check(params(5, 2)).unwrap();
    let petersen_ok = petersen.observed == vec![(-2, 4), (1, 5), (3, 1)];
    outcome(
        bad.is_empty() && petersen_ok,
        format!(
            "{cases} graphs, max error {worst:.2e}, Petersen {:?}, failures: {bad:?}",
            petersen.observed
        ),
    )
}

/// 3. `fᵀAf = 2 dp(F)` with `A` built explicitly.
fn quadratic_form_identity() -> Outcome {
    let mut r = rng(3);
    let mut checked = 0;
    let mut bad = 0;
    for (n, k) in [(5, 2), (8, 3), (10, 4), (12, 5)] {
        let p = params(n, k);
        let g = KneserGraph::build(p).unwrap();
        let verts = g.vertices().to_vec();
        for _ in 0..1000 {
            let m = r.random_range(0..=p.universe_size());
            let f = SetFamily::random(p, m, r.random()).unwrap();
            let ind: Vec<u64> = verts.iter().map(|s| f.contains(*s) as u64).collect();
            let mut ftaf = 0u64;
            for (u, v) in g.graph().edges() {
                ftaf += 2 * ind[u] * ind[v];
            }
            checked += 1;
            if ftaf != 2 * disjoint_pairs(&f) || quadratic_form(&f) != ftaf {
                bad += 1;
            }
        }
    }
    outcome(bad == 0, format!("{checked} families, {bad} mismatches"))
}

struct SweepResult {
    families: usize,
    residual_failures: usize,
    parseval_failures: usize,
    worst_residual_gap: f64,
    worst_parseval: f64,
}

/// Families for criteria 4 and 5.
fn spectral_sweep() -> SweepResult {
    let pairs = spectral_pairs(14);
    let per_pair = 10_000usize.div_ceil(pairs.len()) + 1;
    let mut r = rng(4);
    let mut out = SweepResult {
        families: 0,
        residual_failures: 0,
        parseval_failures: 0,
        worst_residual_gap: f64::NEG_INFINITY,
        worst_parseval: 0.0,
    };
    for p in pairs {
        for i in 0..per_pair {
            let f = sweep_family(p, &mut r);
            let ell = 1 + (i % 2) as u32;
            let b = residual_bound_check(&f, ell).unwrap();
            let d = decompose_affine(&f).unwrap();
            out.families += 1;
            out.worst_residual_gap = out.worst_residual_gap.max(b.lhs - b.rhs);
            out.worst_parseval = out.worst_parseval.max(d.parseval_residual);
            out.residual_failures += !b.holds as usize;
            out.parseval_failures += (d.parseval_residual > 1e-9) as usize;
        }
    }
    out
}

/// 6. Calibrated constant for the removal bound and anti-star distances.
fn removal_calibration() -> Outcome {
    let mut r = rng(6);
    let mut samples: Vec<(SetFamily, u32)> = Vec::new();
    // Sparse edits of stars and unions at n large enough for the regime to
    // contain more than exact unions.
    for (n, k) in [(24, 3), (30, 3), (30, 4), (36, 4), (40, 4)] {
        let p = params(n, k);
        for ell in [1u32, 2] {
            if (n as u64) <= 2 * k as u64 * (ell as u64).pow(2) {
                continue;
            }
            let centres: Vec<u32> = (1..=ell).collect();
            let base = SetFamily::union_of_stars(p, &centres).unwrap();
            for _ in 0..40 {
                let a = r.random_range(0..=3);
                let b = r.random_range(0..=3);
                samples.push((perturb(&base, a, b, &mut r), ell));
            }
        }
    }
    // Small-n sweep: mostly outside the regime, kept for coverage.
    for p in spectral_pairs(12) {
        for _ in 0..10 {
            samples.push((sweep_family(p, &mut r), 1));
        }
    }
    let cal = calibrate_constant(&samples).unwrap();
    let mut regime_ok = cal.all_hold && cal.c_star.is_finite();
    if regime_ok {
        // Re-check the in-regime families one by one with the public check.
        for (f, ell) in &samples {
            let p = f.params();
            if (p.n as u64) <= 2 * p.k as u64 * (*ell as u64).pow(2) {
                continue;
            }
            let cfg = RemovalConfig::new(*ell, cal.c_star).unwrap();
            let rep = removal_check(f, cfg).unwrap();
            if rep.preconditions_met && !rep.holds {
                regime_ok = false;
            }
        }
    }
    // Anti-star against the nearest star, by brute force over centres.
    let mut anti = Vec::new();
    let mut anti_ok = true;
    for (n, k) in [(5, 2), (7, 3), (9, 4)] {
        let p = params(n, k);
        let a = SetFamily::antistar(p, n).unwrap();
        let oracle = (1..=n)
            .map(|c| sym_diff_size(&a, &SetFamily::star(p, c).unwrap()).unwrap())
            .min()
            .unwrap();
        let got = nearest_union_exact(&a, 1).unwrap().distance;
        anti_ok &= got == oracle;
        anti.push(format!("({n},{k}):{got}/{oracle}"));
    }
    anti_ok &= anti[0] == "(5,2):4/4";
    outcome(
        regime_ok && anti_ok,
        format!(
            "C* = {:.6}, {} samples, {} in regime, worst ratio {:.4}; anti-star distance/oracle {}",
            cal.c_star,
            cal.samples,
            cal.in_regime,
            cal.worst_ratio,
            anti.join(" ")
        ),
    )
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// 7. Superstar count and a single star's maximality at (12,2), p = 1/2.
fn superstar_expectation() -> Outcome {
    let start = Instant::now();
    let p = params(12, 2);
    let sim = Simulator::new(p).unwrap();
    let trials = 100_000u64;
    let mut xs = Vec::with_capacity(trials as usize);
    let mut maximal = 0u64;
    for t in 0..trials {
        let s = sim.sample(0.5, 7, t);
        xs.push(sim.count_superstars(&s) as f64);
        maximal += sim.star_is_maximal(&s, 1) as u64;
    }
    let (mean, sd) = mean_sd(&xs);
    let ex = expected_superstars(p, 0.5);
    let ex_ok = (ex - 660.0 / 512.0).abs() < 1e-12
        && (mean - ex).abs() <= 3.0 * sd / (trials as f64).sqrt();
    let q = no_superstar_probability(params(12, 2), 0.5);
    let q_direct = (1.0 - 0.5f64.powi(9)).powi(55);
    let freq = maximal as f64 / trials as f64;
    let sigma = (q * (1.0 - q) / trials as f64).sqrt();
    let star_ok = (q - q_direct).abs() < 1e-12 && (freq - q).abs() <= 3.0 * sigma;
    let elapsed = start.elapsed();
    outcome(
        ex_ok && star_ok && elapsed < Duration::from_secs(120),
        format!(
            "mean X {mean:.5} vs {ex:.5} (3σ = {:.5}); star frequency {freq:.5} vs {q:.5} (3σ = {:.5}); {:.1}s",
            3.0 * sd / (trials as f64).sqrt(),
            3.0 * sigma,
            elapsed.as_secs_f64()
        ),
    )
}

/// 8. The ½-crossing lies strictly between p = 0.4 and p = 0.95.
fn threshold_bracketing() -> Outcome {
    let p = params(12, 2);
    let sim = Simulator::new(p).unwrap();
    let est = |pv: f64| {
        sim.estimate(&ThresholdParams::new(p, pv, 500, 42).unwrap(), 0)
            .unwrap()
    };
    let lo = est(0.4);
    let hi = est(0.95);
    let t = find_threshold(p, 500, 42, 0).unwrap();
    let crit = critical_probabilities(p).unwrap();
    let pass = lo.fraction <= 0.5
        && hi.fraction >= 0.5
        && t.p_half > 0.4
        && t.p_half < 0.95
        && !t.non_monotone;
    outcome(
        pass,
        format!(
            "fraction {:.3} at 0.4, {:.3} at 0.95; p_half {:.4} in [{:.4}, {:.4}]; p_c {:.5}, p_0 {:.5}",
            lo.fraction, hi.fraction, t.p_half, t.lo, t.hi, crit.p_c, crit.p_0
        ),
    )
}

/// 9. Perfect-matching partitions and the union-of-cliques subgraph.
fn baranyai_checks() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for (n, k) in [(4, 2), (6, 2), (6, 3), (8, 2), (9, 3)] {
        let p = params(n, k);
        let valid = baranyai_partition(p).and_then(|b| b.validate()).is_ok();
        ok &= valid;
        notes.push(format!(
            "({n},{k}):{}",
            if valid { "valid" } else { "INVALID" }
        ));
    }
    let ex = extremal_subgraph(params(6, 2)).unwrap();
    let ex_ok =
        ex.alpha == 5 && ex.degree == Some(2) && ex.edges == 15 && ex.edge_lower_bound() == 15;
    outcome(
        ok && ex_ok,
        format!(
            "{}; extremal (6,2): alpha {}, degree {:?}, {} edges, lower bound {}",
            notes.join(" "),
            ex.alpha,
            ex.degree,
            ex.edges,
            ex.edge_lower_bound()
        ),
    )
}

/// 10. `simulate` output is byte-identical for 1, 2 and 8 workers.
fn determinism() -> Outcome {
    let run = |workers: &str| {
        Command::new(env!("CARGO_BIN_EXE_sparse-ekr"))
            .args([
                "simulate",
                "--n",
                "12",
                "--k",
                "2",
                "--p",
                "0.5,0.6,0.7",
                "--trials",
                "2000",
                "--seed",
                "2024",
                "--workers",
                workers,
            ])
            .output()
            .expect("binary runs")
    };
    let outs: Vec<_> = ["1", "2", "8"].iter().map(|w| run(w)).collect();
    let all_ok = outs.iter().all(|o| o.status.success());
    let same = outs.windows(2).all(|w| w[0].stdout == w[1].stdout);
    outcome(
        all_ok && same && !outs[0].stdout.is_empty(),
        format!("{} bytes per run, identical: {same}", outs[0].stdout.len()),
    )
}

fn main() {
    let sweep = spectral_sweep();
    let results: Vec<(u32, &str, Outcome)> = vec![
        (1, "EKR exactness", ekr_exactness()),
        (2, "spectrum identity", spectrum_identity()),
        (3, "quadratic form identity", quadratic_form_identity()),
        (
            4,
            "spectral residual bound sweep",
            outcome(
                sweep.families >= 10_000 && sweep.residual_failures == 0,
                format!(
                    "{} families, {} failures, max lhs - rhs {:.3e}",
                    sweep.families, sweep.residual_failures, sweep.worst_residual_gap
                ),
            ),
        ),
        (
            5,
            "Parseval",
            outcome(
                sweep.families >= 10_000 && sweep.parseval_failures == 0,
                format!(
                    "{} families, {} failures, max residual {:.3e}",
                    sweep.families, sweep.parseval_failures, sweep.worst_parseval
                ),
            ),
        ),
        (6, "removal calibration", removal_calibration()),
        (7, "superstar expectation", superstar_expectation()),
        (8, "threshold bracketing", threshold_bracketing()),
        (9, "Baranyai partitions", baranyai_checks()),
        (10, "determinism across workers", determinism()),
    ];
    let mut failed = 0;
    for (i, name, o) in &results {
        println!(
            "criterion {i:>2} {}: {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += !o.pass as usize;
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
