//! Eigenvalues of the Kneser graph and the constant/affine/residual split of a
//! family's indicator on the slice.
//!
//! All expectations are under the uniform measure on `C([n], k)`. The span of
//! the two top eigenspaces is the space of affine functions
//! `g(x) = a_0 + Σ a_i x_i`, so the projection onto it is an ordinary least
//! squares fit. With the gauge `Σ a_i = 0` the normal equations decouple:
//! `a_0 = E[f]` and `a_i = (E[f x_i] - a_0 k/n) / (k/n - q)` with
//! `q = E[x_i x_j] = k(k-1)/(n(n-1))`. Everything is done in exact rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::binom::binom_i;
use crate::error::{Error, Result};
use crate::family::{
    degree_profile, disjoint_pairs, family_stats, rational_to_f64, GroundParams, SetFamily,
};

/// The `i`-th distinct eigenvalue of `K(n, k)` and its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct KneserEigenvalue {
    pub index: u32,
    pub value: i128,
    pub multiplicity: u128,
}

/// `λ_i = (-1)^i C(n-k-i, k-i)` with multiplicity `C(n,i) - C(n,i-1)`.
pub fn kneser_eigenvalue(params: GroundParams, i: u32) -> Result<KneserEigenvalue> {
    params.require_graph()?;
    let (n, k) = (params.n as i64, params.k as i64);
    if i > params.k {
        return Err(Error::IndexOutOfRange {
            index: i.into(),
            max: params.k.into(),
        });
    }
    let i_ = i as i64;
    let magnitude = binom_i(n - k - i_, k - i_) as i128;
    let value = if i.is_multiple_of(2) { magnitude } else { -magnitude };
    let multiplicity = binom_i(n, i_) - binom_i(n, i_ - 1);
    Ok(KneserEigenvalue {
        index: i,
        value,
        multiplicity,
    })
}

/// All `k + 1` eigenvalues.
pub fn kneser_spectrum(params: GroundParams) -> Result<Vec<KneserEigenvalue>> {
    (0..=params.k)
        .map(|i| kneser_eigenvalue(params, i))
        .collect()
}

/// `f = f_0 + f_1 + f_2` for the indicator `f` of a family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralDecomposition {
    /// `E[f] = |F| / C(n,k)`.
    pub f0: f64,
    /// `a_0, a_1, .., a_n` of `g = f_0 + f_1`, with `Σ_{i>=1} a_i = 0`.
    pub affine_coeffs: Vec<f64>,
    pub f1_norm_sq: f64,
    pub f2_norm_sq: f64,
    /// `|‖f‖² - (f_0² + ‖f_1‖² + ‖f_2‖²)|`.
    pub parseval_residual: f64,
    #[serde(skip)]
    exact: ExactParts,
}

#[derive(Debug, Clone, PartialEq)]
struct ExactParts {
    f0: BigRational,
    coeffs: Vec<BigRational>,
    f1: BigRational,
    f2: BigRational,
}

impl SpectralDecomposition {
    pub fn f0_exact(&self) -> &BigRational {
        &self.exact.f0
    }

    pub fn f1_norm_sq_exact(&self) -> &BigRational {
        &self.exact.f1
    }

    pub fn f2_norm_sq_exact(&self) -> &BigRational {
        &self.exact.f2
    }

    /// Value of the affine part `g` on a set.
    pub fn affine_value(&self, set: crate::KSet) -> f64 {
        self.affine_coeffs[0]
            + set
                .elements()
                .map(|e| self.affine_coeffs[e as usize])
                .sum::<f64>()
    }
}

fn rat(n: u128) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Least squares projection of the indicator onto the affine functions.
pub fn decompose_affine(family: &SetFamily) -> Result<SpectralDecomposition> {
    let params = family.params();
    params.require_spectral()?;
    let (n, k) = (params.n as u128, params.k as u128);
    let total = rat(params.universe_size());
    let mean = rat(family.len() as u128) / &total;

    let p1 = rat(k) / rat(n);
    let q = rat(k * (k - 1)) / rat(n * (n - 1));
    let spread = &p1 - &q;

    let degrees = degree_profile(family);
    let mut coeffs = Vec::with_capacity(params.n as usize + 1);
    coeffs.push(mean.clone());
    for &d in &degrees {
        let corr = rat(d as u128) / &total;
        coeffs.push((corr - &mean * &p1) / &spread);
    }

    // E[g²] = a_0² + (k/n - q) Σ a_i² under the gauge.
    let sum_sq = coeffs[1..]
        .iter()
        .fold(BigRational::zero(), |acc, a| acc + a * a);
    let g_sq = &mean * &mean + &spread * &sum_sq;
    // E[f g] = (1/N) Σ_{A ∈ F} g(A) = a_0 E[f] + Σ a_i d_i / N.
    let fg = coeffs[1..]
        .iter()
        .zip(&degrees)
        .fold(&mean * &mean, |acc, (a, &d)| {
            acc + a * rat(d as u128) / &total
        });
    let f1 = &g_sq - &mean * &mean;
    let f2 = &mean - BigRational::from_integer(2.into()) * &fg + &g_sq;

    let f0 = rational_to_f64(&mean);
    let f1_f = rational_to_f64(&f1);
    let f2_f = rational_to_f64(&f2);
    Ok(SpectralDecomposition {
        f0,
        affine_coeffs: coeffs.iter().map(rational_to_f64).collect(),
        f1_norm_sq: f1_f,
        f2_norm_sq: f2_f,
        parseval_residual: (f0 - (f0 * f0 + f1_f + f2_f)).abs(),
        exact: ExactParts {
            f0: mean,
            coeffs,
            f1,
            f2,
        },
    })
}

/// `fᵀ A f` for the Kneser adjacency `A`, summed over ordered disjoint pairs.
pub fn quadratic_form(family: &SetFamily) -> u64 {
    let m = family.members();
    m.iter()
        .map(|a| m.iter().filter(|b| a.0 & b.0 == 0).count() as u64)
        .sum()
}

/// Comparison of the residual `‖f - g‖²` against
/// `((2ℓ-1)α + 2β)·k/(n-2k)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualBound {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Tolerance for the floating comparisons of norms.
pub const NORM_TOL: f64 = 1e-9;

/// Checks the spectral residual bound for a family with the given `ℓ`.
pub fn residual_bound_check(family: &SetFamily, ell: u32) -> Result<ResidualBound> {
    let params = family.params();
    let stats = family_stats(family, ell)?;
    let dec = decompose_affine(family)?;
    let (n, k) = (params.n as i64, params.k as i64);
    let rhs = stats.excess() * BigRational::new(k.into(), (n - 2 * k).into());
    let lhs = dec.f2_norm_sq;
    let rhs = rational_to_f64(&rhs);
    Ok(ResidualBound {
        lhs,
        rhs,
        holds: lhs <= rhs + NORM_TOL,
    })
}

/// `λ_1 ‖f_1‖² + λ_0 f_0² + λ_res ‖f_2‖² <= fᵀAf / C(n,k)` in exact
/// arithmetic, where `λ_res = λ_3` for `k >= 3` and `0` otherwise.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralChain {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn spectral_chain(family: &SetFamily) -> Result<SpectralChain> {
    let params = family.params();
    let dec = decompose_affine(family)?;
    let l0 = kneser_eigenvalue(params, 0)?.value;
    let l1 = kneser_eigenvalue(params, 1)?.value;
    let lres = if params.k >= 3 {
        kneser_eigenvalue(params, 3)?.value
    } else {
        0
    };
    let big = |v: i128| BigRational::from_integer(BigInt::from(v));
    let f0 = &dec.exact.f0;
    let lhs = big(l1) * &dec.exact.f1 + big(l0) * f0 * f0 + big(lres) * &dec.exact.f2;
    let rhs = BigRational::new(
        BigInt::from(2 * disjoint_pairs(family)),
        BigInt::from(params.universe_size()),
    );
    Ok(SpectralChain {
        lhs: rational_to_f64(&lhs),
        rhs: rational_to_f64(&rhs),
        holds: lhs <= rhs,
    })
}

/// Largest violation of `E[(f - g) h] = 0` over `h ∈ {1, x_1, .., x_n}`.
pub fn orthogonality_defect(family: &SetFamily, dec: &SpectralDecomposition) -> f64 {
    let params = family.params();
    let (n, k) = (params.n as u128, params.k as u128);
    let total = rat(params.universe_size());
    let p1 = rat(k) / rat(n);
    let q = rat(k * (k - 1)) / rat(n * (n - 1));
    let a = &dec.exact.coeffs;
    let sum_a = a[1..].iter().fold(BigRational::zero(), |s, x| s + x);
    let mut worst = (&dec.exact.f0 - (&a[0] + &p1 * &sum_a)).abs();
    for (i, &d) in degree_profile(family).iter().enumerate() {
        // E[g x_i] = a_0 k/n + a_i k/n + q Σ_{j != i} a_j
        let eg = &a[0] * &p1 + &a[i + 1] * &p1 + &q * (&sum_a - &a[i + 1]);
        let defect = (rat(d as u128) / &total - eg).abs();
        if defect > worst {
            worst = defect;
        }
    }
    rational_to_f64(&worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::KSet;

    fn p(n: u32, k: u32) -> GroundParams {
        GroundParams::new(n, k).unwrap()
    }

    fn fam(params: GroundParams, sets: &[&[u32]]) -> SetFamily {
        let v = sets
            .iter()
            .map(|s| KSet::from_elements(params, s).unwrap())
            .collect();
        SetFamily::from_sets(params, v).unwrap()
    }

    #[test]
    fn petersen_eigenvalues() {
        let vals: Vec<_> = kneser_spectrum(p(5, 2))
            .unwrap()
            .iter()
            .map(|e| (e.value, e.multiplicity))
            .collect();
        assert_eq!(vals, [(3, 1), (-2, 4), (1, 5)]);
        assert!(kneser_eigenvalue(p(5, 2), 3).is_err());
    }

    #[test]
    fn decomposition_examples() {
        let full = decompose_affine(&SetFamily::full(p(5, 2)).unwrap()).unwrap();
        assert_eq!(full.f0, 1.0);
        assert!(full.f1_norm_sq.abs() < 1e-12 && full.f2_norm_sq.abs() < 1e-12);

        let star = decompose_affine(&SetFamily::star(p(5, 2), 1).unwrap()).unwrap();
        assert!(star.f2_norm_sq_exact().is_zero());

        let two = decompose_affine(&fam(p(5, 2), &[&[1, 2], &[3, 4]])).unwrap();
        assert!(two.f2_norm_sq > 0.0 && two.f2_norm_sq <= 1.5);
    }

    #[test]
    fn quadratic_form_examples() {
        assert_eq!(quadratic_form(&SetFamily::star(p(6, 2), 3).unwrap()), 0);
        assert_eq!(quadratic_form(&SetFamily::antistar(p(5, 2), 5).unwrap()), 6);
        assert_eq!(quadratic_form(&SetFamily::full(p(5, 2)).unwrap()), 30);
    }

    #[test]
    fn residual_bound_examples() {
        let r = residual_bound_check(&SetFamily::star(p(5, 2), 1).unwrap(), 1).unwrap();
        assert_eq!((r.lhs, r.rhs, r.holds), (0.0, 0.0, true));
        let r = residual_bound_check(&SetFamily::antistar(p(5, 2), 5).unwrap(), 1).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!((r.rhs - 0.5).abs() < 1e-15 && r.holds);
        let r = residual_bound_check(&fam(p(5, 2), &[&[1, 2], &[3, 4]]), 1).unwrap();
        assert!((r.rhs - 1.5).abs() < 1e-15 && r.holds);
    }

    #[test]
    fn gauge_is_respected() {
        let f = SetFamily::random(p(9, 3), 30, 7).unwrap();
        let d = decompose_affine(&f).unwrap();
        assert!(d.affine_coeffs[1..].iter().sum::<f64>().abs() < 1e-12);
        assert!(orthogonality_defect(&f, &d) < 1e-15);
        assert!(spectral_chain(&f).unwrap().holds);
    }
}
