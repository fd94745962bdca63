//! Exact normalized monomial moments over solid ellipsoids and the
//! confocal mean-value check.
//!
//! Every integral reduces to the unit ball by scaling each coordinate by a
//! semiaxis, and the normalized ball moments are rationals (the π factors
//! cancel), so means of rational polynomials over rational-squared
//! ellipsoids are exact.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::geometry::Ellipsoid;
use crate::poly::RatPoly;
use crate::report::{Sample, VerificationReport};

/// Exact mean of x^α over the unit ball in R^n; zero when any α_j is odd.
///
/// For α = 2β the mean is Π_j (2β_j−1)!! / Π_{i=1..|β|} (n+2i), the
/// double-factorial reduction of the half-integer Gamma ratios.
pub fn ball_mean(alpha: &[u32], n: usize) -> BigRational {
    assert!(
        n >= 1 && alpha.len() <= n,
        "multi-index longer than dimension"
    );
    if alpha.iter().any(|&a| a % 2 == 1) {
        return BigRational::zero();
    }
    let mut numer = BigInt::one();
    let mut half_total = 0u32;
    for &a in alpha {
        let b = a / 2;
        half_total += b;
        // (2b−1)!! = 1·3·5···(2b−1)
        let mut k = 1u32;
        while k < 2 * b {
            numer *= BigInt::from(k);
            k += 2;
        }
    }
    let mut denom = BigInt::one();
    for i in 1..=half_total {
        denom *= BigInt::from(n as u32 + 2 * i);
    }
    BigRational::new(numer, denom)
}

/// Exact normalized mean (1/|Ω|)∫_Ω p dx. Odd-power terms integrate to
/// zero, so only even exponents are scaled, by exact squared semiaxes.
pub fn ellipsoid_mean(p: &RatPoly, e: &Ellipsoid) -> Result<BigRational> {
    if p.nvars() != e.dim() {
        return Err(Error::ArityMismatch {
            expected: e.dim(),
            got: p.nvars(),
        });
    }
    let n = e.dim();
    let sq = e.semiaxes_sq();
    let mut acc = BigRational::zero();
    for (m, c) in p.terms() {
        if m.exps().iter().any(|&a| a % 2 == 1) {
            continue;
        }
        let mut term = c * &ball_mean(m.exps(), n);
        for (j, &a) in m.exps().iter().enumerate() {
            for _ in 0..(a / 2) {
                term *= &sq[j];
            }
        }
        acc += term;
    }
    Ok(acc)
}

/// Exact (un-normalized) moment ∫_Ω p dx divided by Vol(B_n): the volume
/// factor Π a_j is irrational in general, so the caller multiplies by the
/// floating volume when a number is needed.
pub fn ellipsoid_moment_over_volume(p: &RatPoly, e: &Ellipsoid) -> Result<BigRational> {
    ellipsoid_mean(p, e)
}

/// Checks the confocal mean-value property: the mean of a harmonic
/// polynomial over Ω_λ is independent of λ. Means are compared exactly.
pub fn maclaurin_check(h: &RatPoly, e: &Ellipsoid, lambdas: &[f64]) -> Result<VerificationReport> {
    if !h.laplacian().is_zero() {
        return Err(Error::HarmonicityViolated);
    }
    mean_constancy_check(h, e, lambdas, "maclaurin")
}

/// The underlying constancy check without the harmonicity gate; used as
/// the negative control (non-harmonic data must be detected).
pub fn mean_constancy_check(
    p: &RatPoly,
    e: &Ellipsoid,
    lambdas: &[f64],
    check_name: &str,
) -> Result<VerificationReport> {
    let mut samples = Vec::new();
    let mut means: Vec<(f64, BigRational)> = Vec::new();
    for &l in lambdas {
        let el = e.confocal(l)?;
        means.push((l, ellipsoid_mean(p, &el)?));
    }
    let reference = means
        .first()
        .map(|(_, m)| m.clone())
        .unwrap_or_else(BigRational::zero);
    for (l, m) in &means {
        samples.push(Sample::exact(
            format!("lambda={}: mean={}", l, m),
            m == &reference,
        ));
    }
    Ok(VerificationReport::new(
        check_name,
        serde_json::json!({
            "data": p.to_string(),
            "semiaxes": e.semiaxes(),
            "lambdas": lambdas,
        }),
        samples,
        crate::tolerances::EXACT,
    ))
}
