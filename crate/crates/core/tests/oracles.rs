//! Independent oracles for the exact arithmetic paths: numeric cubature
//! against the rational ball-moment recursion, and a boundary-projection
//! solver for the ball Dirichlet problem built from classical solid
//! harmonics and exact surface moments.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use ellipstone_core::dirichlet::{monomials_of_degree, solve_dirichlet};
use ellipstone_core::geometry::Ellipsoid;
use ellipstone_core::moments::ball_mean;
use ellipstone_core::poly::{parse_rational, Monomial, RatPoly};
use ellipstone_core::quad::{gauss_legendre, sphere_rule};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Mean of x^α over the unit ball by tensor Gauss-Legendre quadrature
/// (radial GL on [0,1] times the tensor sphere rule), independent of the
/// double-factorial recursion it certifies.
fn ball_mean_cubature(alpha: &[u32], n: usize) -> f64 {
    let level = 24;
    let sphere = sphere_rule(n - 1, level);
    let radial = gauss_legendre(20);
    let mut num = 0.0;
    let mut vol = 0.0;
    for (rx, rw) in radial.0.iter().zip(radial.1.iter()) {
        let r = 0.5 * (rx + 1.0);
        let w_r = 0.5 * rw * r.powi(n as i32 - 1);
        for (omega, w_s) in &sphere {
            let mut mono = 1.0;
            for (j, &a) in alpha.iter().enumerate() {
                mono *= (r * omega[j]).powi(a as i32);
            }
            num += w_r * w_s * mono;
            vol += w_r * w_s;
        }
    }
    num / vol
}

#[test]
fn ball_mean_certified_by_cubature() {
    for n in 2..=4usize {
        for deg in 0..=8u32 {
            for mono in monomials_of_degree(n, deg) {
                let exact = ball_mean(mono.exps(), n).to_f64().unwrap();
                let numeric = ball_mean_cubature(mono.exps(), n);
                assert!(
                    (exact - numeric).abs() <= 1e-12,
                    "n={} alpha={:?}: {} vs {}",
                    n,
                    mono.exps(),
                    exact,
                    numeric
                );
            }
        }
    }
    // A few spot checks in dimension 5.
    for alpha in [[2, 0, 0, 0, 0], [2, 2, 2, 0, 0], [4, 2, 0, 2, 0]] {
        let exact = ball_mean(&alpha, 5).to_f64().unwrap();
        let numeric = ball_mean_cubature(&alpha, 5);
        assert!((exact - numeric).abs() <= 1e-11);
    }
}

#[test]
fn ball_mean_frozen_values() {
    // Values computed with the cubature oracle above and frozen.
    assert_eq!(ball_mean(&[2, 0, 0], 3), rat(1, 5));
    assert_eq!(ball_mean(&[2, 2, 0], 3), rat(1, 35));
    assert_eq!(ball_mean(&[4, 0, 0], 3), rat(3, 35));
    assert_eq!(ball_mean(&[2, 2, 2], 3), rat(1, 315));
    assert_eq!(ball_mean(&[0, 0], 2), rat(1, 1));
    assert_eq!(ball_mean(&[6, 0], 2), rat(5, 64));
}

/// Exact mean of x^α over the unit sphere S^{N−1}:
/// Π (α_j−1)!! / Π_{i=1..|α|/2} (N + 2i − 2); zero for odd α.
fn surface_mean(alpha: &[u32], n: usize) -> BigRational {
    if alpha.iter().any(|a| a % 2 == 1) {
        return BigRational::zero();
    }
    let mut num = BigInt::one();
    for &a in alpha {
        let mut k = 1u32;
        while k < a {
            num *= BigInt::from(k);
            k += 2;
        }
    }
    let total: u32 = alpha.iter().sum();
    let mut den = BigInt::one();
    for i in 1..=(total / 2) {
        den *= BigInt::from(n as u32 + 2 * i - 2);
    }
    BigRational::new(num, den)
}

/// ⟨f, g⟩ on S² via exact surface moments (up to the constant |S²|,
/// which cancels in projection coefficients).
fn sphere_inner(f: &RatPoly, g: &RatPoly) -> BigRational {
    let mut acc = BigRational::zero();
    for (mf, cf) in f.terms() {
        for (mg, cg) in g.terms() {
            let alpha: Vec<u32> = mf
                .exps()
                .iter()
                .zip(mg.exps())
                .map(|(a, b)| a + b)
                .collect();
            acc += cf * cg * surface_mean(&alpha, 3);
        }
    }
    acc
}

/// The classical real solid harmonics of degree ≤ 4 in R³ (unnormalized).
fn solid_harmonics_table() -> Vec<RatPoly> {
    [
        // l = 0
        "1",
        // l = 1
        "x1",
        "x2",
        "x3",
        // l = 2
        "x1*x2",
        "x2*x3",
        "x1*x3",
        "x1^2 - x2^2",
        "2*x3^2 - x1^2 - x2^2",
        // l = 3
        "2*x3^3 - 3*x1^2*x3 - 3*x2^2*x3",
        "4*x1*x3^2 - x1^3 - x1*x2^2",
        "4*x2*x3^2 - x1^2*x2 - x2^3",
        "x1^2*x3 - x2^2*x3",
        "x1*x2*x3",
        "x1^3 - 3*x1*x2^2",
        "3*x1^2*x2 - x2^3",
        // l = 4
        "8*x3^4 - 24*x3^2*x1^2 - 24*x3^2*x2^2 + 3*x1^4 + 6*x1^2*x2^2 + 3*x2^4",
        "4*x1*x3^3 - 3*x1^3*x3 - 3*x1*x2^2*x3",
        "4*x2*x3^3 - 3*x1^2*x2*x3 - 3*x2^3*x3",
        "6*x1^2*x3^2 - 6*x2^2*x3^2 - x1^4 + x2^4",
        "6*x1*x2*x3^2 - x1^3*x2 - x1*x2^3",
        "x1^3*x3 - 3*x1*x2^2*x3",
        "3*x1^2*x2*x3 - x2^3*x3",
        "x1^4 - 6*x1^2*x2^2 + x2^4",
        "x1^3*x2 - x1*x2^3",
    ]
    .iter()
    .map(|s| parse_rational(s, Some(3)).unwrap())
    .collect()
}

/// Boundary-projection Dirichlet solver for the unit ball: expand the
/// trace of p in the (orthogonal) solid-harmonic basis with exact surface
/// moments; the harmonic extension is the same combination read as solid
/// harmonics. Independent of the Fischer-operator elimination.
fn ball_dirichlet_by_projection(p: &RatPoly) -> RatPoly {
    let basis = solid_harmonics_table();
    let mut u = RatPoly::zero(3);
    for b in &basis {
        let num = sphere_inner(p, b);
        if num.is_zero() {
            continue;
        }
        let den = sphere_inner(b, b);
        u = &u + &b.scale(&(num / den));
    }
    u
}

#[test]
fn solid_harmonics_are_harmonic_and_orthogonal() {
    let basis = solid_harmonics_table();
    assert_eq!(basis.len(), 25);
    for b in &basis {
        assert!(b.laplacian().is_zero(), "not harmonic: {}", b);
    }
    for (i, f) in basis.iter().enumerate() {
        for g in basis.iter().skip(i + 1) {
            assert!(
                sphere_inner(f, g).is_zero(),
                "not orthogonal: {} vs {}",
                f,
                g
            );
        }
    }
}

#[test]
fn ball_solver_matches_projection_oracle() {
    let ball = Ellipsoid::from_semiaxes(&[1.0, 1.0, 1.0]).unwrap();
    let cases = [
        "x1^2",
        "x1^2*x2",
        "x1^4",
        "x1*x2*x3 + x3^2",
        "x1^4 - 2*x2^4 + x3^3*x1 - 5",
        "3/7*x1^2*x2^2 + x2*x3^3 - 1/2*x1",
        "x1^3*x2 + x2^2*x3^2",
    ];
    for src in cases {
        let p = parse_rational(src, Some(3)).unwrap();
        let direct = solve_dirichlet(&ball, &p);
        let oracle = ball_dirichlet_by_projection(&p);
        assert_eq!(direct.u, oracle, "data {}", src);
    }
}

/// The mean of (Σ t_k x_k)^m over the unit ball as a polynomial in t,
/// evaluated through ball_mean.
fn linear_power_mean(t: &[BigRational], m: u32) -> BigRational {
    let n = t.len();
    let mut form = RatPoly::zero(n);
    for (j, c) in t.iter().enumerate() {
        form.add_term(Monomial::var(n, j), c.clone());
    }
    let powed = form.pow(m);
    let mut acc = BigRational::zero();
    for (mono, c) in powed.terms() {
        acc += c * &ball_mean(mono.exps(), n);
    }
    acc
}

#[test]
fn linear_power_mean_depends_only_on_norm() {
    // (3,4,0) and (5,0,0) share Σ t² = 25: the means agree exactly.
    for m in [0u32, 2, 4, 6, 8] {
        let p1 = linear_power_mean(&[rat(3, 1), rat(4, 1), rat(0, 1)], m);
        let p2 = linear_power_mean(&[rat(5, 1), rat(0, 1), rat(0, 1)], m);
        assert_eq!(p1, p2, "m = {}", m);
        // And a rational non-axis pair: (1, 2, 2) vs (3, 0, 0), Σ = 9.
        let q1 = linear_power_mean(&[rat(1, 1), rat(2, 1), rat(2, 1)], m);
        let q2 = linear_power_mean(&[rat(3, 1), rat(0, 1), rat(0, 1)], m);
        assert_eq!(q1, q2, "m = {}", m);
    }
    // Odd powers vanish by symmetry.
    assert!(linear_power_mean(&[rat(3, 1), rat(4, 1), rat(0, 1)], 3).is_zero());
}

#[test]
fn linear_power_mean_rotation_samples() {
    // Numeric rotations at double precision: values agree to 1e-12.
    let m = 6u32;
    let t = [0.6f64, -0.3, 0.9];
    let norm2: f64 = t.iter().map(|v| v * v).sum();
    // Rotate within the plane spanned by (t, e3-ish) by a few angles.
    let p_ref = linear_power_mean_f64(&t, m);
    for angle in [0.3f64, 1.1, 2.0] {
        let (s, c) = angle.sin_cos();
        let rotated = [c * t[0] - s * t[1], s * t[0] + c * t[1], t[2]];
        let check: f64 = rotated.iter().map(|v| v * v).sum();
        assert!((check - norm2).abs() < 1e-14);
        let p_rot = linear_power_mean_f64(&rotated, m);
        assert!(
            (p_rot - p_ref).abs() <= 1e-12 * p_ref.abs(),
            "angle {}: {} vs {}",
            angle,
            p_rot,
            p_ref
        );
    }
}

fn linear_power_mean_f64(t: &[f64], m: u32) -> f64 {
    let exact: Vec<BigRational> = t
        .iter()
        .map(|v| BigRational::from_float(*v).unwrap())
        .collect();
    linear_power_mean(&exact, m).to_f64().unwrap()
}

#[test]
fn bergman_gram_residual_over_aspect_ratios() {
    // Orthonormality must hold to 1e-11 up to degree 20 across aspect
    // ratios 1..5 (the equilibrated Cholesky keeps the conditioning flat).
    use ellipstone_core::bergman;
    for aspect in [1.0f64, 2.0, 3.5, 5.0] {
        let m = bergman::MomentMatrix::ellipse(aspect, 1.0, 20).unwrap();
        let basis = bergman::orthonormalize(&m).unwrap();
        let residual = basis.orthonormality_residual(&m);
        assert!(
            residual <= 1e-11,
            "aspect {}: Gram residual {} (cond {})",
            aspect,
            residual,
            basis.cond_estimate()
        );
    }
}
