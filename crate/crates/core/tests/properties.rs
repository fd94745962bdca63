//! Property tests: ring laws, the Fischer pairing identities, isotropic
//! harmonicity, confocal composition, and Dirichlet solution invariants
//! over randomized inputs.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use proptest::prelude::*;

use ellipstone_core::dirichlet::{monomials_of_degree, solve_dirichlet};
use ellipstone_core::geometry::Ellipsoid;
use ellipstone_core::poly::{
    dot_power, fischer_inner, multi_factorial, parse_rational, radius_squared, Monomial, MultiPoly,
    RatPoly,
};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Strategy: sparse rational polynomial in `nvars` variables, degree ≤ max_deg.
fn rat_poly(nvars: usize, max_deg: u32, max_terms: usize) -> impl Strategy<Value = RatPoly> {
    let term = (
        proptest::collection::vec(0..=max_deg, nvars),
        -9i64..=9,
        1i64..=6,
    );
    proptest::collection::vec(term, 1..=max_terms).prop_map(move |terms| {
        let mut p = RatPoly::zero(nvars);
        for (exps, num, den) in terms {
            let total: u32 = exps.iter().sum();
            if total > max_deg {
                continue;
            }
            p.add_term(Monomial::new(exps), rat(num, den));
        }
        p
    })
}

/// Strategy: homogeneous rational polynomial of exact degree `deg`.
fn homogeneous_poly(nvars: usize, deg: u32) -> impl Strategy<Value = RatPoly> {
    let monos = monomials_of_degree(nvars, deg);
    let k = monos.len();
    proptest::collection::vec((-9i64..=9, 1i64..=6), k).prop_map(move |coeffs| {
        let mut p = RatPoly::zero(nvars);
        for (mono, (num, den)) in monos.iter().zip(coeffs) {
            p.add_term(mono.clone(), rat(num, den));
        }
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_laws_hold_exactly(
        a in rat_poly(3, 4, 5),
        b in rat_poly(3, 4, 5),
        c in rat_poly(3, 4, 5),
    ) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a - &a) * &b, RatPoly::zero(3));
    }

    #[test]
    fn laplacian_is_linear(
        a in rat_poly(3, 5, 6),
        b in rat_poly(3, 5, 6),
    ) {
        let sum = &a + &b;
        prop_assert_eq!(sum.laplacian(), &a.laplacian() + &b.laplacian());
    }

    #[test]
    fn fischer_adjointness(
        f in homogeneous_poly(3, 4),
        g in homogeneous_poly(3, 2),
    ) {
        // ⟨Δf, g⟩ = ⟨f, |z|²·g⟩, exactly in rational arithmetic.
        let lhs = fischer_inner(&f.laplacian(), &g).unwrap();
        let rhs = fischer_inner(&f, &(&radius_squared::<BigRational>(3) * &g)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn fischer_adjointness_higher_degree(
        f in homogeneous_poly(2, 6),
        g in homogeneous_poly(2, 4),
    ) {
        let lhs = fischer_inner(&f.laplacian(), &g).unwrap();
        let rhs = fischer_inner(&f, &(&radius_squared::<BigRational>(2) * &g)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn reproducing_kernel_exact_rational(
        f in homogeneous_poly(3, 3),
        xi in proptest::collection::vec((-5i64..=5, 1i64..=4), 3),
    ) {
        // Real rational ξ: (1/m!)⟨f, (z·ξ)^m⟩ = f(ξ), exactly.
        let m = 3u32;
        let xi_rat: Vec<BigRational> = xi.iter().map(|(n, d)| rat(*n, *d)).collect();
        let mut form = RatPoly::zero(3);
        for (j, c) in xi_rat.iter().enumerate() {
            form.add_term(Monomial::var(3, j), c.clone());
        }
        let kernel = form.pow(m);
        let inner = fischer_inner(&f, &kernel).unwrap();
        let mfact = multi_factorial(&[m]);
        prop_assert_eq!(inner / mfact, f.eval(&xi_rat).unwrap());
    }

    #[test]
    fn reproducing_kernel_complex_float(
        f in homogeneous_poly(3, 4),
        re in proptest::collection::vec(-2.0f64..2.0, 3),
        im in proptest::collection::vec(-2.0f64..2.0, 3),
    ) {
        let m = 4u32;
        let xi: Vec<Complex64> = re
            .iter()
            .zip(&im)
            .map(|(r, i)| Complex64::new(*r, *i))
            .collect();
        let fc = f.to_complex();
        let kernel = dot_power(&xi, m);
        let inner = fischer_inner(&fc, &kernel).unwrap();
        let mfact = multi_factorial(&[m]).to_f64().unwrap();
        let direct = fc.eval(&xi).unwrap();
        let scale = direct.norm().max(1.0);
        prop_assert!((inner / mfact - direct).norm() <= 1e-12 * scale);
    }

    #[test]
    fn isotropic_dot_powers_are_harmonic(
        u in proptest::collection::vec(-2.0f64..2.0, 3),
        angle in 0.0f64..std::f64::consts::PI,
        m in 1u32..6,
    ) {
        // ξ = u' + i v with |u'| = |v|, u'·v = 0 lies on the isotropic cone.
        let norm = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
        prop_assume!(norm > 0.1);
        // Build v ⊥ u of equal length from any transversal direction.
        let pick = if u[0].abs() < 0.9 * norm { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let mut v = [
            u[1] * pick[2] - u[2] * pick[1],
            u[2] * pick[0] - u[0] * pick[2],
            u[0] * pick[1] - u[1] * pick[0],
        ];
        let vnorm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        for c in v.iter_mut() {
            *c *= norm / vnorm;
        }
        // Rotate v around u to sample the cone more widely.
        let w = [
            (u[1] * v[2] - u[2] * v[1]) / norm,
            (u[2] * v[0] - u[0] * v[2]) / norm,
            (u[0] * v[1] - u[1] * v[0]) / norm,
        ];
        let (s, c) = angle.sin_cos();
        let v_rot = [
            c * v[0] + s * w[0],
            c * v[1] + s * w[1],
            c * v[2] + s * w[2],
        ];
        let xi: Vec<Complex64> = (0..3).map(|j| Complex64::new(u[j], v_rot[j])).collect();
        let iso: Complex64 = xi.iter().map(|z| z * z).sum();
        prop_assume!(iso.norm() < 1e-10 * norm * norm);
        let p = dot_power(&xi, m);
        let lap = p.laplacian();
        let scale: f64 = p.terms().map(|(_, c)| c.norm()).fold(1.0, f64::max);
        let worst = lap.terms().map(|(_, c)| c.norm()).fold(0.0, f64::max);
        prop_assert!(worst <= 1e-12 * scale * (m * m) as f64, "residual {}", worst);
    }

    #[test]
    fn confocal_composition(
        l1 in -0.8f64..4.0,
        l2 in -0.1f64..4.0,
    ) {
        let e = Ellipsoid::from_semiaxes(&[3.0, 2.0, 1.0]).unwrap();
        let a = e.confocal(l1).unwrap().confocal(l2).unwrap();
        let b = e.confocal(l1 + l2);
        // l1 + l2 in floating arithmetic may differ from the exact sum by
        // rounding; compare against the exact composition instead.
        let exact = {
            let s1 = BigRational::from_float(l1).unwrap();
            let s2 = BigRational::from_float(l2).unwrap();
            e.confocal_exact(&(s1 + s2)).unwrap()
        };
        prop_assert_eq!(a.semiaxes_sq(), exact.semiaxes_sq());
        if let Ok(b) = b {
            for (x, y) in a.semiaxes().iter().zip(b.semiaxes()) {
                prop_assert!((x - y).abs() <= 1e-12 * x.abs());
            }
        }
    }

    #[test]
    fn elliptic_lambda_membership(
        dir in proptest::collection::vec(-1.0f64..1.0, 3),
        stretch in 1.01f64..6.0,
    ) {
        let e = Ellipsoid::from_semiaxes(&[3.0, 2.0, 1.0]).unwrap();
        let norm: f64 = dir.iter().map(|d| d * d).sum::<f64>().sqrt();
        prop_assume!(norm > 0.1);
        let x: Vec<f64> = e.surface_point(&dir).iter().map(|v| v * stretch).collect();
        let lambda = e.elliptic_lambda(&x).unwrap();
        let member: f64 = x
            .iter()
            .zip(e.semiaxes())
            .map(|(xi, a)| xi * xi / (a * a + lambda))
            .sum();
        prop_assert!((member - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn dirichlet_solution_invariants(
        p in rat_poly(3, 6, 6),
        axes_idx in 0usize..3,
    ) {
        let axes: [&[f64]; 3] = [&[3.0, 2.0, 1.0], &[2.0, 2.0, 1.0], &[1.5, 1.0, 0.5]];
        let e = Ellipsoid::from_semiaxes(axes[axes_idx]).unwrap();
        let s = solve_dirichlet(&e, &p);
        prop_assert!(s.u.laplacian().is_zero());
        prop_assert_eq!(&s.data - &s.u, &s.q * &s.r);
        let deg_ok = match (s.u.degree(), p.degree()) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(a), Some(b)) => a <= b,
        };
        prop_assert!(deg_ok);
    }
}

#[test]
fn fischer_degree_mismatch_is_rejected() {
    let f = parse_rational("x1^2", Some(2)).unwrap();
    let g = parse_rational("x1", Some(2)).unwrap();
    assert!(fischer_inner(&f, &g).is_err());
}

#[test]
fn zero_polynomial_degree_is_none() {
    let z = MultiPoly::<BigRational>::zero(3);
    assert_eq!(z.degree(), None);
    let p = parse_rational("x1 - x1", Some(3)).unwrap();
    assert_eq!(p.degree(), None);
    assert!(p.is_zero());
}
