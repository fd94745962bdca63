//! Exact polynomial solution of the Dirichlet problem on an ellipsoid.
//!
//! For polynomial data p of degree m the solution is u = p − q·r where
//! q is the defining quadratic and r solves T r = Δp with T(r) = Δ(q·r)
//! on P_{m−2}. T is injective (maximum principle: Δ(qr) = 0 forces the
//! harmonic polynomial qr to vanish with its boundary values), hence
//! invertible on the finite-dimensional space, and everything is carried
//! out in exact rational arithmetic.
//!
//! In the graded monomial basis T splits as D + L with D(r) = Δ(q₂·r)
//! degree-preserving (q₂ the homogeneous part of q) and L(r) = −Δr two
//! degrees lower, so the system is solved top degree first. D itself
//! preserves the componentwise exponent parity, which breaks each degree
//! into small independent blocks.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_rational::BigRational;
use num_traits::Zero;

use crate::geometry::Ellipsoid;
use crate::linalg;
use crate::poly::{Monomial, RatPoly};
use crate::report::{Sample, VerificationReport};

/// All exponent vectors of total degree `k` in `nvars` variables,
/// graded-lex sorted.
pub fn monomials_of_degree(nvars: usize, k: u32) -> Vec<Monomial> {
    fn rec(nvars: usize, k: u32, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if prefix.len() == nvars - 1 {
            prefix.push(k);
            out.push(Monomial::new(prefix.clone()));
            prefix.pop();
            return;
        }
        for e in 0..=k {
            prefix.push(e);
            rec(nvars, k - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(nvars, k, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Graded-lex basis of P_{n,d} (all monomials of degree ≤ d).
pub fn monomials_up_to_degree(nvars: usize, d: u32) -> Vec<Monomial> {
    (0..=d)
        .flat_map(|k| monomials_of_degree(nvars, k))
        .collect()
}

/// One parity block of the degree-preserving operator D(r) = Δ(q₂·r).
struct Block {
    monos: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    /// Column j holds D(monos[j]) expanded over `monos`.
    mat: Vec<Vec<BigRational>>,
}

impl Block {
    fn build(monos: Vec<Monomial>, q2: &RatPoly) -> Block {
        let dim = monos.len();
        let index: HashMap<Monomial, usize> = monos.iter().cloned().zip(0..).collect();
        let mut mat = vec![vec![BigRational::zero(); dim]; dim];
        for (j, mono) in monos.iter().enumerate() {
            let col = (q2 * &RatPoly::from_mono(mono.clone())).laplacian();
            for (m, c) in col.terms() {
                let i = *index
                    .get(m)
                    .expect("Δ(q₂·x^β) stays in the degree/parity block");
                mat[i][j] = c.clone();
            }
        }
        Block { monos, index, mat }
    }

    fn solve(&self, rhs: &RatPoly, out: &mut RatPoly) -> bool {
        let mut v = vec![BigRational::zero(); self.monos.len()];
        let mut any = false;
        for (m, c) in rhs.terms() {
            if let Some(&i) = self.index.get(m) {
                v[i] = c.clone();
                any = true;
            }
        }
        if !any {
            return true;
        }
        match linalg::solve_exact(&self.mat, &v) {
            Some(w) => {
                for (mono, c) in self.monos.iter().zip(w) {
                    out.add_term(mono.clone(), c);
                }
                true
            }
            None => false,
        }
    }

    fn det(&self) -> BigRational {
        linalg::det_exact(&self.mat)
    }
}

/// The operator T(r) = Δ(q·r) on P_{m−2} for one ellipsoid and degree.
pub struct FischerSystem {
    nvars: usize,
    degree: u32,
    basis: Vec<Monomial>,
    q: RatPoly,
    /// Blocks of D grouped by (total degree, exponent parity).
    blocks: Vec<Block>,
}

impl FischerSystem {
    /// Assembles the system for data of degree `m` (requires m ≥ 2).
    pub fn build(e: &Ellipsoid, m: u32) -> FischerSystem {
        assert!(m >= 2, "Fischer systems exist for degree ≥ 2");
        let nvars = e.dim();
        let m2 = m - 2;
        let q = e.defining_quadratic();
        let q2 = q.homogeneous_part(2);
        let basis = monomials_up_to_degree(nvars, m2);
        let mut blocks = Vec::new();
        for k in 0..=m2 {
            let mut groups: Vec<(Vec<u8>, Vec<Monomial>)> = Vec::new();
            for mono in monomials_of_degree(nvars, k) {
                let p = mono.parity();
                match groups.iter_mut().find(|(g, _)| *g == p) {
                    Some((_, v)) => v.push(mono),
                    None => groups.push((p, vec![mono])),
                }
            }
            for (_, monos) in groups {
                blocks.push(Block::build(monos, &q2));
            }
        }
        FischerSystem {
            nvars,
            degree: m,
            basis,
            q,
            blocks,
        }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Graded-lex monomial basis of P_{m−2}.
    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    /// Dense matrix of T in the graded-lex basis (column j holds `T(basis[j])`).
    /// Intended for inspection and small-degree tests; solves use the
    /// degree/parity block decomposition instead.
    pub fn matrix(&self) -> Vec<Vec<BigRational>> {
        let dim = self.basis.len();
        let index: HashMap<&Monomial, usize> = self.basis.iter().zip(0..).collect();
        let mut mat = vec![vec![BigRational::zero(); dim]; dim];
        for (j, mono) in self.basis.iter().enumerate() {
            let col = (&self.q * &RatPoly::from_mono(mono.clone())).laplacian();
            for (m, c) in col.terms() {
                mat[*index.get(m).expect("T maps P_{m-2} into itself")][j] = c.clone();
            }
        }
        mat
    }

    /// Product of the parity-block determinants. Equals det(T) up to sign,
    /// so it is the injectivity certificate: nonzero iff T is invertible.
    pub fn det_certificate(&self) -> BigRational {
        let mut acc = BigRational::from_integer(1.into());
        for b in &self.blocks {
            acc *= b.det();
        }
        acc
    }

    /// Solves T r = rhs for rhs ∈ P_{m−2}, top degree first.
    pub fn solve(&self, rhs: &RatPoly) -> RatPoly {
        assert_eq!(rhs.nvars(), self.nvars);
        let m2 = self.degree - 2;
        debug_assert!(rhs.degree().unwrap_or(0) <= m2);
        let mut r = RatPoly::zero(self.nvars);
        for k in (0..=m2).rev() {
            // D_k(r_k) = rhs_k + Δ(r_{k+2})
            let mut c = rhs.homogeneous_part(k);
            let upper = r.homogeneous_part(k + 2).laplacian();
            c = &c + &upper;
            if c.is_zero() {
                continue;
            }
            for block in self.blocks.iter().filter(|b| b.monos[0].degree() == k) {
                let ok = block.solve(&c, &mut r);
                assert!(ok, "Fischer block is invertible by the maximum principle");
            }
        }
        r
    }
}

/// Solution certificate: u harmonic, u = data − q·r, deg u ≤ deg data.
#[derive(Clone, Debug)]
pub struct HarmonicSolution {
    pub u: RatPoly,
    pub r: RatPoly,
    pub data: RatPoly,
    pub q: RatPoly,
}

impl HarmonicSolution {
    pub fn verify(&self) -> VerificationReport {
        verify_solution(self)
    }
}

/// Solves the Dirichlet problem on the ellipsoid with polynomial data.
/// Total for polynomial data; data of degree ≤ 1 is already harmonic.
pub fn solve_dirichlet(e: &Ellipsoid, p: &RatPoly) -> HarmonicSolution {
    let q = e.defining_quadratic();
    let m = p.degree().unwrap_or(0);
    if m <= 1 {
        return HarmonicSolution {
            u: p.clone(),
            r: RatPoly::zero(p.nvars()),
            data: p.clone(),
            q,
        };
    }
    let sys = FischerSystem::build(e, m);
    solve_with_system(&sys, p)
}

fn solve_with_system(sys: &FischerSystem, p: &RatPoly) -> HarmonicSolution {
    let q = sys.q.clone();
    let m = p.degree().unwrap_or(0);
    if m <= 1 {
        return HarmonicSolution {
            u: p.clone(),
            r: RatPoly::zero(p.nvars()),
            data: p.clone(),
            q,
        };
    }
    let r = sys.solve(&p.laplacian());
    let u = p - &(&q * &r);
    debug_assert!(u.laplacian().is_zero());
    HarmonicSolution {
        u,
        r,
        data: p.clone(),
        q,
    }
}

/// Recomputes the polynomial identities behind a solution exactly and
/// reports pass/fail per identity (no numerical residuals in exact mode).
pub fn verify_solution(s: &HarmonicSolution) -> VerificationReport {
    let lap = s.u.laplacian();
    let harmonic = lap.is_zero();
    let witness = if harmonic {
        String::new()
    } else {
        let (m, c) = lap.terms().next().unwrap();
        format!(" (witness term {}·x^{:?})", c, m.exps())
    };
    let divisible = (&s.data - &s.u) == (&s.q * &s.r);
    let deg_ok = match (s.u.degree(), s.data.degree()) {
        (None, _) => true,
        (Some(_), None) => false,
        (Some(du), Some(dp)) => du <= dp,
    };
    let samples = vec![
        Sample::exact(format!("laplacian(u) == 0{}", witness), harmonic),
        Sample::exact("data - u == q*r", divisible),
        Sample::exact("deg u <= deg data", deg_ok),
    ];
    VerificationReport::new(
        "dirichlet_solution",
        serde_json::json!({
            "data": s.data.to_string(),
            "degree": s.data.degree(),
        }),
        samples,
        crate::tolerances::EXACT,
    )
}

/// Dirichlet solver with an optional memoized system cache keyed by
/// (squared semiaxes, degree). Safe for concurrent use.
#[derive(Default)]
pub struct DirichletSolver {
    cache: Mutex<HashMap<(Vec<BigRational>, u32), Arc<FischerSystem>>>,
}

impl DirichletSolver {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn solve(&self, e: &Ellipsoid, p: &RatPoly) -> HarmonicSolution {
        let m = p.degree().unwrap_or(0);
        if m <= 1 {
            return solve_dirichlet(e, p);
        }
        let key = (e.semiaxes_sq().to_vec(), m);
        let sys = {
            let mut cache = self.cache.lock().unwrap();
            cache
                .entry(key)
                .or_insert_with(|| Arc::new(FischerSystem::build(e, m)))
                .clone()
        };
        solve_with_system(&sys, p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_rational;
    use num_bigint::BigInt;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn ball(n: usize) -> Ellipsoid {
        Ellipsoid::from_semiaxes(&vec![1.0; n]).unwrap()
    }

    #[test]
    fn fischer_system_unit_ball_m2() {
        // T on P_0 for the unit ball: Δ((|x|²−1)c) = 2n·c.
        for n in [2usize, 3, 4, 5] {
            let sys = FischerSystem::build(&ball(n), 2);
            let m = sys.matrix();
            assert_eq!(m.len(), 1);
            assert_eq!(m[0][0], rat(2 * n as i64, 1));
        }
    }

    #[test]
    fn fischer_system_ellipse_m2() {
        // (a₁,a₂) → [2(1/a₁² + 1/a₂²)]
        let e = Ellipsoid::from_semiaxes(&[2.0, 1.0]).unwrap();
        let sys = FischerSystem::build(&e, 2);
        let m = sys.matrix();
        assert_eq!(m[0][0], rat(2, 4) + rat(2, 1));
    }

    #[test]
    fn fischer_system_m3_is_3x3_invertible() {
        let e = Ellipsoid::from_semiaxes(&[3.0, 2.0]).unwrap();
        let sys = FischerSystem::build(&e, 3);
        let m = sys.matrix();
        assert_eq!(m.len(), 3);
        assert!(!linalg::det_exact(&m).is_zero());
        assert!(!sys.det_certificate().is_zero());
    }

    #[test]
    fn full_matrix_det_matches_certificate_up_to_sign() {
        let e = Ellipsoid::from_semiaxes(&[3.0, 2.0, 1.0]).unwrap();
        for m in [2u32, 3, 4, 5] {
            let sys = FischerSystem::build(&e, m);
            let full = linalg::det_exact(&sys.matrix());
            let cert = sys.det_certificate();
            assert!(full == cert || full == -cert.clone());
        }
    }

    #[test]
    fn ball_x1_squared() {
        // p = x₁² on the unit ball in R³: u = x₁² − (|x|²−1)/3.
        let e = ball(3);
        let p = parse_rational("x1^2", Some(3)).unwrap();
        let s = solve_dirichlet(&e, &p);
        let expected =
            parse_rational("x1^2 - 1/3*x1^2 - 1/3*x2^2 - 1/3*x3^2 + 1/3", Some(3)).unwrap();
        assert_eq!(s.u, expected);
        assert_eq!(s.r, RatPoly::constant(3, rat(1, 3)));
        assert!(s.verify().pass);
    }

    #[test]
    fn harmonic_data_is_fixed() {
        let e = Ellipsoid::from_semiaxes(&[3.0, 2.0, 1.0]).unwrap();
        let p = parse_rational("x1^2 - x2^2", Some(3)).unwrap();
        // x1² − x2² is harmonic, but the ellipsoid solver must discover that.
        let s = solve_dirichlet(&e, &p);
        assert_eq!(s.u, p);
        assert!(s.r.is_zero());
    }

    #[test]
    fn general_ellipsoid_x1_squared() {
        // u = x₁² − q/(Σ 1/a_j²)
        let e = Ellipsoid::from_semiaxes(&[3.0, 2.0, 1.0]).unwrap();
        let p = parse_rational("x1^2", Some(3)).unwrap();
        let s = solve_dirichlet(&e, &p);
        let inv_sum = rat(1, 9) + rat(1, 4) + rat(1, 1);
        assert_eq!(s.r, RatPoly::constant(3, inv_sum.recip()));
        assert!(s.u.laplacian().is_zero());
        assert_eq!(&s.data - &s.u, &s.q * &s.r);
    }

    #[test]
    fn degenerate_low_degree_data() {
        let e = ball(3);
        let p = parse_rational("2*x1 - 3", Some(3)).unwrap();
        let s = solve_dirichlet(&e, &p);
        assert_eq!(s.u, p);
        let z = RatPoly::zero(3);
        let s0 = solve_dirichlet(&e, &z);
        assert!(s0.u.is_zero());
        assert!(s0.verify().pass);
    }

    #[test]
    fn degree_never_grows() {
        let e = Ellipsoid::from_semiaxes(&[2.0, 1.0]).unwrap();
        for src in ["x1^4", "x1^3*x2 + x2^2", "x1^2*x2^2 - x1*x2 + 1"] {
            let p = parse_rational(src, Some(2)).unwrap();
            let s = solve_dirichlet(&e, &p);
            assert!(s.u.degree().unwrap_or(0) <= p.degree().unwrap());
            assert!(s.u.laplacian().is_zero());
            assert_eq!(&s.data - &s.u, &s.q * &s.r);
        }
    }

    #[test]
    fn strict_degree_drop_when_top_cancels() {
        // Data q·x1 + x2 restricts to x2 on the boundary: the solution is
        // x2 and the degree drops from 3 to 1 (the top homogeneous part of
        // the data is exactly q2 times the top of the cofactor).
        let e = Ellipsoid::from_semiaxes(&[3.0, 2.0, 1.0]).unwrap();
        let q = e.defining_quadratic();
        let x1 = parse_rational("x1", Some(3)).unwrap();
        let x2 = parse_rational("x2", Some(3)).unwrap();
        let data = &(&q * &x1) + &x2;
        assert_eq!(data.degree(), Some(3));
        let s = solve_dirichlet(&e, &data);
        assert_eq!(s.u, x2);
        assert_eq!(s.u.degree(), Some(1));
        assert_eq!(s.r, x1);
    }

    #[test]
    fn repeated_axes_supported() {
        let e = Ellipsoid::from_semiaxes(&[2.0, 2.0, 1.0]).unwrap();
        let p = parse_rational("x1^4 - x3^2*x2^2", Some(3)).unwrap();
        let s = solve_dirichlet(&e, &p);
        assert!(s.u.laplacian().is_zero());
        assert!(s.verify().pass);
    }

    #[test]
    fn linearity() {
        let e = Ellipsoid::from_semiaxes(&[3.0, 2.0, 1.0]).unwrap();
        let p1 = parse_rational("x1^3*x2", Some(3)).unwrap();
        let p2 = parse_rational("x2^2*x3^2 - x1", Some(3)).unwrap();
        let a = rat(3, 2);
        let b = rat(-5, 7);
        let combo = &p1.scale(&a) + &p2.scale(&b);
        let s_combo = solve_dirichlet(&e, &combo);
        let s1 = solve_dirichlet(&e, &p1);
        let s2 = solve_dirichlet(&e, &p2);
        assert_eq!(s_combo.u, &s1.u.scale(&a) + &s2.u.scale(&b));
    }

    #[test]
    fn corrupted_solution_fails_verification() {
        let e = ball(3);
        let p = parse_rational("x1^2*x2", Some(3)).unwrap();
        let mut s = solve_dirichlet(&e, &p);
        assert!(s.verify().pass);
        s.u = &s.u + &parse_rational("x1^2", Some(3)).unwrap();
        let rep = s.verify();
        assert!(!rep.pass);
        assert!(rep.samples[0].rel_err > 0.0);
    }

    #[test]
    fn cached_solver_agrees() {
        let e = Ellipsoid::from_semiaxes(&[3.0, 2.0, 1.0]).unwrap();
        let solver = DirichletSolver::new();
        let p = parse_rational("x1^4*x2^2 - x3^6 + x1*x2*x3", Some(3)).unwrap();
        let s1 = solver.solve(&e, &p);
        let s2 = solve_dirichlet(&e, &p);
        assert_eq!(s1.u, s2.u);
        // Second call hits the cache.
        let s3 = solver.solve(&e, &p);
        assert_eq!(s1.u, s3.u);
    }

    #[test]
    fn concurrent_cached_solves() {
        let solver = Arc::new(DirichletSolver::new());
        let e = Ellipsoid::from_semiaxes(&[3.0, 2.0, 1.0]).unwrap();
        let handles: Vec<_> = (0..4)
            .map(|i| {
                let solver = Arc::clone(&solver);
                let e = e.clone();
                std::thread::spawn(move || {
                    let p = parse_rational(&format!("x1^4 + {}*x2^3*x3", i), Some(3)).unwrap();
                    solver.solve(&e, &p)
                })
            })
            .collect();
        for h in handles {
            let s = h.join().unwrap();
            assert!(s.u.laplacian().is_zero());
            assert_eq!(&s.data - &s.u, &s.q * &s.r);
        }
    }

    #[test]
    fn injectivity_certificate_for_larger_systems() {
        let e = Ellipsoid::from_semiaxes(&[4.0, 3.0, 2.0, 1.0]).unwrap();
        assert!(!FischerSystem::build(&e, 7).det_certificate().is_zero());
        let e5 = Ellipsoid::from_semiaxes(&[2.0, 2.0, 1.5, 1.0, 0.5]).unwrap();
        assert!(!FischerSystem::build(&e5, 5).det_certificate().is_zero());
    }

    #[test]
    fn basis_dimension_matches_binomial() {
        // dim P_{n,d} = C(n+d, n)
        let sys = FischerSystem::build(&ball(3), 5);
        assert_eq!(sys.basis().len(), 20); // C(6,3)
        let sys2 = FischerSystem::build(&ball(2), 4);
        assert_eq!(sys2.basis().len(), 6); // C(4,2)
    }
}
