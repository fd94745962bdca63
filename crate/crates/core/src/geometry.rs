//! Ellipsoids, confocal families, the focal ellipsoid, and elliptic
//! coordinates.
//!
//! Squared semiaxes are the primary data and are kept as exact rationals
//! (every f64 is a dyadic rational, so the conversion is lossless). Confocal
//! shifts then stay exact, which is what keeps the moment machinery exact.

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poly::{Monomial, RatPoly};

/// Axis-aligned, centered ellipsoid { x : Σ x_j²/a_j² ≤ 1 } with
/// a_1 ≥ a_2 ≥ ... ≥ a_N > 0.
#[derive(Clone, Debug, PartialEq)]
pub struct Ellipsoid {
    /// Exact squared semiaxes, sorted non-increasing.
    semiaxes_sq: Vec<BigRational>,
    /// Floating-point semiaxes derived from the squares.
    semiaxes: Vec<f64>,
    /// True iff a_1 > a_2 > ... > a_N under exact comparison.
    strict: bool,
}

/// A validated confocal parameter λ > −a_N² for a specific base ellipsoid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConfocalParam(f64);

impl ConfocalParam {
    pub fn new(base: &Ellipsoid, lambda: f64) -> Result<Self> {
        base.check_lambda(lambda)?;
        Ok(ConfocalParam(lambda))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// The focal ellipsoid E: the degenerate confocal limit λ → −a_N², an
/// (N−1)-dimensional ellipsoid in the hyperplane x_N = 0.
#[derive(Clone, Debug, PartialEq)]
pub struct FocalEllipsoid {
    /// Exact squares a_j² − a_N² for j < N.
    semiaxes_sq: Vec<BigRational>,
    semiaxes: Vec<f64>,
    /// Dimension N of the ambient space.
    ambient_dim: usize,
}

impl FocalEllipsoid {
    /// Semiaxes (√(a_1²−a_N²), ..., √(a_{N−1}²−a_N²)).
    pub fn semiaxes(&self) -> &[f64] {
        &self.semiaxes
    }

    pub fn semiaxes_sq(&self) -> &[BigRational] {
        &self.semiaxes_sq
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Distance from a point (in the ambient space) to the focal set,
    /// adequate for exclusion-zone tests near E.
    pub fn distance_estimate(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.ambient_dim);
        let height = x[self.ambient_dim - 1].abs();
        let s: f64 = x
            .iter()
            .take(self.ambient_dim - 1)
            .zip(&self.semiaxes)
            .map(|(xi, c)| (xi / c).powi(2))
            .sum();
        if s <= 1.0 {
            height
        } else {
            // Crude but safe: distance within the plane to the boundary of E
            // along the ray, combined with the height.
            let t = s.sqrt();
            let planar: f64 = x
                .iter()
                .take(self.ambient_dim - 1)
                .map(|xi| (xi * (1.0 - 1.0 / t)).powi(2))
                .sum::<f64>()
                .sqrt();
            (height * height + planar * planar).sqrt()
        }
    }
}

fn exact_from_f64(x: f64, what: &str) -> Result<BigRational> {
    BigRational::from_float(x)
        .ok_or_else(|| Error::InvalidSemiaxes(format!("{} is not finite: {}", what, x)))
}

impl Ellipsoid {
    /// Builds from floating semiaxes (each converted exactly, then squared
    /// exactly). Sorts into non-increasing order.
    pub fn from_semiaxes(semiaxes: &[f64]) -> Result<Self> {
        if semiaxes.is_empty() {
            return Err(Error::InvalidSemiaxes("need at least one axis".into()));
        }
        let mut sq = Vec::with_capacity(semiaxes.len());
        for &a in semiaxes {
            if a.is_nan() || a <= 0.0 || a.is_infinite() {
                return Err(Error::InvalidSemiaxes(format!(
                    "semiaxes must be positive and finite, got {}",
                    a
                )));
            }
            let r = exact_from_f64(a, "semiaxis")?;
            sq.push(&r * &r);
        }
        Self::from_semiaxes_sq(sq)
    }

    /// Builds from exact squared semiaxes.
    pub fn from_semiaxes_sq(mut semiaxes_sq: Vec<BigRational>) -> Result<Self> {
        if semiaxes_sq.is_empty() {
            return Err(Error::InvalidSemiaxes("need at least one axis".into()));
        }
        if semiaxes_sq.iter().any(|s| !s.is_positive()) {
            return Err(Error::InvalidSemiaxes(
                "squared semiaxes must be positive".into(),
            ));
        }
        semiaxes_sq.sort_by(|a, b| b.cmp(a));
        let strict = semiaxes_sq.windows(2).all(|w| w[0] > w[1]);
        let semiaxes = semiaxes_sq
            .iter()
            .map(|s| s.to_f64().unwrap().sqrt())
            .collect();
        Ok(Ellipsoid {
            semiaxes_sq,
            semiaxes,
            strict,
        })
    }

    pub fn dim(&self) -> usize {
        self.semiaxes.len()
    }

    pub fn semiaxes(&self) -> &[f64] {
        &self.semiaxes
    }

    pub fn semiaxes_sq(&self) -> &[BigRational] {
        &self.semiaxes_sq
    }

    /// True iff the semiaxes are strictly decreasing (exact comparison).
    pub fn is_strict(&self) -> bool {
        self.strict
    }

    /// The defining quadratic q(x) = Σ x_j²/a_j² − 1 with exact
    /// coefficients; q < 0 inside, q = 0 on the boundary.
    pub fn defining_quadratic(&self) -> RatPoly {
        let n = self.dim();
        let mut q = RatPoly::zero(n);
        for (j, s) in self.semiaxes_sq.iter().enumerate() {
            let mut exps = vec![0u32; n];
            exps[j] = 2;
            q.add_term(Monomial::new(exps), s.recip());
        }
        q.add_term(Monomial::one(n), -BigRational::from_integer(1.into()));
        q
    }

    /// q(x) evaluated in f64.
    pub fn q_at(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim());
        x.iter()
            .zip(&self.semiaxes)
            .map(|(xi, a)| (xi / a).powi(2))
            .sum::<f64>()
            - 1.0
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.q_at(x) <= 0.0
    }

    fn check_lambda(&self, lambda: f64) -> Result<BigRational> {
        let min_sq = self.semiaxes_sq.last().unwrap();
        let l = exact_from_f64(lambda, "lambda").map_err(|_| Error::LambdaOutOfRange {
            lambda,
            min: -min_sq.to_f64().unwrap(),
        })?;
        if &l + min_sq <= BigRational::zero() {
            return Err(Error::LambdaOutOfRange {
                lambda,
                min: -min_sq.to_f64().unwrap(),
            });
        }
        Ok(l)
    }

    /// Member Γ_λ of the confocal family: semiaxes √(a_j²+λ). The shift is
    /// applied to the exact squares, so confocality composes exactly.
    pub fn confocal(&self, lambda: f64) -> Result<Ellipsoid> {
        let l = self.check_lambda(lambda)?;
        self.confocal_exact(&l)
    }

    pub fn confocal_exact(&self, lambda: &BigRational) -> Result<Ellipsoid> {
        let min_sq = self.semiaxes_sq.last().unwrap();
        if lambda + min_sq <= BigRational::zero() {
            return Err(Error::LambdaOutOfRange {
                lambda: lambda.to_f64().unwrap_or(f64::NEG_INFINITY),
                min: -min_sq.to_f64().unwrap(),
            });
        }
        let sq = self.semiaxes_sq.iter().map(|s| s + lambda).collect();
        Ellipsoid::from_semiaxes_sq(sq)
    }

    /// Homothetic image t·Ω.
    pub fn scaled(&self, t: f64) -> Result<Ellipsoid> {
        if t.is_nan() || t <= 0.0 {
            return Err(Error::InvalidSemiaxes(format!(
                "scale factor must be positive, got {}",
                t
            )));
        }
        let tt = exact_from_f64(t, "scale")?;
        let t2 = &tt * &tt;
        Ellipsoid::from_semiaxes_sq(self.semiaxes_sq.iter().map(|s| s * &t2).collect())
    }

    /// The unique λ ≥ 0 with Σ x_j²/(a_j²+λ) = 1 for a point on or outside
    /// the ellipsoid, by bracketing plus safeguarded Newton iterations.
    pub fn elliptic_lambda(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::ArityMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let q = self.q_at(x);
        if q < -1e-13 {
            return Err(Error::PointInside);
        }
        if q <= 0.0 {
            return Ok(0.0);
        }
        let sq: Vec<f64> = self.semiaxes.iter().map(|a| a * a).collect();
        let s: f64 = x.iter().map(|xi| xi * xi).sum();
        // f is strictly decreasing on the bracket; f(lo) ≥ 0 ≥ f(hi).
        let f = |l: f64| -> f64 {
            x.iter()
                .zip(&sq)
                .map(|(xi, s)| xi * xi / (s + l))
                .sum::<f64>()
                - 1.0
        };
        let fp = |l: f64| -> f64 {
            -x.iter()
                .zip(&sq)
                .map(|(xi, s)| xi * xi / (s + l).powi(2))
                .sum::<f64>()
        };
        let mut lo = (s - sq[0]).max(0.0);
        let mut hi = s;
        let mut l = 0.5 * (lo + hi);
        for _ in 0..200 {
            let fl = f(l);
            if fl > 0.0 {
                lo = l;
            } else {
                hi = l;
            }
            let step = fl / fp(l);
            let mut next = l - step;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - l).abs() <= 1e-14 * (1.0 + l.abs()) {
                return Ok(next);
            }
            l = next;
        }
        Err(Error::RootFindFailed(format!(
            "elliptic coordinate for point {:?}",
            x
        )))
    }

    /// The focal ellipsoid E with semiaxes √(a_j²−a_N²), j < N. Requires
    /// a_{N−1} > a_N.
    pub fn focal_ellipsoid(&self) -> Result<FocalEllipsoid> {
        let n = self.dim();
        if n < 2 {
            return Err(Error::DegenerateFocal);
        }
        let min_sq = self.semiaxes_sq.last().unwrap().clone();
        if self.semiaxes_sq[n - 2] == min_sq {
            return Err(Error::DegenerateFocal);
        }
        let sq: Vec<BigRational> = self.semiaxes_sq[..n - 1]
            .iter()
            .map(|s| s - &min_sq)
            .collect();
        let semiaxes = sq.iter().map(|s| s.to_f64().unwrap().sqrt()).collect();
        Ok(FocalEllipsoid {
            semiaxes_sq: sq,
            semiaxes,
            ambient_dim: n,
        })
    }

    /// Vol(Ω) = Vol(B_N) · Π a_j.
    pub fn volume(&self) -> f64 {
        unit_ball_volume(self.dim()) * self.semiaxes.iter().product::<f64>()
    }

    /// The boundary point t·ω along direction ω (need not be normalized).
    pub fn surface_point(&self, dir: &[f64]) -> Vec<f64> {
        assert_eq!(dir.len(), self.dim());
        let s: f64 = dir
            .iter()
            .zip(&self.semiaxes)
            .map(|(d, a)| (d / a).powi(2))
            .sum();
        let t = 1.0 / s.sqrt();
        dir.iter().map(|d| d * t).collect()
    }
}

/// Volume of the unit ball in dimension n.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(n - 2) * 2.0 * std::f64::consts::PI / n as f64,
    }
}

/// Surface measure of the unit sphere S^{N−1} in R^N.
pub fn unit_sphere_area(n: usize) -> f64 {
    // Vol(S^{N-1}) = N · Vol(B_N)
    n as f64 * unit_ball_volume(n)
}
