//! Exact linear solves over the rationals via fraction-free (Bareiss)
//! Gaussian elimination on an integer-scaled copy of the system.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Scales a rational matrix/rhs pair by the lcm of all denominators,
/// returning integer copies and the scale (the solution is unchanged).
fn scale_to_integers(
    a: &[Vec<BigRational>],
    b: Option<&[BigRational]>,
) -> (Vec<Vec<BigInt>>, Option<Vec<BigInt>>, BigInt) {
    let mut l = BigInt::one();
    for row in a {
        for x in row {
            l = l.lcm(x.denom());
        }
    }
    if let Some(b) = b {
        for x in b {
            l = l.lcm(x.denom());
        }
    }
    let to_int = |x: &BigRational| -> BigInt {
        let scaled = x * BigRational::from_integer(l.clone());
        debug_assert!(scaled.is_integer());
        scaled.to_integer()
    };
    let ai = a.iter().map(|r| r.iter().map(to_int).collect()).collect();
    let bi = b.map(|b| b.iter().map(to_int).collect());
    (ai, bi, l)
}

/// Fraction-free forward elimination in place. Returns the pivot sign flip
/// count, or `None` when the matrix is singular. Right-hand-side columns
/// ride along in `m` as extra trailing columns.
fn bareiss_forward(m: &mut [Vec<BigInt>]) -> Option<u32> {
    let n = m.len();
    let mut prev = BigInt::one();
    let mut swaps = 0u32;
    for k in 0..n {
        // Largest pivot keeps the integer growth in check; index tie-break
        // keeps elimination deterministic.
        let pivot_row = (k..n)
            .filter(|&i| !m[i][k].is_zero())
            .max_by(|&i, &j| m[i][k].abs().cmp(&m[j][k].abs()).then(j.cmp(&i)))?;
        if pivot_row != k {
            m.swap(pivot_row, k);
            swaps += 1;
        }
        for i in (k + 1)..n {
            for j in (k + 1)..m[i].len() {
                let num = &m[k][k] * &m[i][j] - &m[i][k] * &m[k][j];
                let (q, r) = num.div_rem(&prev);
                debug_assert!(r.is_zero(), "Bareiss division must be exact");
                m[i][j] = q;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    Some(swaps)
}

/// Solves A x = b exactly. Returns `None` if A is singular.
pub fn solve_exact(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = a.len();
    assert_eq!(b.len(), n);
    if n == 0 {
        return Some(Vec::new());
    }
    let (ai, bi, _) = scale_to_integers(a, Some(b));
    let bi = bi.unwrap();
    let mut aug: Vec<Vec<BigInt>> = ai
        .into_iter()
        .zip(bi)
        .map(|(mut row, rhs)| {
            row.push(rhs);
            row
        })
        .collect();
    bareiss_forward(&mut aug)?;
    // Back substitution in exact rationals on the integer echelon form.
    let mut x = vec![BigRational::zero(); n];
    for i in (0..n).rev() {
        let mut acc = BigRational::from_integer(aug[i][n].clone());
        for j in (i + 1)..n {
            acc -= BigRational::from_integer(aug[i][j].clone()) * &x[j];
        }
        if aug[i][i].is_zero() {
            return None;
        }
        x[i] = acc / BigRational::from_integer(aug[i][i].clone());
    }
    Some(x)
}

/// Exact determinant of a square rational matrix.
pub fn det_exact(a: &[Vec<BigRational>]) -> BigRational {
    let n = a.len();
    if n == 0 {
        return BigRational::one();
    }
    let (mut ai, _, l) = scale_to_integers(a, None);
    let swaps = match bareiss_forward(&mut ai) {
        Some(s) => s,
        None => return BigRational::zero(),
    };
    // det(L·A) = L^n det(A); the last Bareiss pivot is det(L·A).
    let mut det = BigRational::from_integer(ai[n - 1][n - 1].clone());
    if swaps % 2 == 1 {
        det = -det;
    }
    let mut scale = BigRational::one();
    for _ in 0..n {
        scale *= BigRational::from_integer(l.clone());
    }
    det / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn solves_small_system() {
        // [1/2 1; 1 -1] x = [2; 1] → x = (2, 1)
        let a = vec![vec![r(1, 2), r(1, 1)], vec![r(1, 1), r(-1, 1)]];
        let b = vec![r(2, 1), r(1, 1)];
        let x = solve_exact(&a, &b).unwrap();
        assert_eq!(x, vec![r(2, 1), r(1, 1)]);
    }

    #[test]
    fn detects_singularity() {
        let a = vec![vec![r(1, 1), r(2, 1)], vec![r(2, 1), r(4, 1)]];
        let b = vec![r(1, 1), r(1, 1)];
        assert!(solve_exact(&a, &b).is_none());
        assert_eq!(det_exact(&a), r(0, 1));
    }

    #[test]
    fn determinant_with_fractions() {
        // det [1/3 0; 0 3/4] = 1/4
        let a = vec![vec![r(1, 3), r(0, 1)], vec![r(0, 1), r(3, 4)]];
        assert_eq!(det_exact(&a), r(1, 4));
        // det of a permutation needs the sign
        let p = vec![vec![r(0, 1), r(1, 1)], vec![r(1, 1), r(0, 1)]];
        assert_eq!(det_exact(&p), r(-1, 1));
    }

    #[test]
    fn random_solve_verifies() {
        // Fixed pseudo-random 5×5 system; checked by substitution.
        let mut seed: i64 = 7;
        let mut next = || {
            seed = (seed * 1103515245 + 12345) % 1000;
            r(seed % 19 - 9, (seed % 7).abs() + 1)
        };
        let n = 5;
        let a: Vec<Vec<BigRational>> = (0..n).map(|_| (0..n).map(|_| next()).collect()).collect();
        let b: Vec<BigRational> = (0..n).map(|_| next()).collect();
        if let Some(x) = solve_exact(&a, &b) {
            for i in 0..n {
                let lhs: BigRational = (0..n).map(|j| &a[i][j] * &x[j]).sum();
                assert_eq!(lhs, b[i]);
            }
        }
    }
}
