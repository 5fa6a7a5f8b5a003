//! Integer lattice utilities: weights, lattice vectors, primitivity and
//! unimodular basis completion.
//!
//! Weights live in the weight lattice `Z^n` and lattice vectors (such as the
//! generator `xi` of a circle subgroup) in the group lattice `Z^n`; the two
//! are dual under [`Weight::pair`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of the weight lattice.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weight(pub Vec<i64>);

/// An element of the group lattice.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeVector(pub Vec<i64>);

fn gcd_of(coords: &[i64]) -> u64 {
    coords.iter().fold(0i64, |g, &c| g.gcd(&c)).unsigned_abs()
}

fn primitive_part_of(coords: &[i64]) -> Result<(Vec<i64>, u64)> {
    let g = gcd_of(coords);
    if g == 0 {
        return Err(Error::ZeroVector);
    }
    let gi = g as i64;
    Ok((coords.iter().map(|c| c / gi).collect(), g))
}

fn render(coords: &[i64], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "(")?;
    for (i, c) in coords.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{c}")?;
    }
    write!(f, ")")
}

/// Parses `1,-2,3` (optionally parenthesised) into integers.
pub fn parse_int_vector(s: &str) -> Result<Vec<i64>> {
    let trimmed = s.trim().trim_start_matches('(').trim_end_matches(')');
    if trimmed.is_empty() {
        return Ok(Vec::new());
    }
    trimmed
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|e| Error::Parse(format!("bad integer `{}`: {e}", t.trim())))
        })
        .collect()
}

impl Weight {
    pub fn new(coords: Vec<i64>) -> Self {
        Weight(coords)
    }

    pub fn zero(dim: usize) -> Self {
        Weight(vec![0; dim])
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut w = Weight::zero(dim);
        w.0[i] = 1;
        w
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// The pairing `alpha(xi)`.
    pub fn pair(&self, xi: &LatticeVector) -> i64 {
        debug_assert_eq!(self.dim(), xi.dim());
        self.0.iter().zip(&xi.0).map(|(a, b)| a * b).sum()
    }

    pub fn scale(&self, k: i64) -> Weight {
        Weight(self.0.iter().map(|c| c * k).collect())
    }

    pub fn primitive_part(&self) -> Result<(Weight, u64)> {
        primitive_part_of(&self.0).map(|(v, m)| (Weight(v), m))
    }

    /// True when the two weights are linearly dependent over `Q`
    /// (in particular when either is zero).
    pub fn is_parallel(&self, other: &Weight) -> bool {
        let n = self.dim();
        for i in 0..n {
            for j in (i + 1)..n {
                if self.0[i] * other.0[j] != self.0[j] * other.0[i] {
                    return false;
                }
            }
        }
        true
    }

    /// Position of `self` inside its coset `self + Z*gamma`: returns `(rep, j)`
    /// with `self = rep + j*gamma`, where `rep` is the canonical representative
    /// whose first coordinate on the support of `gamma` lies in `[0, |gamma_i|)`.
    pub fn coset_position(&self, gamma: &Weight) -> Result<(Weight, i64)> {
        let i0 = gamma
            .0
            .iter()
            .position(|&c| c != 0)
            .ok_or(Error::ZeroWeight)?;
        let j = self.0[i0].div_euclid(gamma.0[i0]);
        Ok((self - &gamma.scale(j), j))
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimMismatch {
                expected: dim,
                got: self.dim(),
            });
        }
        Ok(())
    }
}

impl LatticeVector {
    pub fn new(coords: Vec<i64>) -> Self {
        LatticeVector(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn primitive_part(&self) -> Result<(LatticeVector, u64)> {
        primitive_part_of(&self.0).map(|(v, m)| (LatticeVector(v), m))
    }

    pub fn is_primitive(&self) -> bool {
        gcd_of(&self.0) == 1
    }

    pub fn neg(&self) -> LatticeVector {
        LatticeVector(self.0.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        render(&self.0, f)
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        render(&self.0, f)
    }
}

impl<'a> Add<&'a Weight> for &'a Weight {
    type Output = Weight;
    fn add(self, rhs: &'a Weight) -> Weight {
        debug_assert_eq!(self.dim(), rhs.dim());
        Weight(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl<'a> Sub<&'a Weight> for &'a Weight {
    type Output = Weight;
    fn sub(self, rhs: &'a Weight) -> Weight {
        debug_assert_eq!(self.dim(), rhs.dim());
        Weight(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Weight {
    type Output = Weight;
    fn neg(self) -> Weight {
        Weight(self.0.iter().map(|c| -c).collect())
    }
}

impl Mul<&Weight> for i64 {
    type Output = Weight;
    fn mul(self, rhs: &Weight) -> Weight {
        rhs.scale(self)
    }
}

/// A unimodular change of basis of the group lattice whose last column is a
/// designated primitive vector `xi`.
///
/// `matrix` holds the new basis vectors as columns; `inverse` is its integer
/// inverse. Rows of `inverse` form the dual basis of the weight lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisChange {
    matrix: Vec<Vec<i64>>,
    inverse: Vec<Vec<i64>>,
}

impl BasisChange {
    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn inverse(&self) -> &[Vec<i64>] {
        &self.inverse
    }

    pub fn column(&self, j: usize) -> LatticeVector {
        LatticeVector(self.matrix.iter().map(|row| row[j]).collect())
    }

    pub fn xi(&self) -> LatticeVector {
        self.column(self.dim() - 1)
    }

    /// Maps coordinates in the new basis back to `g = R^n`: `x = U c`.
    pub fn lift(&self, c: &[BigRational]) -> Vec<BigRational> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                (0..n).fold(BigRational::zero(), |acc, j| {
                    acc + BigRational::from_integer(self.matrix[i][j].into()) * &c[j]
                })
            })
            .collect()
    }

    pub fn determinant(&self) -> i64 {
        integer_determinant(&self.matrix)
    }
}

/// Completes a primitive `xi` to a basis of `Z^n` with `xi` as last member.
///
/// Runs a Euclidean reduction of `xi` to `e_n` by unimodular row operations;
/// the product of those operations is the inverse of the returned matrix.
pub fn complete_to_basis(xi: &LatticeVector) -> Result<BasisChange> {
    let n = xi.dim();
    if n == 0 {
        return Err(Error::ZeroVector);
    }
    match gcd_of(&xi.0) {
        0 => return Err(Error::ZeroVector),
        1 => {}
        _ => return Err(Error::NotPrimitive(xi.0.clone())),
    }

    let mut v = xi.0.clone();
    let mut inv = identity(n); // V, with V * xi = v
    let mut mat = identity(n); // U = V^{-1}

    loop {
        let nonzero: Vec<usize> = (0..n).filter(|&i| v[i] != 0).collect();
        if nonzero.len() <= 1 {
            break;
        }
        let pivot = *nonzero.iter().min_by_key(|&&i| v[i].abs()).unwrap();
        for &j in &nonzero {
            if j == pivot {
                continue;
            }
            let q = v[j] / v[pivot];
            if q == 0 {
                continue;
            }
            // row_j -= q row_pivot  on V;  col_pivot += q col_j  on U
            v[j] -= q * v[pivot];
            for c in 0..n {
                inv[j][c] -= q * inv[pivot][c];
            }
            for row in mat.iter_mut() {
                row[pivot] += q * row[j];
            }
        }
    }

    let pos = (0..n)
        .find(|&i| v[i] != 0)
        .expect("primitive vector is nonzero");
    if pos != n - 1 {
        v.swap(pos, n - 1);
        inv.swap(pos, n - 1);
        for row in mat.iter_mut() {
            row.swap(pos, n - 1);
        }
    }
    if v[n - 1] < 0 {
        v[n - 1] = -v[n - 1];
        for c in inv[n - 1].iter_mut() {
            *c = -*c;
        }
        for row in mat.iter_mut() {
            row[n - 1] = -row[n - 1];
        }
    }
    debug_assert_eq!(v[n - 1], 1);

    Ok(BasisChange {
        matrix: mat,
        inverse: inv,
    })
}

/// Expresses `alpha` in the basis dual to the columns of `basis`.
/// Returns `(beta, k)` with `beta` the first `n - 1` coordinates and
/// `k = alpha(xi)`.
pub fn weight_in_basis(alpha: &Weight, basis: &BasisChange) -> Result<(Vec<i64>, i64)> {
    let n = basis.dim();
    alpha.check_dim(n)?;
    let mut c: Vec<i64> = (0..n)
        .map(|j| (0..n).map(|i| alpha.0[i] * basis.matrix[i][j]).sum())
        .collect();
    let k = c.pop().unwrap();
    Ok((c, k))
}

/// Inverse of [`weight_in_basis`].
pub fn weight_from_basis(beta: &[i64], k: i64, basis: &BasisChange) -> Result<Weight> {
    let n = basis.dim();
    if beta.len() + 1 != n {
        return Err(Error::DimMismatch {
            expected: n - 1,
            got: beta.len(),
        });
    }
    let coeff = |i: usize| if i + 1 == n { k } else { beta[i] };
    Ok(Weight(
        (0..n)
            .map(|j| (0..n).map(|i| coeff(i) * basis.inverse[i][j]).sum())
            .collect(),
    ))
}

/// Order of `G_xi ∩ G_alpha`, i.e. `|alpha(xi)|`; zero means the circle
/// generated by `xi` lies inside the kernel of `alpha`.
pub fn cyclic_fiber_order(alpha: &Weight, xi: &LatticeVector) -> u64 {
    alpha.pair(xi).unsigned_abs()
}

fn identity(n: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

/// Determinant of a small integer matrix by fraction-free elimination.
pub fn integer_determinant(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    (sign * a[n - 1][n - 1]) as i64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
        let n = a.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum())
                    .collect()
            })
            .collect()
    }

    #[test]
    fn primitive_part_examples() {
        assert_eq!(
            LatticeVector::new(vec![2, 3]).primitive_part().unwrap(),
            (LatticeVector::new(vec![2, 3]), 1)
        );
        assert_eq!(
            LatticeVector::new(vec![4, 6]).primitive_part().unwrap(),
            (LatticeVector::new(vec![2, 3]), 2)
        );
        assert_eq!(
            Weight::new(vec![-4, 6]).primitive_part().unwrap(),
            (Weight::new(vec![-2, 3]), 2)
        );
        assert_eq!(
            LatticeVector::new(vec![0, 0]).primitive_part(),
            Err(Error::ZeroVector)
        );
    }

    #[test]
    fn basis_completion_examples() {
        let b = complete_to_basis(&LatticeVector::new(vec![0, 1])).unwrap();
        assert_eq!(b.matrix(), &[vec![1, 0], vec![0, 1]]);

        let b = complete_to_basis(&LatticeVector::new(vec![2, 3])).unwrap();
        assert_eq!(b.xi(), LatticeVector::new(vec![2, 3]));
        assert_eq!(b.determinant().abs(), 1);
        assert_eq!(mat_mul(b.matrix(), b.inverse()), identity(2));

        assert_eq!(
            complete_to_basis(&LatticeVector::new(vec![2, 4])),
            Err(Error::NotPrimitive(vec![2, 4]))
        );
    }

    #[test]
    fn weight_in_basis_examples() {
        let id = complete_to_basis(&LatticeVector::new(vec![0, 1])).unwrap();
        assert_eq!(
            weight_in_basis(&Weight::new(vec![5, 7]), &id).unwrap(),
            (vec![5], 7)
        );

        let b = complete_to_basis(&LatticeVector::new(vec![2, 3])).unwrap();
        let alpha = Weight::new(vec![1, 0]);
        let (beta, k) = weight_in_basis(&alpha, &b).unwrap();
        assert_eq!(k, 2);
        assert_eq!(weight_from_basis(&beta, k, &b).unwrap(), alpha);

        // annihilator of xi
        let (_, k) = weight_in_basis(&Weight::new(vec![3, -2]), &b).unwrap();
        assert_eq!(k, 0);
    }

    #[test]
    fn fiber_orders() {
        let ord = |a: Vec<i64>, x: Vec<i64>| cyclic_fiber_order(&Weight(a), &LatticeVector(x));
        assert_eq!(ord(vec![1, 0], vec![0, 1]), 0);
        assert_eq!(ord(vec![3, 1], vec![1, 0]), 3);
        assert_eq!(ord(vec![-2, 5], vec![1, 1]), 3);
    }

    #[test]
    fn coset_positions() {
        let g = Weight::new(vec![-2, 1]);
        let (r1, j1) = Weight::new(vec![5, 0]).coset_position(&g).unwrap();
        let (r2, j2) = Weight::new(vec![1, 2]).coset_position(&g).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(j1 - j2, -2);
        assert!(r1.0[0] >= 0 && r1.0[0] < 2);
    }

    #[test]
    fn determinants() {
        assert_eq!(integer_determinant(&[vec![2, 1], vec![3, 2]]), 1);
        assert_eq!(
            integer_determinant(&[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 5]]),
            -5
        );
    }

    fn primitive_vec(n: usize) -> impl Strategy<Value = Vec<i64>> {
        proptest::collection::vec(-40i64..40, n).prop_filter("primitive", |v| gcd_of(v) == 1)
    }

    proptest! {
        #[test]
        fn completion_is_unimodular_and_round_trips(
            xi in (1usize..5).prop_flat_map(primitive_vec),
            weights in proptest::collection::vec(proptest::collection::vec(-50i64..50, 4), 1..20),
        ) {
            let n = xi.len();
            let xi = LatticeVector(xi);
            let b = complete_to_basis(&xi).unwrap();
            prop_assert_eq!(b.determinant().abs(), 1);
            prop_assert_eq!(mat_mul(b.matrix(), b.inverse()), identity(n));
            prop_assert_eq!(&b.xi(), &xi);
            // dual row pairing to one with xi
            let last: i64 = (0..n).map(|j| b.inverse()[n - 1][j] * xi.0[j]).sum();
            prop_assert_eq!(last, 1);
            for w in weights {
                let alpha = Weight(w[..n].to_vec());
                let (beta, k) = weight_in_basis(&alpha, &b).unwrap();
                prop_assert_eq!(k, alpha.pair(&xi));
                prop_assert_eq!(weight_from_basis(&beta, k, &b).unwrap(), alpha);
            }
        }

        #[test]
        fn primitive_part_scales(v in (1usize..5).prop_flat_map(|n| proptest::collection::vec(-30i64..30, n)), k in 1i64..20) {
            prop_assume!(v.iter().any(|&c| c != 0));
            let (p, m) = Weight(v.clone()).primitive_part().unwrap();
            let (pk, mk) = Weight(v).scale(k).primitive_part().unwrap();
            prop_assert_eq!(p, pk);
            prop_assert_eq!(mk, m * k as u64);
        }
    }
}
