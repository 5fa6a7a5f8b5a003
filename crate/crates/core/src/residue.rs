//! The circle residue `Res_T` of a rational character.
//!
//! For a primitive `xi`, coordinates are changed so that `x^alpha = y^beta z^k`
//! with `k = alpha(xi)`; a rational character then reads
//! `sum_k b_k(y) z^k / prod_i (1 - y^{beta_i} z^{k_i})`. Its residue is the
//! difference of the `z^0` coefficients of the expansions valid for large
//! and small `|z|`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use crate::charring::{LaurentPoly, RationalChar, TorusPoint, SAMPLE_DENOMINATOR};
use crate::error::{Error, Result};
use crate::lattice::{
    complete_to_basis, weight_from_basis, weight_in_basis, BasisChange, LatticeVector, Weight,
};

/// A rational character written in `(y, z)` coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZForm {
    basis: BasisChange,
    /// `k -> b_k(y)`.
    numerator: BTreeMap<i64, LaurentPoly>,
    /// `(beta_i, k_i)` for each factor `1 - y^{beta_i} z^{k_i}`.
    factors: Vec<(Weight, i64)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

impl ZForm {
    pub fn basis(&self) -> &BasisChange {
        &self.basis
    }

    pub fn numerator(&self) -> &BTreeMap<i64, LaurentPoly> {
        &self.numerator
    }

    pub fn factors(&self) -> &[(Weight, i64)] {
        &self.factors
    }

    /// Number of factors with `k_i < 0`.
    pub fn r(&self) -> usize {
        self.factors.iter().filter(|f| f.1 < 0).count()
    }

    /// Back to the original coordinates.
    pub fn to_rational(&self) -> RationalChar {
        let n = self.basis.dim();
        let mut num = LaurentPoly::zero(n);
        for (&k, b) in &self.numerator {
            for (beta, c) in b.terms() {
                num.add_term(
                    weight_from_basis(&beta.0, k, &self.basis).unwrap(),
                    c.clone(),
                );
            }
        }
        let den = self
            .factors
            .iter()
            .map(|(beta, k)| weight_from_basis(&beta.0, *k, &self.basis).unwrap())
            .collect();
        RationalChar::new(num, den).expect("factors are nonzero")
    }

    /// The same denominator over a single numerator monomial `c y^beta z^k`.
    pub fn with_monomial(&self, beta: Weight, k: i64, c: BigInt) -> ZForm {
        let mut numerator = BTreeMap::new();
        numerator.insert(k, LaurentPoly::monomial(beta, c));
        ZForm {
            basis: self.basis.clone(),
            numerator,
            factors: self.factors.clone(),
        }
    }
}

pub fn to_z_form(f: &RationalChar, xi: &LatticeVector) -> Result<ZForm> {
    if xi.dim() != f.dim() {
        return Err(Error::DimMismatch {
            expected: f.dim(),
            got: xi.dim(),
        });
    }
    let basis = complete_to_basis(xi)?;
    let m = f.dim() - 1;
    let mut factors = Vec::new();
    for gamma in f.denominator() {
        let (beta, k) = weight_in_basis(gamma, &basis)?;
        if k == 0 {
            return Err(Error::NotGeneric {
                what: "denominator factor".into(),
                weight: gamma.0.clone(),
            });
        }
        factors.push((Weight(beta), k));
    }
    let mut numerator: BTreeMap<i64, LaurentPoly> = BTreeMap::new();
    for (mu, c) in f.numerator().terms() {
        let (beta, k) = weight_in_basis(mu, &basis)?;
        numerator
            .entry(k)
            .or_insert_with(|| LaurentPoly::zero(m))
            .add_term(Weight(beta), c.clone());
    }
    Ok(ZForm {
        basis,
        numerator,
        factors,
    })
}

/// `z^0` coefficient of the expansion on one side of the unit circle.
///
/// Near `z = 0` a factor with `k_i > 0` expands as `sum_{l>=0} a^l z^{l k_i}`
/// and one with `k_i < 0` as `-sum_{l>=1} a^{-l} z^{l |k_i|}`; the far side
/// is the same computation after `z -> 1/z`.
pub fn res_half(z: &ZForm, side: Side) -> LaurentPoly {
    let m = z.basis.dim() - 1;
    let flip = match side {
        Side::Minus => 1,
        Side::Plus => -1,
    };
    // factors that expand in positive powers of `a` ("forward") or in
    // negative powers with a leading `-a^{-1}` ("backward")
    let mut steps: Vec<(usize, Weight)> = Vec::new();
    let mut shift = Weight::zero(m);
    let mut sign = BigInt::one();
    let mut offset = 0i64;
    for (beta, k) in &z.factors {
        let k = k * flip;
        if k > 0 {
            steps.push((k as usize, beta.clone()));
        } else {
            steps.push(((-k) as usize, -beta));
            shift = &shift - beta;
            sign = -sign;
            offset += -k;
        }
    }
    // degree needed for numerator z^k: -flip*k - offset
    let targets: Vec<(i64, &LaurentPoly)> = z
        .numerator
        .iter()
        .map(|(&k, b)| (-flip * k - offset, b))
        .filter(|(d, _)| *d >= 0)
        .collect();
    let Some(max_deg) = targets.iter().map(|t| t.0).max() else {
        return LaurentPoly::zero(m);
    };
    let max_deg = max_deg as usize;
    // table[d] = sum over solutions of sum l_i w_i = d of y^{sum l_i step_i}
    let mut table: Vec<LaurentPoly> = vec![LaurentPoly::zero(m); max_deg + 1];
    table[0] = LaurentPoly::one(m);
    for (w, step) in &steps {
        let mono = LaurentPoly::x(step.clone());
        for d in *w..=max_deg {
            let add = &table[d - w] * &mono;
            table[d] = &table[d] + &add;
        }
    }
    let prefactor = LaurentPoly::monomial(shift, sign);
    let mut out = LaurentPoly::zero(m);
    for (d, b) in targets {
        let term = &(b * &table[d as usize]) * &prefactor;
        out = &out + &term;
    }
    out
}

/// A polynomial in the `y`-variables as a character of `G` trivial on the
/// circle generated by `xi`.
pub fn reembed(p: &LaurentPoly, basis: &BasisChange) -> LaurentPoly {
    let n = basis.dim();
    p.map_exponents(n, |beta| weight_from_basis(&beta.0, 0, basis).unwrap())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueValue {
    pub plus: LaurentPoly,
    pub minus: LaurentPoly,
    pub total: LaurentPoly,
}

pub fn res_t(f: &RationalChar, xi: &LatticeVector) -> Result<ResidueValue> {
    let z = to_z_form(f, xi)?;
    let plus = reembed(&res_half(&z, Side::Plus), &z.basis);
    let minus = reembed(&res_half(&z, Side::Minus), &z.basis);
    let total = &plus - &minus;
    Ok(ResidueValue { plus, minus, total })
}

/// A point of `G` above the quotient point with `y`-angles `g_bar`.
pub fn quotient_lift(basis: &BasisChange, g_bar: &TorusPoint, t: BigRational) -> TorusPoint {
    let mut c = g_bar.angles();
    c.push(t);
    TorusPoint::new(&basis.lift(&c))
}

/// The `|alpha(xi)|` points of `G_alpha = {x^alpha = 1}` above `g_bar`.
pub fn fiber_points(
    alpha: &Weight,
    basis: &BasisChange,
    g_bar: &TorusPoint,
) -> Result<Vec<TorusPoint>> {
    let (beta, k) = weight_in_basis(alpha, basis)?;
    if k == 0 {
        return Err(Error::NotGeneric {
            what: "edge weight".into(),
            weight: alpha.0.clone(),
        });
    }
    let y = g_bar.angles();
    let by: BigRational = beta
        .iter()
        .zip(&y)
        .fold(BigRational::zero(), |acc, (b, v)| {
            acc + BigRational::from_integer((*b).into()) * v
        });
    Ok((0..k.abs())
        .map(|j| {
            let t =
                (BigRational::from_integer(j.into()) - &by) / BigRational::from_integer(k.into());
            quotient_lift(basis, g_bar, t)
        })
        .collect())
}

/// Average of `f` over the fiber of `G_alpha -> G/T` above `g_bar`.
pub fn fiber_average_numeric(
    f: &RationalChar,
    alpha: &Weight,
    xi: &LatticeVector,
    g_bar: &TorusPoint,
) -> Result<Complex64> {
    let basis = complete_to_basis(xi)?;
    fiber_average_in(f, alpha, &basis, g_bar)
}

fn fiber_average_in(
    f: &RationalChar,
    alpha: &Weight,
    basis: &BasisChange,
    g_bar: &TorusPoint,
) -> Result<Complex64> {
    let points = fiber_points(alpha, basis, g_bar)?;
    let mut sum = Complex64::new(0.0, 0.0);
    for p in &points {
        sum += f.eval(p)?;
    }
    Ok(sum / points.len() as f64)
}

/// `sum_{k_i < 0} avg_i - sum_{k_i > 0} avg_i`, where `avg_i` averages `f`
/// with factor `i` removed over the fiber of `G_i` above `g_bar`.
pub fn signed_fiber_sum(
    f: &RationalChar,
    xi: &LatticeVector,
    g_bar: &TorusPoint,
) -> Result<Complex64> {
    let basis = complete_to_basis(xi)?;
    let mut total = Complex64::new(0.0, 0.0);
    for (i, gamma) in f.denominator().iter().enumerate() {
        let avg = fiber_average_in(&f.without_factor(i), gamma, &basis, g_bar)?;
        if gamma.pair(xi) < 0 {
            total += avg;
        } else {
            total -= avg;
        }
    }
    Ok(total)
}

/// Random quotient point such that, for every `(alpha, others)` pair, each
/// fiber point of `G_alpha` above it keeps `1 - x^w` at least `min_distance`
/// from zero for all `w` in `others`.
pub fn sample_avoiding<R: Rng + ?Sized>(
    rng: &mut R,
    xi: &LatticeVector,
    constraints: &[(Weight, Vec<Weight>)],
    min_distance: f64,
    max_attempts: usize,
) -> Result<TorusPoint> {
    let basis = complete_to_basis(xi)?;
    'attempt: for _ in 0..max_attempts {
        let g_bar = TorusPoint::random(rng, xi.dim() - 1, SAMPLE_DENOMINATOR);
        for (alpha, others) in constraints {
            for p in fiber_points(alpha, &basis, &g_bar)? {
                if !p.avoids(others, min_distance) {
                    continue 'attempt;
                }
            }
        }
        return Ok(g_bar);
    }
    Err(Error::SamplingExhausted {
        attempts: max_attempts,
    })
}

/// [`sample_avoiding`] for the fiber points used by [`signed_fiber_sum`].
pub fn sample_quotient_point<R: Rng + ?Sized>(
    rng: &mut R,
    f: &RationalChar,
    xi: &LatticeVector,
    min_distance: f64,
    max_attempts: usize,
) -> Result<TorusPoint> {
    let den = f.denominator();
    let constraints: Vec<(Weight, Vec<Weight>)> = (0..den.len())
        .map(|i| {
            let mut others = den.to_vec();
            let alpha = others.remove(i);
            (alpha, others)
        })
        .collect();
    sample_avoiding(rng, xi, &constraints, min_distance, max_attempts)
}

/// Value at `g_bar` of a character trivial on the circle of `xi`.
pub fn eval_on_quotient(
    p: &LaurentPoly,
    xi: &LatticeVector,
    g_bar: &TorusPoint,
) -> Result<Complex64> {
    let basis = complete_to_basis(xi)?;
    Ok(p.eval(&quotient_lift(&basis, g_bar, BigRational::zero())))
}
