//! The character ring `R(G) = Z[x_1^±1, ..., x_n^±1]` and rational
//! characters with binomial denominators `1 - x^gamma`.
//!
//! Everything is exact except [`TorusPoint`] evaluation, which exists as a
//! numeric oracle.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::lattice::{LatticeVector, Weight};

/// A Laurent polynomial with integer coefficients in `dim` variables.
///
/// Terms are kept in a `BTreeMap`, so iteration (and rendering) is
/// lexicographic on exponent vectors. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    dim: usize,
    terms: BTreeMap<Weight, BigInt>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RingOp {
    Add,
    Sub,
    Mul,
}

impl LaurentPoly {
    pub fn zero(dim: usize) -> Self {
        LaurentPoly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, BigInt::one())
    }

    pub fn constant(dim: usize, c: impl Into<BigInt>) -> Self {
        Self::monomial(Weight::zero(dim), c)
    }

    pub fn monomial(exp: Weight, c: impl Into<BigInt>) -> Self {
        let mut p = Self::zero(exp.dim());
        let c = c.into();
        if !c.is_zero() {
            p.terms.insert(exp, c);
        }
        p
    }

    /// `x^exp`.
    pub fn x(exp: Weight) -> Self {
        Self::monomial(exp, 1)
    }

    /// `1 - x^gamma`.
    pub fn binomial(gamma: &Weight) -> Self {
        let mut p = Self::one(gamma.dim());
        p.add_term(gamma.clone(), BigInt::from(-1));
        p
    }

    pub fn from_terms<I, C>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Weight, C)>,
        C: Into<BigInt>,
    {
        let mut p = Self::zero(dim);
        for (e, c) in terms {
            e.check_dim(dim)?;
            p.add_term(e, c.into());
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Weight, &BigInt)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &Weight> {
        self.terms.keys()
    }

    pub fn coeff(&self, exp: &Weight) -> BigInt {
        self.terms.get(exp).cloned().unwrap_or_default()
    }

    /// The single `(exponent, coefficient)` pair if this is a monomial.
    pub fn as_monomial(&self) -> Option<(&Weight, &BigInt)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn add_term(&mut self, exp: Weight, c: BigInt) {
        debug_assert_eq!(exp.dim(), self.dim);
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exp) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_same_dim(&self, other: &LaurentPoly) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.check_same_dim(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.check_same_dim(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.check_same_dim(other)?;
        let mut acc: HashMap<Weight, BigInt> = HashMap::with_capacity(self.len() * other.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                *acc.entry(ea + eb).or_default() += ca * cb;
            }
        }
        Ok(Self::from_map(self.dim, acc))
    }

    fn from_map(dim: usize, acc: HashMap<Weight, BigInt>) -> Self {
        LaurentPoly {
            dim,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    /// Multiplies by the monomial `x^exp`.
    pub fn shift(&self, exp: &Weight) -> LaurentPoly {
        LaurentPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e + exp, c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, k: &BigInt) -> LaurentPoly {
        if k.is_zero() {
            return Self::zero(self.dim);
        }
        LaurentPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect(),
        }
    }

    pub fn filter<F: FnMut(&Weight) -> bool>(&self, mut keep: F) -> LaurentPoly {
        LaurentPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| keep(e))
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Applies an injective map to the exponents.
    pub fn map_exponents<F: FnMut(&Weight) -> Weight>(&self, dim: usize, mut f: F) -> LaurentPoly {
        let mut out = LaurentPoly::zero(dim);
        for (e, c) in &self.terms {
            out.add_term(f(e), c.clone());
        }
        out
    }

    /// Monomials whose exponent pairs to zero with `xi` (the `T`-invariant part).
    pub fn invariant_part(&self, xi: &LatticeVector) -> LaurentPoly {
        self.filter(|e| e.pair(xi) == 0)
    }

    /// Sum of coefficients after collapsing exponents modulo `Z gamma`.
    pub fn reduce_mod(&self, gamma: &Weight) -> Result<LaurentPoly> {
        if gamma.is_zero() {
            return Err(Error::ZeroWeight);
        }
        gamma.check_dim(self.dim)?;
        let mut out = LaurentPoly::zero(self.dim);
        for (e, c) in &self.terms {
            let (rep, _) = e.coset_position(gamma)?;
            out.add_term(rep, c.clone());
        }
        Ok(out)
    }

    /// Evaluates the character sum at a torus point.
    pub fn eval(&self, g: &TorusPoint) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| g.character(e) * c.to_f64().unwrap_or(f64::NAN))
            .sum()
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(e, c)| json!({ "coeff": c.to_string(), "exp": e.0 }))
                .collect(),
        )
    }
}

impl fmt::Display for LaurentPoly {
    /// Canonical rendering: lexicographic terms, e.g. `-1*x^(0,1) + 2*x^(1,-2)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let shown = if i == 0 {
                c.clone()
            } else if c.is_negative() {
                write!(f, " - ")?;
                -c
            } else {
                write!(f, " + ")?;
                c.clone()
            };
            if e.is_zero() {
                write!(f, "{shown}")?;
            } else {
                write!(f, "{shown}*x^{e}")?;
            }
        }
        Ok(())
    }
}

macro_rules! forward_op {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl<'a> $tr<&'a LaurentPoly> for &'a LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: &'a LaurentPoly) -> LaurentPoly {
                self.$checked(rhs)
                    .expect("Laurent polynomials of different dimension")
            }
        }
        impl $tr<LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$m(&rhs)
            }
        }
    };
}

forward_op!(Add, add, checked_add);
forward_op!(Sub, sub, checked_sub);
forward_op!(Mul, mul, checked_mul);

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

pub fn ring_arith(a: &LaurentPoly, b: &LaurentPoly, op: RingOp) -> Result<LaurentPoly> {
    match op {
        RingOp::Add => a.checked_add(b),
        RingOp::Sub => a.checked_sub(b),
        RingOp::Mul => a.checked_mul(b),
    }
}

/// Exact division by `1 - x^gamma`.
///
/// Each coset `mu + Z gamma` is an independent copy of `Z[t, 1/t]` with
/// `t = x^gamma`, so the division reduces to dividing one-variable Laurent
/// polynomials by `1 - t`: the quotient coefficients are running sums, and
/// divisibility means each coset's coefficients sum to zero.
pub fn divide_exact(p: &LaurentPoly, gamma: &Weight) -> Result<LaurentPoly> {
    if gamma.is_zero() {
        return Err(Error::ZeroWeight);
    }
    gamma.check_dim(p.dim)?;
    let mut cosets: HashMap<Weight, Vec<(i64, &BigInt)>> = HashMap::new();
    for (e, c) in &p.terms {
        let (rep, j) = e.coset_position(gamma)?;
        cosets.entry(rep).or_default().push((j, c));
    }
    let mut q = LaurentPoly::zero(p.dim);
    for (rep, mut line) in cosets {
        line.sort_by_key(|&(j, _)| j);
        let (lo, hi) = (line[0].0, line[line.len() - 1].0);
        let mut running = BigInt::zero();
        let mut next = line.iter().peekable();
        for j in lo..hi {
            while let Some(&&(jj, c)) = next.peek() {
                if jj != j {
                    break;
                }
                running += c;
                next.next();
            }
            if !running.is_zero() {
                q.add_term(&rep + &gamma.scale(j), running.clone());
            }
        }
        for &(_, c) in next {
            running += c;
        }
        if !running.is_zero() {
            return Err(Error::NotDivisible(gamma.0.clone()));
        }
    }
    Ok(q)
}

/// Whether `p ≡ q (mod 1 - x^gamma)`, i.e. they agree on the kernel of `x^gamma`.
pub fn congruent_mod_edge(p: &LaurentPoly, q: &LaurentPoly, gamma: &Weight) -> Result<bool> {
    Ok(p.reduce_mod(gamma)? == q.reduce_mod(gamma)?)
}

/// Push-forward along the quotient by the cyclic group generated by
/// `exp(xi / m)`: averaging over the group keeps exactly the monomials with
/// `mu(xi) ≡ 0 (mod m)`.
pub fn pushforward_quotient(p: &LaurentPoly, xi: &LatticeVector, m: u64) -> LaurentPoly {
    assert!(m >= 1, "cyclic group order must be positive");
    let m = m as i64;
    p.filter(|e| e.pair(xi).rem_euclid(m) == 0)
}

/// `numerator / prod (1 - x^gamma)` over the denominator weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalChar {
    numerator: LaurentPoly,
    denominator: Vec<Weight>,
}

impl RationalChar {
    pub fn new(numerator: LaurentPoly, denominator: Vec<Weight>) -> Result<Self> {
        for w in &denominator {
            w.check_dim(numerator.dim())?;
            if w.is_zero() {
                return Err(Error::ZeroWeight);
            }
        }
        Ok(RationalChar {
            numerator,
            denominator,
        })
    }

    pub fn polynomial(p: LaurentPoly) -> Self {
        RationalChar {
            numerator: p,
            denominator: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.numerator.dim()
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.numerator
    }

    pub fn denominator(&self) -> &[Weight] {
        &self.denominator
    }

    /// The same expression with denominator factor `i` removed.
    pub fn without_factor(&self, i: usize) -> RationalChar {
        let mut denominator = self.denominator.clone();
        denominator.remove(i);
        RationalChar {
            numerator: self.numerator.clone(),
            denominator,
        }
    }

    pub fn eval(&self, g: &TorusPoint) -> Result<Complex64> {
        let mut value = self.numerator.eval(g);
        for w in &self.denominator {
            if g.pairing_is_integral(w) {
                return Err(Error::PoleAtPoint(w.0.clone()));
            }
            let d = Complex64::new(1.0, 0.0) - g.character(w);
            if d.norm() <= 1e-9 {
                return Err(Error::PoleAtPoint(w.0.clone()));
            }
            value /= d;
        }
        Ok(value)
    }
}

impl fmt::Display for RationalChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.numerator)?;
        for w in &self.denominator {
            write!(f, " / (1 - x^{w})")?;
        }
        Ok(())
    }
}

/// Anything that can be evaluated numerically on the torus.
pub trait EvalNumeric {
    fn eval_numeric(&self, g: &TorusPoint) -> Result<Complex64>;
}

impl EvalNumeric for LaurentPoly {
    fn eval_numeric(&self, g: &TorusPoint) -> Result<Complex64> {
        Ok(self.eval(g))
    }
}

impl EvalNumeric for RationalChar {
    fn eval_numeric(&self, g: &TorusPoint) -> Result<Complex64> {
        self.eval(g)
    }
}

pub fn eval_numeric<F: EvalNumeric>(f: &F, g: &TorusPoint) -> Result<Complex64> {
    f.eval_numeric(g)
}

/// Default denominator for random torus points.
pub const SAMPLE_DENOMINATOR: i64 = 1_000_000;

/// A point `exp(x)` of `G = R^n / Z^n`, stored with exact rational coordinates
/// reduced into `[0, 1)` over a common denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusPoint {
    numerators: Vec<BigInt>,
    denominator: BigInt,
}

impl TorusPoint {
    pub fn new(angles: &[BigRational]) -> Self {
        let denominator = angles
            .iter()
            .fold(BigInt::one(), |acc, a| acc.lcm(a.denom()));
        let numerators = angles
            .iter()
            .map(|a| (a.numer() * (&denominator / a.denom())).mod_floor(&denominator))
            .collect();
        TorusPoint {
            numerators,
            denominator,
        }
    }

    pub fn from_fractions(fracs: &[(i64, i64)]) -> Self {
        let angles: Vec<BigRational> = fracs
            .iter()
            .map(|&(p, q)| BigRational::new(p.into(), q.into()))
            .collect();
        Self::new(&angles)
    }

    pub fn dim(&self) -> usize {
        self.numerators.len()
    }

    pub fn angles(&self) -> Vec<BigRational> {
        self.numerators
            .iter()
            .map(|p| BigRational::new(p.clone(), self.denominator.clone()))
            .collect()
    }

    /// Uniform random point with coordinates in `(1/denominator) Z`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, dim: usize, denominator: i64) -> Self {
        let angles: Vec<BigRational> = (0..dim)
            .map(|_| BigRational::new(rng.gen_range(0..denominator).into(), denominator.into()))
            .collect();
        Self::new(&angles)
    }

    /// Random point at which every `1 - x^w` has modulus above `min_distance`.
    pub fn random_pole_free<R: Rng + ?Sized>(
        rng: &mut R,
        dim: usize,
        weights: &[Weight],
        min_distance: f64,
        max_attempts: usize,
    ) -> Result<Self> {
        for _ in 0..max_attempts {
            let g = Self::random(rng, dim, SAMPLE_DENOMINATOR);
            if g.avoids(weights, min_distance) {
                return Ok(g);
            }
        }
        Err(Error::SamplingExhausted {
            attempts: max_attempts,
        })
    }

    pub fn avoids(&self, weights: &[Weight], min_distance: f64) -> bool {
        weights.iter().all(|w| {
            !self.pairing_is_integral(w)
                && (Complex64::new(1.0, 0.0) - self.character(w)).norm() > min_distance
        })
    }

    fn pairing_numerator(&self, w: &Weight) -> BigInt {
        w.0.iter()
            .zip(&self.numerators)
            .map(|(&c, p)| p * c)
            .sum::<BigInt>()
            .mod_floor(&self.denominator)
    }

    /// `w(x) mod 1` as an exact rational.
    pub fn phase(&self, w: &Weight) -> BigRational {
        BigRational::new(self.pairing_numerator(w), self.denominator.clone())
    }

    pub fn pairing_is_integral(&self, w: &Weight) -> bool {
        self.pairing_numerator(w).is_zero()
    }

    /// `e^{2 pi i w(x)}`.
    pub fn character(&self, w: &Weight) -> Complex64 {
        let r = self.pairing_numerator(w);
        let theta = r.to_f64().unwrap() / self.denominator.to_f64().unwrap();
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * theta)
    }
}
