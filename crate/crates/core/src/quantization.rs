//! The localized character `chi(f) = sum_p f_p / prod_{i(e)=p} (1 - x^{alpha_e})`
//! and its combinatorics: polarizations, Kostant partition counts, the
//! polarized series expansion, the exact-division oracle and convex hulls.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::charring::{divide_exact, LaurentPoly, TorusPoint};
use crate::error::{Error, Result};
use crate::gkm::{as_symplectic, EdgeId, GkmAction, KClass, SymplecticClass, VertexId};
use crate::lattice::{LatticeVector, Weight};

/// Default cap on the number of intermediate terms per vertex in
/// [`character_expand`].
pub const DEFAULT_TERM_BUDGET: usize = 5_000_000;

/// Polarization data at one vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexPolarization {
    /// Oriented edges with `p` as an endpoint and positive `xi`-pairing.
    pub positive_edges: Vec<EdgeId>,
    pub positive_weights: Vec<Weight>,
    /// How many of them end at `p`.
    pub sigma: usize,
    pub two_delta: Weight,
    pub two_delta_sharp: Weight,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polarization {
    xi: LatticeVector,
    vertices: Vec<VertexPolarization>,
}

impl Polarization {
    pub fn xi(&self) -> &LatticeVector {
        &self.xi
    }

    pub fn vertex(&self, p: VertexId) -> &VertexPolarization {
        &self.vertices[p]
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// `(-1)^{sigma_p}`.
    pub fn sign(&self, p: VertexId) -> i64 {
        if self.vertices[p].sigma.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// `delta_p - delta_p^#`, the sum of the positive edges ending at `p`.
    pub fn lift(&self, p: VertexId) -> Weight {
        let v = &self.vertices[p];
        Weight(
            v.two_delta
                .0
                .iter()
                .zip(&v.two_delta_sharp.0)
                .map(|(a, b)| (a - b) / 2)
                .collect(),
        )
    }

    fn check_action(&self, action: &GkmAction) -> Result<()> {
        if self.vertices.len() != action.num_vertices() {
            return Err(Error::DimMismatch {
                expected: action.num_vertices(),
                got: self.vertices.len(),
            });
        }
        if self.xi.dim() != action.n() {
            return Err(Error::DimMismatch {
                expected: action.n(),
                got: self.xi.dim(),
            });
        }
        Ok(())
    }
}

pub fn check_xi(action: &GkmAction, xi: &LatticeVector) -> Result<()> {
    if xi.dim() != action.n() {
        return Err(Error::DimMismatch {
            expected: action.n(),
            got: xi.dim(),
        });
    }
    if !xi.is_primitive() {
        return Err(Error::NotPrimitive(xi.0.clone()));
    }
    action.check_generic(xi)
}

pub fn polarize(action: &GkmAction, xi: &LatticeVector) -> Result<Polarization> {
    check_xi(action, xi)?;
    let n = action.n();
    let vertices = action
        .vertices()
        .map(|p| {
            let mut v = VertexPolarization {
                positive_edges: Vec::new(),
                positive_weights: Vec::new(),
                sigma: 0,
                two_delta: Weight::zero(n),
                two_delta_sharp: Weight::zero(n),
            };
            for &e in action.outgoing(p) {
                let alpha = action.axial(e);
                let (edge, w, sign) = if alpha.pair(xi) > 0 {
                    (e, alpha.clone(), 1)
                } else {
                    v.sigma += 1;
                    (action.edge(e).bar, -alpha, -1)
                };
                v.two_delta = &v.two_delta + &w;
                v.two_delta_sharp = &v.two_delta_sharp + &w.scale(sign);
                v.positive_edges.push(edge);
                v.positive_weights.push(w);
            }
            v
        })
        .collect();
    Ok(Polarization {
        xi: xi.clone(),
        vertices,
    })
}

/// Memoized vector partition function for a multiset of weights that all
/// pair positively with `xi`.
pub struct KostantCounter {
    weights: Vec<Weight>,
    xi: LatticeVector,
    memo: HashMap<(usize, Weight), BigInt>,
}

impl KostantCounter {
    pub fn new(weights: &[Weight], xi: &LatticeVector) -> Result<Self> {
        for w in weights {
            if w.pair(xi) <= 0 {
                return Err(Error::NotGeneric {
                    what: "partition weight with non-positive pairing".into(),
                    weight: w.0.clone(),
                });
            }
        }
        Ok(KostantCounter {
            weights: weights.to_vec(),
            xi: xi.clone(),
            memo: HashMap::new(),
        })
    }

    pub fn count(&mut self, target: &Weight) -> BigInt {
        self.count_prefix(self.weights.len(), target)
    }

    fn count_prefix(&mut self, j: usize, v: &Weight) -> BigInt {
        if v.pair(&self.xi) < 0 {
            return BigInt::zero();
        }
        if j == 0 {
            return if v.is_zero() {
                BigInt::one()
            } else {
                BigInt::zero()
            };
        }
        let key = (j, v.clone());
        if let Some(c) = self.memo.get(&key) {
            return c.clone();
        }
        let w = self.weights[j - 1].clone();
        let mut total = BigInt::zero();
        let mut cur = v.clone();
        while cur.pair(&self.xi) >= 0 {
            total += self.count_prefix(j - 1, &cur);
            cur = &cur - &w;
        }
        self.memo.insert(key, total.clone());
        total
    }
}

/// Number of ways to write `target` as a non-negative integer combination of
/// `weights` (every weight must pair positively with `xi`).
pub fn kostant_count(weights: &[Weight], target: &Weight, xi: &LatticeVector) -> Result<BigInt> {
    Ok(KostantCounter::new(weights, xi)?.count(target))
}

/// Weight multiplicities of a symplectic class, one partition counter per vertex.
pub struct Multiplicities<'a> {
    class: &'a SymplecticClass,
    pol: &'a Polarization,
    counters: Vec<KostantCounter>,
}

impl<'a> Multiplicities<'a> {
    pub fn new(class: &'a SymplecticClass, pol: &'a Polarization) -> Result<Self> {
        pol.check_action(class.action())?;
        let counters = (0..pol.num_vertices())
            .map(|p| KostantCounter::new(&pol.vertex(p).positive_weights, pol.xi()))
            .collect::<Result<_>>()?;
        Ok(Multiplicities {
            class,
            pol,
            counters,
        })
    }

    /// `sum_p (-1)^p N_p(alpha - alpha_p + delta_p^# - delta_p)`.
    pub fn get(&mut self, alpha: &Weight) -> BigInt {
        let mut total = BigInt::zero();
        for p in 0..self.counters.len() {
            let shifted = &(alpha - self.class.alpha(p)) - &self.pol.lift(p);
            let n = self.counters[p].count(&shifted);
            total += n * self.pol.sign(p);
        }
        total
    }
}

pub fn multiplicity(f: &SymplecticClass, pol: &Polarization, alpha: &Weight) -> Result<BigInt> {
    Ok(Multiplicities::new(f, pol)?.get(alpha))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterResult {
    pub poly: LaurentPoly,
    /// Vertices of the convex hull of `{alpha_p}`; empty unless the class is
    /// symplectic.
    pub hull_vertices: Vec<Weight>,
}

/// `(min, max)` of `zeta`-pairings over the support of `chi(f)`, read off
/// from the two polarizations by `zeta` and `-zeta`. `None` for the zero
/// class; `zeta` must be generic.
fn pairing_bounds(f: &KClass, zeta: &LatticeVector) -> Option<(i64, i64)> {
    let action = f.action();
    let mut bounds: Option<(i64, i64)> = None;
    for p in action.vertices() {
        let mut up = 0;
        let mut down = 0;
        for &e in action.outgoing(p) {
            let s = action.axial(e).pair(zeta);
            if s > 0 {
                up += s;
            } else {
                down -= s;
            }
        }
        for mu in f.value(p).support() {
            let s = mu.pair(zeta);
            let (lo, hi) = (s + down, s - up);
            bounds = Some(match bounds {
                None => (lo, hi),
                Some((a, b)) => (a.min(lo), b.max(hi)),
            });
        }
    }
    bounds
}

/// Product of `sum_k x^{k w}` over `weights`, keeping terms with
/// `xi`-pairing at most `cap`; sorted by pairing.
fn truncated_series(
    weights: &[Weight],
    xi: &LatticeVector,
    cap: i64,
    budget: usize,
) -> Result<Vec<(i64, Weight, BigInt)>> {
    let n = xi.dim();
    let mut acc: HashMap<Weight, (i64, BigInt)> = HashMap::new();
    acc.insert(Weight::zero(n), (0, BigInt::one()));
    for w in weights {
        let a = w.pair(xi);
        let mut next: HashMap<Weight, (i64, BigInt)> = HashMap::with_capacity(acc.len());
        for (v, (s, c)) in acc {
            let mut exp = v;
            let mut s = s;
            while s <= cap {
                let entry = next
                    .entry(exp.clone())
                    .or_insert_with(|| (s, BigInt::zero()));
                entry.1 += &c;
                exp = &exp + w;
                s += a;
            }
            if next.len() > budget {
                return Err(Error::TruncationOverflow { budget });
            }
        }
        acc = next;
    }
    let mut out: Vec<(i64, Weight, BigInt)> =
        acc.into_iter().map(|(v, (s, c))| (s, v, c)).collect();
    out.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    Ok(out)
}

pub fn character_expand(f: &KClass, pol: &Polarization) -> Result<CharacterResult> {
    character_expand_with_budget(f, pol, DEFAULT_TERM_BUDGET)
}

/// Sums the polarized expansions
/// `(-1)^p x^{alpha_p + delta_p - delta_p^#} f_p prod_{e in E_p} sum_k x^{k alpha_e}`
/// truncated at the largest `xi`-pairing that `chi(f)` can have.
pub fn character_expand_with_budget(
    f: &KClass,
    pol: &Polarization,
    budget: usize,
) -> Result<CharacterResult> {
    let action = f.action();
    pol.check_action(action)?;
    let n = action.n();
    let xi = pol.xi();
    let hull_vertices = as_symplectic(f)
        .map(|s| convex_hull_vertices(s.alphas()))
        .unwrap_or_default();
    let Some((_, b_max)) = pairing_bounds(f, xi) else {
        return Ok(CharacterResult {
            poly: LaurentPoly::zero(n),
            hull_vertices,
        });
    };
    let boxes: Vec<Option<(i64, i64)>> = (0..n)
        .map(|i| {
            let zeta = LatticeVector(Weight::unit(n, i).0);
            action
                .check_generic(&zeta)
                .ok()
                .and_then(|_| pairing_bounds(f, &zeta))
        })
        .collect();
    let in_box = |w: &Weight| {
        boxes
            .iter()
            .enumerate()
            .all(|(i, b)| b.is_none_or(|(lo, hi)| lo <= w.0[i] && w.0[i] <= hi))
    };

    let contributions: Vec<Result<HashMap<Weight, BigInt>>> = action
        .vertices()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|p| {
            let lift = pol.lift(p);
            let sign = BigInt::from(pol.sign(p));
            let base: Vec<(i64, Weight, BigInt)> = f
                .value(p)
                .terms()
                .map(|(mu, c)| {
                    let e = mu + &lift;
                    (e.pair(xi), e, c * &sign)
                })
                .collect();
            let mut acc: HashMap<Weight, BigInt> = HashMap::new();
            let Some(min_base) = base.iter().map(|b| b.0).min() else {
                return Ok(acc);
            };
            if min_base > b_max {
                return Ok(acc);
            }
            let series = truncated_series(
                &pol.vertex(p).positive_weights,
                xi,
                b_max - min_base,
                budget,
            )?;
            let mut work = 0usize;
            for (s_b, e_b, c_b) in &base {
                for (s, w, k) in &series {
                    if s_b + s > b_max {
                        break;
                    }
                    *acc.entry(e_b + w).or_default() += c_b * k;
                    work += 1;
                }
                if work > budget {
                    return Err(Error::TruncationOverflow { budget });
                }
            }
            acc.retain(|w, c| !c.is_zero() && in_box(w));
            Ok(acc)
        })
        .collect();

    let mut poly = LaurentPoly::zero(n);
    for c in contributions {
        for (w, k) in c? {
            poly.add_term(w, k);
        }
    }
    Ok(CharacterResult {
        poly,
        hull_vertices,
    })
}

/// `sum_{i < count} x^{i step}`.
fn geometric(step: &Weight, count: u64) -> LaurentPoly {
    let mut p = LaurentPoly::zero(step.dim());
    let mut e = Weight::zero(step.dim());
    for _ in 0..count {
        p.add_term(e.clone(), BigInt::one());
        e = &e + step;
    }
    p
}

/// Primitive direction with sign fixed so the first nonzero coordinate is
/// positive, and the signed multiplier.
fn direction(w: &Weight) -> (Weight, i64) {
    let (prim, m) = w.primitive_part().expect("axial weights are nonzero");
    let first = prim.0.iter().find(|&&c| c != 0).copied().unwrap_or(1);
    if first < 0 {
        (-&prim, -(m as i64))
    } else {
        (prim, m as i64)
    }
}

/// `chi(f)` without any polarization: bring every summand over the common
/// denominator `prod_j (1 - x^{M_j alpha_j})` (one factor per edge
/// direction, `M_j` the lcm of the multiples occurring), add numerators, and
/// divide the factors back out exactly.
pub fn character_oracle(f: &KClass) -> Result<LaurentPoly> {
    let action = f.action();
    let n = action.n();
    let mut dirs: BTreeMap<Weight, i64> = BTreeMap::new();
    for e in 0..action.num_edges() {
        let (d, m) = direction(action.axial(e));
        let entry = dirs.entry(d).or_insert(1);
        *entry = entry.lcm(&m.abs());
    }
    let mut g = LaurentPoly::zero(n);
    for p in action.vertices() {
        if f.value(p).is_zero() {
            continue;
        }
        let mut local: HashMap<Weight, i64> = HashMap::new();
        for &e in action.outgoing(p) {
            let (d, m) = direction(action.axial(e));
            local.insert(d, m);
        }
        let mut term = f.value(p).clone();
        for (d, &big) in &dirs {
            let factor = match local.get(d) {
                None => LaurentPoly::binomial(&d.scale(big)),
                Some(&m) if m > 0 => geometric(&d.scale(m), (big / m) as u64),
                Some(&m) => {
                    let step = d.scale(-m);
                    -&geometric(&step, (big / -m) as u64).shift(&step)
                }
            };
            term = &term * &factor;
        }
        g = &g + &term;
    }
    for (d, &big) in &dirs {
        let gamma = d.scale(big);
        g = divide_exact(&g, &gamma).map_err(|_| Error::InternalDivisionFailure {
            factor: gamma.0.clone(),
        })?;
    }
    Ok(g)
}

/// Numeric value of the localized sum at a torus point.
pub fn localized_sum_numeric(f: &KClass, g: &TorusPoint) -> Result<Complex64> {
    let mut total = Complex64::new(0.0, 0.0);
    for p in f.action().vertices() {
        total += f.summand(p).eval(g)?;
    }
    Ok(total)
}

/// Barycentric coordinates of `x` with respect to the points in `subset`, if
/// they are affinely independent and `x` lies in their affine span.
fn barycentric(x: &Weight, subset: &[&Weight]) -> Option<Vec<BigRational>> {
    let k = subset.len();
    let n = x.dim();
    let mut rows: Vec<Vec<BigRational>> = (0..=n)
        .map(|i| {
            let mut row: Vec<BigRational> = subset
                .iter()
                .map(|s| {
                    if i < n {
                        BigRational::from_integer(s.0[i].into())
                    } else {
                        BigRational::one()
                    }
                })
                .collect();
            row.push(if i < n {
                BigRational::from_integer(x.0[i].into())
            } else {
                BigRational::one()
            });
            row
        })
        .collect();
    for col in 0..k {
        let pivot = (col..rows.len()).find(|&i| !rows[i][col].is_zero())?;
        rows.swap(col, pivot);
        let inv = rows[col][col].recip();
        for v in rows[col].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..rows.len() {
            if i != col && !rows[i][col].is_zero() {
                let factor = rows[i][col].clone();
                for j in col..=k {
                    let delta = &factor * &rows[col][j];
                    rows[i][j] = &rows[i][j] - &delta;
                }
            }
        }
    }
    if rows[k..].iter().any(|row| !row[k].is_zero()) {
        return None;
    }
    Some(rows[..k].iter().map(|row| row[k].clone()).collect())
}

fn subsets_up_to(len: usize, max: usize, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
    fn rec(
        start: usize,
        len: usize,
        max: usize,
        cur: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]) -> bool,
    ) -> bool {
        if !cur.is_empty() && f(cur) {
            return true;
        }
        if cur.len() == max {
            return false;
        }
        for i in start..len {
            cur.push(i);
            if rec(i + 1, len, max, cur, f) {
                return true;
            }
            cur.pop();
        }
        false
    }
    rec(0, len, max, &mut Vec::new(), f)
}

/// Exact membership of `x` in the convex hull of `points`, by searching
/// affinely independent subsets of at most `n + 1` points for nonnegative
/// barycentric coordinates.
pub fn in_convex_hull(x: &Weight, points: &[Weight]) -> bool {
    let mut pts: Vec<&Weight> = points.iter().collect();
    pts.sort();
    pts.dedup();
    if pts.is_empty() {
        return false;
    }
    for i in 0..x.dim() {
        let lo = pts.iter().map(|p| p.0[i]).min().unwrap();
        let hi = pts.iter().map(|p| p.0[i]).max().unwrap();
        if x.0[i] < lo || x.0[i] > hi {
            return false;
        }
    }
    subsets_up_to(pts.len(), x.dim() + 1, &mut |idx| {
        let subset: Vec<&Weight> = idx.iter().map(|&i| pts[i]).collect();
        barycentric(x, &subset).is_some_and(|l| l.iter().all(|c| !c.is_negative()))
    })
}

/// The points of `points` that are vertices of their convex hull, sorted and
/// without repetition.
pub fn convex_hull_vertices(points: &[Weight]) -> Vec<Weight> {
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    (0..pts.len())
        .filter(|&i| {
            let others: Vec<Weight> = pts
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, p)| p.clone())
                .collect();
            !in_convex_hull(&pts[i], &others)
        })
        .map(|i| pts[i].clone())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HullReport {
    pub hull_vertices: Vec<Weight>,
    /// Support weights of the character lying outside the hull.
    pub outside: Vec<Weight>,
    /// Coefficient of the character at each hull vertex.
    pub vertex_coefficients: Vec<(Weight, BigInt)>,
}

impl HullReport {
    pub fn passed(&self) -> bool {
        self.outside.is_empty() && self.vertex_coefficients.iter().all(|(_, c)| c.is_one())
    }
}

pub fn hull_report(f: &SymplecticClass, character: &CharacterResult) -> HullReport {
    let hull_vertices = convex_hull_vertices(f.alphas());
    let outside = character
        .poly
        .support()
        .filter(|w| !in_convex_hull(w, &hull_vertices))
        .cloned()
        .collect();
    let vertex_coefficients = hull_vertices
        .iter()
        .map(|v| (v.clone(), character.poly.coeff(v)))
        .collect();
    HullReport {
        hull_vertices,
        outside,
        vertex_coefficients,
    }
}

/// Integer box `[lo_i, hi_i]` around a set of points, widened by `margin`.
pub fn bounding_box(points: &[Weight], margin: i64) -> Vec<(i64, i64)> {
    let n = points[0].dim();
    (0..n)
        .map(|i| {
            let lo = points.iter().map(|p| p.0[i]).min().unwrap();
            let hi = points.iter().map(|p| p.0[i]).max().unwrap();
            (lo - margin, hi + margin)
        })
        .collect()
}

/// Every lattice point of a box.
pub fn box_points(bounds: &[(i64, i64)]) -> Vec<Weight> {
    let mut out = vec![Vec::new()];
    for &(lo, hi) in bounds {
        out = out
            .into_iter()
            .flat_map(|v: Vec<i64>| {
                (lo..=hi).map(move |c| {
                    let mut w = v.clone();
                    w.push(c);
                    w
                })
            })
            .collect();
    }
    out.into_iter().map(Weight).collect()
}
