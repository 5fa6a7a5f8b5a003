//! Reduction at a circle: moment maps on the graph, crossing sets, reduced
//! characters as sums of vertex residues, wall crossing, and the comparison
//! of the reduced character with the invariant part of the full one.

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use crate::charring::{LaurentPoly, RationalChar, TorusPoint, SAMPLE_DENOMINATOR};
use crate::error::{Error, Result};
use crate::gkm::{EdgeId, GkmAction, KClass, SymplecticClass, VertexId};
use crate::lattice::{complete_to_basis, LatticeVector, Weight};
use crate::quantization::{character_expand, check_xi, polarize};
use crate::residue::{fiber_average_numeric, res_t, sample_avoiding};

/// Topological ranks (longest path from a source) of a digraph, or a
/// directed cycle as a vertex list.
pub fn longest_path_ranks(
    num_vertices: usize,
    arcs: &[(usize, usize)],
) -> std::result::Result<Vec<usize>, Vec<usize>> {
    let mut succ = vec![Vec::new(); num_vertices];
    let mut indeg = vec![0usize; num_vertices];
    for &(a, b) in arcs {
        succ[a].push(b);
        indeg[b] += 1;
    }
    let mut rank = vec![0usize; num_vertices];
    let mut queue: VecDeque<usize> = (0..num_vertices).filter(|&v| indeg[v] == 0).collect();
    let mut seen = 0;
    while let Some(v) = queue.pop_front() {
        seen += 1;
        for &w in &succ[v] {
            rank[w] = rank[w].max(rank[v] + 1);
            indeg[w] -= 1;
            if indeg[w] == 0 {
                queue.push_back(w);
            }
        }
    }
    if seen == num_vertices {
        return Ok(rank);
    }
    // every remaining vertex has a remaining predecessor; walk backwards
    let mut pred = vec![None; num_vertices];
    for &(a, b) in arcs {
        if indeg[a] > 0 && indeg[b] > 0 {
            pred[b] = Some(a);
        }
    }
    let mut v = (0..num_vertices).find(|&v| indeg[v] > 0).unwrap();
    let mut visited = vec![false; num_vertices];
    while !visited[v] {
        visited[v] = true;
        v = pred[v].unwrap();
    }
    let start = v;
    let mut cycle = vec![start];
    let mut u = pred[start].unwrap();
    while u != start {
        cycle.push(u);
        u = pred[u].unwrap();
    }
    cycle.reverse();
    Err(cycle)
}

/// A function on vertices increasing along every edge oriented by `xi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentMap {
    action: Arc<GkmAction>,
    xi: LatticeVector,
    phi: Vec<BigRational>,
}

impl MomentMap {
    /// Checks genericity of `xi`, the monotonicity condition on every edge
    /// and that all values are distinct.
    pub fn from_values(
        action: &Arc<GkmAction>,
        xi: &LatticeVector,
        phi: Vec<BigRational>,
    ) -> Result<Self> {
        check_xi(action, xi)?;
        if phi.len() != action.num_vertices() {
            return Err(Error::DimMismatch {
                expected: action.num_vertices(),
                got: phi.len(),
            });
        }
        for e in 0..action.num_edges() {
            let ed = action.edge(e);
            let rise = &phi[ed.target] - &phi[ed.source];
            let ok = if action.axial(e).pair(xi) > 0 {
                rise > BigRational::zero()
            } else {
                rise < BigRational::zero()
            };
            if !ok {
                return Err(Error::InvalidMomentMap {
                    edge: action.edge_label(e),
                    reason: format!(
                        "phi rises by {rise} while alpha(xi) = {}",
                        action.axial(e).pair(xi)
                    ),
                });
            }
        }
        for p in action.vertices() {
            for q in (p + 1)..action.num_vertices() {
                if phi[p] == phi[q] {
                    return Err(Error::InvalidMomentMap {
                        edge: format!("{}, {}", action.vertex_name(p), action.vertex_name(q)),
                        reason: format!("both vertices have phi = {}", phi[p]),
                    });
                }
            }
        }
        Ok(MomentMap {
            action: action.clone(),
            xi: xi.clone(),
            phi,
        })
    }

    /// `phi(p) = alpha_p(xi)`. Ties (possible only between non-adjacent
    /// vertices) are broken by adding `index / (2|V|)`, which keeps the
    /// sign of every nonzero value.
    pub fn symplectic(f: &SymplecticClass, xi: &LatticeVector) -> Result<Self> {
        let action = f.action();
        let values: Vec<i64> = f.alphas().iter().map(|a| a.pair(xi)).collect();
        let mut sorted = values.clone();
        sorted.sort_unstable();
        sorted.dedup();
        let tied = sorted.len() < values.len();
        let nv = action.num_vertices() as i64;
        let phi = values
            .iter()
            .enumerate()
            .map(|(p, &v)| {
                let base = BigRational::from_integer(v.into());
                if tied {
                    base + BigRational::new((p as i64).into(), (2 * nv).into())
                } else {
                    base
                }
            })
            .collect();
        Self::from_values(action, xi, phi)
    }

    pub fn action(&self) -> &Arc<GkmAction> {
        &self.action
    }

    pub fn xi(&self) -> &LatticeVector {
        &self.xi
    }

    pub fn phi(&self, p: VertexId) -> &BigRational {
        &self.phi[p]
    }

    pub fn values(&self) -> &[BigRational] {
        &self.phi
    }

    /// Critical values in increasing order.
    pub fn critical_values(&self) -> Vec<BigRational> {
        let mut v = self.phi.clone();
        v.sort();
        v
    }

    pub fn check_regular(&self, c: &BigRational) -> Result<()> {
        match self.phi.iter().position(|v| v == c) {
            Some(p) => Err(Error::NotRegular {
                vertex: self.action.vertex_name(p).to_string(),
                value: c.to_string(),
            }),
            None => Ok(()),
        }
    }

    /// One regular value below all critical values, one between each
    /// consecutive pair, and one above.
    pub fn chamber_representatives(&self) -> Vec<BigRational> {
        let crit = self.critical_values();
        let mut out = vec![&crit[0] - BigRational::one()];
        for w in crit.windows(2) {
            out.push((&w[0] + &w[1]) / BigRational::from_integer(2.into()));
        }
        out.push(crit.last().unwrap() + BigRational::one());
        out
    }
}

/// Longest-path ranks along the `xi`-orientation, perturbed by
/// `index / (2|V|)` so that all values are distinct.
pub fn moment_map(action: &Arc<GkmAction>, xi: &LatticeVector) -> Result<MomentMap> {
    check_xi(action, xi)?;
    let arcs: Vec<(usize, usize)> = action
        .geometric_edges()
        .map(|e| {
            let ed = action.edge(e);
            if action.axial(e).pair(xi) > 0 {
                (ed.source, ed.target)
            } else {
                (ed.target, ed.source)
            }
        })
        .collect();
    let ranks =
        longest_path_ranks(action.num_vertices(), &arcs).map_err(|cycle| Error::CycleError {
            cycle: cycle
                .iter()
                .map(|&p| action.vertex_name(p).to_string())
                .collect(),
        })?;
    let nv = action.num_vertices() as i64;
    let phi = ranks
        .iter()
        .enumerate()
        .map(|(p, &r)| {
            BigRational::from_integer((r as i64).into())
                + BigRational::new((p as i64).into(), (2 * nv).into())
        })
        .collect();
    MomentMap::from_values(action, xi, phi)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossingSet {
    pub c: BigRational,
    /// Oriented edges `e` with `phi(i(e)) < c < phi(t(e))`.
    pub edges: Vec<EdgeId>,
}

pub fn crossing_set(m: &MomentMap, c: &BigRational) -> Result<CrossingSet> {
    m.check_regular(c)?;
    let edges = (0..m.action.num_edges())
        .filter(|&e| {
            let ed = m.action.edge(e);
            m.phi[ed.source] < *c && *c < m.phi[ed.target]
        })
        .collect();
    Ok(CrossingSet {
        c: c.clone(),
        edges,
    })
}

fn check_class(f: &KClass, m: &MomentMap) -> Result<()> {
    if f.action().as_ref() != m.action.as_ref() {
        return Err(Error::Parse(
            "class and moment map live on different graphs".into(),
        ));
    }
    Ok(())
}

/// `chi_c(f) = sum_{phi(p) > c} Res_T f_p^#`, a character trivial on the
/// circle generated by `xi`.
pub fn chi_reduced(f: &KClass, m: &MomentMap, c: &BigRational) -> Result<LaurentPoly> {
    check_class(f, m)?;
    m.check_regular(c)?;
    let mut total = LaurentPoly::zero(m.action.n());
    for p in m.action.vertices() {
        if m.phi[p] > *c {
            total = &total + &res_t(&f.summand(p), &m.xi)?.total;
        }
    }
    Ok(total)
}

/// Random quotient point at which every crossing-edge fiber average is
/// well away from poles.
pub fn sample_crossing_point<R: Rng + ?Sized>(
    rng: &mut R,
    f: &KClass,
    crossing: &CrossingSet,
    xi: &LatticeVector,
) -> Result<TorusPoint> {
    let action = f.action();
    let constraints: Vec<(Weight, Vec<Weight>)> = crossing
        .edges
        .iter()
        .map(|&e| {
            (
                action.axial(e).clone(),
                f.edge_summand(e).denominator().to_vec(),
            )
        })
        .collect();
    sample_avoiding(rng, xi, &constraints, 1e-3, 10_000)
}

/// `chi_c(f)` at a quotient point, computed edge by edge as
/// `sum_{e in V_c}` (fiber average of `f_hat_e` over `G_e`).
pub fn chi_reduced_numeric(
    f: &KClass,
    m: &MomentMap,
    c: &BigRational,
    g_bar: &TorusPoint,
) -> Result<Complex64> {
    check_class(f, m)?;
    let crossing = crossing_set(m, c)?;
    let mut total = Complex64::new(0.0, 0.0);
    for &e in &crossing.edges {
        total += fiber_average_numeric(&f.edge_summand(e), f.action().axial(e), &m.xi, g_bar)?;
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WallCrossing {
    pub vertex: VertexId,
    /// `chi_c - chi_{c'}` for `c < c'`.
    pub difference: LaurentPoly,
    /// `Res_T f_p^#` at the vertex between the two levels.
    pub residue: LaurentPoly,
}

impl WallCrossing {
    pub fn passed(&self) -> bool {
        self.difference == self.residue
    }
}

pub fn wall_crossing_check(
    f: &KClass,
    m: &MomentMap,
    c: &BigRational,
    c2: &BigRational,
) -> Result<WallCrossing> {
    check_class(f, m)?;
    let (lo, hi) = if c <= c2 { (c, c2) } else { (c2, c) };
    m.check_regular(lo)?;
    m.check_regular(hi)?;
    let between: Vec<VertexId> = m
        .action
        .vertices()
        .filter(|&p| *lo < m.phi[p] && m.phi[p] < *hi)
        .collect();
    if between.len() != 1 {
        return Err(Error::WrongWallCount {
            count: between.len(),
        });
    }
    let p = between[0];
    let difference = &chi_reduced(f, m, lo)? - &chi_reduced(f, m, hi)?;
    let residue = res_t(&f.summand(p), &m.xi)?.total;
    Ok(WallCrossing {
        vertex: p,
        difference,
        residue,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeCompatReport {
    pub edge: EdgeId,
    pub samples: usize,
    pub max_deviation: f64,
}

impl EdgeCompatReport {
    pub fn passed(&self) -> bool {
        self.max_deviation < 1e-6
    }
}

/// A random point of `G_alpha = {g : alpha(g) in Z}` keeping the given
/// factors away from their poles.
fn sample_on_kernel<R: Rng + ?Sized>(
    rng: &mut R,
    alpha: &Weight,
    avoid: &[Weight],
    max_attempts: usize,
) -> Result<TorusPoint> {
    let n = alpha.dim();
    let i0 = alpha
        .0
        .iter()
        .position(|&c| c != 0)
        .ok_or(Error::ZeroWeight)?;
    for _ in 0..max_attempts {
        let g = TorusPoint::random(rng, n, SAMPLE_DENOMINATOR);
        let mut angles = g.angles();
        let phase = g.phase(alpha);
        angles[i0] = &angles[i0] - phase / BigRational::from_integer(alpha.0[i0].into());
        let h = TorusPoint::new(&angles);
        debug_assert!(h.pairing_is_integral(alpha));
        if h.avoids(avoid, 0.05) {
            return Ok(h);
        }
    }
    Err(Error::PoleAtPoint(alpha.0.clone()))
}

/// Evaluates `f_hat_e` and `f_hat_ebar` at random points of `G_e` and
/// records the largest discrepancy.
pub fn edge_compat_check<R: Rng + ?Sized>(
    f: &KClass,
    e: EdgeId,
    samples: usize,
    rng: &mut R,
) -> Result<EdgeCompatReport> {
    let action = f.action();
    let bar = action.edge(e).bar;
    let here: RationalChar = f.edge_summand(e);
    let there: RationalChar = f.edge_summand(bar);
    let mut avoid = here.denominator().to_vec();
    avoid.extend_from_slice(there.denominator());
    let mut max_deviation = 0.0f64;
    for _ in 0..samples {
        let g = sample_on_kernel(rng, action.axial(e), &avoid, 10_000)?;
        let d = (here.eval(&g)? - there.eval(&g)?).norm();
        max_deviation = max_deviation.max(d);
    }
    Ok(EdgeCompatReport {
        edge: e,
        samples,
        max_deviation,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QrReport {
    pub character: LaurentPoly,
    pub invariant: LaurentPoly,
    pub reduced: LaurentPoly,
}

impl QrReport {
    pub fn passed(&self) -> bool {
        self.invariant == self.reduced
    }
}

impl fmt::Display for QrReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            write!(f, "PASS  chi_red = {}", self.reduced)
        } else {
            write!(
                f,
                "FAIL  invariant part = {}  chi_red = {}",
                self.invariant, self.reduced
            )
        }
    }
}

/// Compares the `xi`-invariant part of `chi(f)` with the reduced character
/// at level zero for the moment map `p -> alpha_p(xi)`.
pub fn qr_check(f: &SymplecticClass, xi: &LatticeVector) -> Result<QrReport> {
    let action = f.action();
    check_xi(action, xi)?;
    if let Some(p) = action.vertices().find(|&p| f.alpha(p).pair(xi) == 0) {
        return Err(Error::ZeroNotRegular {
            vertex: action.vertex_name(p).to_string(),
        });
    }
    let pol = polarize(action, xi)?;
    let character = character_expand(f.class(), &pol)?.poly;
    let invariant = character.invariant_part(xi);
    let m = MomentMap::symplectic(f, xi)?;
    let reduced = chi_reduced(f.class(), &m, &BigRational::zero())?;
    Ok(QrReport {
        character,
        invariant,
        reduced,
    })
}

/// Residue totals at every vertex (their sum is zero).
pub fn vertex_residues(f: &KClass, xi: &LatticeVector) -> Result<Vec<LaurentPoly>> {
    check_xi(f.action(), xi)?;
    complete_to_basis(xi)?;
    f.action()
        .vertices()
        .map(|p| res_t(&f.summand(p), xi).map(|r| r.total))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{
        all_weights, cp1_fixture, gen_projective, random_generic_xi, standard_examples,
    };
    use crate::lattice::Weight;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn xi(v: &[i64]) -> LatticeVector {
        LatticeVector(v.to_vec())
    }

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn cp1_moment_maps() {
        let (action, class) = cp1_fixture();
        let m = moment_map(&action, &xi(&[1, 0])).unwrap();
        assert_eq!(m.values(), &[q(0, 1), q(5, 4)]);
        assert!(m.phi(0) < m.phi(1));
        let s = MomentMap::symplectic(&class, &xi(&[1, 0])).unwrap();
        assert_eq!(s.values(), &[q(-1, 1), q(1, 1)]);
        assert!(MomentMap::from_values(&action, &xi(&[1, 0]), vec![q(1, 1), q(0, 1)]).is_err());
    }

    #[test]
    fn cycle_detection() {
        let err = longest_path_ranks(3, &[(0, 1), (1, 2), (2, 0)]).unwrap_err();
        assert_eq!(err.len(), 3);
        let err = longest_path_ranks(5, &[(0, 1), (1, 2), (2, 3), (3, 1), (4, 0)]).unwrap_err();
        let mut sorted = err.clone();
        sorted.sort();
        assert_eq!(sorted, vec![1, 2, 3]);
        assert_eq!(
            longest_path_ranks(3, &[(0, 1), (1, 2), (0, 2)]).unwrap(),
            vec![0, 1, 2]
        );
    }

    #[test]
    fn crossing_sets() {
        let (action, class) = cp1_fixture();
        let m = MomentMap::symplectic(&class, &xi(&[1, 0])).unwrap();
        assert_eq!(crossing_set(&m, &q(0, 1)).unwrap().edges, vec![0]);
        assert!(crossing_set(&m, &q(-5, 1)).unwrap().edges.is_empty());
        assert!(matches!(
            crossing_set(&m, &q(1, 1)),
            Err(Error::NotRegular { .. })
        ));
        let _ = action;

        let (p2, _) = gen_projective(2);
        let m = moment_map(&p2, &xi(&[1, 2])).unwrap();
        let crit = m.critical_values();
        let c = (&crit[0] + &crit[1]) / q(2, 1);
        let cs = crossing_set(&m, &c).unwrap();
        let bottom = (0..3).find(|&p| *m.phi(p) == crit[0]).unwrap();
        assert_eq!(cs.edges.len(), 2);
        assert!(cs.edges.iter().all(|&e| p2.edge(e).source == bottom));
    }

    #[test]
    fn cp1_reduced_characters() {
        let (_, class) = cp1_fixture();
        let m = MomentMap::symplectic(&class, &xi(&[1, 0])).unwrap();
        let f = class.class();
        assert_eq!(chi_reduced(f, &m, &q(0, 1)).unwrap(), LaurentPoly::one(2));
        assert!(chi_reduced(f, &m, &q(3, 1)).unwrap().is_zero());
        assert!(chi_reduced(f, &m, &q(-3, 1)).unwrap().is_zero());
        let wc = wall_crossing_check(f, &m, &q(0, 1), &q(2, 1)).unwrap();
        assert!(wc.passed());
        assert_eq!(wc.residue, LaurentPoly::one(2));
        assert!(matches!(
            wall_crossing_check(f, &m, &q(0, 1), &q(1, 2)),
            Err(Error::WrongWallCount { count: 0 })
        ));
    }

    #[test]
    fn projective_wall_crossing() {
        let (action, class) = gen_projective(2);
        let m = moment_map(&action, &xi(&[1, 2])).unwrap();
        let reps = m.chamber_representatives();
        for c in reps.windows(2) {
            assert!(wall_crossing_check(class.class(), &m, &c[0], &c[1])
                .unwrap()
                .passed());
        }
    }

    #[test]
    fn qr_examples() {
        let (_, class) = cp1_fixture();
        let r = qr_check(&class, &xi(&[1, 0])).unwrap();
        assert!(r.passed());
        assert_eq!(r.to_string(), "PASS  chi_red = 1");

        let (_, p2) = gen_projective(2);
        assert!(matches!(
            qr_check(&p2, &xi(&[1, 2])),
            Err(Error::ZeroNotRegular { .. })
        ));
        let shifted = p2.shifted(&Weight(vec![1, 1]));
        assert!(matches!(
            qr_check(&shifted, &xi(&[1, -1])),
            Err(Error::ZeroNotRegular { .. })
        ));

        // alpha_{P_k} = 2 eps_k - (1, 0): pairings -1, 1, -3 against (1, -1)
        let moved = p2
            .class()
            .mul(p2.class())
            .scale(&LaurentPoly::x(Weight(vec![-1, 0])));
        let moved = crate::gkm::as_symplectic(&moved).unwrap();
        let r = qr_check(&moved, &xi(&[1, -1])).unwrap();
        assert!(r.passed(), "{r}");
        assert_eq!(r.reduced, LaurentPoly::one(2));
    }

    #[test]
    fn edge_compatibility() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (_, class) = cp1_fixture();
        assert!(edge_compat_check(class.class(), 0, 10, &mut rng)
            .unwrap()
            .passed());
        let (p2, _) = gen_projective(2);
        let one = KClass::constant(&p2, &LaurentPoly::one(2));
        for e in 0..p2.num_edges() {
            assert!(edge_compat_check(&one, e, 10, &mut rng).unwrap().passed());
        }
        let bad = class
            .class()
            .with_value_unchecked(1, LaurentPoly::x(Weight(vec![0, 1])));
        assert!(!edge_compat_check(&bad, 0, 10, &mut rng).unwrap().passed());
    }

    #[test]
    fn symplectic_values_are_moment_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for ex in standard_examples() {
            for _ in 0..5 {
                let s = ex.random_symplectic(&mut rng);
                let x = random_generic_xi(&mut rng, ex.n(), &all_weights(&ex.action), 3);
                assert!(MomentMap::symplectic(&s, &x).is_ok(), "{}", ex.name);
            }
        }
    }

    #[test]
    fn chambers_and_numeric_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for ex in standard_examples() {
            let x = random_generic_xi(&mut rng, ex.n(), &all_weights(&ex.action), 3);
            let m = moment_map(&ex.action, &x).unwrap();
            let f = ex.random_class(&mut rng);
            let reps = m.chamber_representatives();
            let values: Vec<LaurentPoly> = reps
                .iter()
                .map(|c| chi_reduced(&f, &m, c).unwrap())
                .collect();
            assert!(
                values[0].is_zero() && values.last().unwrap().is_zero(),
                "{}",
                ex.name
            );
            for (c, v) in reps.iter().zip(&values).skip(1).take(reps.len() - 2) {
                let cs = crossing_set(&m, c).unwrap();
                let g_bar = sample_crossing_point(&mut rng, &f, &cs, &x).unwrap();
                let exact = crate::residue::eval_on_quotient(v, &x, &g_bar).unwrap();
                let numeric = chi_reduced_numeric(&f, &m, c, &g_bar).unwrap();
                assert!(
                    (exact - numeric).norm() < 1e-6,
                    "{}: {exact} vs {numeric}",
                    ex.name
                );
                // a nearby level in the same chamber gives the same value
                let nearby = c + q(1, 1000 * ex.action.num_vertices() as i64);
                assert_eq!(&chi_reduced(&f, &m, &nearby).unwrap(), v);
            }
        }
    }
}
