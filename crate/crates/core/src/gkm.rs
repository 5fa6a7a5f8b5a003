//! Torus actions on graphs: oriented edges with a reversal involution and an
//! axial function `e -> alpha_e`, plus the K-classes living on them.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::Serialize;

use crate::charring::{congruent_mod_edge, LaurentPoly, RationalChar};
use crate::error::{Error, Result};
use crate::lattice::{LatticeVector, Weight};

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ViolationCode {
    /// Edge reversal is not a fixed-point-free involution swapping endpoints.
    Involution,
    /// Vertices with differing numbers of outgoing edges.
    Valence,
    /// `alpha` of the reversed edge is not `-alpha`.
    Orient,
    /// Two weights at a vertex are linearly dependent (or a weight is zero).
    Gkm,
    /// Isotropy weights at the two ends of an edge (or class values) disagree
    /// modulo the edge weight.
    Compat,
    /// `alpha_q - alpha_p` is not an integer multiple of `alpha_e`.
    NotMultiple,
    /// `alpha_q - alpha_p = m alpha_e` with `m <= 0`.
    NonPositive,
    /// A weight or exponent vector has the wrong length.
    Dim,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::Involution => "E_INVOLUTION",
            ViolationCode::Valence => "E_VALENCE",
            ViolationCode::Orient => "E_ORIENT",
            ViolationCode::Gkm => "E_GKM",
            ViolationCode::Compat => "E_COMPAT",
            ViolationCode::NotMultiple => "E_NOT_MULTIPLE",
            ViolationCode::NonPositive => "E_NONPOSITIVE",
            ViolationCode::Dim => "E_DIM",
        }
    }

    /// The axiom or definition that the violation breaks.
    pub fn axiom(self) -> &'static str {
        match self {
            ViolationCode::Involution => {
                "edge reversal e -> e-bar is an involution with i(e-bar) = t(e)"
            }
            ViolationCode::Valence => {
                "every vertex carries d isotropy weights (tau_p is a sum of d characters)"
            }
            ViolationCode::Orient => {
                "rho of the reversed edge is the dual character: alpha(e-bar) = -alpha(e)"
            }
            ViolationCode::Gkm => {
                "GKM condition: weights at a vertex are pairwise linearly independent"
            }
            ViolationCode::Compat => "restrictions to the kernel G_e agree at both ends of e",
            ViolationCode::NotMultiple => "symplectic class: alpha_q - alpha_p = m_e alpha_e",
            ViolationCode::NonPositive => "symplectic class: m_e > 0",
            ViolationCode::Dim => "weights live in Z^n",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub location: String,
    pub detail: String,
}

impl Violation {
    fn new(code: ViolationCode, location: impl Into<String>, detail: impl Into<String>) -> Self {
        Violation {
            code,
            location: location.into(),
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} at {}: {} [{}]",
            self.code.as_str(),
            self.location,
            self.detail,
            self.code.axiom()
        )
    }
}

impl From<Vec<Violation>> for Error {
    fn from(v: Vec<Violation>) -> Self {
        Error::Invalid(v)
    }
}

/// Unvalidated graph data: oriented edges with explicit reversal indices.
#[derive(Clone, Debug, Default)]
pub struct RawAction {
    pub n: usize,
    pub vertices: Vec<String>,
    pub edges: Vec<RawEdge>,
}

#[derive(Clone, Debug)]
pub struct RawEdge {
    pub source: VertexId,
    pub target: VertexId,
    pub bar: EdgeId,
    pub alpha: Vec<i64>,
}

impl RawAction {
    /// Builds the oriented edge list from one representative per geometric
    /// edge; the reverse edge gets `-alpha`. Edge `2k` is the given edge and
    /// `2k + 1` its reversal.
    pub fn from_geometric(
        n: usize,
        vertices: Vec<String>,
        edges: impl IntoIterator<Item = (VertexId, VertexId, Vec<i64>)>,
    ) -> Self {
        let mut out = Vec::new();
        for (s, t, alpha) in edges {
            let k = out.len();
            let neg = alpha.iter().map(|c| -c).collect();
            out.push(RawEdge {
                source: s,
                target: t,
                bar: k + 1,
                alpha,
            });
            out.push(RawEdge {
                source: t,
                target: s,
                bar: k,
                alpha: neg,
            });
        }
        RawAction {
            n,
            vertices,
            edges: out,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub source: VertexId,
    pub target: VertexId,
    pub bar: EdgeId,
}

/// A validated GKM action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GkmAction {
    n: usize,
    valence: usize,
    vertices: Vec<String>,
    edges: Vec<Edge>,
    axial: Vec<Weight>,
    outgoing: Vec<Vec<EdgeId>>,
}

impl GkmAction {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn valence(&self) -> usize {
        self.valence
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        0..self.vertices.len()
    }

    pub fn vertex_name(&self, p: VertexId) -> &str {
        &self.vertices[p]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_index(&self, name: &str) -> Option<VertexId> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn edge(&self, e: EdgeId) -> Edge {
        self.edges[e]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn axial(&self, e: EdgeId) -> &Weight {
        &self.axial[e]
    }

    pub fn outgoing(&self, p: VertexId) -> &[EdgeId] {
        &self.outgoing[p]
    }

    /// Weights of the isotropy representation at `p`.
    pub fn weights_at(&self, p: VertexId) -> Vec<Weight> {
        self.outgoing[p]
            .iter()
            .map(|&e| self.axial[e].clone())
            .collect()
    }

    /// One representative per geometric edge.
    pub fn geometric_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edges.len()).filter(|&e| e < self.edges[e].bar)
    }

    pub fn edge_label(&self, e: EdgeId) -> String {
        let ed = self.edges[e];
        format!("{}->{}", self.vertices[ed.source], self.vertices[ed.target])
    }

    /// Every edge weight pairs nontrivially with `xi`.
    pub fn check_generic(&self, xi: &LatticeVector) -> Result<()> {
        if xi.dim() != self.n {
            return Err(Error::DimMismatch {
                expected: self.n,
                got: xi.dim(),
            });
        }
        for e in 0..self.edges.len() {
            if self.axial[e].pair(xi) == 0 {
                return Err(Error::NotGeneric {
                    what: format!("edge {}", self.edge_label(e)),
                    weight: self.axial[e].0.clone(),
                });
            }
        }
        Ok(())
    }

    /// Applies a linear map `alpha -> A alpha` to every weight.
    pub fn transform(&self, a: &[Vec<i64>]) -> GkmAction {
        let mut out = self.clone();
        for w in out.axial.iter_mut() {
            *w = apply_matrix(a, w);
        }
        out
    }
}

pub(crate) fn apply_matrix(a: &[Vec<i64>], w: &Weight) -> Weight {
    Weight(
        a.iter()
            .map(|row| row.iter().zip(&w.0).map(|(x, y)| x * y).sum())
            .collect(),
    )
}

/// Checks the action axioms and the GKM condition, returning every violation.
pub fn validate_action(raw: &RawAction) -> std::result::Result<GkmAction, Vec<Violation>> {
    use ViolationCode::*;
    let nv = raw.vertices.len();
    let ne = raw.edges.len();
    let mut violations = Vec::new();

    let label = |e: usize| {
        let ed = &raw.edges[e];
        let name = |v: usize| {
            raw.vertices
                .get(v)
                .cloned()
                .unwrap_or_else(|| format!("#{v}"))
        };
        format!("edge {e} ({}->{})", name(ed.source), name(ed.target))
    };

    for (e, ed) in raw.edges.iter().enumerate() {
        if ed.alpha.len() != raw.n {
            violations.push(Violation::new(
                Dim,
                label(e),
                format!(
                    "weight has {} coordinates, torus has dimension {}",
                    ed.alpha.len(),
                    raw.n
                ),
            ));
        }
        if ed.source >= nv || ed.target >= nv {
            violations.push(Violation::new(
                Involution,
                label(e),
                "endpoint is not a vertex",
            ));
        }
    }
    if !violations.is_empty() {
        return Err(violations);
    }

    for (e, ed) in raw.edges.iter().enumerate() {
        if ed.bar >= ne {
            violations.push(Violation::new(
                Involution,
                label(e),
                "reversal index out of range",
            ));
            continue;
        }
        let b = &raw.edges[ed.bar];
        if ed.bar == e {
            violations.push(Violation::new(
                Involution,
                label(e),
                "edge is its own reversal",
            ));
        } else if b.bar != e {
            violations.push(Violation::new(
                Involution,
                label(e),
                format!("reversal of reversal is edge {}", b.bar),
            ));
        } else if b.source != ed.target || b.target != ed.source {
            violations.push(Violation::new(
                Involution,
                label(e),
                format!("reversed edge {} does not swap the endpoints", ed.bar),
            ));
        }
    }
    if !violations.is_empty() {
        return Err(violations);
    }

    let mut outgoing = vec![Vec::new(); nv];
    for (e, ed) in raw.edges.iter().enumerate() {
        outgoing[ed.source].push(e);
    }
    let valence = outgoing.first().map(Vec::len).unwrap_or(0);
    for (p, out) in outgoing.iter().enumerate() {
        if out.len() != valence {
            violations.push(Violation::new(
                Valence,
                format!("vertex {}", raw.vertices[p]),
                format!("{} outgoing edges, expected {valence}", out.len()),
            ));
        }
    }
    if !violations.is_empty() {
        return Err(violations);
    }

    let axial: Vec<Weight> = raw
        .edges
        .iter()
        .map(|ed| Weight(ed.alpha.clone()))
        .collect();
    for (e, ed) in raw.edges.iter().enumerate() {
        if e < ed.bar && axial[ed.bar] != -&axial[e] {
            violations.push(Violation::new(
                Orient,
                label(e),
                format!(
                    "alpha = {}, alpha of reversal = {}",
                    axial[e], axial[ed.bar]
                ),
            ));
        }
    }

    let mut gkm_ok = true;
    for (p, out) in outgoing.iter().enumerate() {
        for (i, &e1) in out.iter().enumerate() {
            if axial[e1].is_zero() {
                gkm_ok = false;
                violations.push(Violation::new(
                    Gkm,
                    format!("vertex {}", raw.vertices[p]),
                    format!("{} has zero weight", label(e1)),
                ));
                continue;
            }
            for &e2 in &out[i + 1..] {
                if axial[e1].is_parallel(&axial[e2]) {
                    gkm_ok = false;
                    violations.push(Violation::new(
                        Gkm,
                        format!("vertex {}", raw.vertices[p]),
                        format!(
                            "{} and {} carry proportional weights {} and {}",
                            label(e1),
                            label(e2),
                            axial[e1],
                            axial[e2]
                        ),
                    ));
                }
            }
        }
    }

    if gkm_ok {
        for (e, ed) in raw.edges.iter().enumerate() {
            if e > ed.bar {
                continue;
            }
            let gamma = &axial[e];
            let residues = |p: usize| -> Vec<Weight> {
                let mut r: Vec<Weight> = outgoing[p]
                    .iter()
                    .map(|&f| axial[f].coset_position(gamma).expect("nonzero").0)
                    .collect();
                r.sort();
                r
            };
            let (rp, rq) = (residues(ed.source), residues(ed.target));
            if rp != rq {
                violations.push(Violation::new(
                    Compat,
                    label(e),
                    format!(
                        "weights at the two ends do not match modulo Z{}: {:?} vs {:?}",
                        gamma,
                        rp.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
                        rq.iter().map(|w| w.to_string()).collect::<Vec<_>>()
                    ),
                ));
            }
        }
    }

    if !violations.is_empty() {
        return Err(violations);
    }
    Ok(GkmAction {
        n: raw.n,
        valence,
        vertices: raw.vertices.clone(),
        edges: raw
            .edges
            .iter()
            .map(|ed| Edge {
                source: ed.source,
                target: ed.target,
                bar: ed.bar,
            })
            .collect(),
        axial,
        outgoing,
    })
}

/// An element of `K_G(Γ)`: one character per vertex, compatible along edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KClass {
    action: Arc<GkmAction>,
    values: Vec<LaurentPoly>,
}

impl KClass {
    pub fn action(&self) -> &Arc<GkmAction> {
        &self.action
    }

    pub fn values(&self) -> &[LaurentPoly] {
        &self.values
    }

    pub fn value(&self, p: VertexId) -> &LaurentPoly {
        &self.values[p]
    }

    pub fn constant(action: &Arc<GkmAction>, c: &LaurentPoly) -> KClass {
        KClass {
            action: action.clone(),
            values: vec![c.clone(); action.num_vertices()],
        }
    }

    pub fn zero(action: &Arc<GkmAction>) -> KClass {
        Self::constant(action, &LaurentPoly::zero(action.n()))
    }

    fn zip_with(
        &self,
        other: &KClass,
        f: impl Fn(&LaurentPoly, &LaurentPoly) -> LaurentPoly,
    ) -> KClass {
        assert!(Arc::ptr_eq(&self.action, &other.action) || self.action == other.action);
        KClass {
            action: self.action.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    pub fn add(&self, other: &KClass) -> KClass {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn mul(&self, other: &KClass) -> KClass {
        self.zip_with(other, |a, b| a * b)
    }

    /// Multiplication by an element of `R(G)` (a constant class).
    pub fn scale(&self, c: &LaurentPoly) -> KClass {
        KClass {
            action: self.action.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// `f_p / prod_{i(e) = p} (1 - x^{alpha_e})`, the summand at `p`.
    pub fn summand(&self, p: VertexId) -> RationalChar {
        RationalChar::new(self.values[p].clone(), self.action.weights_at(p))
            .expect("validated weights are nonzero")
    }

    /// `f_p / prod (1 - x^{alpha_e'})` over `e' != e` leaving `p = i(e)`.
    pub fn edge_summand(&self, e: EdgeId) -> RationalChar {
        let p = self.action.edge(e).source;
        let denominator = self
            .action
            .outgoing(p)
            .iter()
            .filter(|&&f| f != e)
            .map(|&f| self.action.axial(f).clone())
            .collect();
        RationalChar::new(self.values[p].clone(), denominator)
            .expect("validated weights are nonzero")
    }

    /// Replaces one value without re-validating (used to build corrupted
    /// fixtures for negative tests).
    pub fn with_value_unchecked(&self, p: VertexId, value: LaurentPoly) -> KClass {
        let mut out = self.clone();
        out.values[p] = value;
        out
    }
}

/// Checks `f_{i(e)} ≡ f_{t(e)} (mod 1 - x^{alpha_e})` on every edge.
pub fn validate_class(
    action: &Arc<GkmAction>,
    values: Vec<LaurentPoly>,
) -> std::result::Result<KClass, Vec<Violation>> {
    let mut violations = Vec::new();
    if values.len() != action.num_vertices() {
        violations.push(Violation::new(
            ViolationCode::Dim,
            "class",
            format!(
                "{} values for {} vertices",
                values.len(),
                action.num_vertices()
            ),
        ));
        return Err(violations);
    }
    for (p, v) in values.iter().enumerate() {
        if v.dim() != action.n() {
            violations.push(Violation::new(
                ViolationCode::Dim,
                format!("vertex {}", action.vertex_name(p)),
                format!(
                    "value has {} variables, torus has dimension {}",
                    v.dim(),
                    action.n()
                ),
            ));
        }
    }
    if !violations.is_empty() {
        return Err(violations);
    }
    for e in action.geometric_edges() {
        let ed = action.edge(e);
        let ok = congruent_mod_edge(&values[ed.source], &values[ed.target], action.axial(e))
            .expect("validated weights are nonzero");
        if !ok {
            violations.push(Violation::new(
                ViolationCode::Compat,
                format!("edge {}", action.edge_label(e)),
                format!(
                    "{} and {} differ modulo 1 - x^{}",
                    values[ed.source],
                    values[ed.target],
                    action.axial(e)
                ),
            ));
        }
    }
    if !violations.is_empty() {
        return Err(violations);
    }
    Ok(KClass {
        action: action.clone(),
        values,
    })
}

/// A monomial class `f_p = x^{alpha_p}` with `alpha_q - alpha_p = m_e alpha_e`, `m_e > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymplecticClass {
    class: KClass,
    alphas: Vec<Weight>,
    multipliers: Vec<i64>,
}

impl SymplecticClass {
    pub fn class(&self) -> &KClass {
        &self.class
    }

    pub fn action(&self) -> &Arc<GkmAction> {
        self.class.action()
    }

    pub fn alphas(&self) -> &[Weight] {
        &self.alphas
    }

    pub fn alpha(&self, p: VertexId) -> &Weight {
        &self.alphas[p]
    }

    /// `m_e` for every oriented edge.
    pub fn multipliers(&self) -> &[i64] {
        &self.multipliers
    }

    /// Translates every `alpha_p` by the same weight (multiplication by a character).
    pub fn shifted(&self, shift: &Weight) -> SymplecticClass {
        let alphas: Vec<Weight> = self.alphas.iter().map(|a| a + shift).collect();
        symplectic_class(self.action(), alphas)
            .expect("translation preserves the symplectic condition")
    }
}

/// Multiplier `m` with `diff = m * alpha`, if any.
fn integer_multiple(diff: &Weight, alpha: &Weight) -> Option<i64> {
    let i0 = alpha.0.iter().position(|&c| c != 0)?;
    if diff.0[i0] % alpha.0[i0] != 0 {
        return None;
    }
    let m = diff.0[i0] / alpha.0[i0];
    (alpha.scale(m) == *diff).then_some(m)
}

/// The monomial class `p -> x^{alpha_p}`; valid whenever consecutive
/// differences are integer multiples of the edge weights (any sign).
pub fn monomial_class(
    action: &Arc<GkmAction>,
    alphas: &[Weight],
) -> std::result::Result<KClass, Vec<Violation>> {
    validate_class(action, alphas.iter().cloned().map(LaurentPoly::x).collect())
}

pub fn symplectic_class(
    action: &Arc<GkmAction>,
    alphas: Vec<Weight>,
) -> std::result::Result<SymplecticClass, Vec<Violation>> {
    let mut violations = Vec::new();
    if alphas.len() != action.num_vertices() || alphas.iter().any(|a| a.dim() != action.n()) {
        violations.push(Violation::new(
            ViolationCode::Dim,
            "class",
            "one weight of dimension n per vertex expected",
        ));
        return Err(violations);
    }
    let mut multipliers = vec![0; action.num_edges()];
    for e in 0..action.num_edges() {
        let ed = action.edge(e);
        let diff = &alphas[ed.target] - &alphas[ed.source];
        match integer_multiple(&diff, action.axial(e)) {
            None => {
                if e < ed.bar {
                    violations.push(Violation::new(
                        ViolationCode::NotMultiple,
                        format!("edge {}", action.edge_label(e)),
                        format!("difference {diff} is not a multiple of {}", action.axial(e)),
                    ));
                }
            }
            Some(m) if m <= 0 => {
                violations.push(Violation::new(
                    ViolationCode::NonPositive,
                    format!("edge {}", action.edge_label(e)),
                    format!("m_e = {m}"),
                ));
            }
            Some(m) => multipliers[e] = m,
        }
    }
    if !violations.is_empty() {
        return Err(violations);
    }
    let class = monomial_class(action, &alphas)?;
    Ok(SymplecticClass {
        class,
        alphas,
        multipliers,
    })
}

/// Recognises a K-class as symplectic when every value is a monic monomial.
pub fn as_symplectic(class: &KClass) -> Option<SymplecticClass> {
    let one = BigInt::from(1);
    let alphas: Option<Vec<Weight>> = class
        .values()
        .iter()
        .map(|v| match v.as_monomial() {
            Some((e, c)) if *c == one => Some(e.clone()),
            _ => None,
        })
        .collect();
    symplectic_class(class.action(), alphas?).ok()
}

/// Looks up a vertex-name-keyed map of values in vertex order.
pub fn values_by_name(
    action: &GkmAction,
    mut named: HashMap<String, LaurentPoly>,
) -> Result<Vec<LaurentPoly>> {
    if let Some(extra) = named.keys().find(|k| action.vertex_index(k).is_none()) {
        return Err(Error::Unknown {
            kind: "vertex",
            name: extra.clone(),
        });
    }
    Ok(action
        .vertex_names()
        .iter()
        .map(|v| {
            named
                .remove(v)
                .unwrap_or_else(|| LaurentPoly::zero(action.n()))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{cp1_fixture, gen_projective};

    fn names(k: usize) -> Vec<String> {
        (0..k).map(|i| format!("P{i}")).collect()
    }

    #[test]
    fn projective_generator_is_valid() {
        for n in 1..=4 {
            let (action, class) = gen_projective(n);
            assert_eq!(action.num_vertices(), n + 1);
            assert_eq!(action.valence(), n);
            assert!(class.multipliers().iter().all(|&m| m == 1));
        }
        let (action, _) = gen_projective(1);
        assert_eq!(action.geometric_edges().count(), 1);
        assert_eq!(action.axial(0), &Weight(vec![1]));

        let (action, _) = gen_projective(2);
        let mut ws: Vec<Weight> = action
            .geometric_edges()
            .map(|e| action.axial(e).clone())
            .collect();
        ws.sort();
        assert_eq!(
            ws,
            vec![Weight(vec![-1, 1]), Weight(vec![0, 1]), Weight(vec![1, 0])]
        );
    }

    #[test]
    fn orientation_violation() {
        let mut raw = RawAction::from_geometric(2, names(2), [(0, 1, vec![1, 0])]);
        raw.edges[1].alpha = vec![1, 0];
        let err = validate_action(&raw).unwrap_err();
        assert!(err.iter().any(|v| v.code == ViolationCode::Orient));
    }

    #[test]
    fn gkm_violation_for_proportional_weights() {
        let raw = RawAction::from_geometric(
            2,
            names(3),
            [(0, 1, vec![1, 0]), (0, 2, vec![2, 0]), (1, 2, vec![1, 0])],
        );
        let err = validate_action(&raw).unwrap_err();
        assert!(err
            .iter()
            .any(|v| v.code == ViolationCode::Gkm && v.location == "vertex P0"));
    }

    #[test]
    fn involution_and_valence_violations() {
        let mut raw = RawAction::from_geometric(2, names(2), [(0, 1, vec![1, 0])]);
        raw.edges[1].bar = 1;
        let err = validate_action(&raw).unwrap_err();
        assert_eq!(err[0].code, ViolationCode::Involution);

        let raw = RawAction::from_geometric(2, names(3), [(0, 1, vec![1, 0]), (0, 2, vec![0, 1])]);
        let err = validate_action(&raw).unwrap_err();
        assert!(err.iter().all(|v| v.code == ViolationCode::Valence));
    }

    #[test]
    fn compatibility_violation() {
        // square with weights that do not match modulo the edge weight
        let raw = RawAction::from_geometric(
            2,
            names(4),
            [
                (0, 1, vec![1, 0]),
                (0, 2, vec![0, 1]),
                (1, 3, vec![1, 2]),
                (2, 3, vec![1, 0]),
            ],
        );
        let err = validate_action(&raw).unwrap_err();
        assert!(err.iter().any(|v| v.code == ViolationCode::Compat));
    }

    #[test]
    fn class_validation() {
        let (action, _) = cp1_fixture();
        let c = LaurentPoly::from_terms(2, [(Weight(vec![2, 1]), 3), (Weight(vec![0, 0]), -1)])
            .unwrap();
        assert!(validate_class(&action, vec![c.clone(), c]).is_ok());

        let bad = validate_class(
            &action,
            vec![LaurentPoly::one(2), LaurentPoly::x(Weight(vec![0, 1]))],
        )
        .unwrap_err();
        assert_eq!(bad[0].code, ViolationCode::Compat);

        assert!(validate_class(
            &action,
            vec![
                LaurentPoly::x(Weight(vec![-1, 0])),
                LaurentPoly::x(Weight(vec![1, 0]))
            ]
        )
        .is_ok());
    }

    #[test]
    fn symplectic_examples() {
        let (action, class) = cp1_fixture();
        assert_eq!(class.multipliers(), &[2, 2]);
        let err =
            symplectic_class(&action, vec![Weight(vec![1, 0]), Weight(vec![-1, 0])]).unwrap_err();
        assert!(err.iter().all(|v| v.code == ViolationCode::NonPositive));
        let err =
            symplectic_class(&action, vec![Weight(vec![1, 0]), Weight(vec![1, 1])]).unwrap_err();
        assert_eq!(err[0].code, ViolationCode::NotMultiple);

        let (action, _) = gen_projective(2);
        let sc = symplectic_class(
            &action,
            vec![Weight(vec![0, 0]), Weight(vec![1, 0]), Weight(vec![0, 1])],
        )
        .unwrap();
        assert!(sc.multipliers().iter().all(|&m| m == 1));
        assert!(as_symplectic(sc.class()).is_some());
    }

    #[test]
    fn classes_form_a_ring() {
        let (action, sc) = gen_projective(2);
        let f = sc.class();
        let g = sc.shifted(&Weight(vec![1, -1])).class().clone();
        let c = LaurentPoly::from_terms(2, [(Weight(vec![1, 1]), 2), (Weight(vec![0, 0]), -3)])
            .unwrap();
        for h in [
            f.add(&g),
            f.mul(&g),
            f.scale(&c),
            KClass::constant(&action, &c),
        ] {
            assert!(validate_class(&action, h.values().to_vec()).is_ok());
        }
    }
}
