//! Standard GKM graphs and random K-classes on them.
//!
//! Every generator returns an already validated action; the random class
//! builders only ever combine valid classes with ring operations, so their
//! output is valid by construction (and re-validated anyway).

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::charring::LaurentPoly;
use crate::gkm::{
    apply_matrix, monomial_class, symplectic_class, validate_action, GkmAction, KClass, RawAction,
    SymplecticClass,
};
use crate::lattice::{LatticeVector, Weight};

fn build(raw: RawAction) -> Arc<GkmAction> {
    Arc::new(
        validate_action(&raw)
            .unwrap_or_else(|v| panic!("generator produced an invalid action: {v:?}")),
    )
}

fn eps(n: usize, k: usize) -> Weight {
    if k == 0 {
        Weight::zero(n)
    } else {
        Weight::unit(n, k - 1)
    }
}

/// Two vertices `p`, `q` joined by one edge of weight `(1,0)` in `Z^2`, with
/// the class `alpha_p = (-1,0)`, `alpha_q = (1,0)`.
pub fn cp1_fixture() -> (Arc<GkmAction>, SymplecticClass) {
    let action = build(RawAction::from_geometric(
        2,
        vec!["p".into(), "q".into()],
        [(0, 1, vec![1, 0])],
    ));
    let class = symplectic_class(&action, vec![Weight(vec![-1, 0]), Weight(vec![1, 0])])
        .expect("fixture class is symplectic");
    (action, class)
}

/// Complete graph on `P_0..P_n` with `alpha(P_i -> P_j) = eps_j - eps_i`,
/// `eps_0 = 0`; default class `alpha_{P_k} = eps_k`.
pub fn gen_projective(n: usize) -> (Arc<GkmAction>, SymplecticClass) {
    assert!(n >= 1);
    let names = (0..=n).map(|i| format!("P{i}")).collect();
    let mut edges = Vec::new();
    for i in 0..=n {
        for j in (i + 1)..=n {
            edges.push((i, j, (&eps(n, j) - &eps(n, i)).0));
        }
    }
    let action = build(RawAction::from_geometric(n, names, edges));
    let alphas = (0..=n).map(|k| eps(n, k)).collect();
    let class = symplectic_class(&action, alphas).expect("default class is symplectic");
    (action, class)
}

/// Vertices of the Hirzebruch trapezoid `conv{(0,0), (a+kb,0), (a,b), (0,b)}`.
fn hirzebruch_vertices(k: i64, a: i64, b: i64) -> Vec<Weight> {
    vec![
        Weight(vec![0, 0]),
        Weight(vec![a + k * b, 0]),
        Weight(vec![a, b]),
        Weight(vec![0, b]),
    ]
}

/// GKM graph of the Hirzebruch surface `F_k` (the 1-skeleton of its trapezoid).
pub fn hirzebruch(k: i64) -> Arc<GkmAction> {
    let names = ["A", "B", "C", "D"].iter().map(|s| s.to_string()).collect();
    build(RawAction::from_geometric(
        2,
        names,
        [
            (0, 1, vec![1, 0]),
            (1, 2, vec![-k, 1]),
            (2, 3, vec![-1, 0]),
            (3, 0, vec![0, -1]),
        ],
    ))
}

/// Product graph: vertices are pairs, edges move in one factor.
pub fn product(a: &GkmAction, b: &GkmAction) -> Arc<GkmAction> {
    let n = a.n() + b.n();
    let nb = b.num_vertices();
    let idx = |p: usize, q: usize| p * nb + q;
    let mut names = Vec::new();
    for p in a.vertices() {
        for q in b.vertices() {
            names.push(format!("{}.{}", a.vertex_name(p), b.vertex_name(q)));
        }
    }
    let mut edges = Vec::new();
    for e in a.geometric_edges() {
        let ed = a.edge(e);
        for q in b.vertices() {
            let mut alpha = a.axial(e).0.clone();
            alpha.extend(std::iter::repeat_n(0, b.n()));
            edges.push((idx(ed.source, q), idx(ed.target, q), alpha));
        }
    }
    for e in b.geometric_edges() {
        let ed = b.edge(e);
        for p in a.vertices() {
            let mut alpha = vec![0; a.n()];
            alpha.extend_from_slice(&b.axial(e).0);
            edges.push((idx(p, ed.source), idx(p, ed.target), alpha));
        }
    }
    build(RawAction::from_geometric(n, names, edges))
}

const PERMS3: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// GKM graph of the complete flag manifold of `C^3` for the maximal torus of
/// `U(3)`: vertices are permutations, edges are transpositions, and the edge
/// swapping positions `i < j` at `w` carries `sign(w(i) - w(j)) (e_i - e_j)`.
pub fn flag3() -> Arc<GkmAction> {
    let names = PERMS3
        .iter()
        .map(|w| format!("w{}{}{}", w[0], w[1], w[2]))
        .collect();
    let index = |w: &[usize; 3]| PERMS3.iter().position(|x| x == w).unwrap();
    let mut edges = Vec::new();
    for (a, w) in PERMS3.iter().enumerate() {
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let mut v = *w;
            v.swap(i, j);
            let b = index(&v);
            if a < b {
                let s: i64 = if w[i] > w[j] { 1 } else { -1 };
                let mut alpha = vec![0i64; 3];
                alpha[i] = s;
                alpha[j] = -s;
                edges.push((a, b, alpha));
            }
        }
    }
    build(RawAction::from_geometric(3, names, edges))
}

/// How to produce monomial classes on a generated graph.
#[derive(Clone, Debug)]
enum Family {
    Cp1,
    Projective(usize),
    Hirzebruch(i64),
    Flag3,
    Product(Box<Family>, Box<Family>),
    Twist(Vec<Vec<i64>>, Box<Family>),
}

impl Family {
    fn dim(&self) -> usize {
        match self {
            Family::Cp1 => 2,
            Family::Projective(n) => *n,
            Family::Hirzebruch(_) => 2,
            Family::Flag3 => 3,
            Family::Product(a, b) => a.dim() + b.dim(),
            Family::Twist(_, inner) => inner.dim(),
        }
    }

    /// Vertex weights `alpha_p` with edge multipliers of sign `sign` (or
    /// arbitrary when `sign == 0`).
    fn alphas<R: Rng + ?Sized>(&self, rng: &mut R, positive: bool) -> Vec<Weight> {
        let scale = |rng: &mut R| -> i64 {
            if positive {
                rng.gen_range(1..=3)
            } else {
                rng.gen_range(-3..=3)
            }
        };
        match self {
            Family::Cp1 => {
                let a = rng.gen_range(-2..=2);
                let b = rng.gen_range(-2..=2);
                vec![Weight(vec![a, b]), Weight(vec![a + scale(rng), b])]
            }
            Family::Projective(n) => {
                let s = scale(rng);
                (0..=*n).map(|k| eps(*n, k).scale(s)).collect()
            }
            Family::Hirzebruch(k) => hirzebruch_vertices(*k, scale(rng), scale(rng)),
            Family::Flag3 => {
                let lambda: [i64; 3] = if positive {
                    let l2 = rng.gen_range(-2..=2);
                    let l1 = l2 + rng.gen_range(1..=2);
                    [l1 + rng.gen_range(1..=2), l1, l2]
                } else {
                    [
                        rng.gen_range(-2..=2),
                        rng.gen_range(-2..=2),
                        rng.gen_range(-2..=2),
                    ]
                };
                PERMS3
                    .iter()
                    .map(|w| Weight(w.iter().map(|&i| lambda[i]).collect()))
                    .collect()
            }
            Family::Product(a, b) => {
                let xa = a.alphas(rng, positive);
                let xb = b.alphas(rng, positive);
                let mut out = Vec::new();
                for p in &xa {
                    for q in &xb {
                        let mut v = p.0.clone();
                        v.extend_from_slice(&q.0);
                        out.push(Weight(v));
                    }
                }
                out
            }
            Family::Twist(m, inner) => inner
                .alphas(rng, positive)
                .iter()
                .map(|w| apply_matrix(m, w))
                .collect(),
        }
    }
}

/// A generated graph together with a recipe for monomial classes on it.
#[derive(Clone, Debug)]
pub struct Example {
    pub name: String,
    pub action: Arc<GkmAction>,
    family: Family,
}

impl Example {
    pub fn cp1() -> Self {
        Example {
            name: "cp1".into(),
            action: cp1_fixture().0,
            family: Family::Cp1,
        }
    }

    pub fn projective(n: usize) -> Self {
        Example {
            name: format!("cp{n}"),
            action: gen_projective(n).0,
            family: Family::Projective(n),
        }
    }

    pub fn hirzebruch(k: i64) -> Self {
        Example {
            name: format!("hirzebruch{k}"),
            action: hirzebruch(k),
            family: Family::Hirzebruch(k),
        }
    }

    pub fn flag3() -> Self {
        Example {
            name: "flag3".into(),
            action: flag3(),
            family: Family::Flag3,
        }
    }

    pub fn product(a: &Example, b: &Example) -> Self {
        Example {
            name: format!("{}x{}", a.name, b.name),
            action: product(&a.action, &b.action),
            family: Family::Product(Box::new(a.family.clone()), Box::new(b.family.clone())),
        }
    }

    /// Pushes every weight through a unimodular matrix.
    pub fn twisted(&self, m: Vec<Vec<i64>>) -> Self {
        Example {
            name: format!("{}~{:?}", self.name, m),
            action: Arc::new(self.action.transform(&m)),
            family: Family::Twist(m.clone(), Box::new(self.family.clone())),
        }
    }

    pub fn n(&self) -> usize {
        self.family.dim()
    }

    /// A random symplectic class (positive multipliers), translated by a
    /// random character.
    pub fn random_symplectic<R: Rng + ?Sized>(&self, rng: &mut R) -> SymplecticClass {
        let shift = random_weight(rng, self.n(), 2);
        let alphas = self
            .family
            .alphas(rng, true)
            .iter()
            .map(|a| a + &shift)
            .collect();
        symplectic_class(&self.action, alphas).expect("family produces symplectic classes")
    }

    /// A random monomial class whose multipliers may have any sign.
    pub fn random_monomial<R: Rng + ?Sized>(&self, rng: &mut R) -> KClass {
        let shift = random_weight(rng, self.n(), 2);
        let alphas: Vec<Weight> = self
            .family
            .alphas(rng, false)
            .iter()
            .map(|a| a + &shift)
            .collect();
        monomial_class(&self.action, &alphas).expect("family produces compatible classes")
    }

    /// A random K-class built from monomial classes and constants by ring
    /// operations.
    pub fn random_class<R: Rng + ?Sized>(&self, rng: &mut R) -> KClass {
        self.random_class_depth(rng, 2)
    }

    fn random_class_depth<R: Rng + ?Sized>(&self, rng: &mut R, depth: usize) -> KClass {
        let n = self.n();
        let choice = if depth == 0 {
            rng.gen_range(0..3)
        } else {
            rng.gen_range(0..6)
        };
        match choice {
            0 => self.random_symplectic(rng).class().clone(),
            1 => self.random_monomial(rng),
            2 => KClass::constant(&self.action, &random_poly(rng, n, 3, 2)),
            3 => self
                .random_class_depth(rng, depth - 1)
                .add(&self.random_class_depth(rng, depth - 1)),
            4 => self
                .random_class_depth(rng, depth - 1)
                .mul(&self.random_class_depth(rng, depth - 1)),
            _ => self
                .random_class_depth(rng, depth - 1)
                .scale(&random_poly(rng, n, 2, 1)),
        }
    }
}

/// The graphs used by the randomized batteries: all have `n <= 3` and at
/// most six vertices.
pub fn standard_examples() -> Vec<Example> {
    let cp1 = Example::projective(1);
    let cp2 = Example::projective(2);
    let base = vec![
        Example::cp1(),
        cp1.clone(),
        cp2.clone(),
        Example::projective(3),
        Example::product(&cp1, &cp1),
        Example::hirzebruch(1),
        Example::hirzebruch(2),
        Example::product(&cp1, &cp2),
        Example::flag3(),
    ];
    let mut out = base.clone();
    out.push(base[2].twisted(vec![vec![1, 1], vec![0, 1]]));
    out.push(base[6].twisted(vec![vec![2, 1], vec![1, 1]]));
    out.push(base[8].twisted(vec![vec![1, 0, 1], vec![0, 1, 0], vec![0, 1, 1]]));
    out
}

pub fn random_weight<R: Rng + ?Sized>(rng: &mut R, n: usize, bound: i64) -> Weight {
    Weight((0..n).map(|_| rng.gen_range(-bound..=bound)).collect())
}

/// Random Laurent polynomial with at most `terms` terms, exponents in
/// `[-bound, bound]` and coefficients in `[-3, 3]`.
pub fn random_poly<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    terms: usize,
    bound: i64,
) -> LaurentPoly {
    let k = rng.gen_range(1..=terms);
    let mut p = LaurentPoly::zero(n);
    for _ in 0..k {
        let c: i64 = *[-3, -2, -1, 1, 2, 3].choose(rng).unwrap();
        p.add_term(random_weight(rng, n, bound), c.into());
    }
    p
}

/// Random primitive `xi` with every given weight pairing nontrivially.
pub fn random_generic_xi<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    weights: &[Weight],
    bound: i64,
) -> LatticeVector {
    loop {
        let xi = LatticeVector((0..n).map(|_| rng.gen_range(-bound..=bound)).collect());
        if xi.is_primitive() && weights.iter().all(|w| w.pair(&xi) != 0) {
            return xi;
        }
    }
}

/// All axial weights of an action.
pub fn all_weights(action: &GkmAction) -> Vec<Weight> {
    (0..action.num_edges())
        .map(|e| action.axial(e).clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gkm::validate_class;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn standard_examples_are_valid_and_small() {
        for ex in standard_examples() {
            assert!(ex.n() <= 3 && ex.action.num_vertices() <= 6, "{}", ex.name);
            assert_eq!(ex.n(), ex.action.n());
        }
    }

    #[test]
    fn flag_and_hirzebruch_valences() {
        assert_eq!(flag3().valence(), 3);
        assert_eq!(flag3().num_vertices(), 6);
        assert_eq!(hirzebruch(3).valence(), 2);
    }

    #[test]
    fn random_classes_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for ex in standard_examples() {
            for _ in 0..10 {
                let f = ex.random_class(&mut rng);
                assert!(
                    validate_class(&ex.action, f.values().to_vec()).is_ok(),
                    "{}",
                    ex.name
                );
                let s = ex.random_symplectic(&mut rng);
                assert!(s.multipliers().iter().all(|&m| m > 0));
            }
        }
    }
}
