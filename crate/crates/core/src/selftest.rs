//! Randomized invariant batteries, deterministic given a seed.
//!
//! Each battery draws from its own ChaCha stream so that changing one
//! battery's size does not perturb the cases of another.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::charring::{LaurentPoly, RationalChar, TorusPoint};
use crate::generators::{
    all_weights, cp1_fixture, gen_projective, random_generic_xi, random_poly, random_weight,
    standard_examples, Example,
};
use crate::gkm::{as_symplectic, validate_class, KClass, SymplecticClass};
use crate::lattice::{LatticeVector, Weight};
use crate::quantization::{
    bounding_box, box_points, character_expand, character_oracle, hull_report,
    localized_sum_numeric, polarize, Multiplicities,
};
use crate::reduction::{
    chi_reduced, edge_compat_check, moment_map, qr_check, wall_crossing_check, MomentMap,
};
use crate::residue::{
    eval_on_quotient, res_half, res_t, sample_quotient_point, signed_fiber_sum, to_z_form, Side,
};

/// Case counts for every battery.
#[derive(Clone, Debug)]
pub struct Sizes {
    pub classes: usize,
    pub xis_per_class: usize,
    pub points_per_class: usize,
    pub symplectic: usize,
    pub rational_chars: usize,
    pub stars: usize,
    pub points_per_star: usize,
    pub qr_random: usize,
    pub edge_samples: usize,
}

impl Default for Sizes {
    fn default() -> Self {
        Sizes {
            classes: 100,
            xis_per_class: 5,
            points_per_class: 20,
            symplectic: 50,
            rational_chars: 200,
            stars: 25,
            points_per_star: 20,
            qr_random: 25,
            edge_samples: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub name: &'static str,
    pub law: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl Entry {
    fn new(name: &'static str, law: &'static str) -> Self {
        Entry {
            name,
            law,
            cases: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(detail());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "{status}  {:<22} {} checks  [{}]",
            self.name, self.cases, self.law
        )?;
        for d in self.failures.iter().take(5) {
            write!(f, "\n      - {d}")?;
        }
        if self.failures.len() > 5 {
            write!(f, "\n      ... {} more", self.failures.len() - 5)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub seed: u64,
    pub entries: Vec<Entry>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(Entry::passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "selftest seed={}", self.seed)?;
        for e in &self.entries {
            writeln!(f, "{e}")?;
        }
        write!(
            f,
            "overall: {}",
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

/// Independent random stream number `stream` derived from `seed`.
pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A random class on one of the standard examples.
#[derive(Clone, Debug)]
pub struct Case {
    pub example: String,
    pub class: KClass,
}

pub fn random_cases<R: Rng + ?Sized>(examples: &[Example], rng: &mut R, count: usize) -> Vec<Case> {
    (0..count)
        .map(|_| {
            let ex = &examples[rng.gen_range(0..examples.len())];
            Case {
                example: ex.name.clone(),
                class: ex.random_class(rng),
            }
        })
        .collect()
}

/// The class used for the corruption test: the two-vertex example with its
/// value at `q` replaced by something incompatible.
pub fn corrupted_case() -> Case {
    let (_, class) = cp1_fixture();
    Case {
        example: "cp1 (corrupted)".into(),
        class: class
            .class()
            .with_value_unchecked(1, LaurentPoly::x(Weight(vec![0, 1]))),
    }
}

fn xi_for(case: &Case, rng: &mut impl Rng) -> LatticeVector {
    let action = case.class.action();
    random_generic_xi(rng, action.n(), &all_weights(action), 3)
}

pub fn battery_class_validity(cases: &[Case]) -> Entry {
    let mut entry = Entry::new(
        "class-validity",
        "values agree modulo 1 - x^alpha_e on every edge",
    );
    for (i, c) in cases.iter().enumerate() {
        let res = validate_class(c.class.action(), c.class.values().to_vec());
        entry.check(res.is_ok(), || {
            format!("case {i} ({}): {}", c.example, res.unwrap_err()[0])
        });
    }
    entry
}

/// Exact-division route succeeds and equals the polarized expansion.
pub fn battery_polynomiality(cases: &[Case], rng: &mut impl Rng) -> Entry {
    let mut entry = Entry::new(
        "polynomiality",
        "the localized character is a Laurent polynomial",
    );
    for (i, c) in cases.iter().enumerate() {
        let x = xi_for(c, rng);
        let outcome = character_oracle(&c.class).and_then(|oracle| {
            let pol = polarize(c.class.action(), &x)?;
            Ok((oracle, character_expand(&c.class, &pol)?.poly))
        });
        match outcome {
            Ok((a, b)) => entry.check(a == b, || {
                format!("case {i} ({}): oracle {a} != expansion {b}", c.example)
            }),
            Err(e) => entry.check(false, || format!("case {i} ({}): {e}", c.example)),
        }
    }
    entry
}

/// The localized sum evaluated numerically matches the polynomial.
pub fn battery_localization(cases: &[Case], points: usize, rng: &mut impl Rng) -> Entry {
    let mut entry = Entry::new(
        "localization-numeric",
        "localized sum equals the character pointwise",
    );
    for (i, c) in cases.iter().enumerate() {
        let Ok(chi) = character_oracle(&c.class) else {
            entry.check(false, || {
                format!("case {i} ({}): no polynomial character", c.example)
            });
            continue;
        };
        let action = c.class.action();
        let weights = all_weights(action);
        for _ in 0..points {
            let outcome = TorusPoint::random_pole_free(rng, action.n(), &weights, 0.05, 10_000)
                .and_then(|g| Ok((chi.eval(&g), localized_sum_numeric(&c.class, &g)?)));
            match outcome {
                Ok((a, b)) => entry.check((a - b).norm() < 1e-6, || {
                    format!("case {i} ({}): |{a} - {b}| >= 1e-6", c.example)
                }),
                Err(e) => entry.check(false, || format!("case {i} ({}): {e}", c.example)),
            }
        }
    }
    entry
}

/// The expansion does not depend on the polarizing vector.
pub fn battery_xi_independence(cases: &[Case], xis: usize, rng: &mut impl Rng) -> Entry {
    let mut entry = Entry::new(
        "xi-independence",
        "the character does not depend on the polarization",
    );
    for (i, c) in cases.iter().enumerate() {
        let mut first: Option<LaurentPoly> = None;
        for _ in 0..xis {
            let x = xi_for(c, rng);
            let outcome =
                polarize(c.class.action(), &x).and_then(|pol| character_expand(&c.class, &pol));
            match outcome {
                Ok(r) => match &first {
                    None => {
                        first = Some(r.poly);
                        entry.check(true, String::new);
                    }
                    Some(p) => entry.check(*p == r.poly, || {
                        format!(
                            "case {i} ({}): xi = {x} gives {} instead of {p}",
                            c.example, r.poly
                        )
                    }),
                },
                Err(e) => entry.check(false, || format!("case {i} ({}): {e}", c.example)),
            }
        }
    }
    entry
}

/// Random symplectic classes with a generic polarization.
pub fn random_symplectic_cases(
    examples: &[Example],
    rng: &mut impl Rng,
    count: usize,
) -> Vec<(String, SymplecticClass, LatticeVector)> {
    (0..count)
        .map(|_| {
            let ex = &examples[rng.gen_range(0..examples.len())];
            let s = ex.random_symplectic(rng);
            let x = random_generic_xi(rng, ex.n(), &all_weights(&ex.action), 3);
            (ex.name.clone(), s, x)
        })
        .collect()
}

/// Support inside the hull, coefficient one at its vertices, and the
/// partition-function multiplicities on a box around the hull.
pub fn battery_hull_and_multiplicities(
    cases: &[(String, SymplecticClass, LatticeVector)],
) -> (Entry, Entry) {
    let mut hull = Entry::new(
        "convex-hull",
        "weights lie in the hull; extremal weights have multiplicity 1",
    );
    let mut mult = Entry::new(
        "multiplicity-formula",
        "alternating sum of partition counts gives multiplicities",
    );
    for (i, (name, s, x)) in cases.iter().enumerate() {
        let outcome =
            polarize(s.action(), x).and_then(|pol| Ok((character_expand(s.class(), &pol)?, pol)));
        let (res, pol) = match outcome {
            Ok(v) => v,
            Err(e) => {
                hull.check(false, || format!("case {i} ({name}): {e}"));
                continue;
            }
        };
        let report = hull_report(s, &res);
        hull.check(report.passed(), || format!("case {i} ({name}): {report:?}"));
        let mut table = Multiplicities::new(s, &pol).expect("polarization matches the class");
        let bad: Vec<(Weight, BigInt, BigInt)> = box_points(&bounding_box(s.alphas(), 2))
            .into_iter()
            .filter_map(|a| {
                let m = table.get(&a);
                let c = res.poly.coeff(&a);
                (m != c).then_some((a, m, c))
            })
            .collect();
        mult.check(bad.is_empty(), || {
            format!("case {i} ({name}): mismatches {bad:?}")
        });
    }
    (hull, mult)
}

fn random_rational(
    rng: &mut impl Rng,
    n: usize,
    x: &LatticeVector,
    factors: usize,
) -> RationalChar {
    let num = random_poly(rng, n, 3, 3);
    let mut den = Vec::new();
    while den.len() < factors {
        let g = random_weight(rng, n, 2);
        if g.pair(x) != 0 {
            den.push(g);
        }
    }
    RationalChar::new(num, den).expect("nonzero factors")
}

/// Per-monomial vanishing of the two half-residues.
pub fn battery_residue_vanishing(count: usize, rng: &mut impl Rng) -> Entry {
    let mut entry = Entry::new(
        "residue-vanishing",
        "half-residues vanish outside the admissible degree range",
    );
    for i in 0..count {
        let n = rng.gen_range(1..=3);
        let x = random_generic_xi(rng, n, &[], 3);
        let factors = rng.gen_range(0..=3);
        let f = random_rational(rng, n, &x, factors);
        let z = to_z_form(&f, &x).expect("factors pair nonzero with xi");
        let neg_sum: i64 = z.factors().iter().filter(|f| f.1 < 0).map(|f| f.1).sum();
        let pos_sum: i64 = z.factors().iter().filter(|f| f.1 > 0).map(|f| f.1).sum();
        let r = z.r();
        let d = z.factors().len();
        for (&k, b) in z.numerator() {
            for (beta, c) in b.terms() {
                let single = z.with_monomial(beta.clone(), k, c.clone());
                if k > neg_sum || (k == 0 && r > 0) {
                    let minus = res_half(&single, Side::Minus);
                    entry.check(minus.is_zero(), || {
                        format!("case {i}: {f}, k = {k}: minus side {minus}")
                    });
                }
                if k < pos_sum || (k == 0 && d > r) {
                    let plus = res_half(&single, Side::Plus);
                    entry.check(plus.is_zero(), || {
                        format!("case {i}: {f}, k = {k}: plus side {plus}")
                    });
                }
            }
        }
    }
    entry
}

/// The residues of all vertex summands add up to zero.
pub fn battery_total_residue(
    examples: &[Example],
    per_example: usize,
    rng: &mut impl Rng,
) -> Entry {
    let mut entry = Entry::new("total-residue", "vertex residues of a class sum to zero");
    for ex in examples {
        for _ in 0..per_example {
            let f = ex.random_class(rng);
            let x = random_generic_xi(rng, ex.n(), &all_weights(&ex.action), 3);
            let mut sum = LaurentPoly::zero(ex.n());
            for p in ex.action.vertices() {
                sum = &sum + &res_t(&f.summand(p), &x).expect("generic xi").total;
            }
            entry.check(sum.is_zero(), || {
                format!("{}: residues sum to {sum}", ex.name)
            });
        }
    }
    entry
}

/// A random vertex star: pairwise independent weights, none orthogonal to `xi`.
pub fn random_star(rng: &mut impl Rng) -> (RationalChar, LatticeVector) {
    let n = rng.gen_range(2..=3);
    let x = random_generic_xi(rng, n, &[], 3);
    let d = rng.gen_range(1..=n);
    let mut den: Vec<Weight> = Vec::new();
    while den.len() < d {
        let g = random_weight(rng, n, 2);
        if g.pair(&x) != 0 && den.iter().all(|h| !h.is_parallel(&g)) {
            den.push(g);
        }
    }
    let num = random_poly(rng, n, 3, 2);
    (RationalChar::new(num, den).expect("nonzero factors"), x)
}

/// Exact residue against the signed sum of fiber averages.
pub fn battery_fiber_identity(stars: usize, points: usize, rng: &mut impl Rng) -> Entry {
    let mut entry = Entry::new(
        "residue-fiber-sum",
        "residue equals signed push-forwards over pole fibers",
    );
    for i in 0..stars {
        let (f, x) = random_star(rng);
        let total = res_t(&f, &x).expect("generic").total;
        for _ in 0..points {
            let outcome = sample_quotient_point(rng, &f, &x, 0.05, 10_000).and_then(|g| {
                Ok((
                    eval_on_quotient(&total, &x, &g)?,
                    signed_fiber_sum(&f, &x, &g)?,
                ))
            });
            match outcome {
                Ok((a, b)) => entry.check((a - b).norm() < 1e-6, || {
                    format!("star {i}: {f} at xi = {x}: {a} vs {b}")
                }),
                Err(e) => entry.check(false, || format!("star {i}: {e}")),
            }
        }
    }
    entry
}

fn reduction_checks(entry: &mut Entry, name: &str, f: &KClass, m: &MomentMap) {
    let reps = m.chamber_representatives();
    let values: Vec<LaurentPoly> = reps
        .iter()
        .map(|c| chi_reduced(f, m, c).expect("chamber representatives are regular"))
        .collect();
    entry.check(values[0].is_zero(), || {
        format!("{name}: below all walls chi = {}", values[0])
    });
    entry.check(values.last().unwrap().is_zero(), || {
        format!("{name}: above all walls chi = {}", values.last().unwrap())
    });
    let crit = m.critical_values();
    for j in 0..reps.len() {
        // another level in the same chamber
        let other = if j == 0 {
            &reps[0] - BigRational::from_integer(5.into())
        } else if j + 1 == reps.len() {
            &reps[j] + BigRational::from_integer(5.into())
        } else {
            (&reps[j] + &crit[j]) / BigRational::from_integer(2.into())
        };
        let v = chi_reduced(f, m, &other).expect("regular");
        entry.check(v == values[j], || {
            format!("{name}: chamber {j} not constant")
        });
    }
    let mut tail = LaurentPoly::zero(f.action().n());
    for j in (0..reps.len() - 1).rev() {
        let wc = wall_crossing_check(f, m, &reps[j], &reps[j + 1])
            .expect("one wall between representatives");
        entry.check(wc.passed(), || {
            format!("{name}: wall crossing at vertex {} fails", wc.vertex)
        });
        tail = &tail + &wc.residue;
        entry.check(tail == values[j], || {
            format!("{name}: telescoped sum differs below wall {j}")
        });
    }
}

/// Chamber independence, telescoping and wall crossing on every example,
/// for rank and symplectic moment maps.
pub fn battery_reduction(examples: &[Example], rng: &mut impl Rng) -> Entry {
    let mut entry = Entry::new(
        "reduced-character",
        "reduced characters are constant on chambers and jump by vertex residues",
    );
    for ex in examples {
        let x = random_generic_xi(rng, ex.n(), &all_weights(&ex.action), 3);
        let m = moment_map(&ex.action, &x).expect("generated graphs are acyclic");
        let f = ex.random_class(rng);
        reduction_checks(&mut entry, &ex.name, &f, &m);
        let s = ex.random_symplectic(rng);
        let ms = MomentMap::symplectic(&s, &x).expect("symplectic values form a moment map");
        reduction_checks(&mut entry, &ex.name, s.class(), &ms);
    }
    entry
}

/// The fixed examples of the invariant-part check, with a zero-regular `xi`.
pub fn qr_fixtures() -> Vec<(String, SymplecticClass, LatticeVector)> {
    let (_, cp1) = cp1_fixture();
    let (_, p2) = gen_projective(2);
    let (_, p3) = gen_projective(3);
    let p2_doubled = as_symplectic(
        &p2.class()
            .mul(p2.class())
            .scale(&LaurentPoly::x(Weight(vec![-1, 0]))),
    )
    .expect("product of symplectic classes");
    vec![
        ("cp1".into(), cp1, LatticeVector(vec![1, 0])),
        (
            "cp2 shifted by (1,1)".into(),
            p2.shifted(&Weight(vec![1, 1])),
            LatticeVector(vec![2, -3]),
        ),
        (
            "cp2 doubled, shifted by (-1,0)".into(),
            p2_doubled,
            LatticeVector(vec![1, -1]),
        ),
        (
            "cp3 shifted by (-1,-1,-1)".into(),
            p3.shifted(&Weight(vec![-1, -1, -1])),
            LatticeVector(vec![1, 2, -4]),
        ),
    ]
}

/// Random symplectic classes with `xi` generic and `alpha_p(xi) != 0`.
pub fn random_qr_cases(
    examples: &[Example],
    rng: &mut impl Rng,
    count: usize,
) -> Vec<(String, SymplecticClass, LatticeVector)> {
    (0..count)
        .map(|_| loop {
            // a class with some alpha_p = 0 admits no such xi; redraw it
            let ex = &examples[rng.gen_range(0..examples.len())];
            let s = ex.random_symplectic(rng);
            let weights = all_weights(&ex.action);
            for _ in 0..50 {
                let x = random_generic_xi(rng, ex.n(), &weights, 3);
                if s.alphas().iter().all(|a| a.pair(&x) != 0) {
                    return (ex.name.clone(), s, x);
                }
            }
        })
        .collect()
}

pub fn battery_qr(cases: &[(String, SymplecticClass, LatticeVector)]) -> Entry {
    let mut entry = Entry::new(
        "invariant-part",
        "reduced character at 0 equals the invariant part of the character",
    );
    for (name, s, x) in cases {
        match qr_check(s, x) {
            Ok(r) => entry.check(r.passed(), || format!("{name}, xi = {x}: {r}")),
            Err(e) => entry.check(false, || format!("{name}, xi = {x}: {e}")),
        }
    }
    entry
}

/// Restriction compatibility on every edge of every example, for a random
/// class and a random symplectic class.
pub fn battery_edge_compat(examples: &[Example], samples: usize, rng: &mut impl Rng) -> Entry {
    let mut entry = Entry::new(
        "edge-restriction",
        "edge summands agree on the edge subgroup",
    );
    for ex in examples {
        let classes = [
            ex.random_class(rng),
            ex.random_symplectic(rng).class().clone(),
        ];
        for f in &classes {
            for e in 0..ex.action.num_edges() {
                match edge_compat_check(f, e, samples, rng) {
                    Ok(r) => entry.check(r.passed(), || {
                        format!(
                            "{} edge {}: deviation {}",
                            ex.name,
                            ex.action.edge_label(e),
                            r.max_deviation
                        )
                    }),
                    Err(err) => entry.check(false, || {
                        format!("{} edge {}: {err}", ex.name, ex.action.edge_label(e))
                    }),
                }
            }
        }
    }
    entry
}

/// Runs every battery; `inject_corrupt` adds an invalid class to the
/// class-based batteries.
pub fn selftest(seed: u64, sizes: &Sizes, inject_corrupt: bool) -> Report {
    let examples = standard_examples();
    let mut cases = random_cases(&examples, &mut stream(seed, 0), sizes.classes);
    if inject_corrupt {
        cases.push(corrupted_case());
    }
    let mut entries = vec![
        battery_class_validity(&cases),
        battery_polynomiality(&cases, &mut stream(seed, 1)),
    ];
    let valid: Vec<Case> = cases
        .iter()
        .filter(|c| validate_class(c.class.action(), c.class.values().to_vec()).is_ok())
        .cloned()
        .collect();
    entries.push(battery_localization(
        &valid,
        sizes.points_per_class,
        &mut stream(seed, 2),
    ));
    entries.push(battery_xi_independence(
        &valid,
        sizes.xis_per_class,
        &mut stream(seed, 3),
    ));
    let symplectic = random_symplectic_cases(&examples, &mut stream(seed, 4), sizes.symplectic);
    let (hull, mult) = battery_hull_and_multiplicities(&symplectic);
    entries.push(hull);
    entries.push(mult);
    entries.push(battery_residue_vanishing(
        sizes.rational_chars,
        &mut stream(seed, 5),
    ));
    entries.push(battery_total_residue(&examples, 2, &mut stream(seed, 6)));
    entries.push(battery_fiber_identity(
        sizes.stars,
        sizes.points_per_star,
        &mut stream(seed, 7),
    ));
    entries.push(battery_reduction(&examples, &mut stream(seed, 8)));
    let mut qr_cases = qr_fixtures();
    qr_cases.extend(random_qr_cases(
        &examples,
        &mut stream(seed, 9),
        sizes.qr_random,
    ));
    entries.push(battery_qr(&qr_cases));
    entries.push(battery_edge_compat(
        &examples,
        sizes.edge_samples,
        &mut stream(seed, 10),
    ));
    Report { seed, entries }
}

/// Helper for numeric comparisons in reports.
pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Sizes {
        Sizes {
            classes: 8,
            xis_per_class: 2,
            points_per_class: 3,
            symplectic: 4,
            rational_chars: 20,
            stars: 3,
            points_per_star: 3,
            qr_random: 3,
            edge_samples: 2,
        }
    }

    #[test]
    fn small_selftest_passes_and_is_deterministic() {
        let a = selftest(42, &small(), false);
        assert!(a.passed(), "{a}");
        let b = selftest(42, &small(), false);
        assert_eq!(a.to_string(), b.to_string());
        let c = selftest(7, &small(), false);
        assert!(c.passed(), "{c}");
    }

    #[test]
    fn corruption_is_reported_by_law() {
        let r = selftest(42, &small(), true);
        assert!(!r.passed());
        let failed: Vec<&str> = r
            .entries
            .iter()
            .filter(|e| !e.passed())
            .map(|e| e.law)
            .collect();
        assert!(failed.contains(&"values agree modulo 1 - x^alpha_e on every edge"));
        assert!(failed.contains(&"the localized character is a Laurent polynomial"));
    }

    #[test]
    fn qr_fixtures_are_zero_regular_and_nontrivial() {
        for (name, s, x) in qr_fixtures() {
            let r = qr_check(&s, &x).unwrap();
            assert!(r.passed(), "{name}: {r}");
        }
        let (_, _, x) = &qr_fixtures()[2];
        let r = qr_check(&qr_fixtures()[2].1, x).unwrap();
        assert_eq!(r.reduced, LaurentPoly::one(2));
    }
}
