//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use gkm_core::generators::{cp1_fixture, gen_projective, standard_examples, Example};
use gkm_core::quantization::{character_expand, character_oracle, hull_report, polarize};
use gkm_core::selftest::{
    battery_class_validity, battery_edge_compat, battery_fiber_identity,
    battery_hull_and_multiplicities, battery_localization, battery_polynomiality, battery_qr,
    battery_reduction, battery_residue_vanishing, battery_total_residue, battery_xi_independence,
    qr_fixtures, random_cases, random_qr_cases, random_symplectic_cases, stream, Case, Entry,
    Sizes,
};
use gkm_core::{LatticeVector, LaurentPoly, Weight};

const SEED: u64 = 20261016;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn from_entries(entries: &[Entry]) -> Self {
        let passed = entries.iter().all(Entry::passed);
        let cases: usize = entries.iter().map(|e| e.cases).sum();
        let mut detail = format!("{cases} checks");
        for e in entries.iter().filter(|e| !e.passed()) {
            detail.push_str(&format!("\n{e}"));
        }
        Outcome { passed, detail }
    }

    fn within(mut self, elapsed: Duration, limit: Duration) -> Self {
        if elapsed >= limit {
            self.passed = false;
            self.detail
                .push_str(&format!("; took {elapsed:.2?}, limit {limit:?}"));
        }
        self
    }
}

fn poly(dim: usize, terms: &[(&[i64], i64)]) -> LaurentPoly {
    let mut p = LaurentPoly::zero(dim);
    for (e, c) in terms {
        p.add_term(Weight(e.to_vec()), (*c).into());
    }
    p
}

fn two_vertex_character() -> Outcome {
    let t = Instant::now();
    let (action, f) = cp1_fixture();
    let expected = poly(2, &[(&[-1, 0], 1), (&[0, 0], 1), (&[1, 0], 1)]);
    let pol = polarize(&action, &LatticeVector(vec![1, 0])).unwrap();
    let expanded = character_expand(f.class(), &pol).unwrap().poly;
    let oracle = character_oracle(f.class()).unwrap();
    let elapsed = t.elapsed();
    Outcome {
        passed: expanded == expected && oracle == expected,
        detail: format!("expansion {expanded}, exact division {oracle}"),
    }
    .within(elapsed, Duration::from_secs(1))
}

fn projective_plane_character() -> Outcome {
    let t = Instant::now();
    let (action, f) = gen_projective(2);
    let expected = poly(2, &[(&[0, 0], 1), (&[1, 0], 1), (&[0, 1], 1)]);
    let pol = polarize(&action, &LatticeVector(vec![1, 2])).unwrap();
    let res = character_expand(f.class(), &pol).unwrap();
    let oracle = character_oracle(f.class()).unwrap();
    let hull = hull_report(&f, &res);
    let elapsed = t.elapsed();
    Outcome {
        passed: res.poly == expected
            && oracle == expected
            && hull.passed()
            && hull.hull_vertices.len() == 3,
        detail: format!(
            "chi = {}, hull vertices {}",
            res.poly,
            hull.vertex_coefficients
                .iter()
                .map(|(w, c)| format!("{w} -> {c}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    }
    .within(elapsed, Duration::from_secs(1))
}

fn main() -> ExitCode {
    let sizes = Sizes::default();
    let examples: Vec<Example> = standard_examples();
    let cases: Vec<Case> = random_cases(&examples, &mut stream(SEED, 0), sizes.classes);
    let symplectic = random_symplectic_cases(&examples, &mut stream(SEED, 4), sizes.symplectic);

    type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);
    let criteria: Vec<Criterion> = vec![
        (
            "two-vertex character, expansion and exact division agree",
            Box::new(two_vertex_character),
        ),
        (
            "projective plane character, extremal weights with coefficient 1",
            Box::new(projective_plane_character),
        ),
        (
            "100 random classes: exact division succeeds and equals the expansion",
            Box::new(|| {
                let t = Instant::now();
                let valid = battery_class_validity(&cases);
                let e = battery_polynomiality(&cases, &mut stream(SEED, 1));
                Outcome::from_entries(&[valid, e]).within(t.elapsed(), Duration::from_secs(60))
            }),
        ),
        (
            "localized sum matches the character at 20 points per class (1e-6)",
            Box::new(|| {
                Outcome::from_entries(&[battery_localization(
                    &cases,
                    sizes.points_per_class,
                    &mut stream(SEED, 2),
                )])
            }),
        ),
        (
            "5 generic polarizations per class give the same character",
            Box::new(|| {
                Outcome::from_entries(&[battery_xi_independence(
                    &cases,
                    sizes.xis_per_class,
                    &mut stream(SEED, 3),
                )])
            }),
        ),
        (
            "50 symplectic classes: support in the hull, multiplicity formula on the box",
            Box::new(|| {
                let (hull, mult) = battery_hull_and_multiplicities(&symplectic);
                Outcome::from_entries(&[hull, mult])
            }),
        ),
        (
            "residue vanishing on 200 rational characters, total residue on all fixtures",
            Box::new(|| {
                Outcome::from_entries(&[
                    battery_residue_vanishing(sizes.rational_chars, &mut stream(SEED, 5)),
                    battery_total_residue(&examples, 2, &mut stream(SEED, 6)),
                ])
            }),
        ),
        (
            "residue equals the signed fiber sum on 25 stars x 20 points (1e-6)",
            Box::new(|| {
                Outcome::from_entries(&[battery_fiber_identity(
                    sizes.stars,
                    sizes.points_per_star,
                    &mut stream(SEED, 7),
                )])
            }),
        ),
        (
            "reduced characters: chamber independence, telescoping, wall crossing",
            Box::new(|| {
                Outcome::from_entries(&[battery_reduction(&examples, &mut stream(SEED, 8))])
            }),
        ),
        (
            "invariant part equals the reduced character at 0",
            Box::new(|| {
                let mut qr = qr_fixtures();
                qr.extend(random_qr_cases(
                    &examples,
                    &mut stream(SEED, 9),
                    sizes.qr_random,
                ));
                Outcome::from_entries(&[battery_qr(&qr)])
            }),
        ),
        (
            "edge summands agree on edge subgroups, 10 points per edge",
            Box::new(|| {
                Outcome::from_entries(&[battery_edge_compat(
                    &examples,
                    sizes.edge_samples,
                    &mut stream(SEED, 10),
                )])
            }),
        ),
    ];

    let mut all = true;
    println!("acceptance suite, seed {SEED}");
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = check();
        let status = if o.passed { "PASS" } else { "FAIL" };
        println!(
            "{status}  criterion {:>2}: {name} ({:.2?}; {})",
            i + 1,
            t.elapsed(),
            o.detail
        );
        all &= o.passed;
    }
    println!("acceptance: {}", if all { "PASS" } else { "FAIL" });
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
