use gkm_core::generators::{flag3, hirzebruch};
use gkm_core::gkm::as_symplectic;
use gkm_core::graphfile::{parse_graph, to_json};
use gkm_core::quantization::{character_expand, character_oracle, polarize};
use gkm_core::reduction::{chi_reduced, moment_map, qr_check, vertex_residues, MomentMap};
use gkm_core::{Error, KClass, LatticeVector, LaurentPoly, Weight};
use num_rational::BigRational;

const SQUARE: &str = r#"{
    "n": 2,
    "vertices": ["a", "b", "c", "d"],
    "edges": [
        {"from": "a", "to": "b", "alpha": [1, 0]},
        {"from": "a", "to": "d", "alpha": [0, 1]},
        {"from": "b", "to": "c", "alpha": [0, 1]},
        {"from": "d", "to": "c", "alpha": [1, 0]}
    ],
    "classes": {
        "box": {
            "a": [{"coeff": 1, "exp": [0, 0]}],
            "b": [{"coeff": 1, "exp": [1, 0]}],
            "c": [{"coeff": 1, "exp": [1, 1]}],
            "d": [{"coeff": 1, "exp": [0, 1]}]
        }
    }
}"#;

fn x(e: &[i64]) -> LaurentPoly {
    LaurentPoly::x(Weight(e.to_vec()))
}

#[test]
fn square_from_file() {
    let g = parse_graph(SQUARE).unwrap();
    let action = g.action().unwrap();
    let f = g.class(&action, "box").unwrap();
    let xi = LatticeVector(vec![1, 2]);
    let chi = character_expand(&f, &polarize(&action, &xi).unwrap())
        .unwrap()
        .poly;
    // product of two copies of 1 + t
    let expected = &(&LaurentPoly::one(2) + &x(&[1, 0])) * &(&LaurentPoly::one(2) + &x(&[0, 1]));
    assert_eq!(chi, expected);
    assert_eq!(character_oracle(&f).unwrap(), expected);

    let residues = vertex_residues(&f, &xi).unwrap();
    let total = residues
        .iter()
        .fold(LaurentPoly::zero(2), |acc, r| &acc + r);
    assert!(total.is_zero());

    let s = as_symplectic(&f).unwrap();
    let m = MomentMap::symplectic(&s, &xi).unwrap();
    for c in m.chamber_representatives() {
        chi_reduced(&f, &m, &c).unwrap();
    }
    let rank = moment_map(&action, &xi).unwrap();
    assert!(
        chi_reduced(&f, &rank, &BigRational::from_integer((-1).into()))
            .unwrap()
            .is_zero()
    );
}

#[test]
fn square_qr_after_shift() {
    let g = parse_graph(SQUARE).unwrap();
    let action = g.action().unwrap();
    let f = g.class(&action, "box").unwrap();
    let shifted = f.mul(&f).scale(&x(&[-1, -1]));
    let s = as_symplectic(&shifted).unwrap();
    // alpha_b = (1, -1) pairs to zero with (1, 1)
    assert!(matches!(
        qr_check(&s, &LatticeVector(vec![1, 1])),
        Err(Error::ZeroNotRegular { .. })
    ));
    let r = qr_check(&s, &LatticeVector(vec![2, -1])).unwrap();
    assert_eq!(r.reduced, LaurentPoly::one(2));
    assert!(r.passed(), "{r}");
}

#[test]
fn files_round_trip_for_generated_graphs() {
    for action in [flag3(), hirzebruch(2)] {
        let one = KClass::constant(&action, &LaurentPoly::one(action.n()));
        let text = to_json(&action, &[("one", &one)]).to_string();
        let g = parse_graph(&text).unwrap();
        let parsed = g.action().unwrap();
        assert_eq!(*parsed, *action);
        assert_eq!(g.class(&parsed, "one").unwrap(), one);
    }
}
