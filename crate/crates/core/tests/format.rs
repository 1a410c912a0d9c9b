use std::sync::Arc;

use strata::format::{interval_fixture, sheaf_document, Workspace};
use strata::geometry::SimplicialComplex;
use strata::{Error, Field, Sheaf};

const GOLDEN: &str = include_str!("../../../fixtures/interval.strata");
const DEMO: &str = include_str!("../../../fixtures/demo.strata");

#[test]
fn interval_fixture_matches_golden_file() {
    assert_eq!(interval_fixture().to_text(), GOLDEN);
    assert_eq!(Workspace::parse(GOLDEN).unwrap().to_text(), GOLDEN);
}

#[test]
fn demo_fixture_round_trips() {
    let ws = Workspace::parse(DEMO).unwrap();
    assert_eq!(ws.to_text(), DEMO);
    assert_eq!(ws.kernel("eta").unwrap().source().len(), 3);
    assert!(ws.stops("circle2").unwrap().is_full());
}

#[test]
fn d_squared_names_degree_pair() {
    let t = "strata v1\nfield q\ncomplex c\nlo -1\ndims 1 1 1\nd -1 1x1 [2]\nd 0 1x1 [1/2]\nend\n";
    let e = Workspace::parse(t).unwrap_err();
    assert!(e.to_string().contains("between degrees -1 and 1"), "{e}");
}

#[test]
fn non_functorial_restrictions_name_the_chain() {
    let p = SimplicialComplex::simplex(2).face_poset();
    let text = sheaf_document("k", &Sheaf::constant(p, Field::Rationals));
    let bad = text.replacen("rho 0-1 0 0 1x1 [1]", "rho 0-1 0 0 1x1 [2]", 1);
    assert_ne!(bad, text);
    let e = Workspace::parse(&bad).unwrap_err().to_string();
    assert!(e.contains("not functorial along chain"), "{e}");
    assert!(e.contains("0-1-2") && e.contains('0'), "{e}");
}

#[test]
fn errors_carry_positions() {
    let cases = [
        ("strata v2\n", 1, 1),
        ("strata v1\nfield r\n", 2, 7),
        ("strata v1\nfield q\nsheaf f on Z\nend\n", 3, 12),
        ("strata v1\nfield q\ncomplex c\nlo 0\ndims 2\nd 0 1x2 [1 2 3]\nend\n", 6, 10),
    ];
    for (t, line, col) in cases {
        match Workspace::parse(t) {
            Err(Error::Parse { line: l, col: c, .. }) => assert_eq!((l, c), (line, col), "{t:?}"),
            other => panic!("{t:?}: {other:?}"),
        }
    }
}

#[test]
fn prime_field_entries_round_trip() {
    let p = SimplicialComplex::interval().face_poset();
    let f = Field::prime(5).unwrap();
    let text = sheaf_document("k", &Sheaf::constant(p, f).shift(2));
    let ws = Workspace::parse(&text).unwrap();
    assert_eq!(ws.field, f);
    assert_eq!(ws.to_text(), text);
    assert!(Arc::ptr_eq(ws.sheaf("k").unwrap(), ws.sheaf("k").unwrap()));
}
