use heightone::chains::gadget::check_certificate;
use heightone::chains::{for_each_coloring, glue, verify_gadget};
use heightone::format::{read_gadget, write_gadget};
use heightone::solver::three_color;
use heightone::Graph;

fn fixture() -> heightone::chains::Gadget {
    read_gadget(include_str!("../../../fixtures/gadget12.gadget")).unwrap()
}

#[test]
fn fixture_has_all_three_properties() {
    let g = fixture();
    let cert = verify_gadget(&g).unwrap();
    assert!(cert.colorings > 0);
    assert_eq!(cert.p2.len(), 36);
    assert_eq!(cert.p3.len(), 9);
    assert!(check_certificate(&g, &cert));
    assert_eq!(read_gadget(&write_gadget(&g)).unwrap(), g);
}

#[test]
fn glued_k4s_are_critical() {
    let k4 = Graph::complete(4);
    let gadget = fixture();
    let (w, d) = glue(&k4, (0, 1), &k4, (0, 1), &gadget).unwrap();
    assert_eq!(w.vertex_count(), 4 + 4 + 12 - 4);
    assert!(three_color(&w).is_none());
    let w_minus = w.remove_edge(d.0, d.1).unwrap();
    assert!(three_color(&w_minus).is_some());
    // In any colouring of W - d, both glued edges see equal endpoint colours,
    // since K4 minus an edge forces its endpoints together.
    let n = for_each_coloring(&w_minus, 3, |c| {
        assert_eq!(c[0], c[1]);
        assert_eq!(c[4], c[5]);
        true
    });
    assert!(n > 0);
}
