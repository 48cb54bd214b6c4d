use std::time::Instant;

use proptest::prelude::*;

use heightone::chains::{glue_chain, tensor_chain};
use heightone::conditions::{implies_via_hom, sigma_of_graph};
use heightone::format::read_gadget;
use heightone::indicator::{satisfies, transfer_witness, validate_tables, Satisfaction};
use heightone::solver::replay::check_coloring;
use heightone::solver::{find_hom, three_color};
use heightone::{Graph, RelStructure};

fn k3() -> RelStructure {
    RelStructure::from_graph(&Graph::complete(3))
}

#[test]
fn glued_chain_steps_are_critical_and_refute_k3() {
    let gadget = read_gadget(include_str!("../../../fixtures/gadget12.gadget")).unwrap();
    let steps = glue_chain(3, &gadget, 4, 1 << 12).unwrap();
    assert_eq!(steps.iter().map(|s| s.graph.vertex_count()).collect::<Vec<_>>(), [4, 16, 28]);
    for s in &steps {
        assert!(s.coloring.is_exhausted());
        assert!(three_color(&s.graph).is_none());
        let without = s.graph.remove_edge(s.d.0, s.d.1).unwrap();
        assert!(check_coloring(&without, &s.critical, 3));
    }
    let start = Instant::now();
    let answer = satisfies(&k3(), &sigma_of_graph(&steps[1].graph)).unwrap();
    assert!(matches!(answer, Satisfaction::Exhausted { .. }));
    eprintln!("K3 against the second glued graph: {:.2?}", start.elapsed());
}

#[test]
fn tensor_chain_respects_vertex_cap() {
    // With one graph available the chain is the tensor powers of K4.
    let steps = tensor_chain(2, 4, 16).unwrap();
    assert_eq!(steps[1].graph.vertex_count(), 16);
    assert!(tensor_chain(3, 4, 63).is_err());
}

fn small_graph() -> impl Strategy<Value = Graph> {
    (1usize..7).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..12)
            .prop_map(move |e| Graph::new(n, e.into_iter().filter(|&(u, v)| u != v)).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    // A homomorphism g -> K3 turns the K3 template's witness for its own
    // condition into a witness for the condition of g.
    #[test]
    fn witnesses_pull_back_along_homomorphisms(g in small_graph()) {
        let triangle = Graph::complete(3);
        let own = satisfies(&k3(), &sigma_of_graph(&triangle)).unwrap();
        let own = own.tables().unwrap();
        match implies_via_hom(&g, &triangle) {
            Some(map) => {
                let tables = transfer_witness(&g, &triangle, &map, own).unwrap();
                validate_tables(&k3(), &sigma_of_graph(&g), &tables).unwrap();
            }
            None => {
                prop_assert!(find_hom(&g, &triangle).is_none());
                let s = satisfies(&k3(), &sigma_of_graph(&g)).unwrap();
                let exhausted = matches!(s, Satisfaction::Exhausted { .. });
                prop_assert!(exhausted);
            }
        }
    }
}
