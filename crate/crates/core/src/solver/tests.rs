use proptest::prelude::*;

use super::replay::{check_assignment, check_coloring, check_homomorphism};
use super::*;
use crate::graph::{tensor_product, Graph};
use crate::tuples;

/// Oracle: try every assignment.
fn brute_force(instance: &CspInstance) -> Option<Vec<usize>> {
    let n = instance.var_count();
    let d = instance.domain_size();
    if d == 0 {
        return (n == 0).then(Vec::new);
    }
    let mut values = vec![0; n];
    loop {
        if check_assignment(instance, &values).is_ok() {
            return Some(values);
        }
        if !tuples::advance(&mut values, d) {
            return None;
        }
    }
}

#[test]
fn single_free_variable_takes_first_value() {
    let csp = CspInstance::new(1, 2).unwrap();
    assert_eq!(solve(&csp), Certificate::Assignment { values: vec![0] });
}

#[test]
fn equality_against_inequality_is_exhausted() {
    let mut csp = CspInstance::new(2, 2).unwrap();
    let r = csp.add_relation(2, [[0, 1]]).unwrap();
    csp.add_constraint(&[0, 1], r).unwrap();
    csp.add_equality(0, 1).unwrap();
    let cert = solve(&csp);
    assert_eq!(cert, Certificate::Exhausted { digest: csp.digest() });
    let unmerged = solve_with(&csp, &SolveOptions { merge_equalities: false, ..Default::default() });
    assert!(unmerged.is_exhausted());
}

#[test]
fn k4_is_not_three_colourable() {
    let csp = hom_instance(&Graph::complete(4), &Graph::complete(3));
    assert!(solve(&csp).is_exhausted());
    assert_eq!(three_color(&Graph::complete(4)), None);
}

#[test]
fn homomorphism_examples() {
    let k3 = Graph::complete(3);
    let map = find_hom(&k3, &k3).unwrap();
    let mut sorted = map.clone();
    sorted.sort();
    assert_eq!(sorted, vec![0, 1, 2]);
    assert!(find_hom(&Graph::complete(4), &k3).is_none());
    let c5 = Graph::cycle(5);
    let col = find_hom(&c5, &k3).unwrap();
    assert!(check_homomorphism(&c5, &k3, &col));
}

#[test]
fn three_colour_examples() {
    assert!(three_color(&Graph::complete(3)).is_some());
    assert!(three_color(&Graph::loop_vertex()).is_none());
    let k4 = Graph::complete(4);
    assert!(three_color(&tensor_product(&k4, &k4)).is_none());
    let p = Graph::petersen();
    assert!(check_coloring(&p, &three_color(&p).unwrap(), 3));
}

#[test]
fn loops_map_only_to_loops() {
    let target = Graph::new(2, [(0, 1), (1, 1)]).unwrap();
    assert_eq!(find_hom(&Graph::loop_vertex(), &target), Some(vec![1]));
    assert_eq!(find_hom(&Graph::loop_vertex(), &Graph::complete(5)), None);
}

#[test]
fn large_domain_binary_constraints() {
    // A 200-vertex path maps into a 130-cycle; domains span several words.
    let path = Graph::new(200, (0..199).map(|i| (i, i + 1))).unwrap();
    let c = Graph::cycle(130);
    let map = find_hom(&path, &c).unwrap();
    assert!(check_homomorphism(&path, &c, &map));
    assert!(find_hom(&Graph::cycle(129), &Graph::cycle(130)).is_none());
}

#[test]
fn repeated_variables_in_scope() {
    let mut csp = CspInstance::new(2, 3).unwrap();
    let r = csp.add_relation(3, [[0, 1, 0], [2, 2, 1]]).unwrap();
    csp.add_constraint(&[0, 1, 0], r).unwrap();
    assert_eq!(solve(&csp), Certificate::Assignment { values: vec![0, 1] });
    let mut csp = CspInstance::new(1, 3).unwrap();
    let r = csp.add_relation(2, [[0, 1], [1, 2]]).unwrap();
    csp.add_constraint(&[0, 0], r).unwrap();
    assert!(solve(&csp).is_exhausted());
}

#[test]
fn malformed_instances_are_rejected() {
    let mut csp = CspInstance::new(2, 2).unwrap();
    assert!(csp.add_relation(2, [[0, 2]]).is_err());
    assert!(csp.add_relation(2, [[0]]).is_err());
    let r = csp.add_relation(2, [[0, 1]]).unwrap();
    assert!(csp.add_constraint(&[0, 2], r).is_err());
    assert!(csp.add_constraint(&[0], r).is_err());
    assert!(csp.add_equality(0, 5).is_err());
}

#[test]
fn bit_helpers() {
    let words = [0b1010u64, 1];
    assert_eq!(engine::bits_roundtrip(&words), vec![1, 3, 64]);
    assert_eq!(engine::next_bit_after(&words, None), Some(1));
    assert_eq!(engine::next_bit_after(&words, Some(3)), Some(64));
    assert_eq!(engine::next_bit_after(&words, Some(64)), None);
    assert_eq!(engine::next_bit_after(&words, Some(63)), Some(64));
}

#[test]
fn digest_depends_on_content() {
    let a = hom_instance(&Graph::complete(3), &Graph::complete(3));
    let b = hom_instance(&Graph::cycle(3), &Graph::complete(3));
    let c = hom_instance(&Graph::complete(4), &Graph::complete(3));
    assert_eq!(a.digest(), b.digest());
    assert_ne!(a.digest(), c.digest());
}

fn arb_instance() -> impl Strategy<Value = CspInstance> {
    (1usize..=12, 1usize..=3).prop_flat_map(|(n, d)| {
        let tuple = move |k: usize| proptest::collection::vec(0..d, k);
        let relation = (1usize..=3).prop_flat_map(move |k| {
            (Just(k), proptest::collection::vec(tuple(k), 0..=(d.pow(k as u32))))
        });
        let constraint = relation.prop_flat_map(move |(k, rows)| {
            (Just(rows), proptest::collection::vec(0..n, k))
        });
        (
            Just((n, d)),
            proptest::collection::vec(constraint, 0..8),
            proptest::collection::vec((0..n, 0..n), 0..3),
        )
            .prop_map(|((n, d), cons, eqs)| {
                let mut csp = CspInstance::new(n, d).unwrap();
                for (rows, scope) in cons {
                    let r = csp.add_relation(scope.len(), rows).unwrap();
                    csp.add_constraint(&scope, r).unwrap();
                }
                for (a, b) in eqs {
                    csp.add_equality(a, b).unwrap();
                }
                csp
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn agrees_with_enumeration(csp in arb_instance()) {
        let oracle = brute_force(&csp);
        let merged = solve(&csp);
        let unmerged = solve_with(&csp, &SolveOptions { merge_equalities: false, ..Default::default() });
        prop_assert_eq!(oracle.is_some(), !merged.is_exhausted());
        prop_assert_eq!(oracle.is_some(), !unmerged.is_exhausted());
        if let Some(values) = merged.values() {
            prop_assert!(check_assignment(&csp, values).is_ok());
        }
        if let Some(values) = unmerged.values() {
            prop_assert!(check_assignment(&csp, values).is_ok());
        }
        prop_assert_eq!(solve(&csp), merged);
    }

    #[test]
    fn symmetric_colouring_agrees_with_plain_search(
        n in 1usize..=9,
        edges in proptest::collection::vec((0usize..9, 0usize..9), 0..24),
        k in 1usize..=4,
    ) {
        let g = Graph::new(n, edges.into_iter().filter(|&(u, v)| u < n && v < n && u != v)).unwrap();
        let target = Graph::complete(k);
        let csp = hom_instance(&g, &target);
        let plain = solve(&csp);
        let symmetric = find_hom(&g, &target);
        prop_assert_eq!(plain.is_exhausted(), symmetric.is_none());
        if let Some(map) = symmetric {
            prop_assert!(check_coloring(&g, &map, k));
        }
    }
}

#[test]
fn k4_cubed_is_not_three_colourable() {
    let k4 = Graph::complete(4);
    let g = tensor_product(&tensor_product(&k4, &k4), &k4);
    assert_eq!(g.vertex_count(), 64);
    assert!(three_color(&g).is_none());
}
