mod common;

use std::collections::BTreeSet;

use highergraph::kan::{check_adjunction, left_kan, restrict, restrict_morphism, triangle_identities, ModelFunctor};
use highergraph::models::{DirectedGraph, MultiRelation, SemiSimplicialSet};
use highergraph::presheaf::{enumerate_morphisms, Presheaf, Violation};
use highergraph::{CellId, Error, MorphismId, ObjectId};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

use common::*;

fn seeds() -> impl Strategy<Value = u64> {
    any::<u64>()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // From face tables, every composite is generated, so the only way to be
    // invalid is through a face identity.
    #[test]
    fn face_identities_agree_with_full_validation(seed in seeds(), corrupt in any::<bool>()) {
        let mut rng = rng(seed);
        let x = random_complex(&mut rng, 5, 4, 3);
        let mut faces = face_tables(&x);
        if corrupt {
            let candidates: Vec<(usize, usize, usize)> = (1..=3)
                .flat_map(|n| (0..=n).map(move |i| (n, i)))
                .flat_map(|(n, i)| (0..faces[n - 1][i].len()).map(move |c| (n, i, c)))
                .collect();
            if let Some(&(n, i, c)) = candidates.choose(&mut rng) {
                let range = x.presheaf().cell_count(&ObjectId::Ordinal(n - 1));
                faces[n - 1][i][c] = rng.gen_range(0..range);
            }
        }
        let p = Presheaf::from_face_maps(x.presheaf().index().clone(), level_labels(&x), &faces).unwrap();
        let faces_ok = p.face_identity_violations().is_empty();
        let report = p.validate();
        prop_assert_eq!(report.is_valid(), faces_ok);
        let composition = report.violations.iter().any(|v| matches!(v, Violation::Composition { .. }));
        prop_assert_eq!(composition, !faces_ok);
    }

    #[test]
    fn subsimplices_are_closed_under_faces(seed in seeds()) {
        let mut rng = rng(seed);
        let x = random_complex(&mut rng, 5, 3, 3);
        let p = x.presheaf();
        for n in 0..=3 {
            for k in 0..p.cell_count(&ObjectId::Ordinal(n)) {
                let c = CellId::new(ObjectId::Ordinal(n), k);
                let subs: BTreeSet<CellId> = x.subsimplices(&c).unwrap().into_iter().collect();
                prop_assert!(subs.contains(&c));
                for s in &subs {
                    let ObjectId::Ordinal(m) = s.object else { unreachable!() };
                    prop_assert!(m < n || *s == c);
                    for i in (0..=m).filter(|_| m > 0) {
                        let f = p.apply(&MorphismId::coface(m, i), s).unwrap();
                        prop_assert!(subs.contains(&f), "face of {} missing from subsimplices of {}", s, c);
                    }
                }
            }
        }
    }

    #[test]
    fn clique_completion_contains_the_graph(seed in seeds()) {
        let mut rng = rng(seed);
        let g = random_loopless_graph(&mut rng, 5, 8);
        let clique = g.clique_completion(3, 10_000_000).unwrap();
        prop_assert!(clique.presheaf().validate().is_valid());
        let skeleton = clique.one_skeleton().unwrap();
        prop_assert_eq!(skeleton.presheaf().canonicalize(), g.presheaf().canonicalize());
    }

    #[test]
    fn multi_relations_give_a_model_or_a_witness(seed in seeds()) {
        let mut rng = rng(seed);
        let n = rng.gen_range(1..=4);
        let ground = names(n);
        let members: Vec<Vec<String>> = (0..rng.gen_range(0..6))
            .map(|_| {
                let mut m: Vec<String> = ground.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
                if m.is_empty() {
                    m.push(ground[0].clone());
                }
                m
            })
            .collect();
        let r = MultiRelation::new(&ground, &members).unwrap();
        match SemiSimplicialSet::from_multi_relation(&r, Some(3)) {
            Ok(x) => {
                prop_assert!(r.is_subset_closed());
                prop_assert!(x.presheaf().validate().is_valid());
                prop_assert_eq!(x.presheaf().total_cells(), r.members().filter(|m| !m.is_empty()).count());
            }
            Err(Error::NotSubsetClosed { member, missing }) => {
                prop_assert!(!r.is_subset_closed());
                let member: BTreeSet<String> = member.into_iter().collect();
                let missing: BTreeSet<String> = missing.into_iter().collect();
                prop_assert!(missing.is_subset(&member) && !missing.is_empty() && missing != member);
                let present: Vec<BTreeSet<String>> =
                    members.iter().map(|m| m.iter().cloned().collect()).collect();
                prop_assert!(present.contains(&member) && !present.contains(&missing));
            }
            Err(e) => prop_assert!(false, "unexpected error {}", e),
        }
    }

    #[test]
    fn basic_graph_is_functorial(seed in seeds()) {
        let mut rng = rng(seed);
        let x = random_complex(&mut rng, 3, 2, 2);
        let y = random_complex(&mut rng, 3, 3, 2);
        let basic = ModelFunctor::basic(x.presheaf().index()).unwrap();
        let (bx, by) = (x.underlying_basic_graph().unwrap(), y.underlying_basic_graph().unwrap());
        for beta in enumerate_morphisms(x.presheaf(), y.presheaf(), 1_000_000).unwrap().iter().take(16) {
            let image = restrict_morphism(&basic, beta);
            prop_assert!(image.check_naturality(&bx, &by).is_natural());
        }
    }

    // Both adjunctions, with both sides small enough to enumerate.
    #[test]
    fn restriction_has_both_adjoints(seed in seeds(), which in 0..2usize) {
        let mut rng = rng(seed);
        let (h, f, g) = if which == 0 {
            let h = ModelFunctor::graph_to_hypergraph(2).unwrap();
            (h, random_graph(&mut rng, 2, 3).into_presheaf(), random_hypergraph(&mut rng, 2, 3, 2).into_presheaf())
        } else {
            let h = ModelFunctor::graph_to_semi_simplicial(2).unwrap();
            (h, random_graph(&mut rng, 3, 3).into_presheaf(), random_complex(&mut rng, 3, 2, 2).into_presheaf())
        };
        let adj = check_adjunction(&h, &f, &g, 1_000_000, true).unwrap();
        prop_assert!(adj.holds());
        prop_assert!(adj.right.is_some());
        prop_assert!(triangle_identities(&h, &f, &g, 1_000_000, true).unwrap().holds());
    }

    #[test]
    fn canonical_form_is_idempotent_and_ignores_input_order(seed in seeds()) {
        let mut rng = rng(seed);
        let n = rng.gen_range(1..=5);
        let mut edges: Vec<(usize, usize, String)> =
            (0..rng.gen_range(0..8)).map(|k| (rng.gen_range(0..n), rng.gen_range(0..n), format!("e{k}"))).collect();
        let build = |edges: &[(usize, usize, String)], order: &[usize]| {
            let vlabels: Vec<Option<String>> = order.iter().map(|&v| Some(format!("v{v}"))).collect();
            let position: Vec<usize> = (0..n).map(|v| order.iter().position(|&w| w == v).unwrap()).collect();
            let pairs: Vec<(usize, usize)> = edges.iter().map(|(s, t, _)| (position[*s], position[*t])).collect();
            DirectedGraph::from_indices(vlabels, edges.iter().map(|e| Some(e.2.clone())).collect(), &pairs).unwrap()
        };
        let identity: Vec<usize> = (0..n).collect();
        let a = build(&edges, &identity);
        let mut order = identity.clone();
        order.shuffle(&mut rng);
        edges.shuffle(&mut rng);
        let b = build(&edges, &order);
        let canonical = a.presheaf().canonicalize();
        prop_assert_eq!(canonical.canonicalize(), canonical.clone());
        prop_assert_eq!(b.presheaf().canonicalize(), canonical);
    }
}

// R_A L_A is the identity only up to the degenerate cells L_A adds: a
// hyperedge with k vertices comes back together with its degenerate
// companions, so raw counts grow while nondegenerate counts match.
#[test]
fn simplicial_round_trip_adds_degenerate_tuples() {
    let a = ModelFunctor::hypergraph_to_simplicial(3).unwrap();
    let i = ModelFunctor::graph_to_hypergraph(3).unwrap();
    let g = graph_from_indices(3, &[(0, 1), (1, 2)]);
    let h = left_kan(&i, g.presheaf()).unwrap().presheaf;
    let back = restrict(&a, &left_kan(&a, &h).unwrap().presheaf).unwrap();
    assert_eq!(back.cell_count(&ObjectId::Vertex), 3);
    assert_eq!(back.cell_count(&ObjectId::Edge(1)), 3);
    assert!(back.cell_count(&ObjectId::Edge(2)) > h.cell_count(&ObjectId::Edge(2)));
    assert_ne!(back.cell_counts(), h.cell_counts());
}
