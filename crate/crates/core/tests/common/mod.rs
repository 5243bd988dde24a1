#![allow(dead_code)]

use std::collections::BTreeSet;

use highergraph::models::{DirectedGraph, DirectedHypergraph, MultiRelation, SemiSimplicialSet};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn names(n: usize) -> Vec<String> {
    (0..n).map(|k| format!("v{k}")).collect()
}

/// A random multigraph with labelled vertices and edges; loops allowed.
pub fn random_graph(rng: &mut StdRng, max_vertices: usize, max_edges: usize) -> DirectedGraph {
    let n = rng.gen_range(1..=max_vertices);
    let m = rng.gen_range(0..=max_edges);
    let edges: Vec<(usize, usize)> = (0..m).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
    graph_from_indices(n, &edges)
}

/// A random graph with no loops, as the clique oracle needs none.
pub fn random_loopless_graph(rng: &mut StdRng, max_vertices: usize, max_edges: usize) -> DirectedGraph {
    let n = rng.gen_range(1..=max_vertices);
    let m = if n < 2 { 0 } else { rng.gen_range(0..=max_edges) };
    let edges: Vec<(usize, usize)> = (0..m)
        .map(|_| {
            let s = rng.gen_range(0..n);
            let mut t = rng.gen_range(0..n - 1);
            if t >= s {
                t += 1;
            }
            (s, t)
        })
        .collect();
    graph_from_indices(n, &edges)
}

pub fn graph_from_indices(n: usize, edges: &[(usize, usize)]) -> DirectedGraph {
    DirectedGraph::from_indices(
        names(n).into_iter().map(Some).collect(),
        (0..edges.len()).map(|k| Some(format!("e{k}"))).collect(),
        edges,
    )
    .unwrap()
}

pub fn random_hypergraph(
    rng: &mut StdRng,
    max_vertices: usize,
    max_edges: usize,
    truncation: usize,
) -> DirectedHypergraph {
    let n = rng.gen_range(1..=max_vertices);
    let m = rng.gen_range(0..=max_edges);
    let vertices = names(n);
    let groups: Vec<Vec<String>> = (0..m)
        .map(|_| {
            let len = rng.gen_range(1..=truncation);
            (0..len).map(|_| vertices[rng.gen_range(0..n)].clone()).collect()
        })
        .collect();
    DirectedHypergraph::from_groups(&vertices, &groups, truncation).unwrap()
}

/// The downward closure of a few random vertex sets, as a semi-simplicial
/// set of the given truncation.
pub fn random_complex(
    rng: &mut StdRng,
    max_vertices: usize,
    max_facets: usize,
    truncation: usize,
) -> SemiSimplicialSet {
    let n = rng.gen_range(1..=max_vertices);
    let mut members: BTreeSet<BTreeSet<usize>> = (0..n).map(|v| BTreeSet::from([v])).collect();
    for _ in 0..rng.gen_range(0..=max_facets) {
        let size = rng.gen_range(1..=(truncation + 1).min(n));
        let mut facet = BTreeSet::new();
        while facet.len() < size {
            facet.insert(rng.gen_range(0..n));
        }
        let facet: Vec<usize> = facet.into_iter().collect();
        for mask in 1u32..(1 << facet.len()) {
            members.insert(facet.iter().enumerate().filter(|(k, _)| mask & (1 << k) != 0).map(|(_, &v)| v).collect());
        }
    }
    let ground = names(n);
    let lists: Vec<Vec<&str>> = members.iter().map(|m| m.iter().map(|&v| ground[v].as_str()).collect()).collect();
    let r = MultiRelation::new(&ground, &lists).unwrap();
    SemiSimplicialSet::from_multi_relation(&r, Some(truncation)).unwrap()
}

/// Face tables `faces[n - 1][i]` of a semi-simplicial set.
pub fn face_tables(x: &SemiSimplicialSet) -> Vec<Vec<Vec<usize>>> {
    use highergraph::MorphismId;
    (1..=x.truncation())
        .map(|n| (0..=n).map(|i| x.presheaf().action(&MorphismId::coface(n, i)).unwrap().to_vec()).collect())
        .collect()
}

pub fn level_labels(x: &SemiSimplicialSet) -> Vec<Vec<Option<String>>> {
    (0..=x.truncation()).map(|n| x.presheaf().labels_at(n).to_vec()).collect()
}
