//! Constrained orientation counts of multigraphs, partition counts of cover
//! hypergraphs, G-map and matching counts, and their exhaustive verifiers.

mod count;
mod generate;
mod gmap;
mod graph;
mod hypergraph;
mod lemma;

pub use count::{count_orientations, out_degree_distribution, NTable, MAX_ORIENTATION_EDGES, MAX_TABLE_ENTRIES};
pub use generate::{canonical, connected_multigraphs, multigraphs};
pub use gmap::{
    count_gmaps, count_matchings, verify_gmap_ulc, verify_matching_ulc, verify_matching_ulc_exhaustive, BipartiteSystem,
    MAX_GMAP_CANDIDATES, MAX_MATCHING_VERTICES,
};
pub use graph::{DegreeDemand, GraphFile, Multigraph};
pub use hypergraph::{
    count_partitions, cover_structures, partition_counts, partition_counts_brute, verify_hyplemma,
    verify_hyplemma_exhaustive,
    CoverHypergraph, DemandEdge, MAX_GROUND,
};
pub use lemma::{verify_glemma, verify_glemma_exhaustive, verify_gphcor, MAX_QUADRUPLES};
