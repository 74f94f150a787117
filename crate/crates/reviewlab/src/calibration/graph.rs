//! Bipartite paper–reviewer assignment graph and its connected components.
//!
//! Each review is one edge between a paper and a reviewer. The calibration
//! model's covariance couples two reviews only when they share a paper or a
//! reviewer, so the likelihood factorizes over the connected components of
//! this graph and every solve can be done block by block.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{PaperId, ReviewRecord, ReviewerId};

/// Errors constructing an [`AssignmentGraph`].
#[derive(Debug, Error)]
pub enum GraphError {
    #[error("duplicate review edge for paper `{paper}`, reviewer `{reviewer}`")]
    DuplicateReview { paper: PaperId, reviewer: ReviewerId },
    #[error("edge ({paper}, {reviewer}) is out of range for {n_papers} papers / {n_reviewers} reviewers")]
    EdgeOutOfRange { paper: usize, reviewer: usize, n_papers: usize, n_reviewers: usize },
    #[error("duplicate edge ({paper}, {reviewer})")]
    DuplicateEdge { paper: usize, reviewer: usize },
}

/// The bipartite assignment graph: papers and reviewers as vertices, one
/// edge per review. Edges are kept sorted by (paper index, reviewer index);
/// score vectors are aligned with that edge order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssignmentGraph {
    paper_ids: Vec<PaperId>,
    reviewer_ids: Vec<ReviewerId>,
    edges: Vec<(usize, usize)>,
}

impl AssignmentGraph {
    /// Builds the graph from review records and returns it together with the
    /// quality-score vector aligned to the graph's edge order.
    ///
    /// Paper and reviewer indices follow the sorted order of their ids, so
    /// the construction is independent of input row order.
    pub fn from_reviews(reviews: &[ReviewRecord]) -> Result<(Self, Vec<f64>), GraphError> {
        Self::from_reviews_scored(reviews, |r| f64::from(r.quality))
    }

    /// Like [`AssignmentGraph::from_reviews`] but with a caller-chosen score
    /// per review (e.g. confidence instead of quality).
    pub fn from_reviews_scored(
        reviews: &[ReviewRecord],
        score: impl Fn(&ReviewRecord) -> f64,
    ) -> Result<(Self, Vec<f64>), GraphError> {
        let mut paper_index: BTreeMap<&PaperId, usize> = BTreeMap::new();
        let mut reviewer_index: BTreeMap<&ReviewerId, usize> = BTreeMap::new();
        for r in reviews {
            paper_index.entry(&r.paper_id).or_default();
            reviewer_index.entry(&r.reviewer_id).or_default();
        }
        for (i, v) in paper_index.values_mut().enumerate() {
            *v = i;
        }
        for (j, v) in reviewer_index.values_mut().enumerate() {
            *v = j;
        }

        let mut keyed: Vec<((usize, usize), f64)> = Vec::with_capacity(reviews.len());
        for r in reviews {
            let i = paper_index[&r.paper_id];
            let j = reviewer_index[&r.reviewer_id];
            keyed.push(((i, j), score(r)));
        }
        keyed.sort_by_key(|(e, _)| *e);
        for w in keyed.windows(2) {
            if w[0].0 == w[1].0 {
                let (i, j) = w[0].0;
                return Err(GraphError::DuplicateReview {
                    paper: paper_index.iter().find(|(_, v)| **v == i).map(|(k, _)| (*k).clone()).unwrap(),
                    reviewer: reviewer_index
                        .iter()
                        .find(|(_, v)| **v == j)
                        .map(|(k, _)| (*k).clone())
                        .unwrap(),
                });
            }
        }

        let graph = AssignmentGraph {
            paper_ids: paper_index.keys().map(|p| (*p).clone()).collect(),
            reviewer_ids: reviewer_index.keys().map(|r| (*r).clone()).collect(),
            edges: keyed.iter().map(|(e, _)| *e).collect(),
        };
        let scores = keyed.into_iter().map(|(_, s)| s).collect();
        Ok((graph, scores))
    }

    /// Builds a graph directly from index edges, with synthesized ids
    /// (`p0`, `p1`, … / `r0`, `r1`, …). Intended for simulations and tests.
    pub fn from_edges(
        n_papers: usize,
        n_reviewers: usize,
        mut edges: Vec<(usize, usize)>,
    ) -> Result<Self, GraphError> {
        edges.sort_unstable();
        for w in edges.windows(2) {
            if w[0] == w[1] {
                return Err(GraphError::DuplicateEdge { paper: w[0].0, reviewer: w[0].1 });
            }
        }
        for &(i, j) in &edges {
            if i >= n_papers || j >= n_reviewers {
                return Err(GraphError::EdgeOutOfRange {
                    paper: i,
                    reviewer: j,
                    n_papers,
                    n_reviewers,
                });
            }
        }
        Ok(AssignmentGraph {
            paper_ids: (0..n_papers).map(|i| PaperId(format!("p{i}"))).collect(),
            reviewer_ids: (0..n_reviewers).map(|j| ReviewerId(format!("r{j}"))).collect(),
            edges,
        })
    }

    pub fn n_papers(&self) -> usize {
        self.paper_ids.len()
    }

    pub fn n_reviewers(&self) -> usize {
        self.reviewer_ids.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges as (paper index, reviewer index), sorted ascending. Score
    /// vectors passed to the calibration functions use this order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn paper_ids(&self) -> &[PaperId] {
        &self.paper_ids
    }

    pub fn reviewer_ids(&self) -> &[ReviewerId] {
        &self.reviewer_ids
    }

    /// Number of reviews per paper.
    pub fn paper_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n_papers()];
        for &(i, _) in &self.edges {
            d[i] += 1;
        }
        d
    }

    /// Number of reviews per reviewer.
    pub fn reviewer_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n_reviewers()];
        for &(_, j) in &self.edges {
            d[j] += 1;
        }
        d
    }
}

/// One connected component of the assignment graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentBlock {
    /// Paper indices in this component, ascending.
    pub papers: Vec<usize>,
    /// Reviewer indices in this component, ascending.
    pub reviewers: Vec<usize>,
    /// Edge indices in this component, ascending.
    pub edges: Vec<usize>,
}

/// Partition of the graph's edges (and edge-bearing vertices) into connected
/// components. Papers or reviewers without any review belong to no block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Components {
    /// Blocks ordered by their smallest paper index.
    pub blocks: Vec<ComponentBlock>,
    /// Block index of every edge.
    pub component_of_edge: Vec<usize>,
}

impl Components {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

/// Splits the bipartite graph into connected components by breadth-first
/// search. Deterministic: blocks are ordered by smallest paper index and
/// every index list inside a block is ascending.
pub fn connected_components(graph: &AssignmentGraph) -> Components {
    let n = graph.n_papers();
    let m = graph.n_reviewers();
    let mut paper_edges: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut reviewer_edges: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (e, &(i, j)) in graph.edges().iter().enumerate() {
        paper_edges[i].push(e);
        reviewer_edges[j].push(e);
    }

    let mut paper_block = vec![usize::MAX; n];
    let mut reviewer_block = vec![usize::MAX; m];
    let mut blocks = Vec::new();

    for start in 0..n {
        if paper_block[start] != usize::MAX || paper_edges[start].is_empty() {
            continue;
        }
        let block_id = blocks.len();
        let mut papers = Vec::new();
        let mut reviewers = Vec::new();
        let mut queue = std::collections::VecDeque::from([start]);
        paper_block[start] = block_id;
        while let Some(i) = queue.pop_front() {
            papers.push(i);
            for &e in &paper_edges[i] {
                let j = graph.edges()[e].1;
                if reviewer_block[j] == usize::MAX {
                    reviewer_block[j] = block_id;
                    reviewers.push(j);
                    for &e2 in &reviewer_edges[j] {
                        let i2 = graph.edges()[e2].0;
                        if paper_block[i2] == usize::MAX {
                            paper_block[i2] = block_id;
                            queue.push_back(i2);
                        }
                    }
                }
            }
        }
        papers.sort_unstable();
        reviewers.sort_unstable();
        blocks.push(ComponentBlock { papers, reviewers, edges: Vec::new() });
    }

    let mut component_of_edge = vec![0usize; graph.n_edges()];
    for (e, &(i, _)) in graph.edges().iter().enumerate() {
        let b = paper_block[i];
        component_of_edge[e] = b;
        blocks[b].edges.push(e);
    }

    Components { blocks, component_of_edge }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disjoint_stars_make_two_blocks() {
        let g = AssignmentGraph::from_edges(2, 2, vec![(0, 0), (1, 1)]).unwrap();
        let c = connected_components(&g);
        assert_eq!(c.len(), 2);
        assert_eq!(c.blocks[0].edges, vec![0]);
        assert_eq!(c.blocks[1].edges, vec![1]);
        assert_eq!(c.component_of_edge, vec![0, 1]);
    }

    #[test]
    fn bridging_edge_merges_blocks() {
        let g = AssignmentGraph::from_edges(2, 2, vec![(0, 0), (0, 1), (1, 1)]).unwrap();
        let c = connected_components(&g);
        assert_eq!(c.len(), 1);
        assert_eq!(c.blocks[0].papers, vec![0, 1]);
        assert_eq!(c.blocks[0].reviewers, vec![0, 1]);
        assert_eq!(c.blocks[0].edges, vec![0, 1, 2]);
    }

    #[test]
    fn duplicate_edge_rejected() {
        let err = AssignmentGraph::from_edges(2, 2, vec![(0, 0), (0, 0)]).unwrap_err();
        assert!(matches!(err, GraphError::DuplicateEdge { paper: 0, reviewer: 0 }));
    }

    #[test]
    fn isolated_vertices_belong_to_no_block() {
        let g = AssignmentGraph::from_edges(3, 3, vec![(0, 0)]).unwrap();
        let c = connected_components(&g);
        assert_eq!(c.len(), 1);
        assert_eq!(c.blocks[0].papers, vec![0]);
    }
}
