//! Fully connected weighted networks built from reduced-space distances.
//!
//! Link weights are bilateral exposures `B_ij = 1 / d_ij`. Node strength is
//! the row sum of `B`; closeness is the row sum of the distances (lower is
//! more central); continuous clustering averages the product of neighbor
//! degrees `exp(-d / mean(d))` over all triangles.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{mean_off_diagonal, ReducedSpace};

/// Distances below this are raised to it before inversion, so coincident
/// entities get a finite exposure of `1 / DISTANCE_FLOOR`.
pub const DISTANCE_FLOOR: f64 = 1e-8;

fn validate_distances(d: &DMatrix<f64>) -> Result<usize> {
    let n = d.nrows();
    if d.ncols() != n {
        return Err(Error::invalid(format!("distance matrix is {}x{}", n, d.ncols())));
    }
    for i in 0..n {
        for j in 0..n {
            let v = d[(i, j)];
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(format!("invalid distance {v} at ({i}, {j})")));
            }
            if (v - d[(j, i)]).abs() > 1e-12 {
                return Err(Error::invalid(format!("asymmetric distance at ({i}, {j})")));
            }
        }
    }
    Ok(n)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExposureNetwork {
    entity_ids: Vec<String>,
    weights: DMatrix<f64>,
    floor_applied: Vec<(usize, usize)>,
}

impl ExposureNetwork {
    /// Exposure network over an arbitrary symmetric non-negative distance
    /// matrix.
    pub fn from_distances(entity_ids: Vec<String>, d: &DMatrix<f64>) -> Result<Self> {
        let n = validate_distances(d)?;
        if entity_ids.len() != n {
            return Err(Error::invalid(format!("{} ids for {n} rows", entity_ids.len())));
        }
        let mut weights = DMatrix::zeros(n, n);
        let mut floor_applied = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let dist = d[(i, j)];
                if dist < DISTANCE_FLOOR {
                    floor_applied.push((i, j));
                }
                let w = 1.0 / dist.max(DISTANCE_FLOOR);
                weights[(i, j)] = w;
                weights[(j, i)] = w;
            }
        }
        Ok(Self {
            entity_ids,
            weights,
            floor_applied,
        })
    }

    pub fn entity_ids(&self) -> &[String] {
        &self.entity_ids
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    /// Pairs `(i, j)`, `i < j`, whose distance was raised to the floor.
    pub fn floor_applied(&self) -> &[(usize, usize)] {
        &self.floor_applied
    }

    pub fn len(&self) -> usize {
        self.entity_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entity_ids.is_empty()
    }

    pub fn index_of(&self, entity: &str) -> Result<usize> {
        self.entity_ids
            .iter()
            .position(|e| e == entity)
            .ok_or_else(|| Error::UnknownEntity(entity.to_string()))
    }

    /// Row sums of the weight matrix.
    pub fn strengths(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.weights.row(k).sum()).collect()
    }
}

pub fn exposure_network(rs: &ReducedSpace) -> Result<ExposureNetwork> {
    ExposureNetwork::from_distances(rs.entity_ids().to_vec(), rs.distances())
}

/// Total weight of the links touching `entity`.
pub fn strength(net: &ExposureNetwork, entity: &str) -> Result<f64> {
    let k = net.index_of(entity)?;
    Ok(net.weights.row(k).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

/// All links sorted by descending weight, ties by `(i, j)`.
pub fn ranked_links(net: &ExposureNetwork) -> Vec<Link> {
    let n = net.len();
    let mut links = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            links.push(Link {
                i,
                j,
                weight: net.weights[(i, j)],
            });
        }
    }
    links.sort_by(|a, b| b.weight.total_cmp(&a.weight).then((a.i, a.j).cmp(&(b.i, b.j))));
    links
}

/// The `k` strongest links.
pub fn top_links(net: &ExposureNetwork, k: usize) -> Result<Vec<Link>> {
    let n = net.len();
    let pairs = n * n.saturating_sub(1) / 2;
    if k > pairs {
        return Err(Error::invalid(format!("top-{k} requested but only {pairs} links exist")));
    }
    let mut links = ranked_links(net);
    links.truncate(k);
    Ok(links)
}

/// Neighbor degrees `exp(-d_ij / mean(d))`, zero on the diagonal.
pub fn neighbor_degree(d: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = validate_distances(d)?;
    let mean = mean_off_diagonal(d);
    if mean <= 0.0 {
        return Err(Error::Degenerate("all reduced distances are zero".into()));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            (-d[(i, j)] / mean).exp()
        }
    }))
}

/// Continuous clustering coefficient of a distance configuration.
///
/// Each unordered triangle stands for its six ordered triples, so the sum
/// over `i < j < k` times 6 equals the sum over pairwise-distinct ordered
/// triples.
pub fn clustering_of_distances(d: &DMatrix<f64>) -> Result<f64> {
    let n = d.nrows();
    if n < 3 {
        return Err(Error::invalid(format!("clustering needs 3 entities, got {n}")));
    }
    let v = neighbor_degree(d)?;
    let mut sum = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let vij = v[(i, j)];
            for k in (j + 1)..n {
                sum += vij * v[(j, k)] * v[(i, k)];
            }
        }
    }
    Ok(6.0 * sum / (n * (n - 1) * (n - 2)) as f64)
}

pub fn continuous_clustering(rs: &ReducedSpace) -> Result<f64> {
    clustering_of_distances(rs.distances())
}

/// Sum of distances from every node to all others.
pub fn closeness_of_distances(d: &DMatrix<f64>) -> Vec<f64> {
    (0..d.nrows()).map(|k| d.row(k).sum()).collect()
}

/// Closeness of one entity: the sum of its reduced distances to all others.
pub fn closeness_centrality(rs: &ReducedSpace, entity: &str) -> Result<f64> {
    let k = rs
        .entity_ids()
        .iter()
        .position(|e| e == entity)
        .ok_or_else(|| Error::UnknownEntity(entity.to_string()))?;
    Ok(rs.distances().row(k).sum())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeStats {
    pub entity_id: String,
    pub strength: f64,
    pub closeness: f64,
}

pub fn node_stats(net: &ExposureNetwork, rs: &ReducedSpace) -> Vec<NodeStats> {
    let strengths = net.strengths();
    let closeness = closeness_of_distances(rs.distances());
    net.entity_ids
        .iter()
        .zip(strengths)
        .zip(closeness)
        .map(|((id, strength), closeness)| NodeStats {
            entity_id: id.clone(),
            strength,
            closeness,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeEdge {
    pub i: usize,
    pub j: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpanningTree {
    pub edges: Vec<TreeEdge>,
}

impl SpanningTree {
    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.distance).sum()
    }
}

struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Minimum spanning tree of the complete graph on a distance matrix
/// (Kruskal). Edges are considered by ascending distance, then `(i, j)`.
pub fn mst(d: &DMatrix<f64>) -> Result<SpanningTree> {
    let n = validate_distances(d)?;
    if n < 2 {
        return Err(Error::invalid("spanning tree needs at least 2 entities"));
    }
    let mut candidates: Vec<TreeEdge> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .map(|(i, j)| TreeEdge { i, j, distance: d[(i, j)] })
        .collect();
    candidates.sort_by(|a, b| a.distance.total_cmp(&b.distance).then((a.i, a.j).cmp(&(b.i, b.j))));

    let mut sets = DisjointSet::new(n);
    let mut edges = Vec::with_capacity(n - 1);
    for e in candidates {
        if sets.union(e.i, e.j) {
            edges.push(e);
            if edges.len() == n - 1 {
                break;
            }
        }
    }
    Ok(SpanningTree { edges })
}
