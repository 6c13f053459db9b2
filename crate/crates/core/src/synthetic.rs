//! Small graph generators for examples, tests and smoke runs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{giant_component, Graph, LinkId, NodeId};

/// Two triangles sharing node `c`: links a-b, b-c, c-a, c-d, d-e, e-c.
pub fn bow_tie() -> Graph {
    let labels = ["a", "b", "c", "d", "e"].map(String::from).to_vec();
    Graph::from_links(labels, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)]).unwrap()
}

/// A graph of `count` cliques of `size` nodes each; clique `k` owns nodes
/// `k*size .. (k+1)*size` and consecutive cliques are joined by `bridges`
/// links between distinct node pairs (node `i` of clique `k` to node `i` of
/// clique `k+1`).
pub fn clique_chain(count: usize, size: usize, bridges: usize) -> Graph {
    assert!(bridges <= size);
    let mut pairs = Vec::new();
    for k in 0..count {
        let base = k * size;
        for a in 0..size {
            for b in a + 1..size {
                pairs.push((base + a, base + b));
            }
        }
    }
    for k in 0..count.saturating_sub(1) {
        for i in 0..bridges {
            pairs.push((k * size + i, (k + 1) * size + i));
        }
    }
    Graph::from_pairs(count * size, &pairs).unwrap()
}

/// Link ids of clique `k` in a [`clique_chain`] graph.
pub fn clique_links(g: &Graph, k: usize, size: usize) -> Vec<LinkId> {
    let lo = k * size;
    let hi = lo + size;
    (0..g.link_count())
        .filter(|&l| {
            let (a, b) = g.endpoints(l);
            (lo..hi).contains(&a) && (lo..hi).contains(&b)
        })
        .collect()
}

/// Parameters of a two-level stochastic block model.
#[derive(Debug, Clone)]
pub struct HierarchicalSbm {
    pub groups: usize,
    pub blocks_per_group: usize,
    pub block_size: usize,
    pub p_block: f64,
    pub p_group: f64,
    pub p_background: f64,
}

impl Default for HierarchicalSbm {
    fn default() -> Self {
        // about 10^4 links after giant-component reduction
        HierarchicalSbm {
            groups: 4,
            blocks_per_group: 4,
            block_size: 40,
            p_block: 0.65,
            p_group: 0.03,
            p_background: 0.004,
        }
    }
}

impl HierarchicalSbm {
    pub fn node_count(&self) -> usize {
        self.groups * self.blocks_per_group * self.block_size
    }

    pub fn block_of(&self, node: NodeId) -> usize {
        node / self.block_size
    }

    pub fn group_of(&self, node: NodeId) -> usize {
        self.block_of(node) / self.blocks_per_group
    }

    /// Samples the model and reduces it to its giant component.
    pub fn generate(&self, seed: u64) -> Graph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.node_count();
        let mut pairs = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                let p = if self.block_of(a) == self.block_of(b) {
                    self.p_block
                } else if self.group_of(a) == self.group_of(b) {
                    self.p_group
                } else {
                    self.p_background
                };
                if rng.random::<f64>() < p {
                    pairs.push((a, b));
                }
            }
        }
        let g = Graph::from_pairs(n, &pairs).unwrap();
        giant_component(&g).unwrap().0
    }
}

/// Random connected graph: a random spanning tree plus extra random links,
/// `links` in total (capped at the complete graph).
pub fn random_connected<R: Rng>(nodes: usize, links: usize, rng: &mut R) -> Graph {
    assert!(nodes >= 2);
    let max = nodes * (nodes - 1) / 2;
    let target = links.clamp(nodes - 1, max);
    let mut order: Vec<NodeId> = (0..nodes).collect();
    order.shuffle(rng);
    let mut present = std::collections::HashSet::new();
    let mut pairs = Vec::new();
    for i in 1..nodes {
        let parent = order[rng.random_range(0..i)];
        let key = (parent.min(order[i]), parent.max(order[i]));
        present.insert(key);
        pairs.push(key);
    }
    while pairs.len() < target {
        let a = rng.random_range(0..nodes);
        let b = rng.random_range(0..nodes);
        if a == b {
            continue;
        }
        let key = (a.min(b), a.max(b));
        if present.insert(key) {
            pairs.push(key);
        }
    }
    Graph::from_pairs(nodes, &pairs).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clique_chain_sizes() {
        let g = clique_chain(2, 20, 3);
        assert_eq!(g.link_count(), 2 * 190 + 3);
        assert_eq!(clique_links(&g, 1, 20).len(), 190);
    }

    #[test]
    fn random_connected_is_connected() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let g = random_connected(7, 11, &mut rng);
            assert!(g.is_connected());
            assert_eq!(g.link_count(), 11);
        }
    }

    #[test]
    fn sbm_is_deterministic() {
        let m = HierarchicalSbm {
            groups: 2,
            blocks_per_group: 2,
            block_size: 8,
            ..Default::default()
        };
        assert_eq!(m.generate(3), m.generate(3));
    }
}
