//! External connectivity σ and the normalised node-cut Ψ of link sets.
//!
//! For a link set `L` with internal degrees `k_i^in`, external connectivity
//! is `σ(L) = Σ_i k_i^in (k_i − k_i^in) / k_i` and the normalised node-cut is
//! `Ψ(L) = σ(L) / (k_in (1 − k_in / 2m))` with `k_in = 2|L|`. Ψ is undefined
//! for the empty set and the full link set.
//!
//! [`LinkSet`] maintains both incrementally under single-link changes. The
//! free functions [`sigma`] and [`psi`] recompute from scratch and serve as
//! the reference route.

use std::collections::HashMap;

use thiserror::Error;

use crate::graph::{Graph, GraphError, LinkId, NodeId};

/// Relative tolerance under which two Ψ values count as tied.
pub const PSI_TOLERANCE: f64 = 1e-12;

/// Full σ recompute cadence, in single-link updates.
const REFRESH_INTERVAL: u32 = 1 << 16;

const ABSENT: u32 = u32::MAX;

#[derive(Debug, Error)]
pub enum CostError {
    #[error("cost undefined for k_in = {k_in} with 2m = {double_links}")]
    Undefined { k_in: usize, double_links: usize },
    #[error("link {0} listed twice")]
    DuplicateLink(LinkId),
    #[error("link {0} is already in the set")]
    AlreadyMember(LinkId),
    #[error("link {0} is not in the set")]
    NotMember(LinkId),
    #[error("link {0} is both added and removed")]
    Conflict(LinkId),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// `a < b` beyond the tie tolerance.
pub fn psi_less(a: f64, b: f64) -> bool {
    a < b - PSI_TOLERANCE * a.abs().max(b.abs())
}

/// `a` and `b` are tied within the tolerance.
pub fn psi_tied(a: f64, b: f64) -> bool {
    !psi_less(a, b) && !psi_less(b, a)
}

/// Conductance of node `i` between its internal and external links.
#[inline]
pub fn node_term(internal: usize, degree: usize) -> f64 {
    if internal == 0 || internal >= degree {
        0.0
    } else {
        (internal * (degree - internal)) as f64 / degree as f64
    }
}

/// Ψ from σ, the internal degree total and the link count.
#[inline]
pub fn normalised_cut(sigma: f64, k_in: usize, link_count: usize) -> Option<f64> {
    let double = 2 * link_count;
    if k_in == 0 || k_in >= double {
        return None;
    }
    // k_in (1 - k_in/2m) = k_in (2m - k_in) / 2m, kept in integers so that
    // a set and its complement share the exact same denominator
    let denom = (k_in as f64) * ((double - k_in) as f64);
    Some(sigma * double as f64 / denom)
}

fn internal_degrees(g: &Graph, links: &[LinkId]) -> Result<HashMap<NodeId, usize>, CostError> {
    let mut seen = std::collections::HashSet::with_capacity(links.len());
    let mut internal = HashMap::new();
    for &l in links {
        g.check_link(l)?;
        if !seen.insert(l) {
            return Err(CostError::DuplicateLink(l));
        }
        let (a, b) = g.endpoints(l);
        *internal.entry(a).or_insert(0) += 1;
        *internal.entry(b).or_insert(0) += 1;
    }
    Ok(internal)
}

/// σ recomputed from scratch.
pub fn sigma(g: &Graph, links: &[LinkId]) -> Result<f64, CostError> {
    let internal = internal_degrees(g, links)?;
    let mut nodes: Vec<_> = internal.into_iter().collect();
    nodes.sort_unstable();
    Ok(nodes.iter().map(|&(i, kin)| node_term(kin, g.degree(i))).sum())
}

/// Ψ recomputed from scratch.
pub fn psi(g: &Graph, links: &[LinkId]) -> Result<f64, CostError> {
    let s = sigma(g, links)?;
    let k_in = 2 * links.len();
    normalised_cut(s, k_in, g.link_count()).ok_or(CostError::Undefined {
        k_in,
        double_links: 2 * g.link_count(),
    })
}

/// Size of the symmetric difference of two sorted link lists.
pub fn distance(a: &[LinkId], b: &[LinkId]) -> usize {
    let (mut i, mut j, mut shared) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                shared += 1;
                i += 1;
                j += 1;
            }
        }
    }
    a.len() + b.len() - 2 * shared
}

/// Number of links shared by two sorted link lists.
pub fn shared_links(a: &[LinkId], b: &[LinkId]) -> usize {
    (a.len() + b.len() - distance(a, b)) / 2
}

/// A link set over a graph with incrementally maintained internal degrees,
/// σ and Ψ.
#[derive(Clone)]
pub struct LinkSet<'g> {
    graph: &'g Graph,
    position: Vec<u32>,
    links: Vec<LinkId>,
    internal: Vec<u32>,
    touched_pos: Vec<u32>,
    touched: Vec<NodeId>,
    sigma: f64,
    since_refresh: u32,
}

impl std::fmt::Debug for LinkSet<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LinkSet")
            .field("links", &self.sorted_links())
            .field("sigma", &self.sigma)
            .finish()
    }
}

impl<'g> LinkSet<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        LinkSet {
            graph,
            position: vec![ABSENT; graph.link_count()],
            links: Vec::new(),
            internal: vec![0; graph.node_count()],
            touched_pos: vec![ABSENT; graph.node_count()],
            touched: Vec::new(),
            sigma: 0.0,
            since_refresh: 0,
        }
    }

    pub fn from_links(graph: &'g Graph, links: &[LinkId]) -> Result<Self, CostError> {
        let mut set = LinkSet::new(graph);
        for &l in links {
            graph.check_link(l)?;
            if !set.insert(l) {
                return Err(CostError::DuplicateLink(l));
            }
        }
        Ok(set)
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn contains(&self, link: LinkId) -> bool {
        self.position[link] != ABSENT
    }

    /// Member links in insertion order (not sorted).
    pub fn links(&self) -> &[LinkId] {
        &self.links
    }

    pub fn sorted_links(&self) -> Vec<LinkId> {
        let mut v = self.links.clone();
        v.sort_unstable();
        v
    }

    pub fn internal_degree(&self, node: NodeId) -> usize {
        self.internal[node] as usize
    }

    /// `k_in(L) = Σ_i k_i^in(L) = 2|L|`.
    pub fn k_in_total(&self) -> usize {
        2 * self.links.len()
    }

    /// Nodes attached to at least one member link, in no particular order.
    pub fn touched_nodes(&self) -> &[NodeId] {
        &self.touched
    }

    /// Nodes with both internal and external links.
    pub fn is_boundary(&self, node: NodeId) -> bool {
        let kin = self.internal_degree(node);
        kin > 0 && kin < self.graph.degree(node)
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn psi(&self) -> Option<f64> {
        normalised_cut(self.sigma, self.k_in_total(), self.graph.link_count())
    }

    pub fn psi_checked(&self) -> Result<f64, CostError> {
        self.psi().ok_or(CostError::Undefined {
            k_in: self.k_in_total(),
            double_links: 2 * self.graph.link_count(),
        })
    }

    fn term_shift(&self, node: NodeId, by: isize) -> f64 {
        let k = self.graph.degree(node);
        let kin = self.internal_degree(node);
        node_term((kin as isize + by) as usize, k) - node_term(kin, k)
    }

    /// Change in σ if `link` were added.
    pub fn sigma_gain_insert(&self, link: LinkId) -> f64 {
        let (a, b) = self.graph.endpoints(link);
        self.term_shift(a, 1) + self.term_shift(b, 1)
    }

    /// Change in σ if `link` were removed.
    pub fn sigma_gain_remove(&self, link: LinkId) -> f64 {
        let (a, b) = self.graph.endpoints(link);
        self.term_shift(a, -1) + self.term_shift(b, -1)
    }

    /// Ψ after adding or removing `link`, without changing the set.
    pub fn psi_after_toggle(&self, link: LinkId) -> Option<f64> {
        if self.contains(link) {
            normalised_cut(
                self.sigma + self.sigma_gain_remove(link),
                self.k_in_total() - 2,
                self.graph.link_count(),
            )
        } else {
            normalised_cut(
                self.sigma + self.sigma_gain_insert(link),
                self.k_in_total() + 2,
                self.graph.link_count(),
            )
        }
    }

    fn bump(&mut self, node: NodeId, up: bool) {
        let k = self.graph.degree(node);
        let kin = self.internal[node] as usize;
        let next = if up { kin + 1 } else { kin - 1 };
        self.sigma += node_term(next, k) - node_term(kin, k);
        self.internal[node] = next as u32;
        if kin == 0 {
            self.touched_pos[node] = self.touched.len() as u32;
            self.touched.push(node);
        } else if next == 0 {
            let pos = self.touched_pos[node] as usize;
            let last = *self.touched.last().unwrap();
            self.touched.swap_remove(pos);
            if last != node {
                self.touched_pos[last] = pos as u32;
            }
            self.touched_pos[node] = ABSENT;
        }
    }

    fn tick(&mut self) {
        self.since_refresh += 1;
        if self.since_refresh >= REFRESH_INTERVAL {
            self.refresh();
        }
    }

    /// Recomputes σ from the maintained internal degrees.
    pub fn refresh(&mut self) {
        let mut nodes = self.touched.clone();
        nodes.sort_unstable();
        self.sigma = nodes
            .iter()
            .map(|&i| node_term(self.internal[i] as usize, self.graph.degree(i)))
            .sum();
        self.since_refresh = 0;
    }

    /// Adds `link`; returns false if it was already present.
    pub fn insert(&mut self, link: LinkId) -> bool {
        if self.contains(link) {
            return false;
        }
        self.position[link] = self.links.len() as u32;
        self.links.push(link);
        let (a, b) = self.graph.endpoints(link);
        self.bump(a, true);
        self.bump(b, true);
        self.tick();
        true
    }

    /// Removes `link`; returns false if it was absent.
    pub fn remove(&mut self, link: LinkId) -> bool {
        if !self.contains(link) {
            return false;
        }
        let pos = self.position[link] as usize;
        let last = *self.links.last().unwrap();
        self.links.swap_remove(pos);
        if last != link {
            self.position[last] = pos as u32;
        }
        self.position[link] = ABSENT;
        let (a, b) = self.graph.endpoints(link);
        self.bump(a, false);
        self.bump(b, false);
        self.tick();
        true
    }

    pub fn toggle(&mut self, link: LinkId) {
        if !self.remove(link) {
            self.insert(link);
        }
    }

    /// Applies a batch of additions and removals after validating them.
    pub fn apply_delta(&mut self, add: &[LinkId], remove: &[LinkId]) -> Result<(), CostError> {
        let mut staged = std::collections::HashSet::new();
        for &l in add {
            self.graph.check_link(l)?;
            if self.contains(l) {
                return Err(CostError::AlreadyMember(l));
            }
            if !staged.insert(l) {
                return Err(CostError::DuplicateLink(l));
            }
        }
        for &l in remove {
            self.graph.check_link(l)?;
            if staged.contains(&l) {
                return Err(CostError::Conflict(l));
            }
            if !self.contains(l) {
                return Err(CostError::NotMember(l));
            }
        }
        for &l in remove {
            self.remove(l);
        }
        for &l in add {
            self.insert(l);
        }
        Ok(())
    }

    /// Symmetric difference size to a sorted link list.
    pub fn distance_to(&self, other: &[LinkId]) -> usize {
        let shared = other.iter().filter(|&&l| self.contains(l)).count();
        self.len() + other.len() - 2 * shared
    }
}
