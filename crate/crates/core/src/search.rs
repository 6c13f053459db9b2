//! Deterministic greedy adaptation of subgraphs toward Ψ local minima.
//!
//! Node-wise search moves whole nodes (with all their links into the current
//! subgraph) and is used inside the memetic loop. Link-wise search moves
//! single links and refines final results. Both alternate inclusion and
//! exclusion phases; inside a phase the search may take up to
//! `floor(r * size)` consecutive non-improving steps before it falls back to
//! the best place visited and switches phase. The search ends when a phase
//! following another phase brings no improvement.
//!
//! Ties in Ψ (see [`crate::cost::PSI_TOLERANCE`]) are broken towards the
//! smaller link set and then the lower candidate id, so every run is
//! reproducible and a tied plateau has one preferred place.

use thiserror::Error;

use crate::community::Community;
use crate::cost::{normalised_cut, psi_less, psi_tied, CostError, LinkSet};
use crate::graph::{link_components, Graph, LinkId, NodeId, NodeSet};

/// Recursion limit for re-adapting the components of an unconnected result.
const MAX_SPLIT_DEPTH: usize = 16;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("start set induces no links")]
    EmptyStart,
    #[error("no place with defined cost is reachable from the start set")]
    Unreachable,
    #[error("resolution must lie in (0, 1), got {0}")]
    Resolution(f64),
    #[error(transparent)]
    Cost(#[from] CostError),
}

/// Worsening allowance of the greedy search, derived from the resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchBudget {
    resolution: f64,
}

impl SearchBudget {
    pub fn new(resolution: f64) -> Result<Self, SearchError> {
        if resolution > 0.0 && resolution < 1.0 {
            Ok(SearchBudget { resolution })
        } else {
            Err(SearchError::Resolution(resolution))
        }
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    /// `floor(r * size)`.
    pub fn max_worsening_steps(&self, size: usize) -> usize {
        (self.resolution * size as f64).floor() as usize
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            resolution: 1.0 / 3.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SearchDirection {
    InclusionFirst,
    ExclusionFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Include,
    Exclude,
}

impl Phase {
    fn flip(self) -> Phase {
        match self {
            Phase::Include => Phase::Exclude,
            Phase::Exclude => Phase::Include,
        }
    }
}

impl SearchDirection {
    fn first(self) -> Phase {
        match self {
            SearchDirection::InclusionFirst => Phase::Include,
            SearchDirection::ExclusionFirst => Phase::Exclude,
        }
    }
}

/// Place height used for comparisons: Ψ, then link count on ties.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Score {
    pub psi: f64,
    pub links: usize,
}

impl Score {
    pub fn better_than(&self, other: &Score) -> bool {
        psi_less(self.psi, other.psi) || (psi_tied(self.psi, other.psi) && self.links < other.links)
    }

    fn tied_with(&self, other: &Score) -> bool {
        psi_tied(self.psi, other.psi) && self.links == other.links
    }
}

/// Running minimum over `(score, id)` candidates with id tie-breaking.
struct Pick<M> {
    best: Option<(M, Score, usize)>,
}

impl<M: Copy> Pick<M> {
    fn new() -> Self {
        Pick { best: None }
    }

    fn offer(&mut self, mv: M, score: Score, id: usize) {
        let replace = match &self.best {
            None => true,
            Some((_, s, i)) => score.better_than(s) || (score.tied_with(s) && id < *i),
        };
        if replace {
            self.best = Some((mv, score, id));
        }
    }

    fn take(self) -> Option<(M, Score)> {
        self.best.map(|(m, s, _)| (m, s))
    }
}

trait Landscape {
    type Move: Copy;
    fn score(&self) -> Option<Score>;
    /// Size used for the worsening budget.
    fn budget_size(&self) -> usize;
    fn best_move(&mut self, phase: Phase) -> Option<(Self::Move, Score)>;
    fn apply(&mut self, mv: Self::Move);
    fn commit(&mut self);
    fn rollback(&mut self);
}

fn run_phase<L: Landscape>(
    space: &mut L,
    phase: Phase,
    budget: SearchBudget,
    best: &mut Option<Score>,
) -> bool {
    let mut worsening = 0;
    let mut improved = false;
    while let Some((mv, predicted)) = space.best_move(phase) {
        let promising = best.is_none_or(|b| predicted.better_than(&b));
        if !promising && worsening >= budget.max_worsening_steps(space.budget_size()) {
            break;
        }
        space.apply(mv);
        match space.score() {
            Some(s) if best.is_none_or(|b| s.better_than(&b)) => {
                *best = Some(s);
                space.commit();
                worsening = 0;
                improved = true;
            }
            _ => worsening += 1,
        }
    }
    space.rollback();
    improved
}

/// Leaves `space` at the best place visited and returns its score.
fn greedy<L: Landscape>(space: &mut L, dir: SearchDirection, budget: SearchBudget) -> Option<Score> {
    let mut best = space.score();
    space.commit();
    let mut phase = dir.first();
    let mut ran_before = false;
    loop {
        let improved = run_phase(space, phase, budget, &mut best);
        if !improved && ran_before {
            break;
        }
        ran_before = true;
        phase = phase.flip();
    }
    best
}

/// Single-link moves over a [`LinkSet`].
struct LinkSpace<'g> {
    set: LinkSet<'g>,
    trail: Vec<LinkId>,
    stamp: Vec<u32>,
    epoch: u32,
}

impl<'g> LinkSpace<'g> {
    fn new(set: LinkSet<'g>) -> Self {
        let m = set.graph().link_count();
        LinkSpace {
            set,
            trail: Vec::new(),
            stamp: vec![0; m],
            epoch: 0,
        }
    }

    fn next_epoch(&mut self) -> u32 {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        self.epoch
    }

    /// All defined single-link neighbours of one phase, as `(link, score)`.
    fn neighbors(&mut self, phase: Phase) -> Vec<(LinkId, Score)> {
        let g = self.set.graph();
        let mut out = Vec::new();
        match phase {
            Phase::Include => {
                let epoch = self.next_epoch();
                let size = self.set.len() + 1;
                for &node in self.set.touched_nodes() {
                    for &(_, l) in g.neighbors(node) {
                        if self.set.contains(l) || self.stamp[l] == epoch {
                            continue;
                        }
                        self.stamp[l] = epoch;
                        if let Some(psi) = self.set.psi_after_toggle(l) {
                            out.push((l, Score { psi, links: size }));
                        }
                    }
                }
            }
            Phase::Exclude => {
                let size = self.set.len().saturating_sub(1);
                for &l in self.set.links() {
                    if let Some(psi) = self.set.psi_after_toggle(l) {
                        out.push((l, Score { psi, links: size }));
                    }
                }
            }
        }
        out
    }
}

impl Landscape for LinkSpace<'_> {
    type Move = LinkId;

    fn score(&self) -> Option<Score> {
        self.set.psi().map(|psi| Score {
            psi,
            links: self.set.len(),
        })
    }

    fn budget_size(&self) -> usize {
        self.set.len()
    }

    fn best_move(&mut self, phase: Phase) -> Option<(LinkId, Score)> {
        let mut pick = Pick::new();
        for (l, s) in self.neighbors(phase) {
            pick.offer(l, s, l);
        }
        pick.take()
    }

    fn apply(&mut self, link: LinkId) {
        self.set.toggle(link);
        self.trail.push(link);
    }

    fn commit(&mut self) {
        self.trail.clear();
    }

    fn rollback(&mut self) {
        while let Some(l) = self.trail.pop() {
            self.set.toggle(l);
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum NodeOp {
    Added(NodeId),
    Removed(NodeId),
}

/// Node moves over the subgraph induced by a node set.
struct NodeSpace<'g> {
    set: LinkSet<'g>,
    in_c: Vec<bool>,
    members: Vec<NodeId>,
    member_pos: Vec<usize>,
    trail: Vec<NodeOp>,
    stamp: Vec<u32>,
    epoch: u32,
}

impl<'g> NodeSpace<'g> {
    fn new(g: &'g Graph, nodes: &NodeSet) -> Self {
        let n = g.node_count();
        let mut space = NodeSpace {
            set: LinkSet::new(g),
            in_c: vec![false; n],
            members: Vec::new(),
            member_pos: vec![usize::MAX; n],
            trail: Vec::new(),
            stamp: vec![0; n],
            epoch: 0,
        };
        for &v in nodes.as_slice() {
            space.add_node(v);
        }
        space
    }

    fn graph(&self) -> &'g Graph {
        self.set.graph()
    }

    fn node_set(&self) -> NodeSet {
        NodeSet::new(self.members.iter().copied())
    }

    fn add_node(&mut self, v: NodeId) {
        let g = self.graph();
        self.in_c[v] = true;
        self.member_pos[v] = self.members.len();
        self.members.push(v);
        for &(u, l) in g.neighbors(v) {
            if self.in_c[u] {
                self.set.insert(l);
            }
        }
    }

    fn remove_node(&mut self, v: NodeId) {
        let g = self.graph();
        for &(u, l) in g.neighbors(v) {
            if self.in_c[u] {
                self.set.remove(l);
            }
        }
        self.in_c[v] = false;
        let pos = self.member_pos[v];
        let last = *self.members.last().unwrap();
        self.members.swap_remove(pos);
        if last != v {
            self.member_pos[last] = pos;
        }
        self.member_pos[v] = usize::MAX;
    }

    fn next_epoch(&mut self) -> u32 {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        self.epoch
    }

    fn shift(&self, node: NodeId, by: isize) -> f64 {
        let k = self.graph().degree(node);
        let kin = self.set.internal_degree(node);
        crate::cost::node_term((kin as isize + by) as usize, k) - crate::cost::node_term(kin, k)
    }

    fn eval_add(&self, v: NodeId) -> Option<Score> {
        let g = self.graph();
        let mut gain = 0.0;
        let mut count = 0;
        for &(u, _) in g.neighbors(v) {
            if self.in_c[u] {
                gain += self.shift(u, 1);
                count += 1;
            }
        }
        gain += crate::cost::node_term(count, g.degree(v));
        let psi = normalised_cut(
            self.set.sigma() + gain,
            self.set.k_in_total() + 2 * count,
            g.link_count(),
        )?;
        Some(Score {
            psi,
            links: self.set.len() + count,
        })
    }

    fn eval_remove(&self, v: NodeId) -> Option<Score> {
        let g = self.graph();
        let kin = self.set.internal_degree(v);
        let mut gain = -crate::cost::node_term(kin, g.degree(v));
        for &(u, _) in g.neighbors(v) {
            if self.in_c[u] {
                gain += self.shift(u, -1);
            }
        }
        let psi = normalised_cut(
            self.set.sigma() + gain,
            self.set.k_in_total() - 2 * kin,
            g.link_count(),
        )?;
        Some(Score {
            psi,
            links: self.set.len() - kin,
        })
    }

    fn exclusion_candidates(&self) -> Vec<NodeId> {
        let g = self.graph();
        let boundary: Vec<NodeId> = self
            .members
            .iter()
            .copied()
            .filter(|&v| g.neighbors(v).iter().any(|&(u, _)| !self.in_c[u]))
            .collect();
        if boundary.is_empty() {
            self.members.clone()
        } else {
            boundary
        }
    }

    /// Node components of the induced subgraph, each with its link count.
    fn components(&self) -> Vec<(Vec<NodeId>, usize)> {
        let g = self.graph();
        let mut seen = std::collections::HashSet::with_capacity(self.members.len());
        let mut out = Vec::new();
        let mut starts = self.members.clone();
        starts.sort_unstable();
        for start in starts {
            if !seen.insert(start) {
                continue;
            }
            let mut stack = vec![start];
            let mut comp = Vec::new();
            let mut degree_sum = 0;
            while let Some(u) = stack.pop() {
                comp.push(u);
                for &(v, _) in g.neighbors(u) {
                    if self.in_c[v] {
                        degree_sum += 1;
                        if seen.insert(v) {
                            stack.push(v);
                        }
                    }
                }
            }
            out.push((comp, degree_sum / 2));
        }
        out
    }

    /// Drops everything outside the main component (most links, then the
    /// component holding the smallest node).
    fn keep_main_component(&mut self, log: bool) {
        let comps = self.components();
        if comps.len() <= 1 {
            return;
        }
        // components come ordered by smallest member
        let main = comps
            .iter()
            .enumerate()
            .max_by(|(ia, a), (ib, b)| a.1.cmp(&b.1).then(ib.cmp(ia)))
            .map(|(i, _)| i)
            .unwrap();
        for (i, (nodes, _)) in comps.into_iter().enumerate() {
            if i == main {
                continue;
            }
            for v in nodes {
                self.remove_node(v);
                if log {
                    self.trail.push(NodeOp::Removed(v));
                }
            }
        }
    }

    fn candidates(&mut self, phase: Phase) -> Vec<(NodeId, Score)> {
        let mut out = Vec::new();
        match phase {
            Phase::Include => {
                let g = self.graph();
                let epoch = self.next_epoch();
                for i in 0..self.members.len() {
                    let u = self.members[i];
                    for &(v, _) in g.neighbors(u) {
                        if self.in_c[v] || self.stamp[v] == epoch {
                            continue;
                        }
                        self.stamp[v] = epoch;
                        if let Some(s) = self.eval_add(v) {
                            out.push((v, s));
                        }
                    }
                }
            }
            Phase::Exclude => {
                for v in self.exclusion_candidates() {
                    if let Some(s) = self.eval_remove(v) {
                        out.push((v, s));
                    }
                }
            }
        }
        out
    }
}

impl Landscape for NodeSpace<'_> {
    type Move = (Phase, NodeId);

    fn score(&self) -> Option<Score> {
        self.set.psi().map(|psi| Score {
            psi,
            links: self.set.len(),
        })
    }

    fn budget_size(&self) -> usize {
        self.members.len()
    }

    fn best_move(&mut self, phase: Phase) -> Option<((Phase, NodeId), Score)> {
        let mut pick = Pick::new();
        for (v, s) in self.candidates(phase) {
            pick.offer((phase, v), s, v);
        }
        pick.take()
    }

    fn apply(&mut self, (phase, v): (Phase, NodeId)) {
        match phase {
            Phase::Include => {
                self.add_node(v);
                self.trail.push(NodeOp::Added(v));
            }
            Phase::Exclude => {
                let inner = self.set.internal_degree(v);
                self.remove_node(v);
                self.trail.push(NodeOp::Removed(v));
                // a node with a single link into the subgraph is a leaf and
                // cannot disconnect it
                if inner >= 2 {
                    self.keep_main_component(true);
                }
            }
        }
    }

    fn commit(&mut self) {
        self.trail.clear();
    }

    fn rollback(&mut self) {
        while let Some(op) = self.trail.pop() {
            match op {
                NodeOp::Added(v) => self.remove_node(v),
                NodeOp::Removed(v) => self.add_node(v),
            }
        }
    }
}

/// Greedy node-wise adaptation of the subgraph induced by `start`.
///
/// The start set is first reduced to the main component of its induced
/// subgraph. Returns the node set of the best place visited.
pub fn node_wise_adapt(
    g: &Graph,
    start: &NodeSet,
    dir: SearchDirection,
    budget: SearchBudget,
) -> Result<NodeSet, SearchError> {
    let mut space = NodeSpace::new(g, start);
    if space.set.is_empty() {
        return Err(SearchError::EmptyStart);
    }
    space.keep_main_component(false);
    greedy(&mut space, dir, budget).ok_or(SearchError::Unreachable)?;
    Ok(space.node_set())
}

/// Greedy link-wise adaptation of `start`.
///
/// Intermediate places may be unconnected. If the best place found is
/// unconnected, each of its components is adapted again and all results are
/// returned, deduplicated and in rank order.
pub fn link_wise_adapt(
    g: &Graph,
    start: &[LinkId],
    dir: SearchDirection,
    budget: SearchBudget,
) -> Result<Vec<Community>, SearchError> {
    if start.is_empty() {
        return Err(SearchError::EmptyStart);
    }
    let mut out = Vec::new();
    adapt_links_into(g, start, dir, budget, 0, &mut out)?;
    out.sort_by(|a, b| a.rank_cmp(b));
    out.dedup_by(|a, b| a.fingerprint() == b.fingerprint());
    Ok(out)
}

fn adapt_links_into(
    g: &Graph,
    start: &[LinkId],
    dir: SearchDirection,
    budget: SearchBudget,
    depth: usize,
    out: &mut Vec<Community>,
) -> Result<(), SearchError> {
    let set = LinkSet::from_links(g, start)?;
    let mut space = LinkSpace::new(set);
    greedy(&mut space, dir, budget).ok_or(SearchError::Unreachable)?;
    let links = space.set.sorted_links();
    let comps = link_components(g, &links);
    if comps.len() == 1 {
        out.push(Community::from_link_set(&space.set)?);
        return Ok(());
    }
    for comp in comps {
        if depth + 1 >= MAX_SPLIT_DEPTH {
            if let Ok(c) = Community::from_links(g, comp) {
                out.push(c);
            }
            continue;
        }
        match adapt_links_into(g, &comp, dir, budget, depth + 1, out) {
            Ok(()) | Err(SearchError::Unreachable) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

fn link_neighbor_scores(g: &Graph, links: &[LinkId]) -> Result<(Score, Vec<Score>), CostError> {
    let set = LinkSet::from_links(g, links)?;
    let here = Score {
        psi: set.psi_checked()?,
        links: set.len(),
    };
    let mut space = LinkSpace::new(set);
    let mut scores: Vec<Score> = space
        .neighbors(Phase::Include)
        .into_iter()
        .map(|(_, s)| s)
        .collect();
    scores.extend(space.neighbors(Phase::Exclude).into_iter().map(|(_, s)| s));
    Ok((here, scores))
}

/// Whether no single-link neighbour ranks better than `links`.
///
/// Neighbours are all removals of a member link and all additions of a link
/// sharing a node with the set; additions elsewhere would give unconnected
/// sets, which are never compared. Undefined neighbours are ignored and
/// neighbours tied in Ψ rank by link count.
pub fn is_local_minimum(g: &Graph, links: &[LinkId]) -> Result<bool, CostError> {
    let (here, scores) = link_neighbor_scores(g, links)?;
    Ok(scores.iter().all(|s| here.better_than(s)))
}

/// Node-move counterpart of [`is_local_minimum`] for a node set's induced
/// subgraph, using the node-wise move set.
pub fn is_node_local_minimum(g: &Graph, nodes: &NodeSet) -> Result<bool, SearchError> {
    let mut space = NodeSpace::new(g, nodes);
    let here = space.score().ok_or(SearchError::EmptyStart)?;
    for phase in [Phase::Include, Phase::Exclude] {
        for (v, _) in space.candidates(phase) {
            space.apply((phase, v));
            let s = space.score();
            space.rollback();
            if let Some(s) = s {
                if !here.better_than(&s) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::psi;
    use crate::graph::is_connected_link_set;
    use crate::synthetic::{bow_tie, clique_chain, clique_links, random_connected};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn budget() -> SearchBudget {
        SearchBudget::default()
    }

    #[test]
    fn budget_floor() {
        let b = budget();
        assert_eq!(b.max_worsening_steps(3), 1);
        assert_eq!(b.max_worsening_steps(2), 0);
        assert_eq!(b.max_worsening_steps(190), 63);
        assert!(SearchBudget::new(1.0).is_err());
    }

    #[test]
    fn node_wise_completes_triangle() {
        let g = bow_tie();
        // a and b: only the outer link a-b is induced, Ψ = 0.6
        let start = NodeSet::new([0, 1]);
        assert!((psi(&g, &start.induced_links(&g)).unwrap() - 0.6).abs() < 1e-12);
        for dir in [SearchDirection::InclusionFirst, SearchDirection::ExclusionFirst] {
            let out = node_wise_adapt(&g, &start, dir, budget()).unwrap();
            assert_eq!(out.as_slice(), &[0, 1, 2]);
            assert!((psi(&g, &out.induced_links(&g)).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn node_wise_keeps_local_minimum() {
        let g = bow_tie();
        let start = NodeSet::new([0, 1, 2]);
        assert!(is_node_local_minimum(&g, &start).unwrap());
        let out = node_wise_adapt(&g, &start, SearchDirection::InclusionFirst, budget()).unwrap();
        assert_eq!(out, start);
    }

    #[test]
    fn node_wise_from_all_nodes_reaches_proper_subset() {
        let g = bow_tie();
        let all = NodeSet::new(0..5);
        let out = node_wise_adapt(&g, &all, SearchDirection::InclusionFirst, budget()).unwrap();
        let links = out.induced_links(&g);
        assert!(links.len() < g.link_count());
        assert!((psi(&g, &links).unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn node_wise_rejects_linkless_start() {
        let g = bow_tie();
        assert!(matches!(
            node_wise_adapt(&g, &NodeSet::new([0]), SearchDirection::InclusionFirst, budget()),
            Err(SearchError::EmptyStart)
        ));
    }

    #[test]
    fn link_wise_drops_extra_link() {
        let g = bow_tie();
        let out =
            link_wise_adapt(&g, &[0, 1, 2, 3], SearchDirection::InclusionFirst, budget()).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].links(), &[0, 1, 2]);
    }

    #[test]
    fn link_wise_keeps_triangle() {
        let g = bow_tie();
        for dir in [SearchDirection::InclusionFirst, SearchDirection::ExclusionFirst] {
            let out = link_wise_adapt(&g, &[0, 1, 2], dir, budget()).unwrap();
            assert_eq!(out.len(), 1);
            assert_eq!(out[0].links(), &[0, 1, 2]);
        }
    }

    #[test]
    fn link_wise_splits_into_cliques() {
        // four 4-cliques in a chain; start from the two end cliques
        let g = clique_chain(4, 4, 1);
        let mut start = clique_links(&g, 0, 4);
        start.extend(clique_links(&g, 3, 4));
        let out = link_wise_adapt(&g, &start, SearchDirection::ExclusionFirst, budget()).unwrap();
        assert_eq!(out.len(), 2, "{out:?}");
        assert!(out[0].links().starts_with(&clique_links(&g, 0, 4)));
        for c in &out {
            assert!(is_connected_link_set(&g, c.links()).unwrap());
            assert!(is_local_minimum(&g, c.links()).unwrap());
        }
    }

    #[test]
    fn local_minimum_examples() {
        let g = bow_tie();
        assert!(is_local_minimum(&g, &[0, 1, 2]).unwrap());
        assert!(is_local_minimum(&g, &[3, 4, 5]).unwrap());
        assert!(!is_local_minimum(&g, &[0, 1, 2, 3]).unwrap());
        assert!(!is_local_minimum(&g, &[0]).unwrap());
    }

    #[test]
    fn adaptation_is_deterministic_and_lands_on_minima() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..30 {
            let g = random_connected(8, 12, &mut rng);
            for start in [vec![0], vec![0, 1, 2], (0..6).collect::<Vec<_>>()] {
                for dir in [SearchDirection::InclusionFirst, SearchDirection::ExclusionFirst] {
                    let a = link_wise_adapt(&g, &start, dir, budget()).unwrap();
                    let b = link_wise_adapt(&g, &start, dir, budget()).unwrap();
                    assert_eq!(a, b);
                    for c in &a {
                        assert!(is_connected_link_set(&g, c.links()).unwrap());
                        assert!(is_local_minimum(&g, c.links()).unwrap(), "{:?}", c.links());
                    }
                }
            }
        }
    }
}
