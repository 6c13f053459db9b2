//! Memetic evolution of community populations.
//!
//! One evolution keeps a fixed-size population of node-wise adapted
//! communities. Each generation mutates the best member with a low variance,
//! crosses it with randomly drawn members, adapts every offspring and keeps
//! the best communities. [`run_protocol`] chains the two rounds of
//! evolutions that turn one seed subgraph into final link communities.

use std::collections::{HashSet, VecDeque};

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::community::{Community, Fingerprint};
use crate::cost::CostError;
use crate::graph::{Graph, NodeId, NodeSet};
use crate::search::{link_wise_adapt, node_wise_adapt, SearchBudget, SearchDirection, SearchError};

const MUTATION_RETRIES: usize = 16;
/// Mutation attempts per population slot when initialising.
const INIT_ATTEMPTS_PER_SLOT: usize = 8;
/// Hard cap on generations of one evolution.
const MAX_GENERATIONS: usize = 10_000;

#[derive(Debug, Error)]
pub enum EvolutionError {
    #[error("invalid evolution config: {0}")]
    Config(String),
    #[error("random growth got stuck before reaching the target size")]
    MutationStuck,
    #[error("not enough mutants to initialise a population ({found} of {needed})")]
    NotEnoughMutants { found: usize, needed: usize },
    #[error("local search reached {links} links, more than three quarters of the network")]
    Oversized { links: usize },
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Cost(#[from] CostError),
}

/// How the mutation variance evolves within one evolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarianceSchedule {
    /// Constant low variance with population renewal on stagnation.
    Fixed,
    /// Variance shrinks after every generation without a better best; no renewal.
    Decreasing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolutionConfig {
    pub population_size: usize,
    pub init_variance: f64,
    pub low_variance: f64,
    pub renewal_variance: f64,
    pub stagnation_generations: usize,
    pub best_max_age: usize,
    pub crossover_partners: usize,
    pub variance_decay: f64,
    pub resolution: f64,
    pub schedule: VarianceSchedule,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            population_size: 16,
            init_variance: 0.15,
            low_variance: 0.02,
            renewal_variance: 0.15,
            stagnation_generations: 10,
            best_max_age: 20,
            crossover_partners: 2,
            variance_decay: 0.9,
            resolution: 1.0 / 3.0,
            schedule: VarianceSchedule::Fixed,
        }
    }
}

impl EvolutionConfig {
    /// First-round defaults: 16 members, fixed variance with renewal.
    pub fn first_round() -> Self {
        Self::default()
    }

    /// Second-round defaults: 8 members, decreasing variance.
    pub fn second_round() -> Self {
        EvolutionConfig {
            population_size: 8,
            schedule: VarianceSchedule::Decreasing,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), EvolutionError> {
        let bad = |m: &str| Err(EvolutionError::Config(m.to_owned()));
        if self.population_size < 2 {
            return bad("population_size must be at least 2");
        }
        if !(self.low_variance > 0.0
            && self.low_variance <= self.init_variance
            && self.init_variance < 1.0)
        {
            return bad("variances must satisfy 0 < low_variance <= init_variance < 1");
        }
        if !(self.renewal_variance > 0.0 && self.renewal_variance < 1.0) {
            return bad("renewal_variance must lie in (0, 1)");
        }
        if !(self.variance_decay > 0.0 && self.variance_decay <= 1.0) {
            return bad("variance_decay must lie in (0, 1]");
        }
        SearchBudget::new(self.resolution)?;
        Ok(())
    }

    pub fn budget(&self) -> SearchBudget {
        SearchBudget::new(self.resolution).expect("validated resolution")
    }

    /// Minimum range `floor(r |L|)` of a community.
    pub fn min_range(&self, links: usize) -> usize {
        self.budget().max_worsening_steps(links)
    }
}

/// Grows a random connected node set of `target` nodes from a random member
/// of `core`, first inside `core` until more than `keep` nodes are chosen.
fn random_growth<R: Rng>(
    g: &Graph,
    core: &NodeSet,
    keep: usize,
    target: usize,
    rng: &mut R,
) -> Option<NodeSet> {
    let mut chosen: HashSet<NodeId> = HashSet::with_capacity(target);
    let mut frontier: Vec<NodeId> = Vec::new();
    let mut in_frontier: HashSet<NodeId> = HashSet::new();
    let start = core.as_slice()[rng.random_range(0..core.len())];
    let mut order = vec![start];
    chosen.insert(start);
    let mut inside = true;
    let extend = |v: NodeId,
                  inside: bool,
                  chosen: &HashSet<NodeId>,
                  frontier: &mut Vec<NodeId>,
                  in_frontier: &mut HashSet<NodeId>| {
        for &(u, _) in g.neighbors(v) {
            if !chosen.contains(&u) && (!inside || core.contains(u)) && in_frontier.insert(u) {
                frontier.push(u);
            }
        }
    };
    extend(start, inside, &chosen, &mut frontier, &mut in_frontier);
    while chosen.len() < target {
        if inside && chosen.len() >= keep {
            inside = false;
            frontier.clear();
            in_frontier.clear();
            for &v in &order {
                extend(v, inside, &chosen, &mut frontier, &mut in_frontier);
            }
        }
        if frontier.is_empty() {
            return None;
        }
        let v = frontier.swap_remove(rng.random_range(0..frontier.len()));
        in_frontier.remove(&v);
        chosen.insert(v);
        order.push(v);
        extend(v, inside, &chosen, &mut frontier, &mut in_frontier);
    }
    Some(chosen.into_iter().collect())
}

/// Number of community nodes a mutation with variance `v` keeps: the
/// smallest count above `(1 - v)|C|`, but always leaving one node to change.
pub fn mutation_core_size(size: usize, variance: f64) -> usize {
    let above = ((1.0 - variance) * size as f64).floor() as usize + 1;
    above.min(size.saturating_sub(1)).max(1)
}

/// The random mutant of `community` before adaptation.
pub fn random_mutant<R: Rng>(
    g: &Graph,
    community: &NodeSet,
    variance: f64,
    rng: &mut R,
) -> Result<NodeSet, EvolutionError> {
    if community.is_empty() {
        return Err(EvolutionError::MutationStuck);
    }
    let keep = mutation_core_size(community.len(), variance);
    for _ in 0..MUTATION_RETRIES {
        if let Some(m) = random_growth(g, community, keep, community.len(), rng) {
            return Ok(m);
        }
    }
    Err(EvolutionError::MutationStuck)
}

/// Mutates a community and adapts the mutant twice (inclusion-first and
/// exclusion-first). Returns the distinct adapted node sets.
pub fn mutate<R: Rng>(
    g: &Graph,
    community: &NodeSet,
    variance: f64,
    budget: SearchBudget,
    rng: &mut R,
) -> Result<Vec<NodeSet>, EvolutionError> {
    let mutant = random_mutant(g, community, variance, rng)?;
    let mut out: Vec<NodeSet> = Vec::with_capacity(2);
    for dir in [SearchDirection::InclusionFirst, SearchDirection::ExclusionFirst] {
        let adapted = node_wise_adapt(g, &mutant, dir, budget)?;
        if !out.contains(&adapted) {
            out.push(adapted);
        }
    }
    Ok(out)
}

/// Crosses two communities through their node union (adapted exclusion
/// first) and intersection (adapted inclusion first).
///
/// Nested or node-disjoint parents produce nothing.
pub fn crossover(
    g: &Graph,
    a: &Community,
    b: &Community,
    budget: SearchBudget,
) -> Result<Vec<Community>, EvolutionError> {
    let (na, nb) = (a.nodes(), b.nodes());
    if na.is_subset(nb) || nb.is_subset(na) || na.is_disjoint(nb) {
        return Ok(Vec::new());
    }
    let mut out: Vec<Community> = Vec::with_capacity(2);
    let starts = [
        (na.union(nb), SearchDirection::ExclusionFirst),
        (na.intersection(nb), SearchDirection::InclusionFirst),
    ];
    for (start, dir) in starts {
        let adapted = match node_wise_adapt(g, &start, dir, budget) {
            Ok(s) => s,
            Err(SearchError::EmptyStart) | Err(SearchError::Unreachable) => continue,
            Err(e) => return Err(e.into()),
        };
        let c = Community::induced(g, &adapted)?;
        if !out.iter().any(|o| o.fingerprint() == c.fingerprint()) {
            out.push(c);
        }
    }
    Ok(out)
}

/// Outcome of one selection step.
#[derive(Debug, Default)]
pub struct Selection {
    /// Candidates that made it into the population.
    pub accepted: usize,
    /// Would-be new bests outside the best's minimum range.
    pub deferred: Vec<Community>,
}

/// Fixed-size population ordered by rank (best first).
#[derive(Debug, Clone)]
pub struct Population {
    members: Vec<Community>,
    seen: HashSet<Fingerprint>,
    capacity: usize,
    pub best_age: usize,
    pub accepted_since_renewal: usize,
}

impl Population {
    /// Builds a population from distinct communities; keeps the best
    /// `capacity` of them.
    pub fn from_members(mut members: Vec<Community>, capacity: usize) -> Self {
        members.sort_by(|a, b| a.rank_cmp(b));
        members.dedup_by(|a, b| a.fingerprint() == b.fingerprint());
        members.truncate(capacity);
        let seen = members.iter().map(Community::fingerprint).collect();
        Population {
            members,
            seen,
            capacity,
            best_age: 0,
            accepted_since_renewal: 0,
        }
    }

    pub fn members(&self) -> &[Community] {
        &self.members
    }

    pub fn best(&self) -> &Community {
        &self.members[0]
    }

    pub fn worst(&self) -> &Community {
        self.members.last().expect("population is never empty")
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn contains(&self, f: Fingerprint) -> bool {
        self.members.iter().any(|m| m.fingerprint() == f)
    }

    /// Merges candidates that rank above the current worst member.
    ///
    /// A candidate that would become the new best is admitted only within
    /// `min_range` links of the best member before this step; otherwise it
    /// is returned as deferred.
    pub fn select(&mut self, candidates: Vec<Community>, min_range: usize) -> Selection {
        let original_best = self.best().clone();
        let full = self.members.len() >= self.capacity;
        let worst = self.worst().clone();
        let mut selection = Selection::default();
        let mut admitted = Vec::new();
        for c in candidates {
            if !self.seen.insert(c.fingerprint()) {
                continue;
            }
            if full && c.rank_cmp(&worst).is_ge() {
                continue;
            }
            if c.rank_cmp(&original_best).is_lt() && c.distance(&original_best) > min_range {
                selection.deferred.push(c);
                continue;
            }
            admitted.push(c.fingerprint());
            self.members.push(c);
        }
        self.members.sort_by(|a, b| a.rank_cmp(b));
        self.members.truncate(self.capacity);
        selection.accepted = admitted.iter().filter(|&&f| self.contains(f)).count();
        self.accepted_since_renewal += selection.accepted;
        selection
    }

    /// Mean binary entropy of link membership over the union of member
    /// link sets, in bits. 0 when all members coincide.
    pub fn entropy(&self) -> f64 {
        let mut counts: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
        for m in &self.members {
            for &l in m.links() {
                *counts.entry(l).or_insert(0) += 1;
            }
        }
        if counts.is_empty() {
            return 0.0;
        }
        let n = self.members.len() as f64;
        let total: f64 = counts
            .values()
            .map(|&c| {
                let p = c as f64 / n;
                if p >= 1.0 {
                    0.0
                } else {
                    -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
                }
            })
            .sum();
        total / counts.len() as f64
    }
}

fn adapt_to_communities(g: &Graph, sets: Vec<NodeSet>) -> Result<Vec<Community>, EvolutionError> {
    sets.iter()
        .map(|s| Community::induced(g, s).map_err(EvolutionError::from))
        .collect()
}

fn check_size(g: &Graph, c: &Community) -> Result<(), EvolutionError> {
    if 4 * c.len() > 3 * g.link_count() {
        Err(EvolutionError::Oversized { links: c.len() })
    } else {
        Ok(())
    }
}

/// Mutates `seed` with the initial variance until the population is full.
pub fn init_population<R: Rng>(
    g: &Graph,
    seed: &NodeSet,
    cfg: &EvolutionConfig,
    rng: &mut R,
) -> Result<Population, EvolutionError> {
    fill_population(g, seed, Vec::new(), cfg, rng)
}

/// Completes `members` with adapted mutants of `seed`.
pub fn fill_population<R: Rng>(
    g: &Graph,
    seed: &NodeSet,
    members: Vec<Community>,
    cfg: &EvolutionConfig,
    rng: &mut R,
) -> Result<Population, EvolutionError> {
    cfg.validate()?;
    let budget = cfg.budget();
    let mut found: Vec<Community> = Vec::new();
    let mut seen = HashSet::new();
    for c in members {
        if seen.insert(c.fingerprint()) {
            found.push(c);
        }
    }
    let mut attempts = 0;
    while found.len() < cfg.population_size && attempts < cfg.population_size * INIT_ATTEMPTS_PER_SLOT {
        attempts += 1;
        for c in adapt_to_communities(g, mutate(g, seed, cfg.init_variance, budget, rng)?)? {
            check_size(g, &c)?;
            if seen.insert(c.fingerprint()) {
                found.push(c);
            }
        }
    }
    if found.len() < cfg.population_size {
        return Err(EvolutionError::NotEnoughMutants {
            found: found.len(),
            needed: cfg.population_size,
        });
    }
    Ok(Population::from_members(found, cfg.population_size))
}

/// One line of the evolution trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub generation: usize,
    pub best_psi: f64,
    pub best_links: usize,
    pub entropy: f64,
    pub variance: f64,
}

#[derive(Debug, Clone)]
pub struct EvolutionOutcome {
    pub best: Community,
    pub deferred: Vec<Community>,
    pub trace: Vec<TraceRow>,
    pub renewals: usize,
}

/// Runs one evolution until the best community is older than
/// `cfg.best_max_age` generations. `pop` is left in its final state.
pub fn evolve<R: Rng>(
    g: &Graph,
    pop: &mut Population,
    cfg: &EvolutionConfig,
    rng: &mut R,
) -> Result<EvolutionOutcome, EvolutionError> {
    cfg.validate()?;
    let budget = cfg.budget();
    let mut variance = cfg.low_variance;
    let mut stale = 0;
    let mut window: VecDeque<usize> = VecDeque::with_capacity(cfg.stagnation_generations + 1);
    let mut deferred = Vec::new();
    let mut trace = Vec::new();
    let mut renewals = 0;
    pop.best_age = 0;

    for generation in 0..MAX_GENERATIONS {
        let original = pop.best().clone();
        let min_range = cfg.min_range(original.len());

        let mut candidates =
            adapt_to_communities(g, mutate(g, original.nodes(), variance, budget, rng)?)?;
        let others = pop.len() - 1;
        let partners = cfg.crossover_partners.min(others);
        if partners > 0 {
            let picks: Vec<usize> = sample(rng, others, partners).into_iter().collect();
            for i in picks {
                let partner = pop.members()[i + 1].clone();
                candidates.extend(crossover(g, &original, &partner, budget)?);
            }
        }
        for c in &candidates {
            check_size(g, c)?;
        }
        let selection = pop.select(candidates, min_range);
        deferred.extend(selection.deferred);

        let mut improved = pop.best().rank_cmp(&original).is_lt();
        window.push_back(selection.accepted);
        if window.len() > cfg.stagnation_generations {
            window.pop_front();
        }
        stale = if improved { 0 } else { stale + 1 };

        match cfg.schedule {
            VarianceSchedule::Fixed => {
                let quiet = window.iter().sum::<usize>() == 0;
                if stale >= cfg.stagnation_generations && quiet {
                    renewals += 1;
                    let before = pop.best().clone();
                    let mut fresh = Vec::new();
                    for _ in 0..cfg.population_size {
                        fresh.extend(adapt_to_communities(
                            g,
                            mutate(g, before.nodes(), cfg.renewal_variance, budget, rng)?,
                        )?);
                    }
                    for c in &fresh {
                        check_size(g, c)?;
                    }
                    let renewal = pop.select(fresh, cfg.min_range(before.len()));
                    deferred.extend(renewal.deferred);
                    pop.accepted_since_renewal = 0;
                    stale = 0;
                    window.clear();
                    improved |= pop.best().rank_cmp(&before).is_lt();
                    if renewal.accepted == 0 {
                        log::debug!("renewal brought nothing new; ending evolution");
                        trace.push(trace_row(generation, pop, variance));
                        break;
                    }
                }
            }
            VarianceSchedule::Decreasing => {
                if !improved {
                    let floor = 1.0 / pop.best().nodes().len().max(1) as f64;
                    variance = (variance * cfg.variance_decay).max(floor);
                }
            }
        }

        pop.best_age = if improved { 0 } else { pop.best_age + 1 };
        trace.push(trace_row(generation, pop, variance));
        if pop.best_age > cfg.best_max_age {
            break;
        }
    }

    Ok(EvolutionOutcome {
        best: pop.best().clone(),
        deferred,
        trace,
        renewals,
    })
}

fn trace_row(generation: usize, pop: &Population, variance: f64) -> TraceRow {
    TraceRow {
        generation,
        best_psi: pop.best().psi(),
        best_links: pop.best().len(),
        entropy: pop.entropy(),
        variance,
    }
}

/// Configuration of the two evolution rounds run for each seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolConfig {
    pub first_round: EvolutionConfig,
    pub second_round: EvolutionConfig,
    pub first_round_runs: usize,
    pub second_round_runs: usize,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            first_round: EvolutionConfig::first_round(),
            second_round: EvolutionConfig::second_round(),
            first_round_runs: 5,
            second_round_runs: 10,
        }
    }
}

impl ProtocolConfig {
    /// Same settings with `resolution` in both rounds.
    pub fn with_resolution(mut self, r: f64) -> Self {
        self.first_round.resolution = r;
        self.second_round.resolution = r;
        self
    }

    pub fn resolution(&self) -> f64 {
        self.first_round.resolution
    }

    pub fn validate(&self) -> Result<(), EvolutionError> {
        self.first_round.validate()?;
        self.second_round.validate()?;
        if self.first_round.resolution != self.second_round.resolution {
            return Err(EvolutionError::Config(
                "both rounds must use the same resolution".into(),
            ));
        }
        Ok(())
    }
}

/// Why a protocol run fell back to its intermediate results.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Salvage {
    NotEnoughMutants,
    Oversized,
}

/// A trace row tagged with its round and run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolTraceRow {
    pub round: usize,
    pub run: usize,
    #[serde(flatten)]
    pub row: TraceRow,
}

#[derive(Debug, Clone)]
pub struct ProtocolOutcome {
    /// Link-wise adapted, connected final communities.
    pub communities: Vec<Community>,
    /// Node sets of deferred would-be bests, usable as further seeds.
    pub deferred_seeds: Vec<NodeSet>,
    pub salvage: Option<Salvage>,
    pub trace: Vec<ProtocolTraceRow>,
}

fn classify(e: EvolutionError) -> Result<Salvage, EvolutionError> {
    match e {
        EvolutionError::NotEnoughMutants { .. } => Ok(Salvage::NotEnoughMutants),
        EvolutionError::Oversized { .. } => Ok(Salvage::Oversized),
        other => Err(other),
    }
}

/// Runs the full two-round procedure for one seed subgraph.
///
/// The seed is adapted node-wise; up to `first_round_runs` fixed-variance
/// evolutions start from it, and their results seed a smaller population
/// that runs up to `second_round_runs` decreasing-variance evolutions. The
/// overall best is adapted link-wise. When a population cannot be filled or
/// a search grows beyond three quarters of the network, the intermediate
/// results are adapted link-wise instead.
pub fn run_protocol<R: Rng>(
    g: &Graph,
    seed: &NodeSet,
    cfg: &ProtocolConfig,
    rng: &mut R,
) -> Result<ProtocolOutcome, EvolutionError> {
    cfg.validate()?;
    let budget = cfg.first_round.budget();
    let mut start = seed.clone();
    if start.induced_links(g).is_empty() {
        // a lone node stands for the subgraph of its links
        start = NodeSet::new(
            seed.as_slice()
                .iter()
                .flat_map(|&v| std::iter::once(v).chain(g.neighbors(v).iter().map(|&(u, _)| u))),
        );
    }
    let adapted = node_wise_adapt(g, &start, SearchDirection::InclusionFirst, budget)?;
    let adapted_community = Community::induced(g, &adapted)?;

    let mut intermediates = vec![adapted_community.clone()];
    let mut deferred: Vec<Community> = Vec::new();
    let mut trace = Vec::new();
    let mut overall: Option<Community> = None;

    let end = (|| -> Result<(), EvolutionError> {
        check_size(g, &adapted_community).map_err(|_| EvolutionError::Oversized {
            links: adapted_community.len(),
        })?;
        for run in 0..cfg.first_round_runs {
            let mut pop = init_population(g, &adapted, &cfg.first_round, rng)?;
            let out = evolve(g, &mut pop, &cfg.first_round, rng)?;
            trace.extend(out.trace.into_iter().map(|row| ProtocolTraceRow { round: 1, run, row }));
            deferred.extend(out.deferred);
            intermediates.push(out.best.clone());
            let repeat = overall.as_ref().is_some_and(|b| b.fingerprint() == out.best.fingerprint());
            if overall.as_ref().is_none_or(|b| out.best.rank_cmp(b).is_lt()) {
                overall = Some(out.best);
            }
            if repeat {
                break;
            }
        }
        let round_one_best = overall.clone().expect("at least one first-round run");
        let mut pop = fill_population(
            g,
            round_one_best.nodes(),
            rank_sorted(intermediates[1..].to_vec()),
            &cfg.second_round,
            rng,
        )?;
        for run in 0..cfg.second_round_runs {
            let out = evolve(g, &mut pop, &cfg.second_round, rng)?;
            trace.extend(out.trace.into_iter().map(|row| ProtocolTraceRow { round: 2, run, row }));
            deferred.extend(out.deferred);
            intermediates.push(out.best.clone());
            let better = overall.as_ref().is_none_or(|b| out.best.rank_cmp(b).is_lt());
            if better {
                overall = Some(out.best);
            } else {
                break;
            }
        }
        Ok(())
    })();

    let (starts, salvage) = match end {
        Ok(()) => (vec![overall.expect("protocol produced a best")], None),
        Err(e) => {
            let s = classify(e)?;
            log::debug!("protocol salvaged: {s:?}");
            (intermediates, Some(s))
        }
    };

    let mut communities: Vec<Community> = Vec::new();
    for s in &starts {
        for c in link_wise_adapt(g, s.links(), SearchDirection::InclusionFirst, budget)? {
            if !communities.iter().any(|o| o.fingerprint() == c.fingerprint()) {
                communities.push(c);
            }
        }
    }
    communities.sort_by(|a, b| a.rank_cmp(b));
    let mut deferred_seeds: Vec<NodeSet> = deferred.iter().map(|c| c.nodes().clone()).collect();
    deferred_seeds.sort();
    deferred_seeds.dedup();
    Ok(ProtocolOutcome {
        communities,
        deferred_seeds,
        salvage,
        trace,
    })
}

fn rank_sorted(mut v: Vec<Community>) -> Vec<Community> {
    v.sort_by(|a, b| a.rank_cmp(b));
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::distance;
    use crate::search::is_node_local_minimum;
    use crate::synthetic::{bow_tie, clique_chain, clique_links, HierarchicalSbm};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn small(pop: usize) -> EvolutionConfig {
        EvolutionConfig {
            population_size: pop,
            ..EvolutionConfig::default()
        }
    }

    #[test]
    fn mutant_has_community_size() {
        let g = clique_chain(3, 6, 2);
        let c = NodeSet::new(0..6);
        let mut r = rng(1);
        for v in [0.02, 0.15, 0.5, 0.9] {
            for _ in 0..50 {
                assert_eq!(random_mutant(&g, &c, v, &mut r).unwrap().len(), c.len());
            }
        }
    }

    #[test]
    fn low_variance_keeps_all_but_one() {
        assert_eq!(mutation_core_size(10, 0.02), 9);
        assert_eq!(mutation_core_size(10, 0.15), 9);
        assert_eq!(mutation_core_size(10, 0.5), 6);
        let g = clique_chain(2, 10, 3);
        let c = NodeSet::new(0..10);
        let mut r = rng(2);
        for _ in 0..50 {
            let m = random_mutant(&g, &c, 0.02, &mut r).unwrap();
            assert!(c.intersection(&m).len() >= 9);
        }
    }

    #[test]
    fn mutation_results_are_node_local_minima() {
        let g = bow_tie();
        let c = NodeSet::new([0, 1, 2]);
        let mut r = rng(3);
        for _ in 0..20 {
            for m in mutate(&g, &c, 0.34, SearchBudget::default(), &mut r).unwrap() {
                assert!(is_node_local_minimum(&g, &m).unwrap(), "{m:?}");
            }
        }
    }

    #[test]
    fn crossover_skips_nested_and_disjoint() {
        let g = bow_tie();
        let a = Community::from_links(&g, vec![0, 1, 2]).unwrap();
        let b = Community::from_links(&g, vec![0, 1, 2, 3]).unwrap();
        let d = Community::from_links(&g, vec![4]).unwrap();
        let budget = SearchBudget::default();
        assert!(crossover(&g, &a, &b, budget).unwrap().is_empty());
        assert!(crossover(&g, &b, &a, budget).unwrap().is_empty());
        assert!(crossover(&g, &Community::from_links(&g, vec![0]).unwrap(), &d, budget)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn crossover_of_overlapping_cliques() {
        // 12 links: two 4-cliques sharing one edge's worth of structure via a bridge pair
        let g = clique_chain(2, 4, 0);
        let mut pairs: Vec<(usize, usize)> = g.links().to_vec();
        pairs.push((3, 4));
        pairs.push((2, 5));
        let g = Graph::from_pairs(8, &pairs).unwrap();
        assert_eq!(g.link_count(), 14);
        let a = Community::induced(&g, &NodeSet::new([0, 1, 2, 3, 4])).unwrap();
        let b = Community::induced(&g, &NodeSet::new([3, 4, 5, 6, 7])).unwrap();
        let out = crossover(&g, &a, &b, SearchBudget::default()).unwrap();
        assert!(!out.is_empty());
        for c in &out {
            assert!(is_node_local_minimum(&g, c.nodes()).unwrap());
        }
    }

    fn two_cliques() -> (Graph, Community, Community) {
        let g = clique_chain(2, 4, 1);
        let a = Community::from_links(&g, clique_links(&g, 0, 4)).unwrap();
        let b = Community::from_links(&g, clique_links(&g, 1, 4)).unwrap();
        (g, a, b)
    }

    #[test]
    fn select_ignores_duplicates_and_worse() {
        let (g, a, _) = two_cliques();
        let worse = Community::from_links(&g, vec![0, 1]).unwrap();
        let mut pop = Population::from_members(vec![a.clone(), worse.clone()], 2);
        let sel = pop.select(vec![a.clone()], 1);
        assert_eq!(sel.accepted, 0);
        let worst = Community::from_links(&g, vec![0]).unwrap();
        assert!(worst.psi() > worse.psi());
        let sel = pop.select(vec![worst], 1);
        assert_eq!(sel.accepted, 0);
        assert_eq!(pop.members(), &[a, worse]);
    }

    #[test]
    fn distant_new_best_is_deferred() {
        let (g, a, _) = two_cliques();
        let weak = Community::from_links(&g, vec![0, 1, 3]).unwrap();
        let weaker = Community::from_links(&g, vec![0]).unwrap();
        let mut pop = Population::from_members(vec![weak.clone(), weaker.clone()], 2);
        assert!(a.psi() < weak.psi());
        assert!(distance(a.links(), weak.links()) > 1);
        let sel = pop.select(vec![a.clone()], 1);
        assert_eq!(sel.accepted, 0);
        assert_eq!(sel.deferred, vec![a]);
        assert_eq!(pop.members(), &[weak, weaker]);
    }

    #[test]
    fn bow_tie_evolution_finds_triangle() {
        let g = bow_tie();
        let cfg = small(2);
        for seed in 0..5 {
            let mut r = rng(seed);
            let start = node_wise_adapt(
                &g,
                &NodeSet::new([0, 1]),
                SearchDirection::InclusionFirst,
                cfg.budget(),
            )
            .unwrap();
            let Ok(mut pop) = fill_population(
                &g,
                &start,
                vec![Community::induced(&g, &start).unwrap()],
                &cfg,
                &mut r,
            ) else {
                continue;
            };
            let out = evolve(&g, &mut pop, &cfg, &mut r).unwrap();
            assert!((out.best.psi() - 1.0 / 3.0).abs() < 1e-12);
            assert_eq!(out.best.len(), 3);
        }
    }

    #[test]
    fn tiny_landscape_cannot_fill_sixteen() {
        let g = bow_tie();
        let r = init_population(&g, &NodeSet::new([0, 1, 2]), &small(16), &mut rng(0));
        assert!(matches!(r, Err(EvolutionError::NotEnoughMutants { .. })));
    }

    fn noisy_blocks() -> Graph {
        HierarchicalSbm {
            groups: 2,
            blocks_per_group: 2,
            block_size: 12,
            p_block: 0.5,
            p_group: 0.08,
            p_background: 0.03,
        }
        .generate(4)
    }

    #[test]
    fn evolution_is_deterministic_and_monotone() {
        let g = noisy_blocks();
        let cfg = small(3);
        let seed = NodeSet::new([0, 1, 2, 3]);
        let run = |s| {
            let mut r = rng(s);
            let adapted =
                node_wise_adapt(&g, &seed, SearchDirection::InclusionFirst, cfg.budget()).unwrap();
            let mut pop = init_population(&g, &adapted, &cfg, &mut r).unwrap();
            evolve(&g, &mut pop, &cfg, &mut r).unwrap()
        };
        let a = run(9);
        let b = run(9);
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.best, b.best);
        for w in a.trace.windows(2) {
            assert!(w[1].best_psi <= w[0].best_psi + 1e-12);
        }
    }

    #[test]
    fn protocol_on_two_cliques_recovers_seeded_clique() {
        let (g, a, b) = two_cliques();
        let cfg = ProtocolConfig::default();
        let out = run_protocol(&g, &NodeSet::new([0, 1]), &cfg, &mut rng(5)).unwrap();
        let found: Vec<_> = out.communities.iter().map(|c| c.fingerprint()).collect();
        assert!(found.contains(&a.fingerprint()) || found.contains(&b.fingerprint()), "{out:?}");
    }

    #[test]
    fn protocol_is_reproducible() {
        let g = noisy_blocks();
        let cfg = ProtocolConfig {
            first_round: small(4),
            second_round: EvolutionConfig {
                population_size: 3,
                ..EvolutionConfig::second_round()
            },
            ..ProtocolConfig::default()
        };
        let seed = NodeSet::new([0, 1]);
        let a = run_protocol(&g, &seed, &cfg, &mut rng(1)).unwrap();
        let b = run_protocol(&g, &seed, &cfg, &mut rng(1)).unwrap();
        assert_eq!(a.communities, b.communities);
        assert_eq!(a.trace, b.trace);
    }
}
