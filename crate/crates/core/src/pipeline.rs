//! Batch orchestration: seeds, parallel protocol runs, the community
//! registry with re-validation, and the coverage stopping rule.

use std::collections::{HashMap, HashSet, VecDeque};
use std::io::{BufRead, Write};
use std::path::PathBuf;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::analysis::{coverage_curve, SelectionCriteria};
use crate::community::{Community, Fingerprint};
use crate::cost::{psi_less, CostError};
use crate::graph::{Graph, LinkId, NodeSet};
use crate::memetic::{run_protocol, EvolutionError, ProtocolConfig, ProtocolTraceRow, Salvage};
use crate::validity::{
    check_validity, checked_radius, complement_candidates, plateau_twin, twin_verdict, Reason,
    Status, ValidityError, ValidityVerdict,
};

/// Deferred seeds taken into one batch at most, beyond the fresh seeds.
const MAX_QUEUED_PER_BATCH: usize = 32;
/// Stream index reserved for drawing a batch's random seeds.
const SEED_STREAM: u64 = u64::MAX;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid run config: {0}")]
    Config(String),
    #[error(transparent)]
    Evolution(#[from] EvolutionError),
    #[error(transparent)]
    Validity(#[from] ValidityError),
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error("registry line {line}: {message}")]
    Registry { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SeedStrategy {
    /// `count` random nodes per batch, each with all its neighbours.
    RandomNodeLinks { count: usize },
    /// One seed per line of node labels, used in the first batch.
    SeedFile { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StopRule {
    /// A batch whose coverage gain is at most this counts as quiet.
    pub epsilon: f64,
    /// Consecutive quiet batches before stopping.
    pub patience: usize,
    pub max_batches: usize,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule {
            epsilon: 0.005,
            patience: 2,
            max_batches: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub graph: Option<PathBuf>,
    pub output: PathBuf,
    pub seeds: SeedStrategy,
    pub resolution: f64,
    /// Worker threads; 0 uses all cores.
    pub workers: usize,
    pub master_seed: u64,
    pub stop: StopRule,
    pub protocol: ProtocolConfig,
    pub selection: SelectionCriteria,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            graph: None,
            output: PathBuf::from("out"),
            seeds: SeedStrategy::RandomNodeLinks { count: 8 },
            resolution: 1.0 / 3.0,
            workers: 0,
            master_seed: 1,
            stop: StopRule::default(),
            protocol: ProtocolConfig::default(),
            selection: SelectionCriteria::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, PipelineError> {
        toml::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))
    }

    /// Protocol settings with the run's resolution.
    pub fn effective_protocol(&self) -> ProtocolConfig {
        self.protocol.clone().with_resolution(self.resolution)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: &str| Err(PipelineError::Config(m.to_owned()));
        if !(self.resolution > 0.0 && self.resolution < 1.0) {
            return bad("resolution must lie in (0, 1)");
        }
        if let SeedStrategy::RandomNodeLinks { count: 0 } = self.seeds {
            return bad("seed count must be positive");
        }
        if !(self.stop.epsilon >= 0.0) || self.stop.patience == 0 || self.stop.max_batches == 0 {
            return bad("stop rule needs epsilon >= 0, patience > 0 and max_batches > 0");
        }
        if !(self.selection.exclude_larger_than > 0.0 && self.selection.exclude_larger_than <= 1.0) {
            return bad("exclude_larger_than must lie in (0, 1]");
        }
        self.effective_protocol().validate()?;
        Ok(())
    }
}

/// Independent random stream for `(master, batch, index)`.
pub fn stream_rng(master: u64, batch: u64, index: u64) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update(batch.to_le_bytes());
    h.update(index.to_le_bytes());
    let digest = h.finalize();
    let mut seed = [0u8; 32];
    seed.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(seed)
}

/// A random node together with all its neighbours, `count` times.
pub fn random_star_seeds<R: Rng>(g: &Graph, count: usize, rng: &mut R) -> Vec<NodeSet> {
    (0..count)
        .map(|_| {
            let v = rng.random_range(0..g.node_count());
            NodeSet::new(std::iter::once(v).chain(g.neighbors(v).iter().map(|&(u, _)| u)))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    Protocol,
    Salvage,
    Complement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub batch: usize,
    pub seed: usize,
    pub origin: Origin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegistryRecord {
    pub fingerprint: Fingerprint,
    pub psi: f64,
    pub links: Vec<LinkId>,
    pub verdict: Option<ValidityVerdict>,
    pub provenance: Provenance,
}

/// Append-only store of every community found, in discovery order.
#[derive(Debug, Clone, Default)]
pub struct Registry {
    communities: Vec<Community>,
    verdicts: Vec<Option<ValidityVerdict>>,
    provenance: Vec<Provenance>,
    index: HashMap<Fingerprint, usize>,
}

impl Registry {
    pub fn len(&self) -> usize {
        self.communities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.communities.is_empty()
    }

    pub fn communities(&self) -> &[Community] {
        &self.communities
    }

    pub fn verdict(&self, i: usize) -> Option<&ValidityVerdict> {
        self.verdicts[i].as_ref()
    }

    pub fn provenance(&self, i: usize) -> Provenance {
        self.provenance[i]
    }

    pub fn find(&self, f: Fingerprint) -> Option<usize> {
        self.index.get(&f).copied()
    }

    /// Adds a community unless already known; returns its new index.
    pub fn insert(&mut self, c: Community, provenance: Provenance) -> Option<usize> {
        if self.index.contains_key(&c.fingerprint()) {
            return None;
        }
        let i = self.communities.len();
        self.index.insert(c.fingerprint(), i);
        self.communities.push(c);
        self.verdicts.push(None);
        self.provenance.push(provenance);
        Some(i)
    }

    pub fn set_verdict(&mut self, i: usize, v: ValidityVerdict) {
        self.verdicts[i] = Some(v);
    }

    pub fn is_valid(&self, i: usize) -> bool {
        self.verdicts[i].as_ref().is_some_and(ValidityVerdict::is_valid)
    }

    /// Valid communities in rank order.
    pub fn valid(&self) -> Vec<Community> {
        let mut v: Vec<Community> = (0..self.len())
            .filter(|&i| self.is_valid(i))
            .map(|i| self.communities[i].clone())
            .collect();
        v.sort_by(|a, b| a.rank_cmp(b));
        v
    }

    pub fn records(&self) -> impl Iterator<Item = RegistryRecord> + '_ {
        (0..self.len()).map(|i| RegistryRecord {
            fingerprint: self.communities[i].fingerprint(),
            psi: self.communities[i].psi(),
            links: self.communities[i].links().to_vec(),
            verdict: self.verdicts[i].clone(),
            provenance: self.provenance[i],
        })
    }

    /// One JSON record per line.
    pub fn write_ndjson<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for r in self.records() {
            serde_json::to_writer(&mut w, &r)?;
            w.write_all(b"\n")?;
        }
        w.flush()
    }

    /// Reads records written by [`Registry::write_ndjson`], recomputing Ψ and
    /// fingerprints against `g`.
    pub fn read_ndjson<R: BufRead>(g: &Graph, reader: R) -> Result<Self, PipelineError> {
        let mut reg = Registry::default();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fail = |message: String| PipelineError::Registry {
                line: lineno + 1,
                message,
            };
            let rec: RegistryRecord =
                serde_json::from_str(&line).map_err(|e| fail(e.to_string()))?;
            let c = Community::from_links(g, rec.links).map_err(|e| fail(e.to_string()))?;
            if c.fingerprint() != rec.fingerprint {
                return Err(fail("fingerprint does not match links".into()));
            }
            let i = reg
                .insert(c, rec.provenance)
                .ok_or_else(|| fail("duplicate community".into()))?;
            reg.verdicts[i] = rec.verdict;
        }
        Ok(reg)
    }

    /// Checks new entries fully, cross-checks older valid entries against
    /// the new ones, then keeps one community per tied plateau.
    ///
    /// Entries that are already invalid stay invalid.
    pub fn revalidate(&mut self, g: &Graph, r: f64, new: &[usize]) -> Result<(), PipelineError> {
        let known = self.communities.clone();
        let fresh: Vec<(usize, ValidityVerdict)> = new
            .par_iter()
            .map(|&i| check_validity(g, &known[i], r, &known).map(|v| (i, v)))
            .collect::<Result<_, _>>()?;
        let is_new: HashSet<usize> = new.iter().copied().collect();
        for i in 0..self.len() {
            if is_new.contains(&i) || !self.is_valid(i) {
                continue;
            }
            let c = &self.communities[i];
            let radius = checked_radius(r, c.len());
            let witness = new
                .iter()
                .map(|&j| &self.communities[j])
                .filter(|w| psi_less(w.psi(), c.psi()) && c.distance(w) <= radius)
                .min_by(|a, b| c.distance(a).cmp(&c.distance(b)).then_with(|| a.rank_cmp(b)));
            if let Some(w) = witness {
                let v = ValidityVerdict {
                    status: Status::Invalid,
                    reason: Reason::LowerWitness,
                    witness: Some(w.links().to_vec()),
                    witness_psi: Some(w.psi()),
                    checked_radius: radius,
                    exhaustive: false,
                };
                self.verdicts[i] = Some(v);
            }
        }
        for (i, v) in fresh {
            self.verdicts[i] = Some(v);
        }

        let mut order: Vec<usize> = (0..self.len()).filter(|&i| self.is_valid(i)).collect();
        order.sort_by(|&a, &b| self.communities[a].rank_cmp(&self.communities[b]));
        let mut accepted: Vec<Community> = Vec::new();
        for i in order {
            let c = &self.communities[i];
            if let Some(twin) = plateau_twin(c, r, &accepted) {
                self.verdicts[i] = Some(twin_verdict(twin, checked_radius(r, c.len())));
            } else {
                accepted.push(c.clone());
            }
        }
        Ok(())
    }
}

/// Where a run takes its seeds from.
#[derive(Debug, Clone)]
pub enum SeedSource {
    Random { count: usize },
    Fixed(Vec<NodeSet>),
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceRecord {
    pub batch: usize,
    pub seed: usize,
    #[serde(flatten)]
    pub row: ProtocolTraceRow,
}

#[derive(Debug, Clone, Serialize)]
pub struct BatchSummary {
    pub batch: usize,
    pub seeds: usize,
    pub failures: usize,
    pub salvaged: usize,
    pub new_communities: usize,
    pub valid: usize,
    pub coverage: f64,
    pub gain: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    CoverageSettled,
    NoSeeds,
    MaxBatches,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub registry: Registry,
    pub trace: Vec<TraceRecord>,
    pub batches: Vec<BatchSummary>,
    pub stop: StopReason,
}

impl RunOutcome {
    pub fn coverage(&self) -> f64 {
        self.batches.last().map_or(0.0, |b| b.coverage)
    }
}

/// Covered fraction of the valid communities within the size limit.
pub fn valid_coverage(g: &Graph, registry: &Registry, exclude_larger_than: f64) -> f64 {
    let limit = exclude_larger_than * g.link_count() as f64;
    coverage_curve(g, &registry.valid(), |c| c.len() as f64 > limit)
        .last()
        .map_or(0.0, |p| p.fraction)
}

/// Runs batches of protocol runs until the coverage of valid communities
/// stops growing.
pub fn run_batches(
    g: &Graph,
    cfg: &RunConfig,
    source: &SeedSource,
) -> Result<RunOutcome, PipelineError> {
    cfg.validate()?;
    let protocol = cfg.effective_protocol();
    let r = cfg.resolution;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if cfg.workers > 0 {
        builder = builder.num_threads(cfg.workers);
    }
    let pool = builder.build()?;

    let m = g.link_count();
    let mut registry = Registry::default();
    let mut trace = Vec::new();
    let mut batches: Vec<BatchSummary> = Vec::new();
    let mut queue: VecDeque<NodeSet> = VecDeque::new();
    let mut tried: HashSet<NodeSet> = HashSet::new();
    let mut quiet = 0;
    let mut coverage = 0.0;
    let mut stop = StopReason::MaxBatches;

    for batch in 1..=cfg.stop.max_batches {
        let started = Instant::now();
        let mut seeds: Vec<NodeSet> = match source {
            SeedSource::Random { count } => {
                random_star_seeds(g, *count, &mut stream_rng(cfg.master_seed, batch as u64, SEED_STREAM))
            }
            SeedSource::Fixed(v) if batch == 1 => v.clone(),
            SeedSource::Fixed(_) => Vec::new(),
        };
        let mut taken = 0;
        while taken < MAX_QUEUED_PER_BATCH {
            let Some(s) = queue.pop_front() else { break };
            seeds.push(s);
            taken += 1;
        }
        if seeds.is_empty() {
            stop = StopReason::NoSeeds;
            break;
        }
        for s in &seeds {
            tried.insert(s.clone());
        }

        let outcomes: Vec<_> = pool.install(|| {
            seeds
                .par_iter()
                .enumerate()
                .map(|(i, s)| {
                    let mut rng = stream_rng(cfg.master_seed, batch as u64, i as u64);
                    run_protocol(g, s, &protocol, &mut rng)
                })
                .collect()
        });

        let mut new = Vec::new();
        let mut failures = 0;
        let mut salvaged = 0;
        for (seed, outcome) in outcomes.into_iter().enumerate() {
            let out = match outcome {
                Ok(o) => o,
                Err(e) => {
                    log::warn!("batch {batch} seed {seed}: {e}");
                    failures += 1;
                    continue;
                }
            };
            let origin = if out.salvage.is_some() {
                salvaged += 1;
                Origin::Salvage
            } else {
                Origin::Protocol
            };
            if let Some(Salvage::Oversized) = out.salvage {
                log::info!("batch {batch} seed {seed}: search outgrew three quarters of the network");
            }
            for c in out.communities {
                if let Some(i) = registry.insert(c, Provenance { batch, seed, origin }) {
                    new.push(i);
                }
            }
            for s in out.deferred_seeds {
                if !tried.contains(&s) && !queue.contains(&s) {
                    queue.push_back(s);
                }
            }
            trace.extend(out.trace.into_iter().map(|row| TraceRecord { batch, seed, row }));
        }

        let mid: Vec<usize> = new
            .iter()
            .copied()
            .filter(|&i| {
                let n = registry.communities()[i].len();
                4 * n > m && 4 * n <= 3 * m
            })
            .collect();
        for i in mid {
            let c = registry.communities()[i].clone();
            let seed = registry.provenance(i).seed;
            for cand in complement_candidates(g, &c, r)? {
                let prov = Provenance {
                    batch,
                    seed,
                    origin: Origin::Complement,
                };
                if let Some(j) = registry.insert(cand, prov) {
                    new.push(j);
                }
            }
        }

        pool.install(|| registry.revalidate(g, r, &new))?;
        let now = valid_coverage(g, &registry, cfg.selection.exclude_larger_than);
        let gain = now - coverage;
        coverage = now;
        let valid = (0..registry.len()).filter(|&i| registry.is_valid(i)).count();
        log::info!(
            "batch {batch}: {} seeds, {} new, {valid} valid, coverage {now:.4} (+{gain:.4})",
            seeds.len(),
            new.len()
        );
        batches.push(BatchSummary {
            batch,
            seeds: seeds.len(),
            failures,
            salvaged,
            new_communities: new.len(),
            valid,
            coverage: now,
            gain,
            seconds: started.elapsed().as_secs_f64(),
        });
        quiet = if gain <= cfg.stop.epsilon { quiet + 1 } else { 0 };
        if quiet >= cfg.stop.patience {
            stop = StopReason::CoverageSettled;
            break;
        }
    }
    if registry.valid().is_empty() {
        log::warn!("run ended without valid communities");
    }
    Ok(RunOutcome {
        registry,
        trace,
        batches,
        stop,
    })
}
