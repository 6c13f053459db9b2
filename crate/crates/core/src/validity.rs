//! Range-based validity of local minima.
//!
//! A community is valid when no connected link set with strictly lower Ψ
//! lies within `R_min = floor(r |L|)` single-link moves of it, and it holds
//! at most three quarters of all links. The check is exact when the ball of
//! radius `R_min` is small enough to enumerate; otherwise it runs bounded
//! beam excursions and compares against already known communities, so a
//! "valid" verdict then means "valid up to search power".

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::community::Community;
use crate::cost::{psi_less, psi_tied, CostError, LinkSet};
use crate::graph::{is_connected_link_set, link_components, Graph, LinkId};
use crate::search::{link_wise_adapt, SearchBudget, SearchDirection, SearchError};

/// Largest number of move combinations searched exhaustively.
pub const EXHAUSTIVE_LIMIT: u64 = 50_000;
const BEAM_WIDTH: usize = 8;

#[derive(Debug, Error)]
pub enum ValidityError {
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("complement is empty")]
    EmptyComplement,
    #[error("community of {links} links is outside the complement size window [{low}, {high}]")]
    ComplementWindow { links: usize, low: usize, high: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Valid,
    Invalid,
    /// Larger than three quarters of the network; counted as invalid.
    Undecidable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reason {
    /// No lower connected set found within the checked radius.
    RangeClear,
    /// A connected set with strictly lower Ψ lies within the radius.
    LowerWitness,
    /// A better ranked community with equal Ψ lies within the radius.
    PlateauTwin,
    /// More than three quarters of all links.
    Oversized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidityVerdict {
    pub status: Status,
    pub reason: Reason,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<LinkId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_psi: Option<f64>,
    pub checked_radius: usize,
    /// Whether the whole ball of `checked_radius` was enumerated.
    pub exhaustive: bool,
}

impl ValidityVerdict {
    pub fn is_valid(&self) -> bool {
        self.status == Status::Valid
    }

    fn invalid(reason: Reason, witness: Community, radius: usize, exhaustive: bool) -> Self {
        ValidityVerdict {
            status: Status::Invalid,
            reason,
            witness_psi: Some(witness.psi()),
            witness: Some(witness.links().to_vec()),
            checked_radius: radius,
            exhaustive,
        }
    }
}

/// `floor(r |L|)`, at least 1 so that non-minima are always rejected.
pub fn checked_radius(r: f64, links: usize) -> usize {
    ((r * links as f64).floor() as usize).max(1)
}

/// Whether a community is too large for its range to be determined.
pub fn is_oversized(g: &Graph, links: usize) -> bool {
    4 * links > 3 * g.link_count()
}

/// Decides the validity of `community` at resolution `r`.
///
/// `known` holds other communities (any validity); those with strictly
/// lower Ψ within the radius act as witnesses directly.
pub fn check_validity(
    g: &Graph,
    community: &Community,
    r: f64,
    known: &[Community],
) -> Result<ValidityVerdict, ValidityError> {
    SearchBudget::new(r)?;
    let radius = checked_radius(r, community.len());
    if is_oversized(g, community.len()) {
        return Ok(ValidityVerdict {
            status: Status::Undecidable,
            reason: Reason::Oversized,
            witness: None,
            witness_psi: None,
            checked_radius: 0,
            exhaustive: false,
        });
    }
    let base = community.to_link_set(g);
    let psi = base.psi_checked()?;

    if let Some(w) = known_witness(community, radius, known) {
        return Ok(ValidityVerdict::invalid(Reason::LowerWitness, w.clone(), radius, false));
    }

    let universe = move_universe(g, &base, radius);
    let exhaustive = ball_size(universe.len(), radius) <= EXHAUSTIVE_LIMIT;
    let witness = if exhaustive {
        nearest_witness(g, base, psi, &universe, radius)?
    } else {
        excursion_witness(g, &base, psi, radius)?
    };
    Ok(match witness {
        Some(w) => ValidityVerdict::invalid(Reason::LowerWitness, w, radius, exhaustive),
        None => ValidityVerdict {
            status: Status::Valid,
            reason: Reason::RangeClear,
            witness: None,
            witness_psi: None,
            checked_radius: radius,
            exhaustive,
        },
    })
}

fn known_witness<'a>(
    community: &Community,
    radius: usize,
    known: &'a [Community],
) -> Option<&'a Community> {
    known
        .iter()
        .filter(|k| psi_less(k.psi(), community.psi()) && community.distance(k) <= radius)
        .min_by(|a, b| {
            community
                .distance(a)
                .cmp(&community.distance(b))
                .then_with(|| a.rank_cmp(b))
        })
}

/// A better ranked community tied in Ψ within the radius of `community`.
///
/// Tied neighbours on a plateau would otherwise all count as valid; only
/// the best ranked one is kept.
pub fn plateau_twin<'a>(
    community: &Community,
    r: f64,
    accepted: &'a [Community],
) -> Option<&'a Community> {
    let radius = checked_radius(r, community.len());
    accepted.iter().find(|k| {
        k.fingerprint() != community.fingerprint()
            && psi_tied(k.psi(), community.psi())
            && k.rank_cmp(community).is_lt()
            && community.distance(k) <= radius
    })
}

/// Verdict for a community shadowed by the tied, better ranked `twin`.
pub fn twin_verdict(twin: &Community, radius: usize) -> ValidityVerdict {
    ValidityVerdict::invalid(Reason::PlateauTwin, twin.clone(), radius, false)
}

/// Links a witness can toggle: members, plus links reachable from the set
/// through at most `radius` added links.
fn move_universe(g: &Graph, base: &LinkSet<'_>, radius: usize) -> Vec<LinkId> {
    let mut seen = vec![false; g.link_count()];
    let mut node_seen = vec![false; g.node_count()];
    let mut out: Vec<LinkId> = base.links().to_vec();
    for &l in &out {
        seen[l] = true;
    }
    let mut frontier: Vec<usize> = base.touched_nodes().to_vec();
    for &v in &frontier {
        node_seen[v] = true;
    }
    for _ in 0..radius {
        let mut next = Vec::new();
        for &v in &frontier {
            for &(u, l) in g.neighbors(v) {
                if !seen[l] {
                    seen[l] = true;
                    out.push(l);
                }
                if !node_seen[u] {
                    node_seen[u] = true;
                    next.push(u);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    out.sort_unstable();
    out
}

/// `Σ_{k=1..radius} C(n, k)`, saturating at `u64::MAX`.
fn ball_size(n: usize, radius: usize) -> u64 {
    let mut total: u64 = 0;
    let mut c: u128 = 1;
    for k in 1..=radius.min(n) {
        c = c * (n - k + 1) as u128 / k as u128;
        if c > u64::MAX as u128 {
            return u64::MAX;
        }
        total = total.saturating_add(c as u64);
    }
    total
}

fn connected_witness(
    g: &Graph,
    set: &LinkSet<'_>,
) -> Result<Option<Community>, ValidityError> {
    let links = set.sorted_links();
    if is_connected_link_set(g, &links).map_err(CostError::from)? {
        Ok(Some(Community::from_links(g, links)?))
    } else {
        Ok(None)
    }
}

/// Enumerates toggle combinations by increasing size and returns the first
/// connected lower set found at the smallest distance.
fn nearest_witness(
    g: &Graph,
    mut set: LinkSet<'_>,
    psi: f64,
    universe: &[LinkId],
    radius: usize,
) -> Result<Option<Community>, ValidityError> {
    fn walk(
        g: &Graph,
        set: &mut LinkSet<'_>,
        psi: f64,
        universe: &[LinkId],
        from: usize,
        left: usize,
    ) -> Result<Option<Community>, ValidityError> {
        for i in from..universe.len() {
            let l = universe[i];
            set.toggle(l);
            let found = if left == 1 {
                match set.psi() {
                    Some(p) if psi_less(p, psi) => connected_witness(g, set)?,
                    _ => None,
                }
            } else {
                walk(g, set, psi, universe, i + 1, left - 1)?
            };
            set.toggle(l);
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }
    for k in 1..=radius.min(universe.len()) {
        if let Some(w) = walk(g, &mut set, psi, universe, 0, k)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Moves {
    Both,
    AddOnly,
    RemoveOnly,
}

#[derive(Clone)]
struct BeamState<'g> {
    set: LinkSet<'g>,
    toggled: Vec<LinkId>,
}

/// Bounded beam excursions from `base`: one mixed beam plus a pure
/// inclusion line and a pure exclusion line. Each link is toggled at most
/// once, so depth equals distance.
fn excursion_witness(
    g: &Graph,
    base: &LinkSet<'_>,
    psi: f64,
    radius: usize,
) -> Result<Option<Community>, ValidityError> {
    for (moves, width) in [
        (Moves::Both, BEAM_WIDTH),
        (Moves::AddOnly, 1),
        (Moves::RemoveOnly, 1),
    ] {
        if let Some(w) = beam(g, base, psi, radius, moves, width)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

fn beam<'g>(
    g: &'g Graph,
    base: &LinkSet<'g>,
    psi: f64,
    radius: usize,
    moves: Moves,
    width: usize,
) -> Result<Option<Community>, ValidityError> {
    let mut states = vec![BeamState {
        set: base.clone(),
        toggled: Vec::new(),
    }];
    let mut stamp = vec![0u32; g.link_count()];
    let mut epoch = 0u32;
    for _ in 1..=radius {
        // (psi, size, state, link)
        let mut options: Vec<(f64, usize, usize, LinkId)> = Vec::new();
        for (si, st) in states.iter().enumerate() {
            epoch += 1;
            for &l in &st.toggled {
                stamp[l] = epoch;
            }
            let mut consider = |l: LinkId, stamp: &mut Vec<u32>| {
                if stamp[l] == epoch {
                    return;
                }
                stamp[l] = epoch;
                if let Some(p) = st.set.psi_after_toggle(l) {
                    let size = if st.set.contains(l) { st.set.len() - 1 } else { st.set.len() + 1 };
                    options.push((p, size, si, l));
                }
            };
            if moves != Moves::AddOnly {
                for &l in st.set.links() {
                    consider(l, &mut stamp);
                }
            }
            if moves != Moves::RemoveOnly {
                for &v in st.set.touched_nodes() {
                    for &(_, l) in g.neighbors(v) {
                        if !st.set.contains(l) {
                            consider(l, &mut stamp);
                        }
                    }
                }
            }
        }
        if options.is_empty() {
            break;
        }
        options.sort_by(|a, b| {
            a.0.total_cmp(&b.0)
                .then(a.1.cmp(&b.1))
                .then(a.2.cmp(&b.2))
                .then(a.3.cmp(&b.3))
        });
        let mut next: Vec<BeamState<'g>> = Vec::with_capacity(width);
        let mut keys: Vec<Vec<LinkId>> = Vec::with_capacity(width);
        for &(p, _, si, l) in &options {
            if next.len() >= width {
                break;
            }
            let mut key = states[si].toggled.clone();
            key.push(l);
            key.sort_unstable();
            if keys.contains(&key) {
                continue;
            }
            let mut st = states[si].clone();
            st.set.toggle(l);
            st.toggled.push(l);
            if psi_less(p, psi) {
                if let Some(w) = connected_witness(g, &st.set)? {
                    return Ok(Some(w));
                }
            }
            keys.push(key);
            next.push(st);
        }
        states = next;
    }
    Ok(None)
}

/// Adapted components of the complement of a mid-size community.
///
/// Requires `m/4 <= |L| <= 3m/4`.
pub fn complement_candidates(
    g: &Graph,
    community: &Community,
    r: f64,
) -> Result<Vec<Community>, ValidityError> {
    let m = g.link_count();
    let (low, high) = (m.div_ceil(4), 3 * m / 4);
    if community.len() < low || community.len() > high {
        return Err(ValidityError::ComplementWindow {
            links: community.len(),
            low,
            high,
        });
    }
    let members = community.links();
    let complement: Vec<LinkId> = (0..m).filter(|l| members.binary_search(l).is_err()).collect();
    if complement.is_empty() {
        return Err(ValidityError::EmptyComplement);
    }
    let budget = SearchBudget::new(r)?;
    let mut out: Vec<Community> = Vec::new();
    for comp in link_components(g, &complement) {
        match link_wise_adapt(g, &comp, SearchDirection::InclusionFirst, budget) {
            Ok(found) => {
                for c in found {
                    if !out.iter().any(|o| o.fingerprint() == c.fingerprint()) {
                        out.push(c);
                    }
                }
            }
            Err(SearchError::Unreachable) => {}
            Err(e) => return Err(e.into()),
        }
    }
    out.sort_by(|a, b| a.rank_cmp(b));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::is_local_minimum;
    use crate::synthetic::{bow_tie, clique_chain, clique_links};

    const R: f64 = 1.0 / 3.0;

    #[test]
    fn bow_tie_triangles_are_valid() {
        let g = bow_tie();
        for links in [vec![0, 1, 2], vec![3, 4, 5]] {
            let c = Community::from_links(&g, links).unwrap();
            let v = check_validity(&g, &c, R, &[]).unwrap();
            assert_eq!(v.status, Status::Valid);
            assert_eq!(v.checked_radius, 1);
            assert!(v.exhaustive);
            let base = c.to_link_set(&g);
            let uni = move_universe(&g, &base, 2);
            assert!(nearest_witness(&g, base, c.psi(), &uni, 2).unwrap().is_none());
        }
    }

    #[test]
    fn lower_superset_is_a_witness() {
        let g = bow_tie();
        let c = Community::from_links(&g, vec![0, 1]).unwrap();
        let v = check_validity(&g, &c, R, &[]).unwrap();
        assert_eq!(v.status, Status::Invalid);
        assert_eq!(v.witness.as_deref(), Some(&[0, 1, 2][..]));
        assert!(v.witness_psi.unwrap() < c.psi());
    }

    #[test]
    fn large_community_is_undecidable() {
        let g = bow_tie();
        let c = Community::from_links(&g, vec![0, 1, 2, 3, 4]).unwrap();
        let v = check_validity(&g, &c, R, &[]).unwrap();
        assert_eq!(v.status, Status::Undecidable);
        assert!(!v.is_valid());
    }

    #[test]
    fn known_lower_community_invalidates() {
        let g = clique_chain(2, 5, 1);
        let a = Community::from_links(&g, clique_links(&g, 0, 5)).unwrap();
        let mut with_one_missing = a.links().to_vec();
        with_one_missing.pop();
        let worse = Community::from_links(&g, with_one_missing).unwrap();
        let v = check_validity(&g, &worse, R, std::slice::from_ref(&a)).unwrap();
        assert_eq!(v.status, Status::Invalid);
        assert!(!v.exhaustive);
    }

    #[test]
    fn beam_and_enumeration_agree_on_small_cases() {
        let g = clique_chain(3, 4, 1);
        let all: Vec<LinkId> = (0..g.link_count()).collect();
        for start in 0..g.link_count() - 3 {
            let links = all[start..start + 4].to_vec();
            let Ok(c) = Community::from_links(&g, links) else { continue };
            let base = c.to_link_set(&g);
            let radius = checked_radius(R, c.len()) + 1;
            let uni = move_universe(&g, &base, radius);
            let exact = nearest_witness(&g, base.clone(), c.psi(), &uni, radius).unwrap();
            let approx = excursion_witness(&g, &base, c.psi(), radius).unwrap();
            if let Some(w) = &approx {
                assert!(exact.is_some());
                assert!(w.psi() < c.psi());
                assert!(c.distance(w) <= radius);
            }
        }
    }

    #[test]
    fn complement_of_bow_tie_triangle() {
        let g = bow_tie();
        let c = Community::from_links(&g, vec![0, 1, 2]).unwrap();
        let out = complement_candidates(&g, &c, R).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].links(), &[3, 4, 5]);
    }

    #[test]
    fn barbell_complement_has_two_parts() {
        // two triangles joined through a middle path node
        let g = Graph::from_pairs(
            7,
            &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 6), (6, 4)],
        )
        .unwrap();
        let c = Community::from_links(&g, vec![3, 4]).unwrap();
        let out = complement_candidates(&g, &c, R).unwrap();
        assert!(out.len() >= 2, "{out:?}");
        for x in &out {
            assert!(is_connected_link_set(&g, x.links()).unwrap());
            assert!(is_local_minimum(&g, x.links()).unwrap());
        }
    }

    #[test]
    fn complement_window_enforced() {
        let g = clique_chain(2, 5, 1);
        let c = Community::from_links(&g, vec![0]).unwrap();
        assert!(matches!(
            complement_candidates(&g, &c, R),
            Err(ValidityError::ComplementWindow { .. })
        ));
    }

    #[test]
    fn plateau_twins_keep_best_ranked() {
        let g = clique_chain(2, 6, 3);
        let mut a = clique_links(&g, 0, 6);
        let bridges: Vec<LinkId> = (30..33).collect();
        a.push(bridges[0]);
        let mut b = clique_links(&g, 0, 6);
        b.push(bridges[1]);
        let a = Community::from_links(&g, a).unwrap();
        let b = Community::from_links(&g, b).unwrap();
        assert!(psi_tied(a.psi(), b.psi()));
        let accepted = vec![a.clone()];
        assert_eq!(plateau_twin(&b, R, &accepted), Some(&a));
        assert_eq!(plateau_twin(&a, R, &accepted), None);
    }

    #[test]
    fn ball_size_counts() {
        assert_eq!(ball_size(5, 2), 5 + 10);
        assert_eq!(ball_size(3, 5), 7);
        assert_eq!(ball_size(100_000, 50), u64::MAX);
    }

    #[test]
    fn verdict_round_trips() {
        let v = ValidityVerdict {
            status: Status::Invalid,
            reason: Reason::LowerWitness,
            witness: Some(vec![1, 2]),
            witness_psi: Some(0.25),
            checked_radius: 3,
            exhaustive: true,
        };
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(serde_json::from_str::<ValidityVerdict>(&s).unwrap(), v);
    }
}
