//! Turning valid communities into a solution: coverage, selection,
//! membership grades, overlap statistics, hierarchy and matching.

use std::collections::HashMap;

use serde::Serialize;

use crate::community::Community;
use crate::cost::shared_links;
use crate::graph::{Graph, NodeId};

/// Default inclusion share for sub/super relations.
pub const INCLUSION_THRESHOLD: f64 = 0.95;
/// Nodes above this grade count as members when comparing node partitions.
pub const CORE_GRADE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoveragePoint {
    pub psi: f64,
    pub fraction: f64,
}

/// Fraction of all links covered by the `k` best ranked communities, for
/// every `k`. Communities rejected by `exclude` are skipped.
pub fn coverage_curve<F>(g: &Graph, communities: &[Community], exclude: F) -> Vec<CoveragePoint>
where
    F: Fn(&Community) -> bool,
{
    let mut ranked: Vec<&Community> = communities.iter().filter(|c| !exclude(c)).collect();
    ranked.sort_by(|a, b| a.rank_cmp(b));
    let m = g.link_count();
    let mut covered = vec![false; m];
    let mut count = 0usize;
    ranked
        .into_iter()
        .map(|c| {
            for &l in c.links() {
                if !covered[l] {
                    covered[l] = true;
                    count += 1;
                }
            }
            CoveragePoint {
                psi: c.psi(),
                fraction: count as f64 / m as f64,
            }
        })
        .collect()
}

/// Covered fraction at the largest Ψ not above `psi`; 0 before the first.
pub fn coverage_at(curve: &[CoveragePoint], psi: f64) -> f64 {
    curve
        .iter()
        .take_while(|p| p.psi <= psi)
        .last()
        .map_or(0.0, |p| p.fraction)
}

/// `(node, k_in / k)` for every node attached to the community, by node id.
pub fn membership_grades(g: &Graph, c: &Community) -> Vec<(NodeId, f64)> {
    let mut internal: HashMap<NodeId, usize> = HashMap::new();
    for &l in c.links() {
        let (a, b) = g.endpoints(l);
        *internal.entry(a).or_insert(0) += 1;
        *internal.entry(b).or_insert(0) += 1;
    }
    let mut out: Vec<(NodeId, f64)> = internal
        .into_iter()
        .map(|(v, k)| (v, k as f64 / g.degree(v) as f64))
        .collect();
    out.sort_by_key(|&(v, _)| v);
    out
}

/// Nodes with grade strictly above [`CORE_GRADE`].
pub fn core_nodes(g: &Graph, c: &Community) -> Vec<NodeId> {
    membership_grades(g, c)
        .into_iter()
        .filter(|&(_, x)| x > CORE_GRADE)
        .map(|(v, _)| v)
        .collect()
}

/// `(|A∩B|/|A|, |A∩B|/|B|)` over link sets.
pub fn relative_inclusion(a: &Community, b: &Community) -> (f64, f64) {
    let shared = shared_links(a.links(), b.links()) as f64;
    let share = |n: usize| if n == 0 { 0.0 } else { shared / n as f64 };
    (share(a.len()), share(b.len()))
}

/// `|A∩B| / sqrt(|A| |B|)` for sorted sets; 0 if either is empty.
pub fn salton_index(a: &[usize], b: &[usize]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    shared_links(a, b) as f64 / ((a.len() as f64) * (b.len() as f64)).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HierarchyEdge {
    pub sub: usize,
    pub sup: usize,
    /// Share of the sub community's links inside the super community.
    pub inclusion: f64,
    /// No chain of other edges leads from `sub` to `sup`.
    pub direct: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelatedPair {
    pub a: usize,
    pub b: usize,
    pub shared: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TripleOverlap {
    pub members: [usize; 3],
    pub shared: usize,
}

/// Sub/super relations plus the remaining overlapping pairs; indices refer
/// to the community slice the hierarchy was built from.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Hierarchy {
    pub edges: Vec<HierarchyEdge>,
    pub related: Vec<RelatedPair>,
    pub triples: Vec<TripleOverlap>,
}

impl Hierarchy {
    pub fn subtopics(&self, i: usize) -> usize {
        self.edges.iter().filter(|e| e.sup == i).count()
    }

    pub fn supertopics(&self, i: usize) -> usize {
        self.edges.iter().filter(|e| e.sub == i).count()
    }

    pub fn others(&self, i: usize) -> usize {
        self.related.iter().filter(|p| p.a == i || p.b == i).count()
    }
}

/// Builds the poly-hierarchy: `sub -> sup` when at least `threshold` of the
/// smaller community's links lie in the larger one. Pairs sharing links
/// without such a relation are listed as related.
pub fn build_hierarchy(communities: &[Community], threshold: f64) -> Hierarchy {
    let n = communities.len();
    let mut index: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, c) in communities.iter().enumerate() {
        for &l in c.links() {
            index.entry(l).or_default().push(i);
        }
    }
    let mut pair_shared: HashMap<(usize, usize), usize> = HashMap::new();
    let mut triple_shared: HashMap<[usize; 3], usize> = HashMap::new();
    for owners in index.values() {
        for (x, &i) in owners.iter().enumerate() {
            for (y, &j) in owners.iter().enumerate().skip(x + 1) {
                *pair_shared.entry((i, j)).or_insert(0) += 1;
                for &k in &owners[y + 1..] {
                    *triple_shared.entry([i, j, k]).or_insert(0) += 1;
                }
            }
        }
    }

    let mut pairs: Vec<((usize, usize), usize)> = pair_shared.into_iter().collect();
    pairs.sort_unstable();
    let mut edges = Vec::new();
    let mut related = Vec::new();
    let mut out_edges: Vec<Vec<usize>> = vec![Vec::new(); n];
    for ((i, j), shared) in pairs {
        let (a, b) = (&communities[i], &communities[j]);
        let (sub, sup) = if a.len() < b.len() {
            (i, j)
        } else if b.len() < a.len() {
            (j, i)
        } else {
            related.push(RelatedPair { a: i, b: j, shared });
            continue;
        };
        let inclusion = shared as f64 / communities[sub].len() as f64;
        if inclusion >= threshold {
            out_edges[sub].push(sup);
            edges.push(HierarchyEdge {
                sub,
                sup,
                inclusion,
                direct: true,
            });
        } else {
            related.push(RelatedPair { a: i, b: j, shared });
        }
    }

    // reachability over chains of two or more edges
    let reach: Vec<Vec<bool>> = (0..n)
        .map(|s| {
            let mut seen = vec![false; n];
            let mut stack = out_edges[s].clone();
            while let Some(v) = stack.pop() {
                if !seen[v] {
                    seen[v] = true;
                    stack.extend(&out_edges[v]);
                }
            }
            seen
        })
        .collect();
    for e in &mut edges {
        e.direct = !out_edges[e.sub]
            .iter()
            .any(|&mid| mid != e.sup && reach[mid][e.sup]);
    }

    let mut triples: Vec<TripleOverlap> = triple_shared
        .into_iter()
        .map(|(members, shared)| TripleOverlap { members, shared })
        .collect();
    triples.sort_by_key(|t| t.members);
    Hierarchy {
        edges,
        related,
        triples,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommunityStats {
    pub links: usize,
    pub psi: f64,
    pub nodes: usize,
    /// Nodes with all their links inside the community.
    pub full_papers: usize,
    pub fraction_sum: f64,
    pub subtopics: usize,
    pub supertopics: usize,
    pub others: usize,
}

impl CommunityStats {
    /// Size measures only; relation counts are filled from a hierarchy.
    pub fn measure(g: &Graph, c: &Community) -> Self {
        let grades = membership_grades(g, c);
        CommunityStats {
            links: c.len(),
            psi: c.psi(),
            nodes: grades.len(),
            full_papers: grades.iter().filter(|&&(_, x)| x >= 1.0).count(),
            fraction_sum: grades.iter().map(|&(_, x)| x).sum(),
            subtopics: 0,
            supertopics: 0,
            others: 0,
        }
    }
}

/// Thresholds for the final community selection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectionCriteria {
    /// Keep communities with Ψ strictly below this.
    pub psi_cutoff: f64,
    pub min_fraction_sum: f64,
    /// Keep communities with at most this share of all links.
    pub exclude_larger_than: f64,
    pub inclusion_threshold: f64,
}

impl Default for SelectionCriteria {
    fn default() -> Self {
        SelectionCriteria {
            psi_cutoff: f64::INFINITY,
            min_fraction_sum: 20.0,
            exclude_larger_than: 0.5,
            inclusion_threshold: INCLUSION_THRESHOLD,
        }
    }
}

/// Selected communities with their statistics, memberships and hierarchy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Solution {
    pub communities: Vec<Community>,
    pub stats: Vec<CommunityStats>,
    pub coverage: Vec<CoveragePoint>,
    pub memberships: Vec<Vec<(NodeId, f64)>>,
    pub hierarchy: Hierarchy,
}

/// Applies `criteria` to valid communities and assembles the solution.
///
/// The coverage curve is computed over all given communities except those
/// above the size limit.
pub fn select_final(g: &Graph, valid: &[Community], criteria: &SelectionCriteria) -> Solution {
    let m = g.link_count() as f64;
    let too_large = |c: &Community| c.len() as f64 > criteria.exclude_larger_than * m;
    let coverage = coverage_curve(g, valid, too_large);
    let mut chosen: Vec<(Community, CommunityStats)> = valid
        .iter()
        .filter(|c| c.psi() < criteria.psi_cutoff && !too_large(c))
        .map(|c| (c.clone(), CommunityStats::measure(g, c)))
        .filter(|(_, s)| s.fraction_sum >= criteria.min_fraction_sum)
        .collect();
    chosen.sort_by(|a, b| a.0.rank_cmp(&b.0));
    if chosen.is_empty() {
        log::warn!("no community passes the selection criteria");
    }
    let (communities, mut stats): (Vec<Community>, Vec<CommunityStats>) = chosen.into_iter().unzip();
    let hierarchy = build_hierarchy(&communities, criteria.inclusion_threshold);
    for (i, s) in stats.iter_mut().enumerate() {
        s.subtopics = hierarchy.subtopics(i);
        s.supertopics = hierarchy.supertopics(i);
        s.others = hierarchy.others(i);
    }
    let memberships = communities.iter().map(|c| membership_grades(g, c)).collect();
    Solution {
        communities,
        stats,
        coverage,
        memberships,
        hierarchy,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchRow {
    pub left: usize,
    /// Best partner on the right, `None` if nothing overlaps.
    pub right: Option<usize>,
    pub salton: f64,
    /// `|A∩B| / |A|`.
    pub left_overlap: f64,
    /// `|A∩B| / |B|`.
    pub right_overlap: f64,
}

/// Best Salton partner in `right` for every set in `left`. Sets must be
/// sorted; ties go to the lower right index.
pub fn match_solutions(left: &[Vec<usize>], right: &[Vec<usize>]) -> Vec<MatchRow> {
    left.iter()
        .enumerate()
        .map(|(i, a)| {
            let mut best: Option<(usize, f64)> = None;
            for (j, b) in right.iter().enumerate() {
                let s = salton_index(a, b);
                if s > 0.0 && best.is_none_or(|(_, bs)| s > bs) {
                    best = Some((j, s));
                }
            }
            match best {
                Some((j, s)) => {
                    let shared = shared_links(a, &right[j]) as f64;
                    MatchRow {
                        left: i,
                        right: Some(j),
                        salton: s,
                        left_overlap: shared / a.len() as f64,
                        right_overlap: shared / right[j].len() as f64,
                    }
                }
                None => MatchRow {
                    left: i,
                    right: None,
                    salton: 0.0,
                    left_overlap: 0.0,
                    right_overlap: 0.0,
                },
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::{bow_tie, clique_chain, clique_links};

    fn tri(g: &Graph, links: Vec<usize>) -> Community {
        Community::from_links(g, links).unwrap()
    }

    #[test]
    fn coverage_of_disjoint_sets() {
        let g = clique_chain(2, 4, 0);
        assert_eq!(g.link_count(), 12);
        let a = tri(&g, vec![0, 1, 3]);
        let b = tri(&g, vec![6, 7, 9]);
        let curve = coverage_curve(&g, &[a, b], |_| false);
        assert_eq!(curve.iter().map(|p| p.fraction).collect::<Vec<_>>(), vec![0.25, 0.5]);
    }

    #[test]
    fn coverage_of_nested_sets_is_union() {
        let g = bow_tie();
        let a = tri(&g, vec![0, 1, 2]);
        let b = tri(&g, vec![0, 1, 2, 3]);
        let curve = coverage_curve(&g, &[b, a], |_| false);
        assert_eq!(curve[0].fraction, 0.5);
        assert!((curve[1].fraction - 4.0 / 6.0).abs() < 1e-15);
        assert_eq!(coverage_at(&curve, 0.0), 0.0);
        assert_eq!(coverage_at(&curve, 10.0), curve[1].fraction);
    }

    #[test]
    fn bow_tie_grades() {
        let g = bow_tie();
        let grades = membership_grades(&g, &tri(&g, vec![0, 1, 2]));
        assert_eq!(grades, vec![(0, 1.0), (1, 1.0), (2, 0.5)]);
        assert_eq!(core_nodes(&g, &tri(&g, vec![0, 1, 2])), vec![0, 1]);
        let g4 = Graph::from_pairs(5, &[(0, 1), (0, 2), (0, 3), (0, 4), (1, 2)]).unwrap();
        let grades = membership_grades(&g4, &tri(&g4, vec![0]));
        assert_eq!(grades[0], (0, 0.25));
    }

    #[test]
    fn inclusion_and_salton_arithmetic() {
        assert_eq!(salton_index(&[1, 2, 3, 4], &[3, 4, 5, 6]), 0.5);
        assert_eq!(salton_index(&[1, 2], &[1, 2]), 1.0);
        assert_eq!(salton_index(&[1], &[2]), 0.0);
        assert_eq!(salton_index(&[], &[2]), 0.0);
        let g = clique_chain(2, 5, 0);
        let a = tri(&g, vec![0, 1, 2, 3]);
        let b = tri(&g, vec![2, 3, 4, 5, 6, 7, 8, 9]);
        assert_eq!(relative_inclusion(&a, &b), (0.5, 0.25));
        assert_eq!(relative_inclusion(&a, &a), (1.0, 1.0));
    }

    #[test]
    fn nested_chain_directness() {
        let g = clique_chain(1, 7, 0);
        let a = tri(&g, (0..3).collect());
        let b = tri(&g, (0..6).collect());
        let c = tri(&g, (0..12).collect());
        let h = build_hierarchy(&[a, b, c], 1.0);
        let edges: Vec<(usize, usize, bool)> = h.edges.iter().map(|e| (e.sub, e.sup, e.direct)).collect();
        assert_eq!(edges, vec![(0, 1, true), (0, 2, false), (1, 2, true)]);
        assert!(h.related.is_empty());
        assert_eq!(h.triples.len(), 1);
        assert_eq!(h.triples[0].shared, 3);
    }

    #[test]
    fn poly_hierarchy_two_supertopics() {
        let g = clique_chain(1, 12, 0);
        // A: 50 links; B and C each hold 48 of them plus disjoint extras
        let a: Vec<usize> = (0..50).collect();
        let mut b: Vec<usize> = (0..48).collect();
        b.extend(50..58);
        let mut c: Vec<usize> = (2..50).collect();
        c.extend(58..66);
        let h = build_hierarchy(&[tri(&g, a), tri(&g, b), tri(&g, c)], 0.95);
        assert_eq!(h.supertopics(0), 2);
        assert_eq!(h.subtopics(1), 1);
        assert_eq!(h.subtopics(2), 1);
    }

    #[test]
    fn bow_tie_selection() {
        let g = bow_tie();
        let valid = vec![tri(&g, vec![3, 4, 5]), tri(&g, vec![0, 1, 2])];
        let criteria = SelectionCriteria {
            min_fraction_sum: 0.0,
            ..SelectionCriteria::default()
        };
        let s = select_final(&g, &valid, &criteria);
        assert_eq!(s.communities.len(), 2);
        assert_eq!(s.communities[0].links(), &[0, 1, 2]);
        assert_eq!(s.stats[0].full_papers, 2);
        assert_eq!(s.stats[0].fraction_sum, 2.5);
        assert_eq!(s.stats[0].others, 0);
        let none = select_final(&g, &valid, &SelectionCriteria { psi_cutoff: 0.1, ..criteria });
        assert!(none.communities.is_empty());
        let strict = select_final(&g, &valid, &SelectionCriteria::default());
        assert!(strict.communities.is_empty());
    }

    #[test]
    fn matching_rows() {
        let left = vec![vec![1, 2, 3, 4], vec![9]];
        let right = vec![vec![3, 4, 5, 6], vec![1, 2, 3, 4]];
        let rows = match_solutions(&left, &right);
        assert_eq!(rows[0].right, Some(1));
        assert_eq!(rows[0].salton, 1.0);
        assert_eq!(rows[1].right, None);
        let rows = match_solutions(&left[..1], &right[..1]);
        let r = &rows[0];
        assert!((r.salton - (r.left_overlap * r.right_overlap).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn grades_over_a_partition_sum_to_one() {
        let g = clique_chain(2, 4, 1);
        let parts = [clique_links(&g, 0, 4), clique_links(&g, 1, 4), vec![12]];
        let mut total = vec![0.0; g.node_count()];
        for p in parts {
            for (v, x) in membership_grades(&g, &tri(&g, p)) {
                total[v] += x;
            }
        }
        assert!(total.iter().all(|&t| (t - 1.0).abs() < 1e-12));
    }
}
