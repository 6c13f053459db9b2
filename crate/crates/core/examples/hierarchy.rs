//! Nested and overlapping communities on a chain of cliques, turned into a
//! hierarchy and written out as report tables.

use linkcomm::analysis::{build_hierarchy, membership_grades, select_final, SelectionCriteria, INCLUSION_THRESHOLD};
use linkcomm::community::Community;
use linkcomm::graph::NodeSet;
use linkcomm::report::{community_id, write_solution};
use linkcomm::synthetic::clique_chain;

fn main() {
    let g = clique_chain(5, 5, 2);
    let span = |lo: usize, hi: usize| Community::induced(&g, &NodeSet::new(lo..hi)).unwrap();
    let communities = vec![span(0, 5), span(5, 10), span(0, 10), span(10, 15), span(5, 15), span(0, 20)];

    let h = build_hierarchy(&communities, INCLUSION_THRESHOLD);
    for e in &h.edges {
        println!(
            "{} -> {} inclusion {:.2}{}",
            community_id(e.sub),
            community_id(e.sup),
            e.inclusion,
            if e.direct { "" } else { " (indirect)" }
        );
    }
    for p in &h.related {
        println!("{} ~ {} share {} links", community_id(p.a), community_id(p.b), p.shared);
    }

    let grades = membership_grades(&g, &communities[2]);
    println!("grades in {}: {:?}", community_id(2), &grades[..4]);

    let criteria = SelectionCriteria {
        min_fraction_sum: 0.0,
        exclude_larger_than: 1.0,
        ..SelectionCriteria::default()
    };
    let solution = select_final(&g, &communities, &criteria);
    let dir = std::env::temp_dir().join("linkcomm-hierarchy-example");
    for path in write_solution(&dir, &g, &solution).unwrap() {
        println!("wrote {}", path.display());
    }
}
