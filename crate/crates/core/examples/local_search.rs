//! Greedy adaptation on a chain of cliques: node-wise from a few nodes and
//! link-wise from two far apart cliques, which splits into one community
//! per clique.

use linkcomm::graph::NodeSet;
use linkcomm::search::{is_local_minimum, link_wise_adapt, node_wise_adapt, SearchBudget, SearchDirection};
use linkcomm::synthetic::{clique_chain, clique_links};

fn main() {
    let g = clique_chain(4, 6, 1);
    let budget = SearchBudget::new(1.0 / 3.0).unwrap();

    let start = NodeSet::new([0, 1, 2]);
    for dir in [SearchDirection::InclusionFirst, SearchDirection::ExclusionFirst] {
        let nodes = node_wise_adapt(&g, &start, dir, budget).unwrap();
        println!("node-wise {dir:?}: {:?}", nodes.as_slice());
    }

    let mut start = clique_links(&g, 0, 6);
    start.extend(clique_links(&g, 3, 6));
    let found = link_wise_adapt(&g, &start, SearchDirection::ExclusionFirst, budget).unwrap();
    for c in &found {
        println!(
            "link-wise: {} links on nodes {:?}, psi {:.4}, local minimum {}",
            c.len(),
            c.nodes().as_slice(),
            c.psi(),
            is_local_minimum(&g, c.links()).unwrap()
        );
    }
}
