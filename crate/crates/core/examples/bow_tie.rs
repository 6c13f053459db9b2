//! Two triangles sharing a node: each triangle is a valid community of its
//! own, and the cost of a link set matches its complement.

use linkcomm::community::Community;
use linkcomm::cost;
use linkcomm::synthetic::bow_tie;
use linkcomm::validity::check_validity;

fn main() {
    let g = bow_tie();
    println!("{} nodes, {} links", g.node_count(), g.link_count());

    let left = Community::from_links(&g, vec![0, 1, 2]).unwrap();
    let right = Community::from_links(&g, vec![3, 4, 5]).unwrap();
    for (name, c) in [("left", &left), ("right", &right)] {
        let sigma = cost::sigma(&g, c.links()).unwrap();
        let verdict = check_validity(&g, c, 1.0 / 3.0, &[]).unwrap();
        println!(
            "{name}: links {:?} sigma {sigma:.3} psi {:.4} -> {:?} ({:?})",
            c.links(),
            c.psi(),
            verdict.status,
            verdict.reason
        );
    }

    // the two halves are each other's complement
    assert!(cost::psi_tied(left.psi(), right.psi()));

    let shared_corner = Community::from_links(&g, vec![1, 2, 3]).unwrap();
    let verdict = check_validity(&g, &shared_corner, 1.0 / 3.0, &[]).unwrap();
    println!(
        "links {:?}: psi {:.4} -> {:?}, witness {:?}",
        shared_corner.links(),
        shared_corner.psi(),
        verdict.status,
        verdict.witness
    );
}
