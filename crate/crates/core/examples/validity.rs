//! Validity on two cliques joined by three bridges. The bare clique loses to
//! the clique with one bridge; the three clique-plus-bridge sets tie, and all
//! but the best ranked one are suppressed as plateau twins.

use linkcomm::community::Community;
use linkcomm::validity::{check_validity, checked_radius, plateau_twin, twin_verdict};
use linkcomm::synthetic::{clique_chain, clique_links};

fn main() {
    let r = 1.0 / 3.0;
    let g = clique_chain(2, 6, 3);
    let clique = clique_links(&g, 0, 6);
    let bridges = [30, 31, 32];

    let bare = Community::from_links(&g, clique.clone()).unwrap();
    let v = check_validity(&g, &bare, r, &[]).unwrap();
    println!(
        "bare clique: {} links, psi {:.4}, radius {} -> {:?} ({:?}), witness psi {:?}",
        bare.len(),
        bare.psi(),
        v.checked_radius,
        v.status,
        v.reason,
        v.witness_psi
    );

    let mut accepted: Vec<Community> = Vec::new();
    let mut candidates: Vec<Community> = bridges
        .iter()
        .map(|&b| {
            let mut links = clique.clone();
            links.push(b);
            Community::from_links(&g, links).unwrap()
        })
        .collect();
    candidates.sort_by(|a, b| a.rank_cmp(b));
    for c in candidates {
        let v = check_validity(&g, &c, r, &[]).unwrap();
        let v = match plateau_twin(&c, r, &accepted) {
            Some(twin) => twin_verdict(twin, checked_radius(r, c.len())),
            None => v,
        };
        println!(
            "clique + bridge {}: psi {:.4} -> {:?} ({:?})",
            c.links().last().unwrap(),
            c.psi(),
            v.status,
            v.reason
        );
        if v.is_valid() {
            accepted.push(c);
        }
    }
}
