//! Walks a random link set around a block model graph, keeping Ψ up to date
//! incrementally and comparing against a full recomputation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use linkcomm::cost::{self, LinkSet};
use linkcomm::synthetic::HierarchicalSbm;

fn main() {
    let g = HierarchicalSbm {
        groups: 2,
        blocks_per_group: 3,
        block_size: 20,
        ..HierarchicalSbm::default()
    }
    .generate(3);
    let m = g.link_count();
    println!("graph: {} nodes, {} links", g.node_count(), m);

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut set = LinkSet::new(&g);
    let mut worst_gap = 0.0f64;
    for step in 0..5000 {
        let l = rng.random_range(0..m);
        let predicted = set.psi_after_toggle(l);
        set.toggle(l);
        if let (Some(p), Some(now)) = (predicted, set.psi()) {
            let exact = cost::psi(&g, &set.sorted_links()).unwrap();
            worst_gap = worst_gap.max((p - exact).abs()).max((now - exact).abs());
        }
        if step % 1000 == 0 {
            println!("step {step:>4}: {} links, psi {:?}", set.len(), set.psi());
        }
    }
    println!("largest incremental error: {worst_gap:.2e}");

    // a block against the rest of the graph
    let block: Vec<usize> = (0..m)
        .filter(|&l| {
            let (a, b) = g.endpoints(l);
            g.label(a).parse::<usize>().unwrap() < 20 && g.label(b).parse::<usize>().unwrap() < 20
        })
        .collect();
    let rest: Vec<usize> = (0..m).filter(|l| !block.contains(l)).collect();
    println!(
        "first block: psi {:.4}, complement psi {:.4}",
        cost::psi(&g, &block).unwrap(),
        cost::psi(&g, &rest).unwrap()
    );
}
