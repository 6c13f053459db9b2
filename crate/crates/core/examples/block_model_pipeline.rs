//! Batch pipeline on a small hierarchical block model: parallel protocol
//! runs, registry validation, and the final report.

use std::collections::BTreeSet;
use std::time::Instant;

use linkcomm::analysis::core_nodes;
use linkcomm::pipeline::{run_batches, RunConfig, SeedSource, StopRule};
use linkcomm::report::{write_report, write_trace};
use linkcomm::synthetic::HierarchicalSbm;

fn main() {
    let model = HierarchicalSbm {
        groups: 2,
        blocks_per_group: 2,
        block_size: 20,
        p_block: 0.6,
        p_group: 0.03,
        p_background: 0.005,
    };
    let g = model.generate(5);
    println!("graph: {} nodes, {} links", g.node_count(), g.link_count());

    let cfg = RunConfig {
        master_seed: 42,
        stop: StopRule {
            max_batches: 4,
            ..StopRule::default()
        },
        ..RunConfig::default()
    };
    let t = Instant::now();
    let out = run_batches(&g, &cfg, &SeedSource::Random { count: 6 }).unwrap();
    for b in &out.batches {
        println!(
            "batch {}: {} seeds, {} new, {} valid, coverage {:.3}",
            b.batch, b.seeds, b.new_communities, b.valid, b.coverage
        );
    }
    println!("stopped: {:?} after {:.1?}", out.stop, t.elapsed());

    let dir = std::env::temp_dir().join("linkcomm-pipeline-example");
    let (solution, files) = write_report(&dir, &g, &out.registry, &cfg.selection).unwrap();
    write_trace(&dir, &out.trace).unwrap();
    println!("{} communities selected, {} files in {}", solution.communities.len(), files.len() + 1, dir.display());
    for (c, s) in solution.communities.iter().zip(&solution.stats) {
        let blocks: BTreeSet<usize> = core_nodes(&g, c)
            .into_iter()
            .map(|v| model.block_of(g.label(v).parse().unwrap()))
            .collect();
        println!("  {} links psi {:.4} core blocks {:?}", s.links, s.psi, blocks);
    }
}
