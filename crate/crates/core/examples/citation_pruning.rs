//! Citation network ingestion: papers are protected, cited-only references
//! of degree one are pruned, then the giant component is kept and cached.

use std::io::Cursor;

use linkcomm::graph::{giant_component, load_edge_list, load_protected, prune_degree_one};
use linkcomm::io::{read_cache, write_cache};

const CITATIONS: &str = "\
# citing\tcited
p1\tp2
p1\tp3
p2\tp3
p3\tp4
p4\tp1
p1\tr1
p2\tr2
p2\tr3
p3\tr3
p5\tr4
p6\tr4
";

const PAPERS: &str = "p1\t1\np2\t1\np3\t1\np4\t1\np5\t1\np6\t1\n";

fn main() {
    let g = load_edge_list(Cursor::new(CITATIONS)).unwrap();
    let protected = load_protected(&g, Cursor::new(PAPERS)).unwrap();
    println!("loaded {} nodes, {} links", g.node_count(), g.link_count());

    let pruned = prune_degree_one(&g, |v| protected[v]);
    println!("pruned {:?}", pruned.removed);

    let (giant, dropped) = giant_component(&pruned.graph).unwrap();
    println!(
        "giant component: {} nodes, {} links ({dropped} nodes dropped)",
        giant.node_count(),
        giant.link_count()
    );

    let mut cache = Vec::new();
    write_cache(&giant, &mut cache).unwrap();
    let back = read_cache(cache.as_slice()).unwrap();
    assert_eq!(back, giant);
    println!("cache: {} bytes, labels {:?}", cache.len(), back.labels());
}
