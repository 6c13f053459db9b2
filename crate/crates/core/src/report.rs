//! Tab-separated solution files, the hierarchy in DOT and the run trace.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::analysis::{match_solutions, select_final, MatchRow, SelectionCriteria, Solution};
use crate::graph::Graph;
use crate::pipeline::{Registry, TraceRecord};

fn create(dir: &Path, name: &str) -> std::io::Result<(PathBuf, BufWriter<File>)> {
    let path = dir.join(name);
    let file = File::create(&path)?;
    Ok((path, BufWriter::new(file)))
}

/// Community ids in reports are 1-based positions in the solution ranking.
pub fn community_id(i: usize) -> String {
    format!("c{}", i + 1)
}

/// Writes coverage, community, membership, link, hierarchy and overlap
/// tables for `solution`. Returns the paths written.
pub fn write_solution(dir: &Path, g: &Graph, solution: &Solution) -> std::io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();

    let (p, mut w) = create(dir, "coverage.tsv")?;
    writeln!(w, "rank\tpsi\tcoverage")?;
    for (i, pt) in solution.coverage.iter().enumerate() {
        writeln!(w, "{}\t{:.6}\t{:.6}", i + 1, pt.psi, pt.fraction)?;
    }
    w.flush()?;
    written.push(p);

    let (p, mut w) = create(dir, "communities.tsv")?;
    writeln!(
        w,
        "id\tlinks\tpsi\tfull_papers\tfraction_sum\tsubtopics\tsupertopics\tothers\tfingerprint"
    )?;
    for (i, (c, s)) in solution.communities.iter().zip(&solution.stats).enumerate() {
        writeln!(
            w,
            "{}\t{}\t{:.4}\t{}\t{:.2}\t{}\t{}\t{}\t{}",
            community_id(i),
            s.links,
            s.psi,
            s.full_papers,
            s.fraction_sum,
            s.subtopics,
            s.supertopics,
            s.others,
            c.fingerprint()
        )?;
    }
    w.flush()?;
    written.push(p);

    let (p, mut w) = create(dir, "memberships.tsv")?;
    writeln!(w, "node\tcommunity\tgrade")?;
    for (i, grades) in solution.memberships.iter().enumerate() {
        for &(v, x) in grades {
            writeln!(w, "{}\t{}\t{:.6}", g.label(v), community_id(i), x)?;
        }
    }
    w.flush()?;
    written.push(p);

    let (p, mut w) = create(dir, "community_links.tsv")?;
    writeln!(w, "community\tsource\ttarget")?;
    for (i, c) in solution.communities.iter().enumerate() {
        for &l in c.links() {
            let (a, b) = g.endpoints(l);
            writeln!(w, "{}\t{}\t{}", community_id(i), g.label(a), g.label(b))?;
        }
    }
    w.flush()?;
    written.push(p);

    let h = &solution.hierarchy;
    let (p, mut w) = create(dir, "hierarchy.tsv")?;
    writeln!(w, "sub\tsuper\tinclusion\tdirect")?;
    for e in &h.edges {
        writeln!(
            w,
            "{}\t{}\t{:.4}\t{}",
            community_id(e.sub),
            community_id(e.sup),
            e.inclusion,
            e.direct
        )?;
    }
    w.flush()?;
    written.push(p);

    let (p, mut w) = create(dir, "hierarchy.dot")?;
    writeln!(w, "digraph hierarchy {{")?;
    writeln!(w, "  rankdir=BT;")?;
    for (i, s) in solution.stats.iter().enumerate() {
        writeln!(
            w,
            "  \"{id}\" [label=\"{id}\\n{} links\\npsi {:.4}\"];",
            s.links,
            s.psi,
            id = community_id(i)
        )?;
    }
    for e in &h.edges {
        let style = if e.direct { "solid" } else { "dashed" };
        writeln!(
            w,
            "  \"{}\" -> \"{}\" [style={style}];",
            community_id(e.sub),
            community_id(e.sup)
        )?;
    }
    writeln!(w, "}}")?;
    w.flush()?;
    written.push(p);

    let (p, mut w) = create(dir, "overlaps.tsv")?;
    writeln!(w, "a\tb\tc\tshared")?;
    for r in &h.related {
        writeln!(w, "{}\t{}\t-\t{}", community_id(r.a), community_id(r.b), r.shared)?;
    }
    for t in &h.triples {
        let [a, b, c] = t.members;
        writeln!(
            w,
            "{}\t{}\t{}\t{}",
            community_id(a),
            community_id(b),
            community_id(c),
            t.shared
        )?;
    }
    w.flush()?;
    written.push(p);
    Ok(written)
}

/// Selects the final solution from the registry's valid communities and
/// writes it together with the registry itself.
pub fn write_report(
    dir: &Path,
    g: &Graph,
    registry: &Registry,
    criteria: &SelectionCriteria,
) -> std::io::Result<(Solution, Vec<PathBuf>)> {
    fs::create_dir_all(dir)?;
    let solution = select_final(g, &registry.valid(), criteria);
    let mut written = write_solution(dir, g, &solution)?;
    let (p, w) = create(dir, "registry.ndjson")?;
    registry.write_ndjson(w)?;
    written.push(p);
    Ok((solution, written))
}

pub fn write_trace(dir: &Path, trace: &[TraceRecord]) -> std::io::Result<PathBuf> {
    let (p, mut w) = create(dir, "trace.tsv")?;
    writeln!(w, "batch\tseed\tround\trun\tgeneration\tbest_psi\tbest_links\tentropy\tvariance")?;
    for t in trace {
        let r = &t.row.row;
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}\t{:.6}\t{}\t{:.6}\t{:.6}",
            t.batch, t.seed, t.row.round, t.row.run, r.generation, r.best_psi, r.best_links, r.entropy, r.variance
        )?;
    }
    w.flush()?;
    Ok(p)
}

/// Matches two labelled group collections and writes one row per left group.
pub fn write_matches<W: Write>(
    mut w: W,
    left: &[(String, Vec<String>)],
    right: &[(String, Vec<String>)],
) -> std::io::Result<Vec<MatchRow>> {
    let mut universe: Vec<&String> = left
        .iter()
        .chain(right)
        .flat_map(|(_, members)| members)
        .collect();
    universe.sort();
    universe.dedup();
    let ids = |members: &[String]| -> Vec<usize> {
        let mut v: Vec<usize> = members
            .iter()
            .map(|m| universe.binary_search(&m).expect("member is in universe"))
            .collect();
        v.sort_unstable();
        v
    };
    let l: Vec<Vec<usize>> = left.iter().map(|(_, m)| ids(m)).collect();
    let r: Vec<Vec<usize>> = right.iter().map(|(_, m)| ids(m)).collect();
    let rows = match_solutions(&l, &r);
    writeln!(w, "left\tright\tsalton\tleft_overlap\tright_overlap")?;
    for row in &rows {
        let partner = row.right.map_or("-", |j| right[j].0.as_str());
        writeln!(
            w,
            "{}\t{}\t{:.4}\t{:.4}\t{:.4}",
            left[row.left].0, partner, row.salton, row.left_overlap, row.right_overlap
        )?;
    }
    w.flush()?;
    Ok(rows)
}
