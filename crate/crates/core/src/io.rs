//! File formats: binary graph cache, seed and community files, membership
//! and partition tables.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::graph::{load_edge_list, Graph, GraphError, NodeId, NodeSet};

const CACHE_MAGIC: &[u8; 4] = b"LCG1";

/// Writes a graph as `LCG1`, node and link counts (u32 LE), endpoint pairs
/// (u32 LE) and length-prefixed UTF-8 labels.
pub fn write_cache<W: Write>(g: &Graph, mut w: W) -> std::io::Result<()> {
    let u32_of = |x: usize| -> std::io::Result<[u8; 4]> {
        u32::try_from(x)
            .map(u32::to_le_bytes)
            .map_err(|_| std::io::Error::other("graph too large for cache"))
    };
    w.write_all(CACHE_MAGIC)?;
    w.write_all(&u32_of(g.node_count())?)?;
    w.write_all(&u32_of(g.link_count())?)?;
    for &(a, b) in g.links() {
        w.write_all(&u32_of(a)?)?;
        w.write_all(&u32_of(b)?)?;
    }
    for label in g.labels() {
        w.write_all(&u32_of(label.len())?)?;
        w.write_all(label.as_bytes())?;
    }
    w.flush()
}

pub fn read_cache<R: Read>(mut r: R) -> Result<Graph, GraphError> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != CACHE_MAGIC {
        return Err(GraphError::Cache("bad magic".into()));
    }
    fn word<R: Read>(r: &mut R) -> Result<usize, GraphError> {
        let mut b = [0u8; 4];
        r.read_exact(&mut b)
            .map_err(|e| GraphError::Cache(format!("truncated: {e}")))?;
        Ok(u32::from_le_bytes(b) as usize)
    }
    let n = word(&mut r)?;
    let m = word(&mut r)?;
    let mut pairs = Vec::with_capacity(m);
    for _ in 0..m {
        let a = word(&mut r)?;
        let b = word(&mut r)?;
        if a >= n || b >= n {
            return Err(GraphError::Cache(format!("link ({a}, {b}) outside {n} nodes")));
        }
        pairs.push((a, b));
    }
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let len = word(&mut r)?;
        let mut buf = vec![0u8; len];
        r.read_exact(&mut buf)
            .map_err(|e| GraphError::Cache(format!("truncated label: {e}")))?;
        labels.push(String::from_utf8(buf).map_err(|e| GraphError::Cache(e.to_string()))?);
    }
    let g = Graph::from_links(labels, pairs)?;
    if g.link_count() != m {
        return Err(GraphError::Cache("duplicate links in cache".into()));
    }
    Ok(g)
}

/// Loads a binary cache or, failing the magic check, a text edge list.
pub fn load_graph(path: &Path) -> Result<Graph, GraphError> {
    let mut f = BufReader::new(File::open(path)?);
    let head = f.fill_buf()?;
    if head.starts_with(CACHE_MAGIC) {
        read_cache(f)
    } else {
        load_edge_list(f)
    }
}

pub fn save_cache(g: &Graph, path: &Path) -> std::io::Result<()> {
    write_cache(g, BufWriter::new(File::create(path)?))
}

/// Reads one node set per line of whitespace-separated labels. Blank and
/// `#` lines are skipped.
pub fn read_node_sets<R: BufRead>(g: &Graph, reader: R) -> Result<Vec<NodeSet>, GraphError> {
    let index = g.label_index();
    let mut out = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let nodes = trimmed
            .split_whitespace()
            .map(|label| {
                index.get(label).copied().ok_or_else(|| GraphError::UnknownLabel {
                    line: lineno + 1,
                    label: label.to_owned(),
                })
            })
            .collect::<Result<Vec<NodeId>, _>>()?;
        out.push(NodeSet::new(nodes));
    }
    Ok(out)
}

/// Reads a membership table (`node<TAB>group<TAB>grade`, kept when grade
/// exceeds `min_grade`) or a partition table (`node<TAB>group`). A first
/// line starting with `node` is a header. Returns sorted node
/// label sets keyed by group name.
pub fn read_groups<R: BufRead>(
    reader: R,
    min_grade: f64,
) -> Result<BTreeMap<String, Vec<String>>, GraphError> {
    let mut groups: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim_end_matches('\r');
        if trimmed.trim().is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split('\t').collect();
        let bad = |message: String| GraphError::Attribute {
            line: lineno + 1,
            message,
        };
        match fields.as_slice() {
            ["node", _] | ["node", _, _] if lineno == 0 => {}
            [node, group] => {
                groups.entry((*group).to_owned()).or_default().push((*node).to_owned());
            }
            [node, group, grade] => match grade.trim().parse::<f64>() {
                Ok(x) if x > min_grade => {
                    groups.entry((*group).to_owned()).or_default().push((*node).to_owned());
                }
                Ok(_) => {}
                Err(_) => return Err(bad(format!("bad grade {grade:?}"))),
            },
            other => return Err(bad(format!("expected 2 or 3 tab-separated fields, found {}", other.len()))),
        }
    }
    for members in groups.values_mut() {
        members.sort();
        members.dedup();
    }
    Ok(groups)
}
