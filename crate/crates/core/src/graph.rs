//! Immutable undirected graph plus edge-list ingestion and preprocessing.
//!
//! Nodes and links get dense integer ids. Link ids follow input order after
//! duplicate removal, so every downstream link set is a set of stable ids.

use std::collections::{HashMap, VecDeque};
use std::io::BufRead;

use thiserror::Error;

pub type NodeId = usize;
pub type LinkId = usize;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: expected two node labels, found {found} field(s)")]
    Parse { line: usize, found: usize },
    #[error("edge list contains no links")]
    EmptyInput,
    #[error("graph has no nodes")]
    NoNodes,
    #[error("link id {0} out of range")]
    LinkOutOfRange(LinkId),
    #[error("node id {0} out of range")]
    NodeOutOfRange(NodeId),
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("line {line}: unknown node label {label:?}")]
    UnknownLabel { line: usize, label: String },
    #[error("line {line}: {message}")]
    Attribute { line: usize, message: String },
    #[error("invalid graph cache: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = GraphError> = std::result::Result<T, E>;

/// Undirected, unweighted simple graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    links: Vec<(NodeId, NodeId)>,
    adjacency: Vec<Vec<(NodeId, LinkId)>>,
    labels: Vec<String>,
}

impl Graph {
    /// Builds a graph from labelled nodes and link endpoint pairs.
    ///
    /// Pair orientation is discarded and repeated pairs collapse onto the id
    /// of their first occurrence. Self-loops are rejected.
    pub fn from_links<I>(labels: Vec<String>, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let n = labels.len();
        let mut seen = HashMap::new();
        let mut links = Vec::new();
        let mut adjacency = vec![Vec::new(); n];
        for (a, b) in pairs {
            if a >= n {
                return Err(GraphError::NodeOutOfRange(a));
            }
            if b >= n {
                return Err(GraphError::NodeOutOfRange(b));
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            let key = (a.min(b), a.max(b));
            if seen.contains_key(&key) {
                continue;
            }
            let id = links.len();
            seen.insert(key, id);
            links.push(key);
            adjacency[key.0].push((key.1, id));
            adjacency[key.1].push((key.0, id));
        }
        let g = Graph {
            links,
            adjacency,
            labels,
        };
        debug_assert_eq!(
            g.adjacency.iter().map(Vec::len).sum::<usize>(),
            2 * g.links.len()
        );
        Ok(g)
    }

    /// Unlabelled convenience constructor; node `i` is labelled `i`.
    pub fn from_pairs(node_count: usize, pairs: &[(NodeId, NodeId)]) -> Result<Self> {
        let labels = (0..node_count).map(|i| i.to_string()).collect();
        Self::from_links(labels, pairs.iter().copied())
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.adjacency[node].len()
    }

    /// `(neighbor, link)` pairs of `node`.
    pub fn neighbors(&self, node: NodeId) -> &[(NodeId, LinkId)] {
        &self.adjacency[node]
    }

    pub fn endpoints(&self, link: LinkId) -> (NodeId, NodeId) {
        self.links[link]
    }

    pub fn links(&self) -> &[(NodeId, NodeId)] {
        &self.links
    }

    pub fn label(&self, node: NodeId) -> &str {
        &self.labels[node]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_index(&self) -> HashMap<&str, NodeId> {
        self.labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect()
    }

    pub fn check_link(&self, link: LinkId) -> Result<()> {
        if link < self.links.len() {
            Ok(())
        } else {
            Err(GraphError::LinkOutOfRange(link))
        }
    }

    /// Connected components as sorted node lists, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<NodeId>> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut comp = Vec::new();
            while let Some(u) = queue.pop_front() {
                comp.push(u);
                for &(v, _) in &self.adjacency[u] {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.node_count() > 0 && self.components().len() == 1
    }

    /// Subgraph on the nodes flagged in `keep`, renumbered in id order.
    /// Surviving links keep their relative order.
    pub fn induced(&self, keep: &[bool]) -> Graph {
        let mut remap = vec![usize::MAX; self.node_count()];
        let mut labels = Vec::new();
        for (i, &k) in keep.iter().enumerate() {
            if k {
                remap[i] = labels.len();
                labels.push(self.labels[i].clone());
            }
        }
        let pairs = self
            .links
            .iter()
            .filter(|&&(a, b)| keep[a] && keep[b])
            .map(|&(a, b)| (remap[a], remap[b]));
        Graph::from_links(labels, pairs).expect("subgraph of a simple graph is simple")
    }
}

/// Parses a whitespace-separated edge list, one link per line.
///
/// Lines starting with `#` and blank lines are skipped. Labels are interned
/// in order of first appearance. Self-loops are dropped.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
    let mut index: HashMap<String, NodeId> = HashMap::new();
    let mut labels = Vec::new();
    let mut pairs = Vec::new();
    let mut intern = |label: &str, labels: &mut Vec<String>| -> NodeId {
        if let Some(&id) = index.get(label) {
            return id;
        }
        let id = labels.len();
        labels.push(label.to_owned());
        index.insert(label.to_owned(), id);
        id
    };
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(GraphError::Parse {
                line: lineno + 1,
                found: fields.len(),
            });
        }
        let a = intern(fields[0], &mut labels);
        let b = intern(fields[1], &mut labels);
        if a == b {
            log::warn!("line {}: dropping self-loop on {:?}", lineno + 1, fields[0]);
            continue;
        }
        pairs.push((a, b));
    }
    if pairs.is_empty() {
        return Err(GraphError::EmptyInput);
    }
    Graph::from_links(labels, pairs)
}

/// Reads a two-column `label<TAB>flag` attribute file into a protection mask.
///
/// Flags are `1`/`0`/`true`/`false`/`yes`/`no`. Nodes missing from the file
/// are unprotected; labels missing from the graph are an error.
pub fn load_protected<R: BufRead>(g: &Graph, reader: R) -> Result<Vec<bool>> {
    let index = g.label_index();
    let mut mask = vec![false; g.node_count()];
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim_end_matches(['\r', '\n']);
        if trimmed.trim().is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split('\t');
        let (Some(label), Some(flag), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(GraphError::Attribute {
                line: lineno + 1,
                message: "expected label<TAB>flag".into(),
            });
        };
        let flag = match flag.trim().to_ascii_lowercase().as_str() {
            "1" | "true" | "yes" => true,
            "0" | "false" | "no" => false,
            other => {
                return Err(GraphError::Attribute {
                    line: lineno + 1,
                    message: format!("bad protected flag {other:?}"),
                })
            }
        };
        let &node = index.get(label).ok_or_else(|| GraphError::UnknownLabel {
            line: lineno + 1,
            label: label.to_owned(),
        })?;
        mask[node] = flag;
    }
    Ok(mask)
}

#[derive(Debug, Clone)]
pub struct Pruned {
    pub graph: Graph,
    pub removed: Vec<String>,
}

/// Removes every unprotected node whose degree in `g` is exactly one.
///
/// Single pass over the input degrees: nodes that drop to degree one because
/// a neighbour was removed are kept.
pub fn prune_degree_one<F>(g: &Graph, protected: F) -> Pruned
where
    F: Fn(NodeId) -> bool,
{
    let keep: Vec<bool> = (0..g.node_count())
        .map(|i| g.degree(i) != 1 || protected(i))
        .collect();
    let removed = keep
        .iter()
        .enumerate()
        .filter(|(_, &k)| !k)
        .map(|(i, _)| g.label(i).to_owned())
        .collect();
    Pruned {
        graph: g.induced(&keep),
        removed,
    }
}

/// Largest connected component by node count; ties go to the component
/// holding the smallest node id. Returns the component and the number of
/// discarded nodes.
pub fn giant_component(g: &Graph) -> Result<(Graph, usize)> {
    if g.node_count() == 0 {
        return Err(GraphError::NoNodes);
    }
    let comps = g.components();
    // components are ordered by smallest member, so max_by keeps the first on ties
    let best = comps
        .iter()
        .enumerate()
        .max_by(|(ia, a), (ib, b)| a.len().cmp(&b.len()).then(ib.cmp(ia)))
        .map(|(i, _)| i)
        .expect("non-empty graph has a component");
    let mut keep = vec![false; g.node_count()];
    for &v in &comps[best] {
        keep[v] = true;
    }
    let discarded = g.node_count() - comps[best].len();
    Ok((g.induced(&keep), discarded))
}

/// Whether the links in `links` together with their endpoints form one
/// connected subgraph. The empty set is not connected.
pub fn is_connected_link_set(g: &Graph, links: &[LinkId]) -> Result<bool> {
    for &l in links {
        g.check_link(l)?;
    }
    Ok(!links.is_empty() && link_components(g, links).len() == 1)
}

/// Splits a link set into connected components.
///
/// Each component is a sorted link list; components are ordered by size
/// (largest first), then by smallest link id.
pub fn link_components(g: &Graph, links: &[LinkId]) -> Vec<Vec<LinkId>> {
    let mut in_set = HashMap::with_capacity(links.len());
    for &l in links {
        in_set.insert(l, false);
    }
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for &start in links {
        if in_set[&start] {
            continue;
        }
        in_set.insert(start, true);
        stack.push(start);
        let mut comp = Vec::new();
        while let Some(l) = stack.pop() {
            comp.push(l);
            let (a, b) = g.endpoints(l);
            for node in [a, b] {
                for &(_, next) in g.neighbors(node) {
                    if let Some(visited) = in_set.get_mut(&next) {
                        if !*visited {
                            *visited = true;
                            stack.push(next);
                        }
                    }
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    out
}

/// Sorted, duplicate-free set of node ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct NodeSet(Vec<NodeId>);

impl NodeSet {
    pub fn new<I: IntoIterator<Item = NodeId>>(nodes: I) -> Self {
        let mut v: Vec<NodeId> = nodes.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        NodeSet(v)
    }

    pub fn as_slice(&self) -> &[NodeId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.0.binary_search(&node).is_ok()
    }

    pub fn is_subset(&self, other: &NodeSet) -> bool {
        self.len() <= other.len() && self.0.iter().all(|&v| other.contains(v))
    }

    pub fn intersection(&self, other: &NodeSet) -> NodeSet {
        NodeSet(self.0.iter().copied().filter(|&v| other.contains(v)).collect())
    }

    pub fn union(&self, other: &NodeSet) -> NodeSet {
        NodeSet::new(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn is_disjoint(&self, other: &NodeSet) -> bool {
        self.0.iter().all(|&v| !other.contains(v))
    }

    /// Links with both endpoints in the set, sorted.
    pub fn induced_links(&self, g: &Graph) -> Vec<LinkId> {
        let mut out: Vec<LinkId> = self
            .0
            .iter()
            .flat_map(|&u| {
                g.neighbors(u)
                    .iter()
                    .filter(move |&&(v, _)| u < v && self.contains(v))
                    .map(|&(_, l)| l)
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Nodes attached to any link of `links`.
    pub fn attached(g: &Graph, links: &[LinkId]) -> NodeSet {
        NodeSet::new(links.iter().flat_map(|&l| {
            let (a, b) = g.endpoints(l);
            [a, b]
        }))
    }
}

impl FromIterator<NodeId> for NodeSet {
    fn from_iter<I: IntoIterator<Item = NodeId>>(iter: I) -> Self {
        NodeSet::new(iter)
    }
}
