use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cost::{self, CostError, LinkSet};
use crate::graph::{Graph, LinkId, NodeSet};

/// 128-bit canonical hash of a sorted link list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fingerprint(pub u128);

impl Fingerprint {
    pub fn of(sorted_links: &[LinkId]) -> Self {
        debug_assert!(sorted_links.windows(2).all(|w| w[0] < w[1]));
        let mut hasher = Sha256::new();
        for &l in sorted_links {
            hasher.update((l as u64).to_le_bytes());
        }
        let digest = hasher.finalize();
        let mut head = [0u8; 16];
        head.copy_from_slice(&digest[..16]);
        Fingerprint(u128::from_be_bytes(head))
    }
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:032x}", self.0)
    }
}

impl Serialize for Fingerprint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Fingerprint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        u128::from_str_radix(&s, 16)
            .map(Fingerprint)
            .map_err(serde::de::Error::custom)
    }
}

/// A link set with its cached cost and node cover.
#[derive(Debug, Clone, PartialEq)]
pub struct Community {
    links: Vec<LinkId>,
    nodes: NodeSet,
    psi: f64,
    fingerprint: Fingerprint,
}

impl Community {
    /// Builds a community from links in any order. Ψ must be defined.
    pub fn from_links(g: &Graph, mut links: Vec<LinkId>) -> Result<Self, CostError> {
        links.sort_unstable();
        let psi = cost::psi(g, &links)?;
        Ok(Self::with_psi(g, links, psi))
    }

    pub fn from_link_set(set: &LinkSet<'_>) -> Result<Self, CostError> {
        let psi = set.psi_checked()?;
        Ok(Self::with_psi(set.graph(), set.sorted_links(), psi))
    }

    /// The community induced by a node set.
    pub fn induced(g: &Graph, nodes: &NodeSet) -> Result<Self, CostError> {
        Self::from_links(g, nodes.induced_links(g))
    }

    fn with_psi(g: &Graph, links: Vec<LinkId>, psi: f64) -> Self {
        Community {
            nodes: NodeSet::attached(g, &links),
            fingerprint: Fingerprint::of(&links),
            links,
            psi,
        }
    }

    /// Sorted member links.
    pub fn links(&self) -> &[LinkId] {
        &self.links
    }

    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    pub fn psi(&self) -> f64 {
        self.psi
    }

    pub fn fingerprint(&self) -> Fingerprint {
        self.fingerprint
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn distance(&self, other: &Community) -> usize {
        cost::distance(&self.links, &other.links)
    }

    pub fn to_link_set<'g>(&self, g: &'g Graph) -> LinkSet<'g> {
        LinkSet::from_links(g, &self.links).expect("community links are valid")
    }

    /// Ranking order: Ψ (ties within tolerance), then size, then link ids.
    pub fn rank_cmp(&self, other: &Community) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        if cost::psi_less(self.psi, other.psi) {
            Ordering::Less
        } else if cost::psi_less(other.psi, self.psi) {
            Ordering::Greater
        } else {
            self.len()
                .cmp(&other.len())
                .then_with(|| self.links.cmp(&other.links))
        }
    }
}

impl Serialize for Community {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Community", 3)?;
        st.serialize_field("fingerprint", &self.fingerprint())?;
        st.serialize_field("psi", &self.psi())?;
        st.serialize_field("links", self.links())?;
        st.end()
    }
}
