//! Stateful IPv6 assignment through cluster heads.
//!
//! Each head runs a DHCPv6-style server for its cluster. It configures itself
//! first, then for every other member in ascending id order sends a hello,
//! receives the member's reply and sends back an address. Messages are
//! delivered synchronously and never lost.
//!
//! Addresses are laid out as `prefix (48) | cluster id (16) | node id + 1 (64)`,
//! so uniqueness holds by construction and a node that changes cluster always
//! changes address.

use std::collections::BTreeMap;
use std::fmt;
use std::net::Ipv6Addr;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::{ClusterSet, NodeId};

/// The upper 48 bits of every assigned address.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AddressPrefix([u16; 3]);

impl AddressPrefix {
    pub const fn new(groups: [u16; 3]) -> Self {
        AddressPrefix(groups)
    }

    pub fn address_for(self, cluster_id: u32, node: NodeId) -> Result<Ipv6Addr> {
        let cluster = u16::try_from(cluster_id).map_err(|_| {
            Error::Capacity(format!("cluster id {cluster_id} does not fit in 16 bits"))
        })?;
        let iid = u64::try_from(node.index())
            .ok()
            .and_then(|i| i.checked_add(1))
            .ok_or_else(|| Error::Capacity(format!("node {node} does not fit in 64 bits")))?;
        let [a, b, c] = self.0;
        let bits = (u128::from(a) << 112)
            | (u128::from(b) << 96)
            | (u128::from(c) << 80)
            | (u128::from(cluster) << 64)
            | u128::from(iid);
        Ok(Ipv6Addr::from(bits))
    }
}

impl Default for AddressPrefix {
    /// `fd00:0:0`, in unique-local space.
    fn default() -> Self {
        AddressPrefix([0xfd00, 0, 0])
    }
}

impl fmt::Display for AddressPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.0;
        write!(f, "{a:x}:{b:x}:{c:x}")
    }
}

impl FromStr for AddressPrefix {
    type Err = String;

    /// Three colon-separated hex groups, e.g. `fd00:0:0`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let groups: Vec<&str> = s.split(':').collect();
        if groups.len() != 3 {
            return Err(format!("prefix `{s}` must have exactly three hex groups"));
        }
        let mut out = [0u16; 3];
        for (slot, g) in out.iter_mut().zip(&groups) {
            if g.is_empty() || g.len() > 4 {
                return Err(format!("bad group `{g}` in prefix `{s}`"));
            }
            *slot = u16::from_str_radix(g, 16).map_err(|e| format!("bad group `{g}`: {e}"))?;
        }
        Ok(AddressPrefix(out))
    }
}

impl Serialize for AddressPrefix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for AddressPrefix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MessageKind {
    Hello,
    Reply,
    Assign,
}

impl fmt::Display for MessageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub seq: u64,
    pub from: NodeId,
    pub to: NodeId,
    pub kind: MessageKind,
    pub payload: Option<Ipv6Addr>,
}

/// Totally ordered by `seq`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MessageTrace {
    pub messages: Vec<Message>,
}

impl MessageTrace {
    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Message> {
        self.messages.iter()
    }

    fn push(&mut self, from: NodeId, to: NodeId, kind: MessageKind, payload: Option<Ipv6Addr>) {
        let seq = self.messages.len() as u64;
        self.messages.push(Message {
            seq,
            from,
            to,
            kind,
            payload,
        });
    }
}

/// Addresses every node through its cluster head.
pub fn assign_addresses(
    clusters: &ClusterSet,
    prefix: AddressPrefix,
) -> Result<(BTreeMap<NodeId, Ipv6Addr>, MessageTrace)> {
    clusters.check_partition()?;
    let mut table = BTreeMap::new();
    let mut trace = MessageTrace::default();
    for c in clusters {
        table.insert(c.head, prefix.address_for(c.cluster_id, c.head)?);
        for member in c.non_head_members() {
            let addr = prefix.address_for(c.cluster_id, member)?;
            trace.push(c.head, member, MessageKind::Hello, None);
            trace.push(member, c.head, MessageKind::Reply, None);
            trace.push(c.head, member, MessageKind::Assign, Some(addr));
            table.insert(member, addr);
        }
    }
    Ok((table, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Cluster;

    #[test]
    fn layout_matches_example() {
        let set = ClusterSet::new(
            vec![
                Cluster::new(0, NodeId(7), [NodeId(5)]),
                Cluster::new(1, NodeId(0), (0..5).chain(6..7).map(NodeId)),
            ],
            8,
        );
        let (table, _) = assign_addresses(&set, AddressPrefix::default()).unwrap();
        let expected: Ipv6Addr = "fd00:0:0:0000::6".parse().unwrap();
        assert_eq!(table[&NodeId(5)], expected);
        assert_eq!(table[&NodeId(5)].to_string(), "fd00::6");
        assert_eq!(table[&NodeId(7)], "fd00::8".parse::<Ipv6Addr>().unwrap());
        assert_eq!(
            table[&NodeId(3)],
            "fd00:0:0:1::4".parse::<Ipv6Addr>().unwrap()
        );
    }

    #[test]
    fn head_only_cluster_has_no_messages() {
        let set = ClusterSet::new(vec![Cluster::new(0, NodeId(0), [])], 1);
        let (table, trace) = assign_addresses(&set, AddressPrefix::default()).unwrap();
        assert_eq!(table.len(), 1);
        assert!(trace.is_empty());
    }

    #[test]
    fn three_messages_per_member_in_order() {
        let set = ClusterSet::new(
            vec![Cluster::new(
                0,
                NodeId(2),
                [NodeId(0), NodeId(1), NodeId(3)],
            )],
            4,
        );
        let (table, trace) = assign_addresses(&set, AddressPrefix::default()).unwrap();
        assert_eq!(trace.len(), 9);
        let kinds: Vec<_> = trace.iter().map(|m| (m.kind, m.from.0, m.to.0)).collect();
        use MessageKind::*;
        assert_eq!(
            kinds,
            vec![
                (Hello, 2, 0),
                (Reply, 0, 2),
                (Assign, 2, 0),
                (Hello, 2, 1),
                (Reply, 1, 2),
                (Assign, 2, 1),
                (Hello, 2, 3),
                (Reply, 3, 2),
                (Assign, 2, 3),
            ]
        );
        assert!(trace.iter().enumerate().all(|(i, m)| m.seq == i as u64));
        assert_eq!(trace.messages[2].payload, Some(table[&NodeId(0)]));
    }

    #[test]
    fn cluster_id_overflow() {
        let set = ClusterSet::new(vec![Cluster::new(70_000, NodeId(0), [])], 1);
        assert!(matches!(
            assign_addresses(&set, AddressPrefix::default()),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn prefix_parsing() {
        let p: AddressPrefix = "2001:db8:ab".parse().unwrap();
        assert_eq!(p.to_string(), "2001:db8:ab");
        assert_eq!(
            p.address_for(3, NodeId(0)).unwrap(),
            "2001:db8:ab:3::1".parse::<Ipv6Addr>().unwrap()
        );
        assert!("fd00:0".parse::<AddressPrefix>().is_err());
        assert!("fd00:0:zz".parse::<AddressPrefix>().is_err());
        assert!("fd00:0:12345".parse::<AddressPrefix>().is_err());
    }
}
