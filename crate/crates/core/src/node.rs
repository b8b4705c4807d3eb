use core::fmt;

/// Identifier of a routing endpoint: a UAV index or the terrestrial base station.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NodeId(pub u32);

impl NodeId {
    /// The single ground sink.
    pub const TBS: NodeId = NodeId(u32::MAX);

    pub fn uav(index: usize) -> Self {
        NodeId(index as u32)
    }

    pub fn is_tbs(self) -> bool {
        self == Self::TBS
    }

    /// Index into the UAV array, `None` for the base station.
    pub fn index(self) -> Option<usize> {
        if self.is_tbs() {
            None
        } else {
            Some(self.0 as usize)
        }
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_tbs() {
            f.write_str("TBS")
        } else {
            write!(f, "U{}", self.0)
        }
    }
}
