//! Membership in the class of graphs that contain no homomorphic image of a
//! fixed graph.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::solver::{find_hom, three_color};

/// Answer of [`css_decide`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CssVerdict {
    /// No homomorphism from the fixed graph exists.
    Accept,
    /// A homomorphism from the fixed graph into the input.
    Reject { map: Vec<usize> },
}

/// Decide whether `input` avoids every homomorphic image of `g`. The fixed
/// graph should be connected, loopless and not 3-colourable; a warning is
/// logged otherwise.
pub fn css_decide(g: &Graph, input: &Graph) -> CssVerdict {
    if !g.is_connected() || g.has_loops() || three_color(g).is_some() {
        warn!("fixed graph should be connected, loopless and not 3-colourable");
    }
    match find_hom(g, input) {
        Some(map) => CssVerdict::Reject { map },
        None => CssVerdict::Accept,
    }
}
