//! Bundled example graphs.

use crate::diagram::{parse_graph, WeightedPlanarGraph};

/// A named example graph.
#[derive(Debug, Clone, Copy)]
pub struct Fixture {
    pub name: &'static str,
    pub json: &'static str,
    /// Signs or layout guessed from a figure rather than given in text.
    pub reconstructed: bool,
}

impl Fixture {
    pub fn graph(&self) -> WeightedPlanarGraph {
        parse_graph(self.json).expect("bundled fixture parses")
    }
}

macro_rules! fixture {
    ($name:literal, $rec:expr) => {
        Fixture { name: $name, json: include_str!(concat!("../fixtures/", $name, ".json")), reconstructed: $rec }
    };
}

pub const TREFOIL: Fixture = fixture!("trefoil", false);
pub const TREFOIL_MIRROR: Fixture = fixture!("trefoil_mirror", false);
pub const CINQUEFOIL: Fixture = fixture!("cinquefoil", false);
pub const CINQUEFOIL_MIRROR: Fixture = fixture!("cinquefoil_mirror", false);
pub const PRETZEL_5_M2: Fixture = fixture!("pretzel_5_m2", false);
pub const PRETZEL_M5_2: Fixture = fixture!("pretzel_m5_2", false);
pub const PRETZEL_3_2: Fixture = fixture!("pretzel_3_2", false);
pub const THETA_3_M3_5: Fixture = fixture!("theta_3_m3_5", false);
pub const THETA_1_1_1: Fixture = fixture!("theta_1_1_1", false);
pub const UNKNOT: Fixture = fixture!("unknot", false);
/// 20-crossing non-Montesinos example: a square with one diagonal. Only the
/// absolute weights are known; placement and signs are a guess.
pub const SQUARE_DIAGONAL_20: Fixture = fixture!("square_diagonal_20", true);

/// Nontrivial knot fixtures.
pub fn knots() -> Vec<Fixture> {
    vec![TREFOIL, TREFOIL_MIRROR, CINQUEFOIL, CINQUEFOIL_MIRROR, PRETZEL_5_M2, PRETZEL_M5_2, PRETZEL_3_2, THETA_3_M3_5, THETA_1_1_1]
}

/// Every bundled fixture.
pub fn all() -> Vec<Fixture> {
    let mut v = knots();
    v.push(SQUARE_DIAGONAL_20);
    v.push(UNKNOT);
    v
}

/// Look a fixture up by name.
pub fn by_name(name: &str) -> Option<Fixture> {
    all().into_iter().find(|f| f.name == name)
}
