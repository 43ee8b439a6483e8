//! Built-in groups, each written in the group-file format.

use crate::harness::groupfile::GroupDefinition;
use crate::quotient::QuotientModel;
use crate::scalar::{parse_rational, Rational};

/// Bumped whenever an entry's definition changes.
pub const CATALOG_VERSION: &str = "1";

#[derive(Clone, Copy, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub summary: &'static str,
    pub source: &'static str,
    /// Test functions on the quotient, in quotient coordinates.
    pub test_functions: &'static [&'static str],
    /// Centers `q` whose slice point normalizes the subgroup.
    pub centers: &'static [&'static str],
}

impl CatalogEntry {
    pub fn definition(&self) -> GroupDefinition {
        GroupDefinition::parse(self.source).expect("catalog entries parse")
    }

    pub fn build(&self) -> QuotientModel {
        self.definition().build().expect("catalog entries are valid")
    }

    pub fn center_points(&self) -> Vec<Vec<Rational>> {
        self.centers.iter().map(|c| parse_point(c).expect("catalog centers parse")).collect()
    }
}

/// Comma-separated rationals.
pub fn parse_point(s: &str) -> Option<Vec<Rational>> {
    if s.trim().is_empty() {
        return Some(Vec::new());
    }
    s.split(',').map(parse_rational).collect()
}

const ENTRIES: &[CatalogEntry] = &[
    CatalogEntry {
        name: "heisenberg",
        summary: "first Heisenberg group, trivial subgroup",
        source: "[basis]\ne1: 1\ne2: 1\ne3: 2\n[brackets]\n[e1, e2] = e3\n[subgroup]\n[coordinates]\nx1 x2 x3\n",
        test_functions: &["x1^2 + x2*x3", "x3", "exp(x1)*x2"],
        centers: &["0,0,0", "1/2,-1,1/3"],
    },
    CatalogEntry {
        name: "heisenberg-z",
        summary: "Heisenberg group modulo its center; the quotient is the Euclidean plane",
        source: "[basis]\ne1: 1\ne2: 1\ne3: 2\n[brackets]\n[e1, e2] = e3\n[subgroup]\ne3\n[coordinates]\ny1 x1 x2\n",
        test_functions: &["x1^3 - x1*x2^2", "x1*x2", "sin(x1)*x2"],
        centers: &["0,0", "1,-1/2"],
    },
    CatalogEntry {
        name: "filiform1",
        summary: "Heisenberg group modulo a horizontal line; the quotient is the Grushin plane",
        source: "[basis]\nw1: 1\nv1: 1\nv2: 2\n[brackets]\n[v1, w1] = v2\n[subgroup]\nw1\n[coordinates]\ny1 x1 x2\n",
        test_functions: &["x2", "x1^2*x2 + x1", "exp(x1)"],
        centers: &["0,0", "0,-1"],
    },
    CatalogEntry {
        name: "filiform2",
        summary: "step-three filiform group modulo the span of w1, w2",
        source: "[basis]\nw1: 1\nw2: 2\nv1: 1\nv2: 3\n[brackets]\n[v1, w1] = w2\n[v1, w2] = v2\n[subgroup]\nw1 w2\n[coordinates]\ny1 y2 x1 x2\n",
        test_functions: &["x2", "x1^3 + x1*x2", "exp(x1)*x1"],
        centers: &["0,0", "0,1/2"],
    },
    CatalogEntry {
        name: "filiform3",
        summary: "step-four filiform group modulo the span of w1, w2, w3",
        source: "[basis]\nw1: 1\nw2: 2\nw3: 3\nv1: 1\nv2: 4\n[brackets]\n[v1, w1] = w2\n[v1, w2] = w3\n[v1, w3] = v2\n[subgroup]\nw1 w2 w3\n[coordinates]\ny1 y2 y3 x1 x2\n",
        test_functions: &["x2", "x1^4 + x2", "cos(x1)"],
        centers: &["0,0", "0,-1"],
    },
    CatalogEntry {
        name: "crq6",
        summary: "rank-two step-four group modulo the span of w1, w2, w3",
        source: "[basis]\nw1: 2\nw2: 3\nw3: 3\nv1: 1\nv2: 1\nv3: 4\n[brackets]\n[v2, v1] = w1\n[w1, v1] = w2\n[w1, v2] = w3\n[w2, v1] = 8*v3\n[w3, v2] = 8*v3\n[subgroup]\nw1 w2 w3\n[coordinates]\ny1 y2 y3 x1 x2 x3\n",
        test_functions: &["x3", "x1^2*x2^2 + x3", "exp(x2)*x1"],
        centers: &["0,0,0", "0,0,1"],
    },
    CatalogEntry {
        name: "filiform4-2nd",
        summary: "step-three Engel group modulo its second layer",
        source: "[basis]\ne1: 1\ne2: 1\ne3: 2\ne4: 3\n[brackets]\n[e1, e2] = e3\n[e1, e3] = e4\n[subgroup]\ne3\n[order]\ne3 e1 e2 e4\n[coordinates]\nx3 x1 x2 x4\n",
        test_functions: &["x4", "x1^2*x2 + x4", "exp(x1)*x2"],
        centers: &["0,0,0", "0,1/2,-1"],
    },
];

pub fn catalog() -> &'static [CatalogEntry] {
    ENTRIES
}

pub fn lookup(name: &str) -> Option<&'static CatalogEntry> {
    ENTRIES.iter().find(|e| e.name == name)
}
