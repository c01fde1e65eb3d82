//! Bundled example trees.
//!
//! `t1` is the star on four vertices centred at 2 with weights `I`,
//! `diag(2,1)`, `diag(1,2)`; `t2` is the five-vertex tree with edges
//! `1-2, 2-3, 3-4, 3-5` and weights `I`, `diag(2,1)`, `diag(1,2)`,
//! `diag(2,2)`.

use crate::error::{Error, Result};
use crate::io::parse_tree_file;
use crate::tree::WeightedTree;

pub const T1_JSON: &str = include_str!("../examples/t1.json");
pub const T2_JSON: &str = include_str!("../examples/t2.json");

pub const NAMES: [&str; 2] = ["t1", "t2"];

/// Source text of a bundled tree.
pub fn source(name: &str) -> Result<&'static str> {
    match name {
        "t1" => Ok(T1_JSON),
        "t2" => Ok(T2_JSON),
        other => Err(Error::Config(format!("unknown example '{other}' (expected t1 or t2)"))),
    }
}

pub fn load(name: &str) -> Result<WeightedTree> {
    parse_tree_file(source(name)?)
}

pub fn t1() -> WeightedTree {
    load("t1").expect("bundled t1 is valid")
}

pub fn t2() -> WeightedTree {
    load("t2").expect("bundled t2 is valid")
}
