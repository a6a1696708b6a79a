//! Example networks shipped with the crate.

use crate::format::load_network;
use crate::netmodel::MulticastNetwork;

pub const FIG1: &str = include_str!("../networks/fig1.json");
pub const COMBINATION_4_2: &str = include_str!("../networks/combination-4-2.json");
pub const BUTTERFLY: &str = include_str!("../networks/butterfly.json");

/// `(name, json)` for every bundled network.
pub const BUNDLED: [(&str, &str); 3] = [
    ("fig1", FIG1),
    ("combination-4-2", COMBINATION_4_2),
    ("butterfly", BUTTERFLY),
];

/// Looks a bundled network up by name, with or without `.json`.
pub fn bundled(name: &str) -> Option<&'static str> {
    let stem = name.strip_suffix(".json").unwrap_or(name);
    BUNDLED.iter().find(|(n, _)| *n == stem).map(|(_, t)| *t)
}

/// Two parallel edges per hop: s => a => b => t.
pub fn fig1() -> MulticastNetwork {
    load_network(FIG1).expect("bundled network is valid")
}

pub fn combination_4_2() -> MulticastNetwork {
    load_network(COMBINATION_4_2).expect("bundled network is valid")
}

pub fn butterfly() -> MulticastNetwork {
    load_network(BUTTERFLY).expect("bundled network is valid")
}
