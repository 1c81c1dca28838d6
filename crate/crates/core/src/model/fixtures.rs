//! Bundled example models.
//!
//! * `ex1`: two agents with two localities each, transforms on `(x, y)`.
//! * `intervals`: a deterministic three-locality agent next to a
//!   non-deterministic four-locality one; a counter `n` is incremented on the
//!   first agent's last transition so that the model is acyclic.
//! * `toy-vehicles`: an invented two-vehicle scenario with positions,
//!   speeds and lanes, used to exercise heuristics.

use super::Model;
use crate::error::{Error, Result};

pub const EX1: &str = include_str!("../../fixtures/ex1.json");
pub const INTERVALS: &str = include_str!("../../fixtures/intervals.json");
pub const TOY_VEHICLES: &str = include_str!("../../fixtures/toy-vehicles.json");

pub const NAMES: &[&str] = &["ex1", "intervals", "toy-vehicles"];

pub fn source(name: &str) -> Option<&'static str> {
    match name {
        "ex1" => Some(EX1),
        "intervals" => Some(INTERVALS),
        "toy-vehicles" => Some(TOY_VEHICLES),
        _ => None,
    }
}

pub fn load(name: &str) -> Result<Model> {
    let text = source(name).ok_or_else(|| Error::UnknownReference {
        kind: "fixture",
        name: name.to_string(),
    })?;
    Model::from_json(text)
}

pub fn ex1() -> Model {
    load("ex1").expect("bundled fixture parses")
}

pub fn intervals() -> Model {
    load("intervals").expect("bundled fixture parses")
}

pub fn toy_vehicles() -> Model {
    load("toy-vehicles").expect("bundled fixture parses")
}

pub fn all() -> Vec<Model> {
    vec![ex1(), intervals(), toy_vehicles()]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ex1_shape() {
        let m = ex1();
        assert_eq!(m.agents.len(), 2);
        assert_eq!(m.transition_count(), 4);
        let periods: Vec<u64> = m.agents.iter().map(|a| a.reset_period).collect();
        assert_eq!(periods, [5, 5]);
        assert_eq!(m.lcm_periods().unwrap(), 5);
    }

    #[test]
    fn intervals_period() {
        assert_eq!(intervals().lcm_periods().unwrap(), 30);
    }

    #[test]
    fn unknown_fixture() {
        assert!(load("nope").is_err());
    }
}
