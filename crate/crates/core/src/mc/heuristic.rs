//! Weight functions used to order the pending clusters of a layered search.
//!
//! The frontier is kept sorted by weight and its last element is taken
//! next. With [`Order::Ascending`] the heaviest cluster is explored first,
//! with [`Order::Descending`] the lightest.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Model;
use crate::rational::Rational;
use crate::semantics::State;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Weight {
    Finite(Rational),
    /// Larger than every finite weight.
    Infinite,
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Finite(r) => write!(f, "{r}"),
            Weight::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Order {
    Ascending,
    Descending,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Kind {
    Distance { pos1: usize, pos2: usize },
    EstimatedTravelTime { elapsed: usize, pos: usize, speed: usize, road_end: Rational },
    TimeToOvertake { pos1: usize, speed1: usize, pos2: usize, speed2: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Heuristic {
    pub name: String,
    pub order: Order,
    kind: Kind,
}

/// Entry of the built-in registry.
#[derive(Debug, Clone, Serialize)]
pub struct HeuristicInfo {
    pub name: &'static str,
    pub params: &'static [&'static str],
    pub order: Order,
    pub summary: &'static str,
}

pub fn builtin_heuristics() -> Vec<HeuristicInfo> {
    vec![
        HeuristicInfo {
            name: "distance",
            params: &["pos1", "pos2"],
            order: Order::Ascending,
            summary: "position of the first vehicle minus that of the second",
        },
        HeuristicInfo {
            name: "estimated_travel_time",
            params: &["elapsed", "pos", "speed", "road_end"],
            order: Order::Descending,
            summary: "elapsed time plus remaining distance over current speed",
        },
        HeuristicInfo {
            name: "time_to_overtake",
            params: &["pos1", "speed1", "pos2", "speed2"],
            order: Order::Descending,
            summary: "time until both vehicles share a position at current speeds",
        },
    ]
}

impl Heuristic {
    /// Binds a registry entry to components of `m`. Parameters are component
    /// names, except `road_end` which is a number.
    pub fn bind(m: &Model, name: &str, args: &[String]) -> Result<Heuristic> {
        let info = builtin_heuristics()
            .into_iter()
            .find(|h| h.name == name)
            .ok_or_else(|| Error::UnknownReference {
                kind: "heuristic",
                name: name.to_string(),
            })?;
        if args.len() != info.params.len() {
            return Err(Error::Predicate(format!(
                "heuristic `{name}` takes {} parameters ({})",
                info.params.len(),
                info.params.join(", ")
            )));
        }
        let comp = |i: usize| {
            m.component_index(&args[i]).ok_or_else(|| Error::MissingComponent {
                heuristic: name.to_string(),
                component: args[i].clone(),
            })
        };
        let kind = match name {
            "distance" => Kind::Distance {
                pos1: comp(0)?,
                pos2: comp(1)?,
            },
            "estimated_travel_time" => Kind::EstimatedTravelTime {
                elapsed: comp(0)?,
                pos: comp(1)?,
                speed: comp(2)?,
                road_end: args[3].parse().map_err(|_| {
                    Error::Predicate(format!("road_end `{}` is not a number", args[3]))
                })?,
            },
            _ => Kind::TimeToOvertake {
                pos1: comp(0)?,
                speed1: comp(1)?,
                pos2: comp(2)?,
                speed2: comp(3)?,
            },
        };
        Ok(Heuristic {
            name: name.to_string(),
            order: info.order,
            kind,
        })
    }

    /// Parses `name:arg1,arg2,...`.
    pub fn parse(m: &Model, spec: &str) -> Result<Heuristic> {
        let (name, args) = spec.split_once(':').unwrap_or((spec, ""));
        let args: Vec<String> = args
            .split(',')
            .map(|a| a.trim().to_string())
            .filter(|a| !a.is_empty())
            .collect();
        Heuristic::bind(m, name.trim(), &args)
    }

    pub fn with_order(mut self, order: Order) -> Heuristic {
        self.order = order;
        self
    }

    pub fn weight(&self, s: &State) -> Result<Weight> {
        let v = |i: usize| s.valuation.get(i);
        match &self.kind {
            Kind::Distance { pos1, pos2 } => Ok(Weight::Finite(v(*pos1).sub(v(*pos2))?)),
            Kind::EstimatedTravelTime {
                elapsed,
                pos,
                speed,
                road_end,
            } => {
                let remaining = road_end.sub(v(*pos))?;
                if !remaining.is_positive() {
                    return Ok(Weight::Finite(v(*elapsed).clone()));
                }
                match remaining.div(v(*speed)) {
                    Some(eta) if v(*speed).is_positive() => Ok(Weight::Finite(v(*elapsed).add(&eta?)?)),
                    _ => Ok(Weight::Infinite),
                }
            }
            Kind::TimeToOvertake {
                pos1,
                speed1,
                pos2,
                speed2,
            } => {
                let gap = v(*pos2).sub(v(*pos1))?;
                if gap.is_zero() {
                    return Ok(Weight::Finite(Rational::zero()));
                }
                let closing = v(*speed1).sub(v(*speed2))?;
                match gap.div(&closing) {
                    Some(t) => {
                        let t = t?;
                        Ok(if t.is_positive() {
                            Weight::Finite(t)
                        } else {
                            Weight::Infinite
                        })
                    }
                    None => Ok(Weight::Infinite),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures;

    fn args(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn with(m: &Model, values: &[(&str, i64)]) -> State {
        let mut s = State::initial(m);
        for (name, value) in values {
            s.valuation.0[m.component_index(name).unwrap()] = Rational::from_integer(*value);
        }
        s
    }

    #[test]
    fn distance() {
        let m = fixtures::toy_vehicles();
        let h = Heuristic::parse(&m, "distance:pos_a,pos_b").unwrap();
        assert_eq!(h.order, Order::Ascending);
        let s = with(&m, &[("pos_a", 4), ("pos_b", 4)]);
        assert_eq!(h.weight(&s).unwrap(), Weight::Finite(Rational::zero()));
        let s = with(&m, &[("pos_a", 1), ("pos_b", 4)]);
        assert_eq!(h.weight(&s).unwrap(), Weight::Finite(Rational::from_integer(-3)));
    }

    #[test]
    fn time_to_overtake() {
        let m = fixtures::toy_vehicles();
        let h = Heuristic::bind(&m, "time_to_overtake", &args(&["pos_a", "speed_a", "pos_b", "speed_b"])).unwrap();
        // Initially a is 6 behind and 1 faster.
        assert_eq!(h.weight(&State::initial(&m)).unwrap(), Weight::Finite(Rational::from_integer(6)));
        let s = with(&m, &[("speed_a", 2), ("speed_b", 2)]);
        assert_eq!(h.weight(&s).unwrap(), Weight::Infinite);
        let s = with(&m, &[("speed_a", 1), ("speed_b", 3)]);
        assert_eq!(h.weight(&s).unwrap(), Weight::Infinite);
        assert!(Weight::Finite(Rational::from_integer(1_000_000)) < Weight::Infinite);
    }

    #[test]
    fn estimated_travel_time() {
        let m = fixtures::toy_vehicles();
        let h = Heuristic::parse(&m, "estimated_travel_time:elapsed,pos_a,speed_a,20").unwrap();
        assert_eq!(h.order, Order::Descending);
        // elapsed 0 + (20 - 0) / 2.
        assert_eq!(h.weight(&State::initial(&m)).unwrap(), Weight::Finite(Rational::from_integer(10)));
        let s = with(&m, &[("pos_a", 25), ("elapsed", 7)]);
        assert_eq!(h.weight(&s).unwrap(), Weight::Finite(Rational::from_integer(7)));
    }

    #[test]
    fn binding_errors() {
        let m = fixtures::ex1();
        assert!(matches!(
            Heuristic::parse(&m, "distance:pos_a,pos_b"),
            Err(Error::MissingComponent { .. })
        ));
        assert!(matches!(
            Heuristic::parse(&m, "nearest:x"),
            Err(Error::UnknownReference { .. })
        ));
        assert!(Heuristic::parse(&m, "distance:x").is_err());
    }
}
