//! JSON model files.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::expr::Scope;
use super::{Agent, Component, Interval, Model, Transform, Transition};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::syntax;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    components: Vec<RawComponent>,
    #[serde(default)]
    transforms: BTreeMap<String, BTreeMap<String, String>>,
    agents: Vec<RawAgent>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComponent {
    name: String,
    init: Rational,
    #[serde(default)]
    x: bool,
    #[serde(default = "yes")]
    strong: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    positive: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTransition {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<String>,
    from: String,
    to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    transform: Option<String>,
    interval: [u64; 2],
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAgent {
    name: String,
    localities: Vec<String>,
    #[serde(default)]
    transitions: Vec<RawTransition>,
    reset_period: u64,
    init_locality: String,
    #[serde(default)]
    init_clock: u64,
}

const RESERVED: &[&str] = &[
    "min", "max", "ite", "at", "clock", "final", "true", "false", "EF", "EG", "AF", "AG",
];

fn check_identifier(kind: &str, name: &str) -> Result<()> {
    let mut chars = name.chars();
    let valid = matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'');
    if !valid {
        return Err(Error::Malformed(format!(
            "{kind} name `{name}` is not an identifier"
        )));
    }
    if RESERVED.contains(&name) {
        return Err(Error::Malformed(format!("{kind} name `{name}` is reserved")));
    }
    Ok(())
}

impl Model {
    /// Parses and structurally checks a model document.
    pub fn from_json(text: &str) -> Result<Model> {
        let raw: RawModel = serde_json::from_str(text).map_err(|e| {
            let text = e.to_string();
            // serde_json appends its own position; the span carries it.
            let message = match text.rfind(" at line ") {
                Some(i) => text[..i].to_string(),
                None => text,
            };
            Error::parse(e.line().max(1), e.column().max(1), message)
        })?;
        raw.build()
    }

    /// Serializes to the same format [`Model::from_json`] reads.
    pub fn to_json(&self) -> String {
        let raw = RawModel {
            components: self
                .components
                .iter()
                .map(|c| RawComponent {
                    name: c.name.clone(),
                    init: c.init.clone(),
                    x: c.x,
                    strong: c.strong,
                    positive: c.positive,
                })
                .collect(),
            transforms: self
                .transforms
                .iter()
                .map(|t| {
                    let body = t
                        .assignments
                        .iter()
                        .map(|(&c, e)| (self.components[c].name.clone(), e.to_string()))
                        .collect();
                    (t.name.clone(), body)
                })
                .collect(),
            agents: self
                .agents
                .iter()
                .map(|a| RawAgent {
                    name: a.name.clone(),
                    localities: a.localities.clone(),
                    transitions: a
                        .transitions
                        .iter()
                        .map(|t| RawTransition {
                            id: Some(t.id.clone()),
                            from: a.localities[t.from].clone(),
                            to: a.localities[t.to].clone(),
                            transform: t.transform.map(|i| self.transforms[i].name.clone()),
                            interval: [t.interval.a, t.interval.b],
                        })
                        .collect(),
                    reset_period: a.reset_period,
                    init_locality: a.localities[a.init_locality].clone(),
                    init_clock: a.init_clock,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("model serializes")
    }
}

impl RawModel {
    fn build(self) -> Result<Model> {
        let mut names = HashSet::new();
        let mut components = Vec::new();
        for c in self.components {
            check_identifier("component", &c.name)?;
            if !names.insert(c.name.clone()) {
                return Err(Error::Malformed(format!("duplicate component `{}`", c.name)));
            }
            components.push(Component {
                name: c.name,
                init: c.init,
                x: c.x,
                strong: c.strong,
                positive: c.positive,
            });
        }
        let component_names: Vec<String> = components.iter().map(|c| c.name.clone()).collect();
        let scope = Scope {
            components: &component_names,
            agents: None,
        };

        let mut transforms = Vec::new();
        for (name, body) in self.transforms {
            let mut assignments = BTreeMap::new();
            for (target, src) in body {
                let index = component_names
                    .iter()
                    .position(|c| *c == target)
                    .ok_or_else(|| Error::UnknownReference {
                        kind: "component",
                        name: target.clone(),
                    })?;
                let ast = syntax::parse(&src).map_err(|e| match e {
                    Error::Parse { span, message } => Error::Parse {
                        span,
                        message: format!("in transform `{name}`, component `{target}`: {message}"),
                    },
                    other => other,
                })?;
                assignments.insert(index, scope.lower_expr(&ast)?);
            }
            transforms.push(Transform { name, assignments });
        }

        let mut agent_names = HashSet::new();
        let mut locality_names = HashSet::new();
        let mut transition_ids = HashSet::new();
        let mut agents = Vec::new();
        for raw in self.agents {
            if !agent_names.insert(raw.name.clone()) {
                return Err(Error::Malformed(format!("duplicate agent `{}`", raw.name)));
            }
            if raw.localities.is_empty() {
                return Err(Error::Malformed(format!("agent `{}` has no localities", raw.name)));
            }
            for l in &raw.localities {
                if !locality_names.insert(l.clone()) {
                    return Err(Error::Malformed(format!(
                        "locality `{l}` is declared more than once (locality sets must be disjoint)"
                    )));
                }
            }
            let locality = |name: &str| {
                raw.localities
                    .iter()
                    .position(|l| l == name)
                    .ok_or_else(|| Error::UnknownReference {
                        kind: "locality",
                        name: format!("{}.{name}", raw.name),
                    })
            };
            let mut transitions = Vec::new();
            for (k, t) in raw.transitions.iter().enumerate() {
                let id = t
                    .id
                    .clone()
                    .unwrap_or_else(|| format!("{}_t{}", raw.name, k + 1));
                if !transition_ids.insert(id.clone()) {
                    return Err(Error::Malformed(format!("duplicate transition id `{id}`")));
                }
                let [a, b] = t.interval;
                if a > b {
                    return Err(Error::Malformed(format!(
                        "transition `{id}` has interval [{a},{b}] with a > b"
                    )));
                }
                let transform = match &t.transform {
                    None => None,
                    Some(name) => Some(
                        transforms
                            .iter()
                            .position(|f| f.name == *name)
                            .ok_or_else(|| Error::UnknownReference {
                                kind: "transform",
                                name: name.clone(),
                            })?,
                    ),
                };
                transitions.push(Transition {
                    id,
                    from: locality(&t.from)?,
                    to: locality(&t.to)?,
                    transform,
                    interval: Interval { a, b },
                });
            }
            let agent = Agent {
                init_locality: locality(&raw.init_locality)?,
                name: raw.name,
                localities: raw.localities,
                transitions,
                reset_period: raw.reset_period,
                init_clock: raw.init_clock,
            };
            check_agent_structure(&agent)?;
            agents.push(agent);
        }
        if agents.is_empty() {
            return Err(Error::Malformed("model has no agents".into()));
        }
        Ok(Model {
            components,
            transforms,
            agents,
        })
    }
}

/// DAG shape: acyclic, the first locality is the unique source and the last
/// one the unique sink.
pub(crate) fn check_agent_structure(agent: &Agent) -> Result<()> {
    let name = &agent.name;
    if agent.reset_period == 0 {
        return Err(Error::Malformed(format!("agent `{name}` has reset period 0")));
    }
    let m = agent.localities.len();
    let mut indegree = vec![0usize; m];
    let mut outdegree = vec![0usize; m];
    for t in &agent.transitions {
        if t.from == t.to {
            return Err(Error::Malformed(format!(
                "agent `{name}`: transition `{}` is a self-loop",
                t.id
            )));
        }
        indegree[t.to] += 1;
        outdegree[t.from] += 1;
    }
    for (l, loc) in agent.localities.iter().enumerate() {
        if l != 0 && indegree[l] == 0 {
            return Err(Error::Malformed(format!(
                "agent `{name}`: locality `{loc}` has no incoming transition but is not the initial locality"
            )));
        }
        if l != m - 1 && outdegree[l] == 0 {
            return Err(Error::Malformed(format!(
                "agent `{name}`: locality `{loc}` has no outgoing transition but is not the final locality"
            )));
        }
    }
    if m > 1 && indegree[0] > 0 {
        return Err(Error::Malformed(format!(
            "agent `{name}`: initial locality `{}` has incoming transitions",
            agent.localities[0]
        )));
    }
    if m > 1 && outdegree[m - 1] > 0 {
        return Err(Error::Malformed(format!(
            "agent `{name}`: final locality `{}` has outgoing transitions",
            agent.localities[m - 1]
        )));
    }
    // Kahn's algorithm detects cycles.
    let mut remaining = indegree.clone();
    let mut queue: Vec<usize> = (0..m).filter(|&l| remaining[l] == 0).collect();
    let mut seen = 0;
    while let Some(l) = queue.pop() {
        seen += 1;
        for (_, t) in agent.post(l) {
            remaining[t.to] -= 1;
            if remaining[t.to] == 0 {
                queue.push(t.to);
            }
        }
    }
    if seen != m {
        return Err(Error::Malformed(format!(
            "agent `{name}`: locality graph has a cycle"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn agent_json(localities: &str, transitions: &str) -> String {
        format!(
            r#"{{"components": [{{"name": "y", "init": 0, "x": true}}],
                "agents": [{{"name": "A", "localities": {localities},
                    "transitions": {transitions}, "reset_period": 5,
                    "init_locality": "p", "init_clock": 0}}]}}"#
        )
    }

    #[test]
    fn parse_errors_have_positions() {
        let err = Model::from_json("").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }), "{err}");
        let err = Model::from_json("{\n  \"components\": [,]\n}").unwrap_err();
        let Error::Parse { span, .. } = err else {
            panic!("{err}")
        };
        assert_eq!(span.line, 2);
    }

    #[test]
    fn unknown_references() {
        let json = agent_json(
            r#"["p", "q"]"#,
            r#"[{"from": "p", "to": "q", "transform": "nope", "interval": [0, 1]}]"#,
        );
        assert!(matches!(
            Model::from_json(&json),
            Err(Error::UnknownReference { kind: "transform", .. })
        ));
        let json = agent_json(r#"["p", "q"]"#, r#"[{"from": "p", "to": "r", "interval": [0, 1]}]"#);
        assert!(matches!(
            Model::from_json(&json),
            Err(Error::UnknownReference { kind: "locality", .. })
        ));
    }

    #[test]
    fn structural_violations() {
        let cases = [
            (r#"["p", "q"]"#, r#"[{"from": "p", "to": "q", "interval": [3, 1]}]"#),
            (r#"["p", "q", "r"]"#, r#"[{"from": "p", "to": "r", "interval": [0, 1]}]"#),
            (r#"["p", "q"]"#, r#"[{"from": "q", "to": "p", "interval": [0, 1]}]"#),
            (
                r#"["p", "q", "r"]"#,
                r#"[{"from": "p", "to": "q", "interval": [0, 1]},
                    {"from": "q", "to": "r", "interval": [0, 1]},
                    {"from": "r", "to": "q", "interval": [0, 1]}]"#,
            ),
            (r#"["p", "p"]"#, r#"[]"#),
        ];
        for (locs, trans) in cases {
            let err = Model::from_json(&agent_json(locs, trans)).unwrap_err();
            assert!(matches!(err, Error::Malformed(_)), "{locs} {trans}: {err}");
        }
    }

    #[test]
    fn single_locality_agent_is_allowed() {
        let m = Model::from_json(&agent_json(r#"["p"]"#, "[]")).unwrap();
        assert!(m.agents[0].is_degenerate());
    }

    #[test]
    fn roundtrip_preserves_structure() {
        for m in super::super::fixtures::all() {
            let again = Model::from_json(&m.to_json()).unwrap();
            assert_eq!(again, m);
        }
    }
}
