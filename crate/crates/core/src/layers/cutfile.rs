//! Text form of cut lists: one `t; (l1,...,ln); (c1,...,cn)` per line.
//!
//! Blank lines and lines starting with `#` are ignored. Parentheses around
//! the vectors are optional.

use super::CutSpec;
use crate::error::{Error, Result};
use crate::model::Model;

pub fn write(m: &Model, cuts: &[CutSpec]) -> String {
    cuts.iter()
        .map(|c| format!("{}\n", c.display(m)))
        .collect()
}

fn vector(text: &str) -> Vec<&str> {
    let inner = text.trim();
    let inner = inner
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .unwrap_or(inner);
    inner.split(',').map(str::trim).collect()
}

pub fn parse(m: &Model, text: &str) -> Result<Vec<CutSpec>> {
    let mut out = Vec::new();
    let n = m.agents.len();
    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let err = |msg: String| Error::parse(line_no, 1, msg);
        let fields: Vec<&str> = trimmed.split(';').collect();
        let [t, locs, clocks] = fields.as_slice() else {
            return Err(err("expected `t; localities; clocks`".into()));
        };
        let t: u64 = t
            .trim()
            .parse()
            .map_err(|_| err(format!("bad time `{}`", t.trim())))?;
        let locs = vector(locs);
        let clocks = vector(clocks);
        if locs.len() != n || clocks.len() != n {
            return Err(err(format!("expected {n} localities and {n} clocks")));
        }
        let localities = locs
            .iter()
            .zip(&m.agents)
            .map(|(name, agent)| {
                agent.locality_index(name).ok_or_else(|| Error::UnknownReference {
                    kind: "locality",
                    name: format!("{}.{name}", agent.name),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let clocks = clocks
            .iter()
            .map(|c| c.parse::<u64>().map_err(|_| err(format!("bad clock `{c}`"))))
            .collect::<Result<Vec<_>>>()?;
        out.push(CutSpec {
            t,
            localities,
            clocks,
        });
    }
    Ok(out)
}
