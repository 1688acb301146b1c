//! Text description of a repair history for the `flowgraph` command.
//!
//! ```text
//! # comments start with '#'
//! n 4
//! k 2
//! d 2              # default k
//! r 2
//! alpha 3          # optional; default 2d+r-1, beta1 2, beta2 1
//! beta1 2
//! beta2 1/2
//! rule most-recent # or lowest; used for newcomers without explicit helpers
//! stage 1 3        # failed nodes of the next repair stage
//! helpers 1: 2 4   # helpers of newcomer 1 in the latest stage
//! dc 1 3           # optional collector
//! ```
//!
//! Node lists may be separated by spaces or commas.

use std::collections::BTreeMap;

use mbcr_core::bounds::Rational;
use mbcr_core::flowgraph::{FlowParams, HelperRule, RepairHistory};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone)]
pub struct FlowSpec {
    pub params: FlowParams,
    pub history: RepairHistory,
    pub dc: Option<Vec<usize>>,
}

fn err<T>(line: usize, msg: impl std::fmt::Display) -> CliResult<T> {
    Err(CliError::Usage(format!("line {line}: {msg}")))
}

pub fn parse_nodes(text: &str) -> Result<Vec<usize>, String> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<usize>().map_err(|_| format!("'{s}' is not a node index")))
        .collect()
}

fn parse_rational(text: &str) -> Result<Rational, String> {
    let bad = || format!("'{text}' is not a non-negative rational");
    let value = match text.split_once('/') {
        Some((a, b)) => {
            let a: i64 = a.trim().parse().map_err(|_| bad())?;
            let b: i64 = b.trim().parse().map_err(|_| bad())?;
            if b == 0 {
                return Err(bad());
            }
            Rational::new(a.into(), b.into())
        }
        None => Rational::from_integer(text.parse::<i64>().map_err(|_| bad())?.into()),
    };
    if value < Rational::from_integer(0.into()) {
        return Err(bad());
    }
    Ok(value)
}

pub fn parse(text: &str) -> CliResult<FlowSpec> {
    let mut scalars: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    let mut caps: BTreeMap<&str, Rational> = BTreeMap::new();
    let mut rule = HelperRule::MostRecentFirst;
    let mut stages: Vec<Vec<usize>> = Vec::new();
    let mut explicit: Vec<BTreeMap<usize, Vec<usize>>> = Vec::new();
    let mut dc = None;

    for (no, raw) in text.lines().enumerate() {
        let line = no + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, rest) = content.split_once(char::is_whitespace).unwrap_or((content, ""));
        let rest = rest.trim();
        match key {
            "n" | "k" | "d" | "r" => {
                let v: usize = match rest.parse() {
                    Ok(v) => v,
                    Err(_) => return err(line, format!("'{rest}' is not a count")),
                };
                if scalars.insert(key, (v, line)).is_some() {
                    return err(line, format!("'{key}' given twice"));
                }
            }
            "alpha" | "beta1" | "beta2" => match parse_rational(rest) {
                Ok(v) => {
                    caps.insert(key, v);
                }
                Err(e) => return err(line, e),
            },
            "rule" => {
                rule = match rest {
                    "most-recent" => HelperRule::MostRecentFirst,
                    "lowest" => HelperRule::LowestIndex,
                    other => return err(line, format!("unknown helper rule '{other}'")),
                }
            }
            "stage" => match parse_nodes(rest) {
                Ok(v) if !v.is_empty() => {
                    stages.push(v);
                    explicit.push(BTreeMap::new());
                }
                Ok(_) => return err(line, "stage lists no nodes"),
                Err(e) => return err(line, e),
            },
            "helpers" => {
                let Some((who, list)) = rest.split_once(':') else {
                    return err(line, "expected 'helpers <newcomer>: <nodes>'");
                };
                let Some(current) = explicit.last_mut() else {
                    return err(line, "'helpers' before any 'stage'");
                };
                let who: usize = match who.trim().parse() {
                    Ok(v) => v,
                    Err(_) => return err(line, format!("'{}' is not a node index", who.trim())),
                };
                if !stages.last().is_some_and(|s| s.contains(&who)) {
                    return err(line, format!("node {who} did not fail in this stage"));
                }
                match parse_nodes(list) {
                    Ok(v) => {
                        current.insert(who, v);
                    }
                    Err(e) => return err(line, e),
                }
            }
            "dc" => match parse_nodes(rest) {
                Ok(v) => dc = Some(v),
                Err(e) => return err(line, e),
            },
            other => return err(line, format!("unknown directive '{other}'")),
        }
    }

    let get = |key: &str| scalars.get(key).map(|&(v, _)| v);
    let missing = |key: &str| CliError::Usage(format!("spec does not set '{key}'"));
    let n = get("n").ok_or_else(|| missing("n"))?;
    let k = get("k").ok_or_else(|| missing("k"))?;
    let r = get("r").ok_or_else(|| missing("r"))?;
    let d = get("d").unwrap_or(k);
    if k == 0 || r == 0 || d + r > n {
        return Err(CliError::Usage(format!(
            "need k, r >= 1 and d + r <= n, got n = {n}, k = {k}, d = {d}, r = {r}"
        )));
    }
    let mut params = FlowParams::mbcr_unit(n, k, d, r);
    if let Some(v) = caps.remove("alpha") {
        params.alpha = v;
    }
    if let Some(v) = caps.remove("beta1") {
        params.beta1 = v;
    }
    if let Some(v) = caps.remove("beta2") {
        params.beta2 = v;
    }

    let mut history = RepairHistory::from_rule(n, d, &stages, rule)?;
    for (stage, chosen) in history.stages.iter_mut().zip(explicit) {
        stage.helpers.extend(chosen);
    }
    Ok(FlowSpec { params, history, dc })
}
