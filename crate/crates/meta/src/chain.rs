//! Child solver chains: `solver-a[k=v,k2=v2]>solver-b[...]`.
//!
//! The first link configures the children a decomposing solver spawns; the
//! remainder becomes those children's own `childSolver` setting.

use std::collections::BTreeMap;

use crate::solver::ChildSolver;

#[derive(Debug, Clone, PartialEq)]
pub struct ChainLink {
    pub solver_id: String,
    pub settings: BTreeMap<String, serde_json::Value>,
}

/// Splits off the first link. Returns `None` for an empty chain.
pub fn parse_head(chain: &str) -> Result<Option<(ChainLink, Option<String>)>, String> {
    let chain = chain.trim();
    if chain.is_empty() {
        return Ok(None);
    }
    let mut depth = 0i32;
    let mut split = None;
    for (i, c) in chain.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth -= 1,
            '>' if depth == 0 => {
                split = Some(i);
                break;
            }
            _ => {}
        }
        if !(0..=1).contains(&depth) {
            return Err(format!("unbalanced brackets in '{chain}'"));
        }
    }
    let (head, rest) = match split {
        Some(i) => (&chain[..i], Some(chain[i + 1..].trim().to_string())),
        None => (chain, None),
    };
    if rest.as_deref() == Some("") {
        return Err("chain ends with '>'".into());
    }
    Ok(Some((parse_link(head)?, rest)))
}

/// Validates every link of a chain and returns the solver ids in order.
pub fn solver_ids(chain: &str) -> Result<Vec<String>, String> {
    let mut ids = Vec::new();
    let mut rest = Some(chain.to_string());
    while let Some(text) = rest {
        match parse_head(&text)? {
            Some((link, tail)) => {
                ids.push(link.solver_id);
                rest = tail;
            }
            None => break,
        }
    }
    Ok(ids)
}

/// Child configuration from a `childSolver` setting.
pub fn child_solver(chain: &str, seed_offset: i64) -> Result<Option<ChildSolver>, String> {
    Ok(parse_head(chain)?.map(|(link, rest)| ChildSolver {
        solver_id: link.solver_id,
        settings: link.settings,
        chain: rest,
        seed_offset,
    }))
}

fn parse_link(text: &str) -> Result<ChainLink, String> {
    let text = text.trim();
    let (id, body) = match text.find('[') {
        Some(open) => {
            let body = text[open + 1..].strip_suffix(']').ok_or_else(|| format!("'{text}' must end with ']'"))?;
            (text[..open].trim(), Some(body))
        }
        None => (text, None),
    };
    if id.is_empty() || id.contains(|c: char| c.is_whitespace() || c == ']') {
        return Err(format!("invalid solver id in '{text}'"));
    }
    let mut settings = BTreeMap::new();
    for pair in body.into_iter().flat_map(|b| b.split(',')).map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = pair.split_once('=').ok_or_else(|| format!("setting '{pair}' is not key=value"))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(format!("empty setting name in '{pair}'"));
        }
        settings.insert(k.to_string(), literal(v));
    }
    Ok(ChainLink { solver_id: id.to_string(), settings })
}

fn literal(v: &str) -> serde_json::Value {
    if let Ok(i) = v.parse::<i64>() {
        return i.into();
    }
    match v.parse::<f64>() {
        Ok(f) if f.is_finite() => f.into(),
        _ => v.into(),
    }
}
