//! JSON instance documents.
//!
//! Pooling: `{"kind":"pooling","space":{"labels":[...]},"P":[...],"Q":[[...],...]}`
//! where `P` may also be a list of vectors when a command accepts a set.
//!
//! Random utility: `{"kind":"rum","alternatives":[...],"choice":{"y|a,b":"p",...}}`
//! with one entry for every alternative of every nonempty menu.

use std::collections::BTreeMap;

use num_traits::{One, Signed};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::exactnum::{format_rational, serde_rational::from_json, Exact, Rational};
use crate::measures::{CredalSet, PointSpace, ProbVector};
use crate::pooling::PoolingInstance;
use crate::rum::{PairIndex, RumInstance};

#[derive(Debug, Clone, PartialEq)]
pub struct PoolingDocument {
    pub space: PointSpace,
    pub p_set: CredalSet,
    pub q_set: CredalSet,
}

impl PoolingDocument {
    /// The document as a single-planner instance.
    pub fn instance(&self) -> Result<PoolingInstance> {
        if self.p_set.len() != 1 {
            return Err(Error::input(format!(
                "this command needs a single planner vector P, found {}",
                self.p_set.len()
            )));
        }
        PoolingInstance::new(self.space.clone(), self.p_set.members()[0].clone(), self.q_set.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Pooling(PoolingDocument),
    Rum(RumInstance),
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::input(format!("not valid JSON: {e}")))?;
    let obj = doc
        .as_object()
        .ok_or_else(|| Error::input("instance document must be a JSON object"))?;
    match obj.get("kind").and_then(Value::as_str) {
        Some("pooling") => parse_pooling(obj).map(Instance::Pooling),
        Some("rum") => parse_rum(obj).map(Instance::Rum),
        Some(other) => Err(Error::input(format!("unknown instance kind {other:?}"))),
        None => Err(Error::input("missing string field \"kind\" (\"pooling\" or \"rum\")")),
    }
}

fn finish<T>(errors: Vec<String>, value: Option<T>) -> Result<T> {
    match value {
        Some(v) if errors.is_empty() => Ok(v),
        _ => Err(Error::InvalidInput(errors.join("; "))),
    }
}

fn prob_vector(v: &Value, loc: &str, errors: &mut Vec<String>) -> Option<ProbVector> {
    let Some(items) = v.as_array() else {
        errors.push(format!("{loc}: expected an array of probabilities"));
        return None;
    };
    let mut weights = Vec::with_capacity(items.len());
    let mut ok = true;
    for (i, item) in items.iter().enumerate() {
        match from_json(item) {
            Ok(r) => weights.push(r),
            Err(e) => {
                errors.push(format!("{loc}[{i}]: {e}"));
                ok = false;
            }
        }
    }
    if !ok {
        return None;
    }
    match ProbVector::new(weights) {
        Ok(p) => Some(p),
        Err(e) => {
            errors.push(format!("{loc}: {e}"));
            None
        }
    }
}

fn vector_list(v: &Value, loc: &str, errors: &mut Vec<String>) -> Option<Vec<ProbVector>> {
    let Some(rows) = v.as_array() else {
        errors.push(format!("{loc}: expected an array of probability vectors"));
        return None;
    };
    if rows.is_empty() {
        errors.push(format!("{loc}: needs at least one vector"));
        return None;
    }
    let parsed: Vec<Option<ProbVector>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| prob_vector(r, &format!("{loc}[{i}]"), errors))
        .collect();
    parsed.into_iter().collect()
}

fn check_len(p: &ProbVector, n: usize, loc: &str, errors: &mut Vec<String>) {
    if p.len() != n {
        errors.push(format!("{loc}: has {} entries but the space has {n} points", p.len()));
    }
}

fn parse_pooling(obj: &Map<String, Value>) -> Result<PoolingDocument> {
    let mut errors = Vec::new();
    let p_set = match obj.get("P") {
        None => {
            errors.push("missing field \"P\"".to_string());
            None
        }
        Some(v) if v.as_array().is_some_and(|a| a.iter().all(Value::is_array) && !a.is_empty()) => {
            vector_list(v, "P", &mut errors)
        }
        Some(v) => prob_vector(v, "P", &mut errors).map(|p| vec![p]),
    };
    let q_set = match obj.get("Q") {
        None => {
            errors.push("missing field \"Q\"".to_string());
            None
        }
        Some(v) => vector_list(v, "Q", &mut errors),
    };
    let dim = p_set
        .as_ref()
        .and_then(|p| p.first().map(ProbVector::len))
        .or_else(|| q_set.as_ref().and_then(|q| q.first().map(ProbVector::len)));
    let space = match (obj.get("space"), dim) {
        (Some(s), _) => match serde_json::from_value::<PointSpace>(s.clone()) {
            Ok(space) => Some(space),
            Err(e) => {
                errors.push(format!("space: {e}"));
                None
            }
        },
        (None, Some(n)) => PointSpace::numbered(n).ok(),
        (None, None) => None,
    };
    if let Some(space) = &space {
        let n = space.len();
        for (name, set) in [("P", &p_set), ("Q", &q_set)] {
            for (i, p) in set.iter().flatten().enumerate() {
                check_len(p, n, &format!("{name}[{i}]"), &mut errors);
            }
        }
    }
    let value = match (space, p_set, q_set) {
        (Some(space), Some(p), Some(q)) if errors.is_empty() => Some(PoolingDocument {
            space,
            p_set: CredalSet::new(p)?,
            q_set: CredalSet::new(q)?,
        }),
        _ => None,
    };
    finish(errors, value)
}

fn parse_rum(obj: &Map<String, Value>) -> Result<RumInstance> {
    let mut errors = Vec::new();
    let alternatives: Vec<String> = match obj.get("alternatives").and_then(Value::as_array) {
        Some(items) => items
            .iter()
            .enumerate()
            .filter_map(|(i, v)| match v.as_str() {
                Some(s) => Some(s.to_string()),
                None => {
                    errors.push(format!("alternatives[{i}]: expected a string"));
                    None
                }
            })
            .collect(),
        None => return Err(Error::input("missing array field \"alternatives\"")),
    };
    for (i, a) in alternatives.iter().enumerate() {
        if alternatives[..i].contains(a) {
            errors.push(format!("alternatives: duplicate label {a:?}"));
        }
        if a.contains([',', '|']) || a.trim() != a || a.is_empty() {
            errors.push(format!("alternatives: label {a:?} must be nonempty without ',', '|' or surrounding spaces"));
        }
    }
    if !errors.is_empty() {
        return Err(Error::InvalidInput(errors.join("; ")));
    }
    let index = PairIndex::new(alternatives.len())?;
    let Some(choice) = obj.get("choice").and_then(Value::as_object) else {
        return Err(Error::input("missing object field \"choice\""));
    };
    let position = |label: &str| alternatives.iter().position(|a| a == label.trim());
    let mut table: BTreeMap<(usize, u32), Rational> = BTreeMap::new();
    for (key, value) in choice {
        let Some((y, menu)) = key.split_once('|') else {
            errors.push(format!("choice[{key:?}]: keys have the form \"y|a,b,c\""));
            continue;
        };
        let Some(yi) = position(y) else {
            errors.push(format!("choice[{key:?}]: unknown alternative {:?}", y.trim()));
            continue;
        };
        let mut mask = 0u32;
        let mut bad = false;
        for m in menu.split(',') {
            match position(m) {
                Some(i) => mask |= 1 << i,
                None => {
                    errors.push(format!("choice[{key:?}]: unknown alternative {:?} in menu", m.trim()));
                    bad = true;
                }
            }
        }
        if bad {
            continue;
        }
        if mask & (1 << yi) == 0 {
            errors.push(format!("choice[{key:?}]: {:?} is not in its menu", y.trim()));
            continue;
        }
        match from_json(value) {
            Ok(p) => {
                if table.insert((yi, mask), p).is_some() {
                    errors.push(format!("choice[{key:?}]: pair listed more than once"));
                }
            }
            Err(e) => errors.push(format!("choice[{key:?}]: {e}")),
        }
    }
    let label = |y: usize, m: u32| {
        let menu: Vec<&str> = (0..alternatives.len())
            .filter(|a| m & (1 << a) != 0)
            .map(|a| alternatives[a].as_str())
            .collect();
        format!("{}|{}", alternatives[y], menu.join(","))
    };
    let missing: Vec<String> = index
        .pairs()
        .iter()
        .filter(|p| !table.contains_key(p))
        .map(|&(y, m)| label(y, m))
        .collect();
    if !missing.is_empty() {
        errors.push(format!("missing choice probabilities for {}", missing.join(" ")));
    }
    for (k, &m) in index.menus().iter().enumerate() {
        let rows = index.menu_rows(k);
        let entries: Vec<&Rational> = index.pairs()[rows].iter().filter_map(|p| table.get(p)).collect();
        for &(y, mm) in index.pairs()[index.menu_rows(k)].iter() {
            if table.get(&(y, mm)).is_some_and(|p| p.is_negative()) {
                errors.push(format!("choice[{:?}]: negative probability", label(y, mm)));
            }
        }
        if entries.len() == m.count_ones() as usize {
            let total: Rational = entries.into_iter().sum();
            if !total.is_one() {
                let menu = label(0, m);
                let menu = menu.split_once('|').map(|(_, r)| r).unwrap_or_default().to_string();
                errors.push(format!("menu {{{menu}}}: choice probabilities sum to {}, not 1", Exact(&total)));
            }
        }
    }
    if !errors.is_empty() {
        return Err(Error::InvalidInput(errors.join("; ")));
    }
    RumInstance::from_table(alternatives, &table)
}

/// Inverse of [`parse_instance`] for random utility instances.
pub fn rum_to_json(inst: &RumInstance) -> Value {
    let choice: Map<String, Value> = (0..inst.index().len())
        .map(|i| (inst.pair_label(i), Value::String(format_rational(&inst.choice()[i]))))
        .collect();
    json!({
        "kind": "rum",
        "alternatives": inst.alternatives(),
        "choice": choice,
    })
}

/// Inverse of [`parse_instance`] for pooling documents.
pub fn pooling_to_json(doc: &PoolingDocument) -> Value {
    let p = if doc.p_set.len() == 1 {
        serde_json::to_value(&doc.p_set.members()[0])
    } else {
        serde_json::to_value(&doc.p_set)
    }
    .expect("probability vectors serialize");
    json!({
        "kind": "pooling",
        "space": doc.space,
        "P": p,
        "Q": doc.q_set,
    })
}
