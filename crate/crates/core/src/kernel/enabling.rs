use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Prob;

use super::matrix::Kernel;

/// Allowed output states per input state.
///
/// Every input must have a non-empty allowed set (totality) and every output
/// must be allowed for some input (coverage).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnablingMap {
    input: Vec<String>,
    output: Vec<String>,
    allowed: BTreeMap<String, BTreeSet<String>>,
}

impl EnablingMap {
    pub fn new(input: Vec<String>, output: Vec<String>, allowed: BTreeMap<String, BTreeSet<String>>) -> Result<Self> {
        let out: BTreeSet<&String> = output.iter().collect();
        for x in &input {
            let set = allowed
                .get(x)
                .filter(|s| !s.is_empty())
                .ok_or_else(|| Error::Precondition(format!("enabling map is not total at {x}")))?;
            if let Some(y) = set.iter().find(|y| !out.contains(y)) {
                return Err(Error::SpaceMismatch(format!(
                    "{x} enables {y}, which is outside the output space"
                )));
            }
        }
        if let Some(extra) = allowed.keys().find(|k| !input.contains(k)) {
            return Err(Error::SpaceMismatch(format!("{extra} is not an input state")));
        }
        let covered: BTreeSet<&String> = allowed.values().flatten().collect();
        if let Some(y) = output.iter().find(|y| !covered.contains(y)) {
            return Err(Error::Precondition(format!(
                "enabling map does not cover output state {y}"
            )));
        }
        Ok(Self { input, output, allowed })
    }

    /// Every input may reach every output.
    pub fn full(input: Vec<String>, output: Vec<String>) -> Result<Self> {
        let all: BTreeSet<String> = output.iter().cloned().collect();
        let allowed = input.iter().map(|x| (x.clone(), all.clone())).collect();
        Self::new(input, output, allowed)
    }

    /// Allowed set `{f(x)}` for a surjective function `f`.
    pub fn from_function(input: Vec<String>, output: Vec<String>, f: &BTreeMap<String, String>) -> Result<Self> {
        let allowed = input
            .iter()
            .map(|x| {
                let y = f.get(x).ok_or_else(|| Error::PartialFunction(x.clone()))?;
                Ok((x.clone(), BTreeSet::from([y.clone()])))
            })
            .collect::<Result<_>>()?;
        Self::new(input, output, allowed)
    }

    pub fn input_space(&self) -> &[String] {
        &self.input
    }

    pub fn output_space(&self) -> &[String] {
        &self.output
    }

    pub fn allowed(&self, x: &str) -> Option<&BTreeSet<String>> {
        self.allowed.get(x)
    }

    pub fn allows(&self, x: &str, y: &str) -> bool {
        self.allowed.get(x).is_some_and(|s| s.contains(y))
    }

    pub fn is_full(&self) -> bool {
        self.allowed.values().all(|s| s.len() == self.output.len())
    }

    /// Allowed sets pushed through the middle space:
    /// `x ↦ ⋃ { next(m) : m ∈ self(x) }`.
    pub fn compose(&self, next: &EnablingMap) -> Result<EnablingMap> {
        if self.output != next.input {
            return Err(Error::SpaceMismatch(
                "enabling maps do not share the middle space".into(),
            ));
        }
        let allowed = self
            .allowed
            .iter()
            .map(|(x, mids)| {
                let set = mids.iter().flat_map(|m| next.allowed[m].iter().cloned()).collect();
                (x.clone(), set)
            })
            .collect();
        EnablingMap::new(self.input.clone(), next.output.clone(), allowed)
    }
}

/// Outcome of an enabling check, with the first violating `(input, output)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnablingCheck {
    pub holds: bool,
    pub violation: Option<(String, String)>,
}

impl From<EnablingCheck> for bool {
    fn from(c: EnablingCheck) -> bool {
        c.holds
    }
}

/// Whether every row's support lies inside the allowed set.
pub fn validate_enabling<T: Prob>(k: &Kernel<T>, e: &EnablingMap) -> Result<EnablingCheck> {
    if k.input_space() != e.input_space() || k.output_space() != e.output_space() {
        return Err(Error::SpaceMismatch("kernel and enabling map spaces differ".into()));
    }
    for (i, x) in k.input_space().iter().enumerate() {
        if let Some(j) = k.support(i).find(|&j| !e.allows(x, &k.output_space()[j])) {
            return Ok(EnablingCheck {
                holds: false,
                violation: Some((x.clone(), k.output_space()[j].clone())),
            });
        }
    }
    Ok(EnablingCheck {
        holds: true,
        violation: None,
    })
}
