use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub(crate) fn is_token(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

pub(crate) fn is_variable(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_uppercase() || c == '_')
}

/// A predicate applied to constants.
///
/// The derived ordering compares the predicate first and then the argument
/// tuple, both byte-wise. This is the canonical order used everywhere.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundAtom {
    predicate: String,
    args: Vec<String>,
}

impl GroundAtom {
    pub fn new<P, I, A>(predicate: P, args: I) -> Result<Self>
    where
        P: Into<String>,
        I: IntoIterator<Item = A>,
        A: Into<String>,
    {
        let predicate = predicate.into();
        let args: Vec<String> = args.into_iter().map(Into::into).collect();
        if !is_token(&predicate) {
            return Err(Error::InvalidParameter(format!(
                "predicate {predicate:?} is not a token"
            )));
        }
        if let Some(bad) = args.iter().find(|a| !is_token(a)) {
            return Err(Error::InvalidParameter(format!(
                "argument {bad:?} of {predicate} is not a token"
            )));
        }
        Ok(Self { predicate, args })
    }

    pub fn predicate(&self) -> &str {
        &self.predicate
    }

    pub fn args(&self) -> &[String] {
        &self.args
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.predicate, self.args.join(","))
    }
}

impl FromStr for GroundAtom {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (pred, rest) = match s.find('(') {
            Some(i) => (&s[..i], &s[i..]),
            None => (s, "()"),
        };
        let inner = rest
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::InvalidParameter(format!("malformed atom {s:?}")))?;
        let args: Vec<&str> = if inner.trim().is_empty() {
            Vec::new()
        } else {
            inner.split(',').map(str::trim).collect()
        };
        GroundAtom::new(pred.trim(), args)
    }
}

impl Serialize for GroundAtom {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GroundAtom {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Argument position of a rule atom.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Const(String),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Const(c) => f.write_str(c),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AtomPattern {
    pub predicate: String,
    pub terms: Vec<Term>,
}

impl AtomPattern {
    pub fn new(predicate: impl Into<String>, terms: Vec<Term>) -> Self {
        Self {
            predicate: predicate.into(),
            terms,
        }
    }

    fn variables(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().filter_map(|t| match t {
            Term::Var(v) => Some(v.as_str()),
            Term::Const(_) => None,
        })
    }

    /// Instantiates the pattern under a binding that covers all its variables.
    pub(crate) fn ground(&self, binding: &[(&str, &str)]) -> GroundAtom {
        let args = self
            .terms
            .iter()
            .map(|t| match t {
                Term::Const(c) => c.clone(),
                Term::Var(v) => binding
                    .iter()
                    .find(|(name, _)| name == v)
                    .map(|(_, c)| (*c).to_owned())
                    .expect("range-restricted rule binds every head variable"),
            })
            .collect();
        GroundAtom {
            predicate: self.predicate.clone(),
            args,
        }
    }
}

impl fmt::Display for AtomPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.predicate)?;
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str(")")
    }
}

/// A range-restricted Horn rule `head :- body_1, ..., body_m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    head: AtomPattern,
    body: Vec<AtomPattern>,
}

impl Rule {
    pub fn new(head: AtomPattern, body: Vec<AtomPattern>) -> Result<Self> {
        if body.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "rule for {} has an empty body",
                head.predicate
            )));
        }
        if let Some(v) = head
            .variables()
            .find(|v| !body.iter().any(|b| b.variables().any(|w| w == *v)))
        {
            return Err(Error::RangeRestriction {
                line: 0,
                var: v.to_owned(),
            });
        }
        Ok(Self { head, body })
    }

    pub fn head(&self) -> &AtomPattern {
        &self.head
    }

    pub fn body(&self) -> &[AtomPattern] {
        &self.body
    }

    pub(crate) fn constants(&self) -> impl Iterator<Item = &str> {
        std::iter::once(&self.head)
            .chain(self.body.iter())
            .flat_map(|p| p.terms.iter())
            .filter_map(|t| match t {
                Term::Const(c) => Some(c.as_str()),
                Term::Var(_) => None,
            })
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} :- ", self.head)?;
        for (i, b) in self.body.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{b}")?;
        }
        f.write_str(".")
    }
}

/// A finite stored state set. Iteration follows the canonical order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct KnowledgeBase {
    atoms: BTreeSet<GroundAtom>,
}

impl KnowledgeBase {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn atoms(&self) -> &BTreeSet<GroundAtom> {
        &self.atoms
    }

    pub fn into_atoms(self) -> BTreeSet<GroundAtom> {
        self.atoms
    }

    pub fn insert(&mut self, atom: GroundAtom) -> bool {
        self.atoms.insert(atom)
    }

    pub fn contains(&self, atom: &GroundAtom) -> bool {
        self.atoms.contains(atom)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &GroundAtom> {
        self.atoms.iter()
    }

    /// Constants occurring in the stored atoms.
    pub fn domain(&self) -> BTreeSet<String> {
        self.atoms.iter().flat_map(|a| a.args.iter().cloned()).collect()
    }

    /// Canonical labels (`Pred(a,b)`), in canonical order.
    pub fn labels(&self) -> Vec<String> {
        self.atoms.iter().map(ToString::to_string).collect()
    }

    /// Canonical text form: one fact per line, sorted.
    pub fn to_canonical_string(&self) -> String {
        let mut out = String::new();
        for a in &self.atoms {
            out.push_str(&a.to_string());
            out.push_str(".\n");
        }
        out
    }
}

impl FromIterator<GroundAtom> for KnowledgeBase {
    fn from_iter<T: IntoIterator<Item = GroundAtom>>(iter: T) -> Self {
        Self {
            atoms: iter.into_iter().collect(),
        }
    }
}

impl From<BTreeSet<GroundAtom>> for KnowledgeBase {
    fn from(atoms: BTreeSet<GroundAtom>) -> Self {
        Self { atoms }
    }
}

impl<'a> IntoIterator for &'a KnowledgeBase {
    type Item = &'a GroundAtom;
    type IntoIter = std::collections::btree_set::Iter<'a, GroundAtom>;

    fn into_iter(self) -> Self::IntoIter {
        self.atoms.iter()
    }
}

/// Signature `predicate -> arity` collected from atoms and rules.
pub(crate) fn signature<'a>(
    atoms: impl IntoIterator<Item = &'a GroundAtom>,
    rules: &'a [Rule],
) -> BTreeMap<&'a str, BTreeSet<usize>> {
    let mut sig: BTreeMap<&str, BTreeSet<usize>> = BTreeMap::new();
    for a in atoms {
        sig.entry(a.predicate()).or_default().insert(a.arity());
    }
    for r in rules {
        for p in std::iter::once(&r.head).chain(r.body.iter()) {
            sig.entry(p.predicate.as_str()).or_default().insert(p.terms.len());
        }
    }
    sig
}
