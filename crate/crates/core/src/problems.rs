//! Source instances for the reductions: Hitting Set and X3C.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::election::Candidate;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProblemError {
    #[error("invalid element id `{0}`")]
    InvalidElement(String),
    #[error("duplicate element `{0}`")]
    DuplicateElement(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("set {0} is empty")]
    EmptySet(usize),
    #[error("the set family is empty")]
    NoSets,
    #[error("budget k = {k} must satisfy 1 <= k <= n = {n}")]
    Budget { k: u64, n: usize },
    #[error("universe size {0} is not a positive multiple of 3")]
    UniverseSize(usize),
    #[error("set {index} has {size} distinct elements, expected 3")]
    SetSize { index: usize, size: usize },
    #[error("k = {k} exceeds the number of sets {sets}")]
    TooFewSets { k: usize, sets: usize },
}

fn element_index(elements: &[String]) -> Result<HashMap<&str, usize>, ProblemError> {
    let mut index = HashMap::new();
    for (i, e) in elements.iter().enumerate() {
        Candidate::new(e.clone()).map_err(|_| ProblemError::InvalidElement(e.clone()))?;
        if index.insert(e.as_str(), i).is_some() {
            return Err(ProblemError::DuplicateElement(e.clone()));
        }
    }
    Ok(index)
}

/// Sorts and deduplicates each set; returns the number of dropped repeats.
fn canonical_sets(sets: &mut [Vec<usize>]) -> usize {
    let mut dropped = 0;
    for s in sets.iter_mut() {
        let before = s.len();
        s.sort_unstable();
        s.dedup();
        dropped += before - s.len();
    }
    dropped
}

fn resolve_sets(elements: &[String], sets: &[Vec<String>]) -> Result<Vec<Vec<usize>>, ProblemError> {
    let index = element_index(elements)?;
    sets.iter()
        .map(|s| {
            s.iter()
                .map(|e| index.get(e.as_str()).copied().ok_or_else(|| ProblemError::UnknownElement(e.clone())))
                .collect()
        })
        .collect()
}

fn write_family(f: &mut fmt::Formatter<'_>, elements: &[String], sets: &[Vec<usize>]) -> fmt::Result {
    write!(f, "B={{{}}} S={{", elements.join(","))?;
    for (i, s) in sets.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        let names: Vec<&str> = s.iter().map(|&e| elements[e].as_str()).collect();
        write!(f, "{{{}}}", names.join(","))?;
    }
    write!(f, "}}")
}

/// A Hitting Set instance: universe `B`, a family `S` of nonempty subsets
/// (repeats allowed), and a budget `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawHittingSet")]
pub struct HittingSetInstance {
    elements: Vec<String>,
    sets: Vec<Vec<usize>>,
    k: u64,
}

#[derive(Deserialize)]
struct RawHittingSet {
    elements: Vec<String>,
    sets: Vec<Vec<usize>>,
    k: u64,
}

impl TryFrom<RawHittingSet> for HittingSetInstance {
    type Error = ProblemError;
    fn try_from(raw: RawHittingSet) -> Result<Self, ProblemError> {
        HittingSetInstance::from_indices(raw.elements, raw.sets, raw.k)
    }
}

impl HittingSetInstance {
    pub fn new<S: AsRef<str>>(elements: &[S], sets: &[Vec<S>], k: u64) -> Result<Self, ProblemError> {
        let elements: Vec<String> = elements.iter().map(|e| e.as_ref().to_string()).collect();
        let sets: Vec<Vec<String>> = sets
            .iter()
            .map(|s| s.iter().map(|e| e.as_ref().to_string()).collect())
            .collect();
        let resolved = resolve_sets(&elements, &sets)?;
        Self::from_indices(elements, resolved, k)
    }

    /// Builds from element indices. Repeated elements inside a set collapse.
    pub fn from_indices(elements: Vec<String>, mut sets: Vec<Vec<usize>>, k: u64) -> Result<Self, ProblemError> {
        element_index(&elements)?;
        if sets.is_empty() {
            return Err(ProblemError::NoSets);
        }
        for (i, s) in sets.iter().enumerate() {
            if s.is_empty() {
                return Err(ProblemError::EmptySet(i));
            }
            if let Some(&bad) = s.iter().find(|&&e| e >= elements.len()) {
                return Err(ProblemError::UnknownElement(format!("#{bad}")));
            }
        }
        canonical_sets(&mut sets);
        let n = elements.len();
        if k == 0 || k > n as u64 {
            return Err(ProblemError::Budget { k, n });
        }
        Ok(HittingSetInstance { elements, sets, k })
    }

    /// Universe `b1 .. bn`.
    pub fn numbered(n: usize, sets: Vec<Vec<usize>>, k: u64) -> Result<Self, ProblemError> {
        Self::from_indices((1..=n).map(|i| format!("b{i}")).collect(), sets, k)
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn n(&self) -> usize {
        self.elements.len()
    }

    pub fn m(&self) -> usize {
        self.sets.len()
    }

    pub fn with_k(&self, k: u64) -> Result<Self, ProblemError> {
        Self::from_indices(self.elements.clone(), self.sets.clone(), k)
    }

    /// Whether `chosen` (element indices) intersects every set.
    pub fn hits_all(&self, chosen: &[usize]) -> bool {
        self.sets.iter().all(|s| s.iter().any(|e| chosen.contains(e)))
    }

    pub fn names(&self, chosen: &[usize]) -> Vec<String> {
        chosen.iter().map(|&e| self.elements[e].clone()).collect()
    }
}

impl fmt::Display for HittingSetInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_family(f, &self.elements, &self.sets)?;
        write!(f, " k={}", self.k)
    }
}

/// An Exact Cover by 3-Sets instance over a universe of `3k` elements.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawX3C")]
pub struct X3CInstance {
    elements: Vec<String>,
    sets: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
struct RawX3C {
    elements: Vec<String>,
    sets: Vec<Vec<usize>>,
}

impl TryFrom<RawX3C> for X3CInstance {
    type Error = ProblemError;
    fn try_from(raw: RawX3C) -> Result<Self, ProblemError> {
        X3CInstance::from_indices(raw.elements, raw.sets)
    }
}

impl X3CInstance {
    pub fn new<S: AsRef<str>>(elements: &[S], sets: &[Vec<S>]) -> Result<Self, ProblemError> {
        let elements: Vec<String> = elements.iter().map(|e| e.as_ref().to_string()).collect();
        let sets: Vec<Vec<String>> = sets
            .iter()
            .map(|s| s.iter().map(|e| e.as_ref().to_string()).collect())
            .collect();
        let resolved = resolve_sets(&elements, &sets)?;
        Self::from_indices(elements, resolved)
    }

    pub fn from_indices(elements: Vec<String>, mut sets: Vec<Vec<usize>>) -> Result<Self, ProblemError> {
        element_index(&elements)?;
        if elements.is_empty() || !elements.len().is_multiple_of(3) {
            return Err(ProblemError::UniverseSize(elements.len()));
        }
        for s in &sets {
            if let Some(&bad) = s.iter().find(|&&e| e >= elements.len()) {
                return Err(ProblemError::UnknownElement(format!("#{bad}")));
            }
        }
        canonical_sets(&mut sets);
        if let Some((index, s)) = sets.iter().enumerate().find(|(_, s)| s.len() != 3) {
            return Err(ProblemError::SetSize { index, size: s.len() });
        }
        let k = elements.len() / 3;
        if k > sets.len() {
            return Err(ProblemError::TooFewSets { k, sets: sets.len() });
        }
        Ok(X3CInstance { elements, sets })
    }

    /// Universe `b1 .. b(3k)`.
    pub fn numbered(k: usize, sets: Vec<Vec<usize>>) -> Result<Self, ProblemError> {
        Self::from_indices((1..=3 * k).map(|i| format!("b{i}")).collect(), sets)
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn k(&self) -> usize {
        self.elements.len() / 3
    }

    /// Elements that appear in no set.
    pub fn uncovered(&self) -> Vec<usize> {
        (0..self.elements.len())
            .filter(|e| !self.sets.iter().any(|s| s.contains(e)))
            .collect()
    }

    /// Whether the chosen sets (by index) are pairwise disjoint and cover `B`.
    pub fn is_exact_cover(&self, chosen: &[usize]) -> bool {
        let mut seen = vec![false; self.elements.len()];
        for &i in chosen {
            for &e in &self.sets[i] {
                if std::mem::replace(&mut seen[e], true) {
                    return false;
                }
            }
        }
        seen.into_iter().all(|x| x)
    }
}

impl fmt::Display for X3CInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_family(f, &self.elements, &self.sets)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hitting_set_validation() {
        let hs = HittingSetInstance::new(&["b1", "b2"], &[vec!["b1", "b1"], vec!["b2", "b1"]], 1).unwrap();
        assert_eq!(hs.sets(), &[vec![0], vec![0, 1]]);
        assert_eq!(hs.to_string(), "B={b1,b2} S={{b1},{b1,b2}} k=1");
        assert_eq!(
            HittingSetInstance::new(&["b1"], &[vec!["b9"]], 1),
            Err(ProblemError::UnknownElement("b9".into()))
        );
        assert_eq!(HittingSetInstance::new::<&str>(&["b1"], &[], 1), Err(ProblemError::NoSets));
        assert_eq!(HittingSetInstance::new(&["b1"], &[vec![]], 1), Err(ProblemError::EmptySet(0)));
        assert_eq!(
            HittingSetInstance::new(&["b1"], &[vec!["b1"]], 2),
            Err(ProblemError::Budget { k: 2, n: 1 })
        );
        assert!(HittingSetInstance::new(&["b1", "b1"], &[vec!["b1"]], 1).is_err());
    }

    #[test]
    fn x3c_validation() {
        assert!(X3CInstance::new(&["a", "b", "c"], &[vec!["a", "b", "c"]]).is_ok());
        assert_eq!(
            X3CInstance::new(&["a", "b", "c"], &[vec!["a", "b"]]),
            Err(ProblemError::SetSize { index: 0, size: 2 })
        );
        assert_eq!(X3CInstance::new(&["a", "b"], &[vec!["a", "b"]]), Err(ProblemError::UniverseSize(2)));
        let x = X3CInstance::numbered(2, vec![vec![0, 1, 2], vec![1, 2, 3], vec![0, 1, 3]]).unwrap();
        assert_eq!(x.uncovered(), vec![4, 5]);
        assert!(!x.is_exact_cover(&[0, 1]));
    }

    #[test]
    fn serde_round_trip_validates() {
        let hs = HittingSetInstance::numbered(3, vec![vec![2, 0]], 1).unwrap();
        let json = serde_json::to_string(&hs).unwrap();
        assert_eq!(serde_json::from_str::<HittingSetInstance>(&json).unwrap(), hs);
        assert!(serde_json::from_str::<HittingSetInstance>(r#"{"elements":["b1"],"sets":[],"k":1}"#).is_err());
    }
}
