//! Finitely supported vectors with exact rational coefficients.
//!
//! JSON form: an object mapping index strings to rational strings or numbers,
//! e.g. `{"2": "1/2", "3": -0.75}`. A direct-sum vector is a JSON array of
//! such objects, one per summand.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{format_rat, parse_rat, Rat};
use crate::schreier::FinSet;

/// Map from positive index to nonzero rational coefficient; the zero vector
/// is the empty map.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct FinVec {
    entries: BTreeMap<u32, Rat>,
}

impl FinVec {
    pub fn zero() -> Self {
        FinVec::default()
    }

    /// Build from (index, coefficient) pairs; zeros are dropped, duplicate
    /// indices and index 0 are rejected.
    pub fn from_entries<I: IntoIterator<Item = (u32, Rat)>>(pairs: I) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, coeff) in pairs {
            if idx == 0 {
                return Err(Error::Parse("vector indices start at 1".into()));
            }
            if coeff.is_zero() {
                continue;
            }
            if entries.insert(idx, coeff).is_some() {
                return Err(Error::Parse(format!("duplicate vector index {idx}")));
            }
        }
        Ok(FinVec { entries })
    }

    /// The unit vector `e_n`.
    pub fn unit(n: u32) -> Self {
        FinVec::from_entries([(n, Rat::from_integer(1.into()))]).expect("valid unit index")
    }

    pub fn coeff(&self, n: u32) -> Rat {
        self.entries.get(&n).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &Rat)> {
        self.entries.iter().map(|(k, v)| (*k, v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn support(&self) -> FinSet {
        FinSet::from_sorted(self.entries.keys().copied().collect()).expect("sorted support")
    }

    pub fn support_indices(&self) -> Vec<u32> {
        self.entries.keys().copied().collect()
    }

    pub fn min_support(&self) -> Option<u32> {
        self.entries.keys().next().copied()
    }

    pub fn max_support(&self) -> Option<u32> {
        self.entries.keys().next_back().copied()
    }

    pub fn add(&self, other: &FinVec) -> FinVec {
        let mut entries = self.entries.clone();
        for (idx, coeff) in &other.entries {
            let slot = entries.entry(*idx).or_default();
            *slot += coeff;
            if slot.is_zero() {
                entries.remove(idx);
            }
        }
        FinVec { entries }
    }

    pub fn sub(&self, other: &FinVec) -> FinVec {
        self.add(&other.scale(&Rat::from_integer((-1).into())))
    }

    pub fn scale(&self, c: &Rat) -> FinVec {
        if c.is_zero() {
            return FinVec::zero();
        }
        FinVec {
            entries: self
                .entries
                .iter()
                .map(|(idx, coeff)| (*idx, coeff * c))
                .collect(),
        }
    }

    pub fn abs(&self) -> FinVec {
        FinVec {
            entries: self
                .entries
                .iter()
                .map(|(idx, coeff)| (*idx, coeff.abs()))
                .collect(),
        }
    }

    /// Keep only the coordinates whose index lies in `set`.
    pub fn restrict(&self, set: &FinSet) -> FinVec {
        FinVec {
            entries: self
                .entries
                .iter()
                .filter(|(idx, _)| set.contains(**idx))
                .map(|(idx, coeff)| (*idx, coeff.clone()))
                .collect(),
        }
    }

    /// Keep coordinates with `lo <= index <= hi`.
    pub fn restrict_range(&self, lo: u32, hi: u32) -> FinVec {
        FinVec {
            entries: self
                .entries
                .range(lo..=hi)
                .map(|(idx, coeff)| (*idx, coeff.clone()))
                .collect(),
        }
    }

    pub fn dot(&self, other: &FinVec) -> Rat {
        let mut acc = Rat::zero();
        for (idx, coeff) in &self.entries {
            if let Some(c) = other.entries.get(idx) {
                acc += coeff * c;
            }
        }
        acc
    }

    /// Largest absolute coefficient (zero for the zero vector).
    pub fn sup_abs(&self) -> Rat {
        self.entries
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_default()
    }

    pub fn sum_abs(&self) -> Rat {
        self.entries.values().map(|c| c.abs()).sum()
    }
}

impl Serialize for FinVec {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = ser.serialize_map(Some(self.entries.len()))?;
        for (idx, coeff) in &self.entries {
            map.serialize_entry(&idx.to_string(), &format_rat(coeff))?;
        }
        map.end()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CoeffRepr {
    Text(String),
    Number(serde_json::Number),
}

impl<'de> Deserialize<'de> for FinVec {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = BTreeMap::<String, CoeffRepr>::deserialize(de)?;
        let mut pairs = Vec::with_capacity(raw.len());
        for (key, value) in raw {
            let idx: u32 = key
                .trim()
                .parse()
                .map_err(|_| D::Error::custom(format!("bad vector index {key:?}")))?;
            let coeff = match value {
                CoeffRepr::Text(s) => parse_rat(&s),
                CoeffRepr::Number(n) => parse_rat(&n.to_string()),
            }
            .map_err(D::Error::custom)?;
            pairs.push((idx, coeff));
        }
        FinVec::from_entries(pairs).map_err(D::Error::custom)
    }
}

/// One vector per summand of a weighted direct sum.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SumVec {
    pub components: Vec<FinVec>,
}

impl SumVec {
    pub fn new(components: Vec<FinVec>) -> Self {
        SumVec { components }
    }

    pub fn add(&self, other: &SumVec) -> SumVec {
        assert_eq!(self.components.len(), other.components.len());
        SumVec {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> SumVec {
        SumVec {
            components: self.components.iter().map(|v| v.scale(c)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(FinVec::is_zero)
    }
}

/// A flat vector or a direct-sum vector, matching the space it lives in.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AnyVec {
    Flat(FinVec),
    Sum(SumVec),
}

impl AnyVec {
    pub fn add(&self, other: &AnyVec) -> AnyVec {
        match (self, other) {
            (AnyVec::Flat(a), AnyVec::Flat(b)) => AnyVec::Flat(a.add(b)),
            (AnyVec::Sum(a), AnyVec::Sum(b)) => AnyVec::Sum(a.add(b)),
            _ => panic!("mismatched vector shapes"),
        }
    }

    pub fn scale(&self, c: &Rat) -> AnyVec {
        match self {
            AnyVec::Flat(v) => AnyVec::Flat(v.scale(c)),
            AnyVec::Sum(v) => AnyVec::Sum(v.scale(c)),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            AnyVec::Flat(v) => v.is_zero(),
            AnyVec::Sum(v) => v.is_zero(),
        }
    }

    pub fn as_flat(&self) -> Option<&FinVec> {
        match self {
            AnyVec::Flat(v) => Some(v),
            AnyVec::Sum(_) => None,
        }
    }
}
