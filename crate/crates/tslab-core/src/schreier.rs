//! The Schreier families `S_xi` and their structural operations.
//!
//! `S_0` holds the empty set and singletons; `S_1` holds the `F` with
//! `#F <= min F`; a successor family `S_(zeta+1)` holds unions of at most
//! `min F` consecutive blocks from `S_zeta`; a limit family unions the
//! `{F in S_(zeta_n) : n <= min F}` along the fixed fundamental sequence of
//! the ordinal module. The `w1` sentinel names the family of all finite sets.
//!
//! Every family here is hereditary (closed under subsets) and spreading
//! (closed under moving elements rightward); the fast membership path leans
//! on both, and the exhaustive backtracking oracle [`is_member_oracle`] is
//! kept alongside to validate it.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::ordinal::{Ordinal, OrdinalClass};
use crate::rational::Rat;
use crate::vector::FinVec;

/// A finite set of positive integers, kept strictly increasing.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct FinSet(Vec<u32>);

impl FinSet {
    pub fn empty() -> Self {
        FinSet(Vec::new())
    }

    /// Sorts and validates; duplicates and zeros are rejected.
    pub fn new(mut elements: Vec<u32>) -> Result<Self> {
        elements.sort_unstable();
        FinSet::from_sorted(elements)
    }

    pub fn from_sorted(elements: Vec<u32>) -> Result<Self> {
        if elements.first().is_some_and(|&v| v == 0) {
            return Err(Error::Parse("set elements must be >= 1".into()));
        }
        if elements.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parse("set elements must be distinct".into()));
        }
        Ok(FinSet(elements))
    }

    /// Parse a comma-separated list like `2,3,4`; empty text is the empty set.
    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim();
        if trimmed.is_empty() {
            return Ok(FinSet::empty());
        }
        let mut elements = Vec::new();
        for part in trimmed.split(',') {
            let v: u32 = part
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad set element {part:?}")))?;
            elements.push(v);
        }
        let n = elements.len();
        let set = FinSet::new(elements)?;
        if set.len() != n {
            return Err(Error::Parse("duplicate set element".into()));
        }
        Ok(set)
    }

    pub fn elements(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min_element(&self) -> Option<u32> {
        self.0.first().copied()
    }

    pub fn max_element(&self) -> Option<u32> {
        self.0.last().copied()
    }

    pub fn contains(&self, v: u32) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn is_subset_of(&self, other: &FinSet) -> bool {
        self.0.iter().all(|&v| other.contains(v))
    }

    /// The set with `v` inserted; `None` when already present.
    pub fn with_element(&self, v: u32) -> Option<FinSet> {
        match self.0.binary_search(&v) {
            Ok(_) => None,
            Err(pos) => {
                let mut elements = self.0.clone();
                elements.insert(pos, v);
                Some(FinSet(elements))
            }
        }
    }
}

impl TryFrom<Vec<u32>> for FinSet {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        FinSet::new(v)
    }
}

impl From<FinSet> for Vec<u32> {
    fn from(s: FinSet) -> Vec<u32> {
        s.0
    }
}

impl fmt::Display for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

type MemoKey = (Vec<u32>, Ordinal);

fn fast_memo() -> &'static RwLock<HashMap<MemoKey, bool>> {
    static MEMO: OnceLock<RwLock<HashMap<MemoKey, bool>>> = OnceLock::new();
    MEMO.get_or_init(|| RwLock::new(HashMap::new()))
}

fn oracle_memo() -> &'static RwLock<HashMap<MemoKey, bool>> {
    static MEMO: OnceLock<RwLock<HashMap<MemoKey, bool>>> = OnceLock::new();
    MEMO.get_or_init(|| RwLock::new(HashMap::new()))
}

fn memo_get(cache: &RwLock<HashMap<MemoKey, bool>>, set: &[u32], xi: &Ordinal) -> Option<bool> {
    cache
        .read()
        .expect("memo lock")
        .get(&(set.to_vec(), xi.clone()))
        .copied()
}

fn memo_put(cache: &RwLock<HashMap<MemoKey, bool>>, set: &[u32], xi: &Ordinal, verdict: bool) {
    cache
        .write()
        .expect("memo lock")
        .insert((set.to_vec(), xi.clone()), verdict);
}

/// Membership `F in S_xi`.
pub fn is_member(set: &FinSet, xi: &Ordinal) -> bool {
    member_slice(set.elements(), xi)
}

pub(crate) fn member_slice(set: &[u32], xi: &Ordinal) -> bool {
    // The empty set belongs to every family, singletons likewise (S_0 holds
    // them and S_1 is contained in every S_xi with xi >= 1).
    if set.len() <= 1 {
        return true;
    }
    match xi.classify() {
        OrdinalClass::Omega1 => true,
        OrdinalClass::Zero => false,
        OrdinalClass::Successor => {
            if *xi == Ordinal::nat(1) {
                return set.len() <= set[0] as usize;
            }
            if let Some(v) = memo_get(fast_memo(), set, xi) {
                return v;
            }
            let zeta = xi.predecessor().expect("successor");
            let verdict = greedy_successor_member(set, &zeta);
            memo_put(fast_memo(), set, xi, verdict);
            verdict
        }
        OrdinalClass::Limit => {
            if let Some(v) = memo_get(fast_memo(), set, xi) {
                return v;
            }
            let min = set[0];
            // The S_(zeta_n) are not nested, so every n up to min F is a
            // candidate; scan from min F downwards.
            let verdict = (1..=min).rev().any(|n| {
                let zeta_n = xi.fundamental_sequence(n).expect("limit ordinal");
                member_slice(set, &zeta_n)
            });
            memo_put(fast_memo(), set, xi, verdict);
            verdict
        }
    }
}

/// Greedy decomposition into longest valid prefixes. Hereditariness makes the
/// greedy block count minimal over all decompositions into consecutive
/// S_zeta blocks, so `F in S_(zeta+1)` iff that count fits below `min F`.
fn greedy_successor_member(set: &[u32], zeta: &Ordinal) -> bool {
    let budget = set[0] as usize;
    let mut start = 0;
    let mut blocks = 0;
    while start < set.len() {
        if blocks >= budget {
            return false;
        }
        let mut next = start + 1;
        for end in (start + 1..=set.len()).rev() {
            if member_slice(&set[start..end], zeta) {
                next = end;
                break;
            }
        }
        start = next;
        blocks += 1;
    }
    blocks <= budget
}

/// Reference membership by exhaustive backtracking over all consecutive
/// block decompositions; intended for sets of at most ~14 elements.
pub fn is_member_oracle(set: &FinSet, xi: &Ordinal) -> bool {
    oracle_slice(set.elements(), xi)
}

fn oracle_slice(set: &[u32], xi: &Ordinal) -> bool {
    if set.len() <= 1 {
        return true;
    }
    match xi.classify() {
        OrdinalClass::Omega1 => true,
        OrdinalClass::Zero => false,
        OrdinalClass::Successor => {
            if let Some(v) = memo_get(oracle_memo(), set, xi) {
                return v;
            }
            let zeta = xi.predecessor().expect("successor");
            let mut states = HashMap::new();
            let verdict = oracle_split(set, 0, set[0] as usize, &zeta, &mut states);
            memo_put(oracle_memo(), set, xi, verdict);
            verdict
        }
        OrdinalClass::Limit => {
            if let Some(v) = memo_get(oracle_memo(), set, xi) {
                return v;
            }
            let min = set[0];
            let verdict = (1..=min).any(|n| {
                let zeta_n = xi.fundamental_sequence(n).expect("limit ordinal");
                oracle_slice(set, &zeta_n)
            });
            memo_put(oracle_memo(), set, xi, verdict);
            verdict
        }
    }
}

fn oracle_split(
    set: &[u32],
    start: usize,
    budget: usize,
    zeta: &Ordinal,
    states: &mut HashMap<(usize, usize), bool>,
) -> bool {
    if start == set.len() {
        return true;
    }
    if budget == 0 {
        return false;
    }
    if let Some(&v) = states.get(&(start, budget)) {
        return v;
    }
    let mut verdict = false;
    for end in start + 1..=set.len() {
        if oracle_slice(&set[start..end], zeta)
            && oracle_split(set, end, budget - 1, zeta, states)
        {
            verdict = true;
            break;
        }
    }
    states.insert((start, budget), verdict);
    verdict
}

/// Whether `blocks` are successive (`max E_i < min E_(i+1)`) with the set of
/// minima in `S_xi`. Empty blocks are an error.
pub fn is_admissible(blocks: &[FinSet], xi: &Ordinal) -> Result<bool> {
    let mut minima = Vec::with_capacity(blocks.len());
    for block in blocks {
        minima.push(block.min_element().ok_or(Error::EmptyBlock)?);
    }
    for pair in blocks.windows(2) {
        if pair[0].max_element() >= pair[1].min_element() {
            return Ok(false);
        }
    }
    Ok(member_slice(&minima, xi))
}

/// All nonempty members of `S_xi` inside `{1..window}`, in lexicographic
/// order. Rejected for the `w1` sentinel, whose members are all subsets.
pub fn members_within(xi: &Ordinal, window: u32, caps: &Caps) -> Result<Vec<FinSet>> {
    caps.check_window(window)?;
    if xi.is_omega1() {
        return Err(Error::Unsupported(
            "every finite subset belongs to the w1 family; enumerate directly".into(),
        ));
    }
    let mut out = Vec::new();
    let mut current = Vec::new();
    collect_members(xi, window, 1, &mut current, &mut out);
    Ok(out)
}

fn collect_members(
    xi: &Ordinal,
    window: u32,
    start: u32,
    current: &mut Vec<u32>,
    out: &mut Vec<FinSet>,
) {
    for v in start..=window {
        current.push(v);
        // Hereditary: once a set leaves the family no superset returns.
        if member_slice(current, xi) {
            out.push(FinSet(current.clone()));
            collect_members(xi, window, v + 1, current, out);
        }
        current.pop();
    }
}

/// Members of `S_xi` inside `{1..window}` that are maximal under inclusion
/// within the window.
pub fn maximal_members(xi: &Ordinal, window: u32, caps: &Caps) -> Result<Vec<FinSet>> {
    let members = members_within(xi, window, caps)?;
    Ok(members
        .into_iter()
        .filter(|f| {
            (1..=window)
                .filter(|&v| !f.contains(v))
                .all(|v| !member_slice(f.with_element(v).expect("absent").elements(), xi))
        })
        .collect())
}

/// Outcome of the window-relative threshold search: the least shift `d` that
/// pushes `S_zeta` inside `S_xi` on the window, or counterexamples per `d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ThresholdOutcome {
    Threshold { d: u32 },
    Counterexamples(Vec<(u32, FinSet)>),
}

/// Exhaustively searches the least `d <= d_max` such that every
/// `F in S_zeta` with `F` inside `{d..window}` lies in `S_xi`. The verdict is
/// window-relative: a certificate over `{1..window}` only.
pub fn subset_threshold(
    zeta: &Ordinal,
    xi: &Ordinal,
    window: u32,
    d_max: u32,
    caps: &Caps,
) -> Result<ThresholdOutcome> {
    let members = members_within(zeta, window, caps)?;
    let bad: Vec<&FinSet> = members
        .iter()
        .filter(|f| !member_slice(f.elements(), xi))
        .collect();
    let mut counterexamples = Vec::new();
    for d in 1..=d_max {
        match bad.iter().find(|f| f.min_element().expect("nonempty") >= d) {
            None => return Ok(ThresholdOutcome::Threshold { d }),
            Some(f) => counterexamples.push((d, (*f).clone())),
        }
    }
    Ok(ThresholdOutcome::Counterexamples(counterexamples))
}

/// Place the given values at indices `{j, .., 2j-1}` where `j` is the number
/// of values. The support then has size `j` and min `j`, hence lies in `S_1`,
/// and every `l_r` norm matches that of the input list.
pub fn spread_out(values: &[Rat]) -> Result<FinVec> {
    if values.is_empty() {
        return Err(Error::EmptyValues);
    }
    let j = values.len() as u32;
    FinVec::from_entries(
        values
            .iter()
            .enumerate()
            .map(|(i, v)| (j + i as u32, v.clone())),
    )
}

/// Reindex `alpha` along a strictly increasing map `k -> n_k` with
/// `n_k >= k`. Requires `supp(alpha) in S_xi`; the image support stays in
/// `S_xi` by the spreading property, and all `l_r` norms are preserved.
pub fn push_out(alpha: &FinVec, index_map: &BTreeMap<u32, u32>, xi: &Ordinal) -> Result<FinVec> {
    let support = alpha.support();
    if !is_member(&support, xi) {
        return Err(Error::Precondition(format!(
            "support {support} does not lie in S_{xi}"
        )));
    }
    let mut previous: Option<u32> = None;
    let mut pairs = Vec::with_capacity(alpha.len());
    for &k in support.elements() {
        let n_k = *index_map
            .get(&k)
            .ok_or_else(|| Error::IndexMap(format!("no image for index {k}")))?;
        if n_k < k {
            return Err(Error::IndexMap(format!("image {n_k} of {k} is below it")));
        }
        if previous.is_some_and(|prev| n_k <= prev) {
            return Err(Error::IndexMap("map is not strictly increasing".into()));
        }
        previous = Some(n_k);
        pairs.push((n_k, alpha.coeff(k)));
    }
    FinVec::from_entries(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn ord(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    fn set(elems: &[u32]) -> FinSet {
        FinSet::new(elems.to_vec()).unwrap()
    }

    #[test]
    fn s1_membership() {
        assert!(is_member(&set(&[3, 4, 5]), &ord("1")));
        assert!(is_member(&FinSet::empty(), &ord("1")));
        assert!(is_member(&FinSet::empty(), &ord("w^2")));
        assert!(!is_member(&set(&[1, 2]), &ord("1")));
    }

    #[test]
    fn s2_membership_and_oracle_agree() {
        let xi = ord("2");
        assert!(is_member(&set(&[2, 3, 4, 5, 6, 7]), &xi));
        assert!(is_member_oracle(&set(&[2, 3, 4, 5, 6, 7]), &xi));
        assert!(is_member_oracle(&set(&[3, 4, 5]), &ord("1")));
        assert!(!is_member_oracle(&set(&[1, 2]), &ord("2")));
    }

    #[test]
    fn omega1_takes_everything() {
        assert!(is_member(&set(&[1, 2, 3, 4, 5, 6]), &ord("w1")));
        assert!(is_member_oracle(&set(&[1, 2, 3]), &ord("w1")));
    }

    #[test]
    fn admissibility() {
        let xi = ord("1");
        assert!(is_admissible(&[set(&[2]), set(&[3])], &xi).unwrap());
        assert!(!is_admissible(&[set(&[1]), set(&[2])], &xi).unwrap());
        assert!(!is_admissible(&[set(&[2, 5]), set(&[3])], &xi).unwrap());
        assert!(matches!(
            is_admissible(&[set(&[2]), FinSet::empty()], &xi),
            Err(Error::EmptyBlock)
        ));
    }

    #[test]
    fn maximal_members_small_windows() {
        let caps = Caps::default();
        let maximal = maximal_members(&ord("1"), 4, &caps).unwrap();
        assert_eq!(
            maximal,
            vec![set(&[1]), set(&[2, 3]), set(&[2, 4]), set(&[3, 4])]
        );
        let zero = maximal_members(&ord("0"), 3, &caps).unwrap();
        assert_eq!(zero, vec![set(&[1]), set(&[2]), set(&[3])]);
        let tiny = maximal_members(&ord("1"), 2, &caps).unwrap();
        assert_eq!(tiny, vec![set(&[1]), set(&[2])]);
        assert!(maximal_members(&ord("w1"), 3, &caps).is_err());
        assert!(matches!(
            maximal_members(&ord("1"), 99, &caps),
            Err(Error::WindowCap { .. })
        ));
    }

    #[test]
    fn thresholds() {
        let caps = Caps::default();
        assert_eq!(
            subset_threshold(&ord("1"), &ord("2"), 12, 12, &caps).unwrap(),
            ThresholdOutcome::Threshold { d: 1 }
        );
        assert_eq!(
            subset_threshold(&ord("0"), &ord("1"), 12, 12, &caps).unwrap(),
            ThresholdOutcome::Threshold { d: 1 }
        );
        match subset_threshold(&ord("2"), &ord("1"), 12, 4, &caps).unwrap() {
            ThresholdOutcome::Counterexamples(cs) => {
                assert_eq!(cs.len(), 4);
                for (d, f) in &cs {
                    assert!(f.min_element().unwrap() >= *d);
                    assert!(is_member(f, &ord("2")));
                    assert!(!is_member(f, &ord("1")));
                }
            }
            other => panic!("expected counterexamples, got {other:?}"),
        }
    }

    #[test]
    fn spreading_placement() {
        let v = spread_out(&[rat_int(5)]).unwrap();
        assert_eq!(v.coeff(1), rat_int(5));

        let v = spread_out(&[rat_int(1), rat_int(1), rat_int(1)]).unwrap();
        assert_eq!(v.support().elements(), &[3, 4, 5]);
        assert!(is_member(&v.support(), &ord("1")));

        let v = spread_out(&[rat_int(2), rat_int(-3)]).unwrap();
        assert_eq!(v.sum_abs(), rat_int(5));
        assert!(spread_out(&[]).is_err());
    }

    #[test]
    fn push_out_examples() {
        let alpha = FinVec::from_entries([(3, rat(1, 2)), (5, rat(-2, 3))]).unwrap();
        let identity: BTreeMap<u32, u32> = [(3, 3), (5, 5)].into();
        assert_eq!(push_out(&alpha, &identity, &ord("1")).unwrap(), alpha);

        let shift: BTreeMap<u32, u32> = [(3, 5), (5, 7)].into();
        let beta = push_out(&alpha, &shift, &ord("1")).unwrap();
        assert_eq!(beta.support().elements(), &[5, 7]);
        assert_eq!(beta.coeff(5), rat(1, 2));

        let spread: BTreeMap<u32, u32> = [(3, 6), (5, 10)].into();
        let beta = push_out(&alpha, &spread, &ord("1")).unwrap();
        assert!(is_member_oracle(&beta.support(), &ord("1")));

        let bad: BTreeMap<u32, u32> = [(3, 2), (5, 7)].into();
        assert!(push_out(&alpha, &bad, &ord("1")).is_err());
        let decreasing: BTreeMap<u32, u32> = [(3, 9), (5, 7)].into();
        assert!(push_out(&alpha, &decreasing, &ord("1")).is_err());
    }

    #[test]
    fn finset_parsing() {
        assert_eq!(FinSet::parse("2,3,4").unwrap(), set(&[2, 3, 4]));
        assert_eq!(FinSet::parse(" ").unwrap(), FinSet::empty());
        assert!(FinSet::parse("0,1").is_err());
        assert!(FinSet::parse("2,2").is_err());
    }
}
