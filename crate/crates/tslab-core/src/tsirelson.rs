//! Tsirelson-type norms `T[theta, S_xi]`, their q-convexifications, and dual
//! norms.
//!
//! The norm is the unique fixed point of
//!
//! ```text
//! |x| = max( ||x||_inf, theta^(1/q) * sup ( sum_i |E_i x|^q )^(1/q) )
//! ```
//!
//! with the sup over S_xi-admissible families of successive sets. On a
//! finitely supported vector the sup is attained by families of a restricted
//! shape, which turns the implicit equation into a terminating recursion over
//! contiguous slices of the support:
//!
//! * blocks may be enlarged to their convex hull inside the support, and gaps
//!   after the first block absorbed into the block on their left — minima are
//!   preserved, and by 1-unconditionality block norms never decrease;
//! * an initial segment of the support may be skipped entirely (the first
//!   block min need not be the support min; forcing coverage there would lose
//!   admissible families, since minima sets only spread rightward);
//! * single-block families are dominated (`theta^(1/q) |x| < |x|`) and are
//!   skipped, which makes every recursive call a strict sub-slice.
//!
//! A family is therefore determined by the set of block minima: a subset `M`
//! of the support with at least two elements and `M in S_xi`; block `i` runs
//! from `M_i` to just before `M_(i+1)`, the last to the slice end. Subsets
//! are enumerated with hereditary pruning. The same enumeration anchored at
//! the support minimum yields the covering decompositions used by the dual
//! upper bound.
//!
//! For `q = 1` and rational `theta` everything is exact rational arithmetic;
//! the dual norm is then a linear program over the polyhedral unit ball,
//! solved by exact-rational cutting planes: the separation oracle for
//! `|y|_T <= 1` is the norm recursion itself, which also produces the
//! violated norming functional as a witness.

use std::collections::{BTreeSet, HashMap};

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::ordinal::Ordinal;
use crate::rational::{rat, rat_from_f64, rat_serde, rat_to_f64, Exponent, Rat};
use crate::schreier::member_slice;
use crate::search::grid_golden_max;
use crate::spaces::lp_norm;
use crate::value::NormValue;
use crate::vector::FinVec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TsirelsonParams {
    #[serde(with = "rat_serde")]
    pub theta: Rat,
    pub q: Exponent,
    pub xi: Ordinal,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_depth: Option<u32>,
}

impl TsirelsonParams {
    pub fn new(theta: Rat, q: Exponent, xi: Ordinal) -> Result<Self> {
        let params = TsirelsonParams {
            theta,
            q,
            xi,
            max_depth: None,
        };
        params.validate()?;
        Ok(params)
    }

    /// theta = 1/2, q = 1.
    pub fn standard(xi: Ordinal) -> Self {
        TsirelsonParams::new(rat(1, 2), Exponent::one(), xi).expect("valid standard parameters")
    }

    pub fn with_q(xi: Ordinal, q: Exponent) -> Result<Self> {
        TsirelsonParams::new(rat(1, 2), q, xi)
    }

    pub fn validate(&self) -> Result<()> {
        if self.theta <= Rat::zero() || self.theta >= Rat::one() {
            return Err(Error::Unsupported(format!(
                "theta must lie in (0,1), got {}",
                self.theta
            )));
        }
        match &self.q {
            Exponent::Infinity => {
                return Err(Error::Unsupported("q must be finite".into()));
            }
            Exponent::Finite(q) if q < &Rat::one() => {
                return Err(Error::Unsupported(format!("q must be >= 1, got {q}")));
            }
            _ => {}
        }
        if self.xi.is_omega1() {
            return Err(Error::Unsupported(
                "Tsirelson parameters need an ordinal below w^w".into(),
            ));
        }
        Ok(())
    }

    fn q_f64(&self) -> f64 {
        self.q.as_f64()
    }

    /// Contraction factor theta^(1/q) in floating point.
    fn theta_root(&self) -> f64 {
        rat_to_f64(&self.theta).powf(1.0 / self.q_f64())
    }
}

/// Block-minima subsets of `values[lo..hi]` that lie in `S_xi`, with at least
/// two elements; positions are absolute. With `anchored` the first minimum is
/// pinned to `lo` (covering decompositions for the dual estimate).
fn admissible_minima(
    values: &[u32],
    lo: usize,
    hi: usize,
    anchored: bool,
    xi: &Ordinal,
) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut positions = Vec::new();
    let mut minima = Vec::new();
    let starts = if anchored { lo..lo + 1 } else { lo..hi };
    for first in starts {
        positions.push(first);
        minima.push(values[first]);
        extend_minima(values, hi, xi, &mut positions, &mut minima, &mut out);
        positions.pop();
        minima.pop();
    }
    out
}

fn extend_minima(
    values: &[u32],
    hi: usize,
    xi: &Ordinal,
    positions: &mut Vec<usize>,
    minima: &mut Vec<u32>,
    out: &mut Vec<Vec<usize>>,
) {
    let last = *positions.last().expect("nonempty prefix");
    for next in last + 1..hi {
        positions.push(next);
        minima.push(values[next]);
        // Hereditary pruning: once the minima set leaves S_xi, no extension
        // returns to it.
        if member_slice(minima, xi) {
            out.push(positions.clone());
            extend_minima(values, hi, xi, positions, minima, out);
        }
        positions.pop();
        minima.pop();
    }
}

#[derive(Clone, Debug)]
enum Choice {
    Leaf(usize),
    Split(Vec<usize>),
}

/// Exact evaluator for q = 1: rational fixed-point values plus the norming
/// functional realizing each slice value.
struct ExactEngine<'a> {
    values: Vec<u32>,
    magnitudes: Vec<Rat>,
    signs: Vec<Rat>,
    theta: &'a Rat,
    xi: &'a Ordinal,
    memo: HashMap<(usize, usize), Rat>,
    choice: HashMap<(usize, usize), Choice>,
}

impl<'a> ExactEngine<'a> {
    fn new(x: &FinVec, params: &'a TsirelsonParams) -> Self {
        let mut values = Vec::with_capacity(x.len());
        let mut magnitudes = Vec::with_capacity(x.len());
        let mut signs = Vec::with_capacity(x.len());
        for (idx, coeff) in x.iter() {
            values.push(idx);
            magnitudes.push(coeff.abs());
            signs.push(if coeff.is_negative() {
                -Rat::one()
            } else {
                Rat::one()
            });
        }
        ExactEngine {
            values,
            magnitudes,
            signs,
            theta: &params.theta,
            xi: &params.xi,
            memo: HashMap::new(),
            choice: HashMap::new(),
        }
    }

    fn value(&mut self, lo: usize, hi: usize) -> Rat {
        if let Some(v) = self.memo.get(&(lo, hi)) {
            return v.clone();
        }
        let mut best = Rat::zero();
        let mut best_choice = Choice::Leaf(lo);
        for s in lo..hi {
            if self.magnitudes[s] > best {
                best = self.magnitudes[s].clone();
                best_choice = Choice::Leaf(s);
            }
        }
        for family in admissible_minima(&self.values, lo, hi, false, self.xi) {
            let mut sum = Rat::zero();
            for (i, &start) in family.iter().enumerate() {
                let end = if i + 1 < family.len() {
                    family[i + 1]
                } else {
                    hi
                };
                sum += self.value(start, end);
            }
            let candidate = self.theta * sum;
            if candidate > best {
                best = candidate;
                best_choice = Choice::Split(family);
            }
        }
        self.memo.insert((lo, hi), best.clone());
        self.choice.insert((lo, hi), best_choice);
        best
    }

    /// Rebuild the norming functional chosen for a slice; pairing it with the
    /// original vector reproduces the slice value.
    fn functional(&self, lo: usize, hi: usize) -> FinVec {
        match self.choice.get(&(lo, hi)).expect("evaluated slice") {
            Choice::Leaf(s) => FinVec::from_entries([(self.values[*s], self.signs[*s].clone())])
                .expect("unit functional"),
            Choice::Split(family) => {
                let mut sum = FinVec::zero();
                for (i, &start) in family.iter().enumerate() {
                    let end = if i + 1 < family.len() {
                        family[i + 1]
                    } else {
                        hi
                    };
                    sum = sum.add(&self.functional(start, end));
                }
                sum.scale(self.theta)
            }
        }
    }
}

/// Floating-point evaluator for general finite q >= 1.
struct FloatEngine<'a> {
    values: Vec<u32>,
    magnitudes: Vec<f64>,
    theta_root: f64,
    q: f64,
    xi: &'a Ordinal,
    memo: HashMap<(usize, usize), f64>,
}

impl<'a> FloatEngine<'a> {
    fn new(x: &FinVec, params: &'a TsirelsonParams) -> Self {
        let mut values = Vec::with_capacity(x.len());
        let mut magnitudes = Vec::with_capacity(x.len());
        for (idx, coeff) in x.iter() {
            values.push(idx);
            magnitudes.push(rat_to_f64(coeff).abs());
        }
        FloatEngine {
            values,
            magnitudes,
            theta_root: params.theta_root(),
            q: params.q_f64(),
            xi: &params.xi,
            memo: HashMap::new(),
        }
    }

    fn value(&mut self, lo: usize, hi: usize) -> f64 {
        if let Some(&v) = self.memo.get(&(lo, hi)) {
            return v;
        }
        let mut best = self.magnitudes[lo..hi]
            .iter()
            .fold(0.0_f64, |acc, &m| acc.max(m));
        for family in admissible_minima(&self.values, lo, hi, false, self.xi) {
            let mut sum = 0.0;
            for (i, &start) in family.iter().enumerate() {
                let end = if i + 1 < family.len() {
                    family[i + 1]
                } else {
                    hi
                };
                sum += self.value(start, end).powf(self.q);
            }
            let candidate = self.theta_root * sum.powf(1.0 / self.q);
            if candidate > best {
                best = candidate;
            }
        }
        self.memo.insert((lo, hi), best);
        best
    }
}

pub(crate) fn exact_t_norm(x: &FinVec, params: &TsirelsonParams) -> Rat {
    if x.is_zero() {
        return Rat::zero();
    }
    let mut engine = ExactEngine::new(x, params);
    let n = engine.values.len();
    engine.value(0, n)
}

pub(crate) fn exact_t_norm_with_witness(x: &FinVec, params: &TsirelsonParams) -> (Rat, FinVec) {
    if x.is_zero() {
        return (Rat::zero(), FinVec::zero());
    }
    let mut engine = ExactEngine::new(x, params);
    let n = engine.values.len();
    let value = engine.value(0, n);
    let witness = engine.functional(0, n);
    (value, witness)
}

fn float_t_norm(x: &FinVec, params: &TsirelsonParams) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let mut engine = FloatEngine::new(x, params);
    let n = engine.values.len();
    engine.value(0, n)
}

/// The Tsirelson-type norm of `x`. Exact rational for q = 1, floating point
/// otherwise.
pub fn t_norm(x: &FinVec, params: &TsirelsonParams, caps: &Caps) -> Result<NormValue> {
    params.validate()?;
    caps.check_support(x.len())?;
    if params.q.is_one() {
        Ok(NormValue::exact(exact_t_norm(x, params)))
    } else {
        Ok(NormValue::approx(float_t_norm(x, params)))
    }
}

/// `|| (|x_n|^q) ||_T ^ (1/q)`, the convexification route to the same norm.
pub fn t_norm_via_convexification(
    x: &FinVec,
    params: &TsirelsonParams,
    caps: &Caps,
) -> Result<NormValue> {
    params.validate()?;
    caps.check_support(x.len())?;
    if params.q.is_one() {
        return t_norm(x, params, caps);
    }
    let base = TsirelsonParams {
        theta: params.theta.clone(),
        q: Exponent::one(),
        xi: params.xi.clone(),
        max_depth: None,
    };
    let powered = match params.q.as_integer() {
        Some(k) => FinVec::from_entries(
            x.iter()
                .map(|(idx, c)| (idx, num_traits::pow::pow(c.abs(), k as usize))),
        )?,
        None => {
            let qf = params.q_f64();
            FinVec::from_entries(x.iter().map(|(idx, c)| {
                let powered = rat_to_f64(c).abs().powf(qf);
                (idx, rat_from_f64(powered).expect("finite power"))
            }))?
        }
    };
    let inner = exact_t_norm(&powered, &base);
    if let Some(k) = params.q.as_integer() {
        if let Some(root) = rat_nth_root(&inner, k) {
            return Ok(NormValue::exact(root));
        }
    }
    Ok(NormValue::approx(
        rat_to_f64(&inner).powf(1.0 / params.q_f64()),
    ))
}

/// Exact q-th root of a rational if one exists.
fn rat_nth_root(r: &Rat, k: u32) -> Option<Rat> {
    if r.is_negative() {
        return None;
    }
    let numer = r.numer().nth_root(k);
    let denom = r.denom().nth_root(k);
    let candidate = Rat::new(numer, denom);
    if &num_traits::pow::pow(candidate.clone(), k as usize) == r {
        Some(candidate)
    } else {
        None
    }
}

/// Re-evaluates the right-hand side of the implicit equation at the computed
/// value, with every block norm recomputed from scratch, and returns the
/// difference. Exactly zero for q = 1.
pub fn fixed_point_residual(
    x: &FinVec,
    params: &TsirelsonParams,
    computed: &NormValue,
    caps: &Caps,
) -> Result<NormValue> {
    params.validate()?;
    caps.check_support(x.len())?;
    if x.is_zero() {
        return Ok(NormValue::zero());
    }
    let values = x.support_indices();
    let n = values.len();
    let families = admissible_minima(&values, 0, n, false, &params.xi);
    let block_vec = |start: usize, end: usize| x.restrict_range(values[start], values[end - 1]);

    if params.q.is_one() {
        let mut rhs = x.sup_abs();
        for family in &families {
            let mut sum = Rat::zero();
            for (i, &start) in family.iter().enumerate() {
                let end = if i + 1 < family.len() {
                    family[i + 1]
                } else {
                    n
                };
                sum += exact_t_norm(&block_vec(start, end), params);
            }
            rhs = rhs.max(&params.theta * sum);
        }
        let computed_rat = computed
            .as_exact()
            .cloned()
            .or_else(|| rat_from_f64(computed.as_f64()).ok())
            .ok_or_else(|| Error::Unsupported("non-finite computed value".into()))?;
        Ok(NormValue::exact((computed_rat - rhs).abs()))
    } else {
        let qf = params.q_f64();
        let factor = params.theta_root();
        let mut rhs = rat_to_f64(&x.sup_abs());
        for family in &families {
            let mut sum = 0.0;
            for (i, &start) in family.iter().enumerate() {
                let end = if i + 1 < family.len() {
                    family[i + 1]
                } else {
                    n
                };
                sum += float_t_norm(&block_vec(start, end), params).powf(qf);
            }
            rhs = rhs.max(factor * sum.powf(1.0 / qf));
        }
        Ok(NormValue::approx((computed.as_f64() - rhs).abs()))
    }
}

/// The classical iterated norms `|.|_n`: `|.|_0` is the sup norm and each
/// step applies the admissible-family supremum once. Stabilizes at the fixed
/// point once the depth reaches the support size; `params.max_depth` (when
/// set) overrides the depth.
pub fn t_norm_iterative(x: &FinVec, params: &TsirelsonParams, caps: &Caps) -> Result<NormValue> {
    params.validate()?;
    caps.check_support(x.len())?;
    if x.is_zero() {
        return Ok(NormValue::zero());
    }
    let depth = params.max_depth.unwrap_or(x.len() as u32);
    let values = x.support_indices();
    let magnitudes: Vec<f64> = values
        .iter()
        .map(|&idx| rat_to_f64(&x.coeff(idx)).abs())
        .collect();
    let qf = params.q_f64();
    let factor = params.theta_root();
    let mut memo: HashMap<(usize, usize, u32), f64> = HashMap::new();

    #[allow(clippy::too_many_arguments)]
    fn rec(
        lo: usize,
        hi: usize,
        level: u32,
        values: &[u32],
        magnitudes: &[f64],
        xi: &Ordinal,
        qf: f64,
        factor: f64,
        memo: &mut HashMap<(usize, usize, u32), f64>,
    ) -> f64 {
        if let Some(&v) = memo.get(&(lo, hi, level)) {
            return v;
        }
        let sup = magnitudes[lo..hi].iter().fold(0.0_f64, |a, &m| a.max(m));
        let mut best = sup;
        if level > 0 {
            for family in admissible_minima(values, lo, hi, false, xi) {
                let mut sum = 0.0;
                for (i, &start) in family.iter().enumerate() {
                    let end = if i + 1 < family.len() {
                        family[i + 1]
                    } else {
                        hi
                    };
                    sum += rec(
                        start,
                        end,
                        level - 1,
                        values,
                        magnitudes,
                        xi,
                        qf,
                        factor,
                        memo,
                    )
                    .powf(qf);
                }
                best = best.max(factor * sum.powf(1.0 / qf));
            }
        }
        memo.insert((lo, hi, level), best);
        best
    }

    let n = values.len();
    Ok(NormValue::approx(rec(
        0,
        n,
        depth,
        &values,
        &magnitudes,
        &params.xi,
        qf,
        factor,
        &mut memo,
    )))
}

/// The finite norming set of `T[theta, S_xi]` on a window, for q = 1.
///
/// Stored are the canonical nonneg representatives: the full set is their
/// closure under flipping signs of unit-functional leaves (flips commute with
/// the generation rule), so `max_abs_at` evaluates the supremum over the full
/// signed set without materializing it.
#[derive(Clone, Debug)]
pub struct FunctionalSet {
    pub functionals: Vec<FinVec>,
    pub depth: u32,
    pub window: u32,
}

impl FunctionalSet {
    /// `max over the signed set of |f(x)|` = `max over representatives of
    /// sum_n f_n |x_n|`; equals the norm of `x` for `x` inside the window.
    pub fn max_abs_at(&self, x: &FinVec) -> Rat {
        let abs = x.abs();
        self.functionals
            .iter()
            .map(|f| f.dot(&abs))
            .max()
            .unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.functionals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functionals.is_empty()
    }
}

const FUNCTIONAL_SET_LIMIT: usize = 2_000_000;

/// Generate the norming set on `{1..window}`: unit functionals together with
/// every `theta * (f_1 + .. + f_j)` over admissible successive families with
/// `j >= 2` (single-block combinations are dominated and dropped).
pub fn functional_set(
    window: u32,
    params: &TsirelsonParams,
    caps: &Caps,
) -> Result<FunctionalSet> {
    params.validate()?;
    if !params.q.is_one() {
        return Err(Error::Unsupported(
            "functional sets are polyhedral only for q = 1".into(),
        ));
    }
    if window == 0 {
        return Err(Error::Precondition("window must be >= 1".into()));
    }
    if window > caps.functional_window {
        return Err(Error::WindowCap {
            requested: window,
            cap: caps.functional_window,
        });
    }

    let mut all: BTreeSet<FinVec> = (1..=window).map(FinVec::unit).collect();
    let mut depth = 0;
    loop {
        let fresh = combine_level(&all, params)?;
        let before = all.len();
        all.extend(fresh);
        if all.len() > FUNCTIONAL_SET_LIMIT {
            return Err(Error::Unsupported(format!(
                "functional set exceeds {FUNCTIONAL_SET_LIMIT} elements"
            )));
        }
        if all.len() == before {
            break;
        }
        depth += 1;
    }
    Ok(FunctionalSet {
        functionals: all.into_iter().collect(),
        depth,
        window,
    })
}

fn combine_level(all: &BTreeSet<FinVec>, params: &TsirelsonParams) -> Result<BTreeSet<FinVec>> {
    // Sorted by (min support, max support) so successive tuples extend by
    // scanning forward.
    let mut list: Vec<&FinVec> = all.iter().collect();
    list.sort_by_key(|f| (f.min_support().unwrap_or(0), f.max_support().unwrap_or(0)));
    let mut out = BTreeSet::new();
    let mut minima = Vec::new();
    for (i, f) in list.iter().enumerate() {
        minima.push(f.min_support().expect("nonzero functional"));
        let mut sum = (*f).clone();
        combine_extend(
            &list,
            i,
            f.max_support().expect("nonzero functional"),
            &mut minima,
            &mut sum,
            1,
            params,
            &mut out,
        )?;
        minima.pop();
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn combine_extend(
    list: &[&FinVec],
    from: usize,
    last_max: u32,
    minima: &mut Vec<u32>,
    sum: &mut FinVec,
    count: usize,
    params: &TsirelsonParams,
    out: &mut BTreeSet<FinVec>,
) -> Result<()> {
    for (j, g) in list.iter().enumerate().skip(from + 1) {
        let g_min = g.min_support().expect("nonzero functional");
        if g_min <= last_max {
            continue;
        }
        minima.push(g_min);
        if member_slice(minima, &params.xi) {
            let extended = sum.add(g);
            if count + 1 >= 2 {
                out.insert(extended.scale(&params.theta));
                if out.len() > FUNCTIONAL_SET_LIMIT {
                    return Err(Error::Unsupported(format!(
                        "functional set exceeds {FUNCTIONAL_SET_LIMIT} elements"
                    )));
                }
            }
            let mut extended = extended;
            combine_extend(
                list,
                j,
                g.max_support().expect("nonzero functional"),
                minima,
                &mut extended,
                count + 1,
                params,
                out,
            )?;
        }
        minima.pop();
    }
    Ok(())
}

/// Exact dual norm for q = 1, with the optimal point of the defining linear
/// program as witness.
#[derive(Clone, Debug, Serialize)]
pub struct DualNorm {
    pub value: NormValue,
    pub witness: FinVec,
}

/// `max { x*(y) : |y|_T <= 1 }` by exact cutting planes: solve the LP over
/// the constraints collected so far, test feasibility of the optimum with the
/// exact norm recursion, and cut with the returned norming functional until
/// the optimum is feasible. By 1-unconditionality the variables are the
/// coordinates of `supp(x*)`, taken nonnegative against `|x*|`.
pub fn dual_norm(xstar: &FinVec, params: &TsirelsonParams, caps: &Caps) -> Result<DualNorm> {
    params.validate()?;
    if !params.q.is_one() {
        return Err(Error::Unsupported(
            "exact dual norms need q = 1; use dual_norm_bracket".into(),
        ));
    }
    if xstar.len() > caps.lp_support {
        return Err(Error::SupportCap {
            size: xstar.len(),
            cap: caps.lp_support,
        });
    }
    if xstar.is_zero() {
        return Ok(DualNorm {
            value: NormValue::zero(),
            witness: FinVec::zero(),
        });
    }

    let support = xstar.support_indices();
    let n = support.len();
    let objective: Vec<Rat> = support.iter().map(|&idx| xstar.coeff(idx).abs()).collect();
    // Unit functionals e_s* start the pool and keep the LP bounded.
    let mut rows: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            let mut row = vec![Rat::zero(); n];
            row[i] = Rat::one();
            row
        })
        .collect();
    let rhs_for = |rows: &Vec<Vec<Rat>>| vec![Rat::one(); rows.len()];

    for _round in 0..10_000 {
        let sol = crate::simplex::maximize(&objective, &rows, &rhs_for(&rows))?;
        let y = FinVec::from_entries(
            support
                .iter()
                .zip(&sol.point)
                .map(|(&idx, v)| (idx, v.clone())),
        )?;
        let (norm, functional) = exact_t_norm_with_witness(&y, params);
        if norm <= Rat::one() {
            let witness = FinVec::from_entries(support.iter().map(|&idx| {
                let sign = if xstar.coeff(idx).is_negative() {
                    -Rat::one()
                } else {
                    Rat::one()
                };
                (idx, y.coeff(idx) * sign)
            }))?;
            return Ok(DualNorm {
                value: NormValue::exact(sol.value),
                witness,
            });
        }
        rows.push(
            support
                .iter()
                .map(|&idx| functional.coeff(idx))
                .collect::<Vec<Rat>>(),
        );
    }
    Err(Error::Lp("cutting-plane iteration cap reached".into()))
}

/// Two-sided dual-norm estimate with a ratio witness.
#[derive(Clone, Debug, Serialize)]
pub struct DualBracket {
    pub lower: NormValue,
    pub upper: NormValue,
    pub witness: FinVec,
}

/// Bracket `|x*|_(T_q*)`.
///
/// Lower bound: the conjugate-exponent norm (always below the dual norm),
/// improved by ratios `x*(y)/|y|_(T_q)` from seeded probe directions with
/// coordinate refinement; for q = 1 the best probe is re-evaluated in exact
/// arithmetic, so the bound is a certificate. Upper bound: recursive minimum
/// of `theta^(-1/q) * || (upper(E_i x*)) ||_p` over covering admissible
/// decompositions, floored by the l1 norm; exact for q = 1.
pub fn dual_norm_bracket(
    xstar: &FinVec,
    params: &TsirelsonParams,
    restarts: u32,
    seed: u64,
    caps: &Caps,
) -> Result<DualBracket> {
    bracket_impl(xstar, params, restarts, 2, seed, caps)
}

/// Probe-only bracket (no coordinate refinement); used where the bracket
/// serves as a norm evaluation inside hot loops. Still a valid enclosure.
pub(crate) fn dual_norm_bracket_light(
    xstar: &FinVec,
    params: &TsirelsonParams,
    probes: u32,
    seed: u64,
    caps: &Caps,
) -> Result<DualBracket> {
    bracket_impl(xstar, params, probes, 0, seed, caps)
}

fn bracket_impl(
    xstar: &FinVec,
    params: &TsirelsonParams,
    restarts: u32,
    refine_sweeps: u32,
    seed: u64,
    caps: &Caps,
) -> Result<DualBracket> {
    params.validate()?;
    caps.check_support(xstar.len())?;
    if xstar.is_zero() {
        return Ok(DualBracket {
            lower: NormValue::zero(),
            upper: NormValue::zero(),
            witness: FinVec::zero(),
        });
    }
    let p = params.q.conjugate();
    let magnitudes = xstar.abs();
    let support = xstar.support_indices();
    let n = support.len();

    let mut lower = lp_norm(&magnitudes, &p);

    // Probe directions for the ratio x*(y)/|y|.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probes: Vec<Vec<f64>> = vec![vec![1.0; n]];
    for _ in 0..restarts {
        probes.push((0..n).map(|_| rng.random::<f64>().max(1e-3)).collect());
    }
    let weights: Vec<f64> = support
        .iter()
        .map(|&idx| rat_to_f64(&magnitudes.coeff(idx)))
        .collect();
    let ratio_of = |coords: &[f64], params: &TsirelsonParams| -> f64 {
        let y = vec_from_coords(&support, coords);
        if y.is_zero() {
            return 0.0;
        }
        let norm = float_t_norm(&y, params);
        if norm <= 0.0 {
            return 0.0;
        }
        coords
            .iter()
            .zip(&weights)
            .map(|(c, w)| c * w)
            .sum::<f64>()
            / norm
    };

    let mut best_coords = probes[0].clone();
    let mut best_ratio = f64::NEG_INFINITY;
    for probe in &probes {
        let mut coords = probe.clone();
        let mut current = ratio_of(&coords, params);
        for _sweep in 0..refine_sweeps {
            for i in 0..n {
                let saved = coords[i];
                let hi = 4.0 * coords.iter().fold(1.0_f64, |a, &c| a.max(c));
                let (best_t, best_v) = grid_golden_max(
                    |t| {
                        let mut c = coords.clone();
                        c[i] = t;
                        ratio_of(&c, params)
                    },
                    0.0,
                    hi,
                    9,
                    24,
                );
                if best_v > current {
                    coords[i] = best_t;
                    current = best_v;
                } else {
                    coords[i] = saved;
                }
            }
        }
        if current > best_ratio {
            best_ratio = current;
            best_coords = coords;
        }
    }

    let witness_plain = vec_from_coords_exact(&support, &best_coords)?;
    if params.q.is_one() {
        let num = magnitudes.dot(&witness_plain);
        let den = exact_t_norm(&witness_plain, params);
        if !den.is_zero() {
            lower = lower.max(NormValue::exact(num / den));
        }
    } else if best_ratio.is_finite() && best_ratio > 0.0 {
        lower = lower.max(NormValue::approx(best_ratio));
    }

    let upper = dual_upper_bound(xstar, params, &p);

    // Report the witness with signs matched to x*.
    let witness = FinVec::from_entries(support.iter().map(|&idx| {
        let sign = if xstar.coeff(idx).is_negative() {
            -Rat::one()
        } else {
            Rat::one()
        };
        (idx, witness_plain.coeff(idx) * sign)
    }))?;

    Ok(DualBracket {
        lower,
        upper,
        witness,
    })
}

fn vec_from_coords(support: &[u32], coords: &[f64]) -> FinVec {
    FinVec::from_entries(support.iter().zip(coords).filter_map(|(&idx, &c)| {
        if c.abs() < 1e-12 {
            None
        } else {
            Some((idx, rat_from_f64(c).expect("finite coordinate")))
        }
    }))
    .expect("distinct indices")
}

fn vec_from_coords_exact(support: &[u32], coords: &[f64]) -> Result<FinVec> {
    FinVec::from_entries(
        support
            .iter()
            .zip(coords)
            .filter(|(_, &c)| c.abs() >= 1e-12)
            .map(|(&idx, &c)| (idx, rat_from_f64(c).expect("finite coordinate"))),
    )
}

fn dual_upper_bound(xstar: &FinVec, params: &TsirelsonParams, p: &Exponent) -> NormValue {
    let values = xstar.support_indices();
    let n = values.len();
    if params.q.is_one() {
        let inv_theta = Rat::one() / params.theta.clone();
        let mut memo: HashMap<(usize, usize), Rat> = HashMap::new();
        let v = exact_dual_upper(xstar, &values, 0, n, &inv_theta, &params.xi, &mut memo);
        NormValue::exact(v)
    } else {
        let pf = p.as_f64();
        let factor = (1.0 / rat_to_f64(&params.theta)).powf(1.0 / params.q_f64());
        let mut memo: HashMap<(usize, usize), f64> = HashMap::new();
        let v = float_dual_upper(xstar, &values, 0, n, factor, pf, &params.xi, &mut memo);
        NormValue::approx(v)
    }
}

fn exact_dual_upper(
    xstar: &FinVec,
    values: &[u32],
    lo: usize,
    hi: usize,
    inv_theta: &Rat,
    xi: &Ordinal,
    memo: &mut HashMap<(usize, usize), Rat>,
) -> Rat {
    if hi - lo == 1 {
        return xstar.coeff(values[lo]).abs();
    }
    if let Some(v) = memo.get(&(lo, hi)) {
        return v.clone();
    }
    // l1 floor, then covering decompositions: q = 1 pairs with p = inf, so
    // the block bound is inv_theta times the largest block upper bound.
    let mut best: Rat = (lo..hi).map(|s| xstar.coeff(values[s]).abs()).sum();
    for family in admissible_minima(values, lo, hi, true, xi) {
        let mut block_max = Rat::zero();
        for (i, &start) in family.iter().enumerate() {
            let end = if i + 1 < family.len() {
                family[i + 1]
            } else {
                hi
            };
            let b = exact_dual_upper(xstar, values, start, end, inv_theta, xi, memo);
            block_max = block_max.max(b);
        }
        best = best.min(inv_theta * block_max);
    }
    memo.insert((lo, hi), best.clone());
    best
}

#[allow(clippy::too_many_arguments)]
fn float_dual_upper(
    xstar: &FinVec,
    values: &[u32],
    lo: usize,
    hi: usize,
    factor: f64,
    pf: f64,
    xi: &Ordinal,
    memo: &mut HashMap<(usize, usize), f64>,
) -> f64 {
    if hi - lo == 1 {
        return rat_to_f64(&xstar.coeff(values[lo])).abs();
    }
    if let Some(&v) = memo.get(&(lo, hi)) {
        return v;
    }
    let mut best: f64 = (lo..hi)
        .map(|s| rat_to_f64(&xstar.coeff(values[s])).abs())
        .sum();
    for family in admissible_minima(values, lo, hi, true, xi) {
        let mut sum = 0.0;
        for (i, &start) in family.iter().enumerate() {
            let end = if i + 1 < family.len() {
                family[i + 1]
            } else {
                hi
            };
            sum += float_dual_upper(xstar, values, start, end, factor, pf, xi, memo).powf(pf);
        }
        best = best.min(factor * sum.powf(1.0 / pf));
    }
    memo.insert((lo, hi), best);
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat_int;

    fn caps() -> Caps {
        Caps::default()
    }

    fn ones(range: std::ops::RangeInclusive<u32>) -> FinVec {
        FinVec::from_entries(range.map(|n| (n, Rat::one()))).unwrap()
    }

    fn std_params(xi: &str) -> TsirelsonParams {
        TsirelsonParams::standard(xi.parse().unwrap())
    }

    #[test]
    fn anchors_for_q1() {
        let params = std_params("1");
        assert_eq!(
            t_norm(&FinVec::unit(5), &params, &caps()).unwrap().as_exact(),
            Some(&Rat::one())
        );
        assert_eq!(
            t_norm(&ones(2..=3), &params, &caps()).unwrap().as_exact(),
            Some(&Rat::one())
        );
        assert_eq!(
            t_norm(&ones(9..=16), &params, &caps()).unwrap().as_exact(),
            Some(&rat_int(4))
        );
        // An admissible family may skip an initial stretch of the support.
        let spiked = FinVec::unit(1).add(&ones(6..=12));
        assert_eq!(
            t_norm(&spiked, &params, &caps()).unwrap().as_exact(),
            Some(&rat_int(3))
        );
    }

    #[test]
    fn anchors_for_q2() {
        let params = TsirelsonParams::with_q("1".parse().unwrap(), Exponent::two()).unwrap();
        let v = ones(2..=3);
        let direct = t_norm(&v, &params, &caps()).unwrap();
        assert!((direct.as_f64() - 1.0).abs() < 1e-12);
        let conv = t_norm_via_convexification(&v, &params, &caps()).unwrap();
        assert!((conv.as_f64() - 1.0).abs() < 1e-12);

        let scaled = FinVec::from_entries([(2, rat_int(2))]).unwrap();
        let n = t_norm_via_convexification(&scaled, &params, &caps()).unwrap();
        assert!((n.as_f64() - 2.0).abs() < 1e-12);
        assert_eq!(
            t_norm_via_convexification(&FinVec::unit(3), &params, &caps())
                .unwrap()
                .as_f64(),
            1.0
        );
    }

    #[test]
    fn residuals_vanish() {
        let params = std_params("1");
        let v = ones(2..=5);
        let n = t_norm(&v, &params, &caps()).unwrap();
        let r = fixed_point_residual(&v, &params, &n, &caps()).unwrap();
        assert_eq!(r.as_exact(), Some(&Rat::zero()));

        let zero = fixed_point_residual(&FinVec::zero(), &params, &NormValue::zero(), &caps())
            .unwrap();
        assert_eq!(zero.as_exact(), Some(&Rat::zero()));
    }

    #[test]
    fn functional_sets_small_windows() {
        let params = std_params("1");
        let k1 = functional_set(1, &params, &caps()).unwrap();
        assert_eq!(k1.functionals, vec![FinVec::unit(1)]);

        let k3 = functional_set(3, &params, &caps()).unwrap();
        let pair = FinVec::unit(2).add(&FinVec::unit(3)).scale(&rat(1, 2));
        assert!(k3.functionals.contains(&pair));
        assert_eq!(k3.max_abs_at(&ones(2..=3)), Rat::one());
    }

    #[test]
    fn dual_anchors() {
        let params = std_params("1");
        let e2e3 = FinVec::unit(2).add(&FinVec::unit(3));
        let d = dual_norm(&e2e3, &params, &caps()).unwrap();
        assert_eq!(d.value.as_exact(), Some(&rat_int(2)));
        assert_eq!(e2e3.dot(&d.witness), rat_int(2));
        assert!(exact_t_norm(&d.witness, &params) <= Rat::one());

        let ones123 = ones(1..=3);
        let d = dual_norm(&ones123, &params, &caps()).unwrap();
        assert_eq!(d.value.as_exact(), Some(&rat_int(3)));

        let unit = dual_norm(&FinVec::unit(4), &params, &caps()).unwrap();
        assert_eq!(unit.value.as_exact(), Some(&Rat::one()));
    }

    #[test]
    fn bracket_anchors() {
        let params = std_params("1");
        let e5 = FinVec::unit(5);
        let b = dual_norm_bracket(&e5, &params, 4, 7, &caps()).unwrap();
        assert_eq!(b.lower.as_exact(), Some(&Rat::one()));
        assert_eq!(b.upper.as_exact(), Some(&Rat::one()));

        let pair = FinVec::unit(2).add(&FinVec::unit(3));
        let b = dual_norm_bracket(&pair, &params, 4, 7, &caps()).unwrap();
        assert_eq!(b.lower.as_exact(), Some(&rat_int(2)));
        assert_eq!(b.upper.as_exact(), Some(&rat_int(2)));

        let b = dual_norm_bracket(&ones(1..=3), &params, 4, 7, &caps()).unwrap();
        assert_eq!(b.lower.as_exact(), Some(&rat_int(3)));
        assert_eq!(b.upper.as_exact(), Some(&rat_int(3)));
    }
}
