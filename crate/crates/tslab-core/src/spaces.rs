//! Computable-norm spaces behind one dispatch: `l_p`, `c_0`, the renormed
//! `X_m`, Tsirelson spaces and duals, and weighted `l_q` direct sums.
//!
//! Space JSON forms:
//!
//! ```json
//! {"kind":"lp","p":"2"}
//! {"kind":"c0"}
//! {"kind":"xm","p":"2","m":4}
//! {"kind":"tsirelson","theta":"1/2","q":"1","xi":"w"}
//! {"kind":"tsirelson_dual","theta":"1/2","q":"1","xi":"1"}
//! {"kind":"sum","q":"2","parts":[{"weight":"1/2","space":{"kind":"lp","p":"2"}}]}
//! ```

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::rational::{rat_serde, rat_to_f64, Exponent, Rat};
use crate::tsirelson::{dual_norm, t_norm, TsirelsonParams};
use crate::value::NormValue;
use crate::vector::{AnyVec, FinVec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumPart {
    #[serde(with = "rat_serde")]
    pub weight: Rat,
    pub space: SpaceDescriptor,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceDescriptor {
    Lp {
        p: Exponent,
    },
    C0,
    Xm {
        p: Exponent,
        m: u32,
    },
    Tsirelson(TsirelsonParams),
    TsirelsonDual(TsirelsonParams),
    #[serde(rename = "sum")]
    WeightedSum {
        q: Exponent,
        parts: Vec<SumPart>,
    },
}

impl SpaceDescriptor {
    pub fn lp(p: Exponent) -> Self {
        SpaceDescriptor::Lp { p }
    }

    pub fn xm(p: Exponent, m: u32) -> Self {
        SpaceDescriptor::Xm { p, m }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SpaceDescriptor::Lp { .. } | SpaceDescriptor::C0 => Ok(()),
            SpaceDescriptor::Xm { m, .. } => {
                if *m == 0 {
                    Err(Error::Unsupported("X_m needs m >= 1".into()))
                } else {
                    Ok(())
                }
            }
            SpaceDescriptor::Tsirelson(params) | SpaceDescriptor::TsirelsonDual(params) => {
                params.validate()
            }
            SpaceDescriptor::WeightedSum { parts, .. } => {
                if parts.is_empty() {
                    return Err(Error::Unsupported("direct sum needs at least one part".into()));
                }
                for part in parts {
                    if part.weight <= Rat::zero() {
                        return Err(Error::Unsupported("direct-sum weights must be positive".into()));
                    }
                    part.space.validate()?;
                }
                Ok(())
            }
        }
    }

    /// Whether vectors for this space are flat or direct-sum shaped.
    pub fn wants_sum_vec(&self) -> bool {
        matches!(self, SpaceDescriptor::WeightedSum { .. })
    }
}

/// The `l_p` norm. Exact for p = 1 and p = inf; floating point otherwise
/// (p = 2 goes through `sqrt` on the exact sum of squares).
pub fn lp_norm(x: &FinVec, p: &Exponent) -> NormValue {
    match p {
        Exponent::Infinity => NormValue::exact(x.sup_abs()),
        Exponent::Finite(pr) if pr.is_one() => NormValue::exact(x.sum_abs()),
        Exponent::Finite(pr) => {
            if pr.is_integer() && pr.to_integer().to_usize().is_some_and(|k| k <= 64) {
                let k = pr.to_integer().to_usize().expect("checked above");
                let sum: Rat = x
                    .iter()
                    .map(|(_, c)| num_traits::pow::pow(c.abs(), k))
                    .sum();
                let sf = rat_to_f64(&sum);
                let value = if k == 2 { sf.sqrt() } else { sf.powf(1.0 / k as f64) };
                NormValue::approx(value)
            } else {
                let pf = rat_to_f64(pr);
                let sum: f64 = x
                    .iter()
                    .map(|(_, c)| rat_to_f64(c).abs().powf(pf))
                    .sum();
                NormValue::approx(sum.powf(1.0 / pf))
            }
        }
    }
}

/// Best value of `|f_E(x)|` over index sets `E` of size exactly `m`, where
/// `f_E` sums the coordinates in `E`. Indices outside the support count as
/// zeros, so fewer than `m` nonzero picks are always allowed.
pub fn best_subset_sum(x: &FinVec, m: u32) -> Rat {
    let mut positives: Vec<Rat> = x
        .iter()
        .filter(|(_, c)| c.is_positive())
        .map(|(_, c)| c.clone())
        .collect();
    positives.sort_by(|a, b| b.cmp(a));
    let mut negatives: Vec<Rat> = x
        .iter()
        .filter(|(_, c)| c.is_negative())
        .map(|(_, c)| c.abs())
        .collect();
    negatives.sort_by(|a, b| b.cmp(a));

    let take = m as usize;
    let plus: Rat = positives.iter().take(take).sum();
    let minus: Rat = negatives.iter().take(take).sum();
    plus.max(minus)
}

/// The `X_m` norm: `max(|x|_p, best_subset_sum(x, m))`.
pub fn xm_norm(x: &FinVec, p: &Exponent, m: u32) -> NormValue {
    let subset = NormValue::exact(best_subset_sum(x, m));
    lp_norm(x, p).max(subset)
}

/// `m^(1 - 1/p)`, the operator-norm bound for the size-m coordinate-sum
/// functionals `f_E` on `l_p`. Exact whenever the power is rational.
pub fn dual_functional_norm_bound(m: u32, p: &Exponent) -> NormValue {
    use num_bigint::BigInt;
    match p {
        Exponent::Infinity => NormValue::exact(Rat::from_integer(BigInt::from(m))),
        Exponent::Finite(pr) if pr.is_one() => NormValue::exact(Rat::one()),
        Exponent::Finite(pr) => {
            // exponent (a - b) / a for p = a/b
            let a = pr.numer().clone();
            let b = pr.denom().clone();
            let e = (&a - &b)
                .to_u32()
                .filter(|_| a.to_u32().is_some());
            if let (Some(e), Some(a)) = (e, a.to_u32()) {
                let base = BigInt::from(m);
                let powered = num_traits::pow::pow(base, e as usize);
                let root = powered.nth_root(a);
                if num_traits::pow::pow(root.clone(), a as usize) == powered {
                    return NormValue::exact(Rat::from_integer(root));
                }
            }
            let exponent = 1.0 - 1.0 / rat_to_f64(pr);
            NormValue::approx((m as f64).powf(exponent))
        }
    }
}

/// Norm of `x` in the described space.
pub fn norm(space: &SpaceDescriptor, x: &AnyVec, caps: &Caps) -> Result<NormValue> {
    space.validate()?;
    match (space, x) {
        (SpaceDescriptor::Lp { p }, AnyVec::Flat(v)) => Ok(lp_norm(v, p)),
        (SpaceDescriptor::C0, AnyVec::Flat(v)) => Ok(NormValue::exact(v.sup_abs())),
        (SpaceDescriptor::Xm { p, m }, AnyVec::Flat(v)) => Ok(xm_norm(v, p, *m)),
        (SpaceDescriptor::Tsirelson(params), AnyVec::Flat(v)) => t_norm(v, params, caps),
        (SpaceDescriptor::TsirelsonDual(params), AnyVec::Flat(v)) => {
            if params.q.is_one() {
                Ok(dual_norm(v, params, caps)?.value)
            } else {
                // No polyhedral ball for q > 1: report the bracket midpoint
                // with the half-gap folded into the tolerance.
                let bracket =
                    crate::tsirelson::dual_norm_bracket_light(v, params, caps.bracket_probes, 1, caps)?;
                let lo = bracket.lower.as_f64();
                let hi = bracket.upper.as_f64();
                let tol = (hi - lo).abs() / 2.0
                    + bracket.lower.tolerance().max(bracket.upper.tolerance());
                Ok(NormValue::approx_with_tol(
                    (lo + hi) / 2.0,
                    tol.max(crate::caps::tolerances::COMPARISON_TOL),
                ))
            }
        }
        (SpaceDescriptor::WeightedSum { q, parts }, AnyVec::Sum(sv)) => {
            if sv.components.len() != parts.len() {
                return Err(Error::ShapeMismatch(format!(
                    "direct-sum vector has {} components, space has {} parts",
                    sv.components.len(),
                    parts.len()
                )));
            }
            let part_norms: Vec<NormValue> = parts
                .iter()
                .zip(&sv.components)
                .map(|(part, comp)| {
                    Ok(norm(&part.space, &AnyVec::Flat(comp.clone()), caps)?
                        .scale(&part.weight))
                })
                .collect::<Result<_>>()?;
            Ok(aggregate_lq(&part_norms, q))
        }
        (SpaceDescriptor::WeightedSum { .. }, AnyVec::Flat(_)) => Err(Error::ShapeMismatch(
            "direct-sum space needs a direct-sum vector".into(),
        )),
        (_, AnyVec::Sum(_)) => Err(Error::ShapeMismatch(
            "flat space needs a flat vector".into(),
        )),
    }
}

/// Fast f64 evaluation of closed-form norms, for the heuristic ratio
/// searches; `None` when the space needs the Tsirelson machinery. Reported
/// constants are always re-evaluated through [`norm`].
pub(crate) fn norm_f64_flat(space: &SpaceDescriptor, entries: &[(u32, f64)]) -> Option<f64> {
    match space {
        SpaceDescriptor::Lp { p } => Some(lp_f64(entries, p)),
        SpaceDescriptor::C0 => Some(
            entries
                .iter()
                .fold(0.0_f64, |acc, &(_, v)| acc.max(v.abs())),
        ),
        SpaceDescriptor::Xm { p, m } => Some(lp_f64(entries, p).max(subset_sum_f64(entries, *m))),
        _ => None,
    }
}

pub(crate) fn norm_f64_sum(
    space: &SpaceDescriptor,
    components: &[Vec<(u32, f64)>],
) -> Option<f64> {
    let SpaceDescriptor::WeightedSum { q, parts } = space else {
        return None;
    };
    if parts.len() != components.len() {
        return None;
    }
    let mut values = Vec::with_capacity(parts.len());
    for (part, comp) in parts.iter().zip(components) {
        let v = norm_f64_flat(&part.space, comp)?;
        values.push(v * rat_to_f64(&part.weight));
    }
    Some(match q {
        Exponent::Infinity => values.iter().fold(0.0_f64, |a, &v| a.max(v)),
        Exponent::Finite(qr) => {
            let qf = rat_to_f64(qr);
            values
                .iter()
                .map(|v| v.powf(qf))
                .sum::<f64>()
                .powf(1.0 / qf)
        }
    })
}

fn lp_f64(entries: &[(u32, f64)], p: &Exponent) -> f64 {
    match p {
        Exponent::Infinity => entries
            .iter()
            .fold(0.0_f64, |acc, &(_, v)| acc.max(v.abs())),
        Exponent::Finite(pr) if pr.is_one() => entries.iter().map(|&(_, v)| v.abs()).sum(),
        Exponent::Finite(pr) => {
            let pf = rat_to_f64(pr);
            let sum: f64 = entries.iter().map(|&(_, v)| v.abs().powf(pf)).sum();
            if pf == 2.0 {
                sum.sqrt()
            } else {
                sum.powf(1.0 / pf)
            }
        }
    }
}

fn subset_sum_f64(entries: &[(u32, f64)], m: u32) -> f64 {
    let mut positives: Vec<f64> = entries
        .iter()
        .map(|&(_, v)| v)
        .filter(|v| *v > 0.0)
        .collect();
    positives.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    let mut negatives: Vec<f64> = entries
        .iter()
        .map(|&(_, v)| -v)
        .filter(|v| *v > 0.0)
        .collect();
    negatives.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    let take = m as usize;
    let plus: f64 = positives.iter().take(take).sum();
    let minus: f64 = negatives.iter().take(take).sum();
    plus.max(minus)
}

/// `|| (values_j) ||_q` across direct-sum parts; exact for q in {1, inf}
/// when all parts are exact.
pub fn aggregate_lq(values: &[NormValue], q: &Exponent) -> NormValue {
    let all_exact = values.iter().all(NormValue::is_exact);
    match q {
        Exponent::Infinity => values
            .iter()
            .cloned()
            .fold(NormValue::zero(), NormValue::max),
        Exponent::Finite(qr) if qr.is_one() && all_exact => {
            let sum: Rat = values
                .iter()
                .map(|v| v.as_exact().expect("all exact").clone())
                .sum();
            NormValue::exact(sum)
        }
        Exponent::Finite(qr) => {
            let qf = rat_to_f64(qr);
            let tol = values
                .iter()
                .map(NormValue::tolerance)
                .fold(0.0_f64, f64::max)
                .max(crate::caps::tolerances::COMPARISON_TOL);
            let sum: f64 = values.iter().map(|v| v.as_f64().powf(qf)).sum();
            NormValue::approx_with_tol(sum.powf(1.0 / qf), tol)
        }
    }
}
