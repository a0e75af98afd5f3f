//! Norm values: exact rationals where the computation path stays rational,
//! doubles with an explicit tolerance everywhere else.
//!
//! Comparisons between two values use the larger of the two tolerances, so an
//! exact value (tolerance 0) compared against an exact value is an exact
//! comparison.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::caps::tolerances::COMPARISON_TOL;
use crate::rational::{format_rat, parse_rat, rat_from_f64, rat_to_f64, Rat};

#[derive(Clone, Debug)]
pub enum NormValue {
    Exact(Rat),
    Approx { value: f64, tol: f64 },
}

impl NormValue {
    pub fn exact(r: Rat) -> Self {
        NormValue::Exact(r)
    }

    pub fn exact_int(n: i64) -> Self {
        NormValue::Exact(crate::rational::rat_int(n))
    }

    pub fn approx(value: f64) -> Self {
        NormValue::Approx {
            value,
            tol: COMPARISON_TOL,
        }
    }

    pub fn approx_with_tol(value: f64, tol: f64) -> Self {
        NormValue::Approx { value, tol }
    }

    pub fn zero() -> Self {
        NormValue::Exact(Rat::default())
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, NormValue::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&Rat> {
        match self {
            NormValue::Exact(r) => Some(r),
            NormValue::Approx { .. } => None,
        }
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            NormValue::Exact(r) => rat_to_f64(r),
            NormValue::Approx { value, .. } => *value,
        }
    }

    pub fn tolerance(&self) -> f64 {
        match self {
            NormValue::Exact(_) => 0.0,
            NormValue::Approx { tol, .. } => *tol,
        }
    }

    /// Larger of the two values. Exactness survives when the exact side wins
    /// by more than the other side's tolerance.
    pub fn max(self, other: NormValue) -> NormValue {
        match (self, other) {
            (NormValue::Exact(a), NormValue::Exact(b)) => NormValue::Exact(a.max(b)),
            (NormValue::Exact(a), NormValue::Approx { value, tol })
            | (NormValue::Approx { value, tol }, NormValue::Exact(a)) => {
                let af = rat_to_f64(&a);
                if af >= value + tol {
                    NormValue::Exact(a)
                } else {
                    NormValue::Approx {
                        value: value.max(af),
                        tol,
                    }
                }
            }
            (NormValue::Approx { value: a, tol: ta }, NormValue::Approx { value: b, tol: tb }) => {
                NormValue::Approx {
                    value: a.max(b),
                    tol: ta.max(tb),
                }
            }
        }
    }

    pub fn add(&self, other: &NormValue) -> NormValue {
        match (self, other) {
            (NormValue::Exact(a), NormValue::Exact(b)) => NormValue::Exact(a + b),
            _ => NormValue::Approx {
                value: self.as_f64() + other.as_f64(),
                tol: (self.tolerance() + other.tolerance()).max(COMPARISON_TOL),
            },
        }
    }

    pub fn scale(&self, c: &Rat) -> NormValue {
        match self {
            NormValue::Exact(r) => NormValue::Exact(r * c),
            NormValue::Approx { value, tol } => {
                let cf = rat_to_f64(c).abs();
                NormValue::Approx {
                    value: value * rat_to_f64(c),
                    tol: tol * cf.max(1.0),
                }
            }
        }
    }

    /// `self <= other + slack`, within the larger tolerance. Exact when both
    /// sides are exact (the slack, a dyadic double, converts exactly).
    pub fn le_with_slack(&self, other: &NormValue, slack: f64) -> bool {
        match (self, other) {
            (NormValue::Exact(a), NormValue::Exact(b)) => {
                if slack == 0.0 {
                    a <= b
                } else {
                    *a <= b + rat_from_f64(slack).expect("finite slack")
                }
            }
            _ => {
                let tol = self.tolerance().max(other.tolerance());
                self.as_f64() <= other.as_f64() + slack + tol
            }
        }
    }

    pub fn le(&self, other: &NormValue) -> bool {
        self.le_with_slack(other, 0.0)
    }

    pub fn ge_with_slack(&self, other: &NormValue, slack: f64) -> bool {
        other.le_with_slack(self, slack)
    }

    pub fn approx_eq(&self, other: &NormValue, eps: f64) -> bool {
        self.le_with_slack(other, eps) && other.le_with_slack(self, eps)
    }

    /// Strictly greater by more than both tolerances combined.
    pub fn definitely_gt(&self, other: &NormValue) -> bool {
        match (self, other) {
            (NormValue::Exact(a), NormValue::Exact(b)) => a > b,
            _ => self.as_f64() > other.as_f64() + self.tolerance() + other.tolerance(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct NormValueRepr {
    value: serde_json::Value,
    exact: bool,
    tolerance: f64,
}

impl Serialize for NormValue {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let repr = match self {
            NormValue::Exact(r) => NormValueRepr {
                value: serde_json::Value::String(format_rat(r)),
                exact: true,
                tolerance: 0.0,
            },
            NormValue::Approx { value, tol } => NormValueRepr {
                value: serde_json::json!(value),
                exact: false,
                tolerance: *tol,
            },
        };
        repr.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for NormValue {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let repr = NormValueRepr::deserialize(de)?;
        if repr.exact {
            let s = repr
                .value
                .as_str()
                .ok_or_else(|| D::Error::custom("exact norm value must be a string"))?;
            Ok(NormValue::Exact(parse_rat(s).map_err(D::Error::custom)?))
        } else {
            let v = repr
                .value
                .as_f64()
                .ok_or_else(|| D::Error::custom("approximate norm value must be a number"))?;
            Ok(NormValue::Approx {
                value: v,
                tol: repr.tolerance,
            })
        }
    }
}
