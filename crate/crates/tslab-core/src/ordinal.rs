//! Ordinals below `w^w` in Cantor normal form, plus the `w1` sentinel.
//!
//! Text grammar: `term ("+" term)*` with `term = "w" ("^" nat)? ("*" nat)? | nat`,
//! or the literal `w1`. Terms must appear with strictly decreasing exponents,
//! so the text form is canonical and `parse . format` is the identity.
//!
//! Limit ordinals carry a fixed fundamental sequence: writing
//! `xi = gamma + w^m` (peeling one copy of the last term), the n-th element is
//! `gamma + n` when `m = 1` and `gamma + w^(m-1)*n + 1` when `m >= 2`. Every
//! element is a successor, the sequence strictly increases, and its supremum
//! is `xi`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// CNF term list (exponent, coefficient), or the `w1` sentinel. The term list
/// has strictly decreasing exponents and coefficients >= 1; empty means 0.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Ordinal {
    repr: Repr,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum Repr {
    Cnf(Vec<(u32, u64)>),
    Omega1,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OrdinalClass {
    Zero,
    Successor,
    Limit,
    Omega1,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal {
            repr: Repr::Cnf(Vec::new()),
        }
    }

    pub fn nat(n: u64) -> Self {
        if n == 0 {
            Ordinal::zero()
        } else {
            Ordinal {
                repr: Repr::Cnf(vec![(0, n)]),
            }
        }
    }

    pub fn omega() -> Self {
        Ordinal {
            repr: Repr::Cnf(vec![(1, 1)]),
        }
    }

    pub fn omega1() -> Self {
        Ordinal { repr: Repr::Omega1 }
    }

    pub fn from_terms(terms: Vec<(u32, u64)>) -> Result<Self> {
        for pair in terms.windows(2) {
            if pair[0].0 <= pair[1].0 {
                return Err(Error::Parse(
                    "CNF exponents must be strictly decreasing".into(),
                ));
            }
        }
        if terms.iter().any(|&(_, c)| c == 0) {
            return Err(Error::Parse("CNF coefficients must be >= 1".into()));
        }
        Ok(Ordinal {
            repr: Repr::Cnf(terms),
        })
    }

    /// CNF terms; `None` for the `w1` sentinel.
    pub fn terms(&self) -> Option<&[(u32, u64)]> {
        match &self.repr {
            Repr::Cnf(t) => Some(t),
            Repr::Omega1 => None,
        }
    }

    pub fn is_omega1(&self) -> bool {
        matches!(self.repr, Repr::Omega1)
    }

    pub fn is_zero(&self) -> bool {
        matches!(&self.repr, Repr::Cnf(t) if t.is_empty())
    }

    pub fn classify(&self) -> OrdinalClass {
        match &self.repr {
            Repr::Omega1 => OrdinalClass::Omega1,
            Repr::Cnf(t) => match t.last() {
                None => OrdinalClass::Zero,
                Some(&(0, _)) => OrdinalClass::Successor,
                Some(_) => OrdinalClass::Limit,
            },
        }
    }

    /// The `zeta` with `zeta + 1 = self`; errors unless `self` is a successor.
    pub fn predecessor(&self) -> Result<Ordinal> {
        match &self.repr {
            Repr::Cnf(t) if matches!(t.last(), Some(&(0, _))) => {
                let mut terms = t.clone();
                let last = terms.last_mut().expect("nonempty");
                if last.1 == 1 {
                    terms.pop();
                } else {
                    last.1 -= 1;
                }
                Ok(Ordinal {
                    repr: Repr::Cnf(terms),
                })
            }
            _ => Err(Error::NotSuccessor(self.to_string())),
        }
    }

    /// The n-th element of the fixed fundamental sequence of a limit ordinal.
    pub fn fundamental_sequence(&self, n: u32) -> Result<Ordinal> {
        if n == 0 {
            return Err(Error::Precondition(
                "fundamental sequence index must be >= 1".into(),
            ));
        }
        let terms = match &self.repr {
            Repr::Cnf(t) if self.classify() == OrdinalClass::Limit => t,
            _ => return Err(Error::NotLimit(self.to_string())),
        };
        // Peel one copy of the last term w^m (m >= 1 since self is a limit).
        let &(m, c) = terms.last().expect("limit ordinal has terms");
        let mut prefix = terms.clone();
        if c == 1 {
            prefix.pop();
        } else {
            prefix.last_mut().expect("nonempty").1 = c - 1;
        }
        if m == 1 {
            prefix.push((0, u64::from(n)));
        } else {
            prefix.push((m - 1, u64::from(n)));
            prefix.push((0, 1));
        }
        Ok(Ordinal {
            repr: Repr::Cnf(prefix),
        })
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.repr, &other.repr) {
            (Repr::Omega1, Repr::Omega1) => Ordering::Equal,
            (Repr::Omega1, Repr::Cnf(_)) => Ordering::Greater,
            (Repr::Cnf(_), Repr::Omega1) => Ordering::Less,
            (Repr::Cnf(a), Repr::Cnf(b)) => {
                for (x, y) in a.iter().zip(b.iter()) {
                    let c = x.0.cmp(&y.0).then_with(|| x.1.cmp(&y.1));
                    if c != Ordering::Equal {
                        return c;
                    }
                }
                a.len().cmp(&b.len())
            }
        }
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Omega1 => write!(f, "w1"),
            Repr::Cnf(terms) if terms.is_empty() => write!(f, "0"),
            Repr::Cnf(terms) => {
                let parts: Vec<String> = terms
                    .iter()
                    .map(|&(e, c)| match (e, c) {
                        (0, c) => c.to_string(),
                        (1, 1) => "w".to_string(),
                        (1, c) => format!("w*{c}"),
                        (e, 1) => format!("w^{e}"),
                        (e, c) => format!("w^{e}*{c}"),
                    })
                    .collect();
                write!(f, "{}", parts.join("+"))
            }
        }
    }
}

impl FromStr for Ordinal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let text = s.trim();
        if text.is_empty() {
            return Err(Error::Parse("empty ordinal expression".into()));
        }
        if text == "w1" {
            return Ok(Ordinal::omega1());
        }
        if text == "0" {
            return Ok(Ordinal::zero());
        }
        let mut terms = Vec::new();
        for raw in text.split('+') {
            terms.push(parse_term(raw.trim())?);
        }
        Ordinal::from_terms(terms)
    }
}

fn parse_nat(s: &str, what: &str) -> Result<u64> {
    s.parse::<u64>()
        .map_err(|_| Error::Parse(format!("bad {what} {s:?} in ordinal expression")))
}

fn parse_term(term: &str) -> Result<(u32, u64)> {
    if term.is_empty() {
        return Err(Error::Parse("empty term in ordinal expression".into()));
    }
    if let Some(rest) = term.strip_prefix('w') {
        let (exp_part, coeff_part) = match rest.split_once('*') {
            Some((e, c)) => (e, Some(c)),
            None => (rest, None),
        };
        let exponent = if exp_part.is_empty() {
            1
        } else {
            let digits = exp_part.strip_prefix('^').ok_or_else(|| {
                Error::Parse(format!("bad term {term:?} in ordinal expression"))
            })?;
            // Terms like w^w would need exponents that are themselves
            // ordinals; the supported range stops below w^w.
            let e = parse_nat(digits, "exponent")?;
            u32::try_from(e).map_err(|_| Error::Parse(format!("exponent {e} too large")))?
        };
        let coefficient = match coeff_part {
            Some(c) => parse_nat(c, "coefficient")?,
            None => 1,
        };
        if coefficient == 0 {
            return Err(Error::Parse("zero coefficient in ordinal term".into()));
        }
        Ok((exponent, coefficient))
    } else {
        let n = parse_nat(term, "natural")?;
        if n == 0 {
            return Err(Error::Parse(
                "zero term only allowed as the whole expression".into(),
            ));
        }
        Ok((0, n))
    }
}

impl Serialize for Ordinal {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ord(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(ord("0"), Ordinal::zero());
        assert_eq!(
            ord("w^2*3+w+5").terms().unwrap(),
            &[(2, 3), (1, 1), (0, 5)]
        );
        assert_eq!(ord("w1"), Ordinal::omega1());
        assert!("w^w".parse::<Ordinal>().is_err());
        assert!("w+w^2".parse::<Ordinal>().is_err());
        assert!("w*0".parse::<Ordinal>().is_err());
        assert!("".parse::<Ordinal>().is_err());
    }

    #[test]
    fn classify_and_predecessor() {
        assert_eq!(ord("w+1").classify(), OrdinalClass::Successor);
        assert_eq!(ord("w*2").classify(), OrdinalClass::Limit);
        assert_eq!(ord("0").classify(), OrdinalClass::Zero);
        assert_eq!(ord("w1").classify(), OrdinalClass::Omega1);

        assert_eq!(ord("1").predecessor().unwrap(), Ordinal::zero());
        assert_eq!(ord("w+3").predecessor().unwrap(), ord("w+2"));
        assert_eq!(ord("w^2+1").predecessor().unwrap(), ord("w^2"));
        assert!(ord("w").predecessor().is_err());
    }

    #[test]
    fn fundamental_sequence_rule() {
        assert_eq!(ord("w").fundamental_sequence(3).unwrap(), ord("3"));
        assert_eq!(ord("w^2").fundamental_sequence(2).unwrap(), ord("w*2+1"));
        assert_eq!(
            ord("w^2+w").fundamental_sequence(4).unwrap(),
            ord("w^2+4")
        );
        assert!(ord("w+1").fundamental_sequence(1).is_err());
        assert!(ord("w").fundamental_sequence(0).is_err());
    }

    #[test]
    fn order_is_cnf_order() {
        assert!(ord("w") > ord("5"));
        assert!(ord("w^2") > ord("w*9+8"));
        assert!(ord("w1") > ord("w^9*7"));
        assert!(ord("w+1") > ord("w"));
        assert!(ord("w*2") > ord("w+100"));
    }
}
