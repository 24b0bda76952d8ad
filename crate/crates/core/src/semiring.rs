//! Exact scalar arithmetic over the four supported carriers.
//!
//! A [`Semiring`] names the carrier and answers capability questions (is it a
//! ring, is it positive, does it have a star, ...). Algorithms that only make
//! sense for some carriers consult these flags before running. Scalars are
//! [`Value`]s; arithmetic on two values is defined by their shared tag.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The carrier of a semiring together with its structural capabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Semiring {
    /// Booleans with `or` / `and`.
    Bool,
    /// Natural numbers.
    Nat,
    /// Integers.
    Int,
    /// Rationals.
    Rat,
}

/// Capability flags of a carrier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Capabilities {
    pub is_ring: bool,
    pub is_commutative: bool,
    pub is_positive: bool,
    pub is_equisubtractive: bool,
    pub is_unit_generated: bool,
    pub has_star: bool,
}

impl Semiring {
    pub const ALL: [Semiring; 4] = [Semiring::Bool, Semiring::Nat, Semiring::Int, Semiring::Rat];

    pub fn name(self) -> &'static str {
        match self {
            Semiring::Bool => "bool",
            Semiring::Nat => "nat",
            Semiring::Int => "int",
            Semiring::Rat => "rat",
        }
    }

    pub fn capabilities(self) -> Capabilities {
        match self {
            Semiring::Bool => Capabilities {
                is_ring: false,
                is_commutative: true,
                is_positive: true,
                is_equisubtractive: false,
                is_unit_generated: true,
                has_star: true,
            },
            Semiring::Nat => Capabilities {
                is_ring: false,
                is_commutative: true,
                is_positive: true,
                is_equisubtractive: true,
                is_unit_generated: true,
                has_star: false,
            },
            Semiring::Int => Capabilities {
                is_ring: true,
                is_commutative: true,
                is_positive: false,
                is_equisubtractive: true,
                is_unit_generated: true,
                has_star: false,
            },
            // star is partial on the rationals: defined for |a| < 1 only
            Semiring::Rat => Capabilities {
                is_ring: true,
                is_commutative: true,
                is_positive: false,
                is_equisubtractive: true,
                is_unit_generated: true,
                has_star: true,
            },
        }
    }

    pub fn is_ring(self) -> bool {
        self.capabilities().is_ring
    }

    pub fn is_positive(self) -> bool {
        self.capabilities().is_positive
    }

    pub fn is_commutative(self) -> bool {
        self.capabilities().is_commutative
    }

    /// Rejects `bool`, which has no place in the unit-decomposition and
    /// joint-reduction machinery.
    pub(crate) fn require_arithmetic(self, operation: &'static str) -> Result<()> {
        match self {
            Semiring::Bool => Err(Error::capability(self, operation)),
            _ => Ok(()),
        }
    }

    pub fn zero(self) -> Value {
        match self {
            Semiring::Bool => Value::Bool(false),
            Semiring::Nat => Value::Nat(BigInt::zero()),
            Semiring::Int => Value::Int(BigInt::zero()),
            Semiring::Rat => Value::Rat(BigRational::zero()),
        }
    }

    pub fn one(self) -> Value {
        match self {
            Semiring::Bool => Value::Bool(true),
            Semiring::Nat => Value::Nat(BigInt::one()),
            Semiring::Int => Value::Int(BigInt::one()),
            Semiring::Rat => Value::Rat(BigRational::one()),
        }
    }

    /// Embeds an integer. Fails for negative numbers over `nat`; over `bool`
    /// every nonzero integer maps to `1`.
    pub fn from_i64(self, n: i64) -> Result<Value> {
        self.from_bigint(BigInt::from(n))
    }

    pub fn from_bigint(self, n: BigInt) -> Result<Value> {
        Ok(match self {
            Semiring::Bool => Value::Bool(!n.is_zero()),
            Semiring::Nat => {
                if n.is_negative() {
                    return Err(Error::Input(format!("{n} is not a natural number")));
                }
                Value::Nat(n)
            }
            Semiring::Int => Value::Int(n),
            Semiring::Rat => Value::Rat(BigRational::from_integer(n)),
        })
    }

    /// Embeds a rational; fails when the carrier cannot hold it.
    pub fn from_rational(self, r: BigRational) -> Result<Value> {
        if self == Semiring::Rat {
            return Ok(Value::Rat(r));
        }
        if !r.is_integer() {
            return Err(Error::Input(format!("{r} is not an element of `{self}`")));
        }
        self.from_bigint(r.to_integer())
    }

    /// Parses the textual value syntax: `0|1` for bool, decimal for nat/int,
    /// `p/q` or an integer for rat.
    pub fn parse_value(self, text: &str) -> Result<Value> {
        let text = text.trim();
        let bad = || Error::Input(format!("`{text}` is not a valid `{self}` value"));
        match self {
            Semiring::Bool => match text {
                "0" => Ok(Value::Bool(false)),
                "1" => Ok(Value::Bool(true)),
                _ => Err(bad()),
            },
            Semiring::Nat | Semiring::Int => {
                if !is_decimal(text) {
                    return Err(bad());
                }
                let n = BigInt::from_str(text).map_err(|_| bad())?;
                if self == Semiring::Nat && n.is_negative() {
                    return Err(Error::Input(format!("`{text}` is negative but the carrier is `nat`")));
                }
                self.from_bigint(n)
            }
            Semiring::Rat => {
                let (num, den) = match text.split_once('/') {
                    Some((n, d)) => (n, d),
                    None => (text, "1"),
                };
                if !is_decimal(num) || !is_decimal(den) || den.starts_with('-') {
                    return Err(bad());
                }
                let num = BigInt::from_str(num).map_err(|_| bad())?;
                let den = BigInt::from_str(den).map_err(|_| bad())?;
                if den.is_zero() {
                    return Err(Error::Input(format!("`{text}` has a zero denominator")));
                }
                Ok(Value::Rat(BigRational::new(num, den)))
            }
        }
    }

    /// Writes `a` as a sum of multiplicative units.
    ///
    /// Zero becomes the empty sum over `nat` and `1 + (-1)` over the rings, so
    /// every entry of a ring matrix can receive at least one summand.
    pub fn unit_decompose(self, a: &Value) -> Result<Vec<Value>> {
        self.require_arithmetic("unit decomposition")?;
        self.check_member(a)?;
        Ok(match a {
            Value::Nat(n) => vec![self.one(); usize_of(n)?],
            Value::Int(n) if n.is_zero() => vec![self.one(), Value::Int(-BigInt::one())],
            Value::Int(n) => {
                let unit = if n.is_negative() { Value::Int(-BigInt::one()) } else { self.one() };
                vec![unit; usize_of(&n.abs())?]
            }
            Value::Rat(r) if r.is_zero() => vec![self.one(), Value::Rat(-BigRational::one())],
            Value::Rat(_) => vec![a.clone()],
            Value::Bool(_) => unreachable!(),
        })
    }

    /// Splits `a1 + b1 = a2 + b2` into `(c1, c2, d1, d2)` with
    /// `a1 = c1 + d1`, `b1 = c2 + d2`, `a2 = c1 + c2` and `b2 = d1 + d2`.
    pub fn equisubtract(self, a1: &Value, b1: &Value, a2: &Value, b2: &Value) -> Result<(Value, Value, Value, Value)> {
        if !self.capabilities().is_equisubtractive {
            return Err(Error::capability(self, "equisubtraction"));
        }
        for v in [a1, b1, a2, b2] {
            self.check_member(v)?;
        }
        if a1.add(b1) != a2.add(b2) {
            return Err(Error::Precondition(format!(
                "{a1} + {b1} differs from {a2} + {b2}"
            )));
        }
        if self.is_ring() {
            // c1 = a2, c2 = 0, d1 = a1 - a2, d2 = b1
            let d1 = a1.sub(a2)?;
            return Ok((a2.clone(), self.zero(), d1, b1.clone()));
        }
        // nat: c1 = min(a1, a2) keeps every part non-negative
        let c1 = if a1.cmp_nat(a2) == Ordering::Less { a1.clone() } else { a2.clone() };
        let c2 = a2.monus(&c1);
        let d1 = a1.monus(&c1);
        let d2 = b2.monus(&d1);
        Ok((c1, c2, d1, d2))
    }

    /// Negation; only rings have it.
    pub fn neg(self, a: &Value) -> Result<Value> {
        if !self.is_ring() {
            return Err(Error::capability(self, "negation"));
        }
        a.neg()
    }

    /// `a* = 1 + a + a^2 + ...`, defined over bool and over rat for `|a| < 1`.
    pub fn star(self, a: &Value) -> Result<Value> {
        match a {
            Value::Bool(_) => Ok(Value::Bool(true)),
            Value::Rat(r) => {
                if r.abs() < BigRational::one() {
                    Ok(Value::Rat((BigRational::one() - r).recip()))
                } else {
                    Err(Error::DivergentStar { value: a.to_string() })
                }
            }
            _ => Err(Error::capability(self, "star")),
        }
    }

    pub(crate) fn check_member(self, a: &Value) -> Result<()> {
        if a.semiring() != self {
            return Err(Error::Input(format!(
                "value {a} belongs to `{}`, expected `{self}`",
                a.semiring()
            )));
        }
        Ok(())
    }
}

fn usize_of(n: &BigInt) -> Result<usize> {
    use num_traits::ToPrimitive;
    n.to_usize()
        .ok_or_else(|| Error::Budget(format!("{n} is too large to split into units")))
}

fn is_decimal(text: &str) -> bool {
    let digits = text.strip_prefix('-').unwrap_or(text);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

impl fmt::Display for Semiring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Semiring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bool" => Ok(Semiring::Bool),
            "nat" => Ok(Semiring::Nat),
            "int" => Ok(Semiring::Int),
            "rat" => Ok(Semiring::Rat),
            _ => Err(Error::Input(format!("unknown semiring `{s}` (expected bool, nat, int or rat)"))),
        }
    }
}

/// An exact scalar tagged with its carrier.
///
/// Naturals are stored as non-negative `BigInt`s; rationals are always in
/// lowest terms with a positive denominator (`BigRational` normalizes).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Bool(bool),
    Nat(BigInt),
    Int(BigInt),
    Rat(BigRational),
}

impl Value {
    pub fn semiring(&self) -> Semiring {
        match self {
            Value::Bool(_) => Semiring::Bool,
            Value::Nat(_) => Semiring::Nat,
            Value::Int(_) => Semiring::Int,
            Value::Rat(_) => Semiring::Rat,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Value::Bool(b) => !b,
            Value::Nat(n) | Value::Int(n) => n.is_zero(),
            Value::Rat(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Value::Bool(b) => *b,
            Value::Nat(n) | Value::Int(n) => n.is_one(),
            Value::Rat(r) => r.is_one(),
        }
    }

    /// Semiring addition. Both operands must share a carrier.
    pub fn add(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Bool(a), Value::Bool(b)) => Value::Bool(*a || *b),
            (Value::Nat(a), Value::Nat(b)) => Value::Nat(a + b),
            (Value::Int(a), Value::Int(b)) => Value::Int(a + b),
            (Value::Rat(a), Value::Rat(b)) => Value::Rat(a + b),
            _ => mixed(self, other),
        }
    }

    /// Semiring multiplication. Both operands must share a carrier.
    pub fn mul(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Bool(a), Value::Bool(b)) => Value::Bool(*a && *b),
            (Value::Nat(a), Value::Nat(b)) => Value::Nat(a * b),
            (Value::Int(a), Value::Int(b)) => Value::Int(a * b),
            (Value::Rat(a), Value::Rat(b)) => Value::Rat(a * b),
            _ => mixed(self, other),
        }
    }

    pub fn add_assign(&mut self, other: &Value) {
        match (&mut *self, other) {
            (Value::Nat(a), Value::Nat(b)) | (Value::Int(a), Value::Int(b)) => *a += b,
            (Value::Rat(a), Value::Rat(b)) => *a += b,
            _ => *self = self.add(other),
        }
    }

    pub fn neg(&self) -> Result<Value> {
        match self {
            Value::Int(a) => Ok(Value::Int(-a)),
            Value::Rat(a) => Ok(Value::Rat(-a)),
            _ => Err(Error::capability(self.semiring(), "negation")),
        }
    }

    /// Ring subtraction.
    pub fn sub(&self, other: &Value) -> Result<Value> {
        Ok(self.add(&other.neg()?))
    }

    /// Truncated subtraction on naturals; ring subtraction elsewhere.
    pub(crate) fn monus(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Nat(a), Value::Nat(b)) => {
                Value::Nat(if a > b { a - b } else { BigInt::zero() })
            }
            (Value::Bool(a), Value::Bool(b)) => Value::Bool(*a && !*b),
            _ => self.sub(other).expect("ring subtraction"),
        }
    }

    fn cmp_nat(&self, other: &Value) -> Ordering {
        match (self, other) {
            (Value::Nat(a), Value::Nat(b)) | (Value::Int(a), Value::Int(b)) => a.cmp(b),
            (Value::Rat(a), Value::Rat(b)) => a.cmp(b),
            (Value::Bool(a), Value::Bool(b)) => a.cmp(b),
            _ => mixed(self, other),
        }
    }

    /// Multiplicative unit test: `1` in bool/nat, `±1` in int, nonzero in rat.
    pub fn is_unit(&self) -> bool {
        match self {
            Value::Bool(b) => *b,
            Value::Nat(n) => n.is_one(),
            Value::Int(n) => n.abs().is_one(),
            Value::Rat(r) => !r.is_zero(),
        }
    }

    /// Multiplicative inverse of a unit.
    pub fn inverse(&self) -> Result<Value> {
        if !self.is_unit() {
            return Err(Error::NotInvertible(self.to_string()));
        }
        Ok(match self {
            Value::Rat(r) => Value::Rat(r.recip()),
            // units of bool, nat and int are self-inverse
            _ => self.clone(),
        })
    }

    /// The value as a rational number (bool maps to 0/1).
    pub fn to_rational(&self) -> BigRational {
        match self {
            Value::Bool(b) => BigRational::from_integer(BigInt::from(*b as u8)),
            Value::Nat(n) | Value::Int(n) => BigRational::from_integer(n.clone()),
            Value::Rat(r) => r.clone(),
        }
    }

    /// The value as an integer, if it is one.
    pub fn to_integer(&self) -> Option<BigInt> {
        match self {
            Value::Bool(b) => Some(BigInt::from(*b as u8)),
            Value::Nat(n) | Value::Int(n) => Some(n.clone()),
            Value::Rat(r) => r.is_integer().then(|| r.to_integer()),
        }
    }
}

#[cold]
fn mixed(a: &Value, b: &Value) -> ! {
    panic!(
        "arithmetic across carriers: {a} ({}) and {b} ({})",
        a.semiring(),
        b.semiring()
    )
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{}", *b as u8),
            Value::Nat(n) | Value::Int(n) => write!(f, "{n}"),
            Value::Rat(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
        }
    }
}
