//! Exact integers and rationals, a log-domain real, and twist-power sequences.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::Sign;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};

pub use num_bigint::BigInt;
pub type BigRat = num_rational::BigRational;

pub fn int(v: i64) -> BigInt {
    BigInt::from(v)
}

pub fn rat(p: i64, q: i64) -> BigRat {
    BigRat::new(BigInt::from(p), BigInt::from(q))
}

pub fn rat_from_int(v: &BigInt) -> BigRat {
    BigRat::from_integer(v.clone())
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rat(s: &str) -> Result<BigRat> {
    let s = s.trim();
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p = BigInt::from_str(p).map_err(|_| Error::InvalidInput(format!("bad rational {s:?}")))?;
    let q = BigInt::from_str(q).map_err(|_| Error::InvalidInput(format!("bad rational {s:?}")))?;
    if q.is_zero() {
        return invalid(format!("zero denominator in {s:?}"));
    }
    Ok(BigRat::new(p, q))
}

pub fn format_rat(r: &BigRat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn ceil_rat(r: &BigRat) -> BigInt {
    r.numer().div_ceil(r.denom())
}

pub fn floor_rat(r: &BigRat) -> BigInt {
    r.numer().div_floor(r.denom())
}

/// Natural log of a positive integer, accurate to double precision at any size.
pub fn ln_bigint(x: &BigInt) -> f64 {
    assert!(x.is_positive(), "ln of nonpositive integer");
    let bits = x.bits();
    if bits <= 64 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top: BigInt = x >> shift;
    top.to_f64().unwrap().ln() + (shift as f64) * std::f64::consts::LN_2
}

pub fn ln_rat(r: &BigRat) -> f64 {
    ln_bigint(r.numer()) - ln_bigint(r.denom())
}

/// Rational approximation of a rational as f64, robust to huge operands.
pub fn rat_to_f64(r: &BigRat) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let s = if r.is_negative() { -1.0 } else { 1.0 };
    s * (ln_bigint(&r.numer().abs()) - ln_bigint(r.denom())).exp()
}

/// A real number stored as sign and natural log of its magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogReal {
    sign: i8,
    log: f64,
}

impl LogReal {
    pub const ZERO: LogReal = LogReal { sign: 0, log: f64::NEG_INFINITY };
    pub const ONE: LogReal = LogReal { sign: 1, log: 0.0 };

    pub fn from_log(log: f64) -> Self {
        LogReal { sign: 1, log }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            LogReal { sign: if x > 0.0 { 1 } else { -1 }, log: x.abs().ln() }
        }
    }

    pub fn from_bigint(x: &BigInt) -> Self {
        match x.sign() {
            Sign::NoSign => Self::ZERO,
            Sign::Plus => LogReal { sign: 1, log: ln_bigint(x) },
            Sign::Minus => LogReal { sign: -1, log: ln_bigint(&-x) },
        }
    }

    pub fn from_rat(r: &BigRat) -> Self {
        let n = Self::from_bigint(r.numer());
        LogReal { sign: n.sign, log: n.log - ln_bigint(r.denom()) }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// Natural log of the magnitude.
    pub fn ln_abs(&self) -> f64 {
        self.log
    }

    pub fn to_f64(&self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => f64::from(s) * self.log.exp(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }
}

impl Add for LogReal {
    type Output = LogReal;
    fn add(self, o: LogReal) -> LogReal {
        if self.sign == 0 {
            return o;
        }
        if o.sign == 0 {
            return self;
        }
        let (hi, lo) = if self.log >= o.log { (self, o) } else { (o, self) };
        let t = (lo.log - hi.log).exp();
        if hi.sign == lo.sign {
            LogReal { sign: hi.sign, log: hi.log + t.ln_1p() }
        } else if t >= 1.0 {
            LogReal::ZERO
        } else {
            LogReal { sign: hi.sign, log: hi.log + (-t).ln_1p() }
        }
    }
}

impl Neg for LogReal {
    type Output = LogReal;
    fn neg(self) -> LogReal {
        LogReal { sign: -self.sign, log: self.log }
    }
}

impl Sub for LogReal {
    type Output = LogReal;
    fn sub(self, o: LogReal) -> LogReal {
        self + (-o)
    }
}

impl Mul for LogReal {
    type Output = LogReal;
    fn mul(self, o: LogReal) -> LogReal {
        if self.sign == 0 || o.sign == 0 {
            return LogReal::ZERO;
        }
        LogReal { sign: self.sign * o.sign, log: self.log + o.log }
    }
}

impl PartialOrd for LogReal {
    fn partial_cmp(&self, o: &LogReal) -> Option<Ordering> {
        self.to_f64_ordering(o)
    }
}

impl LogReal {
    fn to_f64_ordering(&self, o: &LogReal) -> Option<Ordering> {
        match self.sign.cmp(&o.sign) {
            Ordering::Equal => match self.sign {
                0 => Some(Ordering::Equal),
                1 => self.log.partial_cmp(&o.log),
                _ => o.log.partial_cmp(&self.log),
            },
            c => Some(c),
        }
    }
}

impl fmt::Display for LogReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "0"),
            s => write!(f, "{}exp({})", if s < 0 { "-" } else { "" }, self.log),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SequenceMode {
    Geometric,
    G1Minimal,
    Explicit(Vec<BigInt>),
}

/// Twist powers `e_0..e_N` with growth base `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ESequence {
    a: BigRat,
    values: Vec<BigInt>,
    g1: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub a_growth: bool,
    pub g1: bool,
    /// First `k` with `e_{k+1} < a e_k`.
    pub a_violation: Option<usize>,
    /// First `k` with `e_{k+1} < (e_0 ... e_k)^2`.
    pub g1_violation: Option<usize>,
}

/// Builds `e_0..e_n` (so `n + 1` values). Explicit mode ignores `e0` and `n`.
pub fn make_esequence(a: BigRat, e0: BigInt, n: usize, mode: SequenceMode) -> Result<ESequence> {
    if a <= BigRat::one() {
        return invalid("growth base a must exceed 1");
    }
    let values = match mode {
        SequenceMode::Explicit(v) => v,
        SequenceMode::Geometric | SequenceMode::G1Minimal => {
            if e0 < BigInt::one() {
                return invalid("e0 must be at least 1");
            }
            if n < 1 {
                return invalid("need at least two terms");
            }
            let g1 = mode == SequenceMode::G1Minimal;
            let mut v = vec![e0];
            let mut prod = v[0].clone();
            for _ in 0..n {
                let last = v.last().unwrap();
                let mut next = ceil_rat(&(&a * rat_from_int(last)));
                if g1 {
                    let sq = &prod * &prod;
                    if sq > next {
                        next = sq;
                    }
                }
                prod *= &next;
                v.push(next);
            }
            v
        }
    };
    ESequence::new(a, values)
}

impl ESequence {
    /// Validates monotone `a`-growth and computes the (G1) flag.
    pub fn new(a: BigRat, values: Vec<BigInt>) -> Result<Self> {
        if a <= BigRat::one() {
            return invalid("growth base a must exceed 1");
        }
        if values.is_empty() {
            return invalid("empty sequence");
        }
        if values.iter().any(|e| !e.is_positive()) {
            return invalid("twist powers must be positive");
        }
        let mut s = ESequence { a, values, g1: false };
        let rep = growth_certificate(&s);
        if let Some(k) = rep.a_violation {
            return invalid(format!(
                "e_{} = {} < a * e_{} = {} * {}",
                k + 1,
                s.values[k + 1],
                k,
                format_rat(&s.a),
                s.values[k]
            ));
        }
        s.g1 = rep.g1;
        Ok(s)
    }

    pub fn a(&self) -> &BigRat {
        &self.a
    }

    pub fn values(&self) -> &[BigInt] {
        &self.values
    }

    pub fn g1(&self) -> bool {
        self.g1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn e(&self, k: usize) -> &BigInt {
        &self.values[k]
    }

    /// `e^h_j = e_{jm+h}` when present.
    pub fn sub(&self, m: usize, h: usize, j: usize) -> Option<&BigInt> {
        self.values.get(j * m + h)
    }

    pub fn ln_e(&self, k: usize) -> f64 {
        ln_bigint(&self.values[k])
    }

    /// Copy with one value replaced, bypassing validation (for fault injection).
    pub fn with_value_unchecked(&self, k: usize, v: BigInt) -> Self {
        let mut s = self.clone();
        s.values[k] = v;
        s
    }

    pub fn truncated(&self, len: usize) -> Self {
        let mut s = self.clone();
        s.values.truncate(len.max(1));
        s.g1 = growth_certificate(&s).g1;
        s
    }
}

pub fn growth_certificate(seq: &ESequence) -> GrowthReport {
    let v = &seq.values;
    let mut a_violation = None;
    let mut g1_violation = None;
    let mut prod = BigInt::one();
    for k in 0..v.len().saturating_sub(1) {
        prod *= &v[k];
        if a_violation.is_none() && rat_from_int(&v[k + 1]) < &seq.a * rat_from_int(&v[k]) {
            a_violation = Some(k);
        }
        if g1_violation.is_none() && v[k + 1] < &prod * &prod {
            g1_violation = Some(k);
        }
    }
    GrowthReport {
        a_growth: a_violation.is_none(),
        g1: g1_violation.is_none(),
        a_violation,
        g1_violation,
    }
}

#[derive(Serialize, Deserialize)]
struct ESequenceJson {
    a: String,
    values: Vec<String>,
    g1: bool,
}

impl Serialize for ESequence {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ESequenceJson {
            a: format_rat(&self.a),
            values: self.values.iter().map(|v| v.to_string()).collect(),
            g1: self.g1,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ESequence {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = ESequenceJson::deserialize(d)?;
        let a = parse_rat(&j.a).map_err(D::Error::custom)?;
        let values = j
            .values
            .iter()
            .map(|s| BigInt::from_str(s).map_err(|_| D::Error::custom(format!("bad integer {s:?}"))))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let seq = ESequence::new(a, values).map_err(D::Error::custom)?;
        if seq.g1 != j.g1 {
            return Err(D::Error::custom("g1 flag disagrees with the values"));
        }
        Ok(seq)
    }
}

/// Integer when the denominator is 1, otherwise `p/q`.
pub fn show_rat(r: &BigRat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format_rat(r)
    }
}

/// Serde helper storing a rational as a `"p/q"` string.
pub mod rat_str {
    use super::{format_rat, parse_rat, BigRat};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigRat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rat(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn doubling_sequence() {
        let s = make_esequence(rat(2, 1), int(1), 3, SequenceMode::Geometric).unwrap();
        assert_eq!(s.values(), ints(&[1, 2, 4, 8]).as_slice());
        assert!(!s.g1());
    }

    #[test]
    fn g1_minimal_small() {
        let s = make_esequence(rat(2, 1), int(2), 2, SequenceMode::G1Minimal).unwrap();
        assert_eq!(s.values(), ints(&[2, 4, 64]).as_slice());
        assert!(s.g1());
        // brute-force scan of both inequalities
        for k in 0..2 {
            let p: BigInt = s.values()[..=k].iter().product();
            assert!(s.values()[k + 1] >= &p * &p);
            assert!(s.values()[k + 1] >= int(2) * &s.values()[k]);
        }
    }

    #[test]
    fn explicit_violation_rejected() {
        let r = make_esequence(rat(2, 1), int(1), 1, SequenceMode::Explicit(ints(&[3, 5, 11])));
        assert!(r.is_err());
    }

    #[test]
    fn rejects_small_base() {
        assert!(make_esequence(rat(1, 1), int(1), 3, SequenceMode::Geometric).is_err());
        assert!(make_esequence(rat(2, 1), int(1), 0, SequenceMode::Geometric).is_err());
        assert!(make_esequence(rat(2, 1), int(0), 2, SequenceMode::Geometric).is_err());
        assert!(make_esequence(rat(2, 1), int(1), 0, SequenceMode::Explicit(vec![])).is_err());
    }

    #[test]
    fn certificate_examples() {
        let s = make_esequence(rat(2, 1), int(1), 3, SequenceMode::Geometric).unwrap();
        let r = growth_certificate(&s);
        assert!(r.a_growth && !r.g1);
        assert_eq!(r.g1_violation, Some(2));
        let s = make_esequence(rat(2, 1), int(1), 0, SequenceMode::Explicit(ints(&[2, 4, 64]))).unwrap();
        let r = growth_certificate(&s);
        assert!(r.a_growth && r.g1);
        let s = make_esequence(rat(2, 1), int(1), 0, SequenceMode::Explicit(ints(&[5]))).unwrap();
        let r = growth_certificate(&s);
        assert!(r.a_growth && r.g1 && r.a_violation.is_none() && r.g1_violation.is_none());
    }

    #[test]
    fn rational_ceiling() {
        let s = make_esequence(rat(5, 2), int(3), 2, SequenceMode::Geometric).unwrap();
        assert_eq!(s.values(), ints(&[3, 8, 20]).as_slice());
    }

    #[test]
    fn json_roundtrip() {
        let s = make_esequence(rat(3, 2), int(4), 5, SequenceMode::G1Minimal).unwrap();
        let j = serde_json::to_string(&s).unwrap();
        assert!(j.contains("\"a\":\"3/2\""));
        let back: ESequence = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
        let bad = r#"{"a":"2/1","values":["1","2","4"],"g1":false}"#;
        assert!(serde_json::from_str::<ESequence>(bad).is_err());
    }

    #[test]
    fn logreal_arithmetic() {
        let x = LogReal::from_f64(3.0);
        let y = LogReal::from_f64(-5.0);
        assert!(((x + y).to_f64() + 2.0).abs() < 1e-12);
        assert!(((x * y).to_f64() + 15.0).abs() < 1e-12);
        assert!(((x - x).to_f64()).abs() < 1e-12);
        assert!(y < x);
        let big = BigInt::from(10).pow(5000);
        let l = LogReal::from_bigint(&big);
        assert!((l.ln_abs() - 5000.0 * 10f64.ln()).abs() / l.ln_abs() < 1e-14);
    }
}
