//! Exact scalars of the form Σ q_p · log p over primes p with rational q_p.
//!
//! Logarithms of distinct primes are linearly independent over the rationals,
//! so equality is decidable by comparing coefficient maps, and the sign of a
//! nonzero value is certified by comparing the integer products Π p^{c_p}
//! on the positive and negative sides of the combination.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num::bigint::{BigInt, BigUint};
use num::rational::BigRational;
use num::{Integer, One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Result};

/// Exact rational scalar used throughout the crate.
pub type Rat = BigRational;

/// Convenience constructor for small rationals.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Trial-division factorization. Inputs here are array orders and partition
/// parts, all tiny.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// A rational linear combination of logarithms of primes.
///
/// The representation is base-free: `coeffs[p]` is the coefficient of log p.
/// Canonical form stores no zero coefficients; the zero value is the empty map.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LogValue {
    coeffs: BTreeMap<u64, Rat>,
}

impl LogValue {
    pub fn zero() -> Self {
        LogValue::default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Read-only view of the canonical coefficient map.
    pub fn coeffs(&self) -> &BTreeMap<u64, Rat> {
        &self.coeffs
    }

    pub fn from_coeffs(coeffs: BTreeMap<u64, Rat>) -> Result<Self> {
        for p in coeffs.keys() {
            if factorize(*p) != vec![(*p, 1)] {
                return Err(domain(format!("{p} is not prime")));
            }
        }
        let mut v = LogValue { coeffs };
        v.normalize();
        Ok(v)
    }

    fn normalize(&mut self) {
        self.coeffs.retain(|_, q| !q.is_zero());
    }

    /// log n for a positive integer, expanded over the prime factorization.
    /// log 1 is the zero value.
    pub fn log_int(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(domain("log of 0 requested"));
        }
        let coeffs = factorize(n)
            .into_iter()
            .map(|(p, e)| (p, Rat::from(BigInt::from(e))))
            .collect();
        Ok(LogValue { coeffs })
    }

    /// Shannon entropy of the distribution (α_1/D, …, α_k/D) with D = Σ α_i,
    /// as the exact value log D − (1/D) Σ α_i log α_i.
    pub fn entropy_of_ratios(alpha: &[u64]) -> Result<Self> {
        if alpha.is_empty() {
            return Err(domain("entropy of an empty ratio list"));
        }
        if alpha.iter().any(|&a| a == 0) {
            return Err(domain("entropy ratios must be positive"));
        }
        let d: u64 = alpha.iter().sum();
        let mut acc = LogValue::log_int(d)?;
        let dr = Rat::from(BigInt::from(d));
        for &a in alpha {
            let term = LogValue::log_int(a)?.scaled(&(Rat::from(BigInt::from(a)) / &dr));
            acc = acc.sub(&term);
        }
        Ok(acc)
    }

    /// Entropy of an explicit rational probability, −w log w, as a LogValue.
    /// `w` must satisfy 0 < w ≤ 1.
    pub fn neg_w_log_w(w: &Rat) -> Result<Self> {
        if !w.is_positive() || w > &Rat::one() {
            return Err(domain("probability mass outside (0, 1]"));
        }
        let num = w.numer().to_u64().ok_or_else(|| domain("weight numerator too large"))?;
        let den = w.denom().to_u64().ok_or_else(|| domain("weight denominator too large"))?;
        // −w (log num − log den) = w log den − w log num
        let v = LogValue::log_int(den)?.sub(&LogValue::log_int(num)?);
        Ok(v.scaled(w))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (p, q) in &other.coeffs {
            let entry = coeffs.entry(*p).or_insert_with(Rat::zero);
            *entry += q;
        }
        let mut v = LogValue { coeffs };
        v.normalize();
        v
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        LogValue {
            coeffs: self.coeffs.iter().map(|(p, q)| (*p, -q)).collect(),
        }
    }

    pub fn scaled(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return LogValue::zero();
        }
        LogValue {
            coeffs: self.coeffs.iter().map(|(p, q)| (*p, q * c)).collect(),
        }
    }

    /// Certified sign of the value.
    ///
    /// Fast path is a floating evaluation with a conservative error bound;
    /// when inconclusive the sign is decided exactly by clearing denominators
    /// and comparing the two integer products Π p^{c_p}.
    pub fn sign(&self) -> Ordering {
        if self.coeffs.is_empty() {
            return Ordering::Equal;
        }
        let mut val = 0f64;
        let mut mag = 0f64;
        for (p, q) in &self.coeffs {
            let qf = ratio_to_f64(q);
            let term = qf * (*p as f64).ln();
            val += term;
            mag += term.abs();
        }
        let tol = mag * 1e-9 + 1e-300;
        if val > tol {
            return Ordering::Greater;
        }
        if val < -tol {
            return Ordering::Less;
        }
        self.sign_exact()
    }

    fn sign_exact(&self) -> Ordering {
        // Common denominator D: the sign of Σ (q_p · D) log p equals the sign
        // of Π_{c>0} p^{c_p}  −  Π_{c<0} p^{−c_p} as big integers.
        let mut d = BigInt::one();
        for q in self.coeffs.values() {
            d = d.lcm(q.denom());
        }
        let mut pos = BigUint::one();
        let mut neg = BigUint::one();
        for (p, q) in &self.coeffs {
            let c = q * Rat::from(d.clone());
            debug_assert!(c.is_integer());
            let c = c.to_integer();
            let e = c
                .magnitude()
                .to_u32()
                .expect("exponent exceeds exact-comparison capacity");
            let pw = BigUint::from(*p).pow(e);
            if c.is_positive() {
                pos *= pw;
            } else {
                neg *= pw;
            }
        }
        pos.cmp(&neg)
    }

    /// Smallest integer v ≥ 1 with self ≤ log v. Requires self ≥ 0.
    pub fn ceil_exp(&self) -> Result<u64> {
        if self.sign() == Ordering::Less {
            return Err(domain("ceil_exp of a negative value"));
        }
        let guess = self.to_f64_base(std::f64::consts::E).exp();
        let mut v = (guess.floor() as i64 - 2).max(1) as u64;
        loop {
            if self.cmp(&LogValue::log_int(v)?) != Ordering::Greater {
                return Ok(v);
            }
            v += 1;
        }
    }

    /// If the value equals log k for a positive integer k, return k.
    pub fn as_log_integer(&self) -> Option<u64> {
        let mut k: u64 = 1;
        for (p, q) in &self.coeffs {
            if !q.is_integer() || q.is_negative() {
                return None;
            }
            let e = q.to_integer().to_u32()?;
            let mut pw: u64 = 1;
            for _ in 0..e {
                pw = pw.checked_mul(*p)?;
            }
            k = k.checked_mul(pw)?;
        }
        Some(k)
    }

    /// Numeric evaluation with logarithms taken to `base`.
    pub fn to_f64_base(&self, base: f64) -> f64 {
        let lb = base.ln();
        self.coeffs
            .iter()
            .map(|(p, q)| ratio_to_f64(q) * (*p as f64).ln() / lb)
            .sum()
    }

    /// Value in bits (base-2 logarithms).
    pub fn bits(&self) -> f64 {
        self.to_f64_base(2.0)
    }

    /// Display string in bits to six decimals.
    pub fn bits_string(&self) -> String {
        format!("{:.6}", self.bits())
    }
}

fn ratio_to_f64(q: &Rat) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        let n = q.numer().to_f64().unwrap_or(f64::MAX);
        let d = q.denom().to_f64().unwrap_or(f64::MAX);
        n / d
    })
}

impl PartialOrd for LogValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LogValue {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.coeffs == other.coeffs {
            return Ordering::Equal;
        }
        self.sub(other).sign()
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (p, q) in &self.coeffs {
            if first {
                if q.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if q.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = q.abs();
            if a.is_one() {
                write!(f, "log({p})")?;
            } else {
                write!(f, "{a}*log({p})")?;
            }
        }
        Ok(())
    }
}

impl Serialize for LogValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            coeffs: BTreeMap<String, String>,
            #[serde(skip_serializing_if = "Option::is_none")]
            bits: Option<&'a str>,
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|(p, q)| (p.to_string(), q.to_string()))
            .collect();
        Repr { coeffs, bits: None }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LogValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            coeffs: BTreeMap<String, String>,
        }
        let repr = Repr::deserialize(deserializer)?;
        let mut coeffs = BTreeMap::new();
        for (p, q) in repr.coeffs {
            let p: u64 = p.parse().map_err(D::Error::custom)?;
            let q: Rat = q.parse().map_err(D::Error::custom)?;
            coeffs.insert(p, q);
        }
        LogValue::from_coeffs(coeffs).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(pairs: &[(u64, (i64, i64))]) -> LogValue {
        LogValue::from_coeffs(pairs.iter().map(|&(p, (n, d))| (p, rat(n, d))).collect()).unwrap()
    }

    #[test]
    fn log_int_factorizes() {
        assert!(LogValue::log_int(1).unwrap().is_zero());
        assert_eq!(LogValue::log_int(6).unwrap(), lv(&[(2, (1, 1)), (3, (1, 1))]));
        assert_eq!(LogValue::log_int(12).unwrap(), lv(&[(2, (2, 1)), (3, (1, 1))]));
        assert!(LogValue::log_int(0).is_err());
    }

    #[test]
    fn entropy_of_ratios_examples() {
        let h = LogValue::entropy_of_ratios(&[1, 1]).unwrap();
        assert_eq!(h, LogValue::log_int(2).unwrap());
        assert!(LogValue::entropy_of_ratios(&[4]).unwrap().is_zero());
        // Hand expansion of −(1/3)log(1/3) − (2/3)log(2/3) = log 3 − (2/3)log 2.
        let h = LogValue::entropy_of_ratios(&[1, 2]).unwrap();
        assert_eq!(h, lv(&[(3, (1, 1)), (2, (-2, 3))]));
        assert!(LogValue::entropy_of_ratios(&[]).is_err());
        assert!(LogValue::entropy_of_ratios(&[1, 0]).is_err());
    }

    #[test]
    fn cmp_examples() {
        let four = LogValue::log_int(4).unwrap();
        let two_log2 = LogValue::log_int(2).unwrap().scaled(&rat(2, 1));
        assert_eq!(four.cmp(&two_log2), Ordering::Equal);
        assert_eq!(
            LogValue::log_int(2).unwrap().cmp(&LogValue::log_int(3).unwrap()),
            Ordering::Less
        );
        let h3 = LogValue::entropy_of_ratios(&[1, 1, 1]).unwrap();
        assert_eq!(h3.cmp(&LogValue::log_int(3).unwrap()), Ordering::Equal);
    }

    #[test]
    fn cmp_survives_tiny_differences() {
        // log(2^13/8192) = 0 exactly; a nearby combination must be separated.
        let a = LogValue::log_int(8192).unwrap();
        let b = LogValue::log_int(2).unwrap().scaled(&rat(13, 1));
        assert_eq!(a.cmp(&b), Ordering::Equal);
        // 485 log 2 vs 313 log 3 − tiny: ratio log3/log2 ≈ 1.5849625007, and
        // 496/313 ≈ 1.5847… differs in the 4th decimal; exact path must agree
        // with the float sign.
        let x = LogValue::log_int(2).unwrap().scaled(&rat(496, 1));
        let y = LogValue::log_int(3).unwrap().scaled(&rat(313, 1));
        assert_eq!(x.cmp(&y), Ordering::Less);
    }

    #[test]
    fn ceil_exp_and_log_integer() {
        assert_eq!(LogValue::zero().ceil_exp().unwrap(), 1);
        assert_eq!(LogValue::log_int(5).unwrap().ceil_exp().unwrap(), 5);
        let h = LogValue::entropy_of_ratios(&[1, 2]).unwrap(); // below log 2
        assert_eq!(h.ceil_exp().unwrap(), 2);
        let h = LogValue::entropy_of_ratios(&[1, 1, 2]).unwrap(); // in (log 2, log 3]
        assert_eq!(h.ceil_exp().unwrap(), 3);
        assert_eq!(LogValue::log_int(12).unwrap().as_log_integer(), Some(12));
        assert_eq!(h.as_log_integer(), None);
        assert_eq!(LogValue::zero().as_log_integer(), Some(1));
    }

    #[test]
    fn float_consistency() {
        let h = LogValue::entropy_of_ratios(&[1, 1, 2]).unwrap();
        let expect = -(0.25f64.log2() * 0.25) * 2.0 - 0.5f64.log2() * 0.5;
        assert!((h.bits() - expect).abs() < 1e-12);
        assert_eq!(LogValue::log_int(2).unwrap().bits_string(), "1.000000");
    }

    #[test]
    fn json_round_trip() {
        let h = LogValue::entropy_of_ratios(&[1, 2]).unwrap();
        let js = serde_json::to_string(&h).unwrap();
        assert!(js.contains("\"coeffs\""));
        let back: LogValue = serde_json::from_str(&js).unwrap();
        assert_eq!(back, h);
    }
}
