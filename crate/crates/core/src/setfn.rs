//! Set functions on the ground set {1, …, n}, polymatroid axiom checking,
//! and the named minimal integer polymatroids of the extreme rays.
//!
//! Subsets are bitmasks: element i corresponds to bit i−1. The value of the
//! empty set is 0 implicitly and never stored.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num::bigint::BigInt;
use num::Integer;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Result};
use crate::exactlog::{LogValue, Rat};

/// Element count limit: everything in this crate lives on n ≤ 5.
pub const MAX_GROUND: usize = 5;

/// Bitmask over ground-set elements.
pub type Subset = u32;

pub fn full_set(n: usize) -> Subset {
    (1u32 << n) - 1
}

/// Masks of all nonempty subsets, in bitmask order.
pub fn nonempty_subsets(n: usize) -> impl Iterator<Item = Subset> {
    (1..=full_set(n)).filter(move |_| true)
}

/// Elements of a mask in increasing order (1-based labels).
pub fn elements(mask: Subset) -> Vec<usize> {
    (0..32).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect()
}

/// Subset key as a sorted digit string, e.g. {1,3} → "13".
pub fn subset_key(mask: Subset) -> String {
    elements(mask).iter().map(|e| e.to_string()).collect()
}

pub fn subset_from_key(key: &str, n: usize) -> Result<Subset> {
    let mut mask = 0u32;
    for ch in key.chars() {
        let d = ch
            .to_digit(10)
            .ok_or_else(|| domain(format!("bad subset key {key}")))? as usize;
        if d == 0 || d > n {
            return Err(domain(format!("element {d} outside ground set of size {n}")));
        }
        mask |= 1 << (d - 1);
    }
    if mask == 0 {
        return Err(domain("empty subset key"));
    }
    Ok(mask)
}

/// Nonempty subsets sorted by (cardinality, lexicographic element order):
/// 1, 2, 3, 4, 12, 13, 14, 23, 24, 34, 123, 124, 134, 234, 1234 for n = 4.
pub fn subsets_in_table_order(n: usize) -> Vec<Subset> {
    let mut masks: Vec<Subset> = nonempty_subsets(n).collect();
    masks.sort_by_key(|m| (m.count_ones(), elements(*m)));
    masks
}

/// A scalar a set function can take. Implemented for integers and LogValue.
pub trait Scalar: Clone + PartialEq {
    fn zero() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn sign(&self) -> Ordering;
}

impl Scalar for i64 {
    fn zero() -> Self {
        0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn sign(&self) -> Ordering {
        self.cmp(&0)
    }
}

impl Scalar for LogValue {
    fn zero() -> Self {
        LogValue::zero()
    }
    fn add(&self, other: &Self) -> Self {
        LogValue::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        LogValue::sub(self, other)
    }
    fn sign(&self) -> Ordering {
        LogValue::sign(self)
    }
}

/// A value for every nonempty subset of the ground set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SetFunction<T> {
    n: usize,
    values: Vec<T>, // indexed by mask − 1
}

/// Integer-valued set function (rank vectors of Table I and friends).
pub type RankVector = SetFunction<i64>;
/// Exact entropy vector.
pub type EntropyVector = SetFunction<LogValue>;

impl<T: Scalar> SetFunction<T> {
    pub fn from_fn(n: usize, f: impl Fn(Subset) -> T) -> Result<Self> {
        if n == 0 || n > MAX_GROUND {
            return Err(domain(format!("ground-set size {n} outside 1..={MAX_GROUND}")));
        }
        let values = (1..=full_set(n)).map(f).collect();
        Ok(SetFunction { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Value on a subset; the empty set yields 0.
    pub fn get(&self, mask: Subset) -> T {
        if mask == 0 {
            return T::zero();
        }
        assert!(mask <= full_set(self.n), "subset outside ground set");
        self.values[mask as usize - 1].clone()
    }

    /// Values in the canonical 2ⁿ−1 coordinate order (by size, then lex).
    pub fn table_row(&self) -> Vec<T> {
        subsets_in_table_order(self.n).into_iter().map(|m| self.get(m)).collect()
    }

    pub fn from_table_row(n: usize, row: &[T]) -> Result<Self> {
        if row.len() != (1usize << n) - 1 {
            return Err(domain(format!(
                "expected {} coordinates for n={n}, got {}",
                (1usize << n) - 1,
                row.len()
            )));
        }
        let order = subsets_in_table_order(n);
        let mut values = vec![T::zero(); row.len()];
        for (v, mask) in row.iter().zip(order) {
            values[mask as usize - 1] = v.clone();
        }
        Ok(SetFunction { n, values })
    }

    /// g(A) = f(σ⁻¹(A)) where `perm` sends old element i to perm[i−1] (1-based).
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.n)?;
        SetFunction::from_fn(self.n, |mask| {
            // σ⁻¹(A) = the set of elements mapped into A.
            let mut pre = 0u32;
            for (i, &img) in perm.iter().enumerate() {
                if mask >> (img - 1) & 1 == 1 {
                    pre |= 1 << i;
                }
            }
            self.get(pre)
        })
    }

    /// Restriction to the elements of `a`, reindexed to a ground set of size |a|.
    pub fn restrict(&self, a: Subset) -> Result<Self> {
        if a == 0 {
            return Err(domain("restriction to the empty set"));
        }
        let elems = elements(a);
        SetFunction::from_fn(elems.len(), |mask| {
            let mut orig = 0u32;
            for (i, e) in elems.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    orig |= 1 << (e - 1);
                }
            }
            self.get(orig)
        })
    }

    /// True iff every elemental inequality holds; violations are returned.
    pub fn is_polymatroid(&self) -> (bool, Vec<Elemental>) {
        let descriptors = elemental_inequalities(self.n).unwrap_or_default();
        let violated: Vec<Elemental> = descriptors
            .into_iter()
            .filter(|d| d.eval(self).sign() == Ordering::Less)
            .collect();
        (violated.is_empty(), violated)
    }
}

impl RankVector {
    /// gcd of all coordinates; 1 certifies the minimal integer polymatroid of a ray.
    pub fn coordinate_gcd(&self) -> i64 {
        self.values.iter().fold(0i64, |g, v| g.gcd(v))
    }

    /// Pointwise scaling into the exact entropy space.
    pub fn scale_log(&self, a: &LogValue) -> EntropyVector {
        SetFunction::from_fn(self.n, |mask| {
            a.scaled(&Rat::from(BigInt::from(self.get(mask))))
        })
        .expect("same ground set")
    }
}

/// h = a·r1 + b·r2 pointwise.
pub fn combine(a: &LogValue, r1: &RankVector, b: &LogValue, r2: &RankVector) -> Result<EntropyVector> {
    if r1.n() != r2.n() {
        return Err(domain("combine over mismatched ground sets"));
    }
    if a.sign() == Ordering::Less || b.sign() == Ordering::Less {
        return Err(domain("combine requires nonnegative coefficients"));
    }
    Ok(r1.scale_log(a).add_pointwise(&r2.scale_log(b)))
}

impl EntropyVector {
    pub fn add_pointwise(&self, other: &EntropyVector) -> EntropyVector {
        assert_eq!(self.n, other.n);
        SetFunction::from_fn(self.n, |mask| self.get(mask).add(&other.get(mask))).unwrap()
    }
}

/// One elemental inequality of the polymatroidal region.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Elemental {
    /// h(N) ≥ h(N ∖ {i})
    Mono { i: usize },
    /// h(K ∪ i) + h(K ∪ j) ≥ h(K) + h(K ∪ ij), i < j, K ⊆ N ∖ {i,j}
    Submod { i: usize, j: usize, k: Subset },
}

impl Elemental {
    /// Left-hand side minus right-hand side; nonnegative iff the inequality holds.
    pub fn eval<T: Scalar>(&self, f: &SetFunction<T>) -> T {
        match self {
            Elemental::Mono { i } => {
                let n = full_set(f.n());
                f.get(n).sub(&f.get(n & !(1 << (i - 1))))
            }
            Elemental::Submod { i, j, k } => {
                let bi = 1u32 << (i - 1);
                let bj = 1u32 << (j - 1);
                f.get(k | bi)
                    .add(&f.get(k | bj))
                    .sub(&f.get(*k))
                    .sub(&f.get(k | bi | bj))
            }
        }
    }

    /// Normal vector over the nonempty-subset coordinates (bitmask − 1 index).
    pub fn normal(&self, n: usize) -> Vec<i64> {
        let mut v = vec![0i64; (1usize << n) - 1];
        let mut bump = |mask: Subset, c: i64| {
            if mask != 0 {
                v[mask as usize - 1] += c;
            }
        };
        match self {
            Elemental::Mono { i } => {
                let full = full_set(n);
                bump(full, 1);
                bump(full & !(1 << (i - 1)), -1);
            }
            Elemental::Submod { i, j, k } => {
                let bi = 1u32 << (i - 1);
                let bj = 1u32 << (j - 1);
                bump(k | bi, 1);
                bump(k | bj, 1);
                bump(*k, -1);
                bump(k | bi | bj, -1);
            }
        }
        v
    }
}

impl fmt::Display for Elemental {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elemental::Mono { i } => write!(f, "h(N) >= h(N\\{i})"),
            Elemental::Submod { i, j, k } => {
                if *k == 0 {
                    write!(f, "h({i}) + h({j}) >= h({i}{j})")
                } else {
                    let ks = subset_key(*k);
                    write!(
                        f,
                        "h({ks}+{i}) + h({ks}+{j}) >= h({ks}) + h({ks}+{i}{j})"
                    )
                }
            }
        }
    }
}

/// All elemental inequalities for ground-set size n, in canonical order:
/// the n monotonicity descriptors first, then submodularity descriptors
/// sorted by (i, j, K). Count is n + C(n,2)·2^(n−2).
pub fn elemental_inequalities(n: usize) -> Result<Vec<Elemental>> {
    if !(2..=MAX_GROUND).contains(&n) {
        return Err(domain(format!("ground-set size {n} outside 2..={MAX_GROUND}")));
    }
    let mut out = Vec::new();
    for i in 1..=n {
        out.push(Elemental::Mono { i });
    }
    for i in 1..=n {
        for j in i + 1..=n {
            let rest = full_set(n) & !(1 << (i - 1)) & !(1 << (j - 1));
            let mut k = 0u32;
            loop {
                out.push(Elemental::Submod { i, j, k });
                if k == rest {
                    break;
                }
                k = (k.wrapping_sub(rest)) & rest; // next subset of `rest`
            }
        }
    }
    // Subsets of `rest` were produced in submask-iteration order; sort them.
    out.sort_by_key(|e| match e {
        Elemental::Mono { i } => (0, *i, 0, 0),
        Elemental::Submod { i, j, k } => (1, *i, *j, *k),
    });
    Ok(out)
}

fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(domain("permutation arity mismatch"));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p == 0 || p > n || seen[p - 1] {
            return Err(domain("not a permutation of the ground set"));
        }
        seen[p - 1] = true;
    }
    Ok(())
}

/// The eleven extreme-ray types of the degree-4 polymatroidal region, in the
/// canonical order used for ray ids.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RayType {
    /// U^i_{1,1}
    U11,
    /// U^α_{1,2}, |α| = 2
    U12,
    /// U^α_{1,3}, |α| = 3
    U13,
    /// U_{1,4}
    U14,
    /// U^α_{2,3}, |α| = 3
    U23,
    /// Wheel matroid W^α_2, |α| = 2
    W2,
    /// U_{2,4}
    U24,
    /// U_{3,4}
    U34,
    /// Polymatroid with free expansion U_{2,5}; α = special element
    UHat25,
    /// Polymatroid with free expansion U_{3,5}; α = special element
    UHat35,
    /// Polymatroid with free expansion the Vámos matroid, |α| = 2
    V8,
}

pub const RAY_TYPES: [RayType; 11] = [
    RayType::U11,
    RayType::U12,
    RayType::U13,
    RayType::U14,
    RayType::U23,
    RayType::W2,
    RayType::U24,
    RayType::U34,
    RayType::UHat25,
    RayType::UHat35,
    RayType::V8,
];

impl RayType {
    /// Size of the α parameter: 0 when the type is index-free.
    pub fn alpha_arity(self) -> usize {
        match self {
            RayType::U11 | RayType::UHat25 | RayType::UHat35 => 1,
            RayType::U12 | RayType::W2 | RayType::V8 => 2,
            RayType::U13 | RayType::U23 => 3,
            RayType::U14 | RayType::U24 | RayType::U34 => 0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RayType::U11 => "U1_1",
            RayType::U12 => "U1_2",
            RayType::U13 => "U1_3",
            RayType::U14 => "U1_4",
            RayType::U23 => "U2_3",
            RayType::W2 => "W2",
            RayType::U24 => "U2_4",
            RayType::U34 => "U3_4",
            RayType::UHat25 => "Uhat2_5",
            RayType::UHat35 => "Uhat3_5",
            RayType::V8 => "V8",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        RAY_TYPES
            .iter()
            .copied()
            .find(|t| t.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| domain(format!("unknown ray type {s}")))
    }
}

/// Uniform matroid rank min(k, |A|) on n elements.
pub fn uniform_matroid(k: i64, n: usize) -> Result<RankVector> {
    SetFunction::from_fn(n, |mask| (mask.count_ones() as i64).min(k))
}

/// Minimal integer polymatroid of the named extreme ray on N₄, with `alpha`
/// (a subset bitmask) selecting the labeled representative.
pub fn named_rank(ty: RayType, alpha: Subset) -> Result<RankVector> {
    let arity = ty.alpha_arity();
    if alpha.count_ones() as usize != arity || alpha & !full_set(4) != 0 {
        return Err(domain(format!(
            "{} wants an index set of size {arity}, got {}",
            ty.as_str(),
            subset_key(alpha)
        )));
    }
    let r = |f: &dyn Fn(Subset) -> i64| SetFunction::from_fn(4, f);
    match ty {
        RayType::U11 => r(&|a| i64::from(a & alpha != 0)),
        RayType::U12 => r(&|a| i64::from(a & alpha != 0)),
        RayType::U13 => r(&|a| i64::from(a & alpha != 0)),
        RayType::U14 => r(&|a| i64::from(a != 0)),
        RayType::U23 => r(&|a| ((a & alpha).count_ones() as i64).min(2)),
        RayType::W2 => r(&|a| {
            let collapsed = (a & !alpha).count_ones() + u32::from(a & alpha != 0);
            (collapsed as i64).min(2)
        }),
        RayType::U24 => r(&|a| (a.count_ones() as i64).min(2)),
        RayType::U34 => r(&|a| (a.count_ones() as i64).min(3)),
        RayType::UHat25 => r(&|a| {
            if a == alpha {
                2
            } else {
                (a.count_ones() as i64).min(2)
            }
        }),
        RayType::UHat35 => r(&|a| {
            if a & alpha != 0 {
                (a.count_ones() as i64 + 1).min(3)
            } else {
                a.count_ones() as i64
            }
        }),
        RayType::V8 => r(&|a| {
            if a.count_ones() == 2 && a != alpha {
                3
            } else {
                (2 * a.count_ones() as i64).min(4)
            }
        }),
    }
}

impl<T: Scalar + Serialize> Serialize for SetFunction<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<T> {
            n: usize,
            values: BTreeMap<String, T>,
        }
        let values = subsets_in_table_order(self.n)
            .into_iter()
            .map(|m| (subset_key(m), self.get(m)))
            .collect();
        Repr { n: self.n, values }.serialize(serializer)
    }
}

impl<'de, T: Scalar + Deserialize<'de>> Deserialize<'de> for SetFunction<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr<T> {
            n: usize,
            values: BTreeMap<String, T>,
        }
        let repr = Repr::<T>::deserialize(deserializer)?;
        if repr.values.len() != (1usize << repr.n) - 1 {
            return Err(D::Error::custom("wrong number of subset values"));
        }
        let mut out = SetFunction {
            n: repr.n,
            values: vec![T::zero(); (1usize << repr.n) - 1],
        };
        for (key, v) in repr.values {
            let mask = subset_from_key(&key, repr.n).map_err(D::Error::custom)?;
            out.values[mask as usize - 1] = v;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlog::rat;

    #[test]
    fn table_order_matches_column_convention() {
        let keys: Vec<String> = subsets_in_table_order(4).into_iter().map(subset_key).collect();
        assert_eq!(
            keys,
            ["1", "2", "3", "4", "12", "13", "14", "23", "24", "34", "123", "124", "134", "234", "1234"]
        );
    }

    #[test]
    fn elemental_counts() {
        assert_eq!(elemental_inequalities(2).unwrap().len(), 3);
        assert_eq!(elemental_inequalities(3).unwrap().len(), 9);
        assert_eq!(elemental_inequalities(4).unwrap().len(), 28);
        assert_eq!(elemental_inequalities(5).unwrap().len(), 85);
        for n in 2..=5 {
            let by_formula = n + n * (n - 1) / 2 * (1 << (n - 2));
            assert_eq!(elemental_inequalities(n).unwrap().len(), by_formula);
        }
        assert!(elemental_inequalities(1).is_err());
        assert!(elemental_inequalities(6).is_err());
    }

    #[test]
    fn named_rank_table_rows() {
        // Frozen 15-coordinate vectors in table order. The 234 coordinate of
        // the first row is 0: elements 2, 3, 4 are loops there, and 1 forces
        // a submodularity violation.
        let cases: [(RayType, Subset, [i64; 15]); 11] = [
            (RayType::U11, 0b0001, [1, 0, 0, 0, 1, 1, 1, 0, 0, 0, 1, 1, 1, 0, 1]),
            (RayType::U12, 0b0011, [1, 1, 0, 0, 1, 1, 1, 1, 1, 0, 1, 1, 1, 1, 1]),
            (RayType::U13, 0b0111, [1, 1, 1, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1]),
            (RayType::U14, 0, [1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1]),
            (RayType::U23, 0b0111, [1, 1, 1, 0, 2, 2, 1, 2, 1, 1, 2, 2, 2, 2, 2]),
            (RayType::W2, 0b0011, [1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2]),
            (RayType::U24, 0, [1, 1, 1, 1, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2]),
            (RayType::U34, 0, [1, 1, 1, 1, 2, 2, 2, 2, 2, 2, 3, 3, 3, 3, 3]),
            (RayType::UHat25, 0b0001, [2, 1, 1, 1, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2]),
            (RayType::UHat35, 0b0001, [2, 1, 1, 1, 3, 3, 3, 2, 2, 2, 3, 3, 3, 3, 3]),
            (RayType::V8, 0b0011, [2, 2, 2, 2, 4, 3, 3, 3, 3, 3, 4, 4, 4, 4, 4]),
        ];
        for (ty, alpha, row) in cases {
            let r = named_rank(ty, alpha).unwrap();
            assert_eq!(r.table_row(), row, "{}", ty.as_str());
            let (ok, viol) = r.is_polymatroid();
            assert!(ok, "{} violates {:?}", ty.as_str(), viol);
            assert_eq!(r.coordinate_gcd(), 1, "{}", ty.as_str());
        }
        assert!(named_rank(RayType::U11, 0b0011).is_err());
        assert!(named_rank(RayType::U24, 0b0001).is_err());
    }

    #[test]
    fn polymatroid_violations_reported() {
        // h(1)=1 but h(12)=0 violates monotonicity through submodularity of
        // the elemental system.
        let mut row = [1i64; 15];
        row[4] = 0; // coordinate "12"
        let f = RankVector::from_table_row(4, &row).unwrap();
        let (ok, viol) = f.is_polymatroid();
        assert!(!ok);
        assert!(!viol.is_empty());
    }

    #[test]
    fn permute_and_restrict() {
        let u11 = named_rank(RayType::U11, 0b0001).unwrap();
        let u11_at3 = named_rank(RayType::U11, 0b0100).unwrap();
        // Transposition (1 3).
        assert_eq!(u11.permute(&[3, 2, 1, 4]).unwrap(), u11_at3);
        let u24 = named_rank(RayType::U24, 0).unwrap();
        assert_eq!(u24.permute(&[2, 3, 4, 1]).unwrap(), u24);
        assert_eq!(u24.permute(&[1, 2, 3, 4]).unwrap(), u24);

        // restrict(U_{2,4}, {1,2,4}) is U_{2,3} on three elements.
        let r = u24.restrict(0b1011).unwrap();
        assert_eq!(r, uniform_matroid(2, 3).unwrap());
        assert_eq!(u24.restrict(full_set(4)).unwrap(), u24);
        let u23 = named_rank(RayType::U23, 0b0111).unwrap();
        let z = u23.restrict(0b1000).unwrap();
        assert_eq!(z.table_row(), vec![0]);
        assert!(u24.restrict(0).is_err());
    }

    #[test]
    fn combine_scales_rows() {
        let u24 = named_rank(RayType::U24, 0).unwrap();
        let z = combine(&LogValue::zero(), &u24, &LogValue::zero(), &u24).unwrap();
        assert!(z.table_row().iter().all(|v| v.is_zero()));
        let log2 = LogValue::log_int(2).unwrap();
        let h = combine(&log2, &u24, &LogValue::zero(), &u24).unwrap();
        assert_eq!(h.get(0b0011), log2.scaled(&rat(2, 1)));
        let (ok, _) = h.is_polymatroid();
        assert!(ok);
    }

    #[test]
    fn restriction_preserves_polymatroid() {
        for ty in RAY_TYPES {
            let alpha = match ty.alpha_arity() {
                0 => 0,
                1 => 0b0010,
                2 => 0b0110,
                _ => 0b1110,
            };
            let r = named_rank(ty, alpha).unwrap();
            for a in nonempty_subsets(4) {
                if a.count_ones() >= 2 {
                    let (ok, _) = r.restrict(a).unwrap().is_polymatroid();
                    assert!(ok);
                }
            }
        }
    }
}
