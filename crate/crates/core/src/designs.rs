//! Mixed-level variable-strength orthogonal arrays: verification against an
//! integer polymatroid, constructions for the named rank functions, and the
//! correspondences with Latin squares and cubes.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{domain, shape, Error, Result};
use crate::latin::{all_squares, LatinSquare};
use crate::setfn::{
    full_set, named_rank, nonempty_subsets, uniform_matroid, RankVector, RayType,
    SetFunction, Subset,
};

/// A rows × columns symbol matrix with a per-column alphabet size.
/// Every entry in column c lies below `alphabets[c]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ArrayT {
    alphabets: Vec<u64>,
    rows: Vec<Vec<u32>>,
}

impl ArrayT {
    pub fn new(alphabets: Vec<u64>, rows: Vec<Vec<u32>>) -> Result<Self> {
        for row in &rows {
            if row.len() != alphabets.len() {
                return Err(shape(format!(
                    "row of width {} in an array of {} columns",
                    row.len(),
                    alphabets.len()
                )));
            }
            for (c, &e) in row.iter().enumerate() {
                if u64::from(e) >= alphabets[c] {
                    return Err(domain(format!(
                        "symbol {e} outside alphabet of size {} in column {c}",
                        alphabets[c]
                    )));
                }
            }
        }
        Ok(ArrayT { alphabets, rows })
    }

    pub fn ncols(&self) -> usize {
        self.alphabets.len()
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn alphabets(&self) -> &[u64] {
        &self.alphabets
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn row(&self, j: usize) -> &[u32] {
        &self.rows[j]
    }

    /// The subarray T(A) of the columns indexed by `cols` (0-based), keeping
    /// row order.
    pub fn project(&self, cols: &[usize]) -> ArrayT {
        let alphabets = cols.iter().map(|&c| self.alphabets[c]).collect();
        let rows = self
            .rows
            .iter()
            .map(|r| cols.iter().map(|&c| r[c]).collect())
            .collect();
        ArrayT { alphabets, rows }
    }

    /// Row j of T(A).
    pub fn subrow(&self, cols: &[usize], j: usize) -> Vec<u32> {
        cols.iter().map(|&c| self.rows[j][c]).collect()
    }

    /// Rows sorted lexicographically; the canonical form used for round trips.
    pub fn canonical_sorted(&self) -> ArrayT {
        let mut rows = self.rows.clone();
        rows.sort();
        ArrayT {
            alphabets: self.alphabets.clone(),
            rows,
        }
    }

    /// Apply a symbol permutation to one column.
    pub fn relabel_column(&self, col: usize, perm: &[u32]) -> Result<ArrayT> {
        if perm.len() as u64 != self.alphabets[col] {
            return Err(domain("relabeling does not cover the column alphabet"));
        }
        let mut rows = self.rows.clone();
        for r in &mut rows {
            r[col] = perm[r[col] as usize];
        }
        Ok(ArrayT {
            alphabets: self.alphabets.clone(),
            rows,
        })
    }

    /// Multiplicity of every row of T(A).
    pub fn projection_counts(&self, cols: &[usize]) -> HashMap<Vec<u32>, u64> {
        let mut counts: HashMap<Vec<u32>, u64> = HashMap::new();
        for j in 0..self.nrows() {
            *counts.entry(self.subrow(cols, j)).or_insert(0) += 1;
        }
        counts
    }

    /// Textual header-plus-rows format:
    /// `n=<cols> rows=<rows> alphabets=<a1,a2,...>` then one row per line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let alph: Vec<String> = self.alphabets.iter().map(u64::to_string).collect();
        let _ = writeln!(
            s,
            "n={} rows={} alphabets={}",
            self.ncols(),
            self.nrows(),
            alph.join(",")
        );
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(u32::to_string).collect();
            let _ = writeln!(s, "{}", cells.join(" "));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty array file".into()))?;
        let mut ncols = None;
        let mut nrows = None;
        let mut alphabets: Option<Vec<u64>> = None;
        for field in header.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad header field {field}")))?;
            match key {
                "n" => ncols = Some(value.parse::<usize>().map_err(|e| Error::Parse(e.to_string()))?),
                "rows" => nrows = Some(value.parse::<usize>().map_err(|e| Error::Parse(e.to_string()))?),
                "alphabets" => {
                    let parsed: std::result::Result<Vec<u64>, _> =
                        value.split(',').map(str::parse).collect();
                    alphabets = Some(parsed.map_err(|e| Error::Parse(format!("{e}")))?);
                }
                other => return Err(Error::Parse(format!("unknown header key {other}"))),
            }
        }
        let ncols = ncols.ok_or_else(|| Error::Parse("missing n=".into()))?;
        let nrows = nrows.ok_or_else(|| Error::Parse("missing rows=".into()))?;
        let alphabets = alphabets.ok_or_else(|| Error::Parse("missing alphabets=".into()))?;
        if alphabets.len() != ncols {
            return Err(Error::Parse("alphabet count differs from n".into()));
        }
        let mut rows = Vec::with_capacity(nrows);
        for line in lines.take(nrows) {
            let row: std::result::Result<Vec<u32>, _> =
                line.split_whitespace().map(str::parse).collect();
            rows.push(row.map_err(|e| Error::Parse(format!("{e}")))?);
        }
        if rows.len() != nrows {
            return Err(Error::Parse(format!(
                "expected {nrows} rows, found {}",
                rows.len()
            )));
        }
        ArrayT::new(alphabets, rows)
    }
}

/// Outcome of an MVOA check: a verdict plus the first violation found.
#[derive(Clone, Debug, Serialize)]
pub struct MvoaCheck {
    pub ok: bool,
    pub violation: Option<MvoaViolation>,
}

/// A projection row whose multiplicity differs from v^(r(N) − r(A)).
#[derive(Clone, Debug, Serialize)]
pub struct MvoaViolation {
    /// Subset of column indices (1-based mask) of the offending projection.
    pub subset: Subset,
    pub row: Vec<u32>,
    pub expected: u64,
    pub actual: u64,
}

fn pow_checked(v: u64, e: i64) -> Result<u64> {
    if e < 0 {
        return Err(domain("negative rank"));
    }
    let mut out: u64 = 1;
    for _ in 0..e {
        out = out
            .checked_mul(v)
            .ok_or_else(|| domain("v^r overflows the row budget"))?;
    }
    Ok(out)
}

fn mask_to_cols(mask: Subset) -> Vec<usize> {
    crate::setfn::elements(mask).into_iter().map(|e| e - 1).collect()
}

/// Check that `t` is an MVOA induced by the integer polymatroid `p` with base
/// level `v`: every row of every projection T(A) occurs exactly
/// v^(r(N)−r(A)) times.
///
/// Shape problems (row count, alphabet sizes) are reported as errors, distinct
/// from a well-shaped array failing verification.
pub fn is_mvoa(p: &RankVector, v: u64, t: &ArrayT) -> Result<MvoaCheck> {
    if v == 0 {
        return Err(domain("base level must be at least 1"));
    }
    let n = p.n();
    if t.ncols() != n {
        return Err(shape(format!("{} columns for a ground set of {n}", t.ncols())));
    }
    let (poly, _) = p.is_polymatroid();
    if !poly {
        return Err(domain("rank function is not an integer polymatroid"));
    }
    let total = p.get(full_set(n));
    let want_rows = pow_checked(v, total)?;
    if t.nrows() as u64 != want_rows {
        return Err(shape(format!("{} rows, expected v^r(N) = {want_rows}", t.nrows())));
    }
    for i in 0..n {
        let want = pow_checked(v, p.get(1 << i))?;
        if t.alphabets()[i] != want {
            return Err(shape(format!(
                "column {} alphabet {}, expected v^r = {want}",
                i + 1,
                t.alphabets()[i]
            )));
        }
    }
    for mask in nonempty_subsets(n) {
        let cols = mask_to_cols(mask);
        let expected = pow_checked(v, total - p.get(mask))?;
        let counts = t.projection_counts(&cols);
        // Canonical first violation: smallest offending row in the smallest
        // subset (masks ascend in this loop). Only rows that occur are
        // constrained; their multiplicities already force the projection to
        // have exactly v^r(A) distinct rows.
        let mut bad: Option<(Vec<u32>, u64)> = None;
        for (row, &count) in &counts {
            if count != expected && bad.as_ref().is_none_or(|(r, _)| row < r) {
                bad = Some((row.clone(), count));
            }
        }
        if let Some((row, actual)) = bad {
            return Ok(MvoaCheck {
                ok: false,
                violation: Some(MvoaViolation {
                    subset: mask,
                    row,
                    expected,
                    actual,
                }),
            });
        }
    }
    Ok(MvoaCheck { ok: true, violation: None })
}

/// All over- or under-represented rows of one projection, for reporting.
pub fn projection_multiplicity_errors(
    p: &RankVector,
    v: u64,
    t: &ArrayT,
    mask: Subset,
) -> Result<Vec<(Vec<u32>, u64, u64)>> {
    let total = p.get(full_set(p.n()));
    let expected = pow_checked(v, total - p.get(mask))?;
    let counts = t.projection_counts(&mask_to_cols(mask));
    let mut bad: Vec<(Vec<u32>, u64, u64)> = counts
        .into_iter()
        .filter(|&(_, c)| c != expected)
        .map(|(row, c)| (row, expected, c))
        .collect();
    bad.sort();
    Ok(bad)
}

/// VOA of the rank-2 uniform matroid on three columns: the cyclic
/// construction (i, j, (i+j) mod v).
pub fn construct_voa_u23(v: u64) -> Result<ArrayT> {
    if v == 0 {
        return Err(domain("order must be at least 1"));
    }
    let rows = (0..v)
        .flat_map(|i| (0..v).map(move |j| vec![i as u32, j as u32, ((i + j) % v) as u32]))
        .collect();
    ArrayT::new(vec![v, v, v], rows)
}

// ---------------------------------------------------------------------------
// Finite fields for the orthogonal-square constructions.

/// Arithmetic in GF(p^k) for small prime powers, with element encoding
/// 0..q−1 in base p over a brute-forced irreducible polynomial.
pub(crate) struct Gf {
    q: u64,
    add: Vec<u64>,
    mul: Vec<u64>,
}

impl Gf {
    pub fn new(q: u64) -> Result<Gf> {
        let factors = crate::exactlog::factorize(q);
        if factors.len() != 1 {
            return Err(domain(format!("{q} is not a prime power")));
        }
        let (p, k) = factors[0];
        let kk = k as usize;
        if q > 4096 {
            return Err(domain("field too large"));
        }
        // Coefficient vectors of length k (little-endian digits of the code).
        let digits = |mut x: u64| -> Vec<u64> {
            let mut d = vec![0u64; kk];
            for slot in d.iter_mut() {
                *slot = x % p;
                x /= p;
            }
            d
        };
        let encode = |d: &[u64]| -> u64 { d.iter().rev().fold(0, |acc, &c| acc * p + c) };
        let modpoly = irreducible_poly(p, kk);
        let polymul = |a: &[u64], b: &[u64]| -> Vec<u64> {
            let mut prod = vec![0u64; a.len() + b.len()];
            for (i, &ai) in a.iter().enumerate() {
                for (j, &bj) in b.iter().enumerate() {
                    prod[i + j] = (prod[i + j] + ai * bj) % p;
                }
            }
            // Reduce modulo the monic irreducible of degree k.
            for d in (kk..prod.len()).rev() {
                let c = prod[d];
                if c == 0 {
                    continue;
                }
                prod[d] = 0;
                for (off, &mc) in modpoly.iter().enumerate().take(kk) {
                    let idx = d - kk + off;
                    prod[idx] = (prod[idx] + c * (p - mc) % p) % p;
                }
            }
            prod.truncate(kk);
            prod
        };
        let mut add = vec![0u64; (q * q) as usize];
        let mut mul = vec![0u64; (q * q) as usize];
        for x in 0..q {
            for y in 0..q {
                let dx = digits(x);
                let dy = digits(y);
                let sum: Vec<u64> = dx.iter().zip(&dy).map(|(a, b)| (a + b) % p).collect();
                add[(x * q + y) as usize] = encode(&sum);
                mul[(x * q + y) as usize] = encode(&polymul(&dx, &dy));
            }
        }
        Ok(Gf { q, add, mul })
    }

    pub fn add(&self, x: u64, y: u64) -> u64 {
        self.add[(x * self.q + y) as usize]
    }

    pub fn mul(&self, x: u64, y: u64) -> u64 {
        self.mul[(x * self.q + y) as usize]
    }
}

/// Monic irreducible polynomial of degree k over GF(p), as its k low
/// coefficients (the x^k coefficient is implicitly 1).
fn irreducible_poly(p: u64, k: usize) -> Vec<u64> {
    if k == 1 {
        return vec![0];
    }
    let eval_candidates = |coeffs: &[u64]| -> bool {
        // Irreducible iff no monic factor of degree 1..=k/2 divides it.
        let mut full = coeffs.to_vec();
        full.push(1);
        for d in 1..=k / 2 {
            let mut divisor_lo = vec![0u64; d];
            loop {
                let mut divisor = divisor_lo.clone();
                divisor.push(1);
                if poly_divides(p, &divisor, &full) {
                    return false;
                }
                // Next divisor in base-p counting.
                let mut idx = 0;
                loop {
                    if idx == d {
                        break;
                    }
                    divisor_lo[idx] += 1;
                    if divisor_lo[idx] < p {
                        break;
                    }
                    divisor_lo[idx] = 0;
                    idx += 1;
                }
                if idx == d {
                    break;
                }
            }
        }
        true
    };
    let mut lo = vec![0u64; k];
    loop {
        if lo[0] != 0 && eval_candidates(&lo) {
            return lo;
        }
        let mut idx = 0;
        loop {
            lo[idx] += 1;
            if lo[idx] < p {
                break;
            }
            lo[idx] = 0;
            idx += 1;
            if idx == k {
                unreachable!("an irreducible polynomial of degree {k} over GF({p}) exists");
            }
        }
    }
}

fn poly_divides(p: u64, divisor: &[u64], dividend: &[u64]) -> bool {
    let mut rem = dividend.to_vec();
    let dd = divisor.len() - 1;
    while rem.len() > dd {
        let lead = *rem.last().unwrap();
        if lead != 0 {
            let off = rem.len() - 1 - dd;
            for (i, &dc) in divisor.iter().enumerate() {
                rem[off + i] = (rem[off + i] + lead * (p - dc % p) % p) % p;
            }
        }
        rem.pop();
    }
    rem.iter().all(|&c| c == 0)
}

// ---------------------------------------------------------------------------
// Constructions.

/// VOA of U_{2,4}: a pair of orthogonal Latin squares packed as rows
/// (x, y, x+y, x+λy) over GF(v) for prime powers, with the product
/// construction covering composites whose maximal prime-power factors are
/// all at least 3. Orders 2 and 6 do not exist.
pub fn construct_mols(v: u64) -> Result<ArrayT> {
    if v == 0 {
        return Err(domain("order must be at least 1"));
    }
    if v == 2 || v == 6 {
        return Err(Error::Nonexistence(format!(
            "no pair of orthogonal Latin squares of order {v} exists"
        )));
    }
    if v == 1 {
        return ArrayT::new(vec![1; 4], vec![vec![0, 0, 0, 0]]);
    }
    let factors = crate::exactlog::factorize(v);
    if factors.len() == 1 {
        let gf = Gf::new(v)?;
        // Any element outside {0, 1} serves as λ; code 2 exists since v ≥ 3.
        let lambda = 2;
        let rows = (0..v)
            .flat_map(|x| {
                (0..v).map(move |y| (x, y))
            })
            .map(|(x, y)| {
                vec![
                    x as u32,
                    y as u32,
                    gf.add(x, y) as u32,
                    gf.add(x, gf.mul(lambda, y)) as u32,
                ]
            })
            .collect();
        return ArrayT::new(vec![v; 4], rows);
    }
    let mut parts: Vec<u64> = Vec::new();
    for (p, e) in &factors {
        let q = pow_checked(*p, i64::from(*e))?;
        if q < 3 {
            return Err(Error::Capability(format!(
                "order {v} has maximal prime-power factor {q} < 3; \
                 the product construction does not apply"
            )));
        }
        parts.push(q);
    }
    let mut acc = construct_mols(parts[0])?;
    for &q in &parts[1..] {
        acc = product_mvoa(&acc, &construct_mols(q)?)?;
    }
    Ok(acc)
}

/// Componentwise product: pairs the symbols of each column, multiplying
/// alphabet sizes. The product of MVOAs of the same polymatroid with base
/// levels v₁ and v₂ is an MVOA with base level v₁·v₂.
pub fn product_mvoa(t1: &ArrayT, t2: &ArrayT) -> Result<ArrayT> {
    if t1.ncols() != t2.ncols() {
        return Err(domain("product of arrays with different column counts"));
    }
    let alphabets: Vec<u64> = t1
        .alphabets()
        .iter()
        .zip(t2.alphabets())
        .map(|(a, b)| a * b)
        .collect();
    let mut rows = Vec::with_capacity(t1.nrows() * t2.nrows());
    for r1 in t1.rows() {
        for r2 in t2.rows() {
            let row = r1
                .iter()
                .zip(r2)
                .zip(t2.alphabets())
                .map(|((&a, &b), &alph2)| a * alph2 as u32 + b)
                .collect();
            rows.push(row);
        }
    }
    ArrayT::new(alphabets, rows)
}

/// Which of the two free-expansion polymatroid families to construct.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UhatKind {
    /// Rank-2 family: a first-kind square paired with a second-kind square.
    K25,
    /// Rank-3 family: a second-kind Latin cube.
    K35,
}

/// MVOA for the free-expansion polymatroids, with `special` the element
/// (1..=4) of enlarged rank.
pub fn construct_mvoa_uhat(kind: UhatKind, special: usize, v: u64) -> Result<ArrayT> {
    if !(1..=4).contains(&special) {
        return Err(domain("special element outside the ground set"));
    }
    if v == 0 {
        return Err(domain("order must be at least 1"));
    }
    let vu = v as u32;
    // Build with the special column last, then move it into place.
    let base: Vec<Vec<u32>> = match kind {
        UhatKind::K25 => (0..vu)
            .flat_map(|r| (0..vu).map(move |c| (r, c)))
            .map(|(r, c)| vec![r, c, (c + vu - r % vu) % vu, r * vu + c])
            .collect(),
        UhatKind::K35 => (0..vu)
            .flat_map(|x| (0..vu).flat_map(move |y| (0..vu).map(move |z| (x, y, z))))
            .map(|(x, y, z)| vec![x, y, z, ((x + z) % vu) * vu + (y + z) % vu])
            .collect(),
    };
    let alphabets = vec![v, v, v, v * v];
    // Column order placing the wide column at `special`.
    let mut order: Vec<usize> = (0..3).collect();
    order.insert(special - 1, 3);
    let rows = base
        .into_iter()
        .map(|r| order.iter().map(|&c| r[c]).collect())
        .collect();
    let alphabets = order.iter().map(|&c| alphabets[c]).collect();
    ArrayT::new(alphabets, rows)
}

/// Decide by exhaustion over Latin square pairs whether a VOA of U_{2,4}
/// with base level v exists. Only sensible for tiny v.
pub fn exhaustive_voa_u24_exists(v: u64) -> bool {
    if v == 1 {
        return true;
    }
    let squares = all_squares(v as usize);
    for s1 in &squares {
        for s2 in &squares {
            if mols_orthogonal(s1, s2) {
                return true;
            }
        }
    }
    false
}

fn mols_orthogonal(s1: &LatinSquare, s2: &LatinSquare) -> bool {
    let n = s1.n();
    let mut seen = vec![false; n * n];
    for r in 0..n {
        for c in 0..n {
            let key = s1.get(r, c) as usize * n + s2.get(r, c) as usize;
            if seen[key] {
                return false;
            }
            seen[key] = true;
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Latin objects and the array correspondences.

/// The Latin-square-side structures the arrays correspond to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatinObject {
    /// Constant symbol 0 in every cell.
    SquareKind0 { order: usize },
    /// A classical Latin square.
    SquareKind1(LatinSquare),
    /// All v² cells carry distinct symbols from 0..v².
    SquareKind2 { order: usize, cells: Vec<u32> },
    /// v×v×v cube, symbols distinct along every axis-parallel line.
    CubeKind1 { order: usize, cells: Vec<u32> },
    /// v×v×v cube, every axis-parallel layer holds v² distinct symbols.
    CubeKind2 { order: usize, cells: Vec<u32> },
    /// Two mutually orthogonal squares.
    MolsPair(LatinSquare, LatinSquare),
    /// Two identical squares.
    IdenticalPair(LatinSquare, LatinSquare),
    /// A first-kind square with a second-kind square.
    FirstAndSecondPair(LatinSquare, Vec<u32>),
    /// A first-kind square with a zeroth-kind square.
    FirstAndZerothPair(LatinSquare),
}

/// Target kind for a conversion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LatinKind {
    SquareKind0,
    SquareKind1,
    SquareKind2,
    CubeKind1,
    CubeKind2,
    MolsPair,
    IdenticalPair,
    FirstAndSecondPair,
    FirstAndZerothPair,
}

fn cube_index(v: usize, x: usize, y: usize, z: usize) -> usize {
    (x * v + y) * v + z
}

/// Rank function on three elements given as the seven values
/// (1, 2, 3, 12, 13, 23, 123).
fn rank3(vals: [i64; 7]) -> RankVector {
    SetFunction::from_table_row(3, &vals).unwrap()
}

/// The integer polymatroid whose MVOA the kind corresponds to.
pub fn kind_polymatroid(kind: LatinKind) -> RankVector {
    match kind {
        // Two rank-1 elements summed: the column of symbols is constant.
        LatinKind::SquareKind0 => rank3([1, 1, 0, 2, 1, 1, 2]),
        LatinKind::SquareKind1 => uniform_matroid(2, 3).unwrap(),
        // Sum of two rank-1 matroids on {1,3} and {2,3}.
        LatinKind::SquareKind2 => rank3([1, 1, 2, 2, 2, 2, 2]),
        LatinKind::CubeKind1 => named_rank(RayType::U34, 0).unwrap(),
        LatinKind::CubeKind2 => named_rank(RayType::UHat35, 0b1000).unwrap(),
        LatinKind::MolsPair => named_rank(RayType::U24, 0).unwrap(),
        LatinKind::IdenticalPair => named_rank(RayType::W2, 0b1100).unwrap(),
        LatinKind::FirstAndSecondPair => named_rank(RayType::UHat25, 0b1000).unwrap(),
        LatinKind::FirstAndZerothPair => named_rank(RayType::U23, 0b0111).unwrap(),
    }
}

fn square_from_voa(t: &ArrayT, sym_col: usize) -> Result<LatinSquare> {
    let v = t.alphabets()[0] as usize;
    let mut rows = vec![vec![0u32; v]; v];
    for r in t.rows() {
        rows[r[0] as usize][r[1] as usize] = r[sym_col];
    }
    LatinSquare::from_rows(&rows)
}

/// Convert a verified array to its Latin-object counterpart. Columns 1 and 2
/// carry the row and column indices.
pub fn voa_to_latin(t: &ArrayT, target: LatinKind) -> Result<LatinObject> {
    let p = kind_polymatroid(target);
    let v = t.alphabets()[0];
    let check = is_mvoa(&p, v, t)?;
    if !check.ok {
        return Err(domain(format!(
            "array is not an MVOA of the kind's polymatroid: {:?}",
            check.violation
        )));
    }
    let vz = v as usize;
    match target {
        LatinKind::SquareKind0 => Ok(LatinObject::SquareKind0 { order: vz }),
        LatinKind::SquareKind1 => Ok(LatinObject::SquareKind1(square_from_voa(t, 2)?)),
        LatinKind::SquareKind2 => {
            let mut cells = vec![0u32; vz * vz];
            for r in t.rows() {
                cells[r[0] as usize * vz + r[1] as usize] = r[2];
            }
            Ok(LatinObject::SquareKind2 { order: vz, cells })
        }
        LatinKind::CubeKind1 | LatinKind::CubeKind2 => {
            let mut cells = vec![0u32; vz * vz * vz];
            for r in t.rows() {
                cells[cube_index(vz, r[0] as usize, r[1] as usize, r[2] as usize)] = r[3];
            }
            Ok(match target {
                LatinKind::CubeKind1 => LatinObject::CubeKind1 { order: vz, cells },
                _ => LatinObject::CubeKind2 { order: vz, cells },
            })
        }
        LatinKind::MolsPair => Ok(LatinObject::MolsPair(
            square_from_voa(t, 2)?,
            square_from_voa(t, 3)?,
        )),
        LatinKind::IdenticalPair => Ok(LatinObject::IdenticalPair(
            square_from_voa(t, 2)?,
            square_from_voa(t, 3)?,
        )),
        LatinKind::FirstAndSecondPair => {
            let mut cells = vec![0u32; vz * vz];
            for r in t.rows() {
                cells[r[0] as usize * vz + r[1] as usize] = r[3];
            }
            Ok(LatinObject::FirstAndSecondPair(square_from_voa(t, 2)?, cells))
        }
        LatinKind::FirstAndZerothPair => {
            Ok(LatinObject::FirstAndZerothPair(square_from_voa(t, 2)?))
        }
    }
}

/// Validate a Latin object against its kind invariants.
pub fn latin_object_valid(obj: &LatinObject) -> bool {
    let distinct = |cells: &[u32], lim: usize| {
        let mut seen = vec![false; lim];
        cells.iter().all(|&c| {
            let c = c as usize;
            c < lim && !std::mem::replace(&mut seen[c], true)
        })
    };
    match obj {
        LatinObject::SquareKind0 { .. } => true,
        LatinObject::SquareKind1(sq) => sq.is_latin(),
        LatinObject::SquareKind2 { order, cells } => {
            cells.len() == order * order && distinct(cells, order * order)
        }
        LatinObject::CubeKind1 { order, cells } => {
            let v = *order;
            if cells.len() != v * v * v {
                return false;
            }
            for a in 0..v {
                for b in 0..v {
                    let lines = [
                        (0..v).map(|i| cells[cube_index(v, i, a, b)]).collect::<Vec<_>>(),
                        (0..v).map(|j| cells[cube_index(v, a, j, b)]).collect::<Vec<_>>(),
                        (0..v).map(|k| cells[cube_index(v, a, b, k)]).collect::<Vec<_>>(),
                    ];
                    if lines.iter().any(|l| !distinct(l, v)) {
                        return false;
                    }
                }
            }
            true
        }
        LatinObject::CubeKind2 { order, cells } => {
            let v = *order;
            if cells.len() != v * v * v {
                return false;
            }
            for a in 0..v {
                let layers = [
                    (0..v)
                        .flat_map(|j| (0..v).map(move |k| (j, k)))
                        .map(|(j, k)| cells[cube_index(v, a, j, k)])
                        .collect::<Vec<_>>(),
                    (0..v)
                        .flat_map(|i| (0..v).map(move |k| (i, k)))
                        .map(|(i, k)| cells[cube_index(v, i, a, k)])
                        .collect::<Vec<_>>(),
                    (0..v)
                        .flat_map(|i| (0..v).map(move |j| (i, j)))
                        .map(|(i, j)| cells[cube_index(v, i, j, a)])
                        .collect::<Vec<_>>(),
                ];
                if layers.iter().any(|l| !distinct(l, v * v)) {
                    return false;
                }
            }
            true
        }
        LatinObject::MolsPair(s1, s2) => s1.is_latin() && s2.is_latin() && mols_orthogonal(s1, s2),
        LatinObject::IdenticalPair(s1, s2) => s1.is_latin() && s1 == s2,
        LatinObject::FirstAndSecondPair(s1, cells) => {
            s1.is_latin() && cells.len() == s1.n() * s1.n() && distinct(cells, s1.n() * s1.n())
        }
        LatinObject::FirstAndZerothPair(s1) => s1.is_latin(),
    }
}

/// Convert a Latin object back to its array, canonically row-sorted, and
/// verify it against `p`.
pub fn latin_to_voa(obj: &LatinObject, p: &RankVector) -> Result<ArrayT> {
    if !latin_object_valid(obj) {
        return Err(domain("object violates its kind invariants"));
    }
    let t = match obj {
        LatinObject::SquareKind0 { order } => {
            let v = *order;
            let rows = (0..v)
                .flat_map(|i| (0..v).map(move |j| vec![i as u32, j as u32, 0]))
                .collect();
            ArrayT::new(vec![v as u64, v as u64, 1], rows)?
        }
        LatinObject::SquareKind1(sq) => {
            let v = sq.n();
            let rows = (0..v)
                .flat_map(|i| (0..v).map(move |j| vec![i as u32, j as u32, sq.get(i, j)]))
                .collect();
            ArrayT::new(vec![v as u64; 3], rows)?
        }
        LatinObject::SquareKind2 { order, cells } => {
            let v = *order;
            let rows = (0..v)
                .flat_map(|i| (0..v).map(move |j| vec![i as u32, j as u32, cells[i * v + j]]))
                .collect();
            ArrayT::new(vec![v as u64, v as u64, (v * v) as u64], rows)?
        }
        LatinObject::CubeKind1 { order, cells } | LatinObject::CubeKind2 { order, cells } => {
            let v = *order;
            let wide = matches!(obj, LatinObject::CubeKind2 { .. });
            let rows = (0..v)
                .flat_map(|i| (0..v).flat_map(move |j| (0..v).map(move |k| (i, j, k))))
                .map(|(i, j, k)| {
                    vec![i as u32, j as u32, k as u32, cells[cube_index(v, i, j, k)]]
                })
                .collect();
            let last = if wide { (v * v) as u64 } else { v as u64 };
            ArrayT::new(vec![v as u64, v as u64, v as u64, last], rows)?
        }
        LatinObject::MolsPair(s1, s2) | LatinObject::IdenticalPair(s1, s2) => {
            let v = s1.n();
            let rows = (0..v)
                .flat_map(|i| (0..v).map(move |j| (i, j)))
                .map(|(i, j)| vec![i as u32, j as u32, s1.get(i, j), s2.get(i, j)])
                .collect();
            ArrayT::new(vec![v as u64; 4], rows)?
        }
        LatinObject::FirstAndSecondPair(s1, cells) => {
            let v = s1.n();
            let rows = (0..v)
                .flat_map(|i| (0..v).map(move |j| (i, j)))
                .map(|(i, j)| vec![i as u32, j as u32, s1.get(i, j), cells[i * v + j]])
                .collect();
            ArrayT::new(vec![v as u64, v as u64, v as u64, (v * v) as u64], rows)?
        }
        LatinObject::FirstAndZerothPair(s1) => {
            let v = s1.n();
            let rows = (0..v)
                .flat_map(|i| (0..v).map(move |j| (i, j)))
                .map(|(i, j)| vec![i as u32, j as u32, s1.get(i, j), 0])
                .collect();
            ArrayT::new(vec![v as u64, v as u64, v as u64, 1], rows)?
        }
    };
    let v = t.alphabets()[0];
    let check = is_mvoa(p, v, &t)?;
    if !check.ok {
        return Err(domain(format!(
            "object does not induce an MVOA of the given polymatroid: {:?}",
            check.violation
        )));
    }
    Ok(t.canonical_sorted())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn voa_u23_small() {
        let t = construct_voa_u23(3).unwrap();
        let u23 = uniform_matroid(2, 3).unwrap();
        assert!(is_mvoa(&u23, 3, &t).unwrap().ok);
        let t1 = construct_voa_u23(1).unwrap();
        assert_eq!(t1.rows(), &[vec![0, 0, 0]]);
        let t2 = construct_voa_u23(2).unwrap();
        assert!(is_mvoa(&uniform_matroid(2, 3).unwrap(), 2, &t2).unwrap().ok);
    }

    #[test]
    fn mols_orders() {
        let u24 = named_rank(RayType::U24, 0).unwrap();
        for v in [1u64, 3, 4, 5, 7, 8, 9, 12, 16] {
            let t = construct_mols(v).unwrap();
            assert!(is_mvoa(&u24, v, &t).unwrap().ok, "order {v}");
        }
        assert!(matches!(construct_mols(2), Err(Error::Nonexistence(_))));
        assert!(matches!(construct_mols(6), Err(Error::Nonexistence(_))));
        assert!(matches!(construct_mols(10), Err(Error::Capability(_))));
    }

    #[test]
    fn mols_columns_are_orthogonal_latin() {
        let t = construct_mols(4).unwrap();
        let s1 = square_from_voa(&t, 2).unwrap();
        let s2 = square_from_voa(&t, 3).unwrap();
        assert!(s1.is_latin() && s2.is_latin());
        assert!(mols_orthogonal(&s1, &s2));
    }

    #[test]
    fn uhat_constructions() {
        for v in [1u64, 2, 3, 4, 5, 7] {
            for special in 1..=4 {
                let t = construct_mvoa_uhat(UhatKind::K25, special, v).unwrap();
                let p = named_rank(RayType::UHat25, 1 << (special - 1)).unwrap();
                assert!(is_mvoa(&p, v, &t).unwrap().ok, "2_5 i={special} v={v}");
                let t = construct_mvoa_uhat(UhatKind::K35, special, v).unwrap();
                let p = named_rank(RayType::UHat35, 1 << (special - 1)).unwrap();
                assert!(is_mvoa(&p, v, &t).unwrap().ok, "3_5 i={special} v={v}");
            }
        }
    }

    #[test]
    fn shape_errors_are_not_verification_failures() {
        let u24 = named_rank(RayType::U24, 0).unwrap();
        let t = ArrayT::new(vec![3; 4], vec![vec![0, 0, 0, 0]]).unwrap();
        assert!(matches!(is_mvoa(&u24, 3, &t), Err(Error::Shape(_))));
    }

    #[test]
    fn single_column_uniform() {
        let p = SetFunction::from_table_row(1, &[1i64]).unwrap();
        let t = ArrayT::new(vec![5], (0..5).map(|i| vec![i]).collect()).unwrap();
        assert!(is_mvoa(&p, 5, &t).unwrap().ok);
    }

    #[test]
    fn relabel_and_row_permutation_invariance() {
        let u24 = named_rank(RayType::U24, 0).unwrap();
        let t = construct_mols(3).unwrap();
        let relabeled = t.relabel_column(2, &[2, 0, 1]).unwrap();
        assert!(is_mvoa(&u24, 3, &relabeled).unwrap().ok);
        let mut rows = t.rows().to_vec();
        rows.reverse();
        let rev = ArrayT::new(t.alphabets().to_vec(), rows).unwrap();
        assert!(is_mvoa(&u24, 3, &rev).unwrap().ok);
    }

    #[test]
    fn text_round_trip() {
        let t = construct_mols(3).unwrap();
        let text = t.to_text();
        assert!(text.starts_with("n=4 rows=9 alphabets=3,3,3,3"));
        let back = ArrayT::from_text(&text).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn latin_round_trips() {
        let u24 = named_rank(RayType::U24, 0).unwrap();
        let t = construct_mols(4).unwrap().canonical_sorted();
        let obj = voa_to_latin(&t, LatinKind::MolsPair).unwrap();
        assert!(latin_object_valid(&obj));
        let back = latin_to_voa(&obj, &u24).unwrap();
        assert_eq!(back, t);

        let t = construct_mvoa_uhat(UhatKind::K35, 4, 3).unwrap().canonical_sorted();
        let obj = voa_to_latin(&t, LatinKind::CubeKind2).unwrap();
        let p = named_rank(RayType::UHat35, 0b1000).unwrap();
        assert_eq!(latin_to_voa(&obj, &p).unwrap(), t);
    }

    #[test]
    fn exhaustive_u24_existence() {
        assert!(!exhaustive_voa_u24_exists(2));
        assert!(exhaustive_voa_u24_exists(3));
        assert!(exhaustive_voa_u24_exists(1));
    }
}
