//! Latin square combinatorics backing the decomposition searches: generation,
//! isotopy reduction, subsquare and transversal structure.

use crate::error::{domain, Result};

/// A Latin square of order n with symbols 0..n-1, row-major cells.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatinSquare {
    n: usize,
    cells: Vec<u32>,
}

impl LatinSquare {
    pub fn from_rows(rows: &[Vec<u32>]) -> Result<Self> {
        let n = rows.len();
        let cells: Vec<u32> = rows.iter().flatten().copied().collect();
        let sq = LatinSquare { n, cells };
        if !sq.is_latin() {
            return Err(domain("not a Latin square"));
        }
        Ok(sq)
    }

    /// The cyclic square L(r, c) = (r + c) mod n.
    pub fn cyclic(n: usize) -> Self {
        let cells = (0..n)
            .flat_map(|r| (0..n).map(move |c| ((r + c) % n) as u32))
            .collect();
        LatinSquare { n, cells }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.cells[r * self.n + c]
    }

    pub fn is_latin(&self) -> bool {
        let n = self.n;
        if self.cells.len() != n * n {
            return false;
        }
        for i in 0..n {
            let mut row_seen = vec![false; n];
            let mut col_seen = vec![false; n];
            for j in 0..n {
                let rv = self.get(i, j) as usize;
                let cv = self.get(j, i) as usize;
                if rv >= n || col_seen[cv] || row_seen[rv] {
                    return false;
                }
                row_seen[rv] = true;
                col_seen[cv] = true;
            }
        }
        true
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let cells = (0..n)
            .flat_map(|r| (0..n).map(move |c| self.get(c, r)))
            .collect();
        LatinSquare { n, cells }
    }

    pub fn apply_isotopy(&self, rowp: &[usize], colp: &[usize], symp: &[u32]) -> Self {
        let n = self.n;
        let mut cells = vec![0u32; n * n];
        for r in 0..n {
            for c in 0..n {
                cells[rowp[r] * n + colp[c]] = symp[self.get(r, c) as usize];
            }
        }
        LatinSquare { n, cells }
    }

    /// Sub-block on row set `rows` × column set `cols` is a Latin subsquare:
    /// it uses exactly |rows| symbols, each once per block row and column.
    pub fn is_subsquare(&self, rows: &[usize], cols: &[usize]) -> bool {
        if rows.len() != cols.len() {
            return false;
        }
        let d = rows.len();
        let mut symbols: Vec<u32> = rows
            .iter()
            .flat_map(|&r| cols.iter().map(move |&c| self.get(r, c)))
            .collect();
        symbols.sort_unstable();
        symbols.dedup();
        if symbols.len() != d {
            return false;
        }
        for &r in rows {
            let mut seen: Vec<u32> = cols.iter().map(|&c| self.get(r, c)).collect();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() != d {
                return false;
            }
        }
        for &c in cols {
            let mut seen: Vec<u32> = rows.iter().map(|&r| self.get(r, c)).collect();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() != d {
                return false;
            }
        }
        true
    }

    /// Reduced form: apply the symbol permutation making row `first_row` read
    /// 0..n−1 under column order `colp`, then sort rows by their first entry.
    fn reduce(&self, first_row: usize, colp: &[usize]) -> LatinSquare {
        let n = self.n;
        let mut symp = vec![0u32; n];
        for (k, &c) in colp.iter().enumerate() {
            symp[self.get(first_row, c) as usize] = k as u32;
        }
        let mut rows: Vec<Vec<u32>> = (0..n)
            .map(|r| colp.iter().map(|&c| symp[self.get(r, c) as usize]).collect())
            .collect();
        rows.sort_by_key(|row| row[0]);
        LatinSquare {
            n,
            cells: rows.into_iter().flatten().collect(),
        }
    }

    /// Canonical representative of the isotopy class: minimum over all
    /// choices of first row and column order of the reduced form.
    pub fn isotopy_canonical(&self) -> LatinSquare {
        let n = self.n;
        let mut best: Option<LatinSquare> = None;
        let colperms = permutations(n);
        for first_row in 0..n {
            for colp in &colperms {
                let cand = self.reduce(first_row, colp);
                if best.as_ref().is_none_or(|b| cand < *b) {
                    best = Some(cand);
                }
            }
        }
        best.unwrap()
    }
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..n).collect();
    fn rec(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if k == items.len() {
            out.push(items.clone());
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            rec(items, k + 1, out);
            items.swap(k, i);
        }
    }
    rec(&mut items, 0, &mut out);
    out.sort();
    out
}

/// All Latin squares of order n by row-by-row backtracking. Practical for n ≤ 5.
pub fn all_squares(n: usize) -> Vec<LatinSquare> {
    let mut out = Vec::new();
    let mut grid = vec![vec![0u32; n]; n];
    fill(&mut grid, n, 0, 0, &mut |g| {
        out.push(LatinSquare {
            n,
            cells: g.iter().flatten().copied().collect(),
        })
    });
    out
}

/// Latin squares with first row and first column both 0..n−1.
pub fn reduced_squares(n: usize) -> Vec<LatinSquare> {
    all_squares(n)
        .into_iter()
        .filter(|sq| {
            (0..n).all(|c| sq.get(0, c) == c as u32) && (0..n).all(|r| sq.get(r, 0) == r as u32)
        })
        .collect()
}

fn fill(grid: &mut Vec<Vec<u32>>, n: usize, r: usize, c: usize, emit: &mut impl FnMut(&Vec<Vec<u32>>)) {
    if r == n {
        emit(grid);
        return;
    }
    let (nr, nc) = if c + 1 == n { (r + 1, 0) } else { (r, c + 1) };
    'sym: for s in 0..n as u32 {
        for cc in 0..c {
            if grid[r][cc] == s {
                continue 'sym;
            }
        }
        for rr in 0..r {
            if grid[rr][c] == s {
                continue 'sym;
            }
        }
        grid[r][c] = s;
        fill(grid, n, nr, nc, emit);
    }
}

/// Representatives of every isotopy class for n ≤ 5 (computed from the
/// reduced squares); the cyclic square alone for larger orders, which is a
/// documented completeness caveat of the bounded searches.
pub fn isotopy_representatives(n: usize) -> Vec<LatinSquare> {
    if n == 0 {
        return Vec::new();
    }
    if n > 5 {
        return vec![LatinSquare::cyclic(n)];
    }
    let mut canon: Vec<LatinSquare> = reduced_squares(n)
        .into_iter()
        .map(|sq| sq.isotopy_canonical())
        .collect();
    canon.sort();
    canon.dedup();
    canon
}

/// All transversals: cell sets hitting every row, column and symbol once,
/// encoded as the column picked in each row.
pub fn transversals(sq: &LatinSquare) -> Vec<Vec<usize>> {
    let n = sq.n();
    let mut out = Vec::new();
    let mut cols_used = vec![false; n];
    let mut syms_used = vec![false; n];
    let mut pick = vec![0usize; n];
    fn rec(
        sq: &LatinSquare,
        r: usize,
        cols_used: &mut Vec<bool>,
        syms_used: &mut Vec<bool>,
        pick: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let n = sq.n();
        if r == n {
            out.push(pick.clone());
            return;
        }
        for c in 0..n {
            let s = sq.get(r, c) as usize;
            if !cols_used[c] && !syms_used[s] {
                cols_used[c] = true;
                syms_used[s] = true;
                pick[r] = c;
                rec(sq, r + 1, cols_used, syms_used, pick, out);
                cols_used[c] = false;
                syms_used[s] = false;
            }
        }
    }
    rec(sq, 0, &mut cols_used, &mut syms_used, &mut pick, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(all_squares(1).len(), 1);
        assert_eq!(all_squares(2).len(), 2);
        assert_eq!(all_squares(3).len(), 12);
        assert_eq!(all_squares(4).len(), 576);
        assert_eq!(reduced_squares(4).len(), 4);
        assert_eq!(reduced_squares(5).len(), 56);
    }

    #[test]
    fn isotopy_classes() {
        assert_eq!(isotopy_representatives(1).len(), 1);
        assert_eq!(isotopy_representatives(2).len(), 1);
        assert_eq!(isotopy_representatives(3).len(), 1);
        assert_eq!(isotopy_representatives(4).len(), 2);
        assert_eq!(isotopy_representatives(5).len(), 2);
    }

    #[test]
    fn subsquares_and_transversals() {
        // XOR square of order 4 contains intercalates; cyclic order-3 has none.
        let klein = LatinSquare::from_rows(&[
            vec![0, 1, 2, 3],
            vec![1, 0, 3, 2],
            vec![2, 3, 0, 1],
            vec![3, 2, 1, 0],
        ])
        .unwrap();
        assert!(klein.is_subsquare(&[0, 1], &[0, 1]));
        assert!(!LatinSquare::cyclic(3).is_subsquare(&[0, 1], &[0, 1]));
        assert_eq!(transversals(&LatinSquare::cyclic(3)).len(), 3);
        // Even-order cyclic squares have no transversal.
        assert!(transversals(&LatinSquare::cyclic(4)).is_empty());
        assert_eq!(transversals(&klein).len(), 8);
    }
}
