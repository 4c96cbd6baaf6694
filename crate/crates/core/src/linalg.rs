//! Exact rank of small integer matrices via rational Gaussian elimination.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::Zero;

/// Rank of the row span of `rows` (each row the same length).
pub(crate) fn integer_matrix_rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| BigRational::from(BigInt::from(v))).collect())
        .collect();
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = m[rank][col].clone();
        for r in rank + 1..m.len() {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &inv;
            for c in col..ncols {
                let delta = &factor * &m[rank][c];
                m[r][c] -= delta;
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks() {
        assert_eq!(integer_matrix_rank(&[vec![1, 2], vec![2, 4]]), 1);
        assert_eq!(integer_matrix_rank(&[vec![1, 0], vec![0, 1]]), 2);
        assert_eq!(integer_matrix_rank(&[vec![0, 0]]), 0);
        assert_eq!(
            integer_matrix_rank(&[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]]),
            2
        );
    }
}
