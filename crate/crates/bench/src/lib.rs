//! Benchmark fixtures.

use steenres::milnor::basis_of_degree;
use steenres::{resolve_range, GF2Matrix, MilnorExponent, Resolution, Strategy};

/// Every pair of basis elements with degrees summing to `total`.
pub fn milnor_pairs(total: u32) -> Vec<(MilnorExponent, MilnorExponent)> {
    (0..=total)
        .flat_map(|d| {
            let left = basis_of_degree(d);
            let right = basis_of_degree(total - d);
            left.into_iter()
                .flat_map(move |r| right.clone().into_iter().map(move |s| (r.clone(), s)))
        })
        .collect()
}

/// A deterministic pseudo-random dense matrix (xorshift bits).
pub fn dense_matrix(rows: usize, cols: usize, seed: u64) -> GF2Matrix {
    let mut state = seed | 1;
    let mut m = GF2Matrix::zero(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            m.set(i, j, state & 1 == 1);
        }
    }
    m
}

pub fn resolve(strategy: &str, max_s: u32, max_stem: i64) -> Resolution {
    let strategy: Strategy = strategy.parse().expect("known strategy");
    let mut res = Resolution::new();
    resolve_range(&mut res, max_s, max_stem, &strategy).expect("resolution runs");
    res
}
