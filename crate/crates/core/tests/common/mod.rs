#![allow(dead_code)]

use genalg::opcalc::{Generator, OpExpr};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

pub fn word_from_bits(bits: &[bool]) -> Vec<Generator> {
    bits.iter()
        .map(|&b| if b { Generator::Create } else { Generator::Annihilate })
        .collect()
}

pub fn scaled_word(numer: i64, denom: i64, word: &[Generator]) -> OpExpr {
    OpExpr::ScalarMul(
        BigRational::new(BigInt::from(numer), BigInt::from(denom)),
        Box::new(OpExpr::word(word)),
    )
}

fn random_sum<R: Rng>(rng: &mut R, max_len: usize) -> OpExpr {
    let terms = rng.gen_range(1..=3);
    OpExpr::Sum(
        (0..terms)
            .map(|_| {
                let len = rng.gen_range(0..=max_len);
                let word: Vec<Generator> = (0..len)
                    .map(|_| {
                        if rng.gen_bool(0.5) {
                            Generator::Create
                        } else {
                            Generator::Annihilate
                        }
                    })
                    .collect();
                let numer = rng.gen_range(-9..=9);
                let denom = rng.gen_range(1..=6);
                scaled_word(numer, denom, &word)
            })
            .collect(),
    )
}

/// Random expression built from words of length at most 8 with rational
/// scalars; sometimes wrapped in a bracket or power.
pub fn random_expr<R: Rng>(rng: &mut R) -> OpExpr {
    match rng.gen_range(0..5) {
        0 | 1 => random_sum(rng, 8),
        2 => OpExpr::commutator(random_sum(rng, 4), random_sum(rng, 4)),
        3 => OpExpr::anticommutator(random_sum(rng, 4), random_sum(rng, 4)),
        _ => OpExpr::Product(vec![random_sum(rng, 4), random_sum(rng, 4)]),
    }
}

/// Rank by Gaussian elimination with partial pivoting.
pub fn rank(mut rows: Vec<Vec<f64>>, tol: f64) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..cols {
        let pivot = (rank..rows.len()).max_by(|&a, &b| rows[a][col].abs().total_cmp(&rows[b][col].abs()));
        let Some(p) = pivot else { break };
        if rows[p][col].abs() <= tol {
            continue;
        }
        rows.swap(rank, p);
        for r in 0..rows.len() {
            if r != rank {
                let f = rows[r][col] / rows[rank][col];
                if f != 0.0 {
                    for c in col..cols {
                        rows[r][c] -= f * rows[rank][c];
                    }
                }
            }
        }
        rank += 1;
    }
    rank
}
