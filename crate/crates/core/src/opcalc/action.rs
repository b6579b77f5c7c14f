//! Exact action of operator words on the basis kets.
//!
//! Every word `W` with `c` creators and `a` annihilators shifts occupation by
//! `d = c - a`, and
//!
//! ```text
//! W|k> = rho[k] * sqrt(k! (k+d)!) |k+d>
//! ```
//!
//! with `rho[k]` rational. Tracking the running amplitude as
//! `rho * sqrt(k! j!)` at current occupation `j`, a creator leaves `rho`
//! unchanged and an annihilator multiplies it by `j`. The start value is
//! `rho = 1/k!`, so no square root ever appears.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::expr::{Generator, OpExpr};
use crate::algebra::AlgebraOrder;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordAction {
    /// Creators minus annihilators.
    pub shift: i64,
    /// `rho[k]` for `k = 0..n`; zero where the word annihilates `|k>`.
    pub rho: Vec<BigRational>,
}

impl WordAction {
    pub fn is_zero(&self) -> bool {
        self.rho.iter().all(Zero::is_zero)
    }
}

pub(crate) fn factorials(upto: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(upto + 1);
    out.push(BigInt::one());
    for j in 1..=upto {
        let next = &out[j - 1] * BigInt::from(j);
        out.push(next);
    }
    out
}

/// Applies `word` (the operator `word[0] word[1] ...`) to each basis ket,
/// rightmost generator first.
pub fn word_action(word: &[Generator], order: AlgebraOrder) -> WordAction {
    let n = order.value();
    let top = n as i64 - 1;
    let shift: i64 = word.iter().map(|g| g.shift()).sum();
    let fact = factorials(n - 1);

    let rho = (0..n)
        .map(|k| {
            let mut occ = k as i64;
            let mut rho = BigRational::new(BigInt::one(), fact[k].clone());
            for g in word.iter().rev() {
                match g {
                    Generator::Create => {
                        occ += 1;
                        if occ > top {
                            return BigRational::zero();
                        }
                    }
                    Generator::Annihilate => {
                        if occ == 0 {
                            return BigRational::zero();
                        }
                        rho *= BigInt::from(occ);
                        occ -= 1;
                    }
                }
            }
            rho
        })
        .collect();

    WordAction { shift, rho }
}

/// A linear combination of word actions, grouped by shift.
///
/// Since words with the same shift act on the same kets with the same
/// normalization, their `rho` vectors simply add. Any operator on the
/// truncated space is one of these.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ShiftOperator {
    n: usize,
    parts: BTreeMap<i64, Vec<BigRational>>,
}

impl ShiftOperator {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            parts: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let fact = factorials(n - 1);
        let rho = fact
            .into_iter()
            .map(|f| BigRational::new(BigInt::one(), f))
            .collect();
        Self::from_action(n, WordAction { shift: 0, rho })
    }

    pub fn from_action(n: usize, action: WordAction) -> Self {
        let mut op = Self::zero(n);
        if !action.is_zero() {
            op.parts.insert(action.shift, action.rho);
        }
        op
    }

    pub fn parts(&self) -> &BTreeMap<i64, Vec<BigRational>> {
        &self.parts
    }

    fn prune(&mut self) {
        self.parts.retain(|_, rho| rho.iter().any(|r| !r.is_zero()));
    }

    pub fn add(mut self, other: &Self) -> Self {
        for (d, rho) in &other.parts {
            let entry = self
                .parts
                .entry(*d)
                .or_insert_with(|| vec![BigRational::zero(); self.n]);
            for (acc, r) in entry.iter_mut().zip(rho) {
                *acc += r;
            }
        }
        self.prune();
        self
    }

    pub fn scale(mut self, s: &BigRational) -> Self {
        if s.is_zero() {
            return Self::zero(self.n);
        }
        for rho in self.parts.values_mut() {
            for r in rho.iter_mut() {
                *r *= s;
            }
        }
        self
    }

    /// `self * other`: apply `other` first.
    ///
    /// If `other` takes `|k>` to `|j>` with `j = k + d_other`, the product of
    /// the two normalizations `sqrt(k! j!) sqrt(j! (j+d)!)` is
    /// `j! sqrt(k! (j+d)!)`, so `rho[k] = rho_self[j] rho_other[k] j!`.
    pub fn mul(&self, other: &Self, fact: &[BigInt]) -> Self {
        let n = self.n as i64;
        let mut out = Self::zero(self.n);
        for (&d_left, rho_left) in &self.parts {
            for (&d_right, rho_right) in &other.parts {
                let mut rho = vec![BigRational::zero(); self.n];
                let mut any = false;
                for (k, slot) in rho.iter_mut().enumerate() {
                    let j = k as i64 + d_right;
                    let end = j + d_left;
                    if !(0..n).contains(&j) || !(0..n).contains(&end) {
                        continue;
                    }
                    let (a, b) = (&rho_left[j as usize], &rho_right[k]);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    *slot = a * b * &fact[j as usize];
                    any = true;
                }
                if any {
                    out = out.add(&Self::from_action(
                        self.n,
                        WordAction {
                            shift: d_left + d_right,
                            rho,
                        },
                    ));
                }
            }
        }
        out
    }

    pub fn pow(&self, mut exponent: u32, fact: &[BigInt]) -> Self {
        let mut result = Self::identity(self.n);
        let mut base = self.clone();
        while exponent > 0 {
            if exponent & 1 == 1 {
                result = result.mul(&base, fact);
            }
            exponent >>= 1;
            if exponent > 0 {
                if base.parts.is_empty() {
                    // a higher bit is still set, so a zero factor remains
                    return Self::zero(self.n);
                }
                base = base.mul(&base, fact);
            }
        }
        result
    }
}

/// Evaluates an expression to its exact shift decomposition.
pub(crate) fn evaluate(expr: &OpExpr, order: AlgebraOrder) -> ShiftOperator {
    let n = order.value();
    let fact = factorials(n - 1);
    eval(expr, order, &fact)
}

fn eval(expr: &OpExpr, order: AlgebraOrder, fact: &[BigInt]) -> ShiftOperator {
    let n = order.value();
    match expr {
        OpExpr::One => ShiftOperator::identity(n),
        OpExpr::Generator(g) => ShiftOperator::from_action(n, word_action(&[*g], order)),
        OpExpr::ScalarMul(s, inner) => eval(inner, order, fact).scale(s),
        OpExpr::Sum(terms) => terms
            .iter()
            .fold(ShiftOperator::zero(n), |acc, t| acc.add(&eval(t, order, fact))),
        OpExpr::Product(factors) => factors
            .iter()
            .fold(ShiftOperator::identity(n), |acc, f| {
                acc.mul(&eval(f, order, fact), fact)
            }),
        OpExpr::Power(base, k) => eval(base, order, fact).pow(*k, fact),
        OpExpr::Commutator(a, b) | OpExpr::AntiCommutator(a, b) => {
            let (ea, eb) = (eval(a, order, fact), eval(b, order, fact));
            let ab = ea.mul(&eb, fact);
            let ba = eb.mul(&ea, fact);
            let sign = if matches!(expr, OpExpr::Commutator(..)) {
                -BigRational::one()
            } else {
                BigRational::one()
            };
            ab.add(&ba.scale(&sign))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opcalc::expr::rational;
    use Generator::*;

    fn ord(n: usize) -> AlgebraOrder {
        AlgebraOrder::new(n).unwrap()
    }

    #[test]
    fn single_creator() {
        let a = word_action(&[Create], ord(3));
        assert_eq!(a.shift, 1);
        assert_eq!(a.rho, vec![rational(1, 1), rational(1, 1), rational(0, 1)]);
    }

    #[test]
    fn single_annihilator_matches_ladder() {
        // e|k> = sqrt(k)|k-1> = rho sqrt(k! (k-1)!) => rho = 1/(k-1)!
        let a = word_action(&[Annihilate], ord(4));
        assert_eq!(a.shift, -1);
        assert_eq!(
            a.rho,
            vec![rational(0, 1), rational(1, 1), rational(1, 1), rational(1, 2)]
        );
    }

    #[test]
    fn e_then_creator_at_fermion_order() {
        let a = word_action(&[Annihilate, Create], ord(2));
        assert_eq!(a.shift, 0);
        assert_eq!(a.rho, vec![rational(1, 1), rational(0, 1)]);
    }

    #[test]
    fn double_annihilator_vanishes_at_two() {
        assert!(word_action(&[Annihilate, Annihilate], ord(2)).is_zero());
        assert!(word_action(&[Create, Create], ord(2)).is_zero());
    }

    #[test]
    fn empty_word_is_identity() {
        let a = word_action(&[], ord(3));
        assert_eq!(a.shift, 0);
        assert_eq!(a.rho, vec![rational(1, 1), rational(1, 1), rational(1, 2)]);
        assert_eq!(ShiftOperator::from_action(3, a), ShiftOperator::identity(3));
    }

    #[test]
    fn composition_agrees_with_stepping() {
        let words: [&[Generator]; 4] = [
            &[Annihilate, Create],
            &[Create, Create, Annihilate],
            &[Annihilate, Annihilate, Create, Create, Create],
            &[Create, Annihilate, Create, Annihilate],
        ];
        for n in 1..=6 {
            let o = ord(n);
            for w in words {
                let composed = evaluate(&OpExpr::word(w), o);
                let direct = ShiftOperator::from_action(n, word_action(w, o));
                assert_eq!(composed, direct, "n = {n}, word = {w:?}");
            }
        }
    }
}
