use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::{self, AlgebraOrder, OperatorMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Generator {
    /// `e`
    Annihilate,
    /// `e+`
    Create,
}

impl Generator {
    /// Change in occupation number.
    pub fn shift(self) -> i64 {
        match self {
            Generator::Annihilate => -1,
            Generator::Create => 1,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Annihilate => f.write_str("e"),
            Generator::Create => f.write_str("e+"),
        }
    }
}

/// Operator expression in the generators `e` and `e+` with rational scalars.
#[derive(Debug, Clone, PartialEq)]
pub enum OpExpr {
    One,
    Generator(Generator),
    ScalarMul(BigRational, Box<OpExpr>),
    Sum(Vec<OpExpr>),
    Product(Vec<OpExpr>),
    Power(Box<OpExpr>, u32),
    Commutator(Box<OpExpr>, Box<OpExpr>),
    AntiCommutator(Box<OpExpr>, Box<OpExpr>),
}

impl OpExpr {
    pub fn annihilate() -> Self {
        OpExpr::Generator(Generator::Annihilate)
    }

    pub fn create() -> Self {
        OpExpr::Generator(Generator::Create)
    }

    pub fn scaled(self, numer: i64, denom: i64) -> Self {
        OpExpr::ScalarMul(BigRational::new(numer.into(), denom.into()), Box::new(self))
    }

    pub fn pow(self, exponent: u32) -> Self {
        OpExpr::Power(Box::new(self), exponent)
    }

    pub fn commutator(a: OpExpr, b: OpExpr) -> Self {
        OpExpr::Commutator(Box::new(a), Box::new(b))
    }

    pub fn anticommutator(a: OpExpr, b: OpExpr) -> Self {
        OpExpr::AntiCommutator(Box::new(a), Box::new(b))
    }

    /// A product of generators, left to right.
    pub fn word(word: &[Generator]) -> Self {
        match word {
            [] => OpExpr::One,
            [g] => OpExpr::Generator(*g),
            _ => OpExpr::Product(word.iter().map(|&g| OpExpr::Generator(g)).collect()),
        }
    }

    /// Fully distributes the expression into a rational combination of
    /// generator words. Equal words are merged and zero coefficients dropped.
    ///
    /// The number of words grows exponentially with nested powers of sums,
    /// so this is meant for small expressions.
    pub fn expand_words(&self) -> BTreeMap<Vec<Generator>, BigRational> {
        let mut out = BTreeMap::new();
        for (word, coeff) in expand(self) {
            *out.entry(word).or_insert_with(BigRational::zero) += coeff;
        }
        out.retain(|_, c| !c.is_zero());
        out
    }
}

type Words = Vec<(Vec<Generator>, BigRational)>;

fn expand(expr: &OpExpr) -> Words {
    match expr {
        OpExpr::One => vec![(Vec::new(), BigRational::one())],
        OpExpr::Generator(g) => vec![(vec![*g], BigRational::one())],
        OpExpr::ScalarMul(s, inner) => expand(inner)
            .into_iter()
            .map(|(w, c)| (w, c * s))
            .collect(),
        OpExpr::Sum(terms) => terms.iter().flat_map(expand).collect(),
        OpExpr::Product(factors) => factors
            .iter()
            .fold(expand(&OpExpr::One), |acc, f| multiply_words(&acc, &expand(f))),
        OpExpr::Power(base, k) => {
            let b = expand(base);
            (0..*k).fold(expand(&OpExpr::One), |acc, _| multiply_words(&acc, &b))
        }
        OpExpr::Commutator(a, b) | OpExpr::AntiCommutator(a, b) => {
            let (wa, wb) = (expand(a), expand(b));
            let sign = if matches!(expr, OpExpr::Commutator(..)) {
                -BigRational::one()
            } else {
                BigRational::one()
            };
            let mut out = multiply_words(&wa, &wb);
            out.extend(
                multiply_words(&wb, &wa)
                    .into_iter()
                    .map(|(w, c)| (w, c * &sign)),
            );
            out
        }
    }
}

fn multiply_words(left: &Words, right: &Words) -> Words {
    let mut out = Vec::with_capacity(left.len() * right.len());
    for (wl, cl) in left {
        for (wr, cr) in right {
            let mut w = wl.clone();
            w.extend_from_slice(wr);
            out.push((w, cl * cr));
        }
    }
    out
}

/// Interprets the expression directly over the floating point ladder
/// matrices of `order`.
pub fn matrix_eval(expr: &OpExpr, order: AlgebraOrder) -> OperatorMatrix {
    let n = order.value();
    let same = "operands share the order's dimension";
    match expr {
        OpExpr::One => OperatorMatrix::identity(n),
        OpExpr::Generator(Generator::Annihilate) => algebra::annihilator(order),
        OpExpr::Generator(Generator::Create) => algebra::creator(order),
        OpExpr::ScalarMul(s, inner) => matrix_eval(inner, order).scaled(rational_to_f64(s)),
        OpExpr::Sum(terms) => terms.iter().fold(OperatorMatrix::zeros(n), |acc, t| {
            acc.add(&matrix_eval(t, order)).expect(same)
        }),
        OpExpr::Product(factors) => factors
            .iter()
            .fold(OperatorMatrix::identity(n), |acc, f| {
                acc.matmul(&matrix_eval(f, order)).expect(same)
            }),
        OpExpr::Power(base, k) => matrix_eval(base, order).pow(*k as usize),
        OpExpr::Commutator(a, b) => {
            algebra::commutator(&matrix_eval(a, order), &matrix_eval(b, order)).expect(same)
        }
        OpExpr::AntiCommutator(a, b) => {
            algebra::anticommutator(&matrix_eval(a, order), &matrix_eval(b, order)).expect(same)
        }
    }
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

#[cfg(test)]
pub(crate) fn rational(numer: i64, denom: i64) -> BigRational {
    BigRational::new(numer.into(), denom.into())
}

impl fmt::Display for OpExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpExpr::One => f.write_str("1"),
            OpExpr::Generator(g) => write!(f, "{g}"),
            OpExpr::ScalarMul(s, inner) => write!(f, "{s} ({inner})"),
            OpExpr::Sum(terms) => {
                f.write_str("(")?;
                for (i, t) in terms.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str(")")
            }
            OpExpr::Product(factors) => {
                for (i, t) in factors.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "({t})")?;
                }
                Ok(())
            }
            OpExpr::Power(base, k) => write!(f, "({base})^{k}"),
            OpExpr::Commutator(a, b) => write!(f, "[{a}, {b}]"),
            OpExpr::AntiCommutator(a, b) => write!(f, "{{{a}, {b}}}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Generator::*;

    #[test]
    fn expand_commutator_into_two_words() {
        let c = OpExpr::commutator(OpExpr::annihilate(), OpExpr::create());
        let words = c.expand_words();
        assert_eq!(words.len(), 2);
        assert_eq!(words[&vec![Annihilate, Create]], rational(1, 1));
        assert_eq!(words[&vec![Create, Annihilate]], rational(-1, 1));
    }

    #[test]
    fn expand_cancels_equal_words() {
        let e = OpExpr::annihilate();
        let x = OpExpr::Sum(vec![e.clone(), e.scaled(-1, 1)]);
        assert!(x.expand_words().is_empty());
    }

    #[test]
    fn power_zero_is_identity() {
        let o = AlgebraOrder::new(3).unwrap();
        let m = matrix_eval(&OpExpr::create().pow(0), o);
        assert_eq!(m, OperatorMatrix::identity(3));
        assert_eq!(
            OpExpr::create().pow(0).expand_words()[&Vec::new()],
            rational(1, 1)
        );
    }

    #[test]
    fn matrix_eval_of_number_operator() {
        let o = AlgebraOrder::new(4).unwrap();
        let num = OpExpr::word(&[Create, Annihilate]);
        assert!(
            matrix_eval(&num, o)
                .max_abs_diff(&algebra::number_operator(o))
                .unwrap()
                < 1e-15
        );
    }
}
