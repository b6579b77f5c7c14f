use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::action::{evaluate, factorials};
use super::expr::{rational_to_f64, OpExpr};
use super::OpcalcError;
use crate::algebra::{self, AlgebraOrder, OperatorMatrix, MAX_EXACT_FACTORIAL_ORDER};

/// Creators-left normal form: `sum of c(a, b) (e+)^a e^b` with exact
/// rational coefficients. The zero operator has no terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalForm {
    order: AlgebraOrder,
    terms: BTreeMap<(usize, usize), BigRational>,
}

/// One machine-readable term of a [`NormalForm`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NormalTerm {
    pub a: usize,
    pub b: usize,
    pub numerator: String,
    pub denominator: String,
}

impl NormalForm {
    pub fn zero(order: AlgebraOrder) -> Self {
        Self {
            order,
            terms: BTreeMap::new(),
        }
    }

    /// Builds a form from `(a, b, coefficient)` triples, summing repeats and
    /// dropping zeros. Returns `None` if a power exceeds `n - 1`.
    pub fn from_terms(
        order: AlgebraOrder,
        terms: impl IntoIterator<Item = (usize, usize, BigRational)>,
    ) -> Option<Self> {
        let top = order.max_occupancy();
        let mut map = BTreeMap::new();
        for (a, b, c) in terms {
            if a > top || b > top {
                return None;
            }
            *map.entry((a, b)).or_insert_with(BigRational::zero) += c;
        }
        map.retain(|_, c: &mut BigRational| !c.is_zero());
        Some(Self { order, terms: map })
    }

    pub fn order(&self) -> AlgebraOrder {
        self.order
    }

    pub fn terms(&self) -> &BTreeMap<(usize, usize), BigRational> {
        &self.terms
    }

    pub fn coefficient(&self, a: usize, b: usize) -> Option<&BigRational> {
        self.terms.get(&(a, b))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn records(&self) -> Vec<NormalTerm> {
        self.terms
            .iter()
            .map(|(&(a, b), c)| NormalTerm {
                a,
                b,
                numerator: c.numer().to_string(),
                denominator: c.denom().to_string(),
            })
            .collect()
    }
}

/// `1 + e+^1 e^1 + -3/2 e+^2 e^2`; unit coefficients are omitted and the
/// zero operator prints as `0`.
impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (&(a, b), c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            let mut mono = Vec::with_capacity(2);
            if a > 0 {
                mono.push(format!("e+^{a}"));
            }
            if b > 0 {
                mono.push(format!("e^{b}"));
            }
            let mono = mono.join(" ");
            match (mono.is_empty(), c.is_one()) {
                (true, _) => write!(f, "{c}")?,
                (false, true) => f.write_str(&mono)?,
                (false, false) => write!(f, "{c} {mono}")?,
            }
        }
        Ok(())
    }
}

fn check_order(order: AlgebraOrder) -> Result<(), OpcalcError> {
    if order.value() > MAX_EXACT_FACTORIAL_ORDER {
        return Err(OpcalcError::OrderTooLarge { n: order.value() });
    }
    Ok(())
}

/// Reduces `expr` to its unique normal form on the `n`-dimensional space.
///
/// The expression is evaluated exactly to word actions grouped by shift
/// `d`. For a fixed `d`, the monomial `(e+)^(b+d) e^b` contributes
/// `1/(k-b)!` to `rho[k]` for every admissible `k >= b`, so the coefficients
/// follow from a unit lower triangular solve, ascending in `k`.
pub fn normal_order(expr: &OpExpr, order: AlgebraOrder) -> Result<NormalForm, OpcalcError> {
    check_order(order)?;
    let n = order.value() as i64;
    let fact = factorials(order.value() - 1);
    let op = evaluate(expr, order);

    let mut terms = BTreeMap::new();
    for (&d, rho) in op.parts() {
        let lo = 0.max(-d);
        let hi = (n - 1).min(n - 1 - d);
        let mut lambdas: Vec<BigRational> = Vec::new();
        for k in lo..=hi {
            let mut value = rho[k as usize].clone();
            for (offset, lam) in lambdas.iter().enumerate() {
                let b = lo + offset as i64;
                if !lam.is_zero() {
                    value -= lam / BigRational::from_integer(fact[(k - b) as usize].clone());
                }
            }
            lambdas.push(value);
        }
        for (offset, lam) in lambdas.into_iter().enumerate() {
            if lam.is_zero() {
                continue;
            }
            let b = lo + offset as i64;
            terms.insert(((b + d) as usize, b as usize), lam);
        }
    }
    Ok(NormalForm { order, terms })
}

/// `sum of c(a, b) (e+)^a e^b` over the floating point ladder matrices.
pub fn normal_form_to_matrix(nf: &NormalForm) -> OperatorMatrix {
    let order = nf.order;
    let n = order.value();
    let (e, ed) = (algebra::annihilator(order), algebra::creator(order));
    let e_pows: Vec<OperatorMatrix> = (0..n).map(|b| e.pow(b)).collect();
    let ed_pows: Vec<OperatorMatrix> = (0..n).map(|a| ed.pow(a)).collect();

    nf.terms
        .iter()
        .fold(OperatorMatrix::zeros(n), |acc, (&(a, b), c)| {
            let mono = ed_pows[a].matmul(&e_pows[b]).expect("same dim");
            acc.add(&mono.scaled(rational_to_f64(c))).expect("same dim")
        })
}

/// Exact operator equality of two expressions on the `n`-dimensional space.
pub fn verify_identity(
    lhs: &OpExpr,
    rhs: &OpExpr,
    order: AlgebraOrder,
) -> Result<bool, OpcalcError> {
    Ok(normal_order(lhs, order)? == normal_order(rhs, order)?)
}

/// Parses both sides and calls [`verify_identity`].
pub fn verify_identity_str(lhs: &str, rhs: &str, order: AlgebraOrder) -> Result<bool, OpcalcError> {
    verify_identity(&super::parse(lhs)?, &super::parse(rhs)?, order)
}

/// `n/(n-1)!` as an exact rational.
pub fn deformation_coefficient(order: AlgebraOrder) -> BigRational {
    let n = order.value();
    let fact = factorials(n - 1);
    BigRational::new(BigInt::from(n), fact[n - 1].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opcalc::expr::rational;
    use crate::opcalc::parse;

    fn ord(n: usize) -> AlgebraOrder {
        AlgebraOrder::new(n).unwrap()
    }

    fn nf(text: &str, n: usize) -> NormalForm {
        normal_order(&parse(text).unwrap(), ord(n)).unwrap()
    }

    fn form(n: usize, terms: &[(usize, usize, i64, i64)]) -> NormalForm {
        NormalForm::from_terms(
            ord(n),
            terms.iter().map(|&(a, b, p, q)| (a, b, rational(p, q))),
        )
        .unwrap()
    }

    #[test]
    fn e_ed_at_fermion_order() {
        assert_eq!(nf("e e+", 2), form(2, &[(0, 0, 1, 1), (1, 1, -1, 1)]));
    }

    #[test]
    fn e_ed_at_order_three() {
        let got = nf("e e+", 3);
        assert_eq!(
            got,
            form(3, &[(0, 0, 1, 1), (1, 1, 1, 1), (2, 2, -3, 2)])
        );
        assert_eq!(got.to_string(), "1 + e+^1 e^1 + -3/2 e+^2 e^2");
    }

    #[test]
    fn lowering_commutator_is_zero_form() {
        for n in 1..=18 {
            let z = nf("[e, e+ e] - e", n);
            assert!(z.is_zero(), "n = {n}: {z}");
            assert_eq!(z.to_string(), "0");
        }
    }

    #[test]
    fn matrix_bridge_examples() {
        assert!(normal_form_to_matrix(&NormalForm::zero(ord(3))).is_zero());
        assert_eq!(
            normal_form_to_matrix(&form(3, &[(0, 0, 1, 1)])),
            OperatorMatrix::identity(3)
        );
        let m = normal_form_to_matrix(&nf("e e+", 3));
        let want = OperatorMatrix::diagonal(&[1.0, 2.0, 0.0]);
        assert!(m.max_abs_diff(&want).unwrap() < 1e-14);
    }

    #[test]
    fn identity_checks() {
        assert!(verify_identity_str("[e, e+ e]", "e", ord(5)).unwrap());
        assert!(verify_identity_str("[e+, e+ e]", "-e+", ord(5)).unwrap());
        assert!(verify_identity_str("[e, e+]", "1 - 2 e+ e", ord(2)).unwrap());
        assert!(!verify_identity_str("[e, e+]", "1 - 2 e+ e", ord(3)).unwrap());
    }

    #[test]
    fn anticommutator_at_fermion_order() {
        assert!(verify_identity_str("{e, e+}", "1", ord(2)).unwrap());
    }

    #[test]
    fn nilpotent_power_vanishes() {
        assert!(nf("e^2", 2).is_zero());
        assert!(nf("e+^5", 5).is_zero());
        assert!(nf("e+ e^4 e+", 4).is_zero());
        assert!(nf("(e + e+)^3 e^4000000000", 3).is_zero());
    }

    #[test]
    fn deformation_coefficients() {
        assert_eq!(deformation_coefficient(ord(1)), rational(1, 1));
        assert_eq!(deformation_coefficient(ord(2)), rational(2, 1));
        assert_eq!(deformation_coefficient(ord(3)), rational(3, 2));
        assert_eq!(deformation_coefficient(ord(4)), rational(2, 3));
    }

    #[test]
    fn order_limit() {
        let err = normal_order(&OpExpr::One, ord(19)).unwrap_err();
        assert_eq!(err, OpcalcError::OrderTooLarge { n: 19 });
    }

    #[test]
    fn from_terms_rejects_out_of_square_keys() {
        assert!(NormalForm::from_terms(ord(2), [(2, 0, rational(1, 1))]).is_none());
        let cancelled =
            NormalForm::from_terms(ord(2), [(1, 0, rational(1, 1)), (1, 0, rational(-1, 1))])
                .unwrap();
        assert!(cancelled.is_zero());
    }

    #[test]
    fn records_are_sorted_and_reduced() {
        let recs = nf("e e+", 3).records();
        let keys: Vec<_> = recs.iter().map(|r| (r.a, r.b)).collect();
        assert_eq!(keys, vec![(0, 0), (1, 1), (2, 2)]);
        assert_eq!(recs[2].numerator, "-3");
        assert_eq!(recs[2].denominator, "2");
    }

    #[test]
    fn printed_form_reparses_to_itself() {
        for (text, n) in [("e e+", 3), ("(e + 2 e+)^3", 4), ("[e, e+]", 5), ("-e+ e", 3)] {
            let form = nf(text, n);
            assert_eq!(nf(&form.to_string(), n), form, "{text} at n = {n}");
        }
    }
}
