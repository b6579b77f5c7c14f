//! Finite matrix representations of the generalized algebra.
//!
//! For an order `n` the ket space is spanned by `|0>, ..., |n-1>`. The
//! annihilator acts as `e|k> = sqrt(k)|k-1>` and the creator as
//! `e+|k> = sqrt(k+1)|k+1>`, with `e+|n-1> = 0`. Both are strictly triangular,
//! so `e^n = (e+)^n = 0` holds by construction and at most `n - 1` quanta fit
//! in a state.
//!
//! The defining relation of the family is
//!
//! ```text
//! [e, e+] = 1 - n/(n-1)! (e+)^(n-1) e^(n-1)
//! ```
//!
//! which is available both literally ([`defining_rhs_direct`], small `n`) and
//! in the factorial-free projector form ([`defining_rhs_stable`]).

use std::fmt;

use thiserror::Error;

/// Largest order for which `(n-1)!` is computed exactly in a `u64`.
pub const MAX_EXACT_FACTORIAL_ORDER: usize = 18;

/// Tolerance used for matrix identity checks unless the caller overrides it.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("algebra order must be at least 1, got {0}")]
    InvalidOrder(usize),

    #[error("incompatible operands: dimension {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix of dimension {dim} needs {expected} entries, got {got}")]
    BadEntryCount { dim: usize, expected: usize, got: usize },

    #[error("matrix and ket entries must be finite")]
    NonFinite,

    #[error("basis index {index} is outside a ket space of dimension {dim}")]
    BasisOutOfRange { index: usize, dim: usize },

    #[error(
        "order {n} exceeds the exact factorial range (n <= {max}); \
         use defining_rhs_stable instead",
        max = MAX_EXACT_FACTORIAL_ORDER
    )]
    FactorialOverflow { n: usize },
}

pub type Result<T> = std::result::Result<T, AlgebraError>;

/// The index `n` selecting one member of the family.
///
/// `n` is the dimension of the ket space; the maximum occupancy is `n - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AlgebraOrder(usize);

impl AlgebraOrder {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(AlgebraError::InvalidOrder(n));
        }
        Ok(Self(n))
    }

    #[inline]
    pub fn value(self) -> usize {
        self.0
    }

    /// Highest reachable occupation number.
    #[inline]
    pub fn max_occupancy(self) -> usize {
        self.0 - 1
    }

    /// Whether `(n-1)!` fits the exact 64-bit range.
    pub fn has_exact_factorial(self) -> bool {
        self.0 <= MAX_EXACT_FACTORIAL_ORDER
    }
}

impl fmt::Display for AlgebraOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Dense square real matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl OperatorMatrix {
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(AlgebraError::InvalidOrder(0));
        }
        if entries.len() != dim * dim {
            return Err(AlgebraError::BadEntryCount {
                dim,
                expected: dim * dim,
                got: entries.len(),
            });
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(AlgebraError::NonFinite);
        }
        Ok(Self { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim])
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let dim = diag.len();
        let mut m = Self::zeros(dim);
        for (i, &v) in diag.iter().enumerate() {
            m.entries[i * dim + i] = v;
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.dim + col]
    }

    pub fn diagonal_entries(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(AlgebraError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let d = self.dim;
        let mut out = vec![0.0; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.entries[i * d + k];
                if a == 0.0 {
                    continue;
                }
                let row = &other.entries[k * d..(k + 1) * d];
                for (o, &b) in out[i * d..(i + 1) * d].iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        Ok(Self { dim: d, entries: out })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_dim(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self {
            dim: self.dim,
            entries,
        })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim;
        let mut out = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                out[j * d + i] = self.entries[i * d + j];
            }
        }
        Self { dim: d, entries: out }
    }

    /// `self^exponent` by repeated squaring; `M^0` is the identity.
    pub fn pow(&self, mut exponent: usize) -> Self {
        let mut result = Self::identity(self.dim);
        let mut base = self.clone();
        while exponent > 0 {
            if exponent & 1 == 1 {
                result = result.matmul(&base).expect("square powers share a dimension");
            }
            exponent >>= 1;
            if exponent > 0 {
                base = base.matmul(&base).expect("square powers share a dimension");
            }
        }
        result
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0.0)
    }
}

/// A vector in the truncated ket space; component `k` is the amplitude on `|k>`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amplitudes: Vec<f64>,
}

impl Ket {
    pub fn new(amplitudes: Vec<f64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(AlgebraError::InvalidOrder(0));
        }
        if amplitudes.iter().any(|v| !v.is_finite()) {
            return Err(AlgebraError::NonFinite);
        }
        Ok(Self { amplitudes })
    }

    /// The basis ket `|index>`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(AlgebraError::BasisOutOfRange { index, dim });
        }
        let mut amplitudes = vec![0.0; dim];
        amplitudes[index] = 1.0;
        Ok(Self { amplitudes })
    }

    pub fn vacuum(order: AlgebraOrder) -> Self {
        Self::basis(order.value(), 0).expect("vacuum is always in range")
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    #[inline]
    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn is_zero(&self) -> bool {
        self.amplitudes.iter().all(|&v| v == 0.0)
    }
}

/// `e`: entry `(k-1, k)` is `sqrt(k)`.
pub fn annihilator(order: AlgebraOrder) -> OperatorMatrix {
    let n = order.value();
    let mut m = OperatorMatrix::zeros(n);
    for k in 1..n {
        m.entries[(k - 1) * n + k] = (k as f64).sqrt();
    }
    m
}

/// `e+`: the transpose of [`annihilator`].
pub fn creator(order: AlgebraOrder) -> OperatorMatrix {
    annihilator(order).transpose()
}

/// `N = e+ e = diag(0, 1, ..., n-1)`.
pub fn number_operator(order: AlgebraOrder) -> OperatorMatrix {
    creator(order)
        .matmul(&annihilator(order))
        .expect("ladder matrices share a dimension")
}

/// `[a, b] = ab - ba`.
pub fn commutator(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    a.matmul(b)?.sub(&b.matmul(a)?)
}

/// `{a, b} = ab + ba`.
pub fn anticommutator(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    a.matmul(b)?.add(&b.matmul(a)?)
}

/// `(n-1)!`, exact for `n <= 18`.
pub fn exact_factorial(m: usize) -> Option<u64> {
    (1..=m as u64).try_fold(1u64, |acc, j| acc.checked_mul(j))
}

/// `1 - n/(n-1)! (e+)^(n-1) e^(n-1)` built from explicit matrix powers.
///
/// The scalar is applied after the operator product is formed.
pub fn defining_rhs_direct(order: AlgebraOrder) -> Result<OperatorMatrix> {
    let n = order.value();
    if !order.has_exact_factorial() {
        return Err(AlgebraError::FactorialOverflow { n });
    }
    let fact = exact_factorial(n - 1).ok_or(AlgebraError::FactorialOverflow { n })?;
    let product = creator(order)
        .pow(n - 1)
        .matmul(&annihilator(order).pow(n - 1))?;
    let scalar = n as f64 / fact as f64;
    OperatorMatrix::identity(n).sub(&product.scaled(scalar))
}

/// `1 - n |n-1><n-1|`, the closed form of [`defining_rhs_direct`] for any `n`.
pub fn defining_rhs_stable(order: AlgebraOrder) -> OperatorMatrix {
    let n = order.value();
    let mut diag = vec![1.0; n];
    diag[n - 1] = 1.0 - n as f64;
    OperatorMatrix::diagonal(&diag)
}

pub fn apply_op(op: &OperatorMatrix, ket: &Ket) -> Result<Ket> {
    if op.dim() != ket.dim() {
        return Err(AlgebraError::DimensionMismatch {
            left: op.dim(),
            right: ket.dim(),
        });
    }
    let d = op.dim();
    let amplitudes = (0..d)
        .map(|i| {
            op.entries[i * d..(i + 1) * d]
                .iter()
                .zip(&ket.amplitudes)
                .map(|(a, b)| a * b)
                .sum()
        })
        .collect();
    Ok(Ket { amplitudes })
}

/// Amplitude of `(e+)^k |0>` on `|k>`: `sqrt(k!)` when `k <= n-1`, else 0.
///
/// Accumulated as a product of `sqrt(j)` so no factorial is ever formed.
pub fn vacuum_ladder_amplitude(k: usize, order: AlgebraOrder) -> f64 {
    if k > order.max_occupancy() {
        return 0.0;
    }
    (1..=k).map(|j| (j as f64).sqrt()).product()
}

/// Outcome of one identity check.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub max_deviation: f64,
    pub passed: bool,
}

impl IdentityCheck {
    fn new(name: &'static str, max_deviation: f64, tol: f64) -> Self {
        Self {
            name,
            max_deviation,
            passed: max_deviation <= tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub order: AlgebraOrder,
    pub tol: f64,
    pub checks: Vec<IdentityCheck>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Checks every defining and common relation in the matrix representation.
///
/// Identities, in report order:
/// - `commutator_relation`: `[e, e+] = 1 - n |n-1><n-1|`
/// - `self_commutators`: `[e, e] = [e+, e+] = 0`
/// - `nilpotency`: `e^n = (e+)^n = 0`
/// - `number_operator`: `e+ e = diag(0..n-1)`
/// - `lowering_commutator`: `[e, e+ e] = e`
/// - `raising_commutator`: `[e+, e+ e] = -e+`
pub fn verify_relations(order: AlgebraOrder, tol: f64) -> VerificationReport {
    let n = order.value();
    let e = annihilator(order);
    let ed = creator(order);
    let num = ed.matmul(&e).expect("same dim");
    let zero = OperatorMatrix::zeros(n);

    let dev = |a: &OperatorMatrix, b: &OperatorMatrix| a.max_abs_diff(b).expect("same dim");
    let comm = |a: &OperatorMatrix, b: &OperatorMatrix| commutator(a, b).expect("same dim");

    let relation = dev(&comm(&e, &ed), &defining_rhs_stable(order));
    let selfc = dev(&comm(&e, &e), &zero).max(dev(&comm(&ed, &ed), &zero));
    let nil = e.pow(n).max_abs().max(ed.pow(n).max_abs());
    let diag: Vec<f64> = (0..n).map(|k| k as f64).collect();
    let number = dev(&num, &OperatorMatrix::diagonal(&diag));
    let lower = dev(&comm(&e, &num), &e);
    let raise = dev(&comm(&ed, &num), &ed.scaled(-1.0));

    VerificationReport {
        order,
        tol,
        checks: vec![
            IdentityCheck::new("commutator_relation", relation, tol),
            IdentityCheck::new("self_commutators", selfc, tol),
            IdentityCheck::new("nilpotency", nil, tol),
            IdentityCheck::new("number_operator", number, tol),
            IdentityCheck::new("lowering_commutator", lower, tol),
            IdentityCheck::new("raising_commutator", raise, tol),
        ],
    }
}

/// `[e, e+]` against the literal factorial form, plus agreement of the
/// literal and projector forms. `None` above the exact factorial range.
pub fn verify_direct_relation(order: AlgebraOrder, tol: f64) -> Option<IdentityCheck> {
    let direct = defining_rhs_direct(order).ok()?;
    let comm = commutator(&annihilator(order), &creator(order)).expect("same dim");
    let deviation = comm
        .max_abs_diff(&direct)
        .expect("same dim")
        .max(direct.max_abs_diff(&defining_rhs_stable(order)).expect("same dim"));
    Some(IdentityCheck::new("commutator_relation_direct", deviation, tol))
}
