//! Mean occupation of a single state with at most `n - 1` quanta.
//!
//! With `x = E b + c` and weights `exp(-k x)` for `k = 0..n-1`,
//!
//! ```text
//! P(x) = sum k exp(-k x) / sum exp(-k x)
//!      = 1/(exp(x) - 1) - n/(exp(n x) - 1)
//! ```
//!
//! which is the Fermi function at `n = 2` and tends to the Bose function as
//! `n` grows.

use super::StatsError;
use crate::algebra::AlgebraOrder;

/// Below this `|x|` the closed form switches to its Taylor expansion.
pub const SERIES_WINDOW: f64 = 1e-4;

/// Argument magnitude where `fermi` and `bose` are saturated.
pub const SATURATION: f64 = 700.0;

/// Bernoulli coefficients `B_2k / (2k)!` for `k = 1..=8`.
const BERNOULLI_OVER_FACTORIAL: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
];

/// A point `x = E b + c` of the distribution for a given order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatPoint {
    pub x: f64,
    pub order: AlgebraOrder,
}

impl StatPoint {
    pub fn new(x: f64, order: AlgebraOrder) -> Self {
        Self { x, order }
    }

    pub fn occupancy_direct(self) -> Result<f64, StatsError> {
        occupancy_direct(self.x, self.order)
    }

    pub fn occupancy(self) -> Result<f64, StatsError> {
        occupancy_closed(self.x, self.order)
    }

    pub fn state_partition(self) -> Result<f64, StatsError> {
        state_partition(self.x, self.order)
    }
}

fn finite(x: f64) -> Result<f64, StatsError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(StatsError::NonFinite(x))
    }
}

fn capped(order: AlgebraOrder) -> Result<usize, StatsError> {
    let n = order.value();
    if n < 2 {
        return Err(StatsError::OrderTooSmall { n, min: 2 });
    }
    Ok(n)
}

/// The ratio of the two finite sums, with every weight divided by the
/// largest one so nothing overflows.
pub fn occupancy_direct(x: f64, order: AlgebraOrder) -> Result<f64, StatsError> {
    let x = finite(x)?;
    let n = capped(order)?;
    let peak = if x >= 0.0 { 0.0 } else { (n - 1) as f64 };
    let (mut num, mut den) = (0.0, 0.0);
    for k in 0..n {
        let w = (-(k as f64 - peak) * x).exp();
        num += k as f64 * w;
        den += w;
    }
    Ok(num / den)
}

/// `1/(exp(y) - 1) - 1/y`, finite at `y = 0` where it equals `-1/2`.
fn bose_remainder(y: f64) -> f64 {
    if y.abs() < 0.5 {
        let y2 = y * y;
        let mut power = y;
        let mut sum = -0.5;
        for c in BERNOULLI_OVER_FACTORIAL {
            sum += c * power;
            power *= y2;
        }
        sum
    } else {
        1.0 / y.exp_m1() - 1.0 / y
    }
}

/// Width of the Taylor window around `x = 0` for order `n`.
///
/// The expansion converges for `|n x| < 2 pi`; for large orders the window
/// narrows so that `n |x|` stays below `1e-2`.
pub fn series_window(order: AlgebraOrder) -> f64 {
    SERIES_WINDOW.min(1e-2 / order.value() as f64)
}

/// Closed form `1/(exp(x) - 1) - n/(exp(n x) - 1)`.
///
/// For `|x| < 1/2` it is evaluated as `g(x) - n g(n x)` with
/// `g(y) = 1/(exp(y) - 1) - 1/y`, the same function with the two `1/x`
/// poles cancelled analytically. Inside [`series_window`] the three leading
/// Taylor terms around `(n - 1)/2` are used.
pub fn occupancy_closed(x: f64, order: AlgebraOrder) -> Result<f64, StatsError> {
    let x = finite(x)?;
    let n = capped(order)? as f64;
    if x.abs() < series_window(order) {
        let n2 = n * n;
        return Ok((n - 1.0) / 2.0 - (n2 - 1.0) * x / 12.0 + (n2 * n2 - 1.0) * x * x * x / 720.0);
    }
    if x.abs() < 0.5 {
        return Ok(bose_remainder(x) - n * bose_remainder(n * x));
    }
    Ok(1.0 / x.exp_m1() - n / (n * x).exp_m1())
}

/// `1/(exp(x) + 1)`, evaluated without overflow on the whole real line.
pub fn fermi(x: f64) -> f64 {
    if x > SATURATION {
        return 0.0;
    }
    if x < -SATURATION {
        return 1.0;
    }
    if x >= 0.0 {
        let t = (-x).exp();
        t / (1.0 + t)
    } else {
        1.0 / (1.0 + x.exp())
    }
}

/// `1/(exp(x) - 1)` for `x > 0`.
pub fn bose(x: f64) -> Result<f64, StatsError> {
    if !(x > 0.0) || x.is_nan() {
        return Err(StatsError::BoseDomain(x));
    }
    if x > SATURATION {
        return Ok(0.0);
    }
    Ok(1.0 / x.exp_m1())
}

/// `sum exp(-k x)` for `k = 0..n-1`, i.e. `(1 - exp(-n x))/(1 - exp(-x))`.
///
/// Overflows to infinity for strongly negative `n x`.
pub fn state_partition(x: f64, order: AlgebraOrder) -> Result<f64, StatsError> {
    let x = finite(x)?;
    let n = order.value() as f64;
    if x == 0.0 || n == 1.0 {
        return Ok(n);
    }
    Ok((-n * x).exp_m1() / (-x).exp_m1())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ord(n: usize) -> AlgebraOrder {
        AlgebraOrder::new(n).unwrap()
    }

    // independent oracle: plain sums, no rescaling
    fn naive(x: f64, n: usize) -> f64 {
        let (mut num, mut den) = (0.0, 0.0);
        for k in 0..n {
            let w = (-(k as f64) * x).exp();
            num += k as f64 * w;
            den += w;
        }
        num / den
    }

    #[test]
    fn direct_examples() {
        assert_eq!(occupancy_direct(0.0, ord(4)).unwrap(), 1.5);
        let third = occupancy_direct(2f64.ln(), ord(2)).unwrap();
        assert!((third - 1.0 / 3.0).abs() < 1e-15);
        let full = occupancy_direct(-20.0, ord(5)).unwrap();
        assert!((full - naive(-20.0, 5)).abs() < 1e-12);
        assert!((full - 4.0).abs() < 1e-8);
    }

    #[test]
    fn direct_survives_extreme_arguments() {
        assert_eq!(occupancy_direct(-800.0, ord(3)).unwrap(), 2.0);
        assert_eq!(occupancy_direct(800.0, ord(3)).unwrap(), 0.0);
    }

    #[test]
    fn closed_examples() {
        assert_eq!(occupancy_closed(0.0, ord(7)).unwrap(), 3.0);
        assert!((occupancy_closed(1e-12, ord(7)).unwrap() - 3.0).abs() < 1e-10);
        let f = occupancy_closed(1.0, ord(2)).unwrap();
        assert!((f - 1.0 / (1f64.exp() + 1.0)).abs() < 1e-15);
        assert!((f - 0.268_941_421_369_995_1).abs() < 1e-15);
        let a = occupancy_closed(0.5, ord(3)).unwrap();
        let b = occupancy_direct(0.5, ord(3)).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn closed_matches_naive_across_window_seam() {
        for n in [2, 3, 10, 50] {
            let h = series_window(ord(n));
            for x in [h * 0.999, h * 1.001, -h * 0.999, -h * 1.001, 0.3, 0.6, -0.6] {
                let d = (occupancy_closed(x, ord(n)).unwrap() - naive(x, n)).abs();
                assert!(d < 1e-12, "n = {n}, x = {x}: {d}");
            }
        }
    }

    #[test]
    fn order_one_and_non_finite_rejected() {
        assert_eq!(
            occupancy_direct(0.0, ord(1)),
            Err(StatsError::OrderTooSmall { n: 1, min: 2 })
        );
        assert!(matches!(
            occupancy_closed(f64::NAN, ord(3)),
            Err(StatsError::NonFinite(_))
        ));
        assert!(matches!(
            occupancy_direct(f64::INFINITY, ord(3)),
            Err(StatsError::NonFinite(_))
        ));
    }

    #[test]
    fn fermi_examples() {
        assert_eq!(fermi(0.0), 0.5);
        assert!(fermi(40.0) < 1e-17);
        assert_eq!(fermi(1e6), 0.0);
        assert_eq!(fermi(-1e6), 1.0);
        for x in [-3.0, -0.1, 0.7, 12.0] {
            assert!((fermi(x) - occupancy_direct(x, ord(2)).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn bose_examples() {
        assert!((bose(2f64.ln()).unwrap() - 1.0).abs() < 1e-15);
        assert!((bose(1.0).unwrap() - 0.581_976_706_869_326_4).abs() < 1e-15);
        let big_n = occupancy_direct(1.0, ord(500)).unwrap();
        assert!((big_n - bose(1.0).unwrap()).abs() <= 1e-12);
        assert!((bose(1e-10).unwrap() - 1e10).abs() / 1e10 < 1e-9);
        assert_eq!(bose(1000.0).unwrap(), 0.0);
        assert_eq!(bose(0.0), Err(StatsError::BoseDomain(0.0)));
        assert_eq!(bose(-1.0), Err(StatsError::BoseDomain(-1.0)));
        assert!(bose(f64::NAN).is_err());
    }

    #[test]
    fn partition_examples() {
        assert_eq!(state_partition(0.0, ord(6)).unwrap(), 6.0);
        assert!((state_partition(2f64.ln(), ord(2)).unwrap() - 1.5).abs() < 1e-15);
        assert!((state_partition(2f64.ln(), ord(3)).unwrap() - 1.75).abs() < 1e-15);
        assert_eq!(state_partition(5.0, ord(1)).unwrap(), 1.0);
        for (x, n) in [(0.3, 7), (-0.4, 5), (2.0, 40)] {
            let sum: f64 = (0..n).map(|k| (-(k as f64) * x).exp()).sum();
            assert!((state_partition(x, ord(n)).unwrap() - sum).abs() < 1e-12);
        }
    }
}
