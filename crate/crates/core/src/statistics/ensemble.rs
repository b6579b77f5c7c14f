//! Lagrange factors `(b, c)` for a level spectrum at fixed particle number
//! and fixed total energy.
//!
//! Each state of level `i` holds `P(E_i b + c)` quanta on average, and the
//! solver matches
//!
//! ```text
//! sum g_i P(E_i b + c)       = particles
//! sum g_i E_i P(E_i b + c)   = energy
//! ```
//!
//! Damped Newton with a finite difference Jacobian runs first. If it stalls,
//! nested bisection takes over: `c` for fixed `b` from the strict decrease of
//! the particle count in `c`, and `b` from the decrease of the energy along
//! that curve.

use super::levels::LevelSystem;
use super::occupancy::occupancy_closed;
use super::StatsError;
use crate::algebra::AlgebraOrder;

pub const MAX_NEWTON_ITERATIONS: usize = 100;
const MAX_BISECTION_STEPS: usize = 200;
const MAX_BRACKET_DOUBLINGS: usize = 1100;

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSolution {
    pub b: f64,
    pub c: f64,
    /// Mean quanta per state, one entry per level.
    pub occupancies: Vec<f64>,
    pub achieved_particles: f64,
    pub achieved_energy: f64,
    pub iterations: usize,
}

struct Problem<'a> {
    levels: &'a LevelSystem,
    order: AlgebraOrder,
    particles: f64,
    energy: f64,
}

impl Problem<'_> {
    fn occupancies(&self, b: f64, c: f64) -> Vec<f64> {
        self.levels
            .levels()
            .iter()
            .map(|l| occupancy_closed(l.energy * b + c, self.order).unwrap_or(f64::NAN))
            .collect()
    }

    fn totals(&self, b: f64, c: f64) -> (f64, f64) {
        self.levels
            .levels()
            .iter()
            .fold((0.0, 0.0), |(p, e), l| {
                let occ = occupancy_closed(l.energy * b + c, self.order).unwrap_or(f64::NAN);
                let g = l.degeneracy as f64;
                (p + g * occ, e + g * l.energy * occ)
            })
    }

    fn residuals(&self, b: f64, c: f64) -> (f64, f64) {
        let (p, e) = self.totals(b, c);
        (p - self.particles, e - self.energy)
    }

    fn converged(&self, r: (f64, f64), tol: f64) -> bool {
        r.0.abs() <= tol && r.1.abs() <= tol
    }

    /// `c` with the particle constraint met for this `b`.
    fn solve_c(&self, b: f64) -> Option<f64> {
        let f = |c: f64| self.totals(b, c).0 - self.particles;
        let (mut lo, mut hi) = (-1.0_f64, 1.0_f64);
        let mut doublings = 0;
        while f(lo) < 0.0 {
            lo *= 2.0;
            doublings += 1;
            if doublings > MAX_BRACKET_DOUBLINGS || !lo.is_finite() {
                return None;
            }
        }
        while f(hi) > 0.0 {
            hi *= 2.0;
            doublings += 1;
            if doublings > MAX_BRACKET_DOUBLINGS || !hi.is_finite() {
                return None;
            }
        }
        Some(bisect_decreasing(f, lo, hi))
    }

    fn newton(&self, tol: f64, b0: f64, c0: f64) -> (f64, f64, usize, bool) {
        let merit = |r: (f64, f64)| r.0 * r.0 + r.1 * r.1;
        let (mut b, mut c) = (b0, c0);
        let mut r = self.residuals(b, c);
        for iter in 0..MAX_NEWTON_ITERATIONS {
            if self.converged(r, tol) {
                return (b, c, iter, true);
            }
            let hb = 1e-6 * b.abs().max(1.0);
            let hc = 1e-6 * c.abs().max(1.0);
            let (pb1, pb0) = (self.residuals(b + hb, c), self.residuals(b - hb, c));
            let (pc1, pc0) = (self.residuals(b, c + hc), self.residuals(b, c - hc));
            let j11 = (pb1.0 - pb0.0) / (2.0 * hb);
            let j21 = (pb1.1 - pb0.1) / (2.0 * hb);
            let j12 = (pc1.0 - pc0.0) / (2.0 * hc);
            let j22 = (pc1.1 - pc0.1) / (2.0 * hc);
            let det = j11 * j22 - j12 * j21;
            if !det.is_finite() || det.abs() < 1e-300 {
                return (b, c, iter, false);
            }
            let db = -(j22 * r.0 - j12 * r.1) / det;
            let dc = -(-j21 * r.0 + j11 * r.1) / det;

            let current = merit(r);
            let mut step = 1.0;
            let mut accepted = None;
            for _ in 0..40 {
                let (nb, nc) = (b + step * db, c + step * dc);
                let nr = self.residuals(nb, nc);
                if nr.0.is_finite() && nr.1.is_finite() && merit(nr) < current {
                    accepted = Some((nb, nc, nr));
                    break;
                }
                step *= 0.5;
            }
            match accepted {
                Some((nb, nc, nr)) => {
                    b = nb;
                    c = nc;
                    r = nr;
                }
                None => return (b, c, iter + 1, false),
            }
        }
        let ok = self.converged(r, tol);
        (b, c, MAX_NEWTON_ITERATIONS, ok)
    }

    fn nested_bisection(&self) -> Option<(f64, f64, usize)> {
        let h = |b: f64| -> Option<f64> {
            let c = self.solve_c(b)?;
            Some(self.totals(b, c).1 - self.energy)
        };
        let (mut lo, mut hi) = (-1.0_f64, 1.0_f64);
        let mut steps = 0;
        while h(lo)? < 0.0 {
            lo *= 2.0;
            steps += 1;
            if steps > MAX_BRACKET_DOUBLINGS {
                return None;
            }
        }
        while h(hi)? > 0.0 {
            hi *= 2.0;
            steps += 1;
            if steps > MAX_BRACKET_DOUBLINGS {
                return None;
            }
        }
        for _ in 0..MAX_BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            steps += 1;
            if h(mid)? > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let b = 0.5 * (lo + hi);
        Some((b, self.solve_c(b)?, steps))
    }
}

/// Root of a decreasing function bracketed by `f(lo) >= 0 >= f(hi)`,
/// bisected until the interval stops shrinking.
fn bisect_decreasing(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..MAX_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if v == 0.0 {
            return mid;
        }
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Lowest and highest total energy reachable with `particles` quanta when
/// each state holds at most `n - 1`.
pub fn energy_bounds(levels: &LevelSystem, particles: f64, order: AlgebraOrder) -> (f64, f64) {
    let cap = order.max_occupancy() as f64;
    let mut sorted: Vec<_> = levels.levels().iter().collect();
    sorted.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    let fill = |iter: &mut dyn Iterator<Item = &&super::levels::Level>| {
        let mut left = particles;
        let mut total = 0.0;
        for l in iter {
            let take = left.min(cap * l.degeneracy as f64);
            total += take * l.energy;
            left -= take;
            if left <= 0.0 {
                break;
            }
        }
        total
    };
    (fill(&mut sorted.iter()), fill(&mut sorted.iter().rev()))
}

/// Finds `(b, c)` meeting both constraints to within `tol`.
///
/// When every level has the same energy `b` cannot be determined and is
/// fixed to zero.
pub fn solve_ensemble(
    levels: &LevelSystem,
    particles: f64,
    energy: f64,
    order: AlgebraOrder,
    tol: f64,
) -> Result<EnsembleSolution, StatsError> {
    let n = order.value();
    if n < 2 {
        return Err(StatsError::OrderTooSmall { n, min: 2 });
    }
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(StatsError::InvalidParameter(format!(
            "tolerance must be positive and finite, got {tol}"
        )));
    }
    if !particles.is_finite() || !energy.is_finite() {
        return Err(StatsError::InvalidParameter(
            "targets must be finite".into(),
        ));
    }

    let capacity = order.max_occupancy() as f64 * levels.total_states();
    if particles <= 0.0 {
        return Err(StatsError::Infeasible(format!(
            "particles must be positive, got {particles}"
        )));
    }
    if particles >= capacity {
        return Err(StatsError::Infeasible(format!(
            "particles {particles} must stay below the exclusion capacity \
             (n-1) * sum(g) = {capacity}"
        )));
    }

    let problem = Problem {
        levels,
        order,
        particles,
        energy,
    };
    let (e_min, e_max) = energy_bounds(levels, particles, order);
    let scale = e_min.abs().max(e_max.abs()).max(1.0);
    let degenerate = (e_max - e_min).abs() <= 1e-12 * scale;

    let finish = |b: f64, c: f64, iterations: usize| -> Result<EnsembleSolution, StatsError> {
        let (p, e) = problem.totals(b, c);
        let r = (p - particles, e - energy);
        if !problem.converged(r, tol) {
            return Err(StatsError::NoConvergence {
                particle_residual: r.0,
                energy_residual: r.1,
                iterations,
            });
        }
        Ok(EnsembleSolution {
            b,
            c,
            occupancies: problem.occupancies(b, c),
            achieved_particles: p,
            achieved_energy: e,
            iterations,
        })
    };

    if degenerate {
        if (energy - e_min).abs() > tol {
            return Err(StatsError::Infeasible(format!(
                "all levels share one energy, so the total energy must be {e_min}, got {energy}"
            )));
        }
        let c = problem.solve_c(0.0).ok_or_else(|| StatsError::NoConvergence {
            particle_residual: f64::NAN,
            energy_residual: f64::NAN,
            iterations: 0,
        })?;
        return finish(0.0, c, 0);
    }

    if energy <= e_min || energy >= e_max {
        return Err(StatsError::Infeasible(format!(
            "energy {energy} must lie strictly between {e_min} and {e_max} \
             for {particles} particles"
        )));
    }

    let c0 = problem.solve_c(0.0).unwrap_or(0.0);
    let (b, c, iters, ok) = problem.newton(tol, 0.0, c0);
    if ok {
        return finish(b, c, iters);
    }

    match problem.nested_bisection() {
        Some((b, c, steps)) => {
            // polish the bisection point; keep it if Newton goes nowhere
            let (pb, pc, polish, pok) = problem.newton(tol, b, c);
            if pok {
                finish(pb, pc, iters + steps + polish)
            } else {
                finish(b, c, iters + steps)
            }
        }
        None => {
            let r = problem.residuals(b, c);
            Err(StatsError::NoConvergence {
                particle_residual: r.0,
                energy_residual: r.1,
                iterations: iters,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ord(n: usize) -> AlgebraOrder {
        AlgebraOrder::new(n).unwrap()
    }

    #[test]
    fn single_level_midpoint() {
        let sys = LevelSystem::from_pairs(&[0.0], &[1]).unwrap();
        let sol = solve_ensemble(&sys, 1.5, 0.0, ord(4), 1e-12).unwrap();
        assert_eq!(sol.b, 0.0);
        assert!(sol.c.abs() < 1e-12);
        assert!((sol.occupancies[0] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn single_level_energy_must_match() {
        let sys = LevelSystem::from_pairs(&[2.0], &[3]).unwrap();
        assert!(solve_ensemble(&sys, 1.0, 2.0, ord(3), 1e-10).is_ok());
        assert!(matches!(
            solve_ensemble(&sys, 1.0, 2.5, ord(3), 1e-10),
            Err(StatsError::Infeasible(_))
        ));
    }

    #[test]
    fn symmetric_two_level() {
        let sys = LevelSystem::from_pairs(&[0.0, 1.0], &[1, 1]).unwrap();
        let sol = solve_ensemble(&sys, 1.0, 0.5, ord(2), 1e-12).unwrap();
        assert!(sol.b.abs() < 1e-10 && sol.c.abs() < 1e-10);
        for occ in &sol.occupancies {
            assert!((occ - 0.5).abs() < 1e-10);
        }
    }

    #[test]
    fn energy_bounds_fill_greedily() {
        let sys = LevelSystem::from_pairs(&[0.0, 1.0, 2.0], &[2, 2, 2]).unwrap();
        assert_eq!(energy_bounds(&sys, 4.0, ord(3)), (0.0, 8.0));
        assert_eq!(energy_bounds(&sys, 6.0, ord(3)), (2.0, 10.0));
        assert_eq!(energy_bounds(&sys, 5.0, ord(2)), (4.0, 6.0));
    }

    #[test]
    fn infeasible_targets_name_the_bound() {
        let sys = LevelSystem::from_pairs(&[0.0, 1.0, 2.0], &[1, 1, 1]).unwrap();
        let err = solve_ensemble(&sys, 99.0, 1.0, ord(3), 1e-10).unwrap_err();
        match err {
            StatsError::Infeasible(msg) => assert!(msg.contains("capacity")),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            solve_ensemble(&sys, 0.0, 0.0, ord(3), 1e-10),
            Err(StatsError::Infeasible(_))
        ));
        // two particles, lowest arrangement has energy 0
        assert!(matches!(
            solve_ensemble(&sys, 2.0, 0.0, ord(3), 1e-10),
            Err(StatsError::Infeasible(_))
        ));
        assert!(matches!(
            solve_ensemble(&sys, 2.0, 4.0, ord(3), 1e-10),
            Err(StatsError::Infeasible(_))
        ));
    }

    #[test]
    fn bad_parameters() {
        let sys = LevelSystem::from_pairs(&[0.0, 1.0], &[1, 1]).unwrap();
        assert!(matches!(
            solve_ensemble(&sys, 1.0, 0.5, ord(2), 0.0),
            Err(StatsError::InvalidParameter(_))
        ));
        assert!(matches!(
            solve_ensemble(&sys, f64::NAN, 0.5, ord(2), 1e-10),
            Err(StatsError::InvalidParameter(_))
        ));
        assert!(matches!(
            solve_ensemble(&sys, 0.5, 0.2, ord(1), 1e-10),
            Err(StatsError::OrderTooSmall { .. })
        ));
    }

    #[test]
    fn near_saturated_targets_reach_fallback_or_converge() {
        // energy close to the lower bound pushes b large
        let sys = LevelSystem::from_pairs(&[0.0, 1.0, 3.0], &[1, 2, 1]).unwrap();
        let sol = solve_ensemble(&sys, 2.0, 0.05, ord(3), 1e-10).unwrap();
        let (p, e) = (sol.achieved_particles, sol.achieved_energy);
        assert!((p - 2.0).abs() <= 1e-10 && (e - 0.05).abs() <= 1e-10);
        assert!(sol.b > 0.0);
    }

    #[test]
    fn bisection_alone_meets_constraints() {
        let sys = LevelSystem::from_pairs(&[0.0, 1.0, 2.0], &[2, 2, 2]).unwrap();
        let problem = Problem {
            levels: &sys,
            order: ord(3),
            particles: 4.0,
            energy: 3.0,
        };
        let (b, c, _) = problem.nested_bisection().unwrap();
        let r = problem.residuals(b, c);
        assert!(r.0.abs() < 1e-9 && r.1.abs() < 1e-9, "{r:?}");
    }
}
