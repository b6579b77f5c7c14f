use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

use genalg::algebra::{self, AlgebraOrder, IdentityCheck};
use genalg::opcalc::{self, NormalTerm};
use genalg::statistics::{self, LevelSystem, StatsError};

use crate::format::OutputFormat;
use crate::{EXIT_INFEASIBLE, EXIT_NO_CONVERGENCE, EXIT_USAGE};

const MAX_VERIFY_ORDER: usize = 64;
const EXIT_IDENTITY_FAILED: u8 = 1;

fn usage(msg: impl std::fmt::Display) -> u8 {
    eprintln!("error: {msg}");
    EXIT_USAGE
}

/// Writes the whole document at once; a closed stdout is not an error.
fn emit(text: &str) {
    let mut out = io::stdout().lock();
    let _ = out.write_all(text.as_bytes());
    let _ = out.flush();
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable document");
    s.push('\n');
    s
}

fn pass_fail(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

#[derive(Serialize)]
struct VerifyRow {
    n: usize,
    identity: &'static str,
    passed: bool,
    max_deviation: f64,
}

#[derive(Serialize)]
struct VerifyDoc {
    n_min: usize,
    n_max: usize,
    tol: f64,
    passed: bool,
    rows: Vec<VerifyRow>,
}

pub fn verify(n_min: usize, n_max: usize, tol: f64, format: OutputFormat) -> u8 {
    if n_min < 1 || n_min > n_max || n_max > MAX_VERIFY_ORDER {
        return usage(format!(
            "need 1 <= n-min <= n-max <= {MAX_VERIFY_ORDER}, got n-min {n_min}, n-max {n_max}"
        ));
    }
    if !(tol > 0.0) || !tol.is_finite() {
        return usage(format!("tolerance must be positive, got {tol}"));
    }

    let mut rows = Vec::new();
    for n in n_min..=n_max {
        let order = AlgebraOrder::new(n).expect("n >= 1");
        let mut checks: Vec<IdentityCheck> = algebra::verify_relations(order, tol).checks;
        checks.extend(algebra::verify_direct_relation(order, tol));
        rows.extend(checks.into_iter().map(|c| VerifyRow {
            n,
            identity: c.name,
            passed: c.passed,
            max_deviation: c.max_deviation,
        }));
    }
    let all = rows.iter().all(|r| r.passed);

    let text = match format {
        OutputFormat::Json => json(&VerifyDoc {
            n_min,
            n_max,
            tol,
            passed: all,
            rows,
        }),
        OutputFormat::Csv => {
            let mut s = String::from("n,identity,status,max_deviation\n");
            for r in &rows {
                s += &format!(
                    "{},{},{},{}\n",
                    r.n,
                    r.identity,
                    pass_fail(r.passed),
                    format.num(r.max_deviation)
                );
            }
            s
        }
        OutputFormat::Plain => {
            let mut s = String::new();
            for r in &rows {
                s += &format!(
                    "n={:<3} {:<28} {}  max deviation {}\n",
                    r.n,
                    r.identity,
                    pass_fail(r.passed),
                    format.num(r.max_deviation)
                );
            }
            s += &format!("overall: {}\n", pass_fail(all));
            s
        }
    };
    emit(&text);
    if all {
        0
    } else {
        EXIT_IDENTITY_FAILED
    }
}

#[derive(Serialize)]
struct TableRow {
    x: f64,
    occupancy: f64,
    fermi: f64,
    bose: Option<f64>,
}

#[derive(Serialize)]
struct TableDoc {
    n: usize,
    rows: Vec<TableRow>,
}

/// Inclusive uniform grid; the last point is exactly `x_max`.
fn grid(x_min: f64, x_max: f64, steps: usize) -> Vec<f64> {
    let h = (x_max - x_min) / (steps - 1) as f64;
    (0..steps)
        .map(|i| if i == steps - 1 { x_max } else { x_min + i as f64 * h })
        .collect()
}

pub fn table(n: usize, x_min: f64, x_max: f64, steps: usize, format: OutputFormat) -> u8 {
    if n < 2 {
        return usage(format!("occupancy needs n >= 2, got {n}"));
    }
    if steps < 2 {
        return usage(format!("need at least 2 steps, got {steps}"));
    }
    if !x_min.is_finite() || !x_max.is_finite() || x_min >= x_max {
        return usage(format!("need finite x-min < x-max, got {x_min} and {x_max}"));
    }
    let order = AlgebraOrder::new(n).expect("n >= 2");

    let rows: Vec<TableRow> = grid(x_min, x_max, steps)
        .into_iter()
        .map(|x| TableRow {
            x,
            occupancy: statistics::occupancy_closed(x, order).expect("finite x, n >= 2"),
            fermi: statistics::fermi(x),
            bose: statistics::bose(x).ok(),
        })
        .collect();

    let text = match format {
        OutputFormat::Json => json(&TableDoc { n, rows }),
        OutputFormat::Csv | OutputFormat::Plain => {
            let sep = if format == OutputFormat::Csv { "," } else { "\t" };
            let mut s = ["x", "occupancy", "fermi", "bose"].join(sep);
            s.push('\n');
            for r in &rows {
                let bose = r.bose.map(|b| format.num(b)).unwrap_or_default();
                s += &[format.num(r.x), format.num(r.occupancy), format.num(r.fermi), bose]
                    .join(sep);
                s.push('\n');
            }
            s
        }
    };
    emit(&text);
    0
}

#[derive(Serialize)]
struct NormalDoc {
    n: usize,
    normal_form: String,
    terms: Vec<NormalTerm>,
}

fn caret_diagnostic(expr: &str, offset: usize) -> String {
    let col = expr[..offset.min(expr.len())].chars().count();
    format!("  {expr}\n  {}^", " ".repeat(col))
}

pub fn normal_order(n: usize, expr_text: &str, format: OutputFormat) -> u8 {
    let order = match AlgebraOrder::new(n) {
        Ok(o) => o,
        Err(e) => return usage(e),
    };
    let expr = match opcalc::parse(expr_text) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("error: {e}\n{}", caret_diagnostic(expr_text, e.offset));
            return EXIT_USAGE;
        }
    };
    let form = match opcalc::normal_order(&expr, order) {
        Ok(f) => f,
        Err(e) => return usage(e),
    };

    let text = match format {
        OutputFormat::Plain => format!("{form}\n"),
        OutputFormat::Json => json(&NormalDoc {
            n,
            normal_form: form.to_string(),
            terms: form.records(),
        }),
        OutputFormat::Csv => {
            let mut s = String::from("a,b,numerator,denominator\n");
            for t in form.records() {
                s += &format!("{},{},{},{}\n", t.a, t.b, t.numerator, t.denominator);
            }
            s
        }
    };
    emit(&text);
    0
}

#[derive(Serialize)]
struct LevelRow {
    energy: f64,
    degeneracy: u32,
    occupancy: f64,
}

#[derive(Serialize)]
struct EnsembleDoc {
    n: usize,
    b: f64,
    c: f64,
    target_particles: f64,
    target_energy: f64,
    achieved_particles: f64,
    achieved_energy: f64,
    iterations: usize,
    levels: Vec<LevelRow>,
}

pub fn ensemble(
    n: usize,
    levels_path: &Path,
    particles: f64,
    energy: f64,
    tol: f64,
    format: OutputFormat,
) -> u8 {
    let order = match AlgebraOrder::new(n) {
        Ok(o) => o,
        Err(e) => return usage(e),
    };
    let levels = match LevelSystem::from_path(levels_path) {
        Ok(l) => l,
        Err(e) => return usage(e),
    };
    let sol = match statistics::solve_ensemble(&levels, particles, energy, order, tol) {
        Ok(s) => s,
        Err(e @ StatsError::Infeasible(_)) => {
            eprintln!("error: {e}");
            return EXIT_INFEASIBLE;
        }
        Err(e @ StatsError::NoConvergence { .. }) => {
            eprintln!("error: {e}");
            return EXIT_NO_CONVERGENCE;
        }
        Err(e) => return usage(e),
    };

    let rows: Vec<LevelRow> = levels
        .levels()
        .iter()
        .zip(&sol.occupancies)
        .map(|(l, &occupancy)| LevelRow {
            energy: l.energy,
            degeneracy: l.degeneracy,
            occupancy,
        })
        .collect();

    let f = |v: f64| format.num(v);
    let text = match format {
        OutputFormat::Json => json(&EnsembleDoc {
            n,
            b: sol.b,
            c: sol.c,
            target_particles: particles,
            target_energy: energy,
            achieved_particles: sol.achieved_particles,
            achieved_energy: sol.achieved_energy,
            iterations: sol.iterations,
            levels: rows,
        }),
        OutputFormat::Csv => {
            let mut s = String::from(
                "energy,degeneracy,occupancy,b,c,achieved_particles,achieved_energy,iterations\n",
            );
            for r in &rows {
                s += &format!(
                    "{},{},{},{},{},{},{},{}\n",
                    f(r.energy),
                    r.degeneracy,
                    f(r.occupancy),
                    f(sol.b),
                    f(sol.c),
                    f(sol.achieved_particles),
                    f(sol.achieved_energy),
                    sol.iterations
                );
            }
            s
        }
        OutputFormat::Plain => {
            let mut s = format!(
                "b = {}\nc = {}\nparticles = {} (target {})\nenergy = {} (target {})\niterations = {}\n\n",
                f(sol.b),
                f(sol.c),
                f(sol.achieved_particles),
                f(particles),
                f(sol.achieved_energy),
                f(energy),
                sol.iterations
            );
            s += &format!("{:>14} {:>10} {:>14}\n", "energy", "degeneracy", "occupancy");
            for r in &rows {
                s += &format!(
                    "{:>14} {:>10} {:>14}\n",
                    f(r.energy),
                    r.degeneracy,
                    f(r.occupancy)
                );
            }
            s
        }
    };
    emit(&text);
    0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_inclusive() {
        let g = grid(-2.0, 6.0, 100);
        assert_eq!(g.len(), 100);
        assert_eq!(g[0], -2.0);
        assert_eq!(g[99], 6.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn caret_points_at_offset() {
        assert_eq!(caret_diagnostic("e e+ )", 5), "  e e+ )\n       ^");
    }
}
