use std::fs;
use std::path::PathBuf;

use aluthge_core::experiments::{
    polish_limit, random_diagonalizable, rate_estimate, run_suite, SpectrumSpec, SuiteConfig,
};
use aluthge_core::linalg::{normality_residual, spectrum, Tolerances};
use aluthge_core::matrix::{format_complex, parse_complex, parse_complex_list};
use aluthge_core::orbit::{contraction_constant, derivative_check, kit_dump, local_diffeo_check, OrbitContext};
use aluthge_core::transform::{aluthge, iterate, limit_with_trajectory, multiplicities, LimitOptions};
use aluthge_core::{ComplexMatrix, Complex64};

use crate::{Cli, Command, Failure, Global};

type CmdResult = Result<(), Failure>;

/// 16 significant digits.
fn real(x: f64) -> String {
    format!("{x:.15e}")
}

fn limit_options(g: &Global) -> LimitOptions {
    let d = LimitOptions::default();
    LimitOptions {
        tol_conv: g.tol_conv.unwrap_or(d.tol_conv),
        tol_norm: g.tol_norm.unwrap_or(d.tol_norm),
        max_iter: g.max_iter.unwrap_or(d.max_iter),
    }
}

fn out_path(g: &Global, name: &str) -> Result<PathBuf, Failure> {
    fs::create_dir_all(&g.out).map_err(|e| Failure::Usage(format!("cannot create {}: {e}", g.out.display())))?;
    Ok(g.out.join(name))
}

fn write_text(path: &PathBuf, text: &str) -> CmdResult {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn write_json<T: serde::Serialize>(path: &PathBuf, value: &T) -> CmdResult {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Usage(e.to_string()))?;
    write_text(path, &(text + "\n"))
}

fn print_spectrum(t: &ComplexMatrix) -> CmdResult {
    for z in spectrum(t)?.eigenvalues() {
        println!("  eigenvalue {}", format_complex(*z));
    }
    Ok(())
}

fn diagonal(s: &str) -> Result<Vec<Complex64>, Failure> {
    Ok(parse_complex_list(s)?)
}

pub fn run(cli: &Cli) -> CmdResult {
    let g = &cli.global;
    match &cli.command {
        Command::Transform { input, output } => {
            let t = ComplexMatrix::read_json(input)?;
            let d = aluthge(&t)?;
            d.write_json(out_path(g, output)?)?;
            println!("norm {}", real(d.norm()));
            println!("normality_residual {}", real(normality_residual(&d)));
            print_spectrum(&d)
        }
        Command::Iterate { input, steps, dump_iterates } => {
            let t = ComplexMatrix::read_json(input)?;
            let traj = iterate(&t, *steps)?;
            traj.write_csv(out_path(g, "trajectory.csv")?)?;
            if *dump_iterates {
                traj.dump_iterates(out_path(g, "iterates")?)?;
            }
            println!("steps {}", traj.steps());
            println!("last_step {}", real(*traj.distances().last().unwrap_or(&0.0)));
            println!("normality_residual {}", real(*traj.normality().last().unwrap_or(&0.0)));
            Ok(())
        }
        Command::Limit { input } => {
            let t = ComplexMatrix::read_json(input)?;
            let (report, traj) = limit_with_trajectory(&t, &limit_options(g))?;
            write_json(&out_path(g, "limit_report.json")?, &report)?;
            traj.write_csv(out_path(g, "trajectory.csv")?)?;
            println!("converged {}", report.converged);
            println!("iterations_used {}", report.iterations_used);
            println!("final_step {}", real(report.final_step));
            println!("final_normality {}", real(report.final_normality));
            print_spectrum(&report.limit)?;
            if report.converged {
                Ok(())
            } else {
                Err(Failure::NotConverged(format!("no convergence within {} iterations", report.iterations_used)))
            }
        }
        Command::Kd { diag } => {
            let ctx = OrbitContext::new(&diagonal(diag)?)?;
            let check = local_diffeo_check(&ctx);
            println!("k_d {}", real(ctx.k_d()));
            println!("local_diffeo {}", check.local_diffeo);
            println!("smallest_singular_value {}", real(check.smallest_singular_value));
            Ok(())
        }
        Command::Kit { diag, output } => {
            let ctx = OrbitContext::new(&diagonal(diag)?)?;
            let text = kit_dump(&ctx)?;
            write_text(&out_path(g, output)?, &(text + "\n"))?;
            println!("k_d {}", real(ctx.k_d()));
            println!("local_diffeo {}", local_diffeo_check(&ctx).local_diffeo);
            Ok(())
        }
        Command::DerivCheck { diag, trials, step } => {
            let rep = derivative_check(&diagonal(diag)?, *trials, g.seed.unwrap_or(0), *step)?;
            println!("trials {}", rep.trials);
            println!("max_relative_error {}", real(rep.max_relative_error));
            println!("bound {}", real(rep.bound));
            if rep.passed() {
                Ok(())
            } else {
                Err(Failure::Numerical(format!(
                    "analytic and finite-difference derivatives differ by {} > {}",
                    real(rep.max_relative_error),
                    real(rep.bound)
                )))
            }
        }
        Command::Suite { config } => {
            let mut cfg = SuiteConfig::load(config)?;
            if let Some(seed) = g.seed {
                cfg.seed = seed;
            }
            cfg.tol_conv = g.tol_conv.unwrap_or(cfg.tol_conv);
            cfg.tol_norm = g.tol_norm.unwrap_or(cfg.tol_norm);
            cfg.max_iter = g.max_iter.unwrap_or(cfg.max_iter);
            let (summary, _) = run_suite(&cfg, &g.out)?;
            println!("trials {}", summary.total);
            println!("converged {}/{}", summary.converged, summary.total);
            println!("asserted_converged {}/{}", summary.asserted_converged, summary.asserted);
            println!("rate_ok {}", summary.rate_ok);
            println!("records {}", g.out.join(&cfg.out).display());
            if summary.all_asserted_converged() {
                Ok(())
            } else {
                Err(Failure::NotConverged(format!(
                    "{} of {} diagonalizable trials did not converge",
                    summary.asserted - summary.asserted_converged,
                    summary.asserted
                )))
            }
        }
        Command::Random { size, eigenvalues, cond, output } => {
            let spec = match eigenvalues {
                Some(list) => SpectrumSpec::Explicit { eigenvalues: diagonal(list)? },
                None => SpectrumSpec::default(),
            };
            let inst = random_diagonalizable(*size, &spec, *cond, g.seed.unwrap_or(0))?;
            inst.matrix.write_json(out_path(g, output)?)?;
            println!("condition {}", real(inst.condition));
            for z in &inst.eigenvalues {
                println!("  eigenvalue {}", format_complex(*z));
            }
            Ok(())
        }
        Command::Multiplicity { input, mu, steps } => {
            let t = ComplexMatrix::read_json(input)?;
            let mu = parse_complex(mu)?;
            let traj = iterate(&t, *steps)?;
            let tol = Tolerances::default();
            println!("iter algebraic geometric");
            for (k, m) in traj.iterates().iter().enumerate() {
                let mult = multiplicities(m, mu, &tol)?;
                println!("{k} {} {}", mult.algebraic, mult.geometric);
            }
            Ok(())
        }
        Command::Rate { input, diag, slack } => {
            let t = ComplexMatrix::read_json(input)?;
            let (report, traj) = limit_with_trajectory(&t, &limit_options(g))?;
            if !report.converged {
                return Err(Failure::NotConverged(format!(
                    "no convergence within {} iterations",
                    report.iterations_used
                )));
            }
            let k_d = match diag {
                Some(list) => OrbitContext::new(&diagonal(list)?)?.k_d(),
                None => {
                    let floor = 1e-10 * report.limit.norm().max(1.0);
                    let eigs: Vec<Complex64> =
                        spectrum(&report.limit)?.eigenvalues().iter().copied().filter(|z| z.norm() > floor).collect();
                    if eigs.is_empty() {
                        contraction_constant(&eigs)
                    } else {
                        OrbitContext::from_spectrum(&eigs)?.k_d()
                    }
                }
            };
            let l = polish_limit(&report.limit, 2000)?;
            let rate = rate_estimate(&traj, &l, k_d, *slack)?;
            write_json(&out_path(g, "rate_report.json")?, &rate)?;
            println!("iterations_used {}", report.iterations_used);
            println!("asymptotic_rate {}", real(rate.asymptotic_rate));
            println!("k_d {}", real(k_d));
            println!("satisfied {}", rate.satisfied);
            println!("transient_steps {}", rate.transient_steps);
            Ok(())
        }
    }
}
