//! Thin command-line harness over the library drivers.
//!
//! Subcommands: `run`, `converge`, `stability`, `cases`. Flags mirror the
//! configuration keys; `--config FILE` loads a `key = value` file first and
//! flags override it.

use std::path::PathBuf;
use std::process::ExitCode;

use staggered_euler::config::{parse_config_text, parse_flags, RunConfig};
use staggered_euler::driver::{
    convergence_study, run_case, stability_matrix, write_convergence, StabilityResult,
};
use staggered_euler::error::{Error, Result};
use staggered_euler::reference::{builtin_cases, CaseData};

const USAGE: &str = "usage: staggered-euler <command> [flags]

commands:
  run        solve one benchmark case and write profile/series/summary CSVs
  converge   mesh-refinement study against the exact smooth solution
  stability  flux choice x degree pairing stability matrix
  cases      list the built-in benchmark cases

common flags (also valid as `key = value` lines in --config FILE):
  --config FILE        load configuration from FILE first
  --case NAME          sod | strong | one23 | severe | smooth | custom
  --n-cells N          elements (default 100)
  --r {0|1}            thermodynamic degree (velocity is r+1)
  --equal-degree on    K1T1 pairing, stability experiment only
  --flux NAME          centered | exact | hllc
  --stabilization NAME llf | jump
  --blending NAME      none | proc1 | proc2
  --correction on|off  element conservation correction
  --scheme NAME        euler | dec2
  --cfl X, --theta X, --t-final X, --audit on|off
  --out-dir DIR        output directory (default `out` for run)

converge only:
  --meshes N1,N2,...   mesh sizes (default 50,100,200,400)
stability only:
  --n-cells N, --t-report T, --out FILE";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match dispatch(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn dispatch(args: &[String]) -> Result<()> {
    let Some(command) = args.first() else {
        println!("{USAGE}");
        return Ok(());
    };
    let rest = &args[1..];
    match command.as_str() {
        "run" => cmd_run(rest),
        "converge" => cmd_converge(rest),
        "stability" => cmd_stability(rest),
        "cases" => cmd_cases(),
        "help" | "--help" | "-h" => {
            println!("{USAGE}");
            Ok(())
        }
        other => Err(Error::Config(format!(
            "unknown command `{other}` (run|converge|stability|cases)"
        ))),
    }
}

/// Split out `--config FILE` and any keys in `consume`, returning
/// (file pairs, remaining flag pairs, consumed values).
type SplitPairs = (
    Vec<(String, String)>,
    Vec<(String, String)>,
    Vec<(String, String)>,
);

fn split_flags(args: &[String], consume: &[&str]) -> Result<SplitPairs> {
    let pairs = parse_flags(args)?;
    let mut file_pairs = Vec::new();
    let mut flag_pairs = Vec::new();
    let mut consumed = Vec::new();
    for (key, value) in pairs {
        if key == "config" {
            let text = std::fs::read_to_string(&value).map_err(|source| Error::Io {
                path: value.clone(),
                source,
            })?;
            file_pairs.extend(parse_config_text(&text)?);
        } else if consume.contains(&key.as_str()) {
            consumed.push((key, value));
        } else {
            flag_pairs.push((key, value));
        }
    }
    Ok((file_pairs, flag_pairs, consumed))
}

fn cmd_run(args: &[String]) -> Result<()> {
    let (file_pairs, flag_pairs, _) = split_flags(args, &[])?;
    let mut config = RunConfig::from_pairs(&file_pairs, &flag_pairs)?;
    if config.out_dir.is_none() {
        config.out_dir = Some(PathBuf::from("out"));
    }
    let output = run_case(&config)?;
    let s = &output.summary;
    println!(
        "case = {} ({}, {} cells, {} flux)",
        s.case,
        s.pairing,
        s.n_cells,
        s.flux.name()
    );
    println!("steps = {} to t = {}", s.steps, s.t_final);
    if let Some(l1) = &s.l1 {
        println!("l1_rho = {}", l1.rho);
        println!("l1_u = {}", l1.u);
        println!("l1_p = {}", l1.p);
    }
    if let (Some(x), Some(exact), Some(err)) = (
        s.shock_position,
        s.shock_position_exact,
        s.shock_position_error,
    ) {
        println!("shock_position = {x} (exact {exact}, error {err} of domain)");
    }
    println!("mass_drift = {}", s.mass_drift);
    println!("momentum_drift = {}", s.momentum_drift);
    println!("energy_drift = {}", s.energy_drift);
    println!("weak_bv_rho = {}", s.weak_bv.rho);
    println!("max_ru = {}", s.max_r_u);
    println!("max_re = {}", s.max_r_e);
    if let (Some(m), Some(e)) = (s.max_identity_momentum, s.max_identity_energy) {
        println!("max_identity_momentum = {m}");
        println!("max_identity_energy = {e}");
    }
    if let Some(dir) = &config.out_dir {
        println!("outputs in {}", dir.display());
    }
    Ok(())
}

fn cmd_converge(args: &[String]) -> Result<()> {
    let (file_pairs, flag_pairs, consumed) = split_flags(args, &["meshes", "out"])?;
    let mut meshes = vec![50usize, 100, 200, 400];
    let mut out: Option<PathBuf> = None;
    for (key, value) in consumed {
        match key.as_str() {
            "meshes" => {
                meshes = value
                    .split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<usize>()
                            .map_err(|_| Error::Config(format!("bad mesh size `{s}` in --meshes")))
                    })
                    .collect::<Result<Vec<_>>>()?;
            }
            "out" => out = Some(PathBuf::from(value)),
            _ => unreachable!(),
        }
    }
    let mut config = RunConfig::from_pairs(&file_pairs, &flag_pairs)?;
    if config.case == "sod" && !file_pairs.iter().chain(&flag_pairs).any(|(k, _)| k == "case") {
        // The study needs an exact reference of a smooth flow.
        config.case = "smooth".into();
    }
    let rows = convergence_study(&config, &meshes)?;
    println!("n_cells  l1_rho        l1_u          l1_p          order_rho  order_u  order_p");
    for row in &rows {
        let fmt = |o: Option<f64>| o.map(|v| format!("{v:.3}")).unwrap_or_else(|| "-".into());
        println!(
            "{:>7}  {:<12.6e}  {:<12.6e}  {:<12.6e}  {:>9}  {:>7}  {:>7}",
            row.n_cells,
            row.errors.rho,
            row.errors.u,
            row.errors.p,
            fmt(row.order_rho),
            fmt(row.order_u),
            fmt(row.order_p)
        );
    }
    if let Some(path) = out {
        write_convergence(&rows, &path)?;
        println!("table written to {}", path.display());
    }
    Ok(())
}

fn cmd_stability(args: &[String]) -> Result<()> {
    let (_, flag_pairs, consumed) = split_flags(args, &["n_cells", "t_report", "out"])?;
    if let Some((key, _)) = flag_pairs.first() {
        return Err(Error::Config(format!(
            "stability takes only --n-cells, --t-report, --out (got `{key}`)"
        )));
    }
    let mut n_cells = 100usize;
    let mut t_report = 0.025f64;
    let mut out: Option<PathBuf> = None;
    for (key, value) in consumed {
        match key.as_str() {
            "n_cells" => {
                n_cells = value
                    .parse()
                    .map_err(|_| Error::Config(format!("bad --n-cells `{value}`")))?
            }
            "t_report" => {
                t_report = value
                    .parse()
                    .map_err(|_| Error::Config(format!("bad --t-report `{value}`")))?
            }
            "out" => out = Some(PathBuf::from(value)),
            _ => unreachable!(),
        }
    }
    let outcomes = stability_matrix(n_cells, t_report)?;
    println!("smooth case, {n_cells} cells, first order in time, report time {t_report}");
    println!("flux      pairing  outcome");
    let mut lines = Vec::new();
    for o in &outcomes {
        let outcome = match &o.result {
            StabilityResult::Stable => "stable".to_string(),
            StabilityResult::Blowup { step, time } => format!("blowup(step {step}, t {time:.6})"),
        };
        println!("{:<8}  {:<7}  {outcome}", o.flux.name(), o.pairing);
        lines.push(format!("{},{},{outcome}", o.flux.name(), o.pairing));
    }
    if let Some(path) = out {
        let text = format!("flux,pairing,outcome\n{}\n", lines.join("\n"));
        std::fs::write(&path, text).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        println!("matrix written to {}", path.display());
    }
    Ok(())
}

fn cmd_cases() -> Result<()> {
    println!("name    domain        t_final  cfl  gamma  boundary      initial data");
    for case in builtin_cases() {
        let data = match case.data {
            CaseData::TwoState { left, right, x0 } => format!(
                "({}, {}, {}) | ({}, {}, {}) at x0 = {x0}",
                left.rho, left.u, left.p, right.rho, right.u, right.p
            ),
            CaseData::SmoothIsentropic => {
                "rho = 1 + 0.9 sin(2 pi x), u = 0, p = rho^gamma".to_string()
            }
        };
        println!(
            "{:<7} [{}, {}]  {:<7}  {:<3}  {:<5}  {:<12}  {data}",
            case.name,
            case.domain.0,
            case.domain.1,
            case.t_final,
            case.cfl,
            case.gamma,
            case.boundary.name(),
        );
    }
    Ok(())
}
