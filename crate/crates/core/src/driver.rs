//! Benchmark drivers: single runs, the convergence study, and the
//! flux/degree stability matrix.

use std::path::Path;

use crate::config::RunConfig;
use crate::correction::verify_master_identities;
use crate::diagnostics::{
    sample_profile, write_correction_report, write_profile, write_series, ConservationLedger,
    WeakBvReport,
};
use crate::error::{Error, Result};
use crate::mesh::Mesh1d;
use crate::reference::{l1_error, L1Errors, ReferenceSampler};
use crate::riemann::{FluxChoice, Wave};
use crate::space::{StaggeredField, StaggeredLayout};
use crate::stepper::{advance, compute_dt};

/// Everything a completed run reports.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub case: String,
    pub pairing: String,
    pub n_cells: usize,
    pub flux: FluxChoice,
    pub cfl: f64,
    pub t_final: f64,
    pub steps: usize,
    pub total_halvings: usize,
    pub l1: Option<L1Errors>,
    /// Detected position of the rightmost captured discontinuity.
    pub shock_position: Option<f64>,
    pub shock_position_exact: Option<f64>,
    /// `|detected - exact|` as a fraction of the domain length.
    pub shock_position_error: Option<f64>,
    pub mass_drift: f64,
    pub momentum_drift: f64,
    pub energy_drift: f64,
    pub weak_bv: WeakBvReport,
    pub max_r_u: f64,
    pub max_r_e: f64,
    /// Largest identity residues over the run; populated when auditing.
    pub max_identity_momentum: Option<f64>,
    pub max_identity_energy: Option<f64>,
}

/// A completed run: final state plus its summary and ledger.
pub struct RunOutput {
    pub state: StaggeredField,
    pub summary: RunSummary,
    pub ledger: ConservationLedger,
}

const MAX_STEPS: usize = 5_000_000;

/// Run one configuration to its final time; write CSV outputs when an
/// output directory is configured.
pub fn run_case(config: &RunConfig) -> Result<RunOutput> {
    let case = config.resolve_case()?;
    let gas = case.gas();
    let mesh = Mesh1d::uniform(case.domain.0, case.domain.1, config.n_cells, case.boundary)?;
    let layout = StaggeredLayout::with_degrees(
        mesh,
        config.kinematic_degree(),
        config.thermo_degree,
    )?;
    let mut state = case.initial_field(layout)?;
    let opts = config.step_options(gas);
    let cfl = config.cfl.unwrap_or(case.cfl);
    let t_final = config.t_final.unwrap_or(case.t_final);
    let growth_limit = config.growth_limit * (state.max_abs() + 1.0);

    let mut ledger = ConservationLedger::new(&state);
    let mut t = 0.0;
    let mut steps = 0;
    let mut total_halvings = 0;
    let mut max_identity_momentum = 0.0f64;
    let mut max_identity_energy = 0.0f64;
    let mut last_applied = None;
    let mut last_report = None;

    while t < t_final * (1.0 - 1e-14) {
        if steps >= MAX_STEPS {
            return Err(Error::InvalidArgument(format!(
                "step budget {MAX_STEPS} exhausted at t = {t}"
            )));
        }
        let dt = compute_dt(&state, &gas, cfl, t_final - t, f64::INFINITY)?;
        let result = advance(&state, &opts, dt, steps, t)?;
        ledger.accumulate_weak_bv(&state, result.dt);

        if config.audit {
            let report = verify_master_identities(&state, &result.state, &result.applied, result.dt);
            max_identity_momentum = max_identity_momentum.max(report.max_momentum_residue);
            max_identity_energy = max_identity_energy.max(report.max_energy_residue);
            last_report = Some(report);
        }

        t += result.dt;
        steps += 1;
        total_halvings += result.halvings;
        ledger.record(steps, t, &result.state, &result.applied);
        state = result.state;

        if !state.all_finite() || state.max_abs() > growth_limit {
            return Err(Error::Blowup { step: steps, time: t });
        }
        last_applied = Some(result.applied);
    }

    // Reference comparison.
    let sampler = case.reference_sampler()?;
    let l1 = match &sampler {
        Some(s) => Some(l1_error(&state, &gas, s, t, 1000)?),
        None => None,
    };
    let (shock_position, shock_position_exact, shock_position_error) =
        shock_position_report(&state, &gas, &sampler, t)?;

    let summary = RunSummary {
        case: case.name.clone(),
        pairing: config.pairing_name(),
        n_cells: config.n_cells,
        flux: config.flux,
        cfl,
        t_final: t,
        steps,
        total_halvings,
        l1,
        shock_position,
        shock_position_exact,
        shock_position_error,
        mass_drift: ledger.max_abs_mass_drift(),
        momentum_drift: ledger.max_abs_momentum_drift(),
        energy_drift: ledger.max_abs_energy_drift(),
        weak_bv: ledger.weak_bv,
        max_r_u: ledger.rows.iter().map(|r| r.max_r_u).fold(0.0, f64::max),
        max_r_e: ledger.rows.iter().map(|r| r.max_r_e).fold(0.0, f64::max),
        max_identity_momentum: config.audit.then_some(max_identity_momentum),
        max_identity_energy: config.audit.then_some(max_identity_energy),
    };

    if let Some(dir) = &config.out_dir {
        let stem = format!("{}_{}", case.name, config.pairing_name().to_lowercase());
        write_profile(&state, &gas, &dir.join(format!("{stem}_profile.csv")), 1000)?;
        write_series(&ledger, &dir.join(format!("{stem}_series.csv")))?;
        write_summary(&summary, &dir.join(format!("{stem}_summary.csv")))?;
        if let (Some(applied), Some(report)) = (&last_applied, &last_report) {
            write_correction_report(
                &dir.join(format!("{stem}_correction.csv")),
                steps,
                applied,
                report,
            )?;
        }
    }

    Ok(RunOutput {
        state,
        summary,
        ledger,
    })
}

/// Rightmost-discontinuity detection: the position where the density
/// profile crosses the midpoint between the exact post- and pre-shock
/// values, scanned from the right.
fn shock_position_report(
    state: &StaggeredField,
    gas: &crate::state::GasModel,
    sampler: &Option<ReferenceSampler>,
    t: f64,
) -> Result<(Option<f64>, Option<f64>, Option<f64>)> {
    let reference = match sampler {
        Some(ReferenceSampler::Riemann(r)) => r,
        _ => return Ok((None, None, None)),
    };
    let (right_speed, post_shock_rho) = match reference.solution.right_wave {
        Wave::Shock { speed } => (speed, reference.solution.rho_star_right),
        _ => return Ok((None, None, None)),
    };
    let exact_position = reference.x0 + right_speed * t;
    let pre_shock_rho = reference.solution.right.rho;
    let mid = 0.5 * (post_shock_rho + pre_shock_rho);

    let profile = sample_profile(state, gas, 1000)?;
    let mut detected = None;
    for window in profile.windows(2).rev() {
        let (x0, rho0) = (window[0].0, window[0].1);
        let (x1, rho1) = (window[1].0, window[1].1);
        if (rho0 - mid) * (rho1 - mid) <= 0.0 && rho0 != rho1 {
            detected = Some(x0 + (mid - rho0) / (rho1 - rho0) * (x1 - x0));
            break;
        }
    }
    let (a, b) = state.layout().mesh().domain();
    let error = detected.map(|x| (x - exact_position).abs() / (b - a));
    Ok((detected, Some(exact_position), error))
}

/// Steep-gradient locations of a sampled profile: density differences above
/// `threshold_ratio` times the maximum are clustered and each cluster
/// reports its |Δρ|-weighted centroid.
pub fn detect_discontinuities(profile: &[(f64, f64)], threshold_ratio: f64) -> Vec<f64> {
    let diffs: Vec<(f64, f64)> = profile
        .windows(2)
        .map(|w| (0.5 * (w[0].0 + w[1].0), (w[1].1 - w[0].1).abs()))
        .collect();
    let max_diff = diffs.iter().map(|d| d.1).fold(0.0f64, f64::max);
    if max_diff == 0.0 {
        return Vec::new();
    }
    let threshold = threshold_ratio * max_diff;
    let mut clusters = Vec::new();
    let mut weight = 0.0;
    let mut centroid = 0.0;
    for &(x, d) in &diffs {
        if d > threshold {
            weight += d;
            centroid += d * x;
        } else if weight > 0.0 {
            clusters.push(centroid / weight);
            weight = 0.0;
            centroid = 0.0;
        }
    }
    if weight > 0.0 {
        clusters.push(centroid / weight);
    }
    clusters
}

/// One row of a convergence table.
#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub n_cells: usize,
    pub errors: L1Errors,
    pub order_rho: Option<f64>,
    pub order_u: Option<f64>,
    pub order_p: Option<f64>,
}

/// L¹ errors and observed orders over a list of mesh sizes.
pub fn convergence_study(config: &RunConfig, meshes: &[usize]) -> Result<Vec<ConvergenceRow>> {
    if meshes.is_empty() {
        return Err(Error::InvalidArgument("mesh list is empty".into()));
    }
    let case = config.resolve_case()?;
    if case.reference_sampler()?.is_none() {
        return Err(Error::Config(format!(
            "case `{}` has no exact reference for a convergence study",
            case.name
        )));
    }
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(meshes.len());
    for &n in meshes {
        let mut run_config = config.clone();
        run_config.n_cells = n;
        run_config.out_dir = None;
        let output = run_case(&run_config)?;
        let errors = output.summary.l1.expect("reference checked above");
        let order = |prev: &ConvergenceRow, e_prev: f64, e_cur: f64| -> Option<f64> {
            let ratio = n as f64 / prev.n_cells as f64;
            (e_prev > 0.0 && e_cur > 0.0).then(|| (e_prev / e_cur).ln() / ratio.ln())
        };
        let (order_rho, order_u, order_p) = match rows.last() {
            Some(prev) => (
                order(prev, prev.errors.rho, errors.rho),
                order(prev, prev.errors.u, errors.u),
                order(prev, prev.errors.p, errors.p),
            ),
            None => (None, None, None),
        };
        rows.push(ConvergenceRow {
            n_cells: n,
            errors,
            order_rho,
            order_u,
            order_p,
        });
    }
    Ok(rows)
}

/// Outcome of one stability-matrix run.
#[derive(Debug, Clone)]
pub enum StabilityResult {
    Stable,
    Blowup { step: usize, time: f64 },
}

#[derive(Debug, Clone)]
pub struct StabilityOutcome {
    pub flux: FluxChoice,
    pub pairing: String,
    pub result: StabilityResult,
}

/// The flux/degree experiment on the smooth case: first order in time, no
/// redistribution, fail-fast (any rejection counts as a blow-up).
pub fn stability_matrix(n_cells: usize, t_report: f64) -> Result<Vec<StabilityOutcome>> {
    let mut outcomes = Vec::new();
    for flux in [FluxChoice::Centered, FluxChoice::Exact, FluxChoice::Hllc] {
        for (r, equal) in [(0usize, false), (1, true), (1, false)] {
            let mut config = RunConfig {
                case: "smooth".into(),
                n_cells,
                thermo_degree: r,
                equal_degree: equal,
                flux,
                t_final: Some(t_report),
                max_halvings: 0,
                ..RunConfig::default()
            };
            config.audit = false;
            let pairing = config.pairing_name();
            let result = match run_case(&config) {
                Ok(_) => StabilityResult::Stable,
                Err(Error::Blowup { step, time }) => StabilityResult::Blowup { step, time },
                Err(Error::PositivityAbort { step, time, .. }) => {
                    StabilityResult::Blowup { step, time }
                }
                Err(other) => return Err(other),
            };
            outcomes.push(StabilityOutcome {
                flux,
                pairing,
                result,
            });
        }
    }
    Ok(outcomes)
}

/// Write a run summary as `key,value` rows.
pub fn write_summary(summary: &RunSummary, path: &Path) -> Result<()> {
    use std::io::Write;
    let mut out = Vec::new();
    let mut push = |k: &str, v: String| {
        out.push(format!("{k},{v}"));
    };
    push("case", summary.case.clone());
    push("pairing", summary.pairing.clone());
    push("n_cells", summary.n_cells.to_string());
    push("flux", summary.flux.name().to_string());
    push("cfl", summary.cfl.to_string());
    push("t_final", summary.t_final.to_string());
    push("steps", summary.steps.to_string());
    push("halvings", summary.total_halvings.to_string());
    if let Some(l1) = &summary.l1 {
        push("l1_rho", l1.rho.to_string());
        push("l1_u", l1.u.to_string());
        push("l1_p", l1.p.to_string());
    }
    if let (Some(x), Some(exact), Some(err)) = (
        summary.shock_position,
        summary.shock_position_exact,
        summary.shock_position_error,
    ) {
        push("shock_position", x.to_string());
        push("shock_position_exact", exact.to_string());
        push("shock_position_error", err.to_string());
    }
    push("mass_drift", summary.mass_drift.to_string());
    push("momentum_drift", summary.momentum_drift.to_string());
    push("energy_drift", summary.energy_drift.to_string());
    push("weak_bv_rho", summary.weak_bv.rho.to_string());
    push("weak_bv_u", summary.weak_bv.u.to_string());
    push("weak_bv_e", summary.weak_bv.e.to_string());
    push("max_ru", summary.max_r_u.to_string());
    push("max_re", summary.max_r_e.to_string());
    if let Some(v) = summary.max_identity_momentum {
        push("max_identity_momentum", v.to_string());
    }
    if let Some(v) = summary.max_identity_energy {
        push("max_identity_energy", v.to_string());
    }

    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|source| Error::Io {
                path: path.display().to_string(),
                source,
            })?;
        }
    }
    let mut file = std::fs::File::create(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    for line in out {
        writeln!(file, "{line}").map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
    }
    Ok(())
}

/// Write a convergence table as CSV.
pub fn write_convergence(rows: &[ConvergenceRow], path: &Path) -> Result<()> {
    use std::io::Write;
    let mut file = std::fs::File::create(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let fmt = |o: Option<f64>| o.map(|v| v.to_string()).unwrap_or_default();
    writeln!(file, "n_cells,l1_rho,l1_u,l1_p,order_rho,order_u,order_p").map_err(|source| {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    })?;
    for row in rows {
        writeln!(
            file,
            "{},{},{},{},{},{},{}",
            row.n_cells,
            row.errors.rho,
            row.errors.u,
            row.errors.p,
            fmt(row.order_rho),
            fmt(row.order_u),
            fmt(row.order_p)
        )
        .map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_sod_run_completes_and_writes_files() {
        let dir = tempfile::tempdir().unwrap();
        let config = RunConfig {
            n_cells: 50,
            t_final: Some(0.02),
            out_dir: Some(dir.path().to_path_buf()),
            audit: true,
            ..RunConfig::default()
        };
        let output = run_case(&config).unwrap();
        assert!(output.summary.steps > 0);
        assert!(output.summary.l1.is_some());
        assert!(output.summary.max_identity_momentum.unwrap() < 1e-12);
        assert!(output.summary.max_identity_energy.unwrap() < 1e-12);
        for suffix in ["profile", "series", "summary", "correction"] {
            let path = dir.path().join(format!("sod_k1t0_{suffix}.csv"));
            assert!(path.exists(), "missing {suffix}");
        }
    }

    #[test]
    fn detect_discontinuities_finds_steps() {
        let mut profile = Vec::new();
        for i in 0..200 {
            let x = i as f64 / 200.0;
            let rho = if x < 0.3 {
                2.0
            } else if x < 0.7 {
                1.2
            } else {
                0.4
            };
            profile.push((x, rho));
        }
        let found = detect_discontinuities(&profile, 0.2);
        assert_eq!(found.len(), 2);
        assert!((found[0] - 0.3).abs() < 0.01);
        assert!((found[1] - 0.7).abs() < 0.01);
    }

    #[test]
    fn convergence_on_projection_noise_only() {
        // One mesh only: no orders, but sane errors.
        let config = RunConfig {
            case: "smooth".into(),
            thermo_degree: 1,
            time_scheme: crate::stepper::TimeScheme::Dec2,
            t_final: Some(0.005),
            ..RunConfig::default()
        };
        let rows = convergence_study(&config, &[32]).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].order_rho.is_none());
        assert!(rows[0].errors.rho < 0.1);
    }
}
