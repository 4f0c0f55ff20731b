//! CFL time-step control, the ordered forward-Euler update (density first,
//! then velocity with its correction, then internal energy with its
//! correction), and the second-order deferred-correction wrapper built from
//! half-sum residuals.

use crate::correction::{
    energy_correction, energy_weights, flux_targets, momentum_correction, momentum_weights,
    AppliedStep,
};
use crate::error::{Error, Result};
use crate::residual::{assemble, ResidualSet, SchemeOptions};
use crate::space::StaggeredField;
use crate::state::GasModel;

/// Explicit time integrator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeScheme {
    Euler,
    /// Two deferred-correction passes; second order in time.
    Dec2,
}

impl TimeScheme {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "euler" => Ok(Self::Euler),
            "dec2" => Ok(Self::Dec2),
            other => Err(Error::Config(format!(
                "scheme must be euler|dec2, got `{other}`"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Euler => "euler",
            Self::Dec2 => "dec2",
        }
    }
}

/// Everything a step needs besides the state and the step size.
#[derive(Debug, Clone, Copy)]
pub struct StepOptions {
    pub gas: GasModel,
    pub scheme: SchemeOptions,
    pub time_scheme: TimeScheme,
    /// Apply the element conservation corrections `r^u`, `r^e`.
    pub correction: bool,
    /// Rejected steps are retried with the step size halved this many times.
    pub max_halvings: usize,
}

impl StepOptions {
    pub fn new(gas: GasModel) -> Self {
        Self {
            gas,
            scheme: SchemeOptions::default(),
            time_scheme: TimeScheme::Euler,
            correction: true,
            max_halvings: 5,
        }
    }
}

/// CFL step size `cfl · min_K (h_K / α_K)`, clipped to the remaining time.
///
/// `dt_max` caps the step when the wave bound degenerates to zero.
pub fn compute_dt(
    state: &StaggeredField,
    gas: &GasModel,
    cfl: f64,
    remaining: f64,
    dt_max: f64,
) -> Result<f64> {
    if !(cfl > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "CFL number must be positive, got {cfl}"
        )));
    }
    let ratio = crate::residual::max_wave_speed_ratio(state, gas)?;
    let dt = if ratio > 0.0 { cfl / ratio } else { dt_max };
    Ok(dt.min(remaining).min(dt_max))
}

fn ensure_positive_thermo(coeffs: &[f64], what: &str) -> Result<()> {
    for (dof, &v) in coeffs.iter().enumerate() {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidState(format!(
                "{what} coefficient {v} at DOF {dof} after update"
            )));
        }
    }
    Ok(())
}

/// One ordered update of all three fields from `base` using the residual
/// set `rset` (which may be a half-sum of two evaluations).
pub fn apply_residuals(
    base: &StaggeredField,
    rset: &ResidualSet,
    correction: bool,
    dt: f64,
) -> Result<(StaggeredField, AppliedStep)> {
    let layout = base.layout().clone();
    let n = layout.mesh().n_elements();
    let dv = layout.kinematic_degree();
    let deg_t = layout.thermo_degree();

    let mut next = base.clone();
    let mut corrected = rset.clone();

    // Phase 1: density.
    for e in &rset.elements {
        for l in 0..=deg_t {
            let dof = layout.thermo_dof(e.element, l);
            next.density[dof] =
                base.density[dof] - dt / layout.thermo_mass(dof) * e.density[l];
        }
    }
    ensure_positive_thermo(&next.density, "density")?;

    // Phase 2: velocity, with the momentum correction computed against the
    // updated density.
    let mw = momentum_weights(&layout, &next.density, &base.velocity)?;
    let mut momentum_targets = vec![0.0; n];
    let mut energy_targets = vec![0.0; n];
    let mut r_u = vec![0.0; n];
    for elem in 0..n {
        let (fm, fe) = flux_targets(&rset.faces, elem);
        momentum_targets[elem] = fm;
        energy_targets[elem] = fe;
        if correction {
            let r = momentum_correction(
                &layout,
                elem,
                &mw,
                &rset.elements[elem].velocity,
                &rset.elements[elem].density,
                fm,
            )?;
            r_u[elem] = r;
            for l in 0..=dv {
                corrected.elements[elem].velocity[l] += r;
            }
        }
    }
    let mut accumulated = vec![0.0; layout.n_velocity_dofs()];
    for e in &corrected.elements {
        for l in 0..=dv {
            accumulated[layout.velocity_dof(e.element, l)] += e.velocity[l];
        }
    }
    for (dof, acc) in accumulated.iter().enumerate() {
        next.velocity[dof] = base.velocity[dof] - dt / layout.velocity_mass(dof) * acc;
        if !next.velocity[dof].is_finite() {
            return Err(Error::InvalidState(format!(
                "velocity non-finite at DOF {dof} after update"
            )));
        }
    }

    // Phase 3: internal energy, with the energy correction computed against
    // both time levels.
    let ew = energy_weights(
        &layout,
        &base.density,
        &next.density,
        &base.velocity,
        &next.velocity,
    );
    let mut r_e = vec![0.0; n];
    for elem in 0..n {
        if correction {
            let r = energy_correction(
                &layout,
                elem,
                &ew,
                &rset.elements[elem].energy,
                &corrected.elements[elem].velocity,
                &rset.elements[elem].density,
                energy_targets[elem],
            );
            r_e[elem] = r;
            for l in 0..=deg_t {
                corrected.elements[elem].energy[l] += r;
            }
        }
        for l in 0..=deg_t {
            let dof = layout.thermo_dof(elem, l);
            next.energy[dof] =
                base.energy[dof] - dt / layout.thermo_mass(dof) * corrected.elements[elem].energy[l];
        }
    }
    ensure_positive_thermo(&next.energy, "internal energy")?;

    Ok((
        next,
        AppliedStep {
            corrected,
            momentum_weights: mw,
            energy_weights: ew,
            r_u,
            r_e,
            momentum_targets,
            energy_targets,
        },
    ))
}

/// One forward-Euler step.
pub fn euler_step(
    base: &StaggeredField,
    opts: &StepOptions,
    dt: f64,
) -> Result<(StaggeredField, AppliedStep)> {
    let rset = assemble(base, &opts.gas, &opts.scheme, None)?;
    apply_residuals(base, &rset, opts.correction, dt)
}

/// One second-order deferred-correction step: an Euler prediction followed
/// by a correction pass driven by the half-sum of the residuals at the old
/// state and at the prediction. The conservation targets use the same
/// half-sum convention, so each pass satisfies the element identities and
/// the final pass carries them to the step.
pub fn dec2_step(
    base: &StaggeredField,
    opts: &StepOptions,
    dt: f64,
) -> Result<(StaggeredField, AppliedStep)> {
    let base_set = assemble(base, &opts.gas, &opts.scheme, None)?;
    let (prediction, _) = apply_residuals(base, &base_set, opts.correction, dt)?;
    let stage_set = assemble(&prediction, &opts.gas, &opts.scheme, Some(base))?;
    let half = ResidualSet::half_sum(&base_set, &stage_set);
    apply_residuals(base, &half, opts.correction, dt)
}

/// Dispatch on the configured time scheme.
pub fn step(
    base: &StaggeredField,
    opts: &StepOptions,
    dt: f64,
) -> Result<(StaggeredField, AppliedStep)> {
    match opts.time_scheme {
        TimeScheme::Euler => euler_step(base, opts, dt),
        TimeScheme::Dec2 => dec2_step(base, opts, dt),
    }
}

/// Outcome of one accepted step.
#[derive(Debug)]
pub struct StepResult {
    pub state: StaggeredField,
    pub dt: f64,
    pub halvings: usize,
    pub applied: AppliedStep,
}

/// One step with rejection handling: positivity or state failures halve the
/// step size up to `max_halvings` times before aborting.
pub fn advance(
    base: &StaggeredField,
    opts: &StepOptions,
    dt_initial: f64,
    step_index: usize,
    time: f64,
) -> Result<StepResult> {
    let mut dt = dt_initial;
    let mut last_error = String::new();
    for attempt in 0..=opts.max_halvings {
        match step(base, opts, dt) {
            Ok((state, applied)) => {
                return Ok(StepResult {
                    state,
                    dt,
                    halvings: attempt,
                    applied,
                })
            }
            Err(err) => {
                last_error = err.to_string();
                dt *= 0.5;
            }
        }
    }
    Err(Error::PositivityAbort {
        step: step_index,
        time,
        detail: last_error,
    })
}
