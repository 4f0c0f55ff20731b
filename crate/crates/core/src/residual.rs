//! Per-element residuals of the staggered scheme.
//!
//! Density uses the discontinuous-Galerkin form with a numerical interface
//! flux; velocity uses the centered residual divided by the element-average
//! density, stabilized either by a local Lax-Friedrichs term or by a jump
//! penalty on the velocity gradient; internal energy uses a plain quadrature
//! of its transport form. Two redistribution procedures rearrange residuals
//! within an element without changing element totals.

use crate::basis::{self, QuadratureRule};
use crate::error::{Error, Result};
use crate::mesh::BoundaryKind;
use crate::riemann::{interface_flux, FluxChoice};
use crate::space::{ElemPoly, StaggeredField};
use crate::state::{GasModel, PrimitiveState};

/// Stabilization added to the centered velocity residual.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stabilization {
    /// Local Lax-Friedrichs dissipation; first order.
    Llf,
    /// Gradient-jump penalty at interior faces; keeps the formal order.
    Jump,
}

impl Stabilization {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "llf" => Ok(Self::Llf),
            "jump" => Ok(Self::Jump),
            other => Err(Error::Config(format!(
                "stabilization must be llf|jump, got `{other}`"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Llf => "llf",
            Self::Jump => "jump",
        }
    }
}

/// Nonlinear residual redistribution within each element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Blending {
    None,
    /// Redistribute the velocity residual only.
    Procedure1,
    /// Add Lax-Friedrichs terms to the thermodynamic residuals, then
    /// redistribute density, velocity and energy.
    Procedure2,
}

impl Blending {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Self::None),
            "proc1" => Ok(Self::Procedure1),
            "proc2" => Ok(Self::Procedure2),
            other => Err(Error::Config(format!(
                "blending must be none|proc1|proc2, got `{other}`"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Procedure1 => "proc1",
            Self::Procedure2 => "proc2",
        }
    }
}

/// Spatial-scheme options.
#[derive(Debug, Clone, Copy)]
pub struct SchemeOptions {
    pub flux: FluxChoice,
    pub stabilization: Stabilization,
    pub blending: Blending,
    /// θ_K of the jump penalty.
    pub jump_parameter: f64,
}

impl Default for SchemeOptions {
    fn default() -> Self {
        Self {
            flux: FluxChoice::Hllc,
            stabilization: Stabilization::Jump,
            blending: Blending::None,
            jump_parameter: 0.1,
        }
    }
}

/// Numerical flux and star pressure at one face, single-valued for the two
/// adjacent elements.
#[derive(Debug, Clone, Copy)]
pub struct FaceData {
    pub flux: [f64; 3],
    pub p_star: f64,
}

/// Residual contributions of one element, one entry per local DOF.
#[derive(Debug, Clone)]
pub struct ElementResiduals {
    pub element: usize,
    /// Φ^ρ per thermodynamic DOF, after stabilization and blending.
    pub density: [f64; 3],
    /// Ψ^u per kinematic DOF, after stabilization and blending, before the
    /// conservation correction.
    pub velocity: [f64; 3],
    /// Φ^e per thermodynamic DOF, after stabilization and blending.
    pub energy: [f64; 3],
    /// Wave-speed bound α_K used for dissipation and the CFL condition.
    pub alpha: f64,
}

impl ElementResiduals {
    pub fn density_total(&self, n_thermo_local: usize) -> f64 {
        self.density[..n_thermo_local].iter().sum()
    }

    pub fn velocity_total(&self, n_kin_local: usize) -> f64 {
        self.velocity[..n_kin_local].iter().sum()
    }

    pub fn energy_total(&self, n_thermo_local: usize) -> f64 {
        self.energy[..n_thermo_local].iter().sum()
    }
}

/// One evaluation of the spatial operator: all element residual sets plus
/// the face data they were built from.
#[derive(Debug, Clone)]
pub struct ResidualSet {
    pub elements: Vec<ElementResiduals>,
    /// `n + 1` faces; under periodic boundaries the last entry equals the
    /// first.
    pub faces: Vec<FaceData>,
}

impl ResidualSet {
    /// Entry-wise average of two evaluations; used by the second-order
    /// deferred-correction pass.
    pub fn half_sum(a: &ResidualSet, b: &ResidualSet) -> ResidualSet {
        let avg3 = |p: &[f64; 3], q: &[f64; 3]| {
            [
                0.5 * (p[0] + q[0]),
                0.5 * (p[1] + q[1]),
                0.5 * (p[2] + q[2]),
            ]
        };
        let elements = a
            .elements
            .iter()
            .zip(&b.elements)
            .map(|(x, y)| ElementResiduals {
                element: x.element,
                density: avg3(&x.density, &y.density),
                velocity: avg3(&x.velocity, &y.velocity),
                energy: avg3(&x.energy, &y.energy),
                alpha: x.alpha.max(y.alpha),
            })
            .collect();
        let faces = a
            .faces
            .iter()
            .zip(&b.faces)
            .map(|(x, y)| FaceData {
                flux: avg3(&x.flux, &y.flux),
                p_star: 0.5 * (x.p_star + y.p_star),
            })
            .collect();
        ResidualSet { elements, faces }
    }

    /// `max_K α_K / h_K`, the quantity limiting the time step.
    pub fn max_speed_over_h(&self, state: &StaggeredField) -> f64 {
        let mesh = state.layout().mesh();
        self.elements
            .iter()
            .map(|e| e.alpha / mesh.h(e.element))
            .fold(0.0, f64::max)
    }
}

/// Primitive trace state of one element at one of its ends.
fn trace_state(state: &StaggeredField, gas: &GasModel, elem: usize, end: usize) -> PrimitiveState {
    let rho = state.elem_density(elem);
    let en = state.elem_energy(elem);
    let vel = state.elem_velocity(elem);
    let (r, e, u) = if end == 0 {
        (rho.left(), en.left(), vel.left())
    } else {
        (rho.right(), en.right(), vel.right())
    };
    PrimitiveState::new(r, u, gas.pressure_from_volumetric(e))
}

/// Trace pairs at every face, with ghost states from the boundary kind.
pub fn face_states(
    state: &StaggeredField,
    gas: &GasModel,
) -> Vec<(PrimitiveState, PrimitiveState)> {
    let layout = state.layout();
    let n = layout.mesh().n_elements();
    let periodic = layout.mesh().boundary() == BoundaryKind::Periodic;
    let mut faces = Vec::with_capacity(n + 1);
    for face in 0..=n {
        let left = if face == 0 {
            if periodic {
                trace_state(state, gas, n - 1, 1)
            } else {
                trace_state(state, gas, 0, 0)
            }
        } else {
            trace_state(state, gas, face - 1, 1)
        };
        let right = if face == n {
            if periodic {
                trace_state(state, gas, 0, 0)
            } else {
                trace_state(state, gas, n - 1, 1)
            }
        } else {
            trace_state(state, gas, face, 0)
        };
        faces.push((left, right));
    }
    faces
}

/// dG density residual of one element.
///
/// `face_flux = [f̂_left, f̂_right]` are the mass components of the
/// numerical fluxes at the two faces. The per-DOF entries sum to
/// `f̂_right - f̂_left`.
pub fn density_residual(
    rho: &ElemPoly,
    vel: &ElemPoly,
    face_flux: [f64; 2],
    rule: &QuadratureRule,
) -> [f64; 3] {
    let dt = rho.degree();
    let mut res = [0.0; 3];
    for (x, w) in rule.iter() {
        let mass_flux = rho.eval(x) * vel.eval(x);
        let db = basis::deriv_all(dt, x);
        for (r, d) in res.iter_mut().zip(db.iter()).take(dt + 1) {
            *r -= w * d * mass_flux;
        }
    }
    // Bernstein endpoint values are 1 for the end DOF, 0 elsewhere.
    res[dt] += face_flux[1];
    res[0] -= face_flux[0];
    res
}

/// Centered velocity residual divided by the element-average density.
///
/// `p_star = [p*_left, p*_right]` come from the Riemann solver (or the
/// centered average).
pub fn velocity_residual_centered(
    rho: &ElemPoly,
    vel: &ElemPoly,
    energy: &ElemPoly,
    gas: &GasModel,
    p_star: [f64; 2],
    rule: &QuadratureRule,
) -> Result<[f64; 3]> {
    let rho_avg = rho.mean();
    if rho_avg <= 0.0 {
        return Err(Error::InvalidState(format!(
            "element-average density {rho_avg} <= 0"
        )));
    }
    let dv = vel.degree();
    let mut res = [0.0; 3];
    for (x, w) in rule.iter() {
        let advect = rho.eval(x) * vel.eval(x) * vel.deriv_ref(x);
        let p = gas.pressure_from_volumetric(energy.eval(x));
        let b = basis::eval_all(dv, x);
        let db = basis::deriv_all(dv, x);
        for l in 0..=dv {
            res[l] += w * (b[l] * advect - p * db[l]);
        }
    }
    res[dv] += p_star[1];
    res[0] -= p_star[0];
    for r in res.iter_mut() {
        *r /= rho_avg;
    }
    Ok(res)
}

/// Internal-energy residual `∫ φ (u ∂e/∂x + (e + p) ∂u/∂x)`.
pub fn energy_residual(
    vel: &ElemPoly,
    energy: &ElemPoly,
    gas: &GasModel,
    rule: &QuadratureRule,
) -> [f64; 3] {
    let dt = energy.degree();
    let mut res = [0.0; 3];
    for (x, w) in rule.iter() {
        let e = energy.eval(x);
        let p = gas.pressure_from_volumetric(e);
        let transport = vel.eval(x) * energy.deriv_ref(x) + (e + p) * vel.deriv_ref(x);
        let b = basis::eval_all(dt, x);
        for (r, phi) in res.iter_mut().zip(b.iter()).take(dt + 1) {
            *r += w * phi * transport;
        }
    }
    res
}

/// Local Lax-Friedrichs dissipation `α (v_σ - v̄)` over the DOF values of
/// one element. The entries sum to zero.
pub fn llf_dissipation(values: &[f64], alpha: f64) -> [f64; 3] {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let mut out = [0.0; 3];
    for (o, v) in out.iter_mut().zip(values) {
        *o = alpha * (v - mean);
    }
    out
}

/// Jump of the physical velocity derivative across a face.
pub fn face_derivative_jump(left: &ElemPoly, h_left: f64, right: &ElemPoly, h_right: f64) -> f64 {
    right.deriv_ref(0.0) / h_right - left.deriv_ref(1.0) / h_left
}

/// Gradient-jump penalty at one interior face: per-DOF contributions to the
/// two adjacent elements.
///
/// Each global DOF whose basis function touches the face receives
/// `θ β h² · [∂φ_σ/∂x] · [∂u/∂x]`, a point evaluation in 1D, exactly once;
/// the shared face node's contribution is split evenly between the two
/// element residual sets, which only affects bookkeeping, not the assembled
/// update. Summed over both elements the contributions cancel because the
/// basis-derivative jumps form a partition of unity. Counted this way the
/// assembled form is `θ β h² [∂u/∂x]²`-dissipative.
pub fn jump_stabilization(
    vel_left: &ElemPoly,
    h_left: f64,
    vel_right: &ElemPoly,
    h_right: f64,
    theta: f64,
    beta: f64,
) -> ([f64; 3], [f64; 3]) {
    let dv = vel_left.degree();
    let du_jump = face_derivative_jump(vel_left, h_left, vel_right, h_right);
    let h_face = 0.5 * (h_left + h_right);
    let pre = theta * beta * h_face * h_face * du_jump;
    let db_at_1 = basis::deriv_all(dv, 1.0);
    let db_at_0 = basis::deriv_all(dv, 0.0);

    let mut left_contrib = [0.0; 3];
    let mut right_contrib = [0.0; 3];
    // DOFs owned solely by the left element.
    for l in 0..dv {
        left_contrib[l] = pre * (-db_at_1[l] / h_left);
    }
    // DOFs owned solely by the right element.
    for l in 1..=dv {
        right_contrib[l] = pre * (db_at_0[l] / h_right);
    }
    // The face node is local `dv` on the left and local `0` on the right.
    let phi_jump_shared = db_at_0[0] / h_right - db_at_1[dv] / h_left;
    left_contrib[dv] = 0.5 * pre * phi_jump_shared;
    right_contrib[0] = 0.5 * pre * phi_jump_shared;
    (left_contrib, right_contrib)
}

/// Redistribution map of Procedure 1 applied to one scalar residual group.
///
/// Preserves the total; clips negative fractions. A zero total zeroes every
/// entry. The all-clipped degenerate case cannot occur in exact arithmetic
/// (the positive fractions sum to at least one); if rounding ever produces
/// it the total is split equally.
pub fn redistribute_limit(res: &mut [f64]) {
    let total: f64 = res.iter().sum();
    if total == 0.0 {
        res.iter_mut().for_each(|r| *r = 0.0);
        return;
    }
    let mut fractions = [0.0; 3];
    let mut sum = 0.0;
    for (f, r) in fractions.iter_mut().zip(res.iter()) {
        *f = (r / total).max(0.0);
        sum += *f;
    }
    if sum <= 0.0 {
        let equal = total / res.len() as f64;
        res.iter_mut().for_each(|r| *r = equal);
        return;
    }
    for (r, f) in res.iter_mut().zip(fractions.iter()) {
        *r = f / sum * total;
    }
}

/// Wave-speed bound over the element: samples at the quadrature points and
/// both endpoints.
fn element_wave_bound(
    rho: &ElemPoly,
    vel: &ElemPoly,
    energy: &ElemPoly,
    gas: &GasModel,
    rule: &QuadratureRule,
) -> Result<f64> {
    let mut bound = 0.0f64;
    let mut visit = |x: f64| -> Result<()> {
        let r = rho.eval(x);
        let p = gas.pressure_from_volumetric(energy.eval(x));
        let c = gas.sound_speed(r, p)?;
        bound = bound.max(vel.eval(x).abs() + c);
        Ok(())
    };
    visit(0.0)?;
    visit(1.0)?;
    for &x in rule.points() {
        visit(x)?;
    }
    Ok(bound)
}

/// `max_K α_K / h_K` of a state, for the CFL condition, without assembling
/// residuals.
pub fn max_wave_speed_ratio(state: &StaggeredField, gas: &GasModel) -> Result<f64> {
    let layout = state.layout();
    let rule = layout.rule();
    let mut ratio = 0.0f64;
    for elem in 0..layout.mesh().n_elements() {
        let alpha = element_wave_bound(
            &state.elem_density(elem),
            &state.elem_velocity(elem),
            &state.elem_energy(elem),
            gas,
            rule,
        )?;
        ratio = ratio.max(alpha / layout.mesh().h(elem));
    }
    Ok(ratio)
}

/// Assemble the full spatial operator at `state`.
///
/// `rho_star_source` supplies the density used for the `ρ*_K` division of
/// the centered velocity residual; deferred-correction passes keep it at the
/// start-of-step state.
pub fn assemble(
    state: &StaggeredField,
    gas: &GasModel,
    opts: &SchemeOptions,
    rho_star_source: Option<&StaggeredField>,
) -> Result<ResidualSet> {
    let layout = state.layout().clone();
    let mesh = layout.mesh();
    let n = mesh.n_elements();
    let rule = layout.rule();
    let periodic = mesh.boundary() == BoundaryKind::Periodic;

    // Face pass: single-valued numerical fluxes and star pressures.
    let traces = face_states(state, gas);
    let mut faces = Vec::with_capacity(n + 1);
    for (left, right) in &traces {
        let sol = interface_flux(left, right, gas, opts.flux)?;
        faces.push(FaceData {
            flux: sol.flux,
            p_star: sol.p_star,
        });
    }
    if periodic {
        faces[n] = faces[0];
    }

    // Element pass.
    let mut elements = Vec::with_capacity(n);
    for elem in 0..n {
        let rho = state.elem_density(elem);
        let vel = state.elem_velocity(elem);
        let en = state.elem_energy(elem);
        let alpha = element_wave_bound(&rho, &vel, &en, gas, rule)?;

        let density = density_residual(
            &rho,
            &vel,
            [faces[elem].flux[0], faces[elem + 1].flux[0]],
            rule,
        );
        let rho_for_star = match rho_star_source {
            Some(src) => src.elem_density(elem),
            None => rho,
        };
        let mut velocity = velocity_residual_centered(
            &rho_for_star,
            &vel,
            &en,
            gas,
            [faces[elem].p_star, faces[elem + 1].p_star],
            rule,
        )?;
        let energy = energy_residual(&vel, &en, gas, rule);

        if opts.stabilization == Stabilization::Llf {
            let dv = layout.kinematic_degree();
            let mut values = [0.0; 3];
            for (l, v) in values.iter_mut().enumerate().take(dv + 1) {
                *v = state.velocity[layout.velocity_dof(elem, l)];
            }
            let diss = llf_dissipation(&values[..=dv], alpha);
            for l in 0..=dv {
                velocity[l] += diss[l];
            }
        }

        elements.push(ElementResiduals {
            element: elem,
            density,
            velocity,
            energy,
            alpha,
        });
    }

    // Interior-face jump pass; β_K = α_K.
    if opts.stabilization == Stabilization::Jump {
        let mut interior: Vec<(usize, usize)> = (1..n).map(|f| (f - 1, f)).collect();
        if periodic {
            interior.push((n - 1, 0));
        }
        for (le, re) in interior {
            let beta = elements[le].alpha.max(elements[re].alpha);
            let (lc, rc) = jump_stabilization(
                &state.elem_velocity(le),
                mesh.h(le),
                &state.elem_velocity(re),
                mesh.h(re),
                opts.jump_parameter,
                beta,
            );
            for l in 0..3 {
                elements[le].velocity[l] += lc[l];
                elements[re].velocity[l] += rc[l];
            }
        }
    }

    // Redistribution.
    match opts.blending {
        Blending::None => {}
        Blending::Procedure1 => {
            let dv = layout.kinematic_degree();
            for e in elements.iter_mut() {
                redistribute_limit(&mut e.velocity[..=dv]);
            }
        }
        Blending::Procedure2 => {
            let dv = layout.kinematic_degree();
            let dt = layout.thermo_degree();
            for e in elements.iter_mut() {
                let elem = e.element;
                let mut rho_vals = [0.0; 3];
                let mut en_vals = [0.0; 3];
                for l in 0..=dt {
                    rho_vals[l] = state.density[layout.thermo_dof(elem, l)];
                    en_vals[l] = state.energy[layout.thermo_dof(elem, l)];
                }
                let rho_diss = llf_dissipation(&rho_vals[..=dt], e.alpha);
                let en_diss = llf_dissipation(&en_vals[..=dt], e.alpha);
                for l in 0..=dt {
                    e.density[l] += rho_diss[l];
                    e.energy[l] += en_diss[l];
                }
                redistribute_limit(&mut e.velocity[..=dv]);
                redistribute_limit(&mut e.density[..=dt]);
                redistribute_limit(&mut e.energy[..=dt]);
            }
        }
    }

    Ok(ResidualSet { elements, faces })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Mesh1d;
    use crate::space::StaggeredLayout;

    fn uniform_field(
        n: usize,
        r: usize,
        boundary: BoundaryKind,
        prim: PrimitiveState,
    ) -> StaggeredField {
        let gas = GasModel::air();
        let mesh = Mesh1d::uniform(0.0, 1.0, n, boundary).unwrap();
        let layout = StaggeredLayout::new(mesh, r).unwrap();
        StaggeredField::project_two_state(layout, &gas, &prim, &prim, -1.0).unwrap()
    }

    #[test]
    fn uniform_state_has_zero_residuals() {
        let gas = GasModel::air();
        let prim = PrimitiveState::new(1.3, 0.7, 2.1);
        for r in [0usize, 1] {
            for stab in [Stabilization::Llf, Stabilization::Jump] {
                for blending in [Blending::None, Blending::Procedure1, Blending::Procedure2] {
                    let field = uniform_field(8, r, BoundaryKind::Periodic, prim);
                    let opts = SchemeOptions {
                        flux: FluxChoice::Hllc,
                        stabilization: stab,
                        blending,
                        jump_parameter: 0.1,
                    };
                    let set = assemble(&field, &gas, &opts, None).unwrap();
                    for e in &set.elements {
                        for k in 0..3 {
                            assert!(e.density[k].abs() < 1e-13, "rho r={r}");
                            assert!(e.velocity[k].abs() < 1e-13, "u r={r} {stab:?}");
                            assert!(e.energy[k].abs() < 1e-13, "e r={r}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn piecewise_constant_density_residual_is_flux_difference() {
        let rho = ElemPoly::new([2.0, 0.0, 0.0], 0);
        let vel = ElemPoly::new([1.0, 1.0, 0.0], 1);
        let rule = basis::element_rule(1);
        let res = density_residual(&rho, &vel, [0.3, 0.8], &rule);
        assert!((res[0] - 0.5).abs() < 1e-15);
        assert_eq!(res[1], 0.0);
    }

    #[test]
    fn density_residual_totals_telescope() {
        let rho = ElemPoly::new([1.0, 2.0, 0.0], 1);
        let vel = ElemPoly::new([0.5, -0.2, 0.9], 2);
        let rule = basis::element_rule(2);
        let res = density_residual(&rho, &vel, [0.11, 0.37], &rule);
        let total: f64 = res.iter().sum();
        assert!((total - (0.37 - 0.11)).abs() < 1e-14);
    }

    #[test]
    fn velocity_residual_zero_on_stationary_contact() {
        let gas = GasModel::air();
        // u = 0, p constant, rho jumps: every term vanishes or cancels.
        let rho = ElemPoly::new([1.0, 1.0, 0.0], 1);
        let vel = ElemPoly::new([0.0, 0.0, 0.0], 2);
        let en = ElemPoly::new([2.5, 2.5, 0.0], 1);
        let p = gas.pressure_from_volumetric(2.5);
        let rule = basis::element_rule(2);
        let res = velocity_residual_centered(&rho, &vel, &en, &gas, [p, p], &rule).unwrap();
        for l in 0..3 {
            assert!(res[l].abs() < 1e-15);
        }
    }

    #[test]
    fn velocity_residual_rejects_vanishing_density() {
        let gas = GasModel::air();
        let rho = ElemPoly::new([1.0, -1.0, 0.0], 1);
        let vel = ElemPoly::new([0.0, 0.0, 0.0], 2);
        let en = ElemPoly::new([1.0, 1.0, 0.0], 1);
        let rule = basis::element_rule(2);
        assert!(velocity_residual_centered(&rho, &vel, &en, &gas, [1.0, 1.0], &rule).is_err());
    }

    #[test]
    fn energy_residual_of_linear_velocity() {
        // u = x, e and p constant on [0,1]: the transport term reduces to
        // (e + p) ∫ φ, i.e. (e + p) · lumped mass.
        let gas = GasModel::air();
        let e_vol = 1.5;
        let p = gas.pressure_from_volumetric(e_vol);
        let vel = ElemPoly::new([0.0, 0.5, 1.0], 2);
        let en = ElemPoly::new([e_vol, e_vol, 0.0], 1);
        let rule = basis::element_rule(2);
        let res = energy_residual(&vel, &en, &gas, &rule);
        for l in 0..2 {
            assert!((res[l] - (e_vol + p) * 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn llf_values_and_zero_sum() {
        let d = llf_dissipation(&[0.0, 1.0], 2.0);
        assert_eq!(d[0], -1.0);
        assert_eq!(d[1], 1.0);

        let d = llf_dissipation(&[0.3, -0.8, 0.9], 1.7);
        assert!((d[0] + d[1] + d[2]).abs() < 1e-15);

        let d = llf_dissipation(&[0.5, 0.5, 0.5], 3.0);
        assert_eq!(d, [0.0, 0.0, 0.0]);
    }

    #[test]
    fn jump_term_vanishes_for_globally_linear_velocity() {
        // Same slope on both sides of the face.
        let left = ElemPoly::new([0.0, 1.0, 0.0], 1);
        let right = ElemPoly::new([1.0, 2.0, 0.0], 1);
        let (lc, rc) = jump_stabilization(&left, 0.1, &right, 0.1, 0.1, 1.0);
        for l in 0..3 {
            assert_eq!(lc[l], 0.0);
            assert_eq!(rc[l], 0.0);
        }
    }

    #[test]
    fn jump_term_formula() {
        // Slopes 0 and 1 across a face between h = 0.1 elements, θ = 0.1,
        // β = 1: each DOF receives 0.001 · [∂φ_σ/∂x].
        let h = 0.1;
        let left = ElemPoly::new([1.0, 1.0, 0.0], 1);
        let right = ElemPoly::new([1.0, 1.0 + h, 0.0], 1);
        let (lc, rc) = jump_stabilization(&left, h, &right, h, 0.1, 1.0);
        // Left element, far DOF: basis derivative -1/h from the left, absent
        // on the right: jump +1/h.
        assert!((lc[0] - 0.001 * (1.0 / h)).abs() < 1e-15);
        // Shared node: +1/h from the left, -1/h from the right: jump -2/h,
        // split between the two element sets.
        assert!((lc[1] + rc[0] - 0.001 * (-2.0 / h)).abs() < 1e-15);
        assert_eq!(lc[1], rc[0]);
        // Right element, far DOF: jump +1/h.
        assert!((rc[1] - 0.001 * (1.0 / h)).abs() < 1e-15);
    }

    #[test]
    fn jump_contributions_cancel_over_the_two_elements() {
        // Σ_σ [∂φ_σ/∂x] = 0 at a face, so the assembled contributions over
        // both sharing elements sum to zero.
        let left = ElemPoly::new([0.3, -0.4, 1.1], 2);
        let right = ElemPoly::new([1.1, 0.2, -0.7], 2);
        let (lc, rc) = jump_stabilization(&left, 0.2, &right, 0.25, 0.1, 1.3);
        let total: f64 = lc.iter().chain(rc.iter()).sum();
        assert!(total.abs() < 1e-14, "total = {total}");
    }

    #[test]
    fn redistribution_cases() {
        // Same sign: unchanged.
        let mut r = [0.25, 0.75, 0.0];
        redistribute_limit(&mut r[..2]);
        assert!((r[0] - 0.25).abs() < 1e-15 && (r[1] - 0.75).abs() < 1e-15);

        // Mixed signs: negative part clipped, total preserved.
        let mut r = [2.0, -1.0, 0.0];
        redistribute_limit(&mut r[..2]);
        assert!((r[0] - 1.0).abs() < 1e-15);
        assert_eq!(r[1], 0.0);

        // Zero total: all zero.
        let mut r = [1.0, -1.0, 0.0];
        redistribute_limit(&mut r[..2]);
        assert_eq!(&r[..2], &[0.0, 0.0]);

        // Totals preserved on generic data.
        let mut r = [0.3, -1.7, 2.9];
        let before: f64 = r.iter().sum();
        redistribute_limit(&mut r);
        let after: f64 = r.iter().sum();
        assert!((before - after).abs() < 1e-13 * before.abs());
    }

    #[test]
    fn llf_with_zero_alpha_is_inactive() {
        let d = llf_dissipation(&[1.0, 3.0], 0.0);
        assert_eq!(d, [0.0, 0.0, 0.0]);
    }

    #[test]
    fn conservation_constraint_after_blending() {
        // Per-element totals before and after blending agree per variable.
        let gas = GasModel::air();
        let mesh = Mesh1d::uniform(0.0, 1.0, 6, BoundaryKind::Periodic).unwrap();
        let layout = StaggeredLayout::new(mesh, 1).unwrap();
        let field = StaggeredField::project_profiles(
            layout.clone(),
            &gas,
            |x| 1.0 + 0.3 * (2.0 * std::f64::consts::PI * x).sin(),
            |x| 0.2 * (2.0 * std::f64::consts::PI * x).cos(),
            |x| 1.0 + 0.1 * (2.0 * std::f64::consts::PI * x).sin(),
        )
        .unwrap();
        let base = SchemeOptions {
            blending: Blending::None,
            ..SchemeOptions::default()
        };
        let blended = SchemeOptions {
            blending: Blending::Procedure2,
            ..base
        };
        let raw = assemble(&field, &gas, &base, None).unwrap();
        let lim = assemble(&field, &gas, &blended, None).unwrap();
        let dv = layout.kinematic_degree();
        let dt = layout.thermo_degree();
        for (a, b) in raw.elements.iter().zip(&lim.elements) {
            // The LLF additions inside procedure 2 sum to zero, so totals
            // must match the unblended ones.
            let scale = a.velocity_total(dv + 1).abs().max(1e-3);
            assert!(
                (a.velocity_total(dv + 1) - b.velocity_total(dv + 1)).abs() < 1e-12 * scale,
                "velocity total"
            );
            let scale = a.density_total(dt + 1).abs().max(1e-3);
            assert!((a.density_total(dt + 1) - b.density_total(dt + 1)).abs() < 1e-12 * scale);
            let scale = a.energy_total(dt + 1).abs().max(1e-3);
            assert!((a.energy_total(dt + 1) - b.energy_total(dt + 1)).abs() < 1e-12 * scale);
        }
    }
}
