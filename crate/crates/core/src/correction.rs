//! Element-level conservation correction.
//!
//! The scheme updates velocity and internal energy from a non-conservative
//! form, so nothing forces computed shocks onto the correct jump relations.
//! The fix: per element and step, add one constant to the velocity residuals
//! and one to the internal-energy residuals so that density-weighted
//! residual sums equal the conservative boundary fluxes of momentum and
//! total energy. The weights are mass-normalized averages of the updated
//! density (against the kinematic basis), of the old velocity (against the
//! thermodynamic basis), and of the time-averaged momentum density; with
//! them, the per-element identities telescope into exact global
//! conservation of `∫ρu` and `∫E`.

use crate::basis;
use crate::error::{Error, Result};
use crate::residual::{FaceData, ResidualSet};
use crate::space::{ElemPoly, StaggeredField, StaggeredLayout};

/// Density-weighted averages entering the momentum identity.
#[derive(Debug, Clone)]
pub struct MomentumWeights {
    /// `∫_K ρ^{n+1} φ_σ / |C_σ|` per element, per local kinematic DOF.
    pub local: Vec<[f64; 3]>,
    /// Support-summed version per global kinematic DOF.
    pub global: Vec<f64>,
    /// `∫_K u^n φ_σ / |C_σ|` per element, per local thermodynamic DOF.
    pub velocity_avg: Vec<[f64; 3]>,
}

/// Time-averaged weights entering the energy identity.
#[derive(Debug, Clone)]
pub struct EnergyWeights {
    /// `∫_K m̃ φ_σ / |C_σ|` per element, per local kinematic DOF, with
    /// `m̃ = (ρ^{n+1} u^{n+1} + ρ^n u^n) / 2`.
    pub momentum_local: Vec<[f64; 3]>,
    /// Support-summed version per global kinematic DOF.
    pub momentum_global: Vec<f64>,
    /// `∫_K u^{n+1} u^n φ_σ / |C_σ|` per element, per local thermodynamic
    /// DOF.
    pub kinetic_avg: Vec<[f64; 3]>,
}

fn thermo_poly(layout: &StaggeredLayout, coeffs: &[f64], elem: usize) -> ElemPoly {
    let dt = layout.thermo_degree();
    let mut c = [0.0; 3];
    for (l, v) in c.iter_mut().enumerate().take(dt + 1) {
        *v = coeffs[layout.thermo_dof(elem, l)];
    }
    ElemPoly::new(c, dt)
}

fn kinematic_poly(layout: &StaggeredLayout, coeffs: &[f64], elem: usize) -> ElemPoly {
    let dv = layout.kinematic_degree();
    let mut c = [0.0; 3];
    for (l, v) in c.iter_mut().enumerate().take(dv + 1) {
        *v = coeffs[layout.velocity_dof(elem, l)];
    }
    ElemPoly::new(c, dv)
}

/// Weights for the momentum identity, from the already-updated density and
/// the start-of-step velocity.
pub fn momentum_weights(
    layout: &StaggeredLayout,
    rho_next: &[f64],
    velocity_now: &[f64],
) -> Result<MomentumWeights> {
    let n = layout.mesh().n_elements();
    let dv = layout.kinematic_degree();
    let dt = layout.thermo_degree();
    let rule = layout.rule();

    let mut local = vec![[0.0; 3]; n];
    let mut global = vec![0.0; layout.n_velocity_dofs()];
    let mut velocity_avg = vec![[0.0; 3]; n];

    for elem in 0..n {
        let h = layout.mesh().h(elem);
        let rho = thermo_poly(layout, rho_next, elem);
        let vel = kinematic_poly(layout, velocity_now, elem);
        let mut rho_int = [0.0; 3];
        let mut vel_int = [0.0; 3];
        for (x, w) in rule.iter() {
            let r = rho.eval(x);
            let u = vel.eval(x);
            let bv = basis::eval_all(dv, x);
            let bt = basis::eval_all(dt, x);
            for l in 0..=dv {
                rho_int[l] += w * r * bv[l];
            }
            for l in 0..=dt {
                vel_int[l] += w * u * bt[l];
            }
        }
        for l in 0..=dv {
            let dof = layout.velocity_dof(elem, l);
            local[elem][l] = h * rho_int[l] / layout.velocity_mass(dof);
            global[dof] += local[elem][l];
        }
        for l in 0..=dt {
            let dof = layout.thermo_dof(elem, l);
            velocity_avg[elem][l] = h * vel_int[l] / layout.thermo_mass(dof);
        }
    }

    if let Some((dof, &w)) = global
        .iter()
        .enumerate()
        .find(|(_, &w)| !(w > 0.0) || !w.is_finite())
    {
        return Err(Error::InvalidState(format!(
            "non-positive correction weight {w} at velocity DOF {dof}"
        )));
    }

    Ok(MomentumWeights {
        local,
        global,
        velocity_avg,
    })
}

/// Weights for the energy identity, from both time levels of density and
/// velocity.
pub fn energy_weights(
    layout: &StaggeredLayout,
    rho_now: &[f64],
    rho_next: &[f64],
    velocity_now: &[f64],
    velocity_next: &[f64],
) -> EnergyWeights {
    let n = layout.mesh().n_elements();
    let dv = layout.kinematic_degree();
    let dt = layout.thermo_degree();
    let rule = layout.rule();

    let mut momentum_local = vec![[0.0; 3]; n];
    let mut momentum_global = vec![0.0; layout.n_velocity_dofs()];
    let mut kinetic_avg = vec![[0.0; 3]; n];

    for elem in 0..n {
        let h = layout.mesh().h(elem);
        let rho0 = thermo_poly(layout, rho_now, elem);
        let rho1 = thermo_poly(layout, rho_next, elem);
        let u0 = kinematic_poly(layout, velocity_now, elem);
        let u1 = kinematic_poly(layout, velocity_next, elem);
        let mut m_int = [0.0; 3];
        let mut q_int = [0.0; 3];
        for (x, w) in rule.iter() {
            let m_avg = 0.5 * (rho1.eval(x) * u1.eval(x) + rho0.eval(x) * u0.eval(x));
            let q2 = u1.eval(x) * u0.eval(x);
            let bv = basis::eval_all(dv, x);
            let bt = basis::eval_all(dt, x);
            for l in 0..=dv {
                m_int[l] += w * m_avg * bv[l];
            }
            for l in 0..=dt {
                q_int[l] += w * q2 * bt[l];
            }
        }
        for l in 0..=dv {
            let dof = layout.velocity_dof(elem, l);
            momentum_local[elem][l] = h * m_int[l] / layout.velocity_mass(dof);
            momentum_global[dof] += momentum_local[elem][l];
        }
        for l in 0..=dt {
            let dof = layout.thermo_dof(elem, l);
            kinetic_avg[elem][l] = h * q_int[l] / layout.thermo_mass(dof);
        }
    }

    EnergyWeights {
        momentum_local,
        momentum_global,
        kinetic_avg,
    }
}

/// Conservative boundary-flux targets `(F^m_K, F^E_K)` of one element,
/// assembled from the single-valued interface fluxes. On a periodic domain
/// they telescope to zero.
pub fn flux_targets(faces: &[FaceData], elem: usize) -> (f64, f64) {
    (
        faces[elem + 1].flux[1] - faces[elem].flux[1],
        faces[elem + 1].flux[2] - faces[elem].flux[2],
    )
}

/// The constant `r^u` making the momentum identity of one element exact.
pub fn momentum_correction(
    layout: &StaggeredLayout,
    elem: usize,
    weights: &MomentumWeights,
    velocity_residual: &[f64; 3],
    density_residual: &[f64; 3],
    momentum_target: f64,
) -> Result<f64> {
    let dv = layout.kinematic_degree();
    let dt = layout.thermo_degree();
    let mut weight_sum = 0.0;
    let mut weighted = 0.0;
    for l in 0..=dv {
        let w = weights.global[layout.velocity_dof(elem, l)];
        weight_sum += w;
        weighted += w * velocity_residual[l];
    }
    for l in 0..=dt {
        weighted += weights.velocity_avg[elem][l] * density_residual[l];
    }
    if !(weight_sum > 0.0) {
        return Err(Error::InvalidState(format!(
            "correction weight sum {weight_sum} <= 0 in element {elem}"
        )));
    }
    Ok((momentum_target - weighted) / weight_sum)
}

/// The constant `r^e` making the energy identity of one element exact.
/// Takes the velocity residuals with `r^u` already added.
pub fn energy_correction(
    layout: &StaggeredLayout,
    elem: usize,
    weights: &EnergyWeights,
    energy_residual: &[f64; 3],
    corrected_velocity_residual: &[f64; 3],
    density_residual: &[f64; 3],
    energy_target: f64,
) -> f64 {
    let dv = layout.kinematic_degree();
    let dt = layout.thermo_degree();
    let mut balance = 0.0;
    for l in 0..=dt {
        balance += energy_residual[l];
        balance += 0.5 * weights.kinetic_avg[elem][l] * density_residual[l];
    }
    for l in 0..=dv {
        balance +=
            weights.momentum_global[layout.velocity_dof(elem, l)] * corrected_velocity_residual[l];
    }
    (energy_target - balance) / (dt + 1) as f64
}

/// Everything one completed update actually applied, kept for diagnostics.
#[derive(Debug, Clone)]
pub struct AppliedStep {
    /// Residuals as used: velocity entries include `r^u`, energy entries
    /// include `r^e`.
    pub corrected: ResidualSet,
    pub momentum_weights: MomentumWeights,
    pub energy_weights: EnergyWeights,
    pub r_u: Vec<f64>,
    pub r_e: Vec<f64>,
    pub momentum_targets: Vec<f64>,
    pub energy_targets: Vec<f64>,
}

impl AppliedStep {
    pub fn max_abs_r_u(&self) -> f64 {
        self.r_u.iter().fold(0.0f64, |m, r| m.max(r.abs()))
    }

    pub fn max_abs_r_e(&self) -> f64 {
        self.r_e.iter().fold(0.0f64, |m, r| m.max(r.abs()))
    }
}

/// Per-element residues of the identity checks.
#[derive(Debug, Clone)]
pub struct ElementIdentityRow {
    pub element: usize,
    /// Relative residue of the momentum identity.
    pub momentum_residue: f64,
    /// Relative residue of the energy identity.
    pub energy_residue: f64,
    /// Relative residue of `∫ Δ(ρu)` against its weighted DOF decomposition.
    pub momentum_decomposition: f64,
    /// Relative residue of `∫ ΔE` against its weighted DOF decomposition.
    pub energy_decomposition: f64,
}

/// Result of [`verify_master_identities`].
#[derive(Debug, Clone)]
pub struct IdentityReport {
    pub rows: Vec<ElementIdentityRow>,
    pub max_momentum_residue: f64,
    pub max_energy_residue: f64,
    pub max_momentum_decomposition: f64,
    pub max_energy_decomposition: f64,
    /// Pointwise residue of `Δ(ρu²) = (ρ¹u¹ + ρ⁰u⁰)Δu + u¹u⁰Δρ`.
    pub max_pointwise_kinetic: f64,
}

fn relative(residue: f64, scale: f64) -> f64 {
    residue / scale.max(1e-300)
}

/// Runtime check of the algebra behind the correction, after one completed
/// step from `before` to `after` with time step `dt`.
///
/// Checks, per element: the enforced momentum and energy identities; the
/// exact decomposition of `∫ Δ(ρu)` and `∫ ΔE` into weighted DOF
/// increments; and the pointwise kinetic-energy identity. All residues are
/// relative to the magnitude of the terms balanced.
pub fn verify_master_identities(
    before: &StaggeredField,
    after: &StaggeredField,
    applied: &AppliedStep,
    dt_step: f64,
) -> IdentityReport {
    let layout = before.layout().clone();
    let n = layout.mesh().n_elements();
    let dv = layout.kinematic_degree();
    let dt = layout.thermo_degree();
    let rule = layout.rule();

    let mut rows = Vec::with_capacity(n);
    let mut max_kinetic = 0.0f64;

    for elem in 0..n {
        let e = &applied.corrected.elements[elem];

        // Enforced identities.
        let mut m_lhs = 0.0;
        let mut m_scale = 0.0;
        for l in 0..=dv {
            let term = applied.momentum_weights.global[layout.velocity_dof(elem, l)]
                * e.velocity[l];
            m_lhs += term;
            m_scale += term.abs();
        }
        for l in 0..=dt {
            let term = applied.momentum_weights.velocity_avg[elem][l] * e.density[l];
            m_lhs += term;
            m_scale += term.abs();
        }
        let m_target = applied.momentum_targets[elem];
        let momentum_residue =
            relative((m_lhs - m_target).abs(), m_scale.max(m_target.abs()));

        let mut e_lhs = 0.0;
        let mut e_scale = 0.0;
        for l in 0..=dt {
            let term = e.energy[l] + 0.5 * applied.energy_weights.kinetic_avg[elem][l] * e.density[l];
            e_lhs += term;
            e_scale += term.abs();
        }
        for l in 0..=dv {
            let term = applied.energy_weights.momentum_global[layout.velocity_dof(elem, l)]
                * e.velocity[l];
            e_lhs += term;
            e_scale += term.abs();
        }
        let e_target = applied.energy_targets[elem];
        let energy_residue = relative((e_lhs - e_target).abs(), e_scale.max(e_target.abs()));

        // Decomposition of the element increments.
        let h = layout.mesh().h(elem);
        let rho0 = before.elem_density(elem);
        let rho1 = after.elem_density(elem);
        let u0 = before.elem_velocity(elem);
        let u1 = after.elem_velocity(elem);
        let en0 = before.elem_energy(elem);
        let en1 = after.elem_energy(elem);

        let momentum_increment = h * rule.integrate(|x| {
            rho1.eval(x) * u1.eval(x) - rho0.eval(x) * u0.eval(x)
        });
        let energy_increment = h * rule.integrate(|x| {
            en1.eval(x) + 0.5 * rho1.eval(x) * u1.eval(x) * u1.eval(x)
                - en0.eval(x)
                - 0.5 * rho0.eval(x) * u0.eval(x) * u0.eval(x)
        });

        let mut m_decomp = 0.0;
        let mut m_dscale = momentum_increment.abs();
        let mut e_decomp = 0.0;
        let mut e_dscale = energy_increment.abs();
        for l in 0..=dv {
            let dof = layout.velocity_dof(elem, l);
            let du = after.velocity[dof] - before.velocity[dof];
            let mass = layout.velocity_mass(dof);
            let t1 = applied.momentum_weights.local[elem][l] * mass * du;
            m_decomp += t1;
            m_dscale = m_dscale.max(t1.abs());
            let t2 = applied.energy_weights.momentum_local[elem][l] * mass * du;
            e_decomp += t2;
            e_dscale = e_dscale.max(t2.abs());
        }
        for l in 0..=dt {
            let dof = layout.thermo_dof(elem, l);
            let drho = after.density[dof] - before.density[dof];
            let de = after.energy[dof] - before.energy[dof];
            let mass = layout.thermo_mass(dof);
            let t1 = applied.momentum_weights.velocity_avg[elem][l] * mass * drho;
            m_decomp += t1;
            m_dscale = m_dscale.max(t1.abs());
            let t2 =
                mass * de + 0.5 * applied.energy_weights.kinetic_avg[elem][l] * mass * drho;
            e_decomp += t2;
            e_dscale = e_dscale.max(t2.abs());
        }
        let momentum_decomposition =
            relative((momentum_increment - m_decomp).abs(), m_dscale);
        let energy_decomposition = relative((energy_increment - e_decomp).abs(), e_dscale);

        // Pointwise kinetic identity at a few reference points.
        for x in [0.0, 0.31, 0.5, 0.79, 1.0] {
            let (r0, r1) = (rho0.eval(x), rho1.eval(x));
            let (v0, v1) = (u0.eval(x), u1.eval(x));
            let lhs = r1 * v1 * v1 - r0 * v0 * v0;
            let rhs = (r1 * v1 + r0 * v0) * (v1 - v0) + v1 * v0 * (r1 - r0);
            let scale = (r1 * v1 * v1).abs().max((r0 * v0 * v0).abs()).max(1e-300);
            max_kinetic = max_kinetic.max((lhs - rhs).abs() / scale);
        }

        rows.push(ElementIdentityRow {
            element: elem,
            momentum_residue,
            energy_residue,
            momentum_decomposition,
            energy_decomposition,
        });
    }

    let fold = |f: fn(&ElementIdentityRow) -> f64| {
        rows.iter().map(f).fold(0.0f64, f64::max)
    };
    let _ = dt_step;
    IdentityReport {
        max_momentum_residue: fold(|r| r.momentum_residue),
        max_energy_residue: fold(|r| r.energy_residue),
        max_momentum_decomposition: fold(|r| r.momentum_decomposition),
        max_energy_decomposition: fold(|r| r.energy_decomposition),
        max_pointwise_kinetic: max_kinetic,
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{BoundaryKind, Mesh1d};
    use crate::state::{GasModel, PrimitiveState};
    use std::sync::Arc;

    fn uniform_layout(n: usize, r: usize, boundary: BoundaryKind) -> Arc<StaggeredLayout> {
        let mesh = Mesh1d::uniform(0.0, 1.0, n, boundary).unwrap();
        StaggeredLayout::new(mesh, r).unwrap()
    }

    #[test]
    fn uniform_density_weights() {
        // ρ ≡ 1, r = 0: per-element weight is (h/2)/|C|; interior nodes
        // shared by two elements sum to exactly 1.
        let layout = uniform_layout(4, 0, BoundaryKind::Transmissive);
        let field = StaggeredField::project_two_state(
            layout.clone(),
            &GasModel::air(),
            &PrimitiveState::new(1.0, 0.0, 1.0),
            &PrimitiveState::new(1.0, 0.0, 1.0),
            -1.0,
        )
        .unwrap();
        let w = momentum_weights(&layout, &field.density, &field.velocity).unwrap();
        for g in &w.global {
            assert!((g - 1.0).abs() < 1e-14);
        }
        let h = 0.25;
        // Boundary node: |C| = h/2, single element.
        assert!((w.local[0][0] - (h / 2.0) / layout.velocity_mass(0)).abs() < 1e-14);
        assert!((w.local[0][0] - 1.0).abs() < 1e-14);
        // Interior node: |C| = h, each element contributes 1/2.
        assert!((w.local[0][1] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn uniform_velocity_weights() {
        // u ≡ c gives ω^u = c for every thermodynamic DOF.
        let gas = GasModel::air();
        let c = 0.37;
        for r in [0usize, 1] {
            let layout = uniform_layout(5, r, BoundaryKind::Periodic);
            let field = StaggeredField::project_two_state(
                layout.clone(),
                &gas,
                &PrimitiveState::new(2.0, c, 1.0),
                &PrimitiveState::new(2.0, c, 1.0),
                -1.0,
            )
            .unwrap();
            let w = momentum_weights(&layout, &field.density, &field.velocity).unwrap();
            for elem in 0..5 {
                for l in 0..=r {
                    assert!((w.velocity_avg[elem][l] - c).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn energy_weights_of_steady_uniform_field() {
        // ρ^{n+1} = ρ^n = ρ, u^{n+1} = u^n = c: θ^m aggregates to ρc and
        // θ^{q²} = c².
        let gas = GasModel::air();
        let (rho, c) = (1.7, 0.83);
        let layout = uniform_layout(6, 1, BoundaryKind::Periodic);
        let field = StaggeredField::project_two_state(
            layout.clone(),
            &gas,
            &PrimitiveState::new(rho, c, 1.0),
            &PrimitiveState::new(rho, c, 1.0),
            -1.0,
        )
        .unwrap();
        let w = energy_weights(
            &layout,
            &field.density,
            &field.density,
            &field.velocity,
            &field.velocity,
        );
        for g in &w.momentum_global {
            assert!((g - rho * c).abs() < 1e-13);
        }
        for elem in 0..6 {
            for l in 0..=1 {
                assert!((w.kinetic_avg[elem][l] - c * c).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn negative_density_weight_rejected() {
        let layout = uniform_layout(3, 0, BoundaryKind::Transmissive);
        let gas = GasModel::air();
        let mut field = StaggeredField::project_two_state(
            layout.clone(),
            &gas,
            &PrimitiveState::new(1.0, 0.0, 1.0),
            &PrimitiveState::new(1.0, 0.0, 1.0),
            -1.0,
        )
        .unwrap();
        field.density[1] = -2.0;
        assert!(momentum_weights(&layout, &field.density, &field.velocity).is_err());
    }

    #[test]
    fn corrections_vanish_when_identities_already_hold() {
        // Uniform state: residuals zero, targets zero.
        let layout = uniform_layout(4, 1, BoundaryKind::Periodic);
        let gas = GasModel::air();
        let field = StaggeredField::project_two_state(
            layout.clone(),
            &gas,
            &PrimitiveState::new(1.0, 0.5, 1.0),
            &PrimitiveState::new(1.0, 0.5, 1.0),
            -1.0,
        )
        .unwrap();
        let w = momentum_weights(&layout, &field.density, &field.velocity).unwrap();
        let zero = [0.0; 3];
        let r_u = momentum_correction(&layout, 2, &w, &zero, &zero, 0.0).unwrap();
        assert_eq!(r_u, 0.0);

        let ew = energy_weights(
            &layout,
            &field.density,
            &field.density,
            &field.velocity,
            &field.velocity,
        );
        let r_e = energy_correction(&layout, 2, &ew, &zero, &zero, &zero, 0.0);
        assert_eq!(r_e, 0.0);
    }

    #[test]
    fn identities_enforced_on_arbitrary_residuals() {
        // Arbitrary residuals and targets: after adding r^u and r^e the
        // weighted sums equal the targets to rounding.
        let layout = uniform_layout(5, 1, BoundaryKind::Periodic);
        let gas = GasModel::air();
        let field = StaggeredField::project_profiles(
            layout.clone(),
            &gas,
            |x| 1.0 + 0.4 * (2.0 * std::f64::consts::PI * x).sin(),
            |x| 0.3 * (2.0 * std::f64::consts::PI * x).cos(),
            |x| 1.0 + 0.2 * (4.0 * std::f64::consts::PI * x).sin(),
        )
        .unwrap();
        let mut shifted = field.clone();
        for v in shifted.velocity.iter_mut() {
            *v += 0.05;
        }
        for v in shifted.density.iter_mut() {
            *v *= 1.02;
        }
        let w = momentum_weights(&layout, &shifted.density, &field.velocity).unwrap();

        let elem = 3;
        let psi = [0.21, -0.83, 0.49];
        let phi_rho = [0.65, -0.17, 0.0];
        let target = 0.77;
        let r_u = momentum_correction(&layout, elem, &w, &psi, &phi_rho, target).unwrap();

        let mut lhs = 0.0;
        for l in 0..=2 {
            lhs += w.global[layout.velocity_dof(elem, l)] * (psi[l] + r_u);
        }
        for l in 0..=1 {
            lhs += w.velocity_avg[elem][l] * phi_rho[l];
        }
        assert!(
            (lhs - target).abs() < 1e-12 * target.abs().max(1.0),
            "momentum identity residue {}",
            lhs - target
        );

        let ew = energy_weights(
            &layout,
            &field.density,
            &shifted.density,
            &field.velocity,
            &shifted.velocity,
        );
        let phi_e = [0.42, 0.11, 0.0];
        let psi_corrected = [psi[0] + r_u, psi[1] + r_u, psi[2] + r_u];
        let e_target = -0.35;
        let r_e = energy_correction(
            &layout,
            elem,
            &ew,
            &phi_e,
            &psi_corrected,
            &phi_rho,
            e_target,
        );
        let mut lhs = 0.0;
        for l in 0..=1 {
            lhs += phi_e[l] + r_e + 0.5 * ew.kinetic_avg[elem][l] * phi_rho[l];
        }
        for l in 0..=2 {
            lhs += ew.momentum_global[layout.velocity_dof(elem, l)] * psi_corrected[l];
        }
        assert!(
            (lhs - e_target).abs() < 1e-12 * e_target.abs().max(1.0),
            "energy identity residue {}",
            lhs - e_target
        );
    }

    #[test]
    fn pointwise_kinetic_identity_is_exact_algebra() {
        // Δ(ρu²) = (ρ¹u¹ + ρ⁰u⁰)Δu + u¹u⁰Δρ on arbitrary scalars.
        let samples = [
            (1.0, 0.5, 1.3, -0.2),
            (0.3, 2.0, 0.31, 1.9),
            (5.0, -3.0, 4.0, -2.5),
        ];
        for (r0, v0, r1, v1) in samples {
            let lhs: f64 = r1 * v1 * v1 - r0 * v0 * v0;
            let rhs = (r1 * v1 + r0 * v0) * (v1 - v0) + v1 * v0 * (r1 - r0);
            assert!((lhs - rhs).abs() <= 1e-14 * lhs.abs().max(1.0));
        }
    }

    #[test]
    fn targets_telescope_on_periodic_domains() {
        let faces: Vec<FaceData> = (0..=6)
            .map(|i| FaceData {
                flux: [0.1 * i as f64, (i * i) as f64 * 0.03 - 0.4, 1.0 - 0.2 * i as f64],
                p_star: 1.0,
            })
            .collect();
        let mut faces = faces;
        // Periodic: last face equals the first.
        faces[6] = faces[0];
        let mut m_total = 0.0;
        let mut e_total = 0.0;
        for elem in 0..6 {
            let (fm, fe) = flux_targets(&faces, elem);
            m_total += fm;
            e_total += fe;
        }
        assert!(m_total.abs() < 1e-15);
        assert!(e_total.abs() < 1e-15);
    }
}
