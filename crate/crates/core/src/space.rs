//! Staggered function-space pair and its degrees of freedom.
//!
//! The velocity lives in a globally continuous space of degree `r + 1`; the
//! density and internal energy live in a per-element discontinuous space of
//! degree `r`. Both are expanded in Bézier coefficients; endpoint
//! coefficients equal endpoint values, which is what makes the continuous
//! velocity assembly a plain index identification.

use std::sync::Arc;

use crate::basis::{self, QuadratureRule};
use crate::error::{Error, Result};
use crate::mesh::{BoundaryKind, Mesh1d};
use crate::state::GasModel;

/// One-sided limit selector for evaluation at element boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Which discrete field to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldVar {
    Density,
    Velocity,
    /// Internal energy per unit volume.
    Energy,
}

/// Restriction of a field to one element: up to three Bézier coefficients.
#[derive(Debug, Clone, Copy)]
pub struct ElemPoly {
    coeffs: [f64; 3],
    degree: usize,
}

impl ElemPoly {
    pub fn new(coeffs: [f64; 3], degree: usize) -> Self {
        Self { coeffs, degree }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeff(&self, local: usize) -> f64 {
        self.coeffs[local]
    }

    pub fn eval(&self, lambda: f64) -> f64 {
        let b = basis::eval_all(self.degree, lambda);
        (0..=self.degree).map(|i| self.coeffs[i] * b[i]).sum()
    }

    /// Derivative with respect to the reference coordinate λ.
    pub fn deriv_ref(&self, lambda: f64) -> f64 {
        let d = basis::deriv_all(self.degree, lambda);
        (0..=self.degree).map(|i| self.coeffs[i] * d[i]).sum()
    }

    /// Integral mean over the element. Bernstein basis functions of one
    /// degree share the same integral, so this is the coefficient mean.
    pub fn mean(&self) -> f64 {
        self.coeffs[..=self.degree].iter().sum::<f64>() / (self.degree + 1) as f64
    }

    /// Value at the left element boundary.
    pub fn left(&self) -> f64 {
        self.coeffs[0]
    }

    /// Value at the right element boundary.
    pub fn right(&self) -> f64 {
        self.coeffs[self.degree]
    }
}

/// DOF layout of the `K(r+1)T(r)` pair on a mesh (or the equal-degree pair
/// used by the stability experiment).
#[derive(Debug)]
pub struct StaggeredLayout {
    mesh: Mesh1d,
    kinematic_degree: usize,
    thermo_degree: usize,
    n_velocity: usize,
    n_thermo: usize,
    velocity_mass: Vec<f64>,
    thermo_mass: Vec<f64>,
    rule: QuadratureRule,
}

impl StaggeredLayout {
    /// Standard pairing: velocity degree `r + 1`, thermodynamics degree `r`.
    pub fn new(mesh: Mesh1d, thermo_degree: usize) -> Result<Arc<Self>> {
        if thermo_degree > 1 {
            return Err(Error::InvalidArgument(format!(
                "thermodynamic degree must be 0 or 1, got {thermo_degree}"
            )));
        }
        Self::with_degrees(mesh, thermo_degree + 1, thermo_degree)
    }

    /// Explicit degree pair. Equal degrees are only intended for the
    /// stability experiment; the standard pairing keeps the velocity one
    /// degree higher.
    pub fn with_degrees(
        mesh: Mesh1d,
        kinematic_degree: usize,
        thermo_degree: usize,
    ) -> Result<Arc<Self>> {
        if !(1..=2).contains(&kinematic_degree) || thermo_degree > 1 {
            return Err(Error::InvalidArgument(format!(
                "unsupported degree pair K{kinematic_degree}T{thermo_degree}"
            )));
        }
        if thermo_degree > kinematic_degree {
            return Err(Error::InvalidArgument(
                "thermodynamic degree cannot exceed the kinematic degree".into(),
            ));
        }
        let n = mesh.n_elements();
        let periodic = mesh.boundary() == BoundaryKind::Periodic;
        let n_velocity = if periodic {
            n * kinematic_degree
        } else {
            n * kinematic_degree + 1
        };
        let n_thermo = n * (thermo_degree + 1);

        let mut layout = Self {
            rule: basis::element_rule(kinematic_degree),
            mesh,
            kinematic_degree,
            thermo_degree,
            n_velocity,
            n_thermo,
            velocity_mass: vec![0.0; n_velocity],
            thermo_mass: vec![0.0; n_thermo],
        };
        for elem in 0..n {
            let h = layout.mesh.h(elem);
            for local in 0..=kinematic_degree {
                let dof = layout.velocity_dof(elem, local);
                layout.velocity_mass[dof] += h / (kinematic_degree + 1) as f64;
            }
            for local in 0..=thermo_degree {
                let dof = layout.thermo_dof(elem, local);
                layout.thermo_mass[dof] += h / (thermo_degree + 1) as f64;
            }
        }
        Ok(Arc::new(layout))
    }

    pub fn mesh(&self) -> &Mesh1d {
        &self.mesh
    }

    pub fn kinematic_degree(&self) -> usize {
        self.kinematic_degree
    }

    pub fn thermo_degree(&self) -> usize {
        self.thermo_degree
    }

    pub fn n_velocity_dofs(&self) -> usize {
        self.n_velocity
    }

    pub fn n_thermo_dofs(&self) -> usize {
        self.n_thermo
    }

    /// Quadrature rule exact for every element integrand of this pairing.
    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    /// Global index of a velocity DOF. Element endpoints are shared, which
    /// is what enforces continuity.
    pub fn velocity_dof(&self, elem: usize, local: usize) -> usize {
        (elem * self.kinematic_degree + local) % self.n_velocity
    }

    pub fn thermo_dof(&self, elem: usize, local: usize) -> usize {
        elem * (self.thermo_degree + 1) + local
    }

    /// Elements sharing a velocity DOF (one or two).
    pub fn elements_sharing_velocity_dof(&self, dof: usize) -> Vec<usize> {
        let dv = self.kinematic_degree;
        let n = self.mesh.n_elements();
        let periodic = self.mesh.boundary() == BoundaryKind::Periodic;
        let mut elems = Vec::with_capacity(2);
        if dof % dv == 0 {
            // Node DOF: right element, then left element if it exists.
            let node = dof / dv;
            if node < n {
                elems.push(node);
            }
            if node > 0 {
                elems.push(node - 1);
            } else if periodic {
                elems.push(n - 1);
            }
            if node == n && !periodic {
                elems.push(n - 1);
            }
        } else {
            elems.push(dof / dv);
        }
        elems.sort_unstable();
        elems.dedup();
        elems
    }

    /// Lumped mass `|C_σ|` of a velocity DOF, accumulated over sharing
    /// elements.
    pub fn velocity_mass(&self, dof: usize) -> f64 {
        self.velocity_mass[dof]
    }

    pub fn thermo_mass(&self, dof: usize) -> f64 {
        self.thermo_mass[dof]
    }

    pub fn is_periodic(&self) -> bool {
        self.mesh.boundary() == BoundaryKind::Periodic
    }

    /// Lagrange interpolation points of a degree-`d` space on `[a, b]`
    /// (midpoint for degree 0, equispaced otherwise).
    fn interpolation_points(a: f64, b: f64, degree: usize) -> Vec<f64> {
        if degree == 0 {
            vec![0.5 * (a + b)]
        } else {
            (0..=degree)
                .map(|i| a + (b - a) * i as f64 / degree as f64)
                .collect()
        }
    }

    /// Bézier coefficients interpolating the given point values at the
    /// points of `interpolation_points`.
    fn bezier_from_values(values: &[f64]) -> [f64; 3] {
        match values.len() {
            1 => [values[0], 0.0, 0.0],
            2 => [values[0], values[1], 0.0],
            3 => [
                values[0],
                // Midpoint value is (b0 + 2 b1 + b2) / 4.
                (4.0 * values[1] - values[0] - values[2]) / 2.0,
                values[2],
            ],
            _ => unreachable!("degree capped at 2"),
        }
    }
}

/// Coefficient sets of one discrete solution on a staggered layout.
#[derive(Debug, Clone)]
pub struct StaggeredField {
    layout: Arc<StaggeredLayout>,
    pub velocity: Vec<f64>,
    pub density: Vec<f64>,
    /// Internal energy per unit volume.
    pub energy: Vec<f64>,
}

impl StaggeredField {
    pub fn zeros(layout: Arc<StaggeredLayout>) -> Self {
        Self {
            velocity: vec![0.0; layout.n_velocity_dofs()],
            density: vec![0.0; layout.n_thermo_dofs()],
            energy: vec![0.0; layout.n_thermo_dofs()],
            layout,
        }
    }

    pub fn layout(&self) -> &Arc<StaggeredLayout> {
        &self.layout
    }

    pub fn elem_velocity(&self, elem: usize) -> ElemPoly {
        let dv = self.layout.kinematic_degree();
        let mut coeffs = [0.0; 3];
        for (local, c) in coeffs.iter_mut().enumerate().take(dv + 1) {
            *c = self.velocity[self.layout.velocity_dof(elem, local)];
        }
        ElemPoly::new(coeffs, dv)
    }

    pub fn elem_density(&self, elem: usize) -> ElemPoly {
        self.elem_thermo(&self.density, elem)
    }

    pub fn elem_energy(&self, elem: usize) -> ElemPoly {
        self.elem_thermo(&self.energy, elem)
    }

    fn elem_thermo(&self, coeffs: &[f64], elem: usize) -> ElemPoly {
        let dt = self.layout.thermo_degree();
        let mut c = [0.0; 3];
        for (local, v) in c.iter_mut().enumerate().take(dt + 1) {
            *v = coeffs[self.layout.thermo_dof(elem, local)];
        }
        ElemPoly::new(c, dt)
    }

    /// Point evaluation with a one-sided limit at element boundaries.
    pub fn eval(&self, var: FieldVar, x: f64, side: Side) -> Result<f64> {
        let mesh = self.layout.mesh();
        let mut elem = mesh.locate(x)?;
        let (mut a, mut b) = mesh.element_bounds(elem);
        // A node evaluated from the left belongs to the element before it.
        if side == Side::Left && x == a {
            if elem > 0 {
                elem -= 1;
            } else if self.layout.is_periodic() {
                elem = mesh.n_elements() - 1;
            }
            let bounds = mesh.element_bounds(elem);
            a = bounds.0;
            b = bounds.1;
        }
        let lambda = if x == a {
            0.0
        } else if x >= b {
            1.0
        } else {
            (x - a) / (b - a)
        };
        let poly = match var {
            FieldVar::Density => self.elem_density(elem),
            FieldVar::Velocity => self.elem_velocity(elem),
            FieldVar::Energy => self.elem_energy(elem),
        };
        Ok(poly.eval(lambda))
    }

    /// Pointwise interpolation of smooth primitive profiles. The energy
    /// coefficients are set from the pressure through the equation of state.
    pub fn project_profiles(
        layout: Arc<StaggeredLayout>,
        gas: &GasModel,
        rho0: impl Fn(f64) -> f64,
        u0: impl Fn(f64) -> f64,
        p0: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let mut field = Self::zeros(layout.clone());
        let mesh = layout.mesh();
        for elem in 0..mesh.n_elements() {
            let (a, b) = mesh.element_bounds(elem);

            let points = StaggeredLayout::interpolation_points(a, b, layout.kinematic_degree());
            let values: Vec<f64> = points.iter().map(|&x| u0(x)).collect();
            let coeffs = StaggeredLayout::bezier_from_values(&values);
            for local in 0..=layout.kinematic_degree() {
                field.velocity[layout.velocity_dof(elem, local)] = coeffs[local];
            }

            let points = StaggeredLayout::interpolation_points(a, b, layout.thermo_degree());
            let mut rho_values = Vec::with_capacity(points.len());
            let mut energy_values = Vec::with_capacity(points.len());
            for &x in &points {
                let rho = rho0(x);
                let p = p0(x);
                if !(rho > 0.0 && p > 0.0) {
                    return Err(Error::InvalidState(format!(
                        "initial data non-physical at x = {x}: rho = {rho}, p = {p}"
                    )));
                }
                rho_values.push(rho);
                energy_values.push(gas.volumetric_energy(p));
            }
            let rho_coeffs = StaggeredLayout::bezier_from_values(&rho_values);
            let e_coeffs = StaggeredLayout::bezier_from_values(&energy_values);
            for local in 0..=layout.thermo_degree() {
                let dof = layout.thermo_dof(elem, local);
                field.density[dof] = rho_coeffs[local];
                field.energy[dof] = e_coeffs[local];
            }
        }
        Ok(field)
    }

    /// Projection of two-state Riemann data with the discontinuity at `x0`.
    ///
    /// Thermodynamic DOFs take the one-sided limit from within their element;
    /// a velocity node that falls exactly on `x0` takes the average of the
    /// two sides, which keeps mirror-symmetric data mirror-symmetric.
    pub fn project_two_state(
        layout: Arc<StaggeredLayout>,
        gas: &GasModel,
        left: &crate::state::PrimitiveState,
        right: &crate::state::PrimitiveState,
        x0: f64,
    ) -> Result<Self> {
        left.validate()?;
        right.validate()?;
        let mut field = Self::zeros(layout.clone());
        let mesh = layout.mesh();
        for elem in 0..mesh.n_elements() {
            let (a, b) = mesh.element_bounds(elem);
            let mid = 0.5 * (a + b);

            let points = StaggeredLayout::interpolation_points(a, b, layout.kinematic_degree());
            let values: Vec<f64> = points
                .iter()
                .map(|&x| {
                    if x < x0 {
                        left.u
                    } else if x > x0 {
                        right.u
                    } else {
                        0.5 * (left.u + right.u)
                    }
                })
                .collect();
            let coeffs = StaggeredLayout::bezier_from_values(&values);
            for local in 0..=layout.kinematic_degree() {
                field.velocity[layout.velocity_dof(elem, local)] = coeffs[local];
            }

            let points = StaggeredLayout::interpolation_points(a, b, layout.thermo_degree());
            let pick = |x: f64| {
                if x < x0 || (x == x0 && mid < x0) {
                    left
                } else {
                    right
                }
            };
            let rho_values: Vec<f64> = points.iter().map(|&x| pick(x).rho).collect();
            let e_values: Vec<f64> = points
                .iter()
                .map(|&x| gas.volumetric_energy(pick(x).p))
                .collect();
            let rho_coeffs = StaggeredLayout::bezier_from_values(&rho_values);
            let e_coeffs = StaggeredLayout::bezier_from_values(&e_values);
            for local in 0..=layout.thermo_degree() {
                let dof = layout.thermo_dof(elem, local);
                field.density[dof] = rho_coeffs[local];
                field.energy[dof] = e_coeffs[local];
            }
        }
        Ok(field)
    }

    pub fn all_finite(&self) -> bool {
        self.velocity.iter().all(|v| v.is_finite())
            && self.density.iter().all(|v| v.is_finite())
            && self.energy.iter().all(|v| v.is_finite())
    }

    /// Largest absolute DOF value over all three fields.
    pub fn max_abs(&self) -> f64 {
        let m = |v: &[f64]| v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        m(&self.velocity).max(m(&self.density)).max(m(&self.energy))
    }
}
