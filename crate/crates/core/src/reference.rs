//! Built-in benchmark cases and exact reference solutions: the self-similar
//! Riemann sampler for the shock-tube problems and the characteristics-based
//! solution of the smooth isentropic flow.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mesh::BoundaryKind;
use crate::riemann::{exact_riemann, ExactRiemann, Wave};
use crate::space::{FieldVar, Side, StaggeredField, StaggeredLayout};
use crate::state::{GasModel, PrimitiveState};

/// What exact solution is available for error measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceKind {
    Riemann,
    Isentropic,
    None,
}

/// Initial data of a case.
#[derive(Debug, Clone, Copy)]
pub enum CaseData {
    TwoState {
        left: PrimitiveState,
        right: PrimitiveState,
        x0: f64,
    },
    /// `ρ₀ = 1 + 0.9 sin(2πx)`, `u₀ = 0`, `p₀ = ρ₀^γ` with `γ = 3`.
    SmoothIsentropic,
}

/// A named benchmark configuration.
#[derive(Debug, Clone)]
pub struct BenchmarkCase {
    pub name: String,
    pub data: CaseData,
    pub domain: (f64, f64),
    pub t_final: f64,
    pub cfl: f64,
    pub gamma: f64,
    pub boundary: BoundaryKind,
    pub reference: ReferenceKind,
}

/// Density profile of the smooth isentropic case.
pub fn smooth_density_profile(x: f64) -> f64 {
    1.0 + 0.9 * (2.0 * PI * x).sin()
}

fn smooth_density_slope(x: f64) -> f64 {
    0.9 * 2.0 * PI * (2.0 * PI * x).cos()
}

/// The five built-in cases.
pub fn builtin_cases() -> Vec<BenchmarkCase> {
    vec![
        BenchmarkCase {
            name: "sod".into(),
            data: CaseData::TwoState {
                left: PrimitiveState::new(1.0, 0.0, 1.0),
                right: PrimitiveState::new(0.125, 0.0, 0.1),
                x0: 0.5,
            },
            domain: (0.0, 1.0),
            t_final: 0.16,
            cfl: 0.4,
            gamma: 1.4,
            boundary: BoundaryKind::Transmissive,
            reference: ReferenceKind::Riemann,
        },
        BenchmarkCase {
            name: "strong".into(),
            data: CaseData::TwoState {
                left: PrimitiveState::new(1.0, 0.0, 1000.0),
                right: PrimitiveState::new(1.0, 0.0, 0.01),
                x0: 0.5,
            },
            domain: (0.0, 1.0),
            t_final: 0.012,
            cfl: 0.4,
            gamma: 1.4,
            boundary: BoundaryKind::Transmissive,
            reference: ReferenceKind::Riemann,
        },
        BenchmarkCase {
            name: "one23".into(),
            data: CaseData::TwoState {
                left: PrimitiveState::new(1.0, -2.0, 0.4),
                right: PrimitiveState::new(1.0, 2.0, 0.4),
                x0: 0.5,
            },
            domain: (0.0, 1.0),
            t_final: 0.15,
            cfl: 0.4,
            gamma: 1.4,
            boundary: BoundaryKind::Transmissive,
            reference: ReferenceKind::Riemann,
        },
        BenchmarkCase {
            name: "severe".into(),
            data: CaseData::TwoState {
                left: PrimitiveState::new(5.99924, 19.5975, 460.894),
                right: PrimitiveState::new(5.99242, -6.19633, 46.0950),
                x0: 0.8,
            },
            domain: (0.0, 1.0),
            t_final: 0.012,
            cfl: 0.1,
            gamma: 1.4,
            boundary: BoundaryKind::Transmissive,
            reference: ReferenceKind::Riemann,
        },
        BenchmarkCase {
            name: "smooth".into(),
            data: CaseData::SmoothIsentropic,
            domain: (-1.0, 1.0),
            t_final: 0.025,
            cfl: 0.4,
            gamma: 3.0,
            boundary: BoundaryKind::Periodic,
            reference: ReferenceKind::Isentropic,
        },
    ]
}

/// Look a case up by name ("123" is accepted for "one23").
pub fn case_by_name(name: &str) -> Result<BenchmarkCase> {
    let canonical = if name == "123" { "one23" } else { name };
    builtin_cases()
        .into_iter()
        .find(|c| c.name == canonical)
        .ok_or_else(|| {
            Error::Config(format!(
                "unknown case `{name}` (available: sod, strong, one23, severe, smooth)"
            ))
        })
}

impl BenchmarkCase {
    pub fn gas(&self) -> GasModel {
        GasModel { gamma: self.gamma }
    }

    /// Project the initial data onto a layout.
    pub fn initial_field(&self, layout: Arc<StaggeredLayout>) -> Result<StaggeredField> {
        let gas = self.gas();
        match self.data {
            CaseData::TwoState { left, right, x0 } => {
                StaggeredField::project_two_state(layout, &gas, &left, &right, x0)
            }
            CaseData::SmoothIsentropic => StaggeredField::project_profiles(
                layout,
                &gas,
                smooth_density_profile,
                |_| 0.0,
                |x| smooth_density_profile(x).powf(self.gamma),
            ),
        }
    }

    /// Exact-solution sampler, if the case has one.
    pub fn reference_sampler(&self) -> Result<Option<ReferenceSampler>> {
        match (self.reference, &self.data) {
            (ReferenceKind::Riemann, CaseData::TwoState { left, right, x0 }) => {
                let solution = exact_riemann(left, right, &self.gas())?;
                Ok(Some(ReferenceSampler::Riemann(RiemannReference {
                    solution,
                    x0: *x0,
                })))
            }
            (ReferenceKind::Isentropic, _) => Ok(Some(ReferenceSampler::Isentropic {
                gamma: self.gamma,
            })),
            _ => Ok(None),
        }
    }
}

/// Self-similar exact solution of a two-state problem.
#[derive(Debug, Clone)]
pub struct RiemannReference {
    pub solution: ExactRiemann,
    pub x0: f64,
}

impl RiemannReference {
    pub fn state(&self, x: f64, t: f64) -> PrimitiveState {
        if t <= 0.0 {
            if x < self.x0 {
                self.solution.left
            } else if x > self.x0 {
                self.solution.right
            } else {
                self.solution.sample(0.0)
            }
        } else {
            self.solution.sample((x - self.x0) / t)
        }
    }

    /// Positions of the discontinuities (shocks and the contact) at time
    /// `t`; rarefactions are smooth and excluded.
    pub fn discontinuity_positions(&self, t: f64) -> Vec<f64> {
        let mut xs = Vec::new();
        if let Wave::Shock { speed } = self.solution.left_wave {
            xs.push(self.x0 + speed * t);
        }
        if (self.solution.rho_star_left - self.solution.rho_star_right).abs()
            > 1e-12 * self.solution.rho_star_left.abs()
        {
            xs.push(self.x0 + self.solution.u_star * t);
        }
        if let Wave::Shock { speed } = self.solution.right_wave {
            xs.push(self.x0 + speed * t);
        }
        xs
    }
}

/// Exact-solution dispatcher.
#[derive(Debug, Clone)]
pub enum ReferenceSampler {
    Riemann(RiemannReference),
    Isentropic { gamma: f64 },
}

impl ReferenceSampler {
    pub fn state(&self, x: f64, t: f64) -> Result<PrimitiveState> {
        match self {
            ReferenceSampler::Riemann(r) => Ok(r.state(x, t)),
            ReferenceSampler::Isentropic { gamma } => {
                let (rho, u) = isentropic_exact(x, t, &smooth_density_profile, &smooth_density_slope, *gamma)?;
                Ok(PrimitiveState::new(rho, u, rho.powf(*gamma)))
            }
        }
    }
}

/// Feet of the two characteristics through `(x, t)` for the isentropic flow
/// with `γ = 3`: solutions of `x ± √3 ρ₀(xᵢ) t - xᵢ = 0`.
pub fn characteristic_feet(
    x: f64,
    t: f64,
    rho0: &impl Fn(f64) -> f64,
    drho0: &impl Fn(f64) -> f64,
) -> Result<(f64, f64)> {
    let sqrt3 = 3.0f64.sqrt();
    let solve = |sign: f64| -> Result<f64> {
        let mut xi = x;
        for _ in 0..100 {
            let g = x + sign * sqrt3 * rho0(xi) * t - xi;
            if g.abs() < 1e-13 {
                return Ok(xi);
            }
            let dg = sign * sqrt3 * drho0(xi) * t - 1.0;
            let mut step = -g / dg;
            // Damping: the feet stay within a wave-travel distance of x.
            let cap = (sqrt3 * 2.0 * t).max(0.25);
            if !step.is_finite() {
                return Err(Error::NoConvergence {
                    iterations: 100,
                    residual: g.abs(),
                });
            }
            step = step.clamp(-cap, cap);
            xi += step;
        }
        let g = x + sign * sqrt3 * rho0(xi) * t - xi;
        if g.abs() < 1e-12 {
            Ok(xi)
        } else {
            Err(Error::NoConvergence {
                iterations: 100,
                residual: g.abs(),
            })
        }
    };
    Ok((solve(1.0)?, solve(-1.0)?))
}

/// Exact density and velocity of the smooth isentropic flow by the method
/// of characteristics. Valid while the solution is smooth; the closed form
/// is specific to `γ = 3`.
pub fn isentropic_exact(
    x: f64,
    t: f64,
    rho0: &impl Fn(f64) -> f64,
    drho0: &impl Fn(f64) -> f64,
    gamma: f64,
) -> Result<(f64, f64)> {
    if (gamma - 3.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "the characteristics closed form requires gamma = 3, got {gamma}"
        )));
    }
    let (x1, x2) = characteristic_feet(x, t, rho0, drho0)?;
    let rho = 0.5 * (rho0(x1) + rho0(x2));
    let u = 3.0f64.sqrt() * (rho - rho0(x1));
    Ok((rho, u))
}

/// Composite-midpoint L¹ errors of a discrete field against a reference.
#[derive(Debug, Clone, Copy)]
pub struct L1Errors {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
}

pub fn l1_error(
    field: &StaggeredField,
    gas: &GasModel,
    reference: &ReferenceSampler,
    t: f64,
    n_samples: usize,
) -> Result<L1Errors> {
    let (a, b) = field.layout().mesh().domain();
    let width = (b - a) / n_samples as f64;
    let mut err = L1Errors {
        rho: 0.0,
        u: 0.0,
        p: 0.0,
    };
    for i in 0..n_samples {
        let x = a + (i as f64 + 0.5) * width;
        let exact = reference.state(x, t)?;
        let rho = field.eval(FieldVar::Density, x, Side::Right)?;
        let u = field.eval(FieldVar::Velocity, x, Side::Right)?;
        let p = gas.pressure_from_volumetric(field.eval(FieldVar::Energy, x, Side::Right)?);
        err.rho += (rho - exact.rho).abs() * width;
        err.u += (u - exact.u).abs() * width;
        err.p += (p - exact.p).abs() * width;
    }
    Ok(err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Mesh1d;
    use crate::state::flux_from_primitive;

    #[test]
    fn builtin_case_parameters() {
        let cases = builtin_cases();
        assert_eq!(cases.len(), 5);

        let sod = case_by_name("sod").unwrap();
        assert_eq!(sod.t_final, 0.16);
        assert_eq!(sod.cfl, 0.4);
        assert_eq!(sod.gamma, 1.4);
        match sod.data {
            CaseData::TwoState { left, right, x0 } => {
                assert_eq!((left.rho, left.u, left.p), (1.0, 0.0, 1.0));
                assert_eq!((right.rho, right.u, right.p), (0.125, 0.0, 0.1));
                assert_eq!(x0, 0.5);
            }
            _ => panic!("sod must be two-state"),
        }

        let strong = case_by_name("strong").unwrap();
        assert_eq!(strong.t_final, 0.012);
        match strong.data {
            CaseData::TwoState { left, right, .. } => {
                assert_eq!(left.p, 1000.0);
                assert_eq!(right.p, 0.01);
            }
            _ => panic!(),
        }

        let one23 = case_by_name("123").unwrap();
        assert_eq!(one23.name, "one23");
        assert_eq!(one23.t_final, 0.15);

        let severe = case_by_name("severe").unwrap();
        assert_eq!(severe.cfl, 0.1);
        match severe.data {
            CaseData::TwoState { left, x0, .. } => {
                assert_eq!(left.rho, 5.99924);
                assert_eq!(left.u, 19.5975);
                assert_eq!(left.p, 460.894);
                assert_eq!(x0, 0.8);
            }
            _ => panic!(),
        }

        let smooth = case_by_name("smooth").unwrap();
        assert_eq!(smooth.gamma, 3.0);
        assert_eq!(smooth.boundary, BoundaryKind::Periodic);
        assert_eq!(smooth.domain, (-1.0, 1.0));

        assert!(case_by_name("upwind").is_err());
    }

    #[test]
    fn sod_sampler_far_field_and_contact() {
        let case = case_by_name("sod").unwrap();
        let sampler = match case.reference_sampler().unwrap().unwrap() {
            ReferenceSampler::Riemann(r) => r,
            _ => panic!(),
        };
        let t = 0.16;
        let far_left = sampler.state(0.01, t);
        assert_eq!(
            (far_left.rho, far_left.u, far_left.p),
            (1.0, 0.0, 1.0)
        );
        let far_right = sampler.state(0.99, t);
        assert_eq!(far_right.rho, 0.125);

        // Between the rarefaction tail and the contact.
        let contact_x = 0.5 + sampler.solution.u_star * t;
        let left_of_contact = sampler.state(contact_x - 0.01, t);
        assert!((left_of_contact.rho - 0.42632).abs() < 5e-5);
        assert!((left_of_contact.u - 0.92745).abs() < 5e-5);
        assert!((left_of_contact.p - 0.30313).abs() < 5e-5);
    }

    #[test]
    fn one23_is_mirror_symmetric_at_the_origin() {
        let case = case_by_name("one23").unwrap();
        let sampler = case.reference_sampler().unwrap().unwrap();
        let s = sampler.state(0.5, 0.1).unwrap();
        assert!(s.u.abs() < 1e-12);
    }

    #[test]
    fn rankine_hugoniot_across_the_sod_shock() {
        let case = case_by_name("sod").unwrap();
        let gas = case.gas();
        let sampler = match case.reference_sampler().unwrap().unwrap() {
            ReferenceSampler::Riemann(r) => r,
            _ => panic!(),
        };
        let sol = &sampler.solution;
        let speed = match sol.right_wave {
            Wave::Shock { speed } => speed,
            _ => panic!("sod has a right shock"),
        };
        let pre = sol.right;
        let post = PrimitiveState::new(sol.rho_star_right, sol.u_star, sol.p_star);
        let u_pre = pre.to_conservative(&gas);
        let u_post = post.to_conservative(&gas);
        let f_pre = flux_from_primitive(&pre, &gas);
        let f_post = flux_from_primitive(&post, &gas);
        let jumps = [
            (u_post.rho - u_pre.rho, f_post[0] - f_pre[0]),
            (u_post.momentum - u_pre.momentum, f_post[1] - f_pre[1]),
            (u_post.energy - u_pre.energy, f_post[2] - f_pre[2]),
        ];
        for (du, df) in jumps {
            assert!(
                (speed * du - df).abs() < 1e-10 * df.abs().max(1.0),
                "s[U] = {}, [f] = {}",
                speed * du,
                df
            );
        }
    }

    #[test]
    fn characteristic_feet_satisfy_their_equations() {
        let t = 0.02;
        for k in 0..20 {
            let x = -1.0 + 2.0 * (k as f64 + 0.5) / 20.0;
            let (x1, x2) =
                characteristic_feet(x, t, &smooth_density_profile, &smooth_density_slope)
                    .unwrap();
            let sqrt3 = 3.0f64.sqrt();
            let g1 = x + sqrt3 * smooth_density_profile(x1) * t - x1;
            let g2 = x - sqrt3 * smooth_density_profile(x2) * t - x2;
            assert!(g1.abs() < 1e-12);
            assert!(g2.abs() < 1e-12);
        }
    }

    #[test]
    fn isentropic_solution_at_time_zero_is_the_profile() {
        for k in 0..10 {
            let x = -1.0 + 0.2 * k as f64 + 0.05;
            let (rho, u) = isentropic_exact(
                x,
                0.0,
                &smooth_density_profile,
                &smooth_density_slope,
                3.0,
            )
            .unwrap();
            assert!((rho - smooth_density_profile(x)).abs() < 1e-13);
            assert!(u.abs() < 1e-13);
        }
        assert!(isentropic_exact(
            0.0,
            0.0,
            &smooth_density_profile,
            &smooth_density_slope,
            1.4
        )
        .is_err());
    }

    #[test]
    fn isentropic_solution_conserves_mass_and_periodicity() {
        let t = 0.025;
        let n = 4000;
        let mut mass = 0.0;
        for i in 0..n {
            let x = -1.0 + 2.0 * (i as f64 + 0.5) / n as f64;
            let (rho, _) = isentropic_exact(
                x,
                t,
                &smooth_density_profile,
                &smooth_density_slope,
                3.0,
            )
            .unwrap();
            mass += rho * 2.0 / n as f64;
        }
        // ∫ρ₀ over [-1, 1] is exactly 2.
        assert!((mass - 2.0).abs() < 1e-10, "mass = {mass}");

        let (rho_a, u_a) = isentropic_exact(
            -0.7,
            t,
            &smooth_density_profile,
            &smooth_density_slope,
            3.0,
        )
        .unwrap();
        let (rho_b, u_b) = isentropic_exact(
            -0.7 + 2.0,
            t,
            &smooth_density_profile,
            &smooth_density_slope,
            3.0,
        )
        .unwrap();
        assert!((rho_a - rho_b).abs() < 1e-11);
        assert!((u_a - u_b).abs() < 1e-11);
    }

    #[test]
    fn l1_error_basics() {
        let case = case_by_name("sod").unwrap();
        let gas = case.gas();
        let mesh = Mesh1d::uniform(0.0, 1.0, 64, BoundaryKind::Transmissive).unwrap();
        let layout = StaggeredLayout::new(mesh, 0).unwrap();
        let field = case.initial_field(layout.clone()).unwrap();
        let sampler = case.reference_sampler().unwrap().unwrap();

        // Field equals reference at t = 0.
        let err = l1_error(&field, &gas, &sampler, 0.0, 1000).unwrap();
        assert!(err.rho < 1e-13 && err.u < 1e-13 && err.p < 1e-13);

        // Constant density offset integrates to offset times length.
        let mut shifted = field.clone();
        for v in shifted.density.iter_mut() {
            *v += 0.01;
        }
        let err = l1_error(&shifted, &gas, &sampler, 0.0, 1000).unwrap();
        assert!((err.rho - 0.01).abs() < 1e-12);
    }
}
