//! Bernstein-Bézier bases on the reference interval `[0, 1]` and
//! Gauss-Legendre quadrature rules.
//!
//! All fields are expanded in Bézier coefficients. Bernstein polynomials are
//! non-negative and form a partition of unity, so every lumped mass
//! `|C_σ| = ∫ φ_σ` is strictly positive and a field whose coefficients are
//! positive is positive everywhere in the element. Degrees 0 through 2 cover
//! every space pairing used by the solver.

use crate::error::{Error, Result};

/// Highest polynomial degree provided by this module.
pub const MAX_DEGREE: usize = 2;

/// Bernstein polynomial `B_i` of the given degree at `lambda ∈ [0, 1]`.
///
/// Degree 1 is `(1-λ, λ)`; degree 2 is `((1-λ)², 2λ(1-λ), λ²)`.
pub fn basis_eval(degree: usize, index: usize, lambda: f64) -> Result<f64> {
    check_local_index(degree, index)?;
    Ok(eval_all(degree, lambda)[index])
}

/// Derivative `dB_i/dλ` on the reference interval.
///
/// The physical derivative on an element of length `h` is this value divided
/// by `h`.
pub fn basis_derivative(degree: usize, index: usize, lambda: f64) -> Result<f64> {
    check_local_index(degree, index)?;
    Ok(deriv_all(degree, lambda)[index])
}

/// All `degree + 1` basis values at `lambda`, packed into a fixed array.
///
/// Entries past `degree` are zero.
#[inline]
pub fn eval_all(degree: usize, lambda: f64) -> [f64; 3] {
    let l1 = 1.0 - lambda;
    let l2 = lambda;
    match degree {
        0 => [1.0, 0.0, 0.0],
        1 => [l1, l2, 0.0],
        2 => [l1 * l1, 2.0 * l1 * l2, l2 * l2],
        _ => unreachable!("basis degree capped at {MAX_DEGREE}"),
    }
}

/// All `degree + 1` reference-interval derivatives at `lambda`.
#[inline]
pub fn deriv_all(degree: usize, lambda: f64) -> [f64; 3] {
    let l1 = 1.0 - lambda;
    let l2 = lambda;
    match degree {
        0 => [0.0, 0.0, 0.0],
        1 => [-1.0, 1.0, 0.0],
        2 => [-2.0 * l1, 2.0 * (l1 - l2), 2.0 * l2],
        _ => unreachable!("basis degree capped at {MAX_DEGREE}"),
    }
}

/// Exact lumped masses `∫_K φ_i dx` on an element of length `h`.
///
/// For Bernstein polynomials all entries equal `h / (degree + 1)`.
pub fn lumped_mass(degree: usize, h: f64) -> Result<Vec<f64>> {
    check_degree(degree)?;
    if h <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "element length must be positive, got {h}"
        )));
    }
    Ok(vec![h / (degree + 1) as f64; degree + 1])
}

fn check_degree(degree: usize) -> Result<()> {
    if degree > MAX_DEGREE {
        return Err(Error::InvalidArgument(format!(
            "basis degree {degree} exceeds supported maximum {MAX_DEGREE}"
        )));
    }
    Ok(())
}

fn check_local_index(degree: usize, index: usize) -> Result<()> {
    check_degree(degree)?;
    if index > degree {
        return Err(Error::InvalidArgument(format!(
            "local index {index} out of range for degree {degree}"
        )));
    }
    Ok(())
}

/// Gauss-Legendre rule on `[0, 1]`.
///
/// An `n`-point rule integrates polynomials of degree `2n - 1` exactly;
/// weights sum to one.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `∫_0^1 f(λ) dλ` by the rule.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }
}

/// `n`-point Gauss-Legendre rule mapped from `[-1, 1]` to `[0, 1]`.
pub fn gauss_rule(n: usize) -> Result<QuadratureRule> {
    // Abscissas and weights on [-1, 1].
    let (xs, ws): (&[f64], &[f64]) = match n {
        1 => (&[0.0], &[2.0]),
        2 => (
            &[-0.577_350_269_189_625_8, 0.577_350_269_189_625_8],
            &[1.0, 1.0],
        ),
        3 => (
            &[-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4],
            &[
                0.555_555_555_555_555_6,
                0.888_888_888_888_888_9,
                0.555_555_555_555_555_6,
            ],
        ),
        4 => (
            &[
                -0.861_136_311_594_052_6,
                -0.339_981_043_584_856_3,
                0.339_981_043_584_856_3,
                0.861_136_311_594_052_6,
            ],
            &[
                0.347_854_845_137_453_9,
                0.652_145_154_862_546_2,
                0.652_145_154_862_546_2,
                0.347_854_845_137_453_9,
            ],
        ),
        5 => (
            &[
                -0.906_179_845_938_664,
                -0.538_469_310_105_683,
                0.0,
                0.538_469_310_105_683,
                0.906_179_845_938_664,
            ],
            &[
                0.236_926_885_056_189_08,
                0.478_628_670_499_366_47,
                0.568_888_888_888_888_9,
                0.478_628_670_499_366_47,
                0.236_926_885_056_189_08,
            ],
        ),
        _ => {
            return Err(Error::InvalidArgument(format!(
                "gauss rule with {n} points not supported (1..=5)"
            )))
        }
    };
    Ok(QuadratureRule {
        points: xs.iter().map(|x| 0.5 * (x + 1.0)).collect(),
        weights: ws.iter().map(|w| 0.5 * w).collect(),
    })
}

/// Rule used for every element integral of a space pairing whose kinematic
/// degree is `kinematic_degree`.
///
/// `kinematic_degree + 2` points are exact for every residual and correction
/// integrand that occurs (maximum degree `3·kinematic + thermo - 1`).
pub fn element_rule(kinematic_degree: usize) -> QuadratureRule {
    gauss_rule(kinematic_degree + 2).expect("kinematic degree capped at 2")
}
