//! Ideal-gas thermodynamics, state conversions, pointwise Euler fluxes and
//! wave-speed bounds.
//!
//! `e` in [`PrimitiveState::specific_energy`] and [`ConservativeState`] is the
//! specific internal energy (per unit mass), so `E = ρe + ½ρu²` and
//! `p = (γ-1)ρe`. The discrete fields of the solver store the internal energy
//! per unit volume `ρe`, which is the quantity the non-conservative energy
//! equation evolves; the two are related pointwise through the density.

use crate::error::{Error, Result};

/// Calorically perfect gas, `p = (γ-1)ρe`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasModel {
    pub gamma: f64,
}

impl GasModel {
    pub fn new(gamma: f64) -> Result<Self> {
        if gamma <= 1.0 {
            return Err(Error::InvalidArgument(format!(
                "ratio of specific heats must exceed 1, got {gamma}"
            )));
        }
        Ok(Self { gamma })
    }

    /// Air-like default, γ = 1.4.
    pub fn air() -> Self {
        Self { gamma: 1.4 }
    }

    /// `p = (γ-1)ρe` with `e` the specific internal energy.
    pub fn pressure(&self, rho: f64, specific_energy: f64) -> f64 {
        (self.gamma - 1.0) * rho * specific_energy
    }

    /// Pressure from the internal energy per unit volume, `p = (γ-1)·ρe`.
    pub fn pressure_from_volumetric(&self, volumetric_energy: f64) -> f64 {
        (self.gamma - 1.0) * volumetric_energy
    }

    /// Internal energy per unit volume at a given pressure.
    pub fn volumetric_energy(&self, pressure: f64) -> f64 {
        pressure / (self.gamma - 1.0)
    }

    pub fn sound_speed(&self, rho: f64, pressure: f64) -> Result<f64> {
        if rho <= 0.0 || pressure <= 0.0 {
            return Err(Error::InvalidState(format!(
                "sound speed needs rho > 0 and p > 0, got rho = {rho}, p = {pressure}"
            )));
        }
        Ok((self.gamma * pressure / rho).sqrt())
    }
}

/// Point state in primitive variables `(ρ, u, p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimitiveState {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
}

impl PrimitiveState {
    pub fn new(rho: f64, u: f64, p: f64) -> Self {
        Self { rho, u, p }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.p > 0.0 && self.rho.is_finite() && self.u.is_finite()) {
            return Err(Error::InvalidState(format!(
                "rho = {}, u = {}, p = {}",
                self.rho, self.u, self.p
            )));
        }
        Ok(())
    }

    pub fn sound_speed(&self, gas: &GasModel) -> Result<f64> {
        gas.sound_speed(self.rho, self.p)
    }

    /// Specific internal energy `e = p / ((γ-1)ρ)`.
    pub fn specific_energy(&self, gas: &GasModel) -> f64 {
        self.p / ((gas.gamma - 1.0) * self.rho)
    }

    pub fn to_conservative(&self, gas: &GasModel) -> ConservativeState {
        ConservativeState {
            rho: self.rho,
            momentum: self.rho * self.u,
            energy: gas.volumetric_energy(self.p) + 0.5 * self.rho * self.u * self.u,
        }
    }
}

/// Point state in conservative variables `(ρ, ρu, E)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservativeState {
    pub rho: f64,
    pub momentum: f64,
    pub energy: f64,
}

impl ConservativeState {
    pub fn new(rho: f64, momentum: f64, energy: f64) -> Self {
        Self {
            rho,
            momentum,
            energy,
        }
    }

    pub fn internal_energy(&self) -> f64 {
        self.energy - 0.5 * self.momentum * self.momentum / self.rho
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.internal_energy() > 0.0) || !self.momentum.is_finite() {
            return Err(Error::InvalidState(format!(
                "rho = {}, m = {}, E = {}",
                self.rho, self.momentum, self.energy
            )));
        }
        Ok(())
    }

    pub fn to_primitive(&self, gas: &GasModel) -> PrimitiveState {
        PrimitiveState {
            rho: self.rho,
            u: self.momentum / self.rho,
            p: (gas.gamma - 1.0) * self.internal_energy(),
        }
    }
}

/// Flux triple `(f^ρ, f^m, f^E) = (ρu, ρu² + p, (E + p)u)`.
pub fn euler_flux(state: &ConservativeState, gas: &GasModel) -> Result<[f64; 3]> {
    state.validate()?;
    let prim = state.to_primitive(gas);
    Ok(flux_from_primitive(&prim, gas))
}

/// Same flux assembled from primitives, without validation.
pub fn flux_from_primitive(prim: &PrimitiveState, gas: &GasModel) -> [f64; 3] {
    let energy = gas.volumetric_energy(prim.p) + 0.5 * prim.rho * prim.u * prim.u;
    [
        prim.rho * prim.u,
        prim.rho * prim.u * prim.u + prim.p,
        (energy + prim.p) * prim.u,
    ]
}

/// `max(|u| + c)` over a set of states, the local wave-speed bound.
pub fn wave_bound<'a, I>(states: I, gas: &GasModel) -> Result<f64>
where
    I: IntoIterator<Item = &'a PrimitiveState>,
{
    let mut bound = 0.0f64;
    for s in states {
        let c = s.sound_speed(gas)?;
        bound = bound.max(s.u.abs() + c);
    }
    Ok(bound)
}
