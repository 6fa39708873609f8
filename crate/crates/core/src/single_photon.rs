//! Closed-form single-photon scattering through the dimer.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::model::DimerParams;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Stationary single-photon solution at detuning `energy`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScatterCoefficients1 {
    pub energy: Complex64,
    /// Cavity amplitudes.
    pub e1: Complex64,
    pub e2: Complex64,
    /// Reflection back into the left waveguide.
    pub r: Complex64,
    /// Transmission into the right waveguide.
    pub t: Complex64,
}

impl ScatterCoefficients1 {
    pub fn flux(&self) -> f64 {
        self.r.norm_sqr() + self.t.norm_sqr()
    }
}

/// Reflection/transmission coefficients and cavity amplitudes for a photon
/// of energy `energy` incident from the left waveguide.
pub fn scatter1(params: &DimerParams, energy: f64) -> ScatterCoefficients1 {
    scatter1_complex(params, Complex64::new(energy, 0.0))
}

pub(crate) fn scatter1_complex(params: &DimerParams, e: Complex64) -> ScatterCoefficients1 {
    let (j, v1, v2) = (params.j_hop, params.v1, params.v2);
    let (v1s, v2s) = (v1 * v1, v2 * v2);
    let a1 = v1s - 2.0 * I * (e - params.omega1);
    let a2 = v2s - 2.0 * I * (e - params.omega2);
    let den = 4.0 * j * j + a1 * a2;
    let norm = (2.0 / PI).sqrt();

    let e1 = norm * v1 * (-I * v2s - 2.0 * e + 2.0 * params.omega2) / den;
    let e2 = -2.0 * j * norm * v1 / den;
    let r = (4.0 * j * j - (v1s + 2.0 * I * (e - params.omega1)) * a2) / den;
    let t = 4.0 * I * j * v1 * v2 / den;
    ScatterCoefficients1 {
        energy: e,
        e1,
        e2,
        r,
        t,
    }
}

/// Single-photon eigenstate amplitudes `(phi_L(x), phi_R(x))` at position
/// `x` in the two waveguides. The value at `x = 0` is the average of the two
/// sides.
pub fn output_wavefunction1(params: &DimerParams, energy: f64, x: f64) -> (Complex64, Complex64) {
    let c = scatter1(params, energy);
    let wave = (I * energy * x).exp() / (2.0 * PI).sqrt();
    if x < 0.0 {
        (wave, Complex64::new(0.0, 0.0))
    } else if x > 0.0 {
        (c.r * wave, c.t * wave)
    } else {
        (0.5 * (1.0 + c.r) * wave, 0.5 * c.t * wave)
    }
}
