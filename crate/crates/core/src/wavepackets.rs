//! Input wavepackets: single-photon envelopes, the two-photon product state
//! and weak coherent pulses.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{DimerError, Result};
use crate::quadrature::{integrate_complex, QuadOptions, QuadResult};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    Gaussian,
    Lorentzian,
    Rising,
}

impl Shape {
    pub fn name(self) -> &'static str {
        match self {
            Shape::Gaussian => "gaussian",
            Shape::Lorentzian => "lorentzian",
            Shape::Rising => "rising",
        }
    }
}

impl std::str::FromStr for Shape {
    type Err = DimerError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gaussian" => Ok(Shape::Gaussian),
            "lorentzian" => Ok(Shape::Lorentzian),
            "rising" => Ok(Shape::Rising),
            other => Err(DimerError::domain(
                "shape",
                format!("must be gaussian, lorentzian or rising (got {other:?})"),
            )),
        }
    }
}

/// Normalized momentum envelope of one photon.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PulseProfile {
    pub shape: Shape,
    pub k0: f64,
    pub sigma: f64,
}

impl PulseProfile {
    pub fn new(shape: Shape, k0: f64, sigma: f64) -> Result<Self> {
        if !k0.is_finite() {
            return Err(DimerError::domain("k0", "must be finite"));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(DimerError::domain("sigma", "must be positive"));
        }
        Ok(PulseProfile { shape, k0, sigma })
    }

    pub fn gaussian(k0: f64, sigma: f64) -> Result<Self> {
        Self::new(Shape::Gaussian, k0, sigma)
    }

    pub fn with_center(self, k0: f64) -> Self {
        PulseProfile { k0, ..self }
    }

    /// Momentum amplitude `xi(k)`.
    pub fn amplitude(&self, k: f64) -> Complex64 {
        let (s, q) = (self.sigma, k - self.k0);
        match self.shape {
            Shape::Gaussian => Complex64::new(
                (-q * q / (4.0 * s * s)).exp() / (2.0 * PI * s * s).powf(0.25),
                0.0,
            ),
            Shape::Lorentzian => {
                Complex64::new((2.0 / PI).sqrt() * s.powf(1.5) / (q * q + s * s), 0.0)
            }
            Shape::Rising => (2.0 / PI).sqrt() * s.sqrt() / (2.0 * I * q + s),
        }
    }

    /// Position-space envelope `(1/sqrt(2 pi)) int dk xi(k) e^{ikx}`.
    pub fn position_amplitude(&self, x: f64) -> Complex64 {
        let s = self.sigma;
        let carrier = (I * self.k0 * x).exp();
        let env = match self.shape {
            Shape::Gaussian => (2.0 / PI).powf(0.25) * s.sqrt() * (-s * s * x * x).exp(),
            Shape::Lorentzian => s.sqrt() * (-s * x.abs()).exp(),
            Shape::Rising => {
                if x > 0.0 {
                    s.sqrt() * (-s * x / 2.0).exp()
                } else if x < 0.0 {
                    0.0
                } else {
                    0.5 * s.sqrt()
                }
            }
        };
        carrier * env
    }

    /// Integration range. Gaussians are cut at `k0 +- 8 sigma`; the
    /// algebraic profiles are integrated over the whole line.
    pub fn support(&self) -> (f64, f64) {
        match self.shape {
            Shape::Gaussian => (self.k0 - 8.0 * self.sigma, self.k0 + 8.0 * self.sigma),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// Interior breakpoints used when integrating against the profile.
    pub(crate) fn breakpoints(&self) -> Vec<f64> {
        let (k0, s) = (self.k0, self.sigma);
        match self.shape {
            Shape::Gaussian => vec![k0],
            _ => vec![k0 - 40.0 * s, k0 - 4.0 * s, k0, k0 + 4.0 * s, k0 + 40.0 * s],
        }
    }

    /// Adaptive integral of `f(k)` against the profile's natural support.
    pub fn integrate<F>(&self, f: F, opts: &QuadOptions) -> QuadResult
    where
        F: FnMut(f64) -> Complex64,
    {
        let (lo, hi) = self.support();
        let opts = QuadOptions {
            tail_scale: 40.0 * self.sigma,
            ..*opts
        };
        integrate_complex(f, lo, hi, &self.breakpoints(), &opts)
    }

    /// `int dk |xi(k)|^2` evaluated with the module quadrature.
    pub fn norm_sqr(&self) -> f64 {
        let opts = QuadOptions {
            abs_tol: 1e-13,
            rel_tol: 1e-12,
            ..Default::default()
        };
        self.integrate(|k| Complex64::new(self.amplitude(k).norm_sqr(), 0.0), &opts)
            .value[0]
            .re
    }
}

/// Free function form of [`PulseProfile::amplitude`].
pub fn momentum_amplitude(profile: &PulseProfile, k: f64) -> Complex64 {
    profile.amplitude(k)
}

/// `int dk conj(xi_a(k)) xi_b(k)`.
pub fn overlap(a: &PulseProfile, b: &PulseProfile) -> Complex64 {
    if a.shape == Shape::Gaussian && b.shape == Shape::Gaussian && a.sigma == b.sigma {
        let dk = a.k0 - b.k0;
        return Complex64::new((-dk * dk / (8.0 * a.sigma * a.sigma)).exp(), 0.0);
    }
    let opts = QuadOptions {
        abs_tol: 1e-13,
        rel_tol: 1e-12,
        ..Default::default()
    };
    // Integrate on the wider of the two supports.
    let outer = if a.support().1 - a.support().0 >= b.support().1 - b.support().0 {
        a
    } else {
        b
    };
    let mut bps = a.breakpoints();
    bps.extend(b.breakpoints());
    let (lo, hi) = outer.support();
    let opts = QuadOptions {
        tail_scale: 40.0 * a.sigma.max(b.sigma),
        ..opts
    };
    integrate_complex(
        |k| a.amplitude(k).conj() * b.amplitude(k),
        lo,
        hi,
        &bps,
        &opts,
    )
    .value[0]
}

/// Two photons in the product state `c_xi1^dag c_xi2^dag |0> / sqrt(M2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoPhotonInput {
    pub xi1: PulseProfile,
    pub xi2: PulseProfile,
    pub m2: f64,
}

impl TwoPhotonInput {
    pub fn new(xi1: PulseProfile, xi2: PulseProfile) -> Self {
        let m2 = 1.0 + overlap(&xi1, &xi2).norm_sqr();
        TwoPhotonInput {
            xi1,
            xi2,
            m2: m2.clamp(1.0, 2.0),
        }
    }

    /// Two pulses of the same shape and width centred at `k1` and `k2`.
    pub fn pair(shape: Shape, k1: f64, k2: f64, sigma: f64) -> Result<Self> {
        Ok(Self::new(
            PulseProfile::new(shape, k1, sigma)?,
            PulseProfile::new(shape, k2, sigma)?,
        ))
    }

    /// Pair at total detuning `delta` and splitting `dk = k1 - k2`.
    pub fn at_detuning(shape: Shape, delta: f64, dk: f64, sigma: f64) -> Result<Self> {
        Self::pair(shape, (delta + dk) / 2.0, (delta - dk) / 2.0, sigma)
    }
}

/// Normalization `M2 = 1 + |<xi1|xi2>|^2`.
pub fn overlap_m2(input: &TwoPhotonInput) -> f64 {
    input.m2
}

/// Equal-position intensity correlation of the incoming two-photon state at
/// `(x1, x2)`.
pub fn initial_g2(input: &TwoPhotonInput, x1: f64, x2: f64) -> f64 {
    let ov = overlap(&input.xi1, &input.xi2);
    let g1 = |x: f64| input.xi1.position_amplitude(x);
    let g2 = |x: f64| input.xi2.position_amplitude(x);
    let g3 = |x: f64| {
        let (a, b) = (g1(x), g2(x));
        a.norm_sqr() + b.norm_sqr() + 2.0 * (ov * a * b.conj()).re
    };
    let num = (g1(x1) * g2(x2) + g1(x2) * g2(x1)).norm_sqr();
    num / (g3(x1) * g3(x2) / input.m2)
}

/// Weak coherent pulse `alpha(k) = sqrt(nbar) xi(k)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoherentInput {
    pub nbar: f64,
    pub profile: PulseProfile,
}

impl CoherentInput {
    pub fn new(nbar: f64, profile: PulseProfile) -> Result<Self> {
        if !(nbar > 0.0 && nbar.is_finite()) {
            return Err(DimerError::domain("nbar", "must be positive"));
        }
        Ok(CoherentInput { nbar, profile })
    }

    pub fn amplitude(&self, k: f64) -> Complex64 {
        self.nbar.sqrt() * self.profile.amplitude(k)
    }

    /// The identical-photon pair carried by the two-photon component.
    pub fn photon_pair(&self) -> TwoPhotonInput {
        TwoPhotonInput::new(self.profile, self.profile)
    }
}
