//! Physical parameters of the waveguide-coupled two-site Bose-Hubbard dimer,
//! its closed-system eigenstructure, and the resonance bookkeeping used to
//! choose input photon energies.
//!
//! All energies live in the rotating frame of the first cavity: the real part
//! of `omega1` is zero after [`validate`], and the hopping rate `j_hop` is the
//! natural unit. Cavity loss enters as a negative imaginary part of the cavity
//! detunings, so every downstream formula takes complex detunings unchanged.

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use num_complex::Complex64;

use crate::error::{DimerError, Result};

/// Parameters as read from a config file or the command line, before the
/// frame shift and loss substitution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RawParams {
    pub omega1: f64,
    pub omega2: f64,
    pub u1: f64,
    pub u2: f64,
    pub j_hop: f64,
    pub v1: f64,
    pub v2: f64,
    pub gamma_bath: f64,
}

impl RawParams {
    /// Symmetric dimer with both cavities at the frame origin.
    pub fn symmetric(u: f64, j_hop: f64, v_squared: f64) -> Self {
        let v = v_squared.sqrt();
        RawParams {
            omega1: 0.0,
            omega2: 0.0,
            u1: u,
            u2: u,
            j_hop,
            v1: v,
            v2: v,
            gamma_bath: 0.0,
        }
    }
}

impl Default for RawParams {
    fn default() -> Self {
        RawParams::symmetric(0.0, 1.0, 0.04)
    }
}

/// Validated dimer parameters in the rotating frame.
///
/// `omega1`/`omega2` are detunings from the bare frequency of cavity 1; their
/// imaginary parts are `-gamma_bath / 2` once loss has been applied.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DimerParams {
    pub omega1: Complex64,
    pub omega2: Complex64,
    pub u1: f64,
    pub u2: f64,
    pub j_hop: f64,
    pub v1: f64,
    pub v2: f64,
    pub gamma_bath: f64,
}

impl DimerParams {
    /// Shorthand for `validate(&RawParams::symmetric(..))`.
    pub fn symmetric(u: f64, j_hop: f64, v_squared: f64) -> Result<Self> {
        validate(&RawParams::symmetric(u, j_hop, v_squared))
    }

    pub fn with_u(mut self, u: f64) -> Self {
        self.u1 = u;
        self.u2 = u;
        self
    }

    pub fn is_symmetric(&self) -> bool {
        self.omega1 == self.omega2 && self.u1 == self.u2 && self.v1 == self.v2
    }
}

fn check_finite(field: &'static str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(DimerError::domain(field, "must be finite"))
    }
}

/// Checks physical domains, moves to the rotating frame of cavity 1 and
/// applies the raw bath loss rate.
pub fn validate(raw: &RawParams) -> Result<DimerParams> {
    for (name, x) in [
        ("omega1", raw.omega1),
        ("omega2", raw.omega2),
        ("u1", raw.u1),
        ("u2", raw.u2),
        ("j_hop", raw.j_hop),
        ("v1", raw.v1),
        ("v2", raw.v2),
        ("gamma_bath", raw.gamma_bath),
    ] {
        check_finite(name, x)?;
    }
    if raw.j_hop <= 0.0 {
        return Err(DimerError::domain("j_hop", "must be positive"));
    }
    if raw.v1 <= 0.0 {
        return Err(DimerError::domain("v1", "must be positive"));
    }
    if raw.v2 <= 0.0 {
        return Err(DimerError::domain("v2", "must be positive"));
    }
    let frame = raw.omega1;
    let lossless = DimerParams {
        omega1: Complex64::new(raw.omega1 - frame, 0.0),
        omega2: Complex64::new(raw.omega2 - frame, 0.0),
        u1: raw.u1,
        u2: raw.u2,
        j_hop: raw.j_hop,
        v1: raw.v1,
        v2: raw.v2,
        gamma_bath: 0.0,
    };
    apply_bath_loss(&lossless, raw.gamma_bath)
}

/// Adds Markovian loss into non-guided modes by shifting each cavity
/// detuning by `-i gamma_bath / 2`. Rates accumulate.
pub fn apply_bath_loss(params: &DimerParams, gamma_bath: f64) -> Result<DimerParams> {
    if !(gamma_bath >= 0.0) || !gamma_bath.is_finite() {
        return Err(DimerError::domain("gamma_bath", "must be non-negative"));
    }
    let shift = Complex64::new(0.0, -gamma_bath / 2.0);
    Ok(DimerParams {
        omega1: params.omega1 + shift,
        omega2: params.omega2 + shift,
        gamma_bath: params.gamma_bath + gamma_bath,
        ..*params
    })
}

/// Eigenstructure of the closed dimer (no waveguides, no loss) in the one-
/// and two-excitation manifolds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenSystem2Site {
    pub eps1_minus: f64,
    pub eps1_plus: f64,
    pub eps2_zero: f64,
    pub eps2_minus: f64,
    pub eps2_plus: f64,
    /// Amplitudes over the basis (|20>, |11>, |02>).
    pub vec2_zero: [f64; 3],
    pub vec2_minus: [f64; 3],
    pub vec2_plus: [f64; 3],
}

impl EigenSystem2Site {
    /// Two-excitation energies in ascending order.
    pub fn two_excitation_energies(&self) -> [f64; 3] {
        let mut e = [self.eps2_zero, self.eps2_minus, self.eps2_plus];
        e.sort_by(f64::total_cmp);
        e
    }
}

/// Single-excitation energies `(eps_minus, eps_plus)` of the closed dimer.
pub fn single_excitation_energies(params: &DimerParams) -> (f64, f64) {
    let w1 = params.omega1.re;
    let w2 = params.omega2.re;
    let mean = 0.5 * (w1 + w2);
    let split = (0.25 * (w1 - w2).powi(2) + params.j_hop.powi(2)).sqrt();
    (mean - split, mean + split)
}

/// Diagonalizes the 3x3 two-excitation block of the closed dimer Hamiltonian.
///
/// The eigenvector with the largest weight on `(|20> - |02>)/sqrt 2` is
/// labelled `zero`; the other two are `minus`/`plus` by energy.
pub fn two_excitation_eigensystem(params: &DimerParams) -> EigenSystem2Site {
    let w1 = params.omega1.re;
    let w2 = params.omega2.re;
    let c = std::f64::consts::SQRT_2 * params.j_hop;
    let h = Matrix3::new(
        2.0 * w1 + 2.0 * params.u1,
        c,
        0.0,
        c,
        w1 + w2,
        c,
        0.0,
        c,
        2.0 * w2 + 2.0 * params.u2,
    );
    let eig = SymmetricEigen::new(h);
    let mut states: Vec<(f64, Vector3<f64>)> = (0..3)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors.column(i).into_owned()))
        .collect();
    states.sort_by(|a, b| a.0.total_cmp(&b.0));

    let antisym = |v: &Vector3<f64>| (v[0] - v[2]).powi(2) / 2.0;
    let zero_idx = (0..3)
        .max_by(|&a, &b| antisym(&states[a].1).total_cmp(&antisym(&states[b].1)))
        .unwrap_or(0);
    let zero = states.remove(zero_idx);
    let (minus, plus) = (states[0], states[1]);

    // Sign convention: first nonzero component positive.
    let fix = |v: Vector3<f64>| {
        let lead = v.iter().copied().find(|x| x.abs() > 1e-12).unwrap_or(1.0);
        let v = if lead < 0.0 { -v } else { v };
        [v[0], v[1], v[2]]
    };
    let (eps1_minus, eps1_plus) = single_excitation_energies(params);
    EigenSystem2Site {
        eps1_minus,
        eps1_plus,
        eps2_zero: zero.0,
        eps2_minus: minus.0,
        eps2_plus: plus.0,
        vec2_zero: fix(zero.1),
        vec2_minus: fix(minus.1),
        vec2_plus: fix(plus.1),
    }
}

/// Total two-photon detunings at which the bound part of the S-matrix
/// resonates: pairs of single-excitation energies and the two-excitation
/// eigenenergies. Sorted ascending, near-duplicates (within 1e-9) merged.
pub fn resonant_delta_list(params: &DimerParams) -> Vec<f64> {
    let eig = two_excitation_eigensystem(params);
    let (em, ep) = (eig.eps1_minus, eig.eps1_plus);
    let mut out = vec![
        2.0 * em,
        em + ep,
        2.0 * ep,
        eig.eps2_zero,
        eig.eps2_minus,
        eig.eps2_plus,
    ];
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    out
}

/// Relative input detuning `dk = k1 - k2` that pins photon 2 on the lower
/// single-excitation level, `dk = delta - 2 eps1_minus`.
pub fn fully_resonant_dk(params: &DimerParams, delta: f64) -> f64 {
    let (em, _) = single_excitation_energies(params);
    delta - 2.0 * em
}

/// Splits a total detuning and a relative detuning into the two input
/// photon energies `(k1, k2) = ((delta + dk)/2, (delta - dk)/2)`.
pub fn photon_energies(delta: f64, dk: f64) -> (f64, f64) {
    (0.5 * (delta + dk), 0.5 * (delta - dk))
}
