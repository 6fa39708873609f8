//! Wavepacket-smeared observables of the scattered two-photon state.
//!
//! The delta functions of the S-matrix are integrated out analytically.
//! Because the decay constants depend only on the total energy `E`, the
//! bound part of every outgoing amplitude reduces to the shell integrals
//!
//! `beta(E) = int dq xi1(q) xi2(E - q) B(q, E - q)`
//!
//! evaluated once per node of an adaptive energy rule. Momentum amplitudes,
//! probabilities and position-space correlations are then sums over that
//! rule.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{DimerError, Result};
use crate::model::{fully_resonant_dk, single_excitation_energies, DimerParams};
use crate::quadrature::{integrate, integrate_complex, QuadOptions, QuadResult, Rule};
use crate::single_photon::scatter1;
use crate::two_photon::{
    bound_state_data, pole_structure, BoundCoefficients, Channel, Pair, PoleStructure,
};
use crate::wavepackets::{CoherentInput, PulseProfile, Shape, TwoPhotonInput};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative error estimate above which a smeared quantity is flagged.
pub const FLAG_REL_ERROR: f64 = 1e-4;

/// Floor on the transmitted intensity in the correlation denominator.
pub const FLUX_FLOOR: f64 = 1e-30;

/// Choice of the relative detuning `dk = k1 - k2` for a given total `delta`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DkMode {
    /// Photon 2 pinned on the lower single-excitation level.
    Resonant,
    /// Identical photons.
    Zero,
    Fixed(f64),
}

impl DkMode {
    pub fn resolve(self, params: &DimerParams, delta: f64) -> f64 {
        match self {
            DkMode::Resonant => fully_resonant_dk(params, delta),
            DkMode::Zero => 0.0,
            DkMode::Fixed(v) => v,
        }
    }
}

/// Accumulated quadrature error information.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diagnostics {
    /// Largest relative error estimate seen.
    pub rel_error: f64,
    pub evals: usize,
    pub converged: bool,
}

impl Default for Diagnostics {
    fn default() -> Self {
        Diagnostics {
            rel_error: 0.0,
            evals: 0,
            converged: true,
        }
    }
}

impl Diagnostics {
    fn absorb(&mut self, r: &QuadResult, scale: f64) {
        self.evals += r.evals;
        self.converged &= r.converged;
        let mag = r.value.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let rel = r.error / mag.max(scale);
        if rel.is_finite() {
            self.rel_error = self.rel_error.max(rel);
        }
    }

    fn merge(&mut self, other: &Diagnostics) {
        self.evals += other.evals;
        self.converged &= other.converged;
        self.rel_error = self.rel_error.max(other.rel_error);
    }

    /// True when the result should carry a quadrature warning.
    pub fn flagged(&self) -> bool {
        !self.converged || self.rel_error > FLAG_REL_ERROR
    }
}

fn inner_opts() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-13,
        rel_tol: 1e-9,
        max_segments: 2000,
        tail_scale: 1.0,
    }
}

fn resonance_points(params: &DimerParams) -> [f64; 2] {
    let (a, b) = single_excitation_energies(params);
    [a, b]
}

fn is_linear(params: &DimerParams) -> bool {
    params.u1 == 0.0 && params.u2 == 0.0
}

/// Energy-shell data of one wavepacket pair.
#[derive(Clone, Debug)]
pub struct OutputState {
    params: DimerParams,
    input: TwoPhotonInput,
    poles: PoleStructure,
    /// Total-energy rule and the shell integrals at its nodes.
    energies: Rule,
    beta: Vec<BoundCoefficients>,
    diagnostics: Diagnostics,
}

fn both_gaussian(input: &TwoPhotonInput) -> bool {
    input.xi1.shape == Shape::Gaussian && input.xi2.shape == Shape::Gaussian
}

/// Shell integral `beta(E)` and input energy density `rho(E)`.
fn shell_integral(
    params: &DimerParams,
    input: &TwoPhotonInput,
    e: f64,
) -> Result<(BoundCoefficients, f64, QuadResult)> {
    let (x1, x2) = (&input.xi1, &input.xi2);
    let linear = is_linear(params);
    let mut failure: Option<DimerError> = None;
    let integrand = |q: f64, out: &mut [Complex64]| {
        let w = x1.amplitude(q) * x2.amplitude(e - q);
        out[8] = Complex64::new(w.norm_sqr(), 0.0);
        if linear || w == ZERO {
            return;
        }
        match bound_state_data(params, q, e - q) {
            Ok(d) => {
                for (o, b) in out.iter_mut().zip(d.b.to_array()) {
                    *o = w * b;
                }
            }
            Err(err) => {
                failure.get_or_insert(err);
            }
        }
    };

    let center = 0.5 * (x1.k0 + e - x2.k0);
    let mut bps = vec![x1.k0, e - x2.k0, center];
    for r in resonance_points(params) {
        bps.push(r);
        bps.push(e - r);
    }
    let (lo, hi, opts) = if both_gaussian(input) {
        let w = 8.0 * x1.sigma.max(x2.sigma);
        let lo = (x1.k0 - 8.0 * x1.sigma)
            .max(e - x2.k0 - 8.0 * x2.sigma)
            .max(center - w);
        let hi = (x1.k0 + 8.0 * x1.sigma)
            .min(e - x2.k0 + 8.0 * x2.sigma)
            .min(center + w);
        (lo, hi.max(lo), inner_opts())
    } else {
        let s = x1.sigma.max(x2.sigma);
        for c in [x1.k0, e - x2.k0] {
            bps.extend([c - 40.0 * s, c - 4.0 * s, c + 4.0 * s, c + 40.0 * s]);
        }
        let opts = QuadOptions {
            tail_scale: 40.0 * s,
            ..inner_opts()
        };
        (f64::NEG_INFINITY, f64::INFINITY, opts)
    };
    let r = if hi > lo {
        integrate(integrand, 9, lo, hi, &bps, &opts)
    } else {
        integrate(|_, _| {}, 9, 0.0, 1.0, &[], &opts)
    };
    if let Some(err) = failure {
        return Err(err);
    }
    let beta = BoundCoefficients::from_slice(&r.value[..8]);
    let rho = r.value[8].re;
    Ok((beta, rho, r))
}

fn energy_window(input: &TwoPhotonInput) -> (f64, f64, Vec<f64>, f64) {
    let (x1, x2) = (&input.xi1, &input.xi2);
    let center = x1.k0 + x2.k0;
    if both_gaussian(input) {
        let w = 7.0 * (2.0 * (x1.sigma.powi(2) + x2.sigma.powi(2))).sqrt();
        (center - w, center + w, vec![center], 1.0)
    } else {
        let s = x1.sigma.max(x2.sigma);
        let bps = vec![
            center - 40.0 * s,
            center - 4.0 * s,
            center,
            center + 4.0 * s,
            center + 40.0 * s,
        ];
        (f64::NEG_INFINITY, f64::INFINITY, bps, 40.0 * s)
    }
}

impl OutputState {
    /// Builds the total-energy rule for `input` and the shell integrals at
    /// its nodes.
    pub fn new(params: &DimerParams, input: &TwoPhotonInput) -> Result<Self> {
        let (lo, hi, bps, tail) = energy_window(input);
        let center = input.xi1.k0 + input.xi2.k0;
        let (b0, rho0, _) = shell_integral(params, input, center)?;
        let b0_scale = b0.to_array().iter().map(|b| b.norm_sqr()).sum::<f64>();
        // Inner errors are judged against the size of the central shell.
        let inner_scale = b0_scale.sqrt().max(rho0).max(1e-12);
        let weight = if b0_scale > 1e-300 {
            1.0 / b0_scale
        } else {
            0.0
        };

        let mut cache: HashMap<u64, BoundCoefficients> = HashMap::new();
        let mut diag = Diagnostics::default();
        let mut failure: Option<DimerError> = None;
        let opts = QuadOptions {
            abs_tol: 1e-12,
            rel_tol: 1e-8,
            max_segments: 400,
            tail_scale: tail,
        };
        let r = integrate(
            |e, out| match shell_integral(params, input, e) {
                Ok((beta, rho, inner)) => {
                    let b2: f64 = beta.to_array().iter().map(|b| b.norm_sqr()).sum();
                    out[0] = Complex64::new(rho, 0.0);
                    out[1] = Complex64::new(b2 * weight, 0.0);
                    diag.absorb(&inner, inner_scale);
                    cache.insert(e.to_bits(), beta);
                }
                Err(err) => {
                    failure.get_or_insert(err);
                }
            },
            2,
            lo,
            hi,
            &bps,
            &opts,
        );
        if let Some(err) = failure {
            return Err(err);
        }
        diag.absorb(&r, 1e-12);
        let energies = r.into_rule();
        let mut beta = Vec::with_capacity(energies.len());
        for &e in &energies.nodes {
            let b = match cache.get(&e.to_bits()) {
                Some(b) => *b,
                None => shell_integral(params, input, e)?.0,
            };
            beta.push(b);
        }
        Ok(OutputState {
            params: *params,
            input: *input,
            poles: pole_structure(params),
            energies,
            beta,
            diagnostics: diag,
        })
    }

    pub fn input(&self) -> &TwoPhotonInput {
        &self.input
    }

    pub fn diagnostics(&self) -> Diagnostics {
        self.diagnostics
    }

    /// Number of nodes in the total-energy rule.
    pub fn energy_nodes(&self) -> usize {
        self.energies.len()
    }

    fn lambda(&self, e: f64) -> Pair {
        self.poles.lambda(e)
    }

    fn pair_sum(&self, p1: f64, p2: f64) -> Complex64 {
        let (x1, x2) = (&self.input.xi1, &self.input.xi2);
        x1.amplitude(p1) * x2.amplitude(p2) + x1.amplitude(p2) * x2.amplitude(p1)
    }

    /// Unnormalized bound amplitudes `[LL, LR, RR]` on the shell `E = p1 + p2`
    /// given the shell integral `beta(E)`.
    fn bound_terms(&self, beta: &BoundCoefficients, p1: f64, p2: f64) -> [Complex64; 3] {
        let lam = self.lambda(p1 + p2);
        crate::two_photon::shell_terms(beta, &lam, p1, p2)
    }

    /// Unnormalized outgoing amplitudes `[LL, LR, RR]` at `(p1, p2)` for a
    /// given shell integral.
    fn amplitudes_with(&self, beta: &BoundCoefficients, p1: f64, p2: f64) -> [Complex64; 3] {
        let s1 = scatter1(&self.params, p1);
        let s2 = scatter1(&self.params, p2);
        let w = self.pair_sum(p1, p2);
        let bound = self.bound_terms(beta, p1, p2);
        [
            s1.r * s2.r * w + bound[0],
            s1.r * s2.t * w + bound[1],
            s1.t * s2.t * w + bound[2],
        ]
    }

    /// Normalized outgoing momentum amplitude `<p1 p2|out>` in `channel`.
    /// For `LR`, `p1` is the reflected photon.
    pub fn momentum(&self, channel: Channel, p1: f64, p2: f64) -> Result<Complex64> {
        let (beta, _, _) = shell_integral(&self.params, &self.input, p1 + p2)?;
        let a = self.amplitudes_with(&beta, p1, p2);
        Ok(a[channel_index(channel)] / self.input.m2.sqrt())
    }

    /// Channel probabilities from `int dE int dp1 |<p1, E - p1|out>|^2`.
    pub fn probabilities(&self) -> ChannelProbabilities {
        let mut diag = self.diagnostics;
        let mut acc = [0.0; 3];
        let mut abs_err = 0.0;
        let [em, ep] = resonance_points(&self.params);
        let dk = self.input.xi1.k0 - self.input.xi2.k0;
        let s = self.input.xi1.sigma.max(self.input.xi2.sigma);
        let opts = QuadOptions {
            abs_tol: 1e-11,
            rel_tol: 1e-8,
            max_segments: 2000,
            tail_scale: 1.0,
        };
        for (i, &e) in self.energies.nodes.iter().enumerate() {
            let w_e = self.energies.weights[i];
            let beta = &self.beta[i];
            let mut bps = vec![0.5 * (e + dk), 0.5 * (e - dk), em, ep, e - em, e - ep];
            for off in self.poles.offset {
                bps.push(off.re);
                bps.push(e - off.re);
            }
            for c in [0.5 * (e + dk), 0.5 * (e - dk)] {
                bps.extend([c - 4.0 * s, c + 4.0 * s]);
            }
            let r = integrate(
                |p1, out| {
                    let a = self.amplitudes_with(beta, p1, e - p1);
                    for c in 0..3 {
                        out[c] = Complex64::new(a[c].norm_sqr(), 0.0);
                    }
                },
                3,
                f64::NEG_INFINITY,
                f64::INFINITY,
                &bps,
                &opts,
            );
            diag.evals += r.evals;
            diag.converged &= r.converged;
            abs_err += w_e.abs() * r.error;
            for c in 0..3 {
                acc[c] += w_e * r.value[c].re;
            }
        }
        let total = acc.iter().sum::<f64>();
        if total > 0.0 {
            diag.rel_error = diag.rel_error.max(abs_err / total);
        }
        let m2 = self.input.m2;
        let p_ll = 0.5 * acc[0] / m2;
        let p_lr = acc[1] / m2;
        let p_rr = 0.5 * acc[2] / m2;
        ChannelProbabilities {
            p_ll,
            p_lr,
            p_rr,
            flux_total: p_ll + p_lr + p_rr,
            diagnostics: diag,
        }
    }

    /// `T_j(z) = (1/sqrt(2 pi)) int dk xi_j(k) t_k e^{ikz}` for both photons.
    fn transmitted_envelopes(&self, z: f64, diag: &mut Diagnostics) -> [Complex64; 2] {
        let opts = QuadOptions {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            ..Default::default()
        };
        let mut out = [ZERO; 2];
        for (j, xi) in [self.input.xi1, self.input.xi2].iter().enumerate() {
            let r = transmitted_envelope(&self.params, xi, z, &opts);
            diag.absorb(&r, 1e-12);
            out[j] = r.value[0] / (2.0 * PI).sqrt();
        }
        out
    }

    /// Unnormalized transmitted pair amplitude at `(z1, z2)` just past the
    /// output coupling point: the Fourier transform of the RR momentum
    /// amplitude. The eigenstate convention carries an extra `1/sqrt 2`.
    pub fn transmitted_pair(&self, z1: f64, z2: f64) -> (Complex64, Diagnostics) {
        let mut diag = Diagnostics::default();
        let t1 = self.transmitted_envelopes(z1, &mut diag);
        let t2 = self.transmitted_envelopes(z2, &mut diag);
        let direct = t1[0] * t2[1] + t1[1] * t2[0];
        let near = z1.min(z2);
        let sep = (z1 - z2).abs();
        let mut bound = ZERO;
        for (i, &e) in self.energies.nodes.iter().enumerate() {
            let lam = self.lambda(e);
            let b = &self.beta[i].rr;
            let tail = b[0] * (-I * lam[0] * sep).exp() + b[1] * (-I * lam[1] * sep).exp();
            bound += self.energies.weights[i] * (I * e * near).exp() * tail;
        }
        (direct + bound / (2.0 * PI), diag)
    }

    /// `F_s(p1, z) = (1/sqrt(2 pi)) int dp2 e^{i p2 z} A_s(p1, p2)` for the
    /// LR and RR channels (unnormalized).
    fn mixed_amplitudes(&self, p1: f64, z: f64, tz: &[Complex64; 2]) -> [Complex64; 2] {
        let s1 = scatter1(&self.params, p1);
        let (x1, x2) = (&self.input.xi1, &self.input.xi2);
        let env = x1.amplitude(p1) * tz[1] + x2.amplitude(p1) * tz[0];
        let mut lr = s1.r * env;
        let mut rr = s1.t * env;
        let mut bl = ZERO;
        let mut br = ZERO;
        for (i, &e) in self.energies.nodes.iter().enumerate() {
            let p2 = e - p1;
            let lam = self.lambda(e);
            let beta = &self.beta[i];
            let phase = self.energies.weights[i] * (I * p2 * z).exp();
            let mut l = ZERO;
            let mut r = ZERO;
            for n in 0..2 {
                let h1 = -I / (lam[n] + p1);
                let h2 = -I / (lam[n] + p2);
                l += beta.lr1[n] * h2 + beta.lr2[n] * h1;
                r += beta.rr[n] * (h1 + h2);
            }
            bl += phase * l;
            br += phase * r;
        }
        let k = 1.0 / ((2.0 * PI).sqrt() * 2.0 * PI);
        lr += k * bl;
        rr += k * br;
        [lr, rr]
    }

    /// `int dx (|Phi_LR(x, z)|^2 + |Phi_RR(x, z)|^2)` over the whole line of
    /// the outgoing state, evaluated in momentum space.
    fn transmitted_density(&self, z: f64, diag: &mut Diagnostics) -> f64 {
        let tz = self.transmitted_envelopes(z, diag);
        let [em, ep] = resonance_points(&self.params);
        let center = self.input.xi1.k0 + self.input.xi2.k0;
        let mut bps = vec![self.input.xi1.k0, self.input.xi2.k0, em, ep];
        for off in self.poles.offset {
            bps.push(off.re);
            bps.push(center - off.re);
        }
        let s = self.input.xi1.sigma.max(self.input.xi2.sigma);
        for c in [self.input.xi1.k0, self.input.xi2.k0] {
            bps.extend([c - 4.0 * s, c + 4.0 * s]);
        }
        let opts = QuadOptions {
            abs_tol: 1e-13,
            rel_tol: 1e-8,
            max_segments: 2000,
            tail_scale: 1.0,
        };
        let r = integrate_complex(
            |p1| {
                let [lr, rr] = self.mixed_amplitudes(p1, z, &tz);
                Complex64::new(lr.norm_sqr() + rr.norm_sqr(), 0.0)
            },
            f64::NEG_INFINITY,
            f64::INFINITY,
            &bps,
            &opts,
        );
        diag.absorb(&r, 1e-30);
        r.value[0].re
    }

    /// Second-order correlation of the transmitted light at `(z1, z2)`.
    pub fn g2_transmitted(&self, z1: f64, z2: f64) -> Result<Correlation> {
        let mut diag = self.diagnostics;
        let (pair, d) = self.transmitted_pair(z1, z2);
        diag.merge(&d);
        let d1 = self.transmitted_density(z1, &mut diag);
        let d2 = if z2 == z1 {
            d1
        } else {
            self.transmitted_density(z2, &mut diag)
        };
        let den = d1 * d2 / self.input.m2;
        if !(den > FLUX_FLOOR) {
            return Err(DimerError::NoFlux(den));
        }
        Ok(Correlation {
            value: pair.norm_sqr() / den,
            diagnostics: diag,
        })
    }
}

fn channel_index(c: Channel) -> usize {
    match c {
        Channel::LL => 0,
        Channel::LR => 1,
        Channel::RR => 2,
    }
}

fn transmitted_envelope(
    params: &DimerParams,
    xi: &PulseProfile,
    z: f64,
    opts: &QuadOptions,
) -> QuadResult {
    xi.integrate(
        |k| xi.amplitude(k) * scatter1(params, k).t * (I * k * z).exp(),
        opts,
    )
}

/// Scattering probabilities into the three output channel pairs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelProbabilities {
    pub p_ll: f64,
    pub p_lr: f64,
    pub p_rr: f64,
    pub flux_total: f64,
    pub diagnostics: Diagnostics,
}

/// A correlation value with its quadrature record.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Correlation {
    pub value: f64,
    pub diagnostics: Diagnostics,
}

/// Wavepacket-smeared eigenstate amplitude at one position pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmearedAmplitude {
    pub channel: Channel,
    pub z1: f64,
    pub z2: f64,
    pub value: Complex64,
    /// Absolute error estimate of `value`.
    pub error: f64,
    pub diagnostics: Diagnostics,
}

/// Normalized outgoing amplitude `<p1 p2|out>` in `channel`.
pub fn output_amplitude_momentum(
    params: &DimerParams,
    input: &TwoPhotonInput,
    channel: Channel,
    p1: f64,
    p2: f64,
) -> Result<Complex64> {
    let (beta, _, r) = shell_integral(params, input, p1 + p2)?;
    r.require_converged("shell integral")?;
    let state = OutputState {
        params: *params,
        input: *input,
        poles: pole_structure(params),
        energies: Rule::default(),
        beta: Vec::new(),
        diagnostics: Diagnostics::default(),
    };
    let a = state.amplitudes_with(&beta, p1, p2);
    Ok(a[channel_index(channel)] / input.m2.sqrt())
}

pub fn scattering_probabilities(
    params: &DimerParams,
    input: &TwoPhotonInput,
) -> Result<ChannelProbabilities> {
    Ok(OutputState::new(params, input)?.probabilities())
}

/// `int dk1 dk2 xi1(k1) xi2(k2) phi_channel(z1, z2; k1, k2)` by direct
/// two-dimensional quadrature of the eigenstates.
pub fn smeared_wavefunction_position(
    params: &DimerParams,
    input: &TwoPhotonInput,
    channel: Channel,
    z1: f64,
    z2: f64,
) -> Result<SmearedAmplitude> {
    let (x1, x2) = (&input.xi1, &input.xi2);
    let opts = QuadOptions {
        abs_tol: 1e-12,
        rel_tol: 1e-7,
        max_segments: 300,
        tail_scale: 1.0,
    };
    // The inner rule must be quieter than the outer tolerance.
    let inner_opts = QuadOptions {
        abs_tol: 1e-15,
        rel_tol: 1e-10,
        ..opts
    };
    let mut diag = Diagnostics::default();
    let mut failure: Option<DimerError> = None;
    let outer = x1.integrate(
        |k1| {
            let inner = x2.integrate(
                |k2| match bound_state_data(params, k1, k2) {
                    Ok(d) => x2.amplitude(k2) * d.wavefunction(channel, z1, z2),
                    Err(e) => {
                        failure.get_or_insert(e);
                        ZERO
                    }
                },
                &inner_opts,
            );
            diag.absorb(&inner, 1e-12);
            x1.amplitude(k1) * inner.value[0]
        },
        &opts,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    diag.absorb(&outer, 1e-12);
    Ok(SmearedAmplitude {
        channel,
        z1,
        z2,
        value: outer.value[0],
        error: outer.error,
        diagnostics: diag,
    })
}

/// Zero-delay (or general `(z1, z2)`) correlation of the transmitted light
/// for a two-photon Fock input.
pub fn g2_transmitted(
    params: &DimerParams,
    input: &TwoPhotonInput,
    z1: f64,
    z2: f64,
) -> Result<Correlation> {
    OutputState::new(params, input)?.g2_transmitted(z1, z2)
}

/// Correlation of the transmitted light for a weak coherent input, from its
/// one- and two-photon components.
pub fn g2_coherent(
    params: &DimerParams,
    coh: &CoherentInput,
    z1: f64,
    z2: f64,
) -> Result<Correlation> {
    if coh.nbar > 0.01 {
        return Err(DimerError::domain(
            "nbar",
            "must be at most 0.01 for the weak-field expansion",
        ));
    }
    let state = OutputState::new(params, &coh.photon_pair())?;
    let mut diag = state.diagnostics;
    let (pair, d) = state.transmitted_pair(z1, z2);
    diag.merge(&d);
    let opts = QuadOptions {
        abs_tol: 1e-12,
        rel_tol: 1e-10,
        ..Default::default()
    };
    let mut single = |z: f64| {
        let r = transmitted_envelope(params, &coh.profile, z, &opts);
        diag.absorb(&r, 1e-12);
        r.value[0].norm_sqr() / (2.0 * PI)
    };
    let s1 = single(z1);
    let s2 = if z2 == z1 { s1 } else { single(z2) };
    let den = 4.0 * (-coh.nbar).exp() * s1 * s2;
    if !(den > FLUX_FLOOR) {
        return Err(DimerError::NoFlux(den));
    }
    Ok(Correlation {
        value: pair.norm_sqr() / den,
        diagnostics: diag,
    })
}

/// Integration box for [`bound_weight`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundWeightBox {
    pub dk_max: f64,
    pub dp_max: f64,
}

impl Default for BoundWeightBox {
    fn default() -> Self {
        BoundWeightBox {
            dk_max: 8.0,
            dp_max: 8.0,
        }
    }
}

/// `int ddk ddp |S_RR|^2` over the box at total detuning `delta`, where
/// `(k1, k2) = ((delta + dk)/2, (delta - dk)/2)` and likewise for `p`.
pub fn bound_weight(
    params: &DimerParams,
    delta: f64,
    bx: &BoundWeightBox,
) -> Result<(f64, Diagnostics)> {
    let mut diag = Diagnostics::default();
    if is_linear(params) {
        return Ok((0.0, diag));
    }
    let poles = pole_structure(params);
    let lam = poles.lambda(delta);
    let [em, ep] = resonance_points(params);
    let opts = QuadOptions {
        abs_tol: 1e-14,
        rel_tol: 1e-9,
        max_segments: 4000,
        tail_scale: 1.0,
    };

    // dk where either photon hits a single-excitation level.
    let dk_bps: Vec<f64> = [em, ep]
        .iter()
        .flat_map(|&r| [2.0 * r - delta, delta - 2.0 * r])
        .chain([0.0])
        .collect();
    let mut failure: Option<DimerError> = None;
    let kr = integrate(
        |dk, out| {
            let (k1, k2) = (0.5 * (delta + dk), 0.5 * (delta - dk));
            match bound_state_data(params, k1, k2) {
                Ok(d) => {
                    let b = d.b.rr;
                    out[0] = b[0] * b[0].conj();
                    out[1] = b[0] * b[1].conj();
                    out[2] = b[1] * b[1].conj();
                }
                Err(e) => {
                    failure.get_or_insert(e);
                }
            }
        },
        3,
        -bx.dk_max,
        bx.dk_max,
        &dk_bps,
        &opts,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    diag.absorb(&kr, 1e-300);

    let dp_bps: Vec<f64> = lam
        .iter()
        .flat_map(|l| [-2.0 * l.re - delta, delta + 2.0 * l.re])
        .chain([0.0])
        .collect();
    let pr = integrate(
        |dp, out| {
            let (p1, p2) = (0.5 * (delta + dp), 0.5 * (delta - dp));
            let h = |n: usize| -I / (lam[n] + p2) - I / (lam[n] + p1);
            let (h0, h1) = (h(0), h(1));
            out[0] = h0 * h0.conj();
            out[1] = h0 * h1.conj();
            out[2] = h1 * h1.conj();
        },
        3,
        -bx.dp_max,
        bx.dp_max,
        &dp_bps,
        &opts,
    );
    diag.absorb(&pr, 1e-300);

    let (k, p) = (&kr.value, &pr.value);
    let total = k[0] * p[0] + k[2] * p[2] + 2.0 * (k[1] * p[1]).re;
    Ok((total.re / (4.0 * PI * PI), diag))
}

/// `(|e11|, |e12|, |e22|)` of the two-photon eigenstate at total detuning
/// `delta` and splitting `dk`.
pub fn excitation_amplitudes(params: &DimerParams, delta: f64, dk: f64) -> Result<(f64, f64, f64)> {
    let d = bound_state_data(params, 0.5 * (delta + dk), 0.5 * (delta - dk))?;
    Ok((d.e11.norm(), d.e12.norm(), d.e22.norm()))
}

/// Eigenstate projection `|<v|e>|` of the doubly-excited cavity amplitudes
/// onto a normalized two-excitation vector over `(|20>, |11>, |02>)`.
pub fn eigenstate_overlap(params: &DimerParams, delta: f64, dk: f64, v: &[f64; 3]) -> Result<f64> {
    let d = bound_state_data(params, 0.5 * (delta + dk), 0.5 * (delta - dk))?;
    Ok((v[0] * d.e11 + v[1] * d.e12 + v[2] * d.e22).norm())
}
