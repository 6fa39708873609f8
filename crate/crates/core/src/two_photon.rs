//! Two-photon scattering eigenstates of the waveguide-coupled dimer.
//!
//! For a pair of incident momenta `(k1, k2)` in the left waveguide the
//! eigenstate is built from plane waves (independent single-photon
//! scattering) plus "bound" pieces that decay exponentially with the photon
//! separation and only exist when the cavities are nonlinear. The decay
//! constants `lambda_-`, `lambda_+` are the eigenvalues of the damped
//! single-excitation block shifted by the total energy; the bound amplitudes
//! `B` follow from matching the cavity amplitudes across the coupling
//! points.
//!
//! The S-matrix splits into delta-pairing terms, which are products of
//! single-photon coefficients, and a smooth function on the energy shell
//! `p1 + p2 = k1 + k2` built from the `B`'s and `lambda`'s.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use crate::error::{DimerError, Result};
use crate::model::DimerParams;
use crate::single_photon::scatter1_complex;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Condition estimate above which the two-excitation amplitudes are
/// considered numerically meaningless.
const MAX_ETA_CONDITION: f64 = 1e13;

/// Output waveguide pair of the two scattered photons. For `LR` the first
/// coordinate is the reflected (left) photon, the second the transmitted one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Channel {
    LL,
    LR,
    RR,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::LL, Channel::LR, Channel::RR];

    pub fn name(self) -> &'static str {
        match self {
            Channel::LL => "LL",
            Channel::LR => "LR",
            Channel::RR => "RR",
        }
    }
}

/// Pair of coefficients attached to the two decay constants `lambda_-`,
/// `lambda_+` (in that order).
pub type Pair = [Complex64; 2];

/// Bound-state coefficients of the outgoing amplitudes. Each entry is the
/// `[minus, plus]` pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundCoefficients {
    pub ll: Pair,
    /// Left photon emitted last (`x < y` region of the LR amplitude).
    pub lr1: Pair,
    /// Right photon emitted last (`y < x` region).
    pub lr2: Pair,
    pub rr: Pair,
}

impl BoundCoefficients {
    pub fn zero() -> Self {
        BoundCoefficients {
            ll: [ZERO; 2],
            lr1: [ZERO; 2],
            lr2: [ZERO; 2],
            rr: [ZERO; 2],
        }
    }

    pub fn max_norm(&self) -> f64 {
        self.ll
            .iter()
            .chain(&self.lr1)
            .chain(&self.lr2)
            .chain(&self.rr)
            .map(|b| b.norm())
            .fold(0.0, f64::max)
    }

    pub(crate) fn to_array(self) -> [Complex64; 8] {
        let [a, b] = self.ll;
        let [c, d] = self.lr1;
        let [e, f] = self.lr2;
        let [g, h] = self.rr;
        [a, b, c, d, e, f, g, h]
    }

    pub(crate) fn from_slice(v: &[Complex64]) -> Self {
        BoundCoefficients {
            ll: [v[0], v[1]],
            lr1: [v[2], v[3]],
            lr2: [v[4], v[5]],
            rr: [v[6], v[7]],
        }
    }
}

/// Interaction data of the two-photon eigenstate at fixed input momenta.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundStateData {
    pub k1: f64,
    pub k2: f64,
    /// Total energy `k1 + k2` (complex so lossy continuations share a type).
    pub e2: Complex64,
    pub a: Complex64,
    pub m_minus: Complex64,
    pub m_plus: Complex64,
    pub lambda_minus: Complex64,
    pub lambda_plus: Complex64,
    /// `[chi_L1k1, chi_L1k2, chi_L2k1, chi_L2k2]`; `chi_.kj` is the cavity
    /// response while photon `j` is absorbed (a function of `kj` on the shell).
    pub chi: [Complex64; 4],
    /// Two-photon cavity amplitudes on `|20>`, `|11>`, `|02>`.
    pub e11: Complex64,
    pub e12: Complex64,
    pub e22: Complex64,
    pub c_l: Pair,
    pub c_r: Pair,
    pub b: BoundCoefficients,
    /// Single-photon coefficients at `k1` and `k2`.
    pub r: [Complex64; 2],
    pub t: [Complex64; 2],
    /// Largest term over `|eta|` in the two-excitation solve.
    pub eta_condition: f64,
}

/// Energy-independent parts of the decay constants and eigenvector ratios.
#[derive(Clone, Copy, Debug)]
pub(crate) struct PoleStructure {
    pub a: Complex64,
    pub m: Pair,
    /// `lambda_mp = offset_mp - E`.
    pub offset: Pair,
}

pub(crate) fn pole_structure(p: &DimerParams) -> PoleStructure {
    let (j, v1, v2) = (p.j_hop, p.v1, p.v2);
    let (v1s, v2s) = (v1 * v1, v2 * v2);
    let asym = v1s - v2s + 2.0 * I * (p.omega1 - p.omega2);
    let root = (16.0 * j * j - asym * asym).sqrt();
    let a = 2.0 * SQRT_2 * v1 * j / root;
    let split = 2.0 * SQRT_2 * v1 * j / a;
    let m_base = -I * v1s + I * v2s + 2.0 * (p.omega1 - p.omega2);
    let l_base = -I * v1s - I * v2s + 2.0 * (p.omega1 + p.omega2);
    PoleStructure {
        a,
        m: [(m_base - split) / (4.0 * j), (m_base + split) / (4.0 * j)],
        offset: [(l_base - split) / 4.0, (l_base + split) / 4.0],
    }
}

impl PoleStructure {
    pub fn lambda(&self, e: f64) -> Pair {
        [self.offset[0] - e, self.offset[1] - e]
    }
}

/// Evaluates every coefficient of the two-photon scattering eigenstate with
/// incident momenta `(k1, k2)`.
pub fn bound_state_data(params: &DimerParams, k1: f64, k2: f64) -> Result<BoundStateData> {
    let p = params;
    let (j, v1, v2) = (p.j_hop, p.v1, p.v2);
    let (v1s, v2s) = (v1 * v1, v2 * v2);
    let (u1, u2) = (p.u1, p.u2);
    let (w1, w2) = (p.omega1, p.omega2);
    let e = k1 + k2;
    let ec = Complex64::new(e, 0.0);

    let poles = pole_structure(p);
    let a = poles.a;
    let [m_minus, m_plus] = poles.m;
    let [l_minus, l_plus] = poles.lambda(e);

    let chi_of = |k: f64| -> (Complex64, Complex64) {
        let dm = k + l_minus;
        let dp = k + l_plus;
        (a * (m_minus / dm - m_plus / dp), a * (1.0 / dm - 1.0 / dp))
    };
    // On the shell k2 + lambda = offset - k1, so chi_of(k2) is the k1 response.
    let (chi_l1k1, chi_l2k1) = chi_of(k2);
    let (chi_l1k2, chi_l2k2) = chi_of(k1);

    let pref = 1.0 / (SQRT_2 * 2.0 * PI);
    let phi_l1_0m = pref * (chi_l1k2 + chi_l1k1);
    let phi_l2_0m = pref * (chi_l2k2 + chi_l2k1);

    let f1 = 2.0 * I * u1 + v1s - I * ec + 2.0 * I * w1;
    let f2 = 2.0 * u2 - I * v2s - ec + 2.0 * w2;
    let g = v1s + v2s - 2.0 * I * (ec - w1 - w2);
    let h = j * j * (8.0 * u1 + 8.0 * u2 - 4.0 * I * v1s - 4.0 * I * v2s + 8.0 * (-ec + w1 + w2));
    let eta = f1 * g * f2 + h;
    let eta_condition = (f1 * g * f2).norm().max(h.norm()) / eta.norm();
    if !eta.is_finite() || eta.norm() == 0.0 || !(eta_condition < MAX_ETA_CONDITION) {
        return Err(DimerError::Degeneracy(format!(
            "two-excitation denominator eta = {eta} at (k1, k2) = ({k1}, {k2})"
        )));
    }

    // Overall sign fixed against a direct solve of the two-excitation
    // cavity equations; the other two amplitudes are used as written.
    let d1 = 2.0 * I * u2 + v2s - I * ec + 2.0 * I * w2;
    let e11 =
        -SQRT_2 * v1 * (4.0 * j * j * phi_l1_0m + phi_l1_0m * g * d1 + 2.0 * j * phi_l2_0m * f2)
            / eta;
    let common = 2.0 * j * phi_l1_0m + phi_l2_0m * (-2.0 * u1 + I * v1s + ec - 2.0 * w1);
    let e12 = 2.0 * v1 * common * (-2.0 * u2 + I * v2s + ec - 2.0 * w2) / eta;
    let e22 = 2.0 * SQRT_2 * j * v1 * common / eta;

    let phi_l1_0p = phi_l1_0m - I * v1 * e11 * SQRT_2;
    let phi_l2_0p = phi_l2_0m - I * v1 * e12;
    let phi_r1_0p = -I * v2 * e12;
    let phi_r2_0p = -I * v2 * e22 * SQRT_2;

    let s1 = scatter1_complex(p, Complex64::new(k1, 0.0));
    let s2 = scatter1_complex(p, Complex64::new(k2, 0.0));
    let (r1, r2, t1, t2) = (s1.r, s2.r, s1.t, s2.t);

    let scale = 2.0 * PI / v1;
    let lam = [l_minus, l_plus];
    let m_other = [m_plus, m_minus];
    let sign = [1.0, -1.0];
    let mut c_l = [ZERO; 2];
    let mut c_r = [ZERO; 2];
    for n in 0..2 {
        let (d1, d2) = (k1 + lam[n], k2 + lam[n]);
        c_l[n] = sign[n] * a * (scale * (m_other[n] * phi_l2_0p - phi_l1_0p) - r1 / d1 - r2 / d2);
        c_r[n] = sign[n] * a * (scale * (m_other[n] * phi_r2_0p - phi_r1_0p) - t1 / d1 - t2 / d2);
    }

    let m = [m_minus, m_plus];
    let k_l = -I * v1 / SQRT_2;
    let k_r = -I * v2 / SQRT_2;
    let b = BoundCoefficients {
        ll: [k_l * m[0] * c_l[0], k_l * m[1] * c_l[1]],
        lr1: [k_l * m[0] * c_r[0], k_l * m[1] * c_r[1]],
        lr2: [k_r * c_l[0], k_r * c_l[1]],
        rr: [k_r * c_r[0], k_r * c_r[1]],
    };

    Ok(BoundStateData {
        k1,
        k2,
        e2: ec,
        a,
        m_minus,
        m_plus,
        lambda_minus: l_minus,
        lambda_plus: l_plus,
        chi: [chi_l1k1, chi_l1k2, chi_l2k1, chi_l2k2],
        e11,
        e12,
        e22,
        c_l,
        c_r,
        b,
        r: [r1, r2],
        t: [t1, t2],
        eta_condition,
    })
}

/// Smooth prefactors of `delta(k1 + k2 - p1 - p2)` for the three channels,
/// given the `B`'s and decay constants of one energy shell.
pub(crate) fn shell_terms(b: &BoundCoefficients, lam: &Pair, p1: f64, p2: f64) -> [Complex64; 3] {
    let pole = |n: usize, p: f64| -I / (lam[n] + p);
    let mut ll = ZERO;
    let mut lr = ZERO;
    let mut rr = ZERO;
    for n in 0..2 {
        let (h1, h2) = (pole(n, p1), pole(n, p2));
        ll += b.ll[n] * (h2 + h1);
        rr += b.rr[n] * (h2 + h1);
        lr += b.lr1[n] * h2 + b.lr2[n] * h1;
    }
    let s = 1.0 / (2.0 * PI);
    [s * ll, s * lr, s * rr]
}

fn check_shell(k1: f64, k2: f64, p1: f64, p2: f64) -> Result<()> {
    let e_in = k1 + k2;
    let e_out = p1 + p2;
    if (e_in - e_out).abs() > 1e-9 * e_in.abs().max(1.0) {
        return Err(DimerError::Contract(format!(
            "off-shell momenta: k1 + k2 = {e_in}, p1 + p2 = {e_out}"
        )));
    }
    Ok(())
}

/// Bound (energy-shell) parts `(S_LL, S_RR, S_LR)` of the two-photon
/// S-matrix. Requires `p1 + p2 = k1 + k2`.
pub fn s_bound(
    params: &DimerParams,
    k1: f64,
    k2: f64,
    p1: f64,
    p2: f64,
) -> Result<(Complex64, Complex64, Complex64)> {
    check_shell(k1, k2, p1, p2)?;
    let d = bound_state_data(params, k1, k2)?;
    let [ll, lr, rr] = shell_terms(&d.b, &[d.lambda_minus, d.lambda_plus], p1, p2);
    Ok((ll, rr, lr))
}

/// One channel of the two-photon S-matrix between momenta `(k1, k2)` and
/// `(p1, p2)`, kept in distributional form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SMatrixElement {
    pub channel: Channel,
    pub k1: f64,
    pub k2: f64,
    /// Coefficients of `delta(k1 - p1) delta(k2 - p2)` and
    /// `delta(k1 - p2) delta(k2 - p1)`.
    pub direct: [Complex64; 2],
    b: BoundCoefficients,
    lambda: Pair,
}

impl SMatrixElement {
    /// Prefactor of `delta(k1 + k2 - p1 - p2)`.
    pub fn bound(&self, p1: f64, p2: f64) -> Result<Complex64> {
        check_shell(self.k1, self.k2, p1, p2)?;
        let [ll, lr, rr] = shell_terms(&self.b, &self.lambda, p1, p2);
        Ok(match self.channel {
            Channel::LL => ll,
            Channel::LR => lr,
            Channel::RR => rr,
        })
    }
}

pub fn smatrix_element(
    params: &DimerParams,
    channel: Channel,
    k1: f64,
    k2: f64,
) -> Result<SMatrixElement> {
    let d = bound_state_data(params, k1, k2)?;
    let [r1, r2] = d.r;
    let [t1, t2] = d.t;
    let direct = match channel {
        Channel::LL => [r1 * r2, r2 * r1],
        Channel::LR => [r1 * t2, r2 * t1],
        Channel::RR => [t1 * t2, t2 * t1],
    };
    Ok(SMatrixElement {
        channel,
        k1,
        k2,
        direct,
        b: d.b,
        lambda: [d.lambda_minus, d.lambda_plus],
    })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Side {
    Neg,
    Pos,
}

fn sides(z: f64) -> &'static [(Side, f64)] {
    if z < 0.0 {
        &[(Side::Neg, 1.0)]
    } else if z > 0.0 {
        &[(Side::Pos, 1.0)]
    } else {
        &[(Side::Neg, 0.5), (Side::Pos, 0.5)]
    }
}

impl BoundStateData {
    fn bound_tail(&self, pair: &Pair, near: f64, far: f64) -> Complex64 {
        // `near` is the coordinate of the photon emitted last.
        let lam = [self.lambda_minus, self.lambda_plus];
        let sep = far - near;
        let base = (I * self.e2 * near).exp();
        base * (pair[0] * (-I * lam[0] * sep).exp() + pair[1] * (-I * lam[1] * sep).exp())
    }

    fn region_value(&self, channel: Channel, s1: Side, s2: Side, z1: f64, z2: f64) -> Complex64 {
        let (k1, k2) = (self.k1, self.k2);
        let [r1, r2] = self.r;
        let [t1, t2] = self.t;
        let sym = 1.0 / (SQRT_2 * 2.0 * PI);
        let plain = 1.0 / (2.0 * PI);
        let wave = |a: f64, b: f64| (I * (a * z1 + b * z2)).exp();
        use Side::*;
        match channel {
            Channel::LL => match (s1, s2) {
                (Neg, Neg) => sym * (wave(k1, k2) + wave(k2, k1)),
                (Neg, Pos) => sym * (r2 * wave(k1, k2) + r1 * wave(k2, k1)),
                (Pos, Neg) => sym * (r2 * wave(k2, k1) + r1 * wave(k1, k2)),
                (Pos, Pos) => {
                    let (near, far) = (z1.min(z2), z1.max(z2));
                    sym * (r1 * r2 * (wave(k2, k1) + wave(k1, k2))
                        + self.bound_tail(&self.b.ll, near, far))
                }
            },
            Channel::LR => match (s1, s2) {
                (_, Neg) => ZERO,
                (Neg, Pos) => plain * (t2 * wave(k1, k2) + t1 * wave(k2, k1)),
                (Pos, Pos) => {
                    let tail = if z1 <= z2 {
                        self.bound_tail(&self.b.lr1, z1, z2)
                    } else {
                        self.bound_tail(&self.b.lr2, z2, z1)
                    };
                    plain * (t1 * r2 * wave(k2, k1) + t2 * r1 * wave(k1, k2) + tail)
                }
            },
            Channel::RR => match (s1, s2) {
                (Pos, Pos) => {
                    let (near, far) = (z1.min(z2), z1.max(z2));
                    sym * (t1 * t2 * (wave(k2, k1) + wave(k1, k2))
                        + self.bound_tail(&self.b.rr, near, far))
                }
                _ => ZERO,
            },
        }
    }

    /// Two-photon eigenstate amplitude in `channel` at `(z1, z2)`. For `LR`,
    /// `z1` is the left-waveguide coordinate. Values on a coupling point are
    /// the average of both sides.
    pub fn wavefunction(&self, channel: Channel, z1: f64, z2: f64) -> Complex64 {
        let mut acc = ZERO;
        for &(s1, w1) in sides(z1) {
            for &(s2, w2) in sides(z2) {
                acc += w1 * w2 * self.region_value(channel, s1, s2, z1, z2);
            }
        }
        acc
    }

    /// Amplitudes `[phi_L1, phi_L2, phi_R1, phi_R2](x)` of one photon in a
    /// waveguide and one in cavity 1 or 2, one-sided at `x = 0`
    /// (`positive_side` picks `0+`).
    pub fn cavity_photon(&self, x: f64, positive_side: bool) -> [Complex64; 4] {
        let sym = 1.0 / (SQRT_2 * 2.0 * PI);
        let (k1, k2) = (self.k1, self.k2);
        let [c_l1k1, c_l1k2, c_l2k1, c_l2k2] = self.chi;
        let (w1, w2) = ((I * k1 * x).exp(), (I * k2 * x).exp());
        let neg = x < 0.0 || (x == 0.0 && !positive_side);
        if neg {
            let l1 = sym * (c_l1k2 * w1 + c_l1k1 * w2);
            let l2 = sym * (c_l2k2 * w1 + c_l2k1 * w2);
            return [l1, l2, ZERO, ZERO];
        }
        let [r1, r2] = self.r;
        let [t1, t2] = self.t;
        let lam = [self.lambda_minus, self.lambda_plus];
        let m = [self.m_minus, self.m_plus];
        let decay = [(-I * lam[0] * x).exp(), (-I * lam[1] * x).exp()];
        let mut out = [
            r1 * c_l1k2 * w1 + r2 * c_l1k1 * w2,
            r1 * c_l2k2 * w1 + r2 * c_l2k1 * w2,
            t1 * c_l1k2 * w1 + t2 * c_l1k1 * w2,
            t1 * c_l2k2 * w1 + t2 * c_l2k1 * w2,
        ];
        for n in 0..2 {
            out[0] += m[n] * self.c_l[n] * decay[n];
            out[1] += self.c_l[n] * decay[n];
            out[2] += m[n] * self.c_r[n] * decay[n];
            out[3] += self.c_r[n] * decay[n];
        }
        out.map(|v| sym * v)
    }
}

/// Eigenstate amplitude in `channel` at `(z1, z2)` for inputs `(k1, k2)`.
pub fn wavefunction2(
    params: &DimerParams,
    channel: Channel,
    z1: f64,
    z2: f64,
    k1: f64,
    k2: f64,
) -> Result<Complex64> {
    Ok(bound_state_data(params, k1, k2)?.wavefunction(channel, z1, z2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::single_photon::scatter1;

    fn sym(u: f64, v2: f64) -> DimerParams {
        DimerParams::symmetric(u, 1.0, v2).unwrap()
    }

    #[test]
    fn linear_cavities_have_no_bound_part() {
        let p = sym(0.0, 0.04);
        for (k1, k2) in [(0.3, -1.0), (1.0, 1.0), (-2.5, 0.1)] {
            let d = bound_state_data(&p, k1, k2).unwrap();
            assert!(d.b.max_norm() < 1e-12, "{:?}", d.b);
            assert!(d.c_l.iter().chain(&d.c_r).all(|c| c.norm() < 1e-10));
        }
    }

    #[test]
    fn chi_rebuilds_single_photon_coefficients() {
        let p = sym(3.0, 0.09);
        let (k1, k2) = (0.7, -1.2);
        let d = bound_state_data(&p, k1, k2).unwrap();
        let r1 = 1.0 - I * p.v1 / SQRT_2 * d.chi[0];
        let t1 = -I * p.v2 / SQRT_2 * d.chi[2];
        let r2 = 1.0 - I * p.v1 / SQRT_2 * d.chi[1];
        let s1 = scatter1(&p, k1);
        let s2 = scatter1(&p, k2);
        assert!((r1 - s1.r).norm() < 1e-12);
        assert!((t1 - s1.t).norm() < 1e-12);
        assert!((r2 - s2.r).norm() < 1e-12);
    }

    #[test]
    fn equal_momenta_give_equal_chis() {
        let d = bound_state_data(&sym(2.0, 0.04), 0.4, 0.4).unwrap();
        assert_eq!(d.chi[0], d.chi[1]);
        assert_eq!(d.chi[2], d.chi[3]);
    }

    #[test]
    fn bound_tails_decay() {
        for u in [0.5, 5.0] {
            let d = bound_state_data(&sym(u, 0.04), 1.0, -1.0).unwrap();
            assert!(d.lambda_minus.im < 0.0 && d.lambda_plus.im < 0.0);
            let far = (I * d.lambda_minus * -400.0).exp().norm();
            assert!(far < 1e-3);
        }
    }

    #[test]
    fn doubly_occupied_amplitudes_vanish_at_strong_interaction() {
        let d = bound_state_data(&sym(1e3, 0.04), 1.0, -1.0).unwrap();
        assert!(d.e11.norm() < 1e-2 * d.e12.norm());
        assert!(d.e22.norm() < 1e-2 * d.e12.norm());
        // ~1/U decay
        let d2 = bound_state_data(&sym(2e3, 0.04), 1.0, -1.0).unwrap();
        let ratio = d2.e11.norm() / d.e11.norm();
        assert!((ratio - 0.5).abs() < 0.05, "ratio {ratio}");
    }

    #[test]
    fn s_bound_rejects_off_shell() {
        let p = sym(1.0, 0.04);
        assert!(matches!(
            s_bound(&p, 0.1, 0.2, 0.1, 0.3),
            Err(DimerError::Contract(_))
        ));
    }

    #[test]
    fn s_bound_symmetric_channels() {
        let p = sym(5.0, 0.25);
        let (k1, k2) = (1.3, -0.4);
        let (p1, p2) = (2.0, k1 + k2 - 2.0);
        let (ll, rr, _) = s_bound(&p, k1, k2, p1, p2).unwrap();
        let (ll2, rr2, _) = s_bound(&p, k1, k2, p2, p1).unwrap();
        assert!((ll - ll2).norm() < 1e-15 * ll.norm().max(1.0));
        assert!((rr - rr2).norm() < 1e-15 * rr.norm().max(1.0));
    }

    #[test]
    fn smatrix_element_plumbing() {
        let p = sym(5.0, 0.04);
        let (k1, k2) = (0.3, -1.0);
        let e = smatrix_element(&p, Channel::RR, k1, k2).unwrap();
        let (_, rr, lr) = s_bound(&p, k1, k2, 0.1, -0.8).unwrap();
        assert!((e.bound(0.1, -0.8).unwrap() - rr).norm() < 1e-14);
        let elr = smatrix_element(&p, Channel::LR, k1, k2).unwrap();
        assert!((elr.bound(0.1, -0.8).unwrap() - lr).norm() < 1e-14);
        let (s1, s2) = (scatter1(&p, k1), scatter1(&p, k2));
        assert_eq!(elr.direct, [s1.r * s2.t, s2.r * s1.t]);
        let lin = smatrix_element(&sym(0.0, 0.04), Channel::RR, k1, k2).unwrap();
        assert!(lin.bound(0.0, -0.7).unwrap().norm() < 1e-12);
        assert_eq!(lin.direct[0], lin.direct[1]);
    }

    #[test]
    fn incoming_and_empty_regions() {
        let p = sym(2.0, 0.04);
        let (k1, k2) = (0.6, -1.1);
        let d = bound_state_data(&p, k1, k2).unwrap();
        let (z1, z2) = (-3.0, -0.5);
        let want = (1.0 / (SQRT_2 * 2.0 * PI))
            * ((I * (k1 * z1 + k2 * z2)).exp() + (I * (k2 * z1 + k1 * z2)).exp());
        assert!((d.wavefunction(Channel::LL, z1, z2) - want).norm() < 1e-15);
        assert_eq!(d.wavefunction(Channel::RR, z1, z2), ZERO);
        assert_eq!(d.wavefunction(Channel::LR, z1, z2), ZERO);
    }

    #[test]
    fn linear_transmitted_pair_factorizes() {
        let p = sym(0.0, 0.04);
        let (k1, k2) = (0.9, -1.05);
        let (t1, t2) = (scatter1(&p, k1).t, scatter1(&p, k2).t);
        for (y1, y2) in [(0.5, 2.0), (3.0, 0.1), (1.0, 1.0)] {
            let got = wavefunction2(&p, Channel::RR, y1, y2, k1, k2).unwrap();
            let want = (1.0 / (SQRT_2 * 2.0 * PI))
                * t1
                * t2
                * ((I * (k2 * y1 + k1 * y2)).exp() + (I * (k1 * y1 + k2 * y2)).exp());
            assert!((got - want).norm() < 1e-12);
        }
    }
}
