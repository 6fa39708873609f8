//! Steady state of the coherently driven, damped dimer in a truncated Fock
//! space, used as an independent check of the weak coherent-input results.
//!
//! Density matrices are flattened column by column, so that
//! `vec(A X B) = (B^T kron A) vec(X)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{DimerError, Result};
use crate::model::DimerParams;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest superoperator (in entries) that [`build_liouvillian`] will build.
pub const MAX_SUPEROPERATOR_ENTRIES: usize = 1_000_000;

/// Two-mode Fock states with `n1 + n2 <= n_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct FockBasis {
    n_max: usize,
    states: Vec<(usize, usize)>,
}

impl FockBasis {
    pub fn new(n_max: usize) -> Self {
        let mut states = Vec::new();
        for total in 0..=n_max {
            for n1 in (0..=total).rev() {
                states.push((n1, total - n1));
            }
        }
        FockBasis { n_max, states }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, index: usize) -> (usize, usize) {
        self.states[index]
    }

    pub fn index(&self, n1: usize, n2: usize) -> Option<usize> {
        let total = n1 + n2;
        if total > self.n_max {
            return None;
        }
        Some(total * (total + 1) / 2 + (total - n1))
    }

    /// Annihilation operator of site 1 or 2.
    pub fn lowering(&self, site: usize) -> DMatrix<Complex64> {
        let d = self.dim();
        let mut a = DMatrix::zeros(d, d);
        for (col, &(n1, n2)) in self.states.iter().enumerate() {
            let (n, target) = match site {
                1 if n1 > 0 => (n1, self.index(n1 - 1, n2)),
                2 if n2 > 0 => (n2, self.index(n1, n2 - 1)),
                _ => continue,
            };
            if let Some(row) = target {
                a[(row, col)] = Complex64::new((n as f64).sqrt(), 0.0);
            }
        }
        a
    }

    /// Diagonal of the total excitation number.
    fn excitations(&self) -> Vec<usize> {
        self.states.iter().map(|&(a, b)| a + b).collect()
    }
}

impl Default for FockBasis {
    fn default() -> Self {
        FockBasis::new(4)
    }
}

/// Drive and damping of the master equation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriveSettings {
    /// Two-photon detuning; the drive sits at `delta / 2` in the frame of
    /// the parameters.
    pub delta: f64,
    /// Coherent drive amplitude on site 1.
    pub omega: f64,
    /// Energy damping rate of each site.
    pub gamma: f64,
}

/// Hamiltonian in the frame rotating at the drive frequency.
pub fn hamiltonian(
    params: &DimerParams,
    drive: &DriveSettings,
    basis: &FockBasis,
) -> DMatrix<Complex64> {
    let a1 = basis.lowering(1);
    let a2 = basis.lowering(2);
    let d = basis.dim();
    let mut h = DMatrix::zeros(d, d);
    for (i, &(n1, n2)) in basis.states.iter().enumerate() {
        let (n1, n2) = (n1 as f64, n2 as f64);
        let e = (params.omega1.re - 0.5 * drive.delta) * n1
            + (params.omega2.re - 0.5 * drive.delta) * n2
            + params.u1 * n1 * (n1 - 1.0)
            + params.u2 * n2 * (n2 - 1.0);
        h[(i, i)] = Complex64::new(e, 0.0);
    }
    let hop = &a1.adjoint() * &a2;
    h += (&hop + hop.adjoint()) * Complex64::new(params.j_hop, 0.0);
    h += (&a1 + a1.adjoint()) * Complex64::new(drive.omega, 0.0);
    h
}

fn kron(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a.kronecker(b)
}

/// Liouvillian acting on column-stacked density matrices.
pub fn build_liouvillian(
    params: &DimerParams,
    drive: &DriveSettings,
    basis: &FockBasis,
) -> Result<DMatrix<Complex64>> {
    let d = basis.dim();
    let entries = d.checked_mul(d).and_then(|n| n.checked_mul(n));
    match entries {
        Some(n) if n <= MAX_SUPEROPERATOR_ENTRIES => {}
        _ => return Err(DimerError::BasisTooLarge(d)),
    }
    if !(drive.gamma > 0.0) || !drive.omega.is_finite() || !drive.delta.is_finite() {
        return Err(DimerError::domain(
            "gamma",
            "must be positive with finite drive",
        ));
    }
    let id = DMatrix::<Complex64>::identity(d, d);
    let h = hamiltonian(params, drive, basis);
    let mut l = (kron(&id, &h) - kron(&h.transpose(), &id)) * (-I);
    let g = Complex64::new(drive.gamma, 0.0);
    for site in [1, 2] {
        let a = basis.lowering(site);
        let n = a.adjoint() * &a;
        let jump = kron(&a.map(|z| z.conj()), &a);
        let anti = kron(&id, &n) + kron(&n.transpose(), &id);
        l += (jump - anti * Complex64::new(0.5, 0.0)) * g;
    }
    Ok(l)
}

/// Normalized steady state and the residual `|L vec(rho)|`.
#[derive(Clone, Debug)]
pub struct SteadyState {
    pub rho: DMatrix<Complex64>,
    pub residual: f64,
}

/// Kernel of `l`, normalized to unit trace.
///
/// The weakly driven state spans many orders of magnitude, so the solve is
/// done on a diagonally rescaled copy of `l` in which every block of fixed
/// excitation numbers is of order one; `scale` is the expected ratio of
/// successive amplitudes (see [`amplitude_scale`]).
pub fn steady_state(l: &DMatrix<Complex64>, basis: &FockBasis, scale: f64) -> Result<SteadyState> {
    let d = basis.dim();
    if l.nrows() != d * d || l.ncols() != d * d {
        return Err(DimerError::Contract(
            "superoperator does not match the basis".into(),
        ));
    }
    let s = if scale > 0.0 && scale.is_finite() {
        scale.min(1.0)
    } else {
        1.0
    };
    let exc = basis.excitations();
    let weights: Vec<f64> = (0..d * d)
        .map(|k| s.powi((exc[k % d] + exc[k / d]) as i32))
        .collect();
    let mut scaled = l.clone();
    for c in 0..d * d {
        for r in 0..d * d {
            scaled[(r, c)] *= weights[c] / weights[r];
        }
    }
    let svd = scaled.svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| DimerError::Contract("singular value decomposition failed".into()))?;
    let mut order: Vec<usize> = (0..d * d).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let smallest = svd.singular_values[order[0]];
    let next = svd.singular_values[order[1]];
    let top = svd.singular_values[order[d * d - 1]];
    if next <= 1e-10 * top || smallest > 1e-8 * top {
        return Err(DimerError::NonUniqueSteadyState(next / top));
    }
    let null = v_t.row(order[0]).map(|z| z.conj()).transpose();
    let mut vec_rho = DVector::from_iterator(d * d, null.iter().zip(&weights).map(|(z, w)| z * *w));
    let trace: Complex64 = (0..d).map(|i| vec_rho[i * d + i]).sum();
    vec_rho /= trace;
    let residual = (l * &vec_rho).norm();
    let mut rho = DMatrix::from_column_slice(d, d, vec_rho.as_slice());
    // Remove the rounding-level antihermitian part.
    rho = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(SteadyState { rho, residual })
}

/// Mean occupation of site 2.
pub fn occupation2(rho: &DMatrix<Complex64>, basis: &FockBasis) -> f64 {
    let a = basis.lowering(2);
    (rho * a.adjoint() * &a).trace().re
}

/// `<a2+ a2+ a2 a2> / <a2+ a2>^2` of the steady state.
pub fn g2_steady(rho: &DMatrix<Complex64>, basis: &FockBasis) -> Result<f64> {
    let a = basis.lowering(2);
    let n = (rho * a.adjoint() * &a).trace().re;
    if !(n > 1e-20) {
        return Err(DimerError::NoSignal(n));
    }
    let ad = a.adjoint();
    let pair = (rho * &ad * &ad * &a * &a).trace().re;
    Ok(pair / (n * n))
}

/// Result of one steady-state calculation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SteadyCorrelation {
    pub delta: f64,
    pub n2: f64,
    pub g2: f64,
    pub residual: f64,
}

/// Builds, solves and evaluates the steady-state correlation in one go.
pub fn steady_correlation(
    params: &DimerParams,
    drive: &DriveSettings,
    basis: &FockBasis,
) -> Result<SteadyCorrelation> {
    let l = build_liouvillian(params, drive, basis)?;
    let ss = steady_state(&l, basis, amplitude_scale(params, drive))?;
    Ok(SteadyCorrelation {
        delta: drive.delta,
        n2: occupation2(&ss.rho, basis),
        g2: g2_steady(&ss.rho, basis)?,
        residual: ss.residual,
    })
}

/// Expected ratio of successive Fock amplitudes: the larger linear-response
/// field. Far from resonance this is much smaller than `omega / gamma`.
pub fn amplitude_scale(params: &DimerParams, drive: &DriveSettings) -> f64 {
    let (a1, a2) = linear_response(params, drive);
    a1.norm().max(a2.norm())
}

/// Linear-response amplitudes `(<a1>, <a2>)` of the two damped modes.
pub fn linear_response(params: &DimerParams, drive: &DriveSettings) -> (Complex64, Complex64) {
    let hg = Complex64::new(0.0, -0.5 * drive.gamma);
    let d1 = params.omega1.re - 0.5 * drive.delta + hg;
    let d2 = params.omega2.re - 0.5 * drive.delta + hg;
    let j = params.j_hop;
    let det = d1 * d2 - j * j;
    let a1 = -drive.omega * d2 / det;
    let a2 = drive.omega * j / det;
    (a1, a2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn drive(delta: f64, omega: f64) -> DriveSettings {
        DriveSettings {
            delta,
            omega,
            gamma: 0.04,
        }
    }

    #[test]
    fn basis_indexing_round_trips() {
        let b = FockBasis::new(4);
        assert_eq!(b.dim(), 15);
        for i in 0..b.dim() {
            let (n1, n2) = b.state(i);
            assert_eq!(b.index(n1, n2), Some(i));
        }
        assert_eq!(b.index(3, 2), None);
    }

    #[test]
    fn superoperator_size_and_guard() {
        let p = DimerParams::symmetric(1.0, 1.0, 0.04).unwrap();
        let l = build_liouvillian(&p, &drive(0.0, 2e-4), &FockBasis::new(4)).unwrap();
        assert_eq!((l.nrows(), l.ncols()), (225, 225));
        assert!(matches!(
            build_liouvillian(&p, &drive(0.0, 2e-4), &FockBasis::new(40)),
            Err(DimerError::BasisTooLarge(_))
        ));
    }

    #[test]
    fn undriven_state_is_vacuum() {
        let p = DimerParams::symmetric(1.0, 1.0, 0.04).unwrap();
        let b = FockBasis::new(3);
        let l = build_liouvillian(&p, &drive(0.3, 0.0), &b).unwrap();
        let ss = steady_state(&l, &b, 0.0).unwrap();
        assert!((ss.rho[(0, 0)].re - 1.0).abs() < 1e-12);
        assert!(matches!(
            g2_steady(&ss.rho, &b),
            Err(DimerError::NoSignal(_))
        ));
    }

    #[test]
    fn coherent_response_without_interaction() {
        let p = DimerParams::symmetric(0.0, 1.0, 0.04).unwrap();
        let b = FockBasis::new(4);
        let c = steady_correlation(&p, &drive(-2.0, 2e-4), &b).unwrap();
        let (_, a2) = linear_response(&p, &drive(-2.0, 2e-4));
        assert!((c.n2 / a2.norm_sqr() - 1.0).abs() < 1e-6);
        assert!((c.g2 - 1.0).abs() < 1e-3, "{c:?}");
    }
}
