//! Independent checks of the two-photon bound terms against a resolvent
//! (time-ordered absorption/emission) evaluation of the connected T-matrix.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
use num_complex::Complex64 as C;
use photon_dimer::model::{apply_bath_loss, validate};
use photon_dimer::two_photon::{bound_state_data, s_bound, wavefunction2, BoundStateData};
use photon_dimer::{Channel, DimerParams, RawParams};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const I: C = C::new(0.0, 1.0);

fn h1(p: &DimerParams) -> Matrix2<C> {
    let j = C::from(p.j_hop);
    Matrix2::new(
        p.omega1 - I * p.v1 * p.v1 / 2.0,
        j,
        j,
        p.omega2 - I * p.v2 * p.v2 / 2.0,
    )
}

fn h2(p: &DimerParams, linear: bool) -> Matrix3<C> {
    let (u1, u2) = if linear { (0.0, 0.0) } else { (p.u1, p.u2) };
    let s = C::from(SQRT_2 * p.j_hop);
    let z = C::from(0.0);
    Matrix3::new(
        2.0 * p.omega1 + 2.0 * u1 - I * p.v1 * p.v1,
        s,
        z,
        s,
        p.omega1 + p.omega2 - I * (p.v1 * p.v1 + p.v2 * p.v2) / 2.0,
        s,
        z,
        s,
        2.0 * p.omega2 + 2.0 * u2 - I * p.v2 * p.v2,
    )
}

fn g1(p: &DimerParams, z: f64) -> Matrix2<C> {
    (Matrix2::identity() * C::from(z) - h1(p))
        .try_inverse()
        .unwrap()
}

fn g2(p: &DimerParams, z: f64, linear: bool) -> Matrix3<C> {
    (Matrix3::identity() * C::from(z) - h2(p, linear))
        .try_inverse()
        .unwrap()
}

/// a_1^dagger from the one- to the two-excitation sector (|20>, |11>, |02>).
fn raise1(v: &Vector2<C>) -> Vector3<C> {
    Vector3::new(v[0] * SQRT_2, v[1], C::from(0.0))
}

/// Lowering by cavity `site` (0 or 1) from two to one excitation.
fn lower(site: usize, v: &Vector3<C>) -> Vector2<C> {
    if site == 0 {
        Vector2::new(v[0] * SQRT_2, v[1])
    } else {
        Vector2::new(v[1], v[2] * SQRT_2)
    }
}

/// Connected S-matrix prefactor of delta(E - E') for emission of photon
/// `p1` into waveguide `s1` and `p2` into `s2` (0 = left, 1 = right).
fn oracle(p: &DimerParams, k1: f64, k2: f64, s1: usize, p1: f64, s2: usize, p2: f64) -> C {
    let e = k1 + k2;
    let e1 = Vector2::new(C::from(1.0), C::from(0.0));
    let mut src = Vector3::zeros();
    for k in [k1, k2] {
        src += raise1(&(g1(p, k) * e1));
    }
    src *= C::from(p.v1 * p.v1);
    let dg = g2(p, e, false) - g2(p, e, true);
    let two = dg * src;
    let coupling = [p.v1, p.v2];
    let mut total = C::from(0.0);
    for (first, last) in [((s1, p1), (s2, p2)), ((s2, p2), (s1, p1))] {
        let one = lower(first.0, &two) * C::from(coupling[first.0]);
        let back = g1(p, last.1) * one;
        total += back[last.0] * coupling[last.0];
    }
    -I / (2.0 * PI) * total
}

fn random_params(rng: &mut ChaCha8Rng, lossy: bool, asymmetric: bool) -> DimerParams {
    let u = rng.gen_range(0.2..8.0);
    let v2 = rng.gen_range(0.01..0.5);
    let mut raw = RawParams::symmetric(u, 1.0, v2);
    if asymmetric {
        raw.omega2 = rng.gen_range(-1.0..1.0);
        raw.u2 = rng.gen_range(0.0..6.0);
        raw.v2 = rng.gen_range(0.1..0.7);
    }
    let p = validate(&raw).unwrap();
    if lossy {
        apply_bath_loss(&p, rng.gen_range(0.0..0.08)).unwrap()
    } else {
        p
    }
}

fn assert_close(got: C, want: C, what: &str) {
    let scale = want.norm().max(1e-6);
    assert!(
        (got - want).norm() < 1e-8 * scale,
        "{what}: got {got}, want {want}"
    );
}

#[test]
fn bound_terms_match_resolvent_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..60 {
        let p = random_params(&mut rng, case % 3 == 1, case % 2 == 1);
        let k1 = rng.gen_range(-3.0..3.0);
        let k2 = rng.gen_range(-3.0..3.0);
        let p1 = rng.gen_range(-3.0..3.0);
        let p2 = k1 + k2 - p1;
        let (ll, rr, lr) = s_bound(&p, k1, k2, p1, p2).unwrap();
        assert_close(ll, oracle(&p, k1, k2, 0, p1, 0, p2), "LL");
        assert_close(rr, oracle(&p, k1, k2, 1, p1, 1, p2), "RR");
        assert_close(lr, oracle(&p, k1, k2, 0, p1, 1, p2), "LR");
    }
}

#[test]
fn linear_bound_terms_vanish_on_random_shell_points() {
    let p = validate(&RawParams::symmetric(0.0, 1.0, 0.04)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let k1 = rng.gen_range(-5.0..5.0);
        let k2 = rng.gen_range(-5.0..5.0);
        let p1 = rng.gen_range(-5.0..5.0);
        let (ll, rr, lr) = s_bound(&p, k1, k2, p1, k1 + k2 - p1).unwrap();
        worst = worst.max(ll.norm()).max(rr.norm()).max(lr.norm());
    }
    assert!(worst < 1e-12, "{worst}");
}

/// phi_{s1 s2}(x) one-sided at 0, with the two-photon amplitude's second
/// coordinate at x.
fn pair_at(d: &BoundStateData, ch: Channel, z1: f64, x: f64) -> C {
    d.wavefunction(ch, z1, x)
}

#[test]
fn boundary_discontinuities() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let eps = 1e-300;
    for case in 0..20 {
        let p = random_params(&mut rng, case % 2 == 0, case % 3 == 0);
        let k1 = rng.gen_range(-3.0..3.0);
        let k2 = rng.gen_range(-3.0..3.0);
        let d = bound_state_data(&p, k1, k2).unwrap();
        let (v1, v2) = (p.v1, p.v2);

        // Cavity-photon jumps at x = 0 are fed by the doubly-excited amplitudes.
        let minus = d.cavity_photon(0.0, false);
        let plus = d.cavity_photon(0.0, true);
        let tol = 1e-10;
        assert!((plus[0] - minus[0] + I * v1 * d.e11 * SQRT_2).norm() < tol);
        assert!((plus[1] - minus[1] + I * v1 * d.e12).norm() < tol);
        assert!((plus[2] - minus[2] + I * v2 * d.e12).norm() < tol);
        assert!((plus[3] - minus[3] + I * v2 * d.e22 * SQRT_2).norm() < tol);

        // Two-photon jumps: crossing x = 0 in the left guide scales by the
        // cavity-1 amplitude of the spectator photon.
        for z in [-1.7, 0.9, 2.4] {
            let after = pair_at(&d, Channel::LL, z, eps);
            let before = pair_at(&d, Channel::LL, z, -eps);
            let cav = if z < 0.0 {
                d.cavity_photon(z, false)[0]
            } else {
                d.cavity_photon(z, true)[0]
            };
            let want = -I * v1 / SQRT_2 * cav;
            assert!(
                (after - before - want).norm() < tol,
                "LL jump at z={z}: {} vs {want}",
                after - before
            );

            if z > 0.0 {
                // Right photon emerging at 0+ is produced by cavity 2.
                let rr = pair_at(&d, Channel::RR, z, eps);
                let want = -I * v2 / SQRT_2 * d.cavity_photon(z, true)[3];
                assert!((rr - want).norm() < tol, "RR edge at z={z}");
                let lr = d.wavefunction(Channel::LR, z, eps);
                let want = -I * v2 * d.cavity_photon(z, true)[1];
                assert!((lr - want).norm() < tol, "LR edge at z={z}");
            }
        }
    }
}

#[test]
fn cavity_photon_equations_away_from_origin() {
    // For a photon at x > 0 the remaining excitation evolves under the
    // effective single-excitation Hamiltonian, driven only through cavity 1
    // by the other photon arriving at the origin.
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let eps = 1e-300;
    for case in 0..20 {
        let p = random_params(&mut rng, case % 2 == 1, case % 4 == 0);
        let k1 = rng.gen_range(-2.5..2.5);
        let k2 = rng.gen_range(-2.5..2.5);
        let d = bound_state_data(&p, k1, k2).unwrap();
        let e = k1 + k2;
        let h = 1e-5;
        for x in [0.3, 1.1, 4.0] {
            let f = d.cavity_photon(x, true);
            let fp = d.cavity_photon(x + h, true);
            let fm = d.cavity_photon(x - h, true);
            let drive = [
                SQRT_2 * d.wavefunction(Channel::LL, x, -eps),
                d.wavefunction(Channel::LR, -eps, x),
            ];
            for guide in 0..2 {
                let phi = Vector2::new(f[2 * guide], f[2 * guide + 1]);
                let dphi = Vector2::new(
                    (fp[2 * guide] - fm[2 * guide]) / (2.0 * h),
                    (fp[2 * guide + 1] - fm[2 * guide + 1]) / (2.0 * h),
                );
                let res = dphi * (-I) + h1(&p) * phi - phi * C::from(e);
                let src = Vector2::new(-C::from(p.v1) * drive[guide], C::from(0.0));
                let scale = phi.norm().max(1e-3);
                assert!(
                    (res - src).norm() < 1e-6 * scale,
                    "guide {guide} x={x}: {res} vs {src}"
                );
            }
        }
    }
}

#[test]
fn linear_transmitted_pair_matches_product_of_single_photon_waves() {
    let p = validate(&RawParams::symmetric(0.0, 1.0, 0.09)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..50 {
        let k1 = rng.gen_range(-3.0..3.0);
        let k2 = rng.gen_range(-3.0..3.0);
        let z1 = rng.gen_range(0.01..20.0);
        let z2 = rng.gen_range(0.01..20.0);
        let got = wavefunction2(&p, Channel::RR, z1, z2, k1, k2).unwrap();
        let (_, a1) = photon_dimer::single_photon::output_wavefunction1(&p, k1, z1);
        let (_, b2) = photon_dimer::single_photon::output_wavefunction1(&p, k2, z2);
        let (_, a2) = photon_dimer::single_photon::output_wavefunction1(&p, k1, z2);
        let (_, b1) = photon_dimer::single_photon::output_wavefunction1(&p, k2, z1);
        let want = (a1 * b2 + a2 * b1) / SQRT_2;
        assert!((got - want).norm() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bosonic_symmetry(
        u in 0.0f64..10.0,
        v2 in 0.01f64..0.5,
        k1 in -3.0f64..3.0,
        k2 in -3.0f64..3.0,
        z1 in -10.0f64..10.0,
        z2 in -10.0f64..10.0,
    ) {
        let p = DimerParams::symmetric(u, 1.0, v2).unwrap();
        let d = bound_state_data(&p, k1, k2).unwrap();
        for ch in [Channel::LL, Channel::RR] {
            let a = d.wavefunction(ch, z1, z2);
            let b = d.wavefunction(ch, z2, z1);
            prop_assert!((a - b).norm() <= 1e-13 * a.norm().max(1e-3));
        }
    }

    #[test]
    fn input_exchange_symmetry(
        u in 0.0f64..10.0,
        v2 in 0.01f64..0.5,
        k1 in -3.0f64..3.0,
        k2 in -3.0f64..3.0,
        p1 in -3.0f64..3.0,
    ) {
        let p = DimerParams::symmetric(u, 1.0, v2).unwrap();
        let a = bound_state_data(&p, k1, k2).unwrap();
        let b = bound_state_data(&p, k2, k1).unwrap();
        let close = |x: C, y: C| (x - y).norm() <= 1e-12 * x.norm().max(1.0);
        prop_assert!(close(a.chi[0], b.chi[1]) && close(a.chi[2], b.chi[3]));
        prop_assert!(close(a.e11, b.e11) && close(a.e12, b.e12) && close(a.e22, b.e22));
        for n in 0..2 {
            prop_assert!(close(a.b.rr[n], b.b.rr[n]) && close(a.b.ll[n], b.b.ll[n]));
            prop_assert!(close(a.b.lr1[n], b.b.lr1[n]) && close(a.b.lr2[n], b.b.lr2[n]));
        }
        let p2 = k1 + k2 - p1;
        let (ll, rr, _) = s_bound(&p, k1, k2, p1, p2).unwrap();
        let (ll2, rr2, _) = s_bound(&p, k1, k2, p2, p1).unwrap();
        prop_assert!(close(ll, ll2) && close(rr, rr2));
    }
}
