use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use photon_dimer::model::{two_excitation_eigensystem, validate, RawParams};
use photon_dimer::single_photon::scatter1;
use photon_dimer::two_photon::s_bound;
use photon_dimer::wavepackets::{initial_g2, CoherentInput, PulseProfile, Shape, TwoPhotonInput};
use photon_dimer::DimerParams;
use proptest::prelude::*;

fn raw() -> impl Strategy<Value = RawParams> {
    (
        -3.0..3.0f64,
        -3.0..3.0f64,
        0.0..10.0f64,
        0.0..10.0f64,
        0.2..2.0f64,
        0.05..0.5f64,
        0.05..0.5f64,
    )
        .prop_map(|(omega1, omega2, u1, u2, j_hop, v1, v2)| RawParams {
            omega1,
            omega2,
            u1,
            u2,
            j_hop,
            v1,
            v2,
            gamma_bath: 0.0,
        })
}

fn shape() -> impl Strategy<Value = Shape> {
    prop_oneof![
        Just(Shape::Gaussian),
        Just(Shape::Lorentzian),
        Just(Shape::Rising)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn single_photon_flux_is_conserved(r in raw(), e in -8.0..8.0f64) {
        let p = validate(&r).unwrap();
        prop_assert!((scatter1(&p, e).flux() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bath_loss_never_adds_flux(r in raw(), g in 0.0..0.2f64, e in -8.0..8.0f64) {
        let p = validate(&RawParams { gamma_bath: g, ..r }).unwrap();
        prop_assert!(scatter1(&p, e).flux() <= 1.0 + 1e-12);
    }

    #[test]
    fn symmetric_dimer_transmission_is_even(u in 0.0..10.0f64, vsq in 0.001..0.3f64, e in 0.0..6.0f64) {
        let p = DimerParams::symmetric(u, 1.0, vsq).unwrap();
        let (a, b) = (scatter1(&p, e).t.norm(), scatter1(&p, -e).t.norm());
        prop_assert!((a - b).abs() < 1e-12, "{} {}", a, b);
    }

    #[test]
    fn single_photon_scattering_ignores_interaction(r in raw(), u in 0.0..50.0f64, e in -8.0..8.0f64) {
        let a = scatter1(&validate(&r).unwrap(), e);
        let b = scatter1(&validate(&RawParams { u1: u, u2: 0.5 * u, ..r }).unwrap(), e);
        prop_assert!((a.r - b.r).norm() < 1e-15 && (a.t - b.t).norm() < 1e-15);
    }

    #[test]
    fn validation_removes_the_common_frequency(r in raw(), shift in -100.0..100.0f64) {
        let a = validate(&r).unwrap();
        let b = validate(&RawParams { omega1: r.omega1 + shift, omega2: r.omega2 + shift, ..r }).unwrap();
        prop_assert!((a.omega1 - b.omega1).norm() < 1e-12);
        prop_assert!((a.omega2 - b.omega2).norm() < 1e-12);
    }

    #[test]
    fn two_excitation_eigenstates(r in raw(), shift in -5.0..5.0f64) {
        let p = validate(&r).unwrap();
        let es = two_excitation_eigensystem(&p);
        let c = std::f64::consts::SQRT_2 * p.j_hop;
        let (w1, w2) = (p.omega1.re, p.omega2.re);
        let h = Matrix3::new(
            2.0 * w1 + 2.0 * p.u1, c, 0.0,
            c, w1 + w2, c,
            0.0, c, 2.0 * w2 + 2.0 * p.u2,
        );
        let pairs = [
            (es.eps2_zero, es.vec2_zero),
            (es.eps2_minus, es.vec2_minus),
            (es.eps2_plus, es.vec2_plus),
        ];
        for (i, (e, v)) in pairs.iter().enumerate() {
            let v = Vector3::from(*v);
            prop_assert!((h * v - v * *e).norm() < 1e-10);
            for (j, (_, w)) in pairs.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((v.dot(&Vector3::from(*w)) - want).abs() < 1e-10);
            }
        }
        prop_assert!(es.eps2_minus <= es.eps2_plus);

        let mut q = p;
        q.omega1 += shift;
        q.omega2 += shift;
        let moved = two_excitation_eigensystem(&q);
        prop_assert!((moved.eps2_zero - es.eps2_zero - 2.0 * shift).abs() < 1e-10);
        prop_assert!((moved.eps1_minus - es.eps1_minus - shift).abs() < 1e-10);
    }

    #[test]
    fn profiles_are_normalized(s in shape(), k0 in -5.0..5.0f64, sigma in 0.001..0.1f64) {
        let xi = PulseProfile::new(s, k0, sigma).unwrap();
        prop_assert!((xi.norm_sqr() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn coherent_amplitude_carries_the_mean_number(s in shape(), nbar in 1e-5..0.01f64, k in -0.2..0.2f64) {
        let xi = PulseProfile::new(s, 0.0, 0.02).unwrap();
        let c = CoherentInput::new(nbar, xi).unwrap();
        let want = nbar.sqrt() * xi.amplitude(k).norm();
        prop_assert!((c.amplitude(k).norm() - want).abs() <= 1e-12 * want.max(1e-300));
    }

    #[test]
    fn pair_norm_is_bounded(a in shape(), b in shape(), k1 in -1.0..1.0f64, k2 in -1.0..1.0f64, sigma in 0.005..0.5f64) {
        let input = TwoPhotonInput::new(
            PulseProfile::new(a, k1, sigma).unwrap(),
            PulseProfile::new(b, k2, sigma).unwrap(),
        );
        prop_assert!(input.m2 >= 1.0 - 1e-12 && input.m2 <= 2.0 + 1e-12, "{}", input.m2);
    }

    #[test]
    fn gaussian_pair_correlation_is_bounded(dk in 0.0..0.5f64, sigma in 0.005..0.1f64) {
        let input = TwoPhotonInput::at_detuning(Shape::Gaussian, 0.0, dk, sigma).unwrap();
        let g = initial_g2(&input, 0.0, 0.0);
        prop_assert!((0.5 - 1e-12..=1.0 + 1e-12).contains(&g), "{}", g);
    }

    #[test]
    fn bound_part_is_symmetric_in_the_outgoing_pair(
        u in 0.5..10.0f64, k1 in -4.0..4.0f64, k2 in -4.0..4.0f64, q in -3.0..3.0f64,
    ) {
        let p = DimerParams::symmetric(u, 1.0, 0.04).unwrap();
        let (p1, p2) = (0.5 * (k1 + k2) + q, 0.5 * (k1 + k2) - q);
        let (ll, rr, _) = s_bound(&p, k1, k2, p1, p2).unwrap();
        let (ll2, rr2, _) = s_bound(&p, k1, k2, p2, p1).unwrap();
        let close = |a: Complex64, b: Complex64| (a - b).norm() <= 1e-10 * a.norm().max(1e-12);
        prop_assert!(close(ll, ll2) && close(rr, rr2));
        // and in the incoming pair
        let (ll3, rr3, _) = s_bound(&p, k2, k1, p1, p2).unwrap();
        prop_assert!(close(ll, ll3) && close(rr, rr3));
    }
}
