mod common;

use std::f64::consts::PI;

use mzqfi::analytic::{
    example_cat_f_max, f_general, f_loss, f_loss_matched, AnalyticInputs, LossParams,
};
use mzqfi::fock::{coherent, even_cat, ModeSpec};
use mzqfi::interferometer::{generator, InterferometerSpec};
use mzqfi::linalg::{max_abs_diff, C64, I};
use mzqfi::loss::{apply_loss_mode, LossSpec};
use mzqfi::qfi::qfi_pure;
use mzqfi::two_mode::{tensor, Subsystem};
use proptest::prelude::*;

fn complex(max: f64) -> impl Strategy<Value = C64> {
    (0.0..max, 0.0..2.0 * PI).prop_map(|(r, t)| C64::from_polar(r, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn named_states_are_normalized_with_expected_photons(
        z in complex(2.5),
        kind in 0usize..4,
    ) {
        let spec = match kind {
            0 => ModeSpec::Coherent(z),
            1 => ModeSpec::EvenCat(z),
            2 => ModeSpec::OddCat(z + C64::new(0.1, 0.0)),
            _ => ModeSpec::Squeezed(z * 0.4),
        };
        let s = spec.build_auto().unwrap();
        prop_assert!((s.norm() - 1.0).abs() < 1e-12);
        let m = s.moments();
        prop_assert!((m.mean_n - spec.mean_photons()).abs() < 1e-9 * (1.0 + spec.mean_photons()));
    }

    #[test]
    fn partial_traces_of_products(a in complex(1.5), b in complex(1.5)) {
        let sa = coherent(a, 20).unwrap();
        let sb = even_cat(b, 22).unwrap();
        let s = tensor(&sa, &sb);
        prop_assert!(max_abs_diff(&s.partial_trace(Subsystem::A), &sa.density()) < 1e-12);
        prop_assert!(max_abs_diff(&s.partial_trace(Subsystem::B), &sb.density()) < 1e-12);
    }

    #[test]
    fn phase_matching_maximizes_closed_form(
        na in 0.1..10.0f64,
        nb in 0.1..10.0f64,
        ma in 0.1..5.0f64,
        mb in 0.1..5.0f64,
        arg_b in 0.0..2.0 * PI,
    ) {
        let n = 720;
        let best = (0..n)
            .map(|k| {
                let delta = 2.0 * PI * k as f64 / n as f64;
                let inp = AnalyticInputs::new(
                    na,
                    nb,
                    C64::from_polar(ma, arg_b + delta),
                    C64::from_polar(mb, arg_b),
                );
                (delta, f_general(&inp))
            })
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        prop_assert!((best.0 - PI).abs() <= 2.0 * PI / n as f64 + 1e-12);
    }

    #[test]
    fn lossy_closed_form_at_zero_phase(alpha in complex(3.0), t in 0.0..1.0f64) {
        let p = LossParams::new(alpha, 0.0, t);
        let (a, b) = (f_loss(&p), f_loss_matched(&p));
        prop_assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0));
        // maximum over the phase sits at zero
        for phi in [0.3, 1.0, PI / 2.0, 2.5] {
            prop_assert!(f_loss(&LossParams::new(alpha, phi, t)) <= a + 1e-10 * a.abs().max(1.0));
        }
    }

    #[test]
    fn lossy_closed_form_decreases_with_loss(alpha in 0.2..3.0f64) {
        let a = C64::new(alpha, 0.0);
        let values: Vec<f64> = (0..=50)
            .map(|k| f_loss(&LossParams::new(a, 0.0, k as f64 / 50.0)))
            .collect();
        prop_assert!(values.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    }

    #[test]
    fn loss_channels_compose(z in complex(1.2), t1 in 0.0..1.0f64, t2 in 0.0..1.0f64) {
        let rho = even_cat(z + C64::new(0.05, 0.0), 16).unwrap().density();
        let once = apply_loss_mode(&rho, &LossSpec::new(t1 * t2).unwrap()).unwrap();
        let twice = apply_loss_mode(
            &apply_loss_mode(&rho, &LossSpec::new(t1).unwrap()).unwrap(),
            &LossSpec::new(t2).unwrap(),
        )
        .unwrap();
        prop_assert!(max_abs_diff(&once, &twice) < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn cat_example_matches_numerics(na in 0.0..6.0f64, alpha in 0.3..2.5f64) {
        let a = ModeSpec::Coherent(I * na.sqrt()).build_auto().unwrap();
        let b = ModeSpec::EvenCat(C64::new(alpha, 0.0)).build_auto().unwrap();
        let s = tensor(&a, &b);
        let g = generator(&InterferometerSpec::balanced(0.0), s.dims()).unwrap();
        let f = qfi_pure(&s, &g).unwrap().value;
        let exact = example_cat_f_max(na, alpha);
        prop_assert!(common::rel(f, exact) < 1e-8, "{} vs {}", f, exact);
    }
}
