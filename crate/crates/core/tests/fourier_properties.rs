use std::f64::consts::PI;

use discrepancy_lab::fourier::{
    calibrate_decay_bound, chi_hat_asymptotic, chi_hat_parts, rotational_lp_average_with, Frequency, RotationalOptions,
    Tolerance,
};
use discrepancy_lab::norms::{fit_exponent, NormEstimate};
use discrepancy_lab::verify::log_grid;
use discrepancy_lab::FlatPointBody;

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let s: Vec<NormEstimate> = xs
        .iter()
        .zip(ys)
        .map(|(&r, &value)| NormEstimate {
            r,
            p: 1.0,
            value,
            stderr: 0.0,
            n_samples: 1,
        })
        .collect();
    fit_exponent(&s).unwrap().slope
}

fn remainder(body: &FlatPointBody, rho: f64, theta: f64) -> f64 {
    let f = Frequency::new(rho, theta).unwrap();
    let (s, xd) = f.parts();
    let tol = Tolerance {
        absolute: 1e-14,
        relative: 1e-9,
    };
    let exact = chi_hat_parts(body, s, xd, tol).unwrap().value;
    (exact - chi_hat_asymptotic(body, f).unwrap().value).norm()
}

#[test]
fn decay_bound_needs_a_small_constant() {
    let rhos = log_grid(4.0, 1024.0, 200);
    let thetas: Vec<f64> = (0..64).map(|k| PI * k as f64 / 63.0).collect();
    let freqs: Vec<Frequency> = rhos
        .iter()
        .flat_map(|&r| thetas.iter().map(move |&t| Frequency::new(r, t).unwrap()))
        .collect();
    for d in [2, 3] {
        for g in [2.0, 3.0, 4.0, 6.0] {
            let body = FlatPointBody::with(d, g).unwrap();
            let c = calibrate_decay_bound(&body, &freqs).unwrap();
            assert!(c > 0.0 && c <= 10.0, "d={d} gamma={g}: calibration {c}");
        }
    }
}

#[test]
fn stationary_phase_remainder_constant_is_stable() {
    let body = FlatPointBody::with(2, 2.0).unwrap();
    let c: Vec<f64> = [64.0, 128.0, 256.0, 512.0]
        .iter()
        .map(|&rho: &f64| remainder(&body, rho, PI / 3.0) * rho.powf(2.5))
        .collect();
    for w in c.windows(2) {
        let ratio = w[1] / w[0];
        assert!((1.0 / 3.0..=3.0).contains(&ratio), "{c:?}");
    }
}

#[test]
fn stationary_phase_remainder_decays_at_least_as_fast_gamma4() {
    let body = FlatPointBody::with(2, 4.0).unwrap();
    let rhos = log_grid(64.0, 512.0, 65);
    let errs: Vec<f64> = rhos.iter().map(|&r| remainder(&body, r, PI / 3.0)).collect();
    let s = slope(&rhos, &errs);
    assert!(s <= -2.5 + 0.3, "slope {s}");
}

#[test]
fn quadratic_rotational_average_is_nonincreasing() {
    let body = FlatPointBody::with(2, 2.0).unwrap();
    let opts = RotationalOptions::default();
    let vals: Vec<f64> = log_grid(32.0, 512.0, 17)
        .iter()
        .map(|&rho| rotational_lp_average_with(&body, rho, 2.0, opts).unwrap().value)
        .collect();
    for w in vals.windows(2) {
        assert!(w[1] <= w[0] * (1.0 + 2.0 * opts.tolerance), "{vals:?}");
    }
}
