//! Bessel functions of the first kind, orders 0 and 1.

use std::f64::consts::PI;

/// Power series below this argument, Hankel expansion above.
pub const SERIES_LIMIT: f64 = 12.0;

/// `J_0(x)`.
pub fn j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax < SERIES_LIMIT {
        series(0, ax, 200)
    } else {
        hankel(0, ax)
    }
}

/// `J_1(x)`.
pub fn j1(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax < SERIES_LIMIT { series(1, ax, 200) } else { hankel(1, ax) };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// Ascending series `Σ (-1)^k (x/2)^{2k+n} / (k! (k+n)!)`, at most `max_terms` terms.
pub fn series(n: u32, x: f64, max_terms: usize) -> f64 {
    let h = 0.5 * x;
    let q = h * h;
    let mut term = if n == 0 { 1.0 } else { h };
    let mut sum = term;
    for k in 1..max_terms {
        let kf = k as f64;
        term *= -q / (kf * (kf + n as f64));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) && kf > h {
            break;
        }
    }
    sum
}

/// Large-argument expansion `sqrt(2/(πx)) (P cos χ - Q sin χ)`, truncated at the
/// smallest term.
fn hankel(n: u32, x: f64) -> f64 {
    let mu = 4.0 * (n * n) as f64;
    let inv8x = 1.0 / (8.0 * x);
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a: f64 = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        a *= (mu - odd * odd) * inv8x / k as f64;
        if a.abs() >= last || a == 0.0 {
            break;
        }
        last = a.abs();
        match k % 4 {
            1 => q += a,
            2 => p -= a,
            3 => q -= a,
            _ => p += a,
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - (0.5 * n as f64 + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Bessel integral `(1/π) ∫_0^π cos(nτ - x sin τ) dτ` by the trapezoid rule,
    /// which is spectrally accurate for this periodic integrand.
    fn integral_oracle(n: u32, x: f64) -> f64 {
        let m = 4000 + 4 * x as usize;
        let h = PI / m as f64;
        let f = |t: f64| (n as f64 * t - x * t.sin()).cos();
        let mut s = 0.5 * (f(0.0) + f(PI));
        for j in 1..m {
            s += f(j as f64 * h);
        }
        s * h / PI
    }

    #[test]
    fn agrees_with_integral_representation() {
        for &x in &[0.0, 0.3, 1.0, 2.5, 7.0, 11.9, 12.1, 15.0, 40.0, 123.4, 1000.5] {
            let tol = if x < SERIES_LIMIT { 1e-12 } else { 1e-10 * (2.0 / (PI * x)).sqrt() };
            assert!((j0(x) - integral_oracle(0, x)).abs() < tol, "J0({x})");
            assert!((j1(x) - integral_oracle(1, x)).abs() < tol, "J1({x})");
        }
    }

    #[test]
    fn seam_matches_long_series() {
        let envelope = (2.0 / (PI * SERIES_LIMIT)).sqrt();
        for &x in &[SERIES_LIMIT, SERIES_LIMIT + 1e-9, SERIES_LIMIT + 0.5] {
            for n in [0, 1] {
                let reference = series(n, x, 50);
                let got = if n == 0 { j0(x) } else { j1(x) };
                assert!((got - reference).abs() / envelope < 1e-10, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn parity_and_small_argument() {
        assert_eq!(j0(0.0), 1.0);
        assert_eq!(j1(0.0), 0.0);
        assert!((j1(-3.0) + j1(3.0)).abs() < 1e-16);
        assert!((j0(-3.0) - j0(3.0)).abs() < 1e-16);
        assert!((j1(1e-6) - 5e-7).abs() < 1e-18);
    }
}
