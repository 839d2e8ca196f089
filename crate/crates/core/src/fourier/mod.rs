//! Fourier transform of the body's indicator: quadrature, stationary-phase
//! asymptotics, pointwise decay bounds and rotational `L^p` averages.
//!
//! Convention: `χ̂(ξ) = ∫_Ω e^{-2πi ξ·x} dx`. Because the body is a body of
//! revolution about the last axis, `χ̂` depends only on `|ξ'|` and `ξ_d`.

pub mod bessel;
mod slice;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::body::FlatPointBody;
use crate::error::{Error, Result};
use crate::quadrature::pairwise_sum;
use slice::SliceIntegral;

/// Polar description of a frequency relative to the symmetry axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frequency {
    pub rho: f64,
    /// Angle between ξ and the symmetry axis, in `[0, π]`.
    pub theta: f64,
}

impl Frequency {
    pub fn new(rho: f64, theta: f64) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::invalid("rho", rho, "radial frequency must be positive"));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::invalid("theta", theta, "polar angle must lie in [0, pi]"));
        }
        Ok(Frequency { rho, theta })
    }

    /// Polar form of a nonzero vector.
    pub fn from_vector(xi: &[f64]) -> Result<Self> {
        let (h, v) = xi.split_at(xi.len() - 1);
        let s = h.iter().map(|x| x * x).sum::<f64>().sqrt();
        Frequency::new(s.hypot(v[0]), s.atan2(v[0]))
    }

    /// `|ξ'|` and `ξ_d`.
    pub fn parts(&self) -> (f64, f64) {
        let (sn, cs) = self.theta.sin_cos();
        (self.rho * sn, self.rho * cs)
    }

    /// Unit direction `Θ = (sin θ ω', cos θ)` with `ω' = e_1`.
    pub fn direction(&self, d: usize) -> Vec<f64> {
        let mut v = vec![0.0; d];
        v[0] = self.theta.sin();
        v[d - 1] = self.theta.cos();
        v
    }

    pub fn to_vector(&self, d: usize) -> Vec<f64> {
        self.direction(d).into_iter().map(|c| c * self.rho).collect()
    }
}

/// A transform value with a nonnegative error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiHatValue {
    pub value: Complex64,
    pub estimated_error: f64,
}

/// Stopping rule for panel doubling: successive values within `max(absolute, relative·|value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub absolute: f64,
    pub relative: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            absolute: 1e-10,
            relative: 1e-4,
        }
    }
}

/// `χ̂` at a frequency given in polar form.
pub fn chi_hat(body: &FlatPointBody, freq: Frequency) -> Result<ChiHatValue> {
    let (s, xd) = freq.parts();
    chi_hat_parts(body, s, xd, Tolerance::default())
}

/// `χ̂(ξ)` for an arbitrary vector, including `ξ = 0`.
pub fn chi_hat_at(body: &FlatPointBody, xi: &[f64]) -> Result<ChiHatValue> {
    if xi.len() != body.dim() {
        return Err(Error::invalid("xi", format!("{xi:?}"), format!("expected {} components", body.dim())));
    }
    let (h, v) = xi.split_at(xi.len() - 1);
    let s = h.iter().map(|x| x * x).sum::<f64>().sqrt();
    chi_hat_parts(body, s, v[0], Tolerance::default())
}

/// `χ̂` from `|ξ'|` and `ξ_d` with an explicit stopping rule.
pub fn chi_hat_parts(body: &FlatPointBody, s: f64, xd: f64, tol: Tolerance) -> Result<ChiHatValue> {
    let (value, estimated_error, _) = SliceIntegral::new(body, s, xd)?.adaptive(tol.absolute, tol.relative)?;
    Ok(ChiHatValue { value, estimated_error })
}

/// Single-pass `χ̂` on panels fine enough for near machine precision; used for
/// bulk evaluation where the doubling check would triple the cost.
pub fn chi_hat_fast(body: &FlatPointBody, s: f64, xd: f64) -> Result<Complex64> {
    Ok(SliceIntegral::new(body, s, xd)?.fast())
}

/// Polar angle below which the flat point blocks the two-point expansion.
pub const ASYMPTOTIC_MIN_ANGLE: f64 = 0.1;

/// Two-point stationary-phase approximation of `χ̂`.
///
/// The error estimate is the nominal size `ρ^{-(d+3)/2}(K₁^{-1/2}+K₂^{-1/2})/(2π)` of
/// the next-order term.
pub fn chi_hat_asymptotic(body: &FlatPointBody, freq: Frequency) -> Result<ChiHatValue> {
    let d = body.dim();
    if freq.theta < ASYMPTOTIC_MIN_ANGLE || freq.theta > PI - ASYMPTOTIC_MIN_ANGLE {
        return Err(Error::Domain(format!(
            "theta = {} is within {ASYMPTOTIC_MIN_ANGLE} rad of the flat direction",
            freq.theta
        )));
    }
    let dir = freq.direction(d);
    let neg: Vec<f64> = dir.iter().map(|v| -v).collect();
    let p1 = body.support_point(&neg)?;
    let p2 = body.support_point(&dir)?;
    let (k1, k2) = (p1.gaussian_curvature, p2.gaussian_curvature);
    if !(k1 > 0.0 && k2 > 0.0) {
        return Err(Error::Domain(format!("support points have curvature {k1}, {k2}; need both positive")));
    }
    let dot = |p: &[f64]| dir.iter().zip(p).map(|(a, b)| a * b).sum::<f64>();
    let shift = PI * (d as f64 - 1.0) / 4.0;
    let rho = freq.rho;
    let term1 = Complex64::from_polar(k1.powf(-0.5), -TAU * rho * dot(&p1.point) - shift);
    let term2 = Complex64::from_polar(k2.powf(-0.5), -TAU * rho * dot(&p2.point) + shift);
    let scale = rho.powf(-(d as f64 + 1.0) / 2.0);
    let value = (term1 - term2) * scale / Complex64::new(0.0, TAU);
    let envelope = (k1.powf(-0.5) + k2.powf(-0.5)) / TAU;
    Ok(ChiHatValue {
        value,
        estimated_error: envelope * rho.powf(-(d as f64 + 3.0) / 2.0),
    })
}

/// Minimum of the three pointwise decay shapes for a flat point of order γ,
/// times `calibration`. Shapes that are infinite (vanishing `|ξ'|` or `ξ_d`) are dropped.
pub fn decay_bound(body: &FlatPointBody, freq: Frequency, calibration: f64) -> Result<f64> {
    if freq.rho < 1.0 {
        return Err(Error::invalid("rho", freq.rho, "decay bound needs rho >= 1"));
    }
    if !(calibration > 0.0) {
        return Err(Error::invalid("calibration", calibration, "must be positive"));
    }
    let (s, xd) = freq.parts();
    Ok(calibration * decay_shape(body.dim(), body.gamma(), s, xd.abs(), freq.rho))
}

pub(crate) fn decay_shape(d: usize, gamma: f64, s: f64, xd: f64, rho: f64) -> f64 {
    let dm = d as f64 - 1.0;
    let eps = 1e-12 * rho;
    let (s, xd) = (if s <= eps { 0.0 } else { s }, if xd <= eps { 0.0 } else { xd });
    let mut best = f64::INFINITY;
    if xd > 0.0 {
        best = best.min(xd.powf(-1.0 - dm / gamma));
        let sp = dm * (gamma - 2.0) / (2.0 * (gamma - 1.0));
        if s > 0.0 || sp == 0.0 {
            let sf = if sp == 0.0 { 1.0 } else { s.powf(-sp) };
            best = best.min(sf * xd.powf(-dm / (2.0 * (gamma - 1.0)) - 1.0));
        }
    }
    if s > 0.0 {
        best = best.min(s.powf(-(d as f64 + 1.0) / 2.0));
    }
    best
}

/// Options for [`rotational_lp_average_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationalOptions {
    /// Relative change of the angular integral between doublings.
    pub tolerance: f64,
    pub max_intervals: usize,
}

impl Default for RotationalOptions {
    fn default() -> Self {
        RotationalOptions {
            tolerance: 1e-4,
            max_intervals: 1 << 18,
        }
    }
}

/// Rotational average together with its quadrature diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationalAverage {
    pub value: f64,
    pub intervals: usize,
    pub last_change: f64,
}

/// `(∫_{S^{d-1}} |χ̂(ρω)|^p dω)^{1/p}` with normalized surface measure.
pub fn rotational_lp_average(body: &FlatPointBody, rho: f64, p: f64) -> Result<f64> {
    rotational_lp_average_with(body, rho, p, RotationalOptions::default()).map(|a| a.value)
}

/// Angular quadrature on the equispaced polar grid `θ_j = jπ/N`, doubling `N`
/// until the integral changes by less than the tolerance. In d = 2 the integrand is
/// even and periodic, so the trapezoid rule converges spectrally; in d = 3 the
/// `sin θ` weight is absorbed by Clenshaw–Curtis on the same nodes.
pub fn rotational_lp_average_with(
    body: &FlatPointBody,
    rho: f64,
    p: f64,
    opts: RotationalOptions,
) -> Result<RotationalAverage> {
    let d = body.dim();
    if d != 2 && d != 3 {
        return Err(Error::UnsupportedDimension(d, "2 or 3"));
    }
    if !(rho >= 1.0) {
        return Err(Error::invalid("rho", rho, "must be >= 1"));
    }
    if !(p >= 1.0) {
        return Err(Error::invalid("p", p, "must be >= 1"));
    }
    let g = body.gamma();
    let band = 0.5 * p.max(2.0) * rho * body.height();
    let pole = 4.0 * PI * rho.powf(1.0 - 1.0 / g);
    let mut n = (band.max(pole).max(64.0).ceil() as usize).next_power_of_two();

    // |χ̂(ρ, π - θ)| = |χ̂(ρ, θ)|: only θ ∈ [0, π/2] is evaluated.
    let eval = |theta: f64| -> Result<f64> {
        let (sn, cs) = theta.sin_cos();
        Ok(chi_hat_fast(body, rho * sn, rho * cs)?.norm().powf(p))
    };
    let mut half: Vec<f64> = (0..=n / 2)
        .into_par_iter()
        .map(|j| eval(j as f64 * PI / n as f64))
        .collect::<Result<_>>()?;
    let mut prev = angular_integral(d, &half, n);
    loop {
        if 2 * n > opts.max_intervals {
            return Err(Error::Quadrature {
                what: format!("rotational L^{p} average at rho={rho}"),
                last_change: f64::NAN,
                tolerance: opts.tolerance,
                nodes: n,
            });
        }
        let m = 2 * n;
        let odd: Vec<f64> = (0..n / 2)
            .into_par_iter()
            .map(|k| eval((2 * k + 1) as f64 * PI / m as f64))
            .collect::<Result<_>>()?;
        let mut next = Vec::with_capacity(n + 1);
        for k in 0..n / 2 {
            next.push(half[k]);
            next.push(odd[k]);
        }
        next.push(half[n / 2]);
        half = next;
        n = m;
        let cur = angular_integral(d, &half, n);
        let change = (cur - prev).abs() / cur.abs().max(f64::MIN_POSITIVE);
        if change < opts.tolerance {
            return Ok(RotationalAverage {
                value: cur.powf(1.0 / p),
                intervals: n,
                last_change: change,
            });
        }
        prev = cur;
    }
}

/// Normalized angular integral from values at `θ_j = jπ/n`, `j = 0..=n/2`,
/// extended by symmetry about `π/2`.
fn angular_integral(d: usize, half: &[f64], n: usize) -> f64 {
    let m = n / 2;
    if d == 2 {
        // (1/π) · trapezoid over [0, π].
        let mut terms = Vec::with_capacity(m + 1);
        terms.push(half[0]);
        terms.extend(half[1..m].iter().map(|v| 2.0 * v));
        terms.push(half[m]);
        pairwise_sum(&terms) / n as f64
    } else {
        // (1/2) ∫_{-1}^{1} g dx with Clenshaw–Curtis weights on x_j = cos(jπ/n).
        let w = clenshaw_curtis_weights(n);
        let mut terms = Vec::with_capacity(m + 1);
        for j in 0..m {
            terms.push(2.0 * w[j] * half[j]);
        }
        terms.push(w[m] * half[m]);
        0.5 * pairwise_sum(&terms)
    }
}

/// Clenshaw–Curtis weights on `cos(jπ/n)`, `j = 0..=n`, for even `n`.
pub fn clenshaw_curtis_weights(n: usize) -> Vec<f64> {
    assert!(n >= 2 && n % 2 == 0);
    let cos_table: Vec<f64> = (0..2 * n).map(|k| (k as f64 * PI / n as f64).cos()).collect();
    (0..=n)
        .map(|j| {
            let c = if j == 0 || j == n { 1.0 } else { 2.0 };
            let mut s = 0.0;
            for k in 1..=n / 2 {
                let b = if k == n / 2 { 1.0 } else { 2.0 };
                s += b / (4.0 * (k * k) as f64 - 1.0) * cos_table[(2 * k * j) % (2 * n)];
            }
            c / n as f64 * (1.0 - s)
        })
        .collect()
}

/// Largest ratio `|χ̂| / shape` over the given frequencies: the smallest
/// calibration for which [`decay_bound`] dominates there.
pub fn calibrate_decay_bound(body: &FlatPointBody, freqs: &[Frequency]) -> Result<f64> {
    let ratios: Vec<f64> = freqs
        .par_iter()
        .map(|f| {
            let (s, xd) = f.parts();
            let v = chi_hat_fast(body, s, xd)?.norm();
            Ok(v / decay_shape(body.dim(), body.gamma(), s, xd.abs(), f.rho))
        })
        .collect::<Result<_>>()?;
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

/// `χ̂(R σᵀ n)` for one representative `n` of each pair `±n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeTerm {
    pub n: Vec<i64>,
    pub chi_hat: Complex64,
}

/// Nonzero integer vectors with `|n| <= cutoff` whose first nonzero coordinate is positive.
pub fn half_lattice_ball(dim: usize, cutoff: f64) -> Vec<Vec<i64>> {
    let c = cutoff.floor() as i64;
    let c2 = cutoff * cutoff;
    let mut out = Vec::new();
    let mut n = vec![-c; dim];
    loop {
        let norm2: f64 = n.iter().map(|&v| (v * v) as f64).sum();
        let first = n.iter().find(|&&v| v != 0);
        if norm2 <= c2 && matches!(first, Some(&v) if v > 0) {
            out.push(n.clone());
        }
        let mut k = dim;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if n[k] < c {
                n[k] += 1;
                break;
            }
            n[k] = -c;
        }
    }
}

/// Transform values `χ̂(R σᵀ n)` over [`half_lattice_ball`], evaluated in parallel
/// and returned in lattice order.
pub fn lattice_transform(
    body: &FlatPointBody,
    dilation: f64,
    rotation: &crate::lattice::Rotation,
    cutoff: f64,
) -> Result<Vec<LatticeTerm>> {
    let d = body.dim();
    half_lattice_ball(d, cutoff)
        .into_par_iter()
        .map(|n| {
            let nf: Vec<f64> = n.iter().map(|&v| v as f64 * dilation).collect();
            let xi = rotation.apply_inverse(&nf);
            let s = xi[..d - 1].iter().map(|v| v * v).sum::<f64>().sqrt();
            let chi_hat = chi_hat_fast(body, s, xi[d - 1])?;
            Ok(LatticeTerm { n, chi_hat })
        })
        .collect()
}

/// One row of the `fourier-probe` CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub rho: f64,
    pub theta: f64,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
    pub bound: f64,
    /// Empty when the direction is too close to the flat point for the expansion.
    pub asymptotic_abs: Option<f64>,
}

impl ProbeRecord {
    pub fn compute(body: &FlatPointBody, freq: Frequency, calibration: f64) -> Result<Self> {
        let v = chi_hat(body, freq)?.value;
        let asymptotic_abs = chi_hat_asymptotic(body, freq).ok().map(|a| a.value.norm());
        Ok(ProbeRecord {
            rho: freq.rho,
            theta: freq.theta,
            re: v.re,
            im: v.im,
            abs: v.norm(),
            bound: decay_bound(body, freq, calibration)?,
            asymptotic_abs,
        })
    }
}

/// One row of the `rot-decay` CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotDecayRecord {
    pub d: usize,
    pub gamma: f64,
    pub rho: f64,
    pub p: f64,
    pub average: f64,
}
