//! Verification suite: exponent fits, oracle equivalences and prediction
//! identities, each reported with its predicted value, fitted value and window.

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::str::FromStr;

use crate::body::FlatPointBody;
use crate::error::{Error, Result};
use crate::fourier::{chi_hat_asymptotic, chi_hat_parts, rotational_lp_average, Frequency, Tolerance};
use crate::lattice::{count_points_with_stats, haar_rotation_from_rng, Rotation};
use crate::norms::{fit_exponent, geometric_grid, parseval_check, DiscrepancySamples, FitResult, NormEstimate};
use crate::predictions::{predicted_exponent, regime_boundaries, Mode};
use crate::rng::sample_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Quick,
    Full,
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Suite::Quick),
            "full" => Ok(Suite::Full),
            _ => Err(Error::invalid("suite", s, "expected quick or full")),
        }
    }
}

/// Sample sizes and grids for one suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Dilations of the d = 2 joint sweeps.
    pub joint_grid: Vec<f64>,
    pub joint_rotations: usize,
    pub joint_translations: usize,
    pub sweep_gammas: Vec<f64>,
    pub sweep_ps: Vec<f64>,
    pub rotation_only_grid: Vec<f64>,
    pub rotation_only_rotations: usize,
    pub parseval_dilation: f64,
    pub parseval_translations: usize,
    pub parseval_cutoff: f64,
    /// Log-spaced points per frequency range.
    pub axis_points: usize,
    pub rotational_points: usize,
    pub stationary_points: usize,
    /// Random placements per dimension.
    pub count_placements: usize,
    pub d3_grid: Vec<f64>,
    pub d3_rotations: usize,
    pub d3_translations: usize,
}

impl SuiteConfig {
    pub fn full(seed: u64) -> Self {
        SuiteConfig {
            seed,
            joint_grid: geometric_grid(32.0, 2048.0, 2.0).unwrap(),
            joint_rotations: 64,
            joint_translations: 64,
            sweep_gammas: vec![2.0, 3.0, 4.0, 6.0],
            sweep_ps: vec![1.0, 2.0, 4.0],
            rotation_only_grid: geometric_grid(32.0, 1024.0, 2.0).unwrap(),
            rotation_only_rotations: 256,
            parseval_dilation: 64.0,
            parseval_translations: 20_000,
            parseval_cutoff: 80.0,
            axis_points: 129,
            rotational_points: 65,
            stationary_points: 129,
            count_placements: 100,
            d3_grid: geometric_grid(16.0, 128.0, 2.0).unwrap(),
            d3_rotations: 32,
            d3_translations: 32,
        }
    }

    pub fn quick(seed: u64) -> Self {
        SuiteConfig {
            joint_grid: geometric_grid(16.0, 512.0, 2.0).unwrap(),
            joint_rotations: 24,
            joint_translations: 24,
            rotation_only_grid: geometric_grid(32.0, 512.0, 2.0).unwrap(),
            rotation_only_rotations: 128,
            parseval_dilation: 64.0,
            parseval_translations: 5000,
            axis_points: 33,
            rotational_points: 9,
            stationary_points: 33,
            count_placements: 20,
            d3_grid: geometric_grid(8.0, 64.0, 2.0).unwrap(),
            d3_rotations: 12,
            d3_translations: 12,
            ..SuiteConfig::full(seed)
        }
    }

    pub fn for_suite(suite: Suite, seed: u64) -> Self {
        match suite {
            Suite::Quick => SuiteConfig::quick(seed),
            Suite::Full => SuiteConfig::full(seed),
        }
    }
}

/// Outcome of one check. Missing bounds are unbounded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub predicted: f64,
    pub fitted: f64,
    pub stderr: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub pass: bool,
    pub note: String,
}

impl CheckReport {
    fn window(check: String, predicted: f64, fitted: f64, stderr: f64, lower: Option<f64>, upper: Option<f64>) -> Self {
        let pass = fitted.is_finite() && lower.is_none_or(|l| fitted >= l) && upper.is_none_or(|u| fitted <= u);
        CheckReport {
            check,
            predicted,
            fitted,
            stderr,
            lower,
            upper,
            pass,
            note: String::new(),
        }
    }

    fn from_fit(check: String, predicted: f64, fit: &FitResult, lower: Option<f64>, upper: Option<f64>) -> Self {
        let mut r = CheckReport::window(check, predicted, fit.slope, fit.slope_stderr, lower, upper);
        r.note = format!("r2={:.4} points={}", fit.r_squared, fit.n_points);
        if let Some(d) = fit.dropped_r {
            r.note.push_str(&format!(" dropped={d}"));
        }
        r
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub seed: u64,
    pub version: String,
    pub checks: Vec<CheckReport>,
    pub passed: bool,
}

/// `n` log-spaced points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64))
        .collect()
}

fn fit_points(xs: &[f64], ys: &[f64]) -> Result<FitResult> {
    let series: Vec<NormEstimate> = xs
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
    fit_exponent(&series)
}

/// Joint samples for every flatness order of the d = 2 sweep.
#[derive(Debug, Clone)]
pub struct JointSweep {
    pub gammas: Vec<f64>,
    pub samples: Vec<Vec<DiscrepancySamples>>,
}

impl JointSweep {
    pub fn run(cfg: &SuiteConfig) -> Result<Self> {
        let samples = cfg
            .sweep_gammas
            .iter()
            .map(|&g| {
                let body = FlatPointBody::with(2, g)?;
                cfg.joint_grid
                    .iter()
                    .map(|&r| DiscrepancySamples::draw(&body, r, cfg.joint_rotations, cfg.joint_translations, cfg.seed))
                    .collect()
            })
            .collect::<Result<_>>()?;
        Ok(JointSweep {
            gammas: cfg.sweep_gammas.clone(),
            samples,
        })
    }

    pub fn fit(&self, gamma: f64, p: f64) -> Result<FitResult> {
        let k = self
            .gammas
            .iter()
            .position(|&g| g == gamma)
            .ok_or_else(|| Error::invalid("gamma", gamma, "not part of the sweep"))?;
        let est: Vec<NormEstimate> = self.samples[k].iter().map(|s| s.lp_norm(p)).collect::<Result<_>>()?;
        fit_exponent(&est)
    }
}

/// `L²` slope in `[0.40, 0.60]`.
pub fn check_l2_exponent(sweep: &JointSweep, gamma: f64) -> Result<CheckReport> {
    let fit = sweep.fit(gamma, 2.0)?;
    let pred = predicted_exponent(2, gamma, 2.0, Mode::Joint)?.exponent;
    Ok(CheckReport::from_fit(format!("joint_L2_slope d=2 gamma={gamma}"), pred, &fit, Some(0.40), Some(0.60)))
}

/// Slopes at least the lower-bound exponent minus 0.07.
pub fn check_lower_bounds(sweep: &JointSweep, ps: &[f64]) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for &g in &sweep.gammas {
        for &p in ps {
            let fit = sweep.fit(g, p)?;
            let pred = predicted_exponent(2, g, p, Mode::LowerBound)?.exponent;
            out.push(CheckReport::from_fit(
                format!("lower_bound_slope d=2 gamma={g} p={p}"),
                pred,
                &fit,
                Some(pred - 0.07),
                None,
            ));
        }
    }
    Ok(out)
}

/// Slopes at most the predicted joint exponent plus 0.10.
pub fn check_upper_bounds(sweep: &JointSweep, ps: &[f64]) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for &g in &sweep.gammas {
        for &p in ps {
            let fit = sweep.fit(g, p)?;
            let pred = predicted_exponent(2, g, p, Mode::Joint)?.exponent;
            out.push(CheckReport::from_fit(
                format!("upper_bound_slope d=2 gamma={g} p={p}"),
                pred,
                &fit,
                None,
                Some(pred + 0.10),
            ));
        }
    }
    Ok(out)
}

/// `L¹` over rotations at `t = 0`: slope at most `d(d-1)/(d+1) + 0.10`.
pub fn check_rotation_only(cfg: &SuiteConfig, gamma: f64) -> Result<CheckReport> {
    let body = FlatPointBody::with(2, gamma)?;
    let est: Vec<NormEstimate> = cfg
        .rotation_only_grid
        .iter()
        .map(|&r| DiscrepancySamples::draw_rotations(&body, r, cfg.rotation_only_rotations, cfg.seed)?.lp_norm(1.0))
        .collect::<Result<_>>()?;
    let fit = fit_exponent(&est)?;
    let pred = predicted_exponent(2, gamma, 1.0, Mode::RotationOnlyL1)?.exponent;
    Ok(CheckReport::from_fit(
        format!("rotation_only_L1_slope d=2 gamma={gamma}"),
        pred,
        &fit,
        None,
        Some(pred + 0.10),
    ))
}

/// Mean square discrepancy against the truncated lattice Fourier sum.
pub fn check_parseval(cfg: &SuiteConfig) -> Result<CheckReport> {
    let body = FlatPointBody::with(2, 3.0)?;
    let c = parseval_check(
        &body,
        cfg.parseval_dilation,
        &Rotation::identity(2),
        cfg.parseval_translations,
        cfg.parseval_cutoff,
        cfg.seed,
    )?;
    let mut r = CheckReport::window(
        format!("parseval_ratio d=2 gamma=3 R={}", cfg.parseval_dilation),
        1.0,
        c.ratio,
        c.lhs_stderr / c.rhs,
        Some(0.95),
        Some(1.05),
    );
    r.note = format!("lhs={:.6e} rhs={:.6e} tail={:.3e} terms={}", c.lhs, c.rhs, c.tail_estimate, c.terms);
    Ok(r)
}

/// `|χ̂(0, ρ)|` slope `-(1 + (d-1)/γ) ± 0.08` over `ρ ∈ [32, 1024]`.
pub fn check_axis_decay(cfg: &SuiteConfig, gamma: f64) -> Result<CheckReport> {
    let body = FlatPointBody::with(2, gamma)?;
    let rhos = log_grid(32.0, 1024.0, cfg.axis_points);
    let vals: Vec<f64> = rhos
        .iter()
        .map(|&rho| Ok(chi_hat_parts(&body, 0.0, rho, Tolerance::default())?.value.norm()))
        .collect::<Result<_>>()?;
    let fit = fit_points(&rhos, &vals)?;
    let pred = -(1.0 + 1.0 / gamma);
    Ok(CheckReport::from_fit(
        format!("axis_decay_slope d=2 gamma={gamma}"),
        pred,
        &fit,
        Some(pred - 0.08),
        Some(pred + 0.08),
    ))
}

/// Rotational `L^p` average of `χ̂` over `ρ ∈ [32, 512]`, d = 2, γ = 4.
pub fn check_rotational_decay(cfg: &SuiteConfig, p: f64, tol: f64) -> Result<CheckReport> {
    let body = FlatPointBody::with(2, 4.0)?;
    let rhos = log_grid(32.0, 512.0, cfg.rotational_points);
    let vals: Vec<f64> = rhos
        .iter()
        .map(|&rho| rotational_lp_average(&body, rho, p))
        .collect::<Result<_>>()?;
    let fit = fit_points(&rhos, &vals)?;
    let pred = predicted_exponent(2, 4.0, p, Mode::FourierRot)?.exponent;
    Ok(CheckReport::from_fit(
        format!("rotational_average_slope d=2 gamma=4 p={p}"),
        pred,
        &fit,
        Some(pred - tol),
        Some(pred + tol),
    ))
}

/// Stationary-phase remainder at `θ = π/3`: slope `-(d+3)/2 ± 0.3` over `ρ ∈ [64, 512]`.
pub fn check_stationary_phase(cfg: &SuiteConfig) -> Result<CheckReport> {
    let body = FlatPointBody::with(2, 2.0)?;
    let rhos = log_grid(64.0, 512.0, cfg.stationary_points);
    let tol = Tolerance {
        absolute: 1e-14,
        relative: 1e-9,
    };
    let vals: Vec<f64> = rhos
        .iter()
        .map(|&rho| {
            let f = Frequency::new(rho, PI / 3.0)?;
            let (s, xd) = f.parts();
            let exact = chi_hat_parts(&body, s, xd, tol)?.value;
            Ok((exact - chi_hat_asymptotic(&body, f)?.value).norm())
        })
        .collect::<Result<_>>()?;
    let fit = fit_points(&rhos, &vals)?;
    Ok(CheckReport::from_fit(
        "stationary_phase_remainder_slope d=2 gamma=2 theta=pi/3".into(),
        -2.5,
        &fit,
        Some(-2.8),
        Some(-2.2),
    ))
}

/// Lattice points of `R σ(Ω) + t` by scanning every integer point in the
/// axis-parallel hull of the rotated bounding cylinder.
pub fn brute_force_count(body: &FlatPointBody, r: f64, rot: &Rotation, t: &[f64]) -> u64 {
    let d = body.dim();
    let (rc, h) = (body.rho_c(), body.height());
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for mask in 0..(1usize << d) {
        let corner: Vec<f64> = (0..d)
            .map(|i| {
                let bit = mask >> i & 1 == 1;
                match (i == d - 1, bit) {
                    (true, b) => if b { h } else { 0.0 },
                    (false, b) => if b { rc } else { -rc },
                }
            })
            .collect();
        let x = rot.apply(&corner);
        for i in 0..d {
            let v = r * x[i] + t[i];
            lo[i] = lo[i].min(v);
            hi[i] = hi[i].max(v);
        }
    }
    let ranges: Vec<(i64, i64)> = (0..d).map(|i| (lo[i].floor() as i64 - 1, hi[i].ceil() as i64 + 1)).collect();
    let mut n: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    let mut count = 0;
    loop {
        let v: Vec<f64> = (0..d).map(|i| (n[i] as f64 - t[i]) / r).collect();
        if body.contains(&rot.apply_inverse(&v)) {
            count += 1;
        }
        let mut k = 0;
        loop {
            if k == d {
                return count;
            }
            if n[k] < ranges[k].1 {
                n[k] += 1;
                break;
            }
            n[k] = ranges[k].0;
            k += 1;
        }
    }
}

/// Random placements with `R ≤ 20`: the column counter against [`brute_force_count`].
pub fn check_count_oracle(cfg: &SuiteConfig) -> Result<CheckReport> {
    let mut mismatches = 0;
    let mut total = 0;
    for d in [2usize, 3] {
        for i in 0..cfg.count_placements as u64 {
            let mut rng = sample_rng(cfg.seed, 0xC0_u64 + d as u64, i);
            let gamma = rng.random_range(2.0..8.0);
            let body = FlatPointBody::with(d, gamma)?;
            let r = rng.random_range(1.0..20.0);
            let rot = haar_rotation_from_rng(d, &mut rng)?;
            let t: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
            let fast = count_points_with_stats(&body, r, &rot, &t).count;
            if fast != brute_force_count(&body, r, &rot, &t) {
                mismatches += 1;
            }
            total += 1;
        }
    }
    let mut rep = CheckReport::window("count_oracle mismatches".into(), 0.0, mismatches as f64, 0.0, None, Some(0.0));
    rep.note = format!("{total} placements");
    Ok(rep)
}

/// Value at `p` extrapolated from the left (`dir = -1`) or right (`dir = 1`) by a
/// cubic through `p + dir·k·h`, `k = 1, 2, 3`.
fn one_sided(f: &dyn Fn(f64) -> Result<f64>, p: f64, dir: f64) -> Result<f64> {
    let h = 1e-5 * p;
    let v = |k: f64| f(p + dir * k * h);
    Ok(3.0 * v(1.0)? - 3.0 * v(2.0)? + v(3.0)?)
}

/// Largest residual of the regime-boundary identities over `d = 2..=6` and
/// `γ ∈ {2.1, 3, d+1, 10}`, plus the `p → ∞` limit of the joint exponent against
/// the sup exponent.
pub fn prediction_identity_residuals() -> Result<(f64, f64)> {
    let mut boundary: f64 = 0.0;
    let mut limit: f64 = 0.0;
    for d in 2..=6usize {
        let df = d as f64;
        for gamma in [2.1, 3.0, df + 1.0, 10.0] {
            let b = regime_boundaries(d, gamma)?;
            let joint = |p: f64| Ok(predicted_exponent(d, gamma, p, Mode::Joint)?.exponent);
            let rot = |p: f64| Ok(predicted_exponent(d, gamma, p, Mode::FourierRot)?.exponent);
            let mut push = |a: f64, b: f64| boundary = boundary.max((a - b).abs());

            push(one_sided(&joint, 2.0, 1.0)?, joint(2.0)?);
            if gamma < df + 1.0 {
                let at_star = joint(b.p_star)?;
                push(one_sided(&joint, b.p_star, -1.0)?, at_star);
                push(at_star, (df - 1.0) / 2.0);
                push(one_sided(&joint, b.p_star, 1.0)?, at_star);
                if b.p_flat.is_finite() {
                    let at_flat = df * (df - 1.0) / (df + gamma - 1.0);
                    push(joint(b.p_flat)?, at_flat);
                    push(one_sided(&joint, b.p_flat, -1.0)?, at_flat);
                    push(one_sided(&joint, b.p_flat, 1.0)?, at_flat);
                }
            } else if gamma > df + 1.0 {
                let half = (df - 1.0) / 2.0;
                push(joint(b.p_flat)?, half);
                push(one_sided(&joint, b.p_flat, -1.0)?, half);
                push(one_sided(&joint, b.p_flat, 1.0)?, half);
                let mix = (df - 1.0) * (1.0 - 1.0 / gamma) * df * gamma / ((2.0 * df - 1.0) * gamma - (df - 1.0));
                push(joint(b.p_mix)?, mix);
            } else {
                push(b.p_star, b.p_flat);
                push(b.p_star, b.p_mix);
            }
            if b.p_flat.is_finite() {
                let edge = -(df + 1.0) / 2.0;
                push(one_sided(&rot, b.p_flat, -1.0)?, edge);
                push(one_sided(&rot, b.p_flat, 1.0)?, edge);
            }

            let far = predicted_exponent(d, gamma, 1e15, Mode::Joint)?.exponent;
            let sup = predicted_exponent(d, gamma, 1.0, Mode::Sup)?.exponent;
            limit = limit.max((far - sup).abs());
        }
    }
    Ok((boundary, limit))
}

pub fn check_prediction_algebra() -> Result<Vec<CheckReport>> {
    let (boundary, limit) = prediction_identity_residuals()?;
    Ok(vec![
        CheckReport::window("regime_boundary_continuity max_residual".into(), 0.0, boundary, 0.0, None, Some(1e-12)),
        CheckReport::window("p_infinity_limit_vs_sup max_residual".into(), 0.0, limit, 0.0, None, Some(1e-12)),
    ])
}

/// d = 3, γ = 2, `L²` slope in `[0.80, 1.20]`.
pub fn check_three_dim(cfg: &SuiteConfig) -> Result<CheckReport> {
    let body = FlatPointBody::with(3, 2.0)?;
    let est: Vec<NormEstimate> = cfg
        .d3_grid
        .iter()
        .map(|&r| DiscrepancySamples::draw(&body, r, cfg.d3_rotations, cfg.d3_translations, cfg.seed)?.lp_norm(2.0))
        .collect::<Result<_>>()?;
    let fit = fit_exponent(&est)?;
    let pred = predicted_exponent(3, 2.0, 2.0, Mode::Joint)?.exponent;
    Ok(CheckReport::from_fit("joint_L2_slope d=3 gamma=2".into(), pred, &fit, Some(0.80), Some(1.20)))
}

/// Every check of the suite, in a fixed order.
pub fn run_suite(suite: Suite, seed: u64) -> Result<VerifyReport> {
    let cfg = SuiteConfig::for_suite(suite, seed);
    let sweep = JointSweep::run(&cfg)?;
    let mut checks = vec![check_l2_exponent(&sweep, 2.0)?, check_l2_exponent(&sweep, 6.0)?];
    checks.extend(check_lower_bounds(&sweep, &cfg.sweep_ps)?);
    checks.extend(check_upper_bounds(&sweep, &cfg.sweep_ps)?);
    for g in [2.0, 4.0] {
        checks.push(check_rotation_only(&cfg, g)?);
    }
    checks.push(check_parseval(&cfg)?);
    for g in [2.0, 4.0] {
        checks.push(check_axis_decay(&cfg, g)?);
    }
    checks.push(check_rotational_decay(&cfg, 2.0, 0.10)?);
    checks.push(check_rotational_decay(&cfg, 8.0, 0.08)?);
    checks.push(check_stationary_phase(&cfg)?);
    checks.push(check_count_oracle(&cfg)?);
    checks.extend(check_prediction_algebra()?);
    checks.push(check_three_dim(&cfg)?);
    let passed = checks.iter().all(|c| c.pass);
    Ok(VerifyReport {
        suite,
        seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        checks,
        passed,
    })
}
