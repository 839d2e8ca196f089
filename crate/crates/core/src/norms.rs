//! Monte Carlo estimates of discrepancy norms over rotations and translations,
//! the Parseval cross-check against the lattice Fourier series, and log-log fits.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::body::FlatPointBody;
use crate::error::{Error, Result};
use crate::fourier::{decay_shape, lattice_transform};
use crate::lattice::{discrepancy_at, haar_rotation_from_rng, Rotation};
use crate::quadrature::pairwise_sum;
use crate::rng::{dilation_key, sample_rng};

/// Sampling scheme of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// Haar rotations × uniform translations.
    Joint,
    /// Haar rotations at translation `t = 0`.
    RotationOnly,
    /// Largest `|D|` over joint samples.
    SupSample,
}

impl SweepMode {
    pub const ALL: [SweepMode; 3] = [SweepMode::Joint, SweepMode::RotationOnly, SweepMode::SupSample];

    pub fn as_str(self) -> &'static str {
        match self {
            SweepMode::Joint => "joint",
            SweepMode::RotationOnly => "rotation_only",
            SweepMode::SupSample => "sup_sample",
        }
    }
}

impl fmt::Display for SweepMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SweepMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::invalid("mode", s, "expected joint, rotation_only or sup_sample"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    #[serde(rename = "R_grid")]
    pub r_grid: Vec<f64>,
    pub p: f64,
    pub n_rotations: usize,
    pub n_translations: usize,
    pub master_seed: u64,
    pub mode: SweepMode,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.r_grid.is_empty() {
            return Err(Error::invalid("R_grid", "[]", "at least one dilation required"));
        }
        if let Some(r) = self.r_grid.iter().find(|r| !(r.is_finite() && **r >= 1.0)) {
            return Err(Error::invalid("R_grid", r, "dilations must be >= 1"));
        }
        if self.r_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("R_grid", format!("{:?}", self.r_grid), "must be strictly increasing"));
        }
        check_p(self.p)?;
        if self.n_rotations == 0 || self.n_translations == 0 {
            return Err(Error::invalid(
                "samples",
                format!("{}x{}", self.n_rotations, self.n_translations),
                "sample counts must be >= 1",
            ));
        }
        Ok(())
    }

    /// Runs the sweep, one estimate per dilation.
    pub fn run(&self, body: &FlatPointBody) -> Result<Vec<NormEstimate>> {
        self.validate()?;
        self.r_grid
            .iter()
            .map(|&r| match self.mode {
                SweepMode::Joint => lp_norm_estimate(body, r, self.p, self.n_rotations, self.n_translations, self.master_seed),
                SweepMode::RotationOnly => rotation_only_average(body, r, self.p, self.n_rotations, self.master_seed),
                SweepMode::SupSample => sup_sample(body, r, self.n_rotations, self.n_translations, self.master_seed),
            })
            .collect()
    }
}

fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 && !p.is_nan() {
        Ok(())
    } else {
        Err(Error::invalid("p", p, "norm exponent must be >= 1"))
    }
}

fn check_dilation(r: f64) -> Result<()> {
    if r.is_finite() && r >= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid("R", r, "dilation must be >= 1"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    #[serde(rename = "R")]
    pub r: f64,
    pub p: f64,
    pub value: f64,
    pub stderr: f64,
    pub n_samples: usize,
}

/// Discrepancy values grouped by rotation: `values[i][j] = D(σ_i, t_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancySamples {
    pub r: f64,
    pub values: Vec<Vec<f64>>,
}

impl DiscrepancySamples {
    /// `n_rot` Haar rotations, each with `n_trans` uniform translations, drawn
    /// from per-rotation streams under `seed` and the dilation.
    pub fn draw(body: &FlatPointBody, r: f64, n_rot: usize, n_trans: usize, seed: u64) -> Result<Self> {
        check_dilation(r)?;
        let d = body.dim();
        let key = dilation_key(r);
        let values = (0..n_rot as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = sample_rng(seed, key, i);
                let rot = haar_rotation_from_rng(d, &mut rng)?;
                Ok((0..n_trans)
                    .map(|_| {
                        let t: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
                        discrepancy_at(body, r, &rot, &t)
                    })
                    .collect())
            })
            .collect::<Result<_>>()?;
        Ok(DiscrepancySamples { r, values })
    }

    /// Haar rotations at `t = 0`, one per group.
    pub fn draw_rotations(body: &FlatPointBody, r: f64, n_rot: usize, seed: u64) -> Result<Self> {
        check_dilation(r)?;
        let d = body.dim();
        let key = dilation_key(r);
        let origin = vec![0.0; d];
        let values = (0..n_rot as u64)
            .into_par_iter()
            .map(|i| {
                let rot = haar_rotation_from_rng(d, &mut sample_rng(seed, key, i))?;
                Ok(vec![discrepancy_at(body, r, &rot, &origin)])
            })
            .collect::<Result<_>>()?;
        Ok(DiscrepancySamples { r, values })
    }

    /// Explicit placements: every rotation paired with every translation.
    pub fn fixed(body: &FlatPointBody, r: f64, rotations: &[Rotation], translations: &[Vec<f64>]) -> Result<Self> {
        check_dilation(r)?;
        let values = rotations
            .par_iter()
            .map(|rot| translations.iter().map(|t| discrepancy_at(body, r, rot, t)).collect())
            .collect();
        Ok(DiscrepancySamples { r, values })
    }

    pub fn len(&self) -> usize {
        self.values.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(mean |D|^p)^{1/p}`. The standard error follows from the delta method,
    /// with the variance of the mean taken from per-rotation means so that
    /// translations sharing a rotation are not treated as independent.
    pub fn lp_norm(&self, p: f64) -> Result<NormEstimate> {
        check_p(p)?;
        if self.is_empty() {
            return Err(Error::InsufficientData("no discrepancy samples".into()));
        }
        let groups: Vec<Vec<f64>> = self
            .values
            .iter()
            .filter(|g| !g.is_empty())
            .map(|g| g.iter().map(|v| v.abs().powf(p)).collect())
            .collect();
        let n = self.len();
        let all: Vec<f64> = groups.iter().flatten().copied().collect();
        let mean = pairwise_sum(&all) / n as f64;
        let var_mean = if groups.len() >= 2 {
            let means: Vec<f64> = groups.iter().map(|g| pairwise_sum(g) / g.len() as f64).collect();
            sample_variance(&means) / means.len() as f64
        } else if n >= 2 {
            sample_variance(&all) / n as f64
        } else {
            0.0
        };
        let value = mean.powf(1.0 / p);
        let stderr = if mean > 0.0 {
            value / (p * mean) * var_mean.sqrt()
        } else {
            0.0
        };
        Ok(NormEstimate {
            r: self.r,
            p,
            value,
            stderr,
            n_samples: n,
        })
    }

    /// Largest `|D|`; its standard error is reported as 0.
    pub fn max_abs(&self) -> NormEstimate {
        let value = self.values.iter().flatten().fold(0.0, |m: f64, v| m.max(v.abs()));
        NormEstimate {
            r: self.r,
            p: f64::INFINITY,
            value,
            stderr: 0.0,
            n_samples: self.len(),
        }
    }
}

fn sample_variance(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = pairwise_sum(x) / n;
    let sq: Vec<f64> = x.iter().map(|v| (v - mean) * (v - mean)).collect();
    pairwise_sum(&sq) / (n - 1.0)
}

/// `L^p` norm of the discrepancy over Haar rotations and uniform translations.
pub fn lp_norm_estimate(
    body: &FlatPointBody,
    r: f64,
    p: f64,
    n_rot: usize,
    n_trans: usize,
    seed: u64,
) -> Result<NormEstimate> {
    check_p(p)?;
    DiscrepancySamples::draw(body, r, n_rot, n_trans, seed)?.lp_norm(p)
}

/// `L^p` average of `|D(σ, 0)|` over Haar rotations.
pub fn rotation_only_average(body: &FlatPointBody, r: f64, p: f64, n_rot: usize, seed: u64) -> Result<NormEstimate> {
    check_p(p)?;
    DiscrepancySamples::draw_rotations(body, r, n_rot, seed)?.lp_norm(p)
}

/// Largest `|D|` over joint samples: a lower envelope for the supremum.
pub fn sup_sample(body: &FlatPointBody, r: f64, n_rot: usize, n_trans: usize, seed: u64) -> Result<NormEstimate> {
    Ok(DiscrepancySamples::draw(body, r, n_rot, n_trans, seed)?.max_abs())
}

/// Both sides of Parseval's identity for one rotation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParsevalCheck {
    /// Monte Carlo mean of `D²` over translations.
    pub lhs: f64,
    pub lhs_stderr: f64,
    /// `R^{2d} Σ_{0<|n|≤cutoff} |χ̂(R σᵀ n)|²`.
    pub rhs: f64,
    pub ratio: f64,
    /// Estimated contribution of `|n| > cutoff`.
    pub tail_estimate: f64,
    pub terms: usize,
}

/// Largest tolerated `tail_estimate / rhs`.
pub const PARSEVAL_TAIL_LIMIT: f64 = 0.01;

/// Partial Fourier sum of `|χ̂|²` over the lattice with a tail estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsevalSum {
    pub sum: f64,
    pub tail_estimate: f64,
    pub terms: usize,
}

/// `R^{2d} Σ_{0<|n|≤cutoff} |χ̂(R σᵀ n)|²`. The tail beyond the cutoff is the
/// closed-form decay envelope summed over `cutoff < |n| ≤ 4·cutoff`, scaled by the
/// mean of `|χ̂|²/envelope²` on the outer shell `cutoff/2 < |n| ≤ cutoff`, plus a
/// third for the remainder.
pub fn parseval_sum(body: &FlatPointBody, r: f64, rotation: &Rotation, cutoff: f64) -> Result<ParsevalSum> {
    check_dilation(r)?;
    if !(cutoff >= 2.0 && cutoff.is_finite()) {
        return Err(Error::invalid("cutoff", cutoff, "cutoff must be >= 2"));
    }
    let d = body.dim();
    if rotation.dim() != d {
        return Err(Error::invalid("rotation", rotation.dim(), format!("expected dimension {d}")));
    }
    let scale = r.powi(2 * d as i32);
    let shape = |n: &[i64]| {
        let nf: Vec<f64> = n.iter().map(|&v| v as f64 * r).collect();
        let xi = rotation.apply_inverse(&nf);
        let s = xi[..d - 1].iter().map(|v| v * v).sum::<f64>().sqrt();
        let rho = nf.iter().map(|v| v * v).sum::<f64>().sqrt();
        decay_shape(d, body.gamma(), s, xi[d - 1].abs(), rho)
    };
    let terms = lattice_transform(body, r, rotation, cutoff)?;
    let squares: Vec<f64> = terms.iter().map(|t| t.chi_hat.norm_sqr()).collect();
    let sum = 2.0 * scale * pairwise_sum(&squares);

    let norm = |n: &[i64]| n.iter().map(|&v| (v * v) as f64).sum::<f64>().sqrt();
    let ratios: Vec<f64> = terms
        .iter()
        .filter(|t| norm(&t.n) > 0.5 * cutoff)
        .map(|t| t.chi_hat.norm_sqr() / shape(&t.n).powi(2))
        .collect();
    let calibration = pairwise_sum(&ratios) / ratios.len().max(1) as f64;
    let outer: Vec<f64> = crate::fourier::half_lattice_ball(d, 4.0 * cutoff)
        .into_par_iter()
        .filter(|n| norm(n) > cutoff)
        .map(|n| shape(&n).powi(2))
        .collect();
    let tail_estimate = 2.0 * scale * calibration * pairwise_sum(&outer) * 4.0 / 3.0;
    Ok(ParsevalSum {
        sum,
        tail_estimate,
        terms: 2 * terms.len(),
    })
}

/// Compares the mean square discrepancy over `n_trans` uniform translations with
/// the lattice Fourier sum truncated at `cutoff`.
pub fn parseval_check(
    body: &FlatPointBody,
    r: f64,
    rotation: &Rotation,
    n_trans: usize,
    cutoff: f64,
    seed: u64,
) -> Result<ParsevalCheck> {
    if n_trans < 2 {
        return Err(Error::invalid("n_trans", n_trans, "need at least 2 translations"));
    }
    let rhs = parseval_sum(body, r, rotation, cutoff)?;
    if !(rhs.tail_estimate < PARSEVAL_TAIL_LIMIT * rhs.sum) {
        return Err(Error::Precondition(format!(
            "estimated tail {:.3e} beyond cutoff {cutoff} exceeds {PARSEVAL_TAIL_LIMIT} of the partial sum {:.3e}",
            rhs.tail_estimate, rhs.sum
        )));
    }
    let d = body.dim();
    let key = dilation_key(r);
    let squares: Vec<f64> = (0..n_trans as u64)
        .into_par_iter()
        .map(|j| {
            let mut rng = sample_rng(seed, key, j);
            let t: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
            discrepancy_at(body, r, rotation, &t).powi(2)
        })
        .collect();
    let lhs = pairwise_sum(&squares) / n_trans as f64;
    let lhs_stderr = (sample_variance(&squares) / n_trans as f64).sqrt();
    Ok(ParsevalCheck {
        lhs,
        lhs_stderr,
        rhs: rhs.sum,
        ratio: lhs / rhs.sum,
        tail_estimate: rhs.tail_estimate,
        terms: rhs.terms,
    })
}

/// Least-squares line through `(log R, log value)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub r_squared: f64,
    pub n_points: usize,
    /// Smallest dilation dropped by the retry after a poor first fit.
    pub dropped_r: Option<f64>,
}

/// Minimum number of points for a fit.
pub const MIN_FIT_POINTS: usize = 4;
/// First fits below this `r²` are retried without the smallest dilation.
pub const RETRY_R_SQUARED: f64 = 0.9;

/// OLS fit of `log value` against `log R`, retried once without the smallest `R`
/// when `r² < 0.9` and enough points remain.
pub fn fit_exponent(series: &[NormEstimate]) -> Result<FitResult> {
    if series.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData(format!(
            "{} points, at least {MIN_FIT_POINTS} needed for a fit",
            series.len()
        )));
    }
    if let Some(e) = series.iter().find(|e| !(e.value > 0.0 && e.value.is_finite())) {
        return Err(Error::invalid("value", e.value, format!("nonpositive norm at R = {}", e.r)));
    }
    if let Some(e) = series.iter().find(|e| !(e.r > 0.0 && e.r.is_finite())) {
        return Err(Error::invalid("R", e.r, "dilations must be positive"));
    }
    let points: Vec<(f64, f64)> = series.iter().map(|e| (e.r.ln(), e.value.ln())).collect();
    let first = ols(&points)?;
    if first.r_squared >= RETRY_R_SQUARED || points.len() - 1 < MIN_FIT_POINTS {
        return Ok(first);
    }
    let smallest = (0..series.len())
        .min_by(|&a, &b| series[a].r.total_cmp(&series[b].r))
        .unwrap();
    let rest: Vec<(f64, f64)> = points
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != smallest)
        .map(|(_, p)| *p)
        .collect();
    Ok(FitResult {
        dropped_r: Some(series[smallest].r),
        ..ols(&rest)?
    })
}

fn ols(points: &[(f64, f64)]) -> Result<FitResult> {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InsufficientData("all dilations coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r_squared = if syy > 0.0 { (1.0 - ss_res / syy).clamp(0.0, 1.0) } else { 1.0 };
    Ok(FitResult {
        slope,
        intercept,
        slope_stderr: (ss_res / (n - 2.0) / sxx).sqrt(),
        r_squared,
        n_points: points.len(),
        dropped_r: None,
    })
}

/// One row of the `norm-sweep` CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormRecord {
    pub d: usize,
    pub gamma: f64,
    pub p: f64,
    pub mode: SweepMode,
    #[serde(rename = "R")]
    pub r: f64,
    pub value: f64,
    pub stderr: f64,
    pub n: usize,
}

impl NormRecord {
    pub fn new(body: &FlatPointBody, mode: SweepMode, e: &NormEstimate) -> Self {
        NormRecord {
            d: body.dim(),
            gamma: body.gamma(),
            p: e.p,
            mode,
            r: e.r,
            value: e.value,
            stderr: e.stderr,
            n: e.n_samples,
        }
    }
}

/// Geometric grid `start, start·ratio, ...` up to `end` inclusive (with slack for rounding).
pub fn geometric_grid(start: f64, end: f64, ratio: f64) -> Result<Vec<f64>> {
    if !(start > 0.0 && end >= start && ratio > 1.0) {
        return Err(Error::invalid(
            "grid",
            format!("{start}..{end} x{ratio}"),
            "need 0 < start <= end and ratio > 1",
        ));
    }
    let mut out = vec![start];
    loop {
        let next = out.last().unwrap() * ratio;
        if next > end * (1.0 + 1e-12) {
            return Ok(out);
        }
        out.push(next);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn body(d: usize, g: f64) -> FlatPointBody {
        FlatPointBody::with(d, g).unwrap()
    }

    fn single_sample(p: f64) -> NormEstimate {
        let b = body(2, 2.0);
        DiscrepancySamples::fixed(&b, 1.0, &[Rotation::identity(2)], &[vec![0.0, 0.0]])
            .unwrap()
            .lp_norm(p)
            .unwrap()
    }

    #[test]
    fn single_placement_collapses_to_abs_discrepancy() {
        let expected = (body(2, 2.0).volume() - 7.0).abs();
        assert!((expected - 2.6236).abs() < 1e-4);
        for p in [1.0, 2.0, 4.0] {
            let e = single_sample(p);
            assert!((e.value - expected).abs() < 1e-12, "p={p}");
            assert_eq!((e.stderr, e.n_samples), (0.0, 1));
        }
    }

    #[test]
    fn rotation_only_at_unit_dilation_identity() {
        let b = body(2, 2.0);
        let s = DiscrepancySamples::fixed(&b, 1.0, &[Rotation::identity(2)], &[vec![0.0; 2]]).unwrap();
        assert!((s.lp_norm(1.0).unwrap().value - (b.volume() - 7.0).abs()).abs() < 1e-12);
    }

    #[test]
    fn jensen_ordering_on_shared_samples() {
        let b = body(2, 3.0);
        let s = DiscrepancySamples::draw(&b, 20.0, 8, 8, 5).unwrap();
        let v: Vec<f64> = [1.0, 2.0, 4.0, 8.0].iter().map(|&p| s.lp_norm(p).unwrap().value).collect();
        assert!(v.windows(2).all(|w| w[0] <= w[1] * (1.0 + 1e-12)), "{v:?}");
        let r = DiscrepancySamples::draw_rotations(&b, 20.0, 32, 5).unwrap();
        assert!(r.lp_norm(1.0).unwrap().value <= r.lp_norm(2.0).unwrap().value);
    }

    #[test]
    fn estimates_are_reproducible_across_pool_sizes() {
        let b = body(3, 2.0);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| lp_norm_estimate(&b, 6.0, 2.0, 6, 5, 42).unwrap())
        };
        let a = run(1);
        let c = run(3);
        assert_eq!(a.value.to_bits(), c.value.to_bits());
        assert_eq!(a.stderr.to_bits(), c.stderr.to_bits());
        assert_ne!(a.value, lp_norm_estimate(&b, 6.0, 2.0, 6, 5, 43).unwrap().value);
    }

    #[test]
    fn standard_error_uses_rotation_clusters() {
        // Two groups with identical means: the cluster variance vanishes.
        let s = DiscrepancySamples {
            r: 1.0,
            values: vec![vec![1.0, 3.0], vec![3.0, 1.0]],
        };
        let e = s.lp_norm(1.0).unwrap();
        assert_eq!((e.value, e.stderr), (2.0, 0.0));
        // One group: ordinary standard error of the mean, scaled by the delta method.
        let s = DiscrepancySamples {
            r: 1.0,
            values: vec![vec![1.0, 3.0]],
        };
        let e = s.lp_norm(2.0).unwrap();
        let m: f64 = 5.0;
        let se_m: f64 = 4.0;
        assert!((e.value - m.sqrt()).abs() < 1e-15);
        assert!((e.stderr - se_m / (2.0 * m.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        let b = body(2, 2.0);
        assert!(lp_norm_estimate(&b, 4.0, 0.5, 1, 1, 0).is_err());
        assert!(lp_norm_estimate(&b, 0.5, 2.0, 1, 1, 0).is_err());
        let cfg = SweepConfig {
            r_grid: vec![1.0, 4.0, 2.0],
            p: 2.0,
            n_rotations: 1,
            n_translations: 1,
            master_seed: 0,
            mode: SweepMode::Joint,
        };
        assert!(cfg.validate().is_err());
        assert!(SweepConfig { r_grid: vec![1.0, 2.0], n_translations: 0, ..cfg.clone() }.validate().is_err());
        assert!(SweepConfig { r_grid: vec![1.0, 2.0], ..cfg }.validate().is_ok());
    }

    #[test]
    fn exact_power_laws_fit_exactly() {
        let series = |c: f64, a: f64| -> Vec<NormEstimate> {
            [32.0, 64.0, 128.0, 256.0, 512.0]
                .iter()
                .map(|&r: &f64| NormEstimate {
                    r,
                    p: 2.0,
                    value: c * r.powf(a),
                    stderr: 0.0,
                    n_samples: 1,
                })
                .collect()
        };
        let f = fit_exponent(&series(1.0, 0.5)).unwrap();
        assert!((f.slope - 0.5).abs() < 1e-12 && (f.r_squared - 1.0).abs() < 1e-12);
        assert!(f.slope_stderr < 1e-6 && f.dropped_r.is_none());
        let f = fit_exponent(&series(3.0, 0.75)).unwrap();
        assert!((f.slope - 0.75).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn poor_fit_retries_without_smallest_dilation() {
        let mut s: Vec<NormEstimate> = [8.0, 16.0, 32.0, 64.0, 128.0]
            .iter()
            .map(|&r: &f64| NormEstimate {
                r,
                p: 1.0,
                value: r.sqrt(),
                stderr: 0.0,
                n_samples: 1,
            })
            .collect();
        s[0].value = 1000.0;
        let f = fit_exponent(&s).unwrap();
        assert_eq!(f.dropped_r, Some(8.0));
        assert_eq!(f.n_points, 4);
        assert!((f.slope - 0.5).abs() < 1e-12);
    }

    #[test]
    fn fit_rejects_bad_series() {
        let e = |r: f64, value: f64| NormEstimate {
            r,
            p: 1.0,
            value,
            stderr: 0.0,
            n_samples: 1,
        };
        assert!(matches!(fit_exponent(&[e(1.0, 1.0), e(2.0, 2.0), e(4.0, 3.0)]), Err(Error::InsufficientData(_))));
        assert!(fit_exponent(&[e(1.0, 1.0), e(2.0, 0.0), e(4.0, 3.0), e(8.0, 4.0)]).is_err());
    }

    #[test]
    fn geometric_grid_includes_end() {
        assert_eq!(geometric_grid(32.0, 2048.0, 2.0).unwrap(), vec![32.0, 64.0, 128.0, 256.0, 512.0, 1024.0, 2048.0]);
        assert!(geometric_grid(4.0, 2.0, 2.0).is_err());
    }

    #[test]
    fn parseval_sum_is_monotone_in_cutoff() {
        let b = body(2, 3.0);
        let rot = Rotation::planar(0.3);
        let a = parseval_sum(&b, 4.0, &rot, 4.0).unwrap();
        let c = parseval_sum(&b, 4.0, &rot, 6.0).unwrap();
        assert!(c.sum >= a.sum && c.terms > a.terms);
        assert!(a.tail_estimate > 0.0);
    }

    #[test]
    fn parseval_sum_invariant_under_axis_rotation() {
        let b = body(3, 2.0);
        let sigma = crate::lattice::haar_rotation(3, 9).unwrap();
        let (c, s) = (0.7f64.cos(), 0.7f64.sin());
        let axis = Rotation::from_rows(&[vec![c, -s, 0.0], vec![s, c, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        let a = parseval_sum(&b, 2.0, &sigma, 3.0).unwrap();
        let e = parseval_sum(&b, 2.0, &sigma.compose(&axis), 3.0).unwrap();
        assert!((a.sum - e.sum).abs() < 1e-10 * a.sum, "{} vs {}", a.sum, e.sum);
    }

    #[test]
    fn parseval_check_small_case() {
        // Low dilation keeps the lattice sum cheap; the tail bound still has to hold.
        let b = body(2, 3.0);
        let c = parseval_check(&b, 2.0, &Rotation::identity(2), 4000, 100.0, 1).unwrap();
        assert!(c.tail_estimate < PARSEVAL_TAIL_LIMIT * c.rhs);
        assert!((c.ratio - 1.0).abs() < 3.0 * c.lhs_stderr / c.rhs + 0.02, "{c:?}");
        assert!(matches!(
            parseval_check(&b, 2.0, &Rotation::identity(2), 100, 4.0, 1),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn csv_record_round_trip() {
        let b = body(2, 2.5);
        let e = lp_norm_estimate(&b, 10.0, 3.0, 3, 3, 0).unwrap();
        let rec = NormRecord::new(&b, SweepMode::Joint, &e);
        let mut w = csv::Writer::from_writer(vec![]);
        w.serialize(&rec).unwrap();
        let data = w.into_inner().unwrap();
        let back: NormRecord = csv::Reader::from_reader(&data[..]).deserialize().next().unwrap().unwrap();
        assert_eq!(back, rec);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn norms_nondecreasing_in_p(seed in 0u64..1000, r in 2.0f64..30.0, p in 1.0f64..6.0, dp in 0.0f64..4.0) {
            let b = body(2, 2.0);
            let s = DiscrepancySamples::draw(&b, r, 3, 4, seed).unwrap();
            let lo = s.lp_norm(p).unwrap();
            let hi = s.lp_norm(p + dp).unwrap();
            prop_assert!(lo.value <= hi.value * (1.0 + 1e-12));
            prop_assert!(lo.value >= 0.0 && lo.stderr >= 0.0);
            prop_assert!(hi.value <= s.max_abs().value * (1.0 + 1e-12));
        }

        #[test]
        fn fit_recovers_slope_under_scaling(a in -1.0f64..2.0, c in 0.1f64..10.0) {
            let s: Vec<NormEstimate> = (0..6).map(|k| {
                let r = 4.0 * 2f64.powi(k);
                NormEstimate { r, p: 1.0, value: c * r.powf(a), stderr: 0.0, n_samples: 1 }
            }).collect();
            let f = fit_exponent(&s).unwrap();
            prop_assert!((f.slope - a).abs() < 1e-10);
            prop_assert!((f.intercept - c.ln()).abs() < 1e-9);
        }
    }
}
