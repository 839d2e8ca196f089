//! Mollified discrepancy: the discrepancy convolved in `t` with a scaled bump,
//! evaluated from its absolutely convergent lattice Fourier series.

use num_complex::Complex64;
use std::f64::consts::TAU;
use std::sync::OnceLock;

use super::{Placement, Rotation};
use crate::body::FlatPointBody;
use crate::error::{Error, Result};
use crate::fourier::lattice_transform;
use crate::quadrature::{gl32, pairwise_sum};

/// Table step in the radial frequency.
const STEP: f64 = 1.0 / 128.0;
/// Tabulated range; beyond it `|φ̂| < 1e-14`.
const S_MAX: f64 = 128.0;
/// Required smallness of `φ̂` beyond the frequency cutoff.
pub const CUTOFF_THRESHOLD: f64 = 1e-8;

/// `φ(x) ∝ exp(-1/(1-|x|²))` on the unit ball, before normalization.
fn bump(r2: f64) -> f64 {
    if r2 >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - r2)).exp()
    }
}

/// Radial table of `φ̂` for the normalized bump in one dimension `d`.
#[derive(Debug)]
pub struct PhiHatTable {
    pub dim: usize,
    pub step: f64,
    pub values: Vec<f64>,
    /// `suffix_max[k] = max_{j >= k} |values[j]|`.
    suffix_max: Vec<f64>,
}

impl PhiHatTable {
    /// Builds the table through the projection `P(x) = ∫ φ(x, x'') dx''`, so that
    /// `φ̂(s) = 2 ∫_0^1 P(x) cos(2πsx) dx`. The outer rule is doubled until the whole
    /// table changes by less than `1e-12`.
    fn build(dim: usize) -> Result<Self> {
        let n = (S_MAX / STEP) as usize + 1;
        let mut panels = 64;
        let mut prev = Self::tabulate(dim, panels, n);
        loop {
            panels *= 2;
            let next = Self::tabulate(dim, panels, n);
            let change = prev.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            if change < 1e-12 {
                let mut suffix_max = vec![0.0; n];
                let mut m: f64 = 0.0;
                for k in (0..n).rev() {
                    m = m.max(next[k].abs());
                    suffix_max[k] = m;
                }
                return Ok(PhiHatTable {
                    dim,
                    step: STEP,
                    values: next,
                    suffix_max,
                });
            }
            if panels > 4096 {
                return Err(Error::Quadrature {
                    what: format!("bump transform table (d={dim})"),
                    last_change: change,
                    tolerance: 1e-12,
                    nodes: panels * 32,
                });
            }
            prev = next;
        }
    }

    fn tabulate(dim: usize, panels: usize, n: usize) -> Vec<f64> {
        let rule = gl32();
        let h = 1.0 / panels as f64;
        let mut xs = Vec::with_capacity(panels * 32);
        let mut ws = Vec::with_capacity(panels * 32);
        for k in 0..panels {
            let mid = (k as f64 + 0.5) * h;
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                xs.push(mid + 0.5 * h * x);
                ws.push(0.5 * h * w);
            }
        }
        let proj: Vec<f64> = xs.iter().map(|&x| projection(dim, x)).collect();
        let mass = 2.0 * xs.iter().zip(&ws).zip(&proj).map(|((_, w), p)| w * p).sum::<f64>();
        let weighted: Vec<f64> = ws.iter().zip(&proj).map(|(w, p)| 2.0 * w * p / mass).collect();
        (0..n)
            .map(|k| {
                let s = k as f64 * STEP;
                let terms: Vec<f64> = xs.iter().zip(&weighted).map(|(x, w)| w * (TAU * s * x).cos()).collect();
                pairwise_sum(&terms)
            })
            .collect()
    }

    /// Linear interpolation; zero beyond the tabulated range.
    pub fn eval(&self, s: f64) -> f64 {
        let s = s.abs();
        let pos = s / self.step;
        let k = pos.floor() as usize;
        if k + 1 >= self.values.len() {
            return 0.0;
        }
        let f = pos - k as f64;
        self.values[k] * (1.0 - f) + self.values[k + 1] * f
    }

    /// `sup_{s' >= s} |φ̂(s')|` over the table.
    pub fn sup_beyond(&self, s: f64) -> f64 {
        let k = (s / self.step).floor() as usize;
        self.suffix_max.get(k).copied().unwrap_or(0.0)
    }
}

/// Integral of the bump over the hyperplane section at first coordinate `x`.
fn projection(dim: usize, x: f64) -> f64 {
    let rule = gl32();
    let x2 = x * x;
    if x2 >= 1.0 {
        return 0.0;
    }
    let top = (1.0 - x2).sqrt();
    match dim {
        // 2 ∫_0^{top} φ(x, t) dt
        2 => 2.0 * rule.composite(0.0, top, 8, |t| bump(x2 + t * t)),
        // 2π ∫_0^{top} φ(x, ρ) ρ dρ
        _ => TAU * rule.composite(0.0, top, 8, |t| bump(x2 + t * t) * t),
    }
}

fn table(dim: usize) -> Result<&'static PhiHatTable> {
    static T2: OnceLock<PhiHatTable> = OnceLock::new();
    static T3: OnceLock<PhiHatTable> = OnceLock::new();
    let cell = match dim {
        2 => &T2,
        3 => &T3,
        d => return Err(Error::UnsupportedDimension(d, "2 or 3")),
    };
    if let Some(t) = cell.get() {
        return Ok(t);
    }
    let built = PhiHatTable::build(dim)?;
    Ok(cell.get_or_init(|| built))
}

/// Smoothing width, calibrated decay power and the tabulated bump transform.
#[derive(Debug, Clone, Copy)]
pub struct MollifierSpec {
    pub epsilon: f64,
    /// Integer `K` with `|φ̂(s)| <= C_K (1+s)^{-K}` on the table.
    pub decay_power: u32,
    /// The constant `C_K`.
    pub decay_constant: f64,
    pub table: &'static PhiHatTable,
}

impl MollifierSpec {
    pub fn new(dim: usize, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::invalid("epsilon", epsilon, "smoothing width must lie in (0, 1)"));
        }
        let table = table(dim)?;
        let (decay_power, decay_constant) = calibrate(table);
        Ok(MollifierSpec {
            epsilon,
            decay_power,
            decay_constant,
            table,
        })
    }

    /// `φ̂(ε|n|)`.
    pub fn weight(&self, norm: f64) -> f64 {
        self.table.eval(self.epsilon * norm)
    }

    /// Smallest lattice radius beyond which `|φ̂(ε|n|)| < 1e-8`.
    pub fn minimal_cutoff(&self) -> f64 {
        let t = self.table;
        let k = t.suffix_max.iter().position(|&m| m < CUTOFF_THRESHOLD).unwrap_or(t.values.len());
        k as f64 * t.step / self.epsilon
    }
}

/// Fits the decay power from the slope of the log envelope against `log(1+s)` over
/// the range where the envelope is above round-off, then sets `C_K` as the smallest
/// constant making the bound hold on the table.
fn calibrate(t: &PhiHatTable) -> (u32, f64) {
    let (mut sx, mut sy, mut sxx, mut sxy, mut m) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (k, &env) in t.suffix_max.iter().enumerate() {
        let s = k as f64 * t.step;
        if s < 1.0 || env < 1e-13 {
            continue;
        }
        let x = (1.0 + s).ln();
        let y = env.ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        m += 1.0;
    }
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    let k = (-slope).floor().max(1.0) as u32;
    let c = t
        .values
        .iter()
        .enumerate()
        .map(|(j, v)| v.abs() * (1.0 + j as f64 * t.step).powi(k as i32))
        .fold(0.0, f64::max);
    (k, c)
}

/// Real value of the truncated mollified series and the size of its imaginary part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MollifiedValue {
    pub value: f64,
    pub imaginary: f64,
    pub terms: usize,
}

/// Coefficients `-R^d φ̂(ε|n|) χ̂(Rσᵀn)` for `0 < |n| <= cutoff`, reusable across translations.
#[derive(Debug, Clone)]
pub struct MollifiedExpansion {
    terms: Vec<(Vec<f64>, Complex64)>,
}

impl MollifiedExpansion {
    pub fn new(
        body: &FlatPointBody,
        dilation: f64,
        rotation: &Rotation,
        mollifier: &MollifierSpec,
        frequency_cutoff: f64,
    ) -> Result<Self> {
        if mollifier.table.dim != body.dim() {
            return Err(Error::invalid("mollifier", mollifier.table.dim, "dimension differs from the body"));
        }
        let sup = mollifier.table.sup_beyond(mollifier.epsilon * frequency_cutoff);
        if sup >= CUTOFF_THRESHOLD {
            return Err(Error::Precondition(format!(
                "cutoff {frequency_cutoff} leaves |phi_hat| up to {sup:.2e} for epsilon {}; need at least {:.1}",
                mollifier.epsilon,
                mollifier.minimal_cutoff()
            )));
        }
        let scale = -dilation.powi(body.dim() as i32);
        let half = lattice_transform(body, dilation, rotation, frequency_cutoff)?;
        let mut terms = Vec::with_capacity(2 * half.len());
        for t in half {
            let norm = t.n.iter().map(|&v| (v * v) as f64).sum::<f64>().sqrt();
            let c = t.chi_hat * (scale * mollifier.weight(norm));
            let n: Vec<f64> = t.n.iter().map(|&v| v as f64).collect();
            let neg: Vec<f64> = n.iter().map(|v| -v).collect();
            terms.push((n, c));
            terms.push((neg, c.conj()));
        }
        Ok(MollifiedExpansion { terms })
    }

    /// Series value at translation `t`.
    pub fn evaluate(&self, translation: &[f64]) -> MollifiedValue {
        let (re, im): (Vec<f64>, Vec<f64>) = self
            .terms
            .iter()
            .map(|(n, c)| {
                let phase = -TAU * n.iter().zip(translation).map(|(a, b)| a * b).sum::<f64>();
                let v = *c * Complex64::from_polar(1.0, phase);
                (v.re, v.im)
            })
            .unzip();
        MollifiedValue {
            value: pairwise_sum(&re),
            imaginary: pairwise_sum(&im),
            terms: self.terms.len(),
        }
    }
}

/// Mollified discrepancy at a placement; fails if the imaginary part exceeds `1e-6`.
pub fn mollified_discrepancy(
    body: &FlatPointBody,
    placement: &Placement,
    mollifier: &MollifierSpec,
    frequency_cutoff: f64,
) -> Result<f64> {
    let exp = MollifiedExpansion::new(body, placement.dilation, &placement.rotation, mollifier, frequency_cutoff)?;
    let v = exp.evaluate(&placement.translation);
    if v.imaginary.abs() > 1e-6 {
        return Err(Error::Domain(format!(
            "mollified series has imaginary part {:.3e}",
            v.imaginary
        )));
    }
    Ok(v.value)
}
