//! Slice-reduction quadrature for the Fourier transform of the body's indicator.
//!
//! `χ̂(ξ', ξ_d) = ∫ e^{-2πi ξ_d y} F(r(y), |ξ'|) dy` with `F` the transform of the
//! horizontal `(d-1)`-ball. The power branch is parametrized by `u = r` (`y = u^γ`)
//! and the cap by its angle, so both integrands are smooth; panels are sized so
//! that each carries a bounded number of oscillation cycles.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use super::bessel::j1;
use crate::body::FlatPointBody;
use crate::error::{Error, Result};
use crate::quadrature::gl32;

/// Peak oscillation cycles per 32-point panel at the coarse level of the doubling scheme.
const COARSE_CYCLES: f64 = 12.0;
/// Peak cycles per panel for the single-pass evaluator.
const FAST_CYCLES: f64 = 8.0;
const MAX_LEVEL: u32 = 8;

#[derive(Clone, Copy)]
enum Piece {
    Power,
    Arc,
}

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    piece: Piece,
}

#[derive(Clone, Copy)]
enum Pow {
    Square,
    Int(i32),
    Real(f64),
}

impl Pow {
    #[inline(always)]
    fn eval(self, u: f64) -> f64 {
        match self {
            Pow::Square => u * u,
            Pow::Int(n) => u.powi(n),
            Pow::Real(g) => u.powf(g),
        }
    }
}

pub(crate) struct SliceIntegral {
    dim: usize,
    gamma: f64,
    pow: Pow,
    y_c: f64,
    rho_c: f64,
    seam: f64,
    s: f64,
    xd: f64,
}

impl SliceIntegral {
    pub(crate) fn new(body: &FlatPointBody, s: f64, xd: f64) -> Result<Self> {
        let dim = body.dim();
        if dim != 2 && dim != 3 {
            return Err(Error::UnsupportedDimension(dim, "2 or 3"));
        }
        let gamma = body.gamma();
        let pow = if gamma == 2.0 {
            Pow::Square
        } else if gamma.fract() == 0.0 && gamma < 64.0 {
            Pow::Int(gamma as i32)
        } else {
            Pow::Real(gamma)
        };
        Ok(SliceIntegral {
            dim,
            gamma,
            pow,
            y_c: body.y_c(),
            rho_c: body.rho_c(),
            seam: body.seam_angle(),
            s: s.abs(),
            xd,
        })
    }

    /// Transform of the horizontal slice of radius `a` at horizontal frequency `s`.
    #[inline(always)]
    fn slice(&self, a: f64) -> f64 {
        let x = TAU * a * self.s;
        if self.dim == 2 {
            if x.abs() < 1e-3 {
                let x2 = x * x;
                2.0 * a * (1.0 - x2 / 6.0 + x2 * x2 / 120.0)
            } else {
                x.sin() / (PI * self.s)
            }
        } else if x.abs() < 1e-3 {
            let x2 = x * x;
            PI * a * a * (1.0 - x2 / 8.0 + x2 * x2 / 192.0)
        } else {
            a * j1(x) / self.s
        }
    }

    /// Integrand in the panel variable, without the quadrature weight.
    #[inline(always)]
    fn integrand(&self, piece: Piece, t: f64) -> Complex64 {
        let (y, a, jac) = match piece {
            Piece::Power => {
                let ug = self.pow.eval(t);
                (ug, t, self.gamma * ug / t)
            }
            Piece::Arc => {
                let (sn, cs) = t.sin_cos();
                let a = self.rho_c * cs;
                (self.y_c + self.rho_c * sn, a, a)
            }
        };
        let (sn, cs) = (TAU * self.xd * y).sin_cos();
        let w = jac * self.slice(a);
        Complex64::new(w * cs, -w * sn)
    }

    fn panel_sum(&self, p: Panel, splits: usize) -> Complex64 {
        let rule = gl32();
        let h = (p.b - p.a) / splits as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..splits {
            let lo = p.a + h * k as f64;
            let half = 0.5 * h;
            let mid = lo + half;
            let mut part = Complex64::new(0.0, 0.0);
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                part += *w * self.integrand(p.piece, mid + half * x);
            }
            acc += part * half;
        }
        acc
    }

    fn layout(&self, cycles_per_panel: f64) -> Vec<Panel> {
        let mut panels = Vec::new();
        let axd = self.xd.abs();
        let s = self.s;
        let rho = (axd * axd + s * s).sqrt();

        // Power branch: the rate |ξ_d| γ u^{γ-1} + s grows with u, so step leftwards
        // with widths set by the rate at each panel's right end.
        let rate = |u: f64| axd * self.gamma * self.pow.eval(u) / u + s;
        let mut breaks = vec![1.0];
        let mut u: f64 = 1.0;
        loop {
            let next = u - cycles_per_panel / rate(u);
            if next <= 0.0 {
                break;
            }
            // Merge a sliver left over near the origin into the last panel.
            if next < 0.25 * (u - next) {
                break;
            }
            breaks.push(next);
            u = next;
        }
        let first = *breaks.last().unwrap();
        // Refine toward the flat point at the stationary scale |ξ|^{-1/γ}.
        if rho > 1.0 {
            let u_star = rho.powf(-1.0 / self.gamma);
            if u_star < 0.5 * first {
                breaks.push(u_star);
            }
        }
        if !matches!(self.pow, Pow::Square | Pow::Int(_)) {
            // u^γ is not analytic at 0: grade geometrically to where the remainder is negligible.
            let floor = 1e-16f64.powf(1.0 / (self.gamma + self.dim as f64 - 1.0));
            let mut b = *breaks.last().unwrap();
            while b > floor {
                b *= 0.5;
                breaks.push(b);
            }
        }
        breaks.push(0.0);
        breaks.reverse();
        for w in breaks.windows(2) {
            panels.push(Panel {
                a: w[0],
                b: w[1],
                piece: Piece::Power,
            });
        }

        // Cap: uniform panels in the angle.
        let lo = -self.seam;
        let len = FRAC_PI_2 - lo;
        let n_arc = ((self.rho_c * rho * len / cycles_per_panel).ceil() as usize).max(1);
        let h = len / n_arc as f64;
        for k in 0..n_arc {
            let a = lo + h * k as f64;
            let b = if k + 1 == n_arc { FRAC_PI_2 } else { a + h };
            panels.push(Panel { a, b, piece: Piece::Arc });
        }
        panels
    }

    fn sum(&self, panels: &[Panel], splits: usize) -> Complex64 {
        panels.iter().map(|&p| self.panel_sum(p, splits)).sum()
    }

    /// Single pass at a fixed cycle budget per panel.
    pub(crate) fn fast(&self) -> Complex64 {
        self.sum(&self.layout(FAST_CYCLES), 1)
    }

    /// Panel doubling until successive values differ by at most
    /// `max(abs_tol, rel_tol |value|)`; returns the finest value and that difference.
    pub(crate) fn adaptive(&self, abs_tol: f64, rel_tol: f64) -> Result<(Complex64, f64, usize)> {
        let panels = self.layout(COARSE_CYCLES);
        let mut prev = self.sum(&panels, 1);
        let mut change = f64::INFINITY;
        let mut splits = 1;
        for _ in 1..=MAX_LEVEL {
            splits *= 2;
            let next = self.sum(&panels, splits);
            change = (next - prev).norm();
            prev = next;
            if change <= abs_tol.max(rel_tol * next.norm()) {
                return Ok((next, change, panels.len() * splits * 32));
            }
        }
        Err(Error::Quadrature {
            what: format!("chi_hat at |xi'|={}, xi_d={}", self.s, self.xd),
            last_change: change,
            tolerance: abs_tol.max(rel_tol * prev.norm()),
            nodes: panels.len() * splits * 32,
        })
    }
}
