//! The flat-point convex body of revolution ("γ-drop").
//!
//! In coordinates `(x', y)` with `x' ∈ R^{d-1}` and `r = |x'|`, the body is
//!
//! ```text
//! h_low(r) <= y <= h_up(r),   0 <= r <= rho_c
//! h_low(r) = r^γ                          for r <= 1
//! h_low(r) = y_c - sqrt(rho_c^2 - r^2)    for 1 <= r <= rho_c
//! h_up(r)  = y_c + sqrt(rho_c^2 - r^2)
//! ```
//!
//! with `y_c = 1 + 1/γ` and `rho_c = sqrt(1 + 1/γ^2)`. The power graph meets the
//! sphere of radius `rho_c` centred at `(0, y_c)` with matching value and slope at
//! `r = 1`, so the boundary is C^{1,1}. The origin is a flat point of order γ.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::gl32;

/// Dimension and flatness order. Serialized as `{"d": int, "gamma": float}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BodyParams {
    pub d: usize,
    pub gamma: f64,
}

impl BodyParams {
    pub fn new(d: usize, gamma: f64) -> Result<Self> {
        let params = BodyParams { d, gamma };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::invalid("d", self.d, "dimension must be at least 2"));
        }
        if !self.gamma.is_finite() || self.gamma < 2.0 {
            return Err(Error::invalid("gamma", self.gamma, "flatness order must be >= 2"));
        }
        Ok(())
    }

    /// Height of the arc centre, `1 + 1/γ`.
    pub fn y_c(&self) -> f64 {
        1.0 + 1.0 / self.gamma
    }

    /// Arc radius, `sqrt(1 + 1/γ²)`.
    pub fn rho_c(&self) -> f64 {
        (1.0 + 1.0 / (self.gamma * self.gamma)).sqrt()
    }
}

/// Piece of the meridian profile a boundary point lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `y = r^γ`, `0 <= r <= 1`.
    Power,
    /// Lower part of the sphere cap, `1 <= r <= rho_c`, `y <= y_c`.
    LowerArc,
    /// Upper hemisphere, `y >= y_c`.
    UpperArc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Lower,
    Upper,
}

impl Branch {
    pub fn side(self) -> Side {
        match self {
            Branch::Power | Branch::LowerArc => Side::Lower,
            Branch::UpperArc => Side::Upper,
        }
    }
}

/// A point of the boundary together with its outward normal and Gaussian curvature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    /// Full d-dimensional position.
    pub point: Vec<f64>,
    pub r: f64,
    pub y: f64,
    pub branch: Branch,
    pub side: Side,
    /// Unit outward normal.
    pub normal: Vec<f64>,
    pub gaussian_curvature: f64,
}

#[derive(Debug, Clone, Copy)]
enum PowerKind {
    /// γ = 2: `r^γ = r²`.
    Square,
    /// γ an even integer: `r^γ = (r²)^k`.
    EvenInt(i32),
    /// General γ: `(r²)^{γ/2}`.
    General(f64),
}

impl PowerKind {
    fn from_gamma(gamma: f64) -> Self {
        if gamma == 2.0 {
            PowerKind::Square
        } else if gamma.fract() == 0.0 && (gamma as i64) % 2 == 0 && gamma <= 64.0 {
            PowerKind::EvenInt((gamma / 2.0) as i32)
        } else {
            PowerKind::General(gamma / 2.0)
        }
    }

    /// `r^γ` evaluated from `r²`.
    #[inline(always)]
    fn from_r2(self, r2: f64) -> f64 {
        match self {
            PowerKind::Square => r2,
            PowerKind::EvenInt(k) => r2.powi(k),
            PowerKind::General(half) => r2.powf(half),
        }
    }
}

/// The concrete flat-point body. Immutable after construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "BodyParams", into = "BodyParams")]
pub struct FlatPointBody {
    params: BodyParams,
    y_c: f64,
    rho_c: f64,
    rho_c2: f64,
    volume: f64,
    power: PowerKind,
}

impl TryFrom<BodyParams> for FlatPointBody {
    type Error = Error;
    fn try_from(params: BodyParams) -> Result<Self> {
        FlatPointBody::new(params)
    }
}

impl From<FlatPointBody> for BodyParams {
    fn from(body: FlatPointBody) -> Self {
        body.params
    }
}

impl PartialEq for FlatPointBody {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params
    }
}

/// Volume of the unit ball in R^k.
pub fn unit_ball_volume(k: usize) -> f64 {
    match k {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(k - 2) * 2.0 * PI / k as f64,
    }
}

impl FlatPointBody {
    pub fn new(params: BodyParams) -> Result<Self> {
        params.validate()?;
        let y_c = params.y_c();
        let rho_c = params.rho_c();
        let mut body = FlatPointBody {
            params,
            y_c,
            rho_c,
            rho_c2: rho_c * rho_c,
            volume: 0.0,
            power: PowerKind::from_gamma(params.gamma),
        };
        body.volume = body.compute_volume();
        Ok(body)
    }

    pub fn with(d: usize, gamma: f64) -> Result<Self> {
        Self::new(BodyParams::new(d, gamma)?)
    }

    pub fn params(&self) -> BodyParams {
        self.params
    }

    pub fn dim(&self) -> usize {
        self.params.d
    }

    pub fn gamma(&self) -> f64 {
        self.params.gamma
    }

    pub fn y_c(&self) -> f64 {
        self.y_c
    }

    pub fn rho_c(&self) -> f64 {
        self.rho_c
    }

    /// Height of the apex, `y_c + rho_c`.
    pub fn height(&self) -> f64 {
        self.y_c + self.rho_c
    }

    /// Radial and vertical extents `(rho_c, y_c + rho_c)`.
    pub fn bounding_extents(&self) -> (f64, f64) {
        (self.rho_c, self.height())
    }

    /// Ball `(centre height, radius)` on the axis at half height circumscribing the
    /// bounding cylinder, hence the body.
    pub fn enclosing_ball(&self) -> (f64, f64) {
        let centre = 0.5 * self.height();
        (centre, (self.rho_c2 + centre * centre).sqrt())
    }

    /// Lower profile `h_low(r)` for `0 <= r <= rho_c`.
    pub fn h_low(&self, r: f64) -> f64 {
        if r <= 1.0 {
            r.powf(self.params.gamma)
        } else {
            self.y_c - (self.rho_c2 - r * r).max(0.0).sqrt()
        }
    }

    /// Upper profile `h_up(r)` for `0 <= r <= rho_c`.
    pub fn h_up(&self, r: f64) -> f64 {
        self.y_c + (self.rho_c2 - r * r).max(0.0).sqrt()
    }

    /// Slope of the lower profile.
    pub fn h_low_slope(&self, r: f64) -> f64 {
        let g = self.params.gamma;
        if r <= 1.0 {
            g * r.powf(g - 1.0)
        } else {
            r / (self.rho_c2 - r * r).max(0.0).sqrt()
        }
    }

    /// Membership from `r² = |x'|²` and height `y`. Boundary points are inside.
    #[inline(always)]
    pub fn contains_parts(&self, r2: f64, y: f64) -> bool {
        if r2 > self.rho_c2 || y < 0.0 {
            return false;
        }
        let dy = y - self.y_c;
        if r2 >= 1.0 {
            return dy * dy + r2 <= self.rho_c2;
        }
        if y < self.power.from_r2(r2) {
            return false;
        }
        dy <= 0.0 || dy * dy + r2 <= self.rho_c2
    }

    /// Membership test for a d-vector (last coordinate is the symmetry axis).
    pub fn contains(&self, point: &[f64]) -> bool {
        debug_assert_eq!(point.len(), self.params.d);
        let (horizontal, y) = point.split_at(point.len() - 1);
        let r2: f64 = horizontal.iter().map(|v| v * v).sum();
        self.contains_parts(r2, y[0])
    }

    /// Signed depth `min(y - h_low(r), h_up(r) - y)`; concave on `r <= rho_c`.
    #[inline]
    pub(crate) fn depth_parts(&self, r2: f64, y: f64) -> f64 {
        let r = r2.sqrt();
        let lower = if r2 <= 1.0 {
            self.power.from_r2(r2)
        } else {
            self.y_c - (self.rho_c2 - r2).max(0.0).sqrt()
        };
        let upper = self.y_c + (self.rho_c2 - r * r).max(0.0).sqrt();
        (y - lower).min(upper - y)
    }

    /// Radius of the horizontal slice at height `y`.
    pub fn slice_radius(&self, y: f64) -> Result<f64> {
        let top = self.height();
        if !(0.0..=top).contains(&y) {
            return Err(Error::Domain(format!("slice height {y} outside [0, {top}]")));
        }
        Ok(if y <= 1.0 {
            y.powf(1.0 / self.params.gamma)
        } else {
            let u = self.y_c - y;
            (self.rho_c2 - u * u).max(0.0).sqrt()
        })
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    fn compute_volume(&self) -> f64 {
        let d = self.params.d;
        let g = self.params.gamma;
        let k = (d - 1) as f64;
        // ∫_0^1 y^{(d-1)/γ} dy
        let power_part = g / (g + k);
        // ∫_{-1/γ}^{rho_c} (rho_c² - u²)^{(d-1)/2} du
        let a = self.rho_c;
        let lo = -1.0 / g;
        let arc_part = match d {
            2 => {
                let f = |u: f64| 0.5 * (u * (a * a - u * u).max(0.0).sqrt() + a * a * (u / a).asin());
                f(a) - f(lo)
            }
            3 => {
                let f = |u: f64| a * a * u - u * u * u / 3.0;
                f(a) - f(lo)
            }
            _ => arc_slice_integral_quadrature(a, lo, d),
        };
        unit_ball_volume(d - 1) * (power_part + arc_part)
    }

    /// Boundary point on `branch` at profile parameter `param`, placed along the
    /// horizontal unit direction `horizontal` (length d-1; ignored when r = 0).
    ///
    /// The parameter is `r` on the power branch and the arc angle
    /// `φ ∈ [-φ₀, π/2]` (measured from the horizontal at the arc centre) otherwise.
    pub fn boundary_point(&self, branch: Branch, param: f64, horizontal: &[f64]) -> BoundaryPoint {
        let d = self.params.d;
        let (r, y, nh, nv) = match branch {
            Branch::Power => {
                let r = param;
                let s = self.params.gamma * r.powf(self.params.gamma - 1.0);
                let w = (1.0 + s * s).sqrt();
                (r, r.powf(self.params.gamma), s / w, -1.0 / w)
            }
            Branch::LowerArc | Branch::UpperArc => {
                let (sn, cs) = param.sin_cos();
                (self.rho_c * cs, self.y_c + self.rho_c * sn, cs, sn)
            }
        };
        let mut point = vec![0.0; d];
        let mut normal = vec![0.0; d];
        let hnorm: f64 = horizontal.iter().map(|v| v * v).sum::<f64>().sqrt();
        if hnorm > 0.0 {
            for i in 0..d - 1 {
                let u = horizontal[i] / hnorm;
                point[i] = r * u;
                normal[i] = nh * u;
            }
        }
        point[d - 1] = y;
        normal[d - 1] = nv;
        let mut bp = BoundaryPoint {
            point,
            r,
            y,
            branch,
            side: branch.side(),
            normal,
            gaussian_curvature: 0.0,
        };
        bp.gaussian_curvature = self.curvature_at(&bp);
        bp
    }

    /// Angle `φ₀` with `sin φ₀ = 1/(γ rho_c)`: the seam sits at arc angle `-φ₀`.
    pub fn seam_angle(&self) -> f64 {
        (1.0 / (self.params.gamma * self.rho_c)).asin()
    }

    /// The boundary point whose outward normal is `direction`.
    pub fn support_point(&self, direction: &[f64]) -> Result<BoundaryPoint> {
        let d = self.params.d;
        if direction.len() != d {
            return Err(Error::invalid("direction", format!("{direction:?}"), format!("expected {d} components")));
        }
        let norm: f64 = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("direction", format!("{direction:?}"), "must be a unit vector"));
        }
        let horizontal = &direction[..d - 1];
        let nh: f64 = horizontal.iter().map(|v| v * v).sum::<f64>().sqrt();
        let nv = direction[d - 1];

        if nh == 0.0 {
            return Ok(if nv < 0.0 {
                self.boundary_point(Branch::Power, 0.0, horizontal)
            } else {
                self.boundary_point(Branch::UpperArc, PI / 2.0, horizontal)
            });
        }
        let angle = nv.atan2(nh);
        let phi0 = self.seam_angle();
        if angle >= 0.0 {
            return Ok(self.boundary_point(Branch::UpperArc, angle, horizontal));
        }
        if angle >= -phi0 {
            return Ok(self.boundary_point(Branch::LowerArc, angle, horizontal));
        }
        // Power branch: solve γ r^{γ-1} = nh / (-nv) by bisection on r ∈ [0, 1].
        let target = nh / (-nv);
        let g = self.params.gamma;
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        for _ in 0..200 {
            if hi - lo <= 1e-12 {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if g * mid.powf(g - 1.0) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(self.boundary_point(Branch::Power, 0.5 * (lo + hi), horizontal))
    }

    /// Gaussian curvature at a boundary point (surface-of-revolution formulas).
    pub fn curvature_at(&self, point: &BoundaryPoint) -> f64 {
        let d = self.params.d;
        let g = self.params.gamma;
        match point.branch {
            Branch::LowerArc | Branch::UpperArc => self.rho_c.powi(-((d - 1) as i32)),
            Branch::Power => {
                let r = point.r;
                if r == 0.0 {
                    return if (g - 2.0).abs() < 1e-12 {
                        2f64.powi((d - 1) as i32)
                    } else {
                        0.0
                    };
                }
                let s = g * r.powf(g - 1.0);
                let s2 = g * (g - 1.0) * r.powf(g - 2.0);
                let w = 1.0 + s * s;
                let profile = s2 / w.powf(1.5);
                let rotational = g * r.powf(g - 2.0) / w.sqrt();
                profile * rotational.powi((d - 2) as i32)
            }
        }
    }
}

fn arc_slice_integral_quadrature(a: f64, lo: f64, d: usize) -> f64 {
    // u = a sin φ turns the integrand into a^d cos^d φ, which is entire.
    let phi_lo = (lo / a).asin();
    let phi_hi = PI / 2.0;
    let k = d as i32;
    a.powi(k) * gl32().composite(phi_lo, phi_hi, 8, |phi| phi.cos().powi(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn body(d: usize, g: f64) -> FlatPointBody {
        FlatPointBody::with(d, g).unwrap()
    }

    #[test]
    fn derived_constants() {
        let p = BodyParams::new(2, 2.0).unwrap();
        assert_eq!(p.y_c(), 1.5);
        assert!((p.rho_c() - 1.25f64.sqrt()).abs() < 1e-15);
        for g in [2.0, 3.0, 10.0] {
            let p = BodyParams::new(3, g).unwrap();
            assert!(p.rho_c() > 0.0 && p.rho_c() < p.y_c());
        }
    }

    #[test]
    fn rejects_bad_params() {
        assert!(BodyParams::new(1, 2.0).is_err());
        assert!(BodyParams::new(2, 1.5).is_err());
        assert!(BodyParams::new(2, f64::NAN).is_err());
    }

    #[test]
    fn contains_examples() {
        let b = body(2, 2.0);
        assert!(b.contains(&[0.0, 0.0]));
        assert!(!b.contains(&[0.0, -0.1]));
        assert!(b.contains(&[1.0, 1.0]));
        assert!(!b.contains(&[1.0, 0.99]));
        assert!(b.contains(&[0.0, b.height()]));
        assert!(!b.contains(&[0.0, b.height() + 1e-9]));
    }

    #[test]
    fn volume_examples() {
        let v2 = body(2, 2.0).volume();
        assert!((v2 - 4.3764).abs() < 1e-3, "{v2}");
        let rho_c = 1.25f64.sqrt();
        assert!(v2 > PI * rho_c * rho_c && v2 < 2.0 * rho_c * (1.5 + rho_c));
        assert!((body(2, 4.0).volume() - 3.7793).abs() < 1e-3);
    }

    #[test]
    fn volume_matches_piecewise_oracle() {
        // Independent oracle: direct composite quadrature of the slice integral in y.
        for (d, g) in [(2, 2.0), (2, 4.0), (3, 2.0), (3, 6.0), (4, 3.0), (5, 2.5)] {
            let b = body(d, g);
            let vk = unit_ball_volume(d - 1);
            let k = (d - 1) as i32;
            // power part in r: y = r^γ, dy = γ r^{γ-1} dr
            let p = gl32().composite(0.0, 1.0, 64, |r| r.powi(k) * g * r.powf(g - 1.0));
            let a = b.rho_c();
            // arc part: y = y_c + a sin φ, dy = a cos φ dφ, slice radius a cos φ
            let q = gl32().composite(-b.seam_angle(), PI / 2.0, 64, |phi| {
                (a * phi.cos()).powi(k) * a * phi.cos()
            });
            let want = vk * (p + q);
            assert!((b.volume() - want).abs() < 1e-10 * want, "d={d} g={g}: {} vs {want}", b.volume());
        }
    }

    #[test]
    fn volume_matches_monte_carlo() {
        let b = body(2, 3.0);
        let (rho_c, top) = b.bounding_extents();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 10_000_000usize;
        let mut hits = 0usize;
        for _ in 0..n {
            let x = rng.random_range(-rho_c..rho_c);
            let y = rng.random_range(0.0..top);
            if b.contains_parts(x * x, y) {
                hits += 1;
            }
        }
        let box_area = 2.0 * rho_c * top;
        let frac = hits as f64 / n as f64;
        let est = frac * box_area;
        let se = box_area * (frac * (1.0 - frac) / n as f64).sqrt();
        assert!((est - b.volume()).abs() < 3.0 * se, "{est} ± {se} vs {}", b.volume());
    }

    #[test]
    fn slice_radius_examples() {
        let b = body(2, 2.0);
        assert_eq!(b.slice_radius(0.0).unwrap(), 0.0);
        let below = b.slice_radius(1.0).unwrap();
        let u = b.y_c() - 1.0;
        let above = (b.rho_c() * b.rho_c() - u * u).sqrt();
        assert!((below - 1.0).abs() < 1e-15 && (above - 1.0).abs() < 1e-12);
        assert!((b.slice_radius(b.y_c()).unwrap() - b.rho_c()).abs() < 1e-15);
        assert!(b.slice_radius(-0.1).is_err());
        assert!(b.slice_radius(b.height() + 0.1).is_err());
    }

    #[test]
    fn gluing_is_c1() {
        for g in [2.0, 2.5, 3.0, 4.0, 6.0, 10.0] {
            let b = body(2, g);
            let arc_val = b.y_c() - (b.rho_c() * b.rho_c() - 1.0).sqrt();
            assert!((arc_val - 1.0).abs() < 1e-12, "g={g}");
            let arc_slope = 1.0 / (b.rho_c() * b.rho_c() - 1.0).sqrt();
            assert!((arc_slope - g).abs() < 1e-12 * g, "g={g}");
            assert!((b.h_low_slope(1.0) - g).abs() < 1e-12);
        }
    }

    #[test]
    fn flat_point_order() {
        let flat = body(2, 4.0);
        let round = body(2, 2.0);
        let r = 1e-4;
        assert!(flat.h_low(r) / (r * r) < 1e-7);
        assert!((round.h_low(r) / (r * r) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn profiles_ordered_and_shaped() {
        let b = body(2, 3.0);
        let n = 400;
        let rho_c = b.rho_c();
        let mut prev_low = -1.0;
        for i in 0..n {
            let r = rho_c * i as f64 / n as f64;
            assert!(b.h_low(r) < b.h_up(r));
            assert!(b.h_low(r) >= prev_low);
            prev_low = b.h_low(r);
        }
    }

    #[test]
    fn convexity_midpoints() {
        let b = body(2, 6.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (rho_c, top) = b.bounding_extents();
        let mut inside = Vec::new();
        while inside.len() < 20_000 {
            let p = [rng.random_range(-rho_c..rho_c), rng.random_range(0.0..top)];
            if b.contains(&p) {
                inside.push(p);
            }
        }
        for k in 0..10_000 {
            let a = inside[2 * k];
            let c = inside[2 * k + 1];
            let m = [0.5 * (a[0] + c[0]), 0.5 * (a[1] + c[1])];
            assert!(b.contains(&m), "{a:?} {c:?}");
        }
    }

    #[test]
    fn support_point_examples() {
        let b = body(2, 2.0);
        let down = b.support_point(&[0.0, -1.0]).unwrap();
        assert_eq!(down.point, vec![0.0, 0.0]);
        let up = b.support_point(&[0.0, 1.0]).unwrap();
        assert!((up.point[1] - b.height()).abs() < 1e-15);
        let side = b.support_point(&[1.0, 0.0]).unwrap();
        assert!((side.point[0] - 1.118034).abs() < 1e-6);
        assert!((side.point[1] - 1.5).abs() < 1e-12);
        assert!(b.support_point(&[1.0, 1.0]).is_err());

        let b3 = body(3, 4.0);
        let apex = b3.support_point(&[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(apex.point[..2], [0.0, 0.0]);
    }

    #[test]
    fn support_point_power_branch_matches_closed_form() {
        let b = body(2, 3.0);
        let slope: f64 = 1.7;
        let n = [slope, -1.0];
        let w = (1.0 + slope * slope).sqrt();
        let sp = b.support_point(&[n[0] / w, n[1] / w]).unwrap();
        let r = (slope / 3.0).powf(1.0 / 2.0);
        assert_eq!(sp.branch, Branch::Power);
        assert!((sp.r - r).abs() < 1e-11);
    }

    #[test]
    fn support_point_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (d, g) in [(2, 2.0), (2, 5.0), (3, 3.0)] {
            let b = body(d, g);
            let phi0 = b.seam_angle();
            for _ in 0..1000 {
                let mut h: Vec<f64> = (0..d - 1).map(|_| rng.random_range(-1.0..1.0)).collect();
                if h.iter().all(|v| *v == 0.0) {
                    h[0] = 1.0;
                }
                let bp = match rng.random_range(0..3) {
                    0 => b.boundary_point(Branch::Power, rng.random_range(0.01..0.999), &h),
                    1 => b.boundary_point(Branch::LowerArc, rng.random_range(-phi0 + 1e-6..0.0), &h),
                    _ => b.boundary_point(Branch::UpperArc, rng.random_range(0.0..PI / 2.0 - 1e-6), &h),
                };
                let nrm: f64 = bp.normal.iter().map(|v| v * v).sum::<f64>().sqrt();
                assert!((nrm - 1.0).abs() < 1e-12);
                let back = b.support_point(&bp.normal).unwrap();
                let err = bp.point.iter().zip(&back.point).map(|(a, c)| (a - c).abs()).fold(0.0, f64::max);
                assert!(err < 1e-8, "d={d} g={g} {:?} vs {:?}", bp.point, back.point);
                // point lies on its profile branch
                let want_y = match bp.branch {
                    Branch::UpperArc => b.h_up(bp.r),
                    _ => b.h_low(bp.r),
                };
                assert!((bp.y - want_y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn seam_tie_resolves_to_arc() {
        let b = body(2, 2.0);
        let phi0 = b.seam_angle();
        let n = [phi0.cos(), -phi0.sin()];
        assert_eq!(b.support_point(&n).unwrap().branch, Branch::LowerArc);
    }

    #[test]
    fn curvature_examples() {
        let b = body(2, 2.0);
        let apex = b.support_point(&[0.0, 1.0]).unwrap();
        assert!((b.curvature_at(&apex) - 0.894427191).abs() < 1e-9);
        let seam = b.boundary_point(Branch::Power, 1.0, &[1.0]);
        assert!((b.curvature_at(&seam) - 2.0 / 5f64.powf(1.5)).abs() < 1e-12);
        let flat = body(2, 4.0);
        let origin = flat.support_point(&[0.0, -1.0]).unwrap();
        assert_eq!(flat.curvature_at(&origin), 0.0);
        let origin2 = b.support_point(&[0.0, -1.0]).unwrap();
        assert!(b.curvature_at(&origin2) > 0.0);
        // d = 3 cap: rho_c^{-2}
        let b3 = body(3, 2.0);
        let top = b3.support_point(&[0.0, 0.0, 1.0]).unwrap();
        assert!((top.gaussian_curvature - 1.0 / 1.25).abs() < 1e-12);
    }

    #[test]
    fn curvature_positive_away_from_origin() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for g in [2.0, 3.0, 6.0] {
            let b = body(3, g);
            for _ in 0..1000 {
                let bp = b.boundary_point(Branch::Power, rng.random_range(1e-3..1.0), &[1.0, 0.5]);
                assert!(b.curvature_at(&bp) > 0.0);
            }
        }
    }

    #[test]
    fn params_json_round_trip_recomputes_volume() {
        let b = body(3, 4.5);
        let s = serde_json::to_string(&b).unwrap();
        assert_eq!(s, r#"{"d":3,"gamma":4.5}"#);
        let back: FlatPointBody = serde_json::from_str(&s).unwrap();
        assert_eq!(back.volume(), b.volume());
        assert!(serde_json::from_str::<FlatPointBody>(r#"{"d":2,"gamma":1.0}"#).is_err());
    }
}
