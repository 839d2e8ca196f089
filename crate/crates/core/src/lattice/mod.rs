//! Exact lattice-point counting in `R σ(Ω) + t` and the discrepancy function.
//!
//! The lattice is rotated into body coordinates rather than the body into lattice
//! coordinates: a point `n ∈ Z^d` is counted iff `σᵀ (n - t) / R ∈ Ω`. For every
//! column of lattice points sharing the first `d - 1` coordinates the admissible
//! last coordinates form an integer interval (the body is convex), whose endpoints
//! are located by galloping plus integer bisection on the membership predicate.

mod mollifier;

pub use mollifier::{mollified_discrepancy, MollifiedExpansion, MollifiedValue, MollifierSpec, PhiHatTable};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::body::FlatPointBody;
use crate::error::{Error, Result};

/// A proper rotation of R^d, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RotationRepr", into = "RotationRepr")]
pub struct Rotation {
    dim: usize,
    m: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RotationRepr {
    matrix: Vec<Vec<f64>>,
}

impl TryFrom<RotationRepr> for Rotation {
    type Error = Error;
    fn try_from(repr: RotationRepr) -> Result<Self> {
        Rotation::from_rows(&repr.matrix)
    }
}

impl From<Rotation> for RotationRepr {
    fn from(rot: Rotation) -> Self {
        RotationRepr {
            matrix: (0..rot.dim).map(|i| rot.row(i).to_vec()).collect(),
        }
    }
}

const ORTHO_TOL: f64 = 1e-9;

impl Rotation {
    pub fn identity(dim: usize) -> Self {
        let mut m = vec![0.0; dim * dim];
        for i in 0..dim {
            m[i * dim + i] = 1.0;
        }
        Rotation { dim, m }
    }

    /// Validates orthogonality and unit determinant.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::invalid("rotation", format!("{rows:?}"), "matrix must be square"));
        }
        let rot = Rotation {
            dim,
            m: rows.iter().flatten().copied().collect(),
        };
        if rot.orthogonality_defect() >= ORTHO_TOL {
            return Err(Error::invalid("rotation", format!("{rows:?}"), "matrix is not orthogonal"));
        }
        if (rot.determinant() - 1.0).abs() > ORTHO_TOL {
            return Err(Error::invalid("rotation", format!("{rows:?}"), "determinant is not +1"));
        }
        Ok(rot)
    }

    /// Planar rotation by `angle`.
    pub fn planar(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Rotation { dim: 2, m: vec![c, -s, s, c] }
    }

    /// Rotation matrix of the unit quaternion `(w, x, y, z)`.
    pub fn from_quaternion(q: [f64; 4]) -> Self {
        let [w, x, y, z] = q;
        let m = vec![
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - z * w),
            2.0 * (x * z + y * w),
            2.0 * (x * y + z * w),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - x * w),
            2.0 * (x * z - y * w),
            2.0 * (y * z + x * w),
            1.0 - 2.0 * (x * x + y * y),
        ];
        Rotation { dim: 3, m }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[i * self.dim + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.m[i * self.dim..(i + 1) * self.dim]
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.dim).map(|i| (0..self.dim).map(|j| self.get(i, j) * v[j]).sum()).collect()
    }

    /// `σᵀ v = σ⁻¹ v`.
    pub fn apply_inverse(&self, v: &[f64]) -> Vec<f64> {
        (0..self.dim).map(|j| (0..self.dim).map(|i| self.get(i, j) * v[i]).sum()).collect()
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim;
        let mut m = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                m[j * d + i] = self.get(i, j);
            }
        }
        Rotation { dim: d, m }
    }

    pub fn compose(&self, other: &Rotation) -> Self {
        let d = self.dim;
        let mut m = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                m[i * d + j] = (0..d).map(|k| self.get(i, k) * other.get(k, j)).sum();
            }
        }
        Rotation { dim: d, m }
    }

    /// `max |σσᵀ - I|`.
    pub fn orthogonality_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let dot: f64 = (0..d).map(|k| self.get(i, k) * self.get(j, k)).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - want).abs());
            }
        }
        worst
    }

    pub fn determinant(&self) -> f64 {
        let d = self.dim;
        let mut a = self.m.clone();
        let mut det = 1.0;
        for col in 0..d {
            let pivot = (col..d)
                .max_by(|&x, &y| a[x * d + col].abs().total_cmp(&a[y * d + col].abs()))
                .unwrap();
            if a[pivot * d + col] == 0.0 {
                return 0.0;
            }
            if pivot != col {
                for k in 0..d {
                    a.swap(pivot * d + k, col * d + k);
                }
                det = -det;
            }
            let p = a[col * d + col];
            det *= p;
            for row in col + 1..d {
                let f = a[row * d + col] / p;
                for k in col..d {
                    a[row * d + k] -= f * a[col * d + k];
                }
            }
        }
        det
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }
}

/// Haar-distributed rotation drawn from `rng`.
pub fn haar_rotation_from_rng<R: Rng + ?Sized>(dimension: usize, rng: &mut R) -> Result<Rotation> {
    match dimension {
        2 => Ok(Rotation::planar(rng.random_range(0.0..2.0 * PI))),
        3 => loop {
            let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
            let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
            if n > 1e-12 {
                break Ok(Rotation::from_quaternion(q.map(|v| v / n)));
            }
        },
        other => Err(Error::UnsupportedDimension(other, "2 or 3")),
    }
}

/// Haar-distributed rotation, deterministic in `seed`.
pub fn haar_rotation(dimension: usize, seed: u64) -> Result<Rotation> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    haar_rotation_from_rng(dimension, &mut rng)
}

/// Dilation, rotation and translation of the body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    #[serde(rename = "R")]
    pub dilation: f64,
    pub rotation: Rotation,
    pub translation: Vec<f64>,
}

impl Placement {
    /// Checks `R >= 1`, matching dimensions and `t ∈ [0, 1)^d`.
    pub fn new(dilation: f64, rotation: Rotation, translation: Vec<f64>) -> Result<Self> {
        if !dilation.is_finite() || dilation < 1.0 {
            return Err(Error::invalid("R", dilation, "dilation must be >= 1"));
        }
        if translation.len() != rotation.dim() {
            return Err(Error::invalid(
                "translation",
                format!("{translation:?}"),
                format!("expected {} components", rotation.dim()),
            ));
        }
        if translation.iter().any(|t| !(0.0..1.0).contains(t)) {
            return Err(Error::invalid("translation", format!("{translation:?}"), "components must lie in [0, 1)"));
        }
        Ok(Placement {
            dilation,
            rotation,
            translation,
        })
    }

    pub fn identity(dim: usize, dilation: f64) -> Result<Self> {
        Placement::new(dilation, Rotation::identity(dim), vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.rotation.dim()
    }
}

/// Lattice count together with the number of membership evaluations spent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CountStats {
    pub count: u64,
    pub membership_tests: u64,
}

struct ColumnProbe<'a> {
    body: &'a FlatPointBody,
    /// Body coordinates of lattice point `(n', 0)`.
    base: [f64; 3],
    /// Increment of body coordinates per unit step of the last lattice coordinate.
    dir: [f64; 3],
    d: usize,
    tests: u64,
}

impl ColumnProbe<'_> {
    #[inline(always)]
    fn parts(&self, k: i64) -> (f64, f64) {
        let kf = k as f64;
        let d = self.d;
        let mut r2 = 0.0;
        for j in 0..d - 1 {
            let x = self.base[j] + kf * self.dir[j];
            r2 += x * x;
        }
        (r2, self.base[d - 1] + kf * self.dir[d - 1])
    }

    #[inline(always)]
    fn inside(&mut self, k: i64) -> bool {
        self.tests += 1;
        let (r2, y) = self.parts(k);
        self.body.contains_parts(r2, y)
    }

    #[inline(always)]
    fn depth(&mut self, k: i64) -> f64 {
        self.tests += 1;
        let (r2, y) = self.parts(k);
        self.body.depth_parts(r2, y)
    }

    /// Integer range of `k` where the column line meets the cylinder `r <= rho_c`
    /// and the slab `0 <= y <= height`.
    fn candidate_range(&self) -> Option<(i64, i64)> {
        let d = self.d;
        let rho_c = self.body.rho_c();
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        let mut aa = 0.0;
        let mut ab = 0.0;
        let mut bb = 0.0;
        for j in 0..d - 1 {
            aa += self.base[j] * self.base[j];
            ab += self.base[j] * self.dir[j];
            bb += self.dir[j] * self.dir[j];
        }
        let slack = 1e-9;
        let c = aa - rho_c * rho_c;
        if bb > 1e-300 {
            let disc = ab * ab - bb * c;
            if disc < 0.0 {
                return None;
            }
            let sq = disc.sqrt();
            lo = (-ab - sq) / bb - slack;
            hi = (-ab + sq) / bb + slack;
        } else if c > 0.0 {
            return None;
        }
        let (y0, dy) = (self.base[d - 1], self.dir[d - 1]);
        let top = self.body.height();
        if dy.abs() > 1e-300 {
            let (a, b) = ((0.0 - y0) / dy, (top - y0) / dy);
            lo = lo.max(a.min(b) - slack);
            hi = hi.min(a.max(b) + slack);
        } else if y0 < 0.0 || y0 > top {
            return None;
        }
        let ka = lo.ceil();
        let kb = hi.floor();
        if !(ka <= kb) || !ka.is_finite() || !kb.is_finite() {
            return None;
        }
        Some((ka as i64, kb as i64))
    }

    /// Some `k` in `[ka, kb]` inside the body, or `None` if the column is empty.
    fn find_inside(&mut self, ka: i64, kb: i64, hint: Option<i64>) -> Option<i64> {
        if let Some(h) = hint {
            if (ka..=kb).contains(&h) && self.inside(h) {
                return Some(h);
            }
        }
        // Depth is concave along the line: binary search on the sign of its increments.
        let (mut lo, mut hi) = (ka, kb);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.depth(mid) < self.depth(mid + 1) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        self.inside(lo).then_some(lo)
    }

    /// Smallest inside `k`, given `k_in` inside and nothing inside below `ka`.
    fn lower_end(&mut self, k_in: i64, hint: i64, ka: i64) -> i64 {
        let h = hint.clamp(ka, k_in);
        let (mut outside, mut inside);
        if self.inside(h) {
            inside = h;
            let mut step = 1;
            loop {
                let k = inside - step;
                if k < ka {
                    outside = ka - 1;
                    break;
                }
                if self.inside(k) {
                    inside = k;
                    step *= 2;
                } else {
                    outside = k;
                    break;
                }
            }
        } else {
            outside = h;
            let mut step = 1;
            loop {
                let k = outside + step;
                if k >= k_in {
                    inside = k_in;
                    break;
                }
                if self.inside(k) {
                    inside = k;
                    break;
                }
                outside = k;
                step *= 2;
            }
        }
        while inside - outside > 1 {
            let mid = outside + (inside - outside) / 2;
            if self.inside(mid) {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        inside
    }

    /// Largest inside `k`, given `k_in` inside and nothing inside above `kb`.
    fn upper_end(&mut self, k_in: i64, hint: i64, kb: i64) -> i64 {
        let h = hint.clamp(k_in, kb);
        let (mut outside, mut inside);
        if self.inside(h) {
            inside = h;
            let mut step = 1;
            loop {
                let k = inside + step;
                if k > kb {
                    outside = kb + 1;
                    break;
                }
                if self.inside(k) {
                    inside = k;
                    step *= 2;
                } else {
                    outside = k;
                    break;
                }
            }
        } else {
            outside = h;
            let mut step = 1;
            loop {
                let k = outside - step;
                if k <= k_in {
                    inside = k_in;
                    break;
                }
                if self.inside(k) {
                    inside = k;
                    break;
                }
                outside = k;
                step *= 2;
            }
        }
        while outside - inside > 1 {
            let mid = inside + (outside - inside) / 2;
            if self.inside(mid) {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        inside
    }
}

/// Counts `n ∈ Z^d` with `σᵀ(n - t)/R ∈ Ω` for any real translation `t`.
pub fn count_points_with_stats(
    body: &FlatPointBody,
    dilation: f64,
    rotation: &Rotation,
    translation: &[f64],
) -> CountStats {
    let d = body.dim();
    assert!(d == 2 || d == 3, "lattice counting supports d = 2 or 3");
    assert_eq!(rotation.dim(), d);
    assert_eq!(translation.len(), d);
    let inv_r = 1.0 / dilation;

    // Enclosing ball of the placed body, in lattice coordinates.
    let (hc, rb) = body.enclosing_ball();
    let centre: Vec<f64> = (0..d).map(|i| dilation * rotation.get(i, d - 1) * hc + translation[i]).collect();
    let radius = dilation * rb * (1.0 + 1e-12) + 1e-9;

    let mut dir = [0.0; 3];
    for j in 0..d {
        dir[j] = rotation.get(d - 1, j) * inv_r;
    }
    // Body coordinates of (n', 0): σᵀ((n', 0) - t)/R.
    let base_for = |prefix: &[i64]| -> [f64; 3] {
        let mut b = [0.0; 3];
        for j in 0..d {
            let mut acc = -rotation.get(d - 1, j) * translation[d - 1];
            for (i, &n) in prefix.iter().enumerate() {
                acc += rotation.get(i, j) * (n as f64 - translation[i]);
            }
            b[j] = acc * inv_r;
        }
        b
    };

    let mut probe = ColumnProbe {
        body,
        base: [0.0; 3],
        dir,
        d,
        tests: 0,
    };
    let mut count: u64 = 0;

    let mut run_row = |probe: &mut ColumnProbe, prefixes: &mut dyn Iterator<Item = Vec<i64>>| {
        let mut prev: Option<(i64, i64)> = None;
        for prefix in prefixes {
            probe.base = base_for(&prefix);
            let Some((ka, kb)) = probe.candidate_range() else {
                prev = None;
                continue;
            };
            let hint = prev.map(|(lo, hi)| lo + (hi - lo) / 2);
            match probe.find_inside(ka, kb, hint) {
                Some(k_in) => {
                    let (hlo, hhi) = prev.unwrap_or((k_in, k_in));
                    let lo = probe.lower_end(k_in, hlo, ka);
                    let hi = probe.upper_end(k_in, hhi, kb);
                    count += (hi - lo + 1) as u64;
                    prev = Some((lo, hi));
                }
                None => prev = None,
            }
        }
    };

    let first_lo = (centre[0] - radius).ceil() as i64;
    let first_hi = (centre[0] + radius).floor() as i64;
    if d == 2 {
        run_row(&mut probe, &mut (first_lo..=first_hi).map(|n| vec![n]));
    } else {
        for n1 in first_lo..=first_hi {
            let dx = n1 as f64 - centre[0];
            let half = (radius * radius - dx * dx).max(0.0).sqrt();
            let lo = (centre[1] - half).ceil() as i64;
            let hi = (centre[1] + half).floor() as i64;
            run_row(&mut probe, &mut (lo..=hi).map(|n2| vec![n1, n2]));
        }
    }
    CountStats {
        count,
        membership_tests: probe.tests,
    }
}

/// Number of lattice points in `R σ(Ω) + t`.
pub fn count_lattice_points(body: &FlatPointBody, placement: &Placement) -> u64 {
    count_points_with_stats(body, placement.dilation, &placement.rotation, &placement.translation).count
}

/// `R^d |Ω| - card(Z^d ∩ (R σ(Ω) + t))`.
pub fn discrepancy(body: &FlatPointBody, placement: &Placement) -> f64 {
    discrepancy_at(body, placement.dilation, &placement.rotation, &placement.translation)
}

/// Discrepancy for an arbitrary real translation.
pub fn discrepancy_at(body: &FlatPointBody, dilation: f64, rotation: &Rotation, translation: &[f64]) -> f64 {
    let count = count_points_with_stats(body, dilation, rotation, translation).count;
    dilation.powi(body.dim() as i32) * body.volume() - count as f64
}

/// One row of the count/discrepancy CSV stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountRecord {
    pub d: usize,
    pub gamma: f64,
    #[serde(rename = "R")]
    pub dilation: f64,
    pub seed: u64,
    pub count: u64,
    pub discrepancy: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn body(d: usize, g: f64) -> FlatPointBody {
        FlatPointBody::with(d, g).unwrap()
    }

    /// Oracle: membership scan of every lattice point in the bounding box.
    fn brute_force(body: &FlatPointBody, dilation: f64, rot: &Rotation, t: &[f64]) -> u64 {
        let d = body.dim();
        let (hc, rb) = body.enclosing_ball();
        let centre: Vec<f64> = (0..d).map(|i| dilation * rot.get(i, d - 1) * hc + t[i]).collect();
        let rad = dilation * rb + 1.0;
        let ranges: Vec<(i64, i64)> = centre
            .iter()
            .map(|c| ((c - rad).floor() as i64, (c + rad).ceil() as i64))
            .collect();
        let mut count = 0;
        let mut n = vec![0i64; d];
        let rec = |n: &[i64]| {
            let v: Vec<f64> = (0..d).map(|i| (n[i] as f64 - t[i]) / dilation).collect();
            let x = rot.apply_inverse(&v);
            body.contains(&x) as u64
        };
        if d == 2 {
            for a in ranges[0].0..=ranges[0].1 {
                for b in ranges[1].0..=ranges[1].1 {
                    n[0] = a;
                    n[1] = b;
                    count += rec(&n);
                }
            }
        } else {
            for a in ranges[0].0..=ranges[0].1 {
                for b in ranges[1].0..=ranges[1].1 {
                    for c in ranges[2].0..=ranges[2].1 {
                        n[0] = a;
                        n[1] = b;
                        n[2] = c;
                        count += rec(&n);
                    }
                }
            }
        }
        count
    }

    #[test]
    fn haar_rotations_are_proper() {
        for seed in 0..200 {
            for d in [2, 3] {
                let r = haar_rotation(d, seed).unwrap();
                assert!(r.orthogonality_defect() < 1e-9);
                assert!((r.determinant() - 1.0).abs() < 1e-9);
            }
        }
        assert!(haar_rotation(4, 0).is_err());
        assert_eq!(haar_rotation(3, 9).unwrap(), haar_rotation(3, 9).unwrap());
    }

    #[test]
    fn haar_trace_mean_vanishes() {
        for d in [2, 3] {
            let n = 100_000;
            let mean: f64 = (0..n).map(|s| haar_rotation(d, s).unwrap().trace()).sum::<f64>() / n as f64;
            assert!(mean.abs() < 0.02, "d={d} mean trace {mean}");
        }
    }

    #[test]
    fn rotation_validation() {
        assert!(Rotation::from_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]).is_err());
        assert!(Rotation::from_rows(&[vec![1.0, 0.1], vec![0.0, 1.0]]).is_err());
        assert!(Rotation::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).is_ok());
    }

    #[test]
    fn count_examples() {
        let b = body(2, 2.0);
        let id = Rotation::identity(2);
        assert_eq!(count_points_with_stats(&b, 1.0, &id, &[0.0, 0.0]).count, 7);
        assert_eq!(count_points_with_stats(&b, 1.0, &id, &[0.5, 0.5]).count, 6);
        assert_eq!(brute_force(&b, 1.0, &id, &[0.0, 0.0]), 7);
        assert_eq!(brute_force(&b, 1.0, &id, &[0.5, 0.5]), 6);
    }

    #[test]
    fn discrepancy_example() {
        let b = body(2, 2.0);
        let p = Placement::identity(2, 1.0).unwrap();
        let dsc = discrepancy(&b, &p);
        assert!((dsc - (-2.6236)).abs() < 1e-3, "{dsc}");
        assert!((dsc - (b.volume() - 7.0)).abs() < 1e-12);
    }

    #[test]
    fn counts_nondecreasing_in_dilation() {
        let b = body(2, 2.0);
        let id = Rotation::identity(2);
        let counts: Vec<u64> = [1.0, 1.5, 2.0, 3.0, 4.0, 8.0, 16.0, 33.3]
            .iter()
            .map(|&r| count_points_with_stats(&b, r, &id, &[0.0, 0.0]).count)
            .collect();
        assert!(counts.windows(2).all(|w| w[0] <= w[1]), "{counts:?}");
    }

    #[test]
    fn periodic_in_translation() {
        let b = body(2, 3.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let rot = haar_rotation_from_rng(2, &mut rng).unwrap();
            let r = rng.random_range(1.0..30.0);
            let t = [rng.random::<f64>(), rng.random::<f64>()];
            let m = [rng.random_range(-5..5) as f64, rng.random_range(-5..5) as f64];
            let shifted = [t[0] + m[0], t[1] + m[1]];
            assert_eq!(
                count_points_with_stats(&b, r, &rot, &t).count,
                count_points_with_stats(&b, r, &rot, &shifted).count
            );
        }
    }

    #[test]
    fn matches_brute_force_on_random_placements() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for trial in 0..60 {
            let d = if trial % 3 == 0 { 3 } else { 2 };
            let g = [2.0, 2.5, 4.0, 7.0][trial % 4];
            let b = body(d, g);
            let rot = haar_rotation_from_rng(d, &mut rng).unwrap();
            let r = if d == 2 { rng.random_range(1.0..20.0) } else { rng.random_range(1.0..8.0) };
            let t: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
            let fast = count_points_with_stats(&b, r, &rot, &t).count;
            assert_eq!(fast, brute_force(&b, r, &rot, &t), "trial {trial} d={d} g={g} R={r}");
        }
    }

    #[test]
    fn rotated_lattice_formulation_agrees() {
        // Count the body rotated by σ at t, versus testing σᵀ-rotated lattice points
        // against the unrotated dilate R Ω + σᵀ t.
        let b = body(2, 4.0);
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..50 {
            let rot = haar_rotation_from_rng(2, &mut rng).unwrap();
            let r = rng.random_range(1.0..15.0);
            let t = [rng.random::<f64>(), rng.random::<f64>()];
            let st = rot.apply_inverse(&t);
            let rad = r * 3.0 + 2.0;
            let mut other = 0u64;
            for a in -(rad as i64)..=(rad as i64) {
                for c in -(rad as i64)..=(rad as i64) {
                    let m = rot.apply_inverse(&[a as f64, c as f64]);
                    let x = [(m[0] - st[0]) / r, (m[1] - st[1]) / r];
                    other += b.contains(&x) as u64;
                }
            }
            assert_eq!(count_points_with_stats(&b, r, &rot, &t).count, other);
        }
    }

    #[test]
    fn membership_cost_is_near_linear_per_column() {
        let b = body(2, 2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for &r in &[16.0, 64.0, 256.0, 1024.0] {
            let rot = haar_rotation_from_rng(2, &mut rng).unwrap();
            let stats = count_points_with_stats(&b, r, &rot, &[0.3, 0.7]);
            let bound = 20.0 * r * (r as f64).log2();
            assert!((stats.membership_tests as f64) <= bound, "R={r}: {} tests", stats.membership_tests);
        }
        let b3 = body(3, 2.0);
        let rot = haar_rotation(3, 5).unwrap();
        let r: f64 = 32.0;
        let stats = count_points_with_stats(&b3, r, &rot, &[0.1, 0.2, 0.3]);
        assert!((stats.membership_tests as f64) <= 20.0 * r * r * r.log2());
    }

    #[test]
    fn placement_validation_and_json() {
        assert!(Placement::identity(2, 0.5).is_err());
        assert!(Placement::new(2.0, Rotation::identity(2), vec![1.0, 0.0]).is_err());
        let p = Placement::new(3.5, haar_rotation(3, 4).unwrap(), vec![0.25, 0.5, 0.75]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        let back: Placement = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<Placement>(
            r#"{"R":2.0,"rotation":{"matrix":[[1.0,0.0],[0.0,-1.0]]},"translation":[0.0,0.0]}"#
        )
        .is_err());
    }
}
