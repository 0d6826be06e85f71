use std::sync::Arc;

use crate::{Error, Point, Result};

/// Uniform vertex-centered grid on `[-1,1]^n`.
///
/// The origin and all box corners are grid vertices; this requires an odd
/// vertex count per axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    n: usize,
    points: usize,
}

impl GridSpec {
    pub fn new(n: usize, points: usize) -> Result<Self> {
        if n != 2 && n != 3 {
            return Err(Error::Parameter(format!("dimension must be 2 or 3, got {n}")));
        }
        if points < 33 {
            return Err(Error::Parameter(format!(
                "points-per-axis must be at least 33, got {points}"
            )));
        }
        if points % 2 == 0 {
            return Err(Error::Parameter(format!(
                "points-per-axis must be odd so the origin is a vertex, got {points}"
            )));
        }
        Ok(GridSpec { n, points })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// Grid spacing `h = 2/(N-1)`.
    pub fn spacing(&self) -> f64 {
        2.0 / (self.points as f64 - 1.0)
    }

    /// Total number of vertices, `N^n`.
    pub fn len(&self) -> usize {
        self.points.pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of the `i`-th vertex along one axis.
    pub fn axis_coord(&self, i: usize) -> f64 {
        -1.0 + self.spacing() * i as f64
    }

    /// Vertex position for a multi-index (row-major, first axis slowest).
    pub fn vertex(&self, idx: &[usize; 3]) -> Point {
        let mut x = [0.0; 3];
        for k in 0..self.n {
            x[k] = self.axis_coord(idx[k]);
        }
        x
    }

    /// Flat row-major index of a multi-index.
    pub fn flat(&self, idx: &[usize; 3]) -> usize {
        let mut f = 0;
        for k in 0..self.n {
            f = f * self.points + idx[k];
        }
        f
    }

    /// Inverse of [`GridSpec::flat`].
    pub fn unflat(&self, mut f: usize) -> [usize; 3] {
        let mut idx = [0usize; 3];
        for k in (0..self.n).rev() {
            idx[k] = f % self.points;
            f /= self.points;
        }
        idx
    }

    /// Half-width of the region where the cubic interpolant is defined.
    pub fn evaluable_halfwidth(&self) -> f64 {
        1.0 - 2.0 * self.spacing()
    }

    /// Nearest vertex multi-index to a point.
    pub fn nearest_vertex(&self, x: &Point) -> [usize; 3] {
        let h = self.spacing();
        let mut idx = [0usize; 3];
        for k in 0..self.n {
            let u = ((x[k] + 1.0) / h).round();
            idx[k] = (u.max(0.0) as usize).min(self.points - 1);
        }
        idx
    }
}

/// Anything that can be evaluated (value and gradient) at points of the box.
///
/// Grid fields evaluate through their interpolant; analytic fixtures evaluate
/// exactly. All measurement operations are written against this trait so that
/// closed-form calibrators can bypass interpolation error entirely.
pub trait Field: Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &Point) -> Result<f64>;
    fn gradient(&self, x: &Point) -> Result<Point>;
    /// Half-width of the region where evaluation succeeds.
    fn evaluable_halfwidth(&self) -> f64 {
        1.0
    }
    /// Magnitude scale used for relative thresholds.
    fn scale_hint(&self) -> f64 {
        1.0
    }
}

/// A scalar field sampled on a [`GridSpec`], evaluable anywhere in
/// `[-1+2h, 1-2h]^n` through tensor-product cubic (4-point Lagrange)
/// interpolation. Exact on polynomials of degree at most 3 per axis.
#[derive(Debug, Clone)]
pub struct ScalarField {
    spec: GridSpec,
    values: Vec<f64>,
    label: String,
    scale: f64,
}

impl ScalarField {
    /// Sample a pointwise function at every vertex.
    pub fn sample(spec: GridSpec, label: &str, f: impl Fn(&Point) -> f64) -> Result<Self> {
        let mut values = vec![0.0; spec.len()];
        let mut idx = [0usize; 3];
        for (flat, v) in values.iter_mut().enumerate() {
            let ui = spec.unflat(flat);
            idx[..spec.dim()].copy_from_slice(&ui[..spec.dim()]);
            let x = spec.vertex(&idx);
            let val = f(&x);
            if !val.is_finite() {
                return Err(Error::NonFiniteSample { x, value: val });
            }
            *v = val;
        }
        Ok(Self::from_values(spec, label, values).expect("validated above"))
    }

    /// Wrap an existing raw value vector (row-major, first axis slowest).
    pub fn from_values(spec: GridSpec, label: &str, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::Parameter(format!(
                "value buffer has {} entries, grid needs {}",
                values.len(),
                spec.len()
            )));
        }
        for (flat, v) in values.iter().enumerate() {
            if !v.is_finite() {
                let ui = spec.unflat(flat);
                return Err(Error::NonFiniteSample { x: spec.vertex(&ui), value: *v });
            }
        }
        let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Ok(ScalarField { spec, values, label: label.to_string(), scale })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, idx: &[usize; 3]) -> f64 {
        self.values[self.spec.flat(idx)]
    }

    /// Max absolute vertex value.
    pub fn sup_abs(&self) -> f64 {
        self.scale
    }

    fn stencil_base(&self, x: &Point) -> Result<([usize; 3], [f64; 3])> {
        let h = self.spec.spacing();
        let hw = self.spec.evaluable_halfwidth();
        let n = self.spec.dim();
        for k in 0..n {
            if x[k].abs() > hw + 1e-12 {
                return Err(Error::OutOfDomain { x: *x, halfwidth: hw });
            }
        }
        let mut base = [0usize; 3];
        let mut t = [0.0f64; 3];
        for k in 0..n {
            let u = (x[k].clamp(-hw, hw) + 1.0) / h;
            // Four-point stencil i-1..i+2 around the cell containing u.
            let cell = (u.floor() as isize).clamp(1, self.spec.points as isize - 3);
            base[k] = (cell - 1) as usize;
            t[k] = u - base[k] as f64;
        }
        Ok((base, t))
    }

    /// Cubic interpolation at an interior point.
    pub fn interpolate(&self, x: &Point) -> Result<f64> {
        let (base, t) = self.stencil_base(x)?;
        let n = self.spec.dim();
        let wx = lagrange4(t[0]);
        let wy = lagrange4(t[1]);
        if n == 2 {
            let mut acc = 0.0;
            for a in 0..4 {
                let mut row = 0.0;
                for b in 0..4 {
                    row += wy.0[b] * self.at(&[base[0] + a, base[1] + b, 0]);
                }
                acc += wx.0[a] * row;
            }
            Ok(acc)
        } else {
            let wz = lagrange4(t[2]);
            let mut acc = 0.0;
            for a in 0..4 {
                let mut plane = 0.0;
                for b in 0..4 {
                    let mut row = 0.0;
                    for c in 0..4 {
                        row += wz.0[c] * self.at(&[base[0] + a, base[1] + b, base[2] + c]);
                    }
                    plane += wy.0[b] * row;
                }
                acc += wx.0[a] * plane;
            }
            Ok(acc)
        }
    }

    /// Gradient of the cubic interpolant.
    pub fn interp_gradient(&self, x: &Point) -> Result<Point> {
        let (base, t) = self.stencil_base(x)?;
        let n = self.spec.dim();
        let h = self.spec.spacing();
        let w: Vec<([f64; 4], [f64; 4])> = (0..n).map(|k| lagrange4(t[k])).collect();
        let mut g = [0.0f64; 3];
        if n == 2 {
            for a in 0..4 {
                for b in 0..4 {
                    let v = self.at(&[base[0] + a, base[1] + b, 0]);
                    g[0] += w[0].1[a] * w[1].0[b] * v;
                    g[1] += w[0].0[a] * w[1].1[b] * v;
                }
            }
        } else {
            for a in 0..4 {
                for b in 0..4 {
                    for c in 0..4 {
                        let v = self.at(&[base[0] + a, base[1] + b, base[2] + c]);
                        g[0] += w[0].1[a] * w[1].0[b] * w[2].0[c] * v;
                        g[1] += w[0].0[a] * w[1].1[b] * w[2].0[c] * v;
                        g[2] += w[0].0[a] * w[1].0[b] * w[2].1[c] * v;
                    }
                }
            }
        }
        for gk in g.iter_mut().take(n) {
            *gk /= h;
        }
        Ok(g)
    }

    /// Second difference `D_ii` at a vertex (one-sided clamped at the boundary
    /// is not attempted: interior vertices only, otherwise an error).
    pub fn second_diff(&self, idx: &[usize; 3], axis: usize) -> Result<f64> {
        let nn = self.spec.points();
        if idx[axis] == 0 || idx[axis] + 1 >= nn {
            return Err(Error::OutOfDomain {
                x: self.spec.vertex(idx),
                halfwidth: 1.0 - self.spec.spacing(),
            });
        }
        let h = self.spec.spacing();
        let mut lo = *idx;
        let mut hi = *idx;
        lo[axis] -= 1;
        hi[axis] += 1;
        Ok((self.at(&lo) - 2.0 * self.at(idx) + self.at(&hi)) / (h * h))
    }

    /// Five/seven-point Laplacian at an interior vertex.
    pub fn laplacian_stencil(&self, idx: &[usize; 3]) -> Result<f64> {
        let mut acc = 0.0;
        for axis in 0..self.spec.dim() {
            acc += self.second_diff(idx, axis)?;
        }
        Ok(acc)
    }
}

impl Field for ScalarField {
    fn dim(&self) -> usize {
        self.spec.dim()
    }

    fn value(&self, x: &Point) -> Result<f64> {
        self.interpolate(x)
    }

    fn gradient(&self, x: &Point) -> Result<Point> {
        self.interp_gradient(x)
    }

    fn evaluable_halfwidth(&self) -> f64 {
        self.spec.evaluable_halfwidth()
    }

    fn scale_hint(&self) -> f64 {
        self.scale
    }
}

/// A closed-form field: exact values and gradients from closures.
#[derive(Clone)]
pub struct AnalyticField {
    n: usize,
    scale: f64,
    f: Arc<dyn Fn(&Point) -> f64 + Send + Sync>,
    g: Arc<dyn Fn(&Point) -> Point + Send + Sync>,
}

impl AnalyticField {
    pub fn new(
        n: usize,
        f: impl Fn(&Point) -> f64 + Send + Sync + 'static,
        g: impl Fn(&Point) -> Point + Send + Sync + 'static,
    ) -> Self {
        let mut af = AnalyticField { n, scale: 1.0, f: Arc::new(f), g: Arc::new(g) };
        af.scale = af.estimate_scale();
        af
    }

    /// Central-difference gradient fallback for fields without a closed-form gradient.
    pub fn from_value_fn(n: usize, f: impl Fn(&Point) -> f64 + Send + Sync + 'static) -> Self {
        let f = Arc::new(f);
        let fg = f.clone();
        let g = move |x: &Point| {
            let step = 1e-6;
            let mut grad = [0.0; 3];
            for (k, gk) in grad.iter_mut().enumerate().take(n) {
                let mut xp = *x;
                let mut xm = *x;
                xp[k] += step;
                xm[k] -= step;
                *gk = (fg(&xp) - fg(&xm)) / (2.0 * step);
            }
            grad
        };
        let mut af = AnalyticField { n, scale: 1.0, f, g: Arc::new(g) };
        af.scale = af.estimate_scale();
        af
    }

    fn estimate_scale(&self) -> f64 {
        // Coarse deterministic lattice scan; enough for relative thresholds.
        let m: usize = 33;
        let mut sup = 0.0f64;
        let mut x = [0.0f64; 3];
        let steps = m.pow(self.n as u32);
        for flat in 0..steps {
            let mut f = flat;
            for xk in x.iter_mut().take(self.n) {
                *xk = -1.0 + 2.0 * (f % m) as f64 / (m - 1) as f64;
                f /= m;
            }
            sup = sup.max((self.f)(&x).abs());
        }
        if sup > 0.0 {
            sup
        } else {
            1.0
        }
    }
}

impl Field for AnalyticField {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &Point) -> Result<f64> {
        Ok((self.f)(x))
    }

    fn gradient(&self, x: &Point) -> Result<Point> {
        Ok((self.g)(x))
    }

    fn scale_hint(&self) -> f64 {
        self.scale
    }
}

/// Values and first derivatives of the four cubic Lagrange basis functions at
/// parameter `t` measured in node units from the stencil base.
fn lagrange4(t: f64) -> ([f64; 4], [f64; 4]) {
    let vals = [
        -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0,
        t * (t - 2.0) * (t - 3.0) / 2.0,
        -t * (t - 1.0) * (t - 3.0) / 2.0,
        t * (t - 1.0) * (t - 2.0) / 6.0,
    ];
    let derivs = [
        -(3.0 * t * t - 12.0 * t + 11.0) / 6.0,
        (3.0 * t * t - 10.0 * t + 6.0) / 2.0,
        -(3.0 * t * t - 8.0 * t + 3.0) / 2.0,
        (3.0 * t * t - 6.0 * t + 2.0) / 6.0,
    ];
    (vals, derivs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn grid_spec_invariants() {
        assert!(GridSpec::new(2, 31).is_err());
        assert!(GridSpec::new(2, 64).is_err());
        assert!(GridSpec::new(4, 65).is_err());
        let s = GridSpec::new(2, 65).unwrap();
        assert_abs_diff_eq!(s.spacing(), 2.0 / 64.0);
        // origin is a vertex
        let mid = [32, 32, 0];
        assert_eq!(s.vertex(&mid), [0.0, 0.0, 0.0]);
        // corners are vertices
        assert_eq!(s.vertex(&[0, 0, 0])[0], -1.0);
        assert_eq!(s.vertex(&[64, 64, 0])[1], 1.0);
    }

    #[test]
    fn sample_zero_and_quadratic() {
        let s = GridSpec::new(2, 65).unwrap();
        let z = ScalarField::sample(s, "zero", |_| 0.0).unwrap();
        assert!(z.values().iter().all(|&v| v == 0.0));

        let q = ScalarField::sample(s, "halfx1sq", |x| 0.5 * x[0] * x[0]).unwrap();
        assert_eq!(q.at(&[32, 32, 0]), 0.0);
        assert_eq!(q.at(&[64, 32, 0]), 0.5);
    }

    #[test]
    fn sample_rejects_non_finite() {
        let s = GridSpec::new(2, 65).unwrap();
        let r = ScalarField::sample(s, "bad", |x| {
            if x[0] == 0.0 && x[1] == 0.0 {
                f64::NAN
            } else {
                1.0
            }
        });
        match r {
            Err(Error::NonFiniteSample { x, .. }) => assert_eq!(x[..2], [0.0, 0.0]),
            other => panic!("expected NonFiniteSample, got {other:?}"),
        }
    }

    #[test]
    fn cubic_reproduction_2d() {
        let s = GridSpec::new(2, 65).unwrap();
        let f = ScalarField::sample(s, "halfx1sq", |x| 0.5 * x[0] * x[0]).unwrap();
        let v = f.interpolate(&[0.3, 0.4, 0.0]).unwrap();
        assert_abs_diff_eq!(v, 0.045, epsilon = 1e-14);
    }

    #[test]
    fn cubic_reproduction_3d() {
        let s = GridSpec::new(3, 33).unwrap();
        let f = ScalarField::sample(s, "xyz", |x| x[0] * x[1] * x[2]).unwrap();
        let v = f.interpolate(&[0.1, 0.2, 0.3]).unwrap();
        assert_abs_diff_eq!(v, 0.006, epsilon = 1e-14);
    }

    #[test]
    fn out_of_domain_rejected() {
        let s = GridSpec::new(2, 65).unwrap();
        let f = ScalarField::sample(s, "f", |x| x[0]).unwrap();
        assert!(f.interpolate(&[1.0 - s.spacing(), 0.0, 0.0]).is_err());
        assert!(f.interpolate(&[0.0, -1.0, 0.0]).is_err());
    }

    #[test]
    fn sin_interpolation_refinement() {
        use std::f64::consts::PI;
        // Example point (0.25, 0): error below 1e-6 at N=257.
        let s = GridSpec::new(2, 257).unwrap();
        let f = ScalarField::sample(s, "sin", |x| (PI * x[0]).sin()).unwrap();
        let v = f.interpolate(&[0.25, 0.0, 0.0]).unwrap();
        assert!((v - (PI * 0.25).sin()).abs() < 1e-6);

        // Doubling N contracts the worst error over off-lattice probes by ≥ 3.5x,
        // for both values and gradients.
        let probes = [0.207_106_78, -0.433_012_70, 0.663_325_01, 0.091_918_29];
        let mut val_errs = Vec::new();
        let mut grad_errs = Vec::new();
        for nn in [129usize, 257, 513] {
            let s = GridSpec::new(2, nn).unwrap();
            let f = ScalarField::sample(s, "sin", |x| (PI * x[0]).sin()).unwrap();
            let mut ve = 0.0f64;
            let mut ge = 0.0f64;
            for &x in &probes {
                let p = [x, 0.0, 0.0];
                ve = ve.max((f.interpolate(&p).unwrap() - (PI * x).sin()).abs());
                ge = ge.max((f.interp_gradient(&p).unwrap()[0] - PI * (PI * x).cos()).abs());
            }
            val_errs.push(ve);
            grad_errs.push(ge);
        }
        assert!(val_errs[0] / val_errs[1] >= 3.5, "{val_errs:?}");
        assert!(val_errs[1] / val_errs[2] >= 3.5, "{val_errs:?}");
        assert!(grad_errs[0] / grad_errs[1] >= 3.5, "{grad_errs:?}");
        assert!(grad_errs[1] / grad_errs[2] >= 3.5, "{grad_errs:?}");
    }

    #[test]
    fn gradient_examples() {
        let s = GridSpec::new(2, 129).unwrap();
        let f = ScalarField::sample(s, "halfx1sq", |x| 0.5 * x[0] * x[0]).unwrap();
        let g = f.interp_gradient(&[0.37, -0.2, 0.0]).unwrap();
        assert_abs_diff_eq!(g[0], 0.37, epsilon = 1e-12);
        assert_abs_diff_eq!(g[1], 0.0, epsilon = 1e-12);

        let c = ScalarField::sample(s, "const", |_| 3.5).unwrap();
        let g = c.interp_gradient(&[0.1, 0.1, 0.0]).unwrap();
        assert_abs_diff_eq!(g[0], 0.0, epsilon = 1e-12);

        // r^3 sin 3θ = Im(z^3) is a cubic polynomial: gradient exact.
        let h = ScalarField::sample(s, "imz3", |x| {
            3.0 * x[0] * x[0] * x[1] - x[1] * x[1] * x[1]
        })
        .unwrap();
        let g = h.interp_gradient(&[0.5, 0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(g[0], 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(g[1], 0.75, epsilon = 1e-10);
    }

    #[test]
    fn analytic_field_matches_closure() {
        let af = AnalyticField::new(
            2,
            |x| x[0] * x[0] - x[1],
            |x| [2.0 * x[0], -1.0, 0.0],
        );
        assert_eq!(af.value(&[0.5, 0.25, 0.0]).unwrap(), 0.0);
        let fd = AnalyticField::from_value_fn(2, |x| x[0] * x[0] - x[1]);
        let g = fd.gradient(&[0.3, 0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(g[0], 0.6, epsilon = 1e-8);
        assert_abs_diff_eq!(g[1], -1.0, epsilon = 1e-8);
    }
}
