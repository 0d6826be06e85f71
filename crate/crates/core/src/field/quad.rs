use std::f64::consts::PI;

use crate::field::Field;
use crate::{pairwise_sum, Error, Point, Result};

/// Minimum quadrature radius in units of the grid spacing. Below this the
/// integrand is unresolved and results are refused instead of returned noisily.
pub const MIN_RADIUS_FACTOR: f64 = 4.0;

/// Quadrature nodes on a sphere `∂B_r(x0)`.
///
/// 2D: uniform angles (trapezoid rule, spectrally accurate on smooth
/// periodic integrands). 3D: Fibonacci lattice. Node counts scale with the
/// resolution `h` so the field is resolved at grid scale; total weight equals
/// the surface measure exactly.
#[derive(Debug, Clone)]
pub struct SphereQuadrature {
    pub center: Point,
    pub radius: f64,
    pub nodes: Vec<(Point, f64)>,
}

impl SphereQuadrature {
    pub fn new(n: usize, h: f64, center: &Point, radius: f64, phase: f64) -> Self {
        match n {
            2 => Self::circle(h, center, radius, phase),
            _ => Self::fibonacci(h, center, radius, phase),
        }
    }

    fn circle(h: f64, center: &Point, radius: f64, phase: f64) -> Self {
        let m = ((2.0 * PI * radius / h).ceil() as usize).max(64);
        let w = 2.0 * PI * radius / m as f64;
        let nodes = (0..m)
            .map(|j| {
                let th = phase + 2.0 * PI * j as f64 / m as f64;
                ([center[0] + radius * th.cos(), center[1] + radius * th.sin(), 0.0], w)
            })
            .collect();
        SphereQuadrature { center: *center, radius, nodes }
    }

    fn fibonacci(h: f64, center: &Point, radius: f64, phase: f64) -> Self {
        let m = ((4.0 * PI * radius * radius / (h * h)).ceil() as usize).max(256);
        let w = 4.0 * PI * radius * radius / m as f64;
        let golden = PI * (3.0 - 5.0f64.sqrt());
        let nodes = (0..m)
            .map(|j| {
                let z = 1.0 - 2.0 * (j as f64 + 0.5) / m as f64;
                let rho = (1.0 - z * z).max(0.0).sqrt();
                let th = phase + golden * j as f64;
                (
                    [
                        center[0] + radius * rho * th.cos(),
                        center[1] + radius * rho * th.sin(),
                        center[2] + radius * z,
                    ],
                    w,
                )
            })
            .collect();
        SphereQuadrature { center: *center, radius, nodes }
    }

    /// Sum of weights; equals `|∂B_r|` by construction.
    pub fn total_weight(&self) -> f64 {
        pairwise_sum(&self.nodes.iter().map(|(_, w)| *w).collect::<Vec<_>>())
    }
}

/// Surface measure of `∂B_r` in `n` dimensions.
pub fn sphere_measure(n: usize, r: f64) -> f64 {
    match n {
        2 => 2.0 * PI * r,
        _ => 4.0 * PI * r * r,
    }
}

/// Volume of `B_r` in `n` dimensions.
pub fn ball_measure(n: usize, r: f64) -> f64 {
    match n {
        2 => PI * r * r,
        _ => 4.0 / 3.0 * PI * r * r * r,
    }
}

fn check_radius(h: f64, r: f64) -> Result<()> {
    let min = MIN_RADIUS_FACTOR * h;
    if r < min {
        return Err(Error::RadiusTooSmall { r, min });
    }
    Ok(())
}

/// `∫_{∂B_r(x0)} v²` by sphere quadrature at resolution `h`.
pub fn sphere_mean_sq(v: &dyn Field, h: f64, x0: &Point, r: f64) -> Result<f64> {
    check_radius(h, r)?;
    let quad = SphereQuadrature::new(v.dim(), h, x0, r, 0.0);
    let mut terms = Vec::with_capacity(quad.nodes.len());
    for (x, w) in &quad.nodes {
        let val = v.value(x)?;
        terms.push(w * val * val);
    }
    Ok(pairwise_sum(&terms))
}

/// `∫_{B_r(x0)} |∇v|²` by concentric spheres at Gauss–Legendre radii.
///
/// The radial node count keeps shell spacing below `h/2`; Gauss–Legendre
/// radii make the rule exact on polynomial integrands, which the quadrature
/// consistency contract (1e-8 relative on cubics) requires.
pub fn ball_dirichlet(v: &dyn Field, h: f64, x0: &Point, r: f64) -> Result<f64> {
    check_radius(h, r)?;
    let k = ((PI * r / h).ceil() as usize).max(16);
    let (nodes, weights) = gauss_legendre(k);
    let mut terms = Vec::with_capacity(k);
    for (t, w) in nodes.iter().zip(&weights) {
        let rho = 0.5 * r * (t + 1.0);
        let quad = SphereQuadrature::new(v.dim(), h, x0, rho, 0.0);
        let mut shell = Vec::with_capacity(quad.nodes.len());
        for (x, wn) in &quad.nodes {
            let g = v.gradient(x)?;
            let g2 = g[..v.dim()].iter().map(|gi| gi * gi).sum::<f64>();
            shell.push(wn * g2);
        }
        terms.push(0.5 * r * w * pairwise_sum(&shell));
    }
    Ok(pairwise_sum(&terms))
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(k: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; k];
    let mut weights = vec![0.0; k];
    for i in 0..k.div_ceil(2) {
        // Chebyshev-like initial guess.
        let mut x = (PI * (i as f64 + 0.75) / (k as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_eval(k, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[k - 1 - i] = x;
        weights[i] = w;
        weights[k - 1 - i] = w;
    }
    (nodes, weights)
}

/// Legendre polynomial `P_k` and derivative at `x`.
fn legendre_eval(k: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=k {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = k as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
