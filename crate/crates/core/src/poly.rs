//! Small multivariate polynomials with exact sphere moments.
//!
//! Used for harmonic perturbations, homogeneous harmonic bases of a given
//! degree (as the nullspace of the Laplacian on monomials), and exact
//! integrals of polynomial products over the unit sphere.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Point, Result};

/// Sparse monomial representation: sum of `c · x1^a x2^b x3^c`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    n: usize,
    terms: Vec<(f64, [u8; 3])>,
}

impl Poly {
    pub fn new(n: usize, terms: Vec<(f64, [u8; 3])>) -> Self {
        let mut p = Poly { n, terms };
        p.normalize();
        p
    }

    pub fn zero(n: usize) -> Self {
        Poly { n, terms: Vec::new() }
    }

    pub fn monomial(n: usize, c: f64, e: [u8; 3]) -> Self {
        Poly::new(n, vec![(c, e)])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(f64, [u8; 3])] {
        &self.terms
    }

    fn normalize(&mut self) {
        self.terms.sort_by_key(|(_, e)| *e);
        let mut merged: Vec<(f64, [u8; 3])> = Vec::with_capacity(self.terms.len());
        for (c, e) in self.terms.drain(..) {
            if let Some(last) = merged.last_mut() {
                if last.1 == e {
                    last.0 += c;
                    continue;
                }
            }
            merged.push((c, e));
        }
        merged.retain(|(c, _)| *c != 0.0);
        self.terms = merged;
    }

    pub fn eval(&self, x: &Point) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| {
                c * x[0].powi(e[0] as i32) * x[1].powi(e[1] as i32) * x[2].powi(e[2] as i32)
            })
            .sum()
    }

    pub fn grad_eval(&self, x: &Point) -> Point {
        let mut g = [0.0; 3];
        for (c, e) in &self.terms {
            for k in 0..self.n {
                if e[k] == 0 {
                    continue;
                }
                let mut t = c * e[k] as f64;
                for j in 0..3 {
                    let p = if j == k { e[j] - 1 } else { e[j] };
                    t *= x[j].powi(p as i32);
                }
                g[k] += t;
            }
        }
        g
    }

    pub fn laplacian(&self) -> Poly {
        let mut out = Vec::new();
        for (c, e) in &self.terms {
            for k in 0..self.n {
                if e[k] >= 2 {
                    let mut f = *e;
                    f[k] -= 2;
                    out.push((c * (e[k] as f64) * (e[k] as f64 - 1.0), f));
                }
            }
        }
        Poly::new(self.n, out)
    }

    pub fn scaled(&self, a: f64) -> Poly {
        Poly::new(self.n, self.terms.iter().map(|(c, e)| (a * c, *e)).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut t = self.terms.clone();
        t.extend_from_slice(&other.terms);
        Poly::new(self.n, t)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scaled(-1.0))
    }

    pub fn degree(&self) -> usize {
        self.terms
            .iter()
            .map(|(_, e)| (e[0] + e[1] + e[2]) as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let d = self.degree();
        self.terms.iter().all(|(_, e)| (e[0] + e[1] + e[2]) as usize == d)
    }

    /// Largest coefficient magnitude; a residual scale for validation messages.
    pub fn max_coeff(&self) -> f64 {
        self.terms.iter().fold(0.0f64, |m, (c, _)| m.max(c.abs()))
    }
}

/// Γ(k/2) exactly, via the half-integer recurrence.
fn gamma_half(k: u32) -> f64 {
    match k {
        1 => std::f64::consts::PI.sqrt(),
        2 => 1.0,
        _ => (k as f64 / 2.0 - 1.0) * gamma_half(k - 2),
    }
}

/// Exact `∫_{S^{n-1}} x1^a x2^b x3^c dσ` (unit sphere). Zero for any odd
/// exponent; otherwise `2 ∏ Γ((e_i+1)/2) / Γ((|e|+n)/2)`.
pub fn sphere_moment(n: usize, e: &[u8; 3]) -> f64 {
    let active = &e[..n];
    if active.iter().any(|&a| a % 2 == 1) {
        return 0.0;
    }
    let total: u32 = active.iter().map(|&a| a as u32).sum();
    let mut num = 2.0;
    for &a in active {
        num *= gamma_half(a as u32 + 1);
    }
    num / gamma_half(total + n as u32)
}

/// Exact `∫_{S^{n-1}} p q dσ`.
pub fn sphere_inner(p: &Poly, q: &Poly) -> f64 {
    let n = p.dim();
    let mut acc = 0.0;
    for (cp, ep) in p.terms() {
        for (cq, eq) in q.terms() {
            let e = [ep[0] + eq[0], ep[1] + eq[1], ep[2] + eq[2]];
            acc += cp * cq * sphere_moment(n, &e);
        }
    }
    acc
}

fn monomials_of_degree(n: usize, d: usize) -> Vec<[u8; 3]> {
    let mut out = Vec::new();
    for a in 0..=d {
        for b in 0..=(d - a) {
            let c = d - a - b;
            if n == 2 && c != 0 {
                continue;
            }
            out.push([a as u8, b as u8, c as u8]);
        }
    }
    out.sort();
    out
}

/// Orthonormal (in `L²(S^{n-1})`) basis of homogeneous harmonic polynomials of
/// degree `d`, computed as the nullspace of the Laplacian on degree-`d`
/// monomials followed by Gram–Schmidt against exact sphere moments.
pub fn harmonic_basis(n: usize, d: usize) -> Vec<Poly> {
    let monos = monomials_of_degree(n, d);
    let lower = monomials_of_degree(n, d.saturating_sub(2));
    if d < 2 {
        // All degree-0/1 polynomials are harmonic.
        let mut base: Vec<Poly> =
            monos.iter().map(|e| Poly::monomial(n, 1.0, *e)).collect();
        orthonormalize(&mut base);
        return base;
    }
    let rows = lower.len();
    let cols = monos.len();
    let mut l = DMatrix::<f64>::zeros(rows, cols);
    for (j, e) in monos.iter().enumerate() {
        let lap = Poly::monomial(n, 1.0, *e).laplacian();
        for (c, f) in lap.terms() {
            let i = lower.binary_search(f).expect("laplacian stays in monomial basis");
            l[(i, j)] += c;
        }
    }
    // Nullspace of L = eigenvectors of LᵀL with zero eigenvalue (the thin SVD
    // of a wide matrix does not expose the nullspace directly).
    let normal = l.transpose() * &l;
    let eig = normal.symmetric_eigen();
    let tol = 1e-9 * eig.eigenvalues.iter().fold(1.0f64, |m, e| m.max(e.abs()));
    let mut basis = Vec::new();
    for (k, ev) in eig.eigenvalues.iter().enumerate() {
        if ev.abs() > tol {
            continue;
        }
        let coeffs: DVector<f64> = eig.eigenvectors.column(k).into();
        let terms = monos
            .iter()
            .zip(coeffs.iter())
            .filter(|(_, c)| c.abs() > 1e-12)
            .map(|(e, c)| (*c, *e))
            .collect();
        basis.push(Poly::new(n, terms));
    }
    orthonormalize(&mut basis);
    basis
}

fn orthonormalize(basis: &mut [Poly]) {
    for i in 0..basis.len() {
        for j in 0..i {
            let proj = sphere_inner(&basis[i], &basis[j]);
            basis[i] = basis[i].sub(&basis[j].scaled(proj));
        }
        let nrm = sphere_inner(&basis[i], &basis[i]).sqrt();
        basis[i] = basis[i].scaled(1.0 / nrm);
    }
}

/// A quadratic form `p(x) = ½⟨Ax, x⟩` with symmetric `A`.
///
/// `Δp = tr A`, so members of the solution-normalized family carry `tr A = 1`;
/// the nonnegative subfamily additionally has `A ⪰ 0`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QuadForm {
    n: usize,
    a: [[f64; 3]; 3],
}

impl QuadForm {
    pub fn new(n: usize, a: [[f64; 3]; 3]) -> Result<Self> {
        if n != 2 && n != 3 {
            return Err(Error::Parameter(format!("dimension must be 2 or 3, got {n}")));
        }
        for i in 0..n {
            for j in 0..n {
                if (a[i][j] - a[j][i]).abs() > 1e-12 * (1.0 + a[i][j].abs()) {
                    return Err(Error::Parameter("matrix must be symmetric".into()));
                }
            }
        }
        let mut sym = [[0.0; 3]; 3];
        for i in 0..n {
            for j in 0..n {
                sym[i][j] = 0.5 * (a[i][j] + a[j][i]);
            }
        }
        Ok(QuadForm { n, a: sym })
    }

    pub fn from_diag(n: usize, d: &[f64]) -> Self {
        let mut a = [[0.0; 3]; 3];
        for (i, &v) in d.iter().enumerate().take(n) {
            a[i][i] = v;
        }
        QuadForm { n, a }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &[[f64; 3]; 3] {
        &self.a
    }

    pub fn eval(&self, x: &Point) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                acc += self.a[i][j] * x[i] * x[j];
            }
        }
        0.5 * acc
    }

    pub fn grad(&self, x: &Point) -> Point {
        let mut g = [0.0; 3];
        for i in 0..self.n {
            for j in 0..self.n {
                g[i] += self.a[i][j] * x[j];
            }
        }
        g
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.a[i][i]).sum()
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let m = self.to_dmatrix();
        let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        *self.eigenvalues().last().unwrap()
    }

    /// Membership in the nonnegative trace-one family, up to tolerance.
    pub fn is_p_plus(&self, tol: f64) -> bool {
        (self.trace() - 1.0).abs() <= tol && self.min_eigenvalue() >= -tol
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.a[i][j])
    }

    pub fn from_dmatrix(m: &DMatrix<f64>) -> Self {
        let n = m.nrows();
        let mut a = [[0.0; 3]; 3];
        for i in 0..n {
            for j in 0..n {
                a[i][j] = 0.5 * (m[(i, j)] + m[(j, i)]);
            }
        }
        QuadForm { n, a }
    }

    pub fn to_poly(&self) -> Poly {
        let mut terms = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                let mut e = [0u8; 3];
                e[i] += 1;
                e[j] += 1;
                terms.push((0.5 * self.a[i][j], e));
            }
        }
        Poly::new(self.n, terms)
    }

    /// Frobenius distance between coefficient matrices.
    pub fn distance(&self, other: &QuadForm) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                let d = self.a[i][j] - other.a[i][j];
                acc += d * d;
            }
        }
        acc.sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn moments_match_known_values() {
        use std::f64::consts::PI;
        assert_relative_eq!(sphere_moment(2, &[0, 0, 0]), 2.0 * PI, epsilon = 1e-14);
        assert_relative_eq!(sphere_moment(2, &[2, 0, 0]), PI, epsilon = 1e-14);
        assert_relative_eq!(sphere_moment(2, &[4, 0, 0]), 3.0 * PI / 4.0, epsilon = 1e-14);
        assert_relative_eq!(sphere_moment(2, &[2, 2, 0]), PI / 4.0, epsilon = 1e-14);
        assert_relative_eq!(sphere_moment(3, &[0, 0, 0]), 4.0 * PI, epsilon = 1e-13);
        assert_relative_eq!(sphere_moment(3, &[2, 0, 0]), 4.0 * PI / 3.0, epsilon = 1e-13);
        assert_relative_eq!(sphere_moment(3, &[2, 2, 0]), 4.0 * PI / 15.0, epsilon = 1e-13);
        assert_relative_eq!(sphere_moment(3, &[4, 0, 0]), 4.0 * PI / 5.0, epsilon = 1e-13);
        assert_eq!(sphere_moment(3, &[1, 2, 0]), 0.0);
    }

    #[test]
    fn laplacian_and_eval() {
        // Im(z³) = 3x²y - y³ is harmonic.
        let p = Poly::new(2, vec![(3.0, [2, 1, 0]), (-1.0, [0, 3, 0])]);
        assert_eq!(p.laplacian().terms().len(), 0);
        assert_relative_eq!(p.eval(&[0.5, 0.0, 0.0]), 0.0);
        let g = p.grad_eval(&[0.5, 0.0, 0.0]);
        assert_relative_eq!(g[1], 0.75);

        let q = Poly::monomial(2, 1.0, [4, 0, 0]);
        let lap = q.laplacian();
        assert_eq!(lap.terms(), &[(12.0, [2, 0, 0])]);
    }

    #[test]
    fn harmonic_basis_dimensions() {
        // 2D: dim = 2 for every degree ≥ 1; 3D: dim = 2d+1.
        for d in 2..=4 {
            assert_eq!(harmonic_basis(2, d).len(), 2, "2D degree {d}");
            assert_eq!(harmonic_basis(3, d).len(), 2 * d + 1, "3D degree {d}");
        }
        for b in harmonic_basis(3, 3) {
            assert!(b.laplacian().max_coeff() < 1e-9, "basis member must be harmonic");
            assert!(b.is_homogeneous());
        }
        // Orthonormality.
        let basis = harmonic_basis(3, 2);
        for (i, p) in basis.iter().enumerate() {
            for (j, q) in basis.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_relative_eq!(sphere_inner(p, q), want, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn quad_form_basics() {
        let p = QuadForm::from_diag(2, &[1.0, 0.0]);
        assert_relative_eq!(p.eval(&[0.4, 7.0, 0.0]), 0.08);
        assert_relative_eq!(p.trace(), 1.0);
        assert!(p.is_p_plus(1e-12));
        assert_eq!(p.eigenvalues(), vec![1.0, 0.0]);

        let ind = QuadForm::from_diag(2, &[1.5, -0.5]);
        assert!(!ind.is_p_plus(1e-9));

        let poly = p.to_poly();
        assert_relative_eq!(poly.eval(&[0.4, 7.0, 0.0]), 0.08);
    }
}
