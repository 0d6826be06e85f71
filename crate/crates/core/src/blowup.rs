//! Rescalings, quadratic blowup extraction, singular-point classification and
//! harmonic-blowup fitting.
//!
//! At a singular free boundary point the parabolic rescalings
//! `u_{x0,r}(x) = u(x0 + rx)/r²` converge to a quadratic `p_* = ½⟨Ax,x⟩` with
//! unit trace. [`fit_blowup`] recovers `A` by least squares over shrinking
//! balls with rate extrapolation (the raw fits carry an `O(r^{λ*-2})` bias
//! from the deficit, too large at reachable radii for the frequency
//! tolerances downstream). [`classify`] assembles the stratum dimension, the
//! nonnegativity flag, the limiting frequency of the deficit `w = u - p_*`,
//! and the generic/anomalous label. [`almgren_blowup`] extracts the
//! normalized limit of `w` — a homogeneous harmonic polynomial at integer
//! frequency (with the `(t, N)` block structure at frequency 2), an angular
//! profile at half-integer frequency.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::field::{sphere_mean_sq, Field, GridSpec, ScalarField, SphereQuadrature};
use crate::functionals::{profile, FrequencyProfile};
use crate::poly::{harmonic_basis, sphere_inner, Poly, QuadForm};
use crate::{dist, pairwise_sum, Error, Point, Result};

/// A quadratic blowup with its spectral decomposition: eigenvalues in
/// descending order, kernel read from the tail at threshold `tau_ker`,
/// stratum dimension `m = dim ker`, nonnegativity from the smallest
/// eigenvalue.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlowupPolynomial {
    pub form: QuadForm,
    pub eigenvalues: Vec<f64>,
    pub kernel: Vec<Point>,
    pub m: usize,
    pub sigma_plus: bool,
    pub tau_ker: f64,
}

impl BlowupPolynomial {
    pub fn from_form(form: QuadForm, tau_ker: f64) -> Self {
        let n = form.dim();
        let m = form.to_dmatrix();
        let eig = m.symmetric_eigen();
        let mut pairs: Vec<(f64, Vec<f64>)> = (0..n)
            .map(|k| (eig.eigenvalues[k], eig.eigenvectors.column(k).iter().copied().collect()))
            .collect();
        pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        let eigenvalues: Vec<f64> = pairs.iter().map(|(e, _)| *e).collect();
        let kernel: Vec<Point> = pairs
            .iter()
            .filter(|(e, _)| e.abs() <= tau_ker)
            .map(|(_, v)| {
                let mut p = [0.0; 3];
                p[..n].copy_from_slice(&v[..n]);
                p
            })
            .collect();
        let sigma_plus = *eigenvalues.last().unwrap() >= -tau_ker;
        BlowupPolynomial { form, m: kernel.len(), eigenvalues, kernel, sigma_plus, tau_ker }
    }
}

/// `u_{x0,r}` resampled on the unit grid.
pub fn rescale(u: &dyn Field, spec: GridSpec, x0: &Point, r: f64) -> Result<ScalarField> {
    let n = u.dim();
    let hw = u.evaluable_halfwidth();
    for k in 0..n {
        if x0[k].abs() + r > hw + 1e-12 {
            return Err(Error::OutOfDomain { x: *x0, halfwidth: hw - r });
        }
    }
    ScalarField::sample(spec, "rescaled", |z: &Point| {
        let y = [x0[0] + r * z[0], x0[1] + r * z[1], x0[2] + r * z[2]];
        u.value(&y).map(|v| v / (r * r)).unwrap_or(f64::NAN)
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitReport {
    pub radii: Vec<f64>,
    /// Frobenius distances between consecutive per-radius fits.
    pub deltas: Vec<f64>,
    /// Estimated convergence rate exponent of the fit sequence, when clean.
    pub rate: Option<f64>,
    /// Norm of the applied extrapolation correction.
    pub extrapolation: f64,
    pub trace: f64,
    /// Largest affine (linear/constant) coefficient of the final fit; nonzero
    /// values flag a center away from the free boundary.
    pub affine_residual: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    pub tau_fit: f64,
    pub tau_trace: f64,
    /// Cap on lattice points per axis in each least-squares fit.
    pub lattice_cap: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { tau_fit: 0.02, tau_trace: 0.1, lattice_cap: 161 }
    }
}

/// Least-squares quadratic fit of `u_{x0,r}` over the unit ball at one radius,
/// on the grid-aligned lattice.
fn quadratic_fit_at(
    u: &dyn Field,
    grid: &GridSpec,
    x0: &Point,
    r: f64,
    cap: usize,
) -> Result<(QuadForm, f64)> {
    let n = u.dim();
    let h = grid.spacing();
    let steps = (r / h).floor() as isize;
    let stride = ((2 * steps + 1) as usize).div_ceil(cap).max(1) as isize;
    // Basis: quadratic monomials, then linear, then 1.
    let quad_terms: &[(usize, usize)] =
        if n == 2 { &[(0, 0), (0, 1), (1, 1)] } else { &[(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)] };
    let dim = quad_terms.len() + n + 1;
    let mut gram = DMatrix::<f64>::zeros(dim, dim);
    let mut rhs = nalgebra::DVector::<f64>::zeros(dim);
    let mut basis = vec![0.0f64; dim];
    let mut count = 0usize;
    let mut d = [0isize; 3];
    let lo = -steps;
    let hi = steps;
    let mut run = |d: &[isize; 3]| -> Result<()> {
        let y = [
            x0[0] + d[0] as f64 * h,
            x0[1] + d[1] as f64 * h,
            x0[2] + d[2] as f64 * h,
        ];
        let z = [(y[0] - x0[0]) / r, (y[1] - x0[1]) / r, (y[2] - x0[2]) / r];
        let z2: f64 = z[..n].iter().map(|c| c * c).sum();
        if z2 > 1.0 {
            return Ok(());
        }
        let val = u.value(&y)? / (r * r);
        for (k, (i, j)) in quad_terms.iter().enumerate() {
            basis[k] = z[*i] * z[*j];
        }
        for k in 0..n {
            basis[quad_terms.len() + k] = z[k];
        }
        basis[dim - 1] = 1.0;
        for a in 0..dim {
            for b in a..dim {
                gram[(a, b)] += basis[a] * basis[b];
            }
            rhs[a] += basis[a] * val;
        }
        count += 1;
        Ok(())
    };
    let mut i = lo;
    while i <= hi {
        d[0] = i;
        let mut j = lo;
        while j <= hi {
            d[1] = j;
            if n == 2 {
                d[2] = 0;
                run(&d)?;
            } else {
                let mut k = lo;
                while k <= hi {
                    d[2] = k;
                    run(&d)?;
                    k += stride;
                }
            }
            j += stride;
        }
        i += stride;
    }
    if count < 4 * dim {
        return Err(Error::InsufficientData(format!(
            "only {count} lattice points inside fit ball of radius {r}"
        )));
    }
    for a in 0..dim {
        for b in 0..a {
            gram[(a, b)] = gram[(b, a)];
        }
    }
    let sol = gram
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Classification("singular least-squares system".into()))?;
    let mut a = [[0.0f64; 3]; 3];
    for (k, (i, j)) in quad_terms.iter().enumerate() {
        if i == j {
            a[*i][*j] = 2.0 * sol[k];
        } else {
            a[*i][*j] = sol[k];
            a[*j][*i] = sol[k];
        }
    }
    let affine = (0..(n + 1)).fold(0.0f64, |m, k| m.max(sol[quad_terms.len() + k].abs()));
    Ok((QuadForm::new(n, a)?, affine))
}

/// Quadratic blowup by per-radius least squares with rate extrapolation.
///
/// Radii are processed in decreasing order; with fits `A(r) ≈ A∞ + B r^s`,
/// the geometric-ratio extrapolation removes the leading bias. Acceptance
/// requires the remaining correction below `tau_fit` and the trace within
/// `tau_trace` of one; the returned form is trace-normalized and the kernel
/// threshold is `10 · tau_fit`.
pub fn fit_blowup(
    u: &dyn Field,
    grid: &GridSpec,
    x0: &Point,
    radii: &[f64],
    opts: &FitOptions,
) -> Result<(BlowupPolynomial, FitReport)> {
    if radii.len() < 3 {
        return Err(Error::Parameter(format!(
            "blowup fit needs at least 3 radii, got {}",
            radii.len()
        )));
    }
    let mut rs: Vec<f64> = radii.to_vec();
    rs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut fits = Vec::with_capacity(rs.len());
    let mut affine = 0.0f64;
    for &r in &rs {
        let (q, aff) = quadratic_fit_at(u, grid, x0, r, opts.lattice_cap)?;
        affine = affine.max(aff);
        fits.push(q);
    }
    let deltas: Vec<f64> = fits.windows(2).map(|w| w[1].distance(&w[0])).collect();
    let last = fits.last().unwrap().clone();
    let n = last.dim();
    let d_last = *deltas.last().unwrap();
    let scale = last.to_dmatrix().norm().max(1e-9);

    // Geometric-ratio extrapolant anchored at fits[k+1], from the delta pair
    // (deltas[k-1], deltas[k]).
    let extrapolant = |k: usize| -> Option<(QuadForm, f64, f64)> {
        let gamma = deltas[k] / deltas[k - 1].max(f64::MIN_POSITIVE);
        if !(0.05..0.95).contains(&gamma) {
            return None;
        }
        let f = gamma / (1.0 - gamma);
        let mut a = [[0.0f64; 3]; 3];
        let mut corr = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let d = fits[k + 1].matrix()[i][j] - fits[k].matrix()[i][j];
                a[i][j] = fits[k + 1].matrix()[i][j] + f * d;
                corr = corr.max((f * d).abs());
            }
        }
        let ratio = rs[k] / rs[k + 1];
        let rate = (1.0 / gamma).ln() / ratio.ln();
        QuadForm::new(n, a).ok().map(|q| (q, corr, rate))
    };

    let mut rate = None;
    let mut correction = d_last;
    let mut final_form = last.clone();
    // Prefer the extrapolated limit whenever the fit sequence decays at a
    // clean geometric rate: even deltas already below tau_fit carry a bias
    // that the frequency measurement downstream is sensitive to.
    let mut accepted = d_last <= 1e-9 * scale.max(1.0);
    if !accepted && deltas.len() >= 2 {
        if let Some((q, corr, s)) = extrapolant(deltas.len() - 1) {
            rate = Some(s);
            if deltas.len() >= 3 {
                if let Some((q_prev, _, _)) = extrapolant(deltas.len() - 2) {
                    // Two independent extrapolants agreeing is the acceptance
                    // criterion for the fit sequence.
                    let stab = q.distance(&q_prev);
                    if stab <= opts.tau_fit {
                        final_form = q.clone();
                        correction = stab;
                        accepted = true;
                    }
                }
            }
            if !accepted && corr <= 10.0 * opts.tau_fit {
                final_form = q;
                correction = corr;
                accepted = true;
            }
        }
    }
    if !accepted && d_last <= opts.tau_fit {
        correction = d_last;
        accepted = true;
    }
    if !accepted {
        return Err(Error::Classification(format!(
            "blowup fit did not converge (residual {correction:.3e}); not singular (regular or unresolved)"
        )));
    }
    let trace = final_form.trace();
    if (trace - 1.0).abs() > opts.tau_trace {
        return Err(Error::Classification(format!(
            "fitted quadratic has trace {trace:.4}, not a solution-type blowup (half-space or non-singular profile)"
        )));
    }
    // Renormalize the trace to one.
    let mut a = *final_form.matrix();
    for row in a.iter_mut().take(n) {
        for v in row.iter_mut().take(n) {
            *v /= trace;
        }
    }
    let normalized = QuadForm::new(n, a)?;
    let report = FitReport {
        radii: rs,
        deltas,
        rate,
        extrapolation: correction,
        trace,
        affine_residual: affine,
    };
    Ok((BlowupPolynomial::from_form(normalized, 10.0 * opts.tau_fit), report))
}

/// Deficit `w = u - p` as an evaluable field view.
pub struct DeficitField<'a> {
    pub u: &'a dyn Field,
    pub p: QuadForm,
}

impl Field for DeficitField<'_> {
    fn dim(&self) -> usize {
        self.u.dim()
    }

    fn value(&self, x: &Point) -> Result<f64> {
        Ok(self.u.value(x)? - self.p.eval(x))
    }

    fn gradient(&self, x: &Point) -> Result<Point> {
        let g = self.u.gradient(x)?;
        let gp = self.p.grad(x);
        Ok([g[0] - gp[0], g[1] - gp[1], g[2] - gp[2]])
    }

    fn evaluable_halfwidth(&self) -> f64 {
        self.u.evaluable_halfwidth()
    }

    fn scale_hint(&self) -> f64 {
        self.u.scale_hint().max(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StratumLabel {
    Generic,
    Anomalous,
    Unresolved,
}

/// A classified singular point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SingularPoint {
    pub location: Point,
    pub blowup: BlowupPolynomial,
    pub lambda_star: f64,
    pub confidence: f64,
    pub m: usize,
    pub label: StratumLabel,
    pub sigma_plus: bool,
    /// Set when the eigenvalue test and the negativity-density trend disagree.
    pub sigma_plus_ambiguous: bool,
    pub fit: FitReport,
}

#[derive(Debug, Clone)]
pub struct ClassifyOptions {
    pub fit: FitOptions,
    /// Tolerance at the generic/anomalous frequency cuts (5/2 and 3).
    pub tau_lambda: f64,
    /// Confidence width above which the label is unresolved.
    pub max_confidence: f64,
    pub lambdas: Vec<f64>,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            fit: FitOptions::default(),
            tau_lambda: 0.05,
            max_confidence: 0.2,
            lambdas: vec![2.0],
        }
    }
}

/// Dyadic fit radii from `0.4` down to `8h`, largest first.
pub fn default_fit_radii(grid: &GridSpec) -> Vec<f64> {
    let mut radii = Vec::new();
    let mut r = 0.4;
    while r >= 8.0 * grid.spacing() {
        radii.push(r);
        r *= 0.5;
    }
    radii
}

/// Negativity-set density of a field near `x0` by deterministic disk/ball
/// sampling, with a fitted decay exponent over dyadic radii. Grid-free, so it
/// applies to analytic fixtures and interpolants alike.
fn density_trend(u: &dyn Field, x0: &Point, r_max: f64, h: f64) -> Result<(f64, f64)> {
    let n = u.dim();
    let tau = 1e-12 * u.scale_hint();
    let mut radii = Vec::new();
    let mut r = r_max;
    while r >= 8.0 * h {
        radii.push(r);
        r *= 0.5;
    }
    if radii.len() < 2 {
        return Err(Error::RadiusTooSmall { r: r_max, min: 16.0 * h });
    }
    let mut densities = Vec::with_capacity(radii.len());
    for &rho in &radii {
        // Concentric rings of quasi-uniform points.
        let rings = 48usize;
        let mut neg = 0usize;
        let mut tot = 0usize;
        for i in 0..rings {
            let rr = rho * ((i as f64 + 0.5) / rings as f64).powf(1.0 / n as f64);
            let quad = SphereQuadrature::new(n, rr.max(1e-6) / 24.0, x0, rr, 0.0);
            for (p, _) in &quad.nodes {
                tot += 1;
                if u.value(p)? < -tau {
                    neg += 1;
                }
            }
        }
        densities.push(neg as f64 / tot as f64);
    }
    let d0 = densities[densities.len() - 1]; // smallest radius
    // Log-log slope of density vs radius over points with mass.
    let pts: Vec<(f64, f64)> = radii
        .iter()
        .zip(&densities)
        .filter(|(_, d)| **d > 1e-9)
        .map(|(r, d)| (r.ln(), d.ln()))
        .collect();
    let slope = if pts.len() >= 2 {
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        if sxx > 0.0 {
            sxy / sxx
        } else {
            0.0
        }
    } else {
        // No negativity at all: treat as instantly decayed.
        1.0
    };
    Ok((d0, slope))
}

/// Classify the point `x0`: quadratic blowup, stratum dimension, nonnegativity
/// (eigenvalue test cross-checked against the negativity-density trend),
/// limiting frequency of the deficit, and the generic/anomalous label at the
/// frequency cuts 5/2 (top stratum) and 3 (lower strata).
pub fn classify(
    u: &dyn Field,
    grid: &GridSpec,
    x0: &Point,
    opts: &ClassifyOptions,
) -> Result<SingularPoint> {
    let n = u.dim();
    let radii = default_fit_radii(grid);
    let (blowup, fit) = fit_blowup(u, grid, x0, &radii, &opts.fit)?;

    let h = grid.spacing();
    let hw = u.evaluable_halfwidth();
    let margin = (0..n).map(|k| hw - x0[k].abs()).fold(f64::INFINITY, f64::min);
    let r_max = (margin - 2.0 * h).min(0.45);
    let deficit = DeficitField { u, p: blowup.form.clone() };
    let prof = profile(&deficit, h, x0, 8.0 * h, r_max, &opts.lambdas)?;
    let lambda_star = prof.lambda_star;
    let confidence = prof.confidence;

    // Nonnegativity: spectral test plus zero-density trend of {u < 0}.
    let (d0, slope) = density_trend(u, x0, r_max, h)?;
    let density_zero = (slope >= 0.1 && d0 <= 0.3) || d0 <= 0.01;
    let sigma_plus = blowup.sigma_plus;
    let sigma_plus_ambiguous = sigma_plus != density_zero;

    let cut = if blowup.m == n - 1 { 2.5 } else { 3.0 };
    let label = if confidence > opts.max_confidence {
        StratumLabel::Unresolved
    } else if lambda_star >= cut - opts.tau_lambda {
        StratumLabel::Generic
    } else {
        StratumLabel::Anomalous
    };

    Ok(SingularPoint {
        location: *x0,
        m: blowup.m,
        blowup,
        lambda_star,
        confidence,
        label,
        sigma_plus,
        sigma_plus_ambiguous,
        fit,
    })
}

/// Re-run just the frequency profile of a classified point (for reports).
pub fn deficit_profile(
    u: &dyn Field,
    grid: &GridSpec,
    point: &SingularPoint,
    lambdas: &[f64],
) -> Result<FrequencyProfile> {
    let h = grid.spacing();
    let hw = u.evaluable_halfwidth();
    let n = u.dim();
    let margin = (0..n).map(|k| hw - point.location[k].abs()).fold(f64::INFINITY, f64::min);
    let r_max = (margin - 2.0 * h).min(0.45);
    let deficit = DeficitField { u, p: point.blowup.form.clone() };
    profile(&deficit, h, &point.location, 8.0 * h, r_max, lambdas)
}

/// Block structure of a frequency-2 harmonic blowup in the frame of `p_*`:
/// `D²q = diag(t·I_{n-m}, -N)` with `tr N = (n-m) t`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Degree2Structure {
    pub t: f64,
    pub n_matrix: Vec<Vec<f64>>,
    /// `|tr N - (n-m) t|`
    pub trace_residual: f64,
    /// Norm of the entries that the block form requires to vanish.
    pub off_structure: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum AlmgrenBlowup {
    /// Integer frequency: coefficients over the orthonormal harmonic basis.
    Polynomial {
        lambda: f64,
        coefficients: Vec<f64>,
        /// L²(∂B₁) residual of the fit at the smallest radius.
        residual: f64,
        /// Residuals per radius, largest radius first.
        residuals: Vec<f64>,
        structure: Option<Degree2Structure>,
    },
    /// Half-integer frequency: sampled angular profile (2D).
    AngularProfile { lambda: f64, thetas: Vec<f64>, values: Vec<f64>, residual: f64 },
}

/// Threshold above which the polynomial fit is reported as "not a harmonic
/// polynomial" rather than accepted.
pub const TAU_Q_RESIDUAL: f64 = 0.05;

/// Fit the normalized deficit `w̃_r` against the frequency-`λ*` harmonic
/// structure on shrinking spheres.
pub fn almgren_blowup(
    u: &dyn Field,
    grid: &GridSpec,
    p_star: &QuadForm,
    x0: &Point,
    radii: &[f64],
    lambda_star: f64,
) -> Result<AlmgrenBlowup> {
    if radii.is_empty() {
        return Err(Error::Parameter("need at least one radius".into()));
    }
    let n = u.dim();
    let h = grid.spacing();
    let mut rs: Vec<f64> = radii.to_vec();
    rs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let deficit = DeficitField { u, p: p_star.clone() };

    let is_integer = (lambda_star - lambda_star.round()).abs() < 1e-6;
    if !is_integer {
        if n != 2 {
            return Err(Error::Parameter(
                "half-integer angular profiles are only extracted in 2D".into(),
            ));
        }
        // Angular profile at the two smallest radii; homogeneity consistency
        // as residual.
        let m = 720usize;
        let sample = |r: f64| -> Result<Vec<f64>> {
            let nrm = (sphere_mean_sq(&deficit, h, x0, r)? / r).sqrt();
            (0..m)
                .map(|j| {
                    let th = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
                    let x = [x0[0] + r * th.cos(), x0[1] + r * th.sin(), 0.0];
                    deficit.value(&x).map(|v| v / nrm)
                })
                .collect()
        };
        let smallest = rs[rs.len() - 1];
        let vals = sample(smallest)?;
        let residual = if rs.len() >= 2 {
            let prev = sample(rs[rs.len() - 2])?;
            vals.iter()
                .zip(&prev)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max)
        } else {
            0.0
        };
        let thetas =
            (0..m).map(|j| 2.0 * std::f64::consts::PI * j as f64 / m as f64).collect();
        return Ok(AlmgrenBlowup::AngularProfile {
            lambda: lambda_star,
            thetas,
            values: vals,
            residual,
        });
    }

    let degree = lambda_star.round() as usize;
    let basis = harmonic_basis(n, degree);
    let mut residuals = Vec::with_capacity(rs.len());
    let mut coeffs = vec![0.0f64; basis.len()];
    for &r in &rs {
        let nrm2 = sphere_mean_sq(&deficit, h, x0, r)? / r.powi(n as i32 - 1);
        let nrm = nrm2.sqrt();
        if nrm <= 1e-30 * deficit.scale_hint() {
            return Err(Error::DegenerateDenominator(nrm));
        }
        let quad = SphereQuadrature::new(n, h, x0, r, 0.0);
        let mut c = vec![0.0f64; basis.len()];
        for (k, e) in basis.iter().enumerate() {
            let mut terms = Vec::with_capacity(quad.nodes.len());
            for (y, w) in &quad.nodes {
                let z = [(y[0] - x0[0]) / r, (y[1] - x0[1]) / r, (y[2] - x0[2]) / r];
                terms.push(w * deficit.value(y)? * e.eval(&z));
            }
            // ∫_{∂B_1} w̃_r E_k dσ, pulled back to the source sphere.
            c[k] = pairwise_sum(&terms) / r.powi(n as i32 - 1) / nrm;
        }
        let captured: f64 = c.iter().map(|v| v * v).sum();
        residuals.push((1.0 - captured).max(0.0).sqrt());
        coeffs = c;
    }
    let residual = *residuals.last().unwrap();

    let structure = if degree == 2 {
        let mut q = Poly::zero(n);
        for (c, e) in coeffs.iter().zip(&basis) {
            q = q.add(&e.scaled(*c));
        }
        Some(degree2_structure(&q, p_star)?)
    } else {
        None
    };

    Ok(AlmgrenBlowup::Polynomial {
        lambda: lambda_star,
        coefficients: coeffs,
        residual,
        residuals,
        structure,
    })
}

/// Decompose the Hessian of a 2-homogeneous harmonic `q` in the eigenframe of
/// `p_*` (kernel directions last) and read off `(t, N)`.
fn degree2_structure(q: &Poly, p_star: &QuadForm) -> Result<Degree2Structure> {
    let n = p_star.dim();
    // Hessian of q.
    let mut hess = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut e = [0.0f64; 3];
            let mut entry = 0.0;
            for (c, exps) in q.terms() {
                // d²/dx_i dx_j of the monomial, evaluated anywhere (degree 2
                // monomials have constant second derivatives).
                let mut exps_f = [exps[0] as f64, exps[1] as f64, exps[2] as f64];
                let mut coef = *c;
                for axis in [i, j] {
                    if exps_f[axis] <= 0.0 {
                        coef = 0.0;
                        break;
                    }
                    coef *= exps_f[axis];
                    exps_f[axis] -= 1.0;
                }
                entry += coef;
            }
            hess[(i, j)] = entry;
            e[0] = 0.0; // silence unused warnings in 2D builds
            let _ = e;
        }
    }
    // Frame of p_*: eigenvectors sorted by descending |eigenvalue|, kernel last.
    let eig = p_star.to_dmatrix().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .abs()
            .partial_cmp(&eig.eigenvalues[a].abs())
            .unwrap()
    });
    let mut frame = DMatrix::<f64>::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        frame.set_column(col, &eig.eigenvectors.column(k));
    }
    let m = eig.eigenvalues.iter().filter(|e| e.abs() <= 1e-6).count();
    let rotated = frame.transpose() * hess * &frame;
    let nm = n - m;
    let t = (0..nm).map(|i| rotated[(i, i)]).sum::<f64>() / nm as f64;
    let mut n_matrix = vec![vec![0.0f64; m]; m];
    let mut tr_n = 0.0;
    for i in 0..m {
        for j in 0..m {
            n_matrix[i][j] = -rotated[(nm + i, nm + j)];
        }
        tr_n += n_matrix[i][i];
    }
    // Entries the block form requires to vanish: off-diagonals of the t-block
    // and the coupling block.
    let mut off = 0.0f64;
    for i in 0..nm {
        for j in 0..nm {
            if i != j {
                off = off.max(rotated[(i, j)].abs());
            } else {
                off = off.max((rotated[(i, j)] - t).abs());
            }
        }
    }
    for i in 0..nm {
        for j in nm..n {
            off = off.max(rotated[(i, j)].abs());
            off = off.max(rotated[(j, i)].abs());
        }
    }
    Ok(Degree2Structure { t, n_matrix, trace_residual: (tr_n - nm as f64 * t).abs(), off_structure: off })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonneauSampling {
    pub min_integral: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Sampled minimum of `∫_{∂B₁} q (p_* - p)` over the nonnegative trace-one
/// family: uniform rotations composed with uniform-simplex eigenvalues. The
/// integral is evaluated exactly from sphere moments.
pub fn monneau_inequality(
    q: &Poly,
    p_star: &QuadForm,
    samples: usize,
    seed: u64,
) -> Result<MonneauSampling> {
    let n = p_star.dim();
    if q.degree() != 2 || !q.is_homogeneous() {
        return Err(Error::Parameter(
            "inequality sampling needs a 2-homogeneous polynomial".into(),
        ));
    }
    let mut min_integral = f64::INFINITY;
    for s in 0..samples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(s as u64));
        // Uniform simplex eigenvalues via normalized exponentials.
        let mut ev = [0.0f64; 3];
        let mut total = 0.0;
        for e in ev.iter_mut().take(n) {
            let u: f64 = rng.random();
            *e = -(u.max(1e-300)).ln();
            total += *e;
        }
        for e in ev.iter_mut().take(n) {
            *e /= total;
        }
        // Uniform rotation via QR of a Gaussian matrix, sign-fixed.
        let g = DMatrix::<f64>::from_fn(n, n, |_, _| {
            // Box-Muller from two uniforms.
            let u1: f64 = rng.random::<f64>().max(1e-300);
            let u2: f64 = rng.random();
            (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
        });
        let qr = g.qr();
        let mut rot = qr.q();
        let rmat = qr.r();
        for c in 0..n {
            if rmat[(c, c)] < 0.0 {
                for r in 0..n {
                    rot[(r, c)] = -rot[(r, c)];
                }
            }
        }
        let mut diag = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            diag[(i, i)] = ev[i];
        }
        let a = &rot * diag * rot.transpose();
        let p = QuadForm::from_dmatrix(&a);
        let integrand = p_star.to_poly().sub(&p.to_poly());
        let v = sphere_inner(q, &integrand);
        if v < min_integral {
            min_integral = v;
        }
    }
    Ok(MonneauSampling { min_integral, samples, seed })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HolderFit {
    pub beta: f64,
    pub constant: f64,
    pub r_squared: f64,
    /// All pairwise blowup distances are at noise level: the map is constant.
    pub constant_map: bool,
    pub pairs: usize,
}

/// Log-log regression of pairwise blowup-matrix distances against point
/// distances: `‖A_x - A_y‖ ≤ C |x-y|^β`.
pub fn holder_exponent(items: &[(Point, QuadForm)]) -> Result<HolderFit> {
    if items.len() < 5 {
        return Err(Error::InsufficientData(format!(
            "exponent fit needs at least 5 points, got {}",
            items.len()
        )));
    }
    let n = items[0].1.dim();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut pairs = 0usize;
    let mut max_gap = 0.0f64;
    for i in 0..items.len() {
        for j in (i + 1)..items.len() {
            let d = dist(&items[i].0, &items[j].0, n);
            if d <= 0.0 {
                continue;
            }
            let gap = items[i].1.distance(&items[j].1);
            pairs += 1;
            max_gap = max_gap.max(gap);
            if gap > 1e-12 {
                xs.push(d.ln());
                ys.push(gap.ln());
            }
        }
    }
    if max_gap <= 1e-12 {
        return Ok(HolderFit {
            beta: 0.0,
            constant: 0.0,
            r_squared: 1.0,
            constant_map: true,
            pairs,
        });
    }
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let beta = sxy / sxx;
    let intercept = my - beta * mx;
    let r2 = if syy > 0.0 { (sxy * sxy) / (sxx * syy) } else { 1.0 };
    Ok(HolderFit {
        beta,
        constant: intercept.exp(),
        r_squared: r2,
        constant_map: false,
        pairs,
    })
}
