//! Monitoring functionals along shrinking spheres.
//!
//! For a field `v`, center `x0` and radius `r`:
//!
//! * frequency  `Φ(r) = r ∫_{B_r} |∇v|² / ∫_{∂B_r} v²`
//! * energy     `W_λ(r) = r^{-(n-2+2λ)} ∫_{B_r} |∇v|² - λ r^{-(n-1+2λ)} ∫_{∂B_r} v²`
//! * boundary mass `H_λ(r) = r^{-(n-1+2λ)} ∫_{∂B_r} v²`
//!
//! On a λ-homogeneous harmonic field, Φ ≡ λ, W_λ ≡ 0 and H_λ is constant.
//! Along deficits of solutions these are nondecreasing in `r` (W for any
//! λ ≥ 0, H for λ ≤ Φ(0+)), which [`check_monotone`] turns into a verdict.
//! The frequency limit at `r → 0+` is estimated by [`profile`].

use serde::{Deserialize, Serialize};

use crate::field::{ball_dirichlet, sphere_mean_sq, Field};
use crate::poly::QuadForm;
use crate::{Error, Point, Result};

/// Almgren frequency quotient at one radius.
pub fn almgren(v: &dyn Field, h: f64, x0: &Point, r: f64) -> Result<f64> {
    let dirichlet = ball_dirichlet(v, h, x0, r)?;
    let boundary = sphere_mean_sq(v, h, x0, r)?;
    let scale = v.scale_hint();
    if boundary <= 1e-30 * scale * scale {
        return Err(Error::DegenerateDenominator(boundary));
    }
    Ok(r * dirichlet / boundary)
}

/// Weiss-type energy at one radius.
pub fn weiss(v: &dyn Field, h: f64, x0: &Point, r: f64, lambda: f64) -> Result<f64> {
    let n = v.dim() as f64;
    let dirichlet = ball_dirichlet(v, h, x0, r)?;
    let boundary = sphere_mean_sq(v, h, x0, r)?;
    Ok(r.powf(-(n - 2.0 + 2.0 * lambda)) * dirichlet
        - lambda * r.powf(-(n - 1.0 + 2.0 * lambda)) * boundary)
}

/// Monneau-type boundary mass at one radius.
pub fn monneau(v: &dyn Field, h: f64, x0: &Point, r: f64, lambda: f64) -> Result<f64> {
    let n = v.dim() as f64;
    let boundary = sphere_mean_sq(v, h, x0, r)?;
    Ok(r.powf(-(n - 1.0 + 2.0 * lambda)) * boundary)
}

/// Frequency and energy tracks over dyadic radii, with the limiting-frequency
/// estimate.
///
/// The frequency limit exists and the track is nondecreasing along solution
/// deficits, so the smallest reliable radius is the tightest upper-biased
/// estimate; its confidence is the frequency variation over the smallest
/// dyadic decade.
/// One λ-indexed track of a profile. `scale` is the largest constituent
/// magnitude entering the track before cancellation; quadrature noise is
/// multiplicative in it, so monotonicity slacks are measured against it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LambdaTrack {
    pub lambda: f64,
    pub values: Vec<f64>,
    pub scale: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrequencyProfile {
    pub center: Point,
    pub radii: Vec<f64>,
    pub phi: Vec<f64>,
    pub weiss: Vec<LambdaTrack>,
    pub monneau: Vec<LambdaTrack>,
    pub lambda_star: f64,
    pub confidence: f64,
}

impl FrequencyProfile {
    /// CSV with one header row: `r,phi,w_<λ>...,h_<λ>...`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,phi");
        for t in &self.weiss {
            out.push_str(&format!(",w_{}", t.lambda));
        }
        for t in &self.monneau {
            out.push_str(&format!(",h_{}", t.lambda));
        }
        out.push('\n');
        for (i, r) in self.radii.iter().enumerate() {
            out.push_str(&format!("{:.17e},{:.17e}", r, self.phi[i]));
            for t in &self.weiss {
                out.push_str(&format!(",{:.17e}", t.values[i]));
            }
            for t in &self.monneau {
                out.push_str(&format!(",{:.17e}", t.values[i]));
            }
            out.push('\n');
        }
        out
    }
}

/// Minimum profile radius in grid spacings; stricter than the quadrature
/// floor because deficits are smallest near their centers.
pub const PROFILE_MIN_RADIUS_FACTOR: f64 = 8.0;

/// Evaluate all three functionals on dyadic radii `r_min · 2^k ≤ r_max`.
pub fn profile(
    v: &dyn Field,
    h: f64,
    x0: &Point,
    r_min: f64,
    r_max: f64,
    lambdas: &[f64],
) -> Result<FrequencyProfile> {
    let floor = PROFILE_MIN_RADIUS_FACTOR * h;
    if r_min < floor {
        return Err(Error::RadiusTooSmall { r: r_min, min: floor });
    }
    if r_min >= r_max {
        return Err(Error::Parameter(format!("need r_min < r_max, got [{r_min}, {r_max}]")));
    }
    let mut radii = Vec::new();
    let mut r = r_min;
    while r <= r_max * (1.0 + 1e-12) {
        radii.push(r);
        r *= 2.0;
    }
    let mut phi = Vec::with_capacity(radii.len());
    let mut weiss_tracks = vec![Vec::with_capacity(radii.len()); lambdas.len()];
    let mut weiss_scales = vec![0.0f64; lambdas.len()];
    let mut monneau_tracks = vec![Vec::with_capacity(radii.len()); lambdas.len()];
    let mut monneau_scales = vec![0.0f64; lambdas.len()];
    for &r in &radii {
        let n = v.dim() as f64;
        let dirichlet = ball_dirichlet(v, h, x0, r)?;
        let boundary = sphere_mean_sq(v, h, x0, r)?;
        let scale = v.scale_hint();
        if boundary <= 1e-30 * scale * scale {
            return Err(Error::DegenerateDenominator(boundary));
        }
        phi.push(r * dirichlet / boundary);
        for (k, &lam) in lambdas.iter().enumerate() {
            let energy_term = r.powf(-(n - 2.0 + 2.0 * lam)) * dirichlet;
            let mass_term = lam * r.powf(-(n - 1.0 + 2.0 * lam)) * boundary;
            weiss_tracks[k].push(energy_term - mass_term);
            weiss_scales[k] = weiss_scales[k].max(energy_term.abs()).max(mass_term.abs());
            let hterm = r.powf(-(n - 1.0 + 2.0 * lam)) * boundary;
            monneau_tracks[k].push(hterm);
            monneau_scales[k] = monneau_scales[k].max(hterm.abs());
        }
    }
    // Frequency variation over the smallest dyadic decade [r_min, 2 r_min].
    let decade: Vec<f64> = radii
        .iter()
        .zip(&phi)
        .filter(|(r, _)| **r <= 2.0 * r_min * (1.0 + 1e-12))
        .map(|(_, p)| *p)
        .collect();
    let confidence = decade.iter().cloned().fold(f64::MIN, f64::max)
        - decade.iter().cloned().fold(f64::MAX, f64::min);
    let weiss = lambdas
        .iter()
        .zip(weiss_tracks)
        .zip(&weiss_scales)
        .map(|((l, values), s)| LambdaTrack { lambda: *l, values, scale: *s })
        .collect();
    let monneau = lambdas
        .iter()
        .zip(monneau_tracks)
        .zip(&monneau_scales)
        .map(|((l, values), s)| LambdaTrack { lambda: *l, values, scale: *s })
        .collect();
    Ok(FrequencyProfile {
        center: *x0,
        radii,
        lambda_star: phi[0],
        confidence,
        phi,
        weiss,
        monneau,
    })
}

/// Which track of a profile to check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Track {
    Phi,
    Weiss(f64),
    Monneau(f64),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonotoneVerdict {
    pub monotone: bool,
    /// Largest decrease between consecutive radii (0 when none).
    pub worst_violation: f64,
    /// Radius at which the worst decrease starts.
    pub location: f64,
    pub tolerance: f64,
}

/// Nondecreasing check with a relative tolerance `1e-3 · track scale`, where
/// the scale of a λ-track is its largest constituent magnitude (so tracks that
/// cancel to zero are judged against the size of what cancelled).
pub fn check_monotone(profile: &FrequencyProfile, track: Track) -> Result<MonotoneVerdict> {
    let (values, scale): (&[f64], f64) = match track {
        Track::Phi => {
            let s = profile.phi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            (&profile.phi, s)
        }
        Track::Weiss(lam) => {
            let t = profile
                .weiss
                .iter()
                .find(|t| t.lambda == lam)
                .ok_or_else(|| Error::Parameter(format!("no Weiss track for λ={lam}")))?;
            (&t.values, t.scale)
        }
        Track::Monneau(lam) => {
            let t = profile
                .monneau
                .iter()
                .find(|t| t.lambda == lam)
                .ok_or_else(|| Error::Parameter(format!("no Monneau track for λ={lam}")))?;
            (&t.values, t.scale)
        }
    };
    if values.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "monotonicity needs at least 4 radii, got {}",
            values.len()
        )));
    }
    let tol = 1e-3 * scale;
    let mut worst = 0.0f64;
    let mut loc = profile.radii[0];
    for i in 0..values.len() - 1 {
        let drop = values[i] - values[i + 1];
        if drop > worst {
            worst = drop;
            loc = profile.radii[i];
        }
    }
    Ok(MonotoneVerdict {
        monotone: worst <= tol,
        worst_violation: worst,
        location: loc,
        tolerance: tol,
    })
}

/// Divergence ratio `H_λ(r_min) / H_λ(2 r_min)` over the smallest measured
/// decade; markedly above one indicates blowup of the track as `r → 0`.
pub fn monneau_divergence_ratio(profile: &FrequencyProfile, lambda: f64) -> Result<f64> {
    let track = &profile
        .monneau
        .iter()
        .find(|t| t.lambda == lambda)
        .ok_or_else(|| Error::Parameter(format!("no Monneau track for λ={lambda}")))?
        .values;
    if track.len() < 2 {
        return Err(Error::InsufficientData("divergence ratio needs ≥ 2 radii".into()));
    }
    Ok(track[0] / track[1])
}

/// Verdict of the sign identity for `w = u - p` against a nonnegative
/// trace-one quadratic `p`.
///
/// On solutions of the unconstrained problem `w Δw` equals `p χ_{u=0} ≥ 0`:
/// nonnegative on the zero set, vanishing elsewhere. The gradient-constrained
/// variant breaks this (its coincidence set may sit at a nonzero level), which
/// shows up as a large off-set magnitude and a negative overall minimum.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WLaplaceVerdict {
    pub identity_holds: bool,
    /// Minimum of wΔw over the detected zero set of u.
    pub min_on_zero_set: f64,
    /// Largest |wΔw| away from the zero set and its 2h boundary layer.
    pub max_off_zero_set: f64,
    /// Minimum of wΔw over all unmasked interior vertices.
    pub min_overall: f64,
    pub zero_set_vertices: usize,
    pub tol_on: f64,
    pub tol_off: f64,
}

pub fn w_laplace_identity(
    u: &crate::field::ScalarField,
    p: &QuadForm,
    tol_on: f64,
    tol_off: f64,
) -> Result<WLaplaceVerdict> {
    if !p.is_p_plus(1e-9) {
        return Err(Error::Parameter(
            "identity requires a nonnegative trace-one quadratic form".into(),
        ));
    }
    let spec = u.spec();
    let n = spec.dim();
    let nn = spec.points();
    let h = spec.spacing();
    let s = u.sup_abs().max(f64::MIN_POSITIVE);
    let tol_u = 10.0 * h * h * s;

    // Zero set by value threshold; the verdict skips a 2h layer around its edge.
    let mut zero = vec![false; spec.len()];
    for (flat, zv) in zero.iter_mut().enumerate() {
        *zv = u.values()[flat].abs() <= tol_u;
    }
    let layer = 2usize;
    let mut min_on = f64::INFINITY;
    let mut max_off = 0.0f64;
    let mut min_all = f64::INFINITY;
    let mut count = 0usize;
    for flat in 0..spec.len() {
        let idx = spec.unflat(flat);
        if (0..n).any(|a| idx[a] == 0 || idx[a] + 1 >= nn) {
            continue;
        }
        let here = zero[flat];
        let mut near_boundary = false;
        'scan: for a in 0..n {
            for d in 1..=layer {
                for dir in [-1isize, 1] {
                    let j = idx[a] as isize + dir * d as isize;
                    if j < 0 || j as usize >= nn {
                        continue;
                    }
                    let mut nb = idx;
                    nb[a] = j as usize;
                    if zero[spec.flat(&nb)] != here {
                        near_boundary = true;
                        break 'scan;
                    }
                }
            }
        }
        if near_boundary {
            continue;
        }
        let x = spec.vertex(&idx);
        let w = u.values()[flat] - p.eval(&x);
        // Δw = stencil Δu - 1: the stencil is exact on the quadratic part.
        let dw = u.laplacian_stencil(&idx)? - 1.0;
        let prod = w * dw;
        min_all = min_all.min(prod);
        if here {
            count += 1;
            min_on = min_on.min(prod);
        } else {
            max_off = max_off.max(prod.abs());
        }
    }
    if count == 0 {
        min_on = 0.0;
    }
    if !min_all.is_finite() {
        min_all = 0.0;
    }
    Ok(WLaplaceVerdict {
        identity_holds: min_on >= -tol_on && max_off <= tol_off,
        min_on_zero_set: min_on,
        max_off_zero_set: max_off,
        min_overall: min_all,
        zero_set_vertices: count,
        tol_on,
        tol_off,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{AnalyticField, GridSpec, ScalarField};
    use crate::fixtures;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::PI;

    fn h512() -> f64 {
        2.0 / 512.0
    }

    #[test]
    fn almgren_is_homogeneity_on_harmonics() {
        // Φ ≡ λ for r^λ sin λθ at any radius (∫|∇v|² = λ/r · ∫ v² there).
        for lam in [2.0, 2.5, 3.0, 3.5, 4.0] {
            let f = fixtures::homogeneous(lam, fixtures::Profile::Sin).unwrap();
            for r in [0.1, 0.25, 0.4] {
                let phi = almgren(&f.field, h512(), &[0.0; 3], r).unwrap();
                assert_abs_diff_eq!(phi, lam, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn almgren_on_quadratic_forms() {
        // 2-homogeneity makes Φ r-independent, but the value sits below 2 for
        // Δp = 1 forms: Φ = 2 - r ∫_B p / ∫_∂ p² by the divergence theorem.
        // For p = ½x₁²: 2 - (π r⁵/8)/((3π/16) r⁵) = 4/3.
        let p = AnalyticField::new(2, |x| 0.5 * x[0] * x[0], |x| [x[0], 0.0, 0.0]);
        for r in [0.2, 0.45] {
            let phi = almgren(&p, h512(), &[0.0; 3], r).unwrap();
            assert_abs_diff_eq!(phi, 4.0 / 3.0, epsilon = 1e-10);
        }
        // For the radial p = ¼|x|²: 2 - (πr⁵/8)/(πr⁵/8) = 1.
        let q = AnalyticField::new(
            2,
            |x| 0.25 * (x[0] * x[0] + x[1] * x[1]),
            |x| [0.5 * x[0], 0.5 * x[1], 0.0],
        );
        assert_abs_diff_eq!(almgren(&q, h512(), &[0.0; 3], 0.3).unwrap(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn almgren_cusp_deficit_frequency() {
        // The cusp deficit has Φ ≡ 1 + μ/2 at every radius.
        let f = fixtures::cusp(3.0, 2).unwrap();
        let w = f.deficit.as_ref().unwrap();
        for r in [0.05, 0.1, 0.2] {
            assert_abs_diff_eq!(almgren(w, h512(), &[0.0; 3], r).unwrap(), 2.5, epsilon = 1e-9);
        }
    }

    #[test]
    fn degenerate_denominator_detected() {
        let zero = AnalyticField::new(2, |_| 0.0, |_| [0.0; 3]);
        assert!(matches!(
            almgren(&zero, h512(), &[0.0; 3], 0.2),
            Err(Error::DegenerateDenominator(_))
        ));
    }

    #[test]
    fn weiss_examples() {
        let f = fixtures::homogeneous(3.0, fixtures::Profile::Sin).unwrap().field;
        // λ=3 on a 3-homogeneous harmonic: identically zero.
        for r in [0.1, 0.3, 0.45] {
            assert_abs_diff_eq!(
                weiss(&f, h512(), &[0.0; 3], r, 3.0).unwrap(),
                0.0,
                epsilon = 1e-10
            );
        }
        // λ=2: W₂ = π r².
        let w = weiss(&f, h512(), &[0.0; 3], 0.5, 2.0).unwrap();
        assert_relative_eq!(w, PI * 0.25, max_relative = 1e-10);

        // v = ½x₁², λ=2: constant -π/8 (= π/4 - 3π/8) at every radius.
        let q = AnalyticField::new(2, |x| 0.5 * x[0] * x[0], |x| [x[0], 0.0, 0.0]);
        for r in [0.2, 0.4] {
            assert_relative_eq!(
                weiss(&q, h512(), &[0.0; 3], r, 2.0).unwrap(),
                -PI / 8.0,
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn monneau_examples() {
        let f = fixtures::homogeneous(3.0, fixtures::Profile::Sin).unwrap().field;
        for r in [0.125, 0.25, 0.5] {
            // λ=2: H = π r², increasing.
            assert_relative_eq!(
                monneau(&f, h512(), &[0.0; 3], r, 2.0).unwrap(),
                PI * r * r,
                max_relative = 1e-10
            );
            // λ=3: constant π.
            assert_relative_eq!(
                monneau(&f, h512(), &[0.0; 3], r, 3.0).unwrap(),
                PI,
                max_relative = 1e-10
            );
            // λ=3.5: π/r, divergent as r → 0.
            assert_relative_eq!(
                monneau(&f, h512(), &[0.0; 3], r, 3.5).unwrap(),
                PI / r,
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn profile_estimates_lambda_star() {
        let h = h512();
        // Harmonic cubic deficit: λ* = 3 sharply.
        let f = fixtures::perturbed(
            &fixtures::named_base("x1sq").unwrap(),
            &fixtures::named_harmonic("imz3").unwrap(),
            1e-2,
        )
        .unwrap();
        let w = f.deficit.as_ref().unwrap();
        let p = profile(w, h, &[0.0; 3], 8.0 * h, 0.45, &[2.0, 3.0]).unwrap();
        assert_abs_diff_eq!(p.lambda_star, 3.0, epsilon = 1e-3);
        assert!(p.confidence < 1e-6);

        // Cusp deficits: λ* = 1 + μ/2.
        for (mu, lam) in [(3.0, 2.5), (7.0, 4.5)] {
            let f = fixtures::cusp(mu, 2).unwrap();
            let w = f.deficit.as_ref().unwrap();
            let p = profile(w, h, &[0.0; 3], 8.0 * h, 0.45, &[2.0]).unwrap();
            assert_abs_diff_eq!(p.lambda_star, lam, epsilon = 0.05);
        }
    }

    #[test]
    fn monotonicity_verdicts() {
        let h = h512();
        let f = fixtures::cusp(3.0, 2).unwrap();
        let w = f.deficit.as_ref().unwrap();
        let p = profile(w, h, &[0.0; 3], 8.0 * h, 0.45, &[2.0, 2.5, 3.0]).unwrap();
        assert!(check_monotone(&p, Track::Phi).unwrap().monotone);
        assert!(check_monotone(&p, Track::Weiss(2.0)).unwrap().monotone);
        assert!(check_monotone(&p, Track::Weiss(2.5)).unwrap().monotone);
        // H_λ nondecreasing for λ ≤ λ*; divergent for λ > λ*.
        assert!(check_monotone(&p, Track::Monneau(2.0)).unwrap().monotone);
        assert!(check_monotone(&p, Track::Monneau(2.5)).unwrap().monotone);
        let ratio = monneau_divergence_ratio(&p, 3.0).unwrap();
        assert!(ratio >= 1.5, "ratio {ratio}");
    }

    #[test]
    fn phi_multiplicative_invariance() {
        // Φ(αv) = Φ(v) to machine precision.
        let f = fixtures::homogeneous(2.5, fixtures::Profile::Sin).unwrap().field;
        let fc = f.clone();
        let fg = f.clone();
        let scaled = AnalyticField::new(
            2,
            move |x: &Point| -7.25 * fc.value(x).unwrap(),
            move |x: &Point| {
                let g = fg.gradient(x).unwrap();
                [-7.25 * g[0], -7.25 * g[1], 0.0]
            },
        );
        let a = almgren(&f, h512(), &[0.0; 3], 0.3).unwrap();
        let b = almgren(&scaled, h512(), &[0.0; 3], 0.3).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-12);
    }

    #[test]
    fn phi_scaling_invariance() {
        // almgren(v(c·), x0/c, r/c) = almgren(v, x0, r) for c ∈ {1/2, 2}.
        let f = fixtures::perturbed(
            &fixtures::named_base("x1sq").unwrap(),
            &fixtures::named_harmonic("imz3").unwrap(),
            1e-2,
        )
        .unwrap()
        .field;
        let x0 = [0.12, -0.08, 0.0];
        let r = 0.2;
        let base = almgren(&f, h512(), &x0, r).unwrap();
        for c in [0.5, 2.0] {
            let fv = f.clone();
            let fg = f.clone();
            let fc = AnalyticField::new(
                2,
                move |x: &Point| fv.value(&[c * x[0], c * x[1], 0.0]).unwrap(),
                move |x: &Point| {
                    let g = fg.gradient(&[c * x[0], c * x[1], 0.0]).unwrap();
                    [c * g[0], c * g[1], 0.0]
                },
            );
            let v = almgren(&fc, h512(), &[x0[0] / c, x0[1] / c, 0.0], r / c).unwrap();
            assert_relative_eq!(v, base, max_relative = 1e-6);
        }
    }

    #[test]
    fn w_laplace_identity_on_exact_fields() {
        let spec = GridSpec::new(2, 129).unwrap();
        // Classical radial solution with p = ¼|x|² ∈ P⁺: identity holds.
        let fx = fixtures::radial_classical(0.5).unwrap();
        let u = ScalarField::sample(spec, "radial", |x| fx.field.value(x).unwrap()).unwrap();
        let p = fixtures::named_base("iso2").unwrap();
        let v = w_laplace_identity(&u, &p, 1e-6, 1e-2).unwrap();
        assert!(v.identity_holds, "{v:?}");
        assert!(v.min_on_zero_set >= -1e-6);
        assert!(v.zero_set_vertices > 100);

        // Perturbed polynomial: coincidence set is negligible, wΔw ≈ 0 a.e.
        let fp = fixtures::perturbed(
            &fixtures::named_base("x1sq").unwrap(),
            &fixtures::named_harmonic("imz3").unwrap(),
            1e-2,
        )
        .unwrap();
        let u2 = ScalarField::sample(spec, "pert", |x| fp.field.value(x).unwrap()).unwrap();
        let v2 =
            w_laplace_identity(&u2, &fixtures::named_base("x1sq").unwrap(), 1e-6, 1e-6).unwrap();
        assert!(v2.max_off_zero_set <= 1e-6, "{v2:?}");

        // Rejects forms outside the nonnegative family.
        let bad = QuadForm::from_diag(2, &[1.5, -0.5]);
        assert!(w_laplace_identity(&u2, &bad, 1e-6, 1e-6).is_err());
    }

    #[test]
    fn w_laplace_identity_violated_on_lifted_plateau() {
        // Gradient-constrained variant: coincidence plateau at level 1. There
        // wΔw = p - 1 < 0, caught as a large off-set magnitude and a negative
        // overall minimum.
        let spec = GridSpec::new(2, 129).unwrap();
        let fx = fixtures::plateau(0.5, 1.0).unwrap();
        let u = ScalarField::sample(spec, "plateau", |x| fx.field.value(x).unwrap()).unwrap();
        let p = fixtures::named_base("iso2").unwrap();
        let v = w_laplace_identity(&u, &p, 1e-6, 1e-2).unwrap();
        assert!(!v.identity_holds, "{v:?}");
        assert!(v.min_overall < -0.5, "{v:?}");
    }
}
