//! Closed-form solutions and calibrators.
//!
//! Each fixture is a pointwise-evaluable field ([`AnalyticField`]) plus, where
//! the construction pins them, ground-truth metadata: the quadratic blowup at
//! the singular point, the deficit frequency, the stratum dimension and the
//! nonnegativity flag. Fixtures with metadata also expose the exact deficit
//! `w = u - p_*` as a field of its own, so frequency measurements are free of
//! interpolation error and limited only by series truncation.

use std::f64::consts::PI;

use crate::field::AnalyticField;
use crate::poly::{harmonic_basis, Poly, QuadForm};
use crate::{Error, Point, Result};

/// Ground-truth metadata carried by calibration fixtures.
#[derive(Debug, Clone)]
pub struct FixtureTruth {
    pub singular_point: Point,
    pub p_star: QuadForm,
    pub lambda_star: f64,
    pub m: usize,
    pub sigma_plus: bool,
    /// Set when the fixture degenerates to `u ≡ p_*` (excluded case).
    pub identity_excluded: bool,
}

/// A named closed-form field with optional ground truth and exact deficit.
pub struct Fixture {
    pub label: String,
    pub field: AnalyticField,
    pub truth: Option<FixtureTruth>,
    pub deficit: Option<AnalyticField>,
}

/// Angle in `(-π, π]`; branch cut on the negative x₁-axis.
pub fn theta_sym(x: &Point) -> f64 {
    x[1].atan2(x[0])
}

/// Angle in `[0, 2π)`; branch cut on the positive x₁-axis.
pub fn theta_pos(x: &Point) -> f64 {
    let t = x[1].atan2(x[0]);
    if t < 0.0 {
        t + 2.0 * PI
    } else {
        t
    }
}

fn radius2(x: &Point) -> f64 {
    (x[0] * x[0] + x[1] * x[1]).sqrt()
}

/// Cusp-type local solution family: `u = ½x₂² - (1/λ) r^λ sin(λθ)` with
/// `λ = 1 + μ/2`, `μ = 4k+3`, and angle branch `(-π, π]`. The truncated series
/// solves `Δu = 1` away from the ray `{x₂ = 0, x₁ ≤ 0}`; the omitted tail is
/// what would close it up across that ray.
pub fn cusp(mu: f64, truncation: usize) -> Result<Fixture> {
    let k = (mu - 3.0) / 4.0;
    if k < 0.0 || (k - k.round()).abs() > 1e-9 {
        return Err(Error::Parameter(format!(
            "cusp exponent must be of the form 4k+3 (3, 7, 11, ...), got {mu}"
        )));
    }
    if truncation == 0 {
        return Err(Error::Parameter("truncation must retain at least one term".into()));
    }
    if truncation > 2 {
        return Err(Error::Parameter(
            "series terms beyond the second are unspecified; truncation must be 1 or 2".into(),
        ));
    }
    let lam = 1.0 + mu / 2.0;
    let with_correction = truncation >= 2;

    let value = move |x: &Point| {
        let mut u = 0.5 * x[1] * x[1];
        if with_correction {
            let r = radius2(x);
            let th = theta_sym(x);
            u -= r.powf(lam) / lam * (lam * th).sin();
        }
        u
    };
    let grad = move |x: &Point| {
        let mut g = [0.0, x[1], 0.0];
        if with_correction {
            let r = radius2(x);
            if r > 0.0 {
                let th = theta_sym(x);
                let f = r.powf(lam - 1.0);
                g[0] -= f * ((lam - 1.0) * th).sin();
                g[1] -= f * ((lam - 1.0) * th).cos();
            }
        }
        g
    };

    let p_star = QuadForm::from_diag(2, &[0.0, 1.0]);
    let deficit = if with_correction {
        Some(AnalyticField::new(
            2,
            move |x: &Point| {
                let r = radius2(x);
                let th = theta_sym(x);
                -r.powf(lam) / lam * (lam * th).sin()
            },
            move |x: &Point| {
                let r = radius2(x);
                if r == 0.0 {
                    return [0.0; 3];
                }
                let th = theta_sym(x);
                let f = r.powf(lam - 1.0);
                [-f * ((lam - 1.0) * th).sin(), -f * ((lam - 1.0) * th).cos(), 0.0]
            },
        ))
    } else {
        None
    };

    Ok(Fixture {
        label: format!("cusp:mu={mu}"),
        field: AnalyticField::new(2, value, grad),
        truth: Some(FixtureTruth {
            singular_point: [0.0; 3],
            p_star,
            lambda_star: lam,
            m: 1,
            sigma_plus: true,
            identity_excluded: !with_correction,
        }),
        deficit,
    })
}

/// Angular profile for 2D homogeneous functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// `sin(λθ)`, odd about the x₁-axis; branch `[0, 2π)` keeps half-integer
    /// homogeneities continuous, with a derivative kink along the positive axis.
    Sin,
    /// `cos(λθ)`, even about the x₁-axis; branch `(-π, π]`, kink along the
    /// negative axis.
    Cos,
}

/// `v = r^λ g(λθ)` in 2D, harmonic away from the branch ray for every
/// half-integer λ (and globally for integer λ).
pub fn homogeneous(lambda: f64, profile: Profile) -> Result<Fixture> {
    if lambda <= 0.0 {
        return Err(Error::Parameter(format!("homogeneity must be positive, got {lambda}")));
    }
    let value = move |x: &Point| {
        let r = radius2(x);
        if r == 0.0 {
            return 0.0;
        }
        let th = match profile {
            Profile::Sin => theta_pos(x),
            Profile::Cos => theta_sym(x),
        };
        let g = match profile {
            Profile::Sin => (lambda * th).sin(),
            Profile::Cos => (lambda * th).cos(),
        };
        r.powf(lambda) * g
    };
    let grad = move |x: &Point| {
        let r = radius2(x);
        if r == 0.0 {
            return [0.0; 3];
        }
        let th = match profile {
            Profile::Sin => theta_pos(x),
            Profile::Cos => theta_sym(x),
        };
        let f = lambda * r.powf(lambda - 1.0);
        match profile {
            Profile::Sin => [f * ((lambda - 1.0) * th).sin(), f * ((lambda - 1.0) * th).cos(), 0.0],
            Profile::Cos => [f * ((lambda - 1.0) * th).cos(), -f * ((lambda - 1.0) * th).sin(), 0.0],
        }
    };
    let name = match profile {
        Profile::Sin => "sin",
        Profile::Cos => "cos",
    };
    Ok(Fixture {
        label: format!("homogeneous:lambda={lambda},profile={name}"),
        field: AnalyticField::new(2, value, grad),
        truth: None,
        deficit: None,
    })
}

/// 3D homogeneous harmonic of integer degree `l`, the `index`-th member of the
/// orthonormal solid-harmonic basis.
pub fn solid_harmonic(l: usize, index: usize) -> Result<Fixture> {
    let basis = harmonic_basis(3, l);
    let p = basis
        .get(index)
        .cloned()
        .ok_or_else(|| Error::Parameter(format!("degree-{l} basis has {} members", basis.len())))?;
    let pg = p.clone();
    Ok(Fixture {
        label: format!("solid:l={l},index={index}"),
        field: AnalyticField::new(3, move |x| p.eval(x), move |x| pg.grad_eval(x)),
        truth: None,
        deficit: None,
    })
}

/// Exact radial solution of the 2D classical obstacle problem with coincidence
/// disk of radius `R`: `u = 0` on `|x| ≤ R`, `u = ρ²/4 - R²/4 - (R²/2)ln(ρ/R)`
/// outside, matched to first order at `|x| = R`.
pub fn radial_classical(rr: f64) -> Result<Fixture> {
    if !(0.0 < rr && rr < 1.0) {
        return Err(Error::Parameter(format!("coincidence radius must lie in (0,1), got {rr}")));
    }
    Ok(Fixture {
        label: format!("radial:R={rr}"),
        field: radial_field(rr, 0.0),
        truth: None,
        deficit: None,
    })
}

/// The radial solution lifted by a constant: exact solution of the
/// gradient-constrained ("superconductivity") variant with plateau value `c`.
pub fn plateau(rr: f64, c: f64) -> Result<Fixture> {
    if !(0.0 < rr && rr < 1.0) {
        return Err(Error::Parameter(format!("plateau radius must lie in (0,1), got {rr}")));
    }
    Ok(Fixture { label: format!("plateau:R={rr},c={c}"), field: radial_field(rr, c), truth: None, deficit: None })
}

fn radial_field(rr: f64, lift: f64) -> AnalyticField {
    AnalyticField::new(
        2,
        move |x: &Point| {
            let rho = radius2(x);
            if rho <= rr {
                lift
            } else {
                lift + rho * rho / 4.0 - rr * rr / 4.0 - rr * rr / 2.0 * (rho / rr).ln()
            }
        },
        move |x: &Point| {
            let rho = radius2(x);
            if rho <= rr || rho == 0.0 {
                [0.0; 3]
            } else {
                let ur = rho / 2.0 - rr * rr / (2.0 * rho);
                [ur * x[0] / rho, ur * x[1] / rho, 0.0]
            }
        },
    )
}

/// Exact Laplacian of the radial solution (for residual oracles): `χ_{|x|>R}`.
pub fn radial_classical_laplacian(rr: f64, x: &Point) -> f64 {
    if radius2(x) <= rr {
        0.0
    } else {
        1.0
    }
}

/// `u = p + ε h` with `p` a nonnegative trace-one quadratic and `h` a
/// homogeneous harmonic polynomial of degree `d ≥ 3`. The deficit `w = εh` is
/// exactly harmonic and `d`-homogeneous, so the ground-truth frequency is `d`.
pub fn perturbed(p: &QuadForm, h: &Poly, eps: f64) -> Result<Fixture> {
    let lap = h.laplacian();
    if lap.max_coeff() > 1e-10 {
        return Err(Error::Parameter(format!(
            "perturbation is not harmonic: Laplacian coefficient residual {}",
            lap.max_coeff()
        )));
    }
    if !h.is_homogeneous() || h.degree() < 3 {
        return Err(Error::Parameter(format!(
            "perturbation must be homogeneous of degree ≥ 3, got degree {}",
            h.degree()
        )));
    }
    if (p.trace() - 1.0).abs() > 1e-9 {
        return Err(Error::Parameter(format!("base form must have unit trace, got {}", p.trace())));
    }
    if p.min_eigenvalue() < -1e-9 {
        return Err(Error::Parameter("base form must be nonnegative".into()));
    }
    if p.dim() != h.dim() {
        return Err(Error::Parameter("base and perturbation dimensions differ".into()));
    }
    let n = p.dim();
    let d = h.degree();
    let m = p.eigenvalues().iter().filter(|e| e.abs() <= 1e-9).count();

    let pv = p.clone();
    let hv = h.clone();
    let value = move |x: &Point| pv.eval(x) + eps * hv.eval(x);
    let pg = p.clone();
    let hg = h.clone();
    let grad = move |x: &Point| {
        let mut g = pg.grad(x);
        let gh = hg.grad_eval(x);
        for k in 0..3 {
            g[k] += eps * gh[k];
        }
        g
    };
    let hd = h.clone();
    let hdg = h.clone();
    let deficit = AnalyticField::new(
        n,
        move |x: &Point| eps * hd.eval(x),
        move |x: &Point| {
            let g = hdg.grad_eval(x);
            [eps * g[0], eps * g[1], eps * g[2]]
        },
    );

    Ok(Fixture {
        label: format!("perturbed:d={d},eps={eps}"),
        field: AnalyticField::new(n, value, grad),
        truth: Some(FixtureTruth {
            singular_point: [0.0; 3],
            p_star: p.clone(),
            lambda_star: d as f64,
            m,
            sigma_plus: true,
            identity_excluded: eps == 0.0,
        }),
        deficit: if eps == 0.0 { None } else { Some(deficit) },
    })
}

/// Constant field; handy as solver boundary data.
pub fn constant(n: usize, v: f64) -> Fixture {
    Fixture {
        label: format!("const:v={v}"),
        field: AnalyticField::new(n, move |_| v, |_| [0.0; 3]),
        truth: None,
        deficit: None,
    }
}

/// Named harmonic polynomials for the catalog.
pub fn named_harmonic(name: &str) -> Result<Poly> {
    Ok(match name {
        // Im(z³), Re(z³), Im(z⁴), Re(z⁴)
        "imz3" => Poly::new(2, vec![(3.0, [2, 1, 0]), (-1.0, [0, 3, 0])]),
        "rez3" => Poly::new(2, vec![(1.0, [3, 0, 0]), (-3.0, [1, 2, 0])]),
        "imz4" => Poly::new(2, vec![(4.0, [3, 1, 0]), (-4.0, [1, 3, 0])]),
        "rez4" => Poly::new(2, vec![(1.0, [4, 0, 0]), (-6.0, [2, 2, 0]), (1.0, [0, 4, 0])]),
        // 3D cubic harmonic x₁³ - 3x₁x₃² (translation of rez3 into the x₁x₃-plane)
        "cubic3d" => Poly::new(3, vec![(1.0, [3, 0, 0]), (-3.0, [1, 0, 2])]),
        other => {
            return Err(Error::Parameter(format!(
                "unknown harmonic '{other}' (expected imz3|rez3|imz4|rez4|cubic3d)"
            )))
        }
    })
}

/// Named quadratic bases for the catalog.
pub fn named_base(name: &str) -> Result<QuadForm> {
    Ok(match name {
        "x1sq" => QuadForm::from_diag(2, &[1.0, 0.0]),
        "x2sq" => QuadForm::from_diag(2, &[0.0, 1.0]),
        "iso2" => QuadForm::from_diag(2, &[0.5, 0.5]),
        "x1sq3d" => QuadForm::from_diag(3, &[1.0, 0.0, 0.0]),
        "axis3" => QuadForm::from_diag(3, &[0.6, 0.4, 0.0]),
        "iso3" => QuadForm::from_diag(3, &[1.0 / 3.0; 3]),
        other => {
            return Err(Error::Parameter(format!(
                "unknown base form '{other}' (expected x1sq|x2sq|iso2|x1sq3d|axis3|iso3)"
            )))
        }
    })
}

/// Resolve a fixture by catalog name, e.g. `"cusp:mu=3"`, `"radial:R=0.5"`,
/// `"homogeneous:lambda=2.5,profile=sin"`, `"perturbed:base=x1sq,harmonic=imz3,eps=0.01"`,
/// `"plateau:R=0.5,c=1"`, `"const:v=5"`.
pub fn parse_fixture(name: &str) -> Result<Fixture> {
    let (kind, rest) = name.split_once(':').unwrap_or((name, ""));
    let mut kv = std::collections::BTreeMap::new();
    for part in rest.split(',').filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::Parameter(format!("bad fixture parameter '{part}'")))?;
        kv.insert(k.trim().to_string(), v.trim().to_string());
    }
    let getf = |k: &str, default: Option<f64>| -> Result<f64> {
        match kv.get(k) {
            Some(v) => v
                .parse::<f64>()
                .map_err(|_| Error::Parameter(format!("fixture parameter {k}={v} is not a number"))),
            None => default.ok_or_else(|| Error::Parameter(format!("fixture parameter '{k}' required"))),
        }
    };
    match kind {
        "cusp" => {
            let mu = getf("mu", None)?;
            let tr = getf("truncation", Some(2.0))? as usize;
            cusp(mu, tr)
        }
        "homogeneous" => {
            let lam = getf("lambda", None)?;
            let profile = match kv.get("profile").map(|s| s.as_str()).unwrap_or("sin") {
                "sin" => Profile::Sin,
                "cos" => Profile::Cos,
                other => {
                    return Err(Error::Parameter(format!("unknown profile '{other}'")));
                }
            };
            homogeneous(lam, profile)
        }
        "solid" => {
            let l = getf("l", None)? as usize;
            let index = getf("index", Some(0.0))? as usize;
            solid_harmonic(l, index)
        }
        "radial" => radial_classical(getf("R", None)?),
        "plateau" => plateau(getf("R", None)?, getf("c", Some(1.0))?),
        "perturbed" => {
            let base = named_base(
                kv.get("base").ok_or_else(|| Error::Parameter("'base' required".into()))?,
            )?;
            let h = named_harmonic(
                kv.get("harmonic").ok_or_else(|| Error::Parameter("'harmonic' required".into()))?,
            )?;
            perturbed(&base, &h, getf("eps", Some(1e-2))?)
        }
        "const" => {
            let n = getf("n", Some(2.0))? as usize;
            Ok(constant(n, getf("v", None)?))
        }
        other => Err(Error::Parameter(format!("unknown fixture kind '{other}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn cusp_metadata_and_parameter_validation() {
        let f3 = cusp(3.0, 2).unwrap();
        let t = f3.truth.as_ref().unwrap();
        assert_relative_eq!(t.lambda_star, 2.5);
        assert_eq!(t.m, 1);
        assert!(t.sigma_plus);
        let f7 = cusp(7.0, 2).unwrap();
        assert_relative_eq!(f7.truth.unwrap().lambda_star, 4.5);

        assert!(cusp(5.0, 2).is_err());
        assert!(cusp(-1.0, 2).is_err());
        assert!(cusp(3.0, 0).is_err());
        assert!(cusp(3.0, 3).is_err());
    }

    #[test]
    fn cusp_vanishes_on_positive_axis() {
        // θ = 0 along the positive x₁-axis: both terms vanish there.
        let f = cusp(3.0, 2).unwrap();
        for x1 in [0.1, 0.33, 0.8] {
            assert_abs_diff_eq!(f.field.value(&[x1, 0.0, 0.0]).unwrap(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn cusp_solves_poisson_off_slit() {
        // Δu = 1 away from {x₂=0, x₁≤0}, checked by central differences on the
        // analytic field.
        let f = cusp(3.0, 2).unwrap();
        let h = 1e-4;
        for (x, y) in [(0.3, 0.2), (-0.25, 0.31), (0.1, -0.4), (-0.3, -0.2)] {
            let u = |a: f64, b: f64| f.field.value(&[a, b, 0.0]).unwrap();
            let lap = (u(x + h, y) + u(x - h, y) + u(x, y + h) + u(x, y - h) - 4.0 * u(x, y))
                / (h * h);
            assert_abs_diff_eq!(lap, 1.0, epsilon = 1e-5);
        }
    }

    #[test]
    fn homogeneity_invariant() {
        // |v(x/2)·2^λ - v(x)| ≤ 1e-12 |v(x)| (cusp: correction term only).
        let cases: Vec<(f64, AnalyticField)> = vec![
            (2.5, homogeneous(2.5, Profile::Sin).unwrap().field),
            (3.5, homogeneous(3.5, Profile::Cos).unwrap().field),
            (3.0, homogeneous(3.0, Profile::Sin).unwrap().field),
            (2.5, cusp(3.0, 2).unwrap().deficit.unwrap()),
            (4.5, cusp(7.0, 2).unwrap().deficit.unwrap()),
        ];
        for (lam, v) in cases {
            for x in [[0.4, 0.3, 0.0], [-0.5, 0.2, 0.0], [0.1, -0.6, 0.0]] {
                let half = [x[0] / 2.0, x[1] / 2.0, 0.0];
                let a = v.value(&half).unwrap() * 2.0f64.powf(lam);
                let b = v.value(&x).unwrap();
                assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-300), "λ={lam} x={x:?}");
            }
        }
    }

    #[test]
    fn homogeneous_harmonicity_off_slit() {
        // Symbolic-oracle stand-in: 5-point Laplacian of the analytic field at
        // points away from the branch ray is ~0.
        for (lam, profile) in [(2.5, Profile::Sin), (2.0, Profile::Cos), (3.0, Profile::Sin)] {
            let f = homogeneous(lam, profile).unwrap();
            let h = 1e-4;
            for (x, y) in [(0.3, 0.4), (-0.2, 0.5), (0.45, -0.3)] {
                let u = |a: f64, b: f64| f.field.value(&[a, b, 0.0]).unwrap();
                let lap = (u(x + h, y) + u(x - h, y) + u(x, y + h) + u(x, y - h)
                    - 4.0 * u(x, y))
                    / (h * h);
                assert_abs_diff_eq!(lap, 0.0, epsilon = 2e-4);
            }
        }
    }

    #[test]
    fn integer_profiles_are_polynomials() {
        let f2 = homogeneous(2.0, Profile::Cos).unwrap();
        let f3 = homogeneous(3.0, Profile::Sin).unwrap();
        for (x, y) in [(0.3, 0.4), (-0.7, 0.1), (0.2, -0.9)] {
            let p = [x, y, 0.0];
            assert_relative_eq!(
                f2.field.value(&p).unwrap(),
                x * x - y * y,
                max_relative = 1e-12
            );
            assert_relative_eq!(
                f3.field.value(&p).unwrap(),
                3.0 * x * x * y - y * y * y,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn radial_classical_values() {
        let f = radial_classical(0.5).unwrap();
        // matching conditions at |x| = R
        assert_abs_diff_eq!(f.field.value(&[0.5, 0.0, 0.0]).unwrap(), 0.0, epsilon = 1e-15);
        let g = f.field.gradient(&[0.5, 0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(g[0], 0.0, epsilon = 1e-12);
        // direct formula at |x| = 1
        let expect = 0.25 - 0.0625 - 0.125 * 2.0f64.ln();
        assert_relative_eq!(f.field.value(&[1.0, 0.0, 0.0]).unwrap(), expect, max_relative = 1e-12);
        assert_relative_eq!(expect, 0.100_85, max_relative = 1e-3);
        // Δu = 1 on the positive set
        let h = 1e-5;
        let u = |a: f64, b: f64| f.field.value(&[a, b, 0.0]).unwrap();
        let (x, y) = (0.75, 0.0);
        let lap =
            (u(x + h, y) + u(x - h, y) + u(x, y + h) + u(x, y - h) - 4.0 * u(x, y)) / (h * h);
        assert_abs_diff_eq!(lap, 1.0, epsilon = 1e-4);
        assert!(radial_classical(0.0).is_err());
        assert!(radial_classical(1.0).is_err());
    }

    #[test]
    fn perturbed_validation_and_truth() {
        let p = named_base("x1sq").unwrap();
        let h = named_harmonic("imz3").unwrap();
        let f = perturbed(&p, &h, 1e-2).unwrap();
        let t = f.truth.as_ref().unwrap();
        assert_eq!(t.lambda_star, 3.0);
        assert_eq!(t.m, 1);
        assert!(!t.identity_excluded);

        let q = perturbed(&named_base("iso2").unwrap(), &named_harmonic("rez4").unwrap(), 1e-3)
            .unwrap();
        assert_eq!(q.truth.as_ref().unwrap().lambda_star, 4.0);
        assert_eq!(q.truth.as_ref().unwrap().m, 0);

        // ε = 0 is the excluded identity case, flagged not rejected.
        let z = perturbed(&p, &h, 0.0).unwrap();
        assert!(z.truth.unwrap().identity_excluded);

        // Non-harmonic perturbation is rejected with a residual report.
        let bad = Poly::monomial(2, 1.0, [4, 0, 0]);
        match perturbed(&p, &bad, 1e-2) {
            Err(Error::Parameter(msg)) => assert!(msg.contains("residual")),
            other => panic!("expected rejection, got {:?}", other.map(|f| f.label)),
        }
    }

    #[test]
    fn catalog_round_trip() {
        for name in [
            "cusp:mu=3",
            "cusp:mu=7,truncation=2",
            "radial:R=0.5",
            "plateau:R=0.5,c=1",
            "homogeneous:lambda=2.5,profile=sin",
            "perturbed:base=x1sq,harmonic=imz3,eps=0.01",
            "const:v=5",
            "solid:l=2,index=1",
        ] {
            let f = parse_fixture(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(f.field.value(&[0.31, 0.17, 0.05]).unwrap().is_finite());
        }
        assert!(parse_fixture("nope:x=1").is_err());
        assert!(parse_fixture("cusp:mu=4").is_err());
    }
}
