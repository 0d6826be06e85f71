use crate::field::quad::MIN_RADIUS_FACTOR;
use crate::field::ScalarField;
use crate::{dist, Error, Result};
use crate::Point;

/// Sign threshold for membership in the negativity set `{v < 0}`: values above
/// `-1e-12 · scale(v)` are treated as zero to avoid sign noise at exact zeros.
pub fn negativity_threshold(field: &ScalarField) -> f64 {
    1e-12 * field.sup_abs()
}

fn check_ball(field: &ScalarField, x0: &Point, r: f64) -> Result<()> {
    let h = field.spec().spacing();
    let min = MIN_RADIUS_FACTOR * h;
    if r < min {
        return Err(Error::RadiusTooSmall { r, min });
    }
    let n = field.spec().dim();
    for k in 0..n {
        if x0[k].abs() + r > 1.0 + 1e-12 {
            return Err(Error::OutOfDomain { x: *x0, halfwidth: 1.0 - r });
        }
    }
    Ok(())
}

/// Iterate flat indices of vertices in the axis-aligned bounding box of
/// `B_r(x0)`, calling `f(idx, x)` for vertices with `|x-x0| ≤ r`.
fn for_vertices_in_ball(
    field: &ScalarField,
    x0: &Point,
    r: f64,
    mut f: impl FnMut(&[usize; 3], &Point),
) {
    let spec = field.spec();
    let n = spec.dim();
    let h = spec.spacing();
    let nn = spec.points();
    let mut lo = [0usize; 3];
    let mut hi = [0usize; 3];
    for k in 0..n {
        lo[k] = (((x0[k] - r + 1.0) / h).floor().max(0.0)) as usize;
        hi[k] = (((x0[k] + r + 1.0) / h).ceil() as usize).min(nn - 1);
    }
    let mut idx = [0usize; 3];
    for i in lo[0]..=hi[0] {
        idx[0] = i;
        for j in lo[1]..=hi[1] {
            idx[1] = j;
            if n == 2 {
                idx[2] = 0;
                let x = spec.vertex(&idx);
                if dist(&x, x0, n) <= r {
                    f(&idx, &x);
                }
            } else {
                for k in lo[2]..=hi[2] {
                    idx[2] = k;
                    let x = spec.vertex(&idx);
                    if dist(&x, x0, n) <= r {
                        f(&idx, &x);
                    }
                }
            }
        }
    }
}

/// `|{v<0} ∩ B_ρ(x0)| / |B_ρ|` via vertex counting with a subcell correction:
/// vertices within a gradient-scaled band of the zero level contribute
/// fractionally, so half-space densities come out exact up to `O(h/ρ)`.
pub fn negative_density(field: &ScalarField, x0: &Point, rho: f64) -> Result<f64> {
    check_ball(field, x0, rho)?;
    let tau = negativity_threshold(field);
    let spec = field.spec();
    let n = spec.dim();
    let h = spec.spacing();
    let nn = spec.points();
    // The linear subcell ramp only applies across an actual sign change:
    // a vertex contributes fractionally when a grid neighbor has the
    // opposite sign, otherwise it counts 0 or 1 outright.
    let has_sign_change = |idx: &[usize; 3], negative: bool| -> bool {
        for axis in 0..n {
            for dir in [-1isize, 1] {
                let j = idx[axis] as isize + dir;
                if j < 0 || j as usize >= nn {
                    continue;
                }
                let mut nb = *idx;
                nb[axis] = j as usize;
                let w = field.at(&nb);
                if negative != (w < -tau) {
                    return true;
                }
            }
        }
        false
    };
    let mut covered = 0.0f64;
    let mut total = 0usize;
    for_vertices_in_ball(field, x0, rho, |idx, x| {
        total += 1;
        let v = field.at(idx);
        let negative = v < -tau;
        let frac = if has_sign_change(idx, negative) {
            let band = match field.interp_gradient(x) {
                Ok(g) => h * g[..n].iter().map(|gi| gi * gi).sum::<f64>().sqrt(),
                Err(_) => 0.0,
            };
            if band > 0.0 {
                (0.5 - v / (2.0 * band)).clamp(0.0, 1.0)
            } else if negative {
                1.0
            } else {
                0.0
            }
        } else if negative {
            1.0
        } else {
            0.0
        };
        covered += frac;
    });
    if total == 0 {
        return Err(Error::RadiusTooSmall { r: rho, min: MIN_RADIUS_FACTOR * h });
    }
    Ok(covered / total as f64)
}

/// Squared-distance transform along one axis (lower envelope of parabolas).
fn edt_1d(f: &[f64], out: &mut [f64]) {
    let n = f.len();
    let mut v = vec![0usize; n];
    let mut z = vec![0.0f64; n + 1];
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        let mut s;
        loop {
            let p = v[k];
            s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q - p) as f64);
            if s <= z[k] {
                if k == 0 {
                    break;
                }
                k -= 1;
            } else {
                break;
            }
        }
        if s > z[k] {
            k += 1;
        }
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        *o = (q as f64 - p as f64).powi(2) + f[p];
    }
}

/// `MR(B_r(y) ∩ {v<0})`: the radius of the largest ball contained in the
/// negativity set clipped to `B_r(y)`, via an exact Euclidean distance
/// transform on the grid. Accurate to one grid spacing.
pub fn max_radius_negative(field: &ScalarField, y: &Point, r: f64) -> Result<f64> {
    check_ball(field, y, r)?;
    let spec = field.spec();
    let n = spec.dim();
    let h = spec.spacing();
    let tau = negativity_threshold(field);

    // Collect the bounding box, mark background = (not negative) or (outside the ball).
    let nn = spec.points();
    let mut lo = [0usize; 3];
    let mut hi = [1usize; 3];
    for k in 0..n {
        lo[k] = (((y[k] - r + 1.0) / h).floor().max(0.0)) as usize;
        hi[k] = (((y[k] + r + 1.0) / h).ceil() as usize).min(nn - 1) + 1;
    }
    let dims: [usize; 3] = [
        hi[0] - lo[0],
        hi[1] - lo[1],
        if n == 3 { hi[2] - lo[2] } else { 1 },
    ];
    let len = dims[0] * dims[1] * dims[2];
    const FAR: f64 = 1e18;
    let mut d2 = vec![0.0f64; len];
    let box_flat = |i: usize, j: usize, k: usize| (i * dims[1] + j) * dims[2] + k;
    let mut any_negative = false;
    for i in 0..dims[0] {
        for j in 0..dims[1] {
            for k in 0..dims[2] {
                let idx = [lo[0] + i, lo[1] + j, if n == 3 { lo[2] + k } else { 0 }];
                let x = spec.vertex(&idx);
                let inside = dist(&x, y, n) <= r && field.at(&idx) < -tau;
                any_negative |= inside;
                d2[box_flat(i, j, k)] = if inside { FAR } else { 0.0 };
            }
        }
    }
    if !any_negative {
        return Ok(0.0);
    }

    // Axis passes of the squared-distance transform.
    let mut buf_in = vec![0.0f64; dims[0].max(dims[1]).max(dims[2])];
    let mut buf_out = vec![0.0f64; buf_in.len()];
    // axis 0
    for j in 0..dims[1] {
        for k in 0..dims[2] {
            for i in 0..dims[0] {
                buf_in[i] = d2[box_flat(i, j, k)];
            }
            edt_1d(&buf_in[..dims[0]], &mut buf_out[..dims[0]]);
            for i in 0..dims[0] {
                d2[box_flat(i, j, k)] = buf_out[i];
            }
        }
    }
    // axis 1
    for i in 0..dims[0] {
        for k in 0..dims[2] {
            for j in 0..dims[1] {
                buf_in[j] = d2[box_flat(i, j, k)];
            }
            edt_1d(&buf_in[..dims[1]], &mut buf_out[..dims[1]]);
            for j in 0..dims[1] {
                d2[box_flat(i, j, k)] = buf_out[j];
            }
        }
    }
    if n == 3 {
        for i in 0..dims[0] {
            for j in 0..dims[1] {
                for k in 0..dims[2] {
                    buf_in[k] = d2[box_flat(i, j, k)];
                }
                edt_1d(&buf_in[..dims[2]], &mut buf_out[..dims[2]]);
                for k in 0..dims[2] {
                    d2[box_flat(i, j, k)] = buf_out[k];
                }
            }
        }
    }

    // Largest inscribed ball: max over candidate centers of
    // min(distance to complement, distance to ∂B_r(y)).
    let mut best = 0.0f64;
    for i in 0..dims[0] {
        for j in 0..dims[1] {
            for k in 0..dims[2] {
                let v = d2[box_flat(i, j, k)];
                if v <= 0.0 || v >= FAR {
                    continue;
                }
                let idx = [lo[0] + i, lo[1] + j, if n == 3 { lo[2] + k } else { 0 }];
                let x = spec.vertex(&idx);
                let to_sphere = r - dist(&x, y, n);
                let rad = (v.sqrt() * h).min(to_sphere);
                best = best.max(rad);
            }
        }
    }
    Ok(best.min(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GridSpec;

    fn grid(n: usize, pts: usize) -> GridSpec {
        GridSpec::new(n, pts).unwrap()
    }

    #[test]
    fn density_of_nonnegative_field_is_zero() {
        let f = ScalarField::sample(grid(2, 65), "sq", |x| x[0] * x[0]).unwrap();
        assert_eq!(negative_density(&f, &[0.0; 3], 0.3).unwrap(), 0.0);
    }

    #[test]
    fn density_of_half_space() {
        let f = ScalarField::sample(grid(2, 129), "x1", |x| x[0]).unwrap();
        let rho = 0.4;
        let d = negative_density(&f, &[0.0; 3], rho).unwrap();
        let h = f.spec().spacing();
        assert!((d - 0.5).abs() <= 2.0 * h / rho, "density {d}");
    }

    #[test]
    fn density_monotone_under_pointwise_decrease() {
        // v1 ≤ v2 pointwise ⇒ density(v1) ≥ density(v2)
        let spec = grid(2, 65);
        let v2 = ScalarField::sample(spec, "a", |x| x[0] + 0.1 * x[1]).unwrap();
        let v1 = ScalarField::sample(spec, "b", |x| x[0] + 0.1 * x[1] - 0.2).unwrap();
        let d2 = negative_density(&v2, &[0.0; 3], 0.5).unwrap();
        let d1 = negative_density(&v1, &[0.0; 3], 0.5).unwrap();
        assert!(d1 >= d2);
    }

    #[test]
    fn mr_trivial_cases() {
        let spec = grid(2, 129);
        let pos = ScalarField::sample(spec, "pos", |x| 1.0 + x[0] * x[0]).unwrap();
        assert_eq!(max_radius_negative(&pos, &[0.0; 3], 0.5).unwrap(), 0.0);

        let neg = ScalarField::sample(spec, "neg", |_| -1.0).unwrap();
        let mr = max_radius_negative(&neg, &[0.0; 3], 0.5).unwrap();
        let h = spec.spacing();
        assert!((mr - 0.5).abs() <= h, "mr {mr}");
    }

    #[test]
    fn mr_half_disk() {
        // {x₁ < 0} ∩ B_{1/2}: largest inscribed ball has radius 1/4.
        let spec = grid(2, 129);
        let f = ScalarField::sample(spec, "x1", |x| x[0]).unwrap();
        let mr = max_radius_negative(&f, &[0.0; 3], 0.5).unwrap();
        let h = spec.spacing();
        assert!((mr - 0.25).abs() <= h, "mr {mr}");
    }

    #[test]
    fn mr_bounded_by_r_and_monotone() {
        let spec = grid(2, 65);
        let f = ScalarField::sample(spec, "f", |x| x[0] - 0.3).unwrap();
        let g = ScalarField::sample(spec, "g", |x| x[0] - 0.3 - 0.1).unwrap();
        for r in [0.3, 0.45] {
            let a = max_radius_negative(&f, &[0.0; 3], r).unwrap();
            let b = max_radius_negative(&g, &[0.0; 3], r).unwrap();
            assert!(a <= r && b <= r);
            assert!(b >= a); // pointwise smaller field has bigger negativity set
        }
    }

    #[test]
    fn ball_outside_domain_rejected() {
        let spec = grid(2, 65);
        let f = ScalarField::sample(spec, "f", |x| x[0]).unwrap();
        assert!(negative_density(&f, &[0.8, 0.0, 0.0], 0.5).is_err());
        assert!(max_radius_negative(&f, &[0.0, 0.9, 0.0], 0.2).is_err());
    }
}
