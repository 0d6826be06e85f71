//! Decay recursion for second-derivative envelopes.
//!
//! For nonnegative sequences bounded by `M` and obeying
//! `M_{k+1} ≤ M_k - C₁ M_k^{2n-1} + C₂ M_k^{2n-2} (1/k)^β` with
//! `β = 1/(2(n-1))`, there are constants `C₀`, `K₀` — explicit functions of
//! `(n, k₀, M, C₁, C₂)` — such that `M_k ≤ C₀ (1/k)^β` for `k ≥ K₀`.
//! [`derive_constants`] computes the smallest such `C₀` from its four
//! defining inequalities, [`worst_case_sequence`] iterates the recursion at
//! equality (the extremal admissible sequence), and [`verify_bound`] checks
//! the decay bound element by element.

use serde::{Deserialize, Serialize};

use crate::field::ScalarField;
use crate::{dist, Error, Point, Result};

/// Parameters with derived constants.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecursionParams {
    pub n: usize,
    pub k0: u64,
    pub m_bound: f64,
    pub c1: f64,
    pub c2: f64,
    pub beta: f64,
    pub c0: f64,
    pub k_start: u64,
    /// Slack of each defining inequality at the returned `C₀` (all ≥ 0).
    pub slacks: [f64; 4],
}

fn exponents(n: usize) -> (i32, i32) {
    ((2 * n as i32) - 1, (2 * n as i32) - 2)
}

/// The four defining inequalities at a candidate `C₀`, written as
/// `lhs(C₀) ≥ 0`.
fn inequality_slacks(n: usize, k0: u64, m: f64, c1: f64, c2: f64, c0: f64) -> [f64; 4] {
    let nf = n as f64;
    let beta = 1.0 / (2.0 * (nf - 1.0));
    let p = 2.0 * nf - 3.0;
    [
        2.0 * c2 * (c0 / 2.0).powf(p) - (k0.max(1) as f64),
        (2.0f64.powf(2.0 * nf - 5.0) / c2).powf(1.0 / (2.0 * nf - 2.0))
            * c0.powf(1.0 / (2.0 * nf - 2.0))
            - m,
        (2.0 * nf - 2.0) * c1 * c0.powf(2.0 * nf - 2.0) / 2.0f64.powf(2.0 * nf) - 2.0,
        c1 * c0 / (2.0f64.powf(2.0 * nf) * c2) - 2.0f64.powf(beta * (2.0 * nf - 1.0)),
    ]
}

/// Smallest `C₀` (to 1e-6, by per-inequality bisection then max) satisfying
/// the four defining inequalities, and the induced `K₀`.
pub fn derive_constants(n: usize, k0: u64, m: f64, c1: f64, c2: f64) -> Result<RecursionParams> {
    if n < 2 {
        return Err(Error::Parameter(format!("dimension must be at least 2, got {n}")));
    }
    if k0 < 1 {
        return Err(Error::Parameter("k0 must be at least 1".into()));
    }
    if !(m > 0.0 && c1 > 0.0 && c2 > 0.0) {
        return Err(Error::Parameter("M, C1, C2 must be positive".into()));
    }
    let mut c0 = 0.0f64;
    for i in 0..4 {
        let pred = |c: f64| inequality_slacks(n, k0, m, c1, c2, c)[i] >= 0.0;
        // Bracket then bisect to 1e-6.
        let mut hi = 1.0f64;
        let mut guard = 0;
        while !pred(hi) {
            hi *= 2.0;
            guard += 1;
            if guard > 200 {
                return Err(Error::Parameter(format!(
                    "inequality {i} unsatisfiable for these parameters"
                )));
            }
        }
        let mut lo = 0.0f64;
        while hi - lo > 1e-6 {
            let mid = 0.5 * (lo + hi);
            if pred(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        c0 = c0.max(hi);
    }
    let nf = n as f64;
    let beta = 1.0 / (2.0 * (nf - 1.0));
    let k_start = (2.0 * c2 * (c0 / 2.0).powf(2.0 * nf - 3.0)).ceil().max(1.0) as u64;
    let slacks = inequality_slacks(n, k0, m, c1, c2, c0);
    debug_assert!(k_start >= k0, "K0 ≥ k0 is implied by the first inequality");
    Ok(RecursionParams { n, k0, m_bound: m, c1, c2, beta, c0, k_start, slacks })
}

/// The extremal admissible sequence: the recursion iterated at equality from
/// `M_{k0} = M`, clamped to `[0, M]`. Returns `M_k` for `k = k0 ..= k_max`,
/// plus the count of steps where the sequence increased (possible only while
/// `C₁ M_k < C₂ (1/k)^β`).
pub fn worst_case_sequence(
    n: usize,
    k0: u64,
    m: f64,
    c1: f64,
    c2: f64,
    k_max: u64,
) -> (Vec<f64>, usize) {
    let (e1, e2) = exponents(n);
    let beta = 1.0 / (2.0 * (n as f64 - 1.0));
    let len = (k_max - k0 + 1) as usize;
    let mut seq = Vec::with_capacity(len);
    let mut mk = m;
    seq.push(mk);
    let mut increases = 0usize;
    for k in k0..k_max {
        let forcing = c2 * mk.powi(e2) * (k as f64).powf(-beta);
        let next = (mk - c1 * mk.powi(e1) + forcing).clamp(0.0, m);
        if next > mk {
            increases += 1;
            debug_assert!(
                c1 * mk < c2 * (k as f64).powf(-beta) + 1e-15,
                "increase outside the sanctioned regime at k={k}"
            );
        }
        mk = next;
        seq.push(mk);
    }
    (seq, increases)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundVerdict {
    pub holds: bool,
    pub first_violation: Option<u64>,
    /// Smallest margin `C₀ k^{-β} - M_k` over the checked range.
    pub min_margin: f64,
    pub checked_from: u64,
    pub checked_to: u64,
    /// No indices to check: `K₀` exceeds the sequence range.
    pub vacuous: bool,
}

/// Elementwise check of `M_k ≤ C₀ (1/k)^β` for `k ≥ K₀` over the sequence
/// produced by [`worst_case_sequence`] (indexed from `k0`).
pub fn verify_bound(seq: &[f64], params: &RecursionParams) -> BoundVerdict {
    let k_end = params.k0 + seq.len() as u64 - 1;
    let from = params.k_start.max(params.k0);
    if from > k_end {
        return BoundVerdict {
            holds: true,
            first_violation: None,
            min_margin: f64::INFINITY,
            checked_from: from,
            checked_to: k_end,
            vacuous: true,
        };
    }
    let mut min_margin = f64::INFINITY;
    let mut first_violation = None;
    for k in from..=k_end {
        let mk = seq[(k - params.k0) as usize];
        let bound = params.c0 * (k as f64).powf(-params.beta);
        let margin = bound - mk;
        if margin < min_margin {
            min_margin = margin;
        }
        if margin < 0.0 && first_violation.is_none() {
            first_violation = Some(k);
        }
    }
    BoundVerdict {
        holds: first_violation.is_none(),
        first_violation,
        min_margin,
        checked_from: from,
        checked_to: k_end,
        vacuous: false,
    }
}

/// One row of the brute-force verification matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridCell {
    pub params: RecursionParams,
    pub verdict: BoundVerdict,
    pub increases: usize,
}

/// Run the equality recursion over a parameter grid and verify the decay
/// bound for each cell up to `k_max`.
pub fn verify_grid(
    ns: &[usize],
    c1s: &[f64],
    c2s: &[f64],
    ms: &[f64],
    k0s: &[u64],
    k_max: u64,
) -> Result<Vec<GridCell>> {
    let mut cells = Vec::new();
    for &n in ns {
        for &c1 in c1s {
            for &c2 in c2s {
                for &m in ms {
                    for &k0 in k0s {
                        let params = derive_constants(n, k0, m, c1, c2)?;
                        let (seq, increases) = worst_case_sequence(n, k0, m, c1, c2, k_max);
                        let verdict = verify_bound(&seq, &params);
                        cells.push(GridCell { params, verdict, increases });
                    }
                }
            }
        }
    }
    Ok(cells)
}

/// CSV for the verification matrix.
pub fn grid_to_csv(cells: &[GridCell]) -> String {
    let mut out = String::from(
        "n,k0,M,C1,C2,beta,C0,K0,holds,vacuous,first_violation,min_margin\n",
    );
    for c in cells {
        out.push_str(&format!(
            "{},{},{},{},{},{:.6},{:.6},{},{},{},{},{}\n",
            c.params.n,
            c.params.k0,
            c.params.m_bound,
            c.params.c1,
            c.params.c2,
            c.params.beta,
            c.params.c0,
            c.params.k_start,
            c.verdict.holds,
            c.verdict.vacuous,
            c.verdict.first_violation.map(|k| k.to_string()).unwrap_or_default(),
            if c.verdict.min_margin.is_finite() {
                format!("{:.6e}", c.verdict.min_margin)
            } else {
                String::new()
            },
        ));
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MkMeasurement {
    pub ks: Vec<u32>,
    pub values: Vec<f64>,
    /// Requested levels dropped because `2^{-k}` fell below resolution.
    pub truncated: bool,
    /// Least-squares fit of `values ≈ c (1/k)^rate` over the measured range.
    pub rate_fit: Option<(f64, f64)>,
}

/// Empirical envelope `M_k = sup_y ( -min_{B_{2^{-k}}(y)} D_ii u )` over free
/// boundary vertices `y` near `x0`, by second differences on the grid.
pub fn measure_mk(
    u: &ScalarField,
    x0: &Point,
    eps: f64,
    axis: usize,
    k_range: std::ops::RangeInclusive<u32>,
) -> Result<MkMeasurement> {
    let spec = *u.spec();
    let n = spec.dim();
    if axis >= n {
        return Err(Error::Parameter(format!("axis {axis} out of range for dimension {n}")));
    }
    let h = spec.spacing();
    let gamma = crate::field::detect_free_boundary(u, 10.0, 10.0);
    let centers: Vec<Point> = gamma
        .iter()
        .map(|&flat| spec.vertex(&spec.unflat(flat)))
        .filter(|y| dist(y, x0, n) <= eps / 4.0)
        .collect();
    if centers.is_empty() {
        return Err(Error::Classification(format!(
            "no free boundary vertices within {} of {x0:?}",
            eps / 4.0
        )));
    }
    let nn = spec.points();
    let mut ks = Vec::new();
    let mut values = Vec::new();
    let mut truncated = false;
    for k in k_range {
        let r = 0.5f64.powi(k as i32);
        if r < 8.0 * h {
            truncated = true;
            break;
        }
        let mut sup = 0.0f64;
        for y in &centers {
            let steps = (r / h).floor() as isize;
            let base = spec.nearest_vertex(y);
            let mut worst = f64::INFINITY;
            for di in -steps..=steps {
                let i = base[0] as isize + di;
                if i < 1 || i as usize >= nn - 1 {
                    continue;
                }
                for dj in -steps..=steps {
                    let j = base[1] as isize + dj;
                    if j < 1 || j as usize >= nn - 1 {
                        continue;
                    }
                    let probe = |idx: [usize; 3]| -> Result<f64> { u.second_diff(&idx, axis) };
                    if n == 2 {
                        let idx = [i as usize, j as usize, 0];
                        let x = spec.vertex(&idx);
                        if dist(&x, y, n) <= r {
                            worst = worst.min(probe(idx)?);
                        }
                    } else {
                        for dk in -steps..=steps {
                            let kk = base[2] as isize + dk;
                            if kk < 1 || kk as usize >= nn - 1 {
                                continue;
                            }
                            let idx = [i as usize, j as usize, kk as usize];
                            let x = spec.vertex(&idx);
                            if dist(&x, y, n) <= r {
                                worst = worst.min(probe(idx)?);
                            }
                        }
                    }
                }
            }
            if worst.is_finite() {
                sup = sup.max(-worst);
            }
        }
        ks.push(k);
        values.push(sup.max(0.0));
    }
    if ks.is_empty() {
        return Err(Error::RadiusTooSmall {
            r: 0.0,
            min: 8.0 * h,
        });
    }
    // Log-log rate fit over positive entries.
    let pts: Vec<(f64, f64)> = ks
        .iter()
        .zip(&values)
        .filter(|(_, v)| **v > 1e-12)
        .map(|(k, v)| ((*k as f64).ln(), v.ln()))
        .collect();
    let rate_fit = if pts.len() >= 3 {
        let m = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        if sxx > 0.0 {
            let slope = sxy / sxx;
            Some(((my - slope * mx).exp(), -slope))
        } else {
            None
        }
    } else {
        None
    };
    Ok(MkMeasurement { ks, values, truncated, rate_fit })
}
