//! Independent oracles shared by the integration suites. Nothing here calls
//! into the code path it is used to check.

#![allow(dead_code)]

/// Adaptive Simpson on `[a, b]`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Composite Simpson with `panels` (even) panels.
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut s = f(a) + f(b);
    for i in 1..panels {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + h * i as f64);
    }
    s * h / 3.0
}

/// Triweight density written out directly.
pub fn triweight(x: f64) -> f64 {
    if x.abs() > 1.0 {
        0.0
    } else {
        35.0 / 32.0 * (1.0 - x * x).powi(3)
    }
}

pub fn epanechnikov(x: f64) -> f64 {
    if x.abs() > 1.0 {
        0.0
    } else {
        0.75 * (1.0 - x * x)
    }
}

pub fn edf(samples: &[f64], t: f64) -> f64 {
    samples.iter().filter(|&&s| s <= t).count() as f64 / samples.len() as f64
}

/// `∫_{-1}^{1} F̂(t − a x) k(x) dx`, integrating the triweight piecewise
/// between the jump points of the step function.
pub fn convolution_oracle(residuals: &[f64], a: f64, t: f64) -> f64 {
    let mut cuts: Vec<f64> = residuals
        .iter()
        .map(|e| (t - e) / a)
        .filter(|x| x.abs() < 1.0)
        .collect();
    cuts.push(-1.0);
    cuts.push(1.0);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            // F̂ is constant on the open piece.
            let level = edf(residuals, t - a * mid);
            level * simpson(&triweight, w[0], w[1], 512)
        })
        .sum()
}

/// Local polynomial estimate by weighted least squares in the raw basis
/// `(z − x)^m`, solved with Gauss–Jordan elimination on `XᵀWX`.
pub fn direct_wls(z: &[f64], y: &[f64], order: usize, c: f64, x: f64) -> f64 {
    let p = order + 1;
    let mut a = vec![vec![0.0; p + 1]; p];
    for (&zj, &yj) in z.iter().zip(y) {
        let w = epanechnikov((zj - x) / c) / c;
        if w == 0.0 {
            continue;
        }
        let row: Vec<f64> = (0..p).map(|m| (zj - x).powi(m as i32)).collect();
        for r in 0..p {
            for s in 0..p {
                a[r][s] += w * row[r] * row[s];
            }
            a[r][p] += w * row[r] * yj;
        }
    }
    for col in 0..p {
        let piv = (col..p).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, piv);
        for r in 0..p {
            if r != col {
                let f = a[r][col] / a[col][col];
                for s in col..=p {
                    a[r][s] -= f * a[col][s];
                }
            }
        }
    }
    a[0][p] / a[0][0]
}

/// Maximises `Σ log p_i` subject to `Σ p_i = 1`, `Σ p_i ε_i = 0` directly in
/// the primal. Starting from a feasible point, it cycles through triples
/// `(i, j, k)`; the direction that changes only those three weights while
/// preserving both constraints is searched with a zooming grid.
pub fn el_grid_oracle(errors: &[f64]) -> Vec<f64> {
    let n = errors.len();
    let pos: Vec<usize> = (0..n).filter(|&i| errors[i] > 0.0).collect();
    let neg: Vec<usize> = (0..n).filter(|&i| errors[i] < 0.0).collect();
    let zero: Vec<usize> = (0..n).filter(|&i| errors[i] == 0.0).collect();
    assert!(!pos.is_empty() && !neg.is_empty());
    let mean = |idx: &[usize]| idx.iter().map(|&i| errors[i].abs()).sum::<f64>() / idx.len() as f64;
    let (mp, mn) = (mean(&pos), mean(&neg));
    let gamma = zero.len() as f64 / n as f64;
    let alpha = (1.0 - gamma) * mn / (mp + mn);
    let beta = 1.0 - gamma - alpha;
    let mut p = vec![0.0; n];
    for &i in &pos {
        p[i] = alpha / pos.len() as f64;
    }
    for &i in &neg {
        p[i] = beta / neg.len() as f64;
    }
    for &i in &zero {
        p[i] = gamma / zero.len() as f64;
    }
    if n < 3 {
        return p;
    }

    let mut triples = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                triples.push([i, j, k]);
            }
        }
    }
    for _sweep in 0..4000 {
        let mut moved = 0.0f64;
        for &[i, j, k] in &triples {
            // d ⟂ (1,1,1) and (e_i, e_j, e_k): cross product.
            let (ei, ej, ek) = (errors[i], errors[j], errors[k]);
            let d = [ek - ej, ei - ek, ej - ei];
            let norm = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            if norm == 0.0 {
                continue;
            }
            let d = [d[0] / norm, d[1] / norm, d[2] / norm];
            let idx = [i, j, k];
            // Feasible step range keeping the three weights positive.
            let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
            for m in 0..3 {
                if d[m] > 0.0 {
                    lo = lo.max(-p[idx[m]] / d[m]);
                } else if d[m] < 0.0 {
                    hi = hi.min(-p[idx[m]] / d[m]);
                }
            }
            let obj = |s: f64| (0..3).map(|m| (p[idx[m]] + s * d[m]).ln()).sum::<f64>();
            let (mut a, mut b) = (lo, hi);
            let mut best = 0.0;
            let mut best_val = obj(0.0);
            for _zoom in 0..30 {
                let pts = 24;
                let h = (b - a) / pts as f64;
                for g in 1..pts {
                    let s = a + h * g as f64;
                    let v = obj(s);
                    if v > best_val {
                        best_val = v;
                        best = s;
                    }
                }
                a = (best - h).max(lo);
                b = (best + h).min(hi);
            }
            for m in 0..3 {
                p[idx[m]] += best * d[m];
            }
            moved = moved.max(best.abs());
        }
        if moved < 1e-14 {
            break;
        }
    }
    p
}

/// Brute-force sup of `|F̂*(t) − 𝔽(t) − f(t) ε̄|` over a uniform grid,
/// evaluating every sum naively.
pub fn brute_force_remainder(
    residuals: &[f64],
    errors: &[f64],
    a: f64,
    density: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    points: usize,
) -> f64 {
    let n = errors.len() as f64;
    let mean = errors.iter().sum::<f64>() / n;
    let kcdf = |x: f64| -> f64 {
        if x <= -1.0 {
            0.0
        } else if x >= 1.0 {
            1.0
        } else {
            0.5 + 35.0 / 32.0 * (x - x.powi(3) + 0.6 * x.powi(5) - x.powi(7) / 7.0)
        }
    };
    let step = (hi - lo) / (points - 1) as f64;
    let mut sup: f64 = 0.0;
    for g in 0..points {
        let t = lo + step * g as f64;
        let smooth: f64 = residuals.iter().map(|e| kcdf((t - e) / a)).sum::<f64>() / n;
        let oracle = errors.iter().filter(|&&e| e <= t).count() as f64 / n;
        sup = sup.max((smooth - oracle - density(t) * mean).abs());
    }
    n.sqrt() * sup
}

/// Prints one verdict line per acceptance criterion and fails on red.
pub fn verdict(id: u32, title: &str, pass: bool, detail: &str) {
    println!(
        "[{}] criterion {id:>2}: {title} | {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {id} failed: {title} | {detail}");
}
