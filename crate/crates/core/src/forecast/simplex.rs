//! Nelder–Mead simplex minimization with seeded restarts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct SimplexOptions {
    /// Convergence when (f_worst − f_best) ≤ rel_tol · |f_best|.
    pub rel_tol: f64,
    /// Evaluation budget per run.
    pub max_evals: usize,
    /// Initial simplex edge length along each axis.
    pub step: f64,
    /// Extra runs after the first, each starting near the best point so far.
    pub restarts: usize,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

fn nan_to_inf(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

fn single_run<F: Fn(&[f64]) -> f64>(f: &F, x0: &[f64], steps: &[f64], opts: &SimplexOptions) -> SimplexResult {
    let n = x0.len();
    let eval = |x: &[f64]| nan_to_inf(f(x));
    let mut evals = 0usize;

    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    pts.push(x0.to_vec());
    for (i, &step) in steps.iter().enumerate() {
        let mut p = x0.to_vec();
        p[i] += step;
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| eval(p)).collect();
    evals += n + 1;

    let mut converged = false;
    while evals < opts.max_evals {
        let mut idx: Vec<usize> = (0..=n).collect();
        idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = idx.iter().map(|&i| pts[i].clone()).collect();
        vals = idx.iter().map(|&i| vals[i]).collect();

        let (best, worst) = (vals[0], vals[n]);
        if worst - best <= opts.rel_tol * best.abs() {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|j| pts[..n].iter().map(|p| p[j]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&pts[n])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = along(REFLECT);
        let fr = eval(&xr);
        evals += 1;
        if fr < vals[0] {
            let xe = along(EXPAND);
            let fe = eval(&xe);
            evals += 1;
            if fe < fr {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
        } else if fr < vals[n - 1] {
            pts[n] = xr;
            vals[n] = fr;
        } else {
            let (xc, fc) = if fr < vals[n] {
                let xc = along(CONTRACT);
                let fc = eval(&xc);
                (xc, fc)
            } else {
                let xc = along(-CONTRACT);
                let fc = eval(&xc);
                (xc, fc)
            };
            evals += 1;
            if fc < vals[n].min(fr) {
                pts[n] = xc;
                vals[n] = fc;
            } else {
                for i in 1..=n {
                    let shrunk: Vec<f64> = pts[0]
                        .iter()
                        .zip(&pts[i])
                        .map(|(b, p)| b + SHRINK * (p - b))
                        .collect();
                    vals[i] = eval(&shrunk);
                    pts[i] = shrunk;
                }
                evals += n;
            }
        }
    }

    let best = (0..=n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    SimplexResult {
        x: pts[best].clone(),
        f: vals[best],
        evals,
        converged,
    }
}

/// Minimizes `f` from `x0`. After the first run, each restart begins from
/// the best point found, jittered by a seeded uniform draw of ±`step`
/// (the final restart is unjittered), with a fresh simplex.
pub fn minimize<F: Fn(&[f64]) -> f64>(f: F, x0: &[f64], opts: &SimplexOptions) -> SimplexResult {
    if x0.is_empty() {
        return SimplexResult {
            x: Vec::new(),
            f: nan_to_inf(f(&[])),
            evals: 1,
            converged: true,
        };
    }
    let steps = vec![opts.step; x0.len()];
    let mut best = single_run(&f, x0, &steps, opts);
    let mut total = best.evals;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for r in 0..opts.restarts {
        let start: Vec<f64> = if r + 1 < opts.restarts {
            best.x
                .iter()
                .map(|x| x + opts.step * rng.random_range(-1.0..1.0))
                .collect()
        } else {
            best.x.clone()
        };
        let run = single_run(&f, &start, &steps, opts);
        total += run.evals;
        if run.f < best.f {
            best = run;
        } else {
            best.converged &= run.converged;
        }
    }
    best.evals = total;
    best
}
