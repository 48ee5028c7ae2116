//! Shared helpers for the integration suites: seeded random instances and an
//! independent plain weighted-lasso reference.

// each test target compiles this module and uses a subset of it
#![allow(dead_code)]

use rand::Rng as _;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use screenlasso::problem::Problem;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Standard normal via Box-Muller.
pub fn normal(rng: &mut ChaCha20Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (core::f64::consts::TAU * u2).cos()
}

/// Dense instance with a planted sparse signal plus noise.
pub fn random_problem(rng: &mut ChaCha20Rng, n: usize, d: usize, noise: f64) -> Problem {
    let mut data = vec![0.0; n * d];
    for v in data.iter_mut() {
        *v = normal(rng);
    }
    let p = (d / 10).max(1);
    let mut w_true = vec![0.0; d];
    for _ in 0..p {
        let j = rng.gen_range(0..d);
        w_true[j] = normal(rng) + 0.5;
    }
    let mut y = vec![0.0; n];
    for (j, &wj) in w_true.iter().enumerate() {
        if wj != 0.0 {
            for i in 0..n {
                y[i] += wj * data[j * n + i];
            }
        }
    }
    for yi in y.iter_mut() {
        *yi += noise * normal(rng);
    }
    Problem::dense(n, d, data, y).unwrap()
}

/// Non-negative weights on the scale of the correlations, with a fraction of
/// exact zeros (the flat regions of MCP/SCAD make zero weights routine).
pub fn random_weights(rng: &mut ChaCha20Rng, prob: &Problem, zero_frac: f64) -> Vec<f64> {
    let scale = prob
        .xty()
        .iter()
        .fold(0.0_f64, |a, &b| a.max(b.abs()))
        .max(1e-12);
    (0..prob.n_cols())
        .map(|_| {
            if rng.gen::<f64>() < zero_frac {
                0.0
            } else {
                scale * rng.gen_range(0.15..0.75)
            }
        })
        .collect()
}

pub fn random_center(rng: &mut ChaCha20Rng, d: usize, scale: f64) -> Vec<f64> {
    (0..d).map(|_| scale * normal(rng)).collect()
}

/// Plain weighted lasso solved by cyclic coordinate descent, no proximal
/// term and no screening: `min 1/2 ||y - Xw||^2 + sum_j lam_j |w_j|`.
/// Runs until an epoch changes nothing beyond `1e-14` or the cap is hit.
/// Kept independent of the library solver on purpose: its own storage, its
/// own update arithmetic.
pub fn weighted_lasso_reference(prob: &Problem, weights: &[f64], max_epochs: usize) -> Vec<f64> {
    let (n, d) = (prob.n_rows(), prob.n_cols());
    let rows: Vec<Vec<f64>> = (0..n).map(|i| prob.row(i)).collect();
    let cols: Vec<Vec<f64>> = (0..d)
        .map(|j| (0..n).map(|i| rows[i][j]).collect())
        .collect();
    let norms_sq: Vec<f64> = cols.iter().map(|c| c.iter().map(|x| x * x).sum()).collect();

    let mut w = vec![0.0; d];
    let mut r = prob.y().to_vec();
    for _ in 0..max_epochs {
        let mut max_delta = 0.0_f64;
        for j in 0..d {
            if norms_sq[j] == 0.0 {
                continue;
            }
            let t = cols[j].iter().zip(&r).map(|(x, ri)| x * ri).sum::<f64>() + norms_sq[j] * w[j];
            let new = t.signum() * (t.abs() - weights[j]).max(0.0) / norms_sq[j];
            if new != w[j] {
                let delta = w[j] - new;
                for (ri, x) in r.iter_mut().zip(&cols[j]) {
                    *ri += delta * x;
                }
                max_delta = max_delta.max(delta.abs());
                w[j] = new;
            }
        }
        if max_delta <= 1e-14 {
            break;
        }
    }
    w
}
