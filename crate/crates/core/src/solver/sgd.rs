use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{package, SolveResult, SolverConfig};
use crate::constraints::LinearSystem;
use crate::error::Result;
use crate::model::{Backend, EntropyMode};
use crate::scalar::Real;

/// Row-action stochastic gradient descent on `sum_i (a_i . pi - b_i)^2`.
///
/// Each epoch visits the rows in a seeded random order and applies
/// `pi += -eta_i * 2 (a_i . pi - b_i) a_i`, clipping world coordinates to
/// `[0, 1]`. The per-row step is `min(eta, 1 / (2 |a_i|^2))` so no single row
/// update overshoots. Momentum acts on whole epochs: the displacement of a
/// sweep is added to `momentum` times the previous one, and the velocity is
/// reset whenever the max-row residual goes up.
///
/// Multiplier coordinates of augmented systems are never clipped. The best
/// iterate seen is returned; failure to reach `tol` is reported through
/// `converged`, not as an error.
pub fn solve_sgd<T: Real>(system: &LinearSystem<T>, config: &SolverConfig) -> Result<SolveResult<T>> {
    config.validate()?;
    let n = system.cols();
    let w = system.n_worlds;
    let lr = T::from_f64(config.learning_rate.unwrap_or(1.0 / w as f64));
    let half = T::from_f64(0.5);
    let two = T::from_f64(2.0);
    let momentum = T::from_f64(config.momentum);

    let rows: Vec<Vec<(usize, T)>> = (0..system.rows())
        .map(|i| {
            system.a.row(i).iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(j, v)| (j, *v)).collect()
        })
        .collect();
    let steps: Vec<T> = rows
        .iter()
        .map(|r| {
            let norm: T = r.iter().fold(T::zero(), |acc, (_, v)| acc + *v * *v);
            if norm.is_zero() {
                T::zero()
            } else {
                let cap = half / norm;
                if cap < lr {
                    cap
                } else {
                    lr
                }
            }
        })
        .collect();

    let clip = |x: &mut [T]| {
        if config.clip {
            x.iter_mut().take(w).for_each(|v| *v = clamp01(*v));
        }
    };
    let residual = |x: &[T]| -> f64 {
        rows.iter()
            .zip(&system.b)
            .map(|(r, b)| {
                let s = r.iter().fold(T::zero(), |acc, (j, v)| acc + *v * x[*j]);
                (s - *b).to_f64().abs()
            })
            .fold(0.0, f64::max)
    };

    let mut x = vec![T::zero(); n];
    let u = T::one() / T::from_usize(w);
    x.iter_mut().take(w).for_each(|v| *v = u);
    let mut velocity = vec![T::zero(); n];
    let mut order: Vec<usize> = (0..rows.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut best = x.clone();
    let mut best_res = residual(&x);
    let mut prev_res = best_res;
    let mut epochs = 0;
    while best_res >= config.tol && epochs < config.max_epochs {
        epochs += 1;
        order.shuffle(&mut rng);
        let start = x.clone();
        for &i in &order {
            if steps[i].is_zero() {
                continue;
            }
            let r = rows[i].iter().fold(T::zero(), |acc, (j, v)| acc + *v * x[*j]) - system.b[i];
            let coef = -(steps[i] * two * r);
            for (j, v) in &rows[i] {
                x[*j] += coef * *v;
                if config.clip && *j < w {
                    x[*j] = clamp01(x[*j]);
                }
            }
        }
        for j in 0..n {
            velocity[j] = (x[j] - start[j]) + momentum * velocity[j];
            x[j] = start[j] + velocity[j];
        }
        clip(&mut x);
        let res = residual(&x);
        if res < best_res {
            best_res = res;
            best.copy_from_slice(&x);
        }
        if res > prev_res {
            velocity.iter_mut().for_each(|v| *v = T::zero());
        }
        prev_res = res;
    }
    Ok(package(system, best, EntropyMode::None, Backend::Sgd, epochs, config.tol, None))
}

fn clamp01<T: Real>(v: T) -> T {
    if v < T::zero() {
        T::zero()
    } else if v > T::one() {
        T::one()
    } else {
        v
    }
}
