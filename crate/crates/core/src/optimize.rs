//! Small derivative-free and quasi-Newton minimizers over fixed-size
//! parameter vectors.

use alloc::collections::VecDeque;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Minimum<const D: usize> {
    pub x: [f64; D],
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Nelder–Mead simplex search. Stops when the spread of function values
/// across the simplex drops below `ftol`.
pub fn nelder_mead<const D: usize>(
    mut f: impl FnMut(&[f64; D]) -> f64,
    x0: [f64; D],
    step: [f64; D],
    ftol: f64,
    max_iter: usize,
) -> Minimum<D> {
    let eval = |f: &mut dyn FnMut(&[f64; D]) -> f64, x: &[f64; D]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut simplex: alloc::vec::Vec<([f64; D], f64)> = (0..=D)
        .map(|k| {
            let mut x = x0;
            if k > 0 {
                x[k - 1] += step[k - 1];
            }
            let v = eval(&mut f, &x);
            (x, v)
        })
        .collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if (simplex[D].1 - simplex[0].1).abs() <= ftol {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = [0.0; D];
        for (x, _) in &simplex[..D] {
            for i in 0..D {
                centroid[i] += x[i] / D as f64;
            }
        }
        let along = |t: f64, worst: &[f64; D]| -> [f64; D] {
            core::array::from_fn(|i| centroid[i] + t * (worst[i] - centroid[i]))
        };
        let worst = simplex[D].0;
        let reflected = along(-1.0, &worst);
        let fr = eval(&mut f, &reflected);
        if fr < simplex[0].1 {
            let expanded = along(-2.0, &worst);
            let fe = eval(&mut f, &expanded);
            simplex[D] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
        } else if fr < simplex[D - 1].1 {
            simplex[D] = (reflected, fr);
        } else {
            let (t, bound) = if fr < simplex[D].1 {
                (-0.5, fr)
            } else {
                (0.5, simplex[D].1)
            };
            let contracted = along(t, &worst);
            let fc = eval(&mut f, &contracted);
            if fc < bound {
                simplex[D] = (contracted, fc);
            } else {
                let best = simplex[0].0;
                for (x, v) in simplex.iter_mut().skip(1) {
                    *x = core::array::from_fn(|i| best[i] + 0.5 * (x[i] - best[i]));
                    *v = eval(&mut f, x);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    Minimum {
        x: simplex[0].0,
        value: simplex[0].1,
        iterations,
        converged,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LbfgsOptions {
    /// Stop when the gradient norm falls below this.
    pub gtol: f64,
    /// Stop when an accepted step changes the objective by at most
    /// `ftol * max(1, |f|)`.
    pub ftol: f64,
    pub max_iter: usize,
    pub memory: usize,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        Self {
            gtol: 1e-8,
            ftol: 1e-12,
            max_iter: 10_000,
            memory: 8,
        }
    }
}

fn dot<const D: usize>(a: &[f64; D], b: &[f64; D]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Limited-memory BFGS with Armijo backtracking. `fg` writes the gradient
/// into its second argument and returns the objective; non-finite values
/// are treated as infeasible and rejected by the line search.
pub fn lbfgs<const D: usize>(
    mut fg: impl FnMut(&[f64; D], &mut [f64; D]) -> f64,
    x0: [f64; D],
    opts: &LbfgsOptions,
) -> Minimum<D> {
    let mut x = x0;
    let mut g = [0.0; D];
    let mut f = fg(&x, &mut g);
    let mut history: VecDeque<([f64; D], [f64; D], f64)> = VecDeque::with_capacity(opts.memory);
    let mut iterations = 0;
    if !f.is_finite() {
        return Minimum {
            x,
            value: f,
            iterations,
            converged: false,
        };
    }

    while iterations < opts.max_iter {
        if dot(&g, &g).sqrt() < opts.gtol {
            return Minimum {
                x,
                value: f,
                iterations,
                converged: true,
            };
        }
        iterations += 1;

        // two-loop recursion
        let mut q = g;
        let mut alphas = [0.0; 64];
        for (k, (s, y, rho)) in history.iter().enumerate().rev() {
            let a = rho * dot(s, &q);
            alphas[k] = a;
            for i in 0..D {
                q[i] -= a * y[i];
            }
        }
        let gamma = history
            .back()
            .map(|(s, y, _)| dot(s, y) / dot(y, y))
            .unwrap_or_else(|| 1.0 / dot(&g, &g).sqrt().max(1.0));
        for qi in q.iter_mut() {
            *qi *= gamma;
        }
        for (k, (s, y, rho)) in history.iter().enumerate() {
            let b = rho * dot(y, &q);
            for i in 0..D {
                q[i] += s[i] * (alphas[k] - b);
            }
        }
        let mut d = q.map(|v| -v);
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            history.clear();
            d = g.map(|v| -v / dot(&g, &g).sqrt().max(1.0));
            slope = dot(&g, &d);
        }

        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..80 {
            let xn: [f64; D] = core::array::from_fn(|i| x[i] + step * d[i]);
            let mut gn = [0.0; D];
            let fnew = fg(&xn, &mut gn);
            if fnew.is_finite() && fnew <= f + 1e-4 * step * slope {
                accepted = Some((xn, fnew, gn));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fnew, gn)) = accepted else {
            if history.is_empty() {
                // no representable descent along -g: stationary to working precision
                return Minimum {
                    x,
                    value: f,
                    iterations,
                    converged: true,
                };
            }
            history.clear();
            continue;
        };

        let s: [f64; D] = core::array::from_fn(|i| xn[i] - x[i]);
        let y: [f64; D] = core::array::from_fn(|i| gn[i] - g[i]);
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            if history.len() == opts.memory.min(64) {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }
        let change = (f - fnew).abs();
        x = xn;
        f = fnew;
        g = gn;
        if change <= opts.ftol * f.abs().max(1.0) {
            return Minimum {
                x,
                value: f,
                iterations,
                converged: true,
            };
        }
    }
    Minimum {
        x,
        value: f,
        iterations,
        converged: false,
    }
}
