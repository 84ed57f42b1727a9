//! Gradient-based minimizers used by the VQE driver: limited-memory BFGS
//! with a strong-Wolfe line search, and Adam.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// Gradient norm fell below tolerance.
    GradientNorm,
    /// Objective change stayed below tolerance for the whole patience window.
    EnergyPlateau,
    MaxIterations,
    /// The line search could not decrease the objective further.
    Stalled,
    /// A non-finite objective or gradient was produced.
    Diverged,
}

impl Status {
    pub fn converged(self) -> bool {
        matches!(self, Status::GradientNorm | Status::EnergyPlateau)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopRule {
    pub max_iterations: usize,
    pub gradient_norm_tol: f64,
    pub energy_change_tol: f64,
    pub patience: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub gradient_norm: f64,
    /// Objective after each iteration; entry 0 is the starting value.
    pub trace: Vec<f64>,
    pub status: Status,
    pub evaluations: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(x: &[f64], alpha: f64, d: &[f64]) -> Vec<f64> {
    x.iter().zip(d).map(|(a, b)| a + alpha * b).collect()
}

fn finite(f: f64, g: &[f64]) -> bool {
    f.is_finite() && g.iter().all(|v| v.is_finite())
}

/// Tracks the plateau counter shared by both minimizers.
struct Plateau {
    rule: StopRule,
    quiet: usize,
}

impl Plateau {
    fn update(&mut self, prev: f64, now: f64, gnorm: f64) -> Option<Status> {
        if gnorm < self.rule.gradient_norm_tol {
            return Some(Status::GradientNorm);
        }
        if (prev - now).abs() < self.rule.energy_change_tol {
            self.quiet += 1;
        } else {
            self.quiet = 0;
        }
        (self.quiet >= self.rule.patience).then_some(Status::EnergyPlateau)
    }
}

type Objective<'a> = dyn FnMut(&[f64]) -> Result<(f64, Vec<f64>)> + 'a;

struct Point {
    x: Vec<f64>,
    f: f64,
    g: Vec<f64>,
}

/// Minimizer of the cubic through `(a, fa, da)` and `(b, fb, db)`, if it lies strictly between them.
fn cubic_min(a: f64, fa: f64, da: f64, b: f64, fb: f64, db: f64) -> Option<f64> {
    let d1 = da + db - 3.0 * (fa - fb) / (a - b);
    let disc = d1 * d1 - da * db;
    if disc < 0.0 {
        return None;
    }
    let d2 = (b - a).signum() * disc.sqrt();
    let t = b - (b - a) * (db + d2 - d1) / (db - da + 2.0 * d2);
    (t.is_finite() && (t - a) * (t - b) < 0.0).then_some(t)
}

enum Search {
    Found(Point),
    Failed,
    NonFinite,
}

/// A trial step: point, step length and directional derivative.
struct Trial {
    p: Point,
    alpha: f64,
    slope: f64,
}

/// Strong-Wolfe line search along `d` (bracketing then zoom). When the zoom
/// runs out of budget, the best sufficient-decrease point is accepted.
fn wolfe_search(obj: &mut Objective, start: &Point, d: &[f64], alpha0: f64, evals: &mut usize) -> Result<Search> {
    const C1: f64 = 1e-4;
    const C2: f64 = 0.9;
    const MAX_EVALS: usize = 40;
    let d0 = dot(&start.g, d);
    let mut budget = MAX_EVALS;
    let mut probe = |alpha: f64, evals: &mut usize| -> Result<Option<Trial>> {
        let x = axpy(&start.x, alpha, d);
        let (f, g) = obj(&x)?;
        *evals += 1;
        if !finite(f, &g) {
            return Ok(None);
        }
        let slope = dot(&g, d);
        Ok(Some(Trial { p: Point { x, f, g }, alpha, slope }))
    };
    let armijo = |t: &Trial| t.p.f <= start.f + C1 * t.alpha * d0;
    let curvature = |t: &Trial| t.slope.abs() <= -C2 * d0;
    let origin = || Trial { p: Point { x: start.x.clone(), f: start.f, g: start.g.clone() }, alpha: 0.0, slope: d0 };

    // bracketing
    let mut prev = origin();
    let mut alpha = alpha0;
    let (mut lo, mut hi);
    loop {
        budget -= 1;
        let Some(t) = probe(alpha, evals)? else { return Ok(Search::NonFinite) };
        if !armijo(&t) || (prev.alpha > 0.0 && t.p.f >= prev.p.f) {
            (lo, hi) = (prev, t);
            break;
        }
        if curvature(&t) {
            return Ok(Search::Found(t.p));
        }
        if t.slope >= 0.0 {
            (lo, hi) = (t, prev);
            break;
        }
        if budget == 0 {
            return Ok(Search::Found(t.p));
        }
        alpha = 2.0 * t.alpha;
        prev = t;
    }

    // zoom: `lo` always satisfies sufficient decrease and has the lowest value seen
    while budget > 0 {
        budget -= 1;
        let (a, b) = (lo.alpha.min(hi.alpha), lo.alpha.max(hi.alpha));
        let width = b - a;
        if width <= 1e-14 * b.max(1e-300) {
            break;
        }
        let guess = cubic_min(lo.alpha, lo.p.f, lo.slope, hi.alpha, hi.p.f, hi.slope).unwrap_or(0.5 * (a + b));
        let alpha = guess.clamp(a + 0.1 * width, b - 0.1 * width);
        let Some(t) = probe(alpha, evals)? else { return Ok(Search::NonFinite) };
        if !armijo(&t) || t.p.f >= lo.p.f {
            hi = t;
        } else {
            if curvature(&t) {
                return Ok(Search::Found(t.p));
            }
            if t.slope * (hi.alpha - lo.alpha) >= 0.0 {
                hi = std::mem::replace(&mut lo, t);
            } else {
                lo = t;
            }
        }
    }
    if lo.alpha > 0.0 && lo.p.f < start.f {
        Ok(Search::Found(lo.p))
    } else {
        Ok(Search::Failed)
    }
}

/// Limited-memory BFGS with history `memory`.
pub fn lbfgs(obj: &mut Objective, x0: Vec<f64>, rule: StopRule, memory: usize) -> Result<Outcome> {
    let mut evals = 1;
    let (f, g) = obj(&x0)?;
    let mut cur = Point { x: x0, f, g };
    let mut trace = vec![f];
    let finish = |cur: Point, trace: Vec<f64>, status, evals| Outcome {
        gradient_norm: norm(&cur.g),
        x: cur.x,
        f: cur.f,
        trace,
        status,
        evaluations: evals,
    };
    if !finite(cur.f, &cur.g) {
        return Ok(finish(cur, trace, Status::Diverged, evals));
    }
    if norm(&cur.g) < rule.gradient_norm_tol {
        return Ok(finish(cur, trace, Status::GradientNorm, evals));
    }
    let mut plateau = Plateau { rule, quiet: 0 };
    let mut hist: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    for _ in 0..rule.max_iterations {
        // two-loop recursion
        let mut q: Vec<f64> = cur.g.clone();
        let mut alphas = Vec::with_capacity(hist.len());
        for (s, y, rho) in hist.iter().rev() {
            let a = rho * dot(s, &q);
            q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
            alphas.push(a);
        }
        let gamma = hist.back().map_or(1.0, |(s, y, _)| dot(s, y) / dot(y, y));
        q.iter_mut().for_each(|v| *v *= gamma);
        for ((s, y, rho), a) in hist.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &q);
            q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
        }
        let mut d: Vec<f64> = q.iter().map(|v| -v).collect();
        if dot(&d, &cur.g) >= 0.0 {
            hist.clear();
            d = cur.g.iter().map(|v| -v).collect();
        }
        let alpha0 = if hist.is_empty() { (1.0 / norm(&d)).min(1.0) } else { 1.0 };
        let mut found = wolfe_search(obj, &cur, &d, alpha0, &mut evals)?;
        if matches!(found, Search::Failed) && !hist.is_empty() {
            hist.clear();
            let sd: Vec<f64> = cur.g.iter().map(|v| -v).collect();
            found = wolfe_search(obj, &cur, &sd, (1.0 / norm(&sd)).min(1.0), &mut evals)?;
        }
        let next = match found {
            Search::Found(p) => p,
            Search::Failed => return Ok(finish(cur, trace, Status::Stalled, evals)),
            Search::NonFinite => return Ok(finish(cur, trace, Status::Diverged, evals)),
        };
        let s: Vec<f64> = next.x.iter().zip(&cur.x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = next.g.iter().zip(&cur.g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-14 * norm(&s) * norm(&y) {
            if hist.len() == memory {
                hist.pop_front();
            }
            hist.push_back((s, y, 1.0 / sy));
        }
        let prev = cur.f;
        cur = next;
        trace.push(cur.f);
        if let Some(status) = plateau.update(prev, cur.f, norm(&cur.g)) {
            return Ok(finish(cur, trace, status, evals));
        }
    }
    Ok(finish(cur, trace, Status::MaxIterations, evals))
}

/// Adam; returns the best point visited.
pub fn adam(obj: &mut Objective, x0: Vec<f64>, rule: StopRule, learning_rate: f64) -> Result<Outcome> {
    const B1: f64 = 0.9;
    const B2: f64 = 0.999;
    const EPS: f64 = 1e-12;
    let n = x0.len();
    let (mut m, mut v) = (vec![0.0; n], vec![0.0; n]);
    let mut x = x0;
    let (mut f, mut g) = obj(&x)?;
    let mut evals = 1;
    let mut trace = vec![f];
    let mut best = (x.clone(), f, norm(&g));
    let mut plateau = Plateau { rule, quiet: 0 };
    let mut status = Status::MaxIterations;
    if !finite(f, &g) {
        status = Status::Diverged;
    } else if norm(&g) < rule.gradient_norm_tol {
        status = Status::GradientNorm;
    } else {
        for t in 1..=rule.max_iterations {
            for k in 0..n {
                m[k] = B1 * m[k] + (1.0 - B1) * g[k];
                v[k] = B2 * v[k] + (1.0 - B2) * g[k] * g[k];
                let mh = m[k] / (1.0 - B1.powi(t as i32));
                let vh = v[k] / (1.0 - B2.powi(t as i32));
                x[k] -= learning_rate * mh / (vh.sqrt() + EPS);
            }
            let prev = f;
            (f, g) = obj(&x)?;
            evals += 1;
            if !finite(f, &g) {
                status = Status::Diverged;
                break;
            }
            trace.push(f);
            if f < best.1 {
                best = (x.clone(), f, norm(&g));
            }
            if let Some(s) = plateau.update(prev, f, norm(&g)) {
                status = s;
                break;
            }
        }
    }
    let (x, f, gradient_norm) = best;
    Ok(Outcome { x, f, gradient_norm, trace, status, evaluations: evals })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rule() -> StopRule {
        StopRule { max_iterations: 500, gradient_norm_tol: 1e-10, energy_change_tol: 1e-14, patience: 10 }
    }

    fn rosenbrock(x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let (a, b) = (x[0], x[1]);
        let f = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
        Ok((f, vec![-2.0 * (1.0 - a) - 400.0 * a * (b - a * a), 200.0 * (b - a * a)]))
    }

    #[test]
    fn lbfgs_solves_rosenbrock() {
        let out = lbfgs(&mut rosenbrock, vec![-1.2, 1.0], rule(), 10).unwrap();
        assert!(out.status.converged(), "{:?}", out.status);
        assert!((out.x[0] - 1.0).abs() < 1e-6 && (out.x[1] - 1.0).abs() < 1e-6);
        assert!(out.trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn lbfgs_quadratic_is_fast() {
        let diag = [1.0, 10.0, 100.0, 0.5];
        let mut q = |x: &[f64]| -> Result<(f64, Vec<f64>)> {
            Ok((x.iter().zip(&diag).map(|(a, d)| 0.5 * d * a * a).sum(), x.iter().zip(&diag).map(|(a, d)| d * a).collect()))
        };
        let out = lbfgs(&mut q, vec![1.0; 4], rule(), 10).unwrap();
        assert_eq!(out.status, Status::GradientNorm);
        assert!(out.trace.len() < 30);
    }

    #[test]
    fn adam_finds_cosine_minimum() {
        let mut f = |x: &[f64]| -> Result<(f64, Vec<f64>)> { Ok((x[0].cos(), vec![-x[0].sin()])) };
        let r = StopRule { max_iterations: 5000, gradient_norm_tol: 1e-8, energy_change_tol: 1e-15, patience: 10 };
        let out = adam(&mut f, vec![2.0], r, 0.05).unwrap();
        assert!((out.f + 1.0).abs() < 1e-8, "{}", out.f);
    }

    #[test]
    fn non_finite_start_is_divergence() {
        let mut f = |_: &[f64]| -> Result<(f64, Vec<f64>)> { Ok((f64::NAN, vec![0.0])) };
        assert_eq!(lbfgs(&mut f, vec![0.0], rule(), 5).unwrap().status, Status::Diverged);
        assert_eq!(adam(&mut f, vec![0.0], rule(), 0.1).unwrap().status, Status::Diverged);
    }

    #[test]
    fn non_finite_during_search_is_divergence() {
        // finite only at the start point
        let mut f = |x: &[f64]| -> Result<(f64, Vec<f64>)> {
            if x[0] == 3.0 {
                Ok((9.0, vec![6.0]))
            } else {
                Ok((f64::INFINITY, vec![0.0]))
            }
        };
        assert_eq!(lbfgs(&mut f, vec![3.0], rule(), 5).unwrap().status, Status::Diverged);
    }
}
