//! The p-Dirichlet energy, the Dirichlet p-Laplacian and the first-eigenpair
//! solver for `p > 1`.
//!
//! Conventions: `E_p(u) = Σ_{{x,y}∈E} w_xy |u(y) − u(x)|^p` counts every
//! unordered edge once, functions vanish off `Ω`, and the norm is
//! μ-weighted. With these, `Ẽ_p(𝟙_D) = |∂D|_w / |D|_μ` for every `D ⊆ Ω`.
//!
//! # Solver
//!
//! [`first_eigenpair`] minimizes the Rayleigh quotient over positive
//! functions. For `p < 2` the kernel `|t|^{p−2} t` is replaced by
//! `φ_ε(t) = (t² + ε²)^{(p−2)/2} t` and `ε` walks down a decreasing schedule.
//! Each stage is solved as follows:
//!
//! 1. On the first stage, projected descent on the p-sphere: a step along the
//!    tangential gradient of the regularized energy with Armijo backtracking,
//!    pointwise absolute value, renormalization.
//! 2. A damped Newton iteration on the regularized eigen-system
//!    `Σ_y w φ_ε(u_x − u_y) = λ μ_x φ_ε(u_x)`, `Σ μ_x u_x^p = 1`, restricted
//!    to positive iterates.
//! 3. Between stages, a tangent predictor `du/dε` carries the solution to the
//!    next `ε`, so near-equal values keep their `O(ε)` separation.
//!
//! Near `p = 1` the regularized Hessian has entries of order `ε^{p−2}` on
//! edges with nearly equal endpoint values, which stalls any first-order
//! method; Newton steps are insensitive to that scaling.
//!
//! Cold starts below `p = 1.5` first solve at `p = 1.5, 1.25, …` and warm
//! start from there. If the last `ε` stage misses the tolerance only by
//! rounding noise (one ulp of `u` times the kernel slope `ε^{p−2}`), the
//! last stage that met it is returned instead; `epsilon_final` says which.
//!
//! The reported eigenvalue is `Ẽ_p(u)` of the final iterate, and the reported
//! residual is [`eigen_residual`] at the last `ε`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::{is_connected, p_norm_pow, DirichletFunction, Domain};

/// `|t|^{p−2} t`, or its regularization `(t² + ε²)^{(p−2)/2} t` when `eps > 0`.
/// At `t = 0` the unregularized kernel takes its limit value `0`.
pub fn kernel(t: f64, p: f64, eps: f64) -> f64 {
    if eps > 0.0 {
        (t * t + eps * eps).powf(0.5 * (p - 2.0)) * t
    } else if t == 0.0 {
        0.0
    } else {
        t.signum() * t.abs().powf(p - 1.0)
    }
}

fn kernel_derivative(t: f64, p: f64, eps: f64) -> f64 {
    if eps > 0.0 {
        let s = t * t + eps * eps;
        s.powf(0.5 * (p - 4.0)) * ((p - 1.0) * t * t + eps * eps)
    } else {
        (p - 1.0) * t.abs().powf(p - 2.0)
    }
}

fn kernel_eps_derivative(t: f64, p: f64, eps: f64) -> f64 {
    (p - 2.0) * eps * (t * t + eps * eps).powf(0.5 * (p - 4.0)) * t
}

/// Sum whose value does not depend on the order of the terms, so vertices
/// exchanged by a graph automorphism receive bitwise identical updates.
fn symmetric_sum(terms: &mut [f64]) -> f64 {
    terms.sort_unstable_by(f64::total_cmp);
    terms.iter().sum()
}

fn check_p(p: f64, min: f64, strict: bool) -> Result<()> {
    let ok = p.is_finite() && if strict { p > min } else { p >= min };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidP(p))
    }
}

/// `E_p(u)`, each unordered edge counted once; edges outside `Ω` contribute 0.
pub fn dirichlet_energy(d: &Domain, u: &DirichletFunction, p: f64) -> Result<f64> {
    check_p(p, 1.0, false)?;
    d.check_function(u)?;
    Ok(energy(d, u.values(), p))
}

fn energy(d: &Domain, u: &[f64], p: f64) -> f64 {
    let inner: f64 = d
        .inner_edges()
        .iter()
        .map(|&(a, b, w)| w * (u[a] - u[b]).abs().powf(p))
        .sum();
    let outer: f64 = d
        .outer_edges()
        .iter()
        .map(|&(a, w)| w * u[a].abs().powf(p))
        .sum();
    inner + outer
}

/// The modified energy `Ẽ_p(u) = E_p(u) / |u|_p^p`.
pub fn rayleigh_quotient(d: &Domain, u: &DirichletFunction, p: f64) -> Result<f64> {
    check_p(p, 1.0, false)?;
    d.check_function(u)?;
    if u.is_zero() {
        return Err(Error::ZeroFunction);
    }
    Ok(energy(d, u.values(), p) / p_norm_pow(d, u.values(), p))
}

/// `E_ε(u) = Σ w [(t² + ε²)^{p/2} − ε^p]` over edges touching `Ω`, `t` the
/// difference across the edge. Equals `E_p(u)` at `eps = 0`.
pub fn regularized_energy(d: &Domain, u: &DirichletFunction, p: f64, eps: f64) -> Result<f64> {
    check_p(p, 1.0, false)?;
    d.check_function(u)?;
    Ok(reg_energy(d, u.values(), p, eps))
}

fn reg_energy(d: &Domain, u: &[f64], p: f64, eps: f64) -> f64 {
    if eps == 0.0 {
        return energy(d, u, p);
    }
    let e2 = eps * eps;
    let floor = eps.powf(p);
    let psi = |t: f64| (t * t + e2).powf(0.5 * p) - floor;
    let inner: f64 = d
        .inner_edges()
        .iter()
        .map(|&(a, b, w)| w * psi(u[a] - u[b]))
        .sum();
    let outer: f64 = d.outer_edges().iter().map(|&(a, w)| w * psi(u[a])).sum();
    inner + outer
}

/// Gradient of [`regularized_energy`]: `p Σ_y w_xy φ_ε(u_x − u_y)`.
pub fn regularized_energy_gradient(
    d: &Domain,
    u: &DirichletFunction,
    p: f64,
    eps: f64,
) -> Result<Vec<f64>> {
    check_p(p, 1.0, false)?;
    d.check_function(u)?;
    Ok(reg_gradient(d, u.values(), p, eps))
}

fn reg_gradient(d: &Domain, u: &[f64], p: f64, eps: f64) -> Vec<f64> {
    let mut terms = Vec::new();
    (0..d.len())
        .map(|k| {
            terms.clear();
            terms.extend(
                d.local_neighbors(k)
                    .map(|(y, w)| w * kernel(u[k] - y.map_or(0.0, |j| u[j]), p, eps)),
            );
            p * symmetric_sum(&mut terms)
        })
        .collect()
}

/// `Δ_p u(x) = (1/μ_x) Σ_{y∼x} w_xy φ(u(y) − u(x))` for `x ∈ Ω`, with the
/// regularized kernel when `eps > 0`.
pub fn apply_p_laplacian(
    d: &Domain,
    u: &DirichletFunction,
    p: f64,
    eps: f64,
) -> Result<DirichletFunction> {
    check_p(p, 1.0, true)?;
    d.check_function(u)?;
    if eps.is_nan() || eps < 0.0 {
        return Err(Error::InvalidOptions(format!("regularization {eps} is negative")));
    }
    Ok(DirichletFunction::new(laplacian(d, u.values(), p, eps)))
}

fn laplacian(d: &Domain, u: &[f64], p: f64, eps: f64) -> Vec<f64> {
    let mut terms = Vec::new();
    (0..d.len())
        .map(|k| {
            terms.clear();
            terms.extend(
                d.local_neighbors(k)
                    .map(|(y, w)| w * kernel(y.map_or(0.0, |j| u[j]) - u[k], p, eps)),
            );
            symmetric_sum(&mut terms) / d.mu(k)
        })
        .collect()
}

/// `max_{x∈Ω} |−Δ_p u(x) − λ φ(u(x))|`, using the regularized kernel on both
/// sides when `eps > 0`.
pub fn eigen_residual(
    d: &Domain,
    lambda: f64,
    u: &DirichletFunction,
    p: f64,
    eps: f64,
) -> Result<f64> {
    let lap = apply_p_laplacian(d, u, p, eps)?;
    if u.is_zero() {
        return Err(Error::ZeroFunction);
    }
    Ok(residual_values(lap.values(), lambda, u.values(), p, eps)
        .fold(0.0, |m, r| m.max(r.abs())))
}

fn residual_values<'a>(
    lap: &'a [f64],
    lambda: f64,
    u: &'a [f64],
    p: f64,
    eps: f64,
) -> impl Iterator<Item = f64> + 'a {
    lap.iter()
        .zip(u)
        .map(move |(l, &x)| -l - lambda * kernel(x, p, eps))
}

/// Options for [`first_eigenpair`].
#[derive(Clone, Debug)]
pub struct SolverOptions {
    /// Target for the residual ∞-norm; `None` selects `1e-9` for `p ≥ 1.5`
    /// and `1e-6` below.
    pub tolerance: Option<f64>,
    /// Budget shared by descent steps and Newton steps.
    pub max_iterations: usize,
    /// Strictly decreasing regularization levels used when `p < 2`.
    pub epsilon_schedule: Vec<f64>,
    pub initial_guess: Option<DirichletFunction>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tolerance: None,
            max_iterations: 5000,
            epsilon_schedule: (2..=10).map(|k| 10f64.powi(-k)).collect(),
            initial_guess: None,
        }
    }
}

impl SolverOptions {
    pub fn tolerance_for(&self, p: f64) -> f64 {
        self.tolerance
            .unwrap_or(if p >= 1.5 { 1e-9 } else { 1e-6 })
    }

    pub fn with_initial_guess(mut self, u: DirichletFunction) -> Self {
        self.initial_guess = Some(u);
        self
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = Some(tol);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(t) = self.tolerance {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidOptions(format!("tolerance {t} must be positive")));
            }
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidOptions("max_iterations must be positive".into()));
        }
        let s = &self.epsilon_schedule;
        if s.is_empty() {
            return Err(Error::InvalidOptions("empty regularization schedule".into()));
        }
        if s.iter().any(|&e| !(e > 0.0 && e.is_finite())) || s.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidOptions(
                "regularization schedule must be positive and strictly decreasing".into(),
            ));
        }
        Ok(())
    }
}

/// A computed first eigenpair.
#[derive(Clone, Debug)]
pub struct Eigenpair {
    pub p: f64,
    /// `Ẽ_p(u)` of the returned function.
    pub lambda: f64,
    /// Positive on `Ω`, `|u|_p = 1`.
    pub u: DirichletFunction,
    pub residual: f64,
    pub iterations: usize,
    /// Regularization of the last stage (0 when `p ≥ 2`).
    pub epsilon_final: f64,
}

const DESCENT_LIMIT: usize = 400;
const NEWTON_LIMIT: usize = 60;
const ARMIJO: f64 = 1e-4;

/// First eigenpair of the Dirichlet p-Laplacian on a connected domain.
///
/// Fails with [`Error::NoConvergence`], carrying the last iterate, when the
/// residual is above tolerance once the iteration budget is spent or Newton
/// stalls.
pub fn first_eigenpair(d: &Domain, p: f64, opts: &SolverOptions) -> Result<Eigenpair> {
    check_p(p, 1.0, true)?;
    opts.validate()?;
    if !is_connected(d) {
        return Err(Error::DisconnectedDomain);
    }
    if opts.initial_guess.is_none() && p < HOMOTOPY_BELOW {
        return solve_by_homotopy(d, p, opts);
    }
    solve_direct(d, p, opts)
}

fn solve_direct(d: &Domain, p: f64, opts: &SolverOptions) -> Result<Eigenpair> {
    let n = d.len();
    let tol = opts.tolerance_for(p);
    let mut u = match &opts.initial_guess {
        Some(g) => {
            d.check_function(g)?;
            if g.is_zero() {
                return Err(Error::ZeroFunction);
            }
            g.abs().into_values()
        }
        None => vec![1.0; n],
    };
    normalize(d, &mut u, p);
    floor_positive(&mut u);

    let schedule: Vec<f64> = if p < 2.0 {
        opts.epsilon_schedule.clone()
    } else {
        vec![0.0]
    };
    let mut state = SolverState {
        d,
        p,
        iterations: 0,
        budget: opts.max_iterations,
    };
    let mut lambda = state.multiplier(&u, schedule[0]);
    let mut previous: Option<f64> = None;
    // last stage that met the tolerance, kept in case a later one cannot
    let mut fallback: Option<Eigenpair> = None;
    let mut last = None;
    for &eps in &schedule {
        match previous {
            None => {
                state.descend(&mut u, eps);
                lambda = state.multiplier(&u, eps);
            }
            Some(prev) => state.predict(&mut u, &mut lambda, prev, eps),
        }
        state.newton(&mut u, &mut lambda, eps);
        previous = Some(eps);
        let pair = finish(d, p, &u, eps, state.iterations)?;
        if pair.residual <= tol && pair.u.min() > 0.0 {
            fallback = Some(pair.clone());
        }
        last = Some(pair);
    }
    let pair = last.expect("nonempty schedule");
    if pair.residual <= tol && pair.u.min() > 0.0 {
        return Ok(pair);
    }
    // At small ε and p near 1 the kernel slope ε^{p−2} turns one ulp of u
    // into a residual of order tol. Failing there is not meaningful, so fall
    // back to the last ε that did converge.
    match fallback {
        Some(mut good) if pair.residual <= rounding_floor(d, &pair) => {
            good.iterations = pair.iterations;
            Ok(good)
        }
        _ => Err(Error::NoConvergence(Box::new(pair))),
    }
}

/// Cold starts below this exponent go through [`solve_by_homotopy`].
const HOMOTOPY_BELOW: f64 = 1.5;

/// Near `p = 1` the quotient is close to piecewise linear and a uniform
/// start can slide towards the indicator of a set that is not optimal.
/// Solving first at `p = 1 + 2^{-k}`, `k = 1, 2, …` while that stays above
/// `p`, each warm-started from the last, avoids this. The iteration budget
/// is shared by the whole chain.
fn solve_by_homotopy(d: &Domain, p: f64, opts: &SolverOptions) -> Result<Eigenpair> {
    let mut used = 0;
    let mut guess: Option<DirichletFunction> = None;
    let mut k = 1;
    loop {
        let q = 1.0 + 2f64.powi(-k);
        // one iteration stays reserved for the target exponent
        let spare = opts.max_iterations.saturating_sub(used + 1);
        if q <= p || spare == 0 {
            break;
        }
        let step = SolverOptions {
            max_iterations: spare,
            initial_guess: guess.take(),
            ..opts.clone()
        };
        let e = match solve_direct(d, q, &step) {
            Ok(e) => e,
            Err(Error::NoConvergence(e)) => *e,
            Err(other) => return Err(other),
        };
        used += e.iterations;
        guess = Some(e.u);
        k += 1;
    }
    let last = SolverOptions {
        max_iterations: opts.max_iterations - used,
        initial_guess: guess,
        ..opts.clone()
    };
    let bump = |mut e: Eigenpair| {
        e.iterations += used;
        e
    };
    match solve_direct(d, p, &last) {
        Ok(e) => Ok(bump(e)),
        Err(Error::NoConvergence(e)) => Err(Error::NoConvergence(Box::new(bump(*e)))),
        Err(other) => Err(other),
    }
}

fn finish(d: &Domain, p: f64, u: &[f64], eps: f64, iterations: usize) -> Result<Eigenpair> {
    let mut u = u.to_vec();
    normalize(d, &mut u, p);
    let u = DirichletFunction::new(u);
    let lambda = rayleigh_quotient(d, &u, p)?;
    let residual = eigen_residual(d, lambda, &u, p, eps)?;
    Ok(Eigenpair {
        p,
        lambda,
        u,
        residual,
        iterations,
        epsilon_final: eps,
    })
}

/// Residual size attributable to rounding `u` at the kernel's steepest slope.
fn rounding_floor(d: &Domain, e: &Eigenpair) -> f64 {
    if e.epsilon_final == 0.0 || e.p >= 2.0 {
        return 0.0;
    }
    let slope = e.epsilon_final.powf(e.p - 2.0);
    let top = e.u.max();
    (0..d.len())
        .map(|k| {
            let w: f64 = d.local_neighbors(k).map(|(_, w)| w).sum();
            16.0 * f64::EPSILON * top * slope * w / d.mu(k)
        })
        .fold(0.0, f64::max)
}

fn normalize(d: &Domain, u: &mut [f64], p: f64) {
    let norm = p_norm_pow(d, u, p).powf(1.0 / p);
    for x in u.iter_mut() {
        *x /= norm;
    }
}

fn floor_positive(u: &mut [f64]) {
    let top = u.iter().copied().fold(0.0, f64::max);
    for x in u.iter_mut() {
        *x = x.max(1e-12 * top);
    }
}

struct SolverState<'a> {
    d: &'a Domain,
    p: f64,
    iterations: usize,
    budget: usize,
}

impl SolverState<'_> {
    fn remaining(&self) -> usize {
        self.budget.saturating_sub(self.iterations)
    }

    /// `(1/μ_x) Σ_y w φ_ε(u_x − u_y) − λ φ_ε(u_x)` and `Σ μ u^p − 1`.
    fn residual(&self, u: &[f64], lambda: f64, eps: f64) -> (Vec<f64>, f64) {
        let lap = laplacian(self.d, u, self.p, eps);
        let r = residual_values(&lap, lambda, u, self.p, eps).collect();
        (r, p_norm_pow(self.d, u, self.p) - 1.0)
    }

    fn merit(&self, u: &[f64], lambda: f64, eps: f64) -> f64 {
        let (r, g) = self.residual(u, lambda, eps);
        r.iter().map(|x| x * x).sum::<f64>() + g * g
    }

    /// Least-squares multiplier for the current iterate.
    fn multiplier(&self, u: &[f64], eps: f64) -> f64 {
        let lap = laplacian(self.d, u, self.p, eps);
        let (mut num, mut den) = (0.0, 0.0);
        for (k, (&l, &x)) in lap.iter().zip(u).enumerate() {
            let mu = self.d.mu(k);
            let phi = kernel(x, self.p, eps);
            num += -l * phi * mu;
            den += phi * phi * mu;
        }
        if den > 0.0 {
            num / den
        } else {
            0.0
        }
    }

    fn descend(&mut self, u: &mut Vec<f64>, eps: f64) {
        let d = self.d;
        let p = self.p;
        let mut f = reg_energy(d, u, p, eps);
        let mut step = 1.0;
        let mut stalled = 0;
        for _ in 0..DESCENT_LIMIT.min(self.remaining()) {
            self.iterations += 1;
            let g = reg_gradient(d, u, p, eps);
            let normal: Vec<f64> = u
                .iter()
                .enumerate()
                .map(|(k, &x)| p * d.mu(k) * kernel(x, p, 0.0))
                .collect();
            let nn: f64 = normal.iter().map(|x| x * x).sum();
            let gn: f64 = g.iter().zip(&normal).map(|(a, b)| a * b).sum();
            let tangent: Vec<f64> = g
                .iter()
                .zip(&normal)
                .map(|(a, b)| a - gn / nn * b)
                .collect();
            let gg: f64 = tangent.iter().map(|x| x * x).sum();
            if gg.sqrt() <= 1e-13 * (1.0 + f) {
                break;
            }
            let mut accepted = None;
            while step > 1e-16 {
                let mut v: Vec<f64> = u
                    .iter()
                    .zip(&tangent)
                    .map(|(x, t)| (x - step * t).abs())
                    .collect();
                if v.iter().all(|&x| x == 0.0) {
                    step *= 0.5;
                    continue;
                }
                normalize(d, &mut v, p);
                let fv = reg_energy(d, &v, p, eps);
                if fv <= f - ARMIJO * step * gg {
                    accepted = Some((v, fv));
                    break;
                }
                step *= 0.5;
            }
            let Some((v, fv)) = accepted else { break };
            if f - fv <= 1e-14 * f.abs() {
                stalled += 1;
            } else {
                stalled = 0;
            }
            *u = v;
            f = fv;
            step *= 2.0;
            if stalled >= 5 {
                break;
            }
        }
        floor_positive(u);
    }

    /// Jacobian of `(residual, normalization)` with respect to `(u, λ)`.
    fn jacobian(&self, u: &[f64], lambda: f64, eps: f64) -> DMatrix<f64> {
        let d = self.d;
        let p = self.p;
        let n = d.len();
        let mut jac = DMatrix::zeros(n + 1, n + 1);
        for k in 0..n {
            let inv_mu = 1.0 / d.mu(k);
            let mut diag = -lambda * kernel_derivative(u[k], p, eps);
            for (y, w) in d.local_neighbors(k) {
                let t = u[k] - y.map_or(0.0, |j| u[j]);
                let a = w * kernel_derivative(t, p, eps) * inv_mu;
                diag += a;
                if let Some(j) = y {
                    jac[(k, j)] -= a;
                }
            }
            jac[(k, k)] += diag;
            jac[(k, n)] = -kernel(u[k], p, eps);
            jac[(n, k)] = p * d.mu(k) * u[k].abs().powf(p - 1.0);
        }
        jac
    }

    fn newton(&mut self, u: &mut Vec<f64>, lambda: &mut f64, eps: f64) {
        let n = self.d.len();
        let mut merit = self.merit(u, *lambda, eps);
        for _ in 0..NEWTON_LIMIT.min(self.remaining()) {
            if merit == 0.0 {
                break;
            }
            self.iterations += 1;
            let (r, g) = self.residual(u, *lambda, eps);
            let rhs = DVector::from_iterator(n + 1, r.iter().copied().chain([g]).map(|x| -x));
            let Some(step) = self.jacobian(u, *lambda, eps).lu().solve(&rhs) else {
                break;
            };
            let mut alpha = 1.0;
            let mut accepted = false;
            while alpha > 1e-12 {
                let trial: Vec<f64> = u.iter().zip(step.iter()).map(|(x, s)| x + alpha * s).collect();
                if trial.iter().all(|&x| x > 0.0) {
                    let tl = *lambda + alpha * step[n];
                    let m = self.merit(&trial, tl, eps);
                    if m <= (1.0 - ARMIJO * alpha) * merit {
                        let size = step.iter().take(n).fold(0.0f64, |a, s| a.max(s.abs())) * alpha;
                        *u = trial;
                        *lambda = tl;
                        merit = m;
                        accepted = size > 1e-15 * u.iter().copied().fold(0.0, f64::max);
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !accepted {
                break;
            }
        }
    }

    /// First-order continuation of a solution at `from` to regularization `to`.
    fn predict(&mut self, u: &mut [f64], lambda: &mut f64, from: f64, to: f64) {
        let d = self.d;
        let p = self.p;
        let n = d.len();
        let mut rhs = DVector::zeros(n + 1);
        let mut terms = Vec::new();
        for k in 0..n {
            terms.clear();
            terms.extend(d.local_neighbors(k).map(|(y, w)| {
                w * kernel_eps_derivative(u[k] - y.map_or(0.0, |j| u[j]), p, from)
            }));
            let dr = symmetric_sum(&mut terms) / d.mu(k)
                - *lambda * kernel_eps_derivative(u[k], p, from);
            rhs[k] = -dr;
        }
        let Some(tangent) = self.jacobian(u, *lambda, from).lu().solve(&rhs) else {
            return;
        };
        let mut delta = to - from;
        for _ in 0..60 {
            if u.iter().zip(tangent.iter()).all(|(x, t)| x + delta * t > 0.0) {
                for (x, t) in u.iter_mut().zip(tangent.iter()) {
                    *x += delta * t;
                }
                *lambda += delta * tangent[n];
                return;
            }
            delta *= 0.5;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fig1::build_fig1;
    use crate::graph::WeightedGraph;
    use std::sync::Arc;

    fn star(mu: f64, weights: &[f64]) -> Domain {
        let mut b = WeightedGraph::builder().vertex("x", mu);
        for (i, &w) in weights.iter().enumerate() {
            b = b.vertex(format!("z{i}"), 1.0).edge("x", format!("z{i}"), w);
        }
        Domain::from_ids(Arc::new(b.build().unwrap()), &["x"]).unwrap()
    }

    fn fig1_profile(t: f64) -> DirichletFunction {
        DirichletFunction::new(vec![1.0, 1.0, t, t])
    }

    #[test]
    fn fig1_energies() {
        let d = build_fig1();
        let ind = DirichletFunction::indicator(&d, &d.subset(&["x1", "x2"]).unwrap()).unwrap();
        for p in [1.0, 1.3, 2.0, 4.5] {
            assert_eq!(dirichlet_energy(&d, &ind, p).unwrap(), 2.0);
            assert_eq!(rayleigh_quotient(&d, &ind, p).unwrap(), 0.5);
        }
        assert_eq!(dirichlet_energy(&d, &DirichletFunction::zeros(4), 1.7).unwrap(), 0.0);
        let t = 0.25;
        let e = dirichlet_energy(&d, &fig1_profile(t), 2.0).unwrap();
        assert!((e - (2.0 * (1.0 - t) * (1.0 - t) + 6.0 * t * t)).abs() < 1e-15);
        assert!(matches!(
            dirichlet_energy(&d, &ind, 0.9),
            Err(Error::InvalidP(_))
        ));
    }

    #[test]
    fn rayleigh_is_scale_invariant_and_rejects_zero() {
        let d = build_fig1();
        let u = DirichletFunction::new(vec![0.3, 0.9, 0.1, 0.4]);
        let a = rayleigh_quotient(&d, &u, 1.7).unwrap();
        let b = rayleigh_quotient(&d, &u.scaled(3.0), 1.7).unwrap();
        assert!((a - b).abs() < 1e-14 * a);
        assert!(matches!(
            rayleigh_quotient(&d, &DirichletFunction::zeros(4), 2.0),
            Err(Error::ZeroFunction)
        ));
    }

    #[test]
    fn single_vertex_quantities() {
        let d = star(2.0, &[1.0, 0.5, 1.5]);
        let u = DirichletFunction::new(vec![1.0]);
        for p in [1.0, 1.5, 2.0, 3.0] {
            assert_eq!(rayleigh_quotient(&d, &u, p).unwrap(), 1.5);
        }
        for p in [1.5, 2.0, 3.0] {
            let lap = apply_p_laplacian(&d, &u, p, 0.0).unwrap();
            assert_eq!(lap.get(0), -1.5);
            assert_eq!(eigen_residual(&d, 1.5, &u, p, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn p2_is_the_linear_laplacian() {
        let d = build_fig1();
        let u = DirichletFunction::new(vec![0.2, 0.7, 0.5, 0.1]);
        let lap = apply_p_laplacian(&d, &u, 2.0, 0.0).unwrap();
        // x1 ~ x2, y1; y1 ~ x1 and three boundary vertices
        assert!((lap.get(0) - ((0.7 - 0.2) + (0.5 - 0.2)) / 2.0).abs() < 1e-15);
        assert!((lap.get(2) - ((0.2 - 0.5) - 3.0 * 0.5) / 4.0).abs() < 1e-15);
    }

    #[test]
    fn fig1_laplacian_at_x1() {
        let d = build_fig1();
        let t = 0.4;
        for p in [1.25, 1.5, 2.0, 3.0] {
            let lap = apply_p_laplacian(&d, &fig1_profile(t), p, 0.0).unwrap();
            let expected = 0.5 * (1.0f64 - t).powf(p - 2.0) * (t - 1.0);
            assert!((lap.get(0) - expected).abs() < 1e-15);
            assert_eq!(lap.get(0), lap.get(1));
        }
    }

    #[test]
    fn residual_at_the_p2_fig1_solution() {
        let d = build_fig1();
        let t = (3f64.sqrt() - 1.0) / 2.0;
        let u = fig1_profile(t);
        let u = u.scaled(1.0 / crate::graph::p_norm(&d, &u, 2.0).unwrap());
        let r = eigen_residual(&d, (1.0 - t) / 2.0, &u, 2.0, 0.0).unwrap();
        assert!(r <= 1e-10, "{r}");
        let wrong = eigen_residual(&d, (1.0 - t) / 2.0 + 1.0, &u, 2.0, 0.0).unwrap();
        assert!(wrong >= u.min());
    }

    #[test]
    fn solver_single_vertex() {
        let d = star(2.0, &[1.0, 0.5, 1.5]);
        for p in [1.1, 1.5, 2.0, 3.0] {
            let e = first_eigenpair(&d, p, &SolverOptions::default()).unwrap();
            assert!((e.lambda - 1.5).abs() < 1e-15);
            assert!((e.u.get(0) - 2f64.powf(-1.0 / p)).abs() < 1e-15);
        }
    }

    #[test]
    fn solver_fig1_p2() {
        let d = build_fig1();
        let e = first_eigenpair(&d, 2.0, &SolverOptions::default()).unwrap();
        let t = (3f64.sqrt() - 1.0) / 2.0;
        assert!((e.lambda - (1.0 - t) / 2.0).abs() < 1e-12);
        assert!((e.u.get(2) / e.u.get(0) - t).abs() < 1e-10);
        assert!(e.residual <= 1e-9);
    }

    #[test]
    fn solver_rejects_bad_input() {
        let d = build_fig1();
        assert!(matches!(
            first_eigenpair(&d, 1.0, &SolverOptions::default()),
            Err(Error::InvalidP(_))
        ));
        let disconnected = Domain::from_ids(d.shared_graph(), &["y1", "y2"]).unwrap();
        assert!(matches!(
            first_eigenpair(&disconnected, 2.0, &SolverOptions::default()),
            Err(Error::DisconnectedDomain)
        ));
        let bad = SolverOptions {
            epsilon_schedule: vec![1e-3, 1e-2],
            ..SolverOptions::default()
        };
        assert!(matches!(
            first_eigenpair(&d, 1.5, &bad),
            Err(Error::InvalidOptions(_))
        ));
    }

    #[test]
    fn exhausted_budget_reports_state() {
        let d = build_fig1();
        let opts = SolverOptions {
            max_iterations: 1,
            ..SolverOptions::default()
        };
        match first_eigenpair(&d, 1.2, &opts) {
            Err(Error::NoConvergence(state)) => {
                assert_eq!(state.iterations, 1);
                assert!(state.residual > 1e-6);
            }
            other => panic!("expected no-convergence, got {other:?}"),
        }
    }
}
