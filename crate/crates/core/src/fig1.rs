//! A domain whose `p → 1` limit is a two-level function.
//!
//! `Ω = {x1, x2, y1, y2}` with `μ = 2` on the x-vertices and `μ = 4` on the
//! y-vertices, the path `y1 – x1 – x2 – y2` inside `Ω`, and three pendant
//! boundary vertices on each `y` (`b1..b3` on `y1`, `b4..b6` on `y2`). All
//! edge weights are 1; boundary measures are 1 and play no role.
//!
//! The Cheeger constant is `1/2` with cuts `{x1,x2}`, `{x1,x2,y1}`,
//! `{x1,x2,y2}` and `Ω`. By the swap symmetry `x1 ↔ x2`, `y1 ↔ y2`, the first
//! eigenfunction is proportional to `(1, 1, t, t)`, and the eigen-equation
//! reduces to the scalar equation
//!
//! ```text
//! f(x, q) = 2(1 − x)^q + (1/x − 1)^q − 3 = 0,     q = p − 1,
//! ```
//!
//! whose root `x_q` is `t_p`, with `λ_{1,p} = (1 − t_p)^{p−1} / 2`. As
//! `q → 0`, `x_q` decreases to `x̂`, the real root of `(1 − x)^3 = x`, so the
//! normalized eigenfunctions tend to `(1, 1, x̂, x̂) / (4 + 8x̂)`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{p_norm, DirichletFunction, Domain, WeightedGraph};
use crate::spectral::{first_eigenpair, SolverOptions};

/// The example domain.
pub fn build_fig1() -> Domain {
    let mut b = WeightedGraph::builder()
        .vertex("x1", 2.0)
        .vertex("x2", 2.0)
        .vertex("y1", 4.0)
        .vertex("y2", 4.0)
        .edge("y1", "x1", 1.0)
        .edge("x1", "x2", 1.0)
        .edge("x2", "y2", 1.0);
    for i in 1..=6 {
        let id = format!("b{i}");
        let anchor = if i <= 3 { "y1" } else { "y2" };
        b = b.vertex(id.clone(), 1.0).edge(anchor, id, 1.0);
    }
    let g = b.build().expect("valid example graph");
    Domain::from_ids(Arc::new(g), &["x1", "x2", "y1", "y2"]).expect("valid example domain")
}

/// `f(x, q) = 2(1 − x)^q + (1/x − 1)^q − 3` for `x ∈ (0, 1]`.
///
/// Evaluated as `2 expm1(q ln(1 − x)) + expm1(q ln(1/x − 1))`, which is the
/// same quantity without the cancellation of the constant terms at small `q`.
pub fn f_eval(x: f64, q: f64) -> Result<f64> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::OutOfDomain { x });
    }
    if x == 1.0 {
        return Ok(-3.0);
    }
    let a = 1.0 - x;
    let b = 1.0 / x - 1.0;
    Ok(2.0 * (q * a.ln()).exp_m1() + (q * b.ln()).exp_m1())
}

/// The root of the scalar equation and the quantities built from it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalarReduction {
    pub q: f64,
    pub x_q: f64,
    /// `1 − x_q`
    pub a: f64,
    /// `1/x_q − 1`
    pub b: f64,
    pub f_value: f64,
}

const BRACKET_LO: f64 = 1e-12;
const BRACKET_HI: f64 = 1.0 - 1e-12;
const BISECTION_STEPS: usize = 200;

/// Bisection for `f(·, q) = 0` on `[1e-12, 1 − 1e-12]`, stopping once the
/// bracket is narrower than `tol`. `f(·, q)` is decreasing, so the bracket
/// must have `f > 0` on the left and `f < 0` on the right.
pub fn solve_xq(q: f64, tol: f64) -> Result<ScalarReduction> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::InvalidP(q + 1.0));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidOptions(format!("tolerance {tol} must be positive")));
    }
    let (mut lo, mut hi) = (BRACKET_LO, BRACKET_HI);
    let (f_lo, f_hi) = (f_eval(lo, q)?, f_eval(hi, q)?);
    if !(f_lo > 0.0 && f_hi < 0.0) {
        return Err(Error::BracketFailure {
            left: lo,
            f_left: f_lo,
            right: hi,
            f_right: f_hi,
        });
    }
    for _ in 0..BISECTION_STEPS {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f_eval(mid, q)?;
        if fm > 0.0 {
            lo = mid;
        } else if fm < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            hi = mid;
        }
    }
    let x_q = 0.5 * (lo + hi);
    Ok(ScalarReduction {
        q,
        x_q,
        a: 1.0 - x_q,
        b: 1.0 / x_q - 1.0,
        f_value: f_eval(x_q, q)?,
    })
}

/// Bracket width used by [`reduced_eigenpair`].
pub const ROOT_TOLERANCE: f64 = 1e-14;

/// `x̂ = 1 − ∛((√93 + 9)/18) + ∛((√93 − 9)/18)`, the real root of `(1 − x)^3 = x`.
pub fn xhat_closed_form() -> f64 {
    let s = 93f64.sqrt();
    let x = 1.0 - ((s + 9.0) / 18.0).cbrt() + ((s - 9.0) / 18.0).cbrt();
    debug_assert!(((1.0 - x).powi(3) - x).abs() <= 1e-12);
    x
}

/// The symmetric first eigenpair from the scalar reduction.
#[derive(Clone, Debug)]
pub struct ReducedPair {
    pub p: f64,
    pub lambda: f64,
    pub t: f64,
    /// `(1, 1, t, t)` on `(x1, x2, y1, y2)`.
    pub v: DirichletFunction,
}

impl ReducedPair {
    /// `v / |v|_p`.
    pub fn normalized(&self, d: &Domain) -> DirichletFunction {
        let norm = p_norm(d, &self.v, self.p).expect("p > 1");
        self.v.scaled(1.0 / norm)
    }
}

pub fn reduced_eigenpair(p: f64) -> Result<ReducedPair> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidP(p));
    }
    let root = solve_xq(p - 1.0, ROOT_TOLERANCE)?;
    let t = root.x_q;
    Ok(ReducedPair {
        p,
        lambda: 0.5 * (1.0 - t).powf(p - 1.0),
        t,
        v: DirichletFunction::new(vec![1.0, 1.0, t, t]),
    })
}

/// The normalized limit `(1, 1, x̂, x̂) / (4 + 8x̂)`.
pub fn limit_function() -> DirichletFunction {
    let x = xhat_closed_form();
    DirichletFunction::new(vec![1.0, 1.0, x, x]).scaled(1.0 / (4.0 + 8.0 * x))
}

/// Whether `f(x, q) ≥ ln(a²b)·q` at every sampled `q`, with `a = 1 − x`,
/// `b = 1/x − 1`. The comparison allows a few ulps of rounding.
pub fn convexity_lower_bound_check(x: f64, q_samples: &[f64]) -> bool {
    if !(x > 0.0 && x < 1.0) {
        return false;
    }
    let a = 1.0 - x;
    let b = 1.0 / x - 1.0;
    let slope = (a * a * b).ln();
    q_samples.iter().all(|&q| match f_eval(x, q) {
        Ok(f) => f - slope * q >= -4.0 * f64::EPSILON * (f.abs() + (slope * q).abs()),
        Err(_) => false,
    })
}

/// Comparison of the general solver with the reduced pair at one `p`.
#[derive(Clone, Debug)]
pub struct CrossCheck {
    pub p: f64,
    pub lambda_solver: f64,
    pub lambda_reduced: f64,
    /// ∞-distance between the normalized eigenfunctions.
    pub u_distance: f64,
    pub residual: f64,
}

impl CrossCheck {
    pub fn passes(&self, u_tol: f64, lambda_tol: f64) -> bool {
        self.u_distance <= u_tol && (self.lambda_solver - self.lambda_reduced).abs() <= lambda_tol
    }
}

/// Runs the general solver on [`build_fig1`] at each `p` (warm-starting in
/// the given order) and compares with [`reduced_eigenpair`].
pub fn cross_validate(p_values: &[f64], opts: &SolverOptions) -> Result<Vec<CrossCheck>> {
    let d = build_fig1();
    let mut warm: Option<DirichletFunction> = None;
    let mut out = Vec::with_capacity(p_values.len());
    for &p in p_values {
        let mut o = opts.clone();
        if o.initial_guess.is_none() {
            o.initial_guess = warm.clone();
        }
        let e = first_eigenpair(&d, p, &o)?;
        let r = reduced_eigenpair(p)?;
        out.push(CrossCheck {
            p,
            lambda_solver: e.lambda,
            lambda_reduced: r.lambda,
            u_distance: e.u.sup_distance(&r.normalized(&d)),
            residual: e.residual,
        });
        warm = Some(e.u);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cheeger::cheeger_constant;
    use crate::graph::{boundary_weight, volume};
    use crate::spectral::eigen_residual;

    #[test]
    fn construction() {
        let d = build_fig1();
        assert_eq!(volume(&d, d.omega()).unwrap(), 12.0);
        let y1 = d.graph().vertex_set(&["y1"]).unwrap();
        assert_eq!(boundary_weight(d.graph(), &y1), 4.0);
        let r = cheeger_constant(&d).unwrap();
        assert_eq!(r.h, 0.5);
        assert_eq!(r.cuts.len(), 4);
        assert_eq!(d.omega_ids(), vec!["x1", "x2", "y1", "y2"]);
    }

    #[test]
    fn f_values() {
        assert_eq!(f_eval(1.0, 0.7).unwrap(), -3.0);
        assert!((f_eval(0.5, 1.0).unwrap() + 1.0).abs() < 1e-15);
        for x in [0.1, 0.4, 0.9] {
            assert!(f_eval(x, 1e-12).unwrap().abs() < 1e-10);
        }
        assert!(matches!(f_eval(0.0, 1.0), Err(Error::OutOfDomain { .. })));
        assert!(matches!(f_eval(1.5, 1.0), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn root_at_q1_is_the_quadratic_root() {
        let r = solve_xq(1.0, 1e-14).unwrap();
        assert!((r.x_q - (3f64.sqrt() - 1.0) / 2.0).abs() < 1e-13);
        assert!(r.f_value.abs() < 1e-12);
    }

    #[test]
    fn roots_decrease_toward_xhat() {
        let xhat = xhat_closed_form();
        let mut prev = f64::INFINITY;
        for k in 0..=20 {
            let x = solve_xq(2f64.powi(-k), 1e-14).unwrap().x_q;
            assert!(x >= xhat - 1e-12);
            assert!(x <= prev + 1e-14);
            prev = x;
        }
        assert!((prev - xhat).abs() < 1e-4);
    }

    #[test]
    fn xhat_identities() {
        let x = xhat_closed_form();
        assert!((x - 0.31767).abs() < 5e-6);
        assert!(((1.0 - x).powi(3) - x).abs() <= 1e-12);
        let (a, b) = (1.0 - x, 1.0 / x - 1.0);
        assert!((a * a * b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reduced_pair_solves_the_full_equation() {
        let d = build_fig1();
        let r = reduced_eigenpair(2.0).unwrap();
        assert!((r.t - 0.36603).abs() < 1e-5);
        assert!((r.lambda - 0.316987).abs() < 1e-6);
        for p in [1.5, 2.0, 3.0] {
            let r = reduced_eigenpair(p).unwrap();
            assert!(eigen_residual(&d, r.lambda, &r.v, p, 0.0).unwrap() <= 1e-9);
        }
    }

    #[test]
    fn limit_vector() {
        let l = limit_function();
        let expected = [0.15287, 0.15287, 0.04856, 0.04856];
        for (a, b) in l.values().iter().zip(expected) {
            assert!((a - b).abs() < 5e-6);
        }
        let near = reduced_eigenpair(1.0 + 2f64.powi(-30)).unwrap();
        assert!(near.normalized(&build_fig1()).sup_distance(&l) < 1e-6);
    }

    #[test]
    fn convexity_bound() {
        let qs: Vec<f64> = (1..=20).map(|k| 0.1 * k as f64).collect();
        assert!(convexity_lower_bound_check(0.2, &qs));
        assert!(qs.iter().all(|&q| f_eval(0.2, q).unwrap() > 0.0));
        assert!(convexity_lower_bound_check(xhat_closed_form(), &qs));
        assert!(convexity_lower_bound_check(0.5, &qs));
        assert!(!convexity_lower_bound_check(0.0, &qs));
    }
}
