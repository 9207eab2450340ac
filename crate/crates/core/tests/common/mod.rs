//! Reference computations for tests. Everything here works from the raw
//! graph data (edges, μ, Ω) and shares no code with the library internals.
#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use plap::{DirichletFunction, Domain, VertexSet};

/// Whether exactly one endpoint of `(a, b)` lies in `s`.
fn crosses(s: &VertexSet, a: usize, b: usize) -> bool {
    s.contains(a) != s.contains(b)
}

pub fn naive_boundary(d: &Domain, s: &VertexSet) -> f64 {
    d.graph()
        .edges()
        .iter()
        .filter(|e| crosses(s, e.u, e.v))
        .map(|e| e.w)
        .sum()
}

pub fn naive_volume(d: &Domain, s: &VertexSet) -> f64 {
    s.iter().map(|v| d.graph().mu(v)).sum()
}

/// Minimum ratio over every nonempty subset of Ω, plus the subsets within
/// a relative `1e-12` of it.
pub fn brute_cheeger(d: &Domain) -> (f64, Vec<VertexSet>) {
    let omega: Vec<usize> = d.omega().iter().collect();
    let n = omega.len();
    let mut all = Vec::with_capacity((1 << n) - 1);
    for mask in 1u32..(1 << n) {
        let s: VertexSet = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| omega[i]).collect();
        let r = naive_boundary(d, &s) / naive_volume(d, &s);
        all.push((s, r));
    }
    let h = all.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
    let mut cuts: Vec<VertexSet> = all
        .into_iter()
        .filter(|(_, r)| *r <= h * (1.0 + 1e-12))
        .map(|(s, _)| s)
        .collect();
    cuts.sort();
    (h, cuts)
}

/// Value of `u` at graph vertex `v`, zero off Ω.
fn at(d: &Domain, u: &[f64], v: usize) -> f64 {
    d.position(v).map_or(0.0, |k| u[k])
}

/// `Σ_edges w |u(a) − u(b)|^p` straight from the edge list.
pub fn naive_energy(d: &Domain, u: &[f64], p: f64) -> f64 {
    d.graph()
        .edges()
        .iter()
        .map(|e| e.w * (at(d, u, e.u) - at(d, u, e.v)).abs().powf(p))
        .sum()
}

pub fn naive_norm_pow(d: &Domain, u: &[f64], p: f64) -> f64 {
    (0..d.len()).map(|k| d.mu(k) * u[k].abs().powf(p)).sum()
}

/// Smallest eigenpair of `K u = λ M u` with `K` the Dirichlet stiffness
/// matrix and `M = diag(μ)`, eigenvector positive with `Σ μ u² = 1`.
pub fn dense_linear_eigenpair(d: &Domain) -> (f64, Vec<f64>) {
    let n = d.len();
    let mut k = DMatrix::<f64>::zeros(n, n);
    for e in d.graph().edges() {
        match (d.position(e.u), d.position(e.v)) {
            (Some(a), Some(b)) => {
                k[(a, a)] += e.w;
                k[(b, b)] += e.w;
                k[(a, b)] -= e.w;
                k[(b, a)] -= e.w;
            }
            (Some(a), None) | (None, Some(a)) => k[(a, a)] += e.w,
            (None, None) => {}
        }
    }
    let s: Vec<f64> = (0..n).map(|i| 1.0 / d.mu(i).sqrt()).collect();
    let a = DMatrix::from_fn(n, n, |i, j| s[i] * k[(i, j)] * s[j]);
    let eig = SymmetricEigen::new(a);
    let (idx, lambda) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .unwrap();
    let mut v: Vec<f64> = (0..n).map(|i| s[i] * eig.eigenvectors[(i, idx)]).collect();
    if v.iter().sum::<f64>() < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    let norm = naive_norm_pow(d, &v, 2.0).sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    (lambda, v)
}

/// Central differences of `f` at `x` with step `h·max(1, |x_i|)`.
pub fn central_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    (0..x.len())
        .map(|i| {
            let step = h * x[i].abs().max(1.0);
            y[i] = x[i] + step;
            let plus = f(&y);
            y[i] = x[i] - step;
            let minus = f(&y);
            y[i] = x[i];
            (plus - minus) / (2.0 * step)
        })
        .collect()
}

pub fn sup(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn func(v: &[f64]) -> DirichletFunction {
    DirichletFunction::new(v.to_vec())
}
