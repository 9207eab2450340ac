//! Seeded random Dirichlet domains for property checks and the test corpus.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{DirichletFunction, Domain, WeightedGraph};

/// Shape parameters of [`random_domain`].
#[derive(Clone, Debug)]
pub struct RandomDomainConfig {
    /// Number of vertices in `Ω`.
    pub omega_size: usize,
    /// Probability of each non-tree edge inside `Ω`.
    pub extra_edge_probability: f64,
    /// Maximum number of boundary vertices (at least one is always added).
    pub max_boundary: usize,
    pub weight_range: (f64, f64),
    pub measure_range: (f64, f64),
}

impl RandomDomainConfig {
    pub fn with_size(omega_size: usize) -> Self {
        RandomDomainConfig {
            omega_size,
            extra_edge_probability: 0.3,
            max_boundary: 3,
            weight_range: (0.5, 2.0),
            measure_range: (0.5, 2.0),
        }
    }
}

/// A connected random domain: a random spanning tree on `Ω` plus extra
/// edges, and a few boundary vertices attached to random vertices of `Ω`.
pub fn random_domain<R: Rng>(rng: &mut R, config: &RandomDomainConfig) -> Domain {
    let n = config.omega_size.max(1);
    let (wlo, whi) = config.weight_range;
    let (mlo, mhi) = config.measure_range;
    let inner = |k: usize| format!("o{k:03}");
    let outer = |k: usize| format!("b{k:03}");

    let mut builder = WeightedGraph::builder();
    for k in 0..n {
        builder = builder.vertex(inner(k), rng.random_range(mlo..=mhi));
    }
    let mut tree = std::collections::HashSet::new();
    for k in 1..n {
        let j = rng.random_range(0..k);
        tree.insert((j, k));
        builder = builder.edge(inner(j), inner(k), rng.random_range(wlo..=whi));
    }
    for j in 0..n {
        for k in j + 1..n {
            if !tree.contains(&(j, k)) && rng.random_bool(config.extra_edge_probability) {
                builder = builder.edge(inner(j), inner(k), rng.random_range(wlo..=whi));
            }
        }
    }
    let boundary = rng.random_range(1..=config.max_boundary.max(1));
    for b in 0..boundary {
        builder = builder.vertex(outer(b), 1.0);
        let attach = rng.random_range(1..=n.min(3));
        let mut targets: Vec<usize> = Vec::new();
        while targets.len() < attach {
            let k = rng.random_range(0..n);
            if !targets.contains(&k) {
                targets.push(k);
            }
        }
        for k in targets {
            builder = builder.edge(outer(b), inner(k), rng.random_range(wlo..=whi));
        }
    }
    // an edge between boundary vertices never enters a Dirichlet energy
    if boundary >= 2 && rng.random_bool(0.5) {
        builder = builder.edge(outer(0), outer(1), 1.0);
    }
    let graph = builder.build().expect("generated graph is simple");
    let omega: Vec<String> = (0..n).map(inner).collect();
    Domain::from_ids(Arc::new(graph), &omega).expect("generated domain has a boundary")
}

/// `count` random domains with `|Ω|` drawn from `2..=max_omega`, reproducible
/// from `seed`.
pub fn corpus(seed: u64, count: usize, max_omega: usize) -> Vec<Domain> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let size = rng.random_range(2..=max_omega.max(2));
            random_domain(&mut rng, &RandomDomainConfig::with_size(size))
        })
        .collect()
}

/// A random nonnegative function on `d`; roughly a third of the values are
/// zeroed and some are duplicated so that level sets are nontrivial.
pub fn random_nonnegative<R: Rng>(rng: &mut R, d: &Domain) -> DirichletFunction {
    let mut values: Vec<f64> = (0..d.len())
        .map(|_| {
            if rng.random_bool(0.3) {
                0.0
            } else {
                rng.random_range(0.0..1.0)
            }
        })
        .collect();
    for k in 1..values.len() {
        if rng.random_bool(0.2) {
            values[k] = values[rng.random_range(0..k)];
        }
    }
    if values.iter().all(|&x| x == 0.0) {
        values[0] = 1.0;
    }
    DirichletFunction::new(values)
}

/// A random nonzero function on `d` taking both signs.
pub fn random_signed<R: Rng>(rng: &mut R, d: &Domain) -> DirichletFunction {
    let mut values: Vec<f64> = (0..d.len())
        .map(|_| {
            if rng.random_bool(0.25) {
                0.0
            } else {
                rng.random_range(-1.0..1.0)
            }
        })
        .collect();
    if values.iter().all(|&x| x == 0.0) {
        values[0] = -0.5;
    }
    DirichletFunction::new(values)
}

/// A random function on `d` with values in `[0.1, 1]`.
pub fn random_positive<R: Rng>(rng: &mut R, d: &Domain) -> DirichletFunction {
    DirichletFunction::new((0..d.len()).map(|_| rng.random_range(0.1..=1.0)).collect())
}
