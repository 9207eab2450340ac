//! The `p = 1` side: superlevel sets, the co-area identity, `λ_{1,1} = h(Ω)`,
//! and the decomposition of a nonnegative function into nested level sets.
//!
//! For `g ≥ 0` on `Ω` with distinct values `0 = a_0 < a_1 < … < a_M`, the
//! superlevel sets `Ω_σ = {g > σ}` are constant on each `[a_i, a_{i+1})`, so
//! the co-area integral `∫_0^∞ |∂Ω_σ|_w dσ` is the finite sum
//! `Σ (a_{i+1} − a_i) |∂Ω_{a_i}|_w`, and it equals `E_1(g)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cheeger::{cheeger_constant, exact_ratio, nested_chain_check, CheegerReport};
use crate::error::{Error, Result};
use crate::graph::{boundary_weight, DirichletFunction, Domain, VertexSet};
use crate::random::random_signed;
use crate::spectral::{dirichlet_energy, rayleigh_quotient};

fn check_nonnegative(d: &Domain, u: &DirichletFunction) -> Result<()> {
    d.check_function(u)?;
    match u.values().iter().position(|&x| x.is_nan() || x < 0.0) {
        Some(k) => Err(Error::NegativeValues(d.id(k).to_owned())),
        None => Ok(()),
    }
}

/// `Ω_σ = {x ∈ Ω : u(x) > σ}` for a nonnegative `u`.
pub fn superlevel_set(d: &Domain, u: &DirichletFunction, sigma: f64) -> Result<VertexSet> {
    check_nonnegative(d, u)?;
    Ok(d.set_from_positions((0..d.len()).filter(|&k| u.get(k) > sigma)))
}

/// The co-area sum `Σ_{i<M} (a_{i+1} − a_i) |∂Ω_{a_i}|_w` over the distinct
/// values of `u` (with `a_0 = 0`).
pub fn coarea_total(d: &Domain, u: &DirichletFunction) -> Result<f64> {
    check_nonnegative(d, u)?;
    let mut levels: Vec<f64> = u.values().to_vec();
    levels.push(0.0);
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let mut total = 0.0;
    for pair in levels.windows(2) {
        let set = superlevel_set(d, u, pair[0])?;
        total += (pair[1] - pair[0]) * boundary_weight(d.graph(), &set);
    }
    Ok(total)
}

/// Outcome of checking `λ_{1,1}(Ω) = h(Ω)` both ways.
#[derive(Clone, Debug)]
pub struct Lambda11Report {
    pub h: f64,
    /// `min_D Ẽ_1(𝟙_D)` evaluated through the energy.
    pub min_indicator_quotient: f64,
    /// The minimizing indicator attains `h` in exact arithmetic.
    pub indicator_exact: bool,
    pub samples: usize,
    /// Smallest `Ẽ_1(u)` over the random samples.
    pub min_sample_quotient: f64,
    pub holds: bool,
}

/// Lower-bound slack for the random-sample half of the check.
pub const LAMBDA11_SLACK: f64 = 1e-12;

/// Checks that (a) the smallest `Ẽ_1` over all indicators equals `h(Ω)`
/// exactly and (b) `Ẽ_1(u) ≥ h(Ω) − 1e-12` for `samples` random signed `u`.
/// Sample `i` draws from stream `i` of a ChaCha generator seeded with `seed`.
pub fn lambda11_report(d: &Domain, samples: usize, seed: u64) -> Result<Lambda11Report> {
    let cheeger = cheeger_constant(d)?;
    let n = d.len();
    let (min_q, argmin) = (1u64..1u64 << n)
        .into_par_iter()
        .map(|mask| {
            let s = d.set_from_positions((0..n).filter(|k| mask >> k & 1 == 1));
            let ind = DirichletFunction::indicator(d, &s).expect("subset of the domain");
            let q = rayleigh_quotient(d, &ind, 1.0).expect("nonzero indicator");
            (q, mask)
        })
        .reduce(
            || (f64::INFINITY, 0),
            |a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
        );
    let best_set = d.set_from_positions((0..n).filter(|k| argmin >> k & 1 == 1));
    let indicator_exact = exact_ratio(d, &best_set) == cheeger.h_exact;

    let min_sample = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let u = random_signed(&mut rng, d);
            rayleigh_quotient(d, &u, 1.0).expect("nonzero sample")
        })
        .reduce(|| f64::INFINITY, f64::min);
    let holds = indicator_exact && min_sample >= cheeger.h - LAMBDA11_SLACK;
    Ok(Lambda11Report {
        h: cheeger.h,
        min_indicator_quotient: min_q,
        indicator_exact,
        samples,
        min_sample_quotient: min_sample,
        holds,
    })
}

/// Seed used by [`verify_lambda11_equals_h`].
pub const DEFAULT_SEED: u64 = 0x5eed;

pub fn verify_lambda11_equals_h(d: &Domain, samples: usize) -> Result<bool> {
    Ok(lambda11_report(d, samples, DEFAULT_SEED)?.holds)
}

/// `u ≈ Σ_n c_n 𝟙_{A_n}` with `A_1 ⊋ A_2 ⊋ … ⊋ A_N`.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    /// `c_1, …, c_N`, all positive.
    pub coefficients: Vec<f64>,
    /// `A_1, …, A_N`, largest first.
    pub sets: Vec<VertexSet>,
    /// `0 = a_0 < a_1 < … < a_N`, the clustered values.
    pub levels: Vec<f64>,
}

impl Decomposition {
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// `Σ_n c_n 𝟙_{A_n}`.
    pub fn reconstruct(&self, d: &Domain) -> DirichletFunction {
        let mut values = vec![0.0; d.len()];
        for (c, set) in self.coefficients.iter().zip(&self.sets) {
            for v in set.iter() {
                if let Some(k) = d.position(v) {
                    values[k] += c;
                }
            }
        }
        DirichletFunction::new(values)
    }
}

/// Clusters the values of `u` into levels and returns the nested superlevel
/// sets of the clustered function.
///
/// Sorted values are grouped greedily while they stay within `delta · max u`
/// of the smallest value of the group; a group is represented by the
/// midpoint of its range, and values within `delta · max u` of zero are
/// treated as zero. The reconstruction error is at most `delta · max u`.
/// With `delta = 0` the levels are the distinct values of `u`.
pub fn decompose_limit(d: &Domain, u: &DirichletFunction, delta: f64) -> Result<Decomposition> {
    check_nonnegative(d, u)?;
    if u.is_zero() {
        return Err(Error::ZeroFunction);
    }
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::InvalidOptions(format!("clustering tolerance {delta} is invalid")));
    }
    let top = u.max();
    let width = delta * top;
    let mut order: Vec<usize> = (0..d.len()).collect();
    order.sort_by(|&a, &b| u.get(a).total_cmp(&u.get(b)).then(a.cmp(&b)));

    // level index per position; 0 is the zero level
    let mut level_of = vec![0usize; d.len()];
    let mut levels = vec![0.0];
    let mut group: Vec<usize> = Vec::new();
    let close_group = |group: &mut Vec<usize>, levels: &mut Vec<f64>, level_of: &mut [usize]| {
        if let (Some(&first), Some(&last)) = (group.first(), group.last()) {
            levels.push(0.5 * (u.get(first) + u.get(last)));
            for &k in group.iter() {
                level_of[k] = levels.len() - 1;
            }
            group.clear();
        }
    };
    for &k in &order {
        let x = u.get(k);
        if x <= width {
            continue;
        }
        if let Some(&first) = group.first() {
            if x - u.get(first) > width {
                close_group(&mut group, &mut levels, &mut level_of);
            }
        }
        group.push(k);
    }
    close_group(&mut group, &mut levels, &mut level_of);

    let coefficients = levels.windows(2).map(|w| w[1] - w[0]).collect();
    let sets = (1..levels.len())
        .map(|n| d.set_from_positions((0..d.len()).filter(|&k| level_of[k] >= n)))
        .collect();
    Ok(Decomposition {
        coefficients,
        sets,
        levels,
    })
}

/// One level set examined by [`structure_report`].
#[derive(Clone, Debug)]
pub struct LevelCheck {
    pub set: VertexSet,
    pub ratio: f64,
    pub is_cheeger_cut: bool,
}

/// Detailed outcome of [`verify_eigenfunction_structure`].
#[derive(Clone, Debug)]
pub struct StructureReport {
    pub h: f64,
    /// `Ẽ_1(u)`.
    pub rayleigh: f64,
    pub rayleigh_matches: bool,
    pub levels: Vec<LevelCheck>,
    pub nested: bool,
    pub decomposition: Decomposition,
}

impl StructureReport {
    pub fn holds(&self) -> bool {
        self.rayleigh_matches && self.nested && self.levels.iter().all(|l| l.is_cheeger_cut)
    }
}

pub fn structure_report(d: &Domain, u: &DirichletFunction, delta: f64) -> Result<StructureReport> {
    let cheeger = cheeger_constant(d)?;
    structure_report_with(d, u, delta, &cheeger)
}

pub(crate) fn structure_report_with(
    d: &Domain,
    u: &DirichletFunction,
    delta: f64,
    cheeger: &CheegerReport,
) -> Result<StructureReport> {
    let decomposition = decompose_limit(d, u, delta)?;
    let rayleigh = rayleigh_quotient(d, u, 1.0)?;
    let levels = decomposition
        .sets
        .iter()
        .map(|s| {
            Ok(LevelCheck {
                set: s.clone(),
                ratio: boundary_weight(d.graph(), s) / crate::graph::volume(d, s)?,
                is_cheeger_cut: cheeger.is_cheeger_cut(d, s, 0.0)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StructureReport {
        h: cheeger.h,
        rayleigh,
        rayleigh_matches: (rayleigh - cheeger.h).abs() <= delta,
        nested: nested_chain_check(&decomposition.sets),
        levels,
        decomposition,
    })
}

/// Whether `Ẽ_1(u) = h(Ω)` within `delta`, every set of
/// `decompose_limit(u, delta)` is a Cheeger cut, and the sets are nested.
pub fn verify_eigenfunction_structure(d: &Domain, u: &DirichletFunction, delta: f64) -> Result<bool> {
    Ok(structure_report(d, u, delta)?.holds())
}

/// `E_1(u)`; the co-area identity says this equals [`coarea_total`].
pub fn total_variation(d: &Domain, u: &DirichletFunction) -> Result<f64> {
    dirichlet_energy(d, u, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fig1::{build_fig1, limit_function, xhat_closed_form};
    use crate::graph::WeightedGraph;
    use std::sync::Arc;

    #[test]
    fn superlevel_sets() {
        let d = build_fig1();
        let s = d.subset(&["x1", "y2"]).unwrap();
        let ind = DirichletFunction::indicator(&d, &s).unwrap();
        assert_eq!(superlevel_set(&d, &ind, 0.5).unwrap(), s);
        assert!(superlevel_set(&d, &ind, 1.0).unwrap().is_empty());
        let l = DirichletFunction::new(vec![0.15287, 0.15287, 0.04856, 0.04856]);
        assert_eq!(
            superlevel_set(&d, &l, 0.1).unwrap(),
            d.subset(&["x1", "x2"]).unwrap()
        );
        let neg = DirichletFunction::new(vec![0.1, -0.1, 0.0, 0.0]);
        assert!(matches!(
            superlevel_set(&d, &neg, 0.0),
            Err(Error::NegativeValues(id)) if id == "x2"
        ));
    }

    #[test]
    fn coarea_examples() {
        let d = build_fig1();
        let s = d.subset(&["x1", "y1"]).unwrap();
        let ind = DirichletFunction::indicator(&d, &s).unwrap();
        assert_eq!(coarea_total(&d, &ind).unwrap(), boundary_weight(d.graph(), &s));
        let x = xhat_closed_form();
        let u = DirichletFunction::new(vec![1.0, 1.0, x, x]);
        let c = coarea_total(&d, &u).unwrap();
        assert!((c - (2.0 + 4.0 * x)).abs() < 1e-14);
        assert!((c - total_variation(&d, &u).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn lambda11_on_small_domains() {
        let d = build_fig1();
        let r = lambda11_report(&d, 1000, 1).unwrap();
        assert!(r.holds, "{r:?}");
        assert_eq!(r.min_indicator_quotient, 0.5);

        let g = WeightedGraph::builder()
            .vertex("x", 1.5)
            .vertex("z", 1.0)
            .edge("x", "z", 2.0)
            .build()
            .unwrap();
        let single = Domain::from_ids(Arc::new(g), &["x"]).unwrap();
        assert!(verify_lambda11_equals_h(&single, 50).unwrap());

        let g = WeightedGraph::builder()
            .vertex("a", 1.0)
            .vertex("b", 1.0)
            .vertex("c", 1.0)
            .vertex("l", 1.0)
            .vertex("r", 1.0)
            .edge("l", "a", 1.0)
            .edge("a", "b", 1.0)
            .edge("b", "c", 1.0)
            .edge("c", "r", 1.0)
            .build()
            .unwrap();
        let path = Domain::from_ids(Arc::new(g), &["a", "b", "c"]).unwrap();
        assert!(verify_lambda11_equals_h(&path, 500).unwrap());
    }

    #[test]
    fn decompositions() {
        let d = build_fig1();
        let c = DirichletFunction::constant(4, 0.25);
        let dec = decompose_limit(&d, &c, 1e-6).unwrap();
        assert_eq!(dec.coefficients, vec![0.25]);
        assert_eq!(dec.sets, vec![d.omega().clone()]);

        let x = xhat_closed_form();
        let lim = limit_function();
        let dec = decompose_limit(&d, &lim, 1e-6).unwrap();
        assert_eq!(dec.len(), 2);
        assert_eq!(dec.sets[0], *d.omega());
        assert_eq!(dec.sets[1], d.subset(&["x1", "x2"]).unwrap());
        assert!((dec.coefficients[0] - x / (4.0 + 8.0 * x)).abs() < 1e-15);
        assert!((dec.coefficients[1] - (1.0 - x) / (4.0 + 8.0 * x)).abs() < 1e-15);
        assert!(dec.reconstruct(&d).sup_distance(&lim) < 1e-15);

        let two = DirichletFunction::new(vec![2.0, 2.0, 1.0, 1.0]);
        let dec = decompose_limit(&d, &two, 0.0).unwrap();
        assert_eq!(dec.coefficients, vec![1.0, 1.0]);
        assert_eq!(dec.levels, vec![0.0, 1.0, 2.0]);

        assert!(matches!(
            decompose_limit(&d, &DirichletFunction::zeros(4), 1e-6),
            Err(Error::ZeroFunction)
        ));
    }

    #[test]
    fn clustering_absorbs_noise() {
        let d = build_fig1();
        let u = DirichletFunction::new(vec![1.0, 1.0 + 1e-9, 0.3, 0.3 - 2e-9]);
        let dec = decompose_limit(&d, &u, 1e-6).unwrap();
        assert_eq!(dec.len(), 2);
        assert!(dec.reconstruct(&d).sup_distance(&u) <= 1e-6);
    }

    #[test]
    fn structure_checks() {
        let d = build_fig1();
        assert!(verify_eigenfunction_structure(&d, &limit_function(), 1e-6).unwrap());
        let bad = DirichletFunction::indicator(&d, &d.subset(&["x1", "y1"]).unwrap()).unwrap();
        let report = structure_report(&d, &bad, 1e-6).unwrap();
        assert!(!report.holds());
        assert!((report.levels[0].ratio - 2.0 / 3.0).abs() < 1e-15);
        let good = DirichletFunction::indicator(&d, &d.subset(&["x1", "x2"]).unwrap()).unwrap();
        assert!(verify_eigenfunction_structure(&d, &good, 1e-6).unwrap());
    }
}
