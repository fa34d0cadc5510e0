//! Cross-module consistency checks: the convergence-theorem properties
//! that couple the distance, partition, functional and spectral layers.

mod common;

use graphlim_core::functionals::{normalized_limit, verify_almost_additive};
use graphlim_core::graph::Graph;
use graphlim_core::metrics::{self, DeltaSConfig, SearchMode, StarMode};
use graphlim_core::partition::partition_path_like;
use graphlim_core::seqgen;
use graphlim_core::spectral::{
    assemble, eig_counting_functional, ids_experiment, spectral_cdf, BuiltinKernel, Kernel,
    ReferenceCurve, SpectralConfig,
};
use graphlim_core::stats::weak_cauchy_profile;
use graphlim_core::GraphFunctional;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn path(n: usize) -> Graph {
    seqgen::gen_path(n).unwrap()
}

fn cycle(n: usize) -> Graph {
    seqgen::gen_cycle(n).unwrap()
}

/// An almost-additive functional with constant D inherits the strong
/// Cauchy profile: the normalized profile is bounded by 2 D times the
/// measured geometric-distance profile (upper bounds on both sides keep
/// the inequality one-sided valid).
#[test]
fn normalized_profile_bounded_by_strong_profile() {
    let seq: Vec<Graph> = [40usize, 80, 160, 320].iter().map(|&n| path(n)).collect();
    let cfg = DeltaSConfig::default();
    let strong = metrics::strong_cauchy_profile(&seq, 2, None, &cfg).unwrap();

    let d = 1.0; // edge count: D = d/2 with d = 2
    let f = GraphFunctional::edge_count(2);
    let norm = normalized_limit(&f, &seq, 1e-9).unwrap();
    for (m, (np, sp)) in norm.profile.iter().zip(&strong.tail_sup).enumerate() {
        assert!(
            *np <= 2.0 * d * *sp + 1e-9,
            "index {m}: normalized {np} vs 2 D strong {sp}"
        );
    }
}

/// Strong convergence implies weak convergence: a sequence whose strong
/// profile vanishes has a vanishing weak profile as well.
#[test]
fn strong_profile_controls_weak_profile() {
    let seq: Vec<Graph> = [32usize, 64, 128, 256, 512]
        .iter()
        .map(|&n| path(n))
        .collect();
    let cfg = DeltaSConfig::default();
    let strong = metrics::strong_cauchy_profile(&seq, 2, None, &cfg).unwrap();
    let weak = weak_cauchy_profile(&seq, 2).unwrap();
    // both decrease toward zero along the tail
    assert!(strong.tail_sup.last().unwrap() < &0.1);
    assert!(weak.tail_sup.last().unwrap() < &0.05);
    for m in 1..strong.tail_sup.len() {
        assert!(strong.tail_sup[m] <= strong.tail_sup[m - 1] + 1e-12);
        assert!(weak.tail_sup[m] <= weak.tail_sup[m - 1] + 1e-12);
    }
}

/// delta_S lower-bounds delta (the identity is one candidate relabeling),
/// and is invariant under relabeling either argument.
#[test]
fn delta_s_dominated_by_delta() {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let cfg = DeltaSConfig::default();
    for _ in 0..25 {
        let g = common::random_bounded_graph(7, 3, &mut rng, 0.35);
        let h = common::random_bounded_graph(7, 3, &mut rng, 0.35);
        let plain = metrics::delta(&g, &h, StarMode::Induced).unwrap();
        let est = metrics::delta_s(&g, &h, SearchMode::Exact, &cfg).unwrap();
        assert!(est.value <= plain + 1e-12);

        let sigma = graphlim_core::VertexLabeling::seeded_shuffle(7, rng.gen());
        let relabeled = h.relabel(&sigma).unwrap();
        let est2 = metrics::delta_s(&g, &relabeled, SearchMode::Exact, &cfg).unwrap();
        assert!((est.value - est2.value).abs() < 1e-12);
    }
}

/// The paired-path example: eigenvalue counting with the Laplacian kernel
/// satisfies the almost-additivity bound with D = 4(d+1) = 12 at exact
/// star distances, on the P_8 / C_8 pair.
#[test]
fn eig_counting_on_p8_c8() {
    let f = eig_counting_functional(
        Kernel::Builtin(BuiltinKernel::Laplacian),
        SpectralConfig::default(),
    )
    .with_additivity_const(12.0);
    let pairs = vec![(path(8), cycle(8))];
    let report = verify_almost_additive(&f, &pairs, 1, &DeltaSConfig::default()).unwrap();
    assert!(report.all_pass);
    assert_eq!(
        report.pairs[0].delta_s.kind,
        graphlim_core::EstimateKind::Exact
    );
}

/// Star perturbations move the counting function by a rank-bounded amount:
/// rewiring k vertices changes n_H by at most 2(d+1)k at every point.
#[test]
fn rank_bound_under_star_perturbation() {
    let kernel = Kernel::Builtin(BuiltinKernel::Laplacian);
    let cfg = SpectralConfig::default();
    let g = path(12);
    // drop one interior edge: stars of its two endpoints change
    let h = g.remove_edges(&[(5, 6)]).unwrap();
    let fg = spectral_cdf(&assemble(&g, &kernel).unwrap(), &cfg).unwrap();
    let fh = spectral_cdf(&assemble(&h, &kernel).unwrap(), &cfg).unwrap();
    let mut points: Vec<f64> = fg
        .jumps()
        .iter()
        .chain(fh.jumps())
        .map(|&(x, _)| x)
        .collect();
    points.sort_by(f64::total_cmp);
    let n = 12.0;
    let changed = 2.0; // two perturbed stars
    let bound = 2.0 * (2.0 + 1.0) * changed;
    for x in points {
        let diff = (fg.eval(x) - fh.eval(x)).abs() * n;
        assert!(diff <= bound + 1e-9, "at {x}: {diff} > {bound}");
    }
}

/// The normalized eigenvalue-counting limit along growing paths matches
/// the arccos IDS curve.
#[test]
fn eig_counting_limit_matches_arccos_curve() {
    let seq: Vec<Graph> = (3..=7).map(|k| path(1 << k)).collect();
    let kernel = Kernel::Builtin(BuiltinKernel::Laplacian);
    let report = ids_experiment(
        &seq,
        &kernel,
        Some(&ReferenceCurve::arccos_1d()),
        &SpectralConfig::default(),
    )
    .unwrap();
    let sups: Vec<f64> = report
        .members
        .iter()
        .map(|m| m.sup_to_reference.unwrap())
        .collect();
    for w in sups.windows(2) {
        assert!(
            w[1] <= w[0] + 1e-12,
            "sup distances not decreasing: {sups:?}"
        );
    }
    let profile = &report.pairwise_profile;
    assert!(profile.last().unwrap() <= profile.first().unwrap());
}

/// The product-topology distance between P_10 and C_10 agrees with a
/// direct computation whose class frequencies come from brute-force
/// isomorphism grouping rather than canonical keys.
#[test]
fn d_pi_matches_brute_force_census() {
    use graphlim_core::stats::{canonical_key, class_census, d_pi};

    let (g, h) = (path(10), cycle(10));
    let r_max = 2usize;
    let census_g = class_census(&g, r_max).unwrap();
    let census_h = class_census(&h, r_max).unwrap();

    // oracle census: group balls by brute-force rooted isomorphism
    let brute_census = |graph: &Graph| -> Vec<(graphlim_core::RootedGraph, Vec<u64>)> {
        // classes as (representative, count at each sweep radius)
        let mut classes: Vec<(graphlim_core::RootedGraph, Vec<u64>)> = Vec::new();
        for s in 0..=r_max {
            for x in 0..graph.vertex_count() {
                let ball = graph.ball(x, s).unwrap();
                // only count the ball at its own radius (its eccentricity)
                if ball.root_eccentricity() != s {
                    continue;
                }
                match classes
                    .iter_mut()
                    .find(|(rep, _)| common::brute_rooted_isomorphic(rep, &ball))
                {
                    Some((_, counts)) => counts[s] += 1,
                    None => {
                        let mut counts = vec![0u64; r_max + 1];
                        counts[s] += 1;
                        classes.push((ball, counts));
                    }
                }
            }
        }
        classes
    };

    // library frequencies must match the brute-force ones class by class
    for (census, graph) in [(&census_g, &g), (&census_h, &h)] {
        let brute = brute_census(graph);
        assert_eq!(census.classes().len(), brute.len());
        for (rep, counts) in &brute {
            let key = canonical_key(rep).unwrap();
            let stat = census.classes().get(&key).expect("class present");
            let brute_count: u64 = counts.iter().sum();
            assert_eq!(stat.count, brute_count);
        }
    }

    // recompute the weighted sum from brute-force frequencies, using the
    // library's enumeration order of the observed classes
    let mut keys: Vec<_> = census_g
        .classes()
        .keys()
        .chain(census_h.classes().keys())
        .cloned()
        .collect();
    keys.sort();
    keys.dedup();
    let freq = |census: &graphlim_core::StatVector, key: &graphlim_core::CanonicalBallKey| {
        let f = census.frequency(key);
        *f.numer() as f64 / *f.denom() as f64
    };
    let mut expected = 0.0;
    let mut weight = 1.0;
    for key in &keys {
        weight *= 0.5;
        let diff = (freq(&census_g, key) - freq(&census_h, key)).abs();
        expected += weight * diff / (1.0 + diff);
    }
    let got = d_pi(&census_g, &census_h).unwrap();
    assert!((got.value - expected).abs() < 1e-15);
    assert!(got.value > 0.0);
}

/// Adjacency spectra of random 3-regular graphs sit near the Kesten-McKay
/// law at bulk continuity points (weak-convergence evidence only).
#[test]
fn random_regular_adjacency_near_kesten_mckay() {
    let reference = ReferenceCurve::by_name("kesten-mckay:3").unwrap();
    let cfg = SpectralConfig::default();
    for (n, seed) in [(500usize, 1u64), (1000, 2)] {
        let g = seqgen::gen_random_regular(n, 3, seed).unwrap();
        let m = assemble(&g, &Kernel::Builtin(BuiltinKernel::Adjacency)).unwrap();
        let cdf = spectral_cdf(&m, &cfg).unwrap();
        // sample bulk continuity points away from the trivial eigenvalue 3
        let edge = 2.0 * 2.0f64.sqrt();
        for i in 0..40 {
            let x = -edge + (2.0 * edge) * (i as f64 + 0.5) / 40.0;
            let diff = (cdf.eval(x) - reference.eval(x)).abs();
            assert!(diff <= 0.05, "n={n} at {x:.3}: diff {diff:.4}");
        }
    }
}

/// Dense eigensolves and shifted-factorization inertia counts agree at
/// random query points on matrices up to 1500x1500.
#[test]
fn dense_and_inertia_agree_at_scale() {
    use graphlim_core::spectral::{dense_eigenvalues, InertiaCounter, SpectralCdf};
    use rand::Rng;
    let cfg = SpectralConfig::default();
    let kernel = Kernel::Builtin(BuiltinKernel::Laplacian);
    let cases: Vec<Graph> = vec![
        cycle(1500),
        seqgen::gen_torus(20, 2).unwrap(),
        seqgen::gen_box(20, 2).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for g in cases {
        let m = assemble(&g, &kernel).unwrap();
        let dense = SpectralCdf::from_eigenvalues(dense_eigenvalues(&m), cfg.cluster_tol);
        let counter = InertiaCounter::new(&m, &cfg).unwrap();
        let bound = 2.0 * g.degree_bound() as f64 + 1.0;
        for _ in 0..100 {
            let x: f64 = rng.gen_range(-bound..bound);
            let counted = counter.count_leq(x).unwrap() as f64 / g.vertex_count() as f64;
            assert!(
                (counted - dense.eval(x)).abs() < 1e-8,
                "n={} at {x}: {counted} vs {}",
                g.vertex_count(),
                dense.eval(x)
            );
        }
    }
}

/// Box and path sequences show decreasing weak profiles; random regular
/// sequences converge weakly while the carver reports heavy cuts.
#[test]
fn family_convergence_portraits() {
    let boxes: Vec<Graph> = [8usize, 16, 32]
        .iter()
        .map(|&b| seqgen::gen_box(b, 2).unwrap())
        .collect();
    let profile = weak_cauchy_profile(&boxes, 1).unwrap();
    assert!(profile.tail_sup[0] >= *profile.tail_sup.last().unwrap());
    assert!(profile.tail_sup.last().unwrap() < &0.1);

    let regulars: Vec<Graph> = [200usize, 400, 800]
        .iter()
        .enumerate()
        .map(|(i, &n)| seqgen::gen_random_regular(n, 3, i as u64).unwrap())
        .collect();
    let weak = weak_cauchy_profile(&regulars, 1).unwrap();
    assert!(weak.tail_sup.last().unwrap() < &0.05);
    // the same sequence resists bounded-component partitioning
    for (i, g) in regulars.iter().enumerate() {
        let p =
            graphlim_core::partition::partition_ball_carving(g, 0.05, i as u64, Some(20)).unwrap();
        let eps = p.achieved_eps();
        assert!(*eps.numer() as f64 / *eps.denom() as f64 > 0.05);
    }
}

/// Partition-based and direct geometric-distance estimates agree on which
/// sequences look strongly convergent.
#[test]
fn partition_bound_feeds_strong_profile() {
    let sizes = [60usize, 120, 240];
    let seq: Vec<Graph> = sizes.iter().map(|&n| path(n)).collect();
    let eps1 = 0.1;
    let partitions: Vec<_> = seq
        .iter()
        .map(|g| partition_path_like(g, eps1).unwrap())
        .collect();
    let profile = metrics::strong_cauchy_profile(
        &seq,
        2,
        Some((&partitions, eps1)),
        &DeltaSConfig::default(),
    )
    .unwrap();
    for pair in &profile.pairs {
        let pb = pair.partition_bound.unwrap();
        assert!(pair.best <= pb + 1e-12);
        assert!(pair.best <= pair.direct + 1e-12);
    }
}

/// Canonical keys agree with brute-force rooted isomorphism on larger
/// random graphs (10-12 vertices) where deeper individualization runs.
#[test]
fn canonical_keys_fuzz_at_larger_sizes() {
    use graphlim_core::stats::canonical_key;
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(3102);
    let mut prev: Option<(graphlim_core::CanonicalBallKey, graphlim_core::RootedGraph)> = None;
    for _ in 0..400 {
        let n = rng.gen_range(10..=12);
        let g = common::random_connected_graph(n, 3, &mut rng, 0.3);
        let root = rng.gen_range(0..n);
        let ball = g.ball(root, n).unwrap();
        let key = canonical_key(&ball).unwrap();
        let sigma = graphlim_core::VertexLabeling::seeded_shuffle(n, rng.gen());
        let relabeled = graphlim_core::RootedGraph::from_graph(
            ball.graph.relabel(&sigma).unwrap(),
            sigma.apply(ball.root),
        )
        .unwrap();
        assert_eq!(canonical_key(&relabeled).unwrap(), key);
        if let Some((pk, pb)) = &prev {
            assert_eq!(*pk == key, common::brute_rooted_isomorphic(pb, &ball));
        }
        prev = Some((key, ball));
    }
}

/// Mid-bandwidth matrices go through the dense path: a 30x30 torus
/// Laplacian (reordered bandwidth around 60) must solve quickly and agree
/// with spectral mass conservation.
#[test]
fn torus_spectrum_uses_dense_path_quickly() {
    let g = seqgen::gen_torus(30, 2).unwrap();
    let m = assemble(&g, &Kernel::Builtin(BuiltinKernel::Laplacian)).unwrap();
    let start = std::time::Instant::now();
    let cdf = spectral_cdf(&m, &SpectralConfig::default()).unwrap();
    assert!(start.elapsed().as_secs() < 30, "dense path should be fast");
    assert!(cdf.is_normalized());
    // torus Laplacian eigenvalues: 4 - 2cos(2 pi a/30) - 2cos(2 pi b/30),
    // checked at the extremes
    assert!(cdf.atom_mass(0.0, 1e-6) >= num_rational::Ratio::new(1, 900));
    assert!((cdf.eval(8.0 + 1e-9) - 1.0).abs() < 1e-12);
}
