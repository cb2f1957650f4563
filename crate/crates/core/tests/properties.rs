use bundlegsp::cover::{self, inverse_multiplicity_partition};
use bundlegsp::denoise::{self, universal_factor, Denoiser, NoiseModel, ThresholdRule};
use bundlegsp::graph::{cartesian_product, cycle_graph};
use bundlegsp::isomorphism::is_automorphism;
use bundlegsp::signal::tensor_product;
use bundlegsp::spectral::{fourier_basis, standard_basis};
use bundlegsp::transform::build_dictionary;
use bundlegsp::{
    build_bundle, presets, trivialize, validate_bundle, Frame, Graph, Permutation, Signal, VoltageAssignment,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn automorphisms(g: &Graph) -> Vec<Permutation> {
    permutations(g.vertex_count())
        .into_iter()
        .filter(|p| is_automorphism(g, p))
        .map(|p| Permutation::new(p).unwrap())
        .collect()
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64, triangle_free: bool) -> Graph {
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut adj = vec![vec![false; n]; n];
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) && !(triangle_free && (0..n).any(|w| adj[u][w] && adj[v][w])) {
                adj[u][v] = true;
                adj[v][u] = true;
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges).unwrap()
}

fn random_tree(rng: &mut ChaCha8Rng, n: usize) -> Graph {
    Graph::new(n, (1..n).map(|v| (rng.random_range(0..v), v))).unwrap()
}

fn random_voltages(rng: &mut ChaCha8Rng, base: &Graph, fiber: &Graph) -> VoltageAssignment {
    let autos = automorphisms(fiber);
    let mut volt = VoltageAssignment::identity(base, fiber);
    for &(u, v) in base.edges() {
        let p = autos[rng.random_range(0..autos.len())].clone();
        volt.set(u, v, p).unwrap();
    }
    volt
}

fn random_signal(rng: &mut ChaCha8Rng, n: usize) -> Signal {
    Signal::new((0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn built_bundles_validate(seed in any::<u64>(), nb in 1usize..=12, nf in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = random_graph(&mut rng, nb, 0.35, true);
        let fiber = random_graph(&mut rng, nf, 0.5, false);
        let bundle = build_bundle(random_voltages(&mut rng, &base, &fiber)).unwrap();
        let report = validate_bundle(bundle.total(), &base, bundle.projection().vertex_map(), &fiber);
        prop_assert!(report.is_bundle(), "{report:?}");
        prop_assert_eq!(
            bundle.total().edge_count(),
            base.edge_count() * nf + nb * fiber.edge_count()
        );
    }

    #[test]
    fn product_edge_count(seed in any::<u64>(), nb in 1usize..=10, nf in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = random_graph(&mut rng, nb, 0.4, false);
        let fiber = random_graph(&mut rng, nf, 0.4, false);
        let (g, idx) = cartesian_product(&base, &fiber);
        prop_assert_eq!(g.vertex_count(), nb * nf);
        prop_assert_eq!(g.edge_count(), base.edge_count() * nf + nb * fiber.edge_count());
        prop_assert_eq!(idx.len(), nb * nf);
    }

    #[test]
    fn tree_bases_trivialize(seed in any::<u64>(), nb in 1usize..=12, nf in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = random_tree(&mut rng, nb);
        let fiber = random_graph(&mut rng, nf, 0.5, false);
        let bundle = build_bundle(random_voltages(&mut rng, &base, &fiber)).unwrap();
        let all: Vec<usize> = (0..nb).collect();
        let t = trivialize(&bundle, &all, None).unwrap();
        for k in 0..nb {
            for i in 0..nf {
                prop_assert_eq!(bundle.coordinates(t.apply(k, i)).0, t.vertices[k]);
            }
        }
    }

    #[test]
    fn tensor_norm_is_multiplicative(seed in any::<u64>(), nb in 1usize..=8, nf in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, idx) = cartesian_product(&Graph::empty(nb), &Graph::empty(nf));
        let a = random_signal(&mut rng, nb);
        let b = random_signal(&mut rng, nf);
        let t = tensor_product(&idx, &a, &b).unwrap();
        prop_assert!((t.norm() - a.norm() * b.norm()).abs() <= 1e-12 * (1.0 + t.norm()));
    }
}

#[test]
fn corpus_is_parseval_and_reconstructs() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for bundle in [presets::mobius(), presets::cylinder(), presets::pentane()] {
        let order: Vec<usize> = (0..bundle.base().vertex_count()).collect();
        for c in [
            cover::star_cover(bundle.base()),
            cover::stride_reach_cover(bundle.base(), &order, 2, 1).unwrap(),
        ] {
            let p = inverse_multiplicity_partition(&c);
            let d = build_dictionary(
                &bundle,
                &c,
                &p,
                &fourier_basis(bundle.base()).unwrap(),
                &standard_basis(bundle.fiber()),
            )
            .unwrap();
            for _ in 0..20 {
                let x = random_signal(&mut rng, d.dim());
                let coeffs = d.analyze(&x).unwrap();
                assert!((coeffs.norm().powi(2) - x.norm_squared()).abs() <= 1e-10 * x.norm_squared());
                assert!(d.synthesize(&coeffs).unwrap().max_abs_diff(&x).unwrap() <= 1e-10);
            }
        }
    }
}

fn pentane_dictionary() -> bundlegsp::BundleDictionary {
    let b = presets::pentane();
    let c = cover::stride_reach_cover(b.base(), &presets::pentane_cycle_order(), 3, 2).unwrap();
    let p = inverse_multiplicity_partition(&c);
    build_dictionary(&b, &c, &p, &fourier_basis(b.base()).unwrap(), &fourier_basis(b.fiber()).unwrap()).unwrap()
}

#[test]
fn surviving_count_shrinks_with_sigma() {
    let d = pentane_dictionary();
    let den = Denoiser::new(&d, ThresholdRule::Hard).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..10 {
        let y = random_signal(&mut rng, d.dim());
        let mut last = usize::MAX;
        for k in 0..30 {
            let sigma = 0.01 * 1.3_f64.powi(k);
            let alive = den.threshold(&y, sigma).unwrap().iter().filter(|c| **c != 0.0).count();
            assert!(alive <= last);
            last = alive;
        }
    }
}

#[test]
fn denoised_energy_never_exceeds_input() {
    let d = pentane_dictionary();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for rule in [ThresholdRule::Hard, ThresholdRule::Soft] {
        let den = Denoiser::new(&d, rule).unwrap();
        for _ in 0..50 {
            let y = random_signal(&mut rng, d.dim());
            let sigma = rng.random_range(0.0..0.5);
            assert!(den.denoise(&y, sigma).unwrap().norm() <= y.norm() + 1e-9);
        }
    }
}

#[test]
fn experiments_are_paired_and_repeatable() {
    let d = pentane_dictionary();
    let clean = Signal::new((0..90).map(|v| (v as f64 / 7.0).sin()).collect()).unwrap();
    let sigmas = denoise::default_sigma_grid(&clean, 4);
    let run = || denoise::denoise_experiment(&clean, &[("a", &d), ("b", &d)], &sigmas, 8, 99, ThresholdRule::Hard).unwrap();
    let first = run();
    assert_eq!(first, run());
    for pair in first.chunks(2) {
        // Same frame, same noise: identical statistics.
        assert_eq!(pair[0].mean_mse, pair[1].mean_mse);
        assert_eq!(pair[0].std_mse, pair[1].std_mse);
        assert_eq!(pair[0].trials, 8);
    }
    let zero = denoise::denoise_experiment(&clean, &[("a", &d)], &[0.0], 3, 1, ThresholdRule::Hard).unwrap();
    assert!(zero[0].mean_mse < 1e-24);
}

/// `2(1 − Φ(t))` by composite Simpson integration of the normal density.
fn two_sided_tail(t: f64) -> f64 {
    let (a, b, n) = (t, t + 20.0, 20_000);
    let h = (b - a) / n as f64;
    let pdf = |x: f64| (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut s = pdf(a) + pdf(b);
    for k in 1..n {
        s += pdf(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    2.0 * s * h / 3.0
}

#[test]
fn pure_noise_survival_matches_gaussian_tail() {
    let n = 16;
    let d = fourier_basis(&cycle_graph(n).unwrap()).unwrap();
    let den = Denoiser::new(&d, ThresholdRule::Hard).unwrap();
    let sigma = 0.7;
    let model = NoiseModel::new(sigma, 2024).unwrap();
    let zero = Signal::zeros(n);
    let trials = 10_000;
    let mut alive = 0usize;
    for t in 0..trials {
        let y = denoise::add_awgn(&zero, &model, t);
        alive += den.threshold(&y, sigma).unwrap().iter().filter(|c| **c != 0.0).count();
    }
    let draws = (trials as usize * n) as f64;
    let observed = alive as f64 / draws;
    let expected = two_sided_tail(universal_factor(n));
    let se = (expected * (1.0 - expected) / draws).sqrt();
    assert!((observed - expected).abs() <= 4.0 * se, "{observed} vs {expected} (se {se})");
}

#[test]
fn tail_oracle_sanity() {
    assert!((two_sided_tail(1.959963984540054) - 0.05).abs() < 1e-9);
    assert!((two_sided_tail(0.0) - 1.0).abs() < 1e-9);
}
