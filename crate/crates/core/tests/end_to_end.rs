use listdec::sparse::l2_distance;
use listdec::{
    generate, generate_halfspace, learn_halfspaces, reduce_to_mean, run_list_decode, CandidateList, CorruptionModel,
    EstimationParams, HalfspaceAdversary, ReductionParams, RunOptions,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn bits(list: &CandidateList) -> Vec<Vec<u64>> {
    list.raw
        .iter()
        .chain(std::iter::once(&vec![f64::NAN]))
        .chain(&list.reduced)
        .map(|c| c.iter().map(|v| v.to_bits()).collect())
        .collect()
}

#[test]
fn runs_are_bit_reproducible_across_pool_sizes() {
    let model = CorruptionModel::DecoyClusters {
        means: listdec::random_decoys(40, 3, 2, 8.0, 5),
        cov_scale: 1.0,
    };
    let g = generate(40, 3, 1500, 0.125, 8.0, &model, 5).unwrap();
    let params = EstimationParams::new(0.125, 0.1, 3, 40, 10.0).unwrap();
    let opts = RunOptions { seed: 9, ..Default::default() };
    let (a, ta) = run_list_decode(&g.dataset, &params, &opts).unwrap();
    let (b, tb) = run_list_decode(&g.dataset, &params, &opts).unwrap();
    let (c, _) = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| run_list_decode(&g.dataset, &params, &opts).unwrap());
    assert_eq!(bits(&a), bits(&b));
    assert_eq!(bits(&a), bits(&c));
    assert_eq!(ta.branch_counts, tb.branch_counts);
}

#[test]
fn candidates_are_within_the_accuracy_scale() {
    let (d, k, n, alpha) = (50, 3, 3000, 0.25);
    let rp = ReductionParams::defaults(alpha, n);
    // Candidates closer than the merge radius collapse, so the reduced list
    // is only held to the merge scale.
    let merge = 2.0 * (rp.beta + rp.t);
    for seed in 0..10 {
        let g = generate(d, k, n, alpha, 4.0, &CorruptionModel::MirroredMean, seed).unwrap();
        let params = EstimationParams::new(alpha, 0.1, k, d, 10.0).unwrap();
        let (list, trace) = run_list_decode(&g.dataset, &params, &RunOptions { seed, ..Default::default() }).unwrap();
        let best = |cs: &[Vec<f64>]| cs.iter().map(|c| l2_distance(c, &g.true_mean)).fold(f64::INFINITY, f64::min);
        assert!(best(&list.raw) <= rp.beta, "seed {seed}: {} > {} ({trace:?})", best(&list.raw), rp.beta);
        assert!(best(&list.reduced) <= rp.beta + merge, "seed {seed}");
        assert!(list.reduced.len() <= (1.2 / (2.0 * alpha)).ceil() as usize);
    }
}

#[test]
fn halfspace_predictions_survive_rescaling() {
    let (d, k, n, alpha) = (20, 2, 3000, 0.5);
    let params = EstimationParams::new(alpha, 0.1, k, d, 10.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let probes: Vec<Vec<f64>> = (0..500)
        .map(|_| (0..d).map(|_| StandardNormal.sample(&mut rng)).collect())
        .collect();
    for seed in 0..5 {
        let h = generate_halfspace(d, k, n, alpha, HalfspaceAdversary::RandomLabels, seed).unwrap();
        let opts = RunOptions { seed, ..Default::default() };
        let (base, _) = learn_halfspaces(&h.samples, &params, &opts).unwrap();
        let mut scaled = h.samples.clone();
        for s in &mut scaled {
            s.x.iter_mut().for_each(|v| *v *= 2.0);
        }
        let (rescaled, _) = learn_halfspaces(&scaled, &params, &opts).unwrap();
        assert_eq!(base.len(), rescaled.len(), "seed {seed}");
        for (a, b) in base.iter().zip(&rescaled) {
            for x in &probes {
                assert_eq!(a.predict(x), b.predict(x), "seed {seed}");
            }
        }
    }
}

#[test]
fn reduced_mean_converges_to_the_normal() {
    let (d, k, n) = (10, 3, 20_000);
    for seed in 0..20 {
        let h = generate_halfspace(d, k, n, 0.5, HalfspaceAdversary::LabelFlip, seed).unwrap();
        let z = reduce_to_mean(&h.samples).unwrap();
        let mut mean = vec![0.0; d];
        for r in z.rows() {
            for (m, v) in mean.iter_mut().zip(r) {
                *m += v / n as f64;
            }
        }
        for (m, w) in mean.iter().zip(&h.w_star) {
            assert!((m - w).abs() <= 5.0 / (n as f64).sqrt(), "seed {seed}: {mean:?} vs {:?}", h.w_star);
        }
    }
}
