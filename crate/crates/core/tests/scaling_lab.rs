use std::sync::OnceLock;

use kpzlab::chains::longest_chain;
use kpzlab::point_process::{sample_poisson, Point, Rect};
use kpzlab::scaling_lab::{
    cell_count_maxima, check_cell_tail, check_lemma_2_3, check_lemma_3_2, estimate_chi,
    estimate_xi, ks_lattice, lattice_ceiling, persist_campaign, probability_a, read_campaign_csv,
    run_campaign, self_sampled_lengths, tw_comparison, write_campaign_csv, ExperimentConfig,
    FitSummary, TrialRecord,
};
use kpzlab::tracy_widom::{default_solution, scaled_statistic, TwSolution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn solution() -> &'static TwSolution {
    static SOL: OnceLock<TwSolution> = OnceLock::new();
    SOL.get_or_init(|| default_solution().unwrap())
}

fn synthetic(ns: &[f64], trials: usize, make: impl Fn(f64, f64) -> (u64, f64)) -> Vec<TrialRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut out = Vec::new();
    for &n in ns {
        for _ in 0..trials {
            let z: f64 = StandardNormal.sample(&mut rng);
            let (d, dev) = make(n, z);
            out.push(TrialRecord {
                n,
                seed: 0,
                d,
                max_deviation: dev,
                num_maximal_points: d,
                event_a: vec![],
            });
        }
    }
    out
}

#[test]
fn chi_estimator_recovers_one_third() {
    let recs = synthetic(&[1e3, 1e4, 1e5, 1e6], 400, |n, z| {
        ((2.0 * n + n.cbrt() * z).round() as u64, 1.0)
    });
    let fit = estimate_chi(&recs).unwrap();
    assert!((fit.slope - 1.0 / 3.0).abs() < 0.05, "slope {}", fit.slope);
    assert!(!fit.degenerate);
}

#[test]
fn xi_estimator_recovers_two_thirds() {
    let recs = synthetic(&[1e2, 1e3, 1e4, 1e5], 400, |n, z| {
        (1, n.powf(2.0 / 3.0) * z.abs())
    });
    let fit = estimate_xi(&recs).unwrap();
    assert!((fit.slope - 2.0 / 3.0).abs() < 0.05, "slope {}", fit.slope);
    assert!(fit.r_squared > 0.95);
}

#[test]
fn lattice_ceiling_is_the_smallest_admissible_length() {
    let lambda = 250_000.0;
    for &t in &[-8.0, -3.1, -1.77, 0.0, 0.4, 2.2, 6.0] {
        let n = lattice_ceiling(t, lambda);
        assert!(scaled_statistic(n, lambda) >= t);
        assert!(n == 0 || scaled_statistic(n - 1, lambda) < t);
    }
}

#[test]
fn self_sampled_lengths_match_f() {
    let sol = solution();
    let lambda = 500.0 * 500.0;
    let lengths = self_sampled_lengths(sol, lambda, 2000, 44);
    let ks = ks_lattice(&lengths, lambda, sol);
    assert!(ks <= 0.03, "KS {ks}");
}

#[test]
fn ks_detects_a_shifted_law() {
    let sol = solution();
    let lambda = 500.0 * 500.0;
    let shifted: Vec<u64> = self_sampled_lengths(sol, lambda, 2000, 45)
        .into_iter()
        .map(|d| d + 15)
        .collect();
    assert!(ks_lattice(&shifted, lambda, sol) > 0.3);
}

fn small_campaign() -> &'static Vec<TrialRecord> {
    static RECS: OnceLock<Vec<TrialRecord>> = OnceLock::new();
    RECS.get_or_init(|| {
        let cfg = ExperimentConfig::new(vec![20.0, 40.0, 100.0], 200, vec![0.3, 0.5, 0.7, 0.9], 21);
        run_campaign(&cfg).unwrap()
    })
}

#[test]
fn campaign_records_agree_with_direct_computation() {
    for r in small_campaign().iter().filter(|r| r.n == 20.0).take(50) {
        let cfg = sample_poisson(Rect::square(20.0).unwrap(), 1.0, r.seed).unwrap();
        let d = longest_chain(&cfg, Point { x: 0.0, y: 0.0 }, Point { x: 20.0, y: 20.0 }).unwrap();
        assert_eq!(r.d, d as u64);
    }
}

#[test]
fn mean_length_is_near_two_n() {
    let ds: Vec<f64> = small_campaign()
        .iter()
        .filter(|r| r.n == 100.0)
        .map(|r| r.d as f64)
        .collect();
    let ratio = ds.iter().sum::<f64>() / ds.len() as f64 / 200.0;
    assert!((0.93..=1.0).contains(&ratio), "mean d / 2N = {ratio}");
}

#[test]
fn cylinder_probability_is_monotone_in_gamma() {
    let recs = small_campaign();
    for &n in &[20.0, 40.0, 100.0] {
        let ps: Vec<f64> = [0.3, 0.5, 0.7, 0.9]
            .iter()
            .map(|&g| probability_a(recs, g, n).unwrap().p)
            .collect();
        assert!(ps.windows(2).all(|w| w[0] <= w[1]), "N = {n}: {ps:?}");
        // √2·N^0.9 exceeds every offset |y − x| < N in the square.
        assert_eq!(ps[3], 1.0);
        for r in recs.iter().filter(|r| r.n == n) {
            let flags: Vec<bool> = r.event_a.iter().map(|e| e.1).collect();
            assert!(flags.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}

#[test]
fn tw_comparison_needs_enough_trials() {
    assert!(tw_comparison(small_campaign(), solution(), 100.0).is_err());
}

#[test]
fn campaign_csv_is_byte_identical_across_runs() {
    let cfg = ExperimentConfig::new(vec![10.0, 30.0], 40, vec![0.5, 0.8], 5);
    let a = run_campaign(&cfg).unwrap();
    let b = run_campaign(&cfg).unwrap();
    let (mut x, mut y) = (Vec::new(), Vec::new());
    write_campaign_csv(&a, &cfg.gamma_values, &mut x).unwrap();
    write_campaign_csv(&b, &cfg.gamma_values, &mut y).unwrap();
    assert_eq!(x, y);
    let (back, _) = read_campaign_csv(x.as_slice()).unwrap();
    assert_eq!(back, a);

    let mut other = cfg.clone();
    other.master_seed = 6;
    assert_ne!(run_campaign(&other).unwrap(), a);
}

#[test]
fn persisted_files_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::new(vec![10.0, 20.0], 10, vec![0.6], 9);
    let mut bytes = Vec::new();
    for name in ["a.csv", "b.csv"] {
        cfg.output_path = Some(dir.path().join(name));
        let recs = run_campaign(&cfg).unwrap();
        let path = persist_campaign(
            &cfg,
            &recs,
            FitSummary {
                chi: None,
                xi: None,
            },
            0.0,
        )
        .unwrap();
        bytes.push(std::fs::read(path).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
}

#[test]
fn single_cell_maxima_follow_poisson_one() {
    let trials = 100_000;
    let maxima = cell_count_maxima(1.0, 1, trials, 12).unwrap();
    let mut pmf = (-1f64).exp();
    let mut tail = 1.0;
    for k in 0..6 {
        let emp = maxima.iter().filter(|&&m| m >= k).count() as f64 / trials as f64;
        assert!(
            (emp - tail).abs() < 0.005,
            "P[max >= {k}] = {emp} vs {tail}"
        );
        tail -= pmf;
        pmf /= (k + 1) as f64;
    }
}

#[test]
fn cell_tail_check_passes_at_moderate_size() {
    assert!(check_cell_tail(50.0, 0.6, 10_000, 13).unwrap());
}

#[test]
fn lemma_gaps_are_nonpositive_on_a_grid() {
    for &n in &[1e3, 1e4, 1e5, 1e6] {
        for &(gamma, b) in &[(0.2, 0.5), (0.5, 0.9), (0.67, 0.99), (0.8, 0.95)] {
            if let Ok(gap) = check_lemma_2_3(n, gamma, b) {
                assert!(gap <= 0.0, "N {n} γ {gamma} b {b}: {gap}");
            }
        }
        for &gamma in &[0.67, 0.75, 0.9] {
            let gap = check_lemma_3_2(n, gamma).unwrap();
            assert!(gap <= 0.0, "N {n} γ {gamma}: {gap}");
        }
    }
}
