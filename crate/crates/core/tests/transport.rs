use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use shellmc::adjoint::{DirectionMesh, ImportanceTable, RadialMesh};
use shellmc::biased::{run_biased, run_biased_with_table};
use shellmc::transport::*;
use shellmc::{Error, ProblemConfig64};

/// Kolmogorov–Smirnov statistic `√n · sup|F_n − F|`.
fn ks_statistic(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    d * n.sqrt()
}

/// Asymptotic 1% critical value of `√n · D`.
const KS_1PCT: f64 = 1.628;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn collision_distance_moments_and_distribution() {
    let mut g = rng(1);
    assert!(sample_collision_distance::<f64, _>(&mut g, 0.0).is_infinite());
    let n = 1_000_000;
    let mean = (0..n).map(|_| sample_collision_distance::<f64, _>(&mut g, 2.0)).sum::<f64>() / n as f64;
    assert!((mean - 0.5).abs() <= 3.0 * 0.5 / 1e3, "mean {mean}");
    let xs: Vec<f64> = (0..100_000).map(|_| sample_collision_distance(&mut g, 2.0)).collect();
    let ks = ks_statistic(xs, |x| 1.0 - (-2.0 * x).exp());
    assert!(ks < KS_1PCT, "KS {ks}");
}

#[test]
fn lambert_inflow() {
    let mut g = rng(2);
    let xs: Vec<f64> = (0..100_000).map(|_| sample_lambert_incoming(&mut g)).collect();
    assert!(xs.iter().all(|&m| (-1.0..0.0).contains(&m)));
    let mean_abs = xs.iter().map(|m| m.abs()).sum::<f64>() / xs.len() as f64;
    // Var|μ| = 1/2 − 4/9.
    assert!((mean_abs - 2.0 / 3.0).abs() < 3.0 * (0.5f64 - 4.0 / 9.0).sqrt() / (xs.len() as f64).sqrt());
    let ks = ks_statistic(xs.iter().map(|m| m.abs()).collect(), |a| a * a);
    assert!(ks < KS_1PCT, "KS {ks}");
}

#[test]
fn isotropic_scatter() {
    let mut g = rng(3);
    let xs: Vec<f64> = (0..100_000).map(|_| scatter_direction(&mut g)).collect();
    assert!(xs.iter().all(|m| (-1.0..=1.0).contains(m)));
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    assert!(mean.abs() <= 3.0 / 3f64.sqrt() / (xs.len() as f64).sqrt());
    let ks = ks_statistic(xs, |m| 0.5 * (m + 1.0));
    assert!(ks < KS_1PCT, "KS {ks}");
}

fn shell_config(kappa_s: f64, histories: usize, seed: u64) -> ProblemConfig64 {
    let mut cfg = ProblemConfig::stationary(0.0, 1.0, kappa_s, 1.0, histories, seed);
    cfg.source = Source::Shell { radius: 0.45 };
    cfg.tally_cells = 25;
    cfg
}

#[test]
fn shell_source_emission() {
    let cfg = shell_config(0.3, 10, 1);
    let mut engine = AnalogEngine::new(&cfg).unwrap();
    engine.begin_step(&cfg, 0.0).unwrap();
    let mut g = rng(4);
    let ps: Vec<Particle<f64>> = (0..100_000).map(|_| engine.emit(&mut g, 1e-5, 0.0).unwrap()).collect();
    assert!(ps.iter().all(|p| p.r == 0.45 && p.weight == 1e-5));
    let ks = ks_statistic(ps.iter().map(|p| p.mu).collect(), |m| 0.5 * (m + 1.0));
    assert!(ks < KS_1PCT, "KS {ks}");
}

#[test]
fn shell_source_outside_domain_is_rejected() {
    let mut cfg = shell_config(0.3, 10, 1);
    cfg.source = Source::Shell { radius: 1.5 };
    assert!(matches!(AnalogEngine::new(&cfg), Err(Error::Config(_))));
}

#[test]
fn inner_radius_law() {
    let cfg: ProblemConfig64 = ProblemConfig::unsteady(0.37625, -0.027625, 1.0, 0.0, 0.0, 10.0, 1e-2, 10, 1);
    assert_eq!(cfg.inner_radius(0.0), 0.37625);
    assert!((cfg.inner_radius(10.0) - 0.1).abs() < 1e-15);
    assert_eq!(cfg.n_steps(), 1000);
    let mut flat = cfg.clone();
    flat.beta = 0.0;
    assert!((0..=10).all(|t| flat.inner_radius(t as f64) == 0.37625));
}

#[test]
fn config_rejections() {
    let cfg = ProblemConfig::stationary(0.1, 1.0, 1.1, 1.0, 100, 1);
    match cfg.validate() {
        Err(Error::Config(msg)) => assert!(msg.contains("kappa_s exceeds kappa_t"), "{msg}"),
        other => panic!("{other:?}"),
    }
    let collapse = ProblemConfig::unsteady(0.37625, -0.05, 1.0, 0.0, 0.0, 10.0, 1e-2, 10, 1);
    assert!(collapse.validate().is_err());
}

#[test]
fn every_history_ends_once() {
    let cfg = ProblemConfig::stationary(0.1, 1.0, 0.9, 1.0, 3000, 11);
    let a = run_analog(&cfg).unwrap();
    assert_eq!(a.status.total(), 3000);
    assert_eq!(a.histories, 3000);
    let b = run_biased(&cfg).unwrap();
    assert_eq!(b.status.total(), 3000);

    let mut u = ProblemConfig::unsteady(0.37625, -0.027625, 1.0, 0.5, 1.0, 1.0, 0.1, 50, 3);
    u.n_r = 10;
    u.n_mu = 10;
    let a = run_analog(&u).unwrap();
    assert_eq!(a.status.total(), 500);
    let b = run_biased(&u).unwrap();
    assert_eq!(b.status.total(), 500);
    assert!((0.0..=1.0).contains(&b.reach_fraction));
}

#[test]
fn mean_variance_is_sample_variance_over_n() {
    let cfg: ProblemConfig64 = ProblemConfig::stationary(0.3, 1.0, 0.5, 1.0, 2000, 5);
    let r = run_analog(&cfg).unwrap();
    assert!((r.mean_variance - r.sample_variance / 2000.0).abs() <= 1e-15 * r.sample_variance);
}

fn same_numbers(a: &TallyResult<f64>, b: &TallyResult<f64>) {
    assert_eq!(a.flux.to_bits(), b.flux.to_bits());
    assert_eq!(a.sample_variance.to_bits(), b.sample_variance.to_bits());
    assert_eq!(a.reach_fraction.to_bits(), b.reach_fraction.to_bits());
    assert_eq!(a.status, b.status);
    assert_eq!(a.profile, b.profile);
}

#[test]
fn reruns_are_bit_identical() {
    let cfg = shell_config(0.3, 2000, 9);
    same_numbers(&run_analog(&cfg).unwrap(), &run_analog(&cfg).unwrap());
    let st = ProblemConfig::stationary(0.1, 1.0, 0.9, 1.0, 1000, 9);
    same_numbers(&run_biased(&st).unwrap(), &run_biased(&st).unwrap());
    let other = ProblemConfig { seed: 10, ..st.clone() };
    assert_ne!(run_biased(&st).unwrap().flux, run_biased(&other).unwrap().flux);
}

#[test]
fn worker_count_does_not_change_results() {
    let cfg = shell_config(0.3, 3000, 21);
    let one = run_analog(&cfg).unwrap();
    for workers in [2, 3, 4] {
        same_numbers(&one, &run_analog(&ProblemConfig { workers, ..cfg.clone() }).unwrap());
    }
    let mut u = ProblemConfig::unsteady(0.37625, -0.027625, 1.0, 0.9, 1.0, 0.5, 0.1, 40, 8);
    u.n_r = 10;
    u.n_mu = 12;
    let one = run_biased(&u).unwrap();
    same_numbers(&one, &run_biased(&ProblemConfig { workers: 3, ..u.clone() }).unwrap());
}

fn agree(a: &TallyResult<f64>, b: &TallyResult<f64>) -> bool {
    (a.flux - b.flux).abs() <= 3.0 * (a.mean_variance + b.mean_variance).sqrt()
}

#[test]
fn uniform_importance_reproduces_analog_transport() {
    let cfg = ProblemConfig::stationary(0.3, 1.0, 0.7, 1.0, 20_000, 31);
    let rmesh = RadialMesh::uniform(0.3, 1.0, 7).unwrap();
    let dmesh = DirectionMesh::new(6).unwrap();
    let table = ImportanceTable::uniform(&rmesh, &dmesh, 0.7, 1.0);
    let b = run_biased_with_table(&cfg, table).unwrap();
    let a = run_analog(&ProblemConfig { seed: 32, ..cfg.clone() }).unwrap();
    assert!(agree(&a, &b), "analog {} ± {}, uniform-biased {} ± {}", a.flux, a.std_dev(), b.flux, b.std_dev());
    // With I ≡ 1 the score distribution is the analog one: comparable variance.
    let ratio = a.sample_variance / b.sample_variance;
    assert!((0.8..1.25).contains(&ratio), "variance ratio {ratio}");
}

#[test]
fn any_positive_importance_keeps_the_mean() {
    use rand::Rng;
    let cfg = ProblemConfig::stationary(0.3, 1.0, 0.7, 1.0, 40_000, 41);
    let rmesh = RadialMesh::uniform(0.3, 1.0, 9).unwrap();
    let dmesh = DirectionMesh::new(8).unwrap();
    let mut g = rng(42);
    let values: Vec<f64> = (0..72).map(|_| g.random_range(0.2..3.0)).collect();
    let boundary: Vec<f64> = (0..8).map(|_| g.random_range(0.2..3.0)).collect();
    let table = ImportanceTable::from_values(&rmesh, &dmesh, 0.7, 1.0, values, boundary).unwrap();
    let b = run_biased_with_table(&cfg, table).unwrap();
    let a = run_analog(&ProblemConfig { seed: 43, ..cfg.clone() }).unwrap();
    assert!(agree(&a, &b), "analog {} ± {}, random-biased {} ± {}", a.flux, a.std_dev(), b.flux, b.std_dev());
}

#[test]
fn adjoint_importance_reduces_variance_without_bias() {
    let cfg = ProblemConfig::stationary(0.1, 1.0, 0.9, 1.0, 4000, 51);
    let a = run_analog(&cfg).unwrap();
    let b = run_biased(&cfg).unwrap();
    assert!(agree(&a, &b), "analog {} ± {}, biased {} ± {}", a.flux, a.std_dev(), b.flux, b.std_dev());
    assert!(a.mean_variance / b.mean_variance > 20.0);
    assert!(b.reach_fraction > 0.8 && a.reach_fraction < 0.05);
    assert!(b.setup_seconds > 0.0 && b.setup_seconds <= b.wall_seconds);
}

#[test]
fn biased_engine_needs_boundary_source_and_inner_sphere() {
    let shell = shell_config(0.3, 10, 1);
    assert!(matches!(run_biased(&shell), Err(Error::Config(_))));
    let no_core = ProblemConfig::stationary(0.0, 1.0, 0.3, 1.0, 10, 1);
    assert!(matches!(run_biased(&no_core), Err(Error::Config(_))));
}

#[test]
fn profile_track_length_sums_match_flight_lengths() {
    // Pure absorber with R0 = 0 and unit shell source: total volume-integrated
    // flux equals the mean free path inside the sphere, at most 1/κ_t.
    let cfg = shell_config(0.0, 20_000, 61);
    let r = run_analog(&cfg).unwrap();
    let p = r.profile.unwrap();
    assert_eq!(p.psi.len(), 25);
    let total: f64 = (0..25).map(|j| p.psi[j] * shell_volume(p.edges[j], p.edges[j + 1])).sum();
    assert!(total > 0.0 && total < 1.0);
    assert!(p.psi.iter().all(|&v| v > 0.0));
    assert_eq!(r.status.exited_outer, 20_000);
}

proptest! {
    #[test]
    fn weight_never_grows(w in 1e-6f64..10.0, ka in 0.0f64..5.0, s in 0.0f64..10.0) {
        let after = attenuate_weight(w, ka, s);
        prop_assert!(after <= w);
        if ka == 0.0 || s == 0.0 {
            prop_assert_eq!(after, w);
        } else {
            prop_assert!(after < w);
        }
    }
}
