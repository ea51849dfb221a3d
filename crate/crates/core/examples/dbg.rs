use cogmimo::channel::{build_scenario, SystemConfig};
use cogmimo::digital::solve_digital_precoder_ranked;
use cogmimo::hybrid_frob::{solve_hybrid_frobenius, FrobConfig};
use cogmimo::hybrid_mi::{solve_hybrid_mi, AdmmConfig};
use cogmimo::hybrid_rx::solve_hybrid_postcoder;
use cogmimo::metrics::spectral_efficiency;
use cogmimo::rng::split_seed;
use cogmimo::Real;

fn run(tag: &str, n_max: usize, restarts: usize) {
    let trials = 12u64;
    let mut gap = 0.0;
    let t0 = std::time::Instant::now();
    let rows: Vec<f64> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..trials).map(|trial| scope.spawn(move || {
            let mut c = SystemConfig::<Real>::default_64x16();
            c.sigma_n_sq = c.p_max * (10f64).powf(-15.0 / 10.0);
            let seed = split_seed(20_240_601, trial);
            let scenario = build_scenario(&c, seed).unwrap();
            let digital = solve_digital_precoder_ranked(&scenario, 4).unwrap();
            let mut cfg = AdmmConfig::default();
            cfg.n_max = n_max;
            cfg.max_restarts = restarts;
            let (mi, _) = solve_hybrid_mi(&scenario, &cfg, split_seed(seed, 1)).unwrap();
            let f_mi = mi.product();
            let (w_mi, _) = solve_hybrid_postcoder(&scenario, &mi, 1.0, 1e-3, 1e-4, 500, split_seed(seed, 2)).unwrap();
            let se_mi = spectral_efficiency(&scenario, &f_mi, &w_mi.product()).unwrap();
            let (fr, _) = solve_hybrid_frobenius(&scenario, &digital, &FrobConfig::default(), split_seed(seed, 3)).unwrap();
            let f_fr = fr.product();
            let (w_fr, _) = solve_hybrid_postcoder(&scenario, &fr, 1.0, 1e-3, 1e-4, 500, split_seed(seed, 4)).unwrap();
            let se_fr = spectral_efficiency(&scenario, &f_fr, &w_fr.product()).unwrap();
            se_mi - se_fr
        })).collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    for g in &rows { gap += g; }
    println!("{tag}: 15dB mean gap {:.3} ({:.0}s)", gap / trials as f64, t0.elapsed().as_secs_f64());
}

fn main() {
    run("baseline n500 r2 ", 500, 2);
    run("long     n1500 r2", 1500, 2);
    run("attempts n500 r5 ", 500, 5);
}
