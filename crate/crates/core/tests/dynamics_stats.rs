use glauberk_core::dynamics::{run, InitialSource, InteractionSource, SimConfig, Verbosity};
use glauberk_core::graph::{build_cubic, centered_extent, BoundaryMode};
use glauberk_core::model::{window_h, TemperatureProfile};

fn square(half: i64) -> SimConfig {
    SimConfig::new(build_cubic(2).unwrap(), centered_extent(2, half), BoundaryMode::Toroidal)
}

#[test]
fn interarrival_times_are_exponential() {
    let mut c = square(4);
    c.verbosity = Verbosity::All;
    c.temperature = TemperatureProfile::constant(1.0).unwrap();
    c.t_max = 200.0;
    c.seed = 3;
    let r = run(&c).unwrap();
    let m = r.catalog().len() as f64;
    let mut gaps: Vec<f64> = r.events.windows(2).map(|p| p[1].t - p[0].t).collect();
    gaps.sort_by(f64::total_cmp);
    let n = gaps.len() as f64;
    let d = gaps
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = 1.0 - (-m * x).exp();
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max);
    // 1% critical value of the one-sample KS statistic
    assert!(d < 1.63 / n.sqrt(), "KS statistic {d} over {n} gaps");
}

#[test]
fn per_set_counts_are_poisson() {
    let mut c = square(5);
    c.verbosity = Verbosity::All;
    c.temperature = TemperatureProfile::constant(1.0).unwrap();
    c.t_max = 50.0;
    c.seed = 4;
    let r = run(&c).unwrap();
    let m = r.catalog().len();
    let mut counts = vec![0f64; m];
    for e in &r.events {
        counts[e.set as usize] += 1.0;
    }
    let mean = counts.iter().sum::<f64>() / m as f64;
    let var = counts.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m as f64 - 1.0);
    let t = c.t_max;
    // mean of M Poisson(t) counts has sd sqrt(t/M); sample variance sd ≈ t·sqrt(2/M)
    assert!((mean - t).abs() < 4.0 * (t / m as f64).sqrt(), "mean {mean}");
    assert!((var - t).abs() < 4.0 * t * (2.0 / m as f64).sqrt(), "var {var}");
}

#[test]
fn indifferent_arrivals_flip_half_the_time() {
    let mut c = square(10);
    c.verbosity = Verbosity::All;
    c.temperature = TemperatureProfile::constant(2.0).unwrap();
    c.t_max = 400.0;
    c.seed = 8;
    let r = run(&c).unwrap();
    let zero: Vec<bool> = r.events.iter().filter(|e| e.delta == 0).map(|e| e.accepted).collect();
    let n = zero.len() as f64;
    assert!(n >= 1e4, "only {n} indifferent arrivals");
    let p = zero.iter().filter(|&&a| a).count() as f64 / n;
    assert!((p - 0.5).abs() < 4.0 * (0.25 / n).sqrt(), "p = {p} over {n}");
}

#[test]
fn zero_temperature_energy_never_rises() {
    let mut c = square(8);
    c.k = 2;
    c.verbosity = Verbosity::Accepted;
    c.energy_stride = 1;
    c.t_max = 40.0;
    for seed in 0..3 {
        c.seed = seed;
        let r = run(&c).unwrap();
        assert!(r.energy_trace.windows(2).all(|p| p[1].1 <= p[0].1));
        assert!(r.n_minus.iter().all(|&x| x == 0));
        assert_eq!(r.h, window_h(r.window(), &r.interactions, &r.state));
        assert_eq!(r.energy_trace.len() as u64, r.total_accepted + 1);
    }
}

#[test]
fn fixed_initial_state_is_respected() {
    let mut c = square(3);
    let first = run(&c).unwrap();
    c.initial = InitialSource::Fixed {
        values: first.state.clone(),
    };
    c.interactions = InteractionSource::Fixed {
        values: first.interactions.clone(),
    };
    c.t_max = 1e-9;
    let r = run(&c).unwrap();
    assert_eq!(r.initial, first.state);
}
