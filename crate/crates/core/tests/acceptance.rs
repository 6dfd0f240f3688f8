//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line; run with
//! `cargo test -p ncrelay-core --test acceptance -- --nocapture`.

use std::time::{Duration, Instant};

use ncrelay_core::{
    build_relay_chain, build_source_chain, evaluate, first_passage, optimal_rate, optimize_alpha, simulate_chain,
    simulate_packets, state_count_relay, state_count_source, AbsorbingChain, ChannelParams, EnergyParams,
    ObjectiveKind, SchemeConfig, SimConfig, DEFAULT_GRID_POINTS,
};

fn report(id: u32, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("acceptance {id:02} {verdict} {name}: {detail}");
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}

fn ch(p_sd: f64, p_sr: f64, p_rd: f64) -> ChannelParams {
    ChannelParams::new(p_sd, p_sr, p_rd).unwrap()
}

fn start_time(chain: &AbsorbingChain) -> f64 {
    first_passage(chain).unwrap().times[chain.start_index()]
}

/// `p_sd` from 0.05 to 1 in steps of 0.05.
fn p_sd_grid() -> Vec<f64> {
    (1..=20).map(|i| i as f64 * 0.05).collect()
}

#[test]
fn c01_fluid_flow_closed_form() {
    let started = Instant::now();
    let c = ch(0.5, 0.8, 0.8);
    let s = optimal_rate(&c);
    // Independent oracle: maximize the binding cut on a 1e-4 alpha grid.
    let mut oracle = (0.0, 0.0);
    for i in 0..=10_000 {
        let a = i as f64 * 1e-4;
        let r = (a * (0.8 + 0.5 - 0.4)).min(a * 0.5 + (1.0 - a) * 0.8);
        if r > oracle.0 {
            oracle = (r, a);
        }
    }
    let elapsed = started.elapsed();
    let pass = (s.rate - 0.6).abs() <= 1e-9
        && (s.alpha - 2.0 / 3.0).abs() <= 1e-9
        && (s.rate - oracle.0).abs() <= 1e-3
        && (s.alpha - oracle.1).abs() <= 1e-3
        && elapsed < Duration::from_secs(1);
    let detail = format!(
        "R*={} alpha*={} oracle=({}, {}) in {elapsed:?}",
        s.rate, s.alpha, oracle.0, oracle.1
    );
    report(1, "fluid-flow optimum", pass, &detail);
}

#[test]
fn c02_arq_anchor() {
    let t = start_time(&build_relay_chain(1, 1.0, &ch(0.5, 0.8, 0.8)).unwrap());
    report(2, "ARQ T/n", (t - 2.0).abs() <= 1e-10, &format!("T/n={t}"));
}

#[test]
fn c03_coupon_collector_anchor() {
    let t = start_time(&build_relay_chain(2, 1.0, &ch(0.5, 0.8, 0.8)).unwrap()) / 2.0;
    report(3, "coupon collector T/n", (t - 3.0).abs() <= 1e-10, &format!("T/n={t}"));
}

#[test]
fn c04_state_counts() {
    let relay = build_relay_chain(2, 0.5, &ch(0.5, 0.8, 0.8)).unwrap().len();
    let source = build_source_chain(2, 2, 0.5, &ch(0.5, 0.8, 0.8)).unwrap().len();
    let pass = relay == 11 && source == 15 && state_count_relay(2) == 11 && state_count_source(2, 2) == 15;
    report(
        4,
        "state counts",
        pass,
        &format!("relay n=2: {relay}, source n=x=2: {source}"),
    );
}

#[test]
fn c05_energy_checkpoints() {
    let unit = EnergyParams::unit();
    let c = ch(1.0, 0.8, 0.8);
    let cases = [
        ("both", SchemeConfig::both(10, 1.0).unwrap(), 2.0),
        ("source-only n=10", SchemeConfig::source_only(10, 10, 1.0).unwrap(), 2.1),
        ("relay-only n=2", SchemeConfig::relay_only(2, 1.0).unwrap(), 2.0),
        ("ARQ n=1", SchemeConfig::relay_only(1, 1.0).unwrap(), 2.0),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (label, cfg, want) in cases {
        let got = evaluate(&cfg, &c, &unit).unwrap().e_per_packet;
        pass &= (got - want).abs() <= 1e-9;
        parts.push(format!("{label}={got}"));
    }
    report(5, "energy per packet at p_sd=1", pass, &parts.join(", "));
}

#[test]
fn c06_source_only_rate_floor() {
    let started = Instant::now();
    let unit = EnergyParams::unit();
    let base = SchemeConfig::source_only(10, 10, 1.0).unwrap();
    let mut worst = (f64::INFINITY, 0.0);
    for p_sd in p_sd_grid() {
        let c = ch(p_sd, 0.8, 0.8);
        let opt = optimize_alpha(&base, &c, &unit, ObjectiveKind::Time, DEFAULT_GRID_POINTS).unwrap();
        let ratio = (10.0 / opt.objective) / optimal_rate(&c).rate;
        if ratio < worst.0 {
            worst = (ratio, p_sd);
        }
    }
    let elapsed = started.elapsed();
    let pass = worst.0 >= 0.69 && elapsed < Duration::from_secs(300);
    let detail = format!("min ratio {:.4} at p_sd={:.2} in {elapsed:?}", worst.0, worst.1);
    report(6, "source-only rate floor", pass, &detail);
}

#[test]
fn c07_memory_sufficiency() {
    let unit = EnergyParams::unit();
    let c = ch(0.25, 0.8, 0.8);
    let t = |x: usize| {
        let base = SchemeConfig::source_only(10, x, 1.0).unwrap();
        optimize_alpha(&base, &c, &unit, ObjectiveKind::Time, DEFAULT_GRID_POINTS)
            .unwrap()
            .objective
            / 10.0
    };
    let (t3, t10) = (t(3), t(10));
    let rel = (t3 - t10).abs() / t10;
    report(
        7,
        "memory x=3 suffices",
        rel <= 0.01,
        &format!("T/n x=3: {t3}, x=10: {t10}, rel {rel:.3e}"),
    );
}

#[test]
fn c08_relay_cutoff() {
    let unit = EnergyParams::unit();
    let base = SchemeConfig::source_only(10, 10, 1.0).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for p_sd in p_sd_grid() {
        let opt = optimize_alpha(
            &base,
            &ch(p_sd, 0.8, 0.8),
            &unit,
            ObjectiveKind::Time,
            DEFAULT_GRID_POINTS,
        )
        .unwrap();
        let ok = if p_sd >= 0.45 - 1e-12 {
            opt.alpha_star == 1.0
        } else {
            opt.alpha_star < 1.0
        };
        pass &= ok;
        parts.push(format!("{p_sd:.2}:{:.4}", opt.alpha_star));
    }
    report(8, "source-only relay cutoff", pass, &parts.join(" "));
}

#[test]
fn c09_relay_only_alpha_anchor() {
    let base = SchemeConfig::relay_only(1, 1.0).unwrap();
    let opt = optimize_alpha(
        &base,
        &ch(0.2, 0.8, 0.8),
        &EnergyParams::unit(),
        ObjectiveKind::Time,
        DEFAULT_GRID_POINTS,
    )
    .unwrap();
    let pass = (opt.alpha_star - 0.65).abs() <= 0.05;
    report(
        9,
        "relay-only alpha* at n=1",
        pass,
        &format!("alpha*={}", opt.alpha_star),
    );
}

#[test]
fn c10_chain_simulation_agreement() {
    let started = Instant::now();
    let unit = EnergyParams::unit();
    let channels = [ch(0.5, 0.8, 0.8), ch(0.2, 0.8, 0.8), ch(0.8, 0.4, 0.6)];
    let mut checked = 0;
    let mut failures = Vec::new();
    let mut worst_z: f64 = 0.0;
    for (ci, c) in channels.iter().enumerate() {
        for n in [1usize, 2, 5, 10] {
            for alpha in [0.25, 0.5, 0.75, 1.0] {
                for chain in [
                    build_relay_chain(n, alpha, c).unwrap(),
                    build_source_chain(n, n, alpha, c).unwrap(),
                ] {
                    let seed = 10_000 + checked as u64;
                    let t = start_time(&chain);
                    let est = simulate_chain(&chain, &unit, &SimConfig::new(100_000, seed)).unwrap();
                    let z = (est.mean_t - t).abs() / est.std_err_t;
                    worst_z = worst_z.max(z);
                    if !est.time_within(t, 3.0) {
                        failures.push(format!("{} n={n} alpha={alpha} channel#{ci}: z={z:.2}", chain.scheme()));
                    }
                    checked += 1;
                }
            }
        }
    }
    let elapsed = started.elapsed();
    let pass = failures.is_empty() && elapsed < Duration::from_secs(600);
    let detail = format!("{checked} chains, max |z| {worst_z:.2}, in {elapsed:?}; failures: {failures:?}");
    report(10, "chain solver vs chain simulation", pass, &detail);
}

#[test]
fn c11_packet_simulation_not_faster_than_relay_chain() {
    let unit = EnergyParams::unit();
    let c = ch(0.5, 0.8, 0.8);
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [2usize, 3, 4] {
        let base = SchemeConfig::relay_only(n, 1.0).unwrap();
        let alpha_star = optimize_alpha(&base, &c, &unit, ObjectiveKind::Time, DEFAULT_GRID_POINTS)
            .unwrap()
            .alpha_star;
        for alpha in [0.5, alpha_star] {
            let t = start_time(&build_relay_chain(n, alpha, &c).unwrap());
            let cfg = base.with_alpha(alpha).unwrap();
            let est = simulate_packets(&cfg, &c, &unit, &SimConfig::new(50_000, 500 + n as u64)).unwrap();
            pass &= est.mean_t >= t - 3.0 * est.std_err_t;
            parts.push(format!(
                "n={n} alpha={alpha:.4}: sim {:.4}±{:.4} chain {t:.4} gap {:+.4}",
                est.mean_t,
                est.std_err_t,
                est.mean_t - t
            ));
        }
    }
    report(11, "packet simulation vs relay-only chain", pass, &parts.join("; "));
}

#[test]
fn c12_invariant_suites() {
    let unit = EnergyParams::unit();
    let probs = [0.1, 0.5, 0.9];
    let mut channels = Vec::new();
    for p_sd in probs {
        for p_sr in probs {
            for p_rd in probs {
                channels.push(ch(p_sd, p_sr, p_rd));
            }
        }
    }
    let alphas = [0.0, 0.25, 0.5, 0.75, 1.0];
    let mut chains = 0;
    let mut worst_row: f64 = 0.0;
    let mut worst_residual: f64 = 0.0;
    let mut topo_ok = true;
    for c in &channels {
        for &alpha in &alphas {
            let mut built = Vec::new();
            for n in [1usize, 2, 5, 10] {
                let chain = build_relay_chain(n, alpha, c).unwrap();
                topo_ok &= chain.verify_topological_order();
                built.push(chain);
                for x in [1, 2, 3, n] {
                    if x <= n {
                        built.push(build_source_chain(n, x, alpha, c).unwrap());
                    }
                }
            }
            for chain in built {
                worst_row = worst_row.max(chain.max_row_sum_error());
                // Chains that cannot finish have no solution to check.
                if let Ok(sol) = first_passage(&chain) {
                    worst_residual = worst_residual.max(sol.residual);
                }
                chains += 1;
            }
        }
    }

    let in_pool = |threads: usize, f: &(dyn Fn() -> (f64, f64) + Sync)| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(f)
    };
    let mid = ch(0.5, 0.8, 0.8);
    let chain = build_source_chain(8, 3, 0.6, &mid).unwrap();
    let cfg = SchemeConfig::relay_only(4, 0.6).unwrap();
    let run = || {
        let a = simulate_chain(&chain, &unit, &SimConfig::new(4_000, 21)).unwrap();
        let b = simulate_packets(&cfg, &mid, &unit, &SimConfig::new(2_000, 21)).unwrap();
        (a.mean_t, b.mean_t)
    };
    let reference = in_pool(1, &run);
    let deterministic = [2, 4, 8].iter().all(|&t| in_pool(t, &run) == reference);

    let pass = worst_row <= 1e-12 && topo_ok && worst_residual < 1e-9 && deterministic;
    let detail = format!(
        "{chains} chains: max row-sum error {worst_row:.1e}, relay topological order {topo_ok}, \
         max residual {worst_residual:.1e}, thread-count determinism {deterministic}"
    );
    report(12, "invariants", pass, &detail);
}
