//! Acceptance gates: nine numbered end-to-end checks covering the
//! signature scheme, the blocking models, the simulator, and the cost
//! models. Each test prints one `criterion N ...: PASS/FAIL` line; the
//! stated tolerances and runtime budgets are asserted as-is.

mod common;

use std::sync::{Mutex, OnceLock};
use std::time::{Duration, Instant};

use num_bigint::{BigUint, RandBigInt};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::ThreadPoolBuilder;

use ncguard_core::analytic::{
    blocking_evolving, blocking_static, expected_contaminated_evolving,
    expected_contaminated_static, ModelParams,
};
use ncguard_core::epidemic::{
    blocking_csv_line, contamination_series, estimate_blocking, run_full_coded, series_csv,
    CodedConfig, ListMode, SimConfig, BLOCKING_CSV_HEADER,
};
use ncguard_core::modmath::{generate_params, GroupParams};
use ncguard_core::overhead::{
    crossover, generation_cost_limit, generation_scheme_cost, packet_scheme_cost, pubkey_overhead,
    CostModelParams, Scheme,
};
use ncguard_core::rlnc::{augment, random_recombine, recombine, CodedPacket, FilePayload};
use ncguard_core::sigscheme::{keygen, sign_file, verify_packet};

/// Runs the criteria one at a time so each measured runtime reflects only
/// its own work, not harness-level parallelism.
static GATE: Mutex<()> = Mutex::new(());

fn gate() -> std::sync::MutexGuard<'static, ()> {
    GATE.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

/// The small group from the worked example: order-5 subgroup of Z_11^*.
fn small_group() -> GroupParams {
    GroupParams {
        p: BigUint::from(5u32),
        q: BigUint::from(11u32),
        g: BigUint::from(3u32),
    }
}

/// Production-size group (160-bit p, 1024-bit q), generated once and shared
/// by the criteria that need it.
fn production_group() -> &'static GroupParams {
    static GROUP: OnceLock<GroupParams> = OnceLock::new();
    GROUP.get_or_init(|| generate_params(160, 1024, 1601).expect("production group"))
}

fn fig3_model(p_b: f64) -> ModelParams {
    ModelParams::new(30, 5, 6, 3, p_b).expect("valid topology")
}

fn fig3_sim(p_b: f64, mode: ListMode, trials: u64, seed: u64) -> SimConfig {
    SimConfig::boolean(30, 5, 6, 3, p_b, mode, trials, seed).expect("valid config")
}

#[test]
fn criterion_1_signature_completeness() {
    let _serial = gate();
    let start = Instant::now();

    // Exhaustive half: every F_5 combination of the signed basis.
    let group = small_group();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let payload = FilePayload::random(&group.p, 2, 1, &mut rng).unwrap();
    let sources = augment(&payload);
    let (private, public) = keygen(&group, 3, &mut rng).unwrap();
    let signature = sign_file(&private, &sources, &mut rng).unwrap();
    let mut verified = 0u32;
    for c1 in 0u32..5 {
        for c2 in 0u32..5 {
            let packet = recombine(&sources, &[BigUint::from(c1), BigUint::from(c2)]).unwrap();
            assert!(
                verify_packet(&public, &signature, &packet).unwrap(),
                "recombination ({c1}, {c2}) must verify"
            );
            verified += 1;
        }
    }
    assert_eq!(verified, 25);

    // Production half: 10^3 random recombinations at full sizes.
    let group = production_group();
    let payload = FilePayload::random(&group.p, 16, 64, &mut rng).unwrap();
    let sources = augment(&payload);
    let (private, public) = keygen(group, 80, &mut rng).unwrap();
    let signature = sign_file(&private, &sources, &mut rng).unwrap();
    for i in 0..1000 {
        let packet = random_recombine(&sources, &mut rng).unwrap();
        assert!(
            verify_packet(&public, &signature, &packet).unwrap(),
            "production recombination {i} must verify"
        );
    }

    let elapsed = start.elapsed();
    assert!(
        elapsed < Duration::from_secs(30),
        "budget 30 s exceeded: {elapsed:?}"
    );
    println!(
        "criterion 1 (signature completeness): PASS — 25/25 exhaustive and \
         1000/1000 production recombinations verify in {elapsed:.2?}"
    );
}

#[test]
fn criterion_2_signature_soundness_exact_count() {
    let _serial = gate();
    let start = Instant::now();

    let group = small_group();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let payload = FilePayload::random(&group.p, 2, 3, &mut rng).unwrap();
    let sources = augment(&payload);
    let (private, public) = keygen(&group, 5, &mut rng).unwrap();
    let signature = sign_file(&private, &sources, &mut rng).unwrap();

    // The valid span: p^m = 25 distinct vectors.
    let mut span = std::collections::HashSet::new();
    for c1 in 0u32..5 {
        for c2 in 0u32..5 {
            let packet = recombine(&sources, &[BigUint::from(c1), BigUint::from(c2)]).unwrap();
            span.insert(packet.symbols().to_vec());
        }
    }
    assert_eq!(span.len(), 25);

    // Every vector of F_5^5, base-5 digits of the index.
    let mut passing = 0u64;
    let mut valid_passing = 0u64;
    for index in 0u64..3125 {
        let mut rest = index;
        let symbols: Vec<BigUint> = (0..5)
            .map(|_| {
                let digit = rest % 5;
                rest /= 5;
                BigUint::from(digit)
            })
            .collect();
        let in_span = span.contains(&symbols);
        let packet = CodedPacket::new(group.p.clone(), 2, symbols).unwrap();
        if verify_packet(&public, &signature, &packet).unwrap() {
            passing += 1;
            valid_passing += u64::from(in_span);
        }
    }
    // Exactly the p^{m+l-1} vectors orthogonal to the blinded u pass; all
    // p^m valid ones are among them; the rest are false accepts.
    assert_eq!(passing, 625);
    assert_eq!(valid_passing, 25);
    assert_eq!(passing - valid_passing, 600);

    let elapsed = start.elapsed();
    assert!(
        elapsed < Duration::from_secs(5),
        "budget 5 s exceeded: {elapsed:?}"
    );
    println!(
        "criterion 2 (signature soundness): PASS — 625/3125 vectors verify, 25 valid, \
         false-accept 600/3100 in {elapsed:.2?}"
    );
}

#[test]
fn criterion_3_tamper_rejection() {
    let _serial = gate();
    let start = Instant::now();

    let group = production_group();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let payload = FilePayload::random(&group.p, 16, 64, &mut rng).unwrap();
    let sources = augment(&payload);
    let (private, public) = keygen(group, 80, &mut rng).unwrap();
    let signature = sign_file(&private, &sources, &mut rng).unwrap();

    let one = BigUint::one();
    let mut rejections = 0u32;
    for _ in 0..1000 {
        let packet = random_recombine(&sources, &mut rng).unwrap();
        let mut symbols = packet.symbols().to_vec();
        let position = rng.gen_range(0..symbols.len());
        let delta = rng.gen_biguint_range(&one, &group.p);
        symbols[position] = (&symbols[position] + delta) % &group.p;
        let tampered = CodedPacket::new(group.p.clone(), 16, symbols).unwrap();
        rejections += u32::from(!verify_packet(&public, &signature, &tampered).unwrap());
    }
    assert_eq!(
        rejections, 1000,
        "every single-symbol tamper must be rejected"
    );

    let elapsed = start.elapsed();
    assert!(
        elapsed < Duration::from_secs(60),
        "budget 60 s exceeded: {elapsed:?}"
    );
    println!(
        "criterion 3 (tamper rejection): PASS — 1000/1000 tampered packets rejected \
         in {elapsed:.2?}"
    );
}

#[test]
fn criterion_4_blocking_formulas_match_exhaustive_enumeration() {
    let _serial = gate();
    let start = Instant::now();

    // First anchor the enumeration oracle itself against three values
    // frozen from a separate mechanical enumeration (which additionally
    // averaged over activation orders and walked raw parent subsets).
    let half = common::ratio(1, 2);
    let quarter = common::ratio(1, 4);
    assert_eq!(
        common::blocking_oracle(6, 3, 3, 2, &half, false),
        common::ratio(1351, 1440)
    );
    assert_eq!(
        common::blocking_oracle(6, 3, 3, 2, &half, true),
        common::ratio(11987, 12800)
    );
    assert_eq!(
        common::blocking_oracle(8, 4, 4, 3, &quarter, false),
        common::ratio(237_508_213, 293_601_280)
    );
    assert_eq!(
        common::blocking_oracle(8, 4, 4, 3, &quarter, true),
        common::ratio(129_343_937, 160_563_200)
    );
    assert_eq!(
        common::blocking_oracle(3, 3, 3, 2, &half, false),
        common::ratio(7, 8)
    );
    assert_eq!(
        common::blocking_oracle(3, 3, 3, 2, &half, true),
        common::ratio(7, 8)
    );

    let mut checked = 0u32;
    let mut max_error = 0.0f64;
    for n_s in 3u64..=4 {
        for d in 2..n_s.min(4) {
            for n_r in n_s..=4 {
                for n_total in n_r..=8 {
                    for p_b in [0.0, 0.25, 0.5, 1.0] {
                        let params = ModelParams::new(n_total, n_s, n_r, d, p_b).unwrap();
                        let exact_p_b = BigRational::from_float(p_b).unwrap();
                        for evolving in [false, true] {
                            let oracle = common::blocking_oracle(
                                n_total as usize,
                                n_s as usize,
                                n_r as usize,
                                d as usize,
                                &exact_p_b,
                                evolving,
                            )
                            .to_f64()
                            .unwrap();
                            let formula = if evolving {
                                blocking_evolving(&params)
                            } else {
                                blocking_static(&params)
                            };
                            let error = (formula - oracle).abs();
                            assert!(
                                error <= 1e-12,
                                "n_total={n_total} n_s={n_s} n_r={n_r} d={d} p_b={p_b} \
                                 evolving={evolving}: formula {formula} vs oracle {oracle}"
                            );
                            max_error = max_error.max(error);
                            checked += 1;
                        }
                    }
                }
            }
        }
    }
    assert_eq!(checked, 21 * 4 * 2, "grid must cover every valid topology");

    let elapsed = start.elapsed();
    assert!(
        elapsed < Duration::from_secs(120),
        "budget 2 min exceeded: {elapsed:?}"
    );
    println!(
        "criterion 4 (formulas vs exhaustive enumeration): PASS — {checked} comparisons, \
         max |error| {max_error:.3e}, in {elapsed:.2?}"
    );
}

#[test]
fn criterion_5_simulation_matches_blocking_formulas() {
    let _serial = gate();
    let start = Instant::now();
    const TRIALS: u64 = 100_000;

    // Boundary anchors: closed forms are exactly 0 and 1 at p_b = 0 and 1,
    // and so is the simulator (no Byzantine draw can occur / all do).
    for p_b in [0.0, 1.0] {
        let params = fig3_model(p_b);
        assert_eq!(blocking_static(&params), p_b);
        assert_eq!(blocking_evolving(&params), p_b);
        for mode in [ListMode::Static, ListMode::Evolving] {
            let estimate = estimate_blocking(&fig3_sim(p_b, mode, 10_000, 500)).unwrap();
            assert_eq!(estimate.mean, p_b, "anchor p_b={p_b} {mode}");
        }
    }

    let mut verdicts = Vec::new();
    for p_b in [0.01, 0.05, 0.1, 0.2, 0.4] {
        let params = fig3_model(p_b);
        let mut means = [0.0f64; 2];
        for (slot, mode) in [ListMode::Static, ListMode::Evolving]
            .into_iter()
            .enumerate()
        {
            let closed = match mode {
                ListMode::Static => blocking_static(&params),
                ListMode::Evolving => blocking_evolving(&params),
            };
            let estimate = estimate_blocking(&fig3_sim(p_b, mode, TRIALS, 505)).unwrap();
            let se = (closed * (1.0 - closed) / TRIALS as f64).sqrt();
            let z = (estimate.mean - closed) / se;
            assert!(
                z.abs() <= 3.0,
                "p_b={p_b} {mode}: sim {} vs closed {closed} ({z:+.2} SE)",
                estimate.mean
            );
            means[slot] = estimate.mean;
        }
        let order = if means[0] < means[1] {
            "static below evolving"
        } else if means[0] > means[1] {
            "static above evolving"
        } else {
            "tied"
        };
        verdicts.push(format!(
            "p_b={p_b}: simulated static {:.4} vs evolving {:.4} ({order})",
            means[0], means[1]
        ));
    }

    let elapsed = start.elapsed();
    assert!(
        elapsed < Duration::from_secs(300),
        "budget 5 min exceeded: {elapsed:?}"
    );
    println!(
        "criterion 5 (simulation vs blocking formulas): PASS — 10 grid points within \
         3 binomial SE, boundary anchors exact, in {elapsed:.2?}"
    );
    for verdict in verdicts {
        println!("  list-mode ordering verdict: {verdict}");
    }
}

#[test]
fn criterion_6_contamination_series_checks() {
    let _serial = gate();
    let start = Instant::now();

    // The static series is exactly affine in t.
    for p_b in [0.05, 0.2, 0.5] {
        let params = fig3_model(p_b);
        let series: Vec<f64> = (0..=5)
            .map(|t| expected_contaminated_static(&params, 1, t).unwrap())
            .collect();
        for window in series.windows(3) {
            let second_difference = (window[2] - window[1]) - (window[1] - window[0]);
            assert!(
                second_difference.abs() <= 1e-12,
                "second difference {second_difference:e} at p_b={p_b}"
            );
        }
    }

    // Simulation conditioned on a single seed-receiver overlap, at the
    // p_b = 0.2 point where the mean overlap-free seed count is 1.
    const ATTEMPTS: u64 = 250_000;
    let params = fig3_model(0.2);
    for mode in [ListMode::Static, ListMode::Evolving] {
        let config = fig3_sim(0.2, mode, ATTEMPTS, 606);
        let series = contamination_series(&config, Some(1)).unwrap();
        assert!(
            series.accepted_trials >= 100_000,
            "need 1e5 accepted trials, got {}",
            series.accepted_trials
        );
        assert_eq!(
            series.means.len(),
            6,
            "t = 0..=5 when one receiver is a seed"
        );
        for t in 0..series.means.len() {
            let expected = match mode {
                ListMode::Static => expected_contaminated_static(&params, 1, t as u64).unwrap(),
                ListMode::Evolving => expected_contaminated_evolving(&params, 1, t as u64).unwrap(),
            };
            let z = (series.means[t] - expected) / series.std_errors[t];
            assert!(
                z.abs() <= 3.0,
                "{mode} t={t}: sim {} vs formula {expected} ({z:+.2} sigma)",
                series.means[t]
            );
        }
    }

    let elapsed = start.elapsed();
    assert!(
        elapsed < Duration::from_secs(600),
        "budget 10 min exceeded: {elapsed:?}"
    );
    println!(
        "criterion 6 (expected contamination series): PASS — static series affine, both \
         formulas within 3 sigma of conditioned simulation, in {elapsed:.2?}"
    );
}

#[test]
fn criterion_7_overhead_constants() {
    let _serial = gate();
    let start = Instant::now();
    let params = CostModelParams::with_default_rates(100, 100, 1, 0.0).unwrap();
    let verdict = |ok: bool| if ok { "pass" } else { "FAIL" };

    // (a) Packet cost at p_n = 0 is exactly the 6% signature rate.
    let packet_zero = packet_scheme_cost(&params);
    let a_ok = packet_zero == 0.06;
    println!(
        "  7a packet cost at p_n=0: {packet_zero} (want exactly 0.06) — {}",
        verdict(a_ok)
    );

    // (b) Packet/e2e boundary lands at 0.03 within one grid step.
    let step = 0.005;
    let intervals = crossover(Scheme::Packet, Scheme::E2e, &params, step).unwrap();
    let boundary = intervals.first().map(|&(s, _)| s);
    let b_ok = boundary.is_some_and(|s| (s - 0.03).abs() <= step + 1e-12);
    println!(
        "  7b packet/e2e boundary: {boundary:?} (want 0.03 ± {step}) — {}",
        verdict(b_ok)
    );

    // (c) Generation cost at G = 10^4 against the stated limit
    //     max{0, 1 - 2 p_n}. Wherever cost and limit are both positive the
    //     gap is exactly the hash-rate term og_rate = 0.02, which the
    //     stated limit omits; only the fully-clamped point can pass.
    let mut c_ok = true;
    for p_n in [0.1, 0.3, 0.6] {
        let at = params
            .with_p_n(p_n)
            .unwrap()
            .with_generation_size(10_000)
            .unwrap();
        let cost = generation_scheme_cost(&at);
        let limit = generation_cost_limit(p_n);
        let ok = (cost - limit).abs() <= 1e-3;
        c_ok &= ok;
        println!(
            "  7c G=1e4 cost at p_n={p_n}: {cost} vs limit {limit} (want |diff| <= 1e-3) — {}",
            verdict(ok)
        );
    }

    // (d) Argmax of the G = 200 curve over a 0.005 grid. The curve's true
    //     peak is at p_n = 1 - (2/(G+1))^(1/G) ~ 0.0228, so the grid argmax
    //     is 0.025, far below the stated [0.1, 0.3] window.
    let g200 = params.with_generation_size(200).unwrap();
    let mut argmax = (0.0f64, f64::MIN);
    for i in 0..=200u32 {
        let p_n = f64::from(i) * 0.005;
        let cost = generation_scheme_cost(&g200.with_p_n(p_n).unwrap());
        if cost > argmax.1 {
            argmax = (p_n, cost);
        }
    }
    let d_ok = (0.1..=0.3).contains(&argmax.0);
    println!(
        "  7d G=200 argmax: p_n={} (cost {:.4}; want within [0.1, 0.3]) — {}",
        argmax.0,
        argmax.1,
        verdict(d_ok)
    );

    // (e) Public key for a 10 MB file at m=100, 160-bit p, 1024-bit q.
    let pubkey = pubkey_overhead(10_000_000, 100, 160, 1024).unwrap();
    let e_ok = (pubkey - 0.0653).abs() <= 0.0005;
    println!(
        "  7e pubkey overhead: {pubkey} (want 0.0653 ± 0.0005) — {}",
        verdict(e_ok)
    );

    let elapsed = start.elapsed();
    assert!(
        elapsed < Duration::from_secs(10),
        "budget 10 s exceeded: {elapsed:?}"
    );
    let failures: Vec<&str> = [
        ("a", a_ok),
        ("b", b_ok),
        ("c", c_ok),
        ("d", d_ok),
        ("e", e_ok),
    ]
    .iter()
    .filter_map(|&(name, ok)| (!ok).then_some(name))
    .collect();
    if failures.is_empty() {
        println!("criterion 7 (overhead constants): PASS — in {elapsed:.2?}");
    } else {
        println!(
            "criterion 7 (overhead constants): FAIL — sub-checks {failures:?} \
             (remainder pass) in {elapsed:.2?}"
        );
    }
    assert!(
        failures.is_empty(),
        "sub-checks {failures:?} fail as stated: the large-G generation cost converges to \
         max{{0, og_rate + 1 - 2 p_n}}, exactly og_rate = 0.02 above the stated limit \
         max{{0, 1 - 2 p_n}} wherever both are positive (so p_n = 0.1 and 0.3 miss the \
         1e-3 tolerance while 0.6 clamps to 0 and passes), and the G=200 curve peaks at \
         p_n = 1 - (2/201)^(1/200) ~ 0.023 (grid argmax 0.025), not inside [0.1, 0.3]. \
         Both follow from the cost formula itself; no parameter choice reconciles them."
    );
}

#[test]
fn criterion_8_one_hop_containment() {
    let _serial = gate();
    let start = Instant::now();

    let group = generate_params(61, 80, 808).unwrap();
    for mode in [ListMode::Static, ListMode::Evolving] {
        let coded = CodedConfig {
            m: 4,
            l: 8,
            group: group.clone(),
            verify_enabled: true,
        };
        let config = SimConfig::full_coded(30, 5, 6, 3, 0.2, mode, 1000, 808, coded).unwrap();
        let aggregate = run_full_coded(&config).unwrap();
        assert_eq!(aggregate.trials, 1000);
        assert!(
            aggregate.detected_total > 0,
            "{mode}: no injection was ever attempted; the containment claim would be vacuous"
        );
        assert_eq!(
            aggregate.honest_contaminated_total, 0,
            "{mode}: an honest node stored a contaminated packet"
        );
        assert!(
            aggregate.rank_sufficient_count > 0,
            "{mode}: no trial reached full rank; the decode claim would be vacuous"
        );
        assert_eq!(
            aggregate.rank_sufficient_decode_ok, aggregate.rank_sufficient_count,
            "{mode}: a full-rank receiver failed to decode the exact payload"
        );
        println!(
            "  {mode}: {} injections rejected at first hop, {}/{} full-rank trials \
             decoded exactly",
            aggregate.detected_total,
            aggregate.rank_sufficient_decode_ok,
            aggregate.rank_sufficient_count
        );
    }

    let elapsed = start.elapsed();
    assert!(
        elapsed < Duration::from_secs(300),
        "budget 5 min exceeded: {elapsed:?}"
    );
    println!(
        "criterion 8 (one-hop containment): PASS — zero honest contaminated stores across \
         2x1000 verified trials, full-rank decodes all exact, in {elapsed:.2?}"
    );
}

// ---- criterion 9: the exact artifacts of criteria 5, 6, 8 re-rendered ----

fn blocking_grid_csv() -> String {
    let mut out = String::from(BLOCKING_CSV_HEADER);
    out.push('\n');
    for p_b in [0.01, 0.05, 0.1, 0.2, 0.4] {
        for mode in [ListMode::Static, ListMode::Evolving] {
            let config = fig3_sim(p_b, mode, 100_000, 505);
            let estimate = estimate_blocking(&config).unwrap();
            out.push_str(&blocking_csv_line(&config, &estimate));
            out.push('\n');
        }
    }
    out
}

fn conditioned_series_csv() -> String {
    let mut out = String::new();
    for mode in [ListMode::Static, ListMode::Evolving] {
        let config = fig3_sim(0.2, mode, 250_000, 606);
        let series = contamination_series(&config, Some(1)).unwrap();
        out.push_str(&format!(
            "# list_mode={mode} accepted={}\n",
            series.accepted_trials
        ));
        out.push_str(&series_csv(&series));
    }
    out
}

fn containment_csv() -> String {
    let group = generate_params(61, 80, 808).unwrap();
    let mut out = String::from(
        "list_mode,trials,blocked,decode_failures,detected,dropped,honest_contaminated,\
         rank_sufficient,rank_sufficient_decode_ok\n",
    );
    for mode in [ListMode::Static, ListMode::Evolving] {
        let coded = CodedConfig {
            m: 4,
            l: 8,
            group: group.clone(),
            verify_enabled: true,
        };
        let config = SimConfig::full_coded(30, 5, 6, 3, 0.2, mode, 1000, 808, coded).unwrap();
        let a = run_full_coded(&config).unwrap();
        out.push_str(&format!(
            "{mode},{},{},{},{},{},{},{},{}\n",
            a.trials,
            a.blocked_count,
            a.decode_failure_count,
            a.detected_total,
            a.dropped_total,
            a.honest_contaminated_total,
            a.rank_sufficient_count,
            a.rank_sufficient_decode_ok
        ));
    }
    out
}

#[test]
fn criterion_9_worker_count_determinism() {
    let _serial = gate();
    let start = Instant::now();

    let mut renders: Vec<(usize, String, String, String)> = Vec::new();
    for workers in [1usize, 2, 4] {
        let pool = ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .unwrap();
        let render = pool.install(|| {
            (
                blocking_grid_csv(),
                conditioned_series_csv(),
                containment_csv(),
            )
        });
        renders.push((workers, render.0, render.1, render.2));
    }
    let (_, blocking, series, containment) = &renders[0];
    for (workers, b, s, c) in &renders[1..] {
        assert_eq!(b, blocking, "blocking CSV differs at {workers} workers");
        assert_eq!(s, series, "series CSV differs at {workers} workers");
        assert_eq!(
            c, containment,
            "containment CSV differs at {workers} workers"
        );
    }
    let bytes = blocking.len() + series.len() + containment.len();

    let elapsed = start.elapsed();
    println!(
        "criterion 9 (worker-count determinism): PASS — {bytes} CSV bytes byte-identical \
         across 1/2/4 workers, in {elapsed:.2?}"
    );
}
