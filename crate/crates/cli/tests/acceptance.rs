//! Acceptance gate: six end-to-end criteria, one printed verdict line each.
//!
//! Every tolerance and runtime cap is pinned as a named constant next to
//! the criterion that uses it. The criteria run sequentially inside a
//! single test so their wall-clock caps are not distorted by parallel
//! test scheduling; run with `--nocapture` to see the verdict lines.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use tsa_core::catalog::{load_scenario, parse_tle, GroundStation, TleRecord};
use tsa_core::interaction::{analyze_interactions, count_pulses, PmfPooling};
use tsa_core::pipeline::ScenarioEngine;
use tsa_core::propagator::{Propagator, Site};
use tsa_core::spectra::{gram, gram_eigen, rank_stations, SpectrumMatrix};
use tsa_core::time::UtcTime;
use tsa_core::visibility::{access_windows, GlobalWindow, VisibilityConfig};

#[test]
fn acceptance() {
    let verdicts = [
        run_criterion(1, "sgp4 verification vectors", criterion_1),
        run_criterion(2, "visibility oracle equivalence", criterion_2),
        run_criterion(3, "gram/eigen property suite", criterion_3),
        run_criterion(4, "pulse-count oracle", criterion_4),
        run_criterion(5, "qualitative interaction reproduction", criterion_5),
        run_criterion(6, "worker-count determinism", criterion_6),
    ];
    let failed = verdicts.iter().filter(|ok| !**ok).count();
    assert!(failed == 0, "{failed} acceptance criteria failed");
}

fn run_criterion(number: u32, name: &str, criterion: fn() -> Vec<String>) -> bool {
    let started = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(criterion));
    let elapsed = started.elapsed().as_secs_f64();
    let failures = outcome.unwrap_or_else(|panic| {
        let message = panic
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "non-string panic".into());
        vec![format!("panicked: {message}")]
    });
    if failures.is_empty() {
        println!("criterion {number} ({name}): PASS [{elapsed:.2} s]");
        true
    } else {
        println!("criterion {number} ({name}): FAIL [{elapsed:.2} s]");
        for failure in failures.iter().take(20) {
            println!("  - {failure}");
        }
        if failures.len() > 20 {
            println!("  - ... and {} more", failures.len() - 20);
        }
        false
    }
}

fn check_runtime(failures: &mut Vec<String>, started: Instant, cap_s: f64) {
    let elapsed = started.elapsed().as_secs_f64();
    if elapsed > cap_s {
        failures.push(format!("runtime {elapsed:.2} s exceeds the {cap_s} s cap"));
    }
}

fn test_data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn bundled_data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

// --- criterion 1: SGP4 verification vectors -----------------------------

/// Maximum absolute per-axis position deviation from the reference states.
const C1_POSITION_TOLERANCE_KM: f64 = 1e-3;
const C1_RUNTIME_CAP_S: f64 = 5.0;
/// The vendored file carries 668 states; a sanity floor guards against a
/// silently truncated fixture.
const C1_MIN_STATES: usize = 600;

#[derive(Deserialize)]
struct VerificationFile {
    list: Vec<VerificationCase>,
}

#[derive(Deserialize)]
struct VerificationCase {
    line1: String,
    line2: String,
    states: Vec<VerificationState>,
}

#[derive(Deserialize)]
struct VerificationState {
    /// Minutes since the element set epoch.
    time: f64,
    #[serde(default)]
    position: Option<[f64; 3]>,
    #[serde(default)]
    error: Option<String>,
}

fn criterion_1() -> Vec<String> {
    let started = Instant::now();
    let mut failures = Vec::new();
    let text = std::fs::read_to_string(test_data("sgp4_verification.toml")).unwrap();
    let file: VerificationFile = toml::from_str(&text).unwrap();
    let mut checked = 0usize;
    for case in &file.list {
        let records = match parse_tle(&format!("{}\n{}\n", case.line1, case.line2)) {
            Ok(records) => records,
            Err(e) => {
                failures.push(format!("{}: parse failed: {e}", &case.line1[2..7]));
                continue;
            }
        };
        let record = &records[0];
        let expects_only_errors = case.states.iter().all(|s| s.error.is_some());
        let propagator = match Propagator::new(record) {
            Ok(p) => p,
            // Some reference sets are built to fail; rejecting them at
            // initialization satisfies the same expectation.
            Err(_) if expects_only_errors => continue,
            Err(e) => {
                failures.push(format!("{}: initialization failed: {e}", record.id()));
                continue;
            }
        };
        for state in &case.states {
            let t = propagator.epoch().plus_seconds(state.time * 60.0);
            match (&state.error, propagator.propagate_teme(t)) {
                (Some(_), Err(_)) => {}
                (Some(expected), Ok(_)) => failures.push(format!(
                    "{} at {} min: propagation succeeded but the reference expects \"{expected}\"",
                    record.id(),
                    state.time
                )),
                (None, Err(e)) => failures.push(format!(
                    "{} at {} min: {e}",
                    record.id(),
                    state.time
                )),
                (None, Ok(teme)) => {
                    let reference = state.position.expect("reference position");
                    for axis in 0..3 {
                        let delta = (teme.position_km[axis] - reference[axis]).abs();
                        if delta > C1_POSITION_TOLERANCE_KM {
                            failures.push(format!(
                                "{} at {} min, axis {axis}: off by {delta:.3e} km",
                                record.id(),
                                state.time
                            ));
                        }
                    }
                    checked += 1;
                }
            }
        }
    }
    if checked < C1_MIN_STATES {
        failures.push(format!("only {checked} reference states checked"));
    }
    check_runtime(&mut failures, started, C1_RUNTIME_CAP_S);
    failures
}

// --- criterion 2: visibility oracle equivalence --------------------------

/// Refined window boundaries must sit within one sampling step of the
/// exhaustive 1 s oracle's boundaries.
const C2_BOUNDARY_TOLERANCE_S: f64 = 1.0;
const C2_SPAN_S: f64 = 7200.0;
const C2_MASK_DEG: f64 = 10.0;
const C2_RUNTIME_CAP_S: f64 = 30.0;

fn criterion_2() -> Vec<String> {
    let started = Instant::now();
    let mut failures = Vec::new();

    let mut satellites: Vec<TleRecord> = Vec::new();
    for (file, take) in [("triple/oneweb.tle", 2), ("triple/starlink.tle", 3)] {
        let text = std::fs::read_to_string(bundled_data(file)).unwrap();
        satellites.extend(parse_tle(&text).unwrap().into_iter().take(take));
    }
    let station = |id: &str, lat: f64, lon: f64, alt: f64| GroundStation {
        id: id.into(),
        latitude_deg: lat,
        longitude_deg: lon,
        altitude_m: alt,
        constellation: "probe".into(),
    };
    let stations = [
        station("mid-north", 45.0, 7.5, 250.0),
        station("equatorial", -0.2, -78.5, 2850.0),
        station("mid-south", -33.9, 18.4, 25.0),
    ];
    let span_start = UtcTime::parse_iso("2026-08-22T00:00:00Z").unwrap();
    let span_end = span_start.plus_seconds(C2_SPAN_S);
    let config = VisibilityConfig {
        min_elevation_deg: C2_MASK_DEG,
        ..VisibilityConfig::default()
    };

    let mut total_windows = 0usize;
    for ground in &stations {
        let site = Site::new(ground);
        for record in &satellites {
            let propagator = Propagator::new(record).unwrap();
            let windows =
                access_windows(&site, &propagator, span_start, span_end, &config).unwrap();
            total_windows += windows.len();

            // Exhaustive oracle: sample the visibility predicate at every
            // whole second; a window is a maximal run of visible ticks.
            let mut oracle: Vec<(f64, f64)> = Vec::new();
            let mut open: Option<u64> = None;
            let ticks = C2_SPAN_S as u64;
            for k in 0..=ticks {
                let visible = if k < ticks {
                    let t = span_start.plus_seconds(k as f64);
                    let position = propagator.propagate_ecef(t).unwrap();
                    site.elevation_deg(&position) >= C2_MASK_DEG
                } else {
                    false
                };
                match (open, visible) {
                    (None, true) => open = Some(k),
                    (Some(first), false) => {
                        oracle.push((first as f64, k as f64));
                        open = None;
                    }
                    _ => {}
                }
            }

            let label = format!("{} / {}", ground.id, record.id());
            if windows.len() != oracle.len() {
                failures.push(format!(
                    "{label}: {} refined windows vs {} oracle windows",
                    windows.len(),
                    oracle.len()
                ));
                continue;
            }
            for (window, (oracle_start, oracle_end)) in windows.iter().zip(&oracle) {
                let start = window.start.seconds_since(span_start);
                let end = window.end.seconds_since(span_start);
                if (start - oracle_start).abs() > C2_BOUNDARY_TOLERANCE_S {
                    failures.push(format!(
                        "{label}: start {start:.3} s vs oracle {oracle_start} s"
                    ));
                }
                if (end - oracle_end).abs() > C2_BOUNDARY_TOLERANCE_S {
                    failures.push(format!("{label}: end {end:.3} s vs oracle {oracle_end} s"));
                }
            }
        }
    }
    if total_windows == 0 {
        failures.push("the probe scenario produced no windows to compare".into());
    }
    check_runtime(&mut failures, started, C2_RUNTIME_CAP_S);
    failures
}

// --- criterion 3: Gram/eigen property suite ------------------------------

const C3_TRIALS: usize = 200;
const C3_MAX_STATIONS: usize = 40;
const C3_MAX_SATELLITES: usize = 700;
/// A positive semi-definite spectrum may round to slightly negative
/// eigenvalues: tolerate at most this fraction of the largest one.
const C3_NEGATIVITY_RELATIVE: f64 = 1e-10;
const C3_TRACE_RELATIVE: f64 = 1e-8;
const C3_RESIDUAL_RELATIVE: f64 = 1e-8;
const C3_RUNTIME_CAP_S: f64 = 60.0;

fn criterion_3() -> Vec<String> {
    let started = Instant::now();
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e57_5eed);
    let gw = GlobalWindow {
        start: UtcTime::parse_iso("2026-08-22T00:00:00Z").unwrap(),
        end: UtcTime::parse_iso("2026-08-22T10:00:00Z").unwrap(),
    };
    let ids = |prefix: &str, n: usize| -> Vec<String> {
        (0..n).map(|i| format!("{prefix}{i}")).collect()
    };

    for trial in 0..C3_TRIALS {
        // The first trial exercises the full advertised size.
        let (g, x) = if trial == 0 {
            (C3_MAX_STATIONS, C3_MAX_SATELLITES)
        } else {
            (
                rng.gen_range(1..=C3_MAX_STATIONS),
                rng.gen_range(1..=C3_MAX_SATELLITES),
            )
        };
        let values: Vec<u64> = (0..g * x)
            .map(|_| {
                if rng.gen_bool(0.3) {
                    0
                } else {
                    rng.gen_range(0..=5000)
                }
            })
            .collect();
        let matrix = |values: Vec<u64>| SpectrumMatrix {
            constellation_id: "trial".into(),
            station_ids: ids("g", g),
            satellite_ids: ids("x", x),
            values,
            global_window: gw.clone(),
            alpha_s: 1,
        };
        let h = matrix(values.clone());
        let j = gram(&h);

        let mut fail = |message: String| failures.push(format!("trial {trial}: {message}"));
        for a in 0..g {
            for b in 0..a {
                if j[(a, b)] != j[(b, a)] {
                    fail(format!("J[{a}][{b}] != J[{b}][{a}]"));
                }
            }
        }
        let eigen = match gram_eigen(&j) {
            Ok(eigen) => eigen,
            Err(e) => {
                fail(format!("eigen failed: {e}"));
                continue;
            }
        };
        let largest = eigen.eigenvalues[0];
        let smallest = *eigen.eigenvalues.last().unwrap();
        if smallest < -C3_NEGATIVITY_RELATIVE * largest.max(0.0) {
            fail(format!("eigenvalue {smallest:.3e} below the PSD floor"));
        }
        let trace: f64 = (0..g).map(|i| j[(i, i)]).sum();
        let sum: f64 = eigen.eigenvalues.iter().sum();
        if (sum - trace).abs() > C3_TRACE_RELATIVE * trace.abs().max(f64::MIN_POSITIVE) {
            fail(format!("eigenvalue sum {sum:.6e} vs trace {trace:.6e}"));
        }
        let reconstructed = j.matmul(&eigen.vectors).unwrap();
        let mut residual = 0.0f64;
        for row in 0..g {
            for col in 0..g {
                let delta = reconstructed[(row, col)] - eigen.vectors[(row, col)] * eigen.eigenvalues[col];
                residual += delta * delta;
            }
        }
        let residual = residual.sqrt();
        if residual > C3_RESIDUAL_RELATIVE * j.frobenius_norm().max(f64::MIN_POSITIVE) {
            fail(format!("eigen residual {residual:.3e}"));
        }

        // Scaling H by a positive constant must not change the ranking.
        let ranking = rank_stations(&eigen, &j);
        let scaled = matrix(values.iter().map(|v| v * 3).collect());
        let j_scaled = gram(&scaled);
        match gram_eigen(&j_scaled) {
            Ok(eigen_scaled) => {
                let ranking_scaled = rank_stations(&eigen_scaled, &j_scaled);
                if ranking.dominant != ranking_scaled.dominant {
                    fail(format!(
                        "dominant station moved under scaling: {} vs {}",
                        ranking.dominant, ranking_scaled.dominant
                    ));
                }
                if ranking.isolated != ranking_scaled.isolated {
                    fail(format!(
                        "isolated station moved under scaling: {} vs {}",
                        ranking.isolated, ranking_scaled.isolated
                    ));
                }
            }
            Err(e) => fail(format!("scaled eigen failed: {e}")),
        }
    }
    check_runtime(&mut failures, started, C3_RUNTIME_CAP_S);
    failures
}

// --- criterion 4: pulse-count oracle --------------------------------------

const C4_EXHAUSTIVE_MAX_LEN: u32 = 16;
const C4_RANDOM_TRIALS: usize = 10_000;
const C4_RANDOM_MAX_LEN: usize = 2048;
const C4_RUNTIME_CAP_S: f64 = 10.0;

/// Independent oracle: render the bits as text and count the maximal
/// all-ones substrings.
fn one_run_count(bits: &[bool]) -> u64 {
    let text: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
    text.split('0').filter(|run| !run.is_empty()).count() as u64
}

fn criterion_4() -> Vec<String> {
    let started = Instant::now();
    let mut failures = Vec::new();
    for len in 0..=C4_EXHAUSTIVE_MAX_LEN {
        for pattern in 0..(1u32 << len) {
            let bits: Vec<bool> = (0..len).map(|bit| pattern >> bit & 1 == 1).collect();
            let expected = one_run_count(&bits);
            let actual = count_pulses(&bits);
            if actual != expected {
                failures.push(format!(
                    "length {len} pattern {pattern:#x}: {actual} vs {expected}"
                ));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x0b17_5eed);
    for trial in 0..C4_RANDOM_TRIALS {
        let len = rng.gen_range(C4_EXHAUSTIVE_MAX_LEN as usize + 1..=C4_RANDOM_MAX_LEN);
        let bits: Vec<bool> = (0..len).map(|_| rng.gen_bool(0.4)).collect();
        let expected = one_run_count(&bits);
        let actual = count_pulses(&bits);
        if actual != expected {
            failures.push(format!("random trial {trial}: {actual} vs {expected}"));
        }
    }
    check_runtime(&mut failures, started, C4_RUNTIME_CAP_S);
    failures
}

// --- criterion 5: qualitative interaction reproduction --------------------

/// Every hourly pulse PMF must peak between 1 and 6 pulses per hour.
const C5_MODE_MIN: u64 = 1;
const C5_MODE_MAX: u64 = 6;
/// ... and place nonzero probability somewhere in 2..=4 pulses per hour.
const C5_MASS_MIN: u64 = 2;
const C5_MASS_MAX: u64 = 4;
const C5_TRACE_RELATIVE: f64 = 1e-8;
const C5_RUNTIME_CAP_S: f64 = 600.0;

fn criterion_5() -> Vec<String> {
    let started = Instant::now();
    let mut failures = Vec::new();
    let scenario = load_scenario(&bundled_data("triple/scenario.toml")).unwrap();
    let engine = ScenarioEngine::new(&scenario).unwrap();
    let analysis = analyze_interactions(&engine, PmfPooling::BestStation).unwrap();
    let n = analysis.constellation_ids.len();

    // (a) every pooled PMF peaks in [1, 6] with some mass in [2, 4]
    for pair in &analysis.pairs {
        let label = format!("{} -> {}", pair.from, pair.to);
        let peak = pair.pmf.values().cloned().fold(0.0f64, f64::max);
        let modes: Vec<u64> = pair
            .pmf
            .iter()
            .filter(|(_, p)| **p == peak)
            .map(|(k, _)| *k)
            .collect();
        if !modes
            .iter()
            .all(|k| (C5_MODE_MIN..=C5_MODE_MAX).contains(k))
        {
            failures.push(format!("{label}: PMF mode(s) {modes:?} outside [1, 6]"));
        }
        let mass: f64 = pair
            .pmf
            .iter()
            .filter(|(k, _)| (C5_MASS_MIN..=C5_MASS_MAX).contains(*k))
            .map(|(_, p)| p)
            .sum();
        if !(mass > 0.0) {
            failures.push(format!("{label}: no PMF mass in [2, 4]"));
        }
    }

    // (b) the densest network (stations x satellites) holds the largest
    // diagonal entry
    let products: Vec<usize> = scenario
        .constellations
        .iter()
        .map(|c| c.stations.len() * c.satellites.len())
        .collect();
    let densest = (0..n).max_by_key(|&i| products[i]).unwrap();
    let diagonal = |i: usize| analysis.counts[i * n + i];
    for i in 0..n {
        if i != densest && diagonal(i) >= diagonal(densest) {
            failures.push(format!(
                "diagonal of {} ({}) not below densest {} ({})",
                analysis.constellation_ids[i],
                diagonal(i),
                analysis.constellation_ids[densest],
                diagonal(densest)
            ));
        }
    }

    // (c) every off-diagonal entry involving the smallest network is at
    // most every off-diagonal entry between the larger ones
    let smallest = (0..n).min_by_key(|&i| products[i]).unwrap();
    let mut involving_smallest = Vec::new();
    let mut between_others = Vec::new();
    for i in 0..n {
        for jdx in 0..n {
            if i == jdx {
                continue;
            }
            let count = analysis.counts[i * n + jdx];
            if i == smallest || jdx == smallest {
                involving_smallest.push(count);
            } else {
                between_others.push(count);
            }
        }
    }
    let weakest_max = involving_smallest.iter().max().unwrap();
    let others_min = between_others.iter().min().unwrap();
    if weakest_max > others_min {
        failures.push(format!(
            "off-diagonal entries involving {} reach {weakest_max}, above {others_min} elsewhere",
            analysis.constellation_ids[smallest]
        ));
    }

    // (d) one dominant real eigenvalue plus one exactly conjugate pair,
    // and the eigenvalue sum reproduces the trace
    let eigenvalues = &analysis.eigen.eigenvalues;
    let real: Vec<_> = eigenvalues.iter().filter(|z| z.im == 0.0).collect();
    let complex: Vec<_> = eigenvalues.iter().filter(|z| z.im != 0.0).collect();
    if real.len() != 1 || complex.len() != 2 {
        failures.push(format!(
            "expected one real eigenvalue and one conjugate pair, got {eigenvalues:?}"
        ));
    } else {
        if eigenvalues[0].im != 0.0 || eigenvalues[0].re <= 0.0 {
            failures.push(format!(
                "dominant eigenvalue {} is not real positive",
                eigenvalues[0]
            ));
        }
        if complex[0].re != complex[1].re || complex[0].im != -complex[1].im {
            failures.push(format!(
                "conjugate pairing is not exact: {} vs {}",
                complex[0], complex[1]
            ));
        }
    }
    let trace: u64 = (0..n).map(diagonal).sum();
    let sum_re: f64 = eigenvalues.iter().map(|z| z.re).sum();
    let sum_im: f64 = eigenvalues.iter().map(|z| z.im).sum();
    if (sum_re - trace as f64).abs() > C5_TRACE_RELATIVE * (trace as f64).max(1.0) {
        failures.push(format!("eigenvalue sum {sum_re:.6} vs trace {trace}"));
    }
    if sum_im != 0.0 {
        failures.push(format!("eigenvalue imaginary parts sum to {sum_im:e}"));
    }
    check_runtime(&mut failures, started, C5_RUNTIME_CAP_S);
    failures
}

// --- criterion 6: worker-count determinism ---------------------------------

fn criterion_6() -> Vec<String> {
    let mut failures = Vec::new();
    let scenario = bundled_data("triple/scenario.toml");
    let mut outputs = Vec::new();
    for jobs in ["1", "8"] {
        let dir = tempfile::tempdir().unwrap();
        let status = Command::new(env!("CARGO_BIN_EXE_tsa"))
            .args(["inter", "--scenario"])
            .arg(&scenario)
            .arg("--out")
            .arg(dir.path())
            .args(["--jobs", jobs])
            .status()
            .unwrap();
        if !status.success() {
            failures.push(format!("inter --jobs {jobs} exited with {status}"));
        }
        outputs.push(dir);
    }
    if failures.is_empty() {
        let listing = |dir: &tempfile::TempDir| -> Vec<String> {
            let mut names: Vec<String> = std::fs::read_dir(dir.path())
                .unwrap()
                .map(|entry| entry.unwrap().file_name().into_string().unwrap())
                .collect();
            names.sort();
            names
        };
        let first = listing(&outputs[0]);
        let second = listing(&outputs[1]);
        if first != second {
            failures.push(format!("output listings differ: {first:?} vs {second:?}"));
        } else {
            for name in &first {
                // The manifest embeds wall-clock duration and argv, which
                // legitimately differ between the two runs.
                if name == "manifest.json" {
                    continue;
                }
                let a = std::fs::read(outputs[0].path().join(name)).unwrap();
                let b = std::fs::read(outputs[1].path().join(name)).unwrap();
                if a != b {
                    failures.push(format!("{name} differs between --jobs 1 and --jobs 8"));
                }
            }
        }
    }
    failures
}
