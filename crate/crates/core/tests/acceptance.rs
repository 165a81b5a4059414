//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::process::ExitCode;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qnd_core::circuit::{self, OutcomeClass, SignalInput, SignalQubit};
use qnd_core::metrics::{self, haar_random_qubit, linspace, TradeoffPoint};
use qnd_core::report::{self, CsvRow};
use qnd_core::{reference, sampling, Execution, Regime};

const SEED: u64 = 2024;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_states(n: usize) -> Vec<SignalQubit> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    (0..n).map(|_| haar_random_qubit(&mut rng)).collect()
}

/// 50 signal states (|α|² from 0 to 1, varying relative phase) by 50 angles in [0, π/2].
fn grid() -> (Vec<SignalQubit>, Vec<f64>) {
    let states = linspace(0.0, 1.0, 50)
        .into_iter()
        .enumerate()
        .map(|(k, p)| SignalQubit::from_weights(p, 0.37 * k as f64))
        .collect();
    (states, linspace(0.0, FRAC_PI_2, 50))
}

fn success_probability() -> Check {
    let mut worst: f64 = 0.0;
    for q in random_states(200) {
        let ff =
            circuit::detect_presence(&SignalInput::Photon(q), true).map_err(|e| e.to_string())?;
        let bare =
            circuit::detect_presence(&SignalInput::Photon(q), false).map_err(|e| e.to_string())?;
        let d1 = (ff.coincidence_probability - 0.5).abs();
        let d2 = (bare.success_probability - 0.25).abs();
        ensure(d1 < 1e-10 && d2 < 1e-10, || {
            format!(
                "coincidence {} / retained {}",
                ff.coincidence_probability, bare.success_probability
            )
        })?;
        worst = worst.max(d1).max(d2);
    }
    Ok(format!("200 states, max deviation {worst:.1e}"))
}

fn nondemolition() -> Check {
    let mut worst: f64 = 0.0;
    let mut branches = 0;
    for q in random_states(200) {
        let rep =
            circuit::detect_presence(&SignalInput::Photon(q), true).map_err(|e| e.to_string())?;
        for o in rep.retained() {
            let f = o.fidelity.ok_or("retained branch without signal")?;
            ensure((f - 1.0).abs() < 1e-10, || {
                format!("branch {} fidelity {f}", o.label)
            })?;
            worst = worst.max((f - 1.0).abs());
            branches += 1;
        }
    }
    Ok(format!(
        "{branches} retained branches, max |F-1| {worst:.1e}"
    ))
}

fn vacuum_rejection() -> Check {
    let out = circuit::propagate(
        &circuit::prepare_input(&SignalInput::Vacuum).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    let herald = out
        .project_paths(&[
            (circuit::ports::DETECTOR_1, 1),
            (circuit::ports::DETECTOR_2, 1),
        ])
        .map_err(|e| e.to_string())?;
    ensure(
        herald.probability == 0.0 && herald.conditional.is_none(),
        || format!("coincidence probability {}", herald.probability),
    )?;
    let rep = circuit::detect_presence(&SignalInput::Vacuum, true).map_err(|e| e.to_string())?;
    ensure(
        rep.outcomes
            .iter()
            .all(|o| o.class != OutcomeClass::Coincidence),
        || "coincidence pattern present".into(),
    )?;
    Ok("no coincidence component".into())
}

fn over_grid(tol: f64, f: impl Fn(&SignalQubit, f64) -> Result<f64, String>) -> Check {
    let (states, phis) = grid();
    let mut worst: f64 = 0.0;
    for q in &states {
        for &phi in &phis {
            let d = f(q, phi)?;
            ensure(d < tol, || {
                format!("|alpha|^2 {} phi {phi}: deviation {d:.3e}", q.p_h())
            })?;
            worst = worst.max(d);
        }
    }
    Ok(format!("50x50 grid, max deviation {worst:.1e}"))
}

fn fidelity_law() -> Check {
    over_grid(1e-10, |q, phi| {
        let sim = metrics::fidelity_simulated(q, phi).map_err(|e| e.to_string())?;
        Ok((sim - metrics::fidelity_closed(q, phi)).abs())
    })
}

fn coherent_information() -> Check {
    let detail = over_grid(1e-10, |q, phi| {
        let ci = metrics::coherent_information_closed(q, phi);
        if ci.lambda1 + ci.lambda2 != 1.0 {
            return Err(format!("lambda1 + lambda2 = {}", ci.lambda1 + ci.lambda2));
        }
        let sim = metrics::coherent_information_simulated(q, phi).map_err(|e| e.to_string())?;
        Ok((sim - ci.i_c).abs())
    })?;
    Ok(format!("{detail}, lambda sum exact"))
}

fn mutual_information() -> Check {
    let detail = over_grid(1e-10, |q, phi| {
        let w = circuit::weak_measure(q, phi).map_err(|e| e.to_string())?;
        Ok(
            (metrics::mutual_information(&w.joint) - metrics::mutual_information_closed(q, phi))
                .abs(),
        )
    })?;
    for q in grid().0 {
        let w = circuit::weak_measure(&q, FRAC_PI_4).map_err(|e| e.to_string())?;
        let i = metrics::mutual_information(&w.joint);
        ensure(i.abs() < 1e-10, || format!("I = {i} at pi/4"))?;
    }
    Ok(format!("{detail}, zero at pi/4"))
}

fn holevo_coincidence() -> Check {
    let (states, phis) = grid();
    let mut worst: f64 = 0.0;
    for q in &states {
        let h = metrics::holevo_bound(q);
        let pts =
            metrics::tradeoff_curve(q, &phis, Execution::default()).map_err(|e| e.to_string())?;
        for (name, values) in [
            ("I_c", pts.iter().map(|p| p.i_c).collect::<Vec<_>>()),
            ("I", pts.iter().map(|p| p.i_mutual).collect()),
        ] {
            let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            ensure((max - h).abs() < 1e-9, || {
                format!("{name} max {max} vs holevo {h}")
            })?;
            ensure((values[0] - h).abs() < 1e-9, || {
                format!("{name} at phi=0 is {} vs {h}", values[0])
            })?;
            worst = worst.max((max - h).abs()).max((values[0] - h).abs());
        }
    }
    Ok(format!(
        "50 states, max deviation {worst:.1e}, attained at phi=0"
    ))
}

fn correlation() -> Check {
    over_grid(1e-10, |q, phi| {
        let w = circuit::weak_measure(q, phi).map_err(|e| e.to_string())?;
        let from_probabilities = w.joint.tzz();
        let from_tensor = metrics::correlation_tensor(&w.polarization_state()).zz();
        let expected = metrics::tzz_closed(phi);
        Ok((from_probabilities - expected)
            .abs()
            .max((from_tensor - expected).abs()))
    })
}

fn deterministic_mode() -> Check {
    for q in random_states(200) {
        let rep = circuit::deterministic_run(&q).map_err(|e| e.to_string())?;
        let probs = [
            rep.class_probability(OutcomeClass::Coincidence),
            rep.class_probability(OutcomeClass::DoubleD1),
            rep.class_probability(OutcomeClass::DoubleD2),
        ];
        let expected = [0.5, q.p_h() / 2.0, q.p_v() / 2.0];
        for (p, e) in probs.iter().zip(expected) {
            ensure((p - e).abs() < 1e-10, || {
                format!("branch probability {p} vs {e}")
            })?;
        }
        ensure((rep.total_probability - 1.0).abs() < 1e-10, || {
            format!("total {}", rep.total_probability)
        })?;
    }
    let haar = metrics::haar_average_fidelity(Regime::Deterministic).map_err(|e| e.to_string())?;
    ensure((haar - 5.0 / 6.0).abs() < 1e-9, || {
        format!("haar average {haar}")
    })?;
    let mc = metrics::haar_average_fidelity_monte_carlo(
        Regime::Deterministic,
        1_000_000,
        SEED,
        Execution::default(),
    )
    .map_err(|e| e.to_string())?;
    ensure((mc - 5.0 / 6.0).abs() < 1e-3, || {
        format!("monte carlo {mc}")
    })?;
    Ok(format!(
        "branches exact on 200 states, haar {haar:.12}, monte carlo {mc:.5}"
    ))
}

fn oracle_equivalence() -> Check {
    let rep = reference::verify_with_random(1e-10, 100, SEED).map_err(|e| e.to_string())?;
    Ok(format!(
        "{} inputs, max deviation {:.1e}",
        rep.cases.len(),
        rep.max_deviation
    ))
}

fn tradeoff_curves() -> Check {
    let grid = linspace(0.0, FRAC_PI_4, 41);
    for p in [0.5, 0.75, 0.9] {
        let q = SignalQubit::from_weights(p, 0.0);
        let h = metrics::holevo_bound(&q);
        let rows: Vec<CsvRow> = metrics::tradeoff_curve(&q, &grid, Execution::default())
            .map_err(|e| e.to_string())?
            .iter()
            .map(|pt| CsvRow::new(pt, h))
            .collect();
        let text = report::csv_string(&rows);
        let back = report::parse_csv(text.as_bytes()).map_err(|e| e.to_string())?;
        ensure(back.len() == grid.len(), || "row count".into())?;
        for (row, phi) in back.iter().zip(&grid) {
            let closed = TradeoffPoint::closed(&q, *phi);
            let d = [
                row.fidelity - closed.fidelity,
                row.coherent_info - closed.i_c,
                row.mutual_info - closed.i_mutual,
                row.t_zz - closed.t_zz,
            ]
            .iter()
            .fold(0.0f64, |m, x| m.max(x.abs()));
            ensure(d < 1e-10, || {
                format!("|alpha|^2 {p} phi {phi}: re-parsed deviation {d:.3e}")
            })?;
        }
        let (first, last) = (&back[0], back.last().expect("non-empty"));
        let f0 = p * p + (1.0 - p) * (1.0 - p);
        ensure((first.fidelity - f0).abs() < 1e-10, || {
            format!("F(0) = {}", first.fidelity)
        })?;
        ensure(
            (first.coherent_info - h).abs() < 1e-9 && (first.mutual_info - h).abs() < 1e-9,
            || format!("information at phi=0 below holevo {h}"),
        )?;
        ensure((last.fidelity - 1.0).abs() < 1e-10, || {
            format!("F(pi/4) = {}", last.fidelity)
        })?;
        ensure(
            last.coherent_info.abs() < 1e-10 && last.mutual_info.abs() < 1e-10,
            || "information at pi/4 not zero".into(),
        )?;
        for w in back.windows(2) {
            ensure(
                w[1].fidelity >= w[0].fidelity - 1e-12
                    && w[1].coherent_info <= w[0].coherent_info + 1e-12
                    && w[1].mutual_info <= w[0].mutual_info + 1e-12,
                || format!("|alpha|^2 {p}: not monotone near phi {}", w[1].phi),
            )?;
        }
    }
    Ok("|alpha|^2 in {0.5, 0.75, 0.9}, 41 rows each".into())
}

fn shot_emulation() -> Check {
    let q = SignalQubit::from_bloch(1.0, 0.5);
    let rep = circuit::detect_presence(&SignalInput::Photon(q), true).map_err(|e| e.to_string())?;
    let shots = 1_000_000;
    let a = sampling::sample_shots(&rep.outcomes, shots, SEED).map_err(|e| e.to_string())?;
    let b = sampling::sample_shots(&rep.outcomes, shots, SEED).map_err(|e| e.to_string())?;
    let f = a.coincidence_frequency();
    let bound = 3.0 * (0.25 / shots as f64).sqrt();
    ensure((f - 0.5).abs() <= bound, || {
        format!("frequency {f} outside 0.5 +- {bound}")
    })?;
    ensure(a.render() == b.render(), || "rerun differs".into())?;
    Ok(format!(
        "frequency {f:.6}, bound {bound:.4}, rerun byte-identical"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("success probability", success_probability),
        ("nondemolition", nondemolition),
        ("vacuum rejection", vacuum_rejection),
        ("fidelity law", fidelity_law),
        ("coherent information", coherent_information),
        ("mutual information", mutual_information),
        ("holevo coincidence", holevo_coincidence),
        ("correlation", correlation),
        ("deterministic mode", deterministic_mode),
        ("oracle equivalence", oracle_equivalence),
        ("tradeoff curves", tradeoff_curves),
        ("shot emulation", shot_emulation),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let ms = start.elapsed().as_millis();
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({ms} ms)", i + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {why} ({ms} ms)", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
