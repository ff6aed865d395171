//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs under `cargo test`; `cargo test --test acceptance` runs it
//! alone.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use varcomp::ac::{self, ComplexPower, LabelConvention, LoadSpec, PfLabel, PfSense, UnitScale};
use varcomp::finding::FindingCode;
use varcomp::grader::{grade_continuous, Candidate, GradeConfig};
use varcomp::multiperiod::{grid_search, GridSpec, MultiPeriodProblem, PeriodSpec};
use varcomp::powerflow::{build_ybus, lint_formulation, solve_network, NewtonSettings, Network, YBus};
use varcomp::switched::{brute_force_design, design_minimax, evaluate, CompensationProblem};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn read(name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap()
}

fn candidate(name: &str) -> Candidate {
    serde_json::from_value(read(name)).unwrap()
}

fn network(name: &str) -> Network {
    serde_json::from_value(read(name)["network"].clone()).unwrap()
}

fn spring() -> CompensationProblem {
    CompensationProblem { v_rms: 100.0, frequency: 60.0, p_d: 50.0, q_min: -36.0, q_max: 60.0 }
}

fn fall() -> MultiPeriodProblem {
    let file = read("fall2023.json");
    let specs: Vec<PeriodSpec> = serde_json::from_value(file["periods"].clone()).unwrap();
    MultiPeriodProblem::from_specs(file["v_rms"].as_f64().unwrap() * 1e3, 60.0, &specs, UnitScale::Mega).unwrap()
}

// a NaN must fail a check, hence the negated comparisons
macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !($cond) {
            return Err(format!($($fmt)+));
        }
    };
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn within_time(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure!(elapsed < limit, "took {elapsed:?}, limit {limit:?}");
    Ok(())
}

fn spring_design() -> Outcome {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_varcomp"))
        .args(["design", fixture("spring2025.json").to_str().unwrap()])
        .env_remove("VARCOMP_METHOD")
        .output()
        .unwrap();
    let elapsed = start.elapsed();
    ensure!(out.status.code() == Some(0), "exit {:?}", out.status.code());
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    let s = &doc["solution"];
    let num = |k: &str| s[k].as_f64().unwrap_or(f64::NAN);
    let (x_l, x_c, t) = (num("x_l"), num("x_c"), num("threshold"));
    ensure!(close(x_l, 833.3, 833.3 * 0.005), "x_l {x_l}");
    ensure!(close(x_c, -208.3, 208.3 * 0.005), "x_c {x_c}");
    ensure!(close(t, 12.0, 0.1), "threshold {t}");
    let unity = (s["unity_points"][0].as_f64().unwrap(), s["unity_points"][1].as_f64().unwrap());
    ensure!(close(unity.0, -12.0, 1e-9) && close(unity.1, 36.0, 1e-9), "unity points {unity:?}");
    ensure!(close(num("worst_abs_qs"), 24.0, 1e-9), "worst |Q_s| {}", num("worst_abs_qs"));
    ensure!(close(num("worst_pf"), 0.9015, 1e-3), "worst pf {}", num("worst_pf"));
    within_time(elapsed, Duration::from_secs(1))?;
    Ok(format!("X_l {x_l:.1}, X_c {x_c:.1}, threshold {t}, worst pf {:.4} in {elapsed:.2?}", num("worst_pf")))
}

fn oracle_agreement() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let mut problems = vec![spring()];
    for _ in 0..50 {
        let q_min = rng.random_range(-100.0..100.0);
        let width = rng.random_range(1.0..150.0);
        problems.push(CompensationProblem { q_min, q_max: q_min + width, ..spring() });
    }
    let step = 0.5;
    let mut worst_diff: f64 = 0.0;
    for p in &problems {
        let analytic = design_minimax(p).map_err(|e| e.to_string())?;
        let brute = brute_force_design(p, step).map_err(|e| e.to_string())?;
        let diff = (analytic.worst_abs_qs - brute.worst_abs_qs).abs();
        ensure!(diff <= step, "[{}, {}]: analytic {} brute {}", p.q_min, p.q_max, analytic.worst_abs_qs, brute.worst_abs_qs);
        worst_diff = worst_diff.max(diff);
    }
    let elapsed = start.elapsed();
    within_time(elapsed, Duration::from_secs(30))?;
    Ok(format!("{} problems, largest worst |Q_s| difference {worst_diff:.3} VAr in {elapsed:.2?}", problems.len()))
}

fn equioscillation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    for _ in 0..100 {
        let q_min = rng.random_range(-200.0..200.0);
        let width = rng.random_range(0.1..300.0);
        let p = CompensationProblem {
            v_rms: rng.random_range(50.0..500.0),
            frequency: 60.0,
            p_d: rng.random_range(1.0..500.0),
            q_min,
            q_max: q_min + width,
        };
        let d = design_minimax(&p).map_err(|e| e.to_string())?;
        let r = evaluate(&d, &p).map_err(|e| e.to_string())?;
        let quarter = p.width() / 4.0;
        let threshold = d.threshold.ok_or("no threshold")?;
        ensure!(close(r.worst_abs_qs, quarter, 1e-9), "worst {} vs W/4 {quarter}", r.worst_abs_qs);
        let expected = [p.q_min, threshold, p.q_max];
        ensure!(r.argmax_qd.len() == 3, "argmax {:?}", r.argmax_qd);
        for (a, e) in r.argmax_qd.iter().zip(expected) {
            ensure!(close(*a, e, 1e-9), "argmax {:?} vs {expected:?}", r.argmax_qd);
        }
        for q_d in expected {
            let (_, q_s) = d.qs_at(q_d);
            ensure!(close(q_s.abs(), quarter, 1e-9), "|Q_s({q_d})| = {} vs {quarter}", q_s.abs());
        }
    }
    Ok("100 problems peak at q_min, threshold and q_max with |Q_s| = W/4".into())
}

fn o1_grading() -> Outcome {
    let Candidate::ContinuousCompensation(c) = candidate("o1_spring2025.json") else {
        return Err("o1 fixture is not a continuous candidate".into());
    };
    let p = spring();
    let report = grade_continuous(&c, &p, &GradeConfig::default()).map_err(|e| e.to_string())?;
    let anchors: BTreeSet<&str> = report.findings.iter().filter_map(|f| f.anchor.as_deref()).collect();
    ensure!(anchors == BTreeSet::from(["1", "2", "3"]), "anchors {anchors:?}");
    let eval = evaluate(&c.to_solution(&p).map_err(|e| e.to_string())?, &p).map_err(|e| e.to_string())?;
    ensure!(close(eval.worst_abs_qs, 48.0, 0.01), "worst |Q_s| {}", eval.worst_abs_qs);
    let (lo, hi) = eval.abs_qs_range;
    ensure!(close(lo, 0.0, 0.01) && close(hi, 48.0, 0.01), "range [{lo}, {hi}]");
    let gap = report.optimality_gap.ok_or("no gap")?;
    ensure!(close(gap, 0.9015 - 0.7215, 1e-3), "gap {gap}");
    Ok(format!("anchors 1 2 3, worst |Q_s| {:.3}, range [{lo:.3}, {hi:.3}], gap {gap:.4}", eval.worst_abs_qs))
}

fn fall_oracle() -> Outcome {
    let start = Instant::now();
    let p = fall();
    let s = grid_search(&p, GridSpec::DEFAULT_FIXED, GridSpec::DEFAULT_SWITCHED)
        .and_then(|s| s.with_band(&p))
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure!(s.worst_ratio == 0.25, "worst ratio {}", s.worst_ratio);
    ensure!(s.states == [false, true, false], "states {:?}", s.states);
    ensure!(s.q_cf == 2.5 && s.q_cs == 13.5, "ratings {} {}", s.q_cf, s.q_cs);
    let (lo, hi) = s.band.ok_or("no band")?;
    ensure!(close(lo, 13.5, 0.1) && close(hi, 29.5, 0.1), "band [{lo}, {hi}]");
    ensure!(close(s.worst_pf, 0.9701, 1e-3), "worst pf {}", s.worst_pf);
    within_time(elapsed, Duration::from_secs(60))?;
    Ok(format!("(0.25, (0,1,0), 2.5, 13.5), band [{lo}, {hi}], worst pf {:.4} in {elapsed:.2?}", s.worst_pf))
}

fn compensation_corrections() -> Outcome {
    let rel = |a: f64, b: f64| (a - b).abs() <= 1e-3 * b.abs();
    let morning = ComplexPower::load(10.0, 5.0, UnitScale::Mega);
    ensure!(rel(morning.apparent(), 11.1803), "apparent {}", morning.apparent());
    let z = ac::load_impedance(10e3, &morning).map_err(|e| e.to_string())?;
    ensure!(rel(z.r, 8.0) && rel(z.x, 4.0), "morning Z {z:?}");
    let afternoon = ac::complex_power_from_spec(&LoadSpec::Apparent { s: 40.0, pf: 0.8, sense: PfSense::Lagging }, UnitScale::Mega)
        .map_err(|e| e.to_string())?;
    let z2 = ac::load_impedance(10e3, &afternoon).map_err(|e| e.to_string())?;
    ensure!(rel(z2.r, 2.0) && rel(z2.x, 1.5), "afternoon Z {z2:?}");
    let pf = ac::power_factor(&morning).map_err(|e| e.to_string())?;
    let label = ac::label_pf(&pf, LabelConvention::default());
    ensure!(rel(pf.magnitude, 0.8944) && label == PfLabel::Lagging, "pf {} {label}", pf.magnitude);
    let x = ac::reactance_for_reactive_power(10e3, -5e6).map_err(|e| e.to_string())?;
    ensure!(rel(x, -20.0), "X {x}");
    Ok(format!("|S| {:.4} MVA, Z {}+j{} and {}+j{} Ω, pf {:.4} {label}, X {x} Ω", morning.apparent(), z.r, z.x, z2.r, z2.x, pf.magnitude))
}

fn ybus_golden() -> Outcome {
    let y = build_ybus(&network("powerflow3bus.json").branches, 3).map_err(|e| e.to_string())?;
    let g = YBus::rows(&y.g);
    let b = YBus::rows(&y.b);
    ensure!(g == [[2.0, 0.0, -2.0], [0.0, 0.0, 0.0], [-2.0, 0.0, 2.0]], "G {g:?}");
    ensure!(b == [[-9.0, 5.0, 4.0], [5.0, -15.0, 10.0], [4.0, 10.0, -14.0]], "B {b:?}");
    for i in 0..3 {
        let row: Complex64 = (0..3).map(|k| y.entry(i, k)).sum();
        ensure!(row.norm() < 1e-12, "row {i} sums to {row}");
    }
    Ok("G and B exact, rows sum to zero".into())
}

/// Gauss-Seidel with an outer fixed point on the shared slack power.
fn gauss_seidel(net: &Network) -> (Vec<Complex64>, f64) {
    let y = build_ybus(&net.branches, 3).unwrap();
    let weight = |i: usize| net.buses[i].participation.unwrap_or(1.0);
    let share2 = weight(1) / (weight(0) + weight(1));
    let s3 = Complex64::new(net.buses[2].p_inj.unwrap(), net.buses[2].q_inj.unwrap());
    let mut v = vec![Complex64::new(1.0, 0.0); 3];
    let mut p = -s3.re;
    let current = |v: &[Complex64], i: usize| -> Complex64 { (0..3).map(|k| y.entry(i, k) * v[k]).sum() };
    for _ in 0..500 {
        for _ in 0..2000 {
            let q2 = (v[1] * current(&v, 1).conj()).im;
            let s2 = Complex64::new(share2 * p, q2);
            let v2 = (s2.conj() / v[1].conj() - y.entry(1, 0) * v[0] - y.entry(1, 2) * v[2]) / y.entry(1, 1);
            v[1] = v2 / v2.norm();
            v[2] = (s3.conj() / v[2].conj() - y.entry(2, 0) * v[0] - y.entry(2, 1) * v[1]) / y.entry(2, 2);
        }
        let next = (v[0] * current(&v, 0).conj()).re + share2 * p;
        let done = (next - p).abs() < 1e-13;
        p = next;
        if done {
            break;
        }
    }
    (v, p)
}

fn powerflow_solve() -> Outcome {
    let net = network("powerflow3bus.json");
    let sol = solve_network(&net, NewtonSettings::default()).map_err(|e| e.to_string())?;
    let steps = sol.iterations - 1;
    ensure!(sol.converged && sol.mismatch < 1e-10, "mismatch {:e}", sol.mismatch);
    ensure!(steps <= 10, "{steps} Newton steps");
    let (p1, p2) = (sol.bus(1).unwrap().p, sol.bus(2).unwrap().p);
    ensure!(p1 == p2, "P1 {p1} P2 {p2}");
    let (injected, _) = sol.total_injection();
    let i2r: f64 = sol.branches.iter().map(|b| b.p_loss).sum();
    ensure!(close(injected, i2r, 1e-8), "injections {injected} vs I²r {i2r}");

    let (v, p) = gauss_seidel(&net);
    for (k, b) in sol.buses.iter().enumerate() {
        ensure!(close(b.v, v[k].norm(), 1e-8) && close(b.theta, v[k].arg(), 1e-8), "bus {} differs from fixed point", b.id);
    }
    let shared = sol.x[sol.variables.iter().position(|n| n == "p").unwrap()];
    ensure!(close(shared, p, 1e-8), "shared slack {shared} vs {p}");

    let lossless = solve_network(&network("powerflow3bus_lossless.json"), NewtonSettings::default())
        .map_err(|e| e.to_string())?;
    ensure!(lossless.losses.p.abs() < 1e-10, "lossless variant loses {}", lossless.losses.p);
    Ok(format!(
        "{steps} Newton steps, mismatch {:.1e}, P1 = P2 = {p1:.6}, losses {:.6}, fixed point agrees",
        sol.mismatch, sol.losses.p
    ))
}

fn powerflow_lint() -> Outcome {
    let Candidate::PowerflowFormulation(doc) = candidate("gpt4_powerflow.json") else {
        return Err("power-flow fixture is not a formulation".into());
    };
    let findings = lint_formulation(&doc, &network("powerflow3bus.json")).map_err(|e| e.to_string())?;
    let count = findings.iter().find(|f| f.code == FindingCode::CountMismatch).ok_or("no COUNT_MISMATCH")?;
    ensure!(count.actual == serde_json::json!([7, 11]), "COUNT_MISMATCH actual {}", count.actual);
    let fixed: BTreeSet<&str> = findings
        .iter()
        .filter(|f| f.code == FindingCode::VarFixedQuantity)
        .filter_map(|f| {
            let i: usize = f.location.strip_prefix("variables[")?.strip_suffix(']')?.parse().ok()?;
            doc.variables.get(i).map(String::as_str)
        })
        .collect();
    ensure!(fixed == BTreeSet::from(["V_1", "V_2", "P_3", "Q_3"]), "fixed quantities {fixed:?}");
    let n = |code| findings.iter().filter(|f| f.code == code).count();
    let (branch, admittance) = (n(FindingCode::MissingBranchTerm), n(FindingCode::ImpedanceForAdmittance));
    ensure!(branch >= 1 && admittance >= 1, "branch {branch} admittance {admittance}");
    Ok(format!("COUNT_MISMATCH (7, 11), VAR_FIXED_QUANTITY {fixed:?}, {branch} MISSING_BRANCH_TERM, {admittance} IMPEDANCE_FOR_ADMITTANCE"))
}

fn grader_soundness() -> Outcome {
    let pairs = [
        ("reference_spring2025.json", "spring2025.json"),
        ("reference_fall2023.json", "fall2023.json"),
        ("reference_fall2023_midband.json", "fall2023.json"),
        ("reference_powerflow.json", "powerflow3bus.json"),
    ];
    for entry in std::fs::read_dir(fixture("")).unwrap() {
        let name = entry.unwrap().file_name().into_string().unwrap();
        ensure!(!name.starts_with("reference_") || pairs.iter().any(|(c, _)| *c == name), "{name} is not covered");
    }
    for (c, p) in pairs {
        let grade = || {
            Command::new(env!("CARGO_BIN_EXE_varcomp"))
                .args(["grade", fixture(c).to_str().unwrap(), fixture(p).to_str().unwrap()])
                .output()
                .unwrap()
        };
        let (first, second) = (grade(), grade());
        ensure!(first.status.code() == Some(0), "{c}: exit {:?}", first.status.code());
        let report: Value = serde_json::from_slice(&first.stdout).map_err(|e| e.to_string())?;
        ensure!(report["findings"].as_array().is_some_and(Vec::is_empty), "{c}: findings {}", report["findings"]);
        ensure!(first.stdout == second.stdout, "{c}: reports differ between runs");
    }
    Ok(format!("{} references clean with exit 0, repeat runs byte-identical", pairs.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("continuous design", spring_design),
        ("oracle agreement", oracle_agreement),
        ("equioscillation", equioscillation),
        ("o1 grading", o1_grading),
        ("multi-period oracle", fall_oracle),
        ("ac corrections", compensation_corrections),
        ("Y-bus golden", ybus_golden),
        ("power-flow solve", powerflow_solve),
        ("power-flow lint", powerflow_lint),
        ("grader soundness", grader_soundness),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
