//! Acceptance criteria, one printed line each.
//!
//! Runs without the libtest harness so the lines show on every run. Criteria
//! listed in `KNOWN_GAPS` are reported as FAIL and must keep failing for the
//! recorded reason; anything else failing makes the target fail.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, SQRT_2, TAU};
use std::process::Command;

use entwit::bell::{angles, klyshko_operator, mermin_operator, sackett_observable, PartySetting, PartySettings, Sign};
use entwit::experiments::{
    analyze_pan, analyze_rauschenbeutel, build_w_state, control_observable, demonstrate_rho_mix, fit_w_state,
    interference_observable, named_record, w_targets,
};
use entwit::hilbert::{expectation, ghz_class_targets, matrix_element, pauli, product_observable, tensor, Axis};
use entwit::random::{
    random_angle, random_biseparable_mixture, random_biseparable_pure, random_density, random_direction,
    random_product_mixture, random_product_pure, random_pure, seeded, SeededRng, BIPARTITIONS_OF_THREE,
};
use entwit::witness::{
    fidelity, harmonic_extract, optimize_settings, round_to, scan, sigma_matches_quote, synthesize, Harmonic,
    MeasuredValue, ThresholdOutcome,
};
use entwit::{BasisIndex, ComplexMatrix, QuantumState, SpinDirection};
use num_complex::Complex64;
use serde_json::Value;

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome);

/// Criterion number and the failure text it is known to produce.
const KNOWN_GAPS: [(u32, &str); 2] = [
    (8, "corrected fidelity sigma 0.027386 does not round to 0.05"),
    (12, "exit status 1; failing checks: worst-case.corrected-fidelity-sigma"),
];

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn ket(n: usize, amplitudes: &[(usize, Complex64)]) -> QuantumState {
    let mut v = vec![c(0.0); 1 << n];
    for &(i, a) in amplitudes {
        v[i] = a;
    }
    QuantumState::pure(v).unwrap()
}

fn ghz3() -> QuantumState {
    ket(3, &[(0, c(FRAC_1_SQRT_2)), (7, c(FRAC_1_SQRT_2))])
}

fn psi_b() -> QuantumState {
    ket(3, &[(1, c(FRAC_1_SQRT_2)), (6, c(FRAC_1_SQRT_2))])
}

fn xy(phi: f64) -> SpinDirection {
    SpinDirection::new(phi.cos(), phi.sin(), 0.0).unwrap()
}

fn xz(theta: f64) -> SpinDirection {
    SpinDirection::new(theta.cos(), 0.0, theta.sin()).unwrap()
}

fn klyshko_abs(state: &QuantumState, settings: &PartySettings) -> f64 {
    klyshko_operator(settings, false).unwrap().expectation(state).unwrap().abs()
}

fn label(l: usize) -> BasisIndex {
    BasisIndex::from_label(3, l).unwrap()
}

fn check(ok: bool, fail: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(fail())
    }
}

fn rounds_to(x: f64, quoted: f64) -> bool {
    (round_to(x, 2) - quoted).abs() < 1e-9
}

fn criterion_1() -> Outcome {
    // ½(P↑⊗P_S + P↓⊗P_T) with P_S, P_T the singlet and m=0 triplet on parties 2, 3
    let s = FRAC_1_SQRT_2;
    let up_singlet = [(1, c(s)), (2, c(-s))];
    let down_triplet = [(5, c(s)), (6, c(s))];
    let mut rho = ComplexMatrix::zeros(8);
    for set in [&up_singlet[..], &down_triplet[..]] {
        for &(i, a) in set {
            for &(j, b) in set {
                rho.set(i, j, rho.get(i, j) + a * b.conj() * 0.5);
            }
        }
    }
    let state = QuantumState::density(rho).unwrap();
    let z = SpinDirection::along(Axis::Z);
    let settings = PartySettings::new(vec![
        PartySetting { unprimed: z, primed: z },
        PartySetting { unprimed: xy(0.0), primed: xy(FRAC_PI_2) },
        PartySetting { unprimed: xy(FRAC_PI_4), primed: xy(-FRAC_PI_4) },
    ])
    .unwrap();
    let v = klyshko_abs(&state, &settings);
    check((v - 2.0 * SQRT_2).abs() <= 1e-9, || format!("|E(F3)| = {v}"))?;
    Ok(format!("|E(F3)| = {v:.12}"))
}

fn criterion_2() -> Outcome {
    let mut parts = Vec::new();
    for (name, state, planar) in [("GHZ", ghz3(), angles::ghz_maximal()), ("ψ_B", psi_b(), angles::psi_b_maximal())] {
        let v = klyshko_abs(&state, &planar.to_party_settings().unwrap());
        check((v - 4.0).abs() <= 1e-9, || format!("{name} at maximal angles gives {v}"))?;
        let opt = optimize_settings(&state, None).unwrap();
        check(opt.value >= 4.0 - 1e-6, || format!("{name} optimizer reached {}", opt.value))?;
        // the optimizer's own settings must reproduce its value
        let again = klyshko_abs(&state, &opt.settings);
        check((again - opt.value).abs() <= 1e-9, || {
            format!("{name} optimizer value {} vs settings {again}", opt.value)
        })?;
        parts.push(format!("{name} {v:.12} (optimized {:.12})", opt.value));
    }
    Ok(parts.join(", "))
}

fn criterion_3() -> Outcome {
    let mut expected = ComplexMatrix::zeros(8);
    expected.set(7, 0, c(-4.0));
    expected.set(0, 7, c(-4.0));
    let m = mermin_operator();
    let defect = m.matrix.max_abs_diff(&expected).unwrap();
    check(defect < 1e-12, || format!("identity defect {defect:e}"))?;
    // also against the explicit Pauli combination
    let (x, y) = (pauli(Axis::X), pauli(Axis::Y));
    let combo = &(&(&tensor(&[x.clone(), y.clone(), y.clone()]).unwrap()
        + &tensor(&[y.clone(), x.clone(), y.clone()]).unwrap())
        + &tensor(&[y.clone(), y.clone(), x.clone()]).unwrap())
        - &tensor(&[x.clone(), x.clone(), x]).unwrap();
    let defect2 = combo.max_abs_diff(&expected).unwrap();
    check(defect2 < 1e-12, || format!("Pauli combination defect {defect2:e}"))?;
    let mut rng = seeded(0xacc3);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let rho = random_density(&mut rng, 3);
        let direct = expectation(&rho, &combo).unwrap();
        worst = worst.max((direct + 8.0 * rho.rho().get(0, 7).re).abs());
        worst = worst.max((m.expectation(&rho).unwrap() - direct).abs());
    }
    check(worst <= 1e-9, || format!("max |E + 8 Re ρ18| = {worst:e}"))?;
    Ok(format!("defect {:.1e}, max deviation {worst:.1e} over 200 states", defect.max(defect2)))
}

fn criterion_4() -> Outcome {
    let r = analyze_pan(&named_record("pan", None).unwrap(), None).unwrap();
    let coh = r.coherence_magnitude;
    // independent of the module: |E|/8 with sigma σ/8
    check((coh.value - 2.83 / 8.0).abs() < 1e-12 && (coh.sigma - 0.09 / 8.0).abs() < 1e-12, || {
        format!("coherence {coh}")
    })?;
    check(rounds_to(coh.value, 0.35), || format!("coherence {} does not round to 0.35", coh.value))?;
    check(sigma_matches_quote(coh.sigma, 0.01, 2), || format!("coherence sigma {} vs 0.01", coh.sigma))?;
    let t = 2f64.powf(1.5);
    check(2.83 - 0.09 < t && t < 2.83 + 0.09, || "1σ interval does not straddle 2^(3/2)".into())?;
    check(r.verdict.n_partite == ThresholdOutcome::Inconclusive, || {
        format!("3-particle verdict {:?}", r.verdict.n_partite)
    })?;
    check(r.verdict.local_realism == ThresholdOutcome::Exceeded, || {
        format!("local verdict {:?}", r.verdict.local_realism)
    })?;
    Ok(format!("|Re ρ| = {:.2} ± {:.2}; {}", coh.value, coh.sigma, r.verdict.summary()))
}

fn max_target_fidelity(state: &QuantumState, targets: &[(String, QuantumState)]) -> f64 {
    targets.iter().map(|(_, t)| fidelity(state, t).unwrap()).fold(f64::NEG_INFINITY, f64::max)
}

fn criterion_5() -> Outcome {
    let targets = ghz_class_targets(3).unwrap();
    check(targets.len() == 8, || format!("{} GHZ-class targets", targets.len()))?;
    let mut rng = seeded(0xacc5);
    let mut worst = f64::NEG_INFINITY;
    for k in 0..1000 {
        worst =
            worst.max(max_target_fidelity(&random_biseparable_pure(&mut rng, BIPARTITIONS_OF_THREE[k % 3]), &targets));
    }
    let mut worst_mix = f64::NEG_INFINITY;
    for k in 0..200 {
        worst_mix = worst_mix.max(max_target_fidelity(&random_biseparable_mixture(&mut rng, 2 + k % 4), &targets));
    }
    check(worst <= 0.5 + 1e-9, || format!("pure max F = {worst}"))?;
    check(worst_mix <= 0.5 + 1e-9, || format!("mixture max F = {worst_mix}"))?;
    Ok(format!("max F {worst:.6} (pure), {worst_mix:.6} (mixtures)"))
}

fn random_settings(rng: &mut SeededRng) -> PartySettings {
    PartySettings::new(
        (0..3).map(|_| PartySetting { unprimed: random_direction(rng), primed: random_direction(rng) }).collect(),
    )
    .unwrap()
}

fn criterion_6() -> Outcome {
    let mut rng = seeded(0xacc6);
    let (mut p, mut b, mut a) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..500 {
        let s = random_settings(&mut rng);
        let prod = if k % 2 == 0 { random_product_pure(&mut rng, 3) } else { random_product_mixture(&mut rng, 3, 3) };
        p = p.max(klyshko_abs(&prod, &s));
        b = b.max(klyshko_abs(&random_biseparable_mixture(&mut rng, 1 + k % 3), &s));
        let any = if k % 2 == 0 { random_pure(&mut rng, 3) } else { random_density(&mut rng, 3) };
        a = a.max(klyshko_abs(&any, &s));
    }
    check(p <= 2.0 + 1e-9, || format!("product max {p}"))?;
    check(b <= 2f64.powf(1.5) + 1e-9, || format!("biseparable max {b}"))?;
    check(a <= 4.0 + 1e-9, || format!("arbitrary max {a}"))?;
    Ok(format!("max |E(F3)|: product {p:.4}, biseparable {b:.4}, arbitrary {a:.4}"))
}

fn criterion_7() -> Outcome {
    let w = build_w_state(0.375).unwrap();
    let i = expectation(&w, &interference_observable()).unwrap();
    let ctl = expectation(&w, &control_observable()).unwrap();
    check((i + 3.0 / 16.0).abs() < 1e-12, || format!("interference {i}"))?;
    check(ctl.abs() < 1e-12, || format!("control {ctl}"))?;
    for (l, want) in [(2, 13.0 / 32.0), (7, 13.0 / 32.0), (4, 3.0 / 32.0), (5, 3.0 / 32.0)] {
        let p = matrix_element(&w, label(l), label(l)).unwrap();
        check((p.re - want).abs() < 1e-12 && p.im.abs() < 1e-12, || format!("population {l} = {p}"))?;
    }
    let fit = fit_w_state(&w_targets(&named_record("bouwmeester", None).unwrap()).unwrap()).unwrap();
    check((fit.alpha - 0.375).abs() <= 1e-3, || format!("fitted α = {}", fit.alpha))?;
    Ok(format!("interference {i:.6}, control {ctl:.1e}, fitted α {:.6}", fit.alpha))
}

fn criterion_8() -> Outcome {
    let r = analyze_rauschenbeutel(&named_record("rauschenbeutel", None).unwrap()).unwrap();
    let wc = &r.worst_case;
    let quoted = [
        ("α/2", wc.alpha_half, 0.03, 0.01),
        ("β/2", wc.beta_half, 0.04, 0.01),
        ("γ/2", wc.gamma_half, 0.06, 0.01),
        ("w", wc.w, 0.26, 0.04),
        ("2 Re ρ72", wc.corrected_offdiag_twice, 0.02, 0.05),
    ];
    for (name, v, q, qs) in quoted {
        check(rounds_to(v.value, q), || format!("{name} = {} does not round to {q}", v.value))?;
        check(sigma_matches_quote(v.sigma, qs, 2), || format!("{name} sigma {:.6} does not round to {qs}", v.sigma))?;
    }
    // oracle: ½(P2 + P7) + (A − w)/2 with quadrature sigma
    let half = |m: MeasuredValue| m * 0.5;
    let p2 = MeasuredValue::new(0.22, 0.01).unwrap();
    let p7 = MeasuredValue::new(0.36, 0.01).unwrap();
    let a = MeasuredValue::new(0.28, 0.04).unwrap();
    let w_oracle = MeasuredValue::new(0.06, 0.02).unwrap()
        + MeasuredValue::new(0.08, 0.02).unwrap()
        + MeasuredValue::new(0.12, 0.02).unwrap();
    check((wc.w.value - w_oracle.value).abs() < 1e-12 && (wc.w.sigma - w_oracle.sigma).abs() < 1e-12, || {
        format!("w = {} vs {w_oracle}", wc.w)
    })?;
    let f = half(p2 + p7) + half(a - w_oracle);
    let cf = wc.corrected_fidelity;
    check((cf.value - f.value).abs() < 1e-12 && (cf.sigma - f.sigma).abs() < 1e-12, || {
        format!("corrected fidelity {cf} vs oracle {f}")
    })?;
    check(rounds_to(cf.value, 0.30), || format!("corrected fidelity {} does not round to 0.30", cf.value))?;
    check((cf.value - 0.31).abs() <= 0.01 + 1e-9, || {
        format!("corrected fidelity {} not within 0.01 of 0.31", cf.value)
    })?;
    check(sigma_matches_quote(cf.sigma, 0.05, 2), || {
        format!("corrected fidelity sigma {:.6} does not round to 0.05", cf.sigma)
    })?;
    Ok(format!("w = {:.2} ± {:.2}, corrected F = {:.2} ± {:.2}", wc.w.value, wc.w.sigma, cf.value, cf.sigma))
}

fn criterion_9() -> Outcome {
    let r = demonstrate_rho_mix().unwrap();
    check((r.p2 - 0.25).abs() < 1e-12 && (r.p7 - 0.25).abs() < 1e-12, || format!("P2 {}, P7 {}", r.p2, r.p7))?;
    check((r.signal.amplitude - 1.0).abs() <= 1e-9, || format!("amplitude {}", r.signal.amplitude))?;
    check((r.procedure_fidelity - 0.75).abs() <= 1e-9, || format!("procedure F {}", r.procedure_fidelity))?;
    check((r.true_fidelity - 0.5).abs() <= 1e-12, || format!("true F {}", r.true_fidelity))?;
    Ok(format!(
        "A = {:.12}, procedure F {:.12}, true F {:.12}",
        r.signal.amplitude, r.procedure_fidelity, r.true_fidelity
    ))
}

fn criterion_10() -> Outcome {
    let mut rng = seeded(0xacca);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let comps: Vec<Harmonic> = (1..=3)
            .map(|f| Harmonic {
                frequency: f,
                amplitude: 0.1 + random_angle(&mut rng) / TAU,
                phase: random_angle(&mut rng) - TAU / 2.0,
            })
            .collect();
        let samples = synthesize(random_angle(&mut rng) / TAU - 0.5, &comps, 16);
        for h in &comps {
            let got = harmonic_extract(&samples, h.frequency).unwrap();
            let d = (got.phase - h.phase).rem_euclid(TAU);
            worst = worst.max((got.amplitude - h.amplitude).abs()).max(d.min(TAU - d));
        }
    }
    check(worst <= 1e-9, || format!("synthetic error {worst:e}"))?;
    let g = ghz3();
    let samples = scan(16, |phi| expectation(&g, &sackett_observable(Sign::Plus, phi))).unwrap();
    let h3 = harmonic_extract(&samples, 3).unwrap();
    let two_re = 2.0 * g.rho().get(0, 7).re;
    check((h3.amplitude - 1.0).abs() <= 1e-9, || format!("f=3 amplitude {}", h3.amplitude))?;
    check((h3.amplitude - two_re).abs() <= 1e-9, || format!("f=3 amplitude {} vs 2 Re ρ18 {two_re}", h3.amplitude))?;
    Ok(format!("synthetic error {worst:.1e}, GHZ f=3 amplitude {:.12}", h3.amplitude))
}

fn criterion_11() -> Outcome {
    let (pb, g) = (psi_b(), ghz3());
    let mut rng = seeded(0xaccb);
    let (mut e1, mut e2, mut e3) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..200 {
        let (a, b, cc) = (random_angle(&mut rng), random_angle(&mut rng), random_angle(&mut rng));
        let o = product_observable(&[xz(a), xz(b), xz(cc)]).unwrap();
        e1 = e1.max((expectation(&pb, &o).unwrap() - a.cos() * b.cos() * cc.cos()).abs());
        let o = product_observable(&[xy(a), xy(b), xy(cc)]).unwrap();
        e2 = e2.max((expectation(&pb, &o).unwrap() - (a + b - cc).cos()).abs());
        e3 = e3.max((expectation(&g, &o).unwrap() - (a + b + cc).cos()).abs());
    }
    check(e1 <= 1e-9, || format!("xz ψ_B deviation {e1:e}"))?;
    check(e2 <= 1e-9, || format!("xy ψ_B deviation {e2:e}"))?;
    check(e3 <= 1e-9, || format!("xy GHZ deviation {e3:e}"))?;
    Ok(format!("max deviations {e1:.1e}, {e2:.1e}, {e3:.1e}"))
}

const GROUPS: [&str; 10] = [
    "bell-klyshko",
    "mermin",
    "pan",
    "condition-b",
    "bounds",
    "w-state",
    "worst-case",
    "rho-mix",
    "harmonics",
    "factorization",
];

fn criterion_12() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_entwit"))
        .args(["reproduce", "--out"])
        .arg(dir.path())
        .env_remove("ENTWIT_DATA_DIR")
        .output()
        .unwrap();
    let text = std::fs::read_to_string(dir.path().join("reproduction.json"))
        .map_err(|e| format!("no reproduction.json: {e}"))?;
    let report: Value = serde_json::from_str(&text).map_err(|e| format!("unparsable report: {e}"))?;
    let checks = report["checks"].as_object().ok_or("report has no checks")?;
    for g in GROUPS {
        check(checks.values().any(|c| c["group"] == g), || format!("no checks for group {g}"))?;
    }
    for (id, c) in checks {
        for key in ["reference_value", "computed_value", "tolerance", "pass"] {
            check(c.get(key).is_some(), || format!("{id} lacks {key}"))?;
        }
    }
    let failing: Vec<&str> = checks.iter().filter(|(_, c)| c["pass"] != true).map(|(id, _)| id.as_str()).collect();
    check(out.status.success(), || {
        format!("exit status {}; failing checks: {}", out.status.code().unwrap_or(-1), failing.join(", "))
    })?;
    Ok(format!("{} checks across {} groups", checks.len(), GROUPS.len()))
}

fn main() {
    let criteria: [Criterion; 12] = [
        (1, "singlet/triplet mixture reaches 2√2", criterion_1),
        (2, "GHZ and ψ_B reach 4", criterion_2),
        (3, "Mermin operator identity", criterion_3),
        (4, "Pan inference", criterion_4),
        (5, "biseparable fidelity bound", criterion_5),
        (6, "Bell-Klyshko bounds", criterion_6),
        (7, "W state at α = 3/8", criterion_7),
        (8, "worst-case contamination", criterion_8),
        (9, "ρ_mix demonstration", criterion_9),
        (10, "harmonic extraction", criterion_10),
        (11, "factorization", criterion_11),
        (12, "reproduce report", criterion_12),
    ];
    let mut unexpected = Vec::new();
    for (n, name, run) in criteria {
        let outcome = run();
        let gap = KNOWN_GAPS.iter().find(|(k, _)| *k == n).map(|(_, why)| *why);
        match (&outcome, gap) {
            (Ok(detail), None) => println!("criterion {n:>2} PASS  {name}: {detail}"),
            (Err(why), Some(expected)) if why == expected => {
                println!("criterion {n:>2} FAIL  {name}: {why} (known gap)")
            }
            (Err(why), _) => {
                println!("criterion {n:>2} FAIL  {name}: {why}");
                unexpected.push(n);
            }
            (Ok(detail), Some(_)) => {
                println!("criterion {n:>2} PASS  {name}: {detail} (listed as a known gap; update KNOWN_GAPS)");
                unexpected.push(n);
            }
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected acceptance results for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
