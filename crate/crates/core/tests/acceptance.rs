//! Acceptance suite: one line per criterion, non-zero exit on any failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::process::{Command, ExitCode};
use std::time::Instant;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use semimodular::gl2::{fib_matrix_check, generator_identities};
use semimodular::poles::pole_at;
use semimodular::{
    check_identity, check_proof_step, pole_map, CheckConfig, IdentityKind, Kind, LucasSequence,
    ProofStep, ResidualReport, SequenceSpec, SeriesSpec, Variant,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn cfg(n_samples: usize, seed: u64) -> CheckConfig {
    CheckConfig {
        n_samples,
        seed,
        ..CheckConfig::default()
    }
}

fn both_identities(spec: &SeriesSpec, n: usize, seed: u64) -> Result<[ResidualReport; 2], String> {
    let a = spec.sequence().a();
    let run = |kind| check_identity(spec, kind, &cfg(n, seed)).map_err(|e| e.to_string());
    Ok([
        run(IdentityKind::InversionS)?,
        run(IdentityKind::MirrorPa { a })?,
    ])
}

fn require_pass(label: &str, reports: &[ResidualReport]) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for r in reports {
        if !r.pass {
            return Err(format!(
                "{label}: {} of {} samples fail (seed {}, max residual {:e})",
                r.failures(),
                r.residuals.len(),
                r.seed,
                r.max_residual()
            ));
        }
        let ratio = r
            .residuals
            .iter()
            .zip(&r.tolerances)
            .map(|(res, tol)| res / tol)
            .fold(0.0, f64::max);
        worst = worst.max(ratio);
    }
    Ok(worst)
}

fn presets() -> Vec<SequenceSpec> {
    let mut out = vec![SequenceSpec::FIBONACCI, SequenceSpec::LUCAS_NUMBERS];
    for a in [1, 2, 3, -2] {
        for kind in [Kind::First, Kind::Second] {
            out.push(SequenceSpec::new(a, -1, kind).unwrap());
        }
    }
    out
}

fn ulps(x: f64, y: f64) -> u64 {
    if x == y {
        return 0;
    }
    if x.signum() != y.signum() {
        return u64::MAX;
    }
    x.to_bits().abs_diff(y.to_bits())
}

fn theorem_two() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for k in 1..=3 {
        let spec = SeriesSpec::fibonacci(2 * k).map_err(|e| e.to_string())?;
        let reports = both_identities(&spec, 100, 100 + k as u64)?;
        worst = worst.max(require_pass(&format!("k = {k}"), &reports)?);
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 10.0 {
        return Err(format!("took {secs:.2} s"));
    }
    Ok(format!(
        "k = 1..3, 600 samples in {secs:.2} s, worst residual/tolerance {worst:.2e}"
    ))
}

fn proof_steps() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 1..=2 {
        let spec = SeriesSpec::fibonacci(2 * k).map_err(|e| e.to_string())?;
        for (i, step) in ProofStep::ALL.iter().enumerate() {
            let r = check_proof_step(&spec, *step, &cfg(50, 200 + i as u64))
                .map_err(|e| e.to_string())?;
            worst = worst.max(require_pass(&format!("{step:?}, k = {k}"), &[r])?);
        }
    }
    Ok(format!(
        "{} steps, k = 1, 2, 50 samples each, worst ratio {worst:.2e}",
        ProofStep::ALL.len()
    ))
}

fn theorem_three() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 1..=2 {
        let spec = SeriesSpec::lucas_numbers(2 * k).map_err(|e| e.to_string())?;
        let reports = both_identities(&spec, 100, 300 + k as u64)?;
        worst = worst.max(require_pass(&format!("k = {k}"), &reports)?);
    }
    Ok(format!("Lucas numbers k = 1, 2, worst ratio {worst:.2e}"))
}

fn theorem_four() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut suites = 0;
    for a in [1, 2, 3, -2] {
        for kind in [Kind::First, Kind::Second] {
            for k in 1..=2 {
                let seq = SequenceSpec::new(a, -1, kind).map_err(|e| e.to_string())?;
                let spec =
                    SeriesSpec::new(seq, 2 * k, Variant::Standard).map_err(|e| e.to_string())?;
                let reports = both_identities(&spec, 100, 400 + k as u64)?;
                worst = worst.max(require_pass(
                    &format!("a = {a}, {kind:?}, k = {k}"),
                    &reports,
                )?);
                suites += 2;
            }
        }
    }
    // a = 1 against the dedicated Fibonacci and Lucas-number runs.
    let mut max_ulps = 0;
    for (general, preset) in [
        (
            SequenceSpec::new(1, -1, Kind::First).unwrap(),
            SequenceSpec::FIBONACCI,
        ),
        (
            SequenceSpec::new(1, -1, Kind::Second).unwrap(),
            SequenceSpec::LUCAS_NUMBERS,
        ),
    ] {
        for k in 1..=2u32 {
            let g = SeriesSpec::new(general, 2 * k, Variant::Standard).unwrap();
            let p = SeriesSpec::new(preset, 2 * k, Variant::Standard).unwrap();
            let points = check_identity(&p, IdentityKind::InversionS, &cfg(100, 100 + k as u64))
                .map_err(|e| e.to_string())?
                .sample_points;
            for z in points {
                let (x, y) = match (g.evaluate(z, 1e-12), p.evaluate(z, 1e-12)) {
                    (Ok(x), Ok(y)) => (x.value, y.value),
                    (e1, e2) => return Err(format!("evaluation at {z}: {e1:?} / {e2:?}")),
                };
                max_ulps = max_ulps.max(ulps(x.re, y.re)).max(ulps(x.im, y.im));
            }
        }
    }
    if max_ulps > 2 {
        return Err(format!("a = 1 differs from the presets by {max_ulps} ulp"));
    }
    Ok(format!(
        "{suites} suites, worst ratio {worst:.2e}; a = 1 matches presets within {max_ulps} ulp"
    ))
}

fn footnote() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 1..=2 {
        let spec = SeriesSpec::new(SequenceSpec::FIBONACCI, 2 * k, Variant::Footnote)
            .map_err(|e| e.to_string())?;
        let reports = both_identities(&spec, 100, 500 + k as u64)?;
        worst = worst.max(require_pass(&format!("k = {k}"), &reports)?);
    }
    Ok(format!(
        "footnote variant k = 1, 2, worst ratio {worst:.2e}"
    ))
}

fn negative_control() -> Outcome {
    let spec = SeriesSpec::fibonacci(4).map_err(|e| e.to_string())?;
    let config = CheckConfig {
        allow_unpaired: true,
        ..cfg(100, 600)
    };
    let r = check_identity(&spec, IdentityKind::MirrorPa { a: 2 }, &config)
        .map_err(|e| e.to_string())?;
    let frac = r.failure_fraction();
    if r.pass || frac < 0.9 {
        return Err(format!(
            "mismatched mirror failed at only {:.0}% of samples",
            100.0 * frac
        ));
    }
    Ok(format!(
        "mirror a = 2 on the Fibonacci series fails at {:.0}% of samples",
        100.0 * frac
    ))
}

fn tail_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(700);
    let specs = presets();
    let mut cases = 0;
    let mut worst: f64 = 0.0;
    while cases < 50 {
        let seq = specs[rng.random_range(0..specs.len())];
        let weight = rng.random_range(2..=5u32);
        let variant = if seq.is_fibonacci() && rng.random_bool(0.3) {
            Variant::Footnote
        } else {
            Variant::Standard
        };
        let spec = SeriesSpec::new(seq, weight, variant).map_err(|e| e.to_string())?;
        let r = rng.random_range(0.2f64.ln()..5f64.ln()).exp();
        let z = Complex64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU));
        let j = rng.random_range(3..=12i64);
        if spec.pole_distance(z) < 1e-3 {
            continue;
        }
        cases += 1;
        let partial = spec.partial_sum(z.into(), j).map_err(|e| e.to_string())?;
        let reference = spec
            .brute_force_oracle(z, j + 20)
            .map_err(|e| e.to_string())?;
        let diff = (reference - partial.extended).norm();
        if !(diff <= partial.tail_bound) {
            return Err(format!(
                "{seq} weight {weight} {variant:?} at {z}, J = {j}: |diff| {diff:e} > bound {:e}",
                partial.tail_bound
            ));
        }
        if partial.tail_bound > 0.0 {
            worst = worst.max(diff / partial.tail_bound);
        }
    }
    Ok(format!(
        "50 cases, zero violations, largest diff/bound {worst:.7}"
    ))
}

fn pole_exactness() -> Outcome {
    let mut checked = 0;
    for spec in presets() {
        let seq = LucasSequence::new(spec);
        let map = pole_map(&spec, -20, 20).map_err(|e| e.to_string())?;
        for p in &map.poles {
            let kills = (-30i64..=30)
                .any(|j| (seq.value(j).unwrap() * p + seq.value(j - 1).unwrap()).is_zero());
            if !kills {
                return Err(format!("{spec}: reported pole {p} kills no denominator"));
            }
            checked += 1;
        }
        for n in -20i64..=20 {
            if let Some(p) = pole_at(&seq, n).map_err(|e| e.to_string())? {
                if !map.poles.contains(&p) {
                    return Err(format!(
                        "{spec}: pole {p} of index {n} missing from the map"
                    ));
                }
            }
        }
    }
    let q = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
    let expected = vec![
        q(-1, 1),
        q(-2, 3),
        q(-1, 2),
        q(0, 1),
        q(1, 1),
        q(3, 2),
        q(5, 3),
        q(2, 1),
    ];
    let fib = pole_map(&SequenceSpec::FIBONACCI, -3, 5).map_err(|e| e.to_string())?;
    if fib.poles != expected {
        let got: Vec<String> = fib.poles.iter().map(|p| p.to_string()).collect();
        return Err(format!("Fibonacci poles for -3..5: {}", got.join(", ")));
    }
    Ok(format!(
        "{checked} poles over {} presets verified exactly; Fibonacci -3..5 list matches",
        presets().len()
    ))
}

fn odd_weight() -> Outcome {
    let spec = SeriesSpec::fibonacci(3).map_err(|e| e.to_string())?;
    let r = spec
        .evaluate(Complex64::new(0.3, 0.7), 1e-10)
        .map_err(|e| e.to_string())?;
    let size = r.value.norm();
    if !(size > 10.0 * r.tail_bound) {
        return Err(format!(
            "|F3| = {size:e} against tail bound {:e}",
            r.tail_bound
        ));
    }
    Ok(format!(
        "|F3(0.3+0.7i)| = {size:.6} with tail bound {:.1e}",
        r.tail_bound
    ))
}

fn matrices() -> Outcome {
    let ids = generator_identities();
    if let Some((name, _)) = ids.iter().find(|(_, ok)| !ok) {
        return Err(format!("{name} fails"));
    }
    if let Some(n) = (0..=50).find(|&n| !fib_matrix_check(n)) {
        return Err(format!("(PS)^{n} is not the Fibonacci matrix"));
    }
    Ok(format!(
        "{} generator relations and (PS)^n for n = 0..50 hold exactly",
        ids.len()
    ))
}

fn run_bin(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_semimod"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?} exited with {:?}", out.status.code()));
    }
    Ok(out.stdout)
}

fn determinism() -> Outcome {
    let eval = [
        "eval",
        "--seq",
        "lucas",
        "--weight",
        "6",
        "--z",
        "-0.35,0.9",
        "--tol",
        "1e-12",
    ];
    if run_bin(&eval)? != run_bin(&eval)? {
        return Err("eval output differs between runs".into());
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut images = Vec::new();
    for name in ["a.ppm", "b.ppm"] {
        let path = dir.path().join(name);
        let path = path.to_str().unwrap();
        run_bin(&[
            "grid",
            "--seq",
            "fib",
            "--weight",
            "4",
            "--window",
            "-2,2,-2,2",
            "--res",
            "64x64",
            "--out",
            path,
        ])?;
        images.push(std::fs::read(path).map_err(|e| e.to_string())?);
    }
    if images[0] != images[1] {
        return Err("64x64 grid differs between runs".into());
    }
    Ok(format!(
        "eval and 64x64 grid ({} bytes) identical across runs",
        images[0].len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("inversion and mirror laws, Fibonacci", theorem_two),
        ("half-sum proof steps", proof_steps),
        ("Lucas-number series", theorem_three),
        ("general a-Lucas sequences", theorem_four),
        ("footnote variant", footnote),
        ("negative control", negative_control),
        ("tail-bound soundness", tail_soundness),
        ("pole exactness", pole_exactness),
        ("odd weight does not vanish", odd_weight),
        ("matrix relations", matrices),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
