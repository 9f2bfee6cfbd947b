//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qreg_core::algebra::{qop_matrix, qop_mul, Mat2, QubitOp, ScaledQubitOp};
use qreg_core::corpus::{find, CORPUS};
use qreg_core::dsl::Overrides;
use qreg_core::{
    apply_stage, compose_stages, run_program, BasisIndex, ExperimentProgram, RegisterShape, SparseState,
};
use qreg_oracle::{compare_states, dense_run, MAX_ORACLE_RANK};

const SEED: u64 = 0x5152_4547;

const TOL_SG: f64 = 1e-12;
const TOL_MZ: f64 = 1e-10;
const TOL_POVM: f64 = 1e-10;
const TOL_EPR: f64 = 1e-12;
const TOL_HSZ: f64 = 1e-10;
const TOL_SEPARABLE: f64 = 1e-12;
const TOL_ORACLE: f64 = 1e-10;
const TOL_LINEAR: f64 = 1e-12;
const TOL_SEMIGROUP: f64 = 1e-12;

const CODEC_SAMPLES: usize = 10_000;
const NILPOTENCY_SAMPLES: usize = 1_000;
const RANDOM_SETS: usize = 20;
const HSZ_POINTS: usize = 100;

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rng(criterion: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED ^ criterion)
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
}

/// Uniform point on the unit sphere of C².
fn unit_pair(rng: &mut ChaCha8Rng) -> (Complex64, Complex64) {
    let v = [gaussian(rng), gaussian(rng), gaussian(rng), gaussian(rng)];
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    (c(v[0] / n, v[1] / n), c(v[2] / n, v[3] / n))
}

fn program(name: &str, params: &[(&str, Complex64)]) -> ExperimentProgram {
    let ov: Overrides = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    find(name)
        .unwrap_or_else(|| panic!("no bundled file {name}"))
        .parse_with(&ov)
        .unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn q(qubits: &[usize]) -> BasisIndex {
    BasisIndex::from_qubits(qubits.iter().copied())
}

fn random_state(rng: &mut ChaCha8Rng, shape: RegisterShape, terms: usize) -> SparseState {
    let terms: Vec<(BasisIndex, Complex64)> = (0..terms)
        .map(|_| {
            let index = BasisIndex(rng.gen_range(0..=shape.max_index()));
            (index, c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        })
        .collect();
    SparseState::from_terms(shape, terms).unwrap()
}

// Transcribed row by row from the published product table; `s` stands for sigma.
const PUBLISHED_TABLE: [[&str; 7]; 7] = [
    ["P0", "0", "A", "0", "A", "iA", "-P0"],
    ["0", "P1", "0", "A+", "A+", "-iA+", "P1"],
    ["0", "A", "0", "P0", "P0", "-iP0", "A"],
    ["A+", "0", "P1", "0", "P1", "iP1", "-A+"],
    ["A+", "A", "P1", "P0", "s0", "is3", "-is2"],
    ["-iA+", "iA", "-iP1", "iP0", "-is3", "s0", "is1"],
    ["-P0", "P1", "-A", "A+", "is2", "-is1", "s0"],
];

fn render(x: ScaledQubitOp) -> String {
    let Some(op) = x.op() else {
        return "0".to_string();
    };
    let prefix = match x.coeff() {
        z if z == c(1.0, 0.0) => "",
        z if z == c(-1.0, 0.0) => "-",
        z if z == c(0.0, 1.0) => "i",
        z if z == c(0.0, -1.0) => "-i",
        z => return format!("({z}){}", op.symbol()),
    };
    format!("{prefix}{}", op.symbol())
}

fn mat_mul(x: &Mat2, y: &Mat2) -> Mat2 {
    let mut m = [[c(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for k in 0..2 {
            m[r][k] = x[r][0] * y[0][k] + x[r][1] * y[1][k];
        }
    }
    m
}

fn table_closure() -> Outcome {
    let mut checked = 0;
    for (r, &x) in QubitOp::TABULATED.iter().enumerate() {
        for (k, &y) in QubitOp::TABULATED.iter().enumerate() {
            let product = qop_mul(x.into(), y.into());
            let got = render(product);
            ensure(got == PUBLISHED_TABLE[r][k], || {
                format!("{x}·{y} = {got}, table says {}", PUBLISHED_TABLE[r][k])
            })?;
            let expected = mat_mul(&qop_matrix(x.into()), &qop_matrix(y.into()));
            ensure(qop_matrix(product) == expected, || format!("{x}·{y}: matrix mismatch"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked}/49 products match table entries and matrix products exactly"))
}

fn stern_gerlach() -> Outcome {
    let mut rng = rng(2);
    let mut worst: f64 = 0.0;
    for _ in 0..RANDOM_SETS {
        let (alpha, beta) = unit_pair(&mut rng);
        let p = program("stern_gerlach", &[("alpha", alpha), ("beta", beta)]);
        let report = run_program(&p).map_err(|e| e.to_string())?;
        worst = worst
            .max((report.detectors["up"] - alpha.norm_sqr()).abs())
            .max((report.detectors["down"] - beta.norm_sqr()).abs());
        for a in [0, 1, 3, 5, 6, 7] {
            let amp = report.final_state.amplitude(BasisIndex(a));
            ensure(amp == c(0.0, 0.0), || format!("outcome |{a}) has amplitude {amp}"))?;
        }
    }
    ensure(worst <= TOL_SG, || format!("max deviation {worst:e} > {TOL_SG:e}"))?;
    Ok(format!("{RANDOM_SETS} random (alpha, beta): max deviation {worst:.1e}, other outcomes exactly 0"))
}

fn basis_codec() -> Outcome {
    let s3 = RegisterShape::new(3).unwrap();
    let s4 = RegisterShape::new(4).unwrap();
    ensure(BasisIndex::from_bits(&[1, 0, 1], s3).unwrap() == BasisIndex(5), || "(1,0,1) != 5".into())?;
    ensure(BasisIndex::from_bits(&[1, 1, 0, 1], s4).unwrap() == BasisIndex(11), || "(1,1,0,1) != 11".into())?;
    ensure(BasisIndex(5).to_bits(s3) == [1, 0, 1], || "5 != (1,0,1)".into())?;
    ensure(BasisIndex(11).to_bits(s4) == [1, 1, 0, 1], || "11 != (1,1,0,1)".into())?;
    let mut rng = rng(3);
    for _ in 0..CODEC_SAMPLES {
        let rank = rng.gen_range(1..=63);
        let shape = RegisterShape::new(rank).unwrap();
        let bits: Vec<u8> = (0..rank).map(|_| rng.gen_range(0..=1)).collect();
        let index = BasisIndex::from_bits(&bits, shape).map_err(|e| e.to_string())?;
        ensure(index.to_bits(shape) == bits, || format!("round trip failed for {bits:?}"))?;
    }
    Ok(format!("examples exact; {CODEC_SAMPLES} random round trips exact"))
}

fn mach_zender() -> Outcome {
    let mut rng = rng(4);
    let mut worst: f64 = 0.0;
    for _ in 0..RANDOM_SETS {
        let (a, b) = unit_pair(&mut rng);
        let (eta, mu, phi) = (rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU));
        let p = program(
            "mach_zender",
            &[("a", a), ("b", b), ("eta", eta.into()), ("mu", mu.into()), ("phi", phi.into())],
        );
        let report = run_program(&p).map_err(|e| e.to_string())?;
        let global = Complex64::from_polar(1.0, 2.0 * eta + mu);
        let e_phi = Complex64::from_polar(1.0, phi);
        let d1 = global * (a * b - e_phi * a * b.conj());
        let d2 = global * (a.norm_sqr() + e_phi * b.conj() * b.conj());
        let state = &report.final_state;
        worst = worst
            .max((state.amplitude(q(&[6])) - d1).norm())
            .max((state.amplitude(q(&[7])) - d2).norm())
            .max((report.detectors["d1"] + report.detectors["d2"] - 1.0).abs());
    }
    ensure(worst <= TOL_MZ, || format!("max deviation {worst:e} > {TOL_MZ:e}"))?;
    Ok(format!("{RANDOM_SETS} random parameter sets: max deviation {worst:.1e}"))
}

fn povm_point(alpha: Complex64, beta: Complex64, theta: f64) -> Result<[f64; 3], String> {
    let p = program("povm_interference", &[("alpha", alpha), ("beta", beta), ("theta", theta.into())]);
    let report = run_program(&p).map_err(|e| e.to_string())?;
    ensure(report.norm_ok(), || format!("norm {} at theta={theta}", report.norm))?;
    Ok([report.detectors["unknown"], report.detectors["u"], report.detectors["v"]])
}

fn povm_interference() -> Outcome {
    let mut rng = rng(5);
    let mut worst: f64 = 0.0;
    for _ in 0..RANDOM_SETS {
        let theta = rng.gen_range(1e-3..PI / 2.0 - 1e-3);
        let (a0, b0) = unit_pair(&mut rng);
        let weight = a0.norm_sqr() + b0.norm_sqr() + 2.0 * (a0.conj() * b0).re * theta.cos();
        let (alpha, beta) = (a0 / weight.sqrt(), b0 / weight.sqrt());
        let got = povm_point(alpha, beta, theta)?;
        let cos = theta.cos();
        let expected = [
            (alpha + beta).norm_sqr() * cos,
            alpha.norm_sqr() * (1.0 - cos),
            beta.norm_sqr() * (1.0 - cos),
        ];
        for (g, e) in got.iter().zip(expected) {
            worst = worst.max((g - e).abs());
        }
        worst = worst.max((got.iter().sum::<f64>() - 1.0).abs());
    }
    let third = c(1.0 / 3f64.sqrt(), 0.0);
    let point = povm_point(third, third, PI / 3.0)?;
    for (g, e) in point.iter().zip([2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0]) {
        worst = worst.max((g - e).abs());
    }
    ensure(worst <= TOL_POVM, || format!("max deviation {worst:e} > {TOL_POVM:e}"))?;
    Ok(format!(
        "{RANDOM_SETS} random sets and (1/sqrt3, 1/sqrt3, pi/3) -> ({:.6}, {:.6}, {:.6}); max deviation {worst:.1e}",
        point[0], point[1], point[2]
    ))
}

fn epr() -> Outcome {
    let mut rng = rng(6);
    let mut worst: f64 = 0.0;
    for _ in 0..RANDOM_SETS {
        let (theta, phi) = (rng.gen_range(0.0..PI), rng.gen_range(0.0..TAU));
        let p = program("epr", &[("theta", theta.into()), ("phi", phi.into())]);
        let report = run_program(&p).map_err(|e| e.to_string())?;
        let rank = report.rank.as_ref().ok_or("zero final state")?;
        ensure(rank.homogeneous && rank.ranks == [2], || format!("rank report {rank:?}"))?;
        let (s, co) = ((theta / 2.0).sin(), (theta / 2.0).cos());
        let e = Complex64::from_polar(FRAC_1_SQRT_2, -phi);
        let h = c(FRAC_1_SQRT_2, 0.0);
        let expected = [
            (q(&[1, 3]), e * s),
            (q(&[1, 4]), e * co),
            (q(&[2, 3]), -h * co),
            (q(&[2, 4]), h * s),
        ];
        for (index, amp) in expected {
            worst = worst.max((report.final_state.amplitude(index) - amp).norm());
        }
        let total: f64 = report.detectors.values().sum();
        worst = worst.max((total - 1.0).abs());
    }
    ensure(worst <= TOL_EPR, || format!("max deviation {worst:e} > {TOL_EPR:e}"))?;
    Ok(format!("{RANDOM_SETS} random (theta, phi): rank {{2}}, max deviation {worst:.1e}"))
}

fn hsz() -> Outcome {
    let mut rng = rng(7);
    let (theta, phi2) = (rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU));
    let mut worst: f64 = 0.0;
    for k in 0..HSZ_POINTS {
        let phi1 = TAU * k as f64 / (HSZ_POINTS - 1) as f64;
        let p = program("hsz", &[("theta", theta.into()), ("phi1", phi1.into()), ("phi2", phi2.into())]);
        let report = run_program(&p).map_err(|e| e.to_string())?;
        let cos = (theta + phi2 - phi1).cos();
        let plus = 0.25 * (1.0 + cos);
        let minus = 0.25 * (1.0 - cos);
        for (name, expected) in [("c7_9", plus), ("c7_10", minus), ("c8_9", minus), ("c8_10", plus)] {
            worst = worst.max((report.detectors[name] - expected).abs());
        }
        for qubit in ["q7", "q8", "q9", "q10"] {
            worst = worst.max((report.marginals[qubit] - 0.5).abs());
        }
    }
    ensure(worst <= TOL_HSZ, || format!("max deviation {worst:e} > {TOL_HSZ:e}"))?;
    Ok(format!("{HSZ_POINTS}-point phi1 sweep: coincidences and marginals within {worst:.1e}"))
}

fn independent() -> Outcome {
    let mut rng = rng(8);
    let mut worst: f64 = 0.0;
    for _ in 0..RANDOM_SETS {
        let (alpha, beta) = unit_pair(&mut rng);
        let (gamma, delta) = unit_pair(&mut rng);
        let p = program(
            "independent_pair",
            &[("alpha", alpha), ("beta", beta), ("gamma", gamma), ("delta", delta)],
        );
        let state = p.final_state().map_err(|e| e.to_string())?;
        for (u, cu) in [(1, alpha), (2, beta)] {
            for (v, dv) in [(4, gamma), (5, delta)] {
                worst = worst.max((state.amplitude(q(&[u, v])) - cu * dv).norm());
            }
        }
    }
    ensure(worst <= TOL_SEPARABLE, || format!("max deviation {worst:e} > {TOL_SEPARABLE:e}"))?;
    Ok(format!("{RANDOM_SETS} random sets x 4 detector pairs: max deviation {worst:.1e}"))
}

fn oracle() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut compared = Vec::new();
    for entry in &CORPUS {
        let p = entry.parse().map_err(|e| e.to_string())?;
        if p.shape().rank() > MAX_ORACLE_RANK {
            return Err(format!("{} has rank {} above the oracle cap", entry.name, p.shape().rank()));
        }
        let sparse = p.final_state().map_err(|e| e.to_string())?;
        let dense = dense_run(&p).map_err(|e| e.to_string())?;
        let dev = compare_states(&sparse, &dense).map_err(|e| e.to_string())?;
        ensure(dev <= TOL_ORACLE, || format!("{}: deviation {dev:e}", entry.name))?;
        worst = worst.max(dev);
        compared.push(entry.name);
    }
    Ok(format!("{} bundled programs match the dense pipeline, max deviation {worst:.1e}", compared.len()))
}

fn properties() -> Outcome {
    let mut rng = rng(10);
    let shape = RegisterShape::new(10).unwrap();

    for _ in 0..NILPOTENCY_SAMPLES {
        let s = random_state(&mut rng, shape, 12);
        let k = rng.gen_range(0..10);
        let twice = s.apply_creation(k).unwrap().apply_creation(k).unwrap();
        ensure(twice.is_zero(), || format!("A+{k} A+{k} did not annihilate"))?;
    }

    for _ in 0..NILPOTENCY_SAMPLES {
        let s = random_state(&mut rng, shape, 12);
        let i = rng.gen_range(0..10);
        let j = (i + rng.gen_range(1..10)) % 10;
        let ij = s.apply_creation(j).unwrap().apply_creation(i).unwrap();
        let ji = s.apply_creation(i).unwrap().apply_creation(j).unwrap();
        ensure(ij == ji, || format!("A+{i} and A+{j} do not commute"))?;
    }

    let mut stages = 0;
    let mut worst_linear: f64 = 0.0;
    for entry in &CORPUS {
        let p = entry.parse().map_err(|e| e.to_string())?;
        let void = SparseState::void(p.shape());
        for stage in p.stages() {
            stages += 1;
            let image = apply_stage(&void, stage).unwrap();
            ensure(image == void, || format!("{}/{} moves the void", entry.name, stage.name()))?;
            for _ in 0..10 {
                let x = random_state(&mut rng, p.shape(), 8);
                let y = random_state(&mut rng, p.shape(), 8);
                let (a, b) = unit_pair(&mut rng);
                let lhs = apply_stage(&x.scale(a).add(&y.scale(b)).unwrap(), stage).unwrap();
                let rhs = apply_stage(&x, stage)
                    .unwrap()
                    .scale(a)
                    .add(&apply_stage(&y, stage).unwrap().scale(b))
                    .unwrap();
                worst_linear = worst_linear.max(lhs.max_deviation(&rhs).unwrap());
            }
        }
    }
    ensure(worst_linear <= TOL_LINEAR, || format!("linearity deviation {worst_linear:e}"))?;

    let mut worst_collapse: f64 = 0.0;
    for _ in 0..RANDOM_SETS {
        let (a, b) = unit_pair(&mut rng);
        let (eta, mu, phi) = (rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU));
        let p = program(
            "mach_zender",
            &[("a", a), ("b", b), ("eta", eta.into()), ("mu", mu.into()), ("phi", phi.into())],
        );
        let mut collapsed = p.stages()[0].clone();
        for next in &p.stages()[1..] {
            collapsed = compose_stages(&collapsed, next, "collapsed").map_err(|e| e.to_string())?;
        }
        let once = apply_stage(&p.initial_state().unwrap(), &collapsed).unwrap();
        let staged = p.final_state().unwrap();
        worst_collapse = worst_collapse.max(once.max_deviation(&staged).unwrap());
    }
    ensure(worst_collapse <= TOL_SEMIGROUP, || format!("stage collapse deviation {worst_collapse:e}"))?;

    Ok(format!(
        "nilpotency/commutation on {NILPOTENCY_SAMPLES} states each; void fixed and linear ({worst_linear:.1e}) \
         for {stages} bundled stages; MZ collapse {worst_collapse:.1e}"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (1, "table closure", table_closure),
        (2, "Stern-Gerlach", stern_gerlach),
        (3, "basis codec", basis_codec),
        (4, "Mach-Zender", mach_zender),
        (5, "POVM interference", povm_interference),
        (6, "EPR", epr),
        (7, "two-particle interferometry", hsz),
        (8, "independent experiments", independent),
        (9, "oracle equivalence", oracle),
        (10, "property suites", properties),
    ];
    let mut failures = 0;
    for (id, name, run) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".to_string());
            Err(msg)
        });
        let ms = start.elapsed().as_secs_f64() * 1e3;
        match outcome {
            Ok(detail) => println!("[PASS] {id:>2} {name}: {detail} ({ms:.0} ms)"),
            Err(detail) => {
                failures += 1;
                println!("[FAIL] {id:>2} {name}: {detail} ({ms:.0} ms)");
            }
        }
    }
    println!("{} of 10 criteria passed", 10 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
