//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

use pgl_core::curve::{linspace, synthesize_family, AnalyticPreset};
use pgl_core::detector::{classify_flat_one_type, detect, family_f, Classification, OneTypeKind, OneTypeReport};
use pgl_core::gauss_map::{laplacian_closed, laplacian_numeric, run_calibration, LaplacianConvention};
use pgl_core::grid::{sample_field, GridSpec, LaplacianMode};
use pgl_core::surface::{eval_surface, frame, gauss_codazzi_residuals, SurfaceKind};
use pgl_core::{Bivector, ExponentialFamilyParams, ProfileCurve, PseudoVector4, Sign, Tolerances};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::process::ExitCode;
use std::time::Instant;

const SWEEP_SEED: u64 = 0x5eed_2024;
const SWEEP_SETS: usize = 20;
const STEP: f64 = 1e-3;

struct Outcome {
    id: &'static str,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn example1(domain: (f64, f64)) -> ProfileCurve {
    ProfileCurve::analytic(AnalyticPreset::Hyperbola { m: 1.0, n: 0.0, x0: 0.0, y0: 0.0 }, domain, Sign::Plus).unwrap()
}

fn parabola() -> ProfileCurve {
    ProfileCurve::analytic(AnalyticPreset::Parabola, (1.0, 2.0), Sign::Minus).unwrap()
}

fn line() -> ProfileCurve {
    ProfileCurve::analytic(AnalyticPreset::Line { k: 0.5 }, (1.0, 2.0), Sign::Minus).unwrap()
}

fn sweep_params() -> Vec<ExponentialFamilyParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(SWEEP_SEED);
    let sign = |rng: &mut ChaCha8Rng| if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    (0..SWEEP_SETS)
        .map(|_| {
            let b0 = sign(&mut rng) * rng.gen_range(0.5..=3.0);
            let mu1 = sign(&mut rng) * rng.gen_range(-1.0f64..=1.0).exp() / b0.abs();
            let mu2 = -1.0 / (b0 * b0 * mu1);
            let d = rng.gen_range(-1.0..=1.0);
            let eps = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
            ExponentialFamilyParams::new(b0, mu1, mu2, d, eps)
        })
        .collect()
}

fn run_detect(kind: SurfaceKind, curve: &ProfileCurve, grid: &GridSpec) -> OneTypeReport {
    let samples = sample_field(kind, curve, grid, LaplacianMode::Closed).unwrap();
    detect(&samples, &Tolerances::default()).unwrap()
}

fn max_f_error(r: &OneTypeReport, target: f64) -> f64 {
    r.f_values().map(|f| (f - target).abs()).fold(0.0, f64::max)
}

fn criterion1() -> Vec<Outcome> {
    let start = Instant::now();
    let curve = example1((-2.0, 2.0));
    let grid = GridSpec::new([-2.0, 2.0], [-2.0, 2.0], 33, 33);
    let r = run_detect(SurfaceKind::M1Hyperbolic, &curve, &grid);
    let elapsed = start.elapsed().as_secs_f64();

    // the immersion must be the stated one: (cosh s sinh t, sinh s cosh t, sinh s sinh t, cosh s cosh t)
    let param_err = grid
        .points()
        .iter()
        .map(|&(t, s)| {
            let p = eval_surface(SurfaceKind::M1Hyperbolic, &curve, t, s).unwrap();
            let want =
                PseudoVector4::new(s.cosh() * t.sinh(), s.sinh() * t.cosh(), s.sinh() * t.sinh(), s.cosh() * t.cosh());
            (p - want).max_abs() / want.max_abs()
        })
        .fold(0.0, f64::max);

    let b0 = -1.0;
    let stated_f = 4.0 * b0 * b0;
    let structural = param_err <= 1e-14
        && r.max_abs_k <= 1e-10
        && r.pointwise_one_type
        && r.kind == OneTypeKind::First
        && r.c.max_abs() <= 1e-8
        && r.global_one_type
        && elapsed <= 5.0;
    let stated_err = max_f_error(&r, stated_f);
    let derived_err = max_f_error(&r, family_f(b0));
    let summary = format!(
        "max|K|={:.1e} kind={:?} |C|={:.1e} global={} f in [{:.12}, {:.12}] time={elapsed:.2}s",
        r.max_abs_k,
        r.kind,
        r.c.max_abs(),
        r.global_one_type,
        r.f_stats.min,
        r.f_stats.max
    );
    vec![
        Outcome {
            id: "1",
            name: "Example 1 reproduction (f = 4b0^2 = 4)",
            pass: structural && stated_err <= 1e-8,
            detail: format!("{summary}; max|f - 4|={stated_err:.3e}"),
        },
        Outcome {
            id: "1*",
            name: "Example 1 with f from the relation itself (f = -4b0^2 = -4)",
            pass: structural && derived_err <= 1e-8,
            detail: format!("{summary}; max|f + 4|={derived_err:.3e}"),
        },
    ]
}

fn criterion2() -> Vec<Outcome> {
    let start = Instant::now();
    let tol = Tolerances::default();
    let mut worst_speed = 0.0_f64;
    let mut worst_k = 0.0_f64;
    let mut worst_stated = 0.0_f64;
    let mut worst_derived = 0.0_f64;
    let mut all_first = true;
    let mut failures = Vec::new();
    for (i, p) in sweep_params().into_iter().enumerate() {
        let curve = synthesize_family(p, (-1.0, 1.0)).unwrap();
        let v = curve.validate_default(&tol);
        worst_speed = worst_speed.max(v.max_unit_speed_residual);
        for kind in SurfaceKind::ALL {
            let r = run_detect(kind, &curve, &GridSpec::for_kind(kind, [-1.0, 1.0], 17, 17));
            worst_k = worst_k.max(r.max_abs_k);
            let target = 4.0 * p.b0 * p.b0;
            let stated = r.f_values().map(|f| (f - target).abs() / target).fold(0.0, f64::max);
            let derived = r.f_values().map(|f| (f - family_f(p.b0)).abs() / target).fold(0.0, f64::max);
            worst_stated = worst_stated.max(stated);
            worst_derived = worst_derived.max(derived);
            if r.kind != OneTypeKind::First {
                all_first = false;
                failures.push(format!("set {i} {kind}: kind {:?}", r.kind));
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let base = worst_speed <= 1e-9 && worst_k <= 1e-9 && all_first && elapsed <= 60.0;
    let summary = format!(
        "{} sets x 2 kinds: unit-speed {worst_speed:.1e}, max|K| {worst_k:.1e}, all first kind={all_first}, time={elapsed:.2}s{}",
        SWEEP_SETS,
        if failures.is_empty() { String::new() } else { format!(" [{}]", failures.join("; ")) }
    );
    vec![
        Outcome {
            id: "2",
            name: "family sweep (|f - 4b0^2|/4b0^2 <= 1e-7)",
            pass: base && worst_stated <= 1e-7,
            detail: format!("{summary}; worst relative error {worst_stated:.3e}"),
        },
        Outcome {
            id: "2*",
            name: "family sweep with f = -4b0^2",
            pass: base && worst_derived <= 1e-7,
            detail: format!("{summary}; worst relative error {worst_derived:.3e}"),
        },
    ]
}

/// Window shared by every cross-validated surface.
fn cross_grid() -> Vec<(f64, f64)> {
    GridSpec::new([-1.0, 1.0], [-0.5, 0.5], 9, 9).points()
}

fn fd_error(kind: SurfaceKind, curve: &ProfileCurve, h: f64) -> f64 {
    cross_grid()
        .iter()
        .map(|&(t, s)| {
            let closed = laplacian_closed(kind, curve, t, s).unwrap().ambient;
            let num = laplacian_numeric(kind, curve, t, s, h, LaplacianConvention::EpsWeighted, false).unwrap();
            (num - closed).max_abs()
        })
        .fold(0.0, f64::max)
}

fn criterion3() -> Outcome {
    let mut cases: Vec<(String, SurfaceKind, ProfileCurve)> =
        vec![("example 1".into(), SurfaceKind::M1Hyperbolic, example1((-2.0, 2.0)))];
    for (i, p) in sweep_params().into_iter().enumerate() {
        for kind in SurfaceKind::ALL {
            cases.push((format!("set {i} (b0={:.3}) {kind}", p.b0), kind, synthesize_family(p, (-1.0, 1.0)).unwrap()));
        }
    }
    let mut worst = 0.0_f64;
    let mut fails = Vec::new();
    let mut ratio_range = (f64::INFINITY, f64::NEG_INFINITY);
    for (name, kind, curve) in &cases {
        let e1 = fd_error(*kind, curve, STEP);
        let e2 = fd_error(*kind, curve, 0.5 * STEP);
        let ratio = e1 / e2;
        worst = worst.max(e1);
        ratio_range = (ratio_range.0.min(ratio), ratio_range.1.max(ratio));
        if e1 > 1e-5 || !(3.5..=4.5).contains(&ratio) {
            fails.push(format!("{name}: err {e1:.2e} ratio {ratio:.3}"));
        }
    }
    Outcome {
        id: "3",
        name: "Laplacian cross-validation (h = 1e-3, err <= 1e-5, ratio in [3.5, 4.5])",
        pass: fails.is_empty(),
        detail: format!(
            "{} surfaces, worst err {worst:.3e}, ratios [{:.3}, {:.3}]; {} failing{}",
            cases.len(),
            ratio_range.0,
            ratio_range.1,
            fails.len(),
            if fails.is_empty() { String::new() } else { format!(": {}", fails.join("; ")) }
        ),
    }
}

fn criterion4() -> Outcome {
    let mut curves: Vec<(&str, ProfileCurve)> = vec![
        ("example 1", example1((-2.0, 2.0))),
        ("parabola", parabola()),
        ("line", line()),
        (
            "flat spiral",
            ProfileCurve::analytic(AnalyticPreset::FlatSpiral { k: 1.0, c0: 0.0 }, (-2.0, -1.0), Sign::Plus).unwrap(),
        ),
        (
            "shifted hyperbola",
            ProfileCurve::analytic(
                AnalyticPreset::Hyperbola { m: 1.3, n: 0.1, x0: 0.3, y0: 0.5 },
                (-1.0, 1.0),
                Sign::Plus,
            )
            .unwrap(),
        ),
    ];
    for p in sweep_params().into_iter().take(5) {
        curves.push(("family", synthesize_family(p, (-1.0, 1.0)).unwrap()));
    }
    let mut worst_identity = 0.0_f64;
    let mut worst_gram = 0.0_f64;
    let mut rng = ChaCha8Rng::seed_from_u64(SWEEP_SEED + 4);
    for (_, c) in &curves {
        let (lo, hi) = c.domain();
        for s in linspace(lo, hi, 257) {
            let r = gauss_codazzi_residuals(c, s).unwrap();
            worst_identity = worst_identity.max(r.gauss.abs()).max(r.codazzi.abs());
        }
        for kind in SurfaceKind::ALL {
            let (tlo, thi) = kind.default_t_range();
            for _ in 0..100 {
                let t = rng.gen_range(tlo..thi);
                let s = rng.gen_range(lo..=hi);
                worst_gram = worst_gram.max(frame(kind, c, t, s).unwrap().gram_defect());
            }
        }
    }
    Outcome {
        id: "4",
        name: "Gauss/Codazzi <= 1e-8, Gram diagonals to 1e-10",
        pass: worst_identity <= 1e-8 && worst_gram <= 1e-10,
        detail: format!("{} curves x 2 kinds: identities {worst_identity:.3e}, Gram {worst_gram:.3e}", curves.len()),
    }
}

fn criterion5() -> Outcome {
    let c = parabola();
    let tol = Tolerances::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for kind in SurfaceKind::ALL {
        let r = run_detect(kind, &c, &GridSpec::new([-1.0, 1.0], [1.0, 2.0], 17, 17));
        let cl = classify_flat_one_type(kind, &c, &linspace(1.0, 2.0, 17), &tol).unwrap();
        let ok = !r.pointwise_one_type && r.relative_residual >= 1e-2 && matches!(cl, Classification::NotFlat { .. });
        pass &= ok;
        parts.push(format!(
            "{kind}: residual {:.3e}, {}",
            r.relative_residual,
            if ok { "not-flat" } else { "UNEXPECTED" }
        ));
    }
    Outcome { id: "5", name: "non-flat negative control", pass, detail: parts.join("; ") }
}

fn criterion6() -> Outcome {
    let c = line();
    let tol = Tolerances::default();
    let mut pass = true;
    let mut worst_bc = 0.0_f64;
    let mut worst_lap = 0.0_f64;
    for s in linspace(1.0, 2.0, 17) {
        let inv = c.invariants_abc(s).unwrap();
        worst_bc = worst_bc.max(inv.b.abs()).max(inv.c.abs());
    }
    for kind in SurfaceKind::ALL {
        for (t, s) in GridSpec::new([-1.0, 1.0], [1.0, 2.0], 9, 9).points() {
            worst_lap = worst_lap.max(laplacian_closed(kind, &c, t, s).unwrap().ambient.max_abs());
        }
        let r = run_detect(kind, &c, &GridSpec::new([-1.0, 1.0], [1.0, 2.0], 9, 9));
        let cl = classify_flat_one_type(kind, &c, &linspace(1.0, 2.0, 9), &tol).unwrap();
        pass &= r.harmonic && cl == Classification::TotallyGeodesic;
    }
    pass &= worst_bc == 0.0 && worst_lap == 0.0;
    Outcome {
        id: "6",
        name: "totally geodesic control",
        pass,
        detail: format!("max|b|,|c| = {worst_bc:.1e}, max|dG| = {worst_lap:.1e}, harmonic and totally geodesic on both kinds = {pass}"),
    }
}

fn criterion7() -> Outcome {
    let runs: Vec<_> = (0..3).map(|_| run_calibration()).collect();
    let same = runs.windows(2).all(|w| w[0] == w[1]);
    let chosen = runs[0].chosen;
    let curve = example1((-2.0, 2.0));
    let err = cross_grid()
        .iter()
        .map(|&(t, s)| {
            let closed = laplacian_closed(SurfaceKind::M1Hyperbolic, &curve, t, s).unwrap().ambient;
            let num = laplacian_numeric(SurfaceKind::M1Hyperbolic, &curve, t, s, STEP, chosen, false).unwrap();
            (num - closed).max_abs()
        })
        .fold(0.0, f64::max);
    let g = Bivector::basis(0, 1);
    let at_origin = laplacian_closed(SurfaceKind::M1Hyperbolic, &curve, 0.0, 0.0).unwrap().ambient;
    Outcome {
        id: "7",
        name: "calibration determinism",
        pass: same && err <= 1e-5 && (at_origin + 4.0 * g).max_abs() == 0.0,
        detail: format!(
            "chosen {chosen:?} on {} runs (identical = {same}); errors weighted {:.3e} / unweighted {:.3e}; Example 1 agreement {err:.3e}",
            runs.len(),
            runs[0].eps_weighted_error,
            runs[0].unweighted_error
        ),
    }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut outcomes = Vec::new();
    outcomes.extend(criterion1());
    outcomes.extend(criterion2());
    outcomes.push(criterion3());
    outcomes.push(criterion4());
    outcomes.push(criterion5());
    outcomes.push(criterion6());
    outcomes.push(criterion7());
    let elapsed = start.elapsed().as_secs_f64();
    outcomes.push(Outcome {
        id: "8",
        name: "runtime budget (this target, 180 s)",
        pass: elapsed <= 180.0,
        detail: format!("{elapsed:.2}s"),
    });

    let mut failed = 0;
    for o in &outcomes {
        println!("[{}] criterion {}: {} | {}", if o.pass { "PASS" } else { "FAIL" }, o.id, o.name, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {} failed", outcomes.len() - failed, failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
