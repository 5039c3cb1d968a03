//! Acceptance criteria 1–10. Runs as a plain binary and prints one line per
//! criterion; exits non-zero if any criterion fails.

use std::process::ExitCode;

use nhpassage::dynamics::{evolve_bra, evolve_ket, refinement_deviation, TimeDependentOperator, TimeGrid};
use nhpassage::dyson::{fitted_remainder_order, ORDER_FIT_HORIZONS, ORDER_FIT_QUADRATURE};
use nhpassage::frame::{triangularization_residual, two_level_frame, von_neumann_residual, TwoLevelFrameParams};
use nhpassage::linalg::{ComplexMatrix, StateVector, C64};
use nhpassage::scenario::{
    csv_string, execute, export_csv, export_svg, simulate, svg_string, Protocol, RunReport, ScenarioConfig,
    ScenarioRegistry, StageModel,
};
use nhpassage::smooth::SmoothFn;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const BUILTINS: [&str; 6] = ["two_level_a", "two_level_b", "two_level_c", "two_level_d", "cyclic_cw", "cyclic_ccw"];

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }
}

fn config(id: &str) -> ScenarioConfig {
    ScenarioConfig {
        loops: if id.starts_with("cyclic") { 2 } else { 1 },
        ..ScenarioConfig::for_scenario(id)
    }
}

fn build(id: &str) -> Protocol {
    ScenarioRegistry::with_builtins().build(&config(id)).expect("built-in scenario builds")
}

fn run(id: &str) -> RunReport {
    execute(&build(id), &config(id)).expect("built-in scenario runs")
}

fn pop(report: &RunReport, level: usize, t: f64) -> f64 {
    report.trajectory.population_at(level, t).expect("grid time")
}

fn stage_grid(cfg: &ScenarioConfig, start: f64, end: f64) -> TimeGrid {
    TimeGrid::new(start, end, cfg.dt()).unwrap()
}

fn two_level_transfers() -> Outcome {
    let mut worst_target: f64 = 0.0;
    let mut worst_final_norm: f64 = 0.0;
    let mut highest_min: f64 = 0.0;
    for (id, target) in [("two_level_a", 0), ("two_level_b", 1), ("two_level_c", 0), ("two_level_d", 1)] {
        let r = run(id);
        let tf = 2.0 * r.period;
        worst_target = worst_target.max((pop(&r, target, tf) - 1.0).abs());
        let i = r.trajectory.grid.len() - 1;
        worst_final_norm = worst_final_norm.max((r.trajectory.total_norm[i] - 1.0).abs());
        let min = r.trajectory.total_norm.iter().copied().fold(f64::INFINITY, f64::min);
        highest_min = highest_min.max(min);
    }
    Outcome::new(
        worst_target <= 1e-6 && worst_final_norm <= 1e-6 && highest_min < 1.0 - 1e-3,
        format!("max |P_target(2T)-1| = {worst_target:.2e}, max |total(2T)-1| = {worst_final_norm:.2e}, largest min total = {highest_min:.4}"),
    )
}

fn cyclic(id: &str, order: [usize; 3]) -> (f64, RunReport) {
    let r = run(id);
    let t = r.period;
    let mut worst: f64 = 0.0;
    for k in 0..2 {
        for (s, &level) in order.iter().enumerate() {
            let at = (6 * k + 2 * (s + 1)) as f64 * t;
            worst = worst.max((pop(&r, level, at) - 1.0).abs());
        }
    }
    (worst, r)
}

fn cyclic_clockwise() -> Outcome {
    let (worst, r) = cyclic("cyclic_cw", [2, 1, 0]);
    let t = r.period;
    let p1 = pop(&r, 1, 1.6 * t);
    let grid = &r.trajectory.grid;
    let mut stage3_pe: f64 = 0.0;
    for k in 0..2 {
        let a = grid.index_of((6 * k + 4) as f64 * t).unwrap();
        let b = grid.index_of((6 * k + 6) as f64 * t).unwrap();
        stage3_pe = stage3_pe.max(r.trajectory.populations[2][a..=b].iter().copied().fold(0.0, f64::max));
    }
    Outcome::new(
        worst <= 1e-6 && (p1 - 0.07).abs() <= 0.02 && stage3_pe < 1e-8,
        format!("max |P-1| at 2T,4T,6T (2 loops) = {worst:.2e}, P1(1.6T) = {p1:.4}, max Pe in stage 3 = {stage3_pe:.1e}"),
    )
}

fn cyclic_counterclockwise() -> Outcome {
    let (worst, _) = cyclic("cyclic_ccw", [1, 2, 0]);
    Outcome::new(worst <= 1e-6, format!("max |P-1| at 2T,4T,6T (2 loops) = {worst:.2e}"))
}

fn triangularization_certificate() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut weakest_perturbed = f64::INFINITY;
    for id in BUILTINS {
        let cfg = config(id);
        let p = build(id);
        let perturbed = p.with_omega_scaled(1.01);
        for (stage, bad) in p.stages.iter().zip(&perturbed.stages) {
            let grid = stage_grid(&cfg, stage.start, stage.end);
            let frame = stage.model.frame();
            worst = worst.max(triangularization_residual(&stage.model.hamiltonian(), &frame, &grid).unwrap());
            let r = triangularization_residual(&bad.model.hamiltonian(), &frame, &grid).unwrap();
            weakest_perturbed = weakest_perturbed.min(r);
        }
    }
    Outcome::new(
        worst < 1e-9 && weakest_perturbed > 1e-3,
        format!("max residual = {worst:.2e}, min residual under 1% Omega perturbation = {weakest_perturbed:.2e}"),
    )
}

fn appendix_equivalence() -> Outcome {
    let mut tri: f64 = 0.0;
    let mut vn: f64 = 0.0;
    for id in BUILTINS {
        let cfg = ScenarioConfig {
            gamma_scale: 0.0,
            ..config(id)
        };
        let p = ScenarioRegistry::with_builtins().build(&cfg).unwrap();
        for stage in &p.stages {
            let grid = stage_grid(&cfg, stage.start, stage.end);
            let (h, frame) = (stage.model.hamiltonian(), stage.model.frame());
            tri = tri.max(triangularization_residual(&h, &frame, &grid).unwrap());
            vn = vn.max(von_neumann_residual(&h, &frame, &grid).unwrap());
        }
    }

    // Misaligned frames: the Hermitian (a) drive against randomly tilted frames.
    let mut rng = StdRng::seed_from_u64(7);
    let cfg = ScenarioConfig {
        gamma_scale: 0.0,
        ..config("two_level_a")
    };
    let p = ScenarioRegistry::with_builtins().build(&cfg).unwrap();
    let stage = &p.stages[0];
    let StageModel::TwoLevel { frame: params, .. } = &stage.model else {
        unreachable!()
    };
    let grid = stage_grid(&cfg, stage.start, stage.end);
    let h = stage.model.hamiltonian();
    let mut weakest = f64::INFINITY;
    for _ in 0..5 {
        let tilt = rng.gen_range(0.2..1.0);
        let wobble = rng.gen_range(0.5..2.0);
        let misaligned = two_level_frame(&TwoLevelFrameParams {
            theta: params.theta.shifted(tilt),
            alpha: SmoothFn::sine(0.4, wobble, 0.0),
        });
        let t = triangularization_residual(&h, &misaligned, &grid).unwrap();
        let v = von_neumann_residual(&h, &misaligned, &grid).unwrap();
        weakest = weakest.min(t.min(v));
    }
    Outcome::new(
        tri < 1e-9 && vn < 1e-9 && weakest > 1e-3,
        format!("gamma=0: triangularization = {tri:.2e}, von Neumann = {vn:.2e}; misaligned frames: min residual = {weakest:.2e}"),
    )
}

fn random_matrix(rng: &mut StdRng, dim: usize, scale: f64) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |_, _| C64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale)))
}

fn random_generator(rng: &mut StdRng, dim: usize) -> TimeDependentOperator {
    let a = random_matrix(rng, dim, 1.0);
    let b = random_matrix(rng, dim, 0.5);
    let w = rng.gen_range(0.5..3.0);
    TimeDependentOperator::new(dim, move |t| &a + &b.scale(C64::new((w * t).sin(), 0.0)))
}

fn biorthogonality() -> Outcome {
    let mut rng = StdRng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for dim in [2, 3] {
        for _ in 0..4 {
            let h = random_generator(&mut rng, dim);
            let grid = TimeGrid::new(0.0, 2.0, 1e-3).unwrap();
            let kets: Vec<_> = (0..dim).map(|m| evolve_ket(&h, &StateVector::basis(dim, m), &grid).unwrap()).collect();
            let bras: Vec<_> = (0..dim).map(|k| evolve_bra(&h, &StateVector::basis(dim, k), &grid).unwrap()).collect();
            for i in 0..grid.len() {
                for (k, bra) in bras.iter().enumerate() {
                    for (m, ket) in kets.iter().enumerate() {
                        let overlap = bra.states[i].inner(&ket.states[i]);
                        let delta = if k == m { 1.0 } else { 0.0 };
                        worst = worst.max((overlap - delta).norm());
                    }
                }
            }
        }
    }
    Outcome::new(worst <= 1e-6, format!("max |<phi_k|psi_m> - delta_km| = {worst:.2e} (2x2 and 3x3, 4 each)"))
}

fn dyson_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(5);
    let mut lowest = f64::INFINITY;
    for dim in [2, 3] {
        for _ in 0..2 {
            let h = random_matrix(&mut rng, dim, 1.0);
            let p = fitted_remainder_order(&h, 4, &ORDER_FIT_HORIZONS, ORDER_FIT_QUADRATURE).unwrap();
            lowest = lowest.min(p);
        }
    }
    Outcome::new(lowest >= 4.5, format!("lowest fitted remainder order = {lowest:.3}"))
}

fn phase_norm_identity(reports: &[RunReport]) -> Outcome {
    let mut worst_norm: f64 = 0.0;
    let mut worst_end: f64 = 0.0;
    for r in reports {
        for (i, state) in r.trajectory.states.iter().enumerate() {
            worst_norm = worst_norm.max((state.norm() - r.phase.f_imag[i].exp()).abs());
        }
        for cp in &r.checkpoints {
            let i = r.trajectory.grid.index_of(cp.t).unwrap();
            worst_end = worst_end.max(r.phase.f_imag[i].abs());
        }
    }
    Outcome::new(
        worst_norm <= 1e-6 && worst_end <= 1e-8,
        format!("max |e^f_imag - |psi|| = {worst_norm:.2e}, max |f_imag(stage end)| = {worst_end:.2e}"),
    )
}

fn bra_relation() -> Outcome {
    let mut worst: f64 = 0.0;
    for id in BUILTINS {
        let cfg = config(id);
        for stage in &build(id).stages {
            worst = worst.max(stage.model.bra_relation(&stage_grid(&cfg, stage.start, stage.end)).unwrap());
        }
    }
    Outcome::new(worst < 1e-8, format!("max residual over all built-in stages = {worst:.2e}"))
}

fn determinism_and_convergence() -> Outcome {
    let mut worst: f64 = 0.0;
    for id in BUILTINS {
        let cfg = config(id);
        let p = build(id);
        let boundaries = p.stages[1..].iter().map(|s| s.start).collect();
        let grid = TimeGrid::new(p.start(), p.end(), cfg.dt())
            .unwrap()
            .with_stage_boundaries(boundaries)
            .unwrap();
        let coarse = simulate(&p, &grid).unwrap();
        let fine = simulate(&p, &grid.refined()).unwrap();
        worst = worst.max(refinement_deviation(&coarse, &fine));
    }

    let dir = tempfile::tempdir().unwrap();
    let mut identical = true;
    for id in ["two_level_c", "cyclic_cw"] {
        let a = run(id);
        let b = run(id);
        identical &= csv_string(&a) == csv_string(&b) && svg_string(&a) == svg_string(&b);
        let (c1, c2) = (dir.path().join("1.csv"), dir.path().join("2.csv"));
        let (s1, s2) = (dir.path().join("1.svg"), dir.path().join("2.svg"));
        export_csv(&a, &c1).unwrap();
        export_csv(&b, &c2).unwrap();
        export_svg(&a, &s1).unwrap();
        export_svg(&b, &s2).unwrap();
        identical &= std::fs::read(&c1).unwrap() == std::fs::read(&c2).unwrap();
        identical &= std::fs::read(&s1).unwrap() == std::fs::read(&s2).unwrap();
    }
    Outcome::new(
        worst <= 1e-8 && identical,
        format!("max population change under dt/2 = {worst:.2e}, byte-identical exports = {identical}"),
    )
}

fn main() -> ExitCode {
    let reports: Vec<RunReport> = BUILTINS.iter().map(|id| run(id)).collect();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("two-level transfers", Box::new(two_level_transfers)),
        ("cyclic clockwise", Box::new(cyclic_clockwise)),
        ("cyclic counterclockwise", Box::new(cyclic_counterclockwise)),
        ("triangularization certificate", Box::new(triangularization_certificate)),
        ("Hermitian-limit equivalence", Box::new(appendix_equivalence)),
        ("biorthogonality", Box::new(biorthogonality)),
        ("Dyson oracle", Box::new(dyson_oracle)),
        ("phase-norm identity", Box::new(move || phase_norm_identity(&reports))),
        ("bra-phase relation", Box::new(bra_relation)),
        ("determinism and convergence", Box::new(determinism_and_convergence)),
    ];
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let outcome = check();
        if !outcome.passed {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<30} {}  {}",
            n + 1,
            name,
            if outcome.passed { "PASS" } else { "FAIL" },
            outcome.detail
        );
    }
    println!("acceptance: {} passed, {} failed", criteria.len() - failed, failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
