//! Acceptance gate: eleven independently checkable claims about the built
//! chains, each with its stated tolerance. One test per claim; each prints
//! a single PASS line with the measured quantities on success.

use std::collections::BTreeMap;
use std::process::Command;

use num_complex::Complex64;

use cyclemix::asymptotics::{contour_alpha, saddle_approx, solve_r, subgroup_bound_check};
use cyclemix::config::state_count;
use cyclemix::kernels::{adjacency, doob_kernel, mixture_kernel, StateSpace};
use cyclemix::mixing::{cutoff_sweep, exact_tv_curve, l2_curve, l2_curve_direct, MixingTimeOutcome};
use cyclemix::models::{build_asep, build_dimer, dimer_fourier_residual};
use cyclemix::spectral::{
    eigenvalue_ell, heat_kernel_density, lambda_i1_closed_form, lambda_i2,
};
use cyclemix::symm::{
    elementary, elementary_ground, elementary_via_newton, pieri_check, q_binomial_check,
    schur_batch, vandermonde_abs_sq,
};
use cyclemix::{
    enumerate_configs, gap, ChainModel, CircleConfig, StepDistribution,
};

const INSTANCES: [(u32, u32); 5] = [(5, 2), (6, 3), (8, 4), (10, 4), (12, 6)];

fn lazy_model(n: u32, k: u32) -> ChainModel {
    ChainModel::new(n, k, StepDistribution::lazy_symmetric()).unwrap()
}

#[test]
fn criterion_01_common_eigenbasis_relation() {
    let mut worst_overall: f64 = 0.0;
    for (n, k) in INSTANCES {
        let space = StateSpace::build(n, k, 10_000).unwrap();
        let operators: BTreeMap<i64, _> = (-(k as i64)..=k as i64)
            .map(|ell| (ell, adjacency(&space, ell).unwrap()))
            .collect();
        for j_state in space.configs() {
            let v: Vec<Complex64> = schur_batch(space.configs(), &j_state.xi())
                .unwrap()
                .iter()
                .map(|s| s.conj())
                .collect();
            for (&ell, a) in &operators {
                let av = a.apply_complex(&v);
                let e = eigenvalue_ell(j_state, -ell).unwrap()
                    * elementary_ground(n, k, ell.unsigned_abs() as u32).unwrap();
                let worst = av
                    .iter()
                    .zip(&v)
                    .map(|(a, b)| (a - e * b).norm())
                    .fold(0.0f64, f64::max);
                assert!(
                    worst <= 1e-9 * k as f64,
                    "eigen relation fails at ({n},{k}), ell={ell}, J={j_state:?}: {worst:.3e}"
                );
                worst_overall = worst_overall.max(worst / k as f64);
            }
        }
    }
    println!(
        "PASS criterion 1: common-eigenbasis relation on {:?}; worst residual/k = {worst_overall:.3e} <= 1e-9",
        INSTANCES
    );
}

#[test]
fn criterion_02_stochasticity_and_stationarity() {
    let mut worst_row: f64 = 0.0;
    let mut worst_stat: f64 = 0.0;
    let mut worst_mass: f64 = 0.0;
    for (n, k) in INSTANCES {
        let space = StateSpace::build(n, k, 10_000).unwrap();
        let p = StepDistribution::lazy_symmetric();
        let mut kernels: Vec<_> = (-(k as i64)..=k as i64)
            .map(|ell| doob_kernel(&space, ell).unwrap())
            .collect();
        kernels.push(mixture_kernel(&space, &p).unwrap());
        for kernel in &kernels {
            for i in 0..kernel.dimension() {
                worst_row = worst_row.max((kernel.row_sum(i) - 1.0).abs());
            }
        }
        let mu = space.stationary_vector();
        worst_mass = worst_mass.max((mu.iter().sum::<f64>() - 1.0).abs());
        let p_kernel = kernels.last().unwrap();
        let propagated = p_kernel.apply_left(mu);
        let l1: f64 = propagated
            .iter()
            .zip(mu)
            .map(|(a, b)| (a - b).abs())
            .sum();
        worst_stat = worst_stat.max(l1);
    }
    assert!(worst_row <= 1e-12, "row sums off by {worst_row:.3e}");
    assert!(worst_stat <= 1e-11, "stationarity off by {worst_stat:.3e}");
    assert!(worst_mass <= 1e-10, "mass off by {worst_mass:.3e}");
    println!(
        "PASS criterion 2: row sums within {worst_row:.3e} <= 1e-12, \
         ||muP - mu||_1 <= {worst_stat:.3e} <= 1e-11, mass within {worst_mass:.3e} <= 1e-10"
    );
}

#[test]
fn criterion_03_closed_forms_are_exact() {
    let mut worst_i1: f64 = 0.0;
    let mut worst_i2: f64 = 0.0;
    let mut worst_imag: f64 = 0.0;
    for (n, k) in INSTANCES {
        let first = CircleConfig::first_excited(n, k).unwrap();
        for ell in 1..=k {
            let direct = eigenvalue_ell(&first, ell as i64).unwrap();
            let closed = lambda_i1_closed_form(n, k, ell).unwrap();
            worst_i1 = worst_i1.max((direct - closed).norm());
        }
        let report = lambda_i2(&lazy_model(n, k)).unwrap();
        worst_i2 = worst_i2.max((report.direct.re - report.closed).abs());
        worst_imag = worst_imag.max(report.direct.im.abs());
    }
    assert!(worst_i1 <= 1e-12, "first-excited closed form off by {worst_i1:.3e}");
    assert!(worst_i2 <= 1e-12, "stretched closed form off by {worst_i2:.3e}");
    assert!(worst_imag <= 1e-13, "stretched eigenvalue has imaginary part {worst_imag:.3e}");
    println!(
        "PASS criterion 3: first-excited closed form within {worst_i1:.3e} <= 1e-12, \
         stretched within {worst_i2:.3e} <= 1e-12, imaginary part {worst_imag:.3e} <= 1e-13"
    );
}

#[test]
fn criterion_04_gap_matches_its_first_order_form() {
    let mut errors = Vec::new();
    for n in [12u32, 16, 20, 24] {
        let report = gap(&lazy_model(n, n / 2)).unwrap();
        let error = (report.gamma_exact / report.gamma_formula - 1.0).abs();
        assert!(
            error <= 10.0 / n as f64,
            "gap deviation {error:.3e} exceeds 10/{n}"
        );
        errors.push((n, error));
    }
    for pair in errors.windows(2) {
        assert!(
            pair[1].1 <= pair[0].1,
            "gap deviation increased from n={} to n={}",
            pair[0].0,
            pair[1].0
        );
    }
    println!(
        "PASS criterion 4: |gamma_exact/gamma_formula - 1| = {:?}, each <= 10/n and decreasing",
        errors
            .iter()
            .map(|(n, e)| format!("n={n}:{e:.2e}"))
            .collect::<Vec<_>>()
    );
}

#[test]
fn criterion_05_distance_inequalities_hold_along_curves() {
    let models = [
        ("constant", lazy_model(12, 6)),
        ("asep", build_asep(12, 6, 0.0, 1.0).unwrap().model),
        ("dimer", build_dimer(12, 6, 1.0, 1.0).unwrap().model),
    ];
    for (name, model) in &models {
        let gamma = gap(model).unwrap().gamma_exact;
        let t_max = 10 * ((12f64).ln() / gamma).ceil() as u64;
        let curve = exact_tv_curve(model, t_max, &model.ground()).unwrap();
        for t in 0..curve.times.len() {
            assert!(
                4.0 * curve.tv[t] * curve.tv[t] <= curve.l2_sq[t] + 1e-10,
                "{name}: 4D^2 > D2^2 at t={t}"
            );
            assert!(
                curve.lower_bound[t] <= curve.tv[t] + 1e-10,
                "{name}: lower bound exceeds tv at t={t}"
            );
        }
        curve.validate().unwrap();
    }
    println!(
        "PASS criterion 5: 4D(t)^2 <= D2(t)^2 + 1e-10 and lower(t) <= D(t) + 1e-10 \
         on constant/asep/dimer at (12,6) out to 10*ceil(log n/gamma)"
    );
}

#[test]
fn criterion_06_spectral_heat_kernel_matches_matrix_powers() {
    let mut worst_density: f64 = 0.0;
    let mut worst_l2: f64 = 0.0;
    for (n, k) in [(6u32, 3u32), (5, 2)] {
        let model = lazy_model(n, k);
        let space = model.space().unwrap();
        let kernel = model.kernel().unwrap();
        let mu = space.stationary_vector();
        let mut row = vec![0.0; space.len()];
        row[space.ground_index()] = 1.0;
        let spectral_l2 = l2_curve(&model, 20).unwrap();
        let direct_l2 = l2_curve_direct(&model, 20).unwrap();
        for t in 0..=20u64 {
            for (i, target) in space.configs().iter().enumerate() {
                let spectral = heat_kernel_density(&model, t, target).unwrap();
                let direct = row[i] / mu[i];
                let scale = direct.abs().max(1.0);
                worst_density = worst_density.max((spectral - direct).abs() / scale);
            }
            let scale = direct_l2[t as usize].abs().max(1.0);
            worst_l2 = worst_l2
                .max((spectral_l2[t as usize] - direct_l2[t as usize]).abs() / scale);
            row = kernel.apply_left(&row);
        }
    }
    assert!(worst_density <= 1e-9, "density mismatch {worst_density:.3e}");
    assert!(worst_l2 <= 1e-9, "l2 mismatch {worst_l2:.3e}");
    println!(
        "PASS criterion 6: heat-kernel density within {worst_density:.3e} <= 1e-9 and \
         D2^2 within {worst_l2:.3e} <= 1e-9 of matrix powers on (6,3),(5,2), t <= 20"
    );
}

#[test]
fn criterion_07_cutoff_trend_on_the_lazy_family() {
    let models: Vec<ChainModel> = [8u32, 12, 16, 20]
        .iter()
        .map(|&n| lazy_model(n, n / 2))
        .collect();
    let s_grid: Vec<f64> = (-8..=8).map(|i| i as f64 * 0.5).collect();
    let sweep = cutoff_sweep(&models, "lazy symmetric, k = n/2", &s_grid, &[0.25]).unwrap();
    let mut deviations = Vec::new();
    for record in &sweep.records {
        let threshold = &record.t_eps[0];
        let MixingTimeOutcome::Reached { t, .. } = threshold.outcome else {
            panic!("threshold 0.25 not reached at n={}", record.n);
        };
        let ratio = threshold.ratio_log_n.unwrap();
        assert!(
            (0.5..=2.0).contains(&ratio),
            "t_0.25*gamma/log n = {ratio} out of [0.5, 2] at n={}",
            record.n
        );
        deviations.push((record.n, t, (ratio - 1.0).abs()));
    }
    for pair in deviations.windows(2) {
        assert!(
            pair[1].2 <= pair[0].2 + 1e-12,
            "|ratio - 1| increased from n={} to n={}",
            pair[0].0,
            pair[1].0
        );
    }
    let last = sweep.records.last().unwrap();
    let profile = &last.profile_log_n;
    for pair in profile.windows(2) {
        assert!(
            pair[1].value <= pair[0].value + 1e-12,
            "profile not monotone at n=20, s={}",
            pair[1].s
        );
    }
    let drop = profile.first().unwrap().value - profile.last().unwrap().value;
    assert!(drop >= 0.5, "window drop {drop} < 0.5 at n=20");
    println!(
        "PASS criterion 7: t_0.25*gamma/log n deviations {:?} in [0.5,2] and non-increasing; \
         n=20 profile monotone with drop {drop:.3} >= 0.5",
        deviations
            .iter()
            .map(|(n, t, d)| format!("n={n}:t={t},|r-1|={d:.3}"))
            .collect::<Vec<_>>()
    );
}

#[test]
fn criterion_08_symmetric_function_identities() {
    let mut worst_q: f64 = 0.0;
    for ell in 0..=5u32 {
        worst_q = worst_q.max(q_binomial_check(12, 5, ell).unwrap());
    }
    assert!(worst_q <= 1e-10, "q-binomial residual {worst_q:.3e}");

    let mut worst_pieri: f64 = 0.0;
    for (n, k) in [(5u32, 2u32), (7, 3)] {
        worst_pieri = worst_pieri.max(pieri_check(n, k).unwrap());
    }
    assert!(worst_pieri <= 1e-8, "pieri residual {worst_pieri:.3e}");

    let mut worst_newton: f64 = 0.0;
    for config in [
        CircleConfig::ground(12, 5).unwrap(),
        CircleConfig::new(12, vec![11, 8, 5, 2, 0]).unwrap(),
    ] {
        let xs = config.xi();
        for ell in 0..=5usize {
            let direct = elementary(&xs, ell).unwrap();
            let newton = elementary_via_newton(&xs, ell).unwrap();
            let scale = direct.norm().max(1.0);
            worst_newton = worst_newton.max((direct - newton).norm() / scale);
        }
    }
    assert!(worst_newton <= 1e-10, "newton residual {worst_newton:.3e}");

    let total: f64 = enumerate_configs(4, 2, 100)
        .unwrap()
        .iter()
        .map(vandermonde_abs_sq)
        .sum();
    assert!(
        (total - 16.0).abs() <= 1e-12,
        "sum of |V|^2 over B_2,4 is {total}, not 16"
    );
    assert_eq!(state_count(4, 2), 6);
    println!(
        "PASS criterion 8: q-binomial {worst_q:.3e} <= 1e-10, pieri {worst_pieri:.3e} <= 1e-8, \
         newton-vs-product {worst_newton:.3e} <= 1e-10, sum |V|^2 = {total} = 16 +- 1e-12"
    );
}

#[test]
fn criterion_09_stationary_phase_laboratory() {
    let configs = enumerate_configs(12, 5, 10_000).unwrap();
    let pick = {
        use rand::Rng;
        let mut rng = cyclemix::rng::stream_rng(9, 0);
        rng.gen_range(0..configs.len())
    };
    let mut worst_contour: f64 = 0.0;
    for state in [&configs[pick], &CircleConfig::ground(12, 5).unwrap()] {
        for ell in 0..=2u32 {
            let approx = contour_alpha(state, ell, 0.9, 4096).unwrap();
            let exact = elementary(&state.xi(), ell as usize).unwrap();
            let scale = exact.norm().max(1e-30);
            worst_contour = worst_contour.max((approx - exact).norm() / scale);
        }
    }
    assert!(
        worst_contour <= 1e-6,
        "contour quadrature off by {worst_contour:.3e}"
    );

    let mut radius_gaps = Vec::new();
    let mut saddle_products = Vec::new();
    for k in [16u32, 24, 32] {
        let n = 2 * k;
        let ell = k / 4;
        let data = solve_r(n, k, ell).unwrap();
        let gap_k2 = data.closed_form_gap() * (k as f64) * (k as f64);
        assert!(
            gap_k2 <= 10.0,
            "solved radius gap * k^2 = {gap_k2:.3} at k={k}"
        );
        radius_gaps.push((k, gap_k2));
        let report = saddle_approx(n, k, ell).unwrap();
        let product = report.rel_error * k as f64 * report.data.r;
        assert!(
            product <= 1.0,
            "saddle relative error * kr = {product:.3} at k={k}"
        );
        saddle_products.push((k, product));
    }

    let mut worst_slack: f64 = 0.0;
    for n in 3..=14u32 {
        for k in 1..n {
            let report = subgroup_bound_check(n, k, 10_000).unwrap();
            assert!(
                report.max_slack <= 1e-10,
                "power-sum bound violated at ({n},{k}): slack {:.3e}",
                report.max_slack
            );
            worst_slack = worst_slack.max(report.max_slack);
        }
    }
    println!(
        "PASS criterion 9: contour within {worst_contour:.3e} <= 1e-6 on (12,5); \
         radius gap * k^2 = {radius_gaps:?} <= 10; saddle relerr * kr = {saddle_products:?} bounded; \
         power-sum bound slack <= {worst_slack:.3e} for all n <= 14"
    );
}

#[test]
fn criterion_10_model_structure_constants() {
    let gaps: Vec<(f64, f64)> = [(2.0, 0.0), (1.0, 1.0), (0.0, 2.0)]
        .iter()
        .map(|&(alpha, beta)| {
            let preset = build_asep(16, 8, alpha, beta).unwrap();
            let report = gap(&preset.model).unwrap();
            (report.gamma_exact, report.gamma_formula)
        })
        .collect();
    let mut worst_split: f64 = 0.0;
    for pair in gaps.windows(2) {
        worst_split = worst_split
            .max((pair[0].0 - pair[1].0).abs())
            .max((pair[0].1 - pair[1].1).abs());
    }
    assert!(
        worst_split <= 1e-12,
        "gap varies across rate splits by {worst_split:.3e}"
    );

    let preset = build_dimer(12, 6, 1.0, 1.0).unwrap();
    let residual = dimer_fourier_residual(&preset, 512).unwrap();
    assert!(residual <= 1e-9, "transform residual {residual:.3e}");
    println!(
        "PASS criterion 10: gap varies by {worst_split:.3e} <= 1e-12 across rate splits at (16,8); \
         dimer transform product identity within {residual:.3e} <= 1e-9 at (12,6)"
    );
}

#[test]
fn criterion_11_artifacts_are_reproducible() {
    let binary = env!("CARGO_BIN_EXE_cyclemix");
    let dir = tempfile::tempdir().unwrap();
    let run = |tag: &str| -> Vec<(String, Vec<u8>)> {
        let jobs: Vec<Vec<String>> = vec![
            vec![
                "sample", "--n", "10", "--k", "4", "--p", "-1:0.25,0:0.5,1:0.25", "--steps",
                "200", "--seed", "42",
            ],
            vec!["spectrum", "--n", "8", "--k", "4", "--p", "-1:0.3,0:0.4,1:0.3"],
            vec!["gap", "--n", "12", "--k", "6", "--model", "asep", "--alpha", "1", "--beta", "1"],
            vec![
                "mix", "--n", "8", "--k", "4", "--p", "-1:0.25,0:0.5,1:0.25", "--tmax", "60",
            ],
            vec!["model", "dimer", "--n", "12", "--k", "6", "--a1", "0.8", "--a2", "1.25"],
        ]
        .into_iter()
        .map(|args| args.into_iter().map(String::from).collect())
        .collect();
        jobs.iter()
            .enumerate()
            .map(|(i, args)| {
                let out = dir.path().join(format!("{tag}-{i}.out"));
                let status = Command::new(binary)
                    .args(args)
                    .arg("--out")
                    .arg(&out)
                    .env_remove("CYCLEMIX_CACHE_DIR")
                    .status()
                    .unwrap();
                assert!(status.success(), "{args:?} failed");
                (args.join(" "), std::fs::read(&out).unwrap())
            })
            .collect()
    };
    let first = run("a");
    let second = run("b");
    for ((args, bytes_a), (_, bytes_b)) in first.iter().zip(&second) {
        assert_eq!(
            bytes_a, bytes_b,
            "artifact differs between identical runs: {args}"
        );
    }
    println!(
        "PASS criterion 11: {} artifacts byte-identical across repeated runs with fixed seed and flags",
        first.len()
    );
}
