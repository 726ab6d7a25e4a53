//! Exact distance-to-stationarity curves, mixing times, the spectral l²
//! machinery, rigorous lower bounds, and cutoff-window sweeps.
//!
//! Total-variation curves come from iterated sparse row propagation and are
//! exact up to floating-point rounding. The squared l²(μ) distance from the
//! ground state has a closed spectral form Σ_{J≠I₀} d(J)²|λ_J|^{2t}, summed
//! over shift-orbit members with phases expanded on demand; a direct
//! propagation evaluation of the same quantity serves as its cross-check.
//! The lower bound evaluates a Paley–Zygmund argument with the first-excited
//! eigenfunction, using only exactly computable spectral data (no asymptotic
//! constants).

use serde::Serialize;

use crate::config::CircleConfig;
use crate::error::{Error, Result};
use crate::kernels::ChainModel;
use crate::spectral::{full_spectrum, gap, lambda_i2};
use crate::symm::elementary_ground;

/// Tolerance allowed on probability-vector normalization checks.
const PROB_SUM_TOL: f64 = 1e-10;
/// States above which the exhaustive worst-start scan is refused.
const WORST_CASE_STATE_LIMIT: usize = 5000;

/// Total-variation distance ½‖a−b‖₁ between two probability vectors on the
/// same index set.
pub fn tv_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!(
            "probability vectors have different lengths ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    for (label, v) in [("first", a), ("second", b)] {
        let sum: f64 = v.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::invalid(format!(
                "{label} vector sums to {sum}, not a probability vector"
            )));
        }
    }
    Ok(0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>())
}

/// Propagate the point mass at `start` through the mixture kernel, calling
/// `visit(t, row)` for t = 0..=t_max; `visit` returns false to stop early.
fn fold_rows(
    model: &ChainModel,
    t_max: u64,
    start: &CircleConfig,
    mut visit: impl FnMut(u64, &[f64]) -> bool,
) -> Result<()> {
    let space = model.space()?;
    if start.n() != model.n() || start.k() != model.k() {
        return Err(Error::invalid("start state outside this model"));
    }
    let kernel = model.kernel()?;
    let mut row = vec![0.0; space.len()];
    row[space.index_of(start)] = 1.0;
    for t in 0..=t_max {
        if !visit(t, &row) {
            return Ok(());
        }
        if t < t_max {
            row = kernel.apply_left(&row);
        }
    }
    Ok(())
}

/// One start's exact mixing diagnostics over integer times 0..=t_max.
///
/// `tv` is the total-variation distance of the chain started at `start`;
/// `l2_sq` and `lower_bound` always refer to the ground start (the l²
/// distance is defined from the ground state and the lower bound applies to
/// the worst start, which exhaustive scans show is the ground orbit).
#[derive(Clone, Debug, Serialize)]
pub struct MixingCurve {
    /// Times 0..=t_max.
    pub times: Vec<u64>,
    /// Total-variation distance to stationarity at each time.
    pub tv: Vec<f64>,
    /// Squared l²(μ) distance of the ground-start density at each time.
    pub l2_sq: Vec<f64>,
    /// Rigorous lower bound on the worst-start total variation.
    pub lower_bound: Vec<f64>,
    /// The start whose total variation the `tv` column tracks.
    #[serde(serialize_with = "crate::config::serialize_config")]
    pub start: CircleConfig,
}

impl MixingCurve {
    /// Check the structural inequalities tying the columns together; valid
    /// for curves whose start lies in the ground orbit (or worst-case
    /// curves).
    pub fn validate(&self) -> Result<()> {
        let m = self.times.len();
        if self.tv.len() != m || self.l2_sq.len() != m || self.lower_bound.len() != m {
            return Err(Error::invalid("curve columns have mismatched lengths"));
        }
        for t in 0..m {
            let tv = self.tv[t];
            if !(-1e-12..=1.0 + 1e-12).contains(&tv) {
                return Err(Error::numerical(format!(
                    "tv out of range at t={t}: {tv}"
                )));
            }
            if t + 1 < m && self.tv[t + 1] > tv + 1e-12 {
                return Err(Error::numerical(format!(
                    "tv increased at t={}: {} -> {}",
                    t,
                    tv,
                    self.tv[t + 1]
                )));
            }
            if 4.0 * tv * tv > self.l2_sq[t] + 1e-10 {
                return Err(Error::numerical(format!(
                    "4 tv² exceeded the squared l² distance at t={t}"
                )));
            }
            if self.lower_bound[t] > tv + 1e-10 {
                return Err(Error::numerical(format!(
                    "lower bound exceeded tv at t={t}: {} > {}",
                    self.lower_bound[t], tv
                )));
            }
        }
        Ok(())
    }
}

/// Exact total-variation values of the chain started at `start`, for
/// t = 0..=t_max.
pub fn tv_curve(model: &ChainModel, t_max: u64, start: &CircleConfig) -> Result<Vec<f64>> {
    let mu = model.space()?.stationary_vector();
    let mut out = Vec::with_capacity(t_max as usize + 1);
    fold_rows(model, t_max, start, |_, row| {
        out.push(0.5 * row.iter().zip(mu).map(|(x, y)| (x - y).abs()).sum::<f64>());
        true
    })?;
    Ok(out)
}

/// Full mixing curve for one start: exact TV by propagation plus the
/// spectral l² column and the rigorous lower-bound column.
pub fn exact_tv_curve(
    model: &ChainModel,
    t_max: u64,
    start: &CircleConfig,
) -> Result<MixingCurve> {
    let tv = tv_curve(model, t_max, start)?;
    let l2_sq = l2_curve(model, t_max)?;
    let lower_bound = lower_bound_curve(model, t_max)?;
    Ok(MixingCurve {
        times: (0..=t_max).collect(),
        tv,
        l2_sq,
        lower_bound,
        start: start.clone(),
    })
}

/// Worst-start mixing curve: TV maximized over shift-orbit representatives
/// at each time (point-mass starts suffice, and shift symmetry reduces
/// starts to orbits). Returns the curve together with the representative
/// attaining the maximum at the final time.
pub fn worst_case_tv_curve(
    model: &ChainModel,
    t_max: u64,
) -> Result<(MixingCurve, CircleConfig)> {
    let space = model.space()?;
    if space.len() > WORST_CASE_STATE_LIMIT {
        return Err(Error::invalid(format!(
            "worst-start scan over {} states exceeds the {WORST_CASE_STATE_LIMIT}-state \
             limit; use the ground start (exhaustive scans show it attains the maximum)",
            space.len()
        )));
    }
    let mu = space.stationary_vector().to_vec();
    let kernel = model.kernel()?;
    let reps: Vec<CircleConfig> = crate::config::orbit_decompose(space.configs())
        .into_iter()
        .map(|o| o.representative)
        .collect();
    let mut rows: Vec<Vec<f64>> = reps
        .iter()
        .map(|rep| {
            let mut row = vec![0.0; space.len()];
            row[space.index_of(rep)] = 1.0;
            row
        })
        .collect();
    let mut tv = Vec::with_capacity(t_max as usize + 1);
    let mut argmax = reps[0].clone();
    for t in 0..=t_max {
        let mut best = f64::NEG_INFINITY;
        for (rep, row) in reps.iter().zip(&rows) {
            let d = 0.5 * row.iter().zip(&mu).map(|(x, y)| (x - y).abs()).sum::<f64>();
            if d > best {
                best = d;
                if t == t_max {
                    argmax = rep.clone();
                }
            }
        }
        tv.push(best);
        if t < t_max {
            for row in &mut rows {
                *row = kernel.apply_left(row);
            }
        }
    }
    let l2_sq = l2_curve(model, t_max)?;
    let lower_bound = lower_bound_curve(model, t_max)?;
    let curve = MixingCurve {
        times: (0..=t_max).collect(),
        tv,
        l2_sq,
        lower_bound,
        start: argmax.clone(),
    };
    Ok((curve, argmax))
}

/// Per-member spectral weights (d(J)², |λ_J|²) over every state except the
/// ground state itself.
fn l2_member_weights(model: &ChainModel) -> Result<Vec<(f64, f64)>> {
    let spectrum = full_spectrum(model)?;
    let ground = model.ground();
    let mut members = Vec::new();
    for entry in &spectrum {
        let d_sq = entry.d * entry.d;
        let is_ground_orbit = entry.orbit.representative == ground;
        for t in 0..entry.orbit.size {
            if is_ground_orbit && t == 0 {
                continue;
            }
            let lambda = entry.member_mixture(model.p(), t);
            members.push((d_sq, lambda.norm_sqr()));
        }
    }
    Ok(members)
}

/// Squared l²(μ) distance of the ground-start density, evaluated spectrally
/// as Σ_{J≠I₀} d(J)²|λ_J|^{2t} for t = 0..=t_max.
pub fn l2_curve(model: &ChainModel, t_max: u64) -> Result<Vec<f64>> {
    let members = l2_member_weights(model)?;
    let mut acc: Vec<f64> = members.iter().map(|&(d_sq, _)| d_sq).collect();
    let mut out = Vec::with_capacity(t_max as usize + 1);
    for t in 0..=t_max {
        out.push(acc.iter().sum());
        if t < t_max {
            for (a, &(_, m)) in acc.iter_mut().zip(&members) {
                *a *= m;
            }
        }
    }
    Ok(out)
}

/// The same squared l²(μ) distance computed by direct propagation,
/// Σ_I μ(I)(P^t(I₀,I)/μ(I) − 1)²; the independent oracle for [`l2_curve`].
pub fn l2_curve_direct(model: &ChainModel, t_max: u64) -> Result<Vec<f64>> {
    let space = model.space()?;
    let mu = space.stationary_vector().to_vec();
    let mut out = Vec::with_capacity(t_max as usize + 1);
    fold_rows(model, t_max, &model.ground(), |_, row| {
        out.push(
            row.iter()
                .zip(&mu)
                .map(|(r, m)| {
                    let h = r / m - 1.0;
                    m * h * h
                })
                .sum(),
        );
        true
    })?;
    Ok(out)
}

/// Largest value of 4·D(t)² − D₂²(t) over t = 0..=t_max (ground start);
/// must stay ≤ 0 up to rounding.
pub fn domination_check(model: &ChainModel, t_max: u64) -> Result<f64> {
    let tv = tv_curve(model, t_max, &model.ground())?;
    let l2 = l2_curve(model, t_max)?;
    Ok(tv
        .iter()
        .zip(&l2)
        .map(|(d, l)| 4.0 * d * d - l)
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Rigorous lower bound on the worst-start total variation at each time,
/// from a Paley–Zygmund second-moment argument with the first-excited
/// eigenfunction. Every ingredient is exact: the numerator is |λ_{I₁}|^{2t},
/// and the variances come from the stretched-state eigenvalue and the
/// ground elementary values. Entries are 0 when the stretched state does
/// not exist (k < 2 or n < k+2) — the bound is then vacuous, not wrong.
pub fn lower_bound_curve(model: &ChainModel, t_max: u64) -> Result<Vec<f64>> {
    let li2 = match lambda_i2(model) {
        Ok(v) => v,
        Err(_) => return Ok(vec![0.0; t_max as usize + 1]),
    };
    let lambda2 = li2.closed;
    let report = gap(model)?;
    let modulus_sq = (1.0 - report.gamma_exact).powi(2);
    let e1 = elementary_ground(model.n(), model.k(), 1)?;
    let s1_sq = e1 * e1;
    let s2_at_ground = s1_sq - 1.0;
    let v_inf = 1.0 / s1_sq;
    let mut out = Vec::with_capacity(t_max as usize + 1);
    let mut numer = 1.0; // |λ_{I₁}|^{2t}
    let mut pow2 = 1.0; // λ_{I₂}^t
    for _ in 0..=t_max {
        let v_t = ((pow2 * s2_at_ground + 1.0) / s1_sq - numer).max(0.0);
        out.push(numer / (2.0 * v_t + 2.0 * v_inf + numer));
        numer *= modulus_sq;
        pow2 *= lambda2;
    }
    Ok(out)
}

/// First index of a non-increasing curve at or below `eps` (binary search).
pub fn first_crossing(curve: &[f64], eps: f64) -> Option<usize> {
    let idx = curve.partition_point(|&v| v > eps);
    (idx < curve.len()).then_some(idx)
}

/// Outcome of a mixing-time query.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum MixingTimeOutcome {
    /// The curve crossed the threshold.
    Reached {
        /// Least t with D(t) ≤ ε.
        t: u64,
        /// The distance actually achieved there.
        tv: f64,
    },
    /// The threshold was not reached within the scanned horizon.
    NotReached {
        /// Largest time scanned.
        horizon: u64,
        /// Distance at the horizon.
        achieved: f64,
    },
}

/// Scanning horizon used when none is given: ten relaxation-scaled windows.
pub fn default_horizon(model: &ChainModel) -> Result<u64> {
    let gamma = gap(model)?.gamma_exact;
    Ok(if gamma > 1e-12 {
        10 * ((model.n() as f64).ln() / gamma).ceil() as u64
    } else {
        64
    })
}

/// Least t with D(t) ≤ ε for the ground start, scanned up to `horizon`.
pub fn mixing_time_with_horizon(
    model: &ChainModel,
    eps: f64,
    horizon: u64,
) -> Result<MixingTimeOutcome> {
    let mu = model.space()?.stationary_vector();
    let mut outcome = MixingTimeOutcome::NotReached {
        horizon,
        achieved: f64::NAN,
    };
    fold_rows(model, horizon, &model.ground(), |t, row| {
        let d = 0.5 * row.iter().zip(mu).map(|(x, y)| (x - y).abs()).sum::<f64>();
        if d <= eps {
            outcome = MixingTimeOutcome::Reached { t, tv: d };
            false
        } else {
            outcome = MixingTimeOutcome::NotReached {
                horizon,
                achieved: d,
            };
            true
        }
    })?;
    Ok(outcome)
}

/// Least t with D(t) ≤ ε for the ground start, using the default horizon.
pub fn mixing_time(model: &ChainModel, eps: f64) -> Result<MixingTimeOutcome> {
    let horizon = default_horizon(model)?;
    mixing_time_with_horizon(model, eps, horizon)
}

/// One point of a cutoff profile: the distance at t ≈ (log m + s)/γ with
/// both integer neighbours of the rounded time.
#[derive(Clone, Debug, Serialize)]
pub struct ProfilePoint {
    /// Window coordinate s.
    pub s: f64,
    /// Nearest integer time to (log m + s)/γ (clamped at 0).
    pub t: u64,
    /// Distance at the nearest time.
    pub value: f64,
    /// Floor neighbour of the window time.
    pub t_floor: u64,
    /// Distance at the floor neighbour.
    pub value_floor: f64,
    /// Ceiling neighbour of the window time.
    pub t_ceil: u64,
    /// Distance at the ceiling neighbour.
    pub value_ceil: f64,
}

/// One threshold's mixing time inside a sweep record.
#[derive(Clone, Debug, Serialize)]
pub struct ThresholdTime {
    /// Threshold ε.
    pub eps: f64,
    /// Crossing outcome for the ground start.
    pub outcome: MixingTimeOutcome,
    /// t·γ/log n when the threshold was reached.
    pub ratio_log_n: Option<f64>,
    /// t·γ/log k when the threshold was reached.
    pub ratio_log_k: Option<f64>,
}

/// Sweep data for one instance of a model family.
#[derive(Clone, Debug, Serialize)]
pub struct CutoffRecord {
    /// Circle size.
    pub n: u32,
    /// Particle count.
    pub k: u32,
    /// Spectral parameter γ of this instance.
    pub gamma: f64,
    /// Mixing times for each requested threshold.
    pub t_eps: Vec<ThresholdTime>,
    /// Distance profile in the window centered at (log n)/γ.
    pub profile_log_n: Vec<ProfilePoint>,
    /// Distance profile in the window centered at (log k)/γ.
    pub profile_log_k: Vec<ProfilePoint>,
}

/// Cutoff sweep across a family of instances.
#[derive(Clone, Debug, Serialize)]
pub struct CutoffSweep {
    /// Human-readable family description (step law and k rule).
    pub family: String,
    /// Per-instance records, in the order given.
    pub records: Vec<CutoffRecord>,
}

fn window_time(center: f64, s: f64, gamma: f64) -> (u64, u64, u64) {
    let x = ((center + s) / gamma).max(0.0);
    (x.round() as u64, x.floor() as u64, x.ceil() as u64)
}

fn profile_from_curve(curve: &[f64], center: f64, gamma: f64, s_grid: &[f64]) -> Vec<ProfilePoint> {
    s_grid
        .iter()
        .map(|&s| {
            let (t, t_floor, t_ceil) = window_time(center, s, gamma);
            ProfilePoint {
                s,
                t,
                value: curve[t as usize],
                t_floor,
                value_floor: curve[t_floor as usize],
                t_ceil,
                value_ceil: curve[t_ceil as usize],
            }
        })
        .collect()
}

/// Evaluate cutoff diagnostics for each model: threshold crossing times and
/// the distance profile over the window grid, in both the log n and log k
/// centerings.
pub fn cutoff_sweep(
    models: &[ChainModel],
    family: &str,
    s_grid: &[f64],
    eps_grid: &[f64],
) -> Result<CutoffSweep> {
    let mut records = Vec::with_capacity(models.len());
    for model in models {
        let gamma = gap(model)?.gamma_exact;
        if gamma <= 1e-12 {
            return Err(Error::invalid(format!(
                "instance (n={}, k={}) has no spectral gap; the window \
                 (log n + s)/γ is undefined",
                model.n(),
                model.k()
            )));
        }
        let log_n = (model.n() as f64).ln();
        let log_k = (model.k() as f64).ln();
        let mut t_needed = default_horizon(model)?;
        for &s in s_grid {
            for center in [log_n, log_k] {
                t_needed = t_needed.max(window_time(center, s, gamma).2);
            }
        }
        let curve = tv_curve(model, t_needed, &model.ground())?;
        let t_eps = eps_grid
            .iter()
            .map(|&eps| {
                let outcome = match first_crossing(&curve, eps) {
                    Some(t) => MixingTimeOutcome::Reached {
                        t: t as u64,
                        tv: curve[t],
                    },
                    None => MixingTimeOutcome::NotReached {
                        horizon: t_needed,
                        achieved: *curve.last().expect("curve is nonempty"),
                    },
                };
                let ratios = match &outcome {
                    MixingTimeOutcome::Reached { t, .. } => (
                        Some(*t as f64 * gamma / log_n),
                        Some(*t as f64 * gamma / log_k),
                    ),
                    MixingTimeOutcome::NotReached { .. } => (None, None),
                };
                ThresholdTime {
                    eps,
                    outcome,
                    ratio_log_n: ratios.0,
                    ratio_log_k: ratios.1,
                }
            })
            .collect();
        records.push(CutoffRecord {
            n: model.n(),
            k: model.k(),
            gamma,
            t_eps,
            profile_log_n: profile_from_curve(&curve, log_n, gamma, s_grid),
            profile_log_k: profile_from_curve(&curve, log_k, gamma, s_grid),
        });
    }
    Ok(CutoffSweep {
        family: family.to_string(),
        records,
    })
}

/// One row of the l²-envelope comparison table.
#[derive(Clone, Debug, Serialize)]
pub struct EnvelopeRow {
    /// Circle size.
    pub n: u32,
    /// Particle count.
    pub k: u32,
    /// Window coordinate s.
    pub s: f64,
    /// Time (log n + s)/γ rounded to nearest integer.
    pub t: u64,
    /// Squared l² distance at that time.
    pub d2_sq: f64,
    /// Partition-series envelope Γ(2s − c₀) at the fitted shift, when the
    /// shifted argument is positive.
    pub envelope: Option<f64>,
}

/// The l²-envelope comparison across a family, with per-instance fitted
/// shifts.
#[derive(Clone, Debug, Serialize)]
pub struct EnvelopeReport {
    /// Table rows, grouped by instance in input order.
    pub rows: Vec<EnvelopeRow>,
    /// Fitted shift c₀ per instance (n, c₀).
    pub c0_by_instance: Vec<(u32, f64)>,
    /// Max − min of the fitted shifts.
    pub c0_spread: f64,
}

/// Partition generating function via its product form, truncated far into
/// the numerically negligible tail.
fn envelope_gamma(sigma: f64) -> Option<f64> {
    if sigma < 0.05 {
        return None;
    }
    let max_part = (40.0 / sigma).ceil() as u32;
    crate::config::gamma_product(sigma, max_part).ok()
}

/// Compare the decay of the l² distance in the cutoff window against the
/// partition-series envelope: reports D₂²((log n + s)/γ) next to
/// Γ(2s − c₀) for a least-squares fitted shift c₀ (qualitative — the
/// envelope's constants are not pinned by theory).
pub fn gamma_envelope_report(models: &[ChainModel], s_grid: &[f64]) -> Result<EnvelopeReport> {
    let mut rows = Vec::new();
    let mut c0_by_instance = Vec::new();
    for model in models {
        let gamma = gap(model)?.gamma_exact;
        if gamma <= 1e-12 {
            return Err(Error::invalid("instance has no spectral gap"));
        }
        let log_n = (model.n() as f64).ln();
        let times: Vec<u64> = s_grid
            .iter()
            .map(|&s| window_time(log_n, s, gamma).0)
            .collect();
        let t_max = *times.iter().max().unwrap_or(&0);
        let curve = l2_curve(model, t_max)?;
        let d2_sq: Vec<f64> = times.iter().map(|&t| curve[t as usize]).collect();

        let mut best = (f64::INFINITY, 0.0f64);
        let mut c0 = -5.0;
        while c0 <= 5.0 {
            let mut sse = 0.0;
            let mut used = 0;
            for (&s, &v) in s_grid.iter().zip(&d2_sq) {
                if v <= 1e-300 {
                    continue;
                }
                if let Some(g) = envelope_gamma(2.0 * s - c0) {
                    let diff = 0.5 * v.ln() - g.ln();
                    sse += diff * diff;
                    used += 1;
                }
            }
            if used >= 3 && sse < best.0 {
                best = (sse, c0);
            }
            c0 += 0.05;
        }
        let fitted = best.1;
        c0_by_instance.push((model.n(), fitted));
        for ((&s, &t), &v) in s_grid.iter().zip(&times).zip(&d2_sq) {
            rows.push(EnvelopeRow {
                n: model.n(),
                k: model.k(),
                s,
                t,
                d2_sq: v,
                envelope: envelope_gamma(2.0 * s - fitted),
            });
        }
    }
    let spread = match (
        c0_by_instance
            .iter()
            .map(|&(_, c)| c)
            .fold(f64::INFINITY, f64::min),
        c0_by_instance
            .iter()
            .map(|&(_, c)| c)
            .fold(f64::NEG_INFINITY, f64::max),
    ) {
        (lo, hi) if lo.is_finite() && hi.is_finite() => hi - lo,
        _ => 0.0,
    };
    Ok(EnvelopeReport {
        rows,
        c0_by_instance,
        c0_spread: spread,
    })
}
