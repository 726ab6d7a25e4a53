//! Saddle-point laboratory: contour-integral extraction of elementary
//! symmetric functions, radial stationary points and Gaussian approximation,
//! the gap–radius relation, orbit classification by transport distance to
//! the ground state, truncated Newton expansions, and the residue-class
//! bound on power sums.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::config::{
    enumerate_configs, orbit_decompose, partition_pair_from_config, CircleConfig, OrbitClass,
    PartitionPair,
};
use crate::error::{Error, Result};
use crate::spectral::lambda_i1_closed_form;
use crate::symm::{elementary, elementary_ground, power_sum};

/// Minimum distance from the contour to a logarithm branch point.
const BRANCH_GUARD: f64 = 1e-10;

/// Solver tolerance for the radial stationary point.
const RADIAL_TOL: f64 = 1e-12;

/// Below this value of k·r the Gaussian approximation's 1/(k·r) error term
/// is not small and the result is flagged rather than trusted.
const SMALL_KR: f64 = 5.0;

/// Mean complex logarithm g(z) = (1/k)·Σ_j Log(1 + z·ξ_j) over the embedded
/// points of `state`. Uses the principal branch per term; exp(k·g(z))
/// reproduces the product Π_j (1 + z·ξ_j) exactly regardless of branch cuts.
///
/// Errors if z places any factor within `1e-10` of the branch point.
pub fn g_of(state: &CircleConfig, z: Complex64) -> Result<Complex64> {
    let k = state.k() as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for xi in state.xi() {
        let w = Complex64::new(1.0, 0.0) + z * xi;
        if w.norm() <= BRANCH_GUARD {
            return Err(Error::numerical(format!(
                "contour passes within {BRANCH_GUARD:.0e} of a logarithm branch point \
                 (|1 + z·ξ| = {:.3e} at z = {z})",
                w.norm()
            )));
        }
        sum += w.ln();
    }
    Ok(sum / k)
}

/// First derivative g′(z) = (1/k)·Σ_j ξ_j/(1 + z·ξ_j).
fn g_prime(xi: &[Complex64], z: Complex64) -> Result<Complex64> {
    let k = xi.len() as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for &x in xi {
        let w = Complex64::new(1.0, 0.0) + z * x;
        if w.norm() <= BRANCH_GUARD {
            return Err(Error::numerical("derivative evaluated at a pole of g′"));
        }
        sum += x / w;
    }
    Ok(sum / k)
}

/// Second derivative g″(z) = −(1/k)·Σ_j ξ_j²/(1 + z·ξ_j)².
fn g_double_prime(xi: &[Complex64], z: Complex64) -> Result<Complex64> {
    let k = xi.len() as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for &x in xi {
        let w = Complex64::new(1.0, 0.0) + z * x;
        if w.norm() <= BRANCH_GUARD {
            return Err(Error::numerical("derivative evaluated at a pole of g″"));
        }
        sum += x * x / (w * w);
    }
    Ok(-sum / k)
}

/// Radial moment map m(r) = r·g′(r) = 1 − (1/k)·Σ_j 1/(1 + r·ξ_j) on the
/// ground configuration, real by the conjugation symmetry of its points and
/// strictly increasing from 0 (r → 0⁺) to 1 (r → ∞).
pub fn moment_map_ground(n: u32, k: u32, r: f64) -> Result<f64> {
    if r <= 0.0 {
        return Err(Error::invalid("moment map needs r > 0"));
    }
    let ground = CircleConfig::ground(n, k)?;
    moment_map(&ground.xi(), r)
}

fn moment_map(xi: &[Complex64], r: f64) -> Result<f64> {
    let k = xi.len() as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for &x in xi {
        let w = Complex64::new(1.0, 0.0) + r * x;
        if w.norm() <= BRANCH_GUARD {
            return Err(Error::numerical(format!(
                "moment map pole: |1 + r·ξ| = {:.3e} at r = {r}",
                w.norm()
            )));
        }
        sum += w.inv();
    }
    Ok(1.0 - sum.re / k)
}

/// Coefficient of z^ℓ in Π_j (1 + z·ξ_j), extracted as a circle integral of
/// radius `r` evaluated by the uniform trapezoid rule on `nodes` points
/// (spectrally accurate for this periodic integrand). The result is
/// independent of the radius and reproduces the ℓ-th elementary symmetric
/// function of the points.
pub fn contour_alpha(state: &CircleConfig, ell: u32, r: f64, nodes: usize) -> Result<Complex64> {
    if r <= 0.0 {
        return Err(Error::invalid("contour radius must be positive"));
    }
    if nodes == 0 {
        return Err(Error::invalid("quadrature needs at least one node"));
    }
    let xi = state.xi();
    let ell_f = ell as f64;
    let ln_r = r.ln();
    let mut sum = Complex64::new(0.0, 0.0);
    for m in 0..nodes {
        let theta = 2.0 * PI * m as f64 / nodes as f64;
        let z = Complex64::from_polar(r, theta);
        let mut k_g = Complex64::new(0.0, 0.0);
        for &x in &xi {
            let w = Complex64::new(1.0, 0.0) + z * x;
            if w.norm() <= BRANCH_GUARD {
                return Err(Error::numerical(format!(
                    "contour of radius {r} passes within {BRANCH_GUARD:.0e} of a \
                     branch point at node {m}/{nodes}; choose another radius"
                )));
            }
            k_g += w.ln();
        }
        let exponent = k_g - Complex64::new(ell_f * ln_r, ell_f * theta);
        sum += exponent.exp();
    }
    Ok(sum / nodes as f64)
}

/// Radial stationary point of the ground-state contour integrand together
/// with the value, curvature, and Gaussian approximation at that radius.
#[derive(Debug, Clone, Serialize)]
pub struct SaddleData {
    /// Circle size.
    pub n: u32,
    /// Particle count.
    pub k: u32,
    /// Coefficient degree, 1 ≤ ℓ ≤ k/2.
    pub ell: u32,
    /// Radius with m(r) = ℓ/k, solved to 1e−12.
    pub r: f64,
    /// Integrand exponent at the stationary angle: f(0) = g(r) − (ℓ/k)·ln r.
    pub f0: f64,
    /// Curvature α = r·g′(r) + r²·g″(r); positive at the solved radius.
    pub curvature: f64,
    /// Gaussian estimate e^{k·f(0)}/√(2πkα) of the ℓ-th elementary symmetric
    /// function at the ground state.
    pub approx_alpha_ell: f64,
}

/// Small-circle comparator sin(ℓπ/n)/sin((k−ℓ)π/n) for the solved radius;
/// agrees with [`solve_r`] up to O(1/k²).
pub fn closed_form_r(n: u32, k: u32, ell: u32) -> f64 {
    let n = n as f64;
    (ell as f64 * PI / n).sin() / ((k - ell) as f64 * PI / n).sin()
}

impl SaddleData {
    /// Gap |r − sin(ℓπ/n)/sin((k−ℓ)π/n)| between the solved radius and its
    /// small-circle comparator.
    pub fn closed_form_gap(&self) -> f64 {
        (self.r - closed_form_r(self.n, self.k, self.ell)).abs()
    }
}

/// Solve m(r) = ℓ/k for the unique positive radius by bisection on (0, 2]
/// and assemble the stationary-point data. Requires 1 ≤ ℓ ≤ k/2.
pub fn solve_r(n: u32, k: u32, ell: u32) -> Result<SaddleData> {
    if ell == 0 || 2 * ell > k {
        return Err(Error::invalid(format!(
            "radial solve needs 1 <= ell <= k/2, got ell={ell}, k={k}"
        )));
    }
    let ground = CircleConfig::ground(n, k)?;
    let xi = ground.xi();
    let target = ell as f64 / k as f64;
    let mut lo = 0.0_f64;
    let mut hi = 2.0_f64;
    if moment_map(&xi, hi)? <= target {
        return Err(Error::numerical(format!(
            "bisection bracket failure: m(2) <= {target} for n={n}, k={k}, ell={ell}"
        )));
    }
    let mut r = f64::NAN;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let value = moment_map(&xi, mid)?;
        if (value - target).abs() <= RADIAL_TOL {
            r = mid;
            break;
        }
        if value < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if !r.is_finite() {
        return Err(Error::numerical(format!(
            "radial bisection did not reach |m(r) - {target}| <= {RADIAL_TOL:.0e}"
        )));
    }
    let z = Complex64::new(r, 0.0);
    let f0 = g_of(&ground, z)?.re - target * r.ln();
    let curvature = r * g_prime(&xi, z)?.re + r * r * g_double_prime(&xi, z)?.re;
    if curvature <= 0.0 {
        return Err(Error::numerical(format!(
            "curvature {curvature} not positive at solved radius r={r}"
        )));
    }
    let approx_alpha_ell = (k as f64 * f0).exp() / (2.0 * PI * k as f64 * curvature).sqrt();
    Ok(SaddleData {
        n,
        k,
        ell,
        r,
        f0,
        curvature,
        approx_alpha_ell,
    })
}

/// Gaussian approximation of the ground-state elementary symmetric function
/// alongside its exact sine-product value.
#[derive(Debug, Clone, Serialize)]
pub struct SaddleReport {
    /// Stationary-point data, including the approximation itself.
    pub data: SaddleData,
    /// Exact value of the ℓ-th elementary symmetric function at the ground
    /// state, from the sine-product closed form.
    pub exact: f64,
    /// |approx − exact| / exact.
    pub rel_error: f64,
    /// True when k·r < 5: the approximation's 1/(k·r) error term is then not
    /// small and the estimate is reported rather than trusted.
    pub small_radius_regime: bool,
}

/// Evaluate the Gaussian stationary-point approximation at the solved radius
/// and compare it with the exact elementary symmetric function.
pub fn saddle_approx(n: u32, k: u32, ell: u32) -> Result<SaddleReport> {
    let data = solve_r(n, k, ell)?;
    let exact = elementary_ground(n, k, ell)?;
    let rel_error = (data.approx_alpha_ell - exact).abs() / exact;
    let small_radius_regime = (k as f64) * data.r < SMALL_KR;
    Ok(SaddleReport {
        data,
        exact,
        rel_error,
        small_radius_regime,
    })
}

/// Per-degree spectral gap estimated from the solved radius:
/// (2π/n)·Im(r·e^{ikπ/n}/(1 + r·e^{ikπ/n})). Positive for 1 ≤ ℓ ≤ k/2 and
/// within O(1/n) of the exact per-degree gap 1 − |λ^(ℓ)| at the first
/// excited configuration.
pub fn gamma_from_saddle(n: u32, k: u32, ell: u32) -> Result<f64> {
    let data = solve_r(n, k, ell)?;
    let w = Complex64::from_polar(data.r, PI * k as f64 / n as f64);
    Ok(2.0 * PI / n as f64 * (w / (Complex64::new(1.0, 0.0) + w)).im)
}

/// Optimal matching of the ground atoms onto the atoms of a configuration.
#[derive(Debug, Clone, Serialize)]
pub struct TransportMap {
    /// (source ground atom, image atom) in half-units of π/n, sorted by
    /// source; every image sits weakly outward of its source (|image| ≥
    /// |source|) without changing the total cost.
    pub pairs: Vec<(i64, i64)>,
    /// Total displacement Σ|image − source| in radians; this is the
    /// 1-Wasserstein distance between the two atom measures on ]−π, π].
    pub cost: f64,
}

/// Build the minimum-displacement matching from the ground atoms to the
/// atoms of `state`: sorted assignment (optimal for interval distance in one
/// dimension), then cost-preserving exchanges until every atom maps weakly
/// outward.
pub fn transport_map(state: &CircleConfig) -> Result<TransportMap> {
    let n = state.n();
    let k = state.k();
    let ground = CircleConfig::ground(n, k)?;
    let mut sources = ground.atoms();
    sources.reverse();
    let mut targets = state.atoms();
    targets.reverse();
    let initial_cost: i64 = sources
        .iter()
        .zip(&targets)
        .map(|(s, t)| (t - s).abs())
        .sum();

    let mut scan_order: Vec<usize> = (0..sources.len()).collect();
    scan_order.sort_by_key(|&i| (sources[i].abs(), sources[i]));
    let mut swaps = 0usize;
    'outer: loop {
        for &i in &scan_order {
            if targets[i].abs() < sources[i].abs() {
                let y = targets[i];
                let j = sources
                    .iter()
                    .position(|&s| s == y)
                    .ok_or_else(|| Error::numerical("inward image is not a ground atom"))?;
                targets.swap(i, j);
                swaps += 1;
                if swaps > sources.len() * sources.len() + 16 {
                    return Err(Error::numerical("outward exchange did not terminate"));
                }
                continue 'outer;
            }
        }
        break;
    }
    let final_cost: i64 = sources
        .iter()
        .zip(&targets)
        .map(|(s, t)| (t - s).abs())
        .sum();
    if final_cost != initial_cost {
        return Err(Error::numerical(format!(
            "outward exchange changed the matching cost: {initial_cost} -> {final_cost}"
        )));
    }
    Ok(TransportMap {
        pairs: sources.into_iter().zip(targets).collect(),
        cost: initial_cost as f64 * PI / n as f64,
    })
}

/// Which of the three transport-distance classes an orbit falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OrbitKind {
    /// Every member carries at least C₁·k/log k of displacement mass landing
    /// beyond the far threshold kπ/n + C₂/log n.
    J1,
    /// Not J1, and every member moves some atom from well inside the bulk
    /// edge (margin C₂/log n) to well outside it.
    J2,
    /// Neither: the near-ground class, coded by a pair of partitions.
    J3,
}

impl std::fmt::Display for OrbitKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OrbitKind::J1 => write!(f, "J1"),
            OrbitKind::J2 => write!(f, "J2"),
            OrbitKind::J3 => write!(f, "J3"),
        }
    }
}

/// Transport-distance classification of one rotation orbit.
#[derive(Debug, Clone, Serialize)]
pub struct OrbitClassification {
    /// The orbit being classified.
    pub orbit: OrbitClass,
    /// Assigned class.
    pub class: OrbitKind,
    /// 1-Wasserstein distance to the ground atoms, evaluated at the reported
    /// member: for J3 the minimal-weight decodable member, otherwise the
    /// lexicographically smallest member (the representative).
    pub transport_cost: f64,
    /// Outward-displacement coding of the reported member; present exactly
    /// when the class is J3.
    pub tau: Option<PartitionPair>,
    /// The (C₁, C₂) thresholds the classification was computed with.
    pub constants_used: (f64, f64),
}

struct MemberGeometry {
    config: CircleConfig,
    pairs: Vec<(i64, i64)>,
    cost: f64,
}

impl MemberGeometry {
    /// Displacement mass landing beyond the far threshold, in radians.
    fn far_excess(&self, k: u32, scale: f64, far: f64) -> f64 {
        self.pairs
            .iter()
            .filter(|(_, t)| t.abs() as f64 * scale > k as f64 * scale + far)
            .map(|(s, t)| (t.abs() - s.abs()) as f64 * scale)
            .sum()
    }

    /// Some atom moves from margin-deep inside the bulk edge to margin-far
    /// beyond it.
    fn has_deep_jump(&self, k: u32, scale: f64, margin: f64) -> bool {
        self.pairs.iter().any(|&(s, t)| {
            t != s
                && (t.abs() - k as i64) as f64 * scale >= margin
                && (k as i64 - s.abs()) as f64 * scale >= margin
        })
    }

    /// Every moved atom starts near the bulk edge and lands within the far
    /// threshold: the near-ground geometry under which the partition coding
    /// is meaningful.
    fn near_ground(&self, k: u32, scale: f64, margin: f64) -> bool {
        self.pairs.iter().all(|&(s, t)| {
            (t == s || s.abs() as f64 * scale > k as f64 * scale - margin)
                && t.abs() as f64 * scale <= k as f64 * scale + margin
        })
    }
}

/// Classify every rotation orbit of B_{k,n} by the transport-map predicates
/// with thresholds `c1` (far-mass budget, in units of k/log k) and `c2`
/// (edge margin, in units of 1/log n). The returned records partition the
/// orbit set; J3 records carry the partition-pair coding of their
/// minimal-weight decodable member (ties broken by lexicographic member
/// order).
pub fn classify_orbits(
    n: u32,
    k: u32,
    cap: u64,
    c1: f64,
    c2: f64,
) -> Result<Vec<OrbitClassification>> {
    if c1 <= 0.0 || c2 <= 0.0 {
        return Err(Error::invalid("classification thresholds must be positive"));
    }
    let configs = enumerate_configs(n, k, cap)?;
    let orbits = orbit_decompose(&configs);
    let scale = PI / n as f64;
    let margin = c2 / (n as f64).ln();
    let far_budget = c1 * k as f64 / (k as f64).ln();

    let mut out = Vec::with_capacity(orbits.len());
    for orbit in orbits {
        let members: Vec<MemberGeometry> = orbit
            .members()
            .into_iter()
            .map(|config| {
                let map = transport_map(&config)?;
                Ok(MemberGeometry {
                    config,
                    pairs: map.pairs,
                    cost: map.cost,
                })
            })
            .collect::<Result<_>>()?;

        let all_j1 = members
            .iter()
            .all(|m| m.far_excess(k, scale, margin) >= far_budget);
        let all_j2 = !all_j1 && members.iter().all(|m| m.has_deep_jump(k, scale, margin));

        let (class, transport_cost, tau) = if all_j1 {
            (OrbitKind::J1, rep_cost(&members, &orbit)?, None)
        } else if all_j2 {
            (OrbitKind::J2, rep_cost(&members, &orbit)?, None)
        } else {
            let mut best: Option<(&MemberGeometry, PartitionPair)> = None;
            for member in &members {
                if !member.near_ground(k, scale, margin) {
                    continue;
                }
                if let Some(pair) = partition_pair_from_config(&member.config) {
                    let better = match &best {
                        None => true,
                        Some((held, held_pair)) => {
                            (pair.weight(), &member.config) < (held_pair.weight(), &held.config)
                        }
                    };
                    if better {
                        best = Some((member, pair));
                    }
                }
            }
            match best {
                Some((member, pair)) => (OrbitKind::J3, member.cost, Some(pair)),
                None => (OrbitKind::J3, rep_cost(&members, &orbit)?, None),
            }
        };
        out.push(OrbitClassification {
            orbit,
            class,
            transport_cost,
            tau,
            constants_used: (c1, c2),
        });
    }
    Ok(out)
}

fn rep_cost(members: &[MemberGeometry], orbit: &OrbitClass) -> Result<f64> {
    members
        .iter()
        .find(|m| m.config == orbit.representative)
        .map(|m| m.cost)
        .ok_or_else(|| Error::numerical("orbit members do not include the representative"))
}

/// One orbit's modulus and decay table entry.
#[derive(Debug, Clone, Serialize)]
pub struct EstimateRow {
    /// The orbit the row describes.
    pub orbit: OrbitClass,
    /// Transport class of the orbit.
    pub class: OrbitKind,
    /// Common eigenvalue modulus |λ^(ℓ)| of the orbit at the report's degree.
    pub lambda_abs: f64,
    /// Weight |τ| of the partition coding when the orbit is J3-coded.
    pub tau_weight: Option<u64>,
    /// −log|λ^(ℓ)| / (γ_ℓ·|τ|) for J3 orbits with |τ| ≥ 1 and λ ≠ 0;
    /// near 1 when the per-degree decay law holds.
    pub decay_ratio: Option<f64>,
}

/// Decay-law audit of the eigenvalue moduli against the transport
/// classification at a fixed degree ℓ.
#[derive(Debug, Clone, Serialize)]
pub struct EstimatesReport {
    /// Circle size.
    pub n: u32,
    /// Particle count.
    pub k: u32,
    /// Degree the moduli are evaluated at.
    pub ell: u32,
    /// Far-mass threshold used for classification.
    pub c1: f64,
    /// Edge-margin threshold used for classification.
    pub c2: f64,
    /// Exact per-degree gap 1 − |λ^(ℓ)| at the first excited configuration.
    pub gamma_ell: f64,
    /// Modulus of λ^(ℓ) at the first excited configuration, 1 − γ_ℓ.
    pub lambda_i1_abs: f64,
    /// Per-orbit rows in classification order.
    pub rows: Vec<EstimateRow>,
    /// Largest modulus among J1 orbits, when any exist.
    pub j1_max_lambda: Option<f64>,
    /// Largest modulus among J3 orbits.
    pub j3_max_lambda: f64,
    /// Number of J1 orbits.
    pub j1_count: usize,
    /// Number of J2 orbits.
    pub j2_count: usize,
    /// Number of J3 orbits.
    pub j3_count: usize,
}

/// Tabulate −log|λ^(ℓ)|/(γ_ℓ|τ|) across the J3 orbits and the qualitative
/// modulus ordering across classes, using thresholds (`c1`, `c2`).
pub fn estimates_check(
    n: u32,
    k: u32,
    ell: u32,
    c1: f64,
    c2: f64,
    cap: u64,
) -> Result<EstimatesReport> {
    if ell == 0 || ell > k {
        return Err(Error::invalid(format!(
            "decay audit needs 1 <= ell <= k, got ell={ell}, k={k}"
        )));
    }
    let classifications = classify_orbits(n, k, cap, c1, c2)?;
    let lambda_i1_abs = lambda_i1_closed_form(n, k, ell)?.norm();
    let gamma_ell = 1.0 - lambda_i1_abs;
    if gamma_ell <= 0.0 {
        return Err(Error::numerical(format!(
            "per-degree gap vanishes at ell={ell} (n={n}, k={k}); decay ratios undefined"
        )));
    }

    let mut rows = Vec::with_capacity(classifications.len());
    let mut j1_max_lambda: Option<f64> = None;
    let mut j3_max_lambda: f64 = 0.0;
    let mut counts = [0usize; 3];
    for c in classifications {
        let lambda_abs =
            crate::spectral::eigenvalue_ell(&c.orbit.representative, ell as i64)?.norm();
        let tau_weight = c.tau.as_ref().map(|t| t.weight());
        let decay_ratio = match (c.class, tau_weight) {
            (OrbitKind::J3, Some(w)) if w >= 1 && lambda_abs > 0.0 => {
                Some(-lambda_abs.ln() / (gamma_ell * w as f64))
            }
            _ => None,
        };
        match c.class {
            OrbitKind::J1 => {
                counts[0] += 1;
                j1_max_lambda = Some(j1_max_lambda.map_or(lambda_abs, |m: f64| m.max(lambda_abs)));
            }
            OrbitKind::J2 => counts[1] += 1,
            OrbitKind::J3 => {
                counts[2] += 1;
                j3_max_lambda = j3_max_lambda.max(lambda_abs);
            }
        }
        rows.push(EstimateRow {
            orbit: c.orbit,
            class: c.class,
            lambda_abs,
            tau_weight,
            decay_ratio,
        });
    }
    Ok(EstimatesReport {
        n,
        k,
        ell,
        c1,
        c2,
        gamma_ell,
        lambda_i1_abs,
        rows,
        j1_max_lambda,
        j3_max_lambda,
        j1_count: counts[0],
        j2_count: counts[1],
        j3_count: counts[2],
    })
}

/// Relative residual of the degree-ℓ elementary symmetric function against
/// its four-term power-sum expansion
/// (p₁^ℓ − (ℓ(ℓ−1)/2)p₁^{ℓ−2}p₂ + (ℓ(ℓ−1)(ℓ−2)/3)p₁^{ℓ−3}p₃
///  + (ℓ(ℓ−1)(ℓ−2)(ℓ−3)/8)p₁^{ℓ−4}p₂²)/ℓ!,
/// normalized by |p₁|^ℓ/ℓ!. Exact (residual 0) for ℓ ≤ 3; for larger ℓ the
/// residual collects the discarded terms, which shrink as the points
/// concentrate near the ground configuration.
pub fn newton_truncation_check(state: &CircleConfig, ell: u32) -> Result<f64> {
    let xs = state.xi();
    let k = xs.len() as u32;
    if ell > k {
        return Err(Error::invalid(format!(
            "truncation degree {ell} exceeds point count {k}"
        )));
    }
    let exact = elementary(&xs, ell as usize)?;
    let ell_f = ell as f64;
    let factorial: f64 = (1..=ell).map(f64::from).product();
    let p1 = power_sum(&xs, 1)?;
    let mut truncated = p1.powu(ell);
    if ell >= 2 {
        let p2 = power_sum(&xs, 2)?;
        truncated -= ell_f * (ell_f - 1.0) / 2.0 * p1.powu(ell - 2) * p2;
        if ell >= 3 {
            let p3 = power_sum(&xs, 3)?;
            truncated += ell_f * (ell_f - 1.0) * (ell_f - 2.0) / 3.0 * p1.powu(ell - 3) * p3;
        }
        if ell >= 4 {
            let p2 = power_sum(&xs, 2)?;
            truncated += ell_f * (ell_f - 1.0) * (ell_f - 2.0) * (ell_f - 3.0) / 8.0
                * p1.powu(ell - 4)
                * p2
                * p2;
        }
    }
    truncated /= factorial;
    let scale = p1.norm().powi(ell as i32) / factorial;
    if scale < f64::MIN_POSITIVE {
        return Err(Error::numerical(
            "truncation scale |p1|^ell vanishes; residual undefined",
        ));
    }
    Ok((exact - truncated).norm() / scale)
}

/// Largest admissible power sum for one exponent.
#[derive(Debug, Clone, Serialize)]
pub struct SubgroupBoundRow {
    /// Power-sum exponent.
    pub s: u32,
    /// gcd(n, s): the step of the residue subgroup the points collapse onto.
    pub s_prime: u32,
    /// Extremal value of |p_s|: mass k packed into consecutive subgroup
    /// slots of capacity s′ each, with the remainder on the next slot.
    pub exact_bound: f64,
    /// Sine-quotient display s′·sin((k+s′)π/n)/sin(s′π/n); present only when
    /// it is a valid upper bound (s′ divides k and 2k + s′ ≤ n).
    pub sine_bound: Option<f64>,
    /// Largest |p_s(ξ(J))| over the enumerated configurations.
    pub max_power_sum: f64,
    /// max_power_sum − exact_bound; never positive when the bound holds.
    pub slack: f64,
}

/// Power-sum bound audit over a full configuration space.
#[derive(Debug, Clone, Serialize)]
pub struct SubgroupBoundReport {
    /// Circle size.
    pub n: u32,
    /// Particle count.
    pub k: u32,
    /// One row per exponent 1 ≤ s ≤ k.
    pub rows: Vec<SubgroupBoundRow>,
    /// Largest slack across rows.
    pub max_slack: f64,
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Check |p_s(ξ(J))| against the residue-class packing bound for every
/// configuration and every exponent 1 ≤ s ≤ k.
pub fn subgroup_bound_check(n: u32, k: u32, cap: u64) -> Result<SubgroupBoundReport> {
    if k == 0 || k >= n {
        return Err(Error::invalid("power-sum audit needs 1 <= k < n"));
    }
    let configs = enumerate_configs(n, k, cap)?;
    let points: Vec<Vec<Complex64>> = configs.iter().map(CircleConfig::xi).collect();
    let mut rows = Vec::with_capacity(k as usize);
    let mut max_slack = f64::NEG_INFINITY;
    for s in 1..=k {
        let mut max_power_sum: f64 = 0.0;
        for xi in &points {
            max_power_sum = max_power_sum.max(power_sum(xi, s)?.norm());
        }
        let s_prime = gcd(n, s);
        let q = k / s_prime;
        let rho = k - q * s_prime;
        let step = Complex64::from_polar(1.0, 2.0 * PI * s_prime as f64 / n as f64);
        let mut packed = Complex64::new(0.0, 0.0);
        let mut slot = Complex64::new(1.0, 0.0);
        for _ in 0..q {
            packed += s_prime as f64 * slot;
            slot *= step;
        }
        packed += rho as f64 * slot;
        let exact_bound = packed.norm();
        let sine_valid = k % s_prime == 0 && 2 * k + s_prime <= n;
        let sine_bound = sine_valid.then(|| {
            s_prime as f64 * ((k + s_prime) as f64 * PI / n as f64).sin()
                / (s_prime as f64 * PI / n as f64).sin()
        });
        let slack = max_power_sum - exact_bound;
        max_slack = max_slack.max(slack);
        rows.push(SubgroupBoundRow {
            s,
            s_prime,
            exact_bound,
            sine_bound,
            max_power_sum,
            slack,
        });
    }
    Ok(SubgroupBoundReport {
        n,
        k,
        rows,
        max_slack,
    })
}
