//! Collision-free move enumeration, adjacency and Doob-transform kernels,
//! step-law audits, and trajectory sampling.
//!
//! One step of the dynamics draws a signed count ℓ from a step distribution
//! and moves |ℓ| particles one site anticlockwise (ℓ > 0) or clockwise
//! (ℓ < 0), subject to the rule that a particle may move only onto an empty
//! or simultaneously vacated site. Within each maximal block of adjacent
//! particles the movers must be the ones nearest the leading gap, so a move
//! is described by how many particles of each block slide. The conditioned
//! kernel is the Doob transform of the 0/1 adjacency operator by the ground
//! Perron weight φ(I) = [`schur_at_ground`], with Perron eigenvalue
//! α_ℓ = [`elementary_ground`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::config::{enumerate_configs, rank, CircleConfig};
use crate::error::{Error, Result};
use crate::symm::{elementary_ground, schur_at_ground, stationary_weight};

/// Default cap on enumerated state-space sizes.
pub const DEFAULT_STATE_CAP: u64 = 2_000_000;
/// Row-sum residual beyond which the Doob normalization is reported as a
/// violated Perron relation rather than rounding noise.
const ROW_SUM_TRIPWIRE: f64 = 1e-8;
/// Entries this far below zero are treated as cancellation noise.
const NEGATIVE_CLAMP: f64 = -1e-14;
/// Grid resolution for the aperiodicity audit.
const AUDIT_GRID: usize = 512;

/// Probability law of the signed number of particles moving per step.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepDistribution {
    weights: BTreeMap<i64, f64>,
}

impl StepDistribution {
    /// Build from a weight map; zero-weight atoms are dropped. Weights must
    /// be nonnegative and sum to 1 within 1e−12.
    pub fn new(weights: BTreeMap<i64, f64>) -> Result<Self> {
        let mut total = 0.0;
        for (&ell, &w) in &weights {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::invalid(format!(
                    "step weight p_{ell} = {w} must be finite and nonnegative"
                )));
            }
            total += w;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!(
                "step weights sum to {total}, expected 1 within 1e-12"
            )));
        }
        Ok(StepDistribution {
            weights: weights.into_iter().filter(|&(_, w)| w > 0.0).collect(),
        })
    }

    /// Point mass at ℓ.
    pub fn delta(ell: i64) -> Self {
        StepDistribution {
            weights: BTreeMap::from([(ell, 1.0)]),
        }
    }

    /// The lazy symmetric law ¼δ₋₁ + ½δ₀ + ¼δ₁.
    pub fn lazy_symmetric() -> Self {
        StepDistribution {
            weights: BTreeMap::from([(-1, 0.25), (0, 0.5), (1, 0.25)]),
        }
    }

    /// Weight of the atom at ℓ (0 if absent).
    pub fn weight(&self, ell: i64) -> f64 {
        self.weights.get(&ell).copied().unwrap_or(0.0)
    }

    /// Atoms with positive weight, in increasing ℓ order.
    pub fn support(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.weights.iter().map(|(&ell, &w)| (ell, w))
    }

    /// Largest |ℓ| with positive weight (0 for the pure-laziness law).
    pub fn max_step(&self) -> u32 {
        self.weights
            .keys()
            .map(|&ell| ell.unsigned_abs() as u32)
            .max()
            .unwrap_or(0)
    }

    /// E|X|.
    pub fn mean_abs(&self) -> f64 {
        self.support().map(|(ell, w)| w * ell.abs() as f64).sum()
    }

    /// E X.
    pub fn mean(&self) -> f64 {
        self.support().map(|(ell, w)| w * ell as f64).sum()
    }

    /// Var X.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.support()
            .map(|(ell, w)| w * (ell as f64 - m) * (ell as f64 - m))
            .sum()
    }

    /// Gcd of |ℓ| over nonzero atoms; 0 when the law never moves anything.
    pub fn support_gcd(&self) -> u64 {
        let mut g = 0u64;
        for (ell, _) in self.support() {
            if ell != 0 {
                g = gcd(g, ell.unsigned_abs());
            }
        }
        g
    }

    /// Characteristic function Φ_p(θ) = Σ_ℓ p_ℓ e^{iℓθ}.
    pub fn fourier(&self, theta: f64) -> Complex64 {
        self.support()
            .map(|(ell, w)| w * Complex64::from_polar(1.0, ell as f64 * theta))
            .sum()
    }

    /// Inverse-CDF draw in increasing-ℓ order.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> i64 {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut last = 0;
        for (ell, w) in self.support() {
            acc += w;
            last = ell;
            if u < acc {
                return ell;
            }
        }
        last
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl fmt::Display for StepDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .support()
            .map(|(ell, w)| format!("{ell}:{w}"))
            .collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for StepDistribution {
    type Err = Error;

    /// Parse "-1:0.25,0:0.5,1:0.25".
    fn from_str(s: &str) -> Result<Self> {
        let mut weights = BTreeMap::new();
        for part in s.split(',') {
            let (ell_str, w_str) = part.split_once(':').ok_or_else(|| {
                Error::invalid(format!(
                    "step atom '{part}' is not of the form <ell>:<weight>"
                ))
            })?;
            let ell: i64 = ell_str
                .trim()
                .parse()
                .map_err(|e| Error::invalid(format!("bad step index '{ell_str}': {e}")))?;
            let w: f64 = w_str
                .trim()
                .parse()
                .map_err(|e| Error::invalid(format!("bad step weight '{w_str}': {e}")))?;
            if weights.insert(ell, w).is_some() {
                return Err(Error::invalid(format!("duplicate step atom {ell}")));
            }
        }
        StepDistribution::new(weights)
    }
}

/// The enumerated state space B_{k,n} with O(k) index lookups and cached
/// Perron / stationary weight vectors.
pub struct StateSpace {
    n: u32,
    k: u32,
    configs: Vec<CircleConfig>,
    phi: OnceLock<Vec<f64>>,
    mu: OnceLock<Vec<f64>>,
}

impl StateSpace {
    /// Enumerate B_{k,n}; errors if C(n,k) exceeds `cap`.
    pub fn build(n: u32, k: u32, cap: u64) -> Result<Self> {
        Ok(StateSpace {
            n,
            k,
            configs: enumerate_configs(n, k, cap)?,
            phi: OnceLock::new(),
            mu: OnceLock::new(),
        })
    }

    /// Circle size.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Particle count.
    pub fn k(&self) -> u32 {
        self.k
    }

    /// Number of states.
    pub fn len(&self) -> usize {
        self.configs.len()
    }

    /// Whether the space is empty (never true for valid n, k).
    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    /// All states in enumeration (combinatorial-rank) order.
    pub fn configs(&self) -> &[CircleConfig] {
        &self.configs
    }

    /// The state at a given index.
    pub fn config(&self, index: usize) -> &CircleConfig {
        &self.configs[index]
    }

    /// Index of a state via its combinatorial rank.
    pub fn index_of(&self, state: &CircleConfig) -> usize {
        let r = rank(state);
        debug_assert_eq!(&self.configs[r], state);
        r
    }

    /// Index of the ground state (always 0).
    pub fn ground_index(&self) -> usize {
        0
    }

    /// Perron weights φ(I) = schur_at_ground(I) over all states.
    pub fn perron_weights(&self) -> &[f64] {
        self.phi
            .get_or_init(|| self.configs.iter().map(schur_at_ground).collect())
    }

    /// Stationary probabilities μ(I) over all states.
    pub fn stationary_vector(&self) -> &[f64] {
        self.mu
            .get_or_init(|| self.configs.iter().map(stationary_weight).collect())
    }
}

/// Row-sparse nonnegative kernel over a state space.
#[derive(Clone, Debug)]
pub struct SparseKernel {
    rows: Vec<Vec<(u32, f64)>>,
}

impl SparseKernel {
    fn from_rows(rows: Vec<Vec<(u32, f64)>>) -> Result<Self> {
        let mut rows = rows;
        for (i, row) in rows.iter_mut().enumerate() {
            for (_, w) in row.iter_mut() {
                if *w < 0.0 {
                    if *w < NEGATIVE_CLAMP {
                        return Err(Error::numerical(format!(
                            "kernel entry {w} in row {i} is negative beyond cancellation noise"
                        )));
                    }
                    *w = 0.0;
                }
            }
            row.sort_unstable_by_key(|&(j, _)| j);
        }
        Ok(SparseKernel { rows })
    }

    /// Identity kernel of a given dimension.
    pub fn identity(dim: usize) -> Self {
        SparseKernel {
            rows: (0..dim).map(|i| vec![(i as u32, 1.0)]).collect(),
        }
    }

    /// Number of rows (= columns).
    pub fn dimension(&self) -> usize {
        self.rows.len()
    }

    /// Nonzero entries of one row, sorted by column.
    pub fn row(&self, i: usize) -> &[(u32, f64)] {
        &self.rows[i]
    }

    /// Sum of one row.
    pub fn row_sum(&self, i: usize) -> f64 {
        self.rows[i].iter().map(|&(_, w)| w).sum()
    }

    /// Entry (i, j) by binary search.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        match self.rows[i].binary_search_by_key(&(j as u32), |&(c, _)| c) {
            Ok(pos) => self.rows[i][pos].1,
            Err(_) => 0.0,
        }
    }

    /// Total number of stored entries.
    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// All entries as (row, col, weight) in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |&(j, w)| (i, j as usize, w)))
    }

    /// Right action y_i = Σ_j K(i,j) v_j.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(j, w)| w * v[j as usize]).sum())
            .collect()
    }

    /// Right action on a complex vector.
    pub fn apply_complex(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(j, w)| w * v[j as usize]).sum())
            .collect()
    }

    /// Left action y_j = Σ_i v_i K(i,j).
    pub fn apply_left(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dimension()];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, w) in row {
                out[j as usize] += v[i] * w;
            }
        }
        out
    }

    /// Transposed kernel.
    pub fn transpose(&self) -> SparseKernel {
        let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); self.dimension()];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, w) in row {
                rows[j as usize].push((i as u32, w));
            }
        }
        for row in &mut rows {
            row.sort_unstable_by_key(|&(j, _)| j);
        }
        SparseKernel { rows }
    }

    /// Dense copy for small-instance oracles.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let d = self.dimension();
        let mut m = vec![vec![0.0; d]; d];
        for (i, j, w) in self.entries() {
            m[i][j] = w;
        }
        m
    }
}

/// Maximal runs of adjacent occupied sites as (start, length), wrapping
/// across site 0, listed by decreasing start. Errors on the full circle,
/// which has no gaps to move into.
pub fn blocks(state: &CircleConfig) -> Result<Vec<(u32, u32)>> {
    let n = state.n();
    if state.k() == n {
        return Err(Error::invalid(
            "full circle (k = n) has no gaps, so no block structure",
        ));
    }
    let mut asc: Vec<u32> = state.positions().to_vec();
    asc.reverse();
    let mut runs: Vec<(u32, u32)> = Vec::new();
    for &s in &asc {
        match runs.last_mut() {
            Some((start, len)) if *start + *len == s => *len += 1,
            _ => runs.push((s, 1)),
        }
    }
    if runs.len() > 1 {
        let first = runs[0];
        let last = *runs.last().expect("nonempty");
        if first.0 == 0 && last.0 + last.1 == n {
            runs[0] = (last.0, last.1 + first.1);
            runs.pop();
        }
    }
    runs.sort_unstable_by(|a, b| b.0.cmp(&a.0));
    Ok(runs)
}

/// All configurations reachable by moving exactly `ell` particles one site in
/// `direction` (+1 anticlockwise, −1 clockwise) under the no-collision rule.
/// Within each block the movers are the ones adjacent to the leading gap, so
/// a block of length L contributes a slide of m ∈ [0, L] particles realized
/// as one removed and one added site.
pub fn enumerate_moves(
    state: &CircleConfig,
    ell: u32,
    direction: i8,
) -> Result<Vec<CircleConfig>> {
    if direction != 1 && direction != -1 {
        return Err(Error::invalid("direction must be +1 or -1"));
    }
    if ell > state.k() {
        return Err(Error::invalid(format!(
            "cannot move {ell} particles, only {} exist",
            state.k()
        )));
    }
    if ell == 0 {
        return Ok(vec![state.clone()]);
    }
    let n = state.n();
    let bs = blocks(state)?;
    let suffix_capacity: Vec<u32> = {
        let mut acc = 0;
        let mut v: Vec<u32> = bs
            .iter()
            .rev()
            .map(|&(_, len)| {
                acc += len;
                acc
            })
            .collect();
        v.reverse();
        v
    };
    let mut out = Vec::new();
    // edits[b] = Some((removed, added)) for blocks whose m_b >= 1
    let mut edits: Vec<(u32, u32)> = Vec::new();
    fn rec(
        bs: &[(u32, u32)],
        suffix: &[u32],
        n: u32,
        dir: i8,
        b: usize,
        remaining: u32,
        state: &CircleConfig,
        edits: &mut Vec<(u32, u32)>,
        out: &mut Vec<CircleConfig>,
    ) {
        if remaining == 0 {
            let mut positions: Vec<u32> = state
                .positions()
                .iter()
                .map(|&p| {
                    edits
                        .iter()
                        .find(|&&(rem, _)| rem == p)
                        .map(|&(_, add)| add)
                        .unwrap_or(p)
                })
                .collect();
            positions.sort_unstable_by(|a, b| b.cmp(a));
            out.push(
                CircleConfig::new(n, positions).expect("moved configuration is valid"),
            );
            return;
        }
        if b >= bs.len() || suffix[b] < remaining {
            return;
        }
        let (start, len) = bs[b];
        // m = 0 branch
        rec(bs, suffix, n, dir, b + 1, remaining, state, edits, out);
        for m in 1..=len.min(remaining) {
            let (removed, added) = if dir == 1 {
                ((start + len - m) % n, (start + len) % n)
            } else {
                ((start + m - 1) % n, (start + n - 1) % n)
            };
            edits.push((removed, added));
            rec(bs, suffix, n, dir, b + 1, remaining - m, state, edits, out);
            edits.pop();
        }
    }
    rec(
        &bs,
        &suffix_capacity,
        n,
        direction,
        0,
        ell,
        state,
        &mut edits,
        &mut out,
    );
    Ok(out)
}

/// 0/1 adjacency kernel of the ℓ-move relation (sign = direction).
pub fn adjacency(space: &StateSpace, ell: i64) -> Result<SparseKernel> {
    if ell.unsigned_abs() > space.k() as u64 {
        return Err(Error::invalid(format!(
            "|ell| = {} exceeds particle count {}",
            ell.unsigned_abs(),
            space.k()
        )));
    }
    let dir: i8 = if ell < 0 { -1 } else { 1 };
    let mut rows = Vec::with_capacity(space.len());
    for state in space.configs() {
        let targets = enumerate_moves(state, ell.unsigned_abs() as u32, dir)?;
        let row: Vec<(u32, f64)> = targets
            .iter()
            .map(|j| (space.index_of(j) as u32, 1.0))
            .collect();
        rows.push(row);
    }
    SparseKernel::from_rows(rows)
}

/// Doob-transformed stochastic kernel
/// Q^(ℓ)(I,J) = φ(J)·A^(ℓ)(I,J)/(α_ℓ·φ(I)); rows are checked to sum to 1.
pub fn doob_kernel(space: &StateSpace, ell: i64) -> Result<SparseKernel> {
    if space.k() == space.n() {
        return Err(Error::invalid("conditioned dynamics needs k < n"));
    }
    let alpha = elementary_ground(space.n(), space.k(), ell.unsigned_abs() as u32)?;
    let dir: i8 = if ell < 0 { -1 } else { 1 };
    let phi = space.perron_weights();
    let mut rows = Vec::with_capacity(space.len());
    for (i, state) in space.configs().iter().enumerate() {
        let targets = enumerate_moves(state, ell.unsigned_abs() as u32, dir)?;
        let denom = alpha * phi[i];
        let row: Vec<(u32, f64)> = targets
            .iter()
            .map(|j| {
                let idx = space.index_of(j);
                (idx as u32, phi[idx] / denom)
            })
            .collect();
        let sum: f64 = row.iter().map(|&(_, w)| w).sum();
        if (sum - 1.0).abs() > ROW_SUM_TRIPWIRE {
            return Err(Error::numerical(format!(
                "Perron relation violated: row {i} of the ell={ell} kernel sums to {sum}"
            )));
        }
        rows.push(row);
    }
    SparseKernel::from_rows(rows)
}

/// Mixture kernel P = Σ_ℓ p_ℓ Q^(ℓ).
pub fn mixture_kernel(space: &StateSpace, p: &StepDistribution) -> Result<SparseKernel> {
    if p.max_step() > space.k() {
        return Err(Error::invalid(format!(
            "step law reaches |ell| = {} but only {} particles exist",
            p.max_step(),
            space.k()
        )));
    }
    let mut acc: Vec<BTreeMap<u32, f64>> = vec![BTreeMap::new(); space.len()];
    for (ell, w) in p.support() {
        let q = doob_kernel(space, ell)?;
        for (i, row) in acc.iter_mut().enumerate() {
            for &(j, v) in q.row(i) {
                *row.entry(j).or_insert(0.0) += w * v;
            }
        }
    }
    SparseKernel::from_rows(
        acc.into_iter()
            .map(|row| row.into_iter().collect())
            .collect(),
    )
}

/// A chain instance: circle size, particle count, step law, and lazily built
/// state space and mixture kernel. The step law is immutable, so caches can
/// never go stale.
pub struct ChainModel {
    n: u32,
    k: u32,
    p: StepDistribution,
    cap: u64,
    space: OnceLock<StateSpace>,
    kernel: OnceLock<SparseKernel>,
}

impl ChainModel {
    /// Validate and build a model (1 ≤ k < n, step support within ±k).
    pub fn new(n: u32, k: u32, p: StepDistribution) -> Result<Self> {
        if k == 0 || k >= n {
            return Err(Error::invalid(format!(
                "need 1 <= k < n, got k={k}, n={n}"
            )));
        }
        if p.max_step() > k {
            return Err(Error::invalid(format!(
                "step law reaches |ell| = {} but only {k} particles exist",
                p.max_step()
            )));
        }
        Ok(ChainModel {
            n,
            k,
            p,
            cap: DEFAULT_STATE_CAP,
            space: OnceLock::new(),
            kernel: OnceLock::new(),
        })
    }

    /// Replace the state-space cap (default [`DEFAULT_STATE_CAP`]).
    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    /// Circle size.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Particle count.
    pub fn k(&self) -> u32 {
        self.k
    }

    /// Step law.
    pub fn p(&self) -> &StepDistribution {
        &self.p
    }

    /// State-space cap.
    pub fn cap(&self) -> u64 {
        self.cap
    }

    /// Enumerated state space, built on first use.
    pub fn space(&self) -> Result<&StateSpace> {
        if let Some(s) = self.space.get() {
            return Ok(s);
        }
        let built = StateSpace::build(self.n, self.k, self.cap)?;
        Ok(self.space.get_or_init(|| built))
    }

    /// Mixture kernel P, built on first use.
    pub fn kernel(&self) -> Result<&SparseKernel> {
        if let Some(kr) = self.kernel.get() {
            return Ok(kr);
        }
        let built = mixture_kernel(self.space()?, &self.p)?;
        Ok(self.kernel.get_or_init(|| built))
    }

    /// Ground state of this instance.
    pub fn ground(&self) -> CircleConfig {
        CircleConfig::ground(self.n, self.k).expect("validated at construction")
    }

    /// Audit of the step-law assumptions at this (n, k).
    pub fn audit(&self) -> AssumptionAudit {
        audit_assumptions(&self.p, self.n, self.k)
    }
}

/// Numeric audit of the standing assumptions on (p, n, k).
#[derive(Clone, Debug, Serialize)]
pub struct AssumptionAudit {
    /// min(k/n, 1 − k/n): density separation from the degenerate fills.
    pub eta_hat: f64,
    /// E|X|: mean number of moving particles.
    pub mean_abs: f64,
    /// E|X| / k: the per-particle activity rate.
    pub delta_ratio: f64,
    /// Minimal K with E exp((|X|−E|X|)²/(2K²E|X|)) ≤ 2 (0 if deterministic).
    pub kg_hat: f64,
    /// min over the θ-grid of (1−|Φ_p(θ)|)/min(E|X|·θ², 1); positive iff the
    /// law is aperiodic on the grid.
    pub ka_hat: f64,
    /// Gcd of |ℓ| over nonzero atoms (0 if the law never moves anything).
    pub support_gcd: u64,
    /// Whether the support gcd is 1 (needed for irreducibility).
    pub gcd_ok: bool,
    /// Human-readable degeneracy flags.
    pub warnings: Vec<String>,
}

/// Compute the assumption audit for a step law at instance size (n, k).
pub fn audit_assumptions(p: &StepDistribution, n: u32, k: u32) -> AssumptionAudit {
    let kf = k as f64;
    let nf = n as f64;
    let eta_hat = (kf / nf).min(1.0 - kf / nf);
    let mean_abs = p.mean_abs();
    let delta_ratio = mean_abs / kf;
    let mut warnings = Vec::new();

    let kg_hat = if mean_abs == 0.0 {
        warnings.push("reducible: the step law never moves any particle".to_string());
        0.0
    } else {
        let moment = |kg: f64| -> f64 {
            p.support()
                .map(|(ell, w)| {
                    let d = ell.abs() as f64 - mean_abs;
                    w * (d * d / (2.0 * kg * kg * mean_abs)).exp()
                })
                .sum()
        };
        let mut hi = 1.0;
        while moment(hi) > 2.0 && hi < 1e9 {
            hi *= 2.0;
        }
        if moment(1e-9) <= 2.0 {
            0.0
        } else {
            let mut lo = 1e-9;
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if moment(mid) <= 2.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi
        }
    };

    let ka_hat = if mean_abs == 0.0 {
        0.0
    } else {
        let mut best = f64::INFINITY;
        for j in 0..AUDIT_GRID {
            if j == AUDIT_GRID / 2 {
                continue;
            }
            let theta = -std::f64::consts::PI
                + 2.0 * std::f64::consts::PI * j as f64 / AUDIT_GRID as f64;
            let denom = (mean_abs * theta * theta).min(1.0);
            best = best.min((1.0 - p.fourier(theta).norm()) / denom);
        }
        best
    };

    let support_gcd = p.support_gcd();
    let gcd_ok = support_gcd == 1;
    if support_gcd > 1 {
        warnings.push(format!(
            "periodic: nonzero step sizes share gcd {support_gcd}"
        ));
    }
    if mean_abs > 0.0 && ka_hat <= 0.0 {
        warnings.push("aperiodicity constant vanished on the audit grid".to_string());
    }

    AssumptionAudit {
        eta_hat,
        mean_abs,
        delta_ratio,
        kg_hat,
        ka_hat,
        support_gcd,
        gcd_ok,
        warnings,
    }
}

/// One transition of the conditioned chain, with the row built on the fly
/// (no state-space enumeration): draw ℓ from p, then pick among the ℓ-move
/// targets with probability ∝ φ(target). The row normalizer is checked
/// against the Perron relation α_ℓ·φ(state) on every call.
pub fn step_sample<R: Rng>(
    rng: &mut R,
    model: &ChainModel,
    state: &CircleConfig,
) -> Result<CircleConfig> {
    if state.n() != model.n() || state.k() != model.k() {
        return Err(Error::invalid("state does not belong to this model"));
    }
    let ell = model.p().sample(rng);
    if ell == 0 {
        return Ok(state.clone());
    }
    let dir: i8 = if ell < 0 { -1 } else { 1 };
    let targets = enumerate_moves(state, ell.unsigned_abs() as u32, dir)?;
    let weights: Vec<f64> = targets.iter().map(schur_at_ground).collect();
    let total: f64 = weights.iter().sum();
    let expected =
        elementary_ground(model.n(), model.k(), ell.unsigned_abs() as u32)?
            * schur_at_ground(state);
    if (total / expected - 1.0).abs() > ROW_SUM_TRIPWIRE {
        return Err(Error::numerical(format!(
            "Perron relation violated at {state:?}, ell={ell}: row mass {total} vs {expected}"
        )));
    }
    let u: f64 = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    for (target, w) in targets.iter().zip(&weights) {
        acc += w;
        if u < acc {
            return Ok(target.clone());
        }
    }
    Ok(targets.last().expect("ell >= 1 move always exists").clone())
}

/// Trajectory of `steps` transitions from `start`; the result has length
/// steps + 1 and begins with `start`.
pub fn simulate<R: Rng>(
    rng: &mut R,
    model: &ChainModel,
    start: &CircleConfig,
    steps: u64,
) -> Result<Vec<CircleConfig>> {
    let mut traj = Vec::with_capacity(steps as usize + 1);
    traj.push(start.clone());
    for _ in 0..steps {
        let next = step_sample(rng, model, traj.last().expect("nonempty"))?;
        traj.push(next);
    }
    Ok(traj)
}

/// Exact stationary sample by inverse CDF over the enumerated measure.
/// Errors with the cap diagnostics if C(n,k) > cap; in that regime draw a
/// long trajectory (burn-in) instead.
pub fn sample_stationary<R: Rng>(rng: &mut R, space: &StateSpace) -> CircleConfig {
    let mu = space.stationary_vector();
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (state, &w) in space.configs().iter().zip(mu) {
        acc += w;
        if u < acc {
            return state.clone();
        }
    }
    space
        .configs()
        .last()
        .expect("state space is nonempty")
        .clone()
}
