//! Closed-form eigenvalues, the shared eigenbasis, spectral gaps, and
//! heat-kernel densities of the conditioned chains.
//!
//! Every kernel in the family is diagonalized by one basis indexed by the
//! configurations themselves: the eigenvalue of the |ℓ|-move kernel at J is
//! the elementary-symmetric ratio e_{|ℓ|}(xi(J)) / e_{|ℓ|}(xi(I₀)),
//! conjugated for clockwise moves, and the eigenvector is built from Schur
//! values at xi(J). Shifting J rotates every point of xi(J) by e^{2πit/n},
//! so eigenvalues factor through shift orbits up to explicit phases — the
//! spectrum is stored per orbit and phases are reconstructed on demand.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::config::{orbit_decompose, CircleConfig, OrbitClass};
use crate::error::{Error, Result};
use crate::kernels::{audit_assumptions, ChainModel, StateSpace, StepDistribution};
use crate::symm::{
    elementary_all, elementary_ground, schur, schur_at_ground, schur_batch,
};

use std::f64::consts::PI;

/// Eigenvalue λ^(ℓ)_J = e_{|ℓ|}(xi(J)) / e_{|ℓ|}(xi(I₀)) of the signed
/// ℓ-move kernel, conjugated for ℓ < 0.
pub fn eigenvalue_ell(state: &CircleConfig, ell: i64) -> Result<Complex64> {
    let k = state.k();
    let abs = ell.unsigned_abs() as u32;
    if abs > k {
        return Err(Error::invalid(format!(
            "|ell| = {abs} exceeds particle count {k}"
        )));
    }
    let denom = elementary_ground(state.n(), k, abs)?;
    if denom == 0.0 {
        return Err(Error::numerical(
            "ground elementary value vanished (requires k = n)",
        ));
    }
    let value = elementary_all(&state.xi(), abs as usize)?[abs as usize] / denom;
    Ok(if ell < 0 { value.conj() } else { value })
}

/// All nonnegative-direction eigenvalues λ^(ℓ)_J for ℓ = 0..=k in one pass.
pub fn eigenvalues_all(state: &CircleConfig) -> Result<Vec<Complex64>> {
    let n = state.n();
    let k = state.k();
    let es = elementary_all(&state.xi(), k as usize)?;
    (0..=k)
        .map(|ell| {
            let denom = elementary_ground(n, k, ell)?;
            Ok(es[ell as usize] / denom)
        })
        .collect()
}

/// Closed form for the first-excited eigenvalue:
/// λ^(ℓ)_{I₁} = 1 − ω^{k−ℓ}(1−ω)(1−ω^ℓ)/(1−ω^k) with ω = e^{2πi/n}.
pub fn lambda_i1_closed_form(n: u32, k: u32, ell: u32) -> Result<Complex64> {
    if ell > k || k >= n {
        return Err(Error::invalid(format!(
            "need ell <= k < n, got ell={ell}, k={k}, n={n}"
        )));
    }
    let omega = Complex64::from_polar(1.0, 2.0 * PI / n as f64);
    let one = Complex64::new(1.0, 0.0);
    let num = omega.powi((k - ell) as i32) * (one - omega) * (one - omega.powi(ell as i32));
    Ok(one - num / (one - omega.powi(k as i32)))
}

/// Mixture eigenvalue λ_J = Σ_ℓ p_ℓ λ^(ℓ)_J.
pub fn mixture_eigenvalue(state: &CircleConfig, p: &StepDistribution) -> Result<Complex64> {
    let lambdas = eigenvalues_all(state)?;
    Ok(mix_with_phase(&lambdas, p, state.n(), 0))
}

/// Combine per-ℓ eigenvalues of an orbit representative into the mixture
/// eigenvalue of the member shifted by t, using
/// λ^(ℓ)_{t·J} = e^{2πitℓ/n} λ^(ℓ)_J and λ^(−ℓ) = conj(λ^(ℓ)).
fn mix_with_phase(
    lambdas: &[Complex64],
    p: &StepDistribution,
    n: u32,
    t: u32,
) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (ell, w) in p.support() {
        let abs = ell.unsigned_abs() as usize;
        let phase = Complex64::from_polar(1.0, 2.0 * PI * (t as f64) * (abs as f64) / n as f64);
        let shifted = phase * lambdas[abs];
        acc += w * if ell < 0 { shifted.conj() } else { shifted };
    }
    acc
}

/// Spectrum of one shift orbit: per-ℓ eigenvalues of the representative,
/// its mixture eigenvalue, and the ground weight d(J).
#[derive(Clone, Debug, Serialize)]
pub struct SpectrumEntry {
    /// The orbit (lex-min representative and size).
    pub orbit: OrbitClass,
    /// λ^(ℓ) of the representative for ℓ = 0..=k.
    pub lambda_by_ell: Vec<Complex64>,
    /// Mixture eigenvalue of the representative.
    pub lambda_mixture: Complex64,
    /// Ground weight d(J) = f_J(I₀) = schur_at_ground(J) > 0.
    pub d: f64,
}

impl SpectrumEntry {
    /// Mixture eigenvalue of the member shifted by t from the representative.
    pub fn member_mixture(&self, p: &StepDistribution, t: u32) -> Complex64 {
        mix_with_phase(
            &self.lambda_by_ell,
            p,
            self.orbit.representative.n(),
            t,
        )
    }
}

/// Per-orbit spectrum of the model's mixture kernel, sorted by orbit
/// representative.
pub fn full_spectrum(model: &ChainModel) -> Result<Vec<SpectrumEntry>> {
    let space = model.space()?;
    let orbits = orbit_decompose(space.configs());
    orbits
        .into_iter()
        .map(|orbit| {
            let lambda_by_ell = eigenvalues_all(&orbit.representative)?;
            let lambda_mixture = mix_with_phase(&lambda_by_ell, model.p(), model.n(), 0);
            let d = schur_at_ground(&orbit.representative);
            Ok(SpectrumEntry {
                orbit,
                lambda_by_ell,
                lambda_mixture,
                d,
            })
        })
        .collect()
}

/// Shared eigenvector f_J over the whole state space:
/// f_J(I) = d(J) · conj(S_J(xi(I))) / conj(S_J(xi(I₀))).
pub fn eigenvector(space: &StateSpace, j_state: &CircleConfig) -> Result<Vec<Complex64>> {
    if j_state.n() != space.n() || j_state.k() != space.k() {
        return Err(Error::invalid("eigenvector index outside this state space"));
    }
    let d = schur_at_ground(j_state);
    let ground = CircleConfig::ground(space.n(), space.k())?;
    let s0 = schur(j_state, &ground.xi())?;
    space
        .configs()
        .iter()
        .map(|i_state| Ok(d * schur(j_state, &i_state.xi())?.conj() / s0.conj()))
        .collect()
}

/// Largest deviation of the Gram matrix ⟨f_J, f_{J'}⟩_μ from the identity
/// over all pairs J, J' in B_{k,n}.
pub fn orthonormality_check(n: u32, k: u32, cap: u64) -> Result<f64> {
    let space = StateSpace::build(n, k, cap)?;
    let mu = space.stationary_vector().to_vec();
    let vectors: Vec<Vec<Complex64>> = space
        .configs()
        .iter()
        .map(|j| eigenvector(&space, j))
        .collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    for (a, fa) in vectors.iter().enumerate() {
        for (b, fb) in vectors.iter().enumerate() {
            let mut inner = Complex64::new(0.0, 0.0);
            for i in 0..space.len() {
                inner += mu[i] * fa[i] * fb[i].conj();
            }
            let expect = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((inner - expect).norm());
        }
    }
    Ok(worst)
}

/// Spectral-gap report: the exact gap from λ_{I₁}, its first-order closed
/// form, and the per-ℓ gaps both exact and first-order.
#[derive(Clone, Debug, Serialize)]
pub struct GapReport {
    /// γ = 1 − |λ_{I₁}| with λ_{I₁} the exact mixture eigenvalue.
    pub gamma_exact: f64,
    /// First-order form 2·s_{k,n}·Σ_ℓ (p_ℓ+p_{−ℓ}) sin(ℓπ/n) sin((k−ℓ)π/n).
    pub gamma_formula: f64,
    /// Exact per-move gaps 1 − |λ^(ℓ)_{I₁}| for ℓ = 1..=k.
    pub gamma_ell_exact: Vec<f64>,
    /// First-order per-move gaps 2·s_{k,n}·sin(ℓπ/n)·sin((k−ℓ)π/n).
    pub gamma_ell_formula: Vec<f64>,
    /// Step-law average of the exact per-move gaps, E[γ_{|X|}].
    pub gamma_avg: f64,
    /// The sine ratio s_{k,n} = sin(π/n)/sin(kπ/n).
    pub s_kn: f64,
}

/// Compute the gap report for a model; needs no state-space enumeration.
pub fn gap(model: &ChainModel) -> Result<GapReport> {
    let n = model.n();
    let k = model.k();
    let p = model.p();
    let i1 = CircleConfig::first_excited(n, k)?;
    let nf = n as f64;
    let s_kn = (PI / nf).sin() / (PI * k as f64 / nf).sin();
    let lambdas = eigenvalues_all(&i1)?;
    let gamma_exact = 1.0 - mix_with_phase(&lambdas, p, n, 0).norm();
    let mut gamma_ell_exact = Vec::with_capacity(k as usize);
    let mut gamma_ell_formula = Vec::with_capacity(k as usize);
    for ell in 1..=k {
        gamma_ell_exact.push(1.0 - lambdas[ell as usize].norm());
        gamma_ell_formula
            .push(2.0 * s_kn * (PI * ell as f64 / nf).sin() * (PI * (k - ell) as f64 / nf).sin());
    }
    let mut gamma_formula = 0.0;
    let mut gamma_avg = 0.0;
    for ell in 1..=k as i64 {
        let weight = p.weight(ell) + p.weight(-ell);
        gamma_formula += weight * gamma_ell_formula[ell as usize - 1];
        gamma_avg += weight * gamma_ell_exact[ell as usize - 1];
    }
    Ok(GapReport {
        gamma_exact,
        gamma_formula,
        gamma_ell_exact,
        gamma_ell_formula,
        gamma_avg,
        s_kn,
    })
}

/// The two evaluations of the stretched-state eigenvalue λ_{I₂}.
#[derive(Clone, Debug, Serialize)]
pub struct LambdaI2 {
    /// Direct mixture Σ_ℓ p_ℓ e_{|ℓ|}(xi(I₂))/e_{|ℓ|}(xi(I₀)).
    pub direct: Complex64,
    /// Closed form 1 − 4(sin(π/n)/sin((k−1)π/n)) Σ_ℓ (p_ℓ+p_{−ℓ})
    /// sin(ℓπ/n) sin((k−ℓ)π/n); the eigenvalue is real.
    pub closed: f64,
}

/// Mixture eigenvalue at I₂ (top particle raised, bottom lowered), both by
/// direct evaluation and by the closed form. Needs k ≥ 2 and n ≥ k+2.
pub fn lambda_i2(model: &ChainModel) -> Result<LambdaI2> {
    let n = model.n();
    let k = model.k();
    if k < 2 {
        return Err(Error::invalid("stretched state needs k >= 2"));
    }
    if n < k + 2 {
        return Err(Error::invalid(
            "stretched state needs n >= k + 2 (raised and lowered sites collide)",
        ));
    }
    let mut positions: Vec<u32> = (0..k).rev().collect();
    positions[0] = k;
    positions[k as usize - 1] = n - 1;
    positions.sort_unstable_by(|a, b| b.cmp(a));
    let i2 = CircleConfig::new(n, positions)?;
    let direct = mixture_eigenvalue(&i2, model.p())?;
    let nf = n as f64;
    let scale = 4.0 * (PI / nf).sin() / (PI * (k - 1) as f64 / nf).sin();
    let mut sum = 0.0;
    for ell in 1..=k as i64 {
        sum += (model.p().weight(ell) + model.p().weight(-ell))
            * (PI * ell as f64 / nf).sin()
            * (PI * (k as f64 - ell as f64) / nf).sin();
    }
    Ok(LambdaI2 {
        direct,
        closed: 1.0 - scale * sum,
    })
}

/// Heat-kernel density h_t(I) = P^t(I₀, I)/μ(I), evaluated spectrally as
/// Σ_J λ_J^t · d(J) · f_J(I) over the whole state space.
///
/// The orientation (λ_J^t against f_J built from conj(S_J), with P f_J =
/// conj(λ_J) f_J) is the one that matches iterated row propagation of the
/// sparse kernel; the cross-check test freezes it.
pub fn heat_kernel_density(model: &ChainModel, t: u64, target: &CircleConfig) -> Result<f64> {
    if target.n() != model.n() || target.k() != model.k() {
        return Err(Error::invalid("target state outside this model"));
    }
    if t > u32::MAX as u64 {
        return Err(Error::invalid("time horizon too large for exact powers"));
    }
    let space = model.space()?;
    let configs = space.configs();
    let ground = model.ground();
    let s_target = schur_batch(configs, &target.xi())?;
    let s_ground = schur_batch(configs, &ground.xi())?;
    let d = space.perron_weights();
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, j_state) in configs.iter().enumerate() {
        let lambda = mixture_eigenvalue(j_state, model.p())?;
        let f_at_target = d[j] * s_target[j].conj() / s_ground[j].conj();
        acc += lambda.powu(t as u32) * d[j] * f_at_target;
    }
    Ok(acc.re)
}

/// Sub-gaussian deviation estimate for the per-step random gap γ_{|X|}.
#[derive(Clone, Debug, Serialize)]
pub struct SubgaussianGapEstimate {
    /// Minimal θ with E exp((γ_{|X|} − E γ_{|X|})²/θ²) ≤ 2 (0 if the gap
    /// is deterministic under p).
    pub psi2: f64,
    /// Comparison scale K_g·√γ/k from the audit constants.
    pub bound_shape: f64,
    /// psi2 / bound_shape (0 when the bound shape degenerates to 0).
    pub ratio: f64,
}

/// Estimate the ψ₂ parameter of γ_{|X|} − E[γ_{|X|}] by bisection.
pub fn subgaussian_gap_estimate(model: &ChainModel) -> Result<SubgaussianGapEstimate> {
    let report = gap(model)?;
    let p = model.p();
    let gamma_of = |ell: i64| -> f64 {
        if ell == 0 {
            0.0
        } else {
            report.gamma_ell_exact[ell.unsigned_abs() as usize - 1]
        }
    };
    let mean: f64 = p.support().map(|(ell, w)| w * gamma_of(ell)).sum();
    let max_dev = p
        .support()
        .map(|(ell, w)| if w > 0.0 { (gamma_of(ell) - mean).abs() } else { 0.0 })
        .fold(0.0f64, f64::max);
    let psi2 = if max_dev == 0.0 {
        0.0
    } else {
        let moment = |theta: f64| -> f64 {
            p.support()
                .map(|(ell, w)| {
                    let dev = gamma_of(ell) - mean;
                    w * (dev * dev / (theta * theta)).exp()
                })
                .sum()
        };
        let mut hi = max_dev;
        while moment(hi) > 2.0 && hi < 1e6 {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if moment(mid) <= 2.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    let audit = audit_assumptions(p, model.n(), model.k());
    let bound_shape = audit.kg_hat * report.gamma_exact.max(0.0).sqrt() / model.k() as f64;
    let ratio = if bound_shape > 0.0 {
        psi2 / bound_shape
    } else {
        0.0
    };
    Ok(SubgaussianGapEstimate {
        psi2,
        bound_shape,
        ratio,
    })
}

/// Dense-solver eigenvalues of the mixture kernel; an independent oracle for
/// small instances (≤ 2000 states).
pub fn dense_eigenvalues(model: &ChainModel) -> Result<Vec<Complex64>> {
    let space = model.space()?;
    if space.len() > 2000 {
        return Err(Error::invalid(
            "dense eigen-solver oracle is limited to 2000 states",
        ));
    }
    let kernel = model.kernel()?;
    let mut dense = DMatrix::<f64>::zeros(space.len(), space.len());
    for (i, j, w) in kernel.entries() {
        dense[(i, j)] = w;
    }
    Ok(dense.complex_eigenvalues().iter().copied().collect())
}
