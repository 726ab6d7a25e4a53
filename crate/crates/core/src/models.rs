//! Preset chain families: a size-independent step law, independent ±1 walks
//! conditioned to never intersect, and the slice process of the periodic
//! hexagonal dimer model.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::config::CircleConfig;
use crate::error::{Error, Result};
use crate::kernels::{ChainModel, StepDistribution};
use crate::spectral::mixture_eigenvalue;
use crate::symm::elementary_all;

/// Agreement tolerance for the first-excited eigenvalue of the dimer law
/// against its two-point product form.
const DIMER_LAMBDA_TOL: f64 = 1e-12;

/// A realized step law with total move probability below this threshold is
/// flagged as effectively frozen.
const FROZEN_LAW_TOL: f64 = 1e-8;

/// Family-specific parameters and derived constants of a preset build.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilyDetails {
    /// A fixed step law reused across instance sizes.
    Constant {
        /// Mean number of moving particles E|X|.
        mean_abs: f64,
    },
    /// Independent rate-α clockwise / rate-β anticlockwise walks conditioned
    /// to never intersect.
    Asep {
        /// Clockwise jump rate.
        alpha: f64,
        /// Anticlockwise jump rate.
        beta: f64,
        /// Laziness ε = 1 − (α+β)/k of the underlying walk.
        epsilon: f64,
    },
    /// Slice process of the hexagonal dimer model with edge weights a₁, a₂.
    Dimer {
        /// Weight of the edges each surviving particle traverses.
        a1: f64,
        /// Weight of the edges of resting particles.
        a2: f64,
        /// Modulus of a₂ + a₁·e^{iπk/n}.
        r: f64,
        /// Argument of a₂ + a₁·e^{iπk/n}.
        theta0: f64,
        /// Modulus of a₂ + a₁·e^{iπ/n}, the alternate constant reading;
        /// reported for comparison, not used in predictions.
        r_alt: f64,
        /// Argument of a₂ + a₁·e^{iπ/n}.
        theta0_alt: f64,
        /// Leading-order spectral gap (4π/n)·(a₁/r)·sin(kπ/n − θ₀).
        gamma_asymptotic: f64,
    },
}

/// Headline data of a preset build: the realized law, the family constants,
/// and the leading-order mixing-time prediction.
#[derive(Debug, Clone, Serialize)]
pub struct ModelReport {
    /// Circle size.
    pub n: u32,
    /// Particle count.
    pub k: u32,
    /// Family parameters and derived constants.
    pub family: FamilyDetails,
    /// Realized step law as (ℓ, weight) pairs in increasing ℓ.
    pub step_law: Vec<(i64, f64)>,
    /// Leading-order prediction of the mixing time at the family's natural
    /// scale.
    pub predicted_mixing_time: f64,
    /// Degeneracy flags from the assumption audit and the build itself.
    pub warnings: Vec<String>,
}

/// A preset chain together with its report.
pub struct PresetModel {
    /// The built chain.
    pub model: ChainModel,
    /// Family constants, realized law, prediction, warnings.
    pub report: ModelReport,
}

/// Validate a size-independent step law for use at (n, k): support within
/// ±k and support gcd 1 (otherwise the chain cannot reach every
/// configuration).
pub fn constant_step_law(n: u32, k: u32, p: &StepDistribution) -> Result<StepDistribution> {
    if p.max_step() > k {
        return Err(Error::invalid(format!(
            "step law moves up to {} particles but only k={k} are available (n={n})",
            p.max_step()
        )));
    }
    let g = p.support_gcd();
    if g != 1 {
        return Err(Error::invalid(format!(
            "step law has support gcd {g}; it cannot reach every configuration"
        )));
    }
    Ok(p.clone())
}

/// Build the chain for a fixed step law with its mixing-time prediction
/// n²·log n / (2π²·E|X|).
pub fn build_constant(n: u32, k: u32, p: &StepDistribution) -> Result<PresetModel> {
    let law = constant_step_law(n, k, p)?;
    let mean_abs = law.mean_abs();
    let model = ChainModel::new(n, k, law)?;
    let warnings = model.audit().warnings;
    let n_f = n as f64;
    let predicted_mixing_time = n_f * n_f * n_f.ln() / (2.0 * PI * PI * mean_abs);
    let report = ModelReport {
        n,
        k,
        family: FamilyDetails::Constant { mean_abs },
        step_law: model.p().support().collect(),
        predicted_mixing_time,
        warnings,
    };
    Ok(PresetModel { model, report })
}

/// Step law of the conditioned walk system: with ε = 1 − (α+β)/k and
/// s₁ = sin(kπ/n)/(k·sin(π/n)),
/// p₋₁ = α·s₁/d, p₀ = ε/d, p₁ = β·s₁/d where d = (α+β)·s₁ + ε.
pub fn asep_step_law(n: u32, k: u32, alpha: f64, beta: f64) -> Result<StepDistribution> {
    if !(alpha.is_finite() && beta.is_finite()) || alpha < 0.0 || beta < 0.0 {
        return Err(Error::invalid(
            "jump rates must be finite and nonnegative".to_string(),
        ));
    }
    if alpha + beta <= 0.0 {
        return Err(Error::invalid("jump rates must not both vanish".to_string()));
    }
    if k == 0 || k >= n {
        return Err(Error::invalid("conditioned walks need 1 <= k < n"));
    }
    let epsilon = 1.0 - (alpha + beta) / k as f64;
    if epsilon <= 0.0 {
        return Err(Error::invalid(format!(
            "laziness 1 - (alpha+beta)/k = {epsilon} must be positive; lower the rates or raise k"
        )));
    }
    let s1 = (k as f64 * PI / n as f64).sin() / (k as f64 * (PI / n as f64).sin());
    let denom = (alpha + beta) * s1 + epsilon;
    StepDistribution::new(BTreeMap::from([
        (-1, alpha * s1 / denom),
        (0, epsilon / denom),
        (1, beta * s1 / denom),
    ]))
}

/// Build the conditioned-walk chain with its mixing-time prediction
/// (n²·log n / 2π²)·(1 + θπ/((α+β)·sin θπ)), θ = k/n.
pub fn build_asep(n: u32, k: u32, alpha: f64, beta: f64) -> Result<PresetModel> {
    let law = asep_step_law(n, k, alpha, beta)?;
    let epsilon = 1.0 - (alpha + beta) / k as f64;
    let model = ChainModel::new(n, k, law)?;
    let warnings = model.audit().warnings;
    let n_f = n as f64;
    let theta = k as f64 / n_f;
    let predicted_mixing_time = n_f * n_f * n_f.ln() / (2.0 * PI * PI)
        * (1.0 + theta * PI / ((alpha + beta) * (theta * PI).sin()));
    let report = ModelReport {
        n,
        k,
        family: FamilyDetails::Asep {
            alpha,
            beta,
            epsilon,
        },
        step_law: model.p().support().collect(),
        predicted_mixing_time,
        warnings,
    };
    Ok(PresetModel { model, report })
}

/// Step law of the dimer slice process: p_ℓ proportional to the coefficient
/// of z^ℓ in Π_j (a₂ + a₁·z·ξ_j) over the ground points, computed by the
/// product expansion.
pub fn dimer_step_law(n: u32, k: u32, a1: f64, a2: f64) -> Result<StepDistribution> {
    if !(a1.is_finite() && a2.is_finite()) || a1 <= 0.0 || a2 <= 0.0 {
        return Err(Error::invalid("edge weights must be finite and positive"));
    }
    let ground = CircleConfig::ground(n, k)?;
    let scaled: Vec<Complex64> = ground.xi().into_iter().map(|x| x * (a1 / a2)).collect();
    let coefficients = elementary_all(&scaled, k as usize)?;
    let mut weights = Vec::with_capacity(k as usize + 1);
    let mut total = 0.0;
    for (ell, c) in coefficients.iter().enumerate() {
        let value = c.re;
        if c.im.abs() > 1e-10 * value.abs().max(1.0) {
            return Err(Error::numerical(format!(
                "slice-law coefficient at degree {ell} has imaginary part {:.3e}",
                c.im
            )));
        }
        if value < -1e-12 {
            return Err(Error::numerical(format!(
                "slice-law coefficient at degree {ell} is negative: {value:.3e}"
            )));
        }
        weights.push(value.max(0.0));
        total += value.max(0.0);
    }
    if total <= 0.0 {
        return Err(Error::numerical("slice-law normalization vanished"));
    }
    StepDistribution::new(
        weights
            .into_iter()
            .enumerate()
            .map(|(ell, w)| (ell as i64, w / total))
            .collect(),
    )
}

/// Build the dimer slice chain. Verifies the first-excited eigenvalue of the
/// realized law against its two-point product form
/// (a₂ + a₁e^{iπ(k+1)/n})/(a₂ + a₁e^{iπ(k−1)/n}), and attaches the
/// mixing-time prediction n·r·log n/(4π·a₁·sin(kπ/n − θ₀)) with
/// r·e^{iθ₀} = a₂ + a₁·e^{iπk/n}.
pub fn build_dimer(n: u32, k: u32, a1: f64, a2: f64) -> Result<PresetModel> {
    let law = dimer_step_law(n, k, a1, a2)?;
    let first_excited = CircleConfig::first_excited(n, k)?;
    let direct = mixture_eigenvalue(&first_excited, &law)?;
    let product = (Complex64::new(a2, 0.0)
        + a1 * Complex64::from_polar(1.0, PI * (k as f64 + 1.0) / n as f64))
        / (Complex64::new(a2, 0.0)
            + a1 * Complex64::from_polar(1.0, PI * (k as f64 - 1.0) / n as f64));
    if (direct - product).norm() > DIMER_LAMBDA_TOL {
        return Err(Error::numerical(format!(
            "first-excited eigenvalue mismatch: law gives {direct}, product form gives {product}"
        )));
    }
    let model = ChainModel::new(n, k, law)?;
    let mut warnings = model.audit().warnings;
    if 1.0 - model.p().weight(0) < FROZEN_LAW_TOL {
        warnings.push(format!(
            "slice law is effectively frozen: rest weight {:.17e}",
            model.p().weight(0)
        ));
    }
    let principal = Complex64::new(a2, 0.0) + a1 * Complex64::from_polar(1.0, PI * k as f64 / n as f64);
    let alternate = Complex64::new(a2, 0.0) + a1 * Complex64::from_polar(1.0, PI / n as f64);
    let (r, theta0) = (principal.norm(), principal.arg());
    let gamma_asymptotic = 4.0 * PI / n as f64 * (a1 / r) * (k as f64 * PI / n as f64 - theta0).sin();
    let n_f = n as f64;
    let predicted_mixing_time =
        n_f * r * n_f.ln() / (4.0 * PI * a1 * (k as f64 * PI / n_f - theta0).sin());
    let report = ModelReport {
        n,
        k,
        family: FamilyDetails::Dimer {
            a1,
            a2,
            r,
            theta0,
            r_alt: alternate.norm(),
            theta0_alt: alternate.arg(),
            gamma_asymptotic,
        },
        step_law: model.p().support().collect(),
        predicted_mixing_time,
        warnings,
    };
    Ok(PresetModel { model, report })
}

/// Largest deviation over a θ-grid between the characteristic function of
/// the dimer step law and its product form
/// Π_j (a₂ + a₁e^{iθ}ξ_j)/(a₂ + a₁ξ_j) over the ground points.
pub fn dimer_fourier_residual(preset: &PresetModel, grid: usize) -> Result<f64> {
    let FamilyDetails::Dimer { a1, a2, .. } = preset.report.family else {
        return Err(Error::invalid(
            "characteristic-function product form applies to the dimer family only",
        ));
    };
    if grid == 0 {
        return Err(Error::invalid("grid must have at least one point"));
    }
    let xi = CircleConfig::ground(preset.report.n, preset.report.k)?.xi();
    let mut residual: f64 = 0.0;
    for j in 0..grid {
        let theta = -PI + 2.0 * PI * j as f64 / grid as f64;
        let phase = Complex64::from_polar(1.0, theta);
        let mut product = Complex64::new(1.0, 0.0);
        for &x in &xi {
            product *= (Complex64::new(a2, 0.0) + a1 * phase * x)
                / (Complex64::new(a2, 0.0) + a1 * x);
        }
        residual = residual.max((preset.model.p().fourier(theta) - product).norm());
    }
    Ok(residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::gap;

    #[test]
    fn constant_prediction_matches_the_plugin_value() {
        let preset = build_constant(12, 6, &StepDistribution::lazy_symmetric()).unwrap();
        let expected = 144.0 * 12f64.ln() / (PI * PI);
        assert!((preset.report.predicted_mixing_time - expected).abs() <= 1e-9 * expected);
        assert!(preset.report.warnings.is_empty());
        let FamilyDetails::Constant { mean_abs } = preset.report.family else {
            panic!("wrong family")
        };
        assert_eq!(mean_abs, 0.5);
    }

    #[test]
    fn constant_rejects_degenerate_laws() {
        assert!(build_constant(8, 4, &StepDistribution::delta(0)).is_err());
        let even = "-2:0.5,2:0.5".parse::<StepDistribution>().unwrap();
        assert!(build_constant(8, 4, &even).is_err());
        let wide = StepDistribution::delta(3);
        assert!(build_constant(8, 2, &wide).is_err());
    }

    #[test]
    fn constant_warns_on_deterministic_rotation() {
        let preset = build_constant(8, 4, &StepDistribution::delta(1)).unwrap();
        assert!(
            !preset.report.warnings.is_empty(),
            "pure-drift law should be flagged"
        );
    }

    #[test]
    fn conditioned_walk_weights_match_the_closed_forms() {
        let (n, k, alpha, beta) = (20u32, 10u32, 1.0, 1.0);
        let law = asep_step_law(n, k, alpha, beta).unwrap();
        let total: f64 = law.support().map(|(_, w)| w).sum();
        assert!((total - 1.0).abs() <= 1e-13);
        assert!((law.weight(-1) - law.weight(1)).abs() <= 1e-15);
        let epsilon = 1.0 - (alpha + beta) / k as f64;
        let direct = alpha
            / (alpha
                + beta
                + epsilon * k as f64 * (PI / n as f64).sin() / (k as f64 * PI / n as f64).sin());
        assert!((law.weight(-1) - direct).abs() <= 1e-15);
    }

    #[test]
    fn conditioned_walk_rejects_out_of_range_rates() {
        assert!(asep_step_law(8, 4, 2.0, 2.0).is_err());
        assert!(asep_step_law(8, 4, -1.0, 2.0).is_err());
        assert!(asep_step_law(8, 4, 0.0, 0.0).is_err());
        assert!(asep_step_law(8, 4, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn one_sided_rates_still_pass_the_audit() {
        let preset = build_asep(12, 6, 0.0, 1.0).unwrap();
        assert_eq!(preset.model.p().weight(-1), 0.0);
        assert!(preset.model.p().weight(1) > 0.0);
        assert!(preset.model.audit().ka_hat > 0.0);
        assert!(preset.report.warnings.is_empty());
    }

    #[test]
    fn gap_depends_on_the_rates_only_through_their_sum() {
        let gaps: Vec<(f64, f64)> = [(2.0, 0.0), (1.0, 1.0), (0.0, 2.0)]
            .iter()
            .map(|&(alpha, beta)| {
                let preset = build_asep(16, 8, alpha, beta).unwrap();
                let report = gap(&preset.model).unwrap();
                (report.gamma_exact, report.gamma_formula)
            })
            .collect();
        for pair in gaps.windows(2) {
            assert!((pair[0].0 - pair[1].0).abs() <= 1e-12);
            assert!((pair[0].1 - pair[1].1).abs() <= 1e-12);
        }
    }

    #[test]
    fn gap_approaches_its_leading_display() {
        let deviation = |n: u32, k: u32| -> f64 {
            let law = asep_step_law(n, k, 1.0, 1.0).unwrap();
            let lambda =
                mixture_eigenvalue(&CircleConfig::first_excited(n, k).unwrap(), &law).unwrap();
            let gamma = 1.0 - lambda.norm();
            let display = 2.0 * PI * PI / (n as f64 * n as f64) * (law.weight(-1) + law.weight(1));
            (gamma / display - 1.0).abs()
        };
        let at_20 = deviation(20, 10);
        let at_40 = deviation(40, 20);
        assert!(at_20 <= 0.2, "deviation {at_20} too large at n=20");
        assert!(at_40 < at_20);
    }

    #[test]
    fn slice_law_is_a_symmetric_probability_at_equal_weights() {
        let law = dimer_step_law(12, 6, 1.0, 1.0).unwrap();
        let total: f64 = law.support().map(|(_, w)| w).sum();
        assert!((total - 1.0).abs() <= 1e-12);
        for ell in 0..=6i64 {
            assert!(law.weight(ell) > 0.0);
            assert!((law.weight(ell) - law.weight(6 - ell)).abs() <= 1e-12);
        }
        assert_eq!(law.weight(-1), 0.0);
    }

    #[test]
    fn slice_law_matches_per_degree_ratios() {
        let (n, k, a1, a2) = (12u32, 6u32, 0.7, 1.3);
        let law = dimer_step_law(n, k, a1, a2).unwrap();
        let mut direct = Vec::new();
        let mut total = 0.0;
        for ell in 0..=k {
            let value = crate::symm::elementary_ground(n, k, ell).unwrap()
                * a1.powi(ell as i32)
                * a2.powi((k - ell) as i32);
            direct.push(value);
            total += value;
        }
        for ell in 0..=k {
            let expected = direct[ell as usize] / total;
            assert!(
                (law.weight(ell as i64) - expected).abs() <= 1e-10 * expected,
                "degree {ell}"
            );
        }
    }

    #[test]
    fn slice_build_checks_out_and_its_transform_is_a_product() {
        let preset = build_dimer(12, 6, 0.8, 1.25).unwrap();
        let residual = dimer_fourier_residual(&preset, 256).unwrap();
        assert!(residual <= 1e-9, "transform residual {residual}");
    }

    #[test]
    fn slice_prediction_equals_gap_based_prediction() {
        let preset = build_dimer(12, 6, 0.8, 1.25).unwrap();
        let FamilyDetails::Dimer {
            a1,
            a2,
            r,
            theta0,
            r_alt,
            gamma_asymptotic,
            ..
        } = preset.report.family
        else {
            panic!("wrong family")
        };
        let expected_r =
            (Complex64::new(a2, 0.0) + a1 * Complex64::from_polar(1.0, PI * 6.0 / 12.0)).norm();
        assert!((r - expected_r).abs() <= 1e-15);
        assert!(r_alt != r);
        assert!(theta0 > 0.0 && theta0 < PI * 6.0 / 12.0);
        let via_gamma = 12f64.ln() / gamma_asymptotic;
        assert!(
            (preset.report.predicted_mixing_time - via_gamma).abs() <= 1e-10 * via_gamma.abs()
        );
    }

    #[test]
    fn nearly_vanishing_edge_weight_is_flagged() {
        let preset = build_dimer(10, 4, 1e-9, 1.0).unwrap();
        assert!(preset
            .report
            .warnings
            .iter()
            .any(|w| w.contains("frozen")));
    }

    #[test]
    fn slice_law_rejects_nonpositive_weights() {
        assert!(dimer_step_law(10, 4, 0.0, 1.0).is_err());
        assert!(dimer_step_law(10, 4, 1.0, -0.5).is_err());
        assert!(dimer_step_law(10, 4, f64::INFINITY, 1.0).is_err());
    }
}
