//! Symmetric-polynomial evaluation at unit-modulus point sets.
//!
//! The conditioned dynamics is diagonalized by three bricks evaluated at the
//! embedded configurations xi(J): elementary symmetric polynomials (the
//! eigenvalues), Schur-function determinant ratios (the eigenvectors), and
//! sine-product specializations at the ground state (Perron weights and the
//! stationary measure).
//!
//! Conventions: a Schur value is the ratio det(x_i^{a_j}) / det(x_i^{k−j})
//! with *both* exponent lists in strictly decreasing order, so the ground
//! state has Schur value exactly 1 at every point set. Exponents may be
//! negative (Laurent monomials); near-ground configurations are passed with
//! their proof-natural exponents (e.g. a bottom particle sits at −1 rather
//! than n−1) and the two choices agree at embedded point sets because
//! x^n = (−1)^{k−1} there.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::config::{enumerate_configs, CircleConfig};
use crate::error::{Error, Result};

/// Tolerance for the unit-modulus invariant of evaluation points.
const UNIT_TOL: f64 = 1e-12;
/// Magnitude below which a Vandermonde denominator is declared degenerate.
const DEGENERATE_TOL: f64 = 1e-10;

/// A validated set of evaluation points on the unit circle.
#[derive(Clone, Debug)]
pub struct UnitPointSet {
    points: Vec<Complex64>,
}

impl UnitPointSet {
    /// Validate that every point has modulus within 1e−12 of 1.
    pub fn new(points: Vec<Complex64>) -> Result<Self> {
        for (j, z) in points.iter().enumerate() {
            if (z.norm() - 1.0).abs() > UNIT_TOL {
                return Err(Error::invalid(format!(
                    "point {j} has modulus {} outside [1-1e-12, 1+1e-12]",
                    z.norm()
                )));
            }
        }
        Ok(UnitPointSet { points })
    }

    /// Embedded configuration points xi(I), unit modulus by construction.
    pub fn from_config(state: &CircleConfig) -> Self {
        UnitPointSet {
            points: state.xi(),
        }
    }

    /// The points.
    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Whether the set is empty.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// All elementary symmetric polynomials e_0, …, e_max of the points, by the
/// iterative coefficient product of Π_j (1 + z·x_j).
pub fn elementary_all(xs: &[Complex64], max_ell: usize) -> Result<Vec<Complex64>> {
    if max_ell > xs.len() {
        return Err(Error::invalid(format!(
            "elementary degree {max_ell} exceeds point count {}",
            xs.len()
        )));
    }
    let mut e = vec![Complex64::new(0.0, 0.0); max_ell + 1];
    e[0] = Complex64::new(1.0, 0.0);
    for (i, &x) in xs.iter().enumerate() {
        let top = max_ell.min(i + 1);
        for j in (1..=top).rev() {
            e[j] = e[j] + x * e[j - 1];
        }
    }
    Ok(e)
}

/// The ℓ-th elementary symmetric polynomial of the points.
pub fn elementary(xs: &[Complex64], ell: usize) -> Result<Complex64> {
    Ok(*elementary_all(xs, ell)?.last().expect("length ell+1"))
}

/// Power sum p_s = Σ_j x_j^s; requires s ≥ 1.
pub fn power_sum(xs: &[Complex64], s: u32) -> Result<Complex64> {
    if s == 0 {
        return Err(Error::invalid("power sum index must be >= 1"));
    }
    Ok(xs.iter().map(|x| x.powi(s as i32)).sum())
}

/// e_ℓ through the Newton recursion ℓ·e_ℓ = Σ_{i=1}^{ℓ} (−1)^{i−1} e_{ℓ−i} p_i,
/// an algorithm independent of [`elementary`] used for cross-checks.
pub fn elementary_via_newton(xs: &[Complex64], ell: usize) -> Result<Complex64> {
    if ell > xs.len() {
        return Err(Error::invalid(format!(
            "elementary degree {ell} exceeds point count {}",
            xs.len()
        )));
    }
    let p: Vec<Complex64> = (1..=ell)
        .map(|i| xs.iter().map(|x| x.powi(i as i32)).sum())
        .collect();
    let mut e = vec![Complex64::new(1.0, 0.0)];
    for m in 1..=ell {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut sign = 1.0;
        for i in 1..=m {
            acc += sign * e[m - i] * p[i - 1];
            sign = -sign;
        }
        e.push(acc / m as f64);
    }
    Ok(e[ell])
}

/// Vandermonde product Π_{i<j} (x_i − x_j).
pub fn vandermonde(xs: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for i in 0..xs.len() {
        for j in (i + 1)..xs.len() {
            acc *= xs[i] - xs[j];
        }
    }
    acc
}

fn det_power_matrix(xs: &[Complex64], exponents: &[i64]) -> Complex64 {
    let k = xs.len();
    let m = DMatrix::from_fn(k, k, |i, j| xs[i].powi(exponents[j] as i32));
    m.lu().determinant()
}

fn check_exponents(exponents: &[i64]) -> Result<()> {
    for w in exponents.windows(2) {
        if w[0] <= w[1] {
            return Err(Error::invalid(format!(
                "Schur exponents must be strictly decreasing, got {exponents:?}"
            )));
        }
    }
    if exponents.iter().any(|&a| a.unsigned_abs() > i32::MAX as u64) {
        return Err(Error::invalid("Schur exponent magnitude too large"));
    }
    Ok(())
}

fn ground_exponents(k: usize) -> Vec<i64> {
    (0..k as i64).rev().collect()
}

/// Schur value for an explicit strictly decreasing (possibly Laurent)
/// exponent vector: det(x_i^{a_j}) / det(x_i^{k−j}).
pub fn schur_exponents(exponents: &[i64], xs: &[Complex64]) -> Result<Complex64> {
    if exponents.len() != xs.len() {
        return Err(Error::invalid(format!(
            "exponent count {} does not match point count {}",
            exponents.len(),
            xs.len()
        )));
    }
    check_exponents(exponents)?;
    let den = det_power_matrix(xs, &ground_exponents(xs.len()));
    if den.norm() < DEGENERATE_TOL {
        return Err(Error::numerical(format!(
            "degenerate evaluation: Vandermonde magnitude {} below {DEGENERATE_TOL}",
            den.norm()
        )));
    }
    Ok(det_power_matrix(xs, exponents) / den)
}

/// Schur value of a configuration (exponents = its positions) at a point set
/// of matching size.
pub fn schur(state: &CircleConfig, xs: &[Complex64]) -> Result<Complex64> {
    if xs.len() != state.k() as usize {
        return Err(Error::invalid(format!(
            "point count {} does not match particle count {}",
            xs.len(),
            state.k()
        )));
    }
    let exponents: Vec<i64> = state.positions().iter().map(|&p| p as i64).collect();
    schur_exponents(&exponents, xs)
}

/// Schur values S_I(xs) for every configuration in `states`, sharing one
/// Vandermonde denominator factorization across the batch.
pub fn schur_batch(states: &[CircleConfig], xs: &[Complex64]) -> Result<Vec<Complex64>> {
    let k = xs.len();
    let den = det_power_matrix(xs, &ground_exponents(k));
    if den.norm() < DEGENERATE_TOL {
        return Err(Error::numerical(format!(
            "degenerate evaluation: Vandermonde magnitude {} below {DEGENERATE_TOL}",
            den.norm()
        )));
    }
    let mut out = Vec::with_capacity(states.len());
    let mut exponents = vec![0i64; k];
    for state in states {
        if state.k() as usize != k {
            return Err(Error::invalid(
                "batch contains a configuration of mismatched particle count",
            ));
        }
        for (e, &p) in exponents.iter_mut().zip(state.positions()) {
            *e = p as i64;
        }
        out.push(det_power_matrix(xs, &exponents) / den);
    }
    Ok(out)
}

/// Sorted circle distances min(d, n−d) over all position pairs; multiset
/// equality across shifts makes products over it bit-reproducible.
fn pair_distances(state: &CircleConfig) -> Vec<u32> {
    let n = state.n();
    let ps = state.positions();
    let mut ds = Vec::with_capacity(ps.len() * (ps.len() - 1) / 2);
    for i in 0..ps.len() {
        for j in (i + 1)..ps.len() {
            let d = ps[i] - ps[j];
            ds.push(d.min(n - d));
        }
    }
    ds.sort_unstable();
    ds
}

/// Schur value of a configuration at the ground point set, as the positive
/// sine product Π_{i<j} sin(π·d_ij/n) / Π_{i<j} sin(π(j−i)/n) with d_ij the
/// circle distance between positions i and j.
pub fn schur_at_ground(state: &CircleConfig) -> f64 {
    let n = state.n();
    let k = state.k();
    let ground = CircleConfig::ground(n, k).expect("ground exists for any valid state");
    let nf = n as f64;
    let num: f64 = pair_distances(state)
        .iter()
        .map(|&d| (std::f64::consts::PI * d as f64 / nf).sin())
        .product();
    let den: f64 = pair_distances(&ground)
        .iter()
        .map(|&d| (std::f64::consts::PI * d as f64 / nf).sin())
        .product();
    num / den
}

/// Squared Vandermonde magnitude of the embedded points:
/// |V(xi(I))|² = Π_{i<j} 4 sin²(π·d_ij/n).
pub fn vandermonde_abs_sq(state: &CircleConfig) -> f64 {
    let nf = state.n() as f64;
    pair_distances(state)
        .iter()
        .map(|&d| {
            let s = (std::f64::consts::PI * d as f64 / nf).sin();
            4.0 * s * s
        })
        .product()
}

/// Stationary probability μ(I) = |V(xi(I))|² / n^k.
pub fn stationary_weight(state: &CircleConfig) -> f64 {
    vandermonde_abs_sq(state) / (state.n() as f64).powi(state.k() as i32)
}

/// Ground-state elementary value e_ℓ(xi(I₀)) as the positive sine product
/// Π_{j=1}^{ℓ} sin((k−j+1)π/n) / sin(jπ/n).
pub fn elementary_ground(n: u32, k: u32, ell: u32) -> Result<f64> {
    if ell > k || k > n {
        return Err(Error::invalid(format!(
            "need ell <= k <= n, got ell={ell}, k={k}, n={n}"
        )));
    }
    let nf = n as f64;
    let mut acc = 1.0;
    for j in 1..=ell {
        acc *= (std::f64::consts::PI * (k - j + 1) as f64 / nf).sin()
            / (std::f64::consts::PI * j as f64 / nf).sin();
    }
    Ok(acc)
}

/// Residual of the q-identity e_ℓ(1, q, …, q^{k−1}) =
/// q^{ℓ(ℓ−1)/2} Π_{j=1}^{ℓ} (1−q^{k−j+1})/(1−q^j) at q = e^{2πi/n}.
pub fn q_binomial_check(n: u32, k: u32, ell: u32) -> Result<f64> {
    if !(ell <= k && k < n) {
        return Err(Error::invalid(format!(
            "q-identity needs ell <= k < n, got ell={ell}, k={k}, n={n}"
        )));
    }
    let q = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / n as f64);
    let xs: Vec<Complex64> = (0..k).map(|j| q.powi(j as i32)).collect();
    let lhs = elementary(&xs, ell as usize)?;
    let one = Complex64::new(1.0, 0.0);
    let mut rhs = q.powi((ell * (ell.max(1) - 1) / 2) as i32);
    for j in 1..=ell {
        rhs *= (one - q.powi((k - j + 1) as i32)) / (one - q.powi(j as i32));
    }
    Ok((lhs - rhs).norm())
}

fn laurent_first_excited(k: u32) -> Vec<i64> {
    let mut e: Vec<i64> = (0..k as i64).rev().collect();
    e[0] = k as i64;
    e
}

fn laurent_bottom_lowered(k: u32) -> Vec<i64> {
    let mut e: Vec<i64> = (0..k as i64).rev().collect();
    e[k as usize - 1] = -1;
    e
}

fn laurent_stretched(k: u32) -> Vec<i64> {
    let mut e: Vec<i64> = (0..k as i64).rev().collect();
    e[0] = k as i64;
    e[k as usize - 1] = -1;
    e
}

/// Maximum over I ∈ B_{k,n} of the product-rule residual
/// |S_{I₁}(xi(I))·S_{I'₁}(xi(I)) − S_{I₂}(xi(I)) − 1|, where I₁ raises the
/// top ground particle, I'₁ lowers the bottom one (Laurent exponent −1), and
/// I₂ does both.
pub fn pieri_check(n: u32, k: u32) -> Result<f64> {
    if k < 2 {
        return Err(Error::invalid("product-rule check needs k >= 2"));
    }
    let raised = laurent_first_excited(k);
    let lowered = laurent_bottom_lowered(k);
    let stretched = laurent_stretched(k);
    let mut worst = 0.0f64;
    for state in enumerate_configs(n, k, 1_000_000)? {
        let xs = state.xi();
        let s_raised = schur_exponents(&raised, &xs)?;
        let s_lowered = schur_exponents(&lowered, &xs)?;
        let s_stretched = schur_exponents(&stretched, &xs)?;
        let residual = (s_raised * s_lowered - s_stretched - 1.0).norm();
        worst = worst.max(residual);
    }
    Ok(worst)
}
