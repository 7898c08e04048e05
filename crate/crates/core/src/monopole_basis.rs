//! Spin-weighted monopole harmonics `Y_{l m μ}` on the northern gauge patch.
//!
//! The harmonics are built from Wigner small-d functions,
//!
//! ```text
//! Y_{l m μ}(θ, φ) = √((2l+1)/4π) · e^{i(m−μ)φ} · d^l_{m μ}(θ)
//! ```
//!
//! which are eigenfunctions of `L_z = −i∂_φ + μ` with eigenvalue `m` and of
//! the northern-patch operator
//!
//! ```text
//! L² = −(1/sinθ) ∂_θ sinθ ∂_θ − (1/sin²θ) (∂_φ + iμ(1−cosθ))² + μ²
//! ```
//!
//! with eigenvalue `l(l+1)`. At `μ = 0` they coincide with the
//! Condon–Shortley spherical harmonics. On the southern patch the same state
//! is `Y^S = e^{2iμφ} Y^N`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::gauge_field::Patch;
use crate::specfun::{gauss_legendre, jacobi_poly, ln_factorial};

/// A half-integer stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);
    pub const MINUS_HALF: HalfInt = HalfInt(-1);

    pub const fn from_twice(twice: i32) -> Self {
        HalfInt(twice)
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    /// Parse a float that must be an exact multiple of 1/2.
    pub fn from_f64(x: f64) -> Result<Self> {
        let t = 2.0 * x;
        if !t.is_finite() || (t - t.round()).abs() > 1e-9 || t.abs() > 1e6 {
            return invalid(format!("{x} is not a half-integer"));
        }
        Ok(HalfInt(t.round() as i32))
    }

    pub fn value(self) -> f64 {
        0.5 * self.0 as f64
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn abs(self) -> Self {
        HalfInt(self.0.abs())
    }
}

impl std::ops::Add for HalfInt {
    type Output = HalfInt;
    fn add(self, o: HalfInt) -> HalfInt {
        HalfInt(self.0 + o.0)
    }
}

impl std::ops::Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, o: HalfInt) -> HalfInt {
        HalfInt(self.0 - o.0)
    }
}

impl std::ops::Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Quantum numbers `(l, m, μ)` of a monopole harmonic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MonopoleIndex {
    l: HalfInt,
    m: HalfInt,
    mu: HalfInt,
}

impl MonopoleIndex {
    pub fn new(l: HalfInt, m: HalfInt, mu: HalfInt) -> Result<Self> {
        if mu.abs().twice() > 1 {
            return invalid(format!("helicity μ = {mu} outside {{0, ±1/2}}"));
        }
        if l < mu.abs() || !(l - mu.abs()).is_integer() {
            return invalid(format!("l = {l} must be |μ|, |μ|+1, ... for μ = {mu}"));
        }
        if m.abs() > l || !(m - mu).is_integer() {
            return invalid(format!("m = {m} invalid for l = {l}, μ = {mu}"));
        }
        Ok(MonopoleIndex { l, m, mu })
    }

    /// Construct from floating-point values (each must be a multiple of 1/2).
    pub fn from_f64(l: f64, m: f64, mu: f64) -> Result<Self> {
        Self::new(
            HalfInt::from_f64(l)?,
            HalfInt::from_f64(m)?,
            HalfInt::from_f64(mu)?,
        )
    }

    pub fn l(&self) -> HalfInt {
        self.l
    }
    pub fn m(&self) -> HalfInt {
        self.m
    }
    pub fn mu(&self) -> HalfInt {
        self.mu
    }

    /// All indices with `l ≤ l_max` in helicity sector `mu`, ordered by `(l, m)`.
    pub fn all_up_to(l_max: HalfInt, mu: HalfInt) -> Vec<MonopoleIndex> {
        let mut out = Vec::new();
        let mut l = mu.abs();
        while l <= l_max {
            let mut m = -l;
            while m <= l {
                if let Ok(idx) = MonopoleIndex::new(l, m, mu) {
                    out.push(idx);
                }
                m = m + HalfInt::from_twice(2);
            }
            l = l + HalfInt::from_twice(2);
        }
        out
    }
}

impl fmt::Display for MonopoleIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(l={}, m={}, μ={})", self.l, self.m, self.mu)
    }
}

fn ln_binomial(n: i32, k: i32) -> f64 {
    ln_factorial(n as u64) - ln_factorial(k as u64) - ln_factorial((n - k) as u64)
}

/// Wigner small-d function `d^j_{m' m}(β)` with all labels given as twice-values.
///
/// Evaluated through the Jacobi-polynomial representation; valid for any
/// `j` such that `j ± m`, `j ± m'` are non-negative integers.
pub fn wigner_d(j: HalfInt, mp: HalfInt, m: HalfInt, beta: f64) -> f64 {
    let (j2, mp2, m2) = (j.twice(), mp.twice(), m.twice());
    if mp2.abs() > j2 || m2.abs() > j2 || (j2 - m2) % 2 != 0 || (j2 - mp2) % 2 != 0 {
        return 0.0;
    }
    // Integer quantities: j±m, j±m'.
    let jpm = (j2 + m2) / 2;
    let jmm = (j2 - m2) / 2;
    let jpmp = (j2 + mp2) / 2;
    let jmmp = (j2 - mp2) / 2;
    let k = jpm.min(jmm).min(jpmp).min(jmmp);
    let dm = (mp2 - m2) / 2;
    let (a, lambda) = if k == jmm || (k != jpm && k == jpmp) {
        (-dm, 0)
    } else {
        (dm, dm)
    };
    let b = j2 - 2 * k - a;
    let sign = if lambda.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let ln_norm = 0.5 * (ln_binomial(j2 - k, k + a) - ln_binomial(k + b, b));
    let half = 0.5 * beta;
    let jac =
        jacobi_poly(k as usize, a as f64, b as f64, beta.cos()).expect("finite Jacobi arguments");
    sign * ln_norm.exp() * half.sin().powi(a) * half.cos().powi(b) * jac
}

/// `Y_{lmμ}(θ, φ)` on the northern patch.
pub fn monopole_harmonic(idx: &MonopoleIndex, theta: f64, phi: f64) -> Result<Complex64> {
    if !(0.0..=PI).contains(&theta) || !phi.is_finite() {
        return invalid(format!("angles out of range: θ = {theta}, φ = {phi}"));
    }
    Ok(harmonic_unchecked(idx, theta, phi))
}

pub(crate) fn harmonic_unchecked(idx: &MonopoleIndex, theta: f64, phi: f64) -> Complex64 {
    let norm = ((idx.l.twice() as f64 + 1.0) / (4.0 * PI)).sqrt();
    let d = wigner_d(idx.l, idx.m, idx.mu, theta);
    let k = (idx.m - idx.mu).value();
    Complex64::from_polar(norm * d, k * phi)
}

/// `Y_{lmμ}` in the gauge of the given patch (`Y^S = e^{2iμφ} Y^N`).
pub fn monopole_harmonic_on(
    patch: Patch,
    idx: &MonopoleIndex,
    theta: f64,
    phi: f64,
) -> Result<Complex64> {
    let y = monopole_harmonic(idx, theta, phi)?;
    Ok(match patch {
        Patch::North => y,
        Patch::South => y * Complex64::from_polar(1.0, idx.mu.twice() as f64 * phi),
    })
}

/// Tensor-product quadrature on the unit sphere: Gauss–Legendre in `cosθ`,
/// uniform trapezoid in `φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularGrid {
    pub theta: Vec<f64>,
    pub cos_theta: Vec<f64>,
    pub theta_weights: Vec<f64>,
    pub phi: Vec<f64>,
    pub phi_weight: f64,
    pub hemispheric: bool,
}

impl AngularGrid {
    /// Single Gauss–Legendre rule over `cosθ ∈ [−1, 1]`.
    pub fn gauss(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_phi < 2 {
            return invalid("need at least 2 azimuthal nodes");
        }
        let rule = gauss_legendre(n_theta)?;
        Ok(Self::from_cos_nodes(rule.nodes, rule.weights, n_phi, false))
    }

    /// Independent Gauss–Legendre rules on each hemisphere, so functions
    /// that jump across the equator are still integrated spectrally.
    /// `n_theta` is the total count and must be even.
    pub fn hemispheric(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta < 2 || n_theta % 2 != 0 {
            return invalid("hemispheric grid needs an even θ count ≥ 2");
        }
        if n_phi < 2 {
            return invalid("need at least 2 azimuthal nodes");
        }
        let rule = gauss_legendre(n_theta / 2)?;
        let (mut x, mut w) = rule.mapped(-1.0, 0.0);
        let (x2, w2) = rule.mapped(0.0, 1.0);
        x.extend(x2);
        w.extend(w2);
        Ok(Self::from_cos_nodes(x, w, n_phi, true))
    }

    fn from_cos_nodes(
        cos_theta: Vec<f64>,
        weights: Vec<f64>,
        n_phi: usize,
        hemispheric: bool,
    ) -> Self {
        // Order by increasing θ (decreasing cosθ).
        let mut pairs: Vec<(f64, f64)> = cos_theta.into_iter().zip(weights).collect();
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
        let cos_theta: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let theta_weights = pairs.iter().map(|p| p.1).collect();
        let theta = cos_theta.iter().map(|c| c.acos()).collect();
        let phi = (0..n_phi)
            .map(|j| 2.0 * PI * j as f64 / n_phi as f64)
            .collect();
        AngularGrid {
            theta,
            cos_theta,
            theta_weights,
            phi,
            phi_weight: 2.0 * PI / n_phi as f64,
            hemispheric,
        }
    }

    /// A grid of the same kind with roughly 1.5× the nodes in each direction.
    pub fn refined(&self) -> Result<Self> {
        let grow = |n: usize| n + (n / 2).max(2);
        let nt = grow(self.n_theta());
        let np = grow(self.n_phi());
        if self.hemispheric {
            Self::hemispheric(nt + nt % 2, np)
        } else {
            Self::gauss(nt, np)
        }
    }

    pub fn n_theta(&self) -> usize {
        self.theta.len()
    }

    pub fn n_phi(&self) -> usize {
        self.phi.len()
    }

    /// Iterate `(θ, φ, weight)` over all nodes.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.theta
            .iter()
            .zip(&self.theta_weights)
            .flat_map(move |(&t, &wt)| self.phi.iter().map(move |&p| (t, p, wt * self.phi_weight)))
    }

    /// `∫ f dΩ` by the grid rule.
    pub fn integrate<F: FnMut(f64, f64) -> f64>(&self, mut f: F) -> f64 {
        self.points().map(|(t, p, w)| w * f(t, p)).sum()
    }

    /// Largest `l` whose products `Y* Y'` the azimuthal rule integrates exactly.
    pub fn max_resolved_l(&self) -> f64 {
        (self.n_phi() as f64 - 2.0) / 2.0
    }
}

/// `∫ Y*_{idx1} Y_{idx2} dΩ` by grid quadrature.
pub fn angular_inner_product(
    idx1: &MonopoleIndex,
    idx2: &MonopoleIndex,
    grid: &AngularGrid,
) -> Result<Complex64> {
    if idx1.mu != idx2.mu {
        return invalid(format!(
            "inner product across helicity sectors: {idx1} vs {idx2}"
        ));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (&t, &wt) in grid.theta.iter().zip(&grid.theta_weights) {
        let d1 = wigner_d(idx1.l, idx1.m, idx1.mu, t);
        let d2 = wigner_d(idx2.l, idx2.m, idx2.mu, t);
        let k = (idx2.m - idx1.m).value();
        let mut azimuthal = Complex64::new(0.0, 0.0);
        for &p in &grid.phi {
            azimuthal += Complex64::from_polar(1.0, k * p);
        }
        acc += wt * d1 * d2 * azimuthal * grid.phi_weight;
    }
    let norm = ((idx1.l.twice() as f64 + 1.0) * (idx2.l.twice() as f64 + 1.0)).sqrt() / (4.0 * PI);
    Ok(acc * norm)
}

/// Gram matrix of all harmonics with `l ≤ l_max` in one helicity sector.
pub fn gram_matrix(
    l_max: HalfInt,
    mu: HalfInt,
    grid: &AngularGrid,
) -> Result<(Vec<MonopoleIndex>, Vec<Vec<Complex64>>)> {
    let basis = MonopoleIndex::all_up_to(l_max, mu);
    let mut g = vec![vec![Complex64::new(0.0, 0.0); basis.len()]; basis.len()];
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            g[i][j] = angular_inner_product(a, b, grid)?;
        }
    }
    Ok((basis, g))
}

const FD_STEP: f64 = 1e-3;

/// Relative residual `‖(L² − l(l+1)) Y‖ / ‖Y‖` with `L²` applied by central
/// differences at the grid nodes (northern-patch operator).
pub fn l2_residual(idx: &MonopoleIndex, grid: &AngularGrid) -> Result<f64> {
    let needed = 4.0 * idx.l.value() + 8.0;
    if (grid.n_theta() as f64) < needed {
        return Err(Error::InvalidArgument(format!(
            "grid too coarse for {idx}: {} θ nodes, need ≥ {needed}",
            grid.n_theta()
        )));
    }
    let h = FD_STEP;
    let mu = idx.mu.value();
    let lambda = idx.l.value() * (idx.l.value() + 1.0);
    let y = |t: f64, p: f64| harmonic_unchecked(idx, t, p);
    let i = Complex64::i();
    let (mut num, mut den) = (0.0, 0.0);
    for (&t, &wt) in grid.theta.iter().zip(&grid.theta_weights) {
        let (s, c) = t.sin_cos();
        for &p in &grid.phi {
            let y0 = y(t, p);
            let polar = ((t + 0.5 * h).sin() * (y(t + h, p) - y0)
                - (t - 0.5 * h).sin() * (y0 - y(t - h, p)))
                / (h * h * s);
            let yp = y(t, p + h);
            let ym = y(t, p - h);
            let d_phi = (yp - ym) / (2.0 * h);
            let d2_phi = (yp - 2.0 * y0 + ym) / (h * h);
            let a = mu * (1.0 - c);
            let cov2 = d2_phi + 2.0 * i * a * d_phi - a * a * y0;
            let l2y = -polar - cov2 / (s * s) + mu * mu * y0;
            let w = wt * grid.phi_weight;
            num += w * (l2y - lambda * y0).norm_sqr();
            den += w * y0.norm_sqr();
        }
    }
    Ok((num / den).sqrt())
}

/// Relative residual `‖(−i∂_φ + μ − m) Y‖ / ‖Y‖` by a five-point central difference.
pub fn lz_residual(idx: &MonopoleIndex, grid: &AngularGrid) -> f64 {
    let h = FD_STEP;
    let mu = idx.mu.value();
    let m = idx.m.value();
    let (mut num, mut den) = (0.0, 0.0);
    for (t, p, w) in grid.points() {
        let y0 = harmonic_unchecked(idx, t, p);
        let y = |s: f64| harmonic_unchecked(idx, t, p + s * h);
        let d_phi = (y(-2.0) - 8.0 * y(-1.0) + 8.0 * y(1.0) - y(2.0)) / (12.0 * h);
        let lz = -Complex64::i() * d_phi + mu * y0;
        num += w * (lz - m * y0).norm_sqr();
        den += w * y0.norm_sqr();
    }
    (num / den).sqrt()
}

/// The Jacobi-polynomial closed form with the exponents as commonly printed,
///
/// ```text
/// e^{i(μ+m)φ} (1−z)^{−(μ+m)/2} (1+z)^{−(μ−m)/2} P^{(−μ−m, −μ+m)}_{l+m}(z),   z = cosθ,
/// ```
///
/// without normalization. Kept only as a diagnostic against [`monopole_harmonic`].
pub fn printed_jacobi_form(idx: &MonopoleIndex, theta: f64, phi: f64) -> Complex64 {
    let (l, m, mu) = (idx.l.value(), idx.m.value(), idx.mu.value());
    let z = theta.cos();
    let n = (idx.l + idx.m).twice() / 2;
    let jac = jacobi_poly(n as usize, -mu - m, -mu + m, z).expect("finite Jacobi arguments");
    let _ = l;
    let radial = (1.0 - z).powf(-(mu + m) / 2.0) * (1.0 + z).powf(-(mu - m) / 2.0) * jac;
    Complex64::from_polar(1.0, (mu + m) * phi) * radial
}

/// Outcome of comparing the printed closed form against the harmonics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PrintedFormMatch {
    /// Proportional to `Y_{l m μ}` with the given constant.
    SameHelicity(Complex64),
    /// Proportional to `Y_{l m −μ}` with the given constant.
    FlippedHelicity(Complex64),
    /// Identically zero on the sample.
    Vanishes,
    /// Proportional to neither (or singular inside the sphere).
    Neither,
}

fn proportionality(a: &[Complex64], b: &[Complex64]) -> Option<Complex64> {
    let (mut num, mut den) = (Complex64::new(0.0, 0.0), 0.0);
    for (x, y) in a.iter().zip(b) {
        num += y.conj() * x;
        den += y.norm_sqr();
    }
    if den == 0.0 {
        return None;
    }
    let c = num / den;
    let scale = a.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let ok = a
        .iter()
        .zip(b)
        .all(|(x, y)| x.is_finite() && (x - c * y).norm() <= 1e-8 * scale.max(1e-300));
    ok.then_some(c)
}

/// Compare [`printed_jacobi_form`] with `Y_{lmμ}` and `Y_{lm,−μ}` on interior sample points.
pub fn compare_printed_form(idx: &MonopoleIndex) -> PrintedFormMatch {
    let samples: Vec<(f64, f64)> = (1..12)
        .flat_map(|i| (0..5).map(move |j| (PI * i as f64 / 12.0, 0.37 + 1.1 * j as f64)))
        .collect();
    let printed: Vec<Complex64> = samples
        .iter()
        .map(|&(t, p)| printed_jacobi_form(idx, t, p))
        .collect();
    if printed.iter().any(|v| !v.is_finite()) {
        return PrintedFormMatch::Neither;
    }
    if printed.iter().all(|v| v.norm() == 0.0) {
        return PrintedFormMatch::Vanishes;
    }
    let same: Vec<Complex64> = samples
        .iter()
        .map(|&(t, p)| harmonic_unchecked(idx, t, p))
        .collect();
    if let Some(c) = proportionality(&printed, &same) {
        return PrintedFormMatch::SameHelicity(c);
    }
    if let Ok(flipped) = MonopoleIndex::new(idx.l, idx.m, -idx.mu) {
        let other: Vec<Complex64> = samples
            .iter()
            .map(|&(t, p)| harmonic_unchecked(&flipped, t, p))
            .collect();
        if let Some(c) = proportionality(&printed, &other) {
            return PrintedFormMatch::FlippedHelicity(c);
        }
    }
    PrintedFormMatch::Neither
}
