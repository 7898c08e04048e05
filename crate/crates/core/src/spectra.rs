//! Spectral solvers: the helicity oscillator and screened momentum-space hydrogen.
//!
//! The oscillator `H = ½p² + ½r²` in a helicity sector has the radial barrier
//! `(l(l+1) − μ²)/2p²`, i.e. an effective angular momentum
//! `l* = −½ + √((l+½)² − μ²)` and levels `E = 2v + l* + 3/2`. It is solved
//! here by second-order finite differences for `u = pF` with Dirichlet walls.
//!
//! Hydrogen is solved in momentum space by Nyström quadrature of
//!
//! ```text
//! ½p² ψ(p) + ∫ K_l(p, q) ψ(q) q² dq = E ψ(p)
//! ```
//!
//! on a rational map `p = c(1+x)/(1−x)`. The kernel splits into a
//! rotation-invariant part, which reduces to a generalized Legendre function
//! of the second kind and carries the logarithmic singularity (handled by
//! Landé subtraction), plus a bounded cross-hemisphere correction that is
//! diagonal in `m` and is integrated over the angles directly. Mixing of
//! different `l` by that correction is not included.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::gauge_field::{MomentumPoint, PatchTag};
use crate::hopf::{helical_section, spinor_from_angles, Helicity, SectionSpinor};
use crate::monopole_basis::{wigner_d, AngularGrid, HalfInt, MonopoleIndex};
use crate::screening::{
    cross_patch_form_factor, CoulombPartialWave, CoulombProfile, PotentialSpec,
};
use crate::specfun::{gauss_legendre, laguerre_poly, legendre_q0};

type C = Complex64;

/// How the radial nodes were generated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialMapping {
    /// Uniform interior nodes between Dirichlet walls at `p_min` and `p_max`.
    Linear { p_min: f64, p_max: f64 },
    /// `p = c(1+x)/(1−x)` over Gauss–Legendre `x`.
    RationalMap { scale: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    pub mapping: RadialMapping,
}

impl RadialGrid {
    /// `n` interior nodes `p_min + i h`, `i = 1..n`, with `h = (p_max − p_min)/(n+1)`.
    pub fn linear(p_min: f64, p_max: f64, n: usize) -> Result<Self> {
        if !(p_min >= 0.0 && p_max > p_min) || n < 3 {
            return invalid(format!(
                "bad linear grid: [{p_min}, {p_max}] with {n} nodes"
            ));
        }
        let h = (p_max - p_min) / (n as f64 + 1.0);
        let points = (1..=n).map(|i| p_min + h * i as f64).collect();
        Ok(RadialGrid {
            points,
            weights: vec![h; n],
            mapping: RadialMapping::Linear { p_min, p_max },
        })
    }

    /// Gauss–Legendre nodes mapped by `p = c(1+x)/(1−x)`.
    pub fn rational_map(scale: f64, n: usize) -> Result<Self> {
        if !(scale > 0.0) || n < 2 {
            return invalid(format!("bad rational grid: scale {scale}, {n} nodes"));
        }
        let rule = gauss_legendre(n)?;
        let points = rule
            .nodes
            .iter()
            .map(|&x| scale * (1.0 + x) / (1.0 - x))
            .collect();
        let weights = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&x, &w)| w * 2.0 * scale / ((1.0 - x) * (1.0 - x)))
            .collect();
        Ok(RadialGrid {
            points,
            weights,
            mapping: RadialMapping::RationalMap { scale },
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `∫ f(p) dp` by the grid rule.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&p, &w)| w * f(p))
            .sum()
    }

    fn label(&self) -> String {
        match self.mapping {
            RadialMapping::Linear { p_min, p_max } => {
                format!("linear[{p_min},{p_max}]x{}", self.len())
            }
            RadialMapping::RationalMap { scale } => format!("rational(c={scale})x{}", self.len()),
        }
    }
}

/// One computed level.
#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    /// Radial quantum number (index within the channel, ascending energy).
    pub v: usize,
    pub l: HalfInt,
    /// `None` for channels degenerate in `m`.
    pub m: Option<HalfInt>,
    pub mu: HalfInt,
    pub energy: f64,
    /// Interior sign changes of the stored eigenvector.
    pub nodes: usize,
    /// Analytic value where one exists.
    pub reference: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverMeta {
    pub method: String,
    pub grid: String,
    pub grid_size: usize,
    pub angular_grid: Option<(usize, usize)>,
    pub tolerance: f64,
    pub z_charge: Option<f64>,
    pub screened: bool,
    pub hermiticity_residual: Option<f64>,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub levels: Vec<Level>,
    pub meta: SolverMeta,
}

impl SpectrumResult {
    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }

    /// Levels of one `m` channel (`None` selects m-degenerate channels).
    pub fn channel(&self, m: Option<HalfInt>) -> Vec<&Level> {
        self.levels.iter().filter(|l| l.m == m).collect()
    }

    pub fn is_clean(&self) -> bool {
        self.meta.flags.is_empty()
    }
}

fn check_sector(l: HalfInt, mu: HalfInt) -> Result<()> {
    MonopoleIndex::new(l, l, mu).map(|_| ())
}

/// `l*` solving `l*(l*+1) = l(l+1) − μ²`.
pub fn effective_l(l: HalfInt, mu: HalfInt) -> f64 {
    let lp = l.value() + 0.5;
    -0.5 + (lp * lp - mu.value() * mu.value()).sqrt()
}

/// `E_{vl} = 2v + l* + 3/2` (ħω = 1); `2v + l + 3/2` at `μ = 0` and
/// `2v + √(l(l+1)) + 1` at `μ = ±1/2`.
pub fn oscillator_energy(v: usize, l: HalfInt, mu: HalfInt) -> Result<f64> {
    check_sector(l, mu)?;
    Ok(2.0 * v as f64 + effective_l(l, mu) + 1.5)
}

/// Unnormalized radial function `p^{l*} e^{−p²/2} L_v^{l*+1/2}(p²)`.
pub fn oscillator_wavefunction(v: usize, l: HalfInt, mu: HalfInt, p: f64) -> Result<f64> {
    check_sector(l, mu)?;
    if !(p >= 0.0) {
        return invalid(format!("radial momentum must be non-negative, got {p}"));
    }
    let ls = effective_l(l, mu);
    Ok(p.powf(ls) * (-0.5 * p * p).exp() * laguerre_poly(v, ls + 0.5, p * p)?)
}

/// Number of spinless oscillator states with `2v + l = N`.
pub fn degeneracy_count(n: u32) -> u64 {
    (0..=n)
        .filter(|l| (n - l) % 2 == 0)
        .map(|l| 2 * l as u64 + 1)
        .sum()
}

/// A group of oscillator states sharing one energy.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelGroup {
    pub energy: f64,
    pub multiplicity: u64,
    pub members: Vec<(usize, HalfInt)>,
}

/// Distinct oscillator energies `≤ e_max` in a helicity sector with their
/// `(2l+1)` multiplicities; energies closer than `1e−9` are merged.
pub fn helicity_levels(mu: HalfInt, e_max: f64) -> Result<Vec<LevelGroup>> {
    let mut states = Vec::new();
    let mut l = mu.abs();
    while oscillator_energy(0, l, mu)? <= e_max {
        let mut v = 0;
        loop {
            let e = oscillator_energy(v, l, mu)?;
            if e > e_max {
                break;
            }
            states.push((e, v, l));
            v += 1;
        }
        l = l + HalfInt::from_twice(2);
    }
    states.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut groups: Vec<LevelGroup> = Vec::new();
    for (e, v, l) in states {
        let mult = l.twice() as u64 + 1;
        match groups.last_mut() {
            Some(g) if (g.energy - e).abs() < 1e-9 => {
                g.multiplicity += mult;
                g.members.push((v, l));
            }
            _ => groups.push(LevelGroup {
                energy: e,
                multiplicity: mult,
                members: vec![(v, l)],
            }),
        }
    }
    Ok(groups)
}

/// Symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    /// Number of eigenvalues strictly below `x` (Sturm sequence).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.diag.len() {
            let b2 = if i == 0 {
                0.0
            } else {
                self.off[i - 1] * self.off[i - 1]
            };
            q = self.diag[i] - x - if i == 0 { 0.0 } else { b2 / q };
            if q == 0.0 {
                q = -f64::EPSILON * (self.diag[i].abs() + x.abs() + 1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection to absolute `tol`.
    pub fn eigenvalue(&self, k: usize, tol: f64) -> Result<f64> {
        if k >= self.diag.len() {
            return invalid(format!("eigenvalue index {k} out of range"));
        }
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..200 {
            if hi - lo <= tol {
                return Ok(0.5 * (lo + hi));
            }
            let mid = 0.5 * (lo + hi);
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Err(Error::NonConvergence(format!(
            "bisection for eigenvalue {k} stalled"
        )))
    }

    /// Normalized eigenvector for a converged eigenvalue by inverse iteration.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.diag.len();
        let shift = lambda + 1e-10 * (1.0 + lambda.abs());
        let mut x = vec![1.0; n];
        for _ in 0..3 {
            // Thomas algorithm on (T − shift) y = x.
            let mut c = vec![0.0; n];
            let mut d = vec![0.0; n];
            let mut denom = self.diag[0] - shift;
            c[0] = if n > 1 { self.off[0] / denom } else { 0.0 };
            d[0] = x[0] / denom;
            for i in 1..n {
                denom = self.diag[i] - shift - self.off[i - 1] * c[i - 1];
                if denom == 0.0 {
                    denom = f64::EPSILON;
                }
                if i + 1 < n {
                    c[i] = self.off[i] / denom;
                }
                d[i] = (x[i] - self.off[i - 1] * d[i - 1]) / denom;
            }
            let mut y = vec![0.0; n];
            y[n - 1] = d[n - 1];
            for i in (0..n - 1).rev() {
                y[i] = d[i] - c[i] * y[i + 1];
            }
            let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            x = y.into_iter().map(|v| v / norm).collect();
        }
        x
    }
}

/// Interior sign changes, ignoring entries below `1e−8` of the maximum.
pub fn count_sign_changes(v: &[f64]) -> usize {
    let peak = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut last = 0.0;
    let mut changes = 0;
    for &x in v {
        if x.abs() <= 1e-8 * peak {
            continue;
        }
        if last != 0.0 && (x > 0.0) != (last > 0.0) {
            changes += 1;
        }
        last = x;
    }
    changes
}

const BISECTION_TOL: f64 = 1e-12;

/// Lowest `count` levels of the oscillator in sector `(l, μ)` by central
/// differences on a linear grid.
pub fn solve_radial_oscillator(
    l: HalfInt,
    mu: HalfInt,
    grid: &RadialGrid,
    count: usize,
) -> Result<SpectrumResult> {
    check_sector(l, mu)?;
    let RadialMapping::Linear { p_min, p_max } = grid.mapping else {
        return invalid("the oscillator solver needs a linear grid");
    };
    if count == 0 || count > grid.len() / 10 {
        return invalid(format!(
            "cannot resolve {count} levels on {} nodes",
            grid.len()
        ));
    }
    let e_max = oscillator_energy(count - 1, l, mu)?;
    if p_max < (2.0 * e_max).sqrt() + 4.0 {
        return invalid(format!(
            "p_max = {p_max} too small for E = {e_max}; need ≥ {}",
            (2.0 * e_max).sqrt() + 4.0
        ));
    }
    if p_min > 1e-2 {
        return invalid(format!(
            "p_min = {p_min} too large; the wall shifts low-l levels"
        ));
    }
    let h = grid.weights[0];
    let barrier = l.value() * (l.value() + 1.0) - mu.value() * mu.value();
    let diag = grid
        .points
        .iter()
        .map(|&p| 1.0 / (h * h) + barrier / (2.0 * p * p) + 0.5 * p * p)
        .collect();
    let off = vec![-0.5 / (h * h); grid.len() - 1];
    let t = SymTridiagonal { diag, off };
    let mut levels = Vec::with_capacity(count);
    let mut flags = Vec::new();
    for v in 0..count {
        let e = t.eigenvalue(v, BISECTION_TOL)?;
        let vec = t.eigenvector(e);
        let nodes = count_sign_changes(&vec);
        if nodes != v {
            flags.push(format!("level {v}: eigenvector has {nodes} nodes"));
        }
        levels.push(Level {
            v,
            l,
            m: None,
            mu,
            energy: e,
            nodes,
            reference: Some(oscillator_energy(v, l, mu)?),
        });
    }
    Ok(SpectrumResult {
        levels,
        meta: SolverMeta {
            method: "finite-difference (second order), Sturm bisection".into(),
            grid: grid.label(),
            grid_size: grid.len(),
            angular_grid: None,
            tolerance: BISECTION_TOL,
            z_charge: None,
            screened: false,
            hermiticity_residual: None,
            flags,
        },
    })
}

/// Options for [`solve_hydrogen_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HydrogenOptions {
    /// Include the spinor-overlap form factor.
    pub screened: bool,
    /// Restrict to one `m` channel; all `m` otherwise.
    pub m: Option<HalfInt>,
}

impl Default for HydrogenOptions {
    fn default() -> Self {
        HydrogenOptions {
            screened: true,
            m: None,
        }
    }
}

/// Cross-hemisphere correction to the form factor, tabulated on the
/// northern and southern nodes of a hemispheric grid.
struct CorrectionTable {
    /// Per `(ip, iq, k)`: `cos γ` and the angular weight times `W`.
    cos_gamma: Vec<f64>,
    factor: Vec<C>,
}

fn correction_table(idx: &MonopoleIndex, grid: &AngularGrid) -> Result<CorrectionTable> {
    if !grid.hemispheric {
        return invalid("the cross-hemisphere correction needs a hemispheric angular grid");
    }
    let helicity = Helicity::from_mu(idx.mu())?;
    let half = grid.n_theta() / 2;
    let (north, south) = grid.theta.split_at(half);
    let (wn, ws) = grid.theta_weights.split_at(half);
    let norm2 = (idx.l().twice() as f64 + 1.0) / (4.0 * PI);
    let k_phase = (idx.m() - idx.mu()).value();
    let mu2 = idx.mu().twice() as f64;
    let n_phi = grid.n_phi();
    let mut cos_gamma = Vec::with_capacity(half * half * n_phi);
    let mut factor = Vec::with_capacity(half * half * n_phi);
    let tag_n = PatchTag::north();
    for (&tp, &wp) in north.iter().zip(wn) {
        let p = MomentumPoint::new(1.0, tp, 0.0)?;
        let zp = helical_section(tag_n, helicity, tp, 0.0)?;
        let dp = wigner_d(idx.l(), idx.m(), idx.mu(), tp);
        for (&tq, &wq) in south.iter().zip(ws) {
            let dq = wigner_d(idx.l(), idx.m(), idx.mu(), tq);
            // Offset by a quarter step so no node pair is antipodal.
            for f in grid.phi.iter().map(|f| f + 0.25 * grid.phi_weight) {
                let q = MomentumPoint::new(1.0, tq, f)?;
                let zq = global_spinor(helicity, tq, f);
                let glob = zp.inner(&zq);
                let patched =
                    cross_patch_form_factor(helicity, &p, &q)?.value * C::from_polar(1.0, mu2 * f);
                let w = patched - glob;
                let ang = 2.0 * PI * wp * wq * grid.phi_weight * norm2 * dp * dq;
                cos_gamma.push(p.unit().dot(&q.unit()));
                factor.push(w * C::from_polar(ang, k_phase * f));
            }
        }
    }
    Ok(CorrectionTable { cos_gamma, factor })
}

/// The northern section continued past the equator; smooth away from the south pole.
fn global_spinor(helicity: Helicity, theta: f64, phi: f64) -> SectionSpinor {
    let z = spinor_from_angles(theta, phi, 0.0);
    if helicity == Helicity::Negative {
        z.dual()
    } else {
        z
    }
}

/// `X(p, q)`: northern `p̂`, southern `q̂` part of the correction element.
fn correction_half(table: &CorrectionTable, pot: &PotentialSpec, p: f64, q: f64) -> Result<C> {
    let a = p * p + q * q;
    let b = 2.0 * p * q;
    let mut s = C::new(0.0, 0.0);
    for (&c, &f) in table.cos_gamma.iter().zip(&table.factor) {
        s += f * pot.fourier_sq(a - b * c)?;
    }
    Ok(s)
}

/// Correction to the partial-wave element `⟨idx| U F |idx⟩(p, q)` beyond its
/// rotation-invariant part, from pairs on opposite hemispheres.
pub fn cross_hemisphere_correction(
    idx: &MonopoleIndex,
    p: f64,
    q: f64,
    pot: &PotentialSpec,
    grid: &AngularGrid,
) -> Result<C> {
    let table = correction_table(idx, grid)?;
    Ok(correction_half(&table, pot, p, q)? + correction_half(&table, pot, q, p)?.conj())
}

/// Bound states of screened hydrogen in channel `l` of helicity sector `mu`,
/// all `m`, with the form factor included.
pub fn solve_hydrogen(
    mu: HalfInt,
    z: f64,
    l: HalfInt,
    grid: &RadialGrid,
    grid_ang: &AngularGrid,
    count: usize,
) -> Result<SpectrumResult> {
    solve_hydrogen_with(mu, z, l, grid, grid_ang, count, HydrogenOptions::default())
}

/// [`solve_hydrogen`] with explicit options.
pub fn solve_hydrogen_with(
    mu: HalfInt,
    z: f64,
    l: HalfInt,
    grid: &RadialGrid,
    grid_ang: &AngularGrid,
    count: usize,
    opts: HydrogenOptions,
) -> Result<SpectrumResult> {
    check_sector(l, mu)?;
    if !(z > 0.0 && z.is_finite()) {
        return invalid(format!("nuclear charge must be positive, got {z}"));
    }
    if grid.len() < 100 {
        return invalid(format!(
            "hydrogen needs at least 100 radial nodes, got {}",
            grid.len()
        ));
    }
    if count == 0 {
        return invalid("count must be positive");
    }
    let helicity = Helicity::from_mu(mu)?;
    let pot = PotentialSpec::Coulomb { z };
    let wave = CoulombPartialWave::new(CoulombProfile::new(l.value(), helicity, opts.screened)?)?;
    let base = landé_matrix(&wave, z, grid);
    let n = grid.len();
    let scale: Vec<f64> = grid
        .points
        .iter()
        .zip(&grid.weights)
        .map(|(&p, &w)| w.sqrt() * p)
        .collect();

    let m_values: Vec<HalfInt> = match opts.m {
        Some(m) => {
            MonopoleIndex::new(l, m, mu)?;
            vec![m]
        }
        None => MonopoleIndex::all_up_to(l, mu)
            .into_iter()
            .filter(|i| i.l() == l)
            .map(|i| i.m())
            .collect(),
    };
    let with_correction = opts.screened && helicity != Helicity::Zero;

    let mut levels = Vec::new();
    let mut flags = Vec::new();
    let mut herm: f64 = 0.0;
    if !with_correction {
        herm = herm.max(max_asymmetry_real(&base));
        let eig = SymmetricEigen::new(base);
        let vecs: Vec<Vec<C>> = (0..n)
            .map(|k| {
                eig.eigenvectors
                    .column(k)
                    .iter()
                    .map(|&x| C::new(x, 0.0))
                    .collect()
            })
            .collect();
        collect_levels(
            eig.eigenvalues.as_slice(),
            &vecs,
            &scale,
            l,
            None,
            mu,
            count,
            &mut levels,
            &mut flags,
        );
    } else {
        for &m in &m_values {
            let idx = MonopoleIndex::new(l, m, mu)?;
            let table = correction_table(&idx, grid_ang)?;
            let rows: Vec<Vec<C>> = (0..n)
                .into_par_iter()
                .map(|i| {
                    (0..n)
                        .map(|j| correction_half(&table, &pot, grid.points[i], grid.points[j]))
                        .collect::<Result<Vec<C>>>()
                })
                .collect::<Result<_>>()?;
            let mut h = DMatrix::<C>::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    let c = rows[i][j] + rows[j][i].conj();
                    h[(i, j)] = C::new(base[(i, j)], 0.0) + c * (scale[i] * scale[j]);
                }
            }
            herm = herm.max(max_asymmetry_complex(&h));
            let eig = SymmetricEigen::new(h);
            let vecs: Vec<Vec<C>> = (0..n)
                .map(|k| eig.eigenvectors.column(k).iter().copied().collect())
                .collect();
            collect_levels(
                eig.eigenvalues.as_slice(),
                &vecs,
                &scale,
                l,
                Some(m),
                mu,
                count,
                &mut levels,
                &mut flags,
            );
        }
    }
    if herm >= 1e-10 {
        flags.push(format!("Hermiticity residual {herm:e}"));
    }
    Ok(SpectrumResult {
        levels,
        meta: SolverMeta {
            method: "Nyström with Landé subtraction".into(),
            grid: grid.label(),
            grid_size: n,
            angular_grid: with_correction.then(|| (grid_ang.n_theta(), grid_ang.n_phi())),
            tolerance: 1e-3,
            z_charge: Some(z),
            screened: opts.screened,
            hermiticity_residual: Some(herm),
            flags,
        },
    })
}

/// Symmetrized Nyström matrix of `½p² + V_l` with the diagonal singularity
/// subtracted against `Q_0` and restored analytically (`∫ Q_0 dq/q = π²/2`).
fn landé_matrix(wave: &CoulombPartialWave, z: f64, grid: &RadialGrid) -> DMatrix<f64> {
    let n = grid.len();
    let (p, w) = (&grid.points, &grid.weights);
    let coef = z / PI;
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = vec![0.0; n];
            let mut sub = 0.0;
            for j in 0..n {
                if j == i {
                    continue;
                }
                let zz = (p[i] * p[i] + p[j] * p[j]) / (2.0 * p[i] * p[j]);
                row[j] = -coef * (w[i] * w[j]).sqrt() * wave.eval(zz);
                sub += w[j] * legendre_q0(zz) / p[j];
            }
            row[i] = 0.5 * p[i] * p[i]
                + coef * (p[i] * sub - p[i] * PI * PI / 2.0 - w[i] * wave.diagonal_limit);
            row
        })
        .collect();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = rows[i][j];
        }
    }
    // The off-diagonal entries are symmetric by construction; enforce bitwise.
    for i in 0..n {
        for j in 0..i {
            m[(i, j)] = m[(j, i)];
        }
    }
    m
}

fn max_asymmetry_real(m: &DMatrix<f64>) -> f64 {
    let mut r: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            r = r.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    r
}

fn max_asymmetry_complex(m: &DMatrix<C>) -> f64 {
    let mut r: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            r = r.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    r
}

#[allow(clippy::too_many_arguments)]
fn collect_levels(
    values: &[f64],
    vectors: &[Vec<C>],
    scale: &[f64],
    l: HalfInt,
    m: Option<HalfInt>,
    mu: HalfInt,
    count: usize,
    levels: &mut Vec<Level>,
    flags: &mut Vec<String>,
) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let label = match m {
        Some(m) => format!("l={l} m={m}"),
        None => format!("l={l}"),
    };
    for (v, &k) in order.iter().take(count).enumerate() {
        let e = values[k];
        let vec = &vectors[k];
        // Remove the global phase, then go back from φ to ψ.
        let pivot = vec
            .iter()
            .copied()
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .unwrap_or(C::new(1.0, 0.0));
        let phase = pivot.conj() / pivot.norm();
        let psi: Vec<f64> = vec
            .iter()
            .zip(scale)
            .map(|(x, s)| (x * phase).re / s)
            .collect();
        let nodes = count_sign_changes(&psi);
        if e >= 0.0 {
            flags.push(format!(
                "{label} level {v}: E = {e} is not bound (spurious)"
            ));
        }
        if nodes != v {
            flags.push(format!("{label} level {v}: eigenvector has {nodes} nodes"));
        }
        levels.push(Level {
            v,
            l,
            m,
            mu,
            energy: e,
            nodes,
            reference: None,
        });
    }
}

/// Rydberg energy `−Z²/2n²` with `n = v + l + 1` at `μ = 0`.
pub fn rydberg_energy(z: f64, v: usize, l: usize) -> f64 {
    let n = (v + l + 1) as f64;
    -z * z / (2.0 * n * n)
}

/// One row of a splitting table.
#[derive(Debug, Clone, PartialEq)]
pub struct SplittingRow {
    pub label: String,
    pub v: usize,
    pub l_ref: HalfInt,
    pub l: HalfInt,
    pub m: Option<HalfInt>,
    pub mu: HalfInt,
    pub e_ref: f64,
    pub e: f64,
    pub delta: f64,
    /// Δ from the refined run, when given.
    pub delta_refined: Option<f64>,
    /// `|Δ − Δ_refined| / |Δ_refined|`.
    pub relative_change: Option<f64>,
}

fn config_key(r: &SpectrumResult) -> (Option<u64>, String) {
    (r.meta.z_charge.map(f64::to_bits), r.meta.method.clone())
}

fn pair_rows(reference: &[SpectrumResult], helical: &[SpectrumResult]) -> Vec<SplittingRow> {
    let mut rows = Vec::new();
    for h in helical.iter().flat_map(|r| &r.levels) {
        let partners = reference.iter().flat_map(|r| &r.levels).filter(|b| {
            if b.v != h.v {
                return false;
            }
            if b.mu == h.mu {
                b.l == h.l && b.m == h.m
            } else {
                (b.l - h.l).abs() == HalfInt::HALF
            }
        });
        for b in partners {
            let m = h.m.map(|m| format!(" m={m}")).unwrap_or_default();
            rows.push(SplittingRow {
                label: format!("v={} l0={} -> l={}{} mu={}", h.v, b.l, h.l, m, h.mu),
                v: h.v,
                l_ref: b.l,
                l: h.l,
                m: h.m,
                mu: h.mu,
                e_ref: b.energy,
                e: h.energy,
                delta: h.energy - b.energy,
                delta_refined: None,
                relative_change: None,
            });
        }
    }
    rows
}

/// Pair every helical level `(v, l, m, μ)` with the reference level of the
/// same `v` and `|l − l₀| = 1/2` (or the identical channel when the two sets
/// share `μ`), and report `Δ = E − E₀`. With `refined` given, each `Δ` is
/// compared with the same pairing on the refined runs.
pub fn splitting_report(
    reference: &[SpectrumResult],
    helical: &[SpectrumResult],
    refined: Option<(&[SpectrumResult], &[SpectrumResult])>,
) -> Result<Vec<SplittingRow>> {
    let all: Vec<&SpectrumResult> = reference.iter().chain(helical).collect();
    let Some(first) = all.first() else {
        return invalid("no spectra to compare");
    };
    let key = config_key(first);
    if all.iter().any(|r| config_key(r) != key) {
        return invalid("spectra differ in charge or method");
    }
    let mut rows = pair_rows(reference, helical);
    if let Some((rr, rh)) = refined {
        if rr.iter().chain(rh).any(|r| config_key(r) != key) {
            return invalid("refined spectra differ in charge or method");
        }
        let fine = pair_rows(rr, rh);
        for row in &mut rows {
            if let Some(f) = fine.iter().find(|f| f.label == row.label) {
                row.delta_refined = Some(f.delta);
                row.relative_change = Some((row.delta - f.delta).abs() / f.delta.abs());
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn hi(twice: i32) -> HalfInt {
        HalfInt::from_twice(twice)
    }

    #[test]
    fn radial_grids_integrate_gaussian_moment() {
        let exact = PI.sqrt() / 4.0;
        let r = RadialGrid::rational_map(1.0, 200).unwrap();
        assert!(r.points.windows(2).all(|w| w[1] > w[0]));
        assert_relative_eq!(
            r.integrate(|p| p * p * (-p * p).exp()),
            exact,
            epsilon = 1e-8
        );
        let l = RadialGrid::linear(0.0, 12.0, 2000).unwrap();
        assert!(l.points.windows(2).all(|w| w[1] > w[0]));
        assert_relative_eq!(
            l.integrate(|p| p * p * (-p * p).exp()),
            exact,
            epsilon = 1e-8
        );
        assert!(RadialGrid::linear(2.0, 1.0, 10).is_err());
    }

    #[test]
    fn oscillator_energy_examples() {
        assert_eq!(oscillator_energy(0, hi(0), hi(0)).unwrap(), 1.5);
        assert_relative_eq!(
            oscillator_energy(0, hi(1), hi(1)).unwrap(),
            1.0 + 3f64.sqrt() / 2.0,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            oscillator_energy(1, hi(3), hi(1)).unwrap(),
            3.0 + 15f64.sqrt() / 2.0,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            oscillator_energy(1, hi(3), hi(1)).unwrap(),
            4.936_491_7,
            epsilon = 1e-7
        );
        assert!(oscillator_energy(0, hi(0), hi(1)).is_err());
        assert!(oscillator_energy(0, hi(1), hi(0)).is_err());
        for l2 in [1, 3, 5, 7, 9] {
            let l = hi(l2);
            let ls = effective_l(l, hi(1));
            assert_relative_eq!(
                ls,
                (l.value() * (l.value() + 1.0)).sqrt() - 0.5,
                epsilon = 1e-14
            );
            assert!((ls * (ls + 1.0) - (l.value() * (l.value() + 1.0) - 0.25)).abs() < 1e-14);
        }
    }

    #[test]
    fn oscillator_wavefunction_nodes() {
        let fine: Vec<f64> = (1..4000).map(|i| i as f64 * 0.002).collect();
        for l2 in [1, 3, 5] {
            let vals: Vec<f64> = fine
                .iter()
                .map(|&p| oscillator_wavefunction(0, hi(l2), hi(1), p).unwrap())
                .collect();
            assert_eq!(count_sign_changes(&vals), 0);
        }
        let vals: Vec<f64> = fine
            .iter()
            .map(|&p| oscillator_wavefunction(2, hi(1), hi(1), p).unwrap())
            .collect();
        assert_eq!(count_sign_changes(&vals), 2);
    }

    #[test]
    fn degeneracy_examples() {
        assert_eq!(degeneracy_count(0), 1);
        assert_eq!(degeneracy_count(2), 6);
        for n in 0..12 {
            assert_eq!(degeneracy_count(n), ((n + 1) * (n + 2) / 2) as u64);
        }
        let a = oscillator_energy(1, hi(1), hi(1)).unwrap();
        let b = oscillator_energy(0, hi(5), hi(1)).unwrap();
        assert_relative_eq!(
            b - a,
            (35f64.sqrt() - 3f64.sqrt()) / 2.0 - 2.0,
            epsilon = 1e-14
        );
        assert!(b - a > 0.09);
        // Spinless groups reproduce the (N+1)(N+2)/2 pattern; the helical ones split.
        let g0 = helicity_levels(hi(0), 5.6).unwrap();
        assert_eq!(
            g0.iter().map(|g| g.multiplicity).collect::<Vec<_>>(),
            vec![1, 3, 6, 10, 15]
        );
        let g1 = helicity_levels(hi(1), 12.0).unwrap();
        assert!(g1.iter().all(|g| g.members.len() == 1));
    }

    #[test]
    fn sturm_count_and_vectors() {
        // 1D Dirichlet Laplacian: eigenvalues 2 − 2cos(kπ/(n+1)).
        let n = 50;
        let t = SymTridiagonal {
            diag: vec![2.0; n],
            off: vec![-1.0; n - 1],
        };
        for k in 0..5 {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * PI / (n as f64 + 1.0)).cos();
            let e = t.eigenvalue(k, 1e-14).unwrap();
            assert_relative_eq!(e, exact, epsilon = 1e-13);
            assert_eq!(count_sign_changes(&t.eigenvector(e)), k);
        }
        assert_eq!(t.count_below(0.0), 0);
        assert_eq!(t.count_below(4.1), n);
    }

    #[test]
    fn oscillator_spinless_examples() {
        let grid = RadialGrid::linear(0.0, 12.0, 8000).unwrap();
        let r = solve_radial_oscillator(hi(0), hi(0), &grid, 3).unwrap();
        for (lvl, exact) in r.levels.iter().zip([1.5, 3.5, 5.5]) {
            assert!(
                (lvl.energy - exact).abs() < 1e-5,
                "{} vs {exact}",
                lvl.energy
            );
            assert_eq!(lvl.nodes, lvl.v);
        }
        assert!(r.is_clean());
    }

    #[test]
    fn oscillator_helical_example() {
        let grid = RadialGrid::linear(0.0, 12.0, 20000).unwrap();
        let r = solve_radial_oscillator(hi(1), hi(1), &grid, 3).unwrap();
        for (lvl, k) in r.levels.iter().zip(0..) {
            let exact = 1.0 + 3f64.sqrt() / 2.0 + 2.0 * k as f64;
            assert!(
                (lvl.energy - exact).abs() < 1e-4,
                "{} vs {exact}",
                lvl.energy
            );
        }
    }

    #[test]
    fn oscillator_second_order_convergence() {
        let err = |n: usize| {
            let grid = RadialGrid::linear(0.0, 12.0, n).unwrap();
            (solve_radial_oscillator(hi(2), hi(0), &grid, 1)
                .unwrap()
                .levels[0]
                .energy
                - 2.5)
                .abs()
        };
        // Halving the spacing: n+1 → 2(n+1).
        let ratio = err(399) / err(799);
        assert!((ratio - 4.0).abs() < 0.3, "{ratio}");
    }

    #[test]
    fn oscillator_box_enlargement_does_not_raise_levels() {
        let small = solve_radial_oscillator(
            hi(1),
            hi(1),
            &RadialGrid::linear(0.0, 10.0, 2000).unwrap(),
            3,
        )
        .unwrap();
        let large = solve_radial_oscillator(
            hi(1),
            hi(1),
            &RadialGrid::linear(0.0, 14.0, 2800).unwrap(),
            3,
        )
        .unwrap();
        for (a, b) in small.levels.iter().zip(&large.levels) {
            assert!(b.energy <= a.energy + 1e-5);
        }
    }

    #[test]
    fn oscillator_rejects_bad_grids() {
        assert!(solve_radial_oscillator(
            hi(0),
            hi(0),
            &RadialGrid::linear(0.0, 4.0, 2000).unwrap(),
            3
        )
        .is_err());
        assert!(solve_radial_oscillator(
            hi(0),
            hi(0),
            &RadialGrid::linear(0.5, 12.0, 2000).unwrap(),
            3
        )
        .is_err());
        assert!(solve_radial_oscillator(
            hi(0),
            hi(0),
            &RadialGrid::rational_map(1.0, 200).unwrap(),
            3
        )
        .is_err());
    }

    #[test]
    fn splitting_report_examples() {
        let grid = RadialGrid::linear(0.0, 12.0, 1000).unwrap();
        let a = solve_radial_oscillator(hi(2), hi(0), &grid, 2).unwrap();
        let same =
            splitting_report(std::slice::from_ref(&a), std::slice::from_ref(&a), None).unwrap();
        assert!(!same.is_empty() && same.iter().all(|r| r.delta == 0.0));
        let b = solve_radial_oscillator(hi(1), hi(1), &grid, 1).unwrap();
        let rows =
            splitting_report(std::slice::from_ref(&a), std::slice::from_ref(&b), None).unwrap();
        let analytic = (1.0 + 3f64.sqrt() / 2.0) - 2.5;
        assert_relative_eq!(analytic, -0.634, epsilon = 1e-3);
        assert!((rows[0].delta - analytic).abs() < 1e-3);
    }

    #[test]
    fn hydrogen_ground_state_z1() {
        let grid = RadialGrid::rational_map(1.0, 200).unwrap();
        let ang = AngularGrid::hemispheric(16, 16).unwrap();
        let r = solve_hydrogen(hi(0), 1.0, hi(0), &grid, &ang, 3).unwrap();
        for lvl in &r.levels {
            let exact = rydberg_energy(1.0, lvl.v, 0);
            assert!(
                ((lvl.energy - exact) / exact).abs() < 1e-3,
                "{} vs {exact}",
                lvl.energy
            );
            assert_eq!(lvl.nodes, lvl.v);
        }
        assert!(r.meta.hermiticity_residual.unwrap() < 1e-10);
    }

    #[test]
    fn spinless_screening_is_bitwise_identity() {
        let grid = RadialGrid::rational_map(1.0, 120).unwrap();
        let ang = AngularGrid::hemispheric(8, 8).unwrap();
        let a = solve_hydrogen_with(
            hi(0),
            1.0,
            hi(2),
            &grid,
            &ang,
            3,
            HydrogenOptions {
                screened: true,
                m: None,
            },
        )
        .unwrap();
        let b = solve_hydrogen_with(
            hi(0),
            1.0,
            hi(2),
            &grid,
            &ang,
            3,
            HydrogenOptions {
                screened: false,
                m: None,
            },
        )
        .unwrap();
        assert_eq!(a.energies(), b.energies());
    }

    #[test]
    fn split_kernel_matches_direct_quadrature() {
        // Global partial wave + cross-hemisphere correction against the direct
        // double angular quadrature of the patched kernel.
        let coul = PotentialSpec::Coulomb { z: 1.0 };
        let grid = AngularGrid::hemispheric(48, 48).unwrap();
        for (l, m, mu) in [
            (0.5, 0.5, 0.5),
            (1.5, -0.5, 0.5),
            (0.5, -0.5, -0.5),
            (1.5, 1.5, -0.5),
        ] {
            let ix = MonopoleIndex::from_f64(l, m, mu).unwrap();
            let h = Helicity::from_mu(ix.mu()).unwrap();
            let (p, q) = (1.0, 2.5);
            let direct =
                crate::screening::partial_wave_matrix_element(&ix, &ix, p, q, &coul, &grid)
                    .unwrap();
            let wave = CoulombPartialWave::new(CoulombProfile::new(l, h, true).unwrap()).unwrap();
            let split = crate::screening::coulomb_partial_wave_kernel(&wave, 1.0, p, q)
                + cross_hemisphere_correction(&ix, p, q, &coul, &grid).unwrap();
            let scale = direct.refined.norm();
            assert!(
                (direct.refined.re - split.re).abs() < 1e-4 * scale,
                "{ix}: {} vs {}",
                direct.refined,
                split
            );
            assert!(split.im.abs() < 1e-12 * scale);
            // The direct imaginary part is discretization error of second order.
            assert!(
                direct.value.im.abs() > 1.8 * direct.refined.im.abs(),
                "{ix}: {} {}",
                direct.value,
                direct.refined
            );
        }
    }
}
