//! Spinor-overlap form factors and the helicity-screened potential kernel.
//!
//! A Fourier component `U(p−q)` of an external potential acting on a
//! helicity-carrying particle is weighted by the overlap of the section
//! spinors at the two momenta. Within one patch this is `⟨z(p)|z(q)⟩`; for a
//! pair on opposite hemispheres the straight segment from `p` to `q` is cut
//! at its equator crossing `k_E` and the pieces are glued with the patch
//! transition factor:
//!
//! ```text
//! F_NS(p, q) = ⟨z_N(p)|z_N(k_E)⟩ · ⟨z_N(k_E)|z_S(k_E)⟩ · ⟨z_S(k_E)|z_S(q)⟩
//! F_SN(p, q) = conj F_NS(q, p)
//! ```
//!
//! Harmonics are paired with the patch of their own argument, so the kernel
//! together with `Y^N` / `Y^S` is gauge covariant.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::gauge_field::{
    line_integral, transition_function, Coupling, MomentumPoint, Patch, PatchTag, Vec3,
};
use crate::hopf::{helical_section, Helicity};
use crate::monopole_basis::{monopole_harmonic_on, AngularGrid, MonopoleIndex};
use crate::specfun::{gauss_legendre, jacobi_poly, legendre_q0, QuadratureRule};

type C = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormFactorKind {
    Overlap,
    PhaseIntegral,
    CrossPatch,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormFactor {
    pub value: C,
    pub kind: FormFactorKind,
}

/// Spherically symmetric external potential, described by its Fourier
/// transform `U(q) = (2π)^{−3} ∫ e^{−iq·r} U(r) d³r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialSpec {
    /// `U(r) = −Z/r`.
    Coulomb { z: f64 },
    /// `U(r) = −Z e^{−κr}/r`.
    Yukawa { z: f64, kappa: f64 },
    /// `U(r) = V₀ exp(−r²/2σ²)`.
    Gaussian { v0: f64, sigma: f64 },
    /// Contact interaction with a constant transform.
    Constant { value: f64 },
    /// `U(r) = r²/2`; its transform is a distribution, handled by the
    /// finite-difference oscillator solver instead of a kernel.
    HarmonicOscillator,
}

impl PotentialSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            PotentialSpec::Coulomb { z } => z > 0.0 && z.is_finite(),
            PotentialSpec::Yukawa { z, kappa } => z.is_finite() && kappa > 0.0,
            PotentialSpec::Gaussian { v0, sigma } => v0.is_finite() && sigma > 0.0,
            PotentialSpec::Constant { value } => value.is_finite(),
            PotentialSpec::HarmonicOscillator => true,
        };
        if ok {
            Ok(())
        } else {
            invalid(format!("invalid potential parameters: {self:?}"))
        }
    }

    /// Whether `U(q)` diverges as `q → 0`.
    pub fn is_singular(&self) -> bool {
        matches!(self, PotentialSpec::Coulomb { .. })
    }

    /// `U(q)` as a function of `q²`.
    pub fn fourier_sq(&self, q2: f64) -> Result<f64> {
        match *self {
            PotentialSpec::Coulomb { z } => {
                if q2 <= 0.0 {
                    return Err(Error::Singular("Coulomb transform at q = 0".into()));
                }
                Ok(-z / (2.0 * PI * PI * q2))
            }
            PotentialSpec::Yukawa { z, kappa } => Ok(-z / (2.0 * PI * PI * (q2 + kappa * kappa))),
            PotentialSpec::Gaussian { v0, sigma } => {
                Ok(v0 * sigma.powi(3) * (2.0 * PI).powf(-1.5) * (-0.5 * q2 * sigma * sigma).exp())
            }
            PotentialSpec::Constant { value } => Ok(value),
            PotentialSpec::HarmonicOscillator => {
                invalid("the oscillator potential has no pointwise Fourier kernel")
            }
        }
    }

    pub fn fourier(&self, q: f64) -> Result<f64> {
        self.fourier_sq(q * q)
    }
}

fn coupling(helicity: Helicity) -> Coupling {
    Coupling::new(1.0, helicity.mu().value())
}

/// `⟨z(p)|z(q)⟩` for sections of one patch (identically 1 at zero helicity).
pub fn overlap_form_factor(
    tag: PatchTag,
    helicity: Helicity,
    p: &MomentumPoint,
    q: &MomentumPoint,
) -> Result<FormFactor> {
    tag.check(p.theta)?;
    tag.check(q.theta)?;
    let value = match helicity {
        Helicity::Zero => C::new(1.0, 0.0),
        h => helical_section(tag, h, p.theta, p.phi)?
            .inner(&helical_section(tag, h, q.theta, q.phi)?),
    };
    Ok(FormFactor {
        value,
        kind: FormFactorKind::Overlap,
    })
}

/// `exp(i e ∫_p^q A·dk)` along the straight segment from `p` to `q` with
/// `eg = μ`. The phase matches `arg⟨z(p)|z(q)⟩` for the same pair.
pub fn berry_phase_form_factor(
    tag: PatchTag,
    helicity: Helicity,
    p: &MomentumPoint,
    q: &MomentumPoint,
    steps: usize,
) -> Result<FormFactor> {
    let c = coupling(helicity);
    let phase = if c.g == 0.0 {
        // Still validates the path.
        line_integral(tag, p, q, c, steps)?;
        0.0
    } else {
        c.e * line_integral(tag, p, q, c, steps)?
    };
    Ok(FormFactor {
        value: C::from_polar(1.0, phase),
        kind: FormFactorKind::PhaseIntegral,
    })
}

fn crossing_vector(p: &Vec3, q: &Vec3) -> Result<Vec3> {
    if p.z * q.z >= 0.0 {
        return invalid("segment does not cross the equator strictly");
    }
    let k = (q * p.z - p * q.z) / (p.z - q.z);
    if k.norm() <= 1e-14 * p.norm().max(q.norm()) {
        return Err(Error::Singular(
            "segment crosses the equator at the origin".into(),
        ));
    }
    Ok(k)
}

/// The point where the segment `[q, p]` meets the plane `k_z = 0`.
pub fn equator_crossing(p: &MomentumPoint, q: &MomentumPoint) -> Result<MomentumPoint> {
    MomentumPoint::from_cartesian(crossing_vector(&p.cartesian(), &q.cartesian())?)
}

/// Azimuth `φ_NS = atan2(k_y, k_x)` of the equator crossing.
pub fn transition_phase(p: &MomentumPoint, q: &MomentumPoint) -> Result<f64> {
    let k = crossing_vector(&p.cartesian(), &q.cartesian())?;
    Ok(k.y.atan2(k.x))
}

/// `F_NS(p, q)` for `p` on the northern and `q` on the southern hemisphere.
///
/// A point exactly on the equator counts as northern; for such `p` the
/// crossing is `p` itself.
pub fn cross_patch_form_factor(
    helicity: Helicity,
    p: &MomentumPoint,
    q: &MomentumPoint,
) -> Result<FormFactor> {
    let (pv, qv) = (p.cartesian(), q.cartesian());
    if pv.z < 0.0 || qv.z >= 0.0 {
        return invalid("cross-patch form factor needs p north (p_z ≥ 0) and q south (q_z < 0)");
    }
    if helicity == Helicity::Zero {
        return Ok(FormFactor {
            value: C::new(1.0, 0.0),
            kind: FormFactorKind::CrossPatch,
        });
    }
    let k = if pv.z == 0.0 {
        *p
    } else {
        equator_crossing(p, q)?
    };
    let (n, s) = (PatchTag::north(), PatchTag::south());
    let zp = helical_section(n, helicity, p.theta, p.phi)?;
    let zkn = helical_section(n, helicity, k.theta, k.phi)?;
    let zks = helical_section(s, helicity, k.theta, k.phi)?;
    let zq = helical_section(s, helicity, q.theta, q.phi)?;
    let value = zp.inner(&zkn) * zkn.inner(&zks) * zks.inner(&zq);
    Ok(FormFactor {
        value,
        kind: FormFactorKind::CrossPatch,
    })
}

/// `F_SN(p, q) = conj F_NS(q, p)` for `p` south and `q` north.
pub fn cross_patch_form_factor_sn(
    helicity: Helicity,
    p: &MomentumPoint,
    q: &MomentumPoint,
) -> Result<FormFactor> {
    let f = cross_patch_form_factor(helicity, q, p)?;
    Ok(FormFactor {
        value: f.value.conj(),
        kind: FormFactorKind::CrossPatch,
    })
}

/// The transition factor `⟨z_N|z_S⟩ = e^{−2iμφ}` on the equator.
pub fn patch_transition_factor(helicity: Helicity, phi: f64) -> C {
    transition_function(phi, -(helicity.mu().twice() as i64))
}

/// The form factor for an arbitrary pair, with patches assigned by hemisphere.
pub fn form_factor(helicity: Helicity, p: &MomentumPoint, q: &MomentumPoint) -> Result<FormFactor> {
    match (Patch::for_point(p), Patch::for_point(q)) {
        (Patch::North, Patch::North) => overlap_form_factor(PatchTag::north(), helicity, p, q),
        (Patch::South, Patch::South) => overlap_form_factor(PatchTag::south(), helicity, p, q),
        (Patch::North, Patch::South) => cross_patch_form_factor(helicity, p, q),
        (Patch::South, Patch::North) => cross_patch_form_factor_sn(helicity, p, q),
    }
}

/// `U(p−q) · F(p, q)`.
pub fn screened_kernel(
    p: &MomentumPoint,
    q: &MomentumPoint,
    pot: &PotentialSpec,
    helicity: Helicity,
) -> Result<C> {
    let d2 = (p.cartesian() - q.cartesian()).norm_squared();
    if pot.is_singular() && d2 == 0.0 {
        return Err(Error::Singular("Coulomb kernel at p = q".into()));
    }
    let u = pot.fourier_sq(d2)?;
    Ok(form_factor(helicity, p, q)?.value * u)
}

/// A quadrature value together with its refinement check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixElement {
    pub value: C,
    pub refined: C,
    pub abs_change: f64,
    pub converged: bool,
}

const ELEMENT_REL_TOL: f64 = 1e-6;
const ELEMENT_ABS_FLOOR: f64 = 1e-12;

struct NodeData {
    point: MomentumPoint,
    weight: f64,
    y: C,
}

fn node_data(
    idx: &MonopoleIndex,
    radius: f64,
    grid: &AngularGrid,
    phi_shift: f64,
) -> Result<Vec<NodeData>> {
    grid.points()
        .map(|(t, f, w)| {
            let f = f + phi_shift;
            let point = MomentumPoint::new(radius, t, f)?;
            let y = monopole_harmonic_on(Patch::for_theta(t), idx, t, f)?;
            Ok(NodeData {
                point,
                weight: w,
                y,
            })
        })
        .collect()
}

fn direct_element(
    row: &MonopoleIndex,
    col: &MonopoleIndex,
    p: f64,
    q: f64,
    pot: &PotentialSpec,
    grid: &AngularGrid,
) -> Result<C> {
    let helicity = Helicity::from_mu(row.mu())?;
    // Offsetting the second grid by a quarter step keeps node pairs away from
    // coincident and antipodal directions.
    let left = node_data(row, p, grid, 0.0)?;
    let right = node_data(col, q, grid, 0.5 * grid.phi_weight / 2.0)?;
    let mut total = C::new(0.0, 0.0);
    for a in &left {
        let mut inner = C::new(0.0, 0.0);
        for b in &right {
            inner += screened_kernel(&a.point, &b.point, pot, helicity)? * b.y * b.weight;
        }
        total += a.y.conj() * a.weight * inner;
    }
    Ok(total)
}

/// `∫∫ Y*_row(p̂) U(p−q) F(p,q) Y_col(q̂) dΩ_p dΩ_q` by direct double quadrature,
/// repeated on a refined grid. Harmonics are taken in the gauge of the patch
/// containing their argument.
///
/// `converged` requires the two values to agree to a relative `1e−6`
/// (absolute `1e−12` for elements that vanish).
pub fn partial_wave_matrix_element(
    row: &MonopoleIndex,
    col: &MonopoleIndex,
    p: f64,
    q: f64,
    pot: &PotentialSpec,
    grid: &AngularGrid,
) -> Result<MatrixElement> {
    if row.mu() != col.mu() {
        return invalid(format!(
            "matrix element across helicity sectors: {row} vs {col}"
        ));
    }
    pot.validate()?;
    if !(p > 0.0 && q > 0.0) {
        return invalid("radial momenta must be positive");
    }
    if pot.is_singular() && p == q {
        return Err(Error::Singular(
            "direct quadrature of the Coulomb kernel needs p ≠ q".into(),
        ));
    }
    let value = direct_element(row, col, p, q, pot, grid)?;
    let refined = direct_element(row, col, p, q, pot, &grid.refined()?)?;
    let abs_change = (value - refined).norm();
    let converged =
        abs_change <= ELEMENT_REL_TOL * refined.norm() || abs_change <= ELEMENT_ABS_FLOOR;
    Ok(MatrixElement {
        value,
        refined,
        abs_change,
        converged,
    })
}

/// Angular profile `f_l(cos γ)` of the rotation-invariant part of the
/// partial-wave Coulomb kernel, written as a function of `u = cos(γ/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoulombProfile {
    /// Jacobi degree and parameters of the polynomial factor.
    degree: usize,
    beta: f64,
    /// Power of `u` in front of the polynomial.
    u_power: i32,
}

impl CoulombProfile {
    /// `screened = false` drops the form factor and keeps the bare
    /// `d^l_{μμ}(γ)` of the monopole harmonics.
    pub fn new(l: f64, helicity: Helicity, screened: bool) -> Result<Self> {
        let mu = helicity.mu().value().abs();
        let k = l - mu;
        if k < 0.0 || (k - k.round()).abs() > 1e-12 {
            return invalid(format!("l = {l} incompatible with μ = {}", helicity.mu()));
        }
        let degree = k.round() as usize;
        Ok(if mu == 0.0 {
            CoulombProfile {
                degree,
                beta: 0.0,
                u_power: 0,
            }
        } else {
            CoulombProfile {
                degree,
                beta: 1.0,
                u_power: if screened { 2 } else { 1 },
            }
        })
    }

    /// `g(u)` with `x = 2u² − 1`; `g(1) = 1`. Valid for `u > 1` as the
    /// analytic continuation.
    pub fn eval_u(&self, u: f64) -> f64 {
        let x = 2.0 * u * u - 1.0;
        u.powi(self.u_power)
            * jacobi_poly(self.degree, 0.0, self.beta, x).expect("finite arguments")
    }
}

const PROFILE_NODES: usize = 64;
const DIRECT_THRESHOLD: f64 = 1.1;

/// Evaluator of `Q̃_l(z) = ½ ∫_{−1}^{1} f_l(x)/(z − x) dx` for `z > 1`.
///
/// At zero helicity `f_l = P_l` and `Q̃_l = Q_l`, the Legendre function of
/// the second kind.
#[derive(Debug, Clone)]
pub struct CoulombPartialWave {
    profile: CoulombProfile,
    u_nodes: Vec<f64>,
    u_weights: Vec<f64>,
    g_nodes: Vec<f64>,
    /// `lim_{z→1} (Q̃_l(z) − Q_0(z))`.
    pub diagonal_limit: f64,
}

impl CoulombPartialWave {
    pub fn new(profile: CoulombProfile) -> Result<Self> {
        let rule: QuadratureRule = gauss_legendre(PROFILE_NODES + 2 * profile.degree)?;
        let (u_nodes, u_weights) = rule.mapped(0.0, 1.0);
        let g_nodes: Vec<f64> = u_nodes.iter().map(|&u| profile.eval_u(u)).collect();
        let diagonal_limit = -u_nodes
            .iter()
            .zip(&u_weights)
            .zip(&g_nodes)
            .map(|((&u, &w), &g)| w * (1.0 - g) * u / (1.0 - u * u))
            .sum::<f64>();
        Ok(CoulombPartialWave {
            profile,
            u_nodes,
            u_weights,
            g_nodes,
            diagonal_limit,
        })
    }

    pub fn profile(&self) -> CoulombProfile {
        self.profile
    }

    pub fn eval(&self, z: f64) -> f64 {
        debug_assert!(z > 1.0);
        let nodes = self.u_nodes.iter().zip(&self.u_weights).zip(&self.g_nodes);
        if z > DIRECT_THRESHOLD {
            // ½∫ f/(z−x) dx with x = 2u²−1, dx = 4u du.
            nodes
                .map(|((&u, &w), &g)| w * 2.0 * u * g / (z + 1.0 - 2.0 * u * u))
                .sum()
        } else {
            let uz = (0.5 * (z + 1.0)).sqrt();
            let gz = self.profile.eval_u(uz);
            let rest: f64 = nodes
                .map(|((&u, &w), &g)| w * (gz - g) * u / (uz * uz - u * u))
                .sum();
            gz * legendre_q0(z) - rest
        }
    }
}

/// Rotation-invariant partial-wave Coulomb kernel
/// `V_l(p, q) = −(Z / πpq) Q̃_l((p² + q²)/2pq)`.
pub fn coulomb_partial_wave_kernel(
    wave: &CoulombPartialWave,
    z_charge: f64,
    p: f64,
    q: f64,
) -> f64 {
    let z = (p * p + q * q) / (2.0 * p * q);
    -z_charge / (PI * p * q) * wave.eval(z)
}
