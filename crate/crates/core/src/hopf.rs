//! Spinor coordinates on S³, the Hopf projection and its local sections.
//!
//! A point of S³ is a normalized pair `z = (z₁, z₂)`; the projection
//! `n = z†σz` forgets the overall U(1) phase. The two sections used
//! throughout the crate are
//!
//! ```text
//! z_N = (cos θ/2, sin θ/2 · e^{iφ})          regular away from θ = π
//! z_S = (cos θ/2 · e^{−iφ}, sin θ/2)         regular away from θ = 0
//! ```
//!
//! related by `z_S = e^{−iφ} z_N`. Negative helicity uses the conjugate
//! spinor `z̄ = (−z₂*, z₁*)`, for which `σ·p̂ z̄ = −z̄`.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::gauge_field::{Patch, PatchTag, Vec3};
use crate::monopole_basis::{AngularGrid, HalfInt};

type C = Complex64;

/// Helicity sector `μ ∈ {0, +1/2, −1/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Helicity {
    Zero,
    Positive,
    Negative,
}

impl Helicity {
    pub fn from_mu(mu: HalfInt) -> Result<Self> {
        match mu.twice() {
            0 => Ok(Helicity::Zero),
            1 => Ok(Helicity::Positive),
            -1 => Ok(Helicity::Negative),
            _ => invalid(format!("helicity μ = {mu} not in {{0, ±1/2}}")),
        }
    }

    /// Helicity from the sign `±1` of `σ·p̂`.
    pub fn from_sign(sign: i32) -> Result<Self> {
        match sign {
            1 => Ok(Helicity::Positive),
            -1 => Ok(Helicity::Negative),
            _ => invalid(format!("helicity sign must be ±1, got {sign}")),
        }
    }

    pub fn mu(self) -> HalfInt {
        match self {
            Helicity::Zero => HalfInt::ZERO,
            Helicity::Positive => HalfInt::HALF,
            Helicity::Negative => HalfInt::MINUS_HALF,
        }
    }

    pub fn sign(self) -> i32 {
        self.mu().twice()
    }
}

/// A point on S³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionSpinor {
    pub z1: C,
    pub z2: C,
}

impl SectionSpinor {
    /// Build from components; the pair must be normalized to within `1e−13`.
    pub fn new(z1: C, z2: C) -> Result<Self> {
        let n = z1.norm_sqr() + z2.norm_sqr();
        if (n - 1.0).abs() > 1e-13 {
            return invalid(format!("spinor not normalized: |z|² = {n}"));
        }
        Ok(SectionSpinor { z1, z2 })
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &SectionSpinor) -> C {
        self.z1.conj() * other.z1 + self.z2.conj() * other.z2
    }

    /// `z̄ = (−z₂*, z₁*)`.
    pub fn dual(&self) -> SectionSpinor {
        SectionSpinor {
            z1: -self.z2.conj(),
            z2: self.z1.conj(),
        }
    }

    /// Multiply by a phase `e^{iχ}`.
    pub fn rephase(&self, chi: f64) -> SectionSpinor {
        let u = C::from_polar(1.0, chi);
        SectionSpinor {
            z1: u * self.z1,
            z2: u * self.z2,
        }
    }

    pub fn theta(&self) -> f64 {
        2.0 * self.z2.norm().atan2(self.z1.norm())
    }

    /// Phase `α` of `z₁`.
    pub fn alpha(&self) -> f64 {
        self.z1.arg()
    }

    /// Phase `ξ = φ + α` of `z₂`.
    pub fn xi(&self) -> f64 {
        self.z2.arg()
    }

    pub fn as_vector(&self) -> Vector2<C> {
        Vector2::new(self.z1, self.z2)
    }

    pub fn from_vector(v: &Vector2<C>) -> SectionSpinor {
        SectionSpinor { z1: v[0], z2: v[1] }
    }
}

/// `z = (cos(θ/2) e^{iα}, sin(θ/2) e^{i(φ+α)})`.
pub fn spinor_from_angles(theta: f64, phi: f64, alpha: f64) -> SectionSpinor {
    let (s, c) = (0.5 * theta).sin_cos();
    SectionSpinor {
        z1: C::from_polar(c, alpha),
        z2: C::from_polar(s, phi + alpha),
    }
}

/// `n = z†σz`.
pub fn hopf_project(z: &SectionSpinor) -> Vec3 {
    let cross = z.z1.conj() * z.z2;
    Vec3::new(
        2.0 * cross.re,
        2.0 * cross.im,
        z.z1.norm_sqr() - z.z2.norm_sqr(),
    )
}

/// Local spin `s = z†(σ/2)z`.
pub fn spin_field(z: &SectionSpinor) -> Vec3 {
    hopf_project(z) * 0.5
}

/// Components of the regular connection one-form on S³ in the `(θ, α, ξ)`
/// frame; the form itself is `ω_α² dα + ω_ξ² dξ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionComponents {
    pub theta: f64,
    pub alpha: f64,
    pub xi: f64,
}

pub fn connection_components(theta: f64) -> ConnectionComponents {
    ConnectionComponents {
        theta: 0.0,
        alpha: (0.5 * theta).cos(),
        xi: (0.5 * theta).sin(),
    }
}

/// Positive-helicity section on a patch (`α = 0` north, `α = −φ` south).
pub fn section(tag: PatchTag, theta: f64, phi: f64) -> Result<SectionSpinor> {
    tag.check(theta)?;
    Ok(match tag.patch {
        Patch::North => spinor_from_angles(theta, phi, 0.0),
        Patch::South => spinor_from_angles(theta, phi, -phi),
    })
}

/// Section for the given helicity; the negative sector uses the dual spinor.
/// `Helicity::Zero` is rejected since it carries no spinor.
pub fn helical_section(
    tag: PatchTag,
    helicity: Helicity,
    theta: f64,
    phi: f64,
) -> Result<SectionSpinor> {
    let z = section(tag, theta, phi)?;
    match helicity {
        Helicity::Positive => Ok(z),
        Helicity::Negative => Ok(z.dual()),
        Helicity::Zero => invalid("helicity zero has no section spinor"),
    }
}

/// `σ·n` as a 2×2 matrix.
pub fn sigma_dot(n: &Vec3) -> Matrix2<C> {
    Matrix2::new(
        C::new(n.z, 0.0),
        C::new(n.x, -n.y),
        C::new(n.x, n.y),
        C::new(-n.z, 0.0),
    )
}

/// `‖σ·p̂ z − sign·z‖` for the section of the given helicity sign.
pub fn helicity_residual(tag: PatchTag, theta: f64, phi: f64, mu_sign: i32) -> Result<f64> {
    let helicity = Helicity::from_sign(mu_sign)?;
    let z = helical_section(tag, helicity, theta, phi)?;
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let n = Vec3::new(st * cp, st * sp, ct);
    let v = z.as_vector();
    Ok((sigma_dot(&n) * v - v * C::new(mu_sign as f64, 0.0)).norm())
}

/// `c₁ = (1/2π) ∫ p̂·s dΩ` with `s` from the patch section at each node.
pub fn chern_number(mu_sign: i32, grid: &AngularGrid) -> Result<f64> {
    let helicity = Helicity::from_sign(mu_sign)?;
    let mut total = 0.0;
    for (t, p, w) in grid.points() {
        let tag = PatchTag::new(Patch::for_theta(t));
        let z = helical_section(tag, helicity, t, p)?;
        let (st, ct) = t.sin_cos();
        let (sp, cp) = p.sin_cos();
        let n = Vec3::new(st * cp, st * sp, ct);
        total += w * n.dot(&spin_field(&z));
    }
    Ok(total / (2.0 * PI))
}

/// `U = exp(iΩ n·σ) = cos Ω + i sin Ω n·σ` for a unit axis `n`.
pub fn su2_matrix(omega: f64, axis: &Vec3) -> Matrix2<C> {
    let n = axis.normalize();
    Matrix2::identity() * C::new(omega.cos(), 0.0) + sigma_dot(&n) * C::new(0.0, omega.sin())
}

/// Rodrigues rotation of `v` by `angle` about the unit axis `n`.
pub fn rodrigues(v: &Vec3, axis: &Vec3, angle: f64) -> Vec3 {
    let n = axis.normalize();
    let (s, c) = angle.sin_cos();
    v * c + n.cross(v) * s + n * (n.dot(v) * (1.0 - c))
}

/// The three-vector rotation induced on `z†σz` by `U = exp(iΩ n·σ)`:
/// a rotation by `−2Ω` about `n`.
pub fn su2_induced_rotation(v: &Vec3, omega: f64, axis: &Vec3) -> Vec3 {
    rodrigues(v, axis, -2.0 * omega)
}
