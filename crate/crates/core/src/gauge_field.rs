//! Monopole gauge potentials over momentum space on two overlapping patches.
//!
//! The northern potential `A_N = g (1−cosθ)/(p sinθ) φ̂` is regular at the
//! north pole, the southern `A_S = −g (1+cosθ)/(p sinθ) φ̂` at the south pole,
//! and both curl to `B = g p̂ / p²`. Fluxes through triangles and tetrahedra
//! are computed from exact solid angles, so the cocycles `ω₂`, `ω₃` carry no
//! quadrature error.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::Vector3;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::monopole_basis::AngularGrid;
use crate::specfun::gauss_legendre;

pub type Vec3 = Vector3<f64>;

/// Hemispherical gauge patch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Patch {
    North,
    South,
}

impl Patch {
    /// Deterministic assignment: `θ ≤ π/2` is north, anything below the equator south.
    pub fn for_theta(theta: f64) -> Patch {
        if theta <= FRAC_PI_2 {
            Patch::North
        } else {
            Patch::South
        }
    }

    /// Deterministic assignment from the sign of the z-component.
    pub fn for_point(point: &MomentumPoint) -> Patch {
        if point.cartesian().z >= 0.0 {
            Patch::North
        } else {
            Patch::South
        }
    }
}

/// Default half-width of the overlap band around the equator (5°).
pub const DEFAULT_OVERLAP: f64 = PI / 36.0;

/// A patch together with the half-width `ε` of its overlap band.
///
/// North is valid for `θ < π/2 + ε`, south for `θ > π/2 − ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchTag {
    pub patch: Patch,
    pub epsilon: f64,
}

impl PatchTag {
    pub fn new(patch: Patch) -> Self {
        PatchTag {
            patch,
            epsilon: DEFAULT_OVERLAP,
        }
    }

    pub fn north() -> Self {
        Self::new(Patch::North)
    }

    pub fn south() -> Self {
        Self::new(Patch::South)
    }

    pub fn with_epsilon(patch: Patch, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < FRAC_PI_2) {
            return invalid(format!("overlap half-width {epsilon} outside (0, π/2)"));
        }
        Ok(PatchTag { patch, epsilon })
    }

    pub fn contains(&self, theta: f64) -> bool {
        match self.patch {
            Patch::North => (0.0..FRAC_PI_2 + self.epsilon).contains(&theta),
            Patch::South => theta > FRAC_PI_2 - self.epsilon && theta <= PI,
        }
    }

    /// All tags (with this tag's `ε`) valid at `theta`.
    pub fn valid_at(theta: f64, epsilon: f64) -> Vec<PatchTag> {
        [Patch::North, Patch::South]
            .into_iter()
            .map(|patch| PatchTag { patch, epsilon })
            .filter(|t| t.contains(theta))
            .collect()
    }

    pub(crate) fn check(&self, theta: f64) -> Result<()> {
        if self.contains(theta) {
            Ok(())
        } else {
            Err(Error::OutsidePatch {
                patch: self.patch,
                detail: format!("θ = {theta} with ε = {}", self.epsilon),
            })
        }
    }
}

/// A point of momentum space in spherical coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumPoint {
    pub p: f64,
    pub theta: f64,
    pub phi: f64,
}

impl MomentumPoint {
    pub fn new(p: f64, theta: f64, phi: f64) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return invalid(format!("radial momentum must be positive, got {p}"));
        }
        if !(0.0..=PI).contains(&theta) {
            return invalid(format!("θ = {theta} outside [0, π]"));
        }
        if !phi.is_finite() {
            return invalid("φ must be finite");
        }
        Ok(MomentumPoint {
            p,
            theta,
            phi: phi.rem_euclid(2.0 * PI),
        })
    }

    pub fn from_cartesian(v: Vec3) -> Result<Self> {
        let p = v.norm();
        if !(p > 0.0 && p.is_finite()) {
            return invalid("momentum point at the origin");
        }
        let theta = v.x.hypot(v.y).atan2(v.z);
        let phi = if v.x == 0.0 && v.y == 0.0 {
            0.0
        } else {
            v.y.atan2(v.x).rem_euclid(2.0 * PI)
        };
        Ok(MomentumPoint { p, theta, phi })
    }

    pub fn cartesian(&self) -> Vec3 {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        Vec3::new(self.p * st * cp, self.p * st * sp, self.p * ct)
    }

    pub fn unit(&self) -> Vec3 {
        self.cartesian() / self.p
    }

    /// Unit azimuthal vector `φ̂`.
    pub fn phi_hat(&self) -> Vec3 {
        let (sp, cp) = self.phi.sin_cos();
        Vec3::new(-sp, cp, 0.0)
    }
}

/// Coupling constant `e` and monopole strength `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    pub e: f64,
    pub g: f64,
}

impl Coupling {
    pub fn new(e: f64, g: f64) -> Self {
        Coupling { e, g }
    }

    /// The product `eg`, which plays the role of the helicity.
    pub fn eg(&self) -> f64 {
        self.e * self.g
    }
}

fn potential_cartesian(patch: Patch, k: &Vec3, g: f64) -> Result<Vec3> {
    let r = k.norm();
    if r == 0.0 {
        return Err(Error::Singular("gauge potential at p = 0".into()));
    }
    let denom = match patch {
        Patch::North => r * (r + k.z),
        Patch::South => -r * (r - k.z),
    };
    if denom == 0.0 {
        return Err(Error::OutsidePatch {
            patch,
            detail: "Dirac string of the patch potential".into(),
        });
    }
    Ok(Vec3::new(-k.y, k.x, 0.0) * (g / denom))
}

/// The patch potential `A_N` or `A_S` at `point`, Cartesian components.
pub fn gauge_potential(tag: PatchTag, point: &MomentumPoint, c: Coupling) -> Result<Vec3> {
    tag.check(point.theta)?;
    potential_cartesian(tag.patch, &point.cartesian(), c.g)
}

/// `B = g p̂ / p²`.
pub fn field_strength(point: &MomentumPoint, c: Coupling) -> Result<Vec3> {
    if point.p <= 0.0 {
        return Err(Error::Singular("field strength at p = 0".into()));
    }
    Ok(point.unit() * (c.g / (point.p * point.p)))
}

const PANEL_ORDER: usize = 6;

/// `∫ A·dk` along the straight segment `from → to` on one patch.
///
/// Composite Gauss–Legendre with `steps` panels of fixed order. Every
/// sample point must lie inside the patch; a segment that leaves it must be
/// split by the caller.
pub fn line_integral(
    tag: PatchTag,
    from: &MomentumPoint,
    to: &MomentumPoint,
    c: Coupling,
    steps: usize,
) -> Result<f64> {
    if steps < 8 {
        return invalid(format!("line integral needs at least 8 steps, got {steps}"));
    }
    tag.check(from.theta)?;
    tag.check(to.theta)?;
    segment_integral(tag, &from.cartesian(), &to.cartesian(), c, steps)
}

pub(crate) fn segment_integral(
    tag: PatchTag,
    a: &Vec3,
    b: &Vec3,
    c: Coupling,
    steps: usize,
) -> Result<f64> {
    let d = b - a;
    if d.norm() == 0.0 {
        return Ok(0.0);
    }
    // Closest approach to the origin.
    let t0 = (-a.dot(&d) / d.norm_squared()).clamp(0.0, 1.0);
    if (a + d * t0).norm() <= 1e-14 * a.norm().max(b.norm()) {
        return Err(Error::Singular("segment passes through the origin".into()));
    }
    let rule = gauss_legendre(PANEL_ORDER)?;
    let h = 1.0 / steps as f64;
    let mut total = 0.0;
    for s in 0..steps {
        let t_lo = s as f64 * h;
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            let t = t_lo + 0.5 * h * (x + 1.0);
            let k = a + d * t;
            let theta = k.x.hypot(k.y).atan2(k.z);
            tag.check(theta)?;
            let pot = potential_cartesian(tag.patch, &k, c.g)?;
            total += 0.5 * h * w * pot.dot(&d);
        }
    }
    Ok(total)
}

/// Signed solid angle subtended at the origin by the triangle `(a, b, c)`,
/// positive when `a·(b×c) > 0`.
pub fn solid_angle(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    let (la, lb, lc) = (a.norm(), b.norm(), c.norm());
    let num = a.dot(&b.cross(c));
    let den = la * lb * lc + a.dot(b) * lc + a.dot(c) * lb + b.dot(c) * la;
    2.0 * num.atan2(den)
}

/// Whether the origin lies in the closed planar triangle `(a, b, c)`.
fn origin_in_triangle(a: &Vec3, b: &Vec3, c: &Vec3) -> bool {
    let scale = a.norm().max(b.norm()).max(c.norm());
    let n = (b - a).cross(&(c - a));
    let area2 = n.norm();
    if area2 == 0.0 {
        // Degenerate: the origin must sit on one of the edges.
        return [(a, b), (b, c), (c, a)].iter().any(|(u, v)| {
            let d = *v - *u;
            if d.norm() == 0.0 {
                return u.norm() <= 1e-12 * scale;
            }
            let t = (-u.dot(&d) / d.norm_squared()).clamp(0.0, 1.0);
            (*u + d * t).norm() <= 1e-12 * scale
        });
    }
    let tol = 1e-12 * scale;
    if (a.dot(&n) / area2).abs() > tol {
        return false;
    }
    let s1 = a.cross(b).dot(&n);
    let s2 = b.cross(c).dot(&n);
    let s3 = c.cross(a).dot(&n);
    let eps = -1e-12 * scale * scale * area2;
    s1 >= eps && s2 >= eps && s3 >= eps
}

/// `ω₂ = e g Ω` for the triangle `(p, p+v1, p+v1+v2)`.
pub fn triangle_cocycle(p: &MomentumPoint, v1: &Vec3, v2: &Vec3, c: Coupling) -> Result<f64> {
    let a = p.cartesian();
    let b = a + v1;
    let cc = b + v2;
    triangle_flux(&a, &b, &cc, c)
}

/// `e g Ω(a, b, c)` with the origin-on-triangle case rejected.
pub fn triangle_flux(a: &Vec3, b: &Vec3, c: &Vec3, coupling: Coupling) -> Result<f64> {
    if origin_in_triangle(a, b, c) {
        return Err(Error::Singular("origin lies on the triangle".into()));
    }
    let scale = a.norm() * b.norm() * c.norm();
    if a.dot(&b.cross(c)).abs() <= 1e-15 * scale {
        return Ok(0.0);
    }
    Ok(coupling.eg() * solid_angle(a, b, c))
}

/// Vertices `p, p+v1, p+v1+v2, p+v1+v2+v3`.
pub fn tetrahedron_vertices(p: &MomentumPoint, v1: &Vec3, v2: &Vec3, v3: &Vec3) -> [Vec3; 4] {
    let a = p.cartesian();
    let b = a + v1;
    let c = b + v2;
    let d = c + v3;
    [a, b, c, d]
}

/// Facets of a tetrahedron with outward orientation, as vertex triples.
pub fn outward_facets(v: &[Vec3; 4]) -> [[Vec3; 3]; 4] {
    let mut out = [[Vec3::zeros(); 3]; 4];
    for (k, facet) in out.iter_mut().enumerate() {
        let idx: Vec<usize> = (0..4).filter(|&i| i != k).collect();
        let (a, b, c) = (v[idx[0]], v[idx[1]], v[idx[2]]);
        let opposite = v[k];
        if (b - a).cross(&(c - a)).dot(&(opposite - a)) < 0.0 {
            *facet = [a, b, c];
        } else {
            *facet = [a, c, b];
        }
    }
    out
}

/// `ω₃` for the tetrahedron spanned by `p` and the successive steps `v1, v2, v3`:
/// `e g` times the total outward solid angle, i.e. `4π e g` if the origin is
/// inside and `0` otherwise.
pub fn tetrahedron_cocycle(
    p: &MomentumPoint,
    v1: &Vec3,
    v2: &Vec3,
    v3: &Vec3,
    c: Coupling,
) -> Result<f64> {
    tetrahedron_flux(&tetrahedron_vertices(p, v1, v2, v3), c)
}

pub fn tetrahedron_flux(v: &[Vec3; 4], c: Coupling) -> Result<f64> {
    let scale = v.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let vol = (v[1] - v[0]).cross(&(v[2] - v[0])).dot(&(v[3] - v[0]));
    for f in outward_facets(v) {
        if origin_in_triangle(&f[0], &f[1], &f[2]) {
            return Err(Error::Singular("origin lies on a facet".into()));
        }
    }
    if vol.abs() <= 1e-14 * scale.powi(3) {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for f in outward_facets(v) {
        total += triangle_flux(&f[0], &f[1], &f[2], c)?;
    }
    Ok(total)
}

/// Result of the Dirac quantization check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiracCheck {
    pub quantized: bool,
    pub n: i64,
    pub deviation: f64,
}

/// Quantized iff `2eg` is an integer to within `1e−12`.
pub fn dirac_check(c: Coupling) -> DiracCheck {
    let t = 2.0 * c.eg();
    let n = t.round();
    let deviation = (t - n).abs();
    DiracCheck {
        quantized: deviation < 1e-12,
        n: n as i64,
        deviation,
    }
}

/// `e^{inφ}`.
pub fn transition_function(phi: f64, n: i64) -> Complex64 {
    Complex64::from_polar(1.0, n as f64 * phi)
}

/// Outward flux of `B` through the sphere of the given radius by grid quadrature.
pub fn sphere_flux(radius: f64, c: Coupling, grid: &AngularGrid) -> Result<f64> {
    if !(radius > 0.0) {
        return invalid("sphere radius must be positive");
    }
    let mut total = 0.0;
    for (t, p, w) in grid.points() {
        let pt = MomentumPoint::new(radius, t, p)?;
        let b = field_strength(&pt, c)?;
        total += w * radius * radius * b.dot(&pt.unit());
    }
    Ok(total)
}

/// `e ∮ (A_N − A_S)·dl` around the equator of radius `radius`, by Gauss–Legendre
/// in the azimuth. Equals `2π · 2eg`.
pub fn equator_holonomy(radius: f64, c: Coupling, order: usize) -> Result<f64> {
    let rule = gauss_legendre(order)?;
    let mut total = 0.0;
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let phi = PI * (x + 1.0);
        let pt = MomentumPoint::new(radius, FRAC_PI_2, phi)?;
        let an = gauge_potential(PatchTag::north(), &pt, c)?;
        let as_ = gauge_potential(PatchTag::south(), &pt, c)?;
        total += PI * w * (an - as_).dot(&pt.phi_hat()) * radius;
    }
    Ok(c.e * total)
}
