//! Subcommand arguments and their runs.

use std::f64::consts::{FRAC_PI_2, PI};

use clap::Args;
use helikin::gauge_field::{
    dirac_check, equator_holonomy, sphere_flux, tetrahedron_cocycle, Coupling, MomentumPoint,
    Patch, PatchTag, Vec3, DEFAULT_OVERLAP,
};
use helikin::hopf::{chern_number, helicity_residual, Helicity};
use helikin::monopole_basis::{
    gram_matrix, l2_residual, lz_residual, AngularGrid, HalfInt, MonopoleIndex,
};
use helikin::screening::{form_factor, FormFactorKind};
use helikin::spectra::{
    oscillator_energy, rydberg_energy, solve_hydrogen_with, solve_radial_oscillator,
    splitting_report, HydrogenOptions, RadialGrid, SpectrumResult,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::output::{Cell, Table};

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    NonConvergence(String),
}

impl From<helikin::Error> for CliError {
    fn from(e: helikin::Error) -> Self {
        match e {
            helikin::Error::InvalidArgument(_) | helikin::Error::OutsidePatch { .. } => {
                CliError::Validation(e.to_string())
            }
            helikin::Error::Singular(_) | helikin::Error::NonConvergence(_) => {
                CliError::NonConvergence(e.to_string())
            }
        }
    }
}

type Run = Result<Table, CliError>;

fn bad<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Validation(msg.into()))
}

fn half(name: &str, x: f64) -> Result<HalfInt, CliError> {
    HalfInt::from_f64(x)
        .map_err(|_| CliError::Validation(format!("--{name} must be a multiple of 1/2, got {x}")))
}

fn helicity_mu(x: f64) -> Result<HalfInt, CliError> {
    let mu = half("mu", x)?;
    if mu.twice().abs() > 1 {
        return bad(format!("--mu must be one of 0, 0.5, -0.5; got {x}"));
    }
    Ok(mu)
}

fn at_least(name: &str, x: usize, min: usize) -> Result<(), CliError> {
    if x < min {
        return bad(format!("--{name} must be at least {min}, got {x}"));
    }
    Ok(())
}

fn positive(name: &str, x: f64) -> Result<(), CliError> {
    if !(x > 0.0 && x.is_finite()) {
        return bad(format!("--{name} must be positive and finite, got {x}"));
    }
    Ok(())
}

fn finite(name: &str, x: f64) -> Result<(), CliError> {
    if !x.is_finite() {
        return bad(format!("--{name} must be finite, got {x}"));
    }
    Ok(())
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct HarmonicsArgs {
    /// Largest l (a multiple of 1/2)
    #[arg(long, default_value_t = 2.5)]
    pub lmax: f64,
    /// Helicity μ ∈ {0, ±1/2}
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub mu: f64,
    /// Gauss–Legendre nodes in θ
    #[arg(long, default_value_t = 32)]
    pub ntheta: usize,
    /// Uniform nodes in φ
    #[arg(long, default_value_t = 32)]
    pub nphi: usize,
}

pub fn harmonics(a: &HarmonicsArgs) -> Run {
    let mu = helicity_mu(a.mu)?;
    let lmax = half("lmax", a.lmax)?;
    if lmax < mu.abs() || !(lmax - mu).is_integer() {
        return bad(format!(
            "--lmax {} must be ≥ |μ| and differ from μ by an integer",
            a.lmax
        ));
    }
    at_least("ntheta", a.ntheta, 2)?;
    at_least("nphi", a.nphi, 3)?;
    let grid = AngularGrid::gauss(a.ntheta, a.nphi)?;
    if lmax.value() > grid.max_resolved_l() {
        return bad(format!(
            "--nphi {} resolves l ≤ {}, below --lmax {}",
            a.nphi,
            grid.max_resolved_l(),
            a.lmax
        ));
    }
    let (basis, g) = gram_matrix(lmax, mu, &grid)?;
    let mut t = Table::new(&[
        "l",
        "m",
        "mu",
        "norm_error",
        "max_overlap",
        "l2_residual",
        "lz_residual",
    ]);
    for (i, idx) in basis.iter().enumerate() {
        let overlap = g[i]
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, v)| v.norm())
            .fold(0.0, f64::max);
        t.push(vec![
            idx.l().value().into(),
            idx.m().value().into(),
            idx.mu().value().into(),
            (g[i][i] - 1.0).norm().into(),
            overlap.into(),
            l2_residual(idx, &grid)?.into(),
            lz_residual(idx, &grid).into(),
        ]);
    }
    Ok(t)
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct FluxArgs {
    /// Magnetic charge g
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub g: f64,
    /// Electric charge e
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub e: f64,
    /// Comma-separated sphere radii
    #[arg(long, default_value = "0.5,1,7")]
    pub radii: String,
    #[arg(long, default_value_t = 32)]
    pub ntheta: usize,
    #[arg(long, default_value_t = 32)]
    pub nphi: usize,
}

pub fn flux(a: &FluxArgs) -> Run {
    finite("g", a.g)?;
    finite("e", a.e)?;
    at_least("ntheta", a.ntheta, 2)?;
    at_least("nphi", a.nphi, 3)?;
    let radii = a
        .radii
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Validation(format!("--radii: cannot parse {s:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    for &r in &radii {
        positive("radii", r)?;
    }
    let c = Coupling::new(a.e, a.g);
    let grid = AngularGrid::gauss(a.ntheta, a.nphi)?;
    let dirac = dirac_check(c);
    let mut t = Table::new(&[
        "radius",
        "flux",
        "expected",
        "abs_error",
        "holonomy",
        "eg",
        "dirac_n",
        "quantized",
    ]);
    for r in radii {
        let f = sphere_flux(r, c, &grid)?;
        let expected = 4.0 * PI * a.g;
        t.push(vec![
            r.into(),
            f.into(),
            expected.into(),
            (f - expected).abs().into(),
            equator_holonomy(r, c, 64)?.into(),
            c.eg().into(),
            dirac.n.into(),
            dirac.quantized.into(),
        ]);
    }
    Ok(t)
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct CocycleArgs {
    /// Coupling product e·g
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub eg: f64,
    /// Number of random origin-enclosing tetrahedra
    #[arg(long, default_value_t = 1000)]
    pub tetrahedra: usize,
}

fn mod_2pi(x: f64) -> f64 {
    let r = x.rem_euclid(2.0 * PI);
    r.min(2.0 * PI - r)
}

/// A random tetrahedron containing the origin, as `(p, v1, v2, v3)`.
pub fn enclosing_tetrahedron(rng: &mut ChaCha8Rng) -> (MomentumPoint, Vec3, Vec3, Vec3) {
    loop {
        let mut u = [Vec3::zeros(); 3];
        for x in &mut u {
            *x = Vec3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
        }
        let w = [
            rng.gen_range(0.2..1.0),
            rng.gen_range(0.2..1.0),
            rng.gen_range(0.2..1.0),
        ];
        let d = -(u[0] * w[0] + u[1] * w[1] + u[2] * w[2]);
        let vol = (u[1] - u[0]).cross(&(u[2] - u[0])).dot(&(d - u[0])).abs();
        if vol < 1e-2 || d.norm() < 1e-2 {
            continue;
        }
        let Ok(p) = MomentumPoint::from_cartesian(u[0]) else {
            continue;
        };
        return (p, u[1] - u[0], u[2] - u[1], d - u[2]);
    }
}

pub fn cocycle(a: &CocycleArgs, seed: u64) -> Run {
    finite("eg", a.eg)?;
    at_least("tetrahedra", a.tetrahedra, 1)?;
    let c = Coupling::new(1.0, a.eg);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut quantized = 0usize;
    let mut worst: f64 = 0.0;
    let mut sum = 0.0;
    for _ in 0..a.tetrahedra {
        let (p, v1, v2, v3) = enclosing_tetrahedron(&mut rng);
        let w = tetrahedron_cocycle(&p, &v1, &v2, &v3, c)?;
        let r = mod_2pi(w);
        if r < 1e-8 {
            quantized += 1;
        }
        worst = worst.max(r);
        sum += w;
    }
    let mut t = Table::new(&[
        "eg",
        "tetrahedra",
        "quantized_fraction",
        "max_residual",
        "mean_omega3",
        "expected",
    ]);
    t.push(vec![
        a.eg.into(),
        a.tetrahedra.into(),
        (quantized as f64 / a.tetrahedra as f64).into(),
        worst.into(),
        (sum / a.tetrahedra as f64).into(),
        (4.0 * PI * a.eg).into(),
    ]);
    Ok(t)
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct ChernArgs {
    /// Nodes per angle of the sphere grid
    #[arg(long, default_value_t = 128)]
    pub grid: usize,
}

pub fn chern(a: &ChernArgs) -> Run {
    at_least("grid", a.grid, 4)?;
    let grid = AngularGrid::gauss(a.grid, a.grid)?;
    let mut t = Table::new(&["bundle", "sign", "c1", "deviation"]);
    for (name, sign) in [("right-handed", 1), ("dual", -1)] {
        let c1 = chern_number(sign, &grid)?;
        t.push(vec![
            name.into(),
            (sign as i64).into(),
            c1.into(),
            (c1 - sign as f64).abs().into(),
        ]);
    }
    Ok(t)
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct FormFactorArgs {
    /// Helicity μ ∈ {0, ±1/2}
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub mu: f64,
    /// Number of random momentum pairs
    #[arg(long, default_value_t = 100)]
    pub pairs: usize,
    /// Largest momentum magnitude
    #[arg(long, default_value_t = 5.0)]
    pub pmax: f64,
}

fn kind_name(k: FormFactorKind) -> &'static str {
    match k {
        FormFactorKind::Overlap => "overlap",
        FormFactorKind::PhaseIntegral => "phase-integral",
        FormFactorKind::CrossPatch => "cross-patch",
    }
}

pub fn formfactor(a: &FormFactorArgs, seed: u64) -> Run {
    let helicity = Helicity::from_mu(helicity_mu(a.mu)?)?;
    at_least("pairs", a.pairs, 1)?;
    positive("pmax", a.pmax)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let point = |rng: &mut ChaCha8Rng| {
        let ct: f64 = rng.gen_range(-1.0..1.0);
        MomentumPoint::new(
            rng.gen_range(0.05 * a.pmax..a.pmax),
            ct.acos(),
            rng.gen_range(0.0..2.0 * PI),
        )
    };
    let mut t = Table::new(&[
        "pair", "px", "py", "pz", "qx", "qy", "qz", "kind", "re", "im", "modulus", "phase",
    ]);
    for i in 0..a.pairs {
        let p = point(&mut rng)?;
        let q = point(&mut rng)?;
        let f = form_factor(helicity, &p, &q)?;
        let (pv, qv) = (p.cartesian(), q.cartesian());
        t.push(vec![
            i.into(),
            pv.x.into(),
            pv.y.into(),
            pv.z.into(),
            qv.x.into(),
            qv.y.into(),
            qv.z.into(),
            kind_name(f.kind).into(),
            f.value.re.into(),
            f.value.im.into(),
            f.value.norm().into(),
            f.value.arg().into(),
        ]);
    }
    Ok(t)
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct OscillatorArgs {
    /// Helicity μ ∈ {0, ±1/2}
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub mu: f64,
    /// Largest l
    #[arg(long, default_value_t = 3.5)]
    pub lmax: f64,
    /// Largest radial quantum number
    #[arg(long, default_value_t = 5)]
    pub vmax: usize,
    /// Interior finite-difference nodes
    #[arg(long, default_value_t = 20000)]
    pub grid: usize,
    /// Outer Dirichlet wall
    #[arg(long, default_value_t = 14.0)]
    pub pmax: f64,
    /// Inner Dirichlet wall
    #[arg(long, default_value_t = 0.0)]
    pub pmin: f64,
}

pub fn oscillator(a: &OscillatorArgs) -> Run {
    let mu = helicity_mu(a.mu)?;
    let lmax = half("lmax", a.lmax)?;
    if lmax < mu.abs() || !(lmax - mu).is_integer() {
        return bad(format!(
            "--lmax {} must be ≥ |μ| and differ from μ by an integer",
            a.lmax
        ));
    }
    at_least("grid", a.grid, 10 * (a.vmax + 1))?;
    positive("pmax", a.pmax)?;
    if !(a.pmin >= 0.0 && a.pmin < a.pmax) {
        return bad(format!("--pmin must lie in [0, pmax), got {}", a.pmin));
    }
    let grid = RadialGrid::linear(a.pmin, a.pmax, a.grid)?;
    let mut t = Table::new(&[
        "v",
        "l",
        "mu",
        "E_analytic",
        "E_numeric",
        "abs_delta",
        "nodes",
    ]);
    let mut l = mu.abs();
    while l <= lmax {
        let r = solve_radial_oscillator(l, mu, &grid, a.vmax + 1)?;
        if !r.is_clean() {
            return Err(CliError::NonConvergence(r.meta.flags.join("; ")));
        }
        for lvl in &r.levels {
            let exact = oscillator_energy(lvl.v, l, mu)?;
            t.push(vec![
                lvl.v.into(),
                l.value().into(),
                mu.value().into(),
                exact.into(),
                lvl.energy.into(),
                (lvl.energy - exact).abs().into(),
                lvl.nodes.into(),
            ]);
        }
        l = l + HalfInt::from_twice(2);
    }
    Ok(t)
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct HydrogenArgs {
    /// Helicity μ ∈ {0, ±1/2}
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub mu: f64,
    /// Nuclear charge
    #[arg(long, default_value_t = 1.0)]
    pub z: f64,
    /// Largest l
    #[arg(long, default_value_t = 0.5)]
    pub lmax: f64,
    /// Levels per channel
    #[arg(long, default_value_t = 3)]
    pub count: usize,
    /// Radial nodes
    #[arg(long, default_value_t = 200)]
    pub grid: usize,
    /// Angular nodes per direction on the hemispheric grid (even)
    #[arg(long, default_value_t = 16)]
    pub angular: usize,
    /// Radial map scale c (defaults to Z)
    #[arg(long)]
    pub scale: Option<f64>,
    /// Include the spinor-overlap form factor
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub screened: bool,
    /// Emit splittings against μ = 0 with a refined-grid estimate
    #[arg(long, default_value_t = false, action = clap::ArgAction::Set)]
    pub splitting: bool,
}

struct HydrogenRun<'a> {
    a: &'a HydrogenArgs,
    z: f64,
    scale: f64,
}

impl HydrogenRun<'_> {
    fn channels(
        &self,
        mu: HalfInt,
        lmax: HalfInt,
        n_radial: usize,
        n_ang: usize,
    ) -> Result<Vec<SpectrumResult>, CliError> {
        let grid = RadialGrid::rational_map(self.scale, n_radial)?;
        let ang = AngularGrid::hemispheric(n_ang, n_ang)?;
        let opts = HydrogenOptions {
            screened: self.a.screened,
            m: None,
        };
        let mut out = Vec::new();
        let mut l = mu.abs();
        while l <= lmax {
            let r = solve_hydrogen_with(mu, self.z, l, &grid, &ang, self.a.count, opts)?;
            if !r.is_clean() {
                return Err(CliError::NonConvergence(r.meta.flags.join("; ")));
            }
            out.push(r);
            l = l + HalfInt::from_twice(2);
        }
        Ok(out)
    }
}

fn refine(n: usize) -> usize {
    let m = n * 3 / 2;
    m + m % 2
}

pub fn hydrogen(a: &HydrogenArgs) -> Run {
    let mu = helicity_mu(a.mu)?;
    positive("z", a.z)?;
    let lmax = half("lmax", a.lmax)?;
    if lmax < mu.abs() || !(lmax - mu).is_integer() {
        return bad(format!(
            "--lmax {} must be ≥ |μ| and differ from μ by an integer",
            a.lmax
        ));
    }
    at_least("count", a.count, 1)?;
    at_least("grid", a.grid, 100)?;
    at_least("angular", a.angular, 4)?;
    if a.angular % 2 != 0 {
        return bad(format!("--angular must be even, got {}", a.angular));
    }
    let scale = a.scale.unwrap_or(a.z);
    positive("scale", scale)?;
    let run = HydrogenRun { a, z: a.z, scale };

    if !a.splitting {
        let mut t = Table::new(&["mu", "l", "m", "v", "energy", "rydberg", "nodes"]);
        for r in run.channels(mu, lmax, a.grid, a.angular)? {
            for lvl in &r.levels {
                let reference = lvl
                    .mu
                    .twice()
                    .eq(&0)
                    .then(|| rydberg_energy(a.z, lvl.v, lvl.l.twice() as usize / 2));
                t.push(vec![
                    lvl.mu.value().into(),
                    lvl.l.value().into(),
                    lvl.m.map_or(Cell::Empty, |m| m.value().into()),
                    lvl.v.into(),
                    lvl.energy.into(),
                    reference.into(),
                    lvl.nodes.into(),
                ]);
            }
        }
        return Ok(t);
    }

    if mu.twice() == 0 {
        return bad("--splitting needs --mu ±0.5");
    }
    let l0max = lmax + HalfInt::HALF;
    let (g1, a1) = (refine(a.grid), refine(a.angular));
    let base = run.channels(HalfInt::from_twice(0), l0max, a.grid, a.angular)?;
    let hel = run.channels(mu, lmax, a.grid, a.angular)?;
    let base_f = run.channels(HalfInt::from_twice(0), l0max, g1, a1)?;
    let hel_f = run.channels(mu, lmax, g1, a1)?;
    let rows = splitting_report(&base, &hel, Some((&base_f, &hel_f)))?;
    let mut t = Table::new(&[
        "label",
        "v",
        "l0",
        "l",
        "m",
        "mu",
        "E_mu0",
        "E_mu",
        "delta",
        "delta_refined",
        "relative_change",
    ]);
    for r in rows {
        t.push(vec![
            r.label.into(),
            r.v.into(),
            r.l_ref.value().into(),
            r.l.value().into(),
            r.m.map_or(Cell::Empty, |m| m.value().into()),
            r.mu.value().into(),
            r.e_ref.into(),
            r.e.into(),
            r.delta.into(),
            r.delta_refined.into(),
            r.relative_change.into(),
        ]);
    }
    Ok(t)
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct SelftestArgs {}

/// A reduced invariant suite. Every row carries its own pass flag.
pub fn selftest(_: &SelftestArgs, seed: u64) -> Run {
    let mut t = Table::new(&["check", "value", "tolerance", "pass"]);
    let mut check = |name: &str, value: f64, tol: f64| {
        t.push(vec![
            name.into(),
            value.into(),
            tol.into(),
            (value < tol).into(),
        ]);
    };

    let grid = AngularGrid::gauss(16, 16)?;
    let mut gram: f64 = 0.0;
    for mu in [-1i32, 0, 1] {
        let (_, g) = gram_matrix(
            HalfInt::from_twice(4 + mu.abs()),
            HalfInt::from_twice(mu),
            &grid,
        )?;
        for (i, row) in g.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                gram = gram.max((v - if i == j { 1.0 } else { 0.0 }).norm());
            }
        }
    }
    check("gram deviation", gram, 1e-10);

    let c = Coupling::new(1.0, 0.5);
    let mut flux_err: f64 = 0.0;
    for r in [0.5, 1.0, 7.0] {
        flux_err = flux_err.max((sphere_flux(r, c, &grid)? - 2.0 * PI).abs());
    }
    check("sphere flux error", flux_err, 1e-8);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cocycle_res: f64 = 0.0;
    for _ in 0..200 {
        let (p, v1, v2, v3) = enclosing_tetrahedron(&mut rng);
        cocycle_res = cocycle_res.max(mod_2pi(tetrahedron_cocycle(&p, &v1, &v2, &v3, c)?));
    }
    check("cocycle residual at eg=1/2", cocycle_res, 1e-8);

    let cg = AngularGrid::gauss(32, 32)?;
    let c1 = (chern_number(1, &cg)? - 1.0)
        .abs()
        .max((chern_number(-1, &cg)? + 1.0).abs());
    check("Chern deviation", c1, 1e-8);

    let mut hel: f64 = 0.0;
    for _ in 0..1000 {
        let phi = rng.gen_range(0.0..2.0 * PI);
        let tn = rng.gen_range(0.0..FRAC_PI_2 + DEFAULT_OVERLAP);
        let ts = rng.gen_range(FRAC_PI_2..=PI);
        for s in [1, -1] {
            hel = hel.max(helicity_residual(PatchTag::new(Patch::North), tn, phi, s)?);
            hel = hel.max(helicity_residual(PatchTag::new(Patch::South), ts, phi, s)?);
        }
    }
    check("helicity residual", hel, 1e-12);

    let og = RadialGrid::linear(0.0, 12.0, 8000)?;
    let mut osc: f64 = 0.0;
    for (l, mu) in [(0, 0), (1, 1), (3, 1)] {
        let (l, mu) = (HalfInt::from_twice(l), HalfInt::from_twice(mu));
        for lvl in solve_radial_oscillator(l, mu, &og, 3)?.levels {
            osc = osc.max((lvl.energy - oscillator_energy(lvl.v, l, mu)?).abs());
        }
    }
    check("oscillator error", osc, 1e-4);

    let hg = RadialGrid::rational_map(1.0, 120)?;
    let ang = AngularGrid::hemispheric(8, 8)?;
    let zero = HalfInt::from_twice(0);
    let mut hyd: f64 = 0.0;
    for lvl in
        solve_hydrogen_with(zero, 1.0, zero, &hg, &ang, 3, HydrogenOptions::default())?.levels
    {
        let e = rydberg_energy(1.0, lvl.v, 0);
        hyd = hyd.max(((lvl.energy - e) / e).abs());
    }
    check("hydrogen relative error", hyd, 1e-3);

    let one = HalfInt::from_twice(2);
    let a = solve_hydrogen_with(
        zero,
        1.0,
        one,
        &hg,
        &ang,
        2,
        HydrogenOptions {
            screened: true,
            m: None,
        },
    )?;
    let b = solve_hydrogen_with(
        zero,
        1.0,
        one,
        &hg,
        &ang,
        2,
        HydrogenOptions {
            screened: false,
            m: None,
        },
    )?;
    check(
        "spinless screening difference",
        if a.energies() == b.energies() {
            0.0
        } else {
            1.0
        },
        0.5,
    );

    let herm = solve_hydrogen_with(
        HalfInt::HALF,
        1.0,
        HalfInt::HALF,
        &hg,
        &ang,
        2,
        HydrogenOptions::default(),
    )?
    .meta
    .hermiticity_residual
    .unwrap_or(f64::INFINITY);
    check("Hermiticity residual", herm, 1e-10);

    let idx = MonopoleIndex::new(HalfInt::HALF, HalfInt::HALF, HalfInt::HALF)?;
    check(
        "L² residual",
        l2_residual(&idx, &AngularGrid::gauss(40, 24)?)?,
        1e-4,
    );
    Ok(t)
}
