//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::f64::consts::{FRAC_PI_2, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use helikin::gauge_field::{
    sphere_flux, tetrahedron_cocycle, Coupling, MomentumPoint, Patch, PatchTag, Vec3,
    DEFAULT_OVERLAP,
};
use helikin::hopf::{chern_number, helicity_residual, Helicity};
use helikin::monopole_basis::{
    gram_matrix, monopole_harmonic, AngularGrid, HalfInt, MonopoleIndex,
};
use helikin::screening::{
    berry_phase_form_factor, cross_patch_form_factor, cross_patch_form_factor_sn, equator_crossing,
    overlap_form_factor,
};
use helikin::spectra::{
    degeneracy_count, oscillator_energy, rydberg_energy, solve_hydrogen, solve_radial_oscillator,
    splitting_report, RadialGrid, SpectrumResult,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn h(twice: i32) -> HalfInt {
    HalfInt::from_twice(twice)
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    if elapsed <= limit {
        Ok(())
    } else {
        Err(format!("took {elapsed:?}, limit {limit:?}"))
    }
}

/// Standard `Y_lm` from the associated Legendre recurrence, Condon–Shortley phase.
fn standard_ylm(l: i32, m: i32, theta: f64, phi: f64) -> Complex64 {
    let am = m.abs();
    let x = theta.cos();
    let s = (1.0 - x * x).sqrt();
    let mut pmm = 1.0;
    for k in 1..=am {
        pmm *= -(2.0 * k as f64 - 1.0) * s;
    }
    let plm = if l == am {
        pmm
    } else {
        let mut a = pmm;
        let mut b = x * (2.0 * am as f64 + 1.0) * pmm;
        for ll in (am + 2)..=l {
            let c = (x * (2.0 * ll as f64 - 1.0) * b - (ll + am - 1) as f64 * a) / (ll - am) as f64;
            a = b;
            b = c;
        }
        b
    };
    let mut ratio = 1.0;
    for k in (l - am + 1)..=(l + am) {
        ratio /= k as f64;
    }
    let y = ((2.0 * l as f64 + 1.0) / (4.0 * PI) * ratio).sqrt() * plm;
    let pos = Complex64::from_polar(y, am as f64 * phi);
    if m >= 0 {
        pos
    } else {
        pos.conj() * if am % 2 == 0 { 1.0 } else { -1.0 }
    }
}

fn basis_fidelity() -> Outcome {
    let start = Instant::now();
    let grid = AngularGrid::gauss(24, 24).map_err(|e| e.to_string())?;
    let mut worst_gram: f64 = 0.0;
    for (mu, lmax) in [(0, 8), (1, 9), (-1, 9)] {
        let (_, g) = gram_matrix(h(lmax), h(mu), &grid).map_err(|e| e.to_string())?;
        for (i, row) in g.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst_gram = worst_gram.max((v - target).norm());
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_y: f64 = 0.0;
    for _ in 0..200 {
        let (t, p) = (rng.gen_range(0.0..PI), rng.gen_range(0.0..2.0 * PI));
        for l in 0..=4 {
            for m in -l..=l {
                let idx =
                    MonopoleIndex::new(h(2 * l), h(2 * m), h(0)).map_err(|e| e.to_string())?;
                let y = monopole_harmonic(&idx, t, p).map_err(|e| e.to_string())?;
                worst_y = worst_y.max((y - standard_ylm(l, m, t, p)).norm());
            }
        }
    }
    within(start.elapsed(), Duration::from_secs(10))?;
    let detail = format!("max |G − I| = {worst_gram:.2e}, max |Y − Y_std| = {worst_y:.2e}");
    if worst_gram < 1e-10 && worst_y < 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Origin-enclosing tetrahedron as `(p, v1, v2, v3)`.
fn enclosing_tetrahedron(rng: &mut ChaCha8Rng) -> (MomentumPoint, Vec3, Vec3, Vec3) {
    loop {
        let mut u = [Vec3::zeros(); 3];
        for x in &mut u {
            *x = Vec3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
        }
        let w: [f64; 3] = [
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

fn mod_2pi_residual(x: f64) -> f64 {
    let r = x.rem_euclid(2.0 * PI);
    r.min(2.0 * PI - r)
}

fn flux_quantization() -> Outcome {
    let start = Instant::now();
    let grid = AngularGrid::gauss(32, 32).map_err(|e| e.to_string())?;
    let c = Coupling::new(1.0, 0.5);
    let mut worst_flux: f64 = 0.0;
    for r in [0.5, 1.0, 7.0] {
        let f = sphere_flux(r, c, &grid).map_err(|e| e.to_string())?;
        worst_flux = worst_flux.max((f - 4.0 * PI * c.g).abs());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_half: f64 = 0.0;
    let mut least_off = f64::INFINITY;
    for _ in 0..1000 {
        let (p, v1, v2, v3) = enclosing_tetrahedron(&mut rng);
        let w = tetrahedron_cocycle(&p, &v1, &v2, &v3, Coupling::new(1.0, 0.5))
            .map_err(|e| e.to_string())?;
        worst_half = worst_half
            .max(mod_2pi_residual(w))
            .max((w - 2.0 * PI).abs());
        let w3 = tetrahedron_cocycle(&p, &v1, &v2, &v3, Coupling::new(1.0, 0.3))
            .map_err(|e| e.to_string())?;
        least_off = least_off.min(mod_2pi_residual(w3));
    }
    within(start.elapsed(), Duration::from_secs(30))?;
    let detail = format!(
        "max |Φ − 4πg| = {worst_flux:.2e}; eg=1/2 residual {worst_half:.2e}; eg=0.3 min residual {least_off:.3}"
    );
    if worst_flux < 1e-8 && worst_half < 1e-8 && least_off > 0.1 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn chern_numbers() -> Outcome {
    let grid = AngularGrid::gauss(128, 128).map_err(|e| e.to_string())?;
    let plus = chern_number(1, &grid).map_err(|e| e.to_string())?;
    let minus = chern_number(-1, &grid).map_err(|e| e.to_string())?;
    let detail = format!("c₁ = {plus:.12}, dual {minus:.12}");
    if (plus - 1.0).abs() < 1e-8 && (minus + 1.0).abs() < 1e-8 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn helicity_eigen_checks() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let phi = rng.gen_range(0.0..2.0 * PI);
        let tn = rng.gen_range(0.0..FRAC_PI_2 + DEFAULT_OVERLAP);
        let ts = rng.gen_range(FRAC_PI_2 - DEFAULT_OVERLAP + 1e-12..=PI);
        for sign in [1, -1] {
            worst = worst.max(
                helicity_residual(PatchTag::new(Patch::North), tn, phi, sign)
                    .map_err(|e| e.to_string())?,
            );
            worst = worst.max(
                helicity_residual(PatchTag::new(Patch::South), ts, phi, sign)
                    .map_err(|e| e.to_string())?,
            );
        }
    }
    let detail = format!("max residual {worst:.2e} over 4·10⁴ evaluations");
    if worst < 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn random_point(rng: &mut ChaCha8Rng, t0: f64, t1: f64) -> MomentumPoint {
    MomentumPoint::new(
        rng.gen_range(0.1..5.0),
        rng.gen_range(t0..t1),
        rng.gen_range(0.0..2.0 * PI),
    )
    .unwrap()
}

fn form_factor_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut exact = true;
    let mut worst_kz: f64 = 0.0;
    let mut off_segment: f64 = 0.0;
    for _ in 0..10_000 {
        let p = random_point(&mut rng, 1e-3, FRAC_PI_2 - 1e-3);
        let q = random_point(&mut rng, FRAC_PI_2 + 1e-3, PI - 1e-3);
        for hel in [Helicity::Positive, Helicity::Negative] {
            let ns = cross_patch_form_factor(hel, &p, &q)
                .map_err(|e| e.to_string())?
                .value;
            let sn = cross_patch_form_factor_sn(hel, &q, &p)
                .map_err(|e| e.to_string())?
                .value;
            exact &= sn == ns.conj();
        }
        let k = equator_crossing(&p, &q)
            .map_err(|e| e.to_string())?
            .cartesian();
        worst_kz = worst_kz.max(k.z.abs());
        let (pv, qv) = (p.cartesian(), q.cartesian());
        let t = pv.z / (pv.z - qv.z);
        let miss = (pv + (qv - pv) * t - k).norm() / pv.norm().max(qv.norm());
        off_segment = off_segment.max(if (0.0..=1.0).contains(&t) {
            miss
        } else {
            f64::INFINITY
        });
    }

    let tag = PatchTag::north();
    let a = MomentumPoint::new(1.0, 0.8, 0.2).unwrap();
    let dir = Vec3::new(0.3, -0.5, 0.2).normalize();
    let mut errs = Vec::new();
    for step in [0.08, 0.04, 0.02, 0.01] {
        let b = MomentumPoint::from_cartesian(a.cartesian() + dir * step).unwrap();
        let ph = berry_phase_form_factor(tag, Helicity::Positive, &a, &b, 8)
            .map_err(|e| e.to_string())?
            .value;
        let ov = overlap_form_factor(tag, Helicity::Positive, &a, &b)
            .map_err(|e| e.to_string())?
            .value;
        errs.push((ph - ov).norm());
    }
    let order = errs
        .windows(2)
        .map(|w| (w[0] / w[1]).log2())
        .fold(f64::INFINITY, f64::min);

    let detail = format!(
        "conjugation exact: {exact}; min observed order {order:.3}; max |k_E·ẑ| {worst_kz:.1e}; max off-segment {off_segment:.1e}"
    );
    if exact && order >= 1.9 && worst_kz < 1e-14 && off_segment < 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn oscillator_spectrum() -> Outcome {
    let start = Instant::now();
    let grid = RadialGrid::linear(0.0, 14.0, 20_000).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    let mut channels = Vec::new();
    for mu in [1, -1] {
        for l2 in [1, 3, 5, 7] {
            channels.push((h(l2), h(mu)));
        }
    }
    for l in 0..=3 {
        channels.push((h(2 * l), h(0)));
    }
    for (l, mu) in channels {
        let r = solve_radial_oscillator(l, mu, &grid, 6).map_err(|e| e.to_string())?;
        if !r.is_clean() {
            return Err(format!("l={l} μ={mu}: {:?}", r.meta.flags));
        }
        for lvl in &r.levels {
            let exact = if mu == h(0) {
                2.0 * lvl.v as f64 + l.value() + 1.5
            } else {
                2.0 * lvl.v as f64 + (l.value() * (l.value() + 1.0)).sqrt() + 1.0
            };
            worst = worst.max((lvl.energy - exact).abs());
        }
    }
    let deg2 = degeneracy_count(2);
    let mut helical = Vec::new();
    for v in 0..=5 {
        for l2 in [1, 3, 5, 7] {
            helical.push(oscillator_energy(v, h(l2), h(1)).map_err(|e| e.to_string())?);
        }
    }
    helical.sort_by(f64::total_cmp);
    let min_gap = helical
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    within(start.elapsed(), Duration::from_secs(120))?;
    let detail = format!(
        "max |E − E_exact| = {worst:.2e}; deg(N=2) = {deg2}; min helical gap {min_gap:.3e}"
    );
    if worst < 1e-4 && deg2 == 6 && min_gap > 1e-6 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn hydrogen_validation() -> Outcome {
    let start = Instant::now();
    let ang = AngularGrid::hemispheric(16, 16).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for z in [1.0, 2.0] {
        let grid = RadialGrid::rational_map(z, 200).map_err(|e| e.to_string())?;
        for l in 0..3usize {
            let r = solve_hydrogen(h(0), z, h(2 * l as i32), &grid, &ang, 3 - l)
                .map_err(|e| e.to_string())?;
            for lvl in &r.levels {
                let exact = rydberg_energy(z, lvl.v, l);
                worst = worst.max(((lvl.energy - exact) / exact).abs());
            }
        }
    }
    let grid = RadialGrid::rational_map(1.0, 200).map_err(|e| e.to_string())?;
    let screened = solve_hydrogen(h(1), 1.0, h(1), &grid, &ang, 3).map_err(|e| e.to_string())?;
    let herm = screened.meta.hermiticity_residual.unwrap_or(f64::INFINITY);
    within(start.elapsed(), Duration::from_secs(300))?;
    let detail = format!("max relative error {worst:.2e}; Hermiticity residual {herm:.1e}");
    if worst < 1e-3 && herm < 1e-10 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn hydrogen_set(
    n_radial: usize,
    n_ang: usize,
) -> Result<(Vec<SpectrumResult>, Vec<SpectrumResult>), String> {
    let grid = RadialGrid::rational_map(1.0, n_radial).map_err(|e| e.to_string())?;
    let ang = AngularGrid::hemispheric(n_ang, n_ang).map_err(|e| e.to_string())?;
    let run = |mu: i32, l: i32| {
        solve_hydrogen(h(mu), 1.0, h(l), &grid, &ang, 3).map_err(|e| e.to_string())
    };
    Ok((vec![run(0, 0)?, run(0, 2)?], vec![run(1, 1)?, run(-1, 1)?]))
}

fn screening_prediction() -> Outcome {
    let grids = [(200, 16), (300, 24), (450, 36)];
    let sets = grids
        .iter()
        .map(|&(r, a)| hydrogen_set(r, a))
        .collect::<Result<Vec<_>, _>>()?;
    let mut worst: f64 = 0.0;
    let mut rows_seen = 0;
    for w in sets.windows(2) {
        let rows = splitting_report(&w[0].0, &w[0].1, Some((&w[1].0, &w[1].1)))
            .map_err(|e| e.to_string())?;
        for r in &rows {
            let change = r
                .relative_change
                .ok_or_else(|| format!("{}: no refined partner", r.label))?;
            if !r.delta.is_finite() || !change.is_finite() {
                return Err(format!("{}: non-finite Δ", r.label));
            }
            worst = worst.max(change);
        }
        rows_seen += rows.len();
    }
    let finest = splitting_report(&sets[2].0, &sets[2].1, None).map_err(|e| e.to_string())?;
    for r in finest.iter().filter(|r| r.mu == h(1) && r.m == Some(h(1))) {
        println!("    {:<40} Δ = {:+.6e}", r.label, r.delta);
    }
    let detail = format!(
        "{rows_seen} splittings, max change between refinements {:.2e}",
        worst
    );
    if rows_seen > 0 && worst < 0.1 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() -> ExitCode {
    let checks: [(&str, fn() -> Outcome); 8] = [
        ("basis fidelity", basis_fidelity),
        ("flux quantization", flux_quantization),
        ("Chern numbers", chern_numbers),
        ("helicity eigen-checks", helicity_eigen_checks),
        ("form-factor consistency", form_factor_consistency),
        ("oscillator spectrum", oscillator_spectrum),
        ("hydrogen validation", hydrogen_validation),
        ("screening prediction", screening_prediction),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("criterion {} {name}: PASS ({d}) [{secs:.1}s]", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({d}) [{secs:.1}s]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
