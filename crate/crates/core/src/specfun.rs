//! Orthogonal polynomials, log-gamma and Gauss–Legendre quadrature.
//!
//! Polynomials are evaluated by ascending three-term recurrence, which is
//! stable for the degrees used in this crate (n ≲ 50). Jacobi parameters
//! that make a recurrence denominator vanish (possible when `alpha` or
//! `beta` are negative integers) fall back to the explicit binomial sum.

use crate::error::{invalid, Result};

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub order: usize,
}

impl QuadratureRule {
    /// Integrate `f` over `[-1, 1]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Integrate `f` over `[a, b]` by the affine map of the rule.
    pub fn integrate_on<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        half * self.integrate(|x| f(mid + half * x))
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let nodes = self.nodes.iter().map(|&x| mid + half * x).collect();
        let weights = self.weights.iter().map(|&w| half * w).collect();
        (nodes, weights)
    }
}

/// Legendre polynomial `P_n(x)` and its derivative.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss–Legendre nodes and weights of the given order, nodes ascending.
pub fn gauss_legendre(order: usize) -> Result<QuadratureRule> {
    if order == 0 {
        return invalid("Gauss-Legendre order must be at least 1");
    }
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        order,
    })
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of `|Γ(x)|` (Lanczos approximation, reflection for x < 1/2).
pub fn ln_gamma(x: f64) -> f64 {
    use std::f64::consts::PI;
    if x < 0.5 {
        let s = (PI * x).sin().abs();
        return (PI / s).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = LANCZOS_COEF[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// `ln n!` for small non-negative integers, exact table up to 20 then log-gamma.
pub fn ln_factorial(n: u64) -> f64 {
    if n <= 20 {
        let mut f = 1.0f64;
        for k in 2..=n {
            f *= k as f64;
        }
        f.ln()
    } else {
        ln_gamma(n as f64 + 1.0)
    }
}

/// Generalized binomial coefficient with real upper argument.
fn binomial_real(top: f64, k: usize) -> f64 {
    let mut c = 1.0;
    for i in 0..k {
        c *= (top - i as f64) / (i as f64 + 1.0);
    }
    c
}

fn jacobi_explicit(n: usize, alpha: f64, beta: f64, z: f64) -> f64 {
    let a = 0.5 * (z - 1.0);
    let b = 0.5 * (z + 1.0);
    (0..=n)
        .map(|s| {
            binomial_real(n as f64 + alpha, n - s)
                * binomial_real(n as f64 + beta, s)
                * a.powi(s as i32)
                * b.powi((n - s) as i32)
        })
        .sum()
}

/// Jacobi polynomial `P_n^(alpha, beta)(z)`.
pub fn jacobi_poly(n: usize, alpha: f64, beta: f64, z: f64) -> Result<f64> {
    if !alpha.is_finite() || !beta.is_finite() || !z.is_finite() {
        return invalid("Jacobi parameters and argument must be finite");
    }
    if n == 0 {
        return Ok(1.0);
    }
    let ab = alpha + beta;
    let p1 = (alpha + 1.0) + (ab + 2.0) * 0.5 * (z - 1.0);
    if n == 1 {
        return Ok(p1);
    }
    let degenerate = (2..=n).any(|k| {
        let k = k as f64;
        (k + ab).abs() < 1e-12 || (2.0 * k + ab - 2.0).abs() < 1e-12
    });
    if degenerate {
        return Ok(jacobi_explicit(n, alpha, beta, z));
    }
    let mut pm = 1.0;
    let mut p = p1;
    for k in 2..=n {
        let k = k as f64;
        let c = 2.0 * k + ab;
        let a1 = 2.0 * k * (k + ab) * (c - 2.0);
        let a2 = (c - 1.0) * (alpha * alpha - beta * beta);
        let a3 = (c - 2.0) * (c - 1.0) * c;
        let a4 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * c;
        let next = ((a2 + a3 * z) * p - a4 * pm) / a1;
        pm = p;
        p = next;
    }
    Ok(p)
}

/// Generalized Laguerre polynomial `L_v^a(x)`.
pub fn laguerre_poly(v: usize, a: f64, x: f64) -> Result<f64> {
    if !(a > -1.0) || !x.is_finite() {
        return invalid(format!(
            "Laguerre requires a > -1 and finite x (a = {a}, x = {x})"
        ));
    }
    if v == 0 {
        return Ok(1.0);
    }
    let mut lm = 1.0;
    let mut l = 1.0 + a - x;
    for k in 1..v {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + a - x) * l - (k + a) * lm) / (k + 1.0);
        lm = l;
        l = next;
    }
    Ok(l)
}

/// Legendre function of the second kind `Q_0(z) = ½ ln((z+1)/(z-1))` for `z > 1`.
pub fn legendre_q0(z: f64) -> f64 {
    // ln((z+1)/(z-1)) = ln1p(2/(z-1)), accurate for z close to 1 and large z.
    0.5 * (2.0 / (z - 1.0)).ln_1p()
}
