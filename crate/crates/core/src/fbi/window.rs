use std::f64::consts::PI;
use std::sync::OnceLock;

/// `ĝ(ζ) = C exp(-1/(1-ζ²))` on `|ζ| < 1`, normalised so that `∫ĝ² = 1`,
/// i.e. `‖g‖_{L²(ℝ)} = (2π)^{-1/2}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub lambda: f64,
}

const TABLE_CELLS: usize = 8192;

struct Table {
    c: f64,
    /// `[ĝ, ĝ', ĝ'', ĝ''']` at `ζ_j = -1 + 2j/TABLE_CELLS`.
    nodes: Vec<[f64; 4]>,
}

fn phi_derivs(z: f64) -> [f64; 5] {
    let a = 1.0 / (1.0 - z);
    let b = 1.0 / (1.0 + z);
    let mut out = [0.0; 5];
    let mut fact = 1.0;
    let (mut pa, mut pb) = (a, b);
    for (n, o) in out.iter_mut().enumerate() {
        if n > 0 {
            fact *= n as f64;
        }
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        *o = -0.5 * fact * (pa + sign * pb);
        pa *= a;
        pb *= b;
    }
    out
}

/// Unnormalised `exp(φ)` and its first four derivatives.
fn raw_derivs(z: f64) -> [f64; 5] {
    if z.abs() >= 1.0 {
        return [0.0; 5];
    }
    let p = phi_derivs(z);
    let e = p[0].exp();
    let (p1, p2, p3, p4) = (p[1], p[2], p[3], p[4]);
    [
        e,
        p1 * e,
        (p2 + p1 * p1) * e,
        (p3 + 3.0 * p1 * p2 + p1.powi(3)) * e,
        (p4 + 4.0 * p1 * p3 + 3.0 * p2 * p2 + 6.0 * p1 * p1 * p2 + p1.powi(4)) * e,
    ]
}

fn table() -> &'static Table {
    static T: OnceLock<Table> = OnceLock::new();
    T.get_or_init(|| {
        // The integrand is flat to all orders at ±1, so the trapezoid rule
        // converges faster than any power.
        let n = 20000;
        let h = 2.0 / n as f64;
        let s: f64 = (1..n).map(|j| raw_derivs(-1.0 + j as f64 * h)[0].powi(2)).sum::<f64>() * h;
        let c = 1.0 / s.sqrt();
        let nodes = (0..=TABLE_CELLS)
            .map(|j| {
                let z = -1.0 + 2.0 * j as f64 / TABLE_CELLS as f64;
                let d = raw_derivs(z);
                [c * d[0], c * d[1], c * d[2], c * d[3]]
            })
            .collect();
        Table { c, nodes }
    })
}

/// Normalisation constant `C`.
pub fn window_constant() -> f64 {
    table().c
}

/// Exact `ĝ^{(n)}(ζ)` for `n ≤ 4`.
pub fn ghat_deriv(z: f64, n: usize) -> f64 {
    table().c * raw_derivs(z)[n]
}

pub fn ghat(z: f64) -> f64 {
    ghat_deriv(z, 0)
}

/// `(ĝ, ĝ', ĝ'')` at `ζ` by cubic Hermite interpolation of a table.
#[inline]
pub fn ghat3(z: f64) -> (f64, f64, f64) {
    if z <= -1.0 || z >= 1.0 {
        return (0.0, 0.0, 0.0);
    }
    let t = table();
    let u = (z + 1.0) * 0.5 * TABLE_CELLS as f64;
    let j = (u as usize).min(TABLE_CELLS - 1);
    let s = u - j as f64;
    let dz = 2.0 / TABLE_CELLS as f64;
    let (a, b) = (&t.nodes[j], &t.nodes[j + 1]);
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = (s3 - 2.0 * s2 + s) * dz;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = (s3 - s2) * dz;
    (
        h00 * a[0] + h10 * a[1] + h01 * b[0] + h11 * b[1],
        h00 * a[1] + h10 * a[2] + h01 * b[1] + h11 * b[2],
        h00 * a[2] + h10 * a[3] + h01 * b[2] + h11 * b[3],
    )
}

/// `ĝ(ζ)` from the table.
#[inline]
pub fn ghat_fast(z: f64) -> f64 {
    ghat3(z).0
}

/// `g^{(n)}(z) = (2π)^{-1}∫(iζ)^n ĝ(ζ) e^{izζ} dζ` on the real line.
pub fn spatial(z: f64, n: u32) -> num_complex::Complex64 {
    let m = 400 + (z.abs() / 3.0) as usize * 2;
    let h = 2.0 / m as f64;
    let mut acc = num_complex::Complex64::new(0.0, 0.0);
    for j in 1..m {
        let zeta = -1.0 + j as f64 * h;
        acc += num_complex::Complex64::new(0.0, zeta).powu(n)
            * ghat(zeta)
            * num_complex::Complex64::from_polar(1.0, z * zeta);
    }
    acc * h / (2.0 * PI)
}

impl Window {
    pub fn new(lambda: f64) -> Self {
        Window { lambda }
    }

    /// Half-width `λ^{1/2}` of the packet spectrum.
    pub fn radius(&self) -> f64 {
        self.lambda.sqrt()
    }

    /// Fourier coefficient `λ^{-1/4} e^{-iηx} ĝ(λ^{-1/2}(η-ξ))` of `g_λ(·; x, ξ)`.
    pub fn packet_hat(&self, eta: f64, x: f64, xi: f64) -> num_complex::Complex64 {
        let r = self.radius();
        num_complex::Complex64::from_polar(self.lambda.powf(-0.25) * ghat((eta - xi) / r), -eta * x)
    }

    /// `λ^{1/4} e^{iξ(y-x)} g(λ^{1/2}(y-x))` on the line.
    pub fn packet_line(&self, x: f64, xi: f64, y: f64) -> num_complex::Complex64 {
        let r = self.radius();
        num_complex::Complex64::from_polar(self.lambda.powf(0.25), xi * (y - x)) * spatial(r * (y - x), 0)
    }
}
