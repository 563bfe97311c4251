//! Adaptive Dormand-Prince 5(4) for two-dimensional autonomous systems.

use crate::{Error, Result};

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

/// Integrates `y' = f(y)` from `y0` through the increasing (or decreasing)
/// output times `ts` starting at 0, returning the state at each time.
///
/// The error of the first component is measured absolutely and that of the
/// second relative to its size, which keeps the flow exactly homogeneous in
/// the second component when `f` is.
pub fn integrate<F>(f: F, y0: [f64; 2], ts: &[f64], tol: f64) -> Result<Vec<[f64; 2]>>
where
    F: Fn([f64; 2]) -> [f64; 2],
{
    let mut out = Vec::with_capacity(ts.len());
    let mut y = y0;
    let mut t = 0.0f64;
    let mut h: f64 = 1e-2;
    for &target in ts {
        let dir = if target >= t { 1.0 } else { -1.0 };
        let mut steps = 0usize;
        while (target - t) * dir > 1e-15 * (1.0 + target.abs()) {
            steps += 1;
            if steps > 1_000_000 {
                return Err(Error::FlowFailed("step count exceeded".into()));
            }
            let hs = h.min((target - t).abs()) * dir;
            let mut k = [[0.0; 2]; 7];
            k[0] = f(y);
            for s in 1..7 {
                let mut ys = y;
                for (j, kj) in k.iter().enumerate().take(s) {
                    ys[0] += hs * A[s][j] * kj[0];
                    ys[1] += hs * A[s][j] * kj[1];
                }
                k[s] = f(ys);
            }
            let mut y5 = y;
            let mut e = [0.0f64; 2];
            for s in 0..7 {
                y5[0] += hs * B5[s] * k[s][0];
                y5[1] += hs * B5[s] * k[s][1];
                e[0] += hs * (B5[s] - B4[s]) * k[s][0];
                e[1] += hs * (B5[s] - B4[s]) * k[s][1];
            }
            let scale1 = y[1].abs().max(y5[1].abs());
            let err = (e[0].abs() / tol).max(if scale1 > 0.0 { e[1].abs() / (tol * scale1) } else { 0.0 });
            if !err.is_finite() {
                return Err(Error::FlowFailed("non-finite state".into()));
            }
            if err <= 1.0 {
                t += hs;
                y = y5;
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = (hs.abs() * fac).max(1e-12);
        }
        t = target;
        out.push(y);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pendulum_energy_and_rotation() {
        // Harmonic oscillator: exact rotation.
        let ts: Vec<f64> = (1..=10).map(|i| i as f64 * 0.7).collect();
        let ys = integrate(|y| [y[1], -y[0]], [1.0, 0.5], &ts, 1e-11).unwrap();
        for (t, y) in ts.iter().zip(&ys) {
            let want = [t.cos() + 0.5 * t.sin(), -t.sin() + 0.5 * t.cos()];
            assert!((y[0] - want[0]).abs() < 1e-8 && (y[1] - want[1]).abs() < 1e-8);
        }
    }

    #[test]
    fn backwards() {
        let ys = integrate(|y| [1.0, y[1]], [0.0, 1.0], &[-1.0], 1e-12).unwrap();
        assert!((ys[0][0] + 1.0).abs() < 1e-12);
        assert!((ys[0][1] - (-1.0f64).exp()).abs() < 1e-10);
    }
}
