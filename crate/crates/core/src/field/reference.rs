use super::SampledField;
use crate::{Error, Result};

/// Exact solution with `u(0) = f`, `u_t(0) = 0` for `u_tt = c2·u_xx`:
/// `½(f(x - ct) + f(x + ct))`, `c = √c2`.
pub fn dalembert_reference(c2: f64, f: &SampledField, t: f64) -> Result<SampledField> {
    let c = speed(c2)?;
    Ok(f.real_multiplier(|xi| (c * xi * t).cos()))
}

/// Exact solution with `u(0) = 0`, `u_t(0) = g`: `(2c)^{-1}∫_{x-ct}^{x+ct} g`.
pub fn dalembert_velocity(c2: f64, g: &SampledField, t: f64) -> Result<SampledField> {
    let c = speed(c2)?;
    Ok(g.real_multiplier(|xi| if xi == 0.0 { t } else { (c * xi * t).sin() / (c * xi) }))
}

fn speed(c2: f64) -> Result<f64> {
    if !(c2 > 0.0) {
        return Err(Error::MetricInvalid(format!("constant coefficient {c2} must be positive")));
    }
    Ok(c2.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Grid;

    #[test]
    fn translates_profile() {
        let g = Grid::torus(128).unwrap();
        let f = SampledField::from_real_fn(g, |x| (-(x - 3.0).powi(2) * 8.0).exp());
        let c2 = 2.25;
        let t = 0.4;
        let u = dalembert_reference(c2, &f, t).unwrap();
        let x = g.x(50);
        let want = 0.5 * ((-(x - 0.6 - 3.0).powi(2) * 8.0).exp() + (-(x + 0.6 - 3.0).powi(2) * 8.0).exp());
        assert!((u.values()[50].re - want).abs() < 1e-10);
    }

    #[test]
    fn velocity_branch_integrates() {
        let g = Grid::torus(64).unwrap();
        let gg = SampledField::from_real_fn(g, |x| (2.0 * x).cos());
        let u = dalembert_velocity(4.0, &gg, 0.3).unwrap();
        // ∫ cos(2y) over [x-0.6, x+0.6] / 4
        let x = g.x(9);
        let want = ((2.0 * (x + 0.6)).sin() - (2.0 * (x - 0.6)).sin()) / 8.0;
        assert!((u.values()[9].re - want).abs() < 1e-13);
    }
}
