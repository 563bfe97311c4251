//! Per-band residual orders of the transported packets.

use super::Parametrix;
use crate::field::SampledField;
use crate::fit::loglog_fit;
use crate::Result;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub k: u32,
    pub lambda: f64,
    /// `‖f‖`, `f = (i/2)Q^σ β_k g`.
    pub input_norm: f64,
    /// `‖(D_t + P)E g‖ / ‖f‖`.
    pub halfwave_ratio: f64,
    /// `‖(D_t² - P²)E g‖ / ‖f‖`.
    pub fullwave_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualTable {
    pub t: f64,
    pub sign: f64,
    pub rows: Vec<ResidualRow>,
    /// Fitted exponents of the ratios in `λ`.
    pub halfwave_slope: f64,
    pub fullwave_slope: f64,
}

impl Parametrix {
    pub fn residual_table(&self, g: &SampledField, ks: &[u32], sign: f64, t: f64) -> Result<ResidualTable> {
        let mut rows = Vec::with_capacity(ks.len());
        for &k in ks {
            let f = self.band_input(k, sign, g)?;
            let n = f.l2_norm();
            let half = self.apply_halfwave_residual(k, sign, g, t)?.l2_norm();
            let full = self.apply_fullwave_residual(k, sign, g, t)?.l2_norm();
            rows.push(ResidualRow {
                k,
                lambda: self.band(k)?.ops.lambda,
                input_norm: n,
                halfwave_ratio: half / n,
                fullwave_ratio: full / n,
            });
        }
        let lam: Vec<f64> = rows.iter().map(|r| r.lambda).collect();
        let slope = |v: Vec<f64>| loglog_fit(&lam, &v).map_or(f64::NAN, |f| f.slope);
        Ok(ResidualTable {
            t,
            sign,
            halfwave_slope: slope(rows.iter().map(|r| r.halfwave_ratio).collect()),
            fullwave_slope: slope(rows.iter().map(|r| r.fullwave_ratio).collect()),
            rows,
        })
    }
}
