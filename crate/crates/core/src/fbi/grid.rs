use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

/// Tensor quadrature grid on `𝕋 × ℝ`: `x_i = iL/N_x` and `ξ` nodes on the
/// lattice `(j + ½)h_ξ`, restricted to a union of `|ξ|` intervals.
///
/// With `h_ξ` a power of two the lattice sum `Σ_j h_ξ λ^{-1/2} ĝ²` is a
/// Poisson-summed constant close to one, so `T*T = c·I` exactly on
/// functions whose packets stay inside the cover.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub lambda: f64,
    pub length: f64,
    pub n_x: usize,
    pub h_xi: f64,
    pub xi: Vec<f64>,
}

/// Largest power of two `≤ λ^{1/2}/22`; the frame constant is then within
/// about 1e-9 of one.
pub fn fine_h_xi(lambda: f64) -> f64 {
    pow2_floor(lambda.sqrt() / 22.0)
}

/// Largest power of two `≤ λ^{1/2}/11` (frame constant within about 1e-6).
pub fn coarse_h_xi(lambda: f64) -> f64 {
    pow2_floor(lambda.sqrt() / 11.0)
}

/// Largest power of two `≤ λ^{1/2}/div`.
pub fn h_xi_for(lambda: f64, div: f64) -> f64 {
    pow2_floor(lambda.sqrt() / div)
}

fn pow2_floor(v: f64) -> f64 {
    2f64.powi(v.log2().floor() as i32)
}

impl PhaseGrid {
    /// Nodes `±(j+½)h_ξ` whose modulus lies in one of the `cover` intervals.
    pub fn new(lambda: f64, length: f64, n_x: usize, h_xi: f64, cover: &[(f64, f64)]) -> Result<Self> {
        if !(lambda >= 1.0) || n_x < 4 || !n_x.is_power_of_two() || !(h_xi > 0.0) {
            return Err(Error::InvalidArgument(format!("phase grid lambda={lambda} n_x={n_x} h_xi={h_xi}")));
        }
        let inside = |v: f64| cover.iter().any(|&(lo, hi)| v >= lo && v <= hi);
        let top = cover.iter().fold(0.0f64, |m, c| m.max(c.1));
        let mut pos = Vec::new();
        let mut j = 0usize;
        loop {
            let v = (j as f64 + 0.5) * h_xi;
            if v > top {
                break;
            }
            if inside(v) {
                pos.push(v);
            }
            j += 1;
        }
        let mut xi: Vec<f64> = pos.iter().rev().map(|v| -v).collect();
        xi.extend(pos);
        Ok(PhaseGrid { lambda, length, n_x, h_xi, xi })
    }

    /// Grid with `h_x ≤ L/(8λ)` and the fine `h_ξ`, covering `|ξ| ∈ [lo, hi]`.
    pub fn resolved(lambda: f64, length: f64, lo: f64, hi: f64) -> Result<Self> {
        let n_x = ((8.0 * lambda).ceil() as usize).next_power_of_two();
        PhaseGrid::new(lambda, length, n_x, fine_h_xi(lambda), &[(lo, hi)])
    }

    /// Grid resolving only the packet scale: `N_x = 2^⌈log2(c·λ^{1/2})⌉`.
    pub fn compact(lambda: f64, length: f64, nx_factor: f64, h_xi: f64, cover: &[(f64, f64)]) -> Result<Self> {
        let n_x = ((nx_factor * lambda.sqrt()).ceil() as usize).next_power_of_two().max(8);
        PhaseGrid::new(lambda, length, n_x, h_xi, cover)
    }

    pub fn h_x(&self) -> f64 {
        self.length / self.n_x as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.h_x()
    }

    pub fn n_xi(&self) -> usize {
        self.xi.len()
    }

    pub fn len(&self) -> usize {
        self.n_x * self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    /// Quadrature weight `h_x h_ξ`.
    pub fn weight(&self) -> f64 {
        self.h_x() * self.h_xi
    }

    /// Flat index of node `(x_i, ξ_j)`; columns of fixed `ξ` are contiguous.
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.n_x + i
    }
}

/// Samples on a [`PhaseGrid`].
#[derive(Clone, Debug)]
pub struct PhaseSpaceField {
    pub grid: PhaseGrid,
    pub values: Vec<C64>,
}

impl PhaseSpaceField {
    pub fn zeros(grid: PhaseGrid) -> Self {
        let n = grid.len();
        PhaseSpaceField { grid, values: vec![C64::new(0.0, 0.0); n] }
    }

    pub fn column(&self, j: usize) -> &[C64] {
        &self.values[j * self.grid.n_x..(j + 1) * self.grid.n_x]
    }

    /// `(h_x h_ξ Σ|F|²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.grid.weight() * self.values.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Weighted inner product `Σ w F conj(G)`.
    pub fn inner(&self, other: &PhaseSpaceField) -> C64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum::<C64>() * self.grid.weight()
    }

    /// Largest `|F|` over nodes with `|ξ|` outside `[lo, hi]`.
    pub fn max_outside(&self, lo: f64, hi: f64) -> f64 {
        let mut m = 0.0f64;
        for (j, &xi) in self.grid.xi.iter().enumerate() {
            if xi.abs() < lo || xi.abs() > hi {
                m = self.column(j).iter().fold(m, |m, z| m.max(z.norm()));
            }
        }
        m
    }
}
