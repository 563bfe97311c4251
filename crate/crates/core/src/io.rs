//! JSON and CSV formats for fields, metrics, phase-space samples and reports.
//!
//! * sampled field: `{"L", "N", "re": [...], "im": [...]}`, CSV `x,re,im`
//! * metric: a sampled field plus `{"M_bound", "kind", "params", "seed"}`;
//!   samples may be omitted for generated families
//! * phase-space field: `{"λ", "x": [...], "ξ": [...], "re": [[...]], "im": [[...]]}`
//!   with rows indexed by `x`

use crate::fbi::{PhaseGrid, PhaseSpaceField};
use crate::field::{make_metric_family, Grid, Metric, MetricSpec, SampledField};
use crate::hamflow::HamiltonState;
use crate::{Error, Result, C64};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::Path;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledFieldJson {
    #[serde(rename = "L")]
    pub length: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub re: Vec<f64>,
    #[serde(default)]
    pub im: Vec<f64>,
}

impl SampledFieldJson {
    pub fn from_field(f: &SampledField) -> Self {
        SampledFieldJson { length: f.grid().length, n: f.grid().n, re: f.re(), im: f.im() }
    }

    pub fn to_field(&self) -> Result<SampledField> {
        let grid = Grid::new(self.n, self.length)?;
        field_from_parts(grid, &self.re, &self.im)
    }
}

fn field_from_parts(grid: Grid, re: &[f64], im: &[f64]) -> Result<SampledField> {
    if re.len() != grid.n || !(im.is_empty() || im.len() == grid.n) {
        return Err(Error::Parse(format!("expected {} samples, got re {} / im {}", grid.n, re.len(), im.len())));
    }
    let v = (0..grid.n).map(|i| C64::new(re[i], im.get(i).copied().unwrap_or(0.0))).collect();
    SampledField::new(grid, v)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricJson {
    #[serde(rename = "L", default = "two_pi")]
    pub length: f64,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub re: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub im: Vec<f64>,
    #[serde(rename = "M_bound", default)]
    pub m_bound: Option<f64>,
    #[serde(flatten)]
    pub spec: MetricSpec,
    #[serde(default)]
    pub seed: Option<u64>,
}

fn two_pi() -> f64 {
    2.0 * std::f64::consts::PI
}

impl MetricJson {
    pub fn from_metric(m: &Metric) -> Self {
        MetricJson {
            length: m.grid().length,
            n: m.grid().n,
            re: m.field.re(),
            im: Vec::new(),
            m_bound: Some(m.m_bound),
            spec: m.spec.clone(),
            seed: m.seed,
        }
    }

    /// Validated metric: from the samples if present, otherwise generated
    /// from `kind`/`params` and `seed`.
    pub fn to_metric(&self) -> Result<Metric> {
        let grid = Grid::new(self.n, self.length)?;
        let f = if self.re.is_empty() {
            make_metric_family(&self.spec, grid, self.seed.unwrap_or(0))?.field
        } else {
            field_from_parts(grid, &self.re, &self.im)?
        };
        let m = Metric::from_samples(f, self.m_bound)?;
        Ok(Metric { spec: self.spec.clone(), seed: self.seed, ..m })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceFieldJson {
    #[serde(rename = "λ", alias = "lambda")]
    pub lambda: f64,
    pub x: Vec<f64>,
    #[serde(rename = "ξ", alias = "xi")]
    pub xi: Vec<f64>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl PhaseSpaceFieldJson {
    pub fn from_field(f: &PhaseSpaceField) -> Self {
        let pg = &f.grid;
        let x: Vec<f64> = (0..pg.n_x).map(|i| pg.x(i)).collect();
        let row = |i: usize, part: fn(&C64) -> f64| (0..pg.n_xi()).map(|j| part(&f.values[pg.index(i, j)])).collect();
        PhaseSpaceFieldJson {
            lambda: pg.lambda,
            x,
            xi: pg.xi.clone(),
            re: (0..pg.n_x).map(|i| row(i, |z| z.re)).collect(),
            im: (0..pg.n_x).map(|i| row(i, |z| z.im)).collect(),
        }
    }

    /// Rebuilds the field; the `x` nodes must be uniform on `[0, L)`.
    pub fn to_field(&self, length: f64) -> Result<PhaseSpaceField> {
        let n_x = self.x.len();
        if n_x == 0 || self.xi.len() < 2 {
            return Err(Error::Parse("phase-space field needs x and at least two ξ nodes".into()));
        }
        let h_xi = self.xi[1] - self.xi[0];
        let pg = PhaseGrid { lambda: self.lambda, length, n_x, h_xi, xi: self.xi.clone() };
        for (i, &x) in self.x.iter().enumerate() {
            if (x - pg.x(i)).abs() > 1e-9 * length {
                return Err(Error::Parse(format!("x node {i} = {x} is not uniform")));
            }
        }
        if self.re.len() != n_x || self.im.len() != n_x {
            return Err(Error::Parse("re/im must have one row per x node".into()));
        }
        let mut f = PhaseSpaceField::zeros(pg);
        for i in 0..n_x {
            if self.re[i].len() != self.xi.len() || self.im[i].len() != self.xi.len() {
                return Err(Error::Parse(format!("row {i} has the wrong length")));
            }
            for j in 0..self.xi.len() {
                let idx = f.grid.index(i, j);
                f.values[idx] = C64::new(self.re[i][j], self.im[i][j]);
            }
        }
        Ok(f)
    }
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let mut s = String::new();
    std::fs::File::open(path.as_ref())?.read_to_string(&mut s)?;
    Ok(serde_json::from_str(&s)?)
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut f = std::fs::File::create(path.as_ref())?;
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    Ok(())
}

pub fn read_field(path: impl AsRef<Path>) -> Result<SampledField> {
    read_json::<SampledFieldJson>(path)?.to_field()
}

pub fn read_metric(path: impl AsRef<Path>) -> Result<Metric> {
    read_json::<MetricJson>(path)?.to_metric()
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

/// Writes a header and rows of numbers.
pub fn write_csv<W: Write>(out: W, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(r.iter().map(|v| format!("{v:e}"))).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_file(path: impl AsRef<Path>, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    write_csv(std::fs::File::create(path.as_ref())?, header, rows)
}

/// Numeric rows of a CSV with a header line.
pub fn read_csv<R: Read>(input: R) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let row = rec
            .iter()
            .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{s:?}: {e}"))))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

/// `x,re,im` rows.
pub fn field_csv<W: Write>(out: W, f: &SampledField) -> Result<()> {
    let g = *f.grid();
    write_csv(out, &["x", "re", "im"], f.values().iter().enumerate().map(|(i, z)| vec![g.x(i), z.re, z.im]))
}

/// Reads `x,re,im` rows written by [`field_csv`]; `length` is the period.
pub fn field_from_csv<R: Read>(input: R, length: f64) -> Result<SampledField> {
    let (header, rows) = read_csv(input)?;
    if header != ["x", "re", "im"] {
        return Err(Error::Parse(format!("expected header x,re,im, got {header:?}")));
    }
    let grid = Grid::new(rows.len(), length)?;
    for (i, r) in rows.iter().enumerate() {
        if r.len() != 3 || (r[0] - grid.x(i)).abs() > 1e-9 * length {
            return Err(Error::Parse(format!("row {i} does not sit on the uniform grid")));
        }
    }
    let re: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    let im: Vec<f64> = rows.iter().map(|r| r[2]).collect();
    field_from_parts(grid, &re, &im)
}

/// `x,xi,abs` rows of `|F|`.
pub fn heatmap_csv<W: Write>(out: W, f: &PhaseSpaceField) -> Result<()> {
    let pg = &f.grid;
    let rows = (0..pg.n_x).flat_map(|i| (0..pg.n_xi()).map(move |j| (i, j)));
    write_csv(out, &["x", "xi", "abs"], rows.map(|(i, j)| vec![pg.x(i), pg.xi[j], f.values[pg.index(i, j)].norm()]))
}

/// `t,x,xi` rows.
pub fn trajectory_csv<W: Write>(out: W, states: &[HamiltonState]) -> Result<()> {
    write_csv(out, &["t", "x", "xi"], states.iter().map(|s| vec![s.t, s.x, s.xi]))
}
