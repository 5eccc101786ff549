//! Matrix-valued differential forms sampled on uniform periodic grids.
//!
//! A form of degree `p` on a torus of dimension `m` stores one array of
//! grid samples per increasing index tuple `i_1 < ... < i_p`, so that
//! `omega = sum_I omega_I dx^{i_1} ^ ... ^ dx^{i_p}`. Products keep the
//! matrix order, the exterior derivative is spectral (FFT along each
//! axis) and top-degree integrals use the trapezoid rule, which is exact
//! for trigonometric polynomials resolved by the grid.

mod bulk;
mod poly;

pub use bulk::{index_density_at, pontryagin_bulk_integral, pontryagin_integral_range, BulkIntegral};
pub use poly::{
    a_hat, a_hat_series_coefficients, chern_character, correction_term_ta, transgression,
    InvariantPolynomial,
};

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::gauge::FourierField;
use crate::linalg::{permutation_sign, CMat, C64};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FormField {
    lengths: Vec<f64>,
    grid: Vec<usize>,
    degree: usize,
    rank: usize,
    comps: BTreeMap<Vec<usize>, Vec<CMat>>,
}

/// All increasing `p`-tuples drawn from `0..m`.
pub fn index_tuples(m: usize, p: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if p <= m {
        rec(0, m, p, &mut Vec::new(), &mut out);
    }
    out
}

impl FormField {
    pub fn zero(lengths: &[f64], grid: &[usize], degree: usize, rank: usize) -> Result<Self> {
        if lengths.len() != grid.len() || lengths.is_empty() {
            return Err(Error::Degree("lengths and grid must have the same nonzero length".into()));
        }
        if grid.iter().any(|&g| g == 0) || lengths.iter().any(|&l| !(l > 0.0)) {
            return Err(Error::Degree("grid sizes and lengths must be positive".into()));
        }
        if degree > lengths.len() {
            return Err(Error::Degree(format!("degree {degree} exceeds dimension {}", lengths.len())));
        }
        if rank == 0 {
            return Err(Error::Degree("rank must be positive".into()));
        }
        Ok(FormField {
            lengths: lengths.to_vec(),
            grid: grid.to_vec(),
            degree,
            rank,
            comps: BTreeMap::new(),
        })
    }

    /// Form whose component `I` at grid point `x` is `f(I, x)`.
    pub fn from_fn(
        lengths: &[f64],
        grid: &[usize],
        degree: usize,
        rank: usize,
        f: impl Fn(&[usize], &[f64]) -> CMat,
    ) -> Result<Self> {
        let mut out = Self::zero(lengths, grid, degree, rank)?;
        let points: Vec<Vec<f64>> = (0..out.npoints()).map(|i| out.point(i)).collect();
        for idx in index_tuples(lengths.len(), degree) {
            let vals: Vec<CMat> = points.iter().map(|x| f(&idx, x)).collect();
            out.set_component(&idx, vals)?;
        }
        Ok(out)
    }

    /// Constant 0-form.
    pub fn constant(lengths: &[f64], grid: &[usize], value: CMat) -> Result<Self> {
        let rank = value.nrows();
        Self::from_fn(lengths, grid, 0, rank, |_, _| value.clone())
    }

    /// The 1-form `sum_a A_a dx^a` sampled from Fourier data.
    pub fn connection(conn: &[FourierField], lengths: &[f64], grid: &[usize]) -> Result<Self> {
        if conn.len() != lengths.len() {
            return Err(Error::Degree("one connection component per direction".into()));
        }
        let rank = conn.first().map(|a| a.rank()).unwrap_or(1);
        Self::from_fn(lengths, grid, 1, rank, |idx, x| conn[idx[0]].eval(x, lengths))
    }

    pub fn dim(&self) -> usize {
        self.lengths.len()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn grid(&self) -> &[usize] {
        &self.grid
    }

    pub fn npoints(&self) -> usize {
        self.grid.iter().product()
    }

    /// Coordinates of grid point `i` (row-major, last axis fastest).
    pub fn point(&self, mut i: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.dim()];
        for a in (0..self.dim()).rev() {
            let k = i % self.grid[a];
            i /= self.grid[a];
            x[a] = k as f64 * self.lengths[a] / self.grid[a] as f64;
        }
        x
    }

    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &Vec<CMat>)> {
        self.comps.iter()
    }

    pub fn component(&self, idx: &[usize]) -> Option<&[CMat]> {
        self.comps.get(idx).map(|v| v.as_slice())
    }

    pub fn set_component(&mut self, idx: &[usize], values: Vec<CMat>) -> Result<()> {
        if idx.len() != self.degree || idx.windows(2).any(|w| w[0] >= w[1]) || idx.iter().any(|&i| i >= self.dim()) {
            return Err(Error::Degree(format!("bad index tuple {idx:?} for a {}-form", self.degree)));
        }
        if values.len() != self.npoints() || values.iter().any(|m| m.nrows() != self.rank || m.ncols() != self.rank) {
            return Err(Error::Degree("component values do not match grid or rank".into()));
        }
        self.comps.insert(idx.to_vec(), values);
        Ok(())
    }

    fn same_space(&self, other: &Self) -> Result<()> {
        if self.lengths != other.lengths || self.grid != other.grid || self.rank != other.rank {
            return Err(Error::Degree("forms live on different grids or bundles".into()));
        }
        Ok(())
    }

    fn accumulate(&mut self, idx: Vec<usize>, vals: Vec<CMat>, s: C64) {
        match self.comps.get_mut(&idx) {
            Some(cur) => cur.iter_mut().zip(vals).for_each(|(c, v)| *c += v * s),
            None => {
                self.comps.insert(idx, vals.into_iter().map(|v| v * s).collect());
            }
        }
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        if self.degree != other.degree {
            return Err(Error::Degree(format!("cannot add a {}-form and a {}-form", self.degree, other.degree)));
        }
        let mut out = self.clone();
        for (idx, v) in &other.comps {
            out.accumulate(idx.clone(), v.clone(), C64::new(1.0, 0.0));
        }
        Ok(out)
    }

    pub fn minus(&self, other: &Self) -> Result<Self> {
        self.plus(&other.scaled(C64::new(-1.0, 0.0)))
    }

    pub fn scaled(&self, s: C64) -> Self {
        let mut out = self.clone();
        out.comps.values_mut().for_each(|v| v.iter_mut().for_each(|m| *m *= s));
        out
    }

    /// `self ^ other` with matrix products in the given order.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        let degree = self.degree + other.degree;
        if degree > self.dim() {
            return Err(Error::Degree(format!(
                "wedge of degree {degree} exceeds dimension {}",
                self.dim()
            )));
        }
        let mut out = Self::zero(&self.lengths, &self.grid, degree, self.rank)?;
        for (i, a) in &self.comps {
            for (j, b) in &other.comps {
                let cat: Vec<usize> = i.iter().chain(j).copied().collect();
                let sign = permutation_sign(&cat);
                if sign == 0.0 {
                    continue;
                }
                let mut k = cat;
                k.sort_unstable();
                let vals = a.iter().zip(b).map(|(x, y)| x * y).collect();
                out.accumulate(k, vals, C64::new(sign, 0.0));
            }
        }
        Ok(out)
    }

    /// Spectral partial derivative of grid samples along `axis`.
    fn partial(&self, vals: &[CMat], axis: usize, planner: &mut FftPlanner<f64>) -> Vec<CMat> {
        let n = self.grid[axis];
        let stride: usize = self.grid[axis + 1..].iter().product();
        let total = self.npoints();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let k: Vec<f64> = (0..n)
            .map(|j| {
                let s = if j <= n / 2 { j as i64 } else { j as i64 - n as i64 };
                if n % 2 == 0 && j == n / 2 {
                    0.0
                } else {
                    2.0 * PI * s as f64 / self.lengths[axis]
                }
            })
            .collect();
        let mut out = vec![CMat::zeros(self.rank, self.rank); total];
        let mut line = vec![C64::new(0.0, 0.0); n];
        for r in 0..self.rank {
            for c in 0..self.rank {
                for base in 0..total {
                    if (base / stride) % n != 0 {
                        continue;
                    }
                    for (j, l) in line.iter_mut().enumerate() {
                        *l = vals[base + j * stride][(r, c)];
                    }
                    fwd.process(&mut line);
                    for (l, kk) in line.iter_mut().zip(&k) {
                        *l *= C64::new(0.0, *kk / n as f64);
                    }
                    inv.process(&mut line);
                    for (j, l) in line.iter().enumerate() {
                        out[base + j * stride][(r, c)] = *l;
                    }
                }
            }
        }
        out
    }

    /// Exterior derivative, `d(omega_I dx^I) = sum_mu d_mu omega_I dx^mu ^ dx^I`.
    pub fn d(&self) -> Result<Self> {
        let degree = self.degree + 1;
        let mut out = Self::zero(&self.lengths, &self.grid, degree.min(self.dim()), self.rank)?;
        if degree > self.dim() {
            // d of a top form vanishes; report it as the zero top form
            return Ok(out);
        }
        let mut planner = FftPlanner::new();
        for (idx, vals) in &self.comps {
            for mu in (0..self.dim()).filter(|m| !idx.contains(m)) {
                let below = idx.iter().filter(|&&i| i < mu).count();
                let sign = if below % 2 == 0 { 1.0 } else { -1.0 };
                let mut k = idx.clone();
                k.push(mu);
                k.sort_unstable();
                out.accumulate(k, self.partial(vals, mu, &mut planner), C64::new(sign, 0.0));
            }
        }
        Ok(out)
    }

    /// Matrix trace, giving a rank-one form.
    pub fn trace(&self) -> Self {
        FormField {
            lengths: self.lengths.clone(),
            grid: self.grid.clone(),
            degree: self.degree,
            rank: 1,
            comps: self
                .comps
                .iter()
                .map(|(k, v)| (k.clone(), v.iter().map(|m| CMat::from_element(1, 1, m.trace())).collect()))
                .collect(),
        }
    }

    /// Integral of a top-degree form over the torus (trace of the matrix
    /// value for higher rank).
    pub fn integrate(&self) -> Result<C64> {
        if self.degree != self.dim() {
            return Err(Error::Degree(format!(
                "only {}-forms can be integrated, got degree {}",
                self.dim(),
                self.degree
            )));
        }
        let cell: f64 = self.lengths.iter().zip(&self.grid).map(|(l, g)| l / *g as f64).product();
        let top: Vec<usize> = (0..self.dim()).collect();
        Ok(self
            .comps
            .get(&top)
            .map(|v| v.iter().map(|m| m.trace()).sum::<C64>() * cell)
            .unwrap_or_default())
    }

    /// Largest entry modulus over all components and grid points.
    pub fn max_abs(&self) -> f64 {
        self.comps
            .values()
            .flat_map(|v| v.iter().flat_map(|m| m.iter().map(|z| z.norm())))
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&FormFieldData::from(self)).expect("form serialization")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let data: FormFieldData = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        data.try_into()
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Curvature `F = dA + A ^ A` of a connection 1-form.
pub fn curvature(a: &FormField) -> Result<FormField> {
    if a.degree() != 1 {
        return Err(Error::Degree("curvature needs a 1-form".into()));
    }
    a.d()?.plus(&a.wedge(a)?)
}

/// Serialized layout: each component lists, per grid point, the matrix
/// entries row-major as `[re, im]` pairs.
#[derive(Serialize, Deserialize)]
struct FormFieldData {
    lengths: Vec<f64>,
    grid: Vec<usize>,
    degree: usize,
    rank: usize,
    components: Vec<ComponentData>,
}

#[derive(Serialize, Deserialize)]
struct ComponentData {
    index: Vec<usize>,
    values: Vec<Vec<[f64; 2]>>,
}

impl From<&FormField> for FormFieldData {
    fn from(f: &FormField) -> Self {
        FormFieldData {
            lengths: f.lengths.clone(),
            grid: f.grid.clone(),
            degree: f.degree,
            rank: f.rank,
            components: f
                .comps
                .iter()
                .map(|(idx, vals)| ComponentData {
                    index: idx.clone(),
                    values: vals
                        .iter()
                        .map(|m| {
                            (0..f.rank)
                                .flat_map(|r| (0..f.rank).map(move |c| (r, c)))
                                .map(|(r, c)| [m[(r, c)].re, m[(r, c)].im])
                                .collect()
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

impl TryFrom<FormFieldData> for FormField {
    type Error = Error;

    fn try_from(d: FormFieldData) -> Result<Self> {
        let mut out = FormField::zero(&d.lengths, &d.grid, d.degree, d.rank)?;
        for comp in d.components {
            let vals = comp
                .values
                .iter()
                .map(|entries| {
                    if entries.len() != d.rank * d.rank {
                        return Err(Error::Config("matrix entry count does not match rank".into()));
                    }
                    Ok(CMat::from_fn(d.rank, d.rank, |r, c| {
                        let [re, im] = entries[r * d.rank + c];
                        C64::new(re, im)
                    }))
                })
                .collect::<Result<Vec<_>>>()?;
            out.set_component(&comp.index, vals)?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests;
