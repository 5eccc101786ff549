//! Flat torus backgrounds with a co-dimension-one wall at `s = 0` and the
//! truncated Fourier mode sets used for Galerkin discretization.
//!
//! Coordinates are ordered `x^1 .. x^n` with the transverse coordinate
//! `s = x^n` last; the wall is the slice `s = 0`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A flat torus `T^n` with side lengths `L_1 .. L_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusGeometry {
    dim: usize,
    lengths: Vec<f64>,
    orientation: i8,
    /// `K_a^b` on the wall, row-major `(n-1) x (n-1)`; always zero here.
    extrinsic_curvature: Vec<f64>,
}

impl TorusGeometry {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    /// Index of the transverse coordinate (0-based), always `n - 1`.
    pub fn transverse_index(&self) -> usize {
        self.dim - 1
    }

    pub fn transverse_length(&self) -> f64 {
        self.lengths[self.dim - 1]
    }

    /// Side lengths of the wall torus `T^{n-1}`.
    pub fn sigma_lengths(&self) -> &[f64] {
        &self.lengths[..self.dim - 1]
    }

    pub fn sigma_volume(&self) -> f64 {
        self.sigma_lengths().iter().product()
    }

    pub fn volume(&self) -> f64 {
        self.lengths.iter().product()
    }

    pub fn orientation(&self) -> i8 {
        self.orientation
    }

    pub fn extrinsic_curvature(&self) -> &[f64] {
        &self.extrinsic_curvature
    }

    /// True when the wall is totally geodesic (`K_a^b = 0`).
    pub fn is_flat_embedding(&self) -> bool {
        self.extrinsic_curvature.iter().all(|&k| k == 0.0)
    }

    /// Levi-Civita connection 1-form components `w_mu^{alpha beta}`; the
    /// metric is the identity so all of them vanish.
    pub fn spin_connection(&self) -> Vec<f64> {
        vec![0.0; self.dim * self.dim * self.dim]
    }
}

/// Builds the flat torus `T^n`, `n` in {2, 4}, with the wall at `s = 0`.
pub fn build_torus(n: usize, lengths: &[f64]) -> Result<TorusGeometry> {
    if n % 2 == 1 {
        return Err(Error::InvalidGeometry(format!("odd dimension {n}")));
    }
    if n != 2 && n != 4 {
        return Err(Error::UnsupportedDimension(n));
    }
    if lengths.len() != n {
        return Err(Error::InvalidGeometry(format!(
            "expected {n} side lengths, got {}",
            lengths.len()
        )));
    }
    if let Some(bad) = lengths.iter().find(|&&l| !(l > 0.0 && l.is_finite())) {
        return Err(Error::InvalidGeometry(format!("nonpositive side length {bad}")));
    }
    Ok(TorusGeometry {
        dim: n,
        lengths: lengths.to_vec(),
        orientation: 1,
        extrinsic_curvature: vec![0.0; (n - 1) * (n - 1)],
    })
}

/// Signed geodesic distance of `point` to the wall, in `(-L_n/2, L_n/2]`.
pub fn gaussian_coordinate(geom: &TorusGeometry, point: &[f64]) -> f64 {
    wrap_centered(point[geom.transverse_index()], geom.transverse_length())
}

/// Wraps `x` into `(-period/2, period/2]`.
pub fn wrap_centered(x: f64, period: f64) -> f64 {
    let mut y = x.rem_euclid(period);
    if y > 0.5 * period {
        y -= period;
    }
    y
}

/// Symmetric truncated Fourier mode set `|k_mu| <= cutoff_mu` on a torus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierModeSet {
    lengths: Vec<f64>,
    cutoffs: Vec<usize>,
    modes: Vec<Vec<i64>>,
}

impl FourierModeSet {
    /// Mode set on a torus with the given side lengths; modes are ordered
    /// lexicographically with the last coordinate fastest.
    pub fn new(lengths: &[f64], cutoffs: &[usize]) -> Result<Self> {
        if lengths.len() != cutoffs.len() {
            return Err(Error::InvalidCutoffs(format!(
                "{} cutoffs for {} directions",
                cutoffs.len(),
                lengths.len()
            )));
        }
        let mut modes: Vec<Vec<i64>> = vec![vec![]];
        for &c in cutoffs {
            let c = c as i64;
            modes = modes
                .into_iter()
                .flat_map(|m| {
                    (-c..=c).map(move |k| {
                        let mut v = m.clone();
                        v.push(k);
                        v
                    })
                })
                .collect();
        }
        Ok(Self {
            lengths: lengths.to_vec(),
            cutoffs: cutoffs.to_vec(),
            modes,
        })
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[Vec<i64>] {
        &self.modes
    }

    pub fn cutoffs(&self) -> &[usize] {
        &self.cutoffs
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn dim(&self) -> usize {
        self.lengths.len()
    }

    /// Momentum `p_mu = 2 pi k_mu / L_mu` of mode `i`.
    pub fn momentum(&self, i: usize) -> Vec<f64> {
        self.modes[i]
            .iter()
            .zip(&self.lengths)
            .map(|(&k, &l)| 2.0 * PI * k as f64 / l)
            .collect()
    }

    /// Position of an integer vector in the mode list, if present.
    pub fn index_of(&self, k: &[i64]) -> Option<usize> {
        let mut idx = 0usize;
        for (d, (&kd, &c)) in k.iter().zip(&self.cutoffs).enumerate() {
            let c = c as i64;
            if kd.abs() > c {
                return None;
            }
            let _ = d;
            idx = idx * (2 * c as usize + 1) + (kd + c) as usize;
        }
        Some(idx)
    }
}

/// Builds the Fourier mode set of a geometry, one cutoff per direction.
pub fn build_modes(geom: &TorusGeometry, cutoffs: &[usize]) -> Result<FourierModeSet> {
    if cutoffs.len() != geom.dim() {
        return Err(Error::InvalidCutoffs(format!(
            "{} cutoffs for dimension {}",
            cutoffs.len(),
            geom.dim()
        )));
    }
    FourierModeSet::new(geom.lengths(), cutoffs)
}

/// Transverse half-width of the wall patch and the length of the pasted
/// cylinder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WallPatch {
    pub half_width: f64,
    pub cylinder_length: f64,
}

impl WallPatch {
    pub fn new(geom: &TorusGeometry, half_width: f64, cylinder_length: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width < 0.5 * geom.transverse_length()) {
            return Err(Error::InvalidGeometry(format!(
                "patch half-width {half_width} must lie in (0, L_n/2)"
            )));
        }
        if !(cylinder_length > 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "cylinder length {cylinder_length} must be positive"
            )));
        }
        Ok(Self {
            half_width,
            cylinder_length,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_tori() {
        let t2 = build_torus(2, &[2.0 * PI, 2.0 * PI]).unwrap();
        assert_eq!(t2.sigma_lengths(), &[2.0 * PI]);
        assert!(t2.is_flat_embedding());
        assert!(t2.spin_connection().iter().all(|&w| w == 0.0));
        let t4 = build_torus(4, &[2.0 * PI; 4]).unwrap();
        assert_eq!(t4.sigma_lengths().len(), 3);
        assert_eq!(t4.transverse_index(), 3);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            build_torus(3, &[1.0, 1.0, 1.0]),
            Err(Error::InvalidGeometry(_))
        ));
        assert!(matches!(
            build_torus(6, &[1.0; 6]),
            Err(Error::UnsupportedDimension(6))
        ));
        assert!(build_torus(2, &[1.0, 0.0]).is_err());
        assert!(build_torus(2, &[1.0, -2.0]).is_err());
    }

    #[test]
    fn mode_counts() {
        let g = build_torus(2, &[2.0 * PI, 2.0 * PI]).unwrap();
        assert_eq!(build_modes(&g, &[1, 1]).unwrap().len(), 9);
        assert_eq!(build_modes(&g, &[32, 32]).unwrap().len(), 65 * 65);
        let single = build_modes(&g, &[0, 0]).unwrap();
        assert_eq!(single.modes(), &[vec![0, 0]]);
        assert!(matches!(
            build_modes(&g, &[1]),
            Err(Error::InvalidCutoffs(_))
        ));
    }

    #[test]
    fn gaussian_coordinate_wraps() {
        let g = build_torus(2, &[2.0 * PI, 3.0]).unwrap();
        assert_eq!(gaussian_coordinate(&g, &[1.0, 0.0]), 0.0);
        assert!((gaussian_coordinate(&g, &[1.0, 0.3]) - 0.3).abs() < 1e-15);
        assert!((gaussian_coordinate(&g, &[1.0, 3.0 - 0.1]) + 0.1).abs() < 1e-14);
        assert!((gaussian_coordinate(&g, &[0.0, 1.5]) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn patch_bounds() {
        let g = build_torus(2, &[2.0 * PI, 2.0 * PI]).unwrap();
        assert!(WallPatch::new(&g, 1.0, 2.0).is_ok());
        assert!(WallPatch::new(&g, PI, 2.0).is_err());
        assert!(WallPatch::new(&g, 1.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn mode_set_symmetric(c0 in 0usize..5, c1 in 0usize..5, l in 0.5f64..10.0) {
            let m = FourierModeSet::new(&[l, 2.0 * l], &[c0, c1]).unwrap();
            prop_assert_eq!(m.len(), (2 * c0 + 1) * (2 * c1 + 1));
            for (i, k) in m.modes().iter().enumerate() {
                let neg: Vec<i64> = k.iter().map(|x| -x).collect();
                prop_assert!(m.index_of(&neg).is_some());
                prop_assert_eq!(m.index_of(k), Some(i));
            }
        }
    }
}
