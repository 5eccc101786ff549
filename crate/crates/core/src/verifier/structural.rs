//! Structural invariants that every run should satisfy regardless of the
//! gauge data: Clifford relations, Hermiticity, chirality grading, index
//! pairing, heat-time independence, exactness of transgressions and
//! integrality of Chern numbers.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{compute_index, IndexComputation, RunBlock};
use crate::clifford::{standard_rep, wall_adapt, GammaRep};
use crate::forms::{curvature, pontryagin_bulk_integral, transgression, FormField, InvariantPolynomial};
use crate::gauge::{abelian_wall_2d, assemble_gauge, FourierField, UnitaryGroup};
use crate::geometry::build_torus;
use crate::linalg::{pauli, CMat, C64};
use crate::profile::make_chi_delta;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuralEntry {
    pub name: String,
    pub residual: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StructuralReport {
    pub entries: Vec<StructuralEntry>,
}

impl StructuralReport {
    fn push(&mut self, name: impl Into<String>, residual: f64) {
        self.entries.push(StructuralEntry {
            name: name.into(),
            residual,
        });
    }

    /// Largest residual; NaN entries count as failures.
    pub fn worst(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| if e.residual.is_nan() { f64::INFINITY } else { e.residual })
            .fold(0.0, f64::max)
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.worst() < tol
    }

    pub fn summary(&self) -> String {
        self.entries
            .iter()
            .map(|e| format!("{} {:.2e}", e.name, e.residual))
            .collect::<Vec<_>>()
            .join(", ")
    }

    fn add_rep(&mut self, rep: &GammaRep) {
        let n = rep.dim();
        self.push(format!("clifford n={n}"), rep.clifford_residual());
        self.push(format!("chirality n={n}"), rep.chirality_residual());
        self.push(format!("wall adaptation n={n}"), wall_adapt(rep).orientation_residual());
    }

    /// Residuals attached to one index computation.
    pub fn for_index(ix: &IndexComputation, rep: &GammaRep) -> Self {
        let mut r = StructuralReport::default();
        r.add_rep(rep);
        r.add_index(ix, &format!("n={}", rep.dim()));
        r
    }

    fn add_index(&mut self, ix: &IndexComputation, tag: &str) {
        self.push(format!("hermiticity {tag}"), ix.hermiticity_residual);
        self.push(
            format!("chirality anticommutator {tag}"),
            ix.anticommutator_residual.unwrap_or(f64::NAN),
        );
        self.push(format!("nonzero pairing {tag}"), ix.spectrum.pairing_residual(1e-8));
        self.push(format!("heat-time independence {tag}"), ix.heat_trace.deviation);
    }
}

// U(2) connection on T^dim with bandwidth one, used for exactness checks
fn u2_connection(dim: usize, n: usize, shift: f64) -> Result<FormField> {
    let [sx, sy, sz] = pauli();
    FormField::from_fn(&vec![2.0 * PI; dim], &vec![n; dim], 1, 2, |idx, x| {
        let mu = idx[0];
        let y = x[(mu + 1) % dim];
        let z = x[(mu + 2) % dim];
        let im = |v: f64| C64::new(0.0, v);
        &sx * im(0.4 * y.cos() + shift) + &sy * im(0.3 * z.sin()) + &sz * im(0.2 * (y + z).cos())
            + CMat::identity(2, 2) * im(0.1 * mu as f64)
    })
}

fn transgression_residual(p: InvariantPolynomial, a0: &FormField, a1: &FormField) -> Result<f64> {
    let lhs = transgression(p, a0, a1)?.d()?;
    let rhs = p.evaluate(&curvature(a1)?)?.minus(&p.evaluate(&curvature(a0)?)?)?;
    Ok(lhs.minus(&rhs)?.max_abs())
}

/// The full structural suite on small built-in configurations.
pub fn structural_suite() -> Result<StructuralReport> {
    let mut r = StructuralReport::default();
    for n in [2, 4] {
        r.add_rep(&standard_rep(n)?);
    }
    let run = RunBlock::default();

    let g2 = build_torus(2, &[2.0 * PI, 2.0 * PI])?;
    let smooth = make_chi_delta(0.5, 0.5)?;
    let c2 = abelian_wall_2d(&g2, 0.2, 0.6, smooth, 1)?;
    r.add_index(&compute_index(&c2, &[6, 6], &run)?, "n=2");

    let g4 = build_torus(4, &[2.0 * PI; 4])?;
    let c4 = assemble_gauge(
        &g4,
        UnitaryGroup(1),
        vec![
            FourierField::abelian_constant(3, 0.3),
            FourierField::zero(3, 1),
            FourierField::zero(3, 1),
        ],
        vec![
            FourierField::zero(3, 1),
            FourierField::zero(3, 1),
            FourierField::abelian_constant(3, 0.4),
        ],
        smooth,
        0,
    )?;
    r.add_index(&compute_index(&c4, &[1, 1, 1, 2], &run)?, "n=4");

    for (k, dim) in [(1, 3), (2, 4)] {
        let a0 = u2_connection(dim, 8, 0.0)?;
        let a1 = u2_connection(dim, 8, 0.35)?;
        let res = transgression_residual(InvariantPolynomial::Chern(k), &a0, &a1)?;
        r.push(format!("transgression ch{k}"), res);
    }

    for q in [-1i64, 2] {
        let cfg = abelian_wall_2d(&g2, 0.1, 0.0, smooth, q)?;
        let v = pontryagin_bulk_integral(&cfg)?.value;
        r.push(format!("chern integrality Q={q}"), (v - q as f64).abs());
    }
    Ok(r)
}
