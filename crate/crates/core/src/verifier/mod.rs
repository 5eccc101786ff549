//! Experiment orchestration: index, bulk integral, relative spectral
//! asymmetry and correction term for one configuration, the supporting
//! checks, and report files.
//!
//! The two sides of the index ledger are computed from the sharp wall
//! version of the configured data. The index itself comes from the bulk
//! Galerkin operator, which needs a profile without a sharp jump; a sharp
//! configuration is therefore smoothed with the `run.smoothing`
//! parameters before assembly (the homotopy check confirms that the index
//! does not depend on this choice).

mod config;
mod report;
mod structural;

pub use config::{
    CheckKind, ChecksBlock, EigensolverMode, ExperimentConfig, FourierTerm, GaugeBlock, GeometryBlock,
    ProfileSpec, RunBlock, Smoothing,
};
pub use report::{emit_report, ledger_line};
pub use structural::{structural_suite, StructuralReport};

use serde::{Deserialize, Serialize};

use crate::clifford::standard_rep;
use crate::dirac::{
    assemble_bulk, assemble_wall_family, bulk_modes, solve_transverse, HermitianOperator, TransverseModeProblem,
};
use crate::forms::{correction_term_ta, curvature, pontryagin_bulk_integral, BulkIntegral, FormField};
use crate::gauge::GaugeConfig;
use crate::heat_kernel::{check_dertau, check_cylinder_identity, relative_eta, DertauCheck, EtaResult, CylinderCheck};
use crate::profile::{make_chi_delta, Profile, Side};
use crate::spectral::{eigensolve, index_heat_trace, lanczos_lowest, EigenOptions, HeatTraceIndex, Spectrum};
use crate::{Error, Result};

/// Outcome of one requested check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub check: String,
    pub passed: bool,
    /// The quantity compared against the tolerance.
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckOutcome {
    fn below(check: &str, value: f64, tolerance: f64, detail: String) -> Self {
        CheckOutcome {
            check: check.into(),
            passed: value.is_finite() && value < tolerance,
            value,
            tolerance,
            detail,
        }
    }
}

/// Index of the bulk Galerkin operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexComputation {
    pub heat_trace: HeatTraceIndex,
    /// Zero modes `(right, left)`.
    pub kernel: (usize, usize),
    pub operator_dim: usize,
    pub basis: String,
    pub profile: Profile,
    pub hermiticity_residual: f64,
    pub anticommutator_residual: Option<f64>,
    pub spectrum: Spectrum,
}

/// Profile actually used for the bulk operator.
pub fn index_profile(cfg: &GaugeConfig, run: &RunBlock) -> Result<Profile> {
    if cfg.profile().is_sharp() {
        make_chi_delta(run.smoothing.delta, run.smoothing.delta0)
    } else {
        Ok(*cfg.profile())
    }
}

/// The bulk Galerkin operator whose index is reported.
pub fn bulk_operator(cfg: &GaugeConfig, cutoffs: &[usize], run: &RunBlock) -> Result<HermitianOperator> {
    let smooth = cfg.with_profile(index_profile(cfg, run)?)?;
    let rep = standard_rep(cfg.geometry().dim())?;
    let modes = bulk_modes(&smooth, cutoffs)?;
    assemble_bulk(&modes, &rep, &smooth)
}

pub fn compute_index(cfg: &GaugeConfig, cutoffs: &[usize], run: &RunBlock) -> Result<IndexComputation> {
    let op = bulk_operator(cfg, cutoffs, run).map_err(|e| e.in_stage("assembly"))?;
    let opts = EigenOptions::default();
    let spectrum = match run.eigensolver {
        EigensolverMode::Dense => eigensolve(&op),
        EigensolverMode::Lanczos => lanczos_lowest(&op, run.lanczos_count, opts),
    }
    .map_err(|e| e.in_stage("eigensolve"))?;
    let heat_trace = index_heat_trace(&spectrum, &run.heat_times).map_err(|e| e.in_stage("index"))?;
    let kernel = spectrum.kernel_counts(opts.zero_threshold * op.norm_bound().max(1.0));
    Ok(IndexComputation {
        heat_trace,
        kernel,
        operator_dim: op.dim(),
        basis: op.basis().describe(),
        profile: index_profile(cfg, run)?,
        hermiticity_residual: op.hermiticity_residual(),
        anticommutator_residual: op.anticommutator_residual(),
        spectrum,
    })
}

/// The correction term for a flat torus: the frame connection vanishes on
/// both sides of the deformation, and the one-sided gauge curvatures are
/// sampled on a wall grid resolving their bandwidth.
pub fn wall_correction_term(cfg: &GaugeConfig) -> Result<f64> {
    let geom = cfg.geometry();
    if !geom.is_flat_embedding() {
        return Err(Error::Unsupported("curved walls".into()));
    }
    let lengths = cfg.sigma_lengths();
    // no 3-form lives on a wall of dimension below 3
    if lengths.len() < 3 {
        return Ok(0.0);
    }
    let plus = cfg.wall_limit(Side::Plus);
    let minus = cfg.wall_limit(Side::Minus);
    let bw = plus.iter().chain(&minus).map(|a| a.bandwidth()).max().unwrap_or(0);
    let grid = vec![4 * bw + 2; lengths.len()];
    let gamma = FormField::zero(lengths, &grid, 1, geom.dim())?;
    let f_plus = curvature(&FormField::connection(&plus, lengths, &grid)?)?;
    let f_minus = curvature(&FormField::connection(&minus, lengths, &grid)?)?;
    correction_term_ta(&gamma, &gamma, &f_plus, &f_minus)
}

/// One row of the homotopy sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub delta: f64,
    pub index: i64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaSweep {
    pub rows: Vec<SweepRow>,
    /// Index of the sharp wall from the transverse solver (n = 2).
    pub transverse_index: Option<i64>,
    /// First pair of parameters between which the index changes; the
    /// sharp wall is reported as `delta = 0`.
    pub jump: Option<(f64, f64)>,
}

impl DeltaSweep {
    pub fn passed(&self) -> bool {
        self.jump.is_none() && !self.rows.is_empty()
    }
}

/// Index of the `chi^delta`-smoothed operator for every `delta`; in
/// n = 2 the sharp wall is added through the transverse solver.
pub fn run_delta_sweep(cfg: &ExperimentConfig, deltas: &[f64]) -> Result<DeltaSweep> {
    if deltas.iter().any(|&d| !(d > 0.0 && d <= 1.0)) {
        return Err(Error::Config("sweep deltas must lie in (0, 1]".into()));
    }
    let gauge = cfg.gauge_config()?;
    let sharp = gauge.with_profile(Profile::sharp())?;
    let mut rows = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let smoothed = sharp.with_profile(make_chi_delta(delta, cfg.run.smoothing.delta0)?)?;
        let ix = compute_index(&smoothed, &cfg.geometry.cutoffs, &cfg.run)?;
        rows.push(SweepRow {
            delta,
            index: ix.heat_trace.index,
            deviation: ix.heat_trace.deviation,
        });
    }
    let transverse_index = if cfg.geometry.n == 2 && gauge.rank() == 1 && gauge.is_sigma_constant() {
        let problem = TransverseModeProblem::new(&sharp, cfg.run.theta_cutoff)?;
        Some(solve_transverse(&problem, (-0.1, 0.1)).map_err(|e| e.in_stage("transverse"))?.index())
    } else {
        None
    };
    let mut seq: Vec<(f64, i64)> = transverse_index.map(|i| (0.0, i)).into_iter().collect();
    seq.extend(rows.iter().map(|r| (r.delta, r.index)));
    let jump = seq
        .windows(2)
        .find(|w| w[0].1 != w[1].1)
        .map(|w| (w[0].0, w[1].0));
    Ok(DeltaSweep {
        rows,
        transverse_index,
        jump,
    })
}

/// Everything computed for one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub name: String,
    pub config_hash: String,
    pub version: String,
    pub dimension: usize,
    pub cutoffs: Vec<usize>,
    pub index: i64,
    pub index_computation: IndexComputation,
    pub bulk: BulkIntegral,
    pub eta: EtaResult,
    pub spectral_flow: Option<i64>,
    pub ta: f64,
    /// `|index - (bulk - eta_tilde / 2 + ta)|`.
    pub residual: f64,
    pub tolerance: f64,
    pub checks: Vec<CheckOutcome>,
    pub cylinder: Option<CylinderCheck>,
    pub delta_sweep: Option<DeltaSweep>,
    pub dertau: Option<DertauCheck>,
    pub structural: Option<StructuralReport>,
    pub passed: bool,
}

impl IndexReport {
    /// Residual recomputed from the report's own fields.
    pub fn ledger_residual(&self) -> f64 {
        (self.index as f64 - (self.bulk.value - 0.5 * self.eta.eta_tilde + self.ta)).abs()
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<IndexReport> {
    cfg.validate()?;
    let gauge = cfg.gauge_config().map_err(|e| e.in_stage("gauge"))?;
    let sharp = gauge.with_profile(Profile::sharp())?;
    let n = cfg.geometry.n;
    let run = &cfg.run;
    let tol = run.tolerance;

    let ix = compute_index(&gauge, &cfg.geometry.cutoffs, run)?;
    let index = ix.heat_trace.index;

    let rep = standard_rep(n)?;
    let family = assemble_wall_family(&sharp, &rep, &cfg.sigma_cutoffs(), run.family_samples)
        .map_err(|e| e.in_stage("family"))?;
    let eta = relative_eta(&family).map_err(|e| e.in_stage("eta"))?;
    let bulk = pontryagin_bulk_integral(&sharp).map_err(|e| e.in_stage("bulk"))?;
    let ta = wall_correction_term(&sharp).map_err(|e| e.in_stage("ta"))?;
    let residual = (index as f64 - (bulk.value - 0.5 * eta.eta_tilde + ta)).abs();

    let mut checks = Vec::new();
    let mut cylinder = None;
    let mut delta_sweep = None;
    let mut dertau = None;
    let mut structural = None;
    for kind in CheckKind::ALL.into_iter().filter(|k| cfg.wants(*k)) {
        match kind {
            CheckKind::Ledger => {
                let worst = residual.max(ix.heat_trace.deviation);
                checks.push(CheckOutcome::below(
                    "ledger",
                    worst,
                    tol,
                    ledger_line(index, bulk.value, eta.eta_tilde, ta),
                ));
            }
            CheckKind::Cylinder => {
                let cyl = sharp.with_profile(Profile::cylinder(run.cylinder_length)?)?;
                let r = check_cylinder_identity(&cyl, &cfg.sigma_cutoffs(), run.family_samples)
                    .map_err(|e| e.in_stage("cylinder"))?;
                checks.push(CheckOutcome::below(
                    "cylinder",
                    r.residual,
                    tol,
                    format!("int_C P = {}, -eta/2 = {}", r.bulk, r.minus_half_eta),
                ));
                cylinder = Some(r);
            }
            CheckKind::Homotopy => {
                let s = run_delta_sweep(cfg, &run.deltas).map_err(|e| e.in_stage("homotopy"))?;
                let detail = match s.jump {
                    Some((a, b)) => format!("index jumps between delta = {a} and delta = {b}"),
                    None => format!("index constant over {} values", s.rows.len()),
                };
                checks.push(CheckOutcome {
                    check: "homotopy".into(),
                    passed: s.passed(),
                    value: if s.passed() { 0.0 } else { 1.0 },
                    tolerance: 0.5,
                    detail,
                });
                delta_sweep = Some(s);
            }
            CheckKind::Dertau => {
                let l = family.length();
                let r = check_dertau(&family, run.dertau_point * l, &[l / 256.0, l / 512.0])
                    .map_err(|e| e.in_stage("dertau"))?;
                let ratio = r.refinement_ratios()[0];
                let ok = r.relative_error[0] < 1e-3 && (3.0..5.0).contains(&ratio);
                checks.push(CheckOutcome {
                    check: "dertau".into(),
                    passed: ok,
                    value: r.relative_error[0],
                    tolerance: 1e-3,
                    detail: format!("refinement ratio {ratio:.3}"),
                });
                dertau = Some(r);
            }
            CheckKind::Flow => {
                let outcome = match (&eta.eta_minus, &eta.eta_plus, eta.spectral_flow) {
                    (Some(m), Some(p), Some(sf)) => {
                        let rec = eta.eta_tilde - (p.value - m.value) + 2.0 * sf as f64;
                        CheckOutcome::below("flow", rec.abs(), 1e-5, format!("spectral flow {sf}"))
                    }
                    _ => CheckOutcome {
                        check: "flow".into(),
                        passed: false,
                        value: f64::INFINITY,
                        tolerance: 1e-5,
                        detail: "endpoint operator has a kernel; eta or flow undefined".into(),
                    },
                };
                checks.push(outcome);
            }
            CheckKind::Ta => checks.push(CheckOutcome {
                check: "ta".into(),
                passed: ta == 0.0,
                value: ta.abs(),
                tolerance: 0.0,
                detail: "flat wall: the frame connection is unchanged by the collar deformation".into(),
            }),
            CheckKind::Structural => {
                let s = StructuralReport::for_index(&ix, &rep);
                checks.push(CheckOutcome::below("structural", s.worst(), 1e-8, s.summary()));
                structural = Some(s);
            }
        }
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(IndexReport {
        name: cfg.name.clone(),
        config_hash: cfg.hash(),
        version: env!("CARGO_PKG_VERSION").into(),
        dimension: n,
        cutoffs: cfg.geometry.cutoffs.clone(),
        index,
        bulk,
        spectral_flow: eta.spectral_flow,
        eta,
        ta,
        residual,
        tolerance: tol,
        checks,
        cylinder,
        delta_sweep,
        dertau,
        structural,
        passed,
        index_computation: ix,
    })
}
