use super::*;
use crate::clifford::standard_rep;
use crate::gauge::{abelian_wall_2d, assemble_gauge, FourierField, UnitaryGroup};
use crate::geometry::build_torus;
use crate::linalg::c;
use crate::profile::{make_chi_delta, Profile};
use nalgebra::SymmetricEigen;
use std::f64::consts::PI;

fn dense_eigs(op: &HermitianOperator) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(op.to_dense()).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

fn t2(l1: f64, l2: f64) -> crate::geometry::TorusGeometry {
    build_torus(2, &[l1, l2]).unwrap()
}

#[test]
fn free_operator_spectrum_is_plus_minus_momentum() {
    let g = t2(2.0 * PI, 2.0 * PI);
    let cfg = abelian_wall_2d(&g, 0.0, 0.0, make_chi_delta(1.0, 0.5).unwrap(), 0).unwrap();
    let modes = bulk_modes(&cfg, &[1, 1]).unwrap();
    let op = assemble_bulk(&modes, &standard_rep(2).unwrap(), &cfg).unwrap();
    let mut oracle = Vec::new();
    for i in 0..modes.len() {
        let p = modes.momentum(i);
        let m = (p[0] * p[0] + p[1] * p[1]).sqrt();
        oracle.push(m);
        oracle.push(-m);
    }
    oracle.sort_by(f64::total_cmp);
    let e = dense_eigs(&op);
    for (a, b) in e.iter().zip(&oracle) {
        assert!((a - b).abs() < 1e-12);
    }
    let (sq, diag) = square(&op);
    assert_eq!(diag.off_diagonal_chiral, Some(0.0));
    let mut o2: Vec<f64> = oracle.iter().map(|x| x * x).collect();
    o2.sort_by(f64::total_cmp);
    for (a, b) in dense_eigs(&sq).iter().zip(&o2) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn wall_operator_is_hermitian_and_chiral() {
    let g = t2(2.0 * PI, 2.0 * PI);
    let beta = 2.0 * PI * 0.3 / g.lengths()[0];
    let cfg = abelian_wall_2d(&g, 0.0, beta, make_chi_delta(1.0, 0.5).unwrap(), 0).unwrap();
    let op = assemble_bulk(&bulk_modes(&cfg, &[4, 6]).unwrap(), &standard_rep(2).unwrap(), &cfg).unwrap();
    assert!(op.hermiticity_residual() < 1e-12);
    assert!(op.anticommutator_residual().unwrap() < 1e-14);
    // theta momentum is conserved: one block per wall mode
    assert_eq!(op.blocks().len(), 9);
}

#[test]
fn nonabelian_four_dimensional_operator_is_chiral() {
    let g = build_torus(4, &[2.0 * PI; 4]).unwrap();
    let [s1, _, s3] = crate::linalg::pauli();
    let mut a1 = FourierField::zero(3, 2);
    a1.insert(vec![0, 1, 0], &s1 * c(0.0, 0.2));
    a1.insert(vec![0, -1, 0], &s1 * c(0.0, 0.2));
    let b3 = FourierField::constant(3, &s3 * c(0.0, 0.4));
    let z = FourierField::zero(3, 2);
    let cfg = assemble_gauge(
        &g,
        UnitaryGroup(2),
        vec![a1, z.clone(), z.clone()],
        vec![z.clone(), z, b3],
        make_chi_delta(1.0, 0.5).unwrap(),
        0,
    )
    .unwrap();
    let op = assemble_bulk(&bulk_modes(&cfg, &[1, 1, 1, 2]).unwrap(), &standard_rep(4).unwrap(), &cfg).unwrap();
    assert!(op.hermiticity_residual() < 1e-12);
    assert!(op.anticommutator_residual().unwrap() < 1e-13);
    let (sq, d) = square(&op);
    assert!(d.off_diagonal_chiral.unwrap() < 1e-8);
    assert!(sq.commutator_residual().unwrap() < 1e-10);
}

#[test]
fn sharp_profile_rejected() {
    let g = t2(2.0 * PI, 2.0 * PI);
    let cfg = abelian_wall_2d(&g, 0.0, 0.5, Profile::sharp(), 0).unwrap();
    let modes = bulk_modes(&cfg, &[2, 2]).unwrap();
    assert!(matches!(
        assemble_bulk(&modes, &standard_rep(2).unwrap(), &cfg),
        Err(Error::SharpProfile)
    ));
}

#[test]
fn landau_levels_without_wall() {
    // no wall: lambda is exactly linear on each chain, E^2 = 2 |c| m
    for q in [1i64, 2, -1] {
        let g = t2(3.0, 5.0);
        let cfg = abelian_wall_2d(&g, 0.37, 0.0, make_chi_delta(1.0, 0.5).unwrap(), q).unwrap();
        let op = assemble_twisted(&cfg, 30).unwrap();
        let c = 2.0 * PI * q.abs() as f64 / (3.0 * 5.0);
        let e = dense_eigs(&op);
        let mut pos: Vec<f64> = e.iter().copied().filter(|x| *x > 1e-9).collect();
        pos.sort_by(f64::total_cmp);
        for m in 1..6 {
            for r in 0..q.unsigned_abs() as usize {
                let got = pos[(m - 1) * q.unsigned_abs() as usize + r];
                assert!((got - (2.0 * c * m as f64).sqrt()).abs() < 1e-9, "q={q} m={m}");
            }
        }
        let zeros = e.iter().filter(|x| x.abs() < 1e-9).count();
        assert_eq!(zeros, q.unsigned_abs() as usize);
    }
}

#[test]
fn wall_family_circle_spectrum() {
    let l = 2.0 * PI;
    let g = t2(l, l);
    let (a0, beta) = (0.2, 0.9);
    let cfg = abelian_wall_2d(&g, a0, beta, Profile::sharp(), 0).unwrap();
    let fam = assemble_wall_family(&cfg, &standard_rep(2).unwrap(), &[5], 16).unwrap();
    for s in [0.0, 0.3, 0.77, 1.0] {
        let e = dense_eigs(&fam.operator_at(s));
        let w = fam.weight(s);
        let mut oracle: Vec<f64> = (-5..=5).map(|k| 2.0 * PI * k as f64 / l + a0 + w * beta).collect();
        oracle.sort_by(f64::total_cmp);
        for (x, y) in e.iter().zip(&oracle) {
            assert!((x - y).abs() < 1e-13);
        }
    }
    let diff = fam.plus().to_dense() - fam.minus().to_dense();
    assert!(crate::linalg::max_abs(&(diff - fam.jump_operator().to_dense())) < 1e-14);
    // closed-form derivative against a central difference
    let (s, h) = (0.4, 1e-5);
    let fd = (fam.operator_at(s + h).to_dense() - fam.operator_at(s - h).to_dense()) / c(2.0 * h, 0.0);
    assert!(crate::linalg::max_abs(&(fd - fam.deriv_at(s).to_dense())) < 1e-8);
    assert!(assemble_wall_family(&cfg, &standard_rep(2).unwrap(), &[5], 4).is_err());
}

#[test]
fn constant_family_has_zero_derivative() {
    let g = t2(2.0 * PI, 2.0 * PI);
    let cfg = abelian_wall_2d(&g, 0.2, 0.0, Profile::sharp(), 0).unwrap();
    let fam = assemble_wall_family(&cfg, &standard_rep(2).unwrap(), &[3], 8).unwrap();
    assert_eq!(fam.deriv_at(0.5).nnz(), 0);
}

#[test]
fn transverse_circle_without_wall_matches_closed_form() {
    let (l1, l2) = (2.0 * PI, 4.0);
    let g = t2(l1, l2);
    let a = 0.3;
    let cfg = abelian_wall_2d(&g, a, 0.0, Profile::sharp(), 0).unwrap();
    let prob = TransverseModeProblem::new(&cfg, 2).unwrap();
    let sol = solve_transverse(&prob, (-2.5, 2.5)).unwrap();
    let mut oracle = Vec::new();
    for k in -2..=2 {
        let lam = 2.0 * PI * k as f64 / l1 + a;
        for m in -3i32..=3 {
            let e = (lam * lam + (2.0 * PI * m as f64 / l2).powi(2)).sqrt();
            for sgn in [-1.0, 1.0] {
                if e < 2.5 {
                    oracle.push(sgn * e);
                }
            }
        }
    }
    oracle.sort_by(f64::total_cmp);
    assert_eq!(sol.eigenvalues.len(), oracle.len(), "{:?}\n{:?}", sol.eigenvalues, oracle);
    for (x, y) in sol.eigenvalues.iter().zip(&oracle) {
        assert!((x - y).abs() < 1e-6, "{x} vs {y}");
    }
    // symmetric spectrum, no zero modes
    for (x, y) in sol.eigenvalues.iter().zip(sol.eigenvalues.iter().rev()) {
        assert!((x + y).abs() < 1e-6);
    }
    assert_eq!((sol.zero_modes_r, sol.zero_modes_l), (0, 0));
}

#[test]
fn transverse_circle_balanced_zero_modes() {
    // a = -beta / 2 makes int lambda_0 vanish: one zero mode of each chirality
    let l = 2.0 * PI;
    let g = t2(l, l);
    let beta = 0.8;
    let cfg = abelian_wall_2d(&g, -0.5 * beta, beta, Profile::sharp(), 0).unwrap();
    let sol = solve_transverse(&TransverseModeProblem::new(&cfg, 3).unwrap(), (-0.1, 0.1)).unwrap();
    assert_eq!((sol.zero_modes_r, sol.zero_modes_l), (1, 1));
    assert_eq!(sol.index(), 0);
}

#[test]
fn transverse_line_matches_landau_galerkin() {
    let g = t2(2.0 * PI, 2.0 * PI);
    let beta = 2.0 * PI * 0.3 / g.lengths()[0];
    let cfg = abelian_wall_2d(&g, 0.0, beta, Profile::sharp(), 1).unwrap();
    let sol = solve_transverse(&TransverseModeProblem::new(&cfg, 24).unwrap(), (-1.2, 1.2)).unwrap();
    assert_eq!(sol.index(), 1);
    // the smoothed operator at small delta approaches the sharp spectrum
    let smooth = cfg.with_profile(make_chi_delta(0.0, 0.05).unwrap()).unwrap();
    let e = dense_eigs(&assemble_twisted(&smooth, 80).unwrap());
    let low: Vec<f64> = e.iter().copied().filter(|x| x.abs() < 1.2).collect();
    assert_eq!(low.len(), sol.eigenvalues.len());
    for (x, y) in low.iter().zip(&sol.eigenvalues) {
        assert!((x - y).abs() < 1e-3, "{x} vs {y}");
    }
}

#[test]
fn transverse_line_inadequate_cutoff_loses_zero_mode() {
    let g = t2(2.0 * PI, 2.0 * PI);
    let cfg = abelian_wall_2d(&g, 0.0, 0.3, Profile::sharp(), 1).unwrap();
    let sol = solve_transverse(&TransverseModeProblem::new(&cfg, 0).unwrap(), (-0.1, 0.1)).unwrap();
    assert_eq!(sol.index(), 0);
}

#[test]
fn dump_round_trip() {
    let g = t2(2.0 * PI, 2.0 * PI);
    let cfg = abelian_wall_2d(&g, 0.1, 0.4, make_chi_delta(0.5, 0.5).unwrap(), 0).unwrap();
    let op = assemble_bulk(&bulk_modes(&cfg, &[1, 2]).unwrap(), &standard_rep(2).unwrap(), &cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("op.bin");
    op.write_dump(&path).unwrap();
    assert_eq!(read_dump(&path).unwrap(), op.to_dense());
}
