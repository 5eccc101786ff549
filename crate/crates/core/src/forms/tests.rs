use super::*;
use crate::gauge::{abelian_wall_2d, assemble_gauge, UnitaryGroup};
use crate::geometry::build_torus;
use crate::linalg::{c, pauli};
use crate::profile::Profile;

fn scalar(v: C64) -> CMat {
    CMat::from_element(1, 1, v)
}

fn grid_form(dim: usize, n: usize, degree: usize, rank: usize, f: impl Fn(&[usize], &[f64]) -> CMat) -> FormField {
    FormField::from_fn(&vec![2.0 * PI; dim], &vec![n; dim], degree, rank, f).unwrap()
}

/// A smooth non-abelian U(2) connection on T^dim with bandwidth one.
fn u2_connection(dim: usize, n: usize, shift: f64) -> FormField {
    let [sx, sy, sz] = pauli();
    grid_form(dim, n, 1, 2, move |idx, x| {
        let mu = idx[0];
        let y = x[(mu + 1) % dim];
        let z = x[(mu + 2) % dim];
        (&sx * c(0.0, 0.4 * y.cos() + shift) + &sy * c(0.0, 0.3 * z.sin()) + &sz * c(0.0, 0.2 * (y + z).cos())
            + CMat::identity(2, 2) * c(0.0, 0.1 * mu as f64 + 0.25 * z.cos()))
            * c(1.0 + 0.1 * mu as f64, 0.0)
    })
}

/// A real antisymmetric so(4) connection on T^4.
fn so4_connection(n: usize, shift: f64) -> FormField {
    grid_form(4, n, 1, 4, move |idx, x| {
        let mu = idx[0] as f64;
        let mut m = CMat::zeros(4, 4);
        let mut k = 0.0;
        for i in 0..4 {
            for j in (i + 1)..4 {
                k += 1.0;
                let v = 0.2 * (x[(i + j) % 4] + 0.3 * k + mu).sin() + shift * (k - mu);
                m[(i, j)] = c(v, 0.0);
                m[(j, i)] = c(-v, 0.0);
            }
        }
        m
    })
}

#[test]
fn index_tuples_enumerates_subsets() {
    assert_eq!(index_tuples(4, 2).len(), 6);
    assert_eq!(index_tuples(3, 0), vec![Vec::<usize>::new()]);
    assert!(index_tuples(2, 3).is_empty());
}

#[test]
fn wedge_is_graded_commutative_for_scalars() {
    let a = grid_form(3, 6, 1, 1, |i, x| scalar(c((x[0] + i[0] as f64).sin(), 0.0)));
    let b = grid_form(3, 6, 1, 1, |i, x| scalar(c((2.0 * x[1]).cos() + i[0] as f64, 0.0)));
    let ab = a.wedge(&b).unwrap();
    let ba = b.wedge(&a).unwrap();
    assert!(ab.plus(&ba).unwrap().max_abs() < 1e-14);
    assert!(a.wedge(&a).unwrap().max_abs() < 1e-14);
    let top = ab.wedge(&a).unwrap();
    assert_eq!(top.degree(), 3);
    assert!(matches!(top.wedge(&a), Err(Error::Degree(_))));
}

#[test]
fn spectral_derivative_and_dd_zero() {
    let f = grid_form(2, 8, 0, 1, |_, x| scalar(c((2.0 * x[0]).sin() * x[1].cos(), 0.0)));
    let df = f.d().unwrap();
    for (i, v) in df.component(&[0]).unwrap().iter().enumerate() {
        let x = df.point(i);
        assert!((v[(0, 0)].re - 2.0 * (2.0 * x[0]).cos() * x[1].cos()).abs() < 1e-12);
    }
    assert!(df.d().unwrap().max_abs() < 1e-12);
    let a = u2_connection(3, 8, 0.0);
    assert!(a.d().unwrap().d().unwrap().max_abs() < 1e-12);
    assert_eq!(a.d().unwrap().d().unwrap().d().unwrap().degree(), 3);
}

#[test]
fn flux_quantization_fixes_chern_normalization() {
    for q in [-2i64, 1, 3] {
        let lengths = [1.3, 2.1];
        // A = i (2 pi Q / L_1)(x^2 / L_2) dx^1 has F_12 = -i 2 pi Q / (L_1 L_2)
        let f12 = c(0.0, -2.0 * PI * q as f64 / (lengths[0] * lengths[1]));
        let mut f = FormField::zero(&lengths, &[3, 3], 2, 1).unwrap();
        f.set_component(&[0, 1], vec![scalar(f12); 9]).unwrap();
        let ch = chern_character(&f, 1).unwrap();
        assert!((ch[1].integrate().unwrap().re - q as f64).abs() < 1e-12);
        assert!((ch[0].component(&[]).unwrap()[0][(0, 0)].re - 1.0).abs() < 1e-15);
    }
}

#[test]
fn chern_character_trivial_cases() {
    let z = FormField::zero(&[1.0; 4], &[2; 4], 2, 3).unwrap();
    let ch = chern_character(&z, 2).unwrap();
    assert_eq!(ch[0].component(&[]).unwrap()[0][(0, 0)], c(3.0, 0.0));
    assert_eq!(ch[1].max_abs(), 0.0);
    assert_eq!(ch[2].max_abs(), 0.0);
    assert!(matches!(chern_character(&z, 3), Err(Error::Degree(_))));
    // traceless curvature has ch_1 = 0
    let sz = pauli()[2].clone();
    let f = grid_form(2, 4, 2, 2, |_, x| &sz * c(0.0, x[0].sin()));
    assert!(InvariantPolynomial::Chern(1).evaluate(&f).unwrap().max_abs() < 1e-15);
}

#[test]
fn chern_forms_are_closed() {
    let a = u2_connection(4, 8, 0.1);
    let f = curvature(&a).unwrap();
    let ch = chern_character(&f, 2).unwrap();
    assert!(ch[1].d().unwrap().max_abs() < 1e-10);
    // ch_2 is a top form, closedness is checked on T^5 instead
    let a5 = u2_connection(5, 6, 0.1);
    let ch2 = InvariantPolynomial::Chern(2).evaluate(&curvature(&a5).unwrap()).unwrap();
    assert!(ch2.max_abs() > 1e-4);
    assert!(ch2.d().unwrap().max_abs() < 1e-10);
}

fn transgression_residual(p: InvariantPolynomial, a0: &FormField, a1: &FormField) -> f64 {
    let t = transgression(p, a0, a1).unwrap();
    let lhs = t.d().unwrap();
    let rhs = p
        .evaluate(&curvature(a1).unwrap())
        .unwrap()
        .minus(&p.evaluate(&curvature(a0).unwrap()).unwrap())
        .unwrap();
    assert!(rhs.max_abs() > 1e-6, "nontrivial test data");
    lhs.minus(&rhs).unwrap().max_abs()
}

#[test]
fn transgression_identity_ch1_ch2() {
    let a0 = u2_connection(4, 8, 0.0);
    let a1 = u2_connection(4, 8, 0.3).scaled(c(1.2, 0.0));
    assert!(transgression_residual(InvariantPolynomial::Chern(1), &a0, &a1) < 1e-10);
    assert!(transgression_residual(InvariantPolynomial::Chern(2), &a0, &a1) < 1e-9);
}

#[test]
fn abelian_ch1_transgression_is_the_difference() {
    let a0 = grid_form(2, 6, 1, 1, |i, x| scalar(c(0.0, 0.3 * x[1 - i[0]].sin())));
    let a1 = grid_form(2, 6, 1, 1, |i, x| scalar(c(0.0, 0.5 * x[i[0]].cos() + 0.2)));
    let t = transgression(InvariantPolynomial::Chern(1), &a0, &a1).unwrap();
    let expect = a1.minus(&a0).unwrap().trace().scaled(c(0.0, 1.0 / (2.0 * PI)));
    assert!(t.minus(&expect).unwrap().max_abs() < 1e-15);
    assert_eq!(transgression(InvariantPolynomial::Chern(1), &a0, &a0).unwrap().max_abs(), 0.0);
}

#[test]
fn a_hat_transgression_identity() {
    let g0 = so4_connection(8, 0.0);
    let g1 = so4_connection(8, 0.05);
    assert!(transgression_residual(InvariantPolynomial::AHat4, &g0, &g1) < 1e-9);
    assert_eq!(transgression(InvariantPolynomial::AHat4, &g0, &g0).unwrap().max_abs(), 0.0);
}

#[test]
fn a_hat_two_routes_agree() {
    let c_ = a_hat_series_coefficients(3);
    assert_eq!(c_[0], 0.0);
    assert!((c_[1] + 1.0 / 6.0).abs() < 1e-16);
    assert!((c_[2] - 1.0 / 180.0).abs() < 1e-16);
    assert!((c_[3] + 1.0 / 2835.0).abs() < 1e-16);
    let r = curvature(&so4_connection(6, 0.1)).unwrap();
    let series = a_hat(&r).unwrap();
    assert_eq!(series.len(), 2);
    let direct = InvariantPolynomial::AHat4.evaluate(&r).unwrap();
    let scale = direct.max_abs();
    assert!(scale > 1e-6);
    assert!(series[1].minus(&direct).unwrap().max_abs() < 1e-14 * scale.max(1.0));
    // -p_1 / 24 with p_1 = -(1 / 8 pi^2) tr R^2
    let p1 = r.wedge(&r).unwrap().trace().scaled(c(-1.0 / (8.0 * PI * PI), 0.0));
    assert!(direct.minus(&p1.scaled(c(-1.0 / 24.0, 0.0))).unwrap().max_abs() < 1e-16);
}

#[test]
fn a_hat_trivial_cases() {
    let r2 = FormField::zero(&[1.0; 2], &[2; 2], 2, 2).unwrap();
    let ah = a_hat(&r2).unwrap();
    assert_eq!(ah.len(), 1);
    assert_eq!(ah[0].component(&[]).unwrap()[0][(0, 0)], c(1.0, 0.0));
    let r4 = FormField::zero(&[1.0; 4], &[2; 4], 2, 4).unwrap();
    assert_eq!(a_hat(&r4).unwrap()[1].max_abs(), 0.0);
}

// so(3) generators (J_i)_{jk} = -eps_{ijk} embedded in so(6)
fn so3_in_so6(i: usize) -> CMat {
    let mut m = CMat::zeros(6, 6);
    let (j, k) = ((i + 1) % 3, (i + 2) % 3);
    m[(j, k)] = c(-1.0, 0.0);
    m[(k, j)] = c(1.0, 0.0);
    m
}

#[test]
fn correction_term_vanishing_conditions() {
    // K = 0: coinciding frame connections give exactly zero
    let g3 = grid_form(3, 4, 1, 4, |i, x| {
        let mut m = CMat::zeros(4, 4);
        m[(0, 1)] = c(x[i[0]].sin(), 0.0);
        m[(1, 0)] = c(-x[i[0]].sin(), 0.0);
        m
    });
    let f3 = grid_form(3, 4, 2, 1, |_, x| scalar(c(0.0, x[0].cos())));
    let z3 = FormField::zero(&[2.0 * PI; 3], &[4; 3], 2, 1).unwrap();
    assert_eq!(correction_term_ta(&g3, &g3, &f3, &z3).unwrap(), 0.0);
    // n = 4: only ch_0 can pair with the 3-form, so any frame data gives 0
    let g3b = g3.scaled(c(0.5, 0.0));
    assert_eq!(correction_term_ta(&g3, &g3b, &f3, &z3).unwrap(), 0.0);
    // n = 2: nothing to transgress
    let g1 = FormField::zero(&[1.0], &[2], 1, 2).unwrap();
    let f1 = FormField::zero(&[1.0, 1.0], &[2, 2], 2, 1).unwrap();
    assert_eq!(correction_term_ta(&g1, &g1, &f1, &f1).unwrap(), 0.0);
}

#[test]
fn correction_term_six_dimensional_case() {
    let lengths = [1.0; 5];
    let grid = [2; 5];
    let gamma = FormField::zero(&lengths, &grid, 1, 6).unwrap();
    let mut deformed = FormField::zero(&lengths, &grid, 1, 6).unwrap();
    for i in 0..3 {
        deformed.set_component(&[i], vec![so3_in_so6(i); 32]).unwrap();
    }
    let cval = 0.7;
    // trace-carrying jump: T A-hat = -(1/48 pi^2) dx^012 and ch_1 jump = -c/2pi dx^34
    let mut fp = FormField::zero(&lengths, &grid, 2, 1).unwrap();
    fp.set_component(&[3, 4], vec![scalar(c(0.0, cval)); 32]).unwrap();
    let fm = FormField::zero(&lengths, &grid, 2, 1).unwrap();
    let ta = correction_term_ta(&gamma, &deformed, &fp, &fm).unwrap();
    assert!((ta - cval / (96.0 * PI.powi(3))).abs() < 1e-15, "{ta}");
    // traceless jump: condition (c) holds and the term vanishes
    let sz = pauli()[2].clone();
    let mut fp2 = FormField::zero(&lengths, &grid, 2, 2).unwrap();
    fp2.set_component(&[3, 4], vec![&sz * c(0.0, cval); 32]).unwrap();
    let fm2 = FormField::zero(&lengths, &grid, 2, 2).unwrap();
    assert_eq!(correction_term_ta(&gamma, &deformed, &fp2, &fm2).unwrap(), 0.0);
}

#[test]
fn json_round_trip() {
    let a = u2_connection(2, 4, 0.2);
    let back = FormField::from_json(&a.to_json()).unwrap();
    assert_eq!(a, back);
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("a.json");
    a.write_json(&p).unwrap();
    assert_eq!(FormField::read_json(&p).unwrap(), a);
    assert!(FormField::from_json("{\"lengths\":[1.0],\"grid\":[2],\"degree\":2,\"rank\":1,\"components\":[]}").is_err());
}

fn t4_config(b: f64, beta: f64, profile: Profile) -> GaugeConfig {
    let g = build_torus(4, &[2.0 * PI; 4]).unwrap();
    let mut a1 = crate::gauge::FourierField::zero(3, 1);
    a1.insert(vec![0, 1, 0], scalar(c(0.0, 0.5 * b)));
    a1.insert(vec![0, -1, 0], scalar(c(0.0, 0.5 * b)));
    let mut b3 = crate::gauge::FourierField::zero(3, 1);
    b3.insert(vec![0, 1, 0], scalar(c(0.5 * beta, 0.0)));
    b3.insert(vec![0, -1, 0], scalar(c(-0.5 * beta, 0.0)));
    let z = crate::gauge::FourierField::zero(3, 1);
    assemble_gauge(&g, UnitaryGroup(1), vec![a1, z.clone(), z.clone()], vec![z.clone(), z, b3], profile, 0).unwrap()
}

use crate::gauge::GaugeConfig;

#[test]
fn bulk_integral_flux_and_wall() {
    let g = build_torus(2, &[2.0 * PI * 1.3, 2.0 * PI]).unwrap();
    // no field
    let cfg = abelian_wall_2d(&g, 0.2, 0.0, Profile::sharp(), 0).unwrap();
    assert!(pontryagin_bulk_integral(&cfg).unwrap().value.abs() < 1e-14);
    // uniform flux, no wall
    for q in [1, 2, -1] {
        let cfg = abelian_wall_2d(&g, 0.2, 0.0, Profile::sharp(), q).unwrap();
        assert!((pontryagin_bulk_integral(&cfg).unwrap().value - q as f64).abs() < 1e-9);
    }
    // sharp wall: Q - nu with nu = beta L_1 / 2 pi, split evenly by the ramp
    let (beta, q) = (0.45, 1);
    let cfg = abelian_wall_2d(&g, 0.2, beta, Profile::sharp(), q).unwrap();
    let r = pontryagin_bulk_integral(&cfg).unwrap();
    let nu = beta * g.lengths()[0] / (2.0 * PI);
    assert!((r.value - (q as f64 - nu)).abs() < 1e-10, "{r:?}");
    assert!((r.minus_side - r.plus_side).abs() < 1e-10);
    assert!((r.value - r.value.round()).abs() > 0.1);
}

#[test]
fn bulk_density_matches_pointwise_field_strength() {
    let cfg = t4_config(0.6, 0.8, Profile::cylinder(2.0).unwrap());
    let perms = signed_permutations(4);
    let slice = build_slice(&cfg);
    for t in [-1.0, 0.3, 1.7, 4.0] {
        let on_grid = slice_integral(&cfg, &slice, &perms, t);
        // wall average of the pointwise density
        let k = 9usize;
        let mut avg = 0.0;
        for i in 0..k {
            let x2 = 2.0 * PI * i as f64 / k as f64;
            avg += index_density_at(&cfg, &[0.1, x2, 0.4, t]).unwrap();
        }
        avg *= (2.0 * PI).powi(3) / k as f64;
        assert!((on_grid + avg).abs() < 1e-12, "t = {t}: {on_grid} vs {avg}");
    }
}

#[test]
fn cylinder_integral_closed_form() {
    // int_C P = pi beta b for A_1 = i b cos x2, B_3 = i beta sin x2
    let (b, beta) = (0.6, 0.8);
    for l in [1.0, 3.0] {
        let cfg = t4_config(b, beta, Profile::cylinder(l).unwrap());
        let v = pontryagin_integral_range(&cfg, 0.0, l).unwrap();
        assert!((v - PI * beta * b).abs() < 1e-10, "{v}");
    }
}

#[test]
fn density_signs() {
    assert_eq!(super::bulk::density_sign(2).unwrap(), 1.0);
    assert_eq!(super::bulk::density_sign(4).unwrap(), -1.0);
}

use super::bulk::{build_slice, slice_integral};
use crate::linalg::signed_permutations;
