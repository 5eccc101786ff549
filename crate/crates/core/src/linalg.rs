//! Shared complex-matrix helpers.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type C64 = Complex64;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn from_rows(rows: &[&[C64]]) -> CMat {
    let n = rows.len();
    let m = rows[0].len();
    CMat::from_fn(n, m, |i, j| rows[i][j])
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Frobenius norm.
pub fn norm(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest absolute entry.
pub fn max_abs(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermiticity_residual(a: &CMat) -> f64 {
    max_abs(&(a - a.adjoint()))
}

pub fn pauli() -> [CMat; 3] {
    let o = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    [
        from_rows(&[&[o, one], &[one, o]]),
        from_rows(&[&[o, -I], &[I, o]]),
        from_rows(&[&[one, o], &[o, -one]]),
    ]
}

/// Permutations of `0..n` with their signs.
pub fn signed_permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out.into_iter()
        .map(|p| {
            let s = permutation_sign(&p);
            (p, s)
        })
        .collect()
}

/// Sign of a permutation given as a sequence of distinct integers
/// (0 if an entry repeats).
pub fn permutation_sign<T: Ord + Copy>(p: &[T]) -> f64 {
    let mut sign = 1.0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] == p[j] {
                return 0.0;
            }
            if p[i] > p[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues and
/// the matching orthonormal eigenvectors as columns.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let fm = faer::Mat::<C64>::from_fn(n, n, |i, j| m[(i, j)]);
    let e = fm
        .self_adjoint_eigen(faer::Side::Lower)
        .expect("self-adjoint eigendecomposition");
    let s = e.S();
    let u = e.U();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[a].re.total_cmp(&s[b].re));
    let vals = order.iter().map(|&i| s[i].re).collect();
    let vecs = CMat::from_fn(n, n, |i, j| u[(i, order[j])]);
    (vals, vecs)
}
