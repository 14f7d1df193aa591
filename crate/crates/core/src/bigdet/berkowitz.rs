//! Division-free characteristic polynomial (Samuelson–Berkowitz).
//!
//! For `t = 0..n` split the trailing block of `A` as
//!
//! ```text
//! [ a_tt  R_t ]
//! [ S_t   M_t ]
//! ```
//!
//! and let `C_t` be the lower-triangular Toeplitz matrix whose first column is
//! `(-1, a_tt, R_t S_t, R_t M_t S_t, ..., R_t M_t^(n-t-2) S_t)`. Then
//! `C_0 C_1 ... C_(n-1)` is the coefficient vector `(p_0, ..., p_n)` of
//! `p(x) = det(A - x I)`, with `p_0 = (-1)^n` and `p_n = det A`.

use rayon::prelude::*;

use super::ring::Ring;

/// Evaluation order. Both produce identical results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvalMode {
    /// Iterated vector-matrix products and a right-to-left Toeplitz sweep.
    #[default]
    Sequential,
    /// Repeated squaring for the Krylov rows and a balanced product tree,
    /// fanned out over rayon.
    Parallel,
}

struct Dense<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

fn dense_mul<R: Ring>(ring: &R, a: &Dense<R::Elem>, b: &Dense<R::Elem>) -> Dense<R::Elem> {
    assert_eq!(a.cols, b.rows);
    let data: Vec<R::Elem> = (0..a.rows * b.cols)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / b.cols, idx % b.cols);
            let mut acc = ring.zero();
            for k in 0..a.cols {
                ring.mul_acc(&mut acc, &a.data[i * a.cols + k], &b.data[k * b.cols + j]);
            }
            acc
        })
        .collect();
    Dense { rows: a.rows, cols: b.cols, data }
}

fn tree_product<R: Ring>(ring: &R, mats: &[Dense<R::Elem>]) -> Dense<R::Elem> {
    match mats.len() {
        1 => Dense { rows: mats[0].rows, cols: mats[0].cols, data: mats[0].data.clone() },
        len => {
            let (l, r) = mats.split_at(len / 2);
            let (a, b) = rayon::join(|| tree_product(ring, l), || tree_product(ring, r));
            dense_mul(ring, &a, &b)
        }
    }
}

/// Nonzero entries `(i, j)` of an `n x n` row-major matrix.
fn nonzeros<R: Ring>(ring: &R, n: usize, a: &[R::Entry]) -> Vec<(usize, usize)> {
    (0..n * n)
        .filter(|&k| !ring.entry_is_zero(&a[k]))
        .map(|k| (k / n, k % n))
        .collect()
}

/// First column of `C_t`, length `n - t + 1`.
fn toeplitz_column_seq<R: Ring>(
    ring: &R,
    n: usize,
    a: &[R::Entry],
    nz: &[(usize, usize)],
    t: usize,
) -> Vec<R::Elem> {
    let m = n - t - 1;
    let mut c = Vec::with_capacity(m + 2);
    c.push(ring.neg(&ring.one()));
    c.push(ring.lift(&a[t * n + t]));
    if m == 0 {
        return c;
    }
    let block: Vec<(usize, usize)> = nz.iter().copied().filter(|&(i, j)| i > t && j > t).collect();
    let s_rows: Vec<usize> = (t + 1..n).filter(|&i| !ring.entry_is_zero(&a[i * n + t])).collect();
    let mut u: Vec<R::Elem> = (t + 1..n).map(|j| ring.lift(&a[t * n + j])).collect();
    for k in 0..m {
        let mut s = ring.zero();
        for &i in &s_rows {
            ring.mul_entry_acc(&mut s, &u[i - t - 1], &a[i * n + t]);
        }
        c.push(s);
        if k + 1 < m {
            let mut next = vec![ring.zero(); m];
            for &(i, j) in &block {
                ring.mul_entry_acc(&mut next[j - t - 1], &u[i - t - 1], &a[i * n + j]);
            }
            u = next;
        }
    }
    c
}

fn toeplitz_column_par<R: Ring>(ring: &R, n: usize, a: &[R::Entry], t: usize) -> Vec<R::Elem> {
    let m = n - t - 1;
    let mut c = vec![ring.neg(&ring.one()), ring.lift(&a[t * n + t])];
    if m == 0 {
        return c;
    }
    let mut power = Dense {
        rows: m,
        cols: m,
        data: (0..m * m).map(|k| ring.lift(&a[(t + 1 + k / m) * n + t + 1 + k % m])).collect(),
    };
    // rows[j] = R M^j, doubled per step with the current power M^(2^k).
    let mut rows: Vec<Vec<R::Elem>> = vec![(t + 1..n).map(|j| ring.lift(&a[t * n + j])).collect()];
    while rows.len() < m {
        let next: Vec<Vec<R::Elem>> = rows
            .par_iter()
            .map(|y| {
                (0..m)
                    .map(|j| {
                        let mut acc = ring.zero();
                        for (i, yi) in y.iter().enumerate() {
                            ring.mul_acc(&mut acc, yi, &power.data[i * m + j]);
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        rows.extend(next);
        if rows.len() < m {
            power = dense_mul(ring, &power, &power);
        }
    }
    rows.truncate(m);
    let krylov: Vec<R::Elem> = rows
        .par_iter()
        .map(|y| {
            let mut s = ring.zero();
            for (i, yi) in y.iter().enumerate() {
                ring.mul_entry_acc(&mut s, yi, &a[(t + 1 + i) * n + t]);
            }
            s
        })
        .collect();
    c.extend(krylov);
    c
}

/// Coefficients `p_0..p_n` of `det(A - x I)` for an `n x n` row-major matrix.
pub fn characteristic_polynomial<R: Ring>(
    ring: &R,
    n: usize,
    a: &[R::Entry],
    mode: EvalMode,
) -> Vec<R::Elem> {
    assert_eq!(a.len(), n * n);
    if n == 0 {
        return vec![ring.one()];
    }
    match mode {
        EvalMode::Sequential => {
            let nz = nonzeros(ring, n, a);
            let mut v = toeplitz_column_seq(ring, n, a, &nz, n - 1);
            for t in (0..n - 1).rev() {
                let c = toeplitz_column_seq(ring, n, a, &nz, t);
                let mut out = vec![ring.zero(); v.len() + 1];
                for (i, o) in out.iter_mut().enumerate() {
                    for (j, vj) in v.iter().enumerate().take(i + 1) {
                        ring.mul_acc(o, &c[i - j], vj);
                    }
                }
                v = out;
            }
            v
        }
        EvalMode::Parallel => {
            let mats: Vec<Dense<R::Elem>> = (0..n)
                .into_par_iter()
                .map(|t| {
                    let c = toeplitz_column_par(ring, n, a, t);
                    let (rows, cols) = (n - t + 1, n - t);
                    let data = (0..rows * cols)
                        .map(|k| {
                            let (i, j) = (k / cols, k % cols);
                            if i >= j { c[i - j].clone() } else { ring.zero() }
                        })
                        .collect();
                    Dense { rows, cols, data }
                })
                .collect();
            tree_product(ring, &mats).data
        }
    }
}

/// Adjugate from the characteristic polynomial by Horner's rule:
/// `adj(A) = -(p_0 A^(n-1) + p_1 A^(n-2) + ... + p_(n-1) I)`.
pub fn adjugate<R: Ring>(ring: &R, n: usize, a: &[R::Entry], coeffs: &[R::Elem]) -> Vec<R::Elem> {
    assert_eq!(coeffs.len(), n + 1);
    let mut by_row: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, j) in nonzeros(ring, n, a) {
        by_row[i].push(j);
    }
    let mut x = vec![ring.zero(); n * n];
    for i in 0..n {
        x[i * n + i] = coeffs[0].clone();
    }
    for p in &coeffs[1..n] {
        let mut next = vec![ring.zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let xik = &x[i * n + k];
                if ring.is_zero(xik) {
                    continue;
                }
                for &j in &by_row[k] {
                    ring.mul_entry_acc(&mut next[i * n + j], xik, &a[k * n + j]);
                }
            }
            ring.add_assign(&mut next[i * n + i], p);
        }
        x = next;
    }
    x.iter().map(|v| ring.neg(v)).collect()
}
