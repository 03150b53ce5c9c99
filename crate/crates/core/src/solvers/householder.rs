//! Householder reflector primitives on column-major storage.
//!
//! A reflector `H = I - tau v v^T` has `v[0] = 1` implied; the tail of `v` is
//! stored in place below the diagonal, LAPACK style.

/// Builds the reflector annihilating `x[1..]`. On return `x[0]` holds `beta`
/// (the new leading entry) and `x[1..]` the tail of `v`. Returns `tau`.
pub(crate) fn make_reflector(x: &mut [f64]) -> f64 {
    let (head, tail) = x.split_first_mut().expect("non-empty column");
    let tail_norm = norm2(tail);
    if tail_norm == 0.0 {
        return 0.0;
    }
    let alpha = *head;
    let norm = hypot(alpha, tail_norm);
    let beta = if alpha >= 0.0 { -norm } else { norm };
    let scale = 1.0 / (alpha - beta);
    for t in tail.iter_mut() {
        *t *= scale;
    }
    *head = beta;
    (beta - alpha) / beta
}

/// Applies `H = I - tau v v^T` (with `v = [1, v_tail]`) to `col` in place.
#[inline]
pub(crate) fn apply_reflector(v_tail: &[f64], tau: f64, col: &mut [f64]) {
    if tau == 0.0 {
        return;
    }
    debug_assert_eq!(v_tail.len() + 1, col.len());
    let (c0, rest) = col.split_first_mut().unwrap();
    let dot = *c0 + dot(v_tail, rest);
    let s = tau * dot;
    *c0 -= s;
    for (c, &v) in rest.iter_mut().zip(v_tail) {
        *c -= s * v;
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    // Four partial sums let the compiler vectorize without reassociation.
    let mut acc = [0.0; 4];
    let chunks = a.len() / 4;
    for i in 0..chunks {
        let k = 4 * i;
        acc[0] += a[k] * b[k];
        acc[1] += a[k + 1] * b[k + 1];
        acc[2] += a[k + 2] * b[k + 2];
        acc[3] += a[k + 3] * b[k + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for k in 4 * chunks..a.len() {
        s += a[k] * b[k];
    }
    s
}

/// Overflow-safe Euclidean norm.
pub(crate) fn norm2(x: &[f64]) -> f64 {
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let inv = 1.0 / scale;
    let ss: f64 = x.iter().map(|v| (v * inv) * (v * inv)).sum();
    scale * ss.sqrt()
}

#[inline]
fn hypot(a: f64, b: f64) -> f64 {
    a.hypot(b)
}

/// Unpivoted Householder QR of an `m x n` column-major matrix, in place.
/// Returns the `tau` of each of the `min(m, n)` reflectors.
pub(crate) fn qr_in_place(data: &mut [f64], m: usize, n: usize) -> Vec<f64> {
    let k = m.min(n);
    let mut taus = Vec::with_capacity(k);
    for j in 0..k {
        let (left, right) = data.split_at_mut((j + 1) * m);
        let col = &mut left[j * m + j..(j + 1) * m];
        let tau = make_reflector(col);
        let v_tail = &col[1..];
        for c in 0..n - j - 1 {
            let target = &mut right[c * m + j..(c + 1) * m];
            apply_reflector(v_tail, tau, target);
        }
        taus.push(tau);
    }
    taus
}

/// Applies `Q^T` of a packed factorization to `y` (length `m`).
pub(crate) fn apply_qt(data: &[f64], m: usize, taus: &[f64], y: &mut [f64]) {
    for (j, &tau) in taus.iter().enumerate() {
        let v_tail = &data[j * m + j + 1..(j + 1) * m];
        apply_reflector(v_tail, tau, &mut y[j..]);
    }
}

/// Applies `Q` of a packed factorization to `y` (length `m`).
pub(crate) fn apply_q(data: &[f64], m: usize, taus: &[f64], y: &mut [f64]) {
    for (j, &tau) in taus.iter().enumerate().rev() {
        let v_tail = &data[j * m + j + 1..(j + 1) * m];
        apply_reflector(v_tail, tau, &mut y[j..]);
    }
}
