//! Small dense-linear-algebra helpers over nalgebra's complex matrices.

use crate::algebra::C64;
use nalgebra::{DMatrix, DVector};

pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Numerical rank with singular values below `rtol · σ_max` counted as zero.
pub fn rank(m: &CMat, rtol: f64) -> usize {
    let sv = m.clone().singular_values();
    let smax = sv.iter().cloned().fold(0.0f64, f64::max);
    sv.iter().filter(|&&s| s > rtol * smax).count()
}

/// Orthonormal basis of the (right) nullspace: columns v with σ ≤ rtol·σ_max.
/// Wide inputs are padded with zero rows first: nalgebra's thin SVD would
/// otherwise drop the right singular vectors beyond min(m,n).
pub fn nullspace(m: &CMat, rtol: f64) -> Vec<CVec> {
    let padded;
    let m = if m.nrows() < m.ncols() {
        let mut p = CMat::zeros(m.ncols(), m.ncols());
        p.rows_mut(0, m.nrows()).copy_from(m);
        padded = p;
        &padded
    } else {
        m
    };
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let sv = &svd.singular_values;
    let smax = sv.iter().cloned().fold(0.0f64, f64::max);
    let cut = if smax > 0.0 { rtol * smax } else { rtol };
    let mut out = Vec::new();
    for row in 0..v_t.nrows() {
        let s = if row < sv.len() { sv[row] } else { 0.0 };
        if s <= cut {
            out.push(v_t.row(row).transpose().map(|c| c.conj()));
        }
    }
    out
}

/// Top left singular vector and the singular-value ratio σ₂/σ₁. The vector
/// comes from power iteration on M M† seeded with the largest column (for a
/// rank-one matrix the seed is already exact); only the σ ratio uses the SVD.
pub fn dominant_left_singular(m: &CMat) -> (CVec, f64) {
    let mut sv: Vec<f64> = m.clone().singular_values().iter().cloned().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let ratio = if sv.len() > 1 && sv[0] > 0.0 {
        sv[1] / sv[0]
    } else {
        0.0
    };
    let seed = (0..m.ncols())
        .max_by(|&a, &b| {
            m.column(a)
                .norm()
                .partial_cmp(&m.column(b).norm())
                .unwrap()
        })
        .unwrap_or(0);
    let mut u = m.column(seed).into_owned();
    for _ in 0..3 {
        let next = m * (m.adjoint() * &u);
        let n = next.norm();
        if n == 0.0 {
            break;
        }
        u = next / C64::new(n, 0.0);
    }
    let n = u.norm();
    if n > 0.0 {
        u /= C64::new(n, 0.0);
    }
    (u, ratio)
}

/// Residual of `x` against the span of `basis` (assumed orthonormal).
pub fn span_residual(x: &CVec, basis: &[CVec]) -> f64 {
    let mut r = x.clone();
    for b in basis {
        let c = b.dotc(&r);
        r -= b * c;
    }
    let n = x.norm();
    if n > 0.0 {
        r.norm() / n
    } else {
        0.0
    }
}

/// Matrix exponential by scaling and squaring with a truncated Taylor series.
pub fn expm(m: &CMat) -> CMat {
    let n = m.nrows();
    let norm = frobenius(m);
    let scalings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let x = m / C64::new(f64::powi(2.0, scalings as i32), 0.0);
    let mut acc = CMat::identity(n, n);
    let mut term = CMat::identity(n, n);
    for k in 1..=24 {
        term = (&term * &x) / C64::new(k as f64, 0.0);
        acc += &term;
        if frobenius(&term) < 1e-18 * frobenius(&acc).max(1.0) {
            break;
        }
    }
    for _ in 0..scalings {
        acc = &acc * &acc;
    }
    acc
}

/// max |(A)_{ij}| entry magnitude.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{C64, ONE_C, ZERO_C};

    #[test]
    fn expm_agrees_with_closed_form() {
        // exp of i·t·σ2-like generator
        let t = 0.7;
        let m = CMat::from_row_slice(
            2,
            2,
            &[ZERO_C, C64::new(t, 0.0), C64::new(-t, 0.0), ZERO_C],
        );
        let e = expm(&m);
        let (c, s) = (t.cos(), t.sin());
        let expect = CMat::from_row_slice(
            2,
            2,
            &[C64::new(c, 0.0), C64::new(s, 0.0), C64::new(-s, 0.0), C64::new(c, 0.0)],
        );
        assert!(frobenius(&(e - expect)) < 1e-12);
    }

    #[test]
    fn nullspace_of_projector() {
        let m = CMat::from_row_slice(2, 2, &[ONE_C, ZERO_C, ZERO_C, ZERO_C]);
        let ns = nullspace(&m, 1e-12);
        assert_eq!(ns.len(), 1);
        assert!((ns[0][1].norm() - 1.0).abs() < 1e-12);
        assert_eq!(rank(&m, 1e-12), 1);
    }
}
