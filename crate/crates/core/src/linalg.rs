//! Small dense helpers shared across modules: complex aliases, determinants
//! of tiny matrices, binomials and subset enumeration.

use itertools::Itertools;
use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Determinant of a `k x k` row-major matrix stored in `buf`, destroying it.
/// Gaussian elimination with partial pivoting.
pub fn det_in_place(buf: &mut [C64], k: usize) -> C64 {
    debug_assert_eq!(buf.len(), k * k);
    match k {
        0 => return ONE,
        1 => return buf[0],
        2 => return buf[0] * buf[3] - buf[1] * buf[2],
        _ => {}
    }
    let mut det = ONE;
    for col in 0..k {
        let mut piv = col;
        let mut best = buf[col * k + col].norm_sqr();
        for row in col + 1..k {
            let v = buf[row * k + col].norm_sqr();
            if v > best {
                best = v;
                piv = row;
            }
        }
        if best == 0.0 {
            return ZERO;
        }
        if piv != col {
            for j in 0..k {
                buf.swap(col * k + j, piv * k + j);
            }
            det = -det;
        }
        let p = buf[col * k + col];
        det *= p;
        let inv = ONE / p;
        for row in col + 1..k {
            let f = buf[row * k + col] * inv;
            if f == ZERO {
                continue;
            }
            for j in col + 1..k {
                let t = buf[col * k + j];
                buf[row * k + j] -= f * t;
            }
        }
    }
    det
}

/// Determinant of the submatrix `m[rows, cols]`.
pub fn minor(m: &CMatrix, rows: &[usize], cols: &[usize], buf: &mut Vec<C64>) -> C64 {
    let k = rows.len();
    buf.clear();
    for &r in rows {
        for &cc in cols {
            buf.push(m[(r, cc)]);
        }
    }
    det_in_place(buf, k)
}

pub fn determinant(m: &CMatrix) -> C64 {
    assert!(m.is_square());
    let n = m.nrows();
    let mut buf: Vec<C64> = (0..n)
        .flat_map(|r| (0..n).map(move |cc| (r, cc)))
        .map(|(r, cc)| m[(r, cc)])
        .collect();
    det_in_place(&mut buf, n)
}

/// `C(n, k)` exactly; saturates at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// `ln C(n, k)`; exact integer first while it fits in 53 bits, otherwise a
/// sum of logarithms.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    assert!(k <= n);
    let exact = binomial(n, k);
    if exact < (1u128 << 53) {
        return (exact as f64).ln();
    }
    (0..k.min(n - k))
        .map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln())
        .sum()
}

/// `ln prod_{i=1..k} (n - i + 1)`, the falling factorial.
pub fn ln_falling_factorial(n: usize, k: usize) -> f64 {
    assert!(k <= n);
    let exact = (0..k).try_fold(1u128, |acc, i| acc.checked_mul((n - i) as u128));
    if let Some(v) = exact.filter(|v| *v < (1u128 << 53)) {
        return (v as f64).ln();
    }
    (0..k).map(|i| ((n - i) as f64).ln()).sum()
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// All sorted `k`-subsets of `0..n`, in lexicographic order.
pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0..n).combinations(k).collect()
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

pub fn to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(c)
}

/// Relative discrepancy `|a - b| / max(|a|, |b|, floor)`.
pub fn rel_diff(a: f64, b: f64, floor: f64) -> f64 {
    let d = (a - b).abs();
    if d == 0.0 {
        return 0.0;
    }
    d / a.abs().max(b.abs()).max(floor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_determinants() {
        let m = CMatrix::from_row_slice(3, 3, &[c(2.0), c(0.0), c(1.0), c(1.0), c(3.0), c(2.0), c(1.0), c(1.0), c(1.0)]);
        // 2(3-2) - 0 + 1(1-3) = 0
        assert!(determinant(&m).norm() < 1e-14);
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(2.0), c(3.0), c(4.0), c(5.0)]));
        assert!((determinant(&m) - c(120.0)).norm() < 1e-12);
    }

    #[test]
    fn pivoting_sign() {
        let m = CMatrix::from_row_slice(3, 3, &[c(0.0), c(1.0), c(0.0), c(1.0), c(0.0), c(0.0), c(0.0), c(0.0), c(1.0)]);
        assert_eq!(determinant(&m), c(-1.0));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(12, 6), 924);
        assert_eq!(binomial(8, 2), 28);
        assert_eq!(binomial(3, 5), 0);
        assert!((ln_binomial(12, 6) - 924f64.ln()).abs() < 1e-12);
        assert!((ln_falling_factorial(8, 2) - 56f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn subsets_are_lexicographic() {
        let s = k_subsets(4, 2);
        assert_eq!(s, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
    }
}
