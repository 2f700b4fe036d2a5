//! Small complex linear-algebra toolkit on top of `nalgebra`.
//!
//! Everything here works on dense `DMatrix<Complex64>` and uses the SVD for
//! rank, null space and pseudo-inverse decisions so that a single relative
//! tolerance governs every numerical judgement.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Relative singular-value threshold used for rank and null-space decisions.
pub const RANK_TOL: f64 = 1e-9;

/// Singular values in non-increasing order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Numerical rank: number of singular values above `rel_tol * sigma_max`.
pub fn rank(m: &CMat, rel_tol: f64) -> usize {
    let s = singular_values(m);
    match s.first() {
        None => 0,
        Some(&max) if max == 0.0 => 0,
        Some(&max) => s.iter().filter(|&&x| x > rel_tol * max).count(),
    }
}

/// Ratio of largest to smallest singular value over the `min(rows, cols)`
/// spectrum. Empty matrices have condition number 1.
pub fn condition_number(m: &CMat) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}

/// Orthonormal basis (as columns) of the right null space of `m`.
///
/// Wide matrices are zero-padded to square first so that the SVD exposes a
/// full set of right singular vectors.
pub fn null_space(m: &CMat, rel_tol: f64) -> CMat {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return CMat::zeros(0, 0);
    }
    let padded = if rows < cols {
        let mut p = CMat::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cut = rel_tol * max;
    let null_rows: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| max == 0.0 || svd.singular_values[i] <= cut)
        .collect();
    let mut basis = CMat::zeros(cols, null_rows.len());
    for (c, &r) in null_rows.iter().enumerate() {
        for k in 0..cols {
            basis[(k, c)] = v_t[(r, k)].conj();
        }
    }
    basis
}

/// Moore-Penrose pseudo-inverse with the crate-wide relative threshold.
pub fn pinv(m: &CMat) -> CMat {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return CMat::zeros(cols, rows);
    }
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");
    let max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let mut out = CMat::zeros(cols, rows);
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > RANK_TOL * max {
            let vi = v_t.row(i).adjoint();
            let ui = u.column(i).adjoint();
            out += (vi * ui).map(|z| z / s);
        }
    }
    out
}

/// `I_factor ⊗ m`: the block-diagonal channel seen over `factor` uses of a
/// constant realization.
pub fn block_diag_repeat(m: &CMat, factor: usize) -> CMat {
    let (r, c) = m.shape();
    let mut out = CMat::zeros(r * factor, c * factor);
    for b in 0..factor {
        out.view_mut((b * r, b * c), (r, c)).copy_from(m);
    }
    out
}

/// Matrix with i.i.d. CN(0, 1) entries.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re * scale, im * scale)
    })
}

/// Horizontal concatenation; all blocks must share a row count.
pub fn hstack(rows: usize, blocks: &[&CMat]) -> CMat {
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMat::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        debug_assert_eq!(b.nrows(), rows);
        out.view_mut((0, at), (rows, b.ncols())).copy_from(b);
        at += b.ncols();
    }
    out
}

/// Vertical concatenation; all blocks must share a column count.
pub fn vstack(cols: usize, blocks: &[&CMat]) -> CMat {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMat::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        debug_assert_eq!(b.ncols(), cols);
        out.view_mut((at, 0), (b.nrows(), cols)).copy_from(b);
        at += b.nrows();
    }
    out
}

/// Columns of the identity selected greedily so that appending them to
/// `existing` keeps full column rank. Returns the chosen indices.
pub fn complete_with_unit_columns(existing: &CMat, dim: usize, wanted: usize) -> Option<Vec<usize>> {
    let mut current = existing.clone();
    let mut picked = Vec::with_capacity(wanted);
    for j in 0..dim {
        if picked.len() == wanted {
            break;
        }
        let mut trial = CMat::zeros(dim, current.ncols() + 1);
        trial.view_mut((0, 0), (dim, current.ncols())).copy_from(&current);
        trial[(j, current.ncols())] = Complex64::new(1.0, 0.0);
        if rank(&trial, 1e-6) == trial.ncols() {
            current = trial;
            picked.push(j);
        }
    }
    (picked.len() == wanted).then_some(picked)
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn null_space_of_wide_matrix_has_expected_dimension() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = complex_gaussian(&mut rng, 3, 7);
        let ns = null_space(&m, RANK_TOL);
        assert_eq!(ns.ncols(), 4);
        assert!(frobenius(&(&m * &ns)) < 1e-10);
        let gram = ns.adjoint() * &ns;
        assert!(frobenius(&(gram - CMat::identity(4, 4))) < 1e-10);
    }

    #[test]
    fn pinv_is_left_inverse_of_tall_full_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = complex_gaussian(&mut rng, 6, 3);
        let left = pinv(&m) * &m;
        assert!(frobenius(&(left - CMat::identity(3, 3))) < 1e-10);
    }

    #[test]
    fn rank_detects_deficiency() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = complex_gaussian(&mut rng, 5, 2);
        let b = complex_gaussian(&mut rng, 2, 5);
        assert_eq!(rank(&(a * b), RANK_TOL), 2);
    }

    #[test]
    fn block_diag_layout() {
        let m = CMat::from_element(2, 1, Complex64::new(1.0, 0.0));
        let b = block_diag_repeat(&m, 3);
        assert_eq!(b.shape(), (6, 3));
        assert_eq!(b[(2, 1)], Complex64::new(1.0, 0.0));
        assert_eq!(b[(2, 0)], Complex64::new(0.0, 0.0));
    }
}
