//! Shared column-space dimension of two generic linear maps into relay
//! space, and explicit construction of aligned directions with their
//! per-user preimages.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, RANK_TOL};

/// Generic dimension of `col(H1) ∩ col(H2)` for `H1: p x q1`, `H2: p x q2`.
pub fn shared_dim(p: usize, q1: usize, q2: usize) -> usize {
    let (q1, q2) = (q1.max(q2), q1.min(q2));
    let overlap = (q1 + q2).saturating_sub(p);
    p.min(q1).min(q2).min(overlap)
}

/// `[I H1 0; I 0 H2]`: its null vectors `(v, u, w)` satisfy
/// `v = -H1 u = -H2 w`.
fn stacked_system(h1: &CMat, h2: &CMat) -> CMat {
    let p = h1.nrows();
    let (q1, q2) = (h1.ncols(), h2.ncols());
    let mut s = CMat::zeros(2 * p, p + q1 + q2);
    let eye = CMat::identity(p, p);
    s.view_mut((0, 0), (p, p)).copy_from(&eye);
    s.view_mut((p, 0), (p, p)).copy_from(&eye);
    s.view_mut((0, p), (p, q1)).copy_from(h1);
    s.view_mut((p, p + q1), (p, q2)).copy_from(h2);
    s
}

/// Null basis of the stacked system rotated so that its leading columns
/// carry the non-zero relay components, with the singular values of the
/// relay block in the same order.
fn rotated_null_basis(h1: &CMat, h2: &CMat) -> (CMat, Vec<f64>) {
    let p = h1.nrows();
    let z = linalg::null_space(&stacked_system(h1, h2), RANK_TOL);
    if z.ncols() == 0 {
        return (z, Vec::new());
    }
    let zv = z.rows(0, p).into_owned();
    // square up so the SVD returns a full set of right singular vectors
    let mut padded = CMat::zeros(p.max(z.ncols()), z.ncols());
    padded.view_mut((0, 0), (p, z.ncols())).copy_from(&zv);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let mut rot = CMat::zeros(z.ncols(), order.len());
    for (c, &r) in order.iter().enumerate() {
        for k in 0..z.ncols() {
            rot[(k, c)] = v_t[(r, k)].conj();
        }
    }
    let sv = order.iter().map(|&i| svd.singular_values[i]).collect();
    (z * rot, sv)
}

/// Dimension of the shared column space measured from the stacked system:
/// the rank of the relay block of its null space. Null vectors with a zero
/// relay block (present when one map alone covers the relay) are excluded.
pub fn numerical_shared_dim(h1: &CMat, h2: &CMat) -> usize {
    let (_, sv) = rotated_null_basis(h1, h2);
    let max = sv.first().copied().unwrap_or(0.0);
    if max == 0.0 {
        return 0;
    }
    // null vectors are unit length, so the relay block norm is absolute
    sv.iter().filter(|&&s| s > 1e-6).count()
}

/// Aligned directions `q_i = H1 u_i = H2 w_i`, stored as matrix columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SharedSubspace {
    pub dimension: usize,
    /// `p x d` relay-side directions.
    pub q: CMat,
    /// `q1 x d` preimages under `H1`.
    pub u: CMat,
    /// `q2 x d` preimages under `H2`.
    pub w: CMat,
    pub residual: f64,
}

impl SharedSubspace {
    /// Largest relative mismatch `max_i max(|H1 u_i - q_i|, |H2 w_i - q_i|) / |q_i|`.
    pub fn residual_against(&self, h1: &CMat, h2: &CMat) -> f64 {
        let r1 = h1 * &self.u - &self.q;
        let r2 = h2 * &self.w - &self.q;
        (0..self.dimension)
            .map(|i| {
                let norm = self.q.column(i).norm();
                r1.column(i).norm().max(r2.column(i).norm()) / norm
            })
            .fold(0.0, f64::max)
    }

    /// Linear recombination `(Q C, U C, W C)`; stays inside the shared space.
    pub fn combine(&self, mix: &CMat, h1: &CMat, h2: &CMat) -> SharedSubspace {
        let mut out = SharedSubspace {
            dimension: mix.ncols(),
            q: &self.q * mix,
            u: &self.u * mix,
            w: &self.w * mix,
            residual: 0.0,
        };
        out.residual = out.residual_against(h1, h2);
        out
    }
}

fn check_full_rank(h: &CMat, name: &str) -> Result<()> {
    let want = h.nrows().min(h.ncols());
    let got = linalg::rank(h, RANK_TOL);
    if got < want {
        return Err(Error::DegenerateChannel(format!(
            "{name} ({}x{}) has rank {got}, expected {want}",
            h.nrows(),
            h.ncols()
        )));
    }
    Ok(())
}

/// Finds `d` independent directions reachable by both `H1` and `H2`.
pub fn shared_subspace(h1: &CMat, h2: &CMat, d: usize) -> Result<SharedSubspace> {
    let p = h1.nrows();
    if h2.nrows() != p {
        return Err(Error::Shape {
            expected: format!("both maps with {p} rows"),
            got: format!("{} rows", h2.nrows()),
        });
    }
    let (q1, q2) = (h1.ncols(), h2.ncols());
    let available = shared_dim(p, q1, q2);
    if d > available {
        return Err(Error::Dimension {
            requested: d,
            available,
            p,
            q1,
            q2,
        });
    }
    check_full_rank(h1, "H1")?;
    check_full_rank(h2, "H2")?;
    if d == 0 {
        return Ok(SharedSubspace {
            dimension: 0,
            q: CMat::zeros(p, 0),
            u: CMat::zeros(q1, 0),
            w: CMat::zeros(q2, 0),
            residual: 0.0,
        });
    }

    let (q, u, w) = if q1 >= p && q2 >= p {
        // both maps are onto: pick targets first, then solve for preimages
        let mut q = CMat::zeros(p, d);
        for i in 0..d {
            let col = h1.column(i) + h2.column(i);
            let norm = col.norm();
            q.set_column(i, &(col / Complex64::new(norm, 0.0)));
        }
        let u = linalg::pinv(h1) * &q;
        let w = linalg::pinv(h2) * &q;
        (q, u, w)
    } else {
        let (z, sv) = rotated_null_basis(h1, h2);
        let survivors = sv.iter().filter(|&&s| s > 1e-6).count();
        if survivors < d {
            return Err(Error::DegenerateChannel(format!(
                "stacked system yields {survivors} non-zero shared directions, {d} requested"
            )));
        }
        let mut q = CMat::zeros(p, d);
        let mut u = CMat::zeros(q1, d);
        let mut w = CMat::zeros(q2, d);
        for i in 0..d {
            let col = z.column(i);
            let v = col.rows(0, p);
            let scale = Complex64::new(1.0 / v.norm(), 0.0);
            q.set_column(i, &(v * scale));
            // v + H1 u = 0, so the preimage of +v is -u
            u.set_column(i, &(col.rows(p, q1) * (-scale)));
            w.set_column(i, &(col.rows(p + q1, q2) * (-scale)));
        }
        (q, u, w)
    };

    let mut out = SharedSubspace {
        dimension: d,
        q,
        u,
        w,
        residual: 0.0,
    };
    out.residual = out.residual_against(h1, h2);
    Ok(out)
}

/// Receive combiners making two users' downlink channels look identical to
/// the relay: `u1_i^T G1 = u2_i^T G2 = g_i^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceiverFilters {
    pub dimension: usize,
    /// `p x d`; column `i` is `g_i`.
    pub g: CMat,
    /// `d x m1`; row `i` is `u1_i^T`.
    pub filters1: CMat,
    /// `d x m2`; row `i` is `u2_i^T`.
    pub filters2: CMat,
    pub residual: f64,
}

impl ReceiverFilters {
    pub fn residual_against(&self, g1: &CMat, g2: &CMat) -> f64 {
        let gt = self.g.transpose();
        let r1 = &self.filters1 * g1 - &gt;
        let r2 = &self.filters2 * g2 - &gt;
        (0..self.dimension)
            .map(|i| r1.row(i).norm().max(r2.row(i).norm()) / gt.row(i).norm())
            .fold(0.0, f64::max)
    }

    pub fn combine(&self, mix: &CMat, g1: &CMat, g2: &CMat) -> ReceiverFilters {
        let mt = mix.transpose();
        let mut out = ReceiverFilters {
            dimension: mix.ncols(),
            g: &self.g * mix,
            filters1: &mt * &self.filters1,
            filters2: &mt * &self.filters2,
            residual: 0.0,
        };
        out.residual = out.residual_against(g1, g2);
        out
    }
}

/// Solves the downlink problem as the transpose of the uplink one.
pub fn receiver_filters(g1: &CMat, g2: &CMat, d: usize) -> Result<ReceiverFilters> {
    let s = shared_subspace(&g1.transpose(), &g2.transpose(), d)?;
    Ok(ReceiverFilters {
        dimension: s.dimension,
        g: s.q,
        filters1: s.u.transpose(),
        filters2: s.w.transpose(),
        residual: s.residual,
    })
}
