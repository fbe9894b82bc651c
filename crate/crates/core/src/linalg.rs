//! Small dense helpers on top of nalgebra's SVD and symmetric eigensolver.

use nalgebra::{DMatrix, Matrix3, Matrix3x6, Matrix6, Matrix6x3};

/// Relative threshold below which a singular value counts as zero.
pub const PINV_RTOL: f64 = 1e-10;

/// Singular values in descending order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn numerical_rank(singular: &[f64]) -> usize {
    let max = singular.first().copied().unwrap_or(0.0);
    singular.iter().filter(|&&s| s > PINV_RTOL * max).count()
}

/// Moore–Penrose inverse of a 6x3 matrix and its numerical rank.
///
/// Full column rank goes through Householder QR (`R^-1 Q^T`). The SVD is
/// only used for the singular values: its vectors lose accuracy (~1e-5)
/// when two singular values nearly coincide, which happens for the
/// constraint wrenches near the symmetric home pose.
pub fn pseudo_inverse_6x3(m: &Matrix6x3<f64>) -> (Matrix3x6<f64>, usize) {
    let rank = numerical_rank(&singular_values(&DMatrix::from_column_slice(6, 3, m.as_slice())));
    if rank == 3 {
        let qr = m.qr();
        let r_inv = qr.r().try_inverse().expect("full rank R is invertible");
        return (r_inv * qr.q().transpose(), rank);
    }
    let svd = m.svd(true, true);
    let max = svd.singular_values.max();
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let mut sigma_inv = Matrix3::zeros();
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > PINV_RTOL * max {
            sigma_inv[(k, k)] = 1.0 / s;
        }
    }
    (v_t.transpose() * sigma_inv * u.transpose(), rank)
}

/// `Q Q^T` for the thin QR factor `Q` of a full-rank 6x3 matrix: the
/// orthogonal projector onto its column space, symmetric by construction.
pub fn column_space_projector(m: &Matrix6x3<f64>) -> Matrix6<f64> {
    let q = m.qr().q();
    q * q.transpose()
}

/// Orthonormal basis of the range of a rank-three symmetric projector.
///
/// Taken from a column-pivoted QR of `p`; the symmetric eigensolver can
/// return wrong vectors for the doubly triple spectrum `{1, 1, 1, 0, 0, 0}`.
/// Each column's largest-magnitude entry is made positive.
pub fn projector_range_basis(p: &Matrix6<f64>) -> Matrix6x3<f64> {
    let q = p.col_piv_qr().q();
    let mut basis: Matrix6x3<f64> = q.fixed_columns::<3>(0).into_owned();
    for mut col in basis.column_iter_mut() {
        let (imax, _) = col.iamax_full();
        if col[imax] < 0.0 {
            col.neg_mut();
        }
    }
    basis
}

/// `sigma_max / sigma_min`, infinite when `sigma_min` is zero.
pub fn condition_number(singular: &[f64]) -> f64 {
    match (singular.first(), singular.last()) {
        (Some(&max), Some(&min)) if min > 0.0 => max / min,
        _ => f64::INFINITY,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pseudo_inverse_of_full_rank_is_left_inverse() {
        let m = Matrix6x3::from_fn(|i, j| ((i * 3 + j) as f64).sin() + if i == j { 2.0 } else { 0.0 });
        let (pinv, rank) = pseudo_inverse_6x3(&m);
        assert_eq!(rank, 3);
        assert!((pinv * m - Matrix3::identity()).abs().max() < 1e-12);
    }

    #[test]
    fn column_space_projector_is_exact_for_close_singular_values() {
        // Two nearly equal singular values, the case where SVD vectors drift.
        let q = Matrix6::from_fn(|i, j| ((i + 1) as f64 * (j as f64 + 0.5)).cos()).qr().q();
        let v = Matrix3::from_fn(|i, j| ((i * 3 + j) as f64 * 0.7).sin()).qr().q();
        let sigma = Matrix3::from_diagonal(&nalgebra::Vector3::new(432.96, 4.900_079, 4.899_528));
        let m: Matrix6x3<f64> = q.fixed_columns::<3>(0) * sigma * v.transpose();
        let p = Matrix6::identity() - column_space_projector(&m);
        assert!((m.transpose() * p).abs().max() < 1e-12 * 433.0);
        assert!((p - p.transpose()).abs().max() == 0.0);
        let (pinv, rank) = pseudo_inverse_6x3(&m);
        assert_eq!(rank, 3);
        assert!((pinv * m - Matrix3::identity()).abs().max() < 1e-12);
    }

    #[test]
    fn rank_deficient_input_reports_rank() {
        let mut m = Matrix6x3::zeros();
        m[(0, 0)] = 1.0;
        m[(1, 1)] = 1.0;
        m[(2, 0)] = 1.0;
        m[(2, 2)] = 0.0;
        let (_, rank) = pseudo_inverse_6x3(&m);
        assert_eq!(rank, 2);
    }

    #[test]
    fn condition_of_diagonal() {
        let s = singular_values(&DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 4.0, 2.0])));
        assert_eq!(s, vec![4.0, 2.0, 1.0]);
        assert_eq!(condition_number(&s), 4.0);
        assert_eq!(condition_number(&[1.0, 0.0]), f64::INFINITY);
    }
}
