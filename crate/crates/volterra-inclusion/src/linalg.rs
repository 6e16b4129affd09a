//! Small dense linear-algebra helpers shared by kernels and fields.

use crate::Matrix;

/// Spectral (operator) norm: largest singular value.
///
/// Closed forms for 1×1 and 2×2 keep the hot lint paths cheap; larger
/// matrices go through the full SVD.
pub fn operator_norm(m: &Matrix) -> f64 {
    match m.nrows() {
        0 => 0.0,
        1 => m[(0, 0)].abs(),
        2 => {
            // Singular values of a 2x2 from the eigenvalues of MᵀM.
            let fro2 = m.iter().map(|v| v * v).sum::<f64>();
            let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
            let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0).sqrt();
            ((fro2 + disc) / 2.0).sqrt()
        }
        _ => m
            .clone()
            .singular_values()
            .iter()
            .cloned()
            .fold(0.0, f64::max),
    }
}

/// Smallest singular value, used to probe invertibility of diagonal values.
pub fn smallest_singular_value(m: &Matrix) -> f64 {
    match m.nrows() {
        0 => 0.0,
        1 => m[(0, 0)].abs(),
        2 => {
            let fro2 = m.iter().map(|v| v * v).sum::<f64>();
            let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
            let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0).sqrt();
            ((fro2 - disc).max(0.0) / 2.0).sqrt()
        }
        _ => m
            .clone()
            .singular_values()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min),
    }
}

/// Matrix 1-norm (maximum absolute column sum), used to pick the scaling
/// power for the matrix exponential.
fn one_norm(m: &Matrix) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

// Fixed degree-13 diagonal Padé coefficients and the matching scaling
// threshold. Order and threshold are constants of the build so that equal
// inputs always produce identical output bits on a given platform.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const PADE13_THETA: f64 = 5.371920351148152;

/// Matrix exponential by scaling-and-squaring with a degree-13 diagonal
/// rational approximant.
pub fn expm(a: &Matrix) -> Matrix {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    if n == 0 {
        return Matrix::zeros(0, 0);
    }
    if n == 1 {
        return Matrix::from_element(1, 1, a[(0, 0)].exp());
    }

    let norm = one_norm(a);
    let squarings = if norm > PADE13_THETA {
        (norm / PADE13_THETA).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a * (0.5f64).powi(squarings as i32);

    let identity = Matrix::identity(n, n);
    let a2 = &scaled * &scaled;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;

    let u_inner = &a6 * (PADE13[13] * &a6 + PADE13[11] * &a4 + PADE13[9] * &a2)
        + PADE13[7] * &a6
        + PADE13[5] * &a4
        + PADE13[3] * &a2
        + PADE13[1] * &identity;
    let u = &scaled * u_inner;
    let v = &a6 * (PADE13[12] * &a6 + PADE13[10] * &a4 + PADE13[8] * &a2)
        + PADE13[6] * &a6
        + PADE13[4] * &a4
        + PADE13[2] * &a2
        + PADE13[0] * &identity;

    let numer = &v + &u;
    let denom = &v - &u;
    let mut result = denom
        .lu()
        .solve(&numer)
        .expect("Padé denominator is singular; the scaled matrix norm exceeds the stability range");

    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn operator_norm_matches_svd_in_2d() {
        let m = Matrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        let direct = operator_norm(&m);
        let svd = m.clone().singular_values()[0];
        assert_relative_eq!(direct, svd, epsilon = 1e-12);
    }

    #[test]
    fn expm_of_zero_is_identity() {
        let z = Matrix::zeros(3, 3);
        assert_eq!(expm(&z), Matrix::identity(3, 3));
    }

    #[test]
    fn expm_diagonal() {
        let a = Matrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -2.0]));
        let e = expm(&a);
        assert_relative_eq!(e[(0, 0)], 1f64.exp(), epsilon = 1e-14);
        assert_relative_eq!(e[(1, 1)], (-2f64).exp(), epsilon = 1e-14);
        assert!(e[(0, 1)].abs() < 1e-16 && e[(1, 0)].abs() < 1e-16);
    }

    #[test]
    fn expm_nilpotent() {
        // exp([[0,1],[0,0]]) = I + N exactly.
        let a = Matrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let e = expm(&a);
        assert_relative_eq!(e[(0, 0)], 1.0, epsilon = 1e-15);
        assert_relative_eq!(e[(0, 1)], 1.0, epsilon = 1e-15);
        assert_relative_eq!(e[(1, 1)], 1.0, epsilon = 1e-15);
        assert!(e[(1, 0)].abs() < 1e-16);
    }

    #[test]
    fn expm_uses_squaring_for_large_norms() {
        // ‖A‖ = 40 forces several squarings; compare against the scalar
        // closed form along the diagonal.
        let a = Matrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-40.0, 3.0]));
        let e = expm(&a);
        assert_relative_eq!(e[(0, 0)], (-40f64).exp(), max_relative = 1e-11);
        assert_relative_eq!(e[(1, 1)], 3f64.exp(), max_relative = 1e-12);
    }
}
