use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;

use super::density::{TwoQubitDensityMatrix, PSD_TOLERANCE};
use crate::error::{Error, Result};

/// `sigma_y (x) sigma_y`; the same anti-diagonal in either basis ordering.
fn spin_flip() -> Matrix4<Complex64> {
    let mut y = Matrix4::zeros();
    y[(0, 3)] = Complex64::new(-1.0, 0.0);
    y[(1, 2)] = Complex64::new(1.0, 0.0);
    y[(2, 1)] = Complex64::new(1.0, 0.0);
    y[(3, 0)] = Complex64::new(-1.0, 0.0);
    y
}

/// The four `sqrt(l_i)` in decreasing order, where `l_i` are the eigenvalues
/// of `rho (Y rho* Y)`.
///
/// With `rho = V V^dagger` (columns of `V` are eigenvectors scaled by the
/// square roots of their eigenvalues), `rho Y rho* Y` shares its spectrum with
/// `T^dagger T` for `T = V^T Y V`, so the `sqrt(l_i)` are the singular values
/// of `T`. This avoids square roots of round-off in the product's
/// eigenvalues.
pub fn spin_flip_singular_values(rho: &TwoQubitDensityMatrix) -> Result<[f64; 4]> {
    rho.validate()?;
    let eig = SymmetricEigen::new(rho.to_matrix());
    let mut v = eig.eigenvectors;
    for (k, &mu) in eig.eigenvalues.iter().enumerate() {
        if mu < -PSD_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {mu:e}")));
        }
        v.column_mut(k).scale_mut(mu.max(0.0).sqrt());
    }
    let t = v.transpose() * spin_flip() * v;
    let sv = t.singular_values();
    let mut lambdas = [sv[0], sv[1], sv[2], sv[3]];
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok(lambdas)
}

/// Wootters concurrence `max(0, l1 - l2 - l3 - l4)` with `l_i` the decreasing
/// square-rooted spin-flip eigenvalues.
pub fn wootters_concurrence(rho: &TwoQubitDensityMatrix) -> Result<f64> {
    let l = spin_flip_singular_values(rho)?;
    Ok((l[0] - l[1] - l[2] - l[3]).clamp(0.0, 1.0))
}
