//! Small fixed-size complex linear algebra used by the mode solver.

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use num_complex::Complex64;

pub type C3 = Vector3<Complex64>;
pub type R3 = Vector3<f64>;
pub type CMat3 = Matrix3<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn to_complex(v: &R3) -> C3 {
    v.map(Complex64::from)
}

/// `⟨a|b⟩ = Σ a_i* b_i`.
pub fn braket(a: &C3, b: &C3) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// `⟨a|M|a⟩`.
pub fn expectation(a: &C3, m: &CMat3) -> Complex64 {
    braket(a, &(m * a))
}

pub fn outer(a: &C3, b: &C3) -> CMat3 {
    a * b.adjoint()
}

/// Frobenius norm; also used as the `‖·‖` of every residual check.
pub fn norm(m: &CMat3) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn cnorm(v: &C3) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn hermitian_part(m: &CMat3) -> CMat3 {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// `(M − M†)/(2i)`, hermitian and positive semidefinite for a passive medium.
pub fn absorptive_part(m: &CMat3) -> CMat3 {
    (m - m.adjoint()) * Complex64::new(0.0, -0.5)
}

/// `σ̂± = ∓(x̂ ± iŷ)/√2`.
pub fn sigma_plus() -> C3 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    C3::new(Complex64::new(-s, 0.0), Complex64::new(0.0, -s), ZERO)
}

pub fn sigma_minus() -> C3 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    C3::new(Complex64::new(s, 0.0), Complex64::new(0.0, -s), ZERO)
}

pub fn z_hat() -> C3 {
    C3::new(ZERO, ZERO, ONE)
}

/// Eigen-decomposition of a hermitian matrix with eigenvalues sorted
/// ascending and eigenvectors reordered to match.
pub fn hermitian_eigen(m: &CMat3) -> ([f64; 3], [C3; 3]) {
    let eig = SymmetricEigen::new(*m);
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = idx.map(|i| eig.eigenvalues[i]);
    let vecs = idx.map(|i| eig.eigenvectors.column(i).into_owned());
    (vals, vecs)
}

/// Rotation about ẑ by `angle`.
pub fn rotation_z(angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}
