//! Dense symmetric linear algebra for small structural systems.
//!
//! The generalized problem `K φ = λ M φ` is reduced to a standard symmetric
//! problem by scaling (diagonal `M`) or Cholesky factorization (general `M`)
//! and then diagonalized with cyclic Jacobi rotations. Eigenvectors are
//! returned with unit Euclidean norm and a deterministic sign.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Maximum number of full Jacobi sweeps before giving up.
pub const MAX_SWEEPS: usize = 100;

/// Off-diagonal convergence tolerance relative to the Frobenius norm.
pub const OFF_DIAGONAL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix dimension must be at least 1")]
    Empty,
    #[error("shape mismatch: expected {expected}, found {found}")]
    Shape { expected: usize, found: usize },
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },
    #[error("degenerate (zero) vector")]
    DegenerateVector,
}

/// Square symmetric matrix stored densely in row-major order.
///
/// Symmetry is exact: every mutation writes both triangle entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(n: usize) -> Result<Self, LinalgError> {
        if n == 0 {
            return Err(LinalgError::Empty);
        }
        Ok(Self {
            n,
            data: vec![0.0; n * n],
        })
    }

    pub fn identity(n: usize) -> Result<Self, LinalgError> {
        let mut m = Self::zeros(n)?;
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        Ok(m)
    }

    pub fn from_diagonal(diagonal: &[f64]) -> Result<Self, LinalgError> {
        let mut m = Self::zeros(diagonal.len())?;
        for (i, &d) in diagonal.iter().enumerate() {
            m.data[i * m.n + i] = d;
        }
        Ok(m)
    }

    /// Builds a matrix from rows, rejecting anything not exactly symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let n = rows.len();
        let mut m = Self::zeros(n)?;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(LinalgError::Shape {
                    expected: n,
                    found: row.len(),
                });
            }
            m.data[i * n..(i + 1) * n].copy_from_slice(row);
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if m.data[i * n + j] != m.data[j * n + i] {
                    return Err(LinalgError::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.n + col]
    }

    /// Adds `value` to entry `(row, col)` and its mirror (once on the diagonal).
    pub fn add_symmetric(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.n + col] += value;
        if row != col {
            self.data[col * self.n + row] += value;
        }
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.get(i, j) == 0.0))
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.data
            .chunks(self.n)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `self - other`, entry by entry.
    pub fn sub(&self, other: &SymmetricMatrix) -> Result<SymmetricMatrix, LinalgError> {
        check_dim(self.n, other.n)?;
        Ok(SymmetricMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }
}

fn check_dim(expected: usize, found: usize) -> Result<(), LinalgError> {
    if expected == found {
        Ok(())
    } else {
        Err(LinalgError::Shape { expected, found })
    }
}

/// Eigenpairs of `K φ = λ M φ`.
///
/// Eigenvectors have unit Euclidean norm and their largest-magnitude
/// component is positive (lowest index wins ties). Solutions returned by
/// [`generalized_eig`] are sorted by ascending eigenvalue; solutions that
/// have been re-ordered by [`ModalSolution::permuted`] keep that order
/// instead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModalSolution {
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<Vec<f64>>,
}

impl ModalSolution {
    pub fn new(eigenvalues: Vec<f64>, eigenvectors: Vec<Vec<f64>>) -> Result<Self, LinalgError> {
        check_dim(eigenvalues.len(), eigenvectors.len())?;
        for v in &eigenvectors {
            check_dim(eigenvalues.len(), v.len())?;
        }
        Ok(Self {
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn mode_count(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &[Vec<f64>] {
        &self.eigenvectors
    }

    pub fn eigenvalue(&self, mode: usize) -> f64 {
        self.eigenvalues[mode]
    }

    pub fn eigenvector(&self, mode: usize) -> &[f64] {
        &self.eigenvectors[mode]
    }

    /// Natural frequencies in Hz, `f = sqrt(λ) / 2π`.
    pub fn frequencies_hz(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|&l| eigenvalue_to_hz(l)).collect()
    }

    /// Re-orders modes so that mode `i` of the result is mode `order[i]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> ModalSolution {
        ModalSolution {
            eigenvalues: order.iter().map(|&j| self.eigenvalues[j]).collect(),
            eigenvectors: order.iter().map(|&j| self.eigenvectors[j].clone()).collect(),
        }
    }

    /// Flips eigenvector signs so each has a non-negative inner product with
    /// the matching reference vector.
    pub fn align_signs(&mut self, reference: &ModalSolution) {
        for (v, r) in self.eigenvectors.iter_mut().zip(&reference.eigenvectors) {
            if dot(v, r) < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
        }
    }
}

pub fn eigenvalue_to_hz(eigenvalue: f64) -> f64 {
    eigenvalue.max(0.0).sqrt() / (2.0 * std::f64::consts::PI)
}

pub fn hz_to_eigenvalue(hz: f64) -> f64 {
    let omega = 2.0 * std::f64::consts::PI * hz;
    omega * omega
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solves `K φ = λ M φ` for symmetric `K` and symmetric positive definite `M`.
pub fn generalized_eig(
    stiffness: &SymmetricMatrix,
    mass: &SymmetricMatrix,
) -> Result<ModalSolution, LinalgError> {
    let n = stiffness.dim();
    check_dim(n, mass.dim())?;

    // Reduce to A = L^-1 K L^-T with M = L L^T.
    let (reduced, back) = if mass.is_diagonal() {
        let mut scale = Vec::with_capacity(n);
        for (i, &m) in mass.diagonal().iter().enumerate() {
            if !(m > 0.0) {
                return Err(LinalgError::NotPositiveDefinite { pivot: i, value: m });
            }
            scale.push(1.0 / m.sqrt());
        }
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = stiffness.get(i, j) * scale[i] * scale[j];
            }
        }
        (a, BackTransform::Diagonal(scale))
    } else {
        let l = cholesky(mass)?;
        // X = L^-1 K, column by column.
        let mut x = vec![0.0; n * n];
        for col in 0..n {
            let rhs: Vec<f64> = (0..n).map(|r| stiffness.get(r, col)).collect();
            let sol = forward_solve(&l, n, &rhs);
            for r in 0..n {
                x[r * n + col] = sol[r];
            }
        }
        // A = L^-1 X^T.
        let mut a = vec![0.0; n * n];
        for col in 0..n {
            let rhs: Vec<f64> = (0..n).map(|r| x[col * n + r]).collect();
            let sol = forward_solve(&l, n, &rhs);
            for r in 0..n {
                a[r * n + col] = sol[r];
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (a[i * n + j] + a[j * n + i]);
                a[i * n + j] = avg;
                a[j * n + i] = avg;
            }
        }
        (a, BackTransform::Cholesky(l))
    };

    let (values, vectors) = jacobi(reduced, n)?;

    let mut modes: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|k| {
            let y: Vec<f64> = (0..n).map(|r| vectors[r * n + k]).collect();
            let mut phi = match &back {
                BackTransform::Diagonal(scale) => y.iter().zip(scale).map(|(v, s)| v * s).collect(),
                BackTransform::Cholesky(l) => backward_solve_transposed(l, n, &y),
            };
            normalize_with_sign(&mut phi);
            (values[k], phi)
        })
        .collect();
    modes.sort_by(|a, b| a.0.total_cmp(&b.0));

    let (eigenvalues, eigenvectors) = modes.into_iter().unzip();
    Ok(ModalSolution {
        eigenvalues,
        eigenvectors,
    })
}

enum BackTransform {
    Diagonal(Vec<f64>),
    Cholesky(Vec<f64>),
}

/// Lower-triangular Cholesky factor, row-major.
fn cholesky(m: &SymmetricMatrix) -> Result<Vec<f64>, LinalgError> {
    let n = m.dim();
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = m.get(j, j);
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > 0.0) {
            return Err(LinalgError::NotPositiveDefinite { pivot: j, value: d });
        }
        let d = d.sqrt();
        l[j * n + j] = d;
        for i in (j + 1)..n {
            let mut s = m.get(i, j);
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / d;
        }
    }
    Ok(l)
}

fn forward_solve(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
    x
}

/// Solves `L^T x = b`.
fn backward_solve_transposed(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in (i + 1)..n {
            s -= l[k * n + i] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
    x
}

fn normalize_with_sign(v: &mut [f64]) {
    let nrm = norm(v);
    if nrm > 0.0 {
        v.iter_mut().for_each(|x| *x /= nrm);
    }
    let mut pivot = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[pivot].abs() {
            pivot = i;
        }
    }
    if v[pivot] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Cyclic Jacobi diagonalization of a dense symmetric matrix.
///
/// Returns the diagonal and the accumulated rotation matrix (columns are
/// eigenvectors), both unsorted.
fn jacobi(mut a: Vec<f64>, n: usize) -> Result<(Vec<f64>, Vec<f64>), LinalgError> {
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let frob = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let threshold = OFF_DIAGONAL_TOLERANCE * frob;
    let off_norm = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    loop {
        let off = off_norm(&a);
        if off <= threshold {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(LinalgError::NoConvergence {
                sweeps,
                off_norm: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = a[r * n + p];
                    let arq = a[r * n + q];
                    let new_rp = c * arp - s * arq;
                    let new_rq = s * arp + c * arq;
                    a[r * n + p] = new_rp;
                    a[p * n + r] = new_rp;
                    a[r * n + q] = new_rq;
                    a[q * n + r] = new_rq;
                }
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;

                for r in 0..n {
                    let vrp = v[r * n + p];
                    let vrq = v[r * n + q];
                    v[r * n + p] = c * vrp - s * vrq;
                    v[r * n + q] = s * vrp + c * vrq;
                }
            }
        }
    }
    let diag = (0..n).map(|i| a[i * n + i]).collect();
    Ok((diag, v))
}

/// Modal assurance criterion `(aᵀb)² / (‖a‖²‖b‖²)`.
pub fn mac(a: &[f64], b: &[f64]) -> Result<f64, LinalgError> {
    check_dim(a.len(), b.len())?;
    let aa = dot(a, a);
    let bb = dot(b, b);
    if aa == 0.0 || bb == 0.0 {
        return Err(LinalgError::DegenerateVector);
    }
    let ab = dot(a, b);
    Ok((ab * ab / (aa * bb)).clamp(0.0, 1.0))
}

/// Greedy MAC-based mode correspondence.
///
/// `order[i]` is the candidate mode matched to reference mode `i`. Pairs are
/// assigned in order of decreasing MAC; equal MAC values fall back to
/// eigenvalue proximity.
pub fn pair_modes(
    reference: &ModalSolution,
    candidate: &ModalSolution,
) -> Result<Vec<usize>, LinalgError> {
    let n = reference.mode_count();
    check_dim(n, candidate.mode_count())?;
    let mut pairs = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let m = mac(reference.eigenvector(i), candidate.eigenvector(j))?;
            let gap = (reference.eigenvalue(i) - candidate.eigenvalue(j)).abs();
            pairs.push((m, gap, i, j));
        }
    }
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.total_cmp(&y.1)));

    let mut order = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let mut assigned = 0;
    for (_, _, i, j) in pairs {
        if order[i] == usize::MAX && !used[j] {
            order[i] = j;
            used[j] = true;
            assigned += 1;
            if assigned == n {
                break;
            }
        }
    }
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual_ok(k: &SymmetricMatrix, m: &SymmetricMatrix, sol: &ModalSolution) -> bool {
        (0..sol.mode_count()).all(|j| {
            let phi = sol.eigenvector(j);
            let kphi = k.mul_vec(phi);
            let mphi = m.mul_vec(phi);
            let r: Vec<f64> = kphi
                .iter()
                .zip(&mphi)
                .map(|(a, b)| a - sol.eigenvalue(j) * b)
                .collect();
            norm(&r) <= 1e-8 * norm(&kphi).max(f64::MIN_POSITIVE)
        })
    }

    #[test]
    fn identity_pencil() {
        let i3 = SymmetricMatrix::identity(3).unwrap();
        let sol = generalized_eig(&i3, &i3).unwrap();
        for &l in sol.eigenvalues() {
            assert!((l - 1.0).abs() < 1e-15);
        }
        for a in 0..3 {
            for b in 0..3 {
                let d = dot(sol.eigenvector(a), sol.eigenvector(b));
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((d - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn diagonal_stiffness() {
        let k = SymmetricMatrix::from_diagonal(&[1.0, 4.0]).unwrap();
        let m = SymmetricMatrix::identity(2).unwrap();
        let sol = generalized_eig(&k, &m).unwrap();
        assert_eq!(sol.eigenvalues(), &[1.0, 4.0]);
        assert_eq!(sol.eigenvector(0), &[1.0, 0.0]);
        assert_eq!(sol.eigenvector(1), &[0.0, 1.0]);
    }

    #[test]
    fn two_dof_chain_matches_characteristic_polynomial() {
        // det([[2-λ, -1], [-1, 1-λ]]) = λ² - 3λ + 1
        let disc = (9.0f64 - 4.0).sqrt();
        let expected = [(3.0 - disc) / 2.0, (3.0 + disc) / 2.0];
        let k = SymmetricMatrix::from_rows(&[vec![2.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        let m = SymmetricMatrix::identity(2).unwrap();
        let sol = generalized_eig(&k, &m).unwrap();
        for (l, e) in sol.eigenvalues().iter().zip(expected) {
            assert!((l - e).abs() < 1e-14, "{l} vs {e}");
            assert!((l * l - 3.0 * l + 1.0).abs() < 1e-13);
        }
        assert!((sol.eigenvalue(0) - 0.3820).abs() < 1e-4);
        assert!((sol.eigenvalue(1) - 2.6180).abs() < 1e-4);
        assert!(residual_ok(&k, &m, &sol));
    }

    #[test]
    fn full_mass_matrix_uses_cholesky() {
        let k = SymmetricMatrix::from_rows(&[
            vec![4.0, -1.0, 0.0],
            vec![-1.0, 3.0, -1.0],
            vec![0.0, -1.0, 2.0],
        ])
        .unwrap();
        let m = SymmetricMatrix::from_rows(&[
            vec![2.0, 0.5, 0.0],
            vec![0.5, 2.0, 0.5],
            vec![0.0, 0.5, 1.0],
        ])
        .unwrap();
        let sol = generalized_eig(&k, &m).unwrap();
        assert!(residual_ok(&k, &m, &sol));
        for v in sol.eigenvectors() {
            assert!((norm(v) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_indefinite_mass_and_shape_mismatch() {
        let k = SymmetricMatrix::identity(2).unwrap();
        let bad = SymmetricMatrix::from_diagonal(&[1.0, -1.0]).unwrap();
        assert!(matches!(
            generalized_eig(&k, &bad),
            Err(LinalgError::NotPositiveDefinite { pivot: 1, .. })
        ));
        let bad_full = SymmetricMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(
            generalized_eig(&k, &bad_full),
            Err(LinalgError::NotPositiveDefinite { .. })
        ));
        let m3 = SymmetricMatrix::identity(3).unwrap();
        assert!(matches!(
            generalized_eig(&k, &m3),
            Err(LinalgError::Shape { .. })
        ));
    }

    #[test]
    fn construction_invariants() {
        assert_eq!(SymmetricMatrix::zeros(0), Err(LinalgError::Empty));
        assert!(matches!(
            SymmetricMatrix::from_rows(&[vec![1.0, 2.0], vec![2.5, 1.0]]),
            Err(LinalgError::NotSymmetric { row: 0, col: 1 })
        ));
        let mut m = SymmetricMatrix::zeros(2).unwrap();
        m.add_symmetric(0, 1, -3.0);
        m.add_symmetric(1, 1, 2.0);
        assert_eq!(m.rows(), vec![vec![0.0, -3.0], vec![-3.0, 2.0]]);
    }

    #[test]
    fn sign_convention_largest_component_positive() {
        let k = SymmetricMatrix::from_rows(&[vec![2.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        let m = SymmetricMatrix::from_diagonal(&[3.0, 1.0]).unwrap();
        let sol = generalized_eig(&k, &m).unwrap();
        for v in sol.eigenvectors() {
            let pivot = v
                .iter()
                .enumerate()
                .fold(0, |p, (i, x)| if x.abs() > v[p].abs() { i } else { p });
            assert!(v[pivot] > 0.0);
        }
    }

    #[test]
    fn mac_examples() {
        let a = [1.0, 2.0, -0.5];
        assert!((mac(&a, &a).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(mac(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        let b: Vec<f64> = a.iter().map(|x| -3.0 * x).collect();
        assert!((mac(&a, &b).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(mac(&[0.0, 0.0], &[1.0, 0.0]), Err(LinalgError::DegenerateVector));
    }

    #[test]
    fn pairing_identity_and_swap() {
        let k = SymmetricMatrix::from_diagonal(&[1.0, 2.0, 3.0]).unwrap();
        let m = SymmetricMatrix::identity(3).unwrap();
        let sol = generalized_eig(&k, &m).unwrap();
        assert_eq!(pair_modes(&sol, &sol).unwrap(), vec![0, 1, 2]);
        let swapped = sol.permuted(&[1, 0, 2]);
        assert_eq!(pair_modes(&sol, &swapped).unwrap(), vec![1, 0, 2]);
    }
}
