//! Dense complex matrices sized for few-qubit operators (d ≤ 16 typical).
//!
//! Everything here is row-major `Vec<Complex64>` with explicit dimensions.
//! The eigensolver is a cyclic Jacobi iteration for Hermitian input, which is
//! accurate and dependency-free at these sizes.

use num_complex::Complex64;

use crate::error::{MagicError, Result};

pub type C64 = Complex64;

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Self {
        let r = rows.len();
        let c = if r > 0 { rows[0].len() } else { 0 };
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Outer product |v⟩⟨v| of a (not necessarily normalized) vector.
    pub fn projector(v: &[C64]) -> Self {
        let n = v.len();
        Self::from_fn(n, n, |i, j| v[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    /// Tr[self · other], computed without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn hermitian_deviation(&self) -> f64 {
        assert!(self.is_square());
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermitian_deviation() <= tol
    }

    pub fn check_hermitian(&self, tol: f64) -> Result<()> {
        let dev = self.hermitian_deviation();
        if dev <= tol {
            Ok(())
        } else {
            Err(MagicError::NotHermitian(dev))
        }
    }

    /// Partial trace over the subsystems flagged `false` in `keep`.
    ///
    /// `dims` lists subsystem dimensions in tensor order; their product must
    /// equal the matrix dimension.
    pub fn partial_trace(&self, dims: &[usize], keep: &[bool]) -> Self {
        assert!(self.is_square());
        assert_eq!(dims.len(), keep.len());
        let total: usize = dims.iter().product();
        assert_eq!(total, self.rows, "dims do not match matrix size");

        let kept_dims: Vec<usize> = dims
            .iter()
            .zip(keep)
            .filter(|(_, k)| **k)
            .map(|(d, _)| *d)
            .collect();
        let traced_dims: Vec<usize> = dims
            .iter()
            .zip(keep)
            .filter(|(_, k)| !**k)
            .map(|(d, _)| *d)
            .collect();
        let kept_total: usize = kept_dims.iter().product();
        let traced_total: usize = traced_dims.iter().product();

        // Strides of each subsystem in the full index.
        let mut strides = vec![1usize; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }

        let kept_idx: Vec<usize> = (0..dims.len()).filter(|&i| keep[i]).collect();
        let traced_idx: Vec<usize> = (0..dims.len()).filter(|&i| !keep[i]).collect();

        let expand = |mut flat: usize, subsys: &[usize], sub_dims: &[usize]| -> usize {
            let mut full = 0usize;
            for (pos, &s) in subsys.iter().enumerate().rev() {
                let d = sub_dims[pos];
                full += (flat % d) * strides[s];
                flat /= d;
            }
            full
        };

        let mut out = Self::zeros(kept_total, kept_total);
        for a in 0..kept_total {
            for b in 0..kept_total {
                let base_r = expand(a, &kept_idx, &kept_dims);
                let base_c = expand(b, &kept_idx, &kept_dims);
                let mut acc = C64::new(0.0, 0.0);
                for t in 0..traced_total {
                    let off = expand(t, &traced_idx, &traced_dims);
                    acc += self[(base_r + off, base_c + off)];
                }
                out[(a, b)] = acc;
            }
        }
        out
    }

    /// Transpose the subsystems flagged `true`, leaving the rest alone.
    pub fn partial_transpose(&self, dims: &[usize], which: &[bool]) -> Self {
        assert!(self.is_square());
        assert_eq!(dims.len(), which.len());
        let total: usize = dims.iter().product();
        assert_eq!(total, self.rows);

        let mut strides = vec![1usize; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        let decompose = |mut flat: usize| -> Vec<usize> {
            let mut idx = vec![0usize; dims.len()];
            for pos in (0..dims.len()).rev() {
                idx[pos] = flat % dims[pos];
                flat /= dims[pos];
            }
            idx
        };

        let mut out = Self::zeros(total, total);
        for r in 0..total {
            let ri = decompose(r);
            for c in 0..total {
                let ci = decompose(c);
                let mut nr = 0usize;
                let mut nc = 0usize;
                for k in 0..dims.len() {
                    if which[k] {
                        nr += ci[k] * strides[k];
                        nc += ri[k] * strides[k];
                    } else {
                        nr += ri[k] * strides[k];
                        nc += ci[k] * strides[k];
                    }
                }
                out[(nr, nc)] = self[(r, c)];
            }
        }
        out
    }

    /// Reorder tensor factors: output factor `i` is input factor `perm[i]`.
    pub fn permute_systems(&self, dims: &[usize], perm: &[usize]) -> Self {
        assert!(self.is_square());
        let total: usize = dims.iter().product();
        assert_eq!(total, self.rows);
        assert_eq!(dims.len(), perm.len());

        let mut strides = vec![1usize; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();

        // Map a flat new-order index to the old-order flat index.
        let map_index = |mut flat: usize| -> usize {
            let mut old = 0usize;
            for pos in (0..new_dims.len()).rev() {
                let d = new_dims[pos];
                old += (flat % d) * strides[perm[pos]];
                flat /= d;
            }
            old
        };

        let mut out = Self::zeros(total, total);
        for i in 0..total {
            let oi = map_index(i);
            for j in 0..total {
                out[(i, j)] = self[(oi, map_index(j))];
            }
        }
        out
    }

    /// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
    ///
    /// Returns eigenvalues in ascending order with matching unit eigenvectors
    /// as the columns of the second matrix.
    pub fn eigh(&self) -> Result<(Vec<f64>, ComplexMatrix)> {
        self.check_hermitian(HERMITIAN_TOL.max(1e-9 * self.max_abs().max(1.0)))?;
        let n = self.rows;
        let mut a = self.clone();
        // Symmetrize exactly so rounding in the input cannot bias the sweep.
        for i in 0..n {
            a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let avg = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
                a[(i, j)] = avg;
                a[(j, i)] = avg.conj();
            }
        }
        let mut v = ComplexMatrix::identity(n);
        let norm = a.frobenius_norm().max(1e-300);

        for _sweep in 0..100 {
            let mut off = 0.0f64;
            for i in 0..n {
                for j in (i + 1)..n {
                    off += a[(i, j)].norm_sqr();
                }
            }
            if off.sqrt() <= 1e-14 * norm {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[(p, q)];
                    if apq.norm() <= 1e-300 {
                        continue;
                    }
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    let abs_apq = apq.norm();
                    let tau = (aqq - app) / (2.0 * abs_apq);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s_mag = t * c;
                    // Unitary G = [[c, -s̄],[s, c]] acting on rows/cols (p, q)
                    // with s carrying the phase of a_pq.
                    let phase = apq / abs_apq;
                    let s = phase * s_mag;

                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = akp * c - akq * s.conj();
                        a[(k, q)] = akp * s + akq * c;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = apk * c - aqk * s;
                        a[(q, k)] = apk * s.conj() + aqk * c;
                    }
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * c - vkq * s.conj();
                        v[(k, q)] = vkp * s + vkq * c;
                    }
                }
            }
        }

        let mut pairs: Vec<(f64, usize)> = (0..n).map(|i| (a[(i, i)].re, i)).collect();
        pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        let values: Vec<f64> = pairs.iter().map(|(l, _)| *l).collect();
        let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, pairs[j].1)]);
        Ok((values, vectors))
    }

    /// Minimum eigenpair of a Hermitian matrix.
    pub fn eig_min(&self) -> Result<(f64, Vec<C64>)> {
        let (vals, vecs) = self.eigh()?;
        let v: Vec<C64> = (0..self.rows).map(|i| vecs[(i, 0)]).collect();
        Ok((vals[0], v))
    }

    /// Square root of a PSD Hermitian matrix (eigenvalues clamped at zero).
    pub fn sqrt_psd(&self) -> Result<ComplexMatrix> {
        let (vals, vecs) = self.eigh()?;
        let n = self.rows;
        let mut out = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            let l = vals[k].max(0.0).sqrt();
            if l == 0.0 {
                continue;
            }
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += vecs[(i, k)] * vecs[(j, k)].conj() * l;
                }
            }
        }
        Ok(out)
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Real coordinates of a Hermitian d×d matrix: the d diagonal entries followed
/// by (√2·Re, √2·Im) of each strict upper-triangle entry, row by row.
///
/// The map is an isometry: Tr[AB] = vech(A)·vech(B) for Hermitian A, B, so
/// operator equalities become plain real linear systems.
pub fn vech_real(m: &ComplexMatrix) -> Vec<f64> {
    assert!(m.is_square());
    let d = m.rows();
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        out.push(m[(i, i)].re);
    }
    let s = std::f64::consts::SQRT_2;
    for i in 0..d {
        for j in (i + 1)..d {
            out.push(s * m[(i, j)].re);
            out.push(s * m[(i, j)].im);
        }
    }
    out
}

/// Inverse of [`vech_real`].
pub fn vech_real_inverse(v: &[f64], d: usize) -> ComplexMatrix {
    assert_eq!(v.len(), d * d);
    let mut m = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        m[(i, i)] = C64::new(v[i], 0.0);
    }
    let s = std::f64::consts::SQRT_2;
    let mut k = d;
    for i in 0..d {
        for j in (i + 1)..d {
            let re = v[k] / s;
            let im = v[k + 1] / s;
            k += 2;
            m[(i, j)] = C64::new(re, im);
            m[(j, i)] = C64::new(re, -im);
        }
    }
    m
}

/// Orthonormal Hermitian basis matching the [`vech_real`] coordinates.
pub fn hermitian_basis(d: usize) -> Vec<ComplexMatrix> {
    let mut basis = Vec::with_capacity(d * d);
    for i in 0..d {
        let mut e = ComplexMatrix::zeros(d, d);
        e[(i, i)] = C64::new(1.0, 0.0);
        basis.push(e);
    }
    let s = 1.0 / std::f64::consts::SQRT_2;
    for i in 0..d {
        for j in (i + 1)..d {
            let mut re = ComplexMatrix::zeros(d, d);
            re[(i, j)] = C64::new(s, 0.0);
            re[(j, i)] = C64::new(s, 0.0);
            basis.push(re);
            let mut im = ComplexMatrix::zeros(d, d);
            im[(i, j)] = C64::new(0.0, s);
            im[(j, i)] = C64::new(0.0, -s);
            basis.push(im);
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn eigh_recovers_pauli_z() {
        let z = ComplexMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(-1.0, 0.0)],
        ]);
        let (vals, vecs) = z.eigh().unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);
        // min eigenvector is |1⟩ up to phase
        assert!(vecs[(1, 0)].norm() > 1.0 - 1e-12);
    }

    #[test]
    fn eigh_reconstructs_random_hermitian() {
        let mut rng = crate::simulate::rng::SplitMix64::new(7);
        for _ in 0..20 {
            let n = 2 + (rng.next_u64() % 7) as usize; // up to 8
            let mut m = ComplexMatrix::zeros(n, n);
            for i in 0..n {
                m[(i, i)] = c(rng.next_gaussian(), 0.0);
                for j in (i + 1)..n {
                    let z = c(rng.next_gaussian(), rng.next_gaussian());
                    m[(i, j)] = z;
                    m[(j, i)] = z.conj();
                }
            }
            let (vals, vecs) = m.eigh().unwrap();
            // residual ‖Mv - λv‖ per pair
            for k in 0..n {
                let v: Vec<C64> = (0..n).map(|i| vecs[(i, k)]).collect();
                let mv = m.matvec(&v);
                let res: f64 = mv
                    .iter()
                    .zip(&v)
                    .map(|(a, b)| (a - b * vals[k]).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                assert!(res < 1e-9, "residual {res}");
            }
            // eigenvectors unitary
            let vv = vecs.dagger().matmul(&vecs);
            assert!(vv.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-10);
        }
    }

    #[test]
    fn partial_trace_bell_state() {
        // |Φ+⟩⟨Φ+| on 2 qubits traces to I/2 on either side.
        let v = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        let rho = ComplexMatrix::projector(&v).scale_re(0.5);
        let left = rho.partial_trace(&[2, 2], &[true, false]);
        let right = rho.partial_trace(&[2, 2], &[false, true]);
        let half = ComplexMatrix::identity(2).scale_re(0.5);
        assert!(left.max_abs_diff(&half) < 1e-12);
        assert!(right.max_abs_diff(&half) < 1e-12);
    }

    #[test]
    fn permute_systems_swaps_kron_factors() {
        let a = ComplexMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(2.0, 0.0)],
            vec![c(3.0, 0.0), c(4.0, 0.0)],
        ]);
        let b = ComplexMatrix::from_rows(vec![
            vec![c(0.0, 1.0), c(5.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, -1.0)],
        ]);
        let ab = a.kron(&b);
        let ba = b.kron(&a);
        assert!(ab.permute_systems(&[2, 2], &[1, 0]).max_abs_diff(&ba) < 1e-14);
    }

    #[test]
    fn permute_systems_three_factors() {
        let m1 = ComplexMatrix::from_rows(vec![vec![c(1.0, 0.0), c(0.5, 0.2)]]);
        let a = ComplexMatrix::projector(&[c(1.0, 0.0), c(0.0, 0.5)]);
        let b = ComplexMatrix::projector(&[c(0.3, 0.0), c(1.0, 0.0)]);
        let q = ComplexMatrix::projector(&[c(0.0, 1.0), c(0.7, 0.0)]);
        let _ = m1;
        let abq = a.kron(&b).kron(&q);
        let qab = q.kron(&a).kron(&b);
        assert!(
            abq.permute_systems(&[2, 2, 2], &[2, 0, 1])
                .max_abs_diff(&qab)
                < 1e-14
        );
    }

    #[test]
    fn vech_isometry() {
        let mut rng = crate::simulate::rng::SplitMix64::new(3);
        let d = 4;
        let mut mk = || {
            let mut m = ComplexMatrix::zeros(d, d);
            for i in 0..d {
                m[(i, i)] = c(rng.next_gaussian(), 0.0);
                for j in (i + 1)..d {
                    let z = c(rng.next_gaussian(), rng.next_gaussian());
                    m[(i, j)] = z;
                    m[(j, i)] = z.conj();
                }
            }
            m
        };
        let a = mk();
        let b = mk();
        let dot: f64 = vech_real(&a)
            .iter()
            .zip(vech_real(&b))
            .map(|(x, y)| x * y)
            .sum();
        assert!((dot - a.trace_product(&b).re).abs() < 1e-10);
        let back = vech_real_inverse(&vech_real(&a), d);
        assert!(back.max_abs_diff(&a) < 1e-12);
    }
}
