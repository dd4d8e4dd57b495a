//! Dense complex skew-symmetric linear algebra.

use crate::error::{Error, Result};
use crate::numkernel::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Dense skew-symmetric matrix of even dimension, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl SkewMatrix {
    /// Builds a matrix from row-major entries, replacing `A` by `(A − Aᵀ)/2`.
    ///
    /// Fails if the dimension is odd or if the antisymmetric part differs from the
    /// input by more than `1e−13·max(1, max|A_ij|)`.
    pub fn new(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::Domain(format!("expected {} entries, got {}", dim * dim, entries.len())));
        }
        if !dim.is_multiple_of(2) {
            return Err(Error::Domain(format!("pfaffian needs even dimension, got {dim}")));
        }
        let scale = entries.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let mut data = vec![ZERO; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                let a = entries[i * dim + j];
                let skew = 0.5 * (a - entries[j * dim + i]);
                if (skew - a).norm() > 1e-13 * scale {
                    return Err(Error::Domain(format!("entry ({i}, {j}) breaks skew-symmetry")));
                }
                data[i * dim + j] = skew;
            }
        }
        Ok(SkewMatrix { dim, data })
    }

    /// Builds the matrix from its strict upper triangle `f(i, j)`, `i < j`.
    pub fn from_upper<F>(dim: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> C64,
    {
        if !dim.is_multiple_of(2) {
            return Err(Error::Domain(format!("pfaffian needs even dimension, got {dim}")));
        }
        let mut data = vec![ZERO; dim * dim];
        for i in 0..dim {
            for j in i + 1..dim {
                let a = f(i, j);
                data[i * dim + j] = a;
                data[j * dim + i] = -a;
            }
        }
        Ok(SkewMatrix { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    /// Swaps rows and columns `i` and `j`.
    pub fn swap(&mut self, i: usize, j: usize) {
        let n = self.dim;
        for k in 0..n {
            self.data.swap(i * n + k, j * n + k);
        }
        for k in 0..n {
            self.data.swap(k * n + i, k * n + j);
        }
    }

    /// Congruence `B A Bᵀ` for a square `B` of the same dimension.
    pub fn congruence(&self, b: &[C64]) -> SkewMatrix {
        let n = self.dim;
        assert_eq!(b.len(), n * n);
        let ab = matmul(&self.data, &transpose(b, n), n);
        let data = matmul(b, &ab, n);
        SkewMatrix::from_upper(n, |i, j| 0.5 * (data[i * n + j] - data[j * n + i])).expect("even dimension")
    }

    pub fn pfaffian(&self) -> C64 {
        pfaffian(self)
    }
}

fn matmul(a: &[C64], b: &[C64], n: usize) -> Vec<C64> {
    let mut c = vec![ZERO; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == ZERO {
                continue;
            }
            for j in 0..n {
                c[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    c
}

fn transpose(a: &[C64], n: usize) -> Vec<C64> {
    let mut t = vec![ZERO; n * n];
    for i in 0..n {
        for j in 0..n {
            t[j * n + i] = a[i * n + j];
        }
    }
    t
}

/// Pfaffian by skew-symmetric Gaussian elimination (Parlett–Reid) with partial
/// pivoting on the column below the current 2×2 block.
pub fn pfaffian(a: &SkewMatrix) -> C64 {
    let n = a.dim;
    if n == 0 {
        return ONE;
    }
    let mut m = a.data.clone();
    let mut pf = ONE;
    for k in (0..n - 1).step_by(2) {
        let (kp, best) = (k + 1..n)
            .map(|i| (i, m[i * n + k].norm()))
            .fold((k + 1, -1.0), |acc, c| if c.1 > acc.1 { c } else { acc });
        if kp != k + 1 {
            for c in k..n {
                m.swap((k + 1) * n + c, kp * n + c);
            }
            for r in k..n {
                m.swap(r * n + k + 1, r * n + kp);
            }
            pf = -pf;
        }
        if best < 1e-300 {
            return ZERO;
        }
        let akk1 = m[k * n + k + 1];
        pf *= akk1;
        if k + 2 < n {
            let tau: Vec<C64> = (k + 2..n).map(|c| m[k * n + c] / akk1).collect();
            let col: Vec<C64> = (k + 2..n).map(|r| m[r * n + k + 1]).collect();
            for (ri, r) in (k + 2..n).enumerate() {
                for (ci, c) in (k + 2..n).enumerate() {
                    m[r * n + c] += tau[ri] * col[ci] - col[ri] * tau[ci];
                }
            }
        }
    }
    let pf_check = if cfg!(debug_assertions) && n <= 6 { Some(pfaffian_by_pairings(a)) } else { None };
    if let Some(exact) = pf_check {
        let scale = a.data.iter().map(|z| z.norm()).fold(0.0, f64::max).powi((n / 2) as i32);
        debug_assert!(
            (exact - pf).norm() <= 1e-9 * scale.max(f64::MIN_POSITIVE),
            "elimination and pairing-sum pfaffians disagree: {pf} vs {exact}"
        );
    }
    pf
}

/// Pfaffian as the signed sum over perfect pairings (expansion along the first row).
/// Exponential cost; intended for small matrices and as a reference.
pub fn pfaffian_by_pairings(a: &SkewMatrix) -> C64 {
    let idx: Vec<usize> = (0..a.dim).collect();
    pairing_sum(&idx, &|i, j| a.get(i, j))
}

/// Signed sum over perfect pairings of `indices`, with pair weight `w(i, j)` for
/// `i` before `j` in the list.
pub fn pairing_sum<F>(indices: &[usize], w: &F) -> C64
where
    F: Fn(usize, usize) -> C64,
{
    if indices.is_empty() {
        return ONE;
    }
    let first = indices[0];
    let rest = &indices[1..];
    let mut total = ZERO;
    for (pos, &j) in rest.iter().enumerate() {
        let weight = w(first, j);
        if weight == ZERO {
            continue;
        }
        let remaining: Vec<usize> = rest.iter().enumerate().filter(|&(q, _)| q != pos).map(|(_, &v)| v).collect();
        let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * weight * pairing_sum(&remaining, w);
    }
    total
}

/// Determinant by LU decomposition with partial pivoting; a singular matrix gives 0.
pub fn determinant(n: usize, entries: &[C64]) -> C64 {
    assert_eq!(entries.len(), n * n, "determinant needs a square matrix");
    let mut m = entries.to_vec();
    let mut det = ONE;
    for k in 0..n {
        let (piv, best) = (k..n)
            .map(|i| (i, m[i * n + k].norm()))
            .fold((k, -1.0), |acc, c| if c.1 > acc.1 { c } else { acc });
        if best == 0.0 {
            return ZERO;
        }
        if piv != k {
            for c in 0..n {
                m.swap(k * n + c, piv * n + c);
            }
            det = -det;
        }
        let pivot = m[k * n + k];
        det *= pivot;
        for r in k + 1..n {
            let factor = m[r * n + k] / pivot;
            if factor == ZERO {
                continue;
            }
            for c in k + 1..n {
                let v = m[k * n + c];
                m[r * n + c] -= factor * v;
            }
        }
    }
    det
}

/// Moments `L_0, L_1, …` feeding a Hankel determinant.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence(pub Vec<C64>);

/// `det_{1≤i,j≤n}(m_{i+j−2})`.
pub fn hankel_determinant(m: &MomentSequence, n: usize) -> Result<C64> {
    if n == 0 {
        return Ok(ONE);
    }
    if m.0.len() < 2 * n - 1 {
        return Err(Error::Domain(format!("{}x{n} Hankel matrix needs {} moments, got {}", n, 2 * n - 1, m.0.len())));
    }
    if m.0.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Domain("non-finite moment".into()));
    }
    let entries: Vec<C64> = (0..n * n).map(|k| m.0[k / n + k % n]).collect();
    Ok(determinant(n, &entries))
}

/// Pfaffian of the block matrix `[[A, B], [−Bᵀ, 0]]` for an `n×n` skew `A` and an
/// `n×m` matrix `B` given row-major.
pub fn bordered_pfaffian(a: &SkewMatrix, b: &[C64], m: usize) -> Result<C64> {
    let n = a.dim;
    if b.len() != n * m {
        return Err(Error::Domain(format!("border has {} entries, expected {}", b.len(), n * m)));
    }
    if !(n + m).is_multiple_of(2) {
        return Err(Error::Domain(format!("bordered pfaffian needs n + m even (n = {n}, m = {m})")));
    }
    bordered_from_parts(n, |i, j| a.get(i, j), b, m)
}

/// Same as [`bordered_pfaffian`] for an `A` of any (possibly odd) size given by a closure.
pub(crate) fn bordered_from_parts<F>(n: usize, a: F, b: &[C64], m: usize) -> Result<C64>
where
    F: Fn(usize, usize) -> C64,
{
    if !(n + m).is_multiple_of(2) {
        return Err(Error::Domain(format!("bordered pfaffian needs n + m even (n = {n}, m = {m})")));
    }
    let full = SkewMatrix::from_upper(n + m, |i, j| {
        if j < n {
            a(i, j)
        } else if i < n {
            b[i * m + (j - n)]
        } else {
            ZERO
        }
    })?;
    Ok(pfaffian(&full))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_skew(rng: &mut ChaCha8Rng, n: usize) -> SkewMatrix {
        SkewMatrix::from_upper(n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).unwrap()
    }

    /// Laplace expansion along the first row; reference for small determinants.
    fn cofactor_det(n: usize, m: &[C64]) -> C64 {
        if n == 1 {
            return m[0];
        }
        let mut total = ZERO;
        for col in 0..n {
            let minor: Vec<C64> = (1..n)
                .flat_map(|r| (0..n).filter(move |&cc| cc != col).map(move |cc| (r, cc)))
                .map(|(r, cc)| m[r * n + cc])
                .collect();
            let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
            total += sign * m[col] * cofactor_det(n - 1, &minor);
        }
        total
    }

    #[test]
    fn small_pfaffians() {
        let a = c(0.3, -1.2);
        let m = SkewMatrix::new(2, vec![ZERO, a, -a, ZERO]).unwrap();
        assert_eq!(pfaffian(&m), a);
        let v = [c(1.0, 0.5), c(-0.3, 2.0), c(0.7, 0.1), c(1.1, -0.4), c(0.2, 0.2), c(-1.5, 0.3)];
        let m4 = SkewMatrix::from_upper(4, |i, j| match (i, j) {
            (0, 1) => v[0],
            (0, 2) => v[1],
            (0, 3) => v[2],
            (1, 2) => v[3],
            (1, 3) => v[4],
            _ => v[5],
        })
        .unwrap();
        let expected = v[0] * v[5] - v[1] * v[4] + v[2] * v[3];
        assert!((pfaffian(&m4) - expected).norm() < 1e-14);
        assert_eq!(pfaffian(&SkewMatrix::from_upper(0, |_, _| ZERO).unwrap()), ONE);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SkewMatrix::new(3, vec![ZERO; 9]).is_err());
        assert!(SkewMatrix::new(2, vec![ZERO, ONE, ONE, ZERO]).is_err());
        // tiny asymmetry is absorbed
        let m = SkewMatrix::new(2, vec![ZERO, ONE, c(-1.0 + 1e-15, 0.0), ZERO]).unwrap();
        assert!((m.get(0, 1) - 1.0).norm() < 1e-15);
    }

    #[test]
    fn pfaffian_squared_is_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_skew(&mut rng, 8);
        let pf = pfaffian(&a);
        let det = determinant(8, a.as_slice());
        assert!((pf * pf - det).norm() < 1e-10 * det.norm());
    }

    #[test]
    fn determinant_cases() {
        let id: Vec<C64> = (0..9).map(|k| if k % 4 == 0 { ONE } else { ZERO }).collect();
        assert_eq!(determinant(3, &id), ONE);
        assert_eq!(determinant(2, &[c(2.0, 0.0), ZERO, ZERO, c(3.0, 0.0)]), c(6.0, 0.0));
        assert_eq!(determinant(2, &[ONE, ONE, ONE, ONE]), ZERO);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m: Vec<C64> = (0..36).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let lu = determinant(6, &m);
        let cf = cofactor_det(6, &m);
        assert!((lu - cf).norm() < 1e-11 * cf.norm().max(1.0));
    }

    #[test]
    fn hankel_cases() {
        let five = MomentSequence(vec![c(5.0, 0.0)]);
        assert_eq!(hankel_determinant(&five, 1).unwrap(), c(5.0, 0.0));
        let (a, b, cc) = (c(1.0, 2.0), c(-0.5, 0.3), c(0.7, -1.1));
        let h = hankel_determinant(&MomentSequence(vec![a, b, cc]), 2).unwrap();
        assert!((h - (a * cc - b * b)).norm() < 1e-15);
        assert!(hankel_determinant(&MomentSequence(vec![a, b]), 2).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ms: Vec<C64> = (0..5).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let h3 = hankel_determinant(&MomentSequence(ms.clone()), 3).unwrap();
        let full: Vec<C64> = (0..9).map(|k| ms[k / 3 + k % 3]).collect();
        assert!((h3 - cofactor_det(3, &full)).norm() < 1e-11);
    }

    #[test]
    fn bordered_cases() {
        let empty = SkewMatrix::from_upper(0, |_, _| ZERO).unwrap();
        assert_eq!(bordered_pfaffian(&empty, &[], 0).unwrap(), ONE);
        let a = SkewMatrix::from_upper(2, |_, _| c(0.4, 0.9)).unwrap();
        assert_eq!(bordered_pfaffian(&a, &[], 0).unwrap(), c(0.4, 0.9));
        assert!(bordered_pfaffian(&a, &[ONE, ONE], 1).is_err());
        let b = [c(1.0, 0.2), c(-0.3, 0.5), c(0.8, 0.0), c(0.1, -0.7)];
        let got = bordered_pfaffian(&a, &b, 2).unwrap();
        // assembled 4x4 [[A, B], [-B^T, 0]] by pairings: a01 * 0 - b00 * b11 + b01 * b10
        let expected = a.get(0, 1) * ZERO - b[0] * b[3] + b[1] * b[2];
        assert!((got - expected).norm() < 1e-14);
    }

    #[test]
    fn swap_flips_sign() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random_skew(&mut rng, 6);
        let mut s = a.clone();
        s.swap(1, 4);
        assert!((pfaffian(&a) + pfaffian(&s)).norm() < 1e-13 * pfaffian(&a).norm());
    }
}
