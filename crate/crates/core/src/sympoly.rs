//! Bialternants, Schur and elementary symmetric polynomials, Sundquist's pfaffian and `T_λ`.

use crate::error::{Error, Result};
use crate::numkernel::C64;
use crate::pfaffian::{bordered_from_parts, determinant, pfaffian, SkewMatrix};

const ONE: C64 = C64::new(1.0, 0.0);
const ZERO: C64 = C64::new(0.0, 0.0);

/// `x^k` for any integer `k`; `x = 0` with `k < 0` is a domain error.
pub fn ipow(x: C64, k: i64) -> Result<C64> {
    if k >= 0 {
        Ok(x.powi(k as i32))
    } else if x == ZERO {
        Err(Error::Domain("negative power of zero".into()))
    } else {
        Ok(x.inv().powi((-k) as i32))
    }
}

/// `Δ(x) = ∏_{i<j} (x_i − x_j)`.
pub fn vandermonde(x: &[C64]) -> C64 {
    let mut d = ONE;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            d *= x[i] - x[j];
        }
    }
    d
}

/// `χ_μ(x) = det(x_i^{μ_j})`.
pub fn chi(mu: &[i64], x: &[C64]) -> Result<C64> {
    let m = mu.len();
    if x.len() != m {
        return Err(Error::Domain(format!("chi: {m} exponents but {} variables", x.len())));
    }
    // Canonical row and column order makes transpositions flip the sign bit-exactly.
    let (rows, row_sign) = canonical_order(x, |a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let (cols, col_sign) = canonical_order(mu, |a, b| b.cmp(a));
    let (Some(rows), Some(cols)) = (rows, cols) else { return Ok(C64::new(0.0, 0.0)) };
    let mut entries = Vec::with_capacity(m * m);
    for &i in &rows {
        for &j in &cols {
            entries.push(ipow(x[i], mu[j])?);
        }
    }
    Ok(determinant(m, &entries) * (row_sign * col_sign))
}

/// Sorting permutation and its sign; `None` when two items compare equal.
fn canonical_order<T>(items: &[T], cmp: impl Fn(&T, &T) -> std::cmp::Ordering) -> (Option<Vec<usize>>, f64) {
    let mut idx: Vec<usize> = (0..items.len()).collect();
    idx.sort_by(|&a, &b| cmp(&items[a], &items[b]));
    if idx.windows(2).any(|w| cmp(&items[w[0]], &items[w[1]]).is_eq()) {
        return (None, 0.0);
    }
    let mut seen = vec![false; idx.len()];
    let mut sign = 1.0;
    for start in 0..idx.len() {
        let mut len = 0;
        let mut k = start;
        while !seen[k] {
            seen[k] = true;
            k = idx[k];
            len += 1;
        }
        if len > 0 && len % 2 == 0 {
            sign = -sign;
        }
    }
    (Some(idx), sign)
}

fn check_partition(lambda: &[usize], m: usize) -> Result<()> {
    if lambda.len() > m {
        return Err(Error::Domain(format!("partition of length {} in {m} variables", lambda.len())));
    }
    if lambda.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::Domain(format!("{lambda:?} is not weakly decreasing")));
    }
    Ok(())
}

/// Complete homogeneous symmetric polynomials `h_0..=h_k` of `x`.
pub fn complete_homogeneous(k: usize, x: &[C64]) -> Vec<C64> {
    let mut h = vec![ZERO; k + 1];
    h[0] = ONE;
    for &xi in x {
        for d in 1..=k {
            let prev = h[d - 1];
            h[d] += xi * prev;
        }
    }
    h
}

/// `e_k(x)`; `k > len(x)` is a range error.
pub fn elementary(k: usize, x: &[C64]) -> Result<C64> {
    if k > x.len() {
        return Err(Error::Range(format!("e_{k} in {} variables", x.len())));
    }
    let mut e = vec![ZERO; k + 1];
    e[0] = ONE;
    for &xi in x {
        for d in (1..=k).rev() {
            let prev = e[d - 1];
            e[d] += xi * prev;
        }
    }
    Ok(e[k])
}

/// Schur polynomial via the bialternant `χ_{λ+δ}(x)/Δ(x)`, falling back to Jacobi–Trudi
/// when two variables nearly coincide (`min|x_i − x_j| < 1e−6·max|x_i|`).
pub fn schur(lambda: &[usize], x: &[C64]) -> Result<C64> {
    let m = x.len();
    check_partition(lambda, m)?;
    let scale = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut gap = f64::INFINITY;
    for i in 0..m {
        for j in i + 1..m {
            gap = gap.min((x[i] - x[j]).norm());
        }
    }
    if m <= 1 || gap >= 1e-6 * scale {
        let mu: Vec<i64> = (0..m).map(|j| (lambda.get(j).copied().unwrap_or(0) + m - 1 - j) as i64).collect();
        if m == 0 {
            return Ok(ONE);
        }
        Ok(chi(&mu, x)? / vandermonde(x))
    } else {
        Ok(schur_jacobi_trudi(lambda, x))
    }
}

/// `s_λ = det(h_{λ_i − i + j})`, division free.
pub fn schur_jacobi_trudi(lambda: &[usize], x: &[C64]) -> C64 {
    let l = lambda.len();
    if l == 0 {
        return ONE;
    }
    let h = complete_homogeneous(lambda[0] + l, x);
    let mut entries = Vec::with_capacity(l * l);
    for i in 0..l {
        for j in 0..l {
            let k = lambda[i] as i64 - i as i64 + j as i64;
            entries.push(if k < 0 { ZERO } else { h[k as usize] });
        }
    }
    determinant(l, &entries)
}

/// `(n−1, n−1, …, 1, 1, 0, 0)`, of length `2n`.
pub fn double_staircase(n: usize) -> Vec<usize> {
    (0..2 * n).map(|j| n - 1 - j / 2).collect()
}

/// `(n, n−1, n−1, …, 1, 1, 0)`, of length `2n`.
pub fn shifted_double_staircase(n: usize) -> Vec<usize> {
    (0..2 * n).map(|j| n - j.div_ceil(2)).collect()
}

/// `∏_{i<j}(x_i³ + x_j³)/(x_i² − x_j²) · pf((x_i² − x_j²)/(x_i³ + x_j³))`.
pub fn sundquist_pfaffian(x: &[C64]) -> Result<C64> {
    if !x.len().is_multiple_of(2) {
        return Err(Error::Domain("Sundquist pfaffian needs an even number of variables".into()));
    }
    let mut pre = ONE;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let (num, den) = (x[i].powi(3) + x[j].powi(3), x[i] * x[i] - x[j] * x[j]);
            if num.norm() < 1e-300 || den.norm() < 1e-300 {
                return Err(Error::Degenerate(format!("x_{i}, x_{j} make a denominator vanish")));
            }
            pre *= num / den;
        }
    }
    let a = SkewMatrix::from_upper(x.len(), |i, j| (x[i] * x[i] - x[j] * x[j]) / (x[i].powi(3) + x[j].powi(3)))?;
    Ok(pre * pfaffian(&a))
}

/// Relative residual of `s_{n−1,n−1,…,1,1,0,0}(x²) = sundquist_pfaffian(x)`.
pub fn sundquist_check(x: &[C64]) -> Result<f64> {
    let rhs = sundquist_pfaffian(x)?;
    let x2: Vec<C64> = x.iter().map(|z| z * z).collect();
    let lhs = schur(&double_staircase(x.len() / 2), &x2)?;
    Ok((lhs - rhs).norm() / lhs.norm())
}

/// `T_λ(x) = ∏_{i<j}(x_j³ + x_i³)/(x_j² − x_i²) · pf([[A, B], [−Bᵀ, 0]])` with
/// `A_ij = (x_j² − x_i²)/(x_j³ + x_i³)` and `B_ij = x_i^{λ_j}`.
pub fn t_lambda(lambda: &[i64], x: &[C64]) -> Result<C64> {
    let (n, m) = (x.len(), lambda.len());
    if (n + m) % 2 != 0 {
        return Err(Error::Domain(format!("T_lambda needs n + m even (n = {n}, m = {m})")));
    }
    let mut pre = ONE;
    for i in 0..n {
        for j in i + 1..n {
            let (num, den) = (x[j].powi(3) + x[i].powi(3), x[j] * x[j] - x[i] * x[i]);
            if num.norm() < 1e-300 || den.norm() < 1e-300 {
                return Err(Error::Degenerate(format!("x_{i}, x_{j} make a denominator vanish")));
            }
            pre *= num / den;
        }
    }
    let mut b = Vec::with_capacity(n * m);
    for &xi in x {
        for &l in lambda {
            b.push(ipow(xi, l)?);
        }
    }
    let a = |i: usize, j: usize| (x[j] * x[j] - x[i] * x[i]) / (x[j].powi(3) + x[i].powi(3));
    Ok(pre * bordered_from_parts(n, a, &b, m)?)
}

/// Residual of the pfaffian expansion identity:
/// `pf(A + Σ_k (B^k C^kᵀ − C^k B^kᵀ))` against the sum over increasing index tuples of
/// `(−1)^m pf([[A, X], [−Xᵀ, 0]])`, `X = (B^{k_m} … B^{k_1} C^{k_1} … C^{k_m})`.
///
/// The sign `(−1)^m` comes from pairing each border column with a row of `A`:
/// for `2×2` A and one index the bordered pfaffian is `a₁₂ − b₁c₂ + b₂c₁`.
pub fn pel_check(a: &SkewMatrix, b: &[Vec<C64>], c: &[Vec<C64>]) -> Result<f64> {
    let dim = a.dim();
    if b.len() != c.len() || b.iter().chain(c).any(|v| v.len() != dim) {
        return Err(Error::Domain("B and C must be families of equal size of dim-length vectors".into()));
    }
    let lhs_m = SkewMatrix::from_upper(dim, |i, j| {
        a.get(i, j) + b.iter().zip(c).map(|(bk, ck)| bk[i] * ck[j] - bk[j] * ck[i]).sum::<C64>()
    })?;
    let lhs = pfaffian(&lhs_m);
    let mut rhs = ZERO;
    for mask in 0u32..(1 << b.len()) {
        let ks: Vec<usize> = (0..b.len()).filter(|k| mask >> k & 1 == 1).collect();
        let m = 2 * ks.len();
        let cols: Vec<&Vec<C64>> = ks.iter().rev().map(|&k| &b[k]).chain(ks.iter().map(|&k| &c[k])).collect();
        let x: Vec<C64> = (0..dim).flat_map(|i| cols.iter().map(move |col| col[i])).collect();
        let sign = if ks.len().is_multiple_of(2) { 1.0 } else { -1.0 };
        rhs += sign * bordered_from_parts(dim, |i, j| a.get(i, j), &x, m)?;
    }
    let scale = lhs.norm().max(rhs.norm()).max(f64::MIN_POSITIVE);
    Ok((lhs - rhs).norm() / scale)
}

/// The determinant expression
/// `∏_{i,j}(u_i³ − v_j³)/(u_i − v_j) · det((u_i − v_j)/(u_i³ − v_j³)) / ∏_{i<j}(u_i − u_j)(v_i − v_j)`.
pub fn okada_determinant(u: &[C64], v: &[C64]) -> Result<C64> {
    let n = u.len();
    if v.len() != n {
        return Err(Error::Domain("u and v must have equal length".into()));
    }
    let mut pre = ONE;
    let mut entries = Vec::with_capacity(n * n);
    for &ui in u {
        for &vj in v {
            let (num, den) = (ui.powi(3) - vj.powi(3), ui - vj);
            if num.norm() < 1e-300 || den.norm() < 1e-300 {
                return Err(Error::Degenerate("u_i^3 = v_j^3".into()));
            }
            pre *= num / den;
            entries.push(den / num);
        }
    }
    let dv = vandermonde(u) * vandermonde(v);
    if dv.norm() < 1e-300 {
        return Err(Error::Degenerate("repeated u or v".into()));
    }
    Ok(pre * determinant(n, &entries) / dv)
}

/// Relative residual of `okada_determinant(u, v) = s_{n−1,n−1,…,1,1,0,0}(u, v)`.
pub fn okada_check(u: &[C64], v: &[C64]) -> Result<f64> {
    let f = okada_determinant(u, v)?;
    let x: Vec<C64> = u.iter().chain(v).copied().collect();
    let s = schur(&double_staircase(u.len()), &x)?;
    Ok((f - s).norm() / s.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn rand_c(rng: &mut ChaCha8Rng) -> C64 {
        C64::from_polar(rng.gen_range(0.6..1.4), rng.gen_range(0.0..std::f64::consts::TAU))
    }

    /// Sum over semistandard tableaux of shape λ with entries `0..m`.
    fn schur_ssyt(lambda: &[usize], x: &[C64]) -> C64 {
        let cells: Vec<(usize, usize)> =
            lambda.iter().enumerate().flat_map(|(r, &len)| (0..len).map(move |col| (r, col))).collect();
        let mut filling = vec![vec![0usize; lambda.first().copied().unwrap_or(0)]; lambda.len()];
        fn fill(
            idx: usize,
            cells: &[(usize, usize)],
            filling: &mut Vec<Vec<usize>>,
            x: &[C64],
            acc: C64,
            total: &mut C64,
        ) {
            if idx == cells.len() {
                *total += acc;
                return;
            }
            let (r, col) = cells[idx];
            let lo_row = if col > 0 { filling[r][col - 1] } else { 0 };
            let lo_col = if r > 0 { filling[r - 1][col] + 1 } else { 0 };
            for v in lo_row.max(lo_col)..x.len() {
                filling[r][col] = v;
                fill(idx + 1, cells, filling, x, acc * x[v], total);
            }
        }
        let mut total = ZERO;
        fill(0, &cells, &mut filling, x, ONE, &mut total);
        total
    }

    fn partitions(max_size: usize, max_len: usize) -> Vec<Vec<usize>> {
        fn rec(rem: usize, max_part: usize, len_left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            out.push(cur.clone());
            if len_left == 0 {
                return;
            }
            for part in 1..=max_part.min(rem) {
                cur.push(part);
                rec(rem - part, part, len_left - 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(max_size, max_size, max_len, &mut Vec::new(), &mut out);
        out
    }

    #[test]
    fn chi_examples() {
        let (a, b) = (c(1.3, 0.2), c(-0.4, 0.9));
        assert!((chi(&[1, 0], &[a, b]).unwrap() - (a - b)).norm() < 1e-15);
        assert!((chi(&[0, 1], &[a, b]).unwrap() - (b - a)).norm() < 1e-15);
        let v = chi(&[2, 1, 0], &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]).unwrap();
        assert!((v - c(-2.0, 0.0)).norm() < 1e-13);
        assert!(chi(&[1, 0], &[a]).is_err());
        assert!(chi(&[-1, 0], &[ZERO, a]).is_err());
    }

    #[test]
    fn chi_antisymmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x: Vec<C64> = (0..4).map(|_| rand_c(&mut rng)).collect();
        let mu = [3, 1, -1, -2];
        let base = chi(&mu, &x).unwrap();
        let swapped_x = [x[2], x[1], x[0], x[3]];
        let swapped_mu = [3, -2, -1, 1];
        assert!((chi(&mu, &swapped_x).unwrap() + base).norm() < 1e-12 * base.norm());
        assert!((chi(&swapped_mu, &x).unwrap() + base).norm() < 1e-12 * base.norm());
    }

    #[test]
    fn schur_examples() {
        let x: Vec<C64> = (1..=4).map(|k| c(k as f64, 0.0)).collect();
        assert!((schur(&[], &x).unwrap() - ONE).norm() < 1e-14);
        assert!((schur(&[1, 1, 0, 0], &x).unwrap() - 35.0).norm() < 1e-11);
        assert!((schur(&double_staircase(1), &x[..2]).unwrap() - ONE).norm() < 1e-14);
        assert!(schur(&[0, 1], &x).is_err());
    }

    #[test]
    fn elementary_examples() {
        let x = [c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)];
        assert_eq!(elementary(0, &x).unwrap(), ONE);
        assert_eq!(elementary(2, &x).unwrap(), c(11.0, 0.0));
        assert_eq!(elementary(3, &x).unwrap(), c(6.0, 0.0));
        assert!(elementary(4, &x).is_err());
    }

    #[test]
    fn staircases() {
        assert_eq!(double_staircase(3), vec![2, 2, 1, 1, 0, 0]);
        assert_eq!(shifted_double_staircase(3), vec![3, 2, 2, 1, 1, 0]);
        assert_eq!(shifted_double_staircase(1), vec![1, 0]);
    }

    #[test]
    fn bialternant_matches_tableaux() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for m in 1..=6 {
            let x: Vec<C64> = (0..m).map(|_| rand_c(&mut rng)).collect();
            for lambda in partitions(6, m) {
                let a = schur(&lambda, &x).unwrap();
                let b = schur_ssyt(&lambda, &x);
                let jt = schur_jacobi_trudi(&lambda, &x);
                assert!((a - b).norm() < 1e-9 * b.norm().max(1.0), "{lambda:?}");
                assert!((jt - b).norm() < 1e-9 * b.norm().max(1.0), "{lambda:?}");
            }
        }
    }

    #[test]
    fn schur_near_coincidence_uses_fallback() {
        let x = [c(0.7, 0.2), c(0.7, 0.2 + 1e-9), c(-0.3, 1.1)];
        let lambda = [2, 1];
        let got = schur(&lambda, &x).unwrap();
        assert!((got - schur_ssyt(&lambda, &x)).norm() < 1e-12);
    }

    #[test]
    fn schur_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x: Vec<C64> = (0..5).map(|_| rand_c(&mut rng)).collect();
        let y = [x[3], x[0], x[4], x[2], x[1]];
        let lambda = [3, 2, 2, 1];
        let (a, b) = (schur(&lambda, &x).unwrap(), schur(&lambda, &y).unwrap());
        assert!((a - b).norm() < 1e-10 * a.norm());
    }

    #[test]
    fn sundquist_small_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x2: Vec<C64> = (0..2).map(|_| rand_c(&mut rng)).collect();
        assert!(sundquist_check(&x2).unwrap() < 1e-14);
        for (n, tol) in [(2, 1e-10), (3, 1e-9)] {
            let x: Vec<C64> = (0..2 * n).map(|_| rand_c(&mut rng)).collect();
            assert!(sundquist_check(&x).unwrap() < tol);
        }
        assert!(sundquist_check(&[ONE, ONE]).is_err());
    }

    #[test]
    fn t_lambda_cases() {
        let x = [c(0.8, 0.3), c(-0.2, 1.1)];
        assert!((t_lambda(&[], &x).unwrap() - ONE).norm() < 1e-14);
        assert_eq!(t_lambda(&[], &[]).unwrap(), ONE);
        assert!(t_lambda(&[1], &x).is_err());
        // n = 2, λ = (1, 0): 4×4 [[A, B], [-Bᵀ, 0]] has pf = a12·0 − b11·b22 + b12·b21
        let a12 = (x[1] * x[1] - x[0] * x[0]) / (x[1].powi(3) + x[0].powi(3));
        let expected = (-x[0] * ONE + ONE * x[1]) / a12;
        assert!((t_lambda(&[1, 0], &x).unwrap() - expected).norm() < 1e-13);
    }

    #[test]
    fn t_lambda_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x: Vec<C64> = (0..4).map(|_| rand_c(&mut rng)).collect();
        let y = [x[2], x[3], x[1], x[0]];
        let lambda = [2, -1];
        let (a, b) = (t_lambda(&lambda, &x).unwrap(), t_lambda(&lambda, &y).unwrap());
        assert!((a - b).norm() < 1e-9 * a.norm());
    }

    #[test]
    fn pel_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = SkewMatrix::from_upper(4, |_, _| rand_c(&mut rng)).unwrap();
        assert!(pel_check(&a, &[], &[]).unwrap() < 1e-15);
        let zeros = vec![vec![ZERO; 4]; 2];
        assert!(pel_check(&a, &zeros, &zeros).unwrap() < 1e-15);
        let b: Vec<Vec<C64>> = (0..2).map(|_| (0..4).map(|_| rand_c(&mut rng)).collect()).collect();
        let cc: Vec<Vec<C64>> = (0..2).map(|_| (0..4).map(|_| rand_c(&mut rng)).collect()).collect();
        assert!(pel_check(&a, &b, &cc).unwrap() < 1e-11);
    }

    #[test]
    fn okada_matches_schur() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=3 {
            let u: Vec<C64> = (0..n).map(|_| rand_c(&mut rng)).collect();
            let v: Vec<C64> = (0..n).map(|_| rand_c(&mut rng)).collect();
            assert!(okada_check(&u, &v).unwrap() < 1e-9);
        }
    }
}
