//! Laurent, Schur and `T_λ` expansions of `P_n^(σ)`, the trigonometric leading terms,
//! Glaisher's T-numbers, the Lambert series moments and the homogeneous (Hankel) limit.
//!
//! Hatted labels are handled by evaluating the unhatted formulas at `τ + 3`, which flips
//! the sign of every odd power of `p^{1/3}` and `p` and leaves the entries otherwise intact.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::numkernel::{legendre3, q_pochhammer, Nome, TruncationPolicy, C64};
use crate::pfaffian::determinant;
use crate::sympoly::{double_staircase, elementary, schur, shifted_double_staircase, t_lambda, vandermonde};

use super::{p_sigma, Kernel, SigmaLabel};

const ONE: C64 = C64::new(1.0, 0.0);
const ZERO: C64 = C64::new(0.0, 0.0);

/// Largest cutoff accepted by the expansion sums.
pub const MAX_CUTOFF: usize = 400;

/// Tail bound the automatic cutoff aims for, relative to the largest single term.
pub const TAIL_TARGET: f64 = 1e-11;

/// Tail bound a caller-supplied cutoff must meet.
pub const TAIL_LIMIT: f64 = 1e-9;

/// Exponent pattern of a kernel's Laurent series: `x^{2k}` or `x^{2k−1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(base: u8) -> Parity {
        match base {
            0 | 4 => Parity::Even,
            _ => Parity::Odd,
        }
    }

    /// `e_k = 2k` or `2k − 1`.
    pub fn exponent(self, k: i64) -> i64 {
        match self {
            Parity::Even => 2 * k,
            Parity::Odd => 2 * k - 1,
        }
    }
}

/// Unhatted label and the nome at which its formulas are evaluated.
fn effective(sigma: SigmaLabel, nome: &Nome) -> (u8, Nome) {
    if sigma.is_hatted() {
        (sigma.base(), nome.shifted(3.0))
    } else {
        (sigma.base(), *nome)
    }
}

fn poch(a: C64, base: C64) -> Result<C64> {
    q_pochhammer(a, base, &TruncationPolicy::default())
}

/// The normalising constant `C_σ` of the Laurent expansion.
pub fn c_sigma(sigma: SigmaLabel, nome: &Nome) -> Result<C64> {
    let (base, nome) = effective(sigma, nome);
    let p = |l: f64| nome.p_pow(l);
    let p2 = poch(p(2.0), p(2.0))?;
    let den = p2 * p2;
    Ok(match base {
        0 => -poch(p(4.0), p(4.0))? / (den * poch(p(4.0 / 3.0), p(4.0 / 3.0))?),
        1 => poch(p(1.0), p(1.0))? / (den * poch(p(3.0), p(3.0))?),
        2 => poch(-p(1.0), -p(1.0))? / (den * poch(-p(3.0), -p(3.0))?),
        3 => poch(p(1.0), p(1.0))? / (den * poch(p(1.0 / 3.0), p(1.0 / 3.0))?),
        4 => -poch(p(4.0), p(4.0))? / (den * poch(p(12.0), p(12.0))?),
        6 => -poch(-p(1.0), -p(1.0))? / (den * poch(-p(1.0 / 3.0), -p(1.0 / 3.0))?),
        _ => unreachable!("validated sigma base"),
    })
}

/// Coefficient `c_k`, `k ≥ 1`, of `x^{e_k} − x^{−e_k}` in the kernel divided by `C_σ`
/// (unhatted base, nome already shifted for hats).
fn positive_coefficient(base: u8, k: i64, nome: &Nome) -> C64 {
    debug_assert!(k >= 1);
    let p = |l: f64| nome.p_pow(l);
    let kf = k as f64;
    let sgn = |e: i64| if e.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    match base {
        0 => (ONE - p(4.0 * kf / 3.0)) / (ONE + p(2.0 * kf)) * p((kf - 1.0) / 3.0),
        1 => {
            let q = p(2.0 * kf - 1.0);
            q * (legendre3(k + 1) as f64 * sgn(k)) / (ONE - q)
        }
        2 => p(kf - 1.0) * legendre3(k + 1) as f64 / (ONE + p(2.0 * kf - 1.0)),
        3 => (ONE - p((2.0 * kf - 1.0) / 3.0)) / (ONE - p(2.0 * kf - 1.0)) * p((2.0 * kf - 2.0) / 3.0) * sgn(k),
        4 => p(kf - 1.0) * legendre3(k) as f64 / (ONE + p(2.0 * kf)),
        6 => (ONE - p((4.0 * kf - 2.0) / 3.0)) / (ONE + p(2.0 * kf - 1.0)) * p((kf - 1.0) / 3.0),
        _ => unreachable!("validated sigma base"),
    }
}

/// `(x^{−2} − x²)/(x^{−3} + x³)`, the rational part of the `σ = 1` kernel.
pub fn sigma1_rational(x: C64) -> Result<C64> {
    let den = x.powi(-3) + x.powi(3);
    if den.norm() < 1e-300 {
        return Err(Error::Pole(format!("x^6 = -1 at x = {x}")));
    }
    Ok((x.powi(-2) - x.powi(2)) / den)
}

/// Radii `(ρ, 1/ρ)` of the annulus where the Laurent series of the kernel converges.
pub fn annulus(sigma: SigmaLabel, nome: &Nome) -> (f64, f64) {
    let r = nome.modulus();
    let lambda = match sigma.base() {
        0 | 6 => 1.0 / 6.0,
        1 => 1.0,
        2 | 4 => 0.5,
        3 => 1.0 / 3.0,
        _ => unreachable!("validated sigma base"),
    };
    if r == 0.0 {
        (0.0, f64::INFINITY)
    } else {
        let inner = r.powf(lambda);
        (inner, 1.0 / inner)
    }
}

/// Laurent coefficients of `a(w)/b(w)` in `x = e^{iπw}`:
/// `a/b = C_σ (R(x) + Σ_k c_k x^{e_k})`, with `R` nonzero only for `σ = 1, 1̂`.
#[derive(Debug, Clone)]
pub struct LaurentTable {
    pub sigma: SigmaLabel,
    pub c_sigma: C64,
    pub parity: Parity,
    pub k_range: RangeInclusive<i64>,
    coeffs: Vec<C64>,
}

impl LaurentTable {
    /// `c_k` for `k` in the table range. `c_{−k} = −c_k` (even) and `c_{1−k} = −c_k` (odd);
    /// for `σ = 1` the bilateral coefficients exclude the rational part.
    pub fn coefficient(&self, k: i64) -> Option<C64> {
        if self.k_range.contains(&k) {
            Some(self.coeffs[(k - self.k_range.start()) as usize])
        } else {
            None
        }
    }

    pub fn exponent(&self, k: i64) -> i64 {
        self.parity.exponent(k)
    }

    /// Whether the expansion carries the rational term `R(x)`.
    pub fn has_rational_part(&self) -> bool {
        self.sigma.base() == 1
    }
}

/// Coefficient table `k ↦ c_k` over `k_range`.
pub fn laurent_coefficients(sigma: SigmaLabel, k_range: RangeInclusive<i64>, nome: &Nome) -> Result<LaurentTable> {
    if nome.modulus() >= 0.9 {
        return Err(Error::Domain(format!("|p| = {} must be below 0.9", nome.modulus())));
    }
    if k_range.is_empty() {
        return Err(Error::Domain("empty k range".into()));
    }
    let (base, eff) = effective(sigma, nome);
    let parity = Parity::of(base);
    let coeff = |k: i64| -> C64 {
        match parity {
            Parity::Even if k == 0 => ZERO,
            Parity::Even if k < 0 => -positive_coefficient(base, -k, &eff),
            Parity::Odd if k <= 0 => -positive_coefficient(base, 1 - k, &eff),
            _ => positive_coefficient(base, k, &eff),
        }
    };
    let coeffs = k_range.clone().map(coeff).collect();
    Ok(LaurentTable { sigma, c_sigma: c_sigma(sigma, nome)?, parity, k_range, coeffs })
}

fn check_annulus(sigma: SigmaLabel, x: C64, nome: &Nome) -> Result<()> {
    let (lo, hi) = annulus(sigma, nome);
    let r = x.norm();
    if !(r > lo && r < hi) {
        return Err(Error::Domain(format!("|x| = {r} outside the annulus ({lo}, {hi}) for sigma {sigma}")));
    }
    Ok(())
}

/// The Laurent series of the kernel summed at `x` until three consecutive terms are
/// negligible.
pub fn laurent_series(sigma: SigmaLabel, x: C64, nome: &Nome, policy: &TruncationPolicy) -> Result<C64> {
    check_annulus(sigma, x, nome)?;
    let (base, eff) = effective(sigma, nome);
    let parity = Parity::of(base);
    let mut sum = if base == 1 { sigma1_rational(x)? } else { ZERO };
    let mut small_run = 0;
    for k in 1..=policy.max_terms as i64 {
        let e = parity.exponent(k);
        let term = positive_coefficient(base, k, &eff) * (x.powi(e as i32) - x.powi(-e as i32));
        sum += term;
        if term.norm() <= policy.rel_tol * sum.norm() {
            small_run += 1;
            if small_run >= 3 {
                return Ok(c_sigma(sigma, nome)? * sum);
            }
        } else {
            small_run = 0;
        }
    }
    Err(Error::Truncation(format!("Laurent series for sigma {sigma} did not converge at x = {x}")))
}

/// The kernel `a(w)/b(w)` at `x = e^{iπw}`, from the theta-product definition.
pub fn laurent_closed_form(sigma: SigmaLabel, x: C64, nome: &Nome) -> Result<C64> {
    let w = x.ln() / C64::new(0.0, PI);
    Kernel::new(sigma, nome).ratio(w)
}

/// Relative residual between the summed Laurent series and the closed-form kernel.
pub fn laurent_check(sigma: SigmaLabel, x: C64, nome: &Nome) -> Result<f64> {
    let closed = laurent_closed_form(sigma, x, nome)?;
    let series = laurent_series(sigma, x, nome, &TruncationPolicy::default())?;
    Ok((closed - series).norm() / closed.norm())
}

/// `max_{i,j} |x_i/x_j|`.
fn max_ratio(x: &[C64]) -> f64 {
    let (lo, hi) = x.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v.norm()), hi.max(v.norm())));
    hi / lo
}

/// Smallest cutoff `K ≥ min_k` whose tail `Σ_{k>K} a_k` is below `target · max_k a_k`.
fn choose_cutoff<F: Fn(usize) -> f64>(a: F, min_k: usize, target: f64) -> Result<usize> {
    let (mut peak, mut k) = (0.0f64, 1usize);
    let mut total = 0.0;
    let mut magnitudes = Vec::new();
    // terms decay geometrically past the peak; stop once a run of them is negligible
    let mut small_run = 0;
    while k <= MAX_CUTOFF + 64 {
        let v = a(k);
        magnitudes.push(v);
        peak = peak.max(v);
        total += v;
        if v <= 1e-18 * total {
            small_run += 1;
            if small_run >= 8 {
                break;
            }
        } else {
            small_run = 0;
        }
        k += 1;
    }
    if small_run < 8 {
        return Err(Error::Truncation("coefficient sequence does not decay".into()));
    }
    let mut tail: f64 = magnitudes.iter().sum();
    for (idx, v) in magnitudes.iter().enumerate() {
        let cut = idx + 1;
        tail -= v;
        if cut >= min_k && tail <= target * peak {
            if cut > MAX_CUTOFF {
                break;
            }
            return Ok(cut);
        }
    }
    Err(Error::Truncation(format!("required cutoff exceeds {MAX_CUTOFF}")))
}

/// Tail of `a_k` beyond `cutoff`, relative to the largest term.
fn tail_ratio<F: Fn(usize) -> f64>(a: F, cutoff: usize) -> f64 {
    let peak = (1..=cutoff.max(1)).map(&a).fold(0.0f64, f64::max);
    let mut tail = 0.0;
    let mut k = cutoff + 1;
    loop {
        let v = a(k);
        tail += v;
        if v <= 1e-18 * tail.max(peak) || k > cutoff + 4 * MAX_CUTOFF {
            break;
        }
        k += 1;
    }
    if peak == 0.0 {
        0.0
    } else {
        tail / peak
    }
}

fn resolve_cutoff<F: Fn(usize) -> f64 + Copy>(a: F, n: usize, cutoff: Option<usize>) -> Result<usize> {
    match cutoff {
        Some(k) => {
            let t = tail_ratio(a, k);
            if k < n || t > TAIL_LIMIT {
                Err(Error::Truncation(format!("cutoff {k} leaves a relative tail of {t:.2e}")))
            } else {
                Ok(k)
            }
        }
        None => choose_cutoff(a, n, TAIL_TARGET),
    }
}

/// Calls `f` on every strictly increasing tuple `1 ≤ k_1 < … < k_m ≤ cutoff`.
fn for_each_increasing<F: FnMut(&[i64])>(cutoff: usize, m: usize, f: &mut F) {
    fn rec<F: FnMut(&[i64])>(start: i64, cutoff: i64, m: usize, acc: &mut Vec<i64>, f: &mut F) {
        if acc.len() == m {
            f(acc);
            return;
        }
        let need = (m - acc.len()) as i64;
        for k in start..=cutoff - need + 1 {
            acc.push(k);
            rec(k + 1, cutoff, m, acc, f);
            acc.pop();
        }
    }
    rec(1, cutoff as i64, m, &mut Vec::with_capacity(m), f);
}

/// Powers `y_i^e` for `|e| ≤ bound`, indexed `[i][e + bound]`.
fn power_table(y: &[C64], bound: usize) -> Vec<Vec<C64>> {
    y.iter()
        .map(|&v| {
            let inv = v.inv();
            let mut row = vec![ZERO; 2 * bound + 1];
            row[bound] = ONE;
            for e in 1..=bound {
                row[bound + e] = row[bound + e - 1] * v;
                row[bound - e] = row[bound - e + 1] * inv;
            }
            row
        })
        .collect()
}

fn chi_from_table(mu: &[i64], table: &[Vec<C64>], bound: usize) -> C64 {
    let m = mu.len();
    let mut entries = Vec::with_capacity(m * m);
    for row in table {
        for &e in mu {
            entries.push(row[(e + bound as i64) as usize]);
        }
    }
    determinant(m, &entries)
}

fn prefactor_b(sigma: SigmaLabel, z: &[C64], nome: &Nome) -> Result<C64> {
    let k = Kernel::new(sigma, nome);
    let mut pre = ONE;
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            pre *= k.b(z[i] - z[j])?;
        }
    }
    Ok(pre)
}

fn check_points(z: &[C64]) -> Result<usize> {
    if z.is_empty() || !z.len().is_multiple_of(2) {
        return Err(Error::Domain(format!("need an even, positive number of points, got {}", z.len())));
    }
    Ok(z.len() / 2)
}

fn check_ratio_annulus(sigma: SigmaLabel, x: &[C64], nome: &Nome) -> Result<f64> {
    let m = max_ratio(x);
    let (_, hi) = annulus(sigma, nome);
    if m >= hi {
        return Err(Error::Domain(format!("max |x_i/x_j| = {m} outside the convergence annulus (< {hi})")));
    }
    Ok(m)
}

/// `∏ b_ij · C_σ^n · Σ_{k_1<…<k_n≤K} ∏ c_{k_j} · χ_μ(x²)` (times `X` for odd kernels), with
/// `μ = (k_n, …, k_1, −k_1, …, −k_n)` or `(k_n − 1, …, k_1 − 1, −k_1, …, −k_n)`.
/// Returns the value and the cutoff used.
pub fn schur_expansion(sigma: SigmaLabel, z: &[C64], nome: &Nome, cutoff: Option<usize>) -> Result<(C64, usize)> {
    let n = check_points(z)?;
    if sigma.base() == 1 {
        return Err(Error::Domain("the sigma = 1 kernel has a rational part; use the T_lambda expansion".into()));
    }
    if nome.modulus() > 0.5 + 1e-12 {
        return Err(Error::Domain(format!("|p| = {} exceeds 0.5", nome.modulus())));
    }
    let x: Vec<C64> = z.iter().map(|&v| crate::numkernel::exp_i_pi(v)).collect();
    let m = check_ratio_annulus(sigma, &x, nome)?;
    let (base, eff) = effective(sigma, nome);
    let parity = Parity::of(base);
    let a = |k: usize| positive_coefficient(base, k as i64, &eff).norm() * m.powi(parity.exponent(k as i64) as i32);
    let cut = resolve_cutoff(a, n, cutoff)?;
    let coeffs: Vec<C64> = (1..=cut as i64).map(|k| positive_coefficient(base, k, &eff)).collect();
    let y: Vec<C64> = x.iter().map(|v| v * v).collect();
    let table = power_table(&y, cut);
    let mut sum = ZERO;
    let mut mu = vec![0i64; 2 * n];
    for_each_increasing(cut, n, &mut |ks| {
        let mut w = ONE;
        for (j, &k) in ks.iter().enumerate() {
            w *= coeffs[(k - 1) as usize];
            mu[n - 1 - j] = if parity == Parity::Even { k } else { k - 1 };
            mu[n + j] = -k;
        }
        if w != ZERO {
            sum += w * chi_from_table(&mu, &table, cut);
        }
    });
    if parity == Parity::Odd {
        sum *= x.iter().product::<C64>();
    }
    let pre = prefactor_b(sigma, z, nome)? * c_sigma(sigma, nome)?.powi(n as i32);
    Ok((pre * sum, cut))
}

/// Relative residual of the truncated Schur expansion against the direct pfaffian.
pub fn schur_expansion_check(sigma: SigmaLabel, z: &[C64], nome: &Nome, cutoff: Option<usize>) -> Result<f64> {
    let (series, _) = schur_expansion(sigma, z, nome, cutoff)?;
    let direct = p_sigma(sigma, z, nome)?;
    Ok((series - direct).norm() / direct.norm())
}

/// `d_k = ((k+1)/3)(−1)^{k−1} p^{2k−1}/(1 − p^{2k−1})`, the weights of the `T_λ` expansion.
fn sqe_weight(k: i64, nome: &Nome) -> C64 {
    -positive_coefficient(1, k, nome)
}

/// The `T_λ` expansion of `P_n^(1)` (or `P_n^(1̂)`), truncated at `k ≤ K`.
/// Returns the value and the cutoff used.
pub fn sqe_expansion(sigma: SigmaLabel, z: &[C64], nome: &Nome, cutoff: Option<usize>) -> Result<(C64, usize)> {
    let n = check_points(z)?;
    if sigma.base() != 1 {
        return Err(Error::Domain(format!("the T_lambda expansion is for sigma = 1, got {sigma}")));
    }
    if nome.modulus() > 0.4 + 1e-12 {
        return Err(Error::Domain(format!("|p| = {} exceeds 0.4", nome.modulus())));
    }
    let x: Vec<C64> = z.iter().map(|&v| crate::numkernel::exp_i_pi(v)).collect();
    let m = check_ratio_annulus(sigma, &x, nome)?;
    let (_, eff) = effective(sigma, nome);
    let a = |k: usize| sqe_weight(k as i64, &eff).norm() * m.powi(2 * k as i32 - 1);
    let cut = resolve_cutoff(a, 1, cutoff)?;
    let y: Vec<C64> = x.iter().map(|v| v * v).collect();
    let mut sum = ZERO;
    for size in 0..=n {
        let mut err = None;
        for_each_increasing(cut, size, &mut |ks| {
            if err.is_some() {
                return;
            }
            let mut w = ONE;
            let mut lambda = vec![0i64; 2 * size];
            for (j, &k) in ks.iter().enumerate() {
                w *= sqe_weight(k, &eff);
                lambda[size - 1 - j] = k - 1;
                lambda[size + j] = -k;
            }
            if w == ZERO {
                return;
            }
            match t_lambda(&lambda, &y) {
                Ok(t) => sum += w * t,
                Err(e) => err = Some(e),
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
    }
    let p6 = eff.p_pow(6.0);
    let policy = TruncationPolicy::default();
    let mut pre = ONE;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let r6 = (x[i] / x[j]).powi(6);
            pre *= q_pochhammer(-p6 * r6, p6, &policy)? * q_pochhammer(-p6 / r6, p6, &policy)?;
        }
    }
    let big_x: C64 = x.iter().product();
    let x4: Vec<C64> = x.iter().map(|v| v.powi(4)).collect();
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let c1 = c_sigma(sigma, nome)?;
    let total = c1.powi(n as i32) * sign * big_x.powi(4 - 6 * n as i32) * vandermonde(&x4) * pre * sum;
    Ok((total, cut))
}

/// Relative residual of the truncated `T_λ` expansion against the direct pfaffian.
pub fn sqe_expansion_check(sigma: SigmaLabel, z: &[C64], nome: &Nome, cutoff: Option<usize>) -> Result<f64> {
    let (series, _) = sqe_expansion(sigma, z, nome, cutoff)?;
    let direct = p_sigma(sigma, z, nome)?;
    Ok((series - direct).norm() / direct.norm())
}

/// The leading term `π_n^(σ)` of `P_n^(σ)` as `p → 0`, evaluated at the given nome.
pub fn trig_leading(sigma: SigmaLabel, z: &[C64], nome: &Nome) -> Result<C64> {
    let n = check_points(z)?;
    let (base, eff) = effective(sigma, nome);
    let x: Vec<C64> = z.iter().map(|&v| crate::numkernel::exp_i_pi(v)).collect();
    let big_x: C64 = x.iter().product();
    let x2: Vec<C64> = x.iter().map(|v| v * v).collect();
    let x4: Vec<C64> = x.iter().map(|v| v.powi(4)).collect();
    let ni = n as i32;
    let nf = n as f64;
    let sgn = |e: i64| if e.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let p = |l: f64| eff.p_pow(l);
    let d2 = vandermonde(&x2);
    let ds = double_staircase(n);
    let sds = shifted_double_staircase(n);
    let odd = n % 2 == 1;
    Ok(match base {
        0 => p(nf * (nf - 1.0) / 6.0) * sgn(n as i64) * big_x.powi(-2 * ni) * d2 * elementary(n, &x2)?,
        1 => sgn(n as i64) * big_x.powi(4 - 6 * ni) * vandermonde(&x4) * schur(&ds, &x4)?,
        2 if odd => {
            p((nf - 1.0) * (3.0 * nf + 1.0) / 4.0) * sgn((n as i64 + 1) / 2) * big_x.powi(2 - 3 * ni) * d2 * schur(&ds, &x2)?
        }
        2 => p(nf * (3.0 * nf - 2.0) / 4.0) * sgn(n as i64 / 2) * big_x.powi(1 - 3 * ni) * d2 * schur(&sds, &x2)?,
        3 => p(nf * (nf - 1.0) / 3.0) * sgn((n * (n + 1) / 2) as i64) * big_x.powi(2 - 4 * ni) * vandermonde(&x4),
        4 if odd => {
            p((nf - 1.0) * (3.0 * nf - 1.0) / 4.0) * sgn((n as i64 + 1) / 2) * big_x.powi(1 - 3 * ni) * d2 * schur(&sds, &x2)?
        }
        4 => p(nf * (3.0 * nf - 4.0) / 4.0) * sgn(n as i64 / 2) * big_x.powi(2 - 3 * ni) * d2 * schur(&ds, &x2)?,
        6 => p(nf * (nf - 1.0) / 6.0) * sgn(n as i64) * big_x.powi(1 - 2 * ni) * d2,
        _ => unreachable!("validated sigma base"),
    })
}

/// Gap between the leading and next `p`-exponent in the relative correction to `π_n^(σ)`.
pub fn trig_gap(sigma: SigmaLabel) -> f64 {
    match sigma.base() {
        0 | 3 | 6 => 1.0 / 3.0,
        _ => 1.0,
    }
}

/// Outcome of the trigonometric-limit slope test.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigSlope {
    /// `(|p|, |P − π|/|π|)` pairs.
    pub residuals: Vec<(f64, f64)>,
    /// Least-squares slope of `log residual` against `log |p|`.
    pub slope: f64,
    /// Minimal accepted slope.
    pub required: f64,
}

impl TrigSlope {
    pub fn passed(&self) -> bool {
        self.slope >= self.required
    }
}

/// Relative distance of `P_n^(σ)` from `π_n^(σ)` along real `p = 10^{−3}, 10^{−4}`, and
/// the fitted convergence slope.
pub fn trig_leading_check(sigma: SigmaLabel, z: &[C64]) -> Result<TrigSlope> {
    trig_leading_check_at(sigma, z, &[1e-3, 1e-4])
}

/// [`trig_leading_check`] along the given moduli of real `p`.
pub fn trig_leading_check_at(sigma: SigmaLabel, z: &[C64], moduli: &[f64]) -> Result<TrigSlope> {
    if moduli.len() < 2 {
        return Err(Error::Domain("the slope test needs at least two nomes".into()));
    }
    let mut residuals = Vec::with_capacity(moduli.len());
    for &r in moduli {
        let nome = Nome::from_polar(r, 0.0)?;
        let lead = trig_leading(sigma, z, &nome)?;
        let full = p_sigma(sigma, z, &nome)?;
        residuals.push((r, (full - lead).norm() / lead.norm()));
    }
    let pts: Vec<(f64, f64)> = residuals.iter().map(|&(r, e)| (r.ln(), e.ln())).collect();
    let k = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), &(u, v)| (a + u / k, b + v / k));
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), &(u, v)| (a + (u - mx) * (v - my), b + (u - mx) * (u - mx)));
    Ok(TrigSlope { residuals, slope: sxy / sxx, required: trig_gap(sigma) - 0.1 })
}

/// Largest index accepted by [`glaisher_t`].
pub const GLAISHER_MAX: usize = 32;

/// Glaisher's T-numbers: `sin(2z)/(2cos 3z) = Σ T_j z^{2j+1}/(2j+1)!`.
///
/// Multiplying through by `cos 3z` gives `Σ_{k=0}^{j} C(2j+1, 2k)(−9)^k T_{j−k} = (−4)^j`.
pub fn glaisher_t(j: usize) -> Result<BigInt> {
    if j > GLAISHER_MAX {
        return Err(Error::Range(format!("Glaisher T_{j}: index above {GLAISHER_MAX}")));
    }
    let mut t: Vec<BigInt> = Vec::with_capacity(j + 1);
    for m in 0..=j {
        let mut v = BigInt::from(-4).pow(m as u32);
        let mut binom = BigInt::from(1);
        let top = 2 * m as u64 + 1;
        for k in 1..=m {
            // C(top, 2k) from C(top, 2k − 2)
            let (a, b) = (2 * k as u64 - 1, 2 * k as u64);
            binom = binom * (top - a + 1) * (top - b + 1) / (a * b);
            v -= &binom * BigInt::from(-9).pow(k as u32) * &t[m - k];
        }
        t.push(v);
    }
    Ok(t.pop().expect("j + 1 entries"))
}

/// The Hankel moment `L_j^(σ) = Σ_{k≥1} c_k e_k^{2j+1}` (plus `(−1)^{j+1} T_j` for `σ = 1`).
pub fn lambert_l(sigma: SigmaLabel, j: usize, nome: &Nome, policy: &TruncationPolicy) -> Result<C64> {
    if nome.modulus() >= 0.9 {
        return Err(Error::Domain(format!("|p| = {} must be below 0.9", nome.modulus())));
    }
    let (base, eff) = effective(sigma, nome);
    let parity = Parity::of(base);
    let mut sum = if base == 1 {
        let t = glaisher_t(j)?;
        let tf: f64 = t.to_string().parse().expect("decimal integer");
        C64::new(if j.is_multiple_of(2) { -tf } else { tf }, 0.0)
    } else {
        ZERO
    };
    let power = |k: i64| (parity.exponent(k) as f64).powi(2 * j as i32 + 1);
    if nome.is_zero() {
        return Ok(sum + positive_coefficient(base, 1, &eff) * power(1));
    }
    // k^{2j+1}|p|^{λk} peaks near k = (2j+1)/(λ ln(1/|p|)); λ ≥ 1/3 for every label
    let peak = ((2 * j + 1) as f64 / (-nome.modulus().ln() / 3.0)).ceil() as usize + 2;
    let mut small_run = 0;
    for k in 1..=policy.max_terms {
        let term = positive_coefficient(base, k as i64, &eff) * power(k as i64);
        sum += term;
        if k > peak && term.norm() <= policy.rel_tol * sum.norm().max(1e-300) {
            small_run += 1;
            if small_run >= 3 {
                return Ok(sum);
            }
        } else {
            small_run = 0;
        }
    }
    Err(Error::Truncation(format!("Lambert series L_{j} for sigma {sigma} did not converge")))
}

/// `det(f^{(2i+2j−3)}(0)) / ∏_{j=1}^{2n}(j−1)!`, the homogeneous limit of
/// `pf(f(z_i − z_j))/∏_{i<j}(z_i − z_j)` for odd `f`; `derivative(m)` returns `f^{(m)}(0)`.
pub fn odd_kernel_limit<F: Fn(usize) -> C64>(derivative: F, n: usize) -> C64 {
    let mut entries = Vec::with_capacity(n * n);
    for i in 1..=n {
        for j in 1..=n {
            entries.push(derivative(2 * i + 2 * j - 3));
        }
    }
    let fact: f64 = (1..=2 * n).map(|j| (1..j).map(|v| v as f64).product::<f64>()).product();
    determinant(n, &entries) / fact
}

/// `D_σ = π·b(0)`.
pub fn d_sigma(sigma: SigmaLabel, nome: &Nome) -> Result<C64> {
    let (base, eff) = effective(sigma, nome);
    let p = |l: f64| eff.p_pow(l);
    let sq = |v: C64| v * v;
    Ok(match base {
        0 | 6 => sq(poch(p(1.0 / 3.0), p(2.0 / 3.0))?) * PI,
        1 => sq(poch(-p(6.0), p(6.0))?) * 2.0 * PI,
        2 | 4 => sq(poch(p(3.0), p(6.0))?) * PI,
        3 => sq(poch(-p(2.0 / 3.0), p(2.0 / 3.0))?) * 2.0 * PI,
        _ => unreachable!("validated sigma base"),
    })
}

/// `H_n^(σ) = det(L_{i+j−2})`.
pub fn hankel_h(sigma: SigmaLabel, n: usize, nome: &Nome) -> Result<C64> {
    let policy = TruncationPolicy::default();
    let moments: Vec<C64> = (0..2 * n - 1).map(|j| lambert_l(sigma, j, nome, &policy)).collect::<Result<_>>()?;
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            entries.push(moments[i + j]);
        }
    }
    Ok(determinant(n, &entries))
}

/// `(2iC_σ)^n D_σ^{n(2n−1)} H_n^(σ) / ∏_{j=1}^{2n}(j−1)!`.
pub fn hankel_limit(sigma: SigmaLabel, n: usize, nome: &Nome) -> Result<C64> {
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    let c = c_sigma(sigma, nome)?;
    let d = d_sigma(sigma, nome)?;
    let fact: f64 = (1..=2 * n).map(|j| (1..j).map(|v| v as f64).product::<f64>()).product();
    let two_i_c = C64::new(0.0, 2.0) * c;
    Ok(two_i_c.powi(n as i32) * d.powi((n * (2 * n - 1)) as i32) * hankel_h(sigma, n, nome)? / fact)
}

/// Step sizes of the Richardson extrapolation for the homogeneous limit.
pub const HOMOGENEOUS_STEPS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

/// `P_n^(σ)(h, 2h, …, 2nh) / ∏_{i<j}(z_i − z_j)`.
pub fn homogeneous_ratio(sigma: SigmaLabel, n: usize, h: f64, nome: &Nome) -> Result<C64> {
    let z: Vec<C64> = (1..=2 * n).map(|j| C64::new(j as f64 * h, 0.0)).collect();
    let mut den = ONE;
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            den *= z[i] - z[j];
        }
    }
    Ok(p_sigma(sigma, &z, nome)? / den)
}

/// Richardson extrapolation in `h²` of [`homogeneous_ratio`] over [`HOMOGENEOUS_STEPS`].
pub fn homogeneous_extrapolated(sigma: SigmaLabel, n: usize, nome: &Nome) -> Result<C64> {
    let [h0, h1, h2] = HOMOGENEOUS_STEPS;
    let l0 = homogeneous_ratio(sigma, n, h0, nome)?;
    let l1 = homogeneous_ratio(sigma, n, h1, nome)?;
    let l2 = homogeneous_ratio(sigma, n, h2, nome)?;
    let r0 = (l1 * 4.0 - l0) / 3.0;
    let r1 = (l2 * 4.0 - l1) / 3.0;
    // successive h² eliminations must already agree to a few digits
    if (r1 - r0).norm() > 1e-1 * r1.norm() {
        return Err(Error::Limit(format!(
            "homogeneous limit for sigma {sigma}, n = {n} does not settle (steps differ by {:.1e})",
            (r1 - r0).norm() / r1.norm()
        )));
    }
    Ok((r1 * 16.0 - r0) / 15.0)
}

/// Relative difference between the extrapolated coincidence limit and the Hankel formula.
pub fn homogeneous_limit_check(sigma: SigmaLabel, n: usize, nome: &Nome) -> Result<f64> {
    if nome.modulus() > 0.5 + 1e-12 {
        return Err(Error::Domain(format!("|p| = {} exceeds 0.5", nome.modulus())));
    }
    let lhs = homogeneous_extrapolated(sigma, n, nome)?;
    let rhs = hankel_limit(sigma, n, nome)?;
    Ok((lhs - rhs).norm() / rhs.norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn real_z(n: usize) -> Vec<C64> {
        let base = [0.11, 0.37, 0.58, 0.83, 0.26, 0.71, 0.05, 0.94];
        (0..2 * n).map(|j| c(base[j], 0.0)).collect()
    }

    #[test]
    fn laurent_series_matches_closed_form() {
        let nome = Nome::from_polar(0.3, 0.4).unwrap();
        let x = c(0.9, 0.0) * c(0.0, 0.2).exp();
        for sigma in SigmaLabel::all() {
            let r = laurent_check(sigma, x, &nome).unwrap();
            assert!(r < 1e-10, "sigma {sigma}: {r:e}");
        }
    }

    #[test]
    fn laurent_table_symmetry_and_constants() {
        let nome = Nome::from_polar(0.25, 0.1).unwrap();
        let even = laurent_coefficients(SigmaLabel::plain(0), -5..=5, &nome).unwrap();
        let odd = laurent_coefficients(SigmaLabel::plain(3), -5..=6, &nome).unwrap();
        for k in 1..=5 {
            assert_eq!(even.coefficient(-k).unwrap(), -even.coefficient(k).unwrap());
            assert_eq!(odd.coefficient(1 - k).unwrap(), -odd.coefficient(k).unwrap());
        }
        assert_eq!(even.coefficient(0).unwrap(), ZERO);
        assert!(even.coefficient(9).is_none());
        let z = Nome::zero();
        assert!((c_sigma(SigmaLabel::plain(1), &z).unwrap() - ONE).norm() < 1e-15);
        let x = c(0.3, 0.5);
        let k1 = laurent_coefficients(SigmaLabel::plain(1), 1..=3, &z).unwrap();
        assert!(k1.has_rational_part());
        assert_eq!(k1.coefficient(1).unwrap(), ZERO);
        let expected = (x.powi(-2) - x.powi(2)) / (x.powi(-3) + x.powi(3));
        assert!((sigma1_rational(x).unwrap() - expected).norm() < 1e-14);
    }

    #[test]
    fn laurent_rejects_points_outside_annulus() {
        let nome = Nome::from_polar(0.3, 0.0).unwrap();
        let e = laurent_series(SigmaLabel::plain(0), c(2.0, 0.0), &nome, &TruncationPolicy::default());
        assert!(matches!(e, Err(Error::Domain(_))));
    }

    #[test]
    fn schur_expansions_match_pfaffians() {
        let nome = Nome::from_polar(0.3, 0.7).unwrap();
        for base in [0u8, 2, 3, 4, 6] {
            for sigma in [SigmaLabel::plain(base), SigmaLabel::hat(base)] {
                for n in 1..=2 {
                    let r = schur_expansion_check(sigma, &real_z(n), &nome, None).unwrap();
                    assert!(r < 1e-7, "sigma {sigma}, n {n}: {r:e}");
                }
            }
        }
    }

    #[test]
    fn short_cutoff_is_a_truncation_error() {
        let nome = Nome::from_polar(0.3, 0.0).unwrap();
        let e = schur_expansion_check(SigmaLabel::plain(6), &real_z(1), &nome, Some(12));
        assert!(matches!(e, Err(Error::Truncation(_))));
        let (_, k) = schur_expansion(SigmaLabel::plain(6), &real_z(1), &nome, None).unwrap();
        assert!(schur_expansion_check(SigmaLabel::plain(6), &real_z(1), &nome, Some(k)).unwrap() < 1e-8);
    }

    #[test]
    fn sqe_matches_pfaffian() {
        for (r, n) in [(0.3, 1), (0.2, 2), (0.4, 2)] {
            let nome = Nome::from_polar(r, 0.5).unwrap();
            for sigma in [SigmaLabel::plain(1), SigmaLabel::hat(1)] {
                let res = sqe_expansion_check(sigma, &real_z(n), &nome, None).unwrap();
                assert!(res < 1e-7, "sigma {sigma}, |p| {r}, n {n}: {res:e}");
            }
        }
    }

    #[test]
    fn leading_terms_converge_with_expected_slope() {
        let z: Vec<C64> = real_z(2).iter().enumerate().map(|(j, v)| v + c(0.0, 0.01 * j as f64 - 0.02)).collect();
        for base in SigmaLabel::BASES {
            let s = trig_leading_check(SigmaLabel::plain(base), &z).unwrap();
            assert!(s.passed(), "sigma {base}: {s:?}");
        }
    }

    #[test]
    fn leading_term_sign_examples() {
        // σ = 3, n = 1: −X^{−2}Δ(x⁴)
        let z = [c(0.1, 0.0), c(0.35, 0.0)];
        let x: Vec<C64> = z.iter().map(|&v| crate::numkernel::exp_i_pi(v)).collect();
        let want = -(x[0] * x[1]).powi(-2) * (x[0].powi(4) - x[1].powi(4));
        let got = trig_leading(SigmaLabel::plain(3), &z, &Nome::zero()).unwrap();
        assert!((got - want).norm() < 1e-14);
    }

    #[test]
    fn glaisher_numbers() {
        let want = [1i64, 23, 1681, 257543, 67637281];
        for (j, &w) in want.iter().enumerate() {
            assert_eq!(glaisher_t(j).unwrap(), BigInt::from(w));
        }
        assert!(glaisher_t(32).is_ok());
        assert!(matches!(glaisher_t(33), Err(Error::Range(_))));
    }

    #[test]
    fn lambert_values_at_p_zero() {
        let z = Nome::zero();
        let pol = TruncationPolicy::default();
        assert_eq!(lambert_l(SigmaLabel::plain(1), 2, &z, &pol).unwrap(), c(-1681.0, 0.0));
        assert_eq!(lambert_l(SigmaLabel::plain(2), 0, &z, &pol).unwrap(), c(-1.0, 0.0));
        for j in 0..4 {
            let v = lambert_l(SigmaLabel::plain(4), j, &z, &pol).unwrap();
            assert_eq!(v, c(2f64.powi(2 * j as i32 + 1), 0.0));
        }
    }

    #[test]
    fn odd_kernel_limit_of_sine() {
        // f = sin: f^{(m)}(0) = (−1)^{(m−1)/2} for odd m
        let d = |m: usize| c(if (m / 2).is_multiple_of(2) { 1.0 } else { -1.0 }, 0.0);
        assert_eq!(odd_kernel_limit(d, 1), ONE);
        // f = sin z + sin 3z/2 has a nonsingular 2×2 Hankel matrix
        let f = |w: C64| w.sin() + (w * 3.0).sin() * 0.5;
        let df = |m: usize| d(m) * (1.0 + 0.5 * 3f64.powi(m as i32));
        let z = [c(0.01, 0.0), c(0.02, 0.0), c(0.03, 0.0), c(0.04, 0.0)];
        let num = crate::ellpf::kernel_pfaffian(&z, f);
        let lim = odd_kernel_limit(df, 2);
        assert!((num / vandermonde(&z) - lim).norm() < 1e-2 * lim.norm());
    }

    #[test]
    fn homogeneous_limits_match_hankel_formula() {
        for nome in [Nome::from_polar(0.3, 0.6).unwrap(), Nome::from_polar(0.5, -1.1).unwrap()] {
        for base in SigmaLabel::BASES {
            for n in 1..=2 {
                let r = homogeneous_limit_check(SigmaLabel::plain(base), n, &nome).unwrap();
                assert!(r < 1e-5, "sigma {base}, n {n}: {r:e}");
            }
        }
        }
    }
}
