//! Eight-vertex model on an odd chain at `η = π/3`: R-weights, dense transfer
//! matrices, the conjectured eigenvalue `φ(u)` and the elliptic-pfaffian solutions
//! of the scalar TQ-equation `φ(u)Q(u) = φ(u−η)Q(u+2η) + φ(u+η)Q(u−2η)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::ellpf::{p_sigma, SigmaLabel, MAX_N};
use crate::error::{Error, Result};
use crate::numkernel::{q_pochhammer, theta_jacobi, Nome, TruncationPolicy, C64};
use crate::pfaffian::determinant;

/// Crossing parameter of the supersymmetric point.
pub const ETA: f64 = PI / 3.0;
/// Largest chain for which dense `2^N × 2^N` matrices are built.
pub const MAX_CHAIN: usize = 9;
/// Inhomogeneities with `|θ1(u_i − u_j|τ)|` below this are rejected as degenerate.
pub const GENERICITY_TOL: f64 = 1e-8;
/// Points on the Cauchy contour used for derivatives.
pub const CONTOUR_POINTS: usize = 64;

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

fn rel_residual(defect: C64, terms: &[C64]) -> f64 {
    let scale = terms.iter().map(|t| t.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        defect.norm()
    } else {
        defect.norm() / scale
    }
}

/// Largest `|v_i − v_0| / |v_0|` over a list of values that should coincide.
fn spread(vals: &[C64]) -> f64 {
    let base = vals[0];
    vals.iter().map(|v| (v - base).norm() / base.norm()).fold(0.0, f64::max)
}

/// Parameters of an inhomogeneous odd chain. Invariant: `N` odd, `N ≤ MAX_CHAIN`,
/// pairwise `θ1(u_i − u_j|τ)` bounded away from zero, `p ≠ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvParams {
    nome: Nome,
    u: Vec<C64>,
    rho: C64,
}

impl EvParams {
    /// Chain with the standard normalisation `ρ = p^{−1/4}/((p²;p²)_∞(p⁴;p⁴)_∞)`.
    pub fn new(nome: Nome, u: Vec<C64>) -> Result<Self> {
        let rho = standard_rho(&nome)?;
        Self::with_rho(nome, u, rho)
    }

    /// Chain with an explicit normalisation factor.
    pub fn with_rho(nome: Nome, u: Vec<C64>, rho: C64) -> Result<Self> {
        if nome.is_zero() {
            return Err(Error::Domain("the eight-vertex weights need p != 0".into()));
        }
        let n = u.len();
        if n == 0 || n.is_multiple_of(2) {
            return Err(Error::Domain(format!("chain length {n} must be odd")));
        }
        if n > MAX_CHAIN {
            return Err(Error::Range(format!("chain length {n} exceeds {MAX_CHAIN}")));
        }
        for i in 0..n {
            for j in i + 1..n {
                let g = theta_jacobi(1, u[i] - u[j], &nome)?.norm();
                if g < GENERICITY_TOL {
                    return Err(Error::Degenerate(format!("theta1(u_{} - u_{}) = {g:e}", i + 1, j + 1)));
                }
            }
        }
        Ok(EvParams { nome, u, rho })
    }

    /// Homogeneous chain `u_1 = … = u_N = 0`, bypassing the genericity test.
    pub fn homogeneous(nome: Nome, n: usize) -> Result<Self> {
        if nome.is_zero() {
            return Err(Error::Domain("the eight-vertex weights need p != 0".into()));
        }
        if n == 0 || n.is_multiple_of(2) || n > MAX_CHAIN {
            return Err(Error::Range(format!("chain length {n} must be odd and at most {MAX_CHAIN}")));
        }
        Ok(EvParams { nome, u: vec![zero(); n], rho: standard_rho(&nome)? })
    }

    pub fn nome(&self) -> &Nome {
        &self.nome
    }

    pub fn inhomogeneities(&self) -> &[C64] {
        &self.u
    }

    pub fn rho(&self) -> C64 {
        self.rho
    }

    /// Chain length `N`.
    pub fn len(&self) -> usize {
        self.u.len()
    }

    /// Always false: a chain has at least one site.
    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// `t = e^{i(u_1 + … + u_N)}`.
    pub fn t(&self) -> C64 {
        (C64::i() * self.u.iter().sum::<C64>()).exp()
    }

    /// Pfaffian order `n` with `N = 2n − 1`.
    pub fn pfaffian_order(&self) -> usize {
        self.len().div_ceil(2)
    }
}

/// `ρ = p^{−1/4}/((p²;p²)_∞(p⁴;p⁴)_∞)`.
pub fn standard_rho(nome: &Nome) -> Result<C64> {
    if nome.is_zero() {
        return Err(Error::Domain("rho is singular at p = 0".into()));
    }
    let policy = TruncationPolicy::default();
    let p2 = nome.p_pow(2.0);
    let p4 = nome.p_pow(4.0);
    Ok(nome.p_pow(-0.25) / (q_pochhammer(p2, p2, &policy)? * q_pochhammer(p4, p4, &policy)?))
}

/// The four distinct Boltzmann weights `[a, b, c, d]`:
/// `a = R^{++}_{++}`, `b = R^{+−}_{+−}`, `c = R^{+−}_{−+}`, `d = R^{++}_{−−}`.
pub fn ev_weights(u: C64, params: &EvParams) -> Result<[C64; 4]> {
    let n2 = params.nome.scaled(2.0);
    let eta = C64::new(ETA, 0.0);
    let th = |k: u8, w: C64| theta_jacobi(k, w, &n2);
    let (t1e, t4e) = (th(1, 2.0 * eta)?, th(4, 2.0 * eta)?);
    let (t1m, t4m) = (th(1, u - eta)?, th(4, u - eta)?);
    let (t1p, t4p) = (th(1, u + eta)?, th(4, u + eta)?);
    let r = params.rho;
    Ok([r * t4e * t4m * t1p, r * t4e * t1m * t4p, r * t1e * t4m * t4p, r * t1e * t1m * t1p])
}

/// `R(u)` as a 4×4 matrix with entry `[(m,n),(k,l)] = R_{kl}^{mn}`; index 0 is `+`, 1 is `−`.
/// Only entries with `k + l ≡ m + n (mod 2)` are nonzero.
pub fn ev_r_matrix(u: C64, params: &EvParams) -> Result<[[C64; 4]; 4]> {
    let [a, b, c, d] = ev_weights(u, params)?;
    let mut r = [[zero(); 4]; 4];
    r[0][0] = a;
    r[3][3] = a;
    r[1][1] = b;
    r[2][2] = b;
    r[1][2] = c;
    r[2][1] = c;
    r[0][3] = d;
    r[3][0] = d;
    Ok(r)
}

/// Dense transfer matrix `T(u) = Tr_0(R_{01}(u−u_1) ⋯ R_{0N}(u−u_N))` on `(C²)^{⊗N}`.
/// Site 1 is the most significant bit of a basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix {
    pub n: usize,
    pub matrix: DMatrix<C64>,
}

/// Builds `T(u)` entrywise: `⟨a'|T|a⟩ = Tr ∏_j A_j` with `(A_j)_{αβ} = R_{β a_j}^{α a'_j}(u − u_j)`.
pub fn transfer_matrix(u: C64, params: &EvParams) -> Result<TransferMatrix> {
    let n = params.len();
    if n > MAX_CHAIN {
        return Err(Error::Range(format!("chain length {n} exceeds {MAX_CHAIN}")));
    }
    let rs: Vec<[[C64; 4]; 4]> = params
        .u
        .iter()
        .map(|&uj| ev_r_matrix(u - uj, params))
        .collect::<Result<_>>()?;
    let dim = 1usize << n;
    let mut m = DMatrix::from_element(dim, dim, zero());
    for out in 0..dim {
        for inp in 0..dim {
            let mut acc = [[C64::new(1.0, 0.0), zero()], [zero(), C64::new(1.0, 0.0)]];
            for (j, r) in rs.iter().enumerate() {
                let bit = n - 1 - j;
                let (sa, sb) = ((out >> bit) & 1, (inp >> bit) & 1);
                let mut a = [[zero(); 2]; 2];
                for (al, row) in a.iter_mut().enumerate() {
                    for (be, e) in row.iter_mut().enumerate() {
                        *e = r[2 * al + sa][2 * be + sb];
                    }
                }
                let mut next = [[zero(); 2]; 2];
                for x in 0..2 {
                    for y in 0..2 {
                        next[x][y] = acc[x][0] * a[0][y] + acc[x][1] * a[1][y];
                    }
                }
                acc = next;
            }
            m[(out, inp)] = acc[0][0] + acc[1][1];
        }
    }
    Ok(TransferMatrix { n, matrix: m })
}

/// Frobenius norm of `[T(u), T(v)]` relative to `‖T(u)‖‖T(v)‖`.
pub fn commutator_check(u: C64, v: C64, params: &EvParams) -> Result<f64> {
    let a = transfer_matrix(u, params)?.matrix;
    let b = transfer_matrix(v, params)?.matrix;
    let c = &a * &b - &b * &a;
    Ok(c.norm() / (a.norm() * b.norm()))
}

/// Relative Frobenius norm of `[T(u), σˣ⊗…⊗σˣ]`.
pub fn spin_flip_check(u: C64, params: &EvParams) -> Result<f64> {
    let t = transfer_matrix(u, params)?.matrix;
    let dim = t.nrows();
    let mask = dim - 1;
    let mut worst: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            worst = worst.max((t[(i, j)] - t[(i ^ mask, j ^ mask)]).norm());
        }
    }
    Ok(worst / t.norm())
}

/// `φ(u) = ∏_j θ1(u − u_j|τ)`.
pub fn phi(u: C64, params: &EvParams) -> Result<C64> {
    params
        .u
        .iter()
        .try_fold(C64::new(1.0, 0.0), |acc, &uj| Ok(acc * theta_jacobi(1, u - uj, &params.nome)?))
}

/// Residuals of `φ(u+π) = −φ(u)` and `φ(u+πτ) = −t²e^{−iN(2u+πτ)}φ(u)`.
pub fn phi_quasi_period_check(u: C64, params: &EvParams) -> Result<(f64, f64)> {
    let tau = params.nome.tau().expect("nonzero nome");
    let f = phi(u, params)?;
    let a = phi(u + PI, params)?;
    let b = phi(u + PI * tau, params)?;
    let n = params.len() as f64;
    let mult = -params.t().powi(2) * (-C64::i() * n * (2.0 * u + PI * tau)).exp();
    Ok((rel_residual(a + f, &[a, f]), rel_residual(b - mult * f, &[b, mult * f])))
}

/// Outcome of the Razumov–Stroganov test at a set of spectral points.
#[derive(Debug, Clone, PartialEq)]
pub struct RsVerdict {
    /// `min_λ |λ − φ(u)|/|φ(u)|` over the spectrum of `T(u)`, per sample.
    pub eigen_gaps: Vec<f64>,
    /// `1 − |⟨x_i, x_0⟩|` for the unit eigenvectors found at each sample.
    pub overlap_defects: Vec<f64>,
    /// `‖T(v)x − φ(v)x‖/(|φ(v)|‖x‖)` for the first eigenvector against every sample.
    pub cross_residuals: Vec<f64>,
}

impl RsVerdict {
    /// Largest deviation of any kind.
    pub fn worst(&self) -> f64 {
        self.eigen_gaps
            .iter()
            .chain(&self.overlap_defects)
            .chain(&self.cross_residuals)
            .fold(0.0, |a, &b| a.max(b))
    }

    pub fn passed(&self, eigen_tol: f64, overlap_tol: f64) -> bool {
        self.eigen_gaps.iter().all(|&g| g < eigen_tol)
            && self.overlap_defects.iter().all(|&d| d < overlap_tol)
            && self.cross_residuals.iter().all(|&r| r < eigen_tol)
    }
}

/// Eigenvalue of `T` nearest to `target` and its unit eigenvector, refined by
/// inverse iteration at a shift displaced slightly from the eigenvalue.
pub fn nearest_eigenpair(t: &DMatrix<C64>, target: C64) -> Result<(C64, DVector<C64>)> {
    let dim = t.nrows();
    let eig = t
        .clone()
        .schur()
        .eigenvalues()
        .ok_or_else(|| Error::Eigen("Schur decomposition did not converge".into()))?;
    let lam = eig
        .iter()
        .copied()
        .min_by(|a, b| (a - target).norm().total_cmp(&(b - target).norm()))
        .ok_or_else(|| Error::Eigen("empty spectrum".into()))?;
    let scale = t.norm().max(f64::MIN_POSITIVE);
    let shift = lam + C64::new(1e-10, 1e-10) * scale;
    let shifted = t - DMatrix::identity(dim, dim) * shift;
    let lu = shifted.lu();
    let mut x = DVector::from_fn(dim, |i, _| C64::new(1.0 + 0.1 * i as f64, 0.3 - 0.01 * i as f64));
    x /= C64::new(x.norm(), 0.0);
    for _ in 0..4 {
        let y = lu
            .solve(&x)
            .ok_or_else(|| Error::Eigen("singular shifted matrix in inverse iteration".into()))?;
        x = &y / C64::new(y.norm(), 0.0);
    }
    Ok((lam, x))
}

/// `‖T x − λ x‖ / (|λ|‖x‖)`.
fn eigen_residual(t: &DMatrix<C64>, x: &DVector<C64>, lam: C64) -> f64 {
    (t * x - x * lam).norm() / (lam.norm() * x.norm())
}

/// Razumov–Stroganov check: `φ(u)` is an eigenvalue of `T(u)` at each sample with a
/// common eigenvector. Samples are processed in parallel.
pub fn rs_eigenvalue_check(samples: &[C64], params: &EvParams) -> Result<RsVerdict> {
    if samples.is_empty() {
        return Err(Error::Domain("no spectral points supplied".into()));
    }
    let per: Vec<(f64, DVector<C64>, DMatrix<C64>, C64)> = samples
        .par_iter()
        .map(|&u| {
            let t = transfer_matrix(u, params)?.matrix;
            let f = phi(u, params)?;
            if f.norm() < GENERICITY_TOL {
                return Err(Error::Degenerate(format!("phi({u}) vanishes")));
            }
            let (lam, x) = nearest_eigenpair(&t, f)?;
            Ok(((lam - f).norm() / f.norm(), x, t, f))
        })
        .collect::<Result<_>>()?;
    let x0 = per[0].1.clone();
    let eigen_gaps = per.iter().map(|p| p.0).collect();
    let overlap_defects = per.iter().map(|p| 1.0 - p.1.dotc(&x0).norm()).collect();
    let cross_residuals = per.iter().map(|p| eigen_residual(&p.2, &x0, p.3)).collect();
    Ok(RsVerdict { eigen_gaps, overlap_defects, cross_residuals })
}

/// Labels whose pfaffians solve the TQ-equation and its quasi-periodicity
/// conditions at nome `τ/2`: `1̂` gives the `+` solution, `1` the `−` solution.
pub fn tq_labels() -> [SigmaLabel; 2] {
    [SigmaLabel::hat(1), SigmaLabel::plain(1)]
}

/// `φ(u)Q^(σ)(u) = P_n^(σ)(u/2π, u_1/2π, …, u_N/2π; τ/2)`.
pub fn phi_q(sigma: SigmaLabel, u: C64, params: &EvParams) -> Result<C64> {
    let n = params.pfaffian_order();
    if n > MAX_N {
        return Err(Error::Range(format!("pfaffian order {n} exceeds {MAX_N}")));
    }
    let two_pi = 2.0 * PI;
    let mut z = Vec::with_capacity(2 * n);
    z.push(u / two_pi);
    z.extend(params.u.iter().map(|&v| v / two_pi));
    p_sigma(sigma, &z, &params.nome.scaled(0.5))
}

/// `Q^(σ)(u) = P_n^(σ)(u/2π, u_j/2π; τ/2) / φ(u)`.
pub fn q_sigma(sigma: SigmaLabel, u: C64, params: &EvParams) -> Result<C64> {
    let f = phi(u, params)?;
    if f.norm() < GENERICITY_TOL {
        return Err(Error::Pole(format!("phi({u}) = {f:e}")));
    }
    Ok(phi_q(sigma, u, params)? / f)
}

/// Three-term residual of `φ(u)Q(u) − φ(u−η)Q(u+2η) − φ(u+η)Q(u−2η)` relative to
/// the largest term, for an arbitrary function `q`.
pub fn tq_residual_of<F>(q: F, u: C64, params: &EvParams) -> Result<f64>
where
    F: Fn(C64) -> Result<C64>,
{
    let e = C64::new(ETA, 0.0);
    let t0 = phi(u, params)? * q(u)?;
    let t1 = phi(u - e, params)? * q(u + 2.0 * e)?;
    let t2 = phi(u + e, params)? * q(u - 2.0 * e)?;
    Ok(rel_residual(t0 - t1 - t2, &[t0, t1, t2]))
}

/// TQ residual of `Q^(σ)`.
pub fn tq_residual(sigma: SigmaLabel, u: C64, params: &EvParams) -> Result<f64> {
    tq_residual_of(|v| q_sigma(sigma, v, params), u, params)
}

/// Exponent `k` of `t` in `Q(u+2πτ) = t^k e^{−2iN(u+πτ)}Q(u)` forced by the
/// quasi-periodicity of `φ` and of the pfaffian in its first variable.
pub const QQP_T_EXPONENT: i32 = 2;

/// Residuals of `Q(u+2π) = Q(u)` and `Q(u+2πτ) = t^k e^{−2iN(u+πτ)}Q(u)`.
pub fn qqp_check_with<F>(q: F, u: C64, params: &EvParams, t_exponent: i32) -> Result<(f64, f64)>
where
    F: Fn(C64) -> Result<C64>,
{
    let tau = params.nome.tau().expect("nonzero nome");
    let n = params.len() as f64;
    let q0 = q(u)?;
    let a = q(u + 2.0 * PI)?;
    let b = q(u + 2.0 * PI * tau)?;
    let mult = params.t().powi(t_exponent) * (-2.0 * C64::i() * n * (u + PI * tau)).exp();
    Ok((rel_residual(a - q0, &[a, q0]), rel_residual(b - mult * q0, &[b, mult * q0])))
}

/// [`qqp_check_with`] at `k = QQP_T_EXPONENT`.
pub fn qqp_check_of<F>(q: F, u: C64, params: &EvParams) -> Result<(f64, f64)>
where
    F: Fn(C64) -> Result<C64>,
{
    qqp_check_with(q, u, params, QQP_T_EXPONENT)
}

/// [`qqp_check_of`] for `Q^(σ)`.
pub fn qqp_check(sigma: SigmaLabel, u: C64, params: &EvParams) -> Result<(f64, f64)> {
    qqp_check_of(|v| q_sigma(sigma, v, params), u, params)
}

/// `t^{−1} e^{iN(u+πτ/2)} Q^(σ)(u+πτ) / Q^(σ)(u)`: equal to `±1` for the two
/// eigen-solutions of the involution on the solution space.
pub fn involution_ratio(sigma: SigmaLabel, u: C64, params: &EvParams) -> Result<C64> {
    let tau = params.nome.tau().expect("nonzero nome");
    let n = params.len() as f64;
    let q0 = q_sigma(sigma, u, params)?;
    let q1 = q_sigma(sigma, u + PI * tau, params)?;
    Ok((C64::i() * n * (u + PI * tau / 2.0)).exp() * q1 / (params.t() * q0))
}

/// `Q^(σ̂')(u+π) / Q^(σ)(u)` where `σ'` is the shift partner; constant in `u` because
/// the half-period shift `z ↦ z + 1/2` exchanges the two solutions.
pub fn half_shift_ratio(sigma: SigmaLabel, u: C64, params: &EvParams) -> Result<C64> {
    Ok(q_sigma(sigma.toggled(), u + PI, params)? / q_sigma(sigma, u, params)?)
}

/// Which kernel the homogeneous bordered determinant uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HomogeneousKernel {
    /// Denominator `θ2(u/2|τ/6)`, the classical form of the base-3 labels at `τ/2`.
    ThirdPeriod,
    /// Denominator `θ2(3u/2|3τ/2)`, the classical form of the base-1 labels at `τ/2`.
    TriplePeriod,
}

impl HomogeneousKernel {
    /// Kernel matching a label of base 1 or 3.
    pub fn for_label(sigma: SigmaLabel) -> Result<Self> {
        match sigma.base() {
            1 => Ok(HomogeneousKernel::TriplePeriod),
            3 => Ok(HomogeneousKernel::ThirdPeriod),
            b => Err(Error::Domain(format!("no homogeneous determinant for base {b}"))),
        }
    }

    fn denominator(self, u: C64, nome: &Nome) -> Result<C64> {
        match self {
            HomogeneousKernel::ThirdPeriod => theta_jacobi(2, u / 2.0, &nome.scaled(1.0 / 6.0)),
            HomogeneousKernel::TriplePeriod => theta_jacobi(2, 1.5 * u, &nome.scaled(1.5)),
        }
    }

    /// Poles of `f` near the origin: zeros of the denominator.
    fn poles_near(self, centre: C64, nome: &Nome) -> Vec<C64> {
        let tau = nome.tau().expect("nonzero nome");
        let (step_re, step_tau, offset) = match self {
            HomogeneousKernel::ThirdPeriod => (2.0 * PI, PI * tau / 3.0, C64::new(PI, 0.0)),
            HomogeneousKernel::TriplePeriod => (2.0 * PI / 3.0, PI * tau, C64::new(PI / 3.0, 0.0)),
        };
        let m0 = ((centre - offset).im / step_tau.im).round();
        let mut out = Vec::new();
        for b in -2..=2 {
            let base = offset + step_tau * (m0 + b as f64);
            let k0 = ((centre - base).re / step_re).round();
            for a in -2..=2 {
                out.push(base + step_re * (k0 + a as f64));
            }
        }
        out
    }
}

/// `l` index of the kernel: 3 for hatted labels, 4 otherwise.
fn homogeneous_l(sigma: SigmaLabel) -> u8 {
    if sigma.is_hatted() {
        3
    } else {
        4
    }
}

/// `f(u) = θ1θ2θ_l(u/2|τ/2) / den(u)`.
pub fn homogeneous_f(sigma: SigmaLabel, kernel: HomogeneousKernel, u: C64, nome: &Nome) -> Result<C64> {
    let half = nome.scaled(0.5);
    let w = u / 2.0;
    let num = theta_jacobi(1, w, &half)? * theta_jacobi(2, w, &half)? * theta_jacobi(homogeneous_l(sigma), w, &half)?;
    let den = kernel.denominator(u, nome)?;
    if den.norm() < GENERICITY_TOL {
        return Err(Error::Pole(format!("f has a pole at u = {u}")));
    }
    Ok(num / den)
}

/// Derivatives `g^{(0..=order)}(centre)` by the trapezoid rule on a circle.
/// The radius starts at `min(0.2, d/2)`, `d` the distance to the nearest listed pole,
/// and is halved (at most four times) while the sample magnitudes spread by more than `1e6`.
pub fn contour_derivatives<F>(g: F, centre: C64, order: usize, poles: &[C64]) -> Result<Vec<C64>>
where
    F: Fn(C64) -> Result<C64>,
{
    let d = poles.iter().map(|p| (p - centre).norm()).fold(f64::INFINITY, f64::min);
    let mut r = (0.5 * d).min(0.2);
    if !(r > 0.0) {
        return Err(Error::Contour(format!("centre {centre} sits on a pole")));
    }
    for _ in 0..5 {
        let samples: Vec<(C64, C64)> = (0..CONTOUR_POINTS)
            .map(|k| {
                let e = C64::from_polar(1.0, 2.0 * PI * k as f64 / CONTOUR_POINTS as f64);
                Ok((e, g(centre + e * r)?))
            })
            .collect::<Result<_>>()?;
        let mut mags: Vec<f64> = samples.iter().map(|s| s.1.norm()).collect();
        mags.sort_by(f64::total_cmp);
        let median = mags[mags.len() / 2];
        let max = mags[mags.len() - 1];
        if median > 0.0 && max / median > 1e6 {
            r /= 2.0;
            continue;
        }
        let mut out = Vec::with_capacity(order + 1);
        let mut fact = 1.0;
        for k in 0..=order {
            if k > 0 {
                fact *= k as f64;
            }
            let s: C64 = samples.iter().map(|(e, v)| v * e.powi(-(k as i32))).sum();
            out.push(s * fact / (CONTOUR_POINTS as f64 * r.powi(k as i32)));
        }
        return Ok(out);
    }
    Err(Error::Contour(format!("integrand near {centre} keeps spreading after radius halving")))
}

/// Homogeneous-chain solution (up to a constant) as the bordered determinant
/// `den(u)^N/θ1(u|τ)^N · det[[f(u), f''(u), …, f^{(N−1)}(u)], [f^{(2i−1+2j)}(0)]_{i≥1}]`.
pub fn homogeneous_q_det_with(
    sigma: SigmaLabel,
    kernel: HomogeneousKernel,
    u: C64,
    nome: &Nome,
    n_chain: usize,
) -> Result<C64> {
    if nome.is_zero() {
        return Err(Error::Domain("homogeneous determinant needs p != 0".into()));
    }
    if n_chain == 0 || n_chain.is_multiple_of(2) || n_chain > 7 {
        return Err(Error::Range(format!("chain length {n_chain} must be odd and at most 7")));
    }
    let n = n_chain.div_ceil(2);
    let f = |v: C64| homogeneous_f(sigma, kernel, v, nome);
    let at_u = contour_derivatives(f, u, 2 * n - 2, &kernel.poles_near(u, nome))?;
    let at_0 = contour_derivatives(f, zero(), (4 * n).saturating_sub(5), &kernel.poles_near(zero(), nome))?;
    let mut m = vec![zero(); n * n];
    for j in 0..n {
        m[j] = at_u[2 * j];
        for i in 1..n {
            m[i * n + j] = at_0[2 * i - 1 + 2 * j];
        }
    }
    let den = kernel.denominator(u, nome)?;
    let th = theta_jacobi(1, u, nome)?;
    if th.norm() < GENERICITY_TOL {
        return Err(Error::Pole(format!("theta1(u) vanishes at u = {u}")));
    }
    Ok((den / th).powi(n_chain as i32) * determinant(n, &m))
}

/// [`homogeneous_q_det_with`] using the kernel that belongs to the label's base.
pub fn homogeneous_q_det(sigma: SigmaLabel, u: C64, nome: &Nome, n_chain: usize) -> Result<C64> {
    homogeneous_q_det_with(sigma, HomogeneousKernel::for_label(sigma)?, u, nome, n_chain)
}

/// Normalised coincident-point limit `Q^(σ)(u; u_j → 0) / Q^(σ)(u_ref; u_j → 0)`,
/// with `u_j = h·(j − (N+1)/2)`. The configuration is symmetric under `h ↦ −h`, so the
/// ratio is even in `h`; two Richardson stages in `h²` over `h ∈ {0.08, 0.04, 0.02}`.
pub fn coincident_q_ratio(sigma: SigmaLabel, u: C64, u_ref: C64, nome: &Nome, n_chain: usize) -> Result<C64> {
    let steps = [0.08, 0.04, 0.02];
    let vals: Vec<C64> = steps
        .iter()
        .map(|&h| {
            let us = (0..n_chain)
                .map(|j| C64::new(h * (j as f64 - (n_chain as f64 - 1.0) / 2.0), 0.0))
                .collect();
            let params = EvParams::new(*nome, us)?;
            Ok(q_sigma(sigma, u, &params)? / q_sigma(sigma, u_ref, &params)?)
        })
        .collect::<Result<_>>()?;
    let r1 = [(4.0 * vals[1] - vals[0]) / 3.0, (4.0 * vals[2] - vals[1]) / 3.0];
    Ok((16.0 * r1[1] - r1[0]) / 15.0)
}

/// Largest deviation over `us` of `homogeneous_q_det(u)/homogeneous_q_det(u_ref)`
/// from the coincident-point limit of `Q^(σ)`.
pub fn homogeneous_proportionality_check(
    sigma: SigmaLabel,
    us: &[C64],
    u_ref: C64,
    nome: &Nome,
    n_chain: usize,
) -> Result<f64> {
    let d_ref = homogeneous_q_det(sigma, u_ref, nome, n_chain)?;
    let mut worst: f64 = 0.0;
    for &u in us {
        let det = homogeneous_q_det(sigma, u, nome, n_chain)? / d_ref;
        let lim = coincident_q_ratio(sigma, u, u_ref, nome, n_chain)?;
        worst = worst.max(rel_residual(det - lim, &[lim]));
    }
    Ok(worst)
}

/// TQ residual of the homogeneous determinant on the chain `u_j = 0`.
pub fn homogeneous_tq_residual(sigma: SigmaLabel, u: C64, nome: &Nome, n_chain: usize) -> Result<f64> {
    let params = EvParams::homogeneous(*nome, n_chain)?;
    tq_residual_of(|v| homogeneous_q_det(sigma, v, nome, n_chain), u, &params)
}

/// Largest spread of a list of ratios that should be constant.
pub fn ratio_spread(vals: &[C64]) -> f64 {
    spread(vals)
}
