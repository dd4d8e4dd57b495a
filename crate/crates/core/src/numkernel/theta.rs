//! Infinite products, the multiplicative theta function and its classical relatives.

use twofloat::TwoFloat;

use super::nome::{exp_i_pi, C64, Nome, TruncationPolicy};
use crate::error::{Error, Result};

fn check_modulus(p: C64) -> Result<f64> {
    let r = p.norm();
    if !(r < 1.0) {
        return Err(Error::Domain(format!("|p| = {r} must be < 1")));
    }
    Ok(r)
}

/// `(a;p)_∞ = ∏_{j≥0} (1 − a p^j)`.
///
/// The product stops at the first `N` with `|a p^N| < rel_tol·(1 − |p|)`.
pub fn q_pochhammer(a: C64, p: C64, policy: &TruncationPolicy) -> Result<C64> {
    let r = check_modulus(p)?;
    let bound = policy.rel_tol * (1.0 - r);
    let mut prod = C64::new(1.0, 0.0);
    let mut term = a;
    for _ in 0..policy.max_terms {
        if term.norm() < bound {
            return Ok(prod);
        }
        prod *= 1.0 - term;
        term *= p;
    }
    Err(Error::Truncation(format!(
        "(a;p)_inf with |p| = {r} needs more than {} factors",
        policy.max_terms
    )))
}

/// `θ(x;p) = (x;p)_∞ (p/x;p)_∞`.
pub fn theta(x: C64, p: C64, policy: &TruncationPolicy) -> Result<C64> {
    if x == C64::new(0.0, 0.0) {
        return Err(Error::Domain("theta(x;p) at x = 0".into()));
    }
    Ok(q_pochhammer(x, p, policy)? * q_pochhammer(p / x, p, policy)?)
}

/// `θ(s·y; s²) = (sy; s²)_∞ (s/y; s²)_∞`, finite at `s = 0` where it equals 1.
pub fn theta_shifted(s: C64, y: C64, policy: &TruncationPolicy) -> Result<C64> {
    if y == C64::new(0.0, 0.0) {
        return Err(Error::Domain("theta_shifted at y = 0".into()));
    }
    let s2 = s * s;
    Ok(q_pochhammer(s * y, s2, policy)? * q_pochhammer(s / y, s2, policy)?)
}

/// Product of `θ(x;p)` over several arguments sharing one modulus.
pub fn theta_prod(xs: &[C64], p: C64, policy: &TruncationPolicy) -> Result<C64> {
    xs.iter().try_fold(C64::new(1.0, 0.0), |acc, &x| Ok(acc * theta(x, p, policy)?))
}

/// Sums a bilateral series `Σ_n term(n)`, walking outward from `n = 0` in both
/// directions until the terms have peaked and fallen below `rel_tol` times the
/// largest partial sum seen for three consecutive indices (so isolated zero
/// coefficients do not stop the walk).
pub(crate) fn bilateral_sum<F>(mut term: F, policy: &TruncationPolicy, what: &str) -> Result<C64>
where
    F: FnMut(i64) -> C64,
{
    let mut sum = term(0);
    let mut scale = sum.norm();
    let mut done = [false, false];
    let mut prev = [sum.norm(); 2];
    let mut small_run = [0u32; 2];
    for m in 1..=policy.max_terms as i64 {
        for (side, sign) in [(0usize, 1i64), (1, -1)] {
            if done[side] {
                continue;
            }
            let t = term(sign * m);
            sum += t;
            scale = scale.max(sum.norm()).max(t.norm());
            let mag = t.norm();
            if !mag.is_finite() {
                return Err(Error::Truncation(format!("{what}: non-finite term at n = {}", sign * m)));
            }
            if mag <= policy.rel_tol * scale && mag <= prev[side] {
                small_run[side] += 1;
                done[side] = small_run[side] >= 3;
            } else {
                small_run[side] = 0;
            }
            prev[side] = mag;
        }
        if done[0] && done[1] {
            return Ok(sum);
        }
    }
    Err(Error::Truncation(format!("{what}: no convergence within {} terms", policy.max_terms)))
}

/// `θ(x;p)` from Jacobi's triple product, `(p;p)_∞^{-1} Σ (−1)^n p^{n(n−1)/2} x^n`.
///
/// The sum is accumulated in double-double with terms built by exact-to-working-precision
/// recurrences, so it keeps full relative accuracy near the zeros of `θ`, where it
/// cancels far below its largest terms.
pub fn theta_series(x: C64, p: C64, policy: &TruncationPolicy) -> Result<C64> {
    if x == C64::new(0.0, 0.0) {
        return Err(Error::Domain("theta(x;p) at x = 0".into()));
    }
    check_modulus(p)?;
    let pd = dd(p);
    let one = dd(C64::new(1.0, 0.0));
    // t_{n+1} = −p^n x t_n for n ≥ 0 and t_{−n−1} = −p^{n+1} x^{−1} t_{−n}
    let steps = [dd(x), dd_inv(dd(x)) * pd];
    let mut sum = one;
    let mut scale = 1.0f64;
    let mut terms = [one, one];
    let mut pn = one;
    let mut done = [false, false];
    for _ in 0..policy.max_terms {
        for side in 0..2 {
            if done[side] {
                continue;
            }
            terms[side] = -(terms[side] * pn * steps[side]);
            sum += terms[side];
            let mag = dd_norm(&terms[side]);
            if !mag.is_finite() {
                return Err(Error::Truncation("triple product series: non-finite term".into()));
            }
            scale = scale.max(mag);
            // once the next ratio |p^{n+1} step| is below 1 the tail falls super-geometrically
            done[side] = mag < DD_TAIL * scale && dd_norm(&pn) * p.norm() * dd_norm(&steps[side]) < 1.0;
        }
        if done[0] && done[1] {
            return Ok(dd_to_c64(sum) / q_pochhammer(p, p, policy)?);
        }
        pn = pn * pd;
    }
    Err(Error::Truncation(format!("triple product series: no convergence within {} terms", policy.max_terms)))
}

/// Classical Jacobi theta functions `θ_k(z|τ)`, `k = 1..4`, expressed through
/// the multiplicative theta with `x = e^{iz}`, `p = e^{iπτ}`.
pub fn theta_jacobi(k: u8, z: C64, nome: &Nome) -> Result<C64> {
    let policy = TruncationPolicy::default();
    let x = (C64::i() * z).exp();
    let x2 = x * x;
    let p = nome.p();
    let p2 = nome.p_pow(2.0);
    let qp = q_pochhammer(p2, p2, &policy)?;
    match k {
        1 => Ok(C64::i() * nome.p_pow(0.25) * qp * theta(x2, p2, &policy)? / x),
        2 => Ok(nome.p_pow(0.25) * qp * theta(-x2, p2, &policy)? / x),
        3 => Ok(qp * theta(-p * x2, p2, &policy)?),
        4 => Ok(qp * theta(p * x2, p2, &policy)?),
        _ => Err(Error::Domain(format!("theta_{k} does not exist (k must be 1..4)"))),
    }
}

/// Legendre symbol `(k/3)`, the representative of `k mod 3` in `{−1, 0, 1}`.
pub fn legendre3(k: i64) -> i64 {
    match k.rem_euclid(3) {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

/// Left side of the quintuple product identity, `(p²;p²)_∞ θ(x, px, −px; p²)`.
pub fn quintuple_lhs(x: C64, nome: &Nome, policy: &TruncationPolicy) -> Result<C64> {
    let p = nome.p();
    let p2 = nome.p_pow(2.0);
    if x == C64::new(0.0, 0.0) {
        return Err(Error::Domain("quintuple product at x = 0".into()));
    }
    // θ(±px;p²) = (±px, ±p/x; p²)_∞ keeps p = 0 admissible
    let xinv = x.inv();
    let mut prod = q_pochhammer(p2, p2, policy)? * theta(x, p2, policy)?;
    for s in [1.0, -1.0] {
        prod *= q_pochhammer(s * p * x, p2, policy)? * q_pochhammer(s * p * xinv, p2, policy)?;
    }
    Ok(prod)
}

/// `Σ_n ((n+1)/3) p^{n(n−1)/3} x^n`, truncated symmetrically in `n`.
pub fn quintuple_rhs(x: C64, nome: &Nome, policy: &TruncationPolicy) -> Result<C64> {
    if x == C64::new(0.0, 0.0) {
        return Err(Error::Domain("quintuple sum at x = 0".into()));
    }
    let xinv = x.inv();
    if nome.is_zero() {
        // only n(n-1) = 0 survives: n = 0 gives (1/3) = 1, n = 1 gives (2/3) = -1
        return Ok(C64::new(1.0, 0.0) - x);
    }
    bilateral_sum(
        |n| {
            let c = legendre3(n + 1);
            if c == 0 {
                return C64::new(0.0, 0.0);
            }
            let xn = if n >= 0 { x.powi(n as i32) } else { xinv.powi((-n) as i32) };
            c as f64 * nome.p_pow((n * (n - 1)) as f64 / 3.0) * xn
        },
        policy,
        "quintuple product series",
    )
}

/// Tail bound, relative to the largest term, at which a double-double sum stops.
const DD_TAIL: f64 = 1e-30;

/// Complex double-double, used where a sum cancels far below its terms.
type Dd = num_complex::Complex<TwoFloat>;

fn dd(z: C64) -> Dd {
    Dd::new(TwoFloat::from(z.re), TwoFloat::from(z.im))
}

fn dd_to_c64(z: Dd) -> C64 {
    C64::new(f64::from(z.re), f64::from(z.im))
}

/// `1/z` to double-double accuracy: one Newton step from the `f64` reciprocal.
/// Uses only products and differences, whose double-double forms are exact to
/// working precision.
fn dd_inv(z: Dd) -> Dd {
    let q0 = dd(dd_to_c64(z).inv());
    let one = dd(C64::new(1.0, 0.0));
    q0 + q0 * (one - z * q0)
}

fn dd_norm(z: &Dd) -> f64 {
    f64::from(z.re).hypot(f64::from(z.im))
}

/// Kronecker's bilateral sum `Σ_n x^n / (1 − a p^n)`, for `|p| < |x| < 1`.
///
/// Accumulated in double-double: near `|p| → 1` the sum is many orders of magnitude
/// smaller than its largest terms.
pub fn kronecker_sum(a: C64, x: C64, nome: &Nome, policy: &TruncationPolicy) -> Result<C64> {
    let p = nome.p();
    let (rp, rx) = (p.norm(), x.norm());
    if !(rp < rx && rx < 1.0) {
        return Err(Error::Domain(format!("Kronecker sum needs |p| < |x| < 1 (|p| = {rp}, |x| = {rx})")));
    }
    let pole_tol = 1e-13;
    let one = dd(C64::new(1.0, 0.0));
    let (a_d, x_d, p_d) = (dd(a), dd(x), dd(p));
    let mut sum = dd(C64::new(0.0, 0.0));
    let mut scale: f64 = 0.0;
    // n >= 0
    let (mut xn, mut pn) = (one, one);
    let mut converged = false;
    for n in 0..policy.max_terms {
        let den = one - a_d * pn;
        if dd_norm(&den) < pole_tol {
            return Err(Error::Pole(format!("1 - a p^{n} vanishes")));
        }
        let t = xn * dd_inv(den);
        sum += t;
        let tn = dd_norm(&t);
        scale = scale.max(tn);
        if tn < DD_TAIL * scale * (1.0 - rx) {
            converged = true;
            break;
        }
        xn *= x_d;
        pn *= p_d;
    }
    if !converged {
        return Err(Error::Truncation("Kronecker sum (n >= 0 side)".into()));
    }
    // n = -m < 0: x^{-m}/(1 - a p^{-m}) = (p/x)^m / (p^m - a)
    let ratio = p_d * dd_inv(x_d);
    let rr = rp / rx;
    let (mut rm, mut pm) = (ratio, p_d);
    for m in 1..=policy.max_terms {
        let den = pm - a_d;
        if dd_norm(&den) < pole_tol * dd_norm(&pm).max(a.norm()) {
            return Err(Error::Pole(format!("1 - a p^-{m} vanishes")));
        }
        let t = rm * dd_inv(den);
        sum += t;
        let tn = dd_norm(&t);
        scale = scale.max(tn);
        if tn < DD_TAIL * scale * (1.0 - rr) {
            return Ok(dd_to_c64(sum));
        }
        rm *= ratio;
        pm *= p_d;
    }
    Err(Error::Truncation("Kronecker sum (n < 0 side)".into()))
}

/// Theta quotient `(p;p)_∞² θ(ax;p) / θ(a, x; p)` summed by [`kronecker_sum`].
pub fn kronecker_quotient(a: C64, x: C64, nome: &Nome, policy: &TruncationPolicy) -> Result<C64> {
    let p = nome.p();
    let qp = q_pochhammer(p, p, policy)?;
    let den = theta_prod(&[a, x], p, policy)?;
    if den.norm() == 0.0 {
        return Err(Error::Pole("theta(a, x; p) = 0".into()));
    }
    Ok(qp * qp * theta(a * x, p, policy)? / den)
}

/// Residuals `|θ(−pω;p²)θ(−p;p⁶) − 1|` and `|θ(−ω;p²)θ(−p²;p⁶) + ω²|`.
pub fn ts_relations_check(nome: &Nome) -> Result<(f64, f64)> {
    let policy = TruncationPolicy::default();
    let w = super::nome::omega();
    let p = nome.p();
    let p2 = nome.p_pow(2.0);
    let p6 = nome.p_pow(6.0);
    // θ(−pω;p²) written as (−pω, −p/ω; p²)_∞ so that p = 0 is allowed
    let t1 = q_pochhammer(-p * w, p2, &policy)? * q_pochhammer(-p * w * w, p2, &policy)?;
    let t2 = q_pochhammer(-p, p6, &policy)? * q_pochhammer(-nome.p_pow(5.0), p6, &policy)?;
    let t3 = q_pochhammer(-p2, p6, &policy)? * q_pochhammer(-nome.p_pow(4.0), p6, &policy)?;
    let first = t1 * t2 - 1.0;
    let second = theta(-w, p2, &policy)? * t3 + w * w;
    Ok((first.norm(), second.norm()))
}

/// `e^{iπz}` for a spectral point `z`.
pub fn spectral_x(z: C64) -> C64 {
    exp_i_pi(z)
}
