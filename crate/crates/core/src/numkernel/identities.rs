//! Residual evaluators for the classical theta-function identities. Each returns
//! a relative residual: the absolute defect divided by the largest magnitude
//! among the terms that enter the identity.

use super::nome::{exp_i_pi, omega, C64, Nome, TruncationPolicy};
use super::theta::{
    kronecker_quotient, kronecker_sum, q_pochhammer, quintuple_lhs, quintuple_rhs, theta, theta_prod,
    theta_series,
};
use crate::error::Result;

fn rel(defect: C64, terms: &[C64]) -> f64 {
    let scale = terms.iter().map(|t| t.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        defect.norm()
    } else {
        defect.norm() / scale
    }
}

/// The three cubic theta kernels that satisfy the order-three difference
/// equations: `x⁻¹θ(x², px², −px²; p²)`, `x⁻²θ(x², −x², px²; p²)` and
/// `x⁻²θ(x², −x², −px²; p²)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CubicKernel {
    Odd,
    EvenPlus,
    EvenMinus,
}

impl CubicKernel {
    pub const ALL: [CubicKernel; 3] = [CubicKernel::Odd, CubicKernel::EvenPlus, CubicKernel::EvenMinus];

    pub fn eval(self, x: C64, nome: &Nome, policy: &TruncationPolicy) -> Result<C64> {
        let p = nome.p();
        let p2 = nome.p_pow(2.0);
        let x2 = x * x;
        Ok(match self {
            CubicKernel::Odd => theta_prod(&[x2, p * x2, -p * x2], p2, policy)? / x,
            CubicKernel::EvenPlus => theta_prod(&[x2, -x2, p * x2], p2, policy)? / x2,
            CubicKernel::EvenMinus => theta_prod(&[x2, -x2, -p * x2], p2, policy)? / x2,
        })
    }
}

/// Quasi-periodicity: returns the residuals of `θ(px) = −x⁻¹θ(x)` and `θ(x⁻¹) = θ(px)`.
pub fn tqp_residuals(x: C64, p: C64, policy: &TruncationPolicy) -> Result<(f64, f64)> {
    let t = theta(x, p, policy)?;
    let tp = theta(p * x, p, policy)?;
    let ti = theta(x.inv(), p, policy)?;
    let scale = t.norm().max(tp.norm()).max((t / x).norm());
    Ok(((tp + t / x).norm() / scale, (ti - tp).norm() / scale))
}

/// Product form against the triple-product series.
pub fn triple_product_residual(x: C64, p: C64, policy: &TruncationPolicy) -> Result<f64> {
    let a = theta(x, p, policy)?;
    let b = theta_series(x, p, policy)?;
    Ok(rel(a - b, &[a, b]))
}

pub fn quintuple_residual(x: C64, nome: &Nome, policy: &TruncationPolicy) -> Result<f64> {
    let a = quintuple_lhs(x, nome, policy)?;
    let b = quintuple_rhs(x, nome, policy)?;
    Ok(rel(a - b, &[a, b]))
}

pub fn kronecker_residual(a: C64, x: C64, nome: &Nome, policy: &TruncationPolicy) -> Result<f64> {
    let s = kronecker_sum(a, x, nome, policy)?;
    let q = kronecker_quotient(a, x, nome, policy)?;
    Ok(rel(s - q, &[s, q]))
}

/// The four expressions of the cubic kernels through thetas of modulus `p⁶`
/// and `p^{2/3}`; returns one residual per displayed identity.
pub fn qtl_residuals(x: C64, nome: &Nome, policy: &TruncationPolicy) -> Result<[f64; 4]> {
    let w = omega();
    let w2 = w * w;
    let p = nome.p();
    let p2 = nome.p_pow(2.0);
    let p6 = nome.p_pow(6.0);
    let p23 = nome.p_pow(2.0 / 3.0);
    let p13 = nome.p_pow(1.0 / 3.0);
    let x2 = x * x;
    let x6 = x2 * x2 * x2;
    let qp2 = q_pochhammer(p2, p2, policy)?;
    let qp6 = q_pochhammer(p6, p6, policy)?;
    let qp23 = q_pochhammer(p23, p23, policy)?;

    let odd = CubicKernel::Odd.eval(x, nome, policy)?;
    let even = CubicKernel::EvenPlus.eval(x, nome, policy)?;

    let a1 = qp6 / qp2 * theta(-p2 * x6, p6, policy)? / x;
    let a2 = qp6 / qp2 * x * theta(-p2 * p2 * x6, p6, policy)?;
    let r1 = rel(odd - (a1 - a2), &[odd, a1, a2]);

    let k = qp23 / ((1.0 - w) * qp2) / x;
    let b1 = k * theta(-w * x2, p23, policy)?;
    let b2 = k * w * theta(-w2 * x2, p23, policy)?;
    let r2 = rel(odd - (b1 - b2), &[odd, b1, b2]);

    let c1 = qp6 / qp2 * theta(-p * x6, p6, policy)? / x2;
    let c2 = qp6 / qp2 * x2 * theta(-nome.p_pow(5.0) * x6, p6, policy)?;
    let r3 = rel(even - (c1 - c2), &[even, c1, c2]);

    let k = nome.p_pow(-1.0 / 3.0) * qp23 / ((w - w2) * qp2);
    let d1 = k * theta(-w2 * p13 * x2, p23, policy)?;
    let d2 = k * theta(-w * p13 * x2, p23, policy)?;
    let r4 = rel(even - (d1 - d2), &[even, d1, d2]);

    Ok([r1, r2, r3, r4])
}

/// The two three-term relations `f(ω⁻¹x) + f(x) + f(ωx) = 0` and
/// `x⁻⁴f(p^{−2/3}x) + p^{−4/3}f(x) + x⁴f(p^{2/3}x) = 0`.
pub fn tql_residuals(kernel: CubicKernel, x: C64, nome: &Nome, policy: &TruncationPolicy) -> Result<(f64, f64)> {
    let w = omega();
    let f = |y: C64| kernel.eval(y, nome, policy);
    let (a, b, c) = (f(x / w)?, f(x)?, f(w * x)?);
    let ra = rel(a + b + c, &[a, b, c]);
    let x4 = x.powi(4);
    let d = f(nome.p_pow(-2.0 / 3.0) * x)? / x4;
    let e = nome.p_pow(-4.0 / 3.0) * b;
    let g = x4 * f(nome.p_pow(2.0 / 3.0) * x)?;
    let rb = rel(d + e + g, &[d, e, g]);
    Ok((ra, rb))
}

/// Ratio of the two sides of the modular transformation of `θ(e^{2iπz}; e^{2iπτ})`
/// under `[[a, b], [c, d]]`. The ratio should not depend on `z`.
pub fn modular_theta_ratio(abcd: [i64; 4], z: C64, nome: &Nome, policy: &TruncationPolicy) -> Result<C64> {
    let [a, b, c, d] = abcd;
    let tau = nome
        .tau()
        .ok_or_else(|| crate::error::Error::Domain("modular transform at p = 0".into()))?;
    let image = nome.mobius(a, b, c, d)?;
    let cd = tau * c as f64 + d as f64;
    let zt = z / cd;
    let lhs = exp_i_pi(-zt) * theta(exp_i_pi(2.0 * zt), image.p_pow(2.0), policy)?;
    let rhs = exp_i_pi(c as f64 * z * z / cd - z) * theta(exp_i_pi(2.0 * z), nome.p_pow(2.0), policy)?;
    Ok(lhs / rhs)
}
