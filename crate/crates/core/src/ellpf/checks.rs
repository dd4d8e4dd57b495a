//! Residual checks for the structural identities of `P_n^(σ)`: hat rule, modular
//! covariance, half-period shifts, the specialisation recursion, the characterising
//! analytic properties and the classical-notation forms.

use crate::error::{Error, Result};
use crate::numkernel::{exp_i_pi, theta, theta_jacobi, Nome, TruncationPolicy, C64};
use crate::pfaffian::{pfaffian, SkewMatrix};

use super::{p_sigma, p_sigma_expanded, Kernel, PointConfig, SigmaLabel};

fn rel_residual(defect: C64, terms: &[C64]) -> f64 {
    let scale = terms.iter().map(|t| t.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        defect.norm()
    } else {
        defect.norm() / scale
    }
}

/// `|P^(σ̂)(z;τ) − P^(σ)(z;τ+3)| / |P^(σ̂)(z;τ)|`, with `σ̂` the toggled label.
pub fn hat_cross_check(sigma: SigmaLabel, cfg: &PointConfig) -> Result<f64> {
    let direct = p_sigma(sigma.toggled(), &cfg.z, &cfg.nome)?;
    let shifted = p_sigma(sigma, &cfg.z, &cfg.nome.shifted(3.0))?;
    Ok((direct - shifted).norm() / direct.norm())
}

/// Label `F` of the modular covariance for `[[a, b], [c, d]]` with `3 | cd`, read off
/// from `(a, b, c, d) mod 2`.
pub fn modular_target(m: [i64; 4]) -> Result<SigmaLabel> {
    let [a, b, c, d] = m;
    if a * d - b * c != 1 {
        return Err(Error::Domain(format!("{m:?} is not in SL(2, Z)")));
    }
    let parity = [a, b, c, d].map(|v| v.rem_euclid(2));
    let slot = match parity {
        [1, 0, 0, 1] => 0,
        [1, 1, 0, 1] => 1,
        [1, 1, 1, 0] => 2,
        [1, 0, 1, 1] => 3,
        [0, 1, 1, 0] => 4,
        [0, 1, 1, 1] => 5,
        _ => unreachable!("ad - bc = 1 leaves six parity classes"),
    };
    let (c_case, d_case) = (
        [(1, false), (1, true), (2, false), (2, true), (4, false), (4, true)],
        [(3, false), (3, true), (6, false), (6, true), (0, false), (0, true)],
    );
    let (base, hat) = if c.rem_euclid(3) == 0 {
        c_case[slot]
    } else if d.rem_euclid(3) == 0 {
        d_case[slot]
    } else {
        return Err(Error::Domain(format!("{m:?}: neither c nor d is divisible by 3")));
    };
    SigmaLabel::new(base, hat)
}

/// `P^(1)(z/(cτ+d); (aτ+b)/(cτ+d)) / [exp(3iπc/(cτ+d) Σ_{i<j}(z_i − z_j)²) · F(z;τ)]`.
pub fn modular_ratio(m: [i64; 4], z: &[C64], nome: &Nome) -> Result<C64> {
    let target = modular_target(m)?;
    let [a, b, c, d] = m;
    let tau = nome.tau().ok_or_else(|| Error::Domain("modular check needs p != 0".into()))?;
    let den = tau * c as f64 + d as f64;
    let image = nome.mobius(a, b, c, d)?;
    let zt: Vec<C64> = z.iter().map(|&w| w / den).collect();
    let lhs = p_sigma(SigmaLabel::plain(1), &zt, &image)?;
    let mut quad = C64::new(0.0, 0.0);
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            quad += (z[i] - z[j]) * (z[i] - z[j]);
        }
    }
    let expo = exp_i_pi(3.0 * c as f64 / den * quad);
    let f = p_sigma(target, z, nome)?;
    Ok(lhs / (expo * f))
}

/// Largest pairwise relative deviation of [`modular_ratio`] over several configurations.
pub fn modular_check(m: [i64; 4], configs: &[Vec<C64>], nome: &Nome) -> Result<f64> {
    let ratios: Vec<C64> = configs.iter().map(|z| modular_ratio(m, z, nome)).collect::<Result<_>>()?;
    Ok(max_pairwise_deviation(&ratios))
}

pub(crate) fn max_pairwise_deviation(vals: &[C64]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..vals.len() {
        for j in i + 1..vals.len() {
            let scale = vals[i].norm().max(vals[j].norm());
            worst = worst.max((vals[i] - vals[j]).norm() / scale);
        }
    }
    worst
}

/// The twelve representative matrices: six for `3 | c` and six for `3 | d`, one per
/// parity class.
pub const MODULAR_REPRESENTATIVES: [[i64; 4]; 12] = [
    [1, 0, 0, 1],
    [1, 1, 0, 1],
    [-1, -1, 3, 2],
    [1, 0, 3, 1],
    [2, 1, 3, 2],
    [4, 1, 3, 1],
    [1, -2, 2, -3],
    [1, 1, 2, 3],
    [1, -1, 1, 0],
    [1, 2, 1, 3],
    [0, -1, 1, 0],
    [0, -1, 1, 3],
];

/// Which half period the shift identity moves `z_1` by.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfPeriod {
    One,
    Tau,
    OnePlusTau,
}

/// Shift partner `ρ` of `σ` and the half period involved.
pub fn shift_partner(sigma: SigmaLabel) -> (SigmaLabel, HalfPeriod) {
    let h = sigma.is_hatted();
    match sigma.base() {
        1 | 3 => (sigma.toggled(), HalfPeriod::One),
        b => {
            let other = match b {
                0 => 6,
                6 => 0,
                2 => 4,
                _ => 2,
            };
            let period = if h { HalfPeriod::OnePlusTau } else { HalfPeriod::Tau };
            (SigmaLabel::new(other, h).expect("valid base"), period)
        }
    }
}

/// Constants `A_σ`, `B_σ` of the half-period shift identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftConstants {
    pub a: C64,
    pub b: C64,
}

/// Closed forms of `A_σ` and `B_σ`.
pub fn shift_constants(sigma: SigmaLabel, nome: &Nome) -> Result<ShiftConstants> {
    let pol = TruncationPolicy::default();
    let pw = |l: f64| nome.p_pow(l);
    let (p, p2, p6) = (pw(1.0), pw(2.0), pw(6.0));
    let th = |x: C64, q: C64| theta(x, q, &pol);
    let one = C64::new(1.0, 0.0);
    let i = C64::i();
    let h = sigma.is_hatted();
    let a = match (sigma.base(), h) {
        (1, _) | (3, _) => -one,
        (0, false) | (4, false) => -one / p,
        (0, true) | (4, true) => one / p,
        (2, false) | (6, false) => -one / pw(0.5),
        _ => i / pw(0.5),
    };
    let (p13, p23) = (pw(1.0 / 3.0), pw(2.0 / 3.0));
    let b = match (sigma.base(), h) {
        (0, false) => -th(-p13, p2)? / (pw(5.0 / 3.0) * th(-p23, p2)?),
        (0, true) => th(p13, p2)? / (pw(5.0 / 3.0) * th(-p23, p2)?),
        (1, false) => -th(p, p6)? / th(-p, p6)?,
        (1, true) => -th(-p, p6)? / th(p, p6)?,
        (2, false) => th(-p, p6)? / (p * th(-p2, p6)?),
        (2, true) => -th(p, p6)? / (p * th(-p2, p6)?),
        (3, false) => th(-p13, p2)? / th(p13, p2)?,
        (3, true) => th(p13, p2)? / th(-p13, p2)?,
        (4, false) => th(-p2, p6)? / (p2 * th(-p, p6)?),
        (4, true) => th(-p2, p6)? / (p2 * th(p, p6)?),
        (6, false) => -th(-p23, p2)? / (pw(4.0 / 3.0) * th(-p13, p2)?),
        _ => -th(-p23, p2)? / (pw(4.0 / 3.0) * th(p13, p2)?),
    };
    Ok(ShiftConstants { a, b })
}

/// Residual of `P^(σ)(z_1 + δ, z_2, …) = A_σ B_σ^{n−1} [x_2³⋯x_{2n}³ / x_1^{6n−3}] P^(ρ)(z)`,
/// where the bracket appears only for the `τ/2` and `(τ+1)/2` shifts.
pub fn half_shift_check(sigma: SigmaLabel, cfg: &PointConfig) -> Result<f64> {
    let (rho, period) = shift_partner(sigma);
    let tau = cfg.nome.tau().ok_or_else(|| Error::Domain("half-period shift needs p != 0".into()))?;
    let delta = match period {
        HalfPeriod::One => C64::new(0.5, 0.0),
        HalfPeriod::Tau => tau / 2.0,
        HalfPeriod::OnePlusTau => (tau + 1.0) / 2.0,
    };
    let n = cfg.n();
    let mut zs = cfg.z.clone();
    zs[0] += delta;
    let lhs = p_sigma(sigma, &zs, &cfg.nome)?;
    let k = shift_constants(sigma, &cfg.nome)?;
    let mut factor = k.a * k.b.powi(n as i32 - 1);
    if period != HalfPeriod::One {
        let x = cfg.x();
        let rest: C64 = x[1..].iter().map(|v| v.powi(3)).product();
        factor *= rest / x[0].powi(6 * n as i32 - 3);
    }
    let rhs = factor * p_sigma(rho, &cfg.z, &cfg.nome)?;
    Ok(rel_residual(lhs - rhs, &[lhs, rhs]))
}

/// Offset `γ` with `b(γ) = 0`, used to specialise `z_{2n−1} = z_{2n} + γ`.
pub fn recursion_gamma(sigma: SigmaLabel, nome: &Nome) -> Result<C64> {
    let tau = nome.tau().ok_or_else(|| Error::Domain("recursion offset needs p != 0".into()))?;
    let h = sigma.is_hatted();
    Ok(match (sigma.base(), h) {
        (0, false) | (6, false) => tau / 6.0,
        (0, true) | (6, true) => 0.5 + tau / 6.0,
        (3, _) => 0.5 + tau / 3.0,
        (1, _) => C64::new(1.0 / 6.0, 0.0),
        (2, true) | (4, true) => 1.0 / 6.0 + tau / 2.0,
        _ => 1.0 / 3.0 + tau / 2.0,
    })
}

/// Residual of the specialisation recursion
/// `P_n(…, z_{2n} + γ, z_{2n}) = a_{2n−1,2n} ∏_{j≤2n−2} b_{j,2n−1} b_{j,2n} · P_{n−1}(z_1, …, z_{2n−2})`.
/// The last entry of `cfg.z` is kept and the one before it is overwritten.
pub fn specialization_recursion_check(sigma: SigmaLabel, cfg: &PointConfig) -> Result<f64> {
    let m = cfg.z.len();
    let gamma = recursion_gamma(sigma, &cfg.nome)?;
    let mut z = cfg.z.clone();
    z[m - 2] = z[m - 1] + gamma;
    let lhs = p_sigma_expanded(sigma, &z, &cfg.nome)?;
    let k = Kernel::new(sigma, &cfg.nome);
    let mut rhs = k.a(z[m - 2] - z[m - 1])?;
    for j in 0..m - 2 {
        rhs *= k.b(z[j] - z[m - 2])? * k.b(z[j] - z[m - 1])?;
    }
    if m > 2 {
        rhs *= p_sigma_expanded(sigma, &z[..m - 2], &cfg.nome)?;
    }
    Ok(rel_residual(lhs - rhs, &[lhs, rhs]))
}

/// One of the analytic properties characterising `g(z) = P^(σ)(z, z_2, …, z_{2n})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApProperty {
    /// `g(z+1) = ±g(z)`.
    Period,
    /// `g(z+τ) = ±t³e^{−(6n−3)iπ(2z+τ)} g(z)`.
    QuasiPeriod,
    /// `g(z − 2/3) + g(z) + g(z + 2/3) = 0`.
    ThreeTerm,
    /// The three-term relation in the `2τ/3` direction.
    TauThreeTerm,
    /// `g(z_j) = 0`.
    VanishAtPoints,
    /// `g(z_j + 1/2) = 0`.
    VanishAtHalf,
    /// `g(z_j + τ/2) = 0`.
    VanishAtHalfTau,
    /// `g(z_j + (1+τ)/2) = 0`.
    VanishAtHalfOnePlusTau,
}

impl ApProperty {
    pub fn name(&self) -> &'static str {
        match self {
            ApProperty::Period => "period",
            ApProperty::QuasiPeriod => "quasi_period",
            ApProperty::ThreeTerm => "three_term",
            ApProperty::TauThreeTerm => "tau_three_term",
            ApProperty::VanishAtPoints => "vanish_z",
            ApProperty::VanishAtHalf => "vanish_half",
            ApProperty::VanishAtHalfTau => "vanish_half_tau",
            ApProperty::VanishAtHalfOnePlusTau => "vanish_half_one_plus_tau",
        }
    }
}

/// Properties that hold for the given label.
pub fn ap_properties(sigma: SigmaLabel) -> Vec<ApProperty> {
    use ApProperty::*;
    let mut v = vec![Period, QuasiPeriod, VanishAtPoints];
    let b = sigma.base();
    if matches!(b, 1 | 2 | 4) {
        v.push(ThreeTerm);
    } else {
        v.push(TauThreeTerm);
    }
    if matches!(b, 1 | 3) {
        v.push(VanishAtHalf);
    } else if sigma.is_hatted() {
        v.push(VanishAtHalfOnePlusTau);
    } else {
        v.push(VanishAtHalfTau);
    }
    v
}

/// Residual of one property at the spectral point `z`, with `cfg.z[1..]` fixed and
/// `cfg.z[0]` ignored. Vanishing residuals are scaled by `max(|g(z)|, |g(z_1)|)`.
pub fn ap_residual(sigma: SigmaLabel, prop: ApProperty, z: C64, cfg: &PointConfig) -> Result<f64> {
    let tau = cfg.nome.tau().ok_or_else(|| Error::Domain("analytic properties need p != 0".into()))?;
    let rest = &cfg.z[1..];
    let g = |w: C64| -> Result<C64> {
        let mut pts = Vec::with_capacity(cfg.z.len());
        pts.push(w);
        pts.extend_from_slice(rest);
        p_sigma(sigma, &pts, &cfg.nome)
    };
    let n = cfg.n() as f64;
    let t = exp_i_pi(2.0 * rest.iter().sum::<C64>());
    let b = sigma.base();
    let h = sigma.is_hatted();
    let vanish = |shift: C64| -> Result<f64> {
        let scale = g(z)?.norm().max(g(cfg.z[0])?.norm());
        let mut worst: f64 = 0.0;
        for &zj in rest {
            // b can vanish at these points, so use the division-free form
            let mut pts = vec![zj + shift];
            pts.extend_from_slice(rest);
            worst = worst.max(p_sigma_expanded(sigma, &pts, &cfg.nome)?.norm() / scale);
        }
        Ok(worst)
    };
    match prop {
        ApProperty::Period => {
            let sign = if matches!(b, 2 | 6) { -1.0 } else { 1.0 };
            let (l, r) = (g(z + 1.0)?, sign * g(z)?);
            Ok(rel_residual(l - r, &[l, r]))
        }
        ApProperty::QuasiPeriod => {
            let sign = if h && matches!(b, 0 | 1 | 3 | 4) { -1.0 } else { 1.0 };
            let l = g(z + tau)?;
            let r = sign * t.powi(3) * exp_i_pi(-(6.0 * n - 3.0) * (2.0 * z + tau)) * g(z)?;
            Ok(rel_residual(l - r, &[l, r]))
        }
        ApProperty::ThreeTerm => {
            let terms = [g(z - 2.0 / 3.0)?, g(z)?, g(z + 2.0 / 3.0)?];
            Ok(rel_residual(terms.iter().sum(), &terms))
        }
        ApProperty::TauThreeTerm => {
            let k = 8.0 * n - 4.0;
            let terms = [
                t * t * exp_i_pi(-k * z) * g(z - 2.0 * tau / 3.0)?,
                exp_i_pi(-k * tau / 3.0) * g(z)?,
                exp_i_pi(k * z) / (t * t) * g(z + 2.0 * tau / 3.0)?,
            ];
            Ok(rel_residual(terms.iter().sum(), &terms))
        }
        ApProperty::VanishAtPoints => {
            let scale = g(z)?.norm().max(g(cfg.z[0])?.norm());
            let mut worst: f64 = 0.0;
            for &zj in rest {
                let mut pts = vec![zj];
                pts.extend_from_slice(rest);
                worst = worst.max(p_sigma_expanded(sigma, &pts, &cfg.nome)?.norm() / scale);
            }
            Ok(worst)
        }
        ApProperty::VanishAtHalf => vanish(C64::new(0.5, 0.0)),
        ApProperty::VanishAtHalfTau => vanish(tau / 2.0),
        ApProperty::VanishAtHalfOnePlusTau => vanish((tau + 1.0) / 2.0),
    }
}

/// Classical-notation pfaffian for a label: either
/// `∏ θ_k(3w_ij|3τ) · pf(θ_1θ_kθ_l(w_ij|τ)/θ_k(3w_ij|3τ))` or the same with
/// `θ_k(w_ij|τ/3)`, where `w_j = πz_j` and `(k, l)` is read off from the label.
pub fn classical_form(sigma: SigmaLabel, z: &[C64], nome: &Nome) -> Result<C64> {
    let (k, l, thirds) = classical_indices(sigma);
    let pi = std::f64::consts::PI;
    let m = z.len();
    let den = |w: C64| -> Result<C64> {
        if thirds {
            theta_jacobi(k, w, &nome.scaled(1.0 / 3.0))
        } else {
            theta_jacobi(k, 3.0 * w, &nome.scaled(3.0))
        }
    };
    let mut pre = C64::new(1.0, 0.0);
    let mut entries = vec![C64::new(0.0, 0.0); m * m];
    for i in 0..m {
        for j in i + 1..m {
            let w = pi * (z[i] - z[j]);
            let d = den(w)?;
            pre *= d;
            let num = theta_jacobi(1, w, nome)? * theta_jacobi(k, w, nome)? * theta_jacobi(l, w, nome)?;
            entries[i * m + j] = num / d;
        }
    }
    let mat = SkewMatrix::from_upper(m, |i, j| entries[i * m + j])?;
    Ok(pre * pfaffian(&mat))
}

/// `(k, l, uses τ/3)` for the classical form of a label.
pub fn classical_indices(sigma: SigmaLabel) -> (u8, u8, bool) {
    match (sigma.base(), sigma.is_hatted()) {
        (1, true) => (2, 3, false),
        (1, false) => (2, 4, false),
        (4, true) => (3, 2, false),
        (2, true) => (3, 4, false),
        (4, false) => (4, 2, false),
        (2, false) => (4, 3, false),
        (3, true) => (2, 3, true),
        (3, false) => (2, 4, true),
        (0, true) => (3, 2, true),
        (6, true) => (3, 4, true),
        (0, false) => (4, 2, true),
        _ => (4, 3, true),
    }
}

/// Largest pairwise deviation of `P^(σ)/classical_form` over several configurations.
pub fn classical_ratio_check(sigma: SigmaLabel, configs: &[Vec<C64>], nome: &Nome) -> Result<f64> {
    let ratios: Vec<C64> = configs
        .iter()
        .map(|z| Ok(p_sigma(sigma, z, nome)? / classical_form(sigma, z, nome)?))
        .collect::<Result<_>>()?;
    Ok(max_pairwise_deviation(&ratios))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn cfg(n: usize, nome: Nome) -> PointConfig {
        let base = [0.11, 0.37, 0.58, 0.83, 0.26, 0.71];
        PointConfig::new((0..2 * n).map(|j| c(base[j], 0.01 * j as f64 - 0.02)).collect(), nome).unwrap()
    }

    fn configs(n: usize, count: usize) -> Vec<Vec<C64>> {
        (0..count)
            .map(|s| (0..2 * n).map(|j| c(0.13 * (j + 1) as f64 + 0.071 * s as f64, 0.01 * (j as f64 - 1.0))).collect())
            .collect()
    }

    #[test]
    fn hat_rule() {
        let nome = Nome::new(c(0.1, 0.8)).unwrap();
        for sigma in SigmaLabel::all() {
            assert!(hat_cross_check(sigma, &cfg(2, nome)).unwrap() < 1e-9, "{sigma}");
        }
        assert!((nome.shifted(3.0).modulus() - nome.modulus()).abs() < 1e-15);
    }

    #[test]
    fn modular_targets() {
        let expected = ["1", "1h", "2", "2h", "4", "4h", "3", "3h", "6", "6h", "0", "0h"];
        for (m, e) in MODULAR_REPRESENTATIVES.iter().zip(expected) {
            assert_eq!(modular_target(*m).unwrap().to_string(), e);
        }
        assert!(modular_target([1, 1, 1, 1]).is_err());
    }

    #[test]
    fn modular_identity_is_one() {
        let nome = Nome::new(c(0.1, 0.9)).unwrap();
        let z = &configs(2, 1)[0];
        assert!((modular_ratio([1, 0, 0, 1], z, &nome).unwrap() - 1.0).norm() < 1e-14);
    }

    #[test]
    fn modular_ratio_constant() {
        let nome = Nome::new(c(0.1, 0.9)).unwrap();
        for m in MODULAR_REPRESENTATIVES {
            let dev = modular_check(m, &configs(1, 4), &nome).unwrap();
            assert!(dev < 1e-7, "{m:?}: {dev}");
        }
    }

    #[test]
    fn half_shifts() {
        let nome = Nome::new(c(0.1, 0.8)).unwrap();
        for sigma in SigmaLabel::all() {
            for n in 1..=2 {
                let r = half_shift_check(sigma, &cfg(n, nome)).unwrap();
                assert!(r < 1e-8, "{sigma} n={n}: {r}");
            }
        }
    }

    #[test]
    fn recursion() {
        let nome = Nome::new(c(0.1, 0.8)).unwrap();
        for sigma in SigmaLabel::all() {
            for n in 1..=2 {
                let r = specialization_recursion_check(sigma, &cfg(n, nome)).unwrap();
                assert!(r < 1e-8, "{sigma} n={n}: {r}");
            }
        }
    }

    #[test]
    fn analytic_properties() {
        let nome = Nome::new(c(0.1, 0.8)).unwrap();
        for sigma in SigmaLabel::all() {
            for n in 1..=2 {
                let cf = cfg(n, nome);
                for prop in ap_properties(sigma) {
                    let r = ap_residual(sigma, prop, c(0.43, 0.05), &cf).unwrap();
                    assert!(r < 1e-9, "{sigma} n={n} {}: {r}", prop.name());
                }
            }
        }
    }

    #[test]
    fn classical_forms() {
        let nome = Nome::new(c(0.1, 0.8)).unwrap();
        for sigma in SigmaLabel::all() {
            let dev = classical_ratio_check(sigma, &configs(2, 5), &nome).unwrap();
            assert!(dev < 1e-8, "{sigma}: {dev}");
        }
    }
}
