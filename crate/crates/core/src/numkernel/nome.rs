use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// `e^{iπw}`.
#[inline]
pub fn exp_i_pi(w: C64) -> C64 {
    (C64::new(0.0, PI) * w).exp()
}

/// The cube root of unity `ω = e^{2iπ/3}`.
pub fn omega() -> C64 {
    C64::new(-0.5, 3f64.sqrt() / 2.0)
}

/// `ω^k` with the exponent reduced mod 3 so that no phase drift accumulates.
pub fn omega_pow(k: i64) -> C64 {
    match k.rem_euclid(3) {
        0 => C64::new(1.0, 0.0),
        1 => omega(),
        _ => omega().conj(),
    }
}

/// Modular parameter `τ` in the upper half-plane, with `p = e^{iπτ}`.
///
/// Every fractional power `p^λ` is taken as `e^{iπτλ}`. The principal branch of
/// `p.powf(λ)` is never used. The trigonometric point `p = 0` has no finite `τ`
/// and is represented separately (see [`Nome::zero`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nome {
    tau: Option<C64>,
}

impl Nome {
    pub fn new(tau: C64) -> Result<Self> {
        if !(tau.im > 0.0) || !tau.re.is_finite() || !tau.im.is_finite() {
            return Err(Error::Domain(format!("tau = {tau} is not in the upper half-plane")));
        }
        Ok(Nome { tau: Some(tau) })
    }

    /// The degenerate nome `p = 0`.
    pub fn zero() -> Self {
        Nome { tau: None }
    }

    /// Nome with `p = r·e^{iφ}` for `0 < r < 1`, taking `τ = (φ − i ln r)/π`.
    pub fn from_polar(r: f64, phi: f64) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::Domain(format!("|p| = {r} must lie in (0, 1)")));
        }
        Nome::new(C64::new(phi, -r.ln()) / PI)
    }

    pub fn tau(&self) -> Option<C64> {
        self.tau
    }

    pub fn is_zero(&self) -> bool {
        self.tau.is_none()
    }

    /// `p^λ = e^{iπτλ}`. At `p = 0` this is 1 for `λ = 0`, 0 for `λ > 0` and
    /// infinite for `λ < 0`.
    pub fn p_pow(&self, lambda: f64) -> C64 {
        match self.tau {
            Some(tau) => exp_i_pi(tau * lambda),
            None if lambda == 0.0 => C64::new(1.0, 0.0),
            None if lambda > 0.0 => C64::new(0.0, 0.0),
            None => C64::new(f64::INFINITY, 0.0),
        }
    }

    pub fn p(&self) -> C64 {
        self.p_pow(1.0)
    }

    /// `|p|`.
    pub fn modulus(&self) -> f64 {
        match self.tau {
            Some(tau) => (-PI * tau.im).exp(),
            None => 0.0,
        }
    }

    /// Nome for `τ + shift`.
    pub fn shifted(&self, shift: f64) -> Nome {
        Nome { tau: self.tau.map(|t| t + shift) }
    }

    /// Nome for `factor·τ` (`factor > 0`).
    pub fn scaled(&self, factor: f64) -> Nome {
        assert!(factor > 0.0, "nome scale factor must be positive");
        Nome { tau: self.tau.map(|t| t * factor) }
    }

    /// Nome for `(aτ + b)/(cτ + d)`.
    pub fn mobius(&self, a: i64, b: i64, c: i64, d: i64) -> Result<Nome> {
        let tau = self
            .tau
            .ok_or_else(|| Error::Domain("modular transform of p = 0".into()))?;
        let num = tau * a as f64 + b as f64;
        let den = tau * c as f64 + d as f64;
        Nome::new(num / den)
    }
}

/// Stopping rule for products and series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy { rel_tol: 1e-16, max_terms: 4096 }
    }
}

impl TruncationPolicy {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0) || max_terms < 8 {
            return Err(Error::Domain(format!(
                "invalid truncation policy (rel_tol = {rel_tol}, max_terms = {max_terms})"
            )));
        }
        Ok(TruncationPolicy { rel_tol, max_terms })
    }
}
