//! The twelve elliptic pfaffians `P_n^(σ)` and the identities they satisfy.
//!
//! Each function is `∏_{i<j} b(z_i − z_j) · pf(a(z_i − z_j)/b(z_i − z_j))` where `a` and
//! `b` are products of theta functions in `r = e^{iπ(z_i − z_j)}`. All powers of `r`
//! are formed as `e^{iπk(z_i − z_j)}`, so no branch of a fractional power is chosen.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numkernel::{exp_i_pi, theta, theta_shifted, Nome, TruncationPolicy, C64};
use crate::pfaffian::{pairing_sum, pfaffian, SkewMatrix};

pub mod checks;
pub mod expansions;

pub use checks::*;
pub use expansions::*;

/// Largest `n` accepted by [`p_sigma`] (matrix dimension 8).
pub const MAX_N: usize = 4;

/// Magnitude below which a prefactor `b_ij` counts as vanishing.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// A label `σ ∈ {0, 1, 2, 3, 4, 6}`, possibly hatted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SigmaLabel {
    base: u8,
    hatted: bool,
}

impl SigmaLabel {
    pub const BASES: [u8; 6] = [0, 1, 2, 3, 4, 6];

    pub fn new(base: u8, hatted: bool) -> Result<Self> {
        if !Self::BASES.contains(&base) {
            return Err(Error::Domain(format!("sigma base {base} is not one of 0, 1, 2, 3, 4, 6")));
        }
        Ok(SigmaLabel { base, hatted })
    }

    /// Unhatted label; panics on an invalid base.
    pub fn plain(base: u8) -> Self {
        Self::new(base, false).expect("valid sigma base")
    }

    /// Hatted label; panics on an invalid base.
    pub fn hat(base: u8) -> Self {
        Self::new(base, true).expect("valid sigma base")
    }

    /// All twelve labels, unhatted first.
    pub fn all() -> Vec<SigmaLabel> {
        let mut v: Vec<_> = Self::BASES.iter().map(|&b| Self::plain(b)).collect();
        v.extend(Self::BASES.iter().map(|&b| Self::hat(b)));
        v
    }

    pub fn base(&self) -> u8 {
        self.base
    }

    pub fn is_hatted(&self) -> bool {
        self.hatted
    }

    /// The label with the hat toggled.
    pub fn toggled(&self) -> Self {
        SigmaLabel { base: self.base, hatted: !self.hatted }
    }
}

impl fmt::Display for SigmaLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.base, if self.hatted { "h" } else { "" })
    }
}

impl FromStr for SigmaLabel {
    type Err = Error;

    /// Accepts `"3"`, `"3h"` and `"3hat"`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let (digits, hatted) = if let Some(d) = t.strip_suffix("hat") {
            (d, true)
        } else if let Some(d) = t.strip_suffix('h') {
            (d, true)
        } else {
            (t, false)
        };
        let base: u8 = digits.parse().map_err(|_| Error::Domain(format!("cannot parse sigma label {s:?}")))?;
        SigmaLabel::new(base, hatted)
    }
}

/// Points `z_1, …, z_{2n}` together with the nome.
#[derive(Debug, Clone, PartialEq)]
pub struct PointConfig {
    pub z: Vec<C64>,
    pub nome: Nome,
}

impl PointConfig {
    pub fn new(z: Vec<C64>, nome: Nome) -> Result<Self> {
        if z.is_empty() || !z.len().is_multiple_of(2) {
            return Err(Error::Domain(format!("need an even, positive number of points, got {}", z.len())));
        }
        Ok(PointConfig { z, nome })
    }

    pub fn n(&self) -> usize {
        self.z.len() / 2
    }

    /// `x_j = e^{iπz_j}`.
    pub fn x(&self) -> Vec<C64> {
        self.z.iter().map(|&z| exp_i_pi(z)).collect()
    }

    /// Smallest `|b(z_i − z_j)|` over pairs, for the given label.
    pub fn genericity(&self, sigma: SigmaLabel) -> Result<f64> {
        let k = Kernel::new(sigma, &self.nome);
        let mut score = f64::INFINITY;
        for i in 0..self.z.len() {
            for j in i + 1..self.z.len() {
                score = score.min(k.b(self.z[i] - self.z[j])?.norm());
            }
        }
        Ok(score)
    }
}

/// The pair of entry functions `a(w)`, `b(w)` for one label and nome, with `w = z_i − z_j`.
#[derive(Debug, Clone)]
pub struct Kernel {
    sigma: SigmaLabel,
    /// `±p^{1/3}`, `±p`, `±p³` with the sign flipped for hatted labels.
    s13: C64,
    s1: C64,
    s3: C64,
    p23: C64,
    p2: C64,
    p6: C64,
    policy: TruncationPolicy,
}

impl Kernel {
    pub fn new(sigma: SigmaLabel, nome: &Nome) -> Self {
        let sign = if sigma.hatted { -1.0 } else { 1.0 };
        Kernel {
            sigma,
            s13: sign * nome.p_pow(1.0 / 3.0),
            s1: sign * nome.p(),
            s3: sign * nome.p_pow(3.0),
            p23: nome.p_pow(2.0 / 3.0),
            p2: nome.p_pow(2.0),
            p6: nome.p_pow(6.0),
            policy: TruncationPolicy::default(),
        }
    }

    pub fn sigma(&self) -> SigmaLabel {
        self.sigma
    }

    /// Numerator `a(w)`.
    pub fn a(&self, w: C64) -> Result<C64> {
        let r2 = exp_i_pi(2.0 * w);
        let pol = &self.policy;
        // θ(±p r²; p²) written as θ_shifted(±p, r²) so that p = 0 is admissible
        match self.sigma.base {
            2 | 6 => {
                let t = theta(r2, self.p2, pol)?
                    * theta_shifted(self.s1, r2, pol)?
                    * theta_shifted(-self.s1, r2, pol)?;
                Ok(t * exp_i_pi(-w))
            }
            _ => {
                let t = theta(r2, self.p2, pol)? * theta(-r2, self.p2, pol)? * theta_shifted(self.s1, r2, pol)?;
                Ok(t * exp_i_pi(-2.0 * w))
            }
        }
    }

    /// Prefactor `b(w)`.
    pub fn b(&self, w: C64) -> Result<C64> {
        let pol = &self.policy;
        match self.sigma.base {
            0 | 6 => theta_shifted(self.s13, exp_i_pi(2.0 * w), pol),
            1 => Ok(exp_i_pi(-3.0 * w) * theta(-exp_i_pi(6.0 * w), self.p6, pol)?),
            2 | 4 => theta_shifted(self.s3, exp_i_pi(6.0 * w), pol),
            3 => Ok(exp_i_pi(-w) * theta(-exp_i_pi(2.0 * w), self.p23, pol)?),
            _ => unreachable!("validated sigma base"),
        }
    }

    /// `a(w)/b(w)`.
    pub fn ratio(&self, w: C64) -> Result<C64> {
        let b = self.b(w)?;
        if b.norm() < 1e-300 {
            return Err(Error::Pole(format!("b vanishes at w = {w}")));
        }
        Ok(self.a(w)? / b)
    }
}

fn check_n(z: &[C64]) -> Result<()> {
    if z.is_empty() || !z.len().is_multiple_of(2) {
        return Err(Error::Domain(format!("need an even, positive number of points, got {}", z.len())));
    }
    if z.len() > 2 * MAX_N {
        return Err(Error::Range(format!("n = {} exceeds the supported maximum {MAX_N}", z.len() / 2)));
    }
    Ok(())
}

/// `P_n^(σ)(z; τ)` as prefactor times pivoted pfaffian. Fails with a degeneracy error
/// when some `|b(z_i − z_j)| < 1e−8` for distinct points; coincident points give exactly 0.
pub fn p_sigma(sigma: SigmaLabel, z: &[C64], nome: &Nome) -> Result<C64> {
    check_n(z)?;
    // Evaluating at a canonical ordering makes antisymmetry hold bit-for-bit.
    let (sorted, sign) = canonical_order(z);
    // antisymmetry forces P = 0 when two arguments coincide
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Ok(C64::new(0.0, 0.0));
    }
    Ok(sign * p_sigma_ordered(sigma, &sorted, nome)?)
}

/// `z` sorted lexicographically by `(re, im)` and the sign of the sorting permutation.
fn canonical_order(z: &[C64]) -> (Vec<C64>, f64) {
    let mut idx: Vec<usize> = (0..z.len()).collect();
    idx.sort_by(|&a, &b| z[a].re.total_cmp(&z[b].re).then(z[a].im.total_cmp(&z[b].im)));
    let mut seen = vec![false; idx.len()];
    let mut sign = 1.0;
    for start in 0..idx.len() {
        let mut k = start;
        let mut len = 0;
        while !seen[k] {
            seen[k] = true;
            k = idx[k];
            len += 1;
        }
        if len > 0 && len % 2 == 0 {
            sign = -sign;
        }
    }
    (idx.iter().map(|&i| z[i]).collect(), sign)
}

fn p_sigma_ordered(sigma: SigmaLabel, z: &[C64], nome: &Nome) -> Result<C64> {
    let k = Kernel::new(sigma, nome);
    let m = z.len();
    let mut pre = C64::new(1.0, 0.0);
    let mut ratio = vec![C64::new(0.0, 0.0); m * m];
    for i in 0..m {
        for j in i + 1..m {
            let w = z[i] - z[j];
            let b = k.b(w)?;
            if b.norm() < DEGENERACY_TOL {
                return Err(Error::Degenerate(format!("sigma {sigma}: b(z_{} - z_{}) = {b:e}", i + 1, j + 1)));
            }
            pre *= b;
            ratio[i * m + j] = k.a(w)? / b;
        }
    }
    let mat = SkewMatrix::from_upper(m, |i, j| ratio[i * m + j])?;
    Ok(pre * pfaffian(&mat))
}

/// [`p_sigma`] on a [`PointConfig`].
pub fn p_sigma_cfg(sigma: SigmaLabel, cfg: &PointConfig) -> Result<C64> {
    p_sigma(sigma, &cfg.z, &cfg.nome)
}

/// `P_n^(σ)` as the division-free sum over pairings
/// `Σ sgn · ∏_{paired} a_ij · ∏_{unpaired i<j} b_ij`, valid where some `b_ij` vanish.
pub fn p_sigma_expanded(sigma: SigmaLabel, z: &[C64], nome: &Nome) -> Result<C64> {
    check_n(z)?;
    let k = Kernel::new(sigma, nome);
    let m = z.len();
    let mut a = vec![C64::new(0.0, 0.0); m * m];
    let mut b = vec![C64::new(0.0, 0.0); m * m];
    for i in 0..m {
        for j in i + 1..m {
            a[i * m + j] = k.a(z[i] - z[j])?;
            b[i * m + j] = k.b(z[i] - z[j])?;
        }
    }
    let idx: Vec<usize> = (0..m).collect();
    // weight carries a_ij/b_ij symbolically: track products of b over unpaired pairs
    let mut total = C64::new(0.0, 0.0);
    enumerate_pairings(&idx, &mut Vec::new(), 1.0, &mut |pairs, sign| {
        let mut paired = vec![false; m * m];
        let mut term = C64::new(sign, 0.0);
        for &(i, j) in pairs {
            paired[i * m + j] = true;
            term *= a[i * m + j];
        }
        for i in 0..m {
            for j in i + 1..m {
                if !paired[i * m + j] {
                    term *= b[i * m + j];
                }
            }
        }
        total += term;
    });
    Ok(total)
}

fn enumerate_pairings<F>(rest: &[usize], acc: &mut Vec<(usize, usize)>, sign: f64, f: &mut F)
where
    F: FnMut(&[(usize, usize)], f64),
{
    if rest.is_empty() {
        f(acc, sign);
        return;
    }
    let first = rest[0];
    for pos in 1..rest.len() {
        let remaining: Vec<usize> = rest[1..].iter().enumerate().filter(|&(q, _)| q != pos - 1).map(|(_, &v)| v).collect();
        acc.push((first, rest[pos]));
        let s = if (pos - 1) % 2 == 0 { sign } else { -sign };
        enumerate_pairings(&remaining, acc, s, f);
        acc.pop();
    }
}

/// Pfaffian of `f(z_i − z_j)` for an odd kernel given as a closure; reference for tests.
pub fn kernel_pfaffian<F>(z: &[C64], f: F) -> C64
where
    F: Fn(C64) -> C64,
{
    let idx: Vec<usize> = (0..z.len()).collect();
    pairing_sum(&idx, &|i, j| f(z[i] - z[j]))
}
