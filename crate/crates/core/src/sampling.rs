//! Seeded random parameter draws. Every case owns an independent ChaCha stream
//! derived from `(seed, case id)`, so results do not depend on scheduling.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::ellpf::{PointConfig, SigmaLabel, DEGENERACY_TOL};
use crate::error::{Error, Result};
use crate::numkernel::{omega_pow, theta, Nome, TruncationPolicy, C64};
use crate::pfaffian::SkewMatrix;

/// Rejection sampling gives up after this many draws.
pub const MAX_REJECTIONS: usize = 1000;
/// Draws of `λ` with `|θ(λω^k;p)|` below this are rejected.
pub const LAMBDA_CLEARANCE: f64 = 1e-6;

/// Stream for one case: the first 32 bytes of `SHA-256(seed ‖ id)`.
pub fn case_rng(seed: u64, case_id: &str) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(case_id.as_bytes());
    let digest = h.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest[..32]);
    ChaCha8Rng::from_seed(key)
}

/// Uniform point of the disc `|w| ≤ r`.
pub fn complex_in_disc<R: Rng>(rng: &mut R, r: f64) -> C64 {
    let rad = r * rng.gen::<f64>().sqrt();
    C64::from_polar(rad, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Point of the annulus `lo ≤ |w| ≤ hi` with uniform modulus and phase.
pub fn complex_in_annulus<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> C64 {
    C64::from_polar(rng.gen_range(lo..=hi), rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Nome with `|p|` uniform in `[lo, hi]` (`0 < lo ≤ hi < 1`) and uniform phase.
pub fn nome_in<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> Result<Nome> {
    let r = rng.gen_range(lo..=hi);
    Nome::from_polar(r, rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
}

/// `z_j` uniform in `[0, 1) + i[−0.05, 0.05]`.
pub fn strip_points<R: Rng>(rng: &mut R, count: usize) -> Vec<C64> {
    (0..count).map(|_| C64::new(rng.gen::<f64>(), rng.gen_range(-0.05..=0.05))).collect()
}

/// `z_j` uniform in `[0, 1)`.
pub fn real_points<R: Rng>(rng: &mut R, count: usize) -> Vec<C64> {
    (0..count).map(|_| C64::new(rng.gen::<f64>(), 0.0)).collect()
}

/// Strip configuration of `2n` points whose degeneracy score for every listed
/// label is at least `clearance`.
pub fn generic_config<R: Rng>(rng: &mut R, n: usize, nome: Nome, labels: &[SigmaLabel], clearance: f64) -> Result<PointConfig> {
    draw_config(rng, n, nome, labels, clearance, strip_points)
}

/// Like [`generic_config`] with real points.
pub fn generic_real_config<R: Rng>(rng: &mut R, n: usize, nome: Nome, labels: &[SigmaLabel], clearance: f64) -> Result<PointConfig> {
    draw_config(rng, n, nome, labels, clearance, real_points)
}

fn draw_config<R: Rng>(
    rng: &mut R,
    n: usize,
    nome: Nome,
    labels: &[SigmaLabel],
    clearance: f64,
    draw: fn(&mut R, usize) -> Vec<C64>,
) -> Result<PointConfig> {
    let clearance = clearance.max(DEGENERACY_TOL);
    for _ in 0..MAX_REJECTIONS {
        let cfg = PointConfig::new(draw(rng, 2 * n), nome)?;
        let mut ok = true;
        for &s in labels {
            if cfg.genericity(s)? < clearance {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(cfg);
        }
    }
    Err(Error::Degenerate(format!("no generic configuration after {MAX_REJECTIONS} draws")))
}

/// `λ` in the annulus `0.3 ≤ |λ| ≤ 1.5`, rejected while `|θ(λω^k;p)| < LAMBDA_CLEARANCE`
/// for some `k ∈ {0, 1, 2, n, n+1, n+2}`.
pub fn lambda_draw<R: Rng>(rng: &mut R, n: usize, nome: &Nome) -> Result<C64> {
    let policy = TruncationPolicy::default();
    let p = nome.p();
    let ks = [0, 1, 2, n as i64, n as i64 + 1, n as i64 + 2];
    for _ in 0..MAX_REJECTIONS {
        let lam = complex_in_annulus(rng, 0.3, 1.5);
        let mut ok = true;
        for &k in &ks {
            if theta(lam * omega_pow(k), p, &policy)?.norm() < LAMBDA_CLEARANCE {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(lam);
        }
    }
    Err(Error::Degenerate(format!("no admissible lambda after {MAX_REJECTIONS} draws")))
}

/// Skew-symmetric matrix with upper entries uniform in the unit disc.
pub fn skew_matrix<R: Rng>(rng: &mut R, dim: usize) -> SkewMatrix {
    SkewMatrix::from_upper(dim, |_, _| complex_in_disc(rng, 1.0)).expect("entries are finite")
}

/// `dim × dim` matrix, row-major, entries uniform in the unit disc.
pub fn square_matrix<R: Rng>(rng: &mut R, dim: usize) -> Vec<C64> {
    (0..dim * dim).map(|_| complex_in_disc(rng, 1.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| case_rng(42, "x").gen()).collect();
        let mut r = case_rng(42, "x");
        let b: Vec<u64> = (0..4).map(|_| r.gen()).collect();
        let c: u64 = case_rng(42, "y").gen();
        let d: u64 = case_rng(43, "x").gen();
        assert_eq!(a[0], b[0]);
        assert_ne!(b[0], c);
        assert_ne!(b[0], d);
    }

    #[test]
    fn draws_respect_their_domains() {
        let mut r = case_rng(7, "domains");
        for _ in 0..200 {
            let z = strip_points(&mut r, 4);
            assert!(z.iter().all(|w| (0.0..1.0).contains(&w.re) && w.im.abs() <= 0.05));
            let nome = nome_in(&mut r, 0.1, 0.7).unwrap();
            assert!((0.1 - 1e-12..=0.7 + 1e-12).contains(&nome.modulus()));
            assert!(complex_in_disc(&mut r, 2.0).norm() <= 2.0);
        }
    }

    #[test]
    fn generic_configs_and_lambdas_clear_thresholds() {
        let mut r = case_rng(1, "generic");
        let nome = Nome::from_polar(0.4, 0.3).unwrap();
        let labels = SigmaLabel::all();
        let cfg = generic_config(&mut r, 2, nome, &labels, 1e-4).unwrap();
        for s in labels {
            assert!(cfg.genericity(s).unwrap() >= 1e-4);
        }
        let lam = lambda_draw(&mut r, 3, &nome).unwrap();
        for k in [0, 1, 2, 3, 4, 5] {
            let t = theta(lam * omega_pow(k), nome.p(), &TruncationPolicy::default()).unwrap();
            assert!(t.norm() >= LAMBDA_CLEARANCE);
        }
    }
}
