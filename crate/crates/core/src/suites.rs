//! Named verification suites. A suite is a list of cases; each case draws its
//! parameters from its own seeded stream and reports one residual against one
//! tolerance. Cases run in parallel and reports are sorted by case id.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::eightvertex::{
    commutator_check, homogeneous_proportionality_check, homogeneous_tq_residual, involution_ratio, phi_quasi_period_check,
    qqp_check, qqp_check_of, q_sigma, rs_eigenvalue_check, spin_flip_check, tq_labels, tq_residual, EvParams,
};
use crate::ellpf::checks::{
    ap_properties, ap_residual, classical_ratio_check, half_shift_check, hat_cross_check, modular_check,
    specialization_recursion_check, MODULAR_REPRESENTATIVES,
};
use crate::ellpf::expansions::{
    glaisher_t, homogeneous_limit_check, laurent_check, schur_expansion_check, sqe_expansion_check, trig_leading_check,
};
use crate::ellpf::{p_sigma, p_sigma_expanded, SigmaLabel};
use crate::error::{Error, Result};
use crate::numkernel::identities::{
    kronecker_residual, qtl_residuals, quintuple_residual, tql_residuals, tqp_residuals, triple_product_residual,
};
use crate::numkernel::{ts_relations_check, CubicKernel, Nome, TruncationPolicy, C64};
use crate::pfaffian::{determinant, pfaffian, pfaffian_by_pairings};
use crate::report::{CaseRecord, CheckReport};
use crate::sampling::{
    case_rng, complex_in_annulus, generic_config, generic_real_config, lambda_draw, nome_in,
    skew_matrix, square_matrix, strip_points,
};
use crate::soslattice::{
    dwt_check, enumerate_states, ik_determinant, npfb_check, partition_z, thc_check, three_colour_bridge, three_colour_z,
    tti_check, trig_dwpf_check, zqp_check, SosParams, ThreeColourWeights,
};
use crate::sympoly::{okada_check, sundquist_check};

/// Random samples per theta identity.
pub const THETA_SAMPLES: usize = 1000;
/// Random matrices per pfaffian property.
pub const MATRIX_SAMPLES: usize = 1000;
/// Random configurations per Sundquist case.
pub const SUNDQUIST_SAMPLES: usize = 50;
/// Parameter draws per domain-wall case.
pub const DWT_DRAWS: usize = 10;

pub const THETA_TOL: f64 = 1e-11;
pub const MATRIX_TOL: f64 = 1e-9;
pub const PAIRING_TOL: f64 = 1e-12;
pub const SYMPOLY_TOL: f64 = 1e-9;
pub const CORE_TOL: f64 = 1e-9;
pub const MODULAR_TOL: f64 = 1e-7;
pub const SHIFT_TOL: f64 = 1e-8;
pub const EXPANSION_TOL: f64 = 1e-7;
pub const LAURENT_TOL: f64 = 1e-9;
pub const HANKEL_TOL: f64 = 1e-5;
pub const LATTICE_TOL: f64 = 1e-9;
pub const DWT_TOL: f64 = 1e-8;
pub const TTI_TOL: f64 = 1e-11;
pub const THREE_COLOUR_TOL: f64 = 1e-6;
pub const RS_TOL: f64 = 1e-7;
pub const OVERLAP_TOL: f64 = 1e-6;
pub const TQ_TOL: f64 = 1e-8;
pub const HOMOGENEOUS_TQ_TOL: f64 = 1e-6;
/// Tolerance for exact (integer) comparisons, whose residual is a mismatch count.
pub const EXACT_TOL: f64 = 0.5;

/// Residual plus a textual record of the sampled parameters.
pub type Eval = (f64, String);
type Runner = Box<dyn Fn(&mut ChaCha8Rng) -> Result<Eval> + Send + Sync>;

/// One named check.
pub struct Case {
    pub id: String,
    pub tolerance: f64,
    run: Runner,
}

impl Case {
    pub fn new<F>(id: impl Into<String>, tolerance: f64, run: F) -> Self
    where
        F: Fn(&mut ChaCha8Rng) -> Result<Eval> + Send + Sync + 'static,
    {
        Case { id: id.into(), tolerance, run: Box::new(run) }
    }

    /// Evaluates the case with the stream for `(seed, id)`; the tolerance is scaled by `tol_scale`.
    pub fn evaluate(&self, seed: u64, tol_scale: f64) -> CaseRecord {
        let mut rng = case_rng(seed, &self.id);
        let tol = self.tolerance * tol_scale;
        match (self.run)(&mut rng) {
            Ok((r, params)) => CaseRecord::evaluated(self.id.clone(), &params, r, tol),
            Err(e) => CaseRecord::failed(self.id.clone(), &self.id, tol, &e),
        }
    }
}

/// Building blocks of the named suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Group {
    Theta,
    Pfaffian,
    Sympoly,
    EllpfCore,
    Shift,
    Expansions,
    Trigonometric,
    Hankel,
    Modular,
    Lattice,
    ThreeColour,
    EightVertex,
}

impl Group {
    pub const ALL: [Group; 12] = [
        Group::Theta,
        Group::Pfaffian,
        Group::Sympoly,
        Group::EllpfCore,
        Group::Shift,
        Group::Expansions,
        Group::Trigonometric,
        Group::Hankel,
        Group::Modular,
        Group::Lattice,
        Group::ThreeColour,
        Group::EightVertex,
    ];

    pub fn cases(self) -> Vec<Case> {
        match self {
            Group::Theta => theta_cases(),
            Group::Pfaffian => pfaffian_cases(),
            Group::Sympoly => sympoly_cases(),
            Group::EllpfCore => core_cases(),
            Group::Shift => shift_cases(),
            Group::Expansions => expansion_cases(),
            Group::Trigonometric => trig_cases(),
            Group::Hankel => hankel_cases(),
            Group::Modular => modular_cases(),
            Group::Lattice => lattice_cases(),
            Group::ThreeColour => three_colour_cases(),
            Group::EightVertex => eight_vertex_cases(),
        }
    }
}

/// Suites selectable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Theta,
    Pfaffian,
    Sympoly,
    Ellpf,
    Modular,
    Dwt,
    ThreeColour,
    Tq,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 9] = ["theta", "pfaffian", "sympoly", "ellpf", "modular", "dwt", "threecolour", "tq", "all"];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Theta => "theta",
            Suite::Pfaffian => "pfaffian",
            Suite::Sympoly => "sympoly",
            Suite::Ellpf => "ellpf",
            Suite::Modular => "modular",
            Suite::Dwt => "dwt",
            Suite::ThreeColour => "threecolour",
            Suite::Tq => "tq",
            Suite::All => "all",
        }
    }

    pub fn groups(self) -> Vec<Group> {
        match self {
            Suite::Theta => vec![Group::Theta],
            Suite::Pfaffian => vec![Group::Pfaffian],
            Suite::Sympoly => vec![Group::Sympoly],
            Suite::Ellpf => vec![Group::EllpfCore, Group::Shift, Group::Expansions, Group::Trigonometric, Group::Hankel],
            Suite::Modular => vec![Group::Modular],
            Suite::Dwt => vec![Group::Lattice],
            Suite::ThreeColour => vec![Group::ThreeColour],
            Suite::Tq => vec![Group::EightVertex],
            Suite::All => Group::ALL.to_vec(),
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "theta" => Suite::Theta,
            "pfaffian" => Suite::Pfaffian,
            "sympoly" => Suite::Sympoly,
            "ellpf" => Suite::Ellpf,
            "modular" => Suite::Modular,
            "dwt" => Suite::Dwt,
            "threecolour" => Suite::ThreeColour,
            "tq" => Suite::Tq,
            "all" => Suite::All,
            _ => return Err(Error::Domain(format!("unknown suite '{s}' (expected one of {})", Suite::NAMES.join(", ")))),
        })
    }
}

/// Runs cases in parallel; the result is sorted by id and independent of scheduling.
pub fn run_cases(cases: &[Case], seed: u64, tol_scale: f64) -> Vec<CaseRecord> {
    let mut out: Vec<CaseRecord> = cases.par_iter().map(|c| c.evaluate(seed, tol_scale)).collect();
    out.sort_by(|a, b| a.check_id.cmp(&b.check_id));
    out
}

/// Runs every group of a suite. `wall_time_ms` is recorded only when `timing` is set,
/// so that untimed reports are byte-identical across runs.
pub fn run_suite(suite: Suite, seed: u64, tol_scale: f64, timing: bool) -> CheckReport {
    let start = Instant::now();
    let cases: Vec<Case> = suite.groups().into_iter().flat_map(Group::cases).collect();
    let records = run_cases(&cases, seed, tol_scale);
    let ms = if timing { start.elapsed().as_millis() as u64 } else { 0 };
    CheckReport::new(suite.name(), records, seed, ms)
}

/// Largest residual over `count` draws; `sample` appends its parameters to the log.
fn worst_of<F>(rng: &mut ChaCha8Rng, count: usize, mut sample: F) -> Result<Eval>
where
    F: FnMut(&mut ChaCha8Rng, &mut String) -> Result<f64>,
{
    let mut log = String::new();
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let r = sample(rng, &mut log)?;
        worst = if r.is_nan() { f64::NAN } else { worst.max(r) };
    }
    Ok((worst, log))
}

fn log_nome(log: &mut String, nome: &Nome) {
    let _ = write!(log, "tau={:?};", nome.tau());
}

fn theta_nome(rng: &mut ChaCha8Rng) -> Result<Nome> {
    nome_in(rng, 0.05, 0.7)
}

/// `x` with `|p|^{1/2} ≤ |x| ≤ |p|^{−1/2}` clipped to `[0.5, 2]`.
fn theta_x(rng: &mut ChaCha8Rng, nome: &Nome) -> C64 {
    let s = nome.modulus().sqrt().max(0.5);
    complex_in_annulus(rng, s, 1.0 / s)
}

/// Distance of `y` from the zero set `{p^k}` of `θ(·;p)`, over `|k| ≤ 3`.
fn theta_zero_clearance(y: C64, nome: &Nome) -> f64 {
    (-3..=3).map(|k| (1.0 - y * nome.p().powi(k)).norm()).fold(f64::INFINITY, f64::min)
}

/// `(a, x)` for the Kronecker sum: `|x| = |p|^t` with `t ∈ [1/4, 3/4]` (inside
/// `|p| < |x| < 1`), and `a`, `x`, `ax` at distance `≥ 0.1` from the zeros of `θ`,
/// where the quotient vanishes or blows up and a relative residual loses meaning.
fn kronecker_draw(rng: &mut ChaCha8Rng, nome: &Nome) -> Result<(C64, C64)> {
    for _ in 0..crate::sampling::MAX_REJECTIONS {
        let t = rng.gen_range(0.25..=0.75);
        let x = C64::from_polar(nome.modulus().powf(t), rng.gen_range(0.0..std::f64::consts::TAU));
        let a = theta_x(rng, nome);
        if [a, x, a * x].iter().all(|&y| theta_zero_clearance(y, nome) >= 0.1) {
            return Ok((a, x));
        }
    }
    Err(Error::Degenerate("no Kronecker sample clear of theta zeros".into()))
}

fn theta_cases() -> Vec<Case> {
    let pol = TruncationPolicy::default();
    let mut v = vec![
        Case::new("theta.quasi-period", THETA_TOL, move |rng| {
            worst_of(rng, THETA_SAMPLES, |rng, log| {
                let nome = theta_nome(rng)?;
                let x = theta_x(rng, &nome);
                log_nome(log, &nome);
                let _ = write!(log, "x={x};");
                let (a, b) = tqp_residuals(x, nome.p(), &pol)?;
                Ok(a.max(b))
            })
        }),
        Case::new("theta.triple-product", THETA_TOL, move |rng| {
            worst_of(rng, THETA_SAMPLES, |rng, log| {
                let nome = theta_nome(rng)?;
                let x = theta_x(rng, &nome);
                log_nome(log, &nome);
                let _ = write!(log, "x={x};");
                triple_product_residual(x, nome.p(), &pol)
            })
        }),
        Case::new("theta.quintuple-product", THETA_TOL, move |rng| {
            worst_of(rng, THETA_SAMPLES, |rng, log| {
                let nome = theta_nome(rng)?;
                let x = theta_x(rng, &nome);
                log_nome(log, &nome);
                let _ = write!(log, "x={x};");
                quintuple_residual(x, &nome, &pol)
            })
        }),
        Case::new("theta.kronecker", THETA_TOL, move |rng| {
            worst_of(rng, THETA_SAMPLES, |rng, log| {
                let nome = theta_nome(rng)?;
                let (a, x) = kronecker_draw(rng, &nome)?;
                log_nome(log, &nome);
                let _ = write!(log, "a={a};x={x};");
                kronecker_residual(a, x, &nome, &pol)
            })
        }),
        Case::new("theta.cube-root-relations", THETA_TOL, move |rng| {
            worst_of(rng, THETA_SAMPLES, |rng, log| {
                let nome = theta_nome(rng)?;
                log_nome(log, &nome);
                let (a, b) = ts_relations_check(&nome)?;
                Ok(a.max(b))
            })
        }),
        Case::new("theta.cubic-kernel-forms", THETA_TOL, move |rng| {
            worst_of(rng, THETA_SAMPLES, |rng, log| {
                let nome = theta_nome(rng)?;
                let x = theta_x(rng, &nome);
                log_nome(log, &nome);
                let _ = write!(log, "x={x};");
                Ok(qtl_residuals(x, &nome, &pol)?.into_iter().fold(0.0, f64::max))
            })
        }),
    ];
    for (name, k) in [("odd", CubicKernel::Odd), ("even-plus", CubicKernel::EvenPlus), ("even-minus", CubicKernel::EvenMinus)] {
        v.push(Case::new(format!("theta.three-term.{name}"), THETA_TOL, move |rng| {
            worst_of(rng, THETA_SAMPLES, |rng, log| {
                let nome = theta_nome(rng)?;
                let x = theta_x(rng, &nome);
                log_nome(log, &nome);
                let _ = write!(log, "x={x};");
                let (a, b) = tql_residuals(k, x, &nome, &pol)?;
                Ok(a.max(b))
            })
        }));
    }
    v
}

fn rel(defect: C64, scale: f64) -> f64 {
    if scale == 0.0 {
        defect.norm()
    } else {
        defect.norm() / scale
    }
}

fn pfaffian_cases() -> Vec<Case> {
    vec![
        Case::new("pfaffian.square-is-determinant", MATRIX_TOL, |rng| {
            worst_of(rng, MATRIX_SAMPLES, |rng, log| {
                let dim = 2 * rng.gen_range(1..=5);
                let a = skew_matrix(rng, dim);
                let _ = write!(log, "A={:?};", a.as_slice());
                let pf = pfaffian(&a);
                let det = determinant(dim, a.as_slice());
                Ok(rel(pf * pf - det, (pf * pf).norm().max(det.norm())))
            })
        }),
        Case::new("pfaffian.congruence", MATRIX_TOL, |rng| {
            worst_of(rng, MATRIX_SAMPLES, |rng, log| {
                let dim = 2 * rng.gen_range(1..=5);
                let a = skew_matrix(rng, dim);
                let b = square_matrix(rng, dim);
                let _ = write!(log, "A={:?};B={b:?};", a.as_slice());
                let lhs = pfaffian(&a.congruence(&b));
                let rhs = determinant(dim, &b) * pfaffian(&a);
                Ok(rel(lhs - rhs, lhs.norm().max(rhs.norm())))
            })
        }),
        Case::new("pfaffian.pairing-sum", PAIRING_TOL, |rng| {
            worst_of(rng, MATRIX_SAMPLES, |rng, log| {
                let dim = 2 * rng.gen_range(1..=3);
                let a = skew_matrix(rng, dim);
                let _ = write!(log, "A={:?};", a.as_slice());
                let x = pfaffian(&a);
                let y = pfaffian_by_pairings(&a);
                Ok(rel(x - y, x.norm().max(y.norm()).max(1.0)))
            })
        }),
    ]
}

fn sympoly_cases() -> Vec<Case> {
    let mut v = Vec::new();
    for n in 1..=3usize {
        v.push(Case::new(format!("sympoly.sundquist.n{n}"), SYMPOLY_TOL, move |rng| {
            worst_of(rng, SUNDQUIST_SAMPLES, |rng, log| {
                let x: Vec<C64> = (0..2 * n).map(|_| complex_in_annulus(rng, 0.5, 1.5)).collect();
                let _ = write!(log, "x={x:?};");
                sundquist_check(&x)
            })
        }));
        v.push(Case::new(format!("sympoly.determinant-form.n{n}"), SYMPOLY_TOL, move |rng| {
            worst_of(rng, SUNDQUIST_SAMPLES, |rng, log| {
                let u: Vec<C64> = (0..n).map(|_| complex_in_annulus(rng, 0.5, 1.5)).collect();
                let w: Vec<C64> = (0..n).map(|_| complex_in_annulus(rng, 0.5, 1.5)).collect();
                let _ = write!(log, "u={u:?};v={w:?};");
                okada_check(&u, &w)
            })
        }));
    }
    v
}

/// Nome for the pfaffian core checks: `0.1 ≤ |p| ≤ 0.5`.
fn core_nome(rng: &mut ChaCha8Rng) -> Result<Nome> {
    nome_in(rng, 0.1, 0.5)
}

/// Generic configuration clearance for the core checks.
const CLEARANCE: f64 = 1e-3;

fn core_cases() -> Vec<Case> {
    let mut v = Vec::new();
    for sigma in SigmaLabel::all() {
        for n in 1..=2usize {
            v.push(Case::new(format!("ellpf.antisymmetry.{sigma}.n{n}"), CORE_TOL, move |rng| {
                let nome = core_nome(rng)?;
                let cfg = generic_config(rng, n, nome, &[sigma], CLEARANCE)?;
                let mut w = cfg.z.clone();
                w.swap(0, 2 * n - 1);
                let a = p_sigma(sigma, &cfg.z, &nome)?;
                let b = p_sigma(sigma, &w, &nome)?;
                Ok((rel(a + b, a.norm()), format!("{cfg:?}")))
            }));
            v.push(Case::new(format!("ellpf.coincidence.{sigma}.n{n}"), CORE_TOL, move |rng| {
                let nome = core_nome(rng)?;
                let cfg = generic_config(rng, n, nome, &[sigma], CLEARANCE)?;
                let generic = p_sigma(sigma, &cfg.z, &nome)?;
                let mut w = cfg.z.clone();
                w[1] = w[0];
                let coincident = p_sigma_expanded(sigma, &w, &nome)?;
                Ok((rel(coincident, generic.norm()), format!("{cfg:?}")))
            }));
            v.push(Case::new(format!("ellpf.hat-rule.{sigma}.n{n}"), CORE_TOL, move |rng| {
                let nome = core_nome(rng)?;
                let cfg = generic_config(rng, n, nome, &[sigma, sigma.toggled()], CLEARANCE)?;
                Ok((hat_cross_check(sigma, &cfg)?, format!("{cfg:?}")))
            }));
            for prop in ap_properties(sigma) {
                v.push(Case::new(format!("ellpf.property.{sigma}.n{n}.{}", prop.name()), CORE_TOL, move |rng| {
                    let nome = core_nome(rng)?;
                    let cfg = generic_config(rng, n, nome, &[sigma], CLEARANCE)?;
                    let z = strip_points(rng, 1)[0];
                    Ok((ap_residual(sigma, prop, z, &cfg)?, format!("{cfg:?};z={z}")))
                }));
            }
        }
        v.push(Case::new(format!("ellpf.classical-form.{sigma}"), CORE_TOL, move |rng| {
            let nome = core_nome(rng)?;
            let configs: Vec<Vec<C64>> = (0..4)
                .map(|_| Ok(generic_config(rng, 2, nome, &[sigma], CLEARANCE)?.z))
                .collect::<Result<_>>()?;
            Ok((classical_ratio_check(sigma, &configs, &nome)?, format!("tau={:?};{configs:?}", nome.tau())))
        }));
    }
    v
}

fn shift_cases() -> Vec<Case> {
    let mut v = Vec::new();
    for sigma in SigmaLabel::all() {
        for n in 1..=2usize {
            v.push(Case::new(format!("ellpf.half-shift.{sigma}.n{n}"), SHIFT_TOL, move |rng| {
                let nome = core_nome(rng)?;
                let cfg = generic_config(rng, n, nome, &SigmaLabel::all(), CLEARANCE)?;
                Ok((half_shift_check(sigma, &cfg)?, format!("{cfg:?}")))
            }));
            v.push(Case::new(format!("ellpf.recursion.{sigma}.n{n}"), SHIFT_TOL, move |rng| {
                let nome = core_nome(rng)?;
                let cfg = generic_config(rng, n, nome, &[sigma], CLEARANCE)?;
                Ok((specialization_recursion_check(sigma, &cfg)?, format!("{cfg:?}")))
            }));
        }
    }
    v
}

fn expansion_cases() -> Vec<Case> {
    let mut v = Vec::new();
    for base in [0u8, 2, 3, 4, 6] {
        for hat in [false, true] {
            let sigma = SigmaLabel::new(base, hat).expect("valid base");
            for n in 1..=2usize {
                v.push(Case::new(format!("ellpf.schur-expansion.{sigma}.n{n}"), EXPANSION_TOL, move |rng| {
                    let nome = nome_in(rng, 0.05, 0.4)?;
                    let cfg = generic_real_config(rng, n, nome, &[sigma], CLEARANCE)?;
                    Ok((schur_expansion_check(sigma, &cfg.z, &nome, None)?, format!("{cfg:?}")))
                }));
            }
        }
    }
    for hat in [false, true] {
        let sigma = SigmaLabel::new(1, hat).expect("valid base");
        for n in 1..=2usize {
            v.push(Case::new(format!("ellpf.t-lambda-expansion.{sigma}.n{n}"), EXPANSION_TOL, move |rng| {
                let nome = nome_in(rng, 0.05, 0.4)?;
                let cfg = generic_real_config(rng, n, nome, &[sigma], CLEARANCE)?;
                Ok((sqe_expansion_check(sigma, &cfg.z, &nome, None)?, format!("{cfg:?}")))
            }));
        }
    }
    for sigma in SigmaLabel::all() {
        v.push(Case::new(format!("ellpf.laurent.{sigma}"), LAURENT_TOL, move |rng| {
            worst_of(rng, 20, |rng, log| {
                let nome = nome_in(rng, 0.05, 0.4)?;
                let x = C64::from_polar(1.0, rng.gen_range(0.2..3.0));
                log_nome(log, &nome);
                let _ = write!(log, "x={x};");
                laurent_check(sigma, x, &nome)
            })
        }));
    }
    v
}

fn trig_cases() -> Vec<Case> {
    SigmaLabel::all()
        .into_iter()
        .map(|sigma| {
            // residual: shortfall of the fitted slope below the required one
            Case::new(format!("ellpf.trigonometric-limit.{sigma}.n2"), 1e-12, move |rng| {
                let z = generic_real_config(rng, 2, Nome::zero(), &[sigma], CLEARANCE)?.z;
                let s = trig_leading_check(sigma, &z)?;
                Ok(((s.required - s.slope).max(0.0), format!("z={z:?};slope={}", s.slope)))
            })
        })
        .collect()
}

fn hankel_cases() -> Vec<Case> {
    let mut v = vec![Case::new("ellpf.glaisher-numbers", EXACT_TOL, |_| {
        let want: [u64; 5] = [1, 23, 1681, 257543, 67637281];
        let mut bad = 0;
        for (j, w) in want.iter().enumerate() {
            if glaisher_t(j)? != (*w).into() {
                bad += 1;
            }
        }
        Ok((bad as f64, "T0..T4".into()))
    })];
    for base in SigmaLabel::BASES {
        for n in 1..=2usize {
            let sigma = SigmaLabel::plain(base);
            v.push(Case::new(format!("ellpf.homogeneous-limit.{sigma}.n{n}"), HANKEL_TOL, move |rng| {
                let nome = nome_in(rng, 0.05, 0.5)?;
                Ok((homogeneous_limit_check(sigma, n, &nome)?, format!("tau={:?}", nome.tau())))
            }));
        }
    }
    v
}

fn modular_cases() -> Vec<Case> {
    let mut v = Vec::new();
    for m in MODULAR_REPRESENTATIVES {
        for n in 1..=2usize {
            let id = format!("modular.{}.n{n}", m.map(|e| e.to_string()).join("_"));
            v.push(Case::new(id, MODULAR_TOL, move |rng| {
                let nome = nome_in(rng, 0.05, 0.2)?;
                let configs: Vec<Vec<C64>> = (0..4)
                    .map(|_| Ok(generic_config(rng, n, nome, &SigmaLabel::all(), CLEARANCE)?.z))
                    .collect::<Result<_>>()?;
                Ok((modular_check(m, &configs, &nome)?, format!("tau={:?};{configs:?}", nome.tau())))
            }));
        }
    }
    v
}

fn spectral_family<R: Rng>(rng: &mut R, n: usize) -> Vec<C64> {
    (0..n).map(|_| complex_in_annulus(rng, 0.6, 1.4)).collect()
}

fn lattice_cases() -> Vec<Case> {
    let mut v = vec![
        Case::new("lattice.state-counts", EXACT_TOL, |_| {
            let want = [1usize, 2, 7, 42, 429];
            let mut bad = 0;
            for (i, w) in want.iter().enumerate() {
                if enumerate_states(i + 1)?.len() != *w {
                    bad += 1;
                }
            }
            Ok((bad as f64, "n=1..5".into()))
        }),
        Case::new("lattice.cube-root-theta", TTI_TOL, |rng| {
            worst_of(rng, 100, |rng, log| {
                let nome = nome_in(rng, 0.05, 0.5)?;
                let lam = lambda_draw(rng, 1, &nome)?;
                log_nome(log, &nome);
                let _ = write!(log, "lambda={lam};");
                tti_check(lam, &nome)
            })
        }),
    ];
    for n in 1..=3usize {
        v.push(Case::new(format!("lattice.izergin-korepin.n{n}"), LATTICE_TOL, move |rng| {
            let (u, w) = (spectral_family(rng, n), spectral_family(rng, n));
            let q = complex_in_annulus(rng, 0.5, 1.5);
            let params = SosParams::new(u.clone(), w.clone(), C64::new(0.0, 0.0), Nome::zero(), q)?;
            let z = partition_z(&params)?;
            let ik = ik_determinant(&u, &w, q)?;
            Ok((rel(z - ik, z.norm()), format!("u={u:?};v={w:?};q={q}")))
        }));
        v.push(Case::new(format!("lattice.cube-root-schur.n{n}"), LATTICE_TOL, move |rng| {
            let (u, w) = (spectral_family(rng, n), spectral_family(rng, n));
            Ok((npfb_check(&u, &w)?, format!("u={u:?};v={w:?}")))
        }));
        v.push(Case::new(format!("lattice.trigonometric-dynamical.n{n}"), LATTICE_TOL, move |rng| {
            let (u, w) = (spectral_family(rng, n), spectral_family(rng, n));
            let lam = complex_in_annulus(rng, 0.3, 1.5);
            let (a, b) = trig_dwpf_check(&u, &w, lam)?;
            Ok((a.max(b), format!("u={u:?};v={w:?};lambda={lam}")))
        }));
        v.push(Case::new(format!("lattice.quasi-period.n{n}"), LATTICE_TOL, move |rng| {
            let nome = nome_in(rng, 0.05, 0.5)?;
            let (u, w) = (spectral_family(rng, n), spectral_family(rng, n));
            let lam = lambda_draw(rng, n, &nome)?;
            Ok((zqp_check(&u, &w, lam, &nome)?, format!("tau={:?};u={u:?};v={w:?};lambda={lam}", nome.tau())))
        }));
    }
    for n in 1..=4usize {
        for d in 0..DWT_DRAWS {
            v.push(Case::new(format!("lattice.domain-wall.n{n}.draw{d}"), DWT_TOL, move |rng| {
                let nome = nome_in(rng, 0.05, 0.5)?;
                let lam = lambda_draw(rng, n, &nome)?;
                let cfg = generic_config(rng, n, nome, &[SigmaLabel::plain(2), SigmaLabel::plain(4)], CLEARANCE)?;
                Ok((dwt_check(&cfg.z, lam, &nome)?, format!("{cfg:?};lambda={lam}")))
            }));
        }
    }
    v
}

fn three_colour_cases() -> Vec<Case> {
    let mut v = Vec::new();
    for n in 1..=2usize {
        v.push(Case::new(format!("threecolour.hankel.n{n}"), THREE_COLOUR_TOL, move |rng| {
            let nome = nome_in(rng, 0.05, 0.4)?;
            let lam = lambda_draw(rng, n, &nome)?;
            Ok((thc_check(n, lam, &nome)?, format!("tau={:?};lambda={lam}", nome.tau())))
        }));
        v.push(Case::new(format!("threecolour.specialisation.n{n}"), LATTICE_TOL, move |rng| {
            let nome = nome_in(rng, 0.05, 0.4)?;
            let lam = lambda_draw(rng, n, &nome)?;
            let brute = three_colour_z(n, &ThreeColourWeights::from_lambda(lam, &nome)?)?;
            let bridge = three_colour_bridge(n, lam, &nome)?;
            Ok((rel(brute - bridge, brute.norm()), format!("tau={:?};lambda={lam}", nome.tau())))
        }));
    }
    v
}

/// Inhomogeneities `u_j` in `[−1, 1] + i[−0.1, 0.1]` with generic spacing.
fn chain<R: Rng>(rng: &mut R, n: usize) -> Result<EvParams> {
    let nome = nome_in(rng, 0.05, 0.5)?;
    for _ in 0..crate::sampling::MAX_REJECTIONS {
        let u = (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-0.1..0.1))).collect();
        match EvParams::new(nome, u) {
            Ok(p) => return Ok(p),
            Err(e) if e.is_degeneracy() => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Degenerate("no generic inhomogeneities".into()))
}

fn spectral_points<R: Rng>(rng: &mut R, count: usize) -> Vec<C64> {
    (0..count).map(|_| C64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-0.2..0.2))).collect()
}

fn log_chain(p: &EvParams, us: &[C64]) -> String {
    format!("tau={:?};u_j={:?};u={us:?}", p.nome().tau(), p.inhomogeneities())
}

fn eight_vertex_cases() -> Vec<Case> {
    let mut v = vec![
        Case::new("tq.transfer-commute.N3", TQ_TOL, |rng| {
            let p = chain(rng, 3)?;
            let s = spectral_points(rng, 2);
            Ok((commutator_check(s[0], s[1], &p)?, log_chain(&p, &s)))
        }),
        Case::new("tq.spin-flip.N3", 1e-9, |rng| {
            let p = chain(rng, 3)?;
            let s = spectral_points(rng, 1);
            Ok((spin_flip_check(s[0], &p)?, log_chain(&p, &s)))
        }),
        Case::new("tq.phi-quasi-period.N5", 1e-10, |rng| {
            let p = chain(rng, 5)?;
            let s = spectral_points(rng, 1);
            let (a, b) = phi_quasi_period_check(s[0], &p)?;
            Ok((a.max(b), log_chain(&p, &s)))
        }),
        Case::new("tq.homogeneous-limit.N3", HANKEL_TOL, |rng| {
            let nome = nome_in(rng, 0.05, 0.4)?;
            let us = spectral_points(rng, 4);
            let mut worst: f64 = 0.0;
            for sigma in tq_labels() {
                worst = worst.max(homogeneous_proportionality_check(sigma, &us, C64::new(0.7, 0.05), &nome, 3)?);
            }
            Ok((worst, format!("tau={:?};u={us:?}", nome.tau())))
        }),
    ];
    for n in [1usize, 3, 5] {
        v.push(Case::new(format!("tq.razumov-stroganov.N{n}"), RS_TOL, move |rng| {
            let p = chain(rng, n)?;
            let s = spectral_points(rng, 3);
            let verdict = rs_eigenvalue_check(&s, &p)?;
            let gap = verdict.eigen_gaps.iter().chain(&verdict.cross_residuals).fold(0.0f64, |a, &b| a.max(b));
            // the overlap criterion has its own tolerance; fold it in on the same scale
            let overlap = verdict.overlap_defects.iter().fold(0.0f64, |a, &b| a.max(b)) * (RS_TOL / OVERLAP_TOL);
            Ok((gap.max(overlap), log_chain(&p, &s)))
        }));
        for sigma in tq_labels() {
            v.push(Case::new(format!("tq.tq-equation.{sigma}.N{n}"), TQ_TOL, move |rng| {
                let p = chain(rng, n)?;
                let s = spectral_points(rng, 3);
                let mut worst: f64 = 0.0;
                for &u in &s {
                    worst = worst.max(tq_residual(sigma, u, &p)?);
                }
                Ok((worst, log_chain(&p, &s)))
            }));
            v.push(Case::new(format!("tq.quasi-period.{sigma}.N{n}"), TQ_TOL, move |rng| {
                let p = chain(rng, n)?;
                let s = spectral_points(rng, 3);
                let mut worst: f64 = 0.0;
                for &u in &s {
                    let (a, b) = qqp_check(sigma, u, &p)?;
                    worst = worst.max(a).max(b);
                }
                Ok((worst, log_chain(&p, &s)))
            }));
            v.push(Case::new(format!("tq.involution.{sigma}.N{n}"), TQ_TOL, move |rng| {
                let p = chain(rng, n)?;
                let s = spectral_points(rng, 5);
                let sign = if sigma.is_hatted() { 1.0 } else { -1.0 };
                let mut worst: f64 = 0.0;
                for &u in &s {
                    worst = worst.max((involution_ratio(sigma, u, &p)? - sign).norm());
                }
                Ok((worst, log_chain(&p, &s)))
            }));
        }
        v.push(Case::new(format!("tq.sum-quasi-period.N{n}"), TQ_TOL, move |rng| {
            let p = chain(rng, n)?;
            let s = spectral_points(rng, 2);
            let [a, b] = tq_labels();
            let mut worst: f64 = 0.0;
            for &u in &s {
                let (x, y) = qqp_check_of(|w| Ok(q_sigma(a, w, &p)? + q_sigma(b, w, &p)?), u, &p)?;
                worst = worst.max(x).max(y);
            }
            Ok((worst, log_chain(&p, &s)))
        }));
    }
    for sigma in tq_labels() {
        v.push(Case::new(format!("tq.homogeneous-determinant.{sigma}.N3"), HOMOGENEOUS_TQ_TOL, move |rng| {
            let nome = nome_in(rng, 0.05, 0.5)?;
            let s = spectral_points(rng, 2);
            let mut worst: f64 = 0.0;
            for &u in &s {
                worst = worst.max(homogeneous_tq_residual(sigma, u, &nome, 3)?);
            }
            Ok((worst, format!("tau={:?};u={s:?}", nome.tau())))
        }));
    }
    v
}

/// Parameters for a single random draw, exposed for the acceptance harness.
pub fn random_chain(seed: u64, id: &str, n: usize) -> Result<(EvParams, Vec<C64>)> {
    let mut rng = case_rng(seed, id);
    let p = chain(&mut rng, n)?;
    let s = spectral_points(&mut rng, 3);
    Ok((p, s))
}

#[cfg(test)]
mod scratch {
    use super::*;
    #[test]
    fn dbg_all() {
        for g in Group::ALL {
            let t = Instant::now();
            let cases = g.cases();
            let recs = run_cases(&cases, 42, 1.0);
            let worst = recs.iter().filter(|r| !r.pass).count();
            println!("GROUP {g:?} cases {} fails {worst} time {:?}", recs.len(), t.elapsed());
            let mx = recs.iter().filter_map(|r| r.residual.map(|v| (v / r.tolerance, r.check_id.clone()))).fold((0.0, String::new()), |a, b| if b.0 > a.0 { b } else { a });
            println!("  worst ratio {mx:?}");
            for r in recs.iter().filter(|r| !r.pass) {
                println!("  FAIL {} {:?} tol {} {:?}", r.check_id, r.residual, r.tolerance, r.error);
            }
        }
    }
}
