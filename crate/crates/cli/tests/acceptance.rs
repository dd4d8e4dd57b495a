//! Acceptance run: one PASS/FAIL line per criterion, at the required tolerances and
//! time limits. Criteria listed in `UNATTAINABLE` are expected to FAIL; the run exits
//! nonzero if any other criterion fails or an unattainable one starts passing.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use ellpf_core::eightvertex::{homogeneous_tq_residual, q_sigma, qqp_check_with, tq_labels, tq_residual};
use ellpf_core::ellpf::SigmaLabel;
use ellpf_core::report::CaseRecord;
use ellpf_core::suites::{random_chain, run_cases, Case, Group, HOMOGENEOUS_TQ_TOL, TQ_TOL};

const SEED: u64 = 42;
/// Criteria whose literal statement does not hold; see the decisions ledger.
const UNATTAINABLE: [usize; 1] = [11];

struct Outcome {
    pass: bool,
    detail: String,
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn summarise(records: &[CaseRecord]) -> Outcome {
    let failed: Vec<&str> = records.iter().filter(|r| !r.pass).map(|r| r.check_id.as_str()).collect();
    let worst = records
        .iter()
        .filter_map(|r| r.residual.map(|x| x / r.tolerance))
        .fold(0.0f64, f64::max);
    let mut detail = format!("{} cases, worst residual/tolerance {worst:.2e}", records.len());
    if !failed.is_empty() {
        detail.push_str(&format!(", failing: {}", failed.join(" ")));
    }
    Outcome { pass: failed.is_empty(), detail }
}

fn run_groups(groups: &[Group]) -> Outcome {
    let cases: Vec<Case> = groups.iter().flat_map(|g| g.cases()).collect();
    summarise(&run_cases(&cases, SEED, 1.0))
}

fn run_filtered(group: Group, prefix: &str) -> Vec<CaseRecord> {
    let cases: Vec<Case> = group.cases().into_iter().filter(|c| c.id.starts_with(prefix)).collect();
    run_cases(&cases, SEED, 1.0)
}

/// The eight-vertex claims exactly as stated: TQ for labels 3 and 3̂, quasi-periodicity
/// with `t^{−2}`, and the third-period homogeneous determinant.
fn literal_eight_vertex() -> Result<Vec<(String, f64, f64)>, ellpf_core::Error> {
    let mut out = Vec::new();
    for sigma in [SigmaLabel::plain(3), SigmaLabel::hat(3)] {
        for n in [1usize, 3, 5] {
            let (p, us) = random_chain(SEED, &format!("acceptance.tq.{sigma}.N{n}"), n)?;
            let worst = us.iter().map(|&u| tq_residual(sigma, u, &p)).collect::<Result<Vec<_>, _>>()?;
            out.push((format!("TQ sigma={sigma} N={n}"), worst.iter().cloned().fold(0.0, f64::max), TQ_TOL));
        }
    }
    for sigma in tq_labels() {
        let (p, us) = random_chain(SEED, &format!("acceptance.qqp.{sigma}"), 3)?;
        let mut worst: f64 = 0.0;
        for &u in &us {
            let (a, b) = qqp_check_with(|w| q_sigma(sigma, w, &p), u, &p, -2)?;
            worst = worst.max(a).max(b);
        }
        out.push((format!("quasi-period t^-2 sigma={sigma} N=3"), worst, TQ_TOL));
    }
    let (p, us) = random_chain(SEED, "acceptance.homogeneous", 3)?;
    let sigma = SigmaLabel::plain(3);
    let mut worst: f64 = 0.0;
    for &u in &us {
        worst = worst.max(homogeneous_tq_residual(sigma, u, p.nome(), 3)?);
    }
    out.push((format!("homogeneous determinant sigma={sigma} N=3"), worst, HOMOGENEOUS_TQ_TOL));
    Ok(out)
}

fn criterion_eleven() -> Outcome {
    let rs = summarise(&run_filtered(Group::EightVertex, "tq.razumov-stroganov"));
    let mut lines = vec![format!("Razumov-Stroganov: {}", rs.detail)];
    let mut pass = rs.pass;
    match literal_eight_vertex() {
        Ok(items) => {
            for (name, r, tol) in items {
                let ok = r < tol;
                pass &= ok;
                lines.push(format!("{name}: residual {r:.2e} vs {tol:.0e} {}", if ok { "ok" } else { "FAILS" }));
            }
        }
        Err(e) => {
            pass = false;
            lines.push(format!("literal evaluation error: {e}"));
        }
    }
    let corrected = run_groups(&[Group::EightVertex]);
    lines.push(format!(
        "corrected claims (labels 1/1h, t^+2, triple-period kernel): {} {}",
        if corrected.pass { "PASS" } else { "FAIL" },
        corrected.detail
    ));
    Outcome { pass, detail: lines.join("\n      ") }
}

fn criterion_twelve() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_ellpf");
    let run = || Command::new(bin).args(["verify", "--suite", "all", "--seed", "42"]).output();
    match (run(), run()) {
        (Ok(a), Ok(b)) => {
            let identical = a.stdout == b.stdout && !a.stdout.is_empty();
            let codes = (a.status.code(), b.status.code());
            Outcome {
                pass: identical && codes == (Some(0), Some(0)),
                detail: format!("{} report bytes, identical: {identical}, exit codes {codes:?}", a.stdout.len()),
            }
        }
        (Err(e), _) | (_, Err(e)) => Outcome { pass: false, detail: format!("cannot run binary: {e}") },
    }
}

fn main() -> ExitCode {
    type Runner = Box<dyn Fn() -> Outcome>;
    let criteria: Vec<(usize, &str, Duration, Runner)> = vec![
        (1, "theta identities", secs(10), Box::new(|| run_groups(&[Group::Theta]))),
        (2, "pfaffian kernel", secs(5), Box::new(|| run_groups(&[Group::Pfaffian]))),
        (3, "Sundquist and pfaffian-Schur identities", secs(5), Box::new(|| run_groups(&[Group::Sympoly]))),
        (4, "twelve-pfaffian core properties", secs(60), Box::new(|| run_groups(&[Group::EllpfCore]))),
        (5, "modular transformations", secs(120), Box::new(|| run_groups(&[Group::Modular]))),
        (6, "half-period shift constants", secs(30), Box::new(|| run_groups(&[Group::Shift]))),
        (7, "Schur, T-lambda and Laurent expansions", secs(60), Box::new(|| run_groups(&[Group::Expansions]))),
        (8, "trigonometric limits", secs(30), Box::new(|| run_groups(&[Group::Trigonometric]))),
        (9, "Hankel limit and Glaisher numbers", secs(60), Box::new(|| run_groups(&[Group::Hankel]))),
        (10, "lattice and three-colour models", secs(180), Box::new(|| run_groups(&[Group::Lattice, Group::ThreeColour]))),
        (11, "eight-vertex TQ equation", secs(180), Box::new(criterion_eleven)),
        (12, "determinism of verify --suite all", secs(900), Box::new(criterion_twelve)),
    ];
    let mut unexpected = Vec::new();
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let pass = outcome.pass && elapsed < limit;
        println!(
            "[{id:>2}] {} {name} ({:.2} s, limit {} s): {}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit.as_secs(),
            outcome.detail
        );
        if pass == UNATTAINABLE.contains(&id) {
            unexpected.push(id);
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: all criteria behaved as expected (known unattainable: {UNATTAINABLE:?})");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected outcome for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}
