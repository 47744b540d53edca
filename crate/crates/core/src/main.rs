//! Command-line front end: deterministic sampling, verification drivers,
//! and report persistence.
//!
//! Structured output is line-delimited JSON, one record per sample or
//! check, written to `--out` when given and to stdout otherwise. The
//! human-readable summary always goes to stderr. Exit codes: 0 all binding
//! checks pass, 1 a binding check failed, 2 configuration or parse error,
//! 3 the input curve is singular (classify only).

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sextics::classify::{
    fake_evidence, strata_table, verify_transport, AutReport, Classifier, ClassifyError,
    EvidenceReport, StrataTable, TransportCase, TransportReport,
};
use sextics::families::{self, FamilyId, FamilyParams};
use sextics::field::{Fe, PrimeField, DEFAULT_PRIME};
use sextics::forms::TernaryForm;
use sextics::groups::{
    rho, verify_presentation, CatalogLabel, PresentationName,
};
use sextics::params::{parse_form, parse_map, parse_params};
use sextics::sample::{self, Rng};

#[derive(Parser)]
#[command(name = "sextics", version, about = "Automorphism-group verification harness for smooth plane sextics over F_p")]
struct Cli {
    /// Field modulus; must be prime with 252 | p - 1.
    #[arg(long, global = true, default_value_t = DEFAULT_PRIME)]
    prime: u64,
    /// Seed for the deterministic sampler.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Samples per branch.
    #[arg(long, global = true, default_value_t = 100)]
    samples: usize,
    /// Write the JSONL report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the verification suite for one result or all of them.
    Verify {
        #[arg(value_enum)]
        target: Target,
    },
    /// Classify one family member given by a parameter file.
    Classify {
        /// Family name, e.g. c1, thm2-special, c1-a4.
        #[arg(long)]
        family: String,
        /// Parameter file: `name = <scalar expression>` lines.
        #[arg(long)]
        params: PathBuf,
        /// Only evaluate and print the branch conditions (no scan).
        #[arg(long)]
        branch: bool,
    },
    /// Test smoothness of a degree-6 form read from a file.
    Smooth {
        #[arg(long)]
        form: PathBuf,
    },
    /// Apply a projective substitution to a form and print the result.
    Transform {
        #[arg(long)]
        form: PathBuf,
        /// Map spec: `diag(a,b,c)` or `[expr X : expr Z : expr Y]`.
        #[arg(long)]
        map: String,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    Fermat,
    Klein,
    Thm1,
    Thm2,
    Thm3,
    Cor312,
    Cor3123,
    All,
}

/// One line of the JSONL report.
#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Record<'a> {
    Group {
        name: &'a str,
        order: usize,
        presentation_ok: bool,
        stabilizer_order: usize,
    },
    Sample {
        check: &'a str,
        seed: u64,
        params: &'a FamilyParams,
        #[serde(flatten)]
        report: &'a AutReport,
    },
    Transport {
        #[serde(flatten)]
        report: &'a TransportReport,
    },
    Evidence {
        #[serde(flatten)]
        report: &'a EvidenceReport,
    },
    Strata {
        #[serde(flatten)]
        report: &'a StrataTable,
    },
}

struct Reporter {
    out: Option<fs::File>,
    lines_to_stdout: bool,
}

impl Reporter {
    fn new(out: &Option<PathBuf>) -> Result<Self, String> {
        match out {
            Some(path) => {
                let f = fs::File::create(path)
                    .map_err(|e| format!("cannot create {}: {e}", path.display()))?;
                Ok(Reporter { out: Some(f), lines_to_stdout: false })
            }
            None => Ok(Reporter { out: None, lines_to_stdout: true }),
        }
    }

    fn emit(&mut self, record: &Record) {
        let line = serde_json::to_string(record).expect("report serialization");
        match &mut self.out {
            Some(f) => writeln!(f, "{line}").expect("report write"),
            None if self.lines_to_stdout => println!("{line}"),
            None => {}
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, String> {
    let field = PrimeField::new(cli.prime).map_err(|e| e.to_string())?;
    if cli.samples == 0 {
        return Err("--samples must be >= 1".into());
    }
    let mut reporter = Reporter::new(&cli.out)?;
    match &cli.cmd {
        Cmd::Verify { target } => cmd_verify(cli, field, *target, &mut reporter),
        Cmd::Classify { family, params, branch } => {
            cmd_classify(field, family, params, *branch, &mut reporter)
        }
        Cmd::Smooth { form } => cmd_smooth(field, form),
        Cmd::Transform { form, map } => cmd_transform(field, form, map),
    }
}

/// Per-branch sampling verdict used by the theorem drivers.
struct BranchOutcome {
    name: String,
    total: usize,
    agree: usize,
    degenerate: usize,
    ok: bool,
}

impl BranchOutcome {
    fn summarize(&self) {
        eprintln!(
            "  {:30} {:4} samples, {:4} agree, {} degenerate (flagged): {}",
            self.name,
            self.total,
            self.agree,
            self.degenerate,
            if self.ok { "ok" } else { "FAIL" }
        );
    }
}

fn sample_branch(
    cl: &Classifier,
    rng: &mut Rng,
    reporter: &mut Reporter,
    seed: u64,
    name: &str,
    id: FamilyId,
    n: usize,
    expect: CatalogLabel,
    mut gen: impl FnMut(&mut Rng) -> FamilyParams,
) -> Result<BranchOutcome, String> {
    let mut agree = 0;
    let mut degenerate = 0;
    let mut total = 0;
    let mut draws = 0;
    while total < n {
        draws += 1;
        if draws > 20 * n {
            return Err(format!("{name}: too many singular draws"));
        }
        let params = gen(rng);
        let report = match cl.classify(id, &params) {
            Err(ClassifyError::NotSmooth) => continue,
            // a stabilizer escaping the catalog closure means the draw hit
            // extra symmetry; flag it like an order > 3 degeneration
            Err(ClassifyError::NotClosed(_)) => {
                total += 1;
                degenerate += 1;
                continue;
            }
            Err(e) => return Err(format!("{name}: {e}")),
            Ok(r) => r,
        };
        total += 1;
        if report.degenerate {
            degenerate += 1;
        } else if report.agrees && report.label == Some(expect) && report.witnesses_ok {
            agree += 1;
        }
        reporter.emit(&Record::Sample { check: name, seed, params: &params, report: &report });
    }
    // binding: every non-degenerate sample agrees and the flagged fraction
    // stays below 5%
    let ok = agree + degenerate == total && 20 * degenerate < total.max(20);
    Ok(BranchOutcome { name: name.into(), total, agree, degenerate, ok })
}

fn verify_groups(
    field: PrimeField,
    which: Target,
    reporter: &mut Reporter,
) -> Result<bool, String> {
    let (name, label, presentation, form, expect) = match which {
        Target::Fermat => (
            "fermat6",
            CatalogLabel::AutFermat6,
            PresentationName::Fermat6,
            families::fermat6(field),
            216,
        ),
        _ => (
            "klein6",
            CatalogLabel::AutKlein6,
            PresentationName::Klein6,
            families::klein6(field),
            63,
        ),
    };
    let group = rho(label, field).map_err(|e| e.to_string())?;
    let presentation_ok = verify_presentation(presentation, field);
    let cat = sextics::classify::CandidateCatalog::new(field);
    let stab = sextics::classify::stabilizer_in_catalog(&form, &cat).map_err(|e| e.to_string())?;
    reporter.emit(&Record::Group {
        name,
        order: group.order(),
        presentation_ok,
        stabilizer_order: stab.order(),
    });
    let ok = group.order() == expect && presentation_ok && stab.order() == expect;
    eprintln!(
        "  {name}: closure order {} (want {expect}), presentation {}, catalog stabilizer {}: {}",
        group.order(),
        if presentation_ok { "ok" } else { "FAIL" },
        stab.order(),
        if ok { "ok" } else { "FAIL" }
    );
    Ok(ok)
}

fn cmd_verify(
    cli: &Cli,
    field: PrimeField,
    target: Target,
    reporter: &mut Reporter,
) -> Result<ExitCode, String> {
    let cl = Classifier::new(field).map_err(|e| e.to_string())?;
    let mut rng = Rng::new(cli.seed);
    let n = cli.samples;
    let mut ok = true;
    let all = target == Target::All;

    if all || target == Target::Fermat {
        eprintln!("fermat sextic:");
        ok &= verify_groups(field, Target::Fermat, reporter)?;
    }
    if all || target == Target::Klein {
        eprintln!("klein sextic:");
        ok &= verify_groups(field, Target::Klein, reporter)?;
    }
    if all || target == Target::Thm1 {
        eprintln!("order-2 families:");
        for o in [
            sample_branch(&cl, &mut rng, reporter, cli.seed, "thm1-generic", FamilyId::Thm1, n,
                CatalogLabel::Rho1Z2, |r| sample::thm1_params(r, field, false))?,
            sample_branch(&cl, &mut rng, reporter, cli.seed, "thm1-even", FamilyId::Thm1Even, n,
                CatalogLabel::Rho1Z2Square, |r| sample::thm1_params(r, field, true))?,
        ] {
            o.summarize();
            ok &= o.ok;
        }
    }
    if all || target == Target::Thm2 {
        eprintln!("homology-of-period-3 families:");
        for o in [
            sample_branch(&cl, &mut rng, reporter, cli.seed, "thm2-generic", FamilyId::Thm2, n,
                CatalogLabel::Rho1Z3, |r| sample::thm2_params(r, field))?,
            sample_branch(&cl, &mut rng, reporter, cli.seed, "thm2-special", FamilyId::Thm2Special, n,
                CatalogLabel::Rho1Z3Square, |r| sample::thm2_special_params(r, field))?,
        ] {
            o.summarize();
            ok &= o.ok;
        }
    }
    if all || target == Target::Thm3 {
        eprintln!("non-homology-of-period-3 branch table:");
        let a4n = n.min(50);
        for o in [
            sample_branch(&cl, &mut rng, reporter, cli.seed, "c1-generic", FamilyId::C1, n,
                CatalogLabel::Rho2Z3, |r| sample::c1_generic_params(r, field))?,
            sample_branch(&cl, &mut rng, reporter, cli.seed, "c1-branch-i", FamilyId::C1, n,
                CatalogLabel::Rho1Z3Square, |r| sample::c1_branch_i_params(r, field))?,
            sample_branch(&cl, &mut rng, reporter, cli.seed, "c1-branch-ii", FamilyId::C1, n,
                CatalogLabel::Rho2S3, |r| sample::c1_branch_ii_params(r, field))?,
            sample_branch(&cl, &mut rng, reporter, cli.seed, "c1-branch-iii", FamilyId::C1, n,
                CatalogLabel::Rho2Z3Square, |r| sample::c1_branch_iii_params(r, field))?,
            sample_branch(&cl, &mut rng, reporter, cli.seed, "c1-prime-s3", FamilyId::C1Prime, n,
                CatalogLabel::Rho2S3, |r| sample::c1_prime_params(r, field, false))?,
            sample_branch(&cl, &mut rng, reporter, cli.seed, "c1-prime-semidirect", FamilyId::C1Prime, n,
                CatalogLabel::Rho1Z3SemiS3, |r| sample::c1_prime_params(r, field, true))?,
            sample_branch(&cl, &mut rng, reporter, cli.seed, "c1-double-prime", FamilyId::C1DoublePrime, n,
                CatalogLabel::Rho2Z3Square, |r| sample::c1_double_prime_params(r, field))?,
            sample_branch(&cl, &mut rng, reporter, cli.seed, "c1-a4", FamilyId::C1A4, a4n,
                CatalogLabel::Rho1A4, |r| sample::a4_params(r, field, false))?,
            sample_branch(&cl, &mut rng, reporter, cli.seed, "c2-generic", FamilyId::C2, n,
                CatalogLabel::Rho2Z3, |r| sample::c2_generic_params(r, field))?,
            sample_branch(&cl, &mut rng, reporter, cli.seed, "c2-branch-i", FamilyId::C2, n,
                CatalogLabel::Rho2Z3Square, |r| sample::c2_branch_i_params(r, field))?,
            sample_branch(&cl, &mut rng, reporter, cli.seed, "c2-a4", FamilyId::C2A4, a4n,
                CatalogLabel::Rho1A4, |r| sample::a4_params(r, field, true))?,
        ] {
            o.summarize();
            ok &= o.ok;
        }
    }
    if all || target == Target::Cor3123 {
        eprintln!("transport identities:");
        let mut binding = true;
        let mut diagnostic_mismatch = 0usize;
        for _ in 0..n.min(50) {
            let FamilyParams::A4 { lambda, mu } = sample::a4_params(&mut rng, field, true) else {
                unreachable!()
            };
            for case in [TransportCase::C1A4, TransportCase::C2A4, TransportCase::Cor3123] {
                let rep = verify_transport(case, field, lambda, mu).map_err(|e| e.to_string())?;
                binding &= rep.invariance_ok && rep.core_ok;
                if !rep.proportional {
                    diagnostic_mismatch += 1;
                }
                reporter.emit(&Record::Transport { report: &rep });
            }
        }
        eprintln!(
            "  invariance + core binding: {}; coefficient-formula mismatches: {} (diagnostic, localized in report)",
            if binding { "ok" } else { "FAIL" },
            diagnostic_mismatch
        );
        ok &= binding;
        eprintln!("strata table:");
        let table = strata_table(&cl, &mut rng).map_err(|e| e.to_string())?;
        let counts = table.component_counts();
        let expected: BTreeMap<&str, usize> = [
            ("Z/2", 1), ("(Z/2)^2", 1), ("Z/3", 2), ("(Z/3)^2", 2),
            ("S3", 1), ("Z/3:S3", 1), ("A4", 1),
        ]
        .into();
        let strata_ok =
            counts == expected && table.rows.iter().all(|r| r.components_non_conjugate);
        reporter.emit(&Record::Strata { report: &table });
        eprintln!("  component counts {counts:?}: {}", if strata_ok { "ok" } else { "FAIL" });
        ok &= strata_ok;
    }
    if all || target == Target::Cor312 {
        eprintln!("fake-component evidence:");
        let rep = fake_evidence(&cl, &mut rng, n.min(20)).map_err(|e| e.to_string())?;
        reporter.emit(&Record::Evidence { report: &rep });
        eprintln!(
            "  vertices on C2 curves: {}; vertex off C1'' curves: {}; labels match: {}",
            rep.c2_vertices_on_curve,
            rep.c1dp_vertex_off_curve,
            rep.z3sq_fingerprints_match && rep.z3_fingerprints_match
        );
        ok &= rep.pass;
    }
    eprintln!("overall: {}", if ok { "ok" } else { "FAIL" });
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn take(map: &mut BTreeMap<String, Fe>, key: &str) -> Fe {
    map.remove(key).unwrap_or(Fe(0))
}

fn take_vec(map: &mut BTreeMap<String, Fe>, prefix: &str, len: usize) -> Vec<Fe> {
    (0..len)
        .map(|i| take(map, &format!("{prefix}{i}")))
        .collect()
}

/// Builds the family's parameter record from a name -> scalar map. Binary
/// form coefficients use indexed names (`l6_0` for `X^6` down to `l6_6`
/// for `Y^6`); absent names default to zero.
fn params_from_map(
    id: FamilyId,
    mut map: BTreeMap<String, Fe>,
) -> Result<FamilyParams, String> {
    let params = match id {
        FamilyId::Thm1 | FamilyId::Thm1Even => FamilyParams::Thm1 {
            l2: take_vec(&mut map, "l2_", 3),
            l4: take_vec(&mut map, "l4_", 5),
            l6: take_vec(&mut map, "l6_", 7),
        },
        FamilyId::Thm2 => FamilyParams::Thm2 {
            l3: take_vec(&mut map, "l3_", 4),
            l6: take_vec(&mut map, "l6_", 7),
        },
        FamilyId::Thm2Special => FamilyParams::Thm2Special {
            a30: take(&mut map, "a30"),
            a03: take(&mut map, "a03"),
            a33: take(&mut map, "a33"),
        },
        FamilyId::C1 => FamilyParams::C1 {
            a41: take(&mut map, "a41"),
            a14: take(&mut map, "a14"),
            a11: take(&mut map, "a11"),
            a22: take(&mut map, "a22"),
            a33: take(&mut map, "a33"),
            a30: take(&mut map, "a30"),
            a03: take(&mut map, "a03"),
        },
        FamilyId::C2 => FamilyParams::C2 {
            a32: take(&mut map, "a32"),
            a13: take(&mut map, "a13"),
            a21: take(&mut map, "a21"),
            a24: take(&mut map, "a24"),
            a02: take(&mut map, "a02"),
            a40: take(&mut map, "a40"),
        },
        FamilyId::C1Prime => FamilyParams::C1Prime {
            a41: take(&mut map, "a41"),
            a33: take(&mut map, "a33"),
            a22: take(&mut map, "a22"),
            a12: take(&mut map, "a12"),
            a03: take(&mut map, "a03"),
        },
        FamilyId::C1DoublePrime => FamilyParams::C1DoublePrime {
            ell: take(&mut map, "ell").0 as u8,
            a11: take(&mut map, "a11"),
            a30: take(&mut map, "a30"),
        },
        FamilyId::C1A4 | FamilyId::C2A4 => FamilyParams::A4 {
            lambda: take(&mut map, "lambda"),
            mu: take(&mut map, "mu"),
        },
        FamilyId::Fermat6 | FamilyId::Klein6 => FamilyParams::None,
    };
    if let Some(key) = map.keys().next() {
        return Err(format!("unknown parameter {key:?} for family {}", id.name()));
    }
    Ok(params)
}

fn cmd_classify(
    field: PrimeField,
    family: &str,
    params_path: &PathBuf,
    branch_only: bool,
    reporter: &mut Reporter,
) -> Result<ExitCode, String> {
    let id = FamilyId::from_name(family)
        .ok_or_else(|| format!("unknown family {family:?}"))?;
    let text = fs::read_to_string(params_path)
        .map_err(|e| format!("cannot read {}: {e}", params_path.display()))?;
    let map = parse_params(field, &text).map_err(|e| e.to_string())?;
    let params = params_from_map(id, map)?;
    if branch_only {
        let report = families::branch_conditions(id, &params, field);
        println!("{}", serde_json::to_string(&report).expect("serialization"));
        return Ok(ExitCode::SUCCESS);
    }
    let cl = Classifier::new(field).map_err(|e| e.to_string())?;
    match cl.classify(id, &params) {
        Ok(report) => {
            reporter.emit(&Record::Sample { check: "classify", seed: 0, params: &params, report: &report });
            eprintln!(
                "family {}: label {:?}, predicted {}, order {}, agrees {}",
                id.name(),
                report.label,
                report.predicted,
                report.order,
                report.agrees
            );
            Ok(ExitCode::SUCCESS)
        }
        Err(ClassifyError::NotSmooth) => {
            eprintln!("family {}: the curve is singular", id.name());
            Ok(ExitCode::from(3))
        }
        Err(e) => Err(e.to_string()),
    }
}

fn read_form(field: PrimeField, path: &PathBuf) -> Result<TernaryForm, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_form(field, 6, text.trim()).map_err(|e| e.to_string())
}

fn cmd_smooth(field: PrimeField, path: &PathBuf) -> Result<ExitCode, String> {
    let form = read_form(field, path)?;
    println!("smooth: {}", families::is_smooth(&form));
    Ok(ExitCode::SUCCESS)
}

fn cmd_transform(field: PrimeField, path: &PathBuf, map_spec: &str) -> Result<ExitCode, String> {
    let form = read_form(field, path)?;
    let map = parse_map(field, map_spec).map_err(|e| e.to_string())?;
    let image = form.substitute(&map);
    println!("{image}");
    if let Some(scalar) = image.proportional(&form) {
        eprintln!("proportional to the input with scalar {scalar}");
    }
    Ok(ExitCode::SUCCESS)
}
