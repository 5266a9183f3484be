//! Command-line front end: every pipeline behind one binary, with
//! machine-readable JSON artifacts and human renderings.
//!
//! Exit status: 0 on full success, 2 when a run completes but a property
//! check fails (the JSON failure report is still written), 1 on usage or
//! I/O errors.

use clap::{Parser, Subcommand};
use num_bigint::BigUint;
use redpow::embed::{
    build_table, check_remark1, generate_true_equations, verify_embedding, ElementEnumeration,
    SolutionTable,
};
use redpow::filter::RegularFamily;
use redpow::models::{check_axioms, parse_poly, Model, ModelKind, PolyElem};
use redpow::ordinal::Ordinal;
use redpow::solver::{solve_brute, verify, DioSystem};
use redpow::star::{run_star_construction, StarConfig};
use redpow::syntax::{compute_g, parse_formula, EnumConfig};
use redpow::ufamily::{check_lemma_clauses, UFamily};
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "redpow",
    about = "Solution tables, coherent ordinal families, and witness constructions \
             for embedding integer-polynomial arithmetic into reduced powers of the naturals"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Suppress the human rendering; JSON only.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check the fifteen ordered-semiring axioms on seeded samples.
    Axioms {
        /// Model: nat or poly.
        #[arg(long)]
        model: String,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        /// Seed for the sampler (mandatory: runs must be reproducible).
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a system of equations by bounded lexicographic search.
    Solve {
        /// JSON file: a list of formula strings.
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        bound: u64,
        #[arg(long, default_value_t = 10_000_000)]
        node_limit: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a solution table from an element enumeration.
    Embed {
        /// Model kind (only poly is meaningful here).
        #[arg(long, default_value = "poly")]
        model: String,
        /// JSON file: list of polynomial strings, or "default:<k>" for the
        /// first k elements of the built-in enumeration.
        #[arg(long)]
        elements: String,
        #[arg(long)]
        depth: usize,
        /// Equation stream budget.
        #[arg(long)]
        budget: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify the embedding properties of a built table.
    Verify {
        table: PathBuf,
        /// Also run the divergence check with this bound.
        #[arg(long)]
        remark1_bound: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a table artifact as a grid.
    RenderTable { table: PathBuf },
    /// Materialize the coherent family of an ordinal and check its
    /// properties.
    Ufamily {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 64)]
        n_max: u64,
        /// Run the clause checks (otherwise just print the sets).
        #[arg(long)]
        check: bool,
        /// Comma-separated candidate ordinals for the exhaustion check.
        #[arg(long)]
        candidates: Option<String>,
        /// Search horizon for entry thresholds.
        #[arg(long, default_value_t = 100_000)]
        horizon: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the size budget g(n, m) with its recurrence trace.
    Budget {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        cap: Option<u64>,
        #[arg(long, default_value_t = redpow::syntax::DEFAULT_ENUM_LIMIT)]
        enum_limit: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the componentwise witness construction over an ordinal index
    /// set against a regular family.
    Star {
        /// Comma-separated ordinal notations, e.g. "0,1,2,w,w+1".
        #[arg(long)]
        index: String,
        /// JSON file: map ordinal notation -> polynomial string.
        #[arg(long)]
        assign: PathBuf,
        #[arg(long, default_value_t = 20)]
        n_max: u32,
        #[arg(long, default_value_t = 12)]
        cap: u64,
        /// tails, diagonal, arithmetic:<k>, or custom:<file.json>.
        #[arg(long, default_value = "tails")]
        family: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

#[derive(Serialize)]
struct FailureReport<'a, T: Serialize> {
    ok: bool,
    failures: &'a [String],
    report: &'a T,
}

/// Writes the artifact and returns the exit code: 0 when `failures` is
/// empty, 2 otherwise.
fn finish<T: Serialize>(
    out: Option<PathBuf>,
    quiet: bool,
    human: &str,
    report: &T,
    failures: &[String],
) -> Result<ExitCode, String> {
    let ok = failures.is_empty();
    let wrapped = FailureReport {
        ok,
        failures,
        report,
    };
    let json = serde_json::to_string_pretty(&wrapped).map_err(|e| e.to_string())?;
    match out {
        Some(path) => {
            std::fs::write(&path, json.as_bytes())
                .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            if !quiet && !human.is_empty() {
                println!("{human}");
            }
        }
        None => {
            if !quiet && !human.is_empty() {
                eprintln!("{human}");
            }
            println!("{json}");
        }
    }
    if !ok {
        for f in failures {
            eprintln!("failure: {f}");
        }
    }
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn load_elements(spec: &str) -> Result<ElementEnumeration, String> {
    if let Some(k) = spec.strip_prefix("default:") {
        let k: usize = k.parse().map_err(|e| format!("bad count {k:?}: {e}"))?;
        let model = Model::new(ModelKind::PolySemiring);
        return ElementEnumeration::new(model.enumerate(k)).map_err(|e| e.to_string());
    }
    let text = std::fs::read_to_string(spec).map_err(|e| format!("cannot read {spec}: {e}"))?;
    let strings: Vec<String> = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let elems = strings
        .iter()
        .map(|s| parse_poly(s))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    ElementEnumeration::new(elems).map_err(|e| e.to_string())
}

fn load_family(spec: &str) -> Result<RegularFamily, String> {
    if let Some(path) = spec.strip_prefix("custom:") {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
        let sets = serde_json::from_str(&text).map_err(|e| e.to_string())?;
        return Ok(RegularFamily::Custom { sets });
    }
    RegularFamily::parse(spec)
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    let quiet = cli.quiet;
    match cli.command {
        Command::Axioms {
            model,
            samples,
            seed,
            out,
        } => {
            let kind: ModelKind = model.parse()?;
            let m = Model::new(kind);
            let report = check_axioms(&m, samples, seed);
            let mut failures = Vec::new();
            for r in &report.results {
                if r.passed != r.tested {
                    failures.push(format!(
                        "axiom {} ({}) failed {} of {} instantiations",
                        r.index,
                        r.name,
                        r.tested - r.passed,
                        r.tested
                    ));
                }
            }
            let human = report
                .results
                .iter()
                .map(|r| {
                    format!(
                        "axiom {:>2}: {}/{} pass  {}",
                        r.index, r.passed, r.tested, r.name
                    )
                })
                .collect::<Vec<_>>()
                .join("\n");
            finish(out, quiet, &human, &report, &failures)
        }
        Command::Solve {
            system,
            bound,
            node_limit,
            out,
        } => {
            let text = std::fs::read_to_string(&system)
                .map_err(|e| format!("cannot read {}: {e}", system.display()))?;
            let strings: Vec<String> = serde_json::from_str(&text).map_err(|e| e.to_string())?;
            let eqs = strings
                .iter()
                .map(|s| parse_formula(s))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?;
            let sys = DioSystem::new(eqs).map_err(|e| e.to_string())?;
            let solution = solve_brute(&sys, bound, node_limit).map_err(|e| e.to_string())?;
            #[derive(Serialize)]
            struct SolveOut {
                bound: u64,
                solution: Option<BTreeMap<String, String>>,
                verified: bool,
            }
            let (rendered, verified) = match &solution {
                Some(assignment) => (
                    Some(
                        assignment
                            .iter()
                            .map(|(v, val)| (format!("x{v}"), val.to_string()))
                            .collect::<BTreeMap<_, _>>(),
                    ),
                    verify(&sys, assignment),
                ),
                None => (None, true),
            };
            let human = match &rendered {
                Some(m) => format!("solution: {m:?}"),
                None => format!("no solution with all variables at most {bound}"),
            };
            let failures: Vec<String> = if verified {
                vec![]
            } else {
                vec!["solver output failed verification".into()]
            };
            let report = SolveOut {
                bound,
                solution: rendered,
                verified,
            };
            finish(out, quiet, &human, &report, &failures)
        }
        Command::Embed {
            model,
            elements,
            depth,
            budget,
            out,
        } => {
            let kind: ModelKind = model.parse()?;
            if kind != ModelKind::PolySemiring {
                return Err("embed targets the polynomial model; use --model poly".into());
            }
            let elems = load_elements(&elements)?;
            let cfg = EnumConfig::default();
            let stream =
                generate_true_equations(&elems, budget, &cfg).map_err(|e| e.to_string())?;
            let table = build_table(&elems, &stream, depth).map_err(|e| e.to_string())?;
            let human = format!(
                "built table: {} columns, {} rows, {} equations in the stream",
                table.width,
                table.depth,
                table.equations.len()
            );
            // The table itself is the artifact; verify and render-table
            // consume it unwrapped.
            let json = serde_json::to_string_pretty(&table).map_err(|e| e.to_string())?;
            match out {
                Some(path) => {
                    std::fs::write(&path, json.as_bytes())
                        .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
                    if !quiet {
                        println!("{human}");
                    }
                }
                None => {
                    if !quiet {
                        eprintln!("{human}");
                    }
                    println!("{json}");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            table,
            remark1_bound,
            out,
        } => {
            let text = std::fs::read_to_string(&table)
                .map_err(|e| format!("cannot read {}: {e}", table.display()))?;
            let table: SolutionTable = serde_json::from_str(&text).map_err(|e| e.to_string())?;
            let report = verify_embedding(&table).map_err(|e| e.to_string())?;
            let mut failures = report.failures.clone();
            #[derive(Serialize)]
            struct VerifyOut {
                embedding: redpow::embed::EmbedReport,
                remark1: Option<redpow::embed::Remark1Report>,
            }
            let remark1 = match remark1_bound {
                Some(b) => {
                    let r = check_remark1(&table, &BigUint::from(b)).map_err(|e| e.to_string())?;
                    failures.extend(r.failures.clone());
                    Some(r)
                }
                None => None,
            };
            let human = format!(
                "facts: {} certified; order pairs: {}; distinct pairs: {}",
                report
                    .facts
                    .iter()
                    .filter(|f| f.certificate.is_some())
                    .count(),
                report.order.len(),
                report.injectivity.len()
            );
            let outr = VerifyOut {
                embedding: report,
                remark1,
            };
            finish(out, quiet, &human, &outr, &failures)
        }
        Command::RenderTable { table } => {
            let text = std::fs::read_to_string(&table)
                .map_err(|e| format!("cannot read {}: {e}", table.display()))?;
            let table: SolutionTable = serde_json::from_str(&text).map_err(|e| e.to_string())?;
            print!("{}", table.render());
            Ok(ExitCode::SUCCESS)
        }
        Command::Ufamily {
            alpha,
            n_max,
            check,
            candidates,
            horizon,
            out,
        } => {
            let a = Ordinal::parse(&alpha).map_err(|e| e.to_string())?;
            let mut fam = UFamily::new();
            let mut human = String::new();
            let mut last: Option<std::collections::BTreeSet<Ordinal>> = None;
            for n in 0..=n_max {
                let s = fam.set(&a, n).map_err(|e| e.to_string())?;
                if last.as_ref() != Some(&s) {
                    let shown: Vec<String> = s.iter().map(|o| o.to_string()).collect();
                    human.push_str(&format!("n={n:>3}: {{{}}}\n", shown.join(", ")));
                    last = Some(s);
                }
            }
            if check {
                let cands: Vec<Ordinal> = match candidates {
                    Some(ref cs) => cs
                        .split(',')
                        .map(|s| Ordinal::parse(s.trim()))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|e| e.to_string())?,
                    None => vec![a.clone()],
                };

                let report = check_lemma_clauses(&mut fam, &a, n_max, &cands, horizon)
                    .map_err(|e| e.to_string())?;
                let mut failures = Vec::new();
                if !report.cardinality_ok {
                    failures.push(format!(
                        "cardinality bound fails at stages {:?}",
                        report.cardinality_failures
                    ));
                }
                if !report.nesting_ok {
                    failures.push(format!(
                        "nesting fails at stages {:?}",
                        report.nesting_failures
                    ));
                }
                if !report.coherence_ok {
                    failures.push(format!("coherence fails: {:?}", report.coherence_failures));
                }
                for e in &report.exhaustion {
                    if e.threshold.is_none() {
                        failures.push(format!(
                            "{} not reached within the horizon {horizon}",
                            e.beta
                        ));
                    }
                }
                finish(out, quiet, &human, &report, &failures)
            } else {
                #[derive(Serialize)]
                struct Sets {
                    alpha: String,
                    n_max: u64,
                    sets: Vec<(u64, Vec<String>)>,
                }
                let mut sets = Vec::new();
                for n in 0..=n_max {
                    let s = fam.set(&a, n).map_err(|e| e.to_string())?;
                    sets.push((n, s.iter().map(|o| o.to_string()).collect()));
                }
                let report = Sets {
                    alpha: a.to_string(),
                    n_max,
                    sets,
                };
                finish(out, quiet, &human, &report, &[])
            }
        }
        Command::Budget {
            n,
            m,
            cap,
            enum_limit,
            out,
        } => {
            let cfg = EnumConfig { limit: enum_limit };
            let budget = compute_g(n, m, cap, &cfg).map_err(|e| e.to_string())?;
            let mut human = String::new();
            for step in &budget.steps {
                match step.h_used {
                    None => human.push_str(&format!("g({n},{}) = {}\n", step.m, step.g)),
                    Some(h) => human.push_str(&format!(
                        "g({n},{}) = 2 + {h} * (g({n},{}) + 3) = {}\n",
                        step.m,
                        step.m + 1,
                        step.g
                    )),
                }
            }
            human.push_str(&format!(
                "g({n},{m}) = {}{}",
                budget.value,
                if budget.capped { " (capped)" } else { "" }
            ));
            finish(out, quiet, &human, &budget, &[])
        }
        Command::Star {
            index,
            assign,
            n_max,
            cap,
            family,
            out,
        } => {
            let ordinals = index
                .split(',')
                .map(|s| Ordinal::parse(s.trim()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?;
            let text = std::fs::read_to_string(&assign)
                .map_err(|e| format!("cannot read {}: {e}", assign.display()))?;
            let raw: BTreeMap<String, String> =
                serde_json::from_str(&text).map_err(|e| e.to_string())?;
            let mut assignment: BTreeMap<Ordinal, PolyElem> = BTreeMap::new();
            for (k, v) in &raw {
                let o = Ordinal::parse(k).map_err(|e| e.to_string())?;
                let p = parse_poly(v).map_err(|e| e.to_string())?;
                assignment.insert(o, p);
            }
            let config = StarConfig {
                n_max,
                cap,
                family: load_family(&family)?,
                ..StarConfig::default()
            };
            let run = run_star_construction(&ordinals, &assignment, &config)
                .map_err(|e| e.to_string())?;
            let human = format!(
                "cells: {}; facts: {} ({} certified); recheck {}/{}; unknowns {}",
                run.cells.len(),
                run.facts.len(),
                run.facts.iter().filter(|f| f.certificate.is_some()).count(),
                run.recheck_passed,
                run.recheck_total,
                run.unknown_total
            );
            let failures = run.errors.clone();
            finish(out, quiet, &human, &run, &failures)
        }
    }
}
