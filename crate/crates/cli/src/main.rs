//! `endocalc`: command-line access to the relation calculus.
//!
//! Exit codes: 0 when the verdict holds, 1 when it fails, 2 on usage, parse
//! or engine errors.

use std::fs;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use endocalc_core::harness::{self, json as enc};
use endocalc_core::invariance::{commutes, invariance, CommutationKind, InvarianceMode};
use endocalc_core::prering::{global_domain, global_katakernel, RingPresentation};
use endocalc_core::structure::{decompose_lines, find_lines, zilber_field, FieldFailure, FieldOutcome};
use endocalc_core::workspace::{parse_vectors, parse_workspace, Workspace};
use endocalc_core::{BiRelation, Caps, Subgroup};

#[derive(Parser)]
#[command(name = "endocalc", version, about = "Endogenies and quasi-endomorphisms of finitely generated abelian groups")]
struct Cli {
    /// Workspace file declaring groups, relations and rings.
    #[arg(long, global = true)]
    workspace: Option<String>,
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Number of random trials; defaults to each suite's own count.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Word bound for slice enumeration.
    #[arg(long, global = true, default_value_t = 4)]
    bound: usize,
    /// Print JSON instead of a text summary.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide a commutation or invariance predicate.
    Check {
        /// sharp | flat | invariant:weak | invariant:almost | invariant:strict
        #[arg(long)]
        predicate: String,
        /// Generators of the subgroup for invariance predicates, e.g. `[[1,0]]`.
        #[arg(long)]
        subgroup: Option<String>,
        /// Relations or rings; two for commutation, any number for invariance.
        names: Vec<String>,
    },
    /// Global katakernel of a ring.
    Katakernel { ring: String },
    /// Global domain of a near-ring.
    Domain { ring: String },
    /// Minimal infinite images of a ring.
    Lines { ring: String },
    /// Decompose the ambient group along lines of the first ring.
    Decompose { gamma: String, delta: String },
    /// Reconstruct a finite field from commuting automorphisms.
    Zilber { group: String, generators: Vec<String> },
    /// Run lemma suites; all of them when none is named.
    Lemmas { suites: Vec<String> },
}

struct Outcome {
    holds: bool,
    report: Value,
    summary: String,
}

fn load(path: &Option<String>) -> Result<Workspace, String> {
    let path = path.as_ref().ok_or_else(|| String::from("this command needs --workspace PATH"))?;
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
    let mut ws = parse_workspace(&text)
        .map_err(|diags| diags.iter().map(|d| format!("{path}: {d}")).collect::<Vec<_>>().join("\n"))?;
    ws.source_path = Some(path.clone());
    Ok(ws)
}

fn ring<'a>(ws: &'a Workspace, name: &str) -> Result<&'a RingPresentation, String> {
    ws.rings.get(name).map(|r| &r.ring).ok_or_else(|| format!("unknown ring `{name}`"))
}

fn relations(ws: &Workspace, name: &str) -> Result<Vec<BiRelation>, String> {
    ws.relations_named(name).ok_or_else(|| format!("unknown relation or ring `{name}`"))
}

fn engine<T>(r: endocalc_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn check(ws: &Workspace, predicate: &str, subgroup: &Option<String>, names: &[String]) -> Result<Outcome, String> {
    let kind = match predicate {
        "sharp" => Some(CommutationKind::Sharp),
        "flat" => Some(CommutationKind::Flat),
        _ => None,
    };
    if let Some(kind) = kind {
        let [x, y] = names else {
            return Err(String::from("commutation predicates take exactly two names"));
        };
        let (xs, ys) = (relations(ws, x)?, relations(ws, y)?);
        for (i, p) in xs.iter().enumerate() {
            for (j, q) in ys.iter().enumerate() {
                let v = engine(commutes(p, q, kind))?;
                if !v.holds {
                    let witness = v.witness.as_ref().map(|(a, b)| enc::pair(a, b));
                    return Ok(Outcome {
                        holds: false,
                        summary: format!("{predicate}: fails for generators {i} and {j}"),
                        report: json!({
                            "predicate": predicate,
                            "holds": false,
                            "pair": [i, j],
                            "witness": witness,
                            "failed_clause": v.failed_clause,
                        }),
                    });
                }
            }
        }
        return Ok(Outcome {
            holds: true,
            summary: format!("{predicate}: holds"),
            report: json!({ "predicate": predicate, "holds": true, "witness": null }),
        });
    }
    let mode = match predicate {
        "invariant:weak" => InvarianceMode::Weak,
        "invariant:almost" => InvarianceMode::Almost,
        "invariant:strict" => InvarianceMode::Invariant,
        other => return Err(format!("unknown predicate `{other}`")),
    };
    let literal = subgroup.as_ref().ok_or_else(|| String::from("invariance predicates need --subgroup"))?;
    let first = names.first().ok_or_else(|| String::from("name at least one relation or ring"))?;
    let a = ws.group_of(first).ok_or_else(|| format!("unknown relation or ring `{first}`"))?;
    let gens: Vec<BiRelation> = names.iter().map(|n| relations(ws, n)).collect::<Result<Vec<_>, _>>()?.concat();
    let b = engine(Subgroup::generated(a, &parse_vectors(literal)?))?;
    let report = engine(invariance(&b, &gens, mode))?;
    let failure = report.first_failure();
    Ok(Outcome {
        holds: report.holds,
        summary: match failure {
            Some(f) => format!("{predicate}: fails for generator {}", f.generator),
            None => format!("{predicate}: holds"),
        },
        report: json!({
            "predicate": predicate,
            "holds": report.holds,
            "subgroup": enc::subgroup(&b),
            "generator": failure.map(|f| f.generator),
            "witness": failure.and_then(|f| f.witness.as_ref()).map(|(a, b)| enc::pair(a, b)),
        }),
    })
}

fn field_report(outcome: &FieldOutcome) -> (bool, Value, String) {
    let header = "A0 = 0 and G0 = kernel of the action";
    match outcome {
        FieldOutcome::Field(t) => (
            true,
            json!({
                "assumptions": header,
                "field": true,
                "order": t.order,
                "zero": t.zero,
                "one": t.one,
                "generator_indices": t.generator_indices,
                "base_point": enc::vector(&t.base_point),
                "module_iso": t.module_iso.iter().map(|v| enc::vector(v)).collect::<Vec<_>>(),
                "add_table": t.add_table,
                "mul_table": t.mul_table,
                "axioms_hold": t.satisfies_field_axioms(),
                "intertwines": t.intertwines(),
            }),
            format!("field of order {}", t.order),
        ),
        FieldOutcome::Failure(f) => {
            let (reason, detail) = match f {
                FieldFailure::NotMinimal { subgroup } => {
                    ("not_minimal", json!({ "subgroup": subgroup.iter().map(|v| enc::vector(v)).collect::<Vec<_>>() }))
                }
                FieldFailure::ZeroDivisor { element } => ("zero_divisor", json!({ "element": element })),
                FieldFailure::Noncommutative { left, right } => {
                    ("noncommutative", json!({ "left": left, "right": right }))
                }
                FieldFailure::NotCyclicModule => ("not_cyclic_module", Value::Null),
            };
            (
                false,
                json!({ "assumptions": header, "field": false, "reason": reason, "detail": detail }),
                format!("no field: {reason}"),
            )
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome, String> {
    let caps = engine(Caps::from_env())?;
    let bound = cli.bound;
    match &cli.command {
        Command::Lemmas { suites } => {
            let names: Vec<String> = if suites.is_empty() {
                harness::suite_names().into_iter().map(String::from).collect()
            } else {
                suites.clone()
            };
            let mut reports = Vec::new();
            let mut lines = Vec::new();
            let mut holds = true;
            for name in &names {
                let trials = cli.trials.or_else(|| harness::default_trials(name)).unwrap_or(0);
                let r = engine(harness::run_suite(name, cli.seed, trials, &caps))?;
                holds &= r.as_expected();
                lines.push(format!(
                    "{:<36} {:<4} checks={} failures={} expectation={:?}",
                    r.suite_name,
                    if r.as_expected() { "ok" } else { "FAIL" },
                    r.checks,
                    r.failures.len(),
                    r.expectation
                ));
                reports.push(serde_json::from_str::<Value>(&harness::emit_report(&r)).expect("report is JSON"));
            }
            let report = if reports.len() == 1 { reports.remove(0) } else { Value::Array(reports) };
            Ok(Outcome { holds, report, summary: lines.join("\n") })
        }
        Command::Check { predicate, subgroup, names } => check(&load(&cli.workspace)?, predicate, subgroup, names),
        Command::Katakernel { ring: name } => {
            let ws = load(&cli.workspace)?;
            let k = engine(global_katakernel(ring(&ws, name)?, &caps))?;
            let order = k.order().map(|o| o.to_string()).unwrap_or_else(|| "infinite".into());
            Ok(Outcome {
                holds: true,
                summary: format!("katakernel of {name}: order {order}, generators {}", enc::subgroup(&k)),
                report: json!({ "ring": name, "katakernel": enc::subgroup(&k), "order": k.order().map(|o| enc::int(&o)) }),
            })
        }
        Command::Domain { ring: name } => {
            let ws = load(&cli.workspace)?;
            let d = engine(global_domain(ring(&ws, name)?, bound, &caps))?;
            let index = enc::index(&d.domain.index());
            Ok(Outcome {
                holds: true,
                summary: format!(
                    "domain of {name} at bound {bound}: index {index}, {}",
                    if d.exact { "exact" } else { "approximate" }
                ),
                report: json!({
                    "ring": name,
                    "bound": bound,
                    "domain": enc::subgroup(&d.domain),
                    "index": index,
                    "exact": d.exact,
                    "chain": d.chain.iter().map(enc::subgroup).collect::<Vec<_>>(),
                }),
            })
        }
        Command::Lines { ring: name } => {
            let ws = load(&cli.workspace)?;
            let certs = engine(find_lines(ring(&ws, name)?, bound, &caps))?;
            let lines: Vec<Value> = certs
                .iter()
                .map(|c| {
                    json!({
                        "line": enc::subgroup(&c.line),
                        "rank": c.line.rank(),
                        "witness": enc::relation(&c.witness),
                        "slice_bound": c.slice_bound,
                        "contained_images_checked": c.contained_images_checked,
                    })
                })
                .collect();
            Ok(Outcome {
                holds: true,
                summary: format!("{} line(s) of {name} at bound {bound}", certs.len()),
                report: json!({ "ring": name, "bound": bound, "lines": lines }),
            })
        }
        Command::Decompose { gamma, delta } => {
            let ws = load(&cli.workspace)?;
            let r = engine(decompose_lines(ring(&ws, gamma)?, ring(&ws, delta)?, bound, &caps))?;
            let subs = |v: &[Subgroup]| v.iter().map(enc::subgroup).collect::<Vec<_>>();
            Ok(Outcome {
                holds: r.holds(),
                summary: format!(
                    "{} line(s); {}",
                    r.lines.len(),
                    if r.holds() { "decomposition holds" } else { "decomposition incomplete or failing" }
                ),
                report: json!({
                    "gamma": gamma,
                    "delta": delta,
                    "bound": bound,
                    "holds": r.holds(),
                    "complete": r.is_complete(),
                    "lines": subs(&r.lines),
                    "line_torsion": subs(&r.line_torsion),
                    "projections": r.projections.iter().map(enc::relation).collect::<Vec<_>>(),
                    "residual": enc::subgroup(&r.residual),
                    "blocking_residual": r.blocking_residual.as_ref().map(enc::subgroup),
                    "bikatakernel": enc::subgroup(&r.bikatakernel),
                    "bikatakernel_bound": enc::subgroup(&r.bikatakernel_bound),
                    "sum_has_finite_index": r.sum_has_finite_index,
                    "lines_almost_independent": r.lines_almost_independent,
                    "projections_idempotent": r.projections_idempotent,
                    "projections_separate": r.projections_separate,
                    "bikatakernel_contained": r.bikatakernel_contained,
                    "flat_with_delta": r.flat_with_delta,
                }),
            })
        }
        Command::Zilber { group, generators } => {
            let ws = load(&cli.workspace)?;
            let a = ws.groups.get(group).ok_or_else(|| format!("unknown group `{group}`"))?;
            let gens: Vec<BiRelation> =
                generators.iter().map(|n| relations(&ws, n)).collect::<Result<Vec<_>, _>>()?.concat();
            let (holds, report, summary) = field_report(&engine(zilber_field(a, &gens, &caps))?);
            Ok(Outcome { holds, report, summary })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.report).expect("plain data serializes"));
            } else {
                println!("{}", out.summary);
            }
            if out.holds {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
