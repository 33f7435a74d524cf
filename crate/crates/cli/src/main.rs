//! `cellsat`: command-line front end for the CNF to cellular automaton
//! reduction.
//!
//! Exit codes: 0 for success or an affirmative verdict, 1 for a negative
//! verdict, 2 for usage and input errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use cellsat_core::analysis::{
    class_injective, class_injective_bruteforce, decide_injectivity, decompose, ConfigSampler,
    Injectivity, BRUTEFORCE_MAX_CELLS,
};
use cellsat_core::inverse::{
    build_refutation, verify_refutation, CheckMode, Refutation, RefutationVerdict, Rejection,
    DEFAULT_EXHAUSTIVE_BUDGET, DEFAULT_SAMPLES,
};
use cellsat_core::table::{encoded_len, row_count, DEFAULT_ROW_BUDGET};
use cellsat_core::translate::{pw_translate, size_depth_scan, Delta0, Env};
use cellsat_core::{
    build_table, gen_onto_php, gen_weak_php, parse_dimacs, witness_pair, Assignment, CaTable,
    CnfFormula, Color, Configuration, Error, FormulaAutomaton, RedReason,
};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

const DEFAULT_SEED: u64 = 0x5eed_2024;

#[derive(Parser)]
#[command(
    name = "cellsat",
    version,
    about = "CNF formulas as two-dimensional cellular automata"
)]
struct Cli {
    /// Write a JSON report of the run to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Summarize the automaton of a CNF and optionally write its transition table.
    Compile {
        cnf: PathBuf,
        /// Materialize the table and write it in binary form.
        #[arg(long)]
        emit_table: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_ROW_BUDGET)]
        row_budget: u64,
    },
    /// Print the computation table of an assignment.
    Table {
        cnf: PathBuf,
        /// Bits `a_1 .. a_m`, e.g. `011`.
        #[arg(long)]
        assignment: String,
        /// Also print the aligned grid.
        #[arg(long)]
        grid: bool,
    },
    /// Apply the automaton once and print the image.
    Step {
        cnf: PathBuf,
        config: PathBuf,
        /// Use a binary table written by `compile --emit-table` instead of the rules.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Print the colour of every cell.
    Color { cnf: PathBuf, config: PathBuf },
    /// Split the successor graph into chains, the blue cycle and isolated cells.
    Decompose { cnf: PathBuf, config: PathBuf },
    /// Decide injectivity; exits 1 when the automaton is not injective.
    Decide {
        cnf: PathBuf,
        /// Write the colliding pair here when one exists.
        #[arg(long)]
        witness_dir: Option<PathBuf>,
    },
    /// Write two distinct configurations with the same image.
    Witness {
        cnf: PathBuf,
        #[arg(long)]
        assignment: String,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Compare the red-cell criterion with brute-force class enumeration.
    Oracle {
        cnf: PathBuf,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Build a refutation file for an unsatisfiable CNF; exits 1 if satisfiable.
    Invert {
        cnf: PathBuf,
        #[arg(long)]
        refutation: PathBuf,
    },
    /// Check a refutation file against a CNF; exits 1 on rejection.
    Verify {
        cnf: PathBuf,
        refutation: PathBuf,
        #[command(flatten)]
        sampling: Sampling,
        /// Enumerate all configurations when their count is within this budget.
        #[arg(long, default_value_t = DEFAULT_EXHAUSTIVE_BUDGET)]
        exhaustive_budget: u64,
    },
    /// Print a pigeonhole CNF. Pigeon `i` in hole `j` (both from 0) is variable `i*k + j + 1`.
    Phpgen {
        k: usize,
        /// Omit the functionality and onto clauses.
        #[arg(long)]
        weak: bool,
        /// Write to a file instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Translate a bounded formula given as an S-expression into propositional form.
    Translate {
        formula: String,
        /// Variable bindings `name=value`.
        #[arg(long = "let", value_parser = parse_binding)]
        bindings: Vec<(String, u64)>,
        /// Report size and depth for `VAR` over `FROM..=TO` instead.
        #[arg(long, num_args = 3, value_names = ["VAR", "FROM", "TO"])]
        scan: Option<Vec<String>>,
    },
    /// Size table of the inverse construction on the pigeonhole family.
    Sizes {
        #[arg(long, default_value_t = 4)]
        k_max: usize,
    },
}

#[derive(Args)]
struct Sampling {
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

fn parse_binding(s: &str) -> Result<(String, u64), String> {
    let (k, v) = s.split_once('=').ok_or("expected name=value")?;
    Ok((
        k.to_string(),
        v.parse().map_err(|_| format!("invalid value `{v}`"))?,
    ))
}

struct Outcome {
    code: u8,
    report: Value,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Outcome { code: 0, report }
    }

    fn verdict(affirmative: bool, report: Value) -> Self {
        Outcome {
            code: if affirmative { 0 } else { 1 },
            report,
        }
    }
}

fn read_cnf(path: &Path) -> Result<CnfFormula> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_dimacs(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_config(path: &Path) -> Result<Configuration> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Configuration::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn automaton_for(cnf: &Path, config: &Path) -> Result<(FormulaAutomaton, Configuration)> {
    let aut = FormulaAutomaton::new(&read_cnf(cnf)?);
    let c = read_config(config)?;
    aut.check_dims(&c)?;
    Ok((aut, c))
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn to_json(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

fn run(cmd: Cmd) -> Result<Outcome> {
    match cmd {
        Cmd::Compile {
            cnf,
            emit_table,
            row_budget,
        } => {
            let phi = read_cnf(&cnf)?;
            let aut = FormulaAutomaton::new(&phi);
            let states = aut.states();
            let (n, m) = aut.dims();
            let rows = row_count(states.len());
            let bits = encoded_len(states);
            println!("clauses {} (normalized {n}), variables {m}", phi.n());
            println!("states {} ({} bits each)", states.len(), states.width());
            println!(
                "table rows {}",
                rows.map_or("overflow".into(), |r| r.to_string())
            );
            println!(
                "encoded bits {}",
                bits.map_or("overflow".into(), |b| b.to_string())
            );
            println!("state digest {}", states.digest());
            if let Some(path) = &emit_table {
                let table = CaTable::materialize(&aut, row_budget)?;
                let mut buf = Vec::new();
                table.write_to(&mut buf)?;
                write(path, buf)?;
                println!("table written to {}", path.display());
            }
            Ok(Outcome::ok(json!({
                "clauses": phi.n(),
                "n": n,
                "m": m,
                "states": states.len(),
                "width": states.width(),
                "rows": rows,
                "encoded_bits": bits,
                "digest": states.digest(),
                "table_file": emit_table,
            })))
        }
        Cmd::Table {
            cnf,
            assignment,
            grid,
        } => {
            let phi = read_cnf(&cnf)?.normalize_odd();
            let a: Assignment = assignment.parse()?;
            let t = build_table(&phi, &a)?;
            let sat = phi.is_satisfied(&a)?;
            print!("{}", t.to_text());
            if grid {
                print!("{}", t.to_grid());
            }
            Ok(Outcome::ok(
                json!({ "assignment": a.to_string(), "satisfied": sat, "config": t.to_text() }),
            ))
        }
        Cmd::Step { cnf, config, table } => {
            let (aut, c) = automaton_for(&cnf, &config)?;
            let img = match &table {
                Some(path) => {
                    let bytes =
                        fs::read(path).with_context(|| format!("reading {}", path.display()))?;
                    let t = CaTable::read_from(bytes.as_slice())?;
                    if t.states().digest() != aut.states().digest() {
                        bail!(
                            "table {} was compiled for a different formula shape",
                            path.display()
                        );
                    }
                    t.step(&c)?
                }
                None => aut.step(&c)?,
            };
            print!("{}", img.to_text());
            Ok(Outcome::ok(
                json!({ "via_table": table.is_some(), "config": img.to_text() }),
            ))
        }
        Cmd::Color { cnf, config } => {
            let (aut, c) = automaton_for(&cnf, &config)?;
            let colors = aut.colors(&c);
            let mut cells = Vec::new();
            for (p, col) in c.positions().zip(&colors) {
                let tag = match col {
                    Color::Blue => "blue".to_string(),
                    Color::Red(RedReason::Violates(rule)) => format!("red (rule {rule})"),
                    Color::Red(RedReason::OutputZero) => "red (output 0)".to_string(),
                };
                println!("{} {} {}", p.i, p.j, tag);
                cells.push(json!({ "cell": p, "color": col }));
            }
            let blue = colors.iter().filter(|c| c.is_blue()).count();
            println!("blue {blue}, red {}", colors.len() - blue);
            Ok(Outcome::ok(
                json!({ "blue": blue, "red": colors.len() - blue, "cells": cells }),
            ))
        }
        Cmd::Decompose { cnf, config } => {
            let (aut, c) = automaton_for(&cnf, &config)?;
            let d = decompose(&aut, &c)?;
            let path = |cs: &[cellsat_core::Coord]| {
                cs.iter()
                    .map(|p| p.to_string())
                    .collect::<Vec<_>>()
                    .join(" -> ")
            };
            for ch in &d.chains {
                println!("chain {}", path(ch));
            }
            if let Some(cy) = &d.cycle {
                println!("cycle of length {}: {}", cy.len(), path(cy));
            }
            for p in &d.isolated {
                println!("isolated {p}");
            }
            println!("blue {}, red {}", d.blue_count(), d.red_count());
            Ok(Outcome::ok(to_json(&d)))
        }
        Cmd::Decide { cnf, witness_dir } => {
            let phi = read_cnf(&cnf)?;
            match decide_injectivity(&phi)? {
                Injectivity::Injective => {
                    println!("injective (formula unsatisfiable)");
                    Ok(Outcome::verdict(true, json!({ "verdict": "injective" })))
                }
                Injectivity::NonInjective {
                    assignment,
                    witness,
                } => {
                    println!("not injective: satisfied by {assignment}");
                    let files = match &witness_dir {
                        Some(dir) => Some(write_pair(dir, &witness.0, &witness.1)?),
                        None => None,
                    };
                    Ok(Outcome::verdict(
                        false,
                        json!({ "verdict": "non-injective", "assignment": assignment.to_string(), "witness_files": files }),
                    ))
                }
            }
        }
        Cmd::Witness {
            cnf,
            assignment,
            out_dir,
        } => {
            let phi = read_cnf(&cnf)?;
            let a: Assignment = assignment.parse()?;
            let (c1, c2) = match witness_pair(&phi, &a) {
                Ok(pair) => pair,
                Err(Error::NotSatisfying(a)) => {
                    println!("assignment {a} does not satisfy the formula; no witness");
                    return Ok(Outcome::verdict(
                        false,
                        json!({ "assignment": a, "collision": false }),
                    ));
                }
                Err(e) => return Err(e.into()),
            };
            let aut = FormulaAutomaton::new(&phi);
            let (i1, i2) = (aut.step(&c1)?, aut.step(&c2)?);
            let collides = c1 != c2 && i1 == i2;
            let files = write_pair(&out_dir, &c1, &c2)?;
            println!(
                "{}",
                if collides {
                    "verified collision"
                } else {
                    "pair does not collide"
                }
            );
            Ok(Outcome::verdict(
                collides,
                json!({ "assignment": a.to_string(), "collision": collides, "files": files }),
            ))
        }
        Cmd::Oracle { cnf, sampling } => {
            let aut = FormulaAutomaton::new(&read_cnf(&cnf)?);
            if aut.cells() > BRUTEFORCE_MAX_CELLS {
                bail!(
                    "{} cells exceed the brute-force limit of {BRUTEFORCE_MAX_CELLS}",
                    aut.cells()
                );
            }
            println!("seed {}", sampling.seed);
            let sampler = ConfigSampler::new(aut.states());
            let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
            let (mut agree, mut injective, mut mismatch) = (0u64, 0u64, None);
            for k in 0..sampling.samples {
                let c = if k % 2 == 0 {
                    sampler.skeleton(&mut rng)
                } else {
                    sampler.near_table(aut.formula(), (k / 2 % 3) as usize, &mut rng)
                };
                let fast = class_injective(&aut, &c)?;
                if fast != class_injective_bruteforce(&aut, &c)? {
                    mismatch = Some(c);
                    break;
                }
                agree += 1;
                injective += fast as u64;
            }
            println!("{agree} classes agree ({injective} injective)");
            if let Some(c) = &mismatch {
                println!("disagreement on:\n{}", c.to_text());
            }
            Ok(Outcome::verdict(
                mismatch.is_none(),
                json!({
                    "seed": sampling.seed,
                    "classes": agree,
                    "injective": injective,
                    "mismatch": mismatch.map(|c| c.to_text()),
                }),
            ))
        }
        Cmd::Invert { cnf, refutation } => {
            let phi = read_cnf(&cnf)?;
            match build_refutation(&phi) {
                Ok(r) => {
                    write(&refutation, r.to_bytes())?;
                    println!(
                        "refutation with {} explicit rows written to {}",
                        r.b.rows().len(),
                        refutation.display()
                    );
                    Ok(Outcome::ok(json!({
                        "satisfiable": false,
                        "mu": r.b.mu(),
                        "rows": r.b.rows().len(),
                        "t": r.t.to_string(),
                        "file": refutation,
                    })))
                }
                Err(Error::Satisfiable {
                    assignment,
                    cycle_len,
                }) => {
                    println!("satisfiable by {assignment}; blue cycle of length {cycle_len}, no inverse exists");
                    Ok(Outcome::verdict(
                        false,
                        json!({ "satisfiable": true, "assignment": assignment, "cycle_len": cycle_len }),
                    ))
                }
                Err(e) => Err(e.into()),
            }
        }
        Cmd::Verify {
            cnf,
            refutation,
            sampling,
            exhaustive_budget,
        } => {
            let phi = read_cnf(&cnf)?;
            let bytes = fs::read(&refutation)
                .with_context(|| format!("reading {}", refutation.display()))?;
            let r = Refutation::parse(&bytes)?;
            let aut = FormulaAutomaton::new(&phi);
            let cells = aut.cells() as u32;
            let configs = (aut.states().len() as u64 - 1).checked_pow(cells);
            let mode = match configs {
                Some(c) if c <= exhaustive_budget => CheckMode::Exhaustive {
                    budget: exhaustive_budget,
                },
                _ => CheckMode::Sampled {
                    samples: sampling.samples,
                    seed: sampling.seed,
                },
            };
            if let CheckMode::Sampled { seed, .. } = mode {
                println!("seed {seed}");
            }
            let verdict = verify_refutation(&phi, &r, mode)?;
            let report = match &verdict {
                RefutationVerdict::Accepted(rep) => {
                    println!(
                        "accepted: {} configurations, {} (configuration, cell) pairs, {} rows checked",
                        rep.configurations, rep.tuples, rep.rows_checked
                    );
                    json!({
                        "verdict": "accepted",
                        "exhaustive": rep.exhaustive,
                        "configurations": rep.configurations,
                        "tuples": rep.tuples,
                        "rows_checked": rep.rows_checked,
                        "seed": rep.seed,
                    })
                }
                RefutationVerdict::Rejected(why) => {
                    let (reason, detail) = rejection(why);
                    println!("rejected: {detail}");
                    json!({ "verdict": "rejected", "reason": reason, "detail": detail })
                }
            };
            Ok(Outcome::verdict(verdict.accepted(), report))
        }
        Cmd::Phpgen { k, weak, output } => {
            if k == 0 {
                bail!("k must be at least 1");
            }
            let phi = if weak {
                gen_weak_php(k)
            } else {
                gen_onto_php(k)
            };
            let text = phi.to_dimacs();
            match &output {
                Some(path) => write(path, &text)?,
                None => print!("{text}"),
            }
            Ok(Outcome::ok(
                json!({ "k": k, "weak": weak, "variables": phi.m(), "clauses": phi.n() }),
            ))
        }
        Cmd::Translate {
            formula,
            bindings,
            scan,
        } => {
            let a: Delta0 = formula.parse()?;
            match scan {
                Some(s) => {
                    let (from, to): (u64, u64) = (s[1].parse()?, s[2].parse()?);
                    let rows = size_depth_scan(&a, &s[0], from..=to)?;
                    println!("{:>8} {:>10} {:>6}", s[0], "size", "depth");
                    for r in &rows {
                        println!("{:>8} {:>10} {:>6}", r.n, r.size, r.depth);
                    }
                    Ok(Outcome::ok(
                        json!({ "formula": a.to_string(), "var": s[0], "rows": rows }),
                    ))
                }
                None => {
                    let env: Env = bindings.into_iter().collect();
                    let p = pw_translate(&a, &env)?;
                    println!("{p}");
                    Ok(Outcome::ok(json!({
                        "formula": a.to_string(),
                        "translation": p.to_string(),
                        "size": p.size(),
                        "depth": p.depth(),
                    })))
                }
            }
        }
        Cmd::Sizes { k_max } => {
            let rows = cellsat_core::inverse::size_report(k_max);
            println!(
                "{:>3} {:>4} {:>4} {:>7} {:>7} {:>7} {:>14} {:>14} {:>10} {:>10}",
                "k",
                "n",
                "m",
                "states",
                "mu",
                "region",
                "log2 table",
                "log2 gate",
                "code bits",
                "code bound"
            );
            for r in &rows {
                println!(
                    "{:>3} {:>4} {:>4} {:>7} {:>7} {:>7} {:>14.1} {:>14.1} {:>10} {:>10}",
                    r.k,
                    r.n,
                    r.m,
                    r.states,
                    r.mu,
                    r.region,
                    r.table_bits_log2,
                    r.gate_log2,
                    r.code_bits,
                    r.code_bound
                );
            }
            Ok(Outcome::ok(json!({ "rows": rows })))
        }
    }
}

fn write_pair(dir: &Path, c1: &Configuration, c2: &Configuration) -> Result<[PathBuf; 2]> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let (p1, p2) = (dir.join("witness1.cfg"), dir.join("witness2.cfg"));
    write(&p1, c1.to_text())?;
    write(&p2, c2.to_text())?;
    Ok([p1, p2])
}

fn rejection(r: &Rejection) -> (&'static str, String) {
    match r {
        Rejection::StateSet { expected, got } => (
            "state-set",
            format!("state set digest {got} does not match the formula ({expected})"),
        ),
        Rejection::SizeGate => (
            "size-gate",
            "declared size does not exceed |S|^(10 mu)".into(),
        ),
        Rejection::PayloadExceedsT => {
            ("payload", "payload is longer than the declared size".into())
        }
        Rejection::Local(cx) => (
            "local",
            format!(
                "inverse fails at cell {}: expected {}, got {} (window code {})",
                cx.cell, cx.expected, cx.got, cx.window_code
            ),
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = command_name(&cli.cmd);
    let (code, report) = match run(cli.cmd) {
        Ok(o) => (o.code, o.report),
        Err(e) => {
            eprintln!("error: {e:#}");
            (2, json!({ "error": format!("{e:#}") }))
        }
    };
    if let Some(path) = &cli.out {
        let doc = json!({ "command": name, "exit_code": code, "report": report });
        let text = serde_json::to_string_pretty(&doc).expect("json") + "\n";
        if let Err(e) = fs::write(path, text) {
            eprintln!("error: writing {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    ExitCode::from(code)
}

fn command_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Compile { .. } => "compile",
        Cmd::Table { .. } => "table",
        Cmd::Step { .. } => "step",
        Cmd::Color { .. } => "color",
        Cmd::Decompose { .. } => "decompose",
        Cmd::Decide { .. } => "decide",
        Cmd::Witness { .. } => "witness",
        Cmd::Oracle { .. } => "oracle",
        Cmd::Invert { .. } => "invert",
        Cmd::Verify { .. } => "verify",
        Cmd::Phpgen { .. } => "phpgen",
        Cmd::Translate { .. } => "translate",
        Cmd::Sizes { .. } => "sizes",
    }
}
