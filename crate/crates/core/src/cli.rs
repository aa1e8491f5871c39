//! Command-line front end.
//!
//! Exit status: 0 on success, 1 on domain errors (and failed verification),
//! 2 on usage errors, 3 on indeterminate results.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::division::echelon_divide;
use crate::error::{Error, Result};
use crate::gabrielov::{self, GabrielovContext};
use crate::io::{self, NamedEchelon, NamedSeries};
use crate::oracle::{oracle_membership, oracle_relation_order};
use crate::series::{format_monomial, format_rational, Series};
use crate::stdbasis::{enlarge, enlarge_reduced, membership_mod_degree, Outcome, Target, TraceEntry, Verdict};
use crate::verify;

pub const MAX_ROUNDS_VAR: &str = "ECHELON_MAX_ROUNDS";
pub const DEFAULT_MAX_ROUNDS: usize = 10_000;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INDETERMINATE: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "echelons",
    version,
    about = "Power-series echelons with assigned scopes: division, standard bases, membership"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Divide a series by the generators of an echelon.
    Divide {
        #[arg(long)]
        echelon: PathBuf,
        #[arg(long)]
        input: PathBuf,
        /// Write the result as JSON instead of printing it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enlarge the generators by scope-respecting S-combinations.
    Stdbasis {
        #[arg(long)]
        echelon: PathBuf,
        /// Stop once this exponent (comma separated) is covered.
        #[arg(long, conflicts_with = "degree_cap", required_unless_present = "degree_cap")]
        target_monomial: Option<String>,
        /// Skip elements whose initial monomial has larger degree.
        #[arg(long)]
        degree_cap: Option<u32>,
        /// Divide each combination by the current generators before inserting it.
        #[arg(long)]
        reduce: bool,
        #[arg(long)]
        max_rounds: Option<usize>,
        /// Write the pair-by-pair trace as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the enlarged echelon as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide membership up to a degree.
    Member {
        #[arg(long)]
        echelon: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        degree: u32,
        /// Decide by exact linear algebra instead of enlargement and division.
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        max_rounds: Option<usize>,
    },
    /// Report the orders of truncated relations among the generators.
    Relations {
        #[arg(long)]
        echelon: PathBuf,
        #[arg(long)]
        degree: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The example f = 1, g = x (e^z - 1), h = yz - x.
    Gabrielov {
        #[command(subcommand)]
        command: GabrielovCommand,
    },
    /// Run the acceptance suite.
    Verify {
        /// Run a single criterion.
        #[arg(long)]
        criterion: Option<u8>,
    },
}

#[derive(Args, Debug)]
struct OutArg {
    /// Write JSON to this file instead of printing.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum GabrielovCommand {
    /// The element g_k.
    Gk {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        prec: u32,
        /// Use the closed form (default).
        #[arg(long, conflicts_with = "algorithmic")]
        closed: bool,
        /// Use iterated division.
        #[arg(long)]
        algorithmic: bool,
        #[command(flatten)]
        out: OutArg,
    },
    /// Leading coefficients q(k,k) and relative coefficients q(i,k)/q(k,k).
    Qtable {
        #[arg(long)]
        kmax: u32,
        /// Number of relative coefficients per row.
        #[arg(long, default_value_t = 6)]
        width: u32,
    },
    /// The presentation g_k = a_k f + b_k g + c_k h.
    Abc {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        prec: u32,
        #[command(flatten)]
        out: OutArg,
    },
    /// The normalized sum e of the g_k, or the double-sum form.
    E {
        #[arg(long)]
        kmax: u32,
        #[arg(long)]
        prec: u32,
        /// Use the double sum of i!/(i+j)! x^i z^(j+1) instead.
        #[arg(long)]
        original: bool,
        /// First summation index.
        #[arg(long, default_value_t = 2)]
        start: u32,
        #[command(flatten)]
        out: OutArg,
    },
    /// Coefficient growth of the presentation of e, and its bound.
    Witness {
        #[arg(long)]
        kmax: u32,
        #[arg(long)]
        prec: u32,
        /// Print the JSON report instead of the table.
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        out: OutArg,
    },
    /// The echelon itself, as an input document.
    Echelon {
        #[arg(long)]
        prec: u32,
        #[command(flatten)]
        out: OutArg,
    },
}

enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

/// Runs the command line `argv` (program name first) and returns the exit
/// status.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Domain(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_DOMAIN
        }
    }
}

fn max_rounds(flag: Option<usize>) -> std::result::Result<usize, Failure> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var(MAX_ROUNDS_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("{MAX_ROUNDS_VAR}=`{v}` is not a round count"))),
        Err(_) => Ok(DEFAULT_MAX_ROUNDS),
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes()).map_err(|e| Error::Io {
        path: "<stdout>".into(),
        message: e.to_string(),
    })
}

fn load_input(path: &Path, echelon: &NamedEchelon) -> Result<NamedSeries> {
    let input = io::read_series(path)?;
    if input.vars != echelon.vars {
        return Err(Error::Schema {
            origin: path.display().to_string(),
            path: "vars".into(),
            message: format!(
                "variables {:?} differ from the echelon's {:?}",
                input.vars, echelon.vars
            ),
        });
    }
    Ok(input)
}

fn gabrielov_vars() -> Vec<String> {
    gabrielov::VARS.iter().map(|v| v.to_string()).collect()
}

fn dispatch(command: Command, out: &mut dyn Write) -> std::result::Result<i32, Failure> {
    match command {
        Command::Divide {
            echelon,
            input,
            out: file,
        } => {
            let e = io::read_echelon(&echelon)?;
            let f = load_input(&input, &e)?;
            let res = echelon_divide(&f.series, &e.presentation, None)?;
            match file {
                Some(path) => io::write_text(&path, &io::division_json(&res, &e.vars))?,
                None => {
                    let mut text = String::new();
                    for (i, q) in res.quotients.iter().enumerate() {
                        text += &format!("a_{i} = {}\n", q.display_with(&e.vars));
                    }
                    text += &format!("remainder = {}\n", res.remainder.display_with(&e.vars));
                    text += &format!("remainder scope = {}\n", res.remainder_scope);
                    let witness = res
                        .min_witness
                        .as_ref()
                        .map_or("none".into(), |w| format_monomial(w, &e.vars));
                    text += &format!("min in(a_i) in(f_i) = {witness}\n");
                    emit(out, &text)?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Stdbasis {
            echelon,
            target_monomial,
            degree_cap,
            reduce,
            max_rounds: rounds,
            trace,
            out: file,
        } => {
            let e = io::read_echelon(&echelon)?;
            let target = match (target_monomial, degree_cap) {
                (Some(t), None) => Target::Monomial(io::parse_exponent(&t, e.vars.len())?),
                (None, Some(d)) => Target::DegreeCap(d),
                _ => {
                    return Err(Failure::Usage(
                        "give exactly one of --target-monomial and --degree-cap".into(),
                    ))
                }
            };
            let rounds = max_rounds(rounds)?;
            let state = if reduce {
                enlarge_reduced(&e.presentation, &target, rounds)?
            } else {
                enlarge(&e.presentation, &target, rounds)?
            };
            if let Some(path) = trace {
                io::write_text(&path, &trace_json(&state.trace, state.outcome, state.rounds))?;
            }
            let basis = state.presentation(e.presentation.order())?;
            if let Some(path) = file {
                io::write_text(&path, &io::echelon_json(&basis, &e.vars))?;
            }
            let mut text = format!(
                "outcome: {}\nrounds: {}\n",
                serde_json::to_value(state.outcome)
                    .expect("outcome serializes")
                    .as_str()
                    .unwrap_or_default(),
                state.rounds
            );
            for (i, (g, lead)) in basis.generators().iter().zip(basis.initial_exponents()).enumerate() {
                text += &format!(
                    "{i}: scope {} in {} : {}\n",
                    g.scope(),
                    format_monomial(&lead, &e.vars),
                    g.series().display_with(&e.vars)
                );
            }
            emit(out, &text)?;
            Ok(if state.outcome == Outcome::MaxRounds {
                EXIT_INDETERMINATE
            } else {
                EXIT_OK
            })
        }
        Command::Member {
            echelon,
            input,
            degree,
            oracle,
            max_rounds: rounds,
        } => {
            let e = io::read_echelon(&echelon)?;
            let f = load_input(&input, &e)?;
            let verdict = if oracle {
                if oracle_membership(&f.series, &e.presentation, degree)?.feasible {
                    Verdict::Member
                } else {
                    Verdict::NotMember
                }
            } else {
                membership_mod_degree(&f.series, &e.presentation, degree, max_rounds(rounds)?)?.verdict
            };
            let (word, code) = match verdict {
                Verdict::Member => ("true", EXIT_OK),
                Verdict::NotMember => ("false", EXIT_OK),
                Verdict::Indeterminate => ("indeterminate", EXIT_INDETERMINATE),
            };
            emit(out, &format!("{word}\n"))?;
            Ok(code)
        }
        Command::Relations {
            echelon,
            degree,
            out: file,
        } => {
            let e = io::read_echelon(&echelon)?;
            let census = oracle_relation_order(&e.presentation, degree)?;
            match file {
                Some(path) => io::write_text(&path, &pretty(&census))?,
                None => {
                    let mut text = format!(
                        "degree {}\nkernel dimension {}\nleast relation order {}\nartifact threshold {} (heuristic)\n",
                        census.degree,
                        census.kernel_dim,
                        census.min_order.map_or("none".into(), |o| o.to_string()),
                        census.threshold
                    );
                    text += &format!(
                        "relation below threshold: {}\n",
                        census.reported_order().map_or("none".into(), |o| format!("order {o}"))
                    );
                    for (order, count) in &census.active_by_order {
                        text += &format!("  order {order}: {count} coefficients used by relations\n");
                    }
                    emit(out, &text)?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Gabrielov { command } => gabrielov_command(command, out),
        Command::Verify { criterion } => {
            let reports = match criterion {
                Some(id) => vec![verify::run(id).ok_or_else(|| {
                    Failure::Usage(format!("no criterion {id}; criteria are 1..={}", verify::CRITERIA))
                })?],
                None => verify::run_all(),
            };
            let mut text = String::new();
            for r in &reports {
                text += &r.line();
                text.push('\n');
            }
            let passed = reports.iter().filter(|r| r.passed).count();
            text += &format!("{passed} of {} criteria pass\n", reports.len());
            emit(out, &text)?;
            Ok(if passed == reports.len() { EXIT_OK } else { EXIT_DOMAIN })
        }
    }
}

fn series_out(s: &Series, out: &OutArg, w: &mut dyn Write) -> Result<()> {
    let vars = gabrielov_vars();
    match &out.out {
        Some(path) => io::write_text(path, &io::series_json(s, &vars)),
        None => emit(w, &format!("{}\n", s.display_with(&vars))),
    }
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct TraceDoc<'a> {
    outcome: Outcome,
    rounds: usize,
    entries: &'a [TraceEntry],
}

fn trace_json(trace: &[TraceEntry], outcome: Outcome, rounds: usize) -> String {
    pretty(&TraceDoc {
        outcome,
        rounds,
        entries: trace,
    })
}

#[derive(Serialize)]
struct Convergence {
    kmax: u32,
    prec: u32,
    terms: usize,
    max_abs_coefficient: String,
    bounded_by_one: bool,
}

#[derive(Serialize)]
struct WitnessDoc {
    divergence: gabrielov::DivergenceReport,
    convergence: Convergence,
}

fn gabrielov_command(command: GabrielovCommand, w: &mut dyn Write) -> std::result::Result<i32, Failure> {
    match command {
        GabrielovCommand::Gk {
            k,
            prec,
            algorithmic,
            out,
            ..
        } => {
            let g = if algorithmic {
                gabrielov::g_algorithmic(k, prec)?
            } else {
                gabrielov::g_closed(k, prec)?
            };
            series_out(&g, &out, w)?;
        }
        GabrielovCommand::Qtable { kmax, width } => {
            let mut text = String::from("k\tq(k,k)\tq(i,k)/q(k,k) for i = k, k+1, ...\n");
            for (k, lead, rel) in verify::q_table(kmax, width)? {
                let rel: Vec<String> = rel.iter().map(format_rational).collect();
                text += &format!("{k}\t{}\t{}\n", format_rational(&lead), rel.join("\t"));
            }
            for d in gabrielov::discrepancies()? {
                text += &format!("note: {}: printed {}, computed {}\n", d.what, d.printed, d.computed);
            }
            emit(w, &text)?;
        }
        GabrielovCommand::Abc { k, prec, out } => {
            if k == 0 {
                return Err(Failure::Usage("--k must be at least 1".into()));
            }
            let p = gabrielov::abc(k, prec)?.pop().expect("k >= 1");
            let vars = gabrielov_vars();
            match &out.out {
                Some(path) => {
                    let doc = serde_json::json!({
                        "k": k,
                        "a": io::series_value(&p.a, &vars),
                        "b": io::series_value(&p.b, &vars),
                        "c": io::series_value(&p.c, &vars),
                    });
                    io::write_text(path, &pretty(&doc))?;
                }
                None => emit(
                    w,
                    &format!(
                        "a_{k} = {}\nb_{k} = {}\nc_{k} = {}\n",
                        p.a.display_with(&vars),
                        p.b.display_with(&vars),
                        p.c.display_with(&vars)
                    ),
                )?,
            }
        }
        GabrielovCommand::E {
            kmax,
            prec,
            original,
            start,
            out,
        } => {
            let e = if original {
                gabrielov::e_original(prec)?
            } else {
                gabrielov::e_combination(kmax, prec, start)?
            };
            series_out(&e, &out, w)?;
        }
        GabrielovCommand::Witness { kmax, prec, json, out } => {
            let divergence = gabrielov::divergence_report(kmax, prec)?;
            let e = gabrielov::e_combination(kmax, prec, 2)?;
            let max = e.max_abs_coeff();
            let convergence = Convergence {
                kmax,
                prec,
                terms: e.len(),
                max_abs_coefficient: format_rational(&max),
                bounded_by_one: max <= crate::series::integer(1),
            };
            let doc = WitnessDoc {
                divergence,
                convergence,
            };
            let text = pretty(&doc);
            if let Some(path) = &out.out {
                io::write_text(path, &text)?;
            }
            if json {
                emit(w, &text)?;
            } else {
                emit(w, &witness_table(&doc))?;
            }
        }
        GabrielovCommand::Echelon { prec, out } => {
            let ctx = GabrielovContext::new(prec)?;
            let text = io::echelon_json(ctx.presentation(), &gabrielov_vars());
            match &out.out {
                Some(path) => io::write_text(path, &text)?,
                None => emit(w, &text)?,
            }
        }
    }
    Ok(EXIT_OK)
}

fn witness_table(doc: &WitnessDoc) -> String {
    let d = &doc.divergence;
    let mut text = String::from("k\tr_k\tx^2y^(k-2) in a\ty^(k-1) in b\txy^(k-2) in c\tr_(k+1)/r_k\t4(2k+1)(2k-1)\n");
    for row in &d.rows {
        text += &format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            row.k,
            format_rational(&row.r),
            format_rational(&row.a_ray),
            format_rational(&row.b_ray),
            format_rational(&row.c_ray),
            format_rational(&row.growth),
            format_rational(&row.expected_growth)
        );
    }
    text += &format!(
        "rays of a, b equal r_k: {}\nrays of c equal r_k: {}\ngrowth law holds: {}\nsuper-geometric growth: {}\n",
        d.rays_match_r, d.c_rays_match_r, d.growth_law_holds, d.super_geometric
    );
    let c = &doc.convergence;
    text += &format!(
        "e = sum r_k g_k (k = 2..{}, prec {}): {} terms, max |coefficient| {}, bounded by 1: {}\n",
        c.kmax, c.prec, c.terms, c.max_abs_coefficient, c.bounded_by_one
    );
    text
}
