use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use powerprog::curves::{claimed_points, family_curve, scan_quartic, torsion_over_q, QuarticModel};
use powerprog::engine::{enumerate_with_certificates, Alphabet, Ruleset};
use powerprog::identities::run_suite;
use powerprog::report::{run_report, Format, RuleMutation, RunConfig};
use powerprog::search::{classify, find_progressions, format_exponents, SearchAlphabet};

const WORKERS_ENV: &str = "POWERPROG_WORKERS";

#[derive(Parser)]
#[command(name = "powerprog", version, about = "Arithmetic progressions of mixed perfect powers")]
struct Cli {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (default: $POWERPROG_WORKERS, then all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CurveName {
    #[value(name = "C1", alias = "c1")]
    C1,
    #[value(name = "C2", alias = "c2")]
    C2,
    #[value(name = "C3", alias = "c3")]
    C3,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    #[value(name = "134")]
    F134,
    #[value(name = "145")]
    F145,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Markdown,
}

#[derive(Subcommand)]
enum Command {
    /// Verify the polynomial identity suite.
    Identities,
    /// Enumerate admissible exponent patterns.
    Patterns {
        #[arg(long, value_parser = ["2n", "25", "3n"])]
        alphabet: String,
        #[arg(long)]
        length: usize,
        #[arg(long)]
        nmin: Option<u32>,
        #[arg(long)]
        json: bool,
    },
    /// Search for progressions of perfect powers up to a bound.
    Search {
        /// `2n`, `25`, `3n` or a comma-separated exponent list.
        #[arg(long)]
        alphabet: String,
        /// Concrete prime standing in for the symbolic exponent.
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        bound: Option<i64>,
        #[arg(long, default_value_t = 3)]
        min_len: usize,
        #[arg(long)]
        json: bool,
    },
    /// Scan a quartic curve for points of bounded height.
    Curves {
        #[arg(long, value_enum)]
        scan: CurveName,
        #[arg(long)]
        height: Option<i64>,
        /// Also verify the known points exactly.
        #[arg(long)]
        claimed: bool,
        #[arg(long)]
        json: bool,
    },
    /// Rational torsion of a four-squares curve and its progressions.
    Torsion {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        json: bool,
    },
    /// Run every check and emit a report.
    Report {
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        search_bound: Option<i64>,
        #[arg(long)]
        quartic_height: Option<i64>,
        #[arg(long)]
        point_height: Option<i64>,
        /// Override a rule's exponent bound, as `RULE=N`.
        #[arg(long, value_name = "RULE=N")]
        tamper: Vec<String>,
        /// Drop a rule from every ruleset.
        #[arg(long, value_name = "RULE")]
        drop_rule: Vec<String>,
    },
}

enum Failure {
    Usage(String),
    Check(String),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn load_config(path: Option<&PathBuf>) -> Result<RunConfig, Failure> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", p.display())))
        }
    }
}

fn workers(flag: Option<usize>, config: &RunConfig) -> Result<Option<usize>, Failure> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| usage(format!("{WORKERS_ENV}={v} is not a number"))),
        Err(_) => Ok(config.workers),
    }
}

fn print_json(out: &mut impl Write, value: &impl serde::Serialize) -> Result<(), Failure> {
    writeln!(out, "{}", serde_json::to_string_pretty(value).expect("serializable"))?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut config = load_config(cli.config.as_ref())?;
    config.workers = workers(cli.workers, &config)?;
    if let Some(n) = config.workers {
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global().map_err(usage)?;
    }
    let stdout = io::stdout();
    let mut out = stdout.lock();

    match cli.command {
        Command::Identities => {
            let reports = run_suite();
            print_json(&mut out, &reports)?;
            if let Some(bad) = reports.iter().find(|r| !r.holds()) {
                return Err(Failure::Check(format!("identity {} fails: {:?}", bad.id, bad.counterexample)));
            }
        }
        Command::Patterns { alphabet, length, nmin, json } => {
            let nmin = nmin.or(match alphabet.as_str() {
                "2n" => Some(config.two_n_min),
                "3n" => Some(config.three_n_min),
                _ => None,
            });
            let a = Alphabet::by_name(&alphabet, nmin).map_err(usage)?;
            let e = enumerate_with_certificates(&config.ruleset(a), length).map_err(usage)?;
            if json {
                let pruned: Vec<_> = e
                    .pruned
                    .iter()
                    .map(|c| json!({"pattern": c.pattern.to_string(), "rule": c.rule, "positions": c.positions, "citation": c.citation}))
                    .collect();
                let survivors: Vec<String> = e.survivors.iter().map(|p| p.to_string()).collect();
                print_json(
                    &mut out,
                    &json!({"alphabet": a.name(), "length": length, "survivors": survivors, "pruned": pruned}),
                )?;
            } else {
                writeln!(out, "{} length {length}: {} admissible", a.name(), e.survivors.len())?;
                for p in &e.survivors {
                    writeln!(out, "  {p}")?;
                }
            }
        }
        Command::Search { alphabet, n, bound, min_len, json } => {
            let sa = SearchAlphabet::parse(&alphabet, n, None).map_err(usage)?;
            let bound = bound.unwrap_or(config.search_bound);
            let found = find_progressions(&sa, bound as i128, min_len).map_err(usage)?;
            for p in &found {
                let patterns: Vec<String> = classify(p).iter().map(|e| format_exponents(e)).collect();
                if json {
                    let rec = json!({
                        // terms are bounded by MAX_BOUND, well inside i64
                        "first": p.first as i64,
                        "diff": p.diff as i64,
                        "length": p.len(),
                        "terms": p.terms.iter().map(|&t| t as i64).collect::<Vec<_>>(),
                        "patterns": patterns,
                        "trivial_positions": p.trivial_positions(),
                    });
                    writeln!(out, "{rec}")?;
                } else {
                    let terms: Vec<String> = p.terms.iter().map(|t| t.to_string()).collect();
                    writeln!(out, "{} {}", terms.join(", "), patterns.join(" "))?;
                }
            }
        }
        Command::Curves { scan, height, claimed, json } => {
            let model = match scan {
                CurveName::C1 => QuarticModel::c1(),
                CurveName::C2 => QuarticModel::c2(),
                CurveName::C3 => QuarticModel::c3(),
            };
            let height = height.unwrap_or(config.quartic_height);
            let points = scan_quartic(&model, height).map_err(usage)?;
            let mut docs = vec![json!({"curve": model.name, "points": points, "evidence_level": "scan"})];
            if claimed {
                let known = claimed_points(&model);
                if let Some(bad) = known.iter().find(|p| !model.contains(&p.x, &p.y)) {
                    return Err(Failure::Check(format!("claimed point X = {} is not on {}", bad.x, model.name)));
                }
                docs.push(json!({"curve": model.name, "points": known, "evidence_level": "verified"}));
            }
            if json {
                for d in &docs {
                    print_json(&mut out, d)?;
                }
            } else {
                for p in &points {
                    writeln!(out, "X = {}  Y = {}", p.x, p.y)?;
                }
            }
        }
        Command::Torsion { family, json } => {
            let positions: &[usize] = match family {
                Family::F134 => &[0, 1, 3, 4],
                Family::F145 => &[0, 1, 4, 5],
            };
            let t = torsion_over_q(&family_curve(positions).map_err(usage)?);
            if json {
                print_json(&mut out, &t)?;
            } else {
                writeln!(out, "{}: {} torsion points", t.equation, t.order())?;
                for p in &t.points {
                    writeln!(out, "  {} order {}: {}", p.point, p.order, p.progression.rejections.join("; "))?;
                }
            }
            if !t.all_rejected() {
                return Err(Failure::Check("a torsion point yields an admissible progression".into()));
            }
        }
        Command::Report { format, output, search_bound, quartic_height, point_height, tamper, drop_rule } => {
            if let Some(f) = format {
                config.format = match f {
                    FormatArg::Json => Format::Json,
                    FormatArg::Markdown => Format::Markdown,
                };
            }
            config.search_bound = search_bound.unwrap_or(config.search_bound);
            config.quartic_height = quartic_height.unwrap_or(config.quartic_height);
            config.point_height = point_height.unwrap_or(config.point_height);
            for t in tamper {
                let (rule, n) = t.split_once('=').ok_or_else(|| usage(format!("--tamper {t}: expected RULE=N")))?;
                let n = n.parse().map_err(|_| usage(format!("--tamper {t}: bad bound")))?;
                config.mutations.push(RuleMutation { rule: rule.to_string(), n_min: Some(n), remove: false });
            }
            for rule in drop_rule {
                config.mutations.push(RuleMutation { rule, n_min: None, remove: true });
            }
            for m in &config.mutations {
                let known = [Alphabet::two_n(5), Alphabet::two_five(), Alphabet::three_n(5)]
                    .into_iter()
                    .any(|a| Ruleset::standard(a).get(&m.rule).is_some());
                if !known {
                    return Err(usage(format!("unknown rule {}", m.rule)));
                }
            }
            let report = run_report(&config);
            let text = report.render();
            match output {
                Some(p) => std::fs::write(&p, text)?,
                None => out.write_all(text.as_bytes())?,
            }
            if let Some(bad) = report.first_failure() {
                let detail = serde_json::to_string_pretty(bad).expect("serializable");
                return Err(Failure::Check(format!("claim {} failed:\n{detail}", bad.claim)));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Check(m)) => {
            eprintln!("check failed: {m}");
            ExitCode::from(1)
        }
    }
}
