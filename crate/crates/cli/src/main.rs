use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{ArgGroup, Args, Parser, Subcommand};
use serde_json::json;

use pvlab_core::counting::{self, CountConfig};
use pvlab_core::exponents::{self, ExponentTable, Params};
use pvlab_core::iteration::{self, Variant};
use pvlab_core::rat::{self, Rat};
use pvlab_core::report::{CheckReport, RunReport, Status};
use pvlab_core::suites::{self, ExponentRanges, SuiteConfig};

#[derive(Parser, Debug)]
#[command(
    name = "pvlab",
    version,
    about = "Exact verification workbench for mean value exponents"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
#[command(group(ArgGroup::new("format").args(["json", "csv", "text"])))]
struct Global {
    /// JSON report (the default).
    #[arg(long, global = true)]
    json: bool,
    #[arg(long, global = true)]
    csv: bool,
    #[arg(long, global = true)]
    text: bool,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true, env = "PVLAB_THREADS")]
    threads: Option<usize>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Every index and exponent for one (d, k[, p]).
    Exponents {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        k: u32,
        /// Rational as NUM/DEN or an integer.
        #[arg(long, value_parser = parse_rat)]
        p: Option<Rat>,
        #[arg(long)]
        s: Option<u32>,
    },
    /// Solve the iteration systems for one (d, k[, p]).
    Iterate {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        k: u32,
        #[arg(long, value_parser = parse_rat)]
        p: Option<Rat>,
    },
    /// Exact identity sweeps.
    Verify {
        #[arg(long, value_parser = ["identities", "exponents"])]
        suite: String,
        #[arg(long, default_value_t = 3)]
        dmax: u32,
        #[arg(long, default_value_t = 5)]
        kmax: u32,
        #[arg(long, default_value_t = 10)]
        pgrid: u32,
    },
    /// Lattice and cell combinatorics.
    Comb {
        #[arg(long, value_parser = ["extension", "frac", "deficiency", "multiplicity"])]
        suite: String,
        #[arg(long)]
        d: Option<u32>,
        #[arg(long)]
        l: Option<u32>,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        dmax: Option<u32>,
        #[arg(long)]
        kmax: Option<u32>,
        #[arg(long, default_value_t = 4)]
        mmax: u32,
        #[arg(long, default_value_t = 12)]
        qmax: u32,
    },
    /// Rank condition for the moment surface.
    #[command(group(ArgGroup::new("mode").required(true).args(["random", "monomial_sweep"])))]
    Blcheck {
        /// Seeded random subspaces per (d, k, l).
        #[arg(long)]
        random: Option<u32>,
        #[arg(long)]
        monomial_sweep: bool,
        #[arg(long, default_value_t = 3)]
        dmax: usize,
        #[arg(long, default_value_t = 4)]
        kmax: u32,
        /// Random points tried per subspace.
        #[arg(long, default_value_t = 32)]
        trials: u32,
    },
    /// Solution counts J_{s,d,k}(N) at N = 2, 4, ..., NMAX.
    Count {
        #[arg(long)]
        s: u32,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: u64,
    },
    /// Every suite.
    All {
        #[arg(long, default_value_t = 3)]
        dmax: u32,
        #[arg(long, default_value_t = 5)]
        kmax: u32,
        #[arg(long, default_value_t = 10)]
        pgrid: u32,
        /// tiny, default, or an enumeration limit.
        #[arg(long, default_value = "default", value_parser = parse_budget)]
        budget: u64,
    },
}

fn parse_rat(s: &str) -> Result<Rat, String> {
    rat::parse(s).map_err(|e| e.to_string())
}

fn parse_budget(s: &str) -> Result<u64, String> {
    match s {
        "tiny" => Ok(suites::TINY_BUDGET),
        "default" => Ok(suites::DEFAULT_BUDGET),
        n => n
            .parse::<u64>()
            .map_err(|_| format!("expected tiny, default or a positive integer, got {n:?}")),
    }
}

/// A parameter rejected by a module precondition.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl std::fmt::Display) -> anyhow::Error {
    UsageError(msg.to_string()).into()
}

enum Output {
    Report(RunReport),
    /// Count runs print their own CSV table.
    Count(RunReport, String),
}

fn threads(g: &Global) -> usize {
    g.threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn exponents_cmd(d: u32, k: u32, p: Option<Rat>, s: Option<u32>) -> Result<RunReport> {
    let params = Params::new(d, k, p.clone(), s).map_err(usage)?;
    let table = ExponentTable::new(&params).map_err(usage)?;
    let mut result = json!({"table": table});
    if let Some(g) = &table.gamma {
        result["gamma"] = rat::json(g);
    }
    if let Some(p) = &p {
        if *p > table.threshold {
            let lam = iteration::solve_lambda0(d, k, p)?;
            result["lambda0"] = rat::json(lam.lambda0.as_ref().expect("lambda0 set"));
        }
    }
    if let Some(s) = s {
        result["lower_exponent"] = rat::json(&exponents::lower_exponent(s, d, k));
    }
    let bad = table.violations();
    let check = CheckReport::from_bool(
        "table_invariants",
        bad.is_empty(),
        json!({"violations": bad}),
    );
    Ok(RunReport::new("exponents", json!(params), vec![check]).with_result(result))
}

fn iterate_cmd(d: u32, k: u32, p: Option<Rat>) -> Result<RunReport> {
    let params = Params::new(d, k, p.clone(), None).map_err(usage)?;
    if let Some(p) = &p {
        let t = exponents::regime_threshold(d, k);
        if *p <= t {
            return Err(usage(format!(
                "p = {} must exceed 2n_d(k)/d = {}",
                rat::to_string(p),
                rat::to_string(&t)
            )));
        }
    }
    let matrix = iteration::build_matrix(d, k)?;
    let diff = iteration::matrix_transcription_diff(d, k)?;
    let mut solutions = Vec::new();
    for v in [Variant::WPrime, Variant::WDoublePrime] {
        solutions.push(json!(iteration::solve_variant(v, d, k, None)?));
    }
    let mut checks = Vec::new();
    if let Some(p) = &p {
        for v in [
            Variant::Lambda0,
            Variant::Bar,
            Variant::Tilde,
            Variant::UnitWeights,
            Variant::Decomposed2,
            Variant::Decomposed3,
            Variant::Decomposed4,
        ] {
            solutions.push(json!(iteration::solve_variant(v, d, k, Some(p))?));
        }
        for c in iteration::verify_identities(d, k, p)? {
            checks.push(CheckReport::from_bool(c.name, c.passed, c.witness));
        }
    } else {
        let cert = iteration::contraction_certificate(&matrix);
        checks.push(match cert {
            Ok(x) => CheckReport::pass("contraction_certificate", json!({"x": rat::json_vec(&x)})),
            Err(e) => CheckReport::fail("contraction_certificate", json!({"error": e.to_string()})),
        });
    }
    let gap = iteration::criticality_gap(d, k)?;
    let result = json!({
        "matrix": matrix,
        "solutions": solutions,
        "criticality_gap": gap.as_ref().map(rat::json),
        "transcription_warning": diff,
    });
    Ok(RunReport::new("iterate", json!(params), checks).with_result(result))
}

fn comb_cmd(cmd: &Command, cfg: &SuiteConfig) -> Result<RunReport> {
    let Command::Comb {
        suite,
        d,
        l,
        k,
        dmax,
        kmax,
        mmax,
        qmax,
    } = cmd
    else {
        unreachable!("comb dispatch")
    };
    let checks = match suite.as_str() {
        "extension" => {
            if *mmax < 2 {
                return Err(usage("--mmax must be at least 2"));
            }
            suites::extension_suite(
                dmax.unwrap_or(3) as usize,
                *mmax,
                kmax.unwrap_or(5),
                *qmax,
                cfg,
            )
        }
        "frac" => match (d, l, k) {
            (Some(d), Some(l), Some(k)) => {
                if *d == 0 || *l == 0 || l >= k {
                    return Err(usage("frac needs d >= 1 and 1 <= l < k"));
                }
                suites::frac_suite(&[(*d, *l, *k)], cfg)
            }
            (None, None, None) => suites::frac_suite(&suites::FRAC_CASES, cfg),
            _ => return Err(usage("give all of --d --l --k or none")),
        },
        "deficiency" => {
            suites::deficiency_suite(dmax.unwrap_or(2) as usize, kmax.unwrap_or(3), cfg)
        }
        _ => suites::multiplicity_suite(),
    };
    let params = json!({"suite": suite, "d": d, "l": l, "k": k, "dmax": dmax, "kmax": kmax, "mmax": mmax, "qmax": qmax});
    Ok(RunReport::new("comb", params, checks))
}

fn count_cmd(s: u32, d: usize, k: u32, n: u64, cfg: &SuiteConfig) -> Result<Output> {
    if s == 0 || d == 0 || k == 0 || n < 2 {
        return Err(usage("count needs s, d, k >= 1 and N >= 2"));
    }
    let cc = CountConfig {
        threads: cfg.threads,
        ..CountConfig::default()
    };
    let params = json!({"s": s, "d": d, "k": k, "n": n, "threads": cfg.threads});
    let rep = match counting::growth_report(s, d, k, n, cc) {
        Ok(rep) => rep,
        Err(counting::CountError::ResourceGuard { estimate, limit }) => {
            let check = CheckReport::guarded("growth", estimate, limit);
            let r = RunReport::new("count", params, vec![check]);
            return Ok(Output::Count(r, "N,J,slope\n".into()));
        }
        Err(e @ counting::CountError::BelowDiagonal { .. }) => {
            let check = CheckReport::fail("diagonal_lower_bound", json!({"error": e.to_string()}));
            return Ok(Output::Count(
                RunReport::new("count", params, vec![check]),
                "N,J,slope\n".into(),
            ));
        }
        Err(e) => return Err(e.into()),
    };
    let mut csv = String::from("N,J,slope\n");
    for row in &rep.rows {
        let slope = row.slope.map(|x| format!("{x:.6}")).unwrap_or_default();
        csv.push_str(&format!("{},{},{}\n", row.n, row.j, slope));
    }
    let check = CheckReport::pass("diagonal_lower_bound", json!({"rows": rep.rows.len()}));
    let r = RunReport::new("count", params, vec![check]).with_result(json!(rep));
    Ok(Output::Count(r, csv))
}

fn dispatch(cli: &Cli) -> Result<Output> {
    let cfg = SuiteConfig {
        seed: cli.global.seed,
        threads: threads(&cli.global),
        ..SuiteConfig::default()
    };
    let report = match &cli.command {
        Command::Exponents { d, k, p, s } => exponents_cmd(*d, *k, p.clone(), *s)?,
        Command::Iterate { d, k, p } => iterate_cmd(*d, *k, p.clone())?,
        Command::Verify {
            suite,
            dmax,
            kmax,
            pgrid,
        } => {
            if *dmax < 1 || *kmax < 2 || *pgrid < 1 {
                return Err(usage("need --dmax >= 1, --kmax >= 2, --pgrid >= 1"));
            }
            let checks = if suite == "identities" {
                suites::identity_suite(*dmax, *kmax, *pgrid)
            } else {
                suites::exponent_suite(&ExponentRanges::uniform(*dmax, *kmax, *pgrid))
            };
            let params = json!({"suite": suite, "dmax": dmax, "kmax": kmax, "pgrid": pgrid});
            RunReport::new("verify", params, checks)
        }
        cmd @ Command::Comb { .. } => comb_cmd(cmd, &cfg)?,
        Command::Blcheck {
            random,
            monomial_sweep,
            dmax,
            kmax,
            trials,
        } => {
            if *kmax < 2 || *dmax < 1 {
                return Err(usage("need --dmax >= 1 and --kmax >= 2"));
            }
            let checks = if *monomial_sweep {
                suites::bl_sweep_suite(&suites::bl_sweep_cases(), &cfg)
            } else {
                suites::bl_random_suite(
                    *dmax,
                    *kmax,
                    random.expect("group requires one"),
                    *trials,
                    &cfg,
                )
            };
            let params = json!({
                "mode": if *monomial_sweep { "monomial_sweep" } else { "random" },
                "random": random, "dmax": dmax, "kmax": kmax, "trials": trials, "seed": cfg.seed,
            });
            RunReport::new("blcheck", params, checks)
        }
        Command::Count { s, d, k, n } => return count_cmd(*s, *d, *k, *n, &cfg),
        Command::All {
            dmax,
            kmax,
            pgrid,
            budget,
        } => {
            if *dmax < 1 || *kmax < 2 || *pgrid < 1 {
                return Err(usage("need --dmax >= 1, --kmax >= 2, --pgrid >= 1"));
            }
            let cfg = SuiteConfig {
                budget: *budget,
                ..cfg
            };
            let checks = suites::run_all(*dmax, *kmax, *pgrid, &cfg);
            let params = json!({"dmax": dmax, "kmax": kmax, "pgrid": pgrid, "budget": budget, "seed": cfg.seed});
            RunReport::new("all", params, checks)
        }
    };
    Ok(Output::Report(report))
}

fn text(r: &RunReport) -> String {
    let mut out = String::new();
    if !r.result.is_null() {
        out.push_str(&format!("{}\n", r.result));
    }
    for c in &r.checks {
        let tag = match c.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Guarded => "guarded",
            Status::Degenerate => "degenerate",
        };
        out.push_str(&format!("[{tag}] {} ({:.1} ms)\n", c.name, c.wall_ms));
        if c.status == Status::Fail {
            out.push_str(&format!("    {}\n", c.witness));
        }
    }
    let s = r.summary;
    out.push_str(&format!(
        "{} pass, {} fail, {} guarded, {} degenerate\n",
        s.pass, s.fail, s.guarded, s.degenerate
    ));
    out
}

fn render(g: &Global, out: &Output) -> Result<String> {
    let (report, count_csv) = match out {
        Output::Report(r) => (r, None),
        Output::Count(r, csv) => (r, Some(csv)),
    };
    Ok(if g.csv {
        count_csv.cloned().unwrap_or_else(|| report.to_csv())
    } else if g.text {
        text(report)
    } else {
        let mut s = serde_json::to_string(report)?;
        s.push('\n');
        s
    })
}

fn run(cli: &Cli) -> Result<bool> {
    if cli.global.threads == Some(0) {
        return Err(usage("--threads must be at least 1"));
    }
    if let Some(t) = cli.global.threads {
        // Sweeps inside the core crate run on the global pool.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }
    let out = dispatch(cli)?;
    let ok = match &out {
        Output::Report(r) | Output::Count(r, _) => r.ok(),
    };
    let body = render(&cli.global, &out)?;
    match &cli.global.out {
        Some(path) => {
            fs::write(path, body).with_context(|| format!("writing {}", path.display()))?
        }
        None => std::io::stdout().write_all(body.as_bytes())?,
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if e.downcast_ref::<UsageError>().is_some() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
