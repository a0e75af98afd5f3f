//! `tslab`: Schreier membership and enumeration, norms, dual norms,
//! finite-window certification, and the seeded verification suite.
//!
//! Exit codes: 0 success, 1 a verified inequality failed or an asserted
//! membership came out false, 2 usage or cap errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use tslab_core::caps::Caps;
use tslab_core::estimates::{
    self, BlockEstimateOptions, CertifyOptions, SearchMode, VectorFamily, VerifyReport,
};
use tslab_core::rational::Exponent;
use tslab_core::schreier::{self, FinSet, ThresholdOutcome};
use tslab_core::spaces::{self, SpaceDescriptor};
use tslab_core::tsirelson::{self, TsirelsonParams};
use tslab_core::vector::AnyVec;
use tslab_core::{Error, Ordinal};

#[derive(Parser)]
#[command(name = "tslab", version, about = "Schreier families, Tsirelson-type norms, and finite-window upper-lp estimates", disable_help_subcommand = true)]
struct Cli {
    /// Emit JSON reports instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Schreier family membership, maximal members, and inclusion thresholds.
    Schreier {
        #[command(subcommand)]
        command: SchreierCommand,
    },
    /// Evaluate a norm: `norm --space s.json --vec x.json`.
    Norm {
        #[arg(long)]
        space: PathBuf,
        #[arg(long = "vec")]
        vector: PathBuf,
    },
    /// Dual-norm value of a functional in a Tsirelson space.
    Dual {
        #[arg(long)]
        space: PathBuf,
        #[arg(long = "vec")]
        vector: PathBuf,
        /// Exact LP value (q = 1 only); the default when q = 1.
        #[arg(long, conflicts_with = "bracket")]
        exact: bool,
        /// Lower/upper bracket with a ratio witness.
        #[arg(long)]
        bracket: bool,
        #[arg(long, default_value_t = 32)]
        restarts: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Finite-window upper-lp constant of a vector family.
    Certify {
        #[arg(long)]
        space: PathBuf,
        /// JSON array of vectors, or a directory of vector JSON files.
        #[arg(long)]
        vectors: PathBuf,
        #[arg(long)]
        xi: String,
        #[arg(long)]
        p: String,
        #[arg(long)]
        mode: Option<String>,
        #[arg(long, default_value_t = 32)]
        restarts: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Truncate the family to its first K vectors.
        #[arg(long)]
        window: Option<u32>,
    },
    /// Run the verification suite (exit 1 on any violated inequality).
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum SchreierCommand {
    /// Membership of a set: `schreier member --xi 1 --set 3,4,5`.
    Member {
        #[arg(long)]
        xi: String,
        #[arg(long)]
        set: String,
        /// Also evaluate the backtracking oracle.
        #[arg(long)]
        oracle: bool,
        /// Exit 1 unless membership matches this truth value.
        #[arg(long)]
        expect: Option<bool>,
    },
    /// Maximal members within a window.
    Maximal {
        #[arg(long)]
        xi: String,
        #[arg(long)]
        window: u32,
    },
    /// Window-relative least d with S_zeta restricted above d inside S_xi.
    Threshold {
        #[arg(long)]
        zeta: String,
        #[arg(long)]
        xi: String,
        #[arg(long)]
        window: u32,
        #[arg(long)]
        d_max: Option<u32>,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// One of: block, xm, sum, mono, sep, all.
    which: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Trial count for the block estimate (both q = 1 and q = 2 sweeps).
    #[arg(long, default_value_t = 50)]
    trials: u32,
    /// Random configurations for the direct-sum bound.
    #[arg(long, default_value_t = 20)]
    configs: u32,
    /// Random families for monotonicity/subadditivity.
    #[arg(long, default_value_t = 50)]
    families: u32,
    /// Window for the separation demo.
    #[arg(long, default_value_t = 8)]
    window: u32,
    #[arg(long, default_value_t = 20)]
    samples: u32,
    #[arg(long, default_value = "1")]
    xi: String,
    /// X_m verification parameters.
    #[arg(long, default_value = "2")]
    p: String,
    #[arg(long, default_value_t = 4)]
    m: u32,
    /// Additive slack for non-exact verification comparisons.
    #[arg(long, default_value_t = 1e-6)]
    slack: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    let caps = Caps::from_env();
    match cli.command {
        Command::Schreier { command } => run_schreier(command, cli.json, &caps),
        Command::Norm { space, vector } => run_norm(&space, &vector, cli.json, &caps),
        Command::Dual {
            space,
            vector,
            exact,
            bracket,
            restarts,
            seed,
        } => run_dual(&space, &vector, exact, bracket, restarts, seed, cli.json, &caps),
        Command::Certify {
            space,
            vectors,
            xi,
            p,
            mode,
            restarts,
            seed,
            window,
        } => run_certify(
            &space, &vectors, &xi, &p, mode.as_deref(), restarts, seed, window, cli.json, &caps,
        ),
        Command::Verify(args) => run_verify(&args, cli.json, &caps),
    }
}

fn parse_ordinal(text: &str) -> Result<Ordinal, Error> {
    text.parse()
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("bad JSON in {}: {e}", path.display())))
}

fn print_json<T: serde::Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("report serializes")
    );
}

fn run_schreier(
    command: SchreierCommand,
    json_out: bool,
    caps: &Caps,
) -> Result<ExitCode, Error> {
    match command {
        SchreierCommand::Member {
            xi,
            set,
            oracle,
            expect,
        } => {
            let xi = parse_ordinal(&xi)?;
            let set = FinSet::parse(&set)?;
            if set.len() > caps.max_member_size {
                return Err(Error::SupportCap {
                    size: set.len(),
                    cap: caps.max_member_size,
                });
            }
            let member = schreier::is_member(&set, &xi);
            let oracle_verdict = oracle.then(|| schreier::is_member_oracle(&set, &xi));
            if json_out {
                print_json(&json!({
                    "command": "schreier member",
                    "xi": xi,
                    "set": set,
                    "member": member,
                    "oracle": oracle_verdict,
                }));
            } else {
                println!("{member}");
                if let Some(o) = oracle_verdict {
                    println!("oracle: {o}");
                }
            }
            if expect.is_some_and(|want| want != member) {
                return Ok(ExitCode::from(1));
            }
            Ok(ExitCode::SUCCESS)
        }
        SchreierCommand::Maximal { xi, window } => {
            let xi = parse_ordinal(&xi)?;
            let maximal = schreier::maximal_members(&xi, window, caps)?;
            if json_out {
                print_json(&json!({
                    "command": "schreier maximal",
                    "xi": xi,
                    "window": window,
                    "maximal_members": maximal,
                }));
            } else {
                for f in &maximal {
                    println!("{f}");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        SchreierCommand::Threshold {
            zeta,
            xi,
            window,
            d_max,
        } => {
            let zeta = parse_ordinal(&zeta)?;
            let xi = parse_ordinal(&xi)?;
            let d_max = d_max.unwrap_or(window);
            let outcome = schreier::subset_threshold(&zeta, &xi, window, d_max, caps)?;
            if json_out {
                print_json(&json!({
                    "command": "schreier threshold",
                    "zeta": zeta,
                    "xi": xi,
                    "window": window,
                    "d_max": d_max,
                    "window_relative": true,
                    "outcome": outcome,
                }));
            } else {
                match &outcome {
                    ThresholdOutcome::Threshold { d } => {
                        println!("d = {d} (window-relative certificate over {{1..{window}}})")
                    }
                    ThresholdOutcome::Counterexamples(cs) => {
                        println!("no d <= {d_max} works within {{1..{window}}}");
                        for (d, f) in cs {
                            println!("d = {d}: counterexample {f}");
                        }
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_norm(space: &Path, vector: &Path, json_out: bool, caps: &Caps) -> Result<ExitCode, Error> {
    let space: SpaceDescriptor = read_json(space)?;
    let vector: AnyVec = read_json(vector)?;
    let value = spaces::norm(&space, &vector, caps)?;
    if json_out {
        print_json(&json!({
            "command": "norm",
            "space": space,
            "value": value,
        }));
    } else {
        match value.as_exact() {
            Some(r) => println!("{r} (exact)"),
            None => println!("{} (tolerance {})", value.as_f64(), value.tolerance()),
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn run_dual(
    space: &Path,
    vector: &Path,
    exact: bool,
    bracket: bool,
    restarts: u32,
    seed: u64,
    json_out: bool,
    caps: &Caps,
) -> Result<ExitCode, Error> {
    let space: SpaceDescriptor = read_json(space)?;
    let params: TsirelsonParams = match space {
        SpaceDescriptor::Tsirelson(p) | SpaceDescriptor::TsirelsonDual(p) => p,
        _ => {
            return Err(Error::Unsupported(
                "dual norms are defined for Tsirelson spaces".into(),
            ))
        }
    };
    let xstar: tslab_core::FinVec = read_json(vector)?;
    let want_exact = exact || (!bracket && params.q.is_one());
    if want_exact {
        let result = tsirelson::dual_norm(&xstar, &params, caps)?;
        if json_out {
            print_json(&json!({
                "command": "dual",
                "mode": "exact",
                "value": result.value,
                "witness": result.witness,
            }));
        } else {
            println!(
                "{} (exact), witness {}",
                result.value.as_exact().expect("exact dual"),
                serde_json::to_string(&result.witness).expect("witness serializes")
            );
        }
    } else {
        let b = tsirelson::dual_norm_bracket(&xstar, &params, restarts, seed, caps)?;
        if json_out {
            print_json(&json!({
                "command": "dual",
                "mode": "bracket",
                "lower": b.lower,
                "upper": b.upper,
                "witness": b.witness,
                "restarts": restarts,
                "seed": seed,
            }));
        } else {
            println!(
                "lower {} upper {} witness {}",
                b.lower.as_f64(),
                b.upper.as_f64(),
                serde_json::to_string(&b.witness).expect("witness serializes")
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn load_vectors(path: &Path) -> Result<Vec<AnyVec>, Error> {
    if path.is_dir() {
        let mut files: Vec<PathBuf> = std::fs::read_dir(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
            .collect();
        files.sort();
        files.iter().map(|f| read_json::<AnyVec>(f)).collect()
    } else {
        read_json::<Vec<AnyVec>>(path)
    }
}

#[allow(clippy::too_many_arguments)]
fn run_certify(
    space: &Path,
    vectors: &Path,
    xi: &str,
    p: &str,
    mode: Option<&str>,
    restarts: u32,
    seed: u64,
    window: Option<u32>,
    json_out: bool,
    caps: &Caps,
) -> Result<ExitCode, Error> {
    let space: SpaceDescriptor = read_json(space)?;
    let mut vectors = load_vectors(vectors)?;
    if let Some(k) = window {
        if (k as usize) < vectors.len() {
            vectors.truncate(k as usize);
        }
    }
    let xi = parse_ordinal(xi)?;
    let p = Exponent::parse(p)?;
    let mode = match mode {
        None => None,
        Some("exact") => Some(SearchMode::Exact),
        Some("heuristic") => Some(SearchMode::Heuristic),
        Some(other) => {
            return Err(Error::Parse(format!(
                "mode must be exact or heuristic, got {other:?}"
            )))
        }
    };
    let family = VectorFamily::new(space, vectors)?;
    let opts = CertifyOptions {
        restarts,
        seed,
        mode,
        caps: caps.clone(),
    };
    let report = estimates::window_constant(&family, &xi, &p, &opts)?;
    if json_out {
        print_json(&report);
    } else {
        println!(
            "window constant {} ({:?} mode), witness support {} coefficients {}",
            report.constant.as_f64(),
            report.mode,
            report.witness_support,
            serde_json::to_string(&report.witness_coeffs).expect("witness serializes"),
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn standard_params(xi: &Ordinal) -> TsirelsonParams {
    TsirelsonParams::standard(xi.clone())
}

fn run_verify(args: &VerifyArgs, json_out: bool, caps: &Caps) -> Result<ExitCode, Error> {
    let started = std::time::Instant::now();
    let xi = parse_ordinal(&args.xi)?;
    let p = Exponent::parse(&args.p)?;
    let mut reports: Vec<VerifyReport> = Vec::new();
    let which = args.which.as_str();
    let known = ["block", "xm", "sum", "mono", "sep", "all"];
    if !known.contains(&which) {
        return Err(Error::Parse(format!(
            "unknown verify suite {which:?}; expected one of {known:?}"
        )));
    }

    if which == "block" || which == "all" {
        let opts = BlockEstimateOptions {
            trials: args.trials,
            seed: args.seed,
            slack: args.slack,
            ..BlockEstimateOptions::default()
        };
        reports.push(estimates::verify_block_estimate(
            &standard_params(&xi),
            &opts,
            caps,
        )?);
        let q2 = TsirelsonParams::with_q(xi.clone(), Exponent::two())?;
        let mut q2_report = estimates::verify_block_estimate(
            &q2,
            &BlockEstimateOptions {
                max_blocks: 3,
                max_support_points: 8,
                ..opts
            },
            caps,
        )?;
        q2_report.name = "block_q2".into();
        reports.push(q2_report);
    }
    if which == "xm" || which == "all" {
        reports.push(estimates::verify_xm_bound(
            &p,
            args.m,
            &xi,
            (2 * args.m).max(16),
            args.samples,
            args.seed,
            args.slack,
            caps,
        )?);
    }
    if which == "sum" || which == "all" {
        reports.push(estimates::sum_bound_harness(args.configs, args.seed, args.slack, caps)?);
    }
    if which == "mono" || which == "all" {
        reports.push(estimates::mono_harness(args.families, args.seed, args.slack, caps)?);
    }
    if which == "sep" || which == "all" {
        let params = standard_params(&xi);
        reports.push(estimates::separation_demo(
            &params,
            3,
            args.samples,
            args.seed,
            args.slack,
            caps,
        )?);
        let mut wide = estimates::separation_demo(
            &params,
            args.window.min(caps.lp_support as u32),
            args.samples,
            args.seed,
            args.slack,
            caps,
        )?;
        wide.name = format!("sep_window_{}", args.window.min(caps.lp_support as u32));
        reports.push(wide);
    }

    let pass = reports.iter().all(|r| r.pass);
    if json_out {
        print_json(&json!({
            "command": format!("verify {which}"),
            "config": {
                "seed": args.seed,
                "trials": args.trials,
                "configs": args.configs,
                "families": args.families,
                "window": args.window,
                "samples": args.samples,
                "xi": xi,
                "p": p,
                "m": args.m,
                "slack": args.slack,
            },
            "versions": { "tslab": env!("CARGO_PKG_VERSION") },
            "pass": pass,
            "reports": reports,
        }));
    } else {
        for report in &reports {
            for check in &report.checks {
                println!(
                    "[{}] {} {}",
                    report.name,
                    check.name,
                    if check.pass { "PASS" } else { "FAIL" }
                );
            }
        }
        println!(
            "verify {which}: {} ({:.2}s)",
            if pass { "PASS" } else { "FAIL" },
            started.elapsed().as_secs_f64()
        );
    }
    Ok(if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
