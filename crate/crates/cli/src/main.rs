use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rpcalc::cache::SnfCache;
use rpcalc::report::{batch, to_json, AssertMode, BatchEntry, RpReport, RunOptions, Verdict};

#[derive(Parser)]
#[command(name = "rpcalc", version, about = "Refined scissors congruence groups of finite local rings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute reports for the given rings and print a summary.
    Run(Common),
    /// Compute reports and emit them as one JSON array.
    Batch {
        #[command(flatten)]
        common: Common,
        /// File with one ring descriptor per line.
        #[arg(long)]
        file: Option<PathBuf>,
        /// Ring descriptors, after any given with --ring.
        specs: Vec<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AssertArg {
    Strict,
    ReportOnly,
}

#[derive(Args)]
struct Common {
    /// Ring descriptor such as fq:5, fq:3^2, zmod:5^2 or zmod:9.
    #[arg(long = "ring")]
    rings: Vec<String>,
    /// Highest level of the configuration complex.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(2..=3))]
    max_level: u8,
    /// Write the JSON report array here.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Directory for cached canonical forms; RPCALC_CACHE_DIR overrides it.
    #[arg(long)]
    cache: Option<PathBuf>,
    #[arg(long = "assert", value_enum, default_value_t = AssertArg::Strict)]
    assert_mode: AssertArg,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    threads: Option<usize>,
    /// Cap on the number of projective points.
    #[arg(long, default_value_t = RunOptions::default().point_cap)]
    point_cap: usize,
    /// Cap on the size of any level basis.
    #[arg(long, default_value_t = RunOptions::default().tuple_cap)]
    tuple_cap: usize,
    /// Include wall-clock timings in the JSON.
    #[arg(long)]
    timing: bool,
}

impl Common {
    fn options(&self) -> RunOptions {
        RunOptions {
            max_level: self.max_level as usize,
            point_cap: self.point_cap,
            tuple_cap: self.tuple_cap,
            assert_mode: match self.assert_mode {
                AssertArg::Strict => AssertMode::Strict,
                AssertArg::ReportOnly => AssertMode::ReportOnly,
            },
            include_timing: self.timing,
            ..RunOptions::default()
        }
    }

    fn compute(&self, specs: &[String]) -> Result<Vec<BatchEntry>> {
        if let Some(n) = self.threads {
            rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")?;
        }
        let cache = SnfCache::resolve(self.cache.as_deref()).context("opening the cache directory")?;
        let entries = batch(specs, &self.options(), cache.as_ref());
        if let Some(path) = &self.json {
            write_json(path, &entries)?;
        }
        Ok(entries)
    }
}

fn write_json(path: &Path, entries: &[BatchEntry]) -> Result<()> {
    fs::write(path, to_json(entries)).with_context(|| format!("writing {}", path.display()))
}

fn read_specs(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect())
}

fn print_summary(r: &RpReport) {
    let info = &r.ring_info;
    println!("{}  |A| = {}  |P1| = {}  |G| = {}  |W| = {}", r.ring, info.size, info.projective_points, info.square_classes, info.w_size);
    let p = &r.presentation;
    println!("  presentation  RP = {}  RP1 = {}  RB = {}", p.rp, p.rp1, p.rb);
    if let Some(c) = &r.complex {
        let h: Vec<String> = c.homology.iter().map(ToString::to_string).collect();
        println!("  complex       H = [{}]  GW' = {}  I' = {}  GW-bar = {}", h.join(", "), c.gw_prime, c.i_prime, c.gw_bar);
        if let (Some(rp), Some(rp1)) = (&c.rp, &c.rp1) {
            println!("  complex       RP = {rp}  RP1 = {rp1}");
        }
    }
    if let Some(b) = &r.psi1_quotients {
        println!("  RP1 / Z[G] psi1(-1) = {}", b.rp1.quotient);
        if let Some(rb) = &b.rb {
            println!("  RB / Z[G] psi1(-1) = {}", rb.quotient);
        }
    }
    let bw = &r.bloch_wigner;
    if let Some(h3) = &bw.predicted_h3_order {
        println!("  |H3(PSL2)| = {} * {} = {h3} ({})", bw.tor_order, bw.rb_order.as_ref().expect("set with the product"), bw.marker);
    }
    let count = |f: fn(&Verdict) -> bool| r.checks.iter().filter(|c| f(&c.verdict)).count();
    println!(
        "  checks: {} pass, {} fail, {} skipped",
        count(|v| matches!(v, Verdict::Pass)),
        count(|v| matches!(v, Verdict::Fail { .. })),
        count(|v| matches!(v, Verdict::Skipped { .. }))
    );
    for c in &r.checks {
        if let Verdict::Fail { detail } = &c.verdict {
            let tag = if c.asserted { "FAIL" } else { "fail (not asserted)" };
            println!("  {tag} {}: {detail}", c.name);
        }
    }
    for e in &r.errors {
        println!("  note: {e}");
    }
}

fn exit_code(entries: &[BatchEntry]) -> ExitCode {
    if entries.iter().any(BatchEntry::failed_assertion) {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run(common) => {
            if common.rings.is_empty() {
                anyhow::bail!("run needs at least one --ring");
            }
            let entries = common.compute(&common.rings)?;
            let mut invalid = false;
            for e in &entries {
                match e {
                    BatchEntry::Report(r) => print_summary(r),
                    BatchEntry::Error { ring, error, .. } => {
                        eprintln!("{ring}: {error}");
                        invalid = true;
                    }
                }
            }
            let code = exit_code(&entries);
            Ok(if invalid && code == ExitCode::SUCCESS { ExitCode::from(2) } else { code })
        }
        Command::Batch { common, file, specs } => {
            let mut all = common.rings.clone();
            if let Some(f) = &file {
                all.extend(read_specs(f)?);
            }
            all.extend(specs);
            let entries = common.compute(&all)?;
            if common.json.is_none() {
                print!("{}", to_json(&entries));
            }
            Ok(exit_code(&entries))
        }
    }
}
