//! `kfrag`: split, join, disperse, fetch, analyze and bench.
//!
//! Exit status: 0 success, 2 parameter error, 3 I/O or backend error,
//! 4 threshold not met, 5 integrity failure. Data goes to stdout,
//! diagnostics to stderr. Set `FRAG_RNG_SEED` for reproducible output.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kfrag::analysis::{self, AnalysisReport, ReportParams};
use kfrag::baselines::{Fragments, SchemeConfig, SchemeId};
use kfrag::bench::{self, BenchConfig, DEFAULT_GRID};
use kfrag::dispersal::{self, Bundle, Manifest, StorageSite};
use kfrag::rng::rng_from_env;
use kfrag::{Error, ErrorKind, Result};

const MANIFEST_NAME: &str = "manifest.json";

#[derive(Parser)]
#[command(
    name = "kfrag",
    version,
    about = "Keyless data fragmentation for multi-site storage"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fragment a file into a directory of fragment files plus a manifest.
    Split(SplitArgs),
    /// Reassemble a file from fragment files.
    Join(JoinArgs),
    /// Store the fragments of a split directory on storage sites.
    Disperse(DisperseArgs),
    /// Retrieve dispersed fragments into a local directory.
    Fetch(FetchArgs),
    /// Fragment a file in memory and report fragment statistics.
    Analyze(AnalyzeArgs),
    /// Measure fragmentation and defragmentation throughput.
    Bench(BenchArgs),
}

#[derive(Args, Clone)]
struct SchemeArgs {
    #[arg(long, default_value = "proposed")]
    scheme: SchemeId,
    /// Fragments needed for reconstruction.
    #[arg(long, default_value_t = 4)]
    k: usize,
    /// Number of sites; for the proposed scheme also the neighbor count.
    #[arg(long, default_value_t = 2)]
    c: usize,
    #[arg(long, default_value_t = 250)]
    block_size: usize,
    /// Total fragments; above k the proposed scheme adds parity.
    #[arg(long)]
    n: Option<usize>,
}

impl SchemeArgs {
    fn config(&self) -> Result<SchemeConfig> {
        let cfg = SchemeConfig {
            scheme: self.scheme,
            k: self.k,
            n: self.n.unwrap_or(self.k),
            c: self.c,
            block_size: self.block_size,
        };
        cfg.validate().map_err(|e| match e {
            Error::Param(msg) => Error::Param(format!(
                "{msg} (--scheme {} --k {} --c {} --block-size {} --n {})",
                cfg.scheme, cfg.k, cfg.c, cfg.block_size, cfg.n
            )),
            other => other,
        })?;
        if cfg.c == 0 {
            return Err(Error::param("--c must be at least 1"));
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct SplitArgs {
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    #[command(flatten)]
    scheme: SchemeArgs,
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Args)]
struct JoinArgs {
    #[arg(
        long,
        value_name = "FILE",
        conflicts_with = "frags",
        required_unless_present = "frags"
    )]
    manifest: Option<PathBuf>,
    #[arg(long, value_name = "FILE", num_args = 1..)]
    frags: Vec<PathBuf>,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct DisperseArgs {
    #[arg(long, value_name = "FILE")]
    manifest: PathBuf,
    /// One directory per site; parity needs one extra.
    #[arg(long, value_name = "DIR,DIR", value_delimiter = ',', required = true)]
    sites: Vec<PathBuf>,
    /// Object prefix; defaults to the manifest's run id.
    #[arg(long)]
    run_id: Option<String>,
    /// Where to write the dispersal manifest [default: dispersed.json next
    /// to the input manifest].
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FetchArgs {
    #[arg(long, value_name = "FILE")]
    manifest: PathBuf,
    #[arg(long, value_name = "DIR,DIR", value_delimiter = ',', required = true)]
    sites: Vec<PathBuf>,
    /// Directory receiving the fragment files and a local manifest.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    #[command(flatten)]
    scheme: SchemeArgs,
    #[arg(long, value_name = "FILE")]
    report: PathBuf,
    /// Delay-1 recurrence pairs of the first fragment.
    #[arg(long, value_name = "FILE")]
    recurrence_csv: Option<PathBuf>,
    /// Byte distribution of the first fragment.
    #[arg(long, value_name = "FILE")]
    pdf_csv: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// e.g. "proposed:k=4,8,16:c=2,3:b=16,34,250;sss:k=2,4,8"
    #[arg(long, default_value = DEFAULT_GRID)]
    grid: String,
    /// Payload size in MB (10^6 bytes).
    #[arg(long, default_value_t = 100)]
    payload_mb: usize,
    #[arg(long, default_value_t = 5)]
    reps: usize,
    #[arg(long, default_value_t = 1)]
    warmups: usize,
    /// Also time the multi-threaded decode of the proposed scheme.
    #[arg(long)]
    parallel_decode: bool,
    /// CSV output; JSON goes next to it with a .json extension.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).map_err(|e| Error::io(path, e))
}

fn manifest_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn sites_from(dirs: &[PathBuf]) -> Vec<StorageSite> {
    dirs.iter()
        .enumerate()
        .map(|(i, d)| StorageSite::local(i, d))
        .collect()
}

fn print_assignment(m: &Manifest) {
    println!("site  fragments");
    for site in 0..m.site_count() {
        let mut names: Vec<(usize, &str)> = m
            .fragments
            .iter()
            .filter(|e| e.site == site)
            .map(|e| (e.index, e.name.as_str()))
            .collect();
        names.sort();
        let list: Vec<&str> = names.into_iter().map(|(_, n)| n).collect();
        let location = m.sites.get(site).map(String::as_str).unwrap_or("");
        println!("{site:<4}  {}  {location}", list.join(" "));
    }
}

fn split(args: SplitArgs) -> Result<()> {
    let cfg = args.scheme.config()?;
    let data = read(&args.input)?;
    let mut rng = rng_from_env();
    let bundle = match cfg.split(&data, &mut rng)? {
        Fragments::Codec(fs) => Bundle::from_codec(&fs, cfg.n)?,
        Fragments::Baseline(frags) => Bundle::from_baseline(&frags, cfg.c)?,
    };
    let run_id = dispersal::new_run_id(&mut rng);
    let manifest = dispersal::write_local(&bundle, &args.out, &run_id)?;
    manifest.write(&args.out.join(MANIFEST_NAME))?;
    for e in &manifest.fragments {
        println!("{}", args.out.join(&e.name).display());
    }
    eprintln!(
        "{} fragments ({}, k={}, n={}) and {MANIFEST_NAME} written to {}",
        manifest.n,
        manifest.scheme,
        manifest.k,
        manifest.n,
        args.out.display()
    );
    Ok(())
}

fn join(args: JoinArgs) -> Result<()> {
    let files = match &args.manifest {
        Some(path) => {
            let m = Manifest::read(path)?;
            let objects = dispersal::read_local(&m, &manifest_dir(path))?;
            let missing: Vec<usize> = (0..m.n).filter(|&i| objects[i].is_none()).collect();
            if !missing.is_empty() {
                eprintln!("missing fragment files: {missing:?}");
            }
            let present: Vec<Vec<u8>> = objects.into_iter().flatten().collect();
            if present.is_empty() {
                return Err(Error::threshold(m.k, 0, missing));
            }
            present
        }
        None => args.frags.iter().map(|p| read(p)).collect::<Result<_>>()?,
    };
    let data = dispersal::reassemble(files)?;
    write(&args.out, &data)?;
    println!("{}  {}", dispersal::sha256_hex(&data), args.out.display());
    Ok(())
}

fn disperse(args: DisperseArgs) -> Result<()> {
    let local = Manifest::read(&args.manifest)?;
    let sites = sites_from(&args.sites);
    if sites.len() != local.site_count() {
        return Err(Error::param(format!(
            "--sites lists {} directories, this run needs {}",
            sites.len(),
            local.site_count()
        )));
    }
    let objects = dispersal::read_local(&local, &manifest_dir(&args.manifest))?;
    let missing: Vec<usize> = (0..local.n).filter(|&i| objects[i].is_none()).collect();
    if !missing.is_empty() {
        return Err(Error::threshold(local.n, local.n - missing.len(), missing));
    }
    let bundle = Bundle::from_manifest(&local, objects.into_iter().flatten().collect())?;
    let run_id = args.run_id.unwrap_or_else(|| local.run_id.clone());
    let manifest = dispersal::store(&bundle, &sites, &run_id)?;
    let out = args
        .out
        .unwrap_or_else(|| manifest_dir(&args.manifest).join("dispersed.json"));
    manifest.write(&out)?;
    print_assignment(&manifest);
    eprintln!("dispersal manifest written to {}", out.display());
    Ok(())
}

fn fetch(args: FetchArgs) -> Result<()> {
    let dispersed = Manifest::read(&args.manifest)?;
    let sites = sites_from(&args.sites);
    if sites.len() != dispersed.site_count() {
        return Err(Error::param(format!(
            "--sites lists {} directories, this run needs {}",
            sites.len(),
            dispersed.site_count()
        )));
    }
    let objects = dispersal::fetch(&dispersed, &sites)?;
    fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    let mut local = dispersed.clone();
    local.sites.clear();
    let mut missing = Vec::new();
    for (entry, object) in local.fragments.iter_mut().zip(&objects) {
        entry.name = entry
            .name
            .rsplit('/')
            .next()
            .unwrap_or(&entry.name)
            .to_string();
        match object {
            Some(bytes) => write(&args.out.join(&entry.name), bytes)?,
            None => missing.push(entry.index),
        }
    }
    local.write(&args.out.join(MANIFEST_NAME))?;
    print_assignment(&dispersed);
    if missing.is_empty() {
        eprintln!(
            "all {} fragments retrieved into {}",
            local.n,
            args.out.display()
        );
    } else {
        eprintln!("missing fragments: {missing:?}");
    }
    let present = local.n - missing.len();
    if present < local.k {
        return Err(Error::threshold(local.k, present, missing));
    }
    Ok(())
}

fn analyze(args: AnalyzeArgs) -> Result<()> {
    let cfg = args.scheme.config()?;
    let data = read(&args.input)?;
    let reports = match cfg.split(&data, &mut rng_from_env())? {
        Fragments::Codec(fs) => analysis::analyze_fragments(fs.fragments(), &data)?,
        Fragments::Baseline(frags) => analysis::analyze_fragments(&frags, &data)?,
    };
    let codec = cfg.scheme == SchemeId::Proposed;
    let params = ReportParams {
        k: cfg.k,
        n: reports.len(),
        c: codec.then_some(cfg.c),
        block_size: codec.then_some(cfg.block_size),
    };
    let report = AnalysisReport::new(cfg.scheme, params, &data, reports)?;
    report.write_json(create(&args.report)?)?;
    if let Some(path) = &args.recurrence_csv {
        analysis::write_recurrence_csv(&report.fragments[0].recurrence, create(path)?)?;
    }
    if let Some(path) = &args.pdf_csv {
        analysis::write_pdf_csv(&report.fragments[0].pdf, create(path)?)?;
    }

    println!(
        "input: {} bytes, entropy {:.4}",
        report.input_bytes, report.input_entropy
    );
    for f in &report.fragments {
        println!(
            "f{:<3} entropy {:.4}  chi2 {:>10.2} {}  bitdiff {:.4}",
            f.index,
            f.entropy,
            f.chi2,
            if f.chi2_pass { "PASS" } else { "FAIL" },
            f.bit_difference
        );
    }
    let passed = report.fragments.iter().filter(|f| f.chi2_pass).count();
    println!(
        "chi2 {}: {passed}/{} fragments uniform at alpha=0.05; max |r| {:.4}",
        if report.all_chi2_pass { "PASS" } else { "FAIL" },
        report.fragments.len(),
        report.max_abs_correlation
    );
    Ok(())
}

fn run_bench(args: BenchArgs) -> Result<()> {
    let points = bench::parse_grid(&args.grid)?;
    let cfg = BenchConfig {
        points,
        payload_bytes: args
            .payload_mb
            .checked_mul(1_000_000)
            .ok_or_else(|| Error::param("--payload-mb too large"))?,
        repetitions: args.reps,
        warmups: args.warmups,
        parallel_decode: args.parallel_decode,
        seed: 0,
    };
    if args.out.extension().is_some_and(|e| e == "json") {
        return Err(Error::param(
            "--out names the CSV file; JSON is written next to it",
        ));
    }
    let results = bench::run_bench(&cfg)?;
    let json = args.out.with_extension("json");
    bench::emit_results(&results, create(&args.out)?, create(&json)?)?;
    bench::write_csv(&results, std::io::stdout().lock())?;
    eprintln!(
        "results written to {} and {}",
        args.out.display(),
        json.display()
    );
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e.kind() {
        ErrorKind::Parameter => 2,
        ErrorKind::Io => 3,
        ErrorKind::Threshold => 4,
        ErrorKind::Integrity => 5,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Split(a) => split(a),
        Command::Join(a) => join(a),
        Command::Disperse(a) => disperse(a),
        Command::Fetch(a) => fetch(a),
        Command::Analyze(a) => analyze(a),
        Command::Bench(a) => run_bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kfrag: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
