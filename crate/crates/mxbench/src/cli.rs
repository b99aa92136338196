//! Command-line interface.
//!
//! Exit codes: 0 success, 1 validation or I/O problem, 2 verification
//! failure (a computed result contradicts a reference), 3 resource limit.
//! All file outputs are byte-identical across reruns with the same
//! arguments and seed.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::dataset::builder::{materialize, plan_dataset};
use crate::dataset::leak::{check_dataset, overlap_between_dirs};
use crate::dataset::manifest::DatasetManifest;
use crate::dataset::{formats, metrics};
use crate::dynamics::{
    sample_initial_conditions, simulate, write_trajectory_csv, ForceKind, SimConfig,
};
use crate::error::{Error, Result};
use crate::graph::{GraphKind, LabeledGraph};
use crate::multiplex::{
    basis_sets_for, brute_force_multiplex_with_budget, enumerate_multiplex, sparse_half,
    IsoClassCatalog, MultiplexNetwork,
};
use crate::sampling::{
    class_probabilities, p_sweep, rank_frequency, write_rank_frequency_csv, SamplingModel,
};

#[derive(Parser)]
#[command(
    name = "mxbench",
    version,
    about = "Isomorphism-class enumeration, sampling analysis and trajectory datasets for small multiplex networks"
)]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate multiplex isomorphism classes into a catalog file.
    Enumerate(EnumerateArgs),
    /// Exact class probabilities and rank-frequency tables for a catalog.
    Distribution(DistributionArgs),
    /// Materialize a trajectory dataset from a manifest.
    GenDataset(GenDatasetArgs),
    /// Simulate one network and write its trajectory as CSV.
    Simulate(SimulateArgs),
    /// Report class overlap between dataset splits.
    LeakCheck(LeakCheckArgs),
    /// Score predicted trajectories and networks against references.
    Metrics(MetricsArgs),
    /// Cross-check the class enumeration against brute force.
    Verify(VerifyArgs),
}

pub fn run(args: &[String]) -> i32 {
    let parsed = Cli::try_parse_from(
        std::iter::once("mxbench".to_string()).chain(args.iter().cloned()),
    );
    let cli = match parsed {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    if let Some(threads) = cli.threads {
        if rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .is_err()
        {
            eprintln!("note: thread pool already configured, --threads ignored");
        }
    }
    // Every run logs its version and arguments; each command echoes the
    // resolved settings (defaults included) before doing work.
    eprintln!("mxbench {} :: {}", crate::VERSION, args.join(" "));
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Verification(_) => 2,
                Error::ResourceLimit(_) => 3,
                _ => 1,
            }
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Enumerate(args) => cmd_enumerate(args),
        Command::Distribution(args) => cmd_distribution(args),
        Command::GenDataset(method) => cmd_gen_dataset(method),
        Command::Simulate(args) => cmd_simulate(args),
        Command::LeakCheck(args) => cmd_leak_check(args),
        Command::Metrics(args) => cmd_metrics(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

fn parse_kinds(s: &str) -> Result<Vec<GraphKind>> {
    s.split(',').map(GraphKind::parse).collect()
}

fn out_writer(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn load_catalog(path: &Path) -> Result<IsoClassCatalog> {
    let file = std::fs::File::open(path)
        .map_err(|e| Error::invalid(format!("cannot open {}: {e}", path.display())))?;
    IsoClassCatalog::read_from(std::io::BufReader::new(file))
}

#[derive(Args)]
struct EnumerateArgs {
    /// Vertex count.
    #[arg(long)]
    n: usize,
    /// Comma-separated layer kinds, e.g. `pairwise,collective` or `p,c`.
    #[arg(long, visible_alias = "kinds")]
    layers: String,
    /// Restrict pairwise basis sets to one class per complement pair.
    #[arg(long)]
    sparse: bool,
    /// Output file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_enumerate(args: EnumerateArgs) -> Result<()> {
    let kinds = parse_kinds(&args.layers)?;
    let mut sets = basis_sets_for(args.n, &kinds)?;
    if args.sparse {
        for (set, &kind) in sets.iter_mut().zip(&kinds) {
            if kind == GraphKind::Pairwise {
                *set = sparse_half(set)?;
            }
        }
    }
    eprintln!(
        "enumerating n={} kinds={} sparse={}",
        args.n,
        kinds.iter().map(|k| k.name()).collect::<Vec<_>>().join(","),
        args.sparse
    );
    let catalog = enumerate_multiplex(&sets, args.n)?;
    eprintln!(
        "{} classes, {} labeled networks",
        catalog.len(),
        catalog.total_orbit()
    );
    let mut w = out_writer(args.out.as_ref())?;
    catalog.write_to(&mut w)?;
    Ok(())
}

#[derive(Args)]
struct DistributionArgs {
    /// Catalog file produced by `enumerate`.
    #[arg(long)]
    catalog: PathBuf,
    /// original-er, uniform-basis or uniform-multiplex.
    #[arg(long, visible_alias = "model", default_value = "original_er")]
    method: String,
    /// Edge probability for original_er.
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    /// Rank-frequency CSV output (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Instead of one table, print max:min ratios across these p values.
    #[arg(long, value_delimiter = ',')]
    sweep: Option<Vec<f64>>,
}

fn cmd_distribution(args: DistributionArgs) -> Result<()> {
    let catalog = load_catalog(&args.catalog)?;
    eprintln!(
        "distribution over {} (n={}, {} classes): method={} p={}",
        args.catalog.display(),
        catalog.n,
        catalog.len(),
        args.method,
        args.p
    );
    let sets = basis_sets_for(catalog.n, &catalog.layer_kinds)?;
    if let Some(ps) = args.sweep {
        let points = p_sweep(&catalog, &sets, &ps)?;
        let mut w = out_writer(args.out.as_ref())?;
        writeln!(w, "p,original_er_ratio,uniform_basis_ratio")?;
        for point in points {
            writeln!(w, "{},{},{}", point.p, point.er_ratio, point.basis_ratio)?;
        }
        return Ok(());
    }
    let model = SamplingModel::parse(&args.method, Some(args.p))?;
    let probs = class_probabilities(&catalog, &sets, model)?;
    let rf = rank_frequency(&probs);
    eprintln!(
        "{}: {} classes in {} ranks, max:min = {}",
        model.name(),
        catalog.len(),
        rf.rows.len(),
        rf.ratio
            .as_ref()
            .map(|r| crate::sampling::rational_to_f64(r).to_string())
            .unwrap_or_else(|| "undefined".to_string())
    );
    let mut w = out_writer(args.out.as_ref())?;
    write_rank_frequency_csv(&mut w, &catalog, &rf)?;
    Ok(())
}

#[derive(Args)]
struct SimArgs {
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    subsample: Option<usize>,
    #[arg(long)]
    frames: Option<usize>,
    #[arg(long)]
    pos_std: Option<f64>,
    #[arg(long)]
    vel_norm: Option<f64>,
    #[arg(long)]
    softening: Option<f64>,
    /// Reflecting box half-width (off when omitted).
    #[arg(long)]
    box_half: Option<f64>,
    /// Spring constant for pairwise layers.
    #[arg(long)]
    spring_k: Option<f64>,
    /// Charge strength for collective layers.
    #[arg(long)]
    charge_strength: Option<f64>,
    /// Use finite springs with this rest length on pairwise layers.
    #[arg(long)]
    finite_spring_len: Option<f64>,
}

impl SimArgs {
    fn build(&self, kinds: &[GraphKind]) -> SimConfig {
        let mut cfg = SimConfig::for_kinds(kinds);
        if let Some(v) = self.dt {
            cfg.dt = v;
        }
        if let Some(v) = self.subsample {
            cfg.subsample = v;
        }
        if let Some(v) = self.frames {
            cfg.n_frames = v;
        }
        if let Some(v) = self.pos_std {
            cfg.pos_std = v;
        }
        if let Some(v) = self.vel_norm {
            cfg.vel_norm = v;
        }
        if let Some(v) = self.softening {
            cfg.softening = v;
        }
        cfg.box_half = self.box_half.or(cfg.box_half);
        for (force, &kind) in cfg.forces.iter_mut().zip(kinds) {
            match kind {
                GraphKind::Pairwise => {
                    let k = self.spring_k.unwrap_or(crate::dynamics::DEFAULT_SPRING_K);
                    *force = match self.finite_spring_len {
                        Some(length) => ForceKind::FiniteSpring { k, length },
                        None => ForceKind::Spring { k },
                    };
                }
                GraphKind::Collective => {
                    if let Some(strength) = self.charge_strength {
                        *force = ForceKind::Charge { strength };
                    }
                }
            }
        }
        cfg
    }
}

#[derive(Args)]
struct GenDatasetArgs {
    /// Dataset manifest: a hand-written generation request or the
    /// manifest.json of an existing dataset (which rebuilds it exactly).
    #[arg(long)]
    manifest: PathBuf,
    /// Output directory (required unless --plan-only).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the manifest's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Plan the splits and print diagnostics without simulating.
    #[arg(long)]
    plan_only: bool,
}

// Manifests are the single source of truth for a dataset: every parameter
// except a seed override comes from the manifest file, and the catalog is
// re-enumerated from its (n, layer_kinds), so `gen-dataset --manifest
// <dataset>/manifest.json` reproduces that dataset byte for byte.
fn cmd_gen_dataset(args: GenDatasetArgs) -> Result<()> {
    let file = std::fs::File::open(&args.manifest)
        .map_err(|e| Error::invalid(format!("cannot open {}: {e}", args.manifest.display())))?;
    let manifest = DatasetManifest::read_json(std::io::BufReader::new(file))?;
    let mut spec = manifest.to_spec();
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    if manifest.sim.forces.len() != manifest.layer_kinds.len() {
        return Err(Error::invalid(format!(
            "manifest declares {} layers but {} force laws",
            manifest.layer_kinds.len(),
            manifest.sim.forces.len()
        )));
    }
    let sets = basis_sets_for(manifest.n, &manifest.layer_kinds)?;
    let catalog = enumerate_multiplex(&sets, manifest.n)?;
    eprintln!(
        "dataset {}: method={} seed={} n={} layers={} ({} classes)",
        spec.name,
        spec.build.name(),
        spec.seed,
        manifest.n,
        manifest
            .layer_kinds
            .iter()
            .map(|k| k.name())
            .collect::<Vec<_>>()
            .join(","),
        catalog.len()
    );
    let plan = plan_dataset(&catalog, &spec)?;
    for report in &plan.reports {
        eprintln!("  {report}");
    }
    if args.plan_only {
        for split in &plan.splits {
            println!(
                "{}: {} samples, {} distinct classes",
                split.name,
                split.samples.len(),
                split.class_set().len()
            );
        }
        return Ok(());
    }
    let out = args
        .out
        .as_ref()
        .ok_or_else(|| Error::invalid("--out is required unless --plan-only"))?;
    let written = materialize(&plan, &catalog, out)?;
    for (name, summary) in &written.splits {
        println!(
            "{}: {} samples, {} distinct classes",
            name, summary.samples, summary.distinct_classes
        );
    }
    println!("written to {}", out.display());
    Ok(())
}

#[derive(Args)]
struct SimulateArgs {
    /// Layer in text form, repeatable: `n=5 kind=p edges=0-1,1-2`.
    #[arg(long = "layer", required = true)]
    layers: Vec<String>,
    /// Seed for the initial conditions.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    sim: SimArgs,
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let layers: Vec<LabeledGraph> = args
        .layers
        .iter()
        .map(|line| LabeledGraph::from_line(line))
        .collect::<Result<_>>()?;
    let network = MultiplexNetwork::new(layers)?;
    let cfg = args.sim.build(&network.kinds());
    eprintln!(
        "simulating {} layers on {} vertices, seed={}, dt={}, {} frames x {} steps",
        network.layer_count(),
        network.n(),
        args.seed,
        cfg.dt,
        cfg.n_frames,
        cfg.subsample
    );
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(args.seed);
    let init = sample_initial_conditions(network.n(), &cfg, &mut rng);
    let trajectory = simulate(&network, &init, &cfg)?;
    let first = &trajectory.frames[0];
    let last = trajectory.frames.last().unwrap();
    eprintln!(
        "energy: start={:.6} end={:.6}",
        crate::dynamics::total_energy(&network, &first.positions, &first.velocities, &cfg),
        crate::dynamics::total_energy(&network, &last.positions, &last.velocities, &cfg)
    );
    let mut w = out_writer(args.out.as_ref())?;
    write_trajectory_csv(&mut w, &trajectory)?;
    Ok(())
}

#[derive(Args)]
struct LeakCheckArgs {
    /// One dataset root (checks its manifest's contract), or two split
    /// directories to compare directly.
    #[arg(value_name = "DIR", num_args = 1..=2, required = true)]
    dirs: Vec<PathBuf>,
    /// With two directories: fail (exit 2) if any class is shared.
    #[arg(long)]
    expect_disjoint: bool,
}

fn cmd_leak_check(args: LeakCheckArgs) -> Result<()> {
    match args.dirs.as_slice() {
        [dataset] => {
            if args.expect_disjoint {
                return Err(Error::invalid(
                    "--expect-disjoint needs two split directories; a dataset's \
                     manifest already states which splits must be disjoint",
                ));
            }
            eprintln!("leak check over dataset {}", dataset.display());
            let report = check_dataset(dataset)?;
            for overlap in &report.overlaps {
                println!("{}", overlap.line());
            }
            if !report.is_clean() {
                return Err(Error::Verification(format!(
                    "{} split pair(s) share classes the build method forbids",
                    report.violations.len()
                )));
            }
            println!("ok: no forbidden overlap");
            Ok(())
        }
        [a, b] => {
            eprintln!(
                "leak check between {} and {} (expect_disjoint={})",
                a.display(),
                b.display(),
                args.expect_disjoint
            );
            let overlap = overlap_between_dirs(a, b)?;
            println!("{}", overlap.line());
            if args.expect_disjoint && overlap.shared > 0 {
                return Err(Error::Verification(format!(
                    "{} shared class(es)",
                    overlap.shared
                )));
            }
            Ok(())
        }
        _ => unreachable!("clap enforces 1..=2 directories"),
    }
}

#[derive(Args)]
struct MetricsArgs {
    /// Predicted trajectories: a trajectories.bin file or a split directory.
    #[arg(long)]
    pred: PathBuf,
    /// Reference trajectories: a trajectories.bin file or a split directory.
    #[arg(long)]
    truth: PathBuf,
    /// Score the first k predicted frames (frame 0 is the given input).
    #[arg(long, default_value_t = 20)]
    k: usize,
    /// Let same-kind prediction layers be reordered before edge scoring.
    #[arg(long)]
    match_layers: bool,
}

/// `<path>` may be a split directory or a trajectories.bin inside one.
/// Returns the file to read and the directory that holds it.
fn resolve_trajectory_file(path: &Path) -> Result<(PathBuf, PathBuf)> {
    let (file, dir) = if path.is_dir() {
        (path.join(formats::TRAJECTORY_FILE), path.to_path_buf())
    } else {
        let dir = path
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."));
        (path.to_path_buf(), dir)
    };
    if !file.is_file() {
        return Err(Error::invalid(format!(
            "no trajectory file at {}",
            file.display()
        )));
    }
    Ok((file, dir))
}

fn cmd_metrics(args: MetricsArgs) -> Result<()> {
    let (pred_file, pred_dir) = resolve_trajectory_file(&args.pred)?;
    let (truth_file, truth_dir) = resolve_trajectory_file(&args.truth)?;
    eprintln!(
        "metrics: pred={} truth={} k={} match_layers={}",
        pred_file.display(),
        truth_file.display(),
        args.k,
        args.match_layers
    );
    let read = |path: &Path| -> Result<Vec<crate::dynamics::Trajectory>> {
        let file = std::fs::File::open(path)
            .map_err(|e| Error::invalid(format!("cannot open {}: {e}", path.display())))?;
        formats::read_trajectories(&mut std::io::BufReader::new(file))
    };
    let pred = read(&pred_file)?;
    let truth = read(&truth_file)?;
    let frames = truth.first().map(|t| t.n_frames()).unwrap_or(0);
    if args.k + 1 > frames {
        return Err(Error::invalid(format!(
            "k={} needs {} frames per trajectory, found {frames}",
            args.k,
            args.k + 1
        )));
    }
    println!("mse{}: {:.6e}", args.k, metrics::mse_k(&pred, &truth, args.k)?);
    println!(
        "stationary{}: {:.6e}",
        args.k,
        metrics::stationary_mse_k(&truth, args.k)?
    );

    // score networks when both sides carry them
    let nets = |dir: &Path| -> Option<PathBuf> {
        let p = dir.join(formats::NETWORK_FILE);
        p.exists().then_some(p)
    };
    if let (Some(pp), Some(tp)) = (nets(&pred_dir), nets(&truth_dir)) {
        // layer kinds come from whichever side has a manifest upstream
        let kinds = pred_dir
            .parent()
            .and_then(|d| DatasetManifest::load(d).ok())
            .or_else(|| truth_dir.parent().and_then(|d| DatasetManifest::load(d).ok()))
            .map(|m| m.layer_kinds)
            .unwrap_or_default();
        if kinds.is_empty() {
            eprintln!("note: no manifest found next to either split; skipping edge accuracy");
        } else {
            let load = |p: &Path| -> Result<Vec<MultiplexNetwork>> {
                let file = std::fs::File::open(p)?;
                formats::read_networks(&mut std::io::BufReader::new(file), &kinds)
            };
            let report =
                metrics::edge_accuracy(&load(&pp)?, &load(&tp)?, args.match_layers)?;
            println!("edge_accuracy: {:.6}", report.overall);
            for (i, acc) in report.per_layer.iter().enumerate() {
                println!("edge_accuracy_layer{i}: {acc:.6}");
            }
            if report.matching.iter().enumerate().any(|(i, &j)| i != j) {
                eprintln!(
                    "note: prediction layers reordered as {:?} for scoring",
                    report.matching
                );
            }
        }
    }
    Ok(())
}

#[derive(Args)]
struct VerifyArgs {
    /// Only run cases with this vertex count.
    #[arg(long)]
    n: Option<usize>,
    /// Also run the larger cross-checks (slower).
    #[arg(long)]
    deep: bool,
    /// Labeled-tuple budget for the brute-force reference.
    #[arg(long, default_value_t = crate::multiplex::DEFAULT_BRUTE_FORCE_BUDGET)]
    budget: u128,
}

fn cmd_verify(args: VerifyArgs) -> Result<()> {
    use GraphKind::{Collective as C, Pairwise as P};
    let mut cases: Vec<(usize, Vec<GraphKind>)> = vec![
        (3, vec![P]),
        (3, vec![C]),
        (3, vec![P, P]),
        (3, vec![P, C]),
        (3, vec![C, P]),
        (3, vec![C, C]),
        (3, vec![P, C, P]),
        (3, vec![P, P, P]),
        (4, vec![P]),
        (4, vec![C]),
        (4, vec![P, P]),
        (4, vec![P, C]),
        (4, vec![C, P]),
        (4, vec![C, C]),
    ];
    let mut budget = args.budget;
    if args.deep {
        cases.push((4, vec![P, C, C]));
        cases.push((4, vec![C, P, C]));
        cases.push((4, vec![P, P, C]));
        cases.push((4, vec![P, C, P]));
        budget = budget.max(60_000);
    }
    if let Some(want) = args.n {
        cases.retain(|(n, _)| *n == want);
        if cases.is_empty() {
            return Err(Error::invalid(format!(
                "no verification cases for n={want} (try 3 or 4)"
            )));
        }
    }
    eprintln!(
        "verify: {} cases, budget={}, deep={}",
        cases.len(),
        budget,
        args.deep
    );
    let mut failures = 0usize;
    for (n, kinds) in &cases {
        let label = format!(
            "n={n} kinds={}",
            kinds.iter().map(|k| k.name()).collect::<Vec<_>>().join(",")
        );
        let sets = basis_sets_for(*n, kinds)?;
        let fast = enumerate_multiplex(&sets, *n)?;
        let slow = brute_force_multiplex_with_budget(&sets, *n, budget)?;
        let mut problems: Vec<String> = Vec::new();
        if fast.len() != slow.len() {
            problems.push(format!("{} classes vs {} brute-force", fast.len(), slow.len()));
        } else {
            for (a, b) in fast.classes.iter().zip(&slow.classes) {
                if a.class_id != b.class_id {
                    problems.push("class ids diverge".to_string());
                    break;
                }
                if a.orbit_size != b.orbit_size {
                    problems.push(format!(
                        "orbit mismatch for {}: {} vs {}",
                        a.class_id.hex(),
                        a.orbit_size,
                        b.orbit_size
                    ));
                    break;
                }
            }
        }
        let expected: u128 = kinds.iter().map(|k| k.labeled_count(*n)).product();
        if fast.total_orbit() != expected {
            problems.push(format!(
                "orbits sum to {} instead of {expected}",
                fast.total_orbit()
            ));
        }
        if problems.is_empty() {
            println!(
                "PASS {label}: {} classes, {} labeled networks",
                fast.len(),
                fast.total_orbit()
            );
        } else {
            failures += 1;
            println!("FAIL {label}: {}", problems.join("; "));
        }
    }
    if failures > 0 {
        return Err(Error::Verification(format!(
            "{failures} of {} enumeration checks failed",
            cases.len()
        )));
    }
    println!("all {} checks passed", cases.len());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_lists_parse() {
        assert_eq!(
            parse_kinds("p,collective").unwrap(),
            vec![GraphKind::Pairwise, GraphKind::Collective]
        );
        assert!(parse_kinds("p,x").is_err());
    }

    #[test]
    fn unknown_subcommands_exit_with_one() {
        assert_eq!(run(&["frobnicate".to_string()]), 1);
    }

    #[test]
    fn help_exits_zero() {
        assert_eq!(run(&["--help".to_string()]), 0);
    }
}
