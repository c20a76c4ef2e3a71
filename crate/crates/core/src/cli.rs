//! Command-line front end.
//!
//! Every subcommand computes its outputs in memory, stages them in a
//! temporary directory next to `--out`, and moves them into place only after
//! everything succeeded. Each output directory receives a `manifest.json`
//! holding the canonical argument vector; `corrgeo replay` re-runs it.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::export::{
    write_eigs_csv, write_entities_rolling_csv, write_graph_dot, write_json, write_mst_csv, write_mst_dot,
    write_nodes_csv, write_rolling_csv, EmbeddingExport, GraphExport,
};
use crate::geometry::{
    distance_matrix, embed, leading_exceedances, reduce, surrogate_spectra, volume, DimensionOptions, Embedding,
    NullModel,
};
use crate::network::{clustering_of_distances, exposure_network, mst, node_stats};
use crate::panel::{load_labels, load_panel, Format, Labels, Panel};
use crate::rolling::{rolling_analysis, rolling_summary, Dim, MetricSeries, RollingConfig, WindowMetrics};
use crate::synth::{gen_factor_panel, gen_regime_panel, FactorSpec, Ramp, RegimeSpec};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Parser)]
#[command(name = "corrgeo", version, about = "Correlation geometry and exposure networks for panels of time series")]
pub struct Cli {
    /// Worker threads (outputs do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Embedding coordinates and eigenvalue spectrum of one window.
    Embed(GeometryArgs),
    /// Effective dimension from the surrogate eigenvalue test.
    Dimension(GeometryArgs),
    /// Volume of the reduced space.
    Volume(GeometryArgs),
    /// Exposure network, node statistics and graph exports.
    Network(NetworkArgs),
    /// Minimum spanning tree of the distance graph.
    Mst(MstArgs),
    /// Rolling-window V, C, strength and closeness series.
    Rolling(RollingArgs),
    /// Synthetic factor or regime panel.
    Synth(SynthArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct InputArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "long")]
    pub format: Format,
    #[arg(long, default_value_t = 0)]
    pub window_start: usize,
    /// Defaults to every period from the window start on.
    #[arg(long)]
    pub window_length: Option<usize>,
    #[arg(long)]
    pub drop_constant: bool,
    #[arg(long)]
    pub labels: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SurrogateArgs {
    #[arg(long, default_value_t = 100)]
    pub permutations: usize,
    #[arg(long, default_value_t = 0.95)]
    pub quantile: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "null", default_value = "permutation")]
    pub null_model: NullModel,
}

impl SurrogateArgs {
    fn options(&self) -> DimensionOptions {
        DimensionOptions {
            permutations: self.permutations,
            quantile: self.quantile,
            seed: self.seed,
            null_model: self.null_model,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GeometryArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value = "3")]
    pub dim: Dim,
    #[command(flatten)]
    pub surrogate: SurrogateArgs,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct NetworkArgs {
    #[command(flatten)]
    pub geometry: GeometryArgs,
    #[arg(long, default_value_t = 10)]
    pub topk: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MstArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Use distances in the leading `dim` directions instead of the full
    /// correlation distances.
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RollingArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "long")]
    pub format: Format,
    #[arg(long, default_value_t = 56)]
    pub window_length: usize,
    #[arg(long, default_value_t = 1)]
    pub step: usize,
    #[arg(long, default_value = "3")]
    pub dim: Dim,
    #[command(flatten)]
    pub surrogate: SurrogateArgs,
    #[arg(long)]
    pub drop_constant: bool,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 24)]
    pub entities: usize,
    #[arg(long, default_value_t = 110)]
    pub periods: usize,
    #[arg(long, default_value_t = 3)]
    pub factors: usize,
    #[arg(long, default_value_t = 0.3)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Common-factor weight path `start:end`; makes a regime panel.
    #[arg(long)]
    pub ramp: Option<Ramp>,
    /// Entity with a flipped common-factor loading (repeatable).
    #[arg(long)]
    pub eccentric: Vec<String>,
    #[arg(long, default_value = "long")]
    pub format: Format,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    /// Arguments without `--out` and `--threads`.
    pub args: Vec<String>,
    pub inputs: Vec<String>,
    pub parameters: serde_json::Value,
    pub artifacts: Vec<String>,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub results: serde_json::Value,
}

/// Files produced by one run, written together or not at all.
#[derive(Debug, Default)]
pub struct OutputSet {
    files: Vec<(String, Vec<u8>)>,
}

impl OutputSet {
    pub fn add(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_string(), bytes));
    }

    pub fn names(&self) -> Vec<String> {
        self.files.iter().map(|(n, _)| n.clone()).collect()
    }

    /// Stages all files in a sibling temporary directory, then renames them
    /// into `out`.
    pub fn commit(self, out: &Path) -> Result<()> {
        let parent = match out.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        fs::create_dir_all(&parent)?;
        let staging = tempfile::Builder::new().prefix(".corrgeo-").tempdir_in(&parent)?;
        for (name, bytes) in &self.files {
            fs::write(staging.path().join(name), bytes)?;
        }
        if !out.exists() {
            let path = staging.keep();
            if let Err(e) = fs::rename(&path, out) {
                let _ = fs::remove_dir_all(&path);
                return Err(e.into());
            }
            return Ok(());
        }
        for (name, _) in &self.files {
            fs::rename(staging.path().join(name), out.join(name))?;
        }
        Ok(())
    }
}

fn bytes_of(f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

/// Arguments as recorded in the manifest: no program name, `--out` or
/// `--threads`.
fn canonical_args(argv: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        if a == "--out" || a == "--threads" {
            it.next();
        } else if !(a.starts_with("--out=") || a.starts_with("--threads=")) {
            out.push(a.clone());
        }
    }
    out
}

fn open_input(path: &Path) -> Result<fs::File> {
    fs::File::open(path).map_err(|e| Error::invalid(format!("cannot open {}: {e}", path.display())))
}

fn read_panel(input: &InputArgs) -> Result<(Panel, Vec<String>)> {
    let panel = load_panel(open_input(&input.input)?, input.format)?;
    let length = input
        .window_length
        .unwrap_or_else(|| panel.n_periods().saturating_sub(input.window_start));
    let window = panel.window(input.window_start, length)?;
    if input.drop_constant {
        let (p, dropped) = window.drop_constant()?;
        for id in &dropped {
            eprintln!("warning: dropped constant series {id}");
        }
        Ok((p, dropped))
    } else {
        Ok((window, Vec::new()))
    }
}

fn read_labels(input: &InputArgs) -> Result<Labels> {
    match &input.labels {
        Some(path) => load_labels(open_input(path)?),
        None => Ok(Labels::default()),
    }
}

fn window_labels(panel: &Panel) -> (String, String) {
    let l = panel.period_labels();
    (l[0].clone(), l[l.len() - 1].clone())
}

/// Embedding with surrogate statistics (when requested) and the dimension
/// to use downstream. The second element is the raw surrogate-test result.
fn embed_with_dim(panel: &Panel, dim: Dim, surrogate: &SurrogateArgs) -> Result<(Embedding, usize, Option<usize>)> {
    let emb = embed(&distance_matrix(panel)?)?;
    let n = panel.n_entities();
    let emb = if surrogate.permutations > 0 || dim == Dim::Auto {
        let stats = surrogate_spectra(panel, &surrogate.options())?;
        emb.with_surrogate_stats(stats)
    } else {
        emb
    };
    match dim {
        Dim::Fixed(d) => {
            if d == 0 || d >= n {
                return Err(Error::invalid(format!("dimension {d} outside [1, {}]", n - 1)));
            }
            Ok((emb, d, None))
        }
        Dim::Auto => {
            let stats = emb.surrogate_stats().expect("surrogates computed for auto");
            let found = leading_exceedances(emb.eigenvalues(), &stats.threshold);
            Ok((emb, found.max(1), Some(found)))
        }
    }
}

struct Run {
    outputs: OutputSet,
    inputs: Vec<String>,
    parameters: serde_json::Value,
    results: serde_json::Value,
}

fn inputs_of(input: &InputArgs) -> Vec<String> {
    let mut v = vec![input.input.display().to_string()];
    if let Some(l) = &input.labels {
        v.push(l.display().to_string());
    }
    v
}

fn run_embed(args: &GeometryArgs) -> Result<Run> {
    let (panel, dropped) = read_panel(&args.input)?;
    let (emb, dim, found) = embed_with_dim(&panel, args.dim, &args.surrogate)?;
    let (ws, we) = window_labels(&panel);
    let mut outputs = OutputSet::default();
    outputs.add(
        "embedding.json",
        bytes_of(|b| write_json(b, &EmbeddingExport::new(&emb, dim, (&ws, &we))))?,
    );
    outputs.add("eigs.csv", bytes_of(|b| write_eigs_csv(b, &emb))?);
    Ok(Run {
        outputs,
        inputs: inputs_of(&args.input),
        parameters: serde_json::to_value(args)?,
        results: serde_json::json!({ "dim": dim, "effective_dim": found, "dropped": dropped }),
    })
}

fn run_dimension(args: &GeometryArgs) -> Result<Run> {
    let (panel, dropped) = read_panel(&args.input)?;
    let auto = Dim::Auto;
    let (emb, _, found) = embed_with_dim(&panel, auto, &args.surrogate)?;
    let found = found.expect("auto dimension");
    let mut outputs = OutputSet::default();
    outputs.add("eigs.csv", bytes_of(|b| write_eigs_csv(b, &emb))?);
    let (ws, we) = window_labels(&panel);
    let summary = serde_json::json!({
        "window_start": ws,
        "window_end": we,
        "effective_dim": found,
        "eigenvalues": emb.eigenvalues().iter().collect::<Vec<_>>(),
        "surrogate": emb.surrogate_stats(),
    });
    outputs.add("dimension.json", bytes_of(|b| write_json(b, &summary))?);
    Ok(Run {
        outputs,
        inputs: inputs_of(&args.input),
        parameters: serde_json::to_value(args)?,
        results: serde_json::json!({ "effective_dim": found, "dropped": dropped }),
    })
}

fn run_volume(args: &GeometryArgs) -> Result<Run> {
    let (panel, dropped) = read_panel(&args.input)?;
    let surrogate = SurrogateArgs {
        permutations: if args.dim == Dim::Auto { args.surrogate.permutations } else { 0 },
        ..args.surrogate.clone()
    };
    let (emb, dim, found) = embed_with_dim(&panel, args.dim, &surrogate)?;
    let vol = volume(&emb, dim)?;
    if vol.degenerate {
        eprintln!("warning: one of the top {dim} eigenvalues is zero; volume is 0");
    }
    let (ws, we) = window_labels(&panel);
    let summary = serde_json::json!({
        "window_start": ws,
        "window_end": we,
        "dim": dim,
        "volume": vol.value,
        "degenerate": vol.degenerate,
        "eigenvalues": emb.eigenvalues().iter().collect::<Vec<_>>(),
    });
    let mut outputs = OutputSet::default();
    outputs.add("volume.json", bytes_of(|b| write_json(b, &summary))?);
    Ok(Run {
        outputs,
        inputs: inputs_of(&args.input),
        parameters: serde_json::to_value(args)?,
        results: serde_json::json!({ "dim": dim, "effective_dim": found, "volume": vol.value, "dropped": dropped }),
    })
}

fn run_network(args: &NetworkArgs) -> Result<Run> {
    let g = &args.geometry;
    let (panel, dropped) = read_panel(&g.input)?;
    let labels = read_labels(&g.input)?;
    let surrogate = SurrogateArgs {
        permutations: if g.dim == Dim::Auto { g.surrogate.permutations } else { 0 },
        ..g.surrogate.clone()
    };
    let (emb, dim, found) = embed_with_dim(&panel, g.dim, &surrogate)?;
    let rs = reduce(&emb, dim)?;
    let net = exposure_network(&rs)?;
    for &(i, j) in net.floor_applied() {
        eprintln!(
            "warning: distance floor applied to ({}, {})",
            net.entity_ids()[i],
            net.entity_ids()[j]
        );
    }
    let pairs = net.len() * (net.len() - 1) / 2;
    if args.topk > pairs {
        return Err(Error::invalid(format!("--topk {} exceeds the {pairs} links", args.topk)));
    }
    let stats = node_stats(&net, &rs);
    let (ws, we) = window_labels(&panel);
    let graph = GraphExport::new(&net, &stats, &labels, args.topk, (&ws, &we));

    let vol = volume(&emb, dim)?;
    let clustering = clustering_of_distances(rs.distances())?;
    let window_row = MetricSeries {
        entity_ids: panel.entity_ids().to_vec(),
        config: RollingConfig {
            window_length: panel.n_periods(),
            dim: g.dim,
            ..Default::default()
        },
        window_starts: vec![g.input.window_start],
        windows: vec![WindowMetrics {
            start_label: ws.clone(),
            end_label: we.clone(),
            entity_ids: panel.entity_ids().to_vec(),
            dropped: dropped.clone(),
            effective_dim: found,
            dim,
            volume: vol.value,
            volume_degenerate: vol.degenerate,
            clustering,
            strength: stats.iter().map(|s| s.strength).collect(),
            closeness: stats.iter().map(|s| s.closeness).collect(),
        }],
    };

    let mut outputs = OutputSet::default();
    outputs.add("graph.json", bytes_of(|b| write_json(b, &graph))?);
    outputs.add("graph.dot", bytes_of(|b| write_graph_dot(b, &graph))?);
    outputs.add("nodes.csv", bytes_of(|b| write_nodes_csv(b, &stats, (&ws, &we)))?);
    outputs.add("window.csv", bytes_of(|b| write_rolling_csv(b, &window_row))?);
    let floored: Vec<_> = net
        .floor_applied()
        .iter()
        .map(|&(i, j)| [net.entity_ids()[i].clone(), net.entity_ids()[j].clone()])
        .collect();
    Ok(Run {
        outputs,
        inputs: inputs_of(&g.input),
        parameters: serde_json::to_value(args)?,
        results: serde_json::json!({
            "dim": dim,
            "effective_dim": found,
            "volume": vol.value,
            "clustering": clustering,
            "floor_applied": floored,
            "dropped": dropped,
        }),
    })
}

fn run_mst(args: &MstArgs) -> Result<Run> {
    let (panel, dropped) = read_panel(&args.input)?;
    let dm = distance_matrix(&panel)?;
    let tree = match args.dim {
        None => mst(dm.matrix())?,
        Some(d) => mst(reduce(&embed(&dm)?, d)?.distances())?,
    };
    let ids = panel.entity_ids();
    let mut outputs = OutputSet::default();
    outputs.add("mst.csv", bytes_of(|b| write_mst_csv(b, &tree, ids))?);
    outputs.add("mst.dot", bytes_of(|b| write_mst_dot(b, &tree, ids))?);
    Ok(Run {
        outputs,
        inputs: inputs_of(&args.input),
        parameters: serde_json::to_value(args)?,
        results: serde_json::json!({ "total_distance": tree.total_weight(), "edges": tree.edges.len(), "dropped": dropped }),
    })
}

fn run_rolling(args: &RollingArgs) -> Result<Run> {
    let panel = load_panel(open_input(&args.input)?, args.format)?;
    let cfg = RollingConfig {
        window_length: args.window_length,
        step: args.step,
        dim: args.dim,
        permutations: args.surrogate.permutations,
        quantile: args.surrogate.quantile,
        seed: args.surrogate.seed,
        null_model: args.surrogate.null_model,
        drop_constant: args.drop_constant,
    };
    let ms = rolling_analysis(&panel, &cfg)?;
    let summary = rolling_summary(&ms)?;
    let mut outputs = OutputSet::default();
    outputs.add("rolling.csv", bytes_of(|b| write_rolling_csv(b, &ms))?);
    outputs.add("entities_rolling.csv", bytes_of(|b| write_entities_rolling_csv(b, &ms))?);
    outputs.add("summary.json", bytes_of(|b| write_json(b, &summary))?);
    Ok(Run {
        outputs,
        inputs: vec![args.input.display().to_string()],
        parameters: serde_json::to_value(args)?,
        results: serde_json::json!({ "windows": ms.len() }),
    })
}

fn run_synth(args: &SynthArgs) -> Result<Run> {
    let base = FactorSpec::new(args.entities, args.periods, args.factors, args.sigma, args.seed);
    let panel = match args.ramp {
        Some(ramp) => gen_regime_panel(&RegimeSpec {
            base,
            ramp,
            eccentric: args.eccentric.clone(),
        })?,
        None if !args.eccentric.is_empty() => gen_regime_panel(&RegimeSpec {
            base,
            ramp: Ramp::constant(0.5),
            eccentric: args.eccentric.clone(),
        })?,
        None => gen_factor_panel(&base)?,
    };
    let mut outputs = OutputSet::default();
    outputs.add("panel.csv", bytes_of(|b| panel.write_csv(b, args.format))?);
    Ok(Run {
        outputs,
        inputs: Vec::new(),
        parameters: serde_json::to_value(args)?,
        results: serde_json::Value::Null,
    })
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Embed(_) => "embed",
        Command::Dimension(_) => "dimension",
        Command::Volume(_) => "volume",
        Command::Network(_) => "network",
        Command::Mst(_) => "mst",
        Command::Rolling(_) => "rolling",
        Command::Synth(_) => "synth",
        Command::Replay(_) => "replay",
    }
}

fn out_dir(cmd: &Command) -> &Path {
    match cmd {
        Command::Embed(a) | Command::Dimension(a) | Command::Volume(a) => &a.out,
        Command::Network(a) => &a.geometry.out,
        Command::Mst(a) => &a.out,
        Command::Rolling(a) => &a.out,
        Command::Synth(a) => &a.out,
        Command::Replay(a) => &a.out,
    }
}

fn execute(cli: Cli, argv: &[String]) -> Result<()> {
    let cmd = &cli.command;
    if let Command::Replay(r) = cmd {
        let manifest: RunManifest = serde_json::from_reader(open_input(&r.manifest)?)?;
        let mut args = vec!["corrgeo".to_string()];
        args.extend(manifest.args.iter().cloned());
        args.push("--out".into());
        args.push(r.out.display().to_string());
        if let Some(t) = cli.threads {
            args.push(format!("--threads={t}"));
        }
        return run(args);
    }

    let run = match cmd {
        Command::Embed(a) => run_embed(a)?,
        Command::Dimension(a) => run_dimension(a)?,
        Command::Volume(a) => run_volume(a)?,
        Command::Network(a) => run_network(a)?,
        Command::Mst(a) => run_mst(a)?,
        Command::Rolling(a) => run_rolling(a)?,
        Command::Synth(a) => run_synth(a)?,
        Command::Replay(_) => unreachable!(),
    };
    let mut outputs = run.outputs;
    let mut artifacts = outputs.names();
    artifacts.push(MANIFEST_FILE.to_string());
    let manifest = RunManifest {
        tool: "corrgeo".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        subcommand: command_name(cmd).into(),
        args: canonical_args(&argv[1..]),
        inputs: run.inputs,
        parameters: run.parameters,
        artifacts,
        results: run.results,
    };
    outputs.add(MANIFEST_FILE, bytes_of(|b| write_json(b, &manifest))?);
    outputs.commit(out_dir(cmd))
}

/// Parses `argv` (program name first) and runs the command.
///
/// Help and version requests print and return `Ok`.
pub fn run<I, T>(argv: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return Ok(());
            }
            return Err(Error::invalid(e.to_string().trim_end().to_string()));
        }
    };
    let argv: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    match cli.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
            pool.install(|| execute(cli, &argv))
        }
        None => execute(cli, &argv),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_args_strip_out_and_threads() {
        let argv: Vec<String> = ["embed", "--input", "a.csv", "--out", "x", "--threads=4", "--seed", "3", "--out=y"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(canonical_args(&argv), ["embed", "--input", "a.csv", "--seed", "3"]);
    }

    #[test]
    fn parse_errors_are_validation_errors() {
        let err = run(["corrgeo", "embed", "--bogus"]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(run(["corrgeo", "--help"]).is_ok());
    }
}
