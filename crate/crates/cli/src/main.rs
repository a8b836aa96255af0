use std::collections::BTreeMap;
use std::io::Write;
use std::net::{Ipv4Addr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use latflux_core::config::resolve_config;
use latflux_core::diagram::{layout_distance, quality_metrics, validate_line_diagram, LayoutJson};
use latflux_core::forces::write_trace_csv;
use latflux_core::lattice::LatticeJson;
use latflux_core::pipeline::{batch_evaluate, catalog_lattices, run};
use latflux_core::render::{render, Format, LabelMode, RenderOptions};
use latflux_core::{AdditiveBasis, Algorithm, ConceptLattice, FormalContext, Layout, PipelineConfig, RepresentationKind};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] latflux_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Input(String),
}

type CliResult<T> = Result<T, CliError>;

/// Settings read from `--config` or `LATFLUX_CONFIG`.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    pipeline: PipelineConfig,
    render: RenderOptions,
}

#[derive(Parser)]
#[command(name = "latflux", version, about = "Draw concept lattices as additive line diagrams")]
#[command(arg_required_else_help = true)]
struct Cli {
    /// TOML or JSON configuration file (overrides LATFLUX_CONFIG).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Output file (stdout when omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct LayoutInput {
    /// Layout JSON file.
    layout: PathBuf,
    /// Context file (.cxt or JSON).
    context: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum DrawFormat {
    Json,
    Svg,
    Tikz,
    /// The full pipeline result with all stages.
    Result,
}

#[derive(Clone, Copy, ValueEnum)]
enum Labels {
    None,
    Full,
    Reduced,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProjectionMode {
    /// Nearest additive placement, rescaled to the input height and recentred.
    Framed,
    /// Nearest additive placement.
    Orthogonal,
    /// Nearest additive placement up to translation.
    Affine,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the concept lattice of a context.
    Lattice {
        context: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Draw the lattice of a context.
    Draw {
        context: PathBuf,
        #[arg(long)]
        algo: Algorithm,
        #[arg(long, value_enum, default_value = "json")]
        format: DrawFormat,
        #[arg(long, value_enum)]
        labels: Option<Labels>,
        /// Overrides the configured seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Writes the energy trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
    /// Project a layout onto the additive diagrams.
    Project {
        #[command(flatten)]
        input: LayoutInput,
        #[arg(long, value_enum, default_value = "framed")]
        mode: ProjectionMode,
        #[command(flatten)]
        out: Output,
    },
    /// Report whether a layout is doubly additive.
    CheckAdditive {
        #[command(flatten)]
        input: LayoutInput,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Round all element vectors to a grid.
    Snap {
        #[command(flatten)]
        input: LayoutInput,
        #[arg(long)]
        grid: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Validity and quality metrics of a layout.
    Metrics {
        #[command(flatten)]
        input: LayoutInput,
        /// Reference layout for the layout distance.
        #[arg(long)]
        reference: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
    /// Render a layout as SVG, TikZ or JSON.
    Render {
        #[command(flatten)]
        input: LayoutInput,
        #[arg(long)]
        format: Option<Format>,
        #[arg(long, value_enum)]
        labels: Option<Labels>,
        #[command(flatten)]
        out: Output,
    },
    /// Evaluate algorithms on all 126 lattices with four meet-irreducibles.
    Eval126 {
        /// Algorithms to run (default: all).
        #[arg(long, value_delimiter = ',')]
        algo: Vec<Algorithm>,
        /// Directory of reference layouts named `<lattice-id>.json`.
        #[arg(long)]
        references: Option<PathBuf>,
        /// CSV file for the per-run table (stdout when omitted).
        #[command(flatten)]
        out: Output,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value_t = latflux_service::DEFAULT_PORT)]
        port: u16,
    },
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write_out(out: &Output, content: &[u8]) -> CliResult<()> {
    match &out.output {
        Some(path) => std::fs::write(path, content).map_err(|source| CliError::Io { path: path.clone(), source }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content)
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source })
        }
    }
}

fn json_out<T: Serialize>(out: &Output, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(latflux_core::Error::from)?;
    text.push('\n');
    write_out(out, text.as_bytes())
}

fn load_lattice(path: &Path) -> CliResult<ConceptLattice> {
    Ok(ConceptLattice::from_context(&FormalContext::parse_any(&read(path)?)?))
}

fn load_layout(path: &Path, lat: &ConceptLattice) -> CliResult<Layout> {
    let json: LayoutJson = serde_json::from_str(&read(path)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(json.to_layout(lat)?)
}

fn load_input(input: &LayoutInput) -> CliResult<(ConceptLattice, Layout)> {
    let lat = load_lattice(&input.context)?;
    let layout = load_layout(&input.layout, &lat)?;
    Ok((lat, layout))
}

fn basis(lat: &ConceptLattice) -> AdditiveBasis {
    AdditiveBasis::build(lat, RepresentationKind::DoublyAdditive)
}

fn render_options(base: RenderOptions, format: Option<Format>, labels: Option<Labels>) -> RenderOptions {
    let label_mode = labels.map(|l| match l {
        Labels::None => LabelMode::None,
        Labels::Full => LabelMode::Full,
        Labels::Reduced => LabelMode::Reduced,
    });
    RenderOptions { format: format.unwrap_or(base.format), label_mode: label_mode.unwrap_or(base.label_mode), ..base }
}

fn execute(cli: Cli) -> CliResult<ExitCode> {
    let config: FileConfig = resolve_config(cli.config.as_deref())?;
    config.pipeline.validate()?;
    config.render.validate()?;
    match cli.command {
        Command::Lattice { context, out } => {
            json_out(&out, &LatticeJson::from_lattice(&load_lattice(&context)?))?;
        }
        Command::Draw { context, algo, format, labels, seed, trace, out } => {
            let lat = load_lattice(&context)?;
            let cfg = PipelineConfig { seed: seed.unwrap_or(config.pipeline.seed), ..config.pipeline };
            let result = run(&lat, algo, &cfg)?;
            if let Some(path) = trace {
                let file = std::fs::File::create(&path).map_err(|source| CliError::Io { path: path.clone(), source })?;
                write_trace_csv(&result.trace, file)?;
            }
            match format {
                DrawFormat::Result => json_out(&out, &result)?,
                DrawFormat::Json => json_out(&out, &LayoutJson::from_layout(&lat, &result.layout))?,
                DrawFormat::Svg | DrawFormat::Tikz => {
                    let f = if matches!(format, DrawFormat::Svg) { Format::Svg } else { Format::Tikz };
                    let opts = render_options(config.render, Some(f), labels);
                    write_out(&out, render(&lat, &result.layout, &opts)?.as_bytes())?;
                }
            }
            eprintln!(
                "{algo}: {} concepts, {}, {}, {} iterations{}{}",
                lat.len(),
                if result.validity.valid { "valid" } else { "invalid" },
                if result.converged { "converged" } else { "not converged" },
                result.iterations,
                if result.extension_minimal { "" } else { ", extension budget exhausted" },
                if result.repaired { ", repaired" } else { "" },
            );
            if result.flagged() {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Project { input, mode, out } => {
            let (lat, layout) = load_input(&input)?;
            let b = basis(&lat);
            let projected = match mode {
                ProjectionMode::Framed => b.project_framed(&layout)?,
                ProjectionMode::Orthogonal => b.project(&layout)?,
                ProjectionMode::Affine => b.project_affine(&layout)?,
            };
            json_out(&out, &LayoutJson::from_layout(&lat, &projected))?;
        }
        Command::CheckAdditive { input, tol } => {
            let (lat, layout) = load_input(&input)?;
            let check = basis(&lat).is_additive(&layout, tol)?;
            println!(
                "{} (residual {:.6e}, residual norm {:.6e}, tolerance {tol:e})",
                if check.additive { "additive" } else { "not additive" },
                check.residual,
                check.residual_norm
            );
        }
        Command::Snap { input, grid, out } => {
            let (lat, layout) = load_input(&input)?;
            let (snapped, _) = basis(&lat).snap_to_grid(&layout, grid)?;
            let report = validate_line_diagram(&lat, &snapped, 0.0, config.pipeline.min_gap)?;
            json_out(&out, &LayoutJson::from_layout(&lat, &snapped))?;
            eprintln!("snapped to grid {grid}: {}", if report.valid { "valid" } else { "invalid" });
        }
        Command::Metrics { input, reference, out } => {
            let (lat, layout) = load_input(&input)?;
            let mut metrics = quality_metrics(&lat, &layout)?;
            let mut normalized = None;
            if let Some(path) = reference {
                let r = load_layout(&path, &lat)?;
                metrics.reference_distance = Some(layout_distance(&layout, &r, false)?);
                normalized = Some(layout_distance(&layout, &r, true)?);
            }
            let validity = validate_line_diagram(&lat, &layout, 0.0, config.pipeline.min_gap)?;
            let additivity = basis(&lat).is_additive(&layout, 1e-6)?;
            json_out(
                &out,
                &serde_json::json!({
                    "metrics": metrics,
                    "reference_distance_normalized": normalized,
                    "validity": validity,
                    "additive": additivity.additive,
                    "additive_residual": additivity.residual,
                }),
            )?;
        }
        Command::Render { input, format, labels, out } => {
            let (lat, layout) = load_input(&input)?;
            let opts = render_options(config.render, format, labels);
            write_out(&out, render(&lat, &layout, &opts)?.as_bytes())?;
        }
        Command::Eval126 { algo, references, out } => {
            let algorithms = if algo.is_empty() { Algorithm::ALL.to_vec() } else { algo };
            let lattices = catalog_lattices();
            let mut refs = BTreeMap::new();
            if let Some(dir) = references {
                for item in &lattices {
                    let path = dir.join(format!("{}.json", item.id));
                    if path.exists() {
                        let json: LayoutJson = serde_json::from_str(&read(&path)?)
                            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
                        refs.insert(item.id.clone(), json);
                    }
                }
            }
            let table = batch_evaluate(&lattices, &algorithms, &config.pipeline, &refs);
            let mut csv = Vec::new();
            table.write_csv(&mut csv)?;
            write_out(&out, &csv)?;
            let mut failed = false;
            for (a, s) in &table.summary {
                eprintln!(
                    "{a}: {} runs, {} valid, {} additive, {} converged, {} errors",
                    s.runs, s.valid, s.additive, s.converged, s.errors
                );
                failed |= s.errors > 0 || s.valid < s.runs;
            }
            if failed {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Serve { port } => {
            let addr = SocketAddr::from((Ipv4Addr::LOCALHOST, port));
            let runtime = tokio::runtime::Runtime::new().map_err(|source| CliError::Io { path: PathBuf::from("<runtime>"), source })?;
            eprintln!("listening on http://{addr}");
            runtime
                .block_on(latflux_service::serve(addr))
                .map_err(|source| CliError::Io { path: PathBuf::from(addr.to_string()), source })?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
