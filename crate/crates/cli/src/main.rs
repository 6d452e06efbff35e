use std::fs;
use std::io::{self, Write as _};
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use fxor_core::diffraction::{
    self, linf_distance, phase_shifter_effect, plate_pattern, slit_scans, PhaseEffectRecord, PlatePhase,
    SlitGeometry, A7_DETECTOR_X_UM,
};
use fxor_core::hom::{self, HomCase};
use fxor_core::is_gate::{run_is_case, IsRecord};
use fxor_core::nogo::{verify_nogo, SymmetricModifiers};
use fxor_core::output::{curve_csv, figure2_csv, json_line, svg_plot, windows_csv, Series};
use fxor_core::pipeline::{alpha_grid, figure2_data};
use fxor_core::protocol::{
    self, meta_info_scenario, random_bits, transmit_with_offset, ActionMap, Gate, SourceKind,
    TransmissionPlan,
};
use fxor_core::verify::{self, VerifyConfig, DEFAULT_SEED};

#[derive(Parser)]
#[command(name = "fxor", version, about = "Entangled-photon gate simulations and their checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct OutArgs {
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also render an SVG next to `--out`.
    #[arg(long, requires = "out")]
    svg: bool,
}

#[derive(Subcommand)]
enum Command {
    /// N_S against the measurement angle for every case.
    Figure2 {
        #[arg(long, default_value_t = 181)]
        steps: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Random symmetric modifiers: case I vs the case II mixture.
    Nogo {
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 181)]
        steps: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Three-slit detector curves and the plate patterns, written to a directory.
    Slits {
        #[arg(long, value_enum, default_value_t = PresetArg::A6)]
        preset: PresetArg,
        #[arg(long, default_value_t = 2001)]
        steps: usize,
        /// Wavelength shift added to the upper leg, in µm.
        #[arg(long, default_value_t = 0.0)]
        dl: f64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        svg: bool,
    },
    /// Ratio of the mean-square snapshot with and without the phase shifters.
    PhaseEffect {
        #[arg(long, value_enum, default_value_t = PresetArg::A7)]
        preset: PresetArg,
        #[arg(long, default_value_t = 0.3)]
        dl1: f64,
        #[arg(long, default_value_t = 0.0)]
        dl2: f64,
        /// Detector position in µm (preset default when omitted).
        #[arg(long)]
        x: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte-Carlo HOM coincidences.
    Hom {
        #[arg(long, value_enum, default_value_t = HomCaseArg::Both)]
        case: HomCaseArg,
        /// Pulse pairs per case.
        #[arg(long, default_value_t = 100_000)]
        photons: u64,
        #[arg(long, default_value_t = hom::DEFAULT_EPSILON)]
        epsilon: f64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Deterministic N_S of the interference-space gate.
    IsGate {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Windowed bit transmission through one gate.
    Transmit {
        #[arg(long, value_enum, default_value_t = GateArg::Pibs)]
        gate: GateArg,
        /// Explicit bit string such as 0110; random bits otherwise.
        #[arg(long, conflicts_with = "bits")]
        message: Option<String>,
        #[arg(long, default_value_t = 64)]
        bits: usize,
        /// Photon pairs per receiver window.
        #[arg(long, default_value_t = 1000)]
        photons: u64,
        #[arg(long, default_value_t = 3)]
        windows_per_bit: usize,
        #[arg(long, default_value_t = protocol::DEFAULT_OFFSET)]
        offset: f64,
        /// Decision threshold on N_S (midpoint of the two symbols when omitted).
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Full JSON report; per-window CSV goes next to it.
        #[command(flatten)]
        out: OutArgs,
    },
    /// Tell an entangled source from single photons by N_S alone.
    Meta {
        #[arg(long, value_enum, default_value_t = SourceArg::Entangled)]
        source: SourceArg,
        /// Polarization of single-photon source, or basis rotation of the entangled one.
        #[arg(long, default_value_t = 0.0)]
        angle: f64,
        /// Single-photon polarization the receiver compares against.
        #[arg(long, default_value_t = 45.0)]
        hypothesis: f64,
        #[arg(long, default_value_t = 10_000)]
        photons: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every acceptance check; exit 1 if any fails.
    VerifyAll {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        photons: u64,
        #[arg(long, default_value_t = 3)]
        windows_per_bit: usize,
        /// Directory for the data files.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, requires = "out")]
        svg: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    A6,
    A7,
}

impl From<PresetArg> for diffraction::Preset {
    fn from(p: PresetArg) -> Self {
        match p {
            PresetArg::A6 => Self::A6,
            PresetArg::A7 => Self::A7,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum HomCaseArg {
    Deg90,
    Deg45,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum GateArg {
    Pibs,
    Slits,
    Hom,
    Is,
}

impl From<GateArg> for Gate {
    fn from(g: GateArg) -> Self {
        match g {
            GateArg::Pibs => Gate::pi_combiner(),
            GateArg::Slits => Gate::three_slit(),
            GateArg::Hom => Gate::hom(),
            GateArg::Is => Gate::interference_space(),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SourceArg {
    Entangled,
    Single,
}

#[derive(Serialize)]
struct SlitsSummary {
    preset: &'static str,
    points: usize,
    delta_lambda_um: f64,
    linf_avg45_avg90: f64,
    linf_normalized: f64,
}

#[derive(Serialize)]
struct TransmitSummary<'a> {
    gate: &'a str,
    bits: usize,
    windows: usize,
    bit_errors: usize,
    ber: Option<f64>,
}

type AnyResult<T> = Result<T, Box<dyn std::error::Error>>;

fn emit(out: Option<&FsPath>, contents: &str) -> AnyResult<()> {
    match out {
        Some(p) => write_file(p, contents),
        None => Ok(io::stdout().write_all(contents.as_bytes())?),
    }
}

fn write_file(path: &FsPath, contents: &str) -> AnyResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, contents).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn with_ext(path: &FsPath, ext: &str) -> PathBuf {
    path.with_extension(ext)
}

fn preset_name(p: PresetArg) -> &'static str {
    match p {
        PresetArg::A6 => "a6",
        PresetArg::A7 => "a7",
    }
}

fn figure2_svg(rows: &[fxor_core::pipeline::Figure2Row]) -> String {
    let x: Vec<f64> = rows.iter().map(|r| r.alpha_deg).collect();
    let col = |f: fn(&fxor_core::pipeline::Figure2Row) -> f64| rows.iter().map(f).collect::<Vec<_>>();
    let (i, a, b, m) = (
        col(|r| r.ns_case_i),
        col(|r| r.ns_case_iia),
        col(|r| r.ns_case_iib),
        col(|r| r.ns_mixed),
    );
    svg_plot(
        "N_S vs measurement angle",
        "alpha (deg)",
        "N_S",
        &[
            Series { label: "case I", x: &x, y: &i },
            Series { label: "case IIa", x: &x, y: &a },
            Series { label: "case IIb", x: &x, y: &b },
            Series { label: "mixture", x: &x, y: &m },
        ],
    )
}

fn run_figure2(steps: usize, out: &OutArgs) -> AnyResult<()> {
    let rows = figure2_data(&alpha_grid(steps))?;
    emit(out.out.as_deref(), &figure2_csv(&rows))?;
    if let (true, Some(p)) = (out.svg, &out.out) {
        write_file(&with_ext(p, "svg"), &figure2_svg(&rows))?;
    }
    Ok(())
}

fn run_slits(preset: PresetArg, steps: usize, dl: f64, dir: &FsPath, svg: bool) -> AnyResult<()> {
    let g = SlitGeometry::preset(preset.into());
    let xs = g.default_detector_grid(steps);
    let scans = slit_scans(&g, &xs, dl);
    fs::create_dir_all(dir)?;
    for (case, curve) in &scans.cases {
        write_file(&dir.join(format!("slits_{}.csv", case.name())), &curve_csv(curve))?;
    }
    write_file(&dir.join("slits_avg_45.csv"), &curve_csv(&scans.avg_45))?;
    write_file(&dir.join("slits_avg_90.csv"), &curve_csv(&scans.avg_90))?;
    let plate = g.default_plate_grid(steps);
    let p0 = plate_pattern(&g, &plate, PlatePhase::Zero);
    let ppi = plate_pattern(&g, &plate, PlatePhase::Pi);
    write_file(&dir.join("plate_phase0.csv"), &curve_csv(&p0))?;
    write_file(&dir.join("plate_phasepi.csv"), &curve_csv(&ppi))?;
    if svg {
        let series: Vec<Series<'_>> = scans
            .cases
            .iter()
            .map(|(c, curve)| Series { label: c.name(), x: &curve.x_um, y: &curve.intensity })
            .collect();
        write_file(
            &dir.join("slits_cases.svg"),
            &svg_plot("Detector intensity per subcase", "x (µm)", "intensity", &series),
        )?;
        write_file(
            &dir.join("slits_avg.svg"),
            &svg_plot(
                "Subcase-averaged detector intensity",
                "x (µm)",
                "intensity",
                &[
                    Series { label: "45°", x: &scans.avg_45.x_um, y: &scans.avg_45.intensity },
                    Series { label: "90°", x: &scans.avg_90.x_um, y: &scans.avg_90.intensity },
                ],
            ),
        )?;
        write_file(
            &dir.join("plate.svg"),
            &svg_plot(
                "Plate pattern",
                "y (µm)",
                "intensity",
                &[
                    Series { label: "phase 0", x: &p0.x_um, y: &p0.intensity },
                    Series { label: "phase π", x: &ppi.x_um, y: &ppi.intensity },
                ],
            ),
        )?;
    }
    let summary = SlitsSummary {
        preset: preset_name(preset),
        points: xs.len(),
        delta_lambda_um: dl,
        linf_avg45_avg90: linf_distance(&scans.avg_45, &scans.avg_90)?,
        linf_normalized: linf_distance(&scans.avg_45.normalized(), &scans.avg_90.normalized())?,
    };
    emit(None, &json_line(&summary))
}

fn run_phase_effect(preset: PresetArg, dl1: f64, dl2: f64, x: Option<f64>, out: Option<&FsPath>) -> AnyResult<()> {
    let g = SlitGeometry::preset(preset.into());
    let x = x.unwrap_or(match preset {
        PresetArg::A7 => A7_DETECTOR_X_UM,
        PresetArg::A6 => 0.0,
    });
    let ratio = phase_shifter_effect(&g, x, dl1, dl2)?;
    println!("{ratio:.9}");
    if let Some(p) = out {
        write_file(p, &json_line(&PhaseEffectRecord { dl1, dl2, ratio }))?;
    }
    Ok(())
}

fn run_hom(case: HomCaseArg, photons: u64, epsilon: f64, seed: u64, out: Option<&FsPath>) -> AnyResult<()> {
    let cases: &[HomCase] = match case {
        HomCaseArg::Deg90 => &[HomCase::Deg90],
        HomCaseArg::Deg45 => &[HomCase::Deg45],
        HomCaseArg::Both => &[HomCase::Deg90, HomCase::Deg45],
    };
    let mut text = String::new();
    for &c in cases {
        text.push_str(&json_line(&hom::simulate_hom(c, photons, seed, epsilon)?));
    }
    emit(out, &text)
}

fn parse_message(m: &str) -> AnyResult<Vec<u8>> {
    m.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(format!("message must contain only 0 and 1, found {other:?}").into()),
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn run_transmit(
    gate: GateArg,
    message: Option<&str>,
    bits: usize,
    photons: u64,
    windows_per_bit: usize,
    offset: f64,
    threshold: Option<f64>,
    seed: u64,
    out: &OutArgs,
) -> AnyResult<()> {
    let bits = match message {
        Some(m) => parse_message(m)?,
        None => random_bits(bits, seed),
    };
    let plan = TransmissionPlan {
        bits,
        action_map: ActionMap::default(),
        windows_per_bit,
        photons_per_window: photons,
    };
    let gate: Gate = gate.into();
    let report = transmit_with_offset(&plan, &gate, threshold, seed, offset)?;
    let errors = plan
        .bits
        .iter()
        .zip(&report.decoded_bits)
        .filter(|(a, b)| a != b)
        .count();
    let summary = TransmitSummary {
        gate: gate.name(),
        bits: plan.bits.len(),
        windows: report.window_reports.len(),
        bit_errors: errors,
        ber: report.ber,
    };
    if let Some(p) = &out.out {
        write_file(p, &json_line(&report))?;
        let stem = p.with_extension("");
        let csv = PathBuf::from(format!("{}_windows.csv", stem.display()));
        write_file(&csv, &windows_csv(&report.window_reports))?;
        if out.svg {
            let x: Vec<f64> = report.window_reports.iter().map(|w| w.window_index as f64).collect();
            let y: Vec<f64> = report
                .window_reports
                .iter()
                .map(|w| w.estimated_n_s.unwrap_or(f64::NAN))
                .collect();
            let thr = vec![report.decoder.threshold; x.len()];
            let svg = svg_plot(
                "Estimated N_S per receiver window",
                "window",
                "N_S",
                &[
                    Series { label: "estimate", x: &x, y: &y },
                    Series { label: "threshold", x: &x, y: &thr },
                ],
            );
            write_file(&with_ext(p, "svg"), &svg)?;
        }
    }
    emit(None, &json_line(&summary))
}

fn run_meta(source: SourceArg, angle: f64, hypothesis: f64, photons: u64, seed: u64, out: Option<&FsPath>) -> AnyResult<()> {
    let source = match source {
        SourceArg::Entangled => SourceKind::Entangled { basis_rotation_deg: angle },
        SourceArg::Single => SourceKind::SingleAlpha { alpha_deg: angle },
    };
    let report = meta_info_scenario(source, hypothesis, SymmetricModifiers::PI, photons, seed)?;
    emit(out, &json_line(&report))
}

fn run_verify_all(cfg: VerifyConfig, out: Option<&FsPath>, svg: bool) -> AnyResult<bool> {
    let results = verify::run_all(&cfg)?;
    for r in &results {
        println!("{}", r.line());
    }
    for note in verify::report_notes()? {
        println!("note: {note}");
    }
    let passed = results.iter().filter(|r| r.passed).count();
    println!("{passed}/{} criteria passed", results.len());
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        for (name, contents) in verify::data_files(&cfg)? {
            write_file(&dir.join(name), &contents)?;
        }
        if svg {
            let rows = figure2_data(&alpha_grid(cfg.steps))?;
            write_file(&dir.join("figure2.svg"), &figure2_svg(&rows))?;
        }
    }
    Ok(passed == results.len())
}

fn run(cli: Cli) -> AnyResult<bool> {
    match cli.command {
        Command::Figure2 { steps, out } => run_figure2(steps, &out)?,
        Command::Nogo { samples, steps, seed, out } => {
            let r = verify_nogo(samples, &alpha_grid(steps), seed)?;
            emit(out.as_deref(), &json_line(&r))?;
        }
        Command::Slits { preset, steps, dl, out, svg } => run_slits(preset, steps, dl, &out, svg)?,
        Command::PhaseEffect { preset, dl1, dl2, x, out } => run_phase_effect(preset, dl1, dl2, x, out.as_deref())?,
        Command::Hom { case, photons, epsilon, seed, out } => run_hom(case, photons, epsilon, seed, out.as_deref())?,
        Command::IsGate { out } => {
            let text: String = [HomCase::Deg90, HomCase::Deg45]
                .iter()
                .map(|&case| json_line(&IsRecord { case, n_s: run_is_case(case) }))
                .collect();
            emit(out.as_deref(), &text)?;
        }
        Command::Transmit {
            gate,
            message,
            bits,
            photons,
            windows_per_bit,
            offset,
            threshold,
            seed,
            out,
        } => run_transmit(
            gate,
            message.as_deref(),
            bits,
            photons,
            windows_per_bit,
            offset,
            threshold,
            seed,
            &out,
        )?,
        Command::Meta { source, angle, hypothesis, photons, seed, out } => {
            run_meta(source, angle, hypothesis, photons, seed, out.as_deref())?
        }
        Command::VerifyAll { seed, photons, windows_per_bit, out, svg } => {
            let cfg = VerifyConfig {
                seed,
                photons_per_window: photons,
                windows_per_bit,
                ..VerifyConfig::default()
            };
            return run_verify_all(cfg, out.as_deref(), svg);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
