//! Subcommand implementations. Each returns the summary printed on stdout.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use orthoplate::io::{empirical_tf_csv, matrix_csv, modes_csv, parse_signal_csv, response_csv, signal_csv};
use orthoplate::modal_sim::SignalLabel;
use orthoplate::sysid::{estimate_tf_with, find_modal_peaks, fit_damping};
use orthoplate::transfer::unwrap_phase;
use orthoplate::validation::{run_validation, ValidationOptions};
use orthoplate::{build_modal_model, build_transfer, simulate, ModalModel64, PlateConfig64, SimOptions, Window};

use crate::config::{ModeSetSpec, RunConfig};
use crate::{CliError, ConfigArgs};

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::numerical(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| CliError::numerical(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

struct Prepared {
    config: RunConfig,
    plate: PlateConfig64,
    mode_set: ModeSetSpec,
    out: PathBuf,
}

fn prepare(args: &ConfigArgs) -> Result<Prepared, CliError> {
    let config = RunConfig::load(&args.config)?;
    let mut plate = config.plate_config()?;
    if let Some(alpha) = args.alpha {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(CliError::user(format!("--alpha must be nonnegative, got {alpha}")));
        }
        plate.params.alpha = alpha;
    }
    let mode_set = match &args.mode_set {
        Some(s) => ModeSetSpec::parse(s)?,
        None => config.mode_set.clone(),
    };
    let out = args.out.clone().unwrap_or_else(|| config.output_dir.clone());
    Ok(Prepared { config, plate, mode_set, out })
}

/// Eigenvalue-order indices selected by `spec`.
pub fn resolve_mode_set(model: &ModalModel64, spec: &ModeSetSpec) -> Result<Vec<usize>, CliError> {
    match spec {
        ModeSetSpec::Keyword(k) if k == "all" => Ok(model.modes.iter().map(|m| m.index).collect()),
        ModeSetSpec::Keyword(_) => Ok(model.elastic_modes().map(|m| m.index).collect()),
        ModeSetSpec::List(list) => {
            let count = model.modes.len();
            if let Some(bad) = list.iter().find(|&&i| i >= count) {
                return Err(CliError::user(format!("mode_set: index {bad} out of range, the model has {count} modes")));
            }
            Ok(list.clone())
        }
    }
}

fn warn_repeated(model: &ModalModel64) {
    for (a, b) in &model.repeated {
        eprintln!("warning: modes {a} and {b} have coincident eigenvalues; their shapes are an arbitrary basis of the eigenspace");
    }
}

pub fn cmd_modes(args: &ConfigArgs) -> Result<String, CliError> {
    let p = prepare(args)?;
    let model = build_modal_model(&p.plate)?;
    warn_repeated(&model);
    let selected = resolve_mode_set(&model, &p.mode_set)?;
    let table = write_file(&p.out, "modes.csv", &modes_csv(&model))?;
    for &i in &selected {
        write_file(&p.out, &format!("mode_{i:03}_coeffs.csv"), &matrix_csv(&model.modes[i].coeffs))?;
    }
    let mut text = String::new();
    let _ = writeln!(text, "{} modes ({} rigid-body) written to {}", model.modes.len(), model.rigid_count(), table.display());
    let _ = writeln!(text, "{} coefficient files written", selected.len());
    for m in model.elastic_modes().take(5) {
        let _ = writeln!(text, "mode {:3}  {:10.4} Hz", m.index, m.frequency_hz);
    }
    Ok(text)
}

pub fn cmd_tf(args: &ConfigArgs, unwrap: bool) -> Result<String, CliError> {
    let p = prepare(args)?;
    let grid = p
        .config
        .tf_grid
        .ok_or_else(|| CliError::user(format!("{}: missing [tf_grid] section", args.config.display())))?;
    let model = build_modal_model(&p.plate)?;
    warn_repeated(&model);
    let selected = resolve_mode_set(&model, &p.mode_set)?;
    let tf = build_transfer(&model, &p.plate, &selected)?;
    let mut points = tf.frequency_response(grid.f_min, grid.f_max, grid.points)?;
    if unwrap {
        let mut phase: Vec<f64> = points.iter().map(|r| r.phase_rad).collect();
        unwrap_phase(&mut phase);
        for (r, ph) in points.iter_mut().zip(phase) {
            r.phase_rad = ph;
        }
    }
    let path = write_file(&p.out, "tf.csv", &response_csv(&points))?;
    Ok(format!("{} frequency points over {} modes written to {}\n", points.len(), selected.len(), path.display()))
}

pub fn cmd_simulate(args: &ConfigArgs) -> Result<String, CliError> {
    let p = prepare(args)?;
    let sim = p
        .config
        .sim
        .clone()
        .ok_or_else(|| CliError::user(format!("{}: missing [sim] section", args.config.display())))?;
    let excitation = p.config.excitation(&sim)?;
    let mut model = build_modal_model(&p.plate)?;
    let selected = resolve_mode_set(&model, &p.mode_set)?;
    model.modes.retain(|m| selected.contains(&m.index));
    let options = SimOptions {
        include_rigid: sim.include_rigid,
        max_samples: sim.max_samples.unwrap_or(SimOptions::default().max_samples),
    };
    let (input, output) = simulate(&model, &p.plate, &excitation, sim.duration, sim.sample_rate, &options)?;
    let a = write_file(&p.out, "input.csv", &signal_csv(&input))?;
    let b = write_file(&p.out, "output.csv", &signal_csv(&output))?;
    Ok(format!("{} samples at {} Hz written to {} and {}\n", input.len(), sim.sample_rate, a.display(), b.display()))
}

/// Options of the `identify` subcommand.
#[derive(Debug, Clone)]
pub struct IdentifyArgs {
    pub input: PathBuf,
    pub output: PathBuf,
    pub out: PathBuf,
    pub nfft: usize,
    pub window: Window,
    pub zero_pad: bool,
    pub sample_rate: Option<f64>,
    pub f_min: f64,
    pub f_max: Option<f64>,
    pub peaks: usize,
    pub damping: bool,
}

fn read_signal(path: &Path, sample_rate: Option<f64>, label: SignalLabel) -> Result<orthoplate::SignalRecord64, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::user(format!("cannot read {}: {e}", path.display())))?;
    parse_signal_csv(&text, sample_rate, label).map_err(|e| CliError::user(format!("{}: {e}", path.display())))
}

pub fn cmd_identify(args: &IdentifyArgs) -> Result<String, CliError> {
    let input = read_signal(&args.input, args.sample_rate, SignalLabel::Input)?;
    let output = read_signal(&args.output, args.sample_rate, SignalLabel::Output)?;
    let tf = estimate_tf_with(&input, &output, args.nfft, args.window, args.zero_pad)?;
    let tf_path = write_file(&args.out, "empirical_tf.csv", &empirical_tf_csv(&tf))?;

    let nyquist = *tf.frequencies.last().expect("nonempty grid");
    let report = find_modal_peaks(&tf, args.f_min, args.f_max.unwrap_or(nyquist), args.peaks)?;
    let mut csv = String::from(if args.damping { "frequency_hz,magnitude,alpha_per_s\n" } else { "frequency_hz,magnitude\n" });
    let mut text = String::new();
    let _ = writeln!(text, "empirical transfer function ({} bins) written to {}", tf.h.len(), tf_path.display());
    if report.shortfall {
        let _ = writeln!(text, "found {} of {} requested peaks", report.peaks.len(), args.peaks);
    }
    for peak in &report.peaks {
        let f = orthoplate::io::fmt_num(peak.frequency_hz);
        let m = orthoplate::io::fmt_num(peak.magnitude);
        if args.damping {
            let (alpha, note) = match fit_damping(&tf, peak.frequency_hz) {
                Ok(a) => (orthoplate::io::fmt_num(a), format!("alpha {a:.4} 1/s")),
                Err(e) => (String::new(), e.to_string()),
            };
            let _ = writeln!(csv, "{f},{m},{alpha}");
            let _ = writeln!(text, "peak {:10.4} Hz  |H| {:.4e}  {note}", peak.frequency_hz, peak.magnitude);
        } else {
            let _ = writeln!(csv, "{f},{m}");
            let _ = writeln!(text, "peak {:10.4} Hz  |H| {:.4e}", peak.frequency_hz, peak.magnitude);
        }
    }
    write_file(&args.out, "peaks.csv", &csv)?;
    Ok(text)
}

pub fn cmd_validate(options: &ValidationOptions) -> Result<String, CliError> {
    let report = run_validation(options);
    let text = report.render();
    if report.passed() {
        Ok(text)
    } else {
        Err(CliError::validation(text))
    }
}
