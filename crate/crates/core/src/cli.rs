//! Command-line front end: argument parsing, validation and artifact emission.

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::body::FlatPointBody;
use crate::error::{Error, Result};
use crate::fourier::{calibrate_decay_bound, rotational_lp_average, Frequency, ProbeRecord, RotDecayRecord};
use crate::lattice::{count_points_with_stats, haar_rotation, CountRecord, Rotation};
use crate::norms::{fit_exponent, DiscrepancySamples, NormEstimate, NormRecord, SweepMode};
use crate::predictions::{predicted_exponent, Mode, PredictionRecord};
use crate::verify::{run_suite, Suite};

/// Environment variable that replaces `--seed`.
pub const SEED_ENV: &str = "DISCREPANCY_LAB_SEED";

#[derive(Parser, Debug, Clone, PartialEq, Serialize)]
#[command(name = "discrepancy-lab", version, about = "Lattice-point discrepancy of convex bodies with a flat point")]
pub struct Command {
    #[command(subcommand)]
    pub action: Action,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize)]
pub struct Common {
    /// Dimension.
    #[arg(long, global = true, default_value_t = 2, value_parser = parse_dim)]
    pub d: usize,
    /// Flatness order of the flat point (>= 2).
    #[arg(long, global = true, default_value_t = 2.0, value_parser = parse_gamma)]
    pub gamma: f64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Artifact directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true, value_parser = parse_threads)]
    pub threads: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Action {
    /// Geometry of the body.
    BodyInfo,
    /// Lattice points in one placement; prints the count.
    Count(PlacementArgs),
    /// Discrepancy of one placement; prints the value.
    Discrepancy(PlacementArgs),
    /// Monte Carlo norms over a dilation grid.
    NormSweep(SweepArgs),
    /// Fourier transform of the indicator at given frequencies.
    FourierProbe(ProbeArgs),
    /// Rotational L^p averages of the Fourier transform.
    RotDecay(RotDecayArgs),
    /// Predicted exponents.
    Predict(PredictArgs),
    /// Runs the verification suite; fails if any check fails.
    Verify(VerifyArgs),
    /// Fits slopes in existing artifacts against predictions.
    Report(ReportArgs),
}

#[derive(Args, Debug, Clone, PartialEq, Serialize)]
pub struct PlacementArgs {
    #[arg(long = "R", default_value_t = 1.0, value_parser = parse_dilation)]
    pub r: f64,
    /// Use a Haar-random rotation drawn from the seed instead of the identity.
    #[arg(long)]
    pub random_rotation: bool,
    /// Translation, comma separated, each in [0, 1); zero by default.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, value_parser = parse_unit)]
    pub t: Vec<f64>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize)]
pub struct SweepArgs {
    #[arg(long = "R-grid", value_delimiter = ',', default_value = "32,64,128,256,512,1024,2048", value_parser = parse_dilation)]
    pub r_grid: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "2", value_parser = parse_p)]
    pub p: Vec<f64>,
    /// Rotations x translations, or one number for both.
    #[arg(long, default_value = "64x64", value_parser = parse_samples)]
    pub samples: SampleCounts,
    #[arg(long, default_value = "joint", value_parser = parse_sweep_mode)]
    pub mode: SweepMode,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize)]
pub struct ProbeArgs {
    #[arg(long, value_delimiter = ',', default_value = "32,64,128,256,512,1024", value_parser = parse_rho)]
    pub rho: Vec<f64>,
    /// Angles from the symmetry axis, radians.
    #[arg(long, value_delimiter = ',', default_value = "0", value_parser = parse_theta)]
    pub theta: Vec<f64>,
    /// Constant of the decay bound; fitted to the probed frequencies when absent.
    #[arg(long)]
    pub calibration: Option<f64>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize)]
pub struct RotDecayArgs {
    #[arg(long, value_delimiter = ',', default_value = "32,64,128,256,512", value_parser = parse_rho)]
    pub rho: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "2", value_parser = parse_p)]
    pub p: Vec<f64>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize)]
pub struct PredictArgs {
    #[arg(long, value_delimiter = ',', default_value = "2", value_parser = parse_p)]
    pub p: Vec<f64>,
    /// One mode; every mode when absent.
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<Mode>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize)]
pub struct VerifyArgs {
    #[arg(long, default_value = "quick", value_parser = parse_suite)]
    pub suite: Suite,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize)]
pub struct ReportArgs {
    /// Directory with existing artifacts; defaults to --out.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SampleCounts {
    pub rotations: usize,
    pub translations: usize,
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    s.trim().parse::<f64>().map_err(|e| format!("not a number: {e}"))
}

fn parse_dim(s: &str) -> std::result::Result<usize, String> {
    let d: usize = s.parse().map_err(|e| format!("not an integer: {e}"))?;
    if d < 2 {
        return Err("dimension must be >= 2".into());
    }
    Ok(d)
}

fn parse_gamma(s: &str) -> std::result::Result<f64, String> {
    let g = parse_f64(s)?;
    if !(g >= 2.0 && g.is_finite()) {
        return Err("flatness order must be >= 2".into());
    }
    Ok(g)
}

fn parse_dilation(s: &str) -> std::result::Result<f64, String> {
    let r = parse_f64(s)?;
    if !(r >= 1.0 && r.is_finite()) {
        return Err("dilation must be >= 1".into());
    }
    Ok(r)
}

fn parse_p(s: &str) -> std::result::Result<f64, String> {
    let p = parse_f64(s)?;
    if !(p >= 1.0) {
        return Err("norm exponent must be >= 1".into());
    }
    Ok(p)
}

fn parse_rho(s: &str) -> std::result::Result<f64, String> {
    let r = parse_f64(s)?;
    if !(r >= 1.0 && r.is_finite()) {
        return Err("frequency modulus must be >= 1".into());
    }
    Ok(r)
}

fn parse_theta(s: &str) -> std::result::Result<f64, String> {
    let t = parse_f64(s)?;
    if !(0.0..=std::f64::consts::PI).contains(&t) {
        return Err("angle must lie in [0, pi]".into());
    }
    Ok(t)
}

fn parse_unit(s: &str) -> std::result::Result<f64, String> {
    let t = parse_f64(s)?;
    if !(0.0..1.0).contains(&t) {
        return Err("translation components must lie in [0, 1)".into());
    }
    Ok(t)
}

fn parse_threads(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err("thread count must be a positive integer".into()),
    }
}

fn parse_samples(s: &str) -> std::result::Result<SampleCounts, String> {
    let parse = |v: &str| match v.trim().parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(format!("'{v}' is not a positive sample count")),
    };
    let (a, b) = match s.split_once(['x', 'X']) {
        Some((a, b)) => (parse(a)?, parse(b)?),
        None => {
            let n = parse(s)?;
            (n, n)
        }
    };
    Ok(SampleCounts {
        rotations: a,
        translations: b,
    })
}

fn parse_sweep_mode(s: &str) -> std::result::Result<SweepMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_mode(s: &str) -> std::result::Result<Mode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_suite(s: &str) -> std::result::Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Parses arguments without the program name, reading the seed override from the environment.
pub fn parse<I, S>(argv: I) -> std::result::Result<Command, clap::Error>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    parse_with_env(argv, std::env::var(SEED_ENV).ok().as_deref())
}

/// [`parse`] with an explicit value for the seed override.
pub fn parse_with_env<I, S>(argv: I, seed_override: Option<&str>) -> std::result::Result<Command, clap::Error>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args = std::iter::once("discrepancy-lab".to_string()).chain(argv.into_iter().map(Into::into));
    let mut cmd = Command::try_parse_from(args)?;
    if let Some(v) = seed_override {
        cmd.common.seed = v.trim().parse().map_err(|_| {
            Command::command().error(
                clap::error::ErrorKind::ValueValidation,
                format!("invalid value '{v}' for {SEED_ENV}: expected an unsigned 64-bit integer"),
            )
        })?;
    }
    cmd.validate().map_err(|msg| Command::command().error(clap::error::ErrorKind::ValueValidation, msg))?;
    Ok(cmd)
}

impl Command {
    /// Cross-flag checks that clap cannot express per value.
    fn validate(&self) -> std::result::Result<(), String> {
        let d = self.common.d;
        let geometric = !matches!(self.action, Action::Predict(_) | Action::Verify(_) | Action::Report(_));
        if geometric && d > 3 {
            return Err(format!("--d {d}: only dimensions 2 and 3 are supported by this subcommand"));
        }
        match &self.action {
            Action::Count(a) | Action::Discrepancy(a) => {
                if !a.t.is_empty() && a.t.len() != d {
                    return Err(format!("--t: expected {d} components, got {}", a.t.len()));
                }
            }
            Action::NormSweep(a) => {
                if a.r_grid.windows(2).any(|w| w[1] <= w[0]) {
                    return Err("--R-grid: dilations must be strictly increasing".into());
                }
            }
            Action::FourierProbe(a) => {
                if let Some(c) = a.calibration {
                    if !(c > 0.0 && c.is_finite()) {
                        return Err("--calibration: must be positive".into());
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn subcommand_name(&self) -> &'static str {
        match self.action {
            Action::BodyInfo => "body-info",
            Action::Count(_) => "count",
            Action::Discrepancy(_) => "discrepancy",
            Action::NormSweep(_) => "norm-sweep",
            Action::FourierProbe(_) => "fourier-probe",
            Action::RotDecay(_) => "rot-decay",
            Action::Predict(_) => "predict",
            Action::Verify(_) => "verify",
            Action::Report(_) => "report",
        }
    }

    /// Artifact header: version and the full parameter set.
    pub fn header(&self) -> String {
        format!(
            "discrepancy-lab {} {}",
            env!("CARGO_PKG_VERSION"),
            serde_json::to_string(self).expect("command serializes")
        )
    }
}

/// What a run printed and wrote.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub artifacts: Vec<PathBuf>,
    pub success: bool,
}

/// Runs the command, inside a dedicated thread pool when `--threads` is set.
pub fn execute(cmd: &Command) -> Result<Outcome> {
    match cmd.common.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::invalid("threads", n, e.to_string()))?
            .install(|| run(cmd)),
        None => run(cmd),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodyInfoRecord {
    pub d: usize,
    pub gamma: f64,
    pub y_c: f64,
    pub rho_c: f64,
    pub height: f64,
    pub volume: f64,
    pub seam_angle: f64,
}

/// One slope of the `report` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub artifact: String,
    pub group: String,
    pub predicted: Option<f64>,
    pub fitted: f64,
    pub stderr: f64,
    pub r_squared: f64,
    pub n_points: usize,
}

#[derive(Serialize)]
struct JsonArtifact<'a, T: Serialize> {
    header: String,
    command: &'a Command,
    records: &'a T,
}

struct Run<'a> {
    cmd: &'a Command,
    stdout: String,
    artifacts: Vec<PathBuf>,
}

impl Run<'_> {
    fn write<T: Serialize>(&mut self, stem: &str, records: &[T]) -> Result<()> {
        self.write_as(stem, self.cmd.common.format, records)
    }

    fn write_as<T: Serialize>(&mut self, stem: &str, format: Format, records: &[T]) -> Result<()> {
        let dir = &self.cmd.common.out;
        fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
        let (path, bytes) = match format {
            Format::Csv => {
                let path = dir.join(format!("{stem}.csv"));
                let mut buf = format!("# {}\n", self.cmd.header()).into_bytes();
                let mut w = csv::Writer::from_writer(&mut buf);
                for r in records {
                    w.serialize(r)?;
                }
                w.flush().map_err(|e| io_error(&path, e))?;
                drop(w);
                (path, buf)
            }
            Format::Json => {
                let path = dir.join(format!("{stem}.json"));
                let doc = JsonArtifact {
                    header: self.cmd.header(),
                    command: self.cmd,
                    records: &records,
                };
                let mut bytes = serde_json::to_vec_pretty(&doc)?;
                bytes.push(b'\n');
                (path, bytes)
            }
        };
        fs::File::create(&path)
            .and_then(|mut f| f.write_all(&bytes))
            .map_err(|e| io_error(&path, e))?;
        self.artifacts.push(path);
        Ok(())
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.stdout.push_str(s.as_ref());
        self.stdout.push('\n');
    }
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Reads a CSV artifact written by this tool back into records.
pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = fs::File::open(path).map_err(|e| io_error(path, e))?;
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(file)
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

fn run(cmd: &Command) -> Result<Outcome> {
    let mut run = Run {
        cmd,
        stdout: String::new(),
        artifacts: Vec::new(),
    };
    let c = &cmd.common;
    let mut success = true;
    match &cmd.action {
        Action::BodyInfo => {
            let b = FlatPointBody::with(c.d, c.gamma)?;
            let rec = BodyInfoRecord {
                d: c.d,
                gamma: c.gamma,
                y_c: b.y_c(),
                rho_c: b.rho_c(),
                height: b.height(),
                volume: b.volume(),
                seam_angle: b.seam_angle(),
            };
            run.line(serde_json::to_string_pretty(&rec)?);
            run.write("body_info", &[rec])?;
        }
        Action::Count(a) | Action::Discrepancy(a) => {
            let b = FlatPointBody::with(c.d, c.gamma)?;
            let rot = if a.random_rotation {
                haar_rotation(c.d, c.seed)?
            } else {
                Rotation::identity(c.d)
            };
            let t = if a.t.is_empty() { vec![0.0; c.d] } else { a.t.clone() };
            let count = count_points_with_stats(&b, a.r, &rot, &t).count;
            let discrepancy = a.r.powi(c.d as i32) * b.volume() - count as f64;
            let rec = CountRecord {
                d: c.d,
                gamma: c.gamma,
                dilation: a.r,
                seed: c.seed,
                count,
                discrepancy,
            };
            if matches!(cmd.action, Action::Count(_)) {
                run.line(count.to_string());
                run.write("count", &[rec])?;
            } else {
                run.line(discrepancy.to_string());
                run.write("discrepancy", &[rec])?;
            }
        }
        Action::NormSweep(a) => {
            let b = FlatPointBody::with(c.d, c.gamma)?;
            let samples: Vec<DiscrepancySamples> = a
                .r_grid
                .iter()
                .map(|&r| match a.mode {
                    SweepMode::RotationOnly => DiscrepancySamples::draw_rotations(&b, r, a.samples.rotations, c.seed),
                    _ => DiscrepancySamples::draw(&b, r, a.samples.rotations, a.samples.translations, c.seed),
                })
                .collect::<Result<_>>()?;
            let ps: Vec<f64> = if a.mode == SweepMode::SupSample {
                vec![f64::INFINITY]
            } else {
                a.p.clone()
            };
            let mut records = Vec::new();
            for &p in &ps {
                let est: Vec<NormEstimate> = samples
                    .iter()
                    .map(|s| if p.is_infinite() { Ok(s.max_abs()) } else { s.lp_norm(p) })
                    .collect::<Result<_>>()?;
                records.extend(est.iter().map(|e| NormRecord::new(&b, a.mode, e)));
                if let Ok(fit) = fit_exponent(&est) {
                    run.line(format!(
                        "p={p} slope={:.4} stderr={:.4} r2={:.4}{}",
                        fit.slope,
                        fit.slope_stderr,
                        fit.r_squared,
                        fit.dropped_r.map(|r| format!(" dropped R={r}")).unwrap_or_default()
                    ));
                }
            }
            run.write("norm_sweep", &records)?;
        }
        Action::FourierProbe(a) => {
            let b = FlatPointBody::with(c.d, c.gamma)?;
            let freqs: Vec<Frequency> = a
                .rho
                .iter()
                .flat_map(|&rho| a.theta.iter().map(move |&th| Frequency::new(rho, th)))
                .collect::<Result<_>>()?;
            let calibration = match a.calibration {
                Some(v) => v,
                None => calibrate_decay_bound(&b, &freqs)?,
            };
            let records: Vec<ProbeRecord> = freqs
                .iter()
                .map(|&f| ProbeRecord::compute(&b, f, calibration))
                .collect::<Result<_>>()?;
            run.line(format!("{} frequencies, calibration {calibration:.6e}", records.len()));
            run.write("fourier_probe", &records)?;
        }
        Action::RotDecay(a) => {
            let b = FlatPointBody::with(c.d, c.gamma)?;
            let mut records = Vec::new();
            for &p in &a.p {
                for &rho in &a.rho {
                    records.push(RotDecayRecord {
                        d: c.d,
                        gamma: c.gamma,
                        rho,
                        p,
                        average: rotational_lp_average(&b, rho, p)?,
                    });
                }
            }
            run.line(format!("{} averages", records.len()));
            run.write("rot_decay", &records)?;
        }
        Action::Predict(a) => {
            let modes: Vec<Mode> = match a.mode {
                Some(m) => vec![m],
                None => Mode::ALL.to_vec(),
            };
            let mut records = Vec::new();
            for &p in &a.p {
                for &m in &modes {
                    records.push(PredictionRecord::compute(c.d, c.gamma, p, m)?);
                }
            }
            let mut w = csv::Writer::from_writer(vec![]);
            for r in &records {
                w.serialize(r)?;
            }
            let text = String::from_utf8(w.into_inner().map_err(|e| io_error(Path::new("<stdout>"), e.into_error()))?)
                .expect("csv output is utf-8");
            run.stdout.push_str(&text);
            run.write("predict", &records)?;
        }
        Action::Verify(a) => {
            let report = run_suite(a.suite, c.seed)?;
            for check in &report.checks {
                run.line(format!(
                    "{} {} predicted={:.6} fitted={:.6} stderr={:.2e}",
                    if check.pass { "PASS" } else { "FAIL" },
                    check.check,
                    check.predicted,
                    check.fitted,
                    check.stderr
                ));
            }
            success = report.passed;
            run.write_as("verify", Format::Json, &report.checks)?;
        }
        Action::Report(a) => {
            let dir = a.input.clone().unwrap_or_else(|| c.out.clone());
            let rows = build_report(&dir)?;
            for r in &rows {
                let pred = r.predicted.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into());
                run.line(format!(
                    "{} [{}] fitted={:.4} +/- {:.4} predicted={pred}",
                    r.artifact, r.group, r.fitted, r.stderr
                ));
            }
            run.write_as("report", Format::Json, &rows)?;
        }
    }
    Ok(Outcome {
        stdout: run.stdout,
        artifacts: run.artifacts,
        success,
    })
}

/// Slopes of every series found in the `norm_sweep`, `rot_decay` and
/// `fourier_probe` CSV artifacts under `dir`.
pub fn build_report(dir: &Path) -> Result<Vec<ReportRow>> {
    let mut rows = Vec::new();
    let mut found = false;

    let path = dir.join("norm_sweep.csv");
    if path.exists() {
        found = true;
        let recs: Vec<NormRecord> = read_csv(&path)?;
        let mut groups: BTreeMap<String, (Option<f64>, Vec<NormEstimate>)> = BTreeMap::new();
        for r in recs {
            let mode = match r.mode {
                SweepMode::Joint => Mode::Joint,
                SweepMode::RotationOnly => Mode::RotationOnlyL1,
                SweepMode::SupSample => Mode::Sup,
            };
            let predicted = predicted_exponent(r.d, r.gamma, if r.p.is_finite() { r.p } else { 1.0 }, mode)
                .ok()
                .map(|p| p.exponent);
            let key = format!("d={} gamma={} p={} mode={}", r.d, r.gamma, r.p, r.mode);
            groups.entry(key).or_insert_with(|| (predicted, Vec::new())).1.push(NormEstimate {
                r: r.r,
                p: r.p,
                value: r.value,
                stderr: r.stderr,
                n_samples: r.n,
            });
        }
        for (group, (predicted, est)) in groups {
            push_fit(&mut rows, "norm_sweep", group, predicted, &est);
        }
    }

    let path = dir.join("rot_decay.csv");
    if path.exists() {
        found = true;
        let recs: Vec<RotDecayRecord> = read_csv(&path)?;
        let mut groups: BTreeMap<String, (Option<f64>, Vec<NormEstimate>)> = BTreeMap::new();
        for r in recs {
            let predicted = predicted_exponent(r.d, r.gamma, r.p, Mode::FourierRot).ok().map(|p| p.exponent);
            let key = format!("d={} gamma={} p={}", r.d, r.gamma, r.p);
            groups
                .entry(key)
                .or_insert_with(|| (predicted, Vec::new()))
                .1
                .push(point(r.rho, r.average));
        }
        for (group, (predicted, est)) in groups {
            push_fit(&mut rows, "rot_decay", group, predicted, &est);
        }
    }

    let path = dir.join("fourier_probe.csv");
    if path.exists() {
        found = true;
        let recs: Vec<ProbeRecord> = read_csv(&path)?;
        let mut groups: BTreeMap<String, Vec<NormEstimate>> = BTreeMap::new();
        for r in recs.into_iter().filter(|r| r.abs > 0.0) {
            let mut key = String::new();
            let _ = write!(key, "theta={}", r.theta);
            groups.entry(key).or_default().push(point(r.rho, r.abs));
        }
        for (group, est) in groups {
            push_fit(&mut rows, "fourier_probe", group, None, &est);
        }
    }

    if !found {
        return Err(Error::InsufficientData(format!(
            "no norm_sweep.csv, rot_decay.csv or fourier_probe.csv in {}",
            dir.display()
        )));
    }
    Ok(rows)
}

fn point(x: f64, value: f64) -> NormEstimate {
    NormEstimate {
        r: x,
        p: 1.0,
        value,
        stderr: 0.0,
        n_samples: 1,
    }
}

fn push_fit(rows: &mut Vec<ReportRow>, artifact: &str, group: String, predicted: Option<f64>, est: &[NormEstimate]) {
    // Series too short to fit are skipped.
    if let Ok(fit) = fit_exponent(est) {
        rows.push(ReportRow {
            artifact: artifact.into(),
            group,
            predicted,
            fitted: fit.slope,
            stderr: fit.slope_stderr,
            r_squared: fit.r_squared,
            n_points: fit.n_points,
        });
    }
}
