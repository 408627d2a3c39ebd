//! Command-line front end of `todafm`: seeded test points, identity suites and
//! report files.
//!
//! Every run is configured by a [`RunConfig`], read from a JSON file and
//! overridden field by field from flags. Numbers are written with 17
//! significant digits and files are replaced atomically, so identical
//! configurations produce byte-identical outputs.
//!
//! Exit status: 0 on success, 1 when a suite or a computation fails, 2 on a
//! usage or configuration error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::canonical::{canonical_data, char_velocities};
use crate::error::{Error, Result};
use crate::flatcoords::{flat_coords, FlatChart, FlatIndex};
use crate::hierarchy::{
    integrate, velocity_flow, Flow, Integrator, LoopFamily, DEFAULT_TAIL_LIMIT,
};
use crate::laurent::C;
use crate::manifold::{Point, Structure};
use crate::potential::{flat_first_derivative, potential_f_with};
use crate::sampling::Sampler;
use crate::verify::{check_suite_name, gram_matrix, run_suite, SuiteReport, VerifyConfig, SUITES};

/// Settings of a run. Absent fields take the subcommand's defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    /// Band of seeded points, or of seeded loops for `flow`.
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub n_max: Option<i64>,
    /// Collocation nodes of seeded loops.
    #[serde(rename = "K")]
    pub k: Option<usize>,
    /// Band of seeded loops in the hierarchy suites.
    pub loop_band: Option<i64>,
    /// Tolerance per check or per suite.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    pub suites: Option<Vec<String>>,
    pub out: Option<PathBuf>,
    pub parallel: Option<bool>,
    /// Frames `d/dt_k` with `|k| <= kmax` in the Gram matrix.
    pub kmax: Option<i64>,
    /// Point `lambda = z - v - e^u/z`, `lambda_bar = v + e^u/z` instead of a seeded one.
    pub u: Option<f64>,
    pub v: Option<f64>,
    pub flow: Option<String>,
    #[serde(rename = "T")]
    pub t_end: Option<f64>,
    pub h: Option<f64>,
    pub tail_limit: Option<f64>,
    pub snapshot_every: Option<usize>,
    /// Circle points of the canonical data.
    pub grid: Option<usize>,
    /// Flows whose characteristic velocities `canonical` tabulates.
    pub velocities: Option<Vec<String>>,
}

macro_rules! overlay {
    ($base:expr, $top:expr; $($f:ident),*) => {
        $(if $top.$f.is_some() { $base.$f = $top.$f.clone(); })*
    };
}

impl RunConfig {
    /// Reads a JSON configuration; parse errors carry line and column.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// `self` with every field set in `top` replaced.
    pub fn overlay(mut self, top: RunConfig) -> Self {
        overlay!(self, top; seed, n, n_max, k, loop_band, suites, out, parallel, kmax, u, v, flow, t_end, h,
            tail_limit, snapshot_every, grid, velocities);
        self.tolerances.extend(top.tolerances);
        self
    }

    fn seed(&self) -> Result<u64> {
        self.seed.ok_or_else(|| {
            Error::Config("a seed is required (--seed or \"seed\" in the config)".into())
        })
    }

    /// The locus point given by `u`, `v`, if any.
    fn locus(&self) -> Result<Option<Point>> {
        match (self.u, self.v) {
            (Some(u), Some(v)) => Ok(Some(Point::locus(C::new(u, 0.0), C::new(v, 0.0)))),
            (None, None) => Ok(None),
            _ => Err(Error::Config("u and v must be given together".into())),
        }
    }

    fn band(&self, default: usize) -> Result<usize> {
        let n = self.n.unwrap_or(default);
        if n < 2 {
            return Err(Error::Config(format!("N must be at least 2, got {n}")));
        }
        Ok(n)
    }

    /// Settings of the identity suites.
    pub fn verify_config(&self) -> Result<VerifyConfig> {
        let mut cfg = VerifyConfig::new(self.seed()?);
        cfg.band = self.band(cfg.band)?;
        cfg.n_max = self.n_max.unwrap_or(cfg.n_max);
        cfg.nodes = self.k.unwrap_or(cfg.nodes);
        cfg.loop_band = self.loop_band.unwrap_or(cfg.loop_band);
        if cfg.n_max < 1 || cfg.nodes < 8 || cfg.loop_band < 2 {
            return Err(Error::Config(
                "need n_max >= 1, K >= 8 and loop_band >= 2".into(),
            ));
        }
        for (name, &value) in &self.tolerances {
            cfg.set_tolerance(name, value)?;
        }
        Ok(cfg)
    }

    /// Selected suites, all of them by default.
    pub fn suite_names(&self) -> Result<Vec<String>> {
        let names = self
            .suites
            .clone()
            .unwrap_or_else(|| SUITES.iter().map(|s| s.to_string()).collect());
        for n in &names {
            check_suite_name(n)?;
        }
        Ok(names)
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "todafm",
    version,
    about = "Frobenius manifold of the dispersionless 2D Toda hierarchy"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run identity suites and report residuals against tolerances.
    Verify(Flags),
    /// Metric of the flat frames at a point, as CSV.
    Gram(Flags),
    /// Potential, its first flat derivatives and flat coordinates, as JSON.
    Potential(Flags),
    /// Integrate a flow on a seeded loop; writes snapshots and a ledger.
    Flow(Flags),
    /// Canonical coordinates and characteristic velocities on the circle, as CSV.
    Canonical(Flags),
}

/// Flags shared by every subcommand; each overrides the config field of the same name.
#[derive(Args, Debug, Default)]
pub struct Flags {
    /// JSON configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Band of seeded points (of seeded loops for `flow`).
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long)]
    pub n_max: Option<i64>,
    /// Collocation nodes of seeded loops.
    #[arg(long = "K")]
    pub k: Option<usize>,
    #[arg(long)]
    pub loop_band: Option<i64>,
    /// Tolerance of a check or suite, as NAME=VALUE; repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    pub tol: Vec<String>,
    /// Suite to run; repeatable. Defaults to all.
    #[arg(long = "suite")]
    pub suites: Vec<String>,
    /// Output directory; without it results go to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Run independent suites concurrently.
    #[arg(long)]
    pub parallel: bool,
    #[arg(long)]
    pub kmax: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    pub u: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub v: Option<f64>,
    /// Flow name: s<n>, sbar<n>, t:<alpha>, u or v.
    #[arg(long, allow_hyphen_values = true)]
    pub flow: Option<String>,
    /// Final time.
    #[arg(long = "T")]
    pub t_end: Option<f64>,
    /// Step size.
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub tail_limit: Option<f64>,
    #[arg(long)]
    pub snapshot_every: Option<usize>,
    #[arg(long)]
    pub grid: Option<usize>,
    /// Flow whose velocity `canonical` tabulates; repeatable.
    #[arg(long = "velocity", allow_hyphen_values = true)]
    pub velocities: Vec<String>,
}

impl Flags {
    /// The configuration file, if any, overridden by the flags.
    pub fn resolve(&self) -> Result<RunConfig> {
        let base = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        let mut tolerances = BTreeMap::new();
        for t in &self.tol {
            let (name, value) = t
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("--tol expects NAME=VALUE, got '{t}'")))?;
            let value: f64 = value
                .parse()
                .map_err(|_| Error::Config(format!("--tol {name}: '{value}' is not a number")))?;
            tolerances.insert(name.to_string(), value);
        }
        let nonempty = |v: &Vec<String>| if v.is_empty() { None } else { Some(v.clone()) };
        Ok(base.overlay(RunConfig {
            seed: self.seed,
            n: self.n,
            n_max: self.n_max,
            k: self.k,
            loop_band: self.loop_band,
            tolerances,
            suites: nonempty(&self.suites),
            out: self.out.clone(),
            parallel: self.parallel.then_some(true),
            kmax: self.kmax,
            u: self.u,
            v: self.v,
            flow: self.flow.clone(),
            t_end: self.t_end,
            h: self.h,
            tail_limit: self.tail_limit,
            snapshot_every: self.snapshot_every,
            grid: self.grid,
            velocities: nonempty(&self.velocities),
        }))
    }
}

/// Parses arguments, runs the subcommand and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&cli.command) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e @ Error::Config(_)) => {
            eprintln!("todafm: {e}");
            2
        }
        Err(e) => {
            eprintln!("todafm: {e}");
            1
        }
    }
}

/// Runs a subcommand; `Ok(false)` reports a failed suite.
pub fn run(command: &Command) -> Result<bool> {
    match command {
        Command::Verify(f) => verify(&f.resolve()?),
        Command::Gram(f) => gram(&f.resolve()?).map(|_| true),
        Command::Potential(f) => potential(&f.resolve()?).map(|_| true),
        Command::Flow(f) => flow(&f.resolve()?).map(|_| true),
        Command::Canonical(f) => canonical(&f.resolve()?).map(|_| true),
    }
}

/// Report of a `verify` run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub pass: bool,
    pub suites: Vec<SuiteReport>,
}

/// Runs the selected suites, sequentially or one thread per suite.
pub fn verify_report(cfg: &RunConfig) -> Result<VerifyReport> {
    let vc = cfg.verify_config()?;
    let names = cfg.suite_names()?;
    let results: Vec<Result<Vec<SuiteReport>>> = if cfg.parallel.unwrap_or(false) {
        std::thread::scope(|scope| {
            let handles: Vec<_> = names
                .iter()
                .map(|n| scope.spawn(|| run_suite(n, &vc)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("suite thread panicked"))
                .collect()
        })
    } else {
        names.iter().map(|n| run_suite(n, &vc)).collect()
    };
    let mut suites = Vec::new();
    for r in results {
        suites.extend(r?);
    }
    Ok(VerifyReport {
        seed: vc.seed,
        pass: suites.iter().all(|s| s.pass),
        suites,
    })
}

fn verify(cfg: &RunConfig) -> Result<bool> {
    let report = verify_report(cfg)?;
    for s in &report.suites {
        eprintln!(
            "{:<34} {} max residual {:.3e} (tolerance {:.1e})",
            s.name,
            if s.pass { "pass" } else { "FAIL" },
            s.max_residual,
            s.tolerance
        );
    }
    emit(cfg, "report.json", &to_json(&report)?)?;
    Ok(report.pass)
}

fn seeded_or_locus(
    cfg: &RunConfig,
    sample: impl FnOnce(&mut Sampler, usize) -> Point,
) -> Result<Point> {
    if let Some(pt) = cfg.locus()? {
        return Ok(pt);
    }
    let n = cfg.band(24)?;
    Ok(sample(&mut Sampler::new(cfg.seed()?), n))
}

/// Gram matrix CSV: one row per frame, real and imaginary part per column.
pub fn gram_csv(cfg: &RunConfig) -> Result<String> {
    let kmax = cfg.kmax.unwrap_or(4);
    if kmax < 0 {
        return Err(Error::Config(format!(
            "kmax must be nonnegative, got {kmax}"
        )));
    }
    let pt = seeded_or_locus(cfg, |smp, n| smp.m0_point(n))?;
    let (idx, m) = gram_matrix(&Structure::new(&pt)?, kmax)?;
    let mut out = String::from("frame");
    for i in &idx {
        out += &format!(",{i}_re,{i}_im");
    }
    out.push('\n');
    for (i, row) in idx.iter().zip(&m) {
        out += &i.to_string();
        for c in row {
            out += &format!(",{},{}", num(c.re), num(c.im));
        }
        out.push('\n');
    }
    Ok(out)
}

fn gram(cfg: &RunConfig) -> Result<()> {
    emit(cfg, "gram.csv", &gram_csv(cfg)?)
}

/// Value of a quantity labelled by a flat index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Labelled {
    pub index: String,
    pub value: C,
}

/// Output of `potential`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialReport {
    pub point: Point,
    #[serde(rename = "F")]
    pub f: C,
    pub first_derivatives: Vec<Labelled>,
    pub flat_coordinates: FlatChart,
}

pub fn potential_report(cfg: &RunConfig) -> Result<PotentialReport> {
    let n_max = cfg.n_max.unwrap_or(8);
    if n_max < 1 {
        return Err(Error::Config(format!(
            "n_max must be at least 1, got {n_max}"
        )));
    }
    let pt = seeded_or_locus(cfg, |smp, n| smp.m0_point(n))?;
    let s = Structure::new(&pt)?;
    let mut idx: Vec<FlatIndex> = (-n_max..=n_max).map(FlatIndex::T).collect();
    idx.extend([FlatIndex::U, FlatIndex::V]);
    let first_derivatives = idx
        .iter()
        .map(|&i| {
            Ok(Labelled {
                index: i.to_string(),
                value: flat_first_derivative(&s, i)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(PotentialReport {
        f: potential_f_with(&s)?,
        first_derivatives,
        flat_coordinates: flat_coords(&pt, n_max)?,
        point: pt,
    })
}

fn potential(cfg: &RunConfig) -> Result<()> {
    emit(cfg, "potential.json", &to_json(&potential_report(cfg)?)?)
}

fn parse_flow(name: &str) -> Result<Flow> {
    name.parse()
}

fn flow(cfg: &RunConfig) -> Result<()> {
    let out = cfg
        .out
        .as_ref()
        .ok_or_else(|| Error::Config("flow writes snapshots and needs --out".into()))?;
    let flow = parse_flow(
        cfg.flow
            .as_deref()
            .ok_or_else(|| Error::Config("flow needs --flow".into()))?,
    )?;
    let t_end = cfg.t_end.unwrap_or(0.1);
    let opts = Integrator {
        h: cfg.h.unwrap_or(1e-3),
        tail_limit: cfg.tail_limit.unwrap_or(DEFAULT_TAIL_LIMIT),
        snapshot_every: cfg.snapshot_every.unwrap_or(10),
    };
    if !(opts.h > 0.0 && t_end >= 0.0 && opts.snapshot_every >= 1) {
        return Err(Error::Config(
            "need h > 0, T >= 0 and snapshot_every >= 1".into(),
        ));
    }
    let family = LoopFamily {
        nodes: cfg.k.unwrap_or(32),
        band: cfg.band(16)? as i64,
        ..LoopFamily::default()
    };
    if family.nodes < 8 {
        return Err(Error::Config(format!(
            "K must be at least 8, got {}",
            family.nodes
        )));
    }
    let l = family.sample(&mut Sampler::new(cfg.seed()?));
    let tr = integrate(&l, flow, t_end, &opts)?;
    fs::create_dir_all(out)?;
    for (i, (time, snap)) in tr.snapshots.iter().enumerate() {
        #[derive(Serialize)]
        struct Snapshot<'a> {
            flow: String,
            time: f64,
            state: &'a crate::hierarchy::LoopPoint,
        }
        let json = to_json(&Snapshot {
            flow: flow.to_string(),
            time: *time,
            state: snap,
        })?;
        write_atomic(&out.join(format!("snapshot_{i:05}.json")), &json)?;
    }
    let mut csv =
        String::from("step,time,H1_re,H1_im,Hbar1_re,Hbar1_im,H2_re,H2_im,tail_norm,u1_drift\n");
    for r in &tr.ledger {
        csv += &format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.step,
            num(r.time),
            num(r.h1.re),
            num(r.h1.im),
            num(r.hbar1.re),
            num(r.hbar1.im),
            num(r.h2.re),
            num(r.h2.im),
            num(r.tail_norm),
            num(r.u1_drift)
        );
    }
    write_atomic(&out.join("ledger.csv"), &csv)?;
    let (a, b) = (tr.ledger[0], tr.ledger[tr.ledger.len() - 1]);
    eprintln!(
        "{flow}: {} steps to T = {t_end}, |H1 drift| = {:.3e}, {} snapshots in {}",
        b.step,
        (b.h1 - a.h1).norm(),
        tr.snapshots.len(),
        out.display()
    );
    Ok(())
}

/// Canonical data CSV on the circle `p_j = exp(i theta_j)`.
pub fn canonical_csv(cfg: &RunConfig) -> Result<String> {
    let m = cfg.grid.unwrap_or(64);
    if m < 8 {
        return Err(Error::Config(format!("grid must be at least 8, got {m}")));
    }
    let names = cfg
        .velocities
        .clone()
        .unwrap_or_else(|| vec!["t:0".into(), "u".into()]);
    let flows: Vec<Flow> = names.iter().map(|n| parse_flow(n)).collect::<Result<_>>()?;
    let pt = seeded_or_locus(cfg, |smp, n| smp.semisimple_point(n))?;
    let s = Structure::new(&pt)?;
    let data = canonical_data(&pt, m)?;
    let velocities: Vec<Vec<C>> = flows
        .iter()
        .map(|&f| char_velocities(&s, velocity_flow(f), m))
        .collect::<Result<_>>()?;
    let mut out = String::from("theta_j,sigma_re,sigma_im,u_sigma_re,u_sigma_im,f_re,f_im");
    for f in &flows {
        out += &format!(",velocity_{f}_re,velocity_{f}_im");
    }
    out.push('\n');
    for j in 0..m {
        let theta = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
        out += &num(theta);
        for c in [data.sigma[j], data.u_sigma[j], data.f[j]]
            .iter()
            .chain(velocities.iter().map(|v| &v[j]))
        {
            out += &format!(",{},{}", num(c.re), num(c.im));
        }
        out.push('\n');
    }
    Ok(out)
}

fn canonical(cfg: &RunConfig) -> Result<()> {
    emit(cfg, "canonical.csv", &canonical_csv(cfg)?)
}

/// A number with 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// JSON formatter writing every float with 17 significant digits.
struct SeventeenDigits;

impl serde_json::ser::Formatter for SeventeenDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(num(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
}

/// Compact JSON with 17-digit floats and a trailing newline; non-finite values become `null`.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SeventeenDigits);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Io(e.to_string()))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
}

/// Writes through a temporary file in the same directory and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::Io(format!("{} is not a file path", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Writes `file` under the output directory, or to stdout without one.
fn emit(cfg: &RunConfig, file: &str, contents: &str) -> Result<()> {
    match &cfg.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            write_atomic(&dir.join(file), contents)
        }
        None => {
            io::stdout().write_all(contents.as_bytes())?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_the_file() {
        let base =
            RunConfig::from_json(r#"{"seed": 1, "N": 12, "tolerances": {"gram": 1e-3}}"#).unwrap();
        let top = RunConfig {
            seed: Some(7),
            ..RunConfig::default()
        };
        let cfg = base.overlay(top);
        assert_eq!((cfg.seed, cfg.n), (Some(7), Some(12)));
        assert_eq!(cfg.verify_config().unwrap().tolerance("gram"), 1e-3);
    }

    #[test]
    fn config_errors_carry_positions() {
        let e = RunConfig::from_json("{\n  \"seed\": 1,\n  \"sed\": 2\n}").unwrap_err();
        assert!(e.to_string().contains("line 3"), "{e}");
        let cfg = RunConfig {
            seed: Some(1),
            suites: Some(vec!["nope".into()]),
            ..RunConfig::default()
        };
        assert!(matches!(cfg.suite_names(), Err(Error::Config(_))));
        assert!(matches!(
            RunConfig::default().verify_config(),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn seventeen_digit_json() {
        assert_eq!(
            to_json(&[0.1, -2.0]).unwrap(),
            "[1.0000000000000001e-1,-2.0000000000000000e0]\n"
        );
        assert_eq!(to_json(&f64::INFINITY).unwrap(), "null\n");
        let back: Vec<f64> = serde_json::from_str(&to_json(&[0.1, 1.0 / 3.0]).unwrap()).unwrap();
        assert_eq!(back, vec![0.1, 1.0 / 3.0]);
    }
}
