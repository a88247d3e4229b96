//! Command-line front end.

use std::f64::consts::PI;
use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use crate::bounds::{naive_bound, qram_max_qubits, teleport_hybrid_max_qubits, BoundResult};
use crate::error::{Error, Result};
use crate::gates::GateSet;
use crate::lattice::{max_group_velocity, measure_light_cone, LatticeSpec, NormalModes};
use crate::params::{Conventions, HardwareParams, LogBase, VelocitySource};
use crate::qram::{simulate_query_with, verify_retrieval, ClassicalDatabase};
use crate::sweep::{run_sweep, Axis, SweepGrid};
use crate::verify::{run_verify, FaultInjection};

// a closed stdout (e.g. piping into `head`) ends the output instead of panicking
macro_rules! println {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RETRIEVAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "causal-qram",
    version,
    about = "Causality bounds and simulations for bucket-brigade QRAM"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a capacity bound.
    Bound(BoundArgs),
    /// Evaluate the bound over a grid and write CSV.
    Sweep(SweepArgs),
    /// Measure the light cone of a harmonic lattice.
    Lightcone(LightconeArgs),
    /// Simulate QRAM queries on a small tree.
    Qramsim(QramArgs),
    /// Run every property suite.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Default, Clone)]
struct ParamFlags {
    /// key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    delta_t: Option<f64>,
    #[arg(long)]
    g1: Option<f64>,
    #[arg(long)]
    g2: Option<f64>,
    /// Comma-separated spring constants.
    #[arg(long, value_delimiter = ',')]
    lambda: Option<Vec<f64>>,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    nu: Option<usize>,
    #[arg(long)]
    c_max: Option<f64>,
}

impl ParamFlags {
    fn resolve(&self, base: HardwareParams) -> Result<HardwareParams> {
        let mut p = match &self.config {
            Some(path) => HardwareParams::from_config_file(path)?,
            None => base,
        };
        macro_rules! set {
            ($($field:ident),*) => {$(if let Some(v) = self.$field { p.$field = v; })*};
        }
        set!(a, delta_t, g1, g2, m, d, c_max);
        if let Some(l) = &self.lambda {
            p.lambda = l.clone();
            p.nu = l.len();
        }
        if let Some(nu) = self.nu {
            p.nu = nu;
        }
        p.validate()
    }
}

#[derive(Args, Debug, Default, Clone)]
struct ConventionFlags {
    /// natural | 2
    #[arg(long)]
    log_base: Option<String>,
    #[arg(long)]
    depth_exponent: Option<u32>,
    /// lieb_robinson | qft | group | teleport-hybrid | a velocity in m/s
    #[arg(long)]
    velocity_source: Option<String>,
}

impl ConventionFlags {
    fn resolve(&self, base: Conventions) -> Result<Conventions> {
        let mut c = base;
        if let Some(b) = &self.log_base {
            c.log_base = b.parse()?;
        }
        if let Some(p) = self.depth_exponent {
            c.depth_exponent = p;
        }
        if let Some(v) = &self.velocity_source {
            c.velocity_source = v.parse()?;
        }
        Ok(c)
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum BoundPreset {
    /// a = 1e-6 m, ΔT = 1e-3 s, c = 3e8 m/s, one log factor.
    Naive,
    /// a = 1e-6 m, τ₀ = 1e-3 s, sound speed 6000 m/s, two log factors.
    Fig3,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum BoundKind {
    /// Operation time τ₀·logᵖN against signal travel time.
    Qram,
    /// One clock cycle per log N stage at the speed cap.
    Naive,
    /// 2D layout with light-speed routing.
    TeleportHybrid,
}

#[derive(Args, Debug)]
struct BoundArgs {
    #[arg(long, value_enum)]
    preset: Option<BoundPreset>,
    #[arg(long, value_enum)]
    kind: Option<BoundKind>,
    #[command(flatten)]
    params: ParamFlags,
    #[command(flatten)]
    conventions: ConventionFlags,
    /// Print only the JSON record.
    #[arg(long)]
    json: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum SweepPreset {
    Fig3,
    Fig4,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, value_enum)]
    preset: Option<SweepPreset>,
    /// name:min:max:points[:lin|log], names velocity | g | lambda_over_m | a.
    #[arg(long = "axis")]
    axes: Vec<String>,
    /// Dimensions reported as columns.
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    #[command(flatten)]
    params: ParamFlags,
    #[command(flatten)]
    conventions: ConventionFlags,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct LightconeArgs {
    #[arg(long, default_value_t = 1)]
    d: usize,
    /// Sites per axis.
    #[arg(long, default_value_t = 400)]
    l: usize,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    lambda: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    /// Arrival level as a fraction of the per-distance peak.
    #[arg(long, default_value_t = 1e-3)]
    threshold: f64,
    /// Defaults to 1.25 r_max / v_group + 20 / ω_max.
    #[arg(long)]
    t_max: Option<f64>,
    /// Defaults to L/2 − ν.
    #[arg(long)]
    r_max: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct QramArgs {
    /// File of '0'/'1' characters.
    #[arg(long)]
    db: Option<PathBuf>,
    /// Database given inline, e.g. 0110.
    #[arg(long, conflicts_with = "db")]
    bits: Option<String>,
    /// Number of leaves for a random database.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// `all`, or one address as an integer.
    #[arg(long, default_value = "all")]
    address: String,
    #[arg(long, default_value_t = 2000.0 * PI)]
    g1: f64,
    #[arg(long, default_value_t = 2000.0 * PI)]
    g2: f64,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, hide = true)]
    inject_fault: Option<String>,
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let outcome = match cli.command {
        Command::Bound(a) => cmd_bound(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Lightcone(a) => cmd_lightcone(a),
        Command::Qramsim(a) => cmd_qramsim(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}

fn print_bound(r: &BoundResult, json_only: bool) -> Result<()> {
    let record = serde_json::to_string(r).map_err(|e| Error::Io(e.to_string()))?;
    if !json_only {
        println!("max_qubits_total   = {:.6e}", r.max_qubits_total);
        println!("max_linear_extent  = {:.6e}", r.max_linear_extent);
        println!("velocity_used      = {:.6e} m/s", r.velocity_used);
        println!("time_scale         = {:.6e} s", r.time_scale);
        println!("ratio              = {:.6e}", r.ratio);
        println!("conventions        : {}", r.conventions);
    }
    println!("{record}");
    Ok(())
}

fn cmd_bound(args: BoundArgs) -> Result<i32> {
    let (base_params, base_conv, default_kind) = match args.preset {
        Some(BoundPreset::Naive) => (
            HardwareParams::default(),
            Conventions::new(LogBase::Natural, 1, VelocitySource::Explicit(3e8)),
            BoundKind::Naive,
        ),
        Some(BoundPreset::Fig3) => (
            HardwareParams::default(),
            Conventions::new(LogBase::Natural, 2, VelocitySource::Explicit(6e3)),
            BoundKind::Qram,
        ),
        None => (
            HardwareParams::default(),
            Conventions::default(),
            BoundKind::Qram,
        ),
    };
    let params = args.params.resolve(base_params)?;
    let conventions = args.conventions.resolve(base_conv)?;
    let result = match args.kind.unwrap_or(default_kind) {
        BoundKind::Qram => qram_max_qubits(&params, conventions)?,
        BoundKind::Naive => naive_bound(&params, conventions.log_base)?,
        BoundKind::TeleportHybrid => teleport_hybrid_max_qubits(&params, conventions)?,
    };
    print_bound(&result, args.json)?;
    Ok(EXIT_OK)
}

fn cmd_sweep(args: SweepArgs) -> Result<i32> {
    let mut grid = match args.preset {
        Some(SweepPreset::Fig3) => SweepGrid::fig3(),
        Some(SweepPreset::Fig4) => SweepGrid::fig4(),
        None => SweepGrid {
            axes: Vec::new(),
            params: HardwareParams::default(),
            conventions: Conventions::default(),
            dims: vec![1, 2, 3],
        },
    };
    grid.params = args.params.resolve(grid.params.clone())?;
    grid.conventions = args.conventions.resolve(grid.conventions)?;
    if !args.axes.is_empty() {
        grid.axes = args
            .axes
            .iter()
            .map(|a| Axis::parse(a))
            .collect::<Result<_>>()?;
    }
    if let Some(d) = args.dims {
        grid.dims = d;
    }
    let table = run_sweep(&grid)?;
    table.write_csv(&args.out)?;
    println!(
        "wrote {} rows to {} ({})",
        table.rows.len(),
        args.out.display(),
        grid.conventions
    );
    for col in table.header.iter().filter(|h| h.starts_with("max_qubits")) {
        let values = table.column(col).unwrap_or_default();
        let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        println!("{col}: max {max:.4e}");
    }
    Ok(EXIT_OK)
}

fn cmd_lightcone(args: LightconeArgs) -> Result<i32> {
    let spec = LatticeSpec::new(args.d, args.l, args.lambda.clone(), args.m, args.a)?;
    let r_max = args.r_max.unwrap_or_else(|| spec.max_clean_distance());
    let t_max = match args.t_max {
        Some(t) => t,
        None => {
            let v = max_group_velocity(&spec).lattice_units;
            1.25 * r_max as f64 / v + 20.0 / NormalModes::new(&spec).omega_max()
        }
    };
    let cone = measure_light_cone(&spec, args.threshold, t_max, r_max)?;
    if let Some(out) = &args.out {
        let meta = json!({
            "spec": spec,
            "threshold": cone.threshold,
            "t_max": cone.t_max,
            "dt": cone.dt,
            "velocity_lattice": cone.velocity_lattice,
        });
        let mut text = format!("# {meta}\nr,t_arrival,commutator_peak\n");
        for a in &cone.arrivals {
            let t = a.t_arrival.map_or("none".to_string(), |t| format!("{t:e}"));
            text.push_str(&format!("{},{},{:e}\n", a.r, t, a.peak));
        }
        std::fs::write(out, text)?;
    }
    let missing = cone
        .arrivals
        .iter()
        .filter(|a| a.t_arrival.is_none())
        .count();
    println!(
        "fitted velocity      = {:.6} lattice units/s ({:.6e} m/s)",
        cone.velocity_lattice, cone.velocity_physical
    );
    println!(
        "group velocity max   = {:.6} lattice units/s",
        cone.group_velocity.lattice_units
    );
    println!(
        "long-wavelength      = {:.6} lattice units/s",
        cone.group_velocity.long_wavelength
    );
    println!(
        "Lieb-Robinson bound  = {:.6} lattice units/s",
        cone.lr_bound_lattice
    );
    if missing > 0 {
        println!("no arrival at {missing} distance(s)");
    }
    if cone.within_bound() {
        println!("PASS fitted < bound");
        Ok(EXIT_OK)
    } else {
        println!("FAIL fitted >= bound");
        Ok(EXIT_VERIFY_FAILED)
    }
}

fn cmd_qramsim(args: QramArgs) -> Result<i32> {
    let db = match (&args.db, &args.bits) {
        (Some(path), _) => ClassicalDatabase::from_file(path)?,
        (None, Some(bits)) => ClassicalDatabase::from_bitstring(bits)?,
        (None, None) => {
            let n = args
                .n
                .ok_or_else(|| Error::Config("one of --db, --bits or --n is required".into()))?;
            ClassicalDatabase::random(n, args.seed)?
        }
    };
    if let Some(n) = args.n {
        if n != db.len() {
            return Err(Error::Config(format!(
                "--n {n} but the database has {} bits",
                db.len()
            )));
        }
    }
    let gates = GateSet::new(args.g1, args.g2)?;
    println!("database {}", db.to_bitstring());
    println!("address,expected,read,fidelity");
    let passed = if args.address == "all" {
        let report = verify_retrieval(&db, &gates, args.seed)?;
        for row in &report.rows {
            println!(
                "{},{},{},{:.12}",
                row.address, row.expected as u8, row.read as u8, row.fidelity
            );
        }
        for (i, f) in report.superposition_fidelities.iter().enumerate() {
            println!("superposition {i}: fidelity {f:.12}");
        }
        println!("min fidelity {:.12}", report.min_fidelity);
        report.passed()
    } else {
        let x: usize = args
            .address
            .parse()
            .map_err(|_| Error::Config(format!("bad address '{}'", args.address)))?;
        if x >= db.len() {
            return Err(Error::Config(format!("address {x} out of range")));
        }
        let mut amp = vec![Complex64::default(); db.len()];
        amp[x] = Complex64::new(1.0, 0.0);
        let r = simulate_query_with(&db, &amp, &gates)?;
        let row = r.retrieval[0];
        println!(
            "{},{},{},{:.12}",
            row.address, row.expected as u8, row.read as u8, row.fidelity
        );
        println!("min fidelity {:.12}", r.fidelity.min(row.fidelity));
        row.read == row.expected && r.fidelity >= 1.0 - 1e-9
    };
    if passed {
        println!("PASS");
        Ok(EXIT_OK)
    } else {
        println!("FAIL retrieval mismatch");
        Ok(EXIT_RETRIEVAL)
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<i32> {
    let faults = match args.inject_fault.as_deref() {
        None => FaultInjection::default(),
        Some("dispersion") => FaultInjection {
            corrupt_dispersion: true,
        },
        Some(other) => return Err(Error::Config(format!("unknown fault '{other}'"))),
    };
    let report = run_verify(faults);
    for s in &report.suites {
        let verdict = if s.passed { "PASS" } else { "FAIL" };
        if s.passed {
            println!("{verdict} {:<20} {:>8.3} s", s.name, s.seconds);
        } else {
            println!(
                "{verdict} {:<20} {:>8.3} s  {}",
                s.name, s.seconds, s.message
            );
        }
    }
    if report.passed() {
        Ok(EXIT_OK)
    } else {
        println!("failed suites: {}", report.failed().join(", "));
        Ok(EXIT_VERIFY_FAILED)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(args: &[&str]) -> i32 {
        run(std::iter::once("causal-qram").chain(args.iter().copied()))
    }

    #[test]
    fn exit_codes() {
        assert_eq!(code(&["bound", "--preset", "naive"]), EXIT_OK);
        assert_eq!(code(&["bound", "--no-such-flag"]), EXIT_CONFIG);
        assert_eq!(code(&["bound", "--a=-1"]), EXIT_CONFIG);
        assert_eq!(code(&["bound", "--kind", "teleport-hybrid"]), EXIT_CONFIG);
        assert_eq!(code(&["qramsim", "--bits", "011"]), EXIT_CONFIG);
        assert_eq!(code(&["qramsim", "--n", "16"]), EXIT_CONFIG);
        assert_eq!(
            code(&["qramsim", "--bits", "01", "--address", "1"]),
            EXIT_OK
        );
        assert_eq!(
            code(&[
                "sweep",
                "--axis",
                "velocity:1:10:1",
                "--out",
                "/nonexistent/x.csv"
            ]),
            EXIT_CONFIG
        );
    }
}
