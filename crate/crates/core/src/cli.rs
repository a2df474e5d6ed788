//! Command-line front end.
//!
//! Exit codes: 0 all checks passed, 1 a check failed or a computation broke
//! down, 2 bad usage or configuration. Errors are printed to stderr as one
//! line: `error kind=<tag> reason=<message>`.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand};

use crate::config::{self, EosSpec, KeyValues};
use crate::error::Error;
use crate::eos::{BarotropicEos, Thermo};
use crate::fvsim::{self, NuBehaviour};
use crate::index::IndexFunction;
use crate::numerics::{lin_space, log_space};
use crate::report::{self, fmt, fmt_opt, OutputDir, VerifyReport};
use crate::shock::{self, ShockKind, ShockRow};
use crate::verify::{self, Check};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// `LO:HI:N`, log-spaced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl FromStr for Sweep {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, n] = parts[..] else {
            return Err(format!("expected LO:HI:N, got {s:?}"));
        };
        let lo: f64 = lo.parse().map_err(|_| format!("LO = {lo:?} is not a number"))?;
        let hi: f64 = hi.parse().map_err(|_| format!("HI = {hi:?} is not a number"))?;
        let n: usize = n.parse().map_err(|_| format!("N = {n:?} is not an integer"))?;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(format!("need 0 < LO < HI, got {lo}:{hi}"));
        }
        if n < 2 {
            return Err(format!("need N >= 2, got {n}"));
        }
        Ok(Self { lo, hi, n })
    }
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        log_space(self.lo, self.hi, self.n)
    }
}

#[derive(Debug, Parser)]
#[command(name = "relgodunov", version, about = "Relativistic perfect fluids in Godunov variables")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Flat key = value configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Directory for CSV/JSON output and the manifest.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Seed for every random sample.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,

    /// Grid points (index-table, verify), random shocks (shock) or cells (simulate).
    #[arg(long, global = true, value_name = "N")]
    pub points: Option<usize>,

    /// Log-spaced sweep LO:HI:N; shock amplitudes for `shock`, pressures for `index-table`.
    #[arg(long, global = true, value_name = "LO:HI:N")]
    pub sweep: Option<Sweep>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Run the identity, symmetry, index and shock suites for the configured EOS.
    Verify,
    /// Tabulate f, nu, X_hat and the index ODE residual against pressure.
    IndexTable,
    /// Solve and classify a shock; optionally sweep amplitudes.
    Shock,
    /// Evolve a 1D profile with the HLL scheme and track N_nu.
    Simulate,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::IndexTable => "index-table",
            Command::Shock => "shock",
            Command::Simulate => "simulate",
        }
    }
}

/// Error with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub error: Error,
}

fn usage(error: Error) -> Failure {
    Failure { code: EXIT_USAGE, error }
}

fn runtime(error: Error) -> Failure {
    Failure {
        code: EXIT_CHECK_FAIL,
        error,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        runtime(e)
    }
}

/// One line, no embedded newlines.
pub fn error_line(kind: &str, reason: &str) -> String {
    let reason = reason.split_whitespace().collect::<Vec<_>>().join(" ");
    format!("error kind={kind} reason={reason}")
}

/// Parse `args`, run, and return the exit code. Normal output goes to
/// `stdout`, the error line to `stderr`.
pub fn main_with(args: impl IntoIterator<Item = OsString>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return EXIT_PASS;
            }
            let text = e.to_string();
            let first = text
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("invalid arguments")
                .trim_start_matches("error: ");
            let _ = writeln!(stderr, "{}", error_line("usage", first));
            return EXIT_USAGE;
        }
    };
    match run(&cli, stdout) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "{}", error_line(f.error.kind(), &f.error.to_string()));
            f.code
        }
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    let kv = match &cli.config {
        Some(p) => KeyValues::load(p).map_err(usage)?,
        None => KeyValues::default(),
    };
    if cli.points == Some(0) {
        return Err(usage(Error::Config("--points must be positive".into())));
    }
    let mut dir = cli.out.as_deref().map(OutputDir::create).transpose().map_err(usage)?;
    let pass = match cli.command {
        Command::Verify => cmd_verify(cli, &kv, out, dir.as_mut())?,
        Command::IndexTable => cmd_index_table(cli, &kv, out, dir.as_mut())?,
        Command::Shock => cmd_shock(cli, &kv, out, dir.as_mut())?,
        Command::Simulate => cmd_simulate(cli, &kv, out, dir.as_mut())?,
    };
    if let Some(d) = dir {
        let mut settings = kv.entries().clone();
        if let Some(n) = cli.points {
            settings.insert("--points".into(), n.to_string());
        }
        if let Some(s) = cli.sweep {
            settings.insert("--sweep".into(), format!("{}:{}:{}", s.lo, s.hi, s.n));
        }
        let path = d.finish(cli.command.name(), Some(cli.seed), &settings, pass)?;
        w(out, format!("manifest: {}", path.display()))?;
    }
    Ok(if pass { EXIT_PASS } else { EXIT_CHECK_FAIL })
}

fn w(out: &mut dyn Write, line: impl AsRef<str>) -> Result<(), Failure> {
    writeln!(out, "{}", line.as_ref()).map_err(|e| runtime(Error::Io(e.to_string())))
}

/// Configured pressure range clipped to the EOS interval.
fn pressure_range(kv: &KeyValues, eos: &BarotropicEos) -> Result<(f64, f64), Failure> {
    let iv = &eos.interval;
    let lo = if iv.lo > 0.0 { iv.lo.max(1e-3) } else { 1e-3 };
    let hi = iv.hi.min(1e3);
    let (a, b) = kv.pressure_range(lo, hi).map_err(usage)?;
    for (key, p) in [("p_min", a), ("p_max", b)] {
        if !iv.contains(p) {
            return Err(usage(Error::Config(format!(
                "{key} = {p} outside the EOS interval [{}, {}]",
                iv.lo, iv.hi
            ))));
        }
    }
    Ok((a, b))
}

fn barotropic_checks(
    kv: &KeyValues,
    eos: &BarotropicEos,
    isentropic: Option<&crate::eos::IsentropicEos>,
    cli: &Cli,
) -> Result<Vec<Check>, Failure> {
    let (lo, hi) = pressure_range(kv, eos)?;
    let p_ref = kv.positive_or("p_ref", 1.0).map_err(usage)?;
    let points = cli.points.unwrap_or(101);
    let states = kv.usize_or("states", 20).map_err(usage)?;
    let covs = kv.usize_or("covectors", 20).map_err(usage)?;
    let shocks = kv.usize_or("shocks", 200).map_err(usage)?;
    let seed = cli.seed;

    let mut checks = vec![verify::causality(eos, lo, hi, points)];
    checks.extend(verify::index_suite(eos, p_ref, lo, hi, points));
    match IndexFunction::new(eos.clone(), p_ref) {
        Ok(idx) => {
            checks.extend(verify::symmetrizer4_sweep(&idx, (lo, hi), states, covs, seed).checks("4-field symmetrizer", seed));
            checks.extend(verify::four_field_identities(&idx, (lo, hi), 100, seed));
            checks.extend(verify::shock_suite(&idx, (lo, hi), shocks, seed));
        }
        Err(e) => checks.push(Check::error("index construction", &e)),
    }
    if let Some(iso) = isentropic {
        let n_lo = kv.positive_or("n_min", 0.1).map_err(usage)?;
        let n_hi = kv.positive_or("n_max", 10.0).map_err(usage)?;
        checks.extend(verify::isentropic_suite(iso, n_lo, n_hi, points.min(41)));
    }
    if let Some(g) = eos.gamma().filter(|&g| g > 1.0 && g <= 2.0 && !eos.is_stiff()) {
        let k = kv.positive_or("k", 1.0).map_err(usage)?;
        let c_v = kv.positive_or("c_v", 1.0).map_err(usage)?;
        checks.extend(verify::product_form_suite(g, k, c_v));
    }
    Ok(checks)
}

fn cmd_verify(cli: &Cli, kv: &KeyValues, out: &mut dyn Write, dir: Option<&mut OutputDir>) -> Result<bool, Failure> {
    let spec = EosSpec::from_config(kv).map_err(usage)?;
    let seed = cli.seed;
    let checks = match &spec {
        EosSpec::Barotropic { eos, isentropic } => barotropic_checks(kv, eos, isentropic.as_ref(), cli)?,
        EosSpec::IdealGas(g) => {
            let states = kv.usize_or("states", 20).map_err(usage)?;
            let covs = kv.usize_or("covectors", 20).map_err(usage)?;
            let mut checks = Vec::new();
            let mut cs2: f64 = 0.0;
            for n in log_space(0.1, 10.0, 20) {
                for s in lin_space(-2.0, 2.0, 20) {
                    let st = g.thermo_props(n, s)?;
                    cs2 = cs2.max(g.sound_speed2(&st));
                }
            }
            checks.push(Check::below("ideal gas: max c_s^2", cs2, 1.0, "20x20 (n, sigma) grid"));
            checks.extend(verify::ideal_gas_identities(g, 100, seed));
            checks.extend(verify::symmetrizer5_sweep(g, states, covs, seed).checks("5-field symmetrizer", seed));
            if g.m == 0.0 {
                let baro = spec.barotrope()?;
                checks.extend(barotropic_checks(kv, &baro, None, cli)?);
            }
            checks
        }
    };
    let rep = VerifyReport::new(spec.label(), seed, checks);
    write!(out, "{}", verify::format_checks(&rep.checks)).map_err(|e| runtime(Error::Io(e.to_string())))?;
    let passed = rep.checks.iter().filter(|c| c.pass).count();
    w(
        out,
        format!(
            "verify {}: {passed}/{} checks passed: {}",
            rep.eos,
            rep.checks.len(),
            if rep.pass { "PASS" } else { "FAIL" }
        ),
    )?;
    if let Some(d) = dir {
        d.write_json("report.json", &rep)?;
        let mut csv = String::from("name,value,bound,tolerance,pass\n");
        for c in &rep.checks {
            csv.push_str(&format!(
                "\"{}\",{},{},{},{}\n",
                c.name.replace('"', "'"),
                fmt(c.value),
                if c.bound == verify::Bound::Below { "below" } else { "above" },
                fmt(c.tolerance),
                c.pass
            ));
        }
        d.write("checks.csv", &csv)?;
    }
    Ok(rep.pass)
}

fn cmd_index_table(cli: &Cli, kv: &KeyValues, out: &mut dyn Write, dir: Option<&mut OutputDir>) -> Result<bool, Failure> {
    let spec = EosSpec::from_config(kv).map_err(usage)?;
    let eos = spec.barotrope().map_err(usage)?;
    let p_ref = kv.positive_or("p_ref", 1.0).map_err(usage)?;
    let ps = match cli.sweep {
        Some(s) => {
            let kv2 = {
                let mut k = kv.clone();
                k.set("p_min", &s.lo.to_string());
                k.set("p_max", &s.hi.to_string());
                k
            };
            let (lo, hi) = pressure_range(&kv2, &eos)?;
            log_space(lo, hi, s.n)
        }
        None => {
            let (lo, hi) = pressure_range(kv, &eos)?;
            log_space(lo, hi, cli.points.unwrap_or(101).max(2))
        }
    };
    let idx = IndexFunction::new(eos, p_ref).map_err(usage)?;
    let mut csv = String::from("p,f,nu,xhat,ode_residual\n");
    let mut worst: f64 = 0.0;
    for &p in &ps {
        let f = idx.index_f(p)?;
        let r = idx.ode_residual(p)?;
        worst = worst.max(r);
        csv.push_str(&report::csv_row(&[p, f, idx.nu(p)?, idx.xhat_of_f(f)?, r]));
        csv.push('\n');
    }
    let pass = worst < 1e-8;
    match dir {
        Some(d) => d.write("index_table.csv", &csv)?,
        None => write!(out, "{csv}").map_err(|e| runtime(Error::Io(e.to_string())))?,
    }
    w(
        out,
        format!(
            "index-table {}: {} rows, max ODE residual {}: {}",
            idx.eos().label,
            ps.len(),
            fmt(worst),
            if pass { "PASS" } else { "FAIL" }
        ),
    )?;
    Ok(pass)
}

fn row_csv(r: &ShockRow) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{}",
        fmt_opt(r.gamma),
        fmt(r.p_minus),
        fmt(r.p_plus),
        fmt(r.v_minus),
        fmt(r.v_plus),
        r.lax,
        fmt(r.gnl_min),
        fmt(r.production),
        kind_name(r.kind)
    )
}

fn kind_name(k: ShockKind) -> &'static str {
    match k {
        ShockKind::Regular => "regular",
        ShockKind::LinearlyDegenerate => "linearly-degenerate",
    }
}

/// A compressive admissible shock through a GNL region must produce nu.
fn row_ok(r: &ShockRow) -> bool {
    match r.kind {
        ShockKind::LinearlyDegenerate => r.production.abs() < 1e-12,
        ShockKind::Regular => !(r.lax && r.gnl_min > 0.0) || r.production > 0.0,
    }
}

fn cmd_shock(cli: &Cli, kv: &KeyValues, out: &mut dyn Write, dir: Option<&mut OutputDir>) -> Result<bool, Failure> {
    let spec = EosSpec::from_config(kv).map_err(usage)?;
    if let EosSpec::IdealGas(g) = &spec {
        let n = kv.positive_or("n_minus", 1.0).map_err(usage)?;
        let sigma = kv.f64_or("sigma_minus", 0.0).map_err(usage)?;
        let v = kv.f64_or("v_minus", 0.9).map_err(usage)?;
        let sol = shock::rh_solve_ideal(g, n, sigma, v)?;
        let prod = shock::entropy_production(&sol).unwrap_or(f64::NAN);
        let header = "p_minus,p_plus,n_minus,n_plus,sigma_minus,sigma_plus,v_minus,v_plus,entropy_production,max_residual";
        let res = sol.residuals.iter().fold(0.0f64, |m, &x| m.max(x));
        let line = format!(
            "{},{},{},{},{},{},{},{},{},{}",
            fmt(sol.p_minus),
            fmt(sol.p_plus),
            fmt_opt(sol.n_minus),
            fmt_opt(sol.n_plus),
            fmt_opt(sol.sigma_minus),
            fmt_opt(sol.sigma_plus),
            fmt(sol.v_minus),
            fmt(sol.v_plus),
            fmt(prod),
            fmt(res)
        );
        let csv = format!("{header}\n{line}\n");
        let pass = prod >= 0.0 && res < 1e-10;
        match dir {
            Some(d) => {
                d.write("shock.csv", &csv)?;
                d.write_json("shock.json", &sol)?;
            }
            None => write!(out, "{csv}").map_err(|e| runtime(Error::Io(e.to_string())))?,
        }
        w(out, format!("entropy production {}: {}", fmt(prod), if pass { "PASS" } else { "FAIL" }))?;
        return Ok(pass);
    }

    let eos = spec.barotrope().map_err(usage)?;
    let p_ref = kv.positive_or("p_ref", 1.0).map_err(usage)?;
    let p_minus = kv.positive_or("p_minus", 1.0).map_err(usage)?;
    let p_plus = kv.positive_or("p_plus", 5.0).map_err(usage)?;
    let idx = IndexFunction::new(eos, p_ref).map_err(usage)?;
    let main = shock::analyse(&idx, p_minus, p_plus)?;
    let mut rows = vec![main.clone()];
    let mut pass = row_ok(&main);
    let mut summary = vec![format!(
        "shock {} {} -> {}: {}, production {}",
        idx.eos().label,
        fmt(p_minus),
        fmt(p_plus),
        match main.kind {
            ShockKind::Regular if main.lax => "regular, Lax admissible",
            ShockKind::Regular => "regular, not Lax admissible",
            ShockKind::LinearlyDegenerate => "linearly degenerate",
        },
        fmt(main.production)
    )];
    let mut slope = None;
    if let Some(s) = cli.sweep {
        let amps = s.values();
        for &eps in &amps {
            let r = shock::analyse(&idx, p_minus, p_minus + eps)?;
            pass &= row_ok(&r);
            rows.push(r);
        }
        if idx.eos().is_stiff() {
            summary.push("weak-shock exponent: undefined (linearly degenerate, production vanishes)".into());
        } else {
            match shock::weak_shock_exponent(&idx, p_minus, &amps) {
                Ok(k) => {
                    summary.push(format!("weak-shock exponent: {}", fmt(k)));
                    slope = Some(k);
                }
                Err(e) => {
                    let f = match e {
                        Error::Precondition(_) => usage(e),
                        other => runtime(other),
                    };
                    return Err(f);
                }
            }
        }
    }
    let mut checks = Vec::new();
    if let Some(count) = cli.points {
        checks = verify::shock_suite(&idx, (p_minus.min(p_plus) * 1e-2, p_minus.max(p_plus) * 1e2), count, cli.seed);
        pass &= checks.iter().all(|c| c.pass);
        summary.push(verify::format_checks(&checks).trim_end().to_string());
    }
    let mut csv = format!("{}\n", ShockRow::HEADER);
    for r in &rows {
        csv.push_str(&row_csv(r));
        csv.push('\n');
    }
    match dir {
        Some(d) => {
            d.write("shocks.csv", &csv)?;
            d.write_json(
                "shock_summary.json",
                &serde_json::json!({ "rows": rows, "weak_shock_exponent": slope, "checks": checks, "pass": pass }),
            )?;
        }
        None => write!(out, "{csv}").map_err(|e| runtime(Error::Io(e.to_string())))?,
    }
    for line in summary {
        w(out, line)?;
    }
    Ok(pass)
}

fn cmd_simulate(cli: &Cli, kv: &KeyValues, out: &mut dyn Write, dir: Option<&mut OutputDir>) -> Result<bool, Failure> {
    let mut cfg = config::sim_config(kv).map_err(usage)?;
    if let Some(n) = cli.points {
        cfg.n = n;
        cfg.validate().map_err(usage)?;
    }
    cfg.initial_state().map_err(usage)?;
    let res = fvsim::run(&cfg)?;
    let verdict = fvsim::nu_verdict(&res);
    let pass = verdict.kind != NuBehaviour::Decreasing && verdict.e_drift < 1e-10 && verdict.s_drift < 1e-10;
    if let Some(d) = dir {
        let mut snaps = String::from("t,x,p,v,e,s,nu\n");
        for s in &res.snapshots {
            for i in 0..s.x.len() {
                snaps.push_str(&report::csv_row(&[s.t, s.x[i], s.p[i], s.v[i], s.e[i], s.s[i], s.nu[i]]));
                snaps.push('\n');
            }
        }
        d.write("snapshots.csv", &snaps)?;
        let mut diag = String::from("step,t,e_tot,s_tot,nu_tot,e_out,s_out,nu_out,nu_balance,max_dvdx\n");
        for r in &res.diagnostics {
            diag.push_str(&format!(
                "{},{}\n",
                r.step,
                report::csv_row(&[r.t, r.e_tot, r.s_tot, r.nu_tot, r.e_out, r.s_out, r.nu_out, r.nu_balance(), r.max_dvdx])
            ));
        }
        d.write("diagnostics.csv", &diag)?;
        d.write_json(
            "summary.json",
            &serde_json::json!({
                "config": cfg,
                "steps": res.diagnostics.len() - 1,
                "shock_time": res.shock_time,
                "max_signal_speed": res.max_signal_speed,
                "verdict": verdict,
                "pass": pass,
            }),
        )?;
    }
    w(
        out,
        format!(
            "simulate {} n={} steps={} shock_time={} E drift {} S drift {}",
            cfg.eos.label,
            cfg.n,
            res.diagnostics.len() - 1,
            res.shock_time.map(fmt).unwrap_or_else(|| "none".into()),
            fmt(verdict.e_drift),
            fmt(verdict.s_drift)
        ),
    )?;
    w(out, format!("N_nu: {verdict}"))?;
    Ok(pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut o = Vec::new();
        let mut e = Vec::new();
        let argv = std::iter::once("relgodunov").chain(args.iter().copied()).map(OsString::from);
        let code = main_with(argv, &mut o, &mut e);
        (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
    }

    #[test]
    fn sweep_parsing() {
        assert_eq!("1e-3:0.1:5".parse::<Sweep>().unwrap(), Sweep { lo: 1e-3, hi: 0.1, n: 5 });
        for bad in ["1:2", "0:1:3", "2:1:3", "1:2:1", "a:2:3"] {
            assert!(bad.parse::<Sweep>().is_err(), "{bad}");
        }
    }

    #[test]
    fn usage_errors_are_single_lines() {
        let (code, _, err) = call(&["frobnicate"]);
        assert_eq!(code, EXIT_USAGE);
        assert_eq!(err.lines().count(), 1, "{err}");
        assert!(err.starts_with("error kind=usage reason="));
        let (code, _, err) = call(&["shock", "--sweep", "1:2"]);
        assert_eq!(code, EXIT_USAGE);
        assert_eq!(err.lines().count(), 1);
    }

    #[test]
    fn index_table_stdout() {
        let (code, out, _) = call(&["index-table", "--points", "5"]);
        assert_eq!(code, EXIT_PASS);
        assert!(out.starts_with("p,f,nu,xhat,ode_residual\n"));
        assert_eq!(out.lines().filter(|l| l.contains("e")).count(), 7);
    }
}
