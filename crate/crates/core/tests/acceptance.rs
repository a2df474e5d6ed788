//! Acceptance gate: ten criteria at their stated tolerances, one line each.
//!
//! Runs without the libtest harness so the lines always print; exits 1 when
//! any criterion fails. Set `ACCEPTANCE_VERBOSE=1` to list every check.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relgodunov::eos::{BarotropicEos, IdealGasEos, IsentropicEos, Thermo};
use relgodunov::fvsim::{self, SimConfig};
use relgodunov::index::{self, IndexFunction, IndexMode};
use relgodunov::numerics::log_space;
use relgodunov::shock;
use relgodunov::verify::{self, Check};
use relgodunov::Result;

const SEED: u64 = 20240601;

struct Outcome {
    pass: bool,
    detail: String,
    all: String,
}

fn from_checks(checks: &[Check]) -> Outcome {
    let failed: Vec<&Check> = checks.iter().filter(|c| !c.pass).collect();
    let detail = if failed.is_empty() {
        let worst = checks
            .iter()
            .filter(|c| c.bound == verify::Bound::Below && c.tolerance > 0.0)
            .map(|c| (c.value / c.tolerance, c))
            .fold(None, |m: Option<(f64, &Check)>, x| if m.is_none_or(|m| x.0 > m.0) { Some(x) } else { m });
        match worst {
            Some((_, c)) => format!("{} checks; tightest: {} = {:.3e} < {:.0e}", checks.len(), c.name, c.value, c.tolerance),
            None => format!("{} checks", checks.len()),
        }
    } else {
        verify::format_checks(&failed.into_iter().cloned().collect::<Vec<_>>())
            .lines()
            .collect::<Vec<_>>()
            .join(" | ")
    };
    Outcome {
        pass: checks.iter().all(|c| c.pass),
        detail,
        all: verify::format_checks(checks),
    }
}

fn g(gamma: f64) -> Result<IndexFunction> {
    IndexFunction::new(BarotropicEos::gamma_law(gamma)?, 1.0)
}

fn polytrope() -> Result<IndexFunction> {
    IndexFunction::new(BarotropicEos::polytrope(1.0, 1.0, 5.0 / 3.0)?, 1.0)
}

fn gases() -> Result<Vec<IdealGasEos>> {
    Ok(vec![
        IdealGasEos::new(1.0, 1.0, 1.0, 5.0 / 3.0)?,
        IdealGasEos::new(0.0, 1.0, 1.5, 4.0 / 3.0)?,
    ])
}

/// Criteria 1 and 2 share one sweep.
fn symmetrizer_sweeps() -> Result<Vec<(String, verify::SymmetrizerSweep)>> {
    let mut out = Vec::new();
    for (name, idx) in [("4-field gamma=4/3", g(4.0 / 3.0)?), ("4-field polytrope", polytrope()?)] {
        out.push((name.to_string(), verify::symmetrizer4_sweep(&idx, (1e-2, 1e2), 200, 50, SEED)));
    }
    for gas in gases()? {
        out.push((format!("5-field {}", gas.label()), verify::symmetrizer5_sweep(&gas, 200, 50, SEED)));
    }
    Ok(out)
}

fn criterion1(sweeps: &[(String, verify::SymmetrizerSweep)]) -> Outcome {
    let mut checks = Vec::new();
    for (name, s) in sweeps {
        let c = s.checks(name, SEED);
        checks.push(c[0].clone());
        checks.push(c[1].clone());
        checks.push(Check::above(format!("{name}: evaluated"), s.evaluated as f64, 9999.5, "200 x 50"));
    }
    from_checks(&checks)
}

fn criterion2(sweeps: &[(String, verify::SymmetrizerSweep)]) -> Outcome {
    let mut checks = Vec::new();
    for (name, s) in sweeps {
        let c = s.checks(name, SEED);
        checks.push(c[2].clone());
        checks.push(c[3].clone());
        // both orientations must actually occur for the per-orientation claim
        checks.push(Check::above(
            format!("{name}: orientations seen"),
            (!s.future_signs.is_empty() as u8 + !s.past_signs.is_empty() as u8) as f64,
            1.5,
            format!("future {:?}, past {:?}", s.future_signs, s.past_signs),
        ));
    }
    from_checks(&checks)
}

fn criterion3() -> Result<Outcome> {
    let mut checks = Vec::new();
    for idx in [g(4.0 / 3.0)?, g(1.1)?, g(2.0)?, polytrope()?] {
        let label = idx.eos().label.clone();
        for mut c in verify::four_field_identities(&idx, (1e-2, 1e2), 100, SEED) {
            c.name = format!("{label}: {}", c.name);
            checks.push(c);
        }
    }
    Ok(from_checks(&checks))
}

fn criterion4() -> Result<Outcome> {
    let mut checks = Vec::new();
    let grid = log_space(1e-3, 1e3, 201);
    for gamma in [4.0 / 3.0, 1.5, 2.0] {
        let eos = BarotropicEos::gamma_law(gamma)?;
        checks.extend(verify::index_suite(&eos, 1.0, 1e-3, 1e3, 201));
        let q = IndexFunction::with_mode(eos, 1.0, 1.0, IndexMode::Quadrature)?;
        let mut ode: f64 = 0.0;
        let mut nfp: f64 = 0.0;
        for &p in &grid {
            ode = ode.max(q.ode_residual(p)?);
            nfp = nfp.max(q.nu_fprime_residual(p)?);
        }
        checks.push(Check::below(format!("gamma={gamma} quadrature ODE residual"), ode, 1e-8, ""));
        checks.push(Check::below(format!("gamma={gamma} quadrature nu f' = 1"), nfp, 1e-8, ""));
    }
    Ok(from_checks(&checks))
}

fn criterion5() -> Result<Outcome> {
    let mut checks = Vec::new();
    for gamma in [1.2, 4.0 / 3.0, 1.5, 5.0 / 3.0, 2.0] {
        checks.extend(verify::isentropic_suite(&IsentropicEos::massless_gamma(gamma)?, 0.1, 10.0, 41));
    }
    // stiff self-duality: rho(n) = n^2 / 2 and pi(h) = h^2 / 2 with h = n
    let stiff = IsentropicEos::stiff();
    let idx = IndexFunction::enthalpy_calibrated(&stiff, 1.0, IndexMode::Quadrature)?;
    let (mut rho_err, mut pi_err): (f64, f64) = (0.0, 0.0);
    for n in log_space(0.1, 10.0, 41) {
        let s = stiff.props(n)?;
        rho_err = rho_err.max((s.rho - n * n / 2.0).abs() / (n * n / 2.0));
        pi_err = pi_err.max((idx.pi_of_f(s.h)? - s.h * s.h / 2.0).abs() / (s.h * s.h / 2.0));
    }
    checks.push(Check::below("stiff rho(n) = n^2/2", rho_err, 1e-10, ""));
    checks.push(Check::below("stiff pi(h) = h^2/2 (quadrature)", pi_err, 1e-10, ""));
    Ok(from_checks(&checks))
}

fn criterion6() -> Result<Outcome> {
    let mut checks = Vec::new();
    for iso in [
        IsentropicEos::massless_gamma(4.0 / 3.0)?,
        IsentropicEos::stiff(),
        IsentropicEos::polytrope(1.0, 1.0, 5.0 / 3.0)?,
    ] {
        let idx = IndexFunction::enthalpy_calibrated(&iso, 1.0, IndexMode::Quadrature)?;
        let mut worst: f64 = 0.0;
        for n in log_space(0.1, 10.0, 101) {
            worst = worst.max(index::nu_equals_n_residual(&iso, &idx, n)?);
        }
        checks.push(Check::below(format!("{}: |nu/n - 1|", iso.label), worst, 1e-9, "101 n in [0.1, 10]"));
    }
    Ok(from_checks(&checks))
}

fn criterion7() -> Outcome {
    let mut checks = verify::product_form_suite(4.0 / 3.0, 1.0, 1.0);
    checks.extend(verify::product_form_suite(5.0 / 3.0, 0.5, 1.5));
    from_checks(&checks)
}

fn criterion8() -> Result<Outcome> {
    let mut checks = Vec::new();
    for gas in gases()? {
        let label = gas.label();
        for mut c in verify::ideal_gas_identities(&gas, 100, SEED) {
            c.name = format!("{label}: {}", c.name);
            checks.push(c);
        }
    }
    Ok(from_checks(&checks))
}

fn criterion9() -> Result<Outcome> {
    let mut checks = Vec::new();
    let sweep = shock::production_sweep(SEED, 500)?;
    checks.push(Check::below(
        "counterexamples among 500 admissible GNL shocks",
        sweep.counterexamples.len() as f64,
        0.5,
        format!("min production {:.3e}", sweep.min_admissible_production),
    ));
    checks.push(Check::above("admissible shocks examined", sweep.admissible as f64, 499.5, ""));
    checks.push(Check::below("jump residuals", sweep.max_residual, 1e-10, ""));

    let slope = shock::weak_shock_exponent(&g(4.0 / 3.0)?, 1.0, &log_space(1e-3, 1e-1, 9))?;
    checks.push(Check::below("weak-shock slope - 3.2", slope - 3.2, 0.0, format!("slope {slope:.4}")));
    checks.push(Check::above("weak-shock slope - 2.8", slope - 2.8, 0.0, format!("slope {slope:.4}")));

    let stiff = IndexFunction::new(BarotropicEos::stiff(), 1.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let a = rng.random_range(-2.0f64..2.0).exp();
        let b = rng.random_range(-2.0f64..2.0).exp();
        let sol = shock::rh_solve_barotropic(stiff.eos(), a, b)?;
        worst = worst.max(shock::nu_production(&stiff, &sol)?.abs());
    }
    checks.push(Check::below("stiff |production|", worst, 1e-12, "500 random pressure pairs in [e^-2, e^2]"));

    let mut min_jump = f64::INFINITY;
    let mut solved = 0usize;
    for _ in 0..500 {
        let gamma = rng.random_range(1.05..2.0);
        let m = if rng.random::<bool>() { 0.0 } else { rng.random_range(0.1..3.0) };
        let gas = IdealGasEos::new(m, rng.random_range(0.5..2.0), rng.random_range(0.5..3.0), gamma)?;
        let n = rng.random_range(-1.5f64..1.5).exp();
        let sigma = rng.random_range(-1.0..1.0);
        let cs = gas.sound_speed2(&gas.thermo_props(n, sigma)?).sqrt();
        let v = cs + (1.0 - cs) * rng.random_range(0.02..0.98);
        let sol = shock::rh_solve_ideal(&gas, n, sigma, v)?;
        min_jump = min_jump.min(sol.sigma_plus.unwrap() - sigma);
        solved += 1;
    }
    checks.push(Check::above(
        "ideal-gas min(sigma_+ - sigma_-)",
        min_jump,
        0.0,
        format!("{solved} random compressive shocks"),
    ));
    Ok(from_checks(&checks))
}

fn nu_drift(cfg: &SimConfig, n: usize) -> Result<f64> {
    let mut c = cfg.clone();
    c.n = n;
    let out = fvsim::run(&c)?;
    Ok(fvsim::nu_verdict(&out).relative_change.abs())
}

fn criterion10() -> Result<Outcome> {
    let mut checks = Vec::new();

    // conservation on periodic grids, normalised to 1000 steps
    for (name, mut cfg) in [
        ("smooth", SimConfig::preset("smooth")?),
        ("steepening", SimConfig::preset("steepening")?),
    ] {
        cfg.t_end = cfg.t_end.max(2.0);
        let out = fvsim::run(&cfg)?;
        let steps = out.diagnostics.len() - 1;
        let v = fvsim::nu_verdict(&out);
        let scale = (steps as f64 / 1000.0).max(1.0);
        checks.push(Check::below(format!("{name}: E drift per 1000 steps"), v.e_drift / scale, 1e-12, format!("{steps} steps")));
        checks.push(Check::below(format!("{name}: S drift per 1000 steps"), v.s_drift / scale, 1e-12, format!("{steps} steps")));
    }

    // N_nu drift converges at the scheme order
    let smooth = SimConfig::preset("smooth")?;
    let ns = [200, 400, 800, 1600];
    let drifts: Vec<f64> = ns.iter().map(|&n| nu_drift(&smooth, n)).collect::<Result<_>>()?;
    let orders: Vec<f64> = drifts.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let drift_order = orders.last().copied().unwrap();
    let scheme_order = fvsim::self_convergence(&smooth, 400)?;
    checks.push(Check::below(
        "|N_nu drift order - scheme order|",
        (drift_order - scheme_order).abs(),
        0.3,
        format!(
            "drifts {}, orders {orders:.3?}, scheme {scheme_order:.3}",
            drifts.iter().map(|d| format!("{d:.2e}")).collect::<Vec<_>>().join(" ")
        ),
    ));
    checks.push(Check::below(
        "N_nu drift decreases with resolution",
        drifts.windows(2).filter(|w| !(w[1] < w[0])).count() as f64,
        0.5,
        "",
    ));

    // monotone after shock formation
    for name in ["steepening", "shock-tube", "rh-shock", "stiff-shock"] {
        for n in [400, 800] {
            let mut cfg = SimConfig::preset(name)?;
            cfg.n = n;
            let out = fvsim::run(&cfg)?;
            let v = fvsim::nu_verdict(&out);
            checks.push(Check::above(
                format!("{name} N={n}: worst N_nu step after shock"),
                v.worst_step,
                -1e-12,
                format!("shock at {:?}, {v}", out.shock_time),
            ));
            if name == "steepening" {
                checks.push(Check::above(format!("{name} N={n}: shock detected"), out.shock_time.is_some() as u8 as f64, 0.5, ""));
            }
        }
    }

    // shock speed at N = 1600
    let mut cfg = SimConfig::preset("rh-shock")?;
    cfg.n = 1600;
    cfg.snapshots = 5;
    let (p_m, p_p) = match cfg.profile {
        fvsim::Profile::RhShock { p_minus, p_plus, .. } => (p_minus, p_plus),
        _ => unreachable!(),
    };
    let (_, exact) = fvsim::rh_shock_states(&cfg.eos, p_m, p_p)?;
    let out = fvsim::run(&cfg)?;
    let level = 0.5 * (p_m + p_p);
    let (a, b) = (&out.snapshots[1], out.snapshots.last().unwrap());
    let speed = match (fvsim::front_position(a, level), fvsim::front_position(b, level)) {
        (Some(xa), Some(xb)) => (xb - xa) / (b.t - a.t),
        _ => f64::NAN,
    };
    checks.push(Check::below(
        "N=1600 shock speed relative error",
        (speed - exact).abs() / exact,
        0.02,
        format!("measured {speed:.5}, exact {exact:.5}"),
    ));
    Ok(from_checks(&checks))
}

fn report(n: usize, title: &str, start: Instant, r: Result<Outcome>) -> bool {
    let secs = start.elapsed().as_secs_f64();
    match r {
        Ok(o) => {
            println!("{} criterion {n:>2} {title} [{secs:.1}s]: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
            if std::env::var_os("ACCEPTANCE_VERBOSE").is_some() {
                for line in o.all.lines() {
                    println!("    {line}");
                }
            }
            o.pass
        }
        Err(e) => {
            println!("FAIL criterion {n:>2} {title} [{secs:.1}s]: error {}: {e}", e.kind());
            false
        }
    }
}

fn main() {
    let mut ok = true;
    let t = Instant::now();
    let sweeps = symmetrizer_sweeps();
    let (s1, s2) = match &sweeps {
        Ok(s) => (Ok(criterion1(s)), Ok(criterion2(s))),
        Err(e) => (Err(e.clone()), Err(e.clone())),
    };
    ok &= report(1, "symmetrizer symmetry", t, s1);
    ok &= report(2, "symmetrizer definiteness", t, s2);
    let t = Instant::now();
    ok &= report(3, "flux identity", t, criterion3());
    let t = Instant::now();
    ok &= report(4, "index machinery", t, criterion4());
    let t = Instant::now();
    ok &= report(5, "enthalpy and Legendre duality", t, criterion5());
    let t = Instant::now();
    ok &= report(6, "nu equals matter density", t, criterion6());
    let t = Instant::now();
    ok &= report(7, "product-form index", t, Ok(criterion7()));
    let t = Instant::now();
    ok &= report(8, "ideal-gas generating function", t, criterion8());
    let t = Instant::now();
    ok &= report(9, "shock production", t, criterion9());
    let t = Instant::now();
    ok &= report(10, "simulation", t, criterion10());
    println!("acceptance: {}", if ok { "PASS" } else { "FAIL" });
    if !ok {
        std::process::exit(1);
    }
}
