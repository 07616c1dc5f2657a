//! Text and CSV views of a report. Text uses six significant digits; CSV
//! keeps full precision.

use std::fmt::Write as _;

use delay_margin::dde::Trajectory;
use delay_margin::sweep::{Crossing, DelayMargin, Direction, StableWindow, SweepConfig};

use crate::report::{
    BaselineBody, MarginBody, MemBody, ReportBody, SimulateBody, SystemFingerprint, ValidateBody,
};

/// `%g`-style formatting with six significant digits.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let fixed = format!("{x:.*}", (5 - exp).max(0) as usize);
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Decimal units: `51200000000` is `51.2 GB`.
pub fn human_bytes(bytes: u64) -> String {
    const UNITS: [&str; 7] = ["B", "kB", "MB", "GB", "TB", "PB", "EB"];
    let mut value = bytes as f64;
    let mut unit = 0;
    while value >= 1000.0 && unit + 1 < UNITS.len() {
        value /= 1000.0;
        unit += 1;
    }
    format!("{} {}", sig6(value), UNITS[unit])
}

fn direction_label(d: Direction) -> &'static str {
    match d {
        Direction::Destabilizing => "destabilizing",
        Direction::Stabilizing => "stabilizing",
        Direction::Inconclusive => "inconclusive",
    }
}

pub fn text(body: &ReportBody) -> String {
    let mut out = String::new();
    match body {
        ReportBody::Margin(b) => margin_text(&mut out, b),
        ReportBody::Crossings(b) => {
            system_text(&mut out, &b.system);
            config_text(&mut out, &b.config);
            crossings_text(&mut out, &b.crossings);
        }
        ReportBody::Baseline(b) => baseline_text(&mut out, b),
        ReportBody::Simulate(b) => simulate_text(&mut out, b),
        ReportBody::MemEstimate(b) => mem_text(&mut out, b),
        ReportBody::Validate(b) => validate_text(&mut out, b),
    }
    out
}

fn system_text(out: &mut String, s: &SystemFingerprint) {
    let _ = writeln!(
        out,
        "system: n = {}, |A0| = {}, |A1| = {}",
        s.n,
        sig6(s.a0_norm),
        sig6(s.a1_norm)
    );
}

fn config_text(out: &mut String, c: &SweepConfig) {
    let _ = writeln!(
        out,
        "sweep: T in [{}, {}] step {}, eps_imag {}, workers {}",
        sig6(c.t_min),
        sig6(c.t_max),
        sig6(c.t_step),
        sig6(c.eps_imag),
        c.workers
    );
}

fn crossings_text(out: &mut String, crossings: &[Crossing]) {
    if crossings.is_empty() {
        let _ = writeln!(out, "no crossings");
        return;
    }
    let _ = writeln!(
        out,
        "{:>12} {:>12} {:>14} {:>12} {:>12}",
        "T", "omega", "direction", "tau0", "tau1"
    );
    for c in crossings {
        let tau1 = c.taus.get(1).map_or_else(|| "-".into(), |t| sig6(*t));
        let _ = writeln!(
            out,
            "{:>12} {:>12} {:>14} {:>12} {:>12}",
            sig6(c.t_c),
            sig6(c.omega_c),
            direction_label(c.direction),
            sig6(c.tau0()),
            tau1
        );
    }
}

fn window_text(w: &StableWindow) -> String {
    match w.hi {
        Some(hi) => format!("[{}, {})", sig6(w.lo), sig6(hi)),
        None => format!("[{}, ...)", sig6(w.lo)),
    }
}

fn margin_text(out: &mut String, b: &MarginBody) {
    system_text(out, &b.system);
    config_text(out, &b.config);
    crossings_text(out, &b.crossings);
    match b.delay_margin {
        DelayMargin::Finite(m) => {
            let _ = writeln!(out, "delay margin: {}", sig6(m));
        }
        DelayMargin::Unbounded => {
            let _ = writeln!(out, "delay margin: unbounded");
        }
    }
    let windows: Vec<String> = b.windows.iter().map(window_text).collect();
    let _ = writeln!(out, "stable windows: {}", windows.join(" "));
    if let Some(h) = b.walk_horizon {
        let _ = writeln!(out, "walk horizon: {}", sig6(h));
    }
}

fn baseline_text(out: &mut String, b: &BaselineBody) {
    system_text(out, &b.system);
    let _ = writeln!(out, "companion size: {}", human_bytes(b.companion_bytes));
    if b.delays.is_empty() {
        let _ = writeln!(out, "no crossings");
    } else {
        let _ = writeln!(out, "{:>12} {:>12} {:>12}", "omega", "tau0", "tau1");
        for d in &b.delays {
            let tau1 = d.taus.get(1).map_or_else(|| "-".into(), |t| sig6(*t));
            let _ = writeln!(out, "{:>12} {:>12} {:>12}", sig6(d.omega), sig6(d.taus[0]), tau1);
        }
    }
    if !b.spurious_omegas.is_empty() {
        let list: Vec<String> = b.spurious_omegas.iter().map(|w| sig6(*w)).collect();
        let _ = writeln!(out, "spurious frequencies: {}", list.join(" "));
    }
}

fn simulate_text(out: &mut String, b: &SimulateBody) {
    system_text(out, &b.system);
    let _ = writeln!(
        out,
        "tau {}, horizon {}, dt {}, {} samples{}",
        sig6(b.config.tau),
        sig6(b.config.horizon),
        sig6(b.config.dt),
        b.samples,
        if b.diverged { ", diverged" } else { "" }
    );
    let state: Vec<String> = b.final_state.iter().map(|v| sig6(*v)).collect();
    let _ = writeln!(out, "x({}) = [{}]", sig6(b.final_time), state.join(", "));
    let _ = writeln!(out, "verdict: {:?}", b.verdict);
}

fn mem_text(out: &mut String, b: &MemBody) {
    if let [row] = b.rows.as_slice() {
        let _ = writeln!(out, "{}", human_bytes(row.bytes));
        return;
    }
    for row in &b.rows {
        let _ = writeln!(out, "{:>6} {:>12}", row.n, human_bytes(row.bytes));
    }
}

fn validate_text(out: &mut String, b: &ValidateBody) {
    margin_text(out, &b.margin);
    if let Some(h) = b.horizon {
        let _ = writeln!(out, "simulation horizon: {}", sig6(h));
    }
    for c in &b.checks {
        let _ = writeln!(
            out,
            "tau {}: expected {:?}, observed {:?} -> {}",
            sig6(c.tau),
            c.expected,
            c.observed,
            if c.passed() { "ok" } else { "MISMATCH" }
        );
    }
    let _ = writeln!(out, "validation {}", if b.passed { "passed" } else { "failed" });
}

pub fn csv(body: &ReportBody) -> csv::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    match body {
        ReportBody::Margin(MarginBody { crossings, .. }) | ReportBody::Crossings(crate::report::CrossingsBody { crossings, .. }) => {
            crossings_csv(&mut w, crossings)?
        }
        ReportBody::Validate(b) => crossings_csv(&mut w, &b.margin.crossings)?,
        ReportBody::Baseline(b) => {
            let depth = b.delays.iter().map(|d| d.taus.len()).max().unwrap_or(0);
            let mut header = vec!["omega".to_string()];
            header.extend((0..depth).map(|k| format!("tau_{k}")));
            w.write_record(&header)?;
            for d in &b.delays {
                let mut row = vec![d.omega.to_string()];
                row.extend(d.taus.iter().map(f64::to_string));
                w.write_record(&row)?;
            }
        }
        ReportBody::Simulate(b) => {
            // Final sample only; the command writes the whole trajectory.
            let mut header = vec!["t".to_string()];
            header.extend((1..=b.final_state.len()).map(|i| format!("x{i}")));
            w.write_record(&header)?;
            let mut row = vec![b.final_time.to_string()];
            row.extend(b.final_state.iter().map(f64::to_string));
            w.write_record(&row)?;
        }
        ReportBody::MemEstimate(b) => {
            w.write_record(["n", "bytes"])?;
            for row in &b.rows {
                w.write_record([row.n.to_string(), row.bytes.to_string()])?;
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn crossings_csv<W: std::io::Write>(w: &mut csv::Writer<W>, crossings: &[Crossing]) -> csv::Result<()> {
    let depth = crossings.iter().map(|c| c.taus.len()).max().unwrap_or(0);
    let mut header: Vec<String> = ["t_c", "omega_c", "direction"].map(String::from).to_vec();
    header.extend((0..depth).map(|k| format!("tau_{k}")));
    w.write_record(&header)?;
    for c in crossings {
        let mut row = vec![
            c.t_c.to_string(),
            c.omega_c.to_string(),
            direction_label(c.direction).to_string(),
        ];
        row.extend(c.taus.iter().map(f64::to_string));
        w.write_record(&row)?;
    }
    Ok(())
}

/// `t,x1,...,xn` rows of a trajectory.
pub fn trajectory_csv(traj: &Trajectory) -> std::io::Result<String> {
    let mut buf = Vec::new();
    traj.write_csv(&mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(0.16234567), "0.162346");
        assert_eq!(sig6(15.5032159), "15.5032");
        assert_eq!(sig6(-0.4269552), "-0.426955");
        assert_eq!(sig6(1000.0), "1000");
        assert_eq!(sig6(999999.7), "1e6");
        assert_eq!(sig6(1.5e-7), "1.5e-7");
        assert_eq!(sig6(8.720251e-5), "8.72025e-5");
        assert_eq!(sig6(0.00012), "0.00012");
        assert_eq!(sig6(123456789.0), "1.23457e8");
        assert_eq!(sig6(0.0), "0");
    }

    #[test]
    fn byte_units() {
        assert_eq!(human_bytes(51_200_000_000), "51.2 GB");
        assert_eq!(human_bytes(999), "999 B");
        assert_eq!(human_bytes(1_000), "1 kB");
        assert_eq!(human_bytes(1_073_741_824_000), "1.07374 TB");
    }
}
