use std::f64::consts::PI;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use ati_core::kinematics::{derive_params, DerivedParams};
use ati_core::rates::{self, DirectGrid, Regime, SaddleInfo};
use ati_core::selftest::{run_selftest, SelftestOptions, SelftestReport};
use ati_core::spectra::{nonrel_n0, NonrelPolarization, SpectrumCalc, SpectrumPoint};
use ati_core::Error as CoreError;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::config::{natural_to_ev, Formula, NRange, Polarization, RunConfig};
use crate::error::CliError;

/// Upper bound on rows written by one `spectrum` run.
pub const MAX_ROWS: u64 = 20_000_000;
/// Channels evaluated per parallel batch; bounds memory, not output.
const BATCH: i64 = 64;
/// Channels covered by the automatic range when there is no interior peak.
const FALLBACK_CHANNELS: i64 = 32;

pub const SPECTRUM_HEADER: &str = "N,theta_rad,phi_rad,dwdo,kfr_only_dwdo,rescatter_factor,formula_tag";
pub const SWEEP_HEADER: &str =
    "xi,photon_energy_ev,n0,n_m,n_m_asymptotic,theta_m,delta_n,delta_theta,y_m,regime,w_closed";

/// Shortest round-trip decimal form.
pub fn fmt(x: f64) -> String {
    if x.is_finite() {
        ryu::Buffer::new().format_finite(x).to_string()
    } else {
        x.to_string()
    }
}

fn write_json(path: &Path, v: &Value) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

fn saddle_or_warn(
    cfg: &RunConfig,
    params: &DerivedParams,
    warnings: &mut Vec<String>,
) -> Result<Option<SaddleInfo>, CliError> {
    let p = cfg.physical()?;
    if p.field.xi == 0.0 {
        warnings.push("field off (xi = 0): every channel carries zero probability".into());
        return Ok(None);
    }
    if !params.born_valid {
        warnings.push(format!("Born condition violated: ratio {} exceeds the threshold", params.born_ratio));
    }
    match rates::saddle_point(&p.field, &p.atom) {
        Ok(s) => Ok(Some(s)),
        Err(e @ CoreError::DegenerateSaddle { .. }) => {
            warnings.push(format!("no interior peak: {e}"));
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

fn grid(points: usize, span: f64, closed: bool) -> Vec<f64> {
    if closed {
        (0..points).map(|i| span * i as f64 / (points - 1) as f64).collect()
    } else {
        (0..points).map(|i| span * i as f64 / points as f64).collect()
    }
}

fn csv_row(out: &mut impl Write, p: &SpectrumPoint) -> std::io::Result<()> {
    writeln!(
        out,
        "{},{},{},{},{},{},{}",
        p.n,
        fmt(p.theta),
        fmt(p.phi),
        fmt(p.dwdo),
        fmt(p.kfr_only_dwdo),
        fmt(p.rescatter_factor),
        p.formula_tag.number()
    )
}

pub fn spectrum(cfg: &RunConfig) -> Result<(), CliError> {
    let phys = cfg.physical()?;
    let calc = SpectrumCalc::new(&phys.field, &phys.atom)?;
    let params = *calc.params();
    let mut warnings = Vec::new();
    let saddle = saddle_or_warn(cfg, &params, &mut warnings)?;
    let rel = cfg.formula != Formula::Nonrelativistic;
    let nonrel = match (cfg.formula, cfg.polarization) {
        (Formula::Relativistic, _) => None,
        (_, Polarization::Circular) => Some(NonrelPolarization::Circular),
        (_, _) => Some(NonrelPolarization::Linear),
    };

    let (lo, hi) = match cfg.n_range {
        NRange::Explicit([a, b]) => (a, b),
        NRange::Auto(_) => {
            let mut lo = if rel { params.n0 } else { i64::MAX };
            if nonrel.is_some() {
                lo = lo.min(nonrel_n0(&phys.field, &phys.atom));
            }
            let hi = match saddle {
                Some(s) => ((s.n_m + 6.0 * s.delta_n).floor() as i64).max(lo),
                None => lo + FALLBACK_CHANNELS - 1,
            };
            (lo, hi)
        }
    };
    let thetas = grid(cfg.theta_points, PI, true);
    let phis = grid(cfg.phi_points, 2.0 * PI, false);
    let per_channel = (rel as u64 * phis.len() as u64 + nonrel.is_some() as u64) * thetas.len() as u64;
    let rows = (hi - lo + 1) as u64 * per_channel;
    if rows > MAX_ROWS {
        return Err(CliError::Resource(format!("{rows} rows requested for channels [{lo}, {hi}], cap is {MAX_ROWS}")));
    }

    fs::create_dir_all(&cfg.output_path)?;
    let mut out = BufWriter::new(File::create(cfg.output_path.join("spectrum.csv"))?);
    writeln!(out, "{SPECTRUM_HEADER}")?;
    let mode = cfg.mode.into();
    let mut start = lo;
    while start <= hi {
        let end = (start + BATCH - 1).min(hi);
        let batch: Vec<Vec<SpectrumPoint>> = (start..=end)
            .into_par_iter()
            .map(|n| {
                let mut pts = Vec::with_capacity(per_channel as usize);
                if rel {
                    for &t in &thetas {
                        for &f in &phis {
                            pts.push(calc.relativistic(n, t, f, mode)?);
                        }
                    }
                }
                if let Some(pol) = nonrel {
                    for &t in &thetas {
                        pts.push(calc.nonrel(n, t, pol, mode)?);
                    }
                }
                Ok(pts)
            })
            .collect::<ati_core::Result<_>>()?;
        for p in batch.iter().flatten() {
            csv_row(&mut out, p)?;
        }
        start = end + 1;
    }
    out.flush()?;

    let summary = json!({
        "config": cfg,
        "field": phys.field,
        "atom": phys.atom,
        "params": params,
        "saddle": saddle,
        "born_valid": params.born_valid,
        "field_off": phys.field.xi == 0.0,
        "n_range": [lo, hi],
        "rows": rows,
        "warnings": warnings,
    });
    write_json(&cfg.output_path.join("summary.json"), &summary)
}

pub fn rate(cfg: &RunConfig) -> Result<(), CliError> {
    let phys = cfg.physical()?;
    let (field, atom) = (phys.field, phys.atom);
    let params = derive_params(&field, &atom)?;
    let mut warnings = Vec::new();
    let saddle = saddle_or_warn(cfg, &params, &mut warnings)?;
    let grid = DirectGrid {
        theta_panels: cfg.theta_points.div_ceil(8),
        phi_panels: if cfg.phi_points > 1 { cfg.phi_points } else { DirectGrid::default().phi_panels },
        n_range: match cfg.n_range {
            NRange::Explicit([a, b]) => Some((a, b)),
            NRange::Auto(_) => None,
        },
        ..DirectGrid::default()
    };
    let mut methods = Map::new();
    let direct = rates::rate_direct(&field, &atom, &grid, cfg.mode.into())?;
    warnings.extend(direct.warnings.iter().cloned());
    methods.insert("direct".into(), serde_json::to_value(&direct)?);
    if let Some(s) = saddle {
        if field.is_circular() && s.n_m >= 50.0 {
            let airy = rates::rate_airy(&field, &atom)?;
            methods.insert("airy_numeric".into(), serde_json::to_value(&airy)?);
        }
        match s.regime {
            Regime::Intermediate => {
                warnings.push(format!("intermediate regime (y_m = {}): no closed form applies", s.y_m))
            }
            _ => {
                let closed = rates::rate_closed(&field, &atom, None)?;
                let key = serde_json::to_value(closed.method)?;
                methods.insert(key.as_str().unwrap_or("closed").to_string(), serde_json::to_value(&closed)?);
            }
        }
    }
    let report = json!({
        "config": cfg,
        "params": params,
        "saddle": saddle,
        "regime": saddle.map(|s| s.regime),
        "methods": methods,
        "warnings": warnings,
    });
    fs::create_dir_all(&cfg.output_path)?;
    write_json(&cfg.output_path.join("rate.json"), &report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepKey {
    Xi,
    PhotonEnergyEv,
}

pub fn sweep(cfg: &RunConfig, key: SweepKey, values: &[f64]) -> Result<(), CliError> {
    fs::create_dir_all(&cfg.output_path)?;
    let mut out = BufWriter::new(File::create(cfg.output_path.join("sweep.csv"))?);
    writeln!(out, "{SWEEP_HEADER}")?;
    for &v in values {
        let mut c = cfg.clone();
        match key {
            SweepKey::Xi => {
                c.intensity_xi = Some(v);
                c.peak_field_v_per_cm = None;
            }
            SweepKey::PhotonEnergyEv => c.photon_energy_ev = v,
        }
        c.validate()?;
        let phys = c.physical()?;
        let params = derive_params(&phys.field, &phys.atom)?;
        let s = rates::saddle_point(&phys.field, &phys.atom)?;
        let closed = match s.regime {
            Regime::Intermediate => String::new(),
            _ => fmt(rates::rate_closed(&phys.field, &phys.atom, None)?.w_total),
        };
        let regime = serde_json::to_value(s.regime)?;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            fmt(phys.field.xi),
            fmt(natural_to_ev(phys.field.omega)),
            params.n0,
            fmt(s.n_m),
            fmt(s.n_m_asymptotic),
            fmt(s.theta_m),
            fmt(s.delta_n),
            fmt(s.delta_theta),
            fmt(s.y_m),
            regime.as_str().unwrap_or_default(),
            closed
        )?;
    }
    out.flush()?;
    Ok(())
}

pub fn selftest(json_out: bool, inject: f64) -> SelftestReport {
    let report = run_selftest(&SelftestOptions { bessel_perturbation: inject });
    if json_out {
        println!("{}", serde_json::to_string_pretty(&report).unwrap_or_default());
    } else {
        println!("{:<32} {:<6} {:>12} {:>12} {:>9}", "check", "result", "worst", "tolerance", "seconds");
        for r in &report.records {
            println!(
                "{:<32} {:<6} {:>12.3e} {:>12.3e} {:>9.3}",
                r.name,
                if r.passed { "PASS" } else { "FAIL" },
                r.worst,
                r.tolerance,
                r.seconds
            );
        }
        println!("{} in {:.2} s", if report.passed { "all checks passed" } else { "SELFTEST FAILED" }, report.seconds);
    }
    report
}
