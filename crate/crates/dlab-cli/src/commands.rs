use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use dlab_core::checks::{run_check, CheckKind, CheckParams};
use dlab_core::embedding::{embedding_experiment, EmbeddingConfig};
use dlab_core::evolutions::{energy, gkdv_solve, gkdv_stable_dt, nls_solve, soliton_wave, SolveConfig};
use dlab_core::norms::NormSpec;
use dlab_core::profiles::{extract_profile, profile_decompose, DecomposeConfig, ExtractConfig};
use dlab_core::spectral_core::io::{
    decode_field, decode_grid_function, encode_grid_function, read_grid_function, write_field, write_grid_function,
    GF_MAGIC, STF_MAGIC,
};
use dlab_core::spectral_core::{GridFunction, Grid, Side, SpaceTimeField};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Common, EmbedOpts, Equation, InitialData, ProfileMode, ProfileOpts, SideArg, SolveOpts};
use crate::manifest::{CheckRow, Clock, RunManifest};
use crate::CliError;

type Result<T> = std::result::Result<T, CliError>;

/// Largest relative L² drift accepted for a soliton run.
const SOLITON_DRIFT: f64 = 1e-5;

/// Pretty JSON on stdout; a closed pipe (`| head`) is not an error.
fn print_json<T: Serialize>(v: &T) -> Result<()> {
    let mut out = std::io::stdout().lock();
    let r = serde_json::to_writer_pretty(&mut out, v).map_err(std::io::Error::from).and_then(|_| writeln!(out));
    match r {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn emit(m: &RunManifest) -> Result<()> {
    print_json(m)?;
    let failures = m.failures();
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(failures.join("\n")))
    }
}

fn write_csv<R: Serialize>(path: &Path, rows: &[R]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn config<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

#[derive(Serialize)]
struct FrameRow {
    t: f64,
    l2_norm: f64,
    l2_drift: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    energy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    shape_error: Option<f64>,
}

pub fn solve(eq: Equation, o: &SolveOpts) -> Result<()> {
    let clock = Clock::start(!o.no_timestamps);
    let u0 = match (&o.input, o.preset) {
        (Some(path), _) => read_grid_function(path)?,
        (None, InitialData::Gaussian) => {
            let a = o.amplitude;
            GridFunction::from_real_fn(Grid::centered(o.n, o.length)?, |x| a * (-x * x).exp())
        }
        (None, InitialData::Soliton) if eq == Equation::Nls => {
            return Err(CliError::Usage("the soliton preset is a gKdV traveling wave".into()))
        }
        (None, InitialData::Soliton) => soliton_wave(o.alpha, 1.0, 0.0, Grid::centered(o.n, o.length)?),
    };
    let soliton = o.input.is_none() && o.preset == InitialData::Soliton;
    let mu = o.mu.unwrap_or(if soliton { -1.0 } else { 1.0 });
    let grid = *u0.grid();
    let dt = match (o.dt, eq) {
        (Some(dt), _) => dt,
        (None, Equation::Gkdv) => (0.9 * gkdv_stable_dt(o.alpha, 1.0, u0.physical().sup_norm(), grid.xi_max())).min(1e-3),
        (None, Equation::Nls) => 1e-3,
    };
    let steps = (o.t_end.abs() / dt).ceil() as usize;
    let cfg = SolveConfig { store_every: (steps / o.frames.max(1)).max(1), ..SolveConfig::new(o.alpha, mu, o.t_end, dt) };
    let field = match eq {
        Equation::Gkdv => gkdv_solve(&u0, &cfg)?,
        Equation::Nls => nls_solve(&u0, &cfg)?,
    };
    write_field(&field, &o.out)?;

    let m0 = u0.l2_norm();
    let rows: Vec<FrameRow> = field
        .times()
        .iter()
        .zip(field.frames())
        .map(|(&t, f)| {
            let l2 = f.l2_norm();
            FrameRow {
                t,
                l2_norm: l2,
                l2_drift: if m0 > 0.0 { (l2 - m0).abs() / m0 } else { 0.0 },
                energy: (eq == Equation::Gkdv).then(|| energy(f, o.alpha, mu)),
                shape_error: soliton.then(|| {
                    let q = soliton_wave(o.alpha, 1.0, t, grid);
                    f.sub(&q).map(|d| d.l2_norm() / q.l2_norm()).unwrap_or(f64::NAN)
                }),
            }
        })
        .collect();
    if let Some(path) = &o.csv {
        write_csv(path, &rows)?;
    }
    let drift = rows.iter().map(|r| r.l2_drift).fold(0.0, f64::max);
    let mut checks = Vec::new();
    if soliton {
        checks.push(CheckRow::threshold("soliton_l2_drift", "max_l2_drift", drift, SOLITON_DRIFT));
    }
    let results = json!({
        "out": o.out,
        "grid": { "n": grid.n(), "length": grid.length(), "x0": grid.x0() },
        "mu": mu,
        "dt": cfg.steps().1.abs(),
        "steps": cfg.steps().0,
        "frames": field.len(),
        "max_l2_drift": drift,
        "max_shape_error": soliton.then(|| rows.iter().filter_map(|r| r.shape_error).fold(0.0, f64::max)),
        "diagnostics": rows,
    });
    let name = match eq {
        Equation::Gkdv => "solve gkdv",
        Equation::Nls => "solve nls",
    };
    emit(&clock.manifest(name, config(o)?, checks, results))
}

enum Loaded {
    Function(GridFunction),
    Field(SpaceTimeField),
}

fn load(path: &Path) -> Result<Loaded> {
    let buf = fs::read(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    if buf.starts_with(GF_MAGIC) {
        Ok(Loaded::Function(decode_grid_function(&buf)?))
    } else if buf.starts_with(STF_MAGIC) {
        Ok(Loaded::Field(decode_field(&buf)?))
    } else {
        Err(CliError::Usage(format!("{}: neither a GF01 nor an STF1 file", path.display())))
    }
}

/// `None` for `auto`, else `(j_min, j_max)`.
fn parse_window(text: &str) -> Result<Option<(i32, i32)>> {
    if text == "auto" {
        return Ok(None);
    }
    let bad = || CliError::Usage(format!("--window expects jmin:jmax or auto, got '{text}'"));
    let (a, b) = text.split_once(':').ok_or_else(bad)?;
    Ok(Some((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?)))
}

pub fn norm(spec_arg: &str, input: &Path, c: &Common) -> Result<()> {
    let clock = Clock::start(!c.no_timestamps);
    let text = if Path::new(spec_arg).is_file() { fs::read_to_string(spec_arg)? } else { spec_arg.to_string() };
    // flags fill keys the spec leaves out; `--window` replaces the spec's own
    let keys: Vec<String> = text
        .split(['\n', ',', ';'])
        .filter_map(|item| item.split_once('=').map(|(k, _)| k.trim().to_string()))
        .collect();
    let has = |k: &str| keys.iter().any(|x| x == k);
    let mut extra = Vec::new();
    for (k, v) in [("alpha", c.alpha), ("sigma", c.sigma)] {
        if let (false, Some(v)) = (has(k), v) {
            extra.push(format!("{k}={v}"));
        }
    }
    let window = c.window.as_deref().map(parse_window).transpose()?;
    let mut lines: Vec<String> = text
        .split(['\n', ',', ';'])
        .filter(|item| window.is_none() || !matches!(item.split_once('=').map(|(k, _)| k.trim()), Some("j_min" | "j_max")))
        .map(str::to_string)
        .collect();
    if let Some(Some((a, b))) = window {
        extra.push(format!("j_min={a}"));
        extra.push(format!("j_max={b}"));
    }
    lines.extend(extra);
    let spec = NormSpec::parse(&lines.join("\n"))?;
    let value = match load(input)? {
        Loaded::Function(f) => spec.eval_function(&f)?,
        Loaded::Field(f) => spec.eval_field(&f)?,
    };
    if let Some(path) = &c.csv {
        #[derive(Serialize)]
        struct Row<'a> {
            input: &'a Path,
            spec: String,
            value: f64,
        }
        write_csv(path, &[Row { input, spec: spec.to_text(), value }])?;
    }
    let results = json!({ "input": input, "spec": spec.to_text(), "value": value });
    emit(&clock.manifest("norm", json!({ "spec": spec, "input": input, "common": c }), vec![], results))
}

pub fn embed(o: &EmbedOpts) -> Result<()> {
    let clock = Clock::start(!o.no_timestamps);
    let g = Grid::centered(o.n, o.length)?;
    let phi = GridFunction::from_real_fn(g, |x| (-x * x).exp());
    let mut cfg = EmbeddingConfig::new(o.alpha, phi, o.xi.clone(), o.t_end);
    cfg.mu = o.mu;
    if let Some(dt) = o.dt {
        cfg.nls_dt = dt;
    }
    let rows = embedding_experiment(&cfg)?;
    if let Some(path) = &o.csv {
        #[derive(Serialize)]
        struct Row {
            xi: f64,
            seam_time: f64,
            err_lhat_alpha: f64,
            #[serde(rename = "norm_S")]
            norm_s: f64,
            #[serde(rename = "norm_L")]
            norm_l: f64,
            #[serde(rename = "residual_Y")]
            residual_y: f64,
        }
        let out: Vec<Row> = rows
            .iter()
            .map(|r| Row {
                xi: r.xi,
                seam_time: r.seam_time,
                err_lhat_alpha: r.err_lhat_alpha,
                norm_s: r.norm_s,
                norm_l: r.norm_l,
                residual_y: r.residual_y,
            })
            .collect();
        write_csv(path, &out)?;
    }
    emit(&clock.manifest("embed", config(o)?, vec![], json!({ "nls_dt": cfg.nls_dt, "rows": rows })))
}

/// A JSON array of paths, or an object with a `files` array; relative paths
/// are taken from the manifest's directory.
fn read_sequence(manifest: &Path) -> Result<(Vec<PathBuf>, Vec<GridFunction>)> {
    let text = fs::read_to_string(manifest).map_err(|e| CliError::Usage(format!("{}: {e}", manifest.display())))?;
    let v: Value = serde_json::from_str(&text)?;
    let list = match &v {
        Value::Array(a) => a,
        Value::Object(o) => o.get("files").and_then(Value::as_array).ok_or_else(|| CliError::Usage("manifest object needs a 'files' array".into()))?,
        _ => return Err(CliError::Usage("manifest must be an array of paths or {\"files\": [...]}".into())),
    };
    let base = manifest.parent().unwrap_or(Path::new("."));
    let mut paths = Vec::new();
    for item in list {
        let s = item.as_str().ok_or_else(|| CliError::Usage(format!("manifest entry {item} is not a path")))?;
        paths.push(base.join(s));
    }
    if paths.is_empty() {
        return Err(CliError::Usage("manifest lists no files".into()));
    }
    let fns = paths.iter().map(read_grid_function).collect::<dlab_core::Result<Vec<_>>>()?;
    Ok((paths, fns))
}

pub fn profiles(mode: ProfileMode, manifest: &Path, o: &ProfileOpts) -> Result<()> {
    let clock = Clock::start(!o.no_timestamps);
    let (paths, u) = read_sequence(manifest)?;
    let mut ecfg = ExtractConfig::new(o.alpha, o.sigma);
    ecfg.t_scan = o.t_scan;
    fs::create_dir_all(&o.out)?;
    let text = |g: &Option<dlab_core::deformations::Deformation>| g.map(|g| g.to_string());
    match mode {
        ProfileMode::Extract => {
            let e = extract_profile(&u, &ecfg)?;
            let psi_path = o.out.join("psi.gf");
            write_grid_function(&e.psi, &psi_path)?;
            let mut residuals = Vec::new();
            for (i, r) in e.residuals.iter().enumerate() {
                let p = o.out.join(format!("residual_{i}.gf"));
                write_grid_function(r, &p)?;
                residuals.push(p);
            }
            if let Some(path) = &o.csv {
                write_csv(path, &gamma_rows(&e.gammas))?;
            }
            let results = json!({
                "inputs": paths,
                "psi": psi_path,
                "residuals": residuals,
                "degenerate": e.is_degenerate(),
                "max_selector": e.max_selector(),
                "gammas": e.gammas,
                "gamma_text": e.gammas.iter().map(text).collect::<Vec<_>>(),
                "concentrations": e.concentrations,
                "averaged": e.averaged,
            });
            emit(&clock.manifest("profiles extract", config(o)?, vec![], results))
        }
        ProfileMode::Decompose => {
            let cfg = DecomposeConfig { extract: ecfg, j_max: o.j_max, eps_stop: o.eps_stop, ..DecomposeConfig::new(o.alpha, o.sigma) };
            let d = profile_decompose(&u, &cfg)?;
            let mut profiles = Vec::new();
            for (j, p) in d.profiles.iter().enumerate() {
                let path = o.out.join(format!("profile_{j}.gf"));
                write_grid_function(&p.psi, &path)?;
                profiles.push(json!({
                    "file": path,
                    "c": p.c,
                    "ell": p.ell,
                    "members": p.members,
                    "gammas": p.gammas,
                    "gamma_text": p.gammas.iter().map(text).collect::<Vec<_>>(),
                }));
            }
            let mut residuals = Vec::new();
            for (i, r) in d.residuals.iter().enumerate() {
                let p = o.out.join(format!("residual_{i}.gf"));
                write_grid_function(r, &p)?;
                residuals.push(p);
            }
            if let Some(path) = &o.csv {
                let rows: Vec<_> = d.profiles.iter().enumerate().flat_map(|(j, p)| {
                    gamma_rows(&p.gammas).into_iter().map(move |r| GammaRow { profile: Some(j), ..r })
                }).collect();
                write_csv(path, &rows)?;
            }
            let rebuilt = d.reconstruction_error(&u, o.alpha, ecfg.transfer_tol)?;
            let checks = vec![
                CheckRow::flag("ledger", d.ledger.holds, format!("{:?}", d.ledger)),
                CheckRow::threshold("reconstruction", "max_sup_error", rebuilt, 1e-10),
            ];
            let results = json!({
                "inputs": paths,
                "profiles": profiles,
                "residuals": residuals,
                "extractions": d.extractions,
                "selector_history": d.selector_history,
                "ledger": d.ledger,
                "gaps": d.gaps,
                "reconstruction_error": rebuilt,
            });
            emit(&clock.manifest("profiles decompose", config(o)?, checks, results))
        }
    }
}

#[derive(Serialize)]
struct GammaRow {
    #[serde(skip_serializing_if = "Option::is_none")]
    profile: Option<usize>,
    index: usize,
    active: bool,
    h: f64,
    xi: f64,
    s: f64,
    y: f64,
}

fn gamma_rows(gs: &[Option<dlab_core::deformations::Deformation>]) -> Vec<GammaRow> {
    gs.iter()
        .enumerate()
        .map(|(i, g)| match g {
            Some(g) => GammaRow { profile: None, index: i, active: true, h: g.h, xi: g.xi, s: g.s, y: g.y },
            None => GammaRow { profile: None, index: i, active: false, h: f64::NAN, xi: f64::NAN, s: f64::NAN, y: f64::NAN },
        })
        .collect()
}

#[derive(Serialize)]
struct MeasuredRow<'a> {
    check: &'a str,
    passed: bool,
    key: &'a str,
    value: f64,
}

pub fn verify(kinds: &[String], c: &Common) -> Result<()> {
    let clock = Clock::start(!c.no_timestamps);
    let mut selected = Vec::new();
    for k in kinds {
        if k == "all" {
            selected.extend(CheckKind::ALL);
        } else {
            selected.push(k.parse::<CheckKind>().map_err(|e| CliError::Usage(e.to_string()))?);
        }
    }
    if c.window.is_some() {
        log::warn!("--window is not used by the verification suites");
    }
    let params = CheckParams { alpha: c.alpha, sigma: c.sigma, xi: c.xi, t: c.t, seed: c.seed };
    let mut rows = Vec::new();
    for kind in selected {
        let report = run_check(kind, &params)?;
        eprintln!("{}", report.summary());
        rows.push(CheckRow::from(report));
    }
    if let Some(path) = &c.csv {
        let flat: Vec<MeasuredRow> = rows
            .iter()
            .flat_map(|r| r.measured.iter().map(move |(k, v)| MeasuredRow { check: &r.name, passed: r.passed, key: k, value: *v }))
            .collect();
        write_csv(path, &flat)?;
    }
    let passed = rows.iter().all(|r| r.passed);
    emit(&clock.manifest("verify", json!({ "kinds": kinds, "common": c }), rows, json!({ "passed": passed })))
}

pub fn gf_info(input: &Path) -> Result<()> {
    let info = match load(input)? {
        Loaded::Function(f) => {
            let g = f.grid();
            json!({
                "format": "GF01",
                "n": g.n(),
                "length": g.length(),
                "x0": g.x0(),
                "side": match f.side() { Side::Physical => "physical", Side::Fourier => "fourier" },
                "dx": g.dx(),
                "dxi": g.dxi(),
                "l2_norm": f.l2_norm(),
                "sup_norm": f.physical().sup_norm(),
            })
        }
        Loaded::Field(f) => {
            let g = f.grid();
            json!({
                "format": "STF1",
                "frames": f.len(),
                "n": g.n(),
                "length": g.length(),
                "x0": g.x0(),
                "t_first": f.times().first(),
                "t_last": f.times().last(),
            })
        }
    };
    print_json(&info)
}

#[derive(Serialize)]
struct SampleRow {
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    xi: Option<f64>,
    re: f64,
    im: f64,
}

fn samples(f: &GridFunction, side: SideArg, t: Option<f64>) -> Vec<SampleRow> {
    let g = *f.grid();
    match side {
        SideArg::Physical => f
            .physical()
            .values()
            .iter()
            .enumerate()
            .map(|(j, v)| SampleRow { t, x: Some(g.x(j)), xi: None, re: v.re, im: v.im })
            .collect(),
        SideArg::Fourier => {
            let hat = f.fourier();
            let n = g.n();
            // ascending frequency
            (0..n)
                .map(|i| {
                    let k = (i + n / 2) % n;
                    let v = hat.values()[k];
                    SampleRow { t, x: None, xi: Some(g.xi(k)), re: v.re, im: v.im }
                })
                .collect()
        }
    }
}

pub fn gf_convert(input: &Path, output: &Path, side: SideArg) -> Result<()> {
    let to_csv = output.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    match (load(input)?, to_csv) {
        (Loaded::Function(f), true) => write_csv(output, &samples(&f, side, None))?,
        (Loaded::Function(f), false) => {
            let target = match side {
                SideArg::Physical => Side::Physical,
                SideArg::Fourier => Side::Fourier,
            };
            fs::write(output, encode_grid_function(&f.on_side(target))?)?;
        }
        (Loaded::Field(f), true) => {
            let rows: Vec<SampleRow> =
                f.times().iter().zip(f.frames()).flat_map(|(&t, fr)| samples(fr, side, Some(t))).collect();
            write_csv(output, &rows)?;
        }
        (Loaded::Field(_), false) => return Err(CliError::Usage("an STF1 file converts to CSV only".into())),
    }
    Ok(())
}
