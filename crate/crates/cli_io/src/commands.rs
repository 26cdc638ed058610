use crate::cli::{Command, GlobalArgs, RayArgs};
use crate::config::{GridConfig, RayConfig, RunConfig};
use crate::format::{fmt_cx, fmt_real, fmt_singular, term_table};
use crate::input::{load_extension, validate_problem};
use border::{arc_samples, border_family, BorderedFamily};
use discrete::{
    assemble, build_space, resolve_enrichment, DiscreteOperator, DiscreteSpace, ExtensionSpec, Side, TipData,
};
use domains::{quotient_dimension, same_exponent, strip_sigma, wedge_quotient_basis, SingularFunction};
use mellin_core::{c64, ConeProblem, Cx, Error, Result};
use probes::{Sector, SweepConfig};
use serde::Serialize;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Arc samples used to border a minimal operator.
const ARC_SAMPLES: usize = 33;

#[derive(Serialize)]
struct Envelope<'a, R: Serialize> {
    config: &'a RunConfig,
    report: R,
}

pub fn execute(command: &Command, global: &GlobalArgs) -> Result<()> {
    if !(global.tol > 0.0 && global.tol < 1.0) {
        return Err(Error::Validation(vec![format!("--tol must lie in (0, 1), got {}", global.tol)]));
    }
    let grid = GridConfig::new(global.depth, global.points)?;
    match command {
        Command::SpecB { problem, strip } => spec_b(&validate_problem(problem)?, *strip, global),
        Command::Domains { problem, ext } => domains_report(&validate_problem(problem)?, ext.as_deref(), global),
        Command::Theta { problem, sigma } => theta_report(&validate_problem(problem)?, *sigma, global),
        Command::IndexLadder { problem, lambda } => {
            let p = validate_problem(problem)?;
            let space = build_space(grid.depth, grid.points, p.order())?;
            let ladder = probes::relative_index_ladder(&p, &space, *lambda, global.tol)?;
            if global.json {
                return emit_json(&config(command, problem, None, None, grid, global), ladder, global);
            }
            let mut text = format!(
                "index ladder at lambda = {} (dim Dmax/Dmin = {})\n{:>6} {:>6} {:>6} {:>6} {:>14}\n",
                fmt_cx(*lambda),
                ladder.quotient_dim,
                "dim E",
                "ker",
                "coker",
                "index",
                "smin"
            );
            for r in &ladder.rows {
                let _ = writeln!(
                    text,
                    "{:>6} {:>6} {:>6} {:>6} {:>14.6e}{}",
                    r.dim_e,
                    r.dim_ker,
                    r.dim_coker,
                    r.index,
                    r.smallest_singular_value,
                    if r.ill_separated { "  ill-separated" } else { "" }
                );
            }
            let _ = writeln!(text, "ladder {}", if ladder.ladder_holds { "holds" } else { "broken" });
            emit_text(&text, global)
        }
        Command::Sweep { problem, ext, ray, snap, sidecar } => {
            sweep(problem, ext, ray, *snap, sidecar.as_deref(), grid, command, global)
        }
        Command::SectorScan { problem, ext, center, aperture, rays, radii } => {
            let p = validate_problem(problem)?;
            let choice = load_extension(ext)?;
            let sector = Sector::new(center.to_radians(), aperture.to_radians())?;
            let scan_grid = probes::ScanGrid { sector, rays: *rays, radii: radii.clone(), tol: global.tol };
            scan_grid.validate()?;
            let space = build_space(grid.depth, grid.points, p.order())?;
            let scan = probes::bg_spectrum_scan(&p, &choice, &space, &scan_grid)?;
            emit_json(&config(command, problem, Some(ext), None, grid, global), scan, global)
        }
        Command::CsymCheck { problem, center, aperture, samples } => {
            let p = validate_problem(problem)?;
            if *samples < 2 {
                return Err(Error::Validation(vec![format!("--samples must be at least 2, got {samples}")]));
            }
            let sector = Sector::new(center.to_radians(), aperture.to_radians())?;
            let report = probes::csymbol_ray_check(&p, &sector, *samples);
            emit_json(&config(command, problem, None, None, grid, global), report, global)
        }
        Command::AtauCheck { problem, taus, probes: count } => {
            let p = validate_problem(problem)?;
            let space = build_space(grid.depth, grid.points, p.order())?;
            let report = probes::a_tau_convergence(&p, &space, taus, *count, global.seed)?;
            emit_json(&config(command, problem, None, None, grid, global), report, global)
        }
        Command::SmaxCheck { problem, ext, ray } => {
            let p = validate_problem(problem)?;
            let choice = load_extension(ext)?;
            let rc = ray_config(ray)?;
            let space = build_space(grid.depth, grid.points, p.order())?;
            let wedge = assemble(&p, &space, &choice, c64(0.0, 0.0), Side::Wedge)?;
            let bf = family(&p, &space, Side::Wedge, &rc, global.tol)?;
            let report = probes::smax_condition_check(&wedge, &bf, &sweep_config(&rc, false))?;
            emit_json(&config(command, problem, Some(ext), Some(rc), grid, global), report, global)
        }
        Command::FfwedgeCheck { problem, ext, ray } => {
            let p = validate_problem(problem)?;
            let rc = ray_config(ray)?;
            let basis = cone_basis(&p, ext)?;
            let space = build_space(grid.depth, grid.points, p.order())?;
            let cone_bf = family(&p, &space, Side::Cone, &rc, global.tol)?;
            let wedge_bf = family(&p, &space, Side::Wedge, &rc, global.tol)?;
            let report = probes::f_vs_fwedge(&p, &basis, &space, &cone_bf, &wedge_bf, &sweep_config(&rc, false))?;
            emit_json(&config(command, problem, Some(ext), Some(rc), grid, global), report, global)
        }
        Command::KtildeCheck { problem, ext, rhos } => {
            let p = validate_problem(problem)?;
            let basis = cone_basis(&p, ext)?;
            let space = build_space(grid.depth, grid.points, p.order())?;
            let report = probes::ktilde_estimates(&p, &basis, &space, rhos)?;
            emit_json(&config(command, problem, Some(ext), None, grid, global), report, global)
        }
    }
}

fn config(
    command: &Command,
    problem: &Path,
    ext: Option<&PathBuf>,
    ray: Option<RayConfig>,
    grid: GridConfig,
    global: &GlobalArgs,
) -> RunConfig {
    RunConfig {
        command: command.name().to_string(),
        problem: problem.to_path_buf(),
        extension: ext.cloned(),
        ray,
        grid,
        tol: global.tol,
        output: global.out.clone(),
        seed: global.seed,
    }
}

fn ray_config(ray: &RayArgs) -> Result<RayConfig> {
    RayConfig::new(ray.ray, ray.aperture, ray.rmin, ray.rmax, ray.samples)
}

fn sweep_config(rc: &RayConfig, snap: bool) -> SweepConfig {
    SweepConfig { theta0: rc.theta0(), r_min: rc.r_min, r_max: rc.r_max, samples: rc.samples, snap_to_spectrum: snap }
}

/// Borders the minimal operator on the arc around the ray.
fn family(
    problem: &ConeProblem,
    space: &DiscreteSpace,
    side: Side,
    rc: &RayConfig,
    tol: f64,
) -> Result<BorderedFamily> {
    let minimal = assemble(problem, space, &ExtensionSpec::minimal(), c64(0.0, 0.0), side)?;
    border_family(&minimal, &arc_samples(rc.theta0(), rc.aperture(), ARC_SAMPLES), tol)
}

fn cone_basis(problem: &ConeProblem, ext: &Path) -> Result<Vec<SingularFunction>> {
    let choice = load_extension(ext)?;
    let tip = TipData::new(problem)?;
    Ok(resolve_enrichment(&choice, &tip, Side::Cone)?.functions)
}

fn write_out(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::Validation(vec![format!("cannot write {}: {e}", path.display())]))
}

fn emit_text(text: &str, global: &GlobalArgs) -> Result<()> {
    match &global.out {
        Some(path) => write_out(path, text.as_bytes()),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn emit_json<R: Serialize>(cfg: &RunConfig, report: R, global: &GlobalArgs) -> Result<()> {
    let mut text = serde_json::to_string_pretty(&Envelope { config: cfg, report })?;
    text.push('\n');
    emit_text(&text, global)
}

#[derive(Serialize)]
struct RootRow {
    sigma: [f64; 2],
    multiplicity: usize,
    chains: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    in_strip: Option<bool>,
}

#[derive(Serialize)]
struct SpecBReport {
    problem: String,
    order: usize,
    cross_dim: usize,
    roots: Vec<RootRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    quotient_dim: Option<usize>,
    warnings: Vec<String>,
}

fn spec_b(problem: &ConeProblem, strip: bool, global: &GlobalArgs) -> Result<()> {
    let tip = TipData::new(problem)?;
    let m = problem.order();
    let lines = strip_sigma(&tip.spectrum, m);
    let mut warnings: Vec<String> = lines.warning().into_iter().collect();
    let quotient_dim = if strip {
        match quotient_dimension(&tip.spectrum, m) {
            Ok(d) => Some(d),
            Err(Error::DminNonSimple(_)) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    for p in tip.spectrum.points.iter().filter(|p| p.boundary_ambiguous) {
        warnings.push(format!("root {} lies close to the edge of the search region", fmt_cx(p.sigma)));
    }
    let roots: Vec<RootRow> = tip
        .spectrum
        .points
        .iter()
        .map(|p| RootRow {
            sigma: [p.sigma.re, p.sigma.im],
            multiplicity: p.algebraic_multiplicity,
            chains: p.partial_multiplicities.clone(),
            in_strip: strip.then(|| lines.inside.iter().any(|s| same_exponent(*s, p.sigma))),
        })
        .collect();
    let report = SpecBReport {
        problem: problem.name().to_string(),
        order: m,
        cross_dim: problem.dim(),
        roots,
        quotient_dim,
        warnings,
    };
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    if global.json {
        let mut text = serde_json::to_string_pretty(&report)?;
        text.push('\n');
        return emit_text(&text, global);
    }
    let mut text = format!(
        "boundary spectrum of {} (order {}, cross dimension {})\n",
        report.problem, report.order, report.cross_dim
    );
    let _ = write!(text, "{:<24} {:>12} {:>10}", "root", "multiplicity", "chains");
    if strip {
        let _ = write!(text, " {:>9}", "in strip");
    }
    text.push('\n');
    for r in &report.roots {
        let chains = r.chains.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
        let _ = write!(text, "{:<24} {:>12} {:>10}", fmt_cx(Cx::new(r.sigma[0], r.sigma[1])), r.multiplicity, chains);
        if let Some(inside) = r.in_strip {
            let _ = write!(text, " {:>9}", if inside { "yes" } else { "no" });
        }
        text.push('\n');
    }
    if strip {
        match report.quotient_dim {
            Some(d) => {
                let _ = writeln!(text, "d = {d}");
            }
            None => text.push_str("d undefined: the minimal domain is not of simple form\n"),
        }
    }
    emit_text(&text, global)
}

fn theta_report(problem: &ConeProblem, sigma: Cx, global: &GlobalArgs) -> Result<()> {
    let tip = TipData::new(problem)?;
    let basis = wedge_quotient_basis(&tip.spectrum, problem.order())?;
    let matching: Vec<_> = basis.elements.iter().filter(|e| same_exponent(e.sigma0, sigma)).collect();
    if matching.is_empty() {
        return Err(Error::ExponentNotInStrip(sigma));
    }
    #[derive(Serialize)]
    struct Row {
        model: String,
        cone: String,
        terms: Vec<[String; 4]>,
        recursion_depth: usize,
        identity_residual: f64,
    }
    let mut rows = Vec::new();
    for e in matching {
        let exp = theta::e_recursion(&e.function, &tip.family, &tip.spectrum)?;
        if exp.missing_layers {
            eprintln!(
                "warning: Taylor expansion too short for the recursion at {}; higher terms are truncated",
                fmt_cx(sigma)
            );
        }
        let cone = exp.sum();
        rows.push(Row {
            model: fmt_singular(&e.function),
            cone: fmt_singular(&cone),
            terms: term_table(&cone),
            recursion_depth: exp.depth,
            identity_residual: theta::defining_identity_residual(&exp, &tip.family),
        });
    }
    if global.json {
        let mut text = serde_json::to_string_pretty(&rows)?;
        text.push('\n');
        return emit_text(&text, global);
    }
    let mut text = String::new();
    for r in &rows {
        let _ = writeln!(text, "model: {}", r.model);
        let _ = writeln!(text, "cone:  {}", r.cone);
        let _ = writeln!(text, "{:<14} {:<16} {:>10}  coefficient", "exponent", "power", "log-degree");
        for [sigma, power, k, c] in &r.terms {
            let _ = writeln!(text, "{sigma:<14} {power:<16} {k:>10}  {c}");
        }
        let _ = writeln!(text, "recursion depth {}, identity residual {:.3e}", r.recursion_depth, r.identity_residual);
    }
    emit_text(&text, global)
}

fn domains_report(problem: &ConeProblem, ext: Option<&Path>, global: &GlobalArgs) -> Result<()> {
    let tip = TipData::new(problem)?;
    let m = problem.order();
    let d = quotient_dimension(&tip.spectrum, m)?;
    let basis = wedge_quotient_basis(&tip.spectrum, m)?;
    #[derive(Serialize)]
    struct Pair {
        sigma: [f64; 2],
        model: String,
        cone: String,
    }
    #[derive(Serialize)]
    struct Report {
        quotient_dim: usize,
        basis: Vec<Pair>,
        #[serde(skip_serializing_if = "Option::is_none")]
        extension: Option<Vec<String>>,
    }
    let mut pairs = Vec::new();
    for e in &basis.elements {
        let cone = theta::theta_inverse(&e.function, &tip.family, &tip.spectrum)?;
        pairs.push(Pair {
            sigma: [e.sigma0.re, e.sigma0.im],
            model: fmt_singular(&e.function),
            cone: fmt_singular(&cone),
        });
    }
    let extension = match ext {
        Some(path) => {
            let choice = load_extension(path)?;
            let functions = resolve_enrichment(&choice, &tip, Side::Cone)?.functions;
            Some(functions.iter().map(fmt_singular).collect())
        }
        None => None,
    };
    let report = Report { quotient_dim: d, basis: pairs, extension };
    if global.json {
        let mut text = serde_json::to_string_pretty(&report)?;
        text.push('\n');
        return emit_text(&text, global);
    }
    let mut text = format!("dim Dmax/Dmin = {d}\n");
    for p in &report.basis {
        let _ = writeln!(text, "{}: model {} | cone {}", fmt_cx(Cx::new(p.sigma[0], p.sigma[1])), p.model, p.cone);
    }
    if let Some(funcs) = &report.extension {
        let _ = writeln!(text, "extension adds {} of {d} functions", funcs.len());
        for f in funcs {
            let _ = writeln!(text, "  {f}");
        }
    }
    emit_text(&text, global)
}

#[derive(Serialize)]
struct Sidecar<'a> {
    config: &'a RunConfig,
    fitted_exponent: Option<f64>,
    fit: Option<probes::PowerFit>,
    threshold_r: Option<f64>,
    rows_written: usize,
    excluded: &'a [probes::ExcludedSample],
    spectrum_on_ray: &'a [[f64; 2]],
    warnings: &'a [String],
}

#[allow(clippy::too_many_arguments)]
fn sweep(
    problem_path: &Path,
    ext_path: &PathBuf,
    ray: &RayArgs,
    snap: bool,
    sidecar: Option<&Path>,
    grid: GridConfig,
    command: &Command,
    global: &GlobalArgs,
) -> Result<()> {
    let problem = validate_problem(problem_path)?;
    let choice = load_extension(ext_path)?;
    let rc = ray_config(ray)?;
    let space = build_space(grid.depth, grid.points, problem.order())?;
    let ext: DiscreteOperator = assemble(&problem, &space, &choice, c64(0.0, 0.0), Side::Cone)?;
    let bf = family(&problem, &space, Side::Cone, &rc, global.tol)?;
    let report = probes::minimal_growth_sweep(&ext, &bf, &sweep_config(&rc, snap))?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }

    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["lambda_re", "lambda_im", "inv_norm", "smin", "det_F_abs", "cond"]).map_err(csv_error)?;
    let mut rows = 0;
    for s in report.invertible() {
        let inv = s.inv_norm.map(|v| format!("{v:.12e}")).unwrap_or_default();
        writer
            .write_record([
                format!("{:.12e}", s.lambda[0]),
                format!("{:.12e}", s.lambda[1]),
                inv,
                format!("{:.12e}", s.smin),
                format!("{:.12e}", s.det_f_abs),
                format!("{:.12e}", s.cond),
            ])
            .map_err(csv_error)?;
        rows += 1;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Numerical(format!("csv output: {e}")))?;

    let cfg = config(command, problem_path, Some(ext_path), Some(rc), grid, global);
    let side = Sidecar {
        config: &cfg,
        fitted_exponent: report.fitted_exponent,
        fit: report.fit,
        threshold_r: report.threshold_r,
        rows_written: rows,
        excluded: &report.excluded,
        spectrum_on_ray: &report.spectrum_on_ray,
        warnings: &report.warnings,
    };
    let mut side_text = serde_json::to_string_pretty(&side)?;
    side_text.push('\n');
    let sidecar_path = sidecar.map(Path::to_path_buf).or_else(|| global.out.as_ref().map(|p| p.with_extension("json")));

    match &global.out {
        Some(path) => write_out(path, &bytes)?,
        None => std::io::stdout().write_all(&bytes)?,
    }
    match sidecar_path {
        Some(path) => write_out(&path, side_text.as_bytes())?,
        None => eprint!("{side_text}"),
    }
    if global.out.is_some() {
        let exponent = report.fitted_exponent.map(fmt_real).unwrap_or_else(|| "none".into());
        let threshold = report.threshold_r.map(fmt_real).unwrap_or_else(|| "none".into());
        println!(
            "{rows} invertible samples, {} excluded; fitted exponent {exponent}; invertible beyond |lambda| = {threshold}",
            report.excluded.len()
        );
    }
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    Error::Numerical(format!("csv output: {e}"))
}
