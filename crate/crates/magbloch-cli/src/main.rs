//! magbloch: batch pipelines over periodic magnetic Schrödinger models.
//!
//! Subcommands: validate, bands, symmetry, chern, wannier, tpuv.
//! Exit codes: 0 success, 2 configuration error, 3 assumption violation
//! (gap/flux), 4 numerical failure, 5 topological obstruction.

mod config;

use clap::{Parser, Subcommand};
use config::{parse_config, RunConfig, Tolerances};
use magbloch::basis::PlaneWaveBasis;
use magbloch::chern::{
    chern1_curvature, chern1_plaquette, chern2_curvature, chern2_plaquette, instanton_charge,
    triviality_verdict, Calibration, Chern1Entry, Chern2Entry, ChernReport, NU_CONVENTION,
    S_CONVENTION,
};
use magbloch::error::CoreError;
use magbloch::fourier::{closedness_residual, zero_flux_check};
use magbloch::kgrid::KGrid;
use magbloch::model::{parse_model, LatticeModel, ModelInput, SyntheticSpec};
use magbloch::projector::{gap_report, solve_grid, ProjectorField, RelevantSet};
use magbloch::report::{
    band_csv, mass_csv, svg_lines, symmetry_csv, CheckLine, DecaySummary, GapSummary,
    GaugeSummary, Report,
};
use magbloch::symmetry::{
    collocation_resolution, magnetic_translation_cocycle, parity_projector_residual,
    spectrum_symmetry_residual, trs_projector_residual, AntiunitaryFiberOp, PotentialKind,
};
use magbloch::wannier::{
    decay_fit, inverse_bf, multiband_projection_gauge, rank1_trs_gauge, write_wannier,
};
use magbloch::{synthetic, C64};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "magbloch", about = "Bloch-Floquet spectral pipelines")]
struct Cli {
    /// Model file (JSON); overrides the config `model` key
    #[arg(long, global = true)]
    model: Option<PathBuf>,
    /// Run configuration (JSON)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default `out`)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Cap the parallel k-sweeps
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Check the standing assumptions (reality, closedness, zero flux)
    Validate,
    /// Band structure along a path
    Bands,
    /// Magnetic symmetry residuals and the translation cocycle
    Symmetry,
    /// Chern invariants and the triviality verdict
    Chern,
    /// Bloch gauge construction, Wannier synthesis, decay fit
    Wannier,
    /// Trace per unit volume: Bloch value and supercell limit
    Tpuv,
}

impl Cmd {
    fn name(self) -> &'static str {
        match self {
            Cmd::Validate => "validate",
            Cmd::Bands => "bands",
            Cmd::Symmetry => "symmetry",
            Cmd::Chern => "chern",
            Cmd::Wannier => "wannier",
            Cmd::Tpuv => "tpuv",
        }
    }
}

fn exit_code_for(e: &CoreError) -> u8 {
    match e {
        CoreError::Config(_) | CoreError::Malformed(_) | CoreError::IncompleteInput(_) => 2,
        CoreError::WrongDimension { .. } | CoreError::Io(_) => 2,
        CoreError::GapFailure { .. }
        | CoreError::NoPeriodicPotential { .. }
        | CoreError::NotAField { .. }
        | CoreError::ParityInapplicable => 3,
        CoreError::DegenerateLattice
        | CoreError::CutoffTooSmall { .. }
        | CoreError::NumericalFailure { .. }
        | CoreError::NumericalDegeneracy(_)
        | CoreError::GridTooCoarse(_)
        | CoreError::TransportBreakdown { .. }
        | CoreError::TrialFailure { .. } => 4,
        CoreError::Obstruction(_) => 5,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match run(&cli) {
        Ok(report) => {
            print!("{}", report.to_text());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn run(cli: &Cli) -> Result<Report, CoreError> {
    let mut cfg: RunConfig = match &cli.config {
        Some(p) => parse_config(&std::fs::read_to_string(p)?)?,
        None => parse_config(&format!(
            r#"{{"pipeline": "{}", "grid": [12, 12]}}"#,
            cli.command.name()
        ))?,
    };
    cfg.pipeline = cli.command.name().to_string();
    let model_path = cli
        .model
        .clone()
        .or_else(|| cfg.model.clone().map(PathBuf::from))
        .ok_or_else(|| CoreError::Config("no model file given (--model or config key)".into()))?;
    let input = parse_model(&std::fs::read_to_string(&model_path)?)?;
    let out_dir = cli
        .out
        .clone()
        .or_else(|| cfg.out.clone().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&out_dir)?;
    let model_name = model_path.file_stem().unwrap_or_default().to_string_lossy().to_string();

    let mut report = match (cli.command, input) {
        (Cmd::Validate, ModelInput::Physical(m)) => pipeline_validate(&m, &cfg, &model_name)?,
        (Cmd::Bands, ModelInput::Physical(m)) => pipeline_bands(&m, &cfg, &model_name, &out_dir)?,
        (Cmd::Symmetry, ModelInput::Physical(m)) => {
            pipeline_symmetry(&m, &cfg, &model_name, &out_dir)?
        }
        (Cmd::Chern, ModelInput::Physical(m)) => pipeline_chern(&m, &cfg, &model_name)?,
        (Cmd::Chern, ModelInput::Synthetic(s)) => pipeline_chern_synthetic(&s, &cfg, &model_name)?,
        (Cmd::Wannier, ModelInput::Physical(m)) => {
            pipeline_wannier(&m, &cfg, &model_name, &out_dir)?
        }
        (Cmd::Tpuv, ModelInput::Physical(m)) => pipeline_tpuv(&m, &cfg, &model_name)?,
        (_, ModelInput::Synthetic(_)) => {
            return Err(CoreError::Config(
                "synthetic models are only accepted by the chern pipeline".into(),
            ))
        }
    };

    report.artifacts.push("report.json".into());
    report.artifacts.push("report.txt".into());
    std::fs::write(out_dir.join("report.json"), report.to_json())?;
    std::fs::write(out_dir.join("report.txt"), report.to_text())?;
    Ok(report)
}

/// Assumption 1.1 gate: every spectral pipeline refuses models with flux.
fn flux_gate(model: &LatticeModel, tol: &Tolerances) -> Result<Vec<(usize, usize, f64)>, CoreError> {
    let fluxes = zero_flux_check(&model.lattice, &model.derived_field());
    for &(j, l, flux) in &fluxes {
        if flux.abs() > tol.flux {
            return Err(CoreError::NoPeriodicPotential {
                j,
                l,
                flux,
                tol: tol.flux,
            });
        }
    }
    Ok(fluxes)
}

fn pipeline_validate(
    model: &LatticeModel,
    cfg: &RunConfig,
    name: &str,
) -> Result<Report, CoreError> {
    let mut rep = Report::new("validate", name);
    let b = model.derived_field();
    for (j, l, flux) in zero_flux_check(&model.lattice, &b) {
        rep.push(CheckLine::new(
            &format!("flux[{j},{l}]"),
            flux,
            cfg.tolerances.flux,
        ));
    }
    rep.push(CheckLine::new(
        "closedness",
        closedness_residual(&model.lattice, &b),
        1e-10,
    ));
    if let Some(field) = &model.field {
        use magbloch::fourier::{field_distance, field_from_potential};
        let round = field_from_potential(&model.lattice, &model.vector_potential);
        rep.push(CheckLine::new(
            "field-potential-round-trip",
            field_distance(field, &round),
            1e-10,
        ));
    }
    if !rep.pass {
        // surface the violated assumption through the exit code
        if let Some(bad) = rep.checks.iter().find(|c| !c.pass && c.name.starts_with("flux")) {
            let _ = bad;
            return Err(CoreError::NoPeriodicPotential {
                j: 0,
                l: 1,
                flux: rep.checks.iter().find(|c| !c.pass).unwrap().value,
                tol: cfg.tolerances.flux,
            });
        }
    }
    Ok(rep)
}

fn pipeline_bands(
    model: &LatticeModel,
    cfg: &RunConfig,
    name: &str,
    out: &Path,
) -> Result<Report, CoreError> {
    flux_gate(model, &cfg.tolerances)?;
    let d = model.dim();
    let basis = PlaneWaveBasis::new(d, cfg.cutoff);
    let nodes: Vec<Vec<f64>> = if cfg.band_path.is_empty() {
        let mut a = vec![0.0; d];
        let mut bnode = vec![0.0; d];
        bnode[0] = 1.0;
        a.truncate(d);
        vec![a, bnode]
    } else {
        cfg.band_path.clone()
    };
    let mut path = Vec::new();
    for w in nodes.windows(2) {
        for t in 0..cfg.path_points {
            let f = t as f64 / cfg.path_points as f64;
            path.push((0..d).map(|j| w[0][j] * (1.0 - f) + w[1][j] * f).collect());
        }
    }
    path.push(nodes.last().unwrap().clone());
    let count = cfg.band_count.min(basis.len());
    let rows = magbloch::fiber::band_path(model, &basis, &path, count)?;
    std::fs::write(out.join("bands.csv"), band_csv(&rows))?;
    let series: Vec<Vec<(f64, f64)>> = (0..count)
        .map(|b| {
            rows.iter()
                .enumerate()
                .map(|(i, (_, e))| (i as f64, e[b]))
                .collect()
        })
        .collect();
    std::fs::write(out.join("bands.svg"), svg_lines(&series, "band path"))?;
    let mut rep = Report::new("bands", name);
    rep.push(CheckLine::flag("band-table-written", true));
    rep.artifacts.push("bands.csv".into());
    rep.artifacts.push("bands.svg".into());
    Ok(rep)
}

fn relevant_set(cfg: &RunConfig) -> Result<RelevantSet, CoreError> {
    if cfg.band_list.is_empty() {
        Ok(RelevantSet::lowest(cfg.bands))
    } else {
        RelevantSet::from_one_based(&cfg.band_list)
    }
}

fn pipeline_symmetry(
    model: &LatticeModel,
    cfg: &RunConfig,
    name: &str,
    out: &Path,
) -> Result<Report, CoreError> {
    flux_gate(model, &cfg.tolerances)?;
    let d = model.dim();
    let basis = PlaneWaveBasis::new(d, cfg.cutoff);
    let grid = KGrid::even(cfg.grid.clone())?;
    let set = relevant_set(cfg)?;
    let field = ProjectorField::build(model, &basis, &grid, &set, cfg.tolerances.gap)?;
    let res = collocation_resolution(cfg.cutoff);
    let j = AntiunitaryFiberOp::magnetic_time_reversal(model, &basis, res);
    let mut rows: Vec<(String, f64, f64, bool, i32)> = Vec::new();
    let mut push = |rows: &mut Vec<(String, f64, f64, bool, i32)>, name: &str, v: f64, tol: f64| {
        rows.push((name.to_string(), v, tol, v <= tol, cfg.cutoff));
    };
    let trs = trs_projector_residual(&field, &j);
    push(&mut rows, "trs-projector", trs, cfg.tolerances.trs);
    push(&mut rows, "j-unitarity", j.unitarity_defect(), 0.1);
    push(&mut rows, "j-involution", j.involution_defect(), 0.1);
    match AntiunitaryFiberOp::magnetic_parity(model, &basis, res) {
        Ok(pi) => {
            let pr = parity_projector_residual(&field, &pi);
            push(&mut rows, "parity-projector", pr, cfg.tolerances.trs);
        }
        Err(CoreError::ParityInapplicable) => {}
        Err(e) => return Err(e),
    }
    let spec_sym = spectrum_symmetry_residual(model, &basis, &grid, set.m() + 2)?;
    push(&mut rows, "spectrum-symmetry", spec_sym, cfg.tolerances.trs);
    // translation cocycle on a few sample points
    let samples: Vec<Vec<f64>> = vec![vec![0.13; d], vec![0.41; d], vec![0.77; d]];
    let e1: Vec<f64> = (0..d).map(|c| model.lattice.basis_vector(0)[c]).collect();
    let e2: Vec<f64> = (0..d)
        .map(|c| model.lattice.basis_vector(d.min(2) - 1)[c])
        .collect();
    let phis = magnetic_translation_cocycle(
        &model.lattice,
        &PotentialKind::Periodic(&model.vector_potential),
        &e1,
        &e2,
        &samples,
    );
    let worst = phis
        .iter()
        .map(|p| (C64::new(0.0, -p).exp() - C64::new(1.0, 0.0)).norm())
        .fold(0.0, f64::max);
    push(&mut rows, "translation-cocycle", worst, 1e-10);
    std::fs::write(out.join("symmetry.csv"), symmetry_csv(&rows))?;
    let mut rep = Report::new("symmetry", name);
    for (n, v, tol, _, _) in &rows {
        rep.push(CheckLine::new(n, *v, *tol));
    }
    rep.artifacts.push("symmetry.csv".into());
    Ok(rep)
}

fn chern_from_field(field: &ProjectorField, tol_int: f64) -> Result<ChernReport, CoreError> {
    let d = field.grid.dim();
    let mut c1 = Vec::new();
    for i in 0..d {
        for jx in (i + 1)..d {
            let trans = vec![0usize; d - 2];
            let (v, residual, _) = chern1_plaquette(field, (i, jx), &trans)?;
            let curvature_value = chern1_curvature(field, (i, jx));
            if residual > tol_int {
                return Err(CoreError::NumericalDegeneracy(format!(
                    "plaquette c1 residual {residual:.3e} above {tol_int:.1e}"
                )));
            }
            c1.push(Chern1Entry {
                plane: [i, jx],
                value: v,
                residual,
                curvature_value,
            });
        }
    }
    let (c2, q, qv) = if d == 4 {
        let (v, residual) = chern2_plaquette(field)?;
        let curvature_value = chern2_curvature(field)?;
        let (raw, _) = instanton_charge(field)?;
        (
            Some(Chern2Entry {
                value: v,
                residual,
                curvature_value,
            }),
            Some(raw),
            Some(raw),
        )
    } else {
        (None, None, None)
    };
    let ints: Vec<i64> = c1.iter().map(|e| e.value).collect();
    let (verdict, sigma) = triviality_verdict(d, field.m, &ints, c2.as_ref().map(|e| e.value))?;
    Ok(ChernReport {
        c1,
        c2,
        instanton_charge: q,
        instanton_charge_per_volume: qv,
        verdict,
        sigma,
        calibration: Calibration {
            s: S_CONVENTION,
            nu: NU_CONVENTION,
        },
    })
}

fn pipeline_chern(
    model: &LatticeModel,
    cfg: &RunConfig,
    name: &str,
) -> Result<Report, CoreError> {
    flux_gate(model, &cfg.tolerances)?;
    let d = model.dim();
    let basis = PlaneWaveBasis::new(d, cfg.cutoff);
    let grid = KGrid::even(cfg.grid.clone())?;
    let set = relevant_set(cfg)?;
    let field = ProjectorField::build(model, &basis, &grid, &set, cfg.tolerances.gap)?;
    let chern = chern_from_field(&field, cfg.tolerances.integer_residual)?;
    let mut rep = Report::new("chern", name);
    if let Some(g) = &field.gap {
        rep.gap = Some(GapSummary {
            c_g: g.c_g,
            location: g.location.clone(),
            pass: g.pass,
        });
    }
    let (idem, herm, tr) = field.invariant_residuals();
    rep.push(CheckLine::new("projector-idempotency", idem, 1e-10));
    rep.push(CheckLine::new("projector-hermiticity", herm, 1e-10));
    rep.push(CheckLine::new("projector-trace", tr, 1e-10));
    for e in &chern.c1 {
        rep.push(CheckLine::new(
            &format!("c1[{},{}]-integer-residual", e.plane[0], e.plane[1]),
            e.residual,
            cfg.tolerances.integer_residual,
        ));
    }
    rep.push(CheckLine::flag("verdict-present", true));
    rep.chern = Some(chern);
    Ok(rep)
}

fn pipeline_chern_synthetic(
    spec: &SyntheticSpec,
    cfg: &RunConfig,
    name: &str,
) -> Result<Report, CoreError> {
    let m_param = cfg.m_param.unwrap_or(spec.m_param);
    let (field, label) = match spec.kind.as_str() {
        "skyrmion" => {
            let grid = KGrid::even(if cfg.grid.len() == 2 {
                cfg.grid.clone()
            } else {
                vec![24, 24]
            })?;
            (
                ProjectorField::from_closure(&grid, 1, move |k| {
                    synthetic::skyrmion_projector(k, m_param)
                }),
                "skyrmion",
            )
        }
        "dirac4d" => {
            let grid = KGrid::even(if cfg.grid.len() == 4 {
                cfg.grid.clone()
            } else {
                vec![6, 6, 6, 6]
            })?;
            (
                ProjectorField::from_closure(&grid, 2, move |k| {
                    synthetic::dirac_projector(k, m_param)
                }),
                "dirac4d",
            )
        }
        other => {
            return Err(CoreError::Config(format!(
                "unknown synthetic fixture `{other}`"
            )))
        }
    };
    let chern = chern_from_field(&field, cfg.tolerances.integer_residual)?;
    let mut rep = Report::new("chern", &format!("{name} ({label}, m_p = {m_param})"));
    let (idem, herm, tr) = field.invariant_residuals();
    rep.push(CheckLine::new("projector-idempotency", idem, 1e-10));
    rep.push(CheckLine::new("projector-hermiticity", herm, 1e-10));
    rep.push(CheckLine::new("projector-trace", tr, 1e-10));
    rep.push(CheckLine::flag("verdict-present", true));
    rep.chern = Some(chern);
    Ok(rep)
}

fn pipeline_wannier(
    model: &LatticeModel,
    cfg: &RunConfig,
    name: &str,
    out: &Path,
) -> Result<Report, CoreError> {
    flux_gate(model, &cfg.tolerances)?;
    let d = model.dim();
    let basis = PlaneWaveBasis::new(d, cfg.cutoff);
    let grid = KGrid::even(cfg.grid.clone())?;
    let set = relevant_set(cfg)?;
    let field = ProjectorField::build(model, &basis, &grid, &set, cfg.tolerances.gap)?;
    let mut rep = Report::new("wannier", name);
    if let Some(g) = &field.gap {
        rep.gap = Some(GapSummary {
            c_g: g.c_g,
            location: g.location.clone(),
            pass: g.pass,
        });
    }
    // band table on the first-axis line for reference
    let axis_path: Vec<Vec<f64>> = (0..=grid.dims[0])
        .map(|i| {
            let mut k = vec![0.0; d];
            k[0] = i as f64 / grid.dims[0] as f64;
            k
        })
        .collect();
    let rows = magbloch::fiber::band_path(model, &basis, &axis_path, set.m() + 3)?;
    std::fs::write(out.join("bands.csv"), band_csv(&rows))?;
    rep.artifacts.push("bands.csv".into());

    let section = if set.m() == 1 {
        let j = AntiunitaryFiberOp::magnetic_time_reversal(
            model,
            &basis,
            collocation_resolution(cfg.cutoff),
        );
        rank1_trs_gauge(&field, &j)?
    } else {
        let trials = if cfg.trials.is_empty() {
            model.trials.clone()
        } else {
            cfg.trials.clone()
        };
        multiband_projection_gauge(&field, &model.lattice, &basis, &trials)?
    };
    let dg = &section.diagnostics;
    rep.gauge = Some(GaugeSummary {
        trs_residual: dg.trs_residual,
        seam_residual: dg.seam_residual,
        range_residual: dg.range_residual,
        orthonormality: dg.orthonormality,
        smoothness: dg.smoothness,
        max_winding: dg.max_winding,
        min_overlap: dg.min_overlap,
        input_trs_residual: dg.input_trs_residual,
    });
    rep.push(CheckLine::new("gauge-orthonormality", dg.orthonormality, 1e-10));
    rep.push(CheckLine::new("gauge-range", dg.range_residual, cfg.tolerances.trs));
    if set.m() == 1 {
        rep.push(CheckLine::new("gauge-trs", dg.trs_residual, cfg.tolerances.trs));
        rep.push(CheckLine::new("gauge-seam", dg.seam_residual, cfg.tolerances.trs));
    }
    let res = cfg
        .real_resolution
        .unwrap_or(((2 * cfg.cutoff + 2) as usize).max(8));
    let wanniers = inverse_bf(&section, &model.lattice, &basis, res)?;
    for (band, w) in wanniers.iter().enumerate() {
        let dists = w.cell_distances(&model.lattice);
        let cells: Vec<Vec<i64>> = (0..w.masses.len())
            .map(|g| {
                let idx = field.grid.unslot(g);
                idx.iter()
                    .zip(&field.grid.dims)
                    .map(|(&i, &n)| {
                        let i = i as i64;
                        if i <= n as i64 / 2 {
                            i
                        } else {
                            i - n as i64
                        }
                    })
                    .collect()
            })
            .collect();
        std::fs::write(
            out.join(format!("masses_band{band}.csv")),
            mass_csv(&cells, &dists, &w.masses),
        )?;
        let mut f = std::fs::File::create(out.join(format!("wannier_band{band}.bin")))?;
        write_wannier(&mut f, w)?;
        let half = *field.grid.dims.iter().min().unwrap() as f64 / 2.0;
        let fit = decay_fit(&w.masses, &dists, half, 2);
        // decay plot: log10 of shell masses against |γ|
        let mut pts: Vec<(f64, f64)> = dists
            .iter()
            .zip(&w.masses)
            .filter(|(_, m)| **m > 1e-16)
            .map(|(r, m)| (*r, m.log10()))
            .collect();
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        std::fs::write(
            out.join(format!("decay_band{band}.svg")),
            svg_lines(&[pts], "log10 mass vs |gamma|"),
        )?;
        rep.push(CheckLine::new(
            &format!("wannier{band}-norm"),
            (w.total_norm_sq() - 1.0).abs(),
            1e-8,
        ));
        rep.push(CheckLine::flag(
            &format!("decay{band}-positive-rate"),
            fit.b > 0.0 && !fit.capped,
        ));
        rep.decay.push(DecaySummary {
            band,
            b: fit.b,
            r_squared: fit.r_squared,
            range: fit.range,
            shells_used: fit.shells_used,
            capped: fit.capped,
        });
        rep.artifacts.push(format!("masses_band{band}.csv"));
        rep.artifacts.push(format!("wannier_band{band}.bin"));
    }
    Ok(rep)
}

fn pipeline_tpuv(
    model: &LatticeModel,
    cfg: &RunConfig,
    name: &str,
) -> Result<Report, CoreError> {
    flux_gate(model, &cfg.tolerances)?;
    let d = model.dim();
    let basis = PlaneWaveBasis::new(d, cfg.cutoff);
    let grid = KGrid::even(cfg.grid.clone())?;
    let set = relevant_set(cfg)?;
    // gap guard, then the exact Bloch value m/|W|
    let sols = solve_grid(model, &basis, &grid)?;
    let gap = gap_report(&sols, &grid, &set, cfg.tolerances.gap);
    if !gap.pass {
        return Err(CoreError::GapFailure {
            gap: gap.c_g,
            at: gap.location,
            tol: cfg.tolerances.gap,
        });
    }
    let traces = vec![C64::new(set.m() as f64, 0.0); grid.len()];
    let bloch = magbloch::tpuv::tpuv_bloch(&traces, model.lattice.cell_volume());
    let mut rep = Report::new("tpuv", name);
    rep.push(CheckLine::new(
        "tpuv-bloch-minus-m-over-volume",
        bloch - set.m() as f64 / model.lattice.cell_volume(),
        1e-10,
    ));
    let sizes: Vec<usize> = if cfg.supercells.is_empty() {
        if d == 1 {
            vec![8, 16, 32, 64]
        } else {
            vec![4, 8, 12]
        }
    } else {
        cfg.supercells.clone()
    };
    let ests = magbloch::tpuv::tpuv_supercell(model, &basis, &set, &sizes)?;
    let target = set.m() as f64 / model.lattice.cell_volume();
    for (l, v) in &ests {
        rep.push(CheckLine::new(
            &format!("tpuv-supercell-L{l}-relative-error"),
            (v - target) / target,
            0.02,
        ));
    }
    rep.tpuv = ests;
    Ok(rep)
}
