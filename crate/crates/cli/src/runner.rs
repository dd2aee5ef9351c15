//! Executes a run spec and collects its artifacts.

use anyhow::{bail, Context, Result};

use qchaos_core::crossover::{
    cr_comparison, disorder_scan, eta_scan, run_sweep, AnalysisOptions, BoseHubbardModel, CrossingResult, DisorderSpec,
    EtaPoint, ModelSpec, QubitArrayModel, SigmaPoint, SweepConfig, SweepCurve,
};
use qchaos_core::hamiltonian::ArrayPattern;
use qchaos_core::lattice::ConnectivityGraph;
use qchaos_core::levelstats::{p0, p1, R_BAR_GOE, R_BAR_POISSON, R_BAR_THRESHOLD};
use qchaos_core::three_site::{analytic_splitting, numeric_splitting, ThreeSiteParams};

use crate::output::{num, Artifacts};
use crate::spec::{Experiment, GridSpec, GridVariable, ModelEntry, ModelKind, RunSpec};
use crate::svg::{Plot, Series};

fn analysis_options(spec: &RunSpec) -> AnalysisOptions {
    AnalysisOptions {
        kl_convention: spec.analysis.kl_convention,
        fit_objective: spec.analysis.fit_objective,
        fit: spec.analysis.fit,
        n_bins: spec.analysis.bins,
        bootstrap_resamples: spec.analysis.bootstrap,
    }
}

fn array_model(entry: &ModelEntry) -> QubitArrayModel {
    let pattern = match entry.kind {
        ModelKind::TransmonArray => ArrayPattern::UniformTransmon,
        ModelKind::CsfqArray => ArrayPattern::UniformCsfq,
        _ => ArrayPattern::Alternating,
    };
    QubitArrayModel {
        transmon: entry.transmon,
        csfq: entry.csfq,
        pattern,
        n_cut: entry.n_cut,
        hamiltonian: entry.hamiltonian,
    }
}

fn bh_model(entry: &ModelEntry) -> BoseHubbardModel {
    BoseHubbardModel {
        omega_mean: entry.omega_mean,
        u_a: entry.u,
        u_b: entry.eta.map(|eta| -eta * entry.u),
        counter_rotating: entry.kind == ModelKind::BoseHubbardCr,
    }
}

/// Coupling K that gives average hopping `j` at the mean Josephson energies.
fn k_per_j(model: &QubitArrayModel, graph: &ConnectivityGraph) -> Result<f64> {
    let sites = model.site_specs(graph)?;
    let a: Vec<f64> = sites.iter().map(|s| s.site_mapping(s.josephson_mean()).a).collect();
    let mean: f64 = graph
        .edges()
        .iter()
        .map(|&(i, j)| 0.5 * (a[i] * a[j]).powf(0.25))
        .sum::<f64>()
        / graph.edges().len() as f64;
    Ok(1.0 / mean)
}

fn sweep_config(spec: &RunSpec, entry: &ModelEntry, grid: &GridSpec) -> Result<SweepConfig> {
    let graph = spec.graph.as_ref().context("missing graph")?.build()?;
    let points = grid.points()?;
    let (model, disorder, grid) = if entry.kind.is_array() {
        let model = array_model(entry);
        let grid = match grid.variable {
            GridVariable::K => points,
            GridVariable::J => {
                let f = k_per_j(&model, &graph)?;
                points.iter().map(|j| j * f).collect()
            }
        };
        (ModelSpec::QubitArray(model), DisorderSpec::josephson(spec.seed), grid)
    } else {
        if grid.variable == GridVariable::K {
            bail!("model {}: Bose-Hubbard grids are in J", entry.label);
        }
        let sigma = spec.disorder.context("Bose-Hubbard models need `disorder`")?;
        (
            ModelSpec::BoseHubbard(bh_model(entry)),
            DisorderSpec::site_frequency(sigma, spec.seed),
            points,
        )
    };
    let mut cfg = SweepConfig::new(
        model,
        graph,
        spec.n_exc.context("missing n_exc")?,
        grid,
        spec.realizations,
        disorder,
    );
    cfg.options = analysis_options(spec);
    Ok(cfg)
}

fn rbar_plot(title: &str, curves: &[(String, &SweepCurve, bool)]) -> Plot {
    Plot {
        title: title.into(),
        x_label: "J".into(),
        y_label: "mean spacing ratio".into(),
        log_x: true,
        series: curves
            .iter()
            .map(|(label, c, dashed)| Series {
                label: label.clone(),
                points: c.points.iter().map(|p| (p.j, p.rbar)).collect(),
                dashed: *dashed,
            })
            .collect(),
        h_lines: vec![R_BAR_GOE, R_BAR_THRESHOLD, R_BAR_POISSON],
    }
}

fn histogram_plot(label: &str, curve: &SweepCurve) -> Plot {
    let grid: Vec<f64> = (0..=100).map(|k| k as f64 / 100.0).collect();
    let mut series: Vec<Series> = curve
        .points
        .iter()
        .map(|p| {
            let h = &p.histogram;
            let w = h.bin_width();
            Series {
                label: format!("J={:.3e}", p.j),
                points: h
                    .frequencies()
                    .iter()
                    .enumerate()
                    .map(|(k, f)| (h.midpoint(k), f / w))
                    .collect(),
                dashed: false,
            }
        })
        .collect();
    series.push(Series {
        label: "P0".into(),
        points: grid.iter().map(|&r| (r, p0(r))).collect(),
        dashed: true,
    });
    series.push(Series {
        label: "P1".into(),
        points: grid.iter().map(|&r| (r, p1(r))).collect(),
        dashed: true,
    });
    Plot {
        title: format!("ratio distribution, {label}"),
        x_label: "r".into(),
        y_label: "P(r)".into(),
        log_x: false,
        series,
        h_lines: Vec::new(),
    }
}

/// Runs the experiment and returns its artifacts (nothing is written).
pub fn run(spec: &RunSpec) -> Result<Artifacts> {
    spec.validate()?;
    let mut art = Artifacts::new(spec.config_hash());
    match spec.experiment {
        Experiment::SingleSweep => single_sweep(spec, &mut art)?,
        Experiment::DisorderScan => run_disorder_scan(spec, &mut art)?,
        Experiment::EtaScan => run_eta_scan(spec, &mut art)?,
        Experiment::CrComparison => run_cr(spec, &mut art)?,
        Experiment::ThreeSite => three_site(spec, &mut art)?,
        Experiment::FigurePreset => bail!("figure presets must be expanded before running"),
    }
    Ok(art)
}

fn single_sweep(spec: &RunSpec, art: &mut Artifacts) -> Result<()> {
    let grid = spec.grid.as_ref().context("missing grid")?;
    let mut curves = Vec::new();
    let mut crossings = std::collections::BTreeMap::new();
    for entry in &spec.models {
        log::info!("sweeping model {}", entry.label);
        let curve = run_sweep(&sweep_config(spec, entry, grid)?).with_context(|| format!("model {}", entry.label))?;
        art.add_sweep_csv(format!("sweep_{}.csv", entry.label), &curve)?;
        if spec.output.histograms {
            for (k, p) in curve.points.iter().enumerate() {
                art.add_histogram_csv(format!("hist_{}_{k:03}.csv", entry.label), &p.histogram)?;
            }
            let svg = histogram_plot(&entry.label, &curve).render(&art.hash);
            art.add(format!("hist_{}.svg", entry.label), svg.into_bytes());
        }
        crossings.insert(entry.label.clone(), CrossingResult::from_curve(&curve));
        curves.push((entry.label.clone(), curve, !entry.kind.is_array()));
    }
    art.add_json("crossings.json", "crossings", &crossings)?;
    let refs: Vec<_> = curves.iter().map(|(l, c, d)| (l.clone(), c, *d)).collect();
    let svg = rbar_plot("mean spacing ratio", &refs).render(&art.hash);
    art.add("rbar.svg", svg.into_bytes());
    Ok(())
}

fn scan_grids(spec: &RunSpec, n: usize) -> Result<Vec<Vec<f64>>> {
    let scan = spec.scan.as_ref().context("missing scan")?;
    match &scan.grids {
        Some(g) => g.iter().map(GridSpec::points).collect(),
        None => {
            let g = spec.grid.as_ref().context("missing grid")?.points()?;
            Ok(vec![g; n])
        }
    }
}

fn run_disorder_scan(spec: &RunSpec, art: &mut Artifacts) -> Result<()> {
    let scan = spec.scan.as_ref().context("missing scan")?;
    let grids = scan_grids(spec, scan.sigmas.len())?;
    let points: Vec<SigmaPoint> = scan
        .sigmas
        .iter()
        .zip(grids)
        .map(|(&sigma, grid)| SigmaPoint { sigma, grid })
        .collect();
    let base = sweep_config(
        spec,
        &spec.models[0],
        spec.grid
            .as_ref()
            .unwrap_or(&GridSpec::values(vec![1.0], GridVariable::J)),
    )?;
    let (fu, fa) = (&spec.models[0], &spec.models[1]);
    let result = disorder_scan(&base, bh_model(fu), bh_model(fa), &points, scan.method)?;
    let fitted = result.fitted_relative_increase.clone();
    let rows: Vec<Vec<String>> = result
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            vec![
                num(r.sigma),
                num(r.uniform.j_c),
                num(r.alternating.j_c),
                num(r.relative_increase),
                num(fitted.as_ref().map_or(f64::NAN, |f| f[i])),
            ]
        })
        .collect();
    art.add_csv(
        "disorder_scan.csv",
        &[
            "sigma",
            "jc_uniform",
            "jc_alternating",
            "relative_increase",
            "fitted_relative_increase",
        ],
        &rows,
    )?;
    art.add_json("disorder_scan.json", "disorder_scan", &result)?;
    let mut refs = Vec::new();
    for (i, (cu, ca)) in result.curves.iter().enumerate() {
        art.add_sweep_csv(format!("sweep_{}_{i:02}.csv", fu.label), cu)?;
        art.add_sweep_csv(format!("sweep_{}_{i:02}.csv", fa.label), ca)?;
        refs.push((format!("{} s={}", fu.label, points[i].sigma), cu, false));
        refs.push((format!("{} s={}", fa.label, points[i].sigma), ca, true));
    }
    art.add(
        "rbar.svg",
        rbar_plot("mean spacing ratio", &refs).render(&art.hash).into_bytes(),
    );
    if result.rows.len() > 1 {
        let plot = Plot {
            title: "relative crossing shift".into(),
            x_label: "disorder strength".into(),
            y_label: "(J_C^A - J_C^F) / J_C^F".into(),
            log_x: false,
            series: std::iter::once(Series {
                label: "pointwise".into(),
                points: result.rows.iter().map(|r| (r.sigma, r.relative_increase)).collect(),
                dashed: true,
            })
            .chain(fitted.map(|f| Series {
                label: "quadratic fits".into(),
                points: result.rows.iter().zip(f).map(|(r, y)| (r.sigma, y)).collect(),
                dashed: false,
            }))
            .collect(),
            h_lines: vec![0.0],
        };
        art.add("disorder_scan.svg", plot.render(&art.hash).into_bytes());
    }
    Ok(())
}

fn run_eta_scan(spec: &RunSpec, art: &mut Artifacts) -> Result<()> {
    let scan = spec.scan.as_ref().context("missing scan")?;
    let grids = scan_grids(spec, scan.etas.len())?;
    let points: Vec<EtaPoint> = scan
        .etas
        .iter()
        .zip(grids)
        .map(|(&eta, grid)| EtaPoint { eta, grid })
        .collect();
    let entry = &spec.models[0];
    let base = sweep_config(
        spec,
        entry,
        spec.grid
            .as_ref()
            .unwrap_or(&GridSpec::values(vec![1.0], GridVariable::J)),
    )?;
    let result = eta_scan(&base, entry.u, &points, scan.method)?;
    let rows: Vec<Vec<String>> = result.rows.iter().map(|(eta, c)| vec![num(*eta), num(c.j_c)]).collect();
    art.add_csv("eta_scan.csv", &["eta", "jc_alternating"], &rows)?;
    art.add_json("eta_scan.json", "eta_scan", &result)?;
    for (i, c) in result.curves.iter().enumerate() {
        art.add_sweep_csv(format!("sweep_{}_{i:02}.csv", entry.label), c)?;
    }
    let plot = Plot {
        title: "alternating crossing vs eta".into(),
        x_label: "eta".into(),
        y_label: "J_C".into(),
        log_x: false,
        series: vec![
            Series {
                label: "J_C".into(),
                points: result.rows.iter().map(|(e, c)| (*e, c.j_c)).collect(),
                dashed: false,
            },
            Series {
                label: "linear fit".into(),
                points: result
                    .rows
                    .iter()
                    .map(|(e, _)| (*e, result.intercept + result.slope * e))
                    .collect(),
                dashed: true,
            },
        ],
        h_lines: Vec::new(),
    };
    art.add("eta_scan.svg", plot.render(&art.hash).into_bytes());
    Ok(())
}

fn run_cr(spec: &RunSpec, art: &mut Artifacts) -> Result<()> {
    let entry = &spec.models[0];
    let base = sweep_config(spec, entry, spec.grid.as_ref().context("missing grid")?)?;
    let result = cr_comparison(&base, entry.omega_mean)?;
    art.add_sweep_csv(format!("sweep_{}-rwa.csv", entry.label), &result.rwa)?;
    art.add_sweep_csv(format!("sweep_{}-cr.csv", entry.label), &result.cr)?;
    #[derive(serde::Serialize)]
    struct Summary {
        max_abs_rbar_difference: f64,
        rwa: CrossingResult,
        cr: CrossingResult,
    }
    art.add_json(
        "cr_comparison.json",
        "cr_comparison",
        &Summary {
            max_abs_rbar_difference: result.max_abs_rbar_difference,
            rwa: CrossingResult::from_curve(&result.rwa),
            cr: CrossingResult::from_curve(&result.cr),
        },
    )?;
    let refs = vec![
        (format!("{} with CR", entry.label), &result.cr, false),
        (format!("{} without CR", entry.label), &result.rwa, true),
    ];
    art.add(
        "rbar.svg",
        rbar_plot("counter-rotating comparison", &refs)
            .render(&art.hash)
            .into_bytes(),
    );
    Ok(())
}

fn three_site(spec: &RunSpec, art: &mut Artifacts) -> Result<()> {
    let t = spec.three_site.as_ref().context("missing three_site table")?;
    let base = ThreeSiteParams::new(t.u, -t.u, t.delta_omega, t.j)?;
    let rows: Vec<Vec<String>> = t
        .etas
        .iter()
        .map(|&eta| {
            let p = base.with_eta(eta);
            vec![
                num(eta),
                num(analytic_splitting(&p).unwrap_or(f64::NAN)),
                num(numeric_splitting(&p).unwrap_or(f64::NAN)),
            ]
        })
        .collect();
    art.add_csv("three_site.csv", &["eta", "delta_e_analytic", "delta_e_numeric"], &rows)?;
    Ok(())
}
