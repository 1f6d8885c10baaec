//! The experiments behind each subcommand.

use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ambient::FubiniStudy;
use crate::error::{Error, Result};
use crate::immersion::SurfaceGrid;
use crate::potential::{
    analytic_potential_jet, covariant_derivative, d2_hat_covariant, distance_squared_jet,
    killing_from_matrix, killing_two_form, lemma62_killing, normal_extension_jet, random_potential,
    PotentialJet, VectorField,
};
use crate::variation::{
    angle_csv, area_samples, check_path, d1_d2, destabilize, first_variation,
    first_variation_expanded, random_isotopy, random_symmetry, Certificate, DestabilizeSettings,
    PathMode, VariationPath, VariationReport,
};

use super::config::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Angle,
    FirstVariation,
    SecondVariation,
    Destabilize,
    KillingCheck,
    Invariance,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Angle => "angle",
            Command::FirstVariation => "first-variation",
            Command::SecondVariation => "second-variation",
            Command::Destabilize => "destabilize",
            Command::KillingCheck => "killing-check",
            Command::Invariance => "invariance",
        }
    }

    pub const ALL: [Command; 6] = [
        Command::Angle,
        Command::FirstVariation,
        Command::SecondVariation,
        Command::Destabilize,
        Command::KillingCheck,
        Command::Invariance,
    ];

    pub fn parse(s: &str) -> Option<Self> {
        Command::ALL.into_iter().find(|c| c.name() == s)
    }
}

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    Inconclusive = 1,
    ConfigError = 2,
    Inconsistent = 3,
}

/// Exit status for an error raised while running an experiment.
pub fn status_of(e: &Error) -> Status {
    match e {
        Error::Config(_) | Error::UnknownId(_) | Error::InvalidInput(_) => Status::ConfigError,
        _ => Status::Inconsistent,
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub report: VariationReport,
    /// `(file name, contents)` of CSV tables to write next to the report.
    pub tables: Vec<(String, String)>,
    /// Wall-clock seconds per stage, in execution order.
    pub timings: Vec<(String, f64)>,
    pub status: Status,
}

struct Timer(Vec<(String, f64)>);

impl Timer {
    fn time<T>(&mut self, label: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.0
            .push((label.to_string(), start.elapsed().as_secs_f64()));
        out
    }
}

/// Absolute tolerance for the Killing-potential constants.
pub const KILLING_CONSTANT_TOLERANCE: f64 = 1e-8;
/// Bound on `|L_V ḡ|` for the constructed field.
pub const KILLING_RESIDUAL_TOLERANCE: f64 = 1e-6;
/// Relative bound on `|A'(0)|` for holomorphic surfaces.
pub const INVARIANCE_TOLERANCE: f64 = 1e-6;
/// Bound on `|A(t) − A(0)|` along flow pullbacks of holomorphic surfaces.
pub const DRIFT_TOLERANCE: f64 = 1e-7;

pub fn execute(command: Command, sc: &Scenario) -> Result<Outcome> {
    let mut timer = Timer(Vec::new());
    let grid = timer.time("grid", || {
        SurfaceGrid::build_with(
            sc.model.clone(),
            sc.surface.clone(),
            sc.resolution,
            sc.connection,
        )
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(sc.config.seed);
    let mut report = VariationReport::new(&grid);
    let mut tables = Vec::new();
    let q = match sc.config.node {
        Some(q) if q >= grid.len() => {
            return Err(Error::Config(format!(
                "node {q} outside a grid of {} nodes",
                grid.len()
            )))
        }
        Some(q) => q,
        None => grid.max_sin_alpha().0,
    };
    let mut status = Status::Success;

    match command {
        Command::Angle => {
            tables.push(("angle.csv".to_string(), angle_csv(&grid)));
        }
        Command::FirstVariation | Command::SecondVariation => {
            let (path, psi) = timer.time("path", || build_path(sc, &grid, q, &mut rng))?;
            let check = timer.time("variation", || {
                check_path(&grid, sc.mode.name(), &path, &sc.oracle)
            })?;
            if let Some(psi) = psi {
                let e = timer.time("expanded", || first_variation_expanded(&grid, &psi));
                report.values.insert("Aprime_expanded".into(), e);
            }
            let (d1, d2) = d1_d2(&grid, q, &path.first[q]);
            report.values.insert("node".into(), q as f64);
            report.values.insert("D1_node".into(), d1);
            report.values.insert("D2_node".into(), d2);
            report.push_path(check);
            tables.push(("nodes.csv".to_string(), report.nodes_csv(&grid)));
        }
        Command::Destabilize => {
            let settings = DestabilizeSettings {
                oracle: sc.oracle,
                ..DestabilizeSettings::default()
            };
            let d = timer.time("destabilize", || destabilize(&grid, &settings))?;
            if d.certificate == Certificate::Inconclusive {
                status = Status::Inconclusive;
            }
            report.set_destabilization(d);
            tables.push(("nodes.csv".to_string(), report.nodes_csv(&grid)));
        }
        Command::KillingCheck => {
            let passed = timer.time("killing", || killing_check(sc, &grid, q, &mut report))?;
            if !passed {
                report.consistent = false;
            }
        }
        Command::Invariance => {
            let passed = timer.time("invariance", || {
                invariance(sc, &grid, &mut rng, &mut report)
            })?;
            if !passed {
                report.consistent = false;
            }
        }
    }
    if !report.consistent {
        status = Status::Inconsistent;
    }
    Ok(Outcome {
        report,
        tables,
        timings: timer.0,
        status,
    })
}

fn potential_jet(
    sc: &Scenario,
    grid: &SurfaceGrid,
    q: usize,
    rng: &mut ChaCha8Rng,
) -> Result<PotentialJet> {
    Ok(match sc.config.potential.as_str() {
        "distance-squared" => distance_squared_jet(grid),
        "saddle" => {
            let saddle = grid.periodic_saddle(q)?;
            normal_extension_jet(grid, &grid.function_jets(&saddle))?
        }
        "zero" => PotentialJet::zero(grid),
        _ => analytic_potential_jet(&random_potential(grid.model().as_ref(), rng), grid),
    })
}

fn lemma62_field(sc: &Scenario, grid: &SurfaceGrid, q: usize) -> Result<Arc<dyn VectorField>> {
    let fs = fubini_study(grid)?;
    let l = lemma62_killing(&fs, grid.node(q), sc.config.killing_target, &[])?;
    Ok(Arc::new(killing_from_matrix(&l.spec, &fs)?.j_rotated()))
}

fn deformation_field(
    sc: &Scenario,
    grid: &SurfaceGrid,
    q: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Arc<dyn VectorField>> {
    match sc.config.field.as_str() {
        "lemma62" => lemma62_field(sc, grid, q),
        "isotopy" => Ok(Arc::new(random_isotopy(grid, rng))),
        _ => random_symmetry(grid, rng),
    }
}

fn build_path(
    sc: &Scenario,
    grid: &SurfaceGrid,
    q: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(VariationPath, Option<PotentialJet>)> {
    Ok(match sc.mode {
        PathMode::LinearPotential => {
            let psi = potential_jet(sc, grid, q, rng)?;
            (VariationPath::linear_potential(grid, &psi), Some(psi))
        }
        PathMode::GeneralPotential => {
            let psi = potential_jet(sc, grid, q, rng)?;
            let eta = analytic_potential_jet(&random_potential(grid.model().as_ref(), rng), grid);
            (
                VariationPath::general_potential(grid, &psi, &eta),
                Some(psi),
            )
        }
        PathMode::ExactOneForm => (
            VariationPath::exact_one_form(grid, &random_isotopy(grid, rng)),
            None,
        ),
        PathMode::KillingFlow => {
            let w = deformation_field(sc, grid, q, rng)?;
            (VariationPath::killing_flow(grid, w)?, None)
        }
        PathMode::FlowPullback => {
            let w = deformation_field(sc, grid, q, rng)?;
            (VariationPath::flow_pullback(grid, w)?, None)
        }
    })
}

fn fubini_study(grid: &SurfaceGrid) -> Result<FubiniStudy> {
    let id = grid.model().id();
    match id.strip_prefix("cp").and_then(|s| s.parse::<usize>().ok()) {
        Some(n) => FubiniStudy::new(n),
        None => Err(Error::Config(format!(
            "Killing potentials need a cp<N> ambient, not `{id}`"
        ))),
    }
}

fn killing_check(
    sc: &Scenario,
    grid: &SurfaceGrid,
    q: usize,
    report: &mut VariationReport,
) -> Result<bool> {
    let fs = fubini_study(grid)?;
    let step = (grid.len() / 8).max(1);
    let samples: Vec<_> = grid
        .nodes()
        .iter()
        .step_by(step)
        .map(|n| n.point.clone())
        .collect();
    let target = sc.config.killing_target;
    let node = grid.node(q);
    let l = lemma62_killing(&fs, node, target, &samples)?;
    let v = killing_from_matrix(&l.spec, &fs)?;
    let w = v.j_rotated();
    let forms = killing_two_form(grid, &w)?;
    let (d1, d2) = d1_d2(grid, q, &forms.forms[q]);
    let d2_hat = d2_hat_covariant(node, &covariant_derivative(&fs, &w, &node.point));
    let expected_unscaled = 0.5 * (1.0 + l.cos_alpha * l.cos_alpha);

    let tol = KILLING_CONSTANT_TOLERANCE;
    let checks = [
        (l.pairing - target).abs() <= tol * target.abs().max(1.0),
        (l.pairing_unscaled - expected_unscaled).abs() <= tol,
        (l.grad_norm_sq_unscaled - 0.5).abs() <= tol,
        l.killing_residual <= KILLING_RESIDUAL_TOLERANCE,
        (d2 - d2_hat).abs() <= tol,
    ];
    let v = &mut report.values;
    v.insert("node".into(), q as f64);
    v.insert("cos_alpha".into(), l.cos_alpha);
    v.insert("sin_alpha".into(), l.sin_alpha);
    v.insert("target".into(), target);
    v.insert("pairing".into(), l.pairing);
    v.insert("pairing_unscaled".into(), l.pairing_unscaled);
    v.insert("expected_pairing_unscaled".into(), expected_unscaled);
    v.insert("grad_norm_sq_unscaled".into(), l.grad_norm_sq_unscaled);
    v.insert("grad_norm".into(), l.grad_norm);
    v.insert("grad_norm_lower".into(), FRAC_1_SQRT_2);
    v.insert("grad_norm_upper".into(), std::f64::consts::SQRT_2);
    v.insert("scale".into(), l.scale);
    v.insert("killing_residual".into(), l.killing_residual);
    v.insert("lie_derivative_discrepancy".into(), forms.max_discrepancy);
    v.insert("D1_node".into(), d1);
    v.insert("D2_node".into(), d2);
    v.insert("D2_hat_node".into(), d2_hat);
    v.insert("expected_D2_node".into(), -2.0 * l.sin_alpha * l.pairing);
    v.insert("tolerance".into(), tol);
    Ok(checks.iter().all(|c| *c))
}

fn invariance(
    sc: &Scenario,
    grid: &SurfaceGrid,
    rng: &mut ChaCha8Rng,
    report: &mut VariationReport,
) -> Result<bool> {
    let area = grid.area();
    let mut max_first = 0.0_f64;
    for _ in 0..sc.config.invariance_count {
        let psi = analytic_potential_jet(&random_potential(grid.model().as_ref(), rng), grid);
        let a1 = first_variation(grid, &psi.ddc_forms(grid));
        max_first = max_first.max(a1.abs());
    }
    let ts: Vec<f64> = (-10..=10).map(|k| k as f64 * 0.01).collect();
    let mut max_drift = 0.0_f64;
    for w in [
        random_symmetry(grid, rng)?,
        Arc::new(random_isotopy(grid, rng)) as Arc<dyn VectorField>,
    ] {
        let path = VariationPath::flow_pullback(grid, w)?;
        let (samples, err) = area_samples(grid, &path, &ts);
        if let Some(e) = err {
            return Err(e);
        }
        for (_, a) in samples {
            max_drift = max_drift.max((a - area).abs());
        }
    }
    let holomorphic = report.max_sin_alpha <= DestabilizeSettings::default().holomorphic_tolerance;
    let v = &mut report.values;
    v.insert("count".into(), sc.config.invariance_count as f64);
    v.insert("max_abs_Aprime".into(), max_first);
    v.insert("max_abs_Aprime_over_area".into(), max_first / area);
    v.insert("tolerance_Aprime_over_area".into(), INVARIANCE_TOLERANCE);
    v.insert("max_flow_drift".into(), max_drift);
    v.insert("tolerance_flow_drift".into(), DRIFT_TOLERANCE);
    Ok(!holomorphic || (max_first <= INVARIANCE_TOLERANCE * area && max_drift <= DRIFT_TOLERANCE))
}
