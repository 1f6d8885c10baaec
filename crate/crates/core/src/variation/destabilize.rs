//! Constructive destabilization of non-holomorphic surfaces.

use std::sync::Arc;

use serde::Serialize;

use crate::ambient::FubiniStudy;
use crate::error::{Error, Result};
use crate::immersion::SurfaceGrid;
use crate::potential::{
    distance_squared_jet, killing_from_matrix, lemma62_killing, normal_extension_jet,
    KillingNormalization, VectorField,
};

use super::check::{check_path, PathCheck, PointwiseCheck};
use super::formulas::d1_d2;
use super::oracle::OracleSettings;
use super::path::VariationPath;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Certificate {
    Holomorphic,
    Destabilized,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DestabilizeSettings {
    pub oracle: OracleSettings,
    /// Surfaces with `max sin α` at or below this are holomorphic.
    pub holomorphic_tolerance: f64,
    /// A variation counts only when it exceeds its noise floor by this factor.
    pub evidence_factor: f64,
}

impl Default for DestabilizeSettings {
    fn default() -> Self {
        DestabilizeSettings {
            oracle: OracleSettings::default(),
            holomorphic_tolerance: 1e-6,
            evidence_factor: 10.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct KillingNormalizationSummary {
    pub pairing_unscaled: f64,
    pub grad_norm_sq_unscaled: f64,
    pub scale: f64,
    pub pairing: f64,
    pub grad_norm: f64,
    pub killing_residual: f64,
}

impl From<&KillingNormalization> for KillingNormalizationSummary {
    fn from(l: &KillingNormalization) -> Self {
        KillingNormalizationSummary {
            pairing_unscaled: l.pairing_unscaled,
            grad_norm_sq_unscaled: l.grad_norm_sq_unscaled,
            scale: l.scale,
            pairing: l.pairing,
            grad_norm: l.grad_norm,
            killing_residual: l.killing_residual,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Destabilization {
    pub certificate: Certificate,
    pub max_sin_alpha: f64,
    /// First node (row-major) attaining `max sin α`.
    pub q: usize,
    pub paths: Vec<PathCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub killing_normalization: Option<KillingNormalizationSummary>,
}

impl Destabilization {
    pub fn consistent(&self) -> bool {
        self.paths.iter().all(|p| p.consistent)
    }

    pub fn path(&self, label: &str) -> Option<&PathCheck> {
        self.paths.iter().find(|p| p.label == label)
    }
}

pub const DISTANCE_SQUARED: &str = "distance-squared";
pub const SADDLE: &str = "saddle-normal-extension";
pub const KILLING: &str = "lemma62-killing";

/// Try the distance-squared potential, the saddle normal extension at the
/// point of largest Kähler angle, and in `CP^N` the Killing potential built
/// at that point.
pub fn destabilize(grid: &SurfaceGrid, settings: &DestabilizeSettings) -> Result<Destabilization> {
    let (q, max_sin) = grid.max_sin_alpha();
    if max_sin <= settings.holomorphic_tolerance {
        return Ok(Destabilization {
            certificate: Certificate::Holomorphic,
            max_sin_alpha: max_sin,
            q,
            paths: vec![],
            killing_normalization: None,
        });
    }
    let node = grid.node(q);
    let sin_q = node.sin_alpha();
    let mut paths = Vec::new();

    let dist = VariationPath::linear_potential(grid, &distance_squared_jet(grid));
    paths.push(check_path(grid, DISTANCE_SQUARED, &dist, &settings.oracle)?);

    let saddle = grid.periodic_saddle(q)?;
    let jets = grid.function_jets(&saddle);
    let saddle_path = VariationPath::linear_potential(grid, &normal_extension_jet(grid, &jets)?);
    let mut check = check_path(grid, SADDLE, &saddle_path, &settings.oracle)?;
    let (d1, d2) = d1_d2(grid, q, &saddle_path.first[q]);
    check.pointwise = Some(PointwiseCheck {
        node: q,
        sin_alpha: sin_q,
        d1,
        d2,
        expected_d2: 4.0 * sin_q * sin_q,
    });
    paths.push(check);

    let mut killing_normalization = None;
    if let Some(n) = grid
        .model()
        .id()
        .strip_prefix("cp")
        .and_then(|s| s.parse::<usize>().ok())
    {
        let fs = FubiniStudy::new(n)?;
        match lemma62_killing(&fs, node, 1.0, &[]) {
            Ok(l) => {
                let v = killing_from_matrix(&l.spec, &fs)?;
                let w: Arc<dyn VectorField> = Arc::new(v.j_rotated());
                let path = VariationPath::killing_flow(grid, w)?;
                let mut check = check_path(grid, KILLING, &path, &settings.oracle)?;
                let (d1, d2) = d1_d2(grid, q, &path.first[q]);
                check.pointwise = Some(PointwiseCheck {
                    node: q,
                    sin_alpha: sin_q,
                    d1,
                    d2,
                    expected_d2: -2.0 * sin_q * l.pairing,
                });
                paths.push(check);
                killing_normalization = Some(KillingNormalizationSummary::from(&l));
            }
            Err(Error::DegenerateFrame { .. }) => {}
            Err(e) => return Err(e),
        }
    }

    let f = settings.evidence_factor;
    let destabilized = paths.iter().any(|p| match p.label.as_str() {
        DISTANCE_SQUARED => p.first_order_evidence(f) && p.a_prime > 0.0,
        _ => p.second_order_evidence(f),
    });
    Ok(Destabilization {
        certificate: if destabilized {
            Certificate::Destabilized
        } else {
            Certificate::Inconclusive
        },
        max_sin_alpha: max_sin,
        q,
        paths,
        killing_normalization,
    })
}
