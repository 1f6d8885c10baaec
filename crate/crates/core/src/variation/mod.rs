//! First and second variations of area along paths of symplectic forms,
//! their finite-difference oracle, the general-metric variation, and the
//! destabilizer search.

mod appendix;
mod check;
mod destabilize;
mod formulas;
mod oracle;
mod path;
mod report;
mod sample;

pub use appendix::{
    appendix_destabilizers, general_first_variation, general_first_variation_values,
    general_variation_oracle, moved_area, FourierVariation, MeanCurvatureVariation,
    MetricDestabilizers, ScaledMetric, SurfaceVectorField, TensorField, ZeroTensor, ZeroVariation,
};
pub use check::{
    check_path, first_variation_tolerance, second_variation_tolerance, PathCheck, PointwiseCheck,
};
pub use destabilize::{
    destabilize, Certificate, Destabilization, DestabilizeSettings, KillingNormalizationSummary,
    DISTANCE_SQUARED, KILLING, SADDLE,
};
pub use formulas::{
    d1_d2, d1_d2_in, d1_raw, d2_decomposed, d2_raw, first_variation, first_variation_density,
    first_variation_expanded, second_variation, D2Decomposition, SecondVariation,
};
pub use oracle::{
    area_at, area_path_oracle, area_samples, t_max, taming_margin_at, OracleResult, OracleSettings,
};
pub use path::{lie_derivative_of_omega, PathMode, VariationPath};
pub use report::{angle_csv, ErrorRecord, VariationReport};
pub use sample::{random_isotopy, random_path, random_symmetry};
