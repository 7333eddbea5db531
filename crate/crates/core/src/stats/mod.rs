//! Spectral-ratio statistics, reference distributions and random-matrix
//! samplers used as independent oracles.

mod distributions;
mod ensembles;
mod ratios;

pub use distributions::{ginue_mean_spacing, ginue_pdf, ginue_pdf_rescaled, ginue_pdf_truncated, poisson2d_pdf};
pub use ensembles::{
    ginibre_ratio_statistics, sample_coe_phases, sample_ginibre_spectrum, sample_poisson2d, sample_uniform_phases,
    GINIBRE_BULK_FRACTION,
};
pub use ratios::{
    complex_spacing_ratios, normalized_real_ratio, ratio_statistics, real_spacing_ratios, NeighborSearch, RatioSample,
    RatioSet, RatioStatistics, MIN_SAMPLES_FOR_NORMALIZED, MERGE_DISTANCE,
};

/// Reference averages every normalized metric is anchored to.
pub mod constants {
    /// Bumped whenever a value below changes; embedded in output provenance.
    pub const TABLE_VERSION: u32 = 1;

    /// `<r>` for uncorrelated points in the plane.
    pub const MEAN_R_POISSON_2D: f64 = 2.0 / 3.0;
    /// `-<cos θ>` for uncorrelated points in the plane.
    pub const NEG_COS_POISSON_2D: f64 = 0.0;
    pub const MEAN_R_GINUE: f64 = 0.74;
    pub const NEG_COS_GINUE: f64 = 0.24;
    /// Real-spectrum `<r>` for Poisson levels.
    pub const MEAN_R_POISSON: f64 = 0.386;
    pub const MEAN_R_COE: f64 = 0.536;
    /// First moment of the unscaled GinUE nearest-neighbour spacing density.
    pub const GINUE_MEAN_SPACING: f64 = 1.1429;

    /// `(name, value)` pairs in table order.
    pub const TABLE: [(&str, f64); 7] = [
        ("mean_r_poisson_2d", MEAN_R_POISSON_2D),
        ("neg_cos_poisson_2d", NEG_COS_POISSON_2D),
        ("mean_r_ginue", MEAN_R_GINUE),
        ("neg_cos_ginue", NEG_COS_GINUE),
        ("mean_r_poisson", MEAN_R_POISSON),
        ("mean_r_coe", MEAN_R_COE),
        ("ginue_mean_spacing", GINUE_MEAN_SPACING),
    ];
}
