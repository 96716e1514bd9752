//! Two-stage channel estimation: beam-scan angle spectra with peak
//! detection, then path gains by coherent combining or analog zero forcing.

pub mod bounds;
pub mod gains;
pub mod peaks;
pub mod pilots;
pub mod pipeline;
pub mod spectrum;

pub use bounds::{cc_error_bound, contamination_level, Contamination};
pub use gains::{gain_cc, gain_zf, predicted_error_ratio};
pub use peaks::{detect_peaks, local_maxima, DetectMode, Peak, PeakClass};
pub use pilots::{make_pilots, orthogonal_pilots, PilotBook};
pub use pipeline::{
    decision_feedback_interference_aoa, despread, estimate_channel, normalized_streams, transmit_training,
    ChannelEstimate, EstimatorOptions, GainMethod, PathClass, PathEstimate,
};
pub use spectrum::{aoa_spectrum, aoa_spectrum_direct, average_spectra, AoaSpectrum, Scanner};
