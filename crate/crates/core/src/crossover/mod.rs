//! Disorder-averaged sweeps and the localized-to-chaotic crossing points
//! extracted from them.

mod crossing;
mod disorder;
mod scans;
mod sweep;

pub use crossing::{
    crossing, crossing_beta, crossing_kl, crossing_rbar, first_crossing, Crossing, CrossingMethod, CrossingResult,
    BETA_THRESHOLD,
};
pub use disorder::{Disorder, DisorderSpec};
pub use scans::{
    cr_comparison, disorder_scan, eta_scan, CrComparison, DisorderRow, DisorderScan, EtaPoint, EtaScan, SigmaPoint,
};
pub use sweep::{
    run_sweep, select_sector, AnalysisOptions, ArrayHamiltonian, BoseHubbardModel, ModelSpec, QubitArrayModel,
    SweepConfig, SweepCurve, SweepPoint,
};

/// `n` log-spaced points per decade from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let n = ((hi / lo).log10() * per_decade as f64).round() as usize;
    (0..=n).map(|k| lo * 10f64.powf(k as f64 / per_decade as f64)).collect()
}
