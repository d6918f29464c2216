mod lasso;
mod rip;
pub mod theory;

pub use lasso::{
    alpha_for_residual, alpha_sweep, default_alpha_grid, lasso_cd, log_grid, reconstruct_signal, reconstruct_with,
    AlphaSweep, LassoConfig, ReconstructionResult, SweepEntry, DEFAULT_MAX_ITERS, DEFAULT_TOL,
};
pub use rip::{rip_constant_bruteforce, MAX_COLUMNS, MAX_SPARSITY};
pub use theory::{
    b_rms, dct_envelope_bound, l1_tail_powerlaw, required_timesteps, shot_ratio_approx, shot_ratio_exact,
    split_failure, TheoryParams,
};
