//! Objective, hand-written gradients, optimizer and training loop.

mod adam;
mod backward;
mod checkpoint;
mod ddouble;
mod gradcheck;
mod loss;
mod trainer;

pub use adam::{adam_step, OptimizerState};
pub use backward::{backward, Gradients};
pub use checkpoint::Checkpoint;
pub use gradcheck::{
    compare_gradients, grad_check, numeric_gradients, relative_error, GradCheckConfig,
    GradCheckReport, GroupCheck,
};
pub use loss::{
    elbo_loss, kl_divergence, next_item_loss, recon_log_likelihood, split_target, total_loss,
    LossBreakdown, LossWeights,
};
pub use trainer::{
    kl_weight, model_config, read_loss_csv, train, train_model, write_loss_csv, EpochLog,
    TrainOutcome,
};
