//! Link scorers that provide the initial truth degree of ground atoms.

pub mod checkpoint;
pub mod model;
pub mod train;

pub use model::{sigmoid, EmbeddingModel, ModelError, ModelKind};
pub use train::{loss_and_grad, train, Example, Gradient, TrainConfig, TrainError};
