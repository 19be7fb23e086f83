//! Hyper-evidential classification on grouped Dirichlet distributions.
//!
//! The library covers the whole pipeline for learning from data whose
//! labels may be *composite* (the true class is one of a listed set):
//!
//! * [`special_fn`] — log-gamma, digamma, trigamma, multivariate log-beta;
//! * [`hyperdomain`] — the class domain, its partition into groups, and
//!   binary label vectors;
//! * [`opinion`] — hyper-opinions over focal-set families and the three
//!   evidential uncertainty measures (vacuity, vagueness, dissonance);
//! * [`gdd`] — the grouped Dirichlet distribution with closed-form
//!   normalizer, moments, entropy, KL divergence, and exact sampling;
//! * [`loss`] — the expected partial cross-entropy objective, the masked
//!   KL regularizer (plus alternative modes), and analytic gradients;
//! * [`net`] — a small evidence network with a softplus head, analytic
//!   backpropagation, Adam, and the training loop;
//! * [`data`] — synthetic composite-label datasets and JSONL I/O;
//! * [`eval`] — Jaccard set metrics, projected accuracy, and AUROC;
//! * [`oracle`] — Monte-Carlo, finite-difference, and quadrature
//!   verification of every analytic formula, plus a runnable check suite.

pub mod data;
pub mod error;
pub mod eval;
pub mod gdd;
pub mod hyperdomain;
pub mod loss;
pub mod net;
pub mod opinion;
pub mod oracle;
pub mod special_fn;
pub mod util;

pub use error::{Error, Result};
