//! Shift spaces, sliding block codes and the extension of bi-closing codes.

pub mod closing;
pub mod code;
pub mod conjugacy;
pub mod degree;
pub mod labeled;
pub mod pipeline;
pub mod presentation;

pub use closing::{closing_profile, ClosingProfile, ClosingWitness, EventuallyPeriodic};
pub use code::{code_from_homomorphism, recode_one_block, CodeGraph, Recoding, SlidingBlockCode};
pub use conjugacy::{conjugacy_extension, ConjugacyExtension};
pub use degree::{point_degree, DegreeReport, DegreeStatus};
pub use labeled::{count_periodic_preimages, LabeledGraph};
pub use pipeline::{approximate_and_extend, extend_biclosing_code, ApproxExtension, Caps, CodeExtension};
pub use presentation::{markov_approximation, render_word, Presentation};
