//! Deductions, arguments, attacks and labellings over a PD framework.

mod aa;
mod argument;
mod deduction;
mod labelling;

pub use aa::{aa_to_pd, label_aa};
pub use argument::{argument_probability, compute_attacks, enumerate_arguments, Argument, Attack};
pub use deduction::{build_global_pcwa, enumerate_maximal_deductions, Deduction, DeductionNode, NodeLabel};
pub use labelling::{legal_label, probabilistic_labelling, verify_complete_labelling, Label, Labelling};
