//! Mod-1 identity toolkit: a formal congruence algebra, the guarded identity
//! battery, a randomized exact verifier, and a worked rewrite trace.

mod identities;
mod terms;
mod trace;
mod verify;

pub use identities::{
    all_identity_names, id_frac_of_product, id_multiple, id_neg, id_pull_out,
    id_pull_out_2_corrupted, id_scale_frac, id_scale_int, id_split_sum, identity_by_name,
};
pub use terms::{Factor, GuardCond, GuardedSum, Identity, Operand, Side, Term, TermSum};
pub use trace::{apply_worked_example, RewriteTrace, TraceStep};
pub use verify::{verify_congruence, verify_gp_congruence, CongruenceReport, VerifyConfig};
