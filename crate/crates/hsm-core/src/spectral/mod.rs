//! Influence matrices, self-avoiding-walk trees, the simplicial-complex
//! view of clique covers, and numeric verification of the structural
//! inequalities relating them.
//!
//! Everything here is exact (enumeration-based) diagnostics for desk-scale
//! instances: the point is to confirm identities and eigenvalue bounds
//! numerically, not to scale.

mod bounds;
mod cdc;
mod complex;
mod influence;
mod saw;

pub use bounds::{
    disjointify_cover, max_real_eigenvalue, spectral_radius, spectral_radius_bound_check,
    verify_clique_block_comparison, verify_spectral_bounds, ComparisonReport, RadiusCheck,
    SpectralBoundsReport, SubsetEigenBound,
};
pub use cdc::{
    cdc_implies_influence_bound_check, check_strict_cdc, CdcCertificate, CdcCheck,
    CdcCounterexample, CdcImplicationReport,
};
pub use complex::{
    clique_influence_matrix, clique_influence_of, complex_representation, local_expansion_profile,
    skeleton_walk_matrix, two_step_walk_matrix, CliqueInfluenceMatrix, ComplexRep, Element,
    LocalExpansionProfile, SkeletonWalk, COMPLEX_FACE_CAP,
};
pub use influence::{
    check_influence_condition, pairwise_influence, ConditionCheck, ConditionCounterexample,
    InfluenceBoundCertificate, InfluenceMatrix, SubsetPolicy, CONDITION_TOL,
};
pub use saw::{
    influence_decay_check, saw_tree, verify_saw_influence, verify_tree_multiplicativity,
    DecayReport, MultiplicativityReport, NodeStatus, SawNode, SawReport, SawTree, SAW_TREE_CAP,
};
