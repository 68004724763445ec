//! Discrete fundamental groups of finite metric spaces across a scale
//! filtration, with decision procedures for the closeness relations on the
//! universal-cover set (Berestovskii-Plaut, lasso, James) and small-loop
//! transfer checkers.
//!
//! The pipeline: a finite metric space yields an ε-graph per scale; based
//! ε-chains have homotopy classes in spanning-tree normal form; the ε-chain
//! fundamental group gets a triangle-relator presentation; coset enumeration,
//! Stallings foldings, and abelianized lattice checks decide membership
//! questions; the structure relations and transfer checkers sit on top.

pub mod chains;
pub mod engine;
pub mod error;
pub mod metric;
pub mod pi1;
pub mod spaces;
pub mod structures;
pub mod word;

pub use chains::{apply_move, concat, is_bounded, is_chain, reverse, Chain, HomotopyMove};
pub use engine::{
    abelianization, abelianized_exponent_check, in_normal_closure, is_in_subgroup, normal_core,
    todd_coxeter, CosetTable, Verdict, DEFAULT_COSET_CAP,
};
pub use error::{Error, Result};
pub use metric::{
    critical_scales, entourage_graph, load_space, load_space_csv, pc_components, pu_derivative,
    pu_entourage, EntourageRelation, MetricSpace, PartitionOfUnity, Scale,
};
pub use pi1::{chain_class, presentation, scale_map, simplify, ChainClass, Presentation};
pub use spaces::{
    circle, hawaiian, hawaiian_bouquet, hawaiian_retraction, map_pi1, random_cloud, torus_grid,
    wedge_circles, ShortMap, SpaceRecipe,
};
pub use structures::{
    ball_subgroup, bp_close, james_close, lasso_close, punctured_homotopy_search,
    semilocal_simply_connected, slt_check, small_loop_subgroup, BallSubgroup, RelationContext,
    RelationKind, SltMode, SltReport, StructureVerdict, Witness,
};
pub use word::Word;
