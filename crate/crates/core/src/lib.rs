//! Finite models of inductive limits of C*-algebras over posets.
//!
//! A poset splits into its maximal upward-directed subsets (its components);
//! the components are indexed and the index set carries the topology generated
//! by `U_a = {i : a ∈ K_i}`. On top of that sit finite-dimensional algebra
//! models, inductive systems over finite posets, and the product system built
//! from the component colimits.

pub mod algebra;
pub mod central;
pub mod dot;
pub mod families;
pub mod poset;
pub mod product;
pub mod random;
pub mod report;
pub mod symbolic;
pub mod system;
pub mod topology;

pub use algebra::{
    compose, direct_product, make_morphism, op_norm, realize, AlgebraError, ConcreteElement, ConcreteHom, FdAlgebra,
    MultiplicityMorphism, ScalarFunctionElement,
};
pub use central::{central_projection_pair, CentralOutcome, ProjectionPair};
pub use families::{FamilyError, FamilyKind, FamilyPoint, FamilySpec, FamilyWindow, WindowBounds};
pub use poset::{DirectedComponent, Element, FinitePoset, PosetDocument, PosetError, Subset};
pub use product::{GlobalProducts, ProductSystem, StageNorm};
pub use report::{CheckReport, Status};
pub use symbolic::{SymbolicIndex, SymbolicNbhd, Q};
pub use system::{Colimit, InductiveSystem, SystemDocument, SystemError, ThetaAction};
pub use topology::{IndexSet, IndexSpace, TopologyError};
