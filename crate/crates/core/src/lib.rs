//! Numerical tools for holomorphic curves in complex projective space:
//! Fubini–Study energy densities, Nevanlinna characteristic functions,
//! Brody sup-norm estimates, discretisation into shift-space points and
//! box-cover computations of widim and mean dimension.

pub mod brody;
pub mod curves;
pub mod discretize;
pub mod error;
pub mod nevanlinna;
pub mod projgeom;
pub mod widim;

pub use curves::{
    eval_chart, eval_jet, lattice_points_in_disk, lattice_sum_tail_bound, rescale, ChartData,
    CoefficientPattern, CurveFamily, ExpTerm, FeatureScale, Lattice, LatticeFamily,
    LatticeFamilySpec, LatticePoint, Reparam, WeierstrassCurve,
};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use projgeom::{
    chordal_distance, energy_density, energy_density_fd, normalize, ProjectiveJet, ProjectivePoint,
};
