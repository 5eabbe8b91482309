//! Grid-box covers of cubes, their minimum order, and Widim bounds for cube
//! shift spaces.

mod cover;
mod shift;

pub use cover::{
    cover_order, min_order_box_cover, min_order_box_cover_with, GridBox, GridBoxCover, GridCube,
    MinOrderResult, DEFAULT_NODE_GUARD, DEFAULT_REFINEMENT,
};
pub use shift::{
    box_window, dynamical_distance, mean_dim_normalize, widim_growth_scan, FiniteConfig,
    GrowthRow, GrowthScan, ShiftSystem, CROSS_CHECK_MAX_DIM,
};
