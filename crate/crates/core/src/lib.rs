pub mod category;
pub mod dr;
pub mod geometry;
pub mod hpt;
pub mod products;
pub mod scalar;
pub mod step;
pub mod trees;
pub mod verify;
