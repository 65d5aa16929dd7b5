//! Lagrangian computation of robust reach-avoid sets for discrete-time linear
//! systems, and their use as guaranteed underapproximations of stochastic
//! reach-avoid level sets under Gaussian disturbances.

pub mod cli;
pub mod dpgrid;
pub mod geom;
pub mod io;
pub mod lagrangian;
pub mod mcsim;
pub mod prob;
pub mod systems;
