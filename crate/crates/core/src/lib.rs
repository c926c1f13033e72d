//! Dihedral rotations of polygonal chains in 3D.
//!
//! * [`geom3`]: vectors, axis lines, cylindrical coordinates, rigid motions.
//! * [`chain`]: the chain model, eager rotation and simplicity checks.
//! * [`sweep`]: exact continuous collision checks for a single rotation.
//! * [`motiontree`]: unchecked rotations in logarithmic time.
//! * [`reduction`]: executable 3SUM reductions built on the above.

pub mod chain;
pub mod error;
pub mod geom3;
pub mod motiontree;
pub mod reduction;
pub mod sweep;

pub use chain::{segment_distance, Chain, ChainFile, EdgeRef, Segment, SplitResult};
pub use error::{Error, Result};
pub use geom3::{compose, rotate_about_axis, AxisLine, CylCoord, Point3, RigidMotion, Vec3};
pub use motiontree::MotionTree;
pub use sweep::{
    dihedral_feasible, dihedral_feasible_opts, dyn_rotate, dyn_rotate_opts, sweep_collision, CollisionEvent,
    DihedralQuery, DynOutcome, Feasibility, SweepOptions,
};
