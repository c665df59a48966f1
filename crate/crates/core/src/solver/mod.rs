//! Construction of lambda-hypersurfaces and searches for minimizers.

pub mod flow;
pub mod ode;
pub mod scan;
pub mod shoot;

pub use flow::{mcf_minimize, FlowOptions, FlowResult, FlowShape, FlowState, FlowStatus, TRAJECTORY_HEADER};
pub use ode::{integrate, OdeOptions, Solution};
pub use scan::{cylinder_scan, ScanRow, SCAN_RESOLUTION};
pub use shoot::{find_closed_curve, shoot_curve, Arc, ClosedCurve, ClosedCurveOptions, OdeOptionsSer, ShootState};
