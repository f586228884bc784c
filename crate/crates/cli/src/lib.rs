//! Scene files, check orchestration and report rendering for `lnlab`.

pub mod catalog;
pub mod render;
pub mod run;
pub mod scene;

pub use render::{render, Format};
pub use run::{run, Report, RunOptions, Status};
pub use scene::{parse_scene, Scene, SceneError};
