//! The hammer: premise selection, resolution saturation, and certificate
//! extraction/replay.

pub mod certificate;
pub mod clause;
pub mod clausify;
pub mod run;
pub mod saturate;
pub mod select;
