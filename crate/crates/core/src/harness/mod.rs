pub mod regress;
pub mod experiment;
