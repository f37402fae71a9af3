pub mod f2;
pub mod snf;
pub mod sparse;
