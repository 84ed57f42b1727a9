pub mod barrier;
pub mod descriptors;
pub mod energy;
pub mod exact;
pub mod gates;
pub mod layers;
pub mod scan;
pub mod sweep;
