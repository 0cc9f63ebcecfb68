//! Solution-preserving reductions exposed as lazy instance views, with map-back of certificates.

pub mod chain;
pub mod lcp;
pub mod line;
pub mod opdc;
