pub mod discontinuity;
pub mod identities;
pub mod oscillations;
pub mod simulate;
pub mod solve;
pub mod spectrum;
