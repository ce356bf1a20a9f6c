//! Core library for securing random linear network coding (RLNC) against
//! pollution attacks, together with models of how Byzantine peers contaminate
//! a tracker-mediated dissemination overlay.
//!
//! The crate is organised as six largely independent modules:
//!
//! * [`modmath`] — prime-order subgroup parameters and modular arithmetic on
//!   arbitrary-precision integers (Miller-Rabin, modular exponentiation,
//!   inverses, multi-exponentiation).
//! * [`rlnc`] — packets and payloads over a prime field: augmentation,
//!   recombination, rank, Gauss-Jordan decoding, and a fixed wire format.
//! * [`sigscheme`] — a discrete-log homomorphic signature scheme whose
//!   signatures survive arbitrary recombination of signed packets.
//! * [`epidemic`] — a Monte Carlo simulator of contamination spread through
//!   tracker-mediated dissemination, in boolean and fully coded flavours.
//! * [`analytic`] — closed-form blocking probabilities and contamination
//!   growth curves matching the simulator's generative model.
//! * [`overhead`] — transmission-overhead cost curves for per-packet
//!   signatures, end-to-end checks, and generation-level hashes.

pub mod analytic;
pub mod epidemic;
pub mod modmath;
pub mod overhead;
pub mod rlnc;
pub mod sigscheme;
