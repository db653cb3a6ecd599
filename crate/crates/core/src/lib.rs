//! Fourier-cosine option pricing with certified truncation ranges.
//!
//! The engine expands the density of the centered log price on an interval
//! `[-L, L]` and prices European payoffs from the cosine coefficients of the
//! characteristic function. Two ways of choosing the interval are provided:
//! the classical cumulant heuristic ([`truncation::cumulant_range`]) and a
//! tail bound built from an even moment via Markov's inequality
//! ([`truncation::markov_range`]), which turns a user tolerance into a
//! certified interval width.
//!
//! The crate is `no_std` compatible (with `alloc`); the `std` feature adds
//! hardware float intrinsics and parallel Monte Carlo.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod cos;
pub mod models;
pub mod moments;
pub mod oracles;
pub mod quad;
pub mod series;
pub mod special;
pub mod sum;
pub mod truncation;

pub use cos::{adaptive_n, density, price, put_coefficients, OptionKind, PriceResult};
pub use oracles::{bs_price, carr_madan_price, laplace_price, merton_price, CarrMadanConfig, OracleError};
pub use models::{MarketContext, ModelSpec};
pub use moments::{AutoMoments, MomentEstimate, MomentProvider};
pub use truncation::{cumulant_range, markov_range, ToleranceSpec, TruncationRange};
