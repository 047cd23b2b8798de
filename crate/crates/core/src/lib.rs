//! String isomorphism for permutation groups with restricted composition
//! factors, with the group toolkit, certificate machinery and graph
//! applications it needs, plus brute-force oracles for checking them.

pub mod error;
pub mod par;
pub mod partition;
pub mod perm;

pub use error::{Error, Result};
pub mod apps;
pub mod certs;
pub mod luks;
pub mod oracle;
pub mod reduction;
pub mod suites;
