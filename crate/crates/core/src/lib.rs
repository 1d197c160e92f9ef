//! Finite-scale machinery for equations over groups.
//!
//! Groups are finite multiplication tables ([`group`]); words over `G ∗ Fₙ`
//! ([`words`]) are solved by exhaustive search ([`equations`]); quasi-identities
//! are checked and turned into separating systems ([`quasi`]); relator families
//! over `Q ∗ ⟨t⟩` are checked for the metric small cancellation condition
//! ([`smallcanc`]); amalgams of finite groups get normal forms and kernel
//! decompositions ([`amalgam`]).

pub mod group;
pub mod words;
pub mod equations;
pub mod quasi;
pub mod smallcanc;
pub mod amalgam;
pub mod claims;
