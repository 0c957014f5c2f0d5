//! Formal group laws over ℚ and 𝔽_p and the Hasse-Schmidt derivations they
//! induce on k[t] and k[t, 1/t].
//!
//! ```
//! use formal_hs::fgl::FormalGroupLaw;
//! use formal_hs::hsd::{HSDerivation, Window};
//!
//! let law = FormalGroupLaw::honda(2, 2, 17).unwrap();
//! let d = HSDerivation::canonical(&law, 8, Window::unbounded()).unwrap();
//! assert_eq!(d.images()[4].to_string(), "t^12 + t^6");
//! assert!(!d.check_p1_extendable(8).unwrap().passed());
//! ```
//!
//! The guide in `book/` walks through each module; its snippets run as
//! doc-tests of this crate.

pub mod exactnum;
pub mod series;
pub mod fgl;
pub mod hsd;
pub mod serial;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/scalars.md")]
    mod scalars {}
    #[doc = include_str!("../../../book/src/series.md")]
    mod series {}
    #[doc = include_str!("../../../book/src/formal-group-laws.md")]
    mod formal_group_laws {}
    #[doc = include_str!("../../../book/src/derivations.md")]
    mod derivations {}
    #[doc = include_str!("../../../book/src/iterativity.md")]
    mod iterativity {}
    #[doc = include_str!("../../../book/src/projective-line.md")]
    mod projective_line {}
    #[doc = include_str!("../../../book/src/restricted.md")]
    mod restricted {}
    #[doc = include_str!("../../../book/src/json.md")]
    mod json {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
