//! Dialgebraic semantics for finite asynchronous CCS.
//!
//! A dialgebra `f : F X -> B X` separates what an observer can *do* to a
//! system (the experiments in `F X`) from what it can *see* (the
//! observations in `B X`). Instantiated on CCS with experiments
//! `F X = X + L_o × X`, back-and-forth bisimilarity of the dialgebra is
//! asynchronous bisimilarity, and it coincides with the kernel of the
//! quotient homomorphism.
//!
//! The crate provides:
//!
//! * [`syntax`]: terms, parser and printer;
//! * [`lts`]: the structural operational semantics and strong bisimilarity;
//! * [`dialgebra`]: generic finite dialgebras, back-and-forth bisimilarity
//!   (definitional fixpoint and partition refinement), quotients,
//!   homomorphisms and kernels;
//! * [`ccs`]: the CCS dialgebra and the dialgebraic equivalence check;
//! * [`oracle`]: asynchronous bisimilarity straight from its definition,
//!   with certificates and distinguishing traces;
//! * [`mealy`]: non-deterministic Mealy machines as a second instance;
//! * [`gen`]: seeded random terms and machines, and shrinking.
//!
//! ```
//! use dialgebra::{parse, Limits};
//!
//! let p = parse("c.'c.0 + tau.0").unwrap();
//! let q = parse("tau.0").unwrap();
//! let limits = Limits::default();
//!
//! assert!(!dialgebra::lts::strong_bisim(&p, &q, limits).unwrap().equivalent);
//! assert!(dialgebra::ccs::async_bisim_dialgebraic(&p, &q, limits).unwrap());
//! assert!(dialgebra::oracle::async_bisim_oracle(&p, &q, limits).unwrap());
//! ```

pub mod ccs;
pub mod dialgebra;
mod error;
pub mod gen;
pub mod lts;
pub mod mealy;
pub mod oracle;
pub mod partition;
pub mod syntax;

pub use error::{Error, Limits, Result, DEFAULT_STATE_CAP, STATE_CAP_ENV};
pub use partition::Partition;
pub use syntax::{parse, Channel, Process};

// The guide's code listings run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/syntax.md")]
    mod syntax {}
    #[doc = include_str!("../../../book/src/operational.md")]
    mod operational {}
    #[doc = include_str!("../../../book/src/dialgebras.md")]
    mod dialgebras {}
    #[doc = include_str!("../../../book/src/asynchrony.md")]
    mod asynchrony {}
    #[doc = include_str!("../../../book/src/kernels.md")]
    mod kernels {}
    #[doc = include_str!("../../../book/src/mealy.md")]
    mod mealy {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
