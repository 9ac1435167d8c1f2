//! Deligne-Lusztig parameters of `GL_n(F_q)` irreducibles, recovered from
//! character values on regular semisimple elements of maximal tori.
//!
//! The crate is layered bottom-up:
//!
//! - [`cyclotomic`]: exact arithmetic in `Q(zeta_N)`,
//! - [`abelian`]: finite abelian groups, characters, homomorphisms,
//! - [`reductive`]: tori of `GL_n`, norm maps, regularity, geometric conjugacy,
//! - [`dltable`]: character sheets (built-in `GL_1`/`GL_2` generators, JSON I/O),
//! - [`recovery`]: sparse character expansions, the parameter map and unipotence.

#![allow(clippy::needless_range_loop, clippy::type_complexity)]

pub mod abelian;
pub mod cyclotomic;
pub mod dltable;
pub mod error;
pub mod recovery;
pub mod reductive;

pub use abelian::{AbChar, AbHom, FinAbGroup, GrpElt};
pub use cyclotomic::{CycMatrix, CycNum};
pub use dltable::{CharacterSheet, IrrLabel, SheetRow};
pub use error::{Error, Result};
pub use recovery::{Expansion, Recoverer, RecoveryError, RecoveryReport, SearchMode};
pub use reductive::{GeomClassId, GroupSpec, TorusType};
