//! Discrete norms, interpolation exponents, a MAC Navier–Stokes solver and
//! the checks that tie them to an a priori Hölder estimate. See the guide
//! under `book/` for a walk-through.

pub mod cli;
pub mod error;
pub mod estimate_verify;
pub mod exponents;
pub mod function_spaces;
pub mod interp_verify;
pub mod ns_solver;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($($name:ident => $file:literal),* $(,)?) => {
            $(
                #[doc = include_str!(concat!("../../../book/src/", $file))]
                mod $name {}
            )*
        };
    }

    chapter!(
        introduction => "introduction.md",
        grids_and_norms => "grids-and-norms.md",
        exponents => "exponents.md",
        interpolation => "interpolation.md",
        solver => "solver.md",
        estimates => "estimates.md",
        command_line => "command-line.md",
    );
}
