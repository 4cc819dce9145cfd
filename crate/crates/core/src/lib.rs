pub mod cli;
pub mod complex;
pub mod det_line;
mod equations;
pub mod error;
pub mod homotopy;
pub mod linalg;
pub mod ring;
pub mod search;
pub mod ses;
pub mod text;

pub use complex::{ChainMap, ChainMapSpace, Homotopy, MatrixSpace, PerfectComplex};
pub use det_line::{det_line_of, det_of_automorphism, det_trace_bridge, koszul_swap, GradedLine};
pub use error::{Error, Result};
pub use homotopy::{are_homotopic, find_null_homotopy, graded_trace, perturb, NullHomotopySolver};
pub use linalg::{LinearSystem, Matrix, SolutionReport, SolutionSpace};
pub use ring::{RingElem, RingSpec};
pub use search::{build_paper_example, certify, search_violation, Mode, SearchConfig, SearchOutcome};
pub use ses::{
    check_triple, make_extension, AdditivityReport, Criterion, EndoTriple, Extension, ShortExactSequence, SquareStatus,
};
