//! Type inference for a small functional language with Hindley–Milner
//! polymorphism, higher-kinded type variables and row-polymorphic
//! extensible records.
//!
//! ```
//! use rowpoly::{infer_program, InferOptions};
//!
//! let scheme = infer_program(r"\r. r.name", &InferOptions::default()).unwrap();
//! assert_eq!(scheme.to_string(), "∀a:*. ∀b:row. Rec {name:a | b} -> a");
//! ```

pub mod infer;
pub mod kindcheck;
pub mod oracle;
pub mod parser;
pub mod pretty;
pub mod syntax;
pub mod unify;

pub use infer::{
    generalize, infer_program, run_program, run_term, Audit, Error, InferOptions, InferSession,
    Outcome, TypeError,
};
pub use kindcheck::{check_scheme, kind_of, KindError};
pub use oracle::{ground_solutions, oracle_agrees, GroundSpace, Problem};
pub use parser::{parse_kind, parse_scheme, parse_term, parse_type, ParseError};
pub use syntax::{
    alpha_equal, alpha_equal_types, canonicalize, canonicalize_row, free_type_vars, Kind, KindEnv,
    Label, Literal, RowType, Scheme, SourceSpan, Term, TermKind, Type, TypeEnv, TypeVar, VarSupply,
};
pub use unify::{unify, unify_rows, Subst, UnifyError};
