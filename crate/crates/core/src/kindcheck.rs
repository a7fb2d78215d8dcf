//! Kind checking: the stage that runs before any typing.
//!
//! Every quantified variable carries its kind, so this is checking, not
//! inference. The only kinds are `*`, `row` and arrows.

use thiserror::Error;

use crate::syntax::{Kind, KindEnv, RowType, Scheme, Type, TypeVar};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum KindError {
    #[error("type `{offender}` has kind {actual}, expected {expected}")]
    Mismatch {
        offender: Type,
        expected: Kind,
        actual: Kind,
    },
    #[error("type `{offender}` of kind {actual} cannot be applied to a type of kind {arg}")]
    NotAConstructor {
        offender: Type,
        actual: Kind,
        arg: Kind,
    },
    #[error("unknown type constructor `{0}`")]
    UnboundConstructor(String),
    #[error("type variable is not in scope")]
    UnboundVariable(TypeVar),
}

/// Derives the kind of `tau` under `delta`.
pub fn kind_of(delta: &KindEnv, tau: &Type) -> Result<Kind, KindError> {
    match tau {
        Type::Var(v) => var_kind(delta, v),
        Type::Con(name) => delta
            .constructor(name)
            .cloned()
            .ok_or_else(|| KindError::UnboundConstructor(name.clone())),
        Type::RecCon => delta
            .constructor(crate::syntax::REC)
            .cloned()
            .ok_or_else(|| KindError::UnboundConstructor(crate::syntax::REC.to_owned())),
        Type::App(fun, arg) => {
            let fun_kind = kind_of(delta, fun)?;
            let arg_kind = kind_of(delta, arg)?;
            match fun_kind {
                Kind::Arrow(param, result) if *param == arg_kind => Ok(*result),
                Kind::Arrow(param, _) => Err(KindError::Mismatch {
                    offender: (**arg).clone(),
                    expected: *param,
                    actual: arg_kind,
                }),
                actual => Err(KindError::NotAConstructor {
                    offender: (**fun).clone(),
                    actual,
                    arg: arg_kind,
                }),
            }
        }
        Type::Fun(dom, cod) => {
            expect(delta, dom, Kind::Star)?;
            expect(delta, cod, Kind::Star)?;
            Ok(Kind::Star)
        }
        Type::Row(row) => {
            check_row(delta, row)?;
            Ok(Kind::Row)
        }
    }
}

fn var_kind(delta: &KindEnv, v: &TypeVar) -> Result<Kind, KindError> {
    delta
        .var(v.id)
        .cloned()
        .ok_or_else(|| KindError::UnboundVariable(v.clone()))
}

fn expect(delta: &KindEnv, tau: &Type, expected: Kind) -> Result<(), KindError> {
    let actual = kind_of(delta, tau)?;
    if actual == expected {
        Ok(())
    } else {
        Err(KindError::Mismatch {
            offender: tau.clone(),
            expected,
            actual,
        })
    }
}

fn check_row(delta: &KindEnv, row: &RowType) -> Result<(), KindError> {
    for ty in row.fields.values() {
        expect(delta, ty, Kind::Star)?;
    }
    if let Some(tail) = &row.tail {
        let actual = var_kind(delta, tail)?;
        if actual != Kind::Row {
            return Err(KindError::Mismatch {
                offender: Type::Var(tail.clone()),
                expected: Kind::Row,
                actual,
            });
        }
    }
    Ok(())
}

/// Checks that `s` is a well-kinded type of kind `*` once its quantified
/// variables are in scope.
pub fn check_scheme(delta: &KindEnv, s: &Scheme) -> Result<(), KindError> {
    let inner = delta.with_vars(&s.quantified);
    expect(&inner, &s.body, Kind::Star)
}
