//! Algorithm-W style inference producing principal schemes.
//!
//! A program is checked in two stages. Stage one kind-checks every type the
//! program mentions (annotations and the prelude). Stage two infers a type
//! for the term; it never consults kinds again, and every row-sensitive
//! decision it makes goes through [`unify`].

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::kindcheck::{check_scheme, KindError};
use crate::parser::{parse_scheme, parse_term, ParseError};
use crate::pretty::Renamer;
use crate::syntax::{
    free_type_vars, Kind, KindEnv, Label, Literal, RowType, Scheme, SourceSpan, Term, TermKind,
    Type, TypeEnv, TypeVar, VarSupply,
};
use crate::unify::{equal_modulo_rows, unify, Subst, UnifyError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeError {
    UnboundVariable {
        name: String,
        span: SourceSpan,
    },
    UnifyFailure {
        error: Box<UnifyError>,
        span: SourceSpan,
    },
    KindFailure {
        error: Box<KindError>,
        span: SourceSpan,
    },
    NotARecord {
        ty: Box<Type>,
        span: SourceSpan,
    },
}

impl TypeError {
    pub fn span(&self) -> SourceSpan {
        match self {
            TypeError::UnboundVariable { span, .. }
            | TypeError::UnifyFailure { span, .. }
            | TypeError::KindFailure { span, .. }
            | TypeError::NotARecord { span, .. } => *span,
        }
    }
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeError::UnboundVariable { name, .. } => write!(f, "unbound variable `{name}`"),
            TypeError::UnifyFailure { error, .. } => write!(f, "{error}"),
            TypeError::KindFailure { error, .. } => write!(f, "ill-kinded annotation: {error}"),
            TypeError::NotARecord { ty, .. } => {
                write!(
                    f,
                    "expected a record, found `{}`",
                    Renamer::new().type_to_string(ty)
                )
            }
        }
    }
}

impl std::error::Error for TypeError {}

/// Any failure of the pipeline.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Type(#[from] TypeError),
}

impl Error {
    pub fn span(&self) -> SourceSpan {
        match self {
            Error::Parse(e) => e.span,
            Error::Type(e) => e.span(),
        }
    }

    /// A stable name for the kind of failure, used by golden tests.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Parse(_) => "parse",
            Error::Type(TypeError::UnboundVariable { .. }) => "unbound-variable",
            Error::Type(TypeError::KindFailure { .. }) => "kind",
            Error::Type(TypeError::NotARecord { .. }) => "not-a-record",
            Error::Type(TypeError::UnifyFailure { error, .. }) => match **error {
                UnifyError::Mismatch(..) => "mismatch",
                UnifyError::OccursCheck(..) => "occurs-check",
                UnifyError::RowMissingLabel(..) => "missing-label",
                UnifyError::RowTailEscape(..) => "row-tail-escape",
                UnifyError::DuplicateLabel(..) => "duplicate-label",
            },
        }
    }
}

/// Signatures every program starts with.
pub const PRELUDE: &[(&str, &str)] = &[
    ("true", "Bool"),
    ("false", "Bool"),
    ("if", "∀a:*. Bool -> a -> a -> a"),
    ("pair", "∀a:*. ∀b:*. a -> b -> Rec {fst:a, snd:b}"),
    ("nil", "∀a:*. List a"),
    ("cons", "∀a:*. a -> List a -> List a"),
    ("add", "Int -> Int -> Int"),
    ("concat", "String -> String -> String"),
];

/// The prelude as a typing environment, kind-checked.
pub fn prelude(delta: &KindEnv) -> Result<TypeEnv, KindError> {
    let mut env = TypeEnv::new();
    for (name, src) in PRELUDE {
        let scheme = parse_scheme(src).expect("prelude signature parses");
        check_scheme(delta, &scheme)?;
        env = env.extend(name, scheme);
    }
    Ok(env)
}

/// Counts unifications and records any whose result fails to equate its
/// inputs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Audit {
    pub unifications: usize,
    pub violations: Vec<(Type, Type)>,
}

/// State of one inference run: the fresh-variable supply, the kind
/// environment and the substitution accumulated so far.
#[derive(Debug)]
pub struct InferSession {
    supply: VarSupply,
    delta: KindEnv,
    subst: Subst,
    /// Row variables that must not acquire a label because a record
    /// extension already placed that label next to them.
    lacks: Vec<(TypeVar, Label)>,
    audit: Option<Audit>,
}

impl Default for InferSession {
    fn default() -> Self {
        InferSession::new()
    }
}

impl InferSession {
    pub fn new() -> InferSession {
        InferSession::with_supply(VarSupply::new())
    }

    pub fn with_supply(supply: VarSupply) -> InferSession {
        InferSession {
            supply,
            delta: KindEnv::builtin(),
            subst: Subst::empty(),
            lacks: Vec::new(),
            audit: None,
        }
    }

    /// Turns on soundness auditing of every unification.
    pub fn audited(mut self) -> InferSession {
        self.audit = Some(Audit::default());
        self
    }

    pub fn audit(&self) -> Option<&Audit> {
        self.audit.as_ref()
    }

    pub fn kind_env(&self) -> &KindEnv {
        &self.delta
    }

    pub fn substitution(&self) -> &Subst {
        &self.subst
    }

    pub fn fresh(&mut self, kind: Kind) -> TypeVar {
        self.supply.fresh(kind)
    }

    fn fresh_type(&mut self, kind: Kind) -> Type {
        Type::var(self.fresh(kind))
    }

    /// Applies the accumulated substitution.
    pub fn resolve(&self, t: &Type) -> Result<Type, UnifyError> {
        self.subst.try_apply(t)
    }

    /// Copies the scheme's body with fresh variables for the quantified ones.
    pub fn instantiate(&mut self, s: &Scheme) -> Type {
        if s.quantified.is_empty() {
            return s.body.clone();
        }
        let map: HashMap<u32, TypeVar> = s
            .quantified
            .iter()
            .map(|v| (v.id, self.supply.fresh(v.kind.clone())))
            .collect();
        s.body.rename(&map)
    }

    /// Generalizes `tau` over the variables not free in `gamma`, both read
    /// through the accumulated substitution.
    pub fn generalize(&self, gamma: &TypeEnv, tau: &Type) -> Result<Scheme, UnifyError> {
        let tau = self.resolve(tau)?;
        let mut env_vars = BTreeSet::new();
        for v in free_type_vars(gamma) {
            env_vars.extend(free_type_vars(&self.resolve(&Type::var(v))?));
        }
        Ok(quantify(&env_vars, tau))
    }

    fn unify_at(&mut self, t1: &Type, t2: &Type, span: SourceSpan) -> Result<(), TypeError> {
        let at = |error| TypeError::UnifyFailure {
            error: Box::new(error),
            span,
        };
        let a = self.resolve(t1).map_err(at)?;
        let b = self.resolve(t2).map_err(at)?;
        let step = unify(&a, &b, &mut self.supply).map_err(at)?;
        if let Some(audit) = &mut self.audit {
            audit.unifications += 1;
            let sound = match (step.try_apply(&a), step.try_apply(&b)) {
                (Ok(x), Ok(y)) => equal_modulo_rows(&x, &y),
                _ => false,
            };
            if !sound {
                audit.violations.push((a.clone(), b.clone()));
            }
        }
        self.subst = Subst::try_compose(&step, &self.subst).map_err(at)?;
        for (rho, label) in &self.lacks {
            let row = self
                .subst
                .try_apply_row(&RowType::tail_only(rho.clone()))
                .map_err(at)?;
            if row.fields.contains_key(label) {
                return Err(at(UnifyError::DuplicateLabel(label.clone(), row)));
            }
        }
        Ok(())
    }

    fn expect_record(&self, t: &Type, span: SourceSpan) -> Result<(), TypeError> {
        let t = self.resolve(t).map_err(|error| TypeError::UnifyFailure {
            error: Box::new(error),
            span,
        })?;
        match t.head() {
            Type::Var(_) | Type::RecCon => Ok(()),
            _ => Err(TypeError::NotARecord {
                ty: Box::new(t),
                span,
            }),
        }
    }

    /// Infers a type for `t` under `gamma`. The result may mention variables
    /// the session has since solved; pass it through [`resolve`](Self::resolve).
    pub fn infer_term(&mut self, gamma: &TypeEnv, t: &Term) -> Result<Type, TypeError> {
        let span = t.span;
        match &t.kind {
            TermKind::Var(name) => match gamma.lookup(name) {
                Some(scheme) => Ok(self.instantiate(scheme)),
                None => Err(TypeError::UnboundVariable {
                    name: name.clone(),
                    span,
                }),
            },
            TermKind::Lam(x, body) => {
                let param = self.fresh_type(Kind::Star);
                let inner = gamma.extend(x, Scheme::mono(param.clone()));
                let result = self.infer_term(&inner, body)?;
                Ok(Type::fun(param, result))
            }
            TermKind::App(fun, arg) => {
                let fun_ty = self.infer_term(gamma, fun)?;
                let arg_ty = self.infer_term(gamma, arg)?;
                let result = self.fresh_type(Kind::Star);
                self.unify_at(&fun_ty, &Type::fun(arg_ty, result.clone()), span)?;
                Ok(result)
            }
            TermKind::Let(x, bound, body) => {
                let bound_ty = self.infer_term(gamma, bound)?;
                let scheme =
                    self.generalize(gamma, &bound_ty)
                        .map_err(|error| TypeError::UnifyFailure {
                            error: Box::new(error),
                            span: bound.span,
                        })?;
                self.infer_term(&gamma.extend(x, scheme), body)
            }
            TermKind::Lit(Literal::Int(_)) => Ok(Type::int()),
            TermKind::Lit(Literal::Str(_)) => Ok(Type::string()),
            TermKind::Record(fields) => {
                let mut row = RowType::empty();
                for (label, value) in fields {
                    let ty = self.infer_term(gamma, value)?;
                    row.fields.insert(label.clone(), ty);
                }
                Ok(Type::record(row))
            }
            TermKind::Select(record, label) => {
                let record_ty = self.infer_term(gamma, record)?;
                self.expect_record(&record_ty, record.span)?;
                let field = self.fresh_type(Kind::Star);
                let rest = self.fresh(Kind::Row);
                let template = Type::record(RowType::open([(label.clone(), field.clone())], rest));
                self.unify_at(&record_ty, &template, span)?;
                Ok(field)
            }
            TermKind::Extend(label, value, record) => {
                let value_ty = self.infer_term(gamma, value)?;
                let record_ty = self.infer_term(gamma, record)?;
                self.expect_record(&record_ty, record.span)?;
                let rest = self.fresh(Kind::Row);
                self.unify_at(
                    &record_ty,
                    &Type::record(RowType::tail_only(rest.clone())),
                    span,
                )?;
                let known = self
                    .subst
                    .try_apply_row(&RowType::tail_only(rest.clone()))
                    .map_err(|error| TypeError::UnifyFailure {
                        error: Box::new(error),
                        span,
                    })?;
                if known.fields.contains_key(label) {
                    let error = UnifyError::DuplicateLabel(label.clone(), known);
                    return Err(TypeError::UnifyFailure {
                        error: Box::new(error),
                        span,
                    });
                }
                self.lacks.push((rest.clone(), label.clone()));
                Ok(Type::record(RowType::open(
                    [(label.clone(), value_ty)],
                    rest,
                )))
            }
            TermKind::Restrict(record, label) => {
                let record_ty = self.infer_term(gamma, record)?;
                self.expect_record(&record_ty, record.span)?;
                let field = self.fresh_type(Kind::Star);
                let rest = self.fresh(Kind::Row);
                let template = Type::record(RowType::open([(label.clone(), field)], rest.clone()));
                self.unify_at(&record_ty, &template, span)?;
                Ok(Type::record(RowType::tail_only(rest)))
            }
            TermKind::Annot(inner, scheme) => {
                let inner_ty = self.infer_term(gamma, inner)?;
                let declared = self.instantiate(scheme);
                self.unify_at(&inner_ty, &declared, span)?;
                Ok(declared)
            }
        }
    }
}

/// Quantifies the variables of `tau` that are not free in `gamma`, in
/// first-occurrence order. `tau` must already be fully substituted.
pub fn generalize(gamma: &TypeEnv, tau: &Type) -> Scheme {
    quantify(&free_type_vars(gamma), tau.clone())
}

fn quantify(env_vars: &BTreeSet<TypeVar>, tau: Type) -> Scheme {
    let quantified = tau
        .vars_in_order()
        .into_iter()
        .filter(|v| !env_vars.iter().any(|e| e.id == v.id))
        .collect();
    Scheme::new(quantified, tau)
}

#[derive(Clone, Copy, Debug, Default)]
pub struct InferOptions {
    /// Check the soundness of every unification as it happens.
    pub audit: bool,
}

/// Result of running the whole pipeline, with the audit if one was asked for.
#[derive(Debug)]
pub struct Outcome {
    pub result: Result<Scheme, Error>,
    pub audit: Option<Audit>,
}

/// Parses, kind-checks, infers and generalizes a program.
pub fn infer_program(src: &str, options: &InferOptions) -> Result<Scheme, Error> {
    run_program(src, options).result
}

pub fn run_program(src: &str, options: &InferOptions) -> Outcome {
    let term = match parse_term(src) {
        Ok(t) => t,
        Err(e) => {
            return Outcome {
                result: Err(e.into()),
                audit: None,
            }
        }
    };
    run_term(&term, options)
}

/// Stages one and two on an already parsed term.
pub fn run_term(term: &Term, options: &InferOptions) -> Outcome {
    let delta = KindEnv::builtin();
    let gamma = prelude(&delta).expect("prelude is well-kinded");

    // Variables in annotations are all quantified, so fresh variables only
    // need to avoid their ids.
    let annotations = term.annotations();
    let first_free = annotations
        .iter()
        .flat_map(|(s, _)| s.quantified.iter().map(|v| v.id + 1))
        .max()
        .unwrap_or(0);
    let mut session = InferSession::with_supply(VarSupply::starting_at(first_free));
    if options.audit {
        session = session.audited();
    }

    for (scheme, span) in annotations {
        if let Err(error) = check_scheme(session.kind_env(), scheme) {
            let result = Err(TypeError::KindFailure {
                error: Box::new(error),
                span,
            }
            .into());
            return Outcome {
                result,
                audit: session.audit.take(),
            };
        }
    }

    let result = session.infer_term(&gamma, term).and_then(|ty| {
        let at = |error| TypeError::UnifyFailure {
            error: Box::new(error),
            span: term.span,
        };
        let ty = session.resolve(&ty).map_err(at)?;
        Ok(generalize(&gamma, &ty).canonical())
    });
    Outcome {
        result: result.map_err(Error::from),
        audit: session.audit.take(),
    }
}
