//! Kinds, types, rows, schemes, terms and typing environments.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

/// The kind language: `*`, `row`, and arrows between kinds.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Star,
    Row,
    Arrow(Box<Kind>, Box<Kind>),
}

impl Kind {
    pub fn arrow(param: Kind, result: Kind) -> Kind {
        Kind::Arrow(Box::new(param), Box::new(result))
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Star => f.write_str("*"),
            Kind::Row => f.write_str("row"),
            Kind::Arrow(param, result) => match **param {
                Kind::Arrow(..) => write!(f, "({param}) -> {result}"),
                _ => write!(f, "{param} -> {result}"),
            },
        }
    }
}

/// Returns true if `s` belongs to the identifier class of the surface grammar.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        && !matches!(s, "let" | "in" | "forall")
}

/// A record field name.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(Arc<str>);

impl Label {
    /// Panics if `name` is not an identifier.
    pub fn new(name: &str) -> Label {
        assert!(is_identifier(name), "invalid label {name:?}");
        Label(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Label {
    fn from(name: &str) -> Label {
        Label::new(name)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A type variable. Identity is the `id`; the kind travels with it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeVar {
    pub id: u32,
    pub kind: Kind,
}

impl TypeVar {
    pub fn new(id: u32, kind: Kind) -> TypeVar {
        TypeVar { id, kind }
    }
}

/// Monotone supply of fresh type variables for one inference session.
#[derive(Clone, Debug, Default)]
pub struct VarSupply {
    next: u32,
}

impl VarSupply {
    pub fn new() -> VarSupply {
        VarSupply::default()
    }

    /// A supply whose first variable has id `first`.
    pub fn starting_at(first: u32) -> VarSupply {
        VarSupply { next: first }
    }

    pub fn fresh(&mut self, kind: Kind) -> TypeVar {
        let id = self.next;
        self.next = self
            .next
            .checked_add(1)
            .expect("type variable supply exhausted");
        TypeVar { id, kind }
    }

    pub fn peek(&self) -> u32 {
        self.next
    }
}

/// A row: a duplicate-free map from labels to types plus an optional tail
/// variable of kind `row`.
///
/// Fields live in a `BTreeMap`, so two rows that differ only in the order
/// their fields were written compare equal and iterate lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RowType {
    pub fields: BTreeMap<Label, Type>,
    pub tail: Option<TypeVar>,
}

impl RowType {
    pub fn empty() -> RowType {
        RowType::default()
    }

    pub fn closed(fields: impl IntoIterator<Item = (Label, Type)>) -> RowType {
        RowType {
            fields: collect_fields(fields),
            tail: None,
        }
    }

    pub fn open(fields: impl IntoIterator<Item = (Label, Type)>, tail: TypeVar) -> RowType {
        debug_assert_eq!(tail.kind, Kind::Row);
        RowType {
            fields: collect_fields(fields),
            tail: Some(tail),
        }
    }

    /// `{| tail}`
    pub fn tail_only(tail: TypeVar) -> RowType {
        RowType::open([], tail)
    }

    pub fn is_closed(&self) -> bool {
        self.tail.is_none()
    }
}

fn collect_fields(fields: impl IntoIterator<Item = (Label, Type)>) -> BTreeMap<Label, Type> {
    let mut map = BTreeMap::new();
    for (label, ty) in fields {
        let prev = map.insert(label.clone(), ty);
        assert!(prev.is_none(), "duplicate label `{label}` in row");
    }
    map
}

/// Name of the distinguished record constructor `Rec : row -> *`.
pub const REC: &str = "Rec";

/// The type constructors every program can mention.
pub fn builtin_constructors() -> [(&'static str, Kind); 5] {
    [
        ("Int", Kind::Star),
        ("String", Kind::Star),
        ("Bool", Kind::Star),
        ("List", Kind::arrow(Kind::Star, Kind::Star)),
        (REC, Kind::arrow(Kind::Row, Kind::Star)),
    ]
}

/// Types of every kind, rows included.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Type {
    Var(TypeVar),
    /// A named constructor other than `Rec`. Its kind comes from the kind
    /// environment.
    Con(String),
    App(Box<Type>, Box<Type>),
    Fun(Box<Type>, Box<Type>),
    Row(RowType),
    RecCon,
}

impl Type {
    /// A variable as a type. Row variables become the empty open row `{| v}`
    /// so that every row-kinded type is a `Type::Row`.
    pub fn var(v: TypeVar) -> Type {
        if v.kind == Kind::Row {
            Type::Row(RowType::tail_only(v))
        } else {
            Type::Var(v)
        }
    }

    pub fn con(name: &str) -> Type {
        if name == REC {
            Type::RecCon
        } else {
            Type::Con(name.to_owned())
        }
    }

    pub fn int() -> Type {
        Type::con("Int")
    }

    pub fn string() -> Type {
        Type::con("String")
    }

    pub fn bool() -> Type {
        Type::con("Bool")
    }

    pub fn list(elem: Type) -> Type {
        Type::app(Type::con("List"), elem)
    }

    pub fn app(fun: Type, arg: Type) -> Type {
        Type::App(Box::new(fun), Box::new(arg))
    }

    pub fn fun(dom: Type, cod: Type) -> Type {
        Type::Fun(Box::new(dom), Box::new(cod))
    }

    /// `Rec row`
    pub fn record(row: RowType) -> Type {
        Type::app(Type::RecCon, Type::Row(row))
    }

    /// The row argument of `Rec row`, if this is a record type.
    pub fn as_record(&self) -> Option<&RowType> {
        match self {
            Type::App(f, arg) if **f == Type::RecCon => match &**arg {
                Type::Row(row) => Some(row),
                _ => None,
            },
            _ => None,
        }
    }

    /// Views a row-kinded type as a row. Bare row variables are accepted for
    /// robustness even though [`Type::var`] never builds them.
    pub fn as_row(&self) -> Option<RowType> {
        match self {
            Type::Row(row) => Some(row.clone()),
            Type::Var(v) if v.kind == Kind::Row => Some(RowType::tail_only(v.clone())),
            _ => None,
        }
    }

    /// The head of an application spine.
    pub fn head(&self) -> &Type {
        match self {
            Type::App(f, _) => f.head(),
            other => other,
        }
    }

    /// Kind computed from the kinds carried by variables and the builtin
    /// constructor table, without an environment. `None` for ill-kinded
    /// types or unknown constructors.
    pub fn shallow_kind(&self) -> Option<Kind> {
        match self {
            Type::Var(v) => Some(v.kind.clone()),
            Type::Con(name) => builtin_constructors()
                .into_iter()
                .find(|(n, _)| n == name)
                .map(|(_, k)| k),
            Type::RecCon => Some(Kind::arrow(Kind::Row, Kind::Star)),
            Type::App(f, _) => match f.shallow_kind()? {
                Kind::Arrow(_, result) => Some(*result),
                _ => None,
            },
            Type::Fun(..) => Some(Kind::Star),
            Type::Row(_) => Some(Kind::Row),
        }
    }

    /// Distinct variables in first-occurrence order of a left-to-right
    /// traversal. Row fields are visited in label order, then the tail.
    pub fn vars_in_order(&self) -> Vec<TypeVar> {
        fn go(t: &Type, seen: &mut BTreeSet<u32>, out: &mut Vec<TypeVar>) {
            match t {
                Type::Var(v) => push(v, seen, out),
                Type::Con(_) | Type::RecCon => {}
                Type::App(a, b) | Type::Fun(a, b) => {
                    go(a, seen, out);
                    go(b, seen, out);
                }
                Type::Row(row) => {
                    for ty in row.fields.values() {
                        go(ty, seen, out);
                    }
                    if let Some(tail) = &row.tail {
                        push(tail, seen, out);
                    }
                }
            }
        }
        fn push(v: &TypeVar, seen: &mut BTreeSet<u32>, out: &mut Vec<TypeVar>) {
            if seen.insert(v.id) {
                out.push(v.clone());
            }
        }
        let mut out = Vec::new();
        go(self, &mut BTreeSet::new(), &mut out);
        out
    }

    pub fn occurs(&self, v: &TypeVar) -> bool {
        match self {
            Type::Var(w) => w.id == v.id,
            Type::Con(_) | Type::RecCon => false,
            Type::App(a, b) | Type::Fun(a, b) => a.occurs(v) || b.occurs(v),
            Type::Row(row) => {
                row.tail.as_ref().is_some_and(|t| t.id == v.id)
                    || row.fields.values().any(|t| t.occurs(v))
            }
        }
    }

    /// Replaces variables by id. Row variables must map to row types.
    pub fn rename(&self, map: &HashMap<u32, TypeVar>) -> Type {
        match self {
            Type::Var(v) => Type::var(map.get(&v.id).cloned().unwrap_or_else(|| v.clone())),
            Type::Con(_) | Type::RecCon => self.clone(),
            Type::App(a, b) => Type::app(a.rename(map), b.rename(map)),
            Type::Fun(a, b) => Type::fun(a.rename(map), b.rename(map)),
            Type::Row(row) => Type::Row(RowType {
                fields: row
                    .fields
                    .iter()
                    .map(|(l, t)| (l.clone(), t.rename(map)))
                    .collect(),
                tail: row
                    .tail
                    .as_ref()
                    .map(|t| map.get(&t.id).cloned().unwrap_or_else(|| t.clone())),
            }),
        }
    }
}

/// Rebuilds a type so that every row-kinded variable is written as a row
/// tail, recursively.
pub fn canonicalize(t: &Type) -> Type {
    match t {
        Type::Var(v) => Type::var(v.clone()),
        Type::Con(_) | Type::RecCon => t.clone(),
        Type::App(a, b) => Type::app(canonicalize(a), canonicalize(b)),
        Type::Fun(a, b) => Type::fun(canonicalize(a), canonicalize(b)),
        Type::Row(row) => Type::Row(canonicalize_row(row)),
    }
}

/// The canonical form of a row: fields iterate in lexicographic label order
/// (structural, via the map) and nested types are canonical.
pub fn canonicalize_row(row: &RowType) -> RowType {
    RowType {
        fields: row
            .fields
            .iter()
            .map(|(l, t)| (l.clone(), canonicalize(t)))
            .collect(),
        tail: row.tail.clone(),
    }
}

/// A type quantified over kinded variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scheme {
    pub quantified: Vec<TypeVar>,
    pub body: Type,
}

impl Scheme {
    pub fn mono(body: Type) -> Scheme {
        Scheme {
            quantified: Vec::new(),
            body,
        }
    }

    pub fn new(quantified: Vec<TypeVar>, body: Type) -> Scheme {
        debug_assert!(
            quantified
                .iter()
                .map(|v| v.id)
                .collect::<BTreeSet<_>>()
                .len()
                == quantified.len(),
            "duplicate quantified variable"
        );
        Scheme { quantified, body }
    }

    /// Renumbers every variable from zero in first-occurrence order and
    /// orders the quantifier list the same way.
    pub fn canonical(&self) -> Scheme {
        let order = self.body.vars_in_order();
        let map: HashMap<u32, TypeVar> = order
            .iter()
            .enumerate()
            .map(|(i, v)| (v.id, TypeVar::new(i as u32, v.kind.clone())))
            .collect();
        let bound: BTreeSet<u32> = self.quantified.iter().map(|v| v.id).collect();
        let quantified = order
            .iter()
            .filter(|v| bound.contains(&v.id))
            .map(|v| map[&v.id].clone())
            .collect();
        Scheme {
            quantified,
            body: canonicalize(&self.body.rename(&map)),
        }
    }
}

/// Anything with free type variables.
pub trait FreeVars {
    fn collect_free(&self, out: &mut BTreeSet<TypeVar>);
}

impl FreeVars for Type {
    fn collect_free(&self, out: &mut BTreeSet<TypeVar>) {
        out.extend(self.vars_in_order());
    }
}

impl FreeVars for RowType {
    fn collect_free(&self, out: &mut BTreeSet<TypeVar>) {
        for t in self.fields.values() {
            t.collect_free(out);
        }
        out.extend(self.tail.iter().cloned());
    }
}

impl FreeVars for Scheme {
    fn collect_free(&self, out: &mut BTreeSet<TypeVar>) {
        let mut body = BTreeSet::new();
        self.body.collect_free(&mut body);
        out.extend(
            body.into_iter()
                .filter(|v| !self.quantified.iter().any(|q| q.id == v.id)),
        );
    }
}

impl FreeVars for TypeEnv {
    fn collect_free(&self, out: &mut BTreeSet<TypeVar>) {
        for (_, scheme) in self.iter() {
            scheme.collect_free(out);
        }
    }
}

pub fn free_type_vars(x: &impl FreeVars) -> BTreeSet<TypeVar> {
    let mut out = BTreeSet::new();
    x.collect_free(&mut out);
    out
}

/// Structural equality up to a bijective renaming of variables. `renamable`
/// decides which variables on each side may be renamed; the rest must match
/// exactly.
fn types_alpha_equal(
    a: &Type,
    b: &Type,
    renamable: &dyn Fn(&TypeVar, &TypeVar) -> (bool, bool),
    forward: &mut HashMap<u32, u32>,
    backward: &mut HashMap<u32, u32>,
) -> bool {
    match (a, b) {
        (Type::Var(x), Type::Var(y)) => vars_alpha_equal(x, y, renamable, forward, backward),
        (Type::Con(x), Type::Con(y)) => x == y,
        (Type::RecCon, Type::RecCon) => true,
        (Type::App(f1, a1), Type::App(f2, a2)) | (Type::Fun(f1, a1), Type::Fun(f2, a2)) => {
            types_alpha_equal(f1, f2, renamable, forward, backward)
                && types_alpha_equal(a1, a2, renamable, forward, backward)
        }
        (Type::Row(r1), Type::Row(r2)) => {
            r1.fields.len() == r2.fields.len()
                && r1.fields.iter().all(|(l, t1)| match r2.fields.get(l) {
                    Some(t2) => types_alpha_equal(t1, t2, renamable, forward, backward),
                    None => false,
                })
                && match (&r1.tail, &r2.tail) {
                    (None, None) => true,
                    (Some(x), Some(y)) => vars_alpha_equal(x, y, renamable, forward, backward),
                    _ => false,
                }
        }
        _ => false,
    }
}

fn vars_alpha_equal(
    x: &TypeVar,
    y: &TypeVar,
    renamable: &dyn Fn(&TypeVar, &TypeVar) -> (bool, bool),
    forward: &mut HashMap<u32, u32>,
    backward: &mut HashMap<u32, u32>,
) -> bool {
    if x.kind != y.kind {
        return false;
    }
    match renamable(x, y) {
        (true, true) => match (forward.get(&x.id), backward.get(&y.id)) {
            (None, None) => {
                forward.insert(x.id, y.id);
                backward.insert(y.id, x.id);
                true
            }
            (Some(&fy), Some(&bx)) => fy == y.id && bx == x.id,
            _ => false,
        },
        (false, false) => x.id == y.id,
        _ => false,
    }
}

/// Equality of schemes up to renaming of quantified variables and
/// reordering of row fields.
pub fn alpha_equal(s1: &Scheme, s2: &Scheme) -> bool {
    if s1.quantified.len() != s2.quantified.len() {
        return false;
    }
    let q1: BTreeSet<u32> = s1.quantified.iter().map(|v| v.id).collect();
    let q2: BTreeSet<u32> = s2.quantified.iter().map(|v| v.id).collect();
    let renamable = |x: &TypeVar, y: &TypeVar| (q1.contains(&x.id), q2.contains(&y.id));
    let a = canonicalize(&s1.body);
    let b = canonicalize(&s2.body);
    let mut forward = HashMap::new();
    let mut backward = HashMap::new();
    types_alpha_equal(&a, &b, &renamable, &mut forward, &mut backward)
        && forward.len() == count_used(&s1.quantified, &a)
}

fn count_used(quantified: &[TypeVar], body: &Type) -> usize {
    let used = free_type_vars(body);
    quantified
        .iter()
        .filter(|q| used.iter().any(|u| u.id == q.id))
        .count()
}

/// Equality of types up to a bijective renaming of all their variables.
pub fn alpha_equal_types(a: &Type, b: &Type) -> bool {
    let renamable = |_: &TypeVar, _: &TypeVar| (true, true);
    types_alpha_equal(
        &canonicalize(a),
        &canonicalize(b),
        &renamable,
        &mut HashMap::new(),
        &mut HashMap::new(),
    )
}

/// A region of source text. Offsets are byte offsets; `line` and `column`
/// locate `start` and are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub column: u32,
}

impl SourceSpan {
    /// The smallest span covering both.
    pub fn to(self, other: SourceSpan) -> SourceSpan {
        let (first, _) = if self.start <= other.start {
            (self, other)
        } else {
            (other, self)
        };
        SourceSpan {
            start: first.start,
            end: self.end.max(other.end),
            line: first.line,
            column: first.column,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Literal {
    Int(i64),
    Str(String),
}

/// A term with the span it was parsed from. Equality ignores spans and
/// compares annotations up to renaming.
#[derive(Clone, Debug)]
pub struct Term {
    pub kind: TermKind,
    pub span: SourceSpan,
}

#[derive(Clone, Debug)]
pub enum TermKind {
    Var(String),
    Lam(String, Box<Term>),
    App(Box<Term>, Box<Term>),
    Let(String, Box<Term>, Box<Term>),
    Lit(Literal),
    Record(BTreeMap<Label, Term>),
    Select(Box<Term>, Label),
    Extend(Label, Box<Term>, Box<Term>),
    Restrict(Box<Term>, Label),
    /// `(term : scheme)`
    Annot(Box<Term>, Scheme),
}

impl Term {
    pub fn new(kind: TermKind) -> Term {
        Term {
            kind,
            span: SourceSpan::default(),
        }
    }

    pub fn with_span(kind: TermKind, span: SourceSpan) -> Term {
        Term { kind, span }
    }

    pub fn var(name: &str) -> Term {
        Term::new(TermKind::Var(name.to_owned()))
    }

    pub fn lam(name: &str, body: Term) -> Term {
        Term::new(TermKind::Lam(name.to_owned(), Box::new(body)))
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::new(TermKind::App(Box::new(fun), Box::new(arg)))
    }

    pub fn let_(name: &str, bound: Term, body: Term) -> Term {
        Term::new(TermKind::Let(
            name.to_owned(),
            Box::new(bound),
            Box::new(body),
        ))
    }

    pub fn int(n: i64) -> Term {
        Term::new(TermKind::Lit(Literal::Int(n)))
    }

    pub fn str(s: &str) -> Term {
        Term::new(TermKind::Lit(Literal::Str(s.to_owned())))
    }

    pub fn record(fields: impl IntoIterator<Item = (Label, Term)>) -> Term {
        let mut map = BTreeMap::new();
        for (label, term) in fields {
            let prev = map.insert(label.clone(), term);
            assert!(prev.is_none(), "duplicate label `{label}` in record");
        }
        Term::new(TermKind::Record(map))
    }

    pub fn select(record: Term, label: &str) -> Term {
        Term::new(TermKind::Select(Box::new(record), Label::new(label)))
    }

    pub fn extend(label: &str, value: Term, record: Term) -> Term {
        Term::new(TermKind::Extend(
            Label::new(label),
            Box::new(value),
            Box::new(record),
        ))
    }

    pub fn restrict(record: Term, label: &str) -> Term {
        Term::new(TermKind::Restrict(Box::new(record), Label::new(label)))
    }

    pub fn annot(term: Term, scheme: Scheme) -> Term {
        Term::new(TermKind::Annot(Box::new(term), scheme))
    }

    /// Every annotation in the term, outermost first.
    pub fn annotations(&self) -> Vec<(&Scheme, SourceSpan)> {
        fn go<'a>(t: &'a Term, out: &mut Vec<(&'a Scheme, SourceSpan)>) {
            match &t.kind {
                TermKind::Var(_) | TermKind::Lit(_) => {}
                TermKind::Lam(_, body) => go(body, out),
                TermKind::App(a, b) | TermKind::Let(_, a, b) | TermKind::Extend(_, a, b) => {
                    go(a, out);
                    go(b, out);
                }
                TermKind::Record(fields) => fields.values().for_each(|f| go(f, out)),
                TermKind::Select(r, _) | TermKind::Restrict(r, _) => go(r, out),
                TermKind::Annot(inner, scheme) => {
                    out.push((scheme, t.span));
                    go(inner, out);
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        use TermKind::*;
        match (&self.kind, &other.kind) {
            (Var(a), Var(b)) => a == b,
            (Lam(x, a), Lam(y, b)) => x == y && a == b,
            (App(f1, a1), App(f2, a2)) => f1 == f2 && a1 == a2,
            (Let(x, a1, b1), Let(y, a2, b2)) => x == y && a1 == a2 && b1 == b2,
            (Lit(a), Lit(b)) => a == b,
            (Record(a), Record(b)) => a == b,
            (Select(a, l1), Select(b, l2)) | (Restrict(a, l1), Restrict(b, l2)) => {
                l1 == l2 && a == b
            }
            (Extend(l1, v1, r1), Extend(l2, v2, r2)) => l1 == l2 && v1 == v2 && r1 == r2,
            (Annot(a, s1), Annot(b, s2)) => a == b && alpha_equal(s1, s2),
            _ => false,
        }
    }
}

/// Kinds of type constructors and in-scope type variables (Δ).
#[derive(Clone, Debug)]
pub struct KindEnv {
    constructors: BTreeMap<String, Kind>,
    vars: BTreeMap<u32, Kind>,
}

impl KindEnv {
    pub fn empty() -> KindEnv {
        KindEnv {
            constructors: BTreeMap::new(),
            vars: BTreeMap::new(),
        }
    }

    /// Environment with the builtin constructors.
    pub fn builtin() -> KindEnv {
        let mut env = KindEnv::empty();
        for (name, kind) in builtin_constructors() {
            env.constructors.insert(name.to_owned(), kind);
        }
        env
    }

    pub fn constructor(&self, name: &str) -> Option<&Kind> {
        self.constructors.get(name)
    }

    pub fn var(&self, id: u32) -> Option<&Kind> {
        self.vars.get(&id)
    }

    /// Extends the environment with a variable; rebinding an id in the same
    /// environment is a bug.
    pub fn with_var(&self, v: &TypeVar) -> KindEnv {
        let mut env = self.clone();
        let prev = env.vars.insert(v.id, v.kind.clone());
        assert!(prev.is_none(), "type variable {} bound twice", v.id);
        env
    }

    pub fn with_vars<'a>(&self, vs: impl IntoIterator<Item = &'a TypeVar>) -> KindEnv {
        vs.into_iter().fold(self.clone(), |env, v| env.with_var(v))
    }
}

impl Default for KindEnv {
    fn default() -> Self {
        KindEnv::builtin()
    }
}

/// Term variables and their schemes (Γ). Lookup returns the innermost
/// binding. Extending is O(1) and shares the tail.
#[derive(Clone, Debug, Default)]
pub struct TypeEnv {
    head: Option<Arc<EnvNode>>,
}

#[derive(Debug)]
struct EnvNode {
    name: String,
    scheme: Scheme,
    next: Option<Arc<EnvNode>>,
}

impl TypeEnv {
    pub fn new() -> TypeEnv {
        TypeEnv::default()
    }

    pub fn extend(&self, name: &str, scheme: Scheme) -> TypeEnv {
        TypeEnv {
            head: Some(Arc::new(EnvNode {
                name: name.to_owned(),
                scheme,
                next: self.head.clone(),
            })),
        }
    }

    pub fn lookup(&self, name: &str) -> Option<&Scheme> {
        self.iter().find(|(n, _)| *n == name).map(|(_, s)| s)
    }

    /// Bindings innermost first, shadowed ones included.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &Scheme)> {
        let mut node = self.head.as_deref();
        std::iter::from_fn(move || {
            let n = node?;
            node = n.next.as_deref();
            Some((n.name.as_str(), &n.scheme))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star(id: u32) -> TypeVar {
        TypeVar::new(id, Kind::Star)
    }

    fn row(id: u32) -> TypeVar {
        TypeVar::new(id, Kind::Row)
    }

    fn name_age(order: &[&str]) -> RowType {
        RowType::closed(order.iter().map(|&l| {
            let ty = if l == "name" {
                Type::string()
            } else {
                Type::int()
            };
            (Label::new(l), ty)
        }))
    }

    #[test]
    fn canonical_rows_iterate_lexicographically() {
        let sorted = canonicalize_row(&name_age(&["age", "name"]));
        let swapped = canonicalize_row(&name_age(&["name", "age"]));
        assert_eq!(sorted, swapped);
        let labels: Vec<_> = swapped.fields.keys().map(Label::as_str).collect();
        assert_eq!(labels, ["age", "name"]);

        let open = canonicalize_row(&RowType::tail_only(row(3)));
        assert!(open.fields.is_empty());
        assert_eq!(open.tail, Some(row(3)));
    }

    #[test]
    fn canonicalize_folds_row_variables_into_tails() {
        let t = Type::app(Type::RecCon, Type::Var(row(1)));
        assert_eq!(canonicalize(&t), Type::record(RowType::tail_only(row(1))));
    }

    #[test]
    fn alpha_equal_examples() {
        let id_a = Scheme::new(
            vec![star(0)],
            Type::fun(Type::var(star(0)), Type::var(star(0))),
        );
        let id_b = Scheme::new(
            vec![star(7)],
            Type::fun(Type::var(star(7)), Type::var(star(7))),
        );
        assert!(alpha_equal(&id_a, &id_b));

        let r1 = Scheme::mono(Type::record(name_age(&["name", "age"])));
        let r2 = Scheme::mono(Type::record(name_age(&["age", "name"])));
        assert!(alpha_equal(&r1, &r2));

        let const_int = Scheme::new(vec![star(0)], Type::fun(Type::var(star(0)), Type::int()));
        assert!(!alpha_equal(&id_a, &const_int));
    }

    #[test]
    fn alpha_equal_requires_bijection() {
        // ∀a b. a -> b  vs  ∀a b. a -> a
        let two = Scheme::new(
            vec![star(0), star(1)],
            Type::fun(Type::var(star(0)), Type::var(star(1))),
        );
        let one = Scheme::new(
            vec![star(0), star(1)],
            Type::fun(Type::var(star(0)), Type::var(star(0))),
        );
        assert!(!alpha_equal(&two, &one));
        assert!(!alpha_equal(&one, &two));
        // free variables are not renamable
        let free_a = Scheme::mono(Type::var(star(0)));
        let free_b = Scheme::mono(Type::var(star(1)));
        assert!(!alpha_equal(&free_a, &free_b));
        assert!(alpha_equal(&free_a, &free_a));
        // kinds must agree
        let f = TypeVar::new(0, Kind::arrow(Kind::Star, Kind::Star));
        let g = TypeVar::new(0, Kind::arrow(Kind::Row, Kind::Star));
        let r = Scheme::new(vec![f.clone()], Type::app(Type::var(f), Type::int()));
        let s = Scheme::new(vec![g.clone()], Type::app(Type::var(g), Type::int()));
        assert!(!alpha_equal(&r, &s));
    }

    #[test]
    fn free_type_vars_examples() {
        let s = Scheme::new(
            vec![star(0)],
            Type::fun(Type::var(star(0)), Type::var(star(1))),
        );
        assert_eq!(free_type_vars(&s), BTreeSet::from([star(1)]));

        let open = Type::record(RowType::open(
            [(Label::new("name"), Type::string())],
            row(2),
        ));
        assert_eq!(free_type_vars(&open), BTreeSet::from([row(2)]));

        assert!(free_type_vars(&Type::int()).is_empty());

        let env = TypeEnv::new()
            .extend("x", Scheme::mono(Type::var(star(4))))
            .extend("s", s);
        assert_eq!(free_type_vars(&env), BTreeSet::from([star(1), star(4)]));
    }

    #[test]
    fn vars_in_order_follows_labels_then_tail() {
        let t = Type::fun(
            Type::record(RowType::open(
                [
                    (Label::new("z"), Type::var(star(5))),
                    (Label::new("a"), Type::var(star(9))),
                ],
                row(1),
            )),
            Type::var(star(5)),
        );
        let ids: Vec<u32> = t.vars_in_order().iter().map(|v| v.id).collect();
        assert_eq!(ids, [9, 5, 1]);
    }

    #[test]
    fn shallow_kinds() {
        assert_eq!(Type::list(Type::int()).shallow_kind(), Some(Kind::Star));
        assert_eq!(
            Type::con("List").shallow_kind(),
            Some(Kind::arrow(Kind::Star, Kind::Star))
        );
        assert_eq!(Type::Row(RowType::empty()).shallow_kind(), Some(Kind::Row));
        assert_eq!(Type::app(Type::int(), Type::int()).shallow_kind(), None);
        assert_eq!(Type::con("Nope").shallow_kind(), None);
    }

    #[test]
    fn env_lookup_is_innermost_first() {
        let env = TypeEnv::new()
            .extend("x", Scheme::mono(Type::int()))
            .extend("x", Scheme::mono(Type::string()));
        assert_eq!(env.lookup("x"), Some(&Scheme::mono(Type::string())));
        assert_eq!(env.iter().count(), 2);
        assert!(env.lookup("y").is_none());
    }

    #[test]
    fn scheme_canonical_renumbers_by_occurrence() {
        let s = Scheme::new(
            vec![row(40), star(12)],
            Type::fun(
                Type::record(RowType::open(
                    [(Label::new("name"), Type::var(star(12)))],
                    row(40),
                )),
                Type::var(star(12)),
            ),
        );
        let c = s.canonical();
        assert_eq!(c.quantified, vec![star(0), row(1)]);
        assert!(alpha_equal(&s, &c));
    }

    #[test]
    #[should_panic(expected = "duplicate label")]
    fn duplicate_row_labels_rejected() {
        RowType::closed([
            (Label::new("a"), Type::int()),
            (Label::new("a"), Type::bool()),
        ]);
    }

    #[test]
    fn identifier_class() {
        assert!(is_identifier("name"));
        assert!(is_identifier("x'"));
        assert!(is_identifier("_tmp1"));
        assert!(!is_identifier("1x"));
        assert!(!is_identifier("let"));
        assert!(!is_identifier(""));
    }
}
