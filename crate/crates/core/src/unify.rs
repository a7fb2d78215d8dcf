//! Substitutions, structural unification and row unification.
//!
//! Rows unify modulo field order. Two rows of unknown size are solved by
//! splitting each side's extra fields off into the other side's tail:
//!
//! ```text
//! {a:Int | r1} ~ {b:Bool | r2}   ==>   r1 := {b:Bool | r3},  r2 := {a:Int | r3}
//! ```
//!
//! Labels are unique within a row and every row has at most one tail, so the
//! answer is a single most general unifier.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::pretty::Renamer;
use crate::syntax::{Kind, Label, RowType, Type, TypeVar, VarSupply};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum UnifyError {
    #[error("{}", two_types("cannot unify", .0, "with", .1))]
    Mismatch(Type, Type),
    #[error("{}", occurs(.0, .1))]
    OccursCheck(TypeVar, Type),
    #[error("missing label `{0}`: the closed row `{1}` has no such field")]
    RowMissingLabel(Label, RowType),
    #[error("{}", tail_escape(.0, .1))]
    RowTailEscape(TypeVar, RowType),
    /// Raised when a substitution would merge a row tail holding a label the
    /// row already has. Record extension is the only way to get here.
    #[error("duplicate label `{0}`: the row `{1}` would contain it twice")]
    DuplicateLabel(Label, RowType),
}

fn two_types(before: &str, a: &Type, middle: &str, b: &Type) -> String {
    let mut names = Renamer::new();
    let a = names.type_to_string(a);
    let b = names.type_to_string(b);
    format!("{before} `{a}` {middle} `{b}`")
}

fn occurs(v: &TypeVar, t: &Type) -> String {
    let mut names = Renamer::new();
    let v = names.name(v);
    format!(
        "infinite type: `{v}` occurs in `{}`",
        names.type_to_string(t)
    )
}

fn tail_escape(v: &TypeVar, row: &RowType) -> String {
    let mut names = Renamer::new();
    let v = names.name(v);
    format!(
        "row variable `{v}` would have to contain itself to unify `{}`",
        names.row_to_string(row)
    )
}

/// An idempotent, kind-respecting map from variables to types. Row
/// variables map to `Type::Row`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Subst {
    map: BTreeMap<TypeVar, Type>,
}

impl Subst {
    pub fn empty() -> Subst {
        Subst::default()
    }

    /// `[v ↦ t]`, or the empty substitution if `t` is `v` itself.
    pub fn single(v: TypeVar, t: Type) -> Subst {
        let mut s = Subst::empty();
        if !is_identity(&v, &t) {
            s.map.insert(v, t);
        }
        s
    }

    pub fn from_bindings(bindings: impl IntoIterator<Item = (TypeVar, Type)>) -> Subst {
        let mut s = Subst::empty();
        for (v, t) in bindings {
            if !is_identity(&v, &t) {
                s.map.insert(v, t);
            }
        }
        s
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn get(&self, v: &TypeVar) -> Option<&Type> {
        self.map.get(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TypeVar, &Type)> {
        self.map.iter()
    }

    /// Applies the substitution.
    ///
    /// Panics if a row tail is replaced by a row that repeats one of the
    /// row's labels. Substitutions from [`unify`] never do that to the types
    /// they were computed from; use [`Subst::try_apply`] where types built by
    /// record extension are involved.
    pub fn apply(&self, t: &Type) -> Type {
        self.try_apply(t)
            .unwrap_or_else(|e| panic!("ill-formed substitution result: {e}"))
    }

    pub fn apply_row(&self, r: &RowType) -> RowType {
        self.try_apply_row(r)
            .unwrap_or_else(|e| panic!("ill-formed substitution result: {e}"))
    }

    pub fn try_apply(&self, t: &Type) -> Result<Type, UnifyError> {
        if self.is_empty() {
            return Ok(t.clone());
        }
        Ok(match t {
            Type::Var(v) => match self.map.get(v) {
                Some(bound) => bound.clone(),
                None => t.clone(),
            },
            Type::Con(_) | Type::RecCon => t.clone(),
            Type::App(f, a) => Type::app(self.try_apply(f)?, self.try_apply(a)?),
            Type::Fun(d, c) => Type::fun(self.try_apply(d)?, self.try_apply(c)?),
            Type::Row(row) => Type::Row(self.try_apply_row(row)?),
        })
    }

    pub fn try_apply_row(&self, r: &RowType) -> Result<RowType, UnifyError> {
        let mut fields = BTreeMap::new();
        for (label, ty) in &r.fields {
            fields.insert(label.clone(), self.try_apply(ty)?);
        }
        let mut tail = r.tail.clone();
        if let Some(bound) = r.tail.as_ref().and_then(|v| self.map.get(v)) {
            let bound = bound.as_row().expect("row variable bound to a non-row");
            for (label, ty) in bound.fields {
                if fields.contains_key(&label) {
                    let row = RowType {
                        fields,
                        tail: bound.tail,
                    };
                    return Err(UnifyError::DuplicateLabel(label, row));
                }
                fields.insert(label, ty);
            }
            tail = bound.tail;
        }
        Ok(RowType { fields, tail })
    }

    /// `outer ∘ inner`: applying the result equals applying `inner` and then
    /// `outer`.
    pub fn compose(outer: &Subst, inner: &Subst) -> Subst {
        Subst::try_compose(outer, inner)
            .unwrap_or_else(|e| panic!("ill-formed substitution result: {e}"))
    }

    pub fn try_compose(outer: &Subst, inner: &Subst) -> Result<Subst, UnifyError> {
        let mut map = BTreeMap::new();
        for (v, t) in &inner.map {
            let t = outer.try_apply(t)?;
            if !is_identity(v, &t) {
                map.insert(v.clone(), t);
            }
        }
        for (v, t) in &outer.map {
            if !inner.map.contains_key(v) {
                map.insert(v.clone(), t.clone());
            }
        }
        Ok(Subst { map })
    }

    /// True if applying twice equals applying once.
    pub fn is_idempotent(&self) -> bool {
        self.map.values().all(|t| match self.try_apply(t) {
            Ok(again) => again == *t,
            Err(_) => false,
        })
    }

    /// True if every binding preserves its variable's kind.
    pub fn is_kind_respecting(&self) -> bool {
        self.map
            .iter()
            .all(|(v, t)| t.shallow_kind().as_ref() == Some(&v.kind))
    }
}

fn is_identity(v: &TypeVar, t: &Type) -> bool {
    match t {
        Type::Var(w) => w.id == v.id,
        Type::Row(row) => row.fields.is_empty() && row.tail.as_ref().is_some_and(|w| w.id == v.id),
        _ => false,
    }
}

/// The most general unifier of two types of equal kind. Row positions are
/// compared modulo field order.
pub fn unify(t1: &Type, t2: &Type, supply: &mut VarSupply) -> Result<Subst, UnifyError> {
    if let (Some(r1), Some(r2)) = (t1.as_row(), t2.as_row()) {
        return unify_rows(&r1, &r2, supply);
    }
    match (t1, t2) {
        (Type::Var(a), Type::Var(b)) if a.id == b.id => Ok(Subst::empty()),
        (Type::Var(v), t) | (t, Type::Var(v)) => bind(v, t, t1, t2),
        (Type::Con(a), Type::Con(b)) if a == b => Ok(Subst::empty()),
        (Type::RecCon, Type::RecCon) => Ok(Subst::empty()),
        (Type::App(f1, a1), Type::App(f2, a2)) | (Type::Fun(f1, a1), Type::Fun(f2, a2)) => {
            let s1 = unify(f1, f2, supply)?;
            let s2 = unify(&s1.try_apply(a1)?, &s1.try_apply(a2)?, supply)?;
            Subst::try_compose(&s2, &s1)
        }
        _ => Err(UnifyError::Mismatch(t1.clone(), t2.clone())),
    }
}

fn bind(v: &TypeVar, t: &Type, left: &Type, right: &Type) -> Result<Subst, UnifyError> {
    if t.shallow_kind().as_ref() != Some(&v.kind) {
        return Err(UnifyError::Mismatch(left.clone(), right.clone()));
    }
    if t.occurs(v) {
        return Err(UnifyError::OccursCheck(v.clone(), t.clone()));
    }
    Ok(Subst::single(v.clone(), t.clone()))
}

fn bind_row(v: &TypeVar, row: RowType) -> Result<Subst, UnifyError> {
    debug_assert_eq!(v.kind, Kind::Row);
    let t = Type::Row(row);
    if is_identity(v, &t) {
        return Ok(Subst::empty());
    }
    if t.occurs(v) {
        return Err(UnifyError::OccursCheck(v.clone(), t));
    }
    Ok(Subst::single(v.clone(), t))
}

/// Unifies two rows of possibly unknown size.
///
/// 1. Fields present on both sides are unified pointwise.
/// 2. Fields present on one side only must fit into the other side's tail;
///    a closed row with no room reports the first missing label.
/// 3. Two distinct tails are bound to each other's leftovers over a shared
///    fresh tail. When one side has no leftovers its tail absorbs the other
///    side directly and no fresh variable is needed.
/// 4. A shared tail with leftovers on either side has no finite solution.
pub fn unify_rows(r1: &RowType, r2: &RowType, supply: &mut VarSupply) -> Result<Subst, UnifyError> {
    let mut subst = Subst::empty();
    for (label, t1) in &r1.fields {
        if let Some(t2) = r2.fields.get(label) {
            let step = unify(&subst.try_apply(t1)?, &subst.try_apply(t2)?, supply)?;
            subst = Subst::try_compose(&step, &subst)?;
        }
    }

    let left = subst.try_apply_row(r1)?;
    let right = subst.try_apply_row(r2)?;
    if left.tail != r1.tail || right.tail != r2.tail {
        // A field unification bound one of the tails; the rows have new
        // fields, so start over on the refined rows.
        let rest = unify_rows(&left, &right, supply)?;
        return Subst::try_compose(&rest, &subst);
    }

    let only_left: BTreeMap<Label, Type> = left
        .fields
        .iter()
        .filter(|(l, _)| !right.fields.contains_key(*l))
        .map(|(l, t)| (l.clone(), t.clone()))
        .collect();
    let only_right: BTreeMap<Label, Type> = right
        .fields
        .iter()
        .filter(|(l, _)| !left.fields.contains_key(*l))
        .map(|(l, t)| (l.clone(), t.clone()))
        .collect();
    let missing = |extra: &BTreeMap<Label, Type>, closed: &RowType| {
        let label = extra.keys().next().expect("nonempty").clone();
        UnifyError::RowMissingLabel(label, closed.clone())
    };

    let solved = match (&left.tail, &right.tail) {
        (None, None) => {
            if !only_right.is_empty() {
                return Err(missing(&only_right, &left));
            }
            if !only_left.is_empty() {
                return Err(missing(&only_left, &right));
            }
            Subst::empty()
        }
        (Some(t1), None) => {
            if !only_left.is_empty() {
                return Err(missing(&only_left, &right));
            }
            bind_row(
                t1,
                RowType {
                    fields: only_right,
                    tail: None,
                },
            )?
        }
        (None, Some(t2)) => {
            if !only_right.is_empty() {
                return Err(missing(&only_right, &left));
            }
            bind_row(
                t2,
                RowType {
                    fields: only_left,
                    tail: None,
                },
            )?
        }
        (Some(t1), Some(t2)) if t1.id == t2.id => {
            if only_left.is_empty() && only_right.is_empty() {
                Subst::empty()
            } else {
                let row = if only_left.is_empty() {
                    right.clone()
                } else {
                    left.clone()
                };
                return Err(UnifyError::RowTailEscape(t1.clone(), row));
            }
        }
        (Some(t1), Some(t2)) => {
            if only_right.is_empty() {
                bind_row(
                    t2,
                    RowType {
                        fields: only_left,
                        tail: Some(t1.clone()),
                    },
                )?
            } else if only_left.is_empty() {
                bind_row(
                    t1,
                    RowType {
                        fields: only_right,
                        tail: Some(t2.clone()),
                    },
                )?
            } else {
                let fresh = supply.fresh(Kind::Row);
                let s_right = bind_row(
                    t2,
                    RowType {
                        fields: only_left,
                        tail: Some(fresh.clone()),
                    },
                )?;
                let left_rest = s_right.try_apply_row(&RowType {
                    fields: only_right,
                    tail: Some(fresh),
                })?;
                let s_left = bind_row(t1, left_rest)?;
                Subst::try_compose(&s_left, &s_right)?
            }
        }
    };
    Subst::try_compose(&solved, &subst)
}

/// True if the two types are equal modulo row field order, which is plain
/// structural equality on canonical types.
pub fn equal_modulo_rows(a: &Type, b: &Type) -> bool {
    crate::syntax::canonicalize(a) == crate::syntax::canonicalize(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::alpha_equal_types;

    fn star(id: u32) -> TypeVar {
        TypeVar::new(id, Kind::Star)
    }

    fn row(id: u32) -> TypeVar {
        TypeVar::new(id, Kind::Row)
    }

    fn v(x: &TypeVar) -> Type {
        Type::var(x.clone())
    }

    fn fields(fs: &[(&str, Type)]) -> Vec<(Label, Type)> {
        fs.iter().map(|(l, t)| (Label::new(l), t.clone())).collect()
    }

    fn supply() -> VarSupply {
        VarSupply::starting_at(100)
    }

    /// unify, plus the soundness and idempotence checks every test wants.
    fn mgu(a: &Type, b: &Type) -> Result<Subst, UnifyError> {
        let s = unify(a, b, &mut supply())?;
        assert!(
            equal_modulo_rows(&s.apply(a), &s.apply(b)),
            "unsound: {s:?}"
        );
        assert!(s.is_idempotent(), "not idempotent: {s:?}");
        assert!(s.is_kind_respecting(), "kind-changing: {s:?}");
        Ok(s)
    }

    #[test]
    fn apply_fills_row_tails() {
        let rho = row(1);
        let rec = Type::record(RowType::open(
            fields(&[("name", Type::string())]),
            rho.clone(),
        ));
        let s = Subst::single(
            rho.clone(),
            Type::Row(RowType::closed(fields(&[("age", Type::int())]))),
        );
        let expected = Type::record(RowType::closed(fields(&[
            ("name", Type::string()),
            ("age", Type::int()),
        ])));
        assert_eq!(s.apply(&rec), expected);

        let s = Subst::single(rho, Type::Row(RowType::empty()));
        let expected = Type::record(RowType::closed(fields(&[("name", Type::string())])));
        assert_eq!(s.apply(&rec), expected);

        assert_eq!(Subst::empty().apply(&rec), rec);
    }

    #[test]
    fn apply_reports_duplicate_merges() {
        let rho = row(1);
        let rec = Type::record(RowType::open(fields(&[("a", Type::string())]), rho.clone()));
        let s = Subst::single(
            rho,
            Type::Row(RowType::closed(fields(&[("a", Type::int())]))),
        );
        assert!(matches!(
            s.try_apply(&rec),
            Err(UnifyError::DuplicateLabel(..))
        ));
    }

    #[test]
    fn compose_examples() {
        let s = Subst::single(star(0), Type::int());
        assert_eq!(Subst::compose(&Subst::empty(), &s), s);

        let beta_int = Subst::single(star(1), Type::int());
        let alpha_beta = Subst::single(star(0), v(&star(1)));
        let c = Subst::compose(&beta_int, &alpha_beta);
        assert_eq!(
            c,
            Subst::from_bindings([(star(0), Type::int()), (star(1), Type::int())])
        );

        // [ρ3 ↦ {}] ∘ [ρ1 ↦ {b:Bool | ρ3}]
        let (r1, r3) = (row(1), row(3));
        let outer = Subst::single(r3.clone(), Type::Row(RowType::empty()));
        let inner = Subst::single(
            r1.clone(),
            Type::Row(RowType::open(fields(&[("b", Type::bool())]), r3.clone())),
        );
        let c = Subst::compose(&outer, &inner);
        let expected = Subst::from_bindings([
            (
                r1.clone(),
                Type::Row(RowType::closed(fields(&[("b", Type::bool())]))),
            ),
            (r3, Type::Row(RowType::empty())),
        ]);
        assert_eq!(c, expected);
        // checked by applying both sides to Rec{a:Int | ρ1}
        let probe = Type::record(RowType::open(fields(&[("a", Type::int())]), r1));
        let stepwise = outer.apply(&inner.apply(&probe));
        assert_eq!(c.apply(&probe), stepwise);
        assert_eq!(
            stepwise,
            Type::record(RowType::closed(fields(&[
                ("a", Type::int()),
                ("b", Type::bool())
            ])))
        );
        assert!(c.is_idempotent());
    }

    #[test]
    fn classic_hm_cases() {
        let (a, b) = (star(0), star(1));
        let s = mgu(&Type::fun(v(&a), v(&a)), &Type::fun(Type::int(), v(&b))).unwrap();
        assert_eq!(
            s,
            Subst::from_bindings([(a.clone(), Type::int()), (b, Type::int())])
        );

        assert_eq!(
            mgu(&Type::int(), &Type::bool()),
            Err(UnifyError::Mismatch(Type::int(), Type::bool()))
        );
        assert_eq!(
            mgu(&v(&a), &Type::list(v(&a))),
            Err(UnifyError::OccursCheck(a.clone(), Type::list(v(&a))))
        );
        assert!(mgu(&v(&a), &v(&a)).unwrap().is_empty());
    }

    #[test]
    fn record_against_open_record() {
        let rho = row(1);
        let open = Type::record(RowType::open(
            fields(&[("name", Type::string())]),
            rho.clone(),
        ));
        let closed = Type::record(RowType::closed(fields(&[
            ("age", Type::int()),
            ("name", Type::string()),
        ])));
        let s = mgu(&open, &closed).unwrap();
        let expected = Subst::single(
            rho,
            Type::Row(RowType::closed(fields(&[("age", Type::int())]))),
        );
        assert_eq!(s, expected);
    }

    #[test]
    fn row_examples() {
        let s = unify_rows(&RowType::empty(), &RowType::empty(), &mut supply()).unwrap();
        assert!(s.is_empty());

        let (r1, r2) = (row(1), row(2));
        let mut sup = supply();
        let s = unify_rows(
            &RowType::open(fields(&[("a", Type::int())]), r1.clone()),
            &RowType::open(fields(&[("b", Type::bool())]), r2.clone()),
            &mut sup,
        )
        .unwrap();
        let r3 = TypeVar::new(100, Kind::Row);
        let expected = Subst::from_bindings([
            (
                r1,
                Type::Row(RowType::open(fields(&[("b", Type::bool())]), r3.clone())),
            ),
            (
                r2,
                Type::Row(RowType::open(fields(&[("a", Type::int())]), r3)),
            ),
        ]);
        assert_eq!(s, expected);

        let err = unify_rows(
            &RowType::closed(fields(&[("a", Type::int())])),
            &RowType::closed(fields(&[("a", Type::int()), ("b", Type::bool())])),
            &mut supply(),
        )
        .unwrap_err();
        assert!(matches!(err, UnifyError::RowMissingLabel(ref l, _) if l.as_str() == "b"));

        let err = unify_rows(
            &RowType::open(fields(&[("name", Type::int())]), row(1)),
            &RowType::closed(fields(&[("name", Type::string()), ("age", Type::int())])),
            &mut supply(),
        )
        .unwrap_err();
        assert_eq!(err, UnifyError::Mismatch(Type::int(), Type::string()));
    }

    #[test]
    fn shared_tail_with_leftovers_escapes() {
        let r = row(1);
        let err = unify_rows(
            &RowType::open(fields(&[("a", Type::int())]), r.clone()),
            &RowType::open(fields(&[("b", Type::int())]), r.clone()),
            &mut supply(),
        )
        .unwrap_err();
        assert!(matches!(err, UnifyError::RowTailEscape(ref v, _) if *v == r));

        let same = RowType::open(fields(&[("a", Type::int())]), r.clone());
        assert!(unify_rows(&same, &same, &mut supply()).unwrap().is_empty());
    }

    #[test]
    fn empty_open_row_absorbs_the_other_side() {
        let (r1, r2) = (row(1), row(2));
        let other = RowType::open(fields(&[("a", Type::int())]), r2);
        let s = unify_rows(&RowType::tail_only(r1.clone()), &other, &mut supply()).unwrap();
        assert_eq!(s, Subst::single(r1, Type::Row(other)));
    }

    #[test]
    fn row_occurs_check() {
        // {a: Rec{| r} | s} ~ {b:Int | r}  forces r := {a: Rec{|r} | ...}
        let (r, s_) = (row(1), row(2));
        let left = RowType::open(
            fields(&[("a", Type::record(RowType::tail_only(r.clone())))]),
            s_,
        );
        let right = RowType::open(fields(&[("b", Type::int())]), r);
        let err = unify_rows(&left, &right, &mut supply()).unwrap_err();
        assert!(matches!(err, UnifyError::OccursCheck(..)), "{err:?}");
    }

    #[test]
    fn field_unification_can_bind_a_tail() {
        // {a: Rec {| r}, c:Int | r} ~ {a: Rec {b:Bool | s} | t}
        let (r, s_, t) = (row(1), row(2), row(3));
        let left = RowType::open(
            fields(&[
                ("a", Type::record(RowType::tail_only(r.clone()))),
                ("c", Type::int()),
            ]),
            r.clone(),
        );
        let right = RowType::open(
            fields(&[(
                "a",
                Type::record(RowType::open(fields(&[("b", Type::bool())]), s_)),
            )]),
            t,
        );
        let subst = unify_rows(&left, &right, &mut supply()).unwrap();
        assert!(subst.is_idempotent());
        let (l, rr) = (Type::Row(left), Type::Row(right));
        assert!(equal_modulo_rows(&subst.apply(&l), &subst.apply(&rr)));
    }

    #[test]
    fn kind_mismatched_binding_is_rejected() {
        let f = TypeVar::new(0, Kind::arrow(Kind::Star, Kind::Star));
        let err = mgu(
            &Type::app(v(&f), Type::int()),
            &Type::record(RowType::empty()),
        );
        assert!(err.is_err());
        let a = star(1);
        assert!(mgu(&v(&a), &Type::con("List")).is_err());
    }

    #[test]
    fn order_of_fields_is_irrelevant() {
        let a = Type::record(RowType::closed(fields(&[
            ("x", Type::int()),
            ("y", v(&star(0))),
            ("z", Type::bool()),
        ])));
        let b = Type::record(RowType::open(
            fields(&[("z", v(&star(1))), ("x", Type::int())]),
            row(2),
        ));
        let s1 = mgu(&a, &b).unwrap();
        let s2 = mgu(&b, &a).unwrap();
        assert!(alpha_equal_types(&s1.apply(&a), &s2.apply(&a)));
    }
}
