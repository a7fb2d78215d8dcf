//! Printing of types, schemes and terms in the surface syntax.
//!
//! Variables are renamed `a`, `b`, ... `z`, `a1`, ... in order of first
//! occurrence, so the printed form of a type does not depend on the ids an
//! inference run happened to allocate. Row fields print in label order.

use std::collections::HashMap;
use std::fmt::{self, Write};

use crate::syntax::{Literal, RowType, Scheme, Term, TermKind, Type, TypeVar};

/// Assigns stable display names to type variables.
#[derive(Debug, Default)]
pub struct Renamer {
    names: HashMap<u32, usize>,
}

impl Renamer {
    pub fn new() -> Renamer {
        Renamer::default()
    }

    pub fn name(&mut self, v: &TypeVar) -> String {
        var_name(self.index(v))
    }

    fn index(&mut self, v: &TypeVar) -> usize {
        let next = self.names.len();
        *self.names.entry(v.id).or_insert(next)
    }

    pub fn type_to_string(&mut self, t: &Type) -> String {
        let mut out = String::new();
        self.write_type(&mut out, t).expect("writing to a String");
        out
    }

    pub fn row_to_string(&mut self, r: &RowType) -> String {
        let mut out = String::new();
        self.write_row(&mut out, r).expect("writing to a String");
        out
    }

    fn write_type(&mut self, out: &mut impl Write, t: &Type) -> fmt::Result {
        match t {
            Type::Fun(dom, cod) => {
                if matches!(**dom, Type::Fun(..)) {
                    out.write_char('(')?;
                    self.write_type(out, dom)?;
                    out.write_char(')')?;
                } else {
                    self.write_app(out, dom)?;
                }
                out.write_str(" -> ")?;
                self.write_type(out, cod)
            }
            _ => self.write_app(out, t),
        }
    }

    fn write_app(&mut self, out: &mut impl Write, t: &Type) -> fmt::Result {
        match t {
            Type::App(f, arg) => {
                self.write_app(out, f)?;
                out.write_char(' ')?;
                self.write_atom(out, arg)
            }
            _ => self.write_atom(out, t),
        }
    }

    fn write_atom(&mut self, out: &mut impl Write, t: &Type) -> fmt::Result {
        match t {
            Type::Var(v) => out.write_str(&self.name(v)),
            Type::Con(name) => out.write_str(name),
            Type::RecCon => out.write_str(crate::syntax::REC),
            Type::Row(row) => self.write_row(out, row),
            Type::App(..) | Type::Fun(..) => {
                out.write_char('(')?;
                self.write_type(out, t)?;
                out.write_char(')')
            }
        }
    }

    fn write_row(&mut self, out: &mut impl Write, row: &RowType) -> fmt::Result {
        out.write_char('{')?;
        for (i, (label, ty)) in row.fields.iter().enumerate() {
            if i > 0 {
                out.write_str(", ")?;
            }
            write!(out, "{label}:")?;
            self.write_type(out, ty)?;
        }
        if let Some(tail) = &row.tail {
            if !row.fields.is_empty() {
                out.write_char(' ')?;
            }
            write!(out, "| {}", self.name(tail))?;
        }
        out.write_char('}')
    }

    pub fn scheme_to_string(&mut self, s: &Scheme) -> String {
        // Name body variables first so quantifiers read in occurrence order.
        for v in s.body.vars_in_order() {
            self.index(&v);
        }
        let mut out = String::new();
        let mut quantified: Vec<&TypeVar> = s.quantified.iter().collect();
        quantified.sort_by_key(|v| self.index(v));
        for v in quantified {
            let _ = write!(out, "∀{}:{}. ", self.name(v), v.kind);
        }
        self.write_type(&mut out, &s.body)
            .expect("writing to a String");
        out
    }
}

fn var_name(i: usize) -> String {
    let letter = (b'a' + (i % 26) as u8) as char;
    match i / 26 {
        0 => letter.to_string(),
        n => format!("{letter}{n}"),
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&Renamer::new().type_to_string(self))
    }
}

impl fmt::Display for RowType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&Renamer::new().row_to_string(self))
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&Renamer::new().scheme_to_string(self))
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Int(n) => write!(f, "{n}"),
            Literal::Str(s) => {
                f.write_char('"')?;
                for c in s.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        '\t' => f.write_str("\\t")?,
                        c => f.write_char(c)?,
                    }
                }
                f.write_char('"')
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, self)
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, t: &Term) -> fmt::Result {
    match &t.kind {
        TermKind::Lam(x, body) => {
            write!(f, "\\{x}. ")?;
            write_term(f, body)
        }
        TermKind::Let(x, bound, body) => {
            write!(f, "let {x} = ")?;
            write_term(f, bound)?;
            f.write_str(" in ")?;
            write_term(f, body)
        }
        _ => write_app_term(f, t),
    }
}

fn write_app_term(f: &mut fmt::Formatter<'_>, t: &Term) -> fmt::Result {
    match &t.kind {
        TermKind::App(fun, arg) => {
            write_app_term(f, fun)?;
            f.write_char(' ')?;
            write_atom_term(f, arg)
        }
        _ => write_atom_term(f, t),
    }
}

fn write_atom_term(f: &mut fmt::Formatter<'_>, t: &Term) -> fmt::Result {
    match &t.kind {
        TermKind::Var(x) => f.write_str(x),
        TermKind::Lit(lit) => write!(f, "{lit}"),
        TermKind::Record(fields) => {
            f.write_char('{')?;
            for (i, (label, value)) in fields.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{label} = ")?;
                write_term(f, value)?;
            }
            f.write_char('}')
        }
        TermKind::Extend(label, value, record) => {
            write!(f, "{{{label} = ")?;
            write_term(f, value)?;
            f.write_str(" | ")?;
            write_term(f, record)?;
            f.write_char('}')
        }
        TermKind::Select(record, label) => {
            write_atom_term(f, record)?;
            write!(f, ".{label}")
        }
        TermKind::Restrict(record, label) => {
            write_atom_term(f, record)?;
            write!(f, " - {label}")
        }
        TermKind::Annot(inner, scheme) => {
            f.write_char('(')?;
            write_term(f, inner)?;
            write!(f, " : {scheme})")
        }
        TermKind::Lam(..) | TermKind::Let(..) | TermKind::App(..) => {
            f.write_char('(')?;
            write_term(f, t)?;
            f.write_char(')')
        }
    }
}
