//! Lexer and recursive-descent parser for terms, types, kinds and schemes.
//!
//! Term grammar:
//!
//! ```text
//! term   := "\" ident "." term | "let" ident "=" term "in" term | atom+
//! atom   := ident | int | string | "(" term [":" scheme] ")" | record
//!         | atom "." ident | atom "-" ident
//! record := "{" [field ("," field)*] ["|" term] "}"    field := ident "=" term
//! ```
//!
//! Type grammar:
//!
//! ```text
//! scheme := ("forall" | "∀") binder+ "." scheme | type
//! binder := ident ":" kind | "(" ident ":" kind ")"
//! type   := tapp ["->" type]         tapp := tatom+
//! tatom  := Upper | lower | "(" type ")" | "{" [ident ":" type ("," ...)*] ["|" ident] "}"
//! kind   := ("*" | "row" | "(" kind ")") ["->" kind]
//! ```
//!
//! `--` starts a comment running to the end of the line.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

pub use crate::syntax::SourceSpan;
use crate::syntax::{
    is_identifier, Kind, Label, Literal, RowType, Scheme, Term, TermKind, Type, TypeVar,
};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ParseError {
    pub span: SourceSpan,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("expected ")?;
        match self.expected.as_slice() {
            [] => f.write_str("something else")?,
            [one] => f.write_str(one)?,
            [init @ .., last] => write!(f, "{} or {}", init.join(", "), last)?,
        }
        write!(f, ", found {}", self.found)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Str(String),
    Backslash,
    Dot,
    Comma,
    Pipe,
    Equals,
    Colon,
    Minus,
    Arrow,
    Star,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Let,
    In,
    Forall,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::Str(_) => "string literal".to_owned(),
            Tok::Eof => "end of input".to_owned(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::Backslash => "\\",
            Tok::Dot => ".",
            Tok::Comma => ",",
            Tok::Pipe => "|",
            Tok::Equals => "=",
            Tok::Colon => ":",
            Tok::Minus => "-",
            Tok::Arrow => "->",
            Tok::Star => "*",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Let => "let",
            Tok::In => "in",
            Tok::Forall => "forall",
            Tok::Ident(_) | Tok::Int(_) | Tok::Str(_) | Tok::Eof => "",
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    column: u32,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src,
            pos: 0,
            line: 1,
            column: 1,
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.src[self.pos..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn here(&self) -> SourceSpan {
        SourceSpan {
            start: self.pos,
            end: self.pos,
            line: self.line,
            column: self.column,
        }
    }

    fn error(&self, start: SourceSpan, expected: &str, found: String) -> ParseError {
        ParseError {
            span: SourceSpan {
                end: self.pos.max(start.start),
                ..start
            },
            expected: vec![expected.to_owned()],
            found,
        }
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('-') if self.peek2() == Some('-') => {
                    while !matches!(self.peek(), None | Some('\n')) {
                        self.bump();
                    }
                }
                _ => return,
            }
        }
    }

    fn tokenize(mut self) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
        let mut out = Vec::new();
        loop {
            self.skip_trivia();
            let start = self.here();
            let Some(c) = self.bump() else {
                out.push((Tok::Eof, start));
                return Ok(out);
            };
            let tok = match c {
                '\\' | 'λ' => Tok::Backslash,
                '∀' => Tok::Forall,
                '.' => Tok::Dot,
                ',' => Tok::Comma,
                '|' => Tok::Pipe,
                '=' => Tok::Equals,
                ':' => Tok::Colon,
                '*' => Tok::Star,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                '-' if self.peek() == Some('>') => {
                    self.bump();
                    Tok::Arrow
                }
                '→' => Tok::Arrow,
                '-' => Tok::Minus,
                '"' => Tok::Str(self.string_body(start)?),
                c if c.is_ascii_digit() => {
                    while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                        self.bump();
                    }
                    let text = &self.src[start.start..self.pos];
                    let n = text.parse().map_err(|_| {
                        self.error(start, "integer literal in range", format!("`{text}`"))
                    })?;
                    Tok::Int(n)
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    while self
                        .peek()
                        .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
                    {
                        self.bump();
                    }
                    match &self.src[start.start..self.pos] {
                        "let" => Tok::Let,
                        "in" => Tok::In,
                        "forall" => Tok::Forall,
                        word => Tok::Ident(word.to_owned()),
                    }
                }
                other => return Err(self.error(start, "a token", format!("character `{other}`"))),
            };
            out.push((
                tok,
                SourceSpan {
                    end: self.pos,
                    ..start
                },
            ));
        }
    }

    fn string_body(&mut self, start: SourceSpan) -> Result<String, ParseError> {
        let mut s = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error(start, "closing `\"`", "end of input".to_owned())),
                Some('"') => return Ok(s),
                Some('\\') => match self.bump() {
                    Some('"') => s.push('"'),
                    Some('\\') => s.push('\\'),
                    Some('n') => s.push('\n'),
                    Some('t') => s.push('\t'),
                    other => {
                        let found = other.map_or("end of input".to_owned(), |c| format!("`\\{c}`"));
                        return Err(self.error(start, "escape sequence", found));
                    }
                },
                Some(c) => s.push(c),
            }
        }
    }
}

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
    /// Type variables in scope while parsing a type: binder-introduced ones
    /// first, then free ones as they are met.
    tyvars: HashMap<String, TypeVar>,
    next_var: u32,
}

impl Parser {
    fn new(src: &str) -> Result<Parser, ParseError> {
        Ok(Parser {
            toks: Lexer::new(src).tokenize()?,
            pos: 0,
            tyvars: HashMap::new(),
            next_var: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn advance(&mut self) -> (Tok, SourceSpan) {
        let t = self.toks[self.pos].clone();
        if t.0 != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        ParseError {
            span: self.span(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().describe(),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<SourceSpan, ParseError> {
        if *self.peek() == tok {
            Ok(self.advance().1)
        } else {
            Err(self.error(&[&format!("`{}`", tok.symbol())]))
        }
    }

    fn ident(&mut self) -> Result<(String, SourceSpan), ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let span = self.advance().1;
                Ok((name, span))
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    fn label(&mut self) -> Result<(Label, SourceSpan), ParseError> {
        let (name, span) = self.ident()?;
        debug_assert!(is_identifier(&name));
        Ok((Label::new(&name), span))
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Eof => Ok(()),
            _ => Err(self.error(&["end of input"])),
        }
    }

    // ---- terms ----

    fn term(&mut self) -> Result<Term, ParseError> {
        let start = self.span();
        match self.peek() {
            Tok::Backslash => {
                self.advance();
                let (x, _) = self.ident()?;
                self.expect(Tok::Dot)?;
                let body = self.term()?;
                let span = start.to(body.span);
                Ok(Term::with_span(TermKind::Lam(x, Box::new(body)), span))
            }
            Tok::Let => {
                self.advance();
                let (x, _) = self.ident()?;
                self.expect(Tok::Equals)?;
                let bound = self.term()?;
                self.expect(Tok::In)?;
                let body = self.term()?;
                let span = start.to(body.span);
                Ok(Term::with_span(
                    TermKind::Let(x, Box::new(bound), Box::new(body)),
                    span,
                ))
            }
            _ => self.application(),
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Ident(_) | Tok::Int(_) | Tok::Str(_) | Tok::LParen | Tok::LBrace
        )
    }

    fn application(&mut self) -> Result<Term, ParseError> {
        if !self.starts_atom() {
            return Err(self.error(&["term"]));
        }
        let mut fun = self.postfix()?;
        while self.starts_atom() {
            let arg = self.postfix()?;
            let span = fun.span.to(arg.span);
            fun = Term::with_span(TermKind::App(Box::new(fun), Box::new(arg)), span);
        }
        Ok(fun)
    }

    fn postfix(&mut self) -> Result<Term, ParseError> {
        let mut t = self.atom()?;
        loop {
            match self.peek() {
                Tok::Dot => {
                    self.advance();
                    let (label, lspan) = self.label()?;
                    let span = t.span.to(lspan);
                    t = Term::with_span(TermKind::Select(Box::new(t), label), span);
                }
                Tok::Minus => {
                    self.advance();
                    let (label, lspan) = self.label()?;
                    let span = t.span.to(lspan);
                    t = Term::with_span(TermKind::Restrict(Box::new(t), label), span);
                }
                _ => return Ok(t),
            }
        }
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Ident(x) => {
                self.advance();
                Ok(Term::with_span(TermKind::Var(x), start))
            }
            Tok::Int(n) => {
                self.advance();
                Ok(Term::with_span(TermKind::Lit(Literal::Int(n)), start))
            }
            Tok::Str(s) => {
                self.advance();
                Ok(Term::with_span(TermKind::Lit(Literal::Str(s)), start))
            }
            Tok::LParen => {
                self.advance();
                let inner = self.term()?;
                if *self.peek() == Tok::Colon {
                    self.advance();
                    let scheme = self.scheme()?;
                    let end = self.expect(Tok::RParen)?;
                    let span = start.to(end);
                    return Ok(Term::with_span(
                        TermKind::Annot(Box::new(inner), scheme),
                        span,
                    ));
                }
                if *self.peek() != Tok::RParen {
                    return Err(self.error(&["`)`", "`:`"]));
                }
                let end = self.advance().1;
                Ok(Term {
                    span: start.to(end),
                    ..inner
                })
            }
            Tok::LBrace => self.record(),
            _ => Err(self.error(&["term"])),
        }
    }

    fn record(&mut self) -> Result<Term, ParseError> {
        let start = self.expect(Tok::LBrace)?;
        let mut fields: Vec<(Label, Term, SourceSpan)> = Vec::new();
        if *self.peek() != Tok::RBrace {
            loop {
                let (label, lspan) = self.label()?;
                if fields.iter().any(|(l, _, _)| *l == label) {
                    return Err(ParseError {
                        span: lspan,
                        expected: vec!["distinct field labels".to_owned()],
                        found: format!("duplicate label `{label}`"),
                    });
                }
                self.expect(Tok::Equals)?;
                let value = self.term()?;
                fields.push((label, value, lspan));
                match self.peek() {
                    Tok::Comma => {
                        self.advance();
                    }
                    Tok::Pipe | Tok::RBrace => break,
                    _ => return Err(self.error(&["`,`", "`|`", "`}`"])),
                }
            }
        }
        if *self.peek() == Tok::Pipe {
            if fields.is_empty() {
                return Err(self.error(&["field"]));
            }
            self.advance();
            let mut record = self.term()?;
            let end = self.expect(Tok::RBrace)?;
            let span = start.to(end);
            // {a = 1, b = 2 | r} extends r with b, then a.
            for (label, value, _) in fields.into_iter().rev() {
                record = Term::with_span(
                    TermKind::Extend(label, Box::new(value), Box::new(record)),
                    span,
                );
            }
            return Ok(record);
        }
        let end = self.expect(Tok::RBrace)?;
        let map: BTreeMap<Label, Term> = fields.into_iter().map(|(l, t, _)| (l, t)).collect();
        Ok(Term::with_span(TermKind::Record(map), start.to(end)))
    }

    // ---- kinds ----

    fn kind(&mut self) -> Result<Kind, ParseError> {
        let param = match self.peek().clone() {
            Tok::Star => {
                self.advance();
                Kind::Star
            }
            Tok::Ident(w) if w == "row" => {
                self.advance();
                Kind::Row
            }
            Tok::LParen => {
                self.advance();
                let k = self.kind()?;
                self.expect(Tok::RParen)?;
                k
            }
            _ => return Err(self.error(&["`*`", "`row`", "`(`"])),
        };
        if *self.peek() == Tok::Arrow {
            self.advance();
            Ok(Kind::arrow(param, self.kind()?))
        } else {
            Ok(param)
        }
    }

    // ---- types ----

    fn fresh_var(&mut self, kind: Kind) -> TypeVar {
        let v = TypeVar::new(self.next_var, kind);
        self.next_var += 1;
        v
    }

    /// A type variable by name. Unbound names become free variables whose
    /// kind is read off their first position: `row` as a row tail, `*`
    /// elsewhere.
    fn named_var(&mut self, name: &str, kind_here: Kind) -> TypeVar {
        if let Some(v) = self.tyvars.get(name) {
            return v.clone();
        }
        let v = self.fresh_var(kind_here);
        self.tyvars.insert(name.to_owned(), v.clone());
        v
    }

    fn scheme(&mut self) -> Result<Scheme, ParseError> {
        let saved = self.tyvars.clone();
        let mut quantified: Vec<TypeVar> = Vec::new();
        let mut names: Vec<String> = Vec::new();
        while *self.peek() == Tok::Forall {
            self.advance();
            loop {
                let parenthesized = *self.peek() == Tok::LParen;
                if parenthesized {
                    self.advance();
                }
                let (name, nspan) = self.ident()?;
                if names.contains(&name) {
                    return Err(ParseError {
                        span: nspan,
                        expected: vec!["distinct quantified variables".to_owned()],
                        found: format!("second binder for `{name}`"),
                    });
                }
                self.expect(Tok::Colon)?;
                let kind = self.kind()?;
                if parenthesized {
                    self.expect(Tok::RParen)?;
                }
                let v = self.fresh_var(kind);
                self.tyvars.insert(name.clone(), v.clone());
                names.push(name);
                quantified.push(v);
                match self.peek() {
                    Tok::Dot => {
                        self.advance();
                        break;
                    }
                    Tok::Ident(_) | Tok::LParen => {}
                    _ => return Err(self.error(&["`.`", "binder"])),
                }
            }
        }
        let body = self.ty();
        self.tyvars = saved;
        Ok(Scheme::new(quantified, body?))
    }

    fn ty(&mut self) -> Result<Type, ParseError> {
        let dom = self.type_app()?;
        if *self.peek() == Tok::Arrow {
            self.advance();
            Ok(Type::fun(dom, self.ty()?))
        } else {
            Ok(dom)
        }
    }

    fn starts_type_atom(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_) | Tok::LParen | Tok::LBrace)
    }

    fn type_app(&mut self) -> Result<Type, ParseError> {
        if !self.starts_type_atom() {
            return Err(self.error(&["type"]));
        }
        let mut t = self.type_atom()?;
        while self.starts_type_atom() {
            t = Type::app(t, self.type_atom()?);
        }
        Ok(t)
    }

    fn type_atom(&mut self) -> Result<Type, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.advance();
                if name.starts_with(|c: char| c.is_ascii_uppercase()) {
                    Ok(Type::con(&name))
                } else {
                    Ok(Type::var(self.named_var(&name, Kind::Star)))
                }
            }
            Tok::LParen => {
                self.advance();
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::LBrace => Ok(Type::Row(self.row()?)),
            _ => Err(self.error(&["type"])),
        }
    }

    fn row(&mut self) -> Result<RowType, ParseError> {
        self.expect(Tok::LBrace)?;
        let mut fields = BTreeMap::new();
        if !matches!(self.peek(), Tok::RBrace | Tok::Pipe) {
            loop {
                let (label, lspan) = self.label()?;
                if fields.contains_key(&label) {
                    return Err(ParseError {
                        span: lspan,
                        expected: vec!["distinct row labels".to_owned()],
                        found: format!("duplicate label `{label}`"),
                    });
                }
                self.expect(Tok::Colon)?;
                let ty = self.ty()?;
                fields.insert(label, ty);
                match self.peek() {
                    Tok::Comma => {
                        self.advance();
                    }
                    Tok::Pipe | Tok::RBrace => break,
                    _ => return Err(self.error(&["`,`", "`|`", "`}`"])),
                }
            }
        }
        let tail = if *self.peek() == Tok::Pipe {
            self.advance();
            let (name, span) = self.ident()?;
            if name.starts_with(|c: char| c.is_ascii_uppercase()) {
                return Err(ParseError {
                    span,
                    expected: vec!["row variable".to_owned()],
                    found: format!("constructor `{name}`"),
                });
            }
            Some(self.named_var(&name, Kind::Row))
        } else {
            None
        };
        self.expect(Tok::RBrace)?;
        Ok(RowType { fields, tail })
    }
}

/// Parses a complete program term.
pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

/// Parses a type. Free type variables get ids from 0 in order of appearance.
pub fn parse_type(src: &str) -> Result<Type, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.ty()?;
    p.finish()?;
    Ok(t)
}

/// Parses a possibly quantified type such as `∀r:row. Rec {name:String | r}`.
pub fn parse_scheme(src: &str) -> Result<Scheme, ParseError> {
    let mut p = Parser::new(src)?;
    let s = p.scheme()?;
    p.finish()?;
    Ok(s)
}

pub fn parse_kind(src: &str) -> Result<Kind, ParseError> {
    let mut p = Parser::new(src)?;
    let k = p.kind()?;
    p.finish()?;
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::alpha_equal_types;

    fn lbl(s: &str) -> Label {
        Label::new(s)
    }

    #[test]
    fn lambda() {
        assert_eq!(
            parse_term(r"\x. x").unwrap(),
            Term::lam("x", Term::var("x"))
        );
        assert_eq!(parse_term("λx. x").unwrap(), Term::lam("x", Term::var("x")));
    }

    #[test]
    fn record_literal() {
        let t = parse_term(r#"{name = "Ana", age = 7}"#).unwrap();
        let expected = Term::record([(lbl("name"), Term::str("Ana")), (lbl("age"), Term::int(7))]);
        assert_eq!(t, expected);
    }

    #[test]
    fn select_restrict_extend() {
        assert_eq!(
            parse_term("r.name").unwrap(),
            Term::select(Term::var("r"), "name")
        );
        assert_eq!(
            parse_term("r - name").unwrap(),
            Term::restrict(Term::var("r"), "name")
        );
        assert_eq!(
            parse_term("{a = 1, b = 2 | r}").unwrap(),
            Term::extend(
                "a",
                Term::int(1),
                Term::extend("b", Term::int(2), Term::var("r"))
            )
        );
        // postfix binds tighter than application
        assert_eq!(
            parse_term("f r.a").unwrap(),
            Term::app(Term::var("f"), Term::select(Term::var("r"), "a"))
        );
        assert_eq!(
            parse_term("r - a.b").unwrap(),
            Term::select(Term::restrict(Term::var("r"), "a"), "b")
        );
    }

    #[test]
    fn let_and_application() {
        let t = parse_term("let id = \\x. x in id id 1").unwrap();
        let expected = Term::let_(
            "id",
            Term::lam("x", Term::var("x")),
            Term::app(Term::app(Term::var("id"), Term::var("id")), Term::int(1)),
        );
        assert_eq!(t, expected);
    }

    #[test]
    fn comments_are_skipped() {
        let t = parse_term("-- the identity\n\\x. -- binder\n x").unwrap();
        assert_eq!(t, Term::lam("x", Term::var("x")));
    }

    #[test]
    fn duplicate_record_label_is_an_error() {
        let err = parse_term("{a = 1, b = 2, a = 3}").unwrap_err();
        assert_eq!(err.span.column, 16);
        assert!(err.found.contains("duplicate label `a`"));
        assert!(parse_term("{a = 1, a = 2 | r}").is_err());
    }

    #[test]
    fn error_positions() {
        let err = parse_term("\\x x").unwrap_err();
        assert_eq!((err.span.line, err.span.column), (1, 4));
        assert_eq!(err.expected, ["`.`"]);
        assert_eq!(err.found, "identifier `x`");

        let err = parse_term("let x = 1\nin\n  )").unwrap_err();
        assert_eq!((err.span.line, err.span.column), (3, 3));

        let err = parse_term("\"open").unwrap_err();
        assert_eq!(err.span.start, 0);
        assert_eq!(err.found, "end of input");

        let err = parse_term("x # y").unwrap_err();
        assert_eq!(err.span.column, 3);

        let err = parse_term("").unwrap_err();
        assert_eq!(err.found, "end of input");
    }

    #[test]
    fn type_application() {
        assert_eq!(parse_type("List Int").unwrap(), Type::list(Type::int()));
    }

    #[test]
    fn record_type_with_open_row() {
        let t = parse_type("Rec {name:String | r}").unwrap();
        let Type::App(f, arg) = &t else {
            panic!("{t:?}")
        };
        assert_eq!(**f, Type::RecCon);
        let Type::Row(row) = &**arg else {
            panic!("{arg:?}")
        };
        assert_eq!(row.fields.get(&lbl("name")), Some(&Type::string()));
        assert_eq!(row.tail.as_ref().map(|v| v.kind.clone()), Some(Kind::Row));
    }

    #[test]
    fn empty_row() {
        assert_eq!(parse_type("{}").unwrap(), Type::Row(RowType::empty()));
        let open = parse_type("{| r}").unwrap();
        assert_eq!(open.as_row().unwrap().tail.unwrap().kind, Kind::Row);
    }

    #[test]
    fn duplicate_row_label_is_an_error() {
        assert!(parse_type("{a:Int, a:Bool}").is_err());
    }

    #[test]
    fn arrows_associate_right_and_application_left() {
        let t = parse_type("a -> b -> List a").unwrap();
        let expected = parse_type("a -> (b -> (List a))").unwrap();
        assert!(alpha_equal_types(&t, &expected));
        let Type::Fun(_, rest) = &t else { panic!() };
        assert!(matches!(**rest, Type::Fun(..)));
    }

    #[test]
    fn schemes_and_kinds() {
        let s = parse_scheme("∀r:row. Rec {name:String | r}").unwrap();
        assert_eq!(s.quantified.len(), 1);
        assert_eq!(s.quantified[0].kind, Kind::Row);
        assert_eq!(s.to_string(), "∀a:row. Rec {name:String | a}");

        let s = parse_scheme("forall (f:* -> *) (a:*). f a -> f a").unwrap();
        assert_eq!(s.quantified[0].kind, Kind::arrow(Kind::Star, Kind::Star));
        assert_eq!(s.to_string(), "∀a:* -> *. ∀b:*. a b -> a b");

        // a row-kinded binder used bare is a row
        let s = parse_scheme("∀r:row. r").unwrap();
        assert!(matches!(s.body, Type::Row(_)));

        assert_eq!(
            parse_kind("(* -> *) -> row").unwrap().to_string(),
            "(* -> *) -> row"
        );
        assert!(parse_scheme("∀a:* a:*. a").is_err());
    }

    #[test]
    fn annotation_term() {
        let t = parse_term("(\\x. x : ∀a:*. a -> a)").unwrap();
        assert!(matches!(t.kind, TermKind::Annot(..)));
        assert_eq!(t.to_string(), "(\\x. x : ∀a:*. a -> a)");
    }

    #[test]
    fn spans_cover_subterms() {
        let src = "f (g x)";
        let t = parse_term(src).unwrap();
        assert_eq!((t.span.start, t.span.end), (0, 7));
        let TermKind::App(_, arg) = &t.kind else {
            panic!()
        };
        assert_eq!(&src[arg.span.start..arg.span.end], "(g x)");
    }
}
