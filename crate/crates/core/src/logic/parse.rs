//! ASCII syntax for [`Formula`].
//!
//! ```text
//! formula := unary ( ('&' | '|') unary )*        & binds tighter than |
//! unary   := '!' unary | '<' A '>' ('>=' k)? unary | '<~' A '>' ('>=' k)? unary
//!          | '[' A ']' unary | 'E>=' k unary | '@' x unary | 'down' x '.' formula
//!          | 'true' | 'false' | name | '(' formula ')'
//! ```
//!
//! A name bound by an enclosing `down` is a world variable, any other name a
//! proposition letter. Bound variables are renamed `x0, x1, …` in binder
//! order, skipping names that occur free.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use super::formula::Formula;
use crate::structure::Signature;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown proposition letter `{0}`")]
    UnknownProp(String),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
}

/// Parses and α-renames; names are checked against `sig` when given.
pub fn parse(text: &str, sig: Option<&Signature>) -> Result<Formula, ParseError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, scope: Vec::new() };
    let f = p.formula()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    if let Some(sig) = sig {
        if let Some(q) = f.props().into_iter().find(|q| sig.prop_index(q).is_none()) {
            return Err(ParseError::UnknownProp(q));
        }
        if let Some(a) = f.actions().into_iter().find(|a| sig.action_index(a).is_none()) {
            return Err(ParseError::UnknownAction(a));
        }
    }
    Ok(canonical_names(&f))
}

/// Renames bound variables to `x0, x1, …` in pre-order.
pub fn canonical_names(f: &Formula) -> Formula {
    let mut avoid: BTreeSet<String> = f.props();
    avoid.extend(f.free_vars());
    let mut next = 0usize;
    rename(f, &mut Vec::new(), &avoid, &mut next)
}

fn rename(f: &Formula, scope: &mut Vec<(String, String)>, avoid: &BTreeSet<String>, next: &mut usize) -> Formula {
    let lookup = |scope: &Vec<(String, String)>, x: &str| {
        scope.iter().rev().find(|(from, _)| from == x).map_or_else(|| x.to_string(), |(_, to)| to.clone())
    };
    let mut go = |g: &Formula, scope: &mut Vec<(String, String)>| Box::new(rename(g, scope, avoid, next));
    match f {
        Formula::True | Formula::False | Formula::Prop(_) => f.clone(),
        Formula::Var(x) => Formula::Var(lookup(scope, x)),
        Formula::Not(a) => Formula::Not(go(a, scope)),
        Formula::And(a, b) => {
            let a = go(a, scope);
            Formula::And(a, go(b, scope))
        }
        Formula::Or(a, b) => {
            let a = go(a, scope);
            Formula::Or(a, go(b, scope))
        }
        Formula::Diamond { action, grade, body } => Formula::Diamond { action: action.clone(), grade: *grade, body: go(body, scope) },
        Formula::Square { action, body } => Formula::Square { action: action.clone(), body: go(body, scope) },
        Formula::Back { action, grade, body } => Formula::Back { action: action.clone(), grade: *grade, body: go(body, scope) },
        Formula::Global { grade, body } => Formula::Global { grade: *grade, body: go(body, scope) },
        Formula::At(x, body) => Formula::At(lookup(scope, x), go(body, scope)),
        Formula::Down(x, body) => {
            let fresh = loop {
                let name = format!("x{next}");
                *next += 1;
                if !avoid.contains(&name) {
                    break name;
                }
            };
            scope.push((x.clone(), fresh.clone()));
            let body = rename(body, scope, avoid, next);
            scope.pop();
            Formula::Down(fresh, Box::new(body))
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    scope: Vec<String>,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> ParseError {
        ParseError::Syntax { pos: self.pos, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek_str(&mut self, s: &str) -> bool {
        self.skip_ws();
        self.src[self.pos..].starts_with(s.as_bytes())
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.peek_str(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{s}`")))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            let ok = c.is_ascii_alphabetic() || c == b'_' || (self.pos > start && (c.is_ascii_digit() || c == b'\''));
            if !ok {
                break;
            }
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("expected a name"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn number(&mut self) -> Result<usize, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
        match digits.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(k),
            Ok(_) => {
                self.pos = start;
                Err(self.error("grades start at 1"))
            }
            Err(_) => {
                self.pos = start;
                Err(self.error("expected a grade"))
            }
        }
    }

    fn grade(&mut self) -> Result<usize, ParseError> {
        if self.eat(">=") {
            self.number()
        } else {
            Ok(1)
        }
    }

    /// Whether a keyword follows, not as a prefix of a longer name.
    fn keyword(&mut self, kw: &str) -> bool {
        if !self.peek_str(kw) {
            return false;
        }
        let end = self.pos + kw.len();
        let boundary = self.src.get(end).is_none_or(|&c| !(c.is_ascii_alphanumeric() || c == b'_' || c == b'\''));
        if boundary {
            self.pos = end;
        }
        boundary
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut disjuncts = vec![self.conjunction()?];
        while self.eat("|") {
            disjuncts.push(self.conjunction()?);
        }
        Ok(disjuncts.into_iter().reduce(Formula::or).expect("nonempty"))
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut conjuncts = vec![self.unary()?];
        while self.eat("&") {
            conjuncts.push(self.unary()?);
        }
        Ok(conjuncts.into_iter().reduce(Formula::and).expect("nonempty"))
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        self.skip_ws();
        if self.eat("!") {
            return Ok(Formula::not(self.unary()?));
        }
        if self.eat("<~") {
            let action = self.ident()?;
            self.expect(">")?;
            let grade = self.grade()?;
            return Ok(Formula::back(&action, grade, self.unary()?));
        }
        if self.eat("<") {
            let action = self.ident()?;
            self.expect(">")?;
            let grade = self.grade()?;
            return Ok(Formula::graded(&action, grade, self.unary()?));
        }
        if self.eat("[") {
            let action = self.ident()?;
            self.expect("]")?;
            return Ok(Formula::boxed(&action, self.unary()?));
        }
        if self.eat("@") {
            let x = self.ident()?;
            return Ok(Formula::at(&x, self.unary()?));
        }
        if self.eat("(") {
            let f = self.formula()?;
            self.expect(")")?;
            return Ok(f);
        }
        if self.peek_str("E>=") {
            self.pos += 3;
            let grade = self.number()?;
            return Ok(Formula::global(grade, self.unary()?));
        }
        if self.keyword("down") {
            let x = self.ident()?;
            self.expect(".")?;
            self.scope.push(x.clone());
            let body = self.formula();
            self.scope.pop();
            return Ok(Formula::down(&x, body?));
        }
        if self.keyword("true") {
            return Ok(Formula::True);
        }
        if self.keyword("false") {
            return Ok(Formula::False);
        }
        let name = self.ident()?;
        Ok(if self.scope.contains(&name) { Formula::Var(name) } else { Formula::Prop(name) })
    }
}

fn grade_suffix(grade: usize) -> String {
    if grade == 1 {
        String::new()
    } else {
        format!(">={grade}")
    }
}

/// Fully parenthesized canonical form, accepted back by [`parse`].
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Prop(p) => write!(f, "{p}"),
            Formula::Var(x) => write!(f, "{x}"),
            Formula::Not(a) => write!(f, "!{a}"),
            Formula::And(a, b) => write!(f, "({a} & {b})"),
            Formula::Or(a, b) => write!(f, "({a} | {b})"),
            Formula::Diamond { action, grade, body } => write!(f, "<{action}>{} {body}", grade_suffix(*grade)),
            Formula::Square { action, body } => write!(f, "[{action}] {body}"),
            Formula::Back { action, grade, body } => write!(f, "<~{action}>{} {body}", grade_suffix(*grade)),
            Formula::Global { grade, body } => write!(f, "E>={grade} {body}"),
            Formula::Down(x, body) => write!(f, "(down {x}. {body})"),
            Formula::At(x, body) => write!(f, "@{x} {body}"),
        }
    }
}
