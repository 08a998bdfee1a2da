//! Text syntax for atoms, instances, queries and determinacy instances.
//!
//! ```text
//! % comment (also `#`)
//! R(a, b). S(b, c1!).              instance: atoms ending in `.`
//! V1(x,y) :- R(x,z), S(z,y).       query: head, `:-`, body, `.`
//! query: Q(x) :- R(x,y).           the query line of a determinacy file
//! ```
//!
//! Identifiers match `[A-Za-z_][A-Za-z0-9_^']*`. An identifier followed by
//! `!` is a constant and must start with a lowercase letter. `_n<digits>` is
//! a labeled null. Everything else in argument position is a variable.

use crate::cq::{Atom, ConjunctiveQuery, Name, NullId, Signature, Term};
use crate::error::{Error, Result};

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src,
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            line: self.line,
            column: self.col,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c == '%' || c == '#' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.src.len()
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(s) {
            for _ in s.chars() {
                self.bump();
            }
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            match self.peek() {
                Some(c) => self.err(format!("expected `{s}`, found `{c}`")),
                None => self.err(format!("expected `{s}`, found end of input")),
            }
        }
    }

    fn ident(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                self.bump();
            }
            Some(c) => return self.err(format!("expected identifier, found `{c}`")),
            None => return self.err("expected identifier, found end of input"),
        }
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' || c == '^' || c == '\'' {
                self.bump();
            } else {
                break;
            }
        }
        Ok(&self.src[start..self.pos])
    }

    fn term(&mut self) -> Result<Term> {
        self.skip_ws();
        let (line, col) = (self.line, self.col);
        let name = self.ident()?;
        if self.peek() == Some('!') {
            self.bump();
            if !name.starts_with(|c: char| c.is_ascii_lowercase()) {
                return Err(Error::Parse {
                    line,
                    column: col,
                    message: format!("constant `{name}` must start with a lowercase letter"),
                });
            }
            return Ok(Term::constant(name));
        }
        if let Some(digits) = name.strip_prefix("_n") {
            if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                let id = digits.parse().map_err(|_| Error::Parse {
                    line,
                    column: col,
                    message: format!("null id `{digits}` out of range"),
                })?;
                return Ok(Term::Null(NullId(id)));
            }
        }
        Ok(Term::var(name))
    }

    fn atom(&mut self) -> Result<Atom> {
        let pred = self.ident()?;
        self.expect("(")?;
        let mut args = Vec::new();
        if !self.eat(")") {
            loop {
                args.push(self.term()?);
                if self.eat(")") {
                    break;
                }
                self.expect(",")?;
            }
        }
        if args.is_empty() {
            return self.err(format!("atom `{pred}` has no arguments"));
        }
        Ok(Atom::new(pred, args))
    }

    /// `Name(x, ...) :- body.`; the head lists free variables.
    fn query(&mut self) -> Result<(Name, ConjunctiveQuery)> {
        let (line, col) = {
            self.skip_ws();
            (self.line, self.col)
        };
        let name = self.ident()?;
        self.expect("(")?;
        let mut free = Vec::new();
        if !self.eat(")") {
            loop {
                match self.term()? {
                    Term::Variable(v) => free.push(v),
                    other => return self.err(format!("`{other}` cannot be a free variable")),
                }
                if self.eat(")") {
                    break;
                }
                self.expect(",")?;
            }
        }
        self.expect(":-")?;
        let mut body = Vec::new();
        loop {
            body.push(self.atom()?);
            if self.eat(".") {
                break;
            }
            self.expect(",")?;
        }
        let q = ConjunctiveQuery::new(&free, body).map_err(|e| Error::Parse {
            line,
            column: col,
            message: e.to_string(),
        })?;
        Ok((name.into(), q))
    }
}

pub fn parse_term(src: &str) -> Result<Term> {
    let mut lx = Lexer::new(src);
    let t = lx.term()?;
    if !lx.at_end() {
        return lx.err("trailing input after term");
    }
    Ok(t)
}

pub fn parse_atom(src: &str) -> Result<Atom> {
    let mut lx = Lexer::new(src);
    let a = lx.atom()?;
    lx.eat(".");
    if !lx.at_end() {
        return lx.err("trailing input after atom");
    }
    Ok(a)
}

/// A list of atoms, each terminated by `.`.
pub fn parse_instance(src: &str) -> Result<Vec<Atom>> {
    let mut lx = Lexer::new(src);
    let mut out = Vec::new();
    while !lx.at_end() {
        out.push(lx.atom()?);
        lx.expect(".")?;
    }
    Ok(out)
}

pub fn parse_query(src: &str) -> Result<(Name, ConjunctiveQuery)> {
    let mut lx = Lexer::new(src);
    let q = lx.query()?;
    if !lx.at_end() {
        return lx.err("trailing input after query");
    }
    Ok(q)
}

/// A determinacy instance: named views, then `query:` and the query.
#[derive(Clone, Debug)]
pub struct ParsedDeterminacy {
    pub views: Vec<(Name, ConjunctiveQuery)>,
    pub query: (Name, ConjunctiveQuery),
}

pub fn parse_determinacy(src: &str) -> Result<ParsedDeterminacy> {
    let mut lx = Lexer::new(src);
    let mut views: Vec<(Name, ConjunctiveQuery)> = Vec::new();
    loop {
        if lx.at_end() {
            return lx.err("missing `query:` line");
        }
        if lx.eat("query:") {
            let query = lx.query()?;
            if !lx.at_end() {
                return lx.err("input after the query");
            }
            return Ok(ParsedDeterminacy { views, query });
        }
        let (line, column) = (lx.line, lx.col);
        let v = lx.query()?;
        if views.iter().any(|(n, _)| *n == v.0) {
            return Err(Error::Parse {
                line,
                column,
                message: format!("view `{}` defined twice", v.0),
            });
        }
        views.push(v);
    }
}

/// The smallest signature covering `atoms`: every predicate at its arity and
/// every constant.
pub fn infer_signature<'a>(atoms: impl IntoIterator<Item = &'a Atom>) -> Result<Signature> {
    let mut sig = Signature::new();
    for a in atoms {
        sig.add_predicate(&a.predicate, a.args.len())?;
        for t in &a.args {
            if let Term::Constant(c) = t {
                sig.add_constant(c)?;
            }
        }
    }
    Ok(sig)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn terms() {
        assert_eq!(parse_term("c1!").unwrap(), Term::constant("c1"));
        assert_eq!(parse_term("x").unwrap(), Term::var("x"));
        assert_eq!(parse_term("_n12").unwrap(), Term::Null(NullId(12)));
        assert_eq!(parse_term("_nx").unwrap(), Term::var("_nx"));
        assert!(parse_term("C!").is_err());
    }

    #[test]
    fn query_round_trip() {
        let (name, q) = parse_query("Q(x,y) :- R(x,z), S(z,y).").unwrap();
        assert_eq!(&*name, "Q");
        assert_eq!(q.free_vars().len(), 2);
        let (_, again) = parse_query(&q.to_string()).unwrap();
        assert_eq!(q, again);
    }

    #[test]
    fn instance_with_comments() {
        let atoms = parse_instance("% two atoms\nR(a,b). # trailing\nS(b,c1!).").unwrap();
        assert_eq!(atoms.len(), 2);
        let sig = infer_signature(&atoms).unwrap();
        assert!(sig.has_constant("c1"));
    }

    #[test]
    fn errors_carry_position() {
        match parse_instance("R(a,b).\nS(b c).") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 5)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn determinacy_file() {
        let d = parse_determinacy("V(x) :- R(x,y).\nquery: Q(x) :- R(x,y).\n").unwrap();
        assert_eq!(d.views.len(), 1);
        assert!(parse_determinacy("V(x) :- R(x,y).").is_err());
        assert!(parse_determinacy("V(x) :- R(x,y). V(x) :- R(y,x). query: Q() :- R(x,x).").is_err());
    }
}
