//! Rule-file parser.
//!
//! One clause per line: `head :- atom, atom, ... .` with `%` starting a
//! comment. Identifiers starting with an uppercase letter or `_` are
//! variables; other identifiers and double-quoted strings are constants.

use super::atom::{Atom, Term};
use super::clause::Theory;
use super::symbols::{ArityConflict, Symbols};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: {source}")]
    Arity {
        line: usize,
        #[source]
        source: ArityConflict,
    },
    #[error("line {line}: head variable `{variable}` does not occur in the body")]
    RangeRestriction { line: usize, variable: String },
}

impl ParseError {
    pub fn line(&self) -> usize {
        match self {
            ParseError::Syntax { line, .. }
            | ParseError::Arity { line, .. }
            | ParseError::RangeRestriction { line, .. } => *line,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Quoted(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Neck,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    line: usize,
}

impl Lexer<'_> {
    fn err(&self, col: usize, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            line: self.line,
            column: col + 1,
            message: message.into(),
        }
    }

    /// Tokenizes one line, dropping any trailing comment.
    fn tokens(mut self) -> Result<Vec<(usize, Tok)>, ParseError> {
        let mut out = Vec::new();
        while let Some(&(col, ch)) = self.chars.peek() {
            match ch {
                c if c.is_whitespace() => {
                    self.chars.next();
                }
                '%' => break,
                '(' | ')' | ',' | '.' => {
                    self.chars.next();
                    out.push((
                        col,
                        match ch {
                            '(' => Tok::LParen,
                            ')' => Tok::RParen,
                            ',' => Tok::Comma,
                            _ => Tok::Dot,
                        },
                    ));
                }
                ':' => {
                    self.chars.next();
                    match self.chars.next() {
                        Some((_, '-')) => out.push((col, Tok::Neck)),
                        _ => return Err(self.err(col, "expected `:-`")),
                    }
                }
                '"' => {
                    self.chars.next();
                    let mut s = String::new();
                    loop {
                        match self.chars.next() {
                            Some((_, '"')) => break,
                            Some((_, '\\')) => match self.chars.next() {
                                Some((_, c @ ('"' | '\\'))) => s.push(c),
                                _ => return Err(self.err(col, "invalid escape in quoted constant")),
                            },
                            Some((_, '\t')) => {
                                return Err(self.err(col, "tab inside quoted constant"))
                            }
                            Some((_, c)) => s.push(c),
                            None => return Err(self.err(col, "unterminated quoted constant")),
                        }
                    }
                    out.push((col, Tok::Quoted(s)));
                }
                c if c.is_alphanumeric() || c == '_' => {
                    let mut s = String::new();
                    while let Some(&(_, c)) = self.chars.peek() {
                        if c.is_alphanumeric() || c == '_' {
                            s.push(c);
                            self.chars.next();
                        } else {
                            break;
                        }
                    }
                    out.push((col, Tok::Ident(s)));
                }
                ';' | '|' => return Err(self.err(col, "disjunction is not allowed in Horn clauses")),
                '\\' => return Err(self.err(col, "negation is not allowed in Horn clauses")),
                '-' => {
                    return Err(self.err(col, "implication arrows are not supported; write `head :- body.`"))
                }
                c => return Err(self.err(col, format!("unexpected character `{c}`"))),
            }
        }
        Ok(out)
    }
}

struct LineParser<'s> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    line: usize,
    end_col: usize,
    symbols: &'s mut Symbols,
}

impl LineParser<'_> {
    fn err(&self, message: impl Into<String>) -> ParseError {
        let column = self
            .toks
            .get(self.pos)
            .map_or(self.end_col, |(c, _)| *c)
            + 1;
        ParseError::Syntax {
            line: self.line,
            column,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        let name = match self.peek() {
            Some(Tok::Ident(n)) => n.clone(),
            _ => return Err(self.err("expected predicate name")),
        };
        if name == "not" {
            return Err(self.err("negation is not allowed in Horn clauses"));
        }
        self.pos += 1;
        self.expect(Tok::LParen, "`(`")?;
        let mut args = Vec::new();
        loop {
            let term = match self.peek().cloned() {
                Some(Tok::Ident(n)) => {
                    let first = n.chars().next().unwrap_or('a');
                    if first.is_uppercase() || first == '_' {
                        Term::Var(self.symbols.intern_variable(&n))
                    } else {
                        Term::Const(self.symbols.intern_constant(&n))
                    }
                }
                Some(Tok::Quoted(s)) => Term::Const(self.symbols.intern_constant(&s)),
                _ => return Err(self.err("expected a variable or constant")),
            };
            self.pos += 1;
            if matches!(self.toks.get(self.pos), Some((_, Tok::LParen))) {
                return Err(self.err("function symbols are not supported"));
            }
            args.push(term);
            match self.peek() {
                Some(Tok::Comma) => self.pos += 1,
                Some(Tok::RParen) => {
                    self.pos += 1;
                    break;
                }
                _ => return Err(self.err("expected `,` or `)`")),
            }
        }
        let pred = self
            .symbols
            .intern_predicate(&name, args.len())
            .map_err(|source| ParseError::Arity {
                line: self.line,
                source,
            })?;
        Ok(Atom::new(pred, args))
    }

    fn clause(&mut self) -> Result<(Atom, Vec<Atom>), ParseError> {
        let head = self.atom()?;
        self.expect(Tok::Neck, "`:-` (only rules with a body are accepted)")?;
        let mut body = vec![self.atom()?];
        loop {
            match self.peek() {
                Some(Tok::Comma) => {
                    self.pos += 1;
                    body.push(self.atom()?);
                }
                Some(Tok::Dot) => {
                    self.pos += 1;
                    break;
                }
                _ => return Err(self.err("expected `,` or `.`")),
            }
        }
        if self.pos != self.toks.len() {
            return Err(self.err("expected end of line after `.`"));
        }
        Ok((head, body))
    }
}

/// Parses a rule file into a fresh theory.
pub fn parse_theory(text: &str) -> Result<Theory, ParseError> {
    parse_theory_with(Symbols::new(), text)
}

/// Parses a rule file, interning into existing symbol tables.
pub fn parse_theory_with(symbols: Symbols, text: &str) -> Result<Theory, ParseError> {
    let mut theory = Theory::new(symbols);
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let lexer = Lexer {
            chars: raw.char_indices().peekable(),
            line,
        };
        let toks = lexer.tokens()?;
        if toks.is_empty() {
            continue;
        }
        let mut p = LineParser {
            toks,
            pos: 0,
            line,
            end_col: raw.chars().count(),
            symbols: &mut theory.symbols,
        };
        let (head, body) = p.clause()?;
        let id = theory.push(head, body);
        if let Some(v) = theory.clause(id).unrestricted_head_vars().first() {
            return Err(ParseError::RangeRestriction {
                line,
                variable: theory.symbols.variable_name(*v).to_owned(),
            });
        }
    }
    Ok(theory)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transitivity_rule() {
        let t = parse_theory("locatedIn(X,Z) :- locatedIn(X,Y), locatedIn(Y,Z).").unwrap();
        assert_eq!(t.len(), 1);
        let c = t.clause(0);
        assert_eq!(c.body.len(), 2);
        assert_eq!(
            c.head.display(&t.symbols).to_string(),
            "locatedIn(X,Z)"
        );
        assert_eq!(c.variables().len(), 3);
    }

    #[test]
    fn self_referential_clause() {
        let t = parse_theory("p(X) :- p(X).").unwrap();
        assert_eq!(t.clause(0).body.len(), 1);
    }

    #[test]
    fn malformed_reports_line() {
        let err = parse_theory("p(X :- q(X).").unwrap_err();
        assert_eq!(err.line(), 1);
        assert!(matches!(err, ParseError::Syntax { column: 5, .. }), "{err:?}");

        let err = parse_theory("% header\n\np(X) :- q(X).\nq(X) :- r(X)").unwrap_err();
        assert_eq!(err.line(), 4);
    }

    #[test]
    fn comments_and_whitespace() {
        let text = "% rules\n  p( X , Y ) :-q(X,Y) ,  r( Y ) . % trailing\n\n";
        let t = parse_theory(text).unwrap();
        assert_eq!(t.to_string(), "p(X,Y) :- q(X,Y), r(Y).\n");
    }

    #[test]
    fn rejects_non_horn() {
        assert!(parse_theory("p(X) :- q(X); r(X).").is_err());
        assert!(parse_theory("p(X) :- \\+ q(X).").is_err());
        assert!(parse_theory("p(X) :- not(q(X)).").is_err());
        assert!(parse_theory("q(X) -> p(X).").is_err());
        assert!(parse_theory("p(X) :- q(f(X)).").is_err());
        assert!(parse_theory("p(a).").is_err());
    }

    #[test]
    fn arity_conflict() {
        let err = parse_theory("p(X) :- q(X).\nq(X,Y) :- p(X), p(Y).").unwrap_err();
        assert!(matches!(err, ParseError::Arity { line: 2, .. }));
    }

    #[test]
    fn range_restriction() {
        let err = parse_theory("p(X,Y) :- q(X).").unwrap_err();
        assert_eq!(
            err,
            ParseError::RangeRestriction {
                line: 1,
                variable: "Y".into()
            }
        );
    }

    #[test]
    fn constants_in_rules() {
        let t = parse_theory("capital(X,\"New York\") :- city(X), in(X, usa).").unwrap();
        assert_eq!(
            t.to_string(),
            "capital(X,\"New York\") :- city(X), in(X,usa).\n"
        );
        assert_eq!(t.rule_constants().len(), 2);
    }
}
