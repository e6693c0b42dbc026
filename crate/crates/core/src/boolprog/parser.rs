//! Recursive-descent parser for the `.bp` program format and formula files.
//!
//! ```text
//! decl  := ("high" | "low") ident ("," ident)* ";"
//! stmt  := simple (";" simple)*
//! simple:= ident ":=" expr | "if" expr "then" block "else" block
//! block := "{" stmt "}" | simple
//! expr  := precedence ! > && > || > == > ==>, binary operators left-associative
//! file  := decl+ stmt [";"] ["assert" expr ";"]
//! ```
//! Comments run from `#` to end of line.

use std::collections::HashSet;

use super::ast::{Formula, Program, Stmt};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    High,
    Low,
    Vars,
    If,
    Then,
    Else,
    True,
    False,
    Assert,
    Assign,
    Semi,
    Comma,
    Bang,
    AndAnd,
    OrOr,
    EqEq,
    Implies,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::High => "high",
            Tok::Low => "low",
            Tok::Vars => "vars",
            Tok::If => "if",
            Tok::Then => "then",
            Tok::Else => "else",
            Tok::True => "true",
            Tok::False => "false",
            Tok::Assert => "assert",
            Tok::Assign => ":=",
            Tok::Semi => ";",
            Tok::Comma => ",",
            Tok::Bang => "!",
            Tok::AndAnd => "&&",
            Tok::OrOr => "||",
            Tok::EqEq => "==",
            Tok::Implies => "==>",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Ident(_) | Tok::Eof => "",
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                advance(1, &mut i, &mut col);
                continue;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            _ => {}
        }
        let rest = &chars[i..];
        let starts = |s: &str| rest.iter().take(s.len()).copied().eq(s.chars());
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_' || chars[j] == '\'') {
                j += 1;
            }
            let word: String = chars[i..j].iter().collect();
            advance(j - i, &mut i, &mut col);
            match word.as_str() {
                "high" => Tok::High,
                "low" => Tok::Low,
                "vars" => Tok::Vars,
                "if" => Tok::If,
                "then" => Tok::Then,
                "else" => Tok::Else,
                "true" => Tok::True,
                "false" => Tok::False,
                "assert" => Tok::Assert,
                _ => Tok::Ident(word),
            }
        } else {
            let (tok, len) = if starts("==>") {
                (Tok::Implies, 3)
            } else if starts("==") {
                (Tok::EqEq, 2)
            } else if starts(":=") {
                (Tok::Assign, 2)
            } else if starts("&&") {
                (Tok::AndAnd, 2)
            } else if starts("||") {
                (Tok::OrOr, 2)
            } else {
                let t = match c {
                    ';' => Tok::Semi,
                    ',' => Tok::Comma,
                    '!' => Tok::Bang,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    other => {
                        return Err(Error::Syntax {
                            line,
                            col,
                            msg: format!("unexpected character `{other}`"),
                        })
                    }
                };
                (t, 1)
            };
            advance(len, &mut i, &mut col);
            tok
        };
        out.push(Spanned { tok, line: start_line, col: start_col });
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    declared: HashSet<String>,
}

impl Parser {
    fn new(text: &str) -> Result<Self> {
        Ok(Parser { toks: lex(text)?, pos: 0, declared: HashSet::new() })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        let t = self.here();
        Err(Error::Syntax { line: t.line, col: t.col, msg: msg.into() })
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {}, found {}", want.describe(), self.peek().describe()))
        }
    }

    fn ident(&mut self) -> Result<(String, usize, usize)> {
        let t = self.here().clone();
        match t.tok {
            Tok::Ident(name) => {
                self.bump();
                Ok((name, t.line, t.col))
            }
            other => self.error(format!("expected identifier, found {}", other.describe())),
        }
    }

    fn declared_ident(&mut self) -> Result<String> {
        let (name, line, col) = self.ident()?;
        if !self.declared.contains(&name) {
            return Err(Error::Undeclared { name, line, col });
        }
        Ok(name)
    }

    fn ident_list(&mut self) -> Result<Vec<String>> {
        let mut names = Vec::new();
        loop {
            let (name, _, _) = self.ident()?;
            if !self.declared.insert(name.clone()) {
                return Err(Error::Duplicate { name });
            }
            names.push(name);
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                break;
            }
        }
        self.expect(Tok::Semi)?;
        Ok(names)
    }

    fn expr(&mut self) -> Result<Formula> {
        self.implication()
    }

    fn implication(&mut self) -> Result<Formula> {
        let mut lhs = self.equality()?;
        while *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.equality()?;
            lhs = Formula::implies(lhs, rhs);
        }
        Ok(lhs)
    }

    fn equality(&mut self) -> Result<Formula> {
        let mut lhs = self.disjunction()?;
        while *self.peek() == Tok::EqEq {
            self.bump();
            let rhs = self.disjunction()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::OrOr {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::AndAnd {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::True => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::False => {
                self.bump();
                Ok(Formula::falsity())
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(_) => Ok(Formula::Var(self.declared_ident()?)),
            other => self.error(format!("expected expression, found {}", other.describe())),
        }
    }

    fn simple(&mut self) -> Result<Stmt> {
        match self.peek() {
            Tok::If => {
                self.bump();
                let guard = self.expr()?;
                self.expect(Tok::Then)?;
                let then_branch = self.block()?;
                self.expect(Tok::Else)?;
                let else_branch = self.block()?;
                Ok(Stmt::ite(guard, then_branch, else_branch))
            }
            Tok::Ident(_) => {
                let target = self.declared_ident()?;
                self.expect(Tok::Assign)?;
                Ok(Stmt::assign(target, self.expr()?))
            }
            other => self.error(format!("expected statement, found {}", other.describe())),
        }
    }

    fn block(&mut self) -> Result<Stmt> {
        if *self.peek() == Tok::LBrace {
            self.bump();
            let body = self.stmt()?;
            self.expect(Tok::RBrace)?;
            Ok(body)
        } else {
            self.simple()
        }
    }

    /// Sequence of simple statements; a trailing `;` is tolerated.
    fn stmt(&mut self) -> Result<Stmt> {
        let mut items = vec![self.simple()?];
        while *self.peek() == Tok::Semi {
            self.bump();
            match self.peek() {
                Tok::Ident(_) | Tok::If => items.push(self.simple()?),
                _ => break,
            }
        }
        Ok(Stmt::block(items).expect("non-empty"))
    }

    fn program(&mut self, allow_assert: bool) -> Result<(Program, Option<Formula>)> {
        let (mut highs, mut lows) = (Vec::new(), Vec::new());
        loop {
            match self.peek() {
                Tok::High => {
                    self.bump();
                    highs.extend(self.ident_list()?);
                }
                Tok::Low => {
                    self.bump();
                    lows.extend(self.ident_list()?);
                }
                _ => break,
            }
        }
        if highs.is_empty() && lows.is_empty() {
            return self.error("expected `high` or `low` declaration");
        }
        if lows.is_empty() {
            return Err(Error::NoLowVariable);
        }
        let body = self.stmt()?;
        let assertion = if allow_assert && *self.peek() == Tok::Assert {
            self.bump();
            let f = self.expr()?;
            self.expect(Tok::Semi)?;
            Some(f)
        } else {
            None
        };
        if *self.peek() != Tok::Eof {
            return self.error(format!("unexpected {}", self.peek().describe()));
        }
        Ok((Program::new(highs, lows, body)?, assertion))
    }
}

/// Parses a `.bp` program.
pub fn parse_program(text: &str) -> Result<Program> {
    Parser::new(text)?.program(false).map(|(p, _)| p)
}

/// Parses a program optionally followed by a final `assert <expr>;` line.
pub fn parse_program_with_assertion(text: &str) -> Result<(Program, Option<Formula>)> {
    Parser::new(text)?.program(true)
}

/// Parses a bare expression over the given variables.
pub fn parse_formula<'a>(text: &str, vars: impl IntoIterator<Item = &'a str>) -> Result<Formula> {
    let mut p = Parser::new(text)?;
    p.declared = vars.into_iter().map(str::to_owned).collect();
    let f = p.expr()?;
    if *p.peek() != Tok::Eof {
        return p.error(format!("unexpected {}", p.peek().describe()));
    }
    Ok(f)
}

/// Parses a formula file: `vars x1, ..., xn;` followed by one expression.
pub fn parse_formula_file(text: &str) -> Result<(Vec<String>, Formula)> {
    let mut p = Parser::new(text)?;
    p.expect(Tok::Vars)?;
    let vars = p.ident_list()?;
    let f = p.expr()?;
    if *p.peek() == Tok::Semi {
        p.bump();
    }
    if *p.peek() != Tok::Eof {
        return p.error(format!("unexpected {}", p.peek().describe()));
    }
    Ok((vars, f))
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX4: &str = "high x,y; low z,w; z:=x; w:=y; if x && y then z:=!z else w:=!w";

    #[test]
    fn single_assignment() {
        let p = parse_program("high h; low o; o := h").unwrap();
        assert_eq!(p.high_vars(), ["h"]);
        assert_eq!(p.low_vars(), ["o"]);
        assert_eq!(*p.body(), Stmt::assign("o", Formula::var("h")));
    }

    #[test]
    fn worked_example_shape() {
        let p = parse_program(EX4).unwrap();
        let top = p.body().statements();
        assert_eq!(top.len(), 3);
        assert_eq!(*top[0], Stmt::assign("z", Formula::var("x")));
        assert_eq!(*top[1], Stmt::assign("w", Formula::var("y")));
        assert_eq!(
            *top[2],
            Stmt::ite(
                Formula::and(Formula::var("x"), Formula::var("y")),
                Stmt::assign("z", Formula::not(Formula::var("z"))),
                Stmt::assign("w", Formula::not(Formula::var("w"))),
            )
        );
    }

    #[test]
    fn undeclared_variable_reports_position() {
        let err = parse_program("high h; low o; o := q").unwrap_err();
        assert_eq!(err, Error::Undeclared { name: "q".into(), line: 1, col: 21 });
    }

    #[test]
    fn duplicate_declaration() {
        let err = parse_program("high h; low h; h := true").unwrap_err();
        assert_eq!(err, Error::Duplicate { name: "h".into() });
    }

    #[test]
    fn syntax_error_has_line_and_column() {
        let err = parse_program("high h;\nlow o;\no := h &&").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 3, col: 10, .. }), "{err:?}");
        let err = parse_program("high h; low o; o = h").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 1, col: 18, .. }), "{err:?}");
    }

    #[test]
    fn precedence_and_associativity() {
        let vars = ["a", "b", "c"];
        let f = parse_formula("a || b && c", vars).unwrap();
        assert_eq!(
            f,
            Formula::or(Formula::var("a"), Formula::and(Formula::var("b"), Formula::var("c")))
        );
        let f = parse_formula("a ==> b ==> c", vars).unwrap();
        assert_eq!(
            f,
            Formula::implies(
                Formula::implies(Formula::var("a"), Formula::var("b")),
                Formula::var("c")
            )
        );
        let f = parse_formula("!a && b", vars).unwrap();
        assert_eq!(f, Formula::and(Formula::not(Formula::var("a")), Formula::var("b")));
        let f = parse_formula("a == b || c", vars).unwrap();
        assert_eq!(
            f,
            Formula::iff(Formula::var("a"), Formula::or(Formula::var("b"), Formula::var("c")))
        );
    }

    #[test]
    fn comments_braces_and_trailing_semicolon() {
        let text = "# login check\nhigh h1, h2;\nlow o;\nif h1 == false && h2 then { o := false } else { o := true; };";
        let p = parse_program(text).unwrap();
        assert_eq!(p.body().node_count(), 3);
    }

    #[test]
    fn assertion_line() {
        let (p, a) = parse_program_with_assertion("high h; low o; o := h; assert o || !o;").unwrap();
        assert_eq!(p.low_vars(), ["o"]);
        assert!(a.is_some());
        assert!(parse_program("high h; low o; o := h; assert o;").is_err());
    }

    #[test]
    fn formula_file() {
        let (vars, f) = parse_formula_file("vars x1, x2;\nx1 || x2\n").unwrap();
        assert_eq!(vars, ["x1", "x2"]);
        assert_eq!(f, Formula::or(Formula::var("x1"), Formula::var("x2")));
        assert!(parse_formula_file("x1 || x2").is_err());
    }

    #[test]
    fn print_then_parse_is_identity() {
        let p = parse_program(EX4).unwrap();
        let again = parse_program(&p.to_string()).unwrap();
        assert_eq!(p, again);
    }
}
