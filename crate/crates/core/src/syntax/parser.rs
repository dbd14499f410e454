//! Reader for the analyzed Prolog subset.
//!
//! Supported: atoms (plain, quoted, symbolic), integers, variables,
//! compound terms, bracket lists, the infix operators `=`, `\=`, `==`,
//! `\==`, `is`, the arithmetic comparisons, `+ - * /`, clause structure
//! `h :- b1, ..., bn.` and `:- entry Goal : Modes.` directives.

use std::collections::HashMap;

use crate::error::{ParseError, ProgramError};
use crate::syntax::builtins;
use crate::syntax::term::{Clause, EntryDecl, Program, Term};
use crate::varset::{Var, VarSet, MAX_VARS};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Atom(String),
    Var(String),
    Int(String),
    /// Quoted atoms never act as operators.
    Quoted(String),
    Open,
    /// `(` immediately after a functor name.
    OpenCall,
    Close,
    OpenList,
    CloseList,
    Bar,
    Comma,
    End,
    Eof,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

const SYMBOL_CHARS: &str = "+-*/\\^<>=~:.?@#&$";

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    let err = |line, column, message: String| ParseError {
        line,
        column,
        message,
    };

    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let advance = |n: usize, i: &mut usize, line: &mut usize, col: &mut usize| {
            for _ in 0..n {
                if chars[*i] == '\n' {
                    *line += 1;
                    *col = 1;
                } else {
                    *col += 1;
                }
                *i += 1;
            }
        };

        if c.is_whitespace() {
            advance(1, &mut i, &mut line, &mut col);
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                advance(1, &mut i, &mut line, &mut col);
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            advance(2, &mut i, &mut line, &mut col);
            loop {
                if i + 1 >= chars.len() {
                    return Err(err(tl, tc, "unterminated block comment".into()));
                }
                if chars[i] == '*' && chars[i + 1] == '/' {
                    advance(2, &mut i, &mut line, &mut col);
                    break;
                }
                advance(1, &mut i, &mut line, &mut col);
            }
            continue;
        }

        let push = |out: &mut Vec<Spanned>, tok| {
            out.push(Spanned {
                tok,
                line: tl,
                column: tc,
            })
        };

        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                advance(1, &mut i, &mut line, &mut col);
            }
            let word: String = chars[start..i].iter().collect();
            if c.is_ascii_uppercase() || c == '_' {
                push(&mut out, Tok::Var(word));
            } else {
                push(&mut out, Tok::Atom(word));
            }
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                advance(1, &mut i, &mut line, &mut col);
            }
            push(&mut out, Tok::Int(chars[start..i].iter().collect()));
        } else if c == '\'' {
            advance(1, &mut i, &mut line, &mut col);
            let mut s = String::new();
            loop {
                match chars.get(i) {
                    None => return Err(err(tl, tc, "unterminated quoted atom".into())),
                    Some('\'') if chars.get(i + 1) == Some(&'\'') => {
                        s.push('\'');
                        advance(2, &mut i, &mut line, &mut col);
                    }
                    Some('\'') => {
                        advance(1, &mut i, &mut line, &mut col);
                        break;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        advance(1, &mut i, &mut line, &mut col);
                    }
                }
            }
            push(&mut out, Tok::Quoted(s));
        } else if c == '(' {
            let call = i > 0
                && !chars[i - 1].is_whitespace()
                && matches!(out.last(), Some(Spanned { tok: Tok::Atom(_) | Tok::Quoted(_), .. }));
            advance(1, &mut i, &mut line, &mut col);
            push(&mut out, if call { Tok::OpenCall } else { Tok::Open });
        } else if c == ')' {
            advance(1, &mut i, &mut line, &mut col);
            push(&mut out, Tok::Close);
        } else if c == '[' {
            advance(1, &mut i, &mut line, &mut col);
            push(&mut out, Tok::OpenList);
        } else if c == ']' {
            advance(1, &mut i, &mut line, &mut col);
            push(&mut out, Tok::CloseList);
        } else if c == '|' {
            advance(1, &mut i, &mut line, &mut col);
            push(&mut out, Tok::Bar);
        } else if c == ',' {
            advance(1, &mut i, &mut line, &mut col);
            push(&mut out, Tok::Comma);
        } else if c == '!' || c == ';' {
            advance(1, &mut i, &mut line, &mut col);
            push(&mut out, Tok::Atom(c.to_string()));
        } else if c == '.'
            && chars
                .get(i + 1)
                .is_none_or(|n| n.is_whitespace() || *n == '%')
        {
            advance(1, &mut i, &mut line, &mut col);
            push(&mut out, Tok::End);
        } else if SYMBOL_CHARS.contains(c) {
            let start = i;
            while i < chars.len() && SYMBOL_CHARS.contains(chars[i]) {
                // A trailing '.' followed by layout terminates the clause.
                if chars[i] == '.'
                    && i > start
                    && chars
                        .get(i + 1)
                        .is_none_or(|n| n.is_whitespace() || *n == '%')
                {
                    break;
                }
                advance(1, &mut i, &mut line, &mut col);
            }
            push(&mut out, Tok::Atom(chars[start..i].iter().collect()));
        } else {
            return Err(err(tl, tc, format!("unexpected character {c:?}")));
        }
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

/// Infix operators: (name, priority, left arg max, right arg max).
fn infix(name: &str) -> Option<(u32, u32, u32)> {
    Some(match name {
        "=" | "\\=" | "==" | "\\==" | "is" | "<" | ">" | "=<" | ">=" | "=:=" | "=\\=" => {
            (700, 699, 699)
        }
        "+" | "-" => (500, 500, 499),
        "*" | "/" => (400, 400, 399),
        _ => return None,
    })
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    /// Variable interning for the clause being read.
    vars: HashMap<String, Var>,
    names: Vec<String>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, message: impl Into<String>) -> ParseError {
        let s = &self.toks[self.pos];
        ParseError {
            line: s.line,
            column: s.column,
            message: message.into(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error_here(format!("expected {what}, found {}", describe(self.peek()))))
        }
    }

    fn reset_clause(&mut self) {
        self.vars.clear();
        self.names.clear();
    }

    fn intern(&mut self, name: &str) -> Var {
        if name == "_" {
            let v = Var(self.names.len() as u32);
            self.names.push(format!("_{}", v.0));
            return v;
        }
        if let Some(&v) = self.vars.get(name) {
            return v;
        }
        let v = Var(self.names.len() as u32);
        self.vars.insert(name.to_string(), v);
        self.names.push(name.to_string());
        v
    }

    /// Operator-precedence term reader bounded by `max` priority.
    fn term(&mut self, max: u32) -> Result<Term, ParseError> {
        let mut left = self.primary()?;
        let mut left_prio = 0;
        while let Tok::Atom(a) = self.peek() {
            let op = a.clone();
            let Some((prio, lmax, rmax)) = infix(&op) else {
                break;
            };
            if prio > max || left_prio > lmax {
                break;
            }
            self.bump();
            let right = self.term(rmax)?;
            left = Term::compound(&op, vec![left, right]);
            left_prio = prio;
        }
        Ok(left)
    }

    fn primary(&mut self) -> Result<Term, ParseError> {
        let here = self.toks[self.pos].clone();
        let quoted = matches!(here.tok, Tok::Quoted(_));
        match here.tok {
            Tok::Var(name) => {
                self.bump();
                Ok(Term::Var(self.intern(&name)))
            }
            Tok::Int(n) => {
                self.bump();
                Ok(Term::atom(&n))
            }
            Tok::Atom(ref a) if a == "-" && matches!(self.toks[self.pos + 1].tok, Tok::Int(_)) => {
                self.bump();
                let Tok::Int(n) = self.bump().tok else { unreachable!() };
                Ok(Term::atom(&format!("-{n}")))
            }
            Tok::Atom(name) | Tok::Quoted(name) => {
                self.bump();
                if *self.peek() == Tok::OpenCall {
                    self.bump();
                    let mut args = vec![self.term(999)?];
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        args.push(self.term(999)?);
                    }
                    self.expect(Tok::Close, "`)`")?;
                    Ok(Term::compound(&name, args))
                } else {
                    if infix(&name).is_some() && !quoted {
                        return Err(ParseError {
                            line: here.line,
                            column: here.column,
                            message: format!("operator `{name}` used as an operand"),
                        });
                    }
                    Ok(Term::atom(&name))
                }
            }
            Tok::Open | Tok::OpenCall => {
                self.bump();
                let t = self.term(1200)?;
                self.expect(Tok::Close, "`)`")?;
                Ok(t)
            }
            Tok::OpenList => {
                self.bump();
                if *self.peek() == Tok::CloseList {
                    self.bump();
                    return Ok(Term::atom("[]"));
                }
                let mut items = vec![self.term(999)?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    items.push(self.term(999)?);
                }
                let tail = if *self.peek() == Tok::Bar {
                    self.bump();
                    self.term(999)?
                } else {
                    Term::atom("[]")
                };
                self.expect(Tok::CloseList, "`]`")?;
                Ok(items
                    .into_iter()
                    .rev()
                    .fold(tail, |acc, item| Term::compound(".", vec![item, acc])))
            }
            ref other => Err(ParseError {
                line: here.line,
                column: here.column,
                message: format!("unexpected {}", describe(other)),
            }),
        }
    }

    fn goal(&mut self) -> Result<Term, ParseError> {
        let at = self.pos;
        let t = self.term(999)?;
        match t {
            Term::Var(_) => Err(ParseError {
                line: self.toks[at].line,
                column: self.toks[at].column,
                message: "variable goals are not supported".into(),
            }),
            t => Ok(t),
        }
    }

    fn body(&mut self) -> Result<Vec<Term>, ParseError> {
        let mut goals = vec![self.goal()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            goals.push(self.goal()?);
        }
        Ok(goals)
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Atom(a) | Tok::Quoted(a) => format!("`{a}`"),
        Tok::Var(v) => format!("variable `{v}`"),
        Tok::Int(n) => format!("number `{n}`"),
        Tok::Open | Tok::OpenCall => "`(`".into(),
        Tok::Close => "`)`".into(),
        Tok::OpenList => "`[`".into(),
        Tok::CloseList => "`]`".into(),
        Tok::Bar => "`|`".into(),
        Tok::Comma => "`,`".into(),
        Tok::End => "end of clause".into(),
        Tok::Eof => "end of input".into(),
    }
}

/// Parses a program, interning variables per clause.
pub fn parse_program(source: &str) -> Result<Program, ProgramError> {
    let toks = lex(source)?;
    let mut p = Parser {
        toks,
        pos: 0,
        vars: HashMap::new(),
        names: Vec::new(),
    };
    let mut program = Program::default();

    while *p.peek() != Tok::Eof {
        p.reset_clause();
        if *p.peek() == Tok::Atom(":-".into()) {
            p.bump();
            let entry = parse_entry(&mut p)?;
            let key = entry.goal.pred_key().expect("entry goal is an atom");
            let canon = canonical_entry(&entry);
            if program.entries.iter().any(|e| canonical_entry(e) == canon) {
                return Err(ProgramError::DuplicateEntry(key.to_string()));
            }
            program.entries.push(entry);
            continue;
        }
        let head_at = p.pos;
        let head = p.term(1199)?;
        if head.as_var().is_some() || head.pred_key().is_none() {
            let s = &p.toks[head_at];
            return Err(ParseError {
                line: s.line,
                column: s.column,
                message: "clause head must be an atom or compound".into(),
            }
            .into());
        }
        let body = if *p.peek() == Tok::Atom(":-".into()) {
            p.bump();
            p.body()?
        } else {
            Vec::new()
        };
        p.expect(Tok::End, "`.`")?;
        let key = head.pred_key().unwrap();
        if p.names.len() > MAX_VARS / 2 {
            return Err(ProgramError::TooManyVariables(key.to_string(), MAX_VARS / 2));
        }
        program.predicates.entry(key).or_default().push(Clause {
            head,
            body,
            names: std::mem::take(&mut p.names),
        });
    }

    for e in &program.entries {
        let key = e.goal.pred_key().unwrap();
        if !program.predicates.contains_key(&key) && !builtins::is_builtin(&key) {
            return Err(ProgramError::UndefinedEntry(key.to_string()));
        }
    }
    Ok(program)
}

fn parse_entry(p: &mut Parser) -> Result<EntryDecl, ProgramError> {
    match p.peek() {
        Tok::Atom(a) if a == "entry" => {
            p.bump();
        }
        other => {
            return Err(p
                .error_here(format!("unsupported directive starting with {}", describe(other)))
                .into())
        }
    }
    let goal = p.goal()?;
    let mut ground = VarSet::EMPTY;
    let mut free = VarSet::EMPTY;
    if *p.peek() == Tok::Atom(":".into()) {
        p.bump();
        loop {
            let at = p.pos;
            let ann = p.term(999)?;
            let fail = |p: &Parser, msg: &str| -> ProgramError {
                ParseError {
                    line: p.toks[at].line,
                    column: p.toks[at].column,
                    message: msg.to_string(),
                }
                .into()
            };
            let (mode, arg) = match &ann {
                Term::Compound { functor, args } if args.len() == 1 => (functor.as_ref(), &args[0]),
                _ => return Err(fail(p, "expected ground(V) or free(V)")),
            };
            let Some(v) = arg.as_var() else {
                return Err(fail(p, "mode annotations take a variable"));
            };
            if !goal.vars().contains(v) {
                return Err(fail(p, "annotated variable does not occur in the entry goal"));
            }
            match mode {
                "ground" => ground.insert(v),
                "free" => free.insert(v),
                other => return Err(fail(p, &format!("unknown mode `{other}`"))),
            }
            if *p.peek() == Tok::Comma {
                p.bump();
            } else {
                break;
            }
        }
    }
    p.expect(Tok::End, "`.`")?;
    if ground.meets(free) {
        return Err(p
            .error_here("a variable cannot be both ground and free")
            .into());
    }
    Ok(EntryDecl {
        goal,
        names: std::mem::take(&mut p.names),
        ground,
        free,
    })
}

/// Entry identity up to variable naming.
fn canonical_entry(e: &EntryDecl) -> (Term, Vec<usize>, Vec<usize>) {
    let order = e.goal.var_list();
    let pos = |v: Var| order.iter().position(|&w| w == v).unwrap();
    let goal = e.goal.rename(&|v| Var(pos(v) as u32));
    (
        goal,
        e.ground.iter().map(pos).collect(),
        e.free.iter().map(pos).collect(),
    )
}

/// Parses a single term, interning its variables; returns the names table.
pub fn parse_term(source: &str) -> Result<(Term, Vec<String>), ParseError> {
    let toks = lex(source)?;
    let mut p = Parser {
        toks,
        pos: 0,
        vars: HashMap::new(),
        names: Vec::new(),
    };
    let t = p.term(1200)?;
    if *p.peek() == Tok::End {
        p.bump();
    }
    if *p.peek() != Tok::Eof {
        return Err(p.error_here(format!("trailing {}", describe(p.peek()))));
    }
    Ok((t, p.names))
}
