//! Recursive-descent parser for `.qreg` files, with line-based error recovery.

use super::expr::{BinOp, ExprAst, ExprKind, Func};
use super::lexer::{Token, TokenKind};
use super::{Diagnostic, Position, MAX_DIAGNOSTICS};

pub(super) type Spanned<T> = (T, Position);

#[derive(Debug)]
pub(super) struct FileAst {
    pub register: Option<Spanned<u64>>,
    pub items: Vec<Item>,
}

#[derive(Debug)]
pub(super) enum Item {
    Param {
        name: String,
        expr: ExprAst,
        pos: Position,
    },
    Init {
        terms: Vec<TermAst>,
        pos: Position,
    },
    Stage {
        name: String,
        entries: Vec<Entry>,
        pos: Position,
    },
    Detect {
        name: String,
        qubits: Vec<Spanned<u64>>,
        pos: Position,
    },
}

#[derive(Debug)]
pub(super) enum TermBody {
    Mono(Vec<Spanned<u64>>),
    Ket(String),
}

#[derive(Debug)]
pub(super) struct TermAst {
    pub coeff: Option<ExprAst>,
    pub body: TermBody,
    pub pos: Position,
}

#[derive(Debug)]
pub(super) enum CallAst {
    Pvm {
        src: Spanned<u64>,
        terms: Vec<TermAst>,
    },
    Pair {
        src: Spanned<u64>,
        terms: Vec<TermAst>,
    },
    Map {
        src: Spanned<u64>,
        dst: Spanned<u64>,
        factor: ExprAst,
    },
    Bs {
        ports: [Spanned<u64>; 4],
        a: ExprAst,
        b: ExprAst,
        eta: ExprAst,
    },
}

#[derive(Debug)]
pub(super) enum Entry {
    Rule {
        source: Spanned<u64>,
        terms: Vec<TermAst>,
        pos: Position,
    },
    Call {
        call: CallAst,
        pos: Position,
    },
}

const TOP_KEYWORDS: [&str; 5] = ["register", "param", "init", "stage", "detect"];
const CALL_KEYWORDS: [&str; 4] = ["pvm", "bs", "map", "pair"];

type PResult<T> = Result<T, Diagnostic>;

pub(super) struct Parser<'a> {
    tokens: &'a [Token],
    at: usize,
    pub diagnostics: Vec<Diagnostic>,
}

impl<'a> Parser<'a> {
    pub fn new(tokens: &'a [Token]) -> Self {
        Self {
            tokens,
            at: 0,
            diagnostics: Vec::new(),
        }
    }

    fn peek(&self) -> &Token {
        self.peek_at(0)
    }

    fn peek_at(&self, n: usize) -> &Token {
        let last = self.tokens.len() - 1;
        &self.tokens[(self.at + n).min(last)]
    }

    fn bump(&mut self) -> Token {
        let tok = self.peek().clone();
        if tok.kind != TokenKind::Eof {
            self.at += 1;
        }
        tok
    }

    fn unexpected(&self, expected: &str) -> Diagnostic {
        let tok = self.peek();
        Diagnostic::error(tok.pos, format!("expected {expected}, found {}", tok.kind))
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if &self.peek().kind == kind {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<Token> {
        if self.peek().kind == kind {
            Ok(self.bump())
        } else {
            Err(self.unexpected(&kind.to_string()))
        }
    }

    fn expect_int(&mut self, what: &str) -> PResult<Spanned<u64>> {
        match self.peek().kind {
            TokenKind::Int(n) => {
                let pos = self.bump().pos;
                Ok((n, pos))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn expect_ident(&mut self, what: &str) -> PResult<Spanned<String>> {
        match &self.peek().kind {
            TokenKind::Ident(name) => {
                let name = name.clone();
                let pos = self.bump().pos;
                Ok((name, pos))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn peek_word(&self) -> Option<&str> {
        match &self.peek().kind {
            TokenKind::Ident(w) => Some(w),
            _ => None,
        }
    }

    fn at_top_keyword(&self) -> bool {
        self.peek().line_start && self.peek_word().is_some_and(|w| TOP_KEYWORDS.contains(&w))
    }

    fn full(&self) -> bool {
        self.diagnostics.len() >= MAX_DIAGNOSTICS
    }

    fn report(&mut self, diag: Diagnostic) {
        if !self.full() {
            self.diagnostics.push(diag);
        }
    }

    pub fn parse_file(&mut self) -> FileAst {
        let mut register = None;
        if self.peek_word() == Some("register") {
            self.bump();
            match self.expect_int("register rank") {
                Ok(rank) => register = Some(rank),
                Err(d) => {
                    self.report(d);
                    self.recover_top();
                }
            }
        } else {
            let d = self.unexpected("`register <rank>` as the first item");
            self.report(d);
        }
        let mut items = Vec::new();
        while self.peek().kind != TokenKind::Eof && !self.full() {
            match self.parse_item() {
                Ok(item) => items.push(item),
                Err(d) => {
                    self.report(d);
                    self.recover_top();
                }
            }
        }
        FileAst { register, items }
    }

    fn recover_top(&mut self) {
        self.bump();
        while self.peek().kind != TokenKind::Eof && !self.at_top_keyword() {
            self.bump();
        }
    }

    fn parse_item(&mut self) -> PResult<Item> {
        let pos = self.peek().pos;
        match self.peek_word() {
            Some("param") => {
                self.bump();
                let (name, _) = self.expect_ident("parameter name")?;
                self.expect(TokenKind::Equals)?;
                let expr = self.parse_expr()?;
                Ok(Item::Param { name, expr, pos })
            }
            Some("init") => {
                self.bump();
                let terms = self.parse_terms(true)?;
                Ok(Item::Init { terms, pos })
            }
            Some("stage") => {
                self.bump();
                self.parse_stage_body(pos)
            }
            Some("detect") => {
                self.bump();
                let (name, _) = self.expect_ident("detector name")?;
                self.expect(TokenKind::Equals)?;
                let mut qubits = vec![self.expect_int("qubit index")?];
                while let TokenKind::Int(n) = self.peek().kind {
                    let p = self.bump().pos;
                    qubits.push((n, p));
                }
                Ok(Item::Detect { name, qubits, pos })
            }
            Some("register") => Err(Diagnostic::error(pos, "`register` may appear only once, as the first item")),
            _ => Err(self.unexpected("`param`, `init`, `stage` or `detect`")),
        }
    }

    fn parse_stage_body(&mut self, pos: Position) -> PResult<Item> {
        let (name, _) = self.expect_ident("stage name")?;
        self.expect(TokenKind::LBrace)?;
        let mut entries = Vec::new();
        loop {
            if self.full() {
                break;
            }
            match self.peek().kind {
                TokenKind::RBrace => {
                    self.bump();
                    break;
                }
                TokenKind::Eof => {
                    let d = Diagnostic::error(self.peek().pos, format!("stage `{name}` is missing its closing `}}`"));
                    self.report(d);
                    break;
                }
                _ if self.at_top_keyword() => {
                    let d = Diagnostic::error(self.peek().pos, format!("stage `{name}` is missing its closing `}}`"));
                    self.report(d);
                    break;
                }
                _ => {}
            }
            match self.parse_entry() {
                Ok(entry) => entries.push(entry),
                Err(d) => {
                    self.report(d);
                    self.recover_entry();
                }
            }
        }
        Ok(Item::Stage { name, entries, pos })
    }

    fn at_entry_start(&self) -> bool {
        let tok = self.peek();
        tok.line_start
            && (tok.kind == TokenKind::Create
                || self.peek_word().is_some_and(|w| CALL_KEYWORDS.contains(&w) || TOP_KEYWORDS.contains(&w)))
    }

    fn recover_entry(&mut self) {
        self.bump();
        while !matches!(self.peek().kind, TokenKind::Eof | TokenKind::RBrace) && !self.at_entry_start() {
            self.bump();
        }
    }

    fn parse_entry(&mut self) -> PResult<Entry> {
        let pos = self.peek().pos;
        if self.eat(&TokenKind::Create) {
            let source = self.expect_int("source qubit index")?;
            self.expect(TokenKind::Arrow)?;
            let terms = self.parse_terms(false)?;
            return Ok(Entry::Rule { source, terms, pos });
        }
        let call = match self.peek_word() {
            Some("pvm") => {
                self.bump();
                self.expect(TokenKind::LParen)?;
                let src = self.expect_int("source qubit index")?;
                self.expect(TokenKind::Comma)?;
                let terms = self.parse_terms(false)?;
                self.expect(TokenKind::RParen)?;
                CallAst::Pvm { src, terms }
            }
            Some("pair") => {
                self.bump();
                self.expect(TokenKind::LParen)?;
                let src = self.expect_int("source qubit index")?;
                self.expect(TokenKind::Comma)?;
                let terms = self.parse_terms(false)?;
                self.expect(TokenKind::RParen)?;
                CallAst::Pair { src, terms }
            }
            Some("map") => {
                self.bump();
                self.expect(TokenKind::LParen)?;
                let src = self.expect_int("source qubit index")?;
                self.expect(TokenKind::Comma)?;
                let dst = self.expect_int("destination qubit index")?;
                self.expect(TokenKind::Comma)?;
                let factor = self.parse_expr()?;
                self.expect(TokenKind::RParen)?;
                CallAst::Map { src, dst, factor }
            }
            Some("bs") => {
                self.bump();
                self.expect(TokenKind::LParen)?;
                let mut ports = Vec::with_capacity(4);
                for _ in 0..4 {
                    ports.push(self.expect_int("beam-splitter port qubit")?);
                    self.expect(TokenKind::Comma)?;
                }
                let a = self.parse_expr()?;
                self.expect(TokenKind::Comma)?;
                let b = self.parse_expr()?;
                self.expect(TokenKind::Comma)?;
                let eta = self.parse_expr()?;
                self.expect(TokenKind::RParen)?;
                let ports: [Spanned<u64>; 4] = ports.try_into().expect("four ports");
                CallAst::Bs { ports, a, b, eta }
            }
            _ => return Err(self.unexpected("a rule `A+k -> …` or one of `pvm`, `bs`, `map`, `pair`")),
        };
        Ok(Entry::Call { call, pos })
    }

    fn parse_terms(&mut self, allow_ket: bool) -> PResult<Vec<TermAst>> {
        let mut terms = vec![self.parse_term(allow_ket)?];
        while self.eat(&TokenKind::Plus) {
            terms.push(self.parse_term(allow_ket)?);
        }
        Ok(terms)
    }

    fn parse_term(&mut self, allow_ket: bool) -> PResult<TermAst> {
        let pos = self.peek().pos;
        let coeff = if self.eat(&TokenKind::LParen) {
            let e = self.parse_expr()?;
            self.expect(TokenKind::RParen)?;
            Some(e)
        } else {
            None
        };
        if allow_ket {
            if let TokenKind::Ket(text) = &self.peek().kind {
                let text = text.clone();
                self.bump();
                return Ok(TermAst {
                    coeff,
                    body: TermBody::Ket(text),
                    pos,
                });
            }
        }
        if self.peek().kind != TokenKind::Create {
            let what = if allow_ket {
                "a creation monomial `A+k …` or a ket `|…)`"
            } else {
                "a creation monomial `A+k …`"
            };
            return Err(self.unexpected(what));
        }
        let mut qubits = Vec::new();
        // `A+ k ->` starts the next rule, not another factor.
        while self.peek().kind == TokenKind::Create
            && !(matches!(self.peek_at(1).kind, TokenKind::Int(_)) && self.peek_at(2).kind == TokenKind::Arrow)
        {
            self.bump();
            qubits.push(self.expect_int("qubit index")?);
        }
        if qubits.is_empty() {
            return Err(self.unexpected("a creation monomial"));
        }
        Ok(TermAst {
            coeff,
            body: TermBody::Mono(qubits),
            pos,
        })
    }

    pub fn parse_expr(&mut self) -> PResult<ExprAst> {
        let mut lhs = self.parse_product()?;
        loop {
            let op = match self.peek().kind {
                TokenKind::Plus => BinOp::Add,
                TokenKind::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            let pos = self.bump().pos;
            let rhs = self.parse_product()?;
            lhs = binary(op, lhs, rhs, pos);
        }
    }

    fn parse_product(&mut self) -> PResult<ExprAst> {
        let mut lhs = self.parse_unary()?;
        loop {
            let op = match self.peek().kind {
                TokenKind::Star => BinOp::Mul,
                TokenKind::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            let pos = self.bump().pos;
            let rhs = self.parse_unary()?;
            lhs = binary(op, lhs, rhs, pos);
        }
    }

    fn parse_unary(&mut self) -> PResult<ExprAst> {
        if self.peek().kind == TokenKind::Minus {
            let pos = self.bump().pos;
            let inner = self.parse_unary()?;
            return Ok(ExprAst {
                kind: ExprKind::Neg(Box::new(inner)),
                pos,
            });
        }
        let base = self.parse_primary()?;
        if self.peek().kind == TokenKind::Caret {
            let pos = self.bump().pos;
            let exponent = self.parse_unary()?;
            return Ok(binary(BinOp::Pow, base, exponent, pos));
        }
        Ok(base)
    }

    fn parse_primary(&mut self) -> PResult<ExprAst> {
        let tok = self.peek().clone();
        let kind = match &tok.kind {
            TokenKind::Int(n) => {
                self.bump();
                ExprKind::Number(*n as f64)
            }
            TokenKind::Float(x) => {
                self.bump();
                ExprKind::Number(*x)
            }
            TokenKind::LParen => {
                self.bump();
                let inner = self.parse_expr()?;
                self.expect(TokenKind::RParen)?;
                return Ok(inner);
            }
            TokenKind::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "i" => ExprKind::ImaginaryUnit,
                    "pi" => ExprKind::Pi,
                    _ => match Func::from_name(name) {
                        Some(func) => {
                            self.expect(TokenKind::LParen)?;
                            let arg = self.parse_expr()?;
                            self.expect(TokenKind::RParen)?;
                            ExprKind::Call(func, Box::new(arg))
                        }
                        None => ExprKind::Param(name.clone()),
                    },
                }
            }
            _ => return Err(self.unexpected("an expression")),
        };
        Ok(ExprAst { kind, pos: tok.pos })
    }

    pub fn expect_end(&mut self) -> PResult<()> {
        if self.peek().kind == TokenKind::Eof {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }
}

fn binary(op: BinOp, lhs: ExprAst, rhs: ExprAst, pos: Position) -> ExprAst {
    ExprAst {
        kind: ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)),
        pos,
    }
}
