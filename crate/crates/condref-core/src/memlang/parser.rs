//! Recursive-descent parser for memLang source text.
//!
//! Grammar:
//! ```text
//! module   := "module" IDENT "{" private* fn* "}"
//! private  := "private" IDENT ";"
//! fn       := "fn" IDENT "(" params? ")" block
//! block    := "{" stmt* "}"
//! stmt     := "let" IDENT "=" expr ";"
//!           | "*" unary ":=" expr ";"
//!           | "free" "(" expr ")" ";"
//!           | "print" "(" expr ")" ";"
//!           | "ret" expr ";"
//!           | "if" "(" expr ")" block ("else" block)?
//!           | expr ";"
//! expr     := cmp; cmp := bitor (CMPOP bitor)?
//! bitor    := bitand ("|" bitand)*
//! bitand   := shift ("&" shift)*
//! shift    := additive (("<<" | ">>") additive)*
//! additive := unary (("+" | "-") unary)*
//! unary    := "*" unary | "-" unary | atom
//! atom     := INT ("i32" | "i64")? | IDENT ("(" args ")")?
//!           | "calloc" "(" expr ")" | "(" expr ")"
//! ```
//! Shifts bind tighter than `&`, which binds tighter than `|`.

use crate::error::SyntaxError;
use crate::memlang::ast::{BinOp, Expr, FnDef, MlModule, Stmt};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Sym(&'static str),
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
}

type Spanned = (Tok, u32, u32);

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Lexer<'a> {
        Lexer { src: src.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.src.get(self.pos).copied()?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn peek2(&self) -> Option<u8> {
        self.src.get(self.pos + 1).copied()
    }

    fn err(&self, expected: &str, found: &str) -> SyntaxError {
        SyntaxError {
            line: self.line,
            col: self.col,
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }

    fn tokens(mut self) -> Result<Vec<Spanned>, SyntaxError> {
        let mut out = Vec::new();
        loop {
            while let Some(c) = self.peek() {
                if c.is_ascii_whitespace() {
                    self.bump();
                } else if c == b'/' && self.peek2() == Some(b'/') {
                    while let Some(c) = self.peek() {
                        if c == b'\n' {
                            break;
                        }
                        self.bump();
                    }
                } else {
                    break;
                }
            }
            let (line, col) = (self.line, self.col);
            let Some(c) = self.peek() else { break };
            let tok = if c.is_ascii_digit() {
                let mut n: i64 = 0;
                while let Some(c) = self.peek() {
                    if !c.is_ascii_digit() {
                        break;
                    }
                    n = n
                        .checked_mul(10)
                        .and_then(|n| n.checked_add((c - b'0') as i64))
                        .ok_or_else(|| self.err("integer literal in range", "overflow"))?;
                    self.bump();
                }
                Tok::Int(n)
            } else if c.is_ascii_alphabetic() || c == b'_' {
                let mut s = String::new();
                while let Some(c) = self.peek() {
                    if !(c.is_ascii_alphanumeric() || c == b'_') {
                        break;
                    }
                    s.push(c as char);
                    self.bump();
                }
                Tok::Ident(s)
            } else {
                let two = |a: u8, b: u8| c == a && self.peek2() == Some(b);
                let sym: &'static str = if two(b':', b'=') {
                    ":="
                } else if two(b'<', b'<') {
                    "<<"
                } else if two(b'>', b'>') {
                    ">>"
                } else if two(b'=', b'=') {
                    "=="
                } else if two(b'!', b'=') {
                    "!="
                } else if two(b'<', b'=') {
                    "<="
                } else if two(b'>', b'=') {
                    ">="
                } else {
                    match c {
                        b'{' => "{",
                        b'}' => "}",
                        b'(' => "(",
                        b')' => ")",
                        b';' => ";",
                        b',' => ",",
                        b'*' => "*",
                        b'+' => "+",
                        b'-' => "-",
                        b'&' => "&",
                        b'|' => "|",
                        b'<' => "<",
                        b'>' => ">",
                        b'=' => "=",
                        _ => {
                            return Err(self.err("a token", &format!("{:?}", c as char)));
                        }
                    }
                };
                for _ in 0..sym.len() {
                    self.bump();
                }
                Tok::Sym(sym)
            };
            out.push((tok, line, col));
        }
        Ok(out)
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn here(&self) -> (u32, u32) {
        self.toks
            .get(self.pos)
            .map(|(_, l, c)| (*l, *c))
            .or_else(|| self.toks.last().map(|(_, l, c)| (*l, *c)))
            .unwrap_or((1, 1))
    }

    fn err(&self, expected: &str) -> SyntaxError {
        let (line, col) = self.here();
        let found = match self.toks.get(self.pos) {
            Some((Tok::Ident(s), _, _)) => s.clone(),
            Some((Tok::Int(i), _, _)) => i.to_string(),
            Some((Tok::Sym(s), _, _)) => s.to_string(),
            None => "end of input".to_string(),
        };
        SyntaxError { line, col, expected: expected.to_string(), found }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _, _)| t)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(t)) if *t == s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), SyntaxError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.err(&format!("{s:?}")))
        }
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<(), SyntaxError> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            Err(self.err(&format!("keyword {kw:?}")))
        }
    }

    fn ident(&mut self) -> Result<String, SyntaxError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.err("an identifier")),
        }
    }

    fn module(&mut self, first_block: u32) -> Result<MlModule, SyntaxError> {
        self.expect_kw("module")?;
        let name = self.ident()?;
        self.expect_sym("{")?;
        let mut privates = Vec::new();
        while self.eat_kw("private") {
            privates.push(self.ident()?);
            self.expect_sym(";")?;
        }
        let mut fns = Vec::new();
        while self.eat_kw("fn") {
            let fname = self.ident()?;
            self.expect_sym("(")?;
            let mut params = Vec::new();
            if !self.eat_sym(")") {
                loop {
                    params.push(self.ident()?);
                    if self.eat_sym(")") {
                        break;
                    }
                    self.expect_sym(",")?;
                }
            }
            let body = self.block()?;
            fns.push(FnDef { name: fname, params, body });
        }
        self.expect_sym("}")?;
        if self.pos != self.toks.len() {
            return Err(self.err("end of input"));
        }
        Ok(MlModule { name, privates, fns, first_block })
    }

    fn block(&mut self) -> Result<Vec<Stmt>, SyntaxError> {
        self.expect_sym("{")?;
        let mut stmts = Vec::new();
        while !self.eat_sym("}") {
            stmts.push(self.stmt()?);
        }
        Ok(stmts)
    }

    fn stmt(&mut self) -> Result<Stmt, SyntaxError> {
        if self.eat_kw("let") {
            let x = self.ident()?;
            self.expect_sym("=")?;
            let e = self.expr()?;
            self.expect_sym(";")?;
            return Ok(Stmt::Let(x, e));
        }
        if self.eat_kw("free") {
            self.expect_sym("(")?;
            let e = self.expr()?;
            self.expect_sym(")")?;
            self.expect_sym(";")?;
            return Ok(Stmt::Free(e));
        }
        if self.eat_kw("print") {
            self.expect_sym("(")?;
            let e = self.expr()?;
            self.expect_sym(")")?;
            self.expect_sym(";")?;
            return Ok(Stmt::Print(e));
        }
        if self.eat_kw("ret") {
            let e = self.expr()?;
            self.expect_sym(";")?;
            return Ok(Stmt::Ret(e));
        }
        if self.eat_kw("if") {
            self.expect_sym("(")?;
            let c = self.expr()?;
            self.expect_sym(")")?;
            let then = self.block()?;
            let els = if self.eat_kw("else") { self.block()? } else { Vec::new() };
            return Ok(Stmt::If(c, then, els));
        }
        if self.eat_sym("*") {
            let p = self.unary()?;
            self.expect_sym(":=")?;
            let v = self.expr()?;
            self.expect_sym(";")?;
            return Ok(Stmt::Store(p, v));
        }
        let e = self.expr()?;
        self.expect_sym(";")?;
        Ok(Stmt::Expr(e))
    }

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        let lhs = self.bitor()?;
        let op = match self.peek() {
            Some(Tok::Sym("==")) => Some(BinOp::Eq),
            Some(Tok::Sym("!=")) => Some(BinOp::Ne),
            Some(Tok::Sym("<=")) => Some(BinOp::Le),
            Some(Tok::Sym(">=")) => Some(BinOp::Ge),
            Some(Tok::Sym("<")) => Some(BinOp::Lt),
            Some(Tok::Sym(">")) => Some(BinOp::Gt),
            _ => None,
        };
        if let Some(op) = op {
            self.pos += 1;
            let rhs = self.bitor()?;
            return Ok(Expr::Bin(op, Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn bitor(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.bitand()?;
        while matches!(self.peek(), Some(Tok::Sym("|"))) {
            self.pos += 1;
            let rhs = self.bitand()?;
            lhs = Expr::Bin(BinOp::Or, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn bitand(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.shift()?;
        while matches!(self.peek(), Some(Tok::Sym("&"))) {
            self.pos += 1;
            let rhs = self.shift()?;
            lhs = Expr::Bin(BinOp::And, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn shift(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.additive()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Sym("<<")) => BinOp::Shl,
                Some(Tok::Sym(">>")) => BinOp::Shr,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.additive()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn additive(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Sym("+")) => BinOp::Add,
                Some(Tok::Sym("-")) => BinOp::Sub,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, SyntaxError> {
        if self.eat_sym("*") {
            return Ok(Expr::Load(Box::new(self.unary()?)));
        }
        if self.eat_sym("-") {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                // optional width suffix; bare literals default to i64
                if self.eat_kw("i32") {
                    let v = i32::try_from(n).map_err(|_| self.err("an i32-range literal"))?;
                    Ok(Expr::LitI32(v))
                } else {
                    self.eat_kw("i64");
                    Ok(Expr::LitI64(n))
                }
            }
            Some(Tok::Ident(name)) => {
                if name == "calloc" {
                    self.pos += 1;
                    self.expect_sym("(")?;
                    let e = self.expr()?;
                    self.expect_sym(")")?;
                    return Ok(Expr::Calloc(Box::new(e)));
                }
                self.pos += 1;
                if self.eat_sym("(") {
                    let mut args = Vec::new();
                    if !self.eat_sym(")") {
                        loop {
                            args.push(self.expr()?);
                            if self.eat_sym(")") {
                                break;
                            }
                            self.expect_sym(",")?;
                        }
                    }
                    Ok(Expr::Call(name, args))
                } else {
                    Ok(Expr::Var(name))
                }
            }
            Some(Tok::Sym("(")) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            _ => Err(self.err("an expression")),
        }
    }
}

/// Parses memLang source text into a module whose private blocks start at
/// `first_block`.
pub fn parse_memlang_at(text: &str, first_block: u32) -> Result<MlModule, SyntaxError> {
    let toks = Lexer::new(text).tokens()?;
    Parser { toks, pos: 0 }.module(first_block)
}

/// Parses memLang source text (private blocks start at block 0).
pub fn parse_memlang(text: &str) -> Result<MlModule, SyntaxError> {
    parse_memlang_at(text, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::memlang::ast::dump_module;

    #[test]
    fn shift_binds_tighter_than_and() {
        let m = parse_memlang("module t { fn get(k) { ret (bitset & (1 << k)); } }").unwrap();
        let m2 = parse_memlang("module t { fn get(k) { ret bitset & 1 << k; } }").unwrap();
        assert_eq!(m.fns[0].body, m2.fns[0].body);
        let dumped = dump_module(&m2);
        assert!(dumped.contains("(& bitset (<< (i64 1) k))"), "{dumped}");
    }

    #[test]
    fn unmatched_brace_is_a_syntax_error() {
        let e = parse_memlang("module t { fn f() { ret 0; }").unwrap_err();
        assert_eq!(e.expected, "\"}\"");
    }

    #[test]
    fn reports_line_and_column() {
        let e = parse_memlang("module t {\n  fn f() { let = 3; }\n}").unwrap_err();
        assert_eq!((e.line, e.col), (2, 16));
    }

    #[test]
    fn golden_dump_round_trip() {
        let src = r#"
module t_map {
  private data;
  fn init(sz) {
    *data := calloc(sz << 3);
    ret 0;
  }
  fn get(k) {
    ret *(*data + k);
  }
  fn set(k, v) {
    print(k);
    print(v);
    *(*data + k) := v;
    ret 0;
  }
}
"#;
        let m = parse_memlang(src).unwrap();
        assert_eq!(m.fns.len(), 3);
        assert_eq!(m.privates, vec!["data"]);
        let expected = "\
(module t_map
  (private data)
  (fn init (sz)
    (store data (calloc (<< sz (i64 3))))
    (ret (i64 0))
  )
  (fn get (k)
    (ret (load (+ (load data) k)))
  )
  (fn set (k v)
    (print k)
    (print v)
    (store (+ (load data) k) v)
    (ret (i64 0))
  )
)
";
        assert_eq!(dump_module(&m), expected);
    }

    #[test]
    fn literal_suffixes() {
        let m = parse_memlang("module t { fn f() { ret 3 i32; } }").unwrap();
        assert!(matches!(m.fns[0].body[0], Stmt::Ret(Expr::LitI32(3))));
        let m = parse_memlang("module t { fn f() { let x = 4000000000; ret x; } }").unwrap();
        assert!(matches!(m.fns[0].body[0], Stmt::Let(_, Expr::LitI64(4000000000))));
    }
}
