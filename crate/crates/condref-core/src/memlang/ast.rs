//! memLang abstract syntax.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Binary operators; shifts bind tighter than `&`, which binds tighter
/// than `|`; comparisons bind loosest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BinOp {
    Add,
    Sub,
    And,
    Or,
    Shl,
    Shr,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::And => "&",
            BinOp::Or => "|",
            BinOp::Shl => "<<",
            BinOp::Shr => ">>",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
        }
    }
}

/// Expressions (effectful ones included: memLang is mixed-embedding style,
/// a command is an expression).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Expr {
    LitI32(i32),
    LitI64(i64),
    Var(String),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Load(Box<Expr>),
    Calloc(Box<Expr>),
    Call(String, Vec<Expr>),
}

/// Statements. There are no loops; bodies are finite by construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stmt {
    Let(String, Expr),
    Store(Expr, Expr),
    Free(Expr),
    Print(Expr),
    Ret(Expr),
    If(Expr, Vec<Stmt>, Vec<Stmt>),
    /// Expression evaluated for effect (e.g. a bare call).
    Expr(Expr),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FnDef {
    pub name: String,
    pub params: Vec<String>,
    pub body: Vec<Stmt>,
}

/// A parsed module: private one-cell blocks plus function definitions.
/// Private names are in scope as pointer constants to their reserved
/// blocks, assigned in declaration order starting at `first_block`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlModule {
    pub name: String,
    pub privates: Vec<String>,
    pub fns: Vec<FnDef>,
    pub first_block: u32,
}

impl MlModule {
    pub fn fn_def(&self, name: &str) -> Option<&FnDef> {
        self.fns.iter().find(|f| f.name == name)
    }

    pub fn private_block(&self, name: &str) -> Option<u32> {
        self.privates
            .iter()
            .position(|p| p == name)
            .map(|i| self.first_block + i as u32)
    }
}

/// Canonical structured dump of the AST, used by golden tests and the
/// `parse` subcommand.
pub fn dump_module(m: &MlModule) -> String {
    let mut out = String::new();
    out.push_str(&format!("(module {}\n", m.name));
    for p in &m.privates {
        out.push_str(&format!("  (private {p})\n"));
    }
    for f in &m.fns {
        out.push_str(&format!("  (fn {} ({})\n", f.name, f.params.join(" ")));
        for s in &f.body {
            dump_stmt(&mut out, s, 2);
        }
        out.push_str("  )\n");
    }
    out.push_str(")\n");
    out
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn dump_stmt(out: &mut String, s: &Stmt, level: usize) {
    indent(out, level);
    match s {
        Stmt::Let(x, e) => out.push_str(&format!("(let {x} {})\n", dump_expr(e))),
        Stmt::Store(p, v) => out.push_str(&format!("(store {} {})\n", dump_expr(p), dump_expr(v))),
        Stmt::Free(e) => out.push_str(&format!("(free {})\n", dump_expr(e))),
        Stmt::Print(e) => out.push_str(&format!("(print {})\n", dump_expr(e))),
        Stmt::Ret(e) => out.push_str(&format!("(ret {})\n", dump_expr(e))),
        Stmt::Expr(e) => out.push_str(&format!("(expr {})\n", dump_expr(e))),
        Stmt::If(c, then, els) => {
            out.push_str(&format!("(if {}\n", dump_expr(c)));
            indent(out, level + 1);
            out.push_str("(then\n");
            for s in then {
                dump_stmt(out, s, level + 2);
            }
            indent(out, level + 1);
            out.push_str(")\n");
            indent(out, level + 1);
            out.push_str("(else\n");
            for s in els {
                dump_stmt(out, s, level + 2);
            }
            indent(out, level + 1);
            out.push_str(")\n");
            indent(out, level);
            out.push_str(")\n");
        }
    }
}

pub fn dump_expr(e: &Expr) -> String {
    match e {
        Expr::LitI32(i) => format!("(i32 {i})"),
        Expr::LitI64(i) => format!("(i64 {i})"),
        Expr::Var(x) => x.clone(),
        Expr::Bin(op, a, b) => format!("({} {} {})", op.symbol(), dump_expr(a), dump_expr(b)),
        Expr::Neg(a) => format!("(neg {})", dump_expr(a)),
        Expr::Load(a) => format!("(load {})", dump_expr(a)),
        Expr::Calloc(a) => format!("(calloc {})", dump_expr(a)),
        Expr::Call(f, args) => {
            let args: Vec<String> = args.iter().map(dump_expr).collect();
            format!("(call {f} {})", args.join(" "))
        }
    }
}

impl fmt::Display for MlModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", dump_module(self))
    }
}
