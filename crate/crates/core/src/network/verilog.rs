//! Structural Verilog subset: one module with `input`/`output`/`wire`
//! declarations and `assign` statements over `~ & ^ |`, parentheses and
//! the constants `1'b0`/`1'b1`.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::{LogicNetwork, NetworkBuilder, Op, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: unsupported construct `{construct}`")]
    Unsupported { line: usize, col: usize, construct: String },
    #[error("{line}:{col}: undeclared identifier `{name}`")]
    Undeclared { line: usize, col: usize, name: String },
    #[error("signal `{0}` is used but never assigned")]
    Undriven(String),
    #[error("{line}:{col}: `{name}` is assigned more than once")]
    Redefined { line: usize, col: usize, name: String },
    #[error("{line}:{col}: cannot assign to input `{name}`")]
    AssignToInput { line: usize, col: usize, name: String },
    #[error("combinational cycle through `{0}`")]
    Cycle(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Const(bool),
    Sym(char),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

const UNSUPPORTED: &[&str] = &[
    "always",
    "initial",
    "reg",
    "integer",
    "parameter",
    "localparam",
    "generate",
    "function",
    "task",
    "inout",
    "begin",
    "end",
    "if",
    "else",
    "case",
    "posedge",
    "negedge",
    "supply0",
    "supply1",
    "tri",
    "genvar",
    "for",
    "defparam",
];

// Gate primitives are legal Verilog but outside the assign-only subset.
const PRIMITIVES: &[&str] = &["and", "or", "nand", "nor", "xor", "xnor", "not", "buf"];

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let syntax = |line, col, msg: &str| ParseError::Syntax {
        line,
        col,
        msg: msg.to_string(),
    };
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let advance = |i: &mut usize, line: &mut usize, col: &mut usize, n: usize| {
            for k in 0..n {
                if chars[*i + k] == '\n' {
                    *line += 1;
                    *col = 1;
                } else {
                    *col += 1;
                }
            }
            *i += n;
        };
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
        } else if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col, 1);
            }
        } else if c == '/' && chars.get(i + 1) == Some(&'*') {
            advance(&mut i, &mut line, &mut col, 2);
            loop {
                if i + 1 >= chars.len() {
                    return Err(syntax(tl, tc, "unterminated comment"));
                }
                if chars[i] == '*' && chars[i + 1] == '/' {
                    advance(&mut i, &mut line, &mut col, 2);
                    break;
                }
                advance(&mut i, &mut line, &mut col, 1);
            }
        } else if c == '`' {
            // compiler directives such as `timescale occupy the rest of the line
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col, 1);
            }
        } else if c.is_ascii_alphabetic() || c == '_' || c == '\\' {
            let start = i;
            if c == '\\' {
                // escaped identifier runs up to whitespace
                advance(&mut i, &mut line, &mut col, 1);
                while i < chars.len() && !chars[i].is_whitespace() {
                    advance(&mut i, &mut line, &mut col, 1);
                }
                let name: String = chars[start + 1..i].iter().collect();
                if name.is_empty() {
                    return Err(syntax(tl, tc, "empty escaped identifier"));
                }
                out.push(Token {
                    tok: Tok::Ident(name),
                    line: tl,
                    col: tc,
                });
                continue;
            }
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '$') {
                advance(&mut i, &mut line, &mut col, 1);
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line: tl,
                col: tc,
            });
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '\'') {
                advance(&mut i, &mut line, &mut col, 1);
            }
            let lit: String = chars[start..i].iter().collect::<String>().to_ascii_lowercase();
            let value = match lit.as_str() {
                "1'b0" | "1'h0" | "1'd0" => false,
                "1'b1" | "1'h1" | "1'd1" => true,
                "0" => false,
                "1" => true,
                _ => {
                    return Err(ParseError::Unsupported {
                        line: tl,
                        col: tc,
                        construct: lit,
                    })
                }
            };
            out.push(Token {
                tok: Tok::Const(value),
                line: tl,
                col: tc,
            });
        } else if "();,=~&|^".contains(c) {
            out.push(Token {
                tok: Tok::Sym(c),
                line: tl,
                col: tc,
            });
            advance(&mut i, &mut line, &mut col, 1);
        } else if "[]{}?:@#!+-*<>.".contains(c) {
            return Err(ParseError::Unsupported {
                line: tl,
                col: tc,
                construct: c.to_string(),
            });
        } else {
            return Err(syntax(tl, tc, &format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
enum Expr {
    Ref { name: String, line: usize, col: usize },
    Const(bool),
    Not(Box<Expr>),
    Bin(Op, Box<Expr>, Box<Expr>),
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    eof_line: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|t| (t.line, t.col))
            .unwrap_or((self.eof_line, 1))
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError::Syntax {
            line,
            col,
            msg: msg.into(),
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Sym(s)) if *s == c => {
                self.pos += 1;
                Ok(())
            }
            Some(other) => Err(self.err(format!("expected `{c}`, found {}", describe(other)))),
            None => Err(self.err(format!("expected `{c}`, found end of input"))),
        }
    }

    fn ident(&mut self) -> Result<(String, usize, usize), ParseError> {
        let (line, col) = self.here();
        match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                self.check_keyword(&name)?;
                self.pos += 1;
                Ok((name, line, col))
            }
            Some(other) => Err(self.err(format!("expected identifier, found {}", describe(&other)))),
            None => Err(self.err("expected identifier, found end of input")),
        }
    }

    fn check_keyword(&self, name: &str) -> Result<(), ParseError> {
        if UNSUPPORTED.contains(&name) || PRIMITIVES.contains(&name) {
            let (line, col) = self.here();
            return Err(ParseError::Unsupported {
                line,
                col,
                construct: name.to_string(),
            });
        }
        Ok(())
    }

    fn is_sym(&self, c: char) -> bool {
        matches!(self.peek(), Some(Tok::Sym(s)) if *s == c)
    }

    // expr := xor ('|' xor)*
    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.xor()?;
        while self.is_sym('|') {
            self.pos += 1;
            let rhs = self.xor()?;
            lhs = Expr::Bin(Op::Or, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn xor(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.and()?;
        while self.is_sym('^') {
            self.pos += 1;
            let rhs = self.and()?;
            lhs = Expr::Bin(Op::Xor, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while self.is_sym('&') {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Bin(Op::And, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.is_sym('~') {
            self.pos += 1;
            return Ok(Expr::Not(Box::new(self.unary()?)));
        }
        if self.is_sym('(') {
            self.pos += 1;
            let e = self.expr()?;
            self.expect_sym(')')?;
            return Ok(e);
        }
        if let Some(Tok::Const(v)) = self.peek() {
            let v = *v;
            self.pos += 1;
            return Ok(Expr::Const(v));
        }
        let (name, line, col) = self.ident()?;
        Ok(Expr::Ref { name, line, col })
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Const(v) => format!("`1'b{}`", *v as u8),
        Tok::Sym(c) => format!("`{c}`"),
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Kind {
    Input,
    Output,
    Wire,
}

struct Assign {
    expr: Expr,
}

struct Module {
    name: String,
    decls: HashMap<String, Kind>,
    inputs: Vec<String>,
    outputs: Vec<String>,
    assigns: Vec<(String, Assign)>,
}

fn parse_module(text: &str) -> Result<Module, ParseError> {
    let toks = lex(text)?;
    let eof_line = text.lines().count().max(1);
    let mut p = Parser { toks, pos: 0, eof_line };

    match p.peek() {
        Some(Tok::Ident(k)) if k == "module" => p.pos += 1,
        _ => return Err(p.err("expected `module`")),
    }
    let (name, _, _) = p.ident()?;
    let mut m = Module {
        name,
        decls: HashMap::new(),
        inputs: Vec::new(),
        outputs: Vec::new(),
        assigns: Vec::new(),
    };

    let declare = |m: &mut Module, kind: Kind, name: String, line: usize, col: usize| -> Result<(), ParseError> {
        match m.decls.get(&name) {
            Some(Kind::Wire) | None => {}
            Some(_) if kind == Kind::Wire => return Ok(()),
            Some(_) => {
                return Err(ParseError::Syntax {
                    line,
                    col,
                    msg: format!("`{name}` declared twice"),
                })
            }
        }
        match kind {
            Kind::Input => m.inputs.push(name.clone()),
            Kind::Output => m.outputs.push(name.clone()),
            Kind::Wire => {}
        }
        m.decls.insert(name, kind);
        Ok(())
    };

    // port list, plain or ANSI style
    let mut header_ports: Vec<(String, usize, usize)> = Vec::new();
    if p.is_sym('(') {
        p.pos += 1;
        let mut ansi_kind: Option<Kind> = None;
        if !p.is_sym(')') {
            loop {
                if let Some(Tok::Ident(k)) = p.peek() {
                    let kind = match k.as_str() {
                        "input" => Some(Kind::Input),
                        "output" => Some(Kind::Output),
                        _ => None,
                    };
                    if kind.is_some() {
                        ansi_kind = kind;
                        p.pos += 1;
                        if matches!(p.peek(), Some(Tok::Ident(w)) if w == "wire") {
                            p.pos += 1;
                        }
                    }
                }
                let (port, line, col) = p.ident()?;
                match ansi_kind {
                    Some(kind) => declare(&mut m, kind, port, line, col)?,
                    None => header_ports.push((port, line, col)),
                }
                if p.is_sym(',') || p.is_sym(';') {
                    p.pos += 1;
                    continue;
                }
                break;
            }
        }
        p.expect_sym(')')?;
    }
    p.expect_sym(';')?;

    loop {
        let (line, col) = p.here();
        let kw = match p.peek().cloned() {
            Some(Tok::Ident(k)) => k,
            Some(other) => return Err(p.err(format!("unexpected {}", describe(&other)))),
            None => return Err(p.err("missing `endmodule`")),
        };
        match kw.as_str() {
            "endmodule" => {
                p.pos += 1;
                break;
            }
            "input" | "output" | "wire" => {
                p.pos += 1;
                let kind = match kw.as_str() {
                    "input" => Kind::Input,
                    "output" => Kind::Output,
                    _ => Kind::Wire,
                };
                if kind != Kind::Wire && matches!(p.peek(), Some(Tok::Ident(w)) if w == "wire") {
                    p.pos += 1;
                }
                loop {
                    let (n, l, c) = p.ident()?;
                    declare(&mut m, kind, n, l, c)?;
                    if p.is_sym(',') {
                        p.pos += 1;
                        continue;
                    }
                    break;
                }
                p.expect_sym(';')?;
            }
            "assign" => {
                p.pos += 1;
                let (target, tl, tc) = p.ident()?;
                p.expect_sym('=')?;
                let expr = p.expr()?;
                p.expect_sym(';')?;
                match m.decls.get(&target) {
                    None => {
                        return Err(ParseError::Undeclared {
                            line: tl,
                            col: tc,
                            name: target,
                        })
                    }
                    Some(Kind::Input) => {
                        return Err(ParseError::AssignToInput {
                            line: tl,
                            col: tc,
                            name: target,
                        })
                    }
                    _ => {}
                }
                if m.assigns.iter().any(|(n, _)| *n == target) {
                    return Err(ParseError::Redefined {
                        line: tl,
                        col: tc,
                        name: target,
                    });
                }
                m.assigns.push((target, Assign { expr }));
            }
            "module" => {
                return Err(ParseError::Unsupported {
                    line,
                    col,
                    construct: "nested module".into(),
                })
            }
            other => {
                p.check_keyword(other)?;
                // an identifier followed by an identifier is a module instance
                return Err(ParseError::Unsupported {
                    line,
                    col,
                    construct: format!("statement starting with `{other}`"),
                });
            }
        }
    }
    if p.pos < p.toks.len() {
        return Err(p.err("only one module per file is supported"));
    }
    for (port, line, col) in header_ports {
        match m.decls.get(&port) {
            Some(Kind::Input) | Some(Kind::Output) => {}
            _ => return Err(ParseError::Undeclared { line, col, name: port }),
        }
    }
    Ok(m)
}

/// Parses the structural Verilog subset into a logic network.
///
/// PIs come first in declaration order, then gates in assignment order
/// (a signal referenced before its assignment is built on first use), then
/// POs in declaration order. Every operator occurrence becomes its own
/// vertex; no structural hashing is done.
pub fn parse_verilog(text: &str) -> Result<LogicNetwork, ParseError> {
    let m = parse_module(text)?;
    let mut b = NetworkBuilder::new(m.name.clone());
    let mut signal: HashMap<String, VertexId> = HashMap::new();
    for name in &m.inputs {
        let v = b.add_pi(name.clone());
        signal.insert(name.clone(), v);
    }
    let assigns: HashMap<&str, &Assign> = m.assigns.iter().map(|(n, a)| (n.as_str(), a)).collect();
    let mut on_stack: Vec<String> = Vec::new();

    struct Ctx<'a> {
        m: &'a Module,
        assigns: &'a HashMap<&'a str, &'a Assign>,
    }

    fn resolve(
        ctx: &Ctx<'_>,
        b: &mut NetworkBuilder,
        signal: &mut HashMap<String, VertexId>,
        stack: &mut Vec<String>,
        name: &str,
        at: (usize, usize),
    ) -> Result<VertexId, ParseError> {
        if let Some(&v) = signal.get(name) {
            return Ok(v);
        }
        if !ctx.m.decls.contains_key(name) {
            return Err(ParseError::Undeclared {
                line: at.0,
                col: at.1,
                name: name.to_string(),
            });
        }
        if stack.iter().any(|s| s == name) {
            return Err(ParseError::Cycle(name.to_string()));
        }
        let assign = ctx
            .assigns
            .get(name)
            .ok_or_else(|| ParseError::Undriven(name.to_string()))?;
        stack.push(name.to_string());
        let v = build(ctx, b, signal, stack, &assign.expr)?;
        stack.pop();
        signal.insert(name.to_string(), v);
        Ok(v)
    }

    fn build(
        ctx: &Ctx<'_>,
        b: &mut NetworkBuilder,
        signal: &mut HashMap<String, VertexId>,
        stack: &mut Vec<String>,
        e: &Expr,
    ) -> Result<VertexId, ParseError> {
        Ok(match e {
            Expr::Ref { name, line, col } => resolve(ctx, b, signal, stack, name, (*line, *col))?,
            Expr::Const(v) => b.add_const(*v),
            Expr::Not(inner) => {
                let a = build(ctx, b, signal, stack, inner)?;
                b.add_gate(Op::Not, &[a]).expect("arity")
            }
            Expr::Bin(op, l, r) => {
                let a = build(ctx, b, signal, stack, l)?;
                let c = build(ctx, b, signal, stack, r)?;
                b.add_gate(*op, &[a, c]).expect("arity")
            }
        })
    }

    let ctx = Ctx {
        m: &m,
        assigns: &assigns,
    };
    for (name, _) in &m.assigns {
        resolve(&ctx, &mut b, &mut signal, &mut on_stack, name, (0, 0))?;
    }
    for name in &m.outputs {
        let driver = resolve(&ctx, &mut b, &mut signal, &mut on_stack, name, (0, 0))?;
        b.add_po(name.clone(), driver).expect("drivers are never POs");
    }
    Ok(b.build())
}

fn op_symbol(op: Op) -> Option<&'static str> {
    match op {
        Op::And => Some("&"),
        Op::Or => Some("|"),
        Op::Xor => Some("^"),
        _ => None,
    }
}

/// Emits a network in the same Verilog subset.
///
/// Fan-out vertices are transparent (their readers refer to the fan-out's
/// driver). Operators outside the subset are written as equivalent
/// expressions, so re-parsing is only structurally identical for networks
/// made of AND, OR, XOR, NOT and constants.
pub fn unparse_verilog(net: &LogicNetwork) -> String {
    let mut names: Vec<String> = vec![String::new(); net.vertex_count()];
    let mut wires = Vec::new();
    let mut body = String::new();
    for v in net.vertices() {
        let fan: Vec<String> = net.fanins(v.id).map(|u| names[u.0].clone()).collect();
        match v.op {
            Op::Pi => names[v.id.0] = v.label.clone(),
            Op::Po => {}
            Op::Fanout => names[v.id.0] = fan[0].clone(),
            op => {
                let name = format!("n{}", v.id.0);
                let rhs = match op {
                    Op::Const0 => "1'b0".to_string(),
                    Op::Const1 => "1'b1".to_string(),
                    Op::Not => format!("~{}", fan[0]),
                    Op::Nand => format!("~({} & {})", fan[0], fan[1]),
                    Op::Nor => format!("~({} | {})", fan[0], fan[1]),
                    Op::Xnor => format!("~({} ^ {})", fan[0], fan[1]),
                    Op::Maj => format!(
                        "({a} & {b}) | ({a} & {c}) | ({b} & {c})",
                        a = fan[0],
                        b = fan[1],
                        c = fan[2]
                    ),
                    op => format!("{} {} {}", fan[0], op_symbol(op).expect("binary op"), fan[1]),
                };
                let _ = writeln!(body, "  assign {name} = {rhs};");
                wires.push(name.clone());
                names[v.id.0] = name;
            }
        }
    }
    for &po in net.pos() {
        let driver = net.fanins(po).next().expect("PO has a driver");
        let _ = writeln!(body, "  assign {} = {};", net.vertex(po).label, names[driver.0]);
    }
    let pis = net.pi_labels();
    let pos = net.po_labels();
    let mut ports: Vec<&str> = pis.clone();
    ports.extend(pos.iter());
    let mut out = String::new();
    let _ = writeln!(out, "module {}({});", net.name(), ports.join(", "));
    if !pis.is_empty() {
        let _ = writeln!(out, "  input {};", pis.join(", "));
    }
    if !pos.is_empty() {
        let _ = writeln!(out, "  output {};", pos.join(", "));
    }
    if !wires.is_empty() {
        let _ = writeln!(out, "  wire {};", wires.join(", "));
    }
    out.push_str(&body);
    out.push_str("endmodule\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_and() {
        let net = parse_verilog("module m(input a, b, output y); assign y = a & b; endmodule").unwrap();
        let s = net.stats();
        assert_eq!((s.pi_count, s.po_count, s.vertex_count), (2, 1, 4));
        assert_eq!(net.vertices().iter().filter(|v| v.op == Op::And).count(), 1);
    }

    #[test]
    fn semicolon_separated_ansi_header() {
        let net = parse_verilog("module m(input a,b; output y); assign y = a & b; endmodule").unwrap();
        assert_eq!(net.pi_labels(), vec!["a", "b"]);
        assert_eq!(net.po_labels(), vec!["y"]);
    }

    #[test]
    fn inverter() {
        let net = parse_verilog("module inv(a, y);\n input a;\n output y;\n assign y = ~a;\nendmodule").unwrap();
        let ops: Vec<Op> = net.vertices().iter().map(|v| v.op).collect();
        assert_eq!(ops, vec![Op::Pi, Op::Not, Op::Po]);
    }

    #[test]
    fn precedence() {
        // ~ binds tighter than &, & tighter than ^, ^ tighter than |
        let net = parse_verilog("module p(a, b, c, y); input a, b, c; output y; assign y = a | b ^ ~c & a; endmodule")
            .unwrap();
        for row in 0..8u8 {
            let (a, b, c) = (row & 1 == 1, row & 2 == 2, row & 4 == 4);
            let expect = a | (b ^ ((!c) & a));
            assert_eq!(net.simulate(&[a, b, c]).unwrap(), vec![expect]);
        }
    }

    #[test]
    fn out_of_order_assignments_and_constants() {
        let src = "module o(a, y, z);
            input a; output y, z; wire t;
            assign y = t & 1'b1;  // t is assigned below
            assign t = ~a;
            assign z = 1'b0;
          endmodule";
        let net = parse_verilog(src).unwrap();
        assert_eq!(net.simulate(&[false]).unwrap(), vec![true, false]);
        assert_eq!(net.simulate(&[true]).unwrap(), vec![false, false]);
    }

    #[test]
    fn errors() {
        let e = parse_verilog("module m(a, y); input a; output y; always y = a; endmodule").unwrap_err();
        assert!(matches!(e, ParseError::Unsupported { ref construct, .. } if construct == "always"));
        let e = parse_verilog("module m(a, y); input a; output y; assign y = b; endmodule").unwrap_err();
        assert!(matches!(e, ParseError::Undeclared { ref name, .. } if name == "b"));
        let e = parse_verilog(
            "module m(a, y); input a; output y; wire p, q; assign p = q; assign q = p & a; assign y = p; endmodule",
        )
        .unwrap_err();
        assert!(matches!(e, ParseError::Cycle(_)));
        let e = parse_verilog("module m(a, y); input a; output y; assign y = a &; endmodule").unwrap_err();
        assert!(matches!(e, ParseError::Syntax { line: 1, .. }));
        let e = parse_verilog("module m(a, y);\n input a;\n output y;\n assign y = (a;\nendmodule").unwrap_err();
        assert!(matches!(e, ParseError::Syntax { line: 4, .. }), "{e}");
        let e = parse_verilog("module m(a, y); input a; output y; wire w; assign y = w; endmodule").unwrap_err();
        assert_eq!(e, ParseError::Undriven("w".into()));
        let e = parse_verilog("module m(a, y); input [3:0] a; output y; endmodule").unwrap_err();
        assert!(matches!(e, ParseError::Unsupported { .. }));
        let e = parse_verilog("module m(a, y); input a; output y; and g1(y, a, a); endmodule").unwrap_err();
        assert!(matches!(e, ParseError::Unsupported { .. }));
        let e = parse_verilog("module m(a, y); input a; output y; assign a = y; endmodule").unwrap_err();
        assert!(matches!(e, ParseError::AssignToInput { .. }));
    }

    #[test]
    fn unparse_round_trip() {
        let src = "module r(a, b, c, y, z); input a, b, c; output y, z;
            assign y = (a & ~b) | (c ^ 1'b1); assign z = ~(a | b) & y; endmodule";
        let net = parse_verilog(src).unwrap();
        let text = unparse_verilog(&net);
        let again = parse_verilog(&text).unwrap();
        assert_eq!(again, net, "{text}");
    }
}
