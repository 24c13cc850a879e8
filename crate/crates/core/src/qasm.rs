//! OpenQASM 2.0 subset: registers, qelib1 gates with constant parameter
//! expressions, barriers and measurements.
//!
//! Registers are flattened into one index space in declaration order. User
//! `gate` definitions, `opaque`, `if` and `reset` are rejected.

use std::f64::consts::PI;
use std::fmt;

use crate::circuit::{Circuit, Gate, Instruction};
use crate::gate::GateKind;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QasmSource {
    pub text: String,
    pub origin: String,
}

impl QasmSource {
    pub fn new(text: impl Into<String>, origin: impl Into<String>) -> Self {
        Self {
            text: text.into(),
            origin: origin.into(),
        }
    }

    pub fn inline(text: impl Into<String>) -> Self {
        Self::new(text, "<inline>")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub severity: Severity,
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {sev}: {}", self.line, self.column, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64),
    Str(String),
    Sym(&'static str),
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseDiagnostic> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, col, message: String| ParseDiagnostic {
        line,
        column: col,
        message,
        severity: Severity::Error,
    };
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line: tl,
                col: tc,
            });
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            let v = s
                .parse::<f64>()
                .map_err(|_| err(tl, tc, format!("malformed number `{s}`")))?;
            out.push(Token {
                tok: Tok::Num(v),
                line: tl,
                col: tc,
            });
            continue;
        }
        if c == '"' {
            let start = i + 1;
            i += 1;
            while i < chars.len() && chars[i] != '"' && chars[i] != '\n' {
                i += 1;
            }
            if i >= chars.len() || chars[i] != '"' {
                return Err(err(tl, tc, "unterminated string".into()));
            }
            let s: String = chars[start..i].iter().collect();
            i += 1;
            col += i - (start - 1);
            out.push(Token {
                tok: Tok::Str(s),
                line: tl,
                col: tc,
            });
            continue;
        }
        let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let sym = match two.as_str() {
            "->" => Some("->"),
            "==" => Some("=="),
            _ => None,
        };
        if let Some(s) = sym {
            i += 2;
            col += 2;
            out.push(Token {
                tok: Tok::Sym(s),
                line: tl,
                col: tc,
            });
            continue;
        }
        let sym = match c {
            ';' => ";",
            ',' => ",",
            '(' => "(",
            ')' => ")",
            '[' => "[",
            ']' => "]",
            '{' => "{",
            '}' => "}",
            '+' => "+",
            '-' => "-",
            '*' => "*",
            '/' => "/",
            '^' => "^",
            _ => return Err(err(tl, tc, format!("unexpected character `{c}`"))),
        };
        i += 1;
        col += 1;
        out.push(Token {
            tok: Tok::Sym(sym),
            line: tl,
            col: tc,
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Register {
    name: String,
    offset: usize,
    size: usize,
}

/// One operand: a whole register or a single indexed element.
#[derive(Clone, Copy)]
enum Operand {
    Whole { offset: usize, size: usize },
    Single(usize),
}

impl Operand {
    fn size(self) -> Option<usize> {
        match self {
            Operand::Whole { size, .. } => Some(size),
            Operand::Single(_) => None,
        }
    }

    fn at(self, k: usize) -> usize {
        match self {
            Operand::Whole { offset, .. } => offset + k,
            Operand::Single(i) => i,
        }
    }
}

type PResult<T> = Result<T, ParseDiagnostic>;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    qregs: Vec<Register>,
    cregs: Vec<Register>,
    insts: Vec<Instruction>,
    diags: Vec<ParseDiagnostic>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if !matches!(t.tok, Tok::Eof) {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, t: &Token, message: impl Into<String>) -> ParseDiagnostic {
        ParseDiagnostic {
            line: t.line,
            column: t.col,
            message: message.into(),
            severity: Severity::Error,
        }
    }

    fn expect_sym(&mut self, s: &'static str) -> PResult<Token> {
        let t = self.next();
        if t.tok == Tok::Sym(s) {
            Ok(t)
        } else {
            Err(self.error_at(&t, format!("expected `{s}`, found {}", describe(&t.tok))))
        }
    }

    fn expect_ident(&mut self) -> PResult<(String, Token)> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) => Ok((s.clone(), t.clone())),
            other => Err(self.error_at(&t, format!("expected identifier, found {}", describe(other)))),
        }
    }

    fn expect_uint(&mut self) -> PResult<(usize, Token)> {
        let t = self.next();
        match t.tok {
            Tok::Num(v) if v >= 0.0 && v.fract() == 0.0 => Ok((v as usize, t)),
            ref other => Err(self.error_at(&t, format!("expected non-negative integer, found {}", describe(other)))),
        }
    }

    /// Skips past the next `;` (or a balanced `{...}` block) after an error.
    fn recover(&mut self) {
        let mut depth = 0usize;
        loop {
            let t = self.next();
            match t.tok {
                Tok::Eof => return,
                Tok::Sym("{") => depth += 1,
                Tok::Sym("}") => {
                    depth = depth.saturating_sub(1);
                    if depth == 0 {
                        return;
                    }
                }
                Tok::Sym(";") if depth == 0 => return,
                _ => {}
            }
        }
    }

    fn header(&mut self) -> PResult<()> {
        let t = self.next();
        if t.tok != Tok::Ident("OPENQASM".into()) {
            return Err(self.error_at(&t, "program must start with `OPENQASM 2.0;`"));
        }
        let v = self.next();
        match v.tok {
            Tok::Num(x) if (x - 2.0).abs() < 1e-12 => {}
            _ => return Err(self.error_at(&v, "only OpenQASM version 2.0 is supported")),
        }
        self.expect_sym(";")?;
        Ok(())
    }

    fn statement(&mut self) -> PResult<()> {
        let t = self.peek().clone();
        let Tok::Ident(word) = &t.tok else {
            return Err(self.error_at(&t, format!("expected statement, found {}", describe(&t.tok))));
        };
        match word.as_str() {
            "include" => {
                self.next();
                let f = self.next();
                match &f.tok {
                    Tok::Str(s) if s == "qelib1.inc" => {}
                    Tok::Str(s) => return Err(self.error_at(&f, format!("unsupported include `{s}`"))),
                    other => return Err(self.error_at(&f, format!("expected file name, found {}", describe(other)))),
                }
                self.expect_sym(";")?;
            }
            "qreg" | "creg" => {
                self.next();
                let (name, nt) = self.expect_ident()?;
                self.expect_sym("[")?;
                let (size, st) = self.expect_uint()?;
                self.expect_sym("]")?;
                self.expect_sym(";")?;
                if size == 0 {
                    return Err(self.error_at(&st, "register size must be positive"));
                }
                if self.qregs.iter().chain(&self.cregs).any(|r| r.name == name) {
                    return Err(self.error_at(&nt, format!("register `{name}` already declared")));
                }
                let regs = if word == "qreg" { &mut self.qregs } else { &mut self.cregs };
                let offset = regs.iter().map(|r| r.size).sum();
                regs.push(Register { name, offset, size });
            }
            "gate" | "opaque" => {
                return Err(self.error_at(&t, format!("`{word}` definitions are not supported")));
            }
            "if" | "reset" => {
                return Err(self.error_at(&t, format!("`{word}` is not supported")));
            }
            "barrier" => {
                self.next();
                let ops = self.operand_list(true)?;
                self.expect_sym(";")?;
                let mut qubits = Vec::new();
                for op in ops {
                    match op {
                        Operand::Whole { offset, size } => qubits.extend(offset..offset + size),
                        Operand::Single(q) => qubits.push(q),
                    }
                }
                let mut seen = Vec::new();
                qubits.retain(|q| {
                    let fresh = !seen.contains(q);
                    seen.push(*q);
                    fresh
                });
                self.insts.push(Instruction::barrier(qubits));
            }
            "measure" => {
                self.next();
                let q = self.operand(true)?;
                self.expect_sym("->")?;
                let ct = self.peek().clone();
                let c = self.operand(false)?;
                self.expect_sym(";")?;
                match (q.size(), c.size()) {
                    (None, None) => {}
                    (Some(a), Some(b)) if a == b => {}
                    (Some(_), None) | (None, Some(_)) | (Some(_), Some(_)) => {
                        return Err(self.error_at(&ct, "measure operands have mismatched sizes"));
                    }
                }
                let n = q.size().unwrap_or(1);
                for k in 0..n {
                    self.insts.push(Instruction::measure(q.at(k), c.at(k)));
                }
            }
            _ => self.gate_application()?,
        }
        Ok(())
    }

    fn gate_application(&mut self) -> PResult<()> {
        let (name, nt) = self.expect_ident()?;
        let kind = GateKind::from_name(&name).ok_or_else(|| self.error_at(&nt, format!("unknown gate `{name}`")))?;
        let mut params = Vec::new();
        if self.peek().tok == Tok::Sym("(") {
            self.next();
            if self.peek().tok != Tok::Sym(")") {
                loop {
                    params.push(self.expr()?);
                    if self.peek().tok == Tok::Sym(",") {
                        self.next();
                    } else {
                        break;
                    }
                }
            }
            self.expect_sym(")")?;
        }
        if params.len() != kind.param_arity() {
            return Err(self.error_at(
                &nt,
                format!("`{name}` takes {} parameter(s), got {}", kind.param_arity(), params.len()),
            ));
        }
        let ops = self.operand_list(true)?;
        self.expect_sym(";")?;
        if ops.len() != kind.qubit_arity() {
            return Err(self.error_at(
                &nt,
                format!("`{name}` acts on {} qubit(s), got {}", kind.qubit_arity(), ops.len()),
            ));
        }
        let sizes: Vec<usize> = ops.iter().filter_map(|o| o.size()).collect();
        let width = match sizes.first() {
            None => 1,
            Some(&s) if sizes.iter().all(|&x| x == s) => s,
            Some(_) => return Err(self.error_at(&nt, "register operands have mismatched sizes")),
        };
        for k in 0..width {
            let qubits: Vec<usize> = ops.iter().map(|o| o.at(k)).collect();
            if qubits.len() == 2 && qubits[0] == qubits[1] {
                return Err(self.error_at(&nt, format!("`{name}` repeats qubit {}", qubits[0])));
            }
            self.insts.push(Instruction::Gate(Gate::new(kind, params.clone(), qubits)));
        }
        Ok(())
    }

    fn operand_list(&mut self, quantum: bool) -> PResult<Vec<Operand>> {
        let mut ops = vec![self.operand(quantum)?];
        while self.peek().tok == Tok::Sym(",") {
            self.next();
            ops.push(self.operand(quantum)?);
        }
        Ok(ops)
    }

    fn operand(&mut self, quantum: bool) -> PResult<Operand> {
        let (name, nt) = self.expect_ident()?;
        let regs = if quantum { &self.qregs } else { &self.cregs };
        let Some(reg) = regs.iter().find(|r| r.name == name) else {
            let kind = if quantum { "quantum" } else { "classical" };
            return Err(self.error_at(&nt, format!("undeclared {kind} register `{name}`")));
        };
        let (offset, size) = (reg.offset, reg.size);
        if self.peek().tok != Tok::Sym("[") {
            return Ok(Operand::Whole { offset, size });
        }
        self.next();
        let (idx, it) = self.expect_uint()?;
        self.expect_sym("]")?;
        if idx >= size {
            return Err(self.error_at(&it, format!("index out of bounds: {name}[{idx}] with size {size}")));
        }
        Ok(Operand::Single(offset + idx))
    }

    fn expr(&mut self) -> PResult<f64> {
        let mut v = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Sym("+") => {
                    self.next();
                    v += self.term()?;
                }
                Tok::Sym("-") => {
                    self.next();
                    v -= self.term()?;
                }
                _ => return Ok(v),
            }
        }
    }

    fn term(&mut self) -> PResult<f64> {
        let mut v = self.unary()?;
        loop {
            match self.peek().tok {
                Tok::Sym("*") => {
                    self.next();
                    v *= self.unary()?;
                }
                Tok::Sym("/") => {
                    let t = self.next();
                    let d = self.unary()?;
                    if d == 0.0 {
                        return Err(self.error_at(&t, "division by zero"));
                    }
                    v /= d;
                }
                _ => return Ok(v),
            }
        }
    }

    fn unary(&mut self) -> PResult<f64> {
        match self.peek().tok {
            Tok::Sym("-") => {
                self.next();
                Ok(-self.unary()?)
            }
            Tok::Sym("+") => {
                self.next();
                self.unary()
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> PResult<f64> {
        let t = self.next();
        match &t.tok {
            Tok::Num(v) => Ok(*v),
            Tok::Ident(s) if s == "pi" => Ok(PI),
            Tok::Sym("(") => {
                let v = self.expr()?;
                self.expect_sym(")")?;
                Ok(v)
            }
            other => Err(self.error_at(&t, format!("expected expression, found {}", describe(other)))),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Num(v) => format!("number {v}"),
        Tok::Str(s) => format!("string \"{s}\""),
        Tok::Sym(s) => format!("`{s}`"),
        Tok::Eof => "end of input".into(),
    }
}

/// Parses a program. Errors are collected statement by statement, so one
/// malformed line does not hide the others.
pub fn parse(src: &QasmSource) -> Result<Circuit, Vec<ParseDiagnostic>> {
    let toks = lex(&src.text).map_err(|d| vec![d])?;
    let mut p = Parser {
        toks,
        pos: 0,
        qregs: Vec::new(),
        cregs: Vec::new(),
        insts: Vec::new(),
        diags: Vec::new(),
    };
    if let Err(d) = p.header() {
        return Err(vec![d]);
    }
    while !matches!(p.peek().tok, Tok::Eof) {
        if let Err(d) = p.statement() {
            p.diags.push(d);
            p.recover();
        }
    }
    if p.diags.iter().any(|d| d.severity == Severity::Error) {
        return Err(p.diags);
    }
    let nq = p.qregs.iter().map(|r| r.size).sum();
    let nc = p.cregs.iter().map(|r| r.size).sum();
    let end = p.toks.last().cloned().expect("eof token");
    Circuit::from_instructions(nq, nc, p.insts).map_err(|e| {
        vec![ParseDiagnostic {
            line: end.line,
            column: end.col,
            message: e.to_string(),
            severity: Severity::Error,
        }]
    })
}

pub fn parse_str(text: &str) -> Result<Circuit, Vec<ParseDiagnostic>> {
    parse(&QasmSource::inline(text))
}

/// Formats an angle as a multiple of pi/12 when within 1e-12 of one,
/// otherwise with 17 significant digits.
pub fn format_angle(v: f64) -> String {
    let step = PI / 12.0;
    let k = (v / step).round();
    if (v - k * step).abs() <= 1e-12 && k.abs() < 1e9 {
        let k = k as i64;
        if k == 0 {
            return "0".into();
        }
        let g = gcd(k.unsigned_abs(), 12) as i64;
        let (num, den) = (k / g, 12 / g);
        let head = match num {
            1 => "pi".to_string(),
            -1 => "-pi".to_string(),
            n => format!("{n}*pi"),
        };
        return if den == 1 { head } else { format!("{head}/{den}") };
    }
    format!("{v:.16e}")
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Deterministic OpenQASM 2.0 text with a single `q` and `c` register.
pub fn emit(circuit: &Circuit) -> QasmSource {
    use std::fmt::Write;
    let mut s = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    if circuit.num_qubits() > 0 {
        let _ = writeln!(s, "qreg q[{}];", circuit.num_qubits());
    }
    if circuit.num_clbits() > 0 {
        let _ = writeln!(s, "creg c[{}];", circuit.num_clbits());
    }
    let qlist = |qs: &[usize]| qs.iter().map(|q| format!("q[{q}]")).collect::<Vec<_>>().join(",");
    for inst in circuit.instructions() {
        match inst {
            Instruction::Gate(g) => {
                s.push_str(g.kind.name());
                if !g.params.is_empty() {
                    let ps: Vec<String> = g.params.iter().map(|&p| format_angle(p)).collect();
                    let _ = write!(s, "({})", ps.join(","));
                }
                let _ = writeln!(s, " {};", qlist(&g.qubits));
            }
            Instruction::Barrier { qubits } => {
                let _ = writeln!(s, "barrier {};", qlist(qubits));
            }
            Instruction::Measure { qubit, clbit } => {
                let _ = writeln!(s, "measure q[{qubit}] -> c[{clbit}];");
            }
        }
    }
    QasmSource::new(s, circuit.label.clone().unwrap_or_else(|| "<emitted>".into()))
}
