//! A small QASM 2.0 dialect for lowered circuits.
//!
//! Each classical bit gets its own 1-bit register `c<k>`, so a feedback
//! phase reads `if(c3==1) u1(pi/8) q[1];`. Angles that are dyadic multiples
//! of π print symbolically; others print with 15 decimals.
//!
//! The gate parameters follow qelib: `u2(φ, λ)` and `u3(θ, φ, λ)` hold the
//! matrices this crate calls `U2(λ, φ)` and `U3(θ, λ, φ)`.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::QasmError;
use crate::gates::{self, GateKind};
use crate::phase::Angle;
use crate::sim::{Circuit, Op};

const HEADER: &str = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";

fn angle(a: &Angle) -> String {
    a.format_with("pi")
}

/// Renders a lowered circuit.
pub fn to_qasm(circuit: &Circuit) -> Result<String, QasmError> {
    let mut out = String::from(HEADER);
    if circuit.num_qubits() > 0 {
        writeln!(out, "qreg q[{}];", circuit.num_qubits()).unwrap();
    }
    for k in 0..circuit.num_clbits() {
        writeln!(out, "creg c{k}[1];").unwrap();
    }
    for op in circuit.ops() {
        match op {
            Op::Gate { gate, target } => {
                let text = match gate.kind() {
                    GateKind::H => "h".to_string(),
                    GateKind::X => "x".to_string(),
                    GateKind::S => "s".to_string(),
                    GateKind::T => "t".to_string(),
                    GateKind::U1(l) => format!("u1({})", angle(l)),
                    GateKind::U2 { lambda, phi } => format!("u2({},{})", angle(phi), angle(lambda)),
                    GateKind::U3 { theta, lambda, phi } => {
                        format!("u3({},{},{})", angle(theta), angle(phi), angle(lambda))
                    }
                    GateKind::Y => return Err(QasmError::NotLowered("y")),
                    GateKind::Z => return Err(QasmError::NotLowered("z")),
                    GateKind::Custom => return Err(QasmError::NotLowered("custom gate")),
                };
                writeln!(out, "{text} q[{target}];").unwrap();
            }
            Op::Cx { control, target } => writeln!(out, "cx q[{control}],q[{target}];").unwrap(),
            Op::Measure { qubit, clbit } => {
                writeln!(out, "measure q[{qubit}] -> c{clbit}[0];").unwrap()
            }
            Op::Reset { qubit } => writeln!(out, "reset q[{qubit}];").unwrap(),
            Op::ConditionedPhase {
                condition,
                phase,
                target,
            } => {
                let [(bit, true)] = condition[..] else {
                    return Err(QasmError::NotLowered("multi-bit condition"));
                };
                writeln!(
                    out,
                    "if(c{bit}==1) u1({}) q[{target}];",
                    angle(&phase.to_angle())
                )
                .unwrap();
            }
            other => return Err(QasmError::NotLowered(other.name())),
        }
    }
    Ok(out)
}

pub fn emit_qasm(circuit: &Circuit, path: &Path) -> Result<(), QasmError> {
    let text = to_qasm(circuit)?;
    std::fs::write(path, text).map_err(|e| QasmError::Parse {
        line: 0,
        message: format!("cannot write {}: {e}", path.display()),
    })
}

pub fn parse_qasm(path: &Path) -> Result<Circuit, QasmError> {
    let text = std::fs::read_to_string(path).map_err(|e| QasmError::Parse {
        line: 0,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    from_qasm(&text)
}

enum Statement {
    Gate(Op),
    Conditioned { bit: usize, op: Op },
}

struct Parser {
    qubits: Option<usize>,
    cregs: Vec<String>,
    ops: Vec<(usize, Statement)>,
    saw_reset: bool,
    line: usize,
}

/// Parses the emitted dialect. `//` comments and free whitespace are allowed.
pub fn from_qasm(text: &str) -> Result<Circuit, QasmError> {
    let mut parser = Parser {
        qubits: None,
        cregs: Vec::new(),
        ops: Vec::new(),
        saw_reset: false,
        line: 0,
    };
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        parser.line = line;
        let code = raw.split("//").next().unwrap_or("");
        for stmt in code.split(';') {
            let stmt = stmt.trim();
            if !stmt.is_empty() {
                parser
                    .statement(stmt)
                    .map_err(|message| QasmError::Parse { line, message })?;
            }
        }
    }
    let mut circuit = Circuit::new(parser.qubits.unwrap_or(0), parser.cregs.len())
        .with_recycling(parser.saw_reset);
    for (line, stmt) in parser.ops {
        let op = match stmt {
            Statement::Gate(op) => op,
            Statement::Conditioned { bit, op } => {
                let Op::Gate { gate, target } = op else {
                    unreachable!("only u1 is conditioned")
                };
                let GateKind::U1(a) = gate.kind() else {
                    unreachable!("only u1 is conditioned")
                };
                let phase = a.to_phase().ok_or_else(|| QasmError::Parse {
                    line,
                    message: "conditional u1 angle must be a dyadic multiple of pi".into(),
                })?;
                Op::ConditionedPhase {
                    condition: vec![(bit, true)],
                    phase,
                    target,
                }
            }
        };
        circuit.push(op).map_err(|e| QasmError::Parse {
            line,
            message: e.to_string(),
        })?;
    }
    Ok(circuit)
}

impl Parser {
    fn statement(&mut self, stmt: &str) -> Result<(), String> {
        let (head, rest) = split_head(stmt);
        match head {
            "OPENQASM" => {
                if rest.trim() != "2.0" {
                    return Err(format!("unsupported version `{}`", rest.trim()));
                }
            }
            "include" => {}
            "qreg" => {
                let (name, size) = register(rest)?;
                if name != "q" || self.qubits.is_some() {
                    return Err("expected a single quantum register `q`".into());
                }
                self.qubits = Some(size);
            }
            "creg" => {
                let (name, size) = register(rest)?;
                if size != 1 {
                    return Err(format!("classical register `{name}` must have one bit"));
                }
                if self.cregs.contains(&name) {
                    return Err(format!("duplicate classical register `{name}`"));
                }
                self.cregs.push(name);
            }
            "measure" => {
                let (q, c) = rest
                    .split_once("->")
                    .ok_or_else(|| "measure needs `->`".to_string())?;
                let qubit = self.qubit(q)?;
                let clbit = self.clbit(c.trim())?;
                self.push(Statement::Gate(Op::Measure { qubit, clbit }));
            }
            "reset" => {
                let qubit = self.qubit(rest)?;
                self.saw_reset = true;
                self.push(Statement::Gate(Op::Reset { qubit }));
            }
            _ if stmt.starts_with("if") => {
                let open = stmt.find('(').ok_or("malformed if")?;
                let close = stmt.find(')').ok_or("malformed if")?;
                let cond = &stmt[open + 1..close];
                let (reg, value) = cond.split_once("==").ok_or("condition needs `==`")?;
                if value.trim() != "1" {
                    return Err("conditions must test `==1`".into());
                }
                let bit = self.creg(reg.trim())?;
                let body = stmt[close + 1..].trim();
                if !body.starts_with("u1") {
                    return Err(format!("only u1 may be conditioned, found `{body}`"));
                }
                let op = self.gate(body)?;
                self.push(Statement::Conditioned { bit, op });
            }
            _ => {
                let op = self.gate(stmt)?;
                self.push(Statement::Gate(op));
            }
        }
        Ok(())
    }

    fn push(&mut self, stmt: Statement) {
        self.ops.push((self.line, stmt));
    }

    fn gate(&self, stmt: &str) -> Result<Op, String> {
        let (call, operands) = match stmt.find(')') {
            Some(close) => (&stmt[..=close], stmt[close + 1..].trim()),
            None => split_head(stmt),
        };
        let (name, params) = match call.find('(') {
            Some(open) => (
                call[..open].trim(),
                parse_params(&call[open + 1..call.len() - 1])?,
            ),
            None => (call.trim(), Vec::new()),
        };
        let arity = |k: usize| -> Result<(), String> {
            if params.len() == k {
                Ok(())
            } else {
                Err(format!(
                    "`{name}` takes {k} parameters, found {}",
                    params.len()
                ))
            }
        };
        if name == "cx" {
            arity(0)?;
            let (a, b) = operands
                .split_once(',')
                .ok_or_else(|| "cx needs two operands".to_string())?;
            return Ok(Op::Cx {
                control: self.qubit(a)?,
                target: self.qubit(b)?,
            });
        }
        let gate = match name {
            "h" => arity(0).map(|_| gates::h())?,
            "x" => arity(0).map(|_| gates::x())?,
            "s" => arity(0).map(|_| gates::s())?,
            "t" => arity(0).map(|_| gates::t())?,
            "u1" => arity(1).map(|_| gates::u1(params[0]))?,
            "u2" => arity(2).map(|_| gates::u2(params[1], params[0]))?,
            "u3" => arity(3).map(|_| gates::u3(params[0], params[2], params[1]))?,
            other => return Err(format!("unsupported instruction `{other}`")),
        };
        Ok(Op::Gate {
            gate,
            target: self.qubit(operands)?,
        })
    }

    fn qubit(&self, text: &str) -> Result<usize, String> {
        let (name, index) = indexed(text)?;
        if name != "q" {
            return Err(format!("unknown quantum register `{name}`"));
        }
        let width = self.qubits.ok_or("qreg must be declared before use")?;
        if index >= width {
            return Err(format!("qubit q[{index}] out of range"));
        }
        Ok(index)
    }

    fn creg(&self, name: &str) -> Result<usize, String> {
        self.cregs
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| format!("unknown classical register `{name}`"))
    }

    fn clbit(&self, text: &str) -> Result<usize, String> {
        let (name, index) = indexed(text)?;
        if index != 0 {
            return Err(format!("`{name}` has a single bit"));
        }
        self.creg(&name)
    }
}

fn split_head(stmt: &str) -> (&str, &str) {
    match stmt.find(char::is_whitespace) {
        Some(i) => (&stmt[..i], stmt[i..].trim()),
        None => (stmt, ""),
    }
}

fn indexed(text: &str) -> Result<(String, usize), String> {
    let text: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let open = text
        .find('[')
        .ok_or_else(|| format!("expected `name[index]`, found `{text}`"))?;
    if !text.ends_with(']') {
        return Err(format!("expected `name[index]`, found `{text}`"));
    }
    let index = text[open + 1..text.len() - 1]
        .parse()
        .map_err(|_| format!("bad index in `{text}`"))?;
    Ok((text[..open].to_string(), index))
}

fn register(rest: &str) -> Result<(String, usize), String> {
    indexed(rest)
}

fn parse_params(text: &str) -> Result<Vec<Angle>, String> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',').map(parse_angle).collect()
}

/// Parses `0`, `pi`, `-pi/4`, `3*pi/8` or a decimal number of radians.
pub fn parse_angle(text: &str) -> Result<Angle, String> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let (negative, body) = match compact.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, compact.as_str()),
    };
    let sign = if negative { -1 } else { 1 };
    let Some(pos) = body.find("pi") else {
        return body
            .parse::<f64>()
            .map(|r| {
                if r == 0.0 {
                    Angle::ZERO
                } else {
                    Angle::Radians(sign as f64 * r)
                }
            })
            .map_err(|_| format!("bad angle `{text}`"));
    };
    let coeff = match &body[..pos] {
        "" => 1i64,
        c => c
            .strip_suffix('*')
            .and_then(|c| c.parse().ok())
            .ok_or_else(|| format!("bad angle `{text}`"))?,
    };
    let denominator = match &body[pos + 2..] {
        "" => 1u64,
        d => d
            .strip_prefix('/')
            .and_then(|d| d.parse().ok())
            .ok_or_else(|| format!("bad angle `{text}`"))?,
    };
    if denominator.is_power_of_two() {
        Ok(Angle::pi_dyadic(sign * coeff, denominator.trailing_zeros()))
    } else {
        Ok(Angle::Radians(
            sign as f64 * coeff as f64 * std::f64::consts::PI / denominator as f64,
        ))
    }
}
