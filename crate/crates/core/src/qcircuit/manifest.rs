//! Plain-text circuit manifest: one gate per line as `<gate> <targets> <slot|angle>`.
//!
//! ```text
//! qsagin-circuit v1
//! qubits 2
//! param_count 4
//! bound -3.14 3.14
//! encoder
//! ry 0 f0
//! layer
//! ry 0 p0
//! rz 0 p1
//! ry 1 p2
//! rz 1 p3
//! cz 0,1 -
//! params
//! 0.5
//! ...
//! ```

use std::fmt::Write as _;

use super::gates::Pauli;
use super::layout::{Angle, CircuitLayout, Op, ParameterVector};
use crate::error::{Error, Result};

const HEADER: &str = "qsagin-circuit v1";

fn angle_token(a: Angle) -> String {
    match a {
        Angle::Feature(f) => format!("f{f}"),
        Angle::Param(k) => format!("p{k}"),
        Angle::Fixed(v) => format!("{v:?}"),
    }
}

fn op_line(op: &Op) -> String {
    match *op {
        Op::Pauli { pauli, qubit } => format!("{} {qubit} -", pauli.symbol()),
        Op::Rotation { axis, qubit, angle } => format!("r{} {qubit} {}", axis.symbol(), angle_token(angle)),
        Op::Controlled { pauli, control, target } => format!("c{} {control},{target} -", pauli.symbol()),
        Op::ControlledRotation { axis, control, target, angle } => {
            format!("cr{} {control},{target} {}", axis.symbol(), angle_token(angle))
        }
    }
}

/// Serializes a layout and, optionally, parameter values.
pub fn to_manifest(layout: &CircuitLayout, params: Option<&ParameterVector>) -> String {
    let mut out = String::new();
    writeln!(out, "{HEADER}").unwrap();
    writeln!(out, "qubits {}", layout.qubits).unwrap();
    writeln!(out, "param_count {}", layout.param_count).unwrap();
    for (lo, hi) in &layout.feature_bounds {
        writeln!(out, "bound {lo:?} {hi:?}").unwrap();
    }
    writeln!(out, "encoder").unwrap();
    for op in &layout.encoder {
        writeln!(out, "{}", op_line(op)).unwrap();
    }
    for layer in &layout.layers {
        writeln!(out, "layer").unwrap();
        for op in layer {
            writeln!(out, "{}", op_line(op)).unwrap();
        }
    }
    if let Some(p) = params {
        writeln!(out, "params").unwrap();
        for v in p.as_slice() {
            writeln!(out, "{v:?}").unwrap();
        }
    }
    out
}

fn bad(line_no: usize, reason: impl Into<String>) -> Error {
    Error::Format {
        what: "circuit manifest",
        reason: format!("line {line_no}: {}", reason.into()),
    }
}

fn parse_index(tok: &str, line_no: usize) -> Result<usize> {
    tok.parse().map_err(|_| bad(line_no, format!("bad index {tok:?}")))
}

fn parse_angle(tok: &str, line_no: usize) -> Result<Angle> {
    if let Some(rest) = tok.strip_prefix('f') {
        return Ok(Angle::Feature(parse_index(rest, line_no)?));
    }
    if let Some(rest) = tok.strip_prefix('p') {
        return Ok(Angle::Param(parse_index(rest, line_no)?));
    }
    tok.parse()
        .map(Angle::Fixed)
        .map_err(|_| bad(line_no, format!("bad angle {tok:?}")))
}

fn parse_pauli(c: char, line_no: usize) -> Result<Pauli> {
    match c {
        'x' => Ok(Pauli::X),
        'y' => Ok(Pauli::Y),
        'z' => Ok(Pauli::Z),
        other => Err(bad(line_no, format!("unknown axis {other:?}"))),
    }
}

fn parse_op(line: &str, line_no: usize) -> Result<Op> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    let [name, targets, angle] = toks.as_slice() else {
        return Err(bad(line_no, "expected `<gate> <targets> <slot|angle>`"));
    };
    let qs: Vec<usize> = targets
        .split(',')
        .map(|t| parse_index(t, line_no))
        .collect::<Result<_>>()?;
    let axis = |s: &str| parse_pauli(s.chars().next().unwrap_or('?'), line_no);
    let one = |qs: &[usize]| -> Result<usize> {
        match qs {
            [q] => Ok(*q),
            _ => Err(bad(line_no, "expected one target")),
        }
    };
    let two = |qs: &[usize]| -> Result<(usize, usize)> {
        match qs {
            [c, t] => Ok((*c, *t)),
            _ => Err(bad(line_no, "expected control,target")),
        }
    };
    let op = if let Some(ax) = name.strip_prefix("cr") {
        let (control, target) = two(&qs)?;
        Op::ControlledRotation { axis: axis(ax)?, control, target, angle: parse_angle(angle, line_no)? }
    } else if let Some(ax) = name.strip_prefix('c') {
        let (control, target) = two(&qs)?;
        Op::Controlled { pauli: axis(ax)?, control, target }
    } else if let Some(ax) = name.strip_prefix('r') {
        Op::Rotation { axis: axis(ax)?, qubit: one(&qs)?, angle: parse_angle(angle, line_no)? }
    } else if name.len() == 1 {
        Op::Pauli { pauli: axis(name)?, qubit: one(&qs)? }
    } else {
        return Err(bad(line_no, format!("unknown gate {name:?}")));
    };
    Ok(op)
}

/// Parses a manifest back into a validated layout and any stored parameters.
pub fn from_manifest(text: &str) -> Result<(CircuitLayout, Option<ParameterVector>)> {
    enum Section {
        Head,
        Encoder,
        Layer,
        Params,
    }
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    match lines.next() {
        Some((_, h)) if h == HEADER => {}
        _ => return Err(bad(1, format!("missing header {HEADER:?}"))),
    }
    let mut qubits = None;
    let mut param_count = None;
    let mut bounds = Vec::new();
    let mut encoder = Vec::new();
    let mut layers: Vec<Vec<Op>> = Vec::new();
    let mut params: Option<Vec<f64>> = None;
    let mut section = Section::Head;
    for (no, line) in lines {
        match line {
            "encoder" => {
                section = Section::Encoder;
                continue;
            }
            "layer" => {
                layers.push(Vec::new());
                section = Section::Layer;
                continue;
            }
            "params" => {
                params = Some(Vec::new());
                section = Section::Params;
                continue;
            }
            _ => {}
        }
        match section {
            Section::Head => {
                let toks: Vec<&str> = line.split_whitespace().collect();
                match toks.as_slice() {
                    ["qubits", n] => qubits = Some(parse_index(n, no)?),
                    ["param_count", n] => param_count = Some(parse_index(n, no)?),
                    ["bound", lo, hi] => {
                        let lo: f64 = lo.parse().map_err(|_| bad(no, "bad bound"))?;
                        let hi: f64 = hi.parse().map_err(|_| bad(no, "bad bound"))?;
                        bounds.push((lo, hi));
                    }
                    _ => return Err(bad(no, format!("unexpected {line:?}"))),
                }
            }
            Section::Encoder => encoder.push(parse_op(line, no)?),
            Section::Layer => layers.last_mut().expect("layer section").push(parse_op(line, no)?),
            Section::Params => params
                .as_mut()
                .expect("params section")
                .push(line.parse().map_err(|_| bad(no, format!("bad parameter {line:?}")))?),
        }
    }
    let layout = CircuitLayout {
        qubits: qubits.ok_or_else(|| bad(0, "missing qubits"))?,
        feature_bounds: bounds,
        encoder,
        layers,
        param_count: param_count.ok_or_else(|| bad(0, "missing param_count"))?,
    };
    layout.validate()?;
    let params = match params {
        Some(v) if v.len() != layout.param_count => {
            return Err(Error::Shape { expected: layout.param_count, actual: v.len() });
        }
        Some(v) => Some(ParameterVector::new(v)?),
        None => None,
    };
    Ok((layout, params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcircuit::EncoderAxes;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn manifest_round_trip(q in 1usize..6, nf in 0usize..20, layers in 0usize..4, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let bounds = (0..nf).map(|i| (-1.5 - i as f64, 0.25 + i as f64 / 3.0)).collect();
            let layout = CircuitLayout::reuploading(q, bounds, layers, EncoderAxes::AlternatingYz).unwrap();
            let params = ParameterVector::random(layout.param_count, &mut rng);
            let text = to_manifest(&layout, Some(&params));
            let (back, p) = from_manifest(&text).unwrap();
            prop_assert_eq!(back, layout);
            prop_assert_eq!(p.unwrap(), params);
        }
    }

    #[test]
    fn custom_gates_parse() {
        let text = "qsagin-circuit v1\nqubits 2\nparam_count 1\nencoder\nlayer\nx 0 -\ncrz 0,1 p0\nry 1 0.25\n";
        let (layout, params) = from_manifest(text).unwrap();
        assert!(params.is_none());
        assert_eq!(layout.layers[0].len(), 3);
        assert_eq!(layout.layers[0][2], Op::Rotation { axis: Pauli::Y, qubit: 1, angle: Angle::Fixed(0.25) });
    }

    #[test]
    fn rejects_malformed() {
        assert!(from_manifest("nope").is_err());
        let bad_gate = "qsagin-circuit v1\nqubits 1\nparam_count 0\nencoder\nlayer\nfoo 0 -\n";
        assert!(from_manifest(bad_gate).is_err());
        let bad_qubit = "qsagin-circuit v1\nqubits 1\nparam_count 0\nencoder\nlayer\nx 3 -\n";
        assert!(from_manifest(bad_qubit).is_err());
    }
}
