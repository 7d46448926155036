//! Text serialization: instance files, spin-state strings, embedding files,
//! and gate-network netlists.
//!
//! Instance format, one construct per line, whitespace-delimited, `#` starts
//! a comment anywhere:
//!
//! ```text
//! ising <n>
//! h <i> <value>
//! e <i> <j> <value>      # 0-based, i < j
//! ```
//!
//! An embedding file is the physical model in instance format followed by
//! one `copy <logical_i> <physical...>` line per logical node and a final
//! `meta w0 <value> k <int>` line. A netlist is the model in instance format
//! followed by `port p|q|F <indices...>` and `clamp <i> <1|-1>` lines.
//! States are strings of `+`/`-`, node 0 first.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::invlogic::CircuitNet;
use crate::model::{IsingModel, SpinState};
use crate::sparsify::SparseEmbedding;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_field<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("bad {what}: {tok:?}")))
}

/// Lines as (1-based number, tokens), comments and blanks dropped.
fn tokenize(text: &str) -> Vec<(usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .filter_map(|(idx, raw)| {
            let body = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = body.split_whitespace().collect();
            if tokens.is_empty() {
                None
            } else {
                Some((idx + 1, tokens))
            }
        })
        .collect()
}

pub fn write_state(state: &SpinState) -> String {
    (0..state.len())
        .map(|i| if state.get(i) == 1 { '+' } else { '-' })
        .collect()
}

pub fn parse_state(s: &str) -> Result<SpinState> {
    let spins: Vec<i8> = s
        .chars()
        .map(|c| match c {
            '+' => Ok(1),
            '-' => Ok(-1),
            other => Err(parse_err(1, format!("state character {other:?}"))),
        })
        .collect::<Result<_>>()?;
    if spins.is_empty() {
        return Err(parse_err(1, "empty state string"));
    }
    SpinState::new(spins)
}

fn write_model_lines(out: &mut String, model: &IsingModel) {
    writeln!(out, "ising {}", model.n()).unwrap();
    for (i, &h) in model.biases().iter().enumerate() {
        if h != 0.0 {
            writeln!(out, "h {i} {h}").unwrap();
        }
    }
    for (i, j, w) in model.edges() {
        writeln!(out, "e {i} {j} {w}").unwrap();
    }
}

pub fn write_instance(model: &IsingModel) -> String {
    let mut out = String::new();
    write_model_lines(&mut out, model);
    out
}

/// Parses the leading model section; returns the model and any lines left
/// over (for the embedding/netlist wrappers). Duplicate `h`/`e` lines for
/// the same target are rejected.
fn parse_model_section<'a>(
    lines: &'a [(usize, Vec<&'a str>)],
) -> Result<(IsingModel, &'a [(usize, Vec<&'a str>)])> {
    let Some(&(header_no, ref header)) = lines.first() else {
        return Err(parse_err(1, "missing `ising <n>` header"));
    };
    if header[0] != "ising" || header.len() != 2 {
        return Err(parse_err(header_no, "expected header `ising <n>`"));
    }
    let n: usize = parse_field(header[1], header_no, "node count")?;
    let mut model = IsingModel::new(n);
    let mut seen_bias = vec![false; n];

    for (consumed, &(no, ref tokens)) in lines[1..].iter().enumerate() {
        let check = |i: usize| -> Result<usize> {
            if i < n {
                Ok(i)
            } else {
                Err(parse_err(no, format!("index {i} out of range for n = {n}")))
            }
        };
        match tokens[0] {
            "h" => {
                if tokens.len() != 3 {
                    return Err(parse_err(no, "expected `h <i> <value>`"));
                }
                let i = check(parse_field(tokens[1], no, "index")?)?;
                if seen_bias[i] {
                    return Err(parse_err(no, format!("duplicate bias for node {i}")));
                }
                seen_bias[i] = true;
                model.set_bias(i, parse_field(tokens[2], no, "value")?)?;
            }
            "e" => {
                if tokens.len() != 4 {
                    return Err(parse_err(no, "expected `e <i> <j> <value>`"));
                }
                let i = check(parse_field(tokens[1], no, "index")?)?;
                let j = check(parse_field(tokens[2], no, "index")?)?;
                if i >= j {
                    return Err(parse_err(no, format!("edge ({i}, {j}) must have i < j")));
                }
                if model.coupling(i, j) != 0.0 {
                    return Err(parse_err(no, format!("duplicate edge ({i}, {j})")));
                }
                model.set_coupling(i, j, parse_field(tokens[3], no, "value")?)?;
            }
            _ => return Ok((model, &lines[1 + consumed..])),
        }
    }
    Ok((model, &[]))
}

pub fn parse_instance(text: &str) -> Result<IsingModel> {
    let lines = tokenize(text);
    let (model, rest) = parse_model_section(&lines)?;
    if let Some(&(no, ref tokens)) = rest.first() {
        return Err(parse_err(no, format!("unexpected construct {:?}", tokens[0])));
    }
    Ok(model)
}

pub fn write_embedding(emb: &SparseEmbedding) -> String {
    let mut out = String::new();
    write_model_lines(&mut out, emb.physical());
    for (logical, chain) in emb.copy_map().iter().enumerate() {
        write!(out, "copy {logical}").unwrap();
        for &p in chain {
            write!(out, " {p}").unwrap();
        }
        out.push('\n');
    }
    writeln!(out, "meta w0 {} k {}", emb.w0(), emb.k()).unwrap();
    out
}

pub fn parse_embedding(text: &str) -> Result<SparseEmbedding> {
    let lines = tokenize(text);
    let (physical, rest) = parse_model_section(&lines)?;
    let mut chains: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut meta: Option<(f64, usize)> = None;
    let mut last_no = 1;
    for &(no, ref tokens) in rest {
        last_no = no;
        match tokens[0] {
            "copy" => {
                if tokens.len() < 3 {
                    return Err(parse_err(no, "expected `copy <logical> <physical...>`"));
                }
                let logical: usize = parse_field(tokens[1], no, "logical index")?;
                let chain: Vec<usize> = tokens[2..]
                    .iter()
                    .map(|t| parse_field(t, no, "physical index"))
                    .collect::<Result<_>>()?;
                if chains.insert(logical, chain).is_some() {
                    return Err(parse_err(no, format!("duplicate copy line for {logical}")));
                }
            }
            "meta" => {
                if tokens.len() != 5 || tokens[1] != "w0" || tokens[3] != "k" {
                    return Err(parse_err(no, "expected `meta w0 <value> k <int>`"));
                }
                if meta.is_some() {
                    return Err(parse_err(no, "duplicate meta line"));
                }
                meta = Some((
                    parse_field(tokens[2], no, "w0")?,
                    parse_field(tokens[4], no, "k")?,
                ));
            }
            other => return Err(parse_err(no, format!("unexpected construct {other:?}"))),
        }
    }
    let Some((w0, k)) = meta else {
        return Err(parse_err(last_no, "missing meta line"));
    };
    let logical_n = chains.len();
    let mut copy_map = Vec::with_capacity(logical_n);
    for logical in 0..logical_n {
        match chains.remove(&logical) {
            Some(chain) => copy_map.push(chain),
            None => {
                return Err(parse_err(
                    last_no,
                    format!("copy lines must cover 0..{logical_n}, missing {logical}"),
                ))
            }
        }
    }
    SparseEmbedding::from_parts(physical, copy_map, w0, k)
}

pub fn write_netlist(net: &CircuitNet) -> String {
    let mut out = String::new();
    write_model_lines(&mut out, net.model());
    for (name, port) in [("p", net.p_port()), ("q", net.q_port()), ("F", net.f_port())] {
        write!(out, "port {name}").unwrap();
        for &i in port {
            write!(out, " {i}").unwrap();
        }
        out.push('\n');
    }
    for (&i, &v) in net.clamps() {
        writeln!(out, "clamp {i} {v}").unwrap();
    }
    out
}

/// Gate bindings are not part of the format; the parsed net carries the
/// merged model, ports, and clamps only.
pub fn parse_netlist(text: &str) -> Result<CircuitNet> {
    let lines = tokenize(text);
    let (model, rest) = parse_model_section(&lines)?;
    let mut ports: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    let mut clamps: BTreeMap<usize, i8> = BTreeMap::new();
    for &(no, ref tokens) in rest {
        match tokens[0] {
            "port" => {
                if tokens.len() < 3 {
                    return Err(parse_err(no, "expected `port <name> <indices...>`"));
                }
                let name = tokens[1];
                if !matches!(name, "p" | "q" | "F") {
                    return Err(parse_err(no, format!("unknown port {name:?}")));
                }
                let indices: Vec<usize> = tokens[2..]
                    .iter()
                    .map(|t| parse_field(t, no, "port index"))
                    .collect::<Result<_>>()?;
                if ports.insert(name, indices).is_some() {
                    return Err(parse_err(no, format!("duplicate port {name:?}")));
                }
            }
            "clamp" => {
                if tokens.len() != 3 {
                    return Err(parse_err(no, "expected `clamp <i> <1|-1>`"));
                }
                let i: usize = parse_field(tokens[1], no, "clamp index")?;
                let v: i8 = match tokens[2].trim_start_matches('+') {
                    "1" => 1,
                    "-1" => -1,
                    other => return Err(parse_err(no, format!("clamp value {other:?}"))),
                };
                if clamps.insert(i, v).is_some() {
                    return Err(parse_err(no, format!("duplicate clamp for spin {i}")));
                }
            }
            other => return Err(parse_err(no, format!("unexpected construct {other:?}"))),
        }
    }
    let take = |name: &str| -> Result<Vec<usize>> {
        ports
            .get(name)
            .cloned()
            .ok_or_else(|| parse_err(1, format!("missing port {name:?}")))
    };
    CircuitNet::from_parts(model, take("p")?, take("q")?, take("F")?, clamps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invlogic::{build_multiplier, GateLibrary};
    use crate::model::{generate_er_maxcut, InstanceSpec};
    use crate::sparsify::sparsify;

    fn sample_model() -> IsingModel {
        let mut m =
            generate_er_maxcut(&InstanceSpec::new(12, 0.75, 42).unwrap()).unwrap();
        m.set_bias(0, 1.5).unwrap();
        m.set_bias(7, -0.25).unwrap();
        m.set_coupling(0, 1, 0.375).unwrap();
        m
    }

    #[test]
    fn instance_roundtrip() {
        let m = sample_model();
        let text = write_instance(&m);
        let parsed = parse_instance(&text).unwrap();
        assert_eq!(parsed, m);
        assert_eq!(write_instance(&parsed), text);
    }

    #[test]
    fn comments_and_blanks_tolerated() {
        let text = "# header comment\n\nising 3\n h 0 2.5 # inline\n\ne 0 2 -1\n";
        let m = parse_instance(text).unwrap();
        assert_eq!(m.n(), 3);
        assert_eq!(m.bias(0), 2.5);
        assert_eq!(m.coupling(0, 2), -1.0);
        assert_eq!(m.edge_count(), 1);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let cases = [
            ("", 1, "header"),
            ("ising x", 1, "node count"),
            ("ising 3\nh 5 1.0", 2, "out of range"),
            ("ising 3\ne 2 1 1.0", 2, "i < j"),
            ("ising 3\ne 0 1 1\ne 0 1 2", 3, "duplicate edge"),
            ("ising 3\nh 1 1\nh 1 2", 3, "duplicate bias"),
            ("ising 3\ne 0 1 fast", 2, "bad value"),
            ("ising 3\nq 0 1", 2, "unexpected construct"),
        ];
        for (text, want_line, want_msg) in cases {
            match parse_instance(text) {
                Err(Error::Parse { line, msg }) => {
                    assert_eq!(line, want_line, "{text:?}: {msg}");
                    assert!(msg.contains(want_msg), "{text:?}: {msg}");
                }
                other => panic!("{text:?}: expected parse error, got {other:?}"),
            }
        }
    }

    #[test]
    fn state_roundtrip() {
        let s = parse_state("+-++-").unwrap();
        assert_eq!(s.spins(), &[1, -1, 1, 1, -1]);
        assert_eq!(write_state(&s), "+-++-");
        assert!(parse_state("+0-").is_err());
        assert!(parse_state("").is_err());
    }

    #[test]
    fn embedding_roundtrip() {
        let m = generate_er_maxcut(&InstanceSpec::new(10, 0.75, 7).unwrap()).unwrap();
        let emb = sparsify(&m, 5, 4.0).unwrap();
        let text = write_embedding(&emb);
        let parsed = parse_embedding(&text).unwrap();
        assert_eq!(parsed, emb);
        assert_eq!(write_embedding(&parsed), text);
    }

    #[test]
    fn embedding_requires_meta_and_full_cover() {
        let m = generate_er_maxcut(&InstanceSpec::new(6, 0.75, 7).unwrap()).unwrap();
        let emb = sparsify(&m, 4, 2.5).unwrap();
        let text = write_embedding(&emb);
        let no_meta: String = text
            .lines()
            .filter(|l| !l.starts_with("meta"))
            .map(|l| format!("{l}\n"))
            .collect();
        assert!(matches!(parse_embedding(&no_meta), Err(Error::Parse { .. })));
        let no_copy: String = text
            .lines()
            .filter(|l| !l.starts_with("copy 3"))
            .map(|l| format!("{l}\n"))
            .collect();
        assert!(parse_embedding(&no_copy).is_err());
    }

    #[test]
    fn netlist_roundtrip() {
        let lib = GateLibrary::standard().unwrap();
        let net = build_multiplier(3, &lib).unwrap();
        let text = write_netlist(&net);
        let parsed = parse_netlist(&text).unwrap();
        assert_eq!(parsed.model(), net.model());
        assert_eq!(parsed.p_port(), net.p_port());
        assert_eq!(parsed.q_port(), net.q_port());
        assert_eq!(parsed.f_port(), net.f_port());
        assert_eq!(parsed.clamps(), net.clamps());
        assert_eq!(write_netlist(&parsed), text);
    }

    #[test]
    fn netlist_requires_all_ports() {
        let lib = GateLibrary::standard().unwrap();
        let net = build_multiplier(2, &lib).unwrap();
        let text = write_netlist(&net);
        let missing: String = text
            .lines()
            .filter(|l| !l.starts_with("port F"))
            .map(|l| format!("{l}\n"))
            .collect();
        assert!(matches!(parse_netlist(&missing), Err(Error::Parse { .. })));
    }
}
