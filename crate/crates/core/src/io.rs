//! Text and JSON file formats for every artifact. Parsing and printing
//! round-trip: `parse(print(x)) == x` for instances, decompositions,
//! papartition families and wreath lists.
//!
//! Instance text format, one item per line, `#` starts a comment:
//!
//! ```text
//! m 20 ell 2 alpha 0.1
//! B 0 1
//! R 2 3
//! ```
//!
//! Blue (`B`) and red (`R`) edges are 0-based with `u < v`. A
//! decomposition file holds one class per line (sorted ids, lines sorted)
//! and a final `leftover:` line; a papartition file holds one papartition
//! per line with ` | ` between blocks and 1-based elements; a wreath file
//! holds an `n ... k ...` header and one `order ... start ...` line per
//! wreath. JSON mirrors use the same field names.

use crate::graph::{Graph, Params, TwoColoredInstance};
use crate::papartition::Papartition;
use crate::tiling::{Class, Decomposition};
use crate::wreath::Wreath;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            message: message.into(),
        }
    }
}

/// True if the text looks like a JSON document rather than a line format.
pub fn looks_like_json(text: &str) -> bool {
    text.trim_start().starts_with('{')
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
    .trim()
}

// ---------------------------------------------------------------------------
// instance
// ---------------------------------------------------------------------------

pub fn print_instance(inst: &TwoColoredInstance, p: &Params) -> String {
    let mut out = format!("m {} ell {} alpha {}\n", inst.m(), p.ell, p.alpha);
    for (u, v) in inst.blue().edges() {
        out.push_str(&format!("B {u} {v}\n"));
    }
    for (u, v) in inst.red().edges() {
        out.push_str(&format!("R {u} {v}\n"));
    }
    out
}

pub fn parse_instance(text: &str) -> Result<(TwoColoredInstance, Params), ParseError> {
    let mut header: Option<(usize, Params)> = None;
    let mut blue: Option<Graph> = None;
    let mut red: Option<Graph> = None;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if header.is_none() {
            if tokens.len() != 6 || tokens[0] != "m" || tokens[2] != "ell" || tokens[4] != "alpha"
            {
                return Err(ParseError::new(
                    lineno,
                    "expected header `m <m> ell <ell> alpha <alpha>`",
                ));
            }
            let m: usize = tokens[1]
                .parse()
                .map_err(|_| ParseError::new(lineno, "bad vertex count"))?;
            let ell: usize = tokens[3]
                .parse()
                .map_err(|_| ParseError::new(lineno, "bad class size"))?;
            let alpha: f64 = tokens[5]
                .parse()
                .map_err(|_| ParseError::new(lineno, "bad alpha"))?;
            let params = Params::new(ell, alpha)
                .map_err(|e| ParseError::new(lineno, e.to_string()))?;
            blue = Some(Graph::empty(m));
            red = Some(Graph::empty(m));
            header = Some((m, params));
            continue;
        }
        let (m, _) = header.as_ref().unwrap();
        if tokens.len() != 3 || (tokens[0] != "B" && tokens[0] != "R") {
            return Err(ParseError::new(lineno, "expected `B <u> <v>` or `R <u> <v>`"));
        }
        let u: usize = tokens[1]
            .parse()
            .map_err(|_| ParseError::new(lineno, "bad vertex id"))?;
        let v: usize = tokens[2]
            .parse()
            .map_err(|_| ParseError::new(lineno, "bad vertex id"))?;
        if u >= v {
            return Err(ParseError::new(lineno, "edges must satisfy u < v"));
        }
        if v >= *m {
            return Err(ParseError::new(lineno, format!("vertex {v} out of range")));
        }
        let (this, other) = if tokens[0] == "B" {
            (blue.as_mut().unwrap(), red.as_ref().unwrap())
        } else {
            (red.as_mut().unwrap(), blue.as_ref().unwrap())
        };
        if this.has_edge(u, v) {
            return Err(ParseError::new(lineno, format!("duplicate edge {u} {v}")));
        }
        if other.has_edge(u, v) {
            return Err(ParseError::new(
                lineno,
                format!("pair {u} {v} is colored both blue and red"),
            ));
        }
        this.add_edge(u, v);
    }
    let Some((_, params)) = header else {
        return Err(ParseError::new(1, "missing instance header"));
    };
    let inst = TwoColoredInstance::new(blue.unwrap(), red.unwrap())
        .expect("colors kept disjoint during parsing");
    Ok((inst, params))
}

#[derive(Serialize, Deserialize)]
struct InstanceJson {
    m: usize,
    ell: usize,
    alpha: f64,
    blue: Vec<[usize; 2]>,
    red: Vec<[usize; 2]>,
}

pub fn print_instance_json(inst: &TwoColoredInstance, p: &Params) -> String {
    let doc = InstanceJson {
        m: inst.m(),
        ell: p.ell,
        alpha: p.alpha,
        blue: inst.blue().edges().iter().map(|&(u, v)| [u, v]).collect(),
        red: inst.red().edges().iter().map(|&(u, v)| [u, v]).collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
    s.push('\n');
    s
}

pub fn parse_instance_json(text: &str) -> Result<(TwoColoredInstance, Params), ParseError> {
    let doc: InstanceJson = serde_json::from_str(text)
        .map_err(|e| ParseError::new(e.line(), e.to_string()))?;
    let params =
        Params::new(doc.ell, doc.alpha).map_err(|e| ParseError::new(1, e.to_string()))?;
    let mut blue = Graph::empty(doc.m);
    let mut red = Graph::empty(doc.m);
    for &[u, v] in &doc.blue {
        if u >= v || v >= doc.m {
            return Err(ParseError::new(1, format!("bad blue edge [{u}, {v}]")));
        }
        blue.add_edge(u, v);
    }
    for &[u, v] in &doc.red {
        if u >= v || v >= doc.m {
            return Err(ParseError::new(1, format!("bad red edge [{u}, {v}]")));
        }
        red.add_edge(u, v);
    }
    let inst = TwoColoredInstance::new(blue, red)
        .map_err(|e| ParseError::new(1, e.to_string()))?;
    Ok((inst, params))
}

// ---------------------------------------------------------------------------
// decomposition
// ---------------------------------------------------------------------------

pub fn print_decomposition(d: &Decomposition) -> String {
    let mut out = String::new();
    for class in d.classes() {
        let ids: Vec<String> = class.vertices().iter().map(|v| v.to_string()).collect();
        out.push_str(&ids.join(" "));
        out.push('\n');
    }
    if d.leftover().is_empty() {
        out.push_str("leftover: -\n");
    } else {
        let ids: Vec<String> = d.leftover().iter().map(|v| v.to_string()).collect();
        out.push_str(&format!("leftover: {}\n", ids.join(" ")));
    }
    out
}

pub fn parse_decomposition(text: &str) -> Result<Decomposition, ParseError> {
    let mut classes: Vec<Class> = Vec::new();
    let mut leftover: Option<Vec<usize>> = None;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("leftover:") {
            if leftover.is_some() {
                return Err(ParseError::new(lineno, "duplicate leftover line"));
            }
            let rest = rest.trim();
            if rest == "-" {
                leftover = Some(Vec::new());
            } else {
                let ids: Result<Vec<usize>, _> =
                    rest.split_whitespace().map(str::parse).collect();
                leftover =
                    Some(ids.map_err(|_| ParseError::new(lineno, "bad leftover vertex id"))?);
            }
            continue;
        }
        if leftover.is_some() {
            return Err(ParseError::new(lineno, "class line after leftover line"));
        }
        let ids: Result<Vec<usize>, _> = line.split_whitespace().map(str::parse).collect();
        let ids = ids.map_err(|_| ParseError::new(lineno, "bad vertex id in class"))?;
        let class =
            Class::new(ids).map_err(|e| ParseError::new(lineno, e.to_string()))?;
        classes.push(class);
    }
    let leftover = leftover.ok_or_else(|| {
        ParseError::new(text.lines().count().max(1), "missing leftover line")
    })?;
    Ok(Decomposition::new(classes, leftover))
}

#[derive(Serialize, Deserialize)]
struct DecompositionJson {
    classes: Vec<Vec<usize>>,
    leftover: Vec<usize>,
}

pub fn print_decomposition_json(d: &Decomposition) -> String {
    let doc = DecompositionJson {
        classes: d
            .classes()
            .iter()
            .map(|c| c.vertices().to_vec())
            .collect(),
        leftover: d.leftover().to_vec(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
    s.push('\n');
    s
}

pub fn parse_decomposition_json(text: &str) -> Result<Decomposition, ParseError> {
    let doc: DecompositionJson = serde_json::from_str(text)
        .map_err(|e| ParseError::new(e.line(), e.to_string()))?;
    let classes: Result<Vec<Class>, _> = doc.classes.into_iter().map(Class::new).collect();
    let classes = classes.map_err(|e| ParseError::new(1, e.to_string()))?;
    Ok(Decomposition::new(classes, doc.leftover))
}

// ---------------------------------------------------------------------------
// papartitions
// ---------------------------------------------------------------------------

pub fn print_papartitions(fam: &[Papartition]) -> String {
    let mut out = String::new();
    for pap in fam {
        let blocks: Vec<String> = pap
            .blocks()
            .iter()
            .map(|b| {
                b.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        out.push_str(&blocks.join(" | "));
        out.push('\n');
    }
    out
}

pub fn parse_papartitions(text: &str) -> Result<Vec<Papartition>, ParseError> {
    let mut fam = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for chunk in line.split('|') {
            let ids: Result<Vec<usize>, _> =
                chunk.split_whitespace().map(str::parse).collect();
            let ids = ids.map_err(|_| ParseError::new(lineno, "bad element in block"))?;
            if ids.is_empty() {
                return Err(ParseError::new(lineno, "empty block"));
            }
            blocks.push(ids);
        }
        let pap =
            Papartition::new(blocks).map_err(|e| ParseError::new(lineno, e.to_string()))?;
        fam.push(pap);
    }
    Ok(fam)
}

#[derive(Serialize, Deserialize)]
struct PapartitionsJson {
    papartitions: Vec<Vec<Vec<usize>>>,
}

pub fn print_papartitions_json(fam: &[Papartition]) -> String {
    let doc = PapartitionsJson {
        papartitions: fam.iter().map(|p| p.blocks().to_vec()).collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
    s.push('\n');
    s
}

pub fn parse_papartitions_json(text: &str) -> Result<Vec<Papartition>, ParseError> {
    let doc: PapartitionsJson = serde_json::from_str(text)
        .map_err(|e| ParseError::new(e.line(), e.to_string()))?;
    doc.papartitions
        .into_iter()
        .map(|blocks| Papartition::new(blocks).map_err(|e| ParseError::new(1, e.to_string())))
        .collect()
}

// ---------------------------------------------------------------------------
// wreaths
// ---------------------------------------------------------------------------

pub fn print_wreaths(n: usize, k: usize, wreaths: &[Wreath]) -> String {
    let mut out = format!("n {n} k {k}\n");
    for w in wreaths {
        let order: Vec<String> = w.order().iter().map(|x| x.to_string()).collect();
        out.push_str(&format!("order {} start {}\n", order.join(" "), w.start()));
    }
    out
}

pub fn parse_wreaths(text: &str) -> Result<(usize, usize, Vec<Wreath>), ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut wreaths = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if header.is_none() {
            if tokens.len() != 4 || tokens[0] != "n" || tokens[2] != "k" {
                return Err(ParseError::new(lineno, "expected header `n <n> k <k>`"));
            }
            let n = tokens[1]
                .parse()
                .map_err(|_| ParseError::new(lineno, "bad n"))?;
            let k = tokens[3]
                .parse()
                .map_err(|_| ParseError::new(lineno, "bad k"))?;
            header = Some((n, k));
            continue;
        }
        let (n, k) = header.unwrap();
        if tokens.len() != n + 3 || tokens[0] != "order" || tokens[n + 1] != "start" {
            return Err(ParseError::new(
                lineno,
                "expected `order <n elements> start <index>`",
            ));
        }
        let order: Result<Vec<usize>, _> = tokens[1..=n].iter().map(|t| t.parse()).collect();
        let order = order.map_err(|_| ParseError::new(lineno, "bad order element"))?;
        let start: usize = tokens[n + 2]
            .parse()
            .map_err(|_| ParseError::new(lineno, "bad start index"))?;
        let w = Wreath::new(order, start, k)
            .map_err(|e| ParseError::new(lineno, e.to_string()))?;
        wreaths.push(w);
    }
    let (n, k) = header.ok_or_else(|| ParseError::new(1, "missing wreath header"))?;
    Ok((n, k, wreaths))
}

#[derive(Serialize, Deserialize)]
struct WreathJson {
    order: Vec<usize>,
    start: usize,
}

#[derive(Serialize, Deserialize)]
struct WreathsJson {
    n: usize,
    k: usize,
    wreaths: Vec<WreathJson>,
}

pub fn print_wreaths_json(n: usize, k: usize, wreaths: &[Wreath]) -> String {
    let doc = WreathsJson {
        n,
        k,
        wreaths: wreaths
            .iter()
            .map(|w| WreathJson {
                order: w.order().to_vec(),
                start: w.start(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
    s.push('\n');
    s
}

pub fn parse_wreaths_json(text: &str) -> Result<(usize, usize, Vec<Wreath>), ParseError> {
    let doc: WreathsJson = serde_json::from_str(text)
        .map_err(|e| ParseError::new(e.line(), e.to_string()))?;
    let wreaths: Result<Vec<Wreath>, _> = doc
        .wreaths
        .into_iter()
        .map(|w| {
            Wreath::new(w.order, w.start, doc.k).map_err(|e| ParseError::new(1, e.to_string()))
        })
        .collect();
    Ok((doc.n, doc.k, wreaths?))
}
