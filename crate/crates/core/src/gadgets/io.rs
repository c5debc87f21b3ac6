//! Text formats for source problems.
//!
//! CNF follows DIMACS: `c` comment lines, a `p cnf <vars> <clauses>` header,
//! then clauses as signed literals each closed by `0`. Max2SAT adds the
//! violation bound as a third header field, `p cnf <vars> <clauses> <k>`.
//! Graphs use the DIMACS edge format, `p edge <vertices> <edges>` followed by
//! `e <u> <v>` lines with 1-based vertices; a second `p` line starts a second
//! graph.

use std::fmt::Write as _;

use super::source::{Cnf3, Graph, Max2SatInput, SourceProblem};
use super::{Family, GadgetError, SourceKind};

fn err(line: usize, message: impl Into<String>) -> GadgetError {
    GadgetError::Parse {
        line,
        message: message.into(),
    }
}

/// Lines that carry content, with their 1-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('c') && !l.starts_with('%'))
}

fn number<T: std::str::FromStr>(line: usize, tok: &str) -> Result<T, GadgetError> {
    tok.parse().map_err(|_| err(line, format!("expected a number, found `{tok}`")))
}

struct Cnf {
    num_vars: usize,
    clauses: Vec<Vec<i64>>,
    extra: Option<usize>,
}

fn parse_dimacs(text: &str) -> Result<Cnf, GadgetError> {
    let mut header: Option<(usize, usize, Option<usize>)> = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    let mut last = 0;
    for (ln, l) in content_lines(text) {
        last = ln;
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks[0] == "p" {
            if header.is_some() {
                return Err(err(ln, "second header"));
            }
            if toks.len() < 4 || toks.len() > 5 || toks[1] != "cnf" {
                return Err(err(ln, "header must be `p cnf <vars> <clauses> [k]`"));
            }
            let extra = toks.get(4).map(|t| number(ln, t)).transpose()?;
            header = Some((number(ln, toks[2])?, number(ln, toks[3])?, extra));
            continue;
        }
        if header.is_none() {
            return Err(err(ln, "clause before header"));
        }
        for t in toks {
            match number::<i64>(ln, t)? {
                0 => clauses.push(std::mem::take(&mut current)),
                lit => current.push(lit),
            }
        }
    }
    let (num_vars, m, extra) = header.ok_or_else(|| err(last.max(1), "missing header"))?;
    if !current.is_empty() {
        return Err(err(last, "last clause is not closed by 0"));
    }
    if clauses.len() != m {
        return Err(err(last, format!("header declares {m} clauses, found {}", clauses.len())));
    }
    Ok(Cnf {
        num_vars,
        clauses,
        extra,
    })
}

fn fixed_width<const K: usize>(clauses: Vec<Vec<i64>>) -> Result<Vec<[i64; K]>, GadgetError> {
    clauses
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            let len = c.len();
            <[i64; K]>::try_from(c).map_err(|_| {
                GadgetError::InvalidSource(format!("clause {} has {len} literals, expected {K}", i + 1))
            })
        })
        .collect()
}

pub fn parse_cnf3(text: &str) -> Result<Cnf3, GadgetError> {
    let cnf = parse_dimacs(text)?;
    if cnf.extra.is_some() {
        return Err(GadgetError::InvalidSource("3-CNF header takes no bound".into()));
    }
    Cnf3::new(cnf.num_vars, fixed_width(cnf.clauses)?)
}

pub fn parse_max2sat(text: &str) -> Result<Max2SatInput, GadgetError> {
    let cnf = parse_dimacs(text)?;
    let bound = cnf
        .extra
        .ok_or_else(|| GadgetError::InvalidSource("Max2SAT header needs a bound `k`".into()))?;
    Max2SatInput::new(cnf.num_vars, fixed_width(cnf.clauses)?, bound)
}

pub fn parse_graphs(text: &str) -> Result<Vec<Graph>, GadgetError> {
    let mut graphs: Vec<(usize, usize, Vec<(usize, usize)>, usize)> = Vec::new();
    for (ln, l) in content_lines(text) {
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks.as_slice() {
            ["p", "edge", n, m] => graphs.push((number(ln, n)?, number(ln, m)?, Vec::new(), ln)),
            ["e", u, v] => {
                let (n, _, edges, _) = graphs.last_mut().ok_or_else(|| err(ln, "edge before header"))?;
                let (u, v): (usize, usize) = (number(ln, u)?, number(ln, v)?);
                if u == 0 || v == 0 || u > *n || v > *n {
                    return Err(err(ln, format!("vertex outside 1..={n}")));
                }
                edges.push((u - 1, v - 1));
            }
            _ => return Err(err(ln, "expected `p edge <n> <m>` or `e <u> <v>`")),
        }
    }
    graphs
        .into_iter()
        .map(|(n, m, edges, ln)| {
            if edges.len() != m {
                return Err(err(ln, format!("header declares {m} edges, found {}", edges.len())));
            }
            Graph::new(n, edges)
        })
        .collect()
}

/// Parses the source kind that `family` reduces from.
pub fn parse_source(family: Family, text: &str) -> Result<SourceProblem, GadgetError> {
    Ok(match family.source_kind() {
        SourceKind::Sat3 => SourceProblem::Sat3(parse_cnf3(text)?),
        SourceKind::OneInThree => SourceProblem::OneInThree(parse_cnf3(text)?),
        SourceKind::Max2Sat => SourceProblem::Max2Sat(parse_max2sat(text)?),
        SourceKind::Graph => {
            let mut gs = parse_graphs(text)?;
            if gs.len() != 1 {
                return Err(GadgetError::InvalidSource(format!("expected one graph, found {}", gs.len())));
            }
            SourceProblem::ThreeCol(gs.remove(0))
        }
        SourceKind::GraphPair => {
            let gs = parse_graphs(text)?;
            let [a, b]: [Graph; 2] = gs
                .try_into()
                .map_err(|gs: Vec<Graph>| GadgetError::InvalidSource(format!("expected two graphs, found {}", gs.len())))?;
            SourceProblem::GraphPair { first: a, second: b }
        }
    })
}

fn write_clauses<const K: usize>(out: &mut String, clauses: &[[i64; K]]) {
    for c in clauses {
        for l in c {
            write!(out, "{l} ").expect("write to string");
        }
        out.push_str("0\n");
    }
}

pub fn write_cnf3(f: &Cnf3) -> String {
    let mut out = format!("p cnf {} {}\n", f.num_vars, f.clauses.len());
    write_clauses(&mut out, &f.clauses);
    out
}

pub fn write_max2sat(w: &Max2SatInput) -> String {
    let mut out = format!("p cnf {} {} {}\n", w.num_vars, w.clauses.len(), w.bound);
    write_clauses(&mut out, &w.clauses);
    out
}

pub fn write_graphs(gs: &[&Graph]) -> String {
    let mut out = String::new();
    for g in gs {
        writeln!(out, "p edge {} {}", g.vertices, g.edges.len()).expect("write to string");
        for (u, v) in &g.edges {
            writeln!(out, "e {} {}", u + 1, v + 1).expect("write to string");
        }
    }
    out
}

pub fn write_source(src: &SourceProblem) -> String {
    match src {
        SourceProblem::Sat3(f) | SourceProblem::OneInThree(f) => write_cnf3(f),
        SourceProblem::ThreeCol(g) => write_graphs(&[g]),
        SourceProblem::GraphPair { first: a, second: b } => write_graphs(&[a, b]),
        SourceProblem::Max2Sat(w) => write_max2sat(w),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::source::{fixture_f2, fixture_w2};

    #[test]
    fn round_trips() {
        let f = fixture_f2();
        assert_eq!(parse_cnf3(&write_cnf3(&f)).unwrap(), f);
        let w = fixture_w2(1);
        assert_eq!(parse_max2sat(&write_max2sat(&w)).unwrap(), w);
        let (a, b) = (Graph::complete(3), Graph::complete(4));
        assert_eq!(parse_graphs(&write_graphs(&[&a, &b])).unwrap(), vec![a, b]);
    }

    #[test]
    fn clauses_may_span_lines() {
        let f = parse_cnf3("c hi\np cnf 3 2\n1 -2\n3 0 -1 2 3 0\n").unwrap();
        assert_eq!(f.clauses, vec![[1, -2, 3], [-1, 2, 3]]);
    }

    #[test]
    fn errors_carry_lines() {
        assert_eq!(
            parse_cnf3("p cnf 3 1\n1 x 3 0\n").unwrap_err(),
            GadgetError::Parse {
                line: 2,
                message: "expected a number, found `x`".into()
            }
        );
        assert!(matches!(parse_cnf3("p cnf 3 1\n1 2 0\n"), Err(GadgetError::InvalidSource(_))));
        assert!(matches!(parse_graphs("p edge 2 1\ne 1 3\n"), Err(GadgetError::Parse { line: 2, .. })));
        assert!(matches!(parse_max2sat("p cnf 2 1\n1 2 0\n"), Err(GadgetError::InvalidSource(_))));
    }
}
