//! Graph PD notation for planar perfect matching diagrams.
//!
//! A diagram is `G[Item, ...]` where `M[a,b,c,d]` is a perfect matching edge
//! and `V[x,y]` a virtual crossing of the non-matching arcs `x` and `y`.
//! Arcs are the edges of `G \ M`, labelled by positive integers. The slots of
//! a matching tuple list the four arc ends in cyclic order around the edge,
//! `a,b` at one endpoint and `c,d` at the other: the planar smoothing joins
//! `(a,d)` and `(b,c)`, the crossed smoothing joins `(a,c)` and `(b,d)`.
//!
//! The file format wraps one expression with `#` comments and an optional
//! `loops: k` line counting vertex-free circles.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// One perfect matching edge, `M[a,b,c,d]`.
pub type MatchTuple = [u32; 4];
/// One virtual crossing, `V[x,y]`.
pub type VirtualTuple = [u32; 2];

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PmDiagram {
    pub matchings: Vec<MatchTuple>,
    pub virtuals: Vec<VirtualTuple>,
    /// Vertex-free circles; each contributes a factor `n` to every bracket.
    pub loops: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("arc label {label} appears {count} time(s) in matching tuples, expected 2")]
    LabelCount { label: u32, count: usize },
    #[error("virtual crossing V[{x},{y}] references unknown arc label {label}")]
    UnknownVirtualLabel { x: u32, y: u32, label: u32 },
    #[error("diagram has no matching edges and no free loops")]
    Empty,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PdError {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("invalid diagram: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

impl PmDiagram {
    pub fn new(matchings: Vec<MatchTuple>, virtuals: Vec<VirtualTuple>) -> Self {
        Self {
            matchings,
            virtuals,
            loops: 0,
        }
    }

    pub fn with_loops(mut self, loops: u32) -> Self {
        self.loops = loops;
        self
    }

    /// Parses and validates a bare `G[...]` expression.
    pub fn parse(text: &str) -> Result<Self, PdError> {
        let d = parse_expression(text, 0)?;
        d.validate().map_err(PdError::Invalid)?;
        Ok(d)
    }

    /// Parses the file format: comments, optional `loops:` line, one expression.
    pub fn parse_file(text: &str) -> Result<Self, PdError> {
        let mut loops = 0u32;
        let mut body = String::new();
        let mut body_offset = None;
        let mut offset = 0usize;
        for line in text.split_inclusive('\n') {
            let content = match line.find('#') {
                Some(i) => &line[..i],
                None => line,
            };
            let trimmed = content.trim();
            if let Some(rest) = trimmed.strip_prefix("loops:") {
                if !body.trim().is_empty() {
                    return Err(PdError::Syntax {
                        pos: offset,
                        msg: "'loops:' must precede the graph expression".into(),
                    });
                }
                loops = rest.trim().parse().map_err(|_| PdError::Syntax {
                    pos: offset,
                    msg: format!("bad loop count {:?}", rest.trim()),
                })?;
            } else {
                if body_offset.is_none() && !trimmed.is_empty() {
                    body_offset = Some(offset + content.len() - content.trim_start().len());
                }
                body.push_str(content);
                body.push(' ');
            }
            offset += line.len();
        }
        let mut d = if body.trim().is_empty() {
            PmDiagram::default()
        } else {
            parse_expression(body.trim(), body_offset.unwrap_or(0))?
        };
        d.loops = loops;
        d.validate().map_err(PdError::Invalid)?;
        Ok(d)
    }

    /// All violations of the diagram invariants; empty means valid.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.matchings.is_empty() && self.loops == 0 {
            out.push(Violation::Empty);
        }
        let counts = self.label_counts();
        for (&label, &count) in &counts {
            if count != 2 {
                out.push(Violation::LabelCount { label, count });
            }
        }
        for &[x, y] in &self.virtuals {
            for label in [x, y] {
                if !counts.contains_key(&label) {
                    out.push(Violation::UnknownVirtualLabel { x, y, label });
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(v)
        }
    }

    fn label_counts(&self) -> BTreeMap<u32, usize> {
        let mut counts = BTreeMap::new();
        for m in &self.matchings {
            for &l in m {
                *counts.entry(l).or_insert(0) += 1;
            }
        }
        counts
    }

    /// Sorted arc labels.
    pub fn arc_labels(&self) -> Vec<u32> {
        let set: BTreeSet<u32> = self.matchings.iter().flatten().copied().collect();
        set.into_iter().collect()
    }

    pub fn num_matchings(&self) -> usize {
        self.matchings.len()
    }

    pub fn num_virtuals(&self) -> usize {
        self.virtuals.len()
    }

    /// The bare `G[...]` expression, no whitespace.
    pub fn serialize(&self) -> String {
        let items: Vec<String> = self
            .matchings
            .iter()
            .map(|[a, b, c, d]| format!("M[{a},{b},{c},{d}]"))
            .chain(self.virtuals.iter().map(|[x, y]| format!("V[{x},{y}]")))
            .collect();
        format!("G[{}]", items.join(","))
    }

    /// File rendering, including the `loops:` line when needed.
    pub fn to_file_string(&self) -> String {
        let mut s = String::new();
        if self.loops > 0 {
            s.push_str(&format!("loops: {}\n", self.loops));
        }
        if !self.matchings.is_empty() || self.loops == 0 {
            s.push_str(&self.serialize());
            s.push('\n');
        }
        s
    }

    /// Normal form for comparing diagrams that differ only in tuple order or
    /// in the symmetries of a matching tuple that preserve both smoothings.
    pub fn canonical(&self) -> PmDiagram {
        let mut matchings: Vec<MatchTuple> = self
            .matchings
            .iter()
            .map(|&[a, b, c, d]| {
                *[[a, b, c, d], [c, d, a, b], [b, a, d, c], [d, c, b, a]]
                    .iter()
                    .min()
                    .unwrap()
            })
            .collect();
        matchings.sort_unstable();
        let mut virtuals: Vec<VirtualTuple> = self.virtuals.iter().map(|&[x, y]| [x.min(y), x.max(y)]).collect();
        virtuals.sort_unstable();
        PmDiagram {
            matchings,
            virtuals,
            loops: self.loops,
        }
    }

    /// Relabels arcs through `f`, which must be injective on the arc labels.
    pub fn relabel(&self, f: impl Fn(u32) -> u32) -> PmDiagram {
        PmDiagram {
            matchings: self
                .matchings
                .iter()
                .map(|m| [f(m[0]), f(m[1]), f(m[2]), f(m[3])])
                .collect(),
            virtuals: self.virtuals.iter().map(|v| [f(v[0]), f(v[1])]).collect(),
            loops: self.loops,
        }
    }
}

impl fmt::Display for PmDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

struct Scanner<'a> {
    bytes: &'a [u8],
    at: usize,
    base: usize,
}

impl Scanner<'_> {
    fn skip_ws(&mut self) {
        while self.at < self.bytes.len() && self.bytes[self.at].is_ascii_whitespace() {
            self.at += 1;
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, PdError> {
        Err(PdError::Syntax {
            pos: self.base + self.at,
            msg: msg.into(),
        })
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.at).copied()
    }

    fn expect(&mut self, ch: u8) -> Result<(), PdError> {
        match self.peek() {
            Some(c) if c == ch => {
                self.at += 1;
                Ok(())
            }
            Some(c) => self.err(format!("expected '{}', found '{}'", ch as char, c as char)),
            None => self.err(format!("expected '{}', found end of input", ch as char)),
        }
    }

    fn label(&mut self) -> Result<u32, PdError> {
        self.skip_ws();
        let start = self.at;
        while self.at < self.bytes.len() && self.bytes[self.at].is_ascii_digit() {
            self.at += 1;
        }
        if start == self.at {
            self.at = start;
            return self.err("expected arc label");
        }
        let text = std::str::from_utf8(&self.bytes[start..self.at]).expect("ascii digits");
        match text.parse::<u32>() {
            Ok(0) => {
                self.at = start;
                self.err("arc labels must be positive")
            }
            Ok(v) => Ok(v),
            Err(_) => {
                self.at = start;
                self.err("arc label out of range")
            }
        }
    }

    fn labels<const K: usize>(&mut self) -> Result<[u32; K], PdError> {
        self.expect(b'[')?;
        let mut out = [0u32; K];
        for (i, slot) in out.iter_mut().enumerate() {
            if i > 0 {
                self.expect(b',')?;
            }
            *slot = self.label()?;
        }
        self.expect(b']')?;
        Ok(out)
    }
}

fn parse_expression(text: &str, base: usize) -> Result<PmDiagram, PdError> {
    let mut s = Scanner {
        bytes: text.as_bytes(),
        at: 0,
        base,
    };
    s.expect(b'G')?;
    s.expect(b'[')?;
    let mut d = PmDiagram::default();
    if s.peek() == Some(b']') {
        s.at += 1;
    } else {
        loop {
            match s.peek() {
                Some(b'M') => {
                    s.at += 1;
                    d.matchings.push(s.labels::<4>()?);
                }
                Some(b'V') => {
                    s.at += 1;
                    d.virtuals.push(s.labels::<2>()?);
                }
                Some(c) => return s.err(format!("expected 'M' or 'V', found '{}'", c as char)),
                None => return s.err("unterminated graph expression"),
            }
            match s.peek() {
                Some(b',') => s.at += 1,
                Some(b']') => {
                    s.at += 1;
                    break;
                }
                Some(c) => return s.err(format!("expected ',' or ']', found '{}'", c as char)),
                None => return s.err("unterminated graph expression"),
            }
        }
    }
    if s.peek().is_some() {
        return s.err("trailing input after graph expression");
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use proptest::prelude::*;

    #[test]
    fn parses_reference_codes() {
        let j3 = PmDiagram::parse(corpus::J3).unwrap();
        assert_eq!((j3.num_matchings(), j3.num_virtuals()), (6, 3));
        assert_eq!(j3.matchings[0], [5, 6, 9, 1]);
        let pet = PmDiagram::parse(corpus::PETERSEN).unwrap();
        assert_eq!((pet.num_matchings(), pet.num_virtuals()), (5, 3));
        let bu = PmDiagram::parse(corpus::PETERSEN_BLOWUP).unwrap();
        assert_eq!((bu.num_matchings(), bu.num_virtuals()), (15, 8));
        assert_eq!(bu.arc_labels().len(), 30);
    }

    #[test]
    fn theta_roundtrip() {
        let theta = PmDiagram::parse("G[M[1,2,2,1]]").unwrap();
        assert_eq!(theta.matchings, vec![[1, 2, 2, 1]]);
        assert!(theta.virtuals.is_empty());
        assert_eq!(theta.serialize(), "G[M[1,2,2,1]]");
    }

    #[test]
    fn petersen_serializes_back_modulo_whitespace() {
        let pet = PmDiagram::parse(corpus::PETERSEN).unwrap();
        let squeezed: String = corpus::PETERSEN.chars().filter(|c| !c.is_whitespace()).collect();
        assert_eq!(pet.serialize(), squeezed);
    }

    #[test]
    fn unpaired_labels_are_reported() {
        let err = PmDiagram::parse("G[M[1,2,3,4]]").unwrap_err();
        let PdError::Invalid(v) = err else {
            panic!("expected validation error")
        };
        assert_eq!(v.len(), 4);
        for (i, viol) in v.iter().enumerate() {
            assert_eq!(
                *viol,
                Violation::LabelCount {
                    label: i as u32 + 1,
                    count: 1
                }
            );
        }
    }

    #[test]
    fn unknown_virtual_label_is_reported() {
        let err = PmDiagram::parse("G[M[1,2,2,1],V[1,7]]").unwrap_err();
        assert_eq!(
            err,
            PdError::Invalid(vec![Violation::UnknownVirtualLabel { x: 1, y: 7, label: 7 }])
        );
    }

    #[test]
    fn self_crossing_is_accepted() {
        let d = PmDiagram::parse("G[M[1,2,2,1],V[1,1]]").unwrap();
        assert_eq!(d.virtuals, vec![[1, 1]]);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match PmDiagram::parse("G[M[1,2,2],V[1,1]]") {
            Err(PdError::Syntax { pos, .. }) => assert_eq!(pos, 9),
            other => panic!("{other:?}"),
        }
        match PmDiagram::parse("G[M[1,0,0,1]]") {
            Err(PdError::Syntax { pos, msg }) => {
                assert_eq!(pos, 6);
                assert!(msg.contains("positive"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            PmDiagram::parse("G[M[1,2,2,1]] x"),
            Err(PdError::Syntax { .. })
        ));
        assert!(matches!(PmDiagram::parse("G[X[1]]"), Err(PdError::Syntax { .. })));
    }

    #[test]
    fn whitespace_is_tolerated() {
        let d = PmDiagram::parse(" G [ M[ 1 , 2,\n 2, 1 ] ,V[1, 2] ] ").unwrap();
        assert_eq!(d.serialize(), "G[M[1,2,2,1],V[1,2]]");
    }

    #[test]
    fn file_format_with_loops_and_comments() {
        let text = "# theta plus two circles\nloops: 2\nG[M[1,2,  # trailing\n 2,1]]\n";
        let d = PmDiagram::parse_file(text).unwrap();
        assert_eq!(d.loops, 2);
        assert_eq!(d.matchings, vec![[1, 2, 2, 1]]);
        assert_eq!(PmDiagram::parse_file(&d.to_file_string()).unwrap(), d);

        let only_loops = PmDiagram::parse_file("loops: 3\n").unwrap();
        assert!(only_loops.matchings.is_empty());
        assert_eq!(PmDiagram::parse_file(&only_loops.to_file_string()).unwrap(), only_loops);

        assert!(matches!(PmDiagram::parse_file("# nothing\n"), Err(PdError::Invalid(_))));
        assert!(matches!(
            PmDiagram::parse_file("loops: x\nG[M[1,2,2,1]]"),
            Err(PdError::Syntax { .. })
        ));
    }

    #[test]
    fn file_syntax_error_offsets_are_absolute() {
        let text = "# c\nG[M[1,2,2,]]";
        match PmDiagram::parse_file(text) {
            Err(PdError::Syntax { pos, .. }) => assert_eq!(&text[pos..pos + 1], "]"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn canonical_form_ignores_tuple_symmetries() {
        let a = PmDiagram::parse("G[M[5,6,9,1],M[3,4,8,9],V[6,3]]");
        let b = PmDiagram::parse("G[M[8,9,3,4],M[9,1,5,6],V[3,6]]");
        // labels do not pair up, so parse both without validation
        assert!(a.is_err() && b.is_err());
        let a = parse_expression("G[M[5,6,9,1],M[3,4,8,9],V[6,3]]", 0).unwrap();
        let b = parse_expression("G[M[8,9,3,4],M[9,1,5,6],V[3,6]]", 0).unwrap();
        assert_eq!(a.canonical(), b.canonical());
    }

    fn valid_diagram() -> impl Strategy<Value = PmDiagram> {
        (1usize..6)
            .prop_flat_map(|l| {
                let labels: Vec<u32> = (1..=(2 * l as u32)).flat_map(|x| [x, x]).collect();
                (
                    Just(l),
                    Just(labels).prop_shuffle(),
                    prop::collection::vec((1u32..=(2 * l as u32), 1u32..=(2 * l as u32)), 0..4),
                )
            })
            .prop_map(|(l, labels, virtuals)| {
                let matchings = (0..l)
                    .map(|i| [labels[4 * i], labels[4 * i + 1], labels[4 * i + 2], labels[4 * i + 3]])
                    .collect();
                PmDiagram::new(matchings, virtuals.into_iter().map(|(x, y)| [x, y]).collect())
            })
    }

    proptest! {
        #[test]
        fn parse_serialize_roundtrip(d in valid_diagram()) {
            prop_assert!(d.validate().is_ok());
            let s = d.serialize();
            let back = PmDiagram::parse(&s).unwrap();
            prop_assert_eq!(&back, &d);
            prop_assert_eq!(back.serialize(), s);
        }
    }
}
