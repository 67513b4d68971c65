//! Text format for diagrams (`.blf`) and for move scripts.
//!
//! A `.blf` file is line-oriented:
//!
//! ```text
//! blf 1
//! arrangement
//! vertex v0 double
//! edge e0 v0.0 v0.2
//! circle z0
//! nested outer (z0 inner)
//! faces
//! face inner fiber=c0:1
//! face outer fiber=c0:0
//! folds
//! fold z0 high=inner low=outer nonsep c0
//! lefschetz
//! lef p0 face=inner comp=c0 order=1 cycle=1,0
//! basepoints
//! basepoints 0
//! sections 0
//! ```
//!
//! Sections appear in this order. `#` starts a comment; blank lines are
//! ignored. `nested face (circle face ...)` is parse-only shorthand that
//! declares circles and asserts their side faces; canonical output always
//! uses explicit `circle` records, so parse(serialize(d)) == d and
//! serialize(parse(s)) == s on canonical files.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::arrangement::{EdgeEnd, VertexKind};
use crate::diagram::{BlfDiagram, Fold, LefschetzPoint};
use crate::fiber::{FiberDescription, SurgeryDescriptor};
use crate::ids::{ComponentId, CurveId, FaceId, PointId, VertexId};
use crate::moves::MoveCmd;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: duplicate id {id}")]
    DuplicateId { line: usize, col: usize, id: String },
    #[error("{line}:{col}: unknown reference {id}")]
    UnknownReference { line: usize, col: usize, id: String },
}

impl ParseError {
    fn syntax(line: usize, col: usize, msg: impl Into<String>) -> Self {
        ParseError::Syntax { line, col, msg: msg.into() }
    }
}

/// A token and its 1-based column.
struct Tok<'a> {
    text: &'a str,
    col: usize,
}

fn tokenize(line: &str) -> Vec<Tok<'_>> {
    let mut toks = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        // `#` opens a comment only at a token boundary; inside a token it
        // is an ordinary id character (move-generated ids use it).
        if ch == '#' && start.is_none() {
            return toks;
        }
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                toks.push(Tok { text: &line[s..i], col: s + 1 });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        toks.push(Tok { text: &line[s..], col: s + 1 });
    }
    toks
}

const SECTIONS: [&str; 5] = ["arrangement", "faces", "folds", "lefschetz", "basepoints"];

fn ok_id(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.' | '+' | '#'))
}

fn parse_kv<'a>(
    tok: &'a Tok<'a>,
    key: &str,
    line: usize,
) -> Result<&'a str, ParseError> {
    tok.text
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| {
            ParseError::syntax(line, tok.col, format!("expected {}=...", key))
        })
}

fn parse_fiber(s: &str, line: usize, col: usize) -> Result<FiberDescription, ParseError> {
    let mut comps = Vec::new();
    for part in s.split(',') {
        let (id, g) = part.split_once(':').ok_or_else(|| {
            ParseError::syntax(line, col, format!("bad fiber component {:?}", part))
        })?;
        if !ok_id(id) {
            return Err(ParseError::syntax(line, col, format!("bad component id {:?}", id)));
        }
        let genus: u32 = g.parse().map_err(|_| {
            ParseError::syntax(line, col, format!("bad genus {:?}", g))
        })?;
        comps.push((ComponentId::from(id), genus));
    }
    FiberDescription::new(comps)
        .map_err(|e| ParseError::syntax(line, col, e.to_string()))
}

fn parse_cycle(s: &str, line: usize, col: usize) -> Result<Vec<i64>, ParseError> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|p| {
            p.parse::<i64>().map_err(|_| {
                ParseError::syntax(line, col, format!("bad integer {:?}", p))
            })
        })
        .collect()
}

struct NestedClaim {
    circle: CurveId,
    outer: FaceId,
    inner: FaceId,
    line: usize,
    col: usize,
}

pub fn parse(input: &str) -> Result<BlfDiagram, ParseError> {
    let mut d = BlfDiagram::default();
    let mut nested: Vec<NestedClaim> = Vec::new();
    let mut lefschetz_seen: BTreeMap<String, usize> = BTreeMap::new();

    let mut lines = input
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !tokenize(l).is_empty());

    // header
    match lines.next() {
        Some((ln, l)) => {
            let toks = tokenize(l);
            if toks.len() != 2 || toks[0].text != "blf" || toks[1].text != "1" {
                return Err(ParseError::syntax(ln, toks[0].col, "expected header `blf 1`"));
            }
        }
        None => return Err(ParseError::syntax(1, 1, "empty input")),
    }

    let mut section = 0usize; // index into SECTIONS once entered; usize::MAX before
    let mut entered = [false; 5];
    let mut basepoints_seen = false;

    for (ln, l) in lines {
        let toks = tokenize(l);
        let head = toks[0].text;
        if let Some(pos) = SECTIONS.iter().position(|s| *s == head) {
            // `basepoints` is both a section header and a record; a bare
            // `basepoints` token is the header, `basepoints N` the record.
            let is_header = head != "basepoints" || toks.len() == 1 || !entered[4];
            if is_header && toks.len() == 1 {
                if entered[pos] {
                    return Err(ParseError::syntax(ln, toks[0].col, format!("section {} repeated", head)));
                }
                if entered.iter().skip(pos).any(|&e| e) {
                    return Err(ParseError::syntax(ln, toks[0].col, format!("section {} out of order", head)));
                }
                entered[pos] = true;
                section = pos;
                continue;
            }
        }
        if !entered.iter().any(|&e| e) {
            return Err(ParseError::syntax(ln, toks[0].col, "expected a section header"));
        }
        match (SECTIONS[section], head) {
            ("arrangement", "vertex") => {
                if toks.len() != 3 {
                    return Err(ParseError::syntax(ln, toks[0].col, "vertex ID KIND"));
                }
                let id = toks[1].text;
                if !ok_id(id) {
                    return Err(ParseError::syntax(ln, toks[1].col, "bad id"));
                }
                let kind = match toks[2].text {
                    "double" => VertexKind::Double,
                    "cusp" => VertexKind::Cusp,
                    other => {
                        return Err(ParseError::syntax(ln, toks[2].col, format!("unknown vertex kind {:?}", other)))
                    }
                };
                if d.arrangement.vertices.insert(VertexId::from(id), kind).is_some() {
                    return Err(ParseError::DuplicateId { line: ln, col: toks[1].col, id: id.into() });
                }
            }
            ("arrangement", "edge") => {
                if toks.len() != 4 {
                    return Err(ParseError::syntax(ln, toks[0].col, "edge ID V.S V.S"));
                }
                let id = toks[1].text;
                if !ok_id(id) {
                    return Err(ParseError::syntax(ln, toks[1].col, "bad id"));
                }
                let mut ends = Vec::new();
                for t in &toks[2..4] {
                    let (v, s) = t.text.split_once('.').ok_or_else(|| {
                        ParseError::syntax(ln, t.col, "expected VERTEX.SLOT")
                    })?;
                    let slot: u8 = s.parse().map_err(|_| {
                        ParseError::syntax(ln, t.col, format!("bad slot {:?}", s))
                    })?;
                    let vid = VertexId::from(v);
                    let kind = d.arrangement.vertices.get(&vid).ok_or_else(|| {
                        ParseError::UnknownReference { line: ln, col: t.col, id: v.into() }
                    })?;
                    if slot >= kind.valence() {
                        return Err(ParseError::syntax(ln, t.col, format!("slot {} out of range", slot)));
                    }
                    ends.push(EdgeEnd { vertex: vid, slot });
                }
                let cid = CurveId::from(id);
                if d.arrangement.edges.contains_key(&cid) || d.arrangement.circles.contains(&cid) {
                    return Err(ParseError::DuplicateId { line: ln, col: toks[1].col, id: id.into() });
                }
                // Ends are stored sorted so structurally equal diagrams
                // compare equal regardless of how the record was written.
                ends.sort();
                let e: [EdgeEnd; 2] = [ends[0].clone(), ends[1].clone()];
                d.arrangement.edges.insert(cid, e);
            }
            ("arrangement", "circle") => {
                if toks.len() != 2 {
                    return Err(ParseError::syntax(ln, toks[0].col, "circle ID"));
                }
                let id = toks[1].text;
                if !ok_id(id) {
                    return Err(ParseError::syntax(ln, toks[1].col, "bad id"));
                }
                let cid = CurveId::from(id);
                if d.arrangement.edges.contains_key(&cid) || !d.arrangement.circles.insert(cid) {
                    return Err(ParseError::DuplicateId { line: ln, col: toks[1].col, id: id.into() });
                }
            }
            ("arrangement", "nested") => {
                parse_nested(&toks, ln, &mut d, &mut nested)?;
            }
            ("faces", "face") => {
                if toks.len() != 3 {
                    return Err(ParseError::syntax(ln, toks[0].col, "face ID fiber=..."));
                }
                let id = toks[1].text;
                if !ok_id(id) {
                    return Err(ParseError::syntax(ln, toks[1].col, "bad id"));
                }
                let fiber_s = parse_kv(&toks[2], "fiber", ln)?;
                let fiber = parse_fiber(fiber_s, ln, toks[2].col)?;
                if d.faces.insert(FaceId::from(id), fiber).is_some() {
                    return Err(ParseError::DuplicateId { line: ln, col: toks[1].col, id: id.into() });
                }
            }
            ("folds", "fold") => {
                if toks.len() < 5 {
                    return Err(ParseError::syntax(ln, toks[0].col, "fold ID high=F low=F SURGERY"));
                }
                let id = toks[1].text;
                let cid = CurveId::from(id);
                if !d.arrangement.edges.contains_key(&cid) && !d.arrangement.circles.contains(&cid) {
                    return Err(ParseError::UnknownReference { line: ln, col: toks[1].col, id: id.into() });
                }
                let high = FaceId::from(parse_kv(&toks[2], "high", ln)?);
                let low = FaceId::from(parse_kv(&toks[3], "low", ln)?);
                for f in [&high, &low] {
                    if !d.faces.contains_key(f) {
                        return Err(ParseError::UnknownReference { line: ln, col: toks[2].col, id: f.to_string() });
                    }
                }
                let surgery = match toks[4].text {
                    "nonsep" => {
                        if toks.len() != 6 {
                            return Err(ParseError::syntax(ln, toks[4].col, "nonsep COMPONENT"));
                        }
                        SurgeryDescriptor::nonseparating(toks[5].text)
                    }
                    "sep" => {
                        if toks.len() != 8 {
                            return Err(ParseError::syntax(ln, toks[4].col, "sep COMPONENT G1 G2"));
                        }
                        let g1: u32 = toks[6].text.parse().map_err(|_| {
                            ParseError::syntax(ln, toks[6].col, "bad genus")
                        })?;
                        let g2: u32 = toks[7].text.parse().map_err(|_| {
                            ParseError::syntax(ln, toks[7].col, "bad genus")
                        })?;
                        SurgeryDescriptor::separating(toks[5].text, g1, g2)
                    }
                    other => {
                        return Err(ParseError::syntax(ln, toks[4].col, format!("unknown surgery {:?}", other)))
                    }
                };
                if d.folds.insert(cid, Fold { high, low, surgery }).is_some() {
                    return Err(ParseError::DuplicateId { line: ln, col: toks[1].col, id: id.into() });
                }
            }
            ("lefschetz", "lef") => {
                if toks.len() != 6 {
                    return Err(ParseError::syntax(ln, toks[0].col, "lef ID face=F comp=C order=N cycle=..."));
                }
                let id = toks[1].text;
                if !ok_id(id) {
                    return Err(ParseError::syntax(ln, toks[1].col, "bad id"));
                }
                let face = FaceId::from(parse_kv(&toks[2], "face", ln)?);
                if !d.faces.contains_key(&face) {
                    return Err(ParseError::UnknownReference { line: ln, col: toks[2].col, id: face.to_string() });
                }
                let comp = ComponentId::from(parse_kv(&toks[3], "comp", ln)?);
                let order: i64 = parse_kv(&toks[4], "order", ln)?.parse().map_err(|_| {
                    ParseError::syntax(ln, toks[4].col, "bad order")
                })?;
                let cycle = parse_cycle(parse_kv(&toks[5], "cycle", ln)?, ln, toks[5].col)?;
                if lefschetz_seen.insert(id.to_string(), ln).is_some() {
                    return Err(ParseError::DuplicateId { line: ln, col: toks[1].col, id: id.into() });
                }
                d.lefschetz.insert(
                    PointId::from(id),
                    LefschetzPoint { face, component: comp, order, cycle },
                );
            }
            ("basepoints", "basepoints") => {
                if toks.len() != 2 {
                    return Err(ParseError::syntax(ln, toks[0].col, "basepoints N"));
                }
                if basepoints_seen {
                    return Err(ParseError::syntax(ln, toks[0].col, "basepoints repeated"));
                }
                basepoints_seen = true;
                d.basepoints = toks[1].text.parse().map_err(|_| {
                    ParseError::syntax(ln, toks[1].col, "bad count")
                })?;
            }
            ("basepoints", "sections") => {
                if toks.len() != 2 {
                    return Err(ParseError::syntax(ln, toks[0].col, "sections N"));
                }
                d.sections = toks[1].text.parse().map_err(|_| {
                    ParseError::syntax(ln, toks[1].col, "bad count")
                })?;
            }
            (sec, other) => {
                return Err(ParseError::syntax(
                    ln,
                    toks[0].col,
                    format!("unexpected record {:?} in section {}", other, sec),
                ))
            }
        }
    }

    if !entered.iter().all(|&e| e) {
        let missing = SECTIONS
            .iter()
            .zip(entered)
            .find(|(_, e)| !e)
            .map(|(s, _)| *s)
            .unwrap();
        return Err(ParseError::syntax(0, 0, format!("missing section {}", missing)));
    }

    // Check nested shorthand claims against the fold records.
    for claim in &nested {
        match d.folds.get(&claim.circle) {
            Some(fold) => {
                let want: [&FaceId; 2] = [&claim.outer, &claim.inner];
                let got: [&FaceId; 2] = [&fold.high, &fold.low];
                let matches = (want[0] == got[0] && want[1] == got[1])
                    || (want[0] == got[1] && want[1] == got[0]);
                if !matches {
                    return Err(ParseError::syntax(
                        claim.line,
                        claim.col,
                        format!(
                            "nested: circle {} separates {}/{} but fold says {}/{}",
                            claim.circle, claim.outer, claim.inner, fold.high, fold.low
                        ),
                    ));
                }
            }
            None => {
                return Err(ParseError::UnknownReference {
                    line: claim.line,
                    col: claim.col,
                    id: claim.circle.to_string(),
                })
            }
        }
    }

    Ok(d)
}

/// `nested FACE ( CIRCLE FACE ( ... ) ... )` — a tree of circles; each group
/// names the circle and the face inside it, nesting recursively.
fn parse_nested(
    toks: &[Tok<'_>],
    ln: usize,
    d: &mut BlfDiagram,
    claims: &mut Vec<NestedClaim>,
) -> Result<(), ParseError> {
    // Re-tokenize with parens split out.
    let mut flat: Vec<(String, usize)> = Vec::new();
    for t in &toks[1..] {
        let mut cur = String::new();
        let mut cur_col = t.col;
        for (i, ch) in t.text.char_indices() {
            if ch == '(' || ch == ')' {
                if !cur.is_empty() {
                    flat.push((cur.clone(), cur_col));
                    cur.clear();
                }
                flat.push((ch.to_string(), t.col + i));
            } else {
                if cur.is_empty() {
                    cur_col = t.col + i;
                }
                cur.push(ch);
            }
        }
        if !cur.is_empty() {
            flat.push((cur, cur_col));
        }
    }
    if flat.is_empty() {
        return Err(ParseError::syntax(ln, toks[0].col, "nested FACE (CIRCLE FACE ...)"));
    }
    // Recursive descent.
    fn group(
        flat: &[(String, usize)],
        pos: &mut usize,
        outer: &FaceId,
        ln: usize,
        d: &mut BlfDiagram,
        claims: &mut Vec<NestedClaim>,
    ) -> Result<(), ParseError> {
        while *pos < flat.len() && flat[*pos].0 == "(" {
            *pos += 1;
            if *pos + 1 >= flat.len() {
                return Err(ParseError::syntax(ln, flat[*pos - 1].1, "unterminated group"));
            }
            let (circle_s, ccol) = (&flat[*pos].0, flat[*pos].1);
            let (inner_s, _) = (&flat[*pos + 1].0, flat[*pos + 1].1);
            *pos += 2;
            if !ok_id(circle_s) || !ok_id(inner_s) {
                return Err(ParseError::syntax(ln, ccol, "nested: bad id"));
            }
            let circle = CurveId::from(circle_s.as_str());
            let inner = FaceId::from(inner_s.as_str());
            if d.arrangement.edges.contains_key(&circle)
                || !d.arrangement.circles.insert(circle.clone())
            {
                return Err(ParseError::DuplicateId { line: ln, col: ccol, id: circle_s.clone() });
            }
            claims.push(NestedClaim {
                circle,
                outer: outer.clone(),
                inner: inner.clone(),
                line: ln,
                col: ccol,
            });
            group(flat, pos, &inner, ln, d, claims)?;
            if *pos >= flat.len() || flat[*pos].0 != ")" {
                return Err(ParseError::syntax(ln, flat[*pos - 1].1, "expected )"));
            }
            *pos += 1;
        }
        Ok(())
    }
    let root = FaceId::from(flat[0].0.as_str());
    if !ok_id(&flat[0].0) {
        return Err(ParseError::syntax(ln, flat[0].1, "nested: bad face id"));
    }
    let mut pos = 1usize;
    group(&flat, &mut pos, &root, ln, d, claims)?;
    if pos != flat.len() {
        return Err(ParseError::syntax(ln, flat[pos].1, "trailing tokens in nested record"));
    }
    Ok(())
}

/// Canonical serialization: fixed section order, records sorted by id.
pub fn serialize(d: &BlfDiagram) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "blf 1");
    let _ = writeln!(out, "arrangement");
    for (v, kind) in &d.arrangement.vertices {
        let _ = writeln!(out, "vertex {} {}", v, kind.name());
    }
    for (e, ends) in &d.arrangement.edges {
        let _ = writeln!(
            out,
            "edge {} {}.{} {}.{}",
            e, ends[0].vertex, ends[0].slot, ends[1].vertex, ends[1].slot
        );
    }
    for z in &d.arrangement.circles {
        let _ = writeln!(out, "circle {}", z);
    }
    let _ = writeln!(out, "faces");
    for (f, fiber) in &d.faces {
        let _ = writeln!(out, "face {} fiber={}", f, fiber);
    }
    let _ = writeln!(out, "folds");
    for (c, fold) in &d.folds {
        let _ = writeln!(
            out,
            "fold {} high={} low={} {}",
            c, fold.high, fold.low, fold.surgery
        );
    }
    let _ = writeln!(out, "lefschetz");
    for (p, lef) in &d.lefschetz {
        let cycle: Vec<String> = lef.cycle.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(
            out,
            "lef {} face={} comp={} order={} cycle={}",
            p,
            lef.face,
            lef.component,
            lef.order,
            cycle.join(",")
        );
    }
    let _ = writeln!(out, "basepoints");
    let _ = writeln!(out, "basepoints {}", d.basepoints);
    let _ = writeln!(out, "sections {}", d.sections);
    out
}

/// Parse a move script: one invocation per line, `<move-name> <args...>`,
/// with `#` comments and blank lines ignored.
///
/// ```text
/// slide s t0 t1        # slide s across t0 then t1
/// r2 lens              # remove the bigon face
/// push p0 z0 c0 1,0    # push p0 across z0; lifted class on c0
/// cusp k0 inner 1,0    # trade the cusp for a lefschetz point in `inner`
/// flip z0 nonsep c0 1,0,0,0 0,1,0,0
/// flip z0 sep c0 1 2 <cycle> <cycle>
/// blowup
/// blowdown
/// connect
/// ```
pub fn parse_script(input: &str) -> Result<Vec<MoveCmd>, ParseError> {
    let mut cmds = Vec::new();
    for (li, raw) in input.lines().enumerate() {
        let line = li + 1;
        let toks = tokenize(raw);
        if toks.is_empty() {
            continue;
        }
        let name = toks[0].text;
        let args = &toks[1..];
        let want = |n: usize| -> Result<(), ParseError> {
            if args.len() == n {
                Ok(())
            } else {
                Err(ParseError::syntax(
                    line,
                    toks[0].col,
                    format!("{} takes {} arguments, got {}", name, n, args.len()),
                ))
            }
        };
        let id = |tok: &Tok<'_>| -> Result<String, ParseError> {
            if ok_id(tok.text) {
                Ok(tok.text.to_string())
            } else {
                Err(ParseError::syntax(line, tok.col, format!("bad id {:?}", tok.text)))
            }
        };
        match name {
            "slide" => {
                if args.is_empty() {
                    return Err(ParseError::syntax(line, toks[0].col, "slide takes an arc"));
                }
                let arc = CurveId(id(&args[0])?);
                let over = args[1..]
                    .iter()
                    .map(|t| id(t).map(CurveId))
                    .collect::<Result<Vec<_>, _>>()?;
                cmds.push(MoveCmd::Slide { arc, over });
            }
            "r2" => {
                want(1)?;
                cmds.push(MoveCmd::R2(FaceId(id(&args[0])?)));
            }
            "push" => {
                if args.len() != 3 && args.len() != 4 {
                    return Err(ParseError::syntax(
                        line,
                        toks[0].col,
                        "push takes: point curve component [cycle]",
                    ));
                }
                let cycle = if args.len() == 4 {
                    parse_cycle(args[3].text, line, args[3].col)?
                } else {
                    Vec::new()
                };
                cmds.push(MoveCmd::Push {
                    point: PointId(id(&args[0])?),
                    across: CurveId(id(&args[1])?),
                    component: ComponentId(id(&args[2])?),
                    cycle,
                });
            }
            "cusp" => {
                if args.len() != 2 && args.len() != 3 {
                    return Err(ParseError::syntax(
                        line,
                        toks[0].col,
                        "cusp takes: vertex face [cycle]",
                    ));
                }
                let cycle = if args.len() == 3 {
                    parse_cycle(args[2].text, line, args[2].col)?
                } else {
                    Vec::new()
                };
                cmds.push(MoveCmd::Cusp {
                    vertex: VertexId(id(&args[0])?),
                    face: FaceId(id(&args[1])?),
                    cycle,
                });
            }
            "flip" => {
                if args.len() < 2 {
                    return Err(ParseError::syntax(
                        line,
                        toks[0].col,
                        "flip takes: curve nonsep|sep ... cycle cycle",
                    ));
                }
                let curve = CurveId(id(&args[0])?);
                let (surgery, rest) = match args[1].text {
                    "nonsep" => {
                        if args.len() != 5 {
                            return Err(ParseError::syntax(
                                line,
                                toks[0].col,
                                "flip takes: curve nonsep comp cycle cycle",
                            ));
                        }
                        (SurgeryDescriptor::nonseparating(id(&args[2])?), &args[3..])
                    }
                    "sep" => {
                        if args.len() != 7 {
                            return Err(ParseError::syntax(
                                line,
                                toks[0].col,
                                "flip takes: curve sep comp g1 g2 cycle cycle",
                            ));
                        }
                        let g1: u32 = args[3].text.parse().map_err(|_| {
                            ParseError::syntax(line, args[3].col, "bad genus")
                        })?;
                        let g2: u32 = args[4].text.parse().map_err(|_| {
                            ParseError::syntax(line, args[4].col, "bad genus")
                        })?;
                        (SurgeryDescriptor::separating(id(&args[2])?, g1, g2), &args[5..])
                    }
                    other => {
                        return Err(ParseError::syntax(
                            line,
                            args[1].col,
                            format!("expected nonsep or sep, got {:?}", other),
                        ))
                    }
                };
                let c0 = parse_cycle(rest[0].text, line, rest[0].col)?;
                let c1 = parse_cycle(rest[1].text, line, rest[1].col)?;
                cmds.push(MoveCmd::Flip { curve, surgery, cycles: Box::new([c0, c1]) });
            }
            "blowup" => {
                want(0)?;
                cmds.push(MoveCmd::BlowUp);
            }
            "blowdown" => {
                want(0)?;
                cmds.push(MoveCmd::BlowDown);
            }
            "connect" => {
                want(0)?;
                cmds.push(MoveCmd::Connect);
            }
            other => {
                return Err(ParseError::syntax(
                    line,
                    toks[0].col,
                    format!("unknown move {:?}", other),
                ))
            }
        }
    }
    Ok(cmds)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRIVIAL: &str = "\
blf 1
arrangement
faces
face all fiber=c0:1
folds
lefschetz
basepoints
basepoints 0
";

    #[test]
    fn parse_trivial_bundle() {
        let d = parse(TRIVIAL).unwrap();
        assert!(d.arrangement.is_empty());
        assert_eq!(d.faces.len(), 1);
        assert!(d.validate().ok());
    }

    #[test]
    fn roundtrip_canonical() {
        let d = parse(TRIVIAL).unwrap();
        let s = serialize(&d);
        let d2 = parse(&s).unwrap();
        assert_eq!(d, d2);
        assert_eq!(serialize(&d2), s);
    }

    #[test]
    fn nested_shorthand_matches_explicit() {
        let nested = "\
blf 1
arrangement
nested outer (z0 inner)
faces
face inner fiber=c0:1
face outer fiber=c0:0
folds
fold z0 high=inner low=outer nonsep c0
lefschetz
basepoints
basepoints 0
";
        let explicit = nested.replace("nested outer (z0 inner)", "circle z0");
        assert_eq!(parse(nested).unwrap(), parse(&explicit).unwrap());
    }

    #[test]
    fn nested_mismatch_rejected() {
        let bad = "\
blf 1
arrangement
nested outer (z0 elsewhere)
faces
face inner fiber=c0:1
face outer fiber=c0:0
folds
fold z0 high=inner low=outer nonsep c0
lefschetz
basepoints
basepoints 0
";
        assert!(matches!(parse(bad), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn unknown_vertex_reference() {
        let bad = "\
blf 1
arrangement
edge e0 v0.0 v0.1
faces
face all fiber=c0:1
folds
lefschetz
basepoints
basepoints 0
";
        assert!(matches!(parse(bad), Err(ParseError::UnknownReference { line: 3, .. })));
    }

    #[test]
    fn error_location_reported() {
        let bad = TRIVIAL.replace("face all fiber=c0:1", "face all fiber=c0:x");
        match parse(&bad) {
            Err(ParseError::Syntax { line: 4, .. }) => {}
            other => panic!("unexpected: {:?}", other),
        }
    }
}
