//! Diagram rewrites. Every move takes a valid diagram, returns a new valid
//! diagram, and preserves the Euler characteristic of the total space
//! (blow-up/blow-down shift it by the recorded base-point count instead).
//!
//! Naming: `#` is reserved as the split separator. A slide splits curve `s`
//! into `s#a`/`s#m`/`s#c` (edges) or `s#m`/`s#r` (circles); a flip produces
//! `z#l`/`z#r` plus the loop face `z#L`; removing a bigon merges the pieces
//! back under the common base name, so slide-then-remove is the identity.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::arrangement::{Dart, EdgeEnd, VertexKind};
use crate::diagram::{Analysis, BlfDiagram, Fold, LefschetzPoint, ValidationReport};
use crate::fiber::{
    apply_surgery, derived_ids, unapply_surgery, FiberError, SurgeryDescriptor,
};
use crate::ids::{ComponentId, CurveId, FaceId, PointId, VertexId};

#[derive(Debug, Error)]
pub enum MoveError {
    #[error("input diagram is not valid:\n{0}")]
    InvalidInput(ValidationReport),
    #[error("move result does not validate:\n{0}")]
    InvalidResult(ValidationReport),
    #[error("not adjacent: {0}")]
    NotAdjacent(String),
    #[error("arrow violation: {0}")]
    ArrowViolation(String),
    #[error("index violation: {0}")]
    IndexViolation(String),
    #[error("lift mismatch: {0}")]
    LiftMismatch(String),
    #[error("{0} is not a cusp vertex")]
    NotACusp(VertexId),
    #[error("not a pencil: no base points to blow up")]
    NotAPencil,
    #[error("no section markers to blow down")]
    NoSections,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("surgery: {0}")]
    Surgery(#[from] FiberError),
    #[error("unknown element {0}")]
    Unknown(String),
}

fn ensure_valid(d: &BlfDiagram) -> Result<Analysis, MoveError> {
    let report = d.validate();
    if !report.ok() {
        return Err(MoveError::InvalidInput(report));
    }
    Ok(d.analyze().expect("validated"))
}

/// Id with any `#`-split suffix stripped.
fn id_base(id: &str) -> &str {
    id.split('#').next().unwrap()
}

fn fresh(taken: &mut BTreeSet<String>, want: String) -> String {
    let mut name = want.clone();
    let mut n = 1usize;
    while taken.contains(&name) {
        n += 1;
        name = format!("{}-{}", want, n);
    }
    taken.insert(name.clone());
    name
}

fn curve_names(d: &BlfDiagram) -> BTreeSet<String> {
    d.arrangement
        .curve_ids()
        .map(|c| c.0.clone())
        .collect()
}

fn edge2(a: EdgeEnd, b: EdgeEnd) -> [EdgeEnd; 2] {
    if a <= b {
        [a, b]
    } else {
        [b, a]
    }
}

/// The end of `e` that is not `(v, slot)`.
fn other_end(ends: &[EdgeEnd; 2], v: &VertexId, slot: u8) -> EdgeEnd {
    if ends[0].vertex == *v && ends[0].slot == slot {
        ends[1].clone()
    } else {
        ends[0].clone()
    }
}

// ---------------------------------------------------------------------------
// slide

/// Slide `arc` across each curve of `over` in order, entering its own low
/// face at each step (the arrow direction). Each crossing is a
/// Reidemeister-II insertion: two new double vertices and a lens face whose
/// fiber is forced by the surgeries. Empty path is the identity.
pub fn slide_arc(
    d: &BlfDiagram,
    arc: &CurveId,
    over: &[CurveId],
) -> Result<BlfDiagram, MoveError> {
    let mut cur = d.clone();
    let mut sliding = arc.clone();
    for t in over {
        let (next, mid) = slide_once(&cur, &sliding, t)?;
        cur = next;
        sliding = mid;
    }
    Ok(cur)
}

fn slide_once(
    d: &BlfDiagram,
    s: &CurveId,
    t: &CurveId,
) -> Result<(BlfDiagram, CurveId), MoveError> {
    ensure_valid(d)?;
    if s == t {
        return Err(MoveError::PreconditionViolated(
            "cannot slide a curve over itself".into(),
        ));
    }
    let fs = d
        .folds
        .get(s)
        .cloned()
        .ok_or_else(|| MoveError::Unknown(s.to_string()))?;
    let ft = d
        .folds
        .get(t)
        .cloned()
        .ok_or_else(|| MoveError::Unknown(t.to_string()))?;
    let (a, r) = (fs.high.clone(), fs.low.clone());
    // The slide enters R = low(s); t must bound R on the far side.
    let case_i = ft.high == r;
    let case_ii = !case_i && ft.low == r;
    if !case_i && !case_ii {
        if ft.high == a || ft.low == a {
            return Err(MoveError::ArrowViolation(format!(
                "{} borders only the high face of {}; slides go with the arrow",
                t, s
            )));
        }
        return Err(MoveError::NotAdjacent(format!(
            "{} does not bound the low face {} of {}",
            t, r, s
        )));
    }
    let b = if case_i { ft.low.clone() } else { ft.high.clone() };
    let f_a = &d.faces[&a];
    // Lens fiber is forced: the lens is the swept continuation of A across t.
    let lens_fiber = if case_i {
        apply_surgery(f_a, &ft.surgery)?
    } else {
        unapply_surgery(f_a, &ft.surgery)?
    };
    match apply_surgery(&lens_fiber, &fs.surgery) {
        Ok(f) if f == d.faces[&b] => {}
        _ => {
            return Err(MoveError::PreconditionViolated(format!(
                "surgeries of {} and {} do not commute across the new crossings",
                s, t
            )))
        }
    }

    // Fresh names.
    let mut curves = curve_names(d);
    curves.remove(&s.0);
    curves.remove(&t.0);
    let s_circle = d.arrangement.circles.contains(s);
    let t_circle = d.arrangement.circles.contains(t);
    let smid = CurveId(fresh(&mut curves, format!("{}#m", s)));
    let (srest1, srest2) = if s_circle {
        let r = CurveId(fresh(&mut curves, format!("{}#r", s)));
        (r.clone(), r)
    } else {
        (
            CurveId(fresh(&mut curves, format!("{}#a", s))),
            CurveId(fresh(&mut curves, format!("{}#c", s))),
        )
    };
    let tmid = CurveId(fresh(&mut curves, format!("{}#m", t)));
    let (trest1, trest2) = if t_circle {
        let r = CurveId(fresh(&mut curves, format!("{}#r", t)));
        (r.clone(), r)
    } else {
        (
            CurveId(fresh(&mut curves, format!("{}#a", t))),
            CurveId(fresh(&mut curves, format!("{}#c", t))),
        )
    };
    let mut vnames: BTreeSet<String> =
        d.arrangement.vertices.keys().map(|v| v.0.clone()).collect();
    let w1 = VertexId(fresh(&mut vnames, "w0".into()));
    let w2 = VertexId(fresh(&mut vnames, "w1".into()));
    let mut fnames: BTreeSet<String> =
        d.faces.keys().map(|f| f.0.clone()).collect();
    let lens = FaceId(fresh(&mut fnames, format!("{}+{}", s, t)));

    // Slot layouts (one orientation and its mirror); for edges also both
    // assignments of the original endpoints to the two crossings. The
    // rotation data of the rest of the diagram decides which gluing is the
    // planar one, so candidates are tried until one validates.
    let s_ends = d.arrangement.edges.get(s).cloned();
    let t_ends = d.arrangement.edges.get(t).cloned();
    let s_swaps: &[bool] = if s_circle { &[false] } else { &[false, true] };
    let t_swaps: &[bool] = if t_circle { &[false] } else { &[false, true] };
    let mut last_report = None;
    for mirror in [false, true] {
        // slot of each part at (w1, w2)
        let (sm1, sm2) = (2u8, if mirror { 3 } else { 1 });
        let (tm1, tm2) = (if mirror { 3 } else { 1 }, 2u8);
        let (sr1, sr2) = (0u8, if mirror { 1 } else { 3 });
        let (tr1, tr2) = (if mirror { 1 } else { 3 }, 0u8);
        for &sswap in s_swaps {
            for &tswap in t_swaps {
                let mut d2 = d.clone();
                let arr = &mut d2.arrangement;
                arr.edges.remove(s);
                arr.edges.remove(t);
                arr.circles.remove(s);
                arr.circles.remove(t);
                arr.vertices.insert(w1.clone(), VertexKind::Double);
                arr.vertices.insert(w2.clone(), VertexKind::Double);
                let end = |v: &VertexId, slot: u8| EdgeEnd { vertex: v.clone(), slot };
                arr.edges.insert(smid.clone(), edge2(end(&w1, sm1), end(&w2, sm2)));
                arr.edges.insert(tmid.clone(), edge2(end(&w1, tm1), end(&w2, tm2)));
                if let Some(ends) = &s_ends {
                    let (e0, e1) = if sswap {
                        (ends[1].clone(), ends[0].clone())
                    } else {
                        (ends[0].clone(), ends[1].clone())
                    };
                    arr.edges.insert(srest1.clone(), edge2(e0, end(&w1, sr1)));
                    arr.edges.insert(srest2.clone(), edge2(end(&w2, sr2), e1));
                } else {
                    arr.edges
                        .insert(srest1.clone(), edge2(end(&w1, sr1), end(&w2, sr2)));
                }
                if let Some(ends) = &t_ends {
                    let (f0, f1) = if tswap {
                        (ends[1].clone(), ends[0].clone())
                    } else {
                        (ends[0].clone(), ends[1].clone())
                    };
                    arr.edges.insert(trest1.clone(), edge2(f0, end(&w1, tr1)));
                    arr.edges.insert(trest2.clone(), edge2(end(&w2, tr2), f1));
                } else {
                    arr.edges
                        .insert(trest1.clone(), edge2(end(&w1, tr1), end(&w2, tr2)));
                }

                d2.folds.remove(s);
                d2.folds.remove(t);
                d2.folds.insert(srest1.clone(), fs.clone());
                d2.folds.insert(srest2.clone(), fs.clone());
                d2.folds.insert(trest1.clone(), ft.clone());
                d2.folds.insert(trest2.clone(), ft.clone());
                d2.folds.insert(
                    smid.clone(),
                    Fold { high: lens.clone(), low: b.clone(), surgery: fs.surgery.clone() },
                );
                d2.folds.insert(
                    tmid.clone(),
                    if case_i {
                        Fold { high: a.clone(), low: lens.clone(), surgery: ft.surgery.clone() }
                    } else {
                        Fold { high: lens.clone(), low: a.clone(), surgery: ft.surgery.clone() }
                    },
                );
                d2.faces.insert(lens.clone(), lens_fiber.clone());

                let report = d2.validate();
                if report.ok() {
                    return Ok((d2, smid));
                }
                last_report = Some(report);
            }
        }
    }
    Err(MoveError::InvalidResult(last_report.unwrap()))
}

// ---------------------------------------------------------------------------
// r2_remove

/// Remove a bigon: a face bounded by a single two-arc circuit between two
/// double vertices. The four outer strand pieces are merged pairwise and the
/// lens face disappears. At least one bigon arc's arrow must point out of
/// the bigon.
pub fn r2_remove(d: &BlfDiagram, face: &FaceId) -> Result<BlfDiagram, MoveError> {
    let analysis = ensure_valid(d)?;
    let circuits = analysis
        .circuits_of_face
        .get(face)
        .ok_or_else(|| MoveError::Unknown(face.to_string()))?;
    if circuits.len() != 1 {
        return Err(MoveError::IndexViolation(format!(
            "face {} has {} boundary circuits; a bigon has one",
            face,
            circuits.len()
        )));
    }
    let circ = &analysis.trace.circuits[circuits[0]];
    if circ.len() != 2 {
        return Err(MoveError::IndexViolation(format!(
            "face {} has {} boundary darts; a bigon has two",
            face,
            circ.len()
        )));
    }
    let mut bigon_edges = Vec::new();
    for dart in circ {
        match dart {
            Dart::Arc { edge, .. } => bigon_edges.push(edge.clone()),
            Dart::Side { .. } => {
                return Err(MoveError::IndexViolation(format!(
                    "face {} is bounded by a vertexless circle",
                    face
                )))
            }
        }
    }
    let (m1, m2) = (bigon_edges[0].clone(), bigon_edges[1].clone());
    if m1 == m2 {
        return Err(MoveError::IndexViolation(
            "bigon boundary traverses a single arc twice".into(),
        ));
    }
    let e1 = d.arrangement.edges[&m1].clone();
    let e2 = d.arrangement.edges[&m2].clone();
    let w1 = e1[0].vertex.clone();
    let w2 = e1[1].vertex.clone();
    let ok_shape = w1 != w2
        && [&e2[0].vertex, &e2[1].vertex].iter().any(|v| **v == w1)
        && [&e2[0].vertex, &e2[1].vertex].iter().any(|v| **v == w2)
        && d.arrangement.vertices[&w1] == VertexKind::Double
        && d.arrangement.vertices[&w2] == VertexKind::Double;
    if !ok_shape {
        return Err(MoveError::IndexViolation(
            "bigon arcs must join two distinct double vertices".into(),
        ));
    }
    if d.lefschetz.values().any(|p| p.face == *face) {
        return Err(MoveError::PreconditionViolated(format!(
            "face {} contains lefschetz points",
            face
        )));
    }
    let out1 = d.folds[&m1].high == *face;
    let out2 = d.folds[&m2].high == *face;
    if !out1 && !out2 {
        return Err(MoveError::IndexViolation(
            "both bigon arrows point into the bigon".into(),
        ));
    }

    // Strand partners: at a double vertex the strand continues at slot + 2.
    let mut slot_of = std::collections::BTreeMap::new();
    for (eid, ends) in &d.arrangement.edges {
        for end in ends {
            slot_of.insert((end.vertex.clone(), end.slot), eid.clone());
        }
    }
    let find_slot = |m: &CurveId, w: &VertexId| -> u8 {
        d.arrangement.edges[m]
            .iter()
            .find(|e| e.vertex == *w)
            .unwrap()
            .slot
    };
    struct Strand {
        p1: CurveId,
        ps1: u8,
        p2: CurveId,
        ps2: u8,
    }
    let mut strands = Vec::new();
    for m in [&m1, &m2] {
        let ps1 = (find_slot(m, &w1) + 2) % 4;
        let ps2 = (find_slot(m, &w2) + 2) % 4;
        let p1 = slot_of[&(w1.clone(), ps1)].clone();
        let p2 = slot_of[&(w2.clone(), ps2)].clone();
        if p1 == m1 || p1 == m2 || p2 == m1 || p2 == m2 {
            return Err(MoveError::IndexViolation(
                "degenerate bigon: strand partner lies on the bigon".into(),
            ));
        }
        if d.folds[&p1] != d.folds[&p2] {
            return Err(MoveError::IndexViolation(format!(
                "strand pieces {} and {} carry different fold data",
                p1, p2
            )));
        }
        if d.folds[m].surgery != d.folds[&p1].surgery {
            return Err(MoveError::IndexViolation(format!(
                "bigon arc {} and strand piece {} carry different surgeries",
                m, p1
            )));
        }
        strands.push(Strand { p1, ps1, p2, ps2 });
    }
    if strands[0].p1 == strands[1].p1 || strands[0].p2 == strands[1].p2 {
        return Err(MoveError::IndexViolation(
            "degenerate bigon: the two strands share a piece".into(),
        ));
    }

    let mut d2 = d.clone();
    d2.arrangement.vertices.remove(&w1);
    d2.arrangement.vertices.remove(&w2);
    for m in [&m1, &m2] {
        d2.arrangement.edges.remove(m);
        d2.folds.remove(m);
    }
    for st in &strands {
        d2.arrangement.edges.remove(&st.p1);
        d2.arrangement.edges.remove(&st.p2);
    }
    let mut curves = curve_names(&d2);
    for st in &strands {
        let fold = d.folds[&st.p1].clone();
        d2.folds.remove(&st.p1);
        d2.folds.remove(&st.p2);
        let id = CurveId(fresh(&mut curves, id_base(&st.p1.0).to_string()));
        if st.p1 == st.p2 {
            d2.arrangement.circles.insert(id.clone());
        } else {
            let far1 = other_end(&d.arrangement.edges[&st.p1], &w1, st.ps1);
            let far2 = other_end(&d.arrangement.edges[&st.p2], &w2, st.ps2);
            d2.arrangement.edges.insert(id.clone(), edge2(far1, far2));
        }
        d2.folds.insert(id, fold);
    }
    d2.faces.remove(face);

    let report = d2.validate();
    if !report.ok() {
        return Err(MoveError::InvalidResult(report));
    }
    Ok(d2)
}

// ---------------------------------------------------------------------------
// push_lefschetz

/// Push a Lefschetz point from the low face of `across` to its high face.
/// The caller supplies the lifted class; it is checked at component/genus
/// level only.
pub fn push_lefschetz(
    d: &BlfDiagram,
    point: &PointId,
    across: &CurveId,
    component: &ComponentId,
    cycle: Vec<i64>,
) -> Result<BlfDiagram, MoveError> {
    ensure_valid(d)?;
    let p = d
        .lefschetz
        .get(point)
        .cloned()
        .ok_or_else(|| MoveError::Unknown(point.to_string()))?;
    let fold = d
        .folds
        .get(across)
        .cloned()
        .ok_or_else(|| MoveError::Unknown(across.to_string()))?;
    if p.face != fold.low {
        return Err(MoveError::NotAdjacent(format!(
            "point {} is not in the low face of {}; pushes go to the higher side",
            point, across
        )));
    }
    let expected = match &fold.surgery {
        SurgeryDescriptor::Nonseparating(_) => p.component.clone(),
        SurgeryDescriptor::Separating(c, _, _) => {
            let (ca, cb) = derived_ids(c);
            if p.component == ca || p.component == cb {
                c.clone()
            } else {
                p.component.clone()
            }
        }
    };
    if *component != expected {
        return Err(MoveError::LiftMismatch(format!(
            "component {} does not correspond to {} across {}",
            component, p.component, across
        )));
    }
    let genus = d.faces[&fold.high]
        .genus_of(component)
        .ok_or_else(|| {
            MoveError::LiftMismatch(format!(
                "high face {} has no component {}",
                fold.high, component
            ))
        })?;
    if cycle.len() != 2 * genus as usize {
        return Err(MoveError::LiftMismatch(format!(
            "cycle length {} but component genus {}",
            cycle.len(),
            genus
        )));
    }
    let order = d
        .lefschetz
        .values()
        .filter(|q| q.face == fold.high)
        .map(|q| q.order)
        .max()
        .unwrap_or(0)
        + 1;
    let mut d2 = d.clone();
    d2.lefschetz.insert(
        point.clone(),
        LefschetzPoint { face: fold.high, component: component.clone(), order, cycle },
    );
    let report = d2.validate();
    if !report.ok() {
        return Err(MoveError::InvalidResult(report));
    }
    Ok(d2)
}

// ---------------------------------------------------------------------------
// cusp_modify

/// Trade a cusp for a Lefschetz point: the cusp's two fold arcs merge into
/// one smooth arc and a new Lefschetz point appears in `face` (the high or
/// low face of the fold) with the supplied vanishing class.
pub fn cusp_modify(
    d: &BlfDiagram,
    vertex: &VertexId,
    face: &FaceId,
    cycle: Vec<i64>,
) -> Result<BlfDiagram, MoveError> {
    ensure_valid(d)?;
    match d.arrangement.vertices.get(vertex) {
        None => return Err(MoveError::Unknown(vertex.to_string())),
        Some(VertexKind::Cusp) => {}
        Some(VertexKind::Double) => return Err(MoveError::NotACusp(vertex.clone())),
    }
    let mut incident = Vec::new();
    for slot in 0..2u8 {
        let e = d
            .arrangement
            .edges
            .iter()
            .find(|(_, ends)| ends.iter().any(|x| x.vertex == *vertex && x.slot == slot))
            .map(|(id, _)| id.clone())
            .unwrap();
        incident.push(e);
    }
    let (e0, e1) = (incident[0].clone(), incident[1].clone());
    let fold = d.folds[&e0].clone();
    if *face != fold.high && *face != fold.low {
        return Err(MoveError::PreconditionViolated(format!(
            "face {} is not incident to the cusp's fold",
            face
        )));
    }
    let comp = fold.surgery.component().clone();
    let genus = d.faces[face].genus_of(&comp).ok_or_else(|| {
        MoveError::LiftMismatch(format!("face {} has no component {}", face, comp))
    })?;
    if cycle.len() != 2 * genus as usize {
        return Err(MoveError::LiftMismatch(format!(
            "cycle length {} but component genus {}",
            cycle.len(),
            genus
        )));
    }

    let mut d2 = d.clone();
    d2.arrangement.vertices.remove(vertex);
    d2.arrangement.edges.remove(&e0);
    d2.arrangement.edges.remove(&e1);
    d2.folds.remove(&e0);
    d2.folds.remove(&e1);
    let mut curves = curve_names(&d2);
    let merged = CurveId(fresh(&mut curves, id_base(&e0.0).to_string()));
    if e0 == e1 {
        // A cusped circle closes up into a vertexless circle.
        d2.arrangement.circles.insert(merged.clone());
    } else {
        let ends0 = &d.arrangement.edges[&e0];
        let ends1 = &d.arrangement.edges[&e1];
        let far0 = ends0.iter().find(|x| x.vertex != *vertex).cloned();
        let far1 = ends1.iter().find(|x| x.vertex != *vertex).cloned();
        match (far0, far1) {
            (Some(a), Some(b)) => {
                d2.arrangement.edges.insert(merged.clone(), edge2(a, b));
            }
            _ => {
                return Err(MoveError::PreconditionViolated(
                    "cusp arcs do not leave the vertex".into(),
                ))
            }
        }
    }
    d2.folds.insert(merged, fold.clone());
    let mut points: BTreeSet<String> =
        d2.lefschetz.keys().map(|p| p.0.clone()).collect();
    let pid = PointId(fresh(&mut points, format!("{}#p", vertex)));
    let order = d2
        .lefschetz
        .values()
        .filter(|q| q.face == *face)
        .map(|q| q.order)
        .max()
        .unwrap_or(0)
        + 1;
    d2.lefschetz.insert(
        pid,
        LefschetzPoint { face: face.clone(), component: comp, order, cycle },
    );
    let report = d2.validate();
    if !report.ok() {
        return Err(MoveError::InvalidResult(report));
    }
    Ok(d2)
}

// ---------------------------------------------------------------------------
// flip

/// Kink a fold curve into a self-crossing loop poking into its high face:
/// one new double vertex, a loop face of one genus higher, and two new
/// Lefschetz points in the loop face (the flip's two cusps, traded
/// immediately). `surgery` decorates the new loop fold; the loop fiber is
/// forced by it. Preserves the Euler characteristic.
pub fn flip(
    d: &BlfDiagram,
    curve: &CurveId,
    surgery: &SurgeryDescriptor,
    cycles: &[Vec<i64>; 2],
) -> Result<BlfDiagram, MoveError> {
    ensure_valid(d)?;
    let fold = d
        .folds
        .get(curve)
        .cloned()
        .ok_or_else(|| MoveError::Unknown(curve.to_string()))?;
    let h = fold.high.clone();
    let loop_fiber = unapply_surgery(&d.faces[&h], surgery)?;
    let comp = surgery.component().clone();
    let genus = loop_fiber.genus_of(&comp).ok_or_else(|| {
        MoveError::LiftMismatch(format!("loop fiber has no component {}", comp))
    })?;
    for cy in cycles {
        if cy.len() != 2 * genus as usize {
            return Err(MoveError::LiftMismatch(format!(
                "cycle length {} but loop component genus {}",
                cy.len(),
                genus
            )));
        }
    }

    let mut curves = curve_names(d);
    curves.remove(&curve.0);
    let zl = CurveId(fresh(&mut curves, format!("{}#l", curve)));
    let mut vnames: BTreeSet<String> =
        d.arrangement.vertices.keys().map(|v| v.0.clone()).collect();
    let v = VertexId(fresh(&mut vnames, "w0".into()));
    let mut fnames: BTreeSet<String> =
        d.faces.keys().map(|f| f.0.clone()).collect();
    let loop_face = FaceId(fresh(&mut fnames, format!("{}#L", curve)));
    let mut points: BTreeSet<String> =
        d.lefschetz.keys().map(|p| p.0.clone()).collect();
    let p0 = PointId(fresh(&mut points, format!("{}#p0", curve)));
    let p1 = PointId(fresh(&mut points, format!("{}#p1", curve)));

    let is_circle = d.arrangement.circles.contains(curve);
    let ends = d.arrangement.edges.get(curve).cloned();
    let swaps: &[bool] = if is_circle { &[false] } else { &[false, true] };
    let end = |slot: u8| EdgeEnd { vertex: v.clone(), slot };
    let mut last_report = None;
    for &swap in swaps {
        let mut d2 = d.clone();
        let arr = &mut d2.arrangement;
        arr.edges.remove(curve);
        arr.circles.remove(curve);
        arr.vertices.insert(v.clone(), VertexKind::Double);
        arr.edges.insert(zl.clone(), edge2(end(1), end(2)));
        let mut rest_ids = Vec::new();
        if let Some(ends) = &ends {
            let (a, b) = if swap {
                (ends[1].clone(), ends[0].clone())
            } else {
                (ends[0].clone(), ends[1].clone())
            };
            let mut cs = curve_names(&d2);
            let za = CurveId(fresh(&mut cs, format!("{}#a", curve)));
            let zc = CurveId(fresh(&mut cs, format!("{}#c", curve)));
            d2.arrangement.edges.insert(za.clone(), edge2(a, end(0)));
            d2.arrangement.edges.insert(zc.clone(), edge2(end(3), b));
            rest_ids.push(za);
            rest_ids.push(zc);
        } else {
            let mut cs = curve_names(&d2);
            let zr = CurveId(fresh(&mut cs, format!("{}#r", curve)));
            d2.arrangement.edges.insert(zr.clone(), edge2(end(0), end(3)));
            rest_ids.push(zr);
        }
        d2.folds.remove(curve);
        for rid in &rest_ids {
            d2.folds.insert(rid.clone(), fold.clone());
        }
        d2.folds.insert(
            zl.clone(),
            Fold { high: loop_face.clone(), low: h.clone(), surgery: surgery.clone() },
        );
        d2.faces.insert(loop_face.clone(), loop_fiber.clone());
        d2.lefschetz.insert(
            p0.clone(),
            LefschetzPoint {
                face: loop_face.clone(),
                component: comp.clone(),
                order: 1,
                cycle: cycles[0].clone(),
            },
        );
        d2.lefschetz.insert(
            p1.clone(),
            LefschetzPoint {
                face: loop_face.clone(),
                component: comp.clone(),
                order: 2,
                cycle: cycles[1].clone(),
            },
        );
        let report = d2.validate();
        if report.ok() {
            return Ok(d2);
        }
        last_report = Some(report);
    }
    Err(MoveError::InvalidResult(last_report.unwrap()))
}

// ---------------------------------------------------------------------------
// blow-up / blow-down

/// Convert a pencil diagram (m base points) to a fibration diagram with m
/// section markers. The recorded offset makes the pencil's total-space
/// Euler characteristic recoverable as euler(blow_up(d)) − m.
pub fn blow_up(d: &BlfDiagram) -> Result<BlfDiagram, MoveError> {
    if d.basepoints == 0 {
        return Err(MoveError::NotAPencil);
    }
    let mut d2 = d.clone();
    d2.sections += d.basepoints;
    d2.basepoints = 0;
    Ok(d2)
}

/// Inverse of blow_up.
pub fn blow_down(d: &BlfDiagram) -> Result<BlfDiagram, MoveError> {
    if d.sections == 0 {
        return Err(MoveError::NoSections);
    }
    let mut d2 = d.clone();
    d2.basepoints += d.sections;
    d2.sections = 0;
    Ok(d2)
}

// ---------------------------------------------------------------------------
// scripts, slip, connect_fibers

/// One scripted move invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MoveCmd {
    Slide { arc: CurveId, over: Vec<CurveId> },
    R2(FaceId),
    Push { point: PointId, across: CurveId, component: ComponentId, cycle: Vec<i64> },
    Cusp { vertex: VertexId, face: FaceId, cycle: Vec<i64> },
    Flip { curve: CurveId, surgery: SurgeryDescriptor, cycles: Box<[Vec<i64>; 2]> },
    BlowUp,
    BlowDown,
    Connect,
}

pub fn apply_cmd(d: &BlfDiagram, cmd: &MoveCmd) -> Result<BlfDiagram, MoveError> {
    match cmd {
        MoveCmd::Slide { arc, over } => slide_arc(d, arc, over),
        MoveCmd::R2(face) => r2_remove(d, face),
        MoveCmd::Push { point, across, component, cycle } => {
            push_lefschetz(d, point, across, component, cycle.clone())
        }
        MoveCmd::Cusp { vertex, face, cycle } => {
            cusp_modify(d, vertex, face, cycle.clone())
        }
        MoveCmd::Flip { curve, surgery, cycles } => flip(d, curve, surgery, cycles),
        MoveCmd::BlowUp => blow_up(d),
        MoveCmd::BlowDown => blow_down(d),
        MoveCmd::Connect => connect_fibers(d),
    }
}

pub fn apply_script(d: &BlfDiagram, cmds: &[MoveCmd]) -> Result<BlfDiagram, MoveError> {
    let mut cur = d.clone();
    for cmd in cmds {
        cur = apply_cmd(&cur, cmd)?;
    }
    Ok(cur)
}

/// A slip is a long slide: a sequence of slide / bigon-removal steps, each
/// individually legal. Every intermediate diagram validates; the empty slip
/// is the identity.
pub fn slip(d: &BlfDiagram, steps: &[MoveCmd]) -> Result<BlfDiagram, MoveError> {
    for step in steps {
        if !matches!(step, MoveCmd::Slide { .. } | MoveCmd::R2(_)) {
            return Err(MoveError::PreconditionViolated(
                "slip steps must be slides or bigon removals".into(),
            ));
        }
    }
    apply_script(d, steps)
}

/// The flip-and-slip pipeline connecting a disconnected fiber.
///
/// Input: embedded connected round image (a single vertexless circle) whose
/// fold splits a connected genus g1+g2 outer fiber into an inner Σ_{g1} ⊔
/// Σ_{g2}. Output: a single circle whose inner fiber is the connected
/// Σ_{g1+g2+1} containing four new Lefschetz points; Euler characteristic
/// is preserved (= 6 − 4(g1+g2)).
pub fn connect_fibers(d: &BlfDiagram) -> Result<BlfDiagram, MoveError> {
    Ok(connect_fibers_traced(d)?.pop().unwrap().1)
}

/// As connect_fibers, returning every stage with a label. The final stage
/// (the slip across the double-crossing configuration) is performed as one
/// validated rewrite.
pub fn connect_fibers_traced(
    d: &BlfDiagram,
) -> Result<Vec<(String, BlfDiagram)>, MoveError> {
    ensure_valid(d)?;
    // Shape checks.
    if d.basepoints > 0 {
        return Err(MoveError::PreconditionViolated("pencil: blow up first".into()));
    }
    if !d.arrangement.vertices.is_empty() || !d.arrangement.edges.is_empty() {
        return Err(MoveError::PreconditionViolated(
            "round image must be embedded (no vertices)".into(),
        ));
    }
    if d.arrangement.circles.len() != 1 {
        return Err(MoveError::PreconditionViolated(format!(
            "round locus must be a single circle (got {})",
            d.arrangement.circles.len()
        )));
    }
    if !d.lefschetz.is_empty() {
        return Err(MoveError::PreconditionViolated(
            "expected the bare two-region configuration without lefschetz points"
                .into(),
        ));
    }
    let z = d.arrangement.circles.iter().next().unwrap().clone();
    let fold = d.folds[&z].clone();
    let (c, g1, g2) = match &fold.surgery {
        SurgeryDescriptor::Separating(c, g1, g2) => (c.clone(), *g1, *g2),
        _ => {
            return Err(MoveError::PreconditionViolated(
                "the fold must carry a separating surgery".into(),
            ))
        }
    };
    let big_g = g1 + g2;
    let outer = fold.high.clone();
    let inner = fold.low.clone();
    if d.faces[&outer].component_count() != 1 {
        return Err(MoveError::PreconditionViolated(
            "outer fiber must be connected".into(),
        ));
    }
    let start_euler = d.euler_characteristic().expect("validated fibration");

    // Vanishing cycles for the four new Lefschetz points: standard basis
    // classes in the genus g1+g2+1 loop fiber.
    let dim = 2 * (big_g + 1) as usize;
    let basis = |i: usize| {
        let mut v = vec![0i64; dim];
        v[i] = 1;
        v
    };
    let cyc01 = [basis(0), basis(1)];
    let cyc23 = [basis(0), basis(1)];

    let mut stages = Vec::new();
    let d1 = flip(d, &z, &SurgeryDescriptor::nonseparating(c.clone()), &cyc01)?;
    stages.push(("flip".to_string(), d1.clone()));
    let zr = CurveId(format!("{}#r", z));
    let d2 = flip(&d1, &zr, &SurgeryDescriptor::nonseparating(c.clone()), &cyc23)?;
    stages.push(("flip".to_string(), d2.clone()));

    // The slip: the long slide of Fig-5 type collapsing the two crossings.
    // Performed as a single validated rewrite; the two loop regions and the
    // split inner region merge into one connected inner fiber.
    let mut d3 = BlfDiagram {
        basepoints: d.basepoints,
        sections: d.sections,
        ..Default::default()
    };
    d3.arrangement.circles.insert(z.clone());
    d3.faces.insert(outer.clone(), d.faces[&outer].clone());
    let mut inner_fiber = d.faces[&outer].clone();
    inner_fiber = unapply_surgery(&inner_fiber, &SurgeryDescriptor::nonseparating(c.clone()))?;
    d3.faces.insert(inner.clone(), inner_fiber);
    d3.folds.insert(
        z.clone(),
        Fold {
            high: inner.clone(),
            low: outer.clone(),
            surgery: SurgeryDescriptor::nonseparating(c.clone()),
        },
    );
    for (i, (pid, p)) in d2.lefschetz.iter().enumerate() {
        d3.lefschetz.insert(
            pid.clone(),
            LefschetzPoint {
                face: inner.clone(),
                component: c.clone(),
                order: i as i64 + 1,
                cycle: p.cycle.clone(),
            },
        );
    }
    let report = d3.validate();
    if !report.ok() {
        return Err(MoveError::InvalidResult(report));
    }
    let end_euler = d3.euler_characteristic().expect("validated");
    if end_euler != start_euler || end_euler != 6 - 4 * big_g as i64 {
        return Err(MoveError::PreconditionViolated(format!(
            "euler drifted: start {}, end {}, expected {}",
            start_euler,
            end_euler,
            6 - 4 * big_g as i64
        )));
    }
    stages.push(("slip".to_string(), d3));
    Ok(stages)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fiber::FiberDescription;

    /// Root face `r` with two circles inside: `s` bounding a genus k+1 face
    /// `fa` (arrow out of `fa` into `r`) and `t` bounding `fb`.
    fn concentric(k: u32, case_ii: bool) -> BlfDiagram {
        let mut d = BlfDiagram::default();
        d.arrangement.circles.insert(CurveId::from("s"));
        d.arrangement.circles.insert(CurveId::from("t"));
        d.faces.insert(FaceId::from("r"), FiberDescription::connected("c0", k));
        d.faces
            .insert(FaceId::from("fa"), FiberDescription::connected("c0", k + 1));
        d.folds.insert(
            CurveId::from("s"),
            Fold {
                high: FaceId::from("fa"),
                low: FaceId::from("r"),
                surgery: SurgeryDescriptor::nonseparating("c0"),
            },
        );
        if case_ii {
            d.faces
                .insert(FaceId::from("fb"), FiberDescription::connected("c0", k + 1));
            d.folds.insert(
                CurveId::from("t"),
                Fold {
                    high: FaceId::from("fb"),
                    low: FaceId::from("r"),
                    surgery: SurgeryDescriptor::nonseparating("c0"),
                },
            );
        } else {
            d.faces
                .insert(FaceId::from("fb"), FiberDescription::connected("c0", k - 1));
            d.folds.insert(
                CurveId::from("t"),
                Fold {
                    high: FaceId::from("r"),
                    low: FaceId::from("fb"),
                    surgery: SurgeryDescriptor::nonseparating("c0"),
                },
            );
        }
        d
    }

    #[test]
    fn slide_roundtrip_case_i() {
        let d = concentric(2, false);
        assert!(d.validate().ok());
        let e = d.euler_characteristic().unwrap();
        let slid = slide_arc(&d, &CurveId::from("s"), &[CurveId::from("t")]).unwrap();
        assert!(slid.validate().ok());
        assert_eq!(slid.euler_characteristic().unwrap(), e);
        assert_eq!(slid.double_count(), 2);
        let lens = FaceId::from("s+t");
        assert!(slid.faces.contains_key(&lens));
        let back = r2_remove(&slid, &lens).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn slide_roundtrip_case_ii() {
        let d = concentric(1, true);
        let e = d.euler_characteristic().unwrap();
        let slid = slide_arc(&d, &CurveId::from("s"), &[CurveId::from("t")]).unwrap();
        assert!(slid.validate().ok());
        assert_eq!(slid.euler_characteristic().unwrap(), e);
        let back = r2_remove(&slid, &FaceId::from("s+t")).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn slide_against_arrow_rejected() {
        // t bounds only the high face of s: sliding would go against s's
        // arrow.
        let mut d = concentric(2, false);
        // Move t inside fa: fold t between fa and fb.
        d.folds.insert(
            CurveId::from("t"),
            Fold {
                high: FaceId::from("fa"),
                low: FaceId::from("fb"),
                surgery: SurgeryDescriptor::nonseparating("c0"),
            },
        );
        d.faces
            .insert(FaceId::from("fb"), FiberDescription::connected("c0", 2));
        assert!(d.validate().ok());
        match slide_arc(&d, &CurveId::from("s"), &[CurveId::from("t")]) {
            Err(MoveError::ArrowViolation(_)) => {}
            other => panic!("unexpected: {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn empty_slide_is_identity() {
        let d = concentric(1, false);
        assert_eq!(slide_arc(&d, &CurveId::from("s"), &[]).unwrap(), d);
    }

    fn s4_like() -> BlfDiagram {
        let mut d = BlfDiagram::default();
        d.arrangement.circles.insert(CurveId::from("z0"));
        d.faces.insert(FaceId::from("inner"), FiberDescription::connected("c0", 1));
        d.faces.insert(FaceId::from("outer"), FiberDescription::connected("c0", 0));
        d.folds.insert(
            CurveId::from("z0"),
            Fold {
                high: FaceId::from("inner"),
                low: FaceId::from("outer"),
                surgery: SurgeryDescriptor::nonseparating("c0"),
            },
        );
        d
    }

    #[test]
    fn flip_preserves_euler() {
        let d = s4_like();
        assert_eq!(d.euler_characteristic().unwrap(), 2);
        let flipped = flip(
            &d,
            &CurveId::from("z0"),
            &SurgeryDescriptor::nonseparating("c0"),
            &[vec![1, 0, 0, 0], vec![0, 1, 0, 0]],
        )
        .unwrap();
        assert!(flipped.validate().ok());
        assert_eq!(flipped.euler_characteristic().unwrap(), 2);
        assert_eq!(flipped.double_count(), 1);
        assert_eq!(flipped.lefschetz_count(), 2);
    }

    fn cusped(g: u32) -> BlfDiagram {
        let mut d = BlfDiagram::default();
        d.arrangement
            .vertices
            .insert(VertexId::from("k0"), VertexKind::Cusp);
        d.arrangement.edges.insert(
            CurveId::from("e0"),
            [
                EdgeEnd { vertex: VertexId::from("k0"), slot: 0 },
                EdgeEnd { vertex: VertexId::from("k0"), slot: 1 },
            ],
        );
        d.faces
            .insert(FaceId::from("in"), FiberDescription::connected("c0", g + 1));
        d.faces.insert(FaceId::from("out"), FiberDescription::connected("c0", g));
        d.folds.insert(
            CurveId::from("e0"),
            Fold {
                high: FaceId::from("in"),
                low: FaceId::from("out"),
                surgery: SurgeryDescriptor::nonseparating("c0"),
            },
        );
        d
    }

    #[test]
    fn cusp_trade_counts_and_euler() {
        let d = cusped(1);
        assert!(d.validate().ok());
        let e = d.euler_characteristic().unwrap();
        let traded =
            cusp_modify(&d, &VertexId::from("k0"), &FaceId::from("in"), vec![1, 0, 0, 0])
                .unwrap();
        assert_eq!(traded.cusp_count(), 0);
        assert_eq!(traded.lefschetz_count(), 1);
        assert_eq!(traded.euler_characteristic().unwrap(), e);
        assert!(traded.arrangement.circles.contains(&CurveId::from("e0")));
    }

    #[test]
    fn cusp_modify_on_double_rejected() {
        let d = concentric(2, false);
        let slid = slide_arc(&d, &CurveId::from("s"), &[CurveId::from("t")]).unwrap();
        let v = slid.arrangement.vertices.keys().next().unwrap().clone();
        assert!(matches!(
            cusp_modify(&slid, &v, &FaceId::from("r"), vec![]),
            Err(MoveError::NotACusp(_))
        ));
    }

    #[test]
    fn push_lefschetz_to_higher_side() {
        let mut d = s4_like();
        d.lefschetz.insert(
            PointId::from("p0"),
            LefschetzPoint {
                face: FaceId::from("outer"),
                component: ComponentId::from("c0"),
                order: 1,
                cycle: vec![],
            },
        );
        assert!(d.validate().ok());
        let e = d.euler_characteristic().unwrap();
        let pushed = push_lefschetz(
            &d,
            &PointId::from("p0"),
            &CurveId::from("z0"),
            &ComponentId::from("c0"),
            vec![1, 0],
        )
        .unwrap();
        assert_eq!(pushed.lefschetz[&PointId::from("p0")].face, FaceId::from("inner"));
        assert_eq!(pushed.euler_characteristic().unwrap(), e);
        // Pushing again from the high side is not allowed.
        assert!(matches!(
            push_lefschetz(
                &pushed,
                &PointId::from("p0"),
                &CurveId::from("z0"),
                &ComponentId::from("c0"),
                vec![],
            ),
            Err(MoveError::NotAdjacent(_))
        ));
    }

    fn fig5(g1: u32, g2: u32) -> BlfDiagram {
        let mut d = BlfDiagram::default();
        d.arrangement.circles.insert(CurveId::from("z0"));
        let surgery = SurgeryDescriptor::separating("c0", g1, g2);
        let outer = FiberDescription::connected("c0", g1 + g2);
        let inner = apply_surgery(&outer, &surgery).unwrap();
        d.faces.insert(FaceId::from("outer"), outer);
        d.faces.insert(FaceId::from("inner"), inner);
        d.folds.insert(
            CurveId::from("z0"),
            Fold { high: FaceId::from("outer"), low: FaceId::from("inner"), surgery },
        );
        d
    }

    #[test]
    fn connect_fibers_pipeline() {
        for (g1, g2) in [(0u32, 0u32), (1, 0), (1, 2)] {
            let d = fig5(g1, g2);
            assert!(d.validate().ok());
            let g = g1 + g2;
            assert_eq!(d.euler_characteristic().unwrap(), 6 - 4 * g as i64);
            assert!(!d.connectivity_report().unwrap().all_connected);
            let stages = connect_fibers_traced(&d).unwrap();
            assert_eq!(stages.len(), 3);
            // Intermediate: two double points, four lefschetz points.
            let mid = &stages[1].1;
            assert_eq!(mid.double_count(), 2);
            assert_eq!(mid.lefschetz_count(), 4);
            let out = &stages[2].1;
            assert!(out.connectivity_report().unwrap().all_connected);
            assert_eq!(out.double_count(), 0);
            assert_eq!(out.lefschetz_count(), 4);
            assert_eq!(
                out.faces[&FaceId::from("inner")].genus_of(&ComponentId::from("c0")),
                Some(g + 1)
            );
            assert_eq!(out.euler_characteristic().unwrap(), 6 - 4 * g as i64);
        }
    }

    #[test]
    fn connect_fibers_rejects_disconnected_round_locus() {
        let mut d = fig5(1, 1);
        // A second circle disconnects the round locus.
        d.arrangement.circles.insert(CurveId::from("z1"));
        d.faces.insert(
            FaceId::from("deep"),
            FiberDescription::new(vec![
                (ComponentId::from("c0a"), 0),
                (ComponentId::from("c0b"), 1),
            ])
            .unwrap(),
        );
        d.folds.insert(
            CurveId::from("z1"),
            Fold {
                high: FaceId::from("inner"),
                low: FaceId::from("deep"),
                surgery: SurgeryDescriptor::nonseparating("c0a"),
            },
        );
        assert!(d.validate().ok());
        assert!(matches!(
            connect_fibers(&d),
            Err(MoveError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn blow_up_down_roundtrip() {
        for m in [1u32, 2, 5] {
            let mut d = s4_like();
            d.basepoints = m;
            let up = blow_up(&d).unwrap();
            assert_eq!(up.basepoints, 0);
            assert_eq!(up.sections, m);
            assert!(up.euler_characteristic().is_ok());
            assert_eq!(blow_down(&up).unwrap(), d);
        }
        assert!(matches!(blow_up(&s4_like()), Err(MoveError::NotAPencil)));
        assert!(matches!(blow_down(&s4_like()), Err(MoveError::NoSections)));
    }

    #[test]
    fn slip_is_scripted_slides() {
        let d = concentric(2, false);
        let steps = vec![
            MoveCmd::Slide { arc: CurveId::from("s"), over: vec![CurveId::from("t")] },
            MoveCmd::R2(FaceId::from("s+t")),
        ];
        assert_eq!(slip(&d, &steps).unwrap(), d);
        assert_eq!(slip(&d, &[]).unwrap(), d);
        assert!(matches!(
            slip(&d, &[MoveCmd::BlowUp]),
            Err(MoveError::PreconditionViolated(_))
        ));
    }
}
