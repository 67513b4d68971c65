//! The decorated diagram: arrangement + fiber per face + fold data per
//! curve + Lefschetz points, with validation and the numeric invariants.
//!
//! Euler characteristic of the total space, stratum by stratum (compactly
//! supported Euler characteristics, so everything adds):
//!
//!   e(X) = sum over faces   chi_c(face) * chi(F_face)
//!        + #Lefschetz points
//!        - sum over open arcs (chi(F_high) + 1)
//!        + sum over doubles   (chi(F_oo) + 2)
//!        + sum over cusps     chi(F_low)
//!
//! where chi_c(face) = 2 - #boundary circuits, open arcs are the edges
//! between vertices (vertexless circles contribute 0), and F_oo is the
//! fiber over the quadrant at a double point whose both arrows point out.
//! The cusp value chi(F_low) is forced by invariance under the cusp trade:
//! trading a cusp for a Lefschetz point merges two arcs into one, changing
//! the total by (chi(F_high) + 1) + 1 - chi(F_low), which vanishes exactly
//! because chi(F_low) = chi(F_high) + 2 across a fold.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::arrangement::{ArrangementMap, Dart, Trace, VertexKind};
use crate::fiber::{apply_surgery, FiberDescription, SurgeryDescriptor};
use crate::ids::{ComponentId, CurveId, FaceId, PointId, VertexId};
use crate::mcg::{Handedness, HomologyClass, TwistWord};

/// Fold decoration of an edge or circle: the two incident faces with the
/// arrow pointing from `high` to `low`, and the fiberwise surgery performed
/// when crossing in the arrow direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fold {
    pub high: FaceId,
    pub low: FaceId,
    pub surgery: SurgeryDescriptor,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LefschetzPoint {
    pub face: FaceId,
    pub component: ComponentId,
    /// Position in the monodromy factorization; larger order = attached
    /// later = further left in the twist word.
    pub order: i64,
    /// Vanishing cycle in H_1 of the component, length 2*genus (empty for
    /// sphere components; a zero cycle is flagged as a warning).
    pub cycle: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BlfDiagram {
    pub arrangement: ArrangementMap,
    pub faces: BTreeMap<FaceId, FiberDescription>,
    pub folds: BTreeMap<CurveId, Fold>,
    pub lefschetz: BTreeMap<PointId, LefschetzPoint>,
    /// Base points of a pencil; positive means the diagram is a pencil and
    /// has no honest Euler characteristic until blown up.
    pub basepoints: u32,
    /// Section markers recorded by blow-ups.
    pub sections: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub code: &'static str,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.code, self.message)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "violation: {}", v)?;
        }
        for w in &self.warnings {
            writeln!(f, "warning: {}", w)?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum DiagramError {
    #[error("diagram is not valid:\n{0}")]
    Invalid(ValidationReport),
    #[error("diagram is a pencil ({0} base points); blow up first")]
    IsPencil(u32),
    #[error("unknown stratum {0}")]
    UnknownStratum(String),
    #[error("monodromy: {0}")]
    Monodromy(String),
}

/// Traced circuits together with the derived circuit -> face grouping.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub trace: Trace,
    /// face of each circuit (indexed like trace.circuits)
    pub face_of_circuit: Vec<FaceId>,
    pub circuits_of_face: BTreeMap<FaceId, Vec<usize>>,
}

impl Analysis {
    pub fn face_count(&self) -> usize {
        self.circuits_of_face.len()
    }

    /// The two side circuits of a fold curve, in dart order.
    pub fn sides_of(&self, d: &BlfDiagram, id: &CurveId) -> (usize, usize) {
        if d.arrangement.circles.contains(id) {
            (
                self.trace.circuit_of[&Dart::Side { circle: id.clone(), side: 0 }],
                self.trace.circuit_of[&Dart::Side { circle: id.clone(), side: 1 }],
            )
        } else {
            (
                self.trace.circuit_of[&Dart::Arc { edge: id.clone(), origin: 0 }],
                self.trace.circuit_of[&Dart::Arc { edge: id.clone(), origin: 1 }],
            )
        }
    }
}

/// Per-face connectivity data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectivityReport {
    pub per_face: BTreeMap<FaceId, bool>,
    pub all_connected: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stratum {
    Face(FaceId),
    Fold(CurveId),
    Vertex(VertexId),
    Lefschetz(PointId),
}

impl BlfDiagram {
    /// Trace circuits and derive the circuit -> face assignment from the
    /// fold labels. Structural problems and inconsistent labellings come
    /// back as violations.
    pub fn analyze(&self) -> Result<Analysis, Vec<Violation>> {
        let mut violations = Vec::new();
        let trace = match self.arrangement.trace() {
            Ok(t) => t,
            Err(e) => {
                violations.push(Violation {
                    code: "V1",
                    message: format!("arrangement: {}", e),
                });
                return Err(violations);
            }
        };

        // Every curve needs a fold; every fold needs a curve.
        for id in self.arrangement.curve_ids() {
            if !self.folds.contains_key(id) {
                violations.push(Violation {
                    code: "V2",
                    message: format!("curve {}: missing fold record", id),
                });
            }
        }
        for id in self.folds.keys() {
            if !self.arrangement.edges.contains_key(id)
                && !self.arrangement.circles.contains(id)
            {
                violations.push(Violation {
                    code: "V2",
                    message: format!("fold {}: no such edge or circle", id),
                });
            }
        }
        if !violations.is_empty() {
            return Err(violations);
        }

        // Constraint propagation: each curve's two side circuits carry its
        // {high, low} pair of face names.
        let n = trace.circuits.len();
        let mut assignment: Vec<Option<FaceId>> = vec![None; n];
        let curves: Vec<CurveId> = self.folds.keys().cloned().collect();
        let analysis_stub = Analysis {
            trace: trace.clone(),
            face_of_circuit: Vec::new(),
            circuits_of_face: BTreeMap::new(),
        };
        let sides: BTreeMap<CurveId, (usize, usize)> = curves
            .iter()
            .map(|c| (c.clone(), analysis_stub.sides_of(self, c)))
            .collect();

        for (id, fold) in &self.folds {
            if fold.high == fold.low {
                violations.push(Violation {
                    code: "V2",
                    message: format!(
                        "fold {}: high and low faces are both {}",
                        id, fold.high
                    ),
                });
            }
            let (sa, sb) = sides[id];
            if sa == sb {
                violations.push(Violation {
                    code: "V2",
                    message: format!(
                        "curve {}: the same face lies on both sides",
                        id
                    ),
                });
            }
        }
        if !violations.is_empty() {
            return Err(violations);
        }

        // Group circuits into propagation components: circuits linked by a
        // shared curve must be labelled together. Each component admits two
        // candidate labellings (the fold data cannot see a reflection of
        // the component), so both seeds are tried.
        let mut comp_of: Vec<usize> = (0..n).collect();
        fn root(comp_of: &mut [usize], mut i: usize) -> usize {
            while comp_of[i] != i {
                comp_of[i] = comp_of[comp_of[i]];
                i = comp_of[i];
            }
            i
        }
        for id in &curves {
            let (sa, sb) = sides[id];
            let (ra, rb) = (root(&mut comp_of, sa), root(&mut comp_of, sb));
            comp_of[ra] = rb;
        }
        let mut curves_of_comp: BTreeMap<usize, Vec<&CurveId>> = BTreeMap::new();
        for id in &curves {
            let r = root(&mut comp_of, sides[id].0);
            curves_of_comp.entry(r).or_default().push(id);
        }

        for comp_curves in curves_of_comp.values() {
            let mut chosen: Option<Vec<(usize, FaceId)>> = None;
            'orient: for flip in [false, true] {
                let mut local: BTreeMap<usize, FaceId> = BTreeMap::new();
                let seed = comp_curves[0];
                let fold = &self.folds[seed];
                let (sa, sb) = sides[seed];
                let (fa, fb) = if flip {
                    (fold.low.clone(), fold.high.clone())
                } else {
                    (fold.high.clone(), fold.low.clone())
                };
                local.insert(sa, fa);
                local.insert(sb, fb);
                loop {
                    let mut progress = false;
                    for id in comp_curves {
                        let fold = &self.folds[id];
                        let (sa, sb) = sides[id];
                        let pair = [
                            (sa, sb, &fold.high, &fold.low),
                            (sb, sa, &fold.low, &fold.high),
                            (sa, sb, &fold.low, &fold.high),
                            (sb, sa, &fold.high, &fold.low),
                        ];
                        for (x, y, fx, fy) in pair {
                            if local.get(&x) == Some(fx) && !local.contains_key(&y) {
                                local.insert(y, fy.clone());
                                progress = true;
                            }
                        }
                    }
                    if !progress {
                        break;
                    }
                }
                for id in comp_curves {
                    let fold = &self.folds[id];
                    let (sa, sb) = sides[id];
                    let ok = matches!(
                        (local.get(&sa), local.get(&sb)),
                        (Some(a), Some(b))
                            if (*a == fold.high && *b == fold.low)
                                || (*a == fold.low && *b == fold.high)
                    );
                    if !ok {
                        continue 'orient;
                    }
                }
                chosen = Some(local.into_iter().collect());
                break;
            }
            match chosen {
                Some(pairs) => {
                    for (i, f) in pairs {
                        assignment[i] = Some(f);
                    }
                }
                None => {
                    for id in comp_curves {
                        let fold = &self.folds[id];
                        violations.push(Violation {
                            code: "V2",
                            message: format!(
                                "curve {}: traced faces do not match fold faces {}/{}",
                                id, fold.high, fold.low
                            ),
                        });
                    }
                }
            }
        }
        if !violations.is_empty() {
            return Err(violations);
        }

        let face_of_circuit: Vec<FaceId> =
            assignment.into_iter().map(|f| f.unwrap()).collect();
        let mut circuits_of_face: BTreeMap<FaceId, Vec<usize>> = BTreeMap::new();
        for (i, f) in face_of_circuit.iter().enumerate() {
            circuits_of_face.entry(f.clone()).or_default().push(i);
        }

        // Declared faces must be exactly the traced ones — except for the
        // empty arrangement, which has one declared face and no circuits.
        if self.arrangement.is_empty() {
            if self.faces.len() != 1 {
                violations.push(Violation {
                    code: "V1",
                    message: format!(
                        "empty arrangement must declare exactly one face (got {})",
                        self.faces.len()
                    ),
                });
            } else {
                let only = self.faces.keys().next().unwrap().clone();
                circuits_of_face.entry(only).or_default();
            }
        } else {
            for f in self.faces.keys() {
                if !circuits_of_face.contains_key(f) {
                    violations.push(Violation {
                        code: "V2",
                        message: format!("declared face {} is not traced", f),
                    });
                }
            }
            for f in circuits_of_face.keys() {
                if !self.faces.contains_key(f) {
                    violations.push(Violation {
                        code: "V2",
                        message: format!("traced face {} is not declared", f),
                    });
                }
            }
        }
        if !violations.is_empty() {
            return Err(violations);
        }

        // Sphere condition for the whole (possibly disconnected) diagram:
        // V - E + F = 1 + C.
        let v = self.arrangement.vertices.len() as i64;
        let e = self.arrangement.edges.len() as i64;
        let f = circuits_of_face.len() as i64;
        let c = trace.components as i64;
        if v - e + f != 1 + c {
            violations.push(Violation {
                code: "V1",
                message: format!(
                    "not a sphere: V - E + F = {} but 1 + C = {}",
                    v - e + f,
                    1 + c
                ),
            });
            return Err(violations);
        }

        Ok(Analysis { trace, face_of_circuit, circuits_of_face })
    }

    /// Full validation, rules V1-V7. Zero vanishing cycles and
    /// null-homotopic (genus 0+0 separating) folds are warnings only.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let analysis = match self.analyze() {
            Ok(a) => a,
            Err(vs) => {
                report.violations = vs;
                return report;
            }
        };

        // V7: all declared fibers are non-empty by construction of
        // FiberDescription; nothing can violate it past parsing, but keep
        // the check for diagrams assembled in code.
        for (fid, fiber) in &self.faces {
            if fiber.component_count() == 0 {
                report.violations.push(Violation {
                    code: "V7",
                    message: format!("face {}: empty fiber", fid),
                });
            }
        }

        // V3: each fold's surgery maps the high fiber to the low fiber.
        for (id, fold) in &self.folds {
            let (high, low) = match (self.faces.get(&fold.high), self.faces.get(&fold.low)) {
                (Some(h), Some(l)) => (h, l),
                _ => {
                    report.violations.push(Violation {
                        code: "V3",
                        message: format!("fold {}: undeclared face", id),
                    });
                    continue;
                }
            };
            match apply_surgery(high, &fold.surgery) {
                Ok(f) if &f == low => {}
                Ok(f) => report.violations.push(Violation {
                    code: "V3",
                    message: format!(
                        "fold {}: surgery gives {} but low fiber is {}",
                        id, f, low
                    ),
                }),
                Err(e) => report.violations.push(Violation {
                    code: "V3",
                    message: format!("fold {}: {}", id, e),
                }),
            }
            if let SurgeryDescriptor::Separating(_, 0, 0) = fold.surgery {
                report.warnings.push(format!(
                    "fold {}: separating 0+0 surgery (null-homotopic vanishing circle)",
                    id
                ));
            }
        }

        // V4/V5: local conditions at vertices.
        let slot_edges = self.slot_edge_table();
        for (vid, kind) in &self.arrangement.vertices {
            match kind {
                VertexKind::Double => {
                    self.check_double(vid, &analysis, &slot_edges, &mut report)
                }
                VertexKind::Cusp => {
                    self.check_cusp(vid, &analysis, &slot_edges, &mut report)
                }
            }
        }

        // V6: Lefschetz points.
        let mut orders: BTreeMap<&FaceId, BTreeSet<i64>> = BTreeMap::new();
        for (pid, p) in &self.lefschetz {
            let fiber = match self.faces.get(&p.face) {
                Some(f) => f,
                None => {
                    report.violations.push(Violation {
                        code: "V6",
                        message: format!("lefschetz {}: unknown face {}", pid, p.face),
                    });
                    continue;
                }
            };
            match fiber.genus_of(&p.component) {
                None => report.violations.push(Violation {
                    code: "V6",
                    message: format!(
                        "lefschetz {}: face {} has no component {}",
                        pid, p.face, p.component
                    ),
                }),
                Some(g) => {
                    if p.cycle.len() != 2 * g as usize {
                        report.violations.push(Violation {
                            code: "V6",
                            message: format!(
                                "lefschetz {}: cycle length {} but component genus {}",
                                pid,
                                p.cycle.len(),
                                g
                            ),
                        });
                    } else if p.cycle.iter().all(|&x| x == 0) {
                        report.warnings.push(format!(
                            "lefschetz {}: zero vanishing cycle (null-homotopic)",
                            pid
                        ));
                    }
                }
            }
            if !orders.entry(&p.face).or_default().insert(p.order) {
                report.violations.push(Violation {
                    code: "V6",
                    message: format!(
                        "lefschetz {}: duplicate order {} in face {}",
                        pid, p.order, p.face
                    ),
                });
            }
        }

        report
    }

    fn slot_edge_table(&self) -> BTreeMap<(VertexId, u8), CurveId> {
        let mut t = BTreeMap::new();
        for (eid, ends) in &self.arrangement.edges {
            for end in ends {
                t.insert((end.vertex.clone(), end.slot), eid.clone());
            }
        }
        t
    }

    /// Face of the quadrant between slots s and s+1 at vertex v.
    fn quadrant_face(&self, analysis: &Analysis, v: &VertexId, s: u8) -> FaceId {
        let circuit = analysis.trace.corner[&(v.clone(), s)];
        analysis.face_of_circuit[circuit].clone()
    }

    fn check_double(
        &self,
        vid: &VertexId,
        analysis: &Analysis,
        slot_edges: &BTreeMap<(VertexId, u8), CurveId>,
        report: &mut ValidationReport,
    ) {
        let edges: Vec<CurveId> = (0..4)
            .map(|s| slot_edges[&(vid.clone(), s)].clone())
            .collect();
        let qfaces: Vec<FaceId> =
            (0..4).map(|s| self.quadrant_face(analysis, vid, s)).collect();
        // Quadrant s is bounded by the edges at slots s and s+1.
        let mut out_quadrants = Vec::new();
        let mut in_quadrants = Vec::new();
        for s in 0..4usize {
            let e1 = &edges[s];
            let e2 = &edges[(s + 1) % 4];
            let f = &qfaces[s];
            let out1 = &self.folds[e1].high == f;
            let out2 = &self.folds[e2].high == f;
            if out1 && out2 {
                out_quadrants.push(s);
            }
            if !out1 && !out2 {
                in_quadrants.push(s);
            }
        }
        if out_quadrants.len() != 1 || in_quadrants.len() != 1 {
            report.violations.push(Violation {
                code: "V4",
                message: format!(
                    "double {}: expected exactly one both-out and one both-in quadrant (got {}/{})",
                    vid,
                    out_quadrants.len(),
                    in_quadrants.len()
                ),
            });
            return;
        }
        let oo = out_quadrants[0];
        let ii = in_quadrants[0];
        if (oo + 2) % 4 != ii {
            report.violations.push(Violation {
                code: "V4",
                message: format!(
                    "double {}: both-out and both-in quadrants are not opposite",
                    vid
                ),
            });
            return;
        }
        // The two surgery paths from the both-out quadrant to the opposite
        // quadrant must produce identical fibers.
        // Quadrant s is separated from quadrant s+1 by the edge at slot s+1
        // and from quadrant s-1 by the edge at slot s.
        let f_oo = &self.faces[&qfaces[oo]];
        let side_a = &qfaces[(oo + 1) % 4];
        let side_b = &qfaces[(oo + 3) % 4];
        let f_ll = &self.faces[&qfaces[ii]];
        let path_a = apply_surgery(f_oo, &self.folds[&edges[(oo + 1) % 4]].surgery)
            .ok()
            .filter(|f| f == &self.faces[side_a])
            .and_then(|f| {
                apply_surgery(&f, &self.folds[&edges[(oo + 2) % 4]].surgery).ok()
            });
        let path_b = apply_surgery(f_oo, &self.folds[&edges[oo]].surgery)
            .ok()
            .filter(|f| f == &self.faces[side_b])
            .and_then(|f| {
                apply_surgery(&f, &self.folds[&edges[(oo + 3) % 4]].surgery).ok()
            });
        match (path_a, path_b) {
            (Some(a), Some(b)) if &a == f_ll && &b == f_ll => {}
            _ => report.violations.push(Violation {
                code: "V4",
                message: format!(
                    "double {}: the two surgery paths do not agree with the quadrant fibers",
                    vid
                ),
            }),
        }
    }

    fn check_cusp(
        &self,
        vid: &VertexId,
        analysis: &Analysis,
        slot_edges: &BTreeMap<(VertexId, u8), CurveId>,
        report: &mut ValidationReport,
    ) {
        let e0 = &slot_edges[&(vid.clone(), 0)];
        let e1 = &slot_edges[&(vid.clone(), 1)];
        let f0 = &self.folds[e0];
        let f1 = &self.folds[e1];
        if f0.high != f1.high || f0.low != f1.low {
            report.violations.push(Violation {
                code: "V5",
                message: format!(
                    "cusp {}: incident arcs do not share high/low faces",
                    vid
                ),
            });
            return;
        }
        let both_nonsep = matches!(
            (&f0.surgery, &f1.surgery),
            (
                SurgeryDescriptor::Nonseparating(a),
                SurgeryDescriptor::Nonseparating(b)
            ) if a == b
        );
        if !both_nonsep {
            report.violations.push(Violation {
                code: "V5",
                message: format!(
                    "cusp {}: both arcs must carry nonseparating surgery on the same component",
                    vid
                ),
            });
        }
        // The two corners at the cusp must see exactly the high and low faces.
        let q0 = self.quadrant_face(analysis, vid, 0);
        let q1 = self.quadrant_face(analysis, vid, 1);
        let want: BTreeSet<&FaceId> = [&f0.high, &f0.low].into_iter().collect();
        let got: BTreeSet<&FaceId> = [&q0, &q1].into_iter().collect();
        if want != got {
            report.violations.push(Violation {
                code: "V5",
                message: format!(
                    "cusp {}: corner faces {}/{} do not match fold faces",
                    vid, q0, q1
                ),
            });
        }
    }

    fn valid_analysis(&self) -> Result<Analysis, DiagramError> {
        let report = self.validate();
        if !report.ok() {
            return Err(DiagramError::Invalid(report));
        }
        Ok(self.analyze().expect("validated"))
    }

    pub fn lefschetz_count(&self) -> usize {
        self.lefschetz.len()
    }

    pub fn cusp_count(&self) -> usize {
        self.arrangement
            .vertices
            .values()
            .filter(|k| **k == VertexKind::Cusp)
            .count()
    }

    pub fn double_count(&self) -> usize {
        self.arrangement
            .vertices
            .values()
            .filter(|k| **k == VertexKind::Double)
            .count()
    }

    /// Face of the both-out quadrant at a double vertex (valid diagrams
    /// have exactly one).
    fn both_out_face(
        &self,
        analysis: &Analysis,
        vid: &VertexId,
        slot_edges: &BTreeMap<(VertexId, u8), CurveId>,
    ) -> FaceId {
        for s in 0..4u8 {
            let e1 = &slot_edges[&(vid.clone(), s)];
            let e2 = &slot_edges[&(vid.clone(), (s + 1) % 4)];
            let f = self.quadrant_face(analysis, vid, s);
            if self.folds[e1].high == f && self.folds[e2].high == f {
                return f;
            }
        }
        unreachable!("validated double vertex has a both-out quadrant")
    }

    /// Euler characteristic of the total space. Pencils must be blown up
    /// first.
    pub fn euler_characteristic(&self) -> Result<i64, DiagramError> {
        if self.basepoints > 0 {
            return Err(DiagramError::IsPencil(self.basepoints));
        }
        let analysis = self.valid_analysis()?;
        Ok(self.euler_from(&analysis))
    }

    fn euler_from(&self, analysis: &Analysis) -> i64 {
        let mut e = 0i64;
        for (fid, circuits) in &analysis.circuits_of_face {
            let chi_c = 2 - circuits.len() as i64;
            e += chi_c * self.faces[fid].euler();
        }
        e += self.lefschetz.len() as i64;
        for (id, fold) in &self.folds {
            if self.arrangement.edges.contains_key(id) {
                e -= self.faces[&fold.high].euler() + 1;
            }
        }
        let slot_edges = self.slot_edge_table();
        for (vid, kind) in &self.arrangement.vertices {
            match kind {
                VertexKind::Double => {
                    let f = self.both_out_face(analysis, vid, &slot_edges);
                    e += self.faces[&f].euler() + 2;
                }
                VertexKind::Cusp => {
                    let e0 = &slot_edges[&(vid.clone(), 0)];
                    e += self.faces[&self.folds[e0].low].euler();
                }
            }
        }
        e
    }

    /// Thom parity: e(X) must match #Lefschetz + #cusps mod 2.
    pub fn parity_check(&self) -> Result<bool, DiagramError> {
        let e = self.euler_characteristic()?;
        let want = (self.lefschetz_count() + self.cusp_count()) as i64;
        Ok((e - want) % 2 == 0)
    }

    pub fn connectivity_report(&self) -> Result<ConnectivityReport, DiagramError> {
        let _ = self.valid_analysis()?;
        let per_face: BTreeMap<FaceId, bool> = self
            .faces
            .iter()
            .map(|(f, fiber)| (f.clone(), fiber.is_connected()))
            .collect();
        let all_connected = per_face.values().all(|&b| b);
        Ok(ConnectivityReport { per_face, all_connected })
    }

    /// Contribution of a single stratum to the Euler characteristic.
    pub fn stratum_fiber_euler(&self, s: &Stratum) -> Result<i64, DiagramError> {
        let analysis = self.valid_analysis()?;
        let slot_edges = self.slot_edge_table();
        match s {
            Stratum::Face(f) => {
                let fiber = self
                    .faces
                    .get(f)
                    .ok_or_else(|| DiagramError::UnknownStratum(f.to_string()))?;
                Ok(fiber.euler())
            }
            Stratum::Lefschetz(p) => {
                self.lefschetz
                    .get(p)
                    .ok_or_else(|| DiagramError::UnknownStratum(p.to_string()))?;
                Ok(1)
            }
            Stratum::Fold(c) => {
                let fold = self
                    .folds
                    .get(c)
                    .ok_or_else(|| DiagramError::UnknownStratum(c.to_string()))?;
                Ok(self.faces[&fold.high].euler() + 1)
            }
            Stratum::Vertex(v) => {
                let kind = self
                    .arrangement
                    .vertices
                    .get(v)
                    .ok_or_else(|| DiagramError::UnknownStratum(v.to_string()))?;
                match kind {
                    VertexKind::Double => {
                        let f = self.both_out_face(&analysis, v, &slot_edges);
                        Ok(self.faces[&f].euler() + 2)
                    }
                    VertexKind::Cusp => {
                        let e0 = &slot_edges[&(v.clone(), 0)];
                        Ok(self.faces[&self.folds[e0].low].euler())
                    }
                }
            }
        }
    }

    /// Twist word of the Lefschetz points in a face: sorted by order, the
    /// latest attachment leftmost; all twists use the given handedness.
    /// All points must lie on a single component of positive genus.
    pub fn monodromy_word(
        &self,
        face: &FaceId,
        handedness: Handedness,
    ) -> Result<TwistWord, DiagramError> {
        let fiber = self
            .faces
            .get(face)
            .ok_or_else(|| DiagramError::UnknownStratum(face.to_string()))?;
        let mut pts: Vec<&LefschetzPoint> =
            self.lefschetz.values().filter(|p| &p.face == face).collect();
        if pts.is_empty() {
            return Err(DiagramError::Monodromy(format!(
                "face {} has no lefschetz points",
                face
            )));
        }
        let comp = pts[0].component.clone();
        if pts.iter().any(|p| p.component != comp) {
            return Err(DiagramError::Monodromy(format!(
                "lefschetz points in face {} lie on different components",
                face
            )));
        }
        let genus = fiber.genus_of(&comp).ok_or_else(|| {
            DiagramError::Monodromy(format!("no component {} in face {}", comp, face))
        })?;
        if genus == 0 {
            return Err(DiagramError::Monodromy(
                "component has genus 0; no homology action".into(),
            ));
        }
        pts.sort_by_key(|p| std::cmp::Reverse(p.order));
        let letters = pts
            .iter()
            .map(|p| {
                HomologyClass::new(p.cycle.clone())
                    .map(|c| (c, handedness))
                    .map_err(|e| DiagramError::Monodromy(e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        TwistWord::new(letters).map_err(|e| DiagramError::Monodromy(e.to_string()))
    }
}
