//! The round image as a combinatorial map on the two-sphere: double points
//! (valence 4), cusps (valence 2), arcs between them, and vertexless
//! circles. The rotation system is encoded by numbered slots at each vertex;
//! face boundary circuits fall out of the usual rotation-system traversal.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::ids::{CurveId, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexKind {
    Double,
    Cusp,
}

impl VertexKind {
    pub fn valence(self) -> u8 {
        match self {
            VertexKind::Double => 4,
            VertexKind::Cusp => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            VertexKind::Double => "double",
            VertexKind::Cusp => "cusp",
        }
    }
}

/// One endpoint of an edge: a vertex and a slot in its cyclic rotation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct EdgeEnd {
    pub vertex: VertexId,
    pub slot: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ArrangementMap {
    pub vertices: BTreeMap<VertexId, VertexKind>,
    pub edges: BTreeMap<CurveId, [EdgeEnd; 2]>,
    pub circles: BTreeSet<CurveId>,
}

/// A directed edge side (for edges) or a side of a vertexless circle.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Dart {
    /// Edge traversed from ends[origin] to ends[1-origin].
    Arc { edge: CurveId, origin: u8 },
    /// One of the two sides of a vertexless circle.
    Side { circle: CurveId, side: u8 },
}

impl Dart {
    pub fn curve(&self) -> &CurveId {
        match self {
            Dart::Arc { edge, .. } => edge,
            Dart::Side { circle, .. } => circle,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ArrangementError {
    #[error("structural error: {0}")]
    Structural(String),
    #[error("component containing {0} does not trace to a sphere")]
    NotSphere(CurveId),
}

/// Result of the face-circuit traversal.
#[derive(Clone, Debug)]
pub struct Trace {
    /// Boundary circuits in canonical order (sorted by smallest dart).
    pub circuits: Vec<Vec<Dart>>,
    pub circuit_of: BTreeMap<Dart, usize>,
    /// For vertex v and slot s: index of the circuit whose corner lies in
    /// the quadrant between slots s and s+1 (cyclically).
    pub corner: BTreeMap<(VertexId, u8), usize>,
    /// Number of connected components (vertexless circles included).
    pub components: usize,
}

impl ArrangementMap {
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty() && self.edges.is_empty() && self.circles.is_empty()
    }

    pub fn curve_ids(&self) -> impl Iterator<Item = &CurveId> {
        self.edges.keys().chain(self.circles.iter())
    }

    /// Well-formedness of the incidence structure itself.
    pub fn structural_errors(&self) -> Vec<String> {
        let mut errs = Vec::new();
        let mut seen: BTreeMap<(VertexId, u8), CurveId> = BTreeMap::new();
        for (eid, ends) in &self.edges {
            if self.circles.contains(eid) {
                errs.push(format!("id {} is both an edge and a circle", eid));
            }
            for end in ends {
                match self.vertices.get(&end.vertex) {
                    None => errs.push(format!(
                        "edge {} references unknown vertex {}",
                        eid, end.vertex
                    )),
                    Some(kind) => {
                        if end.slot >= kind.valence() {
                            errs.push(format!(
                                "edge {}: slot {}.{} out of range for {} vertex",
                                eid,
                                end.vertex,
                                end.slot,
                                kind.name()
                            ));
                        }
                    }
                }
                if let Some(prev) =
                    seen.insert((end.vertex.clone(), end.slot), eid.clone())
                {
                    errs.push(format!(
                        "slot {}.{} used by both {} and {}",
                        end.vertex, end.slot, prev, eid
                    ));
                }
            }
        }
        for (vid, kind) in &self.vertices {
            for s in 0..kind.valence() {
                if !seen.contains_key(&(vid.clone(), s)) {
                    errs.push(format!("slot {}.{} is unfilled", vid, s));
                }
            }
        }
        errs
    }

    fn slot_table(&self) -> BTreeMap<(VertexId, u8), (CurveId, u8)> {
        let mut t = BTreeMap::new();
        for (eid, ends) in &self.edges {
            for (i, end) in ends.iter().enumerate() {
                t.insert((end.vertex.clone(), end.slot), (eid.clone(), i as u8));
            }
        }
        t
    }

    /// Number of connected components, counting each vertexless circle.
    pub fn component_count(&self) -> usize {
        // union-find over vertices
        let verts: Vec<&VertexId> = self.vertices.keys().collect();
        let index: BTreeMap<&VertexId, usize> =
            verts.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let mut parent: Vec<usize> = (0..verts.len()).collect();
        fn find(p: &mut Vec<usize>, i: usize) -> usize {
            if p[i] != i {
                let r = find(p, p[i]);
                p[i] = r;
            }
            p[i]
        }
        for ends in self.edges.values() {
            let a = index[&ends[0].vertex];
            let b = index[&ends[1].vertex];
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
            }
        }
        let mut roots = BTreeSet::new();
        for i in 0..verts.len() {
            roots.insert(find(&mut parent, i));
        }
        roots.len() + self.circles.len()
    }

    /// Face-circuit traversal. Convention: a dart arriving at slot s leaves
    /// through slot s+1 (cyclically), so corners are swept consistently.
    /// Each component's circuit count must satisfy the sphere condition
    /// V - E + F = 2; otherwise the rotation system encodes a higher-genus
    /// surface and `NotSphere` is returned.
    pub fn trace(&self) -> Result<Trace, ArrangementError> {
        let errs = self.structural_errors();
        if let Some(e) = errs.into_iter().next() {
            return Err(ArrangementError::Structural(e));
        }
        let slots = self.slot_table();

        let mut circuits: Vec<Vec<Dart>> = Vec::new();
        let mut circuit_of: BTreeMap<Dart, usize> = BTreeMap::new();
        let mut corner: BTreeMap<(VertexId, u8), usize> = BTreeMap::new();

        // Edge darts.
        let mut all_darts: Vec<Dart> = Vec::new();
        for eid in self.edges.keys() {
            all_darts.push(Dart::Arc { edge: eid.clone(), origin: 0 });
            all_darts.push(Dart::Arc { edge: eid.clone(), origin: 1 });
        }
        for d in &all_darts {
            if circuit_of.contains_key(d) {
                continue;
            }
            let idx = circuits.len();
            let mut circ = Vec::new();
            let mut cur = d.clone();
            loop {
                if circuit_of.contains_key(&cur) {
                    break;
                }
                circuit_of.insert(cur.clone(), idx);
                circ.push(cur.clone());
                let (edge, origin) = match &cur {
                    Dart::Arc { edge, origin } => (edge.clone(), *origin),
                    _ => unreachable!(),
                };
                let target = &self.edges[&edge][1 - origin as usize];
                let kind = self.vertices[&target.vertex];
                let next_slot = (target.slot + 1) % kind.valence();
                corner.insert((target.vertex.clone(), target.slot), idx);
                let (ne, nend) = slots[&(target.vertex.clone(), next_slot)].clone();
                cur = Dart::Arc { edge: ne, origin: nend };
            }
            circuits.push(circ);
        }
        // Each circle contributes two one-dart circuits.
        for z in &self.circles {
            for side in 0..2u8 {
                let d = Dart::Side { circle: z.clone(), side };
                circuit_of.insert(d.clone(), circuits.len());
                circuits.push(vec![d]);
            }
        }

        // Canonical order: sort circuits by their minimal dart.
        let mut order: Vec<usize> = (0..circuits.len()).collect();
        order.sort_by_key(|&i| circuits[i].iter().min().cloned());
        let mut rank = vec![0usize; circuits.len()];
        for (newi, &oldi) in order.iter().enumerate() {
            rank[oldi] = newi;
        }
        let circuits: Vec<Vec<Dart>> = order
            .iter()
            .map(|&i| {
                let mut c = circuits[i].clone();
                // rotate so the minimal dart comes first
                let min_pos = c
                    .iter()
                    .enumerate()
                    .min_by_key(|(_, d)| (*d).clone())
                    .map(|(p, _)| p)
                    .unwrap();
                c.rotate_left(min_pos);
                c
            })
            .collect();
        for v in circuit_of.values_mut() {
            *v = rank[*v];
        }
        for v in corner.values_mut() {
            *v = rank[*v];
        }

        // Per-component sphere check (vertexless circles are always fine).
        let comp_of = self.vertex_components();
        let mut per_comp: BTreeMap<usize, (usize, usize, usize)> = BTreeMap::new();
        for vid in self.vertices.keys() {
            per_comp.entry(comp_of[vid]).or_insert((0, 0, 0)).0 += 1;
        }
        let mut comp_circuits: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for (eid, ends) in &self.edges {
            let c = comp_of[&ends[0].vertex];
            per_comp.entry(c).or_insert((0, 0, 0)).1 += 1;
            for origin in 0..2u8 {
                let d = Dart::Arc { edge: eid.clone(), origin };
                comp_circuits.entry(c).or_default().insert(circuit_of[&d]);
            }
        }
        for (c, (v, e, _)) in per_comp.iter() {
            let f = comp_circuits.get(c).map(|s| s.len()).unwrap_or(0);
            let chi = *v as i64 - *e as i64 + f as i64;
            if chi != 2 {
                // name some curve in the offending component
                let witness = self
                    .edges
                    .iter()
                    .find(|(_, ends)| comp_of[&ends[0].vertex] == *c)
                    .map(|(id, _)| id.clone())
                    .unwrap_or_else(|| CurveId::from("?"));
                return Err(ArrangementError::NotSphere(witness));
            }
        }

        Ok(Trace {
            circuits,
            circuit_of,
            corner,
            components: self.component_count(),
        })
    }

    fn vertex_components(&self) -> BTreeMap<VertexId, usize> {
        let verts: Vec<VertexId> = self.vertices.keys().cloned().collect();
        let index: BTreeMap<&VertexId, usize> =
            verts.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let mut parent: Vec<usize> = (0..verts.len()).collect();
        fn find(p: &mut Vec<usize>, i: usize) -> usize {
            if p[i] != i {
                let r = find(p, p[i]);
                p[i] = r;
            }
            p[i]
        }
        for ends in self.edges.values() {
            let a = index[&ends[0].vertex];
            let b = index[&ends[1].vertex];
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
            }
        }
        verts
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), find(&mut parent, i)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vid(s: &str) -> VertexId {
        VertexId::from(s)
    }
    fn cid(s: &str) -> CurveId {
        CurveId::from(s)
    }
    fn end(v: &str, slot: u8) -> EdgeEnd {
        EdgeEnd { vertex: vid(v), slot }
    }

    #[test]
    fn empty_arrangement_traces() {
        let a = ArrangementMap::default();
        let t = a.trace().unwrap();
        assert_eq!(t.circuits.len(), 0);
        assert_eq!(t.components, 0);
    }

    #[test]
    fn single_circle_two_sides() {
        let mut a = ArrangementMap::default();
        a.circles.insert(cid("z0"));
        let t = a.trace().unwrap();
        assert_eq!(t.circuits.len(), 2);
        assert_eq!(t.components, 1);
    }

    #[test]
    fn figure_eight_three_faces() {
        // One double vertex, two petal loops at slots (0,1) and (2,3).
        let mut a = ArrangementMap::default();
        a.vertices.insert(vid("v0"), VertexKind::Double);
        a.edges.insert(cid("e0"), [end("v0", 0), end("v0", 1)]);
        a.edges.insert(cid("e1"), [end("v0", 2), end("v0", 3)]);
        let t = a.trace().unwrap();
        assert_eq!(t.circuits.len(), 3);
        assert_eq!(t.components, 1);
        // V - E + F = 1 - 2 + 3 = 2
    }

    #[test]
    fn cusped_circle() {
        // Circle subdivided by one cusp: single edge, both ends at the cusp.
        let mut a = ArrangementMap::default();
        a.vertices.insert(vid("k0"), VertexKind::Cusp);
        a.edges.insert(cid("e0"), [end("k0", 0), end("k0", 1)]);
        let t = a.trace().unwrap();
        assert_eq!(t.circuits.len(), 2);
    }

    #[test]
    fn unfilled_slot_is_structural_error() {
        let mut a = ArrangementMap::default();
        a.vertices.insert(vid("v0"), VertexKind::Double);
        a.edges.insert(cid("e0"), [end("v0", 0), end("v0", 1)]);
        assert!(matches!(a.trace(), Err(ArrangementError::Structural(_))));
    }
}
