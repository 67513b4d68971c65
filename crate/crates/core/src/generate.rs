//! Seeded random diagrams and parametric families of move inputs, for
//! test harnesses and fuzzing.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::arrangement::{EdgeEnd, VertexKind};
use crate::diagram::{BlfDiagram, Fold, LefschetzPoint};
use crate::fiber::{apply_surgery, unapply_surgery, FiberDescription, SurgeryDescriptor};
use crate::ids::{ComponentId, CurveId, FaceId, PointId, VertexId};

pub struct Generator {
    rng: StdRng,
    next: usize,
}

impl Generator {
    pub fn new(seed: u64) -> Self {
        Generator { rng: StdRng::seed_from_u64(seed), next: 0 }
    }

    fn id(&mut self, prefix: &str) -> String {
        let n = self.next;
        self.next += 1;
        format!("{}{}", prefix, n)
    }

    /// A random valid diagram: a tree of nested fold circles (some cusped),
    /// sprinkled with Lefschetz points. Always validates.
    pub fn diagram(&mut self) -> BlfDiagram {
        self.next = 0;
        let mut d = BlfDiagram::default();
        let root = FaceId(self.id("f"));
        let ncomp = self.rng.gen_range(1..=2);
        let comps: Vec<(ComponentId, u32)> = (0..ncomp)
            .map(|_| (ComponentId(self.id("c")), self.rng.gen_range(0..=3)))
            .collect();
        let root_fiber = FiberDescription::new(comps).unwrap();
        d.faces.insert(root.clone(), root_fiber);

        let mut queue = vec![(root, 0usize)];
        while let Some((face, depth)) = queue.pop() {
            if depth >= 3 {
                continue;
            }
            let children = self.rng.gen_range(0..=2);
            for _ in 0..children {
                if let Some(child) = self.add_child(&mut d, &face) {
                    queue.push((child, depth + 1));
                }
            }
        }
        self.sprinkle_lefschetz(&mut d);
        debug_assert!(d.validate().ok(), "{}", d.validate());
        d
    }

    /// Nest a new fold circle (sometimes cusped) inside `face`; returns the
    /// new inner face.
    fn add_child(&mut self, d: &mut BlfDiagram, face: &FaceId) -> Option<FaceId> {
        let parent = d.faces[face].clone();
        // Either the parent is the high side (pick a surgery applicable to
        // it) or the low side (undo a nonseparating surgery).
        let down = self.rng.gen_bool(0.5);
        let (fold, child_fiber) = if down {
            let surgery = self.applicable_surgery(&parent)?;
            let child = apply_surgery(&parent, &surgery).ok()?;
            (
                Fold { high: face.clone(), low: FaceId::from("?"), surgery },
                child,
            )
        } else {
            let comp = self.pick_component(&parent)?;
            let surgery = SurgeryDescriptor::nonseparating(comp);
            let child = unapply_surgery(&parent, &surgery).ok()?;
            (
                Fold { high: FaceId::from("?"), low: face.clone(), surgery },
                child,
            )
        };
        let child_face = FaceId(self.id("f"));
        let fold = if down {
            Fold { low: child_face.clone(), ..fold }
        } else {
            Fold { high: child_face.clone(), ..fold }
        };
        d.faces.insert(child_face.clone(), child_fiber);
        let cusped = matches!(fold.surgery, SurgeryDescriptor::Nonseparating(_))
            && self.rng.gen_bool(0.3);
        if cusped {
            let v = VertexId(self.id("k"));
            let e = CurveId(self.id("e"));
            d.arrangement.vertices.insert(v.clone(), VertexKind::Cusp);
            d.arrangement.edges.insert(
                e.clone(),
                [
                    EdgeEnd { vertex: v.clone(), slot: 0 },
                    EdgeEnd { vertex: v, slot: 1 },
                ],
            );
            d.folds.insert(e, fold);
        } else {
            let z = CurveId(self.id("z"));
            d.arrangement.circles.insert(z.clone());
            d.folds.insert(z, fold);
        }
        Some(child_face)
    }

    fn pick_component(&mut self, f: &FiberDescription) -> Option<ComponentId> {
        let comps: Vec<_> = f.components().map(|(c, _)| c.clone()).collect();
        if comps.is_empty() {
            return None;
        }
        let i = self.rng.gen_range(0..comps.len());
        Some(comps[i].clone())
    }

    fn applicable_surgery(&mut self, f: &FiberDescription) -> Option<SurgeryDescriptor> {
        let mut options = Vec::new();
        for (c, g) in f.components() {
            if g >= 1 {
                options.push(SurgeryDescriptor::nonseparating(c.clone()));
            }
            // Splitting needs the derived ids to be fresh; generated ids
            // never end in the derived suffixes of another component.
            let (ca, cb) = crate::fiber::derived_ids(c);
            if f.genus_of(&ca).is_none() && f.genus_of(&cb).is_none() {
                let g1 = self.rng.gen_range(0..=g);
                options.push(SurgeryDescriptor::separating(c.clone(), g1, g - g1));
            }
        }
        if options.is_empty() {
            return None;
        }
        let i = self.rng.gen_range(0..options.len());
        Some(options.swap_remove(i))
    }

    fn sprinkle_lefschetz(&mut self, d: &mut BlfDiagram) {
        let faces: Vec<FaceId> = d.faces.keys().cloned().collect();
        for face in faces {
            for _ in 0..self.rng.gen_range(0..=2) {
                let fiber = d.faces[&face].clone();
                let Some(comp) = self.pick_component(&fiber) else { continue };
                let genus = fiber.genus_of(&comp).unwrap();
                let mut cycle = vec![0i64; 2 * genus as usize];
                if genus > 0 {
                    let i = self.rng.gen_range(0..cycle.len());
                    cycle[i] = self.rng.gen_range(1..=3);
                }
                let order = d
                    .lefschetz
                    .values()
                    .filter(|p| p.face == face)
                    .map(|p| p.order)
                    .max()
                    .unwrap_or(0)
                    + 1;
                let pid = PointId(self.id("p"));
                d.lefschetz.insert(
                    pid,
                    LefschetzPoint { face: face.clone(), component: comp, order, cycle },
                );
            }
        }
    }

    /// A slide input: circles `s` and `t` side by side in a genus-k root
    /// face; slide `s` across `t`. `case_ii` flips `t`'s arrow.
    pub fn slide_instance(&mut self, k: u32, case_ii: bool) -> (BlfDiagram, CurveId, CurveId) {
        let k = if case_ii { k } else { k.max(1) };
        let mut d = BlfDiagram::default();
        let (r, fa, fb) = (FaceId::from("r"), FaceId::from("fa"), FaceId::from("fb"));
        let (s, t) = (CurveId::from("s"), CurveId::from("t"));
        d.arrangement.circles.insert(s.clone());
        d.arrangement.circles.insert(t.clone());
        d.faces.insert(r.clone(), FiberDescription::connected("c0", k));
        d.faces.insert(fa.clone(), FiberDescription::connected("c0", k + 1));
        d.folds.insert(
            s.clone(),
            Fold {
                high: fa,
                low: r.clone(),
                surgery: SurgeryDescriptor::nonseparating("c0"),
            },
        );
        let fold_t = if case_ii {
            d.faces.insert(fb.clone(), FiberDescription::connected("c0", k + 1));
            Fold { high: fb, low: r, surgery: SurgeryDescriptor::nonseparating("c0") }
        } else {
            d.faces.insert(fb.clone(), FiberDescription::connected("c0", k - 1));
            Fold { high: r, low: fb, surgery: SurgeryDescriptor::nonseparating("c0") }
        };
        d.folds.insert(t.clone(), fold_t);
        (d, s, t)
    }

    /// A push input: a point in the low face of a circle, plus the lift
    /// data to push it across.
    pub fn push_instance(
        &mut self,
        g: u32,
    ) -> (BlfDiagram, PointId, CurveId, ComponentId, Vec<i64>) {
        let g = g.max(1);
        let mut d = BlfDiagram::default();
        let z = CurveId::from("z0");
        d.arrangement.circles.insert(z.clone());
        d.faces.insert(FaceId::from("in"), FiberDescription::connected("c0", g));
        d.faces.insert(FaceId::from("out"), FiberDescription::connected("c0", g - 1));
        d.folds.insert(
            z.clone(),
            Fold {
                high: FaceId::from("in"),
                low: FaceId::from("out"),
                surgery: SurgeryDescriptor::nonseparating("c0"),
            },
        );
        let mut low_cycle = vec![0i64; 2 * (g - 1) as usize];
        if let Some(x) = low_cycle.first_mut() {
            *x = 1;
        }
        let p = PointId::from("p0");
        d.lefschetz.insert(
            p.clone(),
            LefschetzPoint {
                face: FaceId::from("out"),
                component: ComponentId::from("c0"),
                order: 1,
                cycle: low_cycle,
            },
        );
        let mut lift = vec![0i64; 2 * g as usize];
        lift[0] = 1;
        (d, p, z, ComponentId::from("c0"), lift)
    }

    /// A flip input: a fold circle whose high face has genus g, plus the
    /// loop surgery and vanishing cycles.
    pub fn flip_instance(
        &mut self,
        g: u32,
    ) -> (BlfDiagram, CurveId, SurgeryDescriptor, [Vec<i64>; 2]) {
        let mut d = BlfDiagram::default();
        let z = CurveId::from("z0");
        d.arrangement.circles.insert(z.clone());
        d.faces.insert(FaceId::from("in"), FiberDescription::connected("c0", g + 1));
        d.faces.insert(FaceId::from("out"), FiberDescription::connected("c0", g));
        d.folds.insert(
            z.clone(),
            Fold {
                high: FaceId::from("in"),
                low: FaceId::from("out"),
                surgery: SurgeryDescriptor::nonseparating("c0"),
            },
        );
        let dim = 2 * (g + 2) as usize;
        let mut c0 = vec![0i64; dim];
        c0[0] = 1;
        let mut c1 = vec![0i64; dim];
        c1[1] = 1;
        (d, z, SurgeryDescriptor::nonseparating("c0"), [c0, c1])
    }

    /// A cusped-circle diagram: one cusp on a fold between genus g+1 and g.
    pub fn cusp_instance(&mut self, g: u32) -> (BlfDiagram, VertexId, FaceId) {
        let mut d = BlfDiagram::default();
        let v = VertexId::from("k0");
        d.arrangement.vertices.insert(v.clone(), VertexKind::Cusp);
        d.arrangement.edges.insert(
            CurveId::from("e0"),
            [
                EdgeEnd { vertex: v.clone(), slot: 0 },
                EdgeEnd { vertex: v.clone(), slot: 1 },
            ],
        );
        d.faces.insert(FaceId::from("in"), FiberDescription::connected("c0", g + 1));
        d.faces.insert(FaceId::from("out"), FiberDescription::connected("c0", g));
        d.folds.insert(
            CurveId::from("e0"),
            Fold {
                high: FaceId::from("in"),
                low: FaceId::from("out"),
                surgery: SurgeryDescriptor::nonseparating("c0"),
            },
        );
        (d, v, FaceId::from("in"))
    }
}

/// The two-region configuration: one circle whose fold splits the connected
/// outer Σ_{g1+g2} into an inner Σ_{g1} ⊔ Σ_{g2}.
pub fn two_region(g1: u32, g2: u32) -> BlfDiagram {
    let mut d = BlfDiagram::default();
    let z = CurveId::from("z0");
    d.arrangement.circles.insert(z.clone());
    let surgery = SurgeryDescriptor::separating("c0", g1, g2);
    let outer = FiberDescription::connected("c0", g1 + g2);
    let inner = apply_surgery(&outer, &surgery).unwrap();
    d.faces.insert(FaceId::from("outer"), outer);
    d.faces.insert(FaceId::from("inner"), inner);
    d.folds.insert(
        z,
        Fold { high: FaceId::from("outer"), low: FaceId::from("inner"), surgery },
    );
    d
}

/// The trivial bundle with connected fiber of genus g.
pub fn trivial_bundle(g: u32) -> BlfDiagram {
    let mut d = BlfDiagram::default();
    d.faces.insert(FaceId::from("all"), FiberDescription::connected("c0", g));
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_diagrams_validate() {
        let mut gen = Generator::new(7);
        for _ in 0..50 {
            let d = gen.diagram();
            let report = d.validate();
            assert!(report.ok(), "{}", report);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a: Vec<_> = {
            let mut g = Generator::new(42);
            (0..10).map(|_| g.diagram()).collect()
        };
        let b: Vec<_> = {
            let mut g = Generator::new(42);
            (0..10).map(|_| g.diagram()).collect()
        };
        assert_eq!(a, b);
    }
}
