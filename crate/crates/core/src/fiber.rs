//! Fibers of the fibration away from the singular image, and the surgeries
//! a fold crossing performs on them. A fiber is a closed oriented surface,
//! possibly disconnected: a multiset of labelled components with genera.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::ids::ComponentId;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FiberError {
    #[error("fiber must have at least one component")]
    Empty,
    #[error("duplicate component id {0}")]
    DuplicateComponent(ComponentId),
    #[error("surgery not applicable: {0}")]
    NotApplicable(String),
}

/// Multiset of surface components, keyed by id, value is the genus.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct FiberDescription {
    components: BTreeMap<ComponentId, u32>,
}

impl FiberDescription {
    pub fn new(
        comps: impl IntoIterator<Item = (ComponentId, u32)>,
    ) -> Result<Self, FiberError> {
        let mut components = BTreeMap::new();
        for (id, g) in comps {
            if components.insert(id.clone(), g).is_some() {
                return Err(FiberError::DuplicateComponent(id));
            }
        }
        if components.is_empty() {
            return Err(FiberError::Empty);
        }
        Ok(FiberDescription { components })
    }

    /// Single connected component of the given genus.
    pub fn connected(id: impl Into<ComponentId>, genus: u32) -> Self {
        let mut components = BTreeMap::new();
        components.insert(id.into(), genus);
        FiberDescription { components }
    }

    pub fn genus_of(&self, c: &ComponentId) -> Option<u32> {
        self.components.get(c).copied()
    }

    pub fn components(&self) -> impl Iterator<Item = (&ComponentId, u32)> {
        self.components.iter().map(|(id, g)| (id, *g))
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn is_connected(&self) -> bool {
        self.components.len() == 1
    }

    pub fn euler(&self) -> i64 {
        self.components.values().map(|g| 2 - 2 * (*g as i64)).sum()
    }
}

impl fmt::Display for FiberDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (id, g) in &self.components {
            if !first {
                write!(f, ",")?;
            }
            first = false;
            write!(f, "{}:{}", id, g)?;
        }
        Ok(())
    }
}

/// Effect of a fiberwise 2-handle attachment (crossing a fold from its
/// high side to its low side) on the fiber.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SurgeryDescriptor {
    /// Collapse a nonseparating circle on the component: genus drops by one.
    Nonseparating(ComponentId),
    /// Collapse a separating circle: the component of genus g1+g2 splits
    /// into two components of genera g1 <= g2.
    Separating(ComponentId, u32, u32),
}

impl SurgeryDescriptor {
    /// Separating surgery with the genus pair normalized ascending.
    pub fn separating(c: impl Into<ComponentId>, g1: u32, g2: u32) -> Self {
        let (a, b) = if g1 <= g2 { (g1, g2) } else { (g2, g1) };
        SurgeryDescriptor::Separating(c.into(), a, b)
    }

    pub fn nonseparating(c: impl Into<ComponentId>) -> Self {
        SurgeryDescriptor::Nonseparating(c.into())
    }

    pub fn component(&self) -> &ComponentId {
        match self {
            SurgeryDescriptor::Nonseparating(c) => c,
            SurgeryDescriptor::Separating(c, _, _) => c,
        }
    }
}

impl fmt::Display for SurgeryDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurgeryDescriptor::Nonseparating(c) => write!(f, "nonsep {}", c),
            SurgeryDescriptor::Separating(c, g1, g2) => {
                write!(f, "sep {} {} {}", c, g1, g2)
            }
        }
    }
}

/// Ids of the two components produced by a separating surgery on `c`.
/// Deterministic: suffixes "a" and "b"; "a" carries the smaller genus.
pub fn derived_ids(c: &ComponentId) -> (ComponentId, ComponentId) {
    (
        ComponentId(format!("{}a", c.0)),
        ComponentId(format!("{}b", c.0)),
    )
}

/// Fiber after crossing the fold: 2-handle attached upstairs, so the fiber
/// Euler characteristic increases by exactly 2.
pub fn apply_surgery(
    fiber: &FiberDescription,
    surgery: &SurgeryDescriptor,
) -> Result<FiberDescription, FiberError> {
    let mut components = fiber.components.clone();
    match surgery {
        SurgeryDescriptor::Nonseparating(c) => {
            let g = *components.get(c).ok_or_else(|| {
                FiberError::NotApplicable(format!("no component {}", c))
            })?;
            if g == 0 {
                return Err(FiberError::NotApplicable(format!(
                    "nonseparating surgery on genus-0 component {}",
                    c
                )));
            }
            components.insert(c.clone(), g - 1);
        }
        SurgeryDescriptor::Separating(c, g1, g2) => {
            let g = *components.get(c).ok_or_else(|| {
                FiberError::NotApplicable(format!("no component {}", c))
            })?;
            if g != g1 + g2 {
                return Err(FiberError::NotApplicable(format!(
                    "separating {}+{} surgery on genus-{} component {}",
                    g1, g2, g, c
                )));
            }
            let (ca, cb) = derived_ids(c);
            if components.contains_key(&ca) || components.contains_key(&cb) {
                return Err(FiberError::NotApplicable(format!(
                    "derived ids {}/{} already present",
                    ca, cb
                )));
            }
            components.remove(c);
            components.insert(ca, *g1);
            components.insert(cb, *g2);
        }
    }
    Ok(FiberDescription { components })
}

/// Fiber on the high side given the low-side fiber: the inverse of
/// `apply_surgery` (a fiberwise 1-handle, seen from the other direction).
pub fn unapply_surgery(
    fiber: &FiberDescription,
    surgery: &SurgeryDescriptor,
) -> Result<FiberDescription, FiberError> {
    let mut components = fiber.components.clone();
    match surgery {
        SurgeryDescriptor::Nonseparating(c) => {
            let g = *components.get(c).ok_or_else(|| {
                FiberError::NotApplicable(format!("no component {}", c))
            })?;
            components.insert(c.clone(), g + 1);
        }
        SurgeryDescriptor::Separating(c, g1, g2) => {
            let (ca, cb) = derived_ids(c);
            let ga = components.get(&ca).copied();
            let gb = components.get(&cb).copied();
            if ga != Some(*g1) || gb != Some(*g2) {
                return Err(FiberError::NotApplicable(format!(
                    "components {}:{}/{}:{} not present",
                    ca, g1, cb, g2
                )));
            }
            if components.contains_key(c) {
                return Err(FiberError::NotApplicable(format!(
                    "component {} already present",
                    c
                )));
            }
            components.remove(&ca);
            components.remove(&cb);
            components.insert(c.clone(), g1 + g2);
        }
    }
    Ok(FiberDescription { components })
}

/// Does crossing the fold from `high` with `surgery` land on `low`?
pub fn reverse_crossing(
    low: &FiberDescription,
    surgery: &SurgeryDescriptor,
    high: &FiberDescription,
) -> bool {
    apply_surgery(high, surgery).map(|f| &f == low).unwrap_or(false)
}
