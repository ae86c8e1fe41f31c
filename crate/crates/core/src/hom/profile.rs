use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

use crate::enumerate::{for_each_in_class, Budget, EnumError};
use crate::semiring::{Elem, Semiring};
use crate::structure::{classify, to_json_value, ClassKind, ClassTag, PointedStructure, StructureError};

use super::morphism::{fully_surjective_hom_exists, injective_hom_exists};
use super::search::{HomCounter, TargetIndex};

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Enumeration(#[from] EnumError),
}

/// Size and depth limits for the enumerated source slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProfileBound {
    pub max_states: usize,
    pub max_depth: Option<usize>,
}

impl ProfileBound {
    pub fn new(max_states: usize, max_depth: Option<usize>) -> Self {
        ProfileBound { max_states, max_depth }
    }

    fn to_json(self) -> Value {
        json!({ "maxStates": self.max_states, "maxDepth": self.max_depth })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileStatus {
    EqualUpToBound,
    Distinguished,
}

impl fmt::Display for ProfileStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProfileStatus::EqualUpToBound => "equal-up-to-bound",
            ProfileStatus::Distinguished => "distinguished",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileVerdict {
    pub status: ProfileStatus,
    pub witness: Option<PointedStructure>,
    pub counts: Option<(Elem, Elem)>,
    pub bound: ProfileBound,
}

impl ProfileVerdict {
    pub fn is_equal(&self) -> bool {
        self.status == ProfileStatus::EqualUpToBound
    }

    /// `{status, witness?, countLeft?, countRight?, bound}`.
    pub fn to_json_value(&self) -> Value {
        let mut v = json!({ "status": self.status.to_string(), "bound": self.bound.to_json() });
        if let Some(w) = &self.witness {
            v["witness"] = to_json_value(w);
        }
        if let Some((l, r)) = &self.counts {
            v["countLeft"] = json!(l.to_string());
            v["countRight"] = json!(r.to_string());
        }
        v
    }
}

/// Compares `hom_S(T, M)` and `hom_S(T, N)` for every `T` in the enumerated
/// slice of `tag`, in canonical order, and reports the first difference.
pub fn compare_profiles(
    m: &PointedStructure,
    n: &PointedStructure,
    tag: ClassTag,
    s: &Semiring,
    bound: ProfileBound,
) -> Result<ProfileVerdict, ProfileError> {
    if !m.same_signature(n) {
        return Err(StructureError::SignatureMismatch.into());
    }
    let (im, inn) = (TargetIndex::new(m), TargetIndex::new(n));
    let mut found = None;
    for_each_in_class(tag, m.signature_arc(), bound.max_states, bound.max_depth, &Budget::default(), |t| {
        let c = HomCounter::new(t);
        let (l, r) = (s.count_in(&c.count(&im)), s.count_in(&c.count(&inn)));
        if l != r {
            found = Some((t.clone(), l, r));
            false
        } else {
            true
        }
    })?;
    Ok(match found {
        Some((t, l, r)) => ProfileVerdict {
            status: ProfileStatus::Distinguished,
            witness: Some(t),
            counts: Some((l, r)),
            bound,
        },
        None => ProfileVerdict { status: ProfileStatus::EqualUpToBound, witness: None, counts: None, bound },
    })
}

/// Three-valued answer of [`ext_membership`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Member,
    NonMember,
    /// No witness within the bound and no refutation applies.
    Unknown,
}

impl fmt::Display for Membership {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Membership::Member => "member",
            Membership::NonMember => "non-member",
            Membership::Unknown => "unknown",
        })
    }
}

/// Structural reasons why `n` cannot embed injectively into a member of `kind`.
fn inj_refuted(n: &PointedStructure, kind: ClassKind) -> bool {
    let acyclic_target = matches!(kind, ClassKind::Tree | ClassKind::ConnectedAcyclic | ClassKind::Forest);
    let cyclic = !crate::structure::is_acyclic(n);
    if acyclic_target && cyclic {
        return true;
    }
    if matches!(kind, ClassKind::Tree | ClassKind::Forest) {
        let indeg = crate::structure::in_degrees(n);
        if indeg.iter().any(|&d| d > 1) || indeg[n.distinguished()] > 0 {
            return true;
        }
    }
    false
}

/// Structural reasons why `n` cannot be a fully surjective image of a member of `tag`.
fn sur_refuted(n: &PointedStructure, tag: &ClassTag) -> bool {
    let c = classify(n);
    let needed = match tag.kind {
        ClassKind::Tree | ClassKind::PointGenerated => ClassKind::PointGenerated,
        ClassKind::ConnectedAcyclic | ClassKind::Connected => ClassKind::Connected,
        ClassKind::Forest | ClassKind::Any => return false,
    };
    !c.satisfies(&ClassTag::new(needed, tag.depth))
}

/// Whether `n ∈ Inj(C) ∩ Sur(C)`, searching witnesses in the slice of `tag`
/// with at most `bound.max_states` states.
///
/// Membership of `n` in `C` itself settles both sides. Otherwise a negative
/// answer needs a structural refutation (cycles cannot embed into acyclic
/// structures, images of point-generated or connected structures keep that
/// shape and their depth bound); a missing witness alone gives `Unknown`.
pub fn ext_membership(n: &PointedStructure, tag: ClassTag, bound: ProfileBound) -> Result<Membership, ProfileError> {
    if tag.contains(n) {
        return Ok(Membership::Member);
    }
    if inj_refuted(n, tag.kind) || sur_refuted(n, &tag) {
        return Ok(Membership::NonMember);
    }
    let (mut inj, mut sur) = (false, false);
    if bound.max_states >= n.state_count() {
        for_each_in_class(tag, n.signature_arc(), bound.max_states, bound.max_depth, &Budget::default(), |m| {
            if m.state_count() >= n.state_count() {
                inj = inj || injective_hom_exists(n, m);
                sur = sur || fully_surjective_hom_exists(m, n);
            }
            !(inj && sur)
        })?;
    }
    Ok(if inj && sur { Membership::Member } else { Membership::Unknown })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::enumerate_class;
    use crate::structure::Signature;
    use crate::transform::make_figure3_pair;
    use std::sync::Arc;

    fn sig() -> Arc<Signature> {
        Arc::new(Signature::standard())
    }

    #[test]
    fn figure3_profiles() {
        let (m, n) = make_figure3_pair();
        let tree = ClassTag::unbounded(ClassKind::Tree);
        let b = compare_profiles(&m, &n, tree, &Semiring::Boolean, ProfileBound::new(4, Some(3))).unwrap();
        assert!(b.is_equal());
        let v = compare_profiles(&m, &n, tree, &Semiring::Natural, ProfileBound::new(2, Some(1))).unwrap();
        assert_eq!(v.status, ProfileStatus::Distinguished);
        assert_eq!(v.counts, Some((Elem::small(2), Elem::small(1))));
        let w = v.witness.as_ref().unwrap();
        assert_eq!((w.state_count(), w.label(0), w.label(1)), (2, 0, 0));
        let j = v.to_json_value();
        assert_eq!(j["status"], "distinguished");
        assert_eq!(j["countLeft"], "2");
        assert_eq!(j["bound"]["maxStates"], 2);
        let same = compare_profiles(&m, &m, ClassTag::unbounded(ClassKind::Any), &Semiring::Natural, ProfileBound::new(2, None));
        assert!(same.unwrap().is_equal());
    }

    #[test]
    fn extension_classes() {
        let pg = enumerate_class(ClassTag::new(ClassKind::PointGenerated, Some(1)), &sig(), 2, None).unwrap();
        for p in &pg {
            assert_eq!(ext_membership(p, ClassTag::new(ClassKind::PointGenerated, Some(1)), ProfileBound::new(2, None)).unwrap(), Membership::Member);
        }
        let two_cycle = PointedStructure::builder(sig(), 2).edge("R", 0, 1).edge("R", 1, 0).build().unwrap();
        let t1 = ClassTag::new(ClassKind::Tree, Some(1));
        assert_eq!(ext_membership(&two_cycle, t1, ProfileBound::new(4, None)).unwrap(), Membership::NonMember);
        let loop1 = PointedStructure::builder(sig(), 1).edge("R", 0, 0).build().unwrap();
        assert_eq!(ext_membership(&loop1, ClassTag::unbounded(ClassKind::Tree), ProfileBound::new(4, None)).unwrap(), Membership::NonMember);
    }

    #[test]
    fn refutations_and_unknowns() {
        let back = PointedStructure::builder(sig(), 2).edge("R", 1, 0).build().unwrap();
        let tag = ClassTag::unbounded(ClassKind::Connected);
        assert_eq!(ext_membership(&back, tag, ProfileBound::new(2, None)).unwrap(), Membership::Member);
        let split = PointedStructure::builder(sig(), 2).build().unwrap();
        assert_eq!(ext_membership(&split, tag, ProfileBound::new(3, None)).unwrap(), Membership::NonMember);
        let forest = ClassTag::unbounded(ClassKind::Forest);
        assert_eq!(ext_membership(&back, forest, ProfileBound::new(3, None)).unwrap(), Membership::NonMember);
        // no edgeless forest admits an injective image of an edge, but no rule says so
        let chain = PointedStructure::builder(sig(), 2).edge("R", 0, 1).build().unwrap();
        let flat = ClassTag::new(ClassKind::Forest, Some(0));
        assert_eq!(ext_membership(&chain, flat, ProfileBound::new(3, None)).unwrap(), Membership::Unknown);
    }
}
