//! Finite abelian fiber groups and fiber-valued characters of subgroups.
//!
//! The fiber is a product of cyclic groups, written additively here and
//! multiplicatively in reports. A character of a subgroup T is a
//! homomorphism into the fiber; enumeration runs by backtracking over a
//! generating set of T, with an independent abelianization-based count
//! asserted on the result.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::group::{closure, Subgroup};
use crate::{Error, Result};

/// An element of the fiber: one entry per cyclic factor.
pub type FiberElt = Vec<u32>;

/// A finite abelian group, a product of cyclic groups of the given orders.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AbelianFiber {
    pub cyclic_orders: Vec<u32>,
}

impl AbelianFiber {
    pub fn new(cyclic_orders: Vec<u32>) -> Result<Self> {
        if cyclic_orders.iter().any(|&m| m == 0) {
            return Err(Error::Invalid {
                what: "fiber",
                detail: "cyclic factor of order zero".into(),
            });
        }
        Ok(AbelianFiber { cyclic_orders })
    }

    pub fn trivial() -> Self {
        AbelianFiber {
            cyclic_orders: Vec::new(),
        }
    }

    /// Parses `trivial`, `zN`, or products like `z2xz4`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if spec == "trivial" || spec == "1" {
            return Ok(Self::trivial());
        }
        let mut orders = Vec::new();
        for atom in spec.split('x') {
            let m: u32 = atom
                .strip_prefix('z')
                .and_then(|rest| rest.parse().ok())
                .ok_or_else(|| Error::Invalid {
                    what: "fiber spec",
                    detail: format!("`{spec}` (expected trivial, zN, or z2xz3-style products)"),
                })?;
            if m == 0 {
                return Err(Error::Invalid {
                    what: "fiber spec",
                    detail: "cyclic factor of order zero".into(),
                });
            }
            orders.push(m);
        }
        Ok(AbelianFiber {
            cyclic_orders: orders,
        })
    }

    pub fn order(&self) -> u64 {
        self.cyclic_orders.iter().map(|&m| m as u64).product()
    }

    pub fn zero(&self) -> FiberElt {
        vec![0; self.cyclic_orders.len()]
    }

    pub fn is_zero(&self, a: &FiberElt) -> bool {
        a.iter().all(|&x| x == 0)
    }

    pub fn add(&self, a: &FiberElt, b: &FiberElt) -> FiberElt {
        self.cyclic_orders
            .iter()
            .zip(a.iter().zip(b))
            .map(|(&m, (&x, &y))| (x + y) % m)
            .collect()
    }

    pub fn neg(&self, a: &FiberElt) -> FiberElt {
        self.cyclic_orders
            .iter()
            .zip(a)
            .map(|(&m, &x)| (m - x) % m)
            .collect()
    }

    /// All elements, in mixed-radix order starting from zero.
    pub fn elements(&self) -> Vec<FiberElt> {
        let mut out = vec![self.zero()];
        for (i, &m) in self.cyclic_orders.iter().enumerate() {
            let base = std::mem::take(&mut out);
            for elt in base {
                for v in 0..m {
                    let mut next = elt.clone();
                    next[i] = v;
                    out.push(next);
                }
            }
        }
        out
    }

    pub fn spec_string(&self) -> String {
        if self.cyclic_orders.is_empty() {
            "trivial".to_string()
        } else {
            self.cyclic_orders
                .iter()
                .map(|m| format!("z{m}"))
                .collect::<Vec<_>>()
                .join("x")
        }
    }
}

impl fmt::Debug for AbelianFiber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AbelianFiber({})", self.spec_string())
    }
}

/// A homomorphism from a subgroup into the fiber. Values are stored aligned
/// with the sorted member list of the domain.
#[derive(Clone)]
pub struct ACharacter {
    fiber: AbelianFiber,
    domain: Subgroup,
    values: Vec<FiberElt>,
}

impl PartialEq for ACharacter {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain && self.values == other.values
    }
}

impl Eq for ACharacter {}

impl fmt::Debug for ACharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ACharacter({:?} -> {:?})", self.domain, self.values)
    }
}

impl ACharacter {
    pub fn new(fiber: AbelianFiber, domain: Subgroup, values: Vec<FiberElt>) -> Result<Self> {
        if values.len() != domain.order() {
            return Err(Error::Invalid {
                what: "character",
                detail: "value table does not cover the domain".into(),
            });
        }
        let character = ACharacter {
            fiber,
            domain,
            values,
        };
        if !character.is_homomorphism() {
            return Err(Error::Invalid {
                what: "character",
                detail: "value table is not a homomorphism".into(),
            });
        }
        Ok(character)
    }

    fn from_parts_unchecked(fiber: AbelianFiber, domain: Subgroup, values: Vec<FiberElt>) -> Self {
        let character = ACharacter {
            fiber,
            domain,
            values,
        };
        debug_assert!(character.is_homomorphism());
        character
    }

    /// The constant-zero character.
    pub fn trivial(fiber: AbelianFiber, domain: Subgroup) -> Self {
        let values = vec![fiber.zero(); domain.order()];
        ACharacter {
            fiber,
            domain,
            values,
        }
    }

    pub fn fiber(&self) -> &AbelianFiber {
        &self.fiber
    }

    pub fn domain(&self) -> &Subgroup {
        &self.domain
    }

    /// Value table, aligned with the domain's member list.
    pub fn values(&self) -> &[FiberElt] {
        &self.values
    }

    /// Value at an element of the parent group; the element must belong to
    /// the domain.
    pub fn value(&self, element: usize) -> Result<&FiberElt> {
        let pos = self
            .domain
            .member_position(element)
            .ok_or_else(|| Error::BadElement {
                group: self.domain.parent().name().to_string(),
                index: element,
            })?;
        Ok(&self.values[pos])
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|v| self.fiber.is_zero(v))
    }

    pub fn is_homomorphism(&self) -> bool {
        let group = self.domain.parent();
        let members = self.domain.members();
        if let Some(pos) = self.domain.member_position(0) {
            if !self.fiber.is_zero(&self.values[pos]) {
                return false;
            }
        }
        for (i, &a) in members.iter().enumerate() {
            for (j, &b) in members.iter().enumerate() {
                let ab = group.mul(a, b);
                let Some(k) = self.domain.member_position(ab) else {
                    return false;
                };
                let sum = self.fiber.add(&self.values[i], &self.values[j]);
                if self.values[k] != sum {
                    return false;
                }
            }
        }
        true
    }

    /// The conjugate character on the conjugate subgroup: the value at
    /// x t x^-1 is the value at t.
    pub fn conjugate(&self, x: usize) -> ACharacter {
        let group = self.domain.parent();
        let mut pairs: Vec<(usize, FiberElt)> = self
            .domain
            .members()
            .iter()
            .zip(&self.values)
            .map(|(&t, v)| (group.conj(x, t), v.clone()))
            .collect();
        pairs.sort_by_key(|(t, _)| *t);
        let domain = self.domain.conjugate(x);
        let values = pairs.into_iter().map(|(_, v)| v).collect();
        ACharacter::from_parts_unchecked(self.fiber.clone(), domain, values)
    }

    /// `[[element, value-tuple], ...]` per the documented wire form.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.domain
                .members()
                .iter()
                .zip(&self.values)
                .map(|(&t, v)| serde_json::json!([t, v]))
                .collect(),
        )
    }
}

/// A minimal generating sequence for a subgroup, found greedily.
fn generating_set(t: &Subgroup) -> Result<Vec<usize>> {
    let mut gens = Vec::new();
    let mut span = closure(t.parent(), &[])?;
    for &m in t.members() {
        if !span.contains(m) {
            gens.push(m);
            let mut seed = gens.clone();
            seed.extend_from_slice(span.members());
            span = closure(t.parent(), &seed)?;
        }
    }
    Ok(gens)
}

/// Every homomorphism from the subgroup into the fiber, ordered by value
/// table. Backtracks over generator assignments, propagates along the
/// multiplication table, and verifies the full homomorphism property on
/// each completed table. The count is asserted against the independent
/// abelianization-based formula.
pub fn hom_enumerate(
    t: &Subgroup,
    fiber: &AbelianFiber,
    order_cap: usize,
) -> Result<Vec<ACharacter>> {
    if t.order() > order_cap {
        return Err(Error::OrderCap {
            name: t.parent().name().to_string(),
            order: t.order(),
            cap: order_cap,
        });
    }
    let group = t.parent();
    let gens = generating_set(t)?;
    let fiber_elements = fiber.elements();
    let mut out = Vec::new();
    let mut assignment: Vec<FiberElt> = Vec::with_capacity(gens.len());
    assign_generators(t, fiber, &gens, &fiber_elements, &mut assignment, &mut out);

    out.sort_by(|a, b| a.values.cmp(&b.values));
    out.dedup_by(|a, b| a.values == b.values);

    // Independent count: |Hom(T, A)| factors over the cyclic pieces of A as
    // the number of elements of the abelianization killed by each order.
    let commutators: Vec<usize> = t
        .members()
        .iter()
        .flat_map(|&a| {
            t.members().iter().map(move |&b| {
                group.mul(group.mul(a, b), group.mul(group.inv(a), group.inv(b)))
            })
        })
        .collect();
    let derived = closure(group, &commutators)?;
    let mut expected: u64 = 1;
    for &m in &fiber.cyclic_orders {
        let killed = t
            .members()
            .iter()
            .filter(|&&x| {
                let mut pow = 0usize;
                for _ in 0..m {
                    pow = group.mul(pow, x);
                }
                derived.contains(pow)
            })
            .count();
        expected *= (killed / derived.order()) as u64;
    }
    assert_eq!(
        out.len() as u64,
        expected,
        "homomorphism count disagrees with the abelianization count"
    );
    Ok(out)
}

fn assign_generators(
    t: &Subgroup,
    fiber: &AbelianFiber,
    gens: &[usize],
    fiber_elements: &[FiberElt],
    assignment: &mut Vec<FiberElt>,
    out: &mut Vec<ACharacter>,
) {
    if assignment.len() == gens.len() {
        if let Some(values) = propagate(t, fiber, gens, assignment) {
            out.push(ACharacter::from_parts_unchecked(
                fiber.clone(),
                t.clone(),
                values,
            ));
        }
        return;
    }
    for elt in fiber_elements {
        assignment.push(elt.clone());
        assign_generators(t, fiber, gens, fiber_elements, assignment, out);
        assignment.pop();
    }
}

/// Extends a generator assignment to the whole subgroup, or reports a
/// conflict. The completed table is verified on all pairs.
fn propagate(
    t: &Subgroup,
    fiber: &AbelianFiber,
    gens: &[usize],
    assignment: &[FiberElt],
) -> Option<Vec<FiberElt>> {
    let group = t.parent();
    let mut values: Vec<Option<FiberElt>> = vec![None; t.order()];
    values[t.member_position(0).unwrap()] = Some(fiber.zero());
    let mut queue = vec![0usize];
    while let Some(x) = queue.pop() {
        let vx = values[t.member_position(x).unwrap()].clone().unwrap();
        for (g, vg) in gens.iter().zip(assignment) {
            let xg = group.mul(x, *g);
            let proposed = fiber.add(&vx, vg);
            let slot = &mut values[t.member_position(xg).unwrap()];
            match slot {
                Some(existing) => {
                    if *existing != proposed {
                        return None;
                    }
                }
                None => {
                    *slot = Some(proposed);
                    queue.push(xg);
                }
            }
        }
    }
    let values: Vec<FiberElt> = values.into_iter().collect::<Option<_>>()?;
    let candidate = ACharacter {
        fiber: fiber.clone(),
        domain: t.clone(),
        values,
    };
    candidate.is_homomorphism().then_some(candidate.values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{all_subgroups, build_group, FiniteGroup, Subgroup};
    use std::sync::Arc;

    #[test]
    fn fiber_parsing_and_arithmetic() {
        let trivial = AbelianFiber::parse("trivial").unwrap();
        assert_eq!(trivial.order(), 1);
        assert_eq!(trivial.elements(), vec![Vec::<u32>::new()]);

        let z6 = AbelianFiber::parse("z2xz3").unwrap();
        assert_eq!(z6.order(), 6);
        let a = vec![1, 2];
        let b = vec![1, 2];
        assert_eq!(z6.add(&a, &b), vec![0, 1]);
        assert_eq!(z6.neg(&a), vec![1, 1]);
        assert!(AbelianFiber::parse("q8").is_err());
    }

    #[test]
    fn trivial_domain_has_one_character() {
        let c2 = build_group("c2").unwrap();
        let t = Subgroup::new(Arc::clone(&c2), vec![0]).unwrap();
        let homs = hom_enumerate(&t, &AbelianFiber::parse("z2").unwrap(), 64).unwrap();
        assert_eq!(homs.len(), 1);
        assert!(homs[0].is_trivial());
    }

    #[test]
    fn c2_to_z2_has_two_characters() {
        let c2 = build_group("c2").unwrap();
        let t = Subgroup::new(Arc::clone(&c2), vec![0, 1]).unwrap();
        let homs = hom_enumerate(&t, &AbelianFiber::parse("z2").unwrap(), 64).unwrap();
        assert_eq!(homs.len(), 2);
        assert!(homs[0].is_trivial());
        assert_eq!(homs[1].value(1).unwrap(), &vec![1]);
    }

    #[test]
    fn s3_to_z3_sees_only_the_trivial_character() {
        let s3 = build_group("s3").unwrap();
        let whole = Subgroup::new(Arc::clone(&s3), (0..6).collect()).unwrap();
        let homs = hom_enumerate(&whole, &AbelianFiber::parse("z3").unwrap(), 64).unwrap();
        assert_eq!(homs.len(), 1);

        // The abelianization is c2, so z2 sees two.
        let homs = hom_enumerate(&whole, &AbelianFiber::parse("z2").unwrap(), 64).unwrap();
        assert_eq!(homs.len(), 2);
    }

    #[test]
    fn every_enumerated_character_is_a_homomorphism() {
        let g = build_group("s3").unwrap();
        let fiber = AbelianFiber::parse("z2xz2").unwrap();
        for t in all_subgroups(&g, 64).unwrap() {
            for chi in hom_enumerate(&t, &fiber, 64).unwrap() {
                assert!(chi.is_homomorphism());
            }
        }
    }

    #[test]
    fn hom_counts_multiply_over_fiber_factors() {
        let z2 = AbelianFiber::parse("z2").unwrap();
        let z3 = AbelianFiber::parse("z3").unwrap();
        let z2z2 = AbelianFiber::parse("z2xz2").unwrap();
        for spec in ["c2xc2", "s3", "c2xc3"] {
            let g = build_group(spec).unwrap();
            for t in all_subgroups(&g, 64).unwrap() {
                let n2 = hom_enumerate(&t, &z2, 64).unwrap().len();
                let n3 = hom_enumerate(&t, &z3, 64).unwrap().len();
                let n22 = hom_enumerate(&t, &z2z2, 64).unwrap().len();
                assert_eq!(n22, n2 * n2);
                // z2 and z3 factors are independent; z6 = z2 x z3.
                let z6 = AbelianFiber::parse("z2xz3").unwrap();
                assert_eq!(hom_enumerate(&t, &z6, 64).unwrap().len(), n2 * n3);
            }
        }
    }

    #[test]
    fn conjugation_round_trip_and_center() {
        let s3 = build_group("s3").unwrap();
        let s3s3 = FiniteGroup::direct_product(&s3, &s3);
        let fiber = AbelianFiber::parse("z2").unwrap();
        let diag: Vec<usize> = (0..6).map(|y| s3s3.pair_join(y, y).unwrap()).collect();
        let diag = Subgroup::new(Arc::clone(&s3s3), diag).unwrap();

        for chi in hom_enumerate(&diag, &fiber, 64).unwrap() {
            for x in 0..36 {
                let back = chi.conjugate(x).conjugate(s3s3.inv(x));
                assert_eq!(back, chi);
            }
        }

        // Conjugating by a central element (abelian case) fixes characters.
        let v4 = build_group("c2xc2").unwrap();
        let whole = Subgroup::new(Arc::clone(&v4), (0..4).collect()).unwrap();
        for chi in hom_enumerate(&whole, &fiber, 64).unwrap() {
            for x in 0..4 {
                assert_eq!(chi.conjugate(x), chi);
            }
        }
    }

    #[test]
    fn sign_character_conjugates_onto_the_twisted_diagonal() {
        let s3 = build_group("s3").unwrap();
        let s3s3 = FiniteGroup::direct_product(&s3, &s3);
        let fiber = AbelianFiber::parse("z2").unwrap();
        let diag: Vec<usize> = (0..6).map(|y| s3s3.pair_join(y, y).unwrap()).collect();
        let diag = Subgroup::new(Arc::clone(&s3s3), diag).unwrap();

        let homs = hom_enumerate(&diag, &fiber, 64).unwrap();
        assert_eq!(homs.len(), 2);
        let sign = &homs[1];

        let t = (0..6).find(|&a| s3.element_order(a) == 2).unwrap();
        let x = s3s3.pair_join(t, 0).unwrap();
        let moved = sign.conjugate(x);
        assert_ne!(moved.domain(), sign.domain());
        for (&orig, &img) in diag.members().iter().zip(
            diag.members()
                .iter()
                .map(|&m| s3s3.conj(x, m))
                .collect::<Vec<_>>()
                .iter(),
        ) {
            assert_eq!(moved.value(img).unwrap(), sign.value(orig).unwrap());
        }
    }
}
