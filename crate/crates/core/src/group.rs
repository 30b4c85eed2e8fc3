//! Finite groups as explicit multiplication tables, and the combinatorial
//! primitives every later module consumes: subgroups of direct products,
//! projections and kernels, conjugation, double cosets, conjugacy classes.
//!
//! Element 0 is always the identity. Presets fix their element orderings, so
//! anything derived from them is byte-stable across runs. Tables are fully
//! validated at load, including the O(n^3) associativity scan; inputs are
//! tiny and correctness is paramount.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// How a direct product remembers its factors. Index arithmetic gives the
/// bijection: the pair (f, g) sits at index `f * |right| + g`.
#[derive(Clone)]
pub struct ProductStructure {
    pub left: Arc<FiniteGroup>,
    pub right: Arc<FiniteGroup>,
}

/// A finite group given by its multiplication table.
pub struct FiniteGroup {
    name: String,
    elements: Vec<String>,
    table: Vec<Vec<usize>>,
    inverse: Vec<usize>,
    product: Option<ProductStructure>,
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self, other)
            || (self.name == other.name
                && self.elements == other.elements
                && self.table == other.table)
    }
}

impl Eq for FiniteGroup {}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteGroup({}, order {})", self.name, self.order())
    }
}

impl FiniteGroup {
    /// Validates a table against the group axioms and builds the group.
    /// The first violated axiom is reported with witness indices.
    pub fn from_table(
        name: impl Into<String>,
        elements: Vec<String>,
        table: Vec<Vec<usize>>,
    ) -> Result<Arc<Self>> {
        let name = name.into();
        let n = elements.len();
        if n == 0 {
            return Err(Error::BadTable("empty element list".into()));
        }
        if table.len() != n || table.iter().any(|row| row.len() != n) {
            return Err(Error::BadTable(format!("table is not {n}x{n}")));
        }
        if let Some((i, j)) = table
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, &v)| (i, j, v)))
            .find_map(|(i, j, v)| (v >= n).then_some((i, j)))
        {
            return Err(Error::BadTable(format!("entry at ({i}, {j}) out of range")));
        }
        for j in 0..n {
            if table[0][j] != j {
                return Err(Error::GroupAxiom {
                    axiom: "identity law (left)",
                    witness: vec![0, j],
                });
            }
            if table[j][0] != j {
                return Err(Error::GroupAxiom {
                    axiom: "identity law (right)",
                    witness: vec![j, 0],
                });
            }
        }
        // Rows and columns must be permutations; this is cancellation and
        // gives inverses once associativity holds.
        for i in 0..n {
            let mut seen_row = vec![false; n];
            let mut seen_col = vec![false; n];
            for j in 0..n {
                if seen_row[table[i][j]] {
                    return Err(Error::GroupAxiom {
                        axiom: "row is not a permutation",
                        witness: vec![i, j],
                    });
                }
                seen_row[table[i][j]] = true;
                if seen_col[table[j][i]] {
                    return Err(Error::GroupAxiom {
                        axiom: "column is not a permutation",
                        witness: vec![j, i],
                    });
                }
                seen_col[table[j][i]] = true;
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if table[table[i][j]][k] != table[i][table[j][k]] {
                        return Err(Error::GroupAxiom {
                            axiom: "associativity",
                            witness: vec![i, j, k],
                        });
                    }
                }
            }
        }
        let mut inverse = vec![0; n];
        for i in 0..n {
            inverse[i] = (0..n).find(|&j| table[i][j] == 0).expect("row permutation");
        }
        Ok(Arc::new(FiniteGroup {
            name,
            elements,
            table,
            inverse,
            product: None,
        }))
    }

    /// The direct product, with componentwise multiplication and the pair
    /// (identity, identity) at index 0.
    pub fn direct_product(left: &Arc<FiniteGroup>, right: &Arc<FiniteGroup>) -> Arc<Self> {
        let ln = left.order();
        let rn = right.order();
        let n = ln * rn;
        let mut elements = Vec::with_capacity(n);
        for f in 0..ln {
            for g in 0..rn {
                elements.push(format!("({},{})", left.elements[f], right.elements[g]));
            }
        }
        let mut table = vec![vec![0; n]; n];
        for a in 0..n {
            let (fa, ga) = (a / rn, a % rn);
            for b in 0..n {
                let (fb, gb) = (b / rn, b % rn);
                table[a][b] = left.table[fa][fb] * rn + right.table[ga][gb];
            }
        }
        let mut inverse = vec![0; n];
        for a in 0..n {
            let (f, g) = (a / rn, a % rn);
            inverse[a] = left.inverse[f] * rn + right.inverse[g];
        }
        Arc::new(FiniteGroup {
            name: format!("{}x{}", left.name, right.name),
            elements,
            table,
            inverse,
            product: Some(ProductStructure {
                left: Arc::clone(left),
                right: Arc::clone(right),
            }),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.elements[i]
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    /// x a x^-1.
    pub fn conj(&self, x: usize, a: usize) -> usize {
        self.mul(self.mul(x, a), self.inverse[x])
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (a..n).all(|b| self.table[a][b] == self.table[b][a]))
    }

    pub fn product_structure(&self) -> Option<&ProductStructure> {
        self.product.as_ref()
    }

    /// Splits an index of a direct product into factor indices.
    pub fn pair_split(&self, i: usize) -> Result<(usize, usize)> {
        let p = self
            .product
            .as_ref()
            .ok_or_else(|| Error::NotAProduct(self.name.clone()))?;
        let rn = p.right.order();
        Ok((i / rn, i % rn))
    }

    /// Joins factor indices into an index of the direct product.
    pub fn pair_join(&self, f: usize, g: usize) -> Result<usize> {
        let p = self
            .product
            .as_ref()
            .ok_or_else(|| Error::NotAProduct(self.name.clone()))?;
        Ok(f * p.right.order() + g)
    }

    pub fn to_document(&self) -> GroupDocument {
        GroupDocument {
            name: self.name.clone(),
            elements: self.elements.clone(),
            table: self.table.clone(),
        }
    }
}

/// The on-disk form of a group: `{"name", "elements", "table"}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupDocument {
    pub name: String,
    pub elements: Vec<String>,
    pub table: Vec<Vec<usize>>,
}

impl GroupDocument {
    pub fn build(self) -> Result<Arc<FiniteGroup>> {
        FiniteGroup::from_table(self.name, self.elements, self.table)
    }
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

/// Builds a group from a preset spec.
///
/// Atoms: `cyclic:n` (shorthand `cN`), `symmetric:n` (`sN`), `dihedral:m`
/// (`dN`, m the order, even), `klein4`, `quaternion8` (`q8`). Atoms joined
/// by `x` form left-associated direct products, e.g. `c2xc2`.
pub fn build_group(spec: &str) -> Result<Arc<FiniteGroup>> {
    let spec = spec.trim();
    let parts: Vec<&str> = spec.split('x').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::UnknownSpec(spec.into()));
    }
    let mut group = build_atom(parts[0])?;
    for part in &parts[1..] {
        let right = build_atom(part)?;
        group = FiniteGroup::direct_product(&group, &right);
    }
    Ok(group)
}

fn build_atom(spec: &str) -> Result<Arc<FiniteGroup>> {
    let unknown = || Error::UnknownSpec(spec.into());
    if let Some(n) = spec.strip_prefix("cyclic:").or_else(|| {
        spec.strip_prefix('c')
            .filter(|rest| rest.chars().all(|c| c.is_ascii_digit()))
    }) {
        let n: usize = n.parse().map_err(|_| unknown())?;
        if n == 0 {
            return Err(unknown());
        }
        return cyclic(n);
    }
    if let Some(n) = spec.strip_prefix("symmetric:").or_else(|| {
        spec.strip_prefix('s')
            .filter(|rest| rest.chars().all(|c| c.is_ascii_digit()))
    }) {
        let n: usize = n.parse().map_err(|_| unknown())?;
        if n == 0 || n > 6 {
            return Err(unknown());
        }
        return symmetric(n);
    }
    if let Some(m) = spec.strip_prefix("dihedral:").or_else(|| {
        spec.strip_prefix('d')
            .filter(|rest| rest.chars().all(|c| c.is_ascii_digit()))
    }) {
        let m: usize = m.parse().map_err(|_| unknown())?;
        if m < 2 || m % 2 != 0 {
            return Err(unknown());
        }
        return dihedral(m);
    }
    match spec {
        "klein4" => klein4(),
        "quaternion8" | "q8" => quaternion8(),
        _ => Err(unknown()),
    }
}

fn cyclic(n: usize) -> Result<Arc<FiniteGroup>> {
    let elements = (0..n)
        .map(|i| match i {
            0 => "1".to_string(),
            1 => "g".to_string(),
            _ => format!("g^{i}"),
        })
        .collect();
    let table = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
    FiniteGroup::from_table(format!("c{n}"), elements, table)
}

fn klein4() -> Result<Arc<FiniteGroup>> {
    let elements = vec!["1".into(), "a".into(), "b".into(), "ab".into()];
    let table = (0..4).map(|i| (0..4).map(|j| i ^ j).collect()).collect();
    FiniteGroup::from_table("klein4", elements, table)
}

fn dihedral(order: usize) -> Result<Arc<FiniteGroup>> {
    // Index i < n is the rotation r^i, index n + i the reflection r^i s.
    let n = order / 2;
    let mut elements = Vec::with_capacity(order);
    for i in 0..n {
        elements.push(match i {
            0 => "1".to_string(),
            1 => "r".to_string(),
            _ => format!("r^{i}"),
        });
    }
    for i in 0..n {
        elements.push(match i {
            0 => "s".to_string(),
            1 => "rs".to_string(),
            _ => format!("r^{i}s"),
        });
    }
    let idx = |rot: usize, refl: bool| if refl { n + rot % n } else { rot % n };
    let mut table = vec![vec![0; order]; order];
    for a in 0..order {
        let (ra, fa) = (a % n, a >= n);
        for b in 0..order {
            let (rb, fb) = (b % n, b >= n);
            // r^a s r^b = r^(a-b) s
            let rot = if fa { (ra + n - rb % n) % n } else { (ra + rb) % n };
            table[a][b] = idx(rot, fa ^ fb);
        }
    }
    FiniteGroup::from_table(format!("d{order}"), elements, table)
}

fn symmetric(n: usize) -> Result<Arc<FiniteGroup>> {
    // Elements are the permutations of 0..n in lexicographic order of their
    // one-line images, which puts the identity first. Labels use 1-based
    // cycle notation.
    let perms = permutations(n);
    let index_of = |p: &[usize]| perms.binary_search_by(|q| q.as_slice().cmp(p)).unwrap();
    let elements = perms.iter().map(|p| cycle_label(p)).collect();
    let mut table = vec![vec![0; perms.len()]; perms.len()];
    for (a, pa) in perms.iter().enumerate() {
        for (b, pb) in perms.iter().enumerate() {
            // (pa . pb)(x) = pa(pb(x))
            let composed: Vec<usize> = (0..n).map(|x| pa[pb[x]]).collect();
            table[a][b] = index_of(&composed);
        }
    }
    FiniteGroup::from_table(format!("s{n}"), elements, table)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    loop {
        out.push(current.clone());
        // next_permutation in lexicographic order
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| current[i] < current[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| current[j] > current[i]).unwrap();
        current.swap(i, j);
        current[i + 1..].reverse();
    }
    out
}

fn cycle_label(perm: &[usize]) -> String {
    let n = perm.len();
    let mut seen = vec![false; n];
    let mut label = String::new();
    for start in 0..n {
        if seen[start] || perm[start] == start {
            seen[start] = true;
            continue;
        }
        label.push('(');
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            label.push_str(&(x + 1).to_string());
            x = perm[x];
        }
        label.push(')');
    }
    if label.is_empty() {
        label.push('e');
    }
    label
}

fn quaternion8() -> Result<Arc<FiniteGroup>> {
    // Index 2*axis + sign, axes ordered 1, i, j, k.
    let elements = vec![
        "1".into(), "-1".into(), "i".into(), "-i".into(),
        "j".into(), "-j".into(), "k".into(), "-k".into(),
    ];
    // axis_mul[a][b] = (axis, extra sign) for the product of unit axes.
    let axis_mul = [
        [(0, 0), (1, 0), (2, 0), (3, 0)],
        [(1, 0), (0, 1), (3, 0), (2, 1)],
        [(2, 0), (3, 1), (0, 1), (1, 0)],
        [(3, 0), (2, 0), (1, 1), (0, 1)],
    ];
    let mut table = vec![vec![0; 8]; 8];
    for a in 0..8 {
        for b in 0..8 {
            let (axis, extra) = axis_mul[a / 2][b / 2];
            let sign = (a % 2) ^ (b % 2) ^ extra;
            table[a][b] = 2 * axis + sign;
        }
    }
    FiniteGroup::from_table("q8", elements, table)
}

// ---------------------------------------------------------------------------
// Subgroups
// ---------------------------------------------------------------------------

/// A subgroup, stored as a strictly increasing list of element indices.
#[derive(Clone)]
pub struct Subgroup {
    parent: Arc<FiniteGroup>,
    members: Vec<usize>,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.members == other.members && self.parent == other.parent
    }
}

impl Eq for Subgroup {}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subgroup({} <= {})", self.describe(), self.parent.name())
    }
}

impl Subgroup {
    /// Validates closure under products and inverses.
    pub fn new(parent: Arc<FiniteGroup>, mut members: Vec<usize>) -> Result<Self> {
        members.sort_unstable();
        members.dedup();
        let fail = |members: &[usize], reason| Error::NotASubgroup {
            group: parent.name().to_string(),
            members: members.to_vec(),
            reason,
        };
        if members.iter().any(|&m| m >= parent.order()) {
            return Err(fail(&members, "member index out of range"));
        }
        if members.binary_search(&0).is_err() {
            return Err(fail(&members, "missing the identity"));
        }
        for &a in &members {
            if members.binary_search(&parent.inv(a)).is_err() {
                return Err(fail(&members, "not closed under inversion"));
            }
            for &b in &members {
                if members.binary_search(&parent.mul(a, b)).is_err() {
                    return Err(fail(&members, "not closed under multiplication"));
                }
            }
        }
        // Lagrange, as a sanity assertion on the checks above.
        assert_eq!(parent.order() % members.len(), 0);
        Ok(Subgroup { parent, members })
    }

    /// For internally-constructed member lists that are subgroups by
    /// construction (conjugates, closures, star products).
    pub(crate) fn from_sorted_unchecked(parent: Arc<FiniteGroup>, members: Vec<usize>) -> Self {
        debug_assert!(Subgroup::new(Arc::clone(&parent), members.clone()).is_ok());
        Subgroup { parent, members }
    }

    pub fn parent(&self) -> &Arc<FiniteGroup> {
        &self.parent
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    pub fn is_whole_group(&self) -> bool {
        self.members.len() == self.parent.order()
    }

    /// Position of a member within the sorted member list.
    pub fn member_position(&self, i: usize) -> Option<usize> {
        self.members.binary_search(&i).ok()
    }

    /// Dense membership table, for hot loops.
    pub fn membership(&self) -> Vec<bool> {
        let mut mask = vec![false; self.parent.order()];
        for &m in &self.members {
            mask[m] = true;
        }
        mask
    }

    /// {x u x^-1 : u in U}.
    pub fn conjugate(&self, x: usize) -> Subgroup {
        let mut members: Vec<usize> = self
            .members
            .iter()
            .map(|&u| self.parent.conj(x, u))
            .collect();
        members.sort_unstable();
        Subgroup {
            parent: Arc::clone(&self.parent),
            members,
        }
    }

    pub fn intersection(&self, other: &Subgroup) -> Result<Subgroup> {
        self.check_same_parent(other)?;
        let members = self
            .members
            .iter()
            .copied()
            .filter(|&m| other.contains(m))
            .collect();
        Ok(Subgroup {
            parent: Arc::clone(&self.parent),
            members,
        })
    }

    fn check_same_parent(&self, other: &Subgroup) -> Result<()> {
        if self.parent != other.parent {
            return Err(Error::MismatchedParents(
                self.parent.name().to_string(),
                other.parent.name().to_string(),
            ));
        }
        Ok(())
    }

    fn describe(&self) -> String {
        format!(
            "{{{}}}",
            self.members
                .iter()
                .map(|m| m.to_string())
                .collect::<Vec<_>>()
                .join(",")
        )
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "parent": self.parent.name(),
            "members": self.members,
        })
    }
}

/// The smallest subgroup containing the seed, by fixed-point iteration under
/// products and inverses. The empty seed yields the trivial subgroup.
pub fn closure(parent: &Arc<FiniteGroup>, seed: &[usize]) -> Result<Subgroup> {
    for &s in seed {
        if s >= parent.order() {
            return Err(Error::BadElement {
                group: parent.name().to_string(),
                index: s,
            });
        }
    }
    let mut in_set = vec![false; parent.order()];
    let mut members = vec![0usize];
    in_set[0] = true;
    let mut queue: Vec<usize> = Vec::with_capacity(seed.len() + 1);
    for &s in seed {
        if !in_set[s] {
            in_set[s] = true;
            members.push(s);
            queue.push(s);
        }
    }
    while let Some(x) = queue.pop() {
        let candidates: Vec<usize> = members
            .iter()
            .flat_map(|&m| [parent.mul(x, m), parent.mul(m, x)])
            .chain([parent.inv(x)])
            .collect();
        for c in candidates {
            if !in_set[c] {
                in_set[c] = true;
                members.push(c);
                queue.push(c);
            }
        }
    }
    members.sort_unstable();
    Ok(Subgroup::from_sorted_unchecked(Arc::clone(parent), members))
}

/// Every subgroup, found by iterated extension: all cyclic subgroups first,
/// then repeatedly close each known subgroup together with each element
/// until nothing new appears. Output is ordered by size, then by member
/// list, and is complete: any subgroup arises by adjoining its generators
/// one at a time, and each intermediate closure is already in the set.
pub fn all_subgroups(parent: &Arc<FiniteGroup>, order_cap: usize) -> Result<Vec<Subgroup>> {
    if parent.order() > order_cap {
        return Err(Error::OrderCap {
            name: parent.name().to_string(),
            order: parent.order(),
            cap: order_cap,
        });
    }
    use std::collections::BTreeSet;
    let mut known: BTreeSet<Vec<usize>> = BTreeSet::new();
    for x in 0..parent.order() {
        known.insert(closure(parent, &[x])?.members);
    }
    let mut frontier: Vec<Vec<usize>> = known.iter().cloned().collect();
    while !frontier.is_empty() {
        let mut fresh = Vec::new();
        for base in &frontier {
            for x in 0..parent.order() {
                if base.binary_search(&x).is_ok() {
                    continue;
                }
                let mut seed = base.clone();
                seed.push(x);
                let extended = closure(parent, &seed)?.members;
                if known.insert(extended.clone()) {
                    fresh.push(extended);
                }
            }
        }
        frontier = fresh;
    }
    let mut out: Vec<Subgroup> = known
        .into_iter()
        .map(|members| Subgroup::from_sorted_unchecked(Arc::clone(parent), members))
        .collect();
    out.sort_by(|a, b| (a.order(), a.members()).cmp(&(b.order(), b.members())));
    Ok(out)
}

/// The four Goursat invariants of a subgroup of a direct product.
pub struct ProjectionsKernels {
    /// Image of the projection to the left factor.
    pub p1: Subgroup,
    /// Image of the projection to the right factor.
    pub p2: Subgroup,
    /// {f : (f, 1) in U}, inside the left factor.
    pub k1: Subgroup,
    /// {g : (1, g) in U}, inside the right factor.
    pub k2: Subgroup,
}

pub fn projections_and_kernels(u: &Subgroup) -> Result<ProjectionsKernels> {
    let parent = u.parent();
    let ps = parent
        .product_structure()
        .ok_or_else(|| Error::NotAProduct(parent.name().to_string()))?;
    let (left, right) = (Arc::clone(&ps.left), Arc::clone(&ps.right));
    let mut p1 = Vec::new();
    let mut p2 = Vec::new();
    let mut k1 = Vec::new();
    let mut k2 = Vec::new();
    for &m in u.members() {
        let (f, g) = parent.pair_split(m)?;
        p1.push(f);
        p2.push(g);
        if g == 0 {
            k1.push(f);
        }
        if f == 0 {
            k2.push(g);
        }
    }
    p1.sort_unstable();
    p1.dedup();
    p2.sort_unstable();
    p2.dedup();
    let out = ProjectionsKernels {
        p1: Subgroup::from_sorted_unchecked(Arc::clone(&left), p1),
        p2: Subgroup::from_sorted_unchecked(Arc::clone(&right), p2),
        k1: Subgroup::from_sorted_unchecked(left, k1),
        k2: Subgroup::from_sorted_unchecked(right, k2),
    };
    // Goursat: |U| = |p1|.|k2| = |p2|.|k1|.
    assert_eq!(u.order(), out.p1.order() * out.k2.order());
    assert_eq!(u.order(), out.p2.order() * out.k1.order());
    Ok(out)
}

/// One double coset P g Q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleCoset {
    /// The minimum index in the coset.
    pub rep: usize,
    pub size: usize,
}

/// Representatives (minimal in their coset, listed increasing) and sizes of
/// the double cosets P g Q. The sizes always sum to the group order.
pub fn double_cosets(p: &Subgroup, q: &Subgroup) -> Result<Vec<DoubleCoset>> {
    if p.parent() != q.parent() {
        return Err(Error::MismatchedParents(
            p.parent().name().to_string(),
            q.parent().name().to_string(),
        ));
    }
    let group = p.parent();
    let n = group.order();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for g in 0..n {
        if seen[g] {
            continue;
        }
        let mut size = 0;
        for &a in p.members() {
            let ag = group.mul(a, g);
            for &b in q.members() {
                let x = group.mul(ag, b);
                if !seen[x] {
                    seen[x] = true;
                    size += 1;
                }
            }
        }
        out.push(DoubleCoset { rep: g, size });
    }
    debug_assert_eq!(out.iter().map(|c| c.size).sum::<usize>(), n);
    Ok(out)
}

/// |PQ| = |P| |Q| / |P n Q|, as a set size; PQ need not be a subgroup.
pub fn set_product_size(p: &Subgroup, q: &Subgroup) -> Result<usize> {
    let meet = p.intersection(q)?;
    Ok(p.order() * q.order() / meet.order())
}

/// Conjugacy classes with minimal-index representatives, classes ordered by
/// representative.
pub fn conjugacy_classes(group: &Arc<FiniteGroup>) -> Vec<Vec<usize>> {
    let n = group.order();
    let mut assigned = vec![false; n];
    let mut classes = Vec::new();
    for a in 0..n {
        if assigned[a] {
            continue;
        }
        let mut class: Vec<usize> = (0..n).map(|x| group.conj(x, a)).collect();
        class.sort_unstable();
        class.dedup();
        for &c in &class {
            assigned[c] = true;
        }
        classes.push(class);
    }
    classes
}

/// Element index -> representative (minimum index) of its conjugacy class.
pub fn class_map(group: &Arc<FiniteGroup>) -> Vec<usize> {
    let mut map = vec![0; group.order()];
    for class in conjugacy_classes(group) {
        let rep = class[0];
        for member in class {
            map[member] = rep;
        }
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_presets_are_the_forced_tables() {
        let c1 = build_group("cyclic:1").unwrap();
        assert_eq!(c1.order(), 1);
        assert_eq!(c1.table, vec![vec![0]]);

        let c2 = build_group("c2").unwrap();
        assert_eq!(c2.table, vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn symmetric_three_has_three_classes() {
        let s3 = build_group("symmetric:3").unwrap();
        assert_eq!(s3.order(), 6);
        let classes = conjugacy_classes(&s3);
        assert_eq!(classes.len(), 3);
        let mut sizes: Vec<usize> = classes.iter().map(|c| c.len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 2, 3]);
    }

    #[test]
    fn product_with_trivial_factor_relabels() {
        let c1 = build_group("c1").unwrap();
        let s3 = build_group("s3").unwrap();
        let p = FiniteGroup::direct_product(&c1, &s3);
        assert_eq!(p.order(), 6);
        for a in 0..6 {
            for b in 0..6 {
                assert_eq!(p.mul(a, b), s3.mul(a, b));
            }
        }
    }

    #[test]
    fn klein_product_is_all_self_inverse() {
        let c2 = build_group("c2").unwrap();
        let v4 = FiniteGroup::direct_product(&c2, &c2);
        assert_eq!(v4.order(), 4);
        for a in 1..4 {
            assert_eq!(v4.mul(a, a), 0);
        }
    }

    #[test]
    fn c2_times_c3_has_an_order_six_element() {
        let p = build_group("c2xc3").unwrap();
        assert_eq!(p.order(), 6);
        assert!(p.is_abelian());
        assert!((0..6).any(|a| p.element_order(a) == 6));
    }

    #[test]
    fn klein4_matches_c2xc2_up_to_labels() {
        let k = build_group("klein4").unwrap();
        let p = build_group("c2xc2").unwrap();
        assert_eq!(k.table, p.table);
    }

    #[test]
    fn dihedral_and_quaternion_presets_validate() {
        let d6 = build_group("dihedral:6").unwrap();
        assert_eq!(d6.order(), 6);
        assert!(!d6.is_abelian());
        let q8 = build_group("q8").unwrap();
        assert_eq!(q8.order(), 8);
        // Exactly one element of order 2 in q8.
        assert_eq!((0..8).filter(|&a| q8.element_order(a) == 2).count(), 1);
    }

    #[test]
    fn bad_tables_report_the_violated_axiom() {
        let err = FiniteGroup::from_table(
            "bad",
            vec!["1".into(), "a".into()],
            vec![vec![0, 1], vec![1, 1]],
        )
        .unwrap_err();
        assert!(matches!(err, Error::GroupAxiom { axiom, .. } if axiom.contains("permutation")));

        // A latin square with identity that fails associativity needs order
        // >= 5; this one is the cyclic table with two entries swapped.
        let mut table: Vec<Vec<usize>> = (0..5).map(|i| (0..5).map(|j| (i + j) % 5).collect()).collect();
        table[1][1] = 3;
        table[1][2] = 2;
        let err = FiniteGroup::from_table(
            "bad5",
            (0..5).map(|i| i.to_string()).collect(),
            table,
        )
        .unwrap_err();
        assert!(matches!(err, Error::GroupAxiom { .. }));
    }

    #[test]
    fn closure_examples() {
        let v4 = build_group("c2xc2").unwrap();
        assert_eq!(closure(&v4, &[]).unwrap().members(), &[0]);

        // (a, a) has index 1*2 + 1 = 3.
        let diag = closure(&v4, &[3]).unwrap();
        assert_eq!(diag.members(), &[0, 3]);

        let s3 = build_group("s3").unwrap();
        let two_cycle = (0..6).find(|&a| s3.element_order(a) == 2).unwrap();
        let three_cycle = (0..6).find(|&a| s3.element_order(a) == 3).unwrap();
        let whole = closure(&s3, &[two_cycle, three_cycle]).unwrap();
        assert_eq!(whole.order(), 6);
    }

    #[test]
    fn closure_is_idempotent_and_monotone() {
        let s3 = build_group("s3").unwrap();
        for a in 0..6 {
            for b in 0..6 {
                let once = closure(&s3, &[a, b]).unwrap();
                let twice = closure(&s3, once.members()).unwrap();
                assert_eq!(once, twice);
                assert!(once.contains(a) && once.contains(b));
            }
        }
    }

    #[test]
    fn subgroup_counts() {
        let c1 = build_group("c1").unwrap();
        assert_eq!(all_subgroups(&c1, 64).unwrap().len(), 1);

        let v4 = build_group("c2xc2").unwrap();
        let subs = all_subgroups(&v4, 64).unwrap();
        assert_eq!(subs.len(), 5);
        let orders: Vec<usize> = subs.iter().map(|s| s.order()).collect();
        assert_eq!(orders, vec![1, 2, 2, 2, 4]);

        let e16 = build_group("c2xc2xc2xc2").unwrap();
        assert_eq!(all_subgroups(&e16, 64).unwrap().len(), 67);
    }

    #[test]
    fn subgroup_enumeration_respects_the_cap() {
        let e16 = build_group("c2xc2xc2xc2").unwrap();
        let err = all_subgroups(&e16, 8).unwrap_err();
        assert!(matches!(err, Error::OrderCap { cap: 8, order: 16, .. }));
    }

    #[test]
    fn goursat_quantities() {
        let c2 = build_group("c2").unwrap();
        let v4 = FiniteGroup::direct_product(&c2, &c2);

        let diag = Subgroup::new(Arc::clone(&v4), vec![0, 3]).unwrap();
        let pk = projections_and_kernels(&diag).unwrap();
        assert_eq!(pk.p1.order(), 2);
        assert_eq!(pk.p2.order(), 2);
        assert_eq!(pk.k1.order(), 1);
        assert_eq!(pk.k2.order(), 1);

        let right = Subgroup::new(Arc::clone(&v4), vec![0, 1]).unwrap();
        let pk = projections_and_kernels(&right).unwrap();
        assert_eq!(pk.p1.order(), 1);
        assert_eq!(pk.p2.order(), 2);
        assert_eq!(pk.k1.order(), 1);
        assert_eq!(pk.k2.order(), 2);

        let whole = Subgroup::new(Arc::clone(&v4), (0..4).collect()).unwrap();
        let pk = projections_and_kernels(&whole).unwrap();
        for sub in [pk.p1, pk.p2, pk.k1, pk.k2] {
            assert_eq!(sub.order(), 2);
        }
    }

    #[test]
    fn goursat_identity_over_all_product_subgroups() {
        for spec in ["c2xc2", "c2xs3", "s3xs3"] {
            let g = build_group(spec).unwrap();
            for u in all_subgroups(&g, 64).unwrap() {
                let pk = projections_and_kernels(&u).unwrap();
                assert_eq!(u.order(), pk.p1.order() * pk.k2.order());
                assert_eq!(u.order(), pk.p2.order() * pk.k1.order());
            }
        }
    }

    #[test]
    fn conjugation_examples() {
        let s3 = build_group("s3").unwrap();
        let s3s3 = FiniteGroup::direct_product(&s3, &s3);
        let diag: Vec<usize> = (0..6).map(|y| s3s3.pair_join(y, y).unwrap()).collect();
        let diag = Subgroup::new(Arc::clone(&s3s3), diag).unwrap();

        let t = (0..6).find(|&a| s3.element_order(a) == 2).unwrap();
        let tx1 = s3s3.pair_join(t, 0).unwrap();
        let twisted = diag.conjugate(tx1);
        assert_eq!(twisted.order(), 6);
        assert_ne!(twisted, diag);

        // Conjugating by a member fixes the subgroup.
        let inside = s3s3.pair_join(t, t).unwrap();
        assert!(diag.contains(inside));
        assert_eq!(diag.conjugate(inside), diag);
    }

    #[test]
    fn all_subgroups_is_conjugation_stable() {
        let s3 = build_group("s3").unwrap();
        let subs = all_subgroups(&s3, 64).unwrap();
        for u in &subs {
            for x in 0..6 {
                let conj = u.conjugate(x);
                assert!(subs.iter().any(|v| v == &conj));
            }
        }
    }

    #[test]
    fn double_coset_examples() {
        let s3 = build_group("s3").unwrap();
        let whole = Subgroup::new(Arc::clone(&s3), (0..6).collect()).unwrap();
        let cosets = double_cosets(&whole, &whole).unwrap();
        assert_eq!(cosets, vec![DoubleCoset { rep: 0, size: 6 }]);

        let trivial = Subgroup::new(Arc::clone(&s3), vec![0]).unwrap();
        let cosets = double_cosets(&trivial, &trivial).unwrap();
        assert_eq!(cosets.len(), 6);
        assert!(cosets.iter().all(|c| c.size == 1));

        let t = (0..6).find(|&a| s3.element_order(a) == 2).unwrap();
        let p = closure(&s3, &[t]).unwrap();
        let cosets = double_cosets(&p, &p).unwrap();
        assert_eq!(cosets.len(), 2);
        let mut sizes: Vec<usize> = cosets.iter().map(|c| c.size).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![2, 4]);
    }

    #[test]
    fn double_cosets_partition_the_group() {
        let s3 = build_group("s3").unwrap();
        let subs = all_subgroups(&s3, 64).unwrap();
        for p in &subs {
            for q in &subs {
                let cosets = double_cosets(p, q).unwrap();
                assert_eq!(cosets.iter().map(|c| c.size).sum::<usize>(), 6);
            }
        }
    }

    #[test]
    fn set_product_sizes() {
        let s3 = build_group("s3").unwrap();
        let twos: Vec<usize> = (0..6).filter(|&a| s3.element_order(a) == 2).collect();
        let p = closure(&s3, &[twos[0]]).unwrap();
        let q = closure(&s3, &[twos[1]]).unwrap();
        assert_eq!(set_product_size(&p, &p).unwrap(), 2);
        assert_eq!(set_product_size(&p, &q).unwrap(), 4);

        // Cross-check against direct enumeration of the product set.
        let mut seen = vec![false; 6];
        for &a in p.members() {
            for &b in q.members() {
                seen[s3.mul(a, b)] = true;
            }
        }
        assert_eq!(seen.iter().filter(|&&x| x).count(), 4);
    }

    #[test]
    fn conjugacy_class_shapes() {
        let v4 = build_group("c2xc2").unwrap();
        let classes = conjugacy_classes(&v4);
        assert_eq!(classes.len(), 4);
        assert!(classes.iter().all(|c| c.len() == 1));

        let s3 = build_group("s3").unwrap();
        let map = class_map(&s3);
        assert_eq!(map[0], 0);
        assert_eq!(map.len(), 6);
    }

    #[test]
    fn group_document_round_trip() {
        let s3 = build_group("s3").unwrap();
        let doc = s3.to_document();
        let text = serde_json::to_string(&doc).unwrap();
        let back: GroupDocument = serde_json::from_str(&text).unwrap();
        let rebuilt = back.build().unwrap();
        assert_eq!(*rebuilt, *s3);
    }
}
