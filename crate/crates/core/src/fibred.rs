//! The deformed fibred biset category on the `d`-basis.
//!
//! Morphism modules are free on the orbit keys of subcharacters; the
//! composition sums over double cosets of the projected middle subgroups,
//! weighting each matched representative by the deformation value of the
//! middle interface divided by its size. Setting the deformation to the
//! identity recovers the classical composition, whose structure constants
//! count qualifying double cosets and are nonnegative integers.
//!
//! The rescaling [`nu`] onto averaged subcharacter elements intertwines this
//! composition with the invariant-category composition, which is how the
//! associativity of the deformed composition is cross-checked.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::group::{double_cosets, projections_and_kernels};
use crate::linear::{BarMorphism, PartialCategory};
use crate::scalar::{EllMap, LaurentScalar, Rational, Scalar};
use crate::subchar::{self, SubCharacter, SubcharCategory};
use crate::{Error, Result};

/// A linear combination of `d`-basis symbols, keyed by canonical orbit
/// representatives.
#[derive(Clone, PartialEq, Eq)]
pub struct FibredMorphism<S: Scalar> {
    pub cod: usize,
    pub dom: usize,
    terms: BTreeMap<SubCharacter, S>,
}

impl<S: Scalar> FibredMorphism<S> {
    pub fn zero(cod: usize, dom: usize) -> Self {
        FibredMorphism {
            cod,
            dom,
            terms: BTreeMap::new(),
        }
    }

    /// The basis symbol of the orbit of `symbol`.
    pub fn basis(cat: &SubcharCategory, cod: usize, dom: usize, symbol: SubCharacter) -> Self {
        let mut out = Self::zero(cod, dom);
        out.add_term(cat, symbol, S::one());
        out
    }

    pub fn add_term(&mut self, cat: &SubcharCategory, symbol: SubCharacter, coeff: S) {
        if coeff.is_zero() {
            return;
        }
        let key = cat.canonical(self.cod, self.dom, &symbol);
        match self.terms.get_mut(&key) {
            Some(acc) => {
                *acc = acc.add(&coeff);
                if acc.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, coeff);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SubCharacter, &S)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, key: &SubCharacter) -> S {
        self.terms.get(key).cloned().unwrap_or_else(S::zero)
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let c = c.mul(s);
            if !c.is_zero() {
                terms.insert(m.clone(), c);
            }
        }
        FibredMorphism {
            cod: self.cod,
            dom: self.dom,
            terms,
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.cod, self.dom), (rhs.cod, rhs.dom));
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            match out.terms.get_mut(m) {
                Some(acc) => {
                    *acc = acc.add(c);
                    if acc.is_zero() {
                        out.terms.remove(m);
                    }
                }
                None => {
                    out.terms.insert(m.clone(), c.clone());
                }
            }
        }
        out
    }

    pub fn to_json(&self, cat: &SubcharCategory) -> serde_json::Value {
        serde_json::json!({
            "pair": [cat.objects()[self.cod].name(), cat.objects()[self.dom].name()],
            "terms": self
                .terms
                .iter()
                .map(|(key, c)| serde_json::json!({ "orbit": key.to_json(), "coeff": c.to_json() }))
                .collect::<Vec<_>>(),
        })
    }
}

impl<S: Scalar> fmt::Debug for FibredMorphism<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fibred[{} <- {}]{:?}", self.cod, self.dom, self.terms)
    }
}

/// The identity on an object: the diagonal orbit with trivial character.
pub fn identity_fibred<S: Scalar>(cat: &SubcharCategory, obj: usize) -> FibredMorphism<S> {
    FibredMorphism::basis(cat, obj, obj, cat.identity_subchar(obj))
}

/// One basis product, with double-coset representatives supplied by the
/// caller: `reps[i]` must lie in the i-th double coset of the projected
/// middle subgroups. The composition is independent of these choices (and
/// of the orbit representatives), which the verification suites exercise
/// directly by randomizing them.
pub fn compose_symbol_pair_with_reps(
    cat: &SubcharCategory,
    ell: &EllMap,
    cod: usize,
    mid: usize,
    dom: usize,
    phi: &SubCharacter,
    psi: &SubCharacter,
    reps: &[usize],
) -> Result<FibredMorphism<LaurentScalar>> {
    debug_assert!(*phi.right_group() == cat.objects()[mid]);
    let target = cat.product(cod, dom);
    let mut out = FibredMorphism::zero(cod, dom);
    for &g in reps {
        let translated = psi.conjugate_pair(g, 0)?;
        if !subchar::matches(phi, &translated)? {
            continue;
        }
        let interface = subchar::gamma_cap(phi.subgroup(), translated.subgroup())?;
        let n = interface.order();
        let composite = subchar::star_subchar_in(phi, &translated, &target)?;
        let coeff = ell
            .eval(n as u64)?
            .mul(&LaurentScalar::inverse_integer(n));
        out.add_term(cat, composite, coeff);
    }
    Ok(out)
}

/// One basis product with the canonical minimal representatives.
pub fn compose_symbol_pair(
    cat: &SubcharCategory,
    ell: &EllMap,
    cod: usize,
    mid: usize,
    dom: usize,
    phi: &SubCharacter,
    psi: &SubCharacter,
) -> Result<FibredMorphism<LaurentScalar>> {
    let pk_u = projections_and_kernels(phi.subgroup())?;
    let pk_v = projections_and_kernels(psi.subgroup())?;
    let reps: Vec<usize> = double_cosets(&pk_u.p2, &pk_v.p1)?
        .into_iter()
        .map(|c| c.rep)
        .collect();
    compose_symbol_pair_with_reps(cat, ell, cod, mid, dom, phi, psi, &reps)
}

/// Bilinear extension of the basis composition.
pub fn compose_fibred(
    cat: &SubcharCategory,
    ell: &EllMap,
    x: &FibredMorphism<LaurentScalar>,
    y: &FibredMorphism<LaurentScalar>,
) -> Result<FibredMorphism<LaurentScalar>> {
    if x.dom != y.cod {
        return Err(Error::MiddleMismatch(
            cat.objects()[x.dom].name().to_string(),
            cat.objects()[y.cod].name().to_string(),
        ));
    }
    let (cod, mid, dom) = (x.cod, x.dom, y.dom);
    let mut out = FibredMorphism::zero(cod, dom);
    for (phi, cx) in x.terms() {
        for (psi, cy) in y.terms() {
            let pair = compose_symbol_pair(cat, ell, cod, mid, dom, phi, psi)?;
            out = out.add(&pair.scale(&cx.mul(cy)));
        }
    }
    Ok(out)
}

/// The rescaling onto averaged subcharacter elements: the basis symbol of
/// an orbit goes to (middle order / subgroup order) times the averaged
/// element on the same orbit. A linear isomorphism intertwining the two
/// compositions.
pub fn nu<S: Scalar>(
    cat: &SubcharCategory,
    x: &FibredMorphism<S>,
) -> BarMorphism<SubCharacter, S> {
    let dom_order = cat.objects()[x.dom].order();
    let mut out = BarMorphism::zero(x.cod, x.dom);
    for (key, c) in x.terms() {
        let factor = S::from_rational(&Rational::new(
            dom_order as i64,
            key.subgroup().order() as i64,
        ));
        out.add_term(cat, key.clone(), c.mul(&factor));
    }
    out
}

/// Coefficientwise specialization of the deformation variables. The result
/// has constant coefficients; specializing commutes with composition.
pub fn specialize_fibred(
    x: &FibredMorphism<LaurentScalar>,
    assignment: &BTreeMap<u32, Rational>,
) -> Result<FibredMorphism<LaurentScalar>> {
    let mut out = FibredMorphism::zero(x.cod, x.dom);
    let mut terms = BTreeMap::new();
    for (key, c) in x.terms() {
        let value = c.specialize(assignment)?;
        if !value.is_zero() {
            terms.insert(key.clone(), LaurentScalar::from_rational(&value));
        }
    }
    out.terms = terms;
    Ok(out)
}

// ---------------------------------------------------------------------------
// Structure-constant tables
// ---------------------------------------------------------------------------

/// All basis products of one hom-set pair: `entries[i][j]` lists the
/// composite of the i-th and j-th basis orbits as (basis index, value)
/// pairs, indices into the target basis, sorted.
pub struct StructureTable {
    pub cod: usize,
    pub mid: usize,
    pub dom: usize,
    pub ell: EllMap,
    pub left_basis: Arc<Vec<SubCharacter>>,
    pub right_basis: Arc<Vec<SubCharacter>>,
    pub target_basis: Arc<Vec<SubCharacter>>,
    pub entries: Vec<Vec<Vec<(usize, LaurentScalar)>>>,
}

impl StructureTable {
    /// The composite of two basis elements as a morphism.
    pub fn product(&self, cat: &SubcharCategory, i: usize, j: usize) -> FibredMorphism<LaurentScalar> {
        let mut out = FibredMorphism::zero(self.cod, self.dom);
        for (k, value) in &self.entries[i][j] {
            out.add_term(cat, self.target_basis[*k].clone(), value.clone());
        }
        out
    }

    pub fn to_json(&self, cat: &SubcharCategory) -> serde_json::Value {
        let names: Vec<&str> = [self.cod, self.mid, self.dom]
            .iter()
            .map(|&i| cat.objects()[i].name())
            .collect();
        serde_json::json!({
            "objects": names,
            "ell": self.ell,
            "left_basis": self.left_basis.iter().map(|b| b.to_json()).collect::<Vec<_>>(),
            "right_basis": self.right_basis.iter().map(|b| b.to_json()).collect::<Vec<_>>(),
            "target_basis": self.target_basis.iter().map(|b| b.to_json()).collect::<Vec<_>>(),
            "entries": self
                .entries
                .iter()
                .enumerate()
                .flat_map(|(i, row)| {
                    row.iter().enumerate().map(move |(j, cell)| {
                        serde_json::json!({
                            "left": i,
                            "right": j,
                            "terms": cell
                                .iter()
                                .map(|(k, v)| serde_json::json!({ "orbit": k, "coeff": v.to_json() }))
                                .collect::<Vec<_>>(),
                        })
                    })
                })
                .collect::<Vec<_>>(),
        })
    }

    /// CSV rows `left,right,orbit,value`, in row-major order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("left,right,orbit,value\n");
        for (i, row) in self.entries.iter().enumerate() {
            for (j, cell) in row.iter().enumerate() {
                for (k, value) in cell {
                    out.push_str(&format!("{i},{j},{k},{value}\n"));
                }
            }
        }
        out
    }
}

/// The full structure-constant table of one hom-set pair, memoized inside
/// the category. Concurrent fills of the same key agree, so the cache
/// behaves as a coherent map.
pub fn structure_table(
    cat: &SubcharCategory,
    cod: usize,
    mid: usize,
    dom: usize,
    ell: &EllMap,
) -> Result<Arc<StructureTable>> {
    let key = (cod, mid, dom, ell.clone());
    if let Some(hit) = cat.table_cache().lock().unwrap().get(&key) {
        return Ok(Arc::clone(hit));
    }

    let left_basis = cat.basis(cod, mid)?;
    let right_basis = cat.basis(mid, dom)?;
    let target_basis = cat.basis(cod, dom)?;
    let index_of: HashMap<&SubCharacter, usize> = target_basis
        .iter()
        .enumerate()
        .map(|(k, b)| (b, k))
        .collect();

    let mut entries = Vec::with_capacity(left_basis.len());
    for phi in left_basis.iter() {
        let mut row = Vec::with_capacity(right_basis.len());
        for psi in right_basis.iter() {
            let product = compose_symbol_pair(cat, ell, cod, mid, dom, phi, psi)?;
            let mut cell: Vec<(usize, LaurentScalar)> = product
                .terms()
                .map(|(key, v)| (index_of[key], v.clone()))
                .collect();
            cell.sort_by_key(|(k, _)| *k);
            row.push(cell);
        }
        entries.push(row);
    }

    let table = Arc::new(StructureTable {
        cod,
        mid,
        dom,
        ell: ell.clone(),
        left_basis,
        right_basis,
        target_basis,
        entries,
    });
    let mut memo = cat.table_cache().lock().unwrap();
    Ok(Arc::clone(memo.entry(key).or_insert(table)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fiber::AbelianFiber;
    use crate::group::build_group;
    use crate::linear::{compose_invariant_oracle, EllCocycle};
    use crate::scalar::identity_assignment;

    fn category(specs: &[&str], fiber: &str) -> SubcharCategory {
        SubcharCategory::new(
            specs.iter().map(|s| build_group(s).unwrap()).collect(),
            AbelianFiber::parse(fiber).unwrap(),
            64,
        )
    }

    #[test]
    fn identity_is_two_sided() {
        let cat = category(&["c2"], "z2");
        let ell = EllMap::Generic;
        let id = identity_fibred::<LaurentScalar>(&cat, 0);
        for phi in cat.basis(0, 0).unwrap().iter() {
            let d = FibredMorphism::basis(&cat, 0, 0, phi.clone());
            assert_eq!(compose_fibred(&cat, &ell, &id, &d).unwrap(), d);
            assert_eq!(compose_fibred(&cat, &ell, &d, &id).unwrap(), d);
        }
    }

    #[test]
    fn point_to_point_across_c2_carries_half_the_deformation() {
        let cat = category(&["c1", "c2"], "trivial");
        let whole_01 = SubCharacter::trivial(
            AbelianFiber::trivial(),
            crate::group::Subgroup::new(cat.product(0, 1), vec![0, 1]).unwrap(),
        )
        .unwrap();
        let whole_10 = SubCharacter::trivial(
            AbelianFiber::trivial(),
            crate::group::Subgroup::new(cat.product(1, 0), vec![0, 1]).unwrap(),
        )
        .unwrap();
        let x = FibredMorphism::basis(&cat, 0, 1, whole_01);
        let y = FibredMorphism::basis(&cat, 1, 0, whole_10);

        // Generic: (x2)/2 on the trivial orbit.
        let product = compose_fibred(&cat, &EllMap::Generic, &x, &y).unwrap();
        assert_eq!(product.term_count(), 1);
        let (key, coeff) = product.terms().next().unwrap();
        assert_eq!(key.subgroup().members(), &[0]);
        assert_eq!(
            coeff,
            &LaurentScalar::var(2).mul(&LaurentScalar::inverse_integer(2))
        );

        // Classical: coefficient 1.
        let classical = compose_fibred(&cat, &EllMap::Identity, &x, &y).unwrap();
        let (_, coeff) = classical.terms().next().unwrap();
        assert_eq!(coeff, &LaurentScalar::one());
    }

    #[test]
    fn unmatched_characters_compose_to_zero() {
        let cat = category(&["c2"], "z2");
        let v4 = cat.product(0, 0);
        let z2 = cat.fiber().clone();
        let right = crate::group::Subgroup::new(Arc::clone(&v4), vec![0, 1]).unwrap();
        let left = crate::group::Subgroup::new(Arc::clone(&v4), vec![0, 2]).unwrap();
        let mu = SubCharacter::new(
            crate::fiber::ACharacter::new(z2.clone(), right, vec![vec![0], vec![1]]).unwrap(),
        )
        .unwrap();
        let nu_trivial = SubCharacter::trivial(z2, left).unwrap();
        let x = FibredMorphism::<LaurentScalar>::basis(&cat, 0, 0, mu);
        let y = FibredMorphism::<LaurentScalar>::basis(&cat, 0, 0, nu_trivial);
        assert!(compose_fibred(&cat, &EllMap::Generic, &x, &y).unwrap().is_zero());
    }

    #[test]
    fn nu_maps_identity_to_identity_and_is_functorial() {
        let cat = category(&["c2", "c3"], "z2");
        let ell = EllMap::Generic;
        let gamma = EllCocycle(ell.clone());
        for obj in 0..2 {
            let id = identity_fibred::<LaurentScalar>(&cat, obj);
            let mapped = nu(&cat, &id);
            let expected = BarMorphism::basis(&cat, obj, obj, cat.identity_subchar(obj));
            assert_eq!(mapped, expected);
        }
        assert!(nu(&cat, &FibredMorphism::<LaurentScalar>::zero(0, 1)).is_zero());

        for (cod, mid, dom) in [(0, 0, 0), (0, 1, 0), (1, 0, 1)] {
            for phi in cat.basis(cod, mid).unwrap().iter() {
                for psi in cat.basis(mid, dom).unwrap().iter() {
                    let x = FibredMorphism::basis(&cat, cod, mid, phi.clone());
                    let y = FibredMorphism::basis(&cat, mid, dom, psi.clone());
                    let lhs = nu(&cat, &compose_fibred(&cat, &ell, &x, &y).unwrap());
                    let rhs =
                        compose_invariant_oracle(&cat, &gamma, &nu(&cat, &x), &nu(&cat, &y))
                            .unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn classical_constants_are_nonnegative_integers() {
        let cat = category(&["c2", "c3"], "z3");
        for cod in 0..2 {
            for mid in 0..2 {
                for dom in 0..2 {
                    let table = structure_table(&cat, cod, mid, dom, &EllMap::Identity).unwrap();
                    for row in &table.entries {
                        for cell in row {
                            for (_, value) in cell {
                                let constant = value.as_constant().expect("classical constant");
                                assert!(constant.is_integer());
                                assert!(!constant.is_negative());
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn classical_two_by_two_table_over_the_point() {
        // Objects c1, c2; hom-set (c1, c1) through the middle c2. The two
        // orbits over (c1, c2) are the trivial subgroup and the whole group.
        let cat = category(&["c1", "c2"], "trivial");
        let table = structure_table(&cat, 0, 1, 0, &EllMap::Identity).unwrap();
        assert_eq!(table.left_basis.len(), 2);
        assert_eq!(table.right_basis.len(), 2);
        // By subgroup order: index 0 is trivial, index 1 is the whole group.
        // trivial . trivial = 2 d_triv (two cosets of the trivial subgroup,
        // each contributing 1/1).
        assert_eq!(table.entries[0][0], vec![(0, LaurentScalar::from_integer(2))]);
        // trivial . whole = d_triv, whole . trivial = d_triv.
        assert_eq!(table.entries[0][1], vec![(0, LaurentScalar::one())]);
        assert_eq!(table.entries[1][0], vec![(0, LaurentScalar::one())]);
        // whole . whole = (l(2)/2 = 1) d_triv under the identity map.
        assert_eq!(table.entries[1][1], vec![(0, LaurentScalar::one())]);
    }

    #[test]
    fn specialization_commutes_with_composition() {
        let cat = category(&["c2"], "z2");
        let basis = cat.basis(0, 0).unwrap();
        for phi in basis.iter() {
            for psi in basis.iter() {
                let x = FibredMorphism::basis(&cat, 0, 0, phi.clone());
                let y = FibredMorphism::basis(&cat, 0, 0, psi.clone());
                let generic = compose_fibred(&cat, &EllMap::Generic, &x, &y).unwrap();
                let vars: Vec<u32> = generic
                    .terms()
                    .flat_map(|(_, c)| c.variables())
                    .collect();
                let assignment = identity_assignment(&vars);
                let specialized = specialize_fibred(&generic, &assignment).unwrap();
                let direct = compose_fibred(&cat, &EllMap::Identity, &x, &y).unwrap();
                assert_eq!(specialized, direct);

                assert!(specialize_fibred(
                    &FibredMorphism::zero(0, 0),
                    &BTreeMap::new()
                )
                .unwrap()
                .is_zero());
            }
        }
    }

    #[test]
    fn composition_is_independent_of_coset_representatives() {
        let cat = category(&["c2", "c3"], "z2");
        let (cod, mid, dom) = (0, 1, 0);
        for phi in cat.basis(cod, mid).unwrap().iter() {
            for psi in cat.basis(mid, dom).unwrap().iter() {
                let pk_u = projections_and_kernels(phi.subgroup()).unwrap();
                let pk_v = projections_and_kernels(psi.subgroup()).unwrap();
                let cosets = double_cosets(&pk_u.p2, &pk_v.p1).unwrap();
                let baseline =
                    compose_symbol_pair(&cat, &EllMap::Generic, cod, mid, dom, phi, psi).unwrap();
                // Replace each minimal representative by another member of
                // its coset.
                let group = cat.objects()[mid].clone();
                let alt_reps: Vec<usize> = cosets
                    .iter()
                    .map(|c| {
                        let p = *pk_u.p2.members().last().unwrap();
                        let q = *pk_v.p1.members().last().unwrap();
                        group.mul(group.mul(p, c.rep), q)
                    })
                    .collect();
                let alternative = compose_symbol_pair_with_reps(
                    &cat,
                    &EllMap::Generic,
                    cod,
                    mid,
                    dom,
                    phi,
                    psi,
                    &alt_reps,
                )
                .unwrap();
                assert_eq!(baseline, alternative);
            }
        }
    }
}
