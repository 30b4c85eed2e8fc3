//! The subcharacter partial category: pairs (U, mu) of a subgroup of a
//! direct product and a fiber-valued character, with the star product as
//! composition. A composite exists only when the two characters cancel on
//! the middle interface; the matching relation tests exactly that.
//!
//! [`SubcharCategory`] bundles a finite object set with a fiber and memoizes
//! products, subgroup lists, orbit bases, and canonical forms, so the
//! linearized machinery can grind through exhaustive verification loops.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex};

use crate::fiber::{hom_enumerate, ACharacter, AbelianFiber};
use crate::fibred::StructureTable;
use crate::group::{all_subgroups, FiniteGroup, Subgroup};
use crate::linear::PartialCategory;
use crate::scalar::EllMap;
use crate::{Error, Result};

/// A subgroup of a direct product together with a character on it.
#[derive(Clone)]
pub struct SubCharacter {
    character: ACharacter,
}

impl SubCharacter {
    /// Wraps a character whose domain lives inside a direct product.
    pub fn new(character: ACharacter) -> Result<Self> {
        if character.domain().parent().product_structure().is_none() {
            return Err(Error::NotAProduct(
                character.domain().parent().name().to_string(),
            ));
        }
        Ok(SubCharacter { character })
    }

    pub fn trivial(fiber: AbelianFiber, subgroup: Subgroup) -> Result<Self> {
        SubCharacter::new(ACharacter::trivial(fiber, subgroup))
    }

    pub fn subgroup(&self) -> &Subgroup {
        self.character.domain()
    }

    pub fn character(&self) -> &ACharacter {
        &self.character
    }

    pub fn fiber(&self) -> &AbelianFiber {
        self.character.fiber()
    }

    /// The ambient direct product F x G.
    pub fn product(&self) -> &Arc<FiniteGroup> {
        self.subgroup().parent()
    }

    pub fn left_group(&self) -> &Arc<FiniteGroup> {
        &self.product().product_structure().unwrap().left
    }

    pub fn right_group(&self) -> &Arc<FiniteGroup> {
        &self.product().product_structure().unwrap().right
    }

    /// Conjugation by an element of the ambient product.
    pub fn conjugate(&self, x: usize) -> SubCharacter {
        SubCharacter {
            character: self.character.conjugate(x),
        }
    }

    /// Conjugation by the pair (f, g) of factor elements.
    pub fn conjugate_pair(&self, f: usize, g: usize) -> Result<SubCharacter> {
        Ok(self.conjugate(self.product().pair_join(f, g)?))
    }

    /// `{"pair": [F, G], "subgroup": [...], "character": [[t, [v]], ...]}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "pair": [self.left_group().name(), self.right_group().name()],
            "subgroup": self.subgroup().members(),
            "character": self.character.to_json(),
        })
    }
}

// Comparisons look only at the member list and value table; every container
// in this crate keys subcharacters within a single hom-set, where the
// ambient product is fixed.
impl PartialEq for SubCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.subgroup().members() == other.subgroup().members()
            && self.character.values() == other.character.values()
    }
}

impl Eq for SubCharacter {}

impl PartialOrd for SubCharacter {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SubCharacter {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.subgroup()
            .members()
            .cmp(other.subgroup().members())
            .then_with(|| self.character.values().cmp(other.character.values()))
    }
}

impl Hash for SubCharacter {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.subgroup().members().hash(state);
        self.character.values().hash(state);
    }
}

impl fmt::Debug for SubCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({:?}, {})",
            self.subgroup().members(),
            if self.character.is_trivial() { "1" } else { "chi" }
        )
    }
}

fn middle_check(
    u: &Subgroup,
    v: &Subgroup,
) -> Result<(Arc<FiniteGroup>, Arc<FiniteGroup>, Arc<FiniteGroup>)> {
    let up = u
        .parent()
        .product_structure()
        .ok_or_else(|| Error::NotAProduct(u.parent().name().to_string()))?;
    let vp = v
        .parent()
        .product_structure()
        .ok_or_else(|| Error::NotAProduct(v.parent().name().to_string()))?;
    if up.right != vp.left {
        return Err(Error::MiddleMismatch(
            up.right.name().to_string(),
            vp.left.name().to_string(),
        ));
    }
    Ok((
        Arc::clone(&up.left),
        Arc::clone(&up.right),
        Arc::clone(&vp.right),
    ))
}

/// The middle interface {g : (1, g) in U and (g, 1) in V}, a subgroup of G.
pub fn gamma_cap(u: &Subgroup, v: &Subgroup) -> Result<Subgroup> {
    let (_, middle, _) = middle_check(u, v)?;
    let members = (0..middle.order())
        .filter(|&g| {
            u.contains(u.parent().pair_join(0, g).unwrap())
                && v.contains(v.parent().pair_join(g, 0).unwrap())
        })
        .collect();
    Ok(Subgroup::from_sorted_unchecked(middle, members))
}

/// The star product {(f, h) : exists g with (f, g) in U, (g, h) in V},
/// landing in the given F x H product group.
pub fn star_in(u: &Subgroup, v: &Subgroup, target: &Arc<FiniteGroup>) -> Result<Subgroup> {
    let (left, middle, right) = middle_check(u, v)?;
    let tp = target
        .product_structure()
        .ok_or_else(|| Error::NotAProduct(target.name().to_string()))?;
    if tp.left != left || tp.right != right {
        return Err(Error::Invalid {
            what: "star target",
            detail: format!(
                "expected {}x{}, got {}",
                left.name(),
                right.name(),
                target.name()
            ),
        });
    }
    // Bucket V by its left coordinate, then sweep U once.
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); middle.order()];
    for &m in v.members() {
        let (g, h) = v.parent().pair_split(m)?;
        buckets[g].push(h);
    }
    let mut mask = vec![false; target.order()];
    for &m in u.members() {
        let (f, g) = u.parent().pair_split(m)?;
        for &h in &buckets[g] {
            mask[target.pair_join(f, h)?] = true;
        }
    }
    let members = (0..target.order()).filter(|&i| mask[i]).collect();
    Ok(Subgroup::from_sorted_unchecked(Arc::clone(target), members))
}

/// As [`star_in`], building the target product on the fly.
pub fn star(u: &Subgroup, v: &Subgroup) -> Result<Subgroup> {
    let (left, _, right) = middle_check(u, v)?;
    let target = FiniteGroup::direct_product(&left, &right);
    star_in(u, v, &target)
}

fn matches_with_gamma(x: &SubCharacter, y: &SubCharacter, gamma: &Subgroup) -> Result<bool> {
    let fiber = x.fiber();
    for &g in gamma.members() {
        let mu = x.character().value(x.product().pair_join(0, g)?)?;
        let nu = y.character().value(y.product().pair_join(g, 0)?)?;
        if !fiber.is_zero(&fiber.add(mu, nu)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The matching relation: the two characters cancel on the middle interface.
pub fn matches(x: &SubCharacter, y: &SubCharacter) -> Result<bool> {
    let gamma = gamma_cap(x.subgroup(), y.subgroup())?;
    matches_with_gamma(x, y, &gamma)
}

/// The composite subcharacter (U * V, mu * nu), defined exactly when the
/// pair matches. The composite character's value at (f, h) reads off any
/// witness g; in debug builds all witnesses are checked to agree.
pub fn star_subchar_in(
    x: &SubCharacter,
    y: &SubCharacter,
    target: &Arc<FiniteGroup>,
) -> Result<SubCharacter> {
    let gamma = gamma_cap(x.subgroup(), y.subgroup())?;
    if !matches_with_gamma(x, y, &gamma)? {
        return Err(Error::NotMatched);
    }
    let fiber = x.fiber().clone();
    let subgroup = star_in(x.subgroup(), y.subgroup(), target)?;

    let u_parent = x.product();
    let v_parent = y.product();
    let left_order = u_parent.product_structure().unwrap().left.order();
    let mut u_buckets: Vec<Vec<usize>> = vec![Vec::new(); left_order];
    for &m in x.subgroup().members() {
        let (f, g) = u_parent.pair_split(m)?;
        u_buckets[f].push(g);
    }

    let mut values = Vec::with_capacity(subgroup.order());
    for &w in subgroup.members() {
        let (f, h) = target.pair_split(w)?;
        let mut value = None;
        for &g in &u_buckets[f] {
            if !y.subgroup().contains(v_parent.pair_join(g, h)?) {
                continue;
            }
            let mu = x.character().value(u_parent.pair_join(f, g)?)?;
            let nu = y.character().value(v_parent.pair_join(g, h)?)?;
            let candidate = fiber.add(mu, nu);
            match &value {
                None => {
                    value = Some(candidate);
                    // Well-definedness across witnesses is the matching
                    // condition restated; re-verified in debug builds.
                    if cfg!(not(debug_assertions)) {
                        break;
                    }
                }
                Some(existing) => debug_assert_eq!(existing, &candidate),
            }
        }
        values.push(value.expect("star member has a witness"));
    }
    SubCharacter::new(ACharacter::new(fiber, subgroup, values)?)
}

/// As [`star_subchar_in`], building the target product on the fly.
pub fn star_subchar(x: &SubCharacter, y: &SubCharacter) -> Result<SubCharacter> {
    let target = FiniteGroup::direct_product(x.left_group(), y.right_group());
    star_subchar_in(x, y, &target)
}

/// The twisted diagonal {(g y g^-1, y)} with the trivial character; the
/// carrier of the structural maps.
pub fn twisted_diagonal(
    product: &Arc<FiniteGroup>,
    g: usize,
    fiber: &AbelianFiber,
) -> Result<SubCharacter> {
    let ps = product
        .product_structure()
        .ok_or_else(|| Error::NotAProduct(product.name().to_string()))?;
    if ps.left != ps.right {
        return Err(Error::Invalid {
            what: "twisted diagonal",
            detail: format!("`{}` is not a square product", product.name()),
        });
    }
    let group = &ps.left;
    if g >= group.order() {
        return Err(Error::BadElement {
            group: group.name().to_string(),
            index: g,
        });
    }
    let mut members: Vec<usize> = (0..group.order())
        .map(|y| product.pair_join(group.conj(g, y), y).unwrap())
        .collect();
    members.sort_unstable();
    let subgroup = Subgroup::from_sorted_unchecked(Arc::clone(product), members);
    SubCharacter::trivial(fiber.clone(), subgroup)
}

/// The full orbit of a subcharacter under the ambient product, sorted.
pub fn orbit(x: &SubCharacter) -> Vec<SubCharacter> {
    let product = x.product();
    let mut out: Vec<SubCharacter> = (0..product.order()).map(|t| x.conjugate(t)).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// The canonical representative of an orbit: the minimum under the
/// (member list, value table) lexicographic order. Constant on orbits.
pub fn orbit_canonical(x: &SubCharacter) -> SubCharacter {
    orbit(x).into_iter().next().unwrap()
}

/// Every subcharacter of the product, ordered.
pub fn enumerate_subchars(
    product: &Arc<FiniteGroup>,
    fiber: &AbelianFiber,
    order_cap: usize,
) -> Result<Vec<SubCharacter>> {
    let mut out = Vec::new();
    for subgroup in all_subgroups(product, order_cap)? {
        for character in hom_enumerate(&subgroup, fiber, order_cap)? {
            out.push(SubCharacter::new(character)?);
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Canonical representatives of all orbits, ordered; the basis index set of
/// every linearized morphism module.
pub fn enumerate_basis(
    product: &Arc<FiniteGroup>,
    fiber: &AbelianFiber,
    order_cap: usize,
) -> Result<Vec<SubCharacter>> {
    let mut keys: Vec<SubCharacter> = enumerate_subchars(product, fiber, order_cap)?
        .iter()
        .map(orbit_canonical)
        .collect();
    keys.sort_unstable();
    keys.dedup();
    Ok(keys)
}

// ---------------------------------------------------------------------------
// The category object
// ---------------------------------------------------------------------------

type PairKey = (usize, usize);

#[derive(Default)]
struct CanonCache {
    canonical: HashMap<SubCharacter, SubCharacter>,
    orbits: HashMap<SubCharacter, Arc<Vec<SubCharacter>>>,
}

/// A finite object set with a fiber, plus memoized products, subgroup
/// lists, orbit bases and canonical forms. Memo fills are deterministic, so
/// concurrent use is safe: any interleaving computes the same values.
pub struct SubcharCategory {
    groups: Vec<Arc<FiniteGroup>>,
    fiber: AbelianFiber,
    order_cap: usize,
    products: Mutex<HashMap<PairKey, Arc<FiniteGroup>>>,
    subgroups: Mutex<HashMap<PairKey, Arc<Vec<Subgroup>>>>,
    bases: Mutex<HashMap<PairKey, Arc<Vec<SubCharacter>>>>,
    all_symbols: Mutex<HashMap<PairKey, Arc<Vec<SubCharacter>>>>,
    canon: Mutex<HashMap<PairKey, CanonCache>>,
    tables: Mutex<HashMap<(usize, usize, usize, EllMap), Arc<StructureTable>>>,
}

impl SubcharCategory {
    pub fn new(groups: Vec<Arc<FiniteGroup>>, fiber: AbelianFiber, order_cap: usize) -> Self {
        SubcharCategory {
            groups,
            fiber,
            order_cap,
            products: Mutex::new(HashMap::new()),
            subgroups: Mutex::new(HashMap::new()),
            bases: Mutex::new(HashMap::new()),
            all_symbols: Mutex::new(HashMap::new()),
            canon: Mutex::new(HashMap::new()),
            tables: Mutex::new(HashMap::new()),
        }
    }

    pub(crate) fn table_cache(
        &self,
    ) -> &Mutex<HashMap<(usize, usize, usize, EllMap), Arc<StructureTable>>> {
        &self.tables
    }

    pub fn fiber(&self) -> &AbelianFiber {
        &self.fiber
    }

    pub fn order_cap(&self) -> usize {
        self.order_cap
    }

    pub fn object_count(&self) -> usize {
        self.groups.len()
    }

    /// The memoized direct product of two objects.
    pub fn product(&self, cod: usize, dom: usize) -> Arc<FiniteGroup> {
        let mut cache = self.products.lock().unwrap();
        Arc::clone(cache.entry((cod, dom)).or_insert_with(|| {
            FiniteGroup::direct_product(&self.groups[cod], &self.groups[dom])
        }))
    }

    /// All subgroups of the product of two objects, memoized.
    pub fn subgroup_list(&self, cod: usize, dom: usize) -> Result<Arc<Vec<Subgroup>>> {
        if let Some(hit) = self.subgroups.lock().unwrap().get(&(cod, dom)) {
            return Ok(Arc::clone(hit));
        }
        let product = self.product(cod, dom);
        let list = Arc::new(all_subgroups(&product, self.order_cap)?);
        let mut cache = self.subgroups.lock().unwrap();
        Ok(Arc::clone(cache.entry((cod, dom)).or_insert(list)))
    }

    /// The identity subcharacter (diagonal, trivial character) on an object.
    pub fn identity_subchar(&self, obj: usize) -> SubCharacter {
        twisted_diagonal(&self.product(obj, obj), 0, &self.fiber).unwrap()
    }

    /// The structural-map symbol on a twisted diagonal.
    pub fn sigma_symbol(&self, obj: usize, g: usize) -> SubCharacter {
        twisted_diagonal(&self.product(obj, obj), g, &self.fiber).unwrap()
    }
}

impl PartialCategory for SubcharCategory {
    type Mor = SubCharacter;

    fn objects(&self) -> &[Arc<FiniteGroup>] {
        &self.groups
    }

    fn basis(&self, cod: usize, dom: usize) -> Result<Arc<Vec<SubCharacter>>> {
        if let Some(hit) = self.bases.lock().unwrap().get(&(cod, dom)) {
            return Ok(Arc::clone(hit));
        }
        let product = self.product(cod, dom);
        let basis = Arc::new(enumerate_basis(&product, &self.fiber, self.order_cap)?);
        let mut cache = self.bases.lock().unwrap();
        Ok(Arc::clone(cache.entry((cod, dom)).or_insert(basis)))
    }

    fn symbols(&self, cod: usize, dom: usize) -> Result<Arc<Vec<SubCharacter>>> {
        if let Some(hit) = self.all_symbols.lock().unwrap().get(&(cod, dom)) {
            return Ok(Arc::clone(hit));
        }
        let product = self.product(cod, dom);
        let symbols = Arc::new(enumerate_subchars(&product, &self.fiber, self.order_cap)?);
        let mut cache = self.all_symbols.lock().unwrap();
        Ok(Arc::clone(cache.entry((cod, dom)).or_insert(symbols)))
    }

    fn is_matched(
        &self,
        _cod: usize,
        _mid: usize,
        _dom: usize,
        x: &SubCharacter,
        y: &SubCharacter,
    ) -> Result<bool> {
        matches(x, y)
    }

    fn compose(
        &self,
        cod: usize,
        _mid: usize,
        dom: usize,
        x: &SubCharacter,
        y: &SubCharacter,
    ) -> Result<SubCharacter> {
        star_subchar_in(x, y, &self.product(cod, dom))
    }

    fn act(&self, _cod: usize, _dom: usize, f: usize, g: usize, x: &SubCharacter) -> SubCharacter {
        x.conjugate_pair(f, g).unwrap()
    }

    fn structural(&self, obj: usize, g: usize) -> Vec<SubCharacter> {
        vec![self.sigma_symbol(obj, g)]
    }

    fn canonical(&self, cod: usize, dom: usize, x: &SubCharacter) -> SubCharacter {
        let mut cache = self.canon.lock().unwrap();
        let entry = cache.entry((cod, dom)).or_default();
        if let Some(hit) = entry.canonical.get(x) {
            return hit.clone();
        }
        let orbit = orbit(x);
        let canonical = orbit[0].clone();
        let orbit = Arc::new(orbit);
        for member in orbit.iter() {
            entry.canonical.insert(member.clone(), canonical.clone());
        }
        entry.orbits.insert(canonical.clone(), orbit);
        canonical
    }

    fn orbit(&self, cod: usize, dom: usize, x: &SubCharacter) -> Arc<Vec<SubCharacter>> {
        let canonical = self.canonical(cod, dom, x);
        let cache = self.canon.lock().unwrap();
        Arc::clone(&cache.get(&(cod, dom)).unwrap().orbits[&canonical])
    }
}
