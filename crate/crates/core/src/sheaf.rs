//! Cellular sheaves of complexes on a face poset, sheaf maps, sections and
//! derived Hom.
//!
//! A sheaf is a diagram with `ρ_{s≤t}: F(t) → F(s)` for `s ≤ t` (restriction
//! from a face to a coface). Sections over an open set are the homotopy limit.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::complex::{ChainMap, Complex, Graded};
use crate::diagram::{self, close_restrictions, cobar_total, Diagram, TotalIndex};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::geometry::FacePoset;
use crate::matrix::Matrix;
use crate::poset::{Poset, SubsetKind};

#[derive(Clone)]
pub struct Sheaf {
    base: Arc<FacePoset>,
    field: Field,
    stalks: Vec<Arc<Complex>>,
    maps: HashMap<(usize, usize), ChainMap>,
}

impl std::fmt::Debug for Sheaf {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Sheaf[")?;
        for s in 0..self.base.len() {
            if !self.stalks[s].is_zero() {
                write!(f, " {}:{{{}}}", self.base.name(s), self.stalks[s].dims())?;
            }
        }
        write!(f, " ]")
    }
}

impl PartialEq for Sheaf {
    fn eq(&self, other: &Self) -> bool {
        if self.base != other.base || self.field != other.field || self.stalks != other.stalks {
            return false;
        }
        let n = self.base.len();
        (0..n).all(|s| {
            self.base.poset().above(s).iter().all(|&t| self.restriction(s, t) == other.restriction(s, t))
        })
    }
}

impl Diagram for Sheaf {
    fn field(&self) -> Field {
        self.field
    }
    fn order(&self) -> &Poset {
        self.base.poset()
    }
    fn value(&self, s: usize) -> &Arc<Complex> {
        &self.stalks[s]
    }
    fn restriction(&self, s: usize, t: usize) -> Option<&ChainMap> {
        if s == t {
            None
        } else {
            self.maps.get(&(s, t))
        }
    }
}

impl Sheaf {
    /// Builds from stalks and maps on covering relations and checks
    /// functoriality. Covers touching a zero stalk may be omitted.
    pub fn new(
        base: Arc<FacePoset>,
        field: Field,
        stalks: Vec<Arc<Complex>>,
        mut covers: HashMap<(usize, usize), ChainMap>,
    ) -> Result<Sheaf> {
        if stalks.len() != base.len() {
            return Err(Error::Shape(format!("{} stalks on {} cells", stalks.len(), base.len())));
        }
        for (&(s, t), m) in &covers {
            if !base.poset().upper_covers(s).contains(&t) {
                return Err(Error::Precondition(format!(
                    "{} ≤ {} is not a covering relation",
                    base.name(s),
                    base.name(t)
                )));
            }
            m.check().map_err(|e| Error::NotFunctorial(format!("{} ≤ {}: {e}", base.name(s), base.name(t))))?;
        }
        for s in 0..base.len() {
            for &t in base.poset().upper_covers(s) {
                if !covers.contains_key(&(s, t)) && (stalks[s].is_zero() || stalks[t].is_zero()) {
                    covers.insert((s, t), ChainMap::zero(stalks[t].clone(), stalks[s].clone()));
                }
            }
        }
        let all = close_restrictions(base.poset(), &stalks, &covers)?;
        let maps = all.into_iter().filter(|(_, m)| !m.is_zero()).collect();
        Ok(Sheaf { base, field, stalks, maps })
    }

    /// Builds from a map function on every relation `s < t` with both
    /// stalks nonzero. Functoriality is the caller's responsibility.
    pub fn from_fn(
        base: Arc<FacePoset>,
        field: Field,
        stalks: Vec<Arc<Complex>>,
        mut map: impl FnMut(usize, usize) -> ChainMap,
    ) -> Sheaf {
        let mut maps = HashMap::new();
        for s in 0..base.len() {
            if stalks[s].is_zero() {
                continue;
            }
            for &t in base.poset().above(s) {
                if stalks[t].is_zero() {
                    continue;
                }
                let m = map(s, t);
                if !m.is_zero() {
                    maps.insert((s, t), m);
                }
            }
        }
        Sheaf { base, field, stalks, maps }
    }

    /// Checks chain maps and strict functoriality on every relation.
    pub fn validate(&self) -> Result<()> {
        let p = self.base.poset();
        for ((s, t), m) in &self.maps {
            m.check().map_err(|e| Error::NotFunctorial(format!("{} ≤ {}: {e}", p.name(*s), p.name(*t))))?;
        }
        for s in 0..p.len() {
            for &u in p.above(s) {
                for &t in p.above(u) {
                    let lhs = self.map(s, t);
                    let rhs = self.map(s, u).after(&self.map(u, t));
                    if lhs != rhs {
                        return Err(Error::NotFunctorial(format!(
                            "{} < {} < {}",
                            p.name(s),
                            p.name(u),
                            p.name(t)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn zero(base: Arc<FacePoset>, field: Field) -> Sheaf {
        let stalks = vec![Arc::new(Complex::zero(field)); base.len()];
        Sheaf { base, field, stalks, maps: HashMap::new() }
    }

    /// Constant sheaf with value `c` on a convex subset, zero elsewhere.
    pub fn constant_on(base: Arc<FacePoset>, c: Arc<Complex>, set: &[usize]) -> Result<Sheaf> {
        let p = base.poset();
        let m = p.mask(set);
        for &s in set {
            for &t in set {
                if p.lt(s, t) && p.above(s).iter().any(|&u| p.lt(u, t) && !m[u]) {
                    return Err(Error::Precondition(format!(
                        "set is not locally closed between {} and {}",
                        p.name(s),
                        p.name(t)
                    )));
                }
            }
        }
        let field = c.field();
        let zero = Arc::new(Complex::zero(field));
        let stalks = (0..base.len()).map(|s| if m[s] { c.clone() } else { zero.clone() }).collect();
        let id = ChainMap::identity(c.clone());
        Ok(Sheaf::from_fn(base, field, stalks, |_, _| id.clone()))
    }

    pub fn constant(base: Arc<FacePoset>, field: Field) -> Sheaf {
        let all: Vec<usize> = (0..base.len()).collect();
        Sheaf::constant_on(base, Arc::new(Complex::unit(field)), &all).expect("whole space is convex")
    }

    /// `k` extended by zero from the open star of `s`; represents `F ↦ F(s)`.
    pub fn indicator(base: Arc<FacePoset>, field: Field, s: usize) -> Sheaf {
        let set = base.star(s);
        Sheaf::constant_on(base, Arc::new(Complex::unit(field)), &set).expect("stars are open")
    }

    /// `k` supported on the closed set `{t ≥ s}`.
    pub fn closed_indicator(base: Arc<FacePoset>, field: Field, s: usize) -> Sheaf {
        let set = base.closure(s);
        Sheaf::constant_on(base, Arc::new(Complex::unit(field)), &set).expect("closures are closed")
    }

    /// Skyscraper `k` at a single cell.
    pub fn skyscraper(base: Arc<FacePoset>, field: Field, s: usize) -> Sheaf {
        Sheaf::constant_on(base, Arc::new(Complex::unit(field)), &[s]).expect("points are locally closed")
    }

    pub fn base(&self) -> &Arc<FacePoset> {
        &self.base
    }

    pub fn stalk(&self, s: usize) -> &Arc<Complex> {
        &self.stalks[s]
    }

    pub fn stalks(&self) -> &[Arc<Complex>] {
        &self.stalks
    }

    /// `ρ_{s≤t}` as a chain map (identity for `s == t`, zero when absent).
    pub fn map(&self, s: usize, t: usize) -> ChainMap {
        if s == t {
            return ChainMap::identity(self.stalks[s].clone());
        }
        match self.maps.get(&(s, t)) {
            Some(m) => m.clone(),
            None => ChainMap::zero(self.stalks[t].clone(), self.stalks[s].clone()),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.stalks.iter().all(|c| c.is_zero())
    }

    /// Stalkwise acyclic, i.e. zero in the derived category.
    pub fn is_acyclic(&self) -> bool {
        self.stalks.iter().all(|c| c.is_acyclic())
    }

    pub fn total_dim(&self) -> usize {
        self.stalks.iter().map(|c| c.total_dim()).sum()
    }

    pub fn stalk_cohomology(&self) -> Vec<Graded> {
        self.stalks.iter().map(|c| c.cohomology()).collect()
    }

    /// Cells with nonzero stalk cohomology.
    pub fn support(&self) -> Vec<usize> {
        (0..self.base.len()).filter(|&s| !self.stalks[s].is_acyclic()).collect()
    }

    pub fn shift(&self, n: i32) -> Sheaf {
        let stalks: Vec<Arc<Complex>> = self.stalks.iter().map(|c| Arc::new(c.shift(n))).collect();
        let maps = self.maps.iter().map(|(k, m)| (*k, m.shift(n))).collect();
        Sheaf { base: self.base.clone(), field: self.field, stalks, maps }
    }

    pub fn direct_sum(parts: &[&Sheaf]) -> Result<Sheaf> {
        let first = parts.first().ok_or_else(|| Error::Precondition("empty direct sum".into()))?;
        for p in parts {
            if p.base != first.base {
                return Err(Error::BaseMismatch("direct sum of sheaves on different spaces".into()));
            }
        }
        let base = first.base.clone();
        let field = first.field;
        let stalks: Vec<Arc<Complex>> = (0..base.len())
            .map(|s| {
                let cs: Vec<&Complex> = parts.iter().map(|p| p.stalks[s].as_ref()).collect();
                Arc::new(Complex::direct_sum(field, &cs))
            })
            .collect();
        let st = stalks.clone();
        Ok(Sheaf::from_fn(base, field, stalks, |s, t| {
            let maps: Vec<ChainMap> = parts.iter().map(|p| p.map(s, t)).collect();
            block_diag_map(&st[t], &st[s], &maps)
        }))
    }

    /// Stalkwise tensor product.
    pub fn tensor(a: &Sheaf, b: &Sheaf) -> Result<Sheaf> {
        if a.base != b.base {
            return Err(Error::BaseMismatch("tensor of sheaves on different spaces".into()));
        }
        let stalks: Vec<Arc<Complex>> =
            (0..a.base.len()).map(|s| Arc::new(Complex::tensor(&a.stalks[s], &b.stalks[s]))).collect();
        let st = stalks.clone();
        Ok(Sheaf::from_fn(a.base.clone(), a.field, stalks, |s, t| {
            let m = ChainMap::tensor(&a.map(s, t), &b.map(s, t));
            ChainMap::from_parts(st[t].clone(), st[s].clone(), m.components().clone())
        }))
    }

    /// Tensor with a fixed complex.
    pub fn tensor_complex(&self, c: &Arc<Complex>) -> Sheaf {
        let k = Sheaf::constant_on(self.base.clone(), c.clone(), &(0..self.base.len()).collect::<Vec<_>>())
            .expect("whole space is convex");
        Sheaf::tensor(self, &k).expect("same base")
    }

    /// Sheaf with the same data on an equal base (after a rebuild).
    pub fn rebase(&self, base: Arc<FacePoset>) -> Result<Sheaf> {
        if base.as_ref() != self.base.as_ref() {
            return Err(Error::BaseMismatch("rebase onto a different space".into()));
        }
        Ok(Sheaf { base, ..self.clone() })
    }

    /// Restriction to the induced face poset on `set`.
    pub fn restrict(&self, set: &[usize]) -> Sheaf {
        let (sub, ids) = self.base.induced(set);
        let stalks = ids.iter().map(|&s| self.stalks[s].clone()).collect();
        Sheaf::from_fn(sub, self.field, stalks, |a, b| self.map(ids[a], ids[b]))
    }

    /// Sections over an open set: the homotopy limit over it.
    pub fn sections(&self, set: &[usize]) -> Result<Complex> {
        Ok(self.sections_indexed(set)?.0)
    }

    pub fn sections_indexed(&self, set: &[usize]) -> Result<(Complex, TotalIndex)> {
        match self.base.classify(set) {
            SubsetKind::Open | SubsetKind::Clopen => {}
            _ => return Err(Error::NotOpen(format!("sections over a set that is not open ({} cells)", set.len()))),
        }
        Ok(diagram::holim(self, &self.base.poset().mask(set)))
    }

    pub fn global_sections(&self) -> Complex {
        let all = vec![true; self.base.len()];
        diagram::holim(self, &all).0
    }

    /// Hom complex over the elements of `mask`, as a cobar total complex
    /// with blocks `Hom(F(pk), G(p0))`.
    pub fn hom_over(f: &Sheaf, g: &Sheaf, mask: &[bool]) -> (Complex, TotalIndex) {
        let field = f.field;
        let chains: Vec<Vec<usize>> = f
            .base
            .poset()
            .chains(mask)
            .into_iter()
            .flatten()
            .filter(|c| !f.stalks[*c.last().unwrap()].is_zero() && !g.stalks[c[0]].is_zero())
            .collect();
        let mut cache: HashMap<(usize, usize), Arc<Complex>> = HashMap::new();
        for c in &chains {
            let key = (*c.last().unwrap(), c[0]);
            cache.entry(key).or_insert_with(|| Arc::new(Complex::hom(&f.stalks[key.0], &g.stalks[key.1])));
        }
        cobar_total(
            field,
            chains,
            |c| cache[&(*c.last().unwrap(), c[0])].clone(),
            |cp, i, m| {
                let k = cp.len() - 1;
                if i == 0 {
                    Some(ChainMap::hom_post_matrix(&f.stalks[cp[k]], &g.map(cp[0], cp[1]), m))
                } else if i == k {
                    Some(ChainMap::hom_pre_matrix(&f.map(cp[k - 1], cp[k]), &g.stalks[cp[0]], m))
                } else {
                    None
                }
            },
        )
    }

    /// Derived global Hom complex.
    pub fn derived_hom(f: &Sheaf, g: &Sheaf) -> Result<Complex> {
        if f.base != g.base {
            return Err(Error::BaseMismatch("derived Hom across spaces".into()));
        }
        let all = vec![true; f.base.len()];
        Ok(Sheaf::hom_over(f, g, &all).0)
    }

    /// Internal Hom: the sheaf `s ↦ Hom(F|str s, G|str s)`.
    pub fn sheaf_hom(f: &Sheaf, g: &Sheaf) -> Result<Sheaf> {
        if f.base != g.base {
            return Err(Error::BaseMismatch("internal Hom across spaces".into()));
        }
        let p = f.base.poset();
        let local: Vec<(Arc<Complex>, TotalIndex)> = (0..p.len())
            .map(|s| {
                let (c, idx) = Sheaf::hom_over(f, g, &p.mask(&p.down_set(s)));
                (Arc::new(c), idx)
            })
            .collect();
        let stalks = local.iter().map(|(c, _)| c.clone()).collect();
        Ok(Sheaf::from_fn(f.base.clone(), f.field, stalks, |s, t| {
            diagram::total_projection((&local[t].0, &local[t].1), (&local[s].0, &local[s].1))
        }))
    }

    /// Stalkwise linear dual, a sheaf on the opposite poset; only useful
    /// through [`Sheaf::stalk`].
    pub fn stalk_duals(&self) -> Vec<Complex> {
        self.stalks.iter().map(|c| c.dual()).collect()
    }
}

/// Block diagonal chain map between direct sums.
pub fn block_diag_map(src: &Arc<Complex>, tgt: &Arc<Complex>, maps: &[ChainMap]) -> ChainMap {
    let field = src.field();
    ChainMap::build(src.clone(), tgt.clone(), |n| {
        let rs: Vec<usize> = maps.iter().map(|m| m.target().dim(n)).collect();
        let cs: Vec<usize> = maps.iter().map(|m| m.source().dim(n)).collect();
        let blocks = maps.iter().enumerate().map(|(i, m)| (i, i, m.comp(n))).collect();
        Matrix::from_blocks(field, &rs, &cs, blocks)
    })
}

/// Natural transformation of sheaves.
#[derive(Clone, Debug)]
pub struct SheafMap {
    source: Arc<Sheaf>,
    target: Arc<Sheaf>,
    comps: Vec<ChainMap>,
}

impl SheafMap {
    /// Validated constructor: each component is a chain map and every
    /// restriction square commutes.
    pub fn new(source: Arc<Sheaf>, target: Arc<Sheaf>, comps: Vec<ChainMap>) -> Result<SheafMap> {
        let f = SheafMap::from_parts(source, target, comps)?;
        f.validate()?;
        Ok(f)
    }

    pub fn from_parts(source: Arc<Sheaf>, target: Arc<Sheaf>, comps: Vec<ChainMap>) -> Result<SheafMap> {
        if source.base != target.base {
            return Err(Error::BaseMismatch("sheaf map across spaces".into()));
        }
        if comps.len() != source.base.len() {
            return Err(Error::Shape("one component per cell".into()));
        }
        let comps = comps
            .into_iter()
            .enumerate()
            .map(|(s, m)| ChainMap::from_parts(source.stalks[s].clone(), target.stalks[s].clone(), m.components().clone()))
            .collect();
        Ok(SheafMap { source, target, comps })
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.source.base.poset();
        for (s, m) in self.comps.iter().enumerate() {
            m.check()
                .map_err(|e| Error::Precondition(format!("component at {}: {e}", p.name(s))))?;
        }
        for s in 0..p.len() {
            for &t in p.above(s) {
                let lhs = self.comps[s].after(&self.source.map(s, t));
                let rhs = self.target.map(s, t).after(&self.comps[t]);
                if lhs != rhs {
                    return Err(Error::Precondition(format!(
                        "square at {} ≤ {} does not commute",
                        p.name(s),
                        p.name(t)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn identity(f: &Arc<Sheaf>) -> SheafMap {
        let comps = f.stalks.iter().map(|c| ChainMap::identity(c.clone())).collect();
        SheafMap { source: f.clone(), target: f.clone(), comps }
    }

    pub fn zero(source: Arc<Sheaf>, target: Arc<Sheaf>) -> SheafMap {
        let comps = (0..source.base.len())
            .map(|s| ChainMap::zero(source.stalks[s].clone(), target.stalks[s].clone()))
            .collect();
        SheafMap { source, target, comps }
    }

    pub fn source(&self) -> &Arc<Sheaf> {
        &self.source
    }
    pub fn target(&self) -> &Arc<Sheaf> {
        &self.target
    }
    pub fn comp(&self, s: usize) -> &ChainMap {
        &self.comps[s]
    }
    pub fn comps(&self) -> &[ChainMap] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|m| m.is_zero())
    }

    /// `self ∘ g`.
    pub fn after(&self, g: &SheafMap) -> Result<SheafMap> {
        if g.target.as_ref() != self.source.as_ref() {
            return Err(Error::Shape("sheaf maps are not composable".into()));
        }
        let comps = self.comps.iter().zip(&g.comps).map(|(a, b)| a.after(b)).collect();
        SheafMap::from_parts(g.source.clone(), self.target.clone(), comps)
    }

    pub fn add(&self, g: &SheafMap) -> SheafMap {
        let comps = self.comps.iter().zip(&g.comps).map(|(a, b)| a.add(b)).collect();
        SheafMap { source: self.source.clone(), target: self.target.clone(), comps }
    }

    pub fn scale(&self, a: &crate::field::Scalar) -> SheafMap {
        let comps = self.comps.iter().map(|m| m.scale(a)).collect();
        SheafMap { source: self.source.clone(), target: self.target.clone(), comps }
    }

    pub fn shift(&self, n: i32) -> SheafMap {
        let source = Arc::new(self.source.shift(n));
        let target = Arc::new(self.target.shift(n));
        let comps = self.comps.iter().map(|m| m.shift(n)).collect();
        SheafMap { source, target, comps }
    }

    /// Stalkwise quasi-isomorphism.
    pub fn is_quasi_iso(&self) -> bool {
        self.comps.iter().all(|m| m.is_quasi_iso())
    }

    pub fn cone(&self) -> Sheaf {
        let (a, b) = (&self.source, &self.target);
        let stalks: Vec<Arc<Complex>> = self.comps.iter().map(|m| Arc::new(Complex::cone(m))).collect();
        Sheaf::from_fn(a.base.clone(), a.field, stalks, |s, t| {
            ChainMap::cone_of_square(&self.comps[t], &self.comps[s], &a.map(s, t), &b.map(s, t))
        })
    }

    pub fn fiber(&self) -> Sheaf {
        self.cone().shift(-1)
    }

    /// Inclusion `B → cone(f)`.
    pub fn cone_inclusion(&self, cone: &Arc<Sheaf>) -> SheafMap {
        let comps = self.comps.iter().map(ChainMap::cone_inclusion).collect();
        SheafMap::from_parts(self.target.clone(), cone.clone(), comps).expect("same base")
    }

    /// Projection `fib(f) → A`.
    pub fn fiber_projection(&self, fib: &Arc<Sheaf>) -> SheafMap {
        let comps = self.comps.iter().map(ChainMap::fiber_projection).collect();
        SheafMap::from_parts(fib.clone(), self.source.clone(), comps).expect("same base")
    }

    /// Components as a map of stalks keyed by degree, for inspection.
    pub fn matrices(&self, s: usize) -> &BTreeMap<i32, Matrix> {
        self.comps[s].components()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SimplicialComplex;

    fn q() -> Field {
        Field::Rationals
    }

    #[test]
    fn constant_sections_of_circle() {
        let s = SimplicialComplex::circle(3).unwrap().face_poset();
        let k = Sheaf::constant(s, q());
        assert_eq!(k.global_sections().cohomology(), Graded::from_pairs(&[(0, 1), (1, 1)]));
    }

    #[test]
    fn indicator_represents_stalk() {
        let s = SimplicialComplex::circle(3).unwrap().face_poset();
        let k = Sheaf::constant(s.clone(), q());
        let v = s.index_of("0").unwrap();
        let p = Sheaf::indicator(s, q(), v);
        let h = Sheaf::derived_hom(&p, &k).unwrap();
        assert_eq!(h.cohomology(), Graded::from_pairs(&[(0, 1)]));
    }

    #[test]
    fn hom_from_constant_is_sections() {
        let s = SimplicialComplex::circle(4).unwrap().face_poset();
        let k = Sheaf::constant(s, q());
        assert_eq!(Sheaf::derived_hom(&k, &k).unwrap().cohomology(), k.global_sections().cohomology());
    }

    #[test]
    fn internal_hom_stalks() {
        let s = SimplicialComplex::interval().face_poset();
        let k = Sheaf::constant(s.clone(), q());
        let h = Sheaf::sheaf_hom(&k, &k).unwrap();
        h.validate().unwrap();
        for c in h.stalk_cohomology() {
            assert_eq!(c, Graded::from_pairs(&[(0, 1)]));
        }
    }

    #[test]
    fn non_convex_support_rejected() {
        let s = SimplicialComplex::simplex(2).face_poset();
        let top = s.index_of("0-1-2").unwrap();
        let v = s.index_of("0").unwrap();
        assert!(Sheaf::constant_on(s.clone(), Arc::new(Complex::unit(q())), &[top, v]).is_err());
    }

    #[test]
    fn closed_vertex_skyscraper_cone() {
        let s = SimplicialComplex::interval().face_poset();
        let v = s.index_of("0").unwrap();
        let k = Arc::new(Sheaf::constant(s.clone(), q()));
        let sky = Arc::new(Sheaf::closed_indicator(s.clone(), q(), v));
        let comps: Vec<ChainMap> = (0..s.len())
            .map(|t| {
                if t == v {
                    ChainMap::identity(k.stalk(t).clone())
                } else {
                    ChainMap::zero(k.stalk(t).clone(), sky.stalk(t).clone())
                }
            })
            .collect();
        let f = SheafMap::new(k.clone(), sky, comps).unwrap();
        let c = f.fiber();
        c.validate().unwrap();
        assert!(c.stalk(v).is_acyclic());
    }
}
