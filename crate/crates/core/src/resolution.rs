//! Complexes of indicator sheaves: projective resolutions, minimization,
//! Hom into and out of them, and a quasi-isomorphism test.
//!
//! A projective generator with label `s` stands for `k` on the open star of
//! `s` (so `Hom(P_s, G) = G(s)`); an injective one stands for `k` on the
//! closure of `s` (so `Hom(G, I_s) = G(s)^*`). In both cases a nonzero
//! coefficient `d[h, g]` needs `label_g ≤ label_h`.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap};
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::{ChainMap, Complex, Graded};
use crate::diagram::Diagram;
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::geometry::{FacePoset, PosetMap};
use crate::matrix::{axpy, Matrix, SVec};
use crate::sheaf::{Sheaf, SheafMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Projective,
    Injective,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator {
    pub label: usize,
    pub degree: i32,
}

/// Finite complex of indicator sheaves, `d[h, g]` the coefficient of `e_h` in `d e_g`.
#[derive(Clone, Debug, PartialEq)]
pub struct IndicatorComplex {
    base: Arc<FacePoset>,
    field: Field,
    kind: Kind,
    gens: Vec<Generator>,
    d: Matrix,
}

impl IndicatorComplex {
    pub fn new(base: Arc<FacePoset>, field: Field, kind: Kind, gens: Vec<Generator>, d: Matrix) -> Result<Self> {
        if d.rows() != gens.len() || d.cols() != gens.len() {
            return Err(Error::Shape("differential must be square over the generators".into()));
        }
        if let Some(g) = gens.iter().find(|g| g.label >= base.len()) {
            return Err(Error::Shape(format!("label {} out of range", g.label)));
        }
        for (h, g, _) in d.entries() {
            if gens[h].degree != gens[g].degree + 1 {
                return Err(Error::Precondition(format!("entry ({h},{g}) does not raise degree by one")));
            }
            if !base.le(gens[g].label, gens[h].label) {
                return Err(Error::Precondition(format!(
                    "no map between indicators at {} and {}",
                    base.name(gens[g].label),
                    base.name(gens[h].label)
                )));
            }
        }
        let dd = d.mul(&d);
        if let Some((h, _, _)) = dd.entries().next() {
            let n = gens[h].degree - 2;
            return Err(Error::NotAComplex(n, n + 2));
        }
        Ok(IndicatorComplex { base, field, kind, gens, d })
    }

    pub fn from_parts(base: Arc<FacePoset>, field: Field, kind: Kind, gens: Vec<Generator>, d: Matrix) -> Self {
        IndicatorComplex { base, field, kind, gens, d }
    }

    pub fn zero(base: Arc<FacePoset>, field: Field, kind: Kind) -> Self {
        IndicatorComplex { base, field, kind, gens: Vec::new(), d: Matrix::zeros(field, 0, 0) }
    }

    /// One generator with label `s` in degree `deg`.
    pub fn single(base: Arc<FacePoset>, field: Field, kind: Kind, s: usize, deg: i32) -> Self {
        let gens = vec![Generator { label: s, degree: deg }];
        IndicatorComplex { base, field, kind, gens, d: Matrix::zeros(field, 1, 1) }
    }

    pub fn base(&self) -> &Arc<FacePoset> {
        &self.base
    }
    pub fn field(&self) -> Field {
        self.field
    }
    pub fn kind(&self) -> Kind {
        self.kind
    }
    pub fn gens(&self) -> &[Generator] {
        &self.gens
    }
    pub fn d(&self) -> &Matrix {
        &self.d
    }
    pub fn len(&self) -> usize {
        self.gens.len()
    }
    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    /// Generator counts per label.
    pub fn counts(&self) -> Vec<Graded> {
        let mut out = vec![Graded::new(); self.base.len()];
        for g in &self.gens {
            out[g.label].add(g.degree, 1);
        }
        out
    }

    /// `P[k]`: degrees lowered by `k`, differential scaled by `(-1)^k`.
    pub fn shift(&self, k: i32) -> Self {
        let gens = self.gens.iter().map(|g| Generator { label: g.label, degree: g.degree - k }).collect();
        let d = self.d.scale(&self.field.sign(k as i64));
        IndicatorComplex { gens, d, ..self.clone() }
    }

    pub fn direct_sum(parts: &[&IndicatorComplex]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::Precondition("empty direct sum".into()))?;
        if parts.iter().any(|p| p.base != first.base || p.kind != first.kind) {
            return Err(Error::BaseMismatch("direct sum of indicator complexes".into()));
        }
        let gens = parts.iter().flat_map(|p| p.gens.iter().copied()).collect();
        let ds: Vec<&Matrix> = parts.iter().map(|p| &p.d).collect();
        let d = Matrix::block_diag(first.field, &ds);
        Ok(IndicatorComplex { base: first.base.clone(), field: first.field, kind: first.kind, gens, d })
    }

    /// Same data read as the other kind (`P_s ↔ I_s`).
    pub fn nakayama(&self) -> Self {
        let kind = match self.kind {
            Kind::Projective => Kind::Injective,
            Kind::Injective => Kind::Projective,
        };
        IndicatorComplex { kind, ..self.clone() }
    }

    /// Relabels along an order-preserving map: `P_s ↦ P_{f(s)}` (left
    /// adjoint of pullback) or `I_s ↦ I_{f(s)}` (right adjoint).
    pub fn relabel(&self, f: &PosetMap) -> Result<Self> {
        if f.source().as_ref() != self.base.as_ref() {
            return Err(Error::BaseMismatch("relabel along a map from another space".into()));
        }
        let gens = self.gens.iter().map(|g| Generator { label: f.apply(g.label), degree: g.degree }).collect();
        Ok(IndicatorComplex { base: f.target().clone(), gens, ..self.clone() })
    }

    /// Generators visible at stalk `t`, by degree, in increasing index order.
    fn visible(&self, t: usize) -> BTreeMap<i32, Vec<usize>> {
        let mut out: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
        for (i, g) in self.gens.iter().enumerate() {
            let ok = match self.kind {
                Kind::Projective => self.base.le(t, g.label),
                Kind::Injective => self.base.le(g.label, t),
            };
            if ok {
                out.entry(g.degree).or_default().push(i);
            }
        }
        out
    }

    /// The sheaf this complex stands for.
    pub fn to_sheaf(&self) -> Sheaf {
        let n = self.base.len();
        let vis: Vec<BTreeMap<i32, Vec<usize>>> = (0..n).map(|t| self.visible(t)).collect();
        let stalks: Vec<Arc<Complex>> = vis
            .iter()
            .map(|v| {
                if v.is_empty() {
                    return Arc::new(Complex::zero(self.field));
                }
                let lo = *v.keys().next().unwrap();
                let hi = *v.keys().last().unwrap();
                let dim = |k: i32| v.get(&k).map_or(0, |x| x.len());
                let c = Complex::build(self.field, lo, hi, dim, |k| {
                    let empty = Vec::new();
                    let rows = v.get(&(k + 1)).unwrap_or(&empty);
                    let cols = v.get(&k).unwrap_or(&empty);
                    self.d.select_rows(rows).select_cols(cols)
                });
                Arc::new(c)
            })
            .collect();
        let field = self.field;
        let st = stalks.clone();
        Sheaf::from_fn(self.base.clone(), field, stalks, |s, t| {
            // Projective kind: inclusion of generators; injective kind: projection.
            ChainMap::build(st[t].clone(), st[s].clone(), |k| {
                let empty = Vec::new();
                let a = vis[s].get(&k).unwrap_or(&empty);
                let b = vis[t].get(&k).unwrap_or(&empty);
                let pos: HashMap<usize, usize> = a.iter().enumerate().map(|(i, g)| (*g, i)).collect();
                let trip = b.iter().enumerate().filter_map(|(j, g)| pos.get(g).map(|i| (*i, j, field.one())));
                Matrix::from_triplets(field, a.len(), b.len(), trip)
            })
        })
    }

    /// Minimal model: cancels every differential entry between generators
    /// with the same label. Returns the complex and, for each surviving
    /// generator, its old index and the column of the inclusion
    /// `P_min → P` (as a combination of old generators).
    pub fn minimize(&self) -> (IndicatorComplex, Vec<usize>, Vec<SVec>) {
        let mut w = Work::new(self);
        let mut pending: std::collections::BTreeSet<usize> = (0..self.len()).collect();
        while let Some(i) = pending.pop_first() {
            if !w.alive[i] {
                continue;
            }
            let piv = w.cols[i].iter().find(|(h, _)| self.gens[**h].label == self.gens[i].label).map(|(h, _)| *h);
            if let Some(j) = piv {
                for a in w.eliminate(i, j) {
                    pending.insert(a);
                }
            }
        }
        w.finish(self)
    }

    /// Graded Hom into a sheaf (projective kind): `Hom^n = ⊕_g G(label_g)^{deg_g + n}`.
    pub fn hom_to(&self, g: &Sheaf) -> Result<(Complex, HomIndex)> {
        self.require(Kind::Projective)?;
        if g.base().as_ref() != self.base.as_ref() {
            return Err(Error::BaseMismatch("Hom out of an indicator complex on another space".into()));
        }
        let field = self.field;
        let dim_of = |i: usize, n: i32| g.stalk(self.gens[i].label).dim(self.gens[i].degree + n);
        let (lo, hi) = self.hom_range(|i| (g.stalk(self.gens[i].label).lo(), g.stalk(self.gens[i].label).hi()), true, g);
        let index = HomIndex::new(self.len(), lo, hi, dim_of);
        let c = Complex::build(field, lo, hi, |n| index.total(n), |n| {
            let mut trip = Vec::new();
            let sgn = field.neg(&field.sign(n as i64));
            for (gi, gen) in self.gens.iter().enumerate() {
                if let (Some(so), Some(to)) = (index.offset(n, gi), index.offset(n + 1, gi)) {
                    for (r, c, v) in g.stalk(gen.label).d(gen.degree + n).entries() {
                        trip.push((to + r, so + c, v.clone()));
                    }
                }
            }
            for (h, gi, coef) in self.d.entries() {
                if let (Some(so), Some(to)) = (index.offset(n, h), index.offset(n + 1, gi)) {
                    let lh = self.gens[h].label;
                    let lg = self.gens[gi].label;
                    let m = g.restriction_matrix(lg, lh, self.gens[h].degree + n);
                    let c2 = field.mul(&sgn, coef);
                    for (r, c, v) in m.entries() {
                        trip.push((to + r, so + c, field.mul(&c2, v)));
                    }
                }
            }
            Matrix::from_triplets(field, index.total(n + 1), index.total(n), trip)
        });
        Ok((c, index))
    }

    /// Graded Hom from a sheaf (injective kind): component `ψ_g` is a
    /// functional on `F(label_g)^{deg_g - n}`.
    pub fn hom_from(&self, f: &Sheaf) -> Result<(Complex, HomIndex)> {
        self.require(Kind::Injective)?;
        if f.base().as_ref() != self.base.as_ref() {
            return Err(Error::BaseMismatch("Hom into an indicator complex on another space".into()));
        }
        let field = self.field;
        let dim_of = |i: usize, n: i32| f.stalk(self.gens[i].label).dim(self.gens[i].degree - n);
        let (lo, hi) = self.hom_range(|i| (f.stalk(self.gens[i].label).lo(), f.stalk(self.gens[i].label).hi()), false, f);
        let index = HomIndex::new(self.len(), lo, hi, dim_of);
        let c = Complex::build(field, lo, hi, |n| index.total(n), |n| {
            let mut trip = Vec::new();
            let sgn = field.neg(&field.sign(n as i64));
            for (h, gen) in self.gens.iter().enumerate() {
                if let (Some(so), Some(to)) = (index.offset(n, h), index.offset(n + 1, h)) {
                    let m = f.stalk(gen.label).d(gen.degree - n - 1).transpose();
                    for (r, c, v) in m.entries() {
                        trip.push((to + r, so + c, field.mul(&sgn, v)));
                    }
                }
            }
            for (h, gi, coef) in self.d.entries() {
                if let (Some(so), Some(to)) = (index.offset(n, gi), index.offset(n + 1, h)) {
                    let lg = self.gens[gi].label;
                    let lh = self.gens[h].label;
                    let m = f.restriction_matrix(lg, lh, self.gens[gi].degree - n).transpose();
                    for (r, c, v) in m.entries() {
                        trip.push((to + r, so + c, field.mul(coef, v)));
                    }
                }
            }
            Matrix::from_triplets(field, index.total(n + 1), index.total(n), trip)
        });
        Ok((c, index))
    }

    fn hom_range(&self, span: impl Fn(usize) -> (i32, i32), into: bool, s: &Sheaf) -> (i32, i32) {
        let mut lo = i32::MAX;
        let mut hi = i32::MIN;
        for (i, g) in self.gens.iter().enumerate() {
            if s.stalk(g.label).is_zero() {
                continue;
            }
            let (a, b) = span(i);
            let (x, y) = if into { (a - g.degree, b - g.degree) } else { (g.degree - b, g.degree - a) };
            lo = lo.min(x);
            hi = hi.max(y);
        }
        if lo > hi {
            (0, -1)
        } else {
            (lo, hi)
        }
    }

    fn require(&self, kind: Kind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::KindMismatch { expected: format!("{kind:?}"), got: format!("{:?}", self.kind) });
        }
        Ok(())
    }

    /// Strict map `P[-n] → G` from a degree-`n` cocycle of [`Self::hom_to`].
    pub fn map_from_cocycle(&self, g: &Arc<Sheaf>, index: &HomIndex, z: &SVec, n: i32) -> Result<SheafMap> {
        let src = Arc::new(self.shift(-n).to_sheaf());
        let field = self.field;
        let mut parts: Vec<SVec> = vec![Vec::new(); self.len()];
        for (pos, v) in z {
            let (gi, local) = index.locate(n, *pos);
            parts[gi].push((local, v.clone()));
        }
        let comps = (0..self.base.len())
            .map(|t| {
                let vis = self.shift(-n).visible(t);
                ChainMap::build(src.stalk(t).clone(), g.stalk(t).clone(), |k| {
                    let empty = Vec::new();
                    let gs = vis.get(&k).unwrap_or(&empty);
                    let cols: Vec<SVec> = gs
                        .iter()
                        .map(|&gi| {
                            let m = g.restriction_matrix(t, self.gens[gi].label, k);
                            m.apply(&parts[gi])
                        })
                        .collect();
                    Matrix::from_columns(field, g.stalk(t).dim(k), cols)
                })
            })
            .collect();
        SheafMap::new(src, g.clone(), comps)
    }

    /// Strict map `F → R[n]` from a degree-`n` cocycle of [`Self::hom_from`].
    pub fn map_from_cocycle_into(&self, f: &Arc<Sheaf>, index: &HomIndex, z: &SVec, n: i32) -> Result<SheafMap> {
        let shifted = self.shift(n);
        let tgt = Arc::new(shifted.to_sheaf());
        let field = self.field;
        let mut parts: Vec<SVec> = vec![Vec::new(); self.len()];
        for (pos, v) in z {
            let (gi, local) = index.locate(n, *pos);
            parts[gi].push((local, v.clone()));
        }
        let comps = (0..self.base.len())
            .map(|t| {
                let vis = shifted.visible(t);
                ChainMap::build(f.stalk(t).clone(), tgt.stalk(t).clone(), |k| {
                    let empty = Vec::new();
                    let gs = vis.get(&k).unwrap_or(&empty);
                    let mut trip = Vec::new();
                    for (row, &gi) in gs.iter().enumerate() {
                        // ψ_g ∘ ρ_{label_g ≤ t} as a row.
                        let m = f.restriction_matrix(self.gens[gi].label, t, k).transpose();
                        for (c, v) in m.apply(&parts[gi]) {
                            trip.push((row, c, v));
                        }
                    }
                    Matrix::from_triplets(field, gs.len(), f.stalk(t).dim(k), trip)
                })
            })
            .collect();
        SheafMap::new(f.clone(), tgt, comps)
    }
}

/// Offsets of generator blocks in each degree of a Hom complex.
#[derive(Clone, Debug)]
pub struct HomIndex {
    lo: i32,
    blocks: Vec<Vec<(usize, usize, usize)>>,
    totals: Vec<usize>,
    lookup: Vec<HashMap<usize, usize>>,
}

impl HomIndex {
    fn new(ngens: usize, lo: i32, hi: i32, dim: impl Fn(usize, i32) -> usize) -> HomIndex {
        let mut blocks = Vec::new();
        let mut totals = Vec::new();
        let mut lookup = Vec::new();
        for n in lo..=hi {
            let mut acc = 0;
            let mut b = Vec::new();
            let mut l = HashMap::new();
            for g in 0..ngens {
                let d = dim(g, n);
                if d > 0 {
                    l.insert(g, b.len());
                    b.push((g, acc, d));
                    acc += d;
                }
            }
            blocks.push(b);
            totals.push(acc);
            lookup.push(l);
        }
        HomIndex { lo, blocks, totals, lookup }
    }

    fn slot(&self, n: i32) -> Option<usize> {
        let i = n - self.lo;
        if i < 0 || i as usize >= self.totals.len() {
            None
        } else {
            Some(i as usize)
        }
    }

    pub fn total(&self, n: i32) -> usize {
        self.slot(n).map_or(0, |i| self.totals[i])
    }

    pub fn offset(&self, n: i32, g: usize) -> Option<usize> {
        let i = self.slot(n)?;
        let b = *self.lookup[i].get(&g)?;
        Some(self.blocks[i][b].1)
    }

    /// Generator and local coordinate of a position in degree `n`.
    pub fn locate(&self, n: i32, pos: usize) -> (usize, usize) {
        let i = self.slot(n).expect("degree in range");
        let b = &self.blocks[i];
        let k = b.partition_point(|(_, off, _)| *off <= pos) - 1;
        (b[k].0, pos - b[k].1)
    }
}

struct Work {
    field: Field,
    cols: Vec<BTreeMap<usize, Scalar>>,
    rows: Vec<BTreeMap<usize, Scalar>>,
    alive: Vec<bool>,
    incl: Vec<SVec>,
}

impl Work {
    fn new(p: &IndicatorComplex) -> Work {
        let n = p.len();
        let mut cols = vec![BTreeMap::new(); n];
        let mut rows = vec![BTreeMap::new(); n];
        for (r, c, v) in p.d.entries() {
            cols[c].insert(r, v.clone());
            rows[r].insert(c, v.clone());
        }
        let incl = (0..n).map(|i| vec![(i, p.field.one())]).collect();
        Work { field: p.field, cols, rows, alive: vec![true; n], incl }
    }

    fn set(&mut self, r: usize, c: usize, v: Scalar) {
        if v.is_zero() {
            self.cols[c].remove(&r);
            self.rows[r].remove(&c);
        } else {
            self.cols[c].insert(r, v.clone());
            self.rows[r].insert(c, v);
        }
    }

    fn get(&self, r: usize, c: usize) -> Scalar {
        self.cols[c].get(&r).cloned().unwrap_or_else(|| self.field.zero())
    }

    /// Cancels the pair `e_i → e_j`; returns the columns that changed.
    fn eliminate(&mut self, i: usize, j: usize) -> Vec<usize> {
        let f = self.field;
        let piv = self.get(j, i);
        let row_j: Vec<(usize, Scalar)> =
            self.rows[j].iter().filter(|(a, _)| **a != i).map(|(a, v)| (*a, v.clone())).collect();
        let col_i: Vec<(usize, Scalar)> =
            self.cols[i].iter().filter(|(b, _)| **b != j).map(|(b, v)| (*b, v.clone())).collect();
        let mut touched = Vec::new();
        for (a, dja) in &row_j {
            let c = f.div(dja, &piv);
            for (b, dbi) in &col_i {
                let nv = f.sub(&self.get(*b, *a), &f.mul(&c, dbi));
                self.set(*b, *a, nv);
            }
            let inc_i = self.incl[i].clone();
            self.incl[*a] = axpy(f, &self.incl[*a], &f.neg(&c), &inc_i);
            touched.push(*a);
        }
        for x in [i, j] {
            let cs: Vec<usize> = self.rows[x].keys().copied().collect();
            for c in cs {
                self.set(x, c, f.zero());
            }
            let rs: Vec<usize> = self.cols[x].keys().copied().collect();
            for r in rs {
                self.set(r, x, f.zero());
            }
            self.alive[x] = false;
        }
        touched
    }

    fn finish(self, p: &IndicatorComplex) -> (IndicatorComplex, Vec<usize>, Vec<SVec>) {
        let keep: Vec<usize> = (0..p.len()).filter(|&i| self.alive[i]).collect();
        let pos: HashMap<usize, usize> = keep.iter().enumerate().map(|(k, i)| (*i, k)).collect();
        let mut trip = Vec::new();
        for &c in &keep {
            for (r, v) in &self.cols[c] {
                trip.push((pos[r], pos[&c], v.clone()));
            }
        }
        let gens = keep.iter().map(|&i| p.gens[i]).collect();
        let d = Matrix::from_triplets(p.field, keep.len(), keep.len(), trip);
        let incl = keep.iter().map(|&i| self.incl[i].clone()).collect();
        let m = IndicatorComplex { base: p.base.clone(), field: p.field, kind: p.kind, gens, d };
        (m, keep, incl)
    }
}

/// Projective resolution with its augmentation `ε`: each generator maps to
/// a vector of `F(label)^{degree}`.
#[derive(Clone, Debug)]
pub struct Resolution {
    pub complex: IndicatorComplex,
    pub aug: Vec<SVec>,
    pub sheaf: Arc<Sheaf>,
}

impl Resolution {
    /// Bar resolution: generators `(p0<…<pk, b)` with `b` a basis vector of
    /// `F(pk)^m`, label `p0` and degree `m - k`.
    pub fn bar(f: &Arc<Sheaf>) -> Resolution {
        let field = f.field();
        let base = f.base().clone();
        let all = vec![true; base.len()];
        let chains: Vec<Vec<usize>> = base
            .poset()
            .chains(&all)
            .into_iter()
            .flatten()
            .filter(|c| !f.stalk(*c.last().unwrap()).is_zero())
            .collect();
        let mut gens = Vec::new();
        let mut ids: HashMap<(Vec<usize>, i32, usize), usize> = HashMap::new();
        for c in &chains {
            let st = f.stalk(*c.last().unwrap());
            let k = c.len() as i32 - 1;
            for m in st.lo()..=st.hi() {
                for b in 0..st.dim(m) {
                    ids.insert((c.clone(), m, b), gens.len());
                    gens.push(Generator { label: c[0], degree: m - k });
                }
            }
        }
        let mut trip = Vec::new();
        for c in &chains {
            let last = *c.last().unwrap();
            let st = f.stalk(last);
            let k = c.len() - 1;
            for m in st.lo()..=st.hi() {
                let dm = st.d(m);
                let rho = if k >= 1 { Some(f.restriction_matrix(c[k - 1], last, m)) } else { None };
                for b in 0..st.dim(m) {
                    let g = ids[&(c.clone(), m, b)];
                    for i in 0..=k {
                        if k == 0 {
                            break;
                        }
                        let face: Vec<usize> = c.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| *p).collect();
                        let sign = field.sign(i as i64);
                        if i < k {
                            if let Some(&h) = ids.get(&(face, m, b)) {
                                trip.push((h, g, sign));
                            }
                        } else {
                            for (b2, v) in rho.as_ref().unwrap().col(b) {
                                if let Some(&h) = ids.get(&(face.clone(), m, *b2)) {
                                    trip.push((h, g, field.mul(&sign, v)));
                                }
                            }
                        }
                    }
                    let sk = field.sign(k as i64);
                    for (b2, v) in dm.col(b) {
                        let h = ids[&(c.clone(), m + 1, *b2)];
                        trip.push((h, g, field.mul(&sk, v)));
                    }
                }
            }
        }
        let n = gens.len();
        let d = Matrix::from_triplets(field, n, n, trip);
        let mut aug = vec![Vec::new(); n];
        for c in chains.iter().filter(|c| c.len() == 1) {
            let st = f.stalk(c[0]);
            for m in st.lo()..=st.hi() {
                for b in 0..st.dim(m) {
                    aug[ids[&(c.clone(), m, b)]] = vec![(b, field.one())];
                }
            }
        }
        let complex = IndicatorComplex::from_parts(base, field, Kind::Projective, gens, d);
        Resolution { complex, aug, sheaf: f.clone() }
    }

    /// Minimal resolution.
    pub fn minimal(f: &Arc<Sheaf>) -> Resolution {
        let bar = Resolution::bar(f);
        bar.minimized()
    }

    pub fn minimized(&self) -> Resolution {
        let (m, keep, incl) = self.complex.minimize();
        let field = self.complex.field;
        let f = &self.sheaf;
        let aug = keep
            .iter()
            .zip(&incl)
            .map(|(&i, col)| {
                let li = self.complex.gens[i].label;
                let deg = self.complex.gens[i].degree;
                let mut acc: SVec = Vec::new();
                for (h, c) in col {
                    let lh = self.complex.gens[*h].label;
                    let v = f.restriction_matrix(li, lh, deg).apply(&self.aug[*h]);
                    acc = axpy(field, &acc, c, &v);
                }
                acc
            })
            .collect();
        Resolution { complex: m, aug, sheaf: self.sheaf.clone() }
    }

    /// The augmentation `P → F` as a sheaf map.
    pub fn augmentation(&self) -> SheafMap {
        let p = Arc::new(self.complex.to_sheaf());
        let f = &self.sheaf;
        let field = self.complex.field;
        let comps = (0..f.base().len())
            .map(|t| {
                let vis = self.complex.visible(t);
                ChainMap::build(p.stalk(t).clone(), f.stalk(t).clone(), |k| {
                    let empty = Vec::new();
                    let gs = vis.get(&k).unwrap_or(&empty);
                    let cols = gs
                        .iter()
                        .map(|&g| f.restriction_matrix(t, self.complex.gens[g].label, k).apply(&self.aug[g]))
                        .collect();
                    Matrix::from_columns(field, f.stalk(t).dim(k), cols)
                })
            })
            .collect();
        SheafMap::from_parts(p, f.clone(), comps).expect("same base")
    }
}

/// Content hash of a sheaf.
pub fn sheaf_hash(f: &Sheaf) -> u64 {
    let mut h = DefaultHasher::new();
    f.base().fingerprint().hash(&mut h);
    f.field().hash(&mut h);
    for s in 0..f.base().len() {
        f.stalk(s).hash(&mut h);
        for &t in f.base().poset().above(s) {
            if let Some(m) = f.restriction(s, t) {
                (s, t).hash(&mut h);
                m.components().hash(&mut h);
            }
        }
    }
    h.finish()
}

type Cache = Mutex<HashMap<u64, Vec<(Arc<Sheaf>, Arc<Resolution>)>>>;

fn cache() -> &'static Cache {
    static C: OnceLock<Cache> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

const CACHE_LIMIT: usize = 512;

/// Minimal resolution, memoized by sheaf content.
pub fn minimal_resolution(f: &Arc<Sheaf>) -> Arc<Resolution> {
    let key = sheaf_hash(f);
    if let Some(list) = cache().lock().unwrap().get(&key) {
        if let Some((_, r)) = list.iter().find(|(s, _)| s.as_ref() == f.as_ref()) {
            return r.clone();
        }
    }
    let r = Arc::new(Resolution::minimal(f));
    let mut c = cache().lock().unwrap();
    if c.len() >= CACHE_LIMIT {
        c.clear();
    }
    c.entry(key).or_default().push((f.clone(), r.clone()));
    r
}

/// `RHom(F, G)` through the minimal resolution of `F`.
pub fn rhom(f: &Arc<Sheaf>, g: &Sheaf) -> Result<Complex> {
    let r = minimal_resolution(f);
    Ok(r.complex.hom_to(g)?.0)
}

fn random_scalar(field: Field, rng: &mut ChaCha8Rng) -> Scalar {
    match field {
        Field::Rationals => field.from_i64(rng.gen_range(-1000..=1000)),
        Field::Prime(p) => field.from_i64(rng.gen_range(0..p as i64)),
    }
}

/// A degree-0 map `P_A → B` from a random combination of cocycles.
pub fn random_map(a: &Arc<Sheaf>, b: &Arc<Sheaf>, rng: &mut ChaCha8Rng) -> Result<Option<SheafMap>> {
    let r = minimal_resolution(a);
    let (hom, index) = r.complex.hom_to(b)?;
    let cocycles = hom.d(0).kernel_basis();
    if cocycles.is_empty() {
        return Ok(None);
    }
    let field = a.field();
    let mut z: SVec = Vec::new();
    for v in &cocycles {
        z = axpy(field, &z, &random_scalar(field, rng), v);
    }
    Ok(Some(r.complex.map_from_cocycle(b, &index, &z, 0)?))
}

/// Decides whether two sheaves are isomorphic in the derived category:
/// equal stalk cohomology, then a random element of `H^0 RHom(A, B)` is
/// tested for being a stalkwise quasi-isomorphism. A `true` answer is
/// certain; `false` can be wrong with small probability, since over tiny
/// fields few elements of the Hom space are invertible.
pub fn quasi_isomorphic(a: &Arc<Sheaf>, b: &Arc<Sheaf>, seed: u64) -> Result<bool> {
    if a.base().as_ref() != b.base().as_ref() {
        return Err(Error::BaseMismatch("comparison across spaces".into()));
    }
    if a.stalk_cohomology() != b.stalk_cohomology() {
        return Ok(false);
    }
    if a.is_acyclic() {
        return Ok(true);
    }
    let b = if Arc::ptr_eq(a.base(), b.base()) { b.clone() } else { Arc::new(b.rebase(a.base().clone())?) };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tries = match a.field() {
        Field::Rationals => 8,
        Field::Prime(p) if p < 8 => 1024,
        Field::Prime(p) if p < 64 => 128,
        Field::Prime(_) => 16,
    };
    for _ in 0..tries {
        match random_map(a, &b, &mut rng)? {
            None => return Ok(false),
            Some(f) => {
                if f.is_quasi_iso() {
                    return Ok(true);
                }
            }
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SimplicialComplex;

    fn q() -> Field {
        Field::Rationals
    }

    #[test]
    fn bar_resolution_is_resolution() {
        let s = SimplicialComplex::circle(3).unwrap().face_poset();
        let k = Arc::new(Sheaf::constant(s, q()));
        let r = Resolution::bar(&k);
        IndicatorComplex::new(
            r.complex.base.clone(),
            q(),
            Kind::Projective,
            r.complex.gens.clone(),
            r.complex.d.clone(),
        )
        .unwrap();
        let eps = r.augmentation();
        eps.validate().unwrap();
        assert!(eps.is_quasi_iso());
    }

    #[test]
    fn minimal_resolution_of_closed_point() {
        let s = SimplicialComplex::interval().face_poset();
        let v = s.index_of("0").unwrap();
        let sky = Arc::new(Sheaf::closed_indicator(s.clone(), q(), v));
        let r = Resolution::minimal(&sky);
        assert_eq!(r.complex.len(), 2);
        let eps = r.augmentation();
        eps.validate().unwrap();
        assert!(eps.is_quasi_iso());
    }

    #[test]
    fn resolution_hom_matches_cobar() {
        let s = SimplicialComplex::circle(3).unwrap().face_poset();
        let k = Arc::new(Sheaf::constant(s.clone(), q()));
        let v = s.index_of("1").unwrap();
        let sky = Sheaf::closed_indicator(s.clone(), q(), v);
        assert_eq!(
            rhom(&k, &sky).unwrap().cohomology(),
            Sheaf::derived_hom(&k, &sky).unwrap().cohomology()
        );
        assert_eq!(rhom(&k, &k).unwrap().cohomology(), Graded::from_pairs(&[(0, 1), (1, 1)]));
    }

    #[test]
    fn injective_hom_is_dual_stalk() {
        let s = SimplicialComplex::interval().face_poset();
        let k = Arc::new(Sheaf::constant(s.clone(), q()));
        let e = s.index_of("0-1").unwrap();
        let i = IndicatorComplex::single(s.clone(), q(), Kind::Injective, e, 0);
        let (h, idx) = i.hom_from(&k).unwrap();
        assert_eq!(h.cohomology(), Graded::from_pairs(&[(0, 1)]));
        let z = h.d(0).kernel_basis();
        let m = i.map_from_cocycle_into(&k, &idx, &z[0], 0).unwrap();
        assert!(m.comp(e).is_quasi_iso());
    }

    #[test]
    fn quasi_iso_detects_shift() {
        let s = SimplicialComplex::interval().face_poset();
        let k = Arc::new(Sheaf::constant(s.clone(), q()));
        let r = Arc::new(Resolution::minimal(&k).complex.to_sheaf());
        assert!(quasi_isomorphic(&k, &r, 1).unwrap());
        let k1 = Arc::new(k.shift(1));
        assert!(!quasi_isomorphic(&k, &k1, 1).unwrap());
    }
}
