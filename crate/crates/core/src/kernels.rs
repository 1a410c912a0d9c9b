//! Exterior products, kernels and convolution, the hom-kernel, left Kan
//! extension along refinements, the identity kernel, duality data and
//! reconstruction of kernels from their action on indicators.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::complex::{ChainMap, Complex, Graded};
use crate::diagram::Diagram;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::functors::{self, pullback, pullback_map, push_shriek_proj, push_shriek_proj_map, rewrap, tensor_map};
use crate::geometry::{FacePoset, MapKind, PosetMap, SimplicialComplex, Staircase};
use crate::matrix::Matrix;
use crate::resolution::{minimal_resolution, quasi_isomorphic, IndicatorComplex, Kind};
use crate::sheaf::{Sheaf, SheafMap};

/// A sheaf on `S × T` acting from sheaves on `S` to sheaves on `T`.
#[derive(Clone, Debug)]
pub struct Kernel {
    sheaf: Arc<Sheaf>,
    source: Arc<FacePoset>,
    target: Arc<FacePoset>,
}

impl Kernel {
    pub fn new(sheaf: Arc<Sheaf>, source: Arc<FacePoset>, target: Arc<FacePoset>) -> Result<Kernel> {
        let prod = FacePoset::product(&[source.clone(), target.clone()]);
        if prod.as_ref() != sheaf.base().as_ref() {
            return Err(Error::BaseMismatch("kernel must live on source × target".into()));
        }
        Ok(Kernel { sheaf, source, target })
    }

    pub fn zero(source: Arc<FacePoset>, target: Arc<FacePoset>, field: Field) -> Kernel {
        let prod = FacePoset::product(&[source.clone(), target.clone()]);
        Kernel { sheaf: Arc::new(Sheaf::zero(prod, field)), source, target }
    }

    pub fn sheaf(&self) -> &Arc<Sheaf> {
        &self.sheaf
    }
    pub fn source(&self) -> &Arc<FacePoset> {
        &self.source
    }
    pub fn target(&self) -> &Arc<FacePoset> {
        &self.target
    }
    pub fn field(&self) -> Field {
        self.sheaf.field()
    }

    fn arity(&self) -> (usize, usize) {
        (self.source.factor_list().len(), self.target.factor_list().len())
    }

    /// The kernel with its factors exchanged, acting from `T` to `S`.
    pub fn transpose(&self) -> Result<Kernel> {
        let (ns, nt) = self.arity();
        let swapped = FacePoset::product(&[self.target.clone(), self.source.clone()]);
        let idx: Vec<usize> = (nt..nt + ns).chain(0..nt).collect();
        let f = PosetMap::coordinate_map(&swapped, &self.sheaf.base().factor_list(), &idx, MapKind::General)?;
        Kernel::new(Arc::new(pullback(&f, &self.sheaf)?), self.target.clone(), self.source.clone())
    }
}

/// `(s, t)` for each element of `A × B`.
fn split(prod: &FacePoset, a: &Arc<FacePoset>, b: &Arc<FacePoset>) -> Vec<(usize, usize)> {
    let na = a.factor_list().len();
    (0..prod.len())
        .map(|x| {
            let c = prod.coords(x);
            (a.element(&c[..na]), b.element(&c[na..]))
        })
        .collect()
}

fn same_field(a: &Sheaf, b: &Sheaf) -> Result<()> {
    if a.field() != b.field() {
        return Err(Error::Precondition("sheaves over different fields".into()));
    }
    Ok(())
}

/// Exterior product `F ⊠ G` on `S × T`.
pub fn boxtimes(f: &Sheaf, g: &Sheaf) -> Result<Sheaf> {
    same_field(f, g)?;
    let base = FacePoset::product(&[f.base().clone(), g.base().clone()]);
    let pairs = split(&base, f.base(), g.base());
    let stalks: Vec<Arc<Complex>> =
        pairs.iter().map(|&(s, t)| Arc::new(Complex::tensor(f.stalk(s), g.stalk(t)))).collect();
    let st = stalks.clone();
    Ok(Sheaf::from_fn(base, f.field(), stalks, |x, y| {
        let ((s, t), (s2, t2)) = (pairs[x], pairs[y]);
        rewrap(&ChainMap::tensor(&f.map(s, s2), &g.map(t, t2)), &st[y], &st[x])
    }))
}

/// `φ ⊠ ψ`.
pub fn boxtimes_map(phi: &SheafMap, psi: &SheafMap) -> Result<SheafMap> {
    let a = Arc::new(boxtimes(phi.source(), psi.source())?);
    let b = Arc::new(boxtimes(phi.target(), psi.target())?);
    let pairs = split(a.base(), phi.source().base(), psi.source().base());
    let comps = pairs
        .iter()
        .enumerate()
        .map(|(x, &(s, t))| rewrap(&ChainMap::tensor(phi.comp(s), psi.comp(t)), a.stalk(x), b.stalk(x)))
        .collect();
    SheafMap::from_parts(a, b, comps)
}

fn check_source(k: &Kernel, f: &Sheaf) -> Result<()> {
    if k.source.as_ref() != f.base().as_ref() {
        return Err(Error::BaseMismatch("convolution with a kernel from another space".into()));
    }
    same_field(&k.sheaf, f)
}

/// `K ∘ F = π_{2!}(K ⊗ π_1^*F)`.
pub fn convolve(k: &Kernel, f: &Sheaf) -> Result<Sheaf> {
    check_source(k, f)?;
    let (ns, nt) = k.arity();
    let pi1 = PosetMap::projection(k.sheaf.base(), &(0..ns).collect::<Vec<_>>())?;
    let prod = Sheaf::tensor(&k.sheaf, &pullback(&pi1, f)?)?;
    push_shriek_proj(&prod, &(ns..ns + nt).collect::<Vec<_>>())
}

/// `K ∘ φ`.
pub fn convolve_map(k: &Kernel, phi: &SheafMap) -> Result<SheafMap> {
    check_source(k, phi.source())?;
    let (ns, nt) = k.arity();
    let pi1 = PosetMap::projection(k.sheaf.base(), &(0..ns).collect::<Vec<_>>())?;
    let m = tensor_map(&SheafMap::identity(&k.sheaf), &pullback_map(&pi1, phi)?)?;
    push_shriek_proj_map(&m, &(ns..ns + nt).collect::<Vec<_>>())
}

/// `L ∘ K = π_{13!}(π_{12}^*K ⊗ π_{23}^*L)` for `K: S → T`, `L: T → U`.
pub fn compose(k: &Kernel, l: &Kernel) -> Result<Kernel> {
    if k.target.as_ref() != l.source.as_ref() {
        return Err(Error::BaseMismatch("kernels are not composable".into()));
    }
    let (ns, nt) = k.arity();
    let nu = l.target.factor_list().len();
    let triple = FacePoset::product(&[k.source.clone(), k.target.clone(), l.target.clone()]);
    let p12 = PosetMap::projection(&triple, &(0..ns + nt).collect::<Vec<_>>())?;
    let p23 = PosetMap::projection(&triple, &(ns..ns + nt + nu).collect::<Vec<_>>())?;
    let prod = Sheaf::tensor(&pullback(&p12, &k.sheaf)?, &pullback(&p23, &l.sheaf)?)?;
    let keep: Vec<usize> = (0..ns).chain(ns + nt..ns + nt + nu).collect();
    let out = push_shriek_proj(&prod, &keep)?;
    Kernel::new(Arc::new(out), k.source.clone(), l.target.clone())
}

/// Right adjoint of `F ↦ G ∘ F` for `G: X₂ → X₃`, evaluated at `H: X₁ → X₃`:
/// `π_{12*} sHom(π_{23}^*G, π_{13}^!H)` with `π_{13}^! = π_{13}^* ⊗ ω_{X₂}`.
/// Refuses when the triple product exceeds `budget` cells.
pub fn hom_kernel(g: &Kernel, h: &Kernel, budget: usize) -> Result<Kernel> {
    if g.target.as_ref() != h.target.as_ref() {
        return Err(Error::BaseMismatch("hom-kernel needs a common last factor".into()));
    }
    let (x1, x2, x3) = (h.source.clone(), g.source.clone(), g.target.clone());
    let needed = x1.len() * x2.len() * x3.len();
    if needed > budget {
        return Err(Error::Budget { needed, budget });
    }
    let (n1, n2) = (x1.factor_list().len(), x2.factor_list().len());
    let n3 = x3.factor_list().len();
    let triple = FacePoset::product(&[x1.clone(), x2.clone(), x3.clone()]);
    let r = |a: usize, b: usize| (a..b).collect::<Vec<_>>();
    let p23 = PosetMap::projection(&triple, &r(n1, n1 + n2 + n3))?;
    let p13 = PosetMap::projection(&triple, &r(0, n1).into_iter().chain(r(n1 + n2, n1 + n2 + n3)).collect::<Vec<_>>())?;
    let p2 = PosetMap::projection(&triple, &r(n1, n1 + n2))?;
    let p12 = PosetMap::projection(&triple, &r(0, n1 + n2))?;
    let omega = functors::dualizing(&x2, g.field());
    let h_shriek = Sheaf::tensor(&pullback(&p13, &h.sheaf)?, &pullback(&p2, &omega)?)?;
    let shom = Sheaf::sheaf_hom(&pullback(&p23, &g.sheaf)?, &h_shriek)?;
    let out = functors::push_star(&p12, &shom)?;
    Kernel::new(Arc::new(out), x1, x2)
}

/// Left Kan extension along a refinement as a complex of indicators:
/// resolve, then relabel `1_r ↦ 1_{q(r)}`.
pub fn left_kan_complex(q: &PosetMap, f: &Arc<Sheaf>) -> Result<IndicatorComplex> {
    q.require(MapKind::Refinement)?;
    if q.source().as_ref() != f.base().as_ref() {
        return Err(Error::BaseMismatch("localization of a sheaf on another space".into()));
    }
    let r = minimal_resolution(f);
    Ok(r.complex.relabel(q)?.minimize().0)
}

/// `ι^*` along a refinement `q: R → S`.
pub fn left_kan(q: &PosetMap, f: &Arc<Sheaf>) -> Result<Sheaf> {
    Ok(left_kan_complex(q, f)?.to_sheaf())
}

/// The identity kernel with the resolution it was built from.
#[derive(Clone, Debug)]
pub struct DualityData {
    pub base: Arc<FacePoset>,
    pub staircase: Staircase,
    /// `η = ι^*(1_Δ)` as a complex of indicators on `S × S`.
    pub eta_complex: IndicatorComplex,
    pub eta: Kernel,
}

impl DualityData {
    pub fn new(k: &SimplicialComplex, field: Field) -> Result<DualityData> {
        let st = Staircase::new(k)?;
        let unit = Arc::new(Complex::unit(field));
        let one_delta = Arc::new(Sheaf::constant_on(st.poset.clone(), unit, &st.diagonal_elements())?);
        let eta_complex = left_kan_complex(&st.q, &one_delta)?;
        let sheaf = Arc::new(eta_complex.to_sheaf().rebase(st.product.clone())?);
        let eta = Kernel::new(sheaf, st.base.clone(), st.base.clone())?;
        Ok(DualityData { base: st.base.clone(), staircase: st, eta_complex, eta })
    }

    fn diagonal(&self) -> Result<PosetMap> {
        let s = &self.base;
        PosetMap::coordinate_map(s, &[s.clone(), s.clone()], &[0, 0], MapKind::Diagonal)
    }

    /// `ε(K) = p_!Δ^*K`.
    pub fn counit(&self, k: &Sheaf) -> Result<Complex> {
        Ok(functors::gamma_c(&pullback(&self.diagonal()?, k)?))
    }

    fn triple_diagonal(&self, pos: [usize; 3]) -> Result<PosetMap> {
        let s = &self.base;
        let pair = FacePoset::product(&[s.clone(), s.clone()]);
        PosetMap::coordinate_map(&pair, &[s.clone(), s.clone(), s.clone()], &pos, MapKind::Diagonal)
    }

    /// First triangle composite `F ↦ (id ⊗ ε)(η ⊠ F)`.
    pub fn triangle_left(&self, f: &Sheaf) -> Result<Sheaf> {
        let big = boxtimes(&self.eta.sheaf, f)?;
        push_shriek_proj(&pullback(&self.triple_diagonal([0, 1, 1])?, &big)?, &[0])
    }

    pub fn triangle_left_map(&self, phi: &SheafMap) -> Result<SheafMap> {
        let big = boxtimes_map(&SheafMap::identity(&self.eta.sheaf), phi)?;
        push_shriek_proj_map(&pullback_map(&self.triple_diagonal([0, 1, 1])?, &big)?, &[0])
    }

    /// Second triangle composite `G ↦ (ε ⊗ id)(G ⊠ η)`.
    pub fn triangle_right(&self, g: &Sheaf) -> Result<Sheaf> {
        let big = boxtimes(g, &self.eta.sheaf)?;
        push_shriek_proj(&pullback(&self.triple_diagonal([0, 0, 1])?, &big)?, &[1])
    }

    pub fn triangle_right_map(&self, phi: &SheafMap) -> Result<SheafMap> {
        let big = boxtimes_map(phi, &SheafMap::identity(&self.eta.sheaf))?;
        push_shriek_proj_map(&pullback_map(&self.triple_diagonal([0, 0, 1])?, &big)?, &[1])
    }
}

/// The identity kernel `ι^*(1_Δ)` of a complex.
pub fn identity_kernel(k: &SimplicialComplex, field: Field) -> Result<Kernel> {
    Ok(DualityData::new(k, field)?.eta)
}

/// The canonical map `1_s → 1_t` for `s ≤ t`.
pub fn indicator_map(base: &Arc<FacePoset>, field: Field, s: usize, t: usize) -> Result<SheafMap> {
    if !base.le(s, t) {
        return Err(Error::Precondition(format!("no map 1_{} → 1_{}", base.name(s), base.name(t))));
    }
    let a = Arc::new(Sheaf::indicator(base.clone(), field, s));
    let b = Arc::new(Sheaf::indicator(base.clone(), field, t));
    let comps = (0..base.len())
        .map(|u| {
            if base.le(u, s) {
                ChainMap::from_parts(a.stalk(u).clone(), b.stalk(u).clone(), BTreeMap::from([(0, Matrix::identity(field, 1))]))
            } else {
                ChainMap::zero(a.stalk(u).clone(), b.stalk(u).clone())
            }
        })
        .collect();
    SheafMap::new(a, b, comps)
}

/// Values of a functor on the indicators of `S` and on the canonical maps
/// between them along covering relations.
#[derive(Clone, Debug)]
pub struct FunctorTable {
    source: Arc<FacePoset>,
    target: Arc<FacePoset>,
    values: Vec<Arc<Sheaf>>,
    covers: HashMap<(usize, usize), SheafMap>,
}

impl FunctorTable {
    /// Validated table: each cover map goes between the listed values and
    /// composites along saturated chains agree.
    pub fn new(
        source: Arc<FacePoset>,
        target: Arc<FacePoset>,
        values: Vec<Arc<Sheaf>>,
        covers: HashMap<(usize, usize), SheafMap>,
    ) -> Result<FunctorTable> {
        if values.len() != source.len() {
            return Err(Error::Shape(format!("{} values for {} indicators", values.len(), source.len())));
        }
        if let Some(v) = values.iter().find(|v| v.base().as_ref() != target.as_ref()) {
            return Err(Error::BaseMismatch(format!("table value {v:?} is not on the target")));
        }
        let table = FunctorTable { source, target, values, covers };
        let (p, values, covers) = (table.source.poset(), &table.values, &table.covers);
        for s in 0..table.source.len() {
            for &t in p.upper_covers(s) {
                let m = covers
                    .get(&(s, t))
                    .ok_or_else(|| Error::Precondition(format!("missing map for {} ≤ {}", p.name(s), p.name(t))))?;
                if m.source().as_ref() != values[s].as_ref() || m.target().as_ref() != values[t].as_ref() {
                    return Err(Error::Precondition(format!("map for {} ≤ {} has wrong ends", p.name(s), p.name(t))));
                }
                m.validate()?;
            }
        }
        for s in 0..table.source.len() {
            for &u in p.above(s) {
                let first = table.map(s, u)?;
                for &t in p.upper_covers(s).iter().filter(|&&t| p.le(t, u)) {
                    let other = table.map(t, u)?.after(&table.covers[&(s, t)])?;
                    if first.comps() != other.comps() {
                        return Err(Error::NotFunctorial(format!(
                            "{} < {} < {}",
                            p.name(s),
                            p.name(t),
                            p.name(u)
                        )));
                    }
                }
            }
        }
        Ok(table)
    }

    /// Tabulates a functor given on objects and maps.
    pub fn tabulate(
        source: &Arc<FacePoset>,
        target: &Arc<FacePoset>,
        field: Field,
        on_objects: impl Fn(&Sheaf) -> Result<Sheaf>,
        on_maps: impl Fn(&SheafMap) -> Result<SheafMap>,
    ) -> Result<FunctorTable> {
        let p = source.poset();
        let mut covers = HashMap::new();
        let values: Vec<Arc<Sheaf>> = (0..source.len())
            .map(|s| Ok(Arc::new(on_objects(&Sheaf::indicator(source.clone(), field, s))?.rebase(target.clone())?)))
            .collect::<Result<_>>()?;
        for s in 0..source.len() {
            for &t in p.upper_covers(s) {
                let m = on_maps(&indicator_map(source, field, s, t)?)?;
                let comps = (0..target.len()).map(|x| rewrap(m.comp(x), values[s].stalk(x), values[t].stalk(x))).collect();
                covers.insert((s, t), SheafMap::from_parts(values[s].clone(), values[t].clone(), comps)?);
            }
        }
        FunctorTable::new(source.clone(), target.clone(), values, covers)
    }

    /// Table of `F ↦ K ∘ F`.
    pub fn of_kernel(k: &Kernel) -> Result<FunctorTable> {
        FunctorTable::tabulate(k.source(), k.target(), k.field(), |f| convolve(k, f), |m| convolve_map(k, m))
    }

    pub fn source(&self) -> &Arc<FacePoset> {
        &self.source
    }
    pub fn target(&self) -> &Arc<FacePoset> {
        &self.target
    }
    pub fn value(&self, s: usize) -> &Arc<Sheaf> {
        &self.values[s]
    }

    /// Image of `1_s → 1_u`, composed along a saturated chain.
    pub fn map(&self, s: usize, u: usize) -> Result<SheafMap> {
        let p = self.source.poset();
        if s == u {
            return Ok(SheafMap::identity(&self.values[s]));
        }
        let t = *p
            .upper_covers(s)
            .iter()
            .find(|&&t| p.le(t, u))
            .ok_or_else(|| Error::Precondition(format!("no map 1_{} → 1_{}", p.name(s), p.name(u))))?;
        self.map(t, u)?.after(&self.covers[&(s, t)])
    }

    /// Graded stalk cohomology of every value, in cell order.
    pub fn dims(&self) -> Vec<Vec<Graded>> {
        self.values.iter().map(|v| v.stalk_cohomology()).collect()
    }
}

/// Kernel of the functor tabulated in `table`: the twisted complex
/// `⊕_g 1_{a_g} ⊠ Φ(1_{b_g})[-deg g]` over a resolution of the identity
/// kernel with generators labelled `(a_g, b_g)`.
pub fn reconstruct_kernel(table: &FunctorTable, identity: &IndicatorComplex) -> Result<Kernel> {
    let s = table.source.clone();
    let t = table.target.clone();
    let ss = FacePoset::product(&[s.clone(), s.clone()]);
    if identity.base().as_ref() != ss.as_ref() || identity.kind() != Kind::Projective {
        return Err(Error::BaseMismatch("identity resolution must be projective on S × S".into()));
    }
    let field = identity.field();
    let labels = split(&ss, &s, &s);
    let gens: Vec<(usize, usize, i32)> =
        identity.gens().iter().map(|g| (labels[g.label].0, labels[g.label].1, g.degree)).collect();
    let d = identity.d();
    let mut phi: HashMap<(usize, usize), SheafMap> = HashMap::new();
    for (h, g, _) in d.entries() {
        let key = (gens[g].1, gens[h].1);
        if let std::collections::hash_map::Entry::Vacant(e) = phi.entry(key) {
            e.insert(table.map(key.0, key.1)?);
        }
    }
    let kt = FacePoset::product(&[s.clone(), t.clone()]);
    let cells = split(&kt, &s, &t);
    let vis: Vec<Vec<usize>> =
        (0..s.len()).map(|u| (0..gens.len()).filter(|&g| s.le(u, gens[g].0)).collect()).collect();
    let width = |x: usize, n: i32, g: usize| table.values[gens[g].1].stalk(cells[x].1).dim(n - gens[g].2);
    let layouts: Vec<BTreeMap<i32, Vec<(usize, usize)>>> = (0..kt.len())
        .map(|x| {
            let (u, tt) = cells[x];
            let live: Vec<usize> = vis[u].iter().copied().filter(|&g| !table.values[gens[g].1].stalk(tt).is_zero()).collect();
            let mut out = BTreeMap::new();
            if live.is_empty() {
                return out;
            }
            let lo = live.iter().map(|&g| table.values[gens[g].1].stalk(tt).lo() + gens[g].2).min().unwrap();
            let hi = live.iter().map(|&g| table.values[gens[g].1].stalk(tt).hi() + gens[g].2).max().unwrap();
            for n in lo..=hi {
                let mut acc = 0;
                let mut v = Vec::new();
                for &g in &live {
                    let w = width(x, n, g);
                    if w > 0 {
                        v.push((g, acc));
                        acc += w;
                    }
                }
                if !v.is_empty() {
                    out.insert(n, v);
                }
            }
            out
        })
        .collect();
    let total = |x: usize, n: i32| -> usize {
        layouts[x].get(&n).map_or(0, |v| v.last().map_or(0, |&(g, o)| o + width(x, n, g)))
    };
    let stalks: Vec<Arc<Complex>> = (0..kt.len())
        .map(|x| {
            let lay = &layouts[x];
            if lay.is_empty() {
                return Arc::new(Complex::zero(field));
            }
            let (lo, hi) = (*lay.keys().next().unwrap(), *lay.keys().last().unwrap());
            let tt = cells[x].1;
            let c = Complex::build(field, lo, hi, |n| total(x, n), |n| {
                let empty = Vec::new();
                let src = lay.get(&n).unwrap_or(&empty);
                let dst = lay.get(&(n + 1)).unwrap_or(&empty);
                let pos: HashMap<usize, usize> = dst.iter().map(|&(g, o)| (g, o)).collect();
                let mut trip = Vec::new();
                for &(g, o) in src {
                    let m = n - gens[g].2;
                    if let Some(&o2) = pos.get(&g) {
                        let sg = field.sign(gens[g].2 as i64);
                        for (r, c, v) in table.values[gens[g].1].stalk(tt).d(m).entries() {
                            trip.push((o2 + r, o + c, field.mul(&sg, v)));
                        }
                    }
                    for (h, coef) in d.col(g) {
                        if let Some(&o2) = pos.get(h) {
                            let block = phi[&(gens[g].1, gens[*h].1)].comp(tt).comp(m);
                            for (r, c, v) in block.entries() {
                                trip.push((o2 + r, o + c, field.mul(coef, v)));
                            }
                        }
                    }
                }
                Matrix::from_triplets(field, total(x, n + 1), total(x, n), trip)
            });
            Arc::new(c)
        })
        .collect();
    let st = stalks.clone();
    let sheaf = Sheaf::from_fn(kt.clone(), field, stalks, |x, y| {
        let (tx, ty) = (cells[x].1, cells[y].1);
        ChainMap::build(st[y].clone(), st[x].clone(), |n| {
            let empty = Vec::new();
            let src = layouts[y].get(&n).unwrap_or(&empty);
            let dst: HashMap<usize, usize> = layouts[x].get(&n).unwrap_or(&empty).iter().copied().collect();
            let mut trip = Vec::new();
            for &(g, o) in src {
                if let Some(&o2) = dst.get(&g) {
                    let block = table.values[gens[g].1].restriction_matrix(tx, ty, n - gens[g].2);
                    for (r, c, v) in block.entries() {
                        trip.push((o2 + r, o + c, v.clone()));
                    }
                }
            }
            Matrix::from_triplets(field, total(x, n), total(y, n), trip)
        })
    });
    Kernel::new(Arc::new(sheaf), s, t)
}

/// Per-generator outcome of a functor comparison.
#[derive(Clone, Debug)]
pub struct GeneratorCheck {
    pub generator: String,
    pub expected: Vec<Graded>,
    pub got: Vec<Graded>,
    pub quasi_iso: bool,
}

/// Outcome of one triangle identity.
#[derive(Clone, Debug)]
pub struct TriangleReport {
    pub name: String,
    pub generators: Vec<GeneratorCheck>,
    /// The reconstructed composite kernel is quasi-isomorphic to `η`.
    pub kernel_quasi_iso: bool,
}

impl TriangleReport {
    pub fn passed(&self) -> bool {
        self.kernel_quasi_iso && self.generators.iter().all(|g| g.quasi_iso)
    }
}

/// Compares a tabulated functor with the identity, generator by generator
/// and through its reconstructed kernel.
pub fn compare_with_identity(name: &str, table: &FunctorTable, data: &DualityData, seed: u64) -> Result<TriangleReport> {
    let s = &data.base;
    let field = data.eta.field();
    let mut generators = Vec::new();
    for x in 0..s.len() {
        let ind = Arc::new(Sheaf::indicator(s.clone(), field, x));
        let got = table.value(x);
        generators.push(GeneratorCheck {
            generator: s.name(x).to_string(),
            expected: ind.stalk_cohomology(),
            got: got.stalk_cohomology(),
            quasi_iso: quasi_isomorphic(&ind, got, seed)?,
        });
    }
    let k = reconstruct_kernel(table, &data.eta_complex)?;
    let kernel_quasi_iso = quasi_isomorphic(data.eta.sheaf(), k.sheaf(), seed)?;
    Ok(TriangleReport { name: name.to_string(), generators, kernel_quasi_iso })
}

/// Both triangle identities for the duality data of `data.base`.
pub fn check_triangles(data: &DualityData, seed: u64) -> Result<Vec<TriangleReport>> {
    let s = &data.base;
    let field = data.eta.field();
    let left = FunctorTable::tabulate(s, s, field, |f| data.triangle_left(f), |m| data.triangle_left_map(m))?;
    let right = FunctorTable::tabulate(s, s, field, |f| data.triangle_right(f), |m| data.triangle_right_map(m))?;
    Ok(vec![
        compare_with_identity("(id⊗ε)∘(η⊗id)", &left, data, seed)?,
        compare_with_identity("(ε⊗id)∘(id⊗η)", &right, data, seed)?,
    ])
}

/// The three composites `ι^*(K ∘ ι^*F)`, `ι^*K ∘ F` and `ι^*K ∘ ι^*F` for a
/// kernel `K` on `R × R` and `F` on `R`, all returned on `S`.
pub fn localized_composites(q: &PosetMap, k: &Kernel, f: &Arc<Sheaf>) -> Result<[Sheaf; 3]> {
    let qq = PosetMap::product(q, q, MapKind::Refinement)?;
    let coarse_k = Arc::new(left_kan(&qq, k.sheaf())?.rebase(FacePoset::product(&[q.target().clone(), q.target().clone()]))?);
    let coarse_kernel = Kernel::new(coarse_k.clone(), q.target().clone(), q.target().clone())?;
    let fine_of_coarse = Kernel::new(Arc::new(pullback(&qq, &coarse_k)?), q.source().clone(), q.source().clone())?;
    let lf = Arc::new(left_kan(q, f)?);
    let first = left_kan(q, &Arc::new(convolve(k, &pullback(q, &lf)?)?))?;
    let second = left_kan(q, &Arc::new(convolve(&fine_of_coarse, f)?))?;
    let third = convolve(&coarse_kernel, &lf)?;
    Ok([first, second, third])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::Rationals
    }

    #[test]
    fn boxtimes_of_indicators() {
        let s = SimplicialComplex::interval().face_poset();
        let t = SimplicialComplex::circle(3).unwrap().face_poset();
        let st = FacePoset::product(&[s.clone(), t.clone()]);
        for a in 0..s.len() {
            for b in 0..t.len() {
                let x = boxtimes(&Sheaf::indicator(s.clone(), q(), a), &Sheaf::indicator(t.clone(), q(), b)).unwrap();
                assert_eq!(x, Sheaf::indicator(st.clone(), q(), st.element(&[a, b])));
            }
        }
    }

    #[test]
    fn identity_kernel_acts_as_identity() {
        for k in [SimplicialComplex::interval(), SimplicialComplex::circle(3).unwrap()] {
            let data = DualityData::new(&k, q()).unwrap();
            let s = data.base.clone();
            for x in 0..s.len() {
                let f = Arc::new(Sheaf::indicator(s.clone(), q(), x));
                let g = Arc::new(convolve(&data.eta, &f).unwrap());
                assert!(quasi_isomorphic(&f, &g, 3).unwrap(), "{x} {:?}", g);
                let g2 = Arc::new(convolve(&data.eta.transpose().unwrap(), &f).unwrap());
                assert!(quasi_isomorphic(&f, &g2, 3).unwrap(), "transposed {x} {:?}", g2);
            }
        }
    }

    #[test]
    fn reconstruct_identity() {
        let data = DualityData::new(&SimplicialComplex::interval(), q()).unwrap();
        let table = FunctorTable::of_kernel(&data.eta).unwrap();
        let k = reconstruct_kernel(&table, &data.eta_complex).unwrap();
        k.sheaf().validate().unwrap();
        assert!(quasi_isomorphic(data.eta.sheaf(), k.sheaf(), 1).unwrap());
    }

    #[test]
    fn triangles_hold() {
        for k in [SimplicialComplex::interval(), SimplicialComplex::circle(3).unwrap()] {
            let data = DualityData::new(&k, q()).unwrap();
            for r in check_triangles(&data, 5).unwrap() {
                assert!(r.passed(), "{r:?}");
            }
        }
    }

    #[test]
    fn random_round_trip() {
        use rand::SeedableRng;
        let data = DualityData::new(&SimplicialComplex::interval(), q()).unwrap();
        let s = data.base.clone();
        let ss = FacePoset::product(&[s.clone(), s.clone()]);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..3 {
            let f = Arc::new(crate::random::random_sheaf(&ss, q(), 3, &mut rng));
            let k = Kernel::new(f, s.clone(), s.clone()).unwrap();
            let table = FunctorTable::of_kernel(&k).unwrap();
            let r = reconstruct_kernel(&table, &data.eta_complex).unwrap();
            r.sheaf().validate().unwrap();
            assert!(quasi_isomorphic(k.sheaf(), r.sheaf(), 2).unwrap());
        }
    }

    #[test]
    fn localized_composites_agree() {
        use rand::SeedableRng;
        let (fine, owner) = SimplicialComplex::interval().subdivide_edges(2).unwrap();
        let r = fine.face_poset();
        let s = SimplicialComplex::interval().face_poset();
        let qm = PosetMap::new(r.clone(), s.clone(), owner, MapKind::Refinement).unwrap();
        let rr = FacePoset::product(&[r.clone(), r.clone()]);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let k = Kernel::new(Arc::new(crate::random::random_sheaf(&rr, q(), 2, &mut rng)), r.clone(), r.clone()).unwrap();
        for x in 0..r.len() {
            let f = Arc::new(Sheaf::indicator(r.clone(), q(), x));
            let [a, b, c] = localized_composites(&qm, &k, &f).unwrap();
            let base = a.base().clone();
            let (a, b, c) = (Arc::new(a), Arc::new(b.rebase(base.clone()).unwrap()), Arc::new(c.rebase(base).unwrap()));
            assert!(quasi_isomorphic(&a, &b, 1).unwrap());
            assert!(quasi_isomorphic(&a, &c, 1).unwrap());
        }
    }

    #[test]
    fn hom_kernel_adjunction() {
        use rand::SeedableRng;
        let pt = SimplicialComplex::point().face_poset();
        let s = SimplicialComplex::interval().face_poset();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let p2 = FacePoset::product(&[pt.clone(), s.clone()]);
        let ss = FacePoset::product(&[s.clone(), s.clone()]);
        for _ in 0..3 {
            let f = Kernel::new(Arc::new(crate::random::random_sheaf(&p2, q(), 2, &mut rng)), pt.clone(), s.clone()).unwrap();
            let g = Kernel::new(Arc::new(crate::random::random_sheaf(&ss, q(), 2, &mut rng)), s.clone(), s.clone()).unwrap();
            let h = Kernel::new(Arc::new(crate::random::random_sheaf(&p2, q(), 2, &mut rng)), pt.clone(), s.clone()).unwrap();
            let gf = compose(&f, &g).unwrap();
            let lhs = crate::resolution::rhom(&Arc::new(gf.sheaf().rebase(h.sheaf().base().clone()).unwrap()), h.sheaf()).unwrap();
            let adj = hom_kernel(&g, &h, 1000).unwrap();
            let rhs = crate::resolution::rhom(f.sheaf(), &adj.sheaf().rebase(f.sheaf().base().clone()).unwrap()).unwrap();
            assert_eq!(lhs.cohomology(), rhs.cohomology());
        }
    }
}
