//! Pullback and pushforward along poset maps, recollement functors,
//! compactly supported sections, the dualizing complex and the three dualities.

use std::collections::HashMap;
use std::sync::Arc;

use crate::complex::{ChainMap, Complex};
use crate::diagram::{self, Diagram};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::geometry::{FacePoset, MapKind, PosetMap};
use crate::matrix::Matrix;
use crate::resolution::{Generator, IndicatorComplex, Kind};
use crate::sheaf::{Sheaf, SheafMap};

fn same_base(a: &FacePoset, b: &FacePoset, what: &str) -> Result<()> {
    if a != b {
        return Err(Error::BaseMismatch(what.into()));
    }
    Ok(())
}

/// `f^*G`: `(f^*G)(s) = G(f(s))`.
pub fn pullback(f: &PosetMap, g: &Sheaf) -> Result<Sheaf> {
    same_base(f.target(), g.base(), "pullback of a sheaf on another space")?;
    let src = f.source().clone();
    let stalks = (0..src.len()).map(|s| g.stalk(f.apply(s)).clone()).collect();
    Ok(Sheaf::from_fn(src, g.field(), stalks, |s, t| g.map(f.apply(s), f.apply(t))))
}

/// `f_*F`: `(f_*F)(t) = Γ(f^{-1}(str t); F)`.
pub fn push_star(f: &PosetMap, sheaf: &Sheaf) -> Result<Sheaf> {
    same_base(f.source(), sheaf.base(), "pushforward of a sheaf on another space")?;
    let tgt = f.target().clone();
    let src = f.source();
    let local: Vec<(Arc<Complex>, diagram::TotalIndex)> = (0..tgt.len())
        .map(|t| {
            let u = f.preimage(&tgt.star(t));
            let (c, idx) = diagram::holim(sheaf, &src.poset().mask(&u));
            (Arc::new(c), idx)
        })
        .collect();
    let stalks = local.iter().map(|(c, _)| c.clone()).collect();
    Ok(Sheaf::from_fn(tgt, sheaf.field(), stalks, |s, t| {
        diagram::total_projection((&local[t].0, &local[t].1), (&local[s].0, &local[s].1))
    }))
}

/// Extension by zero along an inclusion (open `j_!` or closed `i_*`).
pub fn extend_by_zero(j: &PosetMap, sheaf: &Sheaf) -> Result<Sheaf> {
    if j.kind() != MapKind::OpenInclusion && j.kind() != MapKind::ClosedInclusion {
        return Err(Error::KindMismatch { expected: "open-inclusion or closed-inclusion".into(), got: j.kind().to_string() });
    }
    same_base(j.source(), sheaf.base(), "extension of a sheaf on another space")?;
    let tgt = j.target().clone();
    let field = sheaf.field();
    let mut pre: Vec<Option<usize>> = vec![None; tgt.len()];
    for s in 0..j.source().len() {
        pre[j.apply(s)] = Some(s);
    }
    let zero = Arc::new(Complex::zero(field));
    let stalks = pre.iter().map(|p| p.map_or(zero.clone(), |s| sheaf.stalk(s).clone())).collect();
    Ok(Sheaf::from_fn(tgt, field, stalks, |a, b| sheaf.map(pre[a].unwrap(), pre[b].unwrap())))
}

/// `j_!` for an open subset given by its cells.
pub fn extend_by_zero_from(base: &Arc<FacePoset>, set: &[usize], sheaf: &Sheaf) -> Result<Sheaf> {
    let j = PosetMap::new(sheaf.base().clone(), base.clone(), set.to_vec(), MapKind::OpenInclusion)?;
    extend_by_zero(&j, sheaf)
}

/// `i^!F` for a closed inclusion: at `r`, `fib(F(r) → Γ(str(r) ∩ U; F))`
/// with `U` the open complement.
pub fn shriek_restrict_closed(i: &PosetMap, sheaf: &Sheaf) -> Result<Sheaf> {
    i.require(MapKind::ClosedInclusion)?;
    same_base(i.target(), sheaf.base(), "restriction of a sheaf on another space")?;
    let big = i.target();
    let p = big.poset();
    let mut in_z = vec![false; big.len()];
    for r in 0..i.source().len() {
        in_z[i.apply(r)] = true;
    }
    let mut maps: Vec<ChainMap> = Vec::new();
    let mut locals = Vec::new();
    for r in 0..i.source().len() {
        let x = i.apply(r);
        let mask: Vec<bool> = (0..big.len()).map(|t| p.le(t, x) && !in_z[t]).collect();
        let (c, idx) = diagram::holim(sheaf, &mask);
        let c = Arc::new(c);
        maps.push(diagram::map_to_holim(sheaf, x, (&c, &idx)));
        locals.push((c, idx));
    }
    let stalks: Vec<Arc<Complex>> = maps.iter().map(|m| Arc::new(Complex::fiber(m))).collect();
    Ok(Sheaf::from_fn(i.source().clone(), sheaf.field(), stalks, |a, b| {
        let (x, y) = (i.apply(a), i.apply(b));
        let proj = diagram::total_projection((&locals[b].0, &locals[b].1), (&locals[a].0, &locals[a].1));
        ChainMap::cone_of_square(&maps[b], &maps[a], &sheaf.map(x, y), &proj).shift(-1)
    }))
}

/// `i^*` for any inclusion: restriction to the induced subposet.
pub fn restrict(i: &PosetMap, sheaf: &Sheaf) -> Result<Sheaf> {
    pullback(i, sheaf)
}

/// Degree bookkeeping for `⊕_σ V(σ)[-dim σ]`.
#[derive(Clone, Debug)]
pub struct CellIndex {
    lo: i32,
    offsets: Vec<HashMap<usize, usize>>,
    dims: Vec<usize>,
    cell_dims: HashMap<usize, i32>,
}

impl CellIndex {
    pub fn offset(&self, n: i32, s: usize) -> Option<usize> {
        let i = n - self.lo;
        if i < 0 || i as usize >= self.offsets.len() {
            return None;
        }
        self.offsets[i as usize].get(&s).copied()
    }

    pub fn total(&self, n: i32) -> usize {
        let i = n - self.lo;
        if i < 0 || i as usize >= self.dims.len() {
            0
        } else {
            self.dims[i as usize]
        }
    }

    /// Inner degree of cell `s` at total degree `n`.
    pub fn inner(&self, n: i32, s: usize) -> i32 {
        n - self.cell_dims[&s]
    }
}

/// Compactly supported cellular total complex over `cells` with values
/// `value(σ)`, internal sign `(-1)^{dim σ}` and coface maps `[τ:σ] ρ_{τ≤σ}`.
pub fn cellular_total(
    base: &FacePoset,
    field: Field,
    cells: &[usize],
    value: impl Fn(usize) -> Arc<Complex>,
    rho: impl Fn(usize, usize, i32) -> Matrix,
) -> (Complex, CellIndex) {
    let vals: HashMap<usize, Arc<Complex>> = cells.iter().map(|&s| (s, value(s))).collect();
    let live: Vec<usize> = cells.iter().copied().filter(|s| !vals[s].is_zero()).collect();
    let cell_dims: HashMap<usize, i32> = cells.iter().map(|&s| (s, base.dim(s) as i32)).collect();
    if live.is_empty() {
        let idx = CellIndex { lo: 0, offsets: Vec::new(), dims: Vec::new(), cell_dims };
        return (Complex::zero(field), idx);
    }
    let lo = live.iter().map(|s| vals[s].lo() + cell_dims[s]).min().unwrap();
    let hi = live.iter().map(|s| vals[s].hi() + cell_dims[s]).max().unwrap();
    let mut offsets = Vec::new();
    let mut dims = Vec::new();
    for n in lo..=hi {
        let mut acc = 0;
        let mut off = HashMap::new();
        for &s in &live {
            let d = vals[&s].dim(n - cell_dims[&s]);
            if d > 0 {
                off.insert(s, acc);
                acc += d;
            }
        }
        offsets.push(off);
        dims.push(acc);
    }
    let idx = CellIndex { lo, offsets, dims, cell_dims };
    let in_set: HashMap<usize, ()> = cells.iter().map(|&s| (s, ())).collect();
    let mut diffs = Vec::new();
    for n in lo..hi {
        let mut trip = Vec::new();
        for &s in &live {
            let m = n - idx.cell_dims[&s];
            if let (Some(so), Some(to)) = (idx.offset(n, s), idx.offset(n + 1, s)) {
                let sg = field.sign(idx.cell_dims[&s] as i64);
                for (r, c, v) in vals[&s].d(m).entries() {
                    trip.push((to + r, so + c, field.mul(&sg, v)));
                }
            }
        }
        for &t in &live {
            for &(s, inc) in base.faces(t) {
                if !in_set.contains_key(&s) {
                    continue;
                }
                if let (Some(so), Some(to)) = (idx.offset(n, s), idx.offset(n + 1, t)) {
                    let m = n - idx.cell_dims[&s];
                    let coef = field.from_i64(inc);
                    for (r, c, v) in rho(t, s, m).entries() {
                        trip.push((to + r, so + c, field.mul(&coef, v)));
                    }
                }
            }
        }
        diffs.push(Matrix::from_triplets(field, idx.total(n + 1), idx.total(n), trip));
    }
    (Complex::from_parts(field, lo, dims_vec(&idx, lo, hi), diffs), idx)
}

fn dims_vec(idx: &CellIndex, lo: i32, hi: i32) -> Vec<usize> {
    (lo..=hi).map(|n| idx.total(n)).collect()
}

/// Chain map between two cellular totals from cellwise components `comp(σ, m)`.
pub fn cellular_map(
    src: (&Arc<Complex>, &CellIndex),
    tgt: (&Arc<Complex>, &CellIndex),
    cells: &[usize],
    comp: impl Fn(usize, i32) -> Matrix,
) -> ChainMap {
    let field = src.0.field();
    ChainMap::build(src.0.clone(), tgt.0.clone(), |n| {
        let mut trip = Vec::new();
        for &s in cells {
            if let (Some(so), Some(to)) = (src.1.offset(n, s), tgt.1.offset(n, s)) {
                for (r, c, v) in comp(s, src.1.inner(n, s)).entries() {
                    trip.push((to + r, so + c, v.clone()));
                }
            }
        }
        Matrix::from_triplets(field, tgt.0.dim(n), src.0.dim(n), trip)
    })
}

/// Compactly supported sections `Γ_c(F) = p_!F`.
pub fn gamma_c(sheaf: &Sheaf) -> Complex {
    let all: Vec<usize> = (0..sheaf.base().len()).collect();
    gamma_c_over(sheaf, &all)
}

/// `Γ_c` of the restriction to a locally closed set of cells.
pub fn gamma_c_over(sheaf: &Sheaf, cells: &[usize]) -> Complex {
    cellular_total(sheaf.base(), sheaf.field(), cells, |s| sheaf.stalk(s).clone(), |t, s, m| sheaf.restriction_matrix(t, s, m)).0
}

/// Fiberwise data of a proper pushforward along a projection: for each
/// target cell `t`, the cells of the fiber over `t` and the cellular total
/// of the restriction.
struct Proper {
    tgt: Arc<FacePoset>,
    cells: Vec<usize>,
    elem: Vec<Vec<usize>>,
    slices: Option<Vec<(Arc<Complex>, CellIndex)>>,
}

fn proper(k: &Sheaf, keep: &[usize]) -> Result<Proper> {
    let base = k.base();
    let factors = base.factor_list();
    if keep.iter().any(|&i| i >= factors.len()) {
        return Err(Error::Precondition("projection keeps a factor that does not exist".into()));
    }
    let drop: Vec<usize> = (0..factors.len()).filter(|i| !keep.contains(i)).collect();
    let tgt = FacePoset::product(&keep.iter().map(|&i| factors[i].clone()).collect::<Vec<_>>());
    let place = |fc: &[usize], t: usize| -> usize {
        let tc = tgt.coords(t);
        let mut c = vec![0; factors.len()];
        for (j, &i) in drop.iter().enumerate() {
            c[i] = fc[j];
        }
        for (j, &i) in keep.iter().enumerate() {
            c[i] = tc[j];
        }
        base.element(&c)
    };
    if drop.is_empty() {
        let elem = (0..tgt.len()).map(|t| vec![place(&[], t)]).collect();
        return Ok(Proper { tgt, cells: vec![0], elem, slices: None });
    }
    let fiber = FacePoset::product(&drop.iter().map(|&i| factors[i].clone()).collect::<Vec<_>>());
    let cells: Vec<usize> = (0..fiber.len()).collect();
    let elem: Vec<Vec<usize>> = (0..tgt.len()).map(|t| cells.iter().map(|&f| place(&fiber.coords(f), t)).collect()).collect();
    let slices = (0..tgt.len())
        .map(|t| {
            let e = &elem[t];
            let (c, idx) = cellular_total(&fiber, k.field(), &cells, |f| k.stalk(e[f]).clone(), |a, b, m| {
                k.restriction_matrix(e[a], e[b], m)
            });
            (Arc::new(c), idx)
        })
        .collect();
    Ok(Proper { tgt, cells, elem, slices: Some(slices) })
}

impl Proper {
    fn sheaf(&self, k: &Sheaf) -> Sheaf {
        match &self.slices {
            None => {
                let stalks = self.elem.iter().map(|e| k.stalk(e[0]).clone()).collect();
                Sheaf::from_fn(self.tgt.clone(), k.field(), stalks, |a, b| k.map(self.elem[a][0], self.elem[b][0]))
            }
            Some(sl) => {
                let stalks = sl.iter().map(|(c, _)| c.clone()).collect();
                Sheaf::from_fn(self.tgt.clone(), k.field(), stalks, |a, b| {
                    cellular_map((&sl[b].0, &sl[b].1), (&sl[a].0, &sl[a].1), &self.cells, |f, m| {
                        k.restriction_matrix(self.elem[a][f], self.elem[b][f], m)
                    })
                })
            }
        }
    }
}

/// `π_!K` for the projection of a product onto the factors in `keep`,
/// integrating over the remaining factors.
pub fn push_shriek_proj(k: &Sheaf, keep: &[usize]) -> Result<Sheaf> {
    Ok(proper(k, keep)?.sheaf(k))
}

/// `π_!φ` for a map of sheaves on a product.
pub fn push_shriek_proj_map(phi: &SheafMap, keep: &[usize]) -> Result<SheafMap> {
    let (a, b) = (phi.source(), phi.target());
    let (pa, pb) = (proper(a, keep)?, proper(b, keep)?);
    let (sa, sb) = (Arc::new(pa.sheaf(a)), Arc::new(pb.sheaf(b)));
    let comps = (0..pa.tgt.len())
        .map(|t| match (&pa.slices, &pb.slices) {
            (Some(x), Some(y)) => cellular_map((&x[t].0, &x[t].1), (&y[t].0, &y[t].1), &pa.cells, |f, m| {
                phi.comp(pa.elem[t][f]).comp(m)
            }),
            _ => rewrap(phi.comp(pa.elem[t][0]), sa.stalk(t), sb.stalk(t)),
        })
        .collect();
    SheafMap::from_parts(sa, sb, comps)
}

/// The same matrices between equal complexes held in other allocations.
pub fn rewrap(m: &ChainMap, src: &Arc<Complex>, tgt: &Arc<Complex>) -> ChainMap {
    ChainMap::from_parts(src.clone(), tgt.clone(), m.components().clone())
}

/// `f^*φ`.
pub fn pullback_map(f: &PosetMap, phi: &SheafMap) -> Result<SheafMap> {
    let a = Arc::new(pullback(f, phi.source())?);
    let b = Arc::new(pullback(f, phi.target())?);
    let comps = (0..f.source().len()).map(|s| rewrap(phi.comp(f.apply(s)), a.stalk(s), b.stalk(s))).collect();
    SheafMap::from_parts(a, b, comps)
}

/// `φ ⊗ ψ` for maps on the same space.
pub fn tensor_map(phi: &SheafMap, psi: &SheafMap) -> Result<SheafMap> {
    let a = Arc::new(Sheaf::tensor(phi.source(), psi.source())?);
    let b = Arc::new(Sheaf::tensor(phi.target(), psi.target())?);
    let comps = (0..a.base().len())
        .map(|s| rewrap(&ChainMap::tensor(phi.comp(s), psi.comp(s)), a.stalk(s), b.stalk(s)))
        .collect();
    SheafMap::from_parts(a, b, comps)
}

/// Dualizing complex: `ω(σ) = Γ_c(str σ; k)^∨`, restrictions dual to
/// extension by zero.
pub fn dualizing(base: &Arc<FacePoset>, field: Field) -> Sheaf {
    let k = Arc::new(Complex::unit(field));
    let local: Vec<(Arc<Complex>, CellIndex, Vec<usize>)> = (0..base.len())
        .map(|s| {
            let st = base.star(s);
            let (c, idx) = cellular_total(base, field, &st, |_| k.clone(), |_, _, _| Matrix::identity(field, 1));
            (Arc::new(c), idx, st)
        })
        .collect();
    let duals: Vec<Arc<Complex>> = local.iter().map(|(c, _, _)| Arc::new(c.dual())).collect();
    Sheaf::from_fn(base.clone(), field, duals, |s, t| {
        let inc = cellular_map((&local[s].0, &local[s].1), (&local[t].0, &local[t].1), &local[s].2, |_, _| {
            Matrix::identity(field, 1)
        });
        inc.dual()
    })
}

/// `ND(F) = sHom(F, k)`.
pub fn naive_dual(sheaf: &Sheaf) -> Result<Sheaf> {
    Sheaf::sheaf_hom(sheaf, &Sheaf::constant(sheaf.base().clone(), sheaf.field()))
}

/// `VD(F) = sHom(F, ω)`.
pub fn verdier_dual(sheaf: &Sheaf) -> Result<Sheaf> {
    Sheaf::sheaf_hom(sheaf, &dualizing(sheaf.base(), sheaf.field()))
}

/// Same, with a precomputed dualizing complex.
pub fn verdier_dual_with(sheaf: &Sheaf, omega: &Sheaf) -> Result<Sheaf> {
    Sheaf::sheaf_hom(sheaf, omega)
}

/// Standard dual as a complex of indicators, characterised by
/// `Hom(SD F, G) ≅ Γ_c(F ⊗ G)` naturally in `G`.
///
/// Generators are `(σ, a, m)` for `a` a basis vector of `F(σ)^m`, with label
/// `σ` and degree `-m - dim σ`.
pub fn standard_dual(sheaf: &Sheaf) -> IndicatorComplex {
    let base = sheaf.base();
    let field = sheaf.field();
    let mut gens = Vec::new();
    let mut ids: HashMap<(usize, i32, usize), usize> = HashMap::new();
    for s in 0..base.len() {
        let st = sheaf.stalk(s);
        if st.is_zero() {
            continue;
        }
        for m in st.lo()..=st.hi() {
            for a in 0..st.dim(m) {
                ids.insert((s, m, a), gens.len());
                gens.push(Generator { label: s, degree: -m - base.dim(s) as i32 });
            }
        }
    }
    let mut trip = Vec::new();
    for t in 0..base.len() {
        for &(s, inc) in base.faces(t) {
            // t ⋖ s: e_(t,c,m) ↦ Σ_a (-1)^{dim s + m} [t:s] r_{ca} e_(s,a,m).
            let st = sheaf.stalk(s);
            if st.is_zero() || sheaf.stalk(t).is_zero() {
                continue;
            }
            for m in st.lo()..=st.hi() {
                let r = sheaf.restriction_matrix(t, s, m);
                let sg = field.mul(&field.sign(base.dim(s) as i64 + m as i64), &field.from_i64(inc));
                for (c, a, v) in r.entries() {
                    trip.push((ids[&(s, m, a)], ids[&(t, m, c)], field.mul(&sg, v)));
                }
            }
        }
    }
    for s in 0..base.len() {
        let st = sheaf.stalk(s);
        if st.is_zero() {
            continue;
        }
        for m in st.lo()..st.hi() {
            // e_(s,b,m+1) ↦ Σ_a (-1)^m f_{ba} e_(s,a,m).
            let sg = field.sign(m as i64);
            for (b, a, v) in st.d(m).entries() {
                trip.push((ids[&(s, m, a)], ids[&(s, m + 1, b)], field.mul(&sg, v)));
            }
        }
    }
    let n = gens.len();
    let d = Matrix::from_triplets(field, n, n, trip);
    IndicatorComplex::from_parts(base.clone(), field, Kind::Projective, gens, d)
}

/// The standard dual as a sheaf.
pub fn standard_dual_sheaf(sheaf: &Sheaf) -> Sheaf {
    standard_dual(sheaf).to_sheaf()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Graded;
    use crate::geometry::SimplicialComplex;

    fn q() -> Field {
        Field::Rationals
    }

    #[test]
    fn gamma_c_open_edge() {
        let s = SimplicialComplex::interval().face_poset();
        let e = s.index_of("0-1").unwrap();
        let f = Sheaf::indicator(s, q(), e);
        assert_eq!(gamma_c(&f).cohomology(), Graded::from_pairs(&[(1, 1)]));
    }

    #[test]
    fn omega_on_circle() {
        let s = SimplicialComplex::circle(3).unwrap().face_poset();
        let w = dualizing(&s, q());
        w.validate().unwrap();
        for c in w.stalk_cohomology() {
            assert_eq!(c, Graded::from_pairs(&[(-1, 1)]));
        }
    }

    #[test]
    fn push_star_to_point_is_sections() {
        let s = SimplicialComplex::circle(3).unwrap().face_poset();
        let pt = SimplicialComplex::point().face_poset();
        let p = PosetMap::new(s.clone(), pt, vec![0; s.len()], MapKind::General).unwrap();
        let k = Sheaf::constant(s, q());
        let g = push_star(&p, &k).unwrap();
        assert_eq!(g.stalk(0).cohomology(), Graded::from_pairs(&[(0, 1), (1, 1)]));
    }

    #[test]
    fn shriek_restriction_of_constant() {
        let s = SimplicialComplex::interval().face_poset();
        let v = s.index_of("0").unwrap();
        let i = PosetMap::inclusion(&s, &[v], MapKind::ClosedInclusion).unwrap();
        let k = Sheaf::constant(s, q());
        let r = shriek_restrict_closed(&i, &k).unwrap();
        assert!(r.stalk(0).is_acyclic());
    }

    #[test]
    fn standard_dual_is_a_complex() {
        let s = SimplicialComplex::circle(3).unwrap().face_poset();
        let k = Sheaf::constant(s, q());
        let sd = standard_dual(&k);
        IndicatorComplex::new(sd.base().clone(), q(), Kind::Projective, sd.gens().to_vec(), sd.d().clone()).unwrap();
    }
}
