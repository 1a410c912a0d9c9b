//! Contravariant poset diagrams of complexes and their homotopy (co)limits.
//!
//! A diagram assigns `D(p)` to each element and a chain map
//! `ρ_{s≤t}: D(t) → D(s)` to each relation. The homotopy limit is the cobar
//! total complex `⊕_k ∏_{p0<…<pk} D(p0)^{n-k}` with
//! `(δx)(p0…pk) = ρ_{p0≤p1} x(p1…pk) + Σ_{i≥1} (-1)^i x(…p̂i…)` and total
//! differential `δ + (-1)^k d`. The homotopy colimit is the bar complex
//! `⊕ D(pk)` in column `-k`, whose last face applies `ρ_{p(k-1)≤pk}`.

use std::collections::HashMap;
use std::sync::Arc;

use crate::complex::{ChainMap, Complex};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::Matrix;
use crate::poset::Poset;

/// Read access shared by poset diagrams and sheaves.
pub trait Diagram {
    fn field(&self) -> Field;
    fn order(&self) -> &Poset;
    fn value(&self, s: usize) -> &Arc<Complex>;
    /// `ρ_{s≤t}: D(t) → D(s)` for `s < t`; `None` when `s == t` or the map is zero.
    fn restriction(&self, s: usize, t: usize) -> Option<&ChainMap>;

    /// Matrix of `ρ_{s≤t}` in degree `n` (identity when `s == t`).
    fn restriction_matrix(&self, s: usize, t: usize, n: i32) -> Matrix {
        match self.restriction(s, t) {
            Some(m) => m.comp(n),
            None if s == t => Matrix::identity(self.field(), self.value(s).dim(n)),
            None => Matrix::zeros(self.field(), self.value(s).dim(n), self.value(t).dim(n)),
        }
    }
}

/// Computes all composite restriction maps from covering data and checks
/// strict functoriality.
pub fn close_restrictions(
    poset: &Poset,
    values: &[Arc<Complex>],
    covers: &HashMap<(usize, usize), ChainMap>,
) -> Result<HashMap<(usize, usize), ChainMap>> {
    let n = poset.len();
    for s in 0..n {
        for &t in poset.upper_covers(s) {
            let m = covers.get(&(s, t)).ok_or_else(|| {
                Error::NotFunctorial(format!("missing map for {} ≤ {}", poset.name(s), poset.name(t)))
            })?;
            if m.source().as_ref() != values[t].as_ref() || m.target().as_ref() != values[s].as_ref() {
                return Err(Error::Shape(format!("map for {} ≤ {} has wrong ends", poset.name(s), poset.name(t))));
            }
        }
    }
    let mut all: HashMap<(usize, usize), ChainMap> = HashMap::new();
    let mut order: Vec<(usize, usize)> = Vec::new();
    for s in 0..n {
        for &t in poset.above(s) {
            order.push((s, t));
        }
    }
    // Pairs with longer intervals depend on shorter ones.
    let interval_len = |s: usize, t: usize| poset.above(s).iter().filter(|&&u| poset.le(u, t)).count();
    order.sort_by_key(|&(s, t)| interval_len(s, t));
    for (s, t) in order {
        let mut result: Option<(usize, ChainMap)> = None;
        for &u in poset.upper_covers(s) {
            if !poset.le(u, t) {
                continue;
            }
            let first = &covers[&(s, u)];
            let cand = if u == t { first.clone() } else { first.after(&all[&(u, t)]) };
            match &result {
                None => result = Some((u, cand)),
                Some((u0, m)) => {
                    if *m != cand {
                        return Err(Error::NotFunctorial(format!(
                            "{} < {} < {} vs {} < {} < {}",
                            poset.name(s),
                            poset.name(*u0),
                            poset.name(t),
                            poset.name(s),
                            poset.name(u),
                            poset.name(t)
                        )));
                    }
                }
            }
        }
        all.insert((s, t), result.expect("interval without covers").1);
    }
    Ok(all)
}

/// Diagram over an abstract poset.
#[derive(Clone, Debug)]
pub struct PosetDiagram {
    field: Field,
    poset: Arc<Poset>,
    values: Vec<Arc<Complex>>,
    maps: HashMap<(usize, usize), ChainMap>,
}

impl PosetDiagram {
    /// Builds from values and maps on covering relations; rejects non-functorial data.
    pub fn new(
        field: Field,
        poset: Arc<Poset>,
        values: Vec<Arc<Complex>>,
        covers: HashMap<(usize, usize), ChainMap>,
    ) -> Result<PosetDiagram> {
        if values.len() != poset.len() {
            return Err(Error::Shape("one value per element".into()));
        }
        let maps = close_restrictions(&poset, &values, &covers)?;
        Ok(PosetDiagram { field, poset, values, maps })
    }

    /// The constant diagram with value `c` and identity maps.
    pub fn constant(poset: Arc<Poset>, c: Arc<Complex>) -> PosetDiagram {
        let mut covers = HashMap::new();
        for s in 0..poset.len() {
            for &t in poset.upper_covers(s) {
                covers.insert((s, t), ChainMap::identity(c.clone()));
            }
        }
        let values = vec![c.clone(); poset.len()];
        PosetDiagram::new(c.field(), poset, values, covers).expect("constant diagram is functorial")
    }

    pub fn holim(&self) -> Complex {
        let all = vec![true; self.poset.len()];
        holim(self, &all).0
    }

    pub fn hocolim(&self) -> Complex {
        hocolim(self)
    }
}

impl Diagram for PosetDiagram {
    fn field(&self) -> Field {
        self.field
    }
    fn order(&self) -> &Poset {
        &self.poset
    }
    fn value(&self, s: usize) -> &Arc<Complex> {
        &self.values[s]
    }
    fn restriction(&self, s: usize, t: usize) -> Option<&ChainMap> {
        if s == t {
            None
        } else {
            self.maps.get(&(s, t))
        }
    }
}

/// Basis bookkeeping of a total complex over chains.
#[derive(Clone, Debug)]
pub struct TotalIndex {
    pub chains: Vec<Vec<usize>>,
    pub blocks: Vec<Arc<Complex>>,
    ids: HashMap<Vec<usize>, usize>,
    lo: i32,
    offsets: Vec<HashMap<usize, usize>>,
    sign_col: i32,
}

impl TotalIndex {
    /// Offset of chain `g`'s block in total degree `n`, if nonzero there.
    pub fn offset(&self, n: i32, g: usize) -> Option<usize> {
        let i = n - self.lo;
        if i < 0 || i as usize >= self.offsets.len() {
            return None;
        }
        self.offsets[i as usize].get(&g).copied()
    }

    pub fn id(&self, chain: &[usize]) -> Option<usize> {
        self.ids.get(chain).copied()
    }

    /// Inner degree of chain `g` at total degree `n`.
    pub fn inner(&self, n: i32, g: usize) -> i32 {
        n - self.sign_col * (self.chains[g].len() as i32 - 1)
    }
}

/// Cobar total complex over the given chains. `block(c)` is the complex at a
/// chain; `face(c', i, m)` is the degree-`m` matrix `V_{∂_i c'} → V_{c'}`
/// (`None` for the identity).
pub fn cobar_total(
    field: Field,
    chains: Vec<Vec<usize>>,
    block: impl Fn(&[usize]) -> Arc<Complex>,
    face: impl Fn(&[usize], usize, i32) -> Option<Matrix>,
) -> (Complex, TotalIndex) {
    let blocks: Vec<Arc<Complex>> = chains.iter().map(|c| block(c)).collect();
    total_complex(field, chains, blocks, 1, |cp, i, m, blocks, idx| {
        let c: Vec<usize> = cp.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| *p).collect();
        let g = idx.get(&c)?;
        let sign = field.sign(i as i64);
        let mat = match face(cp, i, m) {
            Some(mat) => mat,
            None => Matrix::identity(field, blocks[*g].dim(m)),
        };
        Some((*g, mat.scale(&sign)))
    })
}

/// Shared assembly. `dir = 1`: cobar (faces raise chain length);
/// `dir = -1`: bar (faces lower chain length, column `-k`).
fn total_complex(
    field: Field,
    chains: Vec<Vec<usize>>,
    blocks: Vec<Arc<Complex>>,
    dir: i32,
    edge: impl Fn(&[usize], usize, i32, &[Arc<Complex>], &HashMap<Vec<usize>, usize>) -> Option<(usize, Matrix)>,
) -> (Complex, TotalIndex) {
    let ids: HashMap<Vec<usize>, usize> = chains.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
    let col = |g: usize| dir * (chains[g].len() as i32 - 1);
    let live: Vec<usize> = (0..chains.len()).filter(|&g| !blocks[g].is_zero()).collect();
    if live.is_empty() {
        let index = TotalIndex { chains, blocks, ids, lo: 0, offsets: Vec::new(), sign_col: dir };
        return (Complex::zero(field), index);
    }
    let lo = live.iter().map(|&g| blocks[g].lo() + col(g)).min().unwrap();
    let hi = live.iter().map(|&g| blocks[g].hi() + col(g)).max().unwrap();
    let mut offsets: Vec<HashMap<usize, usize>> = Vec::new();
    let mut dims = Vec::new();
    for n in lo..=hi {
        let mut off = HashMap::new();
        let mut acc = 0;
        for &g in &live {
            let d = blocks[g].dim(n - col(g));
            if d > 0 {
                off.insert(g, acc);
                acc += d;
            }
        }
        offsets.push(off);
        dims.push(acc);
    }
    let mut diffs = Vec::new();
    for n in lo..hi {
        let i = (n - lo) as usize;
        let mut trip = Vec::new();
        for &g in &live {
            let k = chains[g].len() as i32 - 1;
            let m = n - col(g);
            if let (Some(&so), Some(&to)) = (offsets[i].get(&g), offsets[i + 1].get(&g)) {
                let s = field.sign(k as i64);
                for (r, c, v) in blocks[g].d(m).entries() {
                    trip.push((to + r, so + c, field.mul(&s, v)));
                }
            }
        }
        // Face contributions: cobar writes into longer chains, bar into shorter ones.
        for (gp, cp) in chains.iter().enumerate() {
            if cp.len() < 2 && dir == 1 {
                continue;
            }
            if dir == 1 {
                let tgt_off = match offsets[i + 1].get(&gp) {
                    Some(o) => *o,
                    None => continue,
                };
                let m = n + 1 - col(gp);
                for face_i in 0..cp.len() {
                    if let Some((g, mat)) = edge(cp, face_i, m, &blocks, &ids) {
                        if let Some(&so) = offsets[i].get(&g) {
                            for (r, c, v) in mat.entries() {
                                trip.push((tgt_off + r, so + c, v.clone()));
                            }
                        }
                    }
                }
            } else {
                if cp.len() < 2 {
                    continue;
                }
                let src_off = match offsets[i].get(&gp) {
                    Some(o) => *o,
                    None => continue,
                };
                let m = n - col(gp);
                for face_i in 0..cp.len() {
                    if let Some((g, mat)) = edge(cp, face_i, m, &blocks, &ids) {
                        if let Some(&to) = offsets[i + 1].get(&g) {
                            for (r, c, v) in mat.entries() {
                                trip.push((to + r, src_off + c, v.clone()));
                            }
                        }
                    }
                }
            }
        }
        diffs.push(Matrix::from_triplets(field, dims[i + 1], dims[i], trip));
    }
    let index = TotalIndex { chains, blocks, ids, lo, offsets, sign_col: dir };
    let c = Complex::from_parts(field, lo, dims, diffs);
    // `from_parts` may trim empty end degrees; offsets stay keyed by absolute degree.
    (c, index)
}

fn flatten(chains: Vec<Vec<Vec<usize>>>) -> Vec<Vec<usize>> {
    chains.into_iter().flatten().collect()
}

/// Homotopy limit over the elements selected by `mask`.
pub fn holim<D: Diagram + ?Sized>(d: &D, mask: &[bool]) -> (Complex, TotalIndex) {
    let field = d.field();
    let chains: Vec<Vec<usize>> = flatten(d.order().chains(mask))
        .into_iter()
        .filter(|c| !d.value(c[0]).is_zero())
        .collect();
    cobar_total(
        field,
        chains,
        |c| d.value(c[0]).clone(),
        |cp, i, m| if i == 0 { Some(d.restriction_matrix(cp[0], cp[1], m)) } else { None },
    )
}

/// Homotopy colimit over the whole poset.
pub fn hocolim<D: Diagram + ?Sized>(d: &D) -> Complex {
    let field = d.field();
    let all = vec![true; d.order().len()];
    let chains: Vec<Vec<usize>> = flatten(d.order().chains(&all))
        .into_iter()
        .filter(|c| !d.value(*c.last().unwrap()).is_zero())
        .collect();
    let blocks: Vec<Arc<Complex>> = chains.iter().map(|c| d.value(*c.last().unwrap()).clone()).collect();
    total_complex(field, chains, blocks, -1, |c, i, m, blocks, idx| {
        let k = c.len() - 1;
        let face: Vec<usize> = c.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| *p).collect();
        let g = *idx.get(&face)?;
        let sign = field.sign(i as i64);
        let mat = if i == k {
            d.restriction_matrix(c[k - 1], c[k], m)
        } else {
            Matrix::identity(field, blocks[g].dim(m))
        };
        Some((g, mat.scale(&sign)))
    })
    .0
}

/// Chain map between two total complexes built over nested chain sets with
/// identical blocks: projection onto the chains of `small`.
pub fn total_projection(
    big: (&Arc<Complex>, &TotalIndex),
    small: (&Arc<Complex>, &TotalIndex),
) -> ChainMap {
    let field = big.0.field();
    let (bc, bi) = big;
    let (sc, si) = small;
    ChainMap::build(bc.clone(), sc.clone(), |n| {
        let mut trip = Vec::new();
        for (g, chain) in si.chains.iter().enumerate() {
            if let (Some(so), Some(gb)) = (si.offset(n, g), bi.id(chain)) {
                if let Some(bo) = bi.offset(n, gb) {
                    let d = si.blocks[g].dim(si.inner(n, g));
                    for r in 0..d {
                        trip.push((so + r, bo + r, field.one()));
                    }
                }
            }
        }
        Matrix::from_triplets(field, sc.dim(n), bc.dim(n), trip)
    })
}

/// The canonical map `D(top) → holim_U D` when `top` lies above every element of `U`.
pub fn map_to_holim<D: Diagram + ?Sized>(d: &D, top: usize, total: (&Arc<Complex>, &TotalIndex)) -> ChainMap {
    let field = d.field();
    let (tc, ti) = total;
    let src = d.value(top).clone();
    ChainMap::build(src.clone(), tc.clone(), |n| {
        let mut trip = Vec::new();
        for (g, chain) in ti.chains.iter().enumerate() {
            if chain.len() != 1 {
                continue;
            }
            if let Some(o) = ti.offset(n, g) {
                let m = d.restriction_matrix(chain[0], top, n);
                for (r, c, v) in m.entries() {
                    trip.push((o + r, c, v.clone()));
                }
            }
        }
        Matrix::from_triplets(field, tc.dim(n), src.dim(n), trip)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("p{i}")).collect()
    }

    #[test]
    fn one_point_holim_is_value() {
        let p = Arc::new(Poset::from_relations(names(1), &[]).unwrap());
        let k = Arc::new(Complex::unit(Field::Rationals));
        let d = PosetDiagram::constant(p, k.clone());
        assert_eq!(d.holim(), *k);
    }

    #[test]
    fn pushout_shape_hocolim() {
        let p = Arc::new(Poset::from_relations(names(3), &[(1, 0), (1, 2)]).unwrap());
        let k = Arc::new(Complex::unit(Field::Rationals));
        let d = PosetDiagram::constant(p, k);
        assert_eq!(d.hocolim().cohomology().to_string(), "0:1");
        assert_eq!(d.holim().cohomology().to_string(), "0:1");
    }

    #[test]
    fn discrete_two_points() {
        let p = Arc::new(Poset::from_relations(names(2), &[]).unwrap());
        let k = Arc::new(Complex::unit(Field::Rationals));
        let d = PosetDiagram::constant(p, k);
        assert_eq!(d.holim().cohomology().to_string(), "0:2");
    }
}
