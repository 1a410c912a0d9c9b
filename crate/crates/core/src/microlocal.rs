//! Combinatorial microstalks: sign assignments on links, the Morse fiber
//! over negative cofaces, corepresentatives, singular-support tables and
//! constructibility with respect to a coarsening.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;

use crate::complex::{ChainMap, Complex, Graded};
use crate::diagram;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::geometry::{FacePoset, MapKind, PosetMap};
use crate::matrix::Matrix;
use crate::resolution::{minimal_resolution, IndicatorComplex};
use crate::sheaf::{Sheaf, SheafMap};

/// A generic covector at a stratum: a sign for every link vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignAssignment {
    pub stratum: usize,
    /// Link vertex id mapped to `true` for positive.
    pub signs: BTreeMap<usize, bool>,
}

impl SignAssignment {
    pub fn new(base: &FacePoset, stratum: usize, signs: &[(usize, bool)]) -> Result<SignAssignment> {
        let link = base.link_vertices(stratum);
        let map: BTreeMap<usize, bool> = signs.iter().copied().collect();
        if map.len() != signs.len() || map.keys().copied().collect::<Vec<_>>() != link {
            return Err(Error::Precondition(format!(
                "sign assignment at {} must cover the link {:?} exactly",
                base.name(stratum),
                link
            )));
        }
        Ok(SignAssignment { stratum, signs: map })
    }

    /// The zero-section entry: every link vertex positive.
    pub fn all_positive(base: &FacePoset, stratum: usize) -> SignAssignment {
        let signs = base.link_vertices(stratum).into_iter().map(|v| (v, true)).collect();
        SignAssignment { stratum, signs }
    }

    /// All `2^|link|` assignments at a stratum, refusing beyond `budget`.
    pub fn enumerate(base: &FacePoset, stratum: usize, budget: usize) -> Result<Vec<SignAssignment>> {
        let link = base.link_vertices(stratum);
        let count = if link.len() >= usize::BITS as usize { usize::MAX } else { 1usize << link.len() };
        if count > budget {
            return Err(Error::Budget { needed: count, budget });
        }
        Ok((0..count)
            .map(|bits| {
                let signs = link.iter().enumerate().map(|(i, &v)| (v, bits >> i & 1 == 0)).collect();
                SignAssignment { stratum, signs }
            })
            .collect())
    }

    pub fn is_zero_section(&self) -> bool {
        self.signs.values().all(|&p| p)
    }

    /// `N_ξ`: cofaces of the stratum containing a negative link vertex.
    pub fn negative_set(&self, base: &FacePoset) -> Vec<usize> {
        base.star(self.stratum)
            .into_iter()
            .filter(|&t| base.cell(t).vertices.iter().any(|v| self.signs.get(v) == Some(&false)))
            .collect()
    }

    /// Concatenated assignment at `(σ, τ)` on the product of two face posets.
    pub fn concat(&self, other: &SignAssignment, a: &FacePoset, prod: &FacePoset) -> SignAssignment {
        let off = a.vertex_names().len();
        let stratum = prod.element(&[self.stratum, other.stratum]);
        let mut signs = self.signs.clone();
        signs.extend(other.signs.iter().map(|(v, p)| (v + off, *p)));
        SignAssignment { stratum, signs }
    }

    pub fn label(&self, base: &FacePoset) -> String {
        let mut s = String::new();
        for (v, p) in &self.signs {
            let _ = write!(s, "{}{}", base.vertex_names()[*v], if *p { '+' } else { '-' });
            s.push(' ');
        }
        s.trim_end().to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, serde::Serialize)]
pub enum Realizability {
    Realizable,
    NotRealizable,
    Unknown,
}

/// Whether an affine functional on the star realizes the signs. Decided on
/// 1-dimensional complexes only.
pub fn realizability(base: &FacePoset, xi: &SignAssignment) -> Realizability {
    if xi.is_zero_section() {
        return Realizability::Realizable;
    }
    let top = (0..base.len()).map(|s| base.dim(s)).max().unwrap_or(0);
    if top > 1 || base.is_product() {
        return Realizability::Unknown;
    }
    if base.dim(xi.stratum) == 1 {
        return Realizability::Realizable;
    }
    match xi.signs.len() {
        0 | 1 => Realizability::Realizable,
        2 => {
            let v: Vec<bool> = xi.signs.values().copied().collect();
            if v[0] != v[1] {
                Realizability::Realizable
            } else {
                Realizability::NotRealizable
            }
        }
        _ => Realizability::Unknown,
    }
}

/// `fib(F(σ) → Γ(N_ξ; F))`.
pub fn microstalk(f: &Sheaf, xi: &SignAssignment) -> Result<Complex> {
    if xi.stratum >= f.base().len() {
        return Err(Error::Precondition(format!("no stratum {}", xi.stratum)));
    }
    let n = xi.negative_set(f.base());
    let (total, index) = f.sections_indexed(&n)?;
    let total = Arc::new(total);
    let m = diagram::map_to_holim(f, xi.stratum, (&total, &index));
    Ok(Complex::fiber(&m))
}

/// `cone(j_! k_N → 1_σ)`, so that `Hom(C, F)` is the microstalk.
pub fn microstalk_corep(base: &Arc<FacePoset>, field: Field, xi: &SignAssignment) -> Result<Sheaf> {
    let n = xi.negative_set(base);
    let unit = Arc::new(Complex::unit(field));
    let src = Arc::new(Sheaf::constant_on(base.clone(), unit.clone(), &n)?);
    let tgt = Arc::new(Sheaf::indicator(base.clone(), field, xi.stratum));
    let comps = (0..base.len())
        .map(|s| {
            if src.stalk(s).is_zero() {
                ChainMap::zero(src.stalk(s).clone(), tgt.stalk(s).clone())
            } else {
                ChainMap::from_parts(src.stalk(s).clone(), tgt.stalk(s).clone(), BTreeMap::from([(0, Matrix::identity(field, 1))]))
            }
        })
        .collect();
    Ok(SheafMap::new(src, tgt, comps)?.cone())
}

/// Minimal projective model of the corepresentative.
pub fn corep_complex(base: &Arc<FacePoset>, field: Field, xi: &SignAssignment) -> Result<IndicatorComplex> {
    let c = Arc::new(microstalk_corep(base, field, xi)?);
    Ok(minimal_resolution(&c).complex.clone())
}

/// One nonzero entry of a singular-support table.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct SsEntry {
    pub stratum: String,
    pub signs: String,
    pub zero_section: bool,
    pub realizable: Realizability,
    pub dims: Graded,
}

/// Nonzero microstalks over all enumerated assignments. Assignments known
/// to be non-realizable are kept only when `abstract_too` is set.
pub fn singular_support(f: &Sheaf, budget: usize, abstract_too: bool) -> Result<Vec<SsEntry>> {
    let base = f.base();
    let mut all = Vec::new();
    for s in 0..base.len() {
        all.extend(SignAssignment::enumerate(base, s, budget)?);
    }
    let rows: Vec<Result<Option<SsEntry>>> = all
        .par_iter()
        .map(|xi| {
            let r = realizability(base, xi);
            if r == Realizability::NotRealizable && !abstract_too {
                return Ok(None);
            }
            let h = microstalk(f, xi)?.cohomology();
            if h.is_zero() {
                return Ok(None);
            }
            Ok(Some(SsEntry {
                stratum: base.name(xi.stratum).to_string(),
                signs: xi.label(base),
                zero_section: xi.is_zero_section(),
                realizable: r,
                dims: h,
            }))
        })
        .collect();
    let mut out = Vec::new();
    for r in rows {
        if let Some(e) = r? {
            out.push(e);
        }
    }
    Ok(out)
}

/// Deterministic CSV rendering of a table.
pub fn ss_csv(entries: &[SsEntry]) -> String {
    let mut s = String::from("stratum,signs,zero_section,realizable,dims\n");
    for e in entries {
        let _ = writeln!(s, "{},{},{},{:?},{}", e.stratum, e.signs, e.zero_section, e.realizable, e.dims);
    }
    s
}

/// Every generization map inside a fiber of the refinement `q` is a
/// quasi-isomorphism.
pub fn is_constructible_wrt(f: &Sheaf, q: &PosetMap) -> Result<bool> {
    q.require(MapKind::Refinement)?;
    if q.source().as_ref() != f.base().as_ref() {
        return Err(Error::BaseMismatch("constructibility test on another space".into()));
    }
    let p = f.base().poset();
    for r in 0..p.len() {
        for &u in p.upper_covers(r) {
            if q.apply(r) == q.apply(u) && !f.map(r, u).is_quasi_iso() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The same question read off the microstalk table: no realizable nonzero
/// covector survives at a cell that is strictly lower-dimensional than its
/// coarse stratum. Exact on 1-dimensional complexes.
pub fn constructible_by_table(f: &Sheaf, q: &PosetMap, budget: usize) -> Result<bool> {
    let base = f.base();
    for r in 0..base.len() {
        if base.dim(r) >= q.target().dim(q.apply(r)) {
            continue;
        }
        for xi in SignAssignment::enumerate(base, r, budget)? {
            if xi.is_zero_section() || realizability(base, &xi) != Realizability::Realizable {
                continue;
            }
            if !microstalk(f, &xi)?.is_acyclic() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Thom–Sebastiani at one pair: dims of `μ(F) ⊗ μ(G)` and of `μ(F ⊠ G)`.
pub fn thom_sebastiani_pair(
    f: &Sheaf,
    g: &Sheaf,
    fg: &Sheaf,
    xi: &SignAssignment,
    zeta: &SignAssignment,
) -> Result<(Graded, Graded)> {
    let joint = xi.concat(zeta, f.base(), fg.base());
    let lhs = microstalk(f, xi)?.cohomology().tensor(&microstalk(g, zeta)?.cohomology());
    let rhs = microstalk(fg, &joint)?.cohomology();
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SimplicialComplex;
    use crate::kernels::{boxtimes, left_kan};
    use crate::resolution::rhom;

    fn q() -> Field {
        Field::Rationals
    }

    #[test]
    fn constant_sheaf_has_only_zero_section() {
        let s = SimplicialComplex::path(3).face_poset();
        let k = Sheaf::constant(s.clone(), q());
        let t = singular_support(&k, 64, false).unwrap();
        assert!(t.iter().all(|e| e.zero_section));
        assert_eq!(t.len(), s.len());
    }

    #[test]
    fn boundary_indicator_is_seen_on_one_side() {
        let s = SimplicialComplex::interval().face_poset();
        let v = s.index_of("0").unwrap();
        let f = Sheaf::indicator(s.clone(), q(), v);
        let xs = SignAssignment::enumerate(&s, v, 8).unwrap();
        let nonzero: Vec<bool> = xs.iter().map(|x| !microstalk(&f, x).unwrap().is_acyclic()).collect();
        assert_eq!(nonzero, vec![true, false]);
        let w = s.index_of("1").unwrap();
        for x in SignAssignment::enumerate(&s, w, 8).unwrap() {
            let h = microstalk(&f, &x).unwrap().cohomology();
            assert_eq!(h.is_zero(), x.is_zero_section());
            if !h.is_zero() {
                assert_eq!(h, Graded::from_pairs(&[(1, 1)]));
            }
        }
    }

    #[test]
    fn corep_matches_microstalk() {
        let s = SimplicialComplex::path(2).face_poset();
        let gens: Vec<Arc<Sheaf>> = (0..s.len())
            .flat_map(|t| [Sheaf::indicator(s.clone(), q(), t), Sheaf::closed_indicator(s.clone(), q(), t)])
            .map(Arc::new)
            .collect();
        for t in 0..s.len() {
            for xi in SignAssignment::enumerate(&s, t, 8).unwrap() {
                let c = Arc::new(microstalk_corep(&s, q(), &xi).unwrap());
                for g in &gens {
                    let a = rhom(&c, g).unwrap().cohomology();
                    let b = microstalk(g, &xi).unwrap().cohomology();
                    assert_eq!(a, b);
                }
            }
        }
    }

    #[test]
    fn thom_sebastiani_on_square() {
        let s = SimplicialComplex::interval().face_poset();
        let f = Sheaf::indicator(s.clone(), q(), 0);
        let g = Sheaf::closed_indicator(s.clone(), q(), 2);
        let fg = boxtimes(&f, &g).unwrap();
        for a in 0..s.len() {
            for b in 0..s.len() {
                for xi in SignAssignment::enumerate(&s, a, 8).unwrap() {
                    for zeta in SignAssignment::enumerate(&s, b, 8).unwrap() {
                        let (l, r) = thom_sebastiani_pair(&f, &g, &fg, &xi, &zeta).unwrap();
                        assert_eq!(l, r);
                    }
                }
            }
        }
    }

    #[test]
    fn coreps_die_along_subdivision() {
        let k = SimplicialComplex::interval();
        let (fine, owner) = k.subdivide_edges(3).unwrap();
        let fp = fine.face_poset();
        let map: Vec<usize> = owner;
        let qm = PosetMap::new(fp.clone(), k.face_poset(), map, MapKind::Refinement).unwrap();
        for r in 0..fp.len() {
            if fp.dim(r) == 0 && qm.target().dim(qm.apply(r)) == 1 {
                for xi in SignAssignment::enumerate(&fp, r, 8).unwrap() {
                    if xi.is_zero_section() || realizability(&fp, &xi) != Realizability::Realizable {
                        continue;
                    }
                    let c = Arc::new(microstalk_corep(&fp, q(), &xi).unwrap());
                    assert!(left_kan(&qm, &c).unwrap().is_acyclic());
                }
            }
        }
    }

    #[test]
    fn constructibility_agrees_with_table() {
        let k = SimplicialComplex::interval();
        let (fine, owner) = k.subdivide_edges(2).unwrap();
        let fp = fine.face_poset();
        let qm = PosetMap::new(fp.clone(), k.face_poset(), owner, MapKind::Refinement).unwrap();
        for t in 0..fp.len() {
            for f in [Sheaf::indicator(fp.clone(), q(), t), Sheaf::closed_indicator(fp.clone(), q(), t)] {
                assert_eq!(is_constructible_wrt(&f, &qm).unwrap(), constructible_by_table(&f, &qm, 8).unwrap());
            }
        }
    }

    #[test]
    fn budget_refusal() {
        let s = SimplicialComplex::simplex(3).face_poset();
        let v = s.index_of("0").unwrap();
        assert!(matches!(SignAssignment::enumerate(&s, v, 4), Err(Error::Budget { .. })));
    }
}
