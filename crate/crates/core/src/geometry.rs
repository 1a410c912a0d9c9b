//! Simplicial complexes, face posets in closure-reversed order, products,
//! poset maps and the staircase refinement of a square.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::poset::{Poset, SubsetKind};

/// A finite simplicial complex. Each simplex stores its vertices in a local
/// order; faces inherit it. The order fixes orientations and incidence signs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    vertex_names: Vec<String>,
    simplices: Vec<Vec<usize>>,
}

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut s = v.to_vec();
    s.sort_unstable();
    s
}

fn perm_sign(from: &[usize], to: &[usize]) -> i64 {
    let pos: HashMap<usize, usize> = to.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let p: Vec<usize> = from.iter().map(|v| pos[v]).collect();
    let mut inv = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

impl SimplicialComplex {
    /// Complex generated by ordered facets; faces inherit the facet order
    /// (the first facet containing a face fixes its order).
    pub fn from_facets(vertex_names: Vec<String>, facets: &[Vec<usize>]) -> Result<SimplicialComplex> {
        let nv = vertex_names.len();
        let mut seen: BTreeMap<(usize, Vec<usize>), Vec<usize>> = BTreeMap::new();
        for v in 0..nv {
            seen.insert((0, vec![v]), vec![v]);
        }
        for f in facets {
            if f.is_empty() {
                continue;
            }
            if f.iter().any(|v| *v >= nv) {
                return Err(Error::Precondition(format!("facet {f:?} uses an unknown vertex")));
            }
            if sorted(f).windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Precondition(format!("facet {f:?} repeats a vertex")));
            }
            let k = f.len();
            for mask in 1u64..(1u64 << k) {
                let face: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| f[i]).collect();
                seen.entry((face.len() - 1, sorted(&face))).or_insert(face);
            }
        }
        Ok(SimplicialComplex { vertex_names, simplices: seen.into_values().collect() })
    }

    fn numbered(n: usize) -> Vec<String> {
        (0..n).map(|i| i.to_string()).collect()
    }

    pub fn point() -> SimplicialComplex {
        SimplicialComplex::from_facets(vec!["0".into()], &[vec![0]]).unwrap()
    }

    /// `n` isolated points.
    pub fn discrete(n: usize) -> SimplicialComplex {
        SimplicialComplex::from_facets(Self::numbered(n), &[]).unwrap()
    }

    /// The interval `[0, 1]` as one edge.
    pub fn interval() -> SimplicialComplex {
        SimplicialComplex::path(1)
    }

    /// Interval subdivided into `m` edges.
    pub fn path(m: usize) -> SimplicialComplex {
        let facets: Vec<Vec<usize>> = (0..m).map(|i| vec![i, i + 1]).collect();
        SimplicialComplex::from_facets(Self::numbered(m + 1), &facets).unwrap()
    }

    /// Circle on `n ≥ 3` vertices with edges ordered `(i, i+1 mod n)`.
    pub fn circle(n: usize) -> Result<SimplicialComplex> {
        if n < 3 {
            return Err(Error::Precondition(format!("a simplicial circle needs 3 vertices, got {n}")));
        }
        let facets: Vec<Vec<usize>> = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
        SimplicialComplex::from_facets(Self::numbered(n), &facets)
    }

    /// Standard `d`-simplex.
    pub fn simplex(d: usize) -> SimplicialComplex {
        SimplicialComplex::from_facets(Self::numbered(d + 1), &[(0..=d).collect()]).unwrap()
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertex_names
    }

    pub fn simplices(&self) -> &[Vec<usize>] {
        &self.simplices
    }

    pub fn dimension(&self) -> usize {
        self.simplices.iter().map(|s| s.len() - 1).max().unwrap_or(0)
    }

    pub fn simplex_name(&self, s: &[usize]) -> String {
        s.iter().map(|v| self.vertex_names[*v].as_str()).collect::<Vec<_>>().join("-")
    }

    pub fn face_poset(&self) -> Arc<FacePoset> {
        Arc::new(FacePoset::from_complex(self))
    }

    /// Subdivides every edge of a complex of dimension ≤ 1 into `m` edges.
    /// Returns the fine complex and, for each fine simplex, the coarse
    /// simplex containing its interior.
    pub fn subdivide_edges(&self, m: usize) -> Result<(SimplicialComplex, Vec<usize>)> {
        if self.dimension() > 1 || m == 0 {
            return Err(Error::Precondition("edge subdivision needs dimension ≤ 1 and m ≥ 1".into()));
        }
        let mut names = self.vertex_names.clone();
        let mut facets = Vec::new();
        let mut owner_of_facet = Vec::new();
        let coarse_index: HashMap<Vec<usize>, usize> =
            self.simplices.iter().enumerate().map(|(i, s)| (sorted(s), i)).collect();
        let mut new_vertex_owner: HashMap<usize, usize> = HashMap::new();
        for s in &self.simplices {
            if s.len() != 2 {
                continue;
            }
            let ci = coarse_index[&sorted(s)];
            let mut chain = vec![s[0]];
            for k in 1..m {
                let v = names.len();
                names.push(format!("{}.{}.{}", self.vertex_names[s[0]], self.vertex_names[s[1]], k));
                new_vertex_owner.insert(v, ci);
                chain.push(v);
            }
            chain.push(s[1]);
            for w in chain.windows(2) {
                facets.push(vec![w[0], w[1]]);
                owner_of_facet.push(ci);
            }
        }
        for v in 0..self.vertex_names.len() {
            facets.push(vec![v]);
            owner_of_facet.push(coarse_index[&vec![v]]);
        }
        let fine = SimplicialComplex::from_facets(names, &facets)?;
        let facet_owner: HashMap<Vec<usize>, usize> =
            facets.iter().zip(&owner_of_facet).map(|(f, o)| (sorted(f), *o)).collect();
        let map = fine
            .simplices
            .iter()
            .map(|s| {
                if let Some(o) = facet_owner.get(&sorted(s)) {
                    *o
                } else {
                    new_vertex_owner[&s[0]]
                }
            })
            .collect();
        Ok((fine, map))
    }
}

/// Combinatorial data of one stratum.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cell {
    pub dim: usize,
    /// Vertices in local order (global vertex ids of the face poset).
    pub vertices: Vec<usize>,
}

/// Face poset with `s ≤ t` iff `t` is a face of `s`: top cells are minimal,
/// vertices maximal, and `str(s) = {t ≤ s}` is a down-set.
#[derive(Clone)]
pub struct FacePoset {
    poset: Poset,
    cells: Vec<Cell>,
    faces: Vec<Vec<(usize, i64)>>,
    vertex_names: Vec<String>,
    factors: Vec<Arc<FacePoset>>,
    coords: Vec<Vec<usize>>,
    fingerprint: u64,
}

impl fmt::Debug for FacePoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FacePoset{:?}", self.poset.names())
    }
}

impl PartialEq for FacePoset {
    fn eq(&self, other: &Self) -> bool {
        self.fingerprint == other.fingerprint && self.poset == other.poset
    }
}

impl FacePoset {
    pub fn from_complex(k: &SimplicialComplex) -> FacePoset {
        let simp = &k.simplices;
        let n = simp.len();
        let sets: Vec<Vec<usize>> = simp.iter().map(|s| sorted(s)).collect();
        let index: HashMap<&Vec<usize>, usize> = sets.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let le: Vec<Vec<bool>> = (0..n)
            .map(|s| (0..n).map(|t| sets[t].iter().all(|v| sets[s].binary_search(v).is_ok())).collect())
            .collect();
        let names = simp.iter().map(|s| k.simplex_name(s)).collect();
        let faces = simp
            .iter()
            .map(|s| {
                if s.len() < 2 {
                    return Vec::new();
                }
                (0..s.len())
                    .map(|i| {
                        let induced: Vec<usize> =
                            s.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| *v).collect();
                        let t = index[&sorted(&induced)];
                        let sign = if i % 2 == 0 { 1 } else { -1 };
                        (t, sign * perm_sign(&induced, &simp[t]))
                    })
                    .collect()
            })
            .collect();
        let cells = simp.iter().map(|s| Cell { dim: s.len() - 1, vertices: s.clone() }).collect();
        FacePoset::assemble(Poset::from_matrix(names, le), cells, faces, k.vertex_names.clone(), Vec::new(), Vec::new())
    }

    /// Regular cell poset from explicit data: names, dimensions, codimension-one
    /// faces with incidence numbers, and vertex sets.
    pub fn from_cells(
        names: Vec<String>,
        cells: Vec<Cell>,
        faces: Vec<Vec<(usize, i64)>>,
        vertex_names: Vec<String>,
    ) -> Result<FacePoset> {
        let rels: Vec<(usize, usize)> =
            faces.iter().enumerate().flat_map(|(s, fs)| fs.iter().map(move |(t, _)| (s, *t))).collect();
        let poset = Poset::from_relations(names, &rels)?;
        Ok(FacePoset::assemble(poset, cells, faces, vertex_names, Vec::new(), Vec::new()))
    }

    fn assemble(
        poset: Poset,
        cells: Vec<Cell>,
        faces: Vec<Vec<(usize, i64)>>,
        vertex_names: Vec<String>,
        factors: Vec<Arc<FacePoset>>,
        coords: Vec<Vec<usize>>,
    ) -> FacePoset {
        let mut h = DefaultHasher::new();
        poset.names().hash(&mut h);
        for s in 0..poset.len() {
            poset.above(s).hash(&mut h);
        }
        cells.hash(&mut h);
        faces.hash(&mut h);
        FacePoset { poset, cells, faces, vertex_names, factors, coords, fingerprint: h.finish() }
    }

    /// Product of face posets with componentwise order. Products are
    /// flattened, so the product is associative on the nose.
    pub fn product(parts: &[Arc<FacePoset>]) -> Arc<FacePoset> {
        let mut factors: Vec<Arc<FacePoset>> = Vec::new();
        for p in parts {
            if p.is_product() {
                factors.extend(p.factors.iter().cloned());
            } else {
                factors.push(p.clone());
            }
        }
        if factors.len() == 1 {
            return factors[0].clone();
        }
        let sizes: Vec<usize> = factors.iter().map(|f| f.len()).collect();
        let total: usize = sizes.iter().product();
        let mut coords = Vec::with_capacity(total);
        for mut idx in 0..total {
            let mut c = vec![0; sizes.len()];
            for i in (0..sizes.len()).rev() {
                c[i] = idx % sizes[i];
                idx /= sizes[i];
            }
            coords.push(c);
        }
        let voff: Vec<usize> = crate::matrix::offsets(&factors.iter().map(|f| f.vertex_names.len()).collect::<Vec<_>>());
        let mut vertex_names = Vec::new();
        for (i, f) in factors.iter().enumerate() {
            for v in &f.vertex_names {
                vertex_names.push(format!("{v}@{i}"));
            }
        }
        let strides: Vec<usize> = (0..sizes.len()).map(|i| sizes[i + 1..].iter().product()).collect();
        let names: Vec<String> = coords
            .iter()
            .map(|c| {
                let parts: Vec<&str> = c.iter().enumerate().map(|(i, x)| factors[i].name(*x)).collect();
                format!("({})", parts.join("|"))
            })
            .collect();
        let le: Vec<Vec<bool>> = (0..total)
            .map(|a| {
                (0..total)
                    .map(|b| (0..sizes.len()).all(|i| factors[i].poset.le(coords[a][i], coords[b][i])))
                    .collect()
            })
            .collect();
        let mut cells = Vec::with_capacity(total);
        let mut faces = Vec::with_capacity(total);
        for c in &coords {
            let mut dim = 0;
            let mut verts = Vec::new();
            let mut fs = Vec::new();
            for i in 0..sizes.len() {
                let cell = &factors[i].cells[c[i]];
                let sign = if dim % 2 == 0 { 1 } else { -1 };
                for (t, inc) in &factors[i].faces[c[i]] {
                    let idx: usize = (0..sizes.len())
                        .map(|j| if j == i { *t * strides[j] } else { c[j] * strides[j] })
                        .sum();
                    fs.push((idx, sign * inc));
                }
                dim += cell.dim;
                verts.extend(cell.vertices.iter().map(|v| v + voff[i]));
            }
            cells.push(Cell { dim, vertices: verts });
            faces.push(fs);
        }
        Arc::new(FacePoset::assemble(Poset::from_matrix(names, le), cells, faces, vertex_names, factors, coords))
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }
    pub fn len(&self) -> usize {
        self.poset.len()
    }
    pub fn is_empty(&self) -> bool {
        self.poset.is_empty()
    }
    pub fn name(&self, s: usize) -> &str {
        self.poset.name(s)
    }
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.poset.index_of(name)
    }
    pub fn le(&self, s: usize, t: usize) -> bool {
        self.poset.le(s, t)
    }
    pub fn cell(&self, s: usize) -> &Cell {
        &self.cells[s]
    }
    pub fn dim(&self, s: usize) -> usize {
        self.cells[s].dim
    }
    /// Codimension-one faces `t` of `s` (so `s ⋖ t`) with incidence `[s : t]`.
    pub fn faces(&self, s: usize) -> &[(usize, i64)] {
        &self.faces[s]
    }
    pub fn vertex_names(&self) -> &[String] {
        &self.vertex_names
    }
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }
    pub fn is_product(&self) -> bool {
        !self.factors.is_empty()
    }

    /// Factors of a product; a non-product is its own single factor.
    pub fn factor_list(self: &Arc<Self>) -> Vec<Arc<FacePoset>> {
        if self.is_product() {
            self.factors.clone()
        } else {
            vec![self.clone()]
        }
    }

    /// Coordinates of an element in the factor list.
    pub fn coords(&self, s: usize) -> Vec<usize> {
        if self.is_product() {
            self.coords[s].clone()
        } else {
            vec![s]
        }
    }

    /// Element with given factor coordinates.
    pub fn element(&self, c: &[usize]) -> usize {
        if !self.is_product() {
            return c[0];
        }
        let mut idx = 0;
        for (i, f) in self.factors.iter().enumerate() {
            idx = idx * f.len() + c[i];
        }
        idx
    }

    /// Open star `str(s) = {t ≤ s}`.
    pub fn star(&self, s: usize) -> Vec<usize> {
        self.poset.down_set(s)
    }

    /// Closure of `s`: the up-set `{t ≥ s}`.
    pub fn closure(&self, s: usize) -> Vec<usize> {
        self.poset.up_set(s)
    }

    pub fn classify(&self, set: &[usize]) -> SubsetKind {
        self.poset.classify(set)
    }

    /// Vertices of the link of `s`: vertices of cofaces not in `s`.
    pub fn link_vertices(&self, s: usize) -> Vec<usize> {
        let own = &self.cells[s].vertices;
        let mut out: Vec<usize> = Vec::new();
        for &t in self.poset.below(s) {
            for v in &self.cells[t].vertices {
                if !own.contains(v) && !out.contains(v) {
                    out.push(*v);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Induced face poset on a subset (faces outside the subset dropped).
    pub fn induced(&self, set: &[usize]) -> (Arc<FacePoset>, Vec<usize>) {
        let pos: HashMap<usize, usize> = set.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let poset = self.poset.induced(set);
        let cells = set.iter().map(|s| self.cells[*s].clone()).collect();
        let faces = set
            .iter()
            .map(|s| self.faces[*s].iter().filter_map(|(t, c)| pos.get(t).map(|i| (*i, *c))).collect())
            .collect();
        let fp = FacePoset::assemble(poset, cells, faces, self.vertex_names.clone(), Vec::new(), Vec::new());
        (Arc::new(fp), set.to_vec())
    }

    /// Elements in a name list; errors on unknown names.
    pub fn parse_set(&self, names: &[&str]) -> Result<Vec<usize>> {
        names
            .iter()
            .map(|n| self.index_of(n).ok_or_else(|| Error::Precondition(format!("unknown element '{n}'"))))
            .collect()
    }

    pub fn same_as(&self, other: &FacePoset) -> bool {
        self == other
    }
}

/// Kind tag carried by a poset map.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapKind {
    General,
    OpenInclusion,
    ClosedInclusion,
    Refinement,
    Projection,
    Diagonal,
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MapKind::General => "general",
            MapKind::OpenInclusion => "open-inclusion",
            MapKind::ClosedInclusion => "closed-inclusion",
            MapKind::Refinement => "refinement",
            MapKind::Projection => "projection",
            MapKind::Diagonal => "diagonal",
        };
        write!(f, "{s}")
    }
}

/// Order-preserving map of face posets.
#[derive(Clone, Debug)]
pub struct PosetMap {
    source: Arc<FacePoset>,
    target: Arc<FacePoset>,
    map: Vec<usize>,
    kind: MapKind,
}

impl PosetMap {
    pub fn new(source: Arc<FacePoset>, target: Arc<FacePoset>, map: Vec<usize>, kind: MapKind) -> Result<PosetMap> {
        if map.len() != source.len() || map.iter().any(|t| *t >= target.len()) {
            return Err(Error::Shape("poset map has the wrong length or range".into()));
        }
        for s in 0..source.len() {
            for &s2 in source.poset().above(s) {
                if !target.le(map[s], map[s2]) {
                    return Err(Error::Precondition(format!(
                        "map is not order-preserving at {} ≤ {}",
                        source.name(s),
                        source.name(s2)
                    )));
                }
            }
        }
        let image: Vec<usize> = {
            let mut im = map.clone();
            im.sort_unstable();
            im.dedup();
            im
        };
        let injective = image.len() == map.len();
        match kind {
            MapKind::OpenInclusion => {
                if !injective || !target.poset().is_down_set(&image) {
                    return Err(Error::NotOpen("image of an open inclusion must be a down-set".into()));
                }
            }
            MapKind::ClosedInclusion => {
                if !injective || !target.poset().is_up_set(&image) {
                    return Err(Error::NotClosed("image of a closed inclusion must be an up-set".into()));
                }
            }
            MapKind::Refinement => {
                if image.len() != target.len() {
                    return Err(Error::Precondition("refinement must be surjective".into()));
                }
                if (0..source.len()).any(|s| source.dim(s) > target.dim(map[s])) {
                    return Err(Error::Precondition("refinement raises dimension".into()));
                }
            }
            _ => {}
        }
        Ok(PosetMap { source, target, map, kind })
    }

    pub fn identity(p: Arc<FacePoset>) -> PosetMap {
        let map = (0..p.len()).collect();
        PosetMap { source: p.clone(), target: p, map, kind: MapKind::General }
    }

    /// Inclusion of a subset as an induced face poset.
    pub fn inclusion(p: &Arc<FacePoset>, set: &[usize], kind: MapKind) -> Result<PosetMap> {
        let (sub, _) = p.induced(set);
        PosetMap::new(sub, p.clone(), set.to_vec(), kind)
    }

    /// Map between products: target factor `j` copies source factor `idx[j]`.
    pub fn coordinate_map(source: &Arc<FacePoset>, target_factors: &[Arc<FacePoset>], idx: &[usize], kind: MapKind) -> Result<PosetMap> {
        let sf = source.factor_list();
        if idx.len() != target_factors.len() {
            return Err(Error::Shape("coordinate map arity".into()));
        }
        for (j, &i) in idx.iter().enumerate() {
            if i >= sf.len() || sf[i] != target_factors[j] {
                return Err(Error::BaseMismatch(format!("factor {j} of the target is not source factor {i}")));
            }
        }
        let target = FacePoset::product(target_factors);
        let map = (0..source.len())
            .map(|s| {
                let c = source.coords(s);
                let tc: Vec<usize> = idx.iter().map(|&i| c[i]).collect();
                target.element(&tc)
            })
            .collect();
        PosetMap::new(source.clone(), target, map, kind)
    }

    /// Projection of a product onto the factors listed in `keep`.
    pub fn projection(source: &Arc<FacePoset>, keep: &[usize]) -> Result<PosetMap> {
        let sf = source.factor_list();
        let tf: Vec<Arc<FacePoset>> = keep.iter().map(|&i| sf[i].clone()).collect();
        PosetMap::coordinate_map(source, &tf, keep, MapKind::Projection)
    }

    /// Product of two maps `f × g`.
    pub fn product(f: &PosetMap, g: &PosetMap, kind: MapKind) -> Result<PosetMap> {
        let source = FacePoset::product(&[f.source.clone(), g.source.clone()]);
        let target = FacePoset::product(&[f.target.clone(), g.target.clone()]);
        let nf = f.source.factor_list().len();
        let ntf = f.target.factor_list().len();
        let map = (0..source.len())
            .map(|s| {
                let c = source.coords(s);
                let a = f.map[f.source.element(&c[..nf])];
                let b = g.map[g.source.element(&c[nf..])];
                let mut tc = f.target.coords(a);
                tc.extend(g.target.coords(b));
                debug_assert_eq!(tc.len(), ntf + g.target.factor_list().len());
                target.element(&tc)
            })
            .collect();
        PosetMap::new(source, target, map, kind)
    }

    pub fn compose(g: &PosetMap, f: &PosetMap, kind: MapKind) -> Result<PosetMap> {
        if f.target != g.source {
            return Err(Error::BaseMismatch("composable maps".into()));
        }
        let map = f.map.iter().map(|s| g.map[*s]).collect();
        PosetMap::new(f.source.clone(), g.target.clone(), map, kind)
    }

    pub fn source(&self) -> &Arc<FacePoset> {
        &self.source
    }
    pub fn target(&self) -> &Arc<FacePoset> {
        &self.target
    }
    pub fn kind(&self) -> MapKind {
        self.kind
    }
    pub fn apply(&self, s: usize) -> usize {
        self.map[s]
    }
    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    /// Preimage of a set of target elements.
    pub fn preimage(&self, set: &[usize]) -> Vec<usize> {
        let m = self.target.poset().mask(set);
        (0..self.source.len()).filter(|&s| m[self.map[s]]).collect()
    }

    pub fn require(&self, kind: MapKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::KindMismatch { expected: kind.to_string(), got: self.kind.to_string() });
        }
        Ok(())
    }
}

/// Staircase triangulation `R` of `|K| × |K|` with `q: R → S×S` and the diagonal.
#[derive(Clone, Debug)]
pub struct Staircase {
    pub base: Arc<FacePoset>,
    pub product: Arc<FacePoset>,
    pub complex: SimplicialComplex,
    pub poset: Arc<FacePoset>,
    pub q: PosetMap,
    /// Diagonal embedding `S → R`.
    pub diagonal: PosetMap,
}

impl Staircase {
    pub fn new(k: &SimplicialComplex) -> Result<Staircase> {
        let base = k.face_poset();
        let product = FacePoset::product(&[base.clone(), base.clone()]);
        let nv = k.vertex_names.len();
        let names: Vec<String> = (0..nv * nv)
            .map(|i| format!("({}|{})", k.vertex_names[i / nv], k.vertex_names[i % nv]))
            .collect();
        let simp = &k.simplices;
        let mut facets: Vec<Vec<usize>> = Vec::new();
        let mut owner: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut diag_of: Vec<Vec<usize>> = vec![Vec::new(); simp.len()];
        for (a, sa) in simp.iter().enumerate() {
            for (b, sb) in simp.iter().enumerate() {
                let cell = product.element(&[a, b]);
                let (p, q) = (sa.len() - 1, sb.len() - 1);
                let mut paths = Vec::new();
                lattice_paths(p, q, &mut vec![(0, 0)], &mut paths);
                for path in paths {
                    let s: Vec<usize> = path.iter().map(|&(i, j)| sa[i] * nv + sb[j]).collect();
                    owner.insert(sorted(&s), cell);
                    if a == b && path.iter().all(|(i, j)| i == j) {
                        diag_of[a] = s.clone();
                    }
                    facets.push(s);
                }
            }
        }
        let complex = SimplicialComplex::from_facets(names, &facets)?;
        let poset = complex.face_poset();
        let qmap: Vec<usize> = complex.simplices.iter().map(|s| owner[&sorted(s)]).collect();
        let q = PosetMap::new(poset.clone(), product.clone(), qmap, MapKind::Refinement)?;
        let rindex: HashMap<Vec<usize>, usize> =
            complex.simplices.iter().enumerate().map(|(i, s)| (sorted(s), i)).collect();
        let dmap: Vec<usize> = diag_of.iter().map(|s| rindex[&sorted(s)]).collect();
        let diagonal = PosetMap::new(base.clone(), poset.clone(), dmap, MapKind::Diagonal)?;
        Ok(Staircase { base, product, complex, poset, q, diagonal })
    }

    /// Elements of `R` on the diagonal.
    pub fn diagonal_elements(&self) -> Vec<usize> {
        let mut d = self.diagonal.as_slice().to_vec();
        d.sort_unstable();
        d
    }
}

/// Lattice paths from (0,0) to (p,q) with unit steps right, up or diagonal.
fn lattice_paths(p: usize, q: usize, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
    let (i, j) = *cur.last().unwrap();
    if i == p && j == q {
        out.push(cur.clone());
        return;
    }
    for (di, dj) in [(1, 0), (0, 1), (1, 1)] {
        if i + di <= p && j + dj <= q {
            cur.push((i + di, j + dj));
            lattice_paths(p, q, cur, out);
            cur.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_poset() {
        let s = SimplicialComplex::interval().face_poset();
        assert_eq!(s.len(), 3);
        let e = s.index_of("0-1").unwrap();
        let v0 = s.index_of("0").unwrap();
        assert!(s.le(e, v0));
        assert_eq!(s.star(e), vec![e]);
        assert_eq!(s.faces(e).len(), 2);
    }

    #[test]
    fn staircase_of_interval() {
        let st = Staircase::new(&SimplicialComplex::interval()).unwrap();
        assert_eq!(st.poset.len(), 11);
        let tops: Vec<usize> = (0..st.poset.len()).filter(|&r| st.poset.dim(r) == 2).collect();
        assert_eq!(tops.len(), 2);
        let e = st.base.index_of("0-1").unwrap();
        let ee = st.product.element(&[e, e]);
        assert!(tops.iter().all(|&t| st.q.apply(t) == ee));
    }

    #[test]
    fn circle_rejects_small() {
        assert!(SimplicialComplex::circle(2).is_err());
    }
}
