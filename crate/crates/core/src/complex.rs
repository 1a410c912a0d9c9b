//! Bounded cochain complexes, chain maps, cones, Hom and tensor complexes.
//!
//! Grading is cohomological with `d` of degree +1. The shift is
//! `C[n]^i = C^{i+n}` with `d_{C[n]} = (-1)^n d_C`; the cone of `f: A → B` is
//! `B^n ⊕ A^{n+1}` with `d(b, a) = (d b + f a, -d a)`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::{Matrix, Reducer, SVec};

/// Graded dimension table, zero entries omitted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct Graded(pub BTreeMap<i32, usize>);

impl Graded {
    pub fn new() -> Self {
        Graded(BTreeMap::new())
    }

    pub fn from_pairs(pairs: &[(i32, usize)]) -> Self {
        let mut g = Graded::new();
        for (d, n) in pairs {
            g.add(*d, *n);
        }
        g
    }

    pub fn add(&mut self, deg: i32, n: usize) {
        if n > 0 {
            *self.0.entry(deg).or_insert(0) += n;
        }
    }

    pub fn get(&self, deg: i32) -> usize {
        self.0.get(&deg).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> usize {
        self.0.values().sum()
    }

    /// Degreewise linear dual: degree `n` goes to `-n`.
    pub fn dual(&self) -> Graded {
        Graded(self.0.iter().map(|(d, n)| (-d, *n)).collect())
    }

    pub fn shift(&self, n: i32) -> Graded {
        Graded(self.0.iter().map(|(d, k)| (d - n, *k)).collect())
    }

    pub fn tensor(&self, other: &Graded) -> Graded {
        let mut g = Graded::new();
        for (a, x) in &self.0 {
            for (b, y) in &other.0 {
                g.add(a + b, x * y);
            }
        }
        g
    }

    pub fn sum(&self, other: &Graded) -> Graded {
        let mut g = self.clone();
        for (d, n) in &other.0 {
            g.add(*d, *n);
        }
        g
    }
}

impl fmt::Display for Graded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.0.iter().map(|(d, n)| format!("{d}:{n}")).collect();
        write!(f, "{}", parts.join(" "))
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Complex {
    field: Field,
    lo: i32,
    dims: Vec<usize>,
    diffs: Vec<Matrix>,
}

impl fmt::Debug for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Complex(lo={}, dims={:?})", self.lo, self.dims)
    }
}

impl Complex {
    pub fn zero(field: Field) -> Complex {
        Complex { field, lo: 0, dims: Vec::new(), diffs: Vec::new() }
    }

    /// The field itself in degree 0.
    pub fn unit(field: Field) -> Complex {
        Complex::concentrated(field, 0, 1)
    }

    pub fn concentrated(field: Field, deg: i32, dim: usize) -> Complex {
        Complex::from_parts(field, deg, vec![dim], Vec::new())
    }

    /// Validated constructor. `diffs[i]` maps degree `lo + i` to `lo + i + 1`.
    pub fn new(field: Field, lo: i32, dims: Vec<usize>, diffs: Vec<Matrix>) -> Result<Complex> {
        if diffs.len() != dims.len().saturating_sub(1) {
            return Err(Error::Shape(format!(
                "{} differentials for {} degrees",
                diffs.len(),
                dims.len()
            )));
        }
        for (i, d) in diffs.iter().enumerate() {
            if d.rows() != dims[i + 1] || d.cols() != dims[i] {
                return Err(Error::Shape(format!(
                    "differential in degree {} is {}x{}, expected {}x{}",
                    lo + i as i32,
                    d.rows(),
                    d.cols(),
                    dims[i + 1],
                    dims[i]
                )));
            }
        }
        for i in 0..diffs.len().saturating_sub(1) {
            if !diffs[i + 1].mul(&diffs[i]).is_zero() {
                let n = lo + i as i32;
                return Err(Error::NotAComplex(n, n + 2));
            }
        }
        Ok(Complex::from_parts(field, lo, dims, diffs))
    }

    /// Unchecked constructor that trims zero end degrees.
    pub fn from_parts(field: Field, lo: i32, mut dims: Vec<usize>, mut diffs: Vec<Matrix>) -> Complex {
        let mut lo = lo;
        while dims.last() == Some(&0) {
            dims.pop();
            diffs.pop();
        }
        let lead = dims.iter().take_while(|d| **d == 0).count();
        if lead == dims.len() {
            return Complex::zero(field);
        }
        if lead > 0 {
            dims.drain(..lead);
            diffs.drain(..lead.min(diffs.len()));
            lo += lead as i32;
        }
        Complex { field, lo, dims, diffs }
    }

    /// Builds from per-degree dimensions and differentials over `lo..=hi`.
    pub fn build(
        field: Field,
        lo: i32,
        hi: i32,
        dim: impl Fn(i32) -> usize,
        d: impl FnMut(i32) -> Matrix,
    ) -> Complex {
        if hi < lo {
            return Complex::zero(field);
        }
        let dims: Vec<usize> = (lo..=hi).map(&dim).collect();
        let diffs: Vec<Matrix> = (lo..hi).map(d).collect();
        Complex::from_parts(field, lo, dims, diffs)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.dims.is_empty()
    }

    /// Lowest degree with nonzero dimension (0 for the zero complex).
    pub fn lo(&self) -> i32 {
        self.lo
    }

    /// Highest degree with nonzero dimension (`lo - 1` for the zero complex).
    pub fn hi(&self) -> i32 {
        self.lo + self.dims.len() as i32 - 1
    }

    pub fn dim(&self, n: i32) -> usize {
        let i = n - self.lo;
        if i < 0 || i as usize >= self.dims.len() {
            0
        } else {
            self.dims[i as usize]
        }
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn dims(&self) -> Graded {
        let mut g = Graded::new();
        for (i, d) in self.dims.iter().enumerate() {
            g.add(self.lo + i as i32, *d);
        }
        g
    }

    /// Differential `C^n → C^{n+1}`.
    pub fn d(&self, n: i32) -> Matrix {
        match self.d_ref(n) {
            Some(m) => m.clone(),
            None => Matrix::zeros(self.field, self.dim(n + 1), self.dim(n)),
        }
    }

    pub fn d_ref(&self, n: i32) -> Option<&Matrix> {
        let i = n - self.lo;
        if i < 0 || i as usize >= self.diffs.len() {
            None
        } else {
            Some(&self.diffs[i as usize])
        }
    }

    pub fn shift(&self, n: i32) -> Complex {
        let s = self.field.sign(n as i64);
        Complex {
            field: self.field,
            lo: self.lo - n,
            dims: self.dims.clone(),
            diffs: self.diffs.iter().map(|d| d.scale(&s)).collect(),
        }
    }

    pub fn direct_sum(field: Field, parts: &[&Complex]) -> Complex {
        let live: Vec<&&Complex> = parts.iter().filter(|c| !c.is_zero()).collect();
        if live.is_empty() {
            return Complex::zero(field);
        }
        let lo = live.iter().map(|c| c.lo()).min().unwrap();
        let hi = live.iter().map(|c| c.hi()).max().unwrap();
        Complex::build(
            field,
            lo,
            hi,
            |n| live.iter().map(|c| c.dim(n)).sum(),
            |n| {
                let ds: Vec<Matrix> = live.iter().map(|c| c.d(n)).collect();
                let refs: Vec<&Matrix> = ds.iter().collect();
                Matrix::block_diag(field, &refs)
            },
        )
    }

    pub fn cohomology(&self) -> Graded {
        let mut g = Graded::new();
        let ranks: Vec<usize> = self.diffs.iter().map(|d| d.rank()).collect();
        for (i, dim) in self.dims.iter().enumerate() {
            let out = if i < ranks.len() { ranks[i] } else { 0 };
            let inc = if i > 0 { ranks[i - 1] } else { 0 };
            g.add(self.lo + i as i32, dim - out - inc);
        }
        g
    }

    pub fn is_acyclic(&self) -> bool {
        self.cohomology().is_zero()
    }

    /// Cocycles in degree `n` whose classes form a basis of `H^n`.
    pub fn cohomology_basis(&self, n: i32) -> Vec<SVec> {
        let z = self.d(n).kernel_basis();
        let mut red = Reducer::new(self.field, false);
        for col in self.d(n - 1).columns() {
            red.insert(col.clone(), Vec::new());
        }
        let mut out = Vec::new();
        for v in z {
            let (r, _) = red.insert(v.clone(), Vec::new());
            if !r.is_empty() {
                out.push(v);
            }
        }
        out
    }

    /// Internal Hom complex: `Hom^n = ⊕_i Hom(C^i, D^{i+n})` with
    /// `dφ = d_D φ - (-1)^n φ d_C`. Blocks are vectorized column-major.
    pub fn hom(c: &Complex, d: &Complex) -> Complex {
        let field = c.field;
        if c.is_zero() || d.is_zero() {
            return Complex::zero(field);
        }
        let lo = d.lo() - c.hi();
        let hi = d.hi() - c.lo();
        Complex::build(
            field,
            lo,
            hi,
            |n| HomLayout::new(c, d, n).total,
            |n| {
                let src = HomLayout::new(c, d, n);
                let tgt = HomLayout::new(c, d, n + 1);
                let sgn = field.neg(&field.sign(n as i64));
                let mut blocks = Vec::new();
                for (bi, &(i, _, _)) in tgt.blocks.iter().enumerate() {
                    if let Some(bs) = src.block_of(i) {
                        let m = Matrix::identity(field, c.dim(i)).kron(&d.d(i + n));
                        blocks.push((bi, bs, m));
                    }
                    if let Some(bs) = src.block_of(i + 1) {
                        let m = c.d(i).transpose().kron(&Matrix::identity(field, d.dim(i + 1 + n)));
                        blocks.push((bi, bs, m.scale(&sgn)));
                    }
                }
                Matrix::from_blocks(field, &tgt.sizes(), &src.sizes(), blocks)
            },
        )
    }

    /// Tensor product with `d(x⊗y) = dx⊗y + (-1)^{|x|} x⊗dy`.
    pub fn tensor(c: &Complex, d: &Complex) -> Complex {
        let field = c.field;
        if c.is_zero() || d.is_zero() {
            return Complex::zero(field);
        }
        Complex::build(
            field,
            c.lo() + d.lo(),
            c.hi() + d.hi(),
            |n| TensorLayout::new(c, d, n).total,
            |n| {
                let src = TensorLayout::new(c, d, n);
                let tgt = TensorLayout::new(c, d, n + 1);
                let mut blocks = Vec::new();
                for (bs, &(i, _)) in src.blocks.iter().enumerate() {
                    if let Some(bt) = tgt.block_of(i + 1) {
                        let m = c.d(i).kron(&Matrix::identity(field, d.dim(n - i)));
                        blocks.push((bt, bs, m));
                    }
                    if let Some(bt) = tgt.block_of(i) {
                        let m = Matrix::identity(field, c.dim(i)).kron(&d.d(n - i));
                        blocks.push((bt, bs, m.scale(&field.sign(i as i64))));
                    }
                }
                Matrix::from_blocks(field, &tgt.sizes(), &src.sizes(), blocks)
            },
        )
    }

    /// Linear dual `Hom(C, k)`.
    pub fn dual(&self) -> Complex {
        Complex::hom(self, &Complex::unit(self.field))
    }

    /// Mapping cone of `f: A → B`.
    pub fn cone(f: &ChainMap) -> Complex {
        let (a, b) = (f.source(), f.target());
        let field = a.field;
        let lo = b.lo().min(a.lo() - 1);
        let hi = b.hi().max(a.hi() - 1);
        if a.is_zero() && b.is_zero() {
            return Complex::zero(field);
        }
        Complex::build(
            field,
            lo,
            hi,
            |n| b.dim(n) + a.dim(n + 1),
            |n| {
                Matrix::from_blocks(
                    field,
                    &[b.dim(n + 1), a.dim(n + 2)],
                    &[b.dim(n), a.dim(n + 1)],
                    vec![(0, 0, b.d(n)), (0, 1, f.comp(n + 1)), (1, 1, a.d(n + 1).neg())],
                )
            },
        )
    }

    /// Fiber `cone(f)[-1]`.
    pub fn fiber(f: &ChainMap) -> Complex {
        Complex::cone(f).shift(-1)
    }
}

/// Block layout of `Hom^n(C, D)`: entries `(i, rows = dim D^{i+n}, cols = dim C^i)`.
pub struct HomLayout {
    pub blocks: Vec<(i32, usize, usize)>,
    pub offsets: Vec<usize>,
    pub total: usize,
}

impl HomLayout {
    pub fn new(c: &Complex, d: &Complex, n: i32) -> HomLayout {
        let mut blocks = Vec::new();
        if !c.is_zero() {
            for i in c.lo()..=c.hi() {
                let (r, k) = (d.dim(i + n), c.dim(i));
                if r > 0 && k > 0 {
                    blocks.push((i, r, k));
                }
            }
        }
        let sizes: Vec<usize> = blocks.iter().map(|(_, r, k)| r * k).collect();
        let offsets = crate::matrix::offsets(&sizes);
        let total = *offsets.last().unwrap();
        HomLayout { blocks, offsets, total }
    }

    pub fn block_of(&self, i: i32) -> Option<usize> {
        self.blocks.iter().position(|b| b.0 == i)
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|(_, r, k)| r * k).collect()
    }

    /// Vector index of the matrix entry `(row, col)` of the block for `C^i`.
    pub fn index(&self, i: i32, row: usize, col: usize) -> Option<usize> {
        let b = self.block_of(i)?;
        let (_, rows, _) = self.blocks[b];
        Some(self.offsets[b] + col * rows + row)
    }
}

/// Block layout of `(C⊗D)^n`: entries `(i, dim C^i * dim D^{n-i})`.
pub struct TensorLayout {
    pub blocks: Vec<(i32, usize)>,
    pub offsets: Vec<usize>,
    pub total: usize,
}

impl TensorLayout {
    pub fn new(c: &Complex, d: &Complex, n: i32) -> TensorLayout {
        let mut blocks = Vec::new();
        if !c.is_zero() {
            for i in c.lo()..=c.hi() {
                let s = c.dim(i) * d.dim(n - i);
                if s > 0 {
                    blocks.push((i, s));
                }
            }
        }
        let sizes: Vec<usize> = blocks.iter().map(|b| b.1).collect();
        let offsets = crate::matrix::offsets(&sizes);
        let total = *offsets.last().unwrap();
        TensorLayout { blocks, offsets, total }
    }

    pub fn block_of(&self, i: i32) -> Option<usize> {
        self.blocks.iter().position(|b| b.0 == i)
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.1).collect()
    }
}

/// Degree-0 chain map between complexes.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ChainMap {
    source: Arc<Complex>,
    target: Arc<Complex>,
    comps: BTreeMap<i32, Matrix>,
}

impl fmt::Debug for ChainMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ChainMap({:?} -> {:?}, {:?})", self.source, self.target, self.comps)
    }
}

impl ChainMap {
    /// Validated constructor; components outside the map are zero.
    pub fn new(source: Arc<Complex>, target: Arc<Complex>, comps: BTreeMap<i32, Matrix>) -> Result<ChainMap> {
        for (n, m) in &comps {
            if m.rows() != target.dim(*n) || m.cols() != source.dim(*n) {
                return Err(Error::Shape(format!("chain map component in degree {n}")));
            }
        }
        let f = ChainMap::from_parts(source, target, comps);
        f.check()?;
        Ok(f)
    }

    pub fn from_parts(source: Arc<Complex>, target: Arc<Complex>, comps: BTreeMap<i32, Matrix>) -> ChainMap {
        let comps = comps
            .into_iter()
            .filter(|(n, m)| !m.is_zero() && source.dim(*n) > 0 && target.dim(*n) > 0)
            .collect();
        ChainMap { source, target, comps }
    }

    /// Builds from a component function over the overlapping degree range.
    pub fn build(source: Arc<Complex>, target: Arc<Complex>, mut comp: impl FnMut(i32) -> Matrix) -> ChainMap {
        let mut comps = BTreeMap::new();
        if !source.is_zero() && !target.is_zero() {
            for n in source.lo().max(target.lo())..=source.hi().min(target.hi()) {
                comps.insert(n, comp(n));
            }
        }
        ChainMap::from_parts(source, target, comps)
    }

    pub fn check(&self) -> Result<()> {
        let (s, t) = (&self.source, &self.target);
        if s.is_zero() || t.is_zero() {
            return Ok(());
        }
        for n in (s.lo() - 1).min(t.lo() - 1)..=s.hi().max(t.hi()) {
            let lhs = t.d(n).mul(&self.comp(n));
            let rhs = self.comp(n + 1).mul(&s.d(n));
            if lhs != rhs {
                return Err(Error::NotAChainMap(n));
            }
        }
        Ok(())
    }

    pub fn identity(c: Arc<Complex>) -> ChainMap {
        let f = c.field();
        ChainMap::build(c.clone(), c.clone(), |n| Matrix::identity(f, c.dim(n)))
    }

    pub fn zero(source: Arc<Complex>, target: Arc<Complex>) -> ChainMap {
        ChainMap { source, target, comps: BTreeMap::new() }
    }

    pub fn source(&self) -> &Arc<Complex> {
        &self.source
    }
    pub fn target(&self) -> &Arc<Complex> {
        &self.target
    }
    pub fn components(&self) -> &BTreeMap<i32, Matrix> {
        &self.comps
    }

    pub fn comp(&self, n: i32) -> Matrix {
        match self.comps.get(&n) {
            Some(m) => m.clone(),
            None => Matrix::zeros(self.source.field(), self.target.dim(n), self.source.dim(n)),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    /// `self ∘ g`.
    pub fn after(&self, g: &ChainMap) -> ChainMap {
        let mut comps = BTreeMap::new();
        for (n, m) in &self.comps {
            if let Some(gm) = g.comps.get(n) {
                comps.insert(*n, m.mul(gm));
            }
        }
        ChainMap::from_parts(g.source.clone(), self.target.clone(), comps)
    }

    pub fn add(&self, g: &ChainMap) -> ChainMap {
        let mut comps = self.comps.clone();
        for (n, m) in &g.comps {
            let v = match comps.get(n) {
                Some(x) => x.add(m),
                None => m.clone(),
            };
            comps.insert(*n, v);
        }
        ChainMap::from_parts(self.source.clone(), self.target.clone(), comps)
    }

    pub fn scale(&self, a: &crate::field::Scalar) -> ChainMap {
        let comps = self.comps.iter().map(|(n, m)| (*n, m.scale(a))).collect();
        ChainMap::from_parts(self.source.clone(), self.target.clone(), comps)
    }

    pub fn is_quasi_iso(&self) -> bool {
        Complex::cone(self).is_acyclic()
    }

    /// `f[n]: A[n] → B[n]`.
    pub fn shift(&self, n: i32) -> ChainMap {
        let comps = self.comps.iter().map(|(d, m)| (d - n, m.clone())).collect();
        ChainMap::from_parts(Arc::new(self.source.shift(n)), Arc::new(self.target.shift(n)), comps)
    }

    /// `f ⊗ g` on tensor complexes.
    pub fn tensor(f: &ChainMap, g: &ChainMap) -> ChainMap {
        let (a, b) = (f.source(), g.source());
        let (a2, b2) = (f.target(), g.target());
        let src = Arc::new(Complex::tensor(a, b));
        let tgt = Arc::new(Complex::tensor(a2, b2));
        let field = a.field();
        ChainMap::build(src, tgt, |n| {
            let sl = TensorLayout::new(a, b, n);
            let tl = TensorLayout::new(a2, b2, n);
            let mut blocks = Vec::new();
            for (bs, &(i, _)) in sl.blocks.iter().enumerate() {
                if let Some(bt) = tl.block_of(i) {
                    blocks.push((bt, bs, f.comp(i).kron(&g.comp(n - i))));
                }
            }
            Matrix::from_blocks(field, &tl.sizes(), &sl.sizes(), blocks)
        })
    }

    /// Post-composition `Hom(C, D) → Hom(C, D')` by `self: D → D'`.
    pub fn hom_post(c: &Arc<Complex>, g: &ChainMap) -> ChainMap {
        let src = Arc::new(Complex::hom(c, g.source()));
        let tgt = Arc::new(Complex::hom(c, g.target()));
        ChainMap::build(src, tgt, |n| ChainMap::hom_post_matrix(c, g, n))
    }

    /// Degree-`n` matrix of post-composition by `g`.
    pub fn hom_post_matrix(c: &Complex, g: &ChainMap, n: i32) -> Matrix {
        let (d, d2) = (g.source(), g.target());
        let field = c.field();
        let sl = HomLayout::new(c, d, n);
        let tl = HomLayout::new(c, d2, n);
        let mut blocks = Vec::new();
        for (bs, &(i, _, _)) in sl.blocks.iter().enumerate() {
            if let Some(bt) = tl.block_of(i) {
                blocks.push((bt, bs, Matrix::identity(field, c.dim(i)).kron(&g.comp(i + n))));
            }
        }
        Matrix::from_blocks(field, &tl.sizes(), &sl.sizes(), blocks)
    }

    /// Pre-composition `Hom(C, D) → Hom(C', D)` by `f: C' → C`.
    pub fn hom_pre(f: &ChainMap, d: &Arc<Complex>) -> ChainMap {
        let src = Arc::new(Complex::hom(f.target(), d));
        let tgt = Arc::new(Complex::hom(f.source(), d));
        ChainMap::build(src, tgt, |n| ChainMap::hom_pre_matrix(f, d, n))
    }

    /// Degree-`n` matrix of pre-composition by `f`.
    pub fn hom_pre_matrix(f: &ChainMap, d: &Complex, n: i32) -> Matrix {
        let (c2, c) = (f.source(), f.target());
        let field = d.field();
        let sl = HomLayout::new(c, d, n);
        let tl = HomLayout::new(c2, d, n);
        let mut blocks = Vec::new();
        for (bs, &(i, _, _)) in sl.blocks.iter().enumerate() {
            if let Some(bt) = tl.block_of(i) {
                let m = f.comp(i).transpose().kron(&Matrix::identity(field, d.dim(i + n)));
                blocks.push((bt, bs, m));
            }
        }
        Matrix::from_blocks(field, &tl.sizes(), &sl.sizes(), blocks)
    }

    /// Linear dual `f^∨: B^∨ → A^∨`.
    pub fn dual(&self) -> ChainMap {
        ChainMap::hom_pre(self, &Arc::new(Complex::unit(self.source.field())))
    }

    /// Inclusion `B → cone(f)`.
    pub fn cone_inclusion(f: &ChainMap) -> ChainMap {
        let b = f.target().clone();
        let a = f.source().clone();
        let cone = Arc::new(Complex::cone(f));
        let field = b.field();
        ChainMap::build(b.clone(), cone, |n| {
            Matrix::from_blocks(
                field,
                &[b.dim(n), a.dim(n + 1)],
                &[b.dim(n)],
                vec![(0, 0, Matrix::identity(field, b.dim(n)))],
            )
        })
    }

    /// Projection `fib(f) → A`.
    pub fn fiber_projection(f: &ChainMap) -> ChainMap {
        let b = f.target().clone();
        let a = f.source().clone();
        let fib = Arc::new(Complex::fiber(f));
        let field = b.field();
        ChainMap::build(fib, a.clone(), |n| {
            Matrix::from_blocks(
                field,
                &[a.dim(n)],
                &[b.dim(n - 1), a.dim(n)],
                vec![(0, 1, Matrix::identity(field, a.dim(n)))],
            )
        })
    }

    /// Stalkwise cone of a square of maps: given `f: A → B`, `f2: A2 → B2`
    /// and vertical maps `a: A → A2`, `b: B → B2` with `f2 a = b f`,
    /// the induced map `cone(f) → cone(f2)`.
    pub fn cone_of_square(f: &ChainMap, f2: &ChainMap, a: &ChainMap, b: &ChainMap) -> ChainMap {
        let src = Arc::new(Complex::cone(f));
        let tgt = Arc::new(Complex::cone(f2));
        let field = src.field();
        ChainMap::build(src, tgt, |n| {
            Matrix::from_blocks(
                field,
                &[f2.target().dim(n), f2.source().dim(n + 1)],
                &[f.target().dim(n), f.source().dim(n + 1)],
                vec![(0, 0, b.comp(n)), (1, 1, a.comp(n + 1))],
            )
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::Rationals
    }

    #[test]
    fn zero_complex_has_no_cohomology() {
        assert!(Complex::zero(q()).cohomology().is_zero());
    }

    #[test]
    fn identity_cone_is_acyclic() {
        let c = Complex::new(q(), 0, vec![1, 1], vec![Matrix::identity(q(), 1)]).unwrap();
        assert!(c.is_acyclic());
    }

    #[test]
    fn hollow_triangle() {
        let d = Matrix::from_rows(q(), &[vec![-1, 1, 0], vec![0, -1, 1], vec![1, 0, -1]]);
        let c = Complex::new(q(), 0, vec![3, 3], vec![d]).unwrap();
        assert_eq!(c.cohomology(), Graded::from_pairs(&[(0, 1), (1, 1)]));
    }

    #[test]
    fn cone_of_zero_map() {
        let k = Arc::new(Complex::unit(q()));
        let f = ChainMap::zero(k.clone(), k.clone());
        let c = Complex::cone(&f);
        assert_eq!(c.dims(), Graded::from_pairs(&[(-1, 1), (0, 1)]));
        assert_eq!(c.cohomology(), Graded::from_pairs(&[(-1, 1), (0, 1)]));
    }

    #[test]
    fn shift_convention() {
        let k = Complex::unit(q());
        let k1 = k.shift(1);
        assert_eq!(k1.lo(), -1);
        assert_eq!(Complex::hom(&k1, &k), k.shift(-1));
    }

    #[test]
    fn rejects_non_complex() {
        let one = Matrix::identity(q(), 1);
        let e = Complex::new(q(), 3, vec![1, 1, 1], vec![one.clone(), one]).unwrap_err();
        assert_eq!(e, Error::NotAComplex(3, 5));
    }
}
