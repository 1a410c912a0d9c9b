//! Circles and intervals with stops: band kernels, localization onto the
//! stop-constrained subcategory, wrap-once functors and the duality checks
//! that relate them.
//!
//! Everything is computed on a fine simplicial model with `m` edges per arc.
//! A covector at a fine vertex `i` is `Plus` when the vertex before `i` is
//! negative (microstalk `fib(F(i) → F(e_before))`) and `Minus` when the
//! vertex after it is.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::complex::{ChainMap, Complex, Graded};
use crate::diagram::Diagram;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::functors::{dualizing, gamma_c, naive_dual, pullback, push_star, shriek_restrict_closed, standard_dual_sheaf, verdier_dual};
use crate::geometry::{Cell, FacePoset, MapKind, PosetMap, SimplicialComplex, Staircase};
use crate::kernels::{boxtimes, convolve, left_kan, Kernel};
use crate::matrix::Matrix;
use crate::microlocal::{corep_complex, microstalk, SignAssignment};
use crate::resolution::{minimal_resolution, quasi_isomorphic, rhom, IndicatorComplex};
use crate::sheaf::{Sheaf, SheafMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Base1d {
    Circle,
    Interval,
}

/// Codirections of one marked point that belong to the stop.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Codirections {
    pub plus: bool,
    pub minus: bool,
}

impl Codirections {
    pub const FULL: Codirections = Codirections { plus: true, minus: true };

    fn allows(&self, d: Dir) -> bool {
        match d {
            Dir::Plus => self.plus,
            Dir::Minus => self.minus,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    Plus,
    Minus,
}

impl fmt::Display for Dir {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if *self == Dir::Plus { "+" } else { "-" })
    }
}

/// Marked points on a circle or in the interior of an interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StopConfig {
    pub base: Base1d,
    pub points: Vec<Codirections>,
}

impl StopConfig {
    pub fn full_circle(n: usize) -> StopConfig {
        StopConfig { base: Base1d::Circle, points: vec![Codirections::FULL; n] }
    }

    pub fn full_interval(k: usize) -> StopConfig {
        StopConfig { base: Base1d::Interval, points: vec![Codirections::FULL; k] }
    }

    pub fn is_full(&self) -> bool {
        self.points.iter().all(|c| *c == Codirections::FULL)
    }

    pub fn validate(&self) -> Result<()> {
        if self.base == Base1d::Circle && self.points.is_empty() {
            return Err(Error::Precondition("a circle needs at least one marked point".into()));
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<StopConfig> {
        let err = |line: usize, col: usize, msg: &str| Error::Parse { line, col, msg: msg.to_string() };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        match lines.next() {
            Some((_, l)) if l.trim() == "stops v1" => {}
            Some((i, _)) => return Err(err(i + 1, 1, "expected header `stops v1`")),
            None => return Err(err(1, 1, "empty input")),
        }
        let (i, l) = lines.next().ok_or_else(|| err(2, 1, "missing base line"))?;
        let words: Vec<&str> = l.split_whitespace().collect();
        let base = match words.first() {
            Some(&"circle") => Base1d::Circle,
            Some(&"interval") => Base1d::Interval,
            _ => return Err(err(i + 1, 1, "expected `circle <n>` or `interval <k>`")),
        };
        let n: usize = words
            .get(1)
            .and_then(|w| w.parse().ok())
            .ok_or_else(|| err(i + 1, l.find(char::is_whitespace).map_or(1, |c| c + 2), "expected a point count"))?;
        let mut points = vec![Codirections::default(); n];
        let mut seen = vec![false; n];
        for (i, l) in lines {
            let words: Vec<&str> = l.split_whitespace().collect();
            if words.first() != Some(&"point") || words.len() != 3 {
                return Err(err(i + 1, 1, "expected `point <index> <+-|+|-|.>`"));
            }
            let col = l.find(words[1]).unwrap_or(0) + 1;
            let j: usize = words[1].parse().map_err(|_| err(i + 1, col, "bad point index"))?;
            if j >= n || seen[j] {
                return Err(err(i + 1, col, "point index out of range or repeated"));
            }
            seen[j] = true;
            let col = l.rfind(words[2]).unwrap_or(0) + 1;
            points[j] = match words[2] {
                "+-" | "-+" => Codirections::FULL,
                "+" => Codirections { plus: true, minus: false },
                "-" => Codirections { plus: false, minus: true },
                "." => Codirections::default(),
                _ => return Err(err(i + 1, col, "codirections must be one of +- + - .")),
            };
        }
        let cfg = StopConfig { base, points };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("stops v1\n");
        s.push_str(&match self.base {
            Base1d::Circle => format!("circle {}\n", self.points.len()),
            Base1d::Interval => format!("interval {}\n", self.points.len()),
        });
        for (j, c) in self.points.iter().enumerate() {
            let code = match (c.plus, c.minus) {
                (true, true) => "+-",
                (true, false) => "+",
                (false, true) => "-",
                (false, false) => ".",
            };
            s.push_str(&format!("point {j} {code}\n"));
        }
        s
    }
}

/// Row of the Sabloff–Serre comparison for one generator pair.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct SabloffRow {
    pub f: String,
    pub g: String,
    /// `Hom(T_ε F, G ⊗ ω)`.
    pub pushed: Graded,
    /// `Hom(F, T_{-ε} G ⊗ ω)`.
    pub pulled: Graded,
    /// `Γ_c(VD F ⊗ G)`.
    pub compact: Graded,
    /// `Hom(G, F)^∨`.
    pub dual: Graded,
    /// `Hom(S⁺F, G ⊗ ω)`.
    pub wrapped: Graded,
}

impl SabloffRow {
    pub fn agree(&self) -> bool {
        self.pushed == self.pulled && self.pulled == self.compact && self.compact == self.dual && self.dual == self.wrapped
    }
}

/// Per-generator outcome of the Verdier-versus-standard comparison.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct VerdierRow {
    pub generator: String,
    /// `SD F ≃ S⁺(ND F)`.
    pub standard_is_wrapped_naive: bool,
    /// `VD F ≃ S⁻(SD F) ⊗ ω`.
    pub verdier_is_unwrapped_standard: bool,
}

/// A stop configuration together with its fine model.
#[derive(Clone, Debug)]
pub struct Lab {
    pub cfg: StopConfig,
    pub field: Field,
    pub steps: usize,
    pub fine_complex: SimplicialComplex,
    pub fine: Arc<FacePoset>,
    pub coarse: Arc<FacePoset>,
    /// Fine cell ↦ coarse stratum containing it.
    pub q: PosetMap,
    verts: Vec<usize>,
    edges: Vec<usize>,
    marked: Vec<usize>,
}

impl Lab {
    /// Smallest admissible number of fine edges per arc.
    pub fn default_steps(cfg: &StopConfig) -> usize {
        match cfg.base {
            Base1d::Circle => 3usize.max(5usize.div_ceil(cfg.points.len().max(1))),
            Base1d::Interval => 3,
        }
    }

    pub fn new(cfg: &StopConfig, field: Field) -> Result<Lab> {
        Lab::with_steps(cfg, field, Lab::default_steps(cfg))
    }

    pub fn with_steps(cfg: &StopConfig, field: Field, m: usize) -> Result<Lab> {
        cfg.validate()?;
        if m < 3 {
            return Err(Error::Precondition(format!("need at least 3 fine edges per arc, got {m}")));
        }
        let n = cfg.points.len();
        let (fine_complex, coarse, nverts, arcs) = match cfg.base {
            Base1d::Circle => {
                if n * m < 5 {
                    return Err(Error::Precondition("fine circle needs at least 5 vertices".into()));
                }
                (SimplicialComplex::circle(n * m)?, coarse_circle(n)?, n * m, n)
            }
            Base1d::Interval => (SimplicialComplex::path((n + 1) * m), SimplicialComplex::path(n + 1).face_poset(), (n + 1) * m + 1, n + 1),
        };
        let fine = fine_complex.face_poset();
        let by_vertices: HashMap<Vec<usize>, usize> = (0..fine.len())
            .map(|s| {
                let mut v = fine.cell(s).vertices.clone();
                v.sort_unstable();
                (v, s)
            })
            .collect();
        let nedges = if cfg.base == Base1d::Circle { nverts } else { nverts - 1 };
        let verts: Vec<usize> = (0..nverts).map(|i| by_vertices[&vec![i]]).collect();
        let edges: Vec<usize> = (0..nedges)
            .map(|i| {
                let mut v = vec![i, (i + 1) % nverts];
                v.sort_unstable();
                by_vertices[&v]
            })
            .collect();
        let offset = if cfg.base == Base1d::Circle { 0 } else { 1 };
        let marked: Vec<usize> = (0..n).map(|j| (j + offset) * m).collect();
        let coarse_vertex = |j: usize| coarse.index_of(&j.to_string()).expect("coarse vertex");
        let coarse_arc = |j: usize| -> usize {
            match cfg.base {
                Base1d::Circle if n <= 2 => coarse.index_of(&format!("a{j}")).expect("coarse arc"),
                _ => {
                    let mut best = None;
                    for s in 0..coarse.len() {
                        let mut v = coarse.cell(s).vertices.clone();
                        v.sort_unstable();
                        let mut want = vec![j, (j + 1) % (arcs + offset)];
                        want.sort_unstable();
                        if coarse.dim(s) == 1 && v == want {
                            best = Some(s);
                        }
                    }
                    best.expect("coarse arc")
                }
            }
        };
        let mut map = vec![0; fine.len()];
        for (i, &c) in verts.iter().enumerate() {
            map[c] = if i % m == 0 { coarse_vertex(i / m) } else { coarse_arc(i / m) };
        }
        for (i, &c) in edges.iter().enumerate() {
            map[c] = coarse_arc(i / m);
        }
        let q = PosetMap::new(fine.clone(), coarse.clone(), map, MapKind::Refinement)?;
        Ok(Lab { cfg: cfg.clone(), field, steps: m, fine_complex, fine, coarse, q, verts, edges, marked })
    }

    fn is_circle(&self) -> bool {
        self.cfg.base == Base1d::Circle
    }

    pub fn fine_vertex_count(&self) -> usize {
        self.verts.len()
    }

    pub fn vertex_cell(&self, i: usize) -> usize {
        self.verts[i]
    }

    /// Cell of the fine edge from vertex `i` to `i + 1`.
    pub fn edge_cell(&self, i: usize) -> usize {
        self.edges[i]
    }

    fn before(&self, i: usize) -> Option<usize> {
        let n = self.verts.len();
        if i > 0 {
            Some(i - 1)
        } else if self.is_circle() {
            Some(n - 1)
        } else {
            None
        }
    }

    fn after(&self, i: usize) -> Option<usize> {
        let n = self.verts.len();
        if i + 1 < n {
            Some(i + 1)
        } else if self.is_circle() {
            Some(0)
        } else {
            None
        }
    }

    /// The covector `(i, d)` when the vertex has the neighbour it needs.
    pub fn covector(&self, i: usize, d: Dir) -> Option<SignAssignment> {
        let (neg, pos) = match d {
            Dir::Plus => (self.before(i)?, self.after(i)),
            Dir::Minus => (self.after(i)?, self.before(i)),
        };
        let mut signs = vec![(neg, false)];
        if let Some(p) = pos {
            signs.push((p, true));
        }
        signs.sort_unstable();
        SignAssignment::new(&self.fine, self.verts[i], &signs).ok()
    }

    /// Fine covectors outside the stop.
    pub fn directions_to_kill(&self) -> Vec<(usize, Dir)> {
        let mut out = Vec::new();
        for d in [Dir::Plus, Dir::Minus] {
            for i in 0..self.verts.len() {
                if self.covector(i, d).is_none() {
                    continue;
                }
                let allowed = self.marked.iter().position(|&v| v == i).is_some_and(|j| self.cfg.points[j].allows(d));
                if !allowed {
                    out.push((i, d));
                }
            }
        }
        out
    }

    /// Fine covectors in the stop.
    pub fn stop_directions(&self) -> Vec<(usize, Dir)> {
        let mut out = Vec::new();
        for (j, &i) in self.marked.iter().enumerate() {
            for d in [Dir::Plus, Dir::Minus] {
                if self.cfg.points[j].allows(d) {
                    out.push((i, d));
                }
            }
        }
        out
    }

    /// Position of a fine cell: start vertex and length (0 or 1).
    fn position(&self, s: usize) -> (i64, i64) {
        let c = self.fine.cell(s);
        if c.dim == 0 {
            return (c.vertices[0] as i64, 0);
        }
        let (a, b) = (c.vertices[0], c.vertices[1]);
        let n = self.verts.len();
        let start = if self.is_circle() && ((a + 1) % n == b) { a } else if self.is_circle() { b } else { a.min(b) };
        (start as i64, 1)
    }

    /// Band kernel on the fine square. `Plus` is `k` on the open band
    /// `|y - x| < r` shifted by one; `Minus` is `k` on the closed band.
    pub fn band_kernel(&self, d: Dir, r: usize) -> Result<Kernel> {
        if r == 0 || 2 * r >= self.steps {
            return Err(Error::Precondition(format!("ε = {r} steps must lie in (0, {}/2)", self.steps)));
        }
        let prod = FacePoset::product(&[self.fine.clone(), self.fine.clone()]);
        let n = self.verts.len() as i64;
        let r = r as i64;
        let mut set = Vec::new();
        for c in 0..prod.len() {
            let co = prod.coords(c);
            let (sx, lx) = self.position(co[0]);
            let (sy, ly) = self.position(co[1]);
            let mut off = sy - sx;
            if self.is_circle() {
                off = off.rem_euclid(n);
                if 2 * off > n {
                    off -= n;
                }
            }
            let (lo, hi, point) = (off - lx, off + ly, lx == 0 && ly == 0);
            let inside = match (d, point) {
                (Dir::Plus, true) => off.abs() < r,
                (Dir::Plus, false) => lo < r && hi > -r,
                (Dir::Minus, true) => off.abs() <= r,
                (Dir::Minus, false) => lo >= -r && hi <= r,
            };
            if inside {
                set.push(c);
            }
        }
        let unit = Complex::unit(self.field);
        let value = Arc::new(if d == Dir::Plus { unit.shift(1) } else { unit });
        let sheaf = Sheaf::constant_on(prod, value, &set)?;
        Kernel::new(Arc::new(sheaf), self.fine.clone(), self.fine.clone())
    }

    /// `T_{±ε}`.
    pub fn push(&self, f: &Sheaf, d: Dir, r: usize) -> Result<Sheaf> {
        convolve(&self.band_kernel(d, r)?, f)
    }

    fn ordered_kills(&self, forward_plus: bool) -> Vec<(usize, Dir)> {
        let mut plus: Vec<(usize, Dir)> = self.directions_to_kill().into_iter().filter(|x| x.1 == Dir::Plus).collect();
        let mut minus: Vec<(usize, Dir)> = self.directions_to_kill().into_iter().filter(|x| x.1 == Dir::Minus).collect();
        if !forward_plus {
            plus.reverse();
        } else {
            minus.reverse();
        }
        plus.extend(minus);
        plus
    }

    fn coreps(&self, kills: &[(usize, Dir)]) -> Result<Vec<IndicatorComplex>> {
        kills
            .iter()
            .map(|&(i, d)| corep_complex(&self.fine, self.field, &self.covector(i, d).expect("direction exists")))
            .collect()
    }

    /// `ι*`: iterated cones on corepresentatives of the directions outside
    /// the stop, with the unit `F → ι*F`. Fails with `Diverged` when a full
    /// sweep bound is exceeded.
    pub fn localize_with_unit(&self, f: &Arc<Sheaf>) -> Result<(Arc<Sheaf>, SheafMap)> {
        self.check_base(f)?;
        let kills = self.ordered_kills(true);
        let coreps = self.coreps(&kills)?;
        let bound = kills.len().max(1);
        let mut g = f.clone();
        let mut unit = SheafMap::identity(f);
        for _ in 0..bound {
            let mut changed = false;
            for c in &coreps {
                if let Some(ev) = evaluation(c, &g)? {
                    let cone = Arc::new(ev.cone());
                    let inc = ev.cone_inclusion(&cone);
                    unit = inc.after(&unit)?;
                    g = cone;
                    changed = true;
                }
            }
            if !changed {
                return Ok((g, unit));
            }
        }
        Err(Error::Diverged(bound))
    }

    /// `ι*` followed by minimization.
    pub fn localize(&self, f: &Sheaf) -> Result<Sheaf> {
        let (g, _) = self.localize_with_unit(&Arc::new(f.clone()))?;
        Ok(minimal_model(&g))
    }

    /// `ι^!`: iterated fibers against the injective duals of the
    /// corepresentatives, with the counit `ι^! F → F`.
    pub fn colocalize_with_counit(&self, f: &Arc<Sheaf>) -> Result<(Arc<Sheaf>, SheafMap)> {
        self.check_base(f)?;
        let kills = self.ordered_kills(false);
        let duals: Vec<IndicatorComplex> = self.coreps(&kills)?.iter().map(|c| c.nakayama()).collect();
        let bound = kills.len().max(1);
        let mut g = f.clone();
        let mut counit = SheafMap::identity(f);
        for _ in 0..bound {
            let mut changed = false;
            for r in &duals {
                if let Some(co) = coevaluation(r, &g)? {
                    let fib = Arc::new(co.fiber());
                    let proj = co.fiber_projection(&fib);
                    counit = counit.after(&proj)?;
                    g = fib;
                    changed = true;
                }
            }
            if !changed {
                return Ok((g, counit));
            }
        }
        Err(Error::Diverged(bound))
    }

    pub fn colocalize(&self, f: &Sheaf) -> Result<Sheaf> {
        let (g, _) = self.colocalize_with_counit(&Arc::new(f.clone()))?;
        Ok(minimal_model(&g))
    }

    /// `S⁺ = ι* ∘ T_ε` and `S⁻ = ι^! ∘ T_{-ε}`.
    pub fn wrap(&self, f: &Sheaf, d: Dir, r: usize) -> Result<Sheaf> {
        let pushed = self.push(f, d, r)?;
        match d {
            Dir::Plus => self.localize(&pushed),
            Dir::Minus => self.colocalize(&pushed),
        }
    }

    /// `ι*` of the indicator of a fine cell inside every coarse stratum,
    /// labelled by the coarse name.
    pub fn generators(&self) -> Result<Vec<(String, Arc<Sheaf>)>> {
        let m = self.steps;
        let mut out = Vec::new();
        for c in 0..self.coarse.len() {
            let rep = if self.coarse.dim(c) == 0 {
                (0..self.verts.len()).find(|&i| self.q.apply(self.verts[i]) == c).map(|i| self.verts[i])
            } else {
                (0..self.edges.len()).find(|&i| self.q.apply(self.edges[i]) == c && i % m == m / 2).map(|i| self.edges[i])
            };
            let rep = rep.expect("every stratum has a fine cell");
            let one = Sheaf::indicator(self.fine.clone(), self.field, rep);
            out.push((format!("1_{}", self.coarse.name(c)), Arc::new(self.localize(&one)?)));
        }
        Ok(out)
    }

    /// Microstalk dimensions at every fine covector outside the stop.
    pub fn microstalks_off_stop(&self, f: &Sheaf) -> Result<Vec<((usize, Dir), Graded)>> {
        self.directions_to_kill()
            .into_iter()
            .map(|(i, d)| Ok(((i, d), microstalk(f, &self.covector(i, d).expect("direction exists"))?.cohomology())))
            .collect()
    }

    pub fn in_subcategory(&self, f: &Sheaf) -> Result<bool> {
        Ok(self.microstalks_off_stop(f)?.iter().all(|(_, h)| h.is_zero()))
    }

    /// Standard dual inside the stop subcategory: `ι*` of the fine one.
    pub fn standard_dual(&self, f: &Sheaf) -> Result<Sheaf> {
        self.localize(&standard_dual_sheaf(f))
    }

    pub fn omega(&self) -> Sheaf {
        dualizing(&self.fine, self.field)
    }

    pub fn sabloff_row(&self, fname: &str, f: &Arc<Sheaf>, gname: &str, g: &Arc<Sheaf>, r: usize) -> Result<SabloffRow> {
        let omega = self.omega();
        let g_omega = Sheaf::tensor(g, &omega)?;
        let tf = Arc::new(self.push(f, Dir::Plus, r)?);
        let pushed = rhom(&tf, &g_omega)?.cohomology();
        let tg = self.push(g, Dir::Minus, r)?;
        let pulled = rhom(f, &Sheaf::tensor(&tg, &omega)?)?.cohomology();
        let compact = gamma_c(&Sheaf::tensor(&verdier_dual(f)?, g)?).cohomology();
        let dual = rhom(g, f)?.cohomology().dual();
        let sf = Arc::new(self.wrap(f, Dir::Plus, r)?);
        let wrapped = rhom(&sf, &g_omega)?.cohomology();
        Ok(SabloffRow { f: fname.into(), g: gname.into(), pushed, pulled, compact, dual, wrapped })
    }

    /// All four (five, with the wrapped variant) tables over generator pairs.
    pub fn sabloff_serre(&self, r: usize) -> Result<Vec<SabloffRow>> {
        let gens = self.generators()?;
        let mut rows = Vec::new();
        for (fname, f) in &gens {
            for (gname, g) in &gens {
                rows.push(self.sabloff_row(fname, f, gname, g, r)?);
            }
        }
        Ok(rows)
    }

    pub fn verdier_row(&self, name: &str, f: &Arc<Sheaf>, r: usize, seed: u64) -> Result<VerdierRow> {
        let sd = Arc::new(self.standard_dual(f)?);
        let wn = Arc::new(self.wrap(&naive_dual(f)?, Dir::Plus, r)?);
        let a = quasi_isomorphic(&sd, &wn, seed)?;
        let lhs = Arc::new(verdier_dual(f)?);
        let rhs = Arc::new(Sheaf::tensor(&self.wrap(&sd, Dir::Minus, r)?, &self.omega())?);
        let b = quasi_isomorphic(&lhs, &rhs, seed)?;
        Ok(VerdierRow { generator: name.into(), standard_is_wrapped_naive: a, verdier_is_unwrapped_standard: b })
    }

    pub fn verdier_standard_compare(&self, r: usize, seed: u64) -> Result<Vec<VerdierRow>> {
        self.generators()?.iter().map(|(n, f)| self.verdier_row(n, f, r, seed)).collect()
    }

    /// `S^±` at `ε = r` and at `ε = 2r` agree on every generator.
    pub fn epsilon_stability(&self, r: usize, seed: u64) -> Result<Vec<(String, Dir, bool)>> {
        let mut out = Vec::new();
        for (name, g) in self.generators()? {
            for d in [Dir::Plus, Dir::Minus] {
                let a = Arc::new(self.wrap(&g, d, r)?);
                let b = Arc::new(self.wrap(&g, d, 2 * r)?);
                out.push((name.clone(), d, quasi_isomorphic(&a, &b, seed)?));
            }
        }
        Ok(out)
    }

    /// Total stalk dimensions of `F, S F, S² F, …` (`count` iterates).
    pub fn orbit(&self, f: &Sheaf, d: Dir, r: usize, count: usize) -> Result<Vec<Graded>> {
        let mut cur = f.clone();
        let mut out = Vec::new();
        for _ in 0..=count {
            out.push(cur.stalk_cohomology().iter().fold(Graded::new(), |a, b| a.sum(b)));
            cur = self.wrap(&cur, d, r)?;
        }
        Ok(out)
    }

    /// `Γ(Δ^! q^*(F ⊠ G))` on the staircase of the fine model.
    pub fn diagonal_pairing(&self, st: &Staircase, f: &Sheaf, g: &Sheaf) -> Result<Graded> {
        let fg = boxtimes(f, g)?.rebase(st.product.clone())?;
        let up = pullback(&st.q, &fg)?;
        let image = st.diagonal_elements();
        let i = PosetMap::inclusion(&st.poset, &image, MapKind::ClosedInclusion)?;
        Ok(shriek_restrict_closed(&i, &up)?.global_sections().cohomology())
    }

    pub fn staircase(&self) -> Result<Staircase> {
        Staircase::new(&self.fine_complex)
    }

    /// Pulls a sheaf on the coarse stratification back to the fine model.
    pub fn from_coarse(&self, f: &Sheaf) -> Result<Sheaf> {
        pullback(&self.q, f)
    }

    /// `Lan_q` and `q^* q_*` back on the fine model: `ι*` and `ι^!` for a
    /// full stop on a circle with at least two marked points.
    pub fn coarse_localizations(&self, f: &Arc<Sheaf>) -> Result<(Sheaf, Sheaf)> {
        let lan = pullback(&self.q, &left_kan(&self.q, f)?)?;
        let ran = pullback(&self.q, &push_star(&self.q, f)?)?;
        Ok((lan, ran))
    }

    fn check_base(&self, f: &Sheaf) -> Result<()> {
        if f.base().as_ref() != self.fine.as_ref() {
            return Err(Error::BaseMismatch("sheaf is not on the fine model".into()));
        }
        Ok(())
    }
}

/// Coarse circle with `n` vertices and `n` arcs.
fn coarse_circle(n: usize) -> Result<Arc<FacePoset>> {
    if n >= 3 {
        return Ok(SimplicialComplex::circle(n)?.face_poset());
    }
    let mut names: Vec<String> = (0..n).map(|j| j.to_string()).collect();
    let mut cells: Vec<Cell> = (0..n).map(|j| Cell { dim: 0, vertices: vec![j] }).collect();
    let mut faces: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
    for j in 0..n {
        let k = (j + 1) % n;
        names.push(format!("a{j}"));
        let mut v = vec![j, k];
        v.dedup();
        cells.push(Cell { dim: 1, vertices: v });
        faces.push(vec![(k, 1), (j, -1)]);
    }
    Ok(Arc::new(FacePoset::from_cells(names, cells, faces, (0..n).map(|j| j.to_string()).collect())?))
}

/// Minimal projective model of a sheaf, as a sheaf.
pub fn minimal_model(f: &Arc<Sheaf>) -> Sheaf {
    minimal_resolution(f).complex.to_sheaf()
}

/// `⊕ C[-n] ⊗ H^n Hom(C, G) → G`, or `None` when the Hom vanishes.
fn evaluation(c: &IndicatorComplex, g: &Arc<Sheaf>) -> Result<Option<SheafMap>> {
    let (hom, index) = c.hom_to(g)?;
    let mut maps = Vec::new();
    for n in hom.lo()..=hom.hi() {
        for z in hom.cohomology_basis(n) {
            maps.push(c.map_from_cocycle(g, &index, &z, n)?);
        }
    }
    if maps.is_empty() {
        return Ok(None);
    }
    let sources: Vec<&Sheaf> = maps.iter().map(|m| m.source().as_ref()).collect();
    let src = Arc::new(Sheaf::direct_sum(&sources)?);
    let comps = (0..g.base().len())
        .map(|t| {
            ChainMap::build(src.stalk(t).clone(), g.stalk(t).clone(), |k| {
                let cols: Vec<usize> = maps.iter().map(|m| m.source().stalk(t).dim(k)).collect();
                let blocks = maps.iter().enumerate().map(|(i, m)| (0, i, m.comp(t).comp(k))).collect();
                Matrix::from_blocks(g.field(), &[g.stalk(t).dim(k)], &cols, blocks)
            })
        })
        .collect();
    Ok(Some(SheafMap::new(src, g.clone(), comps)?))
}

/// `G → ⊕ R[n] ⊗ H^n Hom(G, R)^∨`, or `None` when the Hom vanishes.
fn coevaluation(r: &IndicatorComplex, g: &Arc<Sheaf>) -> Result<Option<SheafMap>> {
    let (hom, index) = r.hom_from(g)?;
    let mut maps = Vec::new();
    for n in hom.lo()..=hom.hi() {
        for z in hom.cohomology_basis(n) {
            maps.push(r.map_from_cocycle_into(g, &index, &z, n)?);
        }
    }
    if maps.is_empty() {
        return Ok(None);
    }
    let targets: Vec<&Sheaf> = maps.iter().map(|m| m.target().as_ref()).collect();
    let tgt = Arc::new(Sheaf::direct_sum(&targets)?);
    let comps = (0..g.base().len())
        .map(|t| {
            ChainMap::build(g.stalk(t).clone(), tgt.stalk(t).clone(), |k| {
                let rows: Vec<usize> = maps.iter().map(|m| m.target().stalk(t).dim(k)).collect();
                let blocks = maps.iter().enumerate().map(|(i, m)| (i, 0, m.comp(t).comp(k))).collect();
                Matrix::from_blocks(g.field(), &rows, &[g.stalk(t).dim(k)], blocks)
            })
        })
        .collect();
    Ok(Some(SheafMap::new(g.clone(), tgt, comps)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::Rationals
    }

    #[test]
    fn stratification_sizes() {
        for (cfg, n) in [(StopConfig::full_circle(1), 2), (StopConfig::full_circle(3), 6), (StopConfig::full_interval(1), 5)] {
            let lab = Lab::new(&cfg, q()).unwrap();
            assert_eq!(lab.coarse.len(), n);
        }
    }

    #[test]
    fn text_round_trip() {
        let cfg = StopConfig { base: Base1d::Circle, points: vec![Codirections::FULL, Codirections { plus: true, minus: false }] };
        let t = cfg.to_text();
        assert_eq!(StopConfig::parse(&t).unwrap(), cfg);
        assert!(matches!(StopConfig::parse("stops v1\ncircle 2\npoint 0 *\n"), Err(Error::Parse { line: 3, col: 9, .. })));
    }

    #[test]
    fn band_pushes_half_open_arc_forward() {
        let lab = Lab::new(&StopConfig::full_circle(2), q()).unwrap();
        let n = lab.fine_vertex_count();
        let arc = |a: usize, b: usize| -> Vec<usize> { (a..b).flat_map(|i| [lab.vertex_cell(i % n), lab.edge_cell(i % n)]).collect() };
        let unit = Arc::new(Complex::unit(q()));
        let f = Sheaf::constant_on(lab.fine.clone(), unit.clone(), &arc(1, 3)).unwrap();
        let g = Arc::new(lab.push(&f, Dir::Plus, 1).unwrap());
        let want = Arc::new(Sheaf::constant_on(lab.fine.clone(), unit, &arc(2, 4)).unwrap());
        assert!(quasi_isomorphic(&g, &want, 1).unwrap());
        for i in 0..n {
            for d in [Dir::Plus, Dir::Minus] {
                let h = microstalk(&g, &lab.covector(i, d).unwrap()).unwrap().cohomology();
                assert_eq!(!h.is_zero(), d == Dir::Plus && (i == 2 || i == 4), "{i}{d}");
            }
        }
    }

    #[test]
    fn bands_are_inverse() {
        let lab = Lab::new(&StopConfig::full_circle(2), q()).unwrap();
        let k = Sheaf::constant(lab.fine.clone(), q());
        assert!(quasi_isomorphic(&Arc::new(lab.push(&k, Dir::Plus, 1).unwrap()), &Arc::new(k.clone()), 0).unwrap());
        for s in 0..lab.fine.len() {
            let f = Arc::new(Sheaf::indicator(lab.fine.clone(), q(), s));
            let back = lab.push(&lab.push(&f, Dir::Plus, 1).unwrap(), Dir::Minus, 1).unwrap();
            assert!(quasi_isomorphic(&f, &Arc::new(back), 0).unwrap());
        }
    }

    #[test]
    fn full_stop_localizations_match_coarse() {
        let lab = Lab::new(&StopConfig::full_circle(2), q()).unwrap();
        for s in 0..lab.fine.len() {
            let f = Arc::new(Sheaf::indicator(lab.fine.clone(), q(), s));
            let (lan, ran) = lab.coarse_localizations(&f).unwrap();
            let loc = Arc::new(lab.localize(&f).unwrap());
            assert!(quasi_isomorphic(&loc, &Arc::new(lan), 0).unwrap());
            let f2 = Arc::new(Sheaf::closed_indicator(lab.fine.clone(), q(), s));
            let (_, ran2) = lab.coarse_localizations(&f2).unwrap();
            let co = Arc::new(lab.colocalize(&f2).unwrap());
            assert!(quasi_isomorphic(&co, &Arc::new(ran2), 0).unwrap());
            let _ = ran;
        }
    }

    #[test]
    fn localized_generators_live_in_subcategory() {
        for cfg in [
            StopConfig::full_circle(1),
            StopConfig::full_interval(1),
            StopConfig { base: Base1d::Circle, points: vec![Codirections::FULL, Codirections { plus: true, minus: false }] },
        ] {
            let lab = Lab::new(&cfg, q()).unwrap();
            for (name, g) in lab.generators().unwrap() {
                assert!(lab.in_subcategory(&g).unwrap(), "{name}");
            }
        }
    }

    #[test]
    fn halving_epsilon() {
        let lab = Lab::with_steps(&StopConfig::full_circle(2), q(), 6).unwrap();
        assert!(lab.epsilon_stability(1, 3).unwrap().iter().all(|x| x.2));
    }

    #[test]
    fn one_sided_stop_on_a_circle_diverges() {
        let cfg = StopConfig { base: Base1d::Circle, points: vec![Codirections { plus: true, minus: false }] };
        let lab = Lab::new(&cfg, q()).unwrap();
        let f = Sheaf::indicator(lab.fine.clone(), q(), lab.vertex_cell(0));
        assert!(matches!(lab.localize(&f), Err(Error::Diverged(_))));
    }
}
