//! The acceptance suite as library code: twelve criteria, each a list of
//! exact checks. Shared by `strata verify-all` and the acceptance test.

use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::complex::{Complex, Graded};
use crate::diagram::PosetDiagram;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::format::Workspace;
use crate::functors::{dualizing, gamma_c, standard_dual_sheaf, verdier_dual};
use crate::geometry::{FacePoset, MapKind, PosetMap, SimplicialComplex};
use crate::kernels::{boxtimes, left_kan, check_triangles, localized_composites, reconstruct_kernel, DualityData, FunctorTable, Kernel};
use crate::microlocal::{microstalk, microstalk_corep, realizability, thom_sebastiani_pair, Realizability, SignAssignment};
use crate::random::random_sheaf;
use crate::resolution::{quasi_isomorphic, rhom};
use crate::sheaf::Sheaf;
use crate::wrap1d::{Dir, Lab, StopConfig};

/// One exact comparison.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub got: String,
    pub tolerance: &'static str,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, expected: impl ToString, got: impl ToString) -> Check {
        let (expected, got) = (expected.to_string(), got.to_string());
        Check { name: name.into(), pass: expected == got, expected, got, tolerance: "exact" }
    }

    pub fn flag(name: impl Into<String>, ok: bool) -> Check {
        Check::new(name, true, ok)
    }

    fn error(name: impl Into<String>, e: &Error) -> Check {
        Check { name: name.into(), expected: "no error".into(), got: e.to_string(), tolerance: "exact", pass: false }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub title: &'static str,
    #[serde(skip)]
    pub seconds: f64,
    pub checks: Vec<Check>,
}

impl CriterionResult {
    pub fn pass(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// Without timings: identical across runs and thread counts.
    pub fn stable(&self) -> CriterionResult {
        CriterionResult { seconds: 0.0, ..self.clone() }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Settings {
    pub field: Field,
    pub budget: usize,
    pub seed: u64,
}

impl Default for Settings {
    fn default() -> Settings {
        Settings { field: Field::Rationals, budget: 64, seed: 7 }
    }
}

type Body = fn(&Settings) -> Result<Vec<Check>>;

pub const CRITERIA: [(&str, Body); 12] = [
    ("generator kunneth", kunneth),
    ("duality pairing", duality_pairing),
    ("triangle identities", triangles),
    ("kernel round trip", kernel_round_trip),
    ("localized composites", composites),
    ("thom-sebastiani", thom_sebastiani),
    ("stop removal", stop_removal),
    ("verdier biduality", biduality),
    ("sabloff-serre", sabloff),
    ("verdier vs standard", verdier_vs_standard),
    ("invertibility at full stops", invertibility),
    ("infrastructure oracles", infrastructure),
];

/// Runs criterion `id` (1-based), turning errors into failed checks.
pub fn run_criterion(id: usize, s: &Settings) -> CriterionResult {
    let (title, body) = CRITERIA[id - 1];
    let start = Instant::now();
    let checks = match body(s) {
        Ok(c) => c,
        Err(e) => vec![Check::error(title, &e)],
    };
    CriterionResult { id, title, seconds: start.elapsed().as_secs_f64(), checks }
}

/// All criteria in order; independent criteria run in parallel.
pub fn run_all(s: &Settings) -> Vec<CriterionResult> {
    (1..=CRITERIA.len()).into_par_iter().map(|id| run_criterion(id, s)).collect()
}

/// Checks of the objects stored in a workspace: byte-exact round trip,
/// biduality of every sheaf, identity-kernel action on every base.
pub fn check_workspace(ws: &Workspace, seed: u64) -> CriterionResult {
    let start = Instant::now();
    let mut checks = Vec::new();
    let text = ws.to_text();
    match Workspace::parse(&text) {
        Ok(back) => checks.push(Check::flag("fixture round trip", back.to_text() == text)),
        Err(e) => checks.push(Check::error("fixture round trip", &e)),
    }
    for (name, item) in ws.items() {
        if let crate::format::Item::Sheaf { sheaf, .. } = item {
            let r = (|| -> Result<Check> {
                let back = Arc::new(verdier_dual(&verdier_dual(sheaf)?)?);
                Ok(Check::flag(format!("{name}: VD² ≃ id"), quasi_isomorphic(sheaf, &back, seed)?))
            })();
            checks.push(r.unwrap_or_else(|e| Check::error(name.clone(), &e)));
        }
    }
    CriterionResult { id: 0, title: "fixture", seconds: start.elapsed().as_secs_f64(), checks }
}

fn interval() -> SimplicialComplex {
    SimplicialComplex::interval()
}

fn triangle() -> SimplicialComplex {
    SimplicialComplex::circle(3).expect("three vertices")
}

fn indicators(base: &Arc<FacePoset>, field: Field) -> Vec<(String, Arc<Sheaf>)> {
    (0..base.len()).map(|t| (format!("1_{}", base.name(t)), Arc::new(Sheaf::indicator(base.clone(), field, t)))).collect()
}

/// Open and closed indicators.
fn both_indicators(base: &Arc<FacePoset>, field: Field) -> Vec<(String, Arc<Sheaf>)> {
    let mut out = indicators(base, field);
    for t in 0..base.len() {
        out.push((format!("1_[{}]", base.name(t)), Arc::new(Sheaf::closed_indicator(base.clone(), field, t))));
    }
    out
}

fn kunneth(s: &Settings) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (label, a, b) in [("I×I", interval(), interval()), ("S¹×I", triangle(), interval())] {
        let (a, b) = (a.face_poset(), b.face_poset());
        let ab = FacePoset::product(&[a.clone(), b.clone()]);
        for x in 0..a.len() {
            for y in 0..b.len() {
                let got = boxtimes(&Sheaf::indicator(a.clone(), s.field, x), &Sheaf::indicator(b.clone(), s.field, y))?;
                let want = Sheaf::indicator(ab.clone(), s.field, ab.element(&[x, y]));
                out.push(Check::flag(format!("{label}: 1_{} ⊠ 1_{}", a.name(x), b.name(y)), got == want));
            }
        }
    }
    Ok(out)
}

fn duality_pairing(s: &Settings) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (label, k) in [("I", interval()), ("S¹", triangle())] {
        let base = k.face_poset();
        let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
        let gs: Vec<Sheaf> = (0..20).map(|_| random_sheaf(&base, s.field, 3, &mut rng)).collect();
        let rows: Vec<Result<Vec<Check>>> = indicators(&base, s.field)
            .par_iter()
            .map(|(name, f)| {
                let sd = Arc::new(standard_dual_sheaf(f));
                gs.iter()
                    .enumerate()
                    .map(|(i, g)| {
                        let lhs = rhom(&sd, g)?.cohomology();
                        let rhs = gamma_c(&Sheaf::tensor(f, g)?).cohomology();
                        Ok(Check::new(format!("{label}: Hom(SD {name}, G{i}) vs p!({name} ⊗ G{i})"), rhs, lhs))
                    })
                    .collect()
            })
            .collect();
        for r in rows {
            out.extend(r?);
        }
    }
    Ok(out)
}

fn triangles(s: &Settings) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (label, k) in [("I", interval()), ("S¹", triangle())] {
        let data = DualityData::new(&k, s.field)?;
        for r in check_triangles(&data, s.seed)? {
            for g in &r.generators {
                out.push(Check::new(
                    format!("{label}: {} on {}", r.name, g.generator),
                    format!("{:?} (quasi-iso)", g.expected),
                    format!("{:?}{}", g.got, if g.quasi_iso { " (quasi-iso)" } else { "" }),
                ));
            }
            out.push(Check::flag(format!("{label}: {} kernel ≃ η", r.name), r.kernel_quasi_iso));
        }
    }
    Ok(out)
}

fn kernel_round_trip(s: &Settings) -> Result<Vec<Check>> {
    let data = DualityData::new(&interval(), s.field)?;
    let b = data.base.clone();
    let bb = FacePoset::product(&[b.clone(), b.clone()]);
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let kernels: Vec<Kernel> = (0..10)
        .map(|_| Kernel::new(Arc::new(random_sheaf(&bb, s.field, 3, &mut rng)), b.clone(), b.clone()))
        .collect::<Result<_>>()?;
    let rebuilt: Vec<Result<(FunctorTable, Kernel)>> = kernels
        .par_iter()
        .map(|k| {
            let t = FunctorTable::of_kernel(k)?;
            let r = reconstruct_kernel(&t, &data.eta_complex)?;
            Ok((t, r))
        })
        .collect();
    let rebuilt: Vec<(FunctorTable, Kernel)> = rebuilt.into_iter().collect::<Result<_>>()?;
    let mut out = Vec::new();
    for (i, (k, (_, r))) in kernels.iter().zip(&rebuilt).enumerate() {
        out.push(Check::flag(format!("K{i}: reconstruct(K ∘ -) ≃ K"), quasi_isomorphic(k.sheaf(), r.sheaf(), s.seed)?));
    }
    let mut collisions = 0;
    for i in 0..kernels.len() {
        for j in i + 1..kernels.len() {
            if rebuilt[i].0.dims() != rebuilt[j].0.dims() {
                continue;
            }
            let same_action = quasi_isomorphic(rebuilt[i].1.sheaf(), rebuilt[j].1.sheaf(), s.seed)?;
            let same_kernel = quasi_isomorphic(kernels[i].sheaf(), kernels[j].sheaf(), s.seed)?;
            if same_action && !same_kernel {
                collisions += 1;
            }
        }
    }
    out.push(Check::new("distinct kernels with equal actions", 0, collisions));
    Ok(out)
}

fn subdivided_interval(m: usize) -> Result<PosetMap> {
    let k = interval();
    let (fine, owner) = k.subdivide_edges(m)?;
    PosetMap::new(fine.face_poset(), k.face_poset(), owner, MapKind::Refinement)
}

fn composites(s: &Settings) -> Result<Vec<Check>> {
    let q = subdivided_interval(2)?;
    let r = q.source().clone();
    let rr = FacePoset::product(&[r.clone(), r.clone()]);
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut out = Vec::new();
    for i in 0..2 {
        let k = Kernel::new(Arc::new(random_sheaf(&rr, s.field, 2, &mut rng)), r.clone(), r.clone())?;
        let rows: Vec<Result<Check>> = indicators(&r, s.field)
            .par_iter()
            .map(|(name, f)| {
                let [a, b, c] = localized_composites(&q, &k, f)?;
                let base = a.base().clone();
                let a = Arc::new(a);
                let b = Arc::new(b.rebase(base.clone())?);
                let c = Arc::new(c.rebase(base)?);
                let ok = quasi_isomorphic(&a, &b, s.seed)? && quasi_isomorphic(&a, &c, s.seed)?;
                Ok(Check::flag(format!("K{i} on {name}: three composites agree"), ok))
            })
            .collect();
        for c in rows {
            out.push(c?);
        }
    }
    Ok(out)
}

fn thom_sebastiani(s: &Settings) -> Result<Vec<Check>> {
    let base = interval().face_poset();
    let gens = both_indicators(&base, s.field);
    let mut cases = Vec::new();
    for a in 0..base.len() {
        for b in 0..base.len() {
            for xi in SignAssignment::enumerate(&base, a, s.budget)? {
                for zeta in SignAssignment::enumerate(&base, b, s.budget)? {
                    cases.push((xi.clone(), zeta));
                }
            }
        }
    }
    let rows: Vec<Result<Check>> = gens
        .par_iter()
        .flat_map_iter(|(fname, f)| gens.iter().map(move |(gname, g)| (fname, f, gname, g)))
        .map(|(fname, f, gname, g)| {
            let fg = boxtimes(f, g)?;
            let mut bad = 0;
            for (xi, zeta) in &cases {
                let (l, r) = thom_sebastiani_pair(f, g, &fg, xi, zeta)?;
                if l != r {
                    bad += 1;
                }
            }
            Ok(Check::new(format!("{fname} ⊠ {gname}: mismatched cases of {}", cases.len()), 0, bad))
        })
        .collect();
    rows.into_iter().collect()
}

fn stop_removal(s: &Settings) -> Result<Vec<Check>> {
    let q = subdivided_interval(3)?;
    let fine = q.source().clone();
    let mut out = Vec::new();
    let mut killed = 0;
    let mut survived = 0;
    for r in 0..fine.len() {
        if fine.dim(r) != 0 || q.target().dim(q.apply(r)) != 1 {
            continue;
        }
        for xi in SignAssignment::enumerate(&fine, r, s.budget)? {
            if xi.is_zero_section() || realizability(&fine, &xi) != Realizability::Realizable {
                continue;
            }
            let c = Arc::new(microstalk_corep(&fine, s.field, &xi)?);
            if left_kan(&q, &c)?.is_acyclic() {
                killed += 1;
            } else {
                survived += 1;
            }
        }
    }
    out.push(Check::new(format!("ι*(corep) ≃ 0 for refined-away directions ({killed} killed)"), 0, survived));
    let gens = both_indicators(&fine, s.field);
    let mut covectors = Vec::new();
    for t in 0..fine.len() {
        covectors.extend(SignAssignment::enumerate(&fine, t, s.budget)?);
    }
    let rows: Vec<Result<Check>> = covectors
        .par_iter()
        .map(|xi| {
            let c = Arc::new(microstalk_corep(&fine, s.field, xi)?);
            let mut bad = Vec::new();
            for (name, g) in &gens {
                if rhom(&c, g)?.cohomology() != microstalk(g, xi)?.cohomology() {
                    bad.push(name.clone());
                }
            }
            Ok(Check::new(format!("Hom(corep {}, -) = microstalk on all generators", xi.label(&fine)), "[]", format!("{bad:?}")))
        })
        .collect();
    for c in rows {
        out.push(c?);
    }
    Ok(out)
}

fn biduality(s: &Settings) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (label, k) in [("I", interval()), ("S¹", triangle())] {
        let base = k.face_poset();
        for (name, f) in both_indicators(&base, s.field) {
            let back = verdier_dual(&verdier_dual(&f)?)?;
            out.push(Check::new(format!("{label}: VD²({name}) stalks"), format!("{:?}", f.stalk_cohomology()), format!("{:?}", back.stalk_cohomology())));
        }
    }
    let base = triangle().face_poset();
    let w = dualizing(&base, s.field);
    for t in 0..base.len() {
        out.push(Check::new(format!("S¹: ω at {}", base.name(t)), Graded::from_pairs(&[(-1, 1)]), w.stalk(t).cohomology()));
    }
    Ok(out)
}

fn full_circle_labs(s: &Settings) -> Result<Vec<(usize, Lab)>> {
    (1..=3).map(|n| Ok((n, Lab::new(&StopConfig::full_circle(n), s.field)?))).collect()
}

fn sabloff(s: &Settings) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (n, lab) in full_circle_labs(s)? {
        for row in lab.sabloff_serre(1)? {
            out.push(Check::new(
                format!("n={n}: ({}, {}) four tables", row.f, row.g),
                format!("{} {} {} {}", row.dual, row.dual, row.dual, row.dual),
                format!("{} {} {} {}", row.pushed, row.pulled, row.compact, row.wrapped),
            ));
        }
    }
    Ok(out)
}

fn verdier_vs_standard(s: &Settings) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (n, lab) in full_circle_labs(s)? {
        for row in lab.verdier_standard_compare(1, s.seed)? {
            out.push(Check::flag(format!("n={n}: SD({0}) ≃ S⁺(naive dual {0})", row.generator), row.standard_is_wrapped_naive));
            out.push(Check::flag(format!("n={n}: VD({0}) ≃ S⁻(SD {0}) ⊗ ω", row.generator), row.verdier_is_unwrapped_standard));
        }
    }
    Ok(out)
}

fn invertibility(s: &Settings) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (n, lab) in full_circle_labs(s)? {
        let gens = lab.generators()?;
        let st = lab.staircase()?;
        for (name, g) in &gens {
            let pm = Arc::new(lab.wrap(&lab.wrap(g, Dir::Minus, 1)?, Dir::Plus, 1)?);
            let mp = Arc::new(lab.wrap(&lab.wrap(g, Dir::Plus, 1)?, Dir::Minus, 1)?);
            out.push(Check::flag(format!("n={n}: S⁺S⁻ {name} ≃ {name}"), quasi_isomorphic(g, &pm, s.seed)?));
            out.push(Check::flag(format!("n={n}: S⁻S⁺ {name} ≃ {name}"), quasi_isomorphic(g, &mp, s.seed)?));
            let vd = Arc::new(verdier_dual(g)?);
            for (hname, h) in &gens {
                out.push(Check::new(
                    format!("n={n}: ε^V pairing ({name}, {hname})"),
                    rhom(&vd, h)?.cohomology(),
                    lab.diagonal_pairing(&st, g, h)?,
                ));
            }
        }
    }
    Ok(out)
}

fn infrastructure(s: &Settings) -> Result<Vec<Check>> {
    let f = s.field;
    let k = Graded::from_pairs(&[(0, 1)]);
    let k1 = Graded::from_pairs(&[(1, 1)]);
    let k01 = Graded::from_pairs(&[(0, 1), (1, 1)]);
    let mut out = Vec::new();
    let pt = SimplicialComplex::point().face_poset();
    let i = interval().face_poset();
    let c = triangle().face_poset();
    for (label, base, g, gc) in [("point", &pt, &k, &k), ("interval", &i, &k, &k), ("circle", &c, &k01, &k01)] {
        let sh = Sheaf::constant(base.clone(), f);
        out.push(Check::new(format!("Γ({label}; k)"), g, sh.global_sections().cohomology()));
        out.push(Check::new(format!("Γ_c({label}; k)"), gc, gamma_c(&sh).cohomology()));
    }
    let e = i.index_of("0-1").ok_or_else(|| Error::Precondition("interval has no edge".into()))?;
    let open = Sheaf::indicator(i.clone(), f, e);
    out.push(Check::new("Γ(open interval; k)", &k, open.restrict(&[e]).global_sections().cohomology()));
    out.push(Check::new("Γ_c(open interval; k)", &k1, gamma_c(&open).cohomology()));

    let unit = Arc::new(Complex::unit(f));
    for (label, base) in [("interval", &i), ("2-simplex", &SimplicialComplex::simplex(2).face_poset())] {
        let d = PosetDiagram::constant(Arc::new(base.poset().clone()), unit.clone());
        out.push(Check::new(format!("holim of constant k over the {label} poset"), &k, d.holim().cohomology()));
        out.push(Check::new(format!("hocolim of constant k over the {label} poset"), &k, d.hocolim().cohomology()));
    }
    let d = PosetDiagram::constant(Arc::new(c.poset().clone()), unit);
    out.push(Check::new("holim of constant k over the circle poset", &k01, d.holim().cohomology()));

    let mut labs = Vec::new();
    for n in 1..=3 {
        labs.push((format!("circle n={n}"), StopConfig::full_circle(n)));
    }
    labs.push(("interval k=1".to_string(), StopConfig::full_interval(1)));
    for (label, cfg) in labs {
        let lab = Lab::with_steps(&cfg, f, 6)?;
        for (name, d, ok) in lab.epsilon_stability(1, s.seed)? {
            out.push(Check::flag(format!("{label}: S{d}({name}) at ε and 2ε"), ok));
        }
    }
    Ok(out)
}
