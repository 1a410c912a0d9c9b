//! Command-line driver. Objects are looked up by name in the workspace
//! given with `--fixture`; results are printed in the workspace text
//! format or as plain tables, and checks go to the `--report` JSON file.

use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::complex::Graded;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::format::{kernel_document_in, sheaf_document_in, Item, SpaceDef, Workspace};
use crate::functors::{dualizing, gamma_c, naive_dual, standard_dual_sheaf, verdier_dual};
use crate::geometry::{MapKind, SimplicialComplex};
use crate::kernels::{self, check_triangles, convolve, hom_kernel, left_kan, reconstruct_kernel, DualityData, FunctorTable, Kernel};
use crate::microlocal::{microstalk, singular_support, ss_csv, SignAssignment};
use crate::resolution::{minimal_resolution, quasi_isomorphic, rhom};
use crate::sheaf::Sheaf;
use crate::verify::{self, Check, CriterionResult, Settings};
use crate::wrap1d::{Dir, Lab, StopConfig};

#[derive(Parser, Debug)]
#[command(name = "strata", version, about = "Exact computations with constructible sheaves on finite complexes")]
pub struct Cli {
    /// Coefficient field: q or fp:<p>.
    #[arg(long, global = true, default_value = "q")]
    pub field: Field,
    /// Size budget for enumerations.
    #[arg(long, global = true, default_value_t = 64)]
    pub budget: usize,
    /// Workspace file holding the named objects.
    #[arg(long, global = true)]
    pub fixture: Option<PathBuf>,
    /// Write a JSON report of all checks here.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Seed for randomized comparisons.
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    #[command(subcommand)]
    pub verb: Verb,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum DualKind {
    Naive,
    Verdier,
    Standard,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Sign {
    #[value(name = "+")]
    Plus,
    #[value(name = "-")]
    Minus,
}

#[derive(Subcommand, Debug)]
pub enum Verb {
    /// Cohomology of a complex, or stalk cohomology of a sheaf.
    Cohomology { name: String },
    /// Sections over a set of cells (all cells by default).
    Sections { sheaf: String, cells: Vec<String> },
    /// Compactly supported cohomology.
    Gammac { sheaf: String },
    /// Derived Hom between two sheaves.
    Hom { f: String, g: String },
    /// Internal Hom sheaf.
    Shom { f: String, g: String },
    Tensor { f: String, g: String },
    Boxtimes { f: String, g: String },
    /// Kernel convolution K ∘ F.
    Convolve { kernel: String, sheaf: String },
    /// Right adjoint kernel of G ∘ - evaluated at H.
    Homkernel { g: String, h: String },
    Dual {
        #[arg(value_enum)]
        kind: DualKind,
        sheaf: String,
    },
    /// Dualizing sheaf of a space.
    Omega { space: String },
    /// Microstalk at a cell and link signs such as `1+ 2-`.
    Microstalk { sheaf: String, cell: String, signs: Vec<String> },
    /// Singular support table.
    Ss {
        sheaf: String,
        /// Include sign assignments not known to be realizable.
        #[arg(long)]
        all: bool,
    },
    /// Minimal projective resolution.
    Resolve { sheaf: String },
    /// Left Kan extension along a refinement map.
    Localize { sheaf: String, map: String },
    /// Identity kernel of a simplicial space.
    Idkernel { space: String },
    CheckTriangles { space: String },
    /// Rebuild a kernel from its action on indicators.
    FmReconstruct { kernel: String },
    /// Wrap once (S⁺ or S⁻) every generator of a stop configuration.
    Wrap {
        #[arg(value_enum)]
        sign: Sign,
        stops: String,
        #[arg(long, default_value_t = 1)]
        eps: usize,
    },
    /// Graded dimension tables of the Serre-type duality.
    Sabloff {
        stops: String,
        #[arg(long, default_value_t = 1)]
        eps: usize,
    },
    /// Standard dual against wrapped naive dual, Verdier dual against unwrapped standard dual.
    VerdierCompare {
        stops: String,
        #[arg(long, default_value_t = 1)]
        eps: usize,
    },
    /// The full acceptance suite, plus checks of the fixture if given.
    VerifyAll,
}

#[derive(Serialize)]
struct Report<'a> {
    verb: &'a str,
    field: String,
    pass: bool,
    checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    criteria: Vec<CriterionResult>,
}

/// What a verb produced: text for stdout and checks for the report.
#[derive(Default)]
pub struct Outcome {
    pub text: String,
    pub checks: Vec<Check>,
    pub criteria: Vec<CriterionResult>,
}

impl Outcome {
    fn text(text: String) -> Outcome {
        Outcome { text, ..Outcome::default() }
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass) && self.criteria.iter().all(|c| c.pass())
    }
}

/// Parses arguments, runs the verb and returns the process exit code.
pub fn main_with_args<I: IntoIterator<Item = String>>(args: I) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Some(n) = cli.jobs {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            if let Some(path) = &cli.report {
                let report = Report {
                    verb: verb_name(&cli.verb),
                    field: cli.field.to_string(),
                    pass: out.pass(),
                    checks: out.checks.clone(),
                    criteria: out.criteria.clone(),
                };
                let json = serde_json::to_string_pretty(&report).expect("report serializes");
                if let Err(e) = std::fs::write(path, json + "\n") {
                    eprintln!("cannot write report {}: {e}", path.display());
                    return 3;
                }
            }
            if out.pass() {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn verb_name(v: &Verb) -> &'static str {
    match v {
        Verb::Cohomology { .. } => "cohomology",
        Verb::Sections { .. } => "sections",
        Verb::Gammac { .. } => "gammac",
        Verb::Hom { .. } => "hom",
        Verb::Shom { .. } => "shom",
        Verb::Tensor { .. } => "tensor",
        Verb::Boxtimes { .. } => "boxtimes",
        Verb::Convolve { .. } => "convolve",
        Verb::Homkernel { .. } => "homkernel",
        Verb::Dual { .. } => "dual",
        Verb::Omega { .. } => "omega",
        Verb::Microstalk { .. } => "microstalk",
        Verb::Ss { .. } => "ss",
        Verb::Resolve { .. } => "resolve",
        Verb::Localize { .. } => "localize",
        Verb::Idkernel { .. } => "idkernel",
        Verb::CheckTriangles { .. } => "check-triangles",
        Verb::FmReconstruct { .. } => "fm-reconstruct",
        Verb::Wrap { .. } => "wrap",
        Verb::Sabloff { .. } => "sabloff",
        Verb::VerdierCompare { .. } => "verdier-compare",
        Verb::VerifyAll => "verify-all",
    }
}

fn load(cli: &Cli) -> Result<Workspace> {
    let path = cli
        .fixture
        .as_ref()
        .ok_or_else(|| Error::Precondition("this verb needs --fixture <path>".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| Error::Precondition(format!("cannot read {}: {e}", path.display())))?;
    let ws = Workspace::parse(&text)?;
    if ws.field != cli.field && cli.field != Field::Rationals {
        return Err(Error::Precondition(format!("fixture is over {}, requested {}", ws.field, cli.field)));
    }
    Ok(ws)
}

fn stalk_table(f: &Sheaf) -> String {
    let mut out = String::new();
    for (s, g) in f.stalk_cohomology().iter().enumerate() {
        out.push_str(&format!("{}\t{}\n", f.base().name(s), g));
    }
    out
}

fn graded_line(g: &Graded) -> String {
    format!("{g}\n")
}

fn simplicial_of(ws: &Workspace, space: &str) -> Result<SimplicialComplex> {
    match &ws.space(space)?.def {
        SpaceDef::Simplicial(k) => Ok(k.clone()),
        _ => Err(Error::Precondition(format!("'{space}' is not a simplicial space"))),
    }
}

fn stops_of(cli: &Cli, name: &str) -> Result<StopConfig> {
    if let Some(Ok(ws)) = cli.fixture.as_ref().map(|_| load(cli)) {
        if let Ok(s) = ws.stops(name) {
            return Ok(s.clone());
        }
    }
    let text = std::fs::read_to_string(name).map_err(|_| Error::Precondition(format!("no stop configuration '{name}'")))?;
    StopConfig::parse(&text)
}

fn parse_signs(base: &crate::geometry::FacePoset, cell: usize, signs: &[String]) -> Result<SignAssignment> {
    let mut pairs = Vec::new();
    for s in signs {
        let (v, p) = match s.strip_suffix('+') {
            Some(v) => (v, true),
            None => (s.strip_suffix('-').ok_or_else(|| Error::Precondition(format!("sign '{s}' must end in + or -")))?, false),
        };
        let id = base
            .vertex_names()
            .iter()
            .position(|n| n == v)
            .ok_or_else(|| Error::Precondition(format!("unknown vertex '{v}'")))?;
        pairs.push((id, p));
    }
    if pairs.is_empty() {
        return Ok(SignAssignment::all_positive(base, cell));
    }
    SignAssignment::new(base, cell, &pairs)
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let field = cli.field;
    match &cli.verb {
        Verb::VerifyAll => {
            let settings = Settings { field, budget: cli.budget, seed: cli.seed };
            let mut criteria = verify::run_all(&settings);
            if cli.fixture.is_some() {
                criteria.push(verify::check_workspace(&load(cli)?, cli.seed));
            }
            let mut text = String::new();
            for r in &criteria {
                text.push_str(&format!("{} {} ({} checks)\n", if r.pass() { "PASS" } else { "FAIL" }, r.title, r.checks.len()));
            }
            Ok(Outcome { text, checks: Vec::new(), criteria })
        }
        Verb::Wrap { sign, stops, eps } => {
            let lab = Lab::new(&stops_of(cli, stops)?, field)?;
            let d = match sign {
                Sign::Plus => Dir::Plus,
                Sign::Minus => Dir::Minus,
            };
            let gens = lab.generators()?;
            let mut text = String::new();
            for (name, g) in &gens {
                let w = Arc::new(lab.wrap(g, d, *eps)?);
                let mut hit = None;
                'search: for (other, h) in &gens {
                    for k in -3..=3 {
                        if quasi_isomorphic(h, &Arc::new(w.shift(k)), cli.seed)? {
                            hit = Some(format!("{other}[{k}]"));
                            break 'search;
                        }
                    }
                }
                let total = w.stalk_cohomology().iter().fold(Graded::new(), |a, b| a.sum(b));
                text.push_str(&format!("S{d}({name}) ≅ {}\ttotal stalks {total}\n", hit.unwrap_or_else(|| "no shifted generator".into())));
            }
            Ok(Outcome::text(text))
        }
        Verb::Sabloff { stops, eps } => {
            let lab = Lab::new(&stops_of(cli, stops)?, field)?;
            let mut out = Outcome::default();
            out.text.push_str("F\tG\tHom(TF,G⊗ω)\tHom(F,T⁻G⊗ω)\tp!(DF⊗G)\tHom(G,F)^∨\tHom(SF,G⊗ω)\n");
            for r in lab.sabloff_serre(*eps)? {
                out.text.push_str(&format!("{}\t{}\t{}\t{}\t{}\t{}\t{}\n", r.f, r.g, r.pushed, r.pulled, r.compact, r.dual, r.wrapped));
                out.checks.push(Check::flag(format!("({}, {}) tables agree", r.f, r.g), r.agree()));
            }
            Ok(out)
        }
        Verb::VerdierCompare { stops, eps } => {
            let lab = Lab::new(&stops_of(cli, stops)?, field)?;
            let mut out = Outcome::default();
            for r in lab.verdier_standard_compare(*eps, cli.seed)? {
                out.text.push_str(&format!(
                    "{}\tSD≃S⁺(naive dual): {}\tVD≃S⁻(SD)⊗ω: {}\n",
                    r.generator, r.standard_is_wrapped_naive, r.verdier_is_unwrapped_standard
                ));
                out.checks.push(Check::flag(format!("SD({}) ≃ S⁺ naive", r.generator), r.standard_is_wrapped_naive));
                out.checks.push(Check::flag(format!("VD({}) ≃ S⁻ SD ⊗ ω", r.generator), r.verdier_is_unwrapped_standard));
            }
            Ok(out)
        }
        _ => run_on_workspace(cli, &load(cli)?),
    }
}

fn run_on_workspace(cli: &Cli, ws: &Workspace) -> Result<Outcome> {
    let sheaf = |n: &str| -> Result<Arc<Sheaf>> { ws.sheaf(n).cloned() };
    match &cli.verb {
        Verb::Cohomology { name } => match ws.get(name)? {
            Item::Complex(c) => Ok(Outcome::text(graded_line(&c.cohomology()))),
            _ => Ok(Outcome::text(stalk_table(&*sheaf(name)?))),
        },
        Verb::Sections { sheaf: n, cells } => {
            let f = sheaf(n)?;
            let c = if cells.is_empty() {
                f.global_sections()
            } else {
                let names: Vec<&str> = cells.iter().map(String::as_str).collect();
                f.sections(&f.base().parse_set(&names)?)?
            };
            Ok(Outcome::text(graded_line(&c.cohomology())))
        }
        Verb::Gammac { sheaf: n } => Ok(Outcome::text(graded_line(&gamma_c(&*sheaf(n)?).cohomology()))),
        Verb::Hom { f, g } => Ok(Outcome::text(graded_line(&rhom(&sheaf(f)?, &*sheaf(g)?)?.cohomology()))),
        Verb::Shom { f, g } => Ok(Outcome::text(sheaf_document_in(Some(ws), "shom", &Sheaf::sheaf_hom(&*sheaf(f)?, &*sheaf(g)?)?))),
        Verb::Tensor { f, g } => Ok(Outcome::text(sheaf_document_in(Some(ws), "tensor", &Sheaf::tensor(&*sheaf(f)?, &*sheaf(g)?)?))),
        Verb::Boxtimes { f, g } => Ok(Outcome::text(sheaf_document_in(Some(ws), "boxtimes", &kernels::boxtimes(&*sheaf(f)?, &*sheaf(g)?)?))),
        Verb::Convolve { kernel, sheaf: n } => {
            let k = ws.kernel(kernel)?;
            let f = sheaf(n)?;
            if k.source().as_ref() != f.base().as_ref() {
                return Err(Error::BaseMismatch(format!("kernel '{kernel}' does not act on the base of '{n}'")));
            }
            Ok(Outcome::text(sheaf_document_in(Some(ws), "convolved", &convolve(k, &f)?)))
        }
        Verb::Homkernel { g, h } => {
            let k = hom_kernel(ws.kernel(g)?, ws.kernel(h)?, cli.budget)?;
            Ok(Outcome::text(kernel_document_in(Some(ws), "homkernel", &k)?))
        }
        Verb::Dual { kind, sheaf: n } => {
            let f = sheaf(n)?;
            let d = match kind {
                DualKind::Naive => naive_dual(&f)?,
                DualKind::Verdier => verdier_dual(&f)?,
                DualKind::Standard => standard_dual_sheaf(&f),
            };
            Ok(Outcome::text(sheaf_document_in(Some(ws), "dual", &d)))
        }
        Verb::Omega { space } => Ok(Outcome::text(sheaf_document_in(Some(ws), "omega", &dualizing(&ws.space(space)?.poset, ws.field)))),
        Verb::Microstalk { sheaf: n, cell, signs } => {
            let f = sheaf(n)?;
            let s = f.base().index_of(cell).ok_or_else(|| Error::Precondition(format!("unknown cell '{cell}'")))?;
            let xi = parse_signs(f.base(), s, signs)?;
            Ok(Outcome::text(graded_line(&microstalk(&f, &xi)?.cohomology())))
        }
        Verb::Ss { sheaf: n, all } => Ok(Outcome::text(ss_csv(&singular_support(&*sheaf(n)?, cli.budget, *all)?))),
        Verb::Resolve { sheaf: n } => {
            let f = sheaf(n)?;
            let r = minimal_resolution(&f);
            let mut text = String::new();
            for g in r.complex.gens() {
                text.push_str(&format!("1_{}\t{}\n", f.base().name(g.label), g.degree));
            }
            Ok(Outcome::text(text))
        }
        Verb::Localize { sheaf: n, map } => {
            let q = ws.map(map)?;
            q.require(MapKind::Refinement)?;
            Ok(Outcome::text(sheaf_document_in(Some(ws), "localized", &left_kan(q, &sheaf(n)?)?)))
        }
        Verb::Idkernel { space } => {
            let k = kernels::identity_kernel(&simplicial_of(ws, space)?, ws.field)?;
            Ok(Outcome::text(kernel_document_in(Some(ws), "eta", &k)?))
        }
        Verb::CheckTriangles { space } => {
            let data = DualityData::new(&simplicial_of(ws, space)?, ws.field)?;
            let mut out = Outcome::default();
            for r in check_triangles(&data, cli.seed)? {
                out.text.push_str(&format!("{}\t{}\n", r.name, if r.passed() { "identity" } else { "NOT identity" }));
                for g in &r.generators {
                    out.checks.push(Check::flag(format!("{} on 1_{}", r.name, g.generator), g.quasi_iso));
                }
                out.checks.push(Check::flag(format!("{} kernel ≃ η", r.name), r.kernel_quasi_iso));
            }
            Ok(out)
        }
        Verb::FmReconstruct { kernel } => {
            let (source, target) = match ws.get(kernel)? {
                Item::Kernel { source, target, .. } => (source.clone(), target.clone()),
                _ => return Err(Error::Precondition(format!("'{kernel}' is not a kernel"))),
            };
            if source != target {
                return Err(Error::Precondition("reconstruction needs a kernel from a space to itself".into()));
            }
            let data = DualityData::new(&simplicial_of(ws, &source)?, ws.field)?;
            let k = ws.kernel(kernel)?;
            let k = Kernel::new(Arc::new(k.sheaf().rebase(data.eta.sheaf().base().clone())?), data.base.clone(), data.base.clone())?;
            let r = reconstruct_kernel(&FunctorTable::of_kernel(&k)?, &data.eta_complex)?;
            let ok = quasi_isomorphic(k.sheaf(), r.sheaf(), cli.seed)?;
            Ok(Outcome {
                text: kernel_document_in(Some(ws), "reconstructed", &r)?,
                checks: vec![Check::flag(format!("reconstruct({kernel}) ≃ {kernel}"), ok)],
                criteria: Vec::new(),
            })
        }
        Verb::Wrap { .. } | Verb::Sabloff { .. } | Verb::VerdierCompare { .. } | Verb::VerifyAll => unreachable!("handled without a workspace"),
    }
}
