use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ncpb_core::algebra::{center, verify_algebra, Element, StructureAlgebra};
use ncpb_core::bundle::{
    certify_trivial, clock_shift_system, dual_system, fourier_decompose, spectrum_action, trivialize_covering,
    CertifyOutcome, DynamicalSystem, WitnessSearch,
};
use ncpb_core::catalog::export_catalog;
use ncpb_core::cohomology::{
    bilinear_cocycle, class_is_trivial, h2_bruteforce, h2_circle_bruteforce, h2_circle_snf, h2_circle_structural,
    h2_snf, h2_trivial_structural, h2_twisted_structural, is_cocycle, CohomologyResult, CoeffModule, DEFAULT_BUDGET,
};
use ncpb_core::crossed::{
    build_crossed_product, build_equivalence, extract_characteristic_class, restrict_and_test_split, scalar_class,
    GradedAlgebra, GradedSection,
};
use ncpb_core::crosscheck::{cross_check, Level};
use ncpb_core::factor::{kernel_equivalent, nu_obstruction, validate_factor_system, FactorSystem, UnitCochain};
use ncpb_core::io::{
    algebra_doc, algebra_from_doc, certificate_doc, certificate_from_doc, cochain_from_doc, element_from_value,
    factor_system_doc, factor_system_from_doc, graded_doc, graded_from_doc, load_document, system_doc,
    system_from_doc, to_json, Document,
};
use ncpb_core::report::{Report, Status};
use ncpb_core::{Cyclo, Error, FinAbGroup};

type D = Document<Cyclo>;

#[derive(Parser)]
#[command(name = "ncpb", version, about = "Exact workbench for crossed products and trivial noncommutative principal bundles")]
struct Cli {
    /// Work in Q(ζ_N): loaded scalars must lie there and witness searches
    /// scale candidates by μ_N. Defaults to 2 for searches.
    #[arg(long, global = true)]
    conductor: Option<u64>,
    /// Enumeration budget; exceeding it yields status "refused".
    #[arg(long, global = true)]
    budget: Option<u128>,
    /// Directory that relative file arguments and outputs resolve against.
    #[arg(long, global = true)]
    workspace: Option<PathBuf>,
    /// Machine-readable output (the default).
    #[arg(long, global = true)]
    json: bool,
    #[arg(long, global = true)]
    pretty: bool,
    /// Print wall-clock time to stderr.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    #[command(subcommand)]
    Group(GroupCmd),
    #[command(subcommand)]
    Algebra(AlgebraCmd),
    #[command(subcommand)]
    Cohomology(CohomologyCmd),
    #[command(subcommand, name = "factor-system")]
    FactorSystem(FactorCmd),
    #[command(subcommand, name = "crossed-product")]
    CrossedProduct(CrossedCmd),
    #[command(subcommand)]
    Bundle(BundleCmd),
    #[command(subcommand)]
    Example(ExampleCmd),
}

#[derive(Subcommand)]
enum GroupCmd {
    /// Orders, exponent, canonical generators and dual characters.
    Info {
        #[arg(long)]
        orders: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Invariant factors of G/H for H generated by `;`-separated elements.
    Quotient {
        #[arg(long)]
        orders: String,
        #[arg(long)]
        sub: String,
    },
}

#[derive(Subcommand)]
enum AlgebraCmd {
    /// `matrix:m`, `group:n1,n2,…` or `functions:n`.
    Build {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-verifies every axiom of the algebra in a document.
    Verify {
        #[arg(long)]
        file: PathBuf,
    },
    Center {
        #[arg(long)]
        file: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum H2Method {
    Bruteforce,
    Snf,
    Structural,
    All,
}

#[derive(Subcommand)]
enum CohomologyCmd {
    /// H²(G, M) with trivial or twisted action; `--module circle` for C^×.
    H2 {
        #[arg(long)]
        group: String,
        /// `mu:N`, `add:n1,n2,…` or `circle`.
        #[arg(long)]
        module: String,
        #[arg(long, value_enum, default_value = "all")]
        method: H2Method,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cocycle test and coboundary search for a stored cochain.
    Cocycle {
        #[arg(long)]
        file: PathBuf,
    },
    /// The bilinear cocycle ζ^(b·c) on C_n × C_n.
    Bilinear {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum FactorCmd {
    /// B[G] with trivial action and cocycle, B read from an algebra document.
    Trivial {
        #[arg(long)]
        group: String,
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// (id, ω) over C from a stored μ_N-valued 2-cochain.
    Scalar {
        #[arg(long)]
        cochain: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Validate {
        #[arg(long)]
        file: PathBuf,
    },
    /// The obstruction class of the underlying outer action.
    Obstruction {
        #[arg(long)]
        file: PathBuf,
    },
    /// Whether the outer actions of two factor systems over cyclic G are
    /// equivalent as kernels.
    Kernel {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        other: PathBuf,
    },
}

#[derive(Subcommand)]
enum CrossedCmd {
    Build {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Finds a section of homogeneous units and extracts the factor system.
    Class {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The graded isomorphism A_{h.(S,ω)} → A_{(S,ω)}; `--h` holds a JSON
    /// array with one algebra element per group element.
    Equiv {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        h: PathBuf,
    },
    /// Restricts to the cyclic subgroup of `--generator` and searches a
    /// split unit over μ_N.
    Split {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        generator: String,
    },
}

#[derive(Subcommand)]
enum BundleCmd {
    /// Dual action of a graded algebra.
    Dual {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Decompose {
        #[arg(long)]
        system: PathBuf,
    },
    Certify {
        #[arg(long)]
        system: PathBuf,
        /// A certificate document or a JSON array of elements.
        #[arg(long)]
        witnesses: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Trivialize {
        #[arg(long)]
        system: PathBuf,
        /// Defaults to the certificate stored in a catalog file.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ExampleCmd {
    #[command(name = "clock-shift")]
    ClockShift {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Writes the example gallery, one JSON file per entry.
    Catalog {
        #[arg(long)]
        out: PathBuf,
    },
    #[command(name = "cross-check")]
    CrossCheck(CrossCheckArgs),
}

#[derive(Args)]
struct CrossCheckArgs {
    #[arg(long, value_enum, default_value = "quick")]
    level: LevelArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

/// Bad invocations and unreadable input map to exit code 3; mathematical
/// errors become a report.
enum Failure {
    Usage(anyhow::Error),
    Math(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Math(e)
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

type Out = std::result::Result<Report, Failure>;

struct Ctx {
    conductor: Option<u64>,
    budget: u128,
    workspace: Option<PathBuf>,
    pretty: bool,
    timing: bool,
    argv: Vec<String>,
}

impl Ctx {
    fn report(&self) -> Report {
        Report::new(self.argv.clone())
    }

    fn torsion(&self) -> u64 {
        self.conductor.unwrap_or(2)
    }

    fn path(&self, p: &Path) -> PathBuf {
        match &self.workspace {
            Some(w) if p.is_relative() => w.join(p),
            _ => p.to_path_buf(),
        }
    }

    fn read(&self, p: &Path) -> anyhow::Result<ncpb_core::io::Loaded<Cyclo>> {
        let path = self.path(p);
        let text = fs::read_to_string(&path).with_context(|| format!("cannot read {}", path.display()))?;
        let value: Value = serde_json::from_str(&text).with_context(|| format!("malformed JSON in {}", path.display()))?;
        if let Some(n) = self.conductor {
            check_conductors(&value, n).with_context(|| format!("in {}", path.display()))?;
        }
        load_document(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
    }

    fn doc(&self, p: &Path) -> anyhow::Result<D> {
        Ok(self.read(p)?.doc)
    }

    fn write(&self, p: &Path, doc: &D, report: &mut Report) -> anyhow::Result<()> {
        let path = self.path(p);
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        }
        let text = to_json(doc, true)? + "\n";
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
        report.check(format!("wrote {} document to {}", doc.kind(), p.display()));
        Ok(())
    }

    fn maybe_write(&self, out: &Option<PathBuf>, doc: &D, report: &mut Report) -> anyhow::Result<()> {
        match out {
            Some(p) => self.write(p, doc, report),
            None => Ok(()),
        }
    }
}

fn check_conductors(v: &Value, n: u64) -> anyhow::Result<()> {
    match v {
        Value::Object(m) => {
            if let (Some(c), Some(_)) = (m.get("conductor").and_then(Value::as_u64), m.get("coeffs")) {
                if c == 0 || n % c != 0 {
                    bail!("scalar of conductor {c} does not lie in Q(ζ_{n})");
                }
            }
            m.values().try_for_each(|x| check_conductors(x, n))
        }
        Value::Array(xs) => xs.iter().try_for_each(|x| check_conductors(x, n)),
        _ => Ok(()),
    }
}

fn parse_ints(s: &str) -> anyhow::Result<Vec<i64>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<i64>().with_context(|| format!("not an integer: {t:?}")))
        .collect()
}

fn parse_group(s: &str) -> anyhow::Result<FinAbGroup> {
    let orders = parse_ints(s)?
        .into_iter()
        .map(|x| u64::try_from(x).map_err(|_| anyhow!("negative order {x}")))
        .collect::<anyhow::Result<Vec<_>>>()?;
    FinAbGroup::new(orders).map_err(|e| anyhow!("--group/--orders: {e}"))
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn algebra_of(doc: &D) -> anyhow::Result<&ncpb_core::io::AlgebraDoc<Cyclo>> {
    match doc {
        Document::Algebra { algebra }
        | Document::FactorSystem { algebra, .. }
        | Document::GradedAlgebra { algebra, .. }
        | Document::DynamicalSystem { algebra, .. } => Ok(algebra),
        other => bail!("a {} document carries no algebra", other.kind()),
    }
}

fn cohomology_payload(results: &[CohomologyResult]) -> Value {
    Value::Array(
        results
            .iter()
            .map(|r| {
                json!({
                    "method": r.method.to_string(),
                    "factors": r.factors,
                    "order": r.order().to_string(),
                    "cocycles": r.cocycles.map(|c| c.to_string()),
                    "coboundaries": r.coboundaries.map(|c| c.to_string()),
                })
            })
            .collect(),
    )
}

fn run(ctx: &Ctx, cmd: &Command) -> Out {
    match cmd {
        Command::Group(c) => group(ctx, c),
        Command::Algebra(c) => algebra(ctx, c),
        Command::Cohomology(c) => cohomology(ctx, c),
        Command::FactorSystem(c) => factor(ctx, c),
        Command::CrossedProduct(c) => crossed(ctx, c),
        Command::Bundle(c) => bundle(ctx, c),
        Command::Example(c) => example(ctx, c),
    }
}

fn group(ctx: &Ctx, cmd: &GroupCmd) -> Out {
    let mut r = ctx.report();
    match cmd {
        GroupCmd::Info { orders, out } => {
            let g = parse_group(orders)?;
            let (gens, chars) = g.canonical_generators();
            r.payload = json!({
                "orders": g.orders(),
                "order": g.order(),
                "exponent": g.exponent(),
                "generators": gens.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                "characters": chars.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            });
            r.check(format!("{g} has {} elements", g.order()));
            ctx.maybe_write(out, &Document::Group { group: g }, &mut r)?;
        }
        GroupCmd::Quotient { orders, sub } => {
            let g = parse_group(orders)?;
            let gens = sub
                .split(';')
                .filter(|t| !t.trim().is_empty())
                .map(|t| g.element(&parse_ints(t)?).map_err(|e| anyhow!("--sub: {e}")))
                .collect::<anyhow::Result<Vec<_>>>()?;
            let h = g.subgroup_closure(&gens)?;
            let q = g.quotient_invariants(&h)?;
            let coset_count = g.order() / h.order();
            if q.iter().product::<u64>() as usize != coset_count {
                r.fail(format!("quotient invariants {q:?} do not account for {coset_count} cosets"));
            }
            r.check(format!("|H| = {}, {} cosets", h.order(), coset_count));
            r.payload = json!({ "subgroup_order": h.order(), "quotient": q });
        }
    }
    Ok(r)
}

fn algebra(ctx: &Ctx, cmd: &AlgebraCmd) -> Out {
    let mut r = ctx.report();
    match cmd {
        AlgebraCmd::Build { kind, out } => {
            let (name, arg) = kind.split_once(':').ok_or_else(|| anyhow!("--kind must be matrix:m, group:… or functions:n"))?;
            let a: StructureAlgebra<Cyclo> = match name {
                "matrix" => StructureAlgebra::matrix_algebra(arg.parse().context("matrix size")?)?,
                "group" => StructureAlgebra::group_algebra(&parse_group(arg)?),
                "functions" => StructureAlgebra::function_algebra(arg.parse().context("point count")?)?,
                other => return Err(anyhow!("unknown algebra kind {other:?}").into()),
            };
            let v = verify_algebra(&a);
            if let Some(f) = v.failure {
                r.fail(f.to_string());
            }
            r.check(format!("algebra axioms ({} checks)", v.checks));
            r.payload = json!({ "dim": a.dim(), "labels": a.labels() });
            ctx.maybe_write(out, &Document::Algebra { algebra: algebra_doc(&a) }, &mut r)?;
        }
        AlgebraCmd::Verify { file } => {
            let doc = ctx.doc(file)?;
            let a = algebra_from_doc(algebra_of(&doc)?)?;
            let v = verify_algebra(&a);
            r.check(format!("algebra axioms ({} checks)", v.checks));
            r.payload = json!({
                "dim": a.dim(),
                "commutative": a.is_commutative(),
                "involution": a.involution().is_some(),
            });
        }
        AlgebraCmd::Center { file } => {
            let doc = ctx.doc(file)?;
            let a = algebra_from_doc(algebra_of(&doc)?)?;
            let z = center(&a);
            r.check(format!("center has dimension {}", z.len()));
            r.payload = json!({ "dim": z.len(), "basis": to_value(&z) });
        }
    }
    Ok(r)
}

fn cohomology(ctx: &Ctx, cmd: &CohomologyCmd) -> Out {
    let mut r = ctx.report();
    match cmd {
        CohomologyCmd::H2 { group, module, method, out } => {
            let g = parse_group(group)?;
            let all = matches!(method, H2Method::All);
            let want = |m: H2Method| all || std::mem::discriminant(&m) == std::mem::discriminant(method);
            let mut results = Vec::new();
            if module == "circle" {
                if want(H2Method::Bruteforce) {
                    results.push(h2_circle_bruteforce(&g, ctx.budget)?);
                }
                if want(H2Method::Snf) {
                    results.push(h2_circle_snf(&g)?);
                }
                if want(H2Method::Structural) {
                    results.push(h2_circle_structural(&g));
                }
            } else {
                let m = CoeffModule::parse(module).map_err(|e| anyhow!("--module: {e}"))?;
                if want(H2Method::Bruteforce) {
                    results.push(h2_bruteforce(&g, &m, ctx.budget)?);
                }
                if want(H2Method::Snf) {
                    results.push(h2_snf(&g, &m)?);
                }
                if want(H2Method::Structural) {
                    results.push(if g.rank() <= 1 {
                        h2_twisted_structural(g.order() as u64, &m)?
                    } else {
                        h2_trivial_structural(&g, &m)?
                    });
                }
            }
            let first = results[0].factors.clone();
            r.payload = json!({ "factors": first, "methods": cohomology_payload(&results) });
            if results.iter().all(|x| x.factors == first) {
                r.check(format!("H²({g}, {module}) ≅ {first:?} by {} method(s)", results.len()));
            } else {
                r.fail("methods disagree");
            }
            if let Some(p) = out {
                ctx.write(p, &Document::Cohomology { result: results[0].clone() }, &mut r)?;
            }
        }
        CohomologyCmd::Cocycle { file } => {
            let c = cochain_from_doc(&ctx.doc(file)?)?;
            let check = is_cocycle(&c)?;
            r.payload = json!({ "degree": c.degree, "cocycle": check.ok });
            if !check.ok {
                r.fail(format!(
                    "not a cocycle at {:?}",
                    check.witness.map(|w| w.map(|x| x.to_string()))
                ));
                return Ok(r);
            }
            r.check("d ω = 0");
            let t = class_is_trivial(&c, ctx.budget)?;
            r.check(if t.is_some() { "class is trivial" } else { "class is nontrivial" });
            r.payload["trivial"] = json!(t.is_some());
            r.payload["trivializer"] = json!(t.map(|x| x.table));
        }
        CohomologyCmd::Bilinear { n, out } => {
            let c = bilinear_cocycle(*n)?;
            r.check(format!("ζ_{n}^(b·c) on C_{n}×C_{n}"));
            r.payload = json!({ "n": n, "table": c.table });
            ctx.maybe_write(out, &Document::Cochain { cochain: c }, &mut r)?;
        }
    }
    Ok(r)
}

fn load_factor(ctx: &Ctx, file: &Path) -> std::result::Result<FactorSystem<Cyclo>, Failure> {
    Ok(factor_system_from_doc(&ctx.doc(file)?)?)
}

fn factor(ctx: &Ctx, cmd: &FactorCmd) -> Out {
    let mut r = ctx.report();
    match cmd {
        FactorCmd::Trivial { group, algebra, out } => {
            let g = parse_group(group)?;
            let b = algebra_from_doc(algebra_of(&ctx.doc(algebra)?)?)?;
            let fs = FactorSystem::trivial(&g, &b);
            r.check("trivial action and cocycle");
            r.payload = json!({ "group": g.orders(), "base_dim": b.dim() });
            ctx.maybe_write(out, &factor_system_doc(&fs), &mut r)?;
        }
        FactorCmd::Scalar { cochain, out } => {
            let c = cochain_from_doc(&ctx.doc(cochain)?)?;
            let fs = FactorSystem::scalar(&c.group, &StructureAlgebra::matrix_algebra(1)?, &c)?;
            let v = validate_factor_system(&fs);
            match &v.failure {
                Some(f) => r.fail(f.to_string()),
                None => r.check(format!("factor system identities ({} checks)", v.checks)),
            }
            r.payload = json!({ "group": c.group.orders(), "valid": v.ok() });
            ctx.maybe_write(out, &factor_system_doc(&fs), &mut r)?;
        }
        FactorCmd::Validate { file } => {
            let fs = load_factor(ctx, file)?;
            let v = validate_factor_system(&fs);
            r.check(format!("factor system identities ({} checks)", v.checks));
            r.payload = json!({ "group": fs.group().orders(), "base_dim": fs.algebra().dim() });
        }
        FactorCmd::Obstruction { file } => {
            let fs = load_factor(ctx, file)?;
            let ob = nu_obstruction(&fs.action, None, ctx.budget)?;
            r.payload = json!({
                "trivial": ob.is_trivial(),
                "values": ob.values.table,
                "witness": ob.witness.as_ref().map(|w| w.table.clone()),
            });
            if ob.is_trivial() {
                r.check("d_S ω is a coboundary; the corrected ω' validates");
            } else {
                r.fail("obstruction class is nontrivial over the searched torsion");
            }
        }
        FactorCmd::Kernel { file, other } => {
            let a = load_factor(ctx, file)?;
            let b = load_factor(ctx, other)?;
            let kw = kernel_equivalent(&a.action, &b.action, ctx.budget)?;
            r.payload = json!({
                "equivalent": kw.is_some(),
                "h": kw.as_ref().map(|k| to_value(&k.h.units.iter().map(|u| u.value.clone()).collect::<Vec<_>>())),
            });
            match kw {
                Some(_) => r.check("S' = C(h)·S with d_S h = 1"),
                None => r.fail("no witness h within the search"),
            }
        }
    }
    Ok(r)
}

fn crossed(ctx: &Ctx, cmd: &CrossedCmd) -> Out {
    let mut r = ctx.report();
    match cmd {
        CrossedCmd::Build { file, out } => {
            let fs = load_factor(ctx, file)?;
            let a = build_crossed_product(&fs)?;
            let v = verify_algebra(&a.algebra);
            if let Some(f) = &v.failure {
                r.fail(f.to_string());
            }
            r.check(format!("crossed product axioms ({} checks)", v.checks));
            r.payload = json!({
                "dim": a.dim(),
                "involution": a.algebra.involution().is_some(),
                "labels": a.algebra.labels(),
            });
            ctx.maybe_write(out, &graded_doc(&a), &mut r)?;
        }
        CrossedCmd::Class { file, out } => {
            let a = graded_from_doc(&ctx.doc(file)?)?;
            let sigma = GradedSection::find(&a, ctx.budget)?;
            let fs = extract_characteristic_class(&a, &sigma)?;
            r.check("section of homogeneous units found; extracted (S, ω) validates");
            r.payload = json!({ "group": a.group.orders(), "base_dim": a.base.dim() });
            if fs.algebra().dim() == 1 {
                let n = a.group.exponent();
                let c = scalar_class(&fs, n).or_else(|_| scalar_class(&fs, 2 * n));
                match c {
                    Ok(c) => {
                        r.payload["class_order_circle"] =
                            json!(ncpb_core::cohomology::h2_circle_presentation(&a.group, c.module.order() as u64)?.class_order(&c)?);
                    }
                    Err(e) => r.check(format!("class not recorded: {e}")),
                }
            }
            ctx.maybe_write(out, &factor_system_doc(&fs), &mut r)?;
        }
        CrossedCmd::Equiv { file, h } => {
            let fs = load_factor(ctx, file)?;
            let path = ctx.path(h);
            let text = fs::read_to_string(&path).with_context(|| format!("cannot read {}", path.display()))?;
            let value: Value = serde_json::from_str(&text).with_context(|| format!("malformed JSON in {}", path.display()))?;
            let items = value.as_array().ok_or_else(|| anyhow!("{}: expected an array of elements", path.display()))?;
            let d = fs.algebra().dim();
            let values = items
                .iter()
                .map(|v| element_from_value::<Cyclo>(v, d))
                .collect::<ncpb_core::Result<Vec<Element<Cyclo>>>>()
                .map_err(|e| anyhow!("{}: {e}", path.display()))?;
            let h = UnitCochain::new(fs.group(), fs.algebra(), values)?;
            let eq = build_equivalence(&fs, &h)?;
            r.check("φ(b v_g) = b h(g) v_g is a graded isomorphism A_{h.(S,ω)} → A_(S,ω)");
            r.payload = json!({ "dim": eq.source.dim(), "map": to_value(&eq.map.matrix.to_rows()) });
        }
        CrossedCmd::Split { file, generator } => {
            let fs = load_factor(ctx, file)?;
            let g = fs.group().element(&parse_ints(generator)?).map_err(|e| anyhow!("--generator: {e}"))?;
            let t = restrict_and_test_split(&fs, &g, ctx.torsion())?;
            r.payload = json!({
                "generator": g.to_string(),
                "order": t.order,
                "split": t.split(),
                "candidates": t.candidates_tried,
                "witness": t.witness.as_ref().map(to_value),
            });
            if t.split() {
                r.check(format!("restriction to ⟨{g}⟩ splits over μ_{}", ctx.torsion()));
            } else {
                r.fail(format!("no split unit among {} candidates over μ_{}", t.candidates_tried, ctx.torsion()));
            }
        }
    }
    Ok(r)
}

fn load_system(ctx: &Ctx, file: &Path) -> std::result::Result<(DynamicalSystem<Cyclo>, Option<D>), Failure> {
    let loaded = ctx.read(file)?;
    let ds = match &loaded.doc {
        Document::GradedAlgebra { .. } => dual_system(&graded_from_doc(&loaded.doc)?)?,
        doc => system_from_doc(doc)?,
    };
    Ok((ds, loaded.certificate))
}

fn certify_payload(ds: &DynamicalSystem<Cyclo>, outcome: &CertifyOutcome<Cyclo>) -> Value {
    match outcome {
        CertifyOutcome::Certified(c) => json!({
            "certified": true,
            "group": ds.group.orders(),
            "certificate": to_value(&certificate_doc(c)),
        }),
        CertifyOutcome::Failed(f) => json!({
            "certified": false,
            "group": ds.group.orders(),
            "failures": to_value(f),
        }),
    }
}

fn bundle(ctx: &Ctx, cmd: &BundleCmd) -> Out {
    let mut r = ctx.report();
    match cmd {
        BundleCmd::Dual { file, out } => {
            let a: GradedAlgebra<Cyclo> = graded_from_doc(&ctx.doc(file)?)?;
            let ds = dual_system(&a)?;
            r.check("dual action verified on generators");
            r.payload = json!({ "group": ds.group.orders(), "dim": ds.algebra.dim() });
            ctx.maybe_write(out, &system_doc(&ds), &mut r)?;
        }
        BundleCmd::Decompose { system } => {
            let (ds, _) = load_system(ctx, system)?;
            let dec = fourier_decompose(&ds)?;
            r.check("projections certified on the isotypic bases");
            r.payload = json!({
                "characters": dec.characters.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "dims": dec.dims(),
                "bases": to_value(&dec.bases),
            });
        }
        BundleCmd::Certify { system, witnesses, out } => {
            let (ds, _) = load_system(ctx, system)?;
            let given = match witnesses {
                None => None,
                Some(p) => Some(read_witnesses(ctx, p, &ds)?),
            };
            let search = WitnessSearch {
                torsion: ctx.torsion(),
                budget: ctx.budget,
                ..WitnessSearch::default()
            };
            let outcome = certify_trivial(&ds, given.as_deref(), &search)?;
            r.payload = certify_payload(&ds, &outcome);
            match &outcome {
                CertifyOutcome::Certified(c) => {
                    for line in &c.transcript {
                        r.check(line.clone());
                    }
                    ctx.maybe_write(out, &certificate_doc(c), &mut r)?;
                }
                CertifyOutcome::Failed(f) => {
                    let why: Vec<String> = f.iter().map(|x| format!("{}: {}", x.generator, x.failure)).collect();
                    r.fail(why.join("; "));
                }
            }
        }
        BundleCmd::Trivialize { system, certificate } => {
            let (ds, stored) = load_system(ctx, system)?;
            let cdoc = match certificate {
                Some(p) => ctx.doc(p)?,
                None => stored.ok_or_else(|| anyhow!("--certificate is required unless the system file carries one"))?,
            };
            let cert = certificate_from_doc(&cdoc, &ds)?;
            let act = spectrum_action(&ds)?;
            let t = trivialize_covering(&ds, &cert)?;
            r.check("certificate re-verified");
            r.check(format!("action on {} spectrum points is free", act.spectrum.len()));
            r.check("chart is an equivariant bijection X → X/Λ × Λ");
            r.payload = json!({
                "points": act.spectrum.len(),
                "orbits": t.orbit_count,
                "chart": t.chart.iter().map(|(o, l)| json!([o, l.to_string()])).collect::<Vec<_>>(),
            });
        }
    }
    Ok(r)
}

fn read_witnesses(ctx: &Ctx, p: &Path, ds: &DynamicalSystem<Cyclo>) -> std::result::Result<Vec<Element<Cyclo>>, Failure> {
    let path = ctx.path(p);
    let text = fs::read_to_string(&path).with_context(|| format!("cannot read {}", path.display()))?;
    let value: Value = serde_json::from_str(&text).with_context(|| format!("malformed JSON in {}", path.display()))?;
    let d = ds.algebra.dim();
    let parse = |items: &Vec<Value>| -> anyhow::Result<Vec<Element<Cyclo>>> {
        items
            .iter()
            .map(|v| element_from_value::<Cyclo>(v, d).map_err(|e| anyhow!("{}: {e}", path.display())))
            .collect()
    };
    match &value {
        Value::Array(items) => Ok(parse(items)?),
        _ => match ctx.doc(p)? {
            Document::Certificate { witnesses, .. } => Ok(witnesses),
            other => Err(anyhow!("{}: expected a certificate, found {}", path.display(), other.kind()).into()),
        },
    }
}

fn example(ctx: &Ctx, cmd: &ExampleCmd) -> Out {
    let mut r = ctx.report();
    match cmd {
        ExampleCmd::ClockShift { n, out } => {
            let cs = clock_shift_system::<Cyclo>(*n)?;
            for c in &cs.checks {
                r.check(c.clone());
            }
            r.check("certificate with witnesses R*, S verified");
            r.payload = json!({
                "n": n,
                "component_dims": cs.decomposition.dims(),
                "certificate": to_value(&certificate_doc(&cs.certificate)),
            });
            ctx.maybe_write(out, &system_doc(&cs.system), &mut r)?;
        }
        ExampleCmd::Catalog { out } => {
            let dir = ctx.path(out);
            let files = export_catalog(&dir, ctx.budget)?;
            for f in &files {
                r.check(format!("{}: {}", f.name, f.status));
            }
            let unexpected: Vec<&str> = files
                .iter()
                .filter(|f| (f.status == Status::Ok) == (f.name == "non_split_c2"))
                .map(|f| f.name.as_str())
                .collect();
            if !unexpected.is_empty() {
                r.fail(format!("unexpected status for {}", unexpected.join(", ")));
            }
            r.payload = json!({
                "count": files.len(),
                "files": files.iter().map(|f| json!({ "name": f.name, "status": f.status })).collect::<Vec<_>>(),
            });
        }
        ExampleCmd::CrossCheck(args) => {
            let level = match args.level {
                LevelArg::Quick => Level::Quick,
                LevelArg::Full => Level::Full,
            };
            let results = cross_check(level, ctx.budget);
            if ctx.timing {
                for c in &results {
                    eprintln!("criterion {:>2}: {:.2?}", c.id, c.elapsed);
                }
            }
            for c in &results {
                r.check(format!("criterion {} {}: {}", c.id, c.status, c.title));
            }
            r.payload = to_value(&results);
            if results.iter().any(|c| c.status == Status::Fail) {
                r.fail("some criteria failed");
            } else if results.iter().any(|c| c.status == Status::Refused) {
                r.status = Status::Refused;
                r.error = Some("some criteria exceeded the enumeration budget".into());
            }
        }
    }
    Ok(r)
}

fn emit(report: &Report, pretty: bool) {
    let text = if pretty {
        serde_json::to_string_pretty(report)
    } else {
        serde_json::to_string(report)
    };
    let mut out = std::io::stdout().lock();
    // a closed pipe is not an error of the command
    let _ = writeln!(out, "{}", text.expect("report serializes"));
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let ctx = Ctx {
        conductor: cli.conductor,
        budget: cli.budget.unwrap_or(DEFAULT_BUDGET),
        workspace: cli.workspace.clone(),
        pretty: cli.pretty,
        timing: cli.timing,
        argv: argv[1..].to_vec(),
    };
    let _ = cli.json;
    if ctx.conductor == Some(0) {
        eprintln!("error: --conductor must be positive");
        return ExitCode::from(3);
    }
    let start = Instant::now();
    let report = match run(&ctx, &cli.command) {
        Ok(r) => r,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(3);
        }
        Err(Failure::Math(e)) => {
            let mut r = ctx.report();
            r.absorb(&e);
            r
        }
    };
    emit(&report, ctx.pretty);
    if ctx.timing {
        eprintln!("elapsed: {:.3?}", start.elapsed());
    }
    ExitCode::from(report.status.exit_code() as u8)
}
