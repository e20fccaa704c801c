//! The example gallery with a verification report per entry.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use crate::algebra::{verify_algebra, Element, StructureAlgebra};
use crate::bundle::{
    certify_trivial, clock_shift_system, dual_system, fourier_decompose, verify_certificate, CertifyOutcome,
    DynamicalSystem, TrivialityCertificate, WitnessSearch,
};
use crate::cohomology::{bilinear_cocycle, h2_circle_presentation, Cochain};
use crate::crossed::{build_crossed_product, extract_characteristic_class, scalar_class, GradedAlgebra, GradedSection};
use crate::error::{Error, Result};
use crate::factor::{validate_factor_system, FactorSystem};
use crate::groups::FinAbGroup;
use crate::io::{certificate_doc, factor_system_doc, system_doc, Document, VERSION};
use crate::report::{Report, Status};
use crate::scalar::Cyclo;

#[derive(Clone, Debug)]
pub enum CatalogObject {
    Factor {
        system: FactorSystem<Cyclo>,
        /// Torsion used when certifying the dual system of the crossed product.
        torsion: u64,
        /// `n` with the class tested in `H²(G, μ_n)`, for scalar systems.
        class_in: Option<u64>,
    },
    System {
        system: DynamicalSystem<Cyclo>,
        witnesses: Option<Vec<Element<Cyclo>>>,
    },
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub description: String,
    pub object: CatalogObject,
}

impl CatalogEntry {
    pub fn factor_system(&self) -> Option<&FactorSystem<Cyclo>> {
        match &self.object {
            CatalogObject::Factor { system, .. } => Some(system),
            CatalogObject::System { .. } => None,
        }
    }
}

/// `F[G]` graded by `v_g ∈ A_g`.
pub fn graded_group_algebra(g: &FinAbGroup) -> Result<GradedAlgebra<Cyclo>> {
    GradedAlgebra::new(StructureAlgebra::group_algebra(g), g.clone(), (0..g.order()).collect())
}

/// `ω(g,g) = -1` on `C_2` over `C`.
pub fn non_split_c2() -> Result<FactorSystem<Cyclo>> {
    let g = FinAbGroup::cyclic(2);
    let c = Cochain::from_exponents(2, &g, 2, |a| (a[0].residues[0] * a[1].residues[0]) as i64)?;
    FactorSystem::scalar(&g, &StructureAlgebra::matrix_algebra(1)?, &c)
}

/// The factor-system part of the catalog.
pub fn factor_entries() -> Result<Vec<CatalogEntry>> {
    let mut out = Vec::new();
    for m in 1..=3usize {
        let b = StructureAlgebra::matrix_algebra(m)?;
        for n in 1..=3u64 {
            out.push(CatalogEntry {
                name: format!("matrix_m{m}_c{n}"),
                description: format!("M_{m}[C_{n}], the trivial factor system"),
                object: CatalogObject::Factor {
                    system: FactorSystem::trivial(&FinAbGroup::cyclic(n), &b),
                    torsion: 1,
                    class_in: None,
                },
            });
        }
    }
    let c = StructureAlgebra::matrix_algebra(1)?;
    for n in 2..=4u64 {
        let g = FinAbGroup::new(vec![n, n])?;
        out.push(CatalogEntry {
            name: format!("twisted_c{n}xc{n}"),
            description: format!("C[C_{n} x C_{n}] twisted by the bilinear cocycle ζ^(b·c)"),
            object: CatalogObject::Factor {
                system: FactorSystem::scalar(&g, &c, &bilinear_cocycle(n)?)?,
                torsion: 1,
                class_in: Some(n),
            },
        });
    }
    out.push(CatalogEntry {
        name: "non_split_c2".into(),
        description: "C_2 crossed product with ω(g,g) = -1; certification over μ_2 fails".into(),
        object: CatalogObject::Factor {
            system: non_split_c2()?,
            torsion: 2,
            class_in: Some(2),
        },
    });
    Ok(out)
}

pub fn catalog() -> Result<Vec<CatalogEntry>> {
    let mut out = Vec::new();
    for n in 1..=6u64 {
        let g = FinAbGroup::cyclic(n);
        out.push(CatalogEntry {
            name: format!("group_algebra_c{n}"),
            description: format!("C[C_{n}] with the dual action of C_{n}"),
            object: CatalogObject::System {
                system: dual_system(&graded_group_algebra(&g)?)?,
                witnesses: None,
            },
        });
    }
    for n in 1..=5u64 {
        let cs = clock_shift_system::<Cyclo>(n)?;
        out.push(CatalogEntry {
            name: format!("clock_shift_{n}"),
            description: format!("M_{n} with the clock and shift action of C_{n} x C_{n}"),
            object: CatalogObject::System {
                witnesses: Some(cs.certificate.witnesses.iter().map(|u| u.value.clone()).collect()),
                system: cs.system,
            },
        });
    }
    out.extend(factor_entries()?);
    Ok(out)
}

fn record_certify(
    report: &mut Report,
    ds: &DynamicalSystem<Cyclo>,
    witnesses: Option<&[Element<Cyclo>]>,
    candidates: Vec<Element<Cyclo>>,
    torsion: u64,
    budget: u128,
) -> Result<Option<TrivialityCertificate<Cyclo>>> {
    let search = WitnessSearch {
        candidates,
        torsion,
        budget,
    };
    match certify_trivial(ds, witnesses, &search)? {
        CertifyOutcome::Certified(cert) => {
            verify_certificate(ds, &cert)?;
            report.check(format!("certificate verified for generators {}", join(&cert.generators)));
            Ok(Some(cert))
        }
        CertifyOutcome::Failed(fails) => {
            let why: Vec<String> = fails.iter().map(|f| format!("{}: {}", f.generator, f.failure)).collect();
            report.fail(format!("certify: {}", why.join("; ")));
            Ok(None)
        }
    }
}

fn join<T: std::fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn verify_factor(
    report: &mut Report,
    fs: &FactorSystem<Cyclo>,
    torsion: u64,
    class_in: Option<u64>,
    budget: u128,
) -> Result<Option<TrivialityCertificate<Cyclo>>> {
    let v = validate_factor_system(fs);
    if let Some(f) = v.failure {
        return Err(Error::Verification(format!("not a factor system: {f}")));
    }
    report.check(format!("factor system identities ({} checks)", v.checks));
    let a = build_crossed_product(fs)?;
    let ar = verify_algebra(&a.algebra);
    if let Some(f) = ar.failure {
        return Err(Error::Verification(format!("crossed product: {f}")));
    }
    report.check(format!("crossed product axioms ({} checks)", ar.checks));
    let sigma = GradedSection::standard(&a)?;
    let back = extract_characteristic_class(&a, &sigma)?;
    if !back.same_as(fs) {
        return Err(Error::Verification("extraction does not return the factor system".into()));
    }
    report.check("extraction through the section 1·v_g returns (S, ω)");
    let mut payload = json!({
        "group": fs.group().orders(),
        "base_dim": fs.algebra().dim(),
        "dim": a.dim(),
        "involution": a.algebra.involution().is_some(),
    });
    if let Some(n) = class_in {
        let c = scalar_class(fs, n)?;
        let order = h2_circle_presentation(fs.group(), n)?.class_order(&c)?;
        report.check(format!("class order {order} in H²(G, C^×)"));
        payload["class_order"] = json!(order);
    }
    let ds = dual_system(&a)?;
    let cert = record_certify(report, &ds, None, sigma.units.iter().map(|u| u.value.clone()).collect(), torsion, budget)?;
    payload["certified"] = json!(cert.is_some());
    report.payload = payload;
    Ok(cert)
}

fn verify_system(
    report: &mut Report,
    ds: &DynamicalSystem<Cyclo>,
    witnesses: Option<&[Element<Cyclo>]>,
    budget: u128,
) -> Result<Option<TrivialityCertificate<Cyclo>>> {
    let dec = fourier_decompose(ds)?;
    report.check("isotypic projections certified");
    let cert = record_certify(report, ds, witnesses, Vec::new(), 1, budget)?;
    report.payload = json!({
        "group": ds.group.orders(),
        "dim": ds.algebra.dim(),
        "component_dims": dec.dims(),
        "certified": cert.is_some(),
    });
    Ok(cert)
}

/// Runs every check for one entry; errors are folded into the report.
pub fn verify_entry(entry: &CatalogEntry, budget: u128) -> (Report, Option<TrivialityCertificate<Cyclo>>) {
    let mut report = Report::new(vec!["example".into(), "catalog".into(), entry.name.clone()]);
    let res = match &entry.object {
        CatalogObject::Factor {
            system,
            torsion,
            class_in,
        } => verify_factor(&mut report, system, *torsion, *class_in, budget),
        CatalogObject::System { system, witnesses } => verify_system(&mut report, system, witnesses.as_deref(), budget),
    };
    match res {
        Ok(cert) => (report, cert),
        Err(e) => {
            report.absorb(&e);
            (report, None)
        }
    }
}

#[derive(Serialize)]
struct CatalogFile<'a> {
    version: &'static str,
    name: &'a str,
    description: &'a str,
    object: Document<Cyclo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<Document<Cyclo>>,
    report: Report,
}

/// Summary line per written file.
#[derive(Clone, Debug, Serialize)]
pub struct ExportedEntry {
    pub name: String,
    pub path: PathBuf,
    pub status: Status,
}

/// Writes `<name>.json` per entry. Output is a pure function of the budget.
pub fn export_catalog(dir: &Path, budget: u128) -> Result<Vec<ExportedEntry>> {
    let io = |e: std::io::Error, p: &Path| Error::Io(format!("{}: {e}", p.display()));
    fs::create_dir_all(dir).map_err(|e| io(e, dir))?;
    let mut out = Vec::new();
    for entry in catalog()? {
        let (report, cert) = verify_entry(&entry, budget);
        let object = match &entry.object {
            CatalogObject::Factor { system, .. } => factor_system_doc(system),
            CatalogObject::System { system, .. } => system_doc(system),
        };
        let status = report.status;
        let file = CatalogFile {
            version: VERSION,
            name: &entry.name,
            description: &entry.description,
            object,
            certificate: cert.as_ref().map(certificate_doc),
            report,
        };
        let text = serde_json::to_string_pretty(&file).map_err(|e| Error::Parse(e.to_string()))? + "\n";
        let path = dir.join(format!("{}.json", entry.name));
        fs::write(&path, text).map_err(|e| io(e, &path))?;
        out.push(ExportedEntry {
            name: entry.name,
            path,
            status,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::DEFAULT_BUDGET;

    #[test]
    fn entries_and_statuses() {
        let cat = catalog().unwrap();
        assert!(cat.len() >= 20);
        for e in &cat {
            let (r, _) = verify_entry(e, DEFAULT_BUDGET);
            if e.name == "non_split_c2" {
                assert_eq!(r.status, Status::Fail, "{r:?}");
                assert!(r.error.as_deref().unwrap().starts_with("certify"));
            } else {
                assert!(r.is_ok(), "{}: {:?}", e.name, r.error);
            }
        }
    }
}
