use crate::artifact::{Artifacts, Header};
use crate::error::CliError;
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use wavenf_core::algebra::serialize::{observable_json, ExprJson};
use wavenf_core::algebra::{Coeff, Observable, Var};
use wavenf_core::kdv::{hierarchy_match, MatchReport};
use wavenf_core::models::Model;
use wavenf_core::normalform::NormalFormResult;

#[derive(Clone, Debug, Serialize)]
pub struct NormalFormArgs {
    pub model: PathBuf,
    pub out: PathBuf,
    pub check_hierarchy: bool,
    pub seed: u64,
}

#[derive(Serialize)]
struct Row {
    order: u32,
    term: String,
    coefficient: String,
}

#[derive(Serialize)]
struct NormalFormJson {
    model: &'static str,
    verified: bool,
    z: BTreeMap<u32, ExprJson>,
    g: BTreeMap<u32, ExprJson>,
    table: Vec<Row>,
}

#[derive(Serialize)]
pub struct HierarchyJson {
    pub applicable: bool,
    pub orders: (u32, u32),
    pub member: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub coefficients: BTreeMap<&'static str, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<ExprJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_field: Option<ExprJson>,
}

pub fn read_model(path: &Path) -> Result<(Model, String), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("reading {}: {e}", path.display())))?;
    Ok((Model::from_toml_str(&text)?, text))
}

fn term_text(key: &[Vec<wavenf_core::algebra::Factor>]) -> String {
    let mut o = Observable::zero();
    o.add_term(key.to_vec(), Coeff::one());
    o.to_string().trim_start_matches("(1)*").to_string()
}

fn table(nf: &NormalFormResult) -> Vec<Row> {
    nf.z.iter()
        .flat_map(|(&order, z)| z.terms().map(move |(k, c)| Row { order, term: term_text(k), coefficient: c.to_string() }))
        .collect()
}

pub fn hierarchy_report(model: &Model, nf: &NormalFormResult) -> HierarchyJson {
    let orders = model.reported_orders();
    match hierarchy_match(&nf.z(orders.0), &nf.z(orders.1), Var::U) {
        Ok(r) => from_match(&r, orders),
        Err(e) => HierarchyJson {
            applicable: false,
            orders,
            member: false,
            reason: Some(e.to_string()),
            coefficients: BTreeMap::new(),
            residual: None,
            mean_field: None,
        },
    }
}

fn from_match(r: &MatchReport, orders: (u32, u32)) -> HierarchyJson {
    let coefficients = [("gamma", &r.gamma), ("a1", &r.a1), ("a0", &r.a0), ("c3", &r.c3), ("c1", &r.c1), ("c0", &r.c0)]
        .into_iter()
        .map(|(k, v)| (k, v.to_string()))
        .collect();
    HierarchyJson {
        applicable: true,
        orders,
        member: r.is_member(),
        reason: None,
        coefficients,
        residual: Some(observable_json(&r.residual)),
        mean_field: Some(observable_json(&r.mean_field)),
    }
}

pub fn run(args: &NormalFormArgs) -> Result<Vec<PathBuf>, CliError> {
    let (model, text) = read_model(&args.model)?;
    let nf = model.normal_form()?;
    let header = Header::new("normal-form", args.seed, &(args.check_hierarchy,), &[&text]);
    let mut art = Artifacts::new(&args.out, header)?;

    let mut txt = format!("model {}\n", model.name());
    for (j, z) in &nf.z {
        txt.push_str(&format!("Z{j} = {z}\n"));
    }
    for (j, g) in &nf.g {
        txt.push_str(&format!("G{j} = {g}\n"));
    }
    txt.push_str(&format!("residuals vanish: {}\n", nf.verified()));
    art.text("normal_form.txt", &txt)?;
    let json = NormalFormJson {
        model: model.name(),
        verified: nf.verified(),
        z: nf.z.iter().map(|(k, v)| (*k, observable_json(v))).collect(),
        g: nf.g.iter().map(|(k, v)| (*k, observable_json(v))).collect(),
        table: table(&nf),
    };
    art.json("normal_form.json", &json)?;

    let h = hierarchy_report(&model, &nf);
    art.json("hierarchy.json", &h)?;
    print!("{txt}");
    if args.check_hierarchy {
        match (&h.applicable, &h.residual) {
            (true, Some(res)) => {
                println!("hierarchy: gamma = {}, member = {}", h.coefficients["gamma"], h.member);
                println!("residual = {}", res.text);
            }
            _ => println!("hierarchy: not applicable ({})", h.reason.as_deref().unwrap_or("")),
        }
    }
    Ok(art.written().to_vec())
}
