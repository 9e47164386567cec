//! Subcommand implementations. Each returns a [`Rendered`] result that the
//! binary prints in the configured format.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context};
use serde::Deserialize;
use serde_json::{json, Value};
use thhforge_core::adams::{chart, homotopy_rows, run_ss, schedule_for, Target};
use thhforge_core::bokstedt::{catalog, custom_entry, run_entry, DlTable, SpectrumId, Structure, ThhResult};
use thhforge_core::gca::{Algebra, AlgebraPresentation, CoactionTermSpec, GeneratorSpec};
use thhforge_core::hochschild::hh_homology;
use thhforge_core::steenrod::dual::MilnorMonomial;
use thhforge_core::steenrod::{
    cyclic_and_annihilator_check, module_map_kernel, pairing, quotient_module, steenrod_basis, total_rank,
    SteenrodElement, SubalgebraSpec,
};

use crate::cache::AdemCache;
use crate::config::{OutputFormat, RunConfig};
use crate::output;

/// One result in every output format.
pub struct Rendered {
    pub json: Value,
    pub table: String,
    pub csv: String,
    pub svg: Option<String>,
}

impl Rendered {
    pub fn text(&self, format: OutputFormat) -> anyhow::Result<String> {
        Ok(match format {
            OutputFormat::Table => self.table.clone(),
            OutputFormat::Csv => self.csv.clone(),
            OutputFormat::Svg => self.svg.clone().ok_or_else(|| anyhow!("this command has no SVG output"))?,
            OutputFormat::Json => unreachable!("JSON goes through the envelope"),
        })
    }
}

fn element(s: &str) -> anyhow::Result<SteenrodElement> {
    Ok(SteenrodElement::parse(s)?)
}

/// Comma-separated list of Steenrod elements; `+` binds inside an entry.
pub fn element_list(s: &str) -> anyhow::Result<Vec<SteenrodElement>> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(|t| element(t.trim())).collect()
}

fn subalgebra(s: &str) -> anyhow::Result<SubalgebraSpec> {
    s.parse().map_err(|e| anyhow!("{e}"))
}

pub fn steenrod_basis_cmd(cfg: &RunConfig, degree: u32, sub: Option<&str>) -> anyhow::Result<Rendered> {
    let (words, cache) = match sub {
        None => {
            let (bases, status) = AdemCache::new(&cfg.cache_dir).load(degree)?;
            let words: Vec<String> = bases[degree as usize]
                .iter()
                .map(|m| SteenrodElement::from_monomial(m.clone()).to_string())
                .collect();
            (words, Some(status))
        }
        Some(s) => {
            let spec = subalgebra(s)?;
            (steenrod_basis(&spec, degree).iter().map(|e| e.to_string()).collect(), None)
        }
    };
    let mut table = format!("{}\n", words.len());
    for w in &words {
        table.push_str(&format!("  {w}\n"));
    }
    let rows: Vec<Vec<String>> = words.iter().map(|w| vec![degree.to_string(), w.clone()]).collect();
    Ok(Rendered {
        json: json!({
            "degree": degree,
            "subalgebra": sub.unwrap_or("A"),
            "dim": words.len(),
            "basis": words,
            "cache": cache,
        }),
        table,
        csv: output::csv(&["degree", "element"], &rows),
        svg: None,
    })
}

pub fn steenrod_rank_cmd(sub: &str) -> anyhow::Result<Rendered> {
    let spec = subalgebra(sub)?;
    let rank = total_rank(&spec)?;
    Ok(Rendered {
        json: json!({ "subalgebra": sub, "rank": rank }),
        table: format!("{rank}\n"),
        csv: output::csv(&["subalgebra", "rank"], &[vec![sub.to_string(), rank.to_string()]]),
        svg: None,
    })
}

fn series_rows(series: &BTreeMap<i32, usize>) -> Vec<Vec<String>> {
    series.iter().map(|(d, n)| vec![d.to_string(), n.to_string()]).collect()
}

pub fn steenrod_quotient_cmd(sub: &str, ideal: &str, shift: i32, total_only: bool) -> anyhow::Result<Rendered> {
    let spec = subalgebra(sub)?;
    let mut m = quotient_module(&spec, &element_list(ideal)?)?;
    m.shift = shift;
    let series = m.poincare_series();
    let rank = m.total_rank();
    let rows = series_rows(&series);
    let table = if total_only {
        format!("{rank}\n")
    } else {
        format!("total rank {rank}\n{}", output::table(&["degree", "dim"], &rows))
    };
    Ok(Rendered {
        json: json!({
            "subalgebra": sub,
            "ideal": ideal,
            "shift": shift,
            "total_rank": rank,
            "series": series.iter().map(|(d, n)| json!({"degree": d, "dim": n})).collect::<Vec<_>>(),
        }),
        table,
        csv: output::csv(&["degree", "dim"], &rows),
        svg: None,
    })
}

pub struct KernelArgs<'a> {
    pub subalgebra: &'a str,
    pub map: &'a str,
    pub source_ideal: &'a str,
    pub source_shift: i32,
    pub target_ideal: &'a str,
    pub generator: Option<&'a str>,
    pub annihilator: Option<&'a str>,
}

pub fn steenrod_kernel_cmd(a: &KernelArgs) -> anyhow::Result<Rendered> {
    let spec = subalgebra(a.subalgebra)?;
    let mut source = quotient_module(&spec, &element_list(a.source_ideal)?)?;
    source.shift = a.source_shift;
    let target = quotient_module(&spec, &element_list(a.target_ideal)?)?;
    let k = module_map_kernel(&element(a.map)?, &source, &target)?;
    let check = match (a.generator, a.annihilator) {
        (Some(g), Some(ann)) => Some(cyclic_and_annihilator_check(&k.kernel, &element(g)?, &element_list(ann)?)?),
        (None, None) => None,
        _ => bail!("--generator and --annihilator go together"),
    };
    let mut basis = Vec::new();
    let mut rows = Vec::new();
    for (&d, _) in k.kernel.poincare_series().iter() {
        let alg_degree = (d - k.kernel.shift) as u32;
        for b in k.kernel.basis(alg_degree) {
            rows.push(vec![d.to_string(), b.to_string()]);
            basis.push(json!({"degree": d, "element": b.to_string()}));
        }
    }
    let mut table = format!(
        "kernel rank {}\nimage rank {}\ncokernel rank {}\n",
        k.kernel_rank, k.image_rank, k.cokernel_rank
    );
    if let Some(c) = check {
        table.push_str(&format!("cyclic with stated annihilator: {c}\n"));
    }
    table.push_str(&output::table(&["degree", "element"], &rows));
    Ok(Rendered {
        json: json!({
            "map": a.map,
            "kernel_rank": k.kernel_rank,
            "image_rank": k.image_rank,
            "cokernel_rank": k.cokernel_rank,
            "cyclic_check": check,
            "basis": basis,
        }),
        table,
        csv: output::csv(&["degree", "element"], &rows),
        svg: None,
    })
}

pub fn steenrod_pair_cmd(a: &str, m: &str) -> anyhow::Result<Rendered> {
    let x = element(a)?;
    let mono: MilnorMonomial = m.parse().map_err(|e| anyhow!("{e}"))?;
    let v = pairing(&x, &mono)?;
    Ok(Rendered {
        json: json!({ "element": a, "monomial": m, "pairing": v }),
        table: format!("{v}\n"),
        csv: output::csv(&["element", "monomial", "pairing"], &[vec![a.into(), m.into(), v.to_string()]]),
        svg: None,
    })
}

/// Built-in presentations for `hh compute`.
pub fn hh_preset(name: &str, p: u32) -> anyhow::Result<AlgebraPresentation> {
    let gens = match name {
        "idempotent" => vec![GeneratorSpec::idempotent("u")],
        "poly2" => vec![GeneratorSpec::polynomial("x", 2)],
        "ext1" => vec![GeneratorSpec::exterior("x", 1)],
        "ext1-poly2" => vec![GeneratorSpec::exterior("x", 1), GeneratorSpec::polynomial("y", 2)],
        _ => bail!("unknown preset {name:?} (idempotent, poly2, ext1, ext1-poly2)"),
    };
    let p = if name == "idempotent" { 2 } else { p };
    Ok(AlgebraPresentation::new(p, gens))
}

pub fn read_presentation(path: &Path) -> anyhow::Result<AlgebraPresentation> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing presentation {}", path.display()))
}

pub fn hh_compute_cmd(pres: &AlgebraPresentation, maxdeg: u32, qmax: usize, reps: bool) -> anyhow::Result<Rendered> {
    let alg = Algebra::new(pres, maxdeg)?;
    let hh = hh_homology(&alg, maxdeg, qmax, reps)?;
    let cells = hh.cells(&alg);
    let mut by_q = vec![0usize; qmax + 1];
    for c in &cells {
        by_q[c.q] += c.dim;
    }
    let rows: Vec<Vec<String>> = cells
        .iter()
        .map(|c| vec![c.q.to_string(), c.t.to_string(), c.dim.to_string(), c.representatives.join(" ")])
        .collect();
    let mut table = String::from("rank by homological degree:\n");
    for (q, n) in by_q.iter().enumerate() {
        table.push_str(&format!("  HH_{q}: {n}\n"));
    }
    table.push_str(&output::table(&["q", "t", "dim", "representatives"], &rows));
    Ok(Rendered {
        json: json!({
            "presentation": pres,
            "maxdeg": maxdeg,
            "qmax": qmax,
            "rank_by_q": by_q,
            "cells": cells,
        }),
        table,
        csv: output::csv(&["q", "t", "dim", "representatives"], &rows),
        svg: None,
    })
}

/// `bokstedt run --spectrum custom` input: a presented `H_*(R)` with
/// optional coaction and Dyer–Lashof data.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomSpectrum {
    pub p: u32,
    pub generators: Vec<GeneratorSpec>,
    #[serde(default)]
    pub coaction: BTreeMap<String, Vec<CoactionTermSpec>>,
    #[serde(default)]
    pub dyer_lashof: Option<DlTable>,
    #[serde(default)]
    pub structure: Option<Structure>,
}

pub fn bokstedt_run_cmd(spectrum: &str, p: u32, maxdeg: u32, presentation: Option<&Path>) -> anyhow::Result<Rendered> {
    let id: SpectrumId = spectrum.parse().map_err(|e| anyhow!("{e}"))?;
    let entry = if id == SpectrumId::Custom {
        let path = presentation.ok_or_else(|| anyhow!("--spectrum custom needs --presentation FILE"))?;
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let c: CustomSpectrum =
            serde_json::from_str(&text).with_context(|| format!("parsing custom spectrum {}", path.display()))?;
        let dl = c.dyer_lashof.unwrap_or_else(|| DlTable::new(c.p));
        custom_entry(
            AlgebraPresentation::new(c.p, c.generators),
            c.coaction,
            dl,
            c.structure.unwrap_or(Structure::Commutative),
            maxdeg,
        )?
    } else {
        catalog(id, p, maxdeg)?
    };
    let r = run_entry(&entry, maxdeg)?;
    Ok(render_thh(&r))
}

fn render_thh(r: &ThhResult) -> Rendered {
    let rows: Vec<Vec<String>> = r
        .abutment
        .series
        .iter()
        .enumerate()
        .map(|(d, n)| vec![d.to_string(), n.to_string()])
        .collect();
    let mut table = format!("H_*(THH({})) at p = {} through degree {}\n", r.spectrum, r.p, r.n);
    table.push_str("generators:\n");
    for g in &r.abutment.generators {
        table.push_str(&format!("  {} (degree {}, {:?}, filtration {})\n", g.name, g.degree, g.kind, g.filtration));
    }
    if !r.abutment.coaction.is_empty() {
        table.push_str("coaction:\n");
        for (g, ts) in &r.abutment.coaction {
            let terms: Vec<String> = ts
                .iter()
                .map(|t| if t.c == 1 { format!("{}⊗{}", t.a, t.x) } else { format!("{}·{}⊗{}", t.c, t.a, t.x) })
                .collect();
            table.push_str(&format!("  ν({g}) = {}\n", terms.join(" + ")));
        }
    }
    let c = &r.collapse;
    table.push_str(&format!(
        "collapse: page {}, filtration criterion {}, obstruction scan {} ({} obstructions)\n",
        c.page,
        c.filtration_criterion,
        if c.scanned { "run" } else { "skipped" },
        c.obstructions.len()
    ));
    if r.target_series.is_empty() {
        table.push_str("no expected presentation to compare against\n");
    } else {
        table.push_str(&format!("matches expected presentation: {}\n", r.matches_target));
    }
    table.push_str(&output::table(&["degree", "dim"], &rows));
    Rendered {
        json: serde_json::to_value(r).expect("THH result serializes"),
        table,
        csv: output::csv(&["degree", "dim"], &rows),
        svg: None,
    }
}

pub fn adams_run_cmd(target: &str, maxdeg: u32) -> anyhow::Result<Rendered> {
    let target: Target = target.parse().map_err(|e| anyhow!("{e}"))?;
    let sched = schedule_for(target, maxdeg)?;
    let run = run_ss(&sched, maxdeg)?;
    let homotopy = homotopy_rows(&run.module, maxdeg);
    let mut table = format!("Adams spectral sequence for {target} through stem {maxdeg}\n\ndifferentials:\n");
    for e in &sched.entries {
        table.push_str(&format!(
            "  n={}: d^{}({}) = {}   (2r+s = {})\n",
            e.n,
            e.r,
            e.source,
            e.target,
            2 * e.r + e.s
        ));
    }
    table.push_str("\nE∞ (rows s, columns t-s):\n");
    table.push_str(&chart::text_chart(&run.einf, maxdeg));
    table.push_str("\nhomotopy:\n");
    for row in &homotopy {
        if row.generators.is_empty() {
            continue;
        }
        let g: Vec<String> = row
            .generators
            .iter()
            .map(|g| match g.torsion {
                Some(r) => format!("{} (v1^{r}-torsion)", g.label),
                None => format!("{} (free)", g.label),
            })
            .collect();
        table.push_str(&format!("  π_{}: {}\n", row.degree, g.join(", ")));
    }
    let rows: Vec<Vec<String>> = run
        .einf
        .iter()
        .map(|c| vec![c.s.to_string(), c.t.to_string(), c.stem.to_string(), c.dim.to_string()])
        .collect();
    Ok(Rendered {
        json: json!({
            "target": target,
            "max_stem": maxdeg,
            "schedule": sched.entries,
            "run": run,
            "homotopy": homotopy,
        }),
        table,
        csv: output::csv(&["s", "t", "stem", "dim"], &rows),
        svg: Some(chart::svg_chart(&run.einf, maxdeg)),
    })
}
