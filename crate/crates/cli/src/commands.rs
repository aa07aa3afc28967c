use std::path::{Path, PathBuf};

use qapprox::approximation::{
    build_approximation_with, verify_approximation, ApproximationProblem, ApproximationReport, BuildOptions,
    FiniteLeftQuasigroup,
};
use qapprox::group_models::DEFAULT_POINT_CAP;
use qapprox::haar::{refinement_sweep, TestFunction};
use qapprox::latin::{embed_partial, verify_latin, window_to_partial, GroupWindow, PartialLatinSquare};
use qapprox::semigroup::{
    classify, extract_group, level_quotient, maximal_ideal_chain, ExtractionReport, FiniteSemigroup, Verdict,
};
use qapprox::{CompactRegion, GroupElement, GroupModel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::output::{num, Format, OutDir, SCHEMA_VERSION};
use crate::CliError;

pub struct Context {
    pub config: Config,
    pub out: OutDir,
    pub format: Format,
}

#[derive(Serialize, Deserialize)]
pub struct ApproximationArtifact {
    pub schema_version: u32,
    pub kind: String,
    pub problem: ApproximationProblem,
    pub table: Vec<Vec<u32>>,
    pub embedding: Vec<GroupElement>,
    pub report: ApproximationReport,
}

#[derive(Serialize)]
struct ReportArtifact<'a> {
    schema_version: u32,
    kind: &'static str,
    model: GroupModel,
    report: &'a ApproximationReport,
}

fn build_options(c: &mut Config) -> Result<BuildOptions, CliError> {
    let d = BuildOptions::default();
    Ok(BuildOptions {
        point_cap: c.opt_usize("point_cap")?.unwrap_or(DEFAULT_POINT_CAP),
        max_retries: c.opt_usize("max_retries")?.unwrap_or(d.max_retries),
    })
}

fn report_csv(ctx: &Context, name: &str, r: &ApproximationReport) -> Result<(), CliError> {
    let header = ["grid_size", "grid_defect", "hom_defect", "qualifying_pairs", "retries", "o_radius", "pass"];
    let row = vec![
        r.grid_size.to_string(),
        num(r.grid_defect),
        num(r.hom_defect),
        r.qualifying_pairs.to_string(),
        r.retries.to_string(),
        r.o_radius.map(num).unwrap_or_default(),
        r.pass.to_string(),
    ];
    ctx.out.write_csv(name, &header.map(String::from), &[row])?;
    Ok(())
}

fn verdict_of(r: &ApproximationReport) -> Result<(), CliError> {
    if r.pass {
        return Ok(());
    }
    let mut msg = format!("grid defect {}, homomorphism defect {}", r.grid_defect, r.hom_defect);
    if let Some(w) = &r.worst_pair {
        msg += &format!("; worst pair x={} y={} (x⊙y={}, defect {})", w.x, w.y, w.product, w.defect);
    }
    if let Some(p) = &r.permutation_failure {
        msg += &format!("; {} {} repeats symbol {}", p.line, p.index, p.symbol);
    }
    Err(CliError::Verification(msg))
}

pub fn build(mut ctx: Context) -> Result<(), CliError> {
    let c = &mut ctx.config;
    c.check_command("build")?;
    let model = c.model()?;
    let region = c.region("region", model)?;
    let u = c.u_radius()?;
    let side = c.side()?;
    let opts = build_options(c)?;
    c.finish()?;

    let problem = ApproximationProblem::new(region, u, side);
    let (q, report) = build_approximation_with(&problem, opts).map_err(|e| CliError::Construction(e.to_string()))?;
    let artifact = ApproximationArtifact {
        schema_version: SCHEMA_VERSION,
        kind: "approximation".into(),
        problem,
        table: q.table,
        embedding: q.embedding,
        report,
    };
    ctx.out.write_json("approximation.json", &artifact)?;
    match ctx.format {
        Format::Json => {
            let r = ReportArtifact { schema_version: SCHEMA_VERSION, kind: "report", model, report: &artifact.report };
            ctx.out.write_json("report.json", &r)?;
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> =
                artifact.table.iter().map(|r| r.iter().map(u32::to_string).collect()).collect();
            let header: Vec<String> = (0..artifact.table.len()).map(|i| format!("c{i}")).collect();
            ctx.out.write_csv("table.csv", &header, &rows)?;
            report_csv(&ctx, "report.csv", &artifact.report)?;
        }
    }
    verdict_of(&artifact.report)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn required_path(c: &mut Config, key: &str) -> Result<PathBuf, CliError> {
    c.opt_path(key)?.ok_or_else(|| CliError::Config(format!("`{key}`: missing")))
}

pub fn verify(mut ctx: Context) -> Result<(), CliError> {
    let c = &mut ctx.config;
    c.check_command("verify")?;
    let input = required_path(c, "input")?;
    let model = c.model()?;
    let artifact: ApproximationArtifact = read_json(&input)?;
    if artifact.schema_version != SCHEMA_VERSION || artifact.kind != "approximation" {
        return Err(CliError::Config(format!("{}: not a version {SCHEMA_VERSION} approximation", input.display())));
    }
    if artifact.problem.model != model {
        return Err(CliError::Config(format!(
            "`model`: config names {model} but the artifact approximates {}",
            artifact.problem.model
        )));
    }
    let stored = &artifact.problem;
    let bounds = stored.c.bounds().to_vec();
    let region = match c.opt_region("region", model)? {
        Some(r) => r,
        None => CompactRegion::new(model, bounds).map_err(|e| CliError::Config(format!("artifact region: {e}")))?,
    };
    let u = if c.opt_f64("u_radius")?.is_some() { c.u_radius()? } else { stored.u };
    let side = if c.opt_str("side")?.is_some() { c.side()? } else { stored.side };
    c.finish()?;

    let q = FiniteLeftQuasigroup::new(artifact.problem.side, artifact.table, artifact.embedding)
        .map_err(|e| CliError::Config(format!("{}: {e}", input.display())))?;
    let problem = ApproximationProblem::new(region, u, side);
    let mut report = verify_approximation(&q, &problem).map_err(|e| CliError::Config(e.to_string()))?;
    report.retries = artifact.report.retries;
    report.o_radius = artifact.report.o_radius;
    match ctx.format {
        Format::Json => {
            let r = ReportArtifact { schema_version: SCHEMA_VERSION, kind: "report", model, report: &report };
            ctx.out.write_json("verify.json", &r)?;
        }
        Format::Csv => report_csv(&ctx, "verify.csv", &report)?,
    }
    verdict_of(&report)
}

#[derive(Serialize)]
struct HaarArtifact {
    schema_version: u32,
    kind: &'static str,
    model: GroupModel,
    side: qapprox::Side,
    function: TestFunction,
    shifts: Vec<GroupElement>,
    rows: Vec<qapprox::haar::SweepRow>,
}

fn test_function(c: &mut Config, model: GroupModel) -> Result<TestFunction, CliError> {
    let f = match c.opt_str("function")?.as_deref().unwrap_or("trig") {
        "trig" => TestFunction::Trig,
        "constant" => TestFunction::Constant { value: c.opt_f64("value")?.unwrap_or(1.0) },
        "bump" => {
            let center = c.opt_element("center", model)?.unwrap_or_else(|| model.identity());
            TestFunction::Bump { center, radius: c.f64("radius")?, height: c.opt_f64("height")?.unwrap_or(1.0) }
        }
        other => return Err(CliError::Config(format!("`function`: unknown test function `{other}`"))),
    };
    f.validate(model).map_err(|e| CliError::Config(format!("`function`: {e}")))?;
    Ok(f)
}

pub fn haar(mut ctx: Context) -> Result<(), CliError> {
    let c = &mut ctx.config;
    c.check_command("haar")?;
    let model = c.model()?;
    let region = c.region("region", model)?;
    let reference = c.opt_region("reference", model)?;
    let side = c.side()?;
    let opts = build_options(c)?;
    let radii = c.opt_f64_list("refinements")?.ok_or_else(|| CliError::Config("`refinements`: missing".into()))?;
    if radii.is_empty() || radii.iter().any(|&u| !(u > 0.0 && u.is_finite())) {
        return Err(CliError::Config("`refinements`: radii must be positive".into()));
    }
    let function = test_function(c, model)?;
    let mut shifts = c.opt_elements("shifts", model)?.unwrap_or_default();
    let count = c.opt_usize("shift_count")?.unwrap_or(0);
    let shift_radius = c.opt_f64("shift_radius")?.unwrap_or(0.1);
    let seed = c.opt_usize("seed")?.unwrap_or(0) as u64;
    c.finish()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    shifts.extend((0..count).map(|_| model.sample_ball(shift_radius, &mut rng)));

    let rows = refinement_sweep(&region, side, &radii, &function, reference.as_ref(), &shifts, opts)
        .map_err(|e| CliError::Construction(e.to_string()))?;
    match ctx.format {
        Format::Json => {
            let a = HaarArtifact { schema_version: SCHEMA_VERSION, kind: "haar", model, side, function, shifts, rows };
            ctx.out.write_json("haar.json", &a)?;
        }
        Format::Csv => {
            let mut header: Vec<String> = ["u_radius", "grid_size", "value", "delta"].map(String::from).to_vec();
            header.extend((0..shifts.len()).map(|i| format!("margin_{i}")));
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let mut v = vec![num(r.u_radius), r.grid_size.to_string(), num(r.value), num(r.delta)];
                    v.extend(r.margins.iter().map(|&m| num(m)));
                    v
                })
                .collect();
            ctx.out.write_csv("haar.csv", &header, &body)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct LatinArtifact {
    schema_version: u32,
    kind: &'static str,
    partial_order: usize,
    symbol_count: usize,
    order: usize,
    square: Vec<Vec<usize>>,
    /// `[label, symbol index]` pairs.
    symbol_map: Vec<(usize, usize)>,
    /// Group element named by each label, for group windows.
    symbols: Option<Vec<GroupElement>>,
    /// Group element of each symbol index, when fillers could be placed.
    embedding: Option<Vec<GroupElement>>,
}

pub fn latin(mut ctx: Context) -> Result<(), CliError> {
    let c = &mut ctx.config;
    c.check_command("latin")?;
    let cells = c.opt_index_matrix("cells")?;
    let (partial, window) = match cells {
        Some(cells) => {
            let order = c.usize("order")?;
            let cells = cells
                .into_iter()
                .map(|r| match r[..] {
                    [a, b, l] => Ok((a, b, l)),
                    _ => Err(CliError::Config("`cells`: each cell is [row, col, label]".into())),
                })
                .collect::<Result<Vec<_>, _>>()?;
            let p = PartialLatinSquare::new(order, cells).map_err(|e| CliError::Config(format!("`cells`: {e}")))?;
            (p, None)
        }
        None => {
            let model = c.model()?;
            let universe = c.opt_region("universe", model)?;
            let w = match c.opt_elements("elements", model)? {
                Some(elements) => GroupWindow::new(model, elements, universe),
                None => {
                    let region = c
                        .opt_region("region", model)?
                        .ok_or_else(|| CliError::Config("`elements`: give `elements`, `region` or `cells`".into()))?;
                    GroupWindow::from_region(&region)
                }
            }
            .map_err(|e| CliError::Config(e.to_string()))?;
            let wp = window_to_partial(&w);
            (wp.partial.clone(), Some((w, wp)))
        }
    };
    c.finish()?;

    let e = embed_partial(&partial).map_err(|e| CliError::Construction(e.to_string()))?;
    verify_latin(e.square.table()).map_err(|v| CliError::Verification(v.to_string()))?;
    if !e.restricts_to(&partial) {
        return Err(CliError::Verification("square does not restrict to the partial table".into()));
    }
    let (symbols, embedding) = match &window {
        Some((w, wp)) => (Some(wp.symbols.clone()), w.embedding(wp, &e).ok()),
        None => (None, None),
    };
    match ctx.format {
        Format::Json => {
            let a = LatinArtifact {
                schema_version: SCHEMA_VERSION,
                kind: "latin",
                partial_order: partial.order(),
                symbol_count: partial.symbol_count(),
                order: e.square.order(),
                square: e.square.table().clone(),
                symbol_map: e.symbol_map.clone(),
                symbols,
                embedding,
            };
            ctx.out.write_json("latin.json", &a)?;
        }
        Format::Csv => {
            let n = e.square.order();
            let header: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
            let rows: Vec<Vec<String>> =
                e.square.table().iter().map(|r| r.iter().map(usize::to_string).collect()).collect();
            ctx.out.write_csv("latin.csv", &header, &rows)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct LevelRow {
    level: usize,
    elements: Vec<usize>,
    quotient_size: usize,
    verdict: Verdict,
}

#[derive(Serialize)]
struct SemigroupArtifact {
    schema_version: u32,
    kind: &'static str,
    n: usize,
    zero: Option<usize>,
    verdict: Verdict,
    levels: Vec<LevelRow>,
    extraction: ExtractionReport,
}

pub fn semigroup(mut ctx: Context) -> Result<(), CliError> {
    let c = &mut ctx.config;
    c.check_command("semigroup")?;
    let s: FiniteSemigroup = match c.opt_path("input")? {
        Some(p) => read_json(&p)?,
        None => {
            let t = c
                .opt_index_matrix("table")?
                .ok_or_else(|| CliError::Config("`input`: give `input` or `table`".into()))?;
            FiniteSemigroup::new(t).map_err(|e| CliError::Config(format!("`table`: {e}")))?
        }
    };
    let near_unit = c.usize("near_unit")?;
    c.finish()?;
    if near_unit >= s.size() {
        return Err(CliError::Config(format!("`near_unit`: {near_unit} is outside 0..{}", s.size())));
    }

    let chain = maximal_ideal_chain(&s);
    let levels = (0..chain.levels.len() - 1)
        .map(|k| {
            let q = level_quotient(&s, &chain, k);
            LevelRow {
                level: k,
                elements: chain.levels[k].clone(),
                quotient_size: q.semigroup.size(),
                verdict: classify(&q.semigroup).verdict,
            }
        })
        .collect::<Vec<_>>();
    let extraction = extract_group(&s, near_unit).map_err(|e| CliError::Construction(e.to_string()))?;
    match ctx.format {
        Format::Json => {
            let a = SemigroupArtifact {
                schema_version: SCHEMA_VERSION,
                kind: "semigroup",
                n: s.size(),
                zero: s.zero(),
                verdict: classify(&s).verdict,
                levels,
                extraction,
            };
            ctx.out.write_json("semigroup.json", &a)?;
        }
        Format::Csv => {
            let header = ["level", "size", "quotient_size", "verdict"].map(String::from);
            let rows: Vec<Vec<String>> = levels
                .iter()
                .map(|l| {
                    let v = serde_json::to_value(l.verdict).unwrap();
                    vec![
                        l.level.to_string(),
                        l.elements.len().to_string(),
                        l.quotient_size.to_string(),
                        v.as_str().unwrap_or_default().to_string(),
                    ]
                })
                .collect();
            ctx.out.write_csv("semigroup.csv", &header, &rows)?;
        }
    }
    Ok(())
}
