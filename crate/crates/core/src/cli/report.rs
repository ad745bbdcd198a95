//! Runs a scenario and writes its artifacts.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde_json::{json, Value};

use crate::bundle::{is_admissible, RootBundle, DEFAULT_WINDOW, DEFAULT_ZERO_TOL};
use crate::closedness::closedness_report;
use crate::extend::{
    ah_fit, branch_tests, bundles, decide_ah, decide_lift, enumerate_lifts_between, Answer, Bundles, Lift, Verdict,
    DEFAULT_MAX_LIFTS,
};
use crate::monodromy::strips;

use super::figures::bundle_svg;
use super::scenario::{build_map, build_polynomial, run_checks, Analysis, Scenario};

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub svg: bool,
    pub stability: bool,
}

/// Verdict answers compared across resolutions and against expectations.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Answers {
    cole: Option<Answer>,
    ah: Option<Answer>,
    closed: Option<bool>,
}

impl Answers {
    fn to_json(&self) -> Value {
        json!({ "cole": self.cole, "ah": self.ah, "closed": self.closed })
    }
}

pub struct Outcome {
    pub report: Value,
    /// Every expectation, control and stability requirement held.
    pub expectations_met: bool,
}

struct Analyzed {
    report: serde_json::Map<String, Value>,
    answers: Answers,
    controls_met: bool,
    artifacts: Vec<(String, Artifact)>,
}

enum Artifact {
    Bundle(Box<RootBundle>),
    Witness(Box<RootBundle>, Lift),
    Figure(String),
}

fn branch_json(b: &RootBundle) -> Value {
    b.branch_points
        .iter()
        .map(|bp| {
            json!({
                "sample": bp.sample,
                "coordinate": b.base.coord_at(&bp.location).components(),
                "gap": bp.gap,
                "groups": bp.groups,
            })
        })
        .collect()
}

fn verdict_json(v: &Verdict, witness_file: &str) -> Value {
    let mut j = v.to_json();
    if v.witness.is_some() {
        j["witness_ref"] = json!(witness_file);
    }
    j
}

fn analyze(scenario: &Scenario, figures: bool) -> anyhow::Result<Analyzed> {
    scenario.validate()?;
    let base = scenario.build_base()?;
    run_checks(scenario, &base)?;
    let mut report = serde_json::Map::new();
    report.insert("scenario".into(), json!(scenario.name));
    report.insert("base".into(), json!(base.kind));
    report.insert("samples".into(), json!(base.len()));
    report.insert("seed".into(), json!(scenario.seed));
    let mut answers = Answers::default();
    let mut artifacts = Vec::new();
    let mut controls_met = true;
    let wants = |a: Analysis| scenario.analyses.contains(&a);

    if let Some(spec) = &scenario.polynomial {
        let p = build_polynomial(spec, &base)?;
        let map = build_map(scenario.map.as_ref(), &base)?;
        let Bundles { source, target } = bundles(&p, &map)?;
        if wants(Analysis::Bundle) {
            let adm = is_admissible(&source, DEFAULT_ZERO_TOL, DEFAULT_WINDOW);
            report.insert(
                "bundle".into(),
                json!({
                    "degree": source.degree(),
                    "admissible": adm.admissible,
                    "branch_points": branch_json(&source),
                    "pullback_branch_points": branch_json(&target),
                }),
            );
        }
        if wants(Analysis::Strips) {
            report.insert("strips".into(), json!({ "source": strips(&source)?.windings(), "target": strips(&target)?.windings() }));
        }
        let cole = if wants(Analysis::Cole) || wants(Analysis::Corollary3) {
            let v = decide_lift(&source, &target, DEFAULT_MAX_LIFTS)?;
            if let Some(w) = &v.witness {
                artifacts.push(("witness_cole.csv".to_string(), Artifact::Witness(Box::new(source.clone()), w.clone())));
            }
            report.insert("cole".into(), verdict_json(&v, "witness_cole.csv"));
            answers.cole = Some(v.answer);
            Some(v.answer)
        } else {
            None
        };
        let ah = if wants(Analysis::Ah) || wants(Analysis::Corollary3) {
            let v = decide_ah(&source, &target, DEFAULT_MAX_LIFTS)?;
            if let Some(w) = &v.witness {
                artifacts.push(("witness_ah.csv".to_string(), Artifact::Witness(Box::new(source.clone()), w.clone())));
            }
            report.insert("ah".into(), verdict_json(&v, "witness_ah.csv"));
            answers.ah = Some(v.answer);
            Some(v.answer)
        } else {
            None
        };
        if let (true, Some(ah), Some(cole)) = (wants(Analysis::Corollary3), ah, cole) {
            report.insert(
                "corollary3".into(),
                json!({ "ah": ah, "cole": cole, "consistent": !(ah == Answer::Yes && cole == Answer::No) }),
            );
        }
        if wants(Analysis::Lifts) {
            let (lifts, truncated) = enumerate_lifts_between(&source, &target, DEFAULT_MAX_LIFTS)?;
            let entries = lifts
                .iter()
                .enumerate()
                .map(|(i, lift)| -> anyhow::Result<Value> {
                    let fit = ah_fit(&source, &lift.values)?;
                    let tests = branch_tests(&source, &target, lift)?;
                    Ok(json!({
                        "index": i,
                        "fit_accepted": fit.accepted(),
                        "refusal": fit.refusal,
                        "branch_tests": tests.iter().map(|t| json!({
                            "sample": t.sample,
                            "parameter": t.parameter,
                            "verdict": t.verdict,
                        })).collect::<Vec<_>>(),
                    }))
                })
                .collect::<anyhow::Result<Vec<_>>>()?;
            report.insert("lifts".into(), json!({ "count": lifts.len(), "truncated": truncated, "lifts": entries }));
        }
        let mut controls = Vec::new();
        for c in &scenario.controls {
            let cp = match &c.polynomial {
                Some(spec) => build_polynomial(spec, &base)?,
                None => p.clone(),
            };
            let cm = build_map(c.map.as_ref(), &base)?;
            let Bundles { source, target } = bundles(&cp, &cm)?;
            let got = decide_lift(&source, &target, DEFAULT_MAX_LIFTS)?.answer;
            controls_met &= got == c.expect_cole;
            controls.push(json!({ "name": c.name, "cole": got, "expected": c.expect_cole }));
        }
        if !controls.is_empty() {
            report.insert("controls".into(), Value::Array(controls));
        }
        if figures {
            for (name, b) in [("bundle_p.svg", &source), ("bundle_pT.svg", &target)] {
                if let Ok(svg) = bundle_svg(b, &format!("{}: {}", scenario.name, name.trim_end_matches(".svg"))) {
                    artifacts.push((format!("figures/{name}"), Artifact::Figure(svg)));
                }
            }
        }
        artifacts.push(("bundle_p.csv".into(), Artifact::Bundle(Box::new(source))));
        artifacts.push(("bundle_pT.csv".into(), Artifact::Bundle(Box::new(target))));
    }
    if wants(Analysis::Closedness) {
        let r = closedness_report(&base, scenario.trials, scenario.seed)?;
        answers.closed = Some(r.algebraically_closed_verdict);
        report.insert("closedness".into(), serde_json::to_value(&r)?);
    }
    Ok(Analyzed { report, answers, controls_met, artifacts })
}

fn write_witness(path: &Path, bundle: &RootBundle, lift: &Lift) -> std::io::Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    let coords = bundle.base.kind.variables().join(",");
    writeln!(w, "sample_index,{coords},sheet_index,target_sheet,value_re,value_im")?;
    for (x, row) in lift.sheets.iter().enumerate() {
        let c: Vec<String> = bundle.base.samples[x].components().iter().map(|v| v.to_string()).collect();
        let c = c.join(",");
        for (s, &t) in row.iter().enumerate() {
            let v = lift.values[x][s];
            writeln!(w, "{x},{c},{s},{t},{},{}", v.re, v.im)?;
        }
    }
    w.flush()
}

fn write_artifacts(out: &Path, artifacts: &[(String, Artifact)]) -> anyhow::Result<()> {
    for (name, artifact) in artifacts {
        let path = out.join(name);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        match artifact {
            Artifact::Bundle(b) => {
                let mut w = BufWriter::new(fs::File::create(&path)?);
                b.write_csv(&mut w)?;
                w.flush()?;
            }
            Artifact::Witness(b, lift) => write_witness(&path, b, lift)?,
            Artifact::Figure(svg) => fs::write(&path, svg)?,
        }
    }
    Ok(())
}

/// Runs a scenario, writing `verdict.json` and artifacts under `out`.
pub fn run_scenario(scenario: &Scenario, options: &RunOptions, out: &Path) -> anyhow::Result<Outcome> {
    let mut scenario = scenario.clone();
    if let Some(n) = options.samples {
        scenario = scenario.with_samples(n);
    }
    if let Some(seed) = options.seed {
        scenario.seed = seed;
    }
    let Analyzed { mut report, answers, controls_met, artifacts } = analyze(&scenario, options.svg)?;
    let expect = &scenario.expect;
    let mut expectations = Vec::new();
    let mut met = controls_met;
    for (what, expected, got) in [
        ("cole", expect.cole.map(|a| json!(a)), answers.cole.map(|a| json!(a))),
        ("ah", expect.ah.map(|a| json!(a)), answers.ah.map(|a| json!(a))),
        ("closed", expect.closed.map(|a| json!(a)), answers.closed.map(|a| json!(a))),
    ] {
        if let Some(expected) = expected {
            let ok = got.as_ref() == Some(&expected);
            met &= ok;
            expectations.push(json!({ "what": what, "expected": expected, "got": got, "met": ok }));
        }
    }
    report.insert("expectations".into(), Value::Array(expectations));
    if options.stability {
        let resolutions = scenario.stability_resolutions();
        let mut runs = vec![answers.clone()];
        for &n in &resolutions[1..] {
            runs.push(analyze(&scenario.with_samples(n), false)?.answers);
        }
        let stable = runs.iter().all(|a| *a == answers);
        met &= stable;
        report.insert(
            "stability".into(),
            json!({
                "resolutions": resolutions,
                "answers": runs.iter().map(Answers::to_json).collect::<Vec<_>>(),
                "stable": stable,
            }),
        );
    }
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    write_artifacts(out, &artifacts)?;
    let report = Value::Object(report);
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    fs::write(out.join("verdict.json"), text)?;
    Ok(Outcome { report, expectations_met: met })
}

/// Output directory used when none is given.
pub fn default_out(scenario: &Scenario) -> PathBuf {
    PathBuf::from("out").join(&scenario.name)
}
