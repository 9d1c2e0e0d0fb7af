//! Subcommand implementations.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use liftac::accore::{supp, to_dot, Badge, Body, Env, Ledger, Value, VarAc, VarGoal};
use liftac::analyses::{check_fts, query_fts, PropertySpec, Query};
use liftac::featexpr::{configs_of, Alphabet, Configuration, FeatureExpr, Universe};
use liftac::fixtures;
use liftac::liftreg::{
    regress_lift, regress_variability, Ctx, RegBits, VarChange, VarEvolution, VarNodeReport,
    VarRegValue, VariabilityPartition,
};
use liftac::plmodel::{delta_hat, diff_models, DeltaMode, ElementDiff, Model, ModelStore};
use liftac::regression::RpRegistry;
use liftac::templates::lift_instantiate;
use liftac::varac::{derive_ledger, derive_var_ac, supp_var, VarEnv};

use crate::workspace::{emit, load_store, read_fts, read_json, save_store, to_json, universe_of};
use crate::{CaseArgs, Command, DeltaArg, FixtureName, Outcome, RegistryArg, RegressArgs};

pub fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Derive { model, config } => derive(&model, &config),
        Command::Configs {
            model,
            formula,
            features,
        } => configs(model.as_deref(), formula.as_deref(), &features),
        Command::CheckSupport {
            case,
            config,
            all_configs: _,
        } => check_support(&case, config.as_deref()),
        Command::Instantiate {
            case,
            template,
            node,
            input,
            label,
        } => instantiate(&case, &template, &node, &input, &label),
        Command::Query {
            model,
            query,
            restrict,
        } => run_query(&model, &query, &restrict),
        Command::ModelCheck {
            model,
            spec,
            restrict,
        } => model_check(&model, &spec, &restrict),
        Command::Diff { old, new, mode } => diff(&old, &new, mode),
        Command::ExportDot { ac, model } => export_dot(ac.as_deref(), model.as_deref()),
        Command::Regress(args) => regress(&args),
        Command::Fixture { name, out } => fixture(name, &out),
    }
}

fn formula(s: &str) -> Result<FeatureExpr> {
    s.parse().with_context(|| format!("formula `{s}`"))
}

fn derive(model: &Path, config: &str) -> Outcome {
    let m = read_fts(model)?;
    let c: Configuration = config.parse()?;
    emit(&m.derive(&c)?)?;
    Ok(true)
}

#[derive(Serialize)]
struct ConfigList {
    count: usize,
    configurations: Vec<Configuration>,
}

fn configs(model: Option<&Path>, phi: Option<&str>, features: &[String]) -> Outcome {
    let list = match (model, phi) {
        (Some(p), _) => read_fts(p)?.feature_model().configs(),
        (None, Some(s)) => {
            let phi = formula(s)?;
            let names: Vec<String> = if features.is_empty() {
                phi.vars().into_iter().collect()
            } else {
                features.to_vec()
            };
            configs_of(&phi, &Alphabet::new(names)?)?
        }
        (None, None) => bail!("give --model or --formula"),
    };
    emit(&ConfigList {
        count: list.len(),
        configurations: list,
    })?;
    Ok(true)
}

struct Case {
    store: ModelStore,
    ac: VarAc,
    ledger: Ledger,
    universe: Universe,
}

fn load_case(args: &CaseArgs) -> Result<Case> {
    let store = load_store(&args.store)?;
    let ac: VarAc = read_json(&args.ac)?;
    ac.validate_shape()?;
    let ledger = match &args.ledger {
        Some(p) => read_json(p)?,
        None => Ledger::new(),
    };
    let universe = universe_of(&store, args.product_line.as_deref())?;
    Ok(Case {
        store,
        ac,
        ledger,
        universe,
    })
}

#[derive(Serialize)]
struct SupportReport {
    supported: bool,
    /// Configurations of the case whose derived case is unsupported.
    unsupported: Vec<Configuration>,
}

fn check_support(args: &CaseArgs, config: Option<&str>) -> Outcome {
    let case = load_case(args)?;
    let u = &case.universe;
    let product = |c: &Configuration| -> Result<bool> {
        let ledger = derive_ledger(&case.ledger, c);
        let env = Env::new(&case.store, &ledger);
        Ok(supp(&derive_var_ac(&case.ac, c)?, &env)?)
    };
    let report = match config {
        Some(s) => {
            let c: Configuration = s.parse()?;
            if !u.restrict(&FeatureExpr::True)?.get(u.alphabet().index(&c)?) {
                bail!("{c} is not a configuration of the product line");
            }
            let ok = product(&c)?;
            SupportReport {
                supported: ok,
                unsupported: if ok { vec![] } else { vec![c] },
            }
        }
        None => {
            let env = VarEnv {
                store: &case.store,
                ledger: &case.ledger,
                universe: u,
            };
            let supported = supp_var(&case.ac, &env).unwrap_or(false);
            let mut unsupported = Vec::new();
            for c in u.configs(&u.restrict(case.ac.pc())?) {
                if !product(&c).unwrap_or(false) {
                    unsupported.push(c);
                }
            }
            SupportReport {
                supported,
                unsupported,
            }
        }
    };
    emit(&report)?;
    Ok(report.supported)
}

fn instantiate(args: &CaseArgs, template: &str, node: &str, input: &str, label: &str) -> Outcome {
    let case = load_case(args)?;
    let text = match input.strip_prefix('@') {
        Some(p) => fs::read_to_string(p).with_context(|| format!("reading {p}"))?,
        None => input.to_string(),
    };
    let x: Value = serde_json::from_str(&text).context("parsing template input")?;
    let mut ac = case.ac.clone();
    let target = ac
        .find_mut(node)
        .with_context(|| format!("no node `{node}`"))?;
    if !matches!(target.body, Body::Und) {
        bail!("node `{node}` is already developed");
    }
    let parent: VarGoal = target.goal.clone();
    let developed = lift_instantiate(
        template,
        &x,
        node,
        &parent,
        label,
        &case.store,
        &case.universe,
    )?;
    *target = developed;
    emit(&ac)?;
    Ok(true)
}

fn run_query(model: &Path, q: &str, restrict: &str) -> Outcome {
    let m = read_fts(model)?;
    let q: Query = q.parse()?;
    emit(&query_fts(&m, &q, &formula(restrict)?)?)?;
    Ok(true)
}

fn model_check(model: &Path, spec: &str, restrict: &str) -> Outcome {
    let m = read_fts(model)?;
    let spec: PropertySpec = spec.parse()?;
    let v = check_fts(&m, &spec, &formula(restrict)?)?;
    emit(&v)?;
    Ok(v.cells.iter().all(|c| c.value.is_ok()))
}

fn delta_mode(a: DeltaArg) -> DeltaMode {
    match a {
        DeltaArg::Exact => DeltaMode::Exact,
        DeltaArg::Approx => DeltaMode::OverApprox,
        DeltaArg::Auto => DeltaMode::Auto,
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct DiffReport {
    elements: ElementDiff,
    /// Configurations whose products differ.
    delta_hat: FeatureExpr,
}

fn diff(old: &Path, new: &Path, mode: DeltaArg) -> Outcome {
    let (a, b) = (read_fts(old)?, read_fts(new)?);
    let report = DiffReport {
        elements: diff_models(&a, &b)?,
        delta_hat: delta_hat(&a, &b, delta_mode(mode))?,
    };
    emit(&report)?;
    Ok(true)
}

fn export_dot(ac: Option<&Path>, model: Option<&Path>) -> Outcome {
    match (ac, model) {
        (Some(p), _) => {
            let ac: VarAc = read_json(p)?;
            print!("{}", to_dot(&ac, &BTreeMap::new()));
        }
        (None, Some(p)) => print!("{}", read_json::<Model>(p)?.to_dot()),
        (None, None) => bail!("give --ac or --model"),
    }
    Ok(true)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct UniverseReport {
    features: Vec<String>,
    domain: FeatureExpr,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct PartitionReport {
    new_model: FeatureExpr,
    reuse: FeatureExpr,
    new: FeatureExpr,
    new_features: Vec<String>,
    removed_features: Vec<String>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct RegressReport {
    universe: UniverseReport,
    delta: VarEvolution,
    root: VarRegValue,
    nodes: BTreeMap<String, VarNodeReport>,
    new_goals: BTreeMap<String, Vec<VarGoal>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    partition: Option<PartitionReport>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    obligations: BTreeMap<String, Vec<VarGoal>>,
}

fn parse_change(s: &str) -> Result<(String, String, String)> {
    match s.split(':').collect::<Vec<_>>().as_slice() {
        [m, from, to] if !m.is_empty() && !from.is_empty() && !to.is_empty() => {
            Ok((m.to_string(), from.to_string(), to.to_string()))
        }
        _ => bail!("expected MODEL:FROM:TO, got `{s}`"),
    }
}

fn badges(values: &[(String, VarRegValue)], out: &mut BTreeMap<String, Vec<Badge>>) {
    for (key, v) in values {
        // Worst part first: it sets the fill color.
        let parts = [
            ("salmon", "revise", &v.revise),
            ("khaki", "recheck", &v.recheck),
            ("palegreen", "reuse", &v.reuse),
        ];
        let bs = parts
            .into_iter()
            .filter(|(_, _, e)| **e != FeatureExpr::False)
            .map(|(color, name, e)| Badge {
                color,
                text: format!("{name}: {e}"),
            })
            .collect();
        out.insert(key.clone(), bs);
    }
}

fn regress(args: &RegressArgs) -> Outcome {
    let case = load_case(&args.case)?;
    let registry = match args.registry {
        RegistryArg::None => RpRegistry::none(),
        RegistryArg::Reverify => RpRegistry::default(),
    };
    let changes: Vec<(String, String, String)> = args
        .changes
        .iter()
        .map(|s| parse_change(s))
        .collect::<Result<_>>()?;
    let partition = if args.variability {
        let Some((m, from, to)) = changes.first() else {
            bail!("--variability needs a --change")
        };
        let fm = |v: &str| -> Result<_> {
            Ok(case
                .store
                .fts(&liftac::plmodel::ModelRef::new(m.clone(), v))?
                .feature_model()
                .clone())
        };
        Some(VariabilityPartition::compute(&fm(from)?, &fm(to)?)?)
    } else {
        None
    };
    let universe = match (&partition, &args.case.product_line, changes.first()) {
        (Some(p), _, _) => p.universe().with_domain(p.reuse_bits()),
        (None, None, Some((m, from, _))) => universe_of(&case.store, Some(&format!("{m}@{from}")))?,
        _ => case.universe.clone(),
    };
    let delta = match &args.delta {
        Some(p) => read_json(p)?,
        None => {
            if changes.is_empty() {
                bail!("give --change or --delta");
            }
            let exact = !args.approx_delta;
            let list = changes
                .iter()
                .map(|(m, f, t)| VarEvolution::between(m, f, t, &case.store, &universe, exact))
                .collect::<Result<Vec<VarChange>, _>>()?;
            VarEvolution(list)
        }
    };

    let (root, nodes, new_goals, obligations, updated, render) = match &partition {
        Some(p) => {
            let run = regress_variability(&case.ac, &delta, &case.store, &registry, p)?;
            let value = |m: &BTreeMap<String, RegBits>, id: &str| {
                m.get(id).map(|b| b.to_value(&run.universe))
            };
            let mut nodes = BTreeMap::new();
            run.inner.updated.walk(&mut |n| {
                nodes.insert(
                    n.id.clone(),
                    VarNodeReport {
                        regression: value(&run.goals, &n.id),
                        strategy: value(&run.strategies, &n.id),
                        evidence: value(&run.evidence, &n.id),
                        obsolete: run
                            .inner
                            .annotations
                            .obsolete
                            .get(&n.id)
                            .map(|b| run.inner.universe.expr(b)),
                    },
                );
            });
            let root = run.root_value();
            (
                root,
                nodes,
                run.inner.annotations.new_goals.clone(),
                run.obligations.clone(),
                run.inner.updated.clone(),
                run.universe.clone(),
            )
        }
        None => {
            let ctx = Ctx {
                universe: &universe,
                delta: &delta,
                store: &case.store,
                registry: &registry,
            };
            let run = regress_lift(&case.ac, &ctx)?;
            (
                run.root_value(),
                run.report(),
                run.annotations.new_goals.clone(),
                BTreeMap::new(),
                run.updated.clone(),
                universe.clone(),
            )
        }
    };

    if let Some(path) = &args.dot {
        let mut values = Vec::new();
        for (id, r) in &nodes {
            for (suffix, v) in [
                ("", &r.regression),
                ("/s", &r.strategy),
                ("/e", &r.evidence),
            ] {
                if let Some(v) = v {
                    values.push((format!("{id}{suffix}"), v.clone()));
                }
            }
        }
        let mut b = BTreeMap::new();
        badges(&values, &mut b);
        fs::write(path, to_dot(&updated, &b))
            .with_context(|| format!("writing {}", path.display()))?;
    }

    let flagged = render.bits(&root.revise)?.or(&render.bits(&root.recheck)?);
    let clean = flagged.and(render.domain()).is_empty();
    let report = RegressReport {
        universe: UniverseReport {
            features: render.alphabet().names().to_vec(),
            domain: render.alphabet().expr_of(render.domain()),
        },
        delta,
        root,
        nodes,
        new_goals,
        partition: partition.map(|p| PartitionReport {
            new_model: p.phi_new_model,
            reuse: p.phi_reuse,
            new: p.phi_new,
            new_features: p.new_features.into_iter().collect(),
            removed_features: p.removed_features.into_iter().collect(),
        }),
        obligations,
    };
    emit(&report)?;
    Ok(clean)
}

fn fixture(name: FixtureName, out: &Path) -> Outcome {
    fs::create_dir_all(out)?;
    let write = |file: &str, text: String| {
        fs::write(out.join(file), text).with_context(|| format!("writing {file}"))
    };
    let lifted = match name {
        FixtureName::XorLoop => {
            write("model.json", to_json(&fixtures::xor_loop())?)?;
            return Ok(true);
        }
        FixtureName::Requirements => fixtures::requirements_case(),
        FixtureName::Alarm => fixtures::alarm_case(),
        FixtureName::AlarmNewState => fixtures::alarm_new_state_case(),
        FixtureName::AlarmFeatureC => fixtures::alarm_feature_c_case(),
        FixtureName::AlarmNoop => {
            let mut c = fixtures::alarm_case();
            c.store
                .insert("M", "v2", Model::Fts(fixtures::alarm_family_old()));
            c
        }
        FixtureName::Pump => fixtures::pump_case(),
    };
    save_store(&lifted.store, &out.join("store"))?;
    write("ac.json", to_json(&lifted.ac)?)?;
    write("ledger.json", to_json(&lifted.ledger)?)?;
    Ok(true)
}
