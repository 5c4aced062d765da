use std::path::Path;

use serde_json::{json, Value};

use stabkit::chamber::{self, ChamberError, Region, Wall};
use stabkit::cone::{self, ChernData, ConeError, IntersectionTensor};
use stabkit::field::Field;
use stabkit::kahler::{self, KahlerError};
use stabkit::linalg::Subspace;
use stabkit::quiver::{
    hn_filtration, hn_filtration_descending, jh_filtration, s_equivalent, semistability_check, theta_vector, Outcome,
    QuiverError, Representation, Strategy, Submodule, DEFAULT_SUBSPACE_CAP,
};
use stabkit::scenario::{AnyRep, ConeParams, Scenario};
use stabkit::sheaf::{self, StabilityParameter};
use stabkit::vgit::{self, Sample, Segment, VgitError};
use stabkit::Scalar;

use crate::report::{join, Failure, Report};
use crate::{ApproxCmd, ConeCmd, QuiverCmd};

pub struct Caps {
    pub subspace: u128,
}

pub struct Context {
    scenario: Option<Scenario>,
    seed: Option<u64>,
    caps: Caps,
    caps_given: bool,
}

/// `{subspace:10}` → `{"subspace":10}`; already quoted keys pass through.
fn quote_bare_keys(s: &str) -> String {
    let chars: Vec<char> = s.chars().collect();
    let mut out = String::with_capacity(s.len() + 8);
    let mut expect_key = false;
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '{' || c == ',' {
            out.push(c);
            expect_key = true;
            i += 1;
            continue;
        }
        if expect_key && (c.is_ascii_alphabetic() || c == '_') {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push('"');
            out.extend(&chars[start..i]);
            out.push('"');
            expect_key = false;
            continue;
        }
        if !c.is_whitespace() {
            expect_key = false;
        }
        out.push(c);
        i += 1;
    }
    out
}

fn parse_caps(text: &str) -> Result<Caps, Failure> {
    let v: Value = serde_json::from_str(&quote_bare_keys(text)).map_err(|e| Failure::input(format!("--caps: {e}")))?;
    let obj = v.as_object().ok_or_else(|| Failure::input("--caps must be an object"))?;
    let mut caps = Caps {
        subspace: DEFAULT_SUBSPACE_CAP,
    };
    for (k, val) in obj {
        match k.as_str() {
            "subspace" => {
                caps.subspace = val
                    .as_u64()
                    .ok_or_else(|| Failure::input("--caps: subspace must be a non-negative integer"))?
                    as u128
            }
            other => return Err(Failure::input(format!("--caps: unknown cap {other:?}"))),
        }
    }
    Ok(caps)
}

impl Context {
    pub fn new(scenario: Option<&Path>, seed: Option<u64>, caps: Option<&str>) -> Result<Self, Failure> {
        let scenario = match scenario {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Failure::input(format!("{}: {e}", p.display())))?;
                Some(Scenario::parse(&text).map_err(|e| Failure::input(format!("{}: {e}", p.display())))?)
            }
            None => None,
        };
        let (caps, caps_given) = match caps {
            Some(c) => (parse_caps(c)?, true),
            None => (
                Caps {
                    subspace: DEFAULT_SUBSPACE_CAP,
                },
                false,
            ),
        };
        Ok(Context {
            scenario,
            seed,
            caps,
            caps_given,
        })
    }

    fn scenario(&self) -> Result<&Scenario, Failure> {
        self.scenario
            .as_ref()
            .ok_or_else(|| Failure::input("this command needs --scenario"))
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    fn strategy(&self, sc: &Scenario) -> Strategy {
        match sc.strategy {
            Some(Strategy::Seeded { seed, trials }) => Strategy::Seeded {
                seed: self.seed.unwrap_or(seed),
                trials,
            },
            Some(Strategy::Exhaustive { cap }) if !self.caps_given => Strategy::Exhaustive { cap },
            _ => Strategy::Exhaustive {
                cap: self.caps.subspace,
            },
        }
    }
}

fn quiver_err(e: QuiverError) -> Failure {
    match e {
        QuiverError::CapExceeded { .. } => Failure::cap(e),
        QuiverError::NotSemistable => Failure::infeasible(e),
        _ => Failure::input(e),
    }
}

fn chamber_err(e: ChamberError) -> Failure {
    match e {
        ChamberError::Infeasible => Failure::infeasible(e),
        _ => Failure::input(e),
    }
}

fn sheaf_err(e: sheaf::SheafError) -> Failure {
    Failure::input(e)
}

fn cone_err(e: ConeError) -> Failure {
    match e {
        ConeError::Singular => Failure::infeasible(e),
        _ => Failure::input(e),
    }
}

fn kahler_err(e: KahlerError) -> Failure {
    match e {
        KahlerError::OmegaOutsideCone | KahlerError::SquareOutsideCone | KahlerError::Verification(_) => {
            Failure::infeasible(e)
        }
        _ => Failure::input(e),
    }
}

fn vgit_err(e: VgitError) -> Failure {
    match e {
        VgitError::Quiver(q) => quiver_err(q),
        _ => Failure::input(e),
    }
}

fn scenario_err(e: stabkit::scenario::ScenarioError) -> Failure {
    Failure::input(e)
}

fn verification(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "failed"
    }
}

fn scenario_walls(sc: &Scenario) -> Result<(Vec<Wall>, Vec<String>, usize), Failure> {
    let e = sc.ambient_class().map_err(scenario_err)?;
    let family = sc.family(None).map_err(scenario_err)?;
    let walls = chamber::compute_walls(e, &family).map_err(chamber_err)?;
    Ok((walls, chamber::surrogate_warnings(e, &family), e.j0()))
}

fn wall_origins(w: &Wall) -> String {
    let parts: Vec<String> = w
        .origins
        .iter()
        .map(|o| format!("{}:{}/{}", o.index, o.sub, o.sheaf))
        .collect();
    parts.join(" ")
}

pub fn walls(ctx: &Context) -> Result<Report, Failure> {
    let sc = ctx.scenario()?;
    let (walls, warnings, _) = scenario_walls(sc)?;
    let mut r = Report::new(
        json!({"command": "walls", "count": walls.len(), "walls": walls, "warnings": warnings}),
        &["normal", "origins"],
    );
    for w in &walls {
        r.row(vec![join(&w.normal), wall_origins(w)]);
    }
    Ok(r)
}

pub fn chambers(ctx: &Context, positive: bool) -> Result<Report, Failure> {
    let sc = ctx.scenario()?;
    let (walls, warnings, j0) = scenario_walls(sc)?;
    let region = if positive {
        Region::PositiveOrthant
    } else {
        Region::FullOrthant
    };
    let chambers = chamber::enumerate_chambers(&walls, j0, region);
    let mut ok = true;
    for c in &chambers {
        let located = chamber::locate(&StabilityParameter(c.sample.clone()), &walls).map_err(chamber_err)?;
        ok &= located == c.signs;
    }
    let mut r = Report::new(
        json!({
            "command": "chambers",
            "region": region,
            "walls": walls,
            "count": chambers.len(),
            "chambers": chambers,
            "warnings": warnings,
            "verification": verification(ok),
        }),
        &["signs", "sample", "full_dim"],
    );
    for c in &chambers {
        r.row(vec![join(&c.signs), join(&c.sample), c.full_dim.to_string()]);
    }
    if ok {
        Ok(r)
    } else {
        Err(Failure::failed("a chamber sample does not relocate to its sign vector", r))
    }
}

fn scenario_sigmas(sc: &Scenario) -> Result<Vec<StabilityParameter>, Failure> {
    let sigmas: Vec<StabilityParameter> = sc.sigma.iter().chain(&sc.sigmas).cloned().collect();
    if sigmas.is_empty() {
        return Err(Failure::input("scenario has no sigma or sigmas"));
    }
    Ok(sigmas)
}

pub fn locate(ctx: &Context) -> Result<Report, Failure> {
    let sc = ctx.scenario()?;
    let (walls, _, _) = scenario_walls(sc)?;
    let mut results = Vec::new();
    let mut r = Report::new(Value::Null, &["sigma", "signs"]);
    for s in scenario_sigmas(sc)? {
        let signs = chamber::locate(&s, &walls).map_err(chamber_err)?;
        r.row(vec![join(&s.0), join(&signs)]);
        results.push(json!({"sigma": s, "signs": signs}));
    }
    r.json = json!({"command": "locate", "walls": walls, "results": results});
    Ok(r)
}

pub fn stability(ctx: &Context) -> Result<Report, Failure> {
    let sc = ctx.scenario()?;
    let e = sc.ambient_class().map_err(scenario_err)?;
    let family = sc.family(None).map_err(scenario_err)?;
    let mut results = Vec::new();
    let mut r = Report::new(Value::Null, &["sigma", "verdict", "detail"]);
    for s in scenario_sigmas(sc)? {
        let v = sheaf::verdict(e, &family, &s).map_err(sheaf_err)?;
        let v_json = serde_json::to_value(&v).map_err(Failure::input)?;
        let name = v_json["verdict"].as_str().unwrap_or_default().to_string();
        let detail = match &v {
            sheaf::Verdict::Stable { vacuous } => format!("vacuous={vacuous}"),
            sheaf::Verdict::StrictlySemistable { witnesses } => witnesses.join(" "),
            sheaf::Verdict::Unstable { witness } => witness.clone(),
        };
        r.row(vec![join(&s.0), name, detail]);
        results.push(json!({"sigma": s, "result": v_json}));
    }
    r.json = json!({"command": "stability", "sheaf": e.label, "results": results});
    Ok(r)
}

fn subspace_json<F: Field>(f: &F, s: &Subspace<F::Elem>) -> Value {
    Value::Array(
        s.basis()
            .iter()
            .map(|v| Value::Array(v.iter().map(|x| Value::String(f.format_elem(x))).collect()))
            .collect(),
    )
}

fn submodule_json<F: Field>(f: &F, m: &Submodule<F::Elem>) -> Value {
    json!({
        "dims": m.dims(),
        "v": m.v.iter().map(|s| subspace_json(f, s)).collect::<Vec<_>>(),
        "w": m.w.iter().map(|s| subspace_json(f, s)).collect::<Vec<_>>(),
    })
}

fn pick<'a, F: Field>(
    reps: &'a [(String, Representation<F>)],
    label: Option<&str>,
) -> Result<Vec<&'a (String, Representation<F>)>, Failure> {
    match label {
        None => Ok(reps.iter().collect()),
        Some(l) => reps
            .iter()
            .find(|(name, _)| name == l)
            .map(|x| vec![x])
            .ok_or_else(|| Failure::input(format!("unknown representation {l:?}"))),
    }
}

fn quiver_run<F: Field>(
    ctx: &Context,
    sc: &Scenario,
    cmd: &QuiverCmd,
    reps: Vec<(String, Representation<F>)>,
) -> Result<Report, Failure> {
    let sigma = sc
        .sigma
        .clone()
        .ok_or_else(|| Failure::input("quiver commands need sigma"))?;
    let strategy = ctx.strategy(sc);
    let cap = match strategy {
        Strategy::Exhaustive { cap } => cap,
        Strategy::Seeded { .. } => ctx.caps.subspace,
    };
    match cmd {
        QuiverCmd::Check { label } => {
            let mut results = Vec::new();
            let mut r = Report::new(Value::Null, &["label", "outcome", "witness_dims", "theta"]);
            for (name, rep) in pick(&reps, label.as_deref())? {
                let f = &rep.field;
                let theta = theta_vector(&sigma, &rep.dims).map_err(quiver_err)?;
                let out = semistability_check(rep, &sigma, strategy).map_err(quiver_err)?;
                let mut entry = json!({"label": name, "dims": rep.dims, "theta": theta, "outcome": out.name()});
                let (wdims, wtheta) = match &out {
                    Outcome::Unstable { witness, theta } => {
                        entry["witness"] = submodule_json(f, witness);
                        entry["witness_theta"] = json!(theta);
                        (join(&witness.dims().flat()), theta.to_string())
                    }
                    Outcome::Semistable { destabilizers } => {
                        entry["destabilizers"] =
                            Value::Array(destabilizers.iter().map(|d| submodule_json(f, d)).collect());
                        (String::new(), String::new())
                    }
                    Outcome::NoDestabilizerFound { trials } => {
                        entry["trials"] = json!(trials);
                        entry["exhaustive"] = json!(false);
                        (String::new(), String::new())
                    }
                    Outcome::Stable => (String::new(), String::new()),
                };
                r.row(vec![name.clone(), out.name().to_string(), wdims, wtheta]);
                results.push(entry);
            }
            r.json = json!({"command": "quiver check", "field": reps.first().map(|x| x.1.field.name()), "sigma": sigma, "strategy": strategy, "results": results});
            Ok(r)
        }
        QuiverCmd::Hn { label, descending } => {
            let mut results = Vec::new();
            let mut all_ok = true;
            let mut r = Report::new(Value::Null, &["label", "step", "dims", "factor_slope"]);
            for (name, rep) in pick(&reps, label.as_deref())? {
                let steps = if *descending {
                    hn_filtration_descending(rep, &sigma, strategy)
                } else {
                    hn_filtration(rep, &sigma, strategy)
                }
                .map_err(quiver_err)?;
                let ok = steps.windows(2).all(|w| w[0].slope > w[1].slope);
                all_ok &= ok;
                for (k, s) in steps.iter().enumerate() {
                    r.row(vec![name.clone(), (k + 1).to_string(), join(&s.sub.dims().flat()), s.slope.to_string()]);
                }
                let steps_json: Vec<Value> = steps
                    .iter()
                    .map(|s| json!({"sub": submodule_json(&rep.field, &s.sub), "factor_slope": s.slope}))
                    .collect();
                results.push(json!({"label": name, "steps": steps_json, "slopes_decreasing": ok}));
            }
            r.json = json!({"command": "quiver hn", "sigma": sigma, "strategy": strategy, "descending": descending, "results": results, "verification": verification(all_ok)});
            if all_ok {
                Ok(r)
            } else {
                Err(Failure::failed("factor slopes are not strictly decreasing", r))
            }
        }
        QuiverCmd::Jh { label } => {
            let mut results = Vec::new();
            let mut r = Report::new(Value::Null, &["label", "step", "dims", "factor_dims"]);
            for (name, rep) in pick(&reps, label.as_deref())? {
                let jh = jh_filtration(rep, &sigma, cap).map_err(quiver_err)?;
                for (k, (s, q)) in jh.subs.iter().zip(&jh.factors).enumerate() {
                    r.row(vec![name.clone(), (k + 1).to_string(), join(&s.dims().flat()), join(&q.dims.flat())]);
                }
                let subs: Vec<Value> = jh.subs.iter().map(|s| submodule_json(&rep.field, s)).collect();
                let factors: Vec<Value> = jh.factors.iter().map(|q| json!(q.dims)).collect();
                results.push(json!({"label": name, "subs": subs, "factor_dims": factors}));
            }
            r.json = json!({"command": "quiver jh", "sigma": sigma, "results": results});
            Ok(r)
        }
        QuiverCmd::Sequiv { a, b } => {
            let find = |l: Option<&String>, default: usize| -> Result<&(String, Representation<F>), Failure> {
                match l {
                    Some(l) => reps
                        .iter()
                        .find(|(n, _)| n == l)
                        .ok_or_else(|| Failure::input(format!("unknown representation {l:?}"))),
                    None => reps
                        .get(default)
                        .ok_or_else(|| Failure::input("need two representations")),
                }
            };
            let (na, ra) = find(a.as_ref(), 0)?;
            let (nb, rb) = find(b.as_ref(), 1)?;
            let res = s_equivalent(ra, rb, &sigma, cap, ctx.seed()).map_err(quiver_err)?;
            let mut r = Report::new(
                json!({"command": "quiver sequiv", "a": na, "b": nb, "sigma": sigma, "result": res}),
                &["a", "b", "equivalent", "heuristic"],
            );
            r.row(vec![na.clone(), nb.clone(), res.equivalent.to_string(), res.heuristic.to_string()]);
            Ok(r)
        }
    }
}

fn split_reps(
    reps: Vec<(String, AnyRep)>,
) -> (
    Vec<(String, Representation<stabkit::field::GaloisField>)>,
    Vec<(String, Representation<stabkit::field::ExactField>)>,
) {
    let mut finite = Vec::new();
    let mut exact = Vec::new();
    for (l, r) in reps {
        match r {
            AnyRep::Finite(x) => finite.push((l, x)),
            AnyRep::Exact(x) => exact.push((l, x)),
        }
    }
    (finite, exact)
}

pub fn quiver(ctx: &Context, cmd: QuiverCmd) -> Result<Report, Failure> {
    let sc = ctx.scenario()?;
    let (finite, exact) = split_reps(sc.representations().map_err(scenario_err)?);
    if !finite.is_empty() {
        quiver_run(ctx, sc, &cmd, finite)
    } else if !exact.is_empty() {
        quiver_run(ctx, sc, &cmd, exact)
    } else {
        Err(Failure::input("scenario has no representations"))
    }
}

fn need<'a, T>(x: &'a Option<T>, what: &str) -> Result<&'a T, Failure> {
    x.as_ref().ok_or_else(|| Failure::input(format!("cone section needs {what}")))
}

fn cone_setup(sc: &Scenario) -> Result<(IntersectionTensor, ConeParams), Failure> {
    let params = sc.cone.clone().unwrap_or_default();
    let t = sc.tensor(params.tensor.as_deref()).map_err(scenario_err)?;
    Ok((t, params))
}

fn chern_json(c: &ChernData) -> Value {
    serde_json::to_value(c).unwrap_or(Value::Null)
}

pub fn cone(ctx: &Context, cmd: ConeCmd) -> Result<Report, Failure> {
    let sc = ctx.scenario()?;
    let (t, p) = cone_setup(sc)?;
    match cmd {
        ConeCmd::Hodge => {
            let l = need(&p.l, "l")?;
            let (pos, neg, zero) = cone::signature(&t.q_form_matrix(l).map_err(cone_err)?);
            let expected = (1, t.rho() - 1, 0);
            let ok = (pos, neg, zero) == expected;
            let mut r = Report::new(
                json!({"command": "cone hodge", "l": l, "signature": [pos, neg, zero], "expected": [expected.0, expected.1, expected.2], "verification": verification(ok)}),
                &["l", "positive", "negative", "zero", "holds"],
            );
            r.row(vec![join(l), pos.to_string(), neg.to_string(), zero.to_string(), ok.to_string()]);
            if ok {
                Ok(r)
            } else {
                Err(Failure::failed("signature differs from (1, ρ−1, 0)", r))
            }
        }
        ConeCmd::Kplus => {
            let l = need(&p.l, "l")?;
            let mut out = json!({"command": "cone kplus", "l": l});
            let mut r = Report::new(Value::Null, &["query", "class", "result"]);
            if let Some(beta) = &p.beta {
                let inside = cone::kplus_contains(&t, l, beta).map_err(cone_err)?;
                out["beta"] = json!(beta);
                out["beta_in_kplus"] = json!(inside);
                out["beta_square"] = json!(t.q_pair(l, beta, beta).map_err(cone_err)?);
                out["beta_degree"] = json!(t.q_pair(l, beta, l).map_err(cone_err)?);
                r.row(vec!["beta_in_kplus".into(), join(beta), inside.to_string()]);
            }
            if let Some(gamma) = &p.gamma {
                let w = cone::cplus_witness(&t, gamma, l).map_err(cone_err)?;
                let recheck = match &w {
                    Some(b) => t.lefschetz_image(l, b).map_err(cone_err)? == *gamma,
                    None => true,
                };
                out["gamma"] = json!(gamma);
                out["gamma_witness"] = json!(w);
                out["verification"] = json!(verification(recheck));
                r.row(vec!["gamma_in_cplus".into(), join(gamma), w.is_some().to_string()]);
            }
            if p.beta.is_none() && p.gamma.is_none() {
                return Err(Failure::input("cone kplus needs beta or gamma"));
            }
            r.json = out;
            Ok(r)
        }
        ConeCmd::Bogomolov => {
            let l = need(&p.l, "l")?;
            let c = need(&p.chern, "chern")?;
            let beta_const = p.beta_const.clone().unwrap_or_else(Scalar::zero);
            let delta = cone::discriminant_pair(c, &t, l).map_err(cone_err)?;
            let delta_std = cone::discriminant_std(c, &t, l).map_err(cone_err)?;
            let unstable = cone::bogomolov_unstable(c, &t, l, &beta_const).map_err(cone_err)?;
            let mut r = Report::new(
                json!({"command": "cone bogomolov", "l": l, "chern": chern_json(c), "beta_const": beta_const, "discriminant": delta, "discriminant_std": delta_std, "unstable": unstable}),
                &["discriminant", "discriminant_std", "unstable"],
            );
            r.row(vec![delta.to_string(), delta_std.to_string(), unstable.to_string()]);
            Ok(r)
        }
        ConeCmd::Identity => {
            let l = need(&p.l, "l")?;
            let a = need(&p.chern_a, "chern_a")?;
            let b = need(&p.chern_b, "chern_b")?;
            let rep = cone::extension_discriminant_identity(a, b, &t, l).map_err(cone_err)?;
            let mut r = Report::new(
                json!({"command": "cone identity", "l": l, "normalization": "2r·c2 − (r−1)·c1²", "report": rep, "verification": verification(rep.equal)}),
                &["lhs", "rhs", "equal"],
            );
            r.row(vec![rep.lhs.to_string(), rep.rhs.to_string(), rep.equal.to_string()]);
            if rep.equal {
                Ok(r)
            } else {
                Err(Failure::failed("identity does not hold", r))
            }
        }
        ConeCmd::Path => {
            let g0 = need(&p.gamma0, "gamma0")?;
            let ginf = need(&p.gamma_inf, "gamma_inf")?;
            let l1 = need(&p.l1, "l1")?;
            let l2 = need(&p.l2, "l2")?;
            let samples = p.t_samples.unwrap_or(101);
            let res = p.s_resolution.unwrap_or(12);
            let cert = cone::cplus_path_certificate(&t, g0, ginf, l1, l2, samples, res).map_err(cone_err)?;
            let nondeg = cone::crossterm_nondegenerate(g0, ginf, l1, l2);
            let mut r = Report::new(
                json!({"command": "cone path", "crossterm_nondegenerate": nondeg, "certificate": cert, "verification": verification(cert.complete)}),
                &["u", "s", "beta"],
            );
            for pt in &cert.points {
                r.row(vec![
                    pt.u.to_string(),
                    pt.s.as_ref().map(|s| s.to_string()).unwrap_or_default(),
                    pt.beta.as_ref().map(|b| join(b)).unwrap_or_default(),
                ]);
            }
            if cert.complete {
                Ok(r)
            } else {
                Err(Failure::failed("no certificate found at some path points", r))
            }
        }
    }
}

fn scalar_arg(name: &str, s: &str) -> Result<Scalar, Failure> {
    s.parse().map_err(|e| Failure::input(format!("--{name}: {e}")))
}

pub fn approx(ctx: &Context, cmd: ApproxCmd) -> Result<Report, Failure> {
    match cmd {
        ApproxCmd::Split { tau, theta, lambda } => {
            let tau = scalar_arg("tau", &tau)?;
            let theta = scalar_arg("theta", &theta)?;
            let split = match lambda {
                Some(l) => kahler::split_pair_with(&tau, &theta, &scalar_arg("lambda", &l)?),
                None => kahler::split_pair(&tau, &theta),
            }
            .map_err(kahler_err)?;
            let ok = kahler::verify_split(&tau, &theta, &split);
            let mut r = Report::new(
                json!({
                    "command": "approx split",
                    "tau": tau,
                    "theta": theta,
                    "lambda": split.lambda,
                    "sigma": split.sigma,
                    "sigma_prime": split.sigma_prime,
                    "checks": {
                        "sigma + sigma'·lambda = tau": verification(&split.sigma + &split.sigma_prime * &split.lambda == tau),
                        "sigma + sigma'·lambda² = theta": verification(&split.sigma + &split.sigma_prime * &split.lambda * &split.lambda == theta),
                        "positivity": verification(split.sigma.is_positive() && split.sigma_prime.is_positive()),
                    },
                    "verification": verification(ok),
                }),
                &["tau", "theta", "lambda", "sigma", "sigma_prime", "verification"],
            );
            r.row(vec![
                tau.to_string(),
                theta.to_string(),
                split.lambda.to_string(),
                split.sigma.to_string(),
                split.sigma_prime.to_string(),
                verification(ok).into(),
            ]);
            if ok {
                Ok(r)
            } else {
                Err(Failure::failed("split does not verify", r))
            }
        }
        ApproxCmd::Omega => {
            let sc = ctx.scenario()?;
            let p = sc
                .omega
                .as_ref()
                .ok_or_else(|| Failure::input("scenario has no omega section"))?;
            let t = sc.tensor(p.tensor.as_deref()).map_err(scenario_err)?;
            let d = kahler::decompose_omega(&t, &p.omega, &p.candidates).map_err(kahler_err)?;
            let mut out = json!({
                "command": "approx omega",
                "omega": p.omega,
                "j0": d.j0(),
                "decomposition": d,
                "rank_certificate": {"rank": d.rank, "target": d.rank_target, "maximal": d.rank_maximal()},
                "verification": verification(d.linear_identity && d.square_identity),
            });
            if let Some(pairing) = &p.pairing {
                let poly = kahler::hilbert_poly_omega(&t, pairing, &p.omega).map_err(kahler_err)?;
                out["hilbert_poly_omega"] = json!(poly.coeffs());
            }
            let mut r = Report::new(out, &["class", "weight"]);
            for (c, w) in d.classes.iter().zip(&d.weights) {
                r.row(vec![join(c), w.to_string()]);
            }
            Ok(r)
        }
    }
}

fn scan_run<F: Field>(
    ctx: &Context,
    sc: &Scenario,
    reps: Vec<(String, Representation<F>)>,
    steps: Option<usize>,
) -> Result<Report, Failure> {
    let p = sc
        .vgit
        .as_ref()
        .ok_or_else(|| Failure::input("scenario has no vgit section"))?;
    let chosen: Vec<Sample<F>> = reps
        .into_iter()
        .filter(|(l, _)| p.samples.as_ref().map_or(true, |s| s.contains(l)))
        .map(|(label, rep)| Sample { label, rep })
        .collect();
    let path = Segment {
        start: p.start.clone(),
        end: p.end.clone(),
        steps: steps.or(p.steps).unwrap_or(16),
    };
    let strategy = ctx.strategy(sc);
    let trace = vgit::sigma_scan(&chosen, &path, strategy).map_err(vgit_err)?;
    let dims = chosen[0].rep.dims.clone();
    let characters = vgit::character_path(&path, &dims).map_err(vgit_err)?;
    let mut out = json!({
        "command": "vgit scan",
        "strategy": strategy,
        "trace": trace,
        "characters": characters,
        "balanced": characters.iter().all(|c| c.balanced),
    });
    if let Some(cands) = &p.candidates {
        match vgit::candidate_walls(&dims, cands) {
            Ok(walls) => {
                let crossings: Vec<Value> = walls
                    .iter()
                    .map(|w| json!({"normal": w.normal, "s": vgit::wall_crossing(&path, w)}))
                    .collect();
                let res = vgit::resolution();
                let near_wall = trace.flips.iter().all(|f| {
                    walls.iter().filter_map(|w| vgit::wall_crossing(&path, w)).any(|s| {
                        s >= &f.s_minus - &res && s <= &f.s_plus + &res
                    })
                });
                out["walls"] = json!(walls);
                out["crossings"] = json!(crossings);
                out["flips_on_walls"] = json!(near_wall);
            }
            Err(e) => out["walls_note"] = json!(e.to_string()),
        }
    }
    if let Some(g) = &p.grid {
        let cells = vgit::sigma_grid(&chosen, &g.vertices, g.divisions, strategy).map_err(vgit_err)?;
        out["grid"] = json!(cells);
    }
    let mut r = Report::new(out, &["from", "to", "semistable", "verified"]);
    for e in &trace.events {
        r.row(vec![e.from.to_string(), e.to.to_string(), e.semistable.join(" "), e.verified.to_string()]);
    }
    Ok(r)
}

pub fn vgit_scan(ctx: &Context, steps: Option<usize>) -> Result<Report, Failure> {
    let sc = ctx.scenario()?;
    let (finite, exact) = split_reps(sc.representations().map_err(scenario_err)?);
    if !finite.is_empty() {
        scan_run(ctx, sc, finite, steps)
    } else if !exact.is_empty() {
        scan_run(ctx, sc, exact, steps)
    } else {
        Err(Failure::input("scenario has no representations"))
    }
}
