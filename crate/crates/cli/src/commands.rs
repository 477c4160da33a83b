use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use lpsieve::bounds::BoundReport;
use lpsieve::inverse_op::{
    fold_tau, inverse_norm, reciprocal_coeffs, spectral_radius_inverse, verify_interpolation,
};
use lpsieve::kernels::{cos_p_norm, uhat_n_extremal, KernelForm};
use lpsieve::trigpoly::random_poly;
use lpsieve::verifier::{
    compare_bounds, extremal_search, random_campaign, verify_instance, CampaignConfig, DegreeRange,
    NodeStrategy, ReplayInstance, SearchConfig, StrategyKind,
};
use lpsieve::{Kernel, NodeSet, QuadratureConfig, Separation, TrigPoly};

use crate::error::{CliError, EXIT_MATH};
use crate::output::{emit, num, opt_num, read_json, write_json, Format, Report, Table};
use crate::{BoundArgs, CampaignArgs, Cli, Cmd, CompareArgs, KernelArgs, SearchArgs, VerifyArgs};

pub fn dispatch(cli: &Cli) -> Result<u8, CliError> {
    let quad = match cli.tol {
        Some(t) => QuadratureConfig::with_tol(t),
        None => QuadratureConfig::default(),
    };
    quad.validate()?;
    let ctx = Ctx {
        quad,
        seed: cli.seed,
        format: cli.format,
    };
    let (report, code) = match &cli.command {
        Cmd::Bound(a) => (bound(&ctx, a)?, 0),
        Cmd::Verify(a) => verify(&ctx, a)?,
        Cmd::Kernel(a) => kernel(&ctx, a)?,
        Cmd::Search(a) => (search(&ctx, a)?, 0),
        Cmd::Compare(a) => (compare(&ctx, a)?, 0),
        Cmd::Campaign(a) => campaign(&ctx, a)?,
    };
    emit(&report.render(ctx.format)?, cli.out.as_deref())?;
    Ok(code)
}

struct Ctx {
    quad: QuadratureConfig,
    seed: u64,
    format: Format,
}

impl Ctx {
    fn report(&self) -> Report {
        let mut r = Report::default();
        r.meta("seed", self.seed);
        r
    }
}

fn parse_delta(text: &str) -> Result<Separation, CliError> {
    let d: Separation = text.parse()?;
    if d.pi_rational().is_none() {
        eprintln!("note: delta {text} is not a pi literal; sigma uses the tolerance test");
    }
    Ok(d)
}

fn parse_list<T>(text: &str, what: &str, f: impl Fn(&str) -> Result<T, CliError>) -> Result<Vec<T>, CliError> {
    let items: Vec<T> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(f)
        .collect::<Result<_, _>>()?;
    if items.is_empty() {
        return Err(CliError::input(format!("{what} list is empty")));
    }
    Ok(items)
}

fn parse_f64(s: &str) -> Result<f64, CliError> {
    s.parse()
        .map_err(|_| CliError::input(format!("'{s}' is not a number")))
}

/// `1,2,3`, `1:6`, `1:3:0.5`, or any comma mix of values and ranges.
pub fn parse_pgrid(text: &str) -> Result<Vec<f64>, CliError> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [v] => out.push(parse_f64(v)?),
            [lo, hi] | [lo, hi, _] => {
                let (lo, hi) = (parse_f64(lo)?, parse_f64(hi)?);
                let step = match parts.get(2) {
                    Some(s) => parse_f64(s)?,
                    None => 1.0,
                };
                if !(step > 0.0) {
                    return Err(CliError::input(format!("range step must be positive in '{item}'")));
                }
                let count = ((hi - lo) / step + 1e-9).floor();
                if count >= 0.0 {
                    out.extend((0..=count as usize).map(|i| lo + i as f64 * step));
                }
            }
            _ => return Err(CliError::input(format!("malformed p-grid item '{item}'"))),
        }
    }
    if out.is_empty() {
        return Err(CliError::input("p-grid is empty"));
    }
    Ok(out)
}

fn bound(ctx: &Ctx, a: &BoundArgs) -> Result<Report, CliError> {
    let delta = parse_delta(&a.delta)?;
    let b = BoundReport::compute(a.n, &delta, a.p)?;
    let mut r = ctx.report();
    r.meta("N", a.n);
    r.meta("p", a.p);
    r.meta("delta", &b.delta_label);
    r.meta("sigma_branch", b.sigma_info.branch_label());
    let exact = b.integer_form_exact.map(|c| c.to_string()).unwrap_or_default();
    match ctx.format {
        Format::Plain => {
            let mut t = Table::new(None, &["quantity", "value", "note"]);
            let sources = b.sources();
            let note = |k: &str| {
                sources
                    .iter()
                    .find(|(name, _)| *name == k)
                    .map(|(_, s)| s.to_string())
                    .unwrap_or_default()
            };
            t.push(vec!["sigma".into(), b.sigma.to_string(), format!("pi/(N delta) = {}, {}", b.sigma_info.ratio, note("sigma"))]);
            t.push(vec!["sharp".into(), num(b.sharp), note("sharp")]);
            if let Some(c) = b.integer_form {
                t.push(vec!["integer_form".into(), num(c), format!("{exact}, {}", note("integer_form"))]);
            }
            t.push(vec!["relaxed".into(), num(b.relaxed), note("relaxed")]);
            if let Some(e) = b.l2_classical {
                t.push(vec!["l2_classical".into(), num(e), note("l2_classical")]);
            }
            t.push(vec!["majorant".into(), num(b.majorant), note("majorant")]);
            t.push(vec!["majorant_improved".into(), num(b.majorant_improved), note("majorant_improved")]);
            t.push(vec!["smallest".into(), b.smallest().into(), String::new()]);
            r.tables.push(t);
        }
        _ => {
            let mut t = Table::new(
                None,
                &[
                    "N", "p", "delta", "delta_label", "sigma", "sigma_branch", "sharp", "integer_form", "integer_form_exact", "relaxed",
                    "l2_classical", "majorant", "majorant_improved", "smallest",
                ],
            );
            t.push(vec![
                b.n.to_string(),
                num(b.p),
                num(b.delta),
                b.delta_label.clone(),
                b.sigma.to_string(),
                b.sigma_info.branch_label().into(),
                num(b.sharp),
                opt_num(b.integer_form),
                exact.clone(),
                num(b.relaxed),
                opt_num(b.l2_classical),
                num(b.majorant),
                num(b.majorant_improved),
                b.smallest().into(),
            ]);
            r.tables.push(t);
        }
    }
    let mut j = serde_json::to_value(&b).map_err(CliError::input)?;
    j["delta_label"] = json!(b.delta_label);
    j["sigma_branch"] = json!(b.sigma_info.branch_label());
    j["integer_form_exact"] = json!(b.integer_form_exact.map(|c| c.to_string()));
    j["smallest"] = json!(b.smallest());
    j["seed"] = json!(ctx.seed);
    r.json = j;
    Ok(r)
}

fn load_nodes(ctx: &Ctx, a: &VerifyArgs) -> Result<(NodeSet, Option<NodeStrategy>), CliError> {
    if let Some(path) = &a.nodes {
        return Ok((read_json(path)?, None));
    }
    let strategy: NodeStrategy = match (&a.equispaced, &a.strategy) {
        (Some(r), _) => NodeStrategy::Equispaced { r: *r },
        (None, Some(s)) => s.parse()?,
        (None, None) => {
            return Err(CliError::input("give nodes with --nodes, --equispaced or --strategy"))
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    Ok((strategy.nodes(&mut rng)?, Some(strategy)))
}

fn verify(ctx: &Ctx, a: &VerifyArgs) -> Result<(Report, u8), CliError> {
    let inst = if let Some(path) = &a.replay {
        let mut inst: ReplayInstance = read_json(path)?;
        if let Some(p) = a.p {
            inst.p = p;
        }
        inst
    } else {
        let p = a.p.ok_or_else(|| CliError::input("missing -p"))?;
        let poly: TrigPoly = match (&a.poly, a.random) {
            (Some(path), _) => read_json(path)?,
            (None, true) => {
                let n = a.n.ok_or_else(|| CliError::input("--random needs -N"))?;
                random_poly(n, ctx.seed, 1.0)?
            }
            (None, false) => return Err(CliError::input("give a polynomial with --poly, --random or --replay")),
        };
        let (nodes, strategy) = load_nodes(ctx, a)?;
        ReplayInstance {
            trial: 0,
            seed: ctx.seed,
            p,
            strategy,
            poly,
            nodes,
            ratio: None,
        }
    };
    let res = verify_instance(&inst.poly, &inst.nodes, inst.p, &ctx.quad)?;
    if let Some(path) = &a.instance_out {
        let mut out = inst.clone();
        out.ratio = Some(res.ratio);
        write_json(&out, path)?;
    }
    let mut r = ctx.report();
    r.meta("instance_seed", inst.seed);
    if let Some(s) = &inst.strategy {
        r.meta("strategy", s);
    }
    let mut t = Table::new(
        None,
        &["N", "p", "delta", "r", "ratio", "bound", "margin", "tightness", "pass"],
    );
    t.push(vec![
        res.meta.n.to_string(),
        num(res.meta.p),
        num(res.meta.delta),
        res.meta.r.to_string(),
        num(res.ratio),
        num(res.bound),
        num(res.margin),
        num(res.tightness()),
        res.pass.to_string(),
    ]);
    r.tables.push(t);
    r.json = json!({
        "seed": ctx.seed,
        "instance_seed": inst.seed,
        "result": res,
        "tightness": res.tightness(),
    });
    if !res.pass {
        eprintln!(
            "error: sieve inequality violated: ratio {} exceeds bound {}",
            res.ratio, res.bound
        );
        return Ok((r, EXIT_MATH));
    }
    Ok((r, 0))
}

fn kernel(ctx: &Ctx, a: &KernelArgs) -> Result<(Report, u8), CliError> {
    let u = Kernel::extremal(a.n, a.p)?;
    if let Some(path) = &a.kernel_out {
        write_json(&u, path)?;
    }
    let mut r = ctx.report();
    r.meta("N", a.n);
    r.meta("p", a.p);
    let theta = match u.form() {
        KernelForm::Closed { theta } => *theta,
        KernelForm::Tabulated { .. } => f64::NAN,
    };
    let closed = uhat_n_extremal(a.n, a.p)?;
    let quad = u.fourier_coeff(a.n as f64, &ctx.quad)?;
    let mut summary = Table::new(Some("kernel"), &["quantity", "value"]);
    summary.push(vec!["q".into(), num(u.q())]);
    summary.push(vec!["theta".into(), num(theta)]);
    summary.push(vec!["half_width".into(), num(u.half_width())]);
    summary.push(vec!["cos_p_norm".into(), num(cos_p_norm(a.p)?)]);
    summary.push(vec!["uhat_N_closed".into(), num(closed)]);
    summary.push(vec!["uhat_N_quadrature".into(), num(quad)]);
    let mut j = json!({
        "seed": ctx.seed,
        "kernel": u,
        "uhat_N_closed": closed,
        "uhat_N_quadrature": quad,
    });

    if !a.diagnose {
        r.tables.push(summary);
        r.json = j;
        return Ok((r, 0));
    }

    let series = reciprocal_coeffs(&u, a.series_tol, &ctx.quad).map_err(|e| CliError::stage("reciprocal_coeffs", e))?;
    let mu = fold_tau(&series).map_err(|e| CliError::stage("fold_tau", e))?;
    if let Some(path) = &a.measure_out {
        write_json(&mu, path)?;
    }
    let report = verify_interpolation(&mu, &u, a.interp_tol, &ctx.quad)
        .map_err(|e| CliError::stage("verify_interpolation", e))?;
    let norm = inverse_norm(&mu, &u, &ctx.quad);

    let mut atoms = Table::new(Some("atoms"), &["m", "location", "tau"]);
    for (m, x, t) in mu.atoms() {
        atoms.push(vec![m.to_string(), num(x), num(t)]);
    }
    let mut interp = Table::new(Some("interpolation"), &["n", "p_u", "uhat", "product", "deviation"]);
    for row in &report.rows {
        interp.push(vec![
            row.n.to_string(),
            num(row.p_u),
            num(row.uhat),
            num(row.product),
            num(row.deviation),
        ]);
    }
    let tv = mu.total_variation();
    let expected = 1.0 / quad;
    let sr = spectral_radius_inverse(&mu);
    let mut ident = Table::new(Some("norm identity"), &["quantity", "value"]);
    ident.push(vec!["total_variation".into(), num(tv)]);
    ident.push(vec!["inverse_uhat_N".into(), num(expected)]);
    ident.push(vec!["relative_gap".into(), num(((tv - expected) / expected).abs())]);
    ident.push(vec!["spectral_radius".into(), num(sr)]);
    ident.push(vec!["truncation_K".into(), series.truncation().to_string()]);
    ident.push(vec!["tail_estimate".into(), num(series.tail_estimate())]);
    ident.push(vec!["signs_alternate".into(), mu.sign_alternates().to_string()]);
    ident.push(vec!["max_deviation".into(), num(report.max_deviation)]);
    ident.push(vec!["interpolation_pass".into(), report.pass.to_string()]);
    ident.push(vec!["norm_identity_pass".into(), norm.is_ok().to_string()]);

    r.tables.extend([summary, atoms, interp, ident]);
    j["measure"] = serde_json::to_value(&mu).map_err(CliError::input)?;
    j["interpolation"] = serde_json::to_value(&report).map_err(CliError::input)?;
    j["norm_identity"] = json!({
        "total_variation": tv,
        "inverse_uhat_N": expected,
        "spectral_radius": sr,
        "truncation_K": series.truncation(),
        "tail_estimate": series.tail_estimate(),
        "pass": norm.is_ok(),
    });
    r.json = j;

    if !report.pass {
        eprintln!(
            "error: stage verify_interpolation failed: deviation {:e} at n = {} exceeds {:e}",
            report.max_deviation, report.worst_n, a.interp_tol
        );
        return Ok((r, EXIT_MATH));
    }
    if let Err(e) = norm {
        eprintln!("error: stage inverse_norm failed: {e}");
        return Ok((r, EXIT_MATH));
    }
    Ok((r, 0))
}

fn search(ctx: &Ctx, a: &SearchArgs) -> Result<Report, CliError> {
    let strategy = match &a.strategy {
        Some(s) => s.parse()?,
        None => NodeStrategy::Equispaced { r: 2 * a.n.max(1) as usize },
    };
    let cfg = SearchConfig {
        iterations: a.trials,
        restarts: a.restarts,
        initial_step: a.step,
        step_decay: a.decay,
        quadrature: ctx.quad,
        ..SearchConfig::new(a.n, a.p, strategy, ctx.seed)
    };
    let out = extremal_search(&cfg)?;
    if let Some(path) = &a.trace_out {
        let mut t = Table::new(None, &["restart", "iteration", "tightness"]);
        for row in &out.trace {
            t.push(vec![row.restart.to_string(), row.iteration.to_string(), num(row.tightness)]);
        }
        let plot = Report {
            tables: vec![t],
            ..Report::default()
        };
        emit(&plot.render(Format::Csv)?, Some(path))?;
    }
    if let Some(path) = &a.best_out {
        let inst = ReplayInstance {
            trial: out.best_restart,
            seed: ctx.seed,
            p: a.p,
            strategy: Some(strategy),
            poly: out.poly.clone(),
            nodes: out.nodes.clone(),
            ratio: Some(out.best.ratio),
        };
        write_json(&inst, path)?;
    }
    let mut r = ctx.report();
    r.meta("N", a.n);
    r.meta("p", a.p);
    r.meta("strategy", strategy);
    r.meta("best_ratio", num(out.best.ratio));
    r.meta("bound", num(out.best.bound));
    r.meta("tightness", num(out.tightness));
    r.meta("best_restart", out.best_restart);
    if let Some(t) = out.random_start_tightness {
        r.meta("random_start_tightness", num(t));
    }
    match ctx.format {
        Format::Plain => {
            let mut t = Table::new(None, &["ratio", "bound", "margin", "tightness", "restart"]);
            t.push(vec![
                num(out.best.ratio),
                num(out.best.bound),
                num(out.best.margin),
                num(out.tightness),
                out.best_restart.to_string(),
            ]);
            r.tables.push(t);
        }
        _ => {
            let mut t = Table::new(None, &["restart", "iteration", "step", "ratio", "tightness"]);
            for row in &out.trace {
                t.push(vec![
                    row.restart.to_string(),
                    row.iteration.to_string(),
                    num(row.step),
                    num(row.ratio),
                    num(row.tightness),
                ]);
            }
            r.tables.push(t);
        }
    }
    r.json = json!({ "seed": ctx.seed, "search": out });
    Ok(r)
}

fn compare(ctx: &Ctx, a: &CompareArgs) -> Result<Report, CliError> {
    let ps = parse_pgrid(&a.pgrid)?;
    let ns = parse_list(&a.n, "degree", |s| {
        s.parse::<u32>()
            .map_err(|_| CliError::input(format!("'{s}' is not a degree")))
    })?;
    let ds = parse_list(&a.delta, "delta", parse_delta)?;
    let mut grid: Vec<(u32, Separation, f64)> = Vec::new();
    for &n in &ns {
        for &d in &ds {
            grid.extend(ps.iter().map(|&p| (n, d, p)));
        }
    }
    let rows = compare_bounds(&grid)?;

    if let Some(path) = &a.plot_out {
        if ns.len() != 1 || ds.len() != 1 {
            return Err(CliError::input("--plot-out needs a single N and a single delta"));
        }
        let mut t = Table::new(None, &["p", "bound", "value"]);
        for row in &rows {
            let b = &row.report;
            let p = num(b.p);
            let mut named = vec![("sharp", Some(b.sharp)), ("relaxed", Some(b.relaxed)), ("l2_classical", b.l2_classical)];
            named.extend([("majorant", Some(b.majorant)), ("majorant_improved", Some(b.majorant_improved))]);
            for (name, v) in named {
                if let Some(v) = v {
                    t.push(vec![p.clone(), name.into(), num(v)]);
                }
            }
        }
        let plot = Report {
            tables: vec![t],
            ..Report::default()
        };
        emit(&plot.render(Format::Csv)?, Some(path))?;
    }

    let mut r = ctx.report();
    r.meta("cells", rows.len());
    let mut t = Table::new(
        None,
        &["N", "p", "delta", "sigma", "sharp", "integer_form", "relaxed", "l2_classical", "majorant", "majorant_improved", "smallest"],
    );
    for row in &rows {
        let b = &row.report;
        t.push(vec![
            b.n.to_string(),
            num(b.p),
            b.delta_label.clone(),
            b.sigma.to_string(),
            num(b.sharp),
            opt_num(b.integer_form),
            num(b.relaxed),
            opt_num(b.l2_classical),
            num(b.majorant),
            num(b.majorant_improved),
            row.smallest.into(),
        ]);
    }
    r.tables.push(t);
    r.json = json!({ "seed": ctx.seed, "rows": rows });
    Ok(r)
}

fn campaign(ctx: &Ctx, a: &CampaignArgs) -> Result<(Report, u8), CliError> {
    let strategies = parse_list(&a.strategies, "strategy", |s| Ok(s.parse::<StrategyKind>()?))?;
    let cfg = CampaignConfig {
        trials: a.trials,
        degrees: if a.fixed_degree {
            DegreeRange::Fixed(a.n)
        } else {
            DegreeRange::UpTo(a.n)
        },
        exponents: parse_pgrid(&a.pgrid)?,
        strategies,
        seed: ctx.seed,
        quadrature: ctx.quad,
    };
    let s = random_campaign(&cfg)?;
    if let Some(path) = &a.replay_out {
        write_json(&s.argmax, path)?;
    }
    let mut r = ctx.report();
    r.meta("trials", s.trials);
    r.meta("failures", s.failures);
    r.meta("max_ratio", num(s.max_ratio));
    r.meta("max_tightness", num(s.max_tightness));
    r.meta("min_margin", num(s.min_margin));
    r.meta("min_rel_margin", num(s.min_rel_margin));
    r.meta("argmax_trial", s.argmax.trial);
    match ctx.format {
        Format::Plain => {
            let mut t = Table::new(None, &["trials", "failures", "max_ratio", "max_tightness", "min_rel_margin"]);
            t.push(vec![
                s.trials.to_string(),
                s.failures.to_string(),
                num(s.max_ratio),
                num(s.max_tightness),
                num(s.min_rel_margin),
            ]);
            r.tables.push(t);
        }
        _ => {
            let mut t = Table::new(
                None,
                &[
                    "trial", "seed", "N", "p", "strategy", "r", "delta", "sigma", "ratio", "bound", "margin", "tightness",
                    "pass",
                ],
            );
            for row in &s.rows {
                t.push(vec![
                    row.trial.to_string(),
                    row.seed.to_string(),
                    row.n.to_string(),
                    num(row.p),
                    row.strategy.clone(),
                    row.r.to_string(),
                    num(row.delta),
                    row.sigma.to_string(),
                    num(row.ratio),
                    num(row.bound),
                    num(row.margin),
                    num(row.tightness),
                    row.pass.to_string(),
                ]);
            }
            r.tables.push(t);
        }
    }
    r.json = json!({ "seed": ctx.seed, "summary": s });
    if s.failures > 0 {
        eprintln!("error: {} of {} trials violate the sieve inequality", s.failures, s.trials);
        return Ok((r, EXIT_MATH));
    }
    Ok((r, 0))
}
