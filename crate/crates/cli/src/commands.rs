use rellich::changevar::{maps, validate_lemma1, validate_lemma_mark};
use rellich::constants::{beta_n_sq, beta_star, c_n, gammas, rellich_u, sobolev_constants, to_f64};
use rellich::discretizer::{assemble, min_quotient, Mesh1D};
use rellich::exactpoly::{checks_for, Status as CheckStatus};
use rellich::extremals::{
    bubble_quotient, corpus_check, i_integral, ibp_combination, optimality_sweep, resolve_s2n, BubbleParams,
    EpsDeltaParams, Inequality, S2nForm, SWEEP_EPS,
};
use rellich::harmonics::random_corpus;
use rellich::mellin::{certify_symbol, grad_symbol_at_zero, minimize_modes, ploi2_constant, rellich_symbol, SymbolPoint};
use rellich::{mode, Dimension, FormKind, Rational, Result, WeightedQuadrature};

use crate::report::{Record, Status, Table};

const A_GRAD: &str = "best constant of the gradient Rellich inequality";
const A_RELLICH: &str = "Rellich constant n^2(n-4)^2/16";
const A_SYMMETRY: &str = "symmetry breaking of the minimizing mode for n = 3, 4";
const A_PLOI: &str = "higher-mode bounds 441/100 (n = 3) and 8 (n = 4)";
const A_IDENT: &str = "logarithmic remainder identities";
const A_CHANGE: &str = "power and logarithmic changes of variables";
const A_SHARP: &str = "sharpness of the Rellich-Sobolev constant";
const A_OPT: &str = "optimality of the X^4 weight for n = 3";
const A_INST: &str = "instance positivity of the main inequalities";
const A_CONST: &str = "closed-form constants";

pub struct Output {
    pub records: Vec<Record>,
    pub table: Option<Table>,
}

fn records(records: Vec<Record>) -> Output {
    Output { records, table: None }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn exact(q: &Rational) -> String {
    q.to_string()
}

pub fn constants(ns: &[u32]) -> Result<Output> {
    let mut out = Vec::new();
    for &n in ns {
        let dim = Dimension::new(n)?;
        let k = if n <= 4 { 1 } else { 0 };
        let sym = grad_symbol_at_zero(n, k)?;
        let cn = c_n(dim);
        let sob = sobolev_constants(dim);
        let mut r = Record::new(format!("constants/n{n:02}"), A_CONST, Status::from_bool(sym == cn))
            .text("c_n", exact(&cn))
            .value("c_n_value", to_f64(&cn))
            .text("symbol_at_zero", exact(&sym))
            .value("s1n", sob.s1n);
        if n >= 5 {
            let g = gammas(dim);
            r = r
                .text("rellich_u", exact(&rellich_u(dim)))
                .text("beta_n_sq", exact(&beta_n_sq(dim)))
                .text("beta_star", exact(&beta_star(dim)))
                .text("gamma1", exact(&g[0]))
                .text("gamma2", exact(&g[1]))
                .text("gamma3", exact(&g[2]))
                .value("s2n_gamma4", sob.s2n_printed.unwrap_or(f64::NAN))
                .value("s2n_gamma4_over_n", sob.s2n_alternate.unwrap_or(f64::NAN));
        }
        out.push(r);
    }
    Ok(records(out))
}

pub fn identities(ns: &[u32]) -> Result<Output> {
    let reps = checks_for(ns)?;
    Ok(records(
        reps.into_iter()
            .map(|c| {
                let status = match c.status {
                    CheckStatus::Pass => Status::Pass,
                    CheckStatus::Fail => Status::Fail,
                    CheckStatus::Inconclusive => Status::Inconclusive,
                };
                let mut r = Record::new(format!("identities/n{:02}/{}", c.n, c.name), A_IDENT, status)
                    .int("residual_terms", c.residual_terms as i64)
                    .text("detail", c.detail.clone());
                if let Some(v) = &c.value {
                    r = r.text("value", v.to_string());
                }
                r
            })
            .collect(),
    ))
}

pub struct FemConfig {
    pub depth: f64,
    pub elements: usize,
}

pub fn best_constant(problem: &str, ns: &[u32], fem: &FemConfig, quad: &WeightedQuadrature) -> Result<Output> {
    let mesh = Mesh1D::log_uniform(fem.depth, fem.elements)?;
    let mut out = Vec::new();
    for &n in ns {
        let dim = Dimension::new(n)?;
        let (target, symbol, k, den, anchor) = if problem == "grad" {
            let mm = minimize_modes(n, 10, 10.0, 400)?;
            (to_f64(&c_n(dim)), mm.value, mm.k_star, FormKind::GradHardy, A_GRAD)
        } else {
            (to_f64(&rellich_u(dim)), rellich_symbol(n, 0.0)?, 0, FormKind::Hardy4, A_RELLICH)
        };
        let pair = assemble(&mode(n, i64::from(k))?, FormKind::Bilap, den, &mesh, quad)?;
        let fe = min_quotient(&pair)?.lambda_min;
        let (e_sym, e_fem) = (rel(symbol, target), rel(fe, target));
        let ok = e_sym < 1e-10 && e_fem < 1e-3;
        out.push(
            Record::new(format!("best-constant/{problem}/n{n:02}"), anchor, Status::from_bool(ok))
                .value("value", target)
                .value("symbol", symbol)
                .value("fem", fe)
                .int("k", i64::from(k))
                .value("symbol_rel_error", e_sym)
                .value("fem_rel_error", e_fem)
                .residual(e_fem, 1e-3),
        );
    }
    Ok(records(out))
}

pub fn symmetry_breaking(ns: &[u32], quad: &WeightedQuadrature) -> Result<Output> {
    let mut out = Vec::new();
    for &n in ns {
        let mm = minimize_modes(n, 10, 10.0, 400)?;
        let expected = if n <= 4 { 1 } else { 0 };
        let cert = certify_symbol(SymbolPoint::new(n, mm.k_star, 0.0), 40.0, quad)?;
        let ok = mm.k_star == expected && cert < 1e-2 && mm.truncation_certified;
        out.push(
            Record::new(format!("symmetry-breaking/n{n:02}"), A_SYMMETRY, Status::from_bool(ok))
                .int("k_star", i64::from(mm.k_star))
                .int("k_expected", i64::from(expected))
                .value("tau_star", mm.tau_star)
                .value("value", mm.value)
                .value("tail_bound", mm.tail_bound)
                .residual(cert, 1e-2),
        );
        if n == 3 || n == 4 {
            let min2 = mm.table.iter().filter(|r| r.k >= 2).map(|r| r.value).fold(f64::INFINITY, f64::min);
            let target = if n == 3 { 4.41 } else { 8.0 };
            let c = ploi2_constant(n, 10)?;
            let err = (min2 - target).abs();
            out.push(
                Record::new(format!("ploi2/n{n:02}"), A_PLOI, Status::from_bool(err < 1e-10 && c > 0.0))
                    .value("min_k_ge_2", min2)
                    .value("constant", c)
                    .residual(err, 1e-10),
            );
        }
    }
    Ok(records(out))
}

fn five_point(f: impl Fn(f64) -> f64, r: f64) -> f64 {
    let h = 1e-3 * r.min(1.0 - r);
    (f(r - 2.0 * h) - 8.0 * f(r - h) + 8.0 * f(r + h) - f(r + 2.0 * h)) / (12.0 * h)
}

pub fn changevar(n: u32, profiles: usize, seed: u64, quad: &WeightedQuadrature) -> Result<Output> {
    let beta = to_f64(&beta_star(Dimension::new(n)?));
    let m = maps(n, beta)?;
    let mut relation: f64 = 0.0;
    for i in 0..100 {
        relation = relation.max(m.relation_residual(10f64.powf(-12.0 * f64::from(i) / 99.0))?);
    }
    let mut stacks: f64 = 0.0;
    for i in 0..20 {
        let r = 10f64.powf(-6.0 + 6.0 * (f64::from(i) + 0.5) / 20.0) * 0.95;
        let (g, a) = (m.g_derivs(r)?, m.alpha_derivs(r)?);
        for j in 0..3 {
            let fd = five_point(|x| m.g_derivs(x).map_or(f64::NAN, |v| v[j]), r);
            stacks = stacks.max(rel(fd, g[j + 1]));
        }
        for j in 0..4 {
            let fd = five_point(|x| m.alpha_derivs(x).map_or(f64::NAN, |v| v[j]), r);
            stacks = stacks.max(rel(fd, a[j + 1]));
        }
    }
    let corpus = random_corpus(2, profiles, seed);
    let mut lemma1: f64 = 0.0;
    let mut mark: f64 = 0.0;
    for (i, y) in corpus.iter().enumerate() {
        lemma1 = lemma1.max(validate_lemma1(n, beta, y, quad)?.max_residual());
        mark = mark.max(validate_lemma_mark(&mode(n, (i % 3) as i64)?, y, quad)?.max_residual());
    }
    let rec = |name: &str, v: f64, tol: f64| {
        Record::new(format!("changevar/n{n:02}/{name}"), A_CHANGE, Status::from_bool(v < tol)).residual(v, tol)
    };
    Ok(records(vec![
        rec("relation", relation, 1e-12),
        rec("derivative_stacks", stacks, 1e-6),
        rec("power_substitution", lemma1, 1e-5).int("profiles", profiles as i64),
        rec("log_substitution", mark, 1e-5).int("profiles", profiles as i64),
    ]))
}

pub fn sharpness(n: u32, rho: f64, quad: &WeightedQuadrature) -> Result<Output> {
    let res = resolve_s2n(n, quad)?;
    let chosen = match res.chosen {
        Some(S2nForm::Printed) => "gamma4",
        Some(S2nForm::Alternate) => "gamma4_over_n",
        None => "none",
    };
    let gap = match res.chosen {
        Some(S2nForm::Printed) => res.printed_gap,
        _ => res.alternate_gap,
    };
    let mut out = vec![Record::new(format!("sharpness/n{n:02}/s2n_resolution"), A_SHARP, Status::from_bool(res.chosen.is_some()))
        .text("chosen", chosen)
        .value("sobolev_limit", res.value)
        .value("s2n_gamma4", res.printed)
        .value("s2n_gamma4_over_n", res.alternate)
        .residual(gap, 1e-2)];
    let s = res.constant().unwrap_or(res.value);
    let mut table = Table { header: vec!["lambda", "lower", "upper", "sobolev"], rows: Vec::new() };
    let mut widths = Vec::new();
    for lambda in [1e3, 2e3, 4e3, 8e3] {
        let b = bubble_quotient(&BubbleParams::new(n, lambda, rho)?, quad)?;
        table.rows.push(vec![lambda, b.lower, b.upper, b.sobolev]);
        widths.push(b.upper - b.lower);
        if lambda == 1e3 {
            let dev = (b.lower / s - 1.0).abs().max((b.upper / s - 1.0).abs());
            out.push(
                Record::new(format!("sharpness/n{n:02}/bubble_within_5pct"), A_SHARP, Status::from_bool(dev <= 0.05))
                    .value("lambda", lambda)
                    .value("rho", rho)
                    .value("lower", b.lower)
                    .value("upper", b.upper)
                    .value("s2n", s)
                    .residual(dev, 0.05),
            );
        }
    }
    let tight = widths.windows(2).all(|w| w[1] < w[0]) && table.rows.iter().all(|r| r[1] <= r[2]);
    out.push(Record::new(format!("sharpness/n{n:02}/bounds_tighten"), A_SHARP, Status::from_bool(tight)));
    Ok(Output { records: out, table: Some(table) })
}

pub fn optimality(mu: f64, quad: &WeightedQuadrature) -> Result<Output> {
    let rep = optimality_sweep(mu, quad)?;
    let mut table = Table { header: vec!["eps", "delta", "lhs", "rhs", "quotient"], rows: Vec::new() };
    for p in rep.points.iter().chain(&rep.limits) {
        table.rows.push(vec![p.eps, p.delta, p.lhs, p.rhs, p.quotient]);
    }
    let name = format!("optimality-x4/mu{mu}");
    let verdict = if mu < 4.0 {
        Record::new(format!("{name}/collapse"), A_OPT, Status::from_bool(rep.collapse >= 10.0)).residual(rep.collapse, 10.0)
    } else if mu == 4.0 {
        Record::new(format!("{name}/floor"), A_OPT, Status::from_bool(rep.floor > 0.0 && rep.floor.is_finite()))
    } else {
        Record::new(format!("{name}/no_collapse"), A_OPT, Status::from_bool(rep.collapse < 10.0))
    };
    let mut out = vec![verdict
        .value("collapse", rep.collapse)
        .value("collapse_above_threshold", rep.collapse_above_threshold)
        .value("finite_eps_collapse", rep.finite_collapse)
        .value("floor", rep.floor)];
    // I^{(1)}_{ε,0} − 1/(2ε), (2ε)²I^{(0)}_{ε,0} and 2εI^{(0)} − (1−2δ)I^{(1)} at δ = 0.1
    let mut band: f64 = 0.0;
    let mut ibp: f64 = 0.0;
    for &e in &SWEEP_EPS {
        band = band.max((i_integral(1, EpsDeltaParams::new(e, 0.0)?, quad) - 0.5 / e).abs());
        ibp = ibp.max(ibp_combination(0, EpsDeltaParams::new(e, 0.1)?, quad).abs());
    }
    let e = SWEEP_EPS[SWEEP_EPS.len() - 1];
    let ratio = i_integral(0, EpsDeltaParams::new(e, 0.0)?, quad) * (2.0 * e).powi(2);
    out.push(Record::new(format!("{name}/i1_asymptotics"), A_OPT, Status::from_bool(band < 1.0)).residual(band, 1.0));
    out.push(
        Record::new(format!("{name}/i0_asymptotics"), A_OPT, Status::from_bool((ratio - 1.0).abs() < 1e-2))
            .value("eps", e)
            .residual((ratio - 1.0).abs(), 1e-2),
    );
    out.push(Record::new(format!("{name}/ibp_bounded"), A_OPT, Status::from_bool(ibp < 5.0)).residual(ibp, 5.0));
    Ok(Output { records: out, table: Some(table) })
}

pub fn instances(which: &[Inequality], quad: &WeightedQuadrature) -> Result<Output> {
    let mut out = Vec::new();
    for &ineq in which {
        let rep = corpus_check(ineq, quad)?;
        let min = rep.min_relative();
        out.push(
            Record::new(format!("instances/{}", ineq.name()), A_INST, Status::from_bool(rep.nonnegative(1e-8)))
                .int("n", i64::from(rep.n))
                .int("profiles", rep.remainders.len() as i64)
                .value("constant", rep.constant)
                .value("min_relative_remainder", min)
                .residual(min, -1e-8),
        );
    }
    Ok(records(out))
}
