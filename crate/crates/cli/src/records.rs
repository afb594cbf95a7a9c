//! JSON records, one builder per subcommand. Reals are decimal strings and
//! every record carries `precision_bits`.

use qpz_core::acceptance::{run_suite, CriterionOutcome, Suite};
use qpz_core::exact::ExactValue;
use qpz_core::numeric::{decimal_string, Complex, Real};
use qpz_core::periods::{period_relation_residuals, PeriodConfig, Poly};
use qpz_core::qforms::{algebraic_identity_part, enumerate_ac_negative, validate_family};
use qpz_core::theorems::{theorem1_identity_report, theorem2_report, theorem3_dedekind, HypothesisSource};
use qpz_core::zetafun::{zeta_family_direct, zeta_family_euler};
use qpz_core::Result;
use serde_json::{json, Value};

use crate::config::RunConfig;

pub fn exact_json(v: &ExactValue) -> Value {
    json!({
        "q": v.q().to_string(),
        "pi_power": v.pi_power(),
        "sqrt_D": v.d_sqrt().to_string(),
        "text": v.to_string(),
    })
}

fn decimal(x: &Real) -> String {
    if x.is_zero() {
        "0".into()
    } else {
        decimal_string(x)
    }
}

fn dec(x: &Real) -> Value {
    Value::String(decimal(x))
}

fn complex_json(z: &Complex) -> Value {
    json!({"re": decimal(&z.re), "im": decimal(&z.im)})
}

fn poly_json(p: &Poly) -> Value {
    Value::Array(p.coeffs.iter().map(complex_json).collect())
}

fn tol(x: f64) -> Value {
    Value::String(format!("{x:e}"))
}

pub fn dedekind(k: i64, n: i64, d: i64, assume: bool, cfg: &RunConfig) -> Result<Value> {
    let r = theorem3_dedekind(k, n, d, assume, cfg.precision_bits)?;
    let assumptions: Vec<Value> = r
        .assumptions
        .iter()
        .map(|a| {
            json!({
                "two_k": a.two_k,
                "level": a.level,
                "source": match a.source {
                    HypothesisSource::Table => "table",
                    HypothesisSource::Override => "override",
                },
            })
        })
        .collect();
    let terms: Vec<Value> = r
        .terms
        .iter()
        .map(|t| json!({"d": t.d, "sigma_sum": t.sigma_sum.to_string(), "weight": t.weight.to_string()}))
        .collect();
    Ok(json!({
        "command": "dedekind",
        "params": {"k": k, "N": n, "D": d},
        "precision_bits": cfg.precision_bits,
        "exact": exact_json(&r.exact),
        "numeric": dec(&r.numeric),
        "oracle": dec(&r.oracle),
        "abs_gap": dec(&r.abs_gap),
        "assumptions": assumptions,
        "divisor_terms": terms,
    }))
}

pub fn zeta_diff(k: i64, n: i64, d: i64, rho: i64, cfg: &RunConfig) -> Result<Value> {
    let r = theorem2_report(k, n, d, rho, cfg.c_max, cfg.precision_bits)?;
    Ok(json!({
        "command": "zeta-diff",
        "params": {"k": k, "N": n, "D": d, "rho": rho, "c_max": cfg.c_max},
        "precision_bits": cfg.precision_bits,
        "exact": exact_json(&r.exact),
        "exact_numeric": dec(&r.exact_numeric),
        "direct_rho": dec(&r.direct_rho),
        "direct_neg_rho": dec(&r.direct_neg_rho),
        "direct_difference": dec(&r.direct_difference),
        "tail_estimate": dec(&r.tail_estimate),
        "abs_gap": dec(&r.abs_gap),
    }))
}

pub fn period_config(cfg: &RunConfig) -> PeriodConfig {
    PeriodConfig {
        a_bound_initial: cfg.b_bound_initial,
        series_tol: cfg.series_tol,
        quad_tol: cfg.quadrature_tol,
        prec: cfg.precision_bits,
    }
}

pub fn period(k: i64, n: i64, d: i64, rho: i64, cfg: &RunConfig) -> Result<Value> {
    let r = theorem1_identity_report(k, n, d, rho, &period_config(cfg))?;
    let res = period_relation_residuals(&r.plus_vector(), n, 2 * k as u32)?;
    Ok(json!({
        "command": "period",
        "params": {"k": k, "N": n, "D": d, "rho": rho},
        "tuning": {
            "b_bound_initial": cfg.b_bound_initial,
            "quadrature_tol": tol(cfg.quadrature_tol),
            "series_tol": tol(cfg.series_tol),
        },
        "precision_bits": cfg.precision_bits,
        "algebraic": r.algebraic.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "zeta_rho": dec(&r.zeta_rho),
        "zeta_neg_rho": dec(&r.zeta_neg_rho),
        "closed": poly_json(&r.closed),
        "expected": poly_json(&r.expected),
        "numeric": poly_json(&r.numeric),
        "max_gap": dec(&r.max_gap),
        "coefficient_relation_gap": dec(&r.coefficient_relation_gap()),
        "res_S": dec(&res.res_s),
        "res_U": dec(&res.res_u),
    }))
}

pub fn forms(k: i64, n: i64, d: i64, rho: i64) -> Result<Value> {
    let fam = validate_family(k, n, d, rho, true)?;
    let list = enumerate_ac_negative(&fam)?;
    let alg = algebraic_identity_part(&fam)?;
    Ok(json!({
        "command": "forms",
        "params": {"k": k, "N": n, "D": d, "rho": rho},
        "count": list.len(),
        "forms": list
            .iter()
            .map(|q| json!([q.a.to_string(), q.b.to_string(), q.c.to_string()]))
            .collect::<Vec<_>>(),
        "algebraic": alg.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
    }))
}

pub fn zeta(k: i64, n: i64, d: i64, rho: i64, cfg: &RunConfig) -> Result<Value> {
    let fam = validate_family(k, n, d, rho, true)?;
    let r = zeta_family_direct(&fam, k as u32, cfg.c_max, cfg.precision_bits)?;
    let euler = zeta_family_euler(&fam, k as u32, cfg.precision_bits)?;
    Ok(json!({
        "command": "zeta",
        "params": {"k": k, "N": n, "D": d, "rho": rho, "c_max": cfg.c_max},
        "precision_bits": cfg.precision_bits,
        "direct": dec(&r.value),
        "tail_estimate": dec(&r.tail_estimate),
        "max_recent_count": r.max_recent_count,
        "euler": dec(&euler),
    }))
}

fn outcome_json(o: &CriterionOutcome) -> Value {
    json!({
        "id": o.id,
        "title": o.title,
        "passed": o.passed,
        "detail": o.detail,
        "seconds": format!("{:.3}", o.seconds),
    })
}

/// The record and whether every criterion passed.
pub fn verify(suite: Suite) -> (Value, Vec<CriterionOutcome>) {
    let outcomes = run_suite(suite);
    let passed = outcomes.iter().all(|o| o.passed);
    let record = json!({
        "command": "verify",
        "suite": match suite {
            Suite::Fast => "fast",
            Suite::Full => "full",
        },
        "passed": passed,
        "criteria": outcomes.iter().map(outcome_json).collect::<Vec<_>>(),
    });
    (record, outcomes)
}

/// Indented `key: value` rendering of a record.
pub fn to_text(v: &Value) -> String {
    let mut out = String::new();
    render(v, 0, &mut out);
    out
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn render(v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                match val {
                    Value::Object(_) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render(val, depth + 1, out);
                    }
                    Value::Array(items) if items.iter().any(|x| x.is_object() || x.is_array()) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        for (i, item) in items.iter().enumerate() {
                            if item.is_object() {
                                out.push_str(&format!("{pad}  [{i}]\n"));
                                render(item, depth + 2, out);
                            } else {
                                render(item, depth + 1, out);
                            }
                        }
                    }
                    Value::Array(items) => {
                        let parts: Vec<String> = items.iter().map(scalar).collect();
                        out.push_str(&format!("{pad}{k}: [{}]\n", parts.join(", ")));
                    }
                    _ => out.push_str(&format!("{pad}{k}: {}\n", scalar(val))),
                }
            }
        }
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(scalar).collect();
            out.push_str(&format!("{pad}[{}]\n", parts.join(", ")));
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other))),
    }
}
