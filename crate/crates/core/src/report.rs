//! JSON and text renderings of classification and verification results.
//!
//! JSON objects are `serde_json` maps, which keep keys sorted, and floats
//! are written with 17 significant digits, so equal inputs and seeds give
//! byte-identical output. Nothing time-dependent goes into the JSON.

use std::fmt::Write as _;
use std::str::FromStr;

use serde_json::{json, Number, Value};

use crate::classifier::{ClassificationResult, ConditionVerdict, Justification};
use crate::detsys::VectorField;
use crate::expr::Expr;
use crate::input::Problem;
use crate::verifier::{FieldVerification, FlowCheck, FlowRun, FLOW_TOL, RESIDUAL_TOL};

/// A float as a JSON number with 17 significant digits; non-finite values
/// become `null`.
pub fn float(v: f64) -> Value {
    if !v.is_finite() {
        return Value::Null;
    }
    Number::from_str(&format!("{v:.16e}")).map(Value::Number).unwrap_or(Value::Null)
}

fn opt_float(v: Option<f64>) -> Value {
    v.map(float).unwrap_or(Value::Null)
}

fn opt_expr(e: &Option<Expr>) -> Value {
    e.as_ref().map(|e| Value::String(e.to_string())).unwrap_or(Value::Null)
}

fn input_json(p: &Problem) -> Value {
    let params: serde_json::Map<String, Value> =
        p.params.iter().map(|(k, v)| (k.clone(), Value::String(v.to_string()))).collect();
    json!({ "A": p.a_text, "F": p.f_text, "parameters": params })
}

fn field_json(v: &VectorField) -> Value {
    json!({ "field": v.to_string(), "xi": v.xi.to_string(), "phi": v.phi.to_string() })
}

fn verdict_word(v: ConditionVerdict) -> &'static str {
    match v {
        ConditionVerdict::Holds => "holds",
        ConditionVerdict::Violated => "violated",
        ConditionVerdict::Indeterminate => "indeterminate",
        ConditionVerdict::NotEvaluated => "not evaluated",
    }
}

pub fn classification_json(p: &Problem, r: &ClassificationResult, seed: u64) -> Value {
    let c = &r.canonical;
    let generators: Vec<Value> = r
        .generators
        .iter()
        .map(|g| {
            let mut v = field_json(&g.field);
            v["canonical"] = Value::String(g.canonical.to_string());
            v["residual"] = opt_float(g.residual);
            v["verified"] = g.verified().map(Value::Bool).unwrap_or(Value::Null);
            v
        })
        .collect();
    let conditions: Vec<Value> = r
        .conditions
        .iter()
        .map(|c| {
            json!({
                "name": c.name,
                "expression": c.expression,
                "verdict": c.verdict,
                "residual": opt_float(c.residual),
            })
        })
        .collect();
    json!({
        "input": input_json(p),
        "canonical": {
            "tag": c.tag,
            "F": c.expr.to_string(),
            "mu": opt_expr(&c.mu),
            "lambda": opt_expr(&c.lambda),
            "theta": opt_expr(&c.theta),
            "n": opt_expr(&c.n),
            "sign": c.sign,
            "witness": c.witness.to_json(),
        },
        "family": r.family.name(),
        "case": r.case_label,
        "dimension": r.dimension,
        "verdict": r.verdict,
        "justification": r.justification,
        "generators": generators,
        "conditions": conditions,
        "notes": r.notes,
        "seed": seed,
    })
}

pub fn classification_text(p: &Problem, r: &ClassificationResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "equation:   y'' = ({}) y' + {}", r.a, r.f);
    for (k, v) in &p.params {
        let _ = writeln!(s, "parameter:  {k} = {v}");
    }
    let _ = writeln!(s, "canonical:  F -> {}  via {}", r.canonical.expr, r.canonical.witness);
    let _ = writeln!(s, "A family:   {}", r.family.name());
    let _ = writeln!(s, "case:       {}", r.case_label);
    let _ = writeln!(s, "dimension:  {}", r.dimension);
    let _ = writeln!(s, "verdict:    {}", r.verdict);
    match &r.justification {
        Justification::Known(why) => {
            let _ = writeln!(s, "reason:     {why} (known result)");
        }
        Justification::Computed(why) => {
            let _ = writeln!(s, "reason:     {why}");
        }
    }
    if !r.generators.is_empty() {
        let _ = writeln!(s, "generators:");
        for g in &r.generators {
            let check = match (g.residual, g.verified()) {
                (Some(res), Some(true)) => format!("residual {res:.2e}  ok"),
                (Some(res), _) => format!("residual {res:.2e}  FAILED"),
                (None, _) => "not verified".into(),
            };
            let _ = writeln!(s, "  {:<32} {check}", g.field.to_string());
        }
    }
    if !r.conditions.is_empty() {
        let _ = writeln!(s, "conditions on A:");
        for c in &r.conditions {
            let res = c.residual.map(|v| format!(" (relative size {v:.2e})")).unwrap_or_default();
            let _ = writeln!(s, "  {}: {} = 0  {}{res}", c.name, c.expression, verdict_word(c.verdict));
        }
    }
    for n in &r.notes {
        let _ = writeln!(s, "note: {n}");
    }
    s
}

fn flow_json(run: &FlowRun) -> Value {
    let (x0, y0, p0) = run.initial;
    let (defect, detail) = match &run.outcome {
        Ok(FlowCheck::Defect(d)) => (float(*d), Value::Null),
        Ok(FlowCheck::Inconclusive(why)) => (Value::Null, Value::String(format!("inconclusive: {why}"))),
        Err(e) => (Value::Null, Value::String(e.to_string())),
    };
    json!({
        "initial": [float(x0), float(y0), float(p0)],
        "defect": defect,
        "detail": detail,
        "passed": run.passed(),
    })
}

pub fn verification_json(p: &Problem, v: &VectorField, check: &FieldVerification, seed: u64) -> Value {
    let (residual, error) = match &check.residual {
        Ok(r) => (float(*r), Value::Null),
        Err(e) => (Value::Null, Value::String(e.clone())),
    };
    json!({
        "input": input_json(p),
        "generator": field_json(v),
        "residual": residual,
        "residual_error": error,
        "residual_passed": check.residual_passed(),
        "flow": check.flow.iter().map(flow_json).collect::<Vec<_>>(),
        "passed": check.passed(),
        "seed": seed,
    })
}

pub fn verification_text(p: &Problem, v: &VectorField, check: &FieldVerification) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "equation:   y'' = ({}) y' + {}", p.a, p.f);
    let _ = writeln!(s, "field:      {v}");
    match &check.residual {
        Ok(r) => {
            let word = if check.residual_passed() { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "residual:   {r:.3e}  {word} (tolerance {RESIDUAL_TOL:.0e})");
        }
        Err(e) => {
            let _ = writeln!(s, "residual:   not computed: {e}  FAIL");
        }
    }
    for run in &check.flow {
        let (x0, y0, p0) = run.initial;
        let what = match &run.outcome {
            Ok(FlowCheck::Defect(d)) => {
                format!("defect {d:.3e}  {}", if run.passed() { "PASS" } else { "FAIL" })
            }
            Ok(FlowCheck::Inconclusive(why)) => format!("inconclusive: {why}"),
            Err(e) => format!("integration failed: {e}  FAIL"),
        };
        let _ = writeln!(s, "flow from ({x0}, {y0}, {p0}):  {what} (tolerance {FLOW_TOL:.0e})");
    }
    let _ = writeln!(s, "overall:    {}", if check.passed() { "PASS" } else { "FAIL" });
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::{classify, ClassifyOptions};
    use crate::detsys::GridSpec;
    use crate::input::ParamDecl;
    use crate::verifier::verify_field;

    fn problem(a: &str, f: &str, params: &[&str]) -> Problem {
        let decls: Vec<ParamDecl> = params.iter().map(|p| p.parse().unwrap()).collect();
        Problem::new(a, f, &decls).unwrap()
    }

    #[test]
    fn floats_keep_seventeen_digits() {
        assert_eq!(float(0.1).to_string(), "1.0000000000000001e-1");
        assert_eq!(float(f64::NAN), Value::Null);
        assert_eq!(float(0.0).to_string(), "0.0000000000000000e+0");
    }

    #[test]
    fn classification_report() {
        let p = problem("M/x", "mu*exp(y)", &["M=3", "mu=1"]);
        let r = classify(&p.a, &p.f, &p.assumptions, &ClassifyOptions::default()).unwrap();
        let j = classification_json(&p, &r, GridSpec::DEFAULT_SEED);
        assert_eq!(j["dimension"], json!({"kind": "exact", "value": 1}));
        assert_eq!(j["verdict"], "DEFINITE");
        assert_eq!(j["generators"][0]["field"], "x*dx - 2*dy");
        assert_eq!(j["generators"][0]["verified"], true);
        assert_eq!(j["input"]["parameters"]["M"], "3");
        let text = serde_json::to_string(&j).unwrap();
        assert_eq!(serde_json::from_str::<Value>(&text).unwrap(), j);
        let t = classification_text(&p, &r);
        assert!(t.contains("x*dx - 2*dy") && t.contains("DEFINITE"), "{t}");
    }

    #[test]
    fn verification_report() {
        let p = problem("0", "y^2", &[]);
        let v = VectorField::parse("0", "1").unwrap();
        let c = verify_field(&p.a, &p.f, &v, &GridSpec::default(), false);
        let j = verification_json(&p, &v, &c, 1);
        assert_eq!(j["passed"], false);
        assert!(verification_text(&p, &v, &c).contains("FAIL"));
    }
}
