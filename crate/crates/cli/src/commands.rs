//! One function per subcommand. Each returns the text report and a JSON
//! object holding the same fields.

use std::fmt;

use lpde::canonical::{canonical_derivatives, canonical_form, equivalence_report, Equivalence};
use lpde::equation::{classify as classify_stratum, Lpde, COEFF_NAMES};
use lpde::expr::{pretty, EqOracle, Expr, Mat2, Vec2};
use lpde::frame::Frame;
use lpde::invariants::{case_e_invariants, InvariantContext};
use lpde::reduction::{assemble_reduction_data, check_reduction_candidate, reduction_report, Variant};
use lpde::selftest::{run_all, Suite};
use lpde::transform::{tau, Transformation};
use lpde::Error;
use serde_json::{json, Map, Value};

/// A finished report and the exit status to leave with.
pub struct Output {
    pub text: String,
    pub json: Value,
    pub status: u8,
}

#[derive(Debug)]
pub enum CliError {
    /// Unreadable file or bad arguments.
    Usage(String),
    Lib(Error),
}

impl CliError {
    /// 2 for a mathematical condition on valid input, 1 otherwise.
    pub fn status(&self) -> u8 {
        match self {
            CliError::Lib(e) if e.is_domain() => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        CliError::Lib(e)
    }
}

type Outcome = Result<Output, CliError>;

fn expr(e: &Expr) -> String {
    pretty(e)
}

fn vector(v: &Vec2) -> String {
    format!("({}, {})", expr(&v[0]), expr(&v[1]))
}

fn matrix(m: &Mat2) -> String {
    format!("[[{}, {}], [{}, {}]]", expr(m.get(0, 0)), expr(m.get(0, 1)), expr(m.get(1, 0)), expr(m.get(1, 1)))
}

fn tuple(v: &Lpde) -> String {
    let parts: Vec<String> = v.components().iter().map(expr).collect();
    format!("({})", parts.join(", "))
}

/// Ordered `name = value` fields, rendered as text lines or a JSON object.
#[derive(Default)]
struct Report {
    fields: Vec<(String, Value)>,
}

impl Report {
    fn put(&mut self, key: impl Into<String>, value: impl Into<Value>) -> &mut Report {
        self.fields.push((key.into(), value.into()));
        self
    }

    /// A quantity that may be undefined for the input.
    fn maybe(&mut self, key: &str, value: Result<String, Error>) -> Result<&mut Report, CliError> {
        match value {
            Ok(s) => Ok(self.put(key, s)),
            Err(Error::Absent(a)) => Ok(self.put(key, format!("undefined ({a})"))),
            Err(e) => Err(e.into()),
        }
    }

    fn text(&self) -> String {
        self.fields.iter().map(|(k, v)| format!("{k} = {}\n", render(v))).collect()
    }

    fn json(&self) -> Value {
        Value::Object(self.fields.iter().cloned().collect::<Map<String, Value>>())
    }

    fn finish(&self, status: u8) -> Output {
        Output { text: self.text(), json: self.json(), status }
    }
}

fn render(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn classify(v: &Lpde, fr: &Frame, o: &EqOracle) -> Outcome {
    let s = classify_stratum(v, fr, o)?;
    let ctx = InvariantContext::new(v, fr, o)?;
    let stratum = s.tag.to_string();
    let d0 = expr(ctx.d0());
    let gamma0 = expr(ctx.gamma0());
    let text = format!("stratum: {stratum}; D0 = {d0}; gamma0 = {gamma0}\n");
    let flags = serde_json::to_value(s.flags).expect("flags serialize");
    let json = json!({ "stratum": stratum, "D0": d0, "gamma0": gamma0, "flags": flags });
    Ok(Output { text, json, status: 0 })
}

pub fn invariants(v: &Lpde, fr: &Frame, o: &EqOracle) -> Outcome {
    let ctx = InvariantContext::new(v, fr, o)?;
    let mut r = Report::default();
    r.put("stratum", ctx.stratum()?.tag.to_string()).put("D", expr(ctx.d()));
    let (a, b) = ctx.ab_inv();
    r.put("a_inv", expr(a)).put("b_inv", expr(b)).put("D0", expr(ctx.d0())).put("c_inv", expr(ctx.c_inv()));
    let parts = ctx.gamma_parts();
    r.maybe("c1", parts.clone().map(|p| expr(&p.0)))?;
    r.maybe("c2", parts.clone().map(|p| expr(&p.1)))?;
    r.maybe("gamma", parts.map(|p| expr(&p.2)))?;
    r.put("gamma0", expr(ctx.gamma0()));
    r.maybe("alpha_beta", ctx.alpha_beta().map(|v| vector(&v)))?;
    r.maybe("alpha0_beta0", ctx.alpha0_beta0().map(|v| vector(&v)))?;
    r.maybe("alpha1_beta1", ctx.alpha1_beta1().map(|v| vector(&v)))?;
    r.maybe("alpha2_beta2", ctx.alpha2_beta2().map(|v| vector(&v)))?;
    r.maybe("chi", ctx.chi().map(|e| expr(&e)))?;
    r.maybe("chi1", ctx.chi1().map(|e| expr(&e)))?;
    r.maybe("chi2", ctx.chi2().map(|e| expr(&e)))?;
    r.maybe("chi0", ctx.chi0().map(|e| expr(&e)))?;
    if v.is_mixed_only(o)? {
        let e = case_e_invariants(v, fr, o)?;
        r.put("f", expr(&e.f)).put("f1", expr(&e.f1));
    }
    Ok(r.finish(0))
}

pub fn transform(v: &Lpde, t: &Transformation, fr: &Frame, o: &EqOracle) -> Outcome {
    let result = tau(v, t, fr, o)?;
    let mut r = Report::default();
    for (name, c) in COEFF_NAMES.iter().zip(result.equation.components()) {
        r.put(*name, expr(&c));
    }
    r.put("frame", matrix(result.frame.matrix()));
    Ok(r.finish(0))
}

pub fn canonical(v: &Lpde, fr: &Frame, o: &EqOracle) -> Outcome {
    let data = canonical_form(v, fr, o)?;
    let constant = o.all_zero(&canonical_derivatives(&data)).map_err(Error::from)?;
    let mut r = Report::default();
    r.put("stratum", data.pmap.stratum.tag.to_string())
        .put("P0", expr(&data.pmap.p0))
        .put("P1", matrix(&data.pmap.p1))
        .put("tuple", tuple(&data.tuple));
    r.put("frame", matrix(data.frame.matrix()));
    r.put("constant_coefficients", constant);
    Ok(r.finish(0))
}

pub fn check_equivalence(u: &Lpde, fr_u: &Frame, v: &Lpde, fr_v: &Frame, o: &EqOracle) -> Outcome {
    let mut r = Report::default();
    match equivalence_report(u, fr_u, v, fr_v, o)? {
        Equivalence::Equivalent => {
            r.put("equivalent", true).put("frames_agree", true).put("tuples_agree", true);
        }
        Equivalence::NotEquivalent { frame, tuple } => {
            r.put("equivalent", false).put("frames_agree", frame).put("tuples_agree", tuple);
        }
        Equivalence::StratumMismatch(a, b) => {
            r.put("equivalent", false).put("stratum_mismatch", format!("{a} vs {b}"));
        }
    }
    Ok(r.finish(0))
}

fn verdict(r: &mut Report, reducible: bool) {
    r.put("verdict", if reducible { "reducible" } else { "not reducible" });
}

pub fn reduce_const(v: &Lpde, fr: &Frame, candidate: Option<&Transformation>, o: &EqOracle) -> Outcome {
    let data = assemble_reduction_data(v, fr, o)?;
    let mut r = Report::default();
    match (data.variant, candidate) {
        (Variant::Gamma0Nonzero, _) => {
            let rep = reduction_report(v, fr, o)?;
            r.put("variant", "gamma0 != 0")
                .put("N1", matrix(&rep.connection.n1))
                .put("N2", matrix(&rep.connection.n2))
                .put("connection_equations", rep.residual)
                .put("integrability", rep.integrable)
                .put("transport_1", rep.transport1)
                .put("transport_2", rep.transport2);
            verdict(&mut r, rep.reducible);
        }
        (Variant::Gamma0Zero, Some(t)) => {
            let holds = check_reduction_candidate(v, fr, t, o)?;
            r.put("variant", "gamma0 = 0").put("candidate_g", matrix(t.g())).put("candidate_satisfies_system", holds);
            r.put("verdict", if holds { "reducible" } else { "candidate rejected" });
        }
        (Variant::Gamma0Zero, None) => {
            return Err(Error::Precondition("gamma0 = 0: pass --candidate to check a transformation".into()).into());
        }
    }
    Ok(r.finish(0))
}

pub fn selftest(o: &EqOracle, seed: u64, samples: usize) -> Outcome {
    let laws = run_all(&Suite { oracle: o.clone(), seed, samples });
    let mut text = String::new();
    for law in &laws {
        let mark = if law.passed { "PASS" } else { "FAIL" };
        text.push_str(&format!("{mark} {} ({} instances)", law.name, law.instances));
        if let Some(d) = &law.detail {
            text.push_str(&format!(": {d}"));
        }
        text.push('\n');
    }
    let failed = laws.iter().filter(|l| !l.passed).count();
    text.push_str(&format!("{} laws, {failed} failed\n", laws.len()));
    let json = json!({ "laws": laws, "failed": failed });
    Ok(Output { text, json, status: if failed == 0 { 0 } else { 2 } })
}
