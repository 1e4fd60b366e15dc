//! Result records and their CSV/JSON wire formats.
//!
//! Every front-end computation emits either an exponent curve (a list of
//! rate/exponent rows) or a simulation record. Numbers are stored in nats
//! internally; the bits variants convert by `ln 2` on emission and back
//! on ingestion. Serialization is deterministic: equal inputs produce
//! byte-identical output, with no timestamps in the payload.

use crate::{Error, Result};
use serde_json::{json, Map, Value};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Shortest decimal form that parses back to exactly the same f64.
pub fn format_float(x: f64) -> String {
    format!("{x}")
}

/// Methods whose exponents are nonnegative by construction; the signed
/// ones (expurgated family, Gaussian tangent line, guessing moments) may
/// legitimately cross zero.
const NONNEGATIVE_METHODS: [&str; 5] = [
    "random-coding",
    "sphere-packing",
    "sphere-packing-csiszar",
    "fixed-composition",
    "exponential-list",
];

const SIGNED_METHODS: [&str; 6] = [
    "expurgated-gallager",
    "expurgated-ckm",
    "gaussian-ckm",
    "guessing-lower",
    "guessing-conjectured",
    "simulated",
];

pub fn method_is_known(method: &str) -> bool {
    NONNEGATIVE_METHODS.contains(&method) || SIGNED_METHODS.contains(&method)
}

pub fn method_is_signed(method: &str) -> bool {
    SIGNED_METHODS.contains(&method)
}

/// One row of an exponent curve. `l_or_lambda` carries the list size for
/// fixed-list methods, the list exponent for exponential-list rows, and
/// the moment order for guessing rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub rate_nats: f64,
    pub exponent_nats: f64,
    pub method: String,
    pub l_or_lambda: f64,
    pub q_mode: String,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentCurve {
    points: Vec<CurvePoint>,
}

impl ExponentCurve {
    /// Validates rows: known method, finite values, strictly increasing
    /// (rate, L_or_lambda) pairs, and nonnegative exponents for the
    /// methods that promise it. The lexicographic order admits both rate
    /// sweeps at fixed L and moment-order sweeps at fixed rate.
    pub fn new(points: Vec<CurvePoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Format("curve has no rows".into()));
        }
        let mut prev = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for (i, p) in points.iter().enumerate() {
            if !method_is_known(&p.method) {
                return Err(Error::Format(format!("row {i}: unknown method {}", p.method)));
            }
            if !p.rate_nats.is_finite() || !p.exponent_nats.is_finite() {
                return Err(Error::Format(format!("row {i}: non-finite value")));
            }
            if !p.l_or_lambda.is_finite() {
                return Err(Error::Format(format!("row {i}: non-finite L_or_lambda")));
            }
            let key = (p.rate_nats, p.l_or_lambda);
            if key <= prev {
                return Err(Error::Format(format!(
                    "row {i}: rows must be strictly increasing in (rate, L_or_lambda)"
                )));
            }
            prev = key;
            if !method_is_signed(&p.method) && p.exponent_nats < -1e-12 {
                return Err(Error::Format(format!(
                    "row {i}: negative exponent for method {}",
                    p.method
                )));
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }

    pub fn to_csv(&self, bits: bool) -> String {
        let scale = if bits { std::f64::consts::LN_2 } else { 1.0 };
        let mut out = String::from(if bits {
            "rate_bits,exponent_bits,method,L_or_lambda,q_mode,converged\n"
        } else {
            "rate_nats,exponent_nats,method,L_or_lambda,q_mode,converged\n"
        });
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                format_float(p.rate_nats / scale),
                format_float(p.exponent_nats / scale),
                p.method,
                format_float(p.l_or_lambda),
                p.q_mode,
                p.converged
            ));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Format("empty csv".into()))?;
        let scale = match header.trim() {
            "rate_nats,exponent_nats,method,L_or_lambda,q_mode,converged" => 1.0,
            "rate_bits,exponent_bits,method,L_or_lambda,q_mode,converged" => {
                std::f64::consts::LN_2
            }
            other => return Err(Error::Format(format!("unrecognized csv header: {other}"))),
        };
        let mut points = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 6 {
                return Err(Error::Format(format!("line {}: expected 6 columns", i + 2)));
            }
            let num = |s: &str, what: &str| -> Result<f64> {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Format(format!("line {}: bad {what}: {s}", i + 2)))
            };
            points.push(CurvePoint {
                rate_nats: num(cols[0], "rate")? * scale,
                exponent_nats: num(cols[1], "exponent")? * scale,
                method: cols[2].trim().to_string(),
                l_or_lambda: num(cols[3], "L_or_lambda")?,
                q_mode: cols[4].trim().to_string(),
                converged: match cols[5].trim() {
                    "true" => true,
                    "false" => false,
                    other => {
                        return Err(Error::Format(format!(
                            "line {}: bad converged flag: {other}",
                            i + 2
                        )))
                    }
                },
            });
        }
        Self::new(points)
    }
}

/// A curve plus the request that produced it, as written to disk.
#[derive(Debug, Clone)]
pub struct CurveDocument {
    pub version: String,
    pub bits: bool,
    pub config: Value,
    pub curve: ExponentCurve,
}

impl CurveDocument {
    pub fn new(config: Value, curve: ExponentCurve, bits: bool) -> Self {
        Self {
            version: TOOL_VERSION.to_string(),
            bits,
            config,
            curve,
        }
    }

    pub fn to_json_string(&self) -> String {
        let scale = if self.bits { std::f64::consts::LN_2 } else { 1.0 };
        let (rate_key, exp_key) = if self.bits {
            ("rate_bits", "exponent_bits")
        } else {
            ("rate_nats", "exponent_nats")
        };
        let points: Vec<Value> = self
            .curve
            .points()
            .iter()
            .map(|p| {
                let mut m = Map::new();
                m.insert(rate_key.into(), json!(p.rate_nats / scale));
                m.insert(exp_key.into(), json!(p.exponent_nats / scale));
                m.insert("method".into(), json!(p.method));
                m.insert("L_or_lambda".into(), json!(p.l_or_lambda));
                m.insert("q_mode".into(), json!(p.q_mode));
                m.insert("converged".into(), json!(p.converged));
                Value::Object(m)
            })
            .collect();
        let doc = json!({
            "kind": "curve",
            "version": self.version,
            "units": if self.bits { "bits" } else { "nats" },
            "config": self.config,
            "points": points,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("static structure");
        s.push('\n');
        s
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)?;
        let kind = v
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Format("missing kind".into()))?;
        if kind != "curve" {
            return Err(Error::Format(format!("expected kind curve, got {kind}")));
        }
        let version = v
            .get("version")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Format("missing version".into()))?
            .to_string();
        let bits = match v.get("units").and_then(Value::as_str) {
            Some("nats") => false,
            Some("bits") => true,
            _ => return Err(Error::Format("units must be nats or bits".into())),
        };
        let scale = if bits { std::f64::consts::LN_2 } else { 1.0 };
        let config = v
            .get("config")
            .cloned()
            .ok_or_else(|| Error::Format("missing config".into()))?;
        let raw = v
            .get("points")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Format("missing points array".into()))?;
        let (rate_key, exp_key) = if bits {
            ("rate_bits", "exponent_bits")
        } else {
            ("rate_nats", "exponent_nats")
        };
        let mut points = Vec::with_capacity(raw.len());
        for (i, p) in raw.iter().enumerate() {
            let f = |key: &str| -> Result<f64> {
                p.get(key)
                    .and_then(Value::as_f64)
                    .ok_or_else(|| Error::Format(format!("point {i}: missing {key}")))
            };
            let s = |key: &str| -> Result<String> {
                p.get(key)
                    .and_then(Value::as_str)
                    .map(str::to_string)
                    .ok_or_else(|| Error::Format(format!("point {i}: missing {key}")))
            };
            points.push(CurvePoint {
                rate_nats: f(rate_key)? * scale,
                exponent_nats: f(exp_key)? * scale,
                method: s("method")?,
                l_or_lambda: f("L_or_lambda")?,
                q_mode: s("q_mode")?,
                converged: p
                    .get("converged")
                    .and_then(Value::as_bool)
                    .ok_or_else(|| Error::Format(format!("point {i}: missing converged")))?,
            });
        }
        Ok(Self {
            version,
            bits,
            config,
            curve: ExponentCurve::new(points)?,
        })
    }
}

/// Structural validation for any record the tool emits; returns the kind.
pub fn check_document(text: &str) -> Result<String> {
    let v: Value = serde_json::from_str(text)?;
    match v.get("kind").and_then(Value::as_str) {
        Some("curve") => {
            CurveDocument::from_json_str(text)?;
            Ok("curve".into())
        }
        Some("simulation") => {
            for key in ["version", "config", "result"] {
                if v.get(key).is_none() {
                    return Err(Error::Format(format!("simulation record missing {key}")));
                }
            }
            let result = v.get("result").unwrap();
            if !result.is_object() {
                return Err(Error::Format("result must be an object".into()));
            }
            if result.get("trials").and_then(Value::as_u64).is_none() {
                return Err(Error::Format("result.trials must be an integer".into()));
            }
            Ok("simulation".into())
        }
        Some("oracle") => {
            for key in ["version", "config", "result"] {
                if v.get(key).is_none() {
                    return Err(Error::Format(format!("oracle record missing {key}")));
                }
            }
            let exact = v
                .get("result")
                .and_then(|r| r.get("exact_error"))
                .and_then(Value::as_f64)
                .ok_or_else(|| Error::Format("result.exact_error must be a number".into()))?;
            if !(0.0..=1.0).contains(&exact) {
                return Err(Error::Format(format!(
                    "exact_error {exact} outside [0, 1]"
                )));
            }
            Ok("oracle".into())
        }
        Some(other) => Err(Error::Format(format!("unknown record kind {other}"))),
        None => Err(Error::Format("missing kind".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_curve() -> ExponentCurve {
        ExponentCurve::new(vec![
            CurvePoint {
                rate_nats: 0.05,
                exponent_nats: 0.17314355131420697,
                method: "random-coding".into(),
                l_or_lambda: 1.0,
                q_mode: "uniform".into(),
                converged: true,
            },
            CurvePoint {
                rate_nats: 0.2,
                exponent_nats: 0.04029236546921454,
                method: "random-coding".into(),
                l_or_lambda: 1.0,
                q_mode: "uniform".into(),
                converged: true,
            },
        ])
        .unwrap()
    }

    #[test]
    fn csv_header_contract() {
        let csv = sample_curve().to_csv(false);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "rate_nats,exponent_nats,method,L_or_lambda,q_mode,converged"
        );
        assert_eq!(lines.count(), 2);
        let bits = sample_curve().to_csv(true);
        assert!(bits.starts_with("rate_bits,exponent_bits,"));
    }

    #[test]
    fn csv_round_trip_is_exact_in_nats() {
        let curve = sample_curve();
        let back = ExponentCurve::from_csv(&curve.to_csv(false)).unwrap();
        assert_eq!(curve, back);
    }

    #[test]
    fn csv_bits_round_trip_within_rounding() {
        let curve = sample_curve();
        let back = ExponentCurve::from_csv(&curve.to_csv(true)).unwrap();
        for (a, b) in curve.points().iter().zip(back.points()) {
            assert!((a.rate_nats - b.rate_nats).abs() < 1e-15 * (1.0 + a.rate_nats.abs()));
            assert!(
                (a.exponent_nats - b.exponent_nats).abs()
                    < 1e-15 * (1.0 + a.exponent_nats.abs())
            );
        }
    }

    #[test]
    fn validation_rejects_bad_rows() {
        let p = |rate: f64, exp: f64, method: &str| CurvePoint {
            rate_nats: rate,
            exponent_nats: exp,
            method: method.into(),
            l_or_lambda: 1.0,
            q_mode: "uniform".into(),
            converged: true,
        };
        assert!(ExponentCurve::new(vec![]).is_err());
        assert!(ExponentCurve::new(vec![p( 0.2, 0.1, "random-coding"), p(0.1, 0.2, "random-coding")]).is_err());
        assert!(ExponentCurve::new(vec![p(0.1, -0.5, "sphere-packing")]).is_err());
        assert!(ExponentCurve::new(vec![p(0.1, -0.5, "guessing-lower")]).is_ok());
        assert!(ExponentCurve::new(vec![p(0.1, 0.5, "made-up")]).is_err());
        assert!(ExponentCurve::new(vec![p(0.1, f64::INFINITY, "sphere-packing")]).is_err());
    }

    #[test]
    fn json_round_trip_and_determinism() {
        let doc = CurveDocument::new(json!({"channel": "bsc", "p": 0.1}), sample_curve(), false);
        let text = doc.to_json_string();
        assert_eq!(text, doc.to_json_string(), "emission must be deterministic");
        let back = CurveDocument::from_json_str(&text).unwrap();
        assert_eq!(doc.curve, back.curve);
        assert!(!text.contains("time"), "no timestamps in the payload");
        assert_eq!(check_document(&text).unwrap(), "curve");
    }

    #[test]
    fn json_bits_units_switch_keys() {
        let doc = CurveDocument::new(json!({}), sample_curve(), true);
        let text = doc.to_json_string();
        assert!(text.contains("rate_bits"));
        assert!(!text.contains("rate_nats"));
        let back = CurveDocument::from_json_str(&text).unwrap();
        for (a, b) in sample_curve().points().iter().zip(back.curve.points()) {
            assert!((a.exponent_nats - b.exponent_nats).abs() < 1e-15);
        }
    }

    #[test]
    fn check_document_dispatches_and_rejects() {
        assert!(check_document("{}").is_err());
        assert!(check_document(r#"{"kind": "mystery"}"#).is_err());
        let sim = json!({
            "kind": "simulation",
            "version": "0.0.0",
            "config": {"n": 6},
            "result": {"trials": 100},
        });
        assert_eq!(check_document(&sim.to_string()).unwrap(), "simulation");
        let bad = json!({"kind": "simulation", "version": "0", "config": {}});
        assert!(check_document(&bad.to_string()).is_err());
    }
}
