//! JSON and CSV documents.
//!
//! Rationals are written as `"p/q"` strings. Mixed strategies travel as
//! sparse lists of `[vertex, "p/q"]` pairs; every top-level document carries a
//! `schema` tag so consumers can detect format changes.

use serde::{Deserialize, Serializer};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::game::MixedStrategy;
use crate::ratio::{self, Ratio};
use crate::zerosum::ZeroSumSolution;

pub const STRATEGY_SCHEMA: &str = "safe-diffusion/strategy/v1";
pub const SOLUTION_SCHEMA: &str = "safe-diffusion/solution/v1";

/// How rationals are rendered in output documents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NumberFormat {
    #[default]
    Fraction,
    Decimal,
}

impl NumberFormat {
    pub fn value(self, r: &Ratio) -> Value {
        match self {
            NumberFormat::Fraction => Value::String(ratio::render(r)),
            NumberFormat::Decimal => json!(ratio::to_f64(r)),
        }
    }
}

pub(crate) fn ser_ratio<S: Serializer>(r: &Ratio, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&ratio::render(r))
}

pub(crate) fn ser_ratios<S: Serializer>(rs: &[Ratio], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(rs.iter().map(ratio::render))
}

pub fn strategy_entries(s: &MixedStrategy, fmt: NumberFormat) -> Value {
    Value::Array(s.sparse().iter().map(|(v, p)| json!([v, fmt.value(p)])).collect())
}

/// `{"schema", "n", "strategy": [[vertex, "p/q"], ...]}`
pub fn strategy_to_json(s: &MixedStrategy, fmt: NumberFormat) -> Value {
    json!({
        "schema": STRATEGY_SCHEMA,
        "n": s.len(),
        "strategy": strategy_entries(s, fmt),
    })
}

#[derive(Deserialize)]
struct StrategyDoc {
    n: usize,
    strategy: Vec<(usize, Value)>,
}

fn number(v: &Value) -> Result<Ratio> {
    match v {
        Value::String(s) => ratio::parse(s),
        Value::Number(n) => ratio::parse(&n.to_string()),
        other => Err(Error::InvalidStrategy(format!("probability must be a string or number, got {other}"))),
    }
}

/// Reads a strategy document. Decimal probabilities are taken at their exact
/// decimal value, so they must still sum to exactly 1.
pub fn strategy_from_json(text: &str) -> Result<MixedStrategy> {
    let doc: StrategyDoc = serde_json::from_str(text)?;
    let entries = doc.strategy.iter().map(|(v, p)| Ok((*v, number(p)?))).collect::<Result<Vec<_>>>()?;
    MixedStrategy::from_sparse(doc.n, &entries)
}

pub fn solution_to_json(sol: &ZeroSumSolution, fmt: NumberFormat) -> Value {
    let c = &sol.certificate;
    let list = |vs: &[Ratio]| Value::Array(vs.iter().map(|v| fmt.value(v)).collect());
    json!({
        "schema": SOLUTION_SCHEMA,
        "value": fmt.value(&sol.value),
        "maxmin": strategy_entries(&sol.maxmin, fmt),
        "minmax": strategy_entries(&sol.minmax, fmt),
        "certificate": {
            "method": c.method,
            "pivots": c.pivots,
            "primal_objective": fmt.value(&c.primal_objective),
            "dual_objective": fmt.value(&c.dual_objective),
            "row_values": list(&c.row_values),
            "column_values": list(&c.column_values),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::frac;

    #[test]
    fn strategy_round_trip() {
        let s = MixedStrategy::from_sparse(5, &[(0, frac(3, 11)), (1, frac(4, 11)), (4, frac(4, 11))]).unwrap();
        let text = strategy_to_json(&s, NumberFormat::Fraction).to_string();
        assert!(text.contains("\"3/11\""));
        assert_eq!(strategy_from_json(&text).unwrap(), s);
    }

    #[test]
    fn decimal_probabilities_are_exact() {
        let s = strategy_from_json(r#"{"n": 2, "strategy": [[0, 0.25], [1, "3/4"]]}"#).unwrap();
        assert_eq!(s.prob(0), &frac(1, 4));
        assert!(strategy_from_json(r#"{"n": 2, "strategy": [[0, 0.3], [1, 0.3]]}"#).is_err());
    }
}
