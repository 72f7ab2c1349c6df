use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::model::{Link, NetworkParams, Suppression};

/// Which engine produced a number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Analytic,
    Asymptotic,
    MonteCarlo,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Analytic => "analytic",
            Method::Asymptotic => "asymptotic",
            Method::MonteCarlo => "montecarlo",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Method::Analytic),
            "asymptotic" => Ok(Method::Asymptotic),
            "montecarlo" => Ok(Method::MonteCarlo),
            other => Err(domain(
                "method",
                format!("expected analytic|asymptotic|montecarlo, got `{other}`"),
            )),
        }
    }
}

/// A probability or rate together with its uncertainty.
///
/// For quadrature results `uncertainty` is the integrator's error estimate
/// (plus any truncated tail); for simulation it is the standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricEstimate {
    pub value: f64,
    pub method: Method,
    pub uncertainty: f64,
    pub metadata: BTreeMap<String, String>,
}

impl MetricEstimate {
    pub fn new(value: f64, method: Method, uncertainty: f64) -> Self {
        MetricEstimate {
            value,
            method,
            uncertainty,
            metadata: BTreeMap::new(),
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.insert(key.to_owned(), value.to_string());
        self
    }
}

/// Outage evaluation request: `P[log2(1 + SINR) < rate]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutageQuery {
    /// Target rate in bits per channel use.
    pub rate: f64,
    pub params: NetworkParams,
    pub suppression: Suppression,
    pub link: Link,
}

impl OutageQuery {
    pub fn new(rate: f64, params: NetworkParams, suppression: Suppression, link: Link) -> Self {
        OutageQuery {
            rate,
            params,
            suppression,
            link,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rate.is_finite() && self.rate > 0.0) {
            return Err(domain("rate", format!("target rate must be > 0, got {}", self.rate)));
        }
        self.params.validate()
    }

    /// SINR threshold `2^rate - 1`.
    pub fn threshold(&self) -> f64 {
        rate_threshold(self.rate)
    }
}

/// `2^rate - 1`, accurate for small rates.
pub fn rate_threshold(rate: f64) -> f64 {
    (rate * std::f64::consts::LN_2).exp_m1()
}
