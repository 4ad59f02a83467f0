//! The JSON system-file format and its validated form.

use std::fs;
use std::path::Path;

use mifde_core::l1::MultiIndexSystem;
use mifde_core::order::parse_order;
use mifde_core::{Matrix64, MultiIndexSystem64, Order64, ParsedOrigin, RationalOrder, System64};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const DEFAULT_DT: f64 = 1e-2;
pub const DEFAULT_TOL: f64 = 1e-14;
pub const DEFAULT_DEPTH: usize = 300;
const MAX_GRID_POINTS: usize = 50_000_000;

/// On-disk description of `D^{α_i} y_i = Σ_j A_ij y_j`.
///
/// `orders` holds one entry per component, or a single entry shared by all
/// of them. Each is `"m/n"`, an integer or a decimal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub orders: Vec<String>,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub y0: Vec<f64>,
    pub t_end: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParsedOrder {
    pub text: String,
    pub rational: RationalOrder,
    /// The value used by solvers that accept real orders: the decimal as
    /// written when the rational is only an approximation.
    pub value: f64,
    pub origin: ParsedOrigin,
}

impl ParsedOrder {
    pub fn parse(text: &str) -> CliResult<Self> {
        let (rational, origin) = parse_order(text)?;
        let value = match origin {
            ParsedOrigin::Exact => rational.value(),
            ParsedOrigin::Approximated => text.trim().parse().map_err(|_| CliError::Input(format!("bad order '{text}'")))?,
        };
        Ok(Self { text: text.to_string(), rational, value, origin })
    }

    fn is_decimal(&self) -> bool {
        self.text.contains('.') || self.text.contains(['e', 'E'])
    }

    fn order(&self) -> Order64 {
        match self.origin {
            ParsedOrigin::Exact => Order64::Rational(self.rational),
            ParsedOrigin::Approximated => Order64::Real(self.value),
        }
    }

    fn same_as(&self, other: &Self) -> bool {
        self.rational == other.rational && self.value == other.value
    }
}

/// A validated system with resolved solver parameters.
#[derive(Clone, Debug)]
pub struct ParsedSystem {
    pub a: Matrix64,
    pub orders: Vec<ParsedOrder>,
    pub y0: Vec<f64>,
    pub t_end: f64,
    pub dt: f64,
    pub depth: usize,
    pub tol: f64,
    pub warnings: Vec<String>,
}

fn positive(name: &str, v: f64) -> CliResult<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Input(format!("{name} must be positive and finite, got {v}")))
    }
}

impl SystemFile {
    pub fn read(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        fs::write(path, self.to_json()).map_err(|source| CliError::Write { path: path.to_path_buf(), source })
    }

    pub fn from_system(orders: &[RationalOrder], a: &Matrix64, y0: &[f64], t_end: f64, dt: Option<f64>) -> Self {
        Self {
            orders: orders.iter().map(|o| o.to_string()).collect(),
            a: (0..a.rows()).map(|i| a.row(i).to_vec()).collect(),
            y0: y0.to_vec(),
            t_end,
            dt,
            depth: None,
            tol: None,
        }
    }

    pub fn parse(&self) -> CliResult<ParsedSystem> {
        let m = self.y0.len();
        if m == 0 {
            return Err(CliError::Input("y0 is empty".into()));
        }
        if self.a.len() != m || self.a.iter().any(|row| row.len() != m) {
            return Err(CliError::Input(format!("A must be {m}x{m} to match y0")));
        }
        if self.a.iter().flatten().chain(&self.y0).any(|v| !v.is_finite()) {
            return Err(CliError::Input("A and y0 must be finite".into()));
        }
        let orders = match self.orders.len() {
            1 => vec![ParsedOrder::parse(&self.orders[0])?; m],
            n if n == m => self.orders.iter().map(|s| ParsedOrder::parse(s)).collect::<CliResult<Vec<_>>>()?,
            n => return Err(CliError::Input(format!("{n} orders given for {m} components"))),
        };
        let mut warnings = Vec::new();
        for o in orders.iter().take(if self.orders.len() == 1 { 1 } else { m }) {
            if o.origin == ParsedOrigin::Approximated {
                warnings.push(format!(
                    "order {} approximated by {} (error {:.1e}); exact paths use the rational",
                    o.text.trim(),
                    o.rational,
                    (o.rational.value::<f64>() - o.value).abs()
                ));
            } else if o.is_decimal() {
                warnings.push(format!("order {} converted to {}", o.text.trim(), o.rational));
            }
        }
        let rows: Vec<&[f64]> = self.a.iter().map(Vec::as_slice).collect();
        Ok(ParsedSystem {
            a: Matrix64::from_rows(&rows)?,
            orders,
            y0: self.y0.clone(),
            t_end: positive("t_end", self.t_end)?,
            dt: positive("dt", self.dt.unwrap_or(DEFAULT_DT))?,
            depth: self.depth.unwrap_or(DEFAULT_DEPTH),
            tol: positive("tol", self.tol.unwrap_or(DEFAULT_TOL))?,
            warnings,
        })
    }
}

impl ParsedSystem {
    pub fn dim(&self) -> usize {
        self.y0.len()
    }

    pub fn steps(&self) -> CliResult<usize> {
        let n = (self.t_end / self.dt).round();
        if n < 1.0 || n > MAX_GRID_POINTS as f64 {
            return Err(CliError::Input(format!("t_end/dt = {n} steps is out of range")));
        }
        Ok(n as usize)
    }

    /// `t_k = k·dt` for `k = 0..=round(t_end/dt)`.
    pub fn times(&self) -> CliResult<Vec<f64>> {
        Ok((0..=self.steps()?).map(|k| k as f64 * self.dt).collect())
    }

    pub fn rationals(&self) -> Vec<RationalOrder> {
        self.orders.iter().map(|o| o.rational).collect()
    }

    /// Splits the components into a leading block of one order followed by a
    /// block of another.
    pub fn mixed_system(&self, method: &'static str) -> CliResult<System64> {
        let first = &self.orders[0];
        let m1 = self.orders.iter().take_while(|o| o.same_as(first)).count();
        let second = self.orders.get(m1).unwrap_or(first);
        if self.orders[m1..].iter().any(|o| !o.same_as(second)) {
            return Err(CliError::MethodInapplicable {
                method,
                reason: "orders must form two contiguous blocks".into(),
            });
        }
        Ok(System64::new(self.a.clone(), m1, first.order(), second.order(), self.y0.clone())?)
    }

    /// Two scalar components with exact rational orders.
    pub fn spectral_system(&self) -> CliResult<System64> {
        if self.dim() != 2 {
            return Err(CliError::MethodInapplicable {
                method: "spectral",
                reason: format!("needs exactly two scalar components, system has {}", self.dim()),
            });
        }
        let (a, b) = (self.orders[0].rational, self.orders[1].rational);
        Ok(System64::new(self.a.clone(), 1, a.into(), b.into(), self.y0.clone())?)
    }

    pub fn multi_index(&self) -> CliResult<MultiIndexSystem64> {
        let orders = self.orders.iter().map(|o| o.value).collect();
        Ok(MultiIndexSystem::new(self.a.clone(), orders, self.y0.clone())?)
    }
}
