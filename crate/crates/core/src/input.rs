//! Parsing of command-line style inputs: the two coefficients and the
//! parameter declarations that accompany them.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::expr::shape::Assumptions;
use crate::expr::{parse, Expr, ParseError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InputError {
    #[error("in {what}: {source}")]
    Parse { what: &'static str, source: ParseError },
    #[error("bad parameter declaration `{0}`: expected name=value, name=nonzero or name=zero")]
    BadParam(String),
    #[error("parameter `{0}` declared twice")]
    DuplicateParam(String),
    #[error("`{0}` is a variable, not a parameter")]
    ReservedName(String),
    #[error("value of parameter `{name}` must be a number, got `{value}`")]
    NonNumeric { name: String, value: String },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    Number(Expr),
    Nonzero,
    Zero,
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Number(e) => write!(f, "{e}"),
            ParamValue::Nonzero => f.write_str("nonzero"),
            ParamValue::Zero => f.write_str("zero"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamDecl {
    pub name: String,
    pub value: ParamValue,
}

impl FromStr for ParamDecl {
    type Err = InputError;

    fn from_str(s: &str) -> Result<Self, InputError> {
        let (name, rhs) = s.split_once('=').ok_or_else(|| InputError::BadParam(s.into()))?;
        let (name, rhs) = (name.trim(), rhs.trim());
        let ident = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !ident || rhs.is_empty() {
            return Err(InputError::BadParam(s.into()));
        }
        if matches!(name, "x" | "y" | "y1" | "y2") {
            return Err(InputError::ReservedName(name.into()));
        }
        let value = match rhs {
            "nonzero" => ParamValue::Nonzero,
            "zero" => ParamValue::Zero,
            text => {
                let e = parse(text).map_err(|source| InputError::Parse { what: "parameter value", source })?;
                if !e.free_symbols().is_empty() || e.const_value().is_none() {
                    return Err(InputError::NonNumeric {
                        name: name.into(),
                        value: text.into(),
                    });
                }
                ParamValue::Number(e)
            }
        };
        Ok(ParamDecl { name: name.into(), value })
    }
}

/// The equation to classify, with numeric parameters substituted and the
/// symbolic ones recorded as nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    /// As typed.
    pub a_text: String,
    pub f_text: String,
    pub a: Expr,
    pub f: Expr,
    pub params: BTreeMap<String, ParamValue>,
    pub assumptions: Assumptions,
}

impl Problem {
    pub fn new(a: &str, f: &str, params: &[ParamDecl]) -> Result<Self, InputError> {
        let mut a_expr = parse(a).map_err(|source| InputError::Parse { what: "A", source })?;
        let mut f_expr = parse(f).map_err(|source| InputError::Parse { what: "F", source })?;
        let mut map = BTreeMap::new();
        let mut asm = Assumptions::new();
        for p in params {
            if map.insert(p.name.clone(), p.value.clone()).is_some() {
                return Err(InputError::DuplicateParam(p.name.clone()));
            }
            let value = match &p.value {
                ParamValue::Number(e) => Some(e.clone()),
                ParamValue::Zero => Some(Expr::zero()),
                ParamValue::Nonzero => {
                    asm.declare_nonzero(&p.name);
                    None
                }
            };
            if let Some(v) = value {
                a_expr = a_expr.substitute(&p.name, &v).normalize();
                f_expr = f_expr.substitute(&p.name, &v).normalize();
            }
        }
        Ok(Problem {
            a_text: a.into(),
            f_text: f.into(),
            a: a_expr,
            f: f_expr,
            params: map,
            assumptions: asm,
        })
    }
}
