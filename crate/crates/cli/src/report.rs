//! The JSON analysis report.

use serde::{Deserialize, Serialize};

use deltaiso::ring::linalg::QMat;
use deltaiso::{Check, Error, Qp, Result};

pub const SCHEMA: u32 = 1;

/// `unit * p^valuation + O(p^precision)`; zero has no valuation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Padic {
    pub unit: i128,
    pub valuation: Option<i32>,
    pub precision: i32,
}

impl From<&Qp> for Padic {
    fn from(q: &Qp) -> Self {
        let (unit, v) = q.to_rational_parts();
        Padic { unit, valuation: q.valuation().map(|_| v), precision: q.abs_prec().min(Qp::EXACT) }
    }
}

pub fn matrix(m: &QMat) -> Vec<Vec<Padic>> {
    m.iter().map(|r| r.iter().map(Padic::from).collect()).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    pub residual_valuation: i32,
    /// The budget the residual had to reach.
    pub precision: i32,
}

impl From<&Check> for CheckRecord {
    fn from(c: &Check) -> Self {
        CheckRecord {
            name: c.name.clone(),
            status: if c.passed() { Status::Pass } else { Status::Fail },
            residual_valuation: c.residual,
            precision: c.required,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ranks {
    #[serde(rename = "X1")]
    pub x1: usize,
    #[serde(rename = "X2")]
    pub x2: usize,
    #[serde(rename = "X_prim")]
    pub x_prim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Kedlaya {
    pub matrix: Vec<Vec<Padic>>,
    pub trace: Padic,
    pub det: Padic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisReport {
    pub schema: u32,
    pub p: u64,
    pub curve: String,
    pub a_p: i64,
    pub ordinary: bool,
    pub ranks: Ranks,
    pub m_u: usize,
    pub delta_rank: usize,
    #[serde(rename = "is_CL")]
    pub is_cl: bool,
    pub filtration_dims: Vec<usize>,
    pub frobenius_matrix: Vec<Vec<Padic>>,
    pub kedlaya: Kedlaya,
    pub checks: Vec<CheckRecord>,
}

impl AnalysisReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Parses and validates a report.
    pub fn from_json(s: &str) -> Result<Self> {
        let r: AnalysisReport = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        if r.schema != SCHEMA {
            return Err(Error::Parse(format!("unsupported schema {}", r.schema)));
        }
        let square = |m: &[Vec<Padic>]| m.iter().all(|row| row.len() == m.len());
        if !square(&r.frobenius_matrix) || r.kedlaya.matrix.len() != 2 || !square(&r.kedlaya.matrix) {
            return Err(Error::Parse("matrices must be square, Kedlaya 2x2".into()));
        }
        for c in &r.checks {
            let pass = c.residual_valuation >= c.precision;
            if pass != (c.status == Status::Pass) {
                return Err(Error::Parse(format!("check {:?} status disagrees with its residual", c.name)));
            }
        }
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn padic(unit: i128, v: i32) -> Padic {
        Padic { unit, valuation: Some(v), precision: 8 }
    }

    pub(crate) fn sample() -> AnalysisReport {
        AnalysisReport {
            schema: SCHEMA,
            p: 5,
            curve: "0,1".into(),
            a_p: 0,
            ordinary: false,
            ranks: Ranks { x1: 0, x2: 1, x_prim: 1 },
            m_u: 2,
            delta_rank: 2,
            is_cl: false,
            filtration_dims: vec![1, 2, 2],
            frobenius_matrix: vec![vec![padic(0, 0), padic(-1, 1)], vec![padic(1, 0), padic(0, 0)]],
            kedlaya: Kedlaya {
                matrix: vec![vec![padic(3, 0), padic(2, 1)], vec![padic(-7, 0), padic(-3, 0)]],
                trace: Padic { unit: 0, valuation: None, precision: 10 },
                det: padic(1, 1),
            },
            checks: vec![CheckRecord { name: "x".into(), status: Status::Pass, residual_valuation: 6, precision: 5 }],
        }
    }

    #[test]
    fn round_trip() {
        let r = sample();
        let s = r.to_json();
        assert!(s.contains("\"is_CL\"") && s.contains("\"X_prim\"") && s.contains("\"schema\": 1"));
        assert_eq!(AnalysisReport::from_json(&s).unwrap(), r);
    }

    #[test]
    fn validation() {
        let mut r = sample();
        r.schema = 2;
        assert!(AnalysisReport::from_json(&r.to_json()).is_err());
        let mut r = sample();
        r.checks[0].status = Status::Fail;
        assert!(AnalysisReport::from_json(&r.to_json()).is_err());
        assert!(AnalysisReport::from_json("{").is_err());
    }

    #[test]
    fn padic_from_qp() {
        let q = Qp::from_int(5, -15, 8);
        assert_eq!(Padic::from(&q), Padic { unit: -3, valuation: Some(1), precision: 8 });
        assert_eq!(Padic::from(&Qp::zero(5, 6)).valuation, None);
    }
}
