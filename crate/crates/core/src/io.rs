//! JSON interchange formats.
//!
//! Complex matrices are `{"rows", "cols", "data": [[re, im], ...]}` in row-major order; density
//! operators add `"dims"`. Channels carry `"in_dims"`, `"out_dims"` and either `"kraus"` or `"choi"`.

use nalgebra::DMatrix;
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use serde_json::Value;

use crate::channel_games::ChannelGameSpec;
use crate::channels::{from_choi, QuantumChannel};
use crate::classical::HostMatrix;
use crate::error::{QceError, Result};
use crate::games::{Adversary, RewardReport, StateStrategy, Strategy};
use crate::linalg::{c, CMat, ComplexMatrix, DensityOperator};
use crate::state_games::StateGameSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn from_mat(m: &CMat) -> Self {
        let data = (0..m.nrows())
            .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
            .map(|(i, j)| [m[(i, j)].re, m[(i, j)].im])
            .collect();
        Self { rows: m.nrows(), cols: m.ncols(), data }
    }

    pub fn to_mat(&self) -> Result<CMat> {
        if self.data.len() != self.rows * self.cols {
            return Err(QceError::InvalidInput(format!(
                "matrix has {} entries, expected {}x{}",
                self.data.len(),
                self.rows,
                self.cols
            )));
        }
        let entries: Vec<_> = self.data.iter().map(|[re, im]| c(*re, *im)).collect();
        Ok(ComplexMatrix::from_row_major(self.rows, self.cols, &entries)?.into_inner())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityJson {
    pub dims: Vec<usize>,
    #[serde(flatten)]
    pub matrix: MatrixJson,
}

impl DensityJson {
    pub fn from_state(rho: &DensityOperator) -> Self {
        Self { dims: rho.dims().to_vec(), matrix: MatrixJson::from_mat(rho.matrix()) }
    }

    pub fn to_state(&self) -> Result<DensityOperator> {
        DensityOperator::new(self.dims.clone(), self.matrix.to_mat()?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelJson {
    pub in_dims: Vec<usize>,
    pub out_dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kraus: Option<Vec<MatrixJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub choi: Option<MatrixJson>,
}

impl ChannelJson {
    pub fn from_channel(ch: &QuantumChannel) -> Self {
        Self {
            in_dims: ch.in_dims().to_vec(),
            out_dims: ch.out_dims().to_vec(),
            kraus: Some(ch.kraus().iter().map(MatrixJson::from_mat).collect()),
            choi: None,
        }
    }

    pub fn to_channel(&self) -> Result<QuantumChannel> {
        match (&self.kraus, &self.choi) {
            (Some(ks), None) => {
                let ks = ks.iter().map(MatrixJson::to_mat).collect::<Result<Vec<_>>>()?;
                QuantumChannel::new(self.in_dims.clone(), self.out_dims.clone(), ks)
            }
            (None, Some(j)) => from_choi(&j.to_mat()?, self.in_dims.clone(), self.out_dims.clone()),
            _ => Err(QceError::InvalidInput("channel needs exactly one of \"kraus\" or \"choi\"".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateGameJson {
    /// Rows indexed by the budget w, columns by the reported z'.
    pub t: Vec<Vec<f64>>,
    pub p_adv: f64,
}

impl StateGameJson {
    pub fn from_spec(g: &StateGameSpec) -> Self {
        Self { t: real_rows(g.t.matrix()), p_adv: g.p_adv }
    }

    pub fn to_spec(&self) -> Result<StateGameSpec> {
        StateGameSpec::new(HostMatrix::from_rows(&self.t)?, self.p_adv)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelGameEntryJson {
    pub p: f64,
    pub state: DensityJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelGameJson {
    pub entries: Vec<ChannelGameEntryJson>,
}

impl ChannelGameJson {
    pub fn from_spec(g: &ChannelGameSpec) -> Self {
        let entries = g
            .entries()
            .iter()
            .map(|(p, s)| ChannelGameEntryJson { p: *p, state: DensityJson::from_state(s) })
            .collect();
        Self { entries }
    }

    pub fn to_spec(&self) -> Result<ChannelGameSpec> {
        let entries = self
            .entries
            .iter()
            .map(|e| Ok((e.p, e.state.to_state()?)))
            .collect::<Result<Vec<_>>>()?;
        ChannelGameSpec::new(entries)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyJson {
    State { bob_basis: MatrixJson, f: Vec<usize> },
    Preprocessing(ChannelJson),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversaryJson {
    pub basis: MatrixJson,
    pub partition: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardReportJson {
    pub value: f64,
    pub certified: bool,
    pub restarts_used: usize,
    pub strategy: StrategyJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adversary: Option<AdversaryJson>,
}

impl RewardReportJson {
    pub fn from_report(r: &RewardReport) -> Self {
        let strategy = match &r.strategy {
            Strategy::State(s) => StrategyJson::State { bob_basis: MatrixJson::from_mat(&s.bob_basis), f: s.f.clone() },
            Strategy::Preprocessing(e) => StrategyJson::Preprocessing(ChannelJson::from_channel(e)),
        };
        let adversary = r
            .adversary
            .as_ref()
            .map(|a| AdversaryJson { basis: MatrixJson::from_mat(&a.basis), partition: a.partition.clone() });
        Self { value: r.value, certified: r.certified, restarts_used: r.restarts_used, strategy, adversary }
    }

    pub fn to_report(&self) -> Result<RewardReport> {
        let strategy = match &self.strategy {
            StrategyJson::State { bob_basis, f } => {
                Strategy::State(StateStrategy { bob_basis: bob_basis.to_mat()?, f: f.clone() })
            }
            StrategyJson::Preprocessing(ch) => Strategy::Preprocessing(ch.to_channel()?),
        };
        let adversary = match &self.adversary {
            Some(a) => Some(Adversary { basis: a.basis.to_mat()?, partition: a.partition.clone() }),
            None => None,
        };
        Ok(RewardReport {
            value: self.value,
            strategy,
            adversary,
            restarts_used: self.restarts_used,
            certified: self.certified,
        })
    }
}

pub fn real_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().map(round12).and_then(serde_json::Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_value),
        Value::Object(o) => o.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with every float rounded to 12 significant digits.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value).map_err(|e| QceError::Numerical(format!("serialization failed: {e}")))?;
    round_value(&mut v);
    serde_json::to_string_pretty(&v).map_err(|e| QceError::Numerical(format!("serialization failed: {e}")))
}

pub fn from_json<T: DeserializeOwned>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| QceError::InvalidInput(format!("malformed JSON: {e}")))
}
