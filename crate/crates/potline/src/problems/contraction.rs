//! Contraction maps on the unit box, given as a circuit or a black box.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{serde_rat, RatVector, Rational};
use crate::circuit::LinearFixpCircuit;
use crate::error::PotlineError;

pub type BlackBox = Arc<dyn Fn(&[Rational]) -> RatVector + Send + Sync>;

#[derive(Clone)]
pub enum ContractionMap {
    Circuit(LinearFixpCircuit),
    BlackBox { d: usize, f: BlackBox },
}

impl fmt::Debug for ContractionMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContractionMap::Circuit(c) => f.debug_tuple("Circuit").field(&c.d()).finish(),
            ContractionMap::BlackBox { d, .. } => f.debug_tuple("BlackBox").field(d).finish(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ContractionInstance {
    pub f: ContractionMap,
    pub c: Rational,
    pub p: u32,
    pub eps: Option<Rational>,
    /// Explicit grid exponents; when absent they are derived from the circuit.
    pub kappa: Option<Vec<u64>>,
    calls: Arc<AtomicU64>,
}

impl ContractionInstance {
    pub fn new(f: ContractionMap, c: Rational, p: u32) -> Result<Self, PotlineError> {
        if !(c.is_positive() && c < Rational::one()) {
            return Err(PotlineError::Parse(format!("contraction factor {c} not in (0,1)")));
        }
        if p == 0 {
            return Err(PotlineError::Parse("norm index must be positive".into()));
        }
        Ok(ContractionInstance { f, c, p, eps: None, kappa: None, calls: Arc::new(AtomicU64::new(0)) })
    }

    pub fn circuit(c: LinearFixpCircuit, factor: Rational, p: u32) -> Result<Self, PotlineError> {
        Self::new(ContractionMap::Circuit(c), factor, p)
    }

    pub fn black_box<F>(d: usize, f: F, factor: Rational, p: u32) -> Result<Self, PotlineError>
    where
        F: Fn(&[Rational]) -> RatVector + Send + Sync + 'static,
    {
        Self::new(ContractionMap::BlackBox { d, f: Arc::new(f) }, factor, p)
    }

    pub fn with_eps(mut self, eps: Rational) -> Self {
        self.eps = Some(eps);
        self
    }

    pub fn with_kappa(mut self, kappa: Vec<u64>) -> Self {
        self.kappa = Some(kappa);
        self
    }

    pub fn d(&self) -> usize {
        match &self.f {
            ContractionMap::Circuit(c) => c.d(),
            ContractionMap::BlackBox { d, .. } => *d,
        }
    }

    pub fn eval(&self, x: &[Rational]) -> RatVector {
        self.calls.fetch_add(1, Ordering::Relaxed);
        match &self.f {
            ContractionMap::Circuit(c) => c.eval(x),
            ContractionMap::BlackBox { f, .. } => f(x),
        }
    }

    pub fn oracle_calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn as_circuit(&self) -> Option<&LinearFixpCircuit> {
        match &self.f {
            ContractionMap::Circuit(c) => Some(c),
            ContractionMap::BlackBox { .. } => None,
        }
    }

    /// `f(x) - x`.
    pub fn displacement(&self, x: &[Rational]) -> RatVector {
        self.eval(x).into_iter().zip(x).map(|(a, b)| a - b).collect()
    }
}

pub fn in_box(x: &[Rational]) -> bool {
    x.iter().all(|v| !v.is_negative() && v <= &Rational::one())
}

pub fn zero_vec(d: usize) -> RatVector {
    vec![Rational::zero(); d]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContractionFile {
    pub circuit: LinearFixpCircuit,
    #[serde(with = "serde_rat")]
    pub c: Rational,
    pub p: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<Vec<u64>>,
}

impl ContractionFile {
    pub fn to_instance(&self) -> Result<ContractionInstance, PotlineError> {
        let mut inst = ContractionInstance::circuit(self.circuit.clone(), self.c.clone(), self.p)?;
        if let Some(e) = &self.eps {
            inst.eps = Some(crate::arith::parse_rational(e)?);
        }
        inst.kappa = self.kappa.clone();
        Ok(inst)
    }

    pub fn from_instance(inst: &ContractionInstance) -> Option<Self> {
        Some(ContractionFile {
            circuit: inst.as_circuit()?.clone(),
            c: inst.c.clone(),
            p: inst.p,
            eps: inst.eps.as_ref().map(crate::arith::format_rational),
            kappa: inst.kappa.clone(),
        })
    }
}
