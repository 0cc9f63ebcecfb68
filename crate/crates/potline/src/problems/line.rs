//! Successor/predecessor/potential graphs over fixed-width bit strings.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num::{BigUint, Zero};
use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::error::PotlineError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    #[serde(alias = "eol")]
    EndOfLine,
    #[serde(alias = "sod")]
    SinkOfDag,
    Eopl,
    Ueopl,
    Eoml,
    Ufeopl,
    #[serde(alias = "plus1")]
    UfeoplPlus1,
}

impl Flavor {
    pub fn has_predecessor(self) -> bool {
        matches!(self, Flavor::EndOfLine | Flavor::Eopl | Flavor::Ueopl | Flavor::Eoml)
    }

    pub fn has_potential(self) -> bool {
        !matches!(self, Flavor::EndOfLine)
    }

    pub fn start_potential(self) -> u32 {
        if self == Flavor::Eoml {
            1
        } else {
            0
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Flavor::EndOfLine => "endofline",
            Flavor::SinkOfDag => "sinkofdag",
            Flavor::Eopl => "eopl",
            Flavor::Ueopl => "ueopl",
            Flavor::Eoml => "eoml",
            Flavor::Ufeopl => "ufeopl",
            Flavor::UfeoplPlus1 => "ufeoplplus1",
        };
        f.write_str(s)
    }
}

/// Oracle access to a line graph. Strings passed in always have width `n()`.
pub trait LineOracle: Send + Sync {
    fn n(&self) -> usize;
    /// Bit width of the potential range.
    fn m(&self) -> usize;
    fn succ(&self, x: &Bits) -> Bits;
    /// `None` when the problem has no predecessor circuit.
    fn pred(&self, x: &Bits) -> Option<Bits>;
    fn potential(&self, x: &Bits) -> BigUint;
}

#[derive(Clone)]
pub struct LineInstance {
    pub flavor: Flavor,
    oracle: Arc<dyn LineOracle>,
    calls: Arc<AtomicU64>,
}

impl fmt::Debug for LineInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LineInstance")
            .field("flavor", &self.flavor)
            .field("n", &self.n())
            .field("m", &self.m())
            .finish()
    }
}

impl LineInstance {
    pub fn new(flavor: Flavor, oracle: Arc<dyn LineOracle>) -> Self {
        LineInstance { flavor, oracle, calls: Arc::new(AtomicU64::new(0)) }
    }

    pub fn n(&self) -> usize {
        self.oracle.n()
    }

    pub fn m(&self) -> usize {
        self.oracle.m()
    }

    pub fn zero(&self) -> Bits {
        Bits::zeros(self.n())
    }

    pub fn oracle(&self) -> &Arc<dyn LineOracle> {
        &self.oracle
    }

    pub fn oracle_calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn reset_calls(&self) {
        self.calls.store(0, Ordering::Relaxed);
    }

    fn tick(&self) {
        self.calls.fetch_add(1, Ordering::Relaxed);
    }

    pub fn s(&self, x: &Bits) -> Bits {
        debug_assert_eq!(x.len(), self.n());
        self.tick();
        self.oracle.succ(x)
    }

    /// Predecessor; panics if the flavor has none.
    pub fn p(&self, x: &Bits) -> Bits {
        self.try_p(x).expect("instance has no predecessor circuit")
    }

    pub fn try_p(&self, x: &Bits) -> Option<Bits> {
        debug_assert_eq!(x.len(), self.n());
        if !self.flavor.has_predecessor() {
            return None;
        }
        self.tick();
        self.oracle.pred(x)
    }

    pub fn v(&self, x: &Bits) -> BigUint {
        debug_assert_eq!(x.len(), self.n());
        self.tick();
        self.oracle.potential(x)
    }

    /// A string is a vertex unless it is a self-loop in every available direction.
    pub fn is_vertex(&self, x: &Bits) -> bool {
        if &self.s(x) != x {
            return true;
        }
        match self.try_p(x) {
            Some(p) => &p != x,
            None => false,
        }
    }

    pub fn with_flavor(&self, flavor: Flavor) -> Self {
        LineInstance { flavor, oracle: self.oracle.clone(), calls: self.calls.clone() }
    }
}

/// Explicit tables. Absent keys are self-loops with potential 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableLine {
    pub n: usize,
    pub m: usize,
    pub s: HashMap<Bits, Bits>,
    pub p: Option<HashMap<Bits, Bits>>,
    pub v: HashMap<Bits, BigUint>,
}

impl TableLine {
    pub fn new(n: usize, with_pred: bool) -> Self {
        TableLine { n, m: n, s: HashMap::new(), p: with_pred.then(HashMap::new), v: HashMap::new() }
    }

    /// Builds one line from a sequence of distinct vertices and potentials.
    pub fn from_path(n: usize, path: &[(Bits, u64)], with_pred: bool) -> Self {
        let mut t = TableLine::new(n, with_pred);
        t.add_path(path);
        t
    }

    pub fn add_path(&mut self, path: &[(Bits, u64)]) {
        for w in path.windows(2) {
            self.s.insert(w[0].0.clone(), w[1].0.clone());
            if let Some(p) = &mut self.p {
                p.insert(w[1].0.clone(), w[0].0.clone());
            }
        }
        for (x, v) in path {
            self.v.insert(x.clone(), BigUint::from(*v));
        }
        self.fit_m();
    }

    pub fn set_potential(&mut self, x: &Bits, v: u64) {
        self.v.insert(x.clone(), BigUint::from(v));
        self.fit_m();
    }

    fn fit_m(&mut self) {
        let need = self.v.values().map(|v| v.bits() as usize).max().unwrap_or(0);
        self.m = self.m.max(need).max(1);
    }

    pub fn into_instance(self, flavor: Flavor) -> LineInstance {
        LineInstance::new(flavor, Arc::new(self))
    }
}

impl LineOracle for TableLine {
    fn n(&self) -> usize {
        self.n
    }

    fn m(&self) -> usize {
        self.m
    }

    fn succ(&self, x: &Bits) -> Bits {
        self.s.get(x).cloned().unwrap_or_else(|| x.clone())
    }

    fn pred(&self, x: &Bits) -> Option<Bits> {
        self.p.as_ref().map(|p| p.get(x).cloned().unwrap_or_else(|| x.clone()))
    }

    fn potential(&self, x: &Bits) -> BigUint {
        self.v.get(x).cloned().unwrap_or_else(BigUint::zero)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LineFile {
    pub flavor: Flavor,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(rename = "S", default)]
    pub s: HashMap<Bits, Bits>,
    #[serde(rename = "P", default, skip_serializing_if = "Option::is_none")]
    pub p: Option<HashMap<Bits, Bits>>,
    #[serde(rename = "V", default)]
    pub v: HashMap<Bits, serde_json::Value>,
}

impl LineFile {
    pub fn from_table(flavor: Flavor, t: &TableLine) -> Self {
        LineFile {
            flavor,
            n: t.n,
            m: Some(t.m),
            s: t.s.clone(),
            p: t.p.clone(),
            v: t
                .v
                .iter()
                .map(|(k, v)| {
                    let val = match u64::try_from(v) {
                        Ok(x) => serde_json::Value::from(x),
                        Err(_) => serde_json::Value::from(v.to_string()),
                    };
                    (k.clone(), val)
                })
                .collect(),
        }
    }

    pub fn to_table(&self) -> Result<TableLine, PotlineError> {
        let width_ok = |x: &Bits| x.len() == self.n;
        let keys_ok = self.s.iter().all(|(a, b)| width_ok(a) && width_ok(b))
            && self.p.iter().flatten().all(|(a, b)| width_ok(a) && width_ok(b))
            && self.v.keys().all(width_ok);
        if !keys_ok {
            return Err(PotlineError::Parse(format!("bit strings must have width {}", self.n)));
        }
        let mut v = HashMap::new();
        for (k, val) in &self.v {
            let num = match val {
                serde_json::Value::Number(n) => n.to_string(),
                serde_json::Value::String(s) => s.clone(),
                other => return Err(PotlineError::Parse(format!("bad potential {other}"))),
            };
            let parsed: BigUint =
                num.parse().map_err(|_| PotlineError::Parse(format!("bad potential {num}")))?;
            v.insert(k.clone(), parsed);
        }
        let p = if self.flavor.has_predecessor() {
            Some(self.p.clone().unwrap_or_default())
        } else {
            None
        };
        let mut t = TableLine { n: self.n, m: self.m.unwrap_or(self.n), s: self.s.clone(), p, v };
        t.fit_m();
        Ok(t)
    }

    pub fn to_instance(&self) -> Result<LineInstance, PotlineError> {
        Ok(self.to_table()?.into_instance(self.flavor))
    }
}
