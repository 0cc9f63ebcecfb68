//! Orientations of the `n`-cube given by an outmap oracle.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::error::PotlineError;

pub trait UsoOracle: Send + Sync {
    fn n(&self) -> usize;
    /// Outmap of `v`; `None` is the dash symbol.
    fn orient(&self, v: &Bits) -> Option<Bits>;
}

#[derive(Clone)]
pub struct UsoInstance {
    oracle: Arc<dyn UsoOracle>,
    calls: Arc<AtomicU64>,
}

impl fmt::Debug for UsoInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UsoInstance").field("n", &self.n()).finish()
    }
}

impl UsoInstance {
    pub fn new(oracle: Arc<dyn UsoOracle>) -> Self {
        UsoInstance { oracle, calls: Arc::new(AtomicU64::new(0)) }
    }

    pub fn n(&self) -> usize {
        self.oracle.n()
    }

    pub fn orient(&self, v: &Bits) -> Option<Bits> {
        debug_assert_eq!(v.len(), self.n());
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.oracle.orient(v)
    }

    pub fn oracle_calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }
}

/// Explicit outmap table; absent vertices map to the dash symbol.
#[derive(Debug, Clone, Default)]
pub struct TableUso {
    pub n: usize,
    pub orient: HashMap<Bits, Option<Bits>>,
}

impl TableUso {
    pub fn new(n: usize) -> Self {
        TableUso { n, orient: HashMap::new() }
    }

    pub fn from_instance(u: &UsoInstance) -> Self {
        TableUso { n: u.n(), orient: Bits::all(u.n()).map(|v| (v.clone(), u.orient(&v))).collect() }
    }

    pub fn into_instance(self) -> UsoInstance {
        UsoInstance::new(Arc::new(self))
    }
}

impl UsoOracle for TableUso {
    fn n(&self) -> usize {
        self.n
    }

    fn orient(&self, v: &Bits) -> Option<Bits> {
        self.orient.get(v).cloned().flatten()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UsoFile {
    pub n: usize,
    /// Vertex to outmap string, or `"-"` for dash.
    pub orient: HashMap<Bits, String>,
}

impl UsoFile {
    pub fn from_table(t: &TableUso) -> Self {
        UsoFile {
            n: t.n,
            orient: t
                .orient
                .iter()
                .map(|(k, v)| (k.clone(), v.as_ref().map_or("-".to_string(), |b| b.to_string())))
                .collect(),
        }
    }

    pub fn to_table(&self) -> Result<TableUso, PotlineError> {
        let mut t = TableUso::new(self.n);
        for (k, v) in &self.orient {
            let o = if v == "-" {
                None
            } else {
                Some(v.parse::<Bits>().map_err(|e| PotlineError::Parse(e.to_string()))?)
            };
            if k.len() != self.n || o.as_ref().is_some_and(|b| b.len() != self.n) {
                return Err(PotlineError::Dimension(format!("outmap entry {k}")));
            }
            t.orient.insert(k.clone(), o);
        }
        Ok(t)
    }
}
