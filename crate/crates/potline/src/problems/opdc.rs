//! Grid instances with per-dimension direction functions.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num::{BigUint, Zero};
use serde::{Deserialize, Serialize};

use crate::error::PotlineError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dir {
    Up,
    Down,
    Zero,
}

impl fmt::Display for Dir {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dir::Up => "up",
            Dir::Down => "down",
            Dir::Zero => "zero",
        })
    }
}

pub type IntPoint = Vec<BigUint>;

/// Direction oracle. Dimensions are numbered `1..=d`.
pub trait OpdcOracle: Send + Sync {
    fn widths(&self) -> &[BigUint];
    fn direction(&self, i: usize, p: &[BigUint]) -> Dir;
}

#[derive(Clone)]
pub struct OpdcInstance {
    oracle: Arc<dyn OpdcOracle>,
    calls: Arc<AtomicU64>,
}

impl fmt::Debug for OpdcInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OpdcInstance").field("widths", &self.widths()).finish()
    }
}

impl OpdcInstance {
    pub fn new(oracle: Arc<dyn OpdcOracle>) -> Self {
        OpdcInstance { oracle, calls: Arc::new(AtomicU64::new(0)) }
    }

    pub fn d(&self) -> usize {
        self.oracle.widths().len()
    }

    pub fn widths(&self) -> &[BigUint] {
        self.oracle.widths()
    }

    pub fn oracle_calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn on_grid(&self, p: &[BigUint]) -> bool {
        p.len() == self.d() && p.iter().zip(self.widths()).all(|(x, k)| x <= k)
    }

    pub fn check_grid(&self, p: &[BigUint]) -> Result<(), PotlineError> {
        if self.on_grid(p) {
            Ok(())
        } else {
            Err(PotlineError::OffGrid(fmt_point(p)))
        }
    }

    /// `D_i(p)` for `1 <= i <= d`.
    pub fn dir(&self, i: usize, p: &[BigUint]) -> Dir {
        assert!(i >= 1 && i <= self.d(), "dimension {i} out of range");
        debug_assert!(self.on_grid(p));
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.oracle.direction(i, p)
    }

    pub fn dirs(&self, p: &[BigUint]) -> Vec<Dir> {
        (1..=self.d()).map(|i| self.dir(i, p)).collect()
    }

    /// `D_j(p) = zero` for every `j` in `1..=upto`.
    pub fn zero_through(&self, p: &[BigUint], upto: usize) -> bool {
        (1..=upto).all(|j| self.dir(j, p) == Dir::Zero)
    }

    /// Number of grid points, `prod (k_i + 1)`.
    pub fn grid_size(&self) -> BigUint {
        self.widths().iter().map(|k| k + 1u32).product()
    }

    /// All grid points in lexicographic order (coordinate `d` slowest).
    pub fn points(&self) -> Vec<IntPoint> {
        let ks: Vec<u64> = self
            .widths()
            .iter()
            .map(|k| u64::try_from(k).expect("grid too large to enumerate"))
            .collect();
        let mut out = Vec::new();
        let mut cur = vec![0u64; ks.len()];
        loop {
            out.push(cur.iter().map(|&x| BigUint::from(x)).collect());
            let mut i = 0;
            loop {
                if i == ks.len() {
                    return out;
                }
                if cur[i] < ks[i] {
                    cur[i] += 1;
                    break;
                }
                cur[i] = 0;
                i += 1;
            }
        }
    }
}

pub fn fmt_point(p: &[BigUint]) -> String {
    p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

pub fn parse_point(s: &str) -> Result<IntPoint, PotlineError> {
    let bad = || PotlineError::Parse(format!("bad grid point {s:?}"));
    if s.contains(',') {
        s.split(',').map(|t| t.trim().parse::<BigUint>().map_err(|_| bad())).collect()
    } else {
        s.chars().map(|c| c.to_digit(10).map(BigUint::from).ok_or_else(bad)).collect()
    }
}

pub fn point(xs: &[u64]) -> IntPoint {
    xs.iter().map(|&x| BigUint::from(x)).collect()
}

/// Explicit direction table; absent points read as all-zero.
#[derive(Debug, Clone)]
pub struct TableOpdc {
    pub k: Vec<BigUint>,
    pub d: HashMap<IntPoint, Vec<Dir>>,
}

impl TableOpdc {
    pub fn new(k: &[u64]) -> Self {
        TableOpdc { k: point(k), d: HashMap::new() }
    }

    pub fn set(&mut self, p: &[u64], dirs: &[Dir]) {
        assert_eq!(dirs.len(), self.k.len());
        self.d.insert(point(p), dirs.to_vec());
    }

    pub fn into_instance(self) -> OpdcInstance {
        OpdcInstance::new(Arc::new(self))
    }
}

impl OpdcOracle for TableOpdc {
    fn widths(&self) -> &[BigUint] {
        &self.k
    }

    fn direction(&self, i: usize, p: &[BigUint]) -> Dir {
        self.d.get(p).map_or(Dir::Zero, |v| v[i - 1])
    }
}

/// Direction oracle backed by a closure.
pub struct FnOpdc<F> {
    pub k: Vec<BigUint>,
    pub f: F,
}

impl<F> OpdcOracle for FnOpdc<F>
where
    F: Fn(usize, &[BigUint]) -> Dir + Send + Sync,
{
    fn widths(&self) -> &[BigUint] {
        &self.k
    }

    fn direction(&self, i: usize, p: &[BigUint]) -> Dir {
        (self.f)(i, p)
    }
}

pub fn fn_opdc<F>(k: &[u64], f: F) -> OpdcInstance
where
    F: Fn(usize, &[BigUint]) -> Dir + Send + Sync + 'static,
{
    OpdcInstance::new(Arc::new(FnOpdc { k: point(k), f }))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OpdcFile {
    pub k: Vec<serde_json::Value>,
    #[serde(rename = "D")]
    pub d: HashMap<String, Vec<Dir>>,
}

impl OpdcFile {
    pub fn to_table(&self) -> Result<TableOpdc, PotlineError> {
        let k = self
            .k
            .iter()
            .map(|v| {
                let s = match v {
                    serde_json::Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                s.parse::<BigUint>().map_err(|_| PotlineError::Parse(format!("bad width {s}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut d = HashMap::new();
        for (key, dirs) in &self.d {
            let p = parse_point(key)?;
            if p.len() != k.len() || dirs.len() != k.len() {
                return Err(PotlineError::Dimension(format!("entry {key}")));
            }
            if p.iter().zip(&k).any(|(x, w)| x > w) {
                return Err(PotlineError::OffGrid(key.clone()));
            }
            d.insert(p, dirs.clone());
        }
        Ok(TableOpdc { k, d })
    }

    pub fn from_instance(inst: &OpdcInstance) -> Self {
        let k = inst.widths().iter().map(|w| serde_json::Value::from(w.to_string())).collect();
        let d = inst.points().into_iter().map(|p| (fmt_point(&p), inst.dirs(&p))).collect();
        OpdcFile { k, d }
    }
}

pub fn is_zero_point(p: &[BigUint]) -> bool {
    p.iter().all(|x| x.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerates_grid() {
        let t = TableOpdc::new(&[1, 2]).into_instance();
        let pts = t.points();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[1], point(&[1, 0]));
        assert_eq!(t.grid_size(), BigUint::from(6u32));
    }

    #[test]
    fn parses_points() {
        assert_eq!(parse_point("11").unwrap(), point(&[1, 1]));
        assert_eq!(parse_point("10,3").unwrap(), point(&[10, 3]));
        assert!(parse_point("1x").is_err());
    }
}
