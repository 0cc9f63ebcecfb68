//! LinearFIXP circuits: gates `+`, `-`, scaling by a constant, `max` and `min`.

use num::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use crate::arith::{self, bit_length, format_rational, RatMatrix, RatVector, Rational};
use crate::error::PotlineError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gate {
    Input(usize),
    Const(Rational),
    Add(usize, usize),
    Sub(usize, usize),
    Scale(Rational, usize),
    Max(usize, usize),
    Min(usize, usize),
}

impl Gate {
    fn refs(&self) -> Vec<usize> {
        match self {
            Gate::Input(_) | Gate::Const(_) => vec![],
            Gate::Scale(_, g) => vec![*g],
            Gate::Add(a, b) | Gate::Sub(a, b) | Gate::Max(a, b) | Gate::Min(a, b) => vec![*a, *b],
        }
    }

    fn constant(&self) -> Option<&Rational> {
        match self {
            Gate::Const(c) | Gate::Scale(c, _) => Some(c),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearFixpCircuit {
    d: usize,
    gates: Vec<Gate>,
    outputs: Vec<usize>,
}

impl LinearFixpCircuit {
    pub fn new(d: usize, gates: Vec<Gate>, outputs: Vec<usize>) -> Result<Self, PotlineError> {
        let c = LinearFixpCircuit { d, gates, outputs };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<(), PotlineError> {
        let bad = |m: String| Err(PotlineError::Parse(m));
        if self.outputs.len() != self.d {
            return bad(format!("{} outputs for dimension {}", self.outputs.len(), self.d));
        }
        for (i, g) in self.gates.iter().enumerate() {
            if let Gate::Input(k) = g {
                if *k >= self.d {
                    return bad(format!("gate {i} reads input {k} of {}", self.d));
                }
            }
            if g.refs().iter().any(|&r| r >= i) {
                return bad(format!("gate {i} is not in topological order"));
            }
        }
        if self.outputs.iter().any(|&o| o >= self.gates.len()) {
            return bad("output refers to a missing gate".into());
        }
        Ok(())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn identity(d: usize) -> Self {
        Self::new(d, (0..d).map(Gate::Input).collect(), (0..d).collect()).expect("valid")
    }

    /// `f(x) = A x + b` built from scale and add gates.
    pub fn affine(a: &RatMatrix, b: &[Rational]) -> Self {
        let d = b.len();
        let mut gates: Vec<Gate> = (0..d).map(Gate::Input).collect();
        let mut outputs = Vec::with_capacity(d);
        for i in 0..d {
            gates.push(Gate::Const(b[i].clone()));
            let mut acc = gates.len() - 1;
            for j in 0..d {
                if a.get(i, j).is_zero() {
                    continue;
                }
                gates.push(Gate::Scale(a.get(i, j).clone(), j));
                gates.push(Gate::Add(acc, gates.len() - 1));
                acc = gates.len() - 1;
            }
            outputs.push(acc);
        }
        Self::new(d, gates, outputs).expect("valid affine circuit")
    }

    fn values(&self, x: &[Rational]) -> Vec<Rational> {
        let mut v: Vec<Rational> = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let val = match g {
                Gate::Input(i) => x[*i].clone(),
                Gate::Const(c) => c.clone(),
                Gate::Add(a, b) => &v[*a] + &v[*b],
                Gate::Sub(a, b) => &v[*a] - &v[*b],
                Gate::Scale(c, a) => c * &v[*a],
                Gate::Max(a, b) => v[*a].clone().max(v[*b].clone()),
                Gate::Min(a, b) => v[*a].clone().min(v[*b].clone()),
            };
            v.push(val);
        }
        v
    }

    /// Exact `f(x)`; outputs are not clamped to the unit box.
    pub fn eval(&self, x: &[Rational]) -> RatVector {
        assert_eq!(x.len(), self.d, "input dimension mismatch");
        let v = self.values(x);
        self.outputs.iter().map(|&o| v[o].clone()).collect()
    }

    /// Replaces fixed inputs by constants; free inputs keep their indices.
    pub fn restrict(&self, s: &Slice) -> Self {
        assert_eq!(s.coords.len(), self.d, "slice dimension mismatch");
        let gates = self
            .gates
            .iter()
            .map(|g| match g {
                Gate::Input(i) => match &s.coords[*i] {
                    Some(c) => Gate::Const(c.clone()),
                    None => Gate::Input(*i),
                },
                other => other.clone(),
            })
            .collect();
        LinearFixpCircuit { d: self.d, gates, outputs: self.outputs.clone() }
    }

    pub fn measure(&self) -> CircuitMeasure {
        let size = self.d as u64
            + self.gates.len() as u64
            + self.gates.iter().filter_map(Gate::constant).map(bit_length).sum::<u64>();
        let (m, q) = self.to_lcp();
        CircuitMeasure { size, n: q.len(), bm: m.max_bit_length(), bq: arith::bit_length_vec(&q) }
    }

    /// Number of LCP variables: `x`, the upper-clamp slacks, one per max/min gate.
    fn lcp_layout(&self) -> (usize, Vec<Option<usize>>) {
        let mut idx = vec![None; self.gates.len()];
        let mut n = 2 * self.d;
        for (i, g) in self.gates.iter().enumerate() {
            if matches!(g, Gate::Max(..) | Gate::Min(..)) {
                idx[i] = Some(n);
                n += 1;
            }
        }
        (n, idx)
    }

    /// Affine forms (coefficients over LCP variables, constant) of every gate.
    fn affine_forms(&self) -> (usize, Vec<Option<usize>>, Vec<(RatVector, Rational)>) {
        let (n, idx) = self.lcp_layout();
        let mut forms: Vec<(RatVector, Rational)> = Vec::with_capacity(self.gates.len());
        let zero = || vec![Rational::zero(); n];
        let comb = |a: &(RatVector, Rational), b: &(RatVector, Rational), s: &Rational| {
            let c: RatVector = a.0.iter().zip(&b.0).map(|(x, y)| x + s * y).collect();
            (c, &a.1 + s * &b.1)
        };
        let minus = -Rational::one();
        for (gi, g) in self.gates.iter().enumerate() {
            let f = match g {
                Gate::Input(i) => {
                    let mut c = zero();
                    c[*i] = Rational::one();
                    (c, Rational::zero())
                }
                Gate::Const(k) => (zero(), k.clone()),
                Gate::Add(a, b) => comb(&forms[*a], &forms[*b], &Rational::one()),
                Gate::Sub(a, b) => comb(&forms[*a], &forms[*b], &minus),
                Gate::Scale(k, a) => (forms[*a].0.iter().map(|x| k * x).collect(), k * &forms[*a].1),
                Gate::Max(_, b) => {
                    let mut f = forms[*b].clone();
                    f.0[idx[gi].expect("max var")] += Rational::one();
                    f
                }
                Gate::Min(a, _) => {
                    let mut f = forms[*a].clone();
                    f.0[idx[gi].expect("min var")] -= Rational::one();
                    f
                }
            };
            forms.push(f);
        }
        (n, idx, forms)
    }

    /// LCP `(M, q)` whose solutions `y` correspond to fixpoints `y[..d]` of the
    /// box-clamped circuit. Each variable is `max(0, L)` for an affine `L`,
    /// encoded as `w = y - L`.
    pub fn to_lcp(&self) -> (RatMatrix, RatVector) {
        let (n, idx, forms) = self.affine_forms();
        let d = self.d;
        let mut m = RatMatrix::zeros(n, n);
        let mut q = vec![Rational::zero(); n];
        let mut put = |row: usize, l: &(RatVector, Rational)| {
            for j in 0..n {
                let mut v = -l.0[j].clone();
                if j == row {
                    v += Rational::one();
                }
                m.set(row, j, v);
            }
            q[row] = -l.1.clone();
        };
        for i in 0..d {
            let o = &forms[self.outputs[i]];
            let mut r_form = o.clone();
            r_form.1 -= Rational::one();
            put(d + i, &r_form);
            let mut x_form = o.clone();
            x_form.0[d + i] -= Rational::one();
            put(i, &x_form);
        }
        for (gi, g) in self.gates.iter().enumerate() {
            let (a, b) = match g {
                Gate::Max(a, b) | Gate::Min(a, b) => (*a, *b),
                _ => continue,
            };
            let diff = (
                forms[a].0.iter().zip(&forms[b].0).map(|(x, y)| x - y).collect(),
                &forms[a].1 - &forms[b].1,
            );
            put(idx[gi].expect("gate var"), &diff);
        }
        (m, q)
    }

    /// The LCP solution corresponding to a point `x` in the box.
    pub fn lcp_witness(&self, x: &[Rational]) -> RatVector {
        let (n, idx) = self.lcp_layout();
        let vals = self.values(x);
        let mut y = vec![Rational::zero(); n];
        for i in 0..self.d {
            y[i] = x[i].clone();
            let o = &vals[self.outputs[i]];
            y[self.d + i] = (o - Rational::one()).max(Rational::zero());
        }
        for (gi, g) in self.gates.iter().enumerate() {
            if let Gate::Max(a, b) | Gate::Min(a, b) = g {
                y[idx[gi].expect("gate var")] = (&vals[*a] - &vals[*b]).max(Rational::zero());
            }
        }
        y
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitMeasure {
    pub size: u64,
    pub n: usize,
    pub bm: u64,
    pub bq: u64,
}

pub fn measure(c: &LinearFixpCircuit) -> CircuitMeasure {
    c.measure()
}

pub fn circuit_to_lcp(c: &LinearFixpCircuit) -> (RatMatrix, RatVector) {
    c.to_lcp()
}

pub fn eval(c: &LinearFixpCircuit, x: &[Rational]) -> RatVector {
    c.eval(x)
}

pub fn restrict(c: &LinearFixpCircuit, s: &Slice) -> LinearFixpCircuit {
    c.restrict(s)
}

pub fn in_unit_box(x: &[Rational]) -> bool {
    x.iter().all(|v| !v.is_negative() && v <= &Rational::one())
}

/// Per-coordinate `None` (free) or a fixed value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slice {
    pub coords: Vec<Option<Rational>>,
}

impl Slice {
    pub fn free(d: usize) -> Self {
        Slice { coords: vec![None; d] }
    }

    /// The `i`-slice through `x`: coordinates `1..=i` free, the rest fixed to `x`.
    pub fn through(x: &[Rational], i: usize) -> Self {
        Slice { coords: x.iter().enumerate().map(|(j, v)| (j >= i).then(|| v.clone())).collect() }
    }

    pub fn free_count(&self) -> usize {
        self.coords.iter().filter(|c| c.is_none()).count()
    }

    /// Fills free coordinates from `x`.
    pub fn embed(&self, x: &[Rational]) -> RatVector {
        self.coords.iter().zip(x).map(|(c, v)| c.clone().unwrap_or_else(|| v.clone())).collect()
    }
}

impl Serialize for Slice {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.coords
            .iter()
            .map(|c| c.as_ref().map_or("*".to_string(), format_rational))
            .collect::<Vec<_>>()
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Slice {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        let coords = v
            .iter()
            .map(|s| if s == "*" { Ok(None) } else { arith::parse_rational(s).map(Some) })
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        Ok(Slice { coords })
    }
}

fn gate_to_json(g: &Gate) -> Value {
    let r = |x: &Rational| Value::from(format_rational(x));
    match g {
        Gate::Input(i) => json!({"op": "input", "args": [i]}),
        Gate::Const(c) => json!({"op": "const", "args": [r(c)]}),
        Gate::Add(a, b) => json!({"op": "add", "args": [a, b]}),
        Gate::Sub(a, b) => json!({"op": "sub", "args": [a, b]}),
        Gate::Scale(c, a) => json!({"op": "scale", "args": [r(c), a]}),
        Gate::Max(a, b) => json!({"op": "max", "args": [a, b]}),
        Gate::Min(a, b) => json!({"op": "min", "args": [a, b]}),
    }
}

fn gate_from_json(v: &Value) -> Result<Gate, String> {
    let op = v.get("op").and_then(Value::as_str).ok_or("gate without op")?;
    let args = v.get("args").and_then(Value::as_array).ok_or("gate without args")?;
    let idx = |k: usize| -> Result<usize, String> {
        args.get(k).and_then(Value::as_u64).map(|x| x as usize).ok_or(format!("{op}: bad index argument"))
    };
    let num = |k: usize| -> Result<Rational, String> {
        args.get(k)
            .ok_or(format!("{op}: missing constant"))
            .and_then(|a| arith::serde_rat::value_to_rat(a).map_err(|e| e.to_string()))
    };
    let arity = |n: usize| if args.len() == n { Ok(()) } else { Err(format!("{op} takes {n} arguments")) };
    Ok(match op {
        "input" => {
            arity(1)?;
            Gate::Input(idx(0)?)
        }
        "const" => {
            arity(1)?;
            Gate::Const(num(0)?)
        }
        "add" => {
            arity(2)?;
            Gate::Add(idx(0)?, idx(1)?)
        }
        "sub" => {
            arity(2)?;
            Gate::Sub(idx(0)?, idx(1)?)
        }
        "scale" => {
            arity(2)?;
            Gate::Scale(num(0)?, idx(1)?)
        }
        "max" => {
            arity(2)?;
            Gate::Max(idx(0)?, idx(1)?)
        }
        "min" => {
            arity(2)?;
            Gate::Min(idx(0)?, idx(1)?)
        }
        other => return Err(format!("unsupported gate {other:?}")),
    })
}

impl Serialize for LinearFixpCircuit {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        json!({
            "d": self.d,
            "gates": self.gates.iter().map(gate_to_json).collect::<Vec<_>>(),
            "outputs": self.outputs,
        })
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LinearFixpCircuit {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            d: usize,
            gates: Vec<Value>,
            outputs: Vec<usize>,
        }
        let raw = Raw::deserialize(d)?;
        let gates = raw
            .gates
            .iter()
            .map(gate_from_json)
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        LinearFixpCircuit::new(raw.d, gates, raw.outputs).map_err(serde::de::Error::custom)
    }
}
