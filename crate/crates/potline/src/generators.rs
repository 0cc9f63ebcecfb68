//! Seeded instance generators for every problem type.

use num::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{int, parse_rational, rat, RatMatrix, RatVector, Rational};
use crate::bits::Bits;
use crate::circuit::{Gate, LinearFixpCircuit};
use crate::error::PotlineError;
use crate::problems::{
    ContractionInstance, Dir, Flavor, LcpInstance, LineInstance, OpdcInstance, TableLine, TableOpdc, TableUso,
    UsoInstance,
};
use crate::reductions::lcp::plcp_to_uso;
use crate::solvers::brute::is_p_matrix;

/// Largest `d` for which P-matrix generation checks every principal minor.
pub const MINOR_CHECK_CAP: usize = 5;
/// Largest dimension accepted for contraction maps.
pub const CONTRACTION_CAP: usize = 4;
/// Largest number of vertices of a generated line table.
pub const LINE_CAP: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum GenKind {
    PMatrixLcp,
    NonPMatrixLcp,
    Uso,
    BrokenUso,
    ContractionCircuit,
    ExplicitLine,
    MultiLine,
    OpdcGrid,
}

/// Generator parameters. `size` is the dimension, or the line length for line kinds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenSpec {
    pub kind: GenKind,
    pub size: usize,
    pub seed: u64,
    /// Line flavor; defaults to UEOPL.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flavor: Option<Flavor>,
    /// Potential increments along an explicit line.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gaps: Option<Vec<u64>>,
    /// Number of lines of a multi-line table; defaults to 2.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lines: Option<usize>,
    /// Vertex bit width of line tables, or grid width of OPDC grids.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<usize>,
    /// Contraction factor, e.g. `"1/2"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor: Option<String>,
    /// Norm index of contraction maps; defaults to 2.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    /// Planted diagonal entry of a non-P matrix.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub planted: Option<i64>,
    /// Plant a violation: a non-contraction, a potential drop, or random grid directions.
    #[serde(default)]
    pub broken: bool,
}

impl GenSpec {
    pub fn new(kind: GenKind, size: usize, seed: u64) -> Self {
        GenSpec {
            kind,
            size,
            seed,
            flavor: None,
            gaps: None,
            lines: None,
            width: None,
            factor: None,
            p: None,
            planted: None,
            broken: false,
        }
    }

    pub fn broken(mut self) -> Self {
        self.broken = true;
        self
    }

    pub fn with_flavor(mut self, flavor: Flavor) -> Self {
        self.flavor = Some(flavor);
        self
    }

    pub fn with_gaps(mut self, gaps: Vec<u64>) -> Self {
        self.gaps = Some(gaps);
        self
    }

    pub fn with_lines(mut self, lines: usize) -> Self {
        self.lines = Some(lines);
        self
    }

    pub fn with_width(mut self, width: usize) -> Self {
        self.width = Some(width);
        self
    }

    pub fn with_factor(mut self, factor: &str) -> Self {
        self.factor = Some(factor.to_string());
        self
    }

    pub fn with_p(mut self, p: u32) -> Self {
        self.p = Some(p);
        self
    }

    pub fn with_planted(mut self, v: i64) -> Self {
        self.planted = Some(v);
        self
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    fn factor_value(&self) -> Result<Rational, PotlineError> {
        match &self.factor {
            Some(s) => Ok(parse_rational(s)?),
            None => Ok(rat(1, 2)),
        }
    }
}

fn random_rational(rng: &mut ChaCha8Rng, num: i64, max_den: i64) -> Rational {
    rat(rng.gen_range(-num..=num), rng.gen_range(1..=max_den))
}

/// `M = B^T B + diag(positive)` and a right-hand side with a negative entry.
fn spd_lcp(rng: &mut ChaCha8Rng, d: usize) -> (RatMatrix, RatVector) {
    let rows: Vec<Vec<Rational>> = (0..d).map(|_| (0..d).map(|_| int(rng.gen_range(-2..=2))).collect()).collect();
    let bm = RatMatrix::from_rows(rows).expect("square");
    let mut m = bm.transpose().mul(&bm);
    for i in 0..d {
        let v = m.get(i, i) + int(rng.gen_range(1..=3));
        m.set(i, i, v);
    }
    let mut q: RatVector = (0..d).map(|_| random_rational(rng, 8, 8)).collect();
    if !q.iter().any(Signed::is_negative) {
        let i = rng.gen_range(0..d);
        q[i] = if q[i].is_zero() { int(-1) } else { -q[i].clone() };
    }
    (m, q)
}

fn check_dim(d: usize, what: &str) -> Result<(), PotlineError> {
    if d == 0 {
        return Err(PotlineError::Dimension(format!("{what} needs a positive size")));
    }
    Ok(())
}

/// Seeded LCP: an SPD P-matrix, or one with a planted non-positive diagonal entry.
pub fn gen_lcp(spec: &GenSpec) -> Result<LcpInstance, PotlineError> {
    check_dim(spec.size, "an LCP")?;
    let d = spec.size;
    let mut rng = spec.rng();
    let (mut m, mut q) = spd_lcp(&mut rng, d);
    match spec.kind {
        GenKind::PMatrixLcp | GenKind::Uso | GenKind::BrokenUso => {
            if d <= MINOR_CHECK_CAP {
                assert!(is_p_matrix(&m), "B^T B + D must be a P-matrix");
            }
        }
        GenKind::NonPMatrixLcp => {
            let r = rng.gen_range(0..d);
            let v = spec.planted.unwrap_or_else(|| -rng.gen_range(1..=3));
            if v > 0 {
                return Err(PotlineError::Parse(format!("planted diagonal {v} must be non-positive")));
            }
            m.set(r, r, int(v));
            if q[r].is_zero() {
                q[r] = int(1);
            }
        }
        other => return Err(PotlineError::Parse(format!("{other:?} is not an LCP kind"))),
    }
    LcpInstance::new(m, q)
}

/// Seeded USO: the outmap of a P-matrix LCP, optionally with one flipped orientation bit.
pub fn gen_uso(spec: &GenSpec) -> Result<UsoInstance, PotlineError> {
    let lcp = gen_lcp(&GenSpec { kind: GenKind::PMatrixLcp, ..spec.clone() })?;
    let uso = plcp_to_uso(&lcp);
    match spec.kind {
        GenKind::Uso => Ok(uso),
        GenKind::BrokenUso => Ok(gen_uso_table(spec)?.into_instance()),
        other => Err(PotlineError::Parse(format!("{other:?} is not a USO kind"))),
    }
}

/// Materialized [`gen_uso`].
pub fn gen_uso_table(spec: &GenSpec) -> Result<TableUso, PotlineError> {
    let lcp = gen_lcp(&GenSpec { kind: GenKind::PMatrixLcp, ..spec.clone() })?;
    let mut t = TableUso::from_instance(&plcp_to_uso(&lcp));
    if spec.kind == GenKind::BrokenUso {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x9e37_79b9_7f4a_7c15);
        let v = Bits::from_u64(rng.gen_range(0..1u64 << t.n), t.n);
        let i = rng.gen_range(0..t.n);
        if let Some(Some(o)) = t.orient.get_mut(&v) {
            o.flip(i);
        }
    } else if spec.kind != GenKind::Uso {
        return Err(PotlineError::Parse(format!("{:?} is not a USO kind", spec.kind)));
    }
    Ok(t)
}

/// An affine map `f(x) = A x + b` and its fixpoint when it contracts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineMap {
    pub circuit: LinearFixpCircuit,
    pub factor: Rational,
    pub p: u32,
    pub fixpoint: Option<RatVector>,
    /// Grid exponents for planted instances.
    pub kappa: Option<Vec<u64>>,
}

impl AffineMap {
    pub fn instance(&self) -> Result<ContractionInstance, PotlineError> {
        let inst = ContractionInstance::circuit(self.circuit.clone(), self.factor.clone(), self.p)?;
        Ok(match &self.kappa {
            Some(k) => inst.with_kappa(k.clone()),
            None => inst,
        })
    }

    pub fn eval(&self, x: &[Rational]) -> RatVector {
        self.circuit.eval(x)
    }
}

fn abs_sums(a: &RatMatrix) -> Rational {
    let d = a.rows();
    let row = (0..d).map(|i| (0..d).map(|j| a.get(i, j).abs()).sum::<Rational>());
    let col = (0..d).map(|j| (0..d).map(|i| a.get(i, j).abs()).sum::<Rational>());
    row.chain(col).max().unwrap_or_else(Rational::zero)
}

/// Seeded affine contraction, or a planted map with a slope-`s` coordinate `max(0, 1 - s x_r)`.
pub fn gen_affine(spec: &GenSpec) -> Result<AffineMap, PotlineError> {
    check_dim(spec.size, "a contraction")?;
    let d = spec.size;
    if d > CONTRACTION_CAP {
        return Err(PotlineError::Dimension(format!("contraction generator supports d <= {CONTRACTION_CAP}")));
    }
    if spec.kind != GenKind::ContractionCircuit {
        return Err(PotlineError::Parse(format!("{:?} is not a contraction kind", spec.kind)));
    }
    let factor = spec.factor_value()?;
    let p = spec.p.unwrap_or(2);
    let mut rng = spec.rng();
    let mut a = RatMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            a.set(i, j, rat(rng.gen_range(-4..=4), 4));
        }
    }
    let bound = factor.clone().min(rat(1, 2));
    let sum = abs_sums(&a);
    if sum > bound {
        let s = &bound / &sum;
        for i in 0..d {
            for j in 0..d {
                let v = a.get(i, j) * &s;
                a.set(i, j, v);
            }
        }
    }
    let row_sum = |a: &RatMatrix, i: usize| (0..d).map(|j| a.get(i, j).abs()).sum::<Rational>();
    let xs: RatVector = (0..d)
        .map(|i| {
            let s = row_sum(&a, i);
            let choices: Vec<Rational> =
                (0..=16).map(|k| rat(k, 16)).filter(|x| *x >= s && *x <= Rational::one() - &s).collect();
            choices.choose(&mut rng).cloned().unwrap_or_else(|| rat(1, 2))
        })
        .collect();
    let ax = a.mul_vec(&xs);
    let b: RatVector = xs.iter().zip(&ax).map(|(x, y)| x - y).collect();
    if !spec.broken {
        let circuit = LinearFixpCircuit::affine(&a, &b);
        debug_assert_eq!(circuit.eval(&xs), xs);
        return Ok(AffineMap { circuit, factor, p, fixpoint: Some(xs), kappa: None });
    }
    let r = rng.gen_range(0..d);
    let slope = [2i64, 4, 6][rng.gen_range(0..3)];
    for j in 0..d {
        a.set(r, j, Rational::zero());
    }
    let mut base = LinearFixpCircuit::affine(&a, &b);
    let mut gates = base.gates().to_vec();
    let mut outputs = base.outputs().to_vec();
    gates.push(Gate::Const(Rational::one()));
    gates.push(Gate::Scale(int(slope), r));
    gates.push(Gate::Sub(gates.len() - 2, gates.len() - 1));
    gates.push(Gate::Const(Rational::zero()));
    gates.push(Gate::Max(gates.len() - 2, gates.len() - 1));
    outputs[r] = gates.len() - 1;
    base = LinearFixpCircuit::new(d, gates, outputs)?;
    Ok(AffineMap { circuit: base, factor, p, fixpoint: None, kappa: Some(vec![1; d]) })
}

/// Seeded contraction circuit; see [`gen_affine`].
pub fn gen_contraction(spec: &GenSpec) -> Result<ContractionInstance, PotlineError> {
    gen_affine(spec)?.instance()
}

fn bits_for(count: usize) -> usize {
    let mut n = 1;
    while (1usize << n) < count {
        n += 1;
    }
    n
}

/// Seeded line table and its flavor.
pub fn gen_line_table(spec: &GenSpec) -> Result<(Flavor, TableLine), PotlineError> {
    let flavor = spec.flavor.unwrap_or(Flavor::Ueopl);
    let len = spec.size;
    if len < 2 {
        return Err(PotlineError::Dimension("a line needs at least 2 vertices".into()));
    }
    let mut rng = spec.rng();
    let base = u64::from(flavor.start_potential());
    let (lengths, starts): (Vec<usize>, Vec<Option<u64>>) = match spec.kind {
        GenKind::ExplicitLine => (vec![len], vec![None]),
        GenKind::MultiLine => {
            let lines = spec.lines.unwrap_or(2).max(2);
            let extra = (len / 2).max(2);
            let mut ls = vec![len];
            let mut ss = vec![None];
            for _ in 1..lines {
                ls.push(extra);
                ss.push(Some(base + rng.gen_range(0..len as u64 - 1)));
            }
            (ls, ss)
        }
        other => return Err(PotlineError::Parse(format!("{other:?} is not a line kind"))),
    };
    let total: usize = lengths.iter().sum();
    if total > LINE_CAP {
        return Err(PotlineError::BudgetExceeded { size: total.to_string(), budget: LINE_CAP as u64 });
    }
    let n = spec.width.unwrap_or_else(|| bits_for(total));
    if n >= 64 || (1u64 << n) < total as u64 {
        return Err(PotlineError::Dimension(format!("{total} vertices do not fit in {n} bits")));
    }
    let mut labels: Vec<u64> = if n <= 20 {
        let mut all: Vec<u64> = (1..1u64 << n).collect();
        all.shuffle(&mut rng);
        all.truncate(total - 1);
        all
    } else {
        let mut seen = std::collections::HashSet::new();
        while seen.len() < total - 1 {
            seen.insert(rng.gen_range(1..1u64 << n));
        }
        let mut v: Vec<u64> = seen.into_iter().collect();
        v.sort_unstable();
        v.shuffle(&mut rng);
        v
    };
    labels.insert(0, 0);
    let gaps = match (&spec.gaps, spec.kind) {
        (Some(g), GenKind::ExplicitLine) => {
            if g.len() != len - 1 {
                return Err(PotlineError::Dimension(format!("{} gaps for a line of {len} vertices", g.len())));
            }
            g.clone()
        }
        _ => vec![1; len - 1],
    };
    let mut t = TableLine::new(n, flavor.has_predecessor());
    let mut next = labels.into_iter();
    for (li, (&l, start)) in lengths.iter().zip(&starts).enumerate() {
        let mut v = start.unwrap_or(base);
        let mut path = Vec::with_capacity(l);
        for k in 0..l {
            if k > 0 {
                v += if li == 0 { gaps[k - 1] } else { 1 };
            }
            path.push((Bits::from_u64(next.next().expect("enough labels"), n), v));
        }
        if li == 0 && spec.broken && l > 2 {
            let e = rng.gen_range(1..l);
            let prev = path[e - 1].1;
            for (k, entry) in path.iter_mut().enumerate().skip(e) {
                entry.1 = prev + (k - e) as u64;
            }
        }
        t.add_path(&path);
    }
    Ok((flavor, t))
}

/// Seeded line instance; see [`gen_line_table`].
pub fn gen_line(spec: &GenSpec) -> Result<LineInstance, PotlineError> {
    let (flavor, t) = gen_line_table(spec)?;
    Ok(t.into_instance(flavor))
}

fn sign_dir(target: u64, x: u64) -> Dir {
    match x.cmp(&target) {
        std::cmp::Ordering::Less => Dir::Up,
        std::cmp::Ordering::Equal => Dir::Zero,
        std::cmp::Ordering::Greater => Dir::Down,
    }
}

/// Seeded grid of widths `width` (default 3): a consistent instance with shifted targets, or random directions.
pub fn gen_opdc_table(spec: &GenSpec) -> Result<TableOpdc, PotlineError> {
    check_dim(spec.size, "a grid")?;
    if spec.kind != GenKind::OpdcGrid {
        return Err(PotlineError::Parse(format!("{:?} is not a grid kind", spec.kind)));
    }
    let d = spec.size;
    let w = spec.width.unwrap_or(3) as u64;
    if w == 0 {
        return Err(PotlineError::Dimension("grid width must be positive".into()));
    }
    let count = (w + 1).checked_pow(d as u32).filter(|&c| c <= LINE_CAP as u64);
    let Some(count) = count else {
        return Err(PotlineError::BudgetExceeded { size: format!("{}^{d}", w + 1), budget: LINE_CAP as u64 });
    };
    let mut rng = spec.rng();
    let base: Vec<u64> = (0..d).map(|_| rng.gen_range(0..=w)).collect();
    let shift: Vec<u64> = (0..d).map(|_| rng.gen_range(0..=w)).collect();
    let mut t = TableOpdc::new(&vec![w; d]);
    let all = [Dir::Down, Dir::Zero, Dir::Up];
    for idx in 0..count {
        let mut rest = idx;
        let p: Vec<u64> = (0..d)
            .map(|_| {
                let c = rest % (w + 1);
                rest /= w + 1;
                c
            })
            .collect();
        let dirs: Vec<Dir> = if spec.broken {
            (0..d).map(|_| all[rng.gen_range(0..3)]).collect()
        } else {
            (0..d)
                .map(|i| {
                    let above: u64 = p[i + 1..].iter().sum();
                    let target = (base[i] + shift[i] * above) % (w + 1);
                    sign_dir(target, p[i])
                })
                .collect()
        };
        t.set(&p, &dirs);
    }
    Ok(t)
}

/// Seeded grid instance; see [`gen_opdc_table`].
pub fn gen_opdc(spec: &GenSpec) -> Result<OpdcInstance, PotlineError> {
    Ok(gen_opdc_table(spec)?.into_instance())
}
