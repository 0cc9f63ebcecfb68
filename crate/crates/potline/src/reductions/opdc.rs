//! Cube orientations and contraction maps to grid instances, and grid instances to forward lines.

use std::sync::Arc;

use num::{BigInt, BigUint, One, Signed, Zero};

use crate::arith::{ceil_log2, Rational};
use crate::bits::Bits;
use crate::circuit::LinearFixpCircuit;
use crate::error::PotlineError;
use crate::problems::{
    verify_contraction, verify_line, verify_opdc, verify_uso, Certificate, ContractionInstance, Dir, Flavor, IntPoint,
    LineInstance, LineOracle, OpdcInstance, OpdcOracle, UsoInstance,
};

struct UsoGrid {
    uso: UsoInstance,
    k: Vec<BigUint>,
}

fn point_to_bits(p: &[BigUint]) -> Bits {
    Bits(p.iter().map(|x| !x.is_zero()).collect())
}

impl OpdcOracle for UsoGrid {
    fn widths(&self) -> &[BigUint] {
        &self.k
    }

    fn direction(&self, i: usize, p: &[BigUint]) -> Dir {
        let v = point_to_bits(p);
        match self.uso.orient(&v) {
            None => Dir::Zero,
            Some(o) if !o.get(i - 1) => Dir::Zero,
            Some(_) if v.get(i - 1) => Dir::Down,
            Some(_) => Dir::Up,
        }
    }
}

/// Grid `{0,1}^n` whose directions follow the outgoing edges of the orientation.
pub fn uso_to_opdc(inst: &UsoInstance) -> OpdcInstance {
    OpdcInstance::new(Arc::new(UsoGrid { uso: inst.clone(), k: vec![BigUint::one(); inst.n()] }))
}

/// Maps `O1`, `OV1` and `OV2` of `uso_to_opdc(inst)` to `US1`, `USV1` or `USV2`.
pub fn map_back_uso_opdc(inst: &UsoInstance, cert: &Certificate) -> Result<Certificate, PotlineError> {
    let grid = uso_to_opdc(inst);
    if !verify_opdc(&grid, cert)? {
        return Err(PotlineError::UnmappableCert(format!("{} does not verify on the grid", cert.kind())));
    }
    let mut cands = Vec::new();
    let single = |p: &[BigUint], cands: &mut Vec<Certificate>| {
        let v = point_to_bits(p);
        cands.push(Certificate::US1 { v: v.clone() });
        cands.push(Certificate::USV1 { v });
    };
    match cert {
        Certificate::O1 { p } | Certificate::OV3 { p, .. } => single(p, &mut cands),
        Certificate::OV1 { p, q, .. } | Certificate::OV2 { p, q, .. } => {
            single(p, &mut cands);
            single(q, &mut cands);
            cands.insert(0, Certificate::USV2 { v: point_to_bits(p), u: point_to_bits(q) });
        }
        _ => {}
    }
    for c in cands {
        if verify_uso(inst, &c)? {
            return Ok(c);
        }
    }
    Err(PotlineError::UnmappableCert(format!("no cube certificate derived from {}", cert.kind())))
}

/// `kappa_i = (d-i+1)((5n+2) log n + n + (4n+2) b(M) + 1) + b(q)` with `log = ceil(log2)`.
pub fn kappa_formula(d: usize, n: u64, bm: u64, bq: u64) -> Vec<u64> {
    let inner = (5 * n + 2) * ceil_log2(n) + n + (4 * n + 2) * bm + 1;
    (1..=d as u64).map(|i| (d as u64 - i + 1) * inner + bq).collect()
}

/// Grid exponents of a circuit, from its induced LCP.
pub fn compute_kappa(c: &LinearFixpCircuit) -> Vec<u64> {
    let m = c.measure();
    kappa_formula(c.d(), m.n as u64, m.bm, m.bq)
}

/// Explicit `kappa` of the instance, else `compute_kappa` of its circuit.
pub fn instance_kappa(inst: &ContractionInstance) -> Result<Vec<u64>, PotlineError> {
    if let Some(k) = &inst.kappa {
        if k.len() != inst.d() {
            return Err(PotlineError::Dimension(format!("kappa has length {} for d = {}", k.len(), inst.d())));
        }
        return Ok(k.clone());
    }
    match inst.as_circuit() {
        Some(c) => Ok(compute_kappa(c)),
        None => Err(PotlineError::NoKappa("black-box map without explicit kappa".into())),
    }
}

struct ContractionGrid {
    inst: ContractionInstance,
    k: Vec<BigUint>,
}

fn to_unit(p: &[BigUint], k: &[BigUint]) -> Vec<Rational> {
    p.iter()
        .zip(k)
        .map(|(x, k)| Rational::new(BigInt::from(x.clone()), BigInt::from(k.clone())))
        .collect()
}

impl OpdcOracle for ContractionGrid {
    fn widths(&self) -> &[BigUint] {
        &self.k
    }

    fn direction(&self, i: usize, p: &[BigUint]) -> Dir {
        let x = to_unit(p, &self.k);
        let fx = self.inst.eval(&x);
        let delta = &fx[i - 1] - &x[i - 1];
        if delta.is_positive() {
            Dir::Up
        } else if delta.is_negative() {
            Dir::Down
        } else {
            Dir::Zero
        }
    }
}

/// Grid with widths `2^kappa_i` whose directions are the signs of `f(p/k) - p/k`.
pub fn contraction_to_opdc(inst: &ContractionInstance) -> Result<OpdcInstance, PotlineError> {
    let kappa = instance_kappa(inst)?;
    let k = kappa.iter().map(|&e| BigUint::one() << e).collect();
    Ok(OpdcInstance::new(Arc::new(ContractionGrid { inst: inst.clone(), k })))
}

/// Maps `O1`, `OV1`, `OV2`, `OV3` of `contraction_to_opdc(inst)` to `CM1`, `CMV1`, `CMV3`, `CMV2`.
pub fn map_back_contraction(inst: &ContractionInstance, cert: &Certificate) -> Result<Certificate, PotlineError> {
    let grid = contraction_to_opdc(inst)?;
    if !verify_opdc(&grid, cert)? {
        return Err(PotlineError::UnmappableCert(format!("{} does not verify on the grid", cert.kind())));
    }
    let k = grid.widths().to_vec();
    let out = match cert {
        Certificate::O1 { p } => Certificate::CM1 { x: to_unit(p, &k) },
        Certificate::OV1 { p, q, .. } => Certificate::CMV1 { x: to_unit(p, &k), y: to_unit(q, &k) },
        Certificate::OV2 { i, p, q } => Certificate::CMV3 { i: *i, x: to_unit(p, &k), y: to_unit(q, &k) },
        Certificate::OV3 { p, .. } => Certificate::CMV2 { x: to_unit(p, &k) },
        _ => unreachable!("verified above"),
    };
    if verify_contraction(inst, &out)? {
        Ok(out)
    } else {
        Err(PotlineError::UnmappableCert(format!("mapped {} does not verify", out.kind())))
    }
}

/// Tuple `(p_0, ..., p_d)`; `None` is the unused symbol.
pub type Tuple = Vec<Option<IntPoint>>;

/// Forward line over tuples of surface points.
pub struct OpdcLine {
    grid: OpdcInstance,
    widths: Vec<usize>,
    entry: usize,
    start_raw: Bits,
    base: BigUint,
    shift: BigUint,
    m: usize,
}

impl OpdcLine {
    /// Fails with `TrivialInstance(OV3)` when `D_1(0) = down`.
    pub fn new(grid: &OpdcInstance) -> Result<Self, PotlineError> {
        let d = grid.d();
        let widths: Vec<usize> = grid.widths().iter().map(|k| k.bits() as usize).collect();
        let entry = 1 + widths.iter().sum::<usize>();
        let origin: IntPoint = vec![BigUint::zero(); d];
        if grid.dir(1, &origin) == Dir::Down {
            return Err(PotlineError::TrivialInstance(Box::new(Certificate::OV3 { i: 1, p: origin })));
        }
        let base = grid.widths().iter().max().cloned().unwrap_or_default() + 2u32;
        let top = num::pow(base.clone(), d + 1);
        let mut line = OpdcLine {
            grid: grid.clone(),
            widths,
            entry,
            start_raw: Bits::zeros(0),
            base,
            shift: BigUint::zero(),
            m: top.bits() as usize + 1,
        };
        let start = line.start_tuple();
        line.start_raw = line.raw(&start);
        line.shift = line.raw_potential(&start);
        Ok(line)
    }

    pub fn d(&self) -> usize {
        self.grid.d()
    }

    pub fn start_tuple(&self) -> Tuple {
        let d = self.d();
        let mut t = vec![None; d + 1];
        t[0] = Some(vec![BigUint::zero(); d]);
        t
    }

    fn raw(&self, t: &Tuple) -> Bits {
        let mut bits = Vec::with_capacity(self.entry * t.len());
        for e in t {
            bits.push(e.is_some());
            for (c, &w) in self.widths.iter().enumerate() {
                let v = e.as_ref().map(|p| p[c].clone()).unwrap_or_default();
                bits.extend(Bits::from_biguint(&v, w).expect("coordinate fits its width").0);
            }
        }
        Bits(bits)
    }

    pub fn encode(&self, t: &Tuple) -> Bits {
        self.raw(t).xor(&self.start_raw)
    }

    /// Tuple of a code, or `None` for non-canonical codes.
    pub fn decode(&self, x: &Bits) -> Option<Tuple> {
        let raw = x.xor(&self.start_raw);
        let mut t = Vec::with_capacity(self.d() + 1);
        let mut at = 0;
        for _ in 0..=self.d() {
            let present = raw.get(at);
            at += 1;
            let mut p = Vec::with_capacity(self.d());
            for (c, &w) in self.widths.iter().enumerate() {
                let v = raw.slice(at, at + w).to_biguint();
                at += w;
                if v > self.grid.widths()[c] {
                    return None;
                }
                p.push(v);
            }
            if present {
                t.push(Some(p));
            } else if p.iter().any(|v| !v.is_zero()) {
                return None;
            } else {
                t.push(None);
            }
        }
        Some(t)
    }

    /// The four validity rules of a tuple.
    pub fn is_valid(&self, t: &Tuple) -> bool {
        let d = self.d();
        for (i, p) in t.iter().enumerate() {
            let Some(p) = p else { continue };
            if !self.grid.zero_through(p, i) {
                return false;
            }
            if i < d && self.grid.dir(i + 1, p) == Dir::Down {
                return false;
            }
            for (j, q) in t.iter().enumerate().skip(i + 1).take(d.saturating_sub(i + 1)) {
                let ok = match q {
                    None => p[j].is_zero(),
                    Some(q) => p[j] == &q[j] + 1u32,
                };
                if !ok {
                    return false;
                }
            }
        }
        true
    }

    /// Successor tuple, or `None` when the tuple is a self-loop.
    pub fn next(&self, t: &Tuple) -> Option<Tuple> {
        let d = self.d();
        if !self.is_valid(t) {
            return None;
        }
        let i = t.iter().position(|p| p.is_some())?;
        if i == d {
            return None;
        }
        let p = t[i].as_ref().unwrap();
        if self.grid.dir(i + 1, p) == Dir::Zero {
            let mut out = t.clone();
            out[i] = None;
            out[i + 1] = Some(p.clone());
            return Some(out);
        }
        let mut q = p.clone();
        for c in q.iter_mut().take(i) {
            *c = BigUint::zero();
        }
        q[i] += 1u32;
        if q[i] > self.grid.widths()[i] {
            return None;
        }
        let mut out = t.clone();
        out[0] = Some(q);
        Some(out)
    }

    fn raw_potential(&self, t: &Tuple) -> BigUint {
        let d = self.d();
        let mut v = BigUint::zero();
        let mut w = BigUint::one();
        for (i, p) in t.iter().enumerate() {
            let l = match p {
                None => BigUint::zero(),
                Some(_) if i == d => BigUint::one(),
                Some(p) => &p[i] + 1u32,
            };
            v += &w * l;
            w *= &self.base;
        }
        v
    }

    pub fn potential_of(&self, t: &Tuple) -> BigUint {
        let raw = self.raw_potential(t);
        if raw >= self.shift {
            raw - &self.shift
        } else {
            BigUint::zero()
        }
    }
}

impl LineOracle for OpdcLine {
    fn n(&self) -> usize {
        self.entry * (self.d() + 1)
    }

    fn m(&self) -> usize {
        self.m
    }

    fn succ(&self, x: &Bits) -> Bits {
        match self.decode(x).and_then(|t| self.next(&t)) {
            Some(n) => self.encode(&n),
            None => x.clone(),
        }
    }

    fn pred(&self, _x: &Bits) -> Option<Bits> {
        None
    }

    fn potential(&self, x: &Bits) -> BigUint {
        match self.decode(x) {
            Some(t) if self.is_valid(&t) => self.potential_of(&t),
            _ => BigUint::zero(),
        }
    }
}

/// Forward line whose end encodes a fixpoint or a violation of the grid instance.
pub fn opdc_to_ufeopl(inst: &OpdcInstance) -> Result<LineInstance, PotlineError> {
    Ok(LineInstance::new(Flavor::Ufeopl, Arc::new(OpdcLine::new(inst)?)))
}

fn points_of(t: &Tuple) -> Vec<IntPoint> {
    t.iter().flatten().cloned().collect()
}

/// Maps `UF1` and `UFV1` of `opdc_to_ufeopl(inst)` back to a grid certificate.
pub fn map_back_opdc(inst: &OpdcInstance, cert: &Certificate) -> Result<Certificate, PotlineError> {
    let line = OpdcLine::new(inst)?;
    let view = LineInstance::new(Flavor::Ufeopl, Arc::new(OpdcLine::new(inst)?));
    if !verify_line(&view, cert)? {
        return Err(PotlineError::UnmappableCert(format!("{} does not verify on the line", cert.kind())));
    }
    let d = inst.d();
    let mut points: Vec<IntPoint> = Vec::new();
    let mut pairs: Vec<(usize, IntPoint, IntPoint)> = Vec::new();
    match cert {
        Certificate::UF1 { x } => {
            let tx = line.decode(x).expect("a vertex decodes");
            let ty = line.decode(&view.s(x)).expect("a successor decodes");
            points.extend(points_of(&ty).into_iter().rev());
            points.extend(points_of(&tx));
        }
        Certificate::UFV1 { x, y } => {
            let tx = line.decode(x).expect("a vertex decodes");
            let ty = line.decode(y).expect("a vertex decodes");
            for j in (0..=d).rev() {
                if let (Some(p), Some(q)) = (&tx[j], &ty[j]) {
                    if p != q && j >= 1 {
                        pairs.push((j, p.clone(), q.clone()));
                    }
                }
            }
            if let Some(sx) = line.decode(&view.s(x)) {
                points.extend(points_of(&sx));
            }
            points.extend(points_of(&tx));
            points.extend(points_of(&ty));
        }
        _ => return Err(PotlineError::VariantMismatch { cert: cert.kind().into(), instance: "ufeopl".into() }),
    }
    let mut cands: Vec<Certificate> = Vec::new();
    for (j, p, q) in &pairs {
        cands.push(Certificate::OV1 { i: *j, p: p.clone(), q: q.clone() });
    }
    for p in &points {
        cands.push(Certificate::O1 { p: p.clone() });
    }
    for p in &points {
        for i in 1..=d {
            cands.push(Certificate::OV3 { i, p: p.clone() });
        }
    }
    let mut extended = points.clone();
    for p in &points {
        for i in 0..d {
            let mut q = p.clone();
            for c in q.iter_mut().take(i) {
                *c = BigUint::zero();
            }
            q[i] += 1u32;
            if inst.on_grid(&q) {
                extended.push(q);
            }
        }
    }
    for p in &extended {
        for q in &extended {
            for i in 1..=d {
                if p[i - 1] == &q[i - 1] + 1u32 && p[i..] == q[i..] {
                    cands.push(Certificate::OV2 { i, p: p.clone(), q: q.clone() });
                }
            }
        }
    }
    for (a, p) in extended.iter().enumerate() {
        for q in &extended[a + 1..] {
            for i in 1..=d {
                if p != q && p[i..] == q[i..] {
                    cands.push(Certificate::OV1 { i, p: p.clone(), q: q.clone() });
                }
            }
        }
    }
    for c in cands {
        if verify_opdc(inst, &c)? {
            return Ok(c);
        }
    }
    Err(PotlineError::UnmappableCert(format!("no grid certificate derived from {}", cert.kind())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat, RatMatrix};
    use crate::bits::b;
    use crate::circuit::{Gate, LinearFixpCircuit};
    use crate::problems::opdc::{point, TableOpdc};
    use crate::problems::TableUso;
    use crate::reductions::lcp::plcp_to_uso;
    use crate::solvers::{brute_line, brute_opdc, follow_line};
    use crate::problems::LcpInstance;

    #[test]
    fn kappa_example() {
        assert_eq!(kappa_formula(2, 2, 1, 1), vec![51, 26]);
        assert_eq!(kappa_formula(1, 2, 1, 1), vec![26]);
    }

    #[test]
    fn worked_uso_grid() {
        let lcp = LcpInstance::new(RatMatrix::from_ints(&[&[2, 1], &[1, 2]]), vec![int(-1), int(-1)]).unwrap();
        let g = uso_to_opdc(&plcp_to_uso(&lcp));
        assert_eq!(g.dirs(&point(&[0, 0])), vec![Dir::Up, Dir::Up]);
        assert_eq!(g.dirs(&point(&[1, 1])), vec![Dir::Zero, Dir::Zero]);
        let certs = brute_opdc(&g, 16).unwrap();
        assert_eq!(certs, vec![Certificate::O1 { p: point(&[1, 1]) }]);
        let uso = plcp_to_uso(&lcp);
        assert_eq!(map_back_uso_opdc(&uso, &certs[0]).unwrap(), Certificate::US1 { v: b("11") });
    }

    #[test]
    fn dash_vertex_is_all_zero() {
        let mut t = TableUso::new(1);
        t.orient.insert(b("0"), Some(b("1")));
        let u = t.into_instance();
        let g = uso_to_opdc(&u);
        let certs = brute_opdc(&g, 16).unwrap();
        assert_eq!(certs, vec![Certificate::O1 { p: point(&[1]) }]);
        assert_eq!(map_back_uso_opdc(&u, &certs[0]).unwrap(), Certificate::USV1 { v: b("1") });
    }

    #[test]
    fn one_dimensional_walk() {
        let mut t = TableOpdc::new(&[2]);
        t.set(&[0], &[Dir::Up]);
        t.set(&[1], &[Dir::Zero]);
        t.set(&[2], &[Dir::Down]);
        let g = t.into_instance();
        let ol = OpdcLine::new(&g).unwrap();
        let l = opdc_to_ufeopl(&g).unwrap();
        let s0 = l.s(&l.zero());
        let s1 = l.s(&s0);
        assert_eq!(ol.decode(&s0).unwrap(), vec![Some(point(&[1])), None]);
        assert_eq!(ol.decode(&s1).unwrap(), vec![None, Some(point(&[1]))]);
        assert_eq!(l.s(&s1), s1);
        assert_eq!(l.v(&l.zero()), BigUint::zero());
        assert_eq!(l.v(&s0), BigUint::one());
        assert!(l.v(&s1) > l.v(&s0));
        let w = follow_line(&l, &l.zero(), 16).unwrap();
        assert_eq!(w.cert, Certificate::UF1 { x: s0 });
        assert_eq!(map_back_opdc(&g, &w.cert).unwrap(), Certificate::O1 { p: point(&[1]) });
    }

    #[test]
    fn stuck_column_gives_ov2_and_ov3() {
        let mut t = TableOpdc::new(&[1]);
        t.set(&[0], &[Dir::Up]);
        t.set(&[1], &[Dir::Down]);
        let g = t.into_instance();
        let l = opdc_to_ufeopl(&g).unwrap();
        let w = follow_line(&l, &l.zero(), 16).unwrap();
        let c = map_back_opdc(&g, &w.cert).unwrap();
        assert_eq!(c, Certificate::OV2 { i: 1, p: point(&[1]), q: point(&[0]) });
        let mut t = TableOpdc::new(&[1]);
        t.set(&[0], &[Dir::Up]);
        t.set(&[1], &[Dir::Up]);
        let g = t.into_instance();
        let l = opdc_to_ufeopl(&g).unwrap();
        let w = follow_line(&l, &l.zero(), 16).unwrap();
        assert_eq!(map_back_opdc(&g, &w.cert).unwrap(), Certificate::OV3 { i: 1, p: point(&[1]) });
        let mut t = TableOpdc::new(&[1]);
        t.set(&[0], &[Dir::Down]);
        assert!(matches!(opdc_to_ufeopl(&t.into_instance()), Err(PotlineError::TrivialInstance(_))));
    }

    #[test]
    fn two_zero_points_in_a_column() {
        let mut t = TableOpdc::new(&[1, 1]);
        t.set(&[0, 0], &[Dir::Zero, Dir::Up]);
        t.set(&[1, 0], &[Dir::Zero, Dir::Up]);
        t.set(&[0, 1], &[Dir::Zero, Dir::Zero]);
        t.set(&[1, 1], &[Dir::Up, Dir::Down]);
        let g = t.into_instance();
        let l = opdc_to_ufeopl(&g).unwrap();
        for c in brute_line(&l, 1 << 12).unwrap() {
            let back = map_back_opdc(&g, &c).unwrap();
            assert!(verify_opdc(&g, &back).unwrap());
        }
    }

    #[test]
    fn contraction_grid() {
        let c = LinearFixpCircuit::affine(&RatMatrix::from_rows(vec![vec![rat(1, 2)]]).unwrap(), &[rat(1, 4)]);
        let inst = ContractionInstance::circuit(c, rat(1, 2), 1).unwrap().with_kappa(vec![2]);
        let g = contraction_to_opdc(&inst).unwrap();
        let certs = brute_opdc(&g, 64).unwrap();
        assert_eq!(certs, vec![Certificate::O1 { p: point(&[2]) }]);
        assert_eq!(map_back_contraction(&inst, &certs[0]).unwrap(), Certificate::CM1 { x: vec![rat(1, 2)] });
        let shift = LinearFixpCircuit::new(
            1,
            vec![Gate::Input(0), Gate::Const(rat(1, 2)), Gate::Add(0, 1)],
            vec![2],
        )
        .unwrap();
        let inst = ContractionInstance::circuit(shift, rat(1, 2), 1).unwrap().with_kappa(vec![1]);
        let g = contraction_to_opdc(&inst).unwrap();
        let ov3 = Certificate::OV3 { i: 1, p: point(&[2]) };
        assert!(verify_opdc(&g, &ov3).unwrap());
        assert_eq!(map_back_contraction(&inst, &ov3).unwrap(), Certificate::CMV2 { x: vec![int(1)] });
        let id = ContractionInstance::circuit(LinearFixpCircuit::identity(1), rat(1, 2), 1).unwrap().with_kappa(vec![1]);
        let g = contraction_to_opdc(&id).unwrap();
        let ov1 = Certificate::OV1 { i: 1, p: point(&[0]), q: point(&[2]) };
        assert!(matches!(map_back_contraction(&id, &ov1).unwrap(), Certificate::CMV1 { .. }));
        assert_eq!(g.d(), 1);
    }
}
