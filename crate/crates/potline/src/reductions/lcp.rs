//! P-LCP to unique sink orientations and to end-of-potential-line instances.

use std::cmp::Ordering;
use std::sync::Arc;

use num::{BigInt, BigUint, One, Signed, Zero};

use crate::arith::{lcm_of_denominators, lex_sign, RatVector, Rational};
use crate::bits::Bits;
use crate::error::PotlineError;
use crate::problems::{
    verify_lcp, verify_line, verify_uso, Certificate, Family, Flavor, LcpInstance, LineInstance, LineOracle,
    UsoInstance, UsoOracle,
};
use crate::solvers::lemke::{lex_compare, nonpositive_minor, Basis, LemkeSystem, Step, Var};

/// `out(alpha)`: `None` stands for the dash symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutMap {
    pub alpha: Vec<usize>,
    pub result: Option<Bits>,
}

/// Characteristic vector of `alpha` in `{0,1}^d`.
pub fn chi(alpha: &[usize], d: usize) -> Bits {
    let mut b = Bits::zeros(d);
    for &i in alpha {
        b.set(i, true);
    }
    b
}

fn alpha_of(v: &Bits) -> Vec<usize> {
    v.ones()
}

fn complementary_vars(alpha: &[usize], d: usize) -> Vec<Var> {
    (0..d).map(|i| if alpha.contains(&i) { Var::Y(i) } else { Var::W(i) }).collect()
}

/// Sign pattern of `A_alpha^-1 [q | I]`, one bit per row that is lexicographically negative.
pub fn out_map(inst: &LcpInstance, alpha: &[usize]) -> OutMap {
    let sys = LemkeSystem::new(inst);
    out_map_with(&sys, alpha)
}

fn out_map_with(sys: &LemkeSystem, alpha: &[usize]) -> OutMap {
    let d = sys.d();
    let result = sys.basis(complementary_vars(alpha, d)).map(|b| {
        Bits((0..d).map(|r| lex_sign(&sys.lex_row(&b, r)) == num::bigint::Sign::Minus).collect())
    });
    OutMap { alpha: alpha.to_vec(), result }
}

struct LcpUso {
    sys: LemkeSystem,
}

impl UsoOracle for LcpUso {
    fn n(&self) -> usize {
        self.sys.d()
    }

    fn orient(&self, v: &Bits) -> Option<Bits> {
        out_map_with(&self.sys, &alpha_of(v)).result
    }
}

/// Cube orientation `Psi(v) = out(alpha(v))`.
pub fn plcp_to_uso(inst: &LcpInstance) -> UsoInstance {
    UsoInstance::new(Arc::new(LcpUso { sys: LemkeSystem::new(inst) }))
}

/// Maps `US1`, `USV1` and `USV2` of `plcp_to_uso(inst)` back to `Q1`, `PV1` and `PV3`.
pub fn map_back_uso(inst: &LcpInstance, cert: &Certificate) -> Result<Certificate, PotlineError> {
    let uso = plcp_to_uso(inst);
    if !verify_uso(&uso, cert)? {
        return Err(PotlineError::UnmappableCert(format!("{} does not verify on the cube", cert.kind())));
    }
    let sys = LemkeSystem::new(inst);
    let out = match cert {
        Certificate::US1 { v } => {
            let alpha = alpha_of(v);
            let b = sys.basis(complementary_vars(&alpha, sys.d())).expect("sink has a defined outmap");
            Certificate::Q1 { y: sys.point(&b).y }
        }
        Certificate::USV1 { v } => Certificate::PV1 { alpha: alpha_of(v) },
        Certificate::USV2 { v, u } => Certificate::PV3 { alpha: alpha_of(v), beta: alpha_of(u) },
        _ => unreachable!("verified above"),
    };
    checked(inst, out)
}

fn checked(inst: &LcpInstance, cert: Certificate) -> Result<Certificate, PotlineError> {
    if verify_lcp(inst, &cert)? {
        Ok(cert)
    } else {
        Err(PotlineError::UnmappableCert(format!("mapped {} does not verify", cert.kind())))
    }
}

fn factorial(n: usize) -> BigUint {
    (1..=n as u64).map(BigUint::from).product::<BigUint>().max(BigUint::one())
}

/// Decoded meaning of a `2d`-bit code.
#[derive(Debug, Clone)]
pub enum Code {
    Start,
    Invalid,
    Vertex(Basis),
}

/// Line view of the Lemke path. Bits `0..d` select `y_i` basic, bits `d..2d` mark the duplicate label.
pub struct LemkeLine {
    sys: LemkeSystem,
    start: Basis,
    start_code: Bits,
    /// `(2d)! I_max^(2d+1) + 1`.
    pub delta: BigUint,
    scale: BigInt,
    weights: Vec<BigInt>,
    top: BigInt,
    m: usize,
}

impl LemkeLine {
    /// Fails with `TrivialInstance(Q1(0))` when `q >= 0`.
    pub fn new(inst: &LcpInstance) -> Result<Self, PotlineError> {
        let d = inst.d();
        if inst.q.iter().all(|x| !x.is_negative()) {
            return Err(PotlineError::TrivialInstance(Box::new(Certificate::Q1 { y: vec![Rational::zero(); d] })));
        }
        let sys = LemkeSystem::new(inst);
        let scale = lcm_of_denominators(inst.m.entries().chain(&inst.q));
        let scaled_max = inst
            .m
            .entries()
            .chain(&inst.q)
            .map(|x| (x * Rational::from_integer(scale.clone())).to_integer().abs())
            .max()
            .unwrap_or_default()
            .max(BigInt::one());
        let i_max = scaled_max.to_biguint().expect("nonnegative");
        let delta = factorial(2 * d) * num::pow(i_max, 2 * d + 1) + 1u32;
        let di = BigInt::from(delta.clone());
        let eps_inv = BigInt::from(4u32) * num::pow(di.clone(), 3);
        let g = BigInt::from(3u32) * &di * &di * num::pow(eps_inv.clone(), d);
        let weights: Vec<BigInt> = (0..=d).map(|j| BigInt::from(3u32) * &di * &di * num::pow(eps_inv.clone(), d - j)).collect();
        let top = g * BigInt::from(2u32) * &di;
        let m = top.bits() as usize + 1;
        let start = sys.initial_basis();
        let mut line = LemkeLine { sys, start_code: Bits::zeros(2 * d), start, delta, scale, weights, top, m };
        line.start_code = line.encode(&line.start.clone());
        Ok(line)
    }

    pub fn system(&self) -> &LemkeSystem {
        &self.sys
    }

    pub fn d(&self) -> usize {
        self.sys.d()
    }

    /// Code of a basis: `z` basic gives a duplicate-label code, otherwise a complementary code.
    pub fn encode(&self, b: &Basis) -> Bits {
        let d = self.d();
        let mut x = Bits::zeros(2 * d);
        for i in 0..d {
            x.set(i, b.vars.contains(&Var::Y(i)));
        }
        if b.vars.contains(&Var::Z) {
            let l = self.sys.duplicate_label(b).expect("z basic leaves one label uncovered");
            x.set(l, true);
            x.set(d + l, true);
        }
        x
    }

    pub fn decode(&self, x: &Bits) -> Code {
        let d = self.d();
        if x.is_zero() {
            return Code::Start;
        }
        let dup: Vec<usize> = (0..d).filter(|&i| x.get(d + i)).collect();
        if dup.len() > 1 {
            return Code::Invalid;
        }
        let l = dup.first().copied();
        if let Some(l) = l {
            if !x.get(l) {
                return Code::Invalid;
            }
        }
        let vars: Vec<Var> = (0..d)
            .map(|i| {
                if Some(i) == l {
                    Var::Z
                } else if x.get(i) {
                    Var::Y(i)
                } else {
                    Var::W(i)
                }
            })
            .collect();
        match self.sys.basis(vars) {
            Some(b) if self.sys.lex_feasible(&b) => Code::Vertex(b),
            _ => Code::Invalid,
        }
    }

    fn after(&self, b: &Basis, entering: Var, want: Ordering) -> Option<Basis> {
        match self.sys.pivot(b, entering) {
            Step::Ray(_) => None,
            Step::Vertex { basis, .. } => {
                (lex_compare(&self.sys.z_lex(&basis), &self.sys.z_lex(b)) == want).then_some(basis)
            }
        }
    }

    fn succ_code(&self, x: &Bits) -> Bits {
        match self.decode(x) {
            Code::Start => self.start_code.clone(),
            Code::Invalid => x.clone(),
            Code::Vertex(b) => match self.sys.forward_entering(&b) {
                Some(e) => self.after(&b, e, Ordering::Less).map_or_else(|| x.clone(), |n| self.encode(&n)),
                None => x.clone(),
            },
        }
    }

    fn pred_code(&self, x: &Bits) -> Bits {
        match self.decode(x) {
            Code::Start => x.clone(),
            Code::Invalid => x.clone(),
            Code::Vertex(b) => {
                if x == &self.start_code {
                    return Bits::zeros(x.len());
                }
                let back = match self.sys.forward_entering(&b) {
                    Some(e) => e.complement(),
                    None if !self.sys.z_edge_outgoing(&b) => Var::Z,
                    None => return x.clone(),
                };
                self.after(&b, back, Ordering::Greater).map_or_else(|| x.clone(), |n| self.encode(&n))
            }
        }
    }

    /// Potential `floor(G (2 Delta - z_eps))` where `z_eps` is the perturbed covering variable
    /// of the integer-scaled system evaluated at `eps = 1 / (4 Delta^3)`.
    pub fn potential_of(&self, b: &Basis) -> BigUint {
        let zl = self.sys.z_lex(b);
        let mut acc = Rational::from_integer(self.top.clone());
        for (j, a) in zl.iter().enumerate() {
            let a = if j == 0 { a * Rational::from_integer(self.scale.clone()) } else { a.clone() };
            acc -= a * Rational::from_integer(self.weights[j].clone());
        }
        acc.floor().to_integer().to_biguint().unwrap_or_default()
    }
}

impl LineOracle for LemkeLine {
    fn n(&self) -> usize {
        2 * self.d()
    }

    fn m(&self) -> usize {
        self.m
    }

    fn succ(&self, x: &Bits) -> Bits {
        self.succ_code(x)
    }

    fn pred(&self, x: &Bits) -> Option<Bits> {
        Some(self.pred_code(x))
    }

    fn potential(&self, x: &Bits) -> BigUint {
        match self.decode(x) {
            Code::Vertex(b) => self.potential_of(&b),
            _ => BigUint::zero(),
        }
    }
}

/// Line instance of the lexicographic Lemke path, with flavor `Eopl` or `Ueopl`.
pub fn plcp_to_eopl(inst: &LcpInstance, flavor: Flavor) -> Result<LineInstance, PotlineError> {
    if !matches!(flavor, Flavor::Eopl | Flavor::Ueopl) {
        return Err(PotlineError::BadChain(format!("plcp cannot target {flavor}")));
    }
    Ok(LineInstance::new(flavor, Arc::new(LemkeLine::new(inst)?)))
}

/// `x` with `x_i (Mx)_i <= 0` for every `i`, built from the two edges at a duplicate-label vertex.
fn edge_pair_vector(sys: &LemkeSystem, b: &Basis) -> Option<RatVector> {
    let l = sys.duplicate_label(b)?;
    let s1 = sys.direction(b, Var::Y(l));
    let s2 = sys.direction(b, Var::W(l));
    if s1.z.is_zero() {
        return Some(s1.y);
    }
    if s2.z.is_zero() {
        return Some(s2.y);
    }
    if s1.z.is_positive() != s2.z.is_positive() {
        return None;
    }
    let (a, c) = (s1.z.abs().recip(), s2.z.abs().recip());
    Some(s1.y.iter().zip(&s2.y).map(|(u, v)| u * &a - v * &c).collect())
}

fn sub(a: &[Rational], b: &[Rational]) -> RatVector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn nonzero(v: &[Rational]) -> bool {
    v.iter().any(|x| !x.is_zero())
}

/// Point of the Lemke path structure at code `x`: `(y, z)`, with the start code at `z = +inf` on `y = 0`.
fn point_of(line: &LemkeLine, x: &Bits) -> Option<(RatVector, Option<Rational>)> {
    match line.decode(x) {
        Code::Start => Some((vec![Rational::zero(); line.d()], None)),
        Code::Invalid => None,
        Code::Vertex(b) => {
            let p = line.sys.point(&b);
            Some((p.y, Some(p.z)))
        }
    }
}

/// `y` on the edge `u -> S(u)` where the covering variable equals `z`.
fn edge_point_at(line: &LemkeLine, u: &Bits, z: &Rational) -> Option<RatVector> {
    let (yu, zu) = point_of(line, u)?;
    let (ys, zs) = point_of(line, &line.succ_code(u))?;
    let zs = zs?;
    let Some(zu) = zu else { return Some(vec![Rational::zero(); line.d()]) };
    if zu == zs {
        return (&zu == z).then_some(yu);
    }
    let t = (z - &zu) / (&zs - &zu);
    Some(yu.iter().zip(&ys).map(|(a, b)| a + (b - a) * &t).collect())
}

fn line_candidates(line: &LemkeLine, cert: &Certificate) -> Vec<Certificate> {
    use Certificate::*;
    let sys = &line.sys;
    let mut out = Vec::new();
    let at_vertex = |x: &Bits, out: &mut Vec<Certificate>| {
        let Code::Vertex(b) = line.decode(x) else { return };
        let p = sys.point(&b);
        if !b.vars.contains(&Var::Z) {
            out.push(Q1 { y: p.y });
            return;
        }
        if let Some(v) = edge_pair_vector(sys, &b) {
            if nonzero(&v) {
                out.push(PV2 { x: v });
            }
        }
        for e in [Var::Y(sys.duplicate_label(&b).unwrap()), Var::W(sys.duplicate_label(&b).unwrap())] {
            if let Step::Ray(dir) = sys.pivot(&b, e) {
                if nonzero(&dir.y) {
                    out.push(PV2 { x: dir.y.clone() });
                }
                out.push(SecondaryRay { y: p.y.clone(), z: p.z.clone(), dy: dir.y, dz: dir.z });
            }
        }
    };
    match cert {
        R1 { x } | U1 { x } | UV2 { x } | R2 { x } | UV1 { x } => {
            at_vertex(x, &mut out);
            let s = line.succ_code(x);
            at_vertex(&s, &mut out);
            if let (Some((yx, Some(zx))), Some((ys, Some(zs)))) = (point_of(line, x), point_of(line, &s)) {
                if zx == zs && nonzero(&sub(&yx, &ys)) {
                    out.push(PV2 { x: sub(&yx, &ys) });
                }
            }
        }
        UV3 { x, y } => {
            if let (Some((yx, zx)), Some((yy, zy))) = (point_of(line, x), point_of(line, y)) {
                if zx == zy {
                    out.push(PV2 { x: sub(&yx, &yy) });
                }
                if let Some(zy) = &zy {
                    if let Some(e) = edge_point_at(line, x, zy) {
                        out.push(PV2 { x: sub(&e, &yy) });
                    }
                }
                if let (None, Some(_)) = (&zx, &zy) {
                    out.push(PV2 { x: yy.clone() });
                }
            }
            at_vertex(x, &mut out);
            at_vertex(y, &mut out);
        }
        _ => {}
    }
    out
}

/// Maps a verified certificate of `plcp_to_eopl(inst)` or `plcp_to_uso(inst)` back to the LCP.
pub fn map_back_lcp(inst: &LcpInstance, cert: &Certificate) -> Result<Certificate, PotlineError> {
    if cert.family() == Family::Uso {
        return map_back_uso(inst, cert);
    }
    let line = LemkeLine::new(inst)?;
    let flavor = match cert {
        Certificate::R1 { .. } | Certificate::R2 { .. } => Flavor::Eopl,
        _ => Flavor::Ueopl,
    };
    let view = LineInstance::new(flavor, Arc::new(LemkeLine::new(inst)?));
    if !verify_line(&view, cert)? {
        return Err(PotlineError::UnmappableCert(format!("{} does not verify on the line", cert.kind())));
    }
    for c in line_candidates(&line, cert) {
        if verify_lcp(inst, &c)? {
            return Ok(c);
        }
    }
    let all: Vec<usize> = (0..inst.d()).collect();
    if let Some(alpha) = nonpositive_minor(&inst.m, &all) {
        return Ok(Certificate::PV1 { alpha });
    }
    Err(PotlineError::UnmappableCert(format!("no LCP certificate derived from {}", cert.kind())))
}

/// Number of bits of the potential range of the line view, for diagnostics.
pub fn potential_bits(inst: &LcpInstance) -> Result<usize, PotlineError> {
    Ok(LemkeLine::new(inst)?.m)
}
