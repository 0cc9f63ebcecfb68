//! Line-to-line reductions and the embedding of a normalized unique line into a grid.

use std::sync::Arc;

use num::{BigUint, One, Zero};

use crate::bits::Bits;
use crate::error::PotlineError;
use crate::problems::{
    verify_line, verify_opdc, Certificate, Dir, Flavor, IntPoint, LineInstance, LineOracle, OpdcInstance, OpdcOracle,
};

fn expect_flavor(inst: &LineInstance, want: Flavor) -> Result<(), PotlineError> {
    if inst.flavor == want {
        Ok(())
    } else {
        Err(PotlineError::VariantMismatch { cert: want.to_string(), instance: inst.flavor.to_string() })
    }
}

fn check_image(view: &LineInstance, cert: &Certificate) -> Result<(), PotlineError> {
    if verify_line(view, cert)? {
        Ok(())
    } else {
        Err(PotlineError::UnmappableCert(format!("{} does not verify on the image", cert.kind())))
    }
}

fn first_verified(src: &LineInstance, cands: Vec<Certificate>, from: &Certificate) -> Result<Certificate, PotlineError> {
    for c in cands {
        if verify_line(src, &c)? {
            return Ok(c);
        }
    }
    Err(PotlineError::UnmappableCert(format!("no source certificate derived from {}", from.kind())))
}

fn cert_points(cert: &Certificate) -> Vec<Bits> {
    use Certificate::*;
    match cert {
        R1 { x } | R2 { x } | U1 { x } | UV1 { x } | UV2 { x } | T1 { x } | T2 { x } | T3 { x } | UF1 { x }
        | UFP1 { x } | S1 { x } => vec![x.clone()],
        UV3 { x, y } | UFV1 { x, y } | UFPV1 { x, y } => vec![x.clone(), y.clone()],
        _ => vec![],
    }
}

fn dedup(xs: Vec<Bits>) -> Vec<Bits> {
    let mut out: Vec<Bits> = Vec::new();
    for x in xs {
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

fn pow2(e: usize) -> BigUint {
    BigUint::one() << e
}

/// Splits `x` into its first `n` bits and the value of the rest.
fn split(x: &Bits, n: usize) -> (Bits, BigUint) {
    (x.slice(0, n), x.slice(n, x.len()).to_biguint())
}

fn join(u: &Bits, pi: &BigUint, width: usize) -> Option<Bits> {
    Bits::from_biguint(pi, width).map(|t| u.concat(&t))
}

/// Metered line on `n + 1` bits: a fresh start `0^{n+1}` and the source embedded under a leading 1.
struct EomlToEopl {
    src: LineInstance,
}

impl EomlToEopl {
    fn lift(&self, u: Bits) -> Bits {
        Bits(vec![true]).concat(&u)
    }
}

impl LineOracle for EomlToEopl {
    fn n(&self) -> usize {
        self.src.n() + 1
    }

    fn m(&self) -> usize {
        self.src.m()
    }

    fn succ(&self, x: &Bits) -> Bits {
        if x.is_zero() {
            return self.lift(Bits::zeros(self.src.n()));
        }
        let u = x.slice(1, x.len());
        if !x.get(0) || self.src.v(&u).is_zero() {
            return x.clone();
        }
        self.lift(self.src.s(&u))
    }

    fn pred(&self, x: &Bits) -> Option<Bits> {
        if x.is_zero() || !x.get(0) {
            return Some(x.clone());
        }
        let u = x.slice(1, x.len());
        if u.is_zero() {
            return Some(Bits::zeros(x.len()));
        }
        if self.src.v(&u).is_zero() {
            return Some(x.clone());
        }
        Some(self.lift(self.src.p(&u)))
    }

    fn potential(&self, x: &Bits) -> BigUint {
        if x.get(0) {
            self.src.v(&x.slice(1, x.len()))
        } else {
            BigUint::zero()
        }
    }
}

/// Potential line from a metered line; `R1` and `R2` map back to `T1`, `T2` or `T3`.
pub fn eoml_to_eopl(inst: &LineInstance) -> Result<LineInstance, PotlineError> {
    expect_flavor(inst, Flavor::Eoml)?;
    Ok(LineInstance::new(Flavor::Eopl, Arc::new(EomlToEopl { src: inst.clone() })))
}

pub fn map_back_eoml_eopl(src: &LineInstance, cert: &Certificate) -> Result<Certificate, PotlineError> {
    let view = eoml_to_eopl(src)?;
    check_image(&view, cert)?;
    let mut us = Vec::new();
    for x in cert_points(cert) {
        let u = x.slice(1, x.len());
        us.extend([u.clone(), src.p(&u), src.s(&u), src.p(&src.p(&u))]);
    }
    let cands = dedup(us)
        .into_iter()
        .flat_map(|u| [Certificate::T1 { x: u.clone() }, Certificate::T2 { x: u.clone() }, Certificate::T3 { x: u }])
        .collect();
    first_verified(src, cands, cert)
}

/// Metered line on `n + m` bits whose low `m` bits carry the potential along inserted chains.
struct EoplToEoml {
    src: LineInstance,
    n: usize,
    m: usize,
    s0: Bits,
    ss0: Bits,
    pss: BigUint,
}

impl EoplToEoml {
    fn dummy(&self, u: &Bits, pi: &BigUint) -> bool {
        (u.is_zero() && pi.is_one()) || u == &self.s0
    }

    fn next(&self, u: &Bits, pi: &BigUint) -> Option<(Bits, BigUint)> {
        let one = BigUint::one();
        let two = BigUint::from(2u32);
        if self.dummy(u, pi) {
            return None;
        }
        if u.is_zero() {
            if pi.is_zero() {
                return Some(if self.pss == two { (self.ss0.clone(), two) } else { (u.clone(), two) });
            }
            let nxt = pi + &one;
            return if pi >= &two && nxt < self.pss {
                Some((u.clone(), nxt))
            } else if nxt == self.pss {
                Some((self.ss0.clone(), self.pss.clone()))
            } else {
                None
            };
        }
        let u2 = self.src.s(u);
        if &self.src.p(&u2) != u || &u2 == u {
            return None;
        }
        let p = self.src.v(u);
        let p2 = self.src.v(&u2);
        if pi == &p && (p2 == p || p2 == &p + &one || &p2 + &one == p) {
            return Some((u2, p2));
        }
        if p < p2 {
            if pi >= &p && pi + &one < p2 {
                Some((u.clone(), pi + &one))
            } else if pi + &one == p2 {
                Some((u2, p2))
            } else {
                None
            }
        } else if p > p2 {
            if pi <= &p && pi > &(&p2 + &one) {
                Some((u.clone(), pi - &one))
            } else if pi == &(&p2 + &one) {
                Some((u2, p2))
            } else {
                None
            }
        } else {
            None
        }
    }

    fn prev(&self, u: &Bits, pi: &BigUint) -> Option<(Bits, BigUint)> {
        let one = BigUint::one();
        let two = BigUint::from(2u32);
        if self.dummy(u, pi) {
            return None;
        }
        let origin = || Some((Bits::zeros(self.n), BigUint::zero()));
        if u.is_zero() {
            return if pi.is_zero() || (pi == &two && pi < &self.pss) {
                origin()
            } else if pi < &self.pss && pi > &two {
                Some((u.clone(), pi - &one))
            } else {
                None
            };
        }
        if u == &self.ss0 && pi == &self.pss {
            return if self.pss == two { origin() } else { Some((Bits::zeros(self.n), pi - &one)) };
        }
        let p = self.src.v(u);
        if pi == &p {
            let u2 = self.src.p(u);
            if &self.src.s(&u2) != u || &u2 == u {
                return None;
            }
            let p2 = self.src.v(&u2);
            return Some(if p2 == p {
                (u2, p2)
            } else if p2 < p {
                (u2, &p - &one)
            } else {
                (u2, &p + &one)
            });
        }
        let u2 = self.src.s(u);
        if &self.src.p(&u2) != u || &u2 == u {
            return None;
        }
        let p2 = self.src.v(&u2);
        if p < p2 && pi > &p && pi < &p2 {
            Some((u.clone(), pi - &one))
        } else if p > p2 && pi < &p && pi > &p2 {
            Some((u.clone(), pi + &one))
        } else {
            None
        }
    }

    fn apply(&self, x: &Bits, step: Option<(Bits, BigUint)>) -> Bits {
        step.and_then(|(u, pi)| join(&u, &pi, self.m)).unwrap_or_else(|| x.clone())
    }
}

impl LineOracle for EoplToEoml {
    fn n(&self) -> usize {
        self.n + self.m
    }

    fn m(&self) -> usize {
        self.m
    }

    fn succ(&self, x: &Bits) -> Bits {
        let (u, pi) = split(x, self.n);
        self.apply(x, self.next(&u, &pi))
    }

    fn pred(&self, x: &Bits) -> Option<Bits> {
        let (u, pi) = split(x, self.n);
        Some(self.apply(x, self.prev(&u, &pi)))
    }

    fn potential(&self, x: &Bits) -> BigUint {
        if x.is_zero() {
            return BigUint::one();
        }
        let (u, pi) = split(x, self.n);
        if self.next(&u, &pi).is_none() && self.prev(&u, &pi).is_none() {
            BigUint::zero()
        } else {
            pi
        }
    }
}

/// Metered line on `n + m` bits; fails with `TrivialInstance` when `0^n` or `S(0^n)` is already a solution.
pub fn eopl_to_eoml(inst: &LineInstance) -> Result<LineInstance, PotlineError> {
    expect_flavor(inst, Flavor::Eopl)?;
    let z = inst.zero();
    let s0 = inst.s(&z);
    for x in [&z, &s0] {
        for c in [Certificate::R1 { x: x.clone() }, Certificate::R2 { x: x.clone() }] {
            if verify_line(inst, &c)? {
                return Err(PotlineError::TrivialInstance(Box::new(c)));
            }
        }
    }
    let ss0 = inst.s(&s0);
    let pss = inst.v(&ss0);
    let view = EoplToEoml { src: inst.clone(), n: inst.n(), m: inst.m().max(2), s0, ss0, pss };
    Ok(LineInstance::new(Flavor::Eoml, Arc::new(view)))
}

pub fn map_back_eopl_eoml(src: &LineInstance, cert: &Certificate) -> Result<Certificate, PotlineError> {
    let view = eopl_to_eoml(src)?;
    check_image(&view, cert)?;
    let mut us = Vec::new();
    for x in cert_points(cert) {
        let u = x.slice(0, src.n());
        let pu = src.p(&u);
        us.extend([u.clone(), pu.clone(), src.p(&pu), src.s(&u)]);
    }
    let cands = dedup(us).into_iter().flat_map(|u| [Certificate::R1 { x: u.clone() }, Certificate::R2 { x: u }]).collect();
    first_verified(src, cands, cert)
}

/// Forward line on pairs `(v, i)` where every edge gains exactly one unit of potential.
struct UfToPlus1 {
    src: LineInstance,
    n: usize,
    m: usize,
}

impl UfToPlus1 {
    fn next(&self, v: &Bits, i: &BigUint) -> Option<(Bits, BigUint)> {
        let sv = self.src.s(v);
        if &sv == v {
            return None;
        }
        let t = self.src.v(v) + i + 1u32;
        let vs = self.src.v(&sv);
        if vs > t {
            Some((v.clone(), i + 1u32))
        } else if vs == t {
            Some((sv, BigUint::zero()))
        } else {
            None
        }
    }
}

impl LineOracle for UfToPlus1 {
    fn n(&self) -> usize {
        self.n + self.m
    }

    fn m(&self) -> usize {
        self.m + 1
    }

    fn succ(&self, x: &Bits) -> Bits {
        let (v, i) = split(x, self.n);
        self.next(&v, &i).and_then(|(u, j)| join(&u, &j, self.m)).unwrap_or_else(|| x.clone())
    }

    fn pred(&self, _x: &Bits) -> Option<Bits> {
        None
    }

    fn potential(&self, x: &Bits) -> BigUint {
        let (v, i) = split(x, self.n);
        match self.next(&v, &i) {
            Some(_) => self.src.v(&v) + i,
            None => BigUint::zero(),
        }
    }
}

/// Forward line whose potential rises by exactly 1 along every edge.
/// Fails with `TrivialInstance` when `0^n` itself is a `UF1`.
pub fn ufeopl_to_plus1(inst: &LineInstance) -> Result<LineInstance, PotlineError> {
    expect_flavor(inst, Flavor::Ufeopl)?;
    let start = Certificate::UF1 { x: inst.zero() };
    if verify_line(inst, &start)? {
        return Err(PotlineError::TrivialInstance(Box::new(start)));
    }
    let view = UfToPlus1 { src: inst.clone(), n: inst.n(), m: inst.m() };
    Ok(LineInstance::new(Flavor::UfeoplPlus1, Arc::new(view)))
}

pub fn map_back_ufeopl_plus1(src: &LineInstance, cert: &Certificate) -> Result<Certificate, PotlineError> {
    let view = ufeopl_to_plus1(src)?;
    check_image(&view, cert)?;
    let vs: Vec<Bits> = cert_points(cert).iter().map(|x| x.slice(0, src.n())).collect();
    let mut cands = Vec::new();
    if let [v, u] = vs.as_slice() {
        cands.push(Certificate::UFV1 { x: u.clone(), y: v.clone() });
        cands.push(Certificate::UFV1 { x: v.clone(), y: u.clone() });
    }
    let mut singles = Vec::new();
    for v in &vs {
        let sv = src.s(v);
        singles.extend([v.clone(), sv.clone(), src.s(&sv)]);
    }
    cands.extend(dedup(singles).into_iter().map(|x| Certificate::UF1 { x }));
    first_verified(src, cands, cert)
}

/// State of the pebbling game: slot `i` holds pebble `i + 1` as `(v_i, a_i)` with `a_i = V(v_i)`, or nothing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PebbleConfig {
    pub slots: Vec<Option<(Bits, BigUint)>>,
}

/// A single move of the recursive strategy: place or remove pebble `slot + 1` at relative position `pos`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PebbleMove {
    pub slot: usize,
    pub pos: BigUint,
    pub place: bool,
}

/// Number of moves `T(k) = 3 T(k-1) + 1` of the optimal strategy with `k` pebbles.
pub fn strategy_length(k: usize) -> BigUint {
    (num::pow(BigUint::from(3u32), k) - 1u32) >> 1
}

/// Move number `t` of the strategy for `k` pebbles starting at offset `o`.
pub fn strategy_move(k: usize, o: &BigUint, t: &BigUint) -> PebbleMove {
    if k == 1 {
        return PebbleMove { slot: 0, pos: o + 1u32, place: true };
    }
    let tt = strategy_length(k - 1);
    let half = pow2(k - 1);
    let back_end: BigUint = &tt * 2u32;
    if t < &tt {
        strategy_move(k - 1, o, t)
    } else if t == &tt {
        PebbleMove { slot: k - 1, pos: o + &half, place: true }
    } else if t <= &back_end {
        let mut mv = strategy_move(k - 1, o, &(&back_end - t));
        mv.place = !mv.place;
        mv
    } else {
        strategy_move(k - 1, &(o + &half), &(t - &back_end - 1u32))
    }
}

/// Step index of a configuration of relative positions, if the strategy ever reaches it.
pub fn strategy_index(o: &BigUint, pos: &[Option<BigUint>]) -> Option<BigUint> {
    let k = pos.len();
    if k == 0 {
        return Some(BigUint::zero());
    }
    let (lower, top) = pos.split_at(k - 1);
    let half = pow2(k - 1);
    match &top[0] {
        None => strategy_index(o, lower),
        Some(p) if p == &(o + &half) => {
            let mid = strategy_length(k - 1) * 2u32 + 1u32;
            if lower.iter().all(Option::is_none) {
                Some(mid)
            } else if let Some(t1) = strategy_index(o, lower) {
                Some(mid - t1)
            } else {
                strategy_index(&(o + &half), lower).map(|t2| mid + t2)
            }
        }
        Some(_) => None,
    }
}

/// Pebbling simulator turning a `+1` forward line into a line with a predecessor circuit.
pub struct Pebbling {
    src: LineInstance,
    k: usize,
    n: usize,
    m: usize,
    v0: BigUint,
    total: BigUint,
}

impl Pebbling {
    pub fn new(src: &LineInstance) -> Result<Self, PotlineError> {
        expect_flavor(src, Flavor::UfeoplPlus1)?;
        let k = src.m().max(1);
        let v0 = src.v(&src.zero());
        Ok(Pebbling { src: src.clone(), k, n: src.n(), m: src.m(), v0, total: strategy_length(k) })
    }

    pub fn pebbles(&self) -> usize {
        self.k
    }

    fn slot_width(&self) -> usize {
        1 + self.n + self.m
    }

    pub fn encode(&self, c: &PebbleConfig) -> Bits {
        let mut out = Bits(Vec::with_capacity(self.k * self.slot_width()));
        for s in &c.slots {
            match s {
                None => out = out.concat(&Bits::zeros(self.slot_width())),
                Some((v, a)) => {
                    out = out.concat(&Bits(vec![true])).concat(v);
                    out = out.concat(&Bits::from_biguint(a, self.m).expect("potential fits its width"));
                }
            }
        }
        out
    }

    /// Parses a configuration; `None` unless every present pebble sits on a vertex with its recorded potential.
    pub fn decode(&self, x: &Bits) -> Option<PebbleConfig> {
        let w = self.slot_width();
        let mut slots = Vec::with_capacity(self.k);
        for i in 0..self.k {
            let s = x.slice(i * w, (i + 1) * w);
            if !s.get(0) {
                if !s.is_zero() {
                    return None;
                }
                slots.push(None);
                continue;
            }
            let v = s.slice(1, 1 + self.n);
            let a = s.slice(1 + self.n, w).to_biguint();
            if self.src.v(&v) != a || self.src.s(&v) == v || a < self.v0 {
                return None;
            }
            slots.push(Some((v, a)));
        }
        Some(PebbleConfig { slots })
    }

    fn positions(&self, c: &PebbleConfig) -> Vec<Option<BigUint>> {
        c.slots.iter().map(|s| s.as_ref().map(|(_, a)| a - &self.v0)).collect()
    }

    /// Progress index of a configuration along the strategy.
    pub fn progress(&self, c: &PebbleConfig) -> Option<BigUint> {
        strategy_index(&BigUint::zero(), &self.positions(c))
    }

    fn support(&self, c: &PebbleConfig, pos: &BigUint) -> Option<Bits> {
        if pos.is_one() {
            return Some(self.src.zero());
        }
        let below = pos - 1u32;
        let a = &below + &self.v0;
        c.slots.iter().flatten().find(|(_, b)| b == &a).map(|(v, _)| v.clone())
    }

    fn place(&self, c: &PebbleConfig, slot: usize, pos: &BigUint) -> Option<PebbleConfig> {
        let u = self.support(c, pos)?;
        let w = self.src.s(&u);
        if w == u || self.src.s(&w) == w || self.src.v(&w) != self.src.v(&u) + 1u32 {
            return None;
        }
        let mut out = c.clone();
        let a = self.src.v(&w);
        out.slots[slot] = Some((w, a));
        Some(out)
    }

    fn remove(&self, c: &PebbleConfig, slot: usize, pos: &BigUint) -> Option<PebbleConfig> {
        let u = self.support(c, pos)?;
        let (v, _) = c.slots[slot].as_ref()?;
        if &self.src.s(&u) != v {
            return None;
        }
        let mut out = c.clone();
        out.slots[slot] = None;
        Some(out)
    }

    fn apply(&self, c: &PebbleConfig, mv: &PebbleMove, forward: bool) -> Option<PebbleConfig> {
        if mv.place == forward {
            self.place(c, mv.slot, &mv.pos)
        } else {
            self.remove(c, mv.slot, &mv.pos)
        }
    }

    pub fn next(&self, c: &PebbleConfig) -> Option<PebbleConfig> {
        let t = self.progress(c)?;
        if t >= self.total {
            return None;
        }
        self.apply(c, &strategy_move(self.k, &BigUint::zero(), &t), true)
    }

    pub fn prev(&self, c: &PebbleConfig) -> Option<PebbleConfig> {
        let t = self.progress(c)?;
        if t.is_zero() {
            return None;
        }
        self.apply(c, &strategy_move(self.k, &BigUint::zero(), &(t - 1u32)), false)
    }
}

impl LineOracle for Pebbling {
    fn n(&self) -> usize {
        self.k * self.slot_width()
    }

    fn m(&self) -> usize {
        (self.total.bits() as usize).max(1)
    }

    fn succ(&self, x: &Bits) -> Bits {
        self.decode(x).and_then(|c| self.next(&c)).map(|c| self.encode(&c)).unwrap_or_else(|| x.clone())
    }

    fn pred(&self, x: &Bits) -> Option<Bits> {
        Some(self.decode(x).and_then(|c| self.prev(&c)).map(|c| self.encode(&c)).unwrap_or_else(|| x.clone()))
    }

    fn potential(&self, x: &Bits) -> BigUint {
        self.decode(x).and_then(|c| self.progress(&c)).unwrap_or_default()
    }
}

/// Unique line whose vertices are pebbling configurations and whose potential is the progress index.
/// Fails with `TrivialInstance` when `0^n` itself is a `UFP1`.
pub fn plus1_to_ueopl(inst: &LineInstance) -> Result<LineInstance, PotlineError> {
    let peb = Pebbling::new(inst)?;
    let start = Certificate::UFP1 { x: inst.zero() };
    if verify_line(inst, &start)? {
        return Err(PotlineError::TrivialInstance(Box::new(start)));
    }
    Ok(LineInstance::new(Flavor::Ueopl, Arc::new(peb)))
}

pub fn map_back_plus1_ueopl(src: &LineInstance, cert: &Certificate) -> Result<Certificate, PotlineError> {
    let peb = Pebbling::new(src)?;
    let view = LineInstance::new(Flavor::Ueopl, Arc::new(Pebbling::new(src)?));
    check_image(&view, cert)?;
    let pts = cert_points(cert);
    let mut configs: Vec<PebbleConfig> = pts.iter().filter_map(|x| peb.decode(x)).collect();
    for x in &pts {
        configs.extend(peb.decode(&view.s(x)));
        configs.extend(peb.decode(&view.p(x)));
    }
    let mut same_slot = Vec::new();
    if let [cx, cy, ..] = configs.as_slice() {
        for (a, b) in cx.slots.iter().zip(&cy.slots) {
            if let (Some((v, _)), Some((u, _))) = (a, b) {
                if v != u {
                    same_slot.push(Certificate::UFPV1 { x: v.clone(), y: u.clone() });
                }
            }
        }
    }
    let mut verts = vec![src.zero(), src.s(&src.zero())];
    for c in &configs {
        for (v, _) in c.slots.iter().flatten() {
            verts.push(v.clone());
            verts.push(src.s(v));
        }
    }
    let verts = dedup(verts);
    let singles: Vec<Certificate> = verts.iter().map(|x| Certificate::UFP1 { x: x.clone() }).collect();
    let mut pairs = same_slot;
    for (a, x) in verts.iter().enumerate() {
        for y in &verts[a + 1..] {
            pairs.push(Certificate::UFPV1 { x: x.clone(), y: y.clone() });
        }
    }
    let cands = if matches!(cert, Certificate::U1 { .. } | Certificate::UV1 { .. }) {
        singles.into_iter().chain(pairs).collect()
    } else {
        pairs.into_iter().chain(singles).collect()
    };
    first_verified(src, cands, cert)
}

/// Unique line with `+1` edges whose ends all carry potential `2^m - 1`.
struct Normalized {
    src: LineInstance,
    n: usize,
    bits: usize,
    top: BigUint,
}

impl Normalized {
    fn is_end(&self, v: &Bits) -> bool {
        &self.src.p(&self.src.s(v)) != v
    }

    fn back(&self, v: &Bits) -> Option<(Bits, BigUint)> {
        let u = self.src.p(v);
        if &u == v || &self.src.s(&u) != v {
            return None;
        }
        let (vv, vu) = (self.src.v(v), self.src.v(&u));
        if vv <= vu {
            return None;
        }
        Some((u, vv - vu - 1u32))
    }

    fn next(&self, v: &Bits, i: &BigUint) -> Option<(Bits, BigUint)> {
        if !self.src.is_vertex(v) {
            return None;
        }
        let here = self.src.v(v) + i;
        if self.is_end(v) {
            return if here > self.top {
                None
            } else if here == self.top {
                Some((Bits::zeros(self.n), BigUint::zero()))
            } else {
                Some((v.clone(), i + 1u32))
            };
        }
        let sv = self.src.s(v);
        let vs = self.src.v(&sv);
        let t = here + 1u32;
        if vs > t {
            Some((v.clone(), i + 1u32))
        } else if vs == t {
            Some((sv, BigUint::zero()))
        } else {
            None
        }
    }

    fn prev(&self, v: &Bits, i: &BigUint) -> Option<(Bits, BigUint)> {
        if !self.src.is_vertex(v) {
            return None;
        }
        let here = self.src.v(v) + i;
        if self.is_end(v) {
            return if here > self.top {
                None
            } else if i.is_zero() {
                self.back(v)
            } else {
                Some((v.clone(), i - 1u32))
            };
        }
        if i.is_zero() {
            return self.back(v);
        }
        if self.src.v(&self.src.s(v)) < here + 1u32 {
            None
        } else {
            Some((v.clone(), i - 1u32))
        }
    }

    fn apply(&self, x: &Bits, step: Option<(Bits, BigUint)>) -> Bits {
        step.and_then(|(u, j)| join(&u, &j, self.bits)).unwrap_or_else(|| x.clone())
    }
}

impl LineOracle for Normalized {
    fn n(&self) -> usize {
        self.n + self.bits
    }

    fn m(&self) -> usize {
        self.bits
    }

    fn succ(&self, x: &Bits) -> Bits {
        let (v, i) = split(x, self.n);
        self.apply(x, self.next(&v, &i))
    }

    fn pred(&self, x: &Bits) -> Option<Bits> {
        let (v, i) = split(x, self.n);
        Some(self.apply(x, self.prev(&v, &i)))
    }

    fn potential(&self, x: &Bits) -> BigUint {
        let (v, i) = split(x, self.n);
        if self.next(&v, &i).is_none() && self.prev(&v, &i).is_none() {
            BigUint::zero()
        } else {
            self.src.v(&v) + i
        }
    }
}

/// Pads every edge to a `+1` step and extends each end of line to potential `2^m - 1`.
/// Fails with `TrivialInstance` when the first edge is already a `UV1`.
pub fn normalize_potentials(inst: &LineInstance) -> Result<LineInstance, PotlineError> {
    expect_flavor(inst, Flavor::Ueopl)?;
    let start = Certificate::UV1 { x: inst.zero() };
    if verify_line(inst, &start)? {
        return Err(PotlineError::TrivialInstance(Box::new(start)));
    }
    let bits = inst.m().max(1);
    let view = Normalized { src: inst.clone(), n: inst.n(), bits, top: pow2(bits) - 1u32 };
    Ok(LineInstance::new(Flavor::Ueopl, Arc::new(view)))
}

fn ueopl_candidates(src: &LineInstance, verts: Vec<Bits>, pairs_first: bool, cert: &Certificate) -> Result<Certificate, PotlineError> {
    let verts = dedup(verts);
    let mut singles = Vec::new();
    for x in &verts {
        singles.push(Certificate::U1 { x: x.clone() });
        singles.push(Certificate::UV1 { x: x.clone() });
        singles.push(Certificate::UV2 { x: x.clone() });
    }
    let mut pairs = Vec::new();
    for x in &verts {
        for y in &verts {
            if x != y {
                pairs.push(Certificate::UV3 { x: x.clone(), y: y.clone() });
            }
        }
    }
    let cands = if pairs_first { pairs.into_iter().chain(singles).collect() } else { singles.into_iter().chain(pairs).collect() };
    first_verified(src, cands, cert)
}

pub fn map_back_normalize(src: &LineInstance, cert: &Certificate) -> Result<Certificate, PotlineError> {
    let view = normalize_potentials(src)?;
    check_image(&view, cert)?;
    let mut verts = Vec::new();
    for x in cert_points(cert) {
        let v = x.slice(0, src.n());
        verts.extend([v.clone(), src.s(&v), src.p(&v)]);
    }
    ueopl_candidates(src, verts, matches!(cert, Certificate::UV3 { .. }), cert)
}

/// Grid `{0,1}^{wN}` read as `N` blocks of `w` bits; block `i` chooses a half of the sub-line fixed by blocks above it.
pub struct LineGrid {
    src: LineInstance,
    w: usize,
    blocks: usize,
    k: Vec<BigUint>,
}

/// Per-block split data for one point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineSplit {
    /// Potential offset of the sub-line before block `i` chooses, indexed by `i - 1`.
    pub offset: Vec<BigUint>,
    /// Whether block `i` selects the second half.
    pub second: Vec<bool>,
    /// The vertex represented by the point.
    pub decode: Bits,
}

impl LineGrid {
    pub fn block(&self, p: &Bits, i: usize) -> Bits {
        p.slice((i - 1) * self.w, i * self.w)
    }

    /// Splits the line top-down along the blocks of `p`.
    pub fn subline(&self, p: &Bits) -> LineSplit {
        let mut offset = vec![BigUint::zero(); self.blocks];
        let mut second = vec![false; self.blocks];
        let mut off = BigUint::zero();
        let mut start = self.src.zero();
        for i in (1..=self.blocks).rev() {
            offset[i - 1] = off.clone();
            let v = self.block(p, i);
            let mid = &off + pow2(i - 1);
            if self.src.is_vertex(&v) && self.src.v(&v) == mid {
                second[i - 1] = true;
                off = mid;
                start = v;
            }
        }
        LineSplit { offset, second, decode: start }
    }

    pub fn decode(&self, p: &Bits) -> Bits {
        self.subline(p).decode
    }
}

fn point_bits(p: &[BigUint]) -> Bits {
    Bits(p.iter().map(|x| !x.is_zero()).collect())
}

impl OpdcOracle for LineGrid {
    fn widths(&self) -> &[BigUint] {
        &self.k
    }

    fn direction(&self, j: usize, p: &[BigUint]) -> Dir {
        let bits = point_bits(p);
        let split = self.subline(&bits);
        let i = (j - 1) / self.w + 1;
        if split.second[i - 1] {
            return Dir::Zero;
        }
        let here = bits.get(j - 1);
        let last = &split.offset[i - 1] + pow2(i - 1) - 1u32;
        if self.src.v(&split.decode) == last {
            let target = self.src.s(&split.decode).get((j - 1) % self.w);
            match (here, target) {
                (false, true) => Dir::Up,
                (true, false) => Dir::Down,
                _ => Dir::Zero,
            }
        } else if here {
            Dir::Down
        } else {
            Dir::Zero
        }
    }
}

/// Grid instance over `{0,1}^{nm}` for a normalized unique line on `n`-bit strings with potentials below `2^m`.
pub fn ueopl_to_opdc(inst: &LineInstance) -> Result<OpdcInstance, PotlineError> {
    Ok(OpdcInstance::new(Arc::new(line_grid(inst)?)))
}

pub fn line_grid(inst: &LineInstance) -> Result<LineGrid, PotlineError> {
    expect_flavor(inst, Flavor::Ueopl)?;
    let (w, blocks) = (inst.n(), inst.m().max(1));
    Ok(LineGrid { src: inst.clone(), w, blocks, k: vec![BigUint::one(); w * blocks] })
}

pub fn map_back_ueopl_opdc(src: &LineInstance, cert: &Certificate) -> Result<Certificate, PotlineError> {
    let grid = line_grid(src)?;
    let inst = ueopl_to_opdc(src)?;
    if !verify_opdc(&inst, cert)? {
        return Err(PotlineError::UnmappableCert(format!("{} does not verify on the grid", cert.kind())));
    }
    let pts: Vec<&IntPoint> = match cert {
        Certificate::O1 { p } | Certificate::OV3 { p, .. } => vec![p],
        Certificate::OV1 { p, q, .. } | Certificate::OV2 { p, q, .. } => vec![p, q],
        _ => return Err(PotlineError::VariantMismatch { cert: cert.kind().into(), instance: "opdc".into() }),
    };
    let mut verts = Vec::new();
    for p in &pts {
        let bits = point_bits(p);
        let dec = grid.decode(&bits);
        verts.push(src.s(&dec));
        verts.push(dec);
    }
    for p in &pts {
        let bits = point_bits(p);
        verts.extend((1..=grid.blocks).map(|i| grid.block(&bits, i)));
    }
    ueopl_candidates(src, verts, !matches!(cert, Certificate::O1 { .. }), cert)
}
