use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num::{BigUint, One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use potline::arith::{lp_power_compare, rat, sub_vec, Rational};
use potline::bits::Bits;
use potline::generators::{gen_affine, gen_line, gen_line_table, gen_lcp, gen_opdc, gen_uso, GenKind, GenSpec};
use potline::problems::{
    verify_contraction, verify_lcp, verify_line, verify_opdc, verify_uso, Certificate, ContractionInstance, Flavor,
    LcpInstance, LineInstance, TableLine,
};
use potline::reductions::lcp::{map_back_lcp, map_back_uso, plcp_to_eopl, plcp_to_uso};
use potline::reductions::line::{
    eoml_to_eopl, eopl_to_eoml, line_grid, map_back_eoml_eopl, map_back_eopl_eoml, map_back_normalize,
    map_back_plus1_ueopl, map_back_ueopl_opdc, map_back_ufeopl_plus1, normalize_potentials, plus1_to_ueopl,
    strategy_length, ueopl_to_opdc, ufeopl_to_plus1,
};
use potline::reductions::opdc::{
    contraction_to_opdc, instance_kappa, map_back_contraction, map_back_opdc, map_back_uso_opdc, opdc_to_ufeopl,
    uso_to_opdc,
};
use potline::solvers::lemke::lex_compare;
use potline::solvers::{
    aldous, approx_find_fp, brute_lcp, brute_line, brute_opdc, brute_uso, find_fp, follow_line, lcp_solutions, lemke,
    solve_line, EpsSchedule,
};
use potline::PotlineError;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

const BUDGET: u64 = 1 << 20;

fn lcp(seed: u64, d: usize, broken: bool) -> LcpInstance {
    let kind = if broken { GenKind::NonPMatrixLcp } else { GenKind::PMatrixLcp };
    gen_lcp(&GenSpec::new(kind, d, seed)).expect("lcp generator")
}

fn line(kind: GenKind, len: usize, seed: u64, flavor: Flavor) -> GenSpec {
    GenSpec::new(kind, len, seed).with_flavor(flavor)
}

fn random_gaps(seed: u64, len: usize, max: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    (0..len - 1).map(|_| rng.gen_range(1..=max)).collect()
}

/// Good sources for even seeds; plateau-broken or two-line sources for odd seeds.
fn line_source(seed: u64, len: usize, flavor: Flavor, max_gap: u64) -> LineInstance {
    let spec = match seed % 4 {
        1 => line(GenKind::ExplicitLine, len, seed, flavor).broken(),
        3 if flavor == Flavor::Ueopl || flavor == Flavor::Ufeopl || flavor == Flavor::UfeoplPlus1 => {
            line(GenKind::MultiLine, len, seed, flavor)
        }
        3 => line(GenKind::ExplicitLine, len, seed, flavor).broken(),
        _ => line(GenKind::ExplicitLine, len, seed, flavor).with_gaps(random_gaps(seed, len, max_gap)),
    };
    gen_line(&spec).expect("line generator")
}

/// Certificates of a line image: exhaustive when the cube is small, plus the walk from `0^n`.
fn line_certs(img: &LineInstance) -> Result<Vec<Certificate>, String> {
    let mut out = Vec::new();
    if img.n() <= 20 {
        out.extend(brute_line(img, BUDGET).map_err(err)?);
    }
    out.push(solve_line(img).map_err(err)?.cert);
    Ok(out)
}

/// The reduction's image, or the source certificate it answered with directly.
fn image<T>(r: Result<T, PotlineError>) -> Result<Result<T, Certificate>, String> {
    match r {
        Ok(img) => Ok(Ok(img)),
        Err(PotlineError::TrivialInstance(c)) => Ok(Err(*c)),
        Err(e) => Err(e.to_string()),
    }
}

/// Tail of the last edge of the line through `0^n`, following successors only.
fn last_edge(inst: &LineInstance) -> Bits {
    let mut x = inst.zero();
    loop {
        let sx = inst.s(&x);
        if inst.s(&sx) == sx {
            return x;
        }
        x = sx;
    }
}

/// Line table whose potential width is the number of bits of its largest potential.
fn tight(spec: &GenSpec) -> LineInstance {
    let (flavor, mut t): (Flavor, TableLine) = gen_line_table(spec).expect("line generator");
    t.m = t.v.values().map(|v| v.bits() as usize).max().unwrap_or(0).max(1);
    t.into_instance(flavor)
}

fn end_of_line(inst: &LineInstance) -> Bits {
    let mut x = inst.zero();
    loop {
        let sx = inst.s(&x);
        if sx == x || inst.p(&sx) != x {
            return x;
        }
        x = sx;
    }
}

fn run(name: &str, f: fn() -> Outcome) -> bool {
    let t = Instant::now();
    let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
        Err(format!("panic: {}", msg.unwrap_or_default()))
    });
    let secs = t.elapsed().as_secs_f64();
    match res {
        Ok(detail) => {
            println!("PASS {name} ({secs:.2}s): {detail}");
            true
        }
        Err(detail) => {
            println!("FAIL {name} ({secs:.2}s): {detail}");
            false
        }
    }
}

fn lemke_correctness() -> Outcome {
    let start = Instant::now();
    let (mut pivots, mut ties) = (0, 0);
    for seed in 0..200u64 {
        let d = 2 + (seed % 5) as usize;
        let inst = lcp(seed, d, false);
        let run = lemke(&inst);
        ensure!(matches!(run.cert, Certificate::Q1 { .. }), "seed {seed}: lemke returned {}", run.cert.kind());
        ensure!(verify_lcp(&inst, &run.cert).map_err(err)?, "seed {seed}: Q1 rejected");
        ensure!(run.z_lex_trace.len() == run.z_trace.len(), "seed {seed}: traces differ in length");
        for (k, w) in run.z_lex_trace.windows(2).enumerate() {
            ensure!(lex_compare(&w[1], &w[0]).is_lt(), "seed {seed} d={d}: z did not decrease at pivot {}", k + 1);
        }
        for (k, w) in run.z_trace.windows(2).enumerate() {
            ensure!(w[1] <= w[0], "seed {seed} d={d}: z increased at pivot {}: {} -> {}", k + 1, w[0], w[1]);
            ties += usize::from(w[1] == w[0]);
        }
        pivots += run.pivots;
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!(
        "200 instances, {pivots} pivots, perturbed z strictly decreasing, {ties} degenerate pivots with equal z, {:.2}s",
        elapsed.as_secs_f64()
    ))
}

fn brute_equivalence() -> Outcome {
    for seed in 0..200u64 {
        let d = 1 + (seed % 4) as usize;
        let inst = lcp(1000 + seed, d, false);
        let sols = lcp_solutions(&inst);
        ensure!(sols.len() == 1, "seed {seed}: {} support-enumeration solutions", sols.len());
        let Certificate::Q1 { y } = lemke(&inst).cert else {
            return Err(format!("seed {seed}: lemke did not return Q1"));
        };
        ensure!(y == sols[0], "seed {seed}: lemke {y:?} != enumeration {:?}", sols[0]);
        let brute = brute_lcp(&inst, BUDGET).map_err(err)?;
        ensure!(brute == vec![Certificate::Q1 { y }], "seed {seed}: brute_lcp disagrees");
    }
    Ok("200 instances, d in 1..=4".into())
}

fn uso_soundness() -> Outcome {
    for seed in 0..100u64 {
        let d = 1 + (seed % 4) as usize;
        let inst = lcp(2000 + seed, d, false);
        let uso = plcp_to_uso(&inst);
        let certs = brute_uso(&uso, BUDGET).map_err(err)?;
        let sinks: Vec<&Certificate> = certs.iter().filter(|c| matches!(c, Certificate::US1 { .. })).collect();
        ensure!(sinks.len() == 1, "seed {seed}: {} sinks", sinks.len());
        ensure!(certs.len() == 1, "seed {seed}: violations {:?}", certs);
        let back = map_back_uso(&inst, sinks[0]).map_err(err)?;
        ensure!(back == lemke(&inst).cert, "seed {seed}: sink maps to {back:?}");
    }
    let mut planted = 0;
    for seed in 0..24u64 {
        let d = 2 + (seed % 3) as usize;
        let inst = lcp(3000 + seed, d, true);
        let uso = plcp_to_uso(&inst);
        let mut found = false;
        for c in brute_uso(&uso, BUDGET).map_err(err)? {
            if let Certificate::USV2 { .. } = c {
                let back = map_back_uso(&inst, &c).map_err(err)?;
                ensure!(verify_lcp(&inst, &back).map_err(err)?, "seed {seed}: {back:?} rejected");
                found |= matches!(back, Certificate::PV3 { .. });
            }
        }
        ensure!(found, "planted seed {seed}: no USV2 maps back to PV3");
        planted += 1;
    }
    Ok(format!("100 P-matrix cubes with one sink, {planted} planted instances with PV3"))
}

fn line_integrity() -> Outcome {
    for seed in 0..60u64 {
        let d = 1 + (seed % 3) as usize;
        let inst = lcp(4000 + seed, d, false);
        let img = plcp_to_eopl(&inst, Flavor::Ueopl).map_err(err)?;
        ensure!(img.n() == 2 * d, "seed {seed}: {} code bits", img.n());
        let certs = brute_line(&img, BUDGET).map_err(err)?;
        let ends: Vec<&Certificate> = certs.iter().filter(|c| matches!(c, Certificate::U1 { .. })).collect();
        ensure!(ends.len() == 1, "seed {seed}: {} U1", ends.len());
        let bad = certs.iter().filter(|c| matches!(c, Certificate::UV2 { .. } | Certificate::UV3 { .. })).count();
        ensure!(bad == 0, "seed {seed}: {bad} UV2/UV3");
        let zero = img.zero();
        ensure!(img.v(&zero).is_zero(), "seed {seed}: V(0) = {}", img.v(&zero));
        let mut x = zero;
        loop {
            let sx = img.s(&x);
            if sx == x || img.p(&sx) != x {
                break;
            }
            ensure!(img.v(&sx) > img.v(&x), "seed {seed}: V does not increase at {x}");
            x = sx;
        }
        ensure!(ends[0] == &Certificate::U1 { x: x.clone() }, "seed {seed}: walk ends at {x}");
        let walk = solve_line(&img).map_err(err)?;
        ensure!(&walk.cert == ends[0], "seed {seed}: follow_line returned {:?}", walk.cert);
        ensure!(map_back_lcp(&inst, &walk.cert).map_err(err)? == lemke(&inst).cert, "seed {seed}: map-back differs");
    }
    Ok("60 instances, d in 1..=3".into())
}

fn find_fp_exactness() -> Outcome {
    let mut evals = 0;
    for seed in 0..50u64 {
        let d = 1 + (seed % 3) as usize;
        let map = gen_affine(&GenSpec::new(GenKind::ContractionCircuit, d, 5000 + seed)).map_err(err)?;
        let inst = map.instance().map_err(err)?;
        let kappa = instance_kappa(&inst).map_err(err)?;
        let (cert, stats) = find_fp(&inst, &kappa).map_err(err)?;
        let Certificate::CM1 { x } = &cert else {
            return Err(format!("seed {seed}: find_fp returned {}", cert.kind()));
        };
        ensure!(&map.eval(x) == x, "seed {seed}: f(x) != x");
        ensure!(Some(x) == map.fixpoint.as_ref(), "seed {seed}: {x:?} is not the planted fixpoint");
        ensure!(verify_contraction(&inst, &cert).map_err(err)?, "seed {seed}: CM1 rejected");
        evals += stats.evaluations;
    }
    for seed in 0..20u64 {
        let d = 1 + (seed % 3) as usize;
        let map = gen_affine(&GenSpec::new(GenKind::ContractionCircuit, d, 6000 + seed).broken()).map_err(err)?;
        let inst = map.instance().map_err(err)?;
        let kappa = instance_kappa(&inst).map_err(err)?;
        let (cert, _) = find_fp(&inst, &kappa).map_err(err)?;
        ensure!(matches!(cert, Certificate::CMV3 { .. }), "planted seed {seed}: find_fp returned {}", cert.kind());
        ensure!(verify_contraction(&inst, &cert).map_err(err)?, "planted seed {seed}: CMV3 rejected");
    }
    Ok(format!("50 exact fixpoints ({evals} evaluations), 20 planted CMV3"))
}

fn approx_residual() -> Outcome {
    let eps = rat(1, 1024);
    let mut count = 0;
    for seed in 0..50u64 {
        let d = 1 + (seed % 2) as usize;
        let p = 1 + (seed % 3) as u32;
        let map = gen_affine(&GenSpec::new(GenKind::ContractionCircuit, d, 7000 + seed).with_p(p)).map_err(err)?;
        let circuit = map.circuit.clone();
        let inst = ContractionInstance::black_box(d, move |x| circuit.eval(x), map.factor.clone(), p).map_err(err)?;
        let sched = EpsSchedule::new(eps.clone(), p, d);
        let (cert, _) = approx_find_fp(&inst, &sched).map_err(err)?;
        let Certificate::ApproxFix { x } = &cert else {
            return Err(format!("seed {seed}: approx_find_fp returned {}", cert.kind()));
        };
        let r = sub_vec(&map.eval(x), x);
        let mut bound = vec![Rational::zero(); d];
        bound[0] = eps.clone();
        ensure!(lp_power_compare(&r, &bound, p).is_le(), "seed {seed} p={p}: residual above eps");
        count += 1;
    }
    let mut checked = 0;
    for p in 1..=3u32 {
        for d in 1..=3usize {
            let sched = EpsSchedule::new(eps.clone(), p, d);
            let pr = Rational::from_integer(p.into());
            for k in 1..=d {
                let lhs: Rational = (1..k).map(|i| &pr * sched.get(i)).sum();
                let rhs = num::pow(sched.get(k).clone(), p as usize);
                ensure!(lhs <= rhs, "schedule fails at p={p} d={d} k={k}");
                ensure!(sched.progress_holds(k), "progress_holds disagrees at p={p} d={d} k={k}");
                checked += 1;
            }
        }
    }
    Ok(format!("{count} approximate fixpoints, {checked} schedule inequalities"))
}

fn mapped<F>(name: &str, seed: u64, certs: Vec<Certificate>, back: F, tally: &mut usize) -> Result<(), String>
where
    F: Fn(&Certificate) -> Result<(Certificate, bool), PotlineError>,
{
    for c in certs {
        let (b, ok) = back(&c).map_err(|e| format!("{name} seed {seed}: {} -> {e}", c.kind()))?;
        ensure!(ok, "{name} seed {seed}: {} maps to rejected {b:?}", c.kind());
        *tally += 1;
    }
    Ok(())
}

fn line_op<R, B>(name: &str, seed: u64, src: &LineInstance, reduce: R, back: B, tally: &mut usize) -> Result<(), String>
where
    R: Fn(&LineInstance) -> Result<LineInstance, PotlineError>,
    B: Fn(&LineInstance, &Certificate) -> Result<Certificate, PotlineError>,
{
    let img = match image(reduce(src)).map_err(|e| format!("{name} seed {seed}: {e}"))? {
        Ok(img) => img,
        Err(c) => {
            ensure!(verify_line(src, &c).map_err(err)?, "{name} seed {seed}: trivial certificate rejected");
            *tally += 1;
            return Ok(());
        }
    };
    let certs = line_certs(&img).map_err(|e| format!("{name} seed {seed}: {e}"))?;
    mapped(name, seed, certs, |c| back(src, c).and_then(|b| Ok((b.clone(), verify_line(src, &b)?))), tally)
}

fn map_back_soundness() -> Outcome {
    let mut report = Vec::new();
    let seeds = 0..100u64;

    let mut n = 0;
    for seed in seeds.clone() {
        let inst = lcp(8000 + seed, 2 + (seed % 3) as usize, seed % 2 == 1);
        let certs = brute_uso(&plcp_to_uso(&inst), BUDGET).map_err(err)?;
        mapped("plcp:uso", seed, certs, |c| map_back_uso(&inst, c).and_then(|b| Ok((b.clone(), verify_lcp(&inst, &b)?))), &mut n)?;
    }
    report.push(format!("plcp:uso {n}"));

    for flavor in [Flavor::Eopl, Flavor::Ueopl] {
        let mut n = 0;
        for seed in seeds.clone() {
            let inst = lcp(8100 + seed, 1 + (seed % 3) as usize, seed % 2 == 1);
            let img = plcp_to_eopl(&inst, flavor).map_err(err)?;
            let certs = line_certs(&img).map_err(|e| format!("plcp:{flavor} seed {seed}: {e}"))?;
            mapped("plcp:line", seed, certs, |c| map_back_lcp(&inst, c).and_then(|b| Ok((b.clone(), verify_lcp(&inst, &b)?))), &mut n)?;
        }
        report.push(format!("plcp:{flavor} {n}"));
    }

    let mut n = 0;
    for seed in seeds.clone() {
        let spec = GenSpec::new(GenKind::Uso, 1 + (seed % 4) as usize, 8200 + seed);
        let uso = gen_uso(&if seed % 2 == 1 { spec.broken() } else { spec }).map_err(err)?;
        let certs = brute_opdc(&uso_to_opdc(&uso), BUDGET).map_err(err)?;
        mapped("uso:opdc", seed, certs, |c| map_back_uso_opdc(&uso, c).and_then(|b| Ok((b.clone(), verify_uso(&uso, &b)?))), &mut n)?;
    }
    report.push(format!("uso:opdc {n}"));

    let mut n = 0;
    for seed in seeds.clone() {
        let d = 1 + (seed % 2) as usize;
        let spec = GenSpec::new(GenKind::ContractionCircuit, d, 8300 + seed);
        let inst = if seed % 2 == 1 {
            gen_affine(&spec.broken()).map_err(err)?.instance().map_err(err)?
        } else {
            gen_affine(&spec).map_err(err)?.instance().map_err(err)?.with_kappa(vec![3; d])
        };
        let certs = brute_opdc(&contraction_to_opdc(&inst).map_err(err)?, BUDGET).map_err(err)?;
        mapped("contraction:opdc", seed, certs, |c| {
            map_back_contraction(&inst, c).and_then(|b| Ok((b.clone(), verify_contraction(&inst, &b)?)))
        }, &mut n)?;
    }
    report.push(format!("contraction:opdc {n}"));

    let mut n = 0;
    for seed in seeds.clone() {
        let spec = GenSpec::new(GenKind::OpdcGrid, 1 + (seed % 2) as usize, 8400 + seed).with_width(2);
        let grid = gen_opdc(&if seed % 2 == 1 { spec.broken() } else { spec }).map_err(err)?;
        let certs = match image(opdc_to_ufeopl(&grid))? {
            Ok(img) => line_certs(&img).map_err(|e| format!("opdc:ufeopl seed {seed}: {e}"))?,
            Err(c) => {
                ensure!(verify_opdc(&grid, &c).map_err(err)?, "opdc:ufeopl seed {seed}: trivial certificate rejected");
                n += 1;
                continue;
            }
        };
        mapped("opdc:ufeopl", seed, certs, |c| map_back_opdc(&grid, c).and_then(|b| Ok((b.clone(), verify_opdc(&grid, &b)?))), &mut n)?;
    }
    report.push(format!("opdc:ufeopl {n}"));

    let line_ops: [(&str, Flavor, usize, u64, fn(&LineInstance) -> Result<LineInstance, PotlineError>, fn(&LineInstance, &Certificate) -> Result<Certificate, PotlineError>); 6] = [
        ("ufeopl:plus1", Flavor::Ufeopl, 5, 3, ufeopl_to_plus1, map_back_ufeopl_plus1),
        ("plus1:ueopl", Flavor::UfeoplPlus1, 3, 1, plus1_to_ueopl, map_back_plus1_ueopl),
        ("normalize", Flavor::Ueopl, 4, 2, normalize_potentials, map_back_normalize),
        ("ueopl:opdc", Flavor::Ueopl, 4, 1, |_| unreachable!(), |_, _| unreachable!()),
        ("eoml:eopl", Flavor::Eoml, 5, 1, eoml_to_eopl, map_back_eoml_eopl),
        ("eopl:eoml", Flavor::Eopl, 5, 3, eopl_to_eoml, map_back_eopl_eoml),
    ];
    for (name, flavor, len, max_gap, reduce, back) in line_ops {
        let mut n = 0;
        for seed in seeds.clone() {
            let len = 2 + (seed as usize % (len - 1));
            if name == "ueopl:opdc" {
                let len = 1 << (1 + seed % 3);
                let spec = match seed % 4 {
                    1 => line(GenKind::ExplicitLine, len.max(4), 8500 + seed, flavor).broken(),
                    3 => line(GenKind::MultiLine, len, 8500 + seed, flavor),
                    _ => line(GenKind::ExplicitLine, len, 8500 + seed, flavor),
                };
                let src = tight(&spec);
                let certs = brute_opdc(&ueopl_to_opdc(&src).map_err(err)?, BUDGET).map_err(err)?;
                mapped(name, seed, certs, |c| map_back_ueopl_opdc(&src, c).and_then(|b| Ok((b.clone(), verify_line(&src, &b)?))), &mut n)?;
            } else {
                let src = line_source(8500 + seed, len.max(3), flavor, max_gap);
                line_op(name, seed, &src, reduce, back, &mut n)?;
            }
        }
        report.push(format!("{name} {n}"));
    }
    Ok(format!("certificates mapped per op: {}", report.join(", ")))
}

fn pebbling_line() -> Outcome {
    let (mut timing, mut last_steps) = (0.0, 0);
    for k in 1..=10usize {
        let src = gen_line(&line(GenKind::ExplicitLine, 1 << k, 9000 + k as u64, Flavor::UfeoplPlus1)).map_err(err)?;
        ensure!(src.m() == k, "k={k}: source has m={}", src.m());
        let img = match image(plus1_to_ueopl(&src))? {
            Ok(img) => img,
            Err(c) => {
                ensure!(k == 1 && c == Certificate::UFP1 { x: last_edge(&src) }, "k={k}: answered directly by {c:?}");
                continue;
            }
        };
        let start = Instant::now();
        let mut x = img.zero();
        let mut steps = 0u64;
        ensure!(img.v(&x).is_zero(), "k={k}: V'(0) != 0");
        loop {
            let sx = img.s(&x);
            ensure!(img.p(&sx) == x || sx == x, "k={k} step {steps}: P'(S'(x)) != x");
            if sx == x {
                break;
            }
            ensure!(img.p(&x) == x || img.s(&img.p(&x)) == x, "k={k} step {steps}: S'(P'(x)) != x");
            ensure!(img.v(&sx) == img.v(&x) + 1u32, "k={k} step {steps}: V' does not step by 1");
            x = sx;
            steps += 1;
        }
        let elapsed = start.elapsed().as_secs_f64();
        let moves = strategy_length(src.m());
        ensure!(BigUint::from(steps) <= moves, "k={k}: {steps} steps exceed {moves}");
        ensure!(img.v(&x) == BigUint::from(steps), "k={k}: final potential differs from the step count");
        let walk = solve_line(&img).map_err(err)?;
        ensure!(walk.cert == Certificate::U1 { x: x.clone() }, "k={k}: follow_line returned {:?}", walk.cert);
        let ends: usize = if img.n() <= 16 {
            brute_line(&img, BUDGET).map_err(err)?.iter().filter(|c| matches!(c, Certificate::U1 { .. })).count()
        } else {
            1
        };
        ensure!(ends == 1, "k={k}: {ends} U1 in the image");
        let back = map_back_plus1_ueopl(&src, &walk.cert).map_err(err)?;
        ensure!(back == Certificate::UFP1 { x: last_edge(&src) }, "k={k}: U1 maps to {back:?}");
        ensure!(verify_line(&src, &back).map_err(err)?, "k={k}: mapped certificate rejected");
        if k == 10 {
            timing = elapsed;
            last_steps = steps;
            ensure!(elapsed < 10.0, "k=10 walk took {elapsed:.2}s");
        }
    }
    for k in 2..=6usize {
        let src = gen_line(&line(GenKind::ExplicitLine, 1 << k, 9100 + k as u64, Flavor::Ufeopl)).map_err(err)?;
        let plus1 = ufeopl_to_plus1(&src).map_err(err)?;
        let img = plus1_to_ueopl(&plus1).map_err(err)?;
        let walk = solve_line(&img).map_err(err)?;
        let mid = map_back_plus1_ueopl(&plus1, &walk.cert).map_err(err)?;
        let back = map_back_ufeopl_plus1(&src, &mid).map_err(err)?;
        ensure!(back == Certificate::UF1 { x: last_edge(&src) }, "ufeopl k={k}: U1 maps to {back:?}");
    }
    Ok(format!("k = 1..=10, {last_steps} moves at k=10 in {timing:.2}s; ufeopl sources map to UF1"))
}

/// All grid zeros of `ueopl_to_opdc(src)`, found by descending the blocks: each block either selects the
/// second half of its sub-line or is forced to the value that zeroes its coordinates.
fn structured_zeros(src: &LineInstance) -> Result<(Vec<Bits>, usize), String> {
    let grid = line_grid(src).map_err(err)?;
    let opdc = ueopl_to_opdc(src).map_err(err)?;
    let (w, blocks) = (src.n(), src.m().max(1));
    let mut zeros = Vec::new();
    let mut classes = 0;
    let mut stack: Vec<(usize, BigUint, Vec<Option<Bits>>)> = vec![(blocks, BigUint::zero(), vec![None; blocks])];
    while let Some((i, off, chosen)) = stack.pop() {
        if i == 0 {
            classes += 1;
            let mut p = Bits(Vec::new());
            let mut dec = src.zero();
            let mut o = BigUint::zero();
            let mut offsets = vec![BigUint::zero(); blocks];
            for b in (1..=blocks).rev() {
                offsets[b - 1] = o.clone();
                if let Some(v) = &chosen[b - 1] {
                    o = &o + (BigUint::one() << (b - 1));
                    dec = v.clone();
                }
            }
            for b in 1..=blocks {
                let block = match &chosen[b - 1] {
                    Some(v) => v.clone(),
                    None if src.v(&dec) == &offsets[b - 1] + (BigUint::one() << (b - 1)) - 1u32 => src.s(&dec),
                    None => Bits::zeros(w),
                };
                p = p.concat(&block);
            }
            let split = grid.subline(&p);
            let expect: Vec<bool> = chosen.iter().map(Option::is_some).collect();
            if split.second != expect {
                continue;
            }
            let pt: Vec<BigUint> = p.0.iter().map(|&b| BigUint::from(b as u8)).collect();
            if opdc.zero_through(&pt, opdc.d()) {
                zeros.push(p);
            }
            continue;
        }
        let mid = &off + (BigUint::one() << (i - 1));
        stack.push((i - 1, off.clone(), chosen.clone()));
        for v in Bits::all(w) {
            if src.is_vertex(&v) && src.v(&v) == mid {
                let mut c = chosen.clone();
                c[i - 1] = Some(v);
                stack.push((i - 1, mid.clone(), c));
            }
        }
    }
    Ok((zeros, classes))
}

/// Checks that no coordinate of `ueopl_to_opdc(src)` points off the grid, one representative per
/// assignment of the coordinate's own bit within each block-selection class.
fn structured_no_ov3(src: &LineInstance) -> Result<usize, String> {
    let grid = line_grid(src).map_err(err)?;
    let opdc = ueopl_to_opdc(src).map_err(err)?;
    let (w, blocks) = (src.n(), src.m().max(1));
    let mut checked = 0;
    let mut stack: Vec<(usize, BigUint, Vec<Option<Bits>>)> = vec![(blocks, BigUint::zero(), vec![None; blocks])];
    while let Some((i, off, chosen)) = stack.pop() {
        if i > 0 {
            let mid = &off + (BigUint::one() << (i - 1));
            stack.push((i - 1, off.clone(), chosen.clone()));
            for v in Bits::all(w) {
                if src.is_vertex(&v) && src.v(&v) == mid {
                    let mut c = chosen.clone();
                    c[i - 1] = Some(v);
                    stack.push((i - 1, mid.clone(), c));
                }
            }
            continue;
        }
        for b in 1..=blocks {
            if chosen[b - 1].is_some() {
                continue;
            }
            for j in 0..w {
                for here in [false, true] {
                    let reps = Bits::all(w).filter(|v| v.get(j) == here);
                    let Some(p) = reps
                        .map(|v| {
                            let mut p = Bits(Vec::new());
                            for c in 1..=blocks {
                                let block = match &chosen[c - 1] {
                                    Some(u) => u.clone(),
                                    None if c == b => v.clone(),
                                    None => Bits::zeros(w),
                                };
                                p = p.concat(&block);
                            }
                            p
                        })
                        .find(|p| grid.subline(p).second == chosen.iter().map(Option::is_some).collect::<Vec<_>>())
                    else {
                        continue;
                    };
                    let pt: Vec<BigUint> = p.0.iter().map(|&x| BigUint::from(x as u8)).collect();
                    let coord = (b - 1) * w + j + 1;
                    let dir = opdc.dir(coord, &pt);
                    let off = matches!((here, dir), (false, potline::problems::Dir::Down) | (true, potline::problems::Dir::Up));
                    ensure!(!off, "coordinate {coord} points off the grid at {p}");
                    checked += 1;
                }
            }
        }
    }
    Ok(checked)
}

/// Normalized two-line table: a main line with potentials `0..2^m` and a second line from a random
/// potential up to `2^m - 1`, both with unit steps, on random labels.
fn two_line_table(seed: u64, m: usize) -> LineInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top = (1u64 << m) - 1;
    let from = rng.gen_range(1..top);
    let total = (top + 1 + top - from + 1) as usize;
    let n = (usize::BITS - (total - 1).leading_zeros()) as usize;
    let mut labels: Vec<u64> = (1..1u64 << n).collect();
    for i in (1..labels.len()).rev() {
        labels.swap(i, rng.gen_range(0..=i));
    }
    labels.insert(0, 0);
    let mut next = labels.into_iter().map(|l| Bits::from_u64(l, n));
    let main: Vec<(Bits, u64)> = (0..=top).map(|v| (next.next().unwrap(), v)).collect();
    let second: Vec<(Bits, u64)> = (from..=top).map(|v| (next.next().unwrap(), v)).collect();
    let mut t = TableLine::from_path(n, &main, true);
    t.add_path(&second);
    t.m = m;
    t.into_instance(Flavor::Ueopl)
}

fn hardness_round_trip() -> Outcome {
    let mut notes = Vec::new();
    for k in 1..=6usize {
        for seed in 0..3u64 {
            let src = gen_line(&line(GenKind::ExplicitLine, 1 << k, 9500 + 10 * k as u64 + seed, Flavor::Ueopl)).map_err(err)?;
            let end = end_of_line(&src);
            let (zeros, classes) = structured_zeros(&src)?;
            ensure!(zeros.len() == 1, "k={k} seed {seed}: {} zeros found by descent", zeros.len());
            let grid = line_grid(&src).map_err(err)?;
            ensure!(grid.decode(&zeros[0]) == end, "k={k} seed {seed}: zero decodes to {}", grid.decode(&zeros[0]));
            let pt: Vec<BigUint> = zeros[0].0.iter().map(|&b| BigUint::from(b as u8)).collect();
            let back = map_back_ueopl_opdc(&src, &Certificate::O1 { p: pt.clone() }).map_err(err)?;
            ensure!(back == Certificate::U1 { x: end.clone() }, "k={k} seed {seed}: O1 maps to {back:?}");
            let opdc = ueopl_to_opdc(&src).map_err(err)?;
            if k <= 4 {
                let certs = brute_opdc(&opdc, BUDGET).map_err(err)?;
                let o1: Vec<&Certificate> = certs.iter().filter(|c| matches!(c, Certificate::O1 { .. })).collect();
                ensure!(o1 == vec![&Certificate::O1 { p: pt }], "k={k} seed {seed}: exhaustive scan found {o1:?}");
                let ov3 = certs.iter().filter(|c| matches!(c, Certificate::OV3 { .. })).count();
                ensure!(ov3 == 0, "k={k} seed {seed}: {ov3} OV3");
            } else {
                let reps = structured_no_ov3(&src)?;
                if seed == 0 {
                    notes.push(format!("2^{k}: {classes} block classes, {reps} off-grid checks"));
                }
            }
        }
    }
    let mut two_line = 0;
    for seed in 0..40u64 {
        let src = two_line_table(9700 + seed, 2 + (seed % 2) as usize);
        let opdc = ueopl_to_opdc(&src).map_err(err)?;
        for c in brute_opdc(&opdc, BUDGET).map_err(err)? {
            if matches!(c, Certificate::OV1 { .. } | Certificate::OV2 { .. }) {
                let back = map_back_ueopl_opdc(&src, &c).map_err(err)?;
                ensure!(matches!(back, Certificate::UV3 { .. }), "two-line seed {seed}: {} maps to {back:?}", c.kind());
                ensure!(verify_line(&src, &back).map_err(err)?, "two-line seed {seed}: UV3 rejected");
                two_line += 1;
            }
        }
    }
    ensure!(two_line > 0, "no OV1/OV2 on two-line sources");
    Ok(format!("lengths 2^1..2^6 (exhaustive up to 2^4; {}), {two_line} OV1/OV2 mapped to UV3", notes.join("; ")))
}

type LineReduction = fn(&LineInstance) -> Result<LineInstance, PotlineError>;
type LineMapBack = fn(&LineInstance, &Certificate) -> Result<Certificate, PotlineError>;

/// Applies `there` then `back_again`, walks the result, and maps the walk's certificate to `src`.
fn round_trip(
    src: &LineInstance,
    there: LineReduction,
    back_again: LineReduction,
    map_there: LineMapBack,
    map_back_again: LineMapBack,
) -> Result<Certificate, String> {
    let mid = match image(there(src))? {
        Ok(mid) => mid,
        Err(c) => return Ok(c),
    };
    let mid_cert = match image(back_again(&mid))? {
        Ok(round) => map_back_again(&mid, &solve_line(&round).map_err(err)?.cert).map_err(err)?,
        Err(c) => c,
    };
    map_there(src, &mid_cert).map_err(err)
}

fn eoml_eopl_equivalence() -> Outcome {
    let mut n = 0;
    for seed in 0..100u64 {
        let len = 3 + (seed % 5) as usize;
        let eoml = line_source(10_000 + seed, len, Flavor::Eoml, 1);
        let back = round_trip(&eoml, eoml_to_eopl, eopl_to_eoml, map_back_eoml_eopl, map_back_eopl_eoml)?;
        ensure!(verify_line(&eoml, &back).map_err(err)?, "eoml seed {seed}: {back:?} rejected");

        let eopl = line_source(11_000 + seed, len, Flavor::Eopl, 3);
        let back = round_trip(&eopl, eopl_to_eoml, eoml_to_eopl, map_back_eopl_eoml, map_back_eoml_eopl)?;
        ensure!(verify_line(&eopl, &back).map_err(err)?, "eopl seed {seed}: {back:?} rejected");
        n += 2;
    }
    Ok(format!("{n} round trips"))
}

fn aldous_agreement() -> Outcome {
    let mut lengths = Vec::new();
    for (i, len) in [2usize, 5, 16, 100, 256, 1000, 1 << 12].into_iter().enumerate() {
        let src = gen_line(&line(GenKind::ExplicitLine, len, 12_000 + i as u64, Flavor::Ueopl)).map_err(err)?;
        let follow = follow_line(&src, &src.zero(), u64::MAX).map_err(err)?;
        ensure!(matches!(follow.cert, Certificate::U1 { .. }), "len {len}: follow_line returned {:?}", follow.cert);
        for seed in 0..10u64 {
            let walk = aldous(&src, 64, seed, u64::MAX).map_err(err)?;
            ensure!(walk.cert == follow.cert, "len {len} seed {seed}: aldous returned {:?}", walk.cert);
            ensure!(walk.steps <= len as u64, "len {len} seed {seed}: {} steps", walk.steps);
        }
        lengths.push(len.to_string());
    }
    Ok(format!("lengths {} with 10 seeds each", lengths.join(", ")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("criterion 1 lemke correctness", lemke_correctness),
        ("criterion 2 brute-force equivalence", brute_equivalence),
        ("criterion 3 plcp to uso soundness", uso_soundness),
        ("criterion 4 plcp to line integrity", line_integrity),
        ("criterion 5 find_fp exactness", find_fp_exactness),
        ("criterion 6 approximate residual", approx_residual),
        ("criterion 7 map-back soundness", map_back_soundness),
        ("criterion 8 pebbling line", pebbling_line),
        ("criterion 9 hardness round trip", hardness_round_trip),
        ("criterion 10 eoml and eopl equivalence", eoml_eopl_equivalence),
        ("criterion 11 aldous agreement", aldous_agreement),
    ];
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, f) in criteria {
        if !only.is_empty() && !only.iter().any(|o| name.contains(o.as_str())) {
            continue;
        }
        if !run(name, f) {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
