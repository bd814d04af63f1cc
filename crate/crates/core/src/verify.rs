//! Seeded property suites over every module. Failures are data: each one
//! names the case, the inputs and the expected and actual values.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fgl::{check_invariance, FormalGroupLaw, InvariantForm};
use crate::legendre;
use crate::ring::{Elem, RingSpec};
use crate::series::TruncatedSeries;
use crate::witt::cartier::{
    attainable_length, cartier_apply_to, cartier_normalize, cartier_normalize_with, CartierElement, CartierExpr,
    RewriteOrder,
};
use crate::witt::lambda::{check_exactness, example_sequences};
use crate::witt::universal::{derive_universal_polynomials, UniversalOp};
use crate::witt::{
    frobenius, frobenius_ghost, ghost, teichmuller, teichmuller_action, verschiebung_to, witt_add, witt_mul,
    witt_mul_ghost, witt_scalar, WittVector,
};

pub const DEFAULT_SEED: u64 = 0x5eed;

/// Suite names accepted by [`verify`], in run order.
pub const SUITES: &[&str] =
    &["rings", "series", "fgl", "witt", "relations", "teichmuller", "universal", "cartier", "lambda", "legendre"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub case: String,
    pub inputs: String,
    pub expected: String,
    pub actual: String,
}

impl Failure {
    pub fn to_json(&self) -> Value {
        json!({"case": self.case, "inputs": self.inputs, "expected": self.expected, "actual": self.actual})
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub name: String,
    pub cases: usize,
    pub failures: Vec<Failure>,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub seed: u64,
    pub suites: Vec<SuiteReport>,
}

impl VerificationReport {
    pub fn ok(&self) -> bool {
        self.suites.iter().all(|s| s.failures.is_empty())
    }

    pub fn cases(&self) -> usize {
        self.suites.iter().map(|s| s.cases).sum()
    }

    pub fn failures(&self) -> impl Iterator<Item = &Failure> {
        self.suites.iter().flat_map(|s| &s.failures)
    }

    pub fn elapsed(&self) -> Duration {
        self.suites.iter().map(|s| s.elapsed).sum()
    }

    /// Wall times are included only on request, so that the default output
    /// is identical across runs with one seed.
    pub fn to_json(&self, timing: bool) -> Value {
        let suites: Vec<Value> = self
            .suites
            .iter()
            .map(|s| {
                let mut v = json!({
                    "name": s.name,
                    "cases": s.cases,
                    "failures": s.failures.iter().map(Failure::to_json).collect::<Vec<_>>(),
                });
                if timing {
                    v["elapsed_ms"] = json!(s.elapsed.as_millis() as u64);
                }
                v
            })
            .collect();
        let mut v = json!({"seed": self.seed, "ok": self.ok(), "cases": self.cases(), "suites": suites});
        if timing {
            v["elapsed_ms"] = json!(self.elapsed().as_millis() as u64);
        }
        v
    }
}

/// The Witt-vector operators the relation suite is written against. The
/// defaults call the library; tests substitute faulty versions to confirm
/// that the suite notices.
pub trait WittOps: Sync {
    fn verschiebung(&self, n: u32, a: &WittVector, k_out: usize) -> Result<WittVector> {
        verschiebung_to(n, a, k_out)
    }
    fn frobenius(&self, n: u32, a: &WittVector) -> Result<WittVector> {
        frobenius(n, a)
    }
    fn teichmuller(&self, c: &Elem, a: &WittVector) -> WittVector {
        teichmuller_action(c, a)
    }
    fn scalar(&self, n: i64, a: &WittVector) -> WittVector {
        witt_scalar(n, a)
    }
}

pub struct LibraryOps;

impl WittOps for LibraryOps {}

struct Collector {
    name: String,
    cases: usize,
    failures: Vec<Failure>,
}

impl Collector {
    fn new(name: &str) -> Self {
        Collector { name: name.into(), cases: 0, failures: Vec::new() }
    }

    fn eq<T: PartialEq>(&mut self, case: &str, inputs: impl FnOnce() -> String, expected: &T, actual: &T, show: impl Fn(&T) -> String) {
        self.cases += 1;
        if expected != actual {
            self.failures.push(Failure { case: case.into(), inputs: inputs(), expected: show(expected), actual: show(actual) });
        }
    }

    fn truth(&mut self, case: &str, inputs: impl FnOnce() -> String, ok: bool) {
        self.eq(case, inputs, &true, &ok, |b| b.to_string());
    }

    fn ok<T>(&mut self, case: &str, inputs: impl FnOnce() -> String, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.cases += 1;
                self.failures.push(Failure { case: case.into(), inputs: inputs(), expected: "success".into(), actual: e.to_string() });
                None
            }
        }
    }

    fn finish(self, start: Instant) -> SuiteReport {
        SuiteReport { name: self.name, cases: self.cases, failures: self.failures, elapsed: start.elapsed() }
    }
}

/// Runs every suite with the library operators.
pub fn verify_all(seed: u64) -> VerificationReport {
    verify(seed, None, &LibraryOps).expect("all suite names are known")
}

/// Runs the named suites (all when `None`). Each suite gets its own
/// generator derived from `seed`, so filtering does not change results.
pub fn verify(seed: u64, suites: Option<&[String]>, ops: &dyn WittOps) -> Result<VerificationReport> {
    let names: Vec<&str> = match suites {
        None => SUITES.to_vec(),
        Some(list) => {
            for s in list {
                if !SUITES.contains(&s.as_str()) {
                    return Err(Error::Invalid(format!("unknown suite `{s}`; expected one of {}", SUITES.join(", "))));
                }
            }
            SUITES.iter().copied().filter(|s| list.iter().any(|l| l == s)).collect()
        }
    };
    let mut out = Vec::new();
    for (i, name) in SUITES.iter().enumerate() {
        if !names.contains(name) {
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
        let start = Instant::now();
        let mut c = Collector::new(name);
        match *name {
            "rings" => rings_suite(&mut c, &mut rng),
            "series" => series_suite(&mut c, &mut rng),
            "fgl" => fgl_suite(&mut c, &mut rng),
            "witt" => witt_suite(&mut c, &mut rng),
            "relations" => {
                for ring in [RingSpec::Integers, RingSpec::integers_mod(360)?] {
                    relation_suite(&mut c, &mut rng, ops, &ring, 12, 6, 100);
                }
            }
            "teichmuller" => teichmuller_suite(&mut c, &mut rng),
            "universal" => universal_suite(&mut c, &mut rng),
            "cartier" => cartier_suite(&mut c, &mut rng),
            "lambda" => lambda_suite(&mut c),
            "legendre" => legendre_suite(&mut c),
            _ => unreachable!(),
        }
        out.push(c.finish(start));
    }
    Ok(VerificationReport { seed, suites: out })
}

/// The relation suite alone, with its size exposed: `vectors` random
/// length-`k` vectors over `ring`, all indices up to `max_index`.
pub fn relation_report(
    seed: u64,
    ring: &RingSpec,
    k: usize,
    max_index: u32,
    vectors: usize,
    ops: &dyn WittOps,
) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = Instant::now();
    let mut c = Collector::new("relations");
    relation_suite(&mut c, &mut rng, ops, ring, k, max_index, vectors);
    c.finish(start)
}

fn rand_elem(rng: &mut ChaCha8Rng, ring: &RingSpec, bound: i64) -> Elem {
    match ring {
        RingSpec::Rationals => {
            let n = rng.gen_range(-bound..=bound);
            let d = rng.gen_range(1..=bound.max(1));
            crate::value::rational(n, d)
        }
        RingSpec::Polynomial(base, _) => {
            let deg = rng.gen_range(0..3);
            let coeffs = (0..=deg).map(|_| rand_elem(rng, base, bound)).collect();
            ring.canonicalize(&Elem::Poly(coeffs)).expect("canonical")
        }
        _ => ring.from_int(rng.gen_range(-bound..=bound)),
    }
}

fn rand_witt(rng: &mut ChaCha8Rng, ring: &RingSpec, k: usize, bound: i64) -> WittVector {
    let b = (0..k).map(|_| rand_elem(rng, ring, bound)).collect();
    WittVector::from_coeffs(ring, b).expect("length >= 1")
}

fn show_elems(r: &RingSpec) -> impl Fn(&Vec<Elem>) -> String + '_ {
    move |v| format!("({})", v.iter().map(|x| r.format(x)).collect::<Vec<_>>().join(", "))
}

fn rings_suite(c: &mut Collector, rng: &mut ChaCha8Rng) {
    for m in 2..=12i64 {
        let r = RingSpec::integers_mod(m).expect("m >= 2");
        let el: Vec<Elem> = (0..m).map(|i| r.from_int(i)).collect();
        let mut ok = true;
        for a in &el {
            for b in &el {
                ok &= r.add(a, b) == r.add(b, a) && r.mul(a, b) == r.mul(b, a);
                for x in &el {
                    ok &= r.add(&r.add(a, b), x) == r.add(a, &r.add(b, x));
                    ok &= r.mul(&r.mul(a, b), x) == r.mul(a, &r.mul(b, x));
                    ok &= r.mul(a, &r.add(b, x)) == r.add(&r.mul(a, b), &r.mul(a, x));
                }
            }
            ok &= r.add(a, &r.zero()) == *a && r.mul(a, &r.one()) == *a && r.is_zero(&r.add(a, &r.neg(a)));
        }
        c.truth("ring axioms, exhaustive", || format!("Z/{m}"), ok);
    }
    let specs = ["Z", "Q", "Z/360", "Z[l]", "Q[l]"].map(|s| RingSpec::parse(s).expect("valid"));
    for r in &specs {
        for _ in 0..50 {
            let (a, b, x) = (rand_elem(rng, r, 30), rand_elem(rng, r, 30), rand_elem(rng, r, 30));
            let inputs = || format!("{r}: {}, {}, {}", r.format(&a), r.format(&b), r.format(&x));
            let ok = r.mul(&r.mul(&a, &b), &x) == r.mul(&a, &r.mul(&b, &x))
                && r.mul(&a, &r.add(&b, &x)) == r.add(&r.mul(&a, &b), &r.mul(&a, &x))
                && r.add(&a, &b) == r.add(&b, &a)
                && r.canonicalize(&a).as_ref() == Ok(&a);
            c.truth("ring axioms, random", inputs, ok);
        }
    }
    for _ in 0..50 {
        let m: i64 = rng.gen_range(2..100);
        let (a, b) = (rng.gen_range(-1000..1000i64), rng.gen_range(-1000..1000i64));
        let r = RingSpec::integers_mod(m).expect("m >= 2");
        let ok = r.from_int(a + b) == r.add(&r.from_int(a), &r.from_int(b))
            && r.from_int(a * b) == r.mul(&r.from_int(a), &r.from_int(b));
        c.truth("reduction Z -> Z/m is a homomorphism", || format!("{a}, {b} mod {m}"), ok);
    }
}

fn rand_series(rng: &mut ChaCha8Rng, ring: &RingSpec, trunc: u32, constant: Option<Elem>) -> TruncatedSeries {
    let mut coeffs: Vec<Elem> = (0..=trunc).map(|_| rand_elem(rng, ring, 9)).collect();
    if let Some(c0) = constant {
        coeffs[0] = c0;
    }
    TruncatedSeries::univariate(ring, "x", trunc, coeffs).expect("valid")
}

fn series_suite(c: &mut Collector, rng: &mut ChaCha8Rng) {
    let show = |s: &TruncatedSeries| s.to_string();
    for ring in [RingSpec::Rationals, RingSpec::integers_mod(7).expect("valid")] {
        for _ in 0..20 {
            let n = rng.gen_range(2..=8);
            let (a, b, d) = (rand_series(rng, &ring, n, None), rand_series(rng, &ring, n, None), rand_series(rng, &ring, n, None));
            let inputs = || format!("{a}; {b}; {d}");
            c.eq("series product is associative", inputs, &a.mul(&b).and_then(|ab| ab.mul(&d)).ok(), &b.mul(&d).and_then(|bd| a.mul(&bd)).ok(), |s| format!("{s:?}"));
            c.eq("series product is commutative", || format!("{a}; {b}"), &a.mul(&b).ok(), &b.mul(&a).ok(), |s| format!("{s:?}"));
            let f = rand_series(rng, &ring, n, Some(ring.zero()));
            let mut g = rand_series(rng, &ring, n, Some(ring.zero()));
            let h = rand_series(rng, &ring, n, Some(ring.zero()));
            let fgh1 = f.compose(&[g.clone()]).and_then(|fg| fg.compose(std::slice::from_ref(&h)));
            let fgh2 = g.compose(std::slice::from_ref(&h)).and_then(|gh| f.compose(&[gh]));
            c.eq("composition is associative", || format!("{f}; {g}; {h}"), &fgh1.ok(), &fgh2.ok(), |s| format!("{s:?}"));
            // make g reversible
            let mut dense = g.dense();
            dense[1] = ring.one();
            g = TruncatedSeries::univariate(&ring, "x", n, dense).expect("valid");
            if let Some(rev) = c.ok("reversion", || g.to_string(), g.reversion()) {
                let x = g.var_like(0);
                c.eq("f(rev f) = x", || g.to_string(), &x, &g.compose(std::slice::from_ref(&rev)).unwrap_or_else(|_| g.zero_like()), show);
                c.eq("rev f(f) = x", || g.to_string(), &x, &rev.compose(&[g.clone()]).unwrap_or_else(|_| g.zero_like()), show);
            }
            let low = n - 1;
            let coherent = a.mul(&b).and_then(|p| p.truncate(low)).ok()
                == a.truncate(low).and_then(|x| x.mul(&b.truncate(low)?)).ok();
            c.truth("truncation coherence", || format!("{a}; {b}"), coherent);
            c.eq("JSON round trip", || a.to_string(), &Some(a.clone()), &TruncatedSeries::from_json(&a.to_json()).ok(), |s| format!("{s:?}"));
        }
    }
}

fn fgl_suite(c: &mut Collector, rng: &mut ChaCha8Rng) {
    let q = RingSpec::Rationals;
    let n = 12;
    let laws = [
        ("additive", FormalGroupLaw::additive(&q, 1, n)),
        ("additive, d = 2", FormalGroupLaw::additive(&q, 2, 8)),
        ("multiplicative", FormalGroupLaw::multiplicative(&q, n)),
        ("Legendre", legendre::legendre_law(n)),
    ];
    for (name, law) in laws {
        let Some(law) = c.ok("construct law", || name.into(), law) else { continue };
        let rep = law.validate();
        c.truth("law validates", || name.into(), rep.ok());
        if let Some(form) = c.ok("invariant differential", || name.into(), law.invariant_differential()) {
            c.truth("invariant form is normalized", || name.into(), form.is_normalized());
            c.truth("invariant form is invariant", || name.into(), check_invariance(&law, &form).unwrap_or(false));
            c.truth("invariant form is closed", || name.into(), form.is_closed().unwrap_or(false));
        }
        if let Some(log) = c.ok("logarithm", || name.into(), law.log()) {
            let back = FormalGroupLaw::from_log(&log);
            c.eq("from_log(log F) = F", || name.into(), &Some(law.clone()), &back.ok(), |l| format!("{:?}", l.as_ref().map(|l| l.components()[0].to_string())));
        }
    }
    for _ in 0..5 {
        let mut coeffs: Vec<Elem> = (0..=n).map(|_| q.from_int(rng.gen_range(-3..=3))).collect();
        coeffs[0] = q.zero();
        coeffs[1] = q.one();
        let l = TruncatedSeries::univariate(&q, "x", n, coeffs).expect("valid");
        let inputs = || l.to_string();
        if let Some(law) = c.ok("from_log", inputs, FormalGroupLaw::from_log(std::slice::from_ref(&l))) {
            c.truth("from_log validates", || l.to_string(), law.validate().ok());
            c.eq("log(from_log l) = l", || l.to_string(), &Some(vec![l.clone()]), &law.log().ok(), |v| format!("{v:?}"));
        }
    }
    let mult = FormalGroupLaw::multiplicative(&q, n).expect("valid");
    let geometric = InvariantForm::univariate(TruncatedSeries::univariate(&q, "x", n - 1, vec![q.one(); n as usize]).expect("valid"));
    if let Some(form) = c.ok("dx/(1-x)", || "multiplicative".into(), geometric) {
        c.truth("dx/(1-x) is invariant for x+y-xy", || "multiplicative".into(), check_invariance(&mult, &form).unwrap_or(false));
    }
}

fn witt_suite(c: &mut Collector, rng: &mut ChaCha8Rng) {
    let z = RingSpec::Integers;
    let show = show_elems(&z);
    for _ in 0..100 {
        let (a, b) = (rand_witt(rng, &z, 8, 20), rand_witt(rng, &z, 8, 20));
        let (ga, gb) = (ghost(&a), ghost(&b));
        let inputs = || format!("{a}; {b}");
        let sum: Vec<Elem> = ga.iter().zip(&gb).map(|(x, y)| z.add(x, y)).collect();
        let prod: Vec<Elem> = ga.iter().zip(&gb).map(|(x, y)| z.mul(x, y)).collect();
        let s = witt_add(&a, &b).map(|s| ghost(&s)).unwrap_or_default();
        let p = witt_mul(&a, &b).map(|p| ghost(&p)).unwrap_or_default();
        c.eq("ghost(a + b) = ghost(a) + ghost(b)", inputs, &sum, &s, &show);
        c.eq("ghost(a b) = ghost(a) ghost(b)", || format!("{a}; {b}"), &prod, &p, &show);
        let back = crate::witt::from_ghost(&ga, &z).ok();
        c.eq("from_ghost(ghost a) = a", || a.to_string(), &Some(a.clone()), &back, |v| format!("{v:?}"));
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    a.gcd(&b)
}

/// Normal forms of relation words, computed once per word.
struct NormalForms<'a> {
    ring: &'a RingSpec,
    vbound: usize,
    cache: HashMap<String, Result<CartierElement>>,
}

impl NormalForms<'_> {
    fn get(&mut self, word: &CartierExpr) -> Result<CartierElement> {
        let key = word.format(self.ring);
        self.cache.entry(key).or_insert_with(|| cartier_normalize(word, self.ring, self.vbound)).clone()
    }
}

fn prod(words: Vec<CartierExpr>) -> CartierExpr {
    words.into_iter().reduce(CartierExpr::mul).expect("nonempty")
}

/// One relation `lhs = rhs`, checked three ways: the two operator
/// compositions agree on `a`, both words have the same normal form, and
/// that normal form acts on `a` like the composition.
#[allow(clippy::too_many_arguments)]
fn relation_case(
    c: &mut Collector,
    nf: &mut NormalForms,
    case: &str,
    inputs: &dyn Fn() -> String,
    a: &WittVector,
    (lhs_word, lhs): (CartierExpr, Result<WittVector>),
    (rhs_word, rhs): (CartierExpr, Result<WittVector>),
) {
    let show = |w: &WittVector| w.to_string();
    let (Some(lhs), Some(rhs)) = (c.ok(case, inputs, lhs), c.ok(case, inputs, rhs)) else { return };
    let len = lhs.k().min(rhs.k());
    if len == 0 {
        return;
    }
    if let (Some(l), Some(r)) = (c.ok(case, inputs, lhs.truncate(len)), c.ok(case, inputs, rhs.truncate(len))) {
        c.eq(case, inputs, &r, &l, show);
    }
    let (Some(xl), Some(xr)) = (c.ok(case, inputs, nf.get(&lhs_word)), c.ok(case, inputs, nf.get(&rhs_word))) else { return };
    c.eq(&format!("{case} (normal forms)"), inputs, &xr.to_string(), &xl.to_string(), |s| s.clone());
    let len = lhs.k().min(attainable_length(&xl, a.k()));
    if len > 0 {
        if let (Some(x), Some(y)) = (c.ok(case, inputs, cartier_apply_to(&xl, a, len)), c.ok(case, inputs, lhs.truncate(len))) {
            c.eq(&format!("{case} (normal form action)"), inputs, &y, &x, show);
        }
    }
}

/// The seven relations on random vectors of length `k`, for all indices up
/// to `max_index`.
fn relation_suite(
    c: &mut Collector,
    rng: &mut ChaCha8Rng,
    ops: &dyn WittOps,
    ring: &RingSpec,
    k: usize,
    max_index: u32,
    vectors: usize,
) {
    use CartierExpr::{Teich, F, V};
    let mut nf = NormalForms { ring, vbound: k + 1, cache: HashMap::new() };
    let one = || CartierExpr::Int(1.into());
    for _ in 0..vectors {
        let a = rand_witt(rng, ring, k, 1000);
        let cc = rand_elem(rng, ring, 50);
        let id = || format!("{ring}, a = {a}");
        relation_case(c, &mut nf, "F_1 = 1", &id, &a, (F(1), ops.frobenius(1, &a)), (one(), Ok(a.clone())));
        relation_case(c, &mut nf, "V_1 = 1", &id, &a, (V(1), ops.verschiebung(1, &a, k)), (one(), Ok(a.clone())));
        for n in 1..=max_index {
            let ni = || format!("{ring}, n = {n}, c = {}, a = {a}", ring.format(&cc));
            let cn = ring.pow(&cc, n as u64);
            relation_case(
                c,
                &mut nf,
                "F_nV_n = n",
                &ni,
                &a,
                (prod(vec![F(n), V(n)]), ops.verschiebung(n, &a, k).and_then(|v| ops.frobenius(n, &v))),
                (CartierExpr::Int(n.into()), Ok(ops.scalar(n as i64, &a))),
            );
            relation_case(
                c,
                &mut nf,
                "[c]V_n = V_n[c^n]",
                &ni,
                &a,
                (prod(vec![Teich(cc.clone()), V(n)]), ops.verschiebung(n, &a, k).map(|v| ops.teichmuller(&cc, &v))),
                (prod(vec![V(n), Teich(cn.clone())]), ops.verschiebung(n, &ops.teichmuller(&cn, &a), k)),
            );
            relation_case(
                c,
                &mut nf,
                "F_n[c] = [c^n]F_n",
                &ni,
                &a,
                (prod(vec![F(n), Teich(cc.clone())]), ops.frobenius(n, &ops.teichmuller(&cc, &a))),
                (prod(vec![Teich(cn.clone()), F(n)]), ops.frobenius(n, &a).map(|f| ops.teichmuller(&cn, &f))),
            );
            for m in 1..=max_index {
                let nm = || format!("{ring}, n = {n}, m = {m}, a = {a}");
                relation_case(
                    c,
                    &mut nf,
                    "V_mV_n = V_nm",
                    &nm,
                    &a,
                    (prod(vec![V(m), V(n)]), ops.verschiebung(n, &a, k).and_then(|v| ops.verschiebung(m, &v, k))),
                    (V(n * m), ops.verschiebung(n * m, &a, k)),
                );
                // vacuous when nothing of F_nm a survives
                if k / (n * m) as usize > 0 {
                    relation_case(
                        c,
                        &mut nf,
                        "F_nF_m = F_nm",
                        &nm,
                        &a,
                        (prod(vec![F(n), F(m)]), ops.frobenius(m, &a).and_then(|f| ops.frobenius(n, &f))),
                        (F(n * m), ops.frobenius(n * m, &a)),
                    );
                }
                if gcd(n, m) == 1 {
                    relation_case(
                        c,
                        &mut nf,
                        "F_nV_m = V_mF_n",
                        &nm,
                        &a,
                        (prod(vec![F(n), V(m)]), ops.verschiebung(m, &a, k).and_then(|v| ops.frobenius(n, &v))),
                        (prod(vec![V(m), F(n)]), ops.frobenius(n, &a).and_then(|f| ops.verschiebung(m, &f, f.k()))),
                    );
                }
            }
        }
    }
}

fn teichmuller_suite(c: &mut Collector, rng: &mut ChaCha8Rng) {
    let r = RingSpec::integers_mod(12).expect("valid");
    let k = 4;
    let show = |w: &WittVector| w.to_string();
    for x in 0..12 {
        for y in 0..12 {
            let (cx, cy) = (r.from_int(x), r.from_int(y));
            let inputs = || format!("Z/12: [{x}][{y}]");
            let lhs = teichmuller(&cx, &r, k).and_then(|a| witt_mul(&a, &teichmuller(&cy, &r, k)?));
            let rhs = teichmuller(&r.mul(&cx, &cy), &r, k);
            if let (Some(l), Some(rr)) = (c.ok("[c1][c2] = [c1c2]", inputs, lhs), c.ok("[c1][c2] = [c1c2]", inputs, rhs)) {
                c.eq("[c1][c2] = [c1c2]", inputs, &rr, &l, show);
            }
        }
    }
    let z = RingSpec::Integers;
    for _ in 0..50 {
        let big = |rng: &mut ChaCha8Rng| {
            let digits: String = (0..30).map(|_| char::from(b'0' + rng.gen_range(0..10u8))).collect();
            let sign = if rng.gen_bool(0.5) { "-" } else { "" };
            Elem::Int(format!("{sign}1{digits}").parse::<BigInt>().expect("digits"))
        };
        let (cx, cy) = (big(rng), big(rng));
        let inputs = || format!("Z: [{}][{}]", z.format(&cx), z.format(&cy));
        let lhs = teichmuller(&cx, &z, 6).and_then(|a| witt_mul(&a, &teichmuller(&cy, &z, 6)?));
        let rhs = teichmuller(&z.mul(&cx, &cy), &z, 6);
        if let (Some(l), Some(rr)) = (c.ok("[c1][c2] = [c1c2]", inputs, lhs), c.ok("[c1][c2] = [c1c2]", inputs, rhs)) {
            c.eq("[c1][c2] = [c1c2]", inputs, &rr, &l, show);
        }
    }
}

fn universal_suite(c: &mut Collector, rng: &mut ChaCha8Rng) {
    let z = RingSpec::Integers;
    let show = show_elems(&z);
    let mut ops = vec![(UniversalOp::Mul, 8)];
    ops.extend((2..=4).map(|n| (UniversalOp::Frobenius(n), 8)));
    for (op, k) in ops {
        let Some(family) = c.ok("derive universal polynomials", || format!("{} k = {k}", op.name()), derive_universal_polynomials(op, k)) else {
            continue;
        };
        for _ in 0..20 {
            let (actual, expected, inputs) = match op {
                UniversalOp::Frobenius(n) => {
                    let a = rand_witt(rng, &z, n as usize * k, 20);
                    let via = family.evaluate(&z, &a.coeffs());
                    let ghost_path = frobenius_ghost(n, &a).map(|w| w.coeffs());
                    (via, ghost_path, a.to_string())
                }
                _ => {
                    let (a, b) = (rand_witt(rng, &z, k, 20), rand_witt(rng, &z, k, 20));
                    let mut inputs = a.coeffs();
                    inputs.extend(b.coeffs());
                    (family.evaluate(&z, &inputs), witt_mul_ghost(&a, &b).map(|w| w.coeffs()), format!("{a}; {b}"))
                }
            };
            c.eq(&format!("universal {} agrees with ghost path", op.name()), || inputs, &expected.ok(), &actual.ok(), |v| v.as_ref().map(&show).unwrap_or_default());
        }
    }
}

fn rand_word(rng: &mut ChaCha8Rng, depth: u32) -> CartierExpr {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..4) {
            0 => CartierExpr::V(rng.gen_range(1..4)),
            1 => CartierExpr::F(rng.gen_range(1..4)),
            2 => CartierExpr::Teich(Elem::Int(rng.gen_range(-3..4).into())),
            _ => CartierExpr::Int(rng.gen_range(0..3).into()),
        };
    }
    match rng.gen_range(0..3) {
        0 => CartierExpr::add(rand_word(rng, depth - 1), rand_word(rng, depth - 1)),
        1 => CartierExpr::mul(rand_word(rng, depth - 1), rand_word(rng, depth - 1)),
        _ => CartierExpr::neg(rand_word(rng, depth - 1)),
    }
}

fn cartier_suite(c: &mut Collector, rng: &mut ChaCha8Rng) {
    let z = RingSpec::Integers;
    let k = 8;
    let show = |x: &Option<String>| x.clone().unwrap_or_else(|| "error".into());
    for _ in 0..60 {
        let w = rand_word(rng, 3);
        let text = w.format(&z);
        let left = cartier_normalize_with(&w, &z, k, RewriteOrder::LeftFirst).ok().map(|e| e.to_string());
        let right = cartier_normalize_with(&w, &z, k, RewriteOrder::RightFirst).ok().map(|e| e.to_string());
        c.eq("normalization is confluent", || text.clone(), &left, &right, show);
        let u = rand_word(rng, 2);
        let v = rand_word(rng, 2);
        let a1 = cartier_normalize(&CartierExpr::mul(CartierExpr::mul(w.clone(), u.clone()), v.clone()), &z, k).ok().map(|e| e.to_string());
        let a2 = cartier_normalize(&CartierExpr::mul(w.clone(), CartierExpr::mul(u.clone(), v.clone())), &z, k).ok().map(|e| e.to_string());
        c.eq("products are associative", || format!("{text}; {}; {}", u.format(&z), v.format(&z)), &a1, &a2, show);
        let a = rand_witt(rng, &z, k - 1, 9);
        if let (Ok(direct), Ok(xi)) = (crate::witt::cartier::act_direct(&w, &a), cartier_normalize(&w, &z, k)) {
            let len = direct.k().min(attainable_length(&xi, a.k()));
            if len > 0 {
                let via = cartier_apply_to(&xi, &a, len).ok().map(|x| x.to_string());
                let dir = direct.truncate(len).ok().map(|x| x.to_string());
                c.eq("normal form acts like the word", || format!("{text}; a = {a}"), &dir, &via, show);
            }
        }
    }
    // Teichmüller defect against series division
    let r = RingSpec::parse("Z[c1][c2]").expect("valid");
    let (c1, c2) = (r.variable("c1").expect("c1"), r.variable("c2").expect("c2"));
    if let Some(a) = c.ok("Teichmüller defect", || "c1, c2".into(), crate::witt::cartier::teichmuller_defect(&r, &c1, &c2, 6)) {
        c.eq("a_2 = c1 c2", || "c1, c2".into(), &r.mul(&c1, &c2), &a[0], |x| r.format(x));
        let a3 = r.mul(&r.mul(&c1, &c2), &r.add(&c1, &c2));
        c.eq("a_3 = c1 c2 (c1 + c2)", || "c1, c2".into(), &a3, &a[1], |x| r.format(x));
    }
}

fn lambda_suite(c: &mut Collector) {
    for p in [2, 3] {
        let ring = RingSpec::integers_mod(p).expect("valid");
        let Some(seqs) = c.ok("example sequences", || format!("Z/{p}"), example_sequences(&ring)) else { continue };
        for seq in seqs {
            let degree = 3;
            if let Some(rep) = c.ok("Lambda exactness", || seq.name.clone(), check_exactness(&seq, degree)) {
                let inputs = || format!("{} over Z/{p}, degree <= {degree}", seq.name);
                c.truth("N1 -> N2 -> N3 is exact", inputs, rep.sequence_exact);
                c.truth("Lambda(N2) -> Lambda(N3) is onto", inputs, rep.surjective);
                c.truth("kernel is Lambda(N1)", inputs, rep.kernel_ok);
            }
        }
    }
}

fn legendre_suite(c: &mut Collector) {
    if let Some(sweep) = c.ok("sweep", || "max_n = 40".into(), legendre::stienstra_sweep(legendre::DEFAULT_MAX_N)) {
        for chk in &sweep.checks {
            c.truth("4 D(omega_n) = 0 mod n + 1", || format!("n = {}, 4D = {:?}", chk.n, chk.exact), chk.ok);
        }
    }
    for n in (2..=legendre::DEFAULT_MAX_N).step_by(2) {
        if let Some(rep) = c.ok("central binomial", || format!("n = {n}"), legendre::central_binom_congruence(n)) {
            if rep.modulus_prime {
                c.truth("binom(n, n/2) = +-1 mod n + 1 (prime)", || format!("n = {n}, value {}", rep.value), rep.is_pm_one);
            }
        }
    }
    if let Some(order) = c.ok("hypergeometric residual", || "N = 18".into(), legendre::hypergeom_residual_order(18)) {
        c.truth("D(2F1) vanishes through degree 16", || format!("first nonzero degree {order:?}"), order.is_none_or(|d| d >= 17));
    }
    if let Some(law) = c.ok("Legendre law", || "N = 12".into(), legendre::legendre_law(12)) {
        c.truth("Legendre law validates", || "N = 12".into(), law.validate().ok());
        if let Some(form) = c.ok("Legendre form", || "N = 11".into(), legendre::legendre_form(11)) {
            c.truth("Legendre form is invariant", || "N = 12".into(), check_invariance(&law, &form).unwrap_or(false));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_seed_passes() {
        let rep = verify_all(DEFAULT_SEED);
        let failures: Vec<_> = rep.failures().collect();
        assert!(failures.is_empty(), "{failures:#?}");
        assert_eq!(rep.suites.len(), SUITES.len());
        assert!(rep.cases() > 1000);
    }

    #[test]
    fn output_is_deterministic() {
        let only = vec!["legendre".to_string(), "cartier".to_string()];
        let a = verify(7, Some(&only), &LibraryOps).unwrap().to_json(false);
        let b = verify(7, Some(&only), &LibraryOps).unwrap().to_json(false);
        assert_eq!(a.to_string(), b.to_string());
        let names: Vec<_> = a["suites"].as_array().unwrap().iter().map(|s| s["name"].as_str().unwrap().to_string()).collect();
        assert_eq!(names, vec!["cartier", "legendre"]);
        assert!(verify(7, Some(&["nope".to_string()]), &LibraryOps).is_err());
    }

    struct BrokenScalar;

    impl WittOps for BrokenScalar {
        fn scalar(&self, n: i64, a: &WittVector) -> WittVector {
            witt_scalar(n + 1, a)
        }
    }

    #[test]
    fn injected_fault_is_reported() {
        let only = vec!["relations".to_string()];
        let rep = verify(1, Some(&only), &BrokenScalar).unwrap();
        assert!(!rep.ok());
        assert!(rep.failures().all(|f| f.case == "F_nV_n = n"));
    }
}
