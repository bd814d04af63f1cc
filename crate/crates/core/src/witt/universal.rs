//! Integral universal polynomials for Witt multiplication and Frobenius.
//!
//! Each family is obtained by solving the ghost equations with symbolic
//! inputs: the ghost components of generic vectors are integer polynomials,
//! and reconstruction divides by `n` at step `n`. Every such division is
//! checked to be exact, so a family that is returned has integer
//! coefficients by construction. Families are memoized per `(op, k)`.

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ring::{Elem, RingSpec};

/// Default largest output length for which families are derived.
pub const DEFAULT_CEILING: usize = 8;

static CEILING: AtomicUsize = AtomicUsize::new(DEFAULT_CEILING);

pub fn universal_ceiling() -> usize {
    CEILING.load(Ordering::Relaxed)
}

/// Changes the ceiling for later derivations. Memoized families stay valid.
pub fn set_universal_ceiling(k: usize) {
    CEILING.store(k, Ordering::Relaxed);
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UniversalOp {
    /// Witt sum, i.e. series multiplication. Inputs `a_1..a_k, c_1..c_k`.
    Add,
    /// Witt product. Inputs `a_1..a_k, c_1..c_k`.
    Mul,
    /// `F_n: W_[1,nk] -> W_[1,k]`. Inputs `a_1..a_{nk}`.
    Frobenius(u32),
}

impl UniversalOp {
    pub fn name(&self) -> String {
        match self {
            UniversalOp::Add => "add".into(),
            UniversalOp::Mul => "mul".into(),
            UniversalOp::Frobenius(n) => format!("frobenius({n})"),
        }
    }

    fn input_names(&self, k: usize) -> Vec<String> {
        match self {
            UniversalOp::Add | UniversalOp::Mul => {
                (1..=k).map(|i| format!("a{i}")).chain((1..=k).map(|i| format!("c{i}"))).collect()
            }
            UniversalOp::Frobenius(n) => (1..=*n as usize * k).map(|i| format!("a{i}")).collect(),
        }
    }
}

/// Sparse polynomial with integer coefficients; exponents indexed by input.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntPoly {
    terms: BTreeMap<Vec<u8>, BigInt>,
}

impl IntPoly {
    fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        IntPoly { terms: BTreeMap::from([(e, BigInt::one())]) }
    }

    fn accumulate(&mut self, e: Vec<u8>, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(old) => {
                *old += c;
                if old.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    fn add_assign(&mut self, other: &IntPoly) {
        for (e, c) in &other.terms {
            self.accumulate(e.clone(), c.clone());
        }
    }

    fn scale(&self, n: &BigInt) -> IntPoly {
        let mut out = IntPoly::default();
        for (e, c) in &self.terms {
            out.accumulate(e.clone(), c * n);
        }
        out
    }

    fn mul(&self, other: &IntPoly) -> IntPoly {
        let mut out = IntPoly::default();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u8> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.accumulate(e, c1 * c2);
            }
        }
        out
    }

    /// Exact division by `n`, or the first coefficient that is not divisible.
    fn div_exact(&self, n: &BigInt) -> std::result::Result<IntPoly, BigInt> {
        let mut out = IntPoly::default();
        for (e, c) in &self.terms {
            let (q, r) = c.div_rem(n);
            if !r.is_zero() {
                return Err(c.clone());
            }
            out.terms.insert(e.clone(), q);
        }
        Ok(out)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u8>, &BigInt)> {
        self.terms.iter()
    }

    fn evaluate(&self, ring: &RingSpec, powers: &[Vec<Elem>]) -> Elem {
        let mut acc = ring.zero();
        for (e, c) in &self.terms {
            let mut t = ring.from_bigint(c);
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = ring.mul(&t, &powers[i][k as usize]);
                }
            }
            acc = ring.add(&acc, &t);
        }
        acc
    }
}

/// Output polynomials `b_1..b_k` of one operation at one length.
#[derive(Debug, PartialEq, Eq)]
pub struct UniversalFamily {
    op: UniversalOp,
    k: usize,
    inputs: Vec<String>,
    polys: Vec<IntPoly>,
}

impl UniversalFamily {
    pub fn op(&self) -> UniversalOp {
        self.op
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn polys(&self) -> &[IntPoly] {
        &self.polys
    }

    /// Evaluates every output polynomial at `inputs`, given in the order of
    /// [`UniversalFamily::inputs`].
    pub fn evaluate(&self, ring: &RingSpec, inputs: &[Elem]) -> Result<Vec<Elem>> {
        if inputs.len() != self.inputs.len() {
            return Err(Error::ArityMismatch { expected: self.inputs.len(), got: inputs.len() });
        }
        let mut max_exp = vec![0u8; inputs.len()];
        for p in &self.polys {
            for e in p.terms.keys() {
                for (m, &x) in max_exp.iter_mut().zip(e) {
                    *m = (*m).max(x);
                }
            }
        }
        let powers: Vec<Vec<Elem>> = inputs
            .iter()
            .zip(&max_exp)
            .map(|(x, &m)| {
                let mut row = vec![ring.one()];
                for _ in 0..m {
                    let next = ring.mul(row.last().expect("nonempty"), x);
                    row.push(next);
                }
                row
            })
            .collect();
        Ok(self.polys.iter().map(|p| p.evaluate(ring, &powers)).collect())
    }

    /// Audit form: every term as `{"exp": [...], "coeff": "..."}`.
    pub fn to_json(&self) -> Value {
        let polys: Vec<Value> = self
            .polys
            .iter()
            .map(|p| {
                Value::Array(
                    p.terms
                        .iter()
                        .map(|(e, c)| json!({"exp": e, "coeff": c.to_string()}))
                        .collect(),
                )
            })
            .collect();
        json!({"op": self.op.name(), "k": self.k, "inputs": self.inputs, "polys": polys})
    }
}

type Memo = RwLock<HashMap<(UniversalOp, usize), Arc<UniversalFamily>>>;

fn memo() -> &'static Memo {
    static MEMO: OnceLock<Memo> = OnceLock::new();
    MEMO.get_or_init(|| RwLock::new(HashMap::new()))
}

/// The memoized family for `op` at output length `k`. Concurrent first
/// requests may both derive; the derivation is deterministic, so whichever
/// result is stored first is the one every caller sees.
pub fn derive_universal_polynomials(op: UniversalOp, k: usize) -> Result<Arc<UniversalFamily>> {
    if let Some(f) = memo().read().expect("memo lock").get(&(op, k)) {
        return Ok(f.clone());
    }
    let ceiling = universal_ceiling();
    if k > ceiling {
        return Err(Error::CeilingExceeded(k, ceiling));
    }
    if k == 0 {
        return Err(Error::Invalid("universal polynomials need k >= 1".into()));
    }
    if op == UniversalOp::Frobenius(0) {
        return Err(Error::Invalid("F_0 is undefined".into()));
    }
    let family = Arc::new(derive(op, k)?);
    let mut table = memo().write().expect("memo lock");
    Ok(table.entry((op, k)).or_insert(family).clone())
}

/// Ghost components of the generic vector whose coefficients are the
/// variables `offset..offset+len`.
fn generic_ghost(nvars: usize, offset: usize, len: usize) -> Vec<IntPoly> {
    let mut w: Vec<IntPoly> = Vec::with_capacity(len);
    for n in 1..=len {
        let mut acc = IntPoly::var(nvars, offset + n - 1).scale(&BigInt::from(-(n as i64)));
        for i in 1..n {
            let t = IntPoly::var(nvars, offset + i - 1).mul(&w[n - i - 1]);
            acc.add_assign(&t.scale(&BigInt::from(-1)));
        }
        w.push(acc);
    }
    w
}

fn derive(op: UniversalOp, k: usize) -> Result<UniversalFamily> {
    let inputs = op.input_names(k);
    let nvars = inputs.len();
    let target: Vec<IntPoly> = match op {
        UniversalOp::Add | UniversalOp::Mul => {
            let wa = generic_ghost(nvars, 0, k);
            let wc = generic_ghost(nvars, k, k);
            wa.iter()
                .zip(&wc)
                .map(|(x, y)| {
                    if op == UniversalOp::Add {
                        let mut s = x.clone();
                        s.add_assign(y);
                        s
                    } else {
                        x.mul(y)
                    }
                })
                .collect()
        }
        UniversalOp::Frobenius(n) => {
            let n = n as usize;
            let w = generic_ghost(nvars, 0, n * k);
            (1..=k).map(|m| w[n * m - 1].clone()).collect()
        }
    };
    // b_n = -(W_n + sum_{i<n} b_i W_{n-i}) / n
    let mut polys: Vec<IntPoly> = Vec::with_capacity(k);
    for n in 1..=k {
        let mut acc = target[n - 1].clone();
        for i in 1..n {
            acc.add_assign(&polys[i - 1].mul(&target[n - i - 1]));
        }
        let b = acc.scale(&BigInt::from(-1)).div_exact(&BigInt::from(n)).map_err(|c| {
            Error::IntegralityFailure(format!("{} b_{n}: coefficient {c} not divisible by {n}", op.name()))
        })?;
        polys.push(b);
    }
    Ok(UniversalFamily { op, k, inputs, polys })
}
