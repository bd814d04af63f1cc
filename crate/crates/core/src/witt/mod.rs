//! Big Witt vectors in series coordinates.
//!
//! `W_[1,k](R)` is the group of series `1 + b_1 x + ... + b_k x^k` under
//! multiplication; the Witt sum of two vectors is their product as series.
//! The ring structure, Frobenius and ghost map follow the sign convention
//! `[c] = 1 - c x`, so `ghost([c]) = (c, c^2, ..., c^k)`.
//!
//! Over torsion-free rings multiplication and Frobenius go through ghost
//! components; over rings with torsion (`Z/m`) they evaluate integral
//! universal polynomials from [`universal`].

pub mod cartier;
pub mod lambda;
pub mod universal;

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ring::{Elem, RingSpec};
use crate::series::TruncatedSeries;
use crate::value::{elem_from_json, elem_to_json};

use self::universal::{derive_universal_polynomials, UniversalOp};

pub const WITT_VAR: &str = "x";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittVector {
    series: TruncatedSeries,
}

impl WittVector {
    /// Wraps a univariate series with constant term exactly 1.
    pub fn new(series: TruncatedSeries) -> Result<Self> {
        if series.dim() != 1 {
            return Err(Error::ArityMismatch { expected: 1, got: series.dim() });
        }
        if !series.ring().is_one(&series.constant_term()) {
            return Err(Error::Invalid("a Witt vector has constant term 1".into()));
        }
        if series.trunc() == 0 {
            return Err(Error::Invalid("Witt vectors need length at least 1".into()));
        }
        let series = series.rename(&[WITT_VAR])?;
        Ok(WittVector { series })
    }

    /// The vector `1 + b_1 x + ... + b_k x^k`, with `k = b.len()`.
    pub fn from_coeffs(ring: &RingSpec, b: Vec<Elem>) -> Result<Self> {
        let k = b.len() as u32;
        let mut coeffs = vec![ring.one()];
        coeffs.extend(b);
        Self::new(TruncatedSeries::univariate(ring, WITT_VAR, k, coeffs)?)
    }

    pub fn from_ints(ring: &RingSpec, b: &[i64]) -> Result<Self> {
        Self::from_coeffs(ring, b.iter().map(|&x| ring.from_int(x)).collect())
    }

    pub fn one(ring: &RingSpec, k: usize) -> Result<Self> {
        Self::from_coeffs(ring, vec![ring.zero(); k])
    }

    pub fn ring(&self) -> &RingSpec {
        self.series.ring()
    }

    pub fn k(&self) -> usize {
        self.series.trunc() as usize
    }

    pub fn series(&self) -> &TruncatedSeries {
        &self.series
    }

    /// `b_1..b_k`.
    pub fn coeffs(&self) -> Vec<Elem> {
        (1..=self.series.trunc()).map(|i| self.series.coeff1(i)).collect()
    }

    pub fn is_one(&self) -> bool {
        self.series.num_terms() == 1
    }

    /// Restriction to `W_[1,k]`, `k` at most the current length.
    pub fn truncate(&self, k: usize) -> Result<Self> {
        Self::new(self.series.truncate(k as u32)?)
    }

    pub fn to_json(&self) -> Value {
        let r = self.ring();
        json!({
            "ring": r.to_string(),
            "k": self.k(),
            "b": self.coeffs().iter().map(|c| elem_to_json(r, c)).collect::<Vec<_>>(),
        })
    }

    /// Reads `{"ring", "k", "b"}`; `ring` and `k` may be omitted when
    /// defaults are supplied.
    pub fn from_json_with(v: &Value, ring: Option<&RingSpec>, k: Option<usize>) -> Result<Self> {
        let ring = match v.get("ring").and_then(Value::as_str) {
            Some(s) => RingSpec::parse(s)?,
            None => ring.cloned().ok_or_else(|| Error::Parse("Witt vector needs a \"ring\"".into()))?,
        };
        let b = v
            .get("b")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("Witt vector needs \"b\"".into()))?;
        let b = b.iter().map(|x| elem_from_json(&ring, x)).collect::<Result<Vec<_>>>()?;
        let k = v.get("k").and_then(Value::as_u64).map(|k| k as usize).or(k).unwrap_or(b.len());
        if k != b.len() {
            return Err(Error::Parse(format!("\"k\" is {k} but {} coefficients were given", b.len())));
        }
        Self::from_coeffs(&ring, b)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        Self::from_json_with(v, None, None)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.ring() != other.ring() {
            return Err(Error::SpecMismatch(format!("{} vs {}", self.ring(), other.ring())));
        }
        if self.k() != other.k() {
            return Err(Error::SpecMismatch(format!("Witt lengths {} vs {}", self.k(), other.k())));
        }
        Ok(())
    }
}

impl std::fmt::Display for WittVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.series.fmt(f)
    }
}

/// Witt sum: product of the series.
pub fn witt_add(a: &WittVector, b: &WittVector) -> Result<WittVector> {
    a.check_compatible(b)?;
    Ok(WittVector { series: a.series.mul(&b.series)? })
}

/// Additive inverse: the series inverse.
pub fn witt_neg(a: &WittVector) -> WittVector {
    WittVector { series: a.series.invert().expect("constant term is 1") }
}

pub fn witt_sub(a: &WittVector, b: &WittVector) -> Result<WittVector> {
    witt_add(a, &witt_neg(b))
}

/// `n * a` in the additive group, for any integer `n`.
pub fn witt_scalar(n: i64, a: &WittVector) -> WittVector {
    let p = WittVector { series: a.series.pow(n.unsigned_abs() as u32) };
    if n < 0 {
        witt_neg(&p)
    } else {
        p
    }
}

/// Ghost components: `w_n` is the coefficient of `x^n` in `-x f'/f`.
pub fn ghost(a: &WittVector) -> Vec<Elem> {
    ghost_of_coeffs(a.ring(), &a.coeffs())
}

fn ghost_of_coeffs(r: &RingSpec, b: &[Elem]) -> Vec<Elem> {
    // -x f' = f w  =>  w_n = -n b_n - sum_{i=1}^{n-1} b_i w_{n-i}
    let mut w: Vec<Elem> = Vec::with_capacity(b.len());
    for n in 1..=b.len() {
        let mut acc = r.neg(&r.mul_int(&b[n - 1], n as i64));
        for i in 1..n {
            acc = r.sub(&acc, &r.mul(&b[i - 1], &w[n - i - 1]));
        }
        w.push(acc);
    }
    w
}

/// Reconstructs a vector from ghost components, dividing by `n` at step `n`.
/// Fails with `NotTorsionFree` when such a division is not exact.
pub fn from_ghost(w: &[Elem], ring: &RingSpec) -> Result<WittVector> {
    if w.is_empty() {
        return Err(Error::Invalid("need at least one ghost component".into()));
    }
    let mut b: Vec<Elem> = Vec::with_capacity(w.len());
    for n in 1..=w.len() {
        let mut acc = w[n - 1].clone();
        for i in 1..n {
            acc = ring.add(&acc, &ring.mul(&b[i - 1], &w[n - i - 1]));
        }
        let q = ring
            .div_int(&ring.neg(&acc), &BigInt::from(n))
            .ok_or(Error::NotTorsionFree(n as u64))?;
        b.push(q);
    }
    WittVector::from_coeffs(ring, b)
}

/// Witt product, characterized by `ghost(a b) = ghost(a) ghost(b)`.
pub fn witt_mul(a: &WittVector, b: &WittVector) -> Result<WittVector> {
    a.check_compatible(b)?;
    let r = a.ring();
    if r.is_torsion_free() {
        witt_mul_ghost(a, b)
    } else {
        let family = derive_universal_polynomials(UniversalOp::Mul, a.k())?;
        let mut inputs = a.coeffs();
        inputs.extend(b.coeffs());
        WittVector::from_coeffs(r, family.evaluate(r, &inputs)?)
    }
}

pub(crate) fn witt_mul_ghost(a: &WittVector, b: &WittVector) -> Result<WittVector> {
    let r = a.ring();
    let w: Vec<Elem> = ghost(a).iter().zip(ghost(b)).map(|(x, y)| r.mul(x, &y)).collect();
    from_ghost(&w, r)
}

/// Teichmüller representative `[c] = 1 - c x` in `W_[1,k]`.
pub fn teichmuller(c: &Elem, ring: &RingSpec, k: usize) -> Result<WittVector> {
    let mut b = vec![ring.zero(); k];
    if k == 0 {
        return Err(Error::Invalid("Witt vectors need length at least 1".into()));
    }
    b[0] = ring.neg(c);
    WittVector::from_coeffs(ring, b)
}

/// Action of `[c]` on the Cartier module: `f(x) -> f(c x)`. Agrees with
/// Witt multiplication by `teichmuller(c)`.
pub fn teichmuller_action(c: &Elem, a: &WittVector) -> WittVector {
    WittVector { series: a.series.scale_variable(c).expect("univariate") }
}

/// `V_n a = a(x^n)`, kept at the input length.
pub fn verschiebung(n: u32, a: &WittVector) -> Result<WittVector> {
    verschiebung_to(n, a, a.k())
}

/// `V_n a = a(x^n)` as an element of `W_[1,k_out]`. The input determines
/// the result up to degree `n (k + 1) - 1`.
pub fn verschiebung_to(n: u32, a: &WittVector, k_out: usize) -> Result<WittVector> {
    if n == 0 {
        return Err(Error::Invalid("V_0 is undefined".into()));
    }
    let known = n as usize * (a.k() + 1) - 1;
    if k_out > known || k_out == 0 {
        return Err(Error::TruncationTooShort(format!(
            "V_{n} of a length-{} vector is known only to degree {known}",
            a.k()
        )));
    }
    Ok(WittVector { series: a.series.substitute_power(n, k_out as u32)? })
}

/// `F_n: W_[1,k] -> W_[1,k/n]`, with `ghost(F_n a)_m = ghost(a)_{nm}`.
pub fn frobenius(n: u32, a: &WittVector) -> Result<WittVector> {
    if n == 0 {
        return Err(Error::Invalid("F_0 is undefined".into()));
    }
    let k_out = a.k() / n as usize;
    if k_out == 0 {
        return Err(Error::TruncationTooShort(format!("F_{n} of a length-{} vector is empty", a.k())));
    }
    if n == 1 {
        return Ok(a.clone());
    }
    let r = a.ring();
    if r.is_torsion_free() {
        frobenius_ghost(n, a)
    } else {
        let family = derive_universal_polynomials(UniversalOp::Frobenius(n), k_out)?;
        let inputs: Vec<Elem> = a.coeffs().into_iter().take(n as usize * k_out).collect();
        WittVector::from_coeffs(r, family.evaluate(r, &inputs)?)
    }
}

pub(crate) fn frobenius_ghost(n: u32, a: &WittVector) -> Result<WittVector> {
    let k_out = a.k() / n as usize;
    let w = ghost(a);
    let sub: Vec<Elem> = (1..=k_out).map(|m| w[m * n as usize - 1].clone()).collect();
    from_ghost(&sub, a.ring())
}
