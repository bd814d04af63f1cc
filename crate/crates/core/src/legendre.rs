//! The Legendre family `z y^2 = x (x - z)(x - l z)`: its invariant form,
//! logarithm, Picard-Fuchs operator
//! `D = l(1 - l) d^2/dl^2 + (1 - 2l) d/dl - 1/4`, and the congruences
//! `4 D(binom(n, n/2) A_{n/2}(l)) = 0 mod n + 1` with
//! `A_m(l) = sum_k binom(m, k)^2 l^k`.
//!
//! The `-1/4` term is cleared by working with `4 D` over `Z[l]`; since
//! `n + 1` is odd this loses nothing.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fgl::{FormalGroupLaw, InvariantForm};
use crate::ring::{Elem, RingSpec};
use crate::series::TruncatedSeries;
use crate::value::{divides_all_coeffs, RingValue};

/// Name of the family parameter.
pub const PARAM: &str = "l";

/// Default largest even index in a sweep.
pub const DEFAULT_MAX_N: u64 = 40;

pub fn z_l() -> RingSpec {
    RingSpec::polynomial(RingSpec::Integers, PARAM).expect("valid spec")
}

pub fn q_l() -> RingSpec {
    RingSpec::polynomial(RingSpec::Rationals, PARAM).expect("valid spec")
}

/// `sum_j coeffs[j] (d/dl)^j` with polynomial coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffOperator {
    ring: RingSpec,
    coeffs: Vec<Elem>,
}

impl DiffOperator {
    /// `coeffs[j]` multiplies the `j`-th derivative; the last entry must be
    /// nonzero.
    pub fn new(ring: &RingSpec, coeffs: Vec<Elem>) -> Result<Self> {
        if !matches!(ring, RingSpec::Polynomial(..)) {
            return Err(Error::SpecMismatch(format!("{ring} is not a polynomial ring")));
        }
        let coeffs = coeffs.iter().map(|c| ring.canonicalize(c)).collect::<Result<Vec<_>>>()?;
        match coeffs.last() {
            Some(c) if !ring.is_zero(c) => Ok(DiffOperator { ring: ring.clone(), coeffs }),
            _ => Err(Error::Invalid("leading coefficient of an operator must be nonzero".into())),
        }
    }

    /// `D = l(1 - l) d^2 + (1 - 2l) d - 1/4` over `Q[l]`.
    pub fn legendre() -> Self {
        let r = q_l();
        let p = |cs: &[(i64, i64)]| {
            Elem::Poly(cs.iter().map(|&(n, d)| Elem::Rat(BigRational::new(n.into(), d.into()))).collect())
        };
        Self::new(&r, vec![p(&[(-1, 4)]), p(&[(1, 1), (-2, 1)]), p(&[(0, 1), (1, 1), (-1, 1)])]).expect("valid")
    }

    /// `4 D = 4l(1 - l) d^2 + 4(1 - 2l) d - 1` over `Z[l]`.
    pub fn legendre_times_four() -> Self {
        let r = z_l();
        let p = |cs: &[i64]| Elem::Poly(cs.iter().map(|&n| Elem::Int(n.into())).collect());
        Self::new(&r, vec![p(&[-1]), p(&[4, -8]), p(&[0, 4, -4])]).expect("valid")
    }

    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }
}

/// `D p = sum_j coeffs_j p^(j)`, exactly, in the operator's ring.
pub fn apply_operator(op: &DiffOperator, p: &RingValue) -> Result<RingValue> {
    let r = op.ring();
    if p.spec() != r {
        return Err(Error::SpecMismatch(format!("{} vs {}", p.spec(), r)));
    }
    let mut acc = r.zero();
    let mut deriv = p.elem().clone();
    for (j, c) in op.coeffs.iter().enumerate() {
        if j > 0 {
            deriv = r.derivative(&deriv).expect("polynomial ring");
        }
        acc = r.add(&acc, &r.mul(c, &deriv));
    }
    RingValue::new(r.clone(), acc)
}

fn binomial(n: u64, k: u64) -> BigInt {
    let mut b = BigInt::one();
    for i in 0..k {
        b = b * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    b
}

/// `A_m(l) = sum_k binom(m, k)^2 l^k` over `Z`.
pub fn legendre_a(m: u64) -> RingValue {
    let coeffs: Vec<Elem> = (0..=m).map(|k| Elem::Int(binomial(m, k).pow(2))).collect();
    RingValue::new(z_l(), Elem::Poly(coeffs)).expect("canonical")
}

/// Coefficient of `x^n dx` in the invariant form: `binom(n, n/2) A_{n/2}(l)`.
pub fn legendre_omega_coeff(n: u64) -> Result<RingValue> {
    if n % 2 == 1 {
        return Err(Error::OddIndex(n));
    }
    let r = z_l();
    let c = r.from_bigint(&binomial(n, n / 2));
    RingValue::new(r.clone(), r.mul(&c, legendre_a(n / 2).elem()))
}

fn to_q_l(p: &RingValue) -> Elem {
    let r = q_l();
    let coeffs = z_l().coefficients(p.elem()).unwrap_or(&[]).to_vec();
    let q: Vec<Elem> = coeffs
        .into_iter()
        .map(|c| match c {
            Elem::Int(x) => Elem::Rat(BigRational::from_integer(x)),
            other => other,
        })
        .collect();
    r.canonicalize(&Elem::Poly(q)).expect("canonical")
}

/// `omega = sum_{n even} binom(n, n/2) A_{n/2}(l) x^n dx` over `Q[l]`,
/// known to degree `trunc`.
pub fn legendre_form(trunc: u32) -> Result<InvariantForm> {
    let r = q_l();
    let coeffs: Vec<Elem> = (0..=trunc as u64)
        .map(|n| if n % 2 == 0 { legendre_omega_coeff(n).map(|p| to_q_l(&p)) } else { Ok(r.zero()) })
        .collect::<Result<_>>()?;
    InvariantForm::univariate(TruncatedSeries::univariate(&r, "x", trunc, coeffs)?)
}

/// `l(x) = sum_{n even, n + 1 <= N} binom(n, n/2) A_{n/2}(l) x^(n+1) / (n+1)`.
pub fn legendre_log(trunc: u32) -> Result<TruncatedSeries> {
    if trunc == 0 {
        return Err(Error::Invalid("the logarithm needs truncation at least 1".into()));
    }
    Ok(legendre_form(trunc - 1)?.integrate(trunc)?.remove(0))
}

/// The formal group law with logarithm [`legendre_log`].
pub fn legendre_law(trunc: u32) -> Result<FormalGroupLaw> {
    FormalGroupLaw::from_log(&[legendre_log(trunc)?])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CongruenceReport {
    pub n: u64,
    pub modulus: u64,
    /// `4 D(omega_n)` over `Z[l]`, constant term first.
    pub exact: Vec<BigInt>,
    /// The same coefficients reduced into `[0, modulus)`.
    pub reduced: Vec<BigInt>,
    pub ok: bool,
}

impl CongruenceReport {
    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "modulus": self.modulus,
            "ok": self.ok,
            "reduced": self.reduced.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        })
    }
}

/// Checks `4 D(binom(n, n/2) A_{n/2}) = 0 mod n + 1` coefficientwise.
pub fn congruence_check(n: u64) -> Result<CongruenceReport> {
    if n % 2 == 1 {
        return Err(Error::OddIndex(n));
    }
    if n < 2 {
        return Err(Error::Invalid("congruences start at n = 2".into()));
    }
    let p = legendre_omega_coeff(n)?;
    let four_d = apply_operator(&DiffOperator::legendre_times_four(), &p)?;
    let modulus = n + 1;
    let m = BigInt::from(modulus);
    let mut exact: Vec<BigInt> = z_l()
        .coefficients(four_d.elem())
        .unwrap_or(&[])
        .iter()
        .map(|c| z_l().scalar_ring().as_integer(c).cloned().expect("integer coefficient"))
        .collect();
    exact.resize(n as usize / 2 + 1, BigInt::zero());
    let reduced = exact.iter().map(|c| c.mod_floor(&m)).collect();
    let ok = divides_all_coeffs(&four_d, &m)?;
    Ok(CongruenceReport { n, modulus, exact, reduced, ok })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentralBinomReport {
    pub n: u64,
    pub modulus: u64,
    /// `binom(n, n/2) mod n + 1`, in `[0, n + 1)`.
    pub value: BigInt,
    pub is_pm_one: bool,
    pub modulus_prime: bool,
}

impl CentralBinomReport {
    /// The `+-1` claim is only enforced for prime moduli.
    pub fn ok(&self) -> bool {
        self.is_pm_one || !self.modulus_prime
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "modulus": self.modulus,
            "value": self.value.to_string(),
            "is_pm_one": self.is_pm_one,
            "modulus_prime": self.modulus_prime,
            "ok": self.ok(),
        })
    }
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

pub fn central_binom_congruence(n: u64) -> Result<CentralBinomReport> {
    if n % 2 == 1 {
        return Err(Error::OddIndex(n));
    }
    let modulus = n + 1;
    let m = BigInt::from(modulus);
    let value = binomial(n, n / 2).mod_floor(&m);
    let is_pm_one = modulus == 1 || value.is_one() || value == &m - 1;
    Ok(CentralBinomReport { n, modulus, value, is_pm_one, modulus_prime: is_prime(modulus) })
}

/// `2F1(1/2, 1/2; 1; l) = sum_{m <= N} binom(2m, m)^2 (l/16)^m` over `Q`.
pub fn hypergeom_half(trunc: u32) -> Result<TruncatedSeries> {
    let coeffs: Vec<Elem> = (0..=trunc as u64)
        .map(|m| {
            let num = binomial(2 * m, m).pow(2);
            Elem::Rat(BigRational::new(num, BigInt::from(16).pow(m as u32)))
        })
        .collect();
    TruncatedSeries::univariate(&RingSpec::Rationals, PARAM, trunc, coeffs)
}

/// `D` applied to the polynomial `hypergeom_half(trunc)`, as coefficients
/// over `Q` (constant term first).
pub fn hypergeom_residual(trunc: u32) -> Result<Vec<BigRational>> {
    let f = hypergeom_half(trunc)?;
    let p = RingValue::new(q_l(), Elem::Poly(f.dense()))?;
    let out = apply_operator(&DiffOperator::legendre(), &p)?;
    Ok(q_l()
        .coefficients(out.elem())
        .unwrap_or(&[])
        .iter()
        .map(|c| match c {
            Elem::Rat(x) => x.clone(),
            _ => unreachable!("rational coefficients"),
        })
        .collect())
}

/// Lowest degree at which `D(hypergeom_half(trunc))` is nonzero, or `None`
/// when it vanishes identically.
pub fn hypergeom_residual_order(trunc: u32) -> Result<Option<usize>> {
    Ok(hypergeom_residual(trunc)?.iter().position(|c| !c.is_zero()))
}

#[derive(Clone, Debug)]
pub struct SweepReport {
    pub max_n: u64,
    pub checks: Vec<CongruenceReport>,
    pub elapsed: Duration,
}

impl SweepReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    /// Byte-stable JSON; wall time is left out so that reruns compare equal.
    pub fn to_json(&self) -> Value {
        json!({
            "max_n": self.max_n,
            "ok": self.ok(),
            "checks": self.checks.iter().map(CongruenceReport::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Runs [`congruence_check`] for every even `2 <= n <= max_n`, in parallel,
/// collected in ascending `n`.
pub fn stienstra_sweep(max_n: u64) -> Result<SweepReport> {
    let start = Instant::now();
    let ns: Vec<u64> = (1..=max_n / 2).map(|i| 2 * i).collect();
    let checks = ns.par_iter().map(|&n| congruence_check(n)).collect::<Result<Vec<_>>>()?;
    Ok(SweepReport { max_n, checks, elapsed: start.elapsed() })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralityReport {
    pub trunc: u32,
    pub integral: bool,
    /// First coefficient, in graded order, whose denominator is not a power of 2.
    pub first_failure: Option<(Vec<u32>, String)>,
}

impl IntegralityReport {
    pub fn to_json(&self) -> Value {
        json!({
            "trunc": self.trunc,
            "integral": self.integral,
            "first_failure": self.first_failure.as_ref().map(|(e, c)| json!({"exp": e, "coeff": c})),
        })
    }
}

fn odd_part_is_one(mut d: BigInt) -> bool {
    let two = BigInt::from(2);
    while d.is_even() && !d.is_zero() {
        d /= &two;
    }
    d.abs().is_one()
}

/// Experimental: whether the Legendre law has coefficients in `Z[1/2][l]`
/// up to degree `trunc`. Reported, never asserted.
pub fn legendre_integrality(trunc: u32) -> Result<IntegralityReport> {
    let law = legendre_law(trunc)?;
    let f = &law.components()[0];
    let r = f.ring();
    let mut first_failure = None;
    for (e, c) in f.sorted_terms() {
        let ok = r
            .coefficients(c)
            .unwrap_or(&[])
            .iter()
            .all(|q| matches!(q, Elem::Rat(x) if odd_part_is_one(x.denom().clone())));
        if !ok {
            first_failure = Some((e.clone(), r.format(c)));
            break;
        }
    }
    Ok(IntegralityReport { trunc, integral: first_failure.is_none(), first_failure })
}
