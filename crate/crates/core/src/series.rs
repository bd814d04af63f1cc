//! Truncated multivariate power series.
//!
//! A [`TruncatedSeries`] is a sparse map from exponent vectors to nonzero
//! coefficients, with every term of total degree at most `trunc`. Equality
//! is equality of canonical forms, so two series compare equal exactly when
//! they agree as elements of `R[[x_1..x_d]] / (x)^(trunc+1)`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::hom::RingMap;
use crate::ring::{is_identifier, Elem, RingSpec};
use crate::value::{elem_from_json, elem_to_json};

pub type Exponent = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    ring: RingSpec,
    vars: Vec<String>,
    trunc: u32,
    terms: BTreeMap<Exponent, Elem>,
}

fn degree(e: &[u32]) -> u32 {
    e.iter().sum()
}

/// Graded lexicographic order: by total degree, then lexicographically with
/// the first variable largest (`x^2 < xy < y^2` is false; `x^2` comes first).
pub fn grlex(a: &[u32], b: &[u32]) -> Ordering {
    degree(a).cmp(&degree(b)).then_with(|| b.cmp(a))
}

impl TruncatedSeries {
    pub fn zero(ring: &RingSpec, vars: &[&str], trunc: u32) -> Result<Self> {
        if vars.is_empty() {
            return Err(Error::Invalid("a series needs at least one variable".into()));
        }
        for (i, v) in vars.iter().enumerate() {
            if !is_identifier(v) || vars[..i].contains(v) {
                return Err(Error::Invalid(format!("bad or repeated variable `{v}`")));
            }
        }
        Ok(TruncatedSeries {
            ring: ring.clone(),
            vars: vars.iter().map(|s| s.to_string()).collect(),
            trunc,
            terms: BTreeMap::new(),
        })
    }

    /// A series with the same ring, variables and truncation as `self`.
    pub fn zero_like(&self) -> Self {
        TruncatedSeries {
            ring: self.ring.clone(),
            vars: self.vars.clone(),
            trunc: self.trunc,
            terms: BTreeMap::new(),
        }
    }

    pub fn one_like(&self) -> Self {
        self.constant_like(self.ring.one())
    }

    pub fn constant_like(&self, c: Elem) -> Self {
        let mut out = self.zero_like();
        out.insert(vec![0; self.dim()], c);
        out
    }

    /// The `i`-th variable as a series.
    pub fn var_like(&self, i: usize) -> Self {
        let mut out = self.zero_like();
        let mut e = vec![0; self.dim()];
        e[i] = 1;
        out.insert(e, self.ring.one());
        out
    }

    pub fn one(ring: &RingSpec, vars: &[&str], trunc: u32) -> Result<Self> {
        Ok(Self::zero(ring, vars, trunc)?.one_like())
    }

    pub fn var(ring: &RingSpec, vars: &[&str], trunc: u32, i: usize) -> Result<Self> {
        if i >= vars.len() {
            return Err(Error::Invalid(format!("variable index {i} out of range")));
        }
        Ok(Self::zero(ring, vars, trunc)?.var_like(i))
    }

    /// Builds a series from arbitrary terms: coefficients are canonicalized,
    /// repeated exponents summed, and terms above `trunc` dropped.
    pub fn from_terms(
        ring: &RingSpec,
        vars: &[&str],
        trunc: u32,
        terms: impl IntoIterator<Item = (Exponent, Elem)>,
    ) -> Result<Self> {
        let mut out = Self::zero(ring, vars, trunc)?;
        for (e, c) in terms {
            if e.len() != vars.len() {
                return Err(Error::Invalid(format!(
                    "exponent {e:?} does not match {} variables",
                    vars.len()
                )));
            }
            let c = ring.canonicalize(&c)?;
            out.accumulate(e, &c);
        }
        Ok(out)
    }

    /// Univariate series from coefficients `c_0, c_1, ...`.
    pub fn univariate(ring: &RingSpec, var: &str, trunc: u32, coeffs: Vec<Elem>) -> Result<Self> {
        Self::from_terms(
            ring,
            &[var],
            trunc,
            coeffs.into_iter().enumerate().map(|(i, c)| (vec![i as u32], c)),
        )
    }

    pub(crate) fn from_dense(like: &Self, trunc: u32, coeffs: Vec<Elem>) -> Self {
        let mut out = like.zero_like();
        out.trunc = trunc;
        for (i, c) in coeffs.into_iter().enumerate() {
            out.insert(vec![i as u32], c);
        }
        out
    }

    fn insert(&mut self, e: Exponent, c: Elem) {
        if degree(&e) <= self.trunc && !self.ring.is_zero(&c) {
            self.terms.insert(e, c);
        }
    }

    fn accumulate(&mut self, e: Exponent, c: &Elem) {
        if degree(&e) > self.trunc {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(old) => {
                let s = self.ring.add(old, c);
                if self.ring.is_zero(&s) {
                    self.terms.remove(&e);
                } else {
                    *old = s;
                }
            }
            None => {
                if !self.ring.is_zero(c) {
                    self.terms.insert(e, c.clone());
                }
            }
        }
    }

    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Elem)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &[u32]) -> Elem {
        self.terms.get(e).cloned().unwrap_or_else(|| self.ring.zero())
    }

    pub fn constant_term(&self) -> Elem {
        self.coeff(&vec![0; self.dim()])
    }

    /// Coefficient of `x^k` in a univariate series.
    pub fn coeff1(&self, k: u32) -> Elem {
        self.coeff(&[k])
    }

    /// Dense coefficient vector `c_0..c_trunc` of a univariate series.
    pub fn dense(&self) -> Vec<Elem> {
        (0..=self.trunc).map(|k| self.coeff1(k)).collect()
    }

    /// Lowest total degree carrying a nonzero term.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|e| degree(e)).min()
    }

    fn var_refs(&self) -> Vec<&str> {
        self.vars.iter().map(String::as_str).collect()
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::SpecMismatch(format!("{} vs {}", self.ring, other.ring)));
        }
        if self.vars != other.vars {
            return Err(Error::SpecMismatch(format!("variables {:?} vs {:?}", self.vars, other.vars)));
        }
        if self.trunc != other.trunc {
            return Err(Error::SpecMismatch(format!("truncation {} vs {}", self.trunc, other.trunc)));
        }
        Ok(())
    }

    fn check_univariate(&self) -> Result<()> {
        if self.dim() != 1 {
            return Err(Error::ArityMismatch { expected: 1, got: self.dim() });
        }
        Ok(())
    }

    /// Drops every term above degree `n`; `n` may not exceed the current bound.
    pub fn truncate(&self, n: u32) -> Result<Self> {
        if n > self.trunc {
            return Err(Error::TruncationTooShort(format!(
                "cannot raise truncation from {} to {n}",
                self.trunc
            )));
        }
        let mut out = self.zero_like();
        out.trunc = n;
        out.terms = self.terms.iter().filter(|(e, _)| degree(e) <= n).map(|(e, c)| (e.clone(), c.clone())).collect();
        Ok(out)
    }

    /// Reinterprets the terms with a different variable list of the same length.
    pub fn rename(&self, vars: &[&str]) -> Result<Self> {
        if vars.len() != self.dim() {
            return Err(Error::ArityMismatch { expected: self.dim(), got: vars.len() });
        }
        let mut out = Self::zero(&self.ring, vars, self.trunc)?;
        out.terms = self.terms.clone();
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.accumulate(e.clone(), c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let mut out = self.zero_like();
        out.terms = self.terms.iter().map(|(e, c)| (e.clone(), self.ring.neg(c))).collect();
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Elem) -> Self {
        let mut out = self.zero_like();
        for (e, x) in &self.terms {
            out.insert(e.clone(), self.ring.mul(c, x));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let mut out = self.zero_like();
        if self.is_zero() || other.is_zero() {
            return out;
        }
        let right: Vec<(&Exponent, u32, &Elem)> =
            other.terms.iter().map(|(e, c)| (e, degree(e), c)).collect();
        let mut acc: BTreeMap<Exponent, Elem> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            let da = degree(ea);
            for (eb, db, cb) in &right {
                if da + db > self.trunc {
                    continue;
                }
                let e: Exponent = ea.iter().zip(eb.iter()).map(|(a, b)| a + b).collect();
                let p = self.ring.mul(ca, cb);
                match acc.get_mut(&e) {
                    Some(old) => *old = self.ring.add(old, &p),
                    None => {
                        acc.insert(e, p);
                    }
                }
            }
        }
        acc.retain(|_, c| !self.ring.is_zero(c));
        out.terms = acc;
        out
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = self.one_like();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        acc
    }

    /// Substitutes `args[i]` for the `i`-th variable. All arguments must share
    /// ring, variables and truncation, and have zero constant term. The result
    /// lives in the arguments' variables, truncated at
    /// `min(self.trunc, args.trunc)`.
    pub fn compose(&self, args: &[TruncatedSeries]) -> Result<Self> {
        if args.len() != self.dim() {
            return Err(Error::ArityMismatch { expected: self.dim(), got: args.len() });
        }
        let first = &args[0];
        for a in args {
            if a.ring != self.ring {
                return Err(Error::SpecMismatch(format!("{} vs {}", self.ring, a.ring)));
            }
            if a.vars != first.vars || a.trunc != first.trunc {
                return Err(Error::SpecMismatch("substituted series disagree on variables or truncation".into()));
            }
            if !a.ring.is_zero(&a.constant_term()) {
                return Err(Error::NonzeroConstantTerm);
            }
        }
        let trunc = self.trunc.min(first.trunc);
        let mut template = first.zero_like();
        template.trunc = trunc;
        let args: Vec<TruncatedSeries> = args
            .iter()
            .map(|a| {
                let mut a = a.truncate(trunc).expect("trunc bounded by argument");
                a.trunc = trunc;
                a
            })
            .collect();

        // powers[i][k] = args[i]^k, filled lazily up to the largest exponent used.
        let mut max_exp = vec![0u32; self.dim()];
        for e in self.terms.keys().filter(|e| degree(e) <= trunc) {
            for (m, x) in max_exp.iter_mut().zip(e) {
                *m = (*m).max(*x);
            }
        }
        let powers: Vec<Vec<TruncatedSeries>> = args
            .iter()
            .zip(&max_exp)
            .map(|(a, &m)| {
                let mut p = vec![template.one_like()];
                for k in 1..=m as usize {
                    let next = p[k - 1].mul_unchecked(a);
                    p.push(next);
                }
                p
            })
            .collect();

        let mut out = template.clone();
        for (e, c) in self.terms.iter().filter(|(e, _)| degree(e) <= trunc) {
            let mut term = template.constant_like(c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    term = term.mul_unchecked(&powers[i][k as usize]);
                    if term.is_zero() {
                        break;
                    }
                }
            }
            for (te, tc) in &term.terms {
                out.accumulate(te.clone(), tc);
            }
        }
        Ok(out)
    }

    /// Multiplicative inverse; the constant term must be a unit.
    pub fn invert(&self) -> Result<Self> {
        let c0 = self.constant_term();
        let c0_inv = self.ring.inv(&c0).ok_or(Error::NonUnitConstantTerm)?;
        // f = c0 (1 + h), 1/f = c0^-1 sum (-h)^j.
        let h = self.scale(&c0_inv).sub(&self.one_like())?;
        let minus_h = h.neg();
        let mut acc = self.one_like();
        let mut term = self.one_like();
        for _ in 0..self.trunc {
            term = term.mul_unchecked(&minus_h);
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term)?;
        }
        Ok(acc.scale(&c0_inv))
    }

    /// Compositional inverse of a univariate series with zero constant term
    /// and unit linear coefficient, solved one degree at a time.
    pub fn reversion(&self) -> Result<Self> {
        self.check_univariate()?;
        if !self.ring.is_zero(&self.constant_term()) {
            return Err(Error::NotReversible("nonzero constant term".into()));
        }
        let a1 = self.coeff1(1);
        let a1_inv = self
            .ring
            .inv(&a1)
            .ok_or_else(|| Error::NotReversible(format!("linear coefficient {} is not a unit", self.ring.format(&a1))))?;
        let f = self.dense();
        let n = self.trunc as usize;
        let r = &self.ring;
        let mut g = vec![r.zero(); n + 1];
        if n >= 1 {
            g[1] = a1_inv.clone();
        }
        for k in 2..=n {
            // Coefficient of x^k in f(g) using only g_1..g_{k-1}; g_k enters as a1*g_k.
            let c = dense_compose_coeff(r, &f, &g[..k], k);
            g[k] = r.neg(&r.mul(&c, &a1_inv));
        }
        Ok(Self::from_dense(self, self.trunc, g))
    }

    /// Compositional inverse of a system `l_j = x_j + (higher order)` in
    /// `d` variables: the unique `e` with `l(e(x)) = x`.
    pub fn reversion_system(system: &[TruncatedSeries]) -> Result<Vec<TruncatedSeries>> {
        let d = system.len();
        let first = system.first().ok_or_else(|| Error::Invalid("empty system".into()))?;
        for (j, l) in system.iter().enumerate() {
            l.check_compatible(first)?;
            if l.dim() != d {
                return Err(Error::ArityMismatch { expected: d, got: l.dim() });
            }
            let low = 1.min(l.trunc);
            if l.truncate(low)? != first.var_like(j).truncate(low)? {
                return Err(Error::NotReversible(format!(
                    "component {j} does not start with its own variable"
                )));
            }
        }
        let ids: Vec<TruncatedSeries> = (0..d).map(|j| first.var_like(j)).collect();
        let higher: Vec<TruncatedSeries> =
            system.iter().zip(&ids).map(|(l, x)| l.sub(x)).collect::<Result<_>>()?;
        let mut e = ids.clone();
        // Each pass fixes one more degree.
        for _ in 1..first.trunc {
            let next: Vec<TruncatedSeries> = higher
                .iter()
                .zip(&ids)
                .map(|(h, x)| x.sub(&h.compose(&e)?))
                .collect::<Result<_>>()?;
            if next == e {
                break;
            }
            e = next;
        }
        Ok(e)
    }

    /// Term-wise antiderivative of a univariate series, zero constant of
    /// integration. The result carries truncation `trunc + 1`.
    pub fn integrate(&self) -> Result<Self> {
        self.check_univariate()?;
        let mut out = self.zero_like();
        out.trunc = self.trunc + 1;
        for (e, c) in &self.terms {
            let k = e[0] as u64 + 1;
            let q = self.ring.div_int(c, &BigInt::from(k)).ok_or(Error::NonInvertibleIndex(k))?;
            out.insert(vec![e[0] + 1], q);
        }
        Ok(out)
    }

    /// Partial derivative in variable `i`; the result carries `trunc - 1`.
    pub fn derivative(&self, i: usize) -> Result<Self> {
        if i >= self.dim() {
            return Err(Error::Invalid(format!("variable index {i} out of range")));
        }
        let mut out = self.zero_like();
        out.trunc = self.trunc.saturating_sub(1);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut f = e.clone();
            f[i] -= 1;
            out.insert(f, self.ring.mul_int(c, e[i] as i64));
        }
        Ok(out)
    }

    /// `log(1 + u) = sum (-1)^(k+1) u^k / k` for `u` with zero constant term.
    pub fn log1p(&self) -> Result<Self> {
        if !self.ring.is_zero(&self.constant_term()) {
            return Err(Error::NonzeroConstantTerm);
        }
        let mut acc = self.zero_like();
        let mut power = self.one_like();
        for k in 1..=self.trunc.max(1) {
            power = power.mul_unchecked(self);
            if power.is_zero() {
                break;
            }
            let mut term = power.zero_like();
            for (e, c) in &power.terms {
                let q = self
                    .ring
                    .div_int(c, &BigInt::from(k))
                    .ok_or(Error::NonInvertibleIndex(k as u64))?;
                term.insert(e.clone(), q);
            }
            acc = if k % 2 == 1 { acc.add(&term)? } else { acc.sub(&term)? };
        }
        Ok(acc)
    }

    /// `g(x) -> g(x^n)` for a univariate series, kept to degree `trunc`.
    /// Terms of `g` above `trunc / n` cannot contribute.
    pub fn substitute_power(&self, n: u32, trunc: u32) -> Result<Self> {
        self.check_univariate()?;
        if n == 0 {
            return Err(Error::Invalid("substitution x -> x^0".into()));
        }
        let mut out = self.zero_like();
        out.trunc = trunc;
        for (e, c) in &self.terms {
            out.insert(vec![e[0] * n], c.clone());
        }
        Ok(out)
    }

    /// `g(x) -> g(c x)` for a univariate series.
    pub fn scale_variable(&self, c: &Elem) -> Result<Self> {
        self.check_univariate()?;
        let mut out = self.zero_like();
        for (e, x) in &self.terms {
            out.insert(e.clone(), self.ring.mul(x, &self.ring.pow(c, e[0] as u64)));
        }
        Ok(out)
    }

    /// Applies a ring map to every coefficient.
    pub fn map_coeffs(&self, map: &RingMap) -> Result<Self> {
        if map.source() != &self.ring {
            return Err(Error::SpecMismatch(format!("map from {} applied to {}", map.source(), self.ring)));
        }
        let mut out = Self::zero(map.target(), &self.var_refs(), self.trunc)?;
        for (e, c) in &self.terms {
            let img = map.apply(c)?;
            out.insert(e.clone(), img);
        }
        Ok(out)
    }

    /// Graded-lexicographic term list.
    pub fn sorted_terms(&self) -> Vec<(&Exponent, &Elem)> {
        let mut t: Vec<_> = self.terms.iter().collect();
        t.sort_by(|a, b| grlex(a.0, b.0));
        t
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .sorted_terms()
            .into_iter()
            .map(|(e, c)| json!({"exp": e, "coeff": elem_to_json(&self.ring, c)}))
            .collect();
        json!({
            "ring": self.ring.to_string(),
            "vars": self.vars,
            "trunc": self.trunc,
            "terms": terms,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let ring = RingSpec::parse(
            v.get("ring").and_then(Value::as_str).ok_or_else(|| Error::Parse("series needs a \"ring\"".into()))?,
        )?;
        Self::from_json_in(v, &ring)
    }

    /// Like [`Self::from_json`], with `ring` used when the value has none.
    pub fn from_json_in(v: &Value, default_ring: &RingSpec) -> Result<Self> {
        let ring = match v.get("ring").and_then(Value::as_str) {
            Some(s) => RingSpec::parse(s)?,
            None => default_ring.clone(),
        };
        let vars: Vec<String> = match v.get("vars") {
            Some(Value::Array(items)) => items
                .iter()
                .map(|x| x.as_str().map(str::to_string).ok_or_else(|| Error::Parse("variable names must be strings".into())))
                .collect::<Result<_>>()?,
            _ => return Err(Error::Parse("series needs \"vars\"".into())),
        };
        let trunc = v
            .get("trunc")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("series needs an integer \"trunc\"".into()))? as u32;
        let empty = Vec::new();
        let items = match v.get("terms") {
            Some(Value::Array(items)) => items,
            None => &empty,
            _ => return Err(Error::Parse("\"terms\" must be an array".into())),
        };
        let mut terms = Vec::with_capacity(items.len());
        for t in items {
            let exp: Exponent = match t.get("exp") {
                Some(Value::Array(xs)) => xs
                    .iter()
                    .map(|x| x.as_u64().map(|x| x as u32).ok_or_else(|| Error::Parse("exponents must be nonnegative integers".into())))
                    .collect::<Result<_>>()?,
                _ => return Err(Error::Parse("term needs \"exp\"".into())),
            };
            let coeff = elem_from_json(&ring, t.get("coeff").ok_or_else(|| Error::Parse("term needs \"coeff\"".into()))?)?;
            terms.push((exp, coeff));
        }
        let vars: Vec<&str> = vars.iter().map(String::as_str).collect();
        Self::from_terms(&ring, &vars, trunc, terms)
    }
}

/// Coefficient of `x^k` in `f(g)` for dense `f`, `g` with `g_0 = 0`.
fn dense_compose_coeff(r: &RingSpec, f: &[Elem], g: &[Elem], k: usize) -> Elem {
    // Accumulate g^j truncated at degree k.
    let mut power = vec![r.zero(); k + 1];
    power[0] = r.one();
    let mut total = r.zero();
    for fj in f.iter().take(k + 1).skip(1) {
        let mut next = vec![r.zero(); k + 1];
        for (a, pa) in power.iter().enumerate() {
            if r.is_zero(pa) {
                continue;
            }
            for (b, gb) in g.iter().enumerate().skip(1) {
                if a + b > k {
                    break;
                }
                next[a + b] = r.add(&next[a + b], &r.mul(pa, gb));
            }
        }
        power = next;
        total = r.add(&total, &r.mul(fj, &power[k]));
    }
    total
}

impl std::fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut out = String::new();
        for (e, c) in self.sorted_terms() {
            let mono: Vec<String> = e
                .iter()
                .zip(&self.vars)
                .filter(|(k, _)| **k > 0)
                .map(|(k, v)| if *k == 1 { v.clone() } else { format!("{v}^{k}") })
                .collect();
            let mono = mono.join("*");
            let mut coeff = self.ring.format(c);
            let compound = coeff[1..].contains(['+', '-']);
            let negative = !compound && coeff.starts_with('-');
            if negative {
                coeff.remove(0);
            }
            if compound {
                coeff = format!("({coeff})");
            }
            if out.is_empty() {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            match (mono.is_empty(), coeff == "1") {
                (true, _) => out.push_str(&coeff),
                (false, true) => out.push_str(&mono),
                (false, false) => {
                    let _ = write!(out, "{coeff}*{mono}");
                }
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        let big_o = if self.dim() == 1 && self.trunc == 0 {
            format!("O({})", self.vars[0])
        } else if self.dim() == 1 {
            format!("O({}^{})", self.vars[0], self.trunc + 1)
        } else {
            format!("O(deg {})", self.trunc + 1)
        };
        write!(f, "{out} + {big_o}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::rational;
    use proptest::prelude::*;

    fn q() -> RingSpec {
        RingSpec::Rationals
    }

    fn uni(ring: &RingSpec, trunc: u32, coeffs: &[i64]) -> TruncatedSeries {
        TruncatedSeries::univariate(ring, "x", trunc, coeffs.iter().map(|&c| ring.from_int(c)).collect()).unwrap()
    }

    fn log_series(n: u32) -> TruncatedSeries {
        let r = q();
        TruncatedSeries::univariate(&r, "x", n, (0..=n as i64).map(|k| if k == 0 { r.zero() } else { rational(1, k) }).collect())
            .unwrap()
    }

    #[test]
    fn products() {
        let z = RingSpec::Integers;
        assert_eq!(uni(&z, 2, &[1, -2]).mul(&uni(&z, 2, &[1, -3])).unwrap(), uni(&z, 2, &[1, -5, 6]));
        let a = uni(&z, 4, &[3, 1, 4, 1, 5]);
        assert_eq!(a.mul(&a.one_like()).unwrap(), a);
        let x = TruncatedSeries::var(&z, &["x", "y"], 2, 0).unwrap();
        let y = x.var_like(1);
        let p = x.add(&y).unwrap().mul(&x.sub(&y).unwrap()).unwrap();
        let expected = x.pow(2).sub(&y.pow(2)).unwrap();
        assert_eq!(p, expected);
        assert!(a.mul(&uni(&z, 3, &[1])).is_err());
    }

    #[test]
    fn compositions() {
        let r = q();
        let f = log_series(4);
        let x2 = TruncatedSeries::univariate(&r, "x", 4, vec![r.zero(), r.zero(), r.one()]).unwrap();
        // Direct substitution: sum_{k<=4} x^(2k)/k truncated to degree 4.
        let expected =
            TruncatedSeries::univariate(&r, "x", 4, vec![r.zero(), r.zero(), r.one(), r.zero(), rational(1, 2)]).unwrap();
        assert_eq!(f.compose(&[x2]).unwrap(), expected);
        assert_eq!(f.compose(&[f.var_like(0)]).unwrap(), f);

        let z = RingSpec::Integers;
        let x = TruncatedSeries::var(&z, &["x", "y"], 6, 0).unwrap();
        let y = x.var_like(1);
        let law = x.add(&y).unwrap().sub(&x.mul(&y).unwrap()).unwrap();
        let u = TruncatedSeries::var(&z, &["u"], 6, 0).unwrap();
        assert_eq!(law.compose(&[u.clone(), u.zero_like()]).unwrap(), u);

        assert!(matches!(f.compose(&[f.one_like()]), Err(Error::NonzeroConstantTerm)));
        assert!(matches!(law.compose(std::slice::from_ref(&u)), Err(Error::ArityMismatch { .. })));
    }

    #[test]
    fn inverses() {
        let z = RingSpec::Integers;
        assert_eq!(uni(&z, 3, &[1, -1]).invert().unwrap(), uni(&z, 3, &[1, 1, 1, 1]));
        assert_eq!(uni(&z, 3, &[1]).invert().unwrap(), uni(&z, 3, &[1]));
        assert_eq!(uni(&z, 2, &[1, -1, -1]).invert().unwrap(), uni(&z, 2, &[1, 1, 2]));
        assert!(matches!(uni(&z, 2, &[2, 1]).invert(), Err(Error::NonUnitConstantTerm)));
    }

    #[test]
    fn reversions() {
        let r = q();
        let expected = TruncatedSeries::univariate(
            &r,
            "x",
            4,
            vec![r.zero(), r.one(), rational(-1, 2), rational(1, 6), rational(-1, 24)],
        )
        .unwrap();
        assert_eq!(log_series(4).reversion().unwrap(), expected);
        let z = RingSpec::Integers;
        assert_eq!(uni(&z, 5, &[0, 1]).reversion().unwrap(), uni(&z, 5, &[0, 1]));
        assert_eq!(uni(&z, 3, &[0, 1, -1]).reversion().unwrap(), uni(&z, 3, &[0, 1, 1, 2]));
        assert!(matches!(uni(&z, 3, &[0, 2, 1]).reversion(), Err(Error::NotReversible(_))));
    }

    #[test]
    fn integrals_and_logs() {
        let r = q();
        let s = TruncatedSeries::univariate(&r, "x", 2, vec![r.one(), r.one(), r.one()]).unwrap();
        let expected =
            TruncatedSeries::univariate(&r, "x", 3, vec![r.zero(), r.one(), rational(1, 2), rational(1, 3)]).unwrap();
        assert_eq!(s.integrate().unwrap(), expected);
        let geom = uni(&r, 3, &[1, -1]).invert().unwrap();
        assert_eq!(geom.integrate().unwrap(), log_series(4));
        assert!(uni(&r, 3, &[]).integrate().unwrap().is_zero());
        assert!(matches!(uni(&RingSpec::Integers, 3, &[0, 1]).integrate(), Err(Error::NonInvertibleIndex(2))));

        let minus_x = uni(&r, 6, &[0, -1]);
        assert_eq!(minus_x.log1p().unwrap(), log_series(6).neg());
        assert!(uni(&r, 4, &[]).log1p().unwrap().is_zero());
    }

    #[test]
    fn display() {
        let r = q();
        assert_eq!(log_series(3).to_string(), "x + 1/2*x^2 + 1/3*x^3 + O(x^4)");
        assert_eq!(uni(&RingSpec::Integers, 2, &[1, -5, 6]).to_string(), "1 - 5*x + 6*x^2 + O(x^3)");
        assert_eq!(uni(&r, 1, &[]).to_string(), "0 + O(x^2)");
    }

    #[test]
    fn json_layout() {
        let z = RingSpec::Integers;
        let x = TruncatedSeries::var(&z, &["x", "y"], 2, 0).unwrap();
        let y = x.var_like(1);
        let s = x.add(&y).unwrap().sub(&x.mul(&y).unwrap()).unwrap();
        let v = s.to_json();
        assert_eq!(
            v,
            json!({"ring": "Z", "vars": ["x", "y"], "trunc": 2, "terms": [
                {"exp": [1, 0], "coeff": "1"},
                {"exp": [0, 1], "coeff": "1"},
                {"exp": [1, 1], "coeff": "-1"},
            ]})
        );
        assert_eq!(TruncatedSeries::from_json(&v).unwrap(), s);
    }

    // exp(u) = sum u^k / k!, used only as an oracle for log1p.
    fn exp_oracle(u: &TruncatedSeries) -> TruncatedSeries {
        let r = u.ring().clone();
        let mut acc = u.one_like();
        let mut term = u.one_like();
        for k in 1..=u.trunc() {
            term = term.mul(u).unwrap().scale(&rational(1, k as i64));
            acc = acc.add(&term).unwrap();
        }
        let _ = r;
        acc
    }

    fn lagrange_oracle(f: &TruncatedSeries) -> TruncatedSeries {
        // [x^n] g = (1/n) [x^(n-1)] (x / f)^n
        let r = f.ring().clone();
        let n = f.trunc();
        let mut wide = f.zero_like();
        wide.trunc = n + 1;
        for (e, c) in f.terms() {
            wide.insert(e.clone(), c.clone());
        }
        // x / f = 1 / (f / x)
        let shifted = TruncatedSeries::univariate(&r, "x", n, (1..=n + 1).map(|k| wide.coeff1(k)).collect()).unwrap();
        let q = shifted.invert().unwrap();
        let mut coeffs = vec![r.zero()];
        for m in 1..=n {
            let c = q.pow(m).coeff1(m - 1);
            coeffs.push(r.div_int(&c, &BigInt::from(m)).unwrap());
        }
        TruncatedSeries::univariate(&r, "x", n, coeffs).unwrap()
    }

    fn arb_q_series(n: u32, zero_const: bool) -> impl Strategy<Value = TruncatedSeries> {
        proptest::collection::vec((-9i64..10, 1i64..5), (n + 1) as usize).prop_map(move |cs| {
            let r = RingSpec::Rationals;
            let coeffs = cs
                .iter()
                .enumerate()
                .map(|(i, &(a, b))| if i == 0 && zero_const { r.zero() } else { rational(a, b) })
                .collect();
            TruncatedSeries::univariate(&r, "x", n, coeffs).unwrap()
        })
    }

    fn arb_zm_series(n: u32) -> impl Strategy<Value = TruncatedSeries> {
        proptest::collection::vec(0i64..360, (n + 1) as usize).prop_map(move |cs| {
            let r = RingSpec::integers_mod(360).unwrap();
            TruncatedSeries::univariate(&r, "x", n, cs.iter().map(|&c| r.from_int(c)).collect()).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn series_ring_axioms(a in arb_zm_series(8), b in arb_zm_series(8), c in arb_zm_series(8)) {
            prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
            prop_assert_eq!(a.mul(&b.add(&c).unwrap()).unwrap(), a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap());
        }

        #[test]
        fn series_ring_axioms_q(a in arb_q_series(6, false), b in arb_q_series(6, false), c in arb_q_series(6, false)) {
            prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        }

        #[test]
        fn composition_is_associative(f in arb_q_series(6, true), g in arb_q_series(6, true), h in arb_q_series(6, true)) {
            let left = f.compose(std::slice::from_ref(&g)).unwrap().compose(std::slice::from_ref(&h)).unwrap();
            let right = f.compose(&[g.compose(&[h]).unwrap()]).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn reversion_is_two_sided(f in arb_q_series(7, true), lead in 1i64..5) {
            let r = RingSpec::Rationals;
            let mut f = f;
            f.terms.insert(vec![1], r.from_int(lead));
            let g = f.reversion().unwrap();
            let x = f.var_like(0);
            prop_assert_eq!(f.compose(std::slice::from_ref(&g)).unwrap(), x.clone());
            prop_assert_eq!(g.compose(&[f.clone()]).unwrap(), x);
            prop_assert_eq!(g, lagrange_oracle(&f));
        }

        #[test]
        fn inverse_is_inverse(f in arb_zm_series(8), c in 0i64..360) {
            let r = f.ring().clone();
            let mut f = f;
            // make the constant term a unit mod 360
            let unit = [1i64, 7, 11, 13, 17, 19, 23, 29][(c as usize) % 8];
            f.terms.insert(vec![0], r.from_int(unit));
            prop_assert_eq!(f.mul(&f.invert().unwrap()).unwrap(), f.one_like());
        }

        #[test]
        fn exp_log1p_roundtrip(u in arb_q_series(6, true)) {
            let back = exp_oracle(&u.log1p().unwrap()).sub(&u.one_like()).unwrap();
            prop_assert_eq!(back, u);
        }

        #[test]
        fn truncation_coherence(f in arb_q_series(9, true), g in arb_q_series(9, false)) {
            let n = 6;
            let (fs, gs) = (f.truncate(n).unwrap(), g.truncate(n).unwrap());
            prop_assert_eq!(f.mul(&g).unwrap().truncate(n).unwrap(), fs.mul(&gs).unwrap());
            prop_assert_eq!(g.compose(std::slice::from_ref(&f)).unwrap().truncate(n).unwrap(), gs.compose(std::slice::from_ref(&fs)).unwrap());
            prop_assert_eq!(f.log1p().unwrap().truncate(n).unwrap(), fs.log1p().unwrap());
            prop_assert_eq!(f.integrate().unwrap().truncate(n + 1).unwrap(), fs.integrate().unwrap());
            let mut fl = f.clone();
            fl.terms.insert(vec![1], RingSpec::Rationals.one());
            let fls = fl.truncate(n).unwrap();
            prop_assert_eq!(fl.reversion().unwrap().truncate(n).unwrap(), fls.reversion().unwrap());
            let mut gu = g.clone();
            gu.terms.insert(vec![0], RingSpec::Rationals.one());
            prop_assert_eq!(gu.invert().unwrap().truncate(n).unwrap(), gu.truncate(n).unwrap().invert().unwrap());
        }

        #[test]
        fn json_roundtrip(f in arb_q_series(5, false)) {
            let v = f.to_json();
            let back = TruncatedSeries::from_json(&v).unwrap();
            prop_assert_eq!(back.to_json(), v);
            prop_assert_eq!(back, f);
        }
    }
}
