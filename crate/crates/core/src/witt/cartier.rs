//! Elements of the Cartier ring in canonical form `sum V_n [a_nm] F_m`.
//!
//! Every element is stored modulo the V-filtration: terms with `n >= vbound`
//! are dropped. Sums and products are reduced with the relations
//!
//! ```text
//! F_n V_n = n        [c] V_n = V_n [c^n]      F_n [c] = [c^n] F_n
//! V_m V_n = V_nm     F_n F_m = F_nm           F_n V_m = V_m F_n  (gcd 1)
//! ```
//!
//! and with the fact that `sum_j V_j [e_j] F_j` is the image of the Witt
//! vector `prod_j (1 - e_j x^j)`. Coefficients that collide at one `(n, m)`
//! are collected as a Witt vector in a bucket and split back into
//! Teichmüller terms, which pushes the carries to `(nj, mj)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ring::{Elem, RingSpec};
use crate::series::TruncatedSeries;
use crate::value::{elem_from_json, elem_to_json, parse_elem};

use super::{frobenius, teichmuller_action, verschiebung_to, witt_add, WittVector};

/// Canonical element `sum V_n [a_nm] F_m`, exact for all `n < vbound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartierElement {
    ring: RingSpec,
    vbound: usize,
    terms: BTreeMap<(u32, u32), Elem>,
}

/// Witt vectors collected per `(n, m)` while reducing.
struct Buckets<'a> {
    ring: &'a RingSpec,
    vbound: usize,
    series: BTreeMap<(u32, u32), Vec<Elem>>,
}

impl<'a> Buckets<'a> {
    fn new(ring: &'a RingSpec, vbound: usize) -> Self {
        Buckets { ring, vbound, series: BTreeMap::new() }
    }

    /// Adds `g` copies of `V_n [c] F_m`.
    fn push(&mut self, n: u32, m: u32, c: &Elem, g: &BigInt) {
        let r = self.ring;
        if n as usize >= self.vbound || r.is_zero(c) || g.is_zero() {
            return;
        }
        let prec = (self.vbound - 1) / n as usize;
        let factor = binomial_power(r, c, g, prec);
        let slot = self.series.entry((n, m)).or_insert_with(|| {
            let mut one = vec![r.zero(); prec + 1];
            one[0] = r.one();
            one
        });
        *slot = dense_mul(r, slot, &factor);
    }

    fn finish(mut self) -> CartierElement {
        let r = self.ring;
        let mut terms = BTreeMap::new();
        while let Some(((n, m), s)) = self.series.pop_first() {
            let e = decompose(r, s);
            for (j, c) in e.iter().enumerate() {
                let j = j as u32 + 1;
                if j == 1 {
                    if !r.is_zero(c) {
                        terms.insert((n, m), c.clone());
                    }
                } else {
                    self.push(n * j, m * j, c, &BigInt::one());
                }
            }
        }
        CartierElement { ring: r.clone(), vbound: self.vbound, terms }
    }
}

fn dense_mul(r: &RingSpec, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
    let prec = a.len().min(b.len());
    let mut out = vec![r.zero(); prec];
    for (i, x) in a.iter().enumerate().take(prec) {
        if r.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(prec - i) {
            out[i + j] = r.add(&out[i + j], &r.mul(x, y));
        }
    }
    out
}

/// Coefficients of `(1 - c x)^g` up to `x^prec`, for any integer `g`.
fn binomial_power(r: &RingSpec, c: &Elem, g: &BigInt, prec: usize) -> Vec<Elem> {
    let mut out = Vec::with_capacity(prec + 1);
    let mut binom = BigInt::one();
    let minus_c = r.neg(c);
    let mut power = r.one();
    for j in 0..=prec {
        if j > 0 {
            binom = binom * (g - BigInt::from(j - 1)) / BigInt::from(j);
            power = r.mul(&power, &minus_c);
        }
        out.push(r.mul(&r.from_bigint(&binom), &power));
    }
    out
}

/// Writes `s = prod_{j >= 1} (1 - e_j x^j)` and returns `e_1..e_prec`.
fn decompose(r: &RingSpec, mut s: Vec<Elem>) -> Vec<Elem> {
    let prec = s.len() - 1;
    let mut e = Vec::with_capacity(prec);
    for j in 1..=prec {
        let ej = r.neg(&s[j]);
        if !r.is_zero(&ej) {
            // divide by 1 - e_j x^j
            for i in j..=prec {
                let carry = r.mul(&ej, &s[i - j]);
                s[i] = r.add(&s[i], &carry);
            }
        }
        e.push(ej);
    }
    e
}

impl CartierElement {
    pub fn zero(ring: &RingSpec, vbound: usize) -> Result<Self> {
        check_vbound(vbound)?;
        Ok(CartierElement { ring: ring.clone(), vbound, terms: BTreeMap::new() })
    }

    /// Sums `V_n [a] F_m` over the given triples; repeated `(n, m)` pairs
    /// are added in the Cartier ring, not coefficientwise.
    pub fn from_terms(ring: &RingSpec, vbound: usize, terms: impl IntoIterator<Item = (u32, u32, Elem)>) -> Result<Self> {
        check_vbound(vbound)?;
        let mut b = Buckets::new(ring, vbound);
        for (n, m, a) in terms {
            if n == 0 || m == 0 {
                return Err(Error::Invalid("operator indices start at 1".into()));
            }
            b.push(n, m, &ring.canonicalize(&a)?, &BigInt::one());
        }
        Ok(b.finish())
    }

    pub fn integer(ring: &RingSpec, vbound: usize, z: &BigInt) -> Result<Self> {
        check_vbound(vbound)?;
        let mut b = Buckets::new(ring, vbound);
        b.push(1, 1, &ring.one(), z);
        Ok(b.finish())
    }

    pub fn v(ring: &RingSpec, vbound: usize, n: u32) -> Result<Self> {
        Self::from_terms(ring, vbound, [(n, 1, ring.one())])
    }

    pub fn f(ring: &RingSpec, vbound: usize, m: u32) -> Result<Self> {
        Self::from_terms(ring, vbound, [(1, m, ring.one())])
    }

    pub fn teichmuller(ring: &RingSpec, vbound: usize, c: Elem) -> Result<Self> {
        Self::from_terms(ring, vbound, [(1, 1, c)])
    }

    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    pub fn vbound(&self) -> usize {
        self.vbound
    }

    /// Nonzero coefficients `a_nm`, ordered by `(n, m)`.
    pub fn terms(&self) -> &BTreeMap<(u32, u32), Elem> {
        &self.terms
    }

    pub fn coeff(&self, n: u32, m: u32) -> Elem {
        self.terms.get(&(n, m)).cloned().unwrap_or_else(|| self.ring.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Restriction to a smaller V-cutoff.
    pub fn with_vbound(&self, vbound: usize) -> Result<Self> {
        check_vbound(vbound)?;
        if vbound > self.vbound {
            return Err(Error::TruncationTooShort(format!(
                "element is known only below V_{}",
                self.vbound
            )));
        }
        let terms = self.terms.iter().filter(|((n, _), _)| (*n as usize) < vbound).map(|(k, v)| (*k, v.clone())).collect();
        Ok(CartierElement { ring: self.ring.clone(), vbound, terms })
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::SpecMismatch(format!("{} vs {}", self.ring, other.ring)));
        }
        Ok(())
    }

    /// Sum, exact below the smaller of the two cutoffs.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut b = Buckets::new(&self.ring, self.vbound.min(other.vbound));
        for ((n, m), a) in self.terms.iter().chain(&other.terms) {
            b.push(*n, *m, a, &BigInt::one());
        }
        Ok(b.finish())
    }

    pub fn neg(&self) -> Self {
        let mut b = Buckets::new(&self.ring, self.vbound);
        for ((n, m), a) in &self.terms {
            b.push(*n, *m, a, &BigInt::from(-1));
        }
        b.finish()
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// The right factor's cutoff needed for a product exact below `vbound`:
    /// `F_m` lowers the V-index `N` of a right term to `N / gcd(m, N)`.
    pub fn right_cutoff_for(&self, vbound: usize) -> usize {
        self.terms
            .keys()
            .filter(|(n, _)| (*n as usize) < vbound)
            .map(|(n, m)| (vbound * *m as usize).div_ceil(*n as usize))
            .max()
            .unwrap_or(2)
            .max(2)
    }

    /// Product, exact below the largest cutoff both factors support.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut vbound = self.vbound;
        while self.right_cutoff_for(vbound) > other.vbound {
            vbound -= 1;
        }
        check_vbound(vbound)?;
        let r = &self.ring;
        let mut b = Buckets::new(r, vbound);
        for ((n, m), a) in &self.terms {
            for ((big_n, big_m), c) in &other.terms {
                // V_n[a] F_m V_N [c] F_M = g V_{n N'} [a^N' c^m'] F_{m' M}
                let g = m.gcd(big_n);
                let (n2, m2) = (big_n / g, m / g);
                let vn = *n as u64 * n2 as u64;
                if vn >= vbound as u64 {
                    continue;
                }
                let coeff = r.mul(&r.pow(a, n2 as u64), &r.pow(c, m2 as u64));
                b.push(vn as u32, m2 * big_m, &coeff, &BigInt::from(g));
            }
        }
        Ok(b.finish())
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|((n, m), a)| json!({"n": n, "m": m, "a": elem_to_json(&self.ring, a)}))
            .collect();
        json!({"ring": self.ring.to_string(), "vbound": self.vbound, "terms": terms})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let ring = RingSpec::parse(v.get("ring").and_then(Value::as_str).ok_or_else(|| Error::Parse("missing \"ring\"".into()))?)?;
        let vbound = v.get("vbound").and_then(Value::as_u64).ok_or_else(|| Error::Parse("missing \"vbound\"".into()))? as usize;
        let items = v.get("terms").and_then(Value::as_array).ok_or_else(|| Error::Parse("missing \"terms\"".into()))?;
        let mut terms = Vec::new();
        for t in items {
            let idx = |key: &str| {
                t.get(key).and_then(Value::as_u64).and_then(|x| u32::try_from(x).ok()).ok_or_else(|| Error::Parse(format!("term needs \"{key}\"")))
            };
            let a = elem_from_json(&ring, t.get("a").ok_or_else(|| Error::Parse("term needs \"a\"".into()))?)?;
            terms.push((idx("n")?, idx("m")?, a));
        }
        Self::from_terms(&ring, vbound, terms)
    }
}

impl std::fmt::Display for CartierElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((n, m), a)| {
                let mut s = String::new();
                if *n > 1 {
                    s.push_str(&format!("V{n}"));
                }
                s.push_str(&format!("[{}]", self.ring.format(a)));
                if *m > 1 {
                    s.push_str(&format!("F{m}"));
                }
                s
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

fn check_vbound(vbound: usize) -> Result<()> {
    if vbound < 2 {
        return Err(Error::VBoundTooSmall(vbound));
    }
    Ok(())
}

/// A formal word in `V_n`, `F_m`, `[c]`, integers, `+`, `-` and products.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CartierExpr {
    Int(BigInt),
    V(u32),
    F(u32),
    Teich(Elem),
    Add(Box<CartierExpr>, Box<CartierExpr>),
    Neg(Box<CartierExpr>),
    Mul(Box<CartierExpr>, Box<CartierExpr>),
}

/// How a word is reduced. Both orders must give the same canonical form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RewriteOrder {
    /// Products fold from the left, sums accumulate left to right.
    #[default]
    LeftFirst,
    /// Products fold from the right, sums accumulate right to left.
    RightFirst,
}

#[allow(clippy::should_implement_trait)]
impl CartierExpr {
    /// Parses words such as `F2 V2`, `[c1] + [c2]`, `V3[2]F2 - 4`.
    /// Juxtaposition and `*` both denote composition.
    pub fn parse(ring: &RingSpec, text: &str) -> Result<Self> {
        let mut p = WordParser { ring, chars: text.chars().collect(), pos: 0 };
        let e = p.sum()?;
        p.skip_ws();
        if p.pos != p.chars.len() {
            return Err(Error::Parse(format!("unexpected `{}` in `{text}`", p.chars[p.pos])));
        }
        Ok(e)
    }

    pub fn add(a: CartierExpr, b: CartierExpr) -> Self {
        CartierExpr::Add(Box::new(a), Box::new(b))
    }

    pub fn mul(a: CartierExpr, b: CartierExpr) -> Self {
        CartierExpr::Mul(Box::new(a), Box::new(b))
    }

    pub fn neg(a: CartierExpr) -> Self {
        CartierExpr::Neg(Box::new(a))
    }

    pub fn format(&self, ring: &RingSpec) -> String {
        match self {
            CartierExpr::Int(z) => format!("{z}"),
            CartierExpr::V(n) => format!("V{n}"),
            CartierExpr::F(m) => format!("F{m}"),
            CartierExpr::Teich(c) => format!("[{}]", ring.format(c)),
            CartierExpr::Add(a, b) => format!("({} + {})", a.format(ring), b.format(ring)),
            CartierExpr::Neg(a) => format!("-({})", a.format(ring)),
            CartierExpr::Mul(a, b) => format!("({} {})", a.format(ring), b.format(ring)),
        }
    }

    fn summands<'a>(&'a self, out: &mut Vec<&'a CartierExpr>) {
        match self {
            CartierExpr::Add(a, b) => {
                a.summands(out);
                b.summands(out);
            }
            e => out.push(e),
        }
    }

    fn factors<'a>(&'a self, out: &mut Vec<&'a CartierExpr>) {
        match self {
            CartierExpr::Mul(a, b) => {
                a.factors(out);
                b.factors(out);
            }
            e => out.push(e),
        }
    }
}

struct WordParser<'a> {
    ring: &'a RingSpec,
    chars: Vec<char>,
    pos: usize,
}

impl WordParser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn sum(&mut self) -> Result<CartierExpr> {
        let mut acc = self.product()?;
        while let Some(c @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            let rhs = self.product()?;
            acc = CartierExpr::add(acc, if c == '-' { CartierExpr::neg(rhs) } else { rhs });
        }
        Ok(acc)
    }

    fn product(&mut self) -> Result<CartierExpr> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    acc = CartierExpr::mul(acc, self.unary()?);
                }
                Some(c) if c == 'V' || c == 'F' || c == '[' || c == '(' || c.is_ascii_digit() => {
                    acc = CartierExpr::mul(acc, self.unary()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<CartierExpr> {
        if self.peek() == Some('-') {
            self.pos += 1;
            return Ok(CartierExpr::neg(self.unary()?));
        }
        self.atom()
    }

    fn digits(&mut self) -> Option<String> {
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| self.chars[start..self.pos].iter().collect())
    }

    fn index(&mut self, op: char) -> Result<u32> {
        self.pos += 1;
        let d = self.digits().ok_or_else(|| Error::Parse(format!("`{op}` needs an index, e.g. {op}2")))?;
        match d.parse::<u32>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(Error::Parse(format!("bad index {op}{d}"))),
        }
    }

    fn atom(&mut self) -> Result<CartierExpr> {
        match self.peek() {
            Some('V') => Ok(CartierExpr::V(self.index('V')?)),
            Some('F') => Ok(CartierExpr::F(self.index('F')?)),
            Some('[') => {
                let start = self.pos + 1;
                let mut depth = 0;
                while self.pos < self.chars.len() {
                    match self.chars[self.pos] {
                        '[' => depth += 1,
                        ']' => {
                            depth -= 1;
                            if depth == 0 {
                                break;
                            }
                        }
                        _ => {}
                    }
                    self.pos += 1;
                }
                if self.pos >= self.chars.len() {
                    return Err(Error::Parse("unclosed `[`".into()));
                }
                let inner: String = self.chars[start..self.pos].iter().collect();
                self.pos += 1;
                Ok(CartierExpr::Teich(parse_elem(self.ring, &inner)?))
            }
            Some('(') => {
                self.pos += 1;
                let e = self.sum()?;
                if self.peek() != Some(')') {
                    return Err(Error::Parse("expected `)`".into()));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let d = self.digits().expect("digit");
                Ok(CartierExpr::Int(d.parse().expect("digits")))
            }
            Some(c) => Err(Error::Parse(format!("unexpected `{c}`"))),
            None => Err(Error::Parse("unexpected end of word".into())),
        }
    }
}

/// Canonical form of `expr` modulo `V_n` for `n >= vbound`.
pub fn cartier_normalize(expr: &CartierExpr, ring: &RingSpec, vbound: usize) -> Result<CartierElement> {
    cartier_normalize_with(expr, ring, vbound, RewriteOrder::default())
}

pub fn cartier_normalize_with(
    expr: &CartierExpr,
    ring: &RingSpec,
    vbound: usize,
    order: RewriteOrder,
) -> Result<CartierElement> {
    check_vbound(vbound)?;
    eval(expr, ring, vbound, order)
}

fn eval(expr: &CartierExpr, ring: &RingSpec, vbound: usize, order: RewriteOrder) -> Result<CartierElement> {
    match expr {
        CartierExpr::Int(z) => CartierElement::integer(ring, vbound, z),
        CartierExpr::V(n) => CartierElement::v(ring, vbound, *n),
        CartierExpr::F(m) => CartierElement::f(ring, vbound, *m),
        CartierExpr::Teich(c) => CartierElement::teichmuller(ring, vbound, c.clone()),
        CartierExpr::Neg(a) => Ok(eval(a, ring, vbound, order)?.neg()),
        CartierExpr::Add(..) => {
            let mut parts = Vec::new();
            expr.summands(&mut parts);
            if order == RewriteOrder::RightFirst {
                parts.reverse();
            }
            let mut acc = CartierElement::zero(ring, vbound)?;
            for p in parts {
                acc = acc.add(&eval(p, ring, vbound, order)?)?;
            }
            Ok(acc)
        }
        CartierExpr::Mul(..) => {
            let mut parts = Vec::new();
            expr.factors(&mut parts);
            match order {
                RewriteOrder::LeftFirst => {
                    let mut acc = eval(parts[0], ring, vbound, order)?;
                    for p in &parts[1..] {
                        let right = eval(p, ring, acc.right_cutoff_for(vbound), order)?;
                        acc = acc.mul(&right)?;
                    }
                    Ok(acc)
                }
                RewriteOrder::RightFirst => product_right(&parts, ring, vbound, order),
            }
        }
    }
}

/// `p_0 (p_1 (... p_k))`, each tail reduced at the cutoff its head needs.
fn product_right(parts: &[&CartierExpr], ring: &RingSpec, vbound: usize, order: RewriteOrder) -> Result<CartierElement> {
    let head = eval(parts[0], ring, vbound, order)?;
    if parts.len() == 1 {
        return Ok(head);
    }
    let tail = product_right(&parts[1..], ring, head.right_cutoff_for(vbound), order)?;
    head.mul(&tail)
}

/// Longest output length for which `xi` applied to a length-`k` vector is
/// determined: each term `V_n [a] F_m` is known to degree `n (k/m + 1) - 1`.
pub fn attainable_length(xi: &CartierElement, k: usize) -> usize {
    xi.terms
        .keys()
        .filter(|(n, _)| (*n as usize) <= k)
        .map(|(n, m)| *n as usize * (k / *m as usize + 1) - 1)
        .fold(k.min(xi.vbound - 1), usize::min)
}

/// Action on the Cartier module of `G_m`: `xi a` in `W_[1,k]`, where `k` is
/// the length of `a`.
pub fn cartier_apply(xi: &CartierElement, a: &WittVector) -> Result<WittVector> {
    cartier_apply_to(xi, a, a.k())
}

/// `xi a` as an element of `W_[1,k_out]`.
pub fn cartier_apply_to(xi: &CartierElement, a: &WittVector, k_out: usize) -> Result<WittVector> {
    if xi.ring() != a.ring() {
        return Err(Error::SpecMismatch(format!("{} vs {}", xi.ring(), a.ring())));
    }
    let known = attainable_length(xi, a.k());
    if k_out == 0 || k_out > known {
        return Err(Error::TruncationTooShort(format!(
            "element with V-cutoff {} on a length-{} vector is determined only to degree {known}",
            xi.vbound(),
            a.k()
        )));
    }
    let mut acc = WittVector::one(a.ring(), k_out)?;
    for ((n, m), c) in xi.terms() {
        if *n as usize > k_out {
            continue;
        }
        let fa = frobenius(*m, a)?;
        let ca = teichmuller_action(c, &fa);
        acc = witt_add(&acc, &verschiebung_to(*n, &ca, k_out)?)?;
    }
    Ok(acc)
}

/// Action on the Cartier module of `G_a`: `V_n g(x) = g(x^n)`,
/// `F_n c x^i = n c x^(i/n)` when `n | i` and `0` otherwise,
/// `[c] g(x) = g(c x)`. The output truncation is the degree to which the
/// result is determined.
pub fn cartier_apply_ga(xi: &CartierElement, g: &TruncatedSeries) -> Result<TruncatedSeries> {
    if g.dim() != 1 {
        return Err(Error::ArityMismatch { expected: 1, got: g.dim() });
    }
    if xi.ring() != g.ring() {
        return Err(Error::SpecMismatch(format!("{} vs {}", xi.ring(), g.ring())));
    }
    if !g.ring().is_zero(&g.constant_term()) {
        return Err(Error::NonzeroConstantTerm);
    }
    let r = g.ring();
    let big_n = g.trunc() as usize;
    let known = xi
        .terms()
        .keys()
        .map(|(n, m)| *n as usize * (big_n / *m as usize + 1) - 1)
        .fold(big_n.min(xi.vbound() - 1), usize::min);
    let mut out = TruncatedSeries::zero(r, &[g.vars()[0].as_str()], known as u32)?;
    let mut terms = Vec::new();
    for ((n, m), c) in xi.terms() {
        for (e, x) in g.terms() {
            let i = e[0];
            if i % m != 0 {
                continue;
            }
            let j = i / m;
            let deg = *n as u64 * j as u64;
            if deg > known as u64 {
                continue;
            }
            let coeff = r.mul(&r.mul_int(x, *m as i64), &r.pow(c, j as u64));
            terms.push((vec![deg as u32], coeff));
        }
    }
    out = out.add(&TruncatedSeries::from_terms(r, &[g.vars()[0].as_str()], known as u32, terms)?)?;
    Ok(out)
}

/// `[c1 + c2] - [c1] - [c2] = sum_{n >= 2} V_n [a_n] F_n`; returns
/// `a_2..a_{vbound-1}` over `Z[c1][c2]` (or the given ring, which must have
/// the two named variables).
pub fn teichmuller_defect(ring: &RingSpec, c1: &Elem, c2: &Elem, vbound: usize) -> Result<Vec<Elem>> {
    let word = CartierExpr::add(
        CartierExpr::Teich(ring.add(c1, c2)),
        CartierExpr::neg(CartierExpr::add(CartierExpr::Teich(c1.clone()), CartierExpr::Teich(c2.clone()))),
    );
    let xi = cartier_normalize(&word, ring, vbound)?;
    for (n, m) in xi.terms().keys() {
        if n != m || *n < 2 {
            return Err(Error::Invalid(format!("unexpected defect term at ({n}, {m})")));
        }
    }
    Ok((2..vbound as u32).map(|n| xi.coeff(n, n)).collect())
}

/// Applies a word directly to a Witt vector, operator by operator. The
/// result is as long as the operations allow, capped at the input length.
/// Used as an independent check of normalization.
pub fn act_direct(expr: &CartierExpr, a: &WittVector) -> Result<WittVector> {
    let k = a.k();
    match expr {
        CartierExpr::Int(z) => {
            let z = z.to_i64().filter(|z| z.abs() < 1 << 20).ok_or_else(|| Error::Invalid("integer too large".into()))?;
            Ok(super::witt_scalar(z, a))
        }
        CartierExpr::V(n) => {
            let len = (*n as usize * (k + 1) - 1).min(k);
            verschiebung_to(*n, a, len)
        }
        CartierExpr::F(m) => frobenius(*m, a),
        CartierExpr::Teich(c) => Ok(teichmuller_action(c, a)),
        CartierExpr::Neg(x) => Ok(super::witt_neg(&act_direct(x, a)?)),
        CartierExpr::Add(x, y) => {
            let (p, q) = (act_direct(x, a)?, act_direct(y, a)?);
            let len = p.k().min(q.k());
            witt_add(&p.truncate(len)?, &q.truncate(len)?)
        }
        CartierExpr::Mul(x, y) => act_direct(x, &act_direct(y, a)?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witt::{witt_add, witt_scalar};
    use proptest::prelude::*;

    fn z() -> RingSpec {
        RingSpec::Integers
    }

    fn norm(text: &str, k: usize) -> CartierElement {
        cartier_normalize(&CartierExpr::parse(&z(), text).unwrap(), &z(), k).unwrap()
    }

    #[test]
    fn parsing() {
        let r = RingSpec::parse("Z[c1][c2]").unwrap();
        let e = CartierExpr::parse(&r, "V2[c1 + c2]F3 - 2*(F2 V2)").unwrap();
        assert_eq!(e.format(&r), "(((V2 [c1 + c2]) F3) + -((2 (F2 V2))))");
        assert!(CartierExpr::parse(&r, "V").is_err());
        assert!(CartierExpr::parse(&r, "V0").is_err());
        assert!(CartierExpr::parse(&r, "[c1").is_err());
        assert!(CartierExpr::parse(&r, "(F2").is_err());
    }

    #[test]
    fn two_in_canonical_form() {
        // (1 - x)^2 = (1 - 2x)(1 + x^2)(1 + 2 x^3)... read off as V_n[e_n]F_n
        let two = norm("F2 V2", 6);
        assert_eq!(two, norm("2", 6));
        assert_eq!(two.coeff(1, 1), z().from_int(2));
        assert_eq!(two.coeff(2, 2), z().from_int(-1));
        for (n, m) in two.terms().keys() {
            assert_eq!(n, m);
        }
        // the oracle: prod (1 - e_n x^n) = (1 - x)^2
        let mut s = TruncatedSeries::one(&z(), &["x"], 5).unwrap();
        for n in 1..6u32 {
            let mut c = vec![z().one()];
            c.resize(n as usize + 1, z().zero());
            c[n as usize] = z().neg(&two.coeff(n, n));
            s = s.mul(&TruncatedSeries::univariate(&z(), "x", 5, c).unwrap()).unwrap();
        }
        assert_eq!(s.to_string(), "1 - 2*x + x^2 + O(x^6)");
    }

    #[test]
    fn relation_examples() {
        let e = norm("F2 V3", 8);
        assert_eq!(e.terms().len(), 1);
        assert_eq!(e.coeff(3, 2), z().one());
        assert_eq!(norm("F1", 5), norm("1", 5));
        assert_eq!(norm("V1", 5), norm("1", 5));
        assert_eq!(norm("[3] V2", 9), norm("V2 [9]", 9));
        assert_eq!(norm("F2 [3]", 9), norm("[9] F2", 9));
        assert_eq!(norm("V2 V3", 9), norm("V6", 9));
        assert_eq!(norm("F2 F3", 9), norm("F6", 9));
        assert_eq!(norm("F3 V3", 9), norm("3", 9));
        assert_eq!(norm("V4", 4), CartierElement::zero(&z(), 4).unwrap());
        assert!(matches!(cartier_normalize(&CartierExpr::V(1), &z(), 1), Err(Error::VBoundTooSmall(1))));
    }

    #[test]
    fn teichmuller_addition_defect() {
        let r = RingSpec::parse("Z[c1][c2]").unwrap();
        let (c1, c2) = (r.variable("c1").unwrap(), r.variable("c2").unwrap());
        let a = teichmuller_defect(&r, &c1, &c2, 6).unwrap();
        assert_eq!(r.format(&a[0]), "c1*c2");
        assert_eq!(r.format(&a[1]), r.format(&r.mul(&r.mul(&c1, &c2), &r.add(&c1, &c2))));
        // series-division oracle: (1 - (c1 + c2) x) / ((1 - c1 x)(1 - c2 x)) = prod (1 - a_n x^n)
        let lin = |c: Elem| TruncatedSeries::univariate(&r, "x", 5, vec![r.one(), r.neg(&c)]).unwrap();
        let lhs = lin(r.add(&c1, &c2)).mul(&lin(c1.clone()).mul(&lin(c2.clone())).unwrap().invert().unwrap()).unwrap();
        let mut rhs = TruncatedSeries::one(&r, &["x"], 5).unwrap();
        for (i, an) in a.iter().enumerate() {
            let n = i + 2;
            let mut c = vec![r.zero(); n + 1];
            c[0] = r.one();
            c[n] = r.neg(an);
            rhs = rhs.mul(&TruncatedSeries::univariate(&r, "x", 5, c).unwrap()).unwrap();
        }
        assert_eq!(lhs, rhs);
        let sum = cartier_normalize(&CartierExpr::parse(&r, "[c1] + [c2]").unwrap(), &r, 4).unwrap();
        assert_eq!(r.format(&sum.coeff(1, 1)), "c1 + c2");
        assert_eq!(r.format(&sum.coeff(2, 2)), "-c1*c2");
    }

    #[test]
    fn apply_examples() {
        let a = WittVector::from_ints(&z(), &[-3, 0, 0, 0]).unwrap();
        let v2 = CartierElement::v(&z(), 5, 2).unwrap();
        assert_eq!(cartier_apply(&v2, &a).unwrap(), WittVector::from_ints(&z(), &[0, -3, 0, 0]).unwrap());
        let r = RingSpec::parse("Z[c]").unwrap();
        let c = r.variable("c").unwrap();
        let one_minus_x = WittVector::from_ints(&r, &[-1, 0, 0]).unwrap();
        let tc = CartierElement::teichmuller(&r, 4, c.clone()).unwrap();
        assert_eq!(cartier_apply(&tc, &one_minus_x).unwrap().to_string(), "1 - c*x + O(x^4)");
        let b = WittVector::from_ints(&z(), &[2, -1, 5, 7, 0, -3]).unwrap();
        let fv = norm("F2 V2", 7);
        assert_eq!(cartier_apply(&fv, &b).unwrap(), witt_add(&b, &b).unwrap());
        let f2 = norm("F2", 7);
        assert!(matches!(cartier_apply(&f2, &b), Err(Error::TruncationTooShort(_))));
        assert_eq!(cartier_apply_to(&f2, &b, 3).unwrap(), frobenius(2, &b).unwrap());
        assert!(cartier_apply(&norm("2", 6), &b).is_err());
    }

    #[test]
    fn additive_group_action() {
        let r = RingSpec::parse("Z[c]").unwrap();
        let c = r.variable("c").unwrap();
        let mono = |i: usize, k: u32| {
            let mut v = vec![r.zero(); i + 1];
            v[i] = c.clone();
            TruncatedSeries::univariate(&r, "x", k, v).unwrap()
        };
        let f2 = CartierElement::f(&r, 9, 2).unwrap();
        let out = cartier_apply_ga(&f2, &mono(4, 8)).unwrap();
        assert_eq!(out.to_string(), "2*c*x^2 + O(x^5)");
        assert!(cartier_apply_ga(&f2, &mono(3, 8)).unwrap().is_zero());
        let tc = CartierElement::teichmuller(&r, 9, c.clone()).unwrap();
        let g = TruncatedSeries::univariate(&r, "x", 2, vec![r.zero(), r.one(), r.one()]).unwrap();
        assert_eq!(cartier_apply_ga(&tc, &g).unwrap().to_string(), "c*x + c^2*x^2 + O(x^3)");
        // 2 acts as multiplication by 2
        let g = TruncatedSeries::univariate(&z(), "x", 6, (0..7).map(|i| z().from_int(i * i - 3)).collect::<Vec<_>>())
            .unwrap()
            .sub(&TruncatedSeries::univariate(&z(), "x", 6, vec![z().from_int(-3)]).unwrap())
            .unwrap();
        let two = cartier_apply_ga(&norm("2", 7), &g).unwrap();
        assert_eq!(two, g.add(&g).unwrap());
    }

    fn arb_word() -> impl Strategy<Value = CartierExpr> {
        let leaf = prop_oneof![
            (1u32..4).prop_map(CartierExpr::V),
            (1u32..4).prop_map(CartierExpr::F),
            (-3i64..4).prop_map(|c| CartierExpr::Teich(Elem::Int(c.into()))),
            (0i64..3).prop_map(|z| CartierExpr::Int(z.into())),
        ];
        leaf.prop_recursive(4, 12, 3, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| CartierExpr::add(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| CartierExpr::mul(a, b)),
                inner.prop_map(CartierExpr::neg),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn rewrite_order_does_not_matter(w in arb_word(), u in arb_word(), v in arb_word()) {
            let k = 7;
            let r = z();
            let left = cartier_normalize_with(&w, &r, k, RewriteOrder::LeftFirst).unwrap();
            let right = cartier_normalize_with(&w, &r, k, RewriteOrder::RightFirst).unwrap();
            prop_assert_eq!(&left, &right);
            let assoc1 = CartierExpr::mul(CartierExpr::mul(w.clone(), u.clone()), v.clone());
            let assoc2 = CartierExpr::mul(w.clone(), CartierExpr::mul(u.clone(), v.clone()));
            prop_assert_eq!(cartier_normalize(&assoc1, &r, k).unwrap(), cartier_normalize(&assoc2, &r, k).unwrap());
            let distrib1 = CartierExpr::mul(w.clone(), CartierExpr::add(u.clone(), v.clone()));
            let distrib2 = CartierExpr::add(CartierExpr::mul(w.clone(), u.clone()), CartierExpr::mul(w.clone(), v.clone()));
            prop_assert_eq!(cartier_normalize(&distrib1, &r, k).unwrap(), cartier_normalize(&distrib2, &r, k).unwrap());
        }

        #[test]
        fn normal_form_acts_like_the_word(w in arb_word(), b in proptest::collection::vec(-5i64..6, 8)) {
            let r = z();
            let a = WittVector::from_ints(&r, &b).unwrap();
            let direct = act_direct(&w, &a);
            prop_assume!(direct.is_ok());
            let direct = direct.unwrap();
            let xi = cartier_normalize(&w, &r, 9).unwrap();
            let len = direct.k().min(attainable_length(&xi, a.k()));
            prop_assume!(len > 0);
            prop_assert_eq!(cartier_apply_to(&xi, &a, len).unwrap(), direct.truncate(len).unwrap());
        }

        #[test]
        fn integers_act_as_scalars(z0 in -4i64..5, b in proptest::collection::vec(-5i64..6, 6)) {
            let r = z();
            let a = WittVector::from_ints(&r, &b).unwrap();
            let xi = CartierElement::integer(&r, 7, &BigInt::from(z0)).unwrap();
            prop_assert_eq!(cartier_apply(&xi, &a).unwrap(), witt_scalar(z0, &a));
        }
    }
}
