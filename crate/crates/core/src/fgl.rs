//! Commutative formal group laws, their invariant differentials, and the
//! logarithm dictionary over `Q`-algebras.
//!
//! A law of dimension `d` is stored as `d` series in `x_1..x_d, y_1..y_d`
//! (just `x, y` when `d = 1`). Invariant forms carry one degree less than
//! the law they come from, since they are built from first derivatives;
//! logarithms integrate back up to the law's truncation.

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::hom::RingMap;
use crate::ring::RingSpec;
use crate::series::TruncatedSeries;

/// Default truncation for one-dimensional laws in validation suites.
pub const DEFAULT_TRUNC_1D: u32 = 12;
/// Default truncation for laws of dimension at least two.
pub const DEFAULT_TRUNC_MULTI: u32 = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalGroupLaw {
    ring: RingSpec,
    dim: usize,
    trunc: u32,
    components: Vec<TruncatedSeries>,
}

/// `omega_j = sum_i coeffs[j][i] dx_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantForm {
    ring: RingSpec,
    dim: usize,
    trunc: u32,
    coeffs: Vec<Vec<TruncatedSeries>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub unit_ok: bool,
    pub comm_ok: bool,
    pub assoc_ok: bool,
    pub max_degree_checked: u32,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.unit_ok && self.comm_ok && self.assoc_ok
    }

    pub fn to_json(&self) -> Value {
        json!({
            "unit_ok": self.unit_ok,
            "comm_ok": self.comm_ok,
            "assoc_ok": self.assoc_ok,
            "max_degree_checked": self.max_degree_checked,
            "ok": self.ok(),
        })
    }
}

/// Variable names for one copy of a `d`-dimensional group: `x` or `x1..xd`.
pub fn coordinate_names(prefix: &str, dim: usize) -> Vec<String> {
    if dim == 1 {
        vec![prefix.to_string()]
    } else {
        (1..=dim).map(|i| format!("{prefix}{i}")).collect()
    }
}

fn law_vars(dim: usize) -> Vec<String> {
    let mut v = coordinate_names("x", dim);
    v.extend(coordinate_names("y", dim));
    v
}

fn refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

/// Coordinate series `v_0..v_{n-1}` in a space with the given variables.
fn coordinates(ring: &RingSpec, vars: &[String], trunc: u32) -> Result<Vec<TruncatedSeries>> {
    let zero = TruncatedSeries::zero(ring, &refs(vars), trunc)?;
    Ok((0..vars.len()).map(|i| zero.var_like(i)).collect())
}

impl FormalGroupLaw {
    /// Wraps `d` component series in `2d` variables. The axioms are not
    /// checked here; see [`FormalGroupLaw::validate`].
    pub fn new(components: Vec<TruncatedSeries>) -> Result<Self> {
        let dim = components.len();
        let first = components.first().ok_or_else(|| Error::Invalid("a law needs components".into()))?;
        if first.dim() != 2 * dim {
            return Err(Error::ArityMismatch { expected: 2 * dim, got: first.dim() });
        }
        let vars = law_vars(dim);
        let mut comps = Vec::with_capacity(dim);
        for c in &components {
            if c.ring() != first.ring() || c.trunc() != first.trunc() || c.dim() != first.dim() {
                return Err(Error::SpecMismatch("law components disagree on ring, variables or truncation".into()));
            }
            comps.push(c.rename(&refs(&vars))?);
        }
        Ok(FormalGroupLaw { ring: first.ring().clone(), dim, trunc: first.trunc(), components: comps })
    }

    pub fn additive(ring: &RingSpec, dim: usize, trunc: u32) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Invalid("dimension must be positive".into()));
        }
        let c = coordinates(ring, &law_vars(dim), trunc)?;
        let comps = (0..dim).map(|i| c[i].add(&c[dim + i])).collect::<Result<Vec<_>>>()?;
        Self::new(comps)
    }

    /// `F(x, y) = x + y - xy`.
    pub fn multiplicative(ring: &RingSpec, trunc: u32) -> Result<Self> {
        let c = coordinates(ring, &law_vars(1), trunc)?;
        let f = c[0].add(&c[1])?.sub(&c[0].mul(&c[1])?)?;
        Self::new(vec![f])
    }

    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn components(&self) -> &[TruncatedSeries] {
        &self.components
    }

    fn substitute(&self, args: &[TruncatedSeries]) -> Result<Vec<TruncatedSeries>> {
        self.components.iter().map(|f| f.compose(args)).collect()
    }

    fn unit_ok(&self) -> Result<bool> {
        let d = self.dim;
        let xs = coordinates(&self.ring, &coordinate_names("x", d), self.trunc)?;
        let zero = xs[0].zero_like();
        let mut left: Vec<TruncatedSeries> = xs.clone();
        left.extend(std::iter::repeat_n(zero.clone(), d));
        let mut right: Vec<TruncatedSeries> = vec![zero; d];
        right.extend(xs.iter().cloned());
        Ok(self.substitute(&left)? == xs && self.substitute(&right)? == xs)
    }

    fn comm_ok(&self) -> Result<bool> {
        let d = self.dim;
        let c = coordinates(&self.ring, &law_vars(d), self.trunc)?;
        let mut swapped = c[d..].to_vec();
        swapped.extend_from_slice(&c[..d]);
        Ok(self.substitute(&swapped)? == self.components)
    }

    fn assoc_ok(&self) -> Result<bool> {
        let d = self.dim;
        let mut vars = law_vars(d);
        vars.extend(coordinate_names("z", d));
        let c = coordinates(&self.ring, &vars, self.trunc)?;
        let (x, y, z) = (&c[..d], &c[d..2 * d], &c[2 * d..]);
        let xy = self.substitute(&[x, y].concat())?;
        let yz = self.substitute(&[y, z].concat())?;
        let (left, right) = rayon::join(
            || self.substitute(&[xy.as_slice(), z].concat()),
            || self.substitute(&[x, yz.as_slice()].concat()),
        );
        Ok(left? == right?)
    }

    /// Checks unit sections, commutativity and associativity to degree
    /// `trunc`. The three checks run concurrently.
    pub fn validate(&self) -> ValidationReport {
        let (unit, (comm, assoc)) =
            rayon::join(|| self.unit_ok(), || rayon::join(|| self.comm_ok(), || self.assoc_ok()));
        ValidationReport {
            unit_ok: unit.unwrap_or(false),
            comm_ok: comm.unwrap_or(false),
            assoc_ok: assoc.unwrap_or(false),
            max_degree_checked: self.trunc,
        }
    }

    /// The invariant form normalized to the identity at the origin:
    /// `omega = J(x)^-1 dx` with `J_ij(x) = dF_i/dy_j (x, 0)`.
    pub fn invariant_differential(&self) -> Result<InvariantForm> {
        let d = self.dim;
        let form_trunc = self.trunc.saturating_sub(1);
        let xs = coordinates(&self.ring, &coordinate_names("x", d), self.trunc)?;
        let zero = xs[0].zero_like();
        let mut at_y0 = xs.clone();
        at_y0.extend(std::iter::repeat_n(zero, d));
        let mut jac = Vec::with_capacity(d);
        for f in &self.components {
            let mut row = Vec::with_capacity(d);
            for j in 0..d {
                let dy = f.derivative(d + j)?;
                let args: Vec<TruncatedSeries> =
                    at_y0.iter().map(|a| a.truncate(form_trunc)).collect::<Result<_>>()?;
                row.push(dy.compose(&args)?);
            }
            jac.push(row);
        }
        // J = I + M with M(0) = 0 for any law with linear part x + y.
        let ident = identity_matrix(&jac[0][0], d);
        for (i, row) in jac.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                if e.constant_term() != ident[i][j].constant_term() {
                    return Err(Error::NonInvertibleJacobian);
                }
            }
        }
        let minus_m: Vec<Vec<TruncatedSeries>> = jac
            .iter()
            .zip(&ident)
            .map(|(jr, ir)| jr.iter().zip(ir).map(|(a, b)| b.sub(a)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let mut acc = ident.clone();
        let mut power = ident;
        for _ in 0..form_trunc {
            power = mat_mul(&power, &minus_m)?;
            if power.iter().flatten().all(TruncatedSeries::is_zero) {
                break;
            }
            acc = mat_add(&acc, &power)?;
        }
        Ok(InvariantForm { ring: self.ring.clone(), dim: d, trunc: form_trunc, coeffs: acc })
    }

    /// Logarithm `l_j = x_j + ...` with `l(F(x, y)) = l(x) + l(y)`, obtained
    /// by integrating the invariant differential.
    pub fn log(&self) -> Result<Vec<TruncatedSeries>> {
        let omega = self.invariant_differential()?;
        omega.integrate(self.trunc)
    }

    /// The law with logarithm `l`: `F(x, y) = l^-1(l(x) + l(y))`.
    pub fn from_log(log: &[TruncatedSeries]) -> Result<Self> {
        let d = log.len();
        let first = log.first().ok_or_else(|| Error::Invalid("empty logarithm".into()))?;
        if first.dim() != d {
            return Err(Error::ArityMismatch { expected: d, got: first.dim() });
        }
        let xs_names = coordinate_names("x", d);
        let log: Vec<TruncatedSeries> = log.iter().map(|l| l.rename(&refs(&xs_names))).collect::<Result<_>>()?;
        let inverse = if d == 1 {
            let l = &log[0];
            if l.trunc() >= 1 && !l.ring().is_one(&l.coeff1(1)) || !l.ring().is_zero(&l.constant_term()) {
                return Err(Error::NotReversible("logarithm must start with x".into()));
            }
            vec![l.reversion()?]
        } else {
            TruncatedSeries::reversion_system(&log)?
        };
        let c = coordinates(first.ring(), &law_vars(d), first.trunc())?;
        let lx = log.iter().map(|l| l.compose(&c[..d])).collect::<Result<Vec<_>>>()?;
        let ly = log.iter().map(|l| l.compose(&c[d..])).collect::<Result<Vec<_>>>()?;
        let sum = lx.iter().zip(&ly).map(|(a, b)| a.add(b)).collect::<Result<Vec<_>>>()?;
        let comps = inverse.iter().map(|e| e.compose(&sum)).collect::<Result<Vec<_>>>()?;
        Self::new(comps)
    }

    /// Coefficient-wise image under a ring map.
    pub fn base_change(&self, map: &RingMap) -> Result<Self> {
        let comps = self.components.iter().map(|c| c.map_coeffs(map)).collect::<Result<Vec<_>>>()?;
        Self::new(comps)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "ring": self.ring.to_string(),
            "dim": self.dim,
            "trunc": self.trunc,
            "components": self.components.iter().map(TruncatedSeries::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let ring = v.get("ring").and_then(Value::as_str).map(RingSpec::parse).transpose()?;
        let comps = v
            .get("components")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("law needs \"components\"".into()))?;
        let comps = comps
            .iter()
            .map(|c| match &ring {
                Some(r) => TruncatedSeries::from_json_in(c, r),
                None => TruncatedSeries::from_json(c),
            })
            .collect::<Result<Vec<_>>>()?;
        let law = Self::new(comps)?;
        if let Some(d) = v.get("dim").and_then(Value::as_u64) {
            if d as usize != law.dim {
                return Err(Error::Parse(format!("\"dim\" is {d} but {} components were given", law.dim)));
            }
        }
        Ok(law)
    }
}

impl InvariantForm {
    /// Builds a form from its coefficient matrix (`coeffs[j][i]` multiplies
    /// `dx_i` in `omega_j`), all series in the same `d` variables.
    pub fn new(coeffs: Vec<Vec<TruncatedSeries>>) -> Result<Self> {
        let dim = coeffs.len();
        let first = coeffs
            .first()
            .and_then(|r| r.first())
            .ok_or_else(|| Error::Invalid("empty form".into()))?
            .clone();
        if first.dim() != dim {
            return Err(Error::ArityMismatch { expected: dim, got: first.dim() });
        }
        let names = coordinate_names("x", dim);
        let mut out = Vec::with_capacity(dim);
        for row in &coeffs {
            if row.len() != dim {
                return Err(Error::ArityMismatch { expected: dim, got: row.len() });
            }
            let mut r = Vec::with_capacity(dim);
            for c in row {
                if c.ring() != first.ring() || c.trunc() != first.trunc() || c.dim() != dim {
                    return Err(Error::SpecMismatch("form entries disagree on ring, variables or truncation".into()));
                }
                r.push(c.rename(&refs(&names))?);
            }
            out.push(r);
        }
        Ok(InvariantForm { ring: first.ring().clone(), dim, trunc: first.trunc(), coeffs: out })
    }

    /// One-dimensional form `g(x) dx`.
    pub fn univariate(g: TruncatedSeries) -> Result<Self> {
        Self::new(vec![vec![g]])
    }

    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn coeffs(&self) -> &[Vec<TruncatedSeries>] {
        &self.coeffs
    }

    /// Whether the coefficient matrix is the identity at the origin.
    pub fn is_normalized(&self) -> bool {
        let r = &self.ring;
        self.coeffs.iter().enumerate().all(|(j, row)| {
            row.iter().enumerate().all(|(i, c)| {
                let expected = if i == j { r.one() } else { r.zero() };
                c.constant_term() == expected
            })
        })
    }

    /// `d omega_j = 0`: `dg_ji/dx_k = dg_jk/dx_i` for all `i < k`.
    pub fn is_closed(&self) -> Result<bool> {
        for row in &self.coeffs {
            for i in 0..self.dim {
                for k in i + 1..self.dim {
                    if row[i].derivative(k)? != row[k].derivative(i)? {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// Potentials `l_j` with `dl_j = omega_j`, truncated at `trunc` (one more
    /// than the form). Uses the homogeneous Euler formula
    /// `l = sum_n 1/(n+1) sum_i x_i g_i^(n)`, valid for closed forms.
    pub fn integrate(&self, trunc: u32) -> Result<Vec<TruncatedSeries>> {
        if trunc > self.trunc + 1 {
            return Err(Error::TruncationTooShort(format!(
                "form known to degree {} cannot give a potential to degree {trunc}",
                self.trunc
            )));
        }
        let names = coordinate_names("x", self.dim);
        let mut out = Vec::with_capacity(self.dim);
        for row in &self.coeffs {
            let mut terms = Vec::new();
            for (i, g) in row.iter().enumerate() {
                for (e, c) in g.terms() {
                    let n: u32 = e.iter().sum();
                    let q = self
                        .ring
                        .div_int(c, &BigInt::from(n + 1))
                        .ok_or(Error::NonInvertibleIndex(n as u64 + 1))?;
                    let mut f = e.clone();
                    f[i] += 1;
                    terms.push((f, q));
                }
            }
            let l = TruncatedSeries::from_terms(&self.ring, &refs(&names), trunc, terms)?;
            for (i, g) in row.iter().enumerate() {
                if l.derivative(i)?.truncate(trunc.saturating_sub(1).min(g.trunc()))?
                    != g.truncate(trunc.saturating_sub(1).min(g.trunc()))?
                {
                    return Err(Error::Invalid("form is not closed; no potential exists".into()));
                }
            }
            out.push(l);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "ring": self.ring.to_string(),
            "dim": self.dim,
            "trunc": self.trunc,
            "coeffs": self
                .coeffs
                .iter()
                .map(|row| row.iter().map(TruncatedSeries::to_json).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let ring = v.get("ring").and_then(Value::as_str).map(RingSpec::parse).transpose()?;
        let rows = v
            .get("coeffs")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("form needs \"coeffs\"".into()))?;
        let coeffs = rows
            .iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| Error::Parse("form rows must be arrays".into()))?
                    .iter()
                    .map(|c| match &ring {
                        Some(r) => TruncatedSeries::from_json_in(c, r),
                        None => TruncatedSeries::from_json(c),
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(coeffs)
    }
}

/// Checks `m* omega_j = pr_1* omega_j + pr_2* omega_j` coefficient-wise in
/// `2d` variables, to the degree the form is known.
pub fn check_invariance(law: &FormalGroupLaw, form: &InvariantForm) -> Result<bool> {
    if law.ring != form.ring {
        return Err(Error::SpecMismatch(format!("{} vs {}", law.ring, form.ring)));
    }
    if law.dim != form.dim {
        return Err(Error::ArityMismatch { expected: law.dim, got: form.dim });
    }
    let d = law.dim;
    let t = form.trunc.min(law.trunc.saturating_sub(1));
    let vars = law_vars(d);
    let c = coordinates(&law.ring, &vars, law.trunc)?;
    // dF_i / dv for every variable v of the 2d-space.
    let partials: Vec<Vec<TruncatedSeries>> = law
        .components
        .iter()
        .map(|f| (0..2 * d).map(|v| f.derivative(v)?.truncate(t)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let low: Vec<TruncatedSeries> = c.iter().map(|s| s.truncate(t)).collect::<Result<_>>()?;
    for row in &form.coeffs {
        let row: Vec<TruncatedSeries> = row.iter().map(|g| g.truncate(t)).collect::<Result<_>>()?;
        // g_ji(F(x, y))
        let pulled: Vec<TruncatedSeries> = row.iter().map(|g| g.compose(&law.components)).collect::<Result<_>>()?;
        let pulled: Vec<TruncatedSeries> = pulled.iter().map(|g| g.truncate(t)).collect::<Result<_>>()?;
        #[allow(clippy::needless_range_loop)]
        for v in 0..2 * d {
            let mut lhs = low[0].zero_like();
            for (i, g) in pulled.iter().enumerate() {
                lhs = lhs.add(&g.mul(&partials[i][v])?)?;
            }
            // pr_1* omega contributes g_jk(x) dx_k, pr_2* omega contributes g_jk(y) dy_k.
            let (k, args) = if v < d { (v, &low[..d]) } else { (v - d, &low[d..]) };
            let rhs = row[k].compose(args)?;
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn identity_matrix(like: &TruncatedSeries, d: usize) -> Vec<Vec<TruncatedSeries>> {
    (0..d)
        .map(|i| (0..d).map(|j| if i == j { like.one_like() } else { like.zero_like() }).collect())
        .collect()
}

fn mat_mul(a: &[Vec<TruncatedSeries>], b: &[Vec<TruncatedSeries>]) -> Result<Vec<Vec<TruncatedSeries>>> {
    let d = a.len();
    let mut out = Vec::with_capacity(d);
    for row in a {
        let mut r = Vec::with_capacity(d);
        #[allow(clippy::needless_range_loop)]
        for j in 0..d {
            let mut acc = row[0].zero_like();
            for (k, x) in row.iter().enumerate() {
                acc = acc.add(&x.mul(&b[k][j])?)?;
            }
            r.push(acc);
        }
        out.push(r);
    }
    Ok(out)
}

fn mat_add(a: &[Vec<TruncatedSeries>], b: &[Vec<TruncatedSeries>]) -> Result<Vec<Vec<TruncatedSeries>>> {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x.add(y)).collect())
        .collect()
}
