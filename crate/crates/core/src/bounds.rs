//! Exact and high-precision evaluation of the move-count bounds.
//!
//! Integer-valued bounds are exact big integers. Transcendental quantities
//! are evaluated with 320-bit binary floats and reported to 50 significant
//! decimal digits; integer depths derived from them carry an upward margin so
//! that input rounding can only increase them.

use std::f64::consts::PI;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::GeometryTag;

const PREC: usize = 320;
const RM: RoundingMode = RoundingMode::ToEven;
/// Significant digits in reported decimals.
pub const REPORT_DIGITS: usize = 50;
/// Added to real thresholds before taking the next integer.
pub const DEPTH_MARGIN: f64 = 1e-12;
/// Lower volume bound for closed orientable hyperbolic 3-manifolds.
pub const W_ORIENTABLE_3: &str = "0.9427";

pub fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

fn pow(base: &BigUint, e: usize) -> BigUint {
    num_traits::pow(base.clone(), e)
}

/// `2^n (n+1)!^{4+3m′} p q (p+q)`.
pub fn total_bound(n: usize, p: u64, q: u64, mprime: u64) -> BigUint {
    let e = 4 + 3 * mprime as usize;
    (BigUint::one() << n)
        * pow(&factorial(n + 1), e)
        * BigUint::from(p)
        * BigUint::from(q)
        * (BigUint::from(p) + BigUint::from(q))
}

/// `(n+1)!^{2m+2} p_n²`.
pub fn barymoves_bound(n: usize, m: usize, p_n: u64) -> BigUint {
    pow(&factorial(n + 1), 2 * m + 2) * BigUint::from(p_n) * BigUint::from(p_n)
}

/// `p_j` with `p_{−1} = 1`.
fn p_at(p: &[u64], j: isize) -> u64 {
    if j < 0 {
        1
    } else {
        p[j as usize]
    }
}

fn check_lengths(n: usize, p: &[u64], s: &[u64]) -> Result<()> {
    if p.len() != n + 1 || s.len() != n + 1 {
        return Err(Error::Input(format!(
            "expected vectors of length {}, got p: {}, s: {}",
            n + 1,
            p.len(),
            s.len()
        )));
    }
    Ok(())
}

/// `(n−r)!·s_r·p_{n−r−1}` with `p_{−1} = 1`.
pub fn per_level_bound(n: usize, r: usize, p: &[u64], s_r: u64) -> BigUint {
    factorial(n - r) * BigUint::from(s_r) * BigUint::from(p_at(p, n as isize - r as isize - 1))
}

/// `Σ_{i=1}^{n} (n−i)!·p_{n−i−1}·s_i` with `p_{−1} = 1`.
pub fn induction_bound(n: usize, p: &[u64], s: &[u64]) -> Result<BigUint> {
    check_lengths(n, p, s)?;
    Ok((1..=n).map(|i| per_level_bound(n, i, p, s[i])).sum())
}

/// `Σ_{i=1}^{n} (n−i)!·(i+1)!²·p_{n−i−1}·s_i` with `p_0 = 2`, `p_{−1} = 1`.
pub fn mainlemma_bound(n: usize, p: &[u64], s: &[u64]) -> Result<BigUint> {
    check_lengths(n, p, s)?;
    let mut p = p.to_vec();
    p[0] = 2;
    Ok((1..=n)
        .map(|i| {
            let f = factorial(i + 1);
            per_level_bound(n, i, &p, s[i]) * &f * &f
        })
        .sum())
}

/// `(2^n − 1)(n+1)!² p_i q_n`.
pub fn commonsub_bound(n: usize, p_i: u64, q_n: u64) -> BigUint {
    let f = factorial(n + 1);
    ((BigUint::one() << n) - BigUint::one()) * &f * &f * BigUint::from(p_i) * BigUint::from(q_n)
}

/// High-precision evaluation context.
pub struct Hp {
    cc: Consts,
}

impl Hp {
    pub fn new() -> Self {
        Hp {
            cc: Consts::new().expect("constant cache"),
        }
    }

    pub fn num(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, PREC)
    }

    pub fn int(&self, k: u64) -> BigFloat {
        BigFloat::from_u64(k, PREC)
    }

    pub fn parse(&mut self, s: &str) -> BigFloat {
        BigFloat::parse(s, Radix::Dec, PREC, RM, &mut self.cc)
    }

    pub fn pi(&mut self) -> BigFloat {
        self.cc.pi(PREC, RM)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, PREC, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, PREC, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, PREC, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, PREC, RM)
    }

    pub fn powi(&self, a: &BigFloat, k: usize) -> BigFloat {
        a.powi(k, PREC, RM)
    }

    pub fn ln(&mut self, a: &BigFloat) -> BigFloat {
        a.ln(PREC, RM, &mut self.cc)
    }

    pub fn cosh(&mut self, a: &BigFloat) -> BigFloat {
        a.cosh(PREC, RM, &mut self.cc)
    }

    pub fn sinh(&mut self, a: &BigFloat) -> BigFloat {
        a.sinh(PREC, RM, &mut self.cc)
    }

    pub fn sin(&mut self, a: &BigFloat) -> BigFloat {
        a.sin(PREC, RM, &mut self.cc)
    }

    /// Scientific decimal with `digits` significant digits, rounded half up.
    pub fn decimal(&mut self, a: &BigFloat, digits: usize) -> String {
        let raw = a
            .format(Radix::Dec, RM, &mut self.cc)
            .expect("finite value");
        round_scientific(&raw, digits)
    }

    pub fn to_f64(&mut self, a: &BigFloat) -> f64 {
        let raw = a
            .format(Radix::Dec, RM, &mut self.cc)
            .expect("finite value");
        raw.parse().expect("decimal float")
    }

    /// Smallest integer strictly greater than `a + DEPTH_MARGIN`, as `u64`.
    pub fn next_int_above(&mut self, a: &BigFloat) -> u64 {
        let shifted = self.add(a, &self.num(DEPTH_MARGIN));
        let fl = shifted.floor();
        let k = self.to_f64(&fl) as i64 + 1;
        if k < 0 {
            0
        } else {
            k as u64
        }
    }
}

impl Default for Hp {
    fn default() -> Self {
        Self::new()
    }
}

/// Rounds a string of the form `[-]d.ddd…e±x` to `digits` significant digits.
fn round_scientific(raw: &str, digits: usize) -> String {
    let (neg, body) = match raw.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, raw),
    };
    let (mant, exp) = body.split_once(['e', 'E']).unwrap_or((body, "0"));
    let mut exp: i64 = exp.trim_start_matches('+').parse().expect("exponent");
    let int_len = mant.find('.').unwrap_or(mant.len()) as i64;
    let mut ds: Vec<u8> = mant
        .bytes()
        .filter(u8::is_ascii_digit)
        .map(|b| b - b'0')
        .collect();
    // Normalize to a single leading nonzero digit.
    let lead = ds.iter().position(|&d| d != 0);
    let Some(lead) = lead else {
        return "0".into();
    };
    exp += int_len - 1 - lead as i64;
    ds.drain(..lead);
    if ds.len() > digits {
        let round_up = ds[digits] >= 5;
        ds.truncate(digits);
        if round_up {
            let mut i = digits;
            loop {
                if i == 0 {
                    ds.insert(0, 1);
                    ds.truncate(digits);
                    exp += 1;
                    break;
                }
                i -= 1;
                if ds[i] == 9 {
                    ds[i] = 0;
                } else {
                    ds[i] += 1;
                    break;
                }
            }
        }
    }
    while ds.len() > 1 && *ds.last().expect("nonempty") == 0 {
        ds.pop();
    }
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push((b'0' + ds[0]) as char);
    if ds.len() > 1 {
        out.push('.');
        out.extend(ds[1..].iter().map(|d| (b'0' + d) as char));
    }
    out.push_str(&format!("e{exp}"));
    out
}

pub fn mu_hp(hp: &mut Hp, tag: GeometryTag, n: usize, lambda: f64) -> BigFloat {
    match tag {
        GeometryTag::Euclidean => hp.int(n as u64 + 1),
        GeometryTag::Spherical => hp.int(2 * n as u64 + 1),
        GeometryTag::Hyperbolic => {
            let c = hp.cosh(&hp.num(lambda));
            let t = hp.mul(&hp.int(n as u64), &hp.powi(&c, n - 1));
            hp.add(&t, &hp.int(1))
        }
    }
}

/// `μ`: `n+1`, `2n+1`, or `n·cosh^{n−1}(Λ)+1`.
pub fn mu(tag: GeometryTag, n: usize, lambda: f64) -> f64 {
    let mut hp = Hp::new();
    let v = mu_hp(&mut hp, tag, n, lambda);
    hp.to_f64(&v)
}

/// `κ = 1 − 1/μ`, matching each geometry's scaling factor.
pub fn kappa_hp(hp: &mut Hp, tag: GeometryTag, n: usize, lambda: f64) -> BigFloat {
    let m = mu_hp(hp, tag, n, lambda);
    hp.div(&hp.sub(&m, &hp.int(1)), &m)
}

fn depth_from_log(hp: &mut Hp, mu: &BigFloat, ratio: &BigFloat) -> u64 {
    let x = {
        let t = hp.ln(ratio);
        hp.mul(mu, &t)
    };
    hp.next_int_above(&x).max(1)
}

/// `max(1, ⌊μ·ln(Λ/inj)⌋ + 1)`, evaluated with the upward margin.
pub fn depth_m(mu: f64, lambda: f64, inj: f64) -> Result<u64> {
    if !(lambda > 0.0 && inj > 0.0 && mu > 0.0) {
        return Err(Error::Input("μ, Λ and inj must be positive".into()));
    }
    let mut hp = Hp::new();
    let ratio = hp.div(&hp.num(lambda), &hp.num(inj));
    let m = hp.num(mu);
    Ok(depth_from_log(&mut hp, &m, &ratio))
}

pub fn depth_mprime(m: u64, n: usize) -> u64 {
    m.max(1 << (n + 1))
}

/// `vol(Sⁿ) = 2π^{(n+1)/2}/Γ((n+1)/2)` via the half-integer closed forms.
pub fn sphere_volume_hp(hp: &mut Hp, n: usize) -> BigFloat {
    let pi = hp.pi();
    if n % 2 == 1 {
        // Γ(k) = (k−1)! with k = (n+1)/2.
        let k = (n + 1) / 2;
        let fact = hp.parse(&factorial(k - 1).to_string());
        hp.div(&hp.mul(&hp.int(2), &hp.powi(&pi, k)), &fact)
    } else {
        // Γ(k+½) = (2k)!·√π/(4^k k!) with k = n/2.
        let k = n / 2;
        let num = hp.mul(&hp.int(2), &hp.powi(&pi, k));
        let f = hp.parse(&(BigUint::from(4u32).pow(k as u32) * factorial(k)).to_string());
        let num = hp.mul(&num, &f);
        {
            let t = hp.parse(&factorial(2 * k).to_string());
            hp.div(&num, &t)
        }
    }
}

pub fn sphere_volume(n: usize) -> f64 {
    let mut hp = Hp::new();
    let v = sphere_volume_hp(&mut hp, n);
    hp.to_f64(&v)
}

fn delta_hp(hp: &mut Hp, tag: GeometryTag, n: usize, diam: f64) -> BigFloat {
    let d = hp.num(diam);
    match tag {
        GeometryTag::Euclidean => d,
        GeometryTag::Spherical => {
            let s = hp.sin(&d);
            hp.powi(&s, n - 1)
        }
        GeometryTag::Hyperbolic => {
            let s = hp.sinh(&d);
            hp.powi(&s, n - 1)
        }
    }
}

pub fn inj_lower_hp(hp: &mut Hp, tag: GeometryTag, n: usize, vol: f64, diam: f64) -> BigFloat {
    let pi = hp.pi();
    let delta = delta_hp(hp, tag, n, diam);
    let vs = sphere_volume_hp(hp, n);
    hp.div(&hp.mul(&pi, &hp.num(vol)), &hp.mul(&delta, &vs))
}

/// `π·vol/(δ·vol(Sⁿ))`, a lower bound for the injectivity radius.
pub fn inj_lower(tag: GeometryTag, n: usize, vol: f64, diam: f64) -> Result<f64> {
    if !(vol > 0.0 && diam > 0.0) || n == 0 {
        return Err(Error::Input("vol, diam and n must be positive".into()));
    }
    let mut hp = Hp::new();
    let v = inj_lower_hp(&mut hp, tag, n, vol, diam);
    Ok(hp.to_f64(&v))
}

/// Convexity radius, injectivity radius and shortest closed geodesic,
/// related by `r = inj/2 = l_c/4`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexityChain {
    pub r: f64,
    pub inj: f64,
    pub l_c: f64,
}

impl ConvexityChain {
    pub fn from_lc(l_c: f64) -> Self {
        ConvexityChain {
            r: l_c / 4.0,
            inj: l_c / 2.0,
            l_c,
        }
    }

    pub fn from_inj(inj: f64) -> Self {
        ConvexityChain {
            r: inj / 2.0,
            inj,
            l_c: 2.0 * inj,
        }
    }

    pub fn holds(&self) -> bool {
        self.r == self.inj / 2.0 && self.inj / 2.0 == self.l_c / 4.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VolhypVariant {
    /// Closed orientable hyperbolic 3-manifolds, volume at least `w`.
    OrientableThree,
    /// Even dimensions, volume from the Gauss–Bonnet formula.
    EvenGaussBonnet,
    /// Any `n > 2`, from the universal volume lower bound.
    General,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VolhypReport {
    pub variant: VolhypVariant,
    /// The real threshold `m` must exceed, 50 significant digits.
    pub threshold: String,
    pub m: u64,
}

/// Default variant: orientable formula at `n = 3`, Gauss–Bonnet for even
/// `n`, the general bound otherwise.
pub fn default_volhyp_variant(n: usize) -> VolhypVariant {
    match n {
        3 => VolhypVariant::OrientableThree,
        n if n % 2 == 0 => VolhypVariant::EvenGaussBonnet,
        _ => VolhypVariant::General,
    }
}

/// Smallest depth allowed by the hyperbolic volume lower bounds.
pub fn volhyp_m(n: usize, p: u64, lambda: f64, variant: VolhypVariant) -> Result<VolhypReport> {
    if n < 2 || lambda <= 0.0 || p == 0 {
        return Err(Error::Input("need n ≥ 2, Λ > 0 and p > 0".into()));
    }
    let mut hp = Hp::new();
    let l = hp.num(lambda);
    let l2 = hp.mul(&l, &l);
    let pl2 = hp.mul(&hp.int(p), &l2);
    let pi = hp.pi();
    let c = hp.cosh(&l);
    let floor2 = 1u64 << (n + 1);
    let (threshold, use_floor) = match variant {
        VolhypVariant::OrientableThree => {
            if n != 3 {
                return Err(Error::Input("the orientable formula is for n = 3".into()));
            }
            let w = hp.parse(W_ORIENTABLE_3);
            let coef = hp.add(&hp.mul(&hp.int(3), &hp.mul(&c, &c)), &hp.int(1));
            let arg = hp.div(&hp.mul(&hp.mul(&hp.int(2), &pi), &pl2), &w);
            (
                {
                    let t = hp.ln(&arg);
                    hp.mul(&coef, &t)
                },
                false,
            )
        }
        VolhypVariant::EvenGaussBonnet => {
            if n % 2 != 0 {
                return Err(Error::Input("the Gauss–Bonnet variant needs even n".into()));
            }
            let coef = hp.add(&hp.mul(&hp.int(n as u64), &hp.powi(&c, n - 1)), &hp.int(1));
            let arg = hp.div(&hp.mul(&hp.int(2), &pl2), &pi);
            (
                {
                    let t = hp.ln(&arg);
                    hp.mul(&coef, &t)
                },
                true,
            )
        }
        VolhypVariant::General => {
            if n <= 2 {
                return Err(Error::Input("the general variant needs n > 2".into()));
            }
            let coef = hp.add(&hp.mul(&hp.int(n as u64), &hp.powi(&c, n - 1)), &hp.int(1));
            let mut arg = hp.mul(&hp.mul(&hp.int(2), &pl2), &hp.int(n as u64));
            arg = hp.mul(&arg, &hp.powi(&hp.int(n as u64 + 3), n));
            arg = hp.mul(&arg, &hp.powi(&pi, n * (n - 1)));
            (
                {
                    let t = hp.ln(&arg);
                    hp.mul(&coef, &t)
                },
                true,
            )
        }
    };
    let mut m = hp.next_int_above(&threshold).max(1);
    if use_floor {
        m = m.max(floor2 + 1);
    }
    Ok(VolhypReport {
        variant,
        threshold: hp.decimal(&threshold, REPORT_DIGITS),
        m,
    })
}

/// Input to the bound calculator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifoldData {
    pub geometry: GeometryTag,
    pub n: usize,
    /// Upper bound on edge lengths.
    pub lambda: f64,
    pub p: u64,
    pub q: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inj: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diam: Option<f64>,
    /// Lower bound on edge lengths.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_edge: Option<f64>,
    /// Length of the shortest closed geodesic.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volhyp_variant: Option<VolhypVariant>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub mu: String,
    pub kappa: String,
    /// Injectivity radius (or lower bound) used for the depth, if any.
    pub inj: Option<String>,
    pub inj_source: String,
    pub chain: Option<ConvexityChain>,
    pub volhyp: Option<VolhypReport>,
    pub m: u64,
    pub mprime: u64,
    /// `2^n (n+1)!^{4+3m′} p q (p+q)`, exact decimal.
    pub total_bound: String,
    pub total_bound_digits: usize,
    /// Same formula with `m` in place of `m′`, stated for `n ≤ 4`.
    pub total_bound_direct: Option<String>,
    pub notes: Vec<String>,
}

pub fn compute_report(d: &ManifoldData) -> Result<BoundReport> {
    if d.n == 0 || d.p == 0 || d.q == 0 || !(d.lambda > 0.0) {
        return Err(Error::Input("n, p, q and Λ must be positive".into()));
    }
    for (name, v) in [
        ("inj", d.inj),
        ("vol", d.vol),
        ("diam", d.diam),
        ("min_edge", d.min_edge),
        ("l_c", d.l_c),
    ] {
        if let Some(v) = v {
            if !(v > 0.0) {
                return Err(Error::Input(format!("{name} must be positive")));
            }
        }
    }
    if d.geometry == GeometryTag::Spherical && d.lambda > PI / 2.0 {
        return Err(Error::Input("spherical triangulations need Λ ≤ π/2".into()));
    }
    let mut hp = Hp::new();
    let mut notes = Vec::new();
    let mu = mu_hp(&mut hp, d.geometry, d.n, d.lambda);
    let kappa = kappa_hp(&mut hp, d.geometry, d.n, d.lambda);

    let mut chain = None;
    let mut volhyp = None;
    let inj: Option<(BigFloat, String)> = if let Some(inj) = d.inj {
        chain = Some(ConvexityChain::from_inj(inj));
        Some((hp.num(inj), "given".into()))
    } else if let Some(l_c) = d.l_c {
        let c = ConvexityChain::from_lc(l_c);
        chain = Some(c);
        Some((hp.num(c.inj), "l_c / 2".into()))
    } else if let Some(vol) = d.vol {
        let diam = match d.diam {
            Some(x) => x,
            None => {
                notes.push("diam(M) replaced by p·Λ".into());
                d.p as f64 * d.lambda
            }
        };
        Some((
            inj_lower_hp(&mut hp, d.geometry, d.n, vol, diam),
            "π·vol/(δ·vol(S^n))".into(),
        ))
    } else {
        None
    };

    let m = match &inj {
        Some((inj, _)) => {
            let ratio = hp.div(&hp.num(d.lambda), inj);
            let x = {
                let t = hp.ln(&ratio);
                hp.mul(&mu, &t)
            };
            let raw = hp.next_int_above(&x);
            if hp.to_f64(&x) < 1.0 {
                notes.push("μ·ln(Λ/inj) < 1: depth clamped to at least 1".into());
            }
            raw.max(1)
        }
        None if d.geometry == GeometryTag::Hyperbolic && d.n >= 2 => {
            let variant = d
                .volhyp_variant
                .unwrap_or_else(|| default_volhyp_variant(d.n));
            let r = volhyp_m(d.n, d.p, d.lambda, variant)?;
            let m = r.m;
            volhyp = Some(r);
            m
        }
        None => {
            return Err(Error::Input(
                "need one of inj, l_c or vol to bound the depth".into(),
            ));
        }
    };
    if d.min_edge.is_some() && d.vol.is_none() {
        notes.push(
            "min_edge given without vol: no closed-form regular simplex volume is used; supply vol"
                .into(),
        );
    }
    let mprime = depth_mprime(m, d.n);
    let total = total_bound(d.n, d.p, d.q, mprime);
    let total_s = total.to_string();
    let direct = (d.n <= 4).then(|| total_bound(d.n, d.p, d.q, m).to_string());
    Ok(BoundReport {
        mu: hp.decimal(&mu, REPORT_DIGITS),
        kappa: hp.decimal(&kappa, REPORT_DIGITS),
        inj: inj.as_ref().map(|(v, _)| hp.decimal(v, REPORT_DIGITS)),
        inj_source: inj
            .map(|(_, s)| s)
            .unwrap_or_else(|| "hyperbolic volume bound".into()),
        chain,
        volhyp,
        m,
        mprime,
        total_bound_digits: total_s.len(),
        total_bound: total_s,
        total_bound_direct: direct,
        notes,
    })
}
