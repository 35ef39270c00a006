//! Polydisk self-maps in normal form, the attractor ideal and the
//! semiconjugacy onto the attractor.

use serde::Serialize;

use super::series::{GaussNorm, TateSeries2};
use crate::error::{Error, Result};
use crate::exactnum::rational::Rational;

/// Guard digits for membership and residual verdicts.
pub const GUARD: i64 = 4;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum NormalForm {
    /// (x, y) -> (x + y P, y Q)
    FixedLine { p_series: TateSeries2, q_series: TateSeries2 },
    /// (x, y) -> (a x + b + P, y Q)
    Semiattracting { a: String, b: String, p_series: TateSeries2, q_series: TateSeries2 },
    General,
}

#[derive(Clone, Debug, Serialize)]
pub struct PolydiskMap {
    pub f1: TateSeries2,
    pub f2: TateSeries2,
    pub normal_form: NormalForm,
}

fn norm_below_one(s: &TateSeries2) -> bool {
    let g = s.gauss_norm();
    g.val.unwrap_or(g.prec) >= 1 && g.tail.is_some_and(|k| k >= 1)
}

impl PolydiskMap {
    pub fn general(f1: TateSeries2, f2: TateSeries2) -> Result<Self> {
        for f in [&f1, &f2] {
            if f.gauss_norm().val.is_some_and(|v| v < 0) {
                return Err(Error::NotPolydiskSelfMap);
            }
        }
        Ok(PolydiskMap { f1, f2, normal_form: NormalForm::General })
    }

    /// (x + y P, y Q) with rho(P) < 1 and rho(Q) < 1.
    pub fn fixed_line(p_series: TateSeries2, q_series: TateSeries2) -> Result<Self> {
        if !norm_below_one(&p_series) || !norm_below_one(&q_series) {
            return Err(Error::HypothesisViolated("fixed-line form needs rho(P) < 1 and rho(Q) < 1".into()));
        }
        let (p, t, m) = (p_series.prime(), p_series.truncation(), p_series.prec());
        let x = TateSeries2::x(p, t, m);
        let y = TateSeries2::y(p, t, m);
        let f1 = x.add(&y.mul(&p_series));
        let f2 = y.mul(&q_series);
        Ok(PolydiskMap { f1, f2, normal_form: NormalForm::FixedLine { p_series, q_series } })
    }

    /// (a x + b + P, y Q) with |a| = 1, |b| <= 1, rho(P) < 1, rho(Q) < 1.
    pub fn semiattracting(a: &Rational, b: &Rational, p_series: TateSeries2, q_series: TateSeries2) -> Result<Self> {
        let (p, t, m) = (p_series.prime(), p_series.truncation(), p_series.prec());
        let va = crate::exactnum::rational::valuation(a, p);
        let vb = crate::exactnum::rational::valuation(b, p);
        if va != Some(0) || vb.is_some_and(|v| v < 0) {
            return Err(Error::HypothesisViolated("semiattracting form needs |a| = 1 and |b| <= 1".into()));
        }
        if !norm_below_one(&p_series) || !norm_below_one(&q_series) {
            return Err(Error::HypothesisViolated("semiattracting form needs rho(P) < 1 and rho(Q) < 1".into()));
        }
        let x = TateSeries2::x(p, t, m);
        let y = TateSeries2::y(p, t, m);
        let f1 = x.scale(a).add(&TateSeries2::constant(p, t, m, b)).add(&p_series);
        let f2 = y.mul(&q_series);
        let nf = NormalForm::Semiattracting {
            a: crate::exactnum::rational::to_string(a),
            b: crate::exactnum::rational::to_string(b),
            p_series,
            q_series,
        };
        Ok(PolydiskMap { f1, f2, normal_form: nf })
    }

    pub fn prime(&self) -> u64 {
        self.f1.prime()
    }
}

/// s o f
pub fn compose(f: &PolydiskMap, s: &TateSeries2) -> Result<TateSeries2> {
    s.compose_with(&f.f1, &f.f2)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Membership {
    /// The pullbacks fell below p^-(M - guard) by step `evidence`.
    InAttractorIdeal { evidence: usize },
    /// The norm stayed constant over the final half of the run.
    NotInAttractorIdeal { limit_exponent: Option<i64> },
    Undecided,
}

#[derive(Clone, Debug, Serialize)]
pub struct SeminormReport {
    /// Gauss norms of (f^*)^n s for n = 0..=n_max.
    pub norms: Vec<GaussNorm>,
    pub monotone: bool,
    pub verdict: Membership,
}

fn exp_or_prec(g: &GaussNorm) -> i64 {
    g.val.unwrap_or(g.prec)
}

/// rho((f^*)^n s) for n <= n_max with a membership verdict for J^f.
pub fn rho_f_seminorm(f: &PolydiskMap, s: &TateSeries2, n_max: usize) -> Result<SeminormReport> {
    if n_max == 0 {
        return Err(Error::Precondition("n_max must be at least 1".into()));
    }
    let threshold = s.prec() - GUARD;
    let mut cur = s.clone();
    let mut norms = vec![cur.gauss_norm()];
    let mut verdict = Membership::Undecided;
    if exp_or_prec(&norms[0]) >= threshold {
        verdict = Membership::InAttractorIdeal { evidence: 0 };
    }
    for n in 1..=n_max {
        cur = compose(f, &cur)?;
        let g = cur.gauss_norm();
        norms.push(g);
        if verdict == Membership::Undecided && exp_or_prec(&g) >= threshold {
            verdict = Membership::InAttractorIdeal { evidence: n };
        }
    }
    let monotone = norms.windows(2).all(|w| exp_or_prec(&w[1]) >= exp_or_prec(&w[0]));
    if verdict == Membership::Undecided {
        let half = &norms[norms.len() / 2..];
        if half.len() >= 2 && half.iter().all(|g| g.val == half[0].val) {
            verdict = Membership::NotInAttractorIdeal { limit_exponent: half[0].val };
        }
    }
    Ok(SeminormReport { norms, monotone, verdict })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Contraction {
    /// b = p^-b_exponent
    pub b_exponent: i64,
    pub m: usize,
    /// rho(f^*(y h)) <= b rho(y h) checked on all monomials h up to the truncation.
    pub certified: bool,
}

/// Contraction constant of the pullback on the ideal (y), for normal forms.
pub fn contraction_constants(f: &PolydiskMap) -> Result<Contraction> {
    let q = match &f.normal_form {
        NormalForm::FixedLine { q_series, .. } => q_series,
        NormalForm::Semiattracting { q_series, .. } => q_series,
        NormalForm::General => return Err(Error::NormalFormRequired),
    };
    if !norm_below_one(q) {
        return Err(Error::HypothesisViolated("rho(Q) < 1 required".into()));
    }
    let b = q.gauss_norm().upper_exponent().unwrap();
    let (p, t, m) = (q.prime(), q.truncation(), q.prec());
    let mut certified = true;
    for d in 0..t {
        for j in 0..=d {
            // y * x^(d-j) y^j
            let h = TateSeries2::from_int_terms(p, t, m, &[(d - j, j + 1, 1)]);
            let img = compose(f, &h)?;
            let bound = img.gauss_norm().upper_exponent();
            if bound.is_none_or(|e| e < b) {
                certified = false;
            }
        }
    }
    Ok(Contraction { b_exponent: b, m: 1, certified })
}

#[derive(Clone, Debug, Serialize)]
pub struct AttractorData {
    /// Generator of J^f.
    pub generator: TateSeries2,
    /// psi = (psi_x, 0); the attractor Y = {y = 0} is identified with the unit disk by x.
    pub psi_x: TateSeries2,
    pub contraction: Contraction,
    /// Residual constants: rho(psi o f^(n+1) - psi o f^n) <= C beta^n with
    /// C = p^-c_exponent and beta = p^-beta_exponent.
    pub c_exponent: i64,
    pub beta_exponent: i64,
    pub terms_used: usize,
}

/// psi = x + sum_{i>=0} (f^*)^i(y) (f^*)^i(P), summed until the terms drop below p^-M.
pub fn attractor_psi(f: &PolydiskMap) -> Result<AttractorData> {
    let NormalForm::FixedLine { p_series, .. } = &f.normal_form else {
        return Err(Error::NormalFormRequired);
    };
    let contraction = contraction_constants(f)?;
    let (p, t, m) = (p_series.prime(), p_series.truncation(), p_series.prec());
    let mut yi = TateSeries2::y(p, t, m);
    let mut pi = p_series.clone();
    let mut psi = TateSeries2::x(p, t, m);
    let max_terms = (4 * m as usize).max(16);
    let mut used = 0;
    loop {
        let term = yi.mul(&pi);
        if term.gauss_norm().val.is_none_or(|v| v >= m) {
            // remaining terms are bounded by this one's norm bound times powers of rho(Q)
            let bound = term.gauss_norm().upper_exponent();
            let tail = match (psi.tail(), bound) {
                (Some(a), Some(b)) => Some(a.min(b)),
                _ => None,
            };
            psi = psi.with_tail(tail);
            break;
        }
        psi = psi.add(&term);
        used += 1;
        if used >= max_terms {
            return Err(Error::NotDecaying);
        }
        yi = compose(f, &yi)?;
        pi = compose(f, &pi)?;
    }
    let residual0 = semiconjugacy_residual(f, &psi, 0)?;
    let c_exponent = residual0.val.unwrap_or(m).min(m - GUARD);
    Ok(AttractorData {
        generator: TateSeries2::y(p, t, m),
        psi_x: psi,
        contraction,
        c_exponent,
        beta_exponent: contraction.b_exponent,
        terms_used: used,
    })
}

/// Gauss norm of (psi o f - f|_Y o psi) o f^n. On the fixed line f|_Y is the identity.
pub fn semiconjugacy_residual(f: &PolydiskMap, psi_x: &TateSeries2, n: usize) -> Result<GaussNorm> {
    if !matches!(f.normal_form, NormalForm::FixedLine { .. }) {
        return Err(Error::NormalFormRequired);
    }
    let mut r = compose(f, psi_x)?.sub(psi_x);
    for _ in 0..n {
        r = compose(f, &r)?;
    }
    Ok(r.gauss_norm())
}

/// True when psi restricted to y = 0 is the identity at precision.
pub fn psi_is_identity_on_attractor(psi_x: &TateSeries2) -> bool {
    let t = psi_x.truncation();
    (0..=t).all(|i| {
        let c = psi_x.coeff(i, 0);
        if i == 1 {
            (&c - &crate::padic::PadicElement::one(psi_x.prime(), psi_x.prec())).is_zero()
        } else {
            c.is_zero()
        }
    })
}
