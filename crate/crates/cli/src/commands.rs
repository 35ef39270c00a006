//! One function per manifest command. Each reads all of its parameters,
//! calls `finish` to reject leftovers, then runs the experiment.

use orbitlab_core::classify::{classify_type, critical_orbits, exceptional_points, DEFAULT_N_BOUND};
use orbitlab_core::exactnum::{MPoly, Rational};
use orbitlab_core::localdyn::{build_arc_auto, dml_decide, find_good_prime, invariant_polydisk, DEFAULT_N_DIRECT};
use orbitlab_core::padic::PadicElement;
use orbitlab_core::projdyn::{degrees, evaluate, fixed_points, preimage_chain, FixedPointData, MapSpec, ProjPoint, DEFAULT_DEGREE_CAP};
use orbitlab_core::tate::{
    attractor_psi, contraction_constants, NormalForm, psi_is_identity_on_attractor, rho_f_seminorm, semiconjugacy_residual, PolydiskMap,
    TateSeries2,
};
use orbitlab_core::zdo::curves::DEFAULT_BIDEGREE_CAP;
use orbitlab_core::zdo::multipliers::DEFAULT_INDEPENDENCE_BOUND;
use orbitlab_core::zdo::structure::{DEFAULT_PAIR_BIDEGREE, DEFAULT_SAMPLE_BUDGET};
use orbitlab_core::zdo::{
    adelic_member, find_member, good_fixed_point, good_multipliers, invariant_curve_check, invariant_curve_search,
    multiplicative_independence, orbit_closure, r_property, split_invariant_structure, verify_diophantine, AdelicRegion,
};
use orbitlab_core::Error;
use serde::Serialize;
use serde_json::{json, Value};

use crate::manifest::{Manifest, ManifestError};

pub const DEFAULT_EPS: f64 = 1e-9;
pub const DEFAULT_P_MAX: u64 = 50;

/// Outcome of a command: a JSON body or a core error.
pub enum CommandError {
    Manifest(ManifestError),
    Core(Error),
}

impl From<ManifestError> for CommandError {
    fn from(e: ManifestError) -> Self {
        CommandError::Manifest(e)
    }
}

impl From<Error> for CommandError {
    fn from(e: Error) -> Self {
        CommandError::Core(e)
    }
}

type CResult = std::result::Result<Value, CommandError>;

/// Run-wide settings resolved from flags, environment and manifest.
pub struct Settings {
    pub precision: i64,
    pub seed: u64,
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn p1_map(f: &MapSpec) -> std::result::Result<&orbitlab_core::projdyn::P1Map, Error> {
    match f {
        MapSpec::P1(g) => Ok(g),
        _ => Err(Error::Precondition("this command needs a map of P1".into())),
    }
}

pub fn dispatch(cmd: &str, m: &mut Manifest, s: &Settings) -> CResult {
    match cmd {
        "classify" => classify(m),
        "fixed-points" => fixed(m),
        "orbit-closure" => closure(m),
        "dml" => dml(m, s),
        "polydisk" => polydisk(m, s),
        "attractor" => attractor(m, s),
        "adelic" => adelic(m),
        "independence" => independence(m, s),
        "good-fixed-point" => good(m),
        "invariant-curves" => curves(m),
        "split-structure" => structure(m, s),
        "preimage-chain" => chain(m),
        other => Err(ManifestError::UnknownCommand(other.to_string()).into()),
    }
}

fn classify(m: &mut Manifest) -> CResult {
    let f = m.map()?;
    let n = m.uint("n_bound", DEFAULT_N_BOUND as u64)? as usize;
    m.finish()?;
    let v = classify_type(&f, n)?;
    let cd = critical_orbits(&f, n)?;
    let ex = exceptional_points(&f, n)?;
    let mut out = to_json(&v);
    out["ramification_total"] = json!(cd.ramification_total);
    out["critical"] = to_json(&cd);
    out["exceptional"] = to_json(&ex);
    Ok(out)
}

fn fixed(m: &mut Manifest) -> CResult {
    let f = m.map()?;
    let with_r = m.flag("r_property", false)?;
    let eps = if with_r { m.float("eps", DEFAULT_EPS)? } else { DEFAULT_EPS };
    m.finish()?;
    let fps = fixed_points(&f)?;
    let mut out = json!({ "degrees": to_json(&degrees(&f)), "fixed_points": to_json(&fps) });
    if with_r {
        out["r_property"] = to_json(&r_property(&fps, eps)?);
    }
    Ok(out)
}

fn closure(m: &mut Manifest) -> CResult {
    let f = m.map()?;
    let x = m.point(f.space(), None)?;
    let d = m.degrees("degree", 2)?;
    let mpts = m.int_required("mpts")?;
    if mpts <= 0 {
        return Err(ManifestError::Malformed("'mpts' must be positive".into()).into());
    }
    m.finish()?;
    Ok(to_json(&orbit_closure(&f, &x, &d, mpts as usize)?))
}

fn dml(m: &mut Manifest, s: &Settings) -> CResult {
    let f = m.map()?;
    let x = m.point(f.space(), None)?;
    let z = m.polys("targets")?.ok_or_else(|| ManifestError::Malformed("missing 'targets'".into()))?;
    let p_min = m.uint("p_min", 3)?;
    let p_max = m.uint("p_max", 100)?;
    let n_direct = m.uint("n_direct", DEFAULT_N_DIRECT as u64)? as usize;
    m.finish()?;
    let r = find_good_prime(&f, &x, p_min, p_max)?;
    let (arc, r) = build_arc_auto(&f, &r, &x, s.precision)?;
    let v = dml_decide(&f, &x, &z, &arc, n_direct)?;
    let mut out = to_json(&v);
    out["good_prime"] = to_json(&r);
    out["arc"] = json!({
        "prime": arc.prime,
        "period": arc.period,
        "preperiod": arc.preperiod,
        "precision": arc.precision,
        "terms": arc.terms,
    });
    Ok(out)
}

fn polydisk(m: &mut Manifest, s: &Settings) -> CResult {
    let f = m.map()?;
    let x = m.point(f.space(), None)?;
    let p = m.int_required("prime")?;
    m.finish()?;
    if p < 2 {
        return Err(ManifestError::Malformed("'prime' must be a prime".into()).into());
    }
    let p = p as u64;
    if evaluate(&f, &x)? != x {
        return Err(Error::Precondition("the point is not fixed".into()).into());
    }
    let o = FixedPointData { point: x, multipliers: vec![], multiplicity: 1, degenerate: false, embeddings: vec![0] };
    Ok(to_json(&invariant_polydisk(&f, &o, p, s.precision)?))
}

fn series(m: &mut Manifest, key: &str, p: u64, t: u32, prec: i64) -> std::result::Result<TateSeries2, CommandError> {
    let src = m.string_required(key)?;
    let poly = MPoly::parse(&src, &["x", "y"]).map_err(|e| ManifestError::Malformed(format!("{key}: {e}")))?;
    let terms: Vec<(u32, u32, Rational)> = poly.terms().map(|(e, c)| (e[0], e[1], c.clone())).collect();
    Ok(TateSeries2::from_terms(p, t, prec, &terms))
}

fn attractor(m: &mut Manifest, s: &Settings) -> CResult {
    let p = m.int_required("prime")?;
    if p < 2 {
        return Err(ManifestError::Malformed("'prime' must be a prime".into()).into());
    }
    let p = p as u64;
    let t = m.int("truncation", orbitlab_core::tate::DEFAULT_T as i64)?;
    if t < 1 {
        return Err(ManifestError::Malformed("'truncation' must be positive".into()).into());
    }
    let t = t as u32;
    let n_max = m.uint("n_max", 20)? as usize;
    let form = m.string("form")?.unwrap_or_else(|| "fixed_line".into());
    let prec = s.precision;
    let f = match form.as_str() {
        "fixed_line" => {
            let (ps, qs) = (series(m, "P", p, t, prec)?, series(m, "Q", p, t, prec)?);
            m.finish()?;
            PolydiskMap::fixed_line(ps, qs)?
        }
        "semiattracting" => {
            let (a, b) = (m.rational("a", None)?, m.rational("b", Some("0"))?);
            let (ps, qs) = (series(m, "P", p, t, prec)?, series(m, "Q", p, t, prec)?);
            m.finish()?;
            PolydiskMap::semiattracting(&a, &b, ps, qs)?
        }
        "general" => {
            let (f1, f2) = (series(m, "f1", p, t, prec)?, series(m, "f2", p, t, prec)?);
            m.finish()?;
            PolydiskMap::general(f1, f2)?
        }
        other => return Err(ManifestError::Malformed(format!("unknown form '{other}'")).into()),
    };
    let contraction = contraction_constants(&f)?;
    let y = TateSeries2::y(p, t, prec);
    let mut out = json!({
        "map": to_json(&f),
        "contraction": to_json(&contraction),
        "seminorm_y": to_json(&rho_f_seminorm(&f, &y, n_max)?),
    });
    if matches!(f.normal_form, NormalForm::FixedLine { .. }) {
        let a = attractor_psi(&f)?;
        out["residual"] = to_json(&semiconjugacy_residual(&f, &a.psi_x, 0)?);
        out["psi_identity_on_attractor"] = json!(psi_is_identity_on_attractor(&a.psi_x));
        out["attractor"] = to_json(&a);
    }
    Ok(out)
}

fn adelic(m: &mut Manifest) -> CResult {
    let k = m.field()?;
    let region: AdelicRegion = m.string_required("region")?.parse()?;
    let xs = m.numbers("x", k.as_ref())?;
    let search = if xs.is_none() { Some(m.int("search", 20)?) } else { None };
    m.finish()?;
    match (xs, search) {
        (Some(xs), _) => Ok(to_json(&adelic_member(&xs, &region)?)),
        (None, Some(n)) => {
            let found = find_member(&region, n)?;
            Ok(match found {
                Some((x, mem)) => json!({ "found": true, "member": x.to_string(), "membership": to_json(&mem) }),
                None => json!({ "found": false }),
            })
        }
        (None, None) => unreachable!(),
    }
}

fn independence(m: &mut Manifest, s: &Settings) -> CResult {
    let k = m.field()?;
    let l1 = m.number("lambda1", k.as_ref())?;
    let l2 = m.number("lambda2", k.as_ref())?;
    let b = m.int("bound", DEFAULT_INDEPENDENCE_BOUND)?;
    let dioph = if m.has("diophantine_prime") {
        let p = m.uint("diophantine_prime", 0)?;
        Some((p, m.rational("c", None)?, m.rational("beta", Some("1"))?, m.uint("n_max", 50)? as u32))
    } else {
        None
    };
    m.finish()?;
    let mut out = to_json(&multiplicative_independence(&l1, &l2, b)?);
    if let Some((p, c, beta, n)) = dioph {
        let (Some(a1), Some(a2)) = (l1.as_rational(), l2.as_rational()) else {
            return Err(Error::Precondition("the Diophantine check takes rational multipliers".into()).into());
        };
        let e1 = PadicElement::from_rational(p, &a1, s.precision);
        let e2 = PadicElement::from_rational(p, &a2, s.precision);
        out["diophantine"] = to_json(&verify_diophantine(&e1, &e2, &c, &beta, n)?);
    }
    Ok(out)
}

fn good(m: &mut Manifest) -> CResult {
    let p_max = m.uint("p_max", DEFAULT_P_MAX)?;
    let b = m.int("bound", DEFAULT_INDEPENDENCE_BOUND)?;
    let has_map = m.has("map") || m.has("map_file");
    if !has_map {
        let k = m.field()?;
        let l1 = m.number("lambda1", k.as_ref())?;
        let l2 = m.number("lambda2", k.as_ref())?;
        m.finish()?;
        return Ok(to_json(&good_multipliers(&l1, &l2, p_max, b)?));
    }
    let f = m.map()?;
    let index = if m.has("point") { None } else { Some(m.uint("index", 0)? as usize) };
    let x = if index.is_none() { Some(m.point(f.space(), None)?) } else { None };
    m.finish()?;
    let fps = fixed_points(&f)?;
    let fp = match (&x, index) {
        (Some(x), _) => fps.iter().find(|q| &q.point == x),
        (None, Some(i)) => fps.get(i),
        _ => None,
    }
    .ok_or_else(|| Error::Precondition("no such fixed point".into()))?;
    let mut out = to_json(&good_fixed_point(fp, p_max, b)?);
    out["fixed_point"] = to_json(fp);
    Ok(out)
}

fn curves(m: &mut Manifest) -> CResult {
    let f = m.map()?;
    let a = m.uint("a_max", DEFAULT_BIDEGREE_CAP as u64)? as u32;
    let b = m.uint("b_max", DEFAULT_BIDEGREE_CAP as u64)? as u32;
    let check = m.string("check")?;
    m.finish()?;
    let MapSpec::P1xN(fs) = &f else {
        return Err(Error::Precondition("invariant curves need a split map of P1 x P1".into()).into());
    };
    let [f1, f2] = fs.as_slice() else {
        return Err(Error::Precondition("invariant curves need exactly two factors".into()).into());
    };
    let mut out = to_json(&invariant_curve_search(f1, f2, a, b)?);
    if let Some(c) = check {
        let p = MPoly::parse(&c, &orbitlab_core::zdo::curves::BIHOM_NAMES)?;
        out["check"] = to_json(&invariant_curve_check(&p, f1, f2)?);
    }
    Ok(out)
}

fn structure(m: &mut Manifest, s: &Settings) -> CResult {
    let f = m.map()?;
    let forms = m.strings("v")?.unwrap_or_default();
    let budget = m.uint("budget", DEFAULT_SAMPLE_BUDGET as u64)? as usize;
    let cap = m.uint("bidegree_cap", DEFAULT_PAIR_BIDEGREE as u64)? as u32;
    m.finish()?;
    let n = match &f {
        MapSpec::P1xN(v) => v.len(),
        _ => return Err(Error::Precondition("expected a split map of (P1)^N".into()).into()),
    };
    let names: Vec<String> = (1..=n).flat_map(|i| [format!("X{i}"), format!("Y{i}")]).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let v = forms.iter().map(|s| MPoly::parse(s, &refs)).collect::<orbitlab_core::Result<Vec<_>>>()?;
    Ok(to_json(&split_invariant_structure(&v, &f, budget, cap, s.seed)?))
}

fn chain(m: &mut Manifest) -> CResult {
    let f = m.map()?;
    let x = m.point(f.space(), None)?;
    let n = m.uint("length", 4)? as usize;
    let cap = m.uint("degree_cap", DEFAULT_DEGREE_CAP as u64)? as usize;
    m.finish()?;
    let g = p1_map(&f)?;
    let c = preimage_chain(g, &x, n, cap)?;
    let mut out = to_json(&c);
    out["start"] = to_json::<ProjPoint>(&x);
    Ok(out)
}
