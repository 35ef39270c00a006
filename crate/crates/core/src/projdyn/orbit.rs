//! Forward orbits with cycle detection.

use std::collections::HashMap;

use serde::Serialize;

use super::map::{evaluate, MapSpec, ProjPoint};
use crate::error::{Error, Result};

/// Coordinates larger than this many bits abort the orbit.
pub const HEIGHT_CAP_BITS: u64 = 1 << 24;

#[derive(Clone, Debug, Serialize)]
pub struct Preperiodic {
    pub tail: usize,
    pub cycle: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitReport {
    pub points: Vec<ProjPoint>,
    pub preperiodic: Option<Preperiodic>,
}

/// x, f(x), ..., f^n(x), stopping the computation at the first repeat.
pub fn orbit(f: &MapSpec, x: &ProjPoint, n: usize) -> Result<OrbitReport> {
    let mut points = vec![x.clone()];
    let mut seen: HashMap<ProjPoint, usize> = HashMap::new();
    seen.insert(x.clone(), 0);
    let mut preperiodic = None;
    while points.len() <= n {
        let next = evaluate(f, points.last().unwrap())?;
        if next.height_bits() > HEIGHT_CAP_BITS {
            return Err(Error::CapExceeded(format!(
                "orbit coordinates exceed {HEIGHT_CAP_BITS} bits at step {}",
                points.len()
            )));
        }
        if let Some(&i) = seen.get(&next) {
            let cycle = points.len() - i;
            preperiodic = Some(Preperiodic { tail: i, cycle });
            while points.len() <= n {
                let j = i + (points.len() - i) % cycle;
                points.push(points[j].clone());
            }
            break;
        }
        seen.insert(next.clone(), points.len());
        points.push(next);
    }
    Ok(OrbitReport { points, preperiodic })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::int;
    use crate::exactnum::Poly;
    use crate::projdyn::map::P1Map;

    fn pm(c: &[i64]) -> MapSpec {
        MapSpec::P1(P1Map::polynomial(&Poly::from_ints(c)).unwrap())
    }

    #[test]
    fn spec_examples() {
        let r = orbit(&pm(&[0, 0, 1]), &ProjPoint::p1_rat(int(2)), 3).unwrap();
        let v: Vec<String> = r.points.iter().map(|p| p.affine().unwrap().to_string()).collect();
        assert_eq!(v, ["2", "4", "16", "256"]);
        assert!(r.preperiodic.is_none());

        let r = orbit(&pm(&[0, 0, 1]), &ProjPoint::p1_rat(int(1)), 5).unwrap();
        let pp = r.preperiodic.unwrap();
        assert_eq!((pp.tail, pp.cycle), (0, 1));

        let r = orbit(&pm(&[-1, 0, 1]), &ProjPoint::p1_rat(int(0)), 4).unwrap();
        let v: Vec<String> = r.points.iter().map(|p| p.affine().unwrap().to_string()).collect();
        assert_eq!(v, ["0", "-1", "0", "-1", "0"]);
        let pp = r.preperiodic.unwrap();
        assert_eq!((pp.tail, pp.cycle), (0, 2));
    }
}
