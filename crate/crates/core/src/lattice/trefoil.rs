use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;

use super::{LatticeError, LatticeFunction, Site};
use crate::par::{self, Exec};
use crate::scalar::Rational;

/// Values prescribed on the trefoil
/// `Y_n = {n} ∪ {n − je₁} ∪ {n + je₂} ∪ {n + j(e₁ − e₂)}`, `j ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrefoilData {
    center: Site,
    values: BTreeMap<Site, Rational>,
}

impl TrefoilData {
    pub fn new(center: Site) -> Self {
        TrefoilData { center, values: BTreeMap::new() }
    }

    pub fn center(&self) -> Site {
        self.center
    }

    /// Whether `p` lies on `Y_n`.
    pub fn on_trefoil(center: Site, p: Site) -> bool {
        let d = p - center;
        (d.y == 0 && d.x <= 0) || (d.x == 0 && d.y > 0) || (d.x > 0 && d.x + d.y == 0)
    }

    /// The points of `Y_n` within hexagonal distance `radius`.
    pub fn points(center: Site, radius: i64) -> Vec<Site> {
        let mut out = vec![center];
        for j in 1..=radius {
            out.push(center + Site::new(-j, 0));
            out.push(center + Site::new(0, j));
            out.push(center + Site::new(j, -j));
        }
        out
    }

    /// Set a value; returns `false` (and ignores it) off the trefoil.
    pub fn set(&mut self, p: Site, v: Rational) -> bool {
        if !Self::on_trefoil(self.center, p) {
            return false;
        }
        self.values.insert(p, v);
        true
    }

    pub fn get(&self, p: Site) -> Option<&Rational> {
        self.values.get(&p)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Trefoil data of `ψ` within the given radius.
    pub fn from_function(center: Site, psi: &LatticeFunction, radius: i64) -> Result<Self, LatticeError> {
        let mut d = TrefoilData::new(center);
        for p in Self::points(center, radius) {
            d.values.insert(p, psi.get(p)?);
        }
        Ok(d)
    }

    /// Data given by a closure on the trefoil points within `radius`.
    pub fn from_fn(center: Site, radius: i64, f: impl Fn(Site) -> Rational) -> Self {
        let values = Self::points(center, radius).into_iter().map(|p| (p, f(p))).collect();
        TrefoilData { center, values }
    }
}

fn sector_u(data: &TrefoilData, r: i64, read: &dyn Fn(Site) -> Rational) -> Vec<(Site, Rational)> {
    // a < 0 < b, ψ_p = −ψ_{p+e₁} − ψ_{p+e₁−e₂}, by increasing −a.
    let n = data.center;
    let mut local: HashMap<Site, Rational> = HashMap::new();
    let get = |local: &HashMap<Site, Rational>, p: Site| local.get(&p).cloned().unwrap_or_else(|| read(p));
    for a in (-r..=-1).rev() {
        for b in 1..=r {
            let p = n + Site::new(a, b);
            let v = -(get(&local, p + Site::E1) + get(&local, p + Site::new(1, -1)));
            local.insert(p, v);
        }
    }
    local.into_iter().collect()
}

fn sector_upp(data: &TrefoilData, r: i64, read: &dyn Fn(Site) -> Rational) -> Vec<(Site, Rational)> {
    // a > 0, a + b > 0, ψ_p = −ψ_{p−e₁} − ψ_{p−e₂}, by increasing a + b.
    let n = data.center;
    let mut local: HashMap<Site, Rational> = HashMap::new();
    let get = |local: &HashMap<Site, Rational>, p: Site| local.get(&p).cloned().unwrap_or_else(|| read(p));
    for s in 1..=r {
        for a in 1..=r {
            let p = n + Site::new(a, s - a);
            let v = -(get(&local, p - Site::E1) + get(&local, p - Site::E2));
            local.insert(p, v);
        }
    }
    local.into_iter().collect()
}

fn sector_up(data: &TrefoilData, r: i64, read: &dyn Fn(Site) -> Rational) -> Vec<(Site, Rational)> {
    // b < 0, a + b < 0, ψ_p = −ψ_{p+e₂} − ψ_{p+e₂−e₁}, by increasing −b.
    let n = data.center;
    let mut local: HashMap<Site, Rational> = HashMap::new();
    let get = |local: &HashMap<Site, Rational>, p: Site| local.get(&p).cloned().unwrap_or_else(|| read(p));
    for b in (-r..=-1).rev() {
        for a in (-r - b)..=(-b - 1) {
            let p = n + Site::new(a, b);
            let v = -(get(&local, p + Site::E2) + get(&local, p + Site::new(-1, 1)));
            local.insert(p, v);
        }
    }
    local.into_iter().collect()
}

/// The unique holomorphic function with the given trefoil values,
/// evaluated on `targets`.
///
/// The recursion for a site at hexagonal distance `r` from the center only
/// reads trefoil data within distance `r`; missing data there is reported
/// as [`LatticeError::WindowNotSectorClosed`].
pub fn extend_holomorphic(
    data: &TrefoilData,
    targets: impl IntoIterator<Item = Site>,
) -> Result<LatticeFunction, LatticeError> {
    extend_holomorphic_with(Exec::default(), data, targets)
}

pub fn extend_holomorphic_with(
    exec: Exec,
    data: &TrefoilData,
    targets: impl IntoIterator<Item = Site>,
) -> Result<LatticeFunction, LatticeError> {
    let targets: Vec<Site> = targets.into_iter().collect();
    let n = data.center;
    let r = targets.iter().map(|&p| (p - n).hex_norm()).max().unwrap_or(0);
    if let Some(p) = TrefoilData::points(n, r).into_iter().find(|p| !data.values.contains_key(p)) {
        return Err(LatticeError::WindowNotSectorClosed { site: p });
    }
    let read = |p: Site| data.values.get(&p).cloned().unwrap_or_else(Rational::zero);
    let (u, (upp, up)) = par::join(
        exec,
        || sector_u(data, r, &read),
        || par::join(exec, || sector_upp(data, r, &read), || sector_up(data, r, &read)),
    );
    let mut all: HashMap<Site, Rational> = HashMap::with_capacity(u.len() + upp.len() + up.len());
    all.extend(u);
    all.extend(upp);
    all.extend(up);
    let mut out = LatticeFunction::windowed();
    for p in targets {
        let v = match all.get(&p) {
            Some(v) => v.clone(),
            None => data.values.get(&p).cloned().expect("trefoil point"),
        };
        out.insert(p, v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{apply_qplus, covariant_constant, Rect};
    use crate::scalar::rat;

    #[test]
    fn zero_data_gives_zero() {
        let d = TrefoilData::from_fn(Site::ORIGIN, 6, |_| rat(0));
        let f = extend_holomorphic(&d, Rect::square(-3, 3).sites()).unwrap();
        assert!(f.iter().all(|(_, v)| v.is_zero()));
    }

    #[test]
    fn unit_at_center() {
        let d = TrefoilData::from_fn(Site::ORIGIN, 4, |p| rat((p == Site::ORIGIN) as i64));
        let f = extend_holomorphic(&d, [Site::new(-1, 1)]).unwrap();
        assert_eq!(f.get(Site::new(-1, 1)).unwrap(), rat(-1));
    }

    #[test]
    fn covariant_constant_reproduced() {
        let vals = [rat(4), rat(-1), rat(-3)];
        let cc = covariant_constant(&vals, Rect::square(-14, 14).sites()).unwrap();
        let d = TrefoilData::from_function(Site::new(1, -2), &cc, 11).unwrap();
        let f = extend_holomorphic(&d, Rect::square(-5, 5).sites()).unwrap();
        assert!(f.agrees_on(&cc, Rect::square(-5, 5).sites()));
    }

    #[test]
    fn result_is_holomorphic_and_sequential_agrees() {
        let d = TrefoilData::from_fn(Site::new(2, 1), 30, |p| rat((p.x * 7 + p.y * 3).rem_euclid(5) - 2));
        let w = Rect::new(-6, 9, -4, 8);
        let f = extend_holomorphic(&d, w.sites()).unwrap();
        let g = extend_holomorphic_with(Exec::Sequential, &d, w.sites()).unwrap();
        assert_eq!(f, g);
        assert!(apply_qplus(&f).iter().all(|(_, v)| v.is_zero()));
        for p in TrefoilData::points(d.center(), 4) {
            assert_eq!(f.get(p).unwrap(), d.get(p).unwrap().clone());
        }
    }

    #[test]
    fn missing_data_is_reported() {
        let d = TrefoilData::from_fn(Site::ORIGIN, 2, |_| rat(1));
        let e = extend_holomorphic(&d, [Site::new(3, 0)]).unwrap_err();
        assert!(matches!(e, LatticeError::WindowNotSectorClosed { .. }));
    }
}
