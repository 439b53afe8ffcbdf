//! Expressing one move as a sequence of others.
//!
//! The fixed recipes return concrete sites; [`expand_via_budget`] searches
//! for a sequence drawn from a multiset of kinds. In every case the claim is
//! checked the same way: replaying the sequence must land on the canonical
//! code of the direct move ([`certify`]).

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::flips::{apply_flip, apply_flip_tracked, enumerate_sites, FlipError, FlipKind, FlipSite};
use crate::surface::{canonical_code, CanonicalCode, ColorMode, Coloring, Face, Triangulation, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("recipe expects a {expected} site, got {got}")]
    WrongKind { expected: FlipKind, got: FlipKind },
    #[error(transparent)]
    Flip(#[from] FlipError),
    #[error("every orientation of the edge has the blocking chord uy")]
    NoEligibleOrientation,
    #[error("no sequence within budget {0}")]
    NotFound(Budget),
    #[error("no default budget for {0}")]
    NoDefaultBudget(FlipKind),
}

fn expect_kind(site: &FlipSite, expected: FlipKind) -> Result<(), RewriteError> {
    if site.kind() != expected {
        return Err(RewriteError::WrongKind {
            expected,
            got: site.kind(),
        });
    }
    Ok(())
}

fn ps(v: &[Vertex]) -> FlipSite {
    FlipSite::new(FlipKind::Ps, v.to_vec()).unwrap().normalized()
}

/// Splits a BES into two pentagon splittings, when some orientation of the
/// edge avoids the blocking chord.
///
/// With `(v0, v1)` the edge, `x, y` its sides and `u` the apex of the other
/// face on `x v1`, the first PS pivots at `v1` over the fan `u x v0 y` and the
/// second pivots at `u` over `x n y v1`, `n` being the vertex the first one
/// created. Orientations are tried in the order
/// `(x,y,v0,v1) = (c,d,a,b), (d,c,a,b), (c,d,b,a), (d,c,b,a)`.
pub fn expand_bes_via_ps(
    t: &Triangulation,
    col: &Coloring,
    bes: &FlipSite,
) -> Result<[FlipSite; 2], RewriteError> {
    expect_kind(bes, FlipKind::Bes)?;
    crate::flips::check_site(t, col, bes)?;
    let [a, b, c, d] = [bes.vertices()[0], bes.vertices()[1], bes.vertices()[2], bes.vertices()[3]];
    let n = t.vertex_count();
    for (x, y, v0, v1) in [(c, d, a, b), (d, c, a, b), (c, d, b, a), (d, c, b, a)] {
        let u = t.across(x, v1, v0).expect("edge lies in two faces");
        if u == y || t.has_edge(u, y) {
            continue;
        }
        return Ok([ps(&[v1, u, x, v0, y]), ps(&[u, x, n, y, v1])]);
    }
    Err(RewriteError::NoEligibleOrientation)
}

/// BES as a triangle subdivision of `abc` followed by contracting the new
/// `c*` towards `d`.
pub fn expand_bes_via_bts_pc(
    t: &Triangulation,
    col: &Coloring,
    bes: &FlipSite,
) -> Result<[FlipSite; 2], RewriteError> {
    expect_kind(bes, FlipKind::Bes)?;
    crate::flips::check_site(t, col, bes)?;
    let v = bes.vertices();
    let (a, b, c, d) = (v[0], v[1], v[2], v[3]);
    let n = t.vertex_count();
    let (a2, b2, c2) = (n, n + 1, n + 2);
    let bts = FlipSite::new(FlipKind::Bts, vec![a, b, c]).unwrap();
    let pc = FlipSite::new(FlipKind::Pc, vec![c2, b, a2, b2, a, d])
        .unwrap()
        .normalized();
    Ok([bts, pc])
}

/// BEW as a pentagon splitting at `d` followed by a triangle weld of
/// `p q d*` onto `a b c`.
pub fn expand_bew_via_ps_btw(
    t: &Triangulation,
    col: &Coloring,
    bew: &FlipSite,
) -> Result<[FlipSite; 2], RewriteError> {
    expect_kind(bew, FlipKind::Bew)?;
    crate::flips::check_site(t, col, bew)?;
    let v = bew.vertices();
    let (p, q, a, b, c, d) = (v[0], v[1], v[2], v[3], v[4], v[5]);
    let first = ps(&[d, b, p, q, a]);
    crate::flips::check_site(t, col, &first)?;
    let btw = FlipSite::new(FlipKind::Btw, vec![p, q, t.vertex_count(), a, b, c])
        .unwrap()
        .normalized();
    Ok([first, btw])
}

/// Applies `seq` in order.
pub fn replay(
    t: &Triangulation,
    col: &Coloring,
    seq: &[FlipSite],
) -> Result<(Triangulation, Coloring), FlipError> {
    let mut cur = (t.clone(), col.clone());
    for site in seq {
        cur = apply_flip(&cur.0, &cur.1, site)?;
    }
    Ok(cur)
}

fn code(t: &Triangulation, col: &Coloring) -> CanonicalCode {
    canonical_code(t, Some(col), ColorMode::UpToPermutation).expect("coloring matches")
}

/// Whether replaying `seq` ends on the canonical code of applying `direct`.
pub fn certify(
    t: &Triangulation,
    col: &Coloring,
    direct: &FlipSite,
    seq: &[FlipSite],
) -> Result<bool, FlipError> {
    let (dt, dc) = apply_flip(t, col, direct)?;
    let (rt, rc) = replay(t, col, seq)?;
    Ok(code(&dt, &dc) == code(&rt, &rc))
}

/// A multiset of move kinds.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Budget(BTreeMap<FlipKind, usize>);

impl Budget {
    pub fn new(items: &[(FlipKind, usize)]) -> Self {
        let mut m = BTreeMap::new();
        for &(k, c) in items {
            if c > 0 {
                *m.entry(k).or_insert(0) += c;
            }
        }
        Self(m)
    }

    /// `{BES×3, PC×4, BEW×1}` for the N-flip, `{BES×1, BEW×1}` for the
    /// P2-flip.
    pub fn default_for(kind: FlipKind) -> Option<Self> {
        match kind {
            FlipKind::NFlip => Some(Self::new(&[
                (FlipKind::Bes, 3),
                (FlipKind::Pc, 4),
                (FlipKind::Bew, 1),
            ])),
            FlipKind::P2Flip => Some(Self::new(&[(FlipKind::Bes, 1), (FlipKind::Bew, 1)])),
            _ => None,
        }
    }

    pub fn total(&self) -> usize {
        self.0.values().sum()
    }

    pub fn count(&self, kind: FlipKind) -> usize {
        self.0.get(&kind).copied().unwrap_or(0)
    }

    fn without_one(&self, kind: FlipKind) -> Self {
        let mut m = self.0.clone();
        match m.get_mut(&kind) {
            Some(1) => {
                m.remove(&kind);
            }
            Some(c) => *c -= 1,
            None => unreachable!(),
        }
        Self(m)
    }

    /// Whether some sub-multiset has vertex deltas summing to `delta`.
    fn can_reach(&self, delta: i64) -> bool {
        let items: Vec<_> = self.0.iter().map(|(k, &c)| (k.vertex_delta(), c)).collect();
        fn go(items: &[(i64, usize)], delta: i64) -> bool {
            match items.split_first() {
                None => delta == 0,
                Some((&(d, c), rest)) => (0..=c as i64).any(|i| go(rest, delta - i * d)),
            }
        }
        go(&items, delta)
    }
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, c)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}*{c}")?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad budget entry `{0}`, expected KIND or KIND*COUNT")]
pub struct BudgetParseError(pub String);

impl FromStr for Budget {
    type Err = BudgetParseError;

    /// Parses `bes*3,pc*4,bew`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().trim_start_matches('{').trim_end_matches('}');
        let mut items = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let bad = || BudgetParseError(part.to_string());
            let (k, c) = match part.split_once(['*', 'x']) {
                Some((k, c)) => (k, c.trim().parse().map_err(|_| bad())?),
                None => (part, 1),
            };
            items.push((k.trim().parse().map_err(|_| bad())?, c));
        }
        Ok(Self::new(&items))
    }
}

/// Searches for a sequence of moves drawn from `budget` whose result has the
/// same canonical code as applying `site` directly.
///
/// Candidate sites must touch the vertices of `site` or a vertex created
/// along the way. The search is depth-first in ascending `(kind, site)`
/// order, so the sequence returned is the least one in that order; failed
/// states are memoized by face set, local vertex set and remaining budget.
pub fn expand_via_budget(
    t: &Triangulation,
    col: &Coloring,
    site: &FlipSite,
    budget: &Budget,
) -> Result<Vec<FlipSite>, RewriteError> {
    let (dt, dc) = apply_flip(t, col, site)?;
    let mut search = BudgetSearch {
        target: code(&dt, &dc),
        target_n: dt.vertex_count() as i64,
        target_degrees: degree_profile(&dt),
        failed: HashSet::new(),
        path: Vec::new(),
    };
    let local: BTreeSet<Vertex> = site.vertices().iter().copied().collect();
    if search.dfs(t, col, &local, budget) {
        Ok(search.path)
    } else {
        Err(RewriteError::NotFound(budget.clone()))
    }
}

/// [`expand_via_budget`] with the default budget for the site's kind.
pub fn expand_with_default_budget(
    t: &Triangulation,
    col: &Coloring,
    site: &FlipSite,
) -> Result<Vec<FlipSite>, RewriteError> {
    let budget =
        Budget::default_for(site.kind()).ok_or(RewriteError::NoDefaultBudget(site.kind()))?;
    expand_via_budget(t, col, site, &budget)
}

struct BudgetSearch {
    target: CanonicalCode,
    target_n: i64,
    target_degrees: Vec<usize>,
    failed: HashSet<(Vec<Face>, Vec<Vertex>, Budget)>,
    path: Vec<FlipSite>,
}

fn degree_profile(t: &Triangulation) -> Vec<usize> {
    let mut d: Vec<usize> = (0..t.vertex_count()).map(|v| t.degree(v)).collect();
    d.sort_unstable();
    d
}

impl BudgetSearch {
    fn dfs(
        &mut self,
        t: &Triangulation,
        col: &Coloring,
        local: &BTreeSet<Vertex>,
        budget: &Budget,
    ) -> bool {
        if t.vertex_count() as i64 == self.target_n
            && degree_profile(t) == self.target_degrees
            && code(t, col) == self.target
        {
            return true;
        }
        if !budget.can_reach(self.target_n - t.vertex_count() as i64) {
            return false;
        }
        // Exact labeled state: far cheaper than a canonical form per node.
        let key = (t.faces().to_vec(), local.iter().copied().collect(), budget.clone());
        if self.failed.contains(&key) {
            return false;
        }
        let kinds: Vec<FlipKind> = budget.0.keys().copied().collect();
        for kind in kinds {
            let rest = budget.without_one(kind);
            for site in enumerate_sites(t, col, kind) {
                if !site.vertices().iter().any(|v| local.contains(v)) {
                    continue;
                }
                let (nt, nc, map) = apply_flip_tracked(t, col, &site).unwrap();
                let n = t.vertex_count();
                let next: BTreeSet<Vertex> = local
                    .iter()
                    .copied()
                    .chain(n..map.len())
                    .filter_map(|v| map[v])
                    .collect();
                self.path.push(site);
                if self.dfs(&nt, &nc, &next, &rest) {
                    return true;
                }
                self.path.pop();
            }
        }
        self.failed.insert(key);
        false
    }
}
