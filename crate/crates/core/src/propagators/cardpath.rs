//! Cardpath without repeated variables, by a two-pass count-set DP.
//!
//! A DP state after position `p` is the tuple of the last `max(k-1, 1)`
//! values, which is all the next window needs. The forward pass records, per
//! state, the set of satisfied-window counts over the prefix; the backward
//! pass records the counts still to come over the suffix. Sets are kept
//! whole (not as intervals) because `D(N)` may have holes.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::csp::{Checker, ConstraintSpec, Instance, Value};

use super::{domain_of, wrong_kind, PropagationOutcome, PropagatorError, DEFAULT_WINDOW_LIMIT};

const NAME: &str = "cardpath-dp";

/// Achievable satisfied-window totals, per sequence position and value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CountLattice {
    pub windows: usize,
    pub per_position_value: Vec<BTreeMap<Value, BTreeSet<usize>>>,
    pub totals: BTreeSet<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Counts(Vec<u64>);

impl Counts {
    fn empty(bits: usize) -> Self {
        Counts(vec![0; bits.div_ceil(64)])
    }

    fn insert(&mut self, c: usize) {
        self.0[c / 64] |= 1 << (c % 64);
    }

    /// `self |= other + by`, with `by` in {0, 1}.
    fn absorb(&mut self, other: &Counts, by: usize) {
        let mut carry = 0;
        for (w, &o) in self.0.iter_mut().zip(&other.0) {
            if by == 0 {
                *w |= o;
            } else {
                *w |= (o << 1) | carry;
                carry = o >> 63;
            }
        }
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &w)| {
            (0..64).filter(move |b| w & (1 << b) != 0).map(move |b| i * 64 + b)
        })
    }

    /// Minkowski sum, truncated to the capacity.
    fn plus(&self, other: &Counts) -> Counts {
        let mut out = Counts::empty(self.0.len() * 64);
        let bits = self.0.len() * 64;
        for a in self.iter() {
            for b in other.iter() {
                if a + b < bits {
                    out.insert(a + b);
                }
            }
        }
        out
    }
}

struct Dp {
    doms: Vec<Vec<Value>>,
    k: usize,
    q: usize,
    template: Checker,
}

impl Dp {
    fn step(&self, key: &[Value], v: Value) -> (Vec<Value>, usize) {
        let mut full = key.to_vec();
        full.push(v);
        let inc = if full.len() >= self.k {
            usize::from(self.template.holds(&full[full.len() - self.k..]))
        } else {
            0
        };
        let keep = full.len().saturating_sub(self.q);
        (full.split_off(keep), inc)
    }

    fn lattice(&self) -> CountLattice {
        let len = self.doms.len();
        let windows = len + 1 - self.k;
        let bits = windows + 1;

        let mut fwd: Vec<HashMap<Vec<Value>, Counts>> = Vec::with_capacity(len);
        let mut start = HashMap::new();
        start.insert(Vec::new(), {
            let mut c = Counts::empty(bits);
            c.insert(0);
            c
        });
        for p in 0..len {
            let prev = if p == 0 { &start } else { &fwd[p - 1] };
            let mut layer: HashMap<Vec<Value>, Counts> = HashMap::new();
            for (key, c) in prev {
                for &v in &self.doms[p] {
                    let (nk, inc) = self.step(key, v);
                    layer.entry(nk).or_insert_with(|| Counts::empty(bits)).absorb(c, inc);
                }
            }
            fwd.push(layer);
        }

        let mut bwd: Vec<HashMap<Vec<Value>, Counts>> = vec![HashMap::new(); len];
        for key in fwd[len - 1].keys() {
            let mut c = Counts::empty(bits);
            c.insert(0);
            bwd[len - 1].insert(key.clone(), c);
        }
        for p in (0..len - 1).rev() {
            let mut layer = HashMap::with_capacity(fwd[p].len());
            for key in fwd[p].keys() {
                let mut c = Counts::empty(bits);
                for &v in &self.doms[p + 1] {
                    let (nk, inc) = self.step(key, v);
                    c.absorb(&bwd[p + 1][&nk], inc);
                }
                layer.insert(key.clone(), c);
            }
            bwd[p] = layer;
        }

        let mut per_position_value = vec![BTreeMap::new(); len];
        for p in 0..len {
            for (key, f) in &fwd[p] {
                let v = *key.last().expect("state holds the current value");
                let entry: &mut BTreeSet<usize> = per_position_value[p].entry(v).or_default();
                entry.extend(f.plus(&bwd[p][key]).iter());
            }
        }
        let totals = fwd[len - 1].values().flat_map(Counts::iter).collect();
        CountLattice {
            windows,
            per_position_value,
            totals,
        }
    }
}

fn prepare(inst: &Instance, limit: u64) -> Result<Option<(Dp, BTreeSet<Value>)>, PropagatorError> {
    let ConstraintSpec::Cardpath { scope, template } = inst.constraint() else {
        return Err(wrong_kind(NAME, "Cardpath", inst));
    };
    if inst.constraint().has_repeats() {
        return Err(PropagatorError::Unsupported {
            propagator: NAME,
            reason: "repeated variable in the sequence or N inside the sequence".into(),
        });
    }
    let n_dom = domain_of(inst, &scope[0])?;
    let doms: Vec<Vec<Value>> = scope[1..]
        .iter()
        .map(|v| domain_of(inst, v).map(|d| d.into_iter().collect()))
        .collect::<Result<_, _>>()?;
    let k = template.scope().len();
    for w in doms.windows(k) {
        let tuples = w
            .iter()
            .try_fold(1u64, |acc, d| acc.checked_mul(d.len() as u64))
            .unwrap_or(u64::MAX);
        if tuples > limit {
            return Err(PropagatorError::ArityTooLarge { tuples, limit });
        }
    }
    if n_dom.is_empty() || doms.iter().any(Vec::is_empty) {
        return Ok(None);
    }
    let dp = Dp {
        doms,
        k,
        q: (k - 1).max(1),
        template: Checker::new(template)?,
    };
    Ok(Some((dp, n_dom)))
}

/// The count lattice, or `None` when some domain is already empty.
pub fn cardpath_count_lattice(inst: &Instance) -> Result<Option<CountLattice>, PropagatorError> {
    Ok(prepare(inst, DEFAULT_WINDOW_LIMIT)?.map(|(dp, _)| dp.lattice()))
}

pub fn cardpath_dp_gac(inst: &Instance) -> Result<PropagationOutcome, PropagatorError> {
    cardpath_dp_gac_with_limit(inst, DEFAULT_WINDOW_LIMIT)
}

/// As [`cardpath_dp_gac`], refusing windows that range over more than
/// `limit` tuples.
pub fn cardpath_dp_gac_with_limit(inst: &Instance, limit: u64) -> Result<PropagationOutcome, PropagatorError> {
    let vars = inst.constraint().distinct_scope();
    let Some((dp, n_dom)) = prepare(inst, limit)? else {
        return Ok(PropagationOutcome::wiped(inst, &vars));
    };
    let lattice = dp.lattice();
    let fits = |c: &usize| i64::try_from(*c).is_ok_and(|c| n_dom.contains(&c));
    let mut out = vec![lattice
        .totals
        .iter()
        .filter(|c| fits(c))
        .map(|&c| c as Value)
        .collect::<BTreeSet<_>>()];
    for per_value in &lattice.per_position_value {
        out.push(
            per_value
                .iter()
                .filter(|(_, cs)| cs.iter().any(fits))
                .map(|(&v, _)| v)
                .collect(),
        );
    }
    Ok(PropagationOutcome::build(inst, &vars, out, true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::VarId;

    fn not_equal() -> ConstraintSpec {
        let tuples = [0, 1, 2]
            .iter()
            .flat_map(|&a| [0, 1, 2].iter().filter(move |&&b| b != a).map(move |&b| vec![a, b]))
            .collect();
        ConstraintSpec::Table {
            scope: vec!["a".into(), "b".into()],
            tuples,
        }
    }

    fn chain(n: &[Value], xs: &[&[Value]]) -> Instance {
        let mut names = vec![VarId::from("N")];
        names.extend((1..=xs.len()).map(|i| VarId::new(format!("X{i}"))));
        let doms = std::iter::once(n.to_vec()).chain(xs.iter().map(|d| d.to_vec()));
        Instance::from_scope(
            ConstraintSpec::Cardpath {
                scope: names.clone(),
                template: Box::new(not_equal()),
            },
            names.into_iter().zip(doms),
        )
        .unwrap()
    }

    #[test]
    fn free_chain_keeps_everything() {
        let out = cardpath_dp_gac(&chain(&[0, 1, 2], &[&[0, 1], &[0, 1], &[0, 1]])).unwrap();
        assert!(out.removed.is_empty());
    }

    #[test]
    fn constant_chain_forces_zero() {
        let out = cardpath_dp_gac(&chain(&[0, 1, 2], &[&[0], &[0], &[0]])).unwrap();
        assert_eq!(out.domains.get(&"N".into()).unwrap(), &BTreeSet::from([0]));
    }

    #[test]
    fn two_windows_force_middle_value() {
        let out = cardpath_dp_gac(&chain(&[2], &[&[0], &[0, 1], &[0]])).unwrap();
        assert_eq!(out.domains.get(&"X2".into()).unwrap(), &BTreeSet::from([1]));
    }

    #[test]
    fn repeats_are_unsupported() {
        let names: Vec<VarId> = ["N", "X", "X"].into_iter().map(VarId::from).collect();
        let inst = Instance::from_scope(
            ConstraintSpec::Cardpath {
                scope: names,
                template: Box::new(not_equal()),
            },
            [("N".into(), vec![0, 1]), ("X".into(), vec![0, 1])],
        )
        .unwrap();
        assert!(matches!(cardpath_dp_gac(&inst), Err(PropagatorError::Unsupported { .. })));
    }

    #[test]
    fn window_limit_is_enforced() {
        let inst = chain(&[0], &[&[0, 1, 2], &[0, 1, 2]]);
        assert_eq!(
            cardpath_dp_gac_with_limit(&inst, 8),
            Err(PropagatorError::ArityTooLarge { tuples: 9, limit: 8 })
        );
    }
}
