//! Refinement and lifting of a one-shot scheme to `M` messages.
//!
//! Every entry `k` of the symbolic matrix at column `p` hosts one query slot
//! per `k`-subset `V` of the messages. For a desired message `m` a slot is
//!
//! * bare when `V = {m}`: the informative vector alone;
//! * pure when `m` is not in `V`: noise of the instance `(g, V)` where `g`
//!   is the group using the entry as a noise slot;
//! * mixed otherwise: informative vector plus the noise of `(g, V \ {m})`
//!   where `g` is the group using the entry as a mixed slot.
//!
//! A group of level `v` has `r` pure entries of value `v - 1` and `N - r`
//! mixed entries of value `v` on distinct columns, and follows a rotation
//! of the one-shot scheme. Its instances run the one-shot scheme with
//! noise supported on the blocks of `U`, one instance per
//! `(v - 1)`-subset `U` of the messages other than `m`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{param, PirError, Result};
use crate::field::FieldVector;
use crate::linalg::combinations;
use crate::mds::GeneratorSpec;
use crate::oneshot::OneShotScheme;
use crate::protocol::{
    DecodingState, FamilyShape, InformativeSlot, QueryBatch, QueryProtocol, QueryRandomness, RandomnessLayout,
};
use crate::rates::lifted_rate;
use crate::symbolic::{build_symbolic, lift_chains, lift_once, Position, SymbolicMatrix};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoiseGroup {
    pub level: usize,
    pub pure_slots: Vec<Position>,
    pub mixed_slots: Vec<Position>,
    /// Offset of the rotated one-shot scheme this group follows.
    pub rotation: usize,
}

/// A query slot, independent of the desired message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slot {
    pub position: Position,
    /// Message indices summed in this query, ascending.
    pub subset: Vec<usize>,
}

/// Role of a slot for a given desired message.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotRole {
    Bare,
    Pure { group: usize },
    Mixed { group: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodingPlan {
    symbolic: SymbolicMatrix,
    servers: usize,
    codimension: usize,
    messages: usize,
    groups: Vec<NoiseGroup>,
    /// Per cell: group using the entry as a pure slot, and as a mixed slot.
    pure_group: BTreeMap<Position, usize>,
    mixed_group: BTreeMap<Position, usize>,
    /// Canonical per-server order: row-major entries, then lexicographic subsets.
    server_slots: Vec<Vec<Slot>>,
}

fn shift_group(g: &NoiseGroup, t: usize, rows: usize, n: usize) -> NoiseGroup {
    let mv = |p: &Position| Position::new(p.row + t * rows, (p.col + n - t % n) % n);
    NoiseGroup {
        level: g.level,
        pure_slots: g.pure_slots.iter().map(mv).collect(),
        mixed_slots: g.mixed_slots.iter().map(mv).collect(),
        rotation: (g.rotation + t) % n,
    }
}

/// Groups of `S_M`, built alongside the lift recursion.
fn plan_groups(n: usize, r: usize, m: usize) -> Result<(SymbolicMatrix, Vec<NoiseGroup>)> {
    let mut s = build_symbolic(n, r, 2)?;
    let mut groups = vec![NoiseGroup {
        level: 2,
        pure_slots: (0..r).map(|j| Position::new(0, j)).collect(),
        mixed_slots: (r..n).map(|j| Position::new(0, j)).collect(),
        rotation: 0,
    }];
    for level in 2..m {
        let rows = s.rows();
        let mut next: Vec<NoiseGroup> = Vec::with_capacity(groups.len() * r);
        for t in 0..r {
            next.extend(groups.iter().map(|g| shift_group(g, t, rows, n)));
        }
        let lifted = lift_once(&s, r, n, level)?;
        for (i, chain) in lift_chains(&s, r, level).into_iter().enumerate() {
            let a_row = r * rows + i;
            let mixed = (0..n)
                .map(|j| Position::new(a_row, j))
                .filter(|&p| lifted.get(p) as usize == level + 1)
                .collect();
            let c = chain[0].col;
            next.push(NoiseGroup { level: level + 1, pure_slots: chain, mixed_slots: mixed, rotation: (r + n - 1 - c) % n });
        }
        s = lifted;
        groups = next;
    }
    Ok((s, groups))
}

impl DecodingPlan {
    pub fn new(n: usize, r: usize, m: usize) -> Result<Self> {
        let (symbolic, groups) = plan_groups(n, r, m)?;
        let mut pure_group = BTreeMap::new();
        let mut mixed_group = BTreeMap::new();
        for (gi, g) in groups.iter().enumerate() {
            let mut cols: Vec<usize> = g.pure_slots.iter().chain(&g.mixed_slots).map(|p| p.col).collect();
            cols.sort_unstable();
            cols.dedup();
            if cols.len() != n || g.pure_slots.len() != r {
                return Err(PirError::Internal(format!("group {gi} does not cover {n} distinct columns")));
            }
            for &p in &g.pure_slots {
                if symbolic.get(p) as usize != g.level - 1 || pure_group.insert(p, gi).is_some() {
                    return Err(PirError::Internal(format!("pure slot {p:?} of group {gi} is inconsistent")));
                }
            }
            for &p in &g.mixed_slots {
                if symbolic.get(p) as usize != g.level || mixed_group.insert(p, gi).is_some() {
                    return Err(PirError::Internal(format!("mixed slot {p:?} of group {gi} is inconsistent")));
                }
            }
        }
        let mut server_slots = vec![Vec::new(); n];
        for (col, slots) in server_slots.iter_mut().enumerate() {
            for p in symbolic.column_entries(col) {
                let k = symbolic.get(p) as usize;
                if k < m && !pure_group.contains_key(&p) || k >= 2 && !mixed_group.contains_key(&p) {
                    return Err(PirError::Internal(format!("entry {p:?} is not covered by a group")));
                }
                for subset in combinations(m, k) {
                    slots.push(Slot { position: p, subset });
                }
            }
        }
        Ok(DecodingPlan { symbolic, servers: n, codimension: r, messages: m, groups, pure_group, mixed_group, server_slots })
    }

    pub fn symbolic(&self) -> &SymbolicMatrix {
        &self.symbolic
    }

    pub fn groups(&self) -> &[NoiseGroup] {
        &self.groups
    }

    pub fn servers(&self) -> usize {
        self.servers
    }

    pub fn codimension(&self) -> usize {
        self.codimension
    }

    pub fn messages(&self) -> usize {
        self.messages
    }

    pub fn server_slots(&self, server: usize) -> &[Slot] {
        &self.server_slots[server]
    }

    pub fn per_server_counts(&self) -> Vec<usize> {
        self.server_slots.iter().map(|s| s.len()).collect()
    }

    pub fn total_slots(&self) -> usize {
        self.server_slots.iter().map(|s| s.len()).sum()
    }

    /// Slots whose subset contains a given message; the same for every message.
    pub fn informative_slots(&self) -> usize {
        self.server_slots.iter().flatten().filter(|s| s.subset.contains(&0)).count()
    }

    pub fn role(&self, slot: &Slot, desired: usize) -> SlotRole {
        if !slot.subset.contains(&desired) {
            SlotRole::Pure { group: self.pure_group[&slot.position] }
        } else if slot.subset.len() == 1 {
            SlotRole::Bare
        } else {
            SlotRole::Mixed { group: self.mixed_group[&slot.position] }
        }
    }
}

/// `informative / total` slots, checked against the closed form.
pub fn measured_rate(plan: &DecodingPlan) -> Result<BigRational> {
    let measured = BigRational::new(BigInt::from(plan.informative_slots()), BigInt::from(plan.total_slots()));
    let closed = lifted_rate(plan.servers, plan.codimension, plan.messages);
    if measured != closed {
        return Err(PirError::Internal(format!("measured rate {measured} differs from closed form {closed}")));
    }
    Ok(measured)
}

/// The plan for `S_M` driven by `scheme`; every group's rotation must be
/// decodable.
pub fn build_plan(s: &SymbolicMatrix, scheme: &OneShotScheme) -> Result<DecodingPlan> {
    let n = scheme.servers();
    let r = scheme.codimension();
    let Some((sn, sr, m)) = s.provenance() else {
        return param("symbolic matrix was not built by the lift recursion");
    };
    if (sn, sr) != (n, r) {
        return param(format!("symbolic matrix is for (N, r) = ({sn}, {sr}), scheme has ({n}, {r})"));
    }
    check_liftable(scheme)?;
    let plan = DecodingPlan::new(n, r, m)?;
    if plan.symbolic() != s {
        return Err(PirError::Internal("plan recursion diverged from the symbolic matrix".into()));
    }
    Ok(plan)
}

/// Two-message plan: the refinement of `scheme`.
pub fn refine(scheme: &OneShotScheme) -> Result<DecodingPlan> {
    let n = scheme.servers();
    let k = scheme.generator().dimension();
    if n % k != 0 {
        return Err(PirError::InfeasibleParameters(format!(
            "refinement needs K | N (K={k}, N={n}); repeat the scheme {} times to reach a multiple of K",
            k / gcd(n, k)
        )));
    }
    build_plan(&build_symbolic(n, scheme.codimension(), 2)?, scheme)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn check_liftable(scheme: &OneShotScheme) -> Result<Vec<OneShotScheme>> {
    let r = scheme.codimension();
    if scheme.noise_positions() != (0..r).collect::<Vec<_>>().as_slice() {
        return Err(PirError::NotLiftable(format!(
            "noise positions must be the first r = {r} servers, got {:?}",
            scheme.noise_positions().iter().map(|p| p + 1).collect::<Vec<_>>()
        )));
    }
    (0..scheme.servers())
        .map(|t| scheme.rotate(t).map_err(|e| PirError::NotLiftable(format!("{e}"))))
        .collect()
}

/// Refined and lifted scheme for `M` messages of length `L = N^{M-1}`.
#[derive(Debug, Clone)]
pub struct LiftedScheme {
    plan: DecodingPlan,
    rotations: Vec<OneShotScheme>,
    message_len: usize,
}

impl LiftedScheme {
    pub fn new(scheme: &OneShotScheme, messages: usize) -> Result<Self> {
        let n = scheme.servers();
        let k = scheme.generator().dimension();
        if messages < 2 {
            return param("lifting needs at least two messages");
        }
        let len = (n as u128)
            .checked_pow(messages as u32 - 1)
            .filter(|&l| l <= 1 << 20)
            .ok_or_else(|| PirError::InfeasibleParameters(format!("L = {n}^{} is too large", messages - 1)))?
            as usize;
        if len % k != 0 {
            return Err(PirError::InfeasibleParameters(format!(
                "K={k} does not divide L = N^(M-1) = {len}; repeat the scheme to reach a multiple of K"
            )));
        }
        let rotations = check_liftable(scheme)?;
        let plan = build_plan(&build_symbolic(n, scheme.codimension(), messages)?, scheme)?;
        Ok(LiftedScheme { plan, rotations, message_len: len })
    }

    pub fn plan(&self) -> &DecodingPlan {
        &self.plan
    }

    pub fn scheme(&self) -> &OneShotScheme {
        &self.rotations[0]
    }

    fn share_len(&self) -> usize {
        self.message_len / self.generator().dimension()
    }

    /// Instances `(group, U)` for `desired`, in canonical order.
    fn instances(&self, desired: usize) -> BTreeMap<(usize, Vec<usize>), usize> {
        let others: Vec<usize> = (0..self.plan.messages).filter(|&j| j != desired).collect();
        let mut out = BTreeMap::new();
        for (gi, g) in self.plan.groups.iter().enumerate() {
            for pick in combinations(others.len(), g.level - 1) {
                let u: Vec<usize> = pick.iter().map(|&i| others[i]).collect();
                let id = out.len();
                out.insert((gi, u), id);
            }
        }
        out
    }

    /// For each message block other than `desired`: the `(instance, t)`
    /// free vectors it hosts, in order.
    fn families(&self, desired: usize) -> (BTreeMap<(usize, Vec<usize>), usize>, Vec<Vec<(usize, usize)>>) {
        let instances = self.instances(desired);
        let f = self.scheme().free_vectors();
        let mut by_id = vec![Vec::new(); instances.len()];
        for ((_, u), &id) in &instances {
            by_id[id] = u.clone();
        }
        let mut families = vec![Vec::new(); self.plan.messages];
        for (id, u) in by_id.iter().enumerate() {
            for &j in u.iter() {
                for t in 0..f {
                    families[j].push((id, t));
                }
            }
        }
        (instances, families)
    }
}

impl QueryProtocol for LiftedScheme {
    fn generator(&self) -> &GeneratorSpec {
        self.scheme().generator()
    }

    fn message_count(&self) -> usize {
        self.plan.messages
    }

    fn message_len(&self) -> usize {
        self.message_len
    }

    fn layout(&self, desired: usize) -> Result<RandomnessLayout> {
        if desired >= self.plan.messages {
            return param(format!("desired message {desired} out of range 0..{}", self.plan.messages));
        }
        let w = self.share_len();
        let k = self.generator().dimension();
        let mut informative_columns = Vec::new();
        for (col, slots) in self.plan.server_slots.iter().enumerate() {
            informative_columns.extend(slots.iter().filter(|s| s.subset.contains(&desired)).map(|_| col));
        }
        let (_, families) = self.families(desired);
        let noise = families
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != desired)
            .map(|(_, fam)| FamilyShape { count: fam.len(), dim: w, independent: k == 1 && fam.len() <= w })
            .collect();
        Ok(RandomnessLayout { informative_columns, informative_dim: w, noise })
    }

    fn assemble(&self, desired: usize, r: &QueryRandomness) -> Result<(QueryBatch, DecodingState)> {
        let layout = self.layout(desired)?;
        if r.informative.len() != layout.informative_columns.len()
            || r.noise.len() != layout.noise.len()
            || r.noise.iter().zip(&layout.noise).any(|(fam, s)| fam.len() != s.count)
        {
            return param("randomness does not match the scheme layout");
        }
        let m = self.modulus();
        let n = self.servers();
        let w = self.share_len();
        let messages = self.plan.messages;
        let (instances, families) = self.families(desired);

        // free[id][t][j]: block-j part of free vector t of instance id.
        let f = self.scheme().free_vectors();
        let mut free: Vec<Vec<Vec<Option<&Vec<u32>>>>> = vec![vec![vec![None; messages]; f]; instances.len()];
        let mut fam_idx = 0;
        for (j, fam) in families.iter().enumerate() {
            if j == desired {
                continue;
            }
            for (pos, &(id, t)) in fam.iter().enumerate() {
                free[id][t][j] = Some(&r.noise[fam_idx][pos]);
            }
            fam_idx += 1;
        }

        let noise_into = |v: &mut [u32], id: usize, server: usize, rot: &OneShotScheme| {
            for t in 0..f {
                let c = rot.noise_code().get(server, t);
                if c == 0 {
                    continue;
                }
                for (j, part) in free[id][t].iter().enumerate() {
                    if let Some(part) = part {
                        for (x, &y) in v[j * w..(j + 1) * w].iter_mut().zip(part.iter()) {
                            *x = m.add(*x, m.mul(c, y));
                        }
                    }
                }
            }
        };

        // Where each instance's pure slots sit: (instance, server) -> index.
        let mut pure_index = BTreeMap::new();
        for (col, slots) in self.plan.server_slots.iter().enumerate() {
            for (idx, slot) in slots.iter().enumerate() {
                if let SlotRole::Pure { group } = self.plan.role(slot, desired) {
                    pure_index.insert((instances[&(group, slot.subset.clone())], col), idx);
                }
            }
        }

        let mut queries = Vec::with_capacity(n);
        let mut state_slots = Vec::new();
        let mut next = r.informative.iter();
        for (col, slots) in self.plan.server_slots.iter().enumerate() {
            let mut out = Vec::with_capacity(slots.len());
            for (idx, slot) in slots.iter().enumerate() {
                let mut v = vec![0u32; messages * w];
                match self.plan.role(slot, desired) {
                    SlotRole::Pure { group } => {
                        let id = instances[&(group, slot.subset.clone())];
                        noise_into(&mut v, id, col, &self.rotations[self.plan.groups[group].rotation]);
                    }
                    role => {
                        let a = next.next().ok_or_else(|| PirError::Internal("too few informative vectors".into()))?;
                        v[desired * w..(desired + 1) * w].copy_from_slice(a);
                        let mut cancel = Vec::new();
                        if let SlotRole::Mixed { group } = role {
                            let u: Vec<usize> = slot.subset.iter().copied().filter(|&j| j != desired).collect();
                            let id = instances[&(group, u)];
                            let rot = &self.rotations[self.plan.groups[group].rotation];
                            noise_into(&mut v, id, col, rot);
                            let eq = rot.equation_for(col).ok_or(PirError::NotDecodable { server: col + 1 })?;
                            for (&src, &c) in eq.sources.iter().zip(&eq.coefficients) {
                                let at = pure_index.get(&(id, src)).ok_or_else(|| {
                                    PirError::Internal(format!("instance {id} has no pure slot at server {}", src + 1))
                                })?;
                                cancel.push((src, *at, c));
                            }
                        }
                        state_slots.push(InformativeSlot { server: col, index: idx, vector: a.clone(), cancel });
                    }
                }
                out.push(FieldVector::new(m, v));
            }
            queries.push(out);
        }
        let state = DecodingState { desired, message_len: self.message_len, slots: state_slots };
        Ok((QueryBatch::new(queries), state))
    }
}
