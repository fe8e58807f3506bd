//! Alternatives, type spaces, grids and profiles.
//!
//! A type profile is an `n × m` matrix: row `i` is agent `i`'s valuation of
//! every alternative, column `a` is the utility vector of alternative `a`.
//!
//! Grids are interior and uniform: agent `i`'s coordinates are
//! `lower + k·h` for `k = 1..=r` with `h = (upper - lower) / (r + 1)`. Types
//! are the `r^m` points of the Cartesian power in lexicographic order
//! (alternative 0 most significant) and profiles are ordered the same way with
//! agent 0 most significant.

use alloc::borrow::ToOwned;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Deref;

use serde::Serialize;

use crate::error::{Error, Result};

/// Index of an alternative in its [`AlternativeSet`].
pub type Alternative = usize;

/// One agent's valuation of every alternative.
pub type TypeVector = Vec<f64>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlternativeSet {
    labels: Vec<String>,
}

impl AlternativeSet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() < 2 {
            return Err(Error::invalid("at least two alternatives are required"));
        }
        for (k, l) in labels.iter().enumerate() {
            if labels[..k].contains(l) {
                return Err(Error::invalid(alloc::format!("duplicate alternative label {l:?}")));
            }
        }
        Ok(AlternativeSet { labels })
    }

    /// `a`, `b`, `c`, ... for up to 26 alternatives, `x27`, ... beyond.
    pub fn lettered(m: usize) -> Result<Self> {
        Self::new((0..m).map(|k| {
            if k < 26 {
                String::from(char::from(b'a' + k as u8))
            } else {
                alloc::format!("x{}", k + 1)
            }
        }))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, a: Alternative) -> &str {
        &self.labels[a]
    }

    pub fn index_of(&self, label: &str) -> Option<Alternative> {
        self.labels.iter().position(|l| l == label)
    }

    /// The ordering machinery needs a third column to host fills.
    pub fn require_three(&self) -> Result<()> {
        if self.len() < 3 {
            return Err(Error::invalid("operation needs at least three alternatives"));
        }
        Ok(())
    }
}

/// Open interval `(lower, upper)`; either end may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if lower.is_nan() || upper.is_nan() || lower >= upper {
            return Err(Error::invalid(alloc::format!(
                "interval needs lower < upper, got ({lower}, {upper})"
            )));
        }
        Ok(Interval { lower, upper })
    }

    pub fn is_finite(&self) -> bool {
        self.lower.is_finite() && self.upper.is_finite()
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower < x && x < self.upper
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_finite() && self.lower == -self.upper
    }
}

/// Product of per-agent open intervals; every alternative of agent `i` takes
/// values in `intervals[i]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TypeSpace {
    intervals: Vec<Interval>,
}

impl TypeSpace {
    pub fn new(intervals: Vec<Interval>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::invalid("at least one agent is required"));
        }
        Ok(TypeSpace { intervals })
    }

    pub fn uniform(agents: usize, interval: Interval) -> Result<Self> {
        Self::new(vec![interval; agents])
    }

    pub fn agents(&self) -> usize {
        self.intervals.len()
    }

    pub fn interval(&self, agent: usize) -> Interval {
        self.intervals[agent]
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    /// Whether the utility vector `x` lies in the product of intervals.
    pub fn contains_vector(&self, x: &[f64]) -> bool {
        x.len() == self.agents() && x.iter().zip(&self.intervals).all(|(v, iv)| iv.contains(*v))
    }

    pub fn contains_profile(&self, t: &TypeProfile) -> bool {
        t.agents() == self.agents()
            && (0..t.agents()).all(|i| t.row(i).iter().all(|v| self.intervals[i].contains(*v)))
    }

    pub fn min_finite_width(&self) -> Option<f64> {
        self.intervals
            .iter()
            .filter(|iv| iv.is_finite())
            .map(Interval::width)
            .reduce(f64::min)
    }

    pub fn is_symmetric(&self) -> bool {
        self.intervals.iter().all(Interval::is_symmetric)
    }
}

/// A column of a type profile: one value per agent.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UtilityVector(pub Vec<f64>);

impl UtilityVector {
    pub fn new(values: Vec<f64>) -> Self {
        UtilityVector(values)
    }

    pub fn splat(agents: usize, v: f64) -> Self {
        UtilityVector(vec![v; agents])
    }

    /// Componentwise `self - other > margin`.
    pub fn dominates(&self, other: &[f64], margin: f64) -> bool {
        self.0.len() == other.len() && self.0.iter().zip(other).all(|(x, y)| x - y > margin)
    }

    pub fn add(&self, other: &[f64]) -> UtilityVector {
        UtilityVector(self.0.iter().zip(other).map(|(x, y)| x + y).collect())
    }

    pub fn sub(&self, other: &[f64]) -> UtilityVector {
        UtilityVector(self.0.iter().zip(other).map(|(x, y)| x - y).collect())
    }

    pub fn dot(&self, other: &[f64]) -> f64 {
        self.0.iter().zip(other).map(|(x, y)| x * y).sum()
    }
}

impl Deref for UtilityVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for UtilityVector {
    fn from(v: Vec<f64>) -> Self {
        UtilityVector(v)
    }
}

/// Valuation matrix with agents as rows and alternatives as columns.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TypeProfile {
    agents: usize,
    alternatives: usize,
    values: Vec<f64>,
}

impl TypeProfile {
    pub fn new(rows: Vec<TypeVector>) -> Result<Self> {
        let agents = rows.len();
        if agents == 0 {
            return Err(Error::invalid("a profile needs at least one agent"));
        }
        let alternatives = rows[0].len();
        if rows.iter().any(|r| r.len() != alternatives) {
            return Err(Error::Dimension("profile rows differ in length".to_owned()));
        }
        Ok(TypeProfile {
            agents,
            alternatives,
            values: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_columns(columns: &[UtilityVector]) -> Result<Self> {
        let alternatives = columns.len();
        if alternatives == 0 || columns[0].is_empty() {
            return Err(Error::invalid("a profile needs at least one agent and one column"));
        }
        let agents = columns[0].len();
        if columns.iter().any(|c| c.len() != agents) {
            return Err(Error::Dimension("columns differ in length".to_owned()));
        }
        let mut t = TypeProfile::zeros(agents, alternatives);
        for (a, col) in columns.iter().enumerate() {
            t.set_column(a, col);
        }
        Ok(t)
    }

    pub fn zeros(agents: usize, alternatives: usize) -> Self {
        TypeProfile {
            agents,
            alternatives,
            values: vec![0.0; agents * alternatives],
        }
    }

    pub fn agents(&self) -> usize {
        self.agents
    }

    pub fn alternatives(&self) -> usize {
        self.alternatives
    }

    #[inline]
    pub fn get(&self, agent: usize, a: Alternative) -> f64 {
        self.values[agent * self.alternatives + a]
    }

    #[inline]
    pub fn set(&mut self, agent: usize, a: Alternative, v: f64) {
        self.values[agent * self.alternatives + a] = v;
    }

    pub fn row(&self, agent: usize) -> &[f64] {
        &self.values[agent * self.alternatives..(agent + 1) * self.alternatives]
    }

    pub fn row_mut(&mut self, agent: usize) -> &mut [f64] {
        &mut self.values[agent * self.alternatives..(agent + 1) * self.alternatives]
    }

    pub fn column(&self, a: Alternative) -> UtilityVector {
        UtilityVector((0..self.agents).map(|i| self.get(i, a)).collect())
    }

    pub fn set_column(&mut self, a: Alternative, col: &[f64]) {
        for (i, v) in col.iter().enumerate() {
            self.set(i, a, *v);
        }
    }

    /// Adds `v` to every entry of column `a`.
    pub fn boost_column(&mut self, a: Alternative, v: f64) {
        for i in 0..self.agents {
            self.values[i * self.alternatives + a] += v;
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `t + 1_δ`: column `a` shifted by `delta[a]` for every agent.
    pub fn shifted(&self, delta: &[f64]) -> TypeProfile {
        let mut out = self.clone();
        for i in 0..self.agents {
            for (a, d) in delta.iter().enumerate() {
                out.values[i * self.alternatives + a] += d;
            }
        }
        out
    }

    /// Column `ρ(a)` of the result is column `a` of `self`.
    pub fn permute_alternatives(&self, rho: &Permutation) -> TypeProfile {
        let mut out = self.clone();
        for i in 0..self.agents {
            for a in 0..self.alternatives {
                out.set(i, rho.image(a), self.get(i, a));
            }
        }
        out
    }

    /// Row `σ(i)` of the result is row `i` of `self`.
    pub fn permute_agents(&self, sigma: &Permutation) -> TypeProfile {
        let mut out = self.clone();
        for i in 0..self.agents {
            let dst = sigma.image(i);
            out.row_mut(dst).copy_from_slice(self.row(i));
        }
        out
    }

    pub(crate) fn check_shape(&self, agents: usize, alternatives: usize) -> Result<()> {
        if self.agents != agents || self.alternatives != alternatives {
            return Err(Error::Dimension(alloc::format!(
                "expected a {agents}×{alternatives} profile, got {}×{}",
                self.agents,
                self.alternatives
            )));
        }
        Ok(())
    }
}

/// A bijection on `0..len`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &x in &images {
            if x >= images.len() || seen[x] {
                return Err(Error::invalid("permutation must be a bijection"));
            }
            seen[x] = true;
        }
        Ok(Permutation(images))
    }

    pub fn identity(len: usize) -> Self {
        Permutation((0..len).collect())
    }

    pub fn transposition(len: usize, a: usize, b: usize) -> Self {
        let mut p: Vec<usize> = (0..len).collect();
        p.swap(a, b);
        Permutation(p)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn image(&self, x: usize) -> usize {
        self.0[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (x, &y) in self.0.iter().enumerate() {
            inv[y] = x;
        }
        Permutation(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(x, &y)| x == y)
    }

    /// All `len!` permutations in lexicographic order.
    pub fn all(len: usize) -> Vec<Permutation> {
        let mut cur: Vec<usize> = (0..len).collect();
        let mut out = vec![Permutation(cur.clone())];
        // next lexicographic permutation
        loop {
            let Some(i) = (1..len).rev().find(|&i| cur[i - 1] < cur[i]) else {
                return out;
            };
            let j = (i..len).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
            cur.swap(i - 1, j);
            cur[i..].reverse();
            out.push(Permutation(cur.clone()));
        }
    }

    /// Every permutation when `len <= 4`, otherwise the transpositions,
    /// which generate the symmetric group.
    pub fn generating_set(len: usize) -> Vec<Permutation> {
        if len <= 4 {
            return Self::all(len).into_iter().filter(|p| !p.is_identity()).collect();
        }
        let mut out = Vec::new();
        for a in 0..len {
            for b in a + 1..len {
                out.push(Self::transposition(len, a, b));
            }
        }
        out
    }
}

/// Uniform interior grid over a finite [`TypeSpace`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TypeGrid {
    space: TypeSpace,
    alternatives: usize,
    resolution: Vec<usize>,
    steps: Vec<f64>,
    coords: Vec<Vec<f64>>,
    type_counts: Vec<usize>,
    /// Profile-index stride of each agent's type index.
    strides: Vec<usize>,
    count: usize,
}

impl TypeGrid {
    pub fn new(space: TypeSpace, resolution: Vec<usize>, alternatives: usize) -> Result<Self> {
        if resolution.len() != space.agents() {
            return Err(Error::Dimension(alloc::format!(
                "{} resolutions for {} agents",
                resolution.len(),
                space.agents()
            )));
        }
        if alternatives == 0 {
            return Err(Error::invalid("a grid needs at least one alternative"));
        }
        let mut steps = Vec::with_capacity(resolution.len());
        let mut coords = Vec::with_capacity(resolution.len());
        let mut type_counts = Vec::with_capacity(resolution.len());
        for (agent, (&r, iv)) in resolution.iter().zip(space.intervals()).enumerate() {
            if r == 0 {
                return Err(Error::invalid("grid resolution must be positive"));
            }
            if !iv.is_finite() {
                return Err(Error::InfiniteBound { agent });
            }
            let h = iv.width() / (r + 1) as f64;
            steps.push(h);
            coords.push((1..=r).map(|k| iv.lower + k as f64 * h).collect::<Vec<_>>());
            let count = r
                .checked_pow(alternatives as u32)
                .ok_or_else(|| Error::invalid("grid too large"))?;
            type_counts.push(count);
        }
        let mut strides = vec![1usize; type_counts.len()];
        for i in (0..type_counts.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1]
                .checked_mul(type_counts[i + 1])
                .ok_or_else(|| Error::invalid("grid too large"))?;
        }
        let count = strides[0]
            .checked_mul(type_counts[0])
            .ok_or_else(|| Error::invalid("grid too large"))?;
        Ok(TypeGrid {
            space,
            alternatives,
            resolution,
            steps,
            coords,
            type_counts,
            strides,
            count,
        })
    }

    /// Same interval and resolution for every agent.
    pub fn uniform(agents: usize, interval: Interval, resolution: usize, alternatives: usize) -> Result<Self> {
        Self::new(
            TypeSpace::uniform(agents, interval)?,
            vec![resolution; agents],
            alternatives,
        )
    }

    pub fn space(&self) -> &TypeSpace {
        &self.space
    }

    pub fn agents(&self) -> usize {
        self.space.agents()
    }

    pub fn alternatives(&self) -> usize {
        self.alternatives
    }

    pub fn resolution(&self, agent: usize) -> usize {
        self.resolution[agent]
    }

    pub fn resolutions(&self) -> &[usize] {
        &self.resolution
    }

    pub fn step(&self, agent: usize) -> f64 {
        self.steps[agent]
    }

    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    pub fn coordinates(&self, agent: usize) -> &[f64] {
        &self.coords[agent]
    }

    pub fn type_count(&self, agent: usize) -> usize {
        self.type_counts[agent]
    }

    pub fn profile_count(&self) -> usize {
        self.count
    }

    /// Whether every agent has the same interval and resolution.
    pub fn agents_identical(&self) -> bool {
        let iv = self.space.interval(0);
        let r = self.resolution[0];
        self.space.intervals().iter().all(|x| *x == iv) && self.resolution.iter().all(|&x| x == r)
    }

    /// Coordinate indices of type `k` of `agent`, alternative 0 first.
    pub fn type_digits(&self, agent: usize, mut k: usize, out: &mut [usize]) {
        let r = self.resolution[agent];
        for a in (0..self.alternatives).rev() {
            out[a] = k % r;
            k /= r;
        }
    }

    pub fn type_vector(&self, agent: usize, k: usize) -> TypeVector {
        let mut out = vec![0.0; self.alternatives];
        self.write_type(agent, k, &mut out);
        out
    }

    pub fn write_type(&self, agent: usize, mut k: usize, out: &mut [f64]) {
        let r = self.resolution[agent];
        let coords = &self.coords[agent];
        for a in (0..self.alternatives).rev() {
            out[a] = coords[k % r];
            k /= r;
        }
    }

    /// All `r^m` grid types of `agent` in lexicographic order.
    pub fn grid_points(&self, agent: usize) -> Vec<TypeVector> {
        (0..self.type_counts[agent]).map(|k| self.type_vector(agent, k)).collect()
    }

    #[inline]
    pub fn agent_type(&self, profile: usize, agent: usize) -> usize {
        (profile / self.strides[agent]) % self.type_counts[agent]
    }

    /// Profile index with `agent`'s type replaced by `k`.
    #[inline]
    pub fn with_agent_type(&self, profile: usize, agent: usize, k: usize) -> usize {
        let cur = self.agent_type(profile, agent);
        profile - cur * self.strides[agent] + k * self.strides[agent]
    }

    pub fn stride(&self, agent: usize) -> usize {
        self.strides[agent]
    }

    pub fn profile(&self, index: usize) -> TypeProfile {
        let mut t = TypeProfile::zeros(self.agents(), self.alternatives);
        self.write_profile(index, &mut t);
        t
    }

    pub fn write_profile(&self, index: usize, t: &mut TypeProfile) {
        for i in 0..self.agents() {
            let k = self.agent_type(index, i);
            self.write_type(i, k, t.row_mut(i));
        }
    }

    pub fn profiles(&self) -> Profiles<'_> {
        self.profiles_from(0)
    }

    /// Enumeration restarted at `start` (clamped to the profile count).
    pub fn profiles_from(&self, start: usize) -> Profiles<'_> {
        Profiles {
            grid: self,
            next: start.min(self.count),
        }
    }

    /// Index of `v` among the agent's coordinates, if it is a grid coordinate.
    pub fn coordinate_index(&self, agent: usize, v: f64) -> Option<usize> {
        let iv = self.space.interval(agent);
        let h = self.steps[agent];
        let pos = (v - iv.lower) / h;
        if pos.is_nan() || pos <= 0.5 {
            return None;
        }
        let k = (pos + 0.5) as usize;
        if k == 0 || k > self.resolution[agent] {
            return None;
        }
        if (self.coords[agent][k - 1] - v).abs() <= 1e-9 * h {
            Some(k - 1)
        } else {
            None
        }
    }

    pub fn type_index(&self, agent: usize, values: &[f64]) -> Option<usize> {
        if values.len() != self.alternatives {
            return None;
        }
        let r = self.resolution[agent];
        values
            .iter()
            .try_fold(0usize, |acc, &v| Some(acc * r + self.coordinate_index(agent, v)?))
    }

    pub fn profile_index(&self, t: &TypeProfile) -> Option<usize> {
        if t.agents() != self.agents() || t.alternatives() != self.alternatives {
            return None;
        }
        (0..self.agents()).try_fold(0usize, |acc, i| {
            Some(acc + self.type_index(i, t.row(i))? * self.strides[i])
        })
    }
}

/// Lexicographic profile enumeration; see [`TypeGrid::profiles_from`].
pub struct Profiles<'a> {
    grid: &'a TypeGrid,
    next: usize,
}

impl Iterator for Profiles<'_> {
    type Item = (usize, TypeProfile);

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.grid.count {
            return None;
        }
        let idx = self.next;
        self.next += 1;
        Some((idx, self.grid.profile(idx)))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.grid.count - self.next;
        (left, Some(left))
    }
}

impl ExactSizeIterator for Profiles<'_> {}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Interval {
        Interval::new(0.0, 1.0).unwrap()
    }

    #[test]
    fn single_coordinate_points() {
        let grid = TypeGrid::uniform(1, unit(), 5, 1).unwrap();
        let pts: Vec<f64> = grid.grid_points(0).into_iter().map(|v| v[0]).collect();
        let expected = [1.0 / 6.0, 2.0 / 6.0, 3.0 / 6.0, 4.0 / 6.0, 5.0 / 6.0];
        for (p, e) in pts.iter().zip(expected) {
            assert!((p - e).abs() < 1e-15);
        }
    }

    #[test]
    fn cube_points_lexicographic() {
        let grid = TypeGrid::uniform(1, unit(), 2, 3).unwrap();
        let pts = grid.grid_points(0);
        assert_eq!(pts.len(), 8);
        assert_eq!(pts[0], vec![1.0 / 3.0; 3]);
        assert_eq!(pts[1], vec![1.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0]);
        assert_eq!(pts[7], vec![2.0 / 3.0; 3]);
    }

    #[test]
    fn infinite_bound_rejected() {
        let iv = Interval::new(0.0, f64::INFINITY).unwrap();
        let err = TypeGrid::uniform(1, iv, 4, 2).unwrap_err();
        assert_eq!(err, Error::InfiniteBound { agent: 0 });
    }

    #[test]
    fn profile_counts_and_restart() {
        let grid = TypeGrid::uniform(2, unit(), 5, 3).unwrap();
        assert_eq!(grid.profile_count(), 15_625);
        assert_eq!(grid.profiles().len(), 15_625);
        assert_eq!(grid.profiles_from(15_624).count(), 1);

        let small = TypeGrid::uniform(1, unit(), 2, 2).unwrap();
        assert_eq!(small.profiles().count(), 4);
    }

    #[test]
    fn profile_index_roundtrip() {
        let grid = TypeGrid::new(
            TypeSpace::new(vec![unit(), Interval::new(-1.0, 3.0).unwrap()]).unwrap(),
            vec![3, 4],
            2,
        )
        .unwrap();
        for (idx, t) in grid.profiles() {
            assert_eq!(grid.profile_index(&t), Some(idx));
            for i in 0..2 {
                let k = grid.agent_type(idx, i);
                assert_eq!(grid.type_index(i, t.row(i)), Some(k));
                let moved = grid.with_agent_type(idx, i, 0);
                assert_eq!(grid.agent_type(moved, i), 0);
                assert_eq!(grid.agent_type(moved, 1 - i), grid.agent_type(idx, 1 - i));
            }
        }
        let mut off = grid.profile(0);
        off.set(0, 0, 0.3);
        assert_eq!(grid.profile_index(&off), None);
    }

    #[test]
    fn permutation_group_laws() {
        let t = TypeProfile::new(vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        let id = Permutation::identity(3);
        assert_eq!(t.permute_alternatives(&id), t);

        let swap = Permutation::transposition(3, 0, 1);
        let s = t.permute_alternatives(&swap);
        assert_eq!(s.column(0), t.column(1));
        assert_eq!(s.column(1), t.column(0));
        assert_eq!(s.column(2), t.column(2));

        for rho in Permutation::all(3) {
            assert_eq!(t.permute_alternatives(&rho).permute_alternatives(&rho.inverse()), t);
        }

        let agents = Permutation::transposition(2, 0, 1);
        let u = t.permute_agents(&agents);
        assert_eq!(u.row(0), t.row(1));
        assert_eq!(u.row(1), t.row(0));
        assert_eq!(u.permute_agents(&agents.inverse()), t);
    }

    #[test]
    fn all_permutations_counted() {
        assert_eq!(Permutation::all(1).len(), 1);
        assert_eq!(Permutation::all(3).len(), 6);
        assert_eq!(Permutation::all(4).len(), 24);
        assert_eq!(Permutation::generating_set(3).len(), 5);
        assert_eq!(Permutation::generating_set(5).len(), 10);
        assert!(Permutation::new(vec![0, 0]).is_err());
    }

    #[test]
    fn alternative_labels() {
        let alts = AlternativeSet::lettered(3).unwrap();
        assert_eq!(alts.labels(), ["a", "b", "c"]);
        assert_eq!(alts.index_of("c"), Some(2));
        assert!(AlternativeSet::new(["a", "a"]).is_err());
        assert!(AlternativeSet::new(["a"]).is_err());
        assert!(AlternativeSet::lettered(2).unwrap().require_three().is_err());
    }
}
