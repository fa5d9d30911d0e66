//! Pseudo-classes: partition the sorted target values into contiguous bands.
//!
//! Starts from equal-count blocks of the sorted values and then, pass after
//! pass in ascending order, moves the boundary value of a band to the adjacent
//! band whose mean is strictly closer. Equal target values always travel
//! together so that every band is an interval of the sorted values. A move is
//! only kept when it strictly lowers the total distance of the two bands
//! involved, so the total distance falls with every accepted move.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const MAX_PASSES: usize = 100_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassDistance {
    /// `|y - mean|`
    #[default]
    Absolute,
    /// `(y - mean)^2`
    Squared,
}

impl ClassDistance {
    #[inline]
    fn eval<T: Scalar>(self, y: T, mean: T) -> T {
        match self {
            ClassDistance::Absolute => (y - mean).abs(),
            ClassDistance::Squared => (y - mean) * (y - mean),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PseudoClassAssignment<T> {
    /// Class id of every input case, ids ordered by ascending class mean.
    pub class_of: Vec<usize>,
    pub class_means: Vec<T>,
    /// Total distance of every value to its class mean.
    pub err: T,
    pub k_effective: usize,
}

impl<T: Scalar> PseudoClassAssignment<T> {
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k_effective];
        for &c in &self.class_of {
            sizes[c] += 1;
        }
        sizes
    }

    pub fn members(&self, class: usize) -> Vec<usize> {
        self.class_of.iter().enumerate().filter(|(_, &c)| c == class).map(|(i, _)| i).collect()
    }
}

struct Group<T> {
    value: T,
    count: usize,
}

#[derive(Clone, Copy)]
struct Band<T> {
    lo: usize,
    hi: usize,
    sum: T,
    count: usize,
}

impl<T: Scalar> Band<T> {
    fn mean(&self) -> T {
        self.sum / T::from_usize_s(self.count)
    }
}

struct State<'a, T> {
    groups: &'a [Group<T>],
    bands: Vec<Band<T>>,
    distance: ClassDistance,
}

impl<T: Scalar> State<'_, T> {
    fn band_err(&self, lo: usize, hi: usize, sum: T, count: usize) -> T {
        if count == 0 {
            return T::zero();
        }
        let mean = sum / T::from_usize_s(count);
        self.groups[lo..hi]
            .iter()
            .fold(T::zero(), |acc, g| acc + self.distance.eval(g.value, mean) * T::from_usize_s(g.count))
    }

    fn err(&self) -> T {
        self.bands.iter().fold(T::zero(), |acc, b| acc + self.band_err(b.lo, b.hi, b.sum, b.count))
    }

    /// Try moving the lowest group of band `b` down (`up == false`) or its highest group up.
    fn try_move(&mut self, b: usize, up: bool) -> bool {
        let (from, to) = (b, if up { b + 1 } else { b - 1 });
        let (f, t) = (self.bands[from], self.bands[to]);
        let gi = if up { f.hi - 1 } else { f.lo };
        let g = &self.groups[gi];
        if self.distance.eval(g.value, t.mean()) >= self.distance.eval(g.value, f.mean()) {
            return false;
        }
        let gsum = g.value * T::from_usize_s(g.count);
        let before = self.band_err(f.lo, f.hi, f.sum, f.count) + self.band_err(t.lo, t.hi, t.sum, t.count);
        let (nf, nt) = if up {
            (
                Band { lo: f.lo, hi: f.hi - 1, sum: f.sum - gsum, count: f.count - g.count },
                Band { lo: t.lo - 1, hi: t.hi, sum: t.sum + gsum, count: t.count + g.count },
            )
        } else {
            (
                Band { lo: f.lo + 1, hi: f.hi, sum: f.sum - gsum, count: f.count - g.count },
                Band { lo: t.lo, hi: t.hi + 1, sum: t.sum + gsum, count: t.count + g.count },
            )
        };
        let after = self.band_err(nf.lo, nf.hi, nf.sum, nf.count) + self.band_err(nt.lo, nt.hi, nt.sum, nt.count);
        if !(after < before - T::improvement_tol(before)) {
            return false;
        }
        // Recompute the sums exactly rather than accumulating updates.
        self.bands[from] = self.refreshed(nf);
        self.bands[to] = self.refreshed(nt);
        if self.bands[from].count == 0 {
            self.bands.remove(from);
        }
        true
    }

    fn refreshed(&self, b: Band<T>) -> Band<T> {
        let sum = self.groups[b.lo..b.hi].iter().fold(T::zero(), |acc, g| acc + g.value * T::from_usize_s(g.count));
        Band { sum, ..b }
    }

    fn band_of_group(&self, gi: usize) -> usize {
        self.bands.partition_point(|b| b.hi <= gi)
    }

    /// One pass over the values in ascending order; returns whether anything moved.
    fn pass(&mut self) -> bool {
        let mut moved = false;
        for gi in 0..self.groups.len() {
            let b = self.band_of_group(gi);
            let band = self.bands[b];
            if b > 0 && band.lo == gi && self.try_move(b, false) {
                moved = true;
                continue;
            }
            let b = self.band_of_group(gi);
            let band = self.bands[b];
            if b + 1 < self.bands.len() && band.hi == gi + 1 && self.try_move(b, true) {
                moved = true;
            }
        }
        moved
    }
}

/// Equal-count start: blocks of `n / k` sorted values, the remainder spread one
/// per block from the first; a run of equal values joins the block of its first member,
/// unless the remaining runs are needed to reach `min(k, runs)` bands.
fn initial_bands<T: Scalar>(groups: &[Group<T>], n: usize, k: usize) -> Vec<Band<T>> {
    let (base, rem) = (n / k, n % k);
    let mut block_end = Vec::with_capacity(k);
    let mut acc = 0;
    for c in 0..k {
        acc += base + usize::from(c < rem);
        block_end.push(acc);
    }
    let needed = k.min(groups.len());
    let mut bands: Vec<Band<T>> = Vec::with_capacity(k);
    let mut prev_block = usize::MAX;
    let mut pos = 0;
    for (gi, g) in groups.iter().enumerate() {
        let block = block_end.partition_point(|&e| e <= pos);
        let forced = bands.len() + (groups.len() - gi) <= needed;
        if block != prev_block || forced {
            bands.push(Band { lo: gi, hi: gi, sum: T::zero(), count: 0 });
            prev_block = block;
        }
        let last = bands.last_mut().expect("band pushed above");
        last.hi = gi + 1;
        last.sum = last.sum + g.value * T::from_usize_s(g.count);
        last.count += g.count;
        pos += g.count;
    }
    bands
}

fn sorted_groups<T: Scalar>(y: &[T]) -> (Vec<usize>, Vec<Group<T>>, Vec<usize>) {
    let mut order: Vec<usize> = (0..y.len()).collect();
    order.sort_by(|&a, &b| y[a].total_cmp_s(&y[b]).then(a.cmp(&b)));
    let mut groups: Vec<Group<T>> = Vec::new();
    let mut group_of_pos = Vec::with_capacity(y.len());
    for &i in &order {
        match groups.last_mut() {
            Some(g) if g.value == y[i] => g.count += 1,
            _ => groups.push(Group { value: y[i], count: 1 }),
        }
        group_of_pos.push(groups.len() - 1);
    }
    (order, groups, group_of_pos)
}

pub fn p_class<T: Scalar>(y: &[T], k: usize) -> Result<PseudoClassAssignment<T>> {
    p_class_with(y, k, ClassDistance::Absolute)
}

pub fn p_class_with<T: Scalar>(y: &[T], k: usize, distance: ClassDistance) -> Result<PseudoClassAssignment<T>> {
    if k == 0 {
        return Err(Error::InvalidArgument("number of classes must be at least 1".into()));
    }
    if k > y.len() {
        return Err(Error::InvalidArgument(format!("{k} classes requested for {} values", y.len())));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("target values must be finite".into()));
    }
    let (order, groups, group_of_pos) = sorted_groups(y);
    let mut state = State { bands: initial_bands(&groups, y.len(), k), groups: &groups, distance };

    let mut err_new = state.err();
    for _ in 0..MAX_PASSES {
        let err_old = err_new;
        let moved = state.pass();
        err_new = state.err();
        if !moved || !(err_new < err_old) {
            break;
        }
    }

    // Adjacent bands with identical means are merged.
    let mut merged: Vec<Band<T>> = Vec::with_capacity(state.bands.len());
    for b in state.bands.iter().copied() {
        match merged.last_mut() {
            Some(last) if last.mean() == b.mean() => {
                last.hi = b.hi;
                last.sum = last.sum + b.sum;
                last.count += b.count;
            }
            _ => merged.push(b),
        }
    }
    state.bands = merged;

    let mut class_of = vec![0; y.len()];
    for (pos, &i) in order.iter().enumerate() {
        class_of[i] = state.band_of_group(group_of_pos[pos]);
    }
    Ok(PseudoClassAssignment {
        class_of,
        class_means: state.bands.iter().map(Band::mean).collect(),
        err: state.err(),
        k_effective: state.bands.len(),
    })
}

/// Two-way split of the values, used to peel off the lower part of the last class.
pub fn split_in_two<T: Scalar>(y: &[T]) -> Result<PseudoClassAssignment<T>> {
    if y.len() < 2 {
        return Err(Error::InvalidArgument("split_in_two needs at least two values".into()));
    }
    p_class(y, 2)
}
