use std::cmp::Ordering;

/// Strictly increasing index tuple, stored as a set of bits.
///
/// Within one degree the order is lexicographic on the index tuples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Blade(u64);

impl Blade {
    pub const EMPTY: Blade = Blade(0);

    pub fn single(k: usize) -> Blade {
        Blade(1u64 << k)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> Option<Blade> {
        let mut bits = 0u64;
        for k in it {
            if k >= 64 || bits & (1 << k) != 0 {
                return None;
            }
            bits |= 1 << k;
        }
        Some(Blade(bits))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, k: usize) -> bool {
        self.0 & (1 << k) != 0
    }

    pub fn is_subset(self, other: Blade) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: Blade) -> Blade {
        Blade(self.0 | other.0)
    }

    pub fn without(self, other: Blade) -> Blade {
        Blade(self.0 & !other.0)
    }

    pub fn with(self, k: usize) -> Blade {
        Blade(self.0 | (1 << k))
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let k = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(k)
            }
        })
    }

    fn below(k: usize) -> u64 {
        (1u64 << k) - 1
    }

    fn above(k: usize) -> u64 {
        if k >= 63 {
            0
        } else {
            !((1u64 << (k + 1)) - 1)
        }
    }

    /// Sign of `e_self ∧ e_other` relative to `e_{self ∪ other}`; `None` when
    /// the blades overlap.
    pub fn wedge_sign(self, other: Blade) -> Option<i8> {
        if self.0 & other.0 != 0 {
            return None;
        }
        let mut inversions = 0u32;
        for j in other.indices() {
            inversions += (self.0 & Self::above(j)).count_ones();
        }
        Some(if inversions.is_multiple_of(2) { 1 } else { -1 })
    }

    /// Sign of `dx^k ∧ dx^self` relative to `dx^{self ∪ k}`.
    pub fn insert_sign(self, k: usize) -> i8 {
        if (self.0 & Self::below(k)).count_ones().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// Contracts the form blade `self` by the vector blade `v`, leftmost
    /// vector factor first. `None` unless `v ⊆ self`.
    pub fn contract(self, v: Blade) -> Option<(i8, Blade)> {
        if !v.is_subset(self) {
            return None;
        }
        let mut rest = self.0;
        let mut parity = 0u32;
        for j in v.indices() {
            parity += (rest & Self::below(j)).count_ones();
            rest &= !(1 << j);
        }
        Some((if parity.is_multiple_of(2) { 1 } else { -1 }, Blade(rest)))
    }

    /// Right derivative by the odd generator `k`: moves it to the right end.
    pub fn right_remove(self, k: usize) -> Option<(i8, Blade)> {
        if !self.contains(k) {
            return None;
        }
        let sign = if (self.0 & Self::above(k)).count_ones().is_multiple_of(2) { 1 } else { -1 };
        Some((sign, Blade(self.0 & !(1 << k))))
    }
}

impl PartialOrd for Blade {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Blade {
    /// Lexicographic on index tuples for blades of equal size: the blade
    /// holding the lowest differing index comes first.
    fn cmp(&self, other: &Self) -> Ordering {
        if self.0 == other.0 {
            return Ordering::Equal;
        }
        let d = self.0 ^ other.0;
        let low = d & d.wrapping_neg();
        if self.0 & low != 0 {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(ix: &[usize]) -> Blade {
        Blade::from_indices(ix.iter().copied()).unwrap()
    }

    #[test]
    fn lexicographic_order() {
        let mut v = [b(&[1, 2]), b(&[0, 3]), b(&[0, 1]), b(&[2, 3]), b(&[0, 2])];
        v.sort();
        let tuples: Vec<Vec<usize>> = v.iter().map(|x| x.indices().collect()).collect();
        assert_eq!(tuples, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![2, 3]]);
    }

    #[test]
    fn wedge_signs_count_transpositions() {
        assert_eq!(b(&[0]).wedge_sign(b(&[1])), Some(1));
        assert_eq!(b(&[1]).wedge_sign(b(&[0])), Some(-1));
        assert_eq!(b(&[0]).wedge_sign(b(&[0])), None);
        // (6,1) then 0: moving 0 past two indices
        assert_eq!(b(&[1, 6]).wedge_sign(b(&[0])), Some(1));
        assert_eq!(b(&[2]).wedge_sign(b(&[0, 1])), Some(1));
        assert_eq!(b(&[1]).wedge_sign(b(&[0, 2])), Some(-1));
    }

    #[test]
    fn contraction_order() {
        // ι_{e0∧e1}(dx0∧dx1) = ι_{e1} ι_{e0} (dx0∧dx1) = ι_{e1} dx1 = 1
        assert_eq!(b(&[0, 1]).contract(b(&[0, 1])), Some((1, Blade::EMPTY)));
        assert_eq!(b(&[0, 1]).contract(b(&[1])), Some((-1, b(&[0]))));
        assert_eq!(b(&[0, 1, 2]).contract(b(&[0, 2])), Some((-1, b(&[1]))));
        assert_eq!(b(&[0, 1]).contract(b(&[2])), None);
    }
}
