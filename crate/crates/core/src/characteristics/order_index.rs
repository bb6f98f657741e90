/// Fenwick tree over value ranks holding the count and the sum of the
/// inserted values, so that "how many, and how much, lie at or below rank r"
/// is answered in O(log N).
pub(super) struct OrderIndex {
    count: Vec<u32>,
    sum: Vec<f64>,
}

impl OrderIndex {
    pub fn new(n: usize) -> Self {
        OrderIndex {
            count: vec![0; n + 1],
            sum: vec![0.0; n + 1],
        }
    }

    pub fn clear(&mut self) {
        self.count.fill(0);
        self.sum.fill(0.0);
    }

    pub fn insert(&mut self, rank: usize, value: f64) {
        let mut i = rank + 1;
        while i < self.count.len() {
            self.count[i] += 1;
            self.sum[i] += value;
            i += i & i.wrapping_neg();
        }
    }

    /// Count and sum of inserted values with rank `< ranks`.
    pub fn below(&self, ranks: usize) -> (usize, f64) {
        let (mut c, mut s) = (0usize, 0.0);
        let mut i = ranks;
        while i > 0 {
            c += self.count[i] as usize;
            s += self.sum[i];
            i -= i & i.wrapping_neg();
        }
        (c, s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefix_queries() {
        let mut ix = OrderIndex::new(8);
        for (rank, v) in [(3, 1.5), (0, -2.0), (7, 4.0), (3, 1.5)] {
            ix.insert(rank, v);
        }
        assert_eq!(ix.below(0), (0, 0.0));
        assert_eq!(ix.below(1), (1, -2.0));
        assert_eq!(ix.below(4), (3, 1.0));
        assert_eq!(ix.below(8), (4, 5.0));
        ix.clear();
        assert_eq!(ix.below(8), (0, 0.0));
    }
}
