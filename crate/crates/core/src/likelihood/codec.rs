use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::LikelihoodError;
use crate::bitset::BitSet;
use crate::graph::AdjacencyMatrix;
use crate::sim::ObservedData;

/// One coordinate of `γ = (α, μ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    /// Free edge `(i, j)`, `i < j`, absent from `A_R`.
    Edge { i: usize, j: usize },
    /// Bit `bit` of the pendant count of `subject`.
    Pendant { subject: usize, bit: u32 },
}

/// Binary encoding of `(A, u)` relative to the revealed graph.
///
/// The full codec lists every free edge (row-major) followed by `bits`
/// pendant bits per subject (subject-major, least significant first). A
/// restricted codec keeps only chosen slots; everything else is fixed at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaCodec {
    n: usize,
    revealed: AdjacencyMatrix,
    u_max: u64,
    bits: u32,
    slots: Vec<Slot>,
}

/// Number of bits needed to write every integer in `0..=u_max`.
pub fn bit_width(u_max: u64) -> u32 {
    64 - u_max.leading_zeros()
}

impl GammaCodec {
    /// Full codec with `u_max = max_i d_i`.
    pub fn new(obs: &ObservedData) -> Self {
        let n = obs.n();
        let revealed = obs.recruitment_adjacency();
        let u_max = obs.max_degree() as u64;
        let bits = bit_width(u_max);
        let mut slots = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if !revealed.get(i, j) {
                    slots.push(Slot::Edge { i, j });
                }
            }
        }
        for subject in 0..n {
            for bit in 0..bits {
                slots.push(Slot::Pendant { subject, bit });
            }
        }
        GammaCodec { n, revealed, u_max, bits, slots }
    }

    /// Codec over the given slots only, in the given order.
    pub fn restricted(obs: &ObservedData, slots: Vec<Slot>) -> Result<Self, LikelihoodError> {
        let full = Self::new(obs);
        let mut seen = BitSet::new(full.n * full.n + full.n * full.bits as usize);
        for s in &slots {
            let key = match *s {
                Slot::Edge { i, j } => {
                    if !(i < j && j < full.n) || full.revealed.get(i, j) {
                        return Err(LikelihoodError::Encode(format!("({i}, {j}) is not a free edge")));
                    }
                    i * full.n + j
                }
                Slot::Pendant { subject, bit } => {
                    if subject >= full.n || bit >= full.bits {
                        return Err(LikelihoodError::Encode(format!("no pendant bit {bit} for subject {subject}")));
                    }
                    full.n * full.n + subject * full.bits as usize + bit as usize
                }
            };
            if !seen.insert(key) {
                return Err(LikelihoodError::Encode(format!("repeated slot {s:?}")));
            }
        }
        Ok(GammaCodec { slots, ..full })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension `N` of `γ`.
    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn u_max(&self) -> u64 {
        self.u_max
    }

    /// Pendant bit width `N₂`.
    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn revealed(&self) -> &AdjacencyMatrix {
        &self.revealed
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn slot(&self, k: usize) -> Slot {
        self.slots[k]
    }

    /// `(index, i, j)` of every edge slot.
    pub fn edge_slots(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.slots.iter().enumerate().filter_map(|(k, s)| match *s {
            Slot::Edge { i, j } => Some((k, i, j)),
            Slot::Pendant { .. } => None,
        })
    }

    /// Number of edge slots `N₁`.
    pub fn edge_count(&self) -> usize {
        self.edge_slots().count()
    }

    pub fn decode(&self, gamma: &BitSet) -> (AdjacencyMatrix, Vec<u64>) {
        let mut a = self.revealed.clone();
        let mut u = vec![0u64; self.n];
        for k in gamma.iter() {
            match self.slots[k] {
                Slot::Edge { i, j } => a.set(i, j, true),
                Slot::Pendant { subject, bit } => u[subject] |= 1 << bit,
            }
        }
        (a, u)
    }

    pub fn encode(&self, a: &AdjacencyMatrix, u: &[u64]) -> Result<BitSet, LikelihoodError> {
        if a.dim() != self.n || u.len() != self.n {
            return Err(LikelihoodError::Dimension(format!("A is {}, u has {}, codec is {}", a.dim(), u.len(), self.n)));
        }
        if !a.dominates(&self.revealed) {
            return Err(LikelihoodError::Encode("A lacks a revealed edge".into()));
        }
        let mut gamma = BitSet::new(self.len());
        let mut edges_used = 0;
        let mut bits_used = vec![0u64; self.n];
        for (k, s) in self.slots.iter().enumerate() {
            match *s {
                Slot::Edge { i, j } => {
                    if a.get(i, j) {
                        gamma.insert(k);
                        edges_used += 1;
                    }
                }
                Slot::Pendant { subject, bit } => {
                    if (u[subject] >> bit) & 1 == 1 {
                        gamma.insert(k);
                        bits_used[subject] |= 1 << bit;
                    }
                }
            }
        }
        if edges_used != a.edge_count() - self.revealed.edge_count() {
            return Err(LikelihoodError::Encode("A has an edge outside the codec".into()));
        }
        if let Some(s) = (0..self.n).find(|&s| bits_used[s] != u[s]) {
            return Err(LikelihoodError::Encode(format!("u[{s}] = {} not representable", u[s])));
        }
        Ok(gamma)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::BitMatrix;

    fn path_obs(degrees: Vec<u32>) -> ObservedData {
        let n = degrees.len();
        ObservedData {
            coupons: BitMatrix::new(n),
            degrees,
            times: (0..n).map(|i| i as f64).collect(),
            recruitments: (1..n).map(|i| (i - 1, i)).collect(),
            seeds: vec![0],
        }
    }

    #[test]
    fn widths() {
        assert_eq!(bit_width(0), 0);
        assert_eq!(bit_width(1), 1);
        assert_eq!(bit_width(2), 2);
        assert_eq!(bit_width(4), 3);
        assert_eq!(bit_width(7), 3);
        assert_eq!(bit_width(8), 4);
    }

    #[test]
    fn dimension_formula() {
        let obs = path_obs(vec![3, 2, 5, 1]);
        let c = GammaCodec::new(&obs);
        // C(4,2) − 3 revealed = 3 free edges; u_max = 5 needs 3 bits
        assert_eq!(c.edge_count(), 3);
        assert_eq!(c.bits(), 3);
        assert_eq!(c.len(), 3 + 4 * 3);
    }

    #[test]
    fn roundtrip_all_small_states() {
        let obs = path_obs(vec![2, 1, 2]);
        let c = GammaCodec::new(&obs);
        assert_eq!(c.len(), 1 + 3 * 2);
        for mask in 0..(1u64 << c.len()) {
            let g = BitSet::from_mask(c.len(), mask);
            let (a, u) = c.decode(&g);
            assert!(a.dominates(c.revealed()));
            assert_eq!(c.encode(&a, &u).unwrap(), g);
        }
    }

    #[test]
    fn encode_errors() {
        let obs = path_obs(vec![2, 2, 2]);
        let c = GammaCodec::new(&obs);
        let a = AdjacencyMatrix::new(3);
        assert!(c.encode(&a, &[0, 0, 0]).is_err());
        let a = obs.recruitment_adjacency();
        assert!(c.encode(&a, &[4, 0, 0]).is_err());
        assert!(c.encode(&a, &[3, 0, 0]).is_ok());
    }

    #[test]
    fn restricted_codec() {
        let obs = path_obs(vec![3, 3, 3, 3]);
        let slots = vec![Slot::Edge { i: 0, j: 3 }, Slot::Pendant { subject: 2, bit: 1 }];
        let c = GammaCodec::restricted(&obs, slots).unwrap();
        assert_eq!(c.len(), 2);
        let (a, u) = c.decode(&BitSet::full(2));
        assert!(a.get(0, 3) && !a.get(0, 2));
        assert_eq!(u, [0, 0, 2, 0]);
        assert_eq!(c.encode(&a, &u).unwrap(), BitSet::full(2));
        let mut outside = a.clone();
        outside.set(0, 2, true);
        assert!(c.encode(&outside, &u).is_err());
        assert!(GammaCodec::restricted(&obs, vec![Slot::Edge { i: 0, j: 1 }]).is_err());
        assert!(GammaCodec::restricted(&obs, vec![Slot::Edge { i: 0, j: 2 }, Slot::Edge { i: 0, j: 2 }]).is_err());
    }
}
