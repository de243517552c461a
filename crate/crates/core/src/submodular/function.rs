use alloc::vec::Vec;

use crate::bitset::BitSet;

/// A set function over the ground set `0..len()`, evaluated through
/// cursors that keep incremental state for one current subset.
pub trait SetFunction {
    type Cursor<'a>: SetCursor
    where
        Self: 'a;

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// A cursor positioned at the empty set.
    fn cursor(&self) -> Self::Cursor<'_>;

    fn evaluate(&self, set: &BitSet) -> f64 {
        let mut c = self.cursor();
        c.move_to(set);
        c.value()
    }
}

pub trait SetCursor {
    fn set(&self) -> &BitSet;

    fn value(&self) -> f64;

    /// `F(X ⊕ {i}) − F(X)`: the insertion gain for `i ∉ X`, the change on
    /// removal for `i ∈ X`.
    fn toggle_gain(&self, i: usize) -> f64;

    /// Flips membership of `i` and returns the new value.
    fn toggle(&mut self, i: usize) -> f64;

    fn contains(&self, i: usize) -> bool {
        self.set().contains(i)
    }

    fn move_to(&mut self, target: &BitSet) {
        let diff: Vec<usize> = (0..target.capacity()).filter(|&i| self.contains(i) != target.contains(i)).collect();
        for i in diff {
            self.toggle(i);
        }
    }
}

/// `m(X) = Σ_{i∈X} w_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Modular {
    pub weights: Vec<f64>,
}

impl Modular {
    pub fn new(weights: Vec<f64>) -> Self {
        Modular { weights }
    }
}

pub struct ModularCursor<'a> {
    weights: &'a [f64],
    set: BitSet,
    value: f64,
}

impl SetCursor for ModularCursor<'_> {
    fn set(&self) -> &BitSet {
        &self.set
    }
    fn value(&self) -> f64 {
        self.value
    }
    fn toggle_gain(&self, i: usize) -> f64 {
        if self.set.contains(i) {
            -self.weights[i]
        } else {
            self.weights[i]
        }
    }
    fn toggle(&mut self, i: usize) -> f64 {
        self.value += self.toggle_gain(i);
        let on = !self.set.contains(i);
        self.set.set(i, on);
        self.value
    }
}

impl SetFunction for Modular {
    type Cursor<'a> = ModularCursor<'a>;
    fn len(&self) -> usize {
        self.weights.len()
    }
    fn cursor(&self) -> ModularCursor<'_> {
        ModularCursor { weights: &self.weights, set: BitSet::new(self.weights.len()), value: 0.0 }
    }
    fn evaluate(&self, set: &BitSet) -> f64 {
        set.iter().map(|i| self.weights[i]).sum()
    }
}

/// Wraps a from-scratch evaluator; every query re-evaluates.
pub struct FnSetFunction<F> {
    len: usize,
    f: F,
}

impl<F: Fn(&BitSet) -> f64> FnSetFunction<F> {
    pub fn new(len: usize, f: F) -> Self {
        FnSetFunction { len, f }
    }
}

pub struct FnCursor<'a, F> {
    f: &'a F,
    set: BitSet,
    value: f64,
}

impl<F: Fn(&BitSet) -> f64> SetCursor for FnCursor<'_, F> {
    fn set(&self) -> &BitSet {
        &self.set
    }
    fn value(&self) -> f64 {
        self.value
    }
    fn toggle_gain(&self, i: usize) -> f64 {
        let mut s = self.set.clone();
        s.set(i, !s.contains(i));
        (self.f)(&s) - self.value
    }
    fn toggle(&mut self, i: usize) -> f64 {
        let on = !self.set.contains(i);
        self.set.set(i, on);
        self.value = (self.f)(&self.set);
        self.value
    }
    fn move_to(&mut self, target: &BitSet) {
        self.set = target.clone();
        self.value = (self.f)(&self.set);
    }
}

impl<F: Fn(&BitSet) -> f64> SetFunction for FnSetFunction<F> {
    type Cursor<'a>
        = FnCursor<'a, F>
    where
        F: 'a;
    fn len(&self) -> usize {
        self.len
    }
    fn cursor(&self) -> FnCursor<'_, F> {
        let set = BitSet::new(self.len);
        let value = (self.f)(&set);
        FnCursor { f: &self.f, set, value }
    }
    fn evaluate(&self, set: &BitSet) -> f64 {
        (self.f)(set)
    }
}

/// `F(X) + Σ_{i∈X} m_i`.
pub struct PlusModular<'f, F> {
    pub f: &'f F,
    pub m: Vec<f64>,
}

impl<'f, F: SetFunction> PlusModular<'f, F> {
    pub fn new(f: &'f F, m: Vec<f64>) -> Self {
        assert_eq!(f.len(), m.len());
        PlusModular { f, m }
    }
}

pub struct PlusModularCursor<'a, C> {
    inner: C,
    m: &'a [f64],
    shift: f64,
}

impl<C: SetCursor> SetCursor for PlusModularCursor<'_, C> {
    fn set(&self) -> &BitSet {
        self.inner.set()
    }
    fn value(&self) -> f64 {
        self.inner.value() + self.shift
    }
    fn toggle_gain(&self, i: usize) -> f64 {
        let dm = if self.inner.contains(i) { -self.m[i] } else { self.m[i] };
        self.inner.toggle_gain(i) + dm
    }
    fn toggle(&mut self, i: usize) -> f64 {
        self.shift += if self.inner.contains(i) { -self.m[i] } else { self.m[i] };
        self.inner.toggle(i);
        self.value()
    }
}

impl<F: SetFunction> SetFunction for PlusModular<'_, F> {
    type Cursor<'a>
        = PlusModularCursor<'a, F::Cursor<'a>>
    where
        Self: 'a;
    fn len(&self) -> usize {
        self.m.len()
    }
    fn cursor(&self) -> Self::Cursor<'_> {
        PlusModularCursor { inner: self.f.cursor(), m: &self.m, shift: 0.0 }
    }
}
