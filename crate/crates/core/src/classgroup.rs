//! The form class group `C(D)`, enumerated and tabulated in full.
//!
//! Desk-scale discriminants have at most a few thousand classes, so every
//! structural question (orders, squares, 2-torsion, genera, invariant factors)
//! is answered by brute force on the Cayley table.

use std::collections::HashMap;

use crate::arith::{gcd3, is_discriminant};
use crate::qforms::{compose, FormClass, QuadForm};
use crate::{Error, Result};

/// Sorted set of class indices into [`ClassGroup::classes`].
pub type ClassSet = Vec<usize>;

#[derive(Clone, Debug)]
pub struct ClassGroup {
    disc: i64,
    classes: Vec<FormClass>,
    index: HashMap<QuadForm, usize>,
    cayley: Vec<Vec<usize>>,
    elementary_divisors: Vec<u64>,
}

/// Cosets of the principal genus `C(D)²`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenusPartition {
    pub principal_genus: ClassSet,
    pub cosets: Vec<ClassSet>,
}

/// Reduced primitive forms of discriminant `d`, principal form first.
///
/// Classes are ordered by `a`, then `|b|`, with `b > 0` before `−b`.
pub fn reduced_forms(d: i64) -> Result<Vec<QuadForm>> {
    if !is_discriminant(d) {
        return Err(Error::BadDiscriminant(d));
    }
    let abs_d = -(d as i128);
    let mut out = Vec::new();
    let mut a: i64 = 1;
    while 3 * (a as i128) * (a as i128) <= abs_d {
        let a2 = a as i128;
        for babs in 0..=a {
            if (babs as i128 - d as i128).rem_euclid(2) != 0 {
                continue;
            }
            let num = (babs as i128) * (babs as i128) + abs_d;
            if num % (4 * a2) != 0 {
                continue;
            }
            let c = (num / (4 * a2)) as i64;
            if c < a {
                continue;
            }
            let signs: &[i64] = if babs == 0 { &[0] } else { &[babs, -babs] };
            for &b in signs {
                if b < 0 && (babs == a || a == c) {
                    continue;
                }
                if gcd3(a, b, c) == 1 {
                    out.push(QuadForm::new(a, b, c));
                }
            }
        }
        a += 1;
    }
    Ok(out)
}

/// Class number `h(D)` by counting reduced forms.
pub fn class_number(d: i64) -> Result<usize> {
    reduced_forms(d).map(|v| v.len())
}

impl ClassGroup {
    /// Builds `C(d)` with its full composition table.
    pub fn enumerate(d: i64) -> Result<ClassGroup> {
        let classes: Vec<FormClass> = reduced_forms(d)?.into_iter().map(FormClass::of).collect::<Result<_>>()?;
        let index: HashMap<QuadForm, usize> = classes.iter().enumerate().map(|(i, c)| (c.rep(), i)).collect();
        let h = classes.len();
        let mut cayley = vec![vec![0usize; h]; h];
        for i in 0..h {
            for j in i..h {
                let k = index[&compose(&classes[i], &classes[j])?.rep()];
                cayley[i][j] = k;
                cayley[j][i] = k;
            }
        }
        let mut g = ClassGroup { disc: d, classes, index, cayley, elementary_divisors: vec![] };
        g.elementary_divisors = g.compute_structure();
        Ok(g)
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }

    pub fn order(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &[FormClass] {
        &self.classes
    }

    pub fn class(&self, i: usize) -> &FormClass {
        &self.classes[i]
    }

    pub fn cayley(&self) -> &[Vec<usize>] {
        &self.cayley
    }

    /// Index of the principal class (always 0).
    pub fn identity(&self) -> usize {
        0
    }

    pub fn index_of(&self, cls: &FormClass) -> Result<usize> {
        if cls.disc() != self.disc {
            return Err(Error::ClassNotInGroup(cls.rep()));
        }
        self.index.get(&cls.rep()).copied().ok_or(Error::ClassNotInGroup(cls.rep()))
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.cayley[i][j]
    }

    pub fn inv(&self, i: usize) -> usize {
        self.cayley[i].iter().position(|&k| k == 0).expect("Cayley table is a group")
    }

    pub fn pow(&self, i: usize, mut n: u64) -> usize {
        let (mut acc, mut base) = (0, i);
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            n >>= 1;
        }
        acc
    }

    pub fn element_order(&self, i: usize) -> u64 {
        let mut x = i;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, i);
            k += 1;
        }
        k
    }

    /// `C(D)[2]`.
    pub fn two_torsion(&self) -> ClassSet {
        (0..self.order()).filter(|&i| self.mul(i, i) == 0).collect()
    }

    /// The group of squares `C(D)²`, which is the principal genus.
    pub fn principal_genus(&self) -> ClassSet {
        let mut sq: ClassSet = (0..self.order()).map(|i| self.mul(i, i)).collect();
        sq.sort_unstable();
        sq.dedup();
        sq
    }

    /// Order `g` of a genus, `|C(D)²|`.
    pub fn genus_order(&self) -> usize {
        self.principal_genus().len()
    }

    fn coset(&self, i: usize, subgroup: &[usize]) -> ClassSet {
        let mut c: ClassSet = subgroup.iter().map(|&s| self.mul(i, s)).collect();
        c.sort_unstable();
        c
    }

    /// Cosets of the principal genus, listed in order of their smallest index.
    pub fn genus_partition(&self) -> GenusPartition {
        let principal_genus = self.principal_genus();
        let mut seen = vec![false; self.order()];
        let mut cosets = Vec::new();
        for i in 0..self.order() {
            if seen[i] {
                continue;
            }
            let c = self.coset(i, &principal_genus);
            for &k in &c {
                seen[k] = true;
            }
            cosets.push(c);
        }
        GenusPartition { principal_genus, cosets }
    }

    /// The genus `cls · C(D)²`.
    pub fn genus_of(&self, cls: &FormClass) -> Result<ClassSet> {
        let i = self.index_of(cls)?;
        Ok(self.coset(i, &self.principal_genus()))
    }

    /// Invariant factors `d₁ | d₂ | …` with product `h`; empty for the trivial group.
    pub fn elementary_divisors(&self) -> &[u64] {
        &self.elementary_divisors
    }

    // For each prime p | h the p-ranks are read off from |G[p^k]|; the cyclic
    // factors are then recombined largest-with-largest into invariant factors.
    fn compute_structure(&self) -> Vec<u64> {
        let h = self.order() as u64;
        let mut n = h;
        let mut primes = Vec::new();
        let mut p = 2;
        while p * p <= n {
            if n.is_multiple_of(p) {
                primes.push(p);
                while n.is_multiple_of(p) {
                    n /= p;
                }
            }
            p += 1;
        }
        if n > 1 {
            primes.push(n);
        }
        let orders: Vec<u64> = (0..self.order()).map(|i| self.element_order(i)).collect();
        // per prime: exponents of the cyclic p-factors, descending
        let mut factors_per_prime: Vec<Vec<u64>> = Vec::new();
        for &p in &primes {
            let mut counts = vec![1u64]; // |G[p^0]|
            let mut pk = 1u64;
            loop {
                pk *= p;
                let c = orders.iter().filter(|&&o| pk.is_multiple_of(o)).count() as u64;
                if c == *counts.last().unwrap() {
                    break;
                }
                counts.push(c);
            }
            // number of cyclic factors of order ≥ p^k is log_p(|G[p^k]| / |G[p^{k-1}]|)
            let ge: Vec<u32> = counts.windows(2).map(|w| ilog(w[1] / w[0], p)).collect();
            let mut powers = Vec::new();
            for (k, &cnt) in ge.iter().enumerate() {
                let next = ge.get(k + 1).copied().unwrap_or(0);
                for _ in 0..(cnt - next) {
                    powers.push(p.pow(k as u32 + 1));
                }
            }
            powers.sort_unstable_by(|a, b| b.cmp(a));
            factors_per_prime.push(powers);
        }
        let rank = factors_per_prime.iter().map(Vec::len).max().unwrap_or(0);
        let mut divisors = vec![1u64; rank];
        for powers in &factors_per_prime {
            for (i, &q) in powers.iter().enumerate() {
                divisors[i] *= q;
            }
        }
        divisors.reverse();
        debug_assert_eq!(divisors.iter().product::<u64>(), h);
        divisors
    }
}

fn ilog(mut n: u64, p: u64) -> u32 {
    let mut k = 0;
    while n > 1 {
        debug_assert_eq!(n % p, 0);
        n /= p;
        k += 1;
    }
    k
}
