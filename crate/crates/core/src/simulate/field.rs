//! Prime-field arithmetic and incremental rank tracking.

use rand::Rng;

/// The field of integers modulo a prime `q < 2^32`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    q: u64,
}

pub fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    if q < 4 {
        return true;
    }
    if q % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= q {
        if q % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl PrimeField {
    /// `None` unless `q` is a prime below 2^32.
    pub fn new(q: u64) -> Option<Self> {
        (q < (1 << 32) && is_prime(q)).then_some(Self { q })
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.q
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.q - b) % self.q
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.q
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1;
        base %= self.q;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse of a nonzero element.
    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(a % self.q != 0);
        self.pow(a, self.q - 2)
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.random_range(0..self.q)
    }

    pub fn random_vector<R: Rng + ?Sized>(&self, len: usize, rng: &mut R) -> Vec<u64> {
        (0..len).map(|_| self.random(rng)).collect()
    }
}

/// Span of the coefficient vectors received so far, kept in row echelon
/// form with unit pivots.
#[derive(Debug, Clone)]
pub struct RankTracker {
    field: PrimeField,
    width: usize,
    rows: Vec<Vec<u64>>,
    /// Row index owning each pivot column.
    pivot_row: Vec<Option<usize>>,
}

impl RankTracker {
    pub fn new(field: PrimeField, width: usize) -> Self {
        Self {
            field,
            width,
            rows: Vec::with_capacity(width),
            pivot_row: vec![None; width],
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.width
    }

    pub fn basis(&self) -> &[Vec<u64>] {
        &self.rows
    }

    /// Adds `v` to the span. Returns whether it was innovative.
    pub fn insert(&mut self, mut v: Vec<u64>) -> bool {
        debug_assert_eq!(v.len(), self.width);
        let f = self.field;
        let mut lead = None;
        for c in 0..self.width {
            if v[c] == 0 {
                continue;
            }
            match self.pivot_row[c] {
                Some(r) => {
                    let factor = v[c];
                    let row = &self.rows[r];
                    for j in c..self.width {
                        if row[j] != 0 {
                            v[j] = f.sub(v[j], f.mul(factor, row[j]));
                        }
                    }
                }
                None => {
                    if lead.is_none() {
                        lead = Some(c);
                    }
                }
            }
        }
        let Some(c) = lead else {
            return false;
        };
        // Columns before `c` are zero: pivots were eliminated and the rest
        // precede the first surviving entry.
        let scale = f.inv(v[c]);
        for x in v.iter_mut().skip(c) {
            *x = f.mul(*x, scale);
        }
        self.pivot_row[c] = Some(self.rows.len());
        self.rows.push(v);
        true
    }

    /// A uniformly random element of the span.
    pub fn random_combination<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u64> {
        let f = self.field;
        let mut out = vec![0; self.width];
        for row in &self.rows {
            let c = f.random(rng);
            if c == 0 {
                continue;
            }
            for (o, &x) in out.iter_mut().zip(row) {
                *o = f.add(*o, f.mul(c, x));
            }
        }
        out
    }
}
