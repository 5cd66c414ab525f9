//! Vectors over GF(p), p <= 13, with up to 16 coordinates packed four bits
//! per coordinate into a `u64`. Used by the exhaustive searches.

pub const MAX_COORDS: usize = 16;
pub const MAX_PRIME: u32 = 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Packed {
    p: u64,
    n: usize,
}

impl Packed {
    pub fn new(p: u32, n: usize) -> Self {
        assert!(
            p <= MAX_PRIME && n <= MAX_COORDS,
            "packed vectors need p <= 13 and n <= 16"
        );
        Packed { p: p as u64, n }
    }

    #[inline]
    pub fn get(self, v: u64, i: usize) -> u64 {
        (v >> (4 * i)) & 0xf
    }

    pub fn unit(self, i: usize) -> u64 {
        1 << (4 * i)
    }

    #[cfg(test)]
    pub fn pack(self, xs: &[u32]) -> u64 {
        xs.iter()
            .enumerate()
            .fold(0, |acc, (i, &x)| acc | ((x as u64) << (4 * i)))
    }

    pub fn to_vec(self, v: u64) -> Vec<u32> {
        (0..self.n).map(|i| self.get(v, i) as u32).collect()
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        if self.p == 2 {
            return a ^ b;
        }
        let mut out = 0;
        for i in 0..self.n {
            let s = (self.get(a, i) + self.get(b, i)) % self.p;
            out |= s << (4 * i);
        }
        out
    }

    #[inline]
    pub fn scale(self, a: u64, c: u64) -> u64 {
        match c {
            0 => 0,
            1 => a,
            _ => {
                let mut out = 0;
                for i in 0..self.n {
                    out |= ((self.get(a, i) * c) % self.p) << (4 * i);
                }
                out
            }
        }
    }

    /// `a + c * b`.
    #[inline]
    pub fn axpy(self, a: u64, c: u64, b: u64) -> u64 {
        self.add(a, self.scale(b, c))
    }

    fn inv(self, a: u64) -> u64 {
        (1..self.p)
            .find(|&x| (x * a) % self.p == 1)
            .expect("nonzero residue")
    }

    fn lead(self, v: u64) -> Option<usize> {
        (v != 0).then(|| v.trailing_zeros() as usize / 4)
    }

    /// Reduced echelon basis of the span, sorted by pivot; canonical for the
    /// subspace.
    pub fn echelon(self, vs: &[u64]) -> Vec<u64> {
        let mut basis: Vec<u64> = Vec::with_capacity(vs.len());
        for &v in vs {
            self.insert(&mut basis, v);
        }
        basis
    }

    /// Adds `v` to a reduced echelon basis; returns whether the dimension grew.
    pub fn insert(self, basis: &mut Vec<u64>, v: u64) -> bool {
        let r = self.reduce(basis, v);
        let Some(piv) = self.lead(r) else {
            return false;
        };
        let r = self.scale(r, self.inv(self.get(r, piv)));
        for b in basis.iter_mut() {
            let c = self.get(*b, piv);
            if c != 0 {
                *b = self.axpy(*b, self.p - c, r);
            }
        }
        let pos =
            basis.partition_point(|&b| self.lead(b).expect("basis vectors are nonzero") < piv);
        basis.insert(pos, r);
        true
    }

    /// Remainder of `v` modulo a reduced echelon basis.
    pub fn reduce(self, basis: &[u64], mut v: u64) -> u64 {
        for &b in basis {
            let piv = self.lead(b).expect("basis vectors are nonzero");
            let c = self.get(v, piv);
            if c != 0 {
                v = self.axpy(v, self.p - c, b);
            }
        }
        v
    }

    pub fn contains(self, basis: &[u64], v: u64) -> bool {
        self.reduce(basis, v) == 0
    }
}
