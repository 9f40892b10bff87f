//! Exact counting tables.
//!
//! [`MahonianTable`] holds the number of permutations of `m` elements with
//! exactly `r` inversions, which is also the number of votes at swap distance
//! `r` from any fixed vote. [`ElectionCountTable`] holds, for a fixed `m`, the
//! number of `n`-voter elections at swap distance exactly `r` from any fixed
//! election. Both are built eagerly and are read-only afterwards.

use std::io::{Read, Write};
use std::path::Path;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};

use crate::election::max_swaps;
use crate::error::{Error, Result};

/// Inversion-count table `T_V[m][r]` for `0 <= m <= max_m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MahonianTable {
    rows: Vec<Vec<BigUint>>,
    zero: BigUint,
}

impl MahonianTable {
    pub fn build(max_m: usize) -> Self {
        let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(max_m + 1);
        rows.push(vec![BigUint::one()]);
        for m in 1..=max_m {
            let prev = &rows[m - 1];
            let umax = max_swaps(m) as usize;
            let mut row: Vec<BigUint> = Vec::with_capacity(umax + 1);
            row.push(BigUint::one());
            for r in 1..=umax {
                let mut acc = BigInt::from(row[r - 1].clone());
                if let Some(x) = prev.get(r) {
                    acc += BigInt::from(x.clone());
                }
                if r >= m {
                    if let Some(x) = prev.get(r - m) {
                        acc -= BigInt::from(x.clone());
                    }
                }
                assert!(
                    acc.sign() != Sign::Minus,
                    "negative Mahonian entry at m={m}, r={r}"
                );
                row.push(acc.to_biguint().expect("nonnegative"));
            }
            rows.push(row);
        }
        MahonianTable {
            rows,
            zero: BigUint::zero(),
        }
    }

    pub fn max_m(&self) -> usize {
        self.rows.len() - 1
    }

    /// `T_V[m][r]`, zero when `r` is outside `[0, m(m-1)/2]`.
    ///
    /// Panics if `m` exceeds the table.
    pub fn get(&self, m: usize, r: u64) -> &BigUint {
        let row = &self.rows[m];
        usize::try_from(r)
            .ok()
            .and_then(|r| row.get(r))
            .unwrap_or(&self.zero)
    }

    pub fn row(&self, m: usize) -> &[BigUint] {
        &self.rows[m]
    }
}

/// `T_E[n][r]` for a fixed candidate count `m` and `0 <= n <= max_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElectionCountTable {
    m: usize,
    rows: Vec<Vec<BigUint>>,
    zero: BigUint,
}

impl ElectionCountTable {
    /// Builds the table by convolving the Mahonian row for `m` with itself.
    pub fn build(mahonian: &MahonianTable, m: usize, max_n: usize) -> Result<Self> {
        if m > mahonian.max_m() {
            return Err(Error::TableTooSmall {
                what: format!("m = {m} (Mahonian table stops at {})", mahonian.max_m()),
            });
        }
        let u = max_swaps(m) as usize;
        let tv = mahonian.row(m);
        let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(max_n + 1);
        rows.push(vec![BigUint::one()]);
        for n in 1..=max_n {
            let prev = &rows[n - 1];
            let top = u * n;
            let mut row = Vec::with_capacity(top + 1);
            for r in 0..=top {
                let lo = r.saturating_sub(u * (n - 1));
                let hi = r.min(u);
                let mut acc = BigUint::zero();
                for i in lo..=hi {
                    acc += &tv[i] * &prev[r - i];
                }
                row.push(acc);
            }
            rows.push(row);
        }
        Ok(ElectionCountTable {
            m,
            rows,
            zero: BigUint::zero(),
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn max_n(&self) -> usize {
        self.rows.len() - 1
    }

    /// `T_E[n][r]`, zero outside `[0, n*u(m)]`. Panics if `n > max_n`.
    pub fn get(&self, n: usize, r: u64) -> &BigUint {
        let row = &self.rows[n];
        usize::try_from(r)
            .ok()
            .and_then(|r| row.get(r))
            .unwrap_or(&self.zero)
    }

    pub fn row(&self, n: usize) -> &[BigUint] {
        &self.rows[n]
    }

    /// Checks `T_E[n][0] = 1` and `sum_r T_E[n][r] = (m!)^n` for every row.
    pub fn verify_row_sums(&self) -> Result<()> {
        let fact: BigUint = (1..=self.m as u64).map(BigUint::from).product();
        let mut expected = BigUint::one();
        for (n, row) in self.rows.iter().enumerate() {
            if row.len() != (max_swaps(self.m) as usize) * n + 1 {
                return Err(Error::Checksum(format!("row {n} has length {}", row.len())));
            }
            if !row[0].is_one() {
                return Err(Error::Checksum(format!("T_E[{n}][0] != 1")));
            }
            let sum: BigUint = row.iter().sum();
            if sum != expected {
                return Err(Error::Checksum(format!(
                    "row {n} sums to {sum}, expected {expected}"
                )));
            }
            expected *= &fact;
        }
        Ok(())
    }

    const MAGIC: &'static [u8; 4] = b"SWCT";
    const VERSION: u32 = 1;

    /// Serializes the table. Layout (little endian): magic `SWCT`, version,
    /// `m`, `max_n`, then for each row `n = 1..=max_n` its length followed by
    /// every entry as a length-prefixed byte string.
    pub fn write_cache<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(Self::MAGIC)?;
        for x in [Self::VERSION, self.m as u32, self.max_n() as u32] {
            w.write_all(&x.to_le_bytes())?;
        }
        for row in &self.rows[1..] {
            w.write_all(&(row.len() as u32).to_le_bytes())?;
            for v in row {
                let bytes = v.to_bytes_le();
                w.write_all(&(bytes.len() as u32).to_le_bytes())?;
                w.write_all(&bytes)?;
            }
        }
        Ok(())
    }

    /// Reads a cache written by [`write_cache`](Self::write_cache) and checks
    /// its row sums and its first row against a freshly built Mahonian row.
    pub fn read_cache<R: Read>(mut r: R) -> Result<Self> {
        fn u32_of<R: Read>(r: &mut R) -> Result<u32> {
            let mut b = [0u8; 4];
            r.read_exact(&mut b)?;
            Ok(u32::from_le_bytes(b))
        }
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != Self::MAGIC {
            return Err(Error::Checksum("bad magic".into()));
        }
        let version = u32_of(&mut r)?;
        if version != Self::VERSION {
            return Err(Error::Checksum(format!("unsupported version {version}")));
        }
        let m = u32_of(&mut r)? as usize;
        let max_n = u32_of(&mut r)? as usize;
        let mut rows = vec![vec![BigUint::one()]];
        for _ in 0..max_n {
            let len = u32_of(&mut r)? as usize;
            if len > (max_swaps(m) as usize) * max_n + 1 {
                return Err(Error::Checksum(format!("implausible row length {len}")));
            }
            let mut row = Vec::with_capacity(len);
            for _ in 0..len {
                let nbytes = u32_of(&mut r)? as usize;
                let mut buf = vec![0u8; nbytes];
                r.read_exact(&mut buf)?;
                row.push(BigUint::from_bytes_le(&buf));
            }
            rows.push(row);
        }
        let table = ElectionCountTable {
            m,
            rows,
            zero: BigUint::zero(),
        };
        table.verify_row_sums()?;
        if max_n >= 1 && table.row(1) != MahonianTable::build(m).row(m) {
            return Err(Error::Checksum("first row differs from Mahonian row".into()));
        }
        Ok(table)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_cache(f)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = std::io::BufReader::new(std::fs::File::open(path)?);
        Self::read_cache(f)
    }
}

/// The pair of tables the sampler needs for elections of shape `m x n`.
#[derive(Debug, Clone)]
pub struct SamplingTables {
    pub mahonian: MahonianTable,
    pub elections: ElectionCountTable,
}

impl SamplingTables {
    pub fn new(m: usize, max_n: usize) -> Self {
        let mahonian = MahonianTable::build(m);
        let elections = ElectionCountTable::build(&mahonian, m, max_n).expect("m covered");
        SamplingTables {
            mahonian,
            elections,
        }
    }

    /// Reuses a previously cached election table.
    pub fn from_cache(elections: ElectionCountTable) -> Self {
        let mahonian = MahonianTable::build(elections.m());
        SamplingTables {
            mahonian,
            elections,
        }
    }

    pub fn m(&self) -> usize {
        self.elections.m()
    }

    pub fn max_n(&self) -> usize {
        self.elections.max_n()
    }

    pub fn covers(&self, m: usize, n: usize) -> Result<()> {
        if m == self.m() && n <= self.max_n() {
            Ok(())
        } else {
            Err(Error::TableTooSmall {
                what: format!(
                    "shape {m}x{n} (tables built for m = {}, n <= {})",
                    self.m(),
                    self.max_n()
                ),
            })
        }
    }
}
