//! Diagonal observables, sector labels and good-set predicates.
//!
//! Everything here is a pure function of the bitstring `z`, with bit `k` of
//! the integer index holding the outcome of qubit `k`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Widest register a mask can describe.
pub const MAX_MASK_QUBITS: usize = 64;

#[inline]
fn parity(x: u64) -> u32 {
    x.count_ones() & 1
}

fn mask_of(qubits: &[usize], what: &str) -> Result<u64> {
    let mut mask = 0u64;
    for &q in qubits {
        if q >= MAX_MASK_QUBITS {
            return Err(Error::validation(format!("{what}: qubit {q} out of range")));
        }
        if mask & (1 << q) != 0 {
            return Err(Error::validation(format!("{what}: qubit {q} listed twice")));
        }
        mask |= 1 << q;
    }
    Ok(mask)
}

fn check_mask_fits(mask: u64, num_qubits: usize, what: &str) -> Result<()> {
    if num_qubits < MAX_MASK_QUBITS && mask >> num_qubits != 0 {
        let q = 63 - mask.leading_zeros() as usize;
        return Err(Error::validation(format!(
            "{what}: qubit {q} outside a {num_qubits}-qubit register"
        )));
    }
    Ok(())
}

pub(crate) fn qubits_of(mask: u64) -> Vec<usize> {
    (0..MAX_MASK_QUBITS).filter(|q| mask >> q & 1 == 1).collect()
}

/// A weighted tensor product of Pauli-Z operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZString {
    mask: u64,
    coefficient: f64,
}

impl ZString {
    pub fn new(support: &[usize], coefficient: f64) -> Result<Self> {
        if !coefficient.is_finite() {
            return Err(Error::validation("Z-string coefficient must be finite"));
        }
        Ok(Self {
            mask: mask_of(support, "Z-string support")?,
            coefficient,
        })
    }

    pub fn from_mask(mask: u64, coefficient: f64) -> Self {
        Self { mask, coefficient }
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn support(&self) -> Vec<usize> {
        qubits_of(self.mask)
    }

    pub fn is_identity(&self) -> bool {
        self.mask == 0
    }

    /// `coefficient * (-1)^{popcount(z & support)}`.
    #[inline]
    pub fn eval(&self, z: usize) -> f64 {
        if parity(z as u64 & self.mask) == 0 {
            self.coefficient
        } else {
            -self.coefficient
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ZStringSpec {
    pub support: Vec<usize>,
    #[serde(default = "one")]
    pub coefficient: f64,
}

fn one() -> f64 {
    1.0
}

/// Serialized form of a [`DiagonalObservable`]. `num_qubits` may be left out
/// when the register size comes from elsewhere (e.g. a qubit-count sweep).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ObservableSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num_qubits: Option<usize>,
    pub terms: Vec<ZStringSpec>,
}

impl ObservableSpec {
    pub fn build(&self, num_qubits: usize) -> Result<DiagonalObservable> {
        if let Some(declared) = self.num_qubits {
            if declared != num_qubits {
                return Err(Error::validation(format!(
                    "observable arity {declared} does not match register size {num_qubits}"
                )));
            }
        }
        let terms = self
            .terms
            .iter()
            .map(|t| ZString::new(&t.support, t.coefficient))
            .collect::<Result<Vec<_>>>()?;
        DiagonalObservable::new(num_qubits, terms)
    }
}

/// Sum of Z-strings; diagonal in the computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalObservable {
    num_qubits: usize,
    terms: Vec<ZString>,
}

impl DiagonalObservable {
    pub fn new(num_qubits: usize, terms: Vec<ZString>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::validation("observable needs at least one term"));
        }
        for t in &terms {
            check_mask_fits(t.mask, num_qubits, "observable support")?;
        }
        Ok(Self { num_qubits, terms })
    }

    /// Unit-coefficient product of `Z_q` over `support`.
    pub fn z_string(num_qubits: usize, support: &[usize]) -> Result<Self> {
        Self::new(num_qubits, vec![ZString::new(support, 1.0)?])
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn terms(&self) -> &[ZString] {
        &self.terms
    }

    /// Profile value `a_z = <z|A|z>`.
    #[inline]
    pub fn eval_profile(&self, z: usize) -> f64 {
        self.terms.iter().map(|t| t.eval(z)).sum()
    }

    /// `a_z` for every basis index in integer order.
    pub fn profile_table(&self) -> Vec<f64> {
        (0..1usize << self.num_qubits)
            .map(|z| self.eval_profile(z))
            .collect()
    }

    /// Upper bound on `|a_z|`.
    pub fn max_abs_profile(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient.abs()).sum()
    }

    /// The product `A * Z_S` where `Z_S` is the Z-string on `mask`.
    pub fn times_z_mask(&self, mask: u64) -> Self {
        Self {
            num_qubits: self.num_qubits,
            terms: self
                .terms
                .iter()
                .map(|t| ZString::from_mask(t.mask ^ mask, t.coefficient))
                .collect(),
        }
    }

    pub fn has_identity_term(&self) -> bool {
        self.terms.iter().any(ZString::is_identity)
    }

    pub fn to_spec(&self) -> ObservableSpec {
        ObservableSpec {
            num_qubits: Some(self.num_qubits),
            terms: self
                .terms
                .iter()
                .map(|t| ZStringSpec {
                    support: t.support(),
                    coefficient: t.coefficient,
                })
                .collect(),
        }
    }
}

/// Sector label: `Up` is label 0, `Down` is label 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sector {
    Up,
    Down,
}

impl Sector {
    pub fn label(self) -> u8 {
        match self {
            Sector::Up => 0,
            Sector::Down => 1,
        }
    }
}

/// Two-way partition of the computational basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectorRule {
    SingleQubit(usize),
    ParitySubset(Vec<usize>),
}

impl SectorRule {
    /// Qubits whose parity decides the label.
    pub fn mask(&self) -> u64 {
        match self {
            SectorRule::SingleQubit(k) if *k < MAX_MASK_QUBITS => 1 << k,
            SectorRule::SingleQubit(_) => 0,
            SectorRule::ParitySubset(s) => s
                .iter()
                .filter(|&&q| q < MAX_MASK_QUBITS)
                .fold(0, |m, &q| m | 1 << q),
        }
    }

    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        match self {
            SectorRule::SingleQubit(k) => {
                if *k >= num_qubits {
                    return Err(Error::validation(format!(
                        "sector qubit {k} outside a {num_qubits}-qubit register"
                    )));
                }
            }
            SectorRule::ParitySubset(s) => {
                if s.is_empty() {
                    return Err(Error::validation("parity sector subset is empty"));
                }
                let mask = mask_of(s, "parity sector subset")?;
                check_mask_fits(mask, num_qubits, "parity sector subset")?;
            }
        }
        Ok(())
    }

    #[inline]
    pub fn sector_of(&self, z: usize) -> Sector {
        sector_of_mask(self.mask(), z)
    }
}

#[inline]
pub(crate) fn sector_of_mask(mask: u64, z: usize) -> Sector {
    if parity(z as u64 & mask) == 0 {
        Sector::Up
    } else {
        Sector::Down
    }
}

/// Serialized good-set rule. Bits are `(qubit, required_bit)` pairs and
/// intervals are inclusive `[lo, hi]` ranges of basis indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PredicateSpec {
    BitConstraint {
        num_qubits: usize,
        bits: Vec<(usize, u8)>,
    },
    Parity {
        num_qubits: usize,
        qubits: Vec<usize>,
        parity: u8,
    },
    SectorParity {
        num_qubits: usize,
        bits: Vec<(usize, u8)>,
        qubits: Vec<usize>,
        parity: u8,
    },
    IntervalUnion {
        num_qubits: usize,
        intervals: Vec<(u64, u64)>,
    },
}

impl PredicateSpec {
    pub fn num_qubits(&self) -> usize {
        match self {
            PredicateSpec::BitConstraint { num_qubits, .. }
            | PredicateSpec::Parity { num_qubits, .. }
            | PredicateSpec::SectorParity { num_qubits, .. }
            | PredicateSpec::IntervalUnion { num_qubits, .. } => *num_qubits,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Rule {
    Bits {
        care: u64,
        value: u64,
    },
    Parity {
        mask: u64,
        parity: u32,
    },
    BitsAndParity {
        care: u64,
        value: u64,
        mask: u64,
        parity: u32,
    },
    Intervals(Vec<(u64, u64)>),
}

/// Compiled good-set membership test `chi_G(z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PredicateSpec", into = "PredicateSpec")]
pub struct Predicate {
    spec: PredicateSpec,
    rule: Rule,
}

fn compile_bits(bits: &[(usize, u8)], n: usize) -> Result<(u64, u64)> {
    let mut care = 0u64;
    let mut value = 0u64;
    for &(q, b) in bits {
        if q >= n {
            return Err(Error::validation(format!(
                "bit constraint on qubit {q} outside a {n}-qubit register"
            )));
        }
        if b > 1 {
            return Err(Error::validation(format!("required bit {b} is not 0 or 1")));
        }
        if care >> q & 1 == 1 {
            return Err(Error::validation(format!("qubit {q} constrained twice")));
        }
        care |= 1 << q;
        value |= (b as u64) << q;
    }
    Ok((care, value))
}

fn compile_parity(qubits: &[usize], p: u8, n: usize) -> Result<(u64, u32)> {
    if qubits.is_empty() {
        return Err(Error::validation("parity rule needs a non-empty qubit subset"));
    }
    if p > 1 {
        return Err(Error::validation(format!("required parity {p} is not 0 or 1")));
    }
    let mask = mask_of(qubits, "parity subset")?;
    check_mask_fits(mask, n, "parity subset")?;
    Ok((mask, p as u32))
}

impl TryFrom<PredicateSpec> for Predicate {
    type Error = Error;

    fn try_from(spec: PredicateSpec) -> Result<Self> {
        let n = spec.num_qubits();
        if n == 0 || n >= MAX_MASK_QUBITS {
            return Err(Error::validation(format!("predicate arity {n} unsupported")));
        }
        let rule = match &spec {
            PredicateSpec::BitConstraint { bits, .. } => {
                let (care, value) = compile_bits(bits, n)?;
                Rule::Bits { care, value }
            }
            PredicateSpec::Parity { qubits, parity, .. } => {
                let (mask, parity) = compile_parity(qubits, *parity, n)?;
                Rule::Parity { mask, parity }
            }
            PredicateSpec::SectorParity {
                bits, qubits, parity, ..
            } => {
                let (care, value) = compile_bits(bits, n)?;
                let (mask, parity) = compile_parity(qubits, *parity, n)?;
                Rule::BitsAndParity {
                    care,
                    value,
                    mask,
                    parity,
                }
            }
            PredicateSpec::IntervalUnion { intervals, .. } => {
                let dim = 1u64 << n;
                let mut prev_hi: Option<u64> = None;
                for &(lo, hi) in intervals {
                    if lo > hi || hi >= dim {
                        return Err(Error::validation(format!(
                            "interval [{lo}, {hi}] invalid for a {n}-qubit register"
                        )));
                    }
                    if prev_hi.is_some_and(|p| lo <= p) {
                        return Err(Error::validation("intervals must be sorted and disjoint"));
                    }
                    prev_hi = Some(hi);
                }
                Rule::Intervals(intervals.clone())
            }
        };
        Ok(Self { spec, rule })
    }
}

impl From<Predicate> for PredicateSpec {
    fn from(p: Predicate) -> Self {
        p.spec
    }
}

impl Predicate {
    pub fn num_qubits(&self) -> usize {
        self.spec.num_qubits()
    }

    pub fn spec(&self) -> &PredicateSpec {
        &self.spec
    }

    #[inline]
    pub fn contains(&self, z: usize) -> bool {
        let z = z as u64;
        match &self.rule {
            Rule::Bits { care, value } => z & care == *value,
            Rule::Parity { mask, parity: p } => parity(z & mask) == *p,
            Rule::BitsAndParity {
                care,
                value,
                mask,
                parity: p,
            } => z & care == *value && parity(z & mask) == *p,
            Rule::Intervals(iv) => {
                let idx = iv.partition_point(|&(lo, _)| lo <= z);
                idx > 0 && iv[idx - 1].1 >= z
            }
        }
    }

    /// Exact `|G|`, from the rule's closed form.
    pub fn good_set_size(&self) -> u64 {
        let n = self.num_qubits() as u32;
        match &self.rule {
            Rule::Bits { care, .. } => 1 << (n - care.count_ones()),
            Rule::Parity { .. } => 1 << (n - 1),
            Rule::BitsAndParity {
                care,
                value,
                mask,
                parity: p,
            } => {
                let c = care.count_ones();
                if mask & !care != 0 {
                    // a free qubit in the parity subset splits the rest evenly
                    1 << (n - c - 1)
                } else if parity(value & mask) == *p {
                    1 << (n - c)
                } else {
                    0
                }
            }
            Rule::Intervals(iv) => iv.iter().map(|(lo, hi)| hi - lo + 1).sum(),
        }
    }

    /// `f = |G| / 2^n`.
    pub fn good_set_fraction(&self) -> f64 {
        self.good_set_size() as f64 / (1u64 << self.num_qubits()) as f64
    }
}

/// Heuristic good-set fraction for a `T`-iteration design, `sin^2(pi/(4T+2))`.
pub fn f_target(iterations: u32) -> Result<f64> {
    if iterations == 0 {
        return Err(Error::Domain("f_target needs at least one iteration".into()));
    }
    let angle = std::f64::consts::PI / (4.0 * iterations as f64 + 2.0);
    Ok(angle.sin().powi(2))
}

/// Ideal good-set mass after `T` rounds: `sin^2((2T+1) asin(sqrt f))`.
pub fn p_g_ideal(iterations: u32, fraction: f64) -> Result<f64> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::Domain(format!(
            "good-set fraction {fraction} outside (0, 1)"
        )));
    }
    let theta = fraction.sqrt().asin();
    Ok(((2.0 * iterations as f64 + 1.0) * theta).sin().powi(2))
}
