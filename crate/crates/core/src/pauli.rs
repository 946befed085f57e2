//! Pauli strings and sparse real combinations of them.
//!
//! A string on `n` qubits is stored as a pair of bit masks `(x, z)`; qubit `q`
//! is bit `q`. Per qubit `(0,0)=I`, `(1,0)=X`, `(0,1)=Z`, `(1,1)=Y`, so that
//! `P = i^{|x&z|} X^x Z^z`. In text labels the leftmost character is qubit 0.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Masks are `u64`, so at most this many qubits can be addressed.
pub const MAX_QUBITS: usize = 64;

/// Coefficients with magnitude below this are dropped after every operation.
pub const PRUNE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PauliTerm {
    n: u32,
    x: u64,
    z: u64,
}

fn mask_for(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Powers of `i` indexed by exponent mod 4.
pub fn i_pow(e: u32) -> Complex64 {
    match e % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl PauliTerm {
    pub fn new(n: usize, x: u64, z: u64) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits { n, limit: MAX_QUBITS });
        }
        let m = mask_for(n);
        if x & !m != 0 || z & !m != 0 {
            return Err(Error::Invalid(format!("mask exceeds {n} qubits")));
        }
        Ok(PauliTerm { n: n as u32, x, z })
    }

    pub fn identity(n: usize) -> Self {
        PauliTerm { n: n as u32, x: 0, z: 0 }
    }

    /// Single-qubit operator `op` (one of `I X Y Z`) on qubit `q`.
    pub fn single(n: usize, q: usize, op: char) -> Result<Self> {
        if q >= n {
            return Err(Error::Invalid(format!("qubit {q} out of range for n={n}")));
        }
        let b = 1u64 << q;
        let (x, z) = match op {
            'I' => (0, 0),
            'X' => (b, 0),
            'Y' => (b, b),
            'Z' => (0, b),
            _ => return Err(Error::Parse(format!("unknown Pauli letter '{op}'"))),
        };
        PauliTerm::new(n, x, z)
    }

    pub fn parse(label: &str) -> Result<Self> {
        let label = label.trim();
        let n = label.chars().count();
        if n == 0 {
            return Err(Error::Parse("empty Pauli label".into()));
        }
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits { n, limit: MAX_QUBITS });
        }
        let (mut x, mut z) = (0u64, 0u64);
        for (q, c) in label.chars().enumerate() {
            let b = 1u64 << q;
            match c.to_ascii_uppercase() {
                'I' => {}
                'X' => x |= b,
                'Y' => {
                    x |= b;
                    z |= b
                }
                'Z' => z |= b,
                _ => return Err(Error::Parse(format!("bad character '{c}' in Pauli label '{label}'"))),
            }
        }
        PauliTerm::new(n, x, z)
    }

    pub fn n_qubits(&self) -> usize {
        self.n as usize
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    pub fn label(&self) -> String {
        (0..self.n)
            .map(|q| {
                let b = 1u64 << q;
                match (self.x & b != 0, self.z & b != 0) {
                    (false, false) => 'I',
                    (true, false) => 'X',
                    (true, true) => 'Y',
                    (false, true) => 'Z',
                }
            })
            .collect()
    }

    pub fn commutes_with(&self, other: &PauliTerm) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// `self * other = i^e * r`; returns `(e mod 4, r)`.
    pub fn product(&self, other: &PauliTerm) -> Result<(u32, PauliTerm)> {
        if self.n != other.n {
            return Err(Error::QubitMismatch { left: self.n as usize, right: other.n as usize });
        }
        let r = PauliTerm { n: self.n, x: self.x ^ other.x, z: self.z ^ other.z };
        let e = self.y_count() + other.y_count() + 2 * (self.z & other.x).count_ones() + 4 * 64
            - r.y_count();
        Ok((e % 4, r))
    }

    /// `P|b> = i^e |b'>`; returns `(e mod 4, b')`.
    pub fn apply_basis(&self, b: u64) -> (u32, u64) {
        let e = self.y_count() + 2 * (self.z & b).count_ones();
        (e % 4, b ^ self.x)
    }

    /// Phase exponent of `<b|P|b>` when `x == 0`, else `None`.
    pub fn diagonal_sign(&self, b: u64) -> Option<f64> {
        if self.x != 0 {
            return None;
        }
        Some(if (self.z & b).count_ones() % 2 == 0 { 1.0 } else { -1.0 })
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Real combination `sum_P c_P (i P)`, an element of `u(2^n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewElement {
    n: usize,
    terms: BTreeMap<(u64, u64), f64>,
}

/// Real combination `sum_P c_P P`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianObservable {
    n: usize,
    terms: BTreeMap<(u64, u64), f64>,
}

fn insert_term(map: &mut BTreeMap<(u64, u64), f64>, key: (u64, u64), c: f64) {
    let e = map.entry(key).or_insert(0.0);
    *e += c;
    if e.abs() < PRUNE_TOL {
        map.remove(&key);
    }
}

fn build_map(n: usize, terms: impl IntoIterator<Item = (f64, PauliTerm)>) -> Result<BTreeMap<(u64, u64), f64>> {
    if n > MAX_QUBITS {
        return Err(Error::TooManyQubits { n, limit: MAX_QUBITS });
    }
    let mut map = BTreeMap::new();
    for (c, p) in terms {
        if p.n_qubits() != n {
            return Err(Error::QubitMismatch { left: n, right: p.n_qubits() });
        }
        if !c.is_finite() {
            return Err(Error::Invalid("non-finite coefficient".into()));
        }
        insert_term(&mut map, (p.x, p.z), c);
    }
    Ok(map)
}

macro_rules! pauli_sum_common {
    ($t:ty) => {
        impl $t {
            pub fn zero(n: usize) -> Self {
                Self { n, terms: BTreeMap::new() }
            }

            pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (f64, PauliTerm)>) -> Result<Self> {
                Ok(Self { n, terms: build_map(n, terms)? })
            }

            pub fn from_labels(terms: &[(f64, &str)]) -> Result<Self> {
                let parsed = terms
                    .iter()
                    .map(|(c, l)| Ok((*c, PauliTerm::parse(l)?)))
                    .collect::<Result<Vec<_>>>()?;
                let n = parsed.first().map(|(_, p)| p.n_qubits()).ok_or_else(|| Error::Invalid("no terms".into()))?;
                Self::from_terms(n, parsed)
            }

            pub fn n_qubits(&self) -> usize {
                self.n
            }

            pub fn len(&self) -> usize {
                self.terms.len()
            }

            pub fn is_empty(&self) -> bool {
                self.terms.is_empty()
            }

            pub fn coeff(&self, p: &PauliTerm) -> f64 {
                self.terms.get(&(p.x, p.z)).copied().unwrap_or(0.0)
            }

            pub fn iter(&self) -> impl Iterator<Item = (PauliTerm, f64)> + '_ {
                let n = self.n as u32;
                self.terms.iter().map(move |(&(x, z), &c)| (PauliTerm { n, x, z }, c))
            }

            pub fn scaled(&self, s: f64) -> Self {
                let mut out = Self::zero(self.n);
                for (&k, &c) in &self.terms {
                    insert_term(&mut out.terms, k, c * s);
                }
                out
            }

            /// `self += a * other`.
            pub fn axpy(&mut self, a: f64, other: &Self) -> Result<()> {
                if self.n != other.n {
                    return Err(Error::QubitMismatch { left: self.n, right: other.n });
                }
                for (&k, &c) in &other.terms {
                    insert_term(&mut self.terms, k, a * c);
                }
                Ok(())
            }

            /// `2^n sum_P a_P b_P`.
            pub fn inner(&self, other: &Self) -> Result<f64> {
                if self.n != other.n {
                    return Err(Error::QubitMismatch { left: self.n, right: other.n });
                }
                let (small, big) = if self.terms.len() <= other.terms.len() { (self, other) } else { (other, self) };
                let s: f64 = small.terms.iter().map(|(k, c)| c * big.terms.get(k).copied().unwrap_or(0.0)).sum();
                Ok(s * 2f64.powi(self.n as i32))
            }

            pub fn frobenius_sq(&self) -> f64 {
                self.terms.values().map(|c| c * c).sum::<f64>() * 2f64.powi(self.n as i32)
            }

            pub fn to_dense(&self) -> Result<nalgebra::DMatrix<Complex64>> {
                let mut m = crate::dense::zeros_for_qubits(self.n)?;
                for (p, c) in self.iter() {
                    crate::dense::add_pauli(&mut m, &p, Complex64::new(c, 0.0) * Self::UNIT);
                }
                Ok(m)
            }
        }
    };
}

pauli_sum_common!(SkewElement);
pauli_sum_common!(HermitianObservable);

impl SkewElement {
    const UNIT: Complex64 = Complex64 { re: 0.0, im: 1.0 };

    /// `[self, other]` using `[iP, iQ] = -2 i^e R` for anticommuting `P, Q`.
    pub fn bracket(&self, other: &SkewElement) -> Result<SkewElement> {
        if self.n != other.n {
            return Err(Error::QubitMismatch { left: self.n, right: other.n });
        }
        let mut out = SkewElement::zero(self.n);
        for (p, a) in self.iter() {
            for (q, b) in other.iter() {
                if p.commutes_with(&q) {
                    continue;
                }
                let (e, r) = p.product(&q)?;
                // e is odd here; -2 i^e R = -2 i^{e-1} (iR)
                let s = if e == 1 { 1.0 } else { -1.0 };
                insert_term(&mut out.terms, (r.x, r.z), -2.0 * a * b * s);
            }
        }
        Ok(out)
    }

    /// The Hermitian operator `-i * self`.
    pub fn to_hermitian(&self) -> HermitianObservable {
        HermitianObservable { n: self.n, terms: self.terms.clone() }
    }

    /// `<psi| (-i self) |psi>`, which equals the coordinate `<self, i rho>`
    /// for `rho = |psi><psi|`.
    pub fn hermitian_expectation(&self, psi: &[Complex64]) -> Result<f64> {
        self.to_hermitian().expectation(psi)
    }
}

impl HermitianObservable {
    const UNIT: Complex64 = Complex64 { re: 1.0, im: 0.0 };

    /// The skew-Hermitian operator `i * self`.
    pub fn to_skew(&self) -> SkewElement {
        SkewElement { n: self.n, terms: self.terms.clone() }
    }

    /// `out += self |psi>` on the full `2^n` space.
    pub fn apply_add(&self, psi: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        let dim = 1usize.checked_shl(self.n as u32).unwrap_or(0);
        if psi.len() != dim || out.len() != dim {
            return Err(Error::Dimension(format!("state length {} for {} qubits", psi.len(), self.n)));
        }
        for (p, c) in self.iter() {
            for (b, amp) in psi.iter().enumerate() {
                let (e, b2) = p.apply_basis(b as u64);
                out[b2 as usize] += amp * i_pow(e) * c;
            }
        }
        Ok(())
    }

    pub fn expectation(&self, psi: &[Complex64]) -> Result<f64> {
        let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
        self.apply_add(psi, &mut out)?;
        Ok(psi.iter().zip(&out).map(|(a, b)| (a.conj() * b).re).sum())
    }
}

/// An operator read from the text format.
#[derive(Clone, Debug, PartialEq)]
pub enum Operator {
    Skew(SkewElement),
    Hermitian(HermitianObservable),
}

impl Operator {
    /// The skew-Hermitian form: `iO` for Hermitian input, unchanged otherwise.
    pub fn skew(&self) -> SkewElement {
        match self {
            Operator::Skew(s) => s.clone(),
            Operator::Hermitian(h) => h.to_skew(),
        }
    }

    pub fn hermitian(&self) -> HermitianObservable {
        match self {
            Operator::Skew(s) => s.to_hermitian(),
            Operator::Hermitian(h) => h.clone(),
        }
    }
}

/// Parses one or more operators. Each operator starts with a header line
/// `skew` or `hermitian`, followed by `<coef> <label>` lines. Blank lines
/// and lines starting with `#` are ignored.
pub fn parse_operators(text: &str) -> Result<Vec<Operator>> {
    let mut out: Vec<(bool, Vec<(f64, PauliTerm)>)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line.to_ascii_lowercase().as_str() {
            "skew" => {
                out.push((true, Vec::new()));
                continue;
            }
            "hermitian" => {
                out.push((false, Vec::new()));
                continue;
            }
            _ => {}
        }
        let cur = out
            .last_mut()
            .ok_or_else(|| Error::Parse(format!("line {}: term before 'skew'/'hermitian' header", lineno + 1)))?;
        let mut parts = line.split_whitespace();
        let (c, l) = match (parts.next(), parts.next(), parts.next()) {
            (Some(c), Some(l), None) => (c, l),
            _ => return Err(Error::Parse(format!("line {}: expected '<coef> <pauli>'", lineno + 1))),
        };
        let c: f64 = c.parse().map_err(|_| Error::Parse(format!("line {}: bad coefficient '{c}'", lineno + 1)))?;
        let p = PauliTerm::parse(l).map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
        cur.1.push((c, p));
    }
    out.into_iter()
        .map(|(skew, terms)| {
            let n = terms.first().map(|(_, p)| p.n_qubits()).ok_or_else(|| Error::Parse("operator with no terms".into()))?;
            if skew {
                Ok(Operator::Skew(SkewElement::from_terms(n, terms).map_err(|e| Error::Parse(e.to_string()))?))
            } else {
                Ok(Operator::Hermitian(HermitianObservable::from_terms(n, terms).map_err(|e| Error::Parse(e.to_string()))?))
            }
        })
        .collect()
}

pub fn format_operator(op: &Operator) -> String {
    let (header, items): (&str, Vec<(PauliTerm, f64)>) = match op {
        Operator::Skew(s) => ("skew", s.iter().collect()),
        Operator::Hermitian(h) => ("hermitian", h.iter().collect()),
    };
    let mut s = String::from(header);
    s.push('\n');
    for (p, c) in items {
        s.push_str(&format!("{c:?} {}\n", p.label()));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_roundtrip() {
        for l in ["XIZY", "I", "ZZZZZZ", "YX"] {
            assert_eq!(PauliTerm::parse(l).unwrap().label(), l);
        }
        assert!(PauliTerm::parse("XQ").is_err());
    }

    #[test]
    fn single_qubit_products() {
        let x = PauliTerm::parse("X").unwrap();
        let y = PauliTerm::parse("Y").unwrap();
        let z = PauliTerm::parse("Z").unwrap();
        // XY = iZ, YZ = iX, ZX = iY, XZ = -iY
        assert_eq!(x.product(&y).unwrap(), (1, z));
        assert_eq!(y.product(&z).unwrap(), (1, x));
        assert_eq!(z.product(&x).unwrap(), (1, y));
        assert_eq!(x.product(&z).unwrap(), (3, y));
    }

    #[test]
    fn bracket_ix_iz() {
        let a = SkewElement::from_labels(&[(1.0, "XI")]).unwrap();
        let b = SkewElement::from_labels(&[(1.0, "ZI")]).unwrap();
        let c = a.bracket(&b).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.coeff(&PauliTerm::parse("YI").unwrap()), 2.0);
    }

    #[test]
    fn inner_has_dimension_factor() {
        let a = SkewElement::from_labels(&[(0.5, "XY"), (1.0, "ZZ")]).unwrap();
        assert!((a.frobenius_sq() - 4.0 * 1.25).abs() < 1e-14);
    }

    #[test]
    fn text_format_roundtrip() {
        let text = "# comment\nhermitian\n-0.25 ZIII\n0.25 IZII\nskew\n1 XX\n";
        let ops = parse_operators(text).unwrap();
        assert_eq!(ops.len(), 2);
        let again: String = ops.iter().map(format_operator).collect();
        assert_eq!(parse_operators(&again).unwrap(), ops);
        assert!(parse_operators("1 XX\n").is_err());
        assert!(parse_operators("skew\n1 XX\n1 XXX\n").is_err());
    }
}
