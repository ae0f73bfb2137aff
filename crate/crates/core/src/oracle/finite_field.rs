//! Finite fields `F_p` and `F_{p^k}` with dense univariate polynomials, and
//! distinct-root counting in the algebraic closure.

use super::OracleError;

/// Primality by trial division, sized for oracle use.
pub(crate) fn trial_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Largest prime accepted by the oracles; keeps products inside `u128`
/// and primality checks instant.
pub const MAX_ORACLE_PRIME: u64 = 1 << 31;

/// Field element: coefficients (low degree first) of a residue modulo the
/// defining polynomial; length 1 for prime fields.
pub type Elem = Vec<u64>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteField {
    p: u64,
    /// Monic defining polynomial of degree `k`, low degree first.
    modulus: Vec<u64>,
}

impl FiniteField {
    pub fn prime(p: u64) -> Result<Self, OracleError> {
        if p > MAX_ORACLE_PRIME || !trial_prime(p) {
            return Err(OracleError::NotPrime(p));
        }
        Ok(FiniteField { p, modulus: vec![0, 1] })
    }

    /// `F_p[t] / (modulus)`; the modulus must be monic and irreducible.
    pub fn extension(p: u64, modulus: Vec<u64>) -> Result<Self, OracleError> {
        let base = FiniteField::prime(p)?;
        if modulus.len() < 2 || *modulus.last().expect("non-empty") != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(OracleError::BadModulus("modulus must be monic of degree >= 1 with reduced coefficients".into()));
        }
        let k = modulus.len() - 1;
        let half = k / 2;
        if (p as f64).powi(half as i32) > 1e6 {
            return Err(OracleError::CapExceeded(format!("irreducibility check for degree {k} over F_{p}")));
        }
        let m: Vec<Elem> = modulus.iter().map(|&c| vec![c]).collect();
        // any factorisation has a monic factor of degree <= k/2
        for deg in 1..=half {
            let count = p.pow(deg as u32);
            for idx in 0..count {
                let mut cand: Vec<Elem> = Vec::with_capacity(deg + 1);
                let mut v = idx;
                for _ in 0..deg {
                    cand.push(vec![v % p]);
                    v /= p;
                }
                cand.push(vec![1]);
                let (_, r) = base.poly_divrem(&m, &cand);
                if r.is_empty() {
                    return Err(OracleError::BadModulus(format!("modulus has a factor of degree {deg}")));
                }
            }
        }
        Ok(FiniteField { p, modulus })
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn order(&self) -> u128 {
        (self.p as u128).pow(self.degree() as u32)
    }

    pub fn zero(&self) -> Elem {
        vec![0; self.degree()]
    }

    pub fn one(&self) -> Elem {
        self.from_u64(1)
    }

    pub fn from_u64(&self, x: u64) -> Elem {
        let mut e = self.zero();
        e[0] = x % self.p;
        e
    }

    pub fn from_i64(&self, x: i64) -> Elem {
        self.from_u64(x.rem_euclid(self.p as i64) as u64)
    }

    /// The element with the given base-`p` digits as coordinates.
    pub fn from_index(&self, mut idx: u128) -> Elem {
        let mut e = self.zero();
        for c in e.iter_mut() {
            *c = (idx % self.p as u128) as u64;
            idx /= self.p as u128;
        }
        e
    }

    pub fn is_zero(&self, a: &[u64]) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Elem {
        a.iter().zip(b).map(|(&x, &y)| (x + y) % self.p).collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> Elem {
        a.iter().zip(b).map(|(&x, &y)| (x + self.p - y) % self.p).collect()
    }

    pub fn neg(&self, a: &[u64]) -> Elem {
        a.iter().map(|&x| (self.p - x) % self.p).collect()
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Elem {
        let k = self.degree();
        let p = self.p as u128;
        let mut prod = vec![0u128; 2 * k - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u128 * y as u128) % p;
            }
        }
        for top in (k..prod.len()).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            // t^k = -(m_0 + ... + m_{k-1} t^{k-1})
            for (i, &m) in self.modulus[..k].iter().enumerate() {
                let idx = top - k + i;
                prod[idx] = (prod[idx] + (p - m as u128) * c) % p;
            }
            prod[top] = 0;
        }
        prod[..k].iter().map(|&c| c as u64).collect()
    }

    pub fn pow(&self, a: &[u64], mut e: u128) -> Elem {
        let mut acc = self.one();
        let mut base = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &[u64]) -> Option<Elem> {
        if self.is_zero(a) {
            None
        } else {
            Some(self.pow(a, self.order() - 2))
        }
    }

    /// The unique `b` with `b^p = a` (Frobenius is bijective).
    pub fn pth_root(&self, a: &[u64]) -> Elem {
        self.pow(a, self.order() / self.p as u128)
    }

    fn trim(&self, f: &mut Vec<Elem>) {
        while f.last().is_some_and(|c| self.is_zero(c)) {
            f.pop();
        }
    }

    /// Quotient and remainder; `g` must be non-zero.
    pub fn poly_divrem(&self, f: &[Elem], g: &[Elem]) -> (Vec<Elem>, Vec<Elem>) {
        let mut g = g.to_vec();
        self.trim(&mut g);
        assert!(!g.is_empty(), "division by the zero polynomial");
        let mut r = f.to_vec();
        self.trim(&mut r);
        if r.len() < g.len() {
            return (Vec::new(), r);
        }
        let lead_inv = self.inv(g.last().expect("non-empty")).expect("non-zero lead");
        let mut q = vec![self.zero(); r.len() - g.len() + 1];
        while r.len() >= g.len() {
            let shift = r.len() - g.len();
            let c = self.mul(r.last().expect("non-empty"), &lead_inv);
            for (i, gi) in g.iter().enumerate() {
                r[shift + i] = self.sub(&r[shift + i], &self.mul(&c, gi));
            }
            q[shift] = c;
            self.trim(&mut r);
        }
        self.trim(&mut q);
        (q, r)
    }

    /// Monic greatest common divisor.
    pub fn poly_gcd(&self, f: &[Elem], g: &[Elem]) -> Vec<Elem> {
        let mut a = f.to_vec();
        let mut b = g.to_vec();
        self.trim(&mut a);
        self.trim(&mut b);
        while !b.is_empty() {
            let (_, r) = self.poly_divrem(&a, &b);
            a = b;
            b = r;
        }
        if let Some(lead) = a.last() {
            let inv = self.inv(lead).expect("non-zero lead");
            a = a.iter().map(|c| self.mul(c, &inv)).collect();
        }
        a
    }

    pub fn poly_derivative(&self, f: &[Elem]) -> Vec<Elem> {
        let mut d: Vec<Elem> = f
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| self.mul(c, &self.from_u64(i as u64 % self.p)))
            .collect();
        self.trim(&mut d);
        d
    }

    pub fn poly_eval(&self, f: &[Elem], x: &[u64]) -> Elem {
        f.iter().rev().fold(self.zero(), |acc, c| self.add(&self.mul(&acc, x), c))
    }
}

/// A univariate polynomial over a finite field, low degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeFieldPoly {
    field: FiniteField,
    coeffs: Vec<Elem>,
}

impl PrimeFieldPoly {
    pub fn new(field: FiniteField, coeffs: Vec<Elem>) -> Result<Self, OracleError> {
        let k = field.degree();
        if coeffs.iter().any(|c| c.len() != k || c.iter().any(|&x| x >= field.p)) {
            return Err(OracleError::BadModulus("coefficient outside the field".into()));
        }
        let mut coeffs = coeffs;
        field.trim(&mut coeffs);
        Ok(PrimeFieldPoly { field, coeffs })
    }

    /// Prime-field polynomial from integer coefficients (reduced mod `p`).
    pub fn from_i64s(p: u64, coeffs: &[i64]) -> Result<Self, OracleError> {
        let field = FiniteField::prime(p)?;
        let cs = coeffs.iter().map(|&c| field.from_i64(c)).collect();
        PrimeFieldPoly::new(field, cs)
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }
}

/// Number of distinct roots of `f` in the algebraic closure, excluding 0.
pub fn count_distinct_roots_closure(f: &PrimeFieldPoly) -> Result<u64, OracleError> {
    let field = &f.field;
    let Some(val) = f.coeffs.iter().position(|c| !field.is_zero(c)) else {
        return Err(OracleError::ZeroPolynomial);
    };
    Ok(distinct_nonzero_roots(field, &f.coeffs[val..]))
}

/// `f(0) != 0` is assumed.
fn distinct_nonzero_roots(field: &FiniteField, f: &[Elem]) -> u64 {
    if f.len() <= 1 {
        return 0;
    }
    let df = field.poly_derivative(f);
    if df.is_empty() {
        // f(x) = g(x^p) = (g~(x))^p with g~ built from p-th roots
        let p = field.p as usize;
        let root: Vec<Elem> = f.iter().step_by(p).map(|c| field.pth_root(c)).collect();
        return distinct_nonzero_roots(field, &root);
    }
    let g = field.poly_gcd(f, &df);
    let (w, _) = field.poly_divrem(f, &g);
    let mut h = g;
    loop {
        let c = field.poly_gcd(&h, &w);
        if c.len() <= 1 {
            break;
        }
        h = field.poly_divrem(&h, &c).0;
    }
    (w.len() as u64 - 1) + distinct_nonzero_roots(field, &h)
}
