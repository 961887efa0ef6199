//! Minimal arbitrary-precision binary float (260-bit mantissa, ~78 decimal
//! digits) plus dense inverse and Jacobi eigensolver for matrices of dimension
//! <= 16.  Used purely as an oracle; performance is irrelevant.

use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

const PREC: u64 = 260;

#[derive(Clone, Debug)]
pub struct BigFloat {
    mant: BigInt,
    exp: i64,
}

impl BigFloat {
    pub fn zero() -> Self {
        BigFloat {
            mant: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            return Self::zero();
        }
        assert!(x.is_finite());
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant_u, exp) = if biased == 0 {
            (frac, -1074i64)
        } else {
            (frac | (1u64 << 52), biased - 1075)
        };
        BigFloat {
            mant: BigInt::from(sign) * BigInt::from(mant_u),
            exp,
        }
        .normalized()
    }

    pub fn from_i64(x: i64) -> Self {
        BigFloat {
            mant: BigInt::from(x),
            exp: 0,
        }
        .normalized()
    }

    fn normalized(mut self) -> Self {
        if self.mant.is_zero() {
            self.exp = 0;
            return self;
        }
        let bits = self.mant.bits();
        if bits > PREC {
            let shift = (bits - PREC) as i64;
            self.mant >>= shift as u64;
            self.exp += shift;
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn neg(&self) -> Self {
        BigFloat {
            mant: -self.mant.clone(),
            exp: self.exp,
        }
    }

    pub fn abs(&self) -> Self {
        BigFloat {
            mant: self.mant.abs(),
            exp: self.exp,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let (hi, lo) = if self.exp >= other.exp {
            (self, other)
        } else {
            (other, self)
        };
        let shift = hi.exp - lo.exp;
        if shift as u64 > PREC + 64 {
            return hi.clone();
        }
        BigFloat {
            mant: (&hi.mant << shift as u64) + &lo.mant,
            exp: lo.exp,
        }
        .normalized()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        BigFloat {
            mant: &self.mant * &other.mant,
            exp: self.exp + other.exp,
        }
        .normalized()
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::Domain("bigfloat division by zero".into()));
        }
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let num = &self.mant << (2 * PREC);
        Ok(BigFloat {
            mant: num / &other.mant,
            exp: self.exp - other.exp - 2 * PREC as i64,
        }
        .normalized())
    }

    pub fn sqrt(&self) -> Result<Self> {
        if self.mant.is_negative() {
            return Err(Error::Domain("bigfloat sqrt of negative".into()));
        }
        if self.is_zero() {
            return Ok(Self::zero());
        }
        // make the working exponent even after a big left shift
        let mut shift = 2 * PREC as i64;
        if (self.exp - shift) % 2 != 0 {
            shift += 1;
        }
        let m = &self.mant << shift as u64;
        Ok(BigFloat {
            mant: m.sqrt(),
            exp: (self.exp - shift) / 2,
        }
        .normalized())
    }

    /// log2-magnitude for pivot comparisons (approximate, monotone).
    fn mag(&self) -> i64 {
        if self.is_zero() {
            i64::MIN
        } else {
            self.mant.bits() as i64 + self.exp
        }
    }

    pub fn abs_gt(&self, other: &Self) -> bool {
        match self.mag().cmp(&other.mag()) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => {
                (self.abs().sub(&other.abs())).mant.is_positive()
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        // keep only the top 64 bits so the BigInt->f64 conversion is exact-ish
        let bits = self.mant.bits();
        let extra = bits.saturating_sub(64) as i64;
        let top = (&self.mant >> extra as u64).to_f64().unwrap();
        top * 2f64.powi((self.exp + extra) as i32)
    }
}

pub type BigMat = Vec<Vec<BigFloat>>;

pub fn mat_from_f64(a: &[Vec<f64>]) -> BigMat {
    a.iter()
        .map(|row| row.iter().map(|&x| BigFloat::from_f64(x)).collect())
        .collect()
}

pub fn identity(n: usize) -> BigMat {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| BigFloat::from_i64((i == j) as i64))
                .collect()
        })
        .collect()
}

pub fn mat_mul(a: &BigMat, b: &BigMat) -> BigMat {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut acc = BigFloat::zero();
                    for p in 0..k {
                        acc = acc.add(&a[i][p].mul(&b[p][j]));
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Gauss-Jordan inverse with partial pivoting.  Dimension <= 16 enforced.
pub fn highprec_inverse(a: &BigMat) -> Result<BigMat> {
    let n = a.len();
    if n > 16 {
        return Err(Error::Domain("highprec oracle limited to dim <= 16".into()));
    }
    let mut m = a.clone();
    let mut inv = identity(n);
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if m[r][col].abs_gt(&m[piv][col]) {
                piv = r;
            }
        }
        if m[piv][col].is_zero() {
            return Err(Error::Linalg(format!(
                "singular matrix in highprec inverse (pivot column {col}); condition ~ inf"
            )));
        }
        m.swap(col, piv);
        inv.swap(col, piv);
        let d = m[col][col].clone();
        for j in 0..n {
            m[col][j] = m[col][j].div(&d)?;
            inv[col][j] = inv[col][j].div(&d)?;
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone();
            for j in 0..n {
                let t = factor.mul(&m[col][j]);
                m[r][j] = m[r][j].sub(&t);
                let t = factor.mul(&inv[col][j]);
                inv[r][j] = inv[r][j].sub(&t);
            }
        }
    }
    Ok(inv)
}

/// Jacobi eigenvalues of a symmetric matrix, ascending.
pub fn highprec_eigvals_sym(a: &BigMat) -> Result<Vec<BigFloat>> {
    let n = a.len();
    if n > 16 {
        return Err(Error::Domain("highprec oracle limited to dim <= 16".into()));
    }
    let mut m = a.clone();
    let half = BigFloat::from_f64(0.5);
    let one = BigFloat::from_i64(1);
    for _sweep in 0..200 {
        // largest off-diagonal element
        let mut p = 0;
        let mut q = 1;
        for i in 0..n {
            for j in i + 1..n {
                if m[i][j].abs_gt(&m[p][q]) {
                    p = i;
                    q = j;
                }
            }
        }
        if m[p][q].mag() < m[p][p].mag().max(m[q][q].mag()).max(0) - 2 * PREC as i64 + 40
            || m[p][q].is_zero()
        {
            break;
        }
        // rotation angle from theta = (a_qq - a_pp)/(2 a_pq)
        let theta = m[q][q].sub(&m[p][p]).div(&m[p][q].mul(&BigFloat::from_i64(2)))?;
        let t = {
            // t = sign(theta)/(|theta| + sqrt(theta^2+1))
            let root = theta.mul(&theta).add(&one).sqrt()?;
            let denom = theta.abs().add(&root);
            let tt = one.div(&denom)?;
            if theta.mant.is_negative() {
                tt.neg()
            } else {
                tt
            }
        };
        let c = one.div(&t.mul(&t).add(&one).sqrt()?)?;
        let s = t.mul(&c);
        // apply the rotation on both sides
        for k in 0..n {
            let mkp = m[k][p].clone();
            let mkq = m[k][q].clone();
            m[k][p] = c.mul(&mkp).sub(&s.mul(&mkq));
            m[k][q] = s.mul(&mkp).add(&c.mul(&mkq));
        }
        for k in 0..n {
            let mpk = m[p][k].clone();
            let mqk = m[q][k].clone();
            m[p][k] = c.mul(&mpk).sub(&s.mul(&mqk));
            m[q][k] = s.mul(&mpk).add(&c.mul(&mqk));
        }
        let _ = half.clone();
    }
    let mut vals: Vec<BigFloat> = (0..n).map(|i| m[i][i].clone()).collect();
    vals.sort_by(|a, b| {
        let d = a.sub(b);
        if d.is_zero() {
            std::cmp::Ordering::Equal
        } else if d.mant.is_negative() {
            std::cmp::Ordering::Less
        } else {
            std::cmp::Ordering::Greater
        }
    });
    Ok(vals)
}

/// Solve A x = b in high precision (via the inverse; oracle-scale sizes).
pub fn highprec_solve(a: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>> {
    let inv = highprec_inverse(&mat_from_f64(a))?;
    let n = b.len();
    Ok((0..n)
        .map(|i| {
            let mut acc = BigFloat::zero();
            for j in 0..n {
                acc = acc.add(&inv[i][j].mul(&BigFloat::from_f64(b[j])));
            }
            acc.to_f64()
        })
        .collect())
}
