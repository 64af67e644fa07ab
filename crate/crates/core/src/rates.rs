//! Exact rate formulas.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::{format, vec};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

fn int(v: usize) -> BigInt {
    BigInt::from(v)
}

fn ratio(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

fn rpow(x: &BigRational, e: usize) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..e {
        acc *= x;
    }
    acc
}

/// `(N - T) N^{M-1} / (N^M - T^M)`.
pub fn capacity(n: usize, t: usize, m: usize) -> BigRational {
    assert!(t < n && m >= 1, "capacity needs T < N and M >= 1");
    let nm = int(n).pow(m as u32);
    let tm = int(t).pow(m as u32);
    ratio(int(n - t) * int(n).pow(m as u32 - 1), nm - tm)
}

/// `(N - r) N^{M-1} / (N^M - r^M)` for a possibly fractional codimension `r`.
pub fn lifted_rate_rational(n: usize, r: &BigRational, m: usize) -> BigRational {
    let nn = BigRational::from_integer(int(n));
    (&nn - r) * rpow(&nn, m - 1) / (rpow(&nn, m) - rpow(r, m))
}

/// Rate of a refined and lifted one-shot scheme of codimension `r`.
pub fn lifted_rate(n: usize, r: usize, m: usize) -> BigRational {
    lifted_rate_rational(n, &BigRational::from_integer(int(r)), m)
}

/// `(N - r) / N`.
pub fn oneshot_rate(n: usize, r: usize) -> BigRational {
    ratio(int(n - r), int(n))
}

/// `N / (N + r)`.
pub fn refined_rate(n: usize, r: usize) -> BigRational {
    ratio(int(n), int(n + r))
}

/// Codimension `(NK - N + T) / K` of the star-product family for coded storage.
pub fn fractional_codimension(n: usize, k: usize, t: usize) -> BigRational {
    ratio(int(n * k - n + t), int(k))
}

/// Codimension `K + T - 1` of the geometrical family.
pub fn geometric_codimension(k: usize, t: usize) -> BigRational {
    BigRational::from_integer(int(k + t - 1))
}

/// `(N - T)(NK)^{M-1} / ((NK)^M - (NK - N + T)^M)`.
pub fn fractional_rate(n: usize, k: usize, t: usize, m: usize) -> BigRational {
    lifted_rate_rational(n, &fractional_codimension(n, k, t), m)
}

/// `(N - K - T + 1) N^{M-1} / (N^M - (K + T - 1)^M)`.
pub fn geometric_rate(n: usize, k: usize, t: usize, m: usize) -> BigRational {
    lifted_rate(n, k + t - 1, m)
}

/// Rate achieved by an instantiated scheme against its closed form and
/// the replicated-storage capacity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RateReport {
    pub label: String,
    pub servers: usize,
    pub dimension: usize,
    pub collusion: usize,
    pub messages: usize,
    pub codimension: usize,
    pub measured: BigRational,
    pub closed_form: BigRational,
    pub capacity: BigRational,
    pub matches_closed_form: bool,
    pub equals_capacity: bool,
}

impl RateReport {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        label: impl Into<String>,
        servers: usize,
        dimension: usize,
        collusion: usize,
        messages: usize,
        codimension: usize,
        measured: BigRational,
        closed_form: BigRational,
    ) -> Self {
        let capacity = capacity(servers, collusion, messages);
        RateReport {
            label: label.into(),
            servers,
            dimension,
            collusion,
            messages,
            codimension,
            matches_closed_form: measured == closed_form,
            equals_capacity: measured == capacity,
            measured,
            closed_form,
            capacity,
        }
    }
}

/// One evaluated closed form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormulaValue {
    pub formula: &'static str,
    pub codimension: BigRational,
    pub value: BigRational,
}

/// Every closed form for one `(N, K, T, M)` with their comparisons.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormulaTable {
    pub servers: usize,
    pub dimension: usize,
    pub collusion: usize,
    pub messages: usize,
    pub values: Vec<FormulaValue>,
    /// The coded star-product rate does not exceed the geometrical one.
    pub fractional_le_geometric: bool,
    pub fractional_eq_geometric: bool,
    /// For `K = 1`, the lifted secret-sharing rate equals capacity.
    pub secret_sharing_is_capacity: Option<bool>,
}

impl FormulaTable {
    pub fn get(&self, formula: &str) -> Option<&BigRational> {
        self.values.iter().find(|v| v.formula == formula).map(|v| &v.value)
    }
}

/// Evaluates the capacity and the lifted rates of both known families.
pub fn rate_formulas(n: usize, k: usize, t: usize, m: usize) -> FormulaTable {
    assert!(k >= 1 && t >= 1 && k + t <= n && m >= 1, "need K + T <= N");
    let cap = capacity(n, t, m);
    let fractional = fractional_rate(n, k, t, m);
    let geometric = geometric_rate(n, k, t, m);
    let mut values = vec![
        FormulaValue { formula: "capacity", codimension: BigRational::from_integer(int(t)), value: cap.clone() },
        FormulaValue { formula: "lifted_fractional", codimension: fractional_codimension(n, k, t), value: fractional.clone() },
        FormulaValue { formula: "lifted_geometric", codimension: geometric_codimension(k, t), value: geometric.clone() },
    ];
    let ss = (k == 1).then(|| {
        let v = lifted_rate(n, t, m);
        values.push(FormulaValue {
            formula: "lifted_secret_sharing",
            codimension: BigRational::from_integer(int(t)),
            value: v.clone(),
        });
        v == cap
    });
    FormulaTable {
        servers: n,
        dimension: k,
        collusion: t,
        messages: m,
        values,
        fractional_le_geometric: fractional <= geometric,
        fractional_eq_geometric: fractional == geometric,
        secret_sharing_is_capacity: ss,
    }
}

/// Decimal expansion with `places` digits, rounding half to even.
pub fn to_decimal(x: &BigRational, places: usize) -> String {
    let scale = BigInt::from(10).pow(places as u32);
    let scaled = x.abs() * BigRational::from_integer(scale.clone());
    let floor = scaled.floor().to_integer();
    let frac = &scaled - BigRational::from_integer(floor.clone());
    let half = ratio(BigInt::one(), BigInt::from(2));
    let rounded = if frac > half || (frac == half && floor.is_odd()) { floor + 1 } else { floor };
    let (whole, rest) = rounded.div_rem(&scale);
    let sign = if x.is_negative() && !rounded_is_zero(&whole, &rest) { "-" } else { "" };
    if places == 0 {
        return format!("{sign}{whole}");
    }
    let digits = rest.to_string();
    let pad = "0".repeat(places - digits.len());
    format!("{sign}{whole}.{pad}{digits}")
}

fn rounded_is_zero(a: &BigInt, b: &BigInt) -> bool {
    a.is_zero() && b.is_zero()
}

/// `num/den` text form.
pub fn to_fraction(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn capacity_values() {
        assert_eq!(capacity(2, 1, 2), q(2, 3));
        assert_eq!(capacity(4, 2, 3), q(4, 7));
        assert_eq!(capacity(5, 3, 1), q(1, 1));
    }

    #[test]
    fn lifted_values() {
        assert_eq!(lifted_rate(4, 3, 3), q(16, 37));
        assert_eq!(lifted_rate(4, 2, 3), q(4, 7));
        assert_eq!(lifted_rate(10, 7, 2), q(10, 17));
        assert_eq!(lifted_rate(10, 7, 9), q(300_000_000, 1_000_000_000 - 40_353_607));
        assert_eq!(refined_rate(4, 3), q(4, 7));
        assert_eq!(oneshot_rate(10, 7), q(3, 10));
    }

    #[test]
    fn fractional_matches_direct_form() {
        for (n, k, t, m) in [(4, 2, 2, 3), (6, 2, 1, 4), (7, 3, 2, 2)] {
            let nk = (n * k) as i64;
            let num = (n - t) as i64 * nk.pow(m as u32 - 1);
            let den = nk.pow(m as u32) - (nk - n as i64 + t as i64).pow(m as u32);
            assert_eq!(fractional_rate(n, k, t, m), q(num, den));
        }
    }

    #[test]
    fn table_comparisons() {
        let t = rate_formulas(4, 1, 2, 3);
        assert_eq!(t.secret_sharing_is_capacity, Some(true));
        assert!(t.fractional_eq_geometric);
        let t = rate_formulas(8, 2, 2, 3);
        assert!(t.fractional_le_geometric && !t.fractional_eq_geometric);
        assert_eq!(t.secret_sharing_is_capacity, None);
    }

    #[test]
    fn decimals_half_even() {
        assert_eq!(to_decimal(&q(1, 2), 0), "0");
        assert_eq!(to_decimal(&q(3, 2), 0), "2");
        assert_eq!(to_decimal(&q(10, 17), 6), "0.588235");
        assert_eq!(to_decimal(&q(1, 8), 2), "0.12");
        assert_eq!(to_decimal(&q(3, 8), 2), "0.38");
        assert_eq!(to_decimal(&q(3, 10), 6), "0.300000");
        assert_eq!(to_decimal(&q(-1, 4), 1), "-0.2");
        assert_eq!(to_fraction(&q(6, 4)), "3/2");
    }
}
