//! Exact arithmetic in `Q(sqrt 3, sqrt 7)` and the table of eigenvalue bounds.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::Rational64;
use serde::Serialize;

type Q = Rational64;

fn q(n: i64) -> Q {
    Q::from_integer(n)
}

fn sign_q(x: Q) -> i32 {
    match x.cmp(&q(0)) {
        Ordering::Less => -1,
        Ordering::Equal => 0,
        Ordering::Greater => 1,
    }
}

/// `r + s sqrt 3` with rational `r`, `s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Q3 {
    r: Q,
    s: Q,
}

impl Q3 {
    fn mul(self, o: Q3) -> Q3 {
        Q3 { r: self.r * o.r + q(3) * self.s * o.s, s: self.r * o.s + self.s * o.r }
    }

    fn sign(self) -> i32 {
        let (a, b) = (sign_q(self.r), sign_q(self.s));
        if b == 0 || a == b {
            return if a == 0 { b } else { a };
        }
        if a == 0 {
            return b;
        }
        // opposite signs: compare r^2 with 3 s^2
        a * sign_q(self.r * self.r - q(3) * self.s * self.s)
    }
}

/// An element `a + b sqrt 3 + c sqrt 7 + d sqrt 21` of `Q(sqrt 3, sqrt 7)`.
///
/// Fractions are kept reduced, so equality is structural.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Surd {
    pub rational: Q,
    pub sqrt3: Q,
    pub sqrt7: Q,
    pub sqrt21: Q,
}

impl Surd {
    pub const ZERO: Surd = Surd {
        rational: Q::new_raw(0, 1),
        sqrt3: Q::new_raw(0, 1),
        sqrt7: Q::new_raw(0, 1),
        sqrt21: Q::new_raw(0, 1),
    };

    pub fn new(rational: Q, sqrt3: Q, sqrt7: Q, sqrt21: Q) -> Self {
        Surd { rational, sqrt3, sqrt7, sqrt21 }
    }

    pub fn int(n: i64) -> Self {
        Surd { rational: q(n), ..Surd::ZERO }
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Surd { rational: Q::new(n, d), ..Surd::ZERO }
    }

    pub fn sqrt3() -> Self {
        Surd { sqrt3: q(1), ..Surd::ZERO }
    }

    pub fn sqrt7() -> Self {
        Surd { sqrt7: q(1), ..Surd::ZERO }
    }

    /// Split as `p + q sqrt 7` with `p, q` in `Q(sqrt 3)`.
    fn split(self) -> (Q3, Q3) {
        (Q3 { r: self.rational, s: self.sqrt3 }, Q3 { r: self.sqrt7, s: self.sqrt21 })
    }

    fn join(p: Q3, r: Q3) -> Self {
        Surd { rational: p.r, sqrt3: p.s, sqrt7: r.r, sqrt21: r.s }
    }

    /// Exact sign: -1, 0 or 1.
    pub fn signum(self) -> i32 {
        let (p, r) = self.split();
        let (a, b) = (p.sign(), r.sign());
        if b == 0 {
            return a;
        }
        if a == 0 || a == b {
            return b;
        }
        // p and r sqrt 7 have opposite signs: compare p^2 with 7 r^2
        let p2 = p.mul(p);
        let r2 = r.mul(r);
        a * Q3 { r: p2.r - q(7) * r2.r, s: p2.s - q(7) * r2.s }.sign()
    }

    pub fn is_zero(self) -> bool {
        self == Surd::ZERO
    }

    pub fn recip(self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        // 1/(p + r sqrt7) = (p - r sqrt7) / (p^2 - 7 r^2), then rationalize sqrt 3
        let (p, r) = self.split();
        let p2 = p.mul(p);
        let r2 = r.mul(r);
        let n = Q3 { r: p2.r - q(7) * r2.r, s: p2.s - q(7) * r2.s };
        let norm = n.r * n.r - q(3) * n.s * n.s;
        let ninv = Q3 { r: n.r / norm, s: -n.s / norm };
        let conj_r = Q3 { r: -r.r, s: -r.s };
        Some(Surd::join(p.mul(ninv), conj_r.mul(ninv)))
    }

    pub fn to_f64(self) -> f64 {
        let f = |x: Q| *x.numer() as f64 / *x.denom() as f64;
        f(self.rational) + f(self.sqrt3) * 3f64.sqrt() + f(self.sqrt7) * 7f64.sqrt() + f(self.sqrt21) * 21f64.sqrt()
    }
}

impl Add for Surd {
    type Output = Surd;
    fn add(self, o: Surd) -> Surd {
        Surd {
            rational: self.rational + o.rational,
            sqrt3: self.sqrt3 + o.sqrt3,
            sqrt7: self.sqrt7 + o.sqrt7,
            sqrt21: self.sqrt21 + o.sqrt21,
        }
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd { rational: -self.rational, sqrt3: -self.sqrt3, sqrt7: -self.sqrt7, sqrt21: -self.sqrt21 }
    }
}

impl Sub for Surd {
    type Output = Surd;
    fn sub(self, o: Surd) -> Surd {
        self + (-o)
    }
}

impl Mul for Surd {
    type Output = Surd;
    fn mul(self, o: Surd) -> Surd {
        let (p1, r1) = self.split();
        let (p2, r2) = o.split();
        let rr = r1.mul(r2);
        let p = p1.mul(p2);
        let r = Q3 { r: p1.mul(r2).r + r1.mul(p2).r, s: p1.mul(r2).s + r1.mul(p2).s };
        Surd::join(Q3 { r: p.r + q(7) * rr.r, s: p.s + q(7) * rr.s }, r)
    }
}

impl Mul<i64> for Surd {
    type Output = Surd;
    fn mul(self, k: i64) -> Surd {
        self * Surd::int(k)
    }
}

impl Div for Surd {
    type Output = Surd;
    /// Panics on division by zero.
    fn div(self, o: Surd) -> Surd {
        self * o.recip().expect("division by zero surd")
    }
}

impl PartialOrd for Surd {
    fn partial_cmp(&self, o: &Surd) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Surd {
    fn cmp(&self, o: &Surd) -> Ordering {
        (*self - *o).signum().cmp(&0)
    }
}

fn fmt_q(x: Q) -> String {
    if *x.denom() == 1 {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = [(self.rational, ""), (self.sqrt3, "√3"), (self.sqrt7, "√7"), (self.sqrt21, "√21")];
        let mut first = true;
        for (c, r) in terms {
            if c == q(0) {
                continue;
            }
            let neg = c < q(0);
            let a = if neg { -c } else { c };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            if r.is_empty() {
                write!(f, "{}", fmt_q(a))?;
            } else if a == q(1) {
                write!(f, "{r}")?;
            } else if *a.denom() == 1 {
                write!(f, "{}{r}", a.numer())?;
            } else {
                write!(f, "({}){r}", fmt_q(a))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Serialize for Surd {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `coeff * pi^power`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SurdPi {
    pub coeff: Surd,
    pub pi_power: u32,
}

impl SurdPi {
    pub fn new(coeff: Surd, pi_power: u32) -> Self {
        SurdPi { coeff, pi_power }
    }

    pub fn times_pi(coeff: Surd) -> Self {
        SurdPi { coeff, pi_power: 1 }
    }

    pub fn to_f64(self) -> f64 {
        self.coeff.to_f64() * std::f64::consts::PI.powi(self.pi_power as i32)
    }

    /// Value divided by `pi`, for tables quoted in units of `pi`.
    pub fn over_pi(self) -> f64 {
        self.to_f64() / std::f64::consts::PI
    }
}

impl fmt::Display for SurdPi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.coeff;
        let single = [c.rational, c.sqrt3, c.sqrt7, c.sqrt21]
            .iter()
            .filter(|x| **x != q(0))
            .count()
            <= 1;
        let pi = match self.pi_power {
            0 => String::new(),
            1 => "π".to_string(),
            n => format!("π^{n}"),
        };
        if pi.is_empty() || single {
            write!(f, "{c}{pi}")
        } else {
            write!(f, "({c}){pi}")
        }
    }
}

impl Serialize for SurdPi {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// The minimizing parameter `(4 - sqrt 7)/9`.
pub fn a1() -> Surd {
    (Surd::int(4) - Surd::sqrt7()) / Surd::int(9)
}

/// `16(4 - sqrt 7)`, the bound in units of `pi`.
pub fn quartic_bound() -> Surd {
    (Surd::int(4) - Surd::sqrt7()) * 16
}

/// `sqrt 3 / 6`, the end of the parameter range where balancing is guaranteed.
pub fn balance_threshold() -> Surd {
    Surd::sqrt3() / Surd::int(6)
}

/// `sqrt 3 / 3`, the distance from `I/3` to the boundary of the hull.
pub fn hull_distance() -> Surd {
    Surd::sqrt3() / Surd::int(3)
}

/// `8 pi d` with a degree, otherwise `[(g + 3)/2] 8 pi`.
pub fn yang_yau(genus: u32, degree: Option<u32>) -> SurdPi {
    let n = match degree {
        Some(d) => d as i64,
        None => ((genus + 3) / 2) as i64,
    };
    SurdPi::times_pi(Surd::int(8 * n))
}

/// Whether the integer-part bound is known to be strict in genus `g`.
pub fn karpukhin_strict(genus: u32) -> bool {
    genus >= 3
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Equal,
    AtMost,
    LessThan,
    Approx,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Equal => "=",
            Relation::AtMost => "<=",
            Relation::LessThan => "<",
            Relation::Approx => "~",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KnownValue {
    pub label: String,
    pub genus: u32,
    pub relation: Relation,
    /// Exact form, absent for purely numerical values.
    pub exact: Option<SurdPi>,
    pub over_pi: f64,
}

/// Known values and bounds of the supremum of `lambda_1 * Area` by genus.
pub fn known_values() -> Vec<KnownValue> {
    let exact = |label: &str, genus, relation, v: SurdPi| KnownValue {
        label: label.to_string(),
        genus,
        relation,
        exact: Some(v),
        over_pi: v.over_pi(),
    };
    vec![
        exact("Lambda_1(0)", 0, Relation::Equal, yang_yau(0, None)),
        exact(
            "Lambda_1(1)",
            1,
            Relation::Equal,
            SurdPi::new(Surd::sqrt3() * Surd::ratio(8, 3), 2),
        ),
        exact("Lambda_1(2)", 2, Relation::Equal, SurdPi::times_pi(Surd::int(16))),
        exact("Lambda_1(3)", 3, Relation::AtMost, SurdPi::times_pi(quartic_bound())),
        exact("Lambda_1(3)", 3, Relation::LessThan, yang_yau(3, None)),
        KnownValue {
            label: "lambda_1 * Area, hyperbolic Klein quartic".to_string(),
            genus: 3,
            relation: Relation::Approx,
            exact: None,
            over_pi: 21.414,
        },
    ]
}

/// Bounds on `lambda_0 * Area` and `lambda_1 * Area` for the Jacobi operator
/// of a genus-three minimal surface.
pub fn jacobi_bounds() -> (SurdPi, SurdPi) {
    (
        jacobi_lambda0_bound(3),
        SurdPi::times_pi(quartic_bound() - Surd::int(16)),
    )
}

/// `8 pi (1 - g)`.
pub fn jacobi_lambda0_bound(genus: u32) -> SurdPi {
    SurdPi::times_pi(Surd::int(8 * (1 - genus as i64)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_is_exact() {
        let s7 = Surd::sqrt7();
        assert_eq!(s7 * s7, Surd::int(7));
        assert_eq!(Surd::sqrt3() * s7, Surd::new(q(0), q(0), q(0), q(1)));
        let x = Surd::int(4) - s7;
        assert_eq!(x * x.recip().unwrap(), Surd::int(1));
        let y = Surd::new(Q::new(1, 2), q(-3), Q::new(2, 5), q(1));
        assert_eq!(y * y.recip().unwrap(), Surd::int(1));
        assert_eq!((y / x) * x, y);
    }

    #[test]
    fn exact_sign() {
        assert_eq!((Surd::int(3) - Surd::sqrt7()).signum(), 1);
        assert_eq!((Surd::int(2) - Surd::sqrt7()).signum(), -1);
        // (sqrt 3 + sqrt 7)^2 = 10 + 2 sqrt 21 < 21
        let d = Surd::new(q(0), q(1), q(1), q(-1));
        assert_eq!(d.signum(), -1);
        assert!(d.to_f64() < 0.0);
        assert_eq!((-d).signum(), 1);
        assert_eq!(Surd::ZERO.signum(), 0);
    }

    #[test]
    fn a1_is_below_threshold() {
        assert!(a1() < balance_threshold());
        assert!((a1().to_f64() - 0.150472).abs() < 1e-6);
    }

    #[test]
    fn table_entries() {
        assert_eq!(yang_yau(3, None).to_string(), "24π");
        assert_eq!(yang_yau(3, Some(2)).coeff, Surd::int(16));
        assert_eq!(yang_yau(0, None).coeff, Surd::int(8));
        let kv = known_values();
        assert!((kv[1].over_pi - 14.510).abs() < 5e-4);
        assert!((kv[3].over_pi - 21.668).abs() < 5e-4);
        assert_eq!(kv[4].relation, Relation::LessThan);
        assert!(karpukhin_strict(3) && !karpukhin_strict(2));
        let (l0, l1) = jacobi_bounds();
        assert_eq!(l0.coeff, Surd::int(-16));
        assert_eq!(l1.coeff, (Surd::int(3) - Surd::sqrt7()) * 16);
        assert!((l1.over_pi() - 5.668).abs() < 5e-4);
        assert_eq!(jacobi_lambda0_bound(3), l0);
    }

    #[test]
    fn display() {
        assert_eq!(quartic_bound().to_string(), "64 - 16√7");
        assert_eq!(SurdPi::times_pi(quartic_bound()).to_string(), "(64 - 16√7)π");
        assert_eq!(a1().to_string(), "4/9 - (1/9)√7");
        assert_eq!(SurdPi::new(Surd::sqrt3() * Surd::ratio(8, 3), 2).to_string(), "(8/3)√3π^2");
    }
}
