//! Closed-form parameter families: the traditional scheme, the second-,
//! third-, and fourth-order eigenvalue conditions, Method 3 (R = S), the
//! Super-Duper method, and the family that is exact at ν = 1/2.
//!
//! A [`FamilySpec`] names a family together with its free parameters;
//! [`FamilySpec::resolve`] turns it into concrete weights at a given Courant
//! number. Resolved T and U may come out zero or negative; whether such a
//! scheme is usable is the stability scanner's call, not a constructor error.

use std::fmt;
use std::str::FromStr;

use crate::types::{CourantNumber, SchemeParameters};
use crate::{Error, Result};

/// A named scheme family with its free parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilySpec {
    /// R = S = 3, T = 1 − ν, U = ν: the classical third-order scheme.
    Traditional,
    /// Free (R, S, T); U from the second-order correctness condition.
    SecondOrder { r: f64, s: f64, t: f64 },
    /// Free (R, S); T, U from the third-order correctness conditions.
    ThirdOrder { r: f64, s: f64 },
    /// Third-order family restricted to R = S; a single tuning knob.
    Method3 { r: f64 },
    /// Free R; S, T, U from the fourth-order correctness conditions.
    FourthOrder { r: f64 },
    /// R = 6/(2−ν), S = 6/(1+ν), T = U = 1/2: the fourth-order member with
    /// the simplest closed form.
    SuperDuper,
    /// S = 8 − R, T = (R−2)²/8, U = (R−6)²/8: exact when run at ν = 1/2.
    HalfCflExact { r: f64 },
    /// All four weights given directly.
    Custom { r: f64, s: f64, t: f64, u: f64 },
}

impl FamilySpec {
    /// Resolves the family to concrete weights at Courant number `nu`.
    pub fn resolve(&self, nu: CourantNumber) -> Result<SchemeParameters> {
        match *self {
            // Routed through the third-order conditions so that Traditional,
            // ThirdOrder(3,3), and Method3(3) resolve bitwise identically.
            FamilySpec::Traditional => {
                let (t, u) = third_order_tu(3.0, 3.0, nu)?;
                SchemeParameters::new(3.0, 3.0, t, u)
            }
            FamilySpec::SecondOrder { r, s, t } => {
                let u = second_order_u(r, s, t)?;
                SchemeParameters::new(r, s, t, u)
            }
            FamilySpec::ThirdOrder { r, s } => {
                let (t, u) = third_order_tu(r, s, nu)?;
                SchemeParameters::new(r, s, t, u)
            }
            FamilySpec::Method3 { r } => {
                let (t, u) = third_order_tu(r, r, nu)?;
                SchemeParameters::new(r, r, t, u)
            }
            FamilySpec::FourthOrder { r } => {
                let (s, t, u) = fourth_order_stu(r, nu);
                SchemeParameters::new(r, s, t, u)
            }
            FamilySpec::SuperDuper => Ok(super_duper(nu)),
            FamilySpec::HalfCflExact { r } => {
                SchemeParameters::new(r, 8.0 - r, (r - 2.0) * (r - 2.0) / 8.0, (r - 6.0) * (r - 6.0) / 8.0)
            }
            FamilySpec::Custom { r, s, t, u } => SchemeParameters::new(r, s, t, u),
        }
    }
}

/// U making the principal eigenvalue second-order correct for given R, S, T.
///
/// Requires R > 0; the alternate branch of the condition (R = 0, T = 1/2,
/// any U) is expressed as a `Custom` family instead.
pub fn second_order_u(r: f64, s: f64, t: f64) -> Result<f64> {
    if !(r.is_finite() && s.is_finite() && t.is_finite()) {
        return Err(Error::NonFinite("second-order condition input"));
    }
    if r <= 0.0 {
        return Err(Error::DegenerateFamily(format!(
            "second-order condition divides by R; R must be positive, got {r}"
        )));
    }
    Ok((r - 2.0 * s * t + s) / (2.0 * r))
}

/// (T, U) making the principal eigenvalue third-order correct for given R, S.
pub fn third_order_tu(r: f64, s: f64, nu: CourantNumber) -> Result<(f64, f64)> {
    if !(r.is_finite() && s.is_finite()) {
        return Err(Error::NonFinite("third-order condition input"));
    }
    if r + s <= 0.0 {
        return Err(Error::DegenerateFamily(format!(
            "third-order conditions divide by R + S; need R + S > 0, got {}",
            r + s
        )));
    }
    let v = nu.get();
    let t = -(v + 1.0) * r / 3.0 + r * r / (r + s) + 0.5;
    let u = (2.0 * s * (v - 3.0 * r / (r + s) + 1.0) + 3.0) / 6.0;
    Ok((t, u))
}

/// (S, T, U) making the principal eigenvalue fourth-order correct for given R.
///
/// The denominators −ν² + ν + 2 and ν − 2 never vanish on ν ∈ (0, 1].
pub fn fourth_order_stu(r: f64, nu: CourantNumber) -> (f64, f64, f64) {
    let v = nu.get();
    let s = 18.0 / (-v * v + v + 2.0) - r;
    let t = (9.0 - (v + 1.0) * r * ((v - 2.0) * r + 6.0)) / 18.0;
    let u = (-((v - 2.0) * (v + 1.0) * r * r) - 6.0 * (v + 4.0) * r + 9.0 * (v - 14.0) / (v - 2.0))
        / 18.0;
    (s, t, u)
}

/// The fourth-order member with R = 6/(2−ν): S = 6/(1+ν) and T = U = 1/2.
pub fn super_duper(nu: CourantNumber) -> SchemeParameters {
    let v = nu.get();
    SchemeParameters {
        r: 6.0 / (2.0 - v),
        s: 6.0 / (1.0 + v),
        t: 0.5,
        u: 0.5,
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FamilySpec::Traditional => write!(f, "traditional"),
            FamilySpec::SecondOrder { r, s, t } => write!(f, "second:R={r},S={s},T={t}"),
            FamilySpec::ThirdOrder { r, s } => write!(f, "third:R={r},S={s}"),
            FamilySpec::Method3 { r } => write!(f, "method3:R={r}"),
            FamilySpec::FourthOrder { r } => write!(f, "fourth:R={r}"),
            FamilySpec::SuperDuper => write!(f, "superduper"),
            FamilySpec::HalfCflExact { r } => write!(f, "halfcfl:R={r}"),
            FamilySpec::Custom { r, s, t, u } => write!(f, "custom:R={r},S={s},T={t},U={u}"),
        }
    }
}

fn parse_keys(input: &str, body: &str, wanted: &[&str]) -> Result<Vec<f64>> {
    let err = |reason: String| Error::ParseFamily {
        input: input.to_string(),
        reason,
    };
    let mut found: Vec<Option<f64>> = vec![None; wanted.len()];
    for pair in body.split(',') {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| err(format!("expected key=value, got `{pair}`")))?;
        let key = key.trim().to_ascii_lowercase();
        let idx = wanted
            .iter()
            .position(|w| w.eq_ignore_ascii_case(&key))
            .ok_or_else(|| err(format!("unknown key `{key}` (expected one of {wanted:?})")))?;
        if found[idx].is_some() {
            return Err(err(format!("duplicate key `{key}`")));
        }
        let parsed: f64 = value
            .trim()
            .parse()
            .map_err(|_| err(format!("cannot parse value `{}` for key `{key}`", value.trim())))?;
        found[idx] = Some(parsed);
    }
    found
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| err(format!("missing key `{}`", wanted[i]))))
        .collect()
}

impl FromStr for FamilySpec {
    type Err = Error;

    /// Parses the canonical text form, e.g. `traditional`, `method3:R=4`,
    /// `third:R=2,S=6`, `fourth:R=3`, `superduper`, `halfcfl:R=3`,
    /// `second:R=1,S=1,T=0.5`, `custom:R=3,S=3,T=0.3,U=0.7`.
    /// Keys are case-insensitive.
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        let (head, body) = match trimmed.split_once(':') {
            Some((h, b)) => (h.trim().to_ascii_lowercase(), Some(b)),
            None => (trimmed.to_ascii_lowercase(), None),
        };
        let err = |reason: &str| Error::ParseFamily {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let body_for = |tag: &str| -> Result<&str> {
            body.ok_or_else(|| Error::ParseFamily {
                input: s.to_string(),
                reason: format!("`{tag}` requires parameters after `:`"),
            })
        };
        match head.as_str() {
            "traditional" => {
                if body.is_some() {
                    return Err(err("`traditional` takes no parameters"));
                }
                Ok(FamilySpec::Traditional)
            }
            "superduper" => {
                if body.is_some() {
                    return Err(err("`superduper` takes no parameters"));
                }
                Ok(FamilySpec::SuperDuper)
            }
            "second" => {
                let v = parse_keys(s, body_for("second")?, &["r", "s", "t"])?;
                Ok(FamilySpec::SecondOrder {
                    r: v[0],
                    s: v[1],
                    t: v[2],
                })
            }
            "third" => {
                let v = parse_keys(s, body_for("third")?, &["r", "s"])?;
                Ok(FamilySpec::ThirdOrder { r: v[0], s: v[1] })
            }
            "method3" => {
                let v = parse_keys(s, body_for("method3")?, &["r"])?;
                Ok(FamilySpec::Method3 { r: v[0] })
            }
            "fourth" => {
                let v = parse_keys(s, body_for("fourth")?, &["r"])?;
                Ok(FamilySpec::FourthOrder { r: v[0] })
            }
            "halfcfl" => {
                let v = parse_keys(s, body_for("halfcfl")?, &["r"])?;
                Ok(FamilySpec::HalfCflExact { r: v[0] })
            }
            "custom" => {
                let v = parse_keys(s, body_for("custom")?, &["r", "s", "t", "u"])?;
                Ok(FamilySpec::Custom {
                    r: v[0],
                    s: v[1],
                    t: v[2],
                    u: v[3],
                })
            }
            other => Err(Error::ParseFamily {
                input: s.to_string(),
                reason: format!("unknown family `{other}`"),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nu(v: f64) -> CourantNumber {
        CourantNumber::new(v).unwrap()
    }

    #[test]
    fn traditional_recovers_classical_weights() {
        for v in [0.1, 0.3, 0.5, 0.7, 0.9, 1.0] {
            let p = FamilySpec::Traditional.resolve(nu(v)).unwrap();
            assert_eq!(p.r, 3.0);
            assert_eq!(p.s, 3.0);
            assert!((p.t - (1.0 - v)).abs() < 1e-15, "nu={v} t={}", p.t);
            assert!((p.u - v).abs() < 1e-15, "nu={v} u={}", p.u);
        }
    }

    #[test]
    fn traditional_aliases_resolve_bitwise_identically() {
        for v in [0.13, 0.5, 0.77, 1.0] {
            let a = FamilySpec::Traditional.resolve(nu(v)).unwrap();
            let b = FamilySpec::ThirdOrder { r: 3.0, s: 3.0 }.resolve(nu(v)).unwrap();
            let c = FamilySpec::Method3 { r: 3.0 }.resolve(nu(v)).unwrap();
            assert_eq!(a, b);
            assert_eq!(a, c);
        }
    }

    #[test]
    fn second_order_u_examples() {
        assert!((second_order_u(3.0, 3.0, 0.7).unwrap() - 0.3).abs() < 1e-15);
        assert!((second_order_u(1.0, 1.0, 0.5).unwrap() - 0.5).abs() < 1e-15);
        assert!((second_order_u(2.0, 4.0, 1.0).unwrap() - -0.5).abs() < 1e-15);
        assert!(second_order_u(0.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn third_order_tu_examples() {
        let (t, u) = third_order_tu(3.0, 3.0, nu(0.3)).unwrap();
        assert!((t - 0.7).abs() < 1e-15);
        assert!((u - 0.3).abs() < 1e-15);

        let (t, u) = third_order_tu(4.0, 4.0, nu(0.5)).unwrap();
        assert_eq!(t, 0.5);
        assert_eq!(u, 0.5);

        let (t, u) = third_order_tu(2.0, 2.0, nu(0.7)).unwrap();
        assert!((t - (-(1.7 * 2.0) / 3.0 + 1.0 + 0.5)).abs() < 1e-15);
        assert!((u - (4.0 * 0.2 + 3.0) / 6.0).abs() < 1e-15);

        assert!(third_order_tu(0.0, 0.0, nu(0.5)).is_err());
        assert!(third_order_tu(3.0, -3.0, nu(0.5)).is_err());
    }

    #[test]
    fn fourth_order_special_choice_gives_super_duper() {
        for v in [0.1, 0.4, 0.7, 1.0] {
            let c = nu(v);
            let sd = super_duper(c);
            let (s, t, u) = fourth_order_stu(sd.r, c);
            assert!((s - sd.s).abs() < 1e-13, "nu={v}");
            assert!((t - 0.5).abs() < 1e-13, "nu={v}");
            assert!((u - 0.5).abs() < 1e-13, "nu={v}");
        }
    }

    #[test]
    fn fourth_order_at_half_courant_matches_exact_family() {
        for r in [2.0, 3.0, 4.0, 5.0, 6.0] {
            let (s, t, u) = fourth_order_stu(r, nu(0.5));
            assert!((s - (8.0 - r)).abs() < 1e-12);
            assert!((t - (r - 2.0) * (r - 2.0) / 8.0).abs() < 1e-12);
            assert!((u - (r - 6.0) * (r - 6.0) / 8.0).abs() < 1e-12);
        }
        let (s, t, u) = fourth_order_stu(4.0, nu(0.5));
        assert_eq!((s, t, u), (4.0, 0.5, 0.5));
    }

    #[test]
    fn super_duper_closed_form_values() {
        let p = super_duper(nu(0.7));
        assert!((p.r - 6.0 / 1.3).abs() < 1e-15);
        assert!((p.s - 6.0 / 1.7).abs() < 1e-15);
        assert_eq!((p.t, p.u), (0.5, 0.5));

        let p = super_duper(nu(1.0));
        assert_eq!((p.r, p.s, p.t, p.u), (6.0, 3.0, 0.5, 0.5));

        let p = super_duper(nu(0.5));
        assert_eq!((p.r, p.s), (4.0, 4.0));
    }

    #[test]
    fn half_cfl_exact_example() {
        let p = FamilySpec::HalfCflExact { r: 3.0 }.resolve(nu(0.5)).unwrap();
        assert_eq!((p.r, p.s, p.t, p.u), (3.0, 5.0, 0.125, 1.125));
    }

    #[test]
    fn half_cfl_exact_matches_fourth_order_at_half_courant() {
        for r in [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.5] {
            let a = FamilySpec::HalfCflExact { r }.resolve(nu(0.5)).unwrap();
            let b = FamilySpec::FourthOrder { r }.resolve(nu(0.5)).unwrap();
            assert!((a.s - b.s).abs() < 1e-12);
            assert!((a.t - b.t).abs() < 1e-12);
            assert!((a.u - b.u).abs() < 1e-12);
        }
    }

    #[test]
    fn fourth_order_conditions_imply_third_order_conditions() {
        for k in 1..10 {
            let c = nu(k as f64 / 10.0);
            for r in [1.0, 2.0, 3.0, 4.0, 5.0, 6.0] {
                let (s, t, u) = fourth_order_stu(r, c);
                let (t3, u3) = third_order_tu(r, s, c).unwrap();
                assert!((t - t3).abs() < 1e-12, "r={r} nu={}", c.get());
                assert!((u - u3).abs() < 1e-12, "r={r} nu={}", c.get());
            }
        }
    }

    #[test]
    fn third_order_conditions_imply_second_order_condition() {
        for k in 1..10 {
            let c = nu(k as f64 / 10.0);
            for (r, s) in [(1.0, 1.0), (2.0, 6.0), (3.0, 3.0), (4.0, 4.0), (5.0, 1.0)] {
                let (t, u) = third_order_tu(r, s, c).unwrap();
                let u2 = second_order_u(r, s, t).unwrap();
                assert!((u - u2).abs() < 1e-12, "r={r} s={s} nu={}", c.get());
            }
        }
    }

    #[test]
    fn text_form_round_trips() {
        let specs = [
            FamilySpec::Traditional,
            FamilySpec::SuperDuper,
            FamilySpec::SecondOrder {
                r: 1.5,
                s: 2.25,
                t: 0.5,
            },
            FamilySpec::ThirdOrder { r: 2.0, s: 6.0 },
            FamilySpec::Method3 { r: 3.75 },
            FamilySpec::FourthOrder { r: 3.0 },
            FamilySpec::HalfCflExact { r: 3.0 },
            FamilySpec::Custom {
                r: 3.0,
                s: 3.0,
                t: 0.3,
                u: 0.7,
            },
        ];
        for spec in specs {
            let text = spec.to_string();
            let parsed: FamilySpec = text.parse().unwrap();
            assert_eq!(parsed, spec, "round-trip failed for `{text}`");
        }
    }

    #[test]
    fn text_form_examples_and_case_insensitive_keys() {
        assert_eq!(
            "method3:R=4".parse::<FamilySpec>().unwrap(),
            FamilySpec::Method3 { r: 4.0 }
        );
        assert_eq!(
            "method3:r=4".parse::<FamilySpec>().unwrap(),
            FamilySpec::Method3 { r: 4.0 }
        );
        assert_eq!(
            "THIRD:R=2,s=6".parse::<FamilySpec>().unwrap(),
            FamilySpec::ThirdOrder { r: 2.0, s: 6.0 }
        );
        assert_eq!(
            "custom:R=3,S=3,T=0.3,U=0.7".parse::<FamilySpec>().unwrap(),
            FamilySpec::Custom {
                r: 3.0,
                s: 3.0,
                t: 0.3,
                u: 0.7
            }
        );
    }

    #[test]
    fn text_form_rejects_malformed_input() {
        assert!("".parse::<FamilySpec>().is_err());
        assert!("unknown".parse::<FamilySpec>().is_err());
        assert!("method3".parse::<FamilySpec>().is_err());
        assert!("method3:Q=4".parse::<FamilySpec>().is_err());
        assert!("method3:R=abc".parse::<FamilySpec>().is_err());
        assert!("method3:R=1,R=2".parse::<FamilySpec>().is_err());
        assert!("third:R=2".parse::<FamilySpec>().is_err());
        assert!("traditional:R=3".parse::<FamilySpec>().is_err());
    }

    #[test]
    fn resolve_guards_divisions() {
        assert!(FamilySpec::ThirdOrder { r: 1.0, s: -1.0 }.resolve(nu(0.5)).is_err());
        assert!(FamilySpec::Method3 { r: 0.0 }.resolve(nu(0.5)).is_err());
        assert!(FamilySpec::SecondOrder {
            r: 0.0,
            s: 1.0,
            t: 0.5
        }
        .resolve(nu(0.5))
        .is_err());
    }
}
