//! Qutrit one-time-table generation and AND evaluation on the tables.
//!
//! Alice encodes her bit `x` and a random sign `t` into a qutrit, Bob applies a
//! phase gate chosen by his bit `y` and a random bit `r`, and Alice's measurement
//! reveals `x·y ⊕ r`. The resulting record `(x, y, x·y ⊕ r, r)` is consumed by
//! [`and_eval`].

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::numerics::{cr, CMatrix, PureState};

/// Serializes `bool` as the integers 0 and 1.
pub mod bit {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &bool, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(u8::from(*value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<bool, D::Error> {
        match u8::deserialize(d)? {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(D::Error::custom(format!("bit must be 0 or 1, got {other}"))),
        }
    }
}

/// Correlated bits with `e ⊕ f = x·y` when generated honestly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OneTimeTable {
    #[serde(with = "bit")]
    pub x: bool,
    #[serde(with = "bit")]
    pub y: bool,
    #[serde(with = "bit")]
    pub e: bool,
    #[serde(with = "bit")]
    pub f: bool,
}

impl OneTimeTable {
    pub fn is_correct(&self) -> bool {
        self.e ^ self.f == (self.x & self.y)
    }
}

/// Everything that happened in one honest run.
#[derive(Debug, Clone, PartialEq)]
pub struct HonestRunTrace {
    pub x: bool,
    pub t: bool,
    pub y: bool,
    pub r: bool,
    pub sent: PureState,
    pub returned: PureState,
    /// Index `q` of the observed basis vector `(|x> + (-1)^q |2>)/√2`; honest runs give `t ⊕ x·y ⊕ r`.
    pub basis_outcome: bool,
    /// Alice's recorded bit, `basis_outcome ⊕ t`.
    pub output: bool,
}

#[inline]
fn sign(bit: bool) -> f64 {
    if bit {
        -1.0
    } else {
        1.0
    }
}

/// Basis index of the computational ket carrying `x`.
#[inline]
fn level(x: bool) -> usize {
    usize::from(x)
}

/// `(|x> + (-1)^t |2>)/√2`.
pub fn alice_prepare(x: bool, t: bool) -> PureState {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = [0.0; 3];
    amps[level(x)] = h;
    amps[2] = sign(t) * h;
    PureState::from_real(&amps).expect("prepared state is normalized")
}

/// `diag((-1)^r, (-1)^(y+r), 1)`.
pub fn bob_gate(y: bool, r: bool) -> CMatrix {
    let mut g = CMatrix::zeros(3, 3);
    g[(0, 0)] = cr(sign(r));
    g[(1, 1)] = cr(sign(y ^ r));
    g[(2, 2)] = cr(1.0);
    g
}

/// Born probabilities of Alice's three outcomes: the sent state, its sign flip, and `|1-x>`.
pub fn measurement_probabilities(state: &PureState, x: bool, t: bool) -> Result<[f64; 3]> {
    let same = alice_prepare(x, t);
    let flipped = alice_prepare(x, !t);
    let p_same = same.inner(state)?.norm_sqr();
    let p_flip = flipped.inner(state)?.norm_sqr();
    let p_third = state.amplitude(level(!x)).norm_sqr();
    Ok([p_same, p_flip, p_third])
}

/// Alice's measurement step: 0 iff she sees the state she sent; the third outcome yields a fair coin.
pub fn alice_measure<R: Rng + ?Sized>(
    state: &PureState,
    x: bool,
    t: bool,
    rng: &mut R,
) -> Result<bool> {
    let [p_same, p_flip, p_third] = measurement_probabilities(state, x, t)?;
    let u: f64 = rng.random::<f64>() * (p_same + p_flip + p_third);
    Ok(if u < p_same {
        false
    } else if u < p_same + p_flip {
        true
    } else {
        u >= p_same + p_flip + 0.5 * p_third
    })
}

/// One honest execution with fresh `t` and `r`.
pub fn run_honest<R: Rng + ?Sized>(
    x: bool,
    y: bool,
    rng: &mut R,
) -> (OneTimeTable, HonestRunTrace) {
    let t: bool = rng.random();
    let r: bool = rng.random();
    let sent = alice_prepare(x, t);
    let returned = sent
        .evolve(&bob_gate(y, r))
        .expect("diagonal sign gate preserves the norm");
    let output = alice_measure(&returned, x, t, rng).expect("dimensions agree");
    let table = OneTimeTable {
        x,
        y,
        e: output,
        f: r,
    };
    let trace = HonestRunTrace {
        x,
        t,
        y,
        r,
        sent,
        returned,
        basis_outcome: output ^ t,
        output,
    };
    (table, trace)
}

/// Result of evaluating AND on one table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AndOutcome {
    #[serde(with = "bit")]
    pub alice_out: bool,
    #[serde(with = "bit")]
    pub bob_out: bool,
    /// `a ⊕ x`, sent by Alice.
    #[serde(with = "bit")]
    pub a_msg: bool,
    /// `b ⊕ y`, sent by Bob.
    #[serde(with = "bit")]
    pub b_msg: bool,
}

/// Distributed AND: the XOR of the two outputs equals `a·b` on a correct table.
pub fn and_eval(table: &OneTimeTable, a: bool, b: bool) -> AndOutcome {
    let a_msg = a ^ table.x;
    let b_msg = b ^ table.y;
    AndOutcome {
        alice_out: (table.x & b_msg) ^ table.e,
        bob_out: (a_msg & b) ^ table.f,
        a_msg,
        b_msg,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use approx::assert_abs_diff_eq;

    const BITS: [bool; 2] = [false, true];

    #[test]
    fn prepared_states() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s00 = alice_prepare(false, false);
        let s11 = alice_prepare(true, true);
        let expect = |s: &PureState, v: [f64; 3]| {
            for (k, want) in v.iter().enumerate() {
                assert_eq!(s.amplitude(k), cr(*want));
            }
        };
        expect(&s00, [h, 0.0, h]);
        expect(&s11, [0.0, h, -h]);
        assert_abs_diff_eq!(s00.inner(&alice_prepare(false, true)).unwrap().norm(), 0.0);
    }

    #[test]
    fn gates() {
        let diag = |g: &CMatrix| [g[(0, 0)].re, g[(1, 1)].re, g[(2, 2)].re];
        assert_eq!(bob_gate(false, false), CMatrix::identity(3, 3));
        assert_eq!(diag(&bob_gate(true, false)), [1.0, -1.0, 1.0]);
        assert_eq!(diag(&bob_gate(false, true)), [-1.0, -1.0, 1.0]);
        for y in BITS {
            for r in BITS {
                let g = bob_gate(y, r);
                assert_eq!(&g * &g, CMatrix::identity(3, 3));
                assert_eq!(&g * g.adjoint(), CMatrix::identity(3, 3));
                for y2 in BITS {
                    for r2 in BITS {
                        let h = bob_gate(y2, r2);
                        assert_eq!(&g * &h, &h * &g);
                    }
                }
            }
        }
    }

    #[test]
    fn measurement_is_deterministic_for_all_honest_tuples() {
        for x in BITS {
            for t in BITS {
                for y in BITS {
                    for r in BITS {
                        let returned = alice_prepare(x, t).evolve(&bob_gate(y, r)).unwrap();
                        let p = measurement_probabilities(&returned, x, t).unwrap();
                        let bit = (x & y) ^ r;
                        let expected = if bit {
                            [0.0, 1.0, 0.0]
                        } else {
                            [1.0, 0.0, 0.0]
                        };
                        for k in 0..3 {
                            assert_abs_diff_eq!(p[k], expected[k], epsilon = 1e-15);
                        }
                        let mut rng = substream(1, "det", 0);
                        for _ in 0..20 {
                            assert_eq!(alice_measure(&returned, x, t, &mut rng).unwrap(), bit);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn third_outcome_is_a_fair_coin() {
        let mut rng = substream(3, "coin", 0);
        let n = 100_000;
        let state = PureState::basis(3, 0);
        let ones = (0..n)
            .filter(|_| alice_measure(&state, true, false, &mut rng).unwrap())
            .count() as f64;
        let sigma = (0.25 / n as f64).sqrt();
        assert!((ones / n as f64 - 0.5).abs() < 3.0 * sigma);
    }

    #[test]
    fn honest_runs_are_correct() {
        let mut rng = substream(5, "honest", 0);
        for _ in 0..2000 {
            for x in BITS {
                for y in BITS {
                    let (table, trace) = run_honest(x, y, &mut rng);
                    assert!(table.is_correct());
                    assert_eq!(trace.basis_outcome, trace.t ^ (x & y) ^ trace.r);
                    assert_eq!(trace.sent, alice_prepare(x, trace.t));
                }
            }
        }
    }

    #[test]
    fn and_on_honest_tables() {
        let mut rng = substream(9, "and", 0);
        for _ in 0..200 {
            let (table, _) = run_honest(rng.random(), rng.random(), &mut rng);
            for a in BITS {
                for b in BITS {
                    let out = and_eval(&table, a, b);
                    assert_eq!(out.alice_out ^ out.bob_out, a & b);
                }
            }
        }
        let (honest, _) = run_honest(true, true, &mut rng);
        let corrupted = OneTimeTable {
            e: !honest.e,
            ..honest
        };
        let out = and_eval(&corrupted, true, true);
        assert_eq!(out.alice_out ^ out.bob_out, !(true & true));
    }

    #[test]
    fn tables_serialize_bits_as_integers() {
        let t = OneTimeTable {
            x: true,
            y: false,
            e: true,
            f: true,
        };
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(json, r#"{"x":1,"y":0,"e":1,"f":1}"#);
        assert_eq!(serde_json::from_str::<OneTimeTable>(&json).unwrap(), t);
        assert!(serde_json::from_str::<OneTimeTable>(r#"{"x":2,"y":0,"e":1,"f":1}"#).is_err());
    }
}
