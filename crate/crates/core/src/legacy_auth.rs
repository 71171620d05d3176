//! The legacy MySQL password hash and challenge-response scramble.
//!
//! The protocol: both the password and the eight character challenge are fed
//! through [`hash_password`], producing two 31-bit halves each. The XOR of
//! the two hashes seeds a tiny two-word generator over `n = 2^30 - 1`; eight
//! generator digits (offset by 64) XORed with a ninth digit form the eight
//! response bytes sent on the wire.
//!
//! Everything downstream of the hash is parameterised by [`ScrambleParams`]
//! so the attack can be exercised on shrunken domains where exhaustive
//! enumeration is feasible.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigUint;
use rand_core::RngCore;

/// Two 31-bit halves of a legacy password (or challenge) hash.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct HashHalves {
    pub h1: u32,
    pub h2: u32,
}

impl HashHalves {
    pub const fn new(h1: u32, h2: u32) -> Self {
        HashHalves { h1, h2 }
    }
}

/// Rendered as two fixed-width lowercase hex fields, `h1:h2`.
impl fmt::Display for HashHalves {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:08x}:{:08x}", self.h1, self.h2)
    }
}

impl FromStr for HashHalves {
    type Err = AuthError;

    fn from_str(s: &str) -> Result<Self, AuthError> {
        let bad = || AuthError::BadHashLiteral {
            literal: String::from(s),
        };
        let (a, b) = s.split_once(':').ok_or_else(bad)?;
        if a.len() != 8 || b.len() != 8 {
            return Err(bad());
        }
        let h1 = u32::from_str_radix(a, 16).map_err(|_| bad())?;
        let h2 = u32::from_str_radix(b, 16).map_err(|_| bad())?;
        Ok(HashHalves { h1, h2 })
    }
}

/// Domain parameters for the scramble and for the attack geometry.
///
/// The deployed protocol uses `deployed()`: 32-bit seed halves and modulus
/// `2^30 - 1`. Toy domains keep the `2^w / n ~ 4` ratio so the attack's
/// branching structure carries over.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ScrambleParams {
    /// Generator modulus `n`.
    pub modulus: u64,
    /// Number of response bytes (generator steps before the extra digit).
    pub rounds: usize,
    /// Digits lie in `[0, digit_span)`; the wire uses 31.
    pub digit_span: u64,
    /// Added to each digit before the XOR mask; the wire uses 64.
    pub digit_offset: u8,
    /// Constant folded into the second generator word each step.
    pub additive: u64,
    /// Seed halves live in `[0, 2^half_width_bits)`.
    pub half_width_bits: u32,
}

impl ScrambleParams {
    /// Deployed-protocol parameters.
    pub const fn deployed() -> Self {
        ScrambleParams {
            modulus: (1 << 30) - 1,
            rounds: 8,
            digit_span: 31,
            digit_offset: 64,
            additive: 33,
            half_width_bits: 32,
        }
    }

    /// Shrunken domain: seed halves in `[0, 2^half_width_bits)`, modulus
    /// `2^(half_width_bits - 2) - 1`, other constants as deployed.
    pub const fn toy(half_width_bits: u32) -> Self {
        ScrambleParams {
            modulus: (1 << (half_width_bits - 2)) - 1,
            rounds: 8,
            digit_span: 31,
            digit_offset: 64,
            additive: 33,
            half_width_bits,
        }
    }

    pub fn validate(&self) -> Result<(), AuthError> {
        let ok = self.modulus > self.digit_span
            && self.digit_span > 1
            && self.rounds >= 1
            && self.half_width_bits >= 1
            && self.half_width_bits <= 32
            && (self.digit_offset as u64 + self.digit_span) <= 256;
        if ok {
            Ok(())
        } else {
            Err(AuthError::BadParams)
        }
    }

    /// Upper edge of the seed domain, `2^half_width_bits`.
    pub fn half_width(&self) -> u64 {
        1u64 << self.half_width_bits
    }
}

impl Default for ScrambleParams {
    fn default() -> Self {
        ScrambleParams::deployed()
    }
}

/// Classic wrapping 32-bit hash; space and tab do not contribute.
/// Both accumulators are truncated to 31 bits on output.
pub fn hash_password(password: &[u8]) -> HashHalves {
    let mut nr: u32 = 1_345_345_333;
    let mut add: u32 = 7;
    let mut nr2: u32 = 0x1234_5671;
    for &byte in password {
        if byte == b' ' || byte == b'\t' {
            continue;
        }
        let tmp = byte as u32;
        nr ^= ((nr & 63).wrapping_add(add))
            .wrapping_mul(tmp)
            .wrapping_add(nr << 8);
        nr2 = nr2.wrapping_add((nr2 << 8) ^ nr);
        add = add.wrapping_add(tmp);
    }
    HashHalves {
        h1: nr & 0x7FFF_FFFF,
        h2: nr2 & 0x7FFF_FFFF,
    }
}

/// Generator state. Seeds enter unreduced; the first step's reduction makes
/// pre-reducing them mod `n` observationally identical.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct PrngState {
    pub s1: u64,
    pub s2: u64,
}

impl PrngState {
    pub const fn new(s1: u64, s2: u64) -> Self {
        PrngState { s1, s2 }
    }
}

/// One generator step. Returns the new state and the emitted digit
/// `floor(digit_span * s1' / n)`, computed in exact integer arithmetic.
pub fn prng_step(state: PrngState, params: &ScrambleParams) -> (PrngState, u64) {
    let n = params.modulus;
    let s1 = (3 * state.s1 + state.s2) % n;
    let s2 = (s1 + state.s2 + params.additive) % n;
    let digit = params.digit_span * s1 / n;
    (PrngState { s1, s2 }, digit)
}

/// Response bytes as sent on the wire; length equals `params.rounds`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Response(pub Vec<u8>);

impl Response {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Checks length and the byte-range invariant `[offset, offset + span + 1)`.
    pub fn validate(&self, params: &ScrambleParams) -> Result<(), AuthError> {
        if self.0.len() != params.rounds {
            return Err(AuthError::ResponseLength {
                expected: params.rounds,
                got: self.0.len(),
            });
        }
        for (index, &value) in self.0.iter().enumerate() {
            if !byte_in_range(value, params) {
                return Err(AuthError::ResponseByteRange { index, value });
            }
        }
        Ok(())
    }
}

impl fmt::Display for Response {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{:02x}", b)?;
        }
        Ok(())
    }
}

/// True iff `value` can appear in a response: digit plus offset, XOR a value
/// below 32, which never leaves `[offset, offset + 32)` for the wire layout.
pub fn byte_in_range(value: u8, params: &ScrambleParams) -> bool {
    let lo = params.digit_offset as u64;
    let hi = lo + 32;
    (value as u64) >= lo && (value as u64) < hi
}

/// Scramble from raw generator seeds `(x, y)`; the wire case is
/// `x = p1 ^ c1`, `y = p2 ^ c2`.
pub fn scramble_seeds(x: u64, y: u64, params: &ScrambleParams) -> Response {
    let mut state = PrngState::new(x, y);
    let mut bytes = Vec::with_capacity(params.rounds);
    for _ in 0..params.rounds {
        let (next, digit) = prng_step(state, params);
        state = next;
        bytes.push(digit as u8 + params.digit_offset);
    }
    let (_, extra) = prng_step(state, params);
    for b in &mut bytes {
        *b ^= extra as u8;
    }
    Response(bytes)
}

/// Response a client holding `password_hash` sends for `challenge_hash`.
pub fn scramble(
    password_hash: HashHalves,
    challenge_hash: HashHalves,
    params: &ScrambleParams,
) -> Response {
    scramble_seeds(
        (password_hash.h1 ^ challenge_hash.h1) as u64,
        (password_hash.h2 ^ challenge_hash.h2) as u64,
        params,
    )
}

/// Server-side check: does `response` match `password_hash` under the
/// challenge text? Wrong response length is an error, not a mismatch.
pub fn verify(
    password_hash: HashHalves,
    challenge_text: &[u8],
    response: &[u8],
    params: &ScrambleParams,
) -> Result<bool, AuthError> {
    if response.len() != params.rounds {
        return Err(AuthError::ResponseLength {
            expected: params.rounds,
            got: response.len(),
        });
    }
    let expected = scramble(password_hash, hash_password(challenge_text), params);
    Ok(expected.as_bytes() == response)
}

/// Challenge characters: printable ASCII excluding space (and control tab).
pub const CHALLENGE_ALPHABET_FIRST: u8 = 0x21;
pub const CHALLENGE_ALPHABET_LAST: u8 = 0x7E;
pub const CHALLENGE_LENGTH: usize = 8;

const ALPHABET_SIZE: u32 =
    (CHALLENGE_ALPHABET_LAST - CHALLENGE_ALPHABET_FIRST) as u32 + 1;

/// Draws one challenge text; rejection sampling keeps the draw unbiased and
/// reproducible for a fixed RNG stream.
pub fn random_challenge_text(rng: &mut impl RngCore) -> [u8; CHALLENGE_LENGTH] {
    let mut out = [0u8; CHALLENGE_LENGTH];
    let limit = u32::MAX - u32::MAX % ALPHABET_SIZE;
    for slot in &mut out {
        let v = loop {
            let v = rng.next_u32();
            if v < limit {
                break v % ALPHABET_SIZE;
            }
        };
        *slot = CHALLENGE_ALPHABET_FIRST + v as u8;
    }
    out
}

/// The i-th generator word as a linear form: after `index` steps,
/// `s1 = (alpha*X + beta*Y + additive*gamma) mod n` for seeds `(X, Y)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinearForm {
    pub index: usize,
    pub alpha: BigUint,
    pub beta: BigUint,
    pub gamma: BigUint,
    /// Largest multiple of `n` subtractable before the form goes negative on
    /// the seed domain: `ceil((2^w (alpha+beta) + additive*gamma) / n) - 1`.
    pub delta_max: BigUint,
}

impl LinearForm {
    /// `floor(10^4 * alpha / beta)`: the strip slope truncated to four
    /// decimals, as an integer count of ten-thousandths.
    pub fn slope_ten_thousandths(&self) -> BigUint {
        self.alpha.clone() * 10_000u32 / self.beta.clone()
    }
}

/// Coefficients of the `index`-th generator word (`index >= 1`).
///
/// Both words stay linear in the seeds: with `a_i` the s1-form and `A_i` the
/// s2-form, `a_i = 3 a_(i-1) + A_(i-1)` and `A_i = a_i + A_(i-1)` plus one
/// fresh additive, seeded `a_1 = (3, 1, 0)`, `A_1 = (3, 2, 1)`.
pub fn linear_coefficients(index: usize, params: &ScrambleParams) -> LinearForm {
    assert!(index >= 1, "forms are indexed from 1");
    let mut a = [BigUint::from(3u32), BigUint::from(1u32), BigUint::from(0u32)];
    let mut s = [BigUint::from(3u32), BigUint::from(2u32), BigUint::from(1u32)];
    for _ in 1..index {
        for k in 0..3 {
            a[k] = &a[k] * 3u32 + &s[k];
        }
        for k in 0..3 {
            s[k] = &a[k] + &s[k];
        }
        s[2] += 1u32;
    }
    let [alpha, beta, gamma] = a;
    let width = BigUint::from(1u32) << params.half_width_bits;
    let n = BigUint::from(params.modulus);
    let numer = &width * (&alpha + &beta) + BigUint::from(params.additive) * &gamma;
    let delta_max = (&numer + &n - BigUint::from(1u32)) / &n - BigUint::from(1u32);
    LinearForm {
        index,
        alpha,
        beta,
        gamma,
        delta_max,
    }
}

/// Evaluates a form at integer seeds, without the mod-n reduction.
pub fn form_value(form: &LinearForm, x: u64, y: u64, params: &ScrambleParams) -> BigUint {
    &form.alpha * x + &form.beta * y + &form.gamma * params.additive
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum AuthError {
    ResponseLength { expected: usize, got: usize },
    ResponseByteRange { index: usize, value: u8 },
    BadHashLiteral { literal: String },
    BadParams,
}

impl fmt::Display for AuthError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AuthError::ResponseLength { expected, got } => {
                write!(f, "response must be {expected} bytes, got {got}")
            }
            AuthError::ResponseByteRange { index, value } => {
                write!(f, "response byte {index} is {value:#04x}, outside the scramble range")
            }
            AuthError::BadHashLiteral { literal } => {
                write!(f, "expected two 8-digit hex fields `h1:h2`, got {literal:?}")
            }
            AuthError::BadParams => write!(f, "scramble parameters violate their invariants"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for AuthError {}
