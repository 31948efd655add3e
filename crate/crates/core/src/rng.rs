//! Reproducible random streams.
//!
//! Every random draw in the crate comes from a [`Seed`]: a 64-bit key plus a
//! 64-bit stream index. The key is expanded with SplitMix64 into a 256-bit
//! ChaCha8 key and the stream index selects the ChaCha stream, so distinct
//! stream indices under one key never overlap. Replication `r` of a Monte
//! Carlo cell uses `Seed { key: cell_key, stream: r }`, independent of the
//! thread that happens to run it.
//!
//! Standard normal variates are produced by inversion: one 53-bit uniform in
//! the open interval `(0, 1)` per variate, mapped through Wichura's AS241
//! (PPND16) rational approximation of the normal quantile (relative accuracy
//! about 1e-16). Consumption is exactly one `u64` per variate.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Recorded in experiment metadata.
pub const RNG_NAME: &str = "ChaCha8Rng (rand_chacha 0.9); key = SplitMix64(seed key), stream = substream index; normals by AS241 inversion";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Seed {
    pub key: u64,
    pub stream: u64,
}

impl Seed {
    pub fn new(key: u64, stream: u64) -> Self {
        Self { key, stream }
    }

    pub fn substream(self, stream: u64) -> Self {
        Self {
            key: self.key,
            stream,
        }
    }

    /// A fresh key derived from this seed and `tag`, for nested streams.
    pub fn derive(self, tag: u64) -> Self {
        Self {
            key: derive_key(&[self.key, self.stream, tag]),
            stream: 0,
        }
    }

    pub fn rng(self) -> ChaCha8Rng {
        let mut state = self.key;
        let mut bytes = [0u8; 32];
        for chunk in bytes.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(bytes);
        rng.set_stream(self.stream);
        rng
    }
}

impl From<u64> for Seed {
    fn from(key: u64) -> Self {
        Self { key, stream: 0 }
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Order-sensitive hash of a sequence of words (SplitMix64 chaining).
pub fn derive_key(parts: &[u64]) -> u64 {
    let mut state = 0x6A09_E667_F3BC_C908u64;
    let mut out = splitmix64(&mut state);
    for &p in parts {
        state ^= p.wrapping_add(out);
        out = splitmix64(&mut state);
    }
    out
}

/// Uniform on the open interval `(0, 1)` with 53 bits of resolution.
pub fn open_uniform<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

pub fn standard_normal<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    normal_quantile(open_uniform(rng))
}

/// Standard normal quantile, Wichura (1988) algorithm AS241 / PPND16.
///
/// Returns `-inf`/`+inf` at 0/1 and NaN outside `[0, 1]`.
pub fn normal_quantile(p: f64) -> f64 {
    if !(0.0..=1.0).contains(&p) {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        return q * poly(&A, r) / poly(&B, r);
    }
    let r = if q < 0.0 { p } else { 1.0 - p };
    let r = (-r.ln()).sqrt();
    let val = if r <= 5.0 {
        let r = r - 1.6;
        poly(&C, r) / poly(&D, r)
    } else {
        let r = r - 5.0;
        poly(&E, r) / poly(&F, r)
    };
    if q < 0.0 {
        -val
    } else {
        val
    }
}

fn poly(coef: &[f64; 8], x: f64) -> f64 {
    coef.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

const A: [f64; 8] = [
    3.387_132_872_796_366_5,
    133.141_667_891_784_38,
    1_971.590_950_306_551_3,
    13_731.693_765_509_461,
    45_921.953_931_549_87,
    67_265.770_927_008_7,
    33_430.575_583_588_13,
    2_509.080_928_730_122_7,
];
const B: [f64; 8] = [
    1.0,
    42.313_330_701_600_91,
    687.187_007_492_057_9,
    5_394.196_021_424_751,
    21_213.794_301_586_597,
    39_307.895_800_092_71,
    28_729.085_735_721_943,
    5_226.495_278_852_545,
];
const C: [f64; 8] = [
    1.423_437_110_749_683_5,
    4.630_337_846_156_546,
    5.769_497_221_460_691,
    3.647_848_324_763_204_5,
    1.270_458_252_452_368_4,
    0.241_780_725_177_450_6,
    0.022_723_844_989_269_184,
    7.745_450_142_783_414e-4,
];
const D: [f64; 8] = [
    1.0,
    2.053_191_626_637_759,
    1.676_384_830_183_803_8,
    0.689_767_334_985_1,
    0.148_103_976_427_480_08,
    0.015_198_666_563_616_457,
    5.475_938_084_995_345e-4,
    1.050_750_071_644_416_9e-9,
];
const E: [f64; 8] = [
    6.657_904_643_501_103,
    5.463_784_911_164_114,
    1.784_826_539_917_291_3,
    0.296_560_571_828_504_9,
    0.026_532_189_526_576_124,
    0.001_242_660_947_388_078_4,
    2.711_555_568_743_487_6e-5,
    2.010_334_399_292_288e-7,
];
const F: [f64; 8] = [
    1.0,
    0.599_832_206_555_888,
    0.136_929_880_922_735_8,
    0.014_875_361_290_850_615,
    7.868_691_311_456_133e-4,
    1.846_318_317_510_054_8e-5,
    1.421_511_758_316_446e-7,
    2.044_263_103_389_939_7e-15,
];
