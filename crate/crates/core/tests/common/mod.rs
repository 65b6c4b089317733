#![allow(dead_code, clippy::excessive_precision)]

use proptest::prelude::*;

use lmg_core::model::{make_params, ModelParams};

/// Reference values from an independent 40-digit dense diagonalization of
/// the full Fock space.
pub mod oracle {
    pub const N7_SPECTRUM: [f64; 8] = [
        -3.3405152918506672,
        -2.0295600917945387,
        -0.74894904354844959,
        0.47309723404996952,
        1.6073739829586995,
        2.6157557867831263,
        3.4820903524404173,
        3.9407070709614429,
    ];
    /// `(N, V, W, spectrum)`.
    pub const SPECTRA: [(usize, f64, f64, &[f64]); 3] = [
        (
            10,
            -1.2,
            0.4,
            &[
                -5.0697783973292062,
                -4.0668849691404219,
                -2.8641332624821359,
                -1.5766807362651966,
                -0.2569619503410521,
                1.0535719082073284,
                2.3164219512083544,
                3.4945678653652904,
                4.500331367741672,
                5.4954259318329998,
                5.7741202912023678,
            ],
        ),
        (
            12,
            2.0,
            -1.5,
            &[
                -11.324343687988505,
                -11.323691842493345,
                -8.2113479298532384,
                -8.143696738096484,
                -6.2734149009664224,
                -5.4736556684649187,
                -4.0666812476690476,
                -2.5892601720431669,
                -0.98526435970126661,
                0.68861466572833283,
                2.3954740810553252,
                4.0916897553695823,
                5.7155780451231544,
            ],
        ),
        (
            5,
            0.3,
            1.1,
            &[
                -1.9608512112590421,
                -0.096395607203984606,
                1.3401822540782275,
                2.3457091734246418,
                2.9706689571808146,
                3.1006864337793428,
            ],
        ),
    ];
    pub const N7_GROUND: [f64; 4] =
        [-0.98295325902186939, 0.18120991316362153, -0.030891077281940999, 0.0034057736095702453];
    pub const N7_LINEAR_ANGLES: [f64; 3] = [3.1347810932023944, 3.2033849968903778, 9.7893892472678483];
    pub const N20_GROUND_ENERGY: f64 = -9.8469224711259771;
    pub const N20_GROUND: [f64; 11] = [
        0.98209411385189,
        -0.18414906506260032,
        0.038931922109130595,
        -0.0078963543288144679,
        0.0014715379739195123,
        -0.00024441251438836383,
        3.4994171908383852e-5,
        -4.126305392275558e-6,
        3.7239443801014553e-7,
        -2.2288281801386548e-8,
        5.7326456959772614e-10,
    ];
    pub const N20_LINEAR_ANGLES: [f64; 10] = [
        3.1415926524432641,
        3.1415926981663568,
        3.1415919088009172,
        3.1416009062005778,
        3.1415226652459616,
        3.1420814786237403,
        3.1386495764900519,
        3.1573855439519856,
        3.0637066101024662,
        3.5123011811162344,
    ];
}

/// `(V, W)` with `|W| <= 0.9 |V|` and `0.1 <= |V| <= 3`.
pub fn trig_vw() -> impl Strategy<Value = (f64, f64)> {
    (0.1f64..3.0, any::<bool>(), -0.9f64..0.9).prop_map(|(a, neg, r)| {
        let v = if neg { -a } else { a };
        (v, r * a)
    })
}

pub fn trig_params(max_n: usize) -> impl Strategy<Value = ModelParams> {
    (1..=max_n, trig_vw()).prop_map(|(n, (v, w))| make_params(n, v, w).unwrap())
}

/// Real unit vector of the given length.
pub fn unit_vector(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, len)
        .prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-4)
        .prop_map(|v| {
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.into_iter().map(|x| x / n).collect()
        })
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
