//! Monte Carlo BER-vs-SNR tables for the constellations without a
//! closed-form Gray-coded BER formula (M = 8, 32, 128, 512).
//!
//! Generated by `examples/gen_cross_snr_tables.rs` (seed 0x5eedcab1e5,
//! 1000000 symbols per grid point). Do not edit by hand.

pub(super) const GRID_START_DB: f64 = 0.0;
pub(super) const GRID_STEP_DB: f64 = 0.5;
pub(super) const GRID_LEN: usize = 85;

pub(super) const BER_M8: [f64; GRID_LEN] = [
    2.48218e-1,
    2.3627066666666666e-1,
    2.2433233333333333e-1,
    2.1193033333333333e-1,
    1.99036e-1,
    1.8713866666666668e-1,
    1.7502166666666666e-1,
    1.6341966666666666e-1,
    1.50733e-1,
    1.3908733333333334e-1,
    1.2738233333333332e-1,
    1.1559966666666667e-1,
    1.0396666666666667e-1,
    9.311433333333333e-2,
    8.1935e-2,
    7.118033333333333e-2,
    6.1106e-2,
    5.1728e-2,
    4.308633333333333e-2,
    3.533033333333333e-2,
    2.8411333333333334e-2,
    2.2051333333333333e-2,
    1.6861e-2,
    1.2444333333333333e-2,
    9.058e-3,
    6.231666666666667e-3,
    4.096e-3,
    2.579e-3,
    1.5646666666666667e-3,
    9.273333333333333e-4,
    4.893333333333334e-4,
    2.3966666666666667e-4,
    1.05e-4,
    4.1e-5,
    1.3e-5,
    4e-6,
    1.3333333333333334e-6,
    6.666666666666667e-7,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
];

pub(super) const BER_M32: [f64; GRID_LEN] = [
    3.673376e-1,
    3.577782e-1,
    3.475592e-1,
    3.365998e-1,
    3.25929e-1,
    3.143506e-1,
    3.027336e-1,
    2.905068e-1,
    2.781196e-1,
    2.66693e-1,
    2.537292e-1,
    2.41786e-1,
    2.293246e-1,
    2.166372e-1,
    2.043388e-1,
    1.921018e-1,
    1.802942e-1,
    1.688514e-1,
    1.567944e-1,
    1.446618e-1,
    1.330392e-1,
    1.21716e-1,
    1.097576e-1,
    9.87688e-2,
    8.787e-2,
    7.68418e-2,
    6.683e-2,
    5.70118e-2,
    4.7977e-2,
    3.9389e-2,
    3.19164e-2,
    2.52388e-2,
    1.9495e-2,
    1.46526e-2,
    1.06396e-2,
    7.4718e-3,
    5.1198e-3,
    3.359e-3,
    2.013e-3,
    1.1888e-3,
    6.714e-4,
    3.39e-4,
    1.774e-4,
    7.06e-5,
    2.86e-5,
    1.06e-5,
    5.8e-6,
    2e-6,
    2e-7,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
];

pub(super) const BER_M128: [f64; GRID_LEN] = [
    4.055392857142857e-1,
    3.9871142857142855e-1,
    3.914274285714286e-1,
    3.842292857142857e-1,
    3.76813e-1,
    3.6859071428571427e-1,
    3.60199e-1,
    3.51901e-1,
    3.430075714285714e-1,
    3.339214285714286e-1,
    3.249187142857143e-1,
    3.15603e-1,
    3.0608085714285715e-1,
    2.95761e-1,
    2.8585e-1,
    2.7504942857142856e-1,
    2.648911428571429e-1,
    2.5420785714285715e-1,
    2.4342871428571428e-1,
    2.3226657142857143e-1,
    2.2090128571428572e-1,
    2.1041142857142858e-1,
    1.9923085714285715e-1,
    1.8895185714285714e-1,
    1.7814028571428572e-1,
    1.6775214285714285e-1,
    1.5778928571428572e-1,
    1.4776857142857142e-1,
    1.3788485714285714e-1,
    1.2850242857142857e-1,
    1.1916457142857143e-1,
    1.1034457142857143e-1,
    1.0116414285714286e-1,
    9.239071428571428e-2,
    8.355528571428572e-2,
    7.518828571428571e-2,
    6.689657142857143e-2,
    5.8647285714285714e-2,
    5.119014285714286e-2,
    4.3699714285714286e-2,
    3.6967285714285716e-2,
    3.0613714285714286e-2,
    2.4852e-2,
    1.9716285714285714e-2,
    1.5421e-2,
    1.1592714285714286e-2,
    8.539428571428571e-3,
    6.140428571428572e-3,
    4.196285714285714e-3,
    2.7292857142857145e-3,
    1.704857142857143e-3,
    1.0441428571428572e-3,
    5.874285714285714e-4,
    2.965714285714286e-4,
    1.39e-4,
    6.942857142857143e-5,
    2.8285714285714287e-5,
    9.142857142857142e-6,
    2.8571428571428573e-6,
    7.142857142857143e-7,
    2.857142857142857e-7,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
];

pub(super) const BER_M512: [f64; GRID_LEN] = [
    4.2754888888888887e-1,
    4.2163433333333333e-1,
    4.164913333333333e-1,
    4.10653e-1,
    4.0477522222222223e-1,
    3.98316e-1,
    3.9173477777777777e-1,
    3.857474444444444e-1,
    3.7886433333333336e-1,
    3.717924444444444e-1,
    3.646352222222222e-1,
    3.5741988888888887e-1,
    3.5026744444444446e-1,
    3.4257611111111114e-1,
    3.349841111111111e-1,
    3.268771111111111e-1,
    3.1925488888888887e-1,
    3.109846666666667e-1,
    3.0243533333333333e-1,
    2.9424155555555553e-1,
    2.858556666666667e-1,
    2.7694633333333335e-1,
    2.684836666666667e-1,
    2.599388888888889e-1,
    2.5093288888888887e-1,
    2.4161944444444444e-1,
    2.3267233333333334e-1,
    2.235842222222222e-1,
    2.1412933333333334e-1,
    2.0463755555555554e-1,
    1.9535244444444444e-1,
    1.8564355555555556e-1,
    1.7624977777777778e-1,
    1.669231111111111e-1,
    1.5802955555555556e-1,
    1.4907622222222222e-1,
    1.4030922222222222e-1,
    1.3190322222222223e-1,
    1.2357888888888889e-1,
    1.1535244444444444e-1,
    1.07548e-1,
    1.0007133333333333e-1,
    9.266166666666667e-2,
    8.540166666666667e-2,
    7.846455555555555e-2,
    7.151488888888889e-2,
    6.495477777777778e-2,
    5.838822222222222e-2,
    5.183022222222222e-2,
    4.5783555555555557e-2,
    3.969911111111111e-2,
    3.412755555555556e-2,
    2.874188888888889e-2,
    2.3964666666666665e-2,
    1.9428e-2,
    1.5508888888888888e-2,
    1.212588888888889e-2,
    9.22e-3,
    6.723444444444444e-3,
    4.826e-3,
    3.311e-3,
    2.1934444444444445e-3,
    1.370888888888889e-3,
    8.226666666666666e-4,
    4.6144444444444445e-4,
    2.591111111111111e-4,
    1.268888888888889e-4,
    5.5e-5,
    2.3444444444444444e-5,
    7.222222222222222e-6,
    3.2222222222222222e-6,
    1.2222222222222221e-6,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
    0e0,
];
