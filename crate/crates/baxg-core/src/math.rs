//! Scalar float routines, routed through `std` or `libm` so the crate
//! builds without the standard library.

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("baxg-core requires either the `std` or the `libm` feature");

macro_rules! shim {
    ($(fn $name:ident($($arg:ident),+) -> f64 = $libm:ident;)+) => {
        $(
            #[inline]
            pub fn $name($($arg: f64),+) -> f64 {
                #[cfg(feature = "std")]
                { f64::$name($($arg),+) }
                #[cfg(not(feature = "std"))]
                { libm::$libm($($arg),+) }
            }
        )+
    };
}

shim! {
    fn sqrt(x) -> f64 = sqrt;
    fn exp(x) -> f64 = exp;
    fn ln(x) -> f64 = log;
    fn ln_1p(x) -> f64 = log1p;
    fn tanh(x) -> f64 = tanh;
    fn abs(x) -> f64 = fabs;
    fn hypot(x, y) -> f64 = hypot;
    fn ceil(x) -> f64 = ceil;
}
