pub mod error;
pub mod fgl;
pub mod hom;
pub mod legendre;
pub mod ring;
pub mod series;
pub mod value;
pub mod verify;
pub mod witt;

pub use error::{Error, Result};
pub use hom::RingMap;
pub use ring::{Elem, RingSpec};
pub use series::TruncatedSeries;
pub use value::{divides_all_coeffs, poly_derivative, ring_arith, ArithOp, ArithResult, RingValue};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/rings.md")]
    mod rings {}
    #[doc = include_str!("../../../book/src/series.md")]
    mod series {}
    #[doc = include_str!("../../../book/src/formal-groups.md")]
    mod formal_groups {}
    #[doc = include_str!("../../../book/src/witt-vectors.md")]
    mod witt_vectors {}
    #[doc = include_str!("../../../book/src/cartier.md")]
    mod cartier {}
    #[doc = include_str!("../../../book/src/lambda.md")]
    mod lambda {}
    #[doc = include_str!("../../../book/src/legendre.md")]
    mod legendre {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
