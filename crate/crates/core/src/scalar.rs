use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{Num, Signed};

/// Scalars with exact field arithmetic and a total order.
///
/// Möbius normalization and label matching compare coefficients for equality,
/// so floating point types do not qualify.
pub trait ExactScalar:
    Num + Signed + Clone + Ord + Debug + Display + FromStr + Send + Sync
{
    /// Numerator and denominator of the reduced form, as decimal strings.
    fn num_den(&self) -> (String, String);
}

impl<T> ExactScalar for num_rational::Ratio<T>
where
    T: num_integer::Integer + Signed + Clone + Debug + Display + Send + Sync,
    num_rational::Ratio<T>: FromStr,
{
    fn num_den(&self) -> (String, String) {
        (self.numer().to_string(), self.denom().to_string())
    }
}
