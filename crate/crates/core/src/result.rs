use num_traits::One;

use crate::rational::Rational;

/// Output of an approximation engine together with the guarantee it carries.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxResult {
    pub value: f64,
    /// Relative error parameter of the guarantee.
    pub delta: Rational,
    /// Grid resolution of the staircase tables that produced `value`.
    pub m_used: usize,
    /// `true` when the guarantee is one sided, `Vol <= value <= (1 + delta) Vol`;
    /// `false` for the two sided `(1 - delta) Vol <= value <= (1 + delta) Vol`.
    pub lower_bound_exact: bool,
    pub beta: Option<Rational>,
    pub epsilon: Option<Rational>,
    pub inner_delta: Option<Rational>,
}

impl ApproxResult {
    pub(crate) fn one_sided(value: f64, delta: Rational, m_used: usize) -> Self {
        Self {
            value,
            delta,
            m_used,
            lower_bound_exact: true,
            beta: None,
            epsilon: None,
            inner_delta: None,
        }
    }

    pub fn upper_factor(&self) -> Rational {
        Rational::one() + &self.delta
    }

    pub fn lower_factor(&self) -> Rational {
        if self.lower_bound_exact {
            Rational::one()
        } else {
            Rational::one() - &self.delta
        }
    }
}
