use crate::Scalar;

/// Outcome of a golden-section search.
#[derive(Debug, Clone, Copy)]
pub struct GoldenResult<F> {
    pub x: F,
    pub fx: F,
    /// Final bracket.
    pub lo: F,
    pub hi: F,
    pub evaluations: usize,
    /// The bracket never moved away from the initial lower / upper edge.
    pub at_lower_edge: bool,
    pub at_upper_edge: bool,
}

/// Golden-section search for the minimum of a unimodal `f` on `[a, b]`,
/// stopping once the bracket is narrower than `tol` or after `max_iter`
/// shrink steps.
pub fn golden_section<F: Scalar>(
    mut f: impl FnMut(F) -> F,
    a: F,
    b: F,
    tol: F,
    max_iter: usize,
) -> GoldenResult<F> {
    let inv_phi = F::of(0.618_033_988_749_894_9);
    let (a0, b0) = (a, b);
    let (mut a, mut b) = (a, b);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut evaluations = 2;
    let mut iter = 0;
    while (b - a) > tol && iter < max_iter {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
        evaluations += 1;
        iter += 1;
    }
    let (x, fx) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    GoldenResult {
        x,
        fx,
        lo: a,
        hi: b,
        evaluations,
        at_lower_edge: a == a0,
        at_upper_edge: b == b0,
    }
}
