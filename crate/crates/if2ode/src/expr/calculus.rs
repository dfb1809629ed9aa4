//! Symbolic differentiation and light simplification.
//!
//! Simplification is deliberately shallow: constant folding, 0/1 identity
//! elimination and nested-negation flattening. It never changes the value of
//! the expression at any point where the original evaluates.

use num_complex::Complex64;

use super::{Expr, Func};

fn boxed(e: Expr) -> Box<Expr> {
    Box::new(e)
}

fn is_const(e: &Expr, v: f64) -> bool {
    matches!(e, Expr::Constant(c) if *c == v)
}

// Smart constructors keep derivative trees from exploding; the identities
// they apply are value-preserving at every point where both sides evaluate.

pub(crate) fn add(a: Expr, b: Expr) -> Expr {
    if is_const(&a, 0.0) {
        return b;
    }
    if is_const(&b, 0.0) {
        return a;
    }
    Expr::Add(boxed(a), boxed(b))
}

pub(crate) fn sub(a: Expr, b: Expr) -> Expr {
    if is_const(&b, 0.0) {
        return a;
    }
    if a == b {
        return Expr::Constant(0.0);
    }
    if is_const(&a, 0.0) {
        return neg(b);
    }
    Expr::Sub(boxed(a), boxed(b))
}

pub(crate) fn mul(a: Expr, b: Expr) -> Expr {
    if is_const(&a, 0.0) || is_const(&b, 0.0) {
        return Expr::Constant(0.0);
    }
    if is_const(&a, 1.0) {
        return b;
    }
    if is_const(&b, 1.0) {
        return a;
    }
    Expr::Mul(boxed(a), boxed(b))
}

pub(crate) fn div(a: Expr, b: Expr) -> Expr {
    if is_const(&b, 1.0) {
        return a;
    }
    Expr::Div(boxed(a), boxed(b))
}

pub(crate) fn neg(a: Expr) -> Expr {
    match a {
        Expr::Neg(inner) => *inner,
        Expr::Constant(c) => Expr::Constant(-c),
        other => Expr::Neg(boxed(other)),
    }
}

pub(crate) fn pow(a: Expr, b: Expr) -> Expr {
    if is_const(&b, 1.0) {
        return a;
    }
    if is_const(&b, 0.0) {
        return Expr::Constant(1.0);
    }
    Expr::Pow(boxed(a), boxed(b))
}

pub(crate) fn apply(f: Func, a: Expr) -> Expr {
    Expr::Apply(f, boxed(a))
}

fn con(c: f64) -> Expr {
    Expr::Constant(c)
}

/// d/dx by the usual sum, product, quotient and chain rules.
///
/// `Pow(f, g)` with non-constant exponent is differentiated through the
/// `exp(g * ln f)` rewrite and is therefore undefined for `f <= 0`; the
/// derivative of `abs` is left as `f/abs(f) * f'`, which fails at a zero of
/// `f` only when evaluated there.
pub fn differentiate(e: &Expr) -> Expr {
    match e {
        Expr::Constant(_) => con(0.0),
        Expr::Variable => con(1.0),
        Expr::Add(a, b) => add(differentiate(a), differentiate(b)),
        Expr::Sub(a, b) => sub(differentiate(a), differentiate(b)),
        Expr::Mul(a, b) => add(
            mul(differentiate(a), (**b).clone()),
            mul((**a).clone(), differentiate(b)),
        ),
        Expr::Div(a, b) => div(
            sub(
                mul(differentiate(a), (**b).clone()),
                mul((**a).clone(), differentiate(b)),
            ),
            pow((**b).clone(), con(2.0)),
        ),
        Expr::Neg(a) => neg(differentiate(a)),
        Expr::Pow(f, g) => match &**g {
            Expr::Constant(n) => {
                // n * f^(n-1) * f'
                mul(
                    mul(con(*n), pow((**f).clone(), con(n - 1.0))),
                    differentiate(f),
                )
            }
            _ => {
                // f^g * (g' ln f + g f'/f)
                let fp = differentiate(f);
                let gp = differentiate(g);
                mul(
                    Expr::Pow(f.clone(), g.clone()),
                    add(
                        mul(gp, apply(Func::Ln, (**f).clone())),
                        mul((**g).clone(), div(fp, (**f).clone())),
                    ),
                )
            }
        },
        Expr::Apply(func, a) => {
            let inner = (**a).clone();
            let ap = differentiate(a);
            let outer = match func {
                Func::Exp => apply(Func::Exp, inner),
                Func::Ln => return div(ap, inner),
                Func::Sin => apply(Func::Cos, inner),
                Func::Cos => neg(apply(Func::Sin, inner)),
                Func::Tan => return div(ap, pow(apply(Func::Cos, inner), con(2.0))),
                Func::Sinh => apply(Func::Cosh, inner),
                Func::Cosh => apply(Func::Sinh, inner),
                Func::Tanh => sub(con(1.0), pow(apply(Func::Tanh, inner), con(2.0))),
                Func::Sqrt => return div(ap, mul(con(2.0), apply(Func::Sqrt, inner))),
                Func::Abs => div(inner.clone(), apply(Func::Abs, inner)),
            };
            mul(outer, ap)
        }
    }
}

/// Bottom-up simplification: fold constant subtrees, drop 0/1 identities,
/// flatten nested negation. Values are preserved at every valid point.
pub fn simplify(e: &Expr) -> Expr {
    let folded = match e {
        Expr::Constant(_) | Expr::Variable => e.clone(),
        Expr::Add(a, b) => add(simplify(a), simplify(b)),
        Expr::Sub(a, b) => sub(simplify(a), simplify(b)),
        Expr::Mul(a, b) => mul(simplify(a), simplify(b)),
        Expr::Div(a, b) => div(simplify(a), simplify(b)),
        Expr::Pow(a, b) => pow(simplify(a), simplify(b)),
        Expr::Neg(a) => neg(simplify(a)),
        Expr::Apply(f, a) => apply(*f, simplify(a)),
    };
    fold_constant_subtree(folded)
}

/// If the node has no `Variable` underneath and evaluates to a finite real,
/// replace it by that literal.
fn fold_constant_subtree(e: Expr) -> Expr {
    if matches!(e, Expr::Constant(_)) || !e.is_constant_tree() {
        return e;
    }
    match e.evaluate(Complex64::new(0.0, 0.0)) {
        Ok(v) if v.im == 0.0 && v.re.is_finite() => Expr::Constant(v.re),
        _ => e,
    }
}
