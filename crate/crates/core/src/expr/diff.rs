use super::{BinOp, Expr, Func};

fn is_const(e: &Expr, value: f64) -> bool {
    matches!(e, Expr::Const(c) if *c == value)
}

fn add(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x + y),
        _ if is_const(&a, 0.0) => b,
        _ if is_const(&b, 0.0) => a,
        _ => Expr::Binary(BinOp::Add, Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x - y),
        _ if is_const(&b, 0.0) => a,
        _ if is_const(&a, 0.0) => neg(b),
        _ => Expr::Binary(BinOp::Sub, Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
        _ if is_const(&a, 0.0) || is_const(&b, 0.0) => Expr::Const(0.0),
        _ if is_const(&a, 1.0) => b,
        _ if is_const(&b, 1.0) => a,
        _ => Expr::Binary(BinOp::Mul, Box::new(a), Box::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        _ if is_const(&a, 0.0) => Expr::Const(0.0),
        _ if is_const(&b, 1.0) => a,
        _ => Expr::Binary(BinOp::Div, Box::new(a), Box::new(b)),
    }
}

fn pow(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        _ if is_const(&b, 1.0) => a,
        _ if is_const(&b, 0.0) => Expr::Const(1.0),
        _ => Expr::Binary(BinOp::Pow, Box::new(a), Box::new(b)),
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(c) => Expr::Const(-c),
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(Box::new(other)),
    }
}

fn call(func: Func, arg: Expr) -> Expr {
    Expr::Call(func, Box::new(arg))
}

pub(super) fn derivative(e: &Expr, var: &str) -> Expr {
    match e {
        Expr::Const(_) => Expr::Const(0.0),
        Expr::Var(name) => Expr::Const(if name == var { 1.0 } else { 0.0 }),
        Expr::Neg(inner) => neg(derivative(inner, var)),
        Expr::Binary(op, lhs, rhs) => {
            let u = lhs.as_ref();
            let v = rhs.as_ref();
            let du = derivative(u, var);
            let dv = derivative(v, var);
            match op {
                BinOp::Add => add(du, dv),
                BinOp::Sub => sub(du, dv),
                BinOp::Mul => add(mul(du, v.clone()), mul(u.clone(), dv)),
                // (u'v - uv') / v^2
                BinOp::Div => div(
                    sub(mul(du, v.clone()), mul(u.clone(), dv)),
                    pow(v.clone(), Expr::Const(2.0)),
                ),
                BinOp::Pow => {
                    if let Expr::Const(k) = v {
                        // k u^(k-1) u'
                        mul(
                            mul(Expr::Const(*k), pow(u.clone(), Expr::Const(k - 1.0))),
                            du,
                        )
                    } else if matches!(dv, Expr::Const(c) if c == 0.0) {
                        // exponent free of var: v u^(v-1) u'
                        mul(
                            mul(v.clone(), pow(u.clone(), sub(v.clone(), Expr::Const(1.0)))),
                            du,
                        )
                    } else {
                        // u^v (v' ln u + v u'/u)
                        mul(
                            e.clone(),
                            add(
                                mul(dv, call(Func::Log, u.clone())),
                                div(mul(v.clone(), du), u.clone()),
                            ),
                        )
                    }
                }
            }
        }
        Expr::Call(func, arg) => {
            let u = arg.as_ref();
            let du = derivative(u, var);
            if is_const(&du, 0.0) {
                return Expr::Const(0.0);
            }
            let outer = match func {
                Func::Sin => call(Func::Cos, u.clone()),
                Func::Cos => neg(call(Func::Sin, u.clone())),
                // 1 / cos(u)^2
                Func::Tan => div(
                    Expr::Const(1.0),
                    pow(call(Func::Cos, u.clone()), Expr::Const(2.0)),
                ),
                Func::Exp => e.clone(),
                Func::Log => div(Expr::Const(1.0), u.clone()),
                Func::Sqrt => div(Expr::Const(1.0), mul(Expr::Const(2.0), e.clone())),
                Func::Abs => call(Func::Sign, u.clone()),
                Func::Tanh => sub(Expr::Const(1.0), pow(e.clone(), Expr::Const(2.0))),
                // piecewise constant; zero almost everywhere
                Func::Sign => return Expr::Const(0.0),
            };
            mul(outer, du)
        }
    }
}
