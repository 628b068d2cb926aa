//! Arithmetic expressions for the weight `a(t)` and the nonlinearity `f(u)`.
//!
//! A small recursive-descent parser over the grammar
//!
//! ```text
//! expr   := term  (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?          // right-associative, binds tightest
//! atom   := number | name '(' expr ')' | variable | '(' expr ')'
//! ```
//!
//! Each expression is parsed in a declared variable context (`t` for the
//! weight, `u` for the nonlinearity); any other identifier is rejected with
//! its byte offset. Evaluation is strict about domains: `ln` of a
//! non-positive value, `sqrt` of a negative value, division by zero and
//! non-finite intermediates all surface as errors instead of propagating
//! NaN/inf. Fractional powers follow the `base >= 0` rule, with `0^p = 0`
//! for `p > 0`.

use std::fmt;

/// Built-in unary operations. `Neg` is the parser's unary minus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryFn {
    Neg,
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
    Abs,
}

impl UnaryFn {
    fn name(self) -> &'static str {
        match self {
            UnaryFn::Neg => "-",
            UnaryFn::Sin => "sin",
            UnaryFn::Cos => "cos",
            UnaryFn::Exp => "exp",
            UnaryFn::Ln => "ln",
            UnaryFn::Sqrt => "sqrt",
            UnaryFn::Abs => "abs",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// Parsed abstract syntax tree. `Variable` carries the context variable name.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Constant(f64),
    Variable(String),
    Unary(UnaryFn, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprError {
    /// Syntax or context error, with the byte offset into the source text.
    Parse { offset: usize, message: String },
    /// Domain error during evaluation; carries the offending subexpression
    /// and the variable binding that triggered it.
    Domain {
        subexpr: String,
        binding: f64,
        message: String,
    },
    /// The expression has no symbolic derivative (contains `abs`).
    NonDifferentiable { subexpr: String },
}

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprError::Parse { offset, message } => {
                write!(f, "parse error at byte {offset}: {message}")
            }
            ExprError::Domain {
                subexpr,
                binding,
                message,
            } => write!(f, "domain error in `{subexpr}` at value {binding}: {message}"),
            ExprError::NonDifferentiable { subexpr } => {
                write!(f, "`{subexpr}` has no symbolic derivative")
            }
        }
    }
}

impl std::error::Error for ExprError {}

/// Parses `text` in the context of the single allowed variable `variable`.
pub fn parse_expr(text: &str, variable: &str) -> Result<Expr, ExprError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        var: variable,
    };
    p.skip_ws();
    if p.pos >= p.src.len() {
        return Err(ExprError::Parse {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(ExprError::Parse {
            offset: p.pos,
            message: format!("unexpected trailing input `{}`", p.rest()),
        });
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    var: &'a str,
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &str {
        std::str::from_utf8(&self.src[self.pos..]).unwrap_or("")
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        while let Some(c) = self.peek() {
            let op = match c {
                b'+' => BinOp::Add,
                b'-' => BinOp::Sub,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(c) = self.peek() {
            let op = match c {
                b'*' => BinOp::Mul,
                b'/' => BinOp::Div,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(Expr::Unary(UnaryFn::Neg, Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            // exponent parses as unary so `2^-3` and `2^3^2` both work
            let exponent = self.unary()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let c = self.peek().ok_or(ExprError::Parse {
            offset: self.pos,
            message: "unexpected end of input".into(),
        })?;
        if c == b'(' {
            self.pos += 1;
            let inner = self.expr()?;
            if self.peek() != Some(b')') {
                return Err(ExprError::Parse {
                    offset: self.pos,
                    message: "expected `)`".into(),
                });
            }
            self.pos += 1;
            return Ok(inner);
        }
        if c.is_ascii_digit() || c == b'.' {
            return self.number();
        }
        if c.is_ascii_alphabetic() {
            return self.identifier();
        }
        Err(ExprError::Parse {
            offset: self.pos,
            message: format!("unexpected character `{}`", c as char),
        })
    }

    fn number(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        if self.pos < self.src.len() && (self.src[self.pos] | 0x20) == b'e' {
            let mark = self.pos;
            self.pos += 1;
            if self.pos < self.src.len() && (self.src[self.pos] == b'+' || self.src[self.pos] == b'-')
            {
                self.pos += 1;
            }
            if self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            } else {
                // not an exponent after all (e.g. `2e` would be malformed)
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let value: f64 = text.parse().map_err(|_| ExprError::Parse {
            offset: start,
            message: format!("malformed number `{text}`"),
        })?;
        if !value.is_finite() {
            return Err(ExprError::Parse {
                offset: start,
                message: format!("number `{text}` overflows f64"),
            });
        }
        Ok(Expr::Constant(value))
    }

    fn identifier(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let func = match name {
            "sin" => Some(UnaryFn::Sin),
            "cos" => Some(UnaryFn::Cos),
            "exp" => Some(UnaryFn::Exp),
            "ln" => Some(UnaryFn::Ln),
            "sqrt" => Some(UnaryFn::Sqrt),
            "abs" => Some(UnaryFn::Abs),
            _ => None,
        };
        if let Some(func) = func {
            if self.peek() != Some(b'(') {
                return Err(ExprError::Parse {
                    offset: self.pos,
                    message: format!("function `{name}` must be followed by `(`"),
                });
            }
            self.pos += 1;
            let arg = self.expr()?;
            if self.peek() != Some(b')') {
                return Err(ExprError::Parse {
                    offset: self.pos,
                    message: "expected `)`".into(),
                });
            }
            self.pos += 1;
            return Ok(Expr::Unary(func, Box::new(arg)));
        }
        if name == self.var {
            return Ok(Expr::Variable(name.to_string()));
        }
        if name == "t" || name == "u" {
            return Err(ExprError::Parse {
                offset: start,
                message: format!("variable `{name}` not allowed here (expected `{}`)", self.var),
            });
        }
        Err(ExprError::Parse {
            offset: start,
            message: format!("unknown identifier `{name}`"),
        })
    }
}

impl Expr {
    /// Evaluates the expression with the context variable bound to `x`.
    pub fn eval(&self, x: f64) -> Result<f64, ExprError> {
        if !x.is_finite() {
            return Err(self.domain_err(x, "non-finite binding"));
        }
        let v = match self {
            Expr::Constant(c) => *c,
            Expr::Variable(_) => x,
            Expr::Unary(func, e) => {
                let a = e.eval(x)?;
                match func {
                    UnaryFn::Neg => -a,
                    UnaryFn::Sin => a.sin(),
                    UnaryFn::Cos => a.cos(),
                    UnaryFn::Exp => a.exp(),
                    UnaryFn::Ln => {
                        if a <= 0.0 {
                            return Err(self.domain_err(x, "ln of a non-positive value"));
                        }
                        a.ln()
                    }
                    UnaryFn::Sqrt => {
                        if a < 0.0 {
                            return Err(self.domain_err(x, "sqrt of a negative value"));
                        }
                        a.sqrt()
                    }
                    UnaryFn::Abs => a.abs(),
                }
            }
            Expr::Binary(op, l, r) => {
                let a = l.eval(x)?;
                let b = r.eval(x)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(self.domain_err(x, "division by zero"));
                        }
                        a / b
                    }
                    BinOp::Pow => self.eval_pow(a, b, x)?,
                }
            }
        };
        if !v.is_finite() {
            return Err(self.domain_err(x, "non-finite result"));
        }
        Ok(v)
    }

    fn eval_pow(&self, base: f64, exponent: f64, x: f64) -> Result<f64, ExprError> {
        if base > 0.0 {
            return Ok(base.powf(exponent));
        }
        if base == 0.0 {
            if exponent > 0.0 {
                return Ok(0.0);
            }
            if exponent == 0.0 {
                return Ok(1.0);
            }
            return Err(self.domain_err(x, "zero base with negative exponent"));
        }
        if exponent.fract() == 0.0 && exponent.abs() <= i32::MAX as f64 {
            return Ok(base.powi(exponent as i32));
        }
        Err(self.domain_err(x, "negative base with fractional exponent"))
    }

    fn domain_err(&self, binding: f64, message: &str) -> ExprError {
        ExprError::Domain {
            subexpr: self.to_string(),
            binding,
            message: message.into(),
        }
    }

    /// Symbolic derivative with respect to the context variable.
    ///
    /// Fails on `abs`. Constant exponents differentiate as `c*e^(c-1)*e'`;
    /// a variable exponent uses the logarithmic form, which restricts the
    /// base to positive values at evaluation time.
    pub fn differentiate(&self) -> Result<Expr, ExprError> {
        Ok(match self {
            Expr::Constant(_) => Expr::Constant(0.0),
            Expr::Variable(_) => Expr::Constant(1.0),
            Expr::Unary(func, e) => {
                let de = e.differentiate()?;
                match func {
                    UnaryFn::Neg => neg(de),
                    UnaryFn::Sin => mul(Expr::Unary(UnaryFn::Cos, e.clone()), de),
                    UnaryFn::Cos => neg(mul(Expr::Unary(UnaryFn::Sin, e.clone()), de)),
                    UnaryFn::Exp => mul(Expr::Unary(UnaryFn::Exp, e.clone()), de),
                    UnaryFn::Ln => div(de, (**e).clone()),
                    UnaryFn::Sqrt => div(
                        de,
                        mul(Expr::Constant(2.0), Expr::Unary(UnaryFn::Sqrt, e.clone())),
                    ),
                    UnaryFn::Abs => {
                        return Err(ExprError::NonDifferentiable {
                            subexpr: self.to_string(),
                        })
                    }
                }
            }
            Expr::Binary(op, l, r) => {
                let (l, r) = (&**l, &**r);
                match op {
                    BinOp::Add => add(l.differentiate()?, r.differentiate()?),
                    BinOp::Sub => sub(l.differentiate()?, r.differentiate()?),
                    BinOp::Mul => add(
                        mul(l.differentiate()?, r.clone()),
                        mul(l.clone(), r.differentiate()?),
                    ),
                    BinOp::Div => div(
                        sub(
                            mul(l.differentiate()?, r.clone()),
                            mul(l.clone(), r.differentiate()?),
                        ),
                        pow(r.clone(), Expr::Constant(2.0)),
                    ),
                    BinOp::Pow => match r {
                        Expr::Constant(c) => mul(
                            mul(
                                Expr::Constant(*c),
                                pow(l.clone(), Expr::Constant(c - 1.0)),
                            ),
                            l.differentiate()?,
                        ),
                        _ => {
                            // d(l^r) = l^r * (r' ln l + r l'/l)
                            let dl = l.differentiate()?;
                            let dr = r.differentiate()?;
                            mul(
                                pow(l.clone(), r.clone()),
                                add(
                                    mul(dr, Expr::Unary(UnaryFn::Ln, Box::new(l.clone()))),
                                    div(mul(r.clone(), dl), l.clone()),
                                ),
                            )
                        }
                    },
                }
            }
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Constant(v) if *v < 0.0 => 3,
            Expr::Constant(_) | Expr::Variable(_) => 5,
            Expr::Unary(UnaryFn::Neg, _) => 3,
            Expr::Unary(..) => 5,
            Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Binary(BinOp::Pow, ..) => 4,
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.precedence() < min_prec {
            write!(f, "(")?;
            write!(f, "{self}")?;
            write!(f, ")")
        } else {
            write!(f, "{self}")
        }
    }
}

// Constant-folding constructors keep derivative trees small.

fn add(l: Expr, r: Expr) -> Expr {
    match (&l, &r) {
        (Expr::Constant(a), Expr::Constant(b)) => Expr::Constant(a + b),
        (Expr::Constant(z), _) if *z == 0.0 => r,
        (_, Expr::Constant(z)) if *z == 0.0 => l,
        _ => Expr::Binary(BinOp::Add, Box::new(l), Box::new(r)),
    }
}

fn sub(l: Expr, r: Expr) -> Expr {
    match (&l, &r) {
        (Expr::Constant(a), Expr::Constant(b)) => Expr::Constant(a - b),
        (_, Expr::Constant(z)) if *z == 0.0 => l,
        _ => Expr::Binary(BinOp::Sub, Box::new(l), Box::new(r)),
    }
}

fn mul(l: Expr, r: Expr) -> Expr {
    match (&l, &r) {
        (Expr::Constant(a), Expr::Constant(b)) => Expr::Constant(a * b),
        (Expr::Constant(z), _) | (_, Expr::Constant(z)) if *z == 0.0 => Expr::Constant(0.0),
        (Expr::Constant(one), _) if *one == 1.0 => r,
        (_, Expr::Constant(one)) if *one == 1.0 => l,
        _ => Expr::Binary(BinOp::Mul, Box::new(l), Box::new(r)),
    }
}

fn div(l: Expr, r: Expr) -> Expr {
    match (&l, &r) {
        (Expr::Constant(z), _) if *z == 0.0 => Expr::Constant(0.0),
        (_, Expr::Constant(one)) if *one == 1.0 => l,
        _ => Expr::Binary(BinOp::Div, Box::new(l), Box::new(r)),
    }
}

fn pow(l: Expr, r: Expr) -> Expr {
    match &r {
        Expr::Constant(one) if *one == 1.0 => l,
        Expr::Constant(z) if *z == 0.0 => Expr::Constant(1.0),
        _ => Expr::Binary(BinOp::Pow, Box::new(l), Box::new(r)),
    }
}

fn neg(e: Expr) -> Expr {
    match e {
        Expr::Constant(c) => Expr::Constant(-c),
        other => Expr::Unary(UnaryFn::Neg, Box::new(other)),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Constant(v) => write!(f, "{v}"),
            Expr::Variable(name) => write!(f, "{name}"),
            Expr::Unary(UnaryFn::Neg, e) => {
                write!(f, "-")?;
                e.fmt_child(f, 4)
            }
            Expr::Unary(func, e) => write!(f, "{}({e})", func.name()),
            Expr::Binary(op, l, r) => {
                let prec = self.precedence();
                match op {
                    // + - * / parse left-associative, so an equal-precedence
                    // right child needs parens to survive a round trip;
                    // ^ is right-associative and needs them on its base
                    BinOp::Add => {
                        l.fmt_child(f, prec)?;
                        write!(f, " + ")?;
                        r.fmt_child(f, prec + 1)
                    }
                    BinOp::Sub => {
                        l.fmt_child(f, prec)?;
                        write!(f, " - ")?;
                        r.fmt_child(f, prec + 1)
                    }
                    BinOp::Mul => {
                        l.fmt_child(f, prec)?;
                        write!(f, "*")?;
                        r.fmt_child(f, prec + 1)
                    }
                    BinOp::Div => {
                        l.fmt_child(f, prec)?;
                        write!(f, "/")?;
                        r.fmt_child(f, prec + 1)
                    }
                    BinOp::Pow => {
                        l.fmt_child(f, prec + 1)?;
                        write!(f, "^")?;
                        r.fmt_child(f, prec)
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_u(text: &str) -> Expr {
        parse_expr(text, "u").unwrap()
    }

    #[test]
    fn rejects_wrong_variable_for_context() {
        let err = parse_expr("t^2 * u", "u").unwrap_err();
        match err {
            ExprError::Parse { offset, message } => {
                assert_eq!(offset, 0);
                assert!(message.contains("`t` not allowed"), "{message}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn parses_power_times_log() {
        let e = parse_u("u^2 * ln(1+u)");
        let expected = Expr::Binary(
            BinOp::Mul,
            Box::new(Expr::Binary(
                BinOp::Pow,
                Box::new(Expr::Variable("u".into())),
                Box::new(Expr::Constant(2.0)),
            )),
            Box::new(Expr::Unary(
                UnaryFn::Ln,
                Box::new(Expr::Binary(
                    BinOp::Add,
                    Box::new(Expr::Constant(1.0)),
                    Box::new(Expr::Variable("u".into())),
                )),
            )),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn power_is_right_associative() {
        let e = parse_u("2^3^2");
        assert_eq!(e.eval(0.0).unwrap(), 512.0);
    }

    #[test]
    fn unary_minus_binds_below_power() {
        assert_eq!(parse_u("-2^2").eval(0.0).unwrap(), -4.0);
        assert_eq!(parse_u("(-2)^2").eval(0.0).unwrap(), 4.0);
    }

    #[test]
    fn evaluates_sin_log_ratio() {
        let e = parse_u("(sin(u)+ln(1+u))/u^2");
        let got = e.eval(1.0).unwrap();
        let want = (1f64.sin() + 2f64.ln()) / 1.0;
        assert!((got - want).abs() < 1e-15, "{got} vs {want}");
    }

    #[test]
    fn zero_is_zero_everywhere() {
        let e = parse_u("0");
        assert_eq!(e.eval(3.7).unwrap(), 0.0);
        assert_eq!(e.eval(-5.0).unwrap(), 0.0);
    }

    #[test]
    fn log_of_negative_is_a_domain_error() {
        let e = parse_u("ln(1+u)");
        let err = e.eval(-2.0).unwrap_err();
        match err {
            ExprError::Domain {
                binding, message, ..
            } => {
                assert_eq!(binding, -2.0);
                assert!(message.contains("non-positive"), "{message}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn sqrt_of_negative_and_division_by_zero_error() {
        assert!(parse_u("sqrt(u)").eval(-1.0).is_err());
        assert!(parse_u("1/u").eval(0.0).is_err());
    }

    #[test]
    fn fractional_power_at_zero_base() {
        let e = parse_u("u^0.5");
        assert_eq!(e.eval(0.0).unwrap(), 0.0);
        assert!((e.eval(4.0).unwrap() - 2.0).abs() < 1e-15);
        assert!(e.eval(-1.0).is_err());
    }

    #[test]
    fn scientific_notation_numbers() {
        assert_eq!(parse_u("1e-3").eval(0.0).unwrap(), 1e-3);
        assert_eq!(parse_u("2.5E+2").eval(0.0).unwrap(), 250.0);
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        let err = parse_expr("1 + (2*", "t").unwrap_err();
        assert!(matches!(err, ExprError::Parse { .. }));
        let err = parse_expr("sin 3", "t").unwrap_err();
        match err {
            ExprError::Parse { message, .. } => assert!(message.contains("followed by")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn derivative_of_power_and_product() {
        // d/du [u^3] = 3u^2
        let d = parse_u("u^3").differentiate().unwrap();
        assert!((d.eval(2.0).unwrap() - 12.0).abs() < 1e-12);
        // d/du [u^2 ln(1+u)] = 2u ln(1+u) + u^2/(1+u)
        let d = parse_u("u^2*ln(1+u)").differentiate().unwrap();
        let u = 1.5f64;
        let want = 2.0 * u * (1.0 + u).ln() + u * u / (1.0 + u);
        assert!((d.eval(u).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let cases = ["sin(u)*exp(u)", "sqrt(u)/(1+u)", "u^0.5 + cos(u^2)"];
        for text in cases {
            let e = parse_u(text);
            let d = e.differentiate().unwrap();
            for &u in &[0.3, 1.0, 2.7] {
                let h = 1e-6;
                let fd = (e.eval(u + h).unwrap() - e.eval(u - h).unwrap()) / (2.0 * h);
                let sym = d.eval(u).unwrap();
                assert!(
                    (fd - sym).abs() <= 1e-6 * (1.0 + sym.abs()),
                    "{text} at {u}: fd {fd} vs sym {sym}"
                );
            }
        }
    }

    #[test]
    fn abs_is_not_differentiable() {
        let err = parse_u("abs(u)").differentiate().unwrap_err();
        assert!(matches!(err, ExprError::NonDifferentiable { .. }));
    }

    #[test]
    fn display_round_trips_structurally() {
        let corpus = [
            "t",
            "t^2",
            "exp(t)",
            "u^2",
            "u^0.5",
            "u^2*ln(1+u)",
            "(sin(u)+ln(1+u))/u^2",
            "1 - u/(1+u)",
            "-u^2 + 3*u - 4",
            "2^3^2",
            "u/(u/(1+u))",
            "-(u+1)",
        ];
        for text in corpus {
            let var = if text.contains('u') { "u" } else { "t" };
            let e = parse_expr(text, var).unwrap();
            let printed = e.to_string();
            let reparsed = parse_expr(&printed, var).unwrap();
            assert_eq!(e, reparsed, "`{text}` printed as `{printed}`");
        }
    }
}
