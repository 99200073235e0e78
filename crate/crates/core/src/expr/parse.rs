use num_bigint::BigInt;

use super::{Expr, ExprError, Rat};

const MAX_DEPTH: usize = 512;

/// Parses an expression in the grammar
///
/// ```text
/// expr   := term (("+" | "-") term)*
/// term   := factor (("*" | "/") factor)*
/// factor := ("-")* base ("^" signed-integer)?
/// base   := integer | "x" | "y" | "(" expr ")"
/// ```
///
/// Whitespace is insignificant. Error offsets are byte offsets into `text`.
///
/// ```
/// use lpde::expr::{parse_expr, ExprError};
/// assert_eq!(parse_expr("1/y").unwrap().to_string(), "(1 / y)");
/// assert!(matches!(parse_expr("x^^2"), Err(ExprError::Syntax { offset: 2, .. })));
/// ```
pub fn parse_expr(text: &str) -> Result<Expr, ExprError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, depth: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(format!("unexpected {}", p.describe())));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    depth: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn describe(&self) -> String {
        match self.src.get(self.pos) {
            None => "end of input".to_string(),
            Some(c) => format!("character {:?}", *c as char),
        }
    }

    fn error(&self, message: String) -> ExprError {
        ExprError::Syntax { offset: self.pos, message }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.error("nesting too deep".to_string()));
        }
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = acc + rhs;
                }
                Some(b'-') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = Expr::difference(acc, rhs);
                }
                _ => break,
            }
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    acc = acc * rhs;
                }
                Some(b'/') => {
                    self.pos += 1;
                    self.skip_ws();
                    let at = self.pos;
                    let rhs = self.factor()?;
                    if rhs.is_zero_literal() {
                        return Err(ExprError::ZeroDenominator { offset: at });
                    }
                    acc = Expr::quotient(acc, rhs);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        let mut negations = 0usize;
        while self.peek() == Some(b'-') {
            self.pos += 1;
            negations += 1;
        }
        self.skip_ws();
        let at = self.pos;
        let mut base = self.base()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let n = self.signed_integer()?;
            if n < 0 && base.is_zero_literal() {
                return Err(ExprError::ZeroDenominator { offset: at });
            }
            base = base.pow(n);
        }
        for _ in 0..negations {
            base = -base;
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Some(b'x') => {
                self.pos += 1;
                Ok(Expr::x())
            }
            Some(b'y') => {
                self.pos += 1;
                Ok(Expr::y())
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error(format!("expected ')', found {}", self.describe())));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let digits = self.digits();
                let n: BigInt = digits.parse().expect("ascii digits");
                Ok(Expr::constant(Rat::from_integer(n)))
            }
            _ => Err(self.error(format!("expected a number, variable or '(', found {}", self.describe()))),
        }
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn signed_integer(&mut self) -> Result<i32, ExprError> {
        let mut negative = false;
        match self.peek() {
            Some(b'-') => {
                negative = true;
                self.pos += 1;
            }
            Some(b'+') => self.pos += 1,
            _ => {}
        }
        self.skip_ws();
        let at = self.pos;
        if !self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            return Err(self.error(format!("expected an integer exponent, found {}", self.describe())));
        }
        let digits = self.digits();
        let magnitude: i64 = digits
            .parse()
            .ok()
            .filter(|v| *v <= i32::MAX as i64)
            .ok_or_else(|| ExprError::Syntax { offset: at, message: "exponent out of range".to_string() })?;
        Ok(if negative { -(magnitude as i32) } else { magnitude as i32 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Node;

    #[test]
    fn three_products() {
        let e = parse_expr("x^2 + 2*x*y + y^2").unwrap();
        match e.node() {
            Node::Sum(ts) => {
                assert_eq!(ts.len(), 3);
                assert!(matches!(ts[1].node(), Node::Product(_)));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reciprocal() {
        let e = parse_expr("1/y").unwrap();
        assert_eq!(e, Expr::quotient(Expr::one(), Expr::y()));
    }

    #[test]
    fn syntax_errors_report_offsets() {
        assert!(matches!(parse_expr("x^^2"), Err(ExprError::Syntax { offset: 2, .. })));
        assert!(matches!(parse_expr("(x"), Err(ExprError::Syntax { offset: 2, .. })));
        assert!(matches!(parse_expr("x y"), Err(ExprError::Syntax { offset: 2, .. })));
        assert!(matches!(parse_expr(""), Err(ExprError::Syntax { offset: 0, .. })));
        assert!(matches!(parse_expr("z"), Err(ExprError::Syntax { offset: 0, .. })));
    }

    #[test]
    fn zero_denominators_rejected() {
        assert_eq!(parse_expr("x / 0"), Err(ExprError::ZeroDenominator { offset: 4 }));
        assert_eq!(parse_expr("x/(1-1)"), Err(ExprError::ZeroDenominator { offset: 2 }));
        assert_eq!(parse_expr("0^-2"), Err(ExprError::ZeroDenominator { offset: 0 }));
    }

    #[test]
    fn unary_minus_and_signed_exponents() {
        assert_eq!(parse_expr("--x").unwrap(), Expr::x());
        assert_eq!(parse_expr("-x^2").unwrap(), -Expr::x().pow(2));
        assert_eq!(parse_expr("x^-2").unwrap(), Expr::x().pow(-2));
        assert_eq!(parse_expr("(3/4)").unwrap(), Expr::ratio(3, 4));
    }

    #[test]
    fn deep_nesting_is_an_error_not_a_crash() {
        let text = "(".repeat(5000) + "x" + &")".repeat(5000);
        assert!(matches!(parse_expr(&text), Err(ExprError::Syntax { .. })));
    }
}
