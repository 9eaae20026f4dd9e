use super::ConstructError;
use crate::numeric::Rational;

fn check_positive(v: &[Rational]) -> Result<(), ConstructError> {
    if v.is_empty() {
        return Err(ConstructError::Empty);
    }
    match v.iter().position(|t| !t.is_positive()) {
        Some(index) => Err(ConstructError::NotPositive { index }),
        None => Ok(()),
    }
}

/// `x` with `x_0 = y_0` and `x_n = y_n - 2^n y_0`, so that the `ex16`
/// prefix maps `x` to `y`. Needs `y_n > 2^n y_0` for `n >= 1`.
pub fn ex16_witness(y: &[Rational]) -> Result<Vec<Rational>, ConstructError> {
    check_positive(y)?;
    let y0 = &y[0];
    let mut x = vec![y0.clone()];
    for (n, yn) in y.iter().enumerate().skip(1) {
        let xn = yn - &(y0 * &Rational::pow2(n as i64));
        if !xn.is_positive() {
            return Err(ConstructError::GrowthViolation { index: n });
        }
        x.push(xn);
    }
    Ok(x)
}

/// Index `k` past which row `k` of `ex16` is certain to exceed `bound`:
/// 0 when `x_0 > bound`, otherwise the least `k >= 1` with `2^k x_0 >= bound`.
pub fn ex16_guaranteed_index(x0: &Rational, bound: &Rational) -> Result<usize, ConstructError> {
    if !x0.is_positive() {
        return Err(ConstructError::NotPositive { index: 0 });
    }
    if x0 > bound {
        return Ok(0);
    }
    let k = (bound / x0).ceil_log2().expect("ratio of positives is positive");
    Ok(k.max(1) as usize)
}

/// Least `k` with `(ex16 x)_k > bound`.
pub fn ex16_obstruction(x: &[Rational], bound: &Rational) -> Result<usize, ConstructError> {
    check_positive(x)?;
    if !bound.is_positive() {
        return Err(ConstructError::NotPositive { index: 0 });
    }
    let x0 = &x[0];
    let row = |k: usize| {
        if k == 0 {
            x0.clone()
        } else {
            &(x0 * &Rational::pow2(k as i64)) + &x[k]
        }
    };
    if let Some(k) = (0..x.len()).find(|&k| row(k) > *bound) {
        return Ok(k);
    }
    Err(ConstructError::PrefixTooShort {
        needed: ex16_guaranteed_index(x0, bound)?,
        len: x.len(),
    })
}

/// `x` with `x_0 = 1` and `x_n = 1/(2n-1) - y_{n-1}`, so that row `n - 1`
/// of `ex17` maps `x` to `y_{n-1}`. Needs `y_{n-1} < 1/(2n-1)`.
pub fn ex17_witness(y: &[Rational]) -> Result<Vec<Rational>, ConstructError> {
    check_positive(y)?;
    let mut x = vec![Rational::one()];
    for (i, yi) in y.iter().enumerate() {
        let n = i + 1;
        let xn = &Rational::new(1, 2 * n as i64 - 1).expect("odd denominator") - yi;
        if !xn.is_positive() {
            return Err(ConstructError::PremiseViolation { index: n });
        }
        x.push(xn);
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::build_family;

    fn q(v: &[&str]) -> Vec<Rational> {
        v.iter().map(|s| s.parse().unwrap()).collect()
    }

    #[test]
    fn ex16_examples() {
        assert_eq!(ex16_witness(&q(&["1", "3", "5"])).unwrap(), q(&["1", "1", "1"]));
        assert_eq!(
            ex16_witness(&q(&["1/2", "3/2", "9/4"])).unwrap(),
            q(&["1/2", "1/2", "1/4"])
        );
        assert_eq!(
            ex16_witness(&q(&["1", "2", "9"])),
            Err(ConstructError::GrowthViolation { index: 1 })
        );
        let y = q(&["1/2", "3/2", "9/4"]);
        let m = build_family("ex16", 3, &[]).unwrap();
        assert_eq!(m.apply(&ex16_witness(&y).unwrap()).unwrap(), y);
    }

    #[test]
    fn ex16_obstruction_examples() {
        let one = Rational::one();
        assert_eq!(ex16_obstruction(&q(&["1/8", "1/10", "1/10", "1/10"]), &one), Ok(3));
        assert_eq!(ex16_obstruction(&q(&["2", "1"]), &one), Ok(0));
        assert_eq!(ex16_obstruction(&q(&["1/8", "9/10", "1/10"]), &one), Ok(1));
        assert_eq!(
            ex16_obstruction(&q(&["1/8", "1/10"]), &one),
            Err(ConstructError::PrefixTooShort { needed: 3, len: 2 })
        );
        assert_eq!(ex16_guaranteed_index(&Rational::one(), &one), Ok(1));
    }

    #[test]
    fn ex17_examples() {
        assert_eq!(ex17_witness(&q(&["1/2", "1/4"])).unwrap(), q(&["1", "1/2", "1/12"]));
        assert_eq!(
            ex17_witness(&q(&["1/3", "1/5", "1/7"])).unwrap(),
            q(&["1", "2/3", "2/15", "2/35"])
        );
        assert_eq!(ex17_witness(&q(&["1", "1/9"])), Err(ConstructError::PremiseViolation { index: 1 }));
        let y = q(&["1/3", "1/5", "1/7"]);
        let m = build_family("ex17", 3, &[]).unwrap();
        assert_eq!(m.apply(&ex17_witness(&y).unwrap()).unwrap(), y);
    }
}
