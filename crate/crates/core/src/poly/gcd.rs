//! Multivariate gcd by primitive remainder sequences, and Sylvester resultants.

use super::SparseForm;
use crate::error::{Error, Result};

/// Monic greatest common divisor of two forms over F_p.
pub fn multivariate_gcd(f: &SparseForm, g: &SparseForm) -> SparseForm {
    if f.is_zero() {
        return g.monic();
    }
    if g.is_zero() {
        return f.monic();
    }
    if f.is_constant() || g.is_constant() {
        return SparseForm::one(f.field(), f.nvars());
    }
    let main = match main_var(f, g) {
        Some(v) => v,
        None => return SparseForm::one(f.field(), f.nvars()),
    };
    let (cf, pf) = content_split(f, main);
    let (cg, pg) = content_split(g, main);
    let c = multivariate_gcd(&cf, &cg);
    let (mut a, mut b) = if pf.degree_in(main) >= pg.degree_in(main) { (pf, pg) } else { (pg, pf) };
    while !b.is_zero() {
        if b.degree_in(main) == 0 {
            // primitive and free of the main variable, hence a unit
            a = SparseForm::one(f.field(), f.nvars());
            break;
        }
        let r = pseudo_remainder(&a, &b, main);
        a = b;
        b = if r.is_zero() { r } else { content_split(&r, main).1 };
    }
    c.mul(&a).monic()
}

fn main_var(f: &SparseForm, g: &SparseForm) -> Option<usize> {
    (0..f.nvars()).rev().find(|&v| f.uses_var(v) || g.uses_var(v))
}

/// Splits `f` into its content with respect to `var` and the primitive part.
fn content_split(f: &SparseForm, var: usize) -> (SparseForm, SparseForm) {
    let coeffs = f.to_univariate(var);
    let mut cont = SparseForm::zero(f.field(), f.nvars());
    for c in coeffs.iter().rev() {
        cont = multivariate_gcd(&cont, c);
        if cont.is_one() {
            break;
        }
    }
    let prim = f.div_exact(&cont).expect("content divides");
    (cont, prim)
}

/// lc(b)^(deg a - deg b + 1) * a mod b, as polynomials in `var`.
fn pseudo_remainder(a: &SparseForm, b: &SparseForm, var: usize) -> SparseForm {
    let db = b.degree_in(var) as usize;
    let bc = b.to_univariate(var);
    let lb = &bc[db];
    let mut r = a.to_univariate(var);
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        if lr.is_zero() {
            r.pop();
            continue;
        }
        for c in r.iter_mut() {
            *c = c.mul(lb);
        }
        for (i, bi) in bc.iter().enumerate() {
            let idx = dr - db + i;
            r[idx] = r[idx].sub(&lr.mul(bi));
        }
        r.pop();
        while r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
    }
    SparseForm::from_univariate(&r, var, a.field(), a.nvars())
}

/// Resultant of `f` and `g` with respect to variable `var`, via the Sylvester
/// determinant computed by fraction-free elimination.
pub fn resultant(f: &SparseForm, g: &SparseForm, var: usize) -> Result<SparseForm> {
    if f.is_zero() || g.is_zero() {
        return Err(Error::ZeroInput);
    }
    let n = f.degree_in(var) as usize;
    let m = g.degree_in(var) as usize;
    if n == 0 && m == 0 {
        return Err(Error::DegenerateInput("neither input involves the elimination variable".into()));
    }
    if n == 0 {
        return Ok(f.pow(m as u32));
    }
    if m == 0 {
        return Ok(g.pow(n as u32));
    }
    let fc = f.to_univariate(var);
    let gc = g.to_univariate(var);
    let size = n + m;
    let zero = SparseForm::zero(f.field(), f.nvars());
    let mut mat = vec![vec![zero.clone(); size]; size];
    for i in 0..m {
        for (j, c) in fc.iter().rev().enumerate() {
            mat[i][i + j] = c.clone();
        }
    }
    for i in 0..n {
        for (j, c) in gc.iter().rev().enumerate() {
            mat[m + i][i + j] = c.clone();
        }
    }
    Ok(bareiss_determinant(mat))
}

/// Fraction-free Gaussian elimination determinant over F_p[x].
pub(crate) fn bareiss_determinant(mut mat: Vec<Vec<SparseForm>>) -> SparseForm {
    let n = mat.len();
    if n == 0 {
        panic!("empty matrix");
    }
    let one = SparseForm::one(mat[0][0].field(), mat[0][0].nvars());
    let mut prev = one;
    let mut negate = false;
    for k in 0..n - 1 {
        if mat[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !mat[i][k].is_zero()) else {
                return SparseForm::zero(prev.field(), prev.nvars());
            };
            mat.swap(k, swap);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = mat[i][j].mul(&mat[k][k]).sub(&mat[i][k].mul(&mat[k][j]));
                mat[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
            }
        }
        prev = mat[k][k].clone();
    }
    let d = mat[n - 1][n - 1].clone();
    if negate {
        d.neg()
    } else {
        d
    }
}

/// True when `f` has no repeated factor, tested through gcd with all partial derivatives.
pub fn is_squarefree(f: &SparseForm) -> Result<bool> {
    if f.is_zero() {
        return Err(Error::ZeroInput);
    }
    let mut g = f.clone();
    for i in 0..f.nvars() {
        g = multivariate_gcd(&g, &f.partial_derivative(i));
        if g.is_constant() {
            return Ok(true);
        }
    }
    Ok(g.is_constant())
}
