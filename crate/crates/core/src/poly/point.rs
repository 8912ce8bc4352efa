use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::arith::{embed, frobenius, make_extension, ExtField, FieldElement};
use crate::error::{Error, Result};

/// A point of projective space over some F_{p^k}, scaled so that the last
/// nonzero coordinate is 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ProjPoint {
    coords: Vec<FieldElement>,
}

impl ProjPoint {
    pub fn new(coords: Vec<FieldElement>) -> Result<Self> {
        let Some(last) = coords.iter().rposition(|c| !c.is_zero()) else {
            return Err(Error::ZeroInput);
        };
        let field = coords[0].field().clone();
        if coords.iter().any(|c| c.field() != &field) {
            return Err(Error::FieldMismatch("coordinates lie in different fields".into()));
        }
        let inv = coords[last].inv().expect("nonzero");
        Ok(ProjPoint { coords: coords.iter().map(|c| c * &inv).collect() })
    }

    /// Point with integer coordinates in F_p.
    pub fn rational(p: u32, coords: &[i64]) -> Result<Self> {
        let f = make_extension(p as u64, 1)?;
        Self::new(coords.iter().map(|&c| FieldElement::from_int(&f, c)).collect())
    }

    pub fn coords(&self) -> &[FieldElement] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn field(&self) -> &Arc<ExtField> {
        self.coords[0].field()
    }

    /// Coordinate-wise p-th power.
    pub fn frobenius(&self) -> ProjPoint {
        ProjPoint { coords: self.coords.iter().map(frobenius).collect() }
    }

    /// The distinct Frobenius conjugates, starting with the point itself.
    pub fn orbit(&self) -> Vec<ProjPoint> {
        let mut out = vec![self.clone()];
        let mut cur = self.frobenius();
        while cur != *self {
            out.push(cur.clone());
            cur = cur.frobenius();
        }
        out
    }

    /// Degree of the smallest field containing the point.
    pub fn field_of_definition(&self) -> usize {
        self.orbit().len()
    }

    pub fn embed_into(&self, target: &Arc<ExtField>) -> Result<ProjPoint> {
        let coords = self.coords.iter().map(|c| embed(c, target)).collect::<Result<Vec<_>>>()?;
        Ok(ProjPoint { coords })
    }

    /// Canonical representative of the orbit: the least conjugate in point order.
    pub fn orbit_representative(&self) -> ProjPoint {
        self.orbit().into_iter().min().unwrap()
    }

    /// Every point of P^{ncoords-1} over `field`, in point order.
    pub fn enumerate(field: &Arc<ExtField>, ncoords: usize) -> impl Iterator<Item = ProjPoint> + '_ {
        let q = field.order().expect("field too large to enumerate");
        (0..ncoords).flat_map(move |last| {
            let count = q.checked_pow(last as u32).expect("too many points to enumerate");
            (0..count).map(move |mut idx| {
                let mut coords = vec![FieldElement::zero(field); ncoords];
                coords[last] = FieldElement::one(field);
                for c in (0..last).rev() {
                    coords[c] = FieldElement::from_index(field, idx % q);
                    idx /= q;
                }
                ProjPoint { coords }
            })
        })
    }

    /// Number of points of P^{ncoords-1} over a field with q elements.
    pub fn count(q: u64, ncoords: usize) -> u64 {
        (0..ncoords as u32).map(|i| q.saturating_pow(i)).fold(0u64, |a, b| a.saturating_add(b))
    }

    /// Parses `(a:b:c)` optionally followed or preceded by `@k`.
    pub fn parse(p: u64, text: &str) -> Result<ProjPoint> {
        let t = text.trim();
        let (body, k) = if let Some(rest) = t.strip_prefix('@') {
            let open = rest.find('(').ok_or_else(|| Error::parse("expected '(' after extension degree"))?;
            (rest[open..].trim(), parse_degree(&rest[..open])?)
        } else if let Some(at) = t.rfind('@') {
            (t[..at].trim(), parse_degree(&t[at + 1..])?)
        } else {
            (t, 1)
        };
        let inner = body
            .strip_prefix('(')
            .and_then(|b| b.strip_suffix(')'))
            .ok_or_else(|| Error::parse(format!("point must be written as (a:b:...), got '{body}'")))?;
        let field = make_extension(p, k)?;
        let coords = inner.split(':').map(|c| FieldElement::parse(&field, c.trim())).collect::<Result<Vec<_>>>()?;
        ProjPoint::new(coords).map_err(|e| match e {
            Error::ZeroInput => Error::parse("all coordinates are zero"),
            e => e,
        })
    }
}

fn parse_degree(s: &str) -> Result<usize> {
    let k: usize = s.trim().parse().map_err(|_| Error::parse(format!("bad extension degree '{}'", s.trim())))?;
    if k == 0 {
        return Err(Error::parse("extension degree must be positive"));
    }
    Ok(k)
}

impl Ord for ProjPoint {
    /// Field degree, then position of the last nonzero coordinate, then coordinate indices.
    fn cmp(&self, other: &Self) -> Ordering {
        let kd = self.field().degree().cmp(&other.field().degree());
        if kd != Ordering::Equal {
            return kd;
        }
        let last = |p: &ProjPoint| p.coords.iter().rposition(|c| !c.is_zero());
        last(self).cmp(&last(other)).then_with(|| {
            let a: Vec<u64> = self.coords.iter().map(|c| c.index()).collect();
            let b: Vec<u64> = other.coords.iter().map(|c| c.index()).collect();
            a.cmp(&b)
        })
    }
}

impl PartialOrd for ProjPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(":"))?;
        if self.field().degree() > 1 {
            write!(f, "@{}", self.field().degree())?;
        }
        Ok(())
    }
}

impl fmt::Debug for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
