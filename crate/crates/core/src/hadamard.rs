//! Normalized Hadamard matrices (first row and first column all `+1`).
//!
//! Orders are built from Sylvester doubling and the two Paley constructions
//! over GF(q) for `q` prime or the square of a prime. This covers every
//! order in `{1, 2} ∪ 4ℕ` up to 64 and many beyond.

/// Rows of a normalized Hadamard matrix of the given order, or `None` when no
/// construction here reaches it.
pub fn hadamard(order: usize) -> Option<Vec<Vec<i8>>> {
    let h = build(order)?;
    Some(normalize(h))
}

/// True if [`hadamard`] supports `order`.
pub fn is_supported(order: usize) -> bool {
    plan(order).is_some()
}

#[derive(Debug, Clone, Copy)]
enum Plan {
    One,
    Double,
    PaleyI(usize),
    PaleyII(usize),
}

fn plan(order: usize) -> Option<Plan> {
    match order {
        0 => None,
        1 => Some(Plan::One),
        2 => Some(Plan::Double),
        n if n % 4 != 0 => None,
        n => {
            if let Some(q) = n.checked_sub(1) {
                if q % 4 == 3 && is_prime(q) {
                    return Some(Plan::PaleyI(q));
                }
            }
            let q = n / 2 - 1;
            if q % 4 == 1 && field_prime(q).is_some() {
                return Some(Plan::PaleyII(q));
            }
            if plan(n / 2).is_some() {
                return Some(Plan::Double);
            }
            None
        }
    }
}

fn build(order: usize) -> Option<Vec<Vec<i8>>> {
    Some(match plan(order)? {
        Plan::One => vec![vec![1]],
        Plan::Double => {
            let h = build(order / 2)?;
            let m = h.len();
            let mut out = vec![vec![0i8; 2 * m]; 2 * m];
            for i in 0..m {
                for j in 0..m {
                    let v = h[i][j];
                    out[i][j] = v;
                    out[i][j + m] = v;
                    out[i + m][j] = v;
                    out[i + m][j + m] = -v;
                }
            }
            out
        }
        Plan::PaleyI(q) => {
            let field = Field::new(q)?;
            let n = q + 1;
            let mut h = vec![vec![0i8; n]; n];
            // H = I + S, S = [[0, 1ᵀ], [−1, Q]].
            for j in 1..n {
                h[0][j] = 1;
                h[j][0] = -1;
            }
            for i in 0..q {
                for j in 0..q {
                    h[i + 1][j + 1] = field.chi(field.sub(j, i));
                }
            }
            for (i, row) in h.iter_mut().enumerate() {
                row[i] += 1;
            }
            h
        }
        Plan::PaleyII(q) => {
            let field = Field::new(q)?;
            let n = q + 1;
            // Symmetric conference matrix S = [[0, 1ᵀ], [1, Q]].
            let mut s = vec![vec![0i8; n]; n];
            for j in 1..n {
                s[0][j] = 1;
                s[j][0] = 1;
            }
            for i in 0..q {
                for j in 0..q {
                    s[i + 1][j + 1] = field.chi(field.sub(j, i));
                }
            }
            // H = S ⊗ [[1, 1], [1, −1]] + I ⊗ [[1, −1], [−1, −1]].
            let mut h = vec![vec![0i8; 2 * n]; 2 * n];
            for i in 0..n {
                for j in 0..n {
                    let v = s[i][j];
                    let (a, b, c, d) = if i == j { (1, -1, -1, -1) } else { (0, 0, 0, 0) };
                    h[2 * i][2 * j] = v + a;
                    h[2 * i][2 * j + 1] = v + b;
                    h[2 * i + 1][2 * j] = v + c;
                    h[2 * i + 1][2 * j + 1] = -v + d;
                }
            }
            h
        }
    })
}

fn normalize(mut h: Vec<Vec<i8>>) -> Vec<Vec<i8>> {
    let n = h.len();
    for j in 0..n {
        if h[0][j] < 0 {
            for row in h.iter_mut() {
                row[j] = -row[j];
            }
        }
    }
    for row in h.iter_mut() {
        if row[0] < 0 {
            for v in row.iter_mut() {
                *v = -*v;
            }
        }
    }
    h
}

fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Characteristic `p` when `q = p` or `q = p²` with `p` an odd prime.
fn field_prime(q: usize) -> Option<usize> {
    if is_prime(q) && q > 2 {
        return Some(q);
    }
    let r = (q as f64).sqrt().round() as usize;
    (r * r == q && is_prime(r) && r > 2).then_some(r)
}

/// GF(p) or GF(p²) with elements indexed `a + p·b` for `a + b·t`.
struct Field {
    p: usize,
    q: usize,
    square: Vec<bool>,
}

impl Field {
    fn new(q: usize) -> Option<Self> {
        let p = field_prime(q)?;
        let ext = q != p;
        // t² = r with r a quadratic non-residue mod p.
        let r = (2..p).find(|&r| (1..p).all(|x| x * x % p != r)).unwrap_or(0);
        if ext && r == 0 {
            return None;
        }
        let mut square = vec![false; q];
        for x in 1..q {
            let (a, b) = (x % p, x / p);
            // (a + bt)² = a² + b²r + 2ab·t.
            let re = (a * a + b * b * r) % p;
            let im = (2 * a * b) % p;
            square[re + p * im] = true;
        }
        Some(Self { p, q, square })
    }

    fn sub(&self, x: usize, y: usize) -> usize {
        let p = self.p;
        let (a, b) = (x % p, x / p);
        let (c, d) = (y % p, y / p);
        let re = (a + p - c) % p;
        let im = (b + p - d) % p;
        debug_assert!(re + p * im < self.q);
        re + p * im
    }

    fn chi(&self, x: usize) -> i8 {
        if x == 0 {
            0
        } else if self.square[x] {
            1
        } else {
            -1
        }
    }
}
