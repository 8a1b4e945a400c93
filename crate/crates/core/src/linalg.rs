//! Exact integer linear algebra: rank and Smith normal form.

use num_integer::Integer;

/// Rank over the rationals of an integer matrix given by rows.
pub fn rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, p);
        for i in r + 1..m.len() {
            if m[i][c] != 0 {
                let (a, b) = (m[r][c], m[i][c]);
                let g = a.gcd(&b);
                let (fa, fb) = (b / g, a / g);
                for j in c..cols {
                    m[i][j] = m[i][j] * fb - m[r][j] * fa;
                }
                let g = m[i].iter().fold(0i128, |g, &x| g.gcd(&x));
                if g > 1 {
                    m[i].iter_mut().for_each(|x| *x /= g);
                }
            }
        }
        r += 1;
    }
    r
}

/// Nonzero diagonal entries of the Smith normal form, positive and in divisibility order.
pub fn elementary_divisors(rows: &[Vec<i64>]) -> Vec<i64> {
    let mut m: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let nr = m.len();
    let nc = m.first().map_or(0, |r| r.len());
    let mut out = Vec::new();
    let mut t = 0;
    while t < nr.min(nc) {
        // Pivot: smallest nonzero absolute value in the remaining block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..nr {
            for j in t..nc {
                if m[i][j] != 0 && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let p = m[t][t];
            let mut changed = false;
            for i in t + 1..nr {
                let q = m[i][t] / p;
                if q != 0 {
                    for j in t..nc {
                        m[i][j] -= q * m[t][j];
                    }
                }
                if m[i][t] != 0 {
                    changed = true;
                }
            }
            for j in t + 1..nc {
                let q = m[t][j] / p;
                if q != 0 {
                    for i in t..nr {
                        m[i][j] -= q * m[i][t];
                    }
                }
                if m[t][j] != 0 {
                    changed = true;
                }
            }
            if !changed {
                // Enforce divisibility by the rest of the block.
                let bad = (t + 1..nr).flat_map(|i| (t + 1..nc).map(move |j| (i, j))).find(|&(i, j)| m[i][j] % p != 0);
                match bad {
                    None => break,
                    Some((i, _)) => {
                        for j in t..nc {
                            m[t][j] += m[i][j];
                        }
                        continue;
                    }
                }
            }
            // Move the smallest entry of row/column t to the pivot.
            let mut bi = (t, t);
            for i in t..nr {
                if m[i][t] != 0 && m[i][t].abs() < m[bi.0][bi.1].abs() {
                    bi = (i, t);
                }
            }
            for j in t..nc {
                if m[t][j] != 0 && m[t][j].abs() < m[bi.0][bi.1].abs() {
                    bi = (t, j);
                }
            }
            m.swap(t, bi.0);
            for row in m.iter_mut() {
                row.swap(t, bi.1);
            }
        }
        out.push(m[t][t].abs() as i64);
        t += 1;
    }
    out
}

/// Integer kernel basis of `rows` (as rational kernel scaled to primitive integer vectors).
pub fn kernel_basis(rows: &[Vec<i64>], cols: usize) -> Vec<Vec<i64>> {
    use num_rational::Ratio;
    let mut m: Vec<Vec<Ratio<i128>>> = rows.iter().map(|r| r.iter().map(|&x| Ratio::from_integer(x as i128)).collect()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| m[i][c] != Ratio::from_integer(0)) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for j in 0..cols {
            m[r][j] *= inv;
        }
        for i in 0..m.len() {
            if i != r && m[i][c] != Ratio::from_integer(0) {
                let f = m[i][c];
                for j in 0..cols {
                    let d = m[r][j] * f;
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![Ratio::from_integer(0i128); cols];
            v[fc] = Ratio::from_integer(1);
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[i][fc];
            }
            let l = v.iter().fold(1i128, |l, x| l.lcm(x.denom()));
            let ints: Vec<i128> = v.iter().map(|x| (x * l).to_integer()).collect();
            let g = ints.iter().fold(0i128, |g, &x| g.gcd(&x)).max(1);
            ints.iter().map(|x| (x / g) as i64).collect()
        })
        .collect()
}
