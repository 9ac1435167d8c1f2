//! Brute-force character table of `GL_2(F_p)`, `p` a small prime, by the
//! Burnside-Dixon method: class structure constants, simultaneous
//! eigenvectors modulo a prime `P = 1 mod exponent`, degrees from the
//! norm relation, and exact cyclotomic values from eigenvalue
//! multiplicities.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::HashMap;

use dlparam::CycNum;

pub type Mat = [u64; 4];

fn mat_mul(a: &Mat, b: &Mat, p: u64) -> Mat {
    [
        (a[0] * b[0] + a[1] * b[2]) % p,
        (a[0] * b[1] + a[1] * b[3]) % p,
        (a[2] * b[0] + a[3] * b[2]) % p,
        (a[2] * b[1] + a[3] * b[3]) % p,
    ]
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, m: u64) -> u64 {
    pow_mod(a, m - 2, m)
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub struct Group {
    pub p: u64,
    pub elements: Vec<Mat>,
    index: HashMap<Mat, usize>,
    mul: Vec<usize>,
    inv: Vec<usize>,
    pub order_of: Vec<u64>,
    pub class_of: Vec<usize>,
    pub classes: Vec<Vec<usize>>,
    pub exponent: u64,
}

impl Group {
    pub fn gl2(p: u64) -> Self {
        let mut elements = Vec::new();
        for a in 0..p {
            for b in 0..p {
                for c in 0..p {
                    for d in 0..p {
                        if !(a * d + p * p - b * c).is_multiple_of(p) {
                            elements.push([a, b, c, d]);
                        }
                    }
                }
            }
        }
        let n = elements.len();
        let index: HashMap<Mat, usize> =
            elements.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let mut mul = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                mul[i * n + j] = index[&mat_mul(&elements[i], &elements[j], p)];
            }
        }
        let id = index[&[1, 0, 0, 1]];
        let inv: Vec<usize> = (0..n)
            .map(|i| (0..n).find(|&j| mul[i * n + j] == id).unwrap())
            .collect();
        let order_of: Vec<u64> = (0..n)
            .map(|i| {
                let (mut x, mut k) = (i, 1);
                while x != id {
                    x = mul[x * n + i];
                    k += 1;
                }
                k
            })
            .collect();
        let mut class_of = vec![usize::MAX; n];
        let mut classes = Vec::new();
        // identity first
        for start in std::iter::once(id).chain(0..n) {
            if class_of[start] != usize::MAX {
                continue;
            }
            let mut members: Vec<usize> = (0..n)
                .map(|x| mul[mul[x * n + start] * n + inv[x]])
                .collect();
            members.sort_unstable();
            members.dedup();
            for &m in &members {
                class_of[m] = classes.len();
            }
            classes.push(members);
        }
        let exponent = order_of.iter().fold(1, |acc, &o| acc / gcd(acc, o) * o);
        Group {
            p,
            elements,
            index,
            mul,
            inv,
            order_of,
            class_of,
            classes,
            exponent,
        }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index_of(&self, m: &Mat) -> usize {
        self.index[m]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inv[a]
    }

    fn prod(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order() + b]
    }

    fn power(&self, g: usize, k: u64) -> usize {
        let mut x = self.index[&[1, 0, 0, 1]];
        for _ in 0..k {
            x = self.prod(x, g);
        }
        x
    }
}

/// Nonzero vectors spanning the null space of `a` (rows x cols) mod `m`.
fn null_space(mut a: Vec<Vec<u64>>, cols: usize, m: u64) -> Vec<Vec<u64>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(k) = (r..a.len()).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, k);
        let iv = inv_mod(a[r][c], m);
        for x in a[r].iter_mut() {
            *x = *x * iv % m;
        }
        for i in 0..a.len() {
            if i != r && a[i][c] != 0 {
                let f = a[i][c];
                for j in 0..cols {
                    a[i][j] = (a[i][j] + m * m - f * a[r][j] % m) % m;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![0; cols];
            v[free] = 1;
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = (m - a[row][free]) % m;
            }
            v
        })
        .collect()
}

pub struct CharacterTable {
    pub group: Group,
    /// `(degree, value on each class at level = group exponent)`.
    pub rows: Vec<(u64, Vec<CycNum>)>,
}

impl CharacterTable {
    pub fn value(&self, row: usize, element: usize) -> &CycNum {
        &self.rows[row].1[self.group.class_of[element]]
    }
}

pub fn character_table(p: u64) -> CharacterTable {
    let g = Group::gl2(p);
    let r = g.classes.len();
    let n = g.order() as u64;
    let e = g.exponent;
    let big = (1..)
        .map(|k| k * e + 1)
        .find(|&cand| is_prime(cand) && cand * cand > 4 * n)
        .unwrap();

    // a[i][j][k] = #{x in C_i : x^{-1} z_k in C_j}
    let mut a = vec![vec![vec![0u64; r]; r]; r];
    for (k, class) in g.classes.iter().enumerate() {
        let z = class[0];
        for x in 0..g.order() {
            let j = g.class_of[g.prod(g.inv[x], z)];
            a[g.class_of[x]][j][k] += 1;
        }
    }

    // refine the whole space into common eigenspaces of every M_i
    let mut spaces: Vec<Vec<Vec<u64>>> = vec![(0..r)
        .map(|i| (0..r).map(|j| (i == j) as u64).collect())
        .collect()];
    for mi in &a {
        let mut next = Vec::new();
        for basis in spaces {
            if basis.len() == 1 {
                next.push(basis);
                continue;
            }
            let d = basis.len();
            for lambda in 0..big {
                // (M_i - lambda) B^T c = 0
                let sys: Vec<Vec<u64>> = (0..r)
                    .map(|row| {
                        (0..d)
                            .map(|b| {
                                let mv: u64 = (0..r)
                                    .map(|k| mi[row][k] % big * basis[b][k] % big)
                                    .sum::<u64>()
                                    % big;
                                (mv + big - lambda * basis[b][row] % big) % big
                            })
                            .collect()
                    })
                    .collect();
                let ker = null_space(sys, d, big);
                if ker.is_empty() {
                    continue;
                }
                let sub: Vec<Vec<u64>> = ker
                    .iter()
                    .map(|c| {
                        (0..r)
                            .map(|k| (0..d).map(|b| c[b] * basis[b][k] % big).sum::<u64>() % big)
                            .collect()
                    })
                    .collect();
                next.push(sub);
            }
        }
        spaces = next;
    }
    assert!(
        spaces.iter().all(|s| s.len() == 1),
        "central characters not separated"
    );
    assert_eq!(spaces.len(), r);

    let root = (2..big)
        .find(|&x| (1..big - 1).all(|k| (big - 1) % k != 0 || pow_mod(x, k, big) != 1))
        .unwrap();
    let z = pow_mod(root, (big - 1) / e, big);
    let inv_class: Vec<usize> = g.classes.iter().map(|c| g.class_of[g.inv[c[0]]]).collect();

    let mut rows = Vec::new();
    for s in spaces {
        let mut w = s[0].clone();
        let s0 = inv_mod(w[0], big);
        w.iter_mut().for_each(|x| *x = *x * s0 % big);
        let mut t = 0u64;
        for i in 0..r {
            let h = g.classes[i].len() as u64;
            t = (t + w[i] * w[inv_class[i]] % big * inv_mod(h, big)) % big;
        }
        let d2 = n % big * inv_mod(t, big) % big;
        let d = (1..=n)
            .find(|d| d * d % big == d2 && d * d <= n)
            .expect("degree");
        let chi_p: Vec<u64> = (0..r)
            .map(|i| d * w[i] % big * inv_mod(g.classes[i].len() as u64, big) % big)
            .collect();
        let values = g
            .classes
            .iter()
            .map(|class| {
                let x = class[0];
                let o = g.order_of[x];
                let y = pow_mod(z, e / o, big);
                let mut v = CycNum::zero(e);
                for l in 0..o {
                    let mut m = 0u64;
                    for j in 0..o {
                        let c = chi_p[g.class_of[g.power(x, j)]];
                        m = (m + c * pow_mod(y, (o - (j * l) % o) % o, big)) % big;
                    }
                    let m = m * inv_mod(o, big) % big;
                    assert!(m <= d, "multiplicity {m} exceeds degree {d}");
                    for _ in 0..m {
                        v = v + CycNum::root(e, (l * (e / o)) as i64);
                    }
                }
                v
            })
            .collect();
        rows.push((d, values));
    }
    CharacterTable { group: g, rows }
}

/// `F_{p^2} = F_p[x]/(x^2 - nu)` with a primitive element `g`; the tower
/// generator of `F_p^*` is `g^{p+1}`.
pub struct Quadratic {
    pub p: u64,
    pub nu: u64,
    pub g: (u64, u64),
}

impl Quadratic {
    pub fn new(p: u64) -> Self {
        let nu = (2..p)
            .find(|&a| pow_mod(a, (p - 1) / 2, p) == p - 1)
            .unwrap();
        let mut q = Quadratic { p, nu, g: (0, 1) };
        let order = p * p - 1;
        q.g = (0..p)
            .flat_map(|u| (1..p).map(move |v| (u, v)))
            .find(|&x| {
                (1..order)
                    .filter(|k| order.is_multiple_of(*k))
                    .all(|k| q.pow(x, k) != (1, 0))
            })
            .unwrap();
        q
    }

    fn mul(&self, a: (u64, u64), b: (u64, u64)) -> (u64, u64) {
        let p = self.p;
        (
            (a.0 * b.0 + self.nu * a.1 % p * b.1) % p,
            (a.0 * b.1 + a.1 * b.0) % p,
        )
    }

    pub fn pow(&self, a: (u64, u64), k: u64) -> (u64, u64) {
        (0..k).fold((1, 0), |acc, _| self.mul(acc, a))
    }

    /// `h = g^{p+1}`, which lies in `F_p`.
    pub fn h(&self) -> u64 {
        let n = self.pow(self.g, self.p + 1);
        assert_eq!(n.1, 0);
        n.0
    }

    /// Matrix of multiplication by `g^a` in the basis `(1, x)`.
    pub fn elliptic(&self, a: u64) -> Mat {
        let (u, v) = self.pow(self.g, a);
        [u, self.nu * v % self.p, v, u]
    }

    pub fn split(&self, i: u64, j: u64) -> Mat {
        [
            pow_mod(self.h(), i, self.p),
            0,
            0,
            pow_mod(self.h(), j, self.p),
        ]
    }
}
