//! Finite abelian groups `Z/m_1 x ... x Z/m_r` in exponent coordinates,
//! their characters, homomorphisms between them and pullbacks.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::cyclotomic::CycNum;
use crate::error::{Error, Result};

/// Default cap on the number of elements an enumeration may produce.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinAbGroup {
    moduli: Vec<u64>,
}

impl FinAbGroup {
    pub fn new(moduli: Vec<u64>) -> Result<Arc<Self>> {
        if moduli.contains(&0) {
            return Err(Error::ParentMismatch(format!(
                "moduli must be positive: {moduli:?}"
            )));
        }
        Ok(Arc::new(FinAbGroup { moduli }))
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn order(&self) -> u128 {
        self.moduli.iter().map(|&m| m as u128).product()
    }

    /// lcm of the moduli; every character takes values in the roots of unity
    /// of this order.
    pub fn exponent(&self) -> u64 {
        self.moduli.iter().fold(1u64, |acc, &m| acc.lcm(&m))
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.rank() {
            return Err(Error::ParentMismatch(format!(
                "{len} coordinates given, group {self} has rank {}",
                self.rank()
            )));
        }
        Ok(())
    }

    fn reduce(&self, coords: &[i128]) -> Vec<u64> {
        coords
            .iter()
            .zip(&self.moduli)
            .map(|(&a, &m)| a.rem_euclid(m as i128) as u64)
            .collect()
    }

    pub fn identity(self: &Arc<Self>) -> GrpElt {
        GrpElt {
            group: self.clone(),
            exps: vec![0; self.rank()],
        }
    }

    pub fn element(self: &Arc<Self>, coords: &[i64]) -> Result<GrpElt> {
        self.check_len(coords.len())?;
        let c: Vec<i128> = coords.iter().map(|&a| a as i128).collect();
        Ok(GrpElt {
            group: self.clone(),
            exps: self.reduce(&c),
        })
    }

    pub fn character(self: &Arc<Self>, coords: &[i64]) -> Result<AbChar> {
        let g = self.element(coords)?;
        Ok(AbChar {
            group: g.group,
            cexps: g.exps,
        })
    }

    pub fn trivial_character(self: &Arc<Self>) -> AbChar {
        AbChar {
            group: self.clone(),
            cexps: vec![0; self.rank()],
        }
    }

    fn check_budget(&self, budget: u128) -> Result<()> {
        let size = self.order();
        if size > budget {
            Err(Error::BudgetExceeded { size, budget })
        } else {
            Ok(())
        }
    }

    /// All coordinate tuples in lexicographic order (last coordinate fastest).
    fn tuples(&self) -> impl Iterator<Item = Vec<u64>> + '_ {
        let total = self.order();
        (0..total).map(move |mut idx| {
            let mut v = vec![0u64; self.rank()];
            for (slot, &m) in v.iter_mut().zip(&self.moduli).rev() {
                *slot = (idx % m as u128) as u64;
                idx /= m as u128;
            }
            v
        })
    }

    pub fn enumerate_elements(self: &Arc<Self>, budget: u128) -> Result<Vec<GrpElt>> {
        self.check_budget(budget)?;
        Ok(self
            .tuples()
            .map(|exps| GrpElt {
                group: self.clone(),
                exps,
            })
            .collect())
    }

    pub fn enumerate_chars(self: &Arc<Self>, budget: u128) -> Result<Vec<AbChar>> {
        self.check_budget(budget)?;
        Ok(self
            .tuples()
            .map(|cexps| AbChar {
                group: self.clone(),
                cexps,
            })
            .collect())
    }
}

impl fmt::Display for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.moduli.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.moduli.iter().map(|m| format!("Z/{m}")).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

fn same_group(a: &Arc<FinAbGroup>, b: &Arc<FinAbGroup>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::ParentMismatch(format!("{a} vs {b}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GrpElt {
    group: Arc<FinAbGroup>,
    exps: Vec<u64>,
}

impl GrpElt {
    pub fn group(&self) -> &Arc<FinAbGroup> {
        &self.group
    }

    pub fn exps(&self) -> &[u64] {
        &self.exps
    }

    pub fn is_identity(&self) -> bool {
        self.exps.iter().all(|&a| a == 0)
    }

    pub fn inverse(&self) -> GrpElt {
        let neg: Vec<i128> = self.exps.iter().map(|&a| -(a as i128)).collect();
        GrpElt {
            exps: self.group.reduce(&neg),
            group: self.group.clone(),
        }
    }

    pub fn mul(&self, other: &GrpElt) -> Result<GrpElt> {
        same_group(&self.group, &other.group)?;
        let sum: Vec<i128> = self
            .exps
            .iter()
            .zip(&other.exps)
            .map(|(&a, &b)| a as i128 + b as i128)
            .collect();
        Ok(GrpElt {
            exps: self.group.reduce(&sum),
            group: self.group.clone(),
        })
    }
}

/// A character, stored by its exponent tuple: its value at `(a_i)` is
/// `zeta_L^(sum c_i a_i L/m_i)` with `L` the group exponent.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbChar {
    group: Arc<FinAbGroup>,
    cexps: Vec<u64>,
}

impl AbChar {
    pub fn group(&self) -> &Arc<FinAbGroup> {
        &self.group
    }

    pub fn cexps(&self) -> &[u64] {
        &self.cexps
    }

    pub fn is_trivial(&self) -> bool {
        self.cexps.iter().all(|&c| c == 0)
    }

    /// Exponent of `self(g)` as a root of unity of order `level`, where the
    /// group exponent divides `level`.
    pub fn exponent_at(&self, g: &GrpElt, level: u64) -> Result<u64> {
        same_group(&self.group, &g.group)?;
        let exp = self.group.exponent();
        if !level.is_multiple_of(exp) {
            return Err(Error::NonDivisibleLevel {
                from: exp,
                to: level,
            });
        }
        Ok(raw_exponent(
            &self.cexps,
            &g.exps,
            self.group.moduli(),
            level,
        ))
    }

    pub fn evaluate(&self, g: &GrpElt) -> Result<CycNum> {
        let level = self.group.exponent();
        let e = self.exponent_at(g, level)?;
        Ok(CycNum::root(level, e as i64))
    }

    pub fn mul(&self, other: &AbChar) -> Result<AbChar> {
        same_group(&self.group, &other.group)?;
        let sum: Vec<i128> = self
            .cexps
            .iter()
            .zip(&other.cexps)
            .map(|(&a, &b)| a as i128 + b as i128)
            .collect();
        Ok(AbChar {
            cexps: self.group.reduce(&sum),
            group: self.group.clone(),
        })
    }

    /// Composition with a coordinate permutation: `(c . sigma)_i = c_{sigma(i)}`.
    pub fn permute(&self, perm: &[usize]) -> Result<AbChar> {
        check_perm(&self.group, perm)?;
        Ok(AbChar {
            group: self.group.clone(),
            cexps: perm.iter().map(|&j| self.cexps[j]).collect(),
        })
    }
}

/// `sum c_i a_i (level / m_i) mod level`.
#[inline]
pub(crate) fn raw_exponent(cexps: &[u64], exps: &[u64], moduli: &[u64], level: u64) -> u64 {
    let mut acc: u128 = 0;
    let l = level as u128;
    for ((&c, &a), &m) in cexps.iter().zip(exps).zip(moduli) {
        let step = (level / m) as u128;
        acc = (acc + (c as u128 * a as u128 % m as u128) * step) % l;
    }
    acc as u64
}

fn check_perm(group: &FinAbGroup, perm: &[usize]) -> Result<()> {
    let r = group.rank();
    let mut seen = vec![false; r];
    if perm.len() != r {
        return Err(Error::IncompatiblePermutation(perm.to_vec()));
    }
    for (i, &j) in perm.iter().enumerate() {
        if j >= r || seen[j] || group.moduli[i] != group.moduli[j] {
            return Err(Error::IncompatiblePermutation(perm.to_vec()));
        }
        seen[j] = true;
    }
    Ok(())
}

/// Orbit of `chi` under the group generated by the given coordinate
/// permutations, deduplicated and sorted by exponent tuple.
pub fn orbit(chi: &AbChar, perms: &[Vec<usize>]) -> Result<Vec<AbChar>> {
    for p in perms {
        check_perm(&chi.group, p)?;
    }
    let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
    let mut stack = vec![chi.cexps.clone()];
    seen.insert(chi.cexps.clone());
    while let Some(c) = stack.pop() {
        for p in perms {
            let next: Vec<u64> = p.iter().map(|&j| c[j]).collect();
            if seen.insert(next.clone()) {
                stack.push(next);
            }
        }
    }
    Ok(seen
        .into_iter()
        .map(|cexps| AbChar {
            group: chi.group.clone(),
            cexps,
        })
        .collect())
}

/// A homomorphism given by the images of the standard generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbHom {
    source: Arc<FinAbGroup>,
    target: Arc<FinAbGroup>,
    images: Vec<Vec<u64>>,
}

impl AbHom {
    pub fn new(
        source: Arc<FinAbGroup>,
        target: Arc<FinAbGroup>,
        images: Vec<Vec<i64>>,
    ) -> Result<Self> {
        if images.len() != source.rank() {
            return Err(Error::IllDefinedHom(format!(
                "{} generator images for a group of rank {}",
                images.len(),
                source.rank()
            )));
        }
        let mut reduced = Vec::with_capacity(images.len());
        for (img, &m) in images.iter().zip(source.moduli()) {
            target.check_len(img.len())?;
            let r = target.reduce(&img.iter().map(|&a| a as i128).collect::<Vec<_>>());
            // m * image must vanish in the target
            let killed = r
                .iter()
                .zip(target.moduli())
                .all(|(&a, &t)| (a as u128 * m as u128).is_multiple_of(t as u128));
            if !killed {
                return Err(Error::IllDefinedHom(format!(
                    "generator of order {m} sent to {r:?} in {target}"
                )));
            }
            reduced.push(r);
        }
        Ok(AbHom {
            source,
            target,
            images: reduced,
        })
    }

    pub fn identity(group: &Arc<FinAbGroup>) -> Self {
        let r = group.rank();
        let images = (0..r)
            .map(|i| (0..r).map(|j| (i == j) as u64).collect())
            .collect();
        AbHom {
            source: group.clone(),
            target: group.clone(),
            images,
        }
    }

    pub fn source(&self) -> &Arc<FinAbGroup> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FinAbGroup> {
        &self.target
    }

    pub fn images(&self) -> &[Vec<u64>] {
        &self.images
    }

    pub fn apply(&self, g: &GrpElt) -> Result<GrpElt> {
        same_group(&self.source, &g.group)?;
        let mut acc = vec![0i128; self.target.rank()];
        for (&a, img) in g.exps.iter().zip(&self.images) {
            for ((slot, &b), &t) in acc.iter_mut().zip(img).zip(self.target.moduli()) {
                let t = t as i128;
                *slot = (*slot + (a as i128 % t) * b as i128) % t;
            }
        }
        Ok(GrpElt {
            exps: self.target.reduce(&acc),
            group: self.target.clone(),
        })
    }

    /// `self . inner`: first `inner`, then `self`.
    pub fn compose(&self, inner: &AbHom) -> Result<AbHom> {
        same_group(&inner.target, &self.source)?;
        let images = inner
            .images
            .iter()
            .map(|img| {
                let g = GrpElt {
                    group: self.source.clone(),
                    exps: img.clone(),
                };
                self.apply(&g)
                    .map(|h| h.exps.iter().map(|&x| x as i64).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        AbHom::new(inner.source.clone(), self.target.clone(), images)
    }

    /// Whether the image is the whole target: the lattice spanned by the
    /// generator images and the relations `m_t e_t` must be all of `Z^r`,
    /// i.e. its Hermite normal form must have unit diagonal.
    pub fn is_surjective(&self) -> bool {
        let r = self.target.rank();
        let mut cols: Vec<Vec<BigInt>> = self
            .images
            .iter()
            .map(|img| img.iter().map(|&a| BigInt::from(a)).collect())
            .collect();
        for (t, &m) in self.target.moduli().iter().enumerate() {
            let mut c = vec![BigInt::zero(); r];
            c[t] = BigInt::from(m);
            cols.push(c);
        }
        for t in 0..r {
            // gather all row-t mass into column t with unimodular column operations
            let Some(first) = (t..cols.len()).find(|&j| !cols[j][t].is_zero()) else {
                return false;
            };
            cols.swap(t, first);
            for j in t + 1..cols.len() {
                if cols[j][t].is_zero() {
                    continue;
                }
                let a = cols[t][t].clone();
                let b = cols[j][t].clone();
                let e = a.extended_gcd(&b);
                let (g, x, y) = (e.gcd, e.x, e.y);
                let (ag, bg) = (&a / &g, &b / &g);
                let new_t: Vec<BigInt> = cols[t]
                    .iter()
                    .zip(&cols[j])
                    .map(|(u, v)| &x * u + &y * v)
                    .collect();
                let new_j: Vec<BigInt> = cols[t]
                    .iter()
                    .zip(&cols[j])
                    .map(|(u, v)| &bg * u - &ag * v)
                    .collect();
                cols[t] = new_t;
                cols[j] = new_j;
            }
            if !cols[t][t].abs().is_one() {
                return false;
            }
        }
        true
    }
}

/// Pullback of a character of the target along `h`: `(chi . h)(g) = chi(h(g))`.
pub fn pullback(chi: &AbChar, h: &AbHom) -> Result<AbChar> {
    same_group(&chi.group, &h.target)?;
    let tgt_level = h.target.exponent();
    let cexps = h
        .images
        .iter()
        .zip(h.source.moduli())
        .map(|(img, &m)| {
            // value on generator i is zeta_{tgt_level}^x, an m-th root of unity
            let x = raw_exponent(&chi.cexps, img, h.target.moduli(), tgt_level) as u128;
            let big = (tgt_level as u128).lcm(&(m as u128));
            let xs = x * (big / tgt_level as u128);
            let step = big / m as u128;
            debug_assert_eq!(xs % step, 0);
            ((xs / step) % m as u128) as u64
        })
        .collect();
    Ok(AbChar {
        group: h.source.clone(),
        cexps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grp(m: &[u64]) -> Arc<FinAbGroup> {
        FinAbGroup::new(m.to_vec()).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let g = grp(&[4]);
        assert_eq!(
            g.trivial_character()
                .evaluate(&g.element(&[3]).unwrap())
                .unwrap(),
            CycNum::one(4)
        );
        let chi = g.character(&[1]).unwrap();
        assert_eq!(
            chi.evaluate(&g.element(&[2]).unwrap()).unwrap(),
            CycNum::from_integer(4, -1)
        );
        // Z/3 x Z/4 at level 12: 1*2*4 + 1*3*3 = 17 = 5 mod 12
        let g = grp(&[3, 4]);
        let chi = g.character(&[1, 1]).unwrap();
        let x = g.element(&[2, 3]).unwrap();
        assert_eq!(chi.evaluate(&x).unwrap(), CycNum::root(12, 5));
    }

    #[test]
    fn parent_mismatch() {
        let a = grp(&[4]);
        let b = grp(&[5]);
        assert!(a.trivial_character().evaluate(&b.identity()).is_err());
    }

    #[test]
    fn pullback_examples() {
        let g = grp(&[5]);
        let chi = g.character(&[3]).unwrap();
        assert_eq!(pullback(&chi, &AbHom::identity(&g)).unwrap(), chi);
        let double = AbHom::new(g.clone(), g.clone(), vec![vec![2]]).unwrap();
        assert_eq!(
            pullback(&g.character(&[1]).unwrap(), &double)
                .unwrap()
                .cexps(),
            &[2]
        );
        let src = grp(&[6, 4]);
        let tgt = grp(&[12]);
        let h = AbHom::new(src.clone(), tgt.clone(), vec![vec![2], vec![3]]).unwrap();
        assert!(pullback(&tgt.trivial_character(), &h).unwrap().is_trivial());
    }

    #[test]
    fn ill_defined_hom_rejected() {
        // Z/4 -> Z/3, 1 -> 1 is not well defined
        assert!(AbHom::new(grp(&[4]), grp(&[3]), vec![vec![1]]).is_err());
    }

    #[test]
    fn surjectivity_examples() {
        let g = grp(&[4]);
        assert!(AbHom::identity(&g).is_surjective());
        assert!(!AbHom::new(g.clone(), g.clone(), vec![vec![2]])
            .unwrap()
            .is_surjective());
        // q = 3: Z/8 -> Z/2, b -> b mod 2
        let h = AbHom::new(grp(&[8]), grp(&[2]), vec![vec![1]]).unwrap();
        assert!(h.is_surjective());
        assert_eq!(brute_image_size(&h), 2);
    }

    fn brute_image_size(h: &AbHom) -> usize {
        h.source()
            .enumerate_elements(DEFAULT_ENUMERATION_BUDGET)
            .unwrap()
            .iter()
            .map(|g| h.apply(g).unwrap().exps().to_vec())
            .collect::<BTreeSet<_>>()
            .len()
    }

    #[test]
    fn enumeration_order_and_budget() {
        let g = grp(&[2, 2]);
        let els = g.enumerate_elements(100).unwrap();
        assert_eq!(els.len(), 4);
        assert!(els[0].is_identity());
        assert_eq!(els[1].exps(), &[0, 1]);
        assert!(matches!(
            grp(&[100, 100]).enumerate_chars(1000),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn orbit_examples() {
        let g = grp(&[7, 7]);
        let swap = vec![vec![1, 0]];
        assert_eq!(orbit(&g.trivial_character(), &swap).unwrap().len(), 1);
        assert_eq!(
            orbit(&g.character(&[3, 3]).unwrap(), &swap).unwrap().len(),
            1
        );
        let o = orbit(&g.character(&[1, 2]).unwrap(), &swap).unwrap();
        let exps: Vec<&[u64]> = o.iter().map(|c| c.cexps()).collect();
        assert_eq!(exps, vec![&[1, 2][..], &[2, 1][..]]);
        assert!(orbit(&grp(&[3, 4]).trivial_character(), &swap).is_err());
    }

    #[test]
    fn duality_and_orthogonality_exhaustive() {
        for moduli in [vec![6], vec![2, 4], vec![3, 3], vec![2, 3, 5], vec![12, 10]] {
            let g = grp(&moduli);
            let els = g.enumerate_elements(1000).unwrap();
            let chars = g.enumerate_chars(1000).unwrap();
            assert_eq!(chars.len() as u128, g.order());
            let level = g.exponent();
            let tables: BTreeSet<Vec<u64>> = chars
                .iter()
                .map(|c| {
                    els.iter()
                        .map(|x| c.exponent_at(x, level).unwrap())
                        .collect()
                })
                .collect();
            assert_eq!(
                tables.len(),
                chars.len(),
                "distinct characters give distinct tables"
            );
            if g.order() > 60 {
                continue;
            }
            for a in &chars {
                for b in &chars {
                    let sum = CycNum::from_root_sum(
                        level,
                        els.iter().map(|x| {
                            let e = a.exponent_at(x, level).unwrap()
                                + b.exponent_at(&x.inverse(), level).unwrap();
                            (e, 1)
                        }),
                    );
                    let expected = if a == b { g.order() as i64 } else { 0 };
                    assert_eq!(sum, CycNum::from_integer(level, expected));
                }
            }
        }
    }

    fn group_and_hom() -> impl Strategy<Value = (Vec<u64>, Vec<u64>, Vec<Vec<i64>>)> {
        (
            proptest::collection::vec(1u64..9, 1..3),
            proptest::collection::vec(1u64..9, 1..3),
        )
            .prop_flat_map(|(src, tgt)| {
                let r = tgt.len();
                let n = src.len();
                (
                    Just(src),
                    Just(tgt),
                    proptest::collection::vec(proptest::collection::vec(0i64..40, r), n),
                )
            })
    }

    /// Scales raw images so the homomorphism is well defined.
    fn fix_images(src: &[u64], tgt: &[u64], imgs: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
        imgs.into_iter()
            .zip(src)
            .map(|(img, &m)| {
                img.into_iter()
                    .zip(tgt)
                    .map(|(a, &t)| a * (t / t.gcd(&m)) as i64)
                    .collect()
            })
            .collect()
    }

    proptest! {
        #[test]
        fn surjectivity_matches_brute_force((src, tgt, imgs) in group_and_hom()) {
            let imgs = fix_images(&src, &tgt, imgs);
            let h = AbHom::new(grp(&src), grp(&tgt), imgs).unwrap();
            prop_assert_eq!(h.is_surjective(), brute_image_size(&h) as u128 == h.target().order());
        }

        #[test]
        fn pullback_pointwise((src, tgt, imgs) in group_and_hom(), seed in 0u64..1000) {
            let imgs = fix_images(&src, &tgt, imgs);
            let h = AbHom::new(grp(&src), grp(&tgt), imgs).unwrap();
            let chars = h.target().enumerate_chars(1000).unwrap();
            let chi = &chars[(seed as usize) % chars.len()];
            let pb = pullback(chi, &h).unwrap();
            for g in h.source().enumerate_elements(1000).unwrap() {
                let lhs = pb.evaluate(&g).unwrap();
                let rhs = chi.evaluate(&h.apply(&g).unwrap()).unwrap();
                let l = lhs.level().lcm(&rhs.level());
                prop_assert_eq!(lhs.lift(l).unwrap(), rhs.lift(l).unwrap());
            }
        }

        #[test]
        fn pullback_contravariant(m in 1u64..10, a in 0i64..30, b in 0i64..30, c in 0i64..10) {
            let g = grp(&[m]);
            let h = AbHom::new(g.clone(), g.clone(), vec![vec![a]]).unwrap();
            let k = AbHom::new(g.clone(), g.clone(), vec![vec![b]]).unwrap();
            let chi = g.character(&[c]).unwrap();
            let lhs = pullback(&chi, &h.compose(&k).unwrap()).unwrap();
            let rhs = pullback(&pullback(&chi, &h).unwrap(), &k).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn inverse_evaluation(moduli in proptest::collection::vec(1u64..12, 1..4), seed in 0u64..10_000) {
            let g = grp(&moduli);
            let els = g.enumerate_elements(10_000).unwrap();
            let x = &els[seed as usize % els.len()];
            let chi = g.enumerate_chars(10_000).unwrap()[(seed as usize * 7) % els.len()].clone();
            let prod = &chi.evaluate(x).unwrap() * &chi.evaluate(&x.inverse()).unwrap();
            prop_assert_eq!(prod, CycNum::one(g.exponent()));
        }
    }
}
