use std::collections::HashSet;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, OnceLock};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{ClassicalGroup, Family, GroupDescriptor};
use crate::error::{Error, Result};
use crate::genball::ClassSet;
use crate::gf::{Field, FieldElem};
use crate::linalg::Matrix;
use crate::perm::{alternating_elements, alternating_generators, Permutation};

pub const DEFAULT_CAP: u128 = 200_000;

/// Seed for the random generator draws of [`GroupTable::enumerate`]; the
/// resulting table does not depend on it (elements are sorted).
const ENUM_SEED: u64 = 0x5eed;

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

/// How elements are packed into a `u128` key: matrix entries (row-major) or
/// permutation images, first entry most significant, so key order is the
/// lexicographic order of entry codes.
#[derive(Debug, Clone)]
pub enum Backend {
    Matrix { field: Arc<Field>, n: usize, bits: u32 },
    Perm { n: usize },
}

const MAX_ENTRIES: usize = 64;

impl Backend {
    pub fn matrix(field: &Arc<Field>, n: usize) -> Result<Self> {
        let bits = 32 - (field.order() - 1).leading_zeros();
        if n * n * bits as usize > 128 || n * n > MAX_ENTRIES || field.order() > 256 {
            return Err(Error::OutOfRange(format!("{n}x{n} matrices over GF({}) do not pack", field.order())));
        }
        Ok(Backend::Matrix {
            field: field.clone(),
            n,
            bits,
        })
    }

    fn entries(&self) -> usize {
        match self {
            Backend::Matrix { n, .. } => n * n,
            Backend::Perm { n } => *n,
        }
    }

    fn bits(&self) -> u32 {
        match self {
            Backend::Matrix { bits, .. } => *bits,
            Backend::Perm { .. } => 4,
        }
    }

    #[inline]
    fn unpack(&self, key: u128, out: &mut [u8]) {
        let m = self.entries();
        let b = self.bits();
        let mask = (1u128 << b) - 1;
        for (t, o) in out.iter_mut().take(m).enumerate() {
            *o = ((key >> ((m - 1 - t) as u32 * b)) & mask) as u8;
        }
    }

    #[inline]
    fn pack(&self, v: &[u8]) -> u128 {
        let b = self.bits();
        v[..self.entries()].iter().fold(0u128, |acc, &x| (acc << b) | x as u128)
    }

    #[inline]
    fn mul_raw(&self, a: &[u8], b: &[u8], out: &mut [u8]) {
        match self {
            Backend::Perm { n } => {
                for i in 0..*n {
                    out[i] = a[b[i] as usize];
                }
            }
            Backend::Matrix { field, n, .. } => {
                let n = *n;
                let f = &**field;
                out[..n * n].fill(0);
                for i in 0..n {
                    for l in 0..n {
                        let x = a[i * n + l];
                        if x == 0 {
                            continue;
                        }
                        let x = FieldElem::raw(x as u32);
                        for j in 0..n {
                            let y = b[l * n + j];
                            if y == 0 {
                                continue;
                            }
                            let s = f.add(FieldElem::raw(out[i * n + j] as u32), f.mul(x, FieldElem::raw(y as u32)));
                            out[i * n + j] = s.index() as u8;
                        }
                    }
                }
            }
        }
    }

    #[inline]
    pub(crate) fn mul_keys(&self, x: u128, y: u128) -> u128 {
        let mut a = [0u8; MAX_ENTRIES];
        let mut b = [0u8; MAX_ENTRIES];
        let mut c = [0u8; MAX_ENTRIES];
        self.unpack(x, &mut a);
        self.unpack(y, &mut b);
        self.mul_raw(&a, &b, &mut c);
        self.pack(&c)
    }

    fn identity_key(&self) -> u128 {
        let mut v = [0u8; MAX_ENTRIES];
        match self {
            Backend::Matrix { n, .. } => {
                for i in 0..*n {
                    v[i * n + i] = 1;
                }
            }
            Backend::Perm { n } => {
                for (i, x) in v.iter_mut().take(*n).enumerate() {
                    *x = i as u8;
                }
            }
        }
        self.pack(&v)
    }

    fn key_of_matrix(&self, m: &Matrix) -> u128 {
        let codes: Vec<u8> = m.entries().iter().map(|x| x.index() as u8).collect();
        self.pack(&codes)
    }

    fn matrix_of_key(&self, key: u128) -> Matrix {
        let Backend::Matrix { field, n, .. } = self else {
            panic!("not a matrix table");
        };
        let mut v = [0u8; MAX_ENTRIES];
        self.unpack(key, &mut v);
        let data = v[..n * n].iter().map(|&c| FieldElem::raw(c as u32)).collect();
        Matrix::new(field, *n, *n, data).expect("valid codes")
    }

    fn inverse_key(&self, key: u128) -> u128 {
        match self {
            Backend::Matrix { .. } => {
                let m = self.matrix_of_key(key);
                self.key_of_matrix(&m.inverse().expect("group elements are invertible"))
            }
            Backend::Perm { n } => {
                let mut v = [0u8; MAX_ENTRIES];
                let mut w = [0u8; MAX_ENTRIES];
                self.unpack(key, &mut v);
                for i in 0..*n {
                    w[v[i] as usize] = i as u8;
                }
                self.pack(&w)
            }
        }
    }
}

#[derive(Debug)]
struct Classes {
    class_of: Vec<u32>,
    reps: Vec<u32>,
    sizes: Vec<u64>,
}

/// A fully enumerated finite group: sorted packed elements with index
/// lookup, generators, and lazily computed conjugacy classes and class
/// product table.
#[derive(Debug)]
pub struct GroupTable {
    id: u64,
    label: String,
    desc: GroupDescriptor,
    full: bool,
    backend: Backend,
    keys: Vec<u128>,
    generators: Vec<u32>,
    identity: u32,
    classes: OnceLock<Classes>,
    products: OnceLock<Vec<ClassSet>>,
}

fn closure(backend: &Backend, gens: &[u128], limit: u128) -> Result<Vec<u128>> {
    let id = backend.identity_key();
    let mut seen: HashSet<u128> = HashSet::new();
    seen.insert(id);
    let mut queue = vec![id];
    let mut head = 0;
    while head < queue.len() {
        let x = queue[head];
        head += 1;
        for &s in gens {
            let y = backend.mul_keys(x, s);
            if seen.insert(y) {
                if seen.len() as u128 > limit {
                    return Err(Error::Internal(format!("closure exceeds {limit} elements")));
                }
                queue.push(y);
            }
        }
    }
    Ok(queue)
}

impl GroupTable {
    /// Enumerates `H` for the descriptor, failing when the order formula
    /// exceeds `cap`.
    pub fn enumerate(d: &GroupDescriptor, cap: u128) -> Result<GroupTable> {
        d.validate()?;
        let order = d.order();
        if order > cap {
            return Err(Error::CapExceeded { order, cap });
        }
        if d.family == Family::Alt {
            return Ok(Self::alternating(d));
        }
        let g = ClassicalGroup::new(d)?;
        let mut rng = ChaCha8Rng::seed_from_u64(ENUM_SEED);
        Self::from_random_generators(d, false, order, || Ok(g.random_generator(&mut rng)))
    }

    /// The full group `SO` (q odd) or `GO` (q even) of an orthogonal
    /// descriptor, of order `2 |Omega|`.
    pub fn enumerate_full(d: &GroupDescriptor, cap: u128) -> Result<GroupTable> {
        d.validate()?;
        if !d.is_orthogonal() {
            return Err(Error::WrongFamily(format!("full orthogonal group of {d}")));
        }
        let order = 2 * d.order();
        if order > cap {
            return Err(Error::CapExceeded { order, cap });
        }
        let g = ClassicalGroup::new(d)?;
        let mut rng = ChaCha8Rng::seed_from_u64(ENUM_SEED);
        Self::from_random_generators(d, true, order, || g.random_full_generator(&mut rng))
    }

    fn from_random_generators(
        d: &GroupDescriptor,
        full: bool,
        order: u128,
        mut draw: impl FnMut() -> Result<Matrix>,
    ) -> Result<GroupTable> {
        let field = d.matrix_field()?;
        let backend = Backend::matrix(&field, d.n)?;
        let mut gens: Vec<u128> = Vec::new();
        for _ in 0..24 {
            gens.push(backend.key_of_matrix(&draw()?));
            if gens.len() < 2 {
                continue;
            }
            let elems = closure(&backend, &gens, order)?;
            if elems.len() as u128 == order {
                return Ok(Self::assemble(d, full, backend, elems, &gens));
            }
        }
        Err(Error::Internal(format!("random generators never reached order {order} for {d}")))
    }

    fn alternating(d: &GroupDescriptor) -> GroupTable {
        let backend = Backend::Perm { n: d.n };
        let keys: Vec<u128> = alternating_elements(d.n).iter().map(|p| backend.pack(p.images())).collect();
        let gens: Vec<u128> = alternating_generators(d.n).iter().map(|p| backend.pack(p.images())).collect();
        Self::assemble(d, false, backend, keys, &gens)
    }

    fn assemble(d: &GroupDescriptor, full: bool, backend: Backend, mut keys: Vec<u128>, gens: &[u128]) -> GroupTable {
        keys.sort_unstable();
        let find = |k: u128| keys.binary_search(&k).expect("generator in group") as u32;
        let generators = gens.iter().map(|&g| find(g)).collect();
        let identity = find(backend.identity_key());
        let label = if full {
            let prefix = if d.char_two() { "GO" } else { "SO" };
            format!("{prefix}[{d}]")
        } else {
            d.to_string()
        };
        GroupTable {
            id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
            label,
            desc: d.clone(),
            full,
            backend,
            keys,
            generators,
            identity,
            classes: OnceLock::new(),
            products: OnceLock::new(),
        }
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn descriptor(&self) -> &GroupDescriptor {
        &self.desc
    }

    /// True for the `SO` / `GO` tables of [`GroupTable::enumerate_full`].
    pub fn is_full(&self) -> bool {
        self.full
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn identity(&self) -> u32 {
        self.identity
    }

    pub fn generators(&self) -> &[u32] {
        &self.generators
    }

    fn lookup(&self, key: u128) -> u32 {
        self.keys.binary_search(&key).expect("group is closed") as u32
    }

    #[inline]
    pub fn mul(&self, i: u32, j: u32) -> u32 {
        self.lookup(self.backend.mul_keys(self.keys[i as usize], self.keys[j as usize]))
    }

    pub fn inv(&self, i: u32) -> u32 {
        self.lookup(self.backend.inverse_key(self.keys[i as usize]))
    }

    /// `g x g^-1`.
    pub fn conj(&self, x: u32, g: u32) -> u32 {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn index_of_matrix(&self, m: &Matrix) -> Option<u32> {
        match &self.backend {
            Backend::Matrix { field, n, .. } if m.rows() == *n && m.cols() == *n && **m.field() == **field => {
                self.keys.binary_search(&self.backend.key_of_matrix(m)).ok().map(|i| i as u32)
            }
            _ => None,
        }
    }

    pub fn index_of_perm(&self, p: &Permutation) -> Option<u32> {
        match self.backend {
            Backend::Perm { n } if p.degree() == n => {
                self.keys.binary_search(&self.backend.pack(p.images())).ok().map(|i| i as u32)
            }
            _ => None,
        }
    }

    pub fn matrix(&self, i: u32) -> Option<Matrix> {
        match self.backend {
            Backend::Matrix { .. } => Some(self.backend.matrix_of_key(self.keys[i as usize])),
            Backend::Perm { .. } => None,
        }
    }

    pub fn perm(&self, i: u32) -> Option<Permutation> {
        match self.backend {
            Backend::Perm { n } => {
                let mut v = [0u8; MAX_ENTRIES];
                self.backend.unpack(self.keys[i as usize], &mut v);
                Some(Permutation::from_images(v[..n].to_vec()).expect("valid"))
            }
            Backend::Matrix { .. } => None,
        }
    }

    fn classes(&self) -> &Classes {
        self.classes.get_or_init(|| {
            let n = self.len();
            let gens: Vec<(u128, u128)> = self
                .generators
                .iter()
                .map(|&g| {
                    let k = self.keys[g as usize];
                    (k, self.backend.inverse_key(k))
                })
                .collect();
            let mut class_of = vec![u32::MAX; n];
            let mut reps = Vec::new();
            let mut sizes = Vec::new();
            for start in 0..n {
                if class_of[start] != u32::MAX {
                    continue;
                }
                let c = reps.len() as u32;
                reps.push(start as u32);
                class_of[start] = c;
                let mut stack = vec![self.keys[start]];
                let mut size = 1u64;
                while let Some(x) = stack.pop() {
                    for &(g, gi) in &gens {
                        let y = self.backend.mul_keys(self.backend.mul_keys(g, x), gi);
                        let j = self.lookup(y) as usize;
                        if class_of[j] == u32::MAX {
                            class_of[j] = c;
                            size += 1;
                            stack.push(y);
                        }
                    }
                }
                sizes.push(size);
            }
            Classes { class_of, reps, sizes }
        })
    }

    pub fn num_classes(&self) -> usize {
        self.classes().reps.len()
    }

    pub fn class_of(&self, i: u32) -> usize {
        self.classes().class_of[i as usize] as usize
    }

    /// Least element index of the class.
    pub fn class_rep(&self, c: usize) -> u32 {
        self.classes().reps[c]
    }

    pub fn class_size(&self, c: usize) -> u64 {
        self.classes().sizes[c]
    }

    pub fn class_members(&self, c: usize) -> Vec<u32> {
        let cl = self.classes();
        (0..self.len() as u32).filter(|&i| cl.class_of[i as usize] as usize == c).collect()
    }

    pub fn is_central(&self, i: u32) -> bool {
        self.class_size(self.class_of(i)) == 1
    }

    /// Classes meeting `C_a C_b`, as a class set: `{class(x r_b) : x in C_a}`
    /// (valid because the product of two classes is normal).
    pub fn class_product(&self, a: usize, b: usize) -> &ClassSet {
        let nc = self.num_classes();
        &self.class_products()[a * nc + b]
    }

    fn class_products(&self) -> &[ClassSet] {
        self.products.get_or_init(|| {
            let nc = self.num_classes();
            let n = self.len() as u32;
            let columns: Vec<Vec<ClassSet>> = (0..nc)
                .into_par_iter()
                .map(|b| {
                    let r = self.class_rep(b);
                    let mut col = vec![ClassSet::empty(nc); nc];
                    for x in 0..n {
                        let a = self.class_of(x);
                        col[a].insert(self.class_of(self.mul(x, r)));
                    }
                    col
                })
                .collect();
            let mut out = vec![ClassSet::empty(nc); nc * nc];
            for (b, col) in columns.into_iter().enumerate() {
                for (a, s) in col.into_iter().enumerate() {
                    out[a * nc + b] = s;
                }
            }
            out
        })
    }

    /// Membership mask of the subgroup generated by `gens`.
    pub fn subgroup_mask(&self, gens: &[u32]) -> Vec<bool> {
        let mut mask = vec![false; self.len()];
        mask[self.identity as usize] = true;
        let mut queue = vec![self.identity];
        let mut head = 0;
        while head < queue.len() {
            let x = queue[head];
            head += 1;
            for &s in gens {
                let y = self.mul(x, s);
                if !mask[y as usize] {
                    mask[y as usize] = true;
                    queue.push(y);
                }
            }
        }
        mask
    }

    /// The commutator subgroup, as a membership mask: the normal closure of
    /// the commutators of the generators.
    pub fn derived_subgroup(&self) -> Vec<bool> {
        let mut ngens: Vec<u32> = Vec::new();
        for &s in &self.generators {
            for &t in &self.generators {
                let c = self.mul(self.mul(s, t), self.inv(self.mul(t, s)));
                if c != self.identity {
                    ngens.push(c);
                }
            }
        }
        loop {
            let mask = self.subgroup_mask(&ngens);
            let mut grew = false;
            let snapshot = ngens.clone();
            for &g in &self.generators {
                for &x in &snapshot {
                    let c = self.conj(x, g);
                    if !mask[c as usize] && !ngens.contains(&c) {
                        ngens.push(c);
                        grew = true;
                    }
                }
            }
            if !grew {
                return mask;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(s: &str) -> GroupTable {
        GroupTable::enumerate(&s.parse().unwrap(), DEFAULT_CAP).unwrap()
    }

    #[test]
    fn orders_match_formulas() {
        assert_eq!(table("SL(2,5)").len(), 120);
        assert_eq!(table("A(5)").len(), 60);
        assert_eq!(table("SL(3,2)").len(), 168);
    }

    #[test]
    fn cap_is_enforced() {
        let d: GroupDescriptor = "O+(8,2)".parse().unwrap();
        assert!(matches!(
            GroupTable::enumerate(&d, DEFAULT_CAP),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn closed_under_products_and_inverses() {
        let t = table("SL(2,5)");
        for i in 0..t.len() as u32 {
            assert_eq!(t.mul(i, t.inv(i)), t.identity());
            assert_eq!(t.mul(t.identity(), i), i);
        }
        let m = t.matrix(17).unwrap();
        assert_eq!(t.index_of_matrix(&m), Some(17));
    }

    #[test]
    fn class_equation() {
        for s in ["SL(2,5)", "A(5)", "A(6)"] {
            let t = table(s);
            let total: u64 = (0..t.num_classes()).map(|c| t.class_size(c)).sum();
            assert_eq!(total as usize, t.len());
            assert!(t.class_size(t.class_of(t.identity())) == 1);
        }
        assert_eq!(table("A(5)").num_classes(), 5);
        assert_eq!(table("SL(2,5)").num_classes(), 9);
    }

    #[test]
    fn class_products_contain_elementwise_products() {
        let t = table("A(5)");
        for x in 0..t.len() as u32 {
            for &y in &[3u32, 11, 40] {
                let z = t.mul(x, y);
                assert!(t.class_product(t.class_of(x), t.class_of(y)).contains(t.class_of(z)));
            }
        }
    }

    #[test]
    fn perfect_groups_equal_their_derived_subgroup() {
        let t = table("A(5)");
        assert!(t.derived_subgroup().iter().all(|&b| b));
    }
}
