//! k-uniform set families over `[n]`.
//!
//! A [`KSet`] is a single `u64` with bit `i - 1` standing for element `i`, so
//! the ground set is capped at 64 elements. Families keep their members sorted
//! by the numeric value of that bit pattern; two families are equal exactly
//! when their member lists are.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::binom::binom;
use crate::error::{Error, Result};

/// Largest ground set a [`KSet`] can represent.
pub const MAX_N: u32 = 64;

/// Upper limit on how many k-sets we are willing to enumerate when a
/// constructor needs the whole of `C([n], k)`.
pub const ENUMERATION_GUARD: u128 = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct GroundParams {
    pub n: u32,
    pub k: u32,
}

impl GroundParams {
    pub fn new(n: u32, k: u32) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::InvalidParams {
                n,
                k,
                reason: "need 1 <= k <= n".into(),
            });
        }
        if n > MAX_N {
            return Err(Error::InvalidParams {
                n,
                k,
                reason: format!("n is capped at {MAX_N}"),
            });
        }
        Ok(GroundParams { n, k })
    }

    /// Spectral and removal computations need `n > 2k`.
    pub fn require_spectral(&self) -> Result<()> {
        if self.n > 2 * self.k {
            Ok(())
        } else {
            Err(Error::InvalidParams {
                n: self.n,
                k: self.k,
                reason: "this operation needs n > 2k".into(),
            })
        }
    }

    /// Kneser graph operations need `n >= 2k`.
    pub fn require_graph(&self) -> Result<()> {
        if self.n >= 2 * self.k {
            Ok(())
        } else {
            Err(Error::InvalidParams {
                n: self.n,
                k: self.k,
                reason: "Kneser graph operations need n >= 2k".into(),
            })
        }
    }

    /// `C(n, k)`.
    pub fn universe_size(&self) -> u128 {
        binom(self.n as u64, self.k as u64)
    }

    /// Size of a star, `C(n-1, k-1)`.
    pub fn star_size(&self) -> u128 {
        binom(self.n as u64 - 1, self.k as u64 - 1)
    }

    /// Number of star members disjoint from a fixed set outside the star,
    /// `C(n-k-1, k-1)`.
    pub fn star_cross_degree(&self) -> u128 {
        crate::binom::binom_i(self.n as i64 - self.k as i64 - 1, self.k as i64 - 1)
    }

    /// Kneser degree `C(n-k, k)`.
    pub fn kneser_degree(&self) -> u128 {
        crate::binom::binom_i(self.n as i64 - self.k as i64, self.k as i64)
    }

    /// Bit mask covering `[n]`.
    pub fn ground_mask(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    /// Every k-subset of `[n]` in canonical order.
    pub fn all_ksets(&self) -> Result<Vec<KSet>> {
        let total = self.universe_size();
        if total > ENUMERATION_GUARD {
            return Err(Error::GuardExceeded {
                what: format!("enumerating C([{}],{})", self.n, self.k),
                size: total,
                limit: ENUMERATION_GUARD,
            });
        }
        Ok(KSetIter::new(*self).collect())
    }
}

impl fmt::Display for GroundParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} k={}", self.n, self.k)
    }
}

/// A subset of `[n]` stored as a bit pattern; element `i` is bit `i - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KSet(pub u64);

impl KSet {
    pub fn from_elements(params: GroundParams, elements: &[u32]) -> Result<Self> {
        let mut bits = 0u64;
        for &e in elements {
            if e == 0 || e > params.n {
                return Err(Error::ElementOutOfRange {
                    element: e,
                    n: params.n,
                });
            }
            bits |= 1u64 << (e - 1);
        }
        let set = KSet(bits);
        if set.len() != params.k {
            return Err(Error::WrongUniformity {
                set: set.to_string(),
                k: params.k,
            });
        }
        Ok(set)
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn contains(self, element: u32) -> bool {
        (1..=64).contains(&element) && self.0 >> (element - 1) & 1 == 1
    }

    #[inline]
    pub fn is_disjoint(self, other: KSet) -> bool {
        self.0 & other.0 == 0
    }

    /// Whether the set meets any element of `mask`.
    #[inline]
    pub fn meets(self, mask: u64) -> bool {
        self.0 & mask != 0
    }

    /// Elements in increasing order, 1-based.
    pub fn elements(self) -> impl Iterator<Item = u32> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let tz = bits.trailing_zeros();
                bits &= bits - 1;
                Some(tz + 1)
            }
        })
    }
}

impl fmt::Display for KSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for e in self.elements() {
            if !first {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
            first = false;
        }
        Ok(())
    }
}

/// Bit mask for a set of 1-based elements.
pub fn element_mask(elements: &[u32]) -> u64 {
    elements.iter().fold(0u64, |m, &e| m | 1u64 << (e - 1))
}

/// Iterates `C([n], k)` in increasing numeric order (Gosper's hack).
pub struct KSetIter {
    next: Option<u128>,
    limit: u128,
}

impl KSetIter {
    pub fn new(params: GroundParams) -> Self {
        KSetIter {
            next: Some((1u128 << params.k) - 1),
            limit: 1u128 << params.n,
        }
    }
}

impl Iterator for KSetIter {
    type Item = KSet;

    fn next(&mut self) -> Option<KSet> {
        let x = self.next?;
        if x >= self.limit {
            self.next = None;
            return None;
        }
        let c = x & x.wrapping_neg();
        let r = x + c;
        self.next = Some((((r ^ x) >> 2) / c) | r);
        Some(KSet(x as u64))
    }
}

/// A canonical k-uniform family.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SetFamily {
    params: GroundParams,
    members: Vec<KSet>,
}

impl Serialize for SetFamily {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("SetFamily", 3)?;
        st.serialize_field("n", &self.params.n)?;
        st.serialize_field("k", &self.params.k)?;
        let sets: Vec<String> = self.members.iter().map(KSet::to_string).collect();
        st.serialize_field("members", &sets)?;
        st.end()
    }
}

impl SetFamily {
    /// Builds a family from arbitrary sets, validating uniformity, range and
    /// distinctness.
    pub fn from_sets(params: GroundParams, mut sets: Vec<KSet>) -> Result<Self> {
        let mask = params.ground_mask();
        for s in &sets {
            if s.0 & !mask != 0 {
                let bad = 64 - (s.0 & !mask).leading_zeros();
                return Err(Error::ElementOutOfRange {
                    element: bad,
                    n: params.n,
                });
            }
            if s.len() != params.k {
                return Err(Error::WrongUniformity {
                    set: s.to_string(),
                    k: params.k,
                });
            }
        }
        sets.sort_unstable();
        if let Some(w) = sets.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateSet(w[0].to_string()));
        }
        Ok(SetFamily {
            params,
            members: sets,
        })
    }

    /// Builds from members already known to be valid, sorting and
    /// deduplicating.
    pub(crate) fn from_valid(params: GroundParams, mut sets: Vec<KSet>) -> Self {
        sets.sort_unstable();
        sets.dedup();
        SetFamily {
            params,
            members: sets,
        }
    }

    pub fn empty(params: GroundParams) -> Self {
        SetFamily {
            params,
            members: Vec::new(),
        }
    }

    pub fn full(params: GroundParams) -> Result<Self> {
        Ok(SetFamily {
            params,
            members: params.all_ksets()?,
        })
    }

    /// Star with the given centre.
    pub fn star(params: GroundParams, centre: u32) -> Result<Self> {
        Self::union_of_stars(params, &[centre])
    }

    /// `G_S`: all k-sets meeting `centres`.
    pub fn union_of_stars(params: GroundParams, centres: &[u32]) -> Result<Self> {
        check_elements(params, centres)?;
        let mask = element_mask(centres);
        Ok(Self::filtered(params, |s| s.meets(mask)))
    }

    /// All k-sets avoiding `element`, i.e. `C([n] \ {element}, k)`.
    pub fn antistar(params: GroundParams, element: u32) -> Result<Self> {
        check_elements(params, &[element])?;
        let mask = element_mask(&[element]);
        Ok(Self::filtered(params, |s| !s.meets(mask)))
    }

    fn filtered(params: GroundParams, keep: impl Fn(KSet) -> bool) -> Self {
        SetFamily {
            params,
            members: KSetIter::new(params).filter(|&s| keep(s)).collect(),
        }
    }

    /// Complement within `C([n], k)`.
    pub fn complement(&self) -> Result<Self> {
        let total = self.params.universe_size();
        if total > ENUMERATION_GUARD {
            return Err(Error::GuardExceeded {
                what: "family complement".into(),
                size: total,
                limit: ENUMERATION_GUARD,
            });
        }
        let mut mine = self.members.iter().peekable();
        let members = KSetIter::new(self.params)
            .filter(|s| {
                while let Some(&&m) = mine.peek() {
                    if m < *s {
                        mine.next();
                    } else {
                        break;
                    }
                }
                mine.peek().is_none_or(|&&m| m != *s)
            })
            .collect();
        Ok(SetFamily {
            params: self.params,
            members,
        })
    }

    /// `m` distinct k-sets drawn uniformly by a seeded shuffle of `C([n], k)`.
    pub fn random(params: GroundParams, m: u128, seed: u64) -> Result<Self> {
        let total = params.universe_size();
        if m > total {
            return Err(Error::TooManySets {
                requested: m,
                available: total,
            });
        }
        let mut all = params.all_ksets()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (picked, _) = all.partial_shuffle(&mut rng, m as usize);
        let picked = picked.to_vec();
        Ok(Self::from_valid(params, picked))
    }

    pub fn params(&self) -> GroundParams {
        self.params
    }

    pub fn members(&self) -> &[KSet] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = KSet> + '_ {
        self.members.iter().copied()
    }

    pub fn contains(&self, set: KSet) -> bool {
        self.members.binary_search(&set).is_ok()
    }

    /// Family with `add` inserted and `remove` deleted. Sets already present
    /// (or already absent) are ignored.
    pub fn edited(&self, add: &[KSet], remove: &[KSet]) -> Result<Self> {
        let mut sets: Vec<KSet> = self
            .members
            .iter()
            .copied()
            .filter(|s| !remove.contains(s))
            .collect();
        sets.extend(add.iter().copied().filter(|s| !self.contains(*s)));
        sets.sort_unstable();
        sets.dedup();
        Self::from_sets(self.params, sets)
    }

    /// Number of members meeting `mask`.
    pub fn count_meeting(&self, mask: u64) -> u64 {
        self.members.iter().filter(|s| s.meets(mask)).count() as u64
    }

    /// Parses the plain-text family format: a required `n=<n> k=<k>` header,
    /// then one comma-separated set per line; `#` lines and blank lines are
    /// skipped.
    pub fn parse_text(text: &str, origin: &Path) -> Result<Self> {
        let err = |line: usize, reason: String| Error::Parse {
            path: origin.to_path_buf(),
            line,
            reason,
        };
        let mut params: Option<GroundParams> = None;
        let mut sets = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match params {
                None => params = Some(parse_header(line).map_err(|r| err(line_no, r))?),
                Some(p) => {
                    let elements = line
                        .split(',')
                        .map(|t| t.trim().parse::<u32>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|e| err(line_no, format!("bad element: {e}")))?;
                    let mut distinct = elements.clone();
                    distinct.sort_unstable();
                    distinct.dedup();
                    if distinct.len() != elements.len() {
                        return Err(err(line_no, "repeated element inside a set".into()));
                    }
                    sets.push(KSet::from_elements(p, &elements)?);
                }
            }
        }
        let params = params.ok_or_else(|| err(0, "missing `n=<n> k=<k>` header".into()))?;
        SetFamily::from_sets(params, sets)
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_text(&text, path)
    }

    /// Inverse of [`SetFamily::parse_text`].
    pub fn to_text(&self) -> String {
        let mut out = format!("n={} k={}\n", self.params.n, self.params.k);
        for s in &self.members {
            out.push_str(&s.to_string());
            out.push('\n');
        }
        out
    }
}

fn parse_header(line: &str) -> std::result::Result<GroundParams, String> {
    let mut n = None;
    let mut k = None;
    for tok in line.split_whitespace() {
        if let Some(v) = tok.strip_prefix("n=") {
            n = Some(v.parse::<u32>().map_err(|e| format!("bad n: {e}"))?);
        } else if let Some(v) = tok.strip_prefix("k=") {
            k = Some(v.parse::<u32>().map_err(|e| format!("bad k: {e}"))?);
        } else {
            return Err(format!("expected header `n=<n> k=<k>`, got {line:?}"));
        }
    }
    match (n, k) {
        (Some(n), Some(k)) => GroundParams::new(n, k).map_err(|e| e.to_string()),
        _ => Err(format!("expected header `n=<n> k=<k>`, got {line:?}")),
    }
}

fn check_elements(params: GroundParams, elements: &[u32]) -> Result<()> {
    for &e in elements {
        if e == 0 || e > params.n {
            return Err(Error::ElementOutOfRange {
                element: e,
                n: params.n,
            });
        }
    }
    Ok(())
}

/// Textual family description accepted by the CLI and by [`build_family`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilySpec {
    Star(u32),
    Union(Vec<u32>),
    AntiStar(u32),
    ComplementOf(Box<FamilySpec>),
    Random { m: u128, seed: u64 },
    File(PathBuf),
    Full,
    Empty,
}

impl FromStr for FamilySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: &str| Error::BadSpec {
            spec: s.to_string(),
            reason: reason.to_string(),
        };
        let s_trim = s.trim();
        let (head, rest) = match s_trim.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (s_trim, None),
        };
        let int = |t: &str| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| bad("expected an element"))
        };
        match (head, rest) {
            ("star", Some(r)) => Ok(FamilySpec::Star(int(r)?)),
            ("antistar", Some(r)) => Ok(FamilySpec::AntiStar(int(r)?)),
            ("union", Some(r)) => {
                let r = r.trim();
                if r.is_empty() {
                    return Ok(FamilySpec::Union(Vec::new()));
                }
                let mut centres = r.split(',').map(int).collect::<Result<Vec<_>>>()?;
                centres.sort_unstable();
                centres.dedup();
                Ok(FamilySpec::Union(centres))
            }
            ("complement-of", Some(r)) => Ok(FamilySpec::ComplementOf(Box::new(r.parse()?))),
            ("random", Some(r)) => {
                let (m, seed) = r
                    .split_once(':')
                    .ok_or_else(|| bad("use random:<m>:<seed>"))?;
                let m = m.trim().parse::<u128>().map_err(|_| bad("bad count"))?;
                let seed = seed.trim().parse::<u64>().map_err(|_| bad("bad seed"))?;
                Ok(FamilySpec::Random { m, seed })
            }
            ("file", Some(r)) => Ok(FamilySpec::File(PathBuf::from(r))),
            ("full", None) => Ok(FamilySpec::Full),
            ("empty", None) => Ok(FamilySpec::Empty),
            _ => Err(bad(
                "expected star:<i>, union:<i,..>, antistar:<i>, complement-of:<spec>, \
                 random:<m>:<seed>, file:<path>, full or empty",
            )),
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::Star(i) => write!(f, "star:{i}"),
            FamilySpec::AntiStar(i) => write!(f, "antistar:{i}"),
            FamilySpec::Union(c) => {
                let parts: Vec<String> = c.iter().map(u32::to_string).collect();
                write!(f, "union:{}", parts.join(","))
            }
            FamilySpec::ComplementOf(inner) => write!(f, "complement-of:{inner}"),
            FamilySpec::Random { m, seed } => write!(f, "random:{m}:{seed}"),
            FamilySpec::File(p) => write!(f, "file:{}", p.display()),
            FamilySpec::Full => f.write_str("full"),
            FamilySpec::Empty => f.write_str("empty"),
        }
    }
}

/// Realizes a [`FamilySpec`]. File input must declare the same `(n, k)`.
pub fn build_family(params: GroundParams, spec: &FamilySpec) -> Result<SetFamily> {
    match spec {
        FamilySpec::Star(i) => SetFamily::star(params, *i),
        FamilySpec::Union(c) => SetFamily::union_of_stars(params, c),
        FamilySpec::AntiStar(i) => SetFamily::antistar(params, *i),
        FamilySpec::ComplementOf(inner) => build_family(params, inner)?.complement(),
        FamilySpec::Random { m, seed } => SetFamily::random(params, *m, *seed),
        FamilySpec::Full => SetFamily::full(params),
        FamilySpec::Empty => Ok(SetFamily::empty(params)),
        FamilySpec::File(path) => {
            let fam = SetFamily::read_file(path)?;
            if fam.params() != params {
                return Err(Error::ParamMismatch {
                    left: fam.params().to_string(),
                    right: params.to_string(),
                });
            }
            Ok(fam)
        }
    }
}

/// Number of unordered disjoint pairs, by a pairwise word-AND scan.
pub fn disjoint_pairs(family: &SetFamily) -> u64 {
    let m = family.members();
    let mut count = 0u64;
    for (i, a) in m.iter().enumerate() {
        count += m[i + 1..].iter().filter(|b| a.0 & b.0 == 0).count() as u64;
    }
    count
}

/// `|F Δ G|` by merging the two sorted member lists.
pub fn sym_diff_size(f: &SetFamily, g: &SetFamily) -> Result<u64> {
    if f.params() != g.params() {
        return Err(Error::ParamMismatch {
            left: f.params().to_string(),
            right: g.params().to_string(),
        });
    }
    let (a, b) = (f.members(), g.members());
    let (mut i, mut j, mut common) = (0, 0, 0u64);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    Ok(a.len() as u64 + b.len() as u64 - 2 * common)
}

/// `d_i`, the number of members containing `i`, for `i = 1..=n`.
pub fn degree_profile(family: &SetFamily) -> Vec<u64> {
    let n = family.params().n as usize;
    let mut d = vec![0u64; n];
    for s in family.iter() {
        for e in s.elements() {
            d[e as usize - 1] += 1;
        }
    }
    d
}

/// Size and disjoint-pair statistics in the `(ℓ, α, β)` parametrization:
/// `|F| = (ℓ - α)·C(n-1,k-1)` and
/// `dp(F) = (C(ℓ,2) + β)·C(n-1,k-1)·C(n-k-1,k-1)`, held as exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyStats {
    pub params: GroundParams,
    pub ell: u32,
    pub size: u64,
    pub dp: u64,
    pub alpha: BigRational,
    pub beta: BigRational,
}

impl FamilyStats {
    /// `|F|` recovered from `(ℓ, α)`.
    pub fn size_from_alpha(&self) -> BigRational {
        (BigRational::from_integer(self.ell.into()) - &self.alpha)
            * BigRational::from_integer(BigInt::from(self.params.star_size()))
    }

    /// `dp(F)` recovered from `(ℓ, β)`.
    pub fn dp_from_beta(&self) -> BigRational {
        let ell = BigInt::from(self.ell);
        let pairs = &ell * (&ell - 1) / 2;
        (BigRational::from_integer(pairs) + &self.beta)
            * BigRational::from_integer(
                BigInt::from(self.params.star_size())
                    * BigInt::from(self.params.star_cross_degree()),
            )
    }

    /// `max(2ℓ|α|, |β|)`.
    pub fn deviation(&self) -> BigRational {
        let two_ell = BigRational::from_integer(BigInt::from(2 * self.ell));
        let a = two_ell * self.alpha.abs();
        let b = self.beta.abs();
        if a > b {
            a
        } else {
            b
        }
    }

    /// `(n - 2k) / ((20C)² n)` for the given constant.
    pub fn regime_threshold(&self, c_const: f64) -> BigRational {
        let n = self.params.n as i64;
        let k = self.params.k as i64;
        let c = BigRational::from_float(c_const).unwrap_or_else(BigRational::zero);
        let twenty_c = BigRational::from_integer(20.into()) * c;
        BigRational::from_integer((n - 2 * k).into())
            / (&twenty_c * &twenty_c * BigRational::from_integer(n.into()))
    }

    /// Whether `max(2ℓ|α|, |β|) <= (n - 2k) / ((20C)² n)`.
    pub fn within_removal_regime(&self, c_const: f64) -> bool {
        c_const > 0.0 && self.deviation() <= self.regime_threshold(c_const)
    }

    /// `(2ℓ - 1)α + 2β`, the quantity both the spectral bound and the removal
    /// bound scale with.
    pub fn excess(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(2 * self.ell as i64 - 1)) * &self.alpha
            + BigRational::from_integer(2.into()) * &self.beta
    }
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

impl Serialize for FamilyStats {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("FamilyStats", 8)?;
        st.serialize_field("ell", &self.ell)?;
        st.serialize_field("size", &self.size)?;
        st.serialize_field("dp", &self.dp)?;
        st.serialize_field("alpha", &rational_to_f64(&self.alpha))?;
        st.serialize_field("beta", &rational_to_f64(&self.beta))?;
        st.serialize_field("alpha_exact", &self.alpha.to_string())?;
        st.serialize_field("beta_exact", &self.beta.to_string())?;
        st.end()
    }
}

/// Computes [`FamilyStats`] for the given `ℓ`. Needs `n > 2k` so that
/// `C(n-k-1, k-1)` is positive.
pub fn family_stats(family: &SetFamily, ell: u32) -> Result<FamilyStats> {
    let params = family.params();
    params.require_spectral()?;
    if ell == 0 {
        return Err(Error::domain("ℓ must be a positive integer"));
    }
    let size = family.len() as u64;
    let dp = disjoint_pairs(family);
    let star = BigInt::from(params.star_size());
    let cross = BigInt::from(params.star_cross_degree());
    let ell_big = BigInt::from(ell);
    let alpha = BigRational::from_integer(ell_big.clone())
        - BigRational::new(BigInt::from(size), star.clone());
    let pairs = &ell_big * (&ell_big - 1) / 2;
    let beta = BigRational::new(BigInt::from(dp), star * cross) - BigRational::from_integer(pairs);
    Ok(FamilyStats {
        params,
        ell,
        size,
        dp,
        alpha,
        beta,
    })
}
