//! Electron configurations: spin-orbitals, Madelung ordering, candidate
//! occupation sets and the minimal-energy choice among them.

use crate::error::{Error, Result};
use crate::scf0::{self, PairTable, ZerothOrderSolution};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

const L_LETTERS: &[u8] = b"spdfghik";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    /// `2 m_s`.
    pub fn twice_ms(self) -> i32 {
        match self {
            Spin::Up => 1,
            Spin::Down => -1,
        }
    }

    pub fn flip(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }
}

/// Hydrogen-like spin-orbital `n l m m_s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Orbital {
    pub n: u32,
    pub l: u32,
    pub m: i32,
    pub spin: Spin,
}

impl Orbital {
    pub fn new(n: u32, l: u32, m: i32, spin: Spin) -> Result<Self> {
        if n == 0 || l >= n || m.unsigned_abs() > l {
            return Err(Error::domain(format!("invalid orbital n={n} l={l} m={m}")));
        }
        Ok(Orbital { n, l, m, spin })
    }

    pub fn subshell(&self) -> Subshell {
        Subshell { n: self.n, l: self.l }
    }

    /// Unit-charge orbital energy `-1/(2n^2)`.
    pub fn energy(&self) -> f64 {
        -0.5 / f64::from(self.n * self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Subshell {
    pub n: u32,
    pub l: u32,
}

impl Subshell {
    pub fn capacity(&self) -> usize {
        2 * (2 * self.l as usize + 1)
    }

    /// Spin-orbitals in canonical order (m ascending, Up before Down).
    pub fn spin_orbitals(&self) -> Vec<Orbital> {
        let l = self.l as i32;
        (-l..=l)
            .flat_map(|m| {
                [Spin::Up, Spin::Down].map(|spin| Orbital {
                    n: self.n,
                    l: self.l,
                    m,
                    spin,
                })
            })
            .collect()
    }

    fn madelung_key(&self) -> (u32, u32) {
        (self.n + self.l, self.n)
    }
}

impl fmt::Display for Subshell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.n, L_LETTERS[self.l as usize] as char)
    }
}

/// An occupation set of spin-orbitals for nuclear charge `z`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Configuration {
    z: u32,
    orbitals: Vec<Orbital>,
}

impl Configuration {
    pub fn new(z: u32, mut orbitals: Vec<Orbital>) -> Result<Self> {
        if z == 0 {
            return Err(Error::domain("nuclear charge must be positive"));
        }
        if orbitals.is_empty() {
            return Err(Error::domain("configuration has no electrons"));
        }
        for o in &orbitals {
            Orbital::new(o.n, o.l, o.m, o.spin)?;
        }
        orbitals.sort();
        if orbitals.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::domain("spin-orbital occupied twice"));
        }
        Ok(Configuration { z, orbitals })
    }

    pub fn z(&self) -> u32 {
        self.z
    }

    pub fn n_electrons(&self) -> usize {
        self.orbitals.len()
    }

    pub fn orbitals(&self) -> &[Orbital] {
        &self.orbitals
    }

    pub fn contains(&self, o: &Orbital) -> bool {
        self.orbitals.binary_search(o).is_ok()
    }

    /// Electron count per subshell, ordered by (n, l).
    pub fn occupancy(&self) -> BTreeMap<Subshell, usize> {
        let mut occ = BTreeMap::new();
        for o in &self.orbitals {
            *occ.entry(o.subshell()).or_insert(0) += 1;
        }
        occ
    }

    pub fn total_twice_ms(&self) -> i32 {
        self.orbitals.iter().map(|o| o.spin.twice_ms()).sum()
    }

    /// Closed subshells only (every partial subshell would make the density
    /// anisotropic or spin-polarised).
    pub fn is_closed_shell(&self) -> bool {
        self.occupancy().iter().all(|(s, &c)| c == s.capacity())
    }

    /// The density is spherical when each subshell has either full or empty
    /// m-shells summed over spin, or is an s shell.
    pub fn is_spherical(&self) -> bool {
        self.occupancy().iter().all(|(s, &c)| {
            if s.l == 0 || c == s.capacity() {
                return true;
            }
            let l = s.l as i32;
            let per_m: Vec<usize> = (-l..=l)
                .map(|m| self.orbitals.iter().filter(|o| o.subshell() == *s && o.m == m).count())
                .collect();
            per_m.iter().all(|&k| k == per_m[0])
        })
    }

    /// Standard spectroscopic string, e.g. `1s2 2s2 2p6 3s1`, in Madelung order.
    pub fn spectroscopic(&self) -> String {
        format_occupancy(&self.occupancy())
    }
}

pub fn format_occupancy(occ: &BTreeMap<Subshell, usize>) -> String {
    let mut shells: Vec<(&Subshell, &usize)> = occ.iter().filter(|(_, &c)| c > 0).collect();
    shells.sort_by_key(|(s, _)| s.madelung_key());
    shells
        .iter()
        .map(|(s, c)| format!("{s}{c}"))
        .collect::<Vec<_>>()
        .join(" ")
}

const ELEMENT_SYMBOLS: [&str; 118] = [
    "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne", "Na", "Mg", "Al", "Si", "P", "S", "Cl", "Ar", "K", "Ca",
    "Sc", "Ti", "V", "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As", "Se", "Br", "Kr", "Rb", "Sr", "Y",
    "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd", "In", "Sn", "Sb", "Te", "I", "Xe", "Cs", "Ba", "La", "Ce",
    "Pr", "Nd", "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf", "Ta", "W", "Re", "Os", "Ir",
    "Pt", "Au", "Hg", "Tl", "Pb", "Bi", "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U", "Np", "Pu", "Am", "Cm",
    "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh", "Hs", "Mt", "Ds", "Rg", "Cn", "Nh", "Fl", "Mc",
    "Lv", "Ts", "Og",
];

pub fn element_symbol(z: u32) -> Option<&'static str> {
    ELEMENT_SYMBOLS.get((z as usize).checked_sub(1)?).copied()
}

/// Like [`format_occupancy`] but with the largest complete noble-gas core
/// written as `[Ar]`.
pub fn format_with_core(occ: &BTreeMap<Subshell, usize>) -> String {
    for &(sym, count) in NOBLE_GASES.iter().rev() {
        let Ok(core) = madelung_filling(count as usize) else { continue };
        if core.iter().all(|(s, c)| occ.get(s) == Some(c)) {
            let rest: BTreeMap<Subshell, usize> = occ.iter().filter(|(s, _)| !core.contains_key(s)).map(|(s, c)| (*s, *c)).collect();
            return if rest.is_empty() { format!("[{sym}]") } else { format!("[{sym}] {}", format_occupancy(&rest)) };
        }
    }
    format_occupancy(occ)
}

const NOBLE_GASES: &[(&str, u32)] = &[
    ("He", 2),
    ("Ne", 10),
    ("Ar", 18),
    ("Kr", 36),
    ("Xe", 54),
    ("Rn", 86),
];

/// Parse `1s2 2s2 2p6 3s1` or `[Ar] 4s1 3d5` into subshell occupancies.
pub fn parse_occupancy(text: &str) -> Result<BTreeMap<Subshell, usize>> {
    let mut occ = BTreeMap::new();
    let mut rest = text.trim();
    if let Some(stripped) = rest.strip_prefix('[') {
        let end = stripped
            .find(']')
            .ok_or_else(|| Error::domain("unterminated noble-gas core"))?;
        let core = &stripped[..end];
        let count = NOBLE_GASES
            .iter()
            .find(|(sym, _)| *sym == core)
            .map(|(_, c)| *c)
            .ok_or_else(|| Error::domain(format!("unknown core [{core}]")))?;
        occ = madelung_filling(count as usize)?;
        rest = &stripped[end + 1..];
    }
    for token in rest.split_whitespace() {
        let bytes = token.as_bytes();
        let letter_pos = bytes
            .iter()
            .position(|b| b.is_ascii_alphabetic())
            .ok_or_else(|| Error::domain(format!("bad subshell token {token:?}")))?;
        let n: u32 = token[..letter_pos]
            .parse()
            .map_err(|_| Error::domain(format!("bad principal number in {token:?}")))?;
        let l = L_LETTERS
            .iter()
            .position(|&c| c == bytes[letter_pos].to_ascii_lowercase())
            .ok_or_else(|| Error::domain(format!("bad orbital letter in {token:?}")))?
            as u32;
        let count_str = &token[letter_pos + 1..];
        let count: usize = if count_str.is_empty() {
            1
        } else {
            count_str
                .parse()
                .map_err(|_| Error::domain(format!("bad occupation in {token:?}")))?
        };
        let s = Subshell { n, l };
        if n == 0 || l >= n {
            return Err(Error::domain(format!("invalid subshell {token:?}")));
        }
        let slot = occ.entry(s).or_insert(0);
        *slot += count;
        if *slot > s.capacity() {
            return Err(Error::domain(format!("subshell {s} over capacity")));
        }
    }
    occ.retain(|_, c| *c > 0);
    if occ.is_empty() {
        return Err(Error::domain("empty configuration string"));
    }
    Ok(occ)
}

/// Subshells in Madelung (n+l, then n) order, enough for 120 electrons.
pub fn aufbau_shell_order() -> Vec<Subshell> {
    let mut shells: Vec<Subshell> = (1..=8u32)
        .flat_map(|n| (0..n.min(5)).map(move |l| Subshell { n, l }))
        .collect();
    shells.sort_by_key(|s| s.madelung_key());
    shells.truncate(20);
    shells
}

fn madelung_filling(n_electrons: usize) -> Result<BTreeMap<Subshell, usize>> {
    let mut left = n_electrons;
    let mut occ = BTreeMap::new();
    for s in aufbau_shell_order() {
        if left == 0 {
            break;
        }
        let take = left.min(s.capacity());
        occ.insert(s, take);
        left -= take;
    }
    if left > 0 {
        return Err(Error::domain(format!(
            "{n_electrons} electrons exceed the enumerated subshells"
        )));
    }
    Ok(occ)
}

/// Madelung filling plus every filling reached by moving up to `window`
/// electrons between frontier subshells (the last two occupied subshells and
/// the next two in Madelung order, together with any partially filled one).
pub fn candidate_occupancies(n_electrons: usize, window: usize) -> Result<Vec<BTreeMap<Subshell, usize>>> {
    if n_electrons == 0 {
        return Err(Error::domain("need at least one electron"));
    }
    let base = madelung_filling(n_electrons)?;
    let order = aufbau_shell_order();
    let last = order
        .iter()
        .rposition(|s| base.get(s).copied().unwrap_or(0) > 0)
        .unwrap_or(0);
    let lo = last.saturating_sub(2);
    let hi = (last + 2).min(order.len() - 1);
    let frontier: Vec<Subshell> = order[lo..=hi].to_vec();

    let mut out = vec![base.clone()];
    let mut frontier_sets = vec![base];
    for _ in 0..window {
        let mut next = Vec::new();
        for occ in &frontier_sets {
            for from in &frontier {
                let have = occ.get(from).copied().unwrap_or(0);
                if have == 0 {
                    continue;
                }
                for to in &frontier {
                    if to == from || occ.get(to).copied().unwrap_or(0) >= to.capacity() {
                        continue;
                    }
                    let mut moved = occ.clone();
                    *moved.get_mut(from).unwrap() -= 1;
                    *moved.entry(*to).or_insert(0) += 1;
                    moved.retain(|_, c| *c > 0);
                    if !out.contains(&moved) {
                        out.push(moved.clone());
                        next.push(moved);
                    }
                }
            }
        }
        frontier_sets = next;
    }
    Ok(out)
}

fn choose(items: &[Orbital], k: usize) -> Vec<Vec<Orbital>> {
    fn rec(items: &[Orbital], k: usize, start: usize, cur: &mut Vec<Orbital>, out: &mut Vec<Vec<Orbital>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(items, k, 0, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Every (m, m_s) assignment realising the given subshell occupancy.
pub fn assignments(z: u32, occ: &BTreeMap<Subshell, usize>) -> Result<Vec<Configuration>> {
    let mut partial: Vec<Vec<Orbital>> = vec![Vec::new()];
    for (s, &count) in occ {
        let choices = choose(&s.spin_orbitals(), count);
        partial = partial
            .iter()
            .flat_map(|p| {
                choices.iter().map(move |c| {
                    let mut v = p.clone();
                    v.extend_from_slice(c);
                    v
                })
            })
            .collect();
    }
    partial.into_iter().map(|o| Configuration::new(z, o)).collect()
}

/// All candidate configurations for `n_electrons` around charge `z`.
pub fn candidate_configurations(z: u32, n_electrons: usize, window: usize) -> Result<Vec<Configuration>> {
    let mut out = Vec::new();
    for occ in candidate_occupancies(n_electrons, window)? {
        out.extend(assignments(z, &occ)?);
    }
    Ok(out)
}

/// Ordering used to pick among energetically tied configurations: larger
/// `|sum m_s|` first, then the lexicographically smallest orbital list.
pub fn tie_break(a: &Configuration, b: &Configuration) -> std::cmp::Ordering {
    b.total_twice_ms()
        .abs()
        .cmp(&a.total_twice_ms().abs())
        .then_with(|| a.orbitals.cmp(&b.orbitals))
}

const TIE_TOL: f64 = 1e-11;

/// Minimal-energy (m, m_s) assignment for a fixed subshell occupancy.
///
/// Closed subshells interact isotropically with every open orbital, so only
/// pair energies among open-subshell orbitals decide the assignment.
pub fn best_assignment(z: u32, occ: &BTreeMap<Subshell, usize>, table: &PairTable) -> Result<Configuration> {
    let mut closed: Vec<Orbital> = Vec::new();
    let mut open: Vec<(Subshell, usize)> = Vec::new();
    for (s, &c) in occ {
        if c == s.capacity() {
            closed.extend(s.spin_orbitals());
        } else if c > 0 {
            open.push((*s, c));
        }
    }
    let open_orbitals: Vec<Orbital> = open.iter().flat_map(|(s, _)| s.spin_orbitals()).collect();
    let n_open = open_orbitals.len();
    let mut pair = vec![0.0; n_open * n_open];
    for i in 0..n_open {
        for j in (i + 1)..n_open {
            let e = table.pair_energy(&open_orbitals[i], &open_orbitals[j])?;
            pair[i * n_open + j] = e;
            pair[j * n_open + i] = e;
        }
    }
    // Enumerate per-subshell index combinations.
    let mut offset = 0;
    let mut per_shell: Vec<Vec<Vec<usize>>> = Vec::new();
    for (s, c) in &open {
        let idx: Vec<usize> = (offset..offset + s.capacity()).collect();
        offset += s.capacity();
        per_shell.push(choose_idx(&idx, *c));
    }
    let mut best: Option<(f64, Configuration)> = None;
    let mut cursor = vec![0usize; per_shell.len()];
    loop {
        let chosen: Vec<usize> = per_shell
            .iter()
            .zip(&cursor)
            .flat_map(|(opts, &i)| opts[i].iter().copied())
            .collect();
        let mut e = 0.0;
        for (a, &i) in chosen.iter().enumerate() {
            for &j in &chosen[a + 1..] {
                e += pair[i * n_open + j];
            }
        }
        let improves = match &best {
            None => true,
            Some((be, bc)) => {
                let tol = TIE_TOL * be.abs().max(1.0);
                e < be - tol || ((e - be).abs() <= tol && {
                    let mut orbs = closed.clone();
                    orbs.extend(chosen.iter().map(|&i| open_orbitals[i]));
                    tie_break(&Configuration::new(z, orbs)?, bc).is_lt()
                })
            }
        };
        if improves {
            let mut orbs = closed.clone();
            orbs.extend(chosen.iter().map(|&i| open_orbitals[i]));
            best = Some((e, Configuration::new(z, orbs)?));
        }
        // advance mixed-radix cursor
        let mut k = 0;
        loop {
            if k == cursor.len() {
                return best
                    .map(|(_, c)| c)
                    .ok_or_else(|| Error::domain("no assignment"));
            }
            cursor[k] += 1;
            if cursor[k] < per_shell[k].len() {
                break;
            }
            cursor[k] = 0;
            k += 1;
        }
    }
}

fn choose_idx(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let orbs: Vec<Orbital> = items
        .iter()
        .map(|&i| Orbital {
            n: 1,
            l: 0,
            m: i as i32,
            spin: Spin::Up,
        })
        .collect();
    choose(&orbs, k)
        .into_iter()
        .map(|v| v.into_iter().map(|o| o.m as usize).collect())
        .collect()
}

/// Configuration for an explicit occupancy string with the minimal-energy
/// magnetic assignment.
pub fn configuration_from_string(z: u32, text: &str) -> Result<Configuration> {
    let occ = parse_occupancy(text)?;
    let table = PairTable::global();
    best_assignment(z, &occ, table)
}

/// Ground-state subshell occupations of the neutral atoms Z = 1..100 that
/// differ from Madelung filling.
const ANOMALOUS_GROUND_STATES: &[(u32, &str)] = &[
    (24, "[Ar] 4s1 3d5"),
    (29, "[Ar] 4s1 3d10"),
    (41, "[Kr] 5s1 4d4"),
    (42, "[Kr] 5s1 4d5"),
    (44, "[Kr] 5s1 4d7"),
    (45, "[Kr] 5s1 4d8"),
    (46, "[Kr] 4d10"),
    (47, "[Kr] 5s1 4d10"),
    (57, "[Xe] 6s2 5d1"),
    (58, "[Xe] 6s2 4f1 5d1"),
    (64, "[Xe] 6s2 4f7 5d1"),
    (78, "[Xe] 6s1 4f14 5d9"),
    (79, "[Xe] 6s1 4f14 5d10"),
    (89, "[Rn] 7s2 6d1"),
    (90, "[Rn] 7s2 6d2"),
    (91, "[Rn] 7s2 5f2 6d1"),
    (92, "[Rn] 7s2 5f3 6d1"),
    (93, "[Rn] 7s2 5f4 6d1"),
    (96, "[Rn] 7s2 5f7 6d1"),
    (97, "[Rn] 7s2 5f8 6d1"),
];

/// Standard ground-state occupation for `n_electrons` electrons: the
/// neutral-atom configuration of the isoelectronic element, Madelung filling
/// otherwise.
pub fn standard_occupancy(n_electrons: usize) -> Result<BTreeMap<Subshell, usize>> {
    match ANOMALOUS_GROUND_STATES
        .iter()
        .find(|(z, _)| *z as usize == n_electrons)
    {
        Some((_, text)) => parse_occupancy(text),
        None => madelung_filling(n_electrons),
    }
}

/// Ground configuration: the standard occupation with the minimal-energy
/// magnetic assignment inside its open subshells.
pub fn select_ground_configuration(z: u32, n_electrons: usize) -> Result<(Configuration, ZerothOrderSolution)> {
    if z == 0 {
        return Err(Error::domain("nuclear charge must be positive"));
    }
    if n_electrons == 0 {
        return Err(Error::domain("need at least one electron"));
    }
    let occ = standard_occupancy(n_electrons)?;
    let cfg = best_assignment(z, &occ, PairTable::global())?;
    let sol = scf0::solve_zeroth_order(&cfg)?;
    Ok((cfg, sol))
}

/// Candidate with the lowest zeroth-order energy among
/// [`candidate_occupancies`] for the given window.
///
/// Note that this unconstrained minimum often promotes electrons into empty
/// higher shells and so differs from [`select_ground_configuration`].
pub fn minimize_configuration(
    z: u32,
    n_electrons: usize,
    window: usize,
) -> Result<(Configuration, ZerothOrderSolution)> {
    if z == 0 {
        return Err(Error::domain("nuclear charge must be positive"));
    }
    let table = PairTable::global();
    let occs = candidate_occupancies(n_electrons, window)?;
    let evaluate = |occ: &BTreeMap<Subshell, usize>| -> Result<(Configuration, ZerothOrderSolution)> {
        let cfg = best_assignment(z, occ, table)?;
        let sol = scf0::solve_zeroth_order(&cfg)?;
        Ok((cfg, sol))
    };
    #[cfg(feature = "parallel")]
    let results: Vec<Result<(Configuration, ZerothOrderSolution)>> = {
        use rayon::prelude::*;
        occs.par_iter().map(evaluate).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Result<(Configuration, ZerothOrderSolution)>> = occs.iter().map(evaluate).collect();

    let mut best: Option<(Configuration, ZerothOrderSolution)> = None;
    for r in results {
        let (cfg, sol) = r?;
        best = match best {
            None => Some((cfg, sol)),
            Some((bc, bs)) => {
                let tol = TIE_TOL * bs.e0.abs().max(1.0);
                if sol.e0 < bs.e0 - tol || ((sol.e0 - bs.e0).abs() <= tol && tie_break(&cfg, &bc).is_lt()) {
                    Some((cfg, sol))
                } else {
                    Some((bc, bs))
                }
            }
        };
    }
    best.ok_or_else(|| Error::domain("no candidate configurations"))
}
