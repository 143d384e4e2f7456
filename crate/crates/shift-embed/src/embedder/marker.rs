use std::collections::HashMap;

use super::{periodic_phase, BlockInjection, InjectionKind};
use crate::codes::{check_injective, recode_one_block, BlockMap};
use crate::combinatorics::MarkerSet;
use crate::constructions::BlanksSpec;
use crate::error::{Budget, Error, Result};
use crate::invariants::CyclicWord;
use crate::shift_core::{language_blocks, Presentation, Sym, Word};

/// The marker coding rule. Marker coordinates split a point into intervals of length at
/// least `k`. An interval `[a, b)` of length at most `2k + ell` becomes `ell` blanks then
/// the moderate image of `z[a, b)`. A longer interval is periodic with period below `k`
/// and becomes `ell` blanks then the periodic image of its orbit, in phase.
pub(crate) struct MarkerRule<'a> {
    markers: &'a MarkerSet,
    k: usize,
    ell: usize,
    blank: Sym,
    moderate: HashMap<&'a [Sym], &'a Word>,
    periodic: HashMap<&'a [Sym], &'a Word>,
}

impl<'a> MarkerRule<'a> {
    pub(crate) fn new(spec: &BlanksSpec, injections: &'a [BlockInjection], markers: &'a MarkerSet) -> Result<Self> {
        let (k, ell) = (spec.n, spec.ell);
        if markers.n != k {
            return Err(Error::InvalidInput(format!("marker scale {} differs from the blanks scale {k}", markers.n)));
        }
        let mut moderate = HashMap::new();
        let mut periodic = HashMap::new();
        for inj in injections {
            let dest = match inj.kind() {
                InjectionKind::Moderate => &mut moderate,
                InjectionKind::Periodic => &mut periodic,
            };
            for (a, b) in inj.pairs() {
                dest.insert(a.as_slice(), b);
            }
        }
        for n in k..=2 * k + ell {
            if !injections.iter().any(|i| i.kind() == InjectionKind::Moderate && i.n() == n) {
                return Err(Error::CountingHypothesisViolated(format!("no block table for interval length {n}")));
            }
        }
        if let Some(b) = moderate.values().find(|b| !spec.blocks.contains(b)) {
            return Err(Error::InvalidInput(format!("block {b:?} is not a data block of the blanks shift")));
        }
        if let Some(o) = periodic.values().find(|o| !spec.orbits.contains(&CyclicWord::new(o))) {
            return Err(Error::InvalidInput(format!("orbit {o:?} is not a data orbit of the blanks shift")));
        }
        Ok(MarkerRule { markers, k, ell, blank: spec.blank(), moderate, periodic })
    }

    pub(crate) fn memory(&self) -> usize {
        2 * self.k + self.ell - 1 + self.markers.radius
    }

    pub(crate) fn anticipation(&self) -> usize {
        2 * self.k + self.ell + self.markers.radius
    }

    pub(crate) fn width(&self) -> usize {
        self.memory() + self.anticipation() + 1
    }

    /// Output at the window's centre coordinate.
    pub(crate) fn eval(&self, window: &[Sym]) -> Result<Sym> {
        let (k, ell, r) = (self.k, self.ell, self.markers.radius);
        let hits = self.markers.hits(window);
        let hit = |c: usize| hits[c - r];
        let i = self.memory();
        let span = 2 * k + ell;
        match (i + 1 - span..=i).rev().find(|&c| hit(c)) {
            Some(a) if i - a < ell => Ok(self.blank),
            Some(a) => match (a + 1..=a + span).find(|&c| hit(c)) {
                Some(b) => {
                    let out = self.moderate.get(&window[a..b]).ok_or_else(|| {
                        Error::CountingHypothesisViolated(format!("no block table entry for {:?}", &window[a..b]))
                    })?;
                    Ok(out[i - a - ell])
                }
                None => self.periodic_symbol(window, a, i),
            },
            None => self.periodic_symbol(window, i - 2 * k, i),
        }
    }

    fn periodic_symbol(&self, window: &[Sym], s: usize, i: usize) -> Result<Sym> {
        let seg = &window[s..=s + 2 * self.k];
        let (c, t) = periodic_phase(seg, self.k).ok_or(Error::NotLocallyPeriodic(self.k))?;
        let out = self
            .periodic
            .get(c.as_slice())
            .ok_or_else(|| Error::CountingHypothesisViolated(format!("no orbit table entry for {c:?}")))?;
        Ok(out[(t + i - s) % c.len()])
    }

    pub(crate) fn tabulate(&self, z: &Presentation, out: &crate::shift_core::Alphabet, budget: &Budget) -> Result<BlockMap> {
        let windows = language_blocks(z, self.width(), budget)?;
        BlockMap::tabulate_fallible(z.alphabet(), out, self.memory(), self.anticipation(), &windows, |w| self.eval(w))
    }
}

/// Marker coding of `z` into the blanks shift of `spec`, checked injective.
pub fn marker_encode(
    z: &Presentation,
    spec: &BlanksSpec,
    injections: &[BlockInjection],
    markers: &MarkerSet,
    budget: &Budget,
) -> Result<BlockMap> {
    let rule = MarkerRule::new(spec, injections, markers)?;
    let phi = rule.tabulate(z, &spec.blank_alphabet()?, budget)?;
    let (zk, one, _, _) = recode_one_block(z, &phi)?;
    let report = check_injective(&zk, &one)?;
    if !report.injective {
        return Err(Error::VerificationFailed(format!("marker code is not injective: {:?}", report.witness)));
    }
    Ok(phi)
}
