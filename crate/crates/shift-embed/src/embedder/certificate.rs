use std::collections::{BTreeSet, HashMap, HashSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::channel::{connectors, ChannelRule, Connectors};
use super::conjugacy::BlanksInverse;
use super::{decode_stream, encode_stream, marker_encode, wlog_recode, BlockInjection, InjectionKind, Recoding};
use crate::codes::{check_injective, lift_word, recode_one_block, BlockMap, InjectivityReport};
use crate::combinatorics::{marker_set, MarkerSet};
use crate::constructions::{custom_w, BlanksSpec, ParameterPack};
use crate::error::{Budget, Error, Result};
use crate::invariants::{decide_embeddable, for_each_periodic_orbit, least_period, CyclicWord, Lifter, Mode, Verdict};
use crate::shift_core::{count_blocks, language_blocks, membership, random_word, Presentation, Sym, Word};

/// Necessity census depth.
pub const NECESSITY_DEPTH: usize = 6;
const CODEC_SEED: u64 = 0x5eed;
const CODEC_WORDS: usize = 50;
const CODEC_LENGTH: usize = 300;

/// `(memory, anticipation)` of each stage and of the composite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageWindows {
    pub recode: (usize, usize),
    pub marker: (usize, usize),
    pub inverse: (usize, usize),
    pub splice: (usize, usize),
    pub total: (usize, usize),
}

impl StageWindows {
    pub fn sums_match(&self) -> bool {
        let stages = [self.recode, self.marker, self.inverse, self.splice];
        stages.iter().map(|s| s.0).sum::<usize>() == self.total.0 && stages.iter().map(|s| s.1).sum::<usize>() == self.total.1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NecessityRow {
    pub n: usize,
    pub z_orbits: usize,
    /// Distinct image orbits, all of least period `n` with a lift of period `n`.
    pub image_orbits: usize,
    pub periods_kept: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BruteForceCheck {
    pub length: usize,
    pub words: usize,
    /// Pairs of distinct words with equal image and equal end windows.
    pub collisions: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodecCheck {
    pub seed: u64,
    pub words: usize,
    pub length: usize,
    /// Words whose image held too few stamps to synchronize.
    pub unsynchronized: usize,
    /// Words decoded to exactly the input on the recovered coordinates.
    pub exact: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationTranscript {
    pub injective: InjectivityReport,
    /// Consecutive outputs on every word of the input are words of the channel input.
    pub into_x: bool,
    pub brute_force: BruteForceCheck,
    pub necessity: Vec<NecessityRow>,
    pub codec: CodecCheck,
    pub windows_sum: bool,
}

impl VerificationTranscript {
    pub fn passed(&self) -> bool {
        self.injective.injective
            && self.into_x
            && self.brute_force.collisions == 0
            && self.necessity.iter().all(|r| r.periods_kept && r.image_orbits == r.z_orbits)
            && self.codec.exact > 0
            && self.codec.exact + self.codec.unsynchronized == self.codec.words
            && self.windows_sum
    }
}

/// A verified embedding ψ of `z` into `x` with `π∘ψ` injective, and every table it was
/// built from.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddingCertificate {
    pub x: Presentation,
    pub pi: BlockMap,
    pub z: Presentation,
    pub recoding: Recoding,
    pub parameters: ParameterPack,
    pub markers: MarkerSet,
    pub injections: Vec<BlockInjection>,
    /// Output data block to its lift.
    pub kappa: Vec<(Word, Word)>,
    /// Canonical output orbit to its lift, in phase.
    pub lambda: Vec<(Word, Word)>,
    pub connectors: Connectors,
    pub windows: StageWindows,
    pub psi: BlockMap,
    pub transcript: VerificationTranscript,
}

impl EmbeddingCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mut cert: EmbeddingCertificate = serde_json::from_str(text)
            .map_err(|e| Error::Malformed(format!("line {} column {}: {e}", e.line(), e.column())))?;
        cert.markers = cert.markers.reindexed();
        Ok(cert)
    }
}

fn windows_of<'a>(words: impl IntoIterator<Item = &'a Word>, code: &BlockMap, width: usize) -> Result<Vec<Word>> {
    let mut set = HashSet::new();
    for w in words {
        for win in code.apply(w)?.windows(width) {
            set.insert(win.to_vec());
        }
    }
    let mut out: Vec<Word> = set.into_iter().collect();
    out.sort();
    Ok(out)
}

fn span(c: &BlockMap) -> (usize, usize) {
    (c.memory(), c.anticipation())
}

/// Builds ψ: decision gate, recoding, parameters, markers, block and orbit tables, marker
/// code, lift through the channel, splicing of stamps, composition and verification.
pub fn synthesize(x: &Presentation, pi: &BlockMap, z: &Presentation, budget: &Budget) -> Result<EmbeddingCertificate> {
    let report = decide_embeddable(x, pi, z, Mode::Practical, budget).map_err(Error::at("decide"))?;
    if report.verdict != Verdict::Embeddable {
        return Err(Error::NotEmbeddable(format!("verdict {:?}, witness period {:?}", report.verdict, report.witness)));
    }
    if !x.is_one_step() {
        return Err(Error::InvalidInput("the channel input must be a 1-step presentation".into()));
    }
    let recoding = wlog_recode(x, pi, z, budget).map_err(Error::at("recode"))?;
    let z1 = &recoding.presentation;
    let pack = custom_w(x, pi, z1, budget).map_err(Error::at("parameters"))?;
    let (k, ell, g) = (pack.k, pack.ell, pack.gap);

    // the code table is indexed by input words of the composite window
    let fixed = (4 * k + 2 * ell) + 2 * (2 * k + 1) + 2 * ell + 1 + (recoding.embed.width() - 1);
    let table_size = |width: usize| -> Result<()> {
        let n = count_blocks(z, width, budget)?[width];
        budget.check_words(n.min(u64::MAX as u128) as u64, "code table windows")
    };
    table_size(fixed).map_err(Error::at("tabulation"))?;
    let markers = marker_set(z1, k, budget).map_err(Error::at("markers"))?;
    table_size(fixed + 2 * markers.radius).map_err(Error::at("tabulation"))?;

    let (injections, w_spec) = tables(z1, &pack, budget).map_err(Error::at("tables"))?;
    let phi = marker_encode(z1, &w_spec, &injections, &markers, budget).map_err(Error::at("marker code"))?;

    let lifter = Lifter::new(x, pi)?;
    let kappa: Vec<(Word, Word)> = w_spec.blocks.iter().map(|b| Ok((b.clone(), lift_word(x, pi, b)?))).collect::<Result<_>>()?;
    let lambda: Vec<(Word, Word)> = w_spec
        .orbits
        .iter()
        .map(|o| {
            let d = o.canonical().clone();
            let lift = lifter.least_closed_lift(&d).ok_or_else(|| Error::NoEqualPeriodPreimage(pi.target().render(&d)))?;
            Ok((d, lift))
        })
        .collect::<Result<_>>()
        .map_err(Error::at("lift"))?;
    let x_blank = x.alphabet().extend_with_blank()?;
    let inverse = BlanksInverse::new(w_spec.blank_alphabet()?, x_blank.clone(), k, kappa.clone(), lambda.clone())?;
    let r = inverse.radius();
    let words = language_blocks(z1, phi.width() + 2 * r, budget)?;
    let inv = inverse.tabulate(&windows_of(&words, &phi, 2 * r + 1)?).map_err(Error::at("blanks conjugacy"))?;
    let psi1 = inv.compose(&phi, budget)?;

    let c = connectors(x, pi, &pack.stamp, g).map_err(Error::at("connectors"))?;
    let splice = ChannelRule::new(x_blank, x.alphabet().clone(), &c);
    let s = splice.radius();
    let words = language_blocks(z1, psi1.width() + 2 * s, budget)?;
    let gamma = splice.tabulate(&windows_of(&words, &psi1, 2 * s + 1)?).map_err(Error::at("splice"))?;
    let psi2 = gamma.compose(&psi1, budget)?;
    let psi = if recoding.is_identity() { psi2 } else { psi2.compose(&recoding.embed, budget)? };

    let windows = StageWindows {
        recode: if recoding.is_identity() { (0, 0) } else { span(&recoding.embed) },
        marker: span(&phi),
        inverse: span(&inv),
        splice: span(&gamma),
        total: span(&psi),
    };
    let mut cert = EmbeddingCertificate {
        x: x.clone(),
        pi: pi.clone(),
        z: z.clone(),
        recoding,
        parameters: pack,
        markers,
        injections,
        kappa,
        lambda,
        connectors: c,
        windows,
        psi,
        transcript: VerificationTranscript {
            injective: InjectivityReport { injective: false, witness: None },
            into_x: false,
            brute_force: BruteForceCheck { length: 0, words: 0, collisions: 0 },
            necessity: Vec::new(),
            codec: CodecCheck { seed: CODEC_SEED, words: 0, length: 0, unsynchronized: 0, exact: 0 },
            windows_sum: false,
        },
    };
    let transcript = verify_certificate(&cert, budget).map_err(Error::at("verification"))?;
    cert.transcript = transcript;
    if !cert.transcript.passed() {
        return Err(Error::VerificationFailed(format!("{:?}", cert.transcript)));
    }
    Ok(cert)
}

/// Block tables for every short interval length and orbit tables for every period below
/// the marker scale, and the blanks spec over the output shift they land in.
fn tables(z1: &Presentation, pack: &ParameterPack, budget: &Budget) -> Result<(Vec<BlockInjection>, BlanksSpec)> {
    let (k, ell) = (pack.k, pack.ell);
    let w = pack.w();
    let mut injections = Vec::new();
    for n in k..=2 * k + ell {
        injections.push(BlockInjection::moderate(z1, w, n, ell, budget)?);
    }
    for p in 1..k {
        let mut ins = Vec::new();
        for_each_periodic_orbit(z1, p, budget, |c| ins.push(c.clone()))?;
        if ins.is_empty() {
            continue;
        }
        let outs = pack.orbits.get(&p).into_iter().flatten().map(|o| o.image.canonical().clone());
        injections.push(BlockInjection::periodic(p, ins, outs)?);
    }
    let blocks: BTreeSet<Word> =
        injections.iter().filter(|i| i.kind() == InjectionKind::Moderate).flat_map(|i| i.outputs().cloned()).collect();
    let orbits: BTreeSet<CyclicWord> = injections
        .iter()
        .filter(|i| i.kind() == InjectionKind::Periodic)
        .flat_map(|i| i.outputs().map(|o| CyclicWord::new(o)))
        .collect();
    let spec = BlanksSpec { alphabet: w.alphabet().clone(), blocks: blocks.into_iter().collect(), orbits: orbits.into_iter().collect(), n: k, ell };
    spec.validate(Some(w))?;
    Ok((injections, spec))
}

/// Re-runs every check from the tables stored in the certificate, drawing codec test
/// words from the recorded seed.
pub fn verify_certificate(cert: &EmbeddingCertificate, budget: &Budget) -> Result<VerificationTranscript> {
    verify_certificate_seeded(cert, budget, cert.transcript.codec.seed)
}

/// [`verify_certificate`] with codec test words drawn from `seed`.
pub fn verify_certificate_seeded(cert: &EmbeddingCertificate, budget: &Budget, seed: u64) -> Result<VerificationTranscript> {
    let (z, psi) = (&cert.z, &cert.psi);
    let width = psi.width();
    let pi_psi = cert.pi.compose(psi, budget)?;

    let (zk, one, _, _) = recode_one_block(z, &pi_psi)?;
    let injective = check_injective(&zk, &one)?;

    let into_x = language_blocks(z, width + 1, budget)?
        .iter()
        .map(|w| psi.apply(w).map(|out| membership(&cert.x, &out)))
        .collect::<Result<Vec<bool>>>()?
        .into_iter()
        .all(|ok| ok);

    let length = 2 * width + 8;
    let words = language_blocks(z, length, budget)?;
    let chunk = words.len().div_ceil(budget.threads.max(1)).max(1);
    let images: Vec<Word> = std::thread::scope(|s| {
        let parts: Vec<_> = words
            .chunks(chunk)
            .map(|part| s.spawn(|| part.iter().map(|w| pi_psi.apply(w)).collect::<Result<Vec<Word>>>()))
            .collect();
        parts.into_iter().map(|h| h.join().expect("worker finishes")).collect::<Result<Vec<Vec<Word>>>>()
    })?
    .into_iter()
    .flatten()
    .collect();
    let mut seen: HashMap<(&Word, &[Sym], &[Sym]), usize> = HashMap::new();
    for (w, img) in words.iter().zip(&images) {
        *seen.entry((img, &w[..width], &w[length - width..])).or_default() += 1;
    }
    let collisions = seen.values().map(|&c| c * (c - 1) / 2).sum();
    let brute_force = BruteForceCheck { length, words: words.len(), collisions };

    let mut necessity = Vec::new();
    for n in 1..=NECESSITY_DEPTH {
        let mut orbits = Vec::new();
        for_each_periodic_orbit(z, n, budget, |c| orbits.push(c.clone()))?;
        let mut images = BTreeSet::new();
        let mut periods_kept = true;
        for c in &orbits {
            let reps = (width + n - 1).div_ceil(n) + 1;
            let u: Word = c.iter().copied().cycle().take(reps * n).collect();
            let out = psi.apply(&u)?;
            let lift = &out[..n];
            let img = cert.pi.apply(lift)?;
            periods_kept &= least_period(&img) == n && least_period(lift) == n && membership(&cert.x, &[lift, lift].concat());
            images.insert(CyclicWord::new(&img));
        }
        necessity.push(NecessityRow { n, z_orbits: orbits.len(), image_orbits: images.len(), periods_kept });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = CODEC_LENGTH.max(3 * width);
    let (mut exact, mut unsynchronized) = (0, 0);
    for _ in 0..CODEC_WORDS {
        let w = random_word(z, len, &mut rng);
        let y = cert.pi.apply(&encode_stream(cert, &w)?)?;
        match decode_stream(cert, &y) {
            Ok(d) => exact += usize::from(w[d.offset..d.offset + d.word.len()] == d.word[..]),
            Err(Error::SyncFailure(_)) => unsynchronized += 1,
            Err(_) => {}
        }
    }
    let codec = CodecCheck { seed, words: CODEC_WORDS, length: len, unsynchronized, exact };

    Ok(VerificationTranscript { injective, into_x, brute_force, necessity, codec, windows_sum: cert.windows.sums_match() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{even_labeling, fixed_point, golden_mean, no_descent, ti_channel, two_fixed_points};
    use crate::shift_core::Alphabet;

    fn certified(z: &Presentation) -> EmbeddingCertificate {
        let b = Budget::default();
        let (x, pi) = ti_channel();
        let cert = synthesize(&x, &pi, z, &b).unwrap();
        assert!(cert.transcript.passed(), "{:?}", cert.transcript);
        assert!(cert.windows.sums_match());
        cert
    }

    #[test]
    fn single_fixed_point() {
        let z = fixed_point().relabel(Alphabet::digits(1), |_| 0).unwrap();
        let cert = certified(&z);
        assert_eq!(cert.transcript.necessity[0].z_orbits, 1);
        assert!(cert.transcript.necessity[1..].iter().all(|r| r.z_orbits == 0));
    }

    #[test]
    fn two_fixed_points_embed() {
        let cert = certified(&two_fixed_points());
        assert_eq!(cert.transcript.necessity[0].image_orbits, 2);
        assert_eq!(cert.transcript.brute_force.collisions, 0);
    }

    #[test]
    fn one_transition_shift_embeds_and_decodes() {
        let cert = certified(&no_descent());
        assert!(cert.transcript.injective.injective);
        let again = EmbeddingCertificate::from_json(&cert.to_json()).unwrap();
        assert_eq!(again.psi, cert.psi);
        assert_eq!(verify_certificate(&again, &Budget::default()).unwrap(), cert.transcript);
    }

    #[test]
    fn not_embeddable_instance_is_refused() {
        let b = Budget::default();
        let (x, pi) = even_labeling();
        let e = synthesize(&x, &pi, &two_fixed_points(), &b).unwrap_err();
        assert!(matches!(e, Error::NotEmbeddable(_)), "{e}");
    }

    #[test]
    fn golden_mean_tables_exceed_the_budget() {
        let b = Budget::default();
        let (x, pi) = ti_channel();
        let e = synthesize(&x, &pi, &golden_mean(), &b).unwrap_err();
        assert!(e.is_resource_limit(), "{e}");
        assert!(matches!(e, Error::Stage { stage: "tabulation", .. }), "{e}");
    }
}
