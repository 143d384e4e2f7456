use super::BlockMap;
use crate::error::{Error, Result};
use crate::error::Budget;
use crate::shift_core::{determinize, higher_block, Edge, Presentation};

/// Rewrites a code on an SFT as a 1-block code on a higher block presentation.
/// Returns the new presentation, the 1-block code and the conjugacy pair
/// (into the higher block shift, back to the original).
pub fn recode_one_block(x: &Presentation, c: &BlockMap) -> Result<(Presentation, BlockMap, BlockMap, BlockMap)> {
    check_source(x, c)?;
    if c.is_one_block() {
        let id = BlockMap::identity(x.alphabet());
        return Ok((x.clone(), c.clone(), id.clone(), id));
    }
    let (xk, enc, dec) = higher_block(x, c.width())?;
    let words: Vec<_> = (0..xk.alphabet().len() as u32)
        .map(|s| enc.table().iter().find(|(_, &v)| v == s).map(|(w, _)| w.clone()).expect("symbol has a word"))
        .collect();
    let mut table = std::collections::HashMap::new();
    for (s, w) in words.iter().enumerate() {
        let out = c
            .lookup(w)
            .ok_or_else(|| Error::UndefinedWindow(x.alphabet().render(w)))?;
        table.insert(vec![s as u32], out);
    }
    let one = BlockMap::new(xk.alphabet().clone(), c.target().clone(), 0, 0, table)?;
    Ok((xk, one, enc, dec))
}

fn check_source(x: &Presentation, c: &BlockMap) -> Result<()> {
    if x.alphabet() != c.source() {
        return Err(Error::AlphabetMismatch(format!("{:?} vs {:?}", x.alphabet(), c.source())));
    }
    Ok(())
}

pub(crate) fn require_one_block(x: &Presentation, c: &BlockMap) -> Result<()> {
    check_source(x, c)?;
    if !c.is_one_block() {
        return Err(Error::InvalidInput("a 1-block code is required; recode first".into()));
    }
    for a in x.alphabet().symbols() {
        if x.edges_labeled(a).next().is_some() && c.symbol(a).is_none() {
            return Err(Error::UndefinedWindow(x.alphabet().name(a).to_string()));
        }
    }
    Ok(())
}

/// Presentation of the image of a 1-block code: relabel every edge.
pub fn image(x: &Presentation, c: &BlockMap) -> Result<Presentation> {
    require_one_block(x, c)?;
    x.relabel(c.target().clone(), |a| c.symbol(a).expect("checked total"))
}

/// Preimage of the subshift presented by `w` inside `x`, labeled by `x`'s symbols.
pub fn preimage_sft(x: &Presentation, c: &BlockMap, w: &Presentation, budget: &Budget) -> Result<Presentation> {
    require_one_block(x, c)?;
    if w.alphabet() != c.target() {
        return Err(Error::AlphabetMismatch(format!("{:?} vs {:?}", w.alphabet(), c.target())));
    }
    let w = if w.sft_flag() { w.clone() } else { determinize(w, budget)? };
    let m = w.vertex_count();
    let mut edges = Vec::new();
    for e in x.edges() {
        let img = c.symbol(e.label).expect("checked total");
        for f in w.edges_labeled(img) {
            edges.push(Edge {
                from: e.from * m + f.from,
                to: e.to * m + f.to,
                label: e.label,
            });
        }
    }
    let names = (0..x.vertex_count() * m)
        .map(|i| format!("({},{})", x.vertex_names()[i / m], w.vertex_names()[i % m]))
        .collect();
    Presentation::new(x.alphabet().clone(), names, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::tests::{even_labeling, ti_channel};
    use crate::shift_core::fixtures::*;
    use crate::shift_core::{language_blocks, language_included, Alphabet, Word};

    #[test]
    fn recode_xor_to_one_block() {
        let a = Alphabet::digits(2);
        let windows: Vec<Word> = vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]];
        let xor = BlockMap::tabulate(&a, &a, 0, 1, &windows, |w| w[0] ^ w[1]).unwrap();
        let x = Presentation::full_shift(2);
        let (x2, one, enc, _) = recode_one_block(&x, &xor).unwrap();
        assert!(one.is_one_block());
        let b = Budget::default();
        for w in language_blocks(&x, 8, &b).unwrap() {
            assert_eq!(one.apply(&enc.apply(&w).unwrap()).unwrap(), xor.apply(&w).unwrap());
        }
        assert_eq!(x2.alphabet().len(), 4);
        let (_, same, _, _) = recode_one_block(&x, &BlockMap::identity(&a)).unwrap();
        assert!(same.is_one_block());
    }

    #[test]
    fn three_window_code_on_golden_mean() {
        let gm = golden_mean();
        let b = Budget::default();
        let windows = language_blocks(&gm, 3, &b).unwrap();
        let c = BlockMap::tabulate(gm.alphabet(), gm.alphabet(), 1, 1, &windows, |w| w[0] | w[2]).unwrap();
        let (x3, one, enc, _) = recode_one_block(&gm, &c).unwrap();
        assert_eq!(x3.alphabet().len(), 5);
        for w in language_blocks(&gm, 9, &b).unwrap() {
            assert_eq!(one.apply(&enc.apply(&w).unwrap()).unwrap(), c.apply(&w).unwrap());
        }
    }

    #[test]
    fn images() {
        let b = Budget::default();
        let (x, pi) = even_labeling();
        let img = image(&x, &pi).unwrap();
        for n in 0..=10 {
            assert_eq!(language_blocks(&img, n, &b).unwrap(), language_blocks(&even_shift(), n, &b).unwrap());
        }
        let (x, pi) = ti_channel();
        let img = image(&x, &pi).unwrap();
        let full = Presentation::full_shift_over(pi.target().clone());
        assert!(language_included(&full, &img, &b).unwrap());
    }

    #[test]
    fn preimages() {
        let b = Budget::default();
        let (x, pi) = ti_channel();
        let full = Presentation::full_shift_over(pi.target().clone());
        let all = preimage_sft(&x, &pi, &full, &b).unwrap();
        assert!(language_included(&all, &x, &b).unwrap() && language_included(&x, &all, &b).unwrap());
        let a_only = Presentation::from_triples(&["a", "b"], &[("s", "s", "a")]).unwrap();
        let pre = preimage_sft(&x, &pi, &a_only, &b).unwrap();
        assert_eq!(language_blocks(&pre, 3, &b).unwrap(), vec![vec![0, 0, 0]]);
        let (x, pi) = even_labeling();
        let ones = Presentation::from_triples(&["0", "1"], &[("s", "s", "1")]).unwrap();
        let pre = preimage_sft(&x, &pi, &ones, &b).unwrap();
        assert_eq!(language_blocks(&pre, 4, &b).unwrap().len(), 1);
    }
}
