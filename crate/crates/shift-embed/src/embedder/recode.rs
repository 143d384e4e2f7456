use serde::{Deserialize, Serialize};

use crate::codes::BlockMap;
use crate::error::{Budget, Error, Result};
use crate::invariants::{decide_embeddable, Mode, Verdict};
use crate::shift_core::{higher_block, markov_of, Presentation};

const MAX_ORDER: usize = 12;

/// A 1-step SFT containing a copy of the input, with the embedding into it and the
/// 1-block map back.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Recoding {
    pub presentation: Presentation,
    pub embed: BlockMap,
    pub decode: BlockMap,
    /// Markov order of the approximation; 0 when the input was used as it is.
    pub order: usize,
}

impl Recoding {
    pub fn is_identity(&self) -> bool {
        self.order == 0
    }
}

/// Replaces `z` by a 1-step SFT `Z'` containing it that still passes the embeddability
/// decision against the channel. `Z'` is the least Markov approximation that passes,
/// recoded to its higher block presentation.
pub fn wlog_recode(x: &Presentation, pi: &BlockMap, z: &Presentation, budget: &Budget) -> Result<Recoding> {
    if z.is_one_step() {
        let id = BlockMap::identity(z.alphabet());
        return Ok(Recoding { presentation: z.clone(), embed: id.clone(), decode: id, order: 0 });
    }
    for m in 2..=MAX_ORDER {
        let zm = markov_of(z, m, budget)?;
        let Some((hb, embed, decode)) = (1..=m)
            .map(|k| higher_block(&zm, k))
            .find(|r| r.as_ref().map_or(true, |(hb, _, _)| hb.is_one_step()))
            .transpose()?
        else {
            continue;
        };
        if decide_embeddable(x, pi, &hb, Mode::Practical, budget)?.verdict == Verdict::Embeddable {
            return Ok(Recoding { presentation: hb, embed, decode, order: m });
        }
    }
    Err(Error::ParameterSearchExhausted(format!("no Markov approximation of order ≤ {MAX_ORDER} passes")))
}
