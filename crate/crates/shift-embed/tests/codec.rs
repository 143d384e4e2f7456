use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shift_embed::embedder::{decode_stream, encode_stream, synthesize, EmbeddingCertificate};
use shift_embed::instances::{no_descent, ti_channel, two_fixed_points};
use shift_embed::shift_core::Presentation;
use shift_embed::{Budget, Error};

fn certificate(z: &Presentation) -> EmbeddingCertificate {
    let (x, pi) = ti_channel();
    synthesize(&x, &pi, z, &Budget::default()).unwrap()
}

/// A word of the one-transition shift with the step at a uniform position.
fn step_word(len: usize, rng: &mut impl Rng) -> Vec<u32> {
    let a = rng.gen_range(0..=len);
    (0..len).map(|i| u32::from(i >= a)).collect()
}

fn channel_image(cert: &EmbeddingCertificate, w: &[u32]) -> Vec<u32> {
    cert.pi.apply(&encode_stream(cert, w).unwrap()).unwrap()
}

#[test]
fn random_words_decode_exactly() {
    let cert = certificate(&no_descent());
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut exact = 0;
    for _ in 0..500 {
        let w = step_word(300, &mut rng);
        let y = channel_image(&cert, &w);
        match decode_stream(&cert, &y) {
            Ok(d) => {
                assert_eq!(d.word[..], w[d.offset..d.offset + d.word.len()]);
                exact += 1;
            }
            Err(e) => assert!(matches!(e, Error::SyncFailure(_)), "{e}"),
        }
    }
    assert!(exact >= 250, "only {exact} of 500 words decoded");
}

#[test]
fn a_flipped_stamp_symbol_is_caught_or_harmless() {
    let cert = certificate(&no_descent());
    let mu = cert.parameters.stamp.word.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut flipped = 0;
    for _ in 0..2000 {
        if flipped == 200 {
            break;
        }
        let w = step_word(300, &mut rng);
        let mut y = channel_image(&cert, &w);
        let starts: Vec<usize> = (0..=y.len() - mu.len()).filter(|&p| y[p..p + mu.len()] == mu[..]).collect();
        if starts.is_empty() {
            continue;
        }
        let j = starts[rng.gen_range(0..starts.len())] + rng.gen_range(0..mu.len());
        y[j] = 1 - y[j];
        flipped += 1;
        let Ok(d) = decode_stream(&cert, &y) else { continue };
        if d.word[..] != w[d.offset..d.offset + d.word.len()] {
            let again = cert.psi.apply(&d.word).and_then(|x| cert.pi.apply(&x));
            assert!(again.is_ok_and(|a| a[..] == y[d.offset..d.offset + a.len()]), "silent corruption at {j}");
        }
    }
    assert_eq!(flipped, 200);
}

#[test]
fn fixed_point_pair_streams_round_trip() {
    let cert = certificate(&two_fixed_points());
    for a in 0..2 {
        let w = vec![a; 200];
        let d = decode_stream(&cert, &channel_image(&cert, &w)).unwrap();
        assert_eq!(d.word[..], w[d.offset..d.offset + d.word.len()]);
        assert!(!d.word.is_empty());
    }
}
