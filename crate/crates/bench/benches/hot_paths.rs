use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use ibsignal_core::agents::{decoder_forward, listener_forward, speaker_forward};
use ibsignal_core::ib::{self, IbOptions};
use ibsignal_core::numerics::Tape;
use ibsignal_core::{Agents, ChannelSpec, RandomSource, Tensor};

fn tape_step(c: &mut Criterion) {
    let mut rng = RandomSource::new(1);
    let agents = Agents::new(&ChannelSpec::Vqvib { codebook_size: 20, dim: 2 }, &[64, 64], &mut rng).unwrap();
    let batch = 128;
    let rows = |rng: &mut RandomSource| {
        Tensor::matrix(batch, 3, (0..batch * 3).map(|_| rng.normal() * 0.3).collect()).unwrap()
    };
    let (x, a, b) = (rows(&mut rng), rows(&mut rng), rows(&mut rng));
    c.bench_function("tape forward+backward, batch 128", |bench| {
        bench.iter(|| {
            let mut tape = Tape::new();
            let bound = agents.bind(&mut tape);
            let xv = tape.constant(x.clone());
            let (av, bv) = (tape.constant(a.clone()), tape.constant(b.clone()));
            let spoken = speaker_forward(&agents.speaker, &bound, &mut tape, xv, &mut rng).unwrap();
            let probs = listener_forward(&bound.listener, &mut tape, spoken.c, av, bv).unwrap();
            let recon = decoder_forward(&bound.decoder, &mut tape, spoken.c).unwrap();
            let p = tape.mean(probs);
            let r = tape.mean(recon);
            let loss = tape.add(p, r).unwrap();
            tape.backward(loss).unwrap()
        })
    });
}

fn ib_round(c: &mut Criterion) {
    let chips = ibsignal_bench::chips();
    let meanings = ib::build_meanings(&chips, ib::DEFAULT_MEANING_SIGMA).unwrap();
    let n = chips.len();
    let k = ib::DEFAULT_CLUSTERS;
    let prior = vec![1.0 / n as f64; n];
    let mut rng = RandomSource::new(2);
    let q: Vec<f64> = (0..n)
        .flat_map(|_| {
            let row: Vec<f64> = (0..k).map(|_| rng.uniform_open()).collect();
            let s: f64 = row.iter().sum();
            row.into_iter().map(move |v| v / s)
        })
        .collect();
    let opts = IbOptions { max_rounds: 1, ..IbOptions::default() };
    c.bench_function("ib_iterate round, 330 chips x 40 clusters", |bench| {
        bench.iter(|| ib::ib_iterate(&prior, &meanings, 1.1, &q, opts).unwrap())
    });
}

fn naming_estimate(c: &mut Criterion) {
    let chips = ibsignal_bench::chips();
    let mut rng = RandomSource::new(3);
    let agents = Agents::new(&ChannelSpec::Vqvib { codebook_size: 20, dim: 2 }, &[64, 64], &mut rng).unwrap();
    c.bench_function("naming estimate, 330 chips x 100 samples", |bench| {
        bench.iter_batched(
            || RandomSource::new(4),
            |mut r| agents.speaker.naming_system(&chips, 100, &mut r).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, tape_step, ib_round, naming_estimate);
criterion_main!(benches);
