use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::games::{EnumerableGame, IndexedGame, NonlocalGame};
use crate::{Error, Result};

/// A Bell functional: a real tensor M^{ab}_{xy} stored row-major in
/// (x, y, a, b) order. For a game-derived functional the input distribution
/// pi(x, y) is kept alongside so the shifted form can be built.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BellFunctional {
    pub n_x: usize,
    pub n_y: usize,
    pub k_a: usize,
    pub k_b: usize,
    /// Row-major entries in (x, y, a, b) order.
    pub entries: Vec<f64>,
    /// pi(x, y) row-major, present for game-derived functionals.
    pub input_dist: Option<Vec<f64>>,
}

impl BellFunctional {
    pub fn new(n_x: usize, n_y: usize, k_a: usize, k_b: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n_x * n_y * k_a * k_b {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries, got {}",
                n_x * n_y * k_a * k_b,
                entries.len()
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("functional entries must be finite".into()));
        }
        Ok(BellFunctional {
            n_x,
            n_y,
            k_a,
            k_b,
            entries,
            input_dist: None,
        })
    }

    #[inline]
    pub fn idx(&self, x: usize, y: usize, a: usize, b: usize) -> usize {
        ((x * self.n_y + y) * self.k_a + a) * self.k_b + b
    }

    pub fn get(&self, x: usize, y: usize, a: usize, b: usize) -> f64 {
        self.entries[self.idx(x, y, a, b)]
    }

    fn same_shape(&self, other_dims: (usize, usize, usize, usize)) -> bool {
        (self.n_x, self.n_y, self.k_a, self.k_b) == other_dims
    }
}

/// A behavior P(ab|xy): one conditional distribution over (a, b) per input
/// pair, stored with the same row-major layout as [`BellFunctional`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StrategyBehavior {
    pub n_x: usize,
    pub n_y: usize,
    pub k_a: usize,
    pub k_b: usize,
    pub probs: Vec<f64>,
}

impl StrategyBehavior {
    pub fn new(n_x: usize, n_y: usize, k_a: usize, k_b: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != n_x * n_y * k_a * k_b {
            return Err(Error::DimensionMismatch(format!(
                "expected {} probabilities, got {}",
                n_x * n_y * k_a * k_b,
                probs.len()
            )));
        }
        if probs.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::InvalidParameter("behavior probabilities must be nonnegative".into()));
        }
        for x in 0..n_x {
            for y in 0..n_y {
                let base = (x * n_y + y) * k_a * k_b;
                let row: f64 = probs[base..base + k_a * k_b].iter().sum();
                if (row - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidParameter(format!(
                        "behavior rows must sum to 1; row (x={x}, y={y}) sums to {row}"
                    )));
                }
            }
        }
        Ok(StrategyBehavior {
            n_x,
            n_y,
            k_a,
            k_b,
            probs,
        })
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, a: usize, b: usize) -> f64 {
        self.probs[((x * self.n_y + y) * self.k_a + a) * self.k_b + b]
    }
}

/// <M, P> = sum over (x, y, a, b) of M^{ab}_{xy} P(ab|xy).
pub fn functional_value(m: &BellFunctional, p: &StrategyBehavior) -> Result<f64> {
    if !m.same_shape((p.n_x, p.n_y, p.k_a, p.k_b)) {
        return Err(Error::DimensionMismatch(format!(
            "functional {:?} vs behavior {:?}",
            (m.n_x, m.n_y, m.k_a, m.k_b),
            (p.n_x, p.n_y, p.k_a, p.k_b)
        )));
    }
    Ok(m.entries.iter().zip(&p.probs).map(|(a, b)| a * b).sum())
}

/// The functional of a game: M^{ab}_{xy} = pi(x,y) * Pr_aux[accept | x,y,a,b],
/// so <M, P> is exactly the winning probability of behavior P.
pub fn game_to_functional<G: EnumerableGame>(ig: &IndexedGame<G>) -> Result<BellFunctional> {
    let (n_x, n_y, k_a, k_b) = (ig.n_x(), ig.n_y(), ig.k_a(), ig.k_b());
    let mut entries = vec![0.0f64; n_x * n_y * k_a * k_b];
    let mut input_dist = vec![0.0f64; n_x * n_y];
    for (ei, e) in ig.entries().iter().enumerate() {
        input_dist[e.x * n_y + e.y] += e.p;
        for a in 0..k_a {
            for b in 0..k_b {
                entries[((e.x * n_y + e.y) * k_a + a) * k_b + b] += e.p * ig.win(ei, a, b);
            }
        }
    }
    let mut m = BellFunctional::new(n_x, n_y, k_a, k_b, entries)?;
    m.input_dist = Some(input_dist);
    Ok(m)
}

/// Behavior of a deterministic strategy given as per-input output positions.
pub fn behavior_of_tabular(
    ig_dims: (usize, usize, usize, usize),
    alice: &[usize],
    bob: &[usize],
) -> Result<StrategyBehavior> {
    let (n_x, n_y, k_a, k_b) = ig_dims;
    if alice.len() != n_x || bob.len() != n_y {
        return Err(Error::DimensionMismatch(
            "strategy tables do not match the input sets".into(),
        ));
    }
    let mut probs = vec![0.0f64; n_x * n_y * k_a * k_b];
    for x in 0..n_x {
        for y in 0..n_y {
            probs[((x * n_y + y) * k_a + alice[x]) * k_b + bob[y]] = 1.0;
        }
    }
    StrategyBehavior::new(n_x, n_y, k_a, k_b, probs)
}

/// The behavior of players answering uniformly at random.
pub fn uniform_behavior(n_x: usize, n_y: usize, k_a: usize, k_b: usize) -> StrategyBehavior {
    let p = 1.0 / (k_a * k_b) as f64;
    StrategyBehavior::new(n_x, n_y, k_a, k_b, vec![p; n_x * n_y * k_a * k_b])
        .expect("uniform rows sum to one")
}

/// A random behavior (each row an independent normalized positive vector).
pub fn random_behavior(
    n_x: usize,
    n_y: usize,
    k_a: usize,
    k_b: usize,
    rng: &mut ChaCha8Rng,
) -> StrategyBehavior {
    let mut probs = vec![0.0f64; n_x * n_y * k_a * k_b];
    for row in probs.chunks_mut(k_a * k_b) {
        let mut total = 0.0;
        for v in row.iter_mut() {
            *v = rng.gen_range(1e-6..1.0);
            total += *v;
        }
        let mut acc = 0.0;
        for v in row.iter_mut().skip(1) {
            *v /= total;
            acc += *v;
        }
        row[0] = 1.0 - acc; // exact row sum for the 1e-12 validator
    }
    StrategyBehavior::new(n_x, n_y, k_a, k_b, probs).expect("rows normalized")
}

/// M' with <M', P> = <M, P> - 1/2 for every behavior P, obtained by
/// subtracting half the input-pair probability from each entry.
pub fn shift_functional(m: &BellFunctional) -> Result<BellFunctional> {
    let pi = m.input_dist.as_ref().ok_or_else(|| {
        Error::MissingEnumerator("shift requires a game-derived functional with known pi".into())
    })?;
    let mut out = m.clone();
    for x in 0..m.n_x {
        for y in 0..m.n_y {
            let shift = pi[x * m.n_y + y] * 0.5;
            for a in 0..m.k_a {
                for b in 0..m.k_b {
                    let i = m.idx(x, y, a, b);
                    out.entries[i] -= shift;
                }
            }
        }
    }
    Ok(out)
}

/// The affine map sending <M, P> to the win probability of the converted
/// game: value = scale * <M, P> + offset.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct AffineMap {
    pub scale: f64,
    pub offset: f64,
}

impl AffineMap {
    pub fn apply(&self, functional_value: f64) -> f64 {
        self.scale * functional_value + self.offset
    }

    pub fn invert(&self, game_value: f64) -> f64 {
        (game_value - self.offset) / self.scale
    }
}

/// A game built from an arbitrary functional: uniform inputs and a
/// randomized predicate whose acceptance probability is the rescaled entry.
#[derive(Clone, Debug)]
pub struct FunctionalGame {
    n_x: usize,
    n_y: usize,
    k_a: usize,
    k_b: usize,
    /// Acceptance probabilities in [0, 1], same layout as the functional.
    win: Vec<f64>,
}

impl FunctionalGame {
    pub fn dims(&self) -> (usize, usize, usize, usize) {
        (self.n_x, self.n_y, self.k_a, self.k_b)
    }
}

impl NonlocalGame for FunctionalGame {
    type AliceIn = usize;
    type BobIn = usize;
    type AliceOut = usize;
    type BobOut = usize;
    type Aux = ();

    fn name(&self) -> String {
        format!("functional({}x{}x{}x{})", self.n_x, self.n_y, self.k_a, self.k_b)
    }

    fn sample_round(&self, rng: &mut ChaCha8Rng) -> (usize, usize, ()) {
        (rng.gen_range(0..self.n_x), rng.gen_range(0..self.n_y), ())
    }

    fn win_prob(&self, x: &usize, y: &usize, _aux: &(), a: &usize, b: &usize) -> Result<f64> {
        if *a >= self.k_a || *b >= self.k_b {
            return Err(Error::InvalidOutput(format!(
                "output ({a}, {b}) outside ({}, {})",
                self.k_a, self.k_b
            )));
        }
        Ok(self.win[((x * self.n_y + y) * self.k_a + a) * self.k_b + b])
    }
}

impl EnumerableGame for FunctionalGame {
    fn alice_inputs(&self) -> Vec<usize> {
        (0..self.n_x).collect()
    }

    fn bob_inputs(&self) -> Vec<usize> {
        (0..self.n_y).collect()
    }

    fn alice_outputs(&self, _x: &usize) -> Vec<usize> {
        (0..self.k_a).collect()
    }

    fn bob_outputs(&self, _y: &usize) -> Vec<usize> {
        (0..self.k_b).collect()
    }

    fn rounds(&self) -> Result<Vec<(usize, usize, (), f64)>> {
        let p = 1.0 / (self.n_x * self.n_y) as f64;
        let mut out = Vec::with_capacity(self.n_x * self.n_y);
        for x in 0..self.n_x {
            for y in 0..self.n_y {
                out.push((x, y, (), p));
            }
        }
        Ok(out)
    }
}

/// Converts a functional to a game plus the affine map relating <M, P> to
/// the game's winning probability. Entries are rescaled so [min M, max M]
/// maps onto [0, 1] (maximal spread); an all-constant M has no such map.
pub fn functional_to_game(m: &BellFunctional) -> Result<(FunctionalGame, AffineMap)> {
    let lo = m.entries.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = m.entries.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(hi - lo).is_finite() || hi - lo == 0.0 {
        return Err(Error::DegenerateFunctional);
    }
    let s = 1.0 / (hi - lo);
    let t = -lo / (hi - lo);
    let win: Vec<f64> = m.entries.iter().map(|&v| (v - lo) * s).collect();
    let game = FunctionalGame {
        n_x: m.n_x,
        n_y: m.n_y,
        k_a: m.k_a,
        k_b: m.k_b,
        win,
    };
    // value(P) = (1 / (n_x n_y)) sum_{xyab} (s M + t) P = s/(n_x n_y) <M,P> + t.
    let map = AffineMap {
        scale: s / (m.n_x * m.n_y) as f64,
        offset: t,
    };
    Ok((game, map))
}
