//! Per-device state processes: i.i.d. Bernoulli slots and the two-state
//! Markov chain with geometric alarm holding times.
//!
//! States and matrix rows are ordered `(Regular, Alarm)` throughout.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, ensure_probability, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DeviceState {
    Regular,
    Alarm,
}

impl DeviceState {
    pub fn is_alarm(self) -> bool {
        self == DeviceState::Alarm
    }
}

/// Packets per slot emitted in each state; identical for every device.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateParams {
    pub regular: f64,
    pub alarm: f64,
}

impl RateParams {
    pub fn new(regular: f64, alarm: f64) -> Result<Self> {
        ensure_non_negative("regular rate", regular)?;
        ensure_non_negative("alarm rate", alarm)?;
        Ok(Self { regular, alarm })
    }

    /// Alarm rate 1 packet/slot, regular rate 0.01 packet/slot.
    pub fn table1() -> Self {
        Self {
            regular: 0.01,
            alarm: 1.0,
        }
    }
}

/// Holding parameter `q`: the probability of staying in alarm for one more slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarkovParams {
    q: f64,
}

impl MarkovParams {
    pub fn new(q: f64) -> Result<Self> {
        ensure_probability("q", q)?;
        if q >= 1.0 {
            return Err(Error::invalid(
                "q",
                "q = 1 makes alarm absorbing; the chain is no longer ergodic and has no unique steady state (need 0 <= q < 1)",
            ));
        }
        Ok(Self { q })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Mean number of consecutive alarm slots, `1 / (1 - q)`.
    pub fn mean_holding_time(&self) -> f64 {
        1.0 / (1.0 - self.q)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSequence {
    pub states: Vec<DeviceState>,
    pub device_index: usize,
}

impl StateSequence {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn alarm_fraction(&self) -> f64 {
        self.states.iter().filter(|s| s.is_alarm()).count() as f64 / self.states.len() as f64
    }

    /// Lengths of maximal runs of consecutive alarm slots.
    pub fn alarm_runs(&self) -> Vec<usize> {
        let mut runs = Vec::new();
        let mut current = 0;
        for s in &self.states {
            if s.is_alarm() {
                current += 1;
            } else if current > 0 {
                runs.push(current);
                current = 0;
            }
        }
        if current > 0 {
            runs.push(current);
        }
        runs
    }
}

/// Row-stochastic 2×2 matrix, rows and columns ordered `(Regular, Alarm)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionMatrix(pub [[f64; 2]; 2]);

impl TransitionMatrix {
    pub fn row(&self, from: DeviceState) -> [f64; 2] {
        self.0[from as usize]
    }
}

/// Stationary distribution of the two-state chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyState {
    pub alarm: f64,
    pub regular: f64,
}

impl SteadyState {
    pub fn as_row(&self) -> [f64; 2] {
        [self.regular, self.alarm]
    }
}

fn check_slots(n_slots: usize) -> Result<()> {
    if n_slots == 0 {
        return Err(Error::invalid("n_slots", "need at least one slot"));
    }
    Ok(())
}

pub fn markov_transition_matrix(p: f64, mp: MarkovParams) -> Result<TransitionMatrix> {
    ensure_probability("p", p)?;
    let q = mp.q();
    Ok(TransitionMatrix([[1.0 - p, p], [1.0 - q, q]]))
}

/// `π_A = p / (1 + p − q)`, `π_R = (1 − q) / (1 + p − q)`.
pub fn steady_state(p: f64, mp: MarkovParams) -> Result<SteadyState> {
    ensure_probability("p", p)?;
    let q = mp.q();
    let denom = 1.0 + p - q;
    Ok(SteadyState {
        alarm: p / denom,
        regular: (1.0 - q) / denom,
    })
}

/// Alarm indicator stream for an i.i.d. Bernoulli device. `p` must already be validated.
pub(crate) fn bernoulli_alarms<'a, R: Rng + ?Sized>(p: f64, rng: &'a mut R) -> impl Iterator<Item = bool> + 'a {
    std::iter::repeat_with(move || rng.random::<f64>() < p)
}

/// Alarm indicator stream for the stationary Markov chain.
pub(crate) fn markov_alarms<'a, R: Rng + ?Sized>(p: f64, q: f64, rng: &'a mut R) -> impl Iterator<Item = bool> + 'a {
    let pi_alarm = p / (1.0 + p - q);
    let mut state: Option<bool> = None;
    std::iter::from_fn(move || {
        let u = rng.random::<f64>();
        let next = match state {
            None => u < pi_alarm,
            Some(true) => u < q,
            Some(false) => u < p,
        };
        state = Some(next);
        Some(next)
    })
}

fn to_state(alarm: bool) -> DeviceState {
    if alarm {
        DeviceState::Alarm
    } else {
        DeviceState::Regular
    }
}

pub fn sample_bernoulli_states<R: Rng + ?Sized>(
    p: f64,
    n_slots: usize,
    device_index: usize,
    rng: &mut R,
) -> Result<StateSequence> {
    ensure_probability("p", p)?;
    check_slots(n_slots)?;
    Ok(StateSequence {
        states: bernoulli_alarms(p, rng).take(n_slots).map(to_state).collect(),
        device_index,
    })
}

/// Stationary chain: the first slot is drawn from the steady state, the rest
/// follow the transition matrix.
pub fn sample_markov_states<R: Rng + ?Sized>(
    p: f64,
    mp: MarkovParams,
    n_slots: usize,
    device_index: usize,
    rng: &mut R,
) -> Result<StateSequence> {
    ensure_probability("p", p)?;
    check_slots(n_slots)?;
    Ok(StateSequence {
        states: markov_alarms(p, mp.q(), rng).take(n_slots).map(to_state).collect(),
        device_index,
    })
}

pub fn rate_of(state: DeviceState, rp: &RateParams) -> f64 {
    match state {
        DeviceState::Regular => rp.regular,
        DeviceState::Alarm => rp.alarm,
    }
}

/// Integer packet count for one slot whose expected emission is `rate`:
/// `floor(rate)` packets plus one more with probability `frac(rate)`.
pub fn packetize<R: Rng + ?Sized>(rate: f64, rng: &mut R) -> u64 {
    let whole = rate.floor();
    let extra = u64::from(rng.random::<f64>() < rate - whole);
    whole as u64 + extra
}
