"""Small categorical worlds for the estimation and active-sensing runs."""

from __future__ import annotations

import numpy as np

from .inference import BeliefState, EpisodeData, ModelParams, e_step_filter, select_action
from .rng import RngStream


def chain_world(n_states: int = 2, flip_prob: float = 0.95, obs_accuracy: float = 0.98) -> ModelParams:
    """Cyclic chain: the single action advances the state with prob flip_prob;
    observations reveal the state with prob obs_accuracy."""
    x = n_states
    trans = np.zeros((x, 1, x))
    for s in range(x):
        trans[s, 0, s] = 1.0 - flip_prob
        trans[s, 0, (s + 1) % x] += flip_prob
    obs = np.full((x, x), (1.0 - obs_accuracy) / (x - 1)) if x > 1 else np.ones((1, 1))
    if x > 1:
        np.fill_diagonal(obs, obs_accuracy)
    return ModelParams(trans, obs)


def disambiguation_world(n_looks: int = 4, obs_accuracy: float = 0.99) -> ModelParams:
    """Hidden binary cause, observable only from gaze location 0.

    States are (cause, gaze) pairs, coded cause * n_looks + gaze. Action k
    moves the gaze to location k and leaves the cause unchanged. Looking
    at location 0 reveals the cause with prob obs_accuracy; every other
    location emits the uninformative "blank" observation. Observations:
    0 = saw cause A, 1 = saw cause B, 2 = blank.
    """
    x = 2 * n_looks
    trans = np.zeros((x, n_looks, x))
    for cause in range(2):
        for gaze in range(n_looks):
            s = cause * n_looks + gaze
            for k in range(n_looks):
                trans[s, k, cause * n_looks + k] = 1.0
    obs = np.zeros((x, 3))
    for cause in range(2):
        for gaze in range(n_looks):
            s = cause * n_looks + gaze
            if gaze == 0:
                obs[s, cause] = obs_accuracy
                obs[s, 1 - cause] = 1.0 - obs_accuracy
            else:
                obs[s, 2] = 1.0
    return ModelParams(trans, obs)


def disambiguation_prior(n_looks: int = 4) -> BeliefState:
    """Uniform over the cause; gaze starts at the last (cue-free) location
    so the first look is a genuine choice."""
    probs = np.zeros(2 * n_looks)
    start = n_looks - 1
    probs[start] = 0.5
    probs[n_looks + start] = 0.5
    return BeliefState(probs)


def simulate_episode(
    true_params: ModelParams,
    prior: BeliefState,
    steps: int,
    rng: RngStream,
    policy: str = "random",
    model_params: ModelParams | None = None,
) -> tuple[EpisodeData, list[float]]:
    """Roll the true world forward, tracking the agent's belief entropy.

    policy "random" draws actions uniformly; "infogain" picks the
    expected-posterior-entropy minimizer under model_params (defaults to
    the true parameters). Returns the episode and the per-step belief
    entropies after each update.
    """
    gen = rng.generator()
    model = model_params if model_params is not None else true_params
    state = int(gen.choice(true_params.n_states, p=prior.probs))
    belief = prior
    actions, observations, entropies = [], [], []
    for _ in range(steps):
        if policy == "random":
            u = int(gen.integers(true_params.n_actions))
        elif policy == "infogain":
            u = select_action(model, belief, list(range(model.n_actions)))
        else:
            raise ValueError(f"unknown policy {policy!r}")
        state = int(gen.choice(true_params.n_states, p=true_params.transition[state, u]))
        o = int(gen.choice(true_params.n_observations, p=true_params.observation[state]))
        belief = e_step_filter(model, belief, u, o)
        actions.append(u)
        observations.append(o)
        entropies.append(belief.entropy())
    return EpisodeData(tuple(actions), tuple(observations)), entropies
