"""Categorical hidden-state estimation: filtering, EM, active action choice.

The hidden chain is x_0 ~ prior, x_{t+1} ~ P[. | x_t, u_t], with the
observation o_t emitted from the post-transition state x_{t+1}. All
integrals of the continuous formulation become exact sums, so EM
monotonicity and smoother correctness are testable against enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IndexOutOfRange, ZeroLikelihood

_ROW_TOL = 1e-9


@dataclass(frozen=True)
class DiscreteSpec:
    n_states: int
    n_actions: int
    n_observations: int

    def __post_init__(self):
        if min(self.n_states, self.n_actions, self.n_observations) < 1:
            raise ValueError("all counts must be >= 1")


@dataclass(frozen=True)
class ModelParams:
    """transition[x, u, x'] and observation[x, o], rows normalized."""

    transition: np.ndarray  # (X, U, X)
    observation: np.ndarray  # (X, O)

    def __post_init__(self):
        t, q = np.asarray(self.transition), np.asarray(self.observation)
        if t.ndim != 3 or t.shape[0] != t.shape[2] or q.ndim != 2 or q.shape[0] != t.shape[0]:
            raise ValueError("inconsistent parameter shapes")
        if (t < 0).any() or (q < 0).any():
            raise ValueError("probabilities must be nonnegative")
        if not np.allclose(t.sum(axis=2), 1.0, atol=_ROW_TOL) or not np.allclose(
            q.sum(axis=1), 1.0, atol=_ROW_TOL
        ):
            raise ValueError("conditional rows must sum to 1")

    @property
    def n_states(self) -> int:
        return self.transition.shape[0]

    @property
    def n_actions(self) -> int:
        return self.transition.shape[1]

    @property
    def n_observations(self) -> int:
        return self.observation.shape[1]


@dataclass(frozen=True)
class BeliefState:
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs)
        if (p < 0).any() or abs(p.sum() - 1.0) > _ROW_TOL:
            raise ValueError("belief must be a distribution")

    def entropy(self) -> float:
        p = self.probs[self.probs > 0]
        return float(-(p * np.log(p)).sum())


@dataclass(frozen=True)
class EpisodeData:
    """Aligned (action, observation) pairs: o_t follows the u_t transition."""

    actions: tuple[int, ...]
    observations: tuple[int, ...]

    def __post_init__(self):
        if len(self.actions) != len(self.observations):
            raise ValueError("actions and observations must align")

    def __len__(self) -> int:
        return len(self.actions)


def _check_indices(params: ModelParams, u: int, o: int) -> None:
    if not 0 <= u < params.n_actions:
        raise IndexOutOfRange(f"action {u} out of range")
    if not 0 <= o < params.n_observations:
        raise IndexOutOfRange(f"observation {o} out of range")


def likelihood(params: ModelParams, belief: BeliefState, u: int, o: int) -> float:
    """Marginal probability of observing o after taking u from `belief`."""
    _check_indices(params, u, o)
    predictive = belief.probs @ params.transition[:, u, :]
    return float(predictive @ params.observation[:, o])


def e_step_filter(params: ModelParams, belief: BeliefState, u: int, o: int) -> BeliefState:
    """One Bayes-filter step: predict through u, condition on o."""
    _check_indices(params, u, o)
    predictive = belief.probs @ params.transition[:, u, :]
    joint = predictive * params.observation[:, o]
    z = joint.sum()
    if z <= 0:
        raise ZeroLikelihood(f"observation {o} has zero predictive probability")
    return BeliefState(joint / z)


def e_step_smooth(params: ModelParams, episode: EpisodeData, prior: BeliefState):
    """Scaled forward-backward smoothing over one episode.

    Returns (gamma, xi, log_lik): gamma[t, x] is the posterior over the
    state after the t-th transition, xi[t, x, x'] the pairwise posterior
    across that transition (x indexes the pre-transition state, with the
    prior as the state before the first transition).
    """
    if len(episode) == 0:
        raise ValueError("episode must be non-empty")
    big_t = len(episode)
    x = params.n_states
    alphas = np.zeros((big_t, x))
    scales = np.zeros(big_t)
    prev = prior.probs
    for t, (u, o) in enumerate(zip(episode.actions, episode.observations)):
        _check_indices(params, u, o)
        a = (prev @ params.transition[:, u, :]) * params.observation[:, o]
        z = a.sum()
        if z <= 0:
            raise ZeroLikelihood(f"episode has zero probability at step {t}")
        alphas[t] = a / z
        scales[t] = z
        prev = alphas[t]
    betas = np.zeros((big_t, x))
    betas[-1] = 1.0
    for t in range(big_t - 2, -1, -1):
        u, o = episode.actions[t + 1], episode.observations[t + 1]
        betas[t] = (
            params.transition[:, u, :] @ (params.observation[:, o] * betas[t + 1])
        ) / scales[t + 1]
    gamma = alphas * betas
    gamma /= gamma.sum(axis=1, keepdims=True)
    xi = np.zeros((big_t, x, x))
    for t in range(big_t):
        before = prior.probs if t == 0 else alphas[t - 1]
        u, o = episode.actions[t], episode.observations[t]
        m = (
            before[:, None]
            * params.transition[:, u, :]
            * (params.observation[:, o] * betas[t])[None, :]
        )
        xi[t] = m / m.sum()
    return gamma, xi, float(np.log(scales).sum())


@dataclass
class SufficientStats:
    """Accumulated expected counts across episodes."""

    trans_counts: np.ndarray  # (X, U, X)
    obs_counts: np.ndarray  # (X, O)

    @classmethod
    def zeros(cls, spec: DiscreteSpec) -> "SufficientStats":
        return cls(
            np.zeros((spec.n_states, spec.n_actions, spec.n_states)),
            np.zeros((spec.n_states, spec.n_observations)),
        )

    def accumulate(self, episode: EpisodeData, gamma: np.ndarray, xi: np.ndarray) -> None:
        for t, (u, o) in enumerate(zip(episode.actions, episode.observations)):
            self.trans_counts[:, u, :] += xi[t]
            self.obs_counts[:, o] += gamma[t]


def m_step(stats: SufficientStats, alpha: float) -> ModelParams:
    """Maximize expected counts with symmetric Dirichlet smoothing alpha."""
    t = stats.trans_counts + alpha
    q = stats.obs_counts + alpha
    return ModelParams(
        t / t.sum(axis=2, keepdims=True),
        q / q.sum(axis=1, keepdims=True),
    )


def run_em(
    episodes: list[EpisodeData],
    init: ModelParams,
    iters: int,
    alpha: float,
    prior: BeliefState,
) -> tuple[ModelParams, list[float]]:
    """Alternate smoothing and maximization; trace total log-likelihood.

    Each trace entry is the total smoothed log-likelihood of the episodes
    under the parameters entering that iteration.
    """
    if iters < 1:
        raise ValueError("iters must be >= 1")
    params = init
    trace = []
    spec = DiscreteSpec(init.n_states, init.n_actions, init.n_observations)
    for _ in range(iters):
        stats = SufficientStats.zeros(spec)
        total = 0.0
        for ep in episodes:
            gamma, xi, ll = e_step_smooth(params, ep, prior)
            stats.accumulate(ep, gamma, xi)
            total += ll
        trace.append(total)
        params = m_step(stats, alpha)
    return params, trace


def penalized_objective(params: ModelParams, log_lik: float, alpha: float) -> float:
    """Smoothed EM objective: log-likelihood plus the Dirichlet prior term."""
    with np.errstate(divide="ignore"):
        lt = np.log(params.transition)
        lq = np.log(params.observation)
    return log_lik + alpha * (lt[np.isfinite(lt)].sum() + lq[np.isfinite(lq)].sum())


def select_action(
    params: ModelParams, belief: BeliefState, candidates: list[int]
) -> int:
    """Pick the action minimizing expected posterior entropy.

    Ties break to the lowest action index; observations with zero
    predictive probability contribute nothing.
    """
    if not candidates:
        raise ValueError("candidates must be non-empty")
    best_u, best_epe = None, np.inf
    for u in sorted(candidates):
        epe = 0.0
        for o in range(params.n_observations):
            p = likelihood(params, belief, u, o)
            if p <= 0:
                continue
            epe += p * e_step_filter(params, belief, u, o).entropy()
        if epe < best_epe - 1e-12:
            best_u, best_epe = u, epe
    return best_u


def params_to_json(params: ModelParams) -> str:
    import json

    return json.dumps(
        {
            "transition": params.transition.tolist(),
            "observation": params.observation.tolist(),
        },
        indent=2,
    )
