"""Command-line orchestration: one subcommand per experiment.

Exit codes: 0 success, 1 runtime error, 2 usage/config error. Every
command is deterministic given --seed and writes its files atomically.
"""

from __future__ import annotations

import functools
import sys
from pathlib import Path

import click
import numpy as np

from . import plots
from .config import load_config
from .controllers import TargetPose, run_cerebellar_trials, run_reach_trial
from .errors import ConfigError, SenseloopError
from .forward_models import babble, dataset_to_jsonl, scaling_experiment
from .inference import BeliefState, ModelParams, params_to_json, run_em
from .motor_fields import ArmCommand
from .plant import Point2
from .reporting import atomic_write_text
from .rng import RngStream
from .worlds import chain_world, disambiguation_prior, disambiguation_world, simulate_episode


def _handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ConfigError as exc:
            click.echo(f"config error: {exc}", err=True)
            sys.exit(2)
        except SenseloopError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)

    return wrapper


def _common(fn):
    fn = click.option("--config", "config_path", default=None, help="JSON config file.")(fn)
    fn = click.option("--seed", type=int, default=None, help="Root seed override.")(fn)
    fn = click.option("--out", "out_path", required=True, help="Output file.")(fn)
    fn = click.option("--plot/--no-plot", default=True, help="Render a PNG next to the output.")(fn)
    return fn


def _load(config_path, seed):
    cfg = load_config(config_path)
    if seed is not None:
        cfg.raw["seed"] = seed
    return cfg


def _fig_path(out_path: str) -> Path:
    return Path(out_path).with_suffix(".png")


@click.group()
def cli():
    """Sensorimotor simulation workbench."""


@cli.command("babble")
@_common
@_handle_errors
def cmd_babble(config_path, seed, out_path, plot):
    """Scan every (arm, eye) command pair and store the rendered fields."""
    cfg = _load(config_path, seed)
    basis = cfg.basis()
    arm_cmds = [ArmCommand(((i, 1.0),)) for i in range(len(basis.primitives))]
    dataset = babble(
        basis,
        cfg.geometry(),
        arm_cmds,
        cfg.eye_fixations(),
        cfg.retina(),
        cfg.rest_posture(),
        RngStream(cfg.seed),
    )
    atomic_write_text(out_path, dataset_to_jsonl(dataset))
    click.echo(f"{len(dataset.records)} records written to {out_path}")


@cli.command("scaling")
@_common
@click.option("--resolutions", default="4,8,16,32", help="Comma-separated grid sizes.")
@click.option(
    "--displacements",
    type=click.Choice(["full", "unit"]),
    default="full",
    help="Displacement command set for the relative learner.",
)
@_handle_errors
def cmd_scaling(config_path, seed, out_path, plot, resolutions, displacements):
    """Count table entries both forward models need, fit log-log slopes."""
    _load(config_path, seed)
    try:
        res = [int(tok) for tok in resolutions.split(",") if tok.strip()]
    except ValueError:
        raise ConfigError(f"bad --resolutions value: {resolutions!r}")
    if len(res) < 3 or any(n < 4 for n in res):
        raise ConfigError("--resolutions needs >= 3 values, each >= 4")
    report = scaling_experiment(res, displacements)
    atomic_write_text(out_path, report.to_csv())
    if plot:
        plots.plot_scaling(report, _fig_path(out_path))
    click.echo(
        f"slopes: displacement {report.disp_slope:.3f}, "
        f"end-effector {report.ee_slope:.3f}, ratio {report.slope_ratio:.3f}"
    )


@cli.command("reach")
@_common
@click.option(
    "--controller",
    type=click.Choice(["ballistic", "displacement", "cerebellar"]),
    default="ballistic",
)
@click.option("--gain", type=float, default=None, help="Plant gain (muscle fatigue).")
@click.option("--tilt", type=float, default=None, help="Body tilt [rad].")
@click.option("--trials", type=int, default=10)
@click.option("--steps", type=int, default=None, help="Steps per trial (config override).")
@_handle_errors
def cmd_reach(config_path, seed, out_path, plot, controller, gain, tilt, trials, steps):
    """Reaching trials under a perturbed plant."""
    overrides = {}
    if gain is not None:
        overrides["perturbation.gain_scale"] = gain
    if tilt is not None:
        overrides["perturbation.frame_rotation"] = tilt
    cfg = load_config(config_path, overrides)
    if seed is not None:
        cfg.raw["seed"] = seed
    basis = cfg.basis()
    geometry = cfg.geometry()
    pert = cfg.perturbation()
    rc = cfg.raw["reach"]
    n_steps = steps if steps is not None else rc["steps"]
    target = TargetPose(Point2(*rc["target"]))
    stream = RngStream(cfg.seed)
    if controller == "cerebellar":
        _, errors = run_cerebellar_trials(
            target, pert, basis, geometry, cfg.rest_posture(),
            trials, n_steps, rc["dt"], stream,
            learning_rate=rc["learning_rate"],
        )
    else:
        errors = []
        for trial in range(trials):
            result = run_reach_trial(
                controller, target, pert, basis, geometry, cfg.rest_posture(),
                n_steps, rc["dt"], stream.substream(trial),
                ctrl_gain=rc["ctrl_gain"], max_step=rc["max_step"],
            )
            errors.append(result.final_error)
    lines = ["trial,controller,gain,tilt,final_error,steps"]
    for trial, err in enumerate(errors):
        lines.append(
            f"{trial},{controller},{pert.gain_scale},{pert.frame_rotation},"
            f"{err!r},{n_steps}"
        )
    atomic_write_text(out_path, "\n".join(lines) + "\n")
    if plot:
        plots.plot_reach(errors, controller, _fig_path(out_path))
    click.echo(f"{trials} trials, final error {errors[-1]:.6f} m")


@cli.command("em")
@_common
@click.option("--episodes", type=int, default=5)
@click.option("--iters", type=int, default=20)
@_handle_errors
def cmd_em(config_path, seed, out_path, plot, episodes, iters):
    """Fit transition/observation tables by EM on simulated episodes."""
    cfg = _load(config_path, seed)
    em = cfg.raw["em"]
    truth = chain_world(em["n_states"], em["flip_prob"], em["obs_accuracy"])
    x = truth.n_states
    prior = BeliefState(np.full(x, 1.0 / x))
    stream = RngStream(cfg.seed)
    data = [
        simulate_episode(truth, prior, em["episode_length"], stream.substream(i))[0]
        for i in range(episodes)
    ]
    gen = stream.substream(10_000).generator()
    trans0 = np.full((x, 1, x), 1.0 / x) + gen.uniform(0, 0.01, (x, 1, x))
    trans0 /= trans0.sum(axis=2, keepdims=True)
    obs0 = np.full((x, x), (1.0 - 0.6) / (x - 1)) if x > 1 else np.ones((1, 1))
    if x > 1:
        np.fill_diagonal(obs0, 0.6)  # diagonal bias pins the state labelling
    init = ModelParams(trans0, obs0)
    learned, trace = run_em(data, init, iters, em["alpha"], prior)
    lines = ["iter,loglik"] + [f"{i},{ll!r}" for i, ll in enumerate(trace)]
    atomic_write_text(out_path, "\n".join(lines) + "\n")
    params_path = Path(out_path).with_suffix(".params.json")
    atomic_write_text(params_path, params_to_json(learned))
    if plot:
        plots.plot_em_trace(trace, _fig_path(out_path))
    click.echo(f"final log-likelihood {trace[-1]:.3f}; params in {params_path}")


@cli.command("active")
@_common
@click.option("--policy", type=click.Choice(["infogain", "random"]), default="infogain")
@click.option("--steps", type=int, default=10)
@_handle_errors
def cmd_active(config_path, seed, out_path, plot, policy, steps):
    """Active-sensing run: per-step belief entropy under a sensing policy."""
    cfg = _load(config_path, seed)
    ac = cfg.raw["active"]
    world = disambiguation_world(ac["n_looks"], ac["obs_accuracy"])
    prior = disambiguation_prior(ac["n_looks"])
    episode, entropies = simulate_episode(
        world, prior, steps, RngStream(cfg.seed), policy=policy
    )
    lines = ["step,action,observation,entropy"]
    for t in range(steps):
        lines.append(
            f"{t},{episode.actions[t]},{episode.observations[t]},{entropies[t]!r}"
        )
    atomic_write_text(out_path, "\n".join(lines) + "\n")
    if plot:
        plots.plot_entropy(entropies, policy, _fig_path(out_path))
    click.echo(f"{steps} steps, final entropy {entropies[-1] if entropies else 0.0:.4f} nats")


def main():
    cli()


if __name__ == "__main__":
    main()
