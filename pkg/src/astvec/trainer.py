"""Stochastic gradient descent with momentum over sample pairs.

One running velocity buffer is kept for the whole parameter set and carried
across epochs; each step generates a fresh negative sample, folds the pair
gradient into the velocity with decay epsilon, and applies the update. All
randomness (init, shuffling, corruption) flows from a single seeded stream,
so runs are reproducible bit for bit and resumable from checkpoints.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field

import numpy as np

from .ast_core import KIND_NAMES
from .coder import Gradient, Hyperparams, ModelParams, gradient_and_hinge, init_params
from .sampling import TrainingSample, corrupt

CHECKPOINT_VERSION = 1

CONVERGENCE_REL_TOL = 1e-4
CONVERGENCE_PATIENCE = 3


class TrainingDiverged(RuntimeError):
    def __init__(self, epoch: int, sample_index: int):
        self.epoch = epoch
        self.sample_index = sample_index
        super().__init__(
            f"non-finite loss or parameter at epoch {epoch}, sample {sample_index}"
        )


class CheckpointError(ValueError):
    pass


def vocabulary_fingerprint() -> str:
    return hashlib.sha256(",".join(KIND_NAMES).encode()).hexdigest()


@dataclass
class TrainReport:
    mean_hinge: list[float] = field(default_factory=list)
    objective: list[float] = field(default_factory=list)
    epochs_run: int = 0
    wall_time: float = 0.0
    seed: int = 0


@dataclass
class TrainState:
    """Everything needed to continue training bit-identically."""

    params: ModelParams
    velocity: ModelParams
    epoch: int
    rng: np.random.Generator
    hyper: Hyperparams
    loss_history: list[float] = field(default_factory=list)


def has_converged(history: list[float]) -> bool:
    """True once relative improvement of the mean epoch loss stays at or below
    1e-4 for 3 consecutive epochs."""
    if len(history) < CONVERGENCE_PATIENCE + 1:
        return False
    for prev, cur in zip(
        history[-CONVERGENCE_PATIENCE - 1 : -1], history[-CONVERGENCE_PATIENCE:]
    ):
        if prev - cur > CONVERGENCE_REL_TOL * abs(prev):
            return False
    return True


def _zero_velocity(n_f: int, vocab_size: int) -> ModelParams:
    return ModelParams(
        embeddings=np.zeros((vocab_size, n_f)),
        w_l=np.zeros((n_f, n_f)),
        w_r=np.zeros((n_f, n_f)),
        b=np.zeros(n_f),
    )


def fresh_state(samples_unused, hyper: Hyperparams) -> TrainState:
    hyper.validate()
    rng = np.random.default_rng(hyper.seed)
    params = init_params(hyper, rng)
    velocity = _zero_velocity(hyper.n_f, params.embeddings.shape[0])
    return TrainState(params=params, velocity=velocity, epoch=0, rng=rng, hyper=hyper)


def train(
    samples: list[TrainingSample],
    hyper: Hyperparams,
    shuffle: bool = True,
    state: TrainState | None = None,
    max_epochs: int | None = None,
) -> tuple[TrainState, TrainReport]:
    """Run the momentum-SGD loop until convergence or the epoch limit.

    Passing a previously saved state resumes exactly where it left off.
    """
    if not samples:
        raise ValueError("training requires at least one sample")
    if state is None:
        state = fresh_state(samples, hyper)
    else:
        hyper = state.hyper
    limit = hyper.epochs if max_epochs is None else max_epochs

    params = state.params
    vel = state.velocity
    rng = state.rng
    eps = hyper.epsilon
    alpha = hyper.alpha
    n = len(samples)

    report = TrainReport(seed=hyper.seed)
    start = time.perf_counter()

    while state.epoch < limit and not has_converged(state.loss_history):
        order = rng.permutation(n) if shuffle else np.arange(n)
        hinge_total = 0.0
        for idx in order:
            sample = samples[idx]
            negative = corrupt(sample, rng)
            grad, hinge = gradient_and_hinge(sample, negative, params, hyper)
            hinge_total += hinge

            vel.w_l *= eps
            vel.w_l += grad.w_l
            vel.w_r *= eps
            vel.w_r += grad.w_r
            vel.b *= eps
            vel.b += grad.b
            vel.embeddings *= eps
            for sid, g_e in grad.embeddings.items():
                vel.embeddings[sid] += g_e

            params.w_l -= alpha * vel.w_l
            params.w_r -= alpha * vel.w_r
            params.b -= alpha * vel.b
            params.embeddings -= alpha * vel.embeddings

            if not np.isfinite(hinge) or not np.isfinite(params.b).all():
                raise TrainingDiverged(state.epoch, int(idx))

        mean_hinge = hinge_total / n
        finite = np.isfinite(mean_hinge) and all(
            np.isfinite(a).all()
            for a in (params.embeddings, params.w_l, params.w_r, params.b)
        )
        if not finite:
            raise TrainingDiverged(state.epoch, n - 1)
        state.epoch += 1
        state.loss_history.append(mean_hinge)
        report.mean_hinge.append(mean_hinge)
        m = 2.0 * hyper.n_f**2
        penalty = (hyper.lam / (2.0 * m)) * (
            float(np.sum(params.w_l**2)) + float(np.sum(params.w_r**2))
        )
        report.objective.append(mean_hinge / 2.0 + penalty)

    report.epochs_run = len(report.mean_hinge)
    report.wall_time = time.perf_counter() - start
    return state, report


@dataclass
class Checkpoint:
    params: ModelParams
    hyper: Hyperparams
    vocab_fingerprint: str
    epoch: int
    rng_state: dict
    velocity: ModelParams
    loss_history: list[float] = field(default_factory=list)

    @classmethod
    def from_state(cls, state: TrainState) -> "Checkpoint":
        return cls(
            params=state.params,
            hyper=state.hyper,
            vocab_fingerprint=vocabulary_fingerprint(),
            epoch=state.epoch,
            rng_state=state.rng.bit_generator.state,
            velocity=state.velocity,
            loss_history=list(state.loss_history),
        )

    def to_state(self) -> TrainState:
        if self.vocab_fingerprint != vocabulary_fingerprint():
            raise CheckpointError("vocabulary fingerprint mismatch")
        rng = np.random.default_rng()
        rng.bit_generator.state = self.rng_state
        return TrainState(
            params=self.params,
            velocity=self.velocity,
            epoch=self.epoch,
            rng=rng,
            hyper=self.hyper,
            loss_history=list(self.loss_history),
        )


def _params_to_obj(p: ModelParams) -> dict:
    return {
        "embeddings": p.embeddings.tolist(),
        "w_l": p.w_l.tolist(),
        "w_r": p.w_r.tolist(),
        "b": p.b.tolist(),
    }


def _params_from_obj(obj: dict) -> ModelParams:
    return ModelParams(
        embeddings=np.array(obj["embeddings"], dtype=np.float64),
        w_l=np.array(obj["w_l"], dtype=np.float64),
        w_r=np.array(obj["w_r"], dtype=np.float64),
        b=np.array(obj["b"], dtype=np.float64),
    )


def save_checkpoint(cp: Checkpoint, path) -> None:
    """Canonical JSON container; floats round-trip exactly via repr."""
    doc = {
        "version": CHECKPOINT_VERSION,
        "hyper": {
            "n_f": cp.hyper.n_f,
            "delta": cp.hyper.delta,
            "lam": cp.hyper.lam,
            "alpha": cp.hyper.alpha,
            "epsilon": cp.hyper.epsilon,
            "epochs": cp.hyper.epochs,
            "seed": cp.hyper.seed,
        },
        "vocab_fingerprint": cp.vocab_fingerprint,
        "epoch": cp.epoch,
        "rng_state": cp.rng_state,
        "params": _params_to_obj(cp.params),
        "velocity": _params_to_obj(cp.velocity),
        "loss_history": cp.loss_history,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_checkpoint(path) -> Checkpoint:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise CheckpointError(f"not a checkpoint file: {exc}") from exc
    if doc.get("version") != CHECKPOINT_VERSION:
        raise CheckpointError(f"unsupported checkpoint version {doc.get('version')!r}")
    if doc["vocab_fingerprint"] != vocabulary_fingerprint():
        raise CheckpointError("vocabulary fingerprint mismatch")
    h = doc["hyper"]
    hyper = Hyperparams(
        n_f=h["n_f"],
        delta=h["delta"],
        lam=h["lam"],
        alpha=h["alpha"],
        epsilon=h["epsilon"],
        epochs=h["epochs"],
        seed=h["seed"],
    )
    return Checkpoint(
        params=_params_from_obj(doc["params"]),
        hyper=hyper,
        vocab_fingerprint=doc["vocab_fingerprint"],
        epoch=doc["epoch"],
        rng_state=doc["rng_state"],
        velocity=_params_from_obj(doc["velocity"]),
        loss_history=list(doc["loss_history"]),
    )


def loss_log_csv(report: TrainReport) -> str:
    lines = ["epoch,mean_hinge,objective"]
    for i, (h, o) in enumerate(zip(report.mean_hinge, report.objective), start=1):
        lines.append(f"{i},{h!r},{o!r}")
    return "\n".join(lines) + "\n"
