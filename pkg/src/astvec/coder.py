"""The coding model: a parent kind's vector should be reproducible from its
children's vectors through one tanh layer whose per-child weight interpolates
between two global matrices by relative position.

Training pulls the reconstruction distance of real samples below that of
corrupted ones by a margin, with an l2 penalty on the two weight matrices.
All gradients here are exact and checked against finite differences in the
test suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ast_core import VOCAB_SIZE
from .sampling import NegativeSample, TrainingSample


@dataclass
class Hyperparams:
    n_f: int = 30          # embedding dimension
    delta: float = 1.0     # ranking margin
    lam: float = 1e-4      # l2 coefficient on the weight matrices
    alpha: float = 0.003   # learning rate
    epsilon: float = 0.9   # momentum decay
    epochs: int = 200
    seed: int = 0

    def validate(self) -> None:
        if self.n_f < 1:
            raise ValueError("n_f must be >= 1")
        if self.delta < 0:
            raise ValueError("delta must be >= 0")
        if self.lam < 0:
            raise ValueError("lam must be >= 0")
        if not 0 <= self.epsilon < 1:
            raise ValueError("epsilon must be in [0, 1)")
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")


@dataclass
class ModelParams:
    embeddings: np.ndarray  # (V, N_f)
    w_l: np.ndarray         # (N_f, N_f)
    w_r: np.ndarray         # (N_f, N_f)
    b: np.ndarray           # (N_f,)

    @property
    def n_f(self) -> int:
        return self.b.shape[0]

    def copy(self) -> "ModelParams":
        return ModelParams(
            self.embeddings.copy(), self.w_l.copy(), self.w_r.copy(), self.b.copy()
        )

    def allclose(self, other: "ModelParams", **kw) -> bool:
        return (
            np.allclose(self.embeddings, other.embeddings, **kw)
            and np.allclose(self.w_l, other.w_l, **kw)
            and np.allclose(self.w_r, other.w_r, **kw)
            and np.allclose(self.b, other.b, **kw)
        )


@dataclass
class Gradient:
    """Embedding gradients are kept sparse, keyed by touched symbol id."""

    embeddings: dict[int, np.ndarray] = field(default_factory=dict)
    w_l: np.ndarray = None
    w_r: np.ndarray = None
    b: np.ndarray = None

    def add_embedding(self, symbol_id: int, grad: np.ndarray) -> None:
        if symbol_id in self.embeddings:
            self.embeddings[symbol_id] = self.embeddings[symbol_id] + grad
        else:
            self.embeddings[symbol_id] = grad.copy()


def init_params(hyper: Hyperparams, rng: np.random.Generator) -> ModelParams:
    """Uniform init in [-r, r] with r = sqrt(6 / (fan_in + fan_out)) = sqrt(6/2N_f)."""
    n_f = hyper.n_f
    r = np.sqrt(6.0 / (2.0 * n_f))
    return ModelParams(
        embeddings=rng.uniform(-r, r, size=(VOCAB_SIZE, n_f)),
        w_l=rng.uniform(-r, r, size=(n_f, n_f)),
        w_r=rng.uniform(-r, r, size=(n_f, n_f)),
        b=rng.uniform(-r, r, size=n_f),
    )


def child_weight(n: int, i: int) -> tuple[float, float]:
    """Interpolation coefficients (left, right) for child i of n, 1-based."""
    if not 1 <= i <= n:
        raise ValueError(f"child position {i} out of range for {n} children")
    if n == 1:
        return 0.5, 0.5
    return (n - i) / (n - 1), (i - 1) / (n - 1)


def _forward(children, coefficients, params: ModelParams):
    """Shared forward pass; returns (h, sum_left, sum_right) where
    h = tanh(W_l @ sum_left + W_r @ sum_right + b)."""
    n = len(children)
    n_f = params.n_f
    sum_left = np.zeros(n_f)
    sum_right = np.zeros(n_f)
    for i, (child, l_i) in enumerate(zip(children, coefficients), start=1):
        left, right = child_weight(n, i)
        u = l_i * params.embeddings[child.id]
        sum_left += left * u
        sum_right += right * u
    z = params.w_l @ sum_left + params.w_r @ sum_right + params.b
    return np.tanh(z), sum_left, sum_right


def code_children(sample, params: ModelParams) -> np.ndarray:
    """tanh( sum_i l_i W_i vec(c_i) + b ) with W_i from child_weight."""
    h, _, _ = _forward(sample.children, sample.coefficients, params)
    return h


def distance(sample, params: ModelParams) -> float:
    """Squared Euclidean distance between the parent vector and the coded one."""
    e = params.embeddings[sample.parent.id] - code_children(sample, params)
    return float(e @ e)


def hinge_loss(d: float, d_c: float, delta: float) -> float:
    return max(0.0, delta + d - d_c)


def pair_loss(
    sample: TrainingSample,
    negative: NegativeSample,
    params: ModelParams,
    hyper: Hyperparams,
) -> float:
    """Per-pair objective: hinge term plus the l2 share on W_l, W_r."""
    d = distance(sample, params)
    d_c = distance(negative, params)
    m = 2.0 * hyper.n_f**2
    penalty = (hyper.lam / (2.0 * m)) * (
        float(np.sum(params.w_l**2)) + float(np.sum(params.w_r**2))
    )
    return hinge_loss(d, d_c, hyper.delta) + penalty


def objective(
    pairs: list[tuple[TrainingSample, NegativeSample]],
    params: ModelParams,
    hyper: Hyperparams,
) -> float:
    """(1/2N) sum of hinges + (lam/2M)(|W_l|_F^2 + |W_r|_F^2), M = 2 N_f^2."""
    if not pairs:
        raise ValueError("objective requires at least one sample pair")
    total = 0.0
    for sample, negative in pairs:
        total += hinge_loss(
            distance(sample, params), distance(negative, params), hyper.delta
        )
    n = len(pairs)
    m = 2.0 * hyper.n_f**2
    penalty = (hyper.lam / (2.0 * m)) * (
        float(np.sum(params.w_l**2)) + float(np.sum(params.w_r**2))
    )
    return total / (2.0 * n) + penalty


def _distance_gradient(sample, params: ModelParams, grad: Gradient, scale: float):
    """Accumulate scale * d(distance)/d(theta) into grad; returns the distance."""
    children = sample.children
    coefficients = sample.coefficients
    h, sum_left, sum_right = _forward(children, coefficients, params)
    p_vec = params.embeddings[sample.parent.id]
    e = p_vec - h
    d = float(e @ e)

    g = -2.0 * e * (1.0 - h * h)  # d(distance)/dz
    grad.add_embedding(sample.parent.id, scale * 2.0 * e)
    grad.b += scale * g
    grad.w_l += scale * np.outer(g, sum_left)
    grad.w_r += scale * np.outer(g, sum_right)

    wl_g = params.w_l.T @ g
    wr_g = params.w_r.T @ g
    n = len(children)
    for i, (child, l_i) in enumerate(zip(children, coefficients), start=1):
        left, right = child_weight(n, i)
        grad.add_embedding(child.id, scale * l_i * (left * wl_g + right * wr_g))
    return d


def gradient_and_hinge(
    sample: TrainingSample,
    negative: NegativeSample,
    params: ModelParams,
    hyper: Hyperparams,
) -> tuple[Gradient, float]:
    """Exact gradient of pair_loss plus the hinge value of the pair.

    At the hinge kink (margin exactly met) the subgradient 0 is used, so a
    satisfied pair contributes only the l2 part.
    """
    n_f = params.n_f
    grad = Gradient(
        w_l=np.zeros((n_f, n_f)), w_r=np.zeros((n_f, n_f)), b=np.zeros(n_f)
    )
    d = distance(sample, params)
    d_c = distance(negative, params)
    hinge = hinge_loss(d, d_c, hyper.delta)
    if hinge > 0.0:
        _distance_gradient(sample, params, grad, scale=1.0)
        _distance_gradient(negative, params, grad, scale=-1.0)
    m = 2.0 * hyper.n_f**2
    grad.w_l += (hyper.lam / m) * params.w_l
    grad.w_r += (hyper.lam / m) * params.w_r
    return grad, hinge


def gradient(
    sample: TrainingSample,
    negative: NegativeSample,
    params: ModelParams,
    hyper: Hyperparams,
) -> Gradient:
    return gradient_and_hinge(sample, negative, params, hyper)[0]
