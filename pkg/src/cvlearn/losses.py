"""Task losses, the Hilbert consistency penalty, and the Adam optimizer.

The penalty measures, per sample, the mean squared error between the
Hilbert transform of the real latent row and the imaginary latent row,
averaged over the batch; it is zero exactly when every imaginary latent
equals the transform of its real counterpart. The training objective is
``task_loss + beta * penalty``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import autodiff as ad
from .autodiff import Tensor, record_op
from .errors import ContractError, DataError, ShapeError, ValidationError
from .models import LatentPair
from .transforms import hilbert_rows


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float
    beta: float = 0.0
    epochs: int = 100
    batch_size: int = 32
    seed: int = 0
    adam_b1: float = 0.9
    adam_b2: float = 0.999
    adam_eps: float = 1e-8

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ValidationError("learning_rate must be positive")
        if self.beta < 0:
            raise ValidationError("beta must be non-negative")
        if self.epochs < 0:
            raise ValidationError("epochs must be >= 0")
        if self.batch_size < 1:
            raise ValidationError("batch_size must be >= 1")
        if not (0 < self.adam_b1 < 1 and 0 < self.adam_b2 < 1):
            raise ValidationError("adam_b1 and adam_b2 must lie in (0, 1)")
        if not self.adam_eps > 0:
            raise ValidationError("adam_eps must be positive")

    def to_dict(self) -> dict:
        return {"learning_rate": self.learning_rate, "beta": self.beta,
                "epochs": self.epochs, "batch_size": self.batch_size,
                "seed": self.seed, "adam_b1": self.adam_b1,
                "adam_b2": self.adam_b2, "adam_eps": self.adam_eps}

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        known = {"learning_rate", "beta", "epochs", "batch_size", "seed",
                 "adam_b1", "adam_b2", "adam_eps"}
        unknown = set(d) - known
        if unknown:
            raise ValidationError(f"unknown config fields: {sorted(unknown)}")
        if "learning_rate" not in d:
            raise ValidationError("missing config field: learning_rate")
        kwargs = {}
        for name in known & set(d):
            value = d[name]
            if name in ("epochs", "batch_size", "seed"):
                if not isinstance(value, int) or isinstance(value, bool):
                    raise ValidationError(f"config field {name} must be an integer")
                kwargs[name] = value
            else:
                if not isinstance(value, (int, float)) or isinstance(value, bool):
                    raise ValidationError(f"config field {name} must be a number")
                kwargs[name] = float(value)
        return cls(**kwargs)


def cross_entropy(logits: Tensor, labels) -> Tensor:
    """Mean of -log softmax(logits)[label], with max-subtraction for stability."""
    labels = np.asarray(labels)
    if logits.ndim != 2:
        raise ShapeError(f"cross_entropy expects [batch, classes] logits, got {logits.shape}")
    b, k = logits.shape
    if labels.shape != (b,):
        raise ShapeError(f"labels shape {labels.shape} does not match batch {b}")
    if labels.dtype.kind not in "iu":
        raise DataError("labels must be integers")
    if labels.min(initial=0) < 0 or labels.max(initial=0) >= k:
        raise DataError(f"label out of range [0, {k})")
    x = logits.data
    shifted = x - x.max(axis=1, keepdims=True)
    expx = np.exp(shifted)
    z = expx.sum(axis=1, keepdims=True)
    softmax = expx / z
    logprob = shifted[np.arange(b), labels] - np.log(z[:, 0])
    value = np.asarray(-logprob.mean())

    def vjp(g):
        grad = softmax.copy()
        grad[np.arange(b), labels] -= 1.0
        return grad * (float(g) / b)

    return record_op("cross_entropy", value, (logits,), (vjp,))


def mse(pred: Tensor, target) -> Tensor:
    """Mean over all entries of the squared difference."""
    tgt = target if isinstance(target, Tensor) else ad.constant(np.asarray(target))
    if pred.shape != tgt.shape:
        raise ShapeError(f"mse shapes differ: {pred.shape} vs {tgt.shape}")
    diff = ad.sub(pred, tgt)
    return ad.mean_all(ad.mul(diff, diff))


def hilbert_penalty(latent: LatentPair) -> Tensor:
    """Batch-average per-sample MSE between H{z_re} rows and z_im rows.

    Zero iff z_im == H{z_re} for every sample. Differentiable through
    both latent channels.
    """
    if latent.z_re.shape != latent.z_im.shape:
        raise ShapeError(
            f"latent shapes differ: {latent.z_re.shape} vs {latent.z_im.shape}")
    hz = hilbert_rows(latent.z_re)
    diff = ad.sub(hz, latent.z_im)
    return ad.mean_all(ad.mul(diff, diff))


def total_loss(task_loss: Tensor, penalty: Optional[Tensor], beta: float) -> Tensor:
    """task_loss + beta * penalty; beta = 0 (or no penalty) is plain training."""
    if beta < 0:
        raise ContractError("beta must be non-negative")
    if penalty is None or beta == 0.0:
        return task_loss
    return ad.add(task_loss, ad.scale(penalty, beta))


@dataclass
class AdamState:
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)
    t: int = 0


def adam_init(params: dict[str, np.ndarray]) -> AdamState:
    return AdamState(m={n: np.zeros_like(p) for n, p in params.items()},
                     v={n: np.zeros_like(p) for n, p in params.items()},
                     t=0)


def adam_step(params: dict[str, np.ndarray], grads: dict[str, np.ndarray],
              state: AdamState, config: TrainConfig) -> tuple[dict, AdamState]:
    """One bias-corrected Adam update; functional (inputs untouched)."""
    if set(params) != set(grads):
        raise ContractError("gradient keys do not match parameter keys")
    b1, b2, eps, lr = config.adam_b1, config.adam_b2, config.adam_eps, config.learning_rate
    t = state.t + 1
    new_params, new_m, new_v = {}, {}, {}
    for name, p in params.items():
        g = grads[name]
        if g.shape != p.shape:
            raise ShapeError(f"gradient shape {g.shape} != param shape {p.shape} for {name}")
        m = b1 * state.m[name] + (1 - b1) * g
        v = b2 * state.v[name] + (1 - b2) * (g * g)
        m_hat = m / (1 - b1 ** t)
        v_hat = v / (1 - b2 ** t)
        new_params[name] = p - lr * m_hat / (np.sqrt(v_hat) + eps)
        new_m[name], new_v[name] = m, v
    return new_params, AdamState(m=new_m, v=new_v, t=t)
