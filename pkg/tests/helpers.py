"""Shared test utilities: finite-difference oracles and tiny datasets."""

from __future__ import annotations

import numpy as np

import cvlearn as cv

FD_STEP = 1e-5


def relu_margin(tape) -> float:
    """Smallest |preactivation| feeding any relu on the tape.

    Finite differences are meaningless within a step of a relu kink, so
    gradient tests regenerate instances until the margin is comfortable.
    """
    margins = [float(np.abs(n.parents[0].data).min())
               for n in tape.nodes if n.op == "relu"]
    return min(margins) if margins else np.inf


def central_diff(loss_fn, params: dict, h: float = FD_STEP) -> dict:
    """Central finite differences of a scalar loss over a parameter dict."""
    grads = {}
    for name, p in params.items():
        g = np.zeros_like(p)
        for idx in np.ndindex(*p.shape):
            bumped = {k: v.copy() for k, v in params.items()}
            bumped[name][idx] += h
            up = loss_fn(bumped)
            bumped[name][idx] -= 2 * h
            dn = loss_fn(bumped)
            g[idx] = (up - dn) / (2 * h)
        grads[name] = g
    return grads


def block_relative_error(fd: dict, tape_grads: dict) -> float:
    """Max over parameter tensors of ||fd - g|| / max(||fd||, ||g||).

    The per-tensor norm form keeps finite-difference roundoff on
    individual near-zero entries from dominating the comparison.
    """
    worst = 0.0
    for name in fd:
        a, b = fd[name].ravel(), tape_grads[name].ravel()
        denom = max(np.linalg.norm(a), np.linalg.norm(b), 1e-12)
        worst = max(worst, np.linalg.norm(a - b) / denom)
    return worst


def build_arch_loss(kind: str, task: str, seed: int, beta: float = 0.0,
                    dn: int = 6, ln: int = 4, k: int = 3, batch: int = 2):
    """A small architecture instance and its loss closure for grad checks.

    Returns (params, loss_fn, tape, loss) where loss_fn(params) -> float
    rebuilds the forward pass, or None if the instance sits too close to
    a relu kink for finite differences.
    """
    spec = cv.NetworkSpec(kind=kind, input_dim=dn, latent_dim=ln,
                          output_dim=k, task=task)
    model = cv.init_params(spec, seed=seed)
    g = np.random.default_rng(seed)
    x_re, x_im = g.standard_normal((batch, dn)), g.standard_normal((batch, dn))
    labels = g.integers(0, k, size=batch)
    targets = g.standard_normal((batch, spec.head_width))

    def run(params):
        m = cv.Model(spec=spec, params=params)
        tape = cv.Tape()
        res = cv.forward(m, x_re, x_im, tape)
        if task == "classification":
            loss = cv.cross_entropy(res.pred, labels)
        else:
            loss = cv.mse(res.pred, targets)
        if beta > 0 and kind == "analytic":
            loss = cv.total_loss(loss, cv.hilbert_penalty(res.latent_pair), beta)
        return tape, loss

    tape, loss = run(model.params)
    if relu_margin(tape) < 1e-3:
        return None
    return model.params, (lambda p: float(run(p)[1].data)), tape, loss


def zero_dc_nyquist(rows: np.ndarray) -> np.ndarray:
    """Project out the DC and Nyquist components of each row (even length)."""
    rows = np.atleast_2d(np.asarray(rows, dtype=np.float64)).copy()
    n = rows.shape[1]
    rows -= rows.mean(axis=1, keepdims=True)
    alt = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    rows -= (rows @ alt)[:, None] / n * alt[None, :]
    return rows


def synthetic_classification(m: int, dn: int, k: int, seed: int,
                             spread: float = 0.3, proto_seed: int = 777,
                             scale: float = 1.0) -> cv.Dataset:
    """Separable complex-feature classes: shared prototype spectra plus noise.

    Prototypes depend only on (proto_seed, dn, k), so train/test splits
    generated with different seeds share the same class structure.
    """
    pg = np.random.default_rng(proto_seed)
    proto_re = pg.standard_normal((k, dn))
    proto_im = pg.standard_normal((k, dn))
    g = np.random.default_rng(seed)
    labels = g.integers(0, k, size=m)
    re = scale * (proto_re[labels] + spread * g.standard_normal((m, dn)))
    im = scale * (proto_im[labels] + spread * g.standard_normal((m, dn)))
    return cv.Dataset(re, im, labels, "classification",
                      provenance=f"synthetic(m={m},k={k},seed={seed})")


def random_regression(m: int, dn: int, k: int, seed: int) -> cv.Dataset:
    g = np.random.default_rng(seed)
    targets = g.standard_normal((m, k)) + 1j * g.standard_normal((m, k))
    return cv.Dataset(g.standard_normal((m, dn)), g.standard_normal((m, dn)),
                      targets, "complex_regression",
                      provenance=f"random-regression(seed={seed})")
