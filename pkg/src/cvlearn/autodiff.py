"""Dense float64 tensors with reverse-mode automatic differentiation.

A Tape records every operation of one forward pass in creation order;
node inputs always point to strictly earlier nodes, so the record is
already topologically sorted and ``backward`` is a single deterministic
reverse sweep. Tapes are rebuilt per batch; tensors are immutable after
creation and safe to share read-only across threads.
"""

from __future__ import annotations

from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ContractError, DataError, ShapeError

_DEBUG = False


def set_debug(flag: bool) -> None:
    """When enabled, every op result is checked for NaN/Inf."""
    global _DEBUG
    _DEBUG = bool(flag)


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def _as_f64(data, *, copy: bool) -> np.ndarray:
    arr = np.array(data, dtype=np.float64, order="C", copy=copy)
    if not np.isfinite(arr).all():
        raise DataError("tensor creation: non-finite entries")
    return arr


class Tensor:
    """Immutable float64 array, optionally recorded as a node on a Tape."""

    __slots__ = ("data", "tape", "node_id", "parents", "vjps", "op")

    def __init__(self, data: np.ndarray, tape: Optional["Tape"] = None,
                 node_id: Optional[int] = None, parents: tuple = (),
                 vjps: tuple = (), op: str = "leaf"):
        self.data = data
        self.tape = tape
        self.node_id = node_id
        self.parents = parents
        self.vjps = vjps
        self.op = op

    @property
    def shape(self) -> tuple:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    def __repr__(self) -> str:
        return f"Tensor(op={self.op!r}, shape={self.shape})"


class Tape:
    """Ordered op record for one forward pass plus the grads of its backward."""

    def __init__(self):
        self.nodes: list[Tensor] = []
        self.grads: list[Optional[np.ndarray]] = []
        self._param_ids: dict[str, int] = {}

    def _add(self, t: Tensor) -> Tensor:
        t.node_id = len(self.nodes)
        t.tape = self
        self.nodes.append(t)
        self.grads.append(None)
        return t

    def leaf(self, data, name: Optional[str] = None) -> Tensor:
        """Register an input or parameter; data is copied and frozen."""
        t = self._add(Tensor(_freeze(_as_f64(data, copy=True))))
        if name is not None:
            if name in self._param_ids:
                raise ContractError(f"duplicate parameter name on tape: {name}")
            self._param_ids[name] = t.node_id
        return t

    def backward(self, loss: Tensor) -> dict[str, np.ndarray]:
        """Reverse accumulation from a scalar loss.

        Populates ``grads`` for every node reachable from the loss and
        returns gradients for all named parameters (zeros if unreached).
        """
        if loss.tape is not self:
            raise ContractError("loss tensor does not belong to this tape")
        if loss.data.shape != ():
            raise ContractError("backward requires a scalar loss node")
        self.grads = [None] * len(self.nodes)
        self.grads[loss.node_id] = np.ones(())
        for nid in range(loss.node_id, -1, -1):
            g = self.grads[nid]
            if g is None:
                continue
            node = self.nodes[nid]
            for parent, vjp in zip(node.parents, node.vjps):
                if parent.tape is not self:
                    continue  # constant input: no gradient tracked
                contrib = vjp(g)
                pid = parent.node_id
                if self.grads[pid] is None:
                    self.grads[pid] = contrib.copy()
                else:
                    self.grads[pid] = self.grads[pid] + contrib
        return {
            name: (self.grads[nid] if self.grads[nid] is not None
                   else np.zeros_like(self.nodes[nid].data))
            for name, nid in self._param_ids.items()
        }

    def grad(self, t: Tensor) -> Optional[np.ndarray]:
        if t.tape is not self:
            raise ContractError("tensor does not belong to this tape")
        return self.grads[t.node_id]


def constant(data) -> Tensor:
    """Tensor outside any tape; participates in ops but gets no gradient."""
    return Tensor(_freeze(_as_f64(data, copy=True)), op="const")


def _find_tape(parents: Sequence[Tensor]) -> Optional[Tape]:
    tape = None
    for p in parents:
        if p.tape is None:
            continue
        if tape is None:
            tape = p.tape
        elif tape is not p.tape:
            raise ContractError("operands belong to different tapes")
    return tape


def record_op(op: str, value: np.ndarray, parents: Sequence[Tensor],
              vjps: Sequence[Callable[[np.ndarray], np.ndarray]]) -> Tensor:
    """Record one op result; constant-only inputs yield an unrecorded constant."""
    if _DEBUG and not np.isfinite(value).all():
        raise DataError(f"non-finite result in op {op!r}")
    tape = _find_tape(parents)
    out = Tensor(_freeze(value), parents=tuple(parents), vjps=tuple(vjps), op=op)
    if tape is None:
        return out
    return tape._add(out)


# ---------------------------------------------------------------------------
# elementary operations


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.ndim != 2 or b.ndim != 2:
        raise ShapeError(f"matmul needs 2-D operands, got {a.shape} and {b.shape}")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul inner dims differ: {a.shape} x {b.shape}")
    value = a.data @ b.data
    return record_op("matmul", value, (a, b),
                     (lambda g: g @ b.data.T, lambda g: a.data.T @ g))


def transpose(x: Tensor) -> Tensor:
    if x.ndim != 2:
        raise ShapeError(f"transpose needs a 2-D operand, got {x.shape}")
    return record_op("transpose", np.ascontiguousarray(x.data.T), (x,),
                     (lambda g: np.ascontiguousarray(g.T),))


def add(a: Tensor, b: Tensor) -> Tensor:
    if a.shape != b.shape:
        raise ShapeError(f"add shapes differ: {a.shape} vs {b.shape}")
    return record_op("add", a.data + b.data, (a, b),
                     (lambda g: g, lambda g: g))


def sub(a: Tensor, b: Tensor) -> Tensor:
    if a.shape != b.shape:
        raise ShapeError(f"sub shapes differ: {a.shape} vs {b.shape}")
    return record_op("sub", a.data - b.data, (a, b),
                     (lambda g: g, lambda g: -g))


def mul(a: Tensor, b: Tensor) -> Tensor:
    if a.shape != b.shape:
        raise ShapeError(f"mul shapes differ: {a.shape} vs {b.shape}")
    return record_op("mul", a.data * b.data, (a, b),
                     (lambda g: g * b.data, lambda g: g * a.data))


def scale(x: Tensor, c: float) -> Tensor:
    c = float(c)
    return record_op("scale", x.data * c, (x,), (lambda g: g * c,))


def add_const(x: Tensor, c: float) -> Tensor:
    c = float(c)
    return record_op("add_const", x.data + c, (x,), (lambda g: g,))


def add_bias(x: Tensor, b: Tensor) -> Tensor:
    """Row-broadcast bias: [m, n] + [n]."""
    if x.ndim != 2 or b.ndim != 1 or x.shape[1] != b.shape[0]:
        raise ShapeError(f"add_bias shapes incompatible: {x.shape} + {b.shape}")
    return record_op("add_bias", x.data + b.data, (x, b),
                     (lambda g: g, lambda g: g.sum(axis=0)))


def relu(x: Tensor) -> Tensor:
    mask = x.data > 0  # subgradient at 0 is 0
    return record_op("relu", np.maximum(x.data, 0.0), (x,),
                     (lambda g: g * mask,))


def sqrt(x: Tensor) -> Tensor:
    if (x.data < 0).any():
        raise ContractError("sqrt of negative entries")
    value = np.sqrt(x.data)
    return record_op("sqrt", value, (x,), (lambda g: g * (0.5 / value),))


def concat(a: Tensor, b: Tensor, axis: int = 1) -> Tensor:
    if axis not in (0, 1) or a.ndim != 2 or b.ndim != 2:
        raise ShapeError("concat supports 2-D tensors along axis 0 or 1")
    if a.shape[1 - axis] != b.shape[1 - axis]:
        raise ShapeError(f"concat shapes incompatible: {a.shape} and {b.shape}")
    na = a.shape[axis]
    if axis == 1:
        vjps = (lambda g: g[:, :na], lambda g: g[:, na:])
    else:
        vjps = (lambda g: g[:na, :], lambda g: g[na:, :])
    return record_op("concat", np.concatenate([a.data, b.data], axis=axis),
                     (a, b), vjps)


def split(x: Tensor, sizes: Sequence[int], axis: int = 1) -> list[Tensor]:
    if axis not in (0, 1) or x.ndim != 2:
        raise ShapeError("split supports 2-D tensors along axis 0 or 1")
    if sum(sizes) != x.shape[axis]:
        raise ShapeError(f"split sizes {sizes} do not cover dim {x.shape[axis]}")
    outs = []
    offset = 0
    for size in sizes:
        lo, hi = offset, offset + size
        piece = x.data[:, lo:hi] if axis == 1 else x.data[lo:hi, :]

        def make_vjp(lo=lo, hi=hi):
            def vjp(g):
                full = np.zeros_like(x.data)
                if axis == 1:
                    full[:, lo:hi] = g
                else:
                    full[lo:hi, :] = g
                return full
            return vjp

        outs.append(record_op("split", np.ascontiguousarray(piece), (x,),
                              (make_vjp(),)))
        offset += size
    return outs


def mean_center_rows(x: Tensor) -> Tensor:
    """Subtract each row's mean from its entries; rows then sum to zero."""
    if x.ndim != 2:
        raise ShapeError(f"mean_center_rows needs a 2-D tensor, got {x.shape}")
    value = x.data - x.data.mean(axis=1, keepdims=True)
    # the centering map is symmetric, so the vjp is the map itself
    return record_op("mean_center_rows", value, (x,),
                     (lambda g: g - g.mean(axis=1, keepdims=True),))


def sum_all(x: Tensor) -> Tensor:
    return record_op("sum_all", np.asarray(x.data.sum()), (x,),
                     (lambda g: np.full(x.shape, float(g)),))


def mean_all(x: Tensor) -> Tensor:
    inv = 1.0 / x.data.size
    return record_op("mean_all", np.asarray(x.data.mean()), (x,),
                     (lambda g: np.full(x.shape, float(g) * inv),))
