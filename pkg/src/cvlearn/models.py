"""The four architectures: RVNN, CVNN, and the dual-subnetwork pair.

All are small fully connected networks over paired real/imaginary
feature matrices. "steinmetz" runs separate two-layer ReLU subnetworks
on the real and imaginary channels, mean-centers each latent row, and
feeds the concatenation to a shared linear head. "analytic" is the same
forward graph; it differs only in training, where the Hilbert
consistency penalty is added to the loss. "rvnn" concatenates the
channels up front; "cvnn" uses complex linear layers (kept as real
weight pairs) with ReLU applied independently to each part.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import autodiff as ad
from .autodiff import Tape, Tensor
from .errors import ContractError, DataError, ShapeError
from .rng import Rng

KINDS = ("rvnn", "cvnn", "steinmetz", "analytic")
TASKS = ("classification", "complex_regression")

MAGNITUDE_EPS = 1e-12  # under the sqrt of the CVNN magnitude head

CHECKPOINT_FORMAT = "cvlearn-checkpoint-v1"


@dataclass(frozen=True)
class NetworkSpec:
    kind: str
    input_dim: int
    latent_dim: int
    output_dim: int
    task: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ContractError(f"unknown architecture kind: {self.kind!r}")
        if self.task not in TASKS:
            raise ContractError(f"unknown task: {self.task!r}")
        if self.input_dim < 1 or self.latent_dim < 1 or self.output_dim < 1:
            raise ContractError("network dimensions must be positive")
        if self.latent_dim % 2 != 0:
            raise ContractError(
                f"latent_dim must be even for the Hilbert penalty, got {self.latent_dim}")

    @property
    def head_width(self) -> int:
        """Output width of the final real layer: k logits, or 2k stacked
        (re, im) values for complex regression."""
        if self.task == "classification":
            return self.output_dim
        return 2 * self.output_dim

    def to_dict(self) -> dict:
        return {"kind": self.kind, "input_dim": self.input_dim,
                "latent_dim": self.latent_dim, "output_dim": self.output_dim,
                "task": self.task}

    @classmethod
    def from_dict(cls, d: dict) -> "NetworkSpec":
        return cls(kind=d["kind"], input_dim=int(d["input_dim"]),
                   latent_dim=int(d["latent_dim"]), output_dim=int(d["output_dim"]),
                   task=d["task"])


@dataclass
class Model:
    spec: NetworkSpec
    params: dict[str, np.ndarray] = field(default_factory=dict)


@dataclass
class LatentPair:
    """Mean-centered latent channels of the dual-subnetwork forward pass."""
    z_re: Tensor
    z_im: Tensor


@dataclass
class ForwardResult:
    pred: Tensor
    latent_pair: Optional[LatentPair] = None  # steinmetz/analytic (centered), cvnn (raw)
    latent: Optional[Tensor] = None           # rvnn joint latent [b, 2*latent_dim]


def _param_shapes(spec: NetworkSpec) -> dict[str, tuple]:
    """Parameter names and shapes in declared (serialization) order."""
    dn, ln, out = spec.input_dim, spec.latent_dim, spec.head_width
    if spec.kind == "rvnn":
        return {
            "fc1.w": (ln, 2 * dn), "fc1.b": (ln,),
            "fc2.w": (2 * ln, ln), "fc2.b": (2 * ln,),
            "fc3.w": (out, 2 * ln), "fc3.b": (out,),
        }
    if spec.kind == "cvnn":
        k = spec.output_dim
        shapes = {}
        for name, (o, i) in (("fc1", (ln, dn)), ("fc2", (ln, ln)), ("fc3", (k, ln))):
            shapes[f"{name}.wr"] = (o, i)
            shapes[f"{name}.wi"] = (o, i)
            shapes[f"{name}.br"] = (o,)
            shapes[f"{name}.bi"] = (o,)
        return shapes
    # steinmetz / analytic share one parameterization
    return {
        "realfc1.w": (ln, dn), "realfc1.b": (ln,),
        "realfc2.w": (ln, ln), "realfc2.b": (ln,),
        "imagfc1.w": (ln, dn), "imagfc1.b": (ln,),
        "imagfc2.w": (ln, ln), "imagfc2.b": (ln,),
        "regressor.w": (out, 2 * ln), "regressor.b": (out,),
    }


def init_params(spec: NetworkSpec, seed: int) -> Model:
    """Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], biases zero.

    Each parameter draws from its own named substream, so initialization
    is deterministic per (spec, seed) and independent of evaluation order.
    """
    root = Rng(seed)
    params = {}
    for name, shape in _param_shapes(spec).items():
        if len(shape) == 1:
            params[name] = np.zeros(shape)
        else:
            bound = 1.0 / np.sqrt(shape[1])
            params[name] = root.substream(f"init/{name}").uniform(-bound, bound, shape)
    return Model(spec=spec, params=params)


def param_count(model: Model) -> int:
    return sum(p.size for p in model.params.values())


def _bind(model: Model, tape: Tape) -> dict[str, Tensor]:
    return {name: tape.leaf(arr, name=name) for name, arr in model.params.items()}


def _affine(x: Tensor, w: Tensor, b: Tensor) -> Tensor:
    return ad.add_bias(ad.matmul(x, ad.transpose(w)), b)


def _check_inputs(spec: NetworkSpec, x_re: np.ndarray, x_im: np.ndarray) -> None:
    if x_re.ndim != 2 or x_im.ndim != 2 or x_re.shape != x_im.shape:
        raise ShapeError(
            f"inputs must be matching 2-D arrays, got {x_re.shape} and {x_im.shape}")
    if x_re.shape[1] != spec.input_dim:
        raise ShapeError(
            f"input feature width {x_re.shape[1]} != network input_dim {spec.input_dim}")


def steinmetz_forward(model: Model, x_re, x_im,
                      tape: Optional[Tape] = None) -> tuple[Tensor, LatentPair]:
    """Separate subnetworks per channel, mean-centered latents, shared head."""
    spec = model.spec
    if spec.kind not in ("steinmetz", "analytic"):
        raise ContractError(f"steinmetz_forward got kind {spec.kind!r}")
    x_re, x_im = np.asarray(x_re, dtype=np.float64), np.asarray(x_im, dtype=np.float64)
    _check_inputs(spec, x_re, x_im)
    tape = tape if tape is not None else Tape()
    p = _bind(model, tape)
    xr, xi = tape.leaf(x_re), tape.leaf(x_im)
    hr = ad.relu(_affine(xr, p["realfc1.w"], p["realfc1.b"]))
    hr = ad.relu(_affine(hr, p["realfc2.w"], p["realfc2.b"]))
    z_re = ad.mean_center_rows(hr)
    hi = ad.relu(_affine(xi, p["imagfc1.w"], p["imagfc1.b"]))
    hi = ad.relu(_affine(hi, p["imagfc2.w"], p["imagfc2.b"]))
    z_im = ad.mean_center_rows(hi)
    pred = _affine(ad.concat(z_re, z_im, axis=1), p["regressor.w"], p["regressor.b"])
    return pred, LatentPair(z_re=z_re, z_im=z_im)


def rvnn_forward(model: Model, x_re, x_im,
                 tape: Optional[Tape] = None) -> tuple[Tensor, Tensor]:
    """Joint processing of the concatenated channels; latent width 2*latent_dim."""
    spec = model.spec
    if spec.kind != "rvnn":
        raise ContractError(f"rvnn_forward got kind {spec.kind!r}")
    x_re, x_im = np.asarray(x_re, dtype=np.float64), np.asarray(x_im, dtype=np.float64)
    _check_inputs(spec, x_re, x_im)
    tape = tape if tape is not None else Tape()
    p = _bind(model, tape)
    x = ad.concat(tape.leaf(x_re), tape.leaf(x_im), axis=1)
    h = ad.relu(_affine(x, p["fc1.w"], p["fc1.b"]))
    latent = ad.relu(_affine(h, p["fc2.w"], p["fc2.b"]))
    pred = _affine(latent, p["fc3.w"], p["fc3.b"])
    return pred, latent


def _complex_affine(xr: Tensor, xi: Tensor, p: dict, layer: str) -> tuple[Tensor, Tensor]:
    """(yr + i yi) = (wr + i wi)(xr + i xi) + (br + i bi), via real matmuls."""
    wr, wi = ad.transpose(p[f"{layer}.wr"]), ad.transpose(p[f"{layer}.wi"])
    yr = ad.add_bias(ad.sub(ad.matmul(xr, wr), ad.matmul(xi, wi)), p[f"{layer}.br"])
    yi = ad.add_bias(ad.add(ad.matmul(xi, wr), ad.matmul(xr, wi)), p[f"{layer}.bi"])
    return yr, yi


def _cvnn_parts(model: Model, x_re, x_im,
                tape: Optional[Tape]) -> tuple[Tensor, LatentPair]:
    spec = model.spec
    if spec.kind != "cvnn":
        raise ContractError(f"cvnn_forward got kind {spec.kind!r}")
    x_re, x_im = np.asarray(x_re, dtype=np.float64), np.asarray(x_im, dtype=np.float64)
    _check_inputs(spec, x_re, x_im)
    tape = tape if tape is not None else Tape()
    p = _bind(model, tape)
    xr, xi = tape.leaf(x_re), tape.leaf(x_im)
    yr, yi = _complex_affine(xr, xi, p, "fc1")
    yr, yi = ad.relu(yr), ad.relu(yi)
    yr, yi = _complex_affine(yr, yi, p, "fc2")
    zr, zi = ad.relu(yr), ad.relu(yi)
    yr, yi = _complex_affine(zr, zi, p, "fc3")
    if spec.task == "classification":
        # per-class magnitude; eps keeps the sqrt differentiable at zero
        sq = ad.add_const(ad.add(ad.mul(yr, yr), ad.mul(yi, yi)), MAGNITUDE_EPS)
        pred = ad.sqrt(sq)
    else:
        pred = ad.concat(yr, yi, axis=1)
    return pred, LatentPair(z_re=zr, z_im=zi)


def cvnn_forward(model: Model, x_re, x_im, tape: Optional[Tape] = None) -> Tensor:
    """Complex-layer network; classification head is the per-class magnitude."""
    pred, _ = _cvnn_parts(model, x_re, x_im, tape)
    return pred


def forward(model: Model, x_re, x_im, tape: Optional[Tape] = None) -> ForwardResult:
    """Architecture dispatch used by training and evaluation."""
    kind = model.spec.kind
    if kind in ("steinmetz", "analytic"):
        pred, pair = steinmetz_forward(model, x_re, x_im, tape)
        return ForwardResult(pred=pred, latent_pair=pair)
    if kind == "rvnn":
        pred, latent = rvnn_forward(model, x_re, x_im, tape)
        return ForwardResult(pred=pred, latent=latent)
    pred, pair = _cvnn_parts(model, x_re, x_im, tape)
    return ForwardResult(pred=pred, latent_pair=pair)


def latent_channels(model: Model, x_re, x_im) -> tuple[np.ndarray, np.ndarray]:
    """Latent (re, im) channel arrays for diagnostics.

    rvnn has one joint latent; its first/second halves are reported as
    the channel split.
    """
    result = forward(model, x_re, x_im)
    if result.latent_pair is not None:
        return result.latent_pair.z_re.data, result.latent_pair.z_im.data
    ln = model.spec.latent_dim
    return result.latent.data[:, :ln], result.latent.data[:, ln:]


# ---------------------------------------------------------------------------
# checkpoints: one JSON header line, then raw little-endian float64 blobs
# in declared parameter order


def save_checkpoint(model: Model, path, seed: int, epoch: int) -> None:
    header = {
        "format": CHECKPOINT_FORMAT,
        "spec": model.spec.to_dict(),
        "seed": int(seed),
        "epoch": int(epoch),
        "params": [{"name": n, "shape": list(p.shape)}
                   for n, p in model.params.items()],
        "dtype": "f64", "endianness": "little",
    }
    with open(path, "wb") as f:
        f.write(json.dumps(header).encode("utf-8") + b"\n")
        for p in model.params.values():
            f.write(np.ascontiguousarray(p, dtype="<f8").tobytes())


def load_checkpoint(path) -> tuple[Model, dict]:
    """Returns (model, header). Raises DataError on malformed files."""
    with open(path, "rb") as f:
        header_line = f.readline()
        blob = f.read()
    try:
        header = json.loads(header_line.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise DataError(f"checkpoint header is not valid JSON: {e}") from e
    if header.get("format") != CHECKPOINT_FORMAT:
        raise DataError(f"unexpected checkpoint format: {header.get('format')!r}")
    spec = NetworkSpec.from_dict(header["spec"])
    expected = _param_shapes(spec)
    params = {}
    offset = 0
    for entry in header["params"]:
        name, shape = entry["name"], tuple(entry["shape"])
        if name not in expected or expected[name] != shape:
            raise DataError(f"checkpoint parameter {name!r} has unexpected shape {shape}")
        nbytes = int(np.prod(shape)) * 8
        if offset + nbytes > len(blob):
            raise DataError(f"checkpoint blob truncated at parameter {name!r}")
        arr = np.frombuffer(blob[offset:offset + nbytes], dtype="<f8").reshape(shape)
        if not np.isfinite(arr).all():
            raise DataError(f"checkpoint parameter {name!r} has non-finite values")
        params[name] = arr.astype(np.float64)
        offset += nbytes
    if offset != len(blob):
        raise DataError("checkpoint blob has trailing bytes")
    if set(params) != set(expected):
        missing = sorted(set(expected) - set(params))
        raise DataError(f"checkpoint missing parameters: {missing}")
    return Model(spec=spec, params=params), header
