"""Three-layer feedforward classifier with masked weights.

Hidden nodes apply tanh to a weighted sum of the inputs (a constant-one input
provides the hidden bias), output nodes apply the logistic sigmoid to a
weighted sum of the hidden activations with no bias of their own.  The
training objective is cross entropy plus a two-part weight decay penalty; the
analytic gradient is exposed alongside for quasi-Newton training.  Presence
masks make links removable: a masked weight is pinned at zero and its
gradient entry is zero.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .encoder import EncodedDataset
from .errors import ConfigError

EPS_LOG = 1e-12  # floor keeping output logs finite


@dataclass(frozen=True)
class ObjectiveParams:
    """Penalty weights and the classification margins.

    eta1 is the output margin for the strict correctness test; eta1 + eta2
    must stay below 0.5 so that removing a link whose products pass the
    magnitude test cannot flip a margin-correct classification.
    """

    eps1: float = 0.1
    eps2: float = 1e-4
    beta: float = 10.0
    eta1: float = 0.35
    eta2: float = 0.1

    def __post_init__(self):
        if self.eps1 < 0 or self.eps2 < 0:
            raise ConfigError("penalty weights must be nonnegative")
        if self.beta <= 0:
            raise ConfigError("beta must be positive")
        if not 0 < self.eta1 < 0.5:
            raise ConfigError(f"eta1 must be in (0, 0.5), got {self.eta1}")
        if self.eta1 + self.eta2 >= 0.5:
            raise ConfigError(
                f"eta1 + eta2 must be < 0.5, got {self.eta1 + self.eta2}"
            )


@dataclass
class Network:
    w: np.ndarray  # (h, n) input -> hidden
    v: np.ndarray  # (o, h) hidden -> output
    mask_w: np.ndarray  # (h, n) in {0, 1}
    mask_v: np.ndarray  # (o, h)

    def __post_init__(self):
        h, n = self.w.shape
        o, h2 = self.v.shape
        if h2 != h:
            raise ConfigError(f"v has {h2} hidden columns, w has {h} rows")
        if n < 2 or h < 1 or o < 2:
            raise ConfigError(f"bad shape n={n} h={h} o={o}")
        if self.mask_w.shape != self.w.shape or self.mask_v.shape != self.v.shape:
            raise ConfigError("mask shapes must match weight shapes")
        self.w = self.w * self.mask_w
        self.v = self.v * self.mask_v

    @property
    def n(self) -> int:
        return self.w.shape[1]

    @property
    def h(self) -> int:
        return self.w.shape[0]

    @property
    def o(self) -> int:
        return self.v.shape[0]

    def copy(self) -> "Network":
        return Network(self.w.copy(), self.v.copy(),
                       self.mask_w.copy(), self.mask_v.copy())

    def link_count(self) -> int:
        return int(self.mask_w.sum() + self.mask_v.sum())


def init_random(n: int, h: int, o: int, seed: int) -> Network:
    """Fully connected network with weights uniform on [-1, 1]."""
    rng = np.random.default_rng(seed)
    return Network(
        w=rng.uniform(-1.0, 1.0, size=(h, n)),
        v=rng.uniform(-1.0, 1.0, size=(o, h)),
        mask_w=np.ones((h, n)),
        mask_v=np.ones((o, h)),
    )


def sigmoid(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def hidden_activations(net: Network, x: np.ndarray) -> np.ndarray:
    """tanh of the weighted input sums; works on one vector or a batch."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != net.n:
        raise ConfigError(f"input has {x.shape[-1]} components, expected {net.n}")
    return np.tanh(x @ net.w.T)


def forward(net: Network, x: np.ndarray) -> np.ndarray:
    """Output-node activations in (0, 1); one vector or a batch."""
    return sigmoid(hidden_activations(net, x) @ net.v.T)


def output_layer(net: Network, alphas: np.ndarray) -> np.ndarray:
    """Outputs for given hidden activations (used on discretized values)."""
    alphas = np.asarray(alphas, dtype=float)
    if alphas.shape[-1] != net.h:
        raise ConfigError(f"got {alphas.shape[-1]} activations, expected {net.h}")
    return sigmoid(alphas @ net.v.T)


def is_correct(S: np.ndarray, t: np.ndarray, eta1: float) -> bool:
    """Margin test: every output within eta1 of its 0/1 target."""
    S = np.asarray(S, dtype=float)
    t = np.asarray(t, dtype=float)
    return bool(np.max(np.abs(S - t)) <= eta1)


def classify(S: np.ndarray) -> int:
    """Index of the largest output; ties go to the lowest index."""
    return int(np.argmax(S))


def predictions(net: Network, X: np.ndarray) -> np.ndarray:
    return np.argmax(forward(net, X), axis=-1)


def accuracy(net: Network, data: EncodedDataset) -> float:
    return float(np.mean(predictions(net, data.X) == data.labels))


def eq1_satisfied(net: Network, data: EncodedDataset, eta1: float) -> np.ndarray:
    """Boolean mask of records passing the margin test."""
    S = forward(net, data.X)
    T = data.targets(net.o)
    return np.max(np.abs(S - T), axis=1) <= eta1


def cross_entropy(net: Network, data: EncodedDataset) -> float:
    S = forward(net, data.X)
    T = data.targets(net.o)
    Ss = np.clip(S, EPS_LOG, 1.0 - EPS_LOG)
    return float(-np.sum(T * np.log(Ss) + (1.0 - T) * np.log1p(-Ss)))


def penalty(net: Network, params: ObjectiveParams) -> float:
    total = 0.0
    for m, mask in ((net.w, net.mask_w), (net.v, net.mask_v)):
        sq = (m * mask) ** 2
        total += params.eps1 * np.sum(mask * params.beta * sq / (1.0 + params.beta * sq))
        total += params.eps2 * np.sum(sq)
    return float(total)


def objective_and_gradient(net: Network, data: EncodedDataset,
                           params: ObjectiveParams):
    """Cross entropy plus penalty, with its gradient over unmasked weights.

    Returns (value, grad_w, grad_v); gradient entries at masked positions are
    exactly zero.
    """
    X = data.X
    T = data.targets(net.o)
    A = np.tanh(X @ net.w.T)
    S = sigmoid(A @ net.v.T)
    Ss = np.clip(S, EPS_LOG, 1.0 - EPS_LOG)
    E = -np.sum(T * np.log(Ss) + (1.0 - T) * np.log1p(-Ss))

    dZ2 = S - T                       # (k, o)
    gv = dZ2.T @ A                    # (o, h)
    dA = (dZ2 @ net.v) * (1.0 - A * A)
    gw = dA.T @ X                     # (h, n)

    value = E
    for m, mask, g in ((net.w, net.mask_w, gw), (net.v, net.mask_v, gv)):
        sq = m * m
        denom = 1.0 + params.beta * sq
        value += params.eps1 * np.sum(mask * params.beta * sq / denom)
        value += params.eps2 * np.sum(mask * sq)
        g += params.eps1 * 2.0 * params.beta * m / (denom * denom)
        g += params.eps2 * 2.0 * m
    gw *= net.mask_w
    gv *= net.mask_v
    return float(value), gw, gv


# ---------------------------------------------------------------------------
# Flat views over the unmasked weights (optimizer coordinates)
# ---------------------------------------------------------------------------

def pack_weights(net: Network) -> np.ndarray:
    return np.concatenate([net.w[net.mask_w == 1], net.v[net.mask_v == 1]])


def pack_gradient(net: Network, gw: np.ndarray, gv: np.ndarray) -> np.ndarray:
    return np.concatenate([gw[net.mask_w == 1], gv[net.mask_v == 1]])


def with_weights(net: Network, theta: np.ndarray) -> Network:
    """New network with the unmasked weights replaced by `theta`."""
    nw = int(net.mask_w.sum())
    w = np.zeros_like(net.w)
    v = np.zeros_like(net.v)
    w[net.mask_w == 1] = theta[:nw]
    v[net.mask_v == 1] = theta[nw:]
    return Network(w, v, net.mask_w.copy(), net.mask_v.copy())


# ---------------------------------------------------------------------------
# Model files
# ---------------------------------------------------------------------------

def save_network(net: Network, path: str | Path,
                 params: ObjectiveParams | None = None,
                 provenance: dict | None = None) -> None:
    doc = {
        "n": net.n, "h": net.h, "o": net.o,
        "w": net.w.tolist(), "v": net.v.tolist(),
        "mask_w": net.mask_w.astype(int).tolist(),
        "mask_v": net.mask_v.astype(int).tolist(),
    }
    if params is not None:
        doc["params"] = {
            "eps1": params.eps1, "eps2": params.eps2, "beta": params.beta,
            "eta1": params.eta1, "eta2": params.eta2,
        }
    if provenance is not None:
        doc["provenance"] = provenance
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")


def load_network(path: str | Path):
    doc = json.loads(Path(path).read_text())
    net = Network(
        w=np.array(doc["w"], dtype=float),
        v=np.array(doc["v"], dtype=float),
        mask_w=np.array(doc["mask_w"], dtype=float),
        mask_v=np.array(doc["mask_v"], dtype=float),
    )
    params = None
    if "params" in doc:
        params = ObjectiveParams(**doc["params"])
    return net, params, doc.get("provenance")
