"""Sinusoidal network construction, forward evaluation and activation statistics.

Practical layer maps:

    SSN:    f1(x) = sin(W1(Ω⊙x) + ω·b1),   f_l(x) = sin(W_l x + b_l)
    SIREN:  f_l(x) = sin(ω(W_l x + b_l)) at every hidden layer
    output: affine, no sine

NTK-parametrized map (used by the kernel estimators):

    f0(x) = ω(W0(λ⊙x) + b0),   f_l = W_l·sin(f_{l-1})/√n_l + b_l
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import InitFamily, NetworkConfig, Parametrization


class SinusoidalNetwork:
    """Immutable sine MLP: a config plus per-layer weight/bias arrays.

    ``weights[l]`` has shape (n_{l+1}, n_l); ``biases[l]`` has shape (n_{l+1},).
    Safe for concurrent reads; construction freezes the arrays.
    """

    def __init__(self, config: NetworkConfig, weights: list[np.ndarray], biases: list[np.ndarray]):
        chain = config.layer_widths
        if len(weights) != len(chain) - 1 or len(biases) != len(chain) - 1:
            raise ValueError(f"expected {len(chain) - 1} layers, got {len(weights)}")
        for l, (w, b) in enumerate(zip(weights, biases)):
            if w.shape != (chain[l + 1], chain[l]):
                raise ValueError(f"layer {l} weight shape {w.shape} != {(chain[l + 1], chain[l])}")
            if b.shape != (chain[l + 1],):
                raise ValueError(f"layer {l} bias shape {b.shape} != {(chain[l + 1],)}")
        self.config = config
        self.weights = [np.ascontiguousarray(w, dtype=np.float64) for w in weights]
        self.biases = [np.ascontiguousarray(b, dtype=np.float64) for b in biases]
        for w, b in zip(self.weights, self.biases):
            w.flags.writeable = False
            b.flags.writeable = False

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    def with_params(self, weights: list[np.ndarray], biases: list[np.ndarray]) -> "SinusoidalNetwork":
        """New network with the same config and replaced parameters."""
        return SinusoidalNetwork(self.config, weights, biases)


def init_network(config: NetworkConfig) -> SinusoidalNetwork:
    """Sample a network's parameters; pure function of the config (incl. seed).

    PRACTICAL + SSN_NORMAL: W ~ N(0, 2/fan_in), b ~ N(0, 1).
    PRACTICAL + SIREN_UNIFORM(c): first layer W,b ~ U(-1/n, 1/n); later layers
    W,b ~ U(-sqrt(6/n)/omega, +sqrt(6/n)/omega), n the layer fan-in.
    NTK: W ~ N(0,1) (SSN) or U(-c, c) (SIREN); b ~ N(0,1); the 1/sqrt(n)
    scaling lives in the forward map, not in the samples.
    """
    rng = np.random.default_rng(np.uint64(config.seed))
    chain = config.layer_widths
    family = config.init_scheme.family
    weights: list[np.ndarray] = []
    biases: list[np.ndarray] = []
    for l in range(len(chain) - 1):
        fan_in, fan_out = chain[l], chain[l + 1]
        if config.parametrization is Parametrization.NTK:
            if family is InitFamily.SSN_NORMAL:
                w = rng.standard_normal((fan_out, fan_in))
            else:
                c = config.init_scheme.c
                w = rng.uniform(-c, c, (fan_out, fan_in))
            b = rng.standard_normal(fan_out)
        elif family is InitFamily.SSN_NORMAL:
            w = rng.normal(0.0, np.sqrt(2.0 / fan_in), (fan_out, fan_in))
            b = rng.standard_normal(fan_out)
        else:
            if l == 0:
                bound = 1.0 / fan_in
            else:
                bound = np.sqrt(6.0 / fan_in) / config.omega
            w = rng.uniform(-bound, bound, (fan_out, fan_in))
            b = rng.uniform(-bound, bound, fan_out)
        weights.append(w)
        biases.append(b)
    return SinusoidalNetwork(config, weights, biases)


def _as_batch(x: np.ndarray, input_dim: int) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != input_dim:
        raise ValueError(f"input has shape {x.shape}, expected (*, {input_dim})")
    return x, single


def preactivations(net: SinusoidalNetwork, x: np.ndarray) -> list[np.ndarray]:
    """Hidden-layer pre-sine values z_1..z_L for a batch, plus the output.

    Returns a list of length L+1: the L pre-sine arrays followed by the
    final affine output.
    """
    cfg = net.config
    xb, _ = _as_batch(x, cfg.input_dim)
    omega_vec = cfg.effective_omega
    pres: list[np.ndarray] = []
    if cfg.parametrization is Parametrization.NTK:
        h = cfg.omega * ((xb * (np.asarray(cfg.per_axis_scale))) @ net.weights[0].T + net.biases[0])
        pres.append(h)
        for l in range(1, net.n_layers):
            a = np.sin(pres[-1]) / np.sqrt(pres[-1].shape[1])
            h = a @ net.weights[l].T + net.biases[l]
            pres.append(h)
        return pres
    siren = cfg.init_scheme.family is InitFamily.SIREN_UNIFORM
    z = (xb * omega_vec) @ net.weights[0].T + cfg.omega * net.biases[0]
    pres.append(z)
    for l in range(1, net.n_layers):
        a = np.sin(pres[-1])
        z = a @ net.weights[l].T + net.biases[l]
        if siren and l < net.n_layers - 1:
            z = cfg.omega * z
        pres.append(z)
    return pres


def forward(net: SinusoidalNetwork, x: np.ndarray) -> np.ndarray:
    """Evaluate the network; accepts a single vector or a (batch, d) array."""
    _, single = _as_batch(x, net.config.input_dim)
    out = preactivations(net, x)[-1]
    return out[0] if single else out


@dataclass(frozen=True)
class LayerStats:
    pre_mean: float
    pre_var: float
    post_mean: float
    post_var: float
    pre_histogram: tuple[np.ndarray, np.ndarray]
    post_histogram: tuple[np.ndarray, np.ndarray]


def activation_stats(net: SinusoidalNetwork, inputs: np.ndarray, bins: int = 64) -> list[LayerStats]:
    """Pooled (batch x units) statistics of pre- and post-sine activations.

    One entry per hidden layer. Histograms are (counts, edges) pairs from
    numpy.histogram over the pooled values.
    """
    xb, _ = _as_batch(inputs, net.config.input_dim)
    if xb.shape[0] == 0:
        raise ValueError("activation_stats requires a non-empty batch")
    pres = preactivations(net, xb)[:-1]
    stats = []
    for z in pres:
        a = np.sin(z)
        stats.append(
            LayerStats(
                pre_mean=float(z.mean()),
                pre_var=float(z.var()),
                post_mean=float(a.mean()),
                post_var=float(a.var()),
                pre_histogram=np.histogram(z, bins=bins),
                post_histogram=np.histogram(a, bins=bins),
            )
        )
    return stats
