"""Hand-rolled differentiation over the fixed sine-MLP structure.

Reverse mode (``param_gradient``) supplies exact parameter gradients for
training and for the tangent-kernel estimator; forward mode (``input_jet``)
carries first and second input derivatives for derivative-supervised losses
and PDE residuals. Input dimensions are tiny (<= 3), so propagating jets is
cheap and exact to machine precision.

Every layer of either parametrization fits one template,

    z_l = scale_l * (in_l @ W_l^T + b_l),

with ``in_l`` the layer input after its activation rule. ``scale_l`` is omega
on the first layer (and on SIREN hidden layers), 1 elsewhere; the activation
pulls sin() for PRACTICAL and sin()/sqrt(n) for the NTK form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import InitFamily, Parametrization
from .network import SinusoidalNetwork, _as_batch


@dataclass(frozen=True)
class ParamGradient:
    """Per-layer gradient arrays, shapes mirroring the network's parameters."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def dot(self, other: "ParamGradient") -> float:
        """Euclidean inner product over all parameters."""
        total = 0.0
        for a, b in zip(self.weights, other.weights):
            total += float(np.tensordot(a, b, axes=2))
        for a, b in zip(self.biases, other.biases):
            total += float(a @ b)
        return total


@dataclass(frozen=True)
class Jet2:
    """Second-order Taylor data of one scalar output along declared axes.

    ``d1[i]`` is the partial along ``axes[i]``; ``d2[i, j]`` the second
    partial along ``(axes[i], axes[j])`` (symmetric). ``d2`` is None for
    order-1 jets.
    """

    value: float
    d1: np.ndarray
    d2: np.ndarray | None


def _layer_scales(net: SinusoidalNetwork) -> list[float]:
    cfg = net.config
    scales = [cfg.omega]
    siren = cfg.init_scheme.family is InitFamily.SIREN_UNIFORM
    practical = cfg.parametrization is Parametrization.PRACTICAL
    for l in range(1, net.n_layers):
        hidden = l < net.n_layers - 1
        scales.append(cfg.omega if (practical and siren and hidden) else 1.0)
    return scales


def _forward_trace(net: SinusoidalNetwork, xb: np.ndarray):
    """Per-layer inputs and pre-activations under the template form."""
    cfg = net.config
    lam = np.asarray(cfg.per_axis_scale)
    scales = _layer_scales(net)
    ntk = cfg.parametrization is Parametrization.NTK
    ins = [xb * lam]
    pres = []
    for l in range(net.n_layers):
        z = scales[l] * (ins[-1] @ net.weights[l].T + net.biases[l])
        pres.append(z)
        if l < net.n_layers - 1:
            a = np.sin(z)
            if ntk:
                a = a / np.sqrt(z.shape[1])
            ins.append(a)
    return ins, pres, scales


def param_gradient(net: SinusoidalNetwork, x: np.ndarray, output_index: int = 0) -> ParamGradient:
    """Exact gradient of one scalar output with respect to every parameter."""
    cfg = net.config
    if not 0 <= output_index < cfg.output_dim:
        raise ValueError(f"output_index {output_index} out of range for output_dim {cfg.output_dim}")
    xb, single = _as_batch(x, cfg.input_dim)
    if not single:
        raise ValueError("param_gradient takes a single input vector")
    ins, pres, scales = _forward_trace(net, xb)
    ntk = cfg.parametrization is Parametrization.NTK

    g_w = [np.empty(0)] * net.n_layers
    g_b = [np.empty(0)] * net.n_layers
    delta = np.zeros((1, cfg.output_dim))
    delta[0, output_index] = 1.0
    for l in reversed(range(net.n_layers)):
        g_w[l] = scales[l] * (delta.T @ ins[l])
        g_b[l] = scales[l] * delta[0]
        if l > 0:
            g_in = scales[l] * (delta @ net.weights[l])
            dadz = np.cos(pres[l - 1])
            if ntk:
                dadz = dadz / np.sqrt(pres[l - 1].shape[1])
            delta = g_in * dadz
    return ParamGradient(g_w, g_b)


def input_jet(
    net: SinusoidalNetwork, x: np.ndarray, axes: list[int], order: int = 2
) -> list[Jet2]:
    """First/second partials of every output along the chosen input axes.

    Returns one jet per output unit. ``order=1`` skips the second-derivative
    channels entirely.
    """
    cfg = net.config
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")
    axes = list(axes)
    if len(axes) == 0 or len(set(axes)) != len(axes):
        raise ValueError(f"axes must be non-empty and distinct, got {axes}")
    if any(a < 0 or a >= cfg.input_dim for a in axes):
        raise ValueError(f"axes {axes} out of range for input_dim {cfg.input_dim}")
    xb, single = _as_batch(x, cfg.input_dim)
    if not single:
        raise ValueError("input_jet takes a single input vector")

    lam = np.asarray(cfg.per_axis_scale)
    scales = _layer_scales(net)
    ntk = cfg.parametrization is Parametrization.NTK
    m = len(axes)
    pairs = [(i, j) for i in range(m) for j in range(i, m)] if order == 2 else []

    # seed channels at the (lambda-scaled) network input
    v = xb[0] * lam
    d1 = [np.zeros(cfg.input_dim) for _ in range(m)]
    for i, a in enumerate(axes):
        d1[i][a] = lam[a]
    d2 = [np.zeros(cfg.input_dim) for _ in pairs]

    for l in range(net.n_layers):
        w, b, s = net.weights[l], net.biases[l], scales[l]
        zv = s * (w @ v + b)
        zd1 = [s * (w @ t) for t in d1]
        zd2 = [s * (w @ t) for t in d2]
        if l == net.n_layers - 1:
            v, d1, d2 = zv, zd1, zd2
            break
        cos_z, sin_z = np.cos(zv), np.sin(zv)
        norm = 1.0 / np.sqrt(zv.shape[0]) if ntk else 1.0
        v = sin_z * norm
        d1 = [cos_z * t * norm for t in zd1]
        d2 = [
            (cos_z * zd2[k] - sin_z * zd1[i] * zd1[j]) * norm
            for k, (i, j) in enumerate(pairs)
        ]

    jets = []
    for out in range(cfg.output_dim):
        grad = np.array([d1[i][out] for i in range(m)])
        hess = None
        if order == 2:
            hess = np.zeros((m, m))
            for k, (i, j) in enumerate(pairs):
                hess[i, j] = hess[j, i] = d2[k][out]
        jets.append(Jet2(value=float(v[out]), d1=grad, d2=hess))
    return jets
