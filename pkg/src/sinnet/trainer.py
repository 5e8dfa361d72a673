"""Loss families, Adam training loop, metrics and training diagnostics.

Tasks: direct signal fitting, derivative (gradient/Laplacian) supervision,
and Burgers parameter identification with trainable (lambda1, lambda2) on the
residual u_t + lambda1 u u_x - lambda2 u_xx. All parameters live in one flat
vector during training (weights stored input-major per layer, then biases),
which keeps the Adam update a handful of vector ops and lets the fused
kernels in _cores run without per-layer bookkeeping.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import _cores
from .autodiff import ParamGradient, _layer_scales
from .burgers import PdeDataset
from .network import SinusoidalNetwork

__all__ = [
    "Task",
    "TrainConfig",
    "TrainReport",
    "LossResult",
    "EvalMetrics",
    "DivergenceError",
    "compute_loss",
    "train",
    "evaluate",
    "spectral_norm",
]


class Task(Enum):
    FIT = "fit"
    POISSON_GRAD = "poisson_grad"
    POISSON_LAP = "poisson_lap"
    BURGERS_IDENT = "burgers_ident"


@dataclass(frozen=True)
class TrainConfig:
    task: Task
    steps: int
    learning_rate: float
    first_layer_lr: float | None = None
    batch_size: int | None = None
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    seed: int = 0
    eval_every: int = 100
    spectral_norm_every: int = 100

    def __post_init__(self) -> None:
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if self.first_layer_lr is not None and not self.first_layer_lr > 0:
            raise ValueError("first_layer_lr must be positive")
        if self.batch_size is not None and self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


@dataclass
class TrainReport:
    """Loss trajectory, final metrics, identified PDE parameters and the
    first-layer spectral-norm trace."""

    loss_history: list[tuple[int, float, float | None]]
    final_mse: float
    final_psnr: float
    identified_params: tuple[float, float] | None = None
    first_layer_spectral_norm_history: list[tuple[int, float]] = field(default_factory=list)
    diverged: bool = False

    def to_json_dict(self) -> dict:
        return {
            "loss_history": [
                [s, tr] if te is None else [s, tr, te] for s, tr, te in self.loss_history
            ],
            "final_metrics": {"mse": self.final_mse, "psnr": self.final_psnr},
            "identified_params": (
                None
                if self.identified_params is None
                else {"lambda1": self.identified_params[0], "lambda2": self.identified_params[1]}
            ),
            "first_layer_spectral_norm_history": [
                [s, v] for s, v in self.first_layer_spectral_norm_history
            ],
            "diverged": self.diverged,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_json_dict(), **kwargs)


class DivergenceError(RuntimeError):
    """Training loss became non-finite; carries the report up to that step."""

    def __init__(self, step: int, report: TrainReport):
        super().__init__(f"training diverged at step {step}")
        self.step = step
        self.report = report


@dataclass(frozen=True)
class LossResult:
    loss: float
    param_grads: ParamGradient
    aux: dict | None = None


@dataclass(frozen=True)
class EvalMetrics:
    mse: float
    psnr: float


# ---------------------------------------------------------------------------
# flat parameter packing


def _pack(net: SinusoidalNetwork):
    widths = np.asarray(net.config.layer_widths, dtype=np.int64)
    scales = np.asarray(_layer_scales(net), dtype=np.float64)
    w_off = np.zeros(net.n_layers, dtype=np.int64)
    b_off = np.zeros(net.n_layers, dtype=np.int64)
    pos = 0
    for l in range(net.n_layers):
        w_off[l] = pos
        pos += widths[l] * widths[l + 1]
        b_off[l] = pos
        pos += widths[l + 1]
    flat = np.empty(pos)
    for l in range(net.n_layers):
        flat[w_off[l] : b_off[l]] = net.weights[l].T.ravel()
        flat[b_off[l] : b_off[l] + widths[l + 1]] = net.biases[l]
    return flat, w_off, b_off, widths, scales


def _unpack(net: SinusoidalNetwork, flat, w_off, b_off, widths):
    weights, biases = [], []
    for l in range(net.n_layers):
        wt = flat[w_off[l] : b_off[l]].reshape(widths[l], widths[l + 1])
        weights.append(np.ascontiguousarray(wt.T))
        biases.append(flat[b_off[l] : b_off[l] + widths[l + 1]].copy())
    return net.with_params(weights, biases)


def _grad_to_param_gradient(net: SinusoidalNetwork, flat_grad, w_off, b_off, widths) -> ParamGradient:
    gw, gb = [], []
    for l in range(net.n_layers):
        gw.append(np.ascontiguousarray(flat_grad[w_off[l] : b_off[l]].reshape(widths[l], widths[l + 1]).T))
        gb.append(flat_grad[b_off[l] : b_off[l] + widths[l + 1]].copy())
    return ParamGradient(gw, gb)


# ---------------------------------------------------------------------------
# loss dispatch


def _prepare_fit_batch(net, batch):
    x, y = batch
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64)
    if y.ndim == 1:
        y = y[:, None]
    if x.shape[1] != net.config.input_dim or y.shape != (len(x), net.config.output_dim):
        raise ValueError("batch shapes do not match the network")
    return x, y


def _scalar_output_required(net):
    if net.config.output_dim != 1:
        raise ValueError("derivative-supervised tasks require output_dim=1")


def _jet_args(net, x):
    lam = np.asarray(net.config.per_axis_scale)
    x_scaled = np.ascontiguousarray(x * lam)
    d1_seed = np.diag(lam)
    return x_scaled, d1_seed


def _loss_and_grad(task: Task, net: SinusoidalNetwork, batch, lambdas=(0.0, 0.0)):
    flat, w_off, b_off, widths, scales = _pack(net)
    lam_vec = np.asarray(net.config.per_axis_scale)
    if task is Task.FIT:
        x, y = _prepare_fit_batch(net, batch)
        loss, grad = _cores.fit_core(flat, w_off, b_off, widths, scales, np.ascontiguousarray(x * lam_vec), y)
        return float(loss), grad, None, (flat, w_off, b_off, widths, scales)
    _scalar_output_required(net)
    if task is Task.POISSON_GRAD:
        x, g = batch
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        g = np.atleast_2d(np.asarray(g, dtype=np.float64))
        if g.shape != x.shape:
            raise ValueError("gradient targets must match input shape")
        xs, seed = _jet_args(net, x)
        loss, *_rest, grad = _cores.jet_core(
            flat, w_off, b_off, widths, scales, xs, seed, 1, g, np.zeros(len(x)), 0.0, 0.0
        )
        return float(loss), grad, None, (flat, w_off, b_off, widths, scales)
    if task is Task.POISSON_LAP:
        x, t = batch
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        t = np.asarray(t, dtype=np.float64).ravel()
        if len(t) != len(x):
            raise ValueError("laplacian targets must match batch length")
        xs, seed = _jet_args(net, x)
        loss, *_rest, grad = _cores.jet_core(
            flat, w_off, b_off, widths, scales, xs, seed, 2, np.zeros_like(x), t, 0.0, 0.0
        )
        return float(loss), grad, None, (flat, w_off, b_off, widths, scales)
    if task is Task.BURGERS_IDENT:
        if net.config.input_dim != 2:
            raise ValueError("Burgers identification requires input_dim=2 (t, x)")
        if not isinstance(batch, PdeDataset):
            raise ValueError("BURGERS_IDENT expects a PdeDataset batch")
        dataset: PdeDataset = batch
        xs, seed = _jet_args(net, dataset.points)
        lam1, lam2 = float(lambdas[0]), float(lambdas[1])
        loss, data_mse, res_mse, g1, g2, grad = _cores.jet_core(
            flat, w_off, b_off, widths, scales, xs, seed, 3,
            np.zeros_like(dataset.points), dataset.u, lam1, lam2,
        )
        aux = {
            "data_mse": float(data_mse),
            "residual_mse": float(res_mse),
            "grad_lambda1": float(g1),
            "grad_lambda2": float(g2),
        }
        return float(loss), grad, aux, (flat, w_off, b_off, widths, scales)
    raise ValueError(f"unknown task {task}")


def compute_loss(task: Task, net: SinusoidalNetwork, batch, lambdas=(0.0, 0.0)) -> LossResult:
    """Loss and exact parameter gradients for one batch of the given task.

    For BURGERS_IDENT the batch is a PdeDataset and ``lambdas`` supplies the
    current residual coefficients; their gradients land in ``aux``.
    """
    loss, grad, aux, meta = _loss_and_grad(task, net, batch, lambdas)
    flat, w_off, b_off, widths, scales = meta
    return LossResult(loss=loss, param_grads=_grad_to_param_gradient(net, grad, w_off, b_off, widths), aux=aux)


# ---------------------------------------------------------------------------
# metrics and diagnostics


def evaluate(net: SinusoidalNetwork, points, targets) -> EvalMetrics:
    """MSE and PSNR (-10 log10 mse, +inf for an exact fit) over a point set."""
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    targets = np.asarray(targets, dtype=np.float64)
    if targets.ndim == 1:
        targets = targets[:, None]
    if len(points) == 0:
        raise ValueError("evaluate requires a non-empty point set")
    preds = _forward_chunked(net, points)
    mse = float(np.mean((preds - targets) ** 2))
    psnr = math.inf if mse == 0.0 else -10.0 * math.log10(mse)
    return EvalMetrics(mse=mse, psnr=psnr)


def _forward_chunked(net: SinusoidalNetwork, points: np.ndarray, chunk: int = 65536) -> np.ndarray:
    flat, w_off, b_off, widths, scales = _pack(net)
    lam = np.asarray(net.config.per_axis_scale)
    outs = []
    for start in range(0, len(points), chunk):
        xs = np.ascontiguousarray(points[start : start + chunk] * lam)
        outs.append(_cores.fit_forward(flat, w_off, b_off, widths, scales, xs))
    return np.concatenate(outs, axis=0)


def spectral_norm(matrix: np.ndarray, iterations: int = 20, tol: float = 1e-6) -> float:
    """Largest singular value by power iteration on M^T M."""
    m = np.asarray(matrix, dtype=np.float64)
    rng = np.random.default_rng(0)
    v = rng.standard_normal(m.shape[1])
    v /= np.linalg.norm(v)
    sigma = 0.0
    for _ in range(iterations):
        u = m @ v
        nu = np.linalg.norm(u)
        if nu == 0.0:
            return 0.0
        v = m.T @ (u / nu)
        new_sigma = np.linalg.norm(v)
        v = v / new_sigma if new_sigma > 0 else v
        if abs(new_sigma - sigma) <= tol * max(new_sigma, 1e-30):
            sigma = new_sigma
            break
        sigma = new_sigma
    return float(sigma)


# ---------------------------------------------------------------------------
# training


def _task_arrays(task: Task, net: SinusoidalNetwork, data):
    """Full-dataset arrays (inputs, targets) in the task's core layout."""
    if task is Task.FIT:
        x, y = _prepare_fit_batch(net, data)
        return x, y
    if task in (Task.POISSON_GRAD, Task.POISSON_LAP):
        x, t = data
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        t = np.asarray(t, dtype=np.float64)
        return x, t
    if task is Task.BURGERS_IDENT:
        if not isinstance(data, PdeDataset):
            raise ValueError("BURGERS_IDENT expects a PdeDataset")
        return data.points, data.u
    raise ValueError(f"unknown task {task}")


def train(
    net: SinusoidalNetwork,
    config: TrainConfig,
    data,
    test_data=None,
) -> tuple[SinusoidalNetwork, TrainReport]:
    """Adam-train a network on a task; deterministic for a fixed config seed.

    Returns the trained network and its report. Divergence (non-finite loss)
    raises DivergenceError carrying the partial report. The first layer can
    use a separate learning rate; Burgers lambda coefficients always use the
    main rate and start at 0.
    """
    task = config.task
    x_all, t_all = _task_arrays(task, net, data)
    n_points = len(x_all)
    flat, w_off, b_off, widths, scales = _pack(net)
    lam_vec = np.asarray(net.config.per_axis_scale)
    xs_all = np.ascontiguousarray(x_all * lam_vec)
    d1_seed = np.diag(lam_vec)

    lambdas = np.zeros(2)
    track_lambdas = task is Task.BURGERS_IDENT
    if task is not Task.FIT:
        _scalar_output_required(net)

    lr = np.full(flat.shape, config.learning_rate)
    if config.first_layer_lr is not None:
        lr[w_off[0] : b_off[0] + widths[1]] = config.first_layer_lr

    m = np.zeros_like(flat)
    v = np.zeros_like(flat)
    m_lam = np.zeros(2)
    v_lam = np.zeros(2)
    b1, b2, eps = config.adam_beta1, config.adam_beta2, config.adam_eps

    rng = np.random.default_rng(np.uint64(config.seed))
    batch = config.batch_size if config.batch_size is not None else n_points
    batch = min(batch, n_points)
    order = np.arange(n_points)
    cursor = n_points  # force initial shuffle when mini-batching

    history: list[tuple[int, float, float | None]] = []
    norms: list[tuple[int, float]] = []

    def record_norm(step):
        w1 = flat[w_off[0] : b_off[0]].reshape(widths[0], widths[1])
        norms.append((step, spectral_norm(w1.T)))

    def run_core(xs, tgt):
        if task is Task.FIT:
            loss, grad = _cores.fit_core(flat, w_off, b_off, widths, scales, xs, tgt)
            return float(loss), grad, 0.0, 0.0
        mode = {Task.POISSON_GRAD: 1, Task.POISSON_LAP: 2, Task.BURGERS_IDENT: 3}[task]
        if mode == 1:
            g_t, t_t = np.ascontiguousarray(tgt), np.zeros(len(xs))
        else:
            g_t, t_t = np.zeros_like(xs), np.ascontiguousarray(tgt)
        loss, _d, _r, g1, g2, grad = _cores.jet_core(
            flat, w_off, b_off, widths, scales, xs, d1_seed, mode, g_t, t_t, lambdas[0], lambdas[1]
        )
        return float(loss), grad, float(g1), float(g2)

    def partial_report(diverged=False):
        return TrainReport(
            loss_history=history,
            final_mse=float("nan"),
            final_psnr=float("nan"),
            identified_params=(float(lambdas[0]), float(lambdas[1])) if track_lambdas else None,
            first_layer_spectral_norm_history=norms,
            diverged=diverged,
        )

    record_norm(0)
    for step in range(config.steps):
        if batch < n_points:
            if cursor + batch > n_points:
                order = rng.permutation(n_points)
                cursor = 0
            idx = order[cursor : cursor + batch]
            cursor += batch
            xs, tgt = np.ascontiguousarray(xs_all[idx]), np.ascontiguousarray(t_all[idx])
        else:
            xs, tgt = xs_all, t_all
        loss, grad, g1, g2 = run_core(xs, tgt)
        if not math.isfinite(loss):
            raise DivergenceError(step, partial_report(diverged=True))

        test_loss = None
        if test_data is not None and (step % config.eval_every == 0 or step == config.steps - 1):
            test_loss = evaluate(_unpack(net, flat, w_off, b_off, widths), test_data[0], test_data[1]).mse
        history.append((step, loss, test_loss))

        t = step + 1
        m *= b1
        m += (1 - b1) * grad
        v *= b2
        v += (1 - b2) * grad * grad
        mhat = m / (1 - b1**t)
        vhat = v / (1 - b2**t)
        flat -= lr * mhat / (np.sqrt(vhat) + eps)
        if track_lambdas:
            g_lam = np.array([g1, g2])
            m_lam = b1 * m_lam + (1 - b1) * g_lam
            v_lam = b2 * v_lam + (1 - b2) * g_lam * g_lam
            lambdas = lambdas - config.learning_rate * (m_lam / (1 - b1**t)) / (
                np.sqrt(v_lam / (1 - b2**t)) + eps
            )
        if (step + 1) % config.spectral_norm_every == 0:
            record_norm(step + 1)

    trained = _unpack(net, flat, w_off, b_off, widths)
    final_loss, *_ = run_core(xs_all, t_all)
    if task is Task.FIT:
        metrics = evaluate(trained, x_all, t_all)
    elif task is Task.BURGERS_IDENT:
        metrics = evaluate(trained, x_all, t_all)
    else:
        metrics = EvalMetrics(mse=final_loss, psnr=math.inf if final_loss == 0 else -10 * math.log10(final_loss))
    history.append((config.steps, final_loss, None if test_data is None else evaluate(trained, test_data[0], test_data[1]).mse))
    report = TrainReport(
        loss_history=history,
        final_mse=metrics.mse,
        final_psnr=metrics.psnr,
        identified_params=(float(lambdas[0]), float(lambdas[1])) if track_lambdas else None,
        first_layer_spectral_norm_history=norms,
    )
    return trained, report
