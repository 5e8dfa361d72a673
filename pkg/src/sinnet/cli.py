"""Command-line surface: kernel tables, spectral analysis, omega suggestion,
training runs and signal generation. Plot-ready data is emitted as CSV; run
reports as JSON with a ``config`` echo block so every output is
self-describing. Outputs are byte-reproducible for fixed flags and seed.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .autodiff import input_jet
from .burgers import PdeDataset, QuadratureError, burgers_fields, make_burgers_dataset
from .config import InitScheme, NetworkConfig, Parametrization
from .empirical import EstimatorConfig, empirical_ntk_gram
from .kernels import KernelFamily, KernelSpec, kernel_slice, nngp, ntk
from .network import activation_stats, init_network
from .signals import (
    Signal,
    SignalFormat,
    SignalFormatError,
    TruncatedPayloadError,
    UnsupportedDepthError,
    checkerboard_split,
    load_signal,
    synth_separable_cosines,
    synth_two_frequency,
    write_csv_curve,
    write_csv_grid,
    write_pgm,
)
from .spectral import lowpass_loss_curve, suggest_omega
from .trainer import DivergenceError, Task, TrainConfig, evaluate, train

USAGE_ERROR, DATA_ERROR, NUMERICAL_ERROR = 1, 2, 3


class _Parser(argparse.ArgumentParser):
    """argparse variant whose usage failures exit with code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def _family(name: str) -> KernelFamily:
    try:
        return KernelFamily(name.lower())
    except ValueError:
        raise ValueError(f"--family must be 'ssn' or 'siren', got {name!r}") from None


def _scheme(name: str, c: float) -> InitScheme:
    if name.lower() == "ssn":
        return InitScheme.ssn_normal()
    if name.lower() == "siren":
        return InitScheme.siren_uniform(c)
    raise ValueError(f"--scheme must be 'ssn' or 'siren', got {name!r}")


def _load_input_signal(args) -> Signal:
    if getattr(args, "two_freq", None):
        return synth_two_frequency(args.two_freq)
    if getattr(args, "cosines", None):
        terms = []
        for term in args.cosines.split(";"):
            amp, kx, ky = term.split(",")
            terms.append((float(amp), int(kx), int(ky)))
        return synth_separable_cosines(args.n, terms)
    if not getattr(args, "input", None):
        raise ValueError("provide --input FILE or a synthetic source (--two-freq N)")
    path = Path(args.input)
    suffix = path.suffix.lower()
    fmt = {".pgm": SignalFormat.PGM, ".wav": SignalFormat.WAV, ".csv": SignalFormat.CSV_GRID}.get(suffix)
    if fmt is None:
        raise ValueError(f"--input {path}: unsupported extension {suffix!r} (use .pgm/.wav/.csv)")
    return load_signal(path, fmt)


def _json_out(payload: dict, path: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if path:
        Path(path).write_text(text + "\n")
    else:
        print(text)


def _echo_config(args, keys) -> dict:
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}


# ---------------------------------------------------------------------------
# subcommands


def _cmd_init_stats(args) -> int:
    scheme = _scheme(args.scheme, args.c)
    cfg = NetworkConfig(
        input_dim=1,
        hidden_widths=tuple([args.width] * args.depth),
        output_dim=1,
        omega=args.omega,
        init_scheme=scheme,
        seed=args.seed,
    )
    net = init_network(cfg)
    xs = np.linspace(-1.0, 1.0, args.batch)[:, None] + args.shift
    stats = activation_stats(net, xs)
    rows = [
        (l + 1, s.pre_mean, s.pre_var, s.post_mean, s.post_var)
        for l, s in enumerate(stats)
    ]
    write_csv_curve(rows, ["layer", "pre_mean", "pre_var", "post_mean", "post_var"], args.out)
    return 0


def _cmd_kernel(args) -> int:
    spec = KernelSpec(_family(args.family), args.depth, args.omega, args.c)
    offsets = np.linspace(-args.range, args.range, args.points)
    center = np.full(args.dim, args.center)
    slc = kernel_slice(spec, center, offsets, kind=args.kind)
    write_csv_curve(zip(offsets, slc.values), ["offset", "value"], args.out)
    return 0


def _cmd_kernel_empirical(args) -> int:
    spec = KernelSpec(_family(args.family), args.depth, args.omega, args.c)
    scheme = (
        InitScheme.ssn_normal() if spec.family is KernelFamily.SSN else InitScheme.siren_uniform(args.c)
    )
    cfg = NetworkConfig(
        input_dim=1,
        hidden_widths=tuple([args.width] * args.depth),
        output_dim=1,
        omega=args.omega,
        init_scheme=scheme,
        parametrization=Parametrization.NTK,
    )
    est = EstimatorConfig(width=args.width, n_draws=args.draws, base_seed=args.seed)
    grid = np.linspace(-1.0, 1.0, args.points)[:, None]
    mean, stderr = empirical_ntk_gram(cfg, est, grid)
    rows = []
    for i, x in enumerate(grid[:, 0]):
        analytic = ntk(spec, [x], [x])
        rows.append((x, analytic, mean[i, i], stderr[i, i]))
    write_csv_curve(rows, ["x", "analytic_ntk", "empirical_mean", "empirical_stderr"], args.out)
    return 0


def _cmd_spectrum(args) -> int:
    signal = _load_input_signal(args)
    cutoffs = [float(c) for c in args.cutoffs.split(",")]
    curve = lowpass_loss_curve(signal, cutoffs)
    write_csv_curve(curve, ["cutoff", "mse"], args.out)
    return 0


def _cmd_suggest_omega(args) -> int:
    if args.grid:
        counts = [int(t) for t in args.grid.lower().split("x")]
        suggestion = suggest_omega(counts, divisor=args.divisor)
        source = {"grid": counts}
    elif args.random is not None:
        if not args.extents:
            raise ValueError("--random needs --extents a,b,...")
        extents = [float(t) for t in args.extents.split(",")]
        suggestion = suggest_omega(None, n_random_points=args.random, axis_extents=extents, divisor=args.divisor)
        source = {"random_points": args.random, "extents": extents}
    else:
        raise ValueError("provide --grid HxWx... or --random N --extents a,b,...")
    _json_out(
        {
            "config": {**source, "divisor": args.divisor},
            "omega": suggestion.omega,
            "per_axis_scale": list(suggestion.per_axis_scale),
            "max_freq_per_axis": list(suggestion.max_freq_per_axis),
        },
        args.out,
    )
    return 0


def _make_net(args, input_dim: int, omega: float) -> NetworkConfig:
    return NetworkConfig(
        input_dim=input_dim,
        hidden_widths=tuple([args.width] * args.depth),
        output_dim=1,
        omega=omega,
        init_scheme=_scheme(args.scheme, args.c),
        seed=args.seed,
    )


def _train_config(args, task: Task) -> TrainConfig:
    return TrainConfig(
        task=task,
        steps=args.steps,
        learning_rate=args.lr,
        first_layer_lr=args.first_layer_lr,
        batch_size=args.batch_size,
        seed=args.seed,
    )


def _resolve_omega(args, signal: Signal) -> float:
    if args.omega is not None:
        return args.omega
    return suggest_omega(list(signal.axis_sizes)).omega


def _reconstruct(net, signal: Signal, path: str) -> None:
    coords = signal.coordinate_grid()
    from .trainer import _forward_chunked

    values = _forward_chunked(net, coords)[:, 0]
    write_pgm(Signal(axis_sizes=signal.axis_sizes, values=np.clip(values, 0.0, 1.0)), path)


def _report_payload(args, report, extra=None) -> dict:
    payload = {
        "config": _echo_config(
            args,
            ["input", "two_freq", "omega", "width", "depth", "scheme", "steps", "lr", "batch_size", "seed"],
        ),
        "report": report.to_json_dict(),
    }
    if extra:
        payload.update(extra)
    return payload


def _cmd_fit(args) -> int:
    signal = _load_input_signal(args)
    omega = _resolve_omega(args, signal)
    net = init_network(_make_net(args, len(signal.axis_sizes), omega))
    coords = signal.coordinate_grid()
    trained, report = train(net, _train_config(args, Task.FIT), (coords, signal.values))
    if args.recon:
        if len(signal.axis_sizes) != 2:
            raise ValueError("--recon requires a 2D signal")
        _reconstruct(trained, signal, args.recon)
    _json_out(_report_payload(args, report, {"resolved_omega": omega}), args.out)
    return 0


def _cmd_split_fit(args) -> int:
    signal = _load_input_signal(args)
    omega = _resolve_omega(args, signal)
    (train_pts, train_vals), (test_pts, test_vals), _mask = checkerboard_split(signal)
    net = init_network(_make_net(args, len(signal.axis_sizes), omega))
    trained, report = train(
        net, _train_config(args, Task.FIT), (train_pts, train_vals), test_data=(test_pts, test_vals)
    )
    test_metrics = evaluate(trained, test_pts, test_vals)
    if args.recon:
        if len(signal.axis_sizes) != 2:
            raise ValueError("--recon requires a 2D signal")
        _reconstruct(trained, signal, args.recon)
    _json_out(
        _report_payload(
            args,
            report,
            {"resolved_omega": omega, "test_metrics": {"mse": test_metrics.mse, "psnr": test_metrics.psnr}},
        ),
        args.out,
    )
    return 0


def _grid_derivative_targets(signal: Signal, kind: str) -> np.ndarray:
    """Central finite differences of a 2D grid in normalized coordinates."""
    grid = signal.grid()
    steps = [2.0 / n for n in signal.axis_sizes]
    gx, gy = np.gradient(grid, *steps, edge_order=2)
    if kind == "grad":
        return np.stack([gx.ravel(), gy.ravel()], axis=1)
    gxx = np.gradient(gx, steps[0], axis=0, edge_order=2)
    gyy = np.gradient(gy, steps[1], axis=1, edge_order=2)
    return (gxx + gyy).ravel()


def _cmd_poisson(args) -> int:
    signal = _load_input_signal(args)
    if len(signal.axis_sizes) != 2:
        raise ValueError("poisson supervision requires a 2D signal")
    omega = _resolve_omega(args, signal)
    net = init_network(_make_net(args, 2, omega))
    coords = signal.coordinate_grid()
    task = Task.POISSON_GRAD if args.target == "grad" else Task.POISSON_LAP
    targets = _grid_derivative_targets(signal, args.target)
    trained, report = train(net, _train_config(args, task), (coords, targets))
    from .trainer import _forward_chunked

    preds = _forward_chunked(trained, coords)[:, 0]
    shifted = preds - preds.mean() + signal.values.mean()
    recon_mse = float(np.mean((shifted - signal.values) ** 2))
    corr = float(np.corrcoef(preds, signal.values)[0, 1])
    if args.recon:
        lo, hi = shifted.min(), shifted.max()
        scaled = (shifted - lo) / (hi - lo) if hi > lo else shifted * 0
        write_pgm(Signal(axis_sizes=signal.axis_sizes, values=scaled), args.recon)
    _json_out(
        _report_payload(
            args,
            report,
            {"resolved_omega": omega, "reconstruction": {"mse_up_to_constant": recon_mse, "pearson_r": corr}},
        ),
        args.out,
    )
    return 0


def _cmd_pinn_burgers(args) -> int:
    dataset = make_burgers_dataset(n=args.samples, seed=args.seed)
    cfg = NetworkConfig(
        input_dim=2,
        hidden_widths=tuple([args.width] * args.depth),
        output_dim=1,
        omega=args.omega,
        seed=args.seed,
    )
    net = init_network(cfg)
    trained, report = train(net, _train_config(args, Task.BURGERS_IDENT), dataset)
    lam1, lam2 = report.identified_params
    truth1, truth2 = dataset.lambda1, dataset.lambda2
    t_grid = np.linspace(0.0, 1.0, 100)
    x_grid = np.linspace(-1.0, 1.0, 256)
    tt = np.repeat(t_grid, len(x_grid))
    xx = np.tile(x_grid, len(t_grid))
    u_true = burgers_fields(tt, xx, order=0)
    metrics = evaluate(trained, np.stack([tt, xx], axis=1), u_true)
    _json_out(
        {
            "config": _echo_config(args, ["samples", "omega", "width", "depth", "steps", "lr", "seed"]),
            "report": report.to_json_dict(),
            "identified": {"lambda1": lam1, "lambda2": lam2},
            "errors_percent": {
                "lambda1": abs(lam1 - truth1) / abs(truth1) * 100.0,
                "lambda2": abs(lam2 - truth2) / abs(truth2) * 100.0,
            },
            "solution_mse": metrics.mse,
        },
        args.out,
    )
    return 0


def _cmd_gen_signal(args) -> int:
    if args.kind == "two-freq":
        signal = synth_two_frequency(args.n)
    elif args.kind == "cosines":
        if not args.terms:
            raise ValueError("--kind cosines needs --terms 'amp,kx,ky;...'")
        terms = []
        for term in args.terms.split(";"):
            amp, kx, ky = term.split(",")
            terms.append((float(amp), int(kx), int(ky)))
        signal = synth_separable_cosines(args.n, terms)
    else:
        raise ValueError(f"unknown --kind {args.kind!r}")
    out = Path(args.out)
    if out.suffix.lower() == ".pgm":
        values = signal.values
        lo, hi = values.min(), values.max()
        scaled = (values - lo) / (hi - lo) if hi > lo else values * 0
        write_pgm(Signal(axis_sizes=signal.axis_sizes, values=scaled), out)
    elif out.suffix.lower() == ".csv":
        write_csv_grid(signal, out)
    else:
        raise ValueError(f"--out {out}: use a .pgm or .csv extension")
    return 0


# ---------------------------------------------------------------------------
# parser assembly


def _add_net_flags(p, default_omega=None):
    p.add_argument("--omega", type=float, default=default_omega, help="frequency factor (default: Nyquist/8 heuristic)")
    p.add_argument("--width", type=int, default=256)
    p.add_argument("--depth", type=int, default=5, help="hidden layer count")
    p.add_argument("--scheme", default="ssn", help="init scheme: ssn | siren")
    p.add_argument("--c", type=float, default=float(np.sqrt(6.0)), help="SIREN uniform bound")
    p.add_argument("--steps", type=int, default=2000)
    p.add_argument("--lr", type=float, default=3e-3)
    p.add_argument("--first-layer-lr", type=float, default=None)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)


def _add_signal_flags(p):
    p.add_argument("--input", help="signal file (.pgm, .wav, .csv)")
    p.add_argument("--two-freq", type=int, default=None, metavar="N", help="use the synthetic two-frequency NxN image")
    p.add_argument("--cosines", default=None, help="synthetic 'amp,kx,ky;...' cosine mix")
    p.add_argument("--n", type=int, default=512, help="synthetic grid samples per axis")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sinnet", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init-stats", parents=[], help="activation statistics per layer to CSV")
    p.add_argument("--width", type=int, default=2048)
    p.add_argument("--depth", type=int, default=6)
    p.add_argument("--omega", type=float, default=2.0)
    p.add_argument("--batch", type=int, default=256)
    p.add_argument("--shift", type=float, default=0.0, help="constant added to all inputs")
    p.add_argument("--scheme", default="ssn")
    p.add_argument("--c", type=float, default=float(np.sqrt(6.0)))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_init_stats)

    p = sub.add_parser("kernel", help="analytic kernel slice to CSV")
    p.add_argument("--family", required=True)
    p.add_argument("--depth", type=int, default=1)
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--c", type=float, default=float(np.sqrt(6.0)))
    p.add_argument("--center", type=float, default=0.0)
    p.add_argument("--range", type=float, default=1.0)
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--kind", default="ntk", choices=["ntk", "nngp"])
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_kernel)

    p = sub.add_parser("kernel-empirical", help="finite-width estimate vs analytic kernel to CSV")
    p.add_argument("--family", default="ssn")
    p.add_argument("--depth", type=int, default=1)
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--c", type=float, default=float(np.sqrt(6.0)))
    p.add_argument("--width", type=int, default=4096)
    p.add_argument("--draws", type=int, default=16)
    p.add_argument("--points", type=int, default=21)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_kernel_empirical)

    p = sub.add_parser("spectrum", help="low-pass reconstruction loss curve to CSV")
    _add_signal_flags(p)
    p.add_argument("--cutoffs", required=True, help="comma-separated cutoff frequencies")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_spectrum)

    p = sub.add_parser("suggest-omega", help="Nyquist-based omega suggestion to JSON")
    p.add_argument("--grid", help="axis sample counts, e.g. 512x512")
    p.add_argument("--random", type=int, default=None, help="random sample count")
    p.add_argument("--extents", help="axis extents for --random, e.g. 100,50,200")
    p.add_argument("--divisor", type=float, default=8.0)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_suggest_omega)

    p = sub.add_parser("fit", help="fit a signal; JSON report (+ optional PGM reconstruction)")
    _add_signal_flags(p)
    _add_net_flags(p)
    p.add_argument("--recon", help="write reconstruction PGM here")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_fit)

    p = sub.add_parser("split-fit", help="checkerboard-split generalization fit")
    _add_signal_flags(p)
    _add_net_flags(p)
    p.add_argument("--recon", help="write reconstruction PGM here")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_split_fit)

    p = sub.add_parser("poisson", help="derivative-supervised fit of an image")
    _add_signal_flags(p)
    _add_net_flags(p)
    p.add_argument("--target", default="grad", choices=["grad", "lap"])
    p.add_argument("--recon", help="write normalized reconstruction PGM here")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_poisson)

    p = sub.add_parser("pinn-burgers", help="Burgers parameter identification from oracle data")
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--omega", type=float, default=10.0)
    p.add_argument("--width", type=int, default=20)
    p.add_argument("--depth", type=int, default=8, help="hidden layer count")
    p.add_argument("--scheme", default="ssn")
    p.add_argument("--c", type=float, default=float(np.sqrt(6.0)))
    p.add_argument("--steps", type=int, default=40000)
    p.add_argument("--lr", type=float, default=2e-3)
    p.add_argument("--first-layer-lr", type=float, default=None)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_pinn_burgers)

    p = sub.add_parser("gen-signal", help="write a synthetic signal as PGM or CSV_GRID")
    p.add_argument("--kind", default="two-freq", choices=["two-freq", "cosines"])
    p.add_argument("--n", type=int, default=512)
    p.add_argument("--terms", help="for cosines: 'amp,kx,ky;...'")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_gen_signal)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except (SignalFormatError, TruncatedPayloadError, UnsupportedDepthError, FileNotFoundError) as exc:
        print(f"sinnet {args.command}: data error: {exc}", file=sys.stderr)
        return DATA_ERROR
    except (DivergenceError, QuadratureError, FloatingPointError) as exc:
        print(f"sinnet {args.command}: numerical failure: {exc}", file=sys.stderr)
        return NUMERICAL_ERROR
    except ValueError as exc:
        print(f"sinnet {args.command}: error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
