"""Command-line front end.

Subcommands::

    lyapflow train         --config c.ini [--out d] [--seed n] [--unsafe-alpha]
    lyapflow compare       --config c.ini ...   settling loss vs L1 vs L2
    lyapflow bound         --config c.ini ...   certificate only, no run
    lyapflow perturb-sweep --config c.ini ...   settle time vs noise level M
    lyapflow alpha-sweep   --config c.ini ...   stability across alpha values
    lyapflow gradcheck     --config c.ini ...   backprop vs finite differences

Exit codes: 0 success, 1 run failure (divergence, refused certificate,
failed check), 2 bad configuration or usage.

Artifacts land in --out (or run.out, or the working directory):
trajectory.csv, summary.kv, loss_curve.svg, curves.dat.  All outputs are
byte-deterministic for a fixed config and seed.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import datasets as ds_mod
from .bounds import GammaEstimate, estimate_gamma, settling_bound
from .config import ExperimentConfig, load_config
from .control import GainSchedule
from .dynamics import (
    EpochFlow,
    Integrator,
    StoppingRule,
    TheoryFlow,
    dataset_loss,
    integrate,
)
from .errors import ConfigError, GuaranteeError, LyapflowError
from .losses import L1Loss, L2Loss, LyapunovLoss
from .net import Activation, Mlp, forward, loss_gradient, sensitivities
from .svgplot import write_dat, write_svg

__all__ = ["main"]

_GRADCHECK_TOL = 1e-5


# ---------------------------------------------------------------- builders


def _build_dataset(cfg: ExperimentConfig):
    if cfg.data_source == "none":
        return None
    if cfg.data_source == "blobs":
        data = ds_mod.gen_blobs(cfg.seed, per_class=cfg.per_class,
                                separation=cfg.separation)
    elif cfg.data_source == "linreg":
        data = ds_mod.gen_linreg(cfg.seed, count=cfg.count, noise_sd=cfg.noise_sd)
    else:  # csv
        schema = ds_mod.CsvSchema(cfg.feature_cols, cfg.target_cols)
        data = ds_mod.load_csv(cfg.csv_path, schema)
    if cfg.normalize:
        data = ds_mod.normalize(data)
    return data


def _build_net(cfg: ExperimentConfig) -> Mlp:
    act = Activation.IDENTITY if cfg.output_activation == "identity" else Activation.SIGMOID
    if cfg.init == "zeros":
        return Mlp.zeros(cfg.layers, output_activation=act)
    return Mlp.random(cfg.layers, seed=cfg.seed, output_activation=act,
                      scale=cfg.init_scale)


def _resolve_law(cfg: ExperimentConfig, mlp: Mlp) -> str:
    if cfg.loss_kind != "lyapunov":
        return "baseline"
    if cfg.law != "auto":
        return cfg.law
    is_single = (mlp.n_layers == 1 and mlp.n_outputs == 1
                 and mlp.activations[-1] is Activation.SIGMOID)
    return "single_neuron" if is_single else "mlp"


def _build_loss(cfg: ExperimentConfig, law_kind: str, unsafe: bool,
                alpha: float | None = None):
    a = cfg.alpha if alpha is None else alpha
    try:
        if cfg.loss_kind == "l1":
            return L1Loss()
        if cfg.loss_kind == "l2":
            return L2Loss()
        if law_kind == "mlp":
            return LyapunovLoss.multilayer(a, cfg.beta, allow_unsafe_alpha=unsafe)
        return LyapunovLoss.single_neuron(a, allow_unsafe_alpha=unsafe)
    except ValueError as exc:
        raise ConfigError([f"loss: {exc}"])


def _build_mode(cfg: ExperimentConfig, dataset):
    if cfg.mode == "epoch":
        return EpochFlow(dataset)
    if cfg.sample_index is not None:
        x, y_star = dataset.sample(cfg.sample_index)
        return TheoryFlow(x, y_star)
    return TheoryFlow(np.array(cfg.x), np.array(cfg.y_star))


def _initial_loss(mlp: Mlp, mode, loss) -> float:
    if isinstance(mode, TheoryFlow):
        return loss.evaluate(forward(mlp, mode.x).y - mode.y_star)
    return dataset_loss(mlp, mode.dataset, loss)[0]


def _gamma_for(cfg: ExperimentConfig, mode) -> GammaEstimate:
    if cfg.gamma is not None:
        return GammaEstimate(cfg.gamma, source="user")
    inputs = mode.x[None, :] if isinstance(mode, TheoryFlow) else mode.dataset
    return estimate_gamma(inputs, source=cfg.gamma_source)


def _maybe_bound(cfg, mode, loss, gains, E0, spec=None):
    """Settling certificate for the run, or (None, reason)."""
    if not isinstance(loss, LyapunovLoss):
        return None, f"no certificate for {loss.name} loss"
    if E0 <= 0:
        return None, "already settled at t = 0"
    if spec is not None and spec.mode == "amplitude":
        return None, "amplitude-mode noise carries no certificate"
    flavor = cfg.flavor
    if flavor is None:
        if spec is not None:
            flavor = "perturbed"
        elif cfg.law == "mlp" or (cfg.law == "auto" and len(cfg.layers) > 2):
            flavor = "mlp"
        elif cfg.law == "auto" and (cfg.layers[-1] != 1
                                    or cfg.output_activation != "sigmoid"):
            flavor = "mlp"
        else:
            flavor = "single_neuron"
    try:
        gamma = _gamma_for(cfg, mode)
        M = spec.M if (flavor == "perturbed" and spec is not None) else None
        bound = settling_bound(E0, gains, gamma, loss, flavor=flavor, M=M)
    except (GuaranteeError, LyapflowError, ValueError) as exc:
        return None, str(exc)
    return bound, None


def _build_integrator(cfg: ExperimentConfig, bound) -> Integrator:
    dt = cfg.dt
    if dt is None:
        dt = bound.T / 1e5 if bound is not None else 1e-3
    return Integrator(method=cfg.method, dt=dt, t_max=cfg.t_max,
                      record_stride=cfg.record_stride,
                      step_budget=cfg.step_budget)


def _build_spec(cfg: ExperimentConfig, loss, m_override=None):
    from .perturb import PerturbationSpec

    if cfg.perturb_mode is None and m_override is None:
        return None
    mode = cfg.perturb_mode or "vanishing"
    alpha = cfg.perturb_alpha
    if alpha is None and mode == "vanishing":
        alpha = getattr(loss, "alpha", 0.7)
    return PerturbationSpec(
        mode=mode,
        M=cfg.perturb_m if m_override is None else m_override,
        alpha=alpha,
        seed=cfg.seed,
        redraw_every=cfg.redraw_every,
    )


# ---------------------------------------------------------------- output


def _write_kv(path, lines) -> None:
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _num(v) -> str:
    return repr(float(v))


def _traj_lines(prefix: str, traj) -> list:
    lines = [
        f"{prefix}records = {traj.n_records()}",
        f"{prefix}final_t = {_num(traj.t[-1])}",
        f"{prefix}final_E = {_num(traj.E[-1])}",
        f"{prefix}settled = {'true' if traj.settled_at is not None else 'false'}",
        f"{prefix}settled_at = "
        + (_num(traj.settled_at) if traj.settled_at is not None else "none"),
        f"{prefix}monotone_violations = {traj.monotone_violations()}",
    ]
    return lines


def _plot_series(out: Path, series, title: str) -> None:
    positives = [y for _, _, ys in series for y in ys if y > 0]
    all_pos = all(y > 0 for _, _, ys in series for y in ys)
    log_y = bool(all_pos and positives and max(positives) / min(positives) > 1e3)
    write_svg(out / "loss_curve.svg", series, title=title, log_y=log_y)
    write_dat(out / "curves.dat", series)


# ---------------------------------------------------------------- commands


def _cmd_train(cfg: ExperimentConfig, args, out: Path) -> int:
    dataset = _build_dataset(cfg)
    mlp = _build_net(cfg)
    law_kind = _resolve_law(cfg, mlp)
    loss = _build_loss(cfg, law_kind, args.unsafe_alpha)
    gains = GainSchedule.uniform(cfg.k)
    mode = _build_mode(cfg, dataset)
    spec = _build_spec(cfg, loss)

    E0 = _initial_loss(mlp, mode, loss)
    bound, refusal = _maybe_bound(cfg, mode, loss, gains, E0, spec)
    integ = _build_integrator(cfg, bound)
    stop = StoppingRule(cfg.epsilon)

    traj = integrate(mlp, mode, loss, gains, integ, stop, law=cfg.law,
                     noise=spec)

    traj.to_csv(out / "trajectory.csv")
    lines = [
        "command = train",
        f"seed = {cfg.seed}",
        f"loss = {loss.name}",
        f"law = {law_kind}",
        f"mode = {cfg.mode}",
        f"method = {integ.method}",
        f"dt = {_num(integ.dt)}",
        f"epsilon = {_num(stop.epsilon)}",
        f"E0 = {_num(E0)}",
    ]
    if isinstance(loss, LyapunovLoss):
        lines += [f"alpha = {_num(loss.alpha)}", f"beta = {_num(loss.beta)}"]
    if spec is not None:
        lines += [f"perturb.mode = {spec.mode}", f"perturb.M = {_num(spec.M)}"]
    if bound is not None:
        lines += ["bound." + ln for ln in bound.kv_lines()]
        if cfg.mode == "epoch":
            lines.append("bound.heuristic = true")
    else:
        lines.append(f"bound = none ({refusal})")
    lines += _traj_lines("", traj)
    _write_kv(out / "summary.kv", lines)
    _plot_series(out, [(f"{loss.name} loss", traj.t.tolist(), traj.E.tolist())],
                 title="training loss")

    print(f"train: {traj.n_records()} records -> {out / 'trajectory.csv'}")
    if traj.settled_at is not None:
        print(f"settled at t = {traj.settled_at:.6g}"
              + (f" (bound T = {bound.T:.6g})" if bound else ""))
    else:
        print(f"did not settle by t_max = {integ.t_max:.6g}"
              f" (final E = {traj.E[-1]:.6g})")
    return 0


def _cmd_compare(cfg: ExperimentConfig, args, out: Path) -> int:
    dataset = _build_dataset(cfg)
    mlp = _build_net(cfg)
    mode = _build_mode(cfg, dataset)
    gains = GainSchedule.uniform(cfg.k)
    stop = StoppingRule(cfg.epsilon)
    integ = _build_integrator(cfg, None)

    lyap_kind = _resolve_law(cfg, mlp)
    if lyap_kind == "baseline":
        raise ConfigError(["compare needs loss.kind = lyapunov as the reference"])
    try:
        if lyap_kind == "mlp":
            lyap = LyapunovLoss.multilayer(cfg.alpha, cfg.beta,
                                           allow_unsafe_alpha=args.unsafe_alpha)
        else:
            lyap = LyapunovLoss.single_neuron(cfg.alpha,
                                              allow_unsafe_alpha=args.unsafe_alpha)
    except ValueError as exc:
        raise ConfigError([f"loss: {exc}"])

    runs = []
    for loss in (lyap, L1Loss(), L2Loss()):
        law = cfg.law if isinstance(loss, LyapunovLoss) else "auto"
        traj = integrate(mlp, mode, loss, gains, integ, stop, law=law)
        runs.append((loss.name, traj))

    lines = [
        "command = compare",
        f"seed = {cfg.seed}",
        f"mode = {cfg.mode}",
        f"dt = {_num(integ.dt)}",
        f"epsilon = {_num(stop.epsilon)}",
        f"alpha = {_num(lyap.alpha)}",
        f"beta = {_num(lyap.beta)}",
    ]
    for name, traj in runs:
        lines += _traj_lines(f"{name}.", traj)
    settle_times = {n: t.settled_at for n, t in runs}
    finishers = {n: s for n, s in settle_times.items() if s is not None}
    if finishers:
        winner = min(finishers, key=finishers.get)
        lines.append(f"first_to_epsilon = {winner}")
    else:
        lines.append("first_to_epsilon = none")
    _write_kv(out / "summary.kv", lines)

    runs[0][1].to_csv(out / "trajectory.csv")
    series = [(name, traj.t.tolist(), traj.E.tolist()) for name, traj in runs]
    _plot_series(out, series, title="loss comparison")

    for name, traj in runs:
        state = (f"settled at t = {traj.settled_at:.6g}"
                 if traj.settled_at is not None
                 else f"E = {traj.E[-1]:.6g} at t_max")
        print(f"compare: {name:9s} {state}")
    return 0


def _cmd_bound(cfg: ExperimentConfig, args, out: Path) -> int:
    dataset = _build_dataset(cfg)
    mlp = _build_net(cfg)
    law_kind = _resolve_law(cfg, mlp)
    loss = _build_loss(cfg, law_kind, args.unsafe_alpha)
    gains = GainSchedule.uniform(cfg.k)
    mode = _build_mode(cfg, dataset)
    spec = _build_spec(cfg, loss)

    E0 = _initial_loss(mlp, mode, loss)
    lines = ["command = bound", f"seed = {cfg.seed}", f"E0 = {_num(E0)}"]
    bound, refusal = _maybe_bound(cfg, mode, loss, gains, E0, spec)
    if bound is None:
        lines.append(f"bound = none ({refusal})")
        _write_kv(out / "summary.kv", lines)
        print(f"bound: refused ({refusal})")
        return 1
    lines += ["bound." + ln for ln in bound.kv_lines()]
    if cfg.mode == "epoch":
        # dataset runs step sample-by-sample; the certificate only covers the
        # single-sample flow, so flag it as indicative rather than certified.
        lines.append("bound.heuristic = true")
    _write_kv(out / "summary.kv", lines)
    print(bound.table())
    if cfg.mode == "epoch":
        print("note: epoch-mode bound is heuristic (per-sample stepping)")
    return 0


def _cmd_perturb_sweep(cfg: ExperimentConfig, args, out: Path) -> int:
    if not cfg.m_values:
        raise ConfigError(["perturb-sweep needs sweep.m_values"])
    from .perturb import robustness_run

    dataset = _build_dataset(cfg)
    mlp = _build_net(cfg)
    law_kind = _resolve_law(cfg, mlp)
    loss = _build_loss(cfg, law_kind, args.unsafe_alpha)
    gains = GainSchedule.uniform(cfg.k)
    mode = _build_mode(cfg, dataset)
    integ = _build_integrator(cfg, None)
    stop = StoppingRule(cfg.epsilon)
    gamma = GammaEstimate(cfg.gamma, source="user") if cfg.gamma is not None else None

    lines = [
        "command = perturb-sweep",
        f"seed = {cfg.seed}",
        f"k_min = {_num(gains.k_min)}",
        f"levels = {len(cfg.m_values)}",
    ]
    series = []
    print(f"{'M':>10s} {'certified':>9s} {'T_bound':>12s} {'settled_at':>12s} {'final_E':>12s}")
    for i, m in enumerate(cfg.m_values):
        spec = _build_spec(cfg, loss, m_override=m)
        traj, bnd = robustness_run(mlp, mode, spec, gains, loss, integ, stop,
                                   gamma=gamma, law=cfg.law)
        certified = bnd is not None
        p = f"row{i}."
        lines += [f"{p}M = {_num(m)}", f"{p}certified = {'true' if certified else 'false'}"]
        if certified:
            lines.append(f"{p}T_bound = {_num(bnd.T)}")
        else:
            lines.append(f"{p}T_bound = none")
            if spec.mode == "vanishing" and m >= gains.k_min:
                lines.append(f"{p}note = unguaranteed: M >= k_min")
        lines += _traj_lines(p, traj)
        series.append((f"M={m:g}", traj.t.tolist(), traj.E.tolist()))
        print(f"{m:10.4g} {str(certified):>9s} "
              f"{(f'{bnd.T:.6g}' if certified else 'none'):>12s} "
              f"{(f'{traj.settled_at:.6g}' if traj.settled_at is not None else 'none'):>12s} "
              f"{traj.E[-1]:12.6g}")
        last_traj = traj
    _write_kv(out / "summary.kv", lines)
    last_traj.to_csv(out / "trajectory.csv")
    _plot_series(out, series, title="settling under input noise")
    return 0


def _cmd_alpha_sweep(cfg: ExperimentConfig, args, out: Path) -> int:
    if not cfg.alphas:
        raise ConfigError(["alpha-sweep needs sweep.alphas"])
    if any(a == 0.0 for a in cfg.alphas) and not args.unsafe_alpha:
        raise ConfigError(
            ["sweep.alphas includes 0; pass --unsafe-alpha to run the chatter demo"]
        )
    dataset = _build_dataset(cfg)
    mlp = _build_net(cfg)
    law_kind = _resolve_law(cfg, mlp)
    if law_kind == "baseline":
        raise ConfigError(["alpha-sweep needs loss.kind = lyapunov"])
    gains = GainSchedule.uniform(cfg.k)
    mode = _build_mode(cfg, dataset)
    integ = _build_integrator(cfg, None)
    stop = StoppingRule(cfg.epsilon)

    lines = ["command = alpha-sweep", f"seed = {cfg.seed}",
             f"levels = {len(cfg.alphas)}"]
    series = []
    print(f"{'alpha':>7s} {'violations':>10s} {'settled_at':>12s} {'final_E':>12s}")
    for i, a in enumerate(cfg.alphas):
        loss = _build_loss(cfg, law_kind, args.unsafe_alpha, alpha=a)
        traj = integrate(mlp, mode, loss, gains, integ, stop, law=cfg.law)
        p = f"row{i}."
        lines.append(f"{p}alpha = {_num(a)}")
        lines += _traj_lines(p, traj)
        if a == 0.0:
            lines.append(f"{p}note = signum chatter demo; no settling certificate")
        series.append((f"alpha={a:g}", traj.t.tolist(), traj.E.tolist()))
        print(f"{a:7.3g} {traj.monotone_violations():>10d} "
              f"{(f'{traj.settled_at:.6g}' if traj.settled_at is not None else 'none'):>12s} "
              f"{traj.E[-1]:12.6g}")
        last_traj = traj
    _write_kv(out / "summary.kv", lines)
    last_traj.to_csv(out / "trajectory.csv")
    _plot_series(out, series, title="stability across alpha")
    return 0


def _fd_gradient(mlp: Mlp, x, y_star, loss, h: float = 1e-6) -> list:
    work = mlp.copy()
    grads = [np.zeros_like(w) for w in mlp.weights]
    for l, w in enumerate(mlp.weights):
        for idx in np.ndindex(w.shape):
            keep = w[idx]
            work.weights[l][idx] = keep + h
            e_plus = forward(work, x).y - y_star
            work.weights[l][idx] = keep - h
            e_minus = forward(work, x).y - y_star
            work.weights[l][idx] = keep
            grads[l][idx] = (loss.evaluate(e_plus) - loss.evaluate(e_minus)) / (2 * h)
    return grads


def _cmd_gradcheck(cfg: ExperimentConfig, args, out: Path) -> int:
    dataset = _build_dataset(cfg)
    mlp = _build_net(cfg)
    law_kind = _resolve_law(cfg, mlp)
    loss = _build_loss(cfg, law_kind, args.unsafe_alpha)
    mode = _build_mode(cfg, dataset)
    if isinstance(mode, TheoryFlow):
        x, y_star = mode.x, mode.y_star
    else:
        x, y_star = mode.dataset.sample(0)

    trace = forward(mlp, x)
    analytic = loss_gradient(sensitivities(mlp, trace, y_star, loss), trace)
    numeric = _fd_gradient(mlp, x, y_star, loss)

    worst = 0.0
    for g_a, g_n in zip(analytic, numeric):
        denom = np.maximum(np.maximum(np.abs(g_a), np.abs(g_n)), 1e-10)
        worst = max(worst, float(np.max(np.abs(g_a - g_n) / denom)))

    ok = worst <= _GRADCHECK_TOL
    _write_kv(out / "summary.kv", [
        "command = gradcheck",
        f"seed = {cfg.seed}",
        f"layers = {','.join(str(n) for n in cfg.layers)}",
        f"loss = {loss.name}",
        f"max_rel_error = {_num(worst)}",
        f"tolerance = {_num(_GRADCHECK_TOL)}",
        f"passed = {'true' if ok else 'false'}",
    ])
    print(f"gradcheck: max rel error = {worst:.3e} "
          f"({'OK' if ok else 'FAIL'} at tol {_GRADCHECK_TOL:g})")
    return 0 if ok else 1


_COMMANDS = {
    "train": _cmd_train,
    "compare": _cmd_compare,
    "bound": _cmd_bound,
    "perturb-sweep": _cmd_perturb_sweep,
    "alpha-sweep": _cmd_alpha_sweep,
    "gradcheck": _cmd_gradcheck,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lyapflow",
        description="Finite-time training flows with settling-time certificates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in _COMMANDS.items():
        p = sub.add_parser(name, help=fn.__doc__)
        p.add_argument("--config", required=True, help="experiment config file")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None,
                       help="override run.seed from the config")
        p.add_argument("--unsafe-alpha", action="store_true",
                       help="allow alpha = 0 (signum chatter; no guarantees)")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"error: bad config:\n{exc}", file=sys.stderr)
        return 2
    if args.seed is not None:
        if args.seed < 0:
            print("error: --seed must be non-negative", file=sys.stderr)
            return 2
        cfg.seed = args.seed
    if args.out is not None:
        cfg.out_dir = args.out
    out = Path(cfg.out_dir or ".")
    out.mkdir(parents=True, exist_ok=True)

    try:
        return _COMMANDS[args.command](cfg, args, out)
    except ConfigError as exc:
        print(f"error: bad config:\n{exc}", file=sys.stderr)
        return 2
    except LyapflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
