"""Command-line front end.

    pauli-spectra {nu|potential|count|weyl-scan|azm|gauge-check|pack}
                  --config cfg.json [--out PATH] [--format csv|json]
                  [--no-figs]

One JSON config per invocation; all physical parameters live there.  The
report path gets the delimited table, plus small PNG figures next to it
unless --no-figs.  Exit codes: 0 success, 2 when a scan's pass criterion
fails (trend outside the band, gauge mismatch), 1 on configuration or
runtime errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from .eig import count_below
from .discretize import assemble_pauli
from .fields import FieldError
from .gauge import GaugeError, solve_scalar_potential
from .harness import (
    HarnessError,
    ScanConfig,
    ScanTable,
    azm_scan,
    domain_from_spec,
    export,
    field_from_spec,
    gauge_invariance_test,
    greedy_disc_packing,
    weyl_scan,
    _gauge_for,
    _new_meta,
)
from .landau import LandauThresholdError, nu_value
from .zeromode import ZeroModeError


def _load_config(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _out_path(args, default_stem: str) -> Path:
    if args.out:
        return Path(args.out)
    return Path(f"{default_stem}.{args.format}")


def _write(table, args, stem: str) -> Path:
    path = _out_path(args, stem)
    export(table, path, args.format)
    print(f"wrote {path}")
    return path


def _figure(path: Path, draw) -> None:
    """Render a PNG next to the table; rendering problems never fail a run."""
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
        fig = plt.figure(figsize=(5.0, 3.4), dpi=110)
        draw(fig)
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
        print(f"wrote {path}")
    except Exception as exc:                       # pragma: no cover
        warnings.warn(f"figure {path} not rendered: {exc}", stacklevel=2)


# --------------------------------------------------------------------------
# subcommands


def _cmd_nu(args, cfg: dict) -> int:
    b = float(cfg["b"])
    if "lambda_grid" in cfg:
        lams = [float(x) for x in cfg["lambda_grid"]]
    else:
        lo = float(cfg.get("lambda_min", 0.0))
        hi = float(cfg.get("lambda_max", 10.0 * max(abs(b), 1.0)))
        lams = list(np.linspace(lo, hi, int(cfg.get("points", 101))))
    rows = []
    for lam in lams:
        try:
            raw = nu_value(b, lam, "raw")
        except LandauThresholdError:
            raw = float("nan")
        rows.append({"lambda": lam, "nu_raw": raw,
                     "nu_lower": nu_value(b, lam, "lower"),
                     "nu_upper": nu_value(b, lam, "upper")})
    table = ScanTable(columns=("lambda", "nu_raw", "nu_lower", "nu_upper"),
                      rows=rows, meta={"scan": "nu", "b": b})
    path = _write(table, args, "nu")
    if not args.no_figs:
        def draw(fig):
            ax = fig.add_subplot()
            ax.step([r["lambda"] for r in rows], [r["nu_raw"] for r in rows],
                    where="post", label="raw")
            ax.plot([r["lambda"] for r in rows], [r["nu_lower"] for r in rows],
                    "--", label="lower")
            ax.plot([r["lambda"] for r in rows], [r["nu_upper"] for r in rows],
                    "--", label="upper")
            ax.set_xlabel("lambda")
            ax.set_ylabel("nu")
            ax.legend(fontsize=8)
        _figure(path.with_suffix(".png"), draw)
    return 0


def _cmd_potential(args, cfg: dict) -> int:
    B = field_from_spec(cfg["field"])
    sol = solve_scalar_potential(B, N_r=int(cfg.get("N_r", 256)),
                                 N_theta=int(cfg.get("N_theta", 256)))
    rows = [{"theta": float(th), "h": float(hv)}
            for th, hv in zip(sol.theta_nodes, sol.h_boundary)]
    meta = {"scan": "potential", "kappa": sol.kappa,
            "flux_value": sol.flux_value, "flux_residual": sol.flux_residual,
            "h_positive": sol.h_positive, "b_sup": sol.b_sup,
            "phi_max_interior": sol.phi_max_interior}
    table = ScanTable(columns=("theta", "h"), rows=rows, meta=meta)
    path = _write(table, args, "potential")
    if not args.no_figs:
        def draw(fig):
            ax1 = fig.add_subplot(1, 2, 1, projection="polar")
            ax1.plot(sol.theta_nodes, sol.h_boundary, lw=1.0)
            ax1.set_title("h", fontsize=9)
            ax2 = fig.add_subplot(1, 2, 2)
            im = ax2.imshow(sol.phi.T, origin="lower", aspect="auto",
                            extent=(0, 1, 0, 2 * math.pi))
            ax2.set_xlabel("r")
            ax2.set_ylabel("theta")
            fig.colorbar(im, ax=ax2, label="phi")
        _figure(path.with_suffix(".png"), draw)
    return 0


def _cmd_count(args, cfg: dict) -> int:
    B = field_from_spec(cfg["field"])
    dom = domain_from_spec(cfg["domain"])
    t = float(cfg["t"])
    lam = float(cfg["lambda"])
    n = int(cfg.get("n", 128))
    A = _gauge_for(B, dom)
    op = assemble_pauli(dom, A, B, t, n,
                        method=cfg.get("method", "lichnerowicz"))
    res = count_below(op, lam)
    rows = [{"t": t, "lambda": res.lam, "N": res.count,
             "dimension": op.dimension,
             "shift_perturbed": res.shift_perturbed}]
    table = ScanTable(columns=("t", "lambda", "N", "dimension",
                               "shift_perturbed"), rows=rows,
                      meta={"scan": "count", "n": n})
    _write(table, args, "count")
    return 0


def _cmd_weyl(args, cfg: dict) -> int:
    table = weyl_scan(ScanConfig.from_dict(cfg))
    path = _write(table, args, "weyl_scan")
    if not args.no_figs and table.rows:
        def draw(fig):
            ax = fig.add_subplot()
            ts = table.column("t")
            ax.plot(ts, table.column("N_over_t"), "o-", label="N/t")
            lo = [r["int_nu_minus"] - r["tol"] for r in table.rows]
            hi = [r["int_nu_plus"] + r["tol"] for r in table.rows]
            ax.fill_between(ts, lo, hi, alpha=0.25, label="band")
            ax.set_xlabel("t")
            ax.legend(fontsize=8)
        _figure(path.with_suffix(".png"), draw)
    return 0 if table.meta.get("trend_ok") else 2


def _cmd_azm(args, cfg: dict) -> int:
    table = azm_scan(ScanConfig.from_dict(cfg))
    path = _write(table, args, "azm_scan")
    if not args.no_figs and table.rows:
        def draw(fig):
            ax = fig.add_subplot()
            ax.plot(table.column("t"), table.column("ratio"), "o-")
            ax.axhline(1.0, color="k", lw=0.6)
            ax.set_xlabel("t")
            ax.set_ylabel("certified dim / (t flux)")
            ax.set_ylim(0.0, 1.1)
        _figure(path.with_suffix(".png"), draw)
    return 0 if table.meta.get("trend_ok") else 2


def _cmd_gauge_check(args, cfg: dict) -> int:
    report = gauge_invariance_test(ScanConfig.from_dict(cfg))
    path = _out_path(args, "gauge_check")
    if args.format == "csv":
        table = ScanTable(columns=("t", "max_rel_dev", "count_mismatches"),
                          rows=report["per_draw"],
                          meta={"scan": "gauge-check", "pass": report["pass"]})
        export(table, path, "csv")
    else:
        export(report, path, "json")
    print(f"wrote {path}")
    print(f"gauge invariance: max relative deviation {report['max_rel_dev']:.3e},"
          f" {report['count_mismatches']} count mismatches -> "
          f"{'pass' if report['pass'] else 'FAIL'}")
    return 0 if report["pass"] else 2


def _cmd_pack(args, cfg: dict) -> int:
    B = field_from_spec(cfg["field"])
    region = domain_from_spec(cfg["domain"])
    pack = greedy_disc_packing(B, region, float(cfg["min_radius"]),
                               grid=int(cfg.get("grid", 512)),
                               seed=int(cfg.get("seed", 0)))
    rows = [{"x": d["center"][0], "y": d["center"][1], "radius": d["radius"],
             "sign": d["sign"], "flux": d["flux"]} for d in pack]
    meta = {"scan": "pack", "covered_fraction": pack.covered_fraction,
            "total_flux": pack.total_flux, "discs": len(pack)}
    table = ScanTable(columns=("x", "y", "radius", "sign", "flux"),
                      rows=rows, meta=meta)
    path = _write(table, args, "pack")
    print(f"{len(pack)} discs, covered flux fraction "
          f"{pack.covered_fraction:.3f}")
    if not args.no_figs:
        def draw(fig):
            from matplotlib.patches import Circle
            ax = fig.add_subplot()
            x0, y0, x1, y1 = region.bounding_box()
            for d in pack:
                c = "tab:red" if d["sign"] > 0 else "tab:blue"
                ax.add_patch(Circle(d["center"], d["radius"], fill=False,
                                    color=c, lw=0.8))
            ax.set_xlim(x0, x1)
            ax.set_ylim(y0, y1)
            ax.set_aspect("equal")
        _figure(path.with_suffix(".png"), draw)
    return 0


_COMMANDS = {
    "nu": _cmd_nu,
    "potential": _cmd_potential,
    "count": _cmd_count,
    "weyl-scan": _cmd_weyl,
    "azm": _cmd_azm,
    "gauge-check": _cmd_gauge_check,
    "pack": _cmd_pack,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="pauli-spectra",
        description="Desk-scale Dirichlet Pauli spectral experiments.")
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=True,
                        help="JSON config with all physical parameters")
    parser.add_argument("--out", default=None, help="output table path")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--no-figs", action="store_true",
                        help="skip the PNG figures")
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args.config)
        return _COMMANDS[args.command](args, cfg)
    except (HarnessError, ZeroModeError, GaugeError, FieldError,
            LandauThresholdError, KeyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
