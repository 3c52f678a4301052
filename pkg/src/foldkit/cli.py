"""Command-line interface.

Every command is a thin client over the HTTP service: by default the service
app runs in-process, and ``--server URL`` points the same commands at a
remote instance instead. Results land on stdout; progress and summaries go
to stderr; ``--out PATH`` writes the artifact plus a ``.manifest.json``
sidecar recording what produced it.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
"""
from __future__ import annotations

import csv as csv_mod
import io
import json
import os
import sys
import warnings
from pathlib import Path
from typing import Sequence

import click
import httpx

from .errors import DataError, FoldkitError, InternalError, UsageError

ALGOS = ("fold", "foldr", "kmeans-fold", "kmeans-foldr")


def _want_color(stream) -> bool:
    # NO_COLOR (any value) disables styling, as does a non-tty stream.
    return stream.isatty() and not os.environ.get("NO_COLOR")


def _err(msg: str) -> None:
    if _want_color(sys.stderr):
        click.secho(msg, fg="red", err=True)
    else:
        click.echo(msg, err=True)


def _info(msg: str) -> None:
    click.echo(msg, err=True)


class ServiceClient:
    """POSTs to the service and converts its error envelope back into the
    shared exception taxonomy, so in-process and remote runs behave alike."""

    def __init__(self, server: str | None):
        if server:
            self._client = httpx.Client(base_url=server, timeout=600.0)
            self._where = server
        else:
            with warnings.catch_warnings():
                # starlette 1.x warns about the httpx 0.x backend; httpx2 is
                # not available to us, and the 0.x path still works.
                warnings.simplefilter("ignore")
                from starlette.testclient import TestClient

            from .service import create_app

            self._client = TestClient(create_app(), raise_server_exceptions=False)
            self._where = "in-process service"

    def post(self, path: str, payload: dict) -> dict:
        try:
            resp = self._client.post(path, json=payload)
        except httpx.HTTPError as exc:
            raise UsageError(f"cannot reach {self._where}: {exc}") from exc
        if resp.status_code == 200:
            return resp.json()
        raise self._to_error(resp)

    @staticmethod
    def _to_error(resp: httpx.Response) -> FoldkitError:
        try:
            body = resp.json()["error"]
            code, message = body["code"], body["message"]
        except Exception:
            return InternalError(f"server returned HTTP {resp.status_code}: {resp.text[:200]}")
        by_code = {"usage": UsageError, "data": DataError}
        return by_code.get(code, InternalError)(message)


def _read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _emit(text: str, out: str | None, manifest: dict | None) -> None:
    """Print to stdout, or write to `out` with a manifest sidecar."""
    if out:
        Path(out).write_text(text, encoding="utf-8")
        if manifest is not None:
            sidecar = out + ".manifest.json"
            Path(sidecar).write_text(
                json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
            )
        _info(f"wrote {out}")
    else:
        click.echo(text, nl=False)


def _parse_k_range(text: str) -> list[int]:
    """Accepts '4', '1..10', or '2,4,8'."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            values = list(range(int(lo), int(hi) + 1))
        else:
            values = [int(part) for part in text.split(",")]
    except ValueError:
        raise UsageError(
            f"cannot parse k range {text!r}; expected forms: 4, 1..10, 2,4,8"
        ) from None
    if not values or min(values) < 1:
        raise UsageError(f"k range {text!r} must contain positive integers")
    return values


def _drop_none(payload: dict) -> dict:
    return {key: value for key, value in payload.items() if value is not None}


@click.group()
def cli() -> None:
    """Induce default theories (rules with exceptions) from tabular examples."""


_dataset_arg = click.argument("dataset", type=click.Path(exists=True, dir_okay=False))
_server_opt = click.option("--server", default=None, metavar="URL",
                           help="Use a running service instead of in-process.")
_target_opt = click.option("--target", required=True, help="Name of the label column.")
_positive_opt = click.option("--positive-label", default=None,
                             help="Label value treated as positive (inferred if omitted).")
_background_opt = click.option("--background", default=None,
                               type=click.Path(exists=True, dir_okay=False),
                               help="One-level definitional rules, e.g. 'bird(X) :- penguin(X).'")


@cli.command()
@_dataset_arg
@_target_opt
@_positive_opt
@click.option("--algo", type=click.Choice(ALGOS), default="kmeans-fold", show_default=True)
@click.option("--k", type=int, default=None, help="Cluster count (kmeans algos only).")
@click.option("--f", type=float, default=None,
              help="Demotion weight for already-covered positives (kmeans algos only).")
@click.option("--max-clause-len", type=int, default=5, show_default=True)
@click.option("--bins", type=int, default=10, show_default=True,
              help="Equal-frequency ranges per numeric feature before merging.")
@click.option("--ab-depth", type=int, default=2, show_default=True,
              help="Maximum nesting depth of exception predicates.")
@click.option("--seed", type=int, default=0, show_default=True)
@_background_opt
@click.option("--out", default=None, type=click.Path(dir_okay=False),
              help="Write the theory here (plus .manifest.json) instead of stdout.")
@_server_opt
def learn(dataset: str, target: str, positive_label: str | None, algo: str,
          k: int | None, f: float | None, max_clause_len: int, bins: int,
          ab_depth: int, seed: int, background: str | None, out: str | None,
          server: str | None) -> None:
    """Learn a theory from a labeled CSV and print it as rules."""
    payload = _drop_none({
        "csv_text": _read_text(dataset),
        "target": target,
        "positive_label": positive_label,
        "algo": algo,
        "k": k,
        "f": f,
        "max_clause_len": max_clause_len,
        "bins": bins,
        "ab_depth": ab_depth,
        "seed": seed,
        "background_text": _read_text(background) if background else None,
    })
    resp = ServiceClient(server).post("/v1/learn", payload)
    stats = resp["stats"]
    _info(
        f"learned {stats['n_rules']} rules, {stats['n_literals']} literals "
        f"({stats['n_pos']} pos / {stats['n_neg']} neg examples)"
    )
    _emit(resp["hypothesis_asp"], out, resp["manifest"])


@cli.command("eval")
@_dataset_arg
@_target_opt
@_positive_opt
@click.option("--algo", type=click.Choice(ALGOS), default="kmeans-fold", show_default=True)
@click.option("--hypothesis", default=None, type=click.Path(exists=True, dir_okay=False),
              help="Score this existing theory instead of learning.")
@click.option("--folds", type=int, default=5, show_default=True)
@click.option("--sweep-k", default=None, metavar="RANGE",
              help="Cluster counts to try, e.g. 1..10 (the default for kmeans algos).")
@click.option("--repeats", type=int, default=2, show_default=True,
              help="Clustering restarts per cluster count.")
@click.option("--selection-metric", type=click.Choice(["f1", "rules-at-best-accuracy"]),
              default="f1", show_default=True)
@click.option("--f", type=float, default=None)
@click.option("--max-clause-len", type=int, default=5, show_default=True)
@click.option("--bins", type=int, default=10, show_default=True)
@click.option("--ab-depth", type=int, default=2, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@_background_opt
@click.option("--format", "table_format", type=click.Choice(["md", "csv"]),
              default="md", show_default=True)
@click.option("--out", default=None, type=click.Path(dir_okay=False),
              help="Write the report table here (plus .manifest.json).")
@click.option("--out-hypothesis", default=None, type=click.Path(dir_okay=False),
              help="Sweep mode: also write the winning theory refit on all data.")
@_server_opt
def eval_cmd(dataset: str, target: str, positive_label: str | None, algo: str,
             hypothesis: str | None, folds: int, sweep_k: str | None, repeats: int,
             selection_metric: str, f: float | None, max_clause_len: int, bins: int,
             ab_depth: int, seed: int, background: str | None, table_format: str,
             out: str | None, out_hypothesis: str | None, server: str | None) -> None:
    """Cross-validate a learner (or score a fixed theory) on a labeled CSV.

    Clustering algorithms sweep a cluster-count grid: one table row per
    (cluster count, repeat) cell, then the best cell is refit on all data.
    """
    payload = _drop_none({
        "csv_text": _read_text(dataset),
        "target": target,
        "positive_label": positive_label,
        "algo": algo,
        "hypothesis_asp": _read_text(hypothesis) if hypothesis else None,
        "folds": folds,
        "k_values": _parse_k_range(sweep_k) if sweep_k else None,
        "repeats": repeats,
        "selection_metric": selection_metric.replace("-", "_"),
        "f": f,
        "max_clause_len": max_clause_len,
        "bins": bins,
        "ab_depth": ab_depth,
        "seed": seed,
        "background_text": _read_text(background) if background else None,
    })
    resp = ServiceClient(server).post("/v1/eval", payload)
    if resp["mode"] == "sweep":
        best = resp["best"]
        _info(
            f"best cell: k={best['k']} repeat={best['repeat']} "
            f"(mean f1 {best['mean_f1']:.4f}, mean rules {best['mean_rules']:.1f})"
        )
        if out_hypothesis:
            _emit(resp["hypothesis_asp"], out_hypothesis, resp["manifest"])
    elif out_hypothesis:
        raise UsageError("--out-hypothesis only applies to kmeans sweep runs")
    table = resp["table_markdown"] if table_format == "md" else resp["table_csv"]
    _emit(table, out, resp["manifest"])


@cli.command()
@click.argument("hypothesis", type=click.Path(exists=True, dir_okay=False))
@click.option("--pred", required=True, type=click.Path(exists=True, dir_okay=False),
              help="Directive file mapping predicates to sentence templates.")
@click.option("--out", default=None, type=click.Path(dir_okay=False))
@_server_opt
def translate(hypothesis: str, pred: str, out: str | None, server: str | None) -> None:
    """Render a learned theory as plain-English sentences."""
    payload = {
        "hypothesis_asp": _read_text(hypothesis),
        "pred_text": _read_text(pred),
    }
    resp = ServiceClient(server).post("/v1/translate", payload)
    _emit(resp["english"], out, resp["manifest"])


@cli.command()
@_dataset_arg
@click.option("--hypothesis", required=True, type=click.Path(exists=True, dir_okay=False))
@_target_opt
@_positive_opt
@_background_opt
@click.option("--out", default=None, type=click.Path(dir_okay=False))
@_server_opt
def classify(dataset: str, hypothesis: str, target: str, positive_label: str | None,
             background: str | None, out: str | None, server: str | None) -> None:
    """Apply a learned theory to a labeled CSV; emits id,predicted,actual."""
    payload = _drop_none({
        "hypothesis_asp": _read_text(hypothesis),
        "csv_text": _read_text(dataset),
        "target": target,
        "positive_label": positive_label,
        "background_text": _read_text(background) if background else None,
    })
    resp = ServiceClient(server).post("/v1/classify", payload)
    buf = io.StringIO()
    writer = csv_mod.writer(buf, lineterminator="\n")
    writer.writerow(["id", "predicted", "actual"])
    for p in resp["predictions"]:
        writer.writerow([p["id"], p["predicted"], p["actual"]])
    m = resp["metrics"]
    _info(
        f"accuracy {m['accuracy']:.4f}  precision {m['precision']:.4f}  "
        f"recall {m['recall']:.4f}  f1 {m['f1']:.4f}"
    )
    _emit(buf.getvalue(), out, resp["manifest"])


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host: str, port: int) -> None:
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


def main(argv: Sequence[str] | None = None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.UsageError as exc:
        _err(f"error: {exc.format_message()}")
        return 1
    except click.ClickException as exc:
        _err(f"error: {exc.format_message()}")
        return 1
    except click.Abort:
        _err("aborted")
        return 130
    except FoldkitError as exc:
        _err(f"error: {exc}")
        return exc.exit_code
    except Exception as exc:  # noqa: BLE001 - last-resort mapping to exit code 3
        _err(f"internal error: {type(exc).__name__}: {exc}")
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
