"""Command-line front end.

    nlpencil enumerate --d 6
    nlpencil classify --d 5 [--spec 1,1,1,2,1,0 ...]
    nlpencil deform --d 8 --spec 3,3,1,1,0,0
    nlpencil nt --d 4 [--r1-max 10 --r2-max 10]
    nlpencil smooth --d 6 --spec 1,2,1,2,1,1 --n-max 3
    nlpencil table --d 5 [--n-max 3] [--out-dir DIR]
    nlpencil report --in DIR/d5-NT.json --format legacy

Environment: NLPENCIL_CACHE_DIR (checkpoints and period cache, default
~/.cache/nlpencil), NLPENCIL_WORKERS (process pool size, default 1).
Exit codes: 0 success, 2 finished within budget only partially, 1 error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Sequence

from .combinat import PencilSpec, count_pencil_specs, enumerate_pencil_specs
from .cycles import build_c1_c2
from .deform import TransversalityScanner, default_r_grid, deform_space
from .jets import smoothness_scan
from .report import ReportDoc, ReportItem, dumps, from_legacy, loads, to_csv, to_legacy
from .tangent import CANDIDATE, GENERAL, GENERIC_SENTINEL, INCLUSION, classify_pencil, resolve_method

EXIT_OK, EXIT_ERROR, EXIT_PARTIAL = 0, 1, 2


@dataclass
class RunConfig:
    d: int
    command: str
    specs: list[tuple[int, ...]] | None = None
    r1_min: int = 1
    r1_max: int = 10
    r2_max: int = 10
    n_max: int = 3
    method: str = "auto"
    workers: int = 1
    cache_dir: str = ""
    nt: bool = True
    jets: bool = True
    exhaustive: bool = False
    skip_nt: bool = False
    budget: float | None = None
    spec_budget: float | None = None

    def __post_init__(self):
        if self.d < 4:
            raise ValueError("d must be at least 4")
        if self.r1_max < self.r1_min or self.r1_min < 0 or self.r2_max < 0:
            raise ValueError("bad r-grid bounds")
        if self.n_max < 1:
            raise ValueError("N_max must be at least 1")
        if self.workers < 1:
            raise ValueError("worker count must be positive")

    @property
    def grid(self) -> list[tuple[int, int]]:
        return default_r_grid(self.r1_max, self.r2_max, self.r1_min)

    def selected(self) -> list[PencilSpec]:
        if self.specs is None:
            return enumerate_pencil_specs(self.d)
        return [PencilSpec(self.d, *p) for p in self.specs]

    def fingerprint(self) -> str:
        """Hash of everything that changes results (not workers, not budgets)."""
        keep = {k: v for k, v in asdict(self).items() if k not in ("workers", "cache_dir", "budget", "spec_budget")}
        keep["method"] = resolve_method(self.d, self.method)
        return hashlib.sha256(json.dumps(keep, sort_keys=True).encode()).hexdigest()[:20]


def default_cache_dir() -> Path:
    env = os.environ.get("NLPENCIL_CACHE_DIR")
    return Path(env) if env else Path.home() / ".cache" / "nlpencil"


# --------------------------------------------------------------------------
# per-spec work (pure; runs in worker processes)


def spec_record(spec: PencilSpec, cfg: RunConfig, deadline: float | None = None) -> dict:
    """Codims, classification, NT pairs and (for candidates) jet first failures."""
    method = resolve_method(spec.d, cfg.method)
    rep = classify_pencil(spec, method)
    rec: dict[str, Any] = {
        "params": list(spec.params),
        "codims": list(rep.codims),
        "classification": rep.classification,
        "stabilized": rep.stabilized,
        "nt_pairs": None,
        "smooth": None,
        "skipped": None,
    }
    grid = cfg.grid
    ds = None
    if cfg.nt or (cfg.jets and rep.classification == CANDIDATE):
        C1, C2 = build_c1_c2(spec)
        ds = deform_space(C1, C2, spec.d, method, spec)
        scanner = TransversalityScanner(C1, C2, ds, method, reference=rep.a3)
        rec["nt_pairs"] = [list(p) for p in grid if not scanner.transversal(*p)]
    if cfg.jets and rep.classification == CANDIDATE:
        sm = smoothness_scan(
            spec, grid, cfg.n_max, ds, method, cfg.exhaustive,
            nt_pairs=[tuple(p) for p in rec["nt_pairs"]], skip_nt=cfg.skip_nt, deadline=deadline,
        )
        rec["smooth"] = sm.to_json()
        if not sm.complete:
            rec["skipped"] = "budget (jet scan)"
    if not cfg.nt:
        rec["nt_pairs"] = None
    return rec


def _worker(args) -> dict:
    spec, cfg, spec_budget = args
    deadline = time.monotonic() + spec_budget if spec_budget else None
    return spec_record(spec, cfg, deadline)


class Checkpoint:
    """Append-only JSON-lines file of finished records, keyed by spec params."""

    def __init__(self, path: Path):
        self.path = path
        path.parent.mkdir(parents=True, exist_ok=True)
        self.done: dict[tuple[int, ...], dict] = {}
        if path.exists():
            for line in path.read_text().splitlines():
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError:
                    break  # torn final line from an interrupted run
                if rec.get("skipped") is None:
                    self.done[tuple(rec["params"])] = rec

    def add(self, rec: dict) -> None:
        if rec.get("skipped") is None:
            self.done[tuple(rec["params"])] = rec
        with self.path.open("a") as fh:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
            fh.flush()
            os.fsync(fh.fileno())


def run_records(cfg: RunConfig, log=None) -> tuple[list[dict], bool]:
    """Records for every selected spec; resumes from the checkpoint.  Returns (records, partial)."""
    cache = Path(cfg.cache_dir) if cfg.cache_dir else default_cache_dir()
    ck = Checkpoint(cache / "checkpoints" / f"d{cfg.d}-{cfg.fingerprint()}.jsonl")
    specs = cfg.selected()
    todo = [sp for sp in specs if sp.params not in ck.done]
    start = time.monotonic()
    skipped: dict[tuple[int, ...], dict] = {}
    fresh: dict[tuple[int, ...], dict] = {}

    def over_budget() -> bool:
        return cfg.budget is not None and time.monotonic() - start > cfg.budget

    def skip(sp: PencilSpec) -> None:
        skipped[sp.params] = {"params": list(sp.params), "skipped": "budget"}

    if cfg.workers > 1 and len(todo) > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            futures = {}
            for sp in todo:
                futures[sp.params] = pool.submit(_worker, (sp, cfg, cfg.spec_budget))
            for sp in todo:
                fut = futures[sp.params]
                if over_budget() and not fut.done():
                    fut.cancel()
                    skip(sp)
                    continue
                rec = fut.result()
                fresh[sp.params] = rec
                ck.add(rec)
    else:
        for sp in todo:
            if over_budget():
                skip(sp)
                continue
            rec = _worker((sp, cfg, cfg.spec_budget))
            fresh[sp.params] = rec
            ck.add(rec)
            if log:
                log(f"{sp.key} {rec['classification']}")
    out = []
    for sp in specs:
        rec = ck.done.get(sp.params) or fresh.get(sp.params) or skipped.get(sp.params)
        out.append(rec)
    partial = any(r.get("skipped") for r in out)
    return out, partial


# --------------------------------------------------------------------------
# table assembly


def table_row(d: int, records: Sequence[dict], n_max: int) -> dict:
    row: dict[str, Any] = {"d": d, "count": len(records), GENERAL: 0, INCLUSION: 0, "candidates": 0}
    for N in range(2, n_max + 1):
        row[f"N={N}"] = 0
    row[f"smooth through N={n_max}"] = 0
    row["NT"] = 0
    row["skipped"] = []
    nt_known = jets_known = True
    for rec in records:
        if rec.get("classification") is None:
            row["skipped"].append({"params": rec["params"], "reason": rec.get("skipped")})
            continue
        cls = rec["classification"]
        if cls == GENERAL:
            row[GENERAL] += 1
        elif cls == INCLUSION:
            row[INCLUSION] += 1
        else:
            row["candidates"] += 1
            sm = rec.get("smooth")
            if sm is None:
                jets_known = False
            else:
                col = sm["column"]
                if col is None:
                    row[f"smooth through N={n_max}"] += 1
                else:
                    row[f"N={col}"] += 1
            if rec.get("skipped"):
                row["skipped"].append({"params": rec["params"], "reason": rec["skipped"]})
        if rec.get("nt_pairs") is None:
            nt_known = False
        elif rec["nt_pairs"]:
            row["NT"] += 1
    if not nt_known:
        row["NT"] = None
    if not jets_known:
        for key in [k for k in row if k.startswith("N=") or k.startswith("smooth through")]:
            row[key] = None
    return row


def _item(rec: dict, pairs) -> ReportItem:
    p = rec["params"]
    return ReportItem((p[0], p[1]), (p[2], p[3]), (p[4], p[5]), tuple(rec["codims"]), pairs)


def column_docs(d: int, records: Sequence[dict], n_max: int) -> dict[str, ReportDoc]:
    docs = {GENERAL: ReportDoc(d, GENERAL), INCLUSION: ReportDoc(d, INCLUSION), "NT": ReportDoc(d, "NT")}
    for rec in records:
        cls = rec.get("classification")
        if cls is None:
            continue
        if cls in (GENERAL, INCLUSION):
            docs[cls].items.append(_item(rec, None))
        sm = rec.get("smooth")
        if cls == CANDIDATE and sm is not None:
            col = sm["column"]
            name = f"N={col}" if col is not None else f"smooth>={n_max}"
            N = col if col is not None else n_max
            smooth_pairs = [
                (p["r1"], p["r2"])
                for p in sm["pairs"]
                if (p["first_failure"] is None or p["first_failure"] > N) and p["checked_through"] >= N
            ]
            docs.setdefault(name, ReportDoc(d, name)).items.append(_item(rec, smooth_pairs))
        if rec.get("nt_pairs"):
            docs["NT"].items.append(_item(rec, [tuple(x) for x in rec["nt_pairs"]]))
    return {k: v.sorted() for k, v in docs.items()}


# --------------------------------------------------------------------------
# commands


def _parse_specs(d: int, texts: Sequence[str] | None) -> list[tuple[int, ...]] | None:
    if not texts:
        return None
    return [PencilSpec.parse(d, t).params for t in texts]


def _emit(obj: Any, out: str | None) -> None:
    text = obj if isinstance(obj, str) else json.dumps(obj, sort_keys=True, indent=1) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _config(args, command: str) -> RunConfig:
    workers = getattr(args, "workers", None) or int(os.environ.get("NLPENCIL_WORKERS", "1"))
    return RunConfig(
        d=args.d,
        command=command,
        specs=_parse_specs(args.d, getattr(args, "spec", None)),
        r1_min=getattr(args, "r1_min", 1),
        r1_max=getattr(args, "r1_max", 10),
        r2_max=getattr(args, "r2_max", 10),
        n_max=getattr(args, "n_max", 3),
        method=getattr(args, "method", "auto"),
        workers=workers,
        cache_dir=getattr(args, "cache_dir", None) or str(default_cache_dir()),
        nt=command in ("nt", "table") and not getattr(args, "no_nt", False),
        jets=command == "table" and getattr(args, "jets", "auto") != "off"
        and (args.jets == "on" or args.d <= 7),
        exhaustive=getattr(args, "exhaustive", False),
        skip_nt=getattr(args, "skip_nt", False),
        budget=getattr(args, "budget", None),
        spec_budget=getattr(args, "spec_budget", None),
    )


def cmd_enumerate(args) -> int:
    specs = enumerate_pencil_specs(args.d)
    assert len(specs) == count_pencil_specs(args.d)
    _emit({"d": args.d, "count": len(specs), "specs": [list(s.params) for s in specs]}, args.out)
    return EXIT_OK


def cmd_classify(args) -> int:
    cfg = _config(args, "classify")
    out = [classify_pencil(sp, cfg.method, GENERIC_SENTINEL).to_json() for sp in cfg.selected()]
    _emit(out, args.out)
    return EXIT_OK


def cmd_deform(args) -> int:
    spec = PencilSpec.parse(args.d, args.spec[0])
    C1, C2 = build_c1_c2(spec)
    ds = deform_space(C1, C2, args.d, args.method, spec)
    _emit(ds.to_json(), args.out)
    return EXIT_OK


def cmd_nt(args) -> int:
    cfg = _config(args, "nt")
    records, partial = run_records(cfg)
    doc = column_docs(cfg.d, [r for r in records if r.get("classification")], cfg.n_max)["NT"]
    _emit(dumps(doc), args.out)
    return EXIT_PARTIAL if partial else EXIT_OK


def cmd_smooth(args) -> int:
    spec = PencilSpec.parse(args.d, args.spec[0])
    grid = default_r_grid(args.r1_max, args.r2_max, args.r1_min)
    deadline = time.monotonic() + args.spec_budget if args.spec_budget else None
    rep = smoothness_scan(spec, grid, args.n_max, None, args.method, args.exhaustive,
                          skip_nt=args.skip_nt, checkpoint=args.checkpoint, deadline=deadline)
    _emit(rep.to_json(), args.out)
    return EXIT_OK if rep.complete else EXIT_PARTIAL


def cmd_table(args) -> int:
    cfg = _config(args, "table")
    log = (lambda m: print(m, file=sys.stderr, flush=True)) if args.verbose else None
    records, partial = run_records(cfg, log)
    row = table_row(cfg.d, records, cfg.n_max)
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name, doc in column_docs(cfg.d, records, cfg.n_max).items():
            (out / f"d{cfg.d}-{name.replace('>=', 'ge').replace('=', '')}.json").write_text(dumps(doc))
        (out / f"d{cfg.d}-records.json").write_text(json.dumps(records, sort_keys=True, indent=1) + "\n")
    _emit(row, args.out)
    return EXIT_PARTIAL if partial else EXIT_OK


def cmd_report(args) -> int:
    text = Path(args.input).read_text()
    if args.input.endswith(".json"):
        doc = loads(text)
    else:
        if args.d is None or args.column is None:
            raise ValueError("legacy input needs --d and --column")
        doc = from_legacy(text, args.d, args.column)
    if args.format == "json":
        _emit(dumps(doc), args.out)
    elif args.format == "legacy":
        _emit(to_legacy(doc), args.out)
    else:
        _emit(to_csv(doc), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nlpencil", description="Noether-Lefschetz pencils on Fermat surfaces")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, spec=False, grid=False, method=True):
        p.add_argument("--d", type=int, required=True)
        p.add_argument("--out", default=None, help="write to this file instead of stdout")
        if spec:
            p.add_argument("--spec", action="append", help="d1,d2,s1,s2,m1,m2 (repeatable)")
        if grid:
            p.add_argument("--r1-min", type=int, default=1)
            p.add_argument("--r1-max", type=int, default=10)
            p.add_argument("--r2-max", type=int, default=10)
        if method:
            p.add_argument("--method", choices=["auto", "exact", "modular"], default="auto")

    p = sub.add_parser("enumerate", help="list all pencil data for degree d")
    common(p, method=False)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("classify", help="codims a1..a4 and General/Inclusion/Candidate")
    common(p, spec=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("deform", help="reduced deformation monomials I*")
    common(p, spec=True)
    p.set_defaults(func=cmd_deform)

    p = sub.add_parser("nt", help="non-transversal pairs of every spec")
    common(p, spec=True, grid=True)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--cache-dir", default=None)
    p.add_argument("--budget", type=float, default=None, help="total seconds")
    p.set_defaults(func=cmd_nt)

    p = sub.add_parser("smooth", help="jet first-failure orders for one spec")
    common(p, spec=True, grid=True)
    p.add_argument("--n-max", type=int, default=3)
    p.add_argument("--exhaustive", action="store_true", help="check every pair up to n-max")
    p.add_argument("--skip-nt", action="store_true", help="leave NT pairs out of the scan")
    p.add_argument("--checkpoint", default=None, help="resumable per-pair progress file")
    p.add_argument("--spec-budget", type=float, default=None, help="seconds")
    p.set_defaults(func=cmd_smooth)

    p = sub.add_parser("table", help="one row of the classification table")
    common(p, spec=True, grid=True)
    p.add_argument("--n-max", type=int, default=3)
    p.add_argument("--jets", choices=["auto", "on", "off"], default="auto", help="auto: only for d <= 7")
    p.add_argument("--no-nt", action="store_true")
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--skip-nt", action="store_true", help="leave NT pairs out of jet scans")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--cache-dir", default=None)
    p.add_argument("--budget", type=float, default=None, help="total seconds")
    p.add_argument("--spec-budget", type=float, default=None, help="seconds per jet scan")
    p.add_argument("--out-dir", default=None, help="write column documents here")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("report", help="convert a column document between formats")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--format", choices=["json", "legacy", "csv"], default="json")
    p.add_argument("--d", type=int, default=None, help="degree (legacy input only)")
    p.add_argument("--column", default=None, help="column name (legacy input only)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_report)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "smooth" and len(args.spec or []) != 1:
        print("error: smooth needs exactly one --spec", file=sys.stderr)
        return EXIT_ERROR
    if args.command == "deform" and len(args.spec or []) != 1:
        print("error: deform needs exactly one --spec", file=sys.stderr)
        return EXIT_ERROR
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
