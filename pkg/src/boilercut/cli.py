"""Command-line interface.

Subcommands:

    extract      score saved pages and write prediction JSON
    evaluate     compare prediction JSON against ground truth
    fetch        download pages for offline processing
    tag-serve    run the local tagging server
    make-corpus  generate the synthetic benchmark corpus

Exit codes: 0 success, 1 usage error, 2 data or I/O error, 3 propagation
failed to converge.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .embeddings import load_table
from .errors import BoilercutError, NotConvergedError
from .evaluation import (
    GroundTruthPage,
    PredictionPage,
    aggregate,
    compare,
    write_json_atomic,
)
from .pipeline import ExtractOptions, extract_page
from .seeding import DEFAULT_RULES, load_rules
from .synthetic import DEFAULT_PAGES, DEFAULT_SEED, write_corpus

USAGE_ERROR = 1
DATA_ERROR = 2
CONVERGENCE_ERROR = 3


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad arguments; the contract here is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def _sigma_arg(value: str):
    if value == "median":
        return value
    try:
        sigma = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"sigma must be a positive number or 'median', got {value!r}")
    if not sigma > 0:
        raise argparse.ArgumentTypeError(
            f"sigma must be positive, got {value!r}")
    return sigma


def _positive_int(value: str) -> int:
    number = int(value)
    if number <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value!r}")
    return number


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="boilercut",
                     description="Boilerplate removal via harmonic label "
                                 "propagation over text-block similarity.")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    ext = sub.add_parser("extract", help="score pages and write predictions")
    ext.add_argument("pages", nargs="+",
                     help="HTML files or directories containing *.html")
    ext.add_argument("--embeddings", required=True,
                     help="word-embedding table in text format")
    ext.add_argument("--out", required=True, help="output directory")
    ext.add_argument("--kernel", choices=["inner", "rbf"], default="rbf")
    ext.add_argument("--sigma", type=_sigma_arg, default="median",
                     help="RBF bandwidth or 'median' (default)")
    ext.add_argument("--knn", type=_positive_int, default=None,
                     help="sparsify to a symmetrized k-nearest-neighbor graph")
    ext.add_argument("--solver", choices=["iterative", "direct"],
                     default="iterative")
    ext.add_argument("--tol", type=float, default=1e-8)
    ext.add_argument("--max-iters", type=_positive_int, default=None)
    ext.add_argument("--threshold", type=float, default=0.5)
    ext.add_argument("--seed-mode", choices=["heuristic", "truth"],
                     default="heuristic")
    ext.add_argument("--seed-fraction", type=float, default=0.2)
    ext.add_argument("--seed-strategy", choices=["first", "random"],
                     default="first")
    ext.add_argument("--seed-rng", type=int, default=0)
    ext.add_argument("--rules", default=None,
                     help="JSON file overriding the built-in seeding rules")
    ext.add_argument("--truth", default=None,
                     help="directory of truth JSON, required for "
                          "--seed-mode truth")
    ext.add_argument("--jobs", type=_positive_int, default=1)
    ext.add_argument("--continue-on-error", action="store_true")
    ext.set_defaults(run=cmd_extract)

    ev = sub.add_parser("evaluate", help="score predictions against truth")
    ev.add_argument("predictions", help="directory of prediction JSON")
    ev.add_argument("truth", help="directory of ground-truth JSON")
    ev.add_argument("--include-seeds", action="store_true",
                    help="count seeded blocks in the confusion matrix")
    ev.add_argument("--mode", choices=["macro", "micro"], default="macro")
    ev.add_argument("--out", default=None, help="write the report as JSON")
    ev.set_defaults(run=cmd_evaluate)

    fe = sub.add_parser("fetch", help="download pages to HTML snapshots")
    fe.add_argument("urls", nargs="+")
    fe.add_argument("--out", required=True, help="output directory")
    fe.add_argument("--timeout", type=float, default=30.0)
    fe.add_argument("--continue-on-error", action="store_true")
    fe.set_defaults(run=cmd_fetch)

    ts = sub.add_parser("tag-serve", help="serve pages for manual tagging")
    ts.add_argument("pages", help="directory of *.html snapshots")
    ts.add_argument("--truth-out", required=True,
                    help="directory where posted truth JSON is stored")
    ts.add_argument("--static", default=None,
                    help="tagging-script assets (default: ./frontend/dist)")
    ts.add_argument("--host", default="127.0.0.1")
    ts.add_argument("--port", type=int, default=8765)
    ts.set_defaults(run=cmd_tag_serve)

    mc = sub.add_parser("make-corpus", help="generate the synthetic corpus")
    mc.add_argument("--out", required=True, help="output directory")
    mc.add_argument("--pages", type=_positive_int, default=DEFAULT_PAGES)
    mc.add_argument("--rng", type=int, default=DEFAULT_SEED)
    mc.set_defaults(run=cmd_make_corpus)

    return parser


def _collect_pages(inputs) -> list[Path]:
    pages = []
    for item in inputs:
        path = Path(item)
        if path.is_dir():
            pages.extend(sorted(path.glob("*.html")))
        elif path.is_file():
            pages.append(path)
        else:
            raise FileNotFoundError(f"no such file or directory: {item}")
    if not pages:
        raise FileNotFoundError("no HTML pages found in the given inputs")
    return pages


def _load_truth_dir(truth_dir: Path) -> dict[str, GroundTruthPage]:
    truths = {}
    for path in sorted(truth_dir.glob("*.json")):
        page = GroundTruthPage.load(path)
        truths[page.page_id] = page
    return truths


def cmd_extract(args) -> int:
    pages = _collect_pages(args.pages)
    table = load_table(args.embeddings)
    rules = load_rules(args.rules) if args.rules else DEFAULT_RULES
    options = ExtractOptions(
        kernel=args.kernel,
        sigma=args.sigma,
        knn=args.knn,
        solver=args.solver,
        tol=args.tol,
        max_iters=args.max_iters,
        threshold=args.threshold,
        seed_mode=args.seed_mode,
        seed_fraction=args.seed_fraction,
        seed_strategy=args.seed_strategy,
        seed_rng=args.seed_rng,
        rules=rules,
    )

    truths: dict[str, GroundTruthPage] = {}
    if args.seed_mode == "truth":
        if not args.truth:
            raise BoilercutError("--seed-mode truth requires --truth DIR")
        truths = _load_truth_dir(Path(args.truth))

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    config_extra = {"embeddings": str(args.embeddings)}

    def work(path: Path):
        page_id = path.stem
        truth = truths.get(page_id)
        if args.seed_mode == "truth" and truth is None:
            raise BoilercutError(f"no truth JSON for page {page_id!r}")
        prediction = extract_page(path.read_bytes(), page_id, table,
                                  options=options, truth=truth,
                                  config_extra=config_extra)
        prediction.save(out_dir / f"{page_id}.json")
        return prediction

    failures: list[tuple[Path, Exception]] = []
    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        for path, outcome in zip(pages, pool.map(_capture(work), pages)):
            if isinstance(outcome, Exception):
                failures.append((path, outcome))
                print(f"{path.stem}: ERROR: {outcome}", file=sys.stderr)
                if not args.continue_on_error:
                    break
            else:
                seeds = sum(b.seed for b in outcome.blocks)
                print(f"{path.stem}: {len(outcome.blocks)} blocks, "
                      f"{seeds} seeds -> {out_dir / (path.stem + '.json')}")

    if failures:
        print(f"{len(failures)} of {len(pages)} pages failed", file=sys.stderr)
        if any(isinstance(exc, NotConvergedError) for _, exc in failures):
            return CONVERGENCE_ERROR
        return DATA_ERROR
    return 0


def _capture(fn):
    """Wrap a worker so exceptions travel back through Executor.map."""
    def inner(item):
        try:
            return fn(item)
        except Exception as exc:
            return exc
    return inner


def _fmt(value) -> str:
    return "n/a" if value is None else f"{value:.4f}"


def cmd_evaluate(args) -> int:
    pred_dir = Path(args.predictions)
    truth_by_id = _load_truth_dir(Path(args.truth))
    pred_paths = sorted(pred_dir.glob("*.json"))
    if not pred_paths:
        raise BoilercutError(f"no prediction JSON found in {pred_dir}")

    reports = []
    for path in pred_paths:
        prediction = PredictionPage.load(path)
        truth = truth_by_id.get(prediction.page_id)
        if truth is None:
            raise BoilercutError(
                f"no ground truth for page {prediction.page_id!r}")
        reports.append(compare(prediction, truth,
                               exclude_seeds=not args.include_seeds))

    summary = aggregate(reports, mode=args.mode)
    header = (f"{'page':<16} {'tp':>4} {'fp':>4} {'fn':>4} {'tn':>4} "
              f"{'prec':>7} {'rec':>7} {'f1':>7} {'acc':>7}")
    print(header)
    for rep in reports:
        print(f"{rep.page_id:<16} {rep.tp:>4} {rep.fp:>4} {rep.fn:>4} "
              f"{rep.tn:>4} {_fmt(rep.precision):>7} {_fmt(rep.recall):>7} "
              f"{_fmt(rep.f1):>7} {_fmt(rep.accuracy):>7}")
    print(f"{args.mode} over {len(reports)} pages: "
          f"precision={_fmt(summary.precision)} recall={_fmt(summary.recall)} "
          f"f1={_fmt(summary.f1)} accuracy={_fmt(summary.accuracy)}")

    if args.out:
        write_json_atomic(Path(args.out), {
            "pages": [rep.to_payload() for rep in reports],
            "aggregate": summary.to_payload(),
        })
    return 0


def _slug(url: str) -> str:
    from urllib.parse import urlsplit

    parts = urlsplit(url)
    raw = f"{parts.netloc}{parts.path}".lower()
    cleaned = "".join(ch if ch.isalnum() else "-" for ch in raw)
    cleaned = "-".join(filter(None, cleaned.split("-")))
    return cleaned or "page"


def cmd_fetch(args) -> int:
    import requests

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    taken: set[str] = set()
    failures = 0
    for url in args.urls:
        slug = _slug(url)
        n = 2
        while slug in taken or (out_dir / f"{slug}.html").exists():
            slug = f"{_slug(url)}-{n}"
            n += 1
        try:
            response = requests.get(
                url, timeout=args.timeout,
                headers={"User-Agent": "boilercut/0.1 (+offline research)"})
            response.raise_for_status()
        except requests.RequestException as exc:
            failures += 1
            print(f"{url}: ERROR: {exc}", file=sys.stderr)
            if not args.continue_on_error:
                return DATA_ERROR
            continue
        taken.add(slug)
        target = out_dir / f"{slug}.html"
        target.write_bytes(response.content)
        print(f"{url} -> {target}")
    return DATA_ERROR if failures else 0


def cmd_tag_serve(args) -> int:
    from .server import make_server

    pages_dir = Path(args.pages)
    if not pages_dir.is_dir():
        raise BoilercutError(f"no such directory: {pages_dir}")
    static = args.static
    if static is None and Path("frontend/dist").is_dir():
        static = "frontend/dist"
    server = make_server(pages_dir, Path(args.truth_out), static,
                         host=args.host, port=args.port)
    host, port = server.server_address[:2]
    print(f"tagging server on http://{host}:{port}/ "
          f"({len(server.list_pages())} pages, static={static or 'none'})")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def cmd_make_corpus(args) -> int:
    out_dir = Path(args.out)
    page_ids = write_corpus(out_dir, pages=args.pages, rng_seed=args.rng)
    print(f"wrote {len(page_ids)} pages, truth and embeddings under {out_dir}")
    return 0


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse raises for --help (0) and, via _Parser.error, usage (1)
        return int(exc.code or 0)
    try:
        return args.run(args)
    except NotConvergedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return CONVERGENCE_ERROR
    except (BoilercutError, OSError, LookupError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
