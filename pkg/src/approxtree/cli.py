"""Command-line pipeline: train -> optimize -> emit -> report.

Configuration comes from an optional TOML file plus flags; flags win.
`train` resolves and persists the run configuration (run.json) in the
output directory, and the later stages read it back so one seed
reproduces the whole pipeline byte for byte. Exit codes: 0 success,
2 bad input, 3 internal invariant failure.
"""

from __future__ import annotations

import hashlib
import json
import sys
from pathlib import Path

try:
    import tomllib
except ImportError:  # Python 3.10
    import tomli as tomllib

import click

from . import __version__, area, dataset, dtree, moo, quantizer, rtl
from .errors import InputError, InternalError
from .evaluator import EvalContext

DEFAULTS = {
    "dataset": None,
    "label_col": None,
    "split": 0.3,
    "seed": 0,
    "max_depth": None,
    "min_samples_split": 2,
    "pop": 100,
    "gens": 100,
    "eta_c": 20.0,
    "eta_m": 20.0,
    "crossover_prob": 0.9,
    "mutation_prob": None,
    "pmin": 2,
    "pmax": 8,
    "margin": 5,
    "area_model": "analytical",
    "lut": None,
    "inv_weight": 1.0,
    "and2_weight": 2.0,
    "or2_weight": 2.0,
}


def _resolve_config(config_path, out_dir, overrides) -> dict:
    cfg = dict(DEFAULTS)
    stored = Path(out_dir) / "run.json" if out_dir else None
    if stored is not None and stored.exists():
        with open(stored, encoding="utf-8") as fh:
            cfg.update(json.load(fh)["config"])
    if config_path:
        try:
            with open(config_path, "rb") as fh:
                file_cfg = tomllib.load(fh)
        except FileNotFoundError:
            raise InputError(f"config file not found: {config_path}") from None
        except tomllib.TOMLDecodeError as exc:
            raise InputError(f"invalid TOML in {config_path}: {exc}") from exc
        unknown = set(file_cfg) - set(DEFAULTS)
        if unknown:
            raise InputError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(file_cfg)
    cfg.update({k: v for k, v in overrides.items() if v is not None})
    return cfg


def _config_hash(cfg: dict) -> str:
    canon = json.dumps(cfg, sort_keys=True)
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def _provenance(cfg: dict) -> dict:
    return {
        "tool": "approxtree",
        "version": __version__,
        "seed": cfg["seed"],
        "config_hash": _config_hash(cfg),
    }


def _csv_header(cfg: dict) -> str:
    return (
        f"# approxtree={__version__} config_hash={_config_hash(cfg)} seed={cfg['seed']}\n"
    )


def _prepare_split(cfg: dict) -> dataset.SplitPair:
    if not cfg["dataset"]:
        raise InputError("no dataset configured (use --dataset)")
    if cfg["label_col"] is None:
        raise InputError("no label column configured (use --label-col)")
    label_col = cfg["label_col"]
    if isinstance(label_col, str) and label_col.lstrip("-").isdigit():
        label_col = int(label_col)
    raw = dataset.load_csv(cfg["dataset"], label_col)
    pair = dataset.split(raw, float(cfg["split"]), int(cfg["seed"]))
    train = dataset.normalize(pair.train)
    test = dataset.normalize(pair.test, stats=train.norm_stats)
    return dataset.SplitPair(
        train=train,
        test=test,
        seed=pair.seed,
        test_fraction=pair.test_fraction,
        train_indices=pair.train_indices,
        test_indices=pair.test_indices,
    )


def _area_model(cfg: dict):
    if cfg["area_model"] == "lut":
        if not cfg["lut"]:
            raise InputError("--area-model lut requires --lut <path>")
        return area.lut_load(cfg["lut"])
    if cfg["area_model"] != "analytical":
        raise InputError(f"unknown area model {cfg['area_model']!r}")
    return area.GateWeights(
        inv=float(cfg["inv_weight"]),
        and2=float(cfg["and2_weight"]),
        or2=float(cfg["or2_weight"]),
    )


def _bounds(cfg: dict) -> quantizer.GeneBounds:
    return quantizer.GeneBounds(
        p_min=int(cfg["pmin"]), p_max=int(cfg["pmax"]), margin=int(cfg["margin"])
    )


def _context(cfg: dict, out: Path) -> tuple[EvalContext, dataset.SplitPair]:
    tree_path = out / "tree.json"
    if not tree_path.exists():
        raise InputError(f"no trained tree at {tree_path}; run `approxtree train` first")
    tree = dtree.import_json(tree_path)
    pair = _prepare_split(cfg)
    ctx = EvalContext(tree, pair.test, _area_model(cfg), bounds=_bounds(cfg))
    return ctx, pair


def _write_run_config(cfg: dict, out: Path) -> None:
    doc = {"provenance": _provenance(cfg), "config": cfg}
    with open(out / "run.json", "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _parse_selector(select: str):
    parts = select.split()
    if len(parts) == 1 and parts[0].lstrip("-").isdigit():
        return ("index", int(parts[0]))
    if len(parts) == 2 and parts[0] == "best-area-within":
        try:
            return ("best-area-within", float(parts[1]))
        except ValueError:
            raise InputError(f"bad loss bound in selector {select!r}") from None
    raise InputError(f"unrecognized selector {select!r}; use an index or 'best-area-within <loss>'")


def _select_member(front_doc: dict, select: str) -> dict:
    members = front_doc["members"]
    kind, value = _parse_selector(select)
    if kind == "index":
        if not 0 <= value < len(members):
            raise InputError(f"selector index {value} out of range (front has {len(members)} members)")
        return members[value]
    limit = front_doc["baseline"]["error"] + value
    eligible = [m for m in members if m["error"] <= limit]
    if not eligible:
        raise InputError(f"no front member within {value} error of the baseline")
    return min(eligible, key=lambda m: (m["area"], m["error"]))


@click.group()
def main():
    """Evolve approximate decision-tree circuits and emit their RTL."""


def _common_options(fn):
    opts = [
        click.option("--config", "config_path", type=click.Path(), default=None,
                     help="TOML config file; flags override it."),
        click.option("--out", "out_dir", type=click.Path(), required=True,
                     help="Run output directory."),
        click.option("--dataset", "dataset_path", type=click.Path(), default=None),
        click.option("--label-col", default=None, help="Label column name or 0-based index."),
        click.option("--split", type=float, default=None, help="Test fraction (default 0.3)."),
        click.option("--seed", type=int, default=None),
        click.option("--pmin", type=int, default=None),
        click.option("--pmax", type=int, default=None),
        click.option("--margin", type=int, default=None),
        click.option("--area-model", "area_model", type=click.Choice(["analytical", "lut"]),
                     default=None),
        click.option("--lut", "lut_path", type=click.Path(), default=None),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _gather(out_dir, config_path, **flags) -> tuple[dict, Path]:
    renames = {"dataset_path": "dataset", "lut_path": "lut"}
    overrides = {renames.get(k, k): v for k, v in flags.items()}
    cfg = _resolve_config(config_path, out_dir, overrides)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return cfg, out


@main.command()
@_common_options
@click.option("--max-depth", type=int, default=None)
@click.option("--min-samples-split", type=int, default=None)
def train(config_path, out_dir, **flags):
    """Train the exact tree and report its full-precision baseline."""
    cfg, out = _gather(out_dir, config_path, **flags)
    pair = _prepare_split(cfg)
    tree = dtree.train_cart(
        pair.train,
        dtree.TreeConfig(
            max_depth=cfg["max_depth"],
            min_samples_split=int(cfg["min_samples_split"]),
            seed=int(cfg["seed"]),
        ),
    )
    if tree.comparator_count == 0:
        raise InputError("tree has no comparators (dataset is trivially pure)")
    dtree.validate(tree)

    doc = dtree.to_dict(tree)
    doc["provenance"] = _provenance(cfg)
    with open(out / "tree.json", "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")

    ctx = EvalContext(tree, pair.test, _area_model(cfg), bounds=_bounds(cfg))
    base_chrom, base_obj = ctx.baseline()
    report = {
        "provenance": _provenance(cfg),
        "dataset": cfg["dataset"],
        "train_rows": pair.train.n_rows,
        "test_rows": pair.test.n_rows,
        "comparators": tree.comparator_count,
        "classes": tree.class_count,
        "float_train_accuracy": dtree.accuracy(tree, pair.train),
        "float_test_accuracy": dtree.accuracy(tree, pair.test),
        "baseline_quantized_accuracy": 1.0 - base_obj.error,
        "baseline_area": base_obj.area,
    }
    with open(out / "baseline.json", "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    _write_run_config(cfg, out)

    click.echo(f"comparators: {tree.comparator_count}")
    click.echo(f"float test accuracy: {report['float_test_accuracy']:.4f}")
    click.echo(f"baseline quantized accuracy: {report['baseline_quantized_accuracy']:.4f}")
    click.echo(f"baseline area: {base_obj.area:g}")


@main.command()
@_common_options
@click.option("--pop", type=int, default=None, help="Population size.")
@click.option("--gens", type=int, default=None, help="Generation count.")
def optimize(config_path, out_dir, **flags):
    """Run the NSGA-II search and write the Pareto front and history."""
    cfg, out = _gather(out_dir, config_path, **flags)
    ctx, _ = _context(cfg, out)
    ga_cfg = moo.GaConfig(
        population_size=int(cfg["pop"]),
        generations=int(cfg["gens"]),
        eta_c=float(cfg["eta_c"]),
        eta_m=float(cfg["eta_m"]),
        crossover_prob=float(cfg["crossover_prob"]),
        mutation_prob=cfg["mutation_prob"],
        seed=int(cfg["seed"]),
    )
    base_chrom, base_obj = ctx.baseline()
    front, history = moo.evolve(ctx, ga_cfg)

    base_area = base_obj.area
    members = []
    for idx, ind in enumerate(front.members):
        members.append(
            {
                "index": idx,
                "precisions": list(ind.chrom.precisions),
                "deltas": list(ind.chrom.deltas),
                "error": ind.obj.error,
                "accuracy": 1.0 - ind.obj.error,
                "area": ind.obj.area,
                "norm_area": ind.obj.area / base_area if base_area else 0.0,
            }
        )
    doc = {
        "provenance": _provenance(cfg),
        "baseline": {"error": base_obj.error, "area": base_area},
        "members": members,
    }
    with open(out / "pareto.json", "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")

    with open(out / "pareto.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_csv_header(cfg))
        fh.write("index,error,accuracy,area,norm_area,precisions,deltas\n")
        for m in members:
            fh.write(
                f"{m['index']},{m['error']!r},{m['accuracy']!r},{m['area']!r},"
                f"{m['norm_area']!r},{';'.join(map(str, m['precisions']))},"
                f"{';'.join(map(str, m['deltas']))}\n"
            )

    with open(out / "history.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_csv_header(cfg))
        fh.write("generation,best_error,min_area,front_size,hypervolume\n")
        for s in history:
            fh.write(
                f"{s.generation},{s.best_error!r},{s.min_area!r},"
                f"{s.front_size},{s.hypervolume!r}\n"
            )

    _write_run_config(cfg, out)
    click.echo(f"seed: {cfg['seed']}")
    click.echo(f"front size: {len(members)}")
    click.echo(f"best error: {min(m['error'] for m in members):.4f}")
    click.echo(f"min area: {min(m['area'] for m in members):g}")


@main.command()
@_common_options
@click.option("--select", default="best-area-within 0.01",
              help="Front member: an index or 'best-area-within <loss>'.")
@click.option("--module-name", default="tree_classifier")
def emit(config_path, out_dir, select, module_name, **flags):
    """Emit Verilog for one Pareto member, gated on software equivalence."""
    cfg, out = _gather(out_dir, config_path, **flags)
    pareto_path = out / "pareto.json"
    if not pareto_path.exists():
        raise InputError(f"no Pareto front at {pareto_path}; run `approxtree optimize` first")
    with open(pareto_path, encoding="utf-8") as fh:
        front_doc = json.load(fh)
    member = _select_member(front_doc, select)

    ctx, pair = _context(cfg, out)
    chrom = quantizer.Chromosome(
        precisions=tuple(member["precisions"]), deltas=tuple(member["deltas"])
    )
    qtree = quantizer.apply_chromosome(ctx.tree, chrom, bounds=ctx.bounds)
    net = rtl.build_netlist(qtree)

    mismatches = rtl.check_equivalence(net, qtree, pair.test.features)
    if mismatches:
        raise InternalError(
            f"netlist disagrees with quantized inference on {mismatches} test samples"
        )

    text = emit_design_text(net, module_name, cfg)
    with open(out / "design.v", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    quantizer.export_extended_json(qtree, out / "design.json")
    click.echo(f"emitted member {member['index']}: error {member['error']:.4f}, "
               f"area {member['area']:g}")


def emit_design_text(net: rtl.Netlist, module_name: str, cfg: dict) -> str:
    header = (
        f"// generated by approxtree {__version__}\n"
        f"// config_hash={_config_hash(cfg)} seed={cfg['seed']}\n"
    )
    return header + rtl.emit_verilog(net, module_name)


@main.command()
@click.argument("runs", nargs=-1, required=True, type=click.Path())
@click.option("--out", "report_dir", type=click.Path(), required=True)
@click.option("--select", default="best-area-within 0.01")
def report(runs, report_dir, select):
    """Summarize one or more completed runs; write plot data per run."""
    out = Path(report_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for run in runs:
        run_path = Path(run)
        try:
            with open(run_path / "baseline.json", encoding="utf-8") as fh:
                base = json.load(fh)
            with open(run_path / "pareto.json", encoding="utf-8") as fh:
                front_doc = json.load(fh)
        except FileNotFoundError as exc:
            raise InputError(f"incomplete run {run}: {exc.filename} missing") from None
        member = _select_member(front_doc, select)
        rows.append(
            {
                "run": run_path.name,
                "dataset": base["dataset"],
                "baseline_accuracy": base["baseline_quantized_accuracy"],
                "baseline_area": base["baseline_area"],
                "accuracy": member["accuracy"],
                "area": member["area"],
                "norm_area": member["norm_area"],
            }
        )
        plot_path = out / f"plot_{run_path.name}.csv"
        with open(plot_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("accuracy,norm_area\n")
            for m in front_doc["members"]:
                fh.write(f"{m['accuracy']!r},{m['norm_area']!r}\n")

    with open(out / "report.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("run,dataset,baseline_accuracy,baseline_area,accuracy,area,norm_area\n")
        for r in rows:
            fh.write(
                f"{r['run']},{r['dataset']},{r['baseline_accuracy']!r},"
                f"{r['baseline_area']!r},{r['accuracy']!r},{r['area']!r},"
                f"{r['norm_area']!r}\n"
            )

    width = max(len(r["run"]) for r in rows)
    click.echo(f"{'run'.ljust(width)}  accuracy  area        norm_area")
    for r in rows:
        click.echo(
            f"{r['run'].ljust(width)}  {r['accuracy']:.4f}    {r['area']:<10.4g}  "
            f"{r['norm_area']:.4f}"
        )


def entry() -> int:
    try:
        main.main(standalone_mode=False)
    except InputError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except InternalError as exc:
        click.echo(f"internal error: {exc}", err=True)
        return 3
    except click.ClickException as exc:
        exc.show()
        return 2
    except click.exceptions.Abort:
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(entry())
