"""Command line entry points: file codecs, experiments, fitting, the service.

Every subcommand is a thin wrapper around one library call chain, so a file
written through ``--out`` is byte-identical to what the library serializers
produce. Domain failures exit with a machine-readable JSON object on stderr:
2 for invalid input, 3 for unmet preconditions, 4 for I/O errors.
"""
from __future__ import annotations

import dataclasses
import functools
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click

from . import codec, corpus as corpus_lib
from .calibration import estimate_a, estimate_b, fit_weights
from .curves import densify
from .engine import GaConfig, Individual
from .errors import EvoshapeError, InvalidInputError, PreconditionError, \
    UnderdeterminedFitError
from .harness import doe_sweep, run_target_convergence, similarity_matrix
from .io import curve_to_dict, dump_json, dumps, ga_config_from_dict, \
    genome_to_dict, grid_csv, grid_to_dict, load_json, matrix_csv, \
    multi_trace_csv, params_to_dict, read_curve, read_genome, \
    read_judgments, read_params, trace_csv, trace_to_dict, write_curve, \
    write_genome, write_params
from .plotting import doe_figure, matrix_figure, save_figure, trace_figure
from .similarity import GENE_SPAN_DEFAULT, SimilarityParams, compute_bounds, \
    genome_distance, similarity_index

EXIT_INVALID = 2
EXIT_PRECONDITION = 3
EXIT_IO = 4


def _fail(exc: BaseException, code: int) -> None:
    click.echo(dumps({"error": type(exc).__name__, "message": str(exc)}),
               err=True)
    sys.exit(code)


def _guarded(fn):
    # PreconditionError first: it is also an EvoshapeError
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except PreconditionError as exc:
            _fail(exc, EXIT_PRECONDITION)
        except EvoshapeError as exc:
            _fail(exc, EXIT_INVALID)
        except OSError as exc:
            _fail(exc, EXIT_IO)
    return wrapper


def _emit_json(data: dict, out: str | None) -> None:
    if out is None:
        click.echo(dumps(data))
    else:
        dump_json(out, data)


def _emit_text(text: str, out: str | None) -> None:
    if out is None:
        click.echo(text, nl=not text.endswith("\n"))
    else:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)


def _figure_path(out: str | None, figures: str | None, name: str) -> Path | None:
    if figures is not None:
        return Path(figures) / f"{name}.png"
    if out is not None:
        return Path(out).with_suffix(".png")
    return None


def _int_list(text: str, option: str) -> list[int]:
    try:
        values = [int(tok) for tok in text.replace(",", " ").split()]
    except ValueError:
        raise InvalidInputError(f"{option} expects comma-separated integers")
    if not values:
        raise InvalidInputError(f"{option} must not be empty")
    return values


def _read_genome_dir(path: str) -> tuple[list[str], list]:
    files = sorted(Path(path).glob("*.json"))
    if not files:
        raise InvalidInputError(f"no genome files (*.json) in {path}")
    ids, genomes = [], []
    for file in files:
        try:
            genomes.append(read_genome(file))
        except InvalidInputError as exc:
            raise InvalidInputError(f"{file.name}: {exc}") from exc
        ids.append(file.stem)
    return ids, genomes


def _best_payload(best: Individual) -> dict:
    return {"id": best.id, "fitness": best.fitness,
            "generation_born": best.generation_born,
            "genome": genome_to_dict(best.genome)}


@click.group()
def main():
    """Evolutionary silhouette design workbench."""


@main.command()
@click.argument("curve_file")
@click.option("--harmonics", default=codec.CodecConfig().harmonic_count,
              show_default=True, help="number of harmonics H")
@click.option("--points", default=None, type=int,
              help="densified sample count before encoding "
                   "(default max(1500, curve size); 0 keeps the raw points)")
@click.option("--normalize/--no-normalize", "do_normalize", default=True,
              show_default=True)
@click.option("--out", default=None, help="output file (default stdout)")
@_guarded
def encode(curve_file, harmonics, points, do_normalize, out):
    """Encode a closed-curve file into a genome."""
    curve = read_curve(curve_file)
    if points is None:
        points = max(codec.CodecConfig().interpolated_point_count, len(curve))
    if points:
        curve = densify(curve, max(points, len(curve)))
    genome = codec.encode(curve, harmonics)
    if do_normalize:
        genome = codec.normalize(genome)
    _emit_json(genome_to_dict(genome), out)


@main.command()
@click.argument("genome_file")
@click.option("--precision", default=None, type=int,
              help="harmonics kept when decoding (default: all)")
@click.option("--samples", default=codec.CodecConfig().decode_sample_count,
              show_default=True, help="points on the decoded curve")
@click.option("--out", default=None, help="output file (default stdout)")
@_guarded
def decode(genome_file, precision, samples, out):
    """Decode a genome file into a closed curve."""
    genome = read_genome(genome_file)
    curve = codec.decode(genome, precision=precision, sample_count=samples)
    _emit_json(curve_to_dict(curve), out)


@main.command()
@click.argument("genome_a")
@click.argument("genome_b")
@click.option("--params", "params_file", required=True,
              help="similarity parameter file")
@click.option("--out", default=None, help="output file (default stdout)")
@_guarded
def similarity(genome_a, genome_b, params_file, out):
    """Similarity index between two genome files."""
    params = read_params(params_file)
    g_a, g_b = read_genome(genome_a), read_genome(genome_b)
    _emit_json({"similarity": similarity_index(g_a, g_b, params),
                "distance": genome_distance(g_a, g_b, params)}, out)


@main.command()
@click.argument("genome_dir")
@click.option("--params", "params_file", required=True,
              help="similarity parameter file")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]),
              default="csv", show_default=True)
@click.option("--out", default=None, help="output file (default stdout)")
@click.option("--figures", default=None,
              help="directory for the rendered figure")
@_guarded
def matrix(genome_dir, params_file, fmt, out, figures):
    """Pairwise similarity matrix over a directory of genome files."""
    ids, genomes = _read_genome_dir(genome_dir)
    params = read_params(params_file)
    values = similarity_matrix(genomes, params)
    if fmt == "csv":
        _emit_text(matrix_csv(ids, values), out)
    else:
        _emit_json({"ids": ids, "matrix": values.tolist()}, out)
    path = _figure_path(out, figures, "matrix")
    if path is not None:
        save_figure(matrix_figure(ids, values), path)


@main.command()
@click.argument("curve_file")
@click.option("--p-list", required=True,
              help="decode precisions, comma-separated")
@click.option("--n-list", required=True,
              help="densified point counts, comma-separated")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]),
              default="csv", show_default=True)
@click.option("--out", default=None, help="output file (default stdout)")
@click.option("--figures", default=None,
              help="directory for the rendered figure")
@_guarded
def doe(curve_file, p_list, n_list, fmt, out, figures):
    """Reconstruction-error sweep over precision and point count."""
    curve = read_curve(curve_file)
    grid = doe_sweep(curve, _int_list(p_list, "--p-list"),
                     _int_list(n_list, "--n-list"))
    if fmt == "csv":
        _emit_text(grid_csv(grid), out)
    else:
        _emit_json(grid_to_dict(grid), out)
    path = _figure_path(out, figures, "doe")
    if path is not None:
        save_figure(doe_figure(grid), path)


@main.command()
@click.option("--judgments", "judgments_file", required=True,
              help="judgment JSONL file")
@click.option("--model", type=click.Choice(["exp", "weighted"]), required=True)
@click.option("--reference", "reference_dir", default=None,
              help="directory of genomes for the distance bounds "
                   "(default: the built-in corpus)")
@click.option("--gene-span", default=GENE_SPAN_DEFAULT, show_default=True)
@click.option("--out", default=None, help="output file (default stdout)")
@_guarded
def fit(judgments_file, model, reference_dir, gene_span, out):
    """Fit similarity parameters from a judgment log."""
    judgments = read_judgments(judgments_file)
    iso = [j for j in judgments if j.iso_similar]
    if not iso:
        raise UnderdeterminedFitError("no iso-similar judgments in the log")
    if reference_dir is not None:
        _, reference = _read_genome_dir(reference_dir)
    else:
        reference = corpus_lib.encode_corpus(corpus_lib.sample_corpus())
    bounds = compute_bounds(reference, gene_span)
    if model == "exp":
        b = estimate_b(iso)
        graded = [j for j in iso if j.similarity_level is not None]
        if not graded:
            raise UnderdeterminedFitError(
                "the exponential scale needs judgments with a similarity level")
        a = estimate_a(graded, b, gene_span)
        params = SimilarityParams(model="exponential", bounds=bounds,
                                  a=a.mean, b=b, gene_span=gene_span)
    else:
        weights = fit_weights(iso, gene_span)
        params = SimilarityParams(model="weighted", bounds=bounds,
                                  weights=weights, gene_span=gene_span)
    if out is None:
        click.echo(dumps(params_to_dict(params)))
    else:
        write_params(out, params)


@main.command("target-run")
@click.option("--target", "target_file", required=True,
              help="target genome file")
@click.option("--initial", "initial_dir", default=None,
              help="directory of initial genomes (default: the built-in corpus)")
@click.option("--generations", default=10, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--repeats", default=1, show_default=True,
              help="run seeds seed..seed+k-1 and merge the traces")
@click.option("--config", "config_file", default=None,
              help="GA config JSON file")
@click.option("--params", "params_file", default=None,
              help="similarity parameter file (default: fitted to the initial set)")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]),
              default="csv", show_default=True)
@click.option("--out", default=None, help="output file (default stdout)")
@click.option("--figures", default=None,
              help="directory for the rendered figure")
@click.option("--best", "best_out", default=None,
              help="also write the best genome to this file")
@_guarded
def target_run(target_file, initial_dir, generations, seed, repeats,
               config_file, params_file, fmt, out, figures, best_out):
    """Automated convergence runs toward a target genome."""
    if repeats < 1:
        raise InvalidInputError("repeats must be >= 1")
    target = read_genome(target_file)
    if initial_dir is not None:
        _, initial = _read_genome_dir(initial_dir)
    else:
        initial = corpus_lib.encode_corpus(corpus_lib.sample_corpus())
    if params_file is not None:
        params = read_params(params_file)
    else:
        params = corpus_lib.reference_params(initial)
    if config_file is not None:
        base = ga_config_from_dict(load_json(config_file))
    else:
        base = GaConfig()

    def run_one(rng_seed: int):
        config = dataclasses.replace(base, rng_seed=rng_seed)
        return run_target_convergence(target, initial, config, params,
                                      generations)

    seeds = [seed + k for k in range(repeats)]
    if repeats == 1:
        results = [run_one(seeds[0])]
    else:
        with ThreadPoolExecutor(max_workers=min(repeats, 8)) as pool:
            results = list(pool.map(run_one, seeds))

    runs = [(s, trace) for s, (trace, _) in zip(seeds, results)]
    if fmt == "csv":
        text = trace_csv(runs[0][1]) if repeats == 1 else multi_trace_csv(runs)
        _emit_text(text, out)
    elif repeats == 1:
        _emit_json({"seed": seeds[0], "trace": trace_to_dict(runs[0][1]),
                    "best": _best_payload(results[0][1])}, out)
    else:
        _emit_json({"runs": [
            {"seed": s, "trace": trace_to_dict(trace),
             "best": _best_payload(best)}
            for (s, trace), (_, best) in zip(runs, results)]}, out)
    if best_out is not None:
        # across repeats: highest final fitness, earliest seed on ties
        best = max((b for _, b in results), key=lambda b: b.fitness)
        write_genome(best_out, best.genome)
    path = _figure_path(out, figures, "trace")
    if path is not None:
        save_figure(trace_figure(runs), path)


@main.command("corpus")
@click.option("--count", default=corpus_lib.CORPUS_SIZE_DEFAULT,
              show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "out_dir", required=True,
              help="directory for the curve and genome files")
@_guarded
def make_corpus(count, seed, out_dir):
    """Write the sample corpus as curve and genome files."""
    curves = corpus_lib.sample_corpus(count, seed)
    genomes = corpus_lib.encode_corpus(curves)
    base = Path(out_dir)
    for name, items, writer in (("curves", curves, write_curve),
                                ("genomes", genomes, write_genome)):
        directory = base / name
        directory.mkdir(parents=True, exist_ok=True)
        for k, item in enumerate(items):
            writer(directory / f"corpus-{k:03d}.json", item)
    click.echo(dumps({"count": len(curves),
                      "curves": str(base / "curves"),
                      "genomes": str(base / "genomes")}))


@main.command()
@click.option("--config", "config_file", default=None,
              help="service config JSON file")
@click.option("--host", default=None, help="override the listen address")
@click.option("--port", default=None, type=int, help="override the port")
@_guarded
def serve(config_file, host, port):
    """Run the JSON service."""
    # lazy: the web stack should not slow down batch commands
    import uvicorn

    from .server import ServiceConfig, create_app, load_service_config

    config = load_service_config(config_file) if config_file \
        else ServiceConfig()
    if host is not None or port is not None:
        config = dataclasses.replace(config, host=host or config.host,
                                     port=port or config.port)
    uvicorn.run(create_app(config), host=config.host, port=config.port)


if __name__ == "__main__":
    main()
