"""Batch command line: ``qslab <command> [flags]``.

Every command writes its outputs into ``--out`` (a directory) together with
``manifest-<command>.json`` recording flags, versions, seeds and SHA-256
digests of inputs and outputs. Nothing time- or host-dependent is written, so
reruns with the same flags give byte-identical files.

Exit codes: 0 success, 2 usage error, 3 validation error, 4 resource cap.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import platform
import sys

import numpy as np

from . import __version__, _accel
from .circuit import CZ, Connectivity, FSim, parse_circuit, random_circuit, serialize_circuit
from .core import (ParseError, Prng, ResourceCapError, SampleSet, ValidationError,
                   derive_seed, read_samples, sample_from_distribution, write_samples)
from .dbm import compare_counts
from .distributions import (IntegerOrder, RandomPermutation, SubsetMask, SubsetParityOrder,
                            dataset_name, make_dataset, random_mask)
from .learner import (capacity_sweep, fit_ar, fit_product, model_from_json, model_sample,
                      model_to_json, sweep_csv)
from .metrics import (chi2_csv, chi2_test, conditional_csv, conditional_report, csv_text,
                      entropy, fit_exponential, pt_reference_entropy, xeb, xeb_csv)
from .simulator import (NoiseModel, apply_noise, output_distribution, read_distribution,
                        write_distribution)

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_RESOURCE = 0, 2, 3, 4


class UsageError(Exception):
    pass


# ------------------------------------------------------------- helpers ---

def _int_range(text: str) -> list[int]:
    """"a:b" (inclusive) or a comma list."""
    try:
        if ":" in text:
            lo, hi = text.split(":")
            return list(range(int(lo), int(hi) + 1))
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}; use a:b or a,b,c") from None


def _digest(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


class Run:
    """Collects outputs and inputs, then writes the manifest."""

    def __init__(self, args):
        self.args = args
        self.out = args.out
        os.makedirs(self.out, exist_ok=True)
        self.inputs: dict[str, str] = {}
        self.outputs: dict[str, str] = {}
        self.seeds: dict[str, int] = {"seed": args.seed}

    def input(self, path: str | None) -> str | None:
        if path is None:
            return None
        if not os.path.exists(path):
            raise ValidationError(f"input file not found: {path}")
        self.inputs[os.path.basename(path)] = _digest(path)
        return path

    def path(self, name: str) -> str:
        return os.path.join(self.out, name)

    def write_text(self, name: str, text: str) -> str:
        p = self.path(name)
        with open(p, "w", newline="\n") as fh:
            fh.write(text)
        return self.done(name)

    def done(self, name: str) -> str:
        p = self.path(name)
        self.outputs[name] = _digest(p)
        return p

    def finish(self) -> None:
        flags = {k: v for k, v in sorted(vars(self.args).items()) if k != "func"}
        doc = {
            "command": self.args.command,
            "flags": flags,
            "seeds": self.seeds,
            "versions": {
                "qslab": __version__, "numpy": np.__version__,
                "numba": getattr(_accel.numba, "__version__", None),
                "python": platform.python_version(), "backend": _accel.backend_name(),
            },
            "inputs": self.inputs,
            "outputs": self.outputs,
        }
        with open(self.path(f"manifest-{self.args.command}.json"), "w", newline="\n") as fh:
            fh.write(json.dumps(doc, indent=1, sort_keys=True, default=str) + "\n")


def _load_circuit(run: Run, path: str):
    with open(run.input(path)) as fh:
        return parse_circuit(fh.read())


def _truth(run: Run, path: str | None):
    if path is None:
        raise ValidationError("a truth distribution file (--truth) is required")
    return read_distribution(run.input(path))


# ------------------------------------------------------------ commands ---

def cmd_circuit(args, run: Run) -> None:
    if args.n < 2:
        raise ValidationError("circuits need at least 2 qubits (two-qubit layers need pairs)")
    conn = Connectivity.parse(args.connectivity, args.n)
    gate = CZ if args.two_qubit == "cz" else FSim(args.fsim_theta, args.fsim_phi)
    c = random_circuit(args.n, args.depth, conn, gate, Prng(args.seed), no_repeat=args.no_repeat)
    run.write_text(args.name, serialize_circuit(c))
    counts = ", ".join(f"{k}={v}" for k, v in sorted(c.gate_counts().items()))
    print(f"{c.n} qubits, {c.depth} cycles: {counts or 'no gates'}")


def _distribution_for(args, run: Run):
    if args.circuit is not None:
        c = _load_circuit(run, args.circuit)
        dist = output_distribution(c, mem_cap_gib=args.mem_cap_gib)
    elif getattr(args, "dist", None) is not None:
        dist = read_distribution(run.input(args.dist))
    else:
        raise UsageError("give --circuit (or --dist)")
    if args.noise_f is not None:
        dist = apply_noise(dist, NoiseModel(args.noise_f))
    return dist


def cmd_simulate(args, run: Run) -> None:
    dist = _distribution_for(args, run)
    name = args.name or ("distribution.csv" if args.format == "csv" else "distribution.qsld")
    write_distribution(run.path(name), dist)
    run.done(name)
    print(f"wrote {2 ** dist.n} probabilities, entropy {entropy(dist):.6f} nats")


def cmd_sample(args, run: Run) -> None:
    dist = _distribution_for(args, run)
    run.seeds["sample_seed"] = derive_seed(args.seed, 1)
    s = sample_from_distribution(dist, args.count, Prng(run.seeds["sample_seed"]))
    write_samples(run.path(args.name), s)
    run.done(args.name)
    print(f"wrote {len(s)} samples of {s.n} bits")


def _parse_mask(text: str, n: int) -> SubsetMask:
    if len(text) == n and not text.strip("01"):
        return SubsetMask(n, int(text, 2))
    try:
        return SubsetMask(n, int(text, 0))
    except ValueError:
        raise ValidationError(f"bad mask {text!r}: give {n} bits or an integer") from None


def cmd_ptgen(args, run: Run) -> None:
    n = args.n
    order = "permute" if args.permute else args.order
    if order == "integer":
        ordering = IntegerOrder()
    elif order == "parity":
        if args.mask is not None:
            mask = _parse_mask(args.mask, n)
        elif args.mask_bits is not None:
            if not 0 <= args.mask_bits <= n:
                raise ValidationError(f"--mask-bits {args.mask_bits} must be between 0 and n={n}")
            run.seeds["mask_seed"] = derive_seed(args.seed, 2)
            mask = random_mask(n, args.mask_bits, Prng(run.seeds["mask_seed"]))
        else:
            raise UsageError("--order parity needs --mask-bits or --mask")
        ordering = SubsetParityOrder(mask)
    else:
        ordering = RandomPermutation(args.perm_seed)
        run.seeds["perm_seed"] = args.perm_seed
    if n < 1:
        raise ValidationError("n must be at least 1")
    dist, samples = make_dataset(n, ordering, args.count, args.seed)
    run.seeds.update({k: v for k, v in samples.meta.items() if k.endswith("seed")})
    stem = dataset_name(n, ordering, args.seed)
    write_distribution(run.path(stem + ".qsld"), dist)
    run.done(stem + ".qsld")
    write_samples(run.path(stem + ".txt"), samples)
    run.done(stem + ".txt")
    extra = f" mask={samples.meta['mask']:0{n}b}" if "mask" in samples.meta else ""
    print(f"{stem}: {len(samples)} samples{extra}")


def cmd_train(args, run: Run) -> None:
    samples = read_samples(run.input(args.samples))
    if args.product:
        model = fit_product(samples)
    else:
        k = samples.n - 1 if args.ar_order is None else args.ar_order
        model = fit_ar(samples, k, args.alpha)
    run.write_text(args.name, model_to_json(model))
    print(f"{type(model).__name__}: {model.parameter_count} parameters")


def cmd_eval(args, run: Run) -> None:
    truth = _truth(run, args.truth)
    sources = [args.samples is not None, args.model is not None, args.uniform]
    if sum(sources) != 1:
        raise UsageError("give exactly one of --samples, --model, --uniform")
    if args.samples is not None:
        samples = read_samples(run.input(args.samples))
    else:
        run.seeds["eval_seed"] = derive_seed(args.seed, 3)
        rng = Prng(run.seeds["eval_seed"])
        if args.uniform:
            samples = SampleSet(truth.n, rng.integers(1 << truth.n, args.count), "uniform", rng.seed)
        else:
            with open(run.input(args.model)) as fh:
                model = model_from_json(fh.read())
            samples = model_sample(model, args.count, rng)
    r = xeb(samples, truth, raw=args.raw)
    run.write_text("xeb.csv", xeb_csv(r))
    line = f"F = {r.fidelity:.6f} +- {r.standard_error:.6f} (N={r.sample_count})"
    if args.chi2:
        c = chi2_test(samples.counts(), truth)
        run.write_text("chi2.csv", chi2_csv(c))
        line += f"; chi2 = {c.statistic:.3f}, dof = {c.degrees_of_freedom}, p = {c.p_value:.4g}"
    print(line)


def cmd_analyze(args, run: Run) -> None:
    kind = args.kind
    if kind == "entropy-sweep":
        rows = []
        conn = Connectivity.parse(args.connectivity, args.n)
        ref = pt_reference_entropy(args.n)
        for depth in args.depths:
            values = [entropy(output_distribution(
                random_circuit(args.n, depth, conn, rng=Prng(derive_seed(args.seed, s))),
                mem_cap_gib=args.mem_cap_gib)) for s in range(args.circuits)]
            rows.append((depth, float(np.mean(values)), ref))
        run.write_text("entropy_sweep.csv", csv_text(["depth", "entropy", "pt_reference"], rows))
    elif kind == "conditionals":
        if args.dist is not None:
            dist = read_distribution(run.input(args.dist))
        elif args.circuit is not None:
            dist = output_distribution(_load_circuit(run, args.circuit), mem_cap_gib=args.mem_cap_gib)
        else:
            raise UsageError("conditionals needs --dist or --circuit")
        rep = conditional_report(dist, args.max_order)
        run.write_text("conditionals.csv", conditional_csv(rep))
        for order, dev in sorted(rep.max_deviation.items()):
            print(f"order {order}: max |P - 1/2| = {dev:.6f}")
    elif kind == "dbm-count":
        if args.n < 2:
            raise ValidationError("dbm-count needs n >= 2")
        c = random_circuit(args.n, args.depth, Connectivity.parse(args.connectivity, args.n),
                           rng=Prng(args.seed))
        rows = compare_counts(c)
        header = ["cycle", "rule_hidden", "rule_deep", "hidden", "deep", "edges", "match"]
        run.write_text("dbm_count.csv", csv_text(header, [[r[h] for h in header] for r in rows]))
        for r in rows:
            print(f"cycle {r['cycle']}: rule {r['rule_hidden']}h/{r['rule_deep']}d, "
                  f"built {r['hidden']}h/{r['deep']}d/{r['edges']}e")
    elif kind == "capacity-sweep":
        samples = read_samples(run.input(args.samples))
        truth = _truth(run, args.truth)
        orders = args.orders if args.orders is not None else list(range(samples.n))
        rows = capacity_sweep([(os.path.basename(args.samples), samples, truth)], orders,
                              seed=args.seed, sample_count=args.count)
        run.write_text("capacity_sweep.csv", sweep_csv(rows))
    elif kind == "capacity-fit":
        if args.sweep is None:
            raise UsageError("capacity-fit needs --sweep")
        with open(run.input(args.sweep)) as fh:
            lines = fh.read().strip().split("\n")
        header = lines[0].split(",")
        if args.x not in header or "fidelity" not in header:
            raise ParseError(f"sweep CSV needs columns {args.x!r} and 'fidelity'", line=1)
        xi, yi = header.index(args.x), header.index("fidelity")
        try:
            pts = [(float(r.split(",")[xi]), float(r.split(",")[yi])) for r in lines[1:]]
        except (ValueError, IndexError):
            raise ParseError("malformed sweep row") from None
        f = fit_exponential(pts)
        run.write_text("capacity_fit.csv", csv_text(["a", "b", "c", "rms_residual", "degenerate"],
                                                    [(f.a, f.b, f.c, f.rms_residual, int(f.degenerate))]))
        print(f"y = {f.a:.6g} * exp({f.b:.6g} x) + {f.c:.6g}  (rms {f.rms_residual:.3g})")


# -------------------------------------------------------------- parser ---

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global")
    g.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    g.add_argument("--threads", type=int, default=None, help="worker threads (default: $QSL_THREADS or all)")
    g.add_argument("--out", default=".", help="output directory (default: current directory)")
    g.add_argument("--mem-cap-gib", type=float, default=None,
                   help="memory cap for explicit arrays (default: n <= 26)")

    p = argparse.ArgumentParser(prog="qslab", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"qslab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("circuit", parents=[common], help="generate a random circuit")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--depth", type=int, required=True)
    c.add_argument("--connectivity", default="chain", help="chain[:AB] or grid:RxC[:ABCD]")
    c.add_argument("--two-qubit", choices=("fsim", "cz"), default="fsim")
    c.add_argument("--fsim-theta", type=float, default=math.pi / 2)
    c.add_argument("--fsim-phi", type=float, default=math.pi / 6)
    c.add_argument("--no-repeat", action="store_true", help="never repeat a single-qubit gate on a qubit")
    c.add_argument("--name", default="circuit.json")
    c.set_defaults(func=cmd_circuit)

    for name, func, helptext in (("simulate", cmd_simulate, "write the output distribution"),
                                 ("sample", cmd_sample, "draw measurement samples")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("--circuit")
        s.add_argument("--noise-f", type=float, default=None, help="mix with uniform: f*P + (1-f)/2^n")
        if name == "simulate":
            s.add_argument("--format", choices=("qsld", "csv"), default="qsld")
            s.add_argument("--name", default=None)
        else:
            s.add_argument("--dist", help="sample from a distribution file instead of a circuit")
            s.add_argument("--count", type=int, default=500_000)
            s.add_argument("--name", default="samples.txt")
        s.set_defaults(func=func)

    t = sub.add_parser("ptgen", parents=[common], help="ordered Porter-Thomas dataset")
    t.add_argument("--n", type=int, required=True)
    t.add_argument("--order", choices=("integer", "parity", "permute"), default="integer")
    t.add_argument("--permute", action="store_true", help="same as --order permute")
    t.add_argument("--mask-bits", type=int, default=None, help="random parity mask with m set bits")
    t.add_argument("--mask", default=None, help="parity mask as n bits (qubit n-1 first) or an integer")
    t.add_argument("--perm-seed", type=int, default=0)
    t.add_argument("--count", type=int, default=500_000)
    t.set_defaults(func=cmd_ptgen)

    tr = sub.add_parser("train", parents=[common], help="fit a generative model to samples")
    tr.add_argument("--samples", required=True)
    m = tr.add_mutually_exclusive_group()
    m.add_argument("--ar-order", type=int, default=None, help="context length k (default n-1)")
    m.add_argument("--product", action="store_true", help="independent per-bit model")
    tr.add_argument("--alpha", type=float, default=0.5, help="additive smoothing")
    tr.add_argument("--name", default="model.json")
    tr.set_defaults(func=cmd_train)

    e = sub.add_parser("eval", parents=[common], help="XEB (and chi-squared) against a truth distribution")
    e.add_argument("--truth")
    e.add_argument("--samples")
    e.add_argument("--model")
    e.add_argument("--uniform", action="store_true", help="score uniformly random bitstrings")
    e.add_argument("--count", type=int, default=200_000, help="samples drawn from --model/--uniform")
    e.add_argument("--raw", action="store_true", help="unnormalised 2*sum(P)-1")
    e.add_argument("--chi2", action="store_true", help="also run a chi-squared test")
    e.set_defaults(func=cmd_eval)

    a = sub.add_parser("analyze", parents=[common], help="analysis tables as CSV")
    a.add_argument("kind", choices=("entropy-sweep", "conditionals", "dbm-count", "capacity-sweep", "capacity-fit"))
    a.add_argument("--n", type=int, default=12)
    a.add_argument("--depth", type=int, default=2)
    a.add_argument("--depths", type=_int_range, default=_int_range("1:14"))
    a.add_argument("--circuits", type=int, default=1, help="circuits averaged per depth")
    a.add_argument("--connectivity", default="chain")
    a.add_argument("--circuit")
    a.add_argument("--dist")
    a.add_argument("--max-order", type=int, default=3)
    a.add_argument("--samples")
    a.add_argument("--truth")
    a.add_argument("--orders", type=_int_range, default=None)
    a.add_argument("--count", type=int, default=200_000)
    a.add_argument("--sweep")
    a.add_argument("--x", default="k", help="sweep column used as x (k or params)")
    a.set_defaults(func=cmd_analyze)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    _accel.set_threads(args.threads)
    try:
        run = Run(args)
        args.func(args, run)
        run.finish()
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"qslab {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceCapError as exc:
        print(f"qslab {args.command}: resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ValidationError, FileNotFoundError, IndexError) as exc:
        print(f"qslab {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
