"""Command-line front end.

Exit status: 0 on success, 2 on a domain/usage error, 3 when a verification
(brute force vs closed form, symmetry, block structure) fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import platform
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

from . import __version__
from .blocks import (
    DEFAULT_VERIFY_CAP,
    block_basis,
    count_dimensions,
    decompose_desired,
    reachable_basis,
    support_counts,
)
from .errors import DomainError, IntegrityError
from .fermiops import OperatorKind, build_operator_matrix, write_matrix_market
from .fockspace import SectorBasis, check_n_pairs, desired_basis, enumerate_sector, full_fock_basis
from .hubbard import HubbardParams, build_hamiltonian, default_params, load_params_json
from .memmodel import FIGURES, MemoryModel
from .spectra import block_spectra, eigen_spectrum, verify_block_diagonal

COMMANDS = ("dims", "blocks", "support", "hamiltonian", "spectrum", "memory", "export")

EXIT_OK, EXIT_DOMAIN, EXIT_INTEGRITY = 0, 2, 3


@dataclass
class RunConfig:
    command: str
    n_pairs: int | None = None
    params_path: str | None = None
    output_path: str | None = None
    verify: bool = False
    verify_cap: int = DEFAULT_VERIFY_CAP
    per_block: bool = False
    w_double_count: bool = False
    sector: str = "desired"
    figure: int = 2
    model: MemoryModel = field(default_factory=MemoryModel)
    gnuplot_dir: str | None = None
    header: bool = False
    kind: str = "annihilation"
    orbital: int = 0
    domain: str | None = None
    codomain: str | None = None
    argv: list[str] = field(default_factory=list)

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise DomainError(f"unknown command {self.command!r}")
        if self.n_pairs is not None:
            check_n_pairs(self.n_pairs)
        needs_n = {"dims", "blocks", "support", "memory", "export"}
        if self.command in needs_n and self.n_pairs is None:
            raise DomainError(f"'{self.command}' requires --qubits")
        if self.command in ("hamiltonian", "spectrum") and self.n_pairs is None \
                and self.params_path is None:
            raise DomainError(f"'{self.command}' requires --qubits or --params")


def _csv(rows: Sequence[Sequence[object]]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _bool(flag: bool) -> str:
    return "true" if flag else "false"


def _emit(config: RunConfig, text: str) -> None:
    if config.output_path is None:
        sys.stdout.write(text)
        return
    path = Path(config.output_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="\n")
    _write_sidecar(config, path)


def _write_sidecar(config: RunConfig, path: Path) -> None:
    # Run metadata lives next to the artifact so the artifact itself stays reproducible.
    meta = {
        "command": config.command,
        "argv": config.argv,
        "version": __version__,
        "python": platform.python_version(),
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    Path(str(path) + ".meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n",
                                              encoding="utf-8")


def _summary(text: str) -> None:
    print(text, file=sys.stderr)


def _load_params(config: RunConfig) -> HubbardParams:
    if config.params_path is not None:
        params, _ = load_params_json(config.params_path)
        if config.n_pairs is not None and config.n_pairs != params.n_pairs:
            raise DomainError(f"--qubits {config.n_pairs} but parameters describe "
                              f"{params.n_pairs} pairs")
    else:
        params = default_params(config.n_pairs)
    if config.w_double_count:
        params = params.with_(w_double_count=True)
    return params


def _resolve_basis(spec: str, n_pairs: int, n_electrons: int | None = None) -> SectorBasis:
    """Basis from a name: desired, full, fock, reachable, block:UD, reachable:UD, sz=K."""
    ne = 3 * n_pairs if n_electrons is None else n_electrons
    if spec == "desired":
        return desired_basis(n_pairs)
    if spec == "full":
        return enumerate_sector(n_pairs, ne)
    if spec.startswith("sz="):
        return enumerate_sector(n_pairs, ne, int(spec[3:]))
    if spec == "fock":
        return full_fock_basis(n_pairs)
    if spec == "reachable":
        return reachable_basis(desired_basis(n_pairs))
    if spec.startswith("block:"):
        return block_basis(n_pairs, spec[6:])
    if spec.startswith("reachable:"):
        pattern = spec[len("reachable:"):].removeprefix("block:")
        return reachable_basis(block_basis(n_pairs, pattern))
    raise DomainError(f"unknown basis {spec!r}")


def _cmd_dims(config: RunConfig) -> int:
    t = count_dimensions(config.n_pairs)
    _emit(config, _csv([t.as_row()]))
    _summary(f"N={t.n_pairs}: total={t.total} desired={t.desired} undesired={t.undesired}")
    return EXIT_OK


def _cmd_blocks(config: RunConfig) -> int:
    rows = [["N", "total", "desired", "undesired", "total_lower", "desired_reachable",
             "per_block", "shared", "unshared", "verified"]]
    for n in range(1, config.n_pairs + 1):
        dims = count_dimensions(n)
        verify = config.verify and n <= config.verify_cap
        sc = support_counts(n, verify=verify, verify_cap=config.verify_cap)
        rows.append([n, dims.total, dims.desired, dims.undesired, sc.total_lower,
                     sc.desired_reachable, sc.per_block, sc.shared, sc.unshared,
                     _bool(sc.verified)])
    _emit(config, _csv(rows))
    _summary(f"blocks: {config.n_pairs} rows, verify={_bool(config.verify)}")
    return EXIT_OK


def _cmd_support(config: RunConfig) -> int:
    sc = support_counts(config.n_pairs, verify=config.verify, verify_cap=config.verify_cap)
    rows = []
    if config.header:
        rows.append(["N", "total_lower", "desired_reachable", "undesired_lower",
                     "per_block", "shared", "unshared", "verified"])
    rows.append([sc.n_pairs, *sc.as_row(), _bool(sc.verified)])
    _emit(config, _csv(rows))
    degree = f" sharing degrees {sc.sharing_degree}" if sc.verified else ""
    _summary(f"support N={sc.n_pairs}: verified={_bool(sc.verified)}{degree}")
    return EXIT_OK


def _hamiltonian(config: RunConfig):
    params = _load_params(config)
    basis = _resolve_basis(config.sector, params.n_pairs)
    return params, basis, build_hamiltonian(params, basis)


def _cmd_hamiltonian(config: RunConfig) -> int:
    _, basis, H = _hamiltonian(config)
    buf = io.BytesIO()
    write_matrix_market(H, buf)
    _emit(config, buf.getvalue().decode("utf-8"))
    _summary(f"hamiltonian on {basis.basis_id}: {H.nnz} nonzeros")
    return EXIT_OK


def _fmt(x: float) -> str:
    return repr(float(x))


def _cmd_spectrum(config: RunConfig) -> int:
    params, basis, H = _hamiltonian(config)
    rows = [["index", "value_eV", "block_label"]]
    if config.per_block:
        if config.sector != "desired":
            raise DomainError("--per-block needs the desired sector")
        decomposition = decompose_desired(params.n_pairs)
        ok, worst = verify_block_diagonal(H, decomposition)
        if not ok:
            raise IntegrityError(f"Hamiltonian not block diagonal: max off-block {worst:.3e}")
        i = 0
        for label, spec in block_spectra(H, decomposition).items():
            for value in spec.eigenvalues:
                rows.append([i, _fmt(value), label])
                i += 1
    else:
        spec = eigen_spectrum(H)
        rows += [[i, _fmt(v), config.sector] for i, v in enumerate(spec.eigenvalues)]
    _emit(config, _csv(rows))
    _summary(f"spectrum on {basis.basis_id}: {len(rows) - 1} eigenvalues")
    return EXIT_OK


def _cmd_memory(config: RunConfig) -> int:
    if config.figure not in FIGURES:
        raise DomainError(f"--figure must be one of {sorted(FIGURES)}")
    report = FIGURES[config.figure](range(1, config.n_pairs + 1), config.model)
    _emit(config, report.to_csv())
    if config.gnuplot_dir:
        report.write_gnuplot(config.gnuplot_dir, prefix=f"fig{config.figure}")
    _summary(f"memory figure {config.figure}: {len(report.rows)} rows")
    return EXIT_OK


def _cmd_export(config: RunConfig) -> int:
    n = config.n_pairs
    kind = OperatorKind(config.kind)
    domain_spec = config.domain or ("reachable" if kind is OperatorKind.CREATION else "desired")
    domain = _resolve_basis(domain_spec, n)
    default_codomain = {"annihilation": "reachable", "creation": "desired", "number": domain_spec}
    codomain_spec = config.codomain or default_codomain[kind.value]
    if kind is OperatorKind.CREATION and codomain_spec.split(":")[0] in ("desired", "block"):
        # c-dagger back onto a restricted space: adjoint of the restricted c.
        upper = _resolve_basis(codomain_spec, n)
        op = build_operator_matrix("annihilation", config.orbital, upper, domain).transpose(
            label=f"creation[{config.orbital}]")
    else:
        shift = kind.electron_shift
        ne = None if domain.n_electrons is None else domain.n_electrons + shift
        codomain = _resolve_basis(codomain_spec, n, ne)
        op = build_operator_matrix(kind, config.orbital, domain, codomain)
    buf = io.BytesIO()
    write_matrix_market(op, buf)
    _emit(config, buf.getvalue().decode("utf-8"))
    _summary(f"{op.label}: {op.shape[0]}x{op.shape[1]}, {op.nnz} nonzeros")
    return EXIT_OK


_HANDLERS = {
    "dims": _cmd_dims,
    "blocks": _cmd_blocks,
    "support": _cmd_support,
    "hamiltonian": _cmd_hamiltonian,
    "spectrum": _cmd_spectrum,
    "memory": _cmd_memory,
    "export": _cmd_export,
}


def run(config: RunConfig) -> int:
    try:
        config.validate()
        return _HANDLERS[config.command](config)
    except IntegrityError as exc:
        print(f"integrity error: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    except (DomainError, ValueError) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dbqubit",
        description="Fock-space construction and Hilbert-space analysis for dangling-bond pair qubits.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, qubits_required=False):
        p.add_argument("--qubits", type=int, required=qubits_required, metavar="N")
        p.add_argument("--out", metavar="PATH")

    p = sub.add_parser("dims", help="total/desired/undesired dimensions")
    common(p, True)

    p = sub.add_parser("blocks", help="dimension and support table for N = 1..qubits")
    common(p, True)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--verify-cap", type=int, default=DEFAULT_VERIFY_CAP)

    p = sub.add_parser("support", help="annihilation-support counts")
    common(p, True)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--verify-cap", type=int, default=DEFAULT_VERIFY_CAP)
    p.add_argument("--header", action="store_true")

    for name, helptext in (("hamiltonian", "Hamiltonian as Matrix Market"),
                           ("spectrum", "eigenvalues as CSV")):
        p = sub.add_parser(name, help=helptext)
        common(p)
        p.add_argument("--params", metavar="FILE")
        p.add_argument("--sector", default="desired",
                       help="desired | full | sz=K | block:UD... (default: desired)")
        p.add_argument("--w-double-count", action="store_true")
        if name == "spectrum":
            p.add_argument("--per-block", action="store_true")

    p = sub.add_parser("memory", help="classical-memory series for N = 1..qubits")
    common(p, True)
    p.add_argument("--figure", type=int, default=2, choices=sorted(FIGURES))
    p.add_argument("--bytes-per-amplitude", type=int, default=16)
    p.add_argument("--bytes-per-triplet", type=int, default=20)
    p.add_argument("--matrix-mode", choices=("dense", "triplet"), default="dense")
    p.add_argument("--bitstring-storage", action="store_true")
    p.add_argument("--gnuplot-dir", metavar="DIR")

    p = sub.add_parser("export", help="one ladder/number operator as Matrix Market")
    common(p, True)
    p.add_argument("--kind", choices=[k.value for k in OperatorKind], default="annihilation")
    p.add_argument("--orbital", type=int, default=0)
    p.add_argument("--domain", help="default: reachable for creation, else desired")
    p.add_argument("--codomain")
    return parser


def config_from_args(args: argparse.Namespace, argv: list[str]) -> RunConfig:
    get = lambda name, default=None: getattr(args, name, default)  # noqa: E731
    return RunConfig(
        command=args.command,
        n_pairs=args.qubits,
        params_path=get("params"),
        output_path=args.out,
        verify=get("verify", False),
        verify_cap=get("verify_cap", DEFAULT_VERIFY_CAP),
        per_block=get("per_block", False),
        w_double_count=get("w_double_count", False),
        sector=get("sector", "desired"),
        figure=get("figure", 2),
        model=MemoryModel(
            bytes_per_amplitude=get("bytes_per_amplitude", 16),
            matrix_mode=get("matrix_mode", "dense"),
            bytes_per_triplet=get("bytes_per_triplet", 20),
            bitstring_storage=get("bitstring_storage", False),
        ),
        gnuplot_dir=get("gnuplot_dir"),
        header=get("header", False),
        kind=get("kind", "annihilation"),
        orbital=get("orbital", 0),
        domain=get("domain"),
        codomain=get("codomain"),
        argv=argv,
    )


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args, argv)
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
