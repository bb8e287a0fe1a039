"""Bundled example CRNs and function specs."""

from __future__ import annotations

from importlib import resources

from .crn import Crn, parse_crn
from .semilinear import SemilinearFunctionSpec, parse_spec

__all__ = ["crn_names", "spec_names", "crn_text", "spec_text", "load_crn", "load_spec", "CORPUS_SPECS"]

CORPUS_SPECS = ("increment", "max_2x1_minus_x2", "halve_or_increment")


def _files(suffix: str) -> list[str]:
    root = resources.files(__package__) / "corpus"
    return sorted(p.name[: -len(suffix)] for p in root.iterdir() if p.name.endswith(suffix))


def crn_names() -> list[str]:
    return _files(".crn")


def spec_names() -> list[str]:
    return _files(".fnspec")


def _read(name: str, suffix: str) -> str:
    path = resources.files(__package__) / "corpus" / f"{name}{suffix}"
    if not path.is_file():
        raise KeyError(f"no bundled {suffix} named {name!r}")
    return path.read_text(encoding="utf-8")


def crn_text(name: str) -> str:
    return _read(name, ".crn")


def spec_text(name: str) -> str:
    return _read(name, ".fnspec")


def load_crn(name: str) -> Crn:
    return parse_crn(crn_text(name))


def load_spec(name: str) -> SemilinearFunctionSpec:
    return parse_spec(spec_text(name))
