"""Plain-text symmetry files.

A symmetry file is a list of ``key: value`` lines; a line starting with
whitespace continues the previous value and ``#`` starts a comment.  Keys:

``system``
    catalog id, ``CAGED``, ``TTW``, ``KEPLER-DEF`` or ``HYPERBOLOID-CAGED``
``k`` or ``p``, ``q``
    index of the system
``A``, ``B``, ``C``, ``D``
    coefficients of ``A d12 + B d1 + C d2 + D``, polynomial in ``H``, ``L2``
``operator``
    alternatively, a normal-ordered operator as ``d(m,n): coeff`` entries
    separated by ``;``
"""
from __future__ import annotations

from importlib import resources

__all__ = ["parse_symmetry_file", "read_data"]


def read_data(name: str) -> str:
    return resources.files("superint").joinpath(f"data/{name}").read_text()


def parse_symmetry_file(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    key = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if line[0].isspace():
            if key is None:
                raise ValueError(f"continuation line without a key: {raw!r}")
            out[key] += " " + line.strip()
            continue
        k, sep, v = line.partition(":")
        if not sep:
            raise ValueError(f"expected 'key: value', got {raw!r}")
        key = k.strip()
        if key in out:
            raise ValueError(f"duplicate key {key!r}")
        out[key] = v.strip()
    return out
