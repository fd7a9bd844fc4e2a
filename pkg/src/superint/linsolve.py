"""Sparse exact Gauss-Jordan elimination over a sympy field domain.

Dense RREF over a multivariate fraction field swells badly; these systems are
very sparse, so pivots are picked by Markowitz cost and then by entry size.
"""
from __future__ import annotations

__all__ = ["sparse_rref", "sparse_nullspace", "sparse_rank"]


def _size(x) -> int:
    num = getattr(x, "numer", None)
    if num is None:
        return 1
    return len(num.terms()) + len(x.denom.terms())


def sparse_rref(rows, K):
    """Reduce ``rows`` (list of ``{col: value}``) in place.

    Returns ``{pivot column: reduced row}``; each reduced row has ``1`` at its
    pivot and no entries in other pivot columns.
    """
    rows = [{c: v for c, v in r.items() if v != 0} for r in rows]
    live = {i for i, r in enumerate(rows) if r}
    colrows: dict = {}
    for i in live:
        for c in rows[i]:
            colrows.setdefault(c, set()).add(i)
    pivots: dict = {}
    done: set = set()
    while True:
        best = None
        for i in live - done:
            r = rows[i]
            rl = len(r) - 1
            for c, v in r.items():
                cost = (rl * (len(colrows[c]) - 1), _size(v), c)
                if best is None or cost < best[0]:
                    best = (cost, i, c)
        if best is None:
            break
        _, i, c = best
        done.add(i)
        inv = K.one / rows[i][c]
        prow = {k: v * inv for k, v in rows[i].items()}
        rows[i] = prow
        for j in list(colrows[c]):
            if j == i:
                continue
            r = rows[j]
            f = r[c]
            for k, v in prow.items():
                nv = r.get(k, K.zero) - f * v
                if nv == 0:
                    if k in r:
                        del r[k]
                        colrows[k].discard(j)
                else:
                    if k not in r:
                        colrows.setdefault(k, set()).add(j)
                    r[k] = nv
            if not r:
                live.discard(j)
        pivots[c] = i
    return {c: rows[i] for c, i in pivots.items()}


def sparse_rank(rows, K) -> int:
    return len(sparse_rref(rows, K))


def sparse_nullspace(rows, ncols: int, K) -> list[dict]:
    """Basis of ``{x : R x = 0}``, one vector per non-pivot column."""
    red = sparse_rref(rows, K)
    out = []
    for f in range(ncols):
        if f in red:
            continue
        vec = {f: K.one}
        for c, r in red.items():
            v = r.get(f)
            if v is not None and v != 0:
                vec[c] = -v
        out.append(vec)
    return out
