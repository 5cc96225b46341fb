"""Reverse-mode tape over numpy arrays.

This is not a general autodiff engine.  It covers exactly the operations
the recommendation pipeline composes: affine layers, pointwise
activations, gathers, masked attention softmax, per-row products against
constant matrices, and the scalar reductions of the loss.  Every op
returns a ``Var`` whose closure knows how to push gradients to its
parents; ``backward`` walks the graph once in reverse topological order.

Constants (numpy arrays) may appear anywhere a ``Var`` is accepted; they
become leaf nodes and simply accumulate gradients nobody reads.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError


class Var:
    """One node of the tape: a float64 array plus its backward closure."""

    __slots__ = ("value", "grad", "_parents", "_backward")

    def __init__(self, value, parents=(), backward=None):
        self.value = np.asarray(value, dtype=np.float64)
        self.grad = None
        self._parents = tuple(parents)
        self._backward = backward

    @property
    def shape(self):
        return self.value.shape

    def __repr__(self):
        return f"Var(shape={self.value.shape})"


def as_var(x) -> Var:
    return x if isinstance(x, Var) else Var(x)


def _accum(var: Var, g: np.ndarray) -> None:
    if var.grad is None:
        var.grad = np.zeros_like(var.value)
    var.grad += g


def _unbroadcast(g: np.ndarray, shape: tuple) -> np.ndarray:
    """Sum a gradient down to `shape` after numpy broadcasting."""
    extra = g.ndim - len(shape)
    if extra > 0:
        g = g.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and g.shape[i] != 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return g


def _toposort(root: Var) -> list[Var]:
    order: list[Var] = []
    seen: set[int] = set()
    stack: list[tuple[Var, bool]] = [(root, False)]
    while stack:
        node, processed = stack.pop()
        if processed:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            if id(parent) not in seen:
                stack.append((parent, False))
    return order


def backward(root: Var, seed=None) -> None:
    """Accumulate d(root)/d(leaf) into every reachable Var's .grad.

    Without an explicit seed the root must be scalar.  Gradients add to
    whatever is already in .grad, so callers zero parameters between
    steps (see zero_grad).
    """
    if seed is None:
        if root.value.ndim != 0:
            raise ConfigError("backward() without a seed requires a scalar root")
        seed = np.ones_like(root.value)
    _accum(root, np.asarray(seed, dtype=np.float64))
    for node in reversed(_toposort(root)):
        if node._backward is not None and node.grad is not None:
            node._backward(node.grad)


def zero_grad(vars_) -> None:
    for v in vars_:
        v.grad = None


# ---------------------------------------------------------------------------
# elementwise arithmetic (with numpy broadcasting)


def add(a, b) -> Var:
    a, b = as_var(a), as_var(b)

    def bwd(g):
        _accum(a, _unbroadcast(g, a.value.shape))
        _accum(b, _unbroadcast(g, b.value.shape))

    return Var(a.value + b.value, (a, b), bwd)


def sub(a, b) -> Var:
    a, b = as_var(a), as_var(b)

    def bwd(g):
        _accum(a, _unbroadcast(g, a.value.shape))
        _accum(b, _unbroadcast(-g, b.value.shape))

    return Var(a.value - b.value, (a, b), bwd)


def mul(a, b) -> Var:
    a, b = as_var(a), as_var(b)

    def bwd(g):
        _accum(a, _unbroadcast(g * b.value, a.value.shape))
        _accum(b, _unbroadcast(g * a.value, b.value.shape))

    return Var(a.value * b.value, (a, b), bwd)


def scale(a, c: float) -> Var:
    a = as_var(a)

    def bwd(g):
        _accum(a, g * c)

    return Var(a.value * c, (a,), bwd)


def neg(a) -> Var:
    return scale(a, -1.0)


# ---------------------------------------------------------------------------
# linear algebra


def linear(x, w: Var, b: Var | None = None) -> Var:
    """x @ w (+ b) for x of shape [in] or [batch, in], w of shape [in, out]."""
    x, w = as_var(x), as_var(w)
    if x.value.ndim not in (1, 2):
        raise ConfigError(f"linear expects 1-D or 2-D input, got shape {x.value.shape}")
    if x.value.shape[-1] != w.value.shape[0]:
        raise ConfigError(
            f"linear dimension mismatch: input {x.value.shape} vs weight {w.value.shape}"
        )
    out = x.value @ w.value
    parents = [x, w]
    if b is not None:
        if b.value.shape != (w.value.shape[1],):
            raise ConfigError(
                f"bias shape {b.value.shape} does not match weight {w.value.shape}"
            )
        out = out + b.value
        parents.append(b)

    def bwd(g):
        if x.value.ndim == 1:
            _accum(w, np.outer(x.value, g))
            _accum(x, w.value @ g)
            if b is not None:
                _accum(b, g)
        else:
            _accum(w, x.value.T @ g)
            _accum(x, g @ w.value.T)
            if b is not None:
                _accum(b, g.sum(axis=0))

    return Var(out, tuple(parents), bwd)


def rows_matvec(mats: np.ndarray, x) -> Var:
    """Per-row matrix-vector product against constant matrices.

    mats: constant [M, p, q]; x: Var [M, q] -> [M, p].  Gradients flow to
    x only (the matrices are fixed query stacks / their pseudoinverses).
    """
    x = as_var(x)
    mats = np.asarray(mats, dtype=np.float64)
    if mats.ndim != 3 or x.value.ndim != 2 or mats.shape[0] != x.value.shape[0] \
            or mats.shape[2] != x.value.shape[1]:
        raise ConfigError(
            f"rows_matvec shape mismatch: mats {mats.shape} vs x {x.value.shape}"
        )
    out = np.einsum("mpq,mq->mp", mats, x.value)

    def bwd(g):
        _accum(x, np.einsum("mpq,mp->mq", mats, g))

    return Var(out, (x,), bwd)


def rowdot(a, b) -> Var:
    """Row-wise inner product: [B, d] x [B, d] -> [B] (or [d] x [d] -> scalar)."""
    a, b = as_var(a), as_var(b)
    if a.value.shape != b.value.shape:
        raise ConfigError(f"rowdot shape mismatch: {a.value.shape} vs {b.value.shape}")
    out = (a.value * b.value).sum(axis=-1)

    def bwd(g):
        g = np.expand_dims(g, -1) if a.value.ndim > 0 else g
        _accum(a, g * b.value)
        _accum(b, g * a.value)

    return Var(out, (a, b), bwd)


def weighted_sum(w, h) -> Var:
    """Attention pooling: weights [B, H] against vectors [B, H, d] -> [B, d]."""
    w, h = as_var(w), as_var(h)
    if w.value.shape != h.value.shape[:2]:
        raise ConfigError(
            f"weighted_sum shape mismatch: weights {w.value.shape} vs vectors {h.value.shape}"
        )
    out = np.einsum("bh,bhd->bd", w.value, h.value)

    def bwd(g):
        _accum(w, np.einsum("bhd,bd->bh", h.value, g))
        _accum(h, np.einsum("bh,bd->bhd", w.value, g))

    return Var(out, (w, h), bwd)


# ---------------------------------------------------------------------------
# shape plumbing


def concat(parts, axis: int = -1) -> Var:
    parts = [as_var(p) for p in parts]
    values = [p.value for p in parts]
    out = np.concatenate(values, axis=axis)
    sizes = [v.shape[axis] for v in values]
    splits = np.cumsum(sizes)[:-1]

    def bwd(g):
        for p, piece in zip(parts, np.split(g, splits, axis=axis)):
            _accum(p, piece)

    return Var(out, tuple(parts), bwd)


def reshape(x, shape) -> Var:
    x = as_var(x)

    def bwd(g):
        _accum(x, g.reshape(x.value.shape))

    return Var(x.value.reshape(shape), (x,), bwd)


def broadcast_to(x, shape) -> Var:
    x = as_var(x)

    def bwd(g):
        _accum(x, _unbroadcast(g, x.value.shape))

    return Var(np.broadcast_to(x.value, shape).copy(), (x,), bwd)


def take_rows(x, idx) -> Var:
    """Gather along axis 0; idx may be any integer shape. Backward scatter-adds."""
    x = as_var(x)
    idx = np.asarray(idx)

    def bwd(g):
        if x.grad is None:
            x.grad = np.zeros_like(x.value)
        np.add.at(x.grad, idx, g)

    return Var(x.value[idx], (x,), bwd)


def where_rows(cond: np.ndarray, a, b) -> Var:
    """Row-wise select: cond [B] bool picks rows of a [B, d] else b [B, d]."""
    a, b = as_var(a), as_var(b)
    cond = np.asarray(cond, dtype=bool)
    sel = cond.reshape((-1,) + (1,) * (a.value.ndim - 1))

    def bwd(g):
        _accum(a, g * sel)
        _accum(b, g * ~sel)

    return Var(np.where(sel, a.value, b.value), (a, b), bwd)


# ---------------------------------------------------------------------------
# activations and nonlinearities


def relu(x) -> Var:
    x = as_var(x)
    mask = x.value > 0

    def bwd(g):
        _accum(x, g * mask)

    return Var(np.where(mask, x.value, 0.0), (x,), bwd)


def tanh(x) -> Var:
    x = as_var(x)
    y = np.tanh(x.value)

    def bwd(g):
        _accum(x, g * (1.0 - y * y))

    return Var(y, (x,), bwd)


def sigmoid(x) -> Var:
    x = as_var(x)
    v = x.value
    y = np.where(v >= 0, 1.0 / (1.0 + np.exp(-np.abs(v))),
                 np.exp(-np.abs(v)) / (1.0 + np.exp(-np.abs(v))))

    def bwd(g):
        _accum(x, g * y * (1.0 - y))

    return Var(y, (x,), bwd)


ACTIVATIONS = {"relu": relu, "tanh": tanh, "sigmoid": sigmoid, "identity": as_var}


def activate(x, name: str) -> Var:
    try:
        fn = ACTIVATIONS[name]
    except KeyError:
        raise ConfigError(f"unknown activation {name!r}") from None
    return fn(as_var(x)) if name != "identity" else as_var(x)


def masked_softmax(scores, mask: np.ndarray) -> Var:
    """Row-wise softmax over valid positions; invalid positions get weight 0.

    Rows with no valid position come back all-zero (callers substitute a
    learned default for those rows).
    """
    scores = as_var(scores)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != scores.value.shape:
        raise ConfigError(f"mask shape {mask.shape} != scores shape {scores.value.shape}")
    any_valid = mask.any(axis=1, keepdims=True)
    m = np.where(any_valid, np.max(np.where(mask, scores.value, -np.inf), axis=1,
                                   keepdims=True), 0.0)
    shifted = np.where(mask, scores.value - m, 0.0)
    e = np.exp(shifted) * mask
    z = e.sum(axis=1, keepdims=True)
    z = np.where(any_valid, z, 1.0)
    y = e / z

    def bwd(g):
        inner = (g * y).sum(axis=1, keepdims=True)
        _accum(scores, y * (g - inner))

    return Var(y, (scores,), bwd)


def clamp(x, lo: float, hi: float) -> Var:
    x = as_var(x)
    inside = (x.value > lo) & (x.value < hi)

    def bwd(g):
        _accum(x, g * inside)

    return Var(np.clip(x.value, lo, hi), (x,), bwd)


def log(x) -> Var:
    x = as_var(x)

    def bwd(g):
        _accum(x, g / x.value)

    return Var(np.log(x.value), (x,), bwd)


def dropout(x, keep: float, rng: np.random.Generator) -> Var:
    """Inverted dropout: scales kept entries by 1/keep so inference needs no rescale."""
    x = as_var(x)
    if not 0.0 < keep <= 1.0:
        raise ConfigError(f"dropout keep probability must be in (0, 1], got {keep}")
    if keep == 1.0:
        return x
    if rng is None:
        raise ConfigError("dropout with keep < 1 requires an explicit rng")
    m = (rng.random(x.value.shape) < keep) / keep

    def bwd(g):
        _accum(x, g * m)

    return Var(x.value * m, (x,), bwd)


# ---------------------------------------------------------------------------
# reductions


def mean(x) -> Var:
    x = as_var(x)
    n = x.value.size

    def bwd(g):
        _accum(x, np.full_like(x.value, g / n))

    return Var(x.value.mean(), (x,), bwd)


def sum_squares(x) -> Var:
    x = as_var(x)

    def bwd(g):
        _accum(x, 2.0 * g * x.value)

    return Var((x.value ** 2).sum(), (x,), bwd)
