"""Minimal reverse-mode automatic differentiation over batched float64 arrays.

All numeric state lives in numpy; a Tape records operations in execution
order so a single reverse sweep can fill gradients. Discrete outputs
(searchsorted indices, argsort permutations, comparison masks) are plain
integer/bool arrays and act as constants during backpropagation; gradients
flow only through gathered values.

The tape also keeps a running floating-point-operation estimate
(forward cost per op kind; backward adds twice the forward cost of each
replayed node, the usual reverse-mode accounting).
"""

from __future__ import annotations

import threading

import numpy as np

__all__ = ["Tensor", "Tape", "AdamState", "adam_step", "no_grad", "active_tape"]


class TapeError(ValueError):
    """Shape or value error raised while recording or replaying a tape."""


_STATE = threading.local()


def _tape_stack():
    if not hasattr(_STATE, "stack"):
        _STATE.stack = []
    return _STATE.stack


def active_tape():
    stack = _tape_stack()
    return stack[-1] if stack else None


class Tape:
    """Ordered record of operations plus a FLOP accumulator.

    A tape is single-owner: one forward build followed by (at most) one
    backward sweep. Distinct tapes are independent.
    """

    def __init__(self):
        self.nodes = []
        self.flops = 0

    def __enter__(self):
        _tape_stack().append(self)
        return self

    def __exit__(self, exc_type, exc, tb):
        popped = _tape_stack().pop()
        assert popped is self
        return False

    def backward(self, loss):
        """Accumulate d(loss)/d(leaf) into every requires_grad leaf."""
        if not isinstance(loss, Tensor):
            raise TapeError("backward expects a Tensor loss")
        if loss.values.size != 1:
            raise TapeError(f"loss must be scalar, got shape {loss.values.shape}")
        grads = {id(loss): np.ones_like(loss.values)}
        for node in reversed(self.nodes):
            g_out = grads.pop(id(node.out), None)
            if g_out is None:
                continue
            # a single reduction detects NaN/Inf contamination cheaply
            if not np.isfinite(np.sum(g_out)):
                raise TapeError(f"non-finite gradient at node {node.idx} ({node.kind})")
            self.flops += 2 * node.cost
            in_grads = node.backward(g_out)
            for tensor, g in zip(node.inputs, in_grads):
                if g is None or not tensor.requires_grad:
                    continue
                key = id(tensor)
                if key in grads:
                    grads[key] = grads[key] + g
                else:
                    grads[key] = g
        for node in self.nodes:
            for tensor in node.inputs:
                tensor._maybe_store_grad(grads)
        loss._maybe_store_grad(grads)


class _Node:
    __slots__ = ("kind", "inputs", "out", "backward", "cost", "idx")

    def __init__(self, kind, inputs, out, backward, cost, idx):
        self.kind = kind
        self.inputs = inputs
        self.out = out
        self.backward = backward
        self.cost = cost
        self.idx = idx


class _NoGrad:
    def __enter__(self):
        _tape_stack().append(None)
        return self

    def __exit__(self, exc_type, exc, tb):
        _tape_stack().pop()
        return False


def no_grad():
    """Context manager suspending tape recording."""
    return _NoGrad()


def _record(kind, inputs, out_values, backward, cost):
    tape = active_tape()
    out = Tensor(out_values, requires_grad=False, _leaf=False)
    if tape is not None and any(t.requires_grad for t in inputs):
        out.requires_grad = True
        tape.flops += cost
        tape.nodes.append(_Node(kind, inputs, out, backward, cost, len(tape.nodes)))
    return out


def _as_tensor(x):
    return x if isinstance(x, Tensor) else Tensor(np.asarray(x, dtype=np.float64))


def _unbroadcast(grad, shape):
    """Sum grad down to `shape` (reverse of numpy broadcasting)."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


class Tensor:
    """Batched float64 value, optionally tracked on the active tape."""

    __slots__ = ("values", "grad", "requires_grad", "_leaf")

    def __init__(self, values, requires_grad=False, _leaf=True):
        values = np.asarray(values, dtype=np.float64)
        if values.ndim and min(values.shape) <= 0:
            raise TapeError(f"tensor extents must be positive, got {values.shape}")
        self.values = values
        self.grad = None
        self.requires_grad = requires_grad
        self._leaf = _leaf

    # -- bookkeeping -------------------------------------------------------

    @property
    def shape(self):
        return self.values.shape

    @property
    def size(self):
        return self.values.size

    def item(self):
        return float(self.values.reshape(-1)[0])

    def zero_grad(self):
        self.grad = None

    def _maybe_store_grad(self, grads):
        if self._leaf and self.requires_grad:
            g = grads.pop(id(self), None)
            if g is not None:
                self.grad = g if self.grad is None else self.grad + g

    def detach(self):
        return Tensor(self.values.copy())

    def __repr__(self):
        return f"Tensor(shape={self.values.shape}, requires_grad={self.requires_grad})"

    # -- elementwise arithmetic -------------------------------------------

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, p):
        return powc(self, p)

    def __matmul__(self, other):
        return matmul(self, other)

    def __getitem__(self, idx):
        return slice_(self, idx)


# -- op constructors -------------------------------------------------------


def _binary(kind, a, b, fwd, bwd_a, bwd_b):
    a, b = _as_tensor(a), _as_tensor(b)
    try:
        out = fwd(a.values, b.values)
    except ValueError as exc:
        raise TapeError(f"{kind}: incompatible shapes {a.shape} vs {b.shape}") from exc

    def backward(g):
        ga = bwd_a(g, a.values, b.values, out)
        gb = bwd_b(g, a.values, b.values, out)
        return (
            None if ga is None else _unbroadcast(ga, a.values.shape),
            None if gb is None else _unbroadcast(gb, b.values.shape),
        )

    return _record(kind, (a, b), out, backward, out.size)


def add(a, b):
    return _binary("add", a, b, np.add, lambda g, a, b, o: g, lambda g, a, b, o: g)


def sub(a, b):
    return _binary("sub", a, b, np.subtract, lambda g, a, b, o: g, lambda g, a, b, o: -g)


def mul(a, b):
    return _binary("mul", a, b, np.multiply, lambda g, a, b, o: g * b, lambda g, a, b, o: g * a)


def div(a, b):
    return _binary(
        "div", a, b, np.divide, lambda g, a, b, o: g / b, lambda g, a, b, o: -g * a / (b * b)
    )


def minimum(a, b):
    return _binary(
        "min",
        a,
        b,
        np.minimum,
        lambda g, a, b, o: g * (a <= b),
        lambda g, a, b, o: g * (a > b),
    )


def maximum(a, b):
    return _binary(
        "max",
        a,
        b,
        np.maximum,
        lambda g, a, b, o: g * (a >= b),
        lambda g, a, b, o: g * (a < b),
    )


def atan2(y, x):
    def by(g, y, x, o):
        return g * x / (x * x + y * y)

    def bx(g, y, x, o):
        return -g * y / (x * x + y * y)

    return _binary("atan2", y, x, np.arctan2, by, bx)


def _unary(kind, a, fwd, bwd):
    a = _as_tensor(a)
    out = fwd(a.values)

    def backward(g):
        return (bwd(g, a.values, out),)

    return _record(kind, (a,), out, backward, out.size)


def neg(a):
    return _unary("neg", a, np.negative, lambda g, a, o: -g)


def absolute(a):
    return _unary("abs", a, np.abs, lambda g, a, o: g * np.sign(a))


def exp(a):
    return _unary("exp", a, np.exp, lambda g, a, o: g * o)


def log(a):
    a = _as_tensor(a)
    if np.any(a.values <= 0):
        raise TapeError("log of non-positive value; clamp first")
    return _unary("log", a, np.log, lambda g, a, o: g / a)


def sqrt(a):
    a = _as_tensor(a)
    if np.any(a.values < 0):
        raise TapeError("sqrt of negative value; clamp first")
    return _unary("sqrt", a, np.sqrt, lambda g, a, o: g * 0.5 / np.maximum(o, 1e-300))


def tanh(a):
    return _unary("tanh", a, np.tanh, lambda g, a, o: g * (1.0 - o * o))


def sigmoid(a):
    def fwd(v):
        out = np.empty_like(v)
        pos = v >= 0
        out[pos] = 1.0 / (1.0 + np.exp(-v[pos]))
        ev = np.exp(v[~pos])
        out[~pos] = ev / (1.0 + ev)
        return out

    return _unary("sigmoid", a, fwd, lambda g, a, o: g * o * (1.0 - o))


def relu(a):
    return _unary("relu", a, lambda v: np.maximum(v, 0.0), lambda g, a, o: g * (a > 0))


def clamp(a, lo=None, hi=None):
    a = _as_tensor(a)

    def fwd(v):
        return np.clip(v, lo, hi)

    def bwd(g, v, o):
        mask = np.ones_like(v)
        if lo is not None:
            mask *= v >= lo
        if hi is not None:
            mask *= v <= hi
        return g * mask

    return _unary("clamp", a, fwd, bwd)


def powc(a, p):
    """Elementwise power with a constant exponent."""
    a = _as_tensor(a)
    p = float(p)
    return _unary("pow", a, lambda v: v**p, lambda g, v, o: g * p * v ** (p - 1.0))


def where(mask, a, b):
    """Select by a constant boolean mask; gradients flow to both branches."""
    a, b = _as_tensor(a), _as_tensor(b)
    mask = np.asarray(mask, dtype=bool)
    out = np.where(mask, a.values, b.values)

    def backward(g):
        return (
            _unbroadcast(g * mask, a.values.shape),
            _unbroadcast(g * (~mask), b.values.shape),
        )

    return _record("where", (a, b), out, backward, out.size)


# -- linear algebra --------------------------------------------------------


def matmul(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    try:
        out = np.matmul(a.values, b.values)
    except ValueError as exc:
        raise TapeError(f"matmul: incompatible shapes {a.shape} vs {b.shape}") from exc
    m = a.values.shape[-2] if a.values.ndim > 1 else 1
    k = a.values.shape[-1]
    n = b.values.shape[-1] if b.values.ndim > 1 else 1
    batch = int(out.size // max(m * n, 1))
    cost = 2 * m * n * k * max(batch, 1)

    def backward(g):
        av, bv = a.values, b.values
        ga = np.matmul(g, np.swapaxes(bv, -1, -2)) if bv.ndim > 1 else np.multiply.outer(g, bv)
        gb = np.matmul(np.swapaxes(av, -1, -2), g)
        return _unbroadcast(ga, av.shape), _unbroadcast(gb, bv.shape)

    return _record("matmul", (a, b), out, backward, cost)


def slogdet(a):
    """Sign (constant array) and log|det| of square matrices via LU."""
    a = _as_tensor(a)
    if a.values.shape[-1] != a.values.shape[-2]:
        raise TapeError(f"slogdet needs square matrices, got {a.shape}")
    sign, logabs = np.linalg.slogdet(a.values)
    n = a.values.shape[-1]
    batch = int(np.prod(a.values.shape[:-2])) if a.values.ndim > 2 else 1
    cost = int(2 * n**3 // 3) * batch
    inv_t = np.swapaxes(np.linalg.inv(a.values), -1, -2)

    def backward(g):
        return (np.expand_dims(np.expand_dims(np.asarray(g), -1), -1) * inv_t,)

    out = _record("slogdet", (a,), logabs, backward, cost)
    return sign, out


def _cross_vals(a, b):
    out = np.empty(np.broadcast_shapes(a.shape, b.shape), dtype=np.float64)
    a0, a1, a2 = a[..., 0], a[..., 1], a[..., 2]
    b0, b1, b2 = b[..., 0], b[..., 1], b[..., 2]
    out[..., 0] = a1 * b2 - a2 * b1
    out[..., 1] = a2 * b0 - a0 * b2
    out[..., 2] = a0 * b1 - a1 * b0
    return out


def cross3(a, b):
    """Cross product over a trailing axis of extent 3."""
    a, b = _as_tensor(a), _as_tensor(b)
    out = _cross_vals(a.values, b.values)

    def backward(g):
        return (
            _unbroadcast(_cross_vals(b.values, g), a.values.shape),
            _unbroadcast(_cross_vals(g, a.values), b.values.shape),
        )

    return _record("cross3", (a, b), out, backward, 3 * out.size)


def norm(a, axis=-1, keepdims=False):
    """Euclidean norm along one axis."""
    a = _as_tensor(a)
    out = np.sqrt(np.sum(a.values * a.values, axis=axis, keepdims=keepdims))

    def backward(g):
        denom = np.maximum(out, 1e-300)
        if not keepdims:
            g = np.expand_dims(np.asarray(g), axis)
            denom = np.expand_dims(denom, axis)
        return (g * a.values / denom,)

    return _record("l2norm", (a,), out, backward, 2 * a.size)


# -- reductions and shape ops ----------------------------------------------


def sum_(a, axis=None, keepdims=False):
    a = _as_tensor(a)
    out = np.sum(a.values, axis=axis, keepdims=keepdims)

    def backward(g):
        g = np.asarray(g)
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, a.values.shape).copy(),)

    return _record("sum", (a,), out, backward, a.size)


def mean(a, axis=None, keepdims=False):
    a = _as_tensor(a)
    out = np.mean(a.values, axis=axis, keepdims=keepdims)
    count = a.values.size // max(out.size, 1)

    def backward(g):
        g = np.asarray(g)
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, a.values.shape).copy() / count,)

    return _record("mean", (a,), out, backward, a.size)


def amax(a, axis, keepdims=False):
    """Reduction max; gradient routes to the (first) argmax positions."""
    a = _as_tensor(a)
    out = np.max(a.values, axis=axis, keepdims=keepdims)
    idx = np.argmax(a.values, axis=axis)

    def backward(g):
        g = np.asarray(g)
        if not keepdims:
            g = np.expand_dims(g, axis)
        grad = np.zeros_like(a.values)
        np.put_along_axis(grad, np.expand_dims(idx, axis), g, axis=axis)
        return (grad,)

    return _record("amax", (a,), out, backward, a.size)


def amin(a, axis, keepdims=False):
    a = _as_tensor(a)
    out = np.min(a.values, axis=axis, keepdims=keepdims)
    idx = np.argmin(a.values, axis=axis)

    def backward(g):
        g = np.asarray(g)
        if not keepdims:
            g = np.expand_dims(g, axis)
        grad = np.zeros_like(a.values)
        np.put_along_axis(grad, np.expand_dims(idx, axis), g, axis=axis)
        return (grad,)

    return _record("amin", (a,), out, backward, a.size)


def concat(tensors, axis=0):
    tensors = [_as_tensor(t) for t in tensors]
    out = np.concatenate([t.values for t in tensors], axis=axis)
    sizes = [t.values.shape[axis] for t in tensors]
    splits = np.cumsum(sizes)[:-1]

    def backward(g):
        return tuple(np.split(g, splits, axis=axis))

    return _record("concat", tuple(tensors), out, backward, 0)


def stack(tensors, axis=0):
    tensors = [_as_tensor(t) for t in tensors]
    out = np.stack([t.values for t in tensors], axis=axis)

    def backward(g):
        return tuple(np.moveaxis(g, axis, 0)[i] for i in range(len(tensors)))

    return _record("stack", tuple(tensors), out, backward, 0)


def reshape(a, shape):
    a = _as_tensor(a)
    out = a.values.reshape(shape)

    def backward(g):
        return (g.reshape(a.values.shape),)

    return _record("reshape", (a,), out, backward, 0)


def swapaxes(a, ax1, ax2):
    a = _as_tensor(a)
    out = np.swapaxes(a.values, ax1, ax2)

    def backward(g):
        return (np.swapaxes(g, ax1, ax2),)

    return _record("swapaxes", (a,), out, backward, 0)


def slice_(a, idx):
    """Basic (constant) slicing; gradient scatters back into place."""
    a = _as_tensor(a)
    out = np.array(a.values[idx])  # copy, preserving 0-d shapes

    def backward(g):
        grad = np.zeros_like(a.values)
        np.add.at(grad, idx, g)
        return (grad,)

    return _record("slice", (a,), out, backward, 0)


def put(shape, idx, values):
    """Scatter-add values into a zero array of `shape` at constant indices."""
    values = _as_tensor(values)
    out = np.zeros(shape, dtype=np.float64)
    np.add.at(out, idx, values.values)

    def backward(g):
        return (g[idx],)

    return _record("put", (values,), out, backward, 0)


def gather(a, indices, axis):
    """take_along_axis with constant integer indices."""
    a = _as_tensor(a)
    indices = np.asarray(indices)
    out = np.take_along_axis(a.values, indices, axis=axis)

    def backward(g):
        grad = np.zeros_like(a.values)
        idx_full = indices
        np.add.at(
            grad,
            tuple(
                idx_full if d == (axis % a.values.ndim) else np.indices(idx_full.shape)[d]
                for d in range(a.values.ndim)
            ),
            g,
        )
        return (grad,)

    return _record("gather", (a,), out, backward, 0)


# -- discrete helpers (constants on the tape) -------------------------------


def searchsorted(sorted_vals, queries):
    """Row-wise left-bisect indices; ties resolve to the lower index.

    Inputs are value arrays or Tensors; the result is a constant int array.
    """
    sv = sorted_vals.values if isinstance(sorted_vals, Tensor) else np.asarray(sorted_vals)
    qv = queries.values if isinstance(queries, Tensor) else np.asarray(queries)
    return (sv[..., None, :] < qv[..., :, None]).sum(axis=-1)


def argsort_values(a, axis=-1):
    """Constant permutation sorting `a` ascending along `axis`."""
    av = a.values if isinstance(a, Tensor) else np.asarray(a)
    return np.argsort(av, axis=axis, kind="stable")


# -- optimizer --------------------------------------------------------------


class AdamState:
    """Per-parameter Adam moments with standard bias correction."""

    def __init__(self, params, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        if lr <= 0:
            raise TapeError("Adam learning rate must be positive")
        self.params = list(params)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p.values) for p in self.params]
        self.v = [np.zeros_like(p.values) for p in self.params]

    def zero_grad(self):
        for p in self.params:
            p.grad = None

    def step(self, lr=None):
        adam_step(self, lr=lr)


def adam_step(state, lr=None):
    """One bias-corrected Adam update over state.params (in place)."""
    state.t += 1
    lr = state.lr if lr is None else lr
    b1, b2 = state.beta1, state.beta2
    bc1 = 1.0 - b1**state.t
    bc2 = 1.0 - b2**state.t
    for p, m, v in zip(state.params, state.m, state.v):
        if p.grad is None:
            continue
        g = p.grad
        if not np.all(np.isfinite(g)):
            raise TapeError("non-finite gradient passed to adam_step")
        m += (1.0 - b1) * (g - m)
        v += (1.0 - b2) * (g * g - v)
        p.values -= lr * (m / bc1) / (np.sqrt(v / bc2) + state.eps)
