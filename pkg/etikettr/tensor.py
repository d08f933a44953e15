#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# Licensed under the GNU LGPL v2.1 - http://www.gnu.org/licenses/lgpl.html

"""Dense tensors with reverse-mode automatic differentiation.

Every real-valued quantity of the classifier (embeddings, encoder annotations, semantic units,
decoder states, attention weights, parameters) is a :class:`Tensor`. Primitive functions in this
module compute their forward value with numpy and, when any input requires a gradient, record a
node on the active :class:`Graph`. :func:`backward` walks the recording in reverse once and
leaves dLoss/dTensor in `.grad` of every reachable tensor that requires a gradient.

Shapes must match exactly, with a single exception: :func:`add` accepts a vector whose length
equals the last axis of the other operand (a bias added to each row).

Examples
--------
>>> from etikettr import tensor as T
>>> x = T.Tensor([1.0, 2.0], requires_grad=True)
>>> loss = T.sum(x * x)
>>> T.backward(loss)
>>> x.grad
array([2., 4.])

"""

import builtins
import logging
import threading
from collections import OrderedDict
from contextlib import contextmanager

import numpy as np
from scipy.special import expit, logsumexp

from smart_open import open as smart_open


logger = logging.getLogger(__name__)

FORMAT_VERSION = 1

PRECISIONS = {'float64': np.float64, 'float32': np.float32}

_state = threading.local()


class ShapeError(ValueError):
    """Operand shapes incompatible with a primitive."""

    def __init__(self, op, *shapes):
        self.op = op
        self.shapes = shapes
        super(ShapeError, self).__init__(
            "%s: incompatible shapes %s" % (op, " and ".join(str(tuple(s)) for s in shapes))
        )


class GraphError(ValueError):
    """Misuse of a differentiation recording (non-scalar loss, second backward)."""


def dtype_of(precision):
    """Numpy dtype for a precision name, 'float64' or 'float32'."""
    try:
        return PRECISIONS[precision]
    except KeyError:
        raise ValueError("unknown precision %r, expected one of %s" % (precision, sorted(PRECISIONS)))


class Tensor(object):
    """Dense real array taking part in reverse-mode differentiation.

    Parameters
    ----------
    data : array_like
        Values. Copied into a C-contiguous float array.
    requires_grad : bool, optional
        Whether backward should produce a gradient for this tensor.
    dtype : numpy.dtype, optional
        Float dtype; defaults to the dtype of `data` if it is floating, else float64.
    name : str, optional
        Human readable name, used in diagnostics.

    """
    def __init__(self, data, requires_grad=False, dtype=None, name=None):
        if dtype is None:
            dtype = data.dtype if isinstance(data, np.ndarray) and data.dtype.kind == 'f' else np.float64
        self.data = np.array(data, dtype=dtype)
        self.requires_grad = bool(requires_grad)
        self.grad = None
        self.name = name
        self._node = None

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def dtype(self):
        return self.data.dtype

    @property
    def size(self):
        return self.data.size

    def item(self):
        """Value of a single-element tensor as a Python float."""
        return float(self.data.reshape(-1)[0])

    def zero_grad(self):
        self.grad = None

    def backward(self):
        """Shorthand for :func:`~etikettr.tensor.backward` on this tensor."""
        backward(self)

    def __repr__(self):
        return "Tensor(%sshape=%s, dtype=%s%s)" % (
            "%s, " % self.name if self.name else "", self.shape, self.dtype,
            ", requires_grad" if self.requires_grad else ""
        )

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __mul__(self, other):
        return mul(self, other)

    def __matmul__(self, other):
        return matmul(self, other)

    def __neg__(self):
        return scale(self, -1.0)


def constant(data, like=None, dtype=None):
    """Tensor that never requires a gradient, with the dtype of `like` when given."""
    if like is not None:
        dtype = like.dtype
    return Tensor(data, requires_grad=False, dtype=dtype)


def uniform(shape, random_state, scale, dtype=np.float64, name=None):
    """Trainable tensor with entries drawn uniformly from [-scale, scale]."""
    values = random_state.uniform(-scale, scale, size=shape)
    return Tensor(values, requires_grad=True, dtype=dtype, name=name)


class Node(object):
    """One recorded primitive application."""

    __slots__ = ('op', 'inputs', 'output', 'vjp', 'graph')

    def __init__(self, op, inputs, output, vjp, graph):
        self.op = op
        self.inputs = inputs
        self.output = output
        self.vjp = vjp
        self.graph = graph


class Graph(object):
    """Ordered recording of primitive applications for one forward pass.

    Nodes are appended in execution order, so the list is topologically sorted. A graph supports
    exactly one backward pass, after which its saved activations are released.

    Can be used as a context manager; primitives called inside the block record on this graph.
    Outside any block, a per-thread implicit graph is opened on first use and retired by
    :func:`backward`.

    """
    def __init__(self):
        self.nodes = []
        self.consumed = False

    def __enter__(self):
        _stack().append(self)
        return self

    def __exit__(self, exc_type, exc_value, traceback):
        popped = _stack().pop()
        assert popped is self, "graph contexts exited out of order"
        return False

    def __len__(self):
        return len(self.nodes)

    @staticmethod
    def current():
        """The graph new primitive applications are recorded on."""
        stack = _stack()
        if stack:
            return stack[-1]
        implicit = getattr(_state, 'implicit', None)
        if implicit is None or implicit.consumed:
            implicit = _state.implicit = Graph()
        return implicit

    def record(self, op, inputs, output, vjp):
        if self.consumed:
            raise GraphError("%s: cannot record on a graph that has already been differentiated" % op)
        node = Node(op, inputs, output, vjp, self)
        self.nodes.append(node)
        output._node = node
        return node

    def backward(self, loss):
        """Differentiate the scalar `loss` with respect to every reachable tensor requiring a gradient.

        Raises
        ------
        GraphError
            If `loss` is not scalar, or this graph was already differentiated.

        """
        if loss.size != 1:
            raise GraphError("backward: loss must be scalar, got shape %s" % (loss.shape,))
        if self.consumed:
            raise GraphError("backward: this recording was already differentiated")

        grads = {id(loss): np.ones_like(loss.data)}
        owned = set()  # buffers created here, safe to accumulate into in place
        reached = OrderedDict([(id(loss), loss)])
        for node in reversed(self.nodes):
            out_grad = grads.get(id(node.output))
            if out_grad is None:
                continue
            in_grads = node.vjp(out_grad)
            for inp, in_grad in zip(node.inputs, in_grads):
                if in_grad is None or not inp.requires_grad:
                    continue
                key = id(inp)
                if key in owned:
                    grads[key] += in_grad
                elif key in grads:
                    grads[key] = grads[key] + in_grad
                    owned.add(key)
                else:
                    grads[key] = in_grad
                    reached[key] = inp

        for key, tensor in reached.items():
            if not tensor.requires_grad:
                continue
            grad = grads[key].astype(tensor.dtype, copy=False)
            tensor.grad = grad if tensor.grad is None else tensor.grad + grad
        self.free()

    def free(self):
        """Release saved activations; the graph can no longer be differentiated."""
        for node in self.nodes:
            node.vjp = None
            node.inputs = ()
        self.nodes = []
        self.consumed = True
        if getattr(_state, 'implicit', None) is self:
            _state.implicit = None


def _stack():
    stack = getattr(_state, 'stack', None)
    if stack is None:
        stack = _state.stack = []
    return stack


def is_recording():
    return getattr(_state, 'recording', True)


@contextmanager
def no_grad():
    """Disable recording inside the block (inference, finite differences)."""
    previous = is_recording()
    _state.recording = False
    try:
        yield
    finally:
        _state.recording = previous


def backward(loss):
    """Run backward from scalar `loss` on the graph that recorded it.

    Raises
    ------
    GraphError
        Non-scalar loss, loss not connected to any tensor requiring a gradient, or a second
        backward on the same recording.

    """
    if loss.size != 1:
        raise GraphError("backward: loss must be scalar, got shape %s" % (loss.shape,))
    node = loss._node
    if node is None:
        if not loss.requires_grad:
            raise GraphError("backward: loss does not depend on any tensor that requires grad")
        grad = np.ones_like(loss.data)
        loss.grad = grad if loss.grad is None else loss.grad + grad
        return
    node.graph.backward(loss)


def _result(op, value, inputs, vjp):
    """Wrap `value` as the output of `op` and record it when differentiation is needed."""
    requires_grad = is_recording() and any(t.requires_grad for t in inputs)
    out = Tensor(value, requires_grad=requires_grad, dtype=value.dtype)
    if requires_grad:
        Graph.current().record(op, inputs, out, vjp)
    return out


def _as_tensor(x, like):
    if isinstance(x, Tensor):
        return x
    return constant(x, like=like)


#
# primitives
#

def matmul(a, b):
    """Matrix product.

    Supports (m, k) @ (k, n), batched (B, m, k) @ (B, k, n), and (B, m, k) @ (k, n) with the right
    operand shared across the batch.

    """
    a, b = _as_tensor(a, b if isinstance(b, Tensor) else None), _as_tensor(b, a)
    if not (a.ndim in (2, 3) and b.ndim in (2, 3) and a.shape[-1] == b.shape[-2]
            and (b.ndim == 2 or (a.ndim == 3 and a.shape[0] == b.shape[0]))):
        raise ShapeError("matmul", a.shape, b.shape)
    A, B = a.data, b.data
    value = np.matmul(A, B)

    def vjp(g):
        ga = np.matmul(g, np.swapaxes(B, -1, -2))
        if b.ndim == 2 and a.ndim == 3:
            gb = np.tensordot(A, g, axes=([0, 1], [0, 1]))
        else:
            gb = np.matmul(np.swapaxes(A, -1, -2), g)
        return ga, gb

    return _result("matmul", value, (a, b), vjp)


def add(a, b):
    """Elementwise sum; `b` may also be a bias vector added to each row of `a`."""
    a = _as_tensor(a, b if isinstance(b, Tensor) else None)
    b = _as_tensor(b, a)
    if a.shape == b.shape:
        def vjp(g):
            return g, g
    elif b.ndim == 1 and a.ndim >= 1 and a.shape[-1] == b.shape[0]:
        def vjp(g):
            return g, g.reshape(-1, g.shape[-1]).sum(axis=0)
    else:
        raise ShapeError("add", a.shape, b.shape)
    return _result("add", a.data + b.data, (a, b), vjp)


def sub(a, b):
    """Elementwise difference of equally shaped tensors."""
    a = _as_tensor(a, b if isinstance(b, Tensor) else None)
    b = _as_tensor(b, a)
    if a.shape != b.shape:
        raise ShapeError("sub", a.shape, b.shape)

    def vjp(g):
        return g, -g

    return _result("sub", a.data - b.data, (a, b), vjp)


def mul(a, b):
    """Elementwise (Hadamard) product of equally shaped tensors."""
    a = _as_tensor(a, b if isinstance(b, Tensor) else None)
    b = _as_tensor(b, a)
    if a.shape != b.shape:
        raise ShapeError("mul", a.shape, b.shape)
    A, B = a.data, b.data

    def vjp(g):
        return g * B, g * A

    return _result("mul", A * B, (a, b), vjp)


def scale(a, factor):
    """Multiply by a Python scalar."""
    factor = float(factor)

    def vjp(g):
        return (g * factor,)

    return _result("scale", a.data * a.dtype.type(factor), (a,), vjp)


def concat(tensors, axis=-1):
    """Concatenate along an existing axis."""
    tensors = tuple(tensors)
    if not tensors:
        raise ValueError("concat: nothing to concatenate")
    ndim = tensors[0].ndim
    axis = axis % ndim
    for t in tensors[1:]:
        if t.ndim != ndim or t.shape[:axis] != tensors[0].shape[:axis] \
                or t.shape[axis + 1:] != tensors[0].shape[axis + 1:]:
            raise ShapeError("concat", tensors[0].shape, t.shape)
    bounds = np.cumsum([t.shape[axis] for t in tensors])[:-1]

    def vjp(g):
        return tuple(np.split(g, bounds, axis=axis))

    return _result("concat", np.concatenate([t.data for t in tensors], axis=axis), tensors, vjp)


def stack(tensors, axis=0):
    """Stack equally shaped tensors along a new axis."""
    tensors = tuple(tensors)
    if not tensors:
        raise ValueError("stack: nothing to stack")
    for t in tensors[1:]:
        if t.shape != tensors[0].shape:
            raise ShapeError("stack", tensors[0].shape, t.shape)

    def vjp(g):
        return tuple(np.take(g, i, axis=axis) for i in range(len(tensors)))

    return _result("stack", np.stack([t.data for t in tensors], axis=axis), tensors, vjp)


def slice(a, start, stop, axis=0):
    """Sub-range [start, stop) of one axis."""
    axis = axis % a.ndim
    extent = a.shape[axis]
    if not 0 <= start < stop <= extent:
        raise ShapeError("slice[%d:%d, axis=%d]" % (start, stop, axis), a.shape)
    index = (builtins.slice(None),) * axis + (builtins.slice(start, stop),)

    def vjp(g):
        full = np.zeros_like(a.data)
        full[index] = g
        return (full,)

    return _result("slice", a.data[index], (a,), vjp)


def reshape(a, shape):
    """Same values in a new shape."""
    shape = tuple(shape)
    if int(np.prod(shape)) != a.size:
        raise ShapeError("reshape", a.shape, shape)
    original = a.shape

    def vjp(g):
        return (g.reshape(original),)

    return _result("reshape", a.data.reshape(shape), (a,), vjp)


def tanh(a):
    value = np.tanh(a.data)

    def vjp(g):
        return (g * (1.0 - value * value),)

    return _result("tanh", value, (a,), vjp)


def sigmoid(a):
    value = expit(a.data)

    def vjp(g):
        return (g * value * (1.0 - value),)

    return _result("sigmoid", value, (a,), vjp)


def relu(a):
    active = a.data > 0
    value = np.where(active, a.data, 0).astype(a.dtype)

    def vjp(g):
        return (np.where(active, g, 0).astype(g.dtype),)

    return _result("relu", value, (a,), vjp)


def log(a):
    value = np.log(a.data)
    A = a.data

    def vjp(g):
        return (g / A,)

    return _result("log", value, (a,), vjp)


def clamp(a, low=None, high=None):
    """Clip values into [low, high]; the gradient passes only where no clipping happened."""
    A = a.data
    value = np.clip(A, low, high)
    inside = np.ones(A.shape, dtype=bool)
    if low is not None:
        inside &= A >= low
    if high is not None:
        inside &= A <= high

    def vjp(g):
        return (np.where(inside, g, 0).astype(g.dtype),)

    return _result("clamp", value, (a,), vjp)


def where(condition, a, b):
    """Pick from `a` where `condition` holds, else from `b`; `condition` is a constant bool array."""
    condition = np.asarray(condition, dtype=bool)
    if not (condition.shape == a.shape == b.shape):
        raise ShapeError("where", condition.shape, a.shape, b.shape)

    def vjp(g):
        zero = np.zeros_like(g)
        return np.where(condition, g, zero), np.where(condition, zero, g)

    return _result("where", np.where(condition, a.data, b.data), (a, b), vjp)


def sum(a, axis=None):
    """Sum of all elements (scalar) or along one axis."""
    shape = a.shape

    if axis is None:
        def vjp(g):
            return (np.broadcast_to(g, shape).copy(),)
        return _result("sum", np.asarray(a.data.sum(), dtype=a.dtype), (a,), vjp)

    axis = axis % a.ndim

    def vjp(g):
        return (np.broadcast_to(np.expand_dims(g, axis), shape).copy(),)

    return _result("sum", a.data.sum(axis=axis), (a,), vjp)


def softmax(a, axis=-1, mask=None):
    """Normalized exponentials along `axis`.

    Parameters
    ----------
    a : Tensor
        Scores.
    axis : int, optional
        Normalization axis.
    mask : numpy.ndarray of bool, optional
        Same shape as `a`; False entries get probability exactly 0. Every slice along `axis`
        must keep at least one entry.

    """
    scores = a.data
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != a.shape:
            raise ShapeError("softmax", a.shape, mask.shape)
        if not mask.any(axis=axis).all():
            raise ValueError("softmax: a row is fully masked")
        scores = np.where(mask, scores, -np.inf)
    shifted = scores - scores.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    value = e / e.sum(axis=axis, keepdims=True)

    def vjp(g):
        return (value * (g - (g * value).sum(axis=axis, keepdims=True)),)

    return _result("softmax", value, (a,), vjp)


def pick(a, ids):
    """Per-row gather: out[b] = a[b, ids[b]] for `a` of shape (B, V)."""
    ids = np.asarray(ids, dtype=np.int64)
    if a.ndim != 2 or ids.shape != (a.shape[0],):
        raise ShapeError("pick", a.shape, ids.shape)
    rows = np.arange(a.shape[0])

    def vjp(g):
        full = np.zeros_like(a.data)
        full[rows, ids] = g
        return (full,)

    return _result("pick", a.data[rows, ids], (a,), vjp)


def embedding_lookup(table, ids):
    """Rows of `table` (V, D) selected by integer `ids` of any shape -> ids.shape + (D,)."""
    ids = np.asarray(ids, dtype=np.int64)
    if table.ndim != 2:
        raise ShapeError("embedding_lookup", table.shape, ids.shape)
    if ids.size and (ids.min() < 0 or ids.max() >= table.shape[0]):
        raise ValueError("embedding_lookup: ids outside [0, %d)" % table.shape[0])

    def vjp(g):
        full = np.zeros_like(table.data)
        np.add.at(full, ids.reshape(-1), g.reshape(-1, table.shape[1]))
        return (full,)

    return _result("embedding_lookup", table.data[ids], (table,), vjp)


def dilated_conv1d(x, kernel, rate):
    """One-dimensional dilated convolution without padding.

    Parameters
    ----------
    x : Tensor
        Input of shape (length, channels_in) or (batch, length, channels_in).
    kernel : Tensor
        Weights of shape (K, channels_in, channels_out).
    rate : int
        Dilation rate r; tap k reads input position j + k * r.

    Returns
    -------
    Tensor
        Output of length `length - (K - 1) * rate`; output j depends exactly on inputs
        j, j + r, ..., j + (K - 1) * r.

    Raises
    ------
    ValueError
        If the input is shorter than the receptive span 1 + (K - 1) * rate.

    """
    if x.ndim not in (2, 3) or kernel.ndim != 3 or x.shape[-1] != kernel.shape[1]:
        raise ShapeError("dilated_conv1d", x.shape, kernel.shape)
    if rate < 1:
        raise ValueError("dilated_conv1d: dilation rate must be >= 1, got %d" % rate)
    K = kernel.shape[0]
    length = x.shape[-2]
    span = 1 + (K - 1) * rate
    if length < span:
        raise ValueError(
            "dilated_conv1d: sequence shorter than receptive span (length %d < span %d)" % (length, span)
        )
    out_len = length - (K - 1) * rate
    X, W = x.data, kernel.data

    def tap(k):
        return (Ellipsis, builtins.slice(k * rate, k * rate + out_len), builtins.slice(None))

    value = np.matmul(X[tap(0)], W[0])
    for k in range(1, K):
        value = value + np.matmul(X[tap(k)], W[k])

    def vjp(g):
        gx = np.zeros_like(X)
        gw = np.zeros_like(W)
        lead = list(range(g.ndim - 1))
        for k in range(K):
            gx[tap(k)] += np.matmul(g, W[k].T)
            gw[k] = np.tensordot(X[tap(k)], g, axes=(lead, lead))
        return gx, gw

    return _result("dilated_conv1d", value, (x, kernel), vjp)


def cross_entropy(logits, target):
    """Negative log-softmax probability of `target`.

    Parameters
    ----------
    logits : Tensor
        Unnormalized scores, shape (V,) or (B, V).
    target : int or numpy.ndarray of int
        Target id, or one id per row.

    Returns
    -------
    Tensor
        Scalar for 1-D logits, shape (B,) for 2-D logits.

    """
    L = logits.data
    target = np.asarray(target, dtype=np.int64)
    if L.ndim == 1 and target.ndim == 0:
        rows = ()
    elif L.ndim == 2 and target.shape == (L.shape[0],):
        rows = (np.arange(L.shape[0]),)
    else:
        raise ShapeError("cross_entropy", L.shape, target.shape)
    if (target < 0).any() or (target >= L.shape[-1]).any():
        raise ValueError("cross_entropy: target outside [0, %d)" % L.shape[-1])
    lse = logsumexp(L, axis=-1)
    value = np.asarray(lse - L[rows + (target,)], dtype=L.dtype)

    def vjp(g):
        probs = np.exp(L - np.expand_dims(lse, -1))
        probs[rows + (target,)] -= 1.0
        return (np.expand_dims(g, -1) * probs,)

    return _result("cross_entropy", value, (logits,), vjp)


#
# verification
#

def grad_check(f, x, eps=1e-6, floor=1e-8):
    """Compare the analytic gradient of scalar `f` at `x` with central finite differences.

    Parameters
    ----------
    f : callable
        Maps `x` (a :class:`Tensor`) to a scalar :class:`Tensor`. Called repeatedly; `x.data` is
        perturbed in place between calls and restored afterwards.
    x : Tensor
        Point of evaluation. Should be float64: finite differences are meaningless at single precision.
    eps : float, optional
        Half-width of the central difference, within [1e-6, 1e-3].
    floor : float, optional
        Smallest denominator of the relative error. Coordinates whose gradients lie below `floor`
        are compared by their absolute difference divided by `floor`.

    Returns
    -------
    float
        max over coordinates of |analytic - numeric| / max(|analytic|, |numeric|, floor);
        infinity if any value is non-finite.

    Notes
    -----
    Other tensors that `f` differentiates through also receive gradients from the analytic pass.

    """
    if x.dtype != np.float64:
        logger.warning("grad_check at %s precision; expect large errors", x.dtype)
    if not 1e-6 <= eps <= 1e-3:
        logger.warning("grad_check eps %g outside [1e-6, 1e-3]", eps)
    if not x.data.flags.c_contiguous:
        x.data = np.ascontiguousarray(x.data)

    requires_grad, saved_grad = x.requires_grad, x.grad
    x.requires_grad, x.grad = True, None
    try:
        with Graph() as graph:
            y = f(x)
            graph.backward(y)
        analytic = x.grad if x.grad is not None else np.zeros_like(x.data)

        numeric = np.zeros_like(x.data)
        flat = x.data.reshape(-1)
        with no_grad():
            for i in range(flat.size):
                original = flat[i]
                flat[i] = original + eps
                plus = f(x).item()
                flat[i] = original - eps
                minus = f(x).item()
                flat[i] = original
                numeric.flat[i] = (plus - minus) / (2.0 * eps)
    finally:
        x.requires_grad, x.grad = requires_grad, saved_grad

    with np.errstate(invalid='ignore', over='ignore'):
        if not (np.isfinite(analytic).all() and np.isfinite(numeric).all()):
            return float('inf')
        denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
        error = np.abs(analytic - numeric) / denom
    return float(error.max()) if error.size else 0.0


#
# checkpoint archive
#

def save_checkpoint(fname, tensors):
    """Write named tensors to a flat `.npz` archive.

    Each entry maps a parameter name to its row-major values (the array keeps its shape). The
    header entries `__format_version__` and `__precision__` record the archive format and the
    float precision shared by all tensors.

    Raises
    ------
    ValueError
        If the tensors do not share one precision.

    """
    precisions = {str(t.dtype) for t in tensors.values()}
    if len(precisions) > 1:
        raise ValueError("checkpoint tensors mix precisions: %s" % sorted(precisions))
    arrays = OrderedDict()
    arrays['__format_version__'] = np.asarray(FORMAT_VERSION)
    arrays['__precision__'] = np.asarray(precisions.pop() if precisions else 'float64')
    for name, t in tensors.items():
        if name.startswith('__'):
            raise ValueError("parameter name %r clashes with the archive header" % name)
        arrays[name] = np.ascontiguousarray(t.data)
    with smart_open(fname, 'wb') as fout:
        np.savez(fout, **arrays)


def load_checkpoint(fname):
    """Read an archive written by :func:`save_checkpoint`.

    Returns
    -------
    (OrderedDict of str -> Tensor, dict)
        Tensors (all requiring gradients) in archive order, and the header
        `{'format_version': int, 'precision': str}`.

    Raises
    ------
    ValueError
        If the format version is unknown or an entry's precision disagrees with the header.

    """
    tensors = OrderedDict()
    with smart_open(fname, 'rb') as fin:
        with np.load(fin) as archive:
            version = int(archive['__format_version__'])
            if version != FORMAT_VERSION:
                raise ValueError("%s: unsupported checkpoint format version %d" % (fname, version))
            precision = str(archive['__precision__'])
            dtype = dtype_of(precision)
            for name in archive.files:
                if name.startswith('__'):
                    continue
                values = archive[name]
                if values.dtype != dtype:
                    raise ValueError("%s: entry %s has precision %s, header says %s" % (
                        fname, name, values.dtype, precision))
                tensors[name] = Tensor(values, requires_grad=True, dtype=dtype, name=name)
    return tensors, {'format_version': version, 'precision': precision}
