"""Reverse-mode automatic differentiation over dense numpy arrays.

Every operation records a closure that routes the output gradient back
to its inputs; backward() walks the graph in reverse topological order.
Gradients accumulate across repeated backward calls until reset.

float64 throughout by default; a dtype can be passed at construction
for reduced-precision experiments, and numpy promotion then applies.
"""

from __future__ import annotations

import numpy as np

from ..errors import ShapeMismatch


def _unbroadcast(grad: np.ndarray, shape: tuple) -> np.ndarray:
    """Sum a broadcast gradient back down to the original shape."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad.reshape(shape)


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad=False, dtype=np.float64):
        self.data = np.asarray(data, dtype=dtype)
        self.grad = None
        self.requires_grad = requires_grad
        self._parents = ()
        self._backward = None

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, grad={self.grad is not None})"

    def _accumulate(self, grad: np.ndarray) -> None:
        if self.grad is None:
            self.grad = np.zeros_like(self.data)
        self.grad += grad

    def zero_grad(self) -> None:
        self.grad = None

    def detach(self) -> "Tensor":
        return Tensor(self.data.copy())

    def backward(self) -> None:
        if self.data.size != 1:
            raise ShapeMismatch(f"backward needs a scalar, got shape {self.data.shape}")
        order = []
        seen = set()

        def visit(t):
            if id(t) in seen:
                return
            seen.add(id(t))
            for p in t._parents:
                visit(p)
            order.append(t)

        visit(self)
        grads = {id(self): np.ones_like(self.data)}
        for t in reversed(order):
            g = grads.pop(id(t), None)
            if g is None:
                continue
            if t.requires_grad:
                t._accumulate(g)
            if t._backward is None:
                continue
            for parent, pg in t._backward(g):
                if not (parent.requires_grad or parent._backward is not None):
                    continue
                if id(parent) in grads:
                    grads[id(parent)] += pg
                else:
                    grads[id(parent)] = pg

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other):
        other = _as_tensor(other)
        out = _from_op(self.data + other.data, (self, other))
        out._backward = lambda g: (
            (self, _unbroadcast(g, self.data.shape)),
            (other, _unbroadcast(g, other.data.shape)),
        )
        return out

    __radd__ = __add__

    def __neg__(self):
        out = _from_op(-self.data, (self,))
        out._backward = lambda g: ((self, -g),)
        return out

    def __sub__(self, other):
        return self + (-_as_tensor(other))

    def __rsub__(self, other):
        return _as_tensor(other) + (-self)

    def __mul__(self, other):
        other = _as_tensor(other)
        out = _from_op(self.data * other.data, (self, other))
        out._backward = lambda g: (
            (self, _unbroadcast(g * other.data, self.data.shape)),
            (other, _unbroadcast(g * self.data, other.data.shape)),
        )
        return out

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_tensor(other)
        out = _from_op(self.data / other.data, (self, other))
        out._backward = lambda g: (
            (self, _unbroadcast(g / other.data, self.data.shape)),
            (other, _unbroadcast(-g * self.data / other.data ** 2, other.data.shape)),
        )
        return out

    def __rtruediv__(self, other):
        return _as_tensor(other) / self

    def __matmul__(self, other):
        other = _as_tensor(other)
        if self.data.ndim != 2 or other.data.ndim != 2:
            raise ShapeMismatch(
                f"matmul expects 2-d operands, got {self.data.shape} @ {other.data.shape}"
            )
        if self.data.shape[1] != other.data.shape[0]:
            raise ShapeMismatch(
                f"matmul inner dims differ: {self.data.shape} @ {other.data.shape}"
            )
        out = _from_op(self.data @ other.data, (self, other))
        out._backward = lambda g: (
            (self, g @ other.data.T),
            (other, self.data.T @ g),
        )
        return out

    def __pow__(self, p):
        if not isinstance(p, (int, float)):
            raise TypeError("only scalar exponents supported")
        out = _from_op(self.data ** p, (self,))
        out._backward = lambda g: ((self, g * p * self.data ** (p - 1)),)
        return out

    def __getitem__(self, key):
        out = _from_op(self.data[key], (self,))

        def backward(g):
            full = np.zeros_like(self.data)
            full[key] = g
            return ((self, full),)

        out._backward = backward
        return out

    # -- reductions and shape ------------------------------------------

    def sum(self, axis=None, keepdims=False):
        out = _from_op(self.data.sum(axis=axis, keepdims=keepdims), (self,))

        def backward(g):
            if axis is None:
                return ((self, np.broadcast_to(g, self.data.shape).copy()),)
            gg = g if keepdims else np.expand_dims(g, axis)
            return ((self, np.broadcast_to(gg, self.data.shape).copy()),)

        out._backward = backward
        return out

    def mean(self, axis=None, keepdims=False):
        count = self.data.size if axis is None else self.data.shape[axis]
        return self.sum(axis=axis, keepdims=keepdims) / count

    def reshape(self, *shape):
        out = _from_op(self.data.reshape(*shape), (self,))
        out._backward = lambda g: ((self, g.reshape(self.data.shape)),)
        return out

    def transpose(self):
        out = _from_op(self.data.T.copy(), (self,))
        out._backward = lambda g: ((self, g.T.copy()),)
        return out

    # -- elementwise nonlinearities ------------------------------------

    def relu(self):
        out = _from_op(np.maximum(self.data, 0.0), (self,))
        out._backward = lambda g: ((self, g * (self.data > 0)),)
        return out

    def sigmoid(self):
        s = _sigmoid(self.data)
        out = _from_op(s, (self,))
        out._backward = lambda g: ((self, g * s * (1.0 - s)),)
        return out

    def exp(self):
        e = np.exp(self.data)
        out = _from_op(e, (self,))
        out._backward = lambda g: ((self, g * e),)
        return out

    def log(self):
        out = _from_op(np.log(self.data), (self,))
        out._backward = lambda g: ((self, g / self.data),)
        return out


def _as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _from_op(data: np.ndarray, parents: tuple) -> Tensor:
    out = Tensor(data, dtype=data.dtype)
    out._parents = tuple(p for p in parents if isinstance(p, Tensor))
    return out


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    e = np.exp(x[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def concat(tensors, axis=0) -> Tensor:
    tensors = [_as_tensor(t) for t in tensors]
    out = _from_op(np.concatenate([t.data for t in tensors], axis=axis), tuple(tensors))
    sizes = [t.data.shape[axis] for t in tensors]

    def backward(g):
        pieces = np.split(g, np.cumsum(sizes)[:-1], axis=axis)
        return tuple(zip(tensors, pieces))

    out._backward = backward
    return out


def gather_rows(t: Tensor, idx: np.ndarray) -> Tensor:
    """out[k] = t[idx[k]]; rows may repeat, gradients sum per source row."""
    idx = np.asarray(idx, dtype=np.intp)
    out = _from_op(t.data[idx], (t,))

    def backward(g):
        full = np.zeros_like(t.data)
        np.add.at(full, idx, g)
        return ((t, full),)

    out._backward = backward
    return out


def smooth_l1(pred: Tensor, target: Tensor) -> Tensor:
    """Elementwise smooth L1 with transition point 1.0: quadratic inside
    |d| <= 1, linear outside; gradient is clip(d, -1, 1)."""
    target = _as_tensor(target)
    d = pred.data - target.data
    absd = np.abs(d)
    val = np.where(absd <= 1.0, 0.5 * d * d, absd - 0.5)
    out = _from_op(val, (pred, target))
    grad_d = np.clip(d, -1.0, 1.0)
    out._backward = lambda g: (
        (pred, g * grad_d),
        (target, -g * grad_d),
    )
    return out


def bce_with_logits(logits: Tensor, targets: np.ndarray) -> Tensor:
    """Elementwise binary cross-entropy on pre-sigmoid values.

    Stable form max(x,0) - x*y + log1p(exp(-|x|)); gradient wrt logits
    is sigmoid(x) - y.
    """
    y = targets.data if isinstance(targets, Tensor) else np.asarray(targets, dtype=np.float64)
    x = logits.data
    val = np.maximum(x, 0.0) - x * y + np.log1p(np.exp(-np.abs(x)))
    out = _from_op(val, (logits,))
    out._backward = lambda g: ((logits, g * (_sigmoid(x) - y)),)
    return out
