"""Forward-mode automatic differentiation with dual scalars.

A dual scalar carries a primal value together with a tangent, and every
elementary operation propagates both: multiplication follows
(a + b eps)(c + d eps) = ac + (ad + bc) eps, and an elementary function g
maps (a, b) to (g(a), g'(a) b).  Seeding the inputs of a scalar objective
with the components of a direction vector v therefore yields f(x) and the
exact directional derivative grad f(x)^T v in a single forward pass.

Generic objectives are evaluated on numpy object arrays of ``DualScalar``;
the overloaded operators and the ``exp``/``sin``/``cos``/``sqrt``/``tanh``
methods make plain numpy expressions such as ``0.5 * np.sum((2 * x) ** 2)``
differentiate transparently.
"""

import math
import warnings

import numpy as np

__all__ = [
    "DomainError",
    "DualScalar",
    "TangentEvaluation",
    "dual_apply",
    "jvp",
    "exp",
    "sin",
    "cos",
    "sqrt",
    "tanh",
    "relu",
]


class DomainError(ValueError):
    """Elementary operation evaluated outside its domain (names the op)."""


class TangentEvaluation:
    """Value of f(x) paired with the directional derivative grad f(x)^T v."""

    __slots__ = ("value", "directional_derivative")

    def __init__(self, value, directional_derivative):
        self.value = float(value)
        self.directional_derivative = float(directional_derivative)

    def __iter__(self):
        return iter((self.value, self.directional_derivative))

    def __repr__(self):
        return f"TangentEvaluation(value={self.value!r}, directional_derivative={self.directional_derivative!r})"


def _saturate(fn, *args):
    # IEEE semantics: overflow propagates as inf instead of raising
    try:
        return fn(*args)
    except OverflowError:
        return math.inf


class DualScalar:
    """A primal/tangent pair supporting first-order forward propagation."""

    __slots__ = ("primal", "tangent")

    def __init__(self, primal, tangent=0.0):
        self.primal = float(primal)
        self.tangent = float(tangent)

    @staticmethod
    def _lift(x):
        return x if isinstance(x, DualScalar) else DualScalar(x, 0.0)

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        o = DualScalar._lift(other)
        return DualScalar(self.primal + o.primal, self.tangent + o.tangent)

    __radd__ = __add__

    def __sub__(self, other):
        o = DualScalar._lift(other)
        return DualScalar(self.primal - o.primal, self.tangent - o.tangent)

    def __rsub__(self, other):
        o = DualScalar._lift(other)
        return DualScalar(o.primal - self.primal, o.tangent - self.tangent)

    def __mul__(self, other):
        o = DualScalar._lift(other)
        return DualScalar(
            self.primal * o.primal,
            self.primal * o.tangent + self.tangent * o.primal,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = DualScalar._lift(other)
        if o.primal == 0.0:
            raise DomainError("div: division by zero primal")
        inv = 1.0 / o.primal
        return DualScalar(
            self.primal * inv,
            (self.tangent * o.primal - self.primal * o.tangent) * inv * inv,
        )

    def __rtruediv__(self, other):
        return DualScalar._lift(other).__truediv__(self)

    def __neg__(self):
        return DualScalar(-self.primal, -self.tangent)

    def __pos__(self):
        return self

    def __pow__(self, power):
        if isinstance(power, DualScalar):
            raise TypeError("pow: exponent must be a constant")
        p = float(power)
        if p == int(p):
            if self.primal == 0.0 and p < 0:
                raise DomainError("pow: zero primal with negative exponent")
            deriv = 0.0 if p == 0 else p * _saturate(pow, self.primal, p - 1.0)
        else:
            if self.primal <= 0.0:
                raise DomainError("pow: non-integer exponent needs positive primal")
            deriv = p * _saturate(pow, self.primal, p - 1.0)
        return DualScalar(_saturate(pow, self.primal, p), deriv * self.tangent)

    def __abs__(self):
        # subgradient 0 at the kink, matching relu
        return DualScalar(abs(self.primal), math.copysign(1.0, self.primal) * self.tangent if self.primal != 0.0 else 0.0)

    # comparisons act on primals so branching code works unchanged -----
    def __lt__(self, other):
        return self.primal < DualScalar._lift(other).primal

    def __le__(self, other):
        return self.primal <= DualScalar._lift(other).primal

    def __gt__(self, other):
        return self.primal > DualScalar._lift(other).primal

    def __ge__(self, other):
        return self.primal >= DualScalar._lift(other).primal

    def __eq__(self, other):
        if isinstance(other, (DualScalar, int, float)):
            return self.primal == DualScalar._lift(other).primal
        return NotImplemented

    def __float__(self):
        return self.primal

    def __repr__(self):
        return f"DualScalar({self.primal!r}, {self.tangent!r})"

    # elementary functions; named methods so np.exp etc. dispatch here -
    def exp(self):
        e = _saturate(math.exp, self.primal)
        return DualScalar(e, e * self.tangent)

    def sin(self):
        return DualScalar(math.sin(self.primal), math.cos(self.primal) * self.tangent)

    def cos(self):
        return DualScalar(math.cos(self.primal), -math.sin(self.primal) * self.tangent)

    def sqrt(self):
        if self.primal < 0.0:
            raise DomainError("sqrt: negative primal")
        if self.primal == 0.0 and self.tangent != 0.0:
            raise DomainError("sqrt: derivative undefined at zero primal")
        root = math.sqrt(self.primal)
        return DualScalar(root, 0.0 if self.tangent == 0.0 else 0.5 / root * self.tangent)

    def tanh(self):
        t = math.tanh(self.primal)
        return DualScalar(t, (1.0 - t * t) * self.tangent)

    def relu(self):
        if self.primal > 0.0:
            return DualScalar(self.primal, self.tangent)
        return DualScalar(0.0, 0.0)


def _binary(name):
    def op(a, b):
        return getattr(DualScalar._lift(a), name)(DualScalar._lift(b))

    return op


_ELEMENTARY_OPS = {
    "add": _binary("__add__"),
    "sub": _binary("__sub__"),
    "mul": _binary("__mul__"),
    "div": _binary("__truediv__"),
    "pow": lambda a, p: DualScalar._lift(a) ** p,
    "exp": lambda a: DualScalar._lift(a).exp(),
    "sin": lambda a: DualScalar._lift(a).sin(),
    "cos": lambda a: DualScalar._lift(a).cos(),
    "sqrt": lambda a: DualScalar._lift(a).sqrt(),
    "tanh": lambda a: DualScalar._lift(a).tanh(),
    "abs": lambda a: abs(DualScalar._lift(a)),
}


def dual_apply(op, *args):
    """Apply a named elementary operation to dual scalars.

    Supported names: add, sub, mul, div, pow, exp, sin, cos, sqrt, tanh, abs.
    Domain violations raise :class:`DomainError` naming the operation.
    """
    try:
        fn = _ELEMENTARY_OPS[op]
    except KeyError:
        raise ValueError(f"unknown elementary operation {op!r}") from None
    return fn(*args)


# dispatchers usable on floats and duals alike, for hand-written objectives
def exp(x):
    return x.exp() if isinstance(x, DualScalar) else math.exp(x)


def sin(x):
    return x.sin() if isinstance(x, DualScalar) else math.sin(x)


def cos(x):
    return x.cos() if isinstance(x, DualScalar) else math.cos(x)


def sqrt(x):
    return x.sqrt() if isinstance(x, DualScalar) else math.sqrt(x)


def tanh(x):
    return x.tanh() if isinstance(x, DualScalar) else math.tanh(x)


def relu(x):
    return x.relu() if isinstance(x, DualScalar) else max(x, 0.0)


def jvp(f, x, v):
    """Evaluate f(x) and grad f(x)^T v in one dual-number forward pass.

    ``f`` receives a numpy object array of :class:`DualScalar` and must
    combine its entries with overloaded arithmetic (plain numpy expressions
    work).  Non-finite results propagate, with a RuntimeWarning as the
    diagnostic.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if x.shape != v.shape:
        raise ValueError(f"seed shape {v.shape} does not match point shape {x.shape}")
    duals = np.empty(x.size, dtype=object)
    flat_x, flat_v = x.ravel(), v.ravel()
    for i in range(x.size):
        duals[i] = DualScalar(flat_x[i], flat_v[i])
    out = f(duals.reshape(x.shape))
    if isinstance(out, np.ndarray) and out.shape == ():
        out = out.item()
    if isinstance(out, DualScalar):
        result = TangentEvaluation(out.primal, out.tangent)
    else:
        result = TangentEvaluation(float(out), 0.0)
    if not (math.isfinite(result.value) and math.isfinite(result.directional_derivative)):
        warnings.warn("jvp produced a non-finite value or derivative", RuntimeWarning, stacklevel=2)
    return result
