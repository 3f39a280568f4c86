"""Scalar coefficient fields over the plane.

A field supplies point values plus first and second derivatives; the
derivatives feed the regularity budget of the elasticity tensor.  Fields
come from constants, Python callables, or parsed expression strings
(variables x1, x2; operators + - * / ^ and **; functions sin, cos, exp;
constants pi, e).  Derivatives default to central differences.
"""

import ast
import math

import numpy as np

from .errors import ConfigError

_FD_REL_STEP = 1e-5


class ScalarField:
    """Base class: value(x), gradient(x), hessian(x) for x of shape (2,).

    Subclasses must implement ``value``; derivative fallbacks use central
    differences with step ``fd_step`` (absolute).
    """

    fd_step = _FD_REL_STEP

    def value(self, x):
        raise NotImplementedError

    def values(self, pts):
        pts = np.asarray(pts, dtype=float)
        return np.array([self.value(p) for p in pts])

    def gradient(self, x):
        h = self.fd_step
        x = np.asarray(x, dtype=float)
        g = np.empty(2)
        for i in range(2):
            e = np.zeros(2)
            e[i] = h
            g[i] = (self.value(x + e) - self.value(x - e)) / (2.0 * h)
        return g

    def hessian(self, x):
        h = self.fd_step
        x = np.asarray(x, dtype=float)
        H = np.empty((2, 2))
        f0 = self.value(x)
        for i in range(2):
            e = np.zeros(2)
            e[i] = h
            H[i, i] = (self.value(x + e) - 2.0 * f0 + self.value(x - e)) / h ** 2
        exy = np.array([h, h])
        eyx = np.array([h, -h])
        H[0, 1] = H[1, 0] = (
            self.value(x + exy) - self.value(x + eyx)
            - self.value(x - eyx) + self.value(x - exy)) / (4.0 * h ** 2)
        return H


class ConstantField(ScalarField):
    def __init__(self, c):
        self.c = float(c)

    def value(self, x):
        return self.c

    def values(self, pts):
        return np.full(len(pts), self.c)

    def gradient(self, x):
        return np.zeros(2)

    def hessian(self, x):
        return np.zeros((2, 2))

    def __repr__(self):
        return "ConstantField(%r)" % self.c


class CallableField(ScalarField):
    """Field from a callable f(x1, x2); optional analytic derivatives.

    ``grad`` and ``hess``, when given, are callables returning shape (2,)
    and (2, 2) arrays.
    """

    def __init__(self, f, grad=None, hess=None, fd_step=_FD_REL_STEP):
        self.f = f
        self._grad = grad
        self._hess = hess
        self.fd_step = fd_step

    def value(self, x):
        return float(self.f(x[0], x[1]))

    def gradient(self, x):
        if self._grad is not None:
            return np.asarray(self._grad(x[0], x[1]), dtype=float)
        return ScalarField.gradient(self, x)

    def hessian(self, x):
        if self._hess is not None:
            return np.asarray(self._hess(x[0], x[1]), dtype=float)
        return ScalarField.hessian(self, x)


_ALLOWED_FUNCS = {"sin": math.sin, "cos": math.cos, "exp": math.exp,
                  "sqrt": math.sqrt, "tanh": math.tanh, "abs": abs}
_ALLOWED_NAMES = {"pi": math.pi, "e": math.e}
_ALLOWED_NODES = (
    ast.Expression, ast.BinOp, ast.UnaryOp, ast.Call, ast.Name, ast.Load,
    ast.Constant, ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow,
    ast.USub, ast.UAdd,
)


def _check_node(node, expr):
    if not isinstance(node, _ALLOWED_NODES):
        raise ConfigError("disallowed syntax %r in expression %r"
                          % (type(node).__name__, expr))
    if isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in _ALLOWED_FUNCS:
            raise ConfigError("disallowed function in expression %r" % expr)
        if node.keywords:
            raise ConfigError("keyword arguments not allowed in %r" % expr)
        for child in node.args:
            _check_node(child, expr)
        return
    if isinstance(node, ast.Name):
        if node.id not in ("x1", "x2") and node.id not in _ALLOWED_NAMES:
            raise ConfigError("unknown name %r in expression %r" % (node.id, expr))
    if isinstance(node, ast.Constant) and not isinstance(node.value, (int, float)):
        raise ConfigError("non-numeric constant in expression %r" % expr)
    for child in ast.iter_child_nodes(node):
        _check_node(child, expr)


def parse_expression(expr):
    """Compile an expression string into a function f(x1, x2) -> float.

    Only arithmetic, the whitelisted functions, and the names x1, x2, pi, e
    are accepted; ``^`` is treated as exponentiation.
    """
    if not isinstance(expr, str) or not expr.strip():
        raise ConfigError("expression must be a non-empty string, got %r" % (expr,))
    # Substitute ** for ^ in the source so exponentiation binds tighter
    # than * and / (caret-as-BitXor would not).
    try:
        tree = ast.parse(expr.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ConfigError("cannot parse expression %r: %s" % (expr, exc)) from exc
    _check_node(tree, expr)
    code = compile(tree, "<field>", "eval")
    env = dict(_ALLOWED_FUNCS)
    env.update(_ALLOWED_NAMES)

    def f(x1, x2):
        return eval(code, {"__builtins__": {}}, dict(env, x1=x1, x2=x2))

    return f


class ExpressionField(CallableField):
    """Field parsed from an expression string in x1, x2."""

    def __init__(self, expr, fd_step=_FD_REL_STEP):
        self.expr = expr
        CallableField.__init__(self, parse_expression(expr), fd_step=fd_step)

    def __repr__(self):
        return "ExpressionField(%r)" % self.expr


def as_field(spec):
    """Coerce a number, string expression, callable, or field to a field."""
    if isinstance(spec, ScalarField):
        return spec
    if isinstance(spec, (int, float)):
        return ConstantField(spec)
    if isinstance(spec, str):
        return ExpressionField(spec)
    if callable(spec):
        return CallableField(spec)
    raise ConfigError("cannot interpret %r as a scalar field" % (spec,))
