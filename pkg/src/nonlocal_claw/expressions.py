"""Initial data: the named profiles and a small arithmetic expression language.

Expressions are written in Python syntax over the variable ``x`` and may use
``pi``, the operators ``+ - * / **``, and the functions ``sin``, ``cos``,
``abs`` and ``step`` (``step(s)`` is 1 for ``s >= 0`` and 0 otherwise).
Anything else is rejected when the expression is parsed.

>>> u = parse_expression("1 - 2*step(x)")
>>> u(np.array([-0.5, 0.5])).tolist()
[1.0, -1.0]
"""

from __future__ import annotations

import ast
import operator
from typing import Callable

import numpy as np


class ExpressionError(ValueError):
    pass


def _step(s):
    return np.where(np.asarray(s) >= 0, 1.0, 0.0)


FUNCTIONS = {"sin": np.sin, "cos": np.cos, "abs": np.abs, "step": _step}
CONSTANTS = {"pi": np.pi}

_BINARY = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}


def _compile(node: ast.AST) -> Callable:
    """Turn a validated AST node into a closure of ``x``."""
    if isinstance(node, ast.Expression):
        return _compile(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
            and not isinstance(node.value, bool):
        value = float(node.value)
        return lambda x: value
    if isinstance(node, ast.Name):
        if node.id == "x":
            return lambda x: x
        if node.id in CONSTANTS:
            value = CONSTANTS[node.id]
            return lambda x: value
        raise ExpressionError(f"unknown name {node.id!r}")
    if isinstance(node, ast.BinOp) and type(node.op) in _BINARY:
        op = _BINARY[type(node.op)]
        left, right = _compile(node.left), _compile(node.right)
        return lambda x: op(left(x), right(x))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
        op = _UNARY[type(node.op)]
        arg = _compile(node.operand)
        return lambda x: op(arg(x))
    if isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in FUNCTIONS:
            raise ExpressionError(f"unknown function in {ast.unparse(node)!r}")
        if len(node.args) != 1 or node.keywords:
            raise ExpressionError(f"{node.func.id}() takes exactly one argument")
        fn = FUNCTIONS[node.func.id]
        arg = _compile(node.args[0])
        return lambda x: fn(arg(x))
    raise ExpressionError(f"unsupported syntax: {ast.unparse(node)!r}")


def parse_expression(text: str) -> Callable:
    """Return a vectorised function ``u0(x)`` for the expression ``text``."""
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse expression {text!r}: {exc.msg}") from None
    body = _compile(tree)

    def u0(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            return np.asarray(body(x), dtype=float) * np.ones_like(x)

    u0.__doc__ = text
    return u0


NAMED = {
    "u01": "(1 + sin(2*pi*x)) / 2",
    "u02": "-sin(pi*x)",
    "u03": "1 - sin(pi*x)",
    "u04": "1 - 2*step(x)",
}


def initial_datum(spec: str) -> Callable:
    """Resolve a named datum (``u01`` .. ``u04``) or parse an expression."""
    return parse_expression(NAMED.get(spec.strip(), spec))
