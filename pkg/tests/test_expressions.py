import numpy as np
import pytest

from nonlocal_claw.expressions import NAMED, ExpressionError, initial_datum, parse_expression

X = np.linspace(-1, 1, 101)


@pytest.mark.parametrize("name, fn", [
    ("u01", lambda x: (1 + np.sin(2 * np.pi * x)) / 2),
    ("u02", lambda x: -np.sin(np.pi * x)),
    ("u03", lambda x: 1 - np.sin(np.pi * x)),
    ("u04", lambda x: np.where(x < 0, 1.0, -1.0)),
])
def test_named_data(name, fn):
    np.testing.assert_allclose(initial_datum(name)(X), fn(X), rtol=0, atol=1e-15)


def test_expression_arithmetic():
    u = parse_expression("-x**2 + 3*abs(x)/2 - cos(0*x)")
    np.testing.assert_allclose(u(X), -X ** 2 + 1.5 * np.abs(X) - 1, atol=1e-15)


def test_constant_expression_broadcasts():
    assert parse_expression("2.5")(X).shape == X.shape


def test_step_at_zero():
    assert parse_expression("step(x)")(np.array([-1e-300, 0.0])).tolist() == [0.0, 1.0]


@pytest.mark.parametrize("text", ["__import__('os')", "x.real", "exp(x)", "x if x else 1",
                                  "sin(x, x)", "y + 1", "True", "(x", "[x]", "'a'"])
def test_rejected(text):
    with pytest.raises(ExpressionError):
        parse_expression(text)


def test_named_table_is_complete():
    assert sorted(NAMED) == ["u01", "u02", "u03", "u04"]
