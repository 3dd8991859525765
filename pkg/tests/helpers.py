"""Independent oracles shared by the test modules."""

from __future__ import annotations

import itertools
import math

import numpy as np


def fd_grad(f, x, h=1e-5):
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def fd_hess(f, x, h=1e-4):
    """Second differences of values only (no derivative information used)."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    H = np.empty((n, n))
    f0 = f(x)
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = h
        H[i, i] = (f(x + ei) - 2 * f0 + f(x - ei)) / h**2
        for j in range(i + 1, n):
            ej = np.zeros(n)
            ej[j] = h
            H[i, j] = H[j, i] = (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)) / (4 * h * h)
    return H


def rel_err(actual, ref):
    actual, ref = np.asarray(actual, dtype=float), np.asarray(ref, dtype=float)
    return float(np.max(np.abs(actual - ref)) / max(1.0, float(np.max(np.abs(ref)))))


# ---------------------------------------------------------------- polynomials


def random_polynomial(rng, nvars=3, degree=3):
    """Dense random polynomial as {exponent tuple: coefficient}."""
    terms = {}
    for exps in itertools.product(range(degree + 1), repeat=nvars):
        if sum(exps) <= degree:
            terms[exps] = float(np.round(rng.uniform(-1, 1), 6))
    return terms


def poly_source(terms, names):
    parts = []
    for exps, c in terms.items():
        factors = [repr(c) if c >= 0 else f"({c!r})"]
        for name, k in zip(names, exps):
            if k == 1:
                factors.append(name)
            elif k > 1:
                factors.append(f"{name}^{k}")
        parts.append(" * ".join(factors))
    return " + ".join(parts)


def poly_eval(terms, point):
    return sum(c * math.prod(v**k for v, k in zip(point, exps)) for exps, c in terms.items())


def poly_grad(terms, point):
    n = len(point)
    g = np.zeros(n)
    for exps, c in terms.items():
        for i in range(n):
            k = exps[i]
            if k == 0:
                continue
            g[i] += c * k * math.prod(v ** (e - (j == i)) for j, (v, e) in enumerate(zip(point, exps)))
    return g


# ---------------------------------------------------------------- expressions


def random_expression(rng, names, depth=3):
    """Random smooth DSL text that stays inside every function's domain on [-1, 1]^n."""
    if depth == 0 or rng.random() < 0.2:
        if rng.random() < 0.7:
            return names[rng.integers(len(names))]
        return repr(float(np.round(rng.uniform(0.1, 2.0), 3)))
    a = random_expression(rng, names, depth - 1)
    b = random_expression(rng, names, depth - 1)
    choice = rng.integers(10)
    if choice == 0:
        return f"({a}) + ({b})"
    if choice == 1:
        return f"({a}) - ({b})"
    if choice == 2:
        return f"({a}) * ({b})"
    if choice == 3:
        return f"({a}) / (1.5 + ({b})^2)"
    if choice == 4:
        return f"sin({a})"
    if choice == 5:
        return f"cos({a})"
    if choice == 6:
        return f"exp(sin({a}))"
    if choice == 7:
        return f"log(1 + ({a})^2)"
    if choice == 8:
        return f"sqrt(2 + cos({a}))"
    return f"({a})^{int(rng.integers(2, 4))}"
