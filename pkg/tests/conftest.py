"""Shared independent oracles for the simulator tests."""

import itertools

import numpy as np
import pytest
from scipy.linalg import expm

X = np.array([[0, 1], [1, 0]], dtype=complex)
I2 = np.eye(2, dtype=complex)


def dense_cost_diagonal(n, edges):
    # cut count from explicit bit tuples, independent of the simulator's bit tricks
    diag = np.zeros(2 ** n)
    for z in range(2 ** n):
        bits = [(z >> q) & 1 for q in range(n)]
        diag[z] = sum(bits[u] != bits[v] for u, v in edges)
    return diag


def dense_mixer(n):
    total = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for q in range(n):
        # kron ordering: leftmost factor is the most significant bit (node n-1)
        ops = [X if k == q else I2 for k in reversed(range(n))]
        term = ops[0]
        for op in ops[1:]:
            term = np.kron(term, op)
        total += term
    return total


def dense_expectation(n, edges, gammas, betas):
    """<C> with full 2^n x 2^n unitaries built by scipy.linalg.expm."""
    c = np.diag(dense_cost_diagonal(n, edges)).astype(complex)
    b = dense_mixer(n)
    psi = np.full(2 ** n, 2 ** (-n / 2), dtype=complex)
    for g, bt in zip(gammas, betas):
        psi = expm(-1j * g * c) @ psi
        psi = expm(-1j * bt * b) @ psi
    return float(np.real(np.conj(psi) @ (c @ psi)))


def brute_connected_subsets(n, edges, k):
    adj = {i: set() for i in range(n)}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    out = []
    for c in itertools.combinations(range(n), k):
        s = set(c)
        seen, stack = {c[0]}, [c[0]]
        while stack:
            x = stack.pop()
            for y in adj[x] & s:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if seen == s:
            out.append(c)
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
