"""Two-qubit circuit synthesis for the deformed coin operator.

Implements the two-CNOT feasibility test
gamma = tr[U (sy x sy) U^T (sy x sy)] / sqrt(det U)  (real <=> 2 CNOTs
suffice), the fixed two-CNOT circuits at theta = 2*pi/3 and 4*pi/3, and a
multi-start numerical fit of the universal 3-CNOT template.

Gate conventions (verified against the fixed circuits):
  U(t, p, l) = [[cos(t/2), -e^{il} sin(t/2)], [e^{ip} sin(t/2), e^{i(p+l)} cos(t/2)]]
  R_X, R_Z   = exp(-i a X/2), exp(-i a Z/2)
  CNOT control = qubit 0 (most significant), target = qubit 1.
Circuit layers are listed left to right in application order, so the
evaluated matrix is (last layer) * ... * (first layer).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import minimize

from .core import is_unitary
from .qubitmap import x_theta_two_qubit

SIGMA_Y = np.array([[0, -1j], [1j, 0]])
_SY2 = np.kron(SIGMA_Y, SIGMA_Y)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
    dtype=np.complex128,
)

BETA_1 = math.acos(-1.0 / 3.0) / 2.0
BETA_2 = math.pi - BETA_1


class SynthesisError(ValueError):
    """Invalid synthesis input (non-unitary target, unsupported angle)."""


def u_gate(t: float, p: float, l: float) -> NDArray[np.complex128]:
    """General single-qubit rotation U(t, p, l)."""
    c, s = math.cos(t / 2.0), math.sin(t / 2.0)
    return np.array(
        [[c, -np.exp(1j * l) * s], [np.exp(1j * p) * s, np.exp(1j * (p + l)) * c]]
    )


def rx_gate(a: float) -> NDArray[np.complex128]:
    return np.array(
        [
            [math.cos(a / 2.0), -1j * math.sin(a / 2.0)],
            [-1j * math.sin(a / 2.0), math.cos(a / 2.0)],
        ]
    )


def rz_gate(a: float) -> NDArray[np.complex128]:
    return np.diag([np.exp(-0.5j * a), np.exp(0.5j * a)])


@dataclass(frozen=True)
class LocalLayer:
    """Simultaneous single-qubit gates, three Euler angles per qubit."""

    q0: tuple[float, float, float]
    q1: tuple[float, float, float]

    def matrix(self) -> NDArray[np.complex128]:
        return np.kron(u_gate(*self.q0), u_gate(*self.q1))


@dataclass(frozen=True)
class CnotLayer:
    control: int = 0
    target: int = 1

    def matrix(self) -> NDArray[np.complex128]:
        if (self.control, self.target) == (0, 1):
            return CNOT
        if (self.control, self.target) == (1, 0):
            swap = np.eye(4)[[0, 2, 1, 3]]
            return swap @ CNOT @ swap
        raise SynthesisError(f"bad CNOT wiring {(self.control, self.target)}")


@dataclass(frozen=True)
class RotationLayer:
    """R_X on qubit 0 together with R_Z on qubit 1 (mid-circuit layer of
    the fixed two-CNOT circuits)."""

    angle_x: float
    angle_z: float

    def matrix(self) -> NDArray[np.complex128]:
        return np.kron(rx_gate(self.angle_x), rz_gate(self.angle_z))


@dataclass(frozen=True)
class CircuitTemplate:
    layers: tuple

    def matrix(self) -> NDArray[np.complex128]:
        out = np.eye(4, dtype=np.complex128)
        for layer in self.layers:
            out = layer.matrix() @ out
        return out

    @property
    def cnot_count(self) -> int:
        return sum(1 for layer in self.layers if isinstance(layer, CnotLayer))

    def to_netlist(self) -> str:
        """One gate per line: kind, qubits, angles (17 significant digits)."""
        lines = []
        fmt = "{:.17g}"
        for layer in self.layers:
            if isinstance(layer, CnotLayer):
                lines.append(f"cnot {layer.control} {layer.target}")
            elif isinstance(layer, LocalLayer):
                for q, angles in ((0, layer.q0), (1, layer.q1)):
                    lines.append("u " + str(q) + " " + " ".join(fmt.format(a) for a in angles))
            elif isinstance(layer, RotationLayer):
                lines.append("rx 0 " + fmt.format(layer.angle_x))
                lines.append("rz 1 " + fmt.format(layer.angle_z))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        out = []
        for layer in self.layers:
            if isinstance(layer, CnotLayer):
                out.append({"kind": "cnot", "control": layer.control, "target": layer.target})
            elif isinstance(layer, LocalLayer):
                out.append({"kind": "local", "q0": list(layer.q0), "q1": list(layer.q1)})
            elif isinstance(layer, RotationLayer):
                out.append({"kind": "rot", "rx0": layer.angle_x, "rz1": layer.angle_z})
        return json.dumps(out)


@dataclass(frozen=True)
class SynthesisReport:
    theta: Optional[float]
    cnot_count: int
    circuit: CircuitTemplate
    residual: float
    iterations: int
    restarts_used: int
    verified: bool
    convention: str = "u-cnot01-l2r"

    def to_json_dict(self) -> dict:
        return {
            "theta": self.theta,
            "cnot_count": self.cnot_count,
            "residual": self.residual,
            "iterations": self.iterations,
            "restarts_used": self.restarts_used,
            "verified": self.verified,
            "convention": self.convention,
            "circuit": json.loads(self.circuit.to_json()),
        }


def distance(u: NDArray, v: NDArray) -> float:
    """Global-phase-invariant distance D(U, V) = 1 - |tr(U^dagger V)| / 4."""
    return float(1.0 - abs(np.trace(np.asarray(u).conj().T @ np.asarray(v))) / 4.0)


def two_cnot_feasible(u: NDArray, tol: float = 1e-9) -> tuple[bool, complex]:
    """Whether a 4x4 unitary admits a two-CNOT circuit, plus the test scalar.

    Both branches of sqrt(det U) are checked; the criterion is satisfied if
    either makes gamma real.
    """
    u = np.asarray(u, dtype=np.complex128)
    if not is_unitary(u, 1e-9):
        raise SynthesisError("two-CNOT test requires a unitary input")
    trace = np.trace(u @ _SY2 @ u.T @ _SY2)
    root = np.sqrt(np.linalg.det(u))
    gamma = trace / root
    feasible = abs(gamma.imag) < tol or abs((-gamma).imag) < tol
    return bool(feasible), complex(gamma)


def fixed_two_cnot_circuit(theta: float) -> CircuitTemplate:
    """Hand-derived two-CNOT circuits for the classical angles."""
    pi = math.pi
    if math.isclose(theta, 2 * pi / 3, rel_tol=0, abs_tol=1e-12):
        return CircuitTemplate(
            layers=(
                LocalLayer(q0=(BETA_2, pi / 4, -pi / 3), q1=(BETA_1, 3 * pi / 4, 2 * pi / 3)),
                CnotLayer(),
                RotationLayer(angle_x=-pi / 3, angle_z=pi / 3),
                CnotLayer(),
                LocalLayer(q0=(BETA_1, -2 * pi / 3, pi / 4), q1=(BETA_2, pi / 3, 3 * pi / 4)),
            )
        )
    if math.isclose(theta, 4 * pi / 3, rel_tol=0, abs_tol=1e-12):
        return CircuitTemplate(
            layers=(
                LocalLayer(q0=(BETA_2, -pi / 4, -2 * pi / 3), q1=(BETA_1, -3 * pi / 4, pi / 3)),
                CnotLayer(),
                RotationLayer(angle_x=-pi / 3, angle_z=pi / 3),
                CnotLayer(),
                LocalLayer(q0=(BETA_1, -pi / 3, -pi / 4), q1=(BETA_2, 2 * pi / 3, -3 * pi / 4)),
            )
        )
    raise SynthesisError(
        f"fixed circuits exist only at theta = 2*pi/3 and 4*pi/3, got {theta}"
    )


def verify_circuit(circuit: CircuitTemplate, target: NDArray) -> float:
    """Residual distance between the evaluated circuit and the target."""
    return distance(circuit.matrix(), target)


def three_cnot_template(angles: Sequence[float]) -> CircuitTemplate:
    """Universal template: 4 local layers interleaved with 3 CNOTs,
    8 single-qubit gates = 24 angles."""
    a = np.asarray(angles, dtype=float)
    if a.shape != (24,):
        raise SynthesisError(f"expected 24 angles, got shape {a.shape}")
    g = a.reshape(8, 3)
    layers = []
    for pair in range(4):
        layers.append(LocalLayer(q0=tuple(g[2 * pair]), q1=tuple(g[2 * pair + 1])))
        if pair < 3:
            layers.append(CnotLayer())
    return CircuitTemplate(layers=tuple(layers))


def _template_matrix(angles: NDArray) -> NDArray[np.complex128]:
    g = angles.reshape(8, 3)
    out = np.eye(4, dtype=np.complex128)
    for pair in range(4):
        local = np.kron(u_gate(*g[2 * pair]), u_gate(*g[2 * pair + 1]))
        out = local @ out
        if pair < 3:
            out = CNOT @ out
    return out


def fit_three_cnot(
    target: NDArray,
    restarts: int = 50,
    tol: float = 1e-8,
    seed: int = 0,
    theta: Optional[float] = None,
) -> SynthesisReport:
    """Fit the 3-CNOT template to a target unitary by multi-start local
    optimization of the phase-invariant distance.

    Never raises on failure; the report carries the best residual found.
    """
    target = np.asarray(target, dtype=np.complex128)
    if not is_unitary(target, 1e-9):
        raise SynthesisError("synthesis target must be unitary")

    def objective(angles: NDArray) -> float:
        return distance(_template_matrix(angles), target)

    rng = np.random.Generator(np.random.Philox(key=seed))
    best_x = None
    best_val = np.inf
    iterations = 0
    used = 0
    for used in range(1, restarts + 1):
        x0 = rng.uniform(0.0, 2.0 * np.pi, size=24)
        res = minimize(objective, x0, method="L-BFGS-B")
        iterations += int(res.nit)
        if res.fun < best_val:
            best_val = float(res.fun)
            best_x = res.x
        if best_val < tol:
            break
    circuit = three_cnot_template(best_x)
    return SynthesisReport(
        theta=theta,
        cnot_count=3,
        circuit=circuit,
        residual=best_val,
        iterations=iterations,
        restarts_used=used,
        verified=best_val < tol,
    )


def synthesize(theta: float, restarts: int = 50, tol: float = 1e-8, seed: int = 0) -> SynthesisReport:
    """Smallest-CNOT circuit for the two-qubit deformed coin operator: the
    fixed two-CNOT circuit when the feasibility test passes at a classical
    angle, the fitted 3-CNOT template otherwise."""
    target = x_theta_two_qubit(theta)
    for classical in (2 * math.pi / 3, 4 * math.pi / 3):
        if math.isclose(theta % (2 * math.pi), classical, rel_tol=0, abs_tol=1e-12):
            circuit = fixed_two_cnot_circuit(classical)
            residual = verify_circuit(circuit, target)
            return SynthesisReport(
                theta=theta,
                cnot_count=2,
                circuit=circuit,
                residual=residual,
                iterations=0,
                restarts_used=0,
                verified=residual < 1e-9,
            )
    if math.isclose(theta % (2 * math.pi), 0.0, abs_tol=1e-12):
        circuit = CircuitTemplate(layers=(LocalLayer(q0=(0, 0, 0), q1=(0, 0, 0)),))
        return SynthesisReport(
            theta=theta, cnot_count=0, circuit=circuit,
            residual=verify_circuit(circuit, target), iterations=0,
            restarts_used=0, verified=True,
        )
    return fit_three_cnot(target, restarts=restarts, tol=tol, seed=seed, theta=theta)
