"""Latent optimization harness over a differentiable toy generator.

A generator maps a latent code to embedding space; plain gradient descent
minimizes a cosine loss against a pluggable target (bare text, the
projection-augmentation vector, the double-projection ablation, or the
directional baseline). Analytic gradients flow through the generator
Jacobian and are validated by central differences.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import BadDims, DegenerateDirection, IoError, SchemaError
from .subspace import CorpusSubspace, project

GENERATOR_KINDS = ("linear", "mlp1")
TARGET_KINDS = ("naive_text", "pae", "dpe", "directional")

DEFAULT_LR = 0.1
DEFAULT_MAX_STEPS = 500
DEFAULT_TOL = 1e-3


@dataclass(frozen=True)
class Generator:
    """Deterministic toy generator with an analytic Jacobian."""

    kind: str
    latent_dim: int
    out_dim: int
    seed: int
    hidden_dim: int | None = None
    params: dict = field(default_factory=dict)

    def forward(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        if z.shape != (self.latent_dim,):
            raise BadDims(f"latent shape {z.shape} != ({self.latent_dim},)")
        if self.kind == "linear":
            return self.params["W"] @ z + self.params["b"]
        h = np.tanh(self.params["W1"] @ z + self.params["b1"])
        return self.params["W2"] @ h + self.params["b2"]

    def jacobian(self, z) -> np.ndarray:
        """d forward / d z, shape (out_dim, latent_dim)."""
        z = np.asarray(z, dtype=float)
        if self.kind == "linear":
            return self.params["W"]
        pre = self.params["W1"] @ z + self.params["b1"]
        gain = 1.0 - np.tanh(pre) ** 2
        return self.params["W2"] @ (gain[:, None] * self.params["W1"])


def make_generator(kind: str, seed: int, latent_dim: int, out_dim: int,
                   hidden_dim: int | None = None) -> Generator:
    """Build a generator with parameters drawn from a seeded PCG64 stream.

    Weights are uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)]. The linear kind
    with latent_dim == out_dim and seed == 0 is reserved as the exact
    identity map for tests.
    """
    if kind not in GENERATOR_KINDS:
        raise SchemaError(f"unknown generator kind {kind!r}")
    if latent_dim < 1 or out_dim < 1:
        raise BadDims("latent_dim and out_dim must be >= 1")
    if kind == "mlp1" and (hidden_dim is None or hidden_dim < 1):
        raise BadDims("mlp1 requires hidden_dim >= 1")

    if kind == "linear" and seed == 0 and latent_dim == out_dim:
        params = {"W": np.eye(out_dim), "b": np.zeros(out_dim)}
        return Generator("linear", latent_dim, out_dim, seed, None, params)

    rng = np.random.Generator(np.random.PCG64(seed))
    if kind == "linear":
        bound = 1.0 / np.sqrt(latent_dim)
        params = {
            "W": rng.uniform(-bound, bound, size=(out_dim, latent_dim)),
            "b": rng.uniform(-bound, bound, size=out_dim),
        }
        return Generator("linear", latent_dim, out_dim, seed, None, params)

    b1 = 1.0 / np.sqrt(latent_dim)
    b2 = 1.0 / np.sqrt(hidden_dim)
    params = {
        "W1": rng.uniform(-b1, b1, size=(hidden_dim, latent_dim)),
        "b1": rng.uniform(-b1, b1, size=hidden_dim),
        "W2": rng.uniform(-b2, b2, size=(out_dim, hidden_dim)),
        "b2": rng.uniform(-b2, b2, size=out_dim),
    }
    return Generator("mlp1", latent_dim, out_dim, seed, hidden_dim, params)


@dataclass(frozen=True)
class LossSpec:
    """Which vector the cosine loss chases, plus its payload."""

    target_kind: str
    target: np.ndarray | None = None  # naive_text / pae
    subspace: CorpusSubspace | None = None  # dpe
    projected_text: np.ndarray | None = None  # dpe
    origin_image: np.ndarray | None = None  # directional e_I0
    text: np.ndarray | None = None  # directional e_T
    neutral_text: np.ndarray | None = None  # directional e_T_neutral

    def __post_init__(self):
        if self.target_kind not in TARGET_KINDS:
            raise SchemaError(f"unknown target kind {self.target_kind!r}")
        if self.target_kind in ("naive_text", "pae") and self.target is None:
            raise SchemaError(f"{self.target_kind} requires a target vector")
        if self.target_kind == "dpe" and (self.subspace is None or self.projected_text is None):
            raise SchemaError("dpe requires a subspace and the projected text")
        if self.target_kind == "directional" and (
            self.origin_image is None or self.text is None or self.neutral_text is None
        ):
            raise SchemaError("directional requires origin_image, text, and neutral_text")


def _cosine_loss_and_grad_u(u: np.ndarray, t: np.ndarray) -> tuple[float, np.ndarray]:
    """loss = 1 - cos(u, t) and its gradient with respect to u."""
    nu = float(np.linalg.norm(u))
    nt = float(np.linalg.norm(t))
    if nu < 1e-12 or nt < 1e-12:
        raise DegenerateDirection("cosine argument has vanishing norm")
    dot = float(np.dot(u, t))
    loss = 1.0 - dot / (nu * nt)
    grad_u = -(t / (nu * nt) - dot * u / (nu ** 3 * nt))
    return loss, grad_u


def loss_value_and_grad(spec: LossSpec, g: Generator, z) -> tuple[float, np.ndarray]:
    """Loss and its analytic gradient with respect to the latent."""
    z = np.asarray(z, dtype=float)
    out = g.forward(z)
    jac = g.jacobian(z)

    if spec.target_kind in ("naive_text", "pae"):
        loss, grad_u = _cosine_loss_and_grad_u(out, np.asarray(spec.target, dtype=float))
        return loss, jac.T @ grad_u
    if spec.target_kind == "dpe":
        u = project(spec.subspace, out)
        loss, grad_u = _cosine_loss_and_grad_u(u, np.asarray(spec.projected_text, dtype=float))
        basis = spec.subspace.basis
        # chain through the projector basis^T basis
        return loss, jac.T @ (basis.T @ (basis @ grad_u))
    # directional
    u = out - np.asarray(spec.origin_image, dtype=float)
    t = np.asarray(spec.text, dtype=float) - np.asarray(spec.neutral_text, dtype=float)
    loss, grad_u = _cosine_loss_and_grad_u(u, t)
    return loss, jac.T @ grad_u


@dataclass(frozen=True)
class OptimizationTrace:
    steps: tuple[tuple[int, float], ...]
    final_latent: np.ndarray
    final_output: np.ndarray
    converged: bool
    settings: dict
    latents: tuple[np.ndarray, ...] | None = None

    @property
    def losses(self) -> list[float]:
        return [loss for _, loss in self.steps]

    def to_csv(self) -> str:
        lines = ["step,loss"]
        lines += [f"{i},{loss:.12g}" for i, loss in self.steps]
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        doc = {
            "steps": [{"step": i, "loss": loss} for i, loss in self.steps],
            "final_latent": [float(x) for x in self.final_latent],
            "final_output": [float(x) for x in self.final_output],
            "converged": self.converged,
            "settings": self.settings,
        }
        return json.dumps(doc, indent=2) + "\n"

    def save(self, csv_path=None, json_path=None) -> None:
        try:
            if csv_path is not None:
                with open(csv_path, "w", encoding="utf-8") as fh:
                    fh.write(self.to_csv())
            if json_path is not None:
                with open(json_path, "w", encoding="utf-8") as fh:
                    fh.write(self.to_json())
        except OSError as exc:
            raise IoError(f"cannot write trace: {exc}") from exc


def optimize(spec: LossSpec, g: Generator, z0, lr: float = DEFAULT_LR,
             max_steps: int = DEFAULT_MAX_STEPS, tol: float = DEFAULT_TOL,
             record_latents: bool = False) -> OptimizationTrace:
    """Plain fixed-step gradient descent on the cosine loss."""
    if lr <= 0:
        raise SchemaError(f"lr must be positive, got {lr}")
    if max_steps < 1:
        raise SchemaError(f"max_steps must be >= 1, got {max_steps}")
    z = np.asarray(z0, dtype=float).copy()
    steps = []
    latents = [] if record_latents else None
    converged = False
    for i in range(max_steps):
        try:
            loss, grad = loss_value_and_grad(spec, g, z)
        except DegenerateDirection as exc:
            raise DegenerateDirection(f"step {i}: {exc}") from exc
        steps.append((i, float(loss)))
        if record_latents:
            latents.append(z.copy())
        if loss < tol:
            converged = True
            break
        z = z - lr * grad
    return OptimizationTrace(
        steps=tuple(steps),
        final_latent=z,
        final_output=g.forward(z),
        converged=converged,
        settings={"lr": lr, "max_steps": max_steps, "tol": tol,
                  "target_kind": spec.target_kind, "generator": g.kind, "seed": g.seed},
        latents=tuple(latents) if record_latents else None,
    )


def finite_diff_check(spec: LossSpec, g: Generator, z, eps: float = 1e-5) -> float:
    """Max relative error of the analytic gradient vs central differences."""
    if eps <= 0:
        raise SchemaError(f"eps must be positive, got {eps}")
    z = np.asarray(z, dtype=float)
    _, analytic = loss_value_and_grad(spec, g, z)
    worst = 0.0
    for k in range(z.shape[0]):
        zp = z.copy()
        zm = z.copy()
        zp[k] += eps
        zm[k] -= eps
        lp, _ = loss_value_and_grad(spec, g, zp)
        lm, _ = loss_value_and_grad(spec, g, zm)
        numeric = (lp - lm) / (2.0 * eps)
        err = abs(analytic[k] - numeric) / max(1e-12, abs(numeric))
        worst = max(worst, err)
    return worst
