"""Small dense MLPs expressed as tape parameters."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError
from . import tape
from .tape import Var

ACTIVATION_NAMES = ("relu", "tanh", "sigmoid", "identity")


@dataclass
class Layer:
    weight: Var  # [in_dim, out_dim]
    bias: Var  # [out_dim]
    activation: str


@dataclass
class Mlp:
    layers: list[Layer] = field(default_factory=list)

    @property
    def input_dim(self) -> int:
        return self.layers[0].weight.value.shape[0]

    @property
    def output_dim(self) -> int:
        return self.layers[-1].weight.value.shape[1]

    def parameters(self) -> list[Var]:
        out = []
        for layer in self.layers:
            out.extend((layer.weight, layer.bias))
        return out


def make_mlp(dims, activations, rng: np.random.Generator,
             final_bias: float = 0.0) -> Mlp:
    """Glorot-initialized MLP with dims = [in, h1, ..., out].

    final_bias seeds the last layer's bias (the combination-weight heads
    start at 1 so reconstruction begins as a plain sum of parts).
    """
    if len(dims) < 2 or len(activations) != len(dims) - 1:
        raise ConfigError(f"inconsistent MLP spec: dims={dims}, activations={activations}")
    for act in activations:
        if act not in ACTIVATION_NAMES:
            raise ConfigError(f"unknown activation {act!r}")
    layers = []
    for k, (din, dout) in enumerate(zip(dims[:-1], dims[1:])):
        std = np.sqrt(2.0 / (din + dout))
        w = Var(rng.normal(0.0, std, size=(din, dout)))
        b_val = np.zeros(dout)
        if k == len(dims) - 2 and final_bias != 0.0:
            b_val = np.full(dout, float(final_bias))
        layers.append(Layer(weight=w, bias=Var(b_val), activation=activations[k]))
    return Mlp(layers)


def identity_mlp(dim: int) -> Mlp:
    """Single identity layer (W = I, b = 0); used to switch the lift off."""
    return Mlp([Layer(weight=Var(np.eye(dim)), bias=Var(np.zeros(dim)),
                      activation="identity")])


def mlp_forward(mlp: Mlp, x, *, training: bool = False, dropout_keep: float = 1.0,
                rng: np.random.Generator | None = None) -> Var:
    """Forward pass for a single vector or a batch of rows.

    Returns a Var; the tape hanging off it carries everything needed for
    exact reverse-mode gradients of the realized (post-dropout-mask)
    function.  Dropout is applied after each hidden activation, never
    after the output layer, and only when training.
    """
    if not 0.0 < dropout_keep <= 1.0:
        raise ConfigError(f"dropout_keep must be in (0, 1], got {dropout_keep}")
    h = tape.as_var(x)
    if h.value.shape[-1] != mlp.input_dim:
        raise ConfigError(
            f"MLP input dim mismatch: got {h.value.shape[-1]}, expected {mlp.input_dim}"
        )
    last = len(mlp.layers) - 1
    for k, layer in enumerate(mlp.layers):
        h = tape.linear(h, layer.weight, layer.bias)
        h = tape.activate(h, layer.activation)
        if training and dropout_keep < 1.0 and k < last:
            h = tape.dropout(h, dropout_keep, rng)
    return h
