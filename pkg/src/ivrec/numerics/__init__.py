"""Dense linear algebra and the differentiable compute layer."""

from .gradcheck import grad_check
from .linalg import pinv, svd
from .mlp import Layer, Mlp, identity_mlp, make_mlp, mlp_forward
from .optim import AdamState, adam_init, adam_step
from .tape import Var, as_var, backward, zero_grad

__all__ = [
    "AdamState", "Layer", "Mlp", "Var", "adam_init", "adam_step", "as_var",
    "backward", "grad_check", "identity_mlp", "make_mlp", "mlp_forward",
    "pinv", "svd", "zero_grad",
]
