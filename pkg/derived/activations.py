"""
Fonctions d'activation privées.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

from protocols.bit_extraction import msb
from protocols.comparison import clip
from protocols.multiplication import require_arithmetic
from protocols.ot import ot_select
from sharing.oracle import private_operation

from .kernels import euler_logistic
from .params import LOGISTIC, IterParams

if TYPE_CHECKING:
    from tensor.share_tensor import ShareTensor


@private_operation("relu")
def relu(x: ShareTensor) -> ShareTensor:
    """max(0, x), exact : OT de x sur le bit de signe de -x."""
    require_arithmetic(x)
    return ot_select(msb(-x), x)


@private_operation("abs")
def abs_(x: ShareTensor) -> ShareTensor:
    """|x| = x + OT(MSB(x), -2x), exact."""
    require_arithmetic(x)
    return x + ot_select(msb(x), x * -2)


@private_operation("logistic")
def logistic(x: ShareTensor, params: IterParams = LOGISTIC) -> ShareTensor:
    """Sigmoïde par la méthode d'Euler, x ramené dans [lower, upper].

    Suit exactement ``reference.logistic`` à la troncature près :
    au plus ``iter_cnt·3`` unités de 2^-d d'écart.
    """
    require_arithmetic(x)
    return euler_logistic(clip(x, params.lower, params.upper), params)


@private_operation("logistic_piecewise")
def logistic_piecewise(x: ShareTensor) -> ShareTensor:
    """0 sous -1/2, x + 1/2 entre les deux, 1 au-delà de 1/2."""
    require_arithmetic(x)
    return clip(x + 0.5, 0.0, 1.0)
