"""
Inverse, division, racine, exponentielle et logarithme privés.

Chaque fonction vérifie d'abord que ses paramètres convergent sur le
domaine annoncé (``DomainError`` sinon), puis déroule le noyau commun avec
la référence en clair.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Any

import structlog

from protocols.multiplication import mul_fixed, require_arithmetic
from sharing.oracle import private_operation

from . import kernels
from .params import EXP, LOG, RECIPROCAL, SQRT, IterParams

if TYPE_CHECKING:
    from tensor.share_tensor import ShareTensor

logger = structlog.get_logger(__name__)


@private_operation("reciprocal")
def reciprocal(x: ShareTensor, params: IterParams = RECIPROCAL) -> ShareTensor:
    """1/x pour x dans [lower, upper], lower > 0.

    Le départ 48/17 - 32/17·x' est pris en x' = x·2^-s, où 2^s est la
    puissance de deux publique qui majore ``upper``.
    """
    require_arithmetic(x)
    kernels.check_reciprocal(params, x.config)
    logger.debug(
        "reciprocal.scale",
        exponent=kernels.reciprocal_exponent(params),
        iter_cnt=params.iter_cnt,
    )
    return kernels.newton_reciprocal(x, params)


@private_operation("divide")
def divide(y: Any, x: ShareTensor, params: IterParams = RECIPROCAL) -> ShareTensor:
    from tensor.share_tensor import ShareTensor

    inverse = reciprocal(x, params)
    if isinstance(y, ShareTensor):
        return mul_fixed(y, inverse)
    return inverse * y


@private_operation("sqrt")
def sqrt(x: ShareTensor, params: IterParams = SQRT) -> ShareTensor:
    require_arithmetic(x)
    kernels.check_sqrt(params, x.config)
    return kernels.newton_sqrt(x, params)


@private_operation("exp")
def exp(x: ShareTensor, params: IterParams = EXP) -> ShareTensor:
    """(1 + x/2^m)^(2^m) avec m = iter_cnt.

    Erreur relative de la méthode de l'ordre de x²/2^(m+1).
    """
    require_arithmetic(x)
    kernels.check_exp(params, x.config)
    return kernels.exp_by_squaring(x, params.iter_cnt)


@private_operation("log")
def log(x: ShareTensor, params: IterParams = LOG) -> ShareTensor:
    require_arithmetic(x)
    kernels.check_log(params, x.config)
    return kernels.newton_log(x, params)
