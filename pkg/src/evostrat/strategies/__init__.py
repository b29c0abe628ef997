"""Strategy implementations and the name registry."""

from .eod import CMAES, GaussianES, SepCMAES, cma_constants
from .fd import ARS, PGPE, OpenAIES
from .meo import DE, PSO, GaussianGA
from .nes import SNES, XNES

STRATEGIES = {
    cls.name: cls
    for cls in (OpenAIES, PGPE, ARS, SNES, XNES, CMAES, SepCMAES, GaussianES, GaussianGA, PSO, DE)
}


def get_strategy(name: str):
    try:
        return STRATEGIES[name]
    except KeyError:
        raise KeyError(f"unknown strategy {name!r}; available: {', '.join(STRATEGIES)}") from None


__all__ = [
    "ARS", "CMAES", "DE", "GaussianES", "GaussianGA", "OpenAIES", "PGPE", "PSO",
    "SNES", "SepCMAES", "XNES", "STRATEGIES", "get_strategy", "cma_constants",
]
