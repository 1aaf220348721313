from functools import lru_cache

from ..models import ParticleKind, SystemDescriptor
from .base import HilbertSpace
from .distinguishable import DistinguishableSpace
from .fock import BosonicSpace, FermionicSpace

__all__ = ["HilbertSpace", "DistinguishableSpace", "BosonicSpace", "FermionicSpace", "get_space"]

_SPACES = {
    ParticleKind.distinguishable: DistinguishableSpace,
    ParticleKind.bosonic: BosonicSpace,
    ParticleKind.fermionic: FermionicSpace,
}


@lru_cache(maxsize=64)
def get_space(descriptor: SystemDescriptor) -> HilbertSpace:
    """Shared, cached space for a descriptor (spaces are never mutated after construction)."""
    return _SPACES[descriptor.kind](descriptor)
