from .disc_domain import DiscDomain
from .levelset_domain import LevelSetDomain, ImplicitFunction, IMPLICIT_FUNCTIONS
from .superellipse_domain import SuperellipseDomain

__all__ = ['DiscDomain', 'LevelSetDomain', 'SuperellipseDomain', 'ImplicitFunction', 'IMPLICIT_FUNCTIONS']
