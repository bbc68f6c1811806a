import os
import importlib
import inspect
import logging
from typing import Dict, List, Type
from src.core.coupling_skeleton import CouplingSkeleton
from src.core.domain_skeleton import DomainSkeleton
from src.core.lagrangian_skeleton import LagrangianSkeleton
from src.exceptions import UnknownComponentError

logger = logging.getLogger(__name__)

_PACKAGES = {
    'domain': ('domains', '_domain', DomainSkeleton),
    'lagrangian': ('lagrangians', '_lagrangian', LagrangianSkeleton),
    'coupling': ('couplings', '_coupling', CouplingSkeleton),
}


class ComponentInfo:
    def __init__(self, kind: str, name: str, class_name: str, description: str):
        self.kind = kind
        self.name = name
        self.class_name = class_name
        self.description = description

    def dict(self) -> Dict[str, str]:
        return {
            'kind': self.kind,
            'name': self.name,
            'class_name': self.class_name,
            'description': self.description
        }


class RegistryService:
    """Resolves component names from scenario files to classes.

    Programmatic registrations win; otherwise `src.<package>.<name><suffix>` is imported and the
    skeleton subclass whose `kind` (domains) or `name` attribute matches is returned.
    """
    _registered: Dict[str, Dict[str, type]] = {'domain': {}, 'lagrangian': {}, 'coupling': {}}

    @staticmethod
    def _label(cls: type, kind: str) -> str:
        return getattr(cls, 'kind' if kind == 'domain' else 'name', None)

    @classmethod
    def _load(cls, kind: str, name: str) -> type:
        if name in cls._registered[kind]:
            return cls._registered[kind][name]
        package, suffix, base = _PACKAGES[kind]
        try:
            module = importlib.import_module(f'src.{package}.{name}{suffix}')
        except ImportError as e:
            logger.info(f"{kind.capitalize()} module '{name}' not found: {str(e)}")
            raise UnknownComponentError(f"Unknown {kind} {name!r}; known: {cls.names(kind)}") from None
        for _, obj in inspect.getmembers(module, inspect.isclass):
            if issubclass(obj, base) and obj is not base and cls._label(obj, kind) == name:
                return obj
        raise UnknownComponentError(f"Module for {kind} {name!r} defines no matching {base.__name__} subclass")

    @classmethod
    def load_domain_class(cls, kind: str) -> Type[DomainSkeleton]:
        return cls._load('domain', kind)

    @classmethod
    def load_lagrangian_class(cls, name: str) -> Type[LagrangianSkeleton]:
        return cls._load('lagrangian', name)

    @classmethod
    def load_coupling_class(cls, name: str) -> Type[CouplingSkeleton]:
        return cls._load('coupling', name)

    @classmethod
    def register_domain(cls, kind: str, domain_class: Type[DomainSkeleton]) -> None:
        cls._registered['domain'][kind] = domain_class

    @classmethod
    def register_lagrangian(cls, name: str, lagrangian_class: Type[LagrangianSkeleton]) -> None:
        cls._registered['lagrangian'][name] = lagrangian_class

    @classmethod
    def register_coupling(cls, name: str, coupling_class: Type[CouplingSkeleton]) -> None:
        cls._registered['coupling'][name] = coupling_class

    @classmethod
    def names(cls, kind: str) -> List[str]:
        package, suffix, _ = _PACKAGES[kind]
        directory = os.path.join(os.path.dirname(__file__), '..', package)
        found = [f[:-len(suffix) - 3] for f in os.listdir(directory)
                 if f.endswith(f'{suffix}.py') and not f.startswith('__')]
        return sorted(set(found) | set(cls._registered[kind]))

    @classmethod
    def list_components(cls) -> Dict[str, List[ComponentInfo]]:
        components: Dict[str, List[ComponentInfo]] = {}
        for kind in _PACKAGES:
            entries = []
            for name in cls.names(kind):
                try:
                    obj = cls._load(kind, name)
                except UnknownComponentError:
                    continue
                doc = (obj.__doc__ or "").strip().splitlines()
                entries.append(ComponentInfo(kind, name, obj.__name__, doc[0] if doc else ""))
            components[kind] = entries
        return components
