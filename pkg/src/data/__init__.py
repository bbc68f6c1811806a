from .run_repository import RunRepository
from .artifact_repository import ArtifactRepository

__all__ = ['RunRepository', 'ArtifactRepository']
