"""Access to the seed resources shipped with the package."""

from importlib import resources
from pathlib import Path


def resource_path(name: str) -> Path:
    return Path(str(resources.files("xdoc") / "data" / name))
