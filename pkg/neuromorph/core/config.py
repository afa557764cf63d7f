"""
Configuration management for measurement and evaluation runs
"""

from dataclasses import dataclass, fields
from typing import Optional, Tuple

IMAGE_EXTENSIONS = [".pgm", ".png"]
ANNOTATION_EXTENSIONS = [".json"]

DEFAULT_RESOLUTION = (640, 640)


def parse_resolution(text: str) -> Optional[Tuple[int, int]]:
    """Parse 'WxH' (or 'none') into a (width, height) tuple"""
    if text.strip().lower() == "none":
        return None
    try:
        w, h = (int(part) for part in text.lower().split("x"))
    except ValueError:
        raise ValueError(f"resolution must look like 640x640 or 'none', got '{text}'")
    return w, h


@dataclass
class EvaluationConfig:
    """Configuration for measurement and evaluation runs"""

    # Matching
    threshold: float = 0.5
    connectivity: int = 8

    # Working resolution (width, height); None keeps each image's native size
    resolution: Optional[Tuple[int, int]] = DEFAULT_RESOLUTION

    # Reporting
    per_image: bool = False
    write_overlays: bool = True
    source_label: str = "gt"

    # Execution
    jobs: int = 1
    progress: bool = True

    def __post_init__(self) -> None:
        """Post-initialization validation"""
        if not 0 <= self.threshold < 1:
            raise ValueError(f"threshold must lie in [0, 1), got {self.threshold}")
        if self.connectivity not in (4, 8):
            raise ValueError(f"connectivity must be 4 or 8, got {self.connectivity}")
        if self.resolution is not None:
            self.resolution = tuple(self.resolution)
            if len(self.resolution) != 2 or min(self.resolution) < 1:
                raise ValueError(f"resolution must be two positive integers, got {self.resolution}")
        if self.jobs < 1:
            raise ValueError(f"jobs must be at least 1, got {self.jobs}")

    @classmethod
    def from_dict(cls, config_dict: dict) -> "EvaluationConfig":
        """Create config from dictionary"""
        return cls(**config_dict)

    def to_dict(self) -> dict:
        """Convert config to dictionary"""
        return {field.name: getattr(self, field.name) for field in fields(self)}
