"""Scene files and the bundled scene corpus."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, Union

from .errors import SchemaError
from .geometry import GridSet, Scene, Window, rasterize

SCENE_SCHEMA_VERSION = 1


@dataclass
class SceneFile:
    name: str
    window: Window
    scene: Scene
    description: str = ""
    expected: dict = field(default_factory=dict)

    def grid(self, h: Optional[float] = None) -> GridSet:
        w = self.window if h is None else self.window.with_h(h)
        return rasterize(self.scene, w)

    def to_dict(self) -> dict:
        d = {"schemaVersion": SCENE_SCHEMA_VERSION, "name": self.name,
             "description": self.description, "window": self.window.to_dict(),
             "shapes": self.scene.to_list()}
        if self.expected:
            d["expected"] = self.expected
        return d


def scene_from_dict(d: dict, name: str = "") -> SceneFile:
    if not isinstance(d, dict):
        raise SchemaError("scene file must hold a JSON object")
    version = d.get("schemaVersion", SCENE_SCHEMA_VERSION)
    if version != SCENE_SCHEMA_VERSION:
        raise SchemaError(f"unsupported scene schemaVersion {version}")
    for key in ("window", "shapes"):
        if key not in d:
            raise SchemaError(f"scene is missing {key!r}")
    if not isinstance(d["shapes"], list):
        raise SchemaError("'shapes' must be a list")
    return SceneFile(
        name=d.get("name", name),
        window=Window.from_dict(d["window"]),
        scene=Scene.from_list(d["shapes"]),
        description=d.get("description", ""),
        expected=d.get("expected", {}),
    )


def load_scene(path: Union[str, Path]) -> SceneFile:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from exc
    return scene_from_dict(data, path.stem)


def corpus_names() -> list[str]:
    files = resources.files("arakelian.corpus").iterdir()
    return sorted(f.name[:-5] for f in files if f.name.endswith(".json"))


def corpus_scene(name: str) -> SceneFile:
    res = resources.files("arakelian.corpus") / f"{name}.json"
    if not res.is_file():
        raise KeyError(f"no corpus scene named {name!r}; have {corpus_names()}")
    return scene_from_dict(json.loads(res.read_text()), name)
