"""Vessel-of-intervention detection from guidewire tips."""

import json
import os

from . import _core
from ._core import (
    VoiddError,
    discrete_frechet,
    elongation,
    min_tree,
    read_pgm,
    thin,
    tre,
    vesselness,
    write_pgm,
)

__all__ = [
    "VoiddError",
    "default_config",
    "default_scene",
    "discrete_frechet",
    "elongation",
    "extract_tip_candidates",
    "extract_vessel_graph",
    "min_tree",
    "read_pgm",
    "run_all",
    "synth",
    "thin",
    "tre",
    "vesselness",
    "write_pgm",
]


def _config_json(config):
    return "" if config is None else json.dumps(config)


def default_config():
    return json.loads(_core.default_config())


def default_scene(tip_free=False):
    return json.loads(_core.default_scene(tip_free))


def extract_tip_candidates(image, config=None):
    return _core.extract_tip_candidates(image, _config_json(config))


def extract_vessel_graph(image, phase=0, config=None):
    return json.loads(_core.extract_vessel_graph(image, phase, _config_json(config)))


def synth(out_dir, tip_free=False, spec=None):
    spec_json = "" if spec is None else json.dumps(spec)
    return _core.synth(os.fspath(out_dir), tip_free, spec_json)


def run_all(manifest, out_dir, config=None, jobs=0):
    """Runs every stage and returns the evaluation report (or the tracking
    result when the manifest has no ground truth)."""
    return json.loads(_core.run_all(os.fspath(manifest), os.fspath(out_dir), _config_json(config), jobs))
