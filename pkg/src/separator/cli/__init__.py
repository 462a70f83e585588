"""Manifest format, query runner and the ``sep`` command."""
from .manifest import Manifest, parse, print_manifest
from .runner import ManifestError, Options, render_text, run_manifest

__all__ = ["Manifest", "parse", "print_manifest", "ManifestError", "Options", "render_text", "run_manifest"]
