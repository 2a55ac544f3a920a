"""Kobayashi distances and metrics: closed forms, covering oracles, bounds and graphs.

Import submodules directly (``from metrics.exact import ...``); the worm
constructions import ``metrics.exact`` themselves.
"""
