"""Modular, lazily expanded search spaces for neural architecture search."""

from __future__ import annotations

from . import combinators, modules, spaces  # noqa: F401  (populate registries)
from .core import Fragment, Hyperparameter, Input, Module, Output, SearchSpace, validate
from .errors import *  # noqa: F401,F403
from .registry import Call, D, HId, Thunk, constructor, dependent_fn, generator, thunk
from .spaces import SPACES, build_space, make_space, space_fn
from .transition import is_terminal, replay, resolve, transition
from .traversal import module_eval_seq, ordered_hyperps, ordered_modules, unassigned_independent

__version__ = "0.1.0"
