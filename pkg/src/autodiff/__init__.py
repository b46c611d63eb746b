"""Reverse-mode differentiation over recorded array programs."""

from . import ops
from .tape import Node, Tape, Var

__all__ = ["Node", "Tape", "Var", "ops"]
