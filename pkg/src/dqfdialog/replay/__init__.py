"""Prioritized replay buffer, sum tree and demonstration files."""

from .buffer import Batch, BufferConfig, SumTreeBuffer, Transition, push, sample, update_priorities
from .demo_file import DemoSet, read_demo_file, write_demo_file
from .sum_tree import SumTree

__all__ = [
    "Batch",
    "BufferConfig",
    "SumTreeBuffer",
    "Transition",
    "push",
    "sample",
    "update_priorities",
    "DemoSet",
    "read_demo_file",
    "write_demo_file",
    "SumTree",
]
