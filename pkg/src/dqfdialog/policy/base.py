"""Common interface of system dialog policies."""

from abc import ABC, abstractmethod

from ..dialog.models import DialogState


class Policy(ABC):
    """A system policy maps the tracked dialog state to an action index."""

    name = "policy"

    @abstractmethod
    def act(self, state: DialogState) -> int:
        """Choose the next system action."""

    def init_session(self) -> None:
        """Reset per-episode state; most policies have none."""
