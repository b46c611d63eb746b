"""Recording tape for reverse-mode differentiation of array programs.

Complex quantities carry gradients as ``dL/dRe + j*dL/dIm``; real quantities
carry plain real gradients. Every primitive records a pure forward function
of its parents' values and a vector-Jacobian product rule, so the tape can be
replayed with new leaf values.
"""

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..utils.errors import TapeError, TapeReplayError

VjpRule = Callable[[np.ndarray, np.ndarray, tuple[np.ndarray, ...], tuple[bool, ...]], tuple]


@dataclass
class Node:
    op: str
    parents: tuple[int, ...]
    forward: Callable[..., np.ndarray] | None
    vjp: VjpRule | None
    value: np.ndarray
    requires_grad: bool
    name: str | None = None


class Var:
    """Handle to a node on a tape."""

    __slots__ = ("tape", "index")

    def __init__(self, tape: "Tape", index: int) -> None:
        self.tape = tape
        self.index = index

    @property
    def node(self) -> Node:
        return self.tape.nodes[self.index]

    @property
    def value(self) -> np.ndarray:
        return self.node.value

    @property
    def shape(self) -> tuple[int, ...]:
        return np.shape(self.node.value)

    def __repr__(self) -> str:
        return f"Var({self.node.op}, shape={self.shape})"


@dataclass
class Tape:
    """Ordered record of primitive evaluations."""

    nodes: list[Node] = field(default_factory=list)

    def leaf(self, value: np.ndarray, name: str) -> Var:
        """Register a differentiable input under a unique ``name``."""
        if any(n.name == name for n in self.nodes):
            raise TapeError(f"leaf '{name}' is already on the tape")
        return self._append(Node("leaf", (), None, None, np.asarray(value), True, name))

    def constant(self, value: np.ndarray) -> Var:
        return self._append(Node("const", (), None, None, np.asarray(value), False))

    def as_var(self, value: "Var | np.ndarray | float") -> Var:
        if isinstance(value, Var):
            if value.tape is not self:
                raise TapeError("variable belongs to another tape")
            return value
        return self.constant(value)

    def record(
        self,
        op: str,
        parents: Sequence["Var | np.ndarray | float"],
        forward: Callable[..., np.ndarray],
        vjp: VjpRule,
    ) -> Var:
        """Evaluate ``forward`` on the parents' values and record it."""
        vars_ = [self.as_var(p) for p in parents]
        values = [v.value for v in vars_]
        value = forward(*values)
        requires = any(v.node.requires_grad for v in vars_)
        return self._append(Node(op, tuple(v.index for v in vars_), forward, vjp, value, requires))

    def _append(self, node: Node) -> Var:
        self.nodes.append(node)
        return Var(self, len(self.nodes) - 1)

    @property
    def leaves(self) -> dict[str, np.ndarray]:
        return {n.name: n.value for n in self.nodes if n.op == "leaf"}

    def backward(self, output: Var) -> dict[str, np.ndarray]:
        """Gradient of the scalar ``output`` with respect to every leaf.

        Returns:
            Mapping from leaf name to gradient with the leaf's shape
        """
        if np.size(output.value) != 1:
            raise TapeError(f"backward needs a scalar output, got shape {output.shape}")
        grads: list[np.ndarray | None] = [None] * len(self.nodes)
        grads[output.index] = np.ones_like(output.value, dtype=float)

        # Nodes are appended in evaluation order, so a reverse scan is a topological sweep.
        for index in range(output.index, -1, -1):
            node = self.nodes[index]
            g = grads[index]
            if g is None or node.vjp is None or not node.requires_grad:
                continue
            parents = [self.nodes[p] for p in node.parents]
            needs = tuple(p.requires_grad for p in parents)
            contributions = node.vjp(g, node.value, tuple(p.value for p in parents), needs)
            for parent_index, parent, contribution in zip(node.parents, parents, contributions):
                if contribution is None or not parent.requires_grad:
                    continue
                # Real leaves only see the real part of a complex cotangent.
                if np.isrealobj(parent.value):
                    contribution = np.real(contribution)
                if np.shape(contribution) != np.shape(parent.value):
                    raise TapeError(
                        f"{node.op} produced gradient of shape {np.shape(contribution)} "
                        f"for parent of shape {np.shape(parent.value)}"
                    )
                previous = grads[parent_index]
                grads[parent_index] = contribution if previous is None else previous + contribution

        return {
            node.name: (grads[i] if grads[i] is not None else np.zeros_like(node.value))
            for i, node in enumerate(self.nodes)
            if node.op == "leaf"
        }

    def replay(self, output: Var, leaf_values: dict[str, np.ndarray] | None = None) -> np.ndarray:
        """Re-run the recorded forward functions up to ``output``.

        Args:
            output: Node whose value is returned
            leaf_values: Replacement leaf values; ``None`` replays the recorded ones
                and checks the result is bit-identical

        Raises:
            TapeReplayError: If a plain replay does not reproduce the recorded value
        """
        values: list[np.ndarray] = []
        for node in self.nodes[: output.index + 1]:
            if node.op == "leaf" and leaf_values is not None and node.name in leaf_values:
                values.append(np.asarray(leaf_values[node.name]))
            elif node.forward is None:
                values.append(node.value)
            else:
                values.append(node.forward(*(values[p] for p in node.parents)))
        result = values[output.index]
        if leaf_values is None and not np.array_equal(result, output.value):
            raise TapeReplayError(f"replay of '{output.node.op}' diverged from the recorded value")
        return result
