"""
Verification case model.

A case pairs a theorem id with a group spec and a JSON-ready payload that
fully determines the ideal, measure or subset being checked.
"""

from dataclasses import dataclass, field
from typing import Any, Dict

THEOREM_IDS = (
    "inclusion",
    "masa-slice",
    "main-duality",
    "je-perp",
    "joint-harmonic",
    "theorem21",
    "lemma-psi",
    "cross-iso",
    "membership",
    "diagonals",
    "blocks",
)

# checked on a left ideal of l^1(G)
IDEAL_THEOREMS = frozenset({"inclusion", "masa-slice", "main-duality", "membership", "diagonals", "blocks"})

ABELIAN_ONLY = frozenset({"theorem21", "lemma-psi"})


@dataclass
class VerificationCase:
    """
    One (theorem, group, payload) triple.

    Attributes:
        theorem_id: One of THEOREM_IDS.
        group: Group spec understood by `resolve_group`.
        payload: Ideal, measure list, dual-group subset or trial count.
        seed: Seed of the randomized parts of the verifier.
    """

    theorem_id: str
    group: str
    payload: Dict[str, Any] = field(default_factory=dict)
    seed: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "theorem_id": self.theorem_id,
            "group": self.group,
            "payload": self.payload,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "VerificationCase":
        return cls(
            theorem_id=data["theorem_id"],
            group=data["group"],
            payload=dict(data.get("payload", {})),
            seed=int(data.get("seed", 0)),
        )

    def __repr__(self) -> str:
        return (
            f"VerificationCase(theorem_id={self.theorem_id!r}, group={self.group!r}, "
            f"type={self.payload.get('type')!r}, seed={self.seed!r})"
        )
