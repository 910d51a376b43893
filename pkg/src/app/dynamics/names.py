"""Names over finite index sets and weighted name sets (name pushforward measures)."""

import math
from collections import defaultdict
from collections.abc import Callable, Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from ..core.config import settings
from ..core.exceptions import ConfigurationError, IndexSetMismatchError, RelabelingError
from .group_folner import FiniteSubset

Mass = Fraction | float
Letters = tuple[int, ...]


@dataclass(frozen=True, order=True)
class Name:
    """The letters of a name in the canonical order of its index set."""

    letters: Letters
    index_set: FiniteSubset = field(compare=False, repr=False)

    def __post_init__(self) -> None:
        if len(self.letters) != len(self.index_set):
            raise IndexSetMismatchError(
                f"name of length {len(self.letters)} over an index set of size {len(self.index_set)}",
                context={"letters": len(self.letters), "index_set": len(self.index_set)},
            )

    def __len__(self) -> int:
        return len(self.letters)

    def at(self, g: tuple[int, ...]) -> int:
        return self.letters[self.index_set.index_of(g)]

    def restrict(self, F: FiniteSubset) -> "Name":
        return Name(tuple(self.at(g) for g in F), F)

    def relabel(self, mapping: Mapping[int, int]) -> "Name":
        return Name(tuple(mapping[a] for a in self.letters), self.index_set)

    def __str__(self) -> str:
        return " ".join(str(a) for a in self.letters)


def is_exact(mass: object) -> bool:
    return isinstance(mass, Fraction | int)


def total(masses: Iterable[Mass]) -> Mass:
    """Sum masses, staying rational when every mass is rational."""
    values = list(masses)
    if all(is_exact(m) for m in values):
        return sum((Fraction(m) for m in values), Fraction(0))
    return math.fsum(float(m) for m in values)


def _mass_from_text(token: str) -> Mass:
    return Fraction(token) if "/" in token or token.isdigit() else float(token)


class WeightedNameSet:
    """
    A finite map from names over a fixed index set to positive masses.

    Masses are either all exact rationals or floats (sampled distributions).
    """

    def __init__(self, index_set: FiniteSubset, entries: Mapping[Letters, Mass]) -> None:
        self.index_set = index_set
        cleaned: dict[Letters, Mass] = {}
        for letters, mass in entries.items():
            if len(letters) != len(index_set):
                raise IndexSetMismatchError(
                    f"name of length {len(letters)} in a set over {len(index_set)} positions",
                    context={"letters": letters},
                )
            if mass < 0:
                raise ConfigurationError(f"negative mass {mass} for name {letters}")
            if mass > 0:
                cleaned[tuple(letters)] = mass
        self._entries = dict(sorted(cleaned.items()))
        self.total_mass = total(self._entries.values())
        if self.exact and self.total_mass > 1:
            raise ConfigurationError(f"total mass {self.total_mass} exceeds 1")
        if not self.exact and self.total_mass > 1 + settings.FLOAT_TOLERANCE:
            raise ConfigurationError(f"total mass {self.total_mass} exceeds 1")

    @classmethod
    def from_counts(
        cls, index_set: FiniteSubset, counts: Mapping[Letters, int], exact: bool = False
    ) -> "WeightedNameSet":
        n = sum(counts.values())
        if n == 0:
            raise ConfigurationError("cannot build a name set from zero samples")
        if exact:
            return cls(index_set, {w: Fraction(c, n) for w, c in counts.items()})
        return cls(index_set, {w: c / n for w, c in counts.items()})

    @classmethod
    def mixture(cls, parts: Sequence["WeightedNameSet"], weights: Sequence[Mass] | None = None) -> "WeightedNameSet":
        if not parts:
            raise ConfigurationError("mixture of zero name sets")
        index_set = parts[0].index_set
        if weights is None:
            weights = [Fraction(1, len(parts))] * len(parts)
        combined: dict[Letters, list[Mass]] = defaultdict(list)
        for part, weight in zip(parts, weights):
            if part.index_set != index_set:
                raise IndexSetMismatchError("mixture components are over different index sets")
            for letters, mass in part.items():
                combined[letters].append(weight * mass)
        return cls(index_set, {w: total(ms) for w, ms in combined.items()})

    @property
    def exact(self) -> bool:
        return all(is_exact(m) for m in self._entries.values())

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[Letters]:
        return iter(self._entries)

    def __contains__(self, letters: object) -> bool:
        return letters in self._entries

    def items(self) -> Iterable[tuple[Letters, Mass]]:
        return self._entries.items()

    def mass(self, letters: Letters) -> Mass:
        return self._entries.get(tuple(letters), Fraction(0) if self.exact else 0.0)

    def names(self) -> list[Name]:
        return [Name(w, self.index_set) for w in self._entries]

    def masses(self) -> list[Mass]:
        return list(self._entries.values())

    def alphabet(self) -> set[int]:
        return {a for w in self._entries for a in w}

    def sorted_masses(self) -> list[Mass]:
        return sorted(self._entries.values(), reverse=True)

    def relabel(self, mapping: Mapping[int, int]) -> "WeightedNameSet":
        """Apply a letterwise bijection to every name."""
        keys, values = set(mapping), set(mapping.values())
        if len(values) != len(mapping) or keys != values:
            raise RelabelingError(
                "relabeling must be a bijection of the alphabet onto itself",
                context={"mapping": dict(mapping)},
            )
        missing = self.alphabet() - keys
        if missing:
            raise RelabelingError(f"relabeling is not total, missing letters {sorted(missing)}")
        return WeightedNameSet(self.index_set, {tuple(mapping[a] for a in w): m for w, m in self.items()})

    def pushforward(self, recode: Callable[[Letters], Letters], index_set: FiniteSubset) -> "WeightedNameSet":
        combined: dict[Letters, list[Mass]] = defaultdict(list)
        for letters, mass in self.items():
            combined[recode(letters)].append(mass)
        return WeightedNameSet(index_set, {w: total(ms) for w, ms in combined.items()})

    def total_variation(self, other: "WeightedNameSet") -> Mass:
        if other.index_set != self.index_set:
            raise IndexSetMismatchError("total variation between name sets over different index sets")
        keys = set(self._entries) | set(other._entries)
        if self.exact and other.exact:
            return sum((abs(self.mass(w) - other.mass(w)) for w in keys), Fraction(0)) / 2
        return math.fsum(abs(float(self.mass(w)) - float(other.mass(w))) for w in keys) / 2

    def to_text(self) -> str:
        return "".join(f"{m}\t{' '.join(str(a) for a in w)}\n" for w, m in self.items())

    @classmethod
    def from_text(cls, text: str, index_set: FiniteSubset | None = None) -> "WeightedNameSet":
        entries: dict[Letters, Mass] = {}
        for number, line in enumerate(text.splitlines(), start=1):
            if not line.strip() or line.startswith("#"):
                continue
            mass_token, _, letters_token = line.partition("\t")
            letters = tuple(int(a) for a in letters_token.split())
            if letters in entries:
                raise ConfigurationError("name listed twice in name set file", context={"line": number})
            entries[letters] = _mass_from_text(mass_token.strip())
        if not entries:
            raise ConfigurationError("name set file is empty")
        if index_set is None:
            width = len(next(iter(entries)))
            index_set = FiniteSubset(tuple((i,) for i in range(width)), 1)
        return cls(index_set, entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightedNameSet):
            return NotImplemented
        return self.index_set == other.index_set and self._entries == other._entries

    def __repr__(self) -> str:
        return f"WeightedNameSet(|F|={len(self.index_set)}, support={len(self)}, total={self.total_mass})"
