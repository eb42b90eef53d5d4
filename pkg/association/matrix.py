from typing import Iterator, List, NamedTuple, Optional, Tuple

from association.grid import GridError


class AssociationError(GridError):
    """Raised when an association breaks the one-to-one constraints."""


class AssociationMatrix(NamedTuple):
    """Satellite serving each cluster for one handover period.

    satellites[n] is the serving satellite id of cluster n, or None when the
    cluster is unserved. Equivalent to a binary x[m, n] with at most one 1
    per row and per column.
    """

    satellites: Tuple[Optional[int], ...]
    system_tag: str

    @classmethod
    def empty(cls, clusters: int, system_tag: str) -> "AssociationMatrix":
        return cls((None,) * clusters, system_tag)

    def __len__(self):
        return len(self.satellites)

    def served(self) -> int:
        return sum(1 for satellite in self.satellites if satellite is not None)

    def pairs(self) -> Iterator[Tuple[int, int]]:
        """(satellite, cluster) pairs with x[m, n] = 1."""
        for cluster, satellite in enumerate(self.satellites):
            if satellite is not None:
                yield satellite, cluster

    def unserved(self) -> List[int]:
        return [n for n, satellite in enumerate(self.satellites) if satellite is None]

    def serving(self, cluster: int) -> Optional[int]:
        return self.satellites[cluster]

    def with_cluster(self, cluster: int, satellite: Optional[int]) -> "AssociationMatrix":
        satellites = list(self.satellites)
        satellites[cluster] = satellite
        return self._replace(satellites=tuple(satellites))


def check_association(matrix: AssociationMatrix) -> AssociationMatrix:
    """Raises AssociationError unless every satellite serves at most one cluster."""
    used = [satellite for satellite, _ in matrix.pairs()]
    if len(used) != len(set(used)):
        duplicated = sorted({s for s in used if used.count(s) > 1})
        raise AssociationError(
            f"{matrix.system_tag} satellites {duplicated} serve more than one cluster"
        )
    return matrix
