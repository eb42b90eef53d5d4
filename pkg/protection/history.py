import numpy as np

from protection.config import ProtectionError


class InterferenceHistory:
    """Ring buffer of realised per-user INR (linear), one row per slot.

    Slots must be appended in order starting from 0. Anything before slot 0
    reads as zero.
    """

    def __init__(self, users: int, capacity: int):
        self.users = users
        self.capacity = max(int(capacity), 1)
        self._buffer = np.zeros((self.capacity, users))
        self.next_slot = 0

    def __repr__(self):
        return f"<InterferenceHistory {self.users} users, {self.next_slot} slots>"

    def append(self, slot: int, samples) -> None:
        if slot != self.next_slot:
            raise ProtectionError(f"Expected slot {self.next_slot}, got {slot}")
        samples = np.asarray(samples, dtype=float)
        if samples.shape != (self.users,):
            raise ProtectionError(f"Expected {self.users} samples, got shape {samples.shape}")
        if not np.all(np.isfinite(samples)) or np.any(samples < 0):
            raise ProtectionError(f"INR samples at slot {slot} must be finite and non-negative")
        self._buffer[slot % self.capacity] = samples
        self.next_slot += 1

    def extend(self, start: int, rows) -> None:
        for offset, samples in enumerate(np.asarray(rows, dtype=float)):
            self.append(start + offset, samples)

    def window(self, t: int, length: int) -> np.ndarray:
        """(length, U) samples of slots [t - length, t), zero before slot 0."""
        if length < 0:
            raise ProtectionError(f"Window length cannot be negative, got {length}")
        if t > self.next_slot:
            raise ProtectionError(f"History only reaches slot {self.next_slot - 1}, asked up to {t - 1}")
        if t - length < self.next_slot - self.capacity:
            raise ProtectionError(
                f"Window [{t - length}, {t}) no longer held; capacity is {self.capacity} slots"
            )
        rows = np.zeros((length, self.users))
        for offset, slot in enumerate(range(t - length, t)):
            if slot >= 0:
                rows[offset] = self._buffer[slot % self.capacity]
        return rows

    def window_sum(self, t: int, length: int) -> np.ndarray:
        """Per-user sum over [t - length, t)."""
        return self.window(t, length).sum(axis=0)
