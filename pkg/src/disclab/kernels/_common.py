import numpy as np

# Output layout of enumerate_subsets (pairs of numerator, mask).
DISC_MAX, DISC_MAX_MASK = 0, 1
DISC_MIN, DISC_MIN_MASK = 2, 3
DISC1_MAX, DISC1_MAX_MASK = 4, 5
CUT_MAX, CUT_MAX_MASK = 6, 7
EQCUT_MIN, EQCUT_MIN_MASK = 8, 9
N_STATS = 10


def round_robin_schedule(n):
    """Disjoint (p, q) pairs per round, covering every pair once per sweep.

    Circle method; for odd ``n`` a phantom player is added and its pairs dropped.
    Returns an int64 array of shape (rounds, pairs_per_round, 2) with p < q.
    """
    if n < 2:
        return np.zeros((0, 0, 2), dtype=np.int64)
    players = list(range(n)) if n % 2 == 0 else list(range(n)) + [-1]
    size = len(players)
    rounds = []
    for _ in range(size - 1):
        pairs = []
        for i in range(size // 2):
            a, b = players[i], players[size - 1 - i]
            if a >= 0 and b >= 0:
                pairs.append((min(a, b), max(a, b)))
        rounds.append(pairs)
        players = [players[0], players[-1]] + players[1:-1]
    return np.array([sorted(r) for r in rounds], dtype=np.int64)
