"""Small independent reference implementations used by the tests."""


def naive_allreduce_holds(schedule) -> bool:
    """Reference verifier: plain Python sets, one per (node, lane)."""
    n, lanes = schedule.n_nodes, schedule.n_lanes
    state = [[{node} for _ in range(lanes)] for node in range(n)]
    for step in schedule.steps:
        before = [[set(s) for s in row] for row in state]
        for t in step.transfers:
            for lane in range(*t.lanes):
                state[t.dst][lane] |= before[t.src][lane]
    everyone = set(range(n))
    return all(s == everyone for row in state for s in row)
