# %% [markdown]
# # Communication time as the cluster grows
#
# Each optical step costs its largest transfer at 40 Gbit/s per wavelength
# plus a fixed 25 microsecond reconfiguration. Chunked algorithms send small
# messages but pay the overhead on many steps.

# %%
from opticollect import (
    CostModel,
    FatTreeParams,
    RingTopology,
    assign_schedule,
    build_schedule,
    electrical_time,
    get_workload,
    payload_bits,
    simulate_time,
)

d = payload_bits(get_workload("ResNet50"))
model = CostModel(40e9, 25e-6, d)

for n in (1024, 2048, 3072, 4096):
    times = {}
    for alg, g in (("wrht", None), ("hring", 4), ("ring", None), ("bt", None)):
        sched = assign_schedule(build_schedule(alg, n, 64, g), RingTopology(n, 64))
        times[alg] = simulate_time(sched, model).total_time
    print(n, {k: round(v, 4) for k, v in times.items()})

# %% [markdown]
# WRHT steps jump from three to four between 2048 and 3072 nodes: past that
# point the surviving representatives no longer fit in one all-to-all.
#
# The electrical baseline routes through a two-level fat-tree with 50
# microsecond routers and 25 Gbit/s links.

# %%
for n in (128, 256, 512, 1024):
    e_ring = electrical_time(build_schedule("ring", n), FatTreeParams(), d).total_time
    rd = electrical_time(build_schedule("rd", n), FatTreeParams(), d).total_time
    print(n, round(e_ring, 4), round(rd, 4))
