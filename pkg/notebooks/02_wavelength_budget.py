# %% [markdown]
# # How many wavelengths does a step need?
#
# A group of `k` contiguous members sends everything to its middle node.
# Senders on one side are nested arcs that all cross the last link into the
# representative, so that side needs one wavelength per sender.

# %%
import numpy as np

from opticollect import (
    RingTopology,
    a2a_wavelength_bound,
    all_to_all_step,
    assign_first_fit,
    assign_schedule,
    build_wrht,
    group_wavelength_demand,
    wavelength_usage,
)
from opticollect.wrht import group_rows

schedule, plan = build_wrht(60, 3, allow_all2all=False)
first = assign_schedule(schedule, RingTopology(60, 3)).steps[0]
for group, rows in zip(plan.levels[0], group_rows(first, plan.levels[0])):
    k = len(group.members)
    print(f"k={k}: used {wavelength_usage(first, rows)}, predicted {group_wavelength_demand(k)}")

# %% [markdown]
# An all-to-all among `r` nodes is the expensive step. The busiest link
# carries about `r**2 / 8` transfers, which first-fit matches when arcs
# through the ring origin are placed first.

# %%
rows = []
for r in range(2, 25):
    step = assign_first_fit(all_to_all_step(0, 3 * r, range(0, 3 * r, 3)),
                            RingTopology(3 * r, a2a_wavelength_bound(r)))
    rows.append((r, wavelength_usage(step), a2a_wavelength_bound(r)))
print(np.array(rows))

# %% [markdown]
# With `w = 64` the all-to-all fits up to 22 representatives, which is why
# 1000 nodes finish in three steps rather than four.
