# %% [markdown]
# # Fifteen nodes, two wavelengths
#
# A small ring makes the hierarchical tree easy to follow. With `w = 2`
# wavelengths per fiber, each group holds `m = 2w + 1 = 5` nodes, so the
# 15 nodes split into three groups whose middle members collect the data.

# %%
from opticollect import (
    RingTopology,
    assign_schedule,
    build_bt,
    build_wrht,
    verify_allreduce,
    wavelength_usage,
)

schedule, plan = build_wrht(15, 2, allow_all2all=True)
for group in plan.levels[0]:
    print(group.members, "->", group.representative)

# %% [markdown]
# Three representatives can swap their partial sums directly, so the plan
# ends with one all-to-all step instead of another grouping level.

# %%
print("terminal all-to-all:", plan.terminal_all2all)
for step in schedule.steps:
    print(step.index, step.stage.value, len(step), "transfers")

# %% [markdown]
# First-fit gives each transfer the lowest wavelength free on every link it
# crosses. Opposite directions use separate fibers, so they share indices.

# %%
assigned = assign_schedule(schedule, RingTopology(15, 2))
print("wavelengths per step:", [wavelength_usage(s) for s in assigned.steps])
print("all-reduce holds:", verify_allreduce(assigned))

# %% [markdown]
# The binary tree needs a step per doubling, in each direction.

# %%
bt = build_bt(15)
print("BT steps:", bt.n_steps, " WRHT steps:", schedule.n_steps)
