# coding: utf-8

# # From pump power to harvested power and spectral efficiency
#
# A scenario bundles the cavity, grid, gain medium and receiver constants.
# Here it is built in code; the same keys work in a JSON file.

# In[1]:

from timrbs.scenario import compare_layouts, emit_results, max_reach, run_sweep, scenario_from_dict

s = scenario_from_dict({
    "grid": {"n": 256, "window": 0.02},
    "sweep": {"variable": "D_t", "values": [1, 5, 10, 15, 20, 25, 30]},
    "fixed": {"P_in": [100, 200, 300], "theta": 0.5},
})
rows = run_sweep(s)
print(" D_t   P_in   P_out/W   P_th/W")
for r in rows:
    print("%4.0f  %5.0f  %8.3f  %7.2f" % (r.D_t, r.P_in, r.P_out, r.P_th))


# ## Maximum reach
#
# The longest distance at which the pump still exceeds threshold, found by
# bisection over distance.

# In[2]:

for P in (100.0, 200.0, 300.0):
    print("%3.0f W -> %.1f m" % (P, max_reach(s, P, D_lo=1.0, D_hi=80.0)))


# ## Telescope against no telescope

# In[3]:

cmp = compare_layouts(scenario_from_dict({
    "grid": {"n": 256, "window": 0.02},
    "sweep": {"values": [1, 10]},
    "reach": {"P_in": [200], "resolution": 0.5},
}))
for flag in (True, False):
    print("telescope" if flag else "no telescope",
          ["%.2f W" % r.P_out for r in cmp.rows[flag]], cmp.max_reach[flag])


# ## Splitting the received beam
#
# A larger share to the PV panel raises harvested power and lowers spectral
# efficiency.

# In[4]:

from timrbs.receiver import receive

for theta in (0.1, 0.3, 0.5, 0.7, 0.9):
    out = receive(13.25, theta)
    print("theta %.1f   P_e %.3f W   C %.3f" % (theta, out.P_e, out.C))


# ## Writing results
#
# CSV and JSON carry the same columns at full precision.

# In[5]:

import tempfile, os

with tempfile.TemporaryDirectory() as d:
    path = emit_results(rows[:3], "csv", os.path.join(d, "rows.csv"))
    print(open(path).read())
