# coding: utf-8

# # Self-reproducing modes with and without the telescope
#
# The cavity is solved by repeated round trips until the field on the gain
# medium stops changing.  A 256-sample grid keeps this demo quick; the library
# default is 1024 samples over 20 mm.

# In[1]:

import numpy as np

from timrbs.cavity import CavityLayout, fox_li_solve
from timrbs.field_grid import GridSpec, RandomPhase, intensity

grid = GridSpec(256, 0.02)
modes = {}
for with_tim in (True, False):
    modes[with_tim] = fox_li_solve(CavityLayout(with_tim=with_tim, D_t=10.0), grid)

for with_tim, m in modes.items():
    print("telescope" if with_tim else "no telescope")
    for k, v in m.summary().items():
        print("   %-18s %s" % (k, v))


# The round-trip amplitude factor squared equals the output reflectivity times
# the product of every leg efficiency.

# In[2]:

m = modes[True]
print(m.gamma_mag ** 2, m.layout.R2 * m.eta_roundtrip)


# ## The mode does not depend on the starting field
#
# Starting from random phases reaches the same eigenvalue, only more slowly.

# In[3]:

alt = fox_li_solve(CavityLayout(D_t=10.0), grid, seed=RandomPhase(7, 2.5e-3))
print("iterations %d vs %d" % (alt.iterations, m.iterations))
print("|gamma| %.8f vs %.8f" % (alt.gamma_mag, m.gamma_mag))


# ## Intensity across the gain medium
#
# A coarse text profile along x, normalized to the peak.

# In[4]:

c = grid.n // 2
x = grid.coords * 1e3
for with_tim, m in modes.items():
    row = intensity(m.mode_at["gain"])[c]
    cells = " ".join("%.2f" % row[c + k] for k in range(0, 90, 10))
    print("%-13s %s" % ("telescope" if with_tim else "no telescope", cells))
print("%-13s %s" % ("x / mm", " ".join("%.2f" % x[c + k] for k in range(0, 90, 10))))


# ## Efficiency and spot size against distance

# In[5]:

print(" D_t   eta(TIM)  eta(plain)  r_b(TIM)/mm  r_b(plain)/mm")
for D in (2.0, 6.0, 10.0, 14.0, 20.0):
    a = fox_li_solve(CavityLayout(with_tim=True, D_t=D), grid)
    b = fox_li_solve(CavityLayout(with_tim=False, D_t=D), grid)
    print("%4.0f   %.4f    %.4f      %.4f       %.4f" % (
        D, a.eta_roundtrip, b.eta_roundtrip, a.beam_radius_gain * 1e3, b.beam_radius_gain * 1e3))
