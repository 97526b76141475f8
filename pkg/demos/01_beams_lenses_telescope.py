# coding: utf-8

# # Free space, thin lenses and the intra-cavity telescope
#
# This walk-through propagates a Gaussian beam with the two discretizations of
# the Fresnel integral, checks a thin lens against textbook Gaussian optics and
# sends the beam through the afocal lens pair used inside the cavity.

# In[1]:

import numpy as np

from timrbs.field_grid import Gaussian, GridSpec, beam_radius_20pct, field_power, make_field
from timrbs.optics import (
    BACKWARD, FORWARD, OpticalElement, PropagationSpec, apply_screen, critical_distance,
    propagate, select_method, telescope_pass,
)

WL = 1064e-9
grid = GridSpec(512, 0.02)
print("pitch  %.1f um" % (grid.pitch * 1e6))
print("switch-over distance  %.3f m" % critical_distance(grid, WL))


# The propagator picks the transfer-function form below the switch-over
# distance and the sampled-kernel convolution above it.

# In[2]:

for L in (0.05, 0.5, 10.0):
    print(L, "m ->", select_method(grid, PropagationSpec(L, WL)))


# ## Rayleigh range
#
# A waist of 0.4 mm has a Rayleigh range of about 0.47 m.  The second-moment
# width should grow by sqrt(2) over that distance.

# In[3]:

def width(f):
    i = np.abs(f.values) ** 2
    return np.sqrt(2 * (i * f.spec.r2).sum() / i.sum())

w0 = 0.4e-3
zr = np.pi * w0 ** 2 / WL
beam = make_field(grid, Gaussian(w0))
out = propagate(beam, PropagationSpec(zr, WL))
print("z_R = %.3f m, width ratio = %.6f (sqrt 2 = %.6f)" % (zr, width(out) / w0, np.sqrt(2)))
print("power kept: %.12f" % field_power(out))


# ## A converging and a diverging lens
#
# Phases follow the exp(-ikz) convention, so a positive focal length focuses.

# In[4]:

w0 = 1e-3
zr = np.pi * w0 ** 2 / WL
for f in (1.0, -1.0):
    lensed = apply_screen(make_field(grid, Gaussian(w0)), OpticalElement(0.01, f), WL)
    got = width(propagate(lensed, PropagationSpec(0.5, WL)))
    expect = w0 * np.sqrt((1 - 0.5 / f) ** 2 + (0.5 / zr) ** 2)
    print("f = %+.1f m: width after 0.5 m %.4f mm (Gaussian optics %.4f mm)"
          % (f, got * 1e3, expect * 1e3))


# ## The telescope
#
# Entering at the concave lens the beam leaves twice as wide; the return pass
# shrinks it back.  The spot on the long free-space leg is larger, which is what
# cuts diffraction loss over the transmission distance.

# In[5]:

concave = OpticalElement(2.5e-3, -0.05)
convex = OpticalElement(2.5e-3, 0.1)
beam = make_field(grid, Gaussian(0.6e-3))
fwd = telescope_pass(beam, concave, convex, FORWARD, WL)
back = telescope_pass(fwd.field, concave, convex, BACKWARD, WL)
for name, f in (("in", beam), ("after forward pass", fwd.field), ("after return pass", back.field)):
    print("%-20s 20%% radius %.3f mm" % (name, beam_radius_20pct(f) * 1e3))
print("lens transmissions", [round(p, 6) for _, p in fwd.planes])
