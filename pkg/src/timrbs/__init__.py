"""Field-propagation and power-transfer model of a resonant beam link with an
intra-cavity telescope."""
from .cavity import CavityLayout, ModeSolution, fox_li_solve, round_trip
from .field_grid import ComplexField, GridSpec, make_field
from .power_model import GainParams, LinkBudget, output_beam_power, power_threshold
from .receiver import APDParams, PVParams, receive
from .scenario import Scenario, compare_layouts, emit_results, load_scenario, run_sweep

__version__ = "0.1.0"

__all__ = [
    "CavityLayout", "ModeSolution", "fox_li_solve", "round_trip",
    "ComplexField", "GridSpec", "make_field",
    "GainParams", "LinkBudget", "output_beam_power", "power_threshold",
    "APDParams", "PVParams", "receive",
    "Scenario", "compare_layouts", "emit_results", "load_scenario", "run_sweep",
]
