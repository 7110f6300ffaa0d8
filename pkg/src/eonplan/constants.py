"""Shared physical and grid constants.

The flex grid follows the ITU-T 12.5 GHz slot convention; the C-band window
is 4.8 THz starting at 191.3 THz, i.e. 384 slots.
"""

SLOT_WIDTH_GHZ = 12.5
C_BAND_SLOTS = 384
GRID_START_THZ = 191.3

#: All OSNR figures are referred to this noise bandwidth.
REFERENCE_BANDWIDTH_HZ = 12.5e9

#: Default root-raised-cosine roll-off used to map symbol rate to channel width.
DEFAULT_ROLL_OFF = 0.1

#: Stock single-mode fiber parameters used when a topology omits them.
DEFAULT_ALPHA_DB_KM = 0.2
DEFAULT_BETA2_PS2_KM = -21.3
DEFAULT_GAMMA_W_KM = 1.3
DEFAULT_NF_DB = 5.0

#: Default per-channel launch power.
DEFAULT_LAUNCH_DBM = 0.0
