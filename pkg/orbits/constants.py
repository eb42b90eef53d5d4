"""Physical constants and the reference constellation shell tables."""

EARTH_RADIUS_M = 6371.0e3
MU_EARTH = 3.986004418e14  # m^3 / s^2
EARTH_ROTATION_RATE = 7.2921159e-5  # rad / s

PRIMARY = "primary"
SECONDARY = "secondary"
SYSTEM_TAGS = (PRIMARY, SECONDARY)

# (altitude km, inclination deg, planes, satellites per plane)
PRIMARY_SHELL_TABLE = (
    (540.0, 53.2, 72, 22),
    (550.0, 53.0, 72, 22),
    (560.0, 97.6, 4, 43),
    (560.0, 97.6, 6, 58),
    (570.0, 70.0, 36, 20),
    (530.0, 33.0, 28, 89),
)

SECONDARY_SHELL_TABLE = (
    (590.0, 33.0, 28, 28),
    (610.0, 42.0, 36, 36),
    (630.0, 51.9, 34, 34),
)

PRIMARY_TOTAL = 6900
SECONDARY_TOTAL = 3236
