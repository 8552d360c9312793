import math

# RAND_MAX is pinned so scripts behave the same on every host.
CONSTANTS = {
    "HUGE_VAL": math.inf,
    "RAND_MAX": 32767.0,
    "pi": 4 * math.atan(1),
}

DEFAULT_FORMAT = "%.2f"
