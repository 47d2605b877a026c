"""Physical constants and package metadata shared across modules."""

SPEED_OF_LIGHT = 2.99792458e8
"""Speed of light in m/s."""

PACKAGE_VERSION = "0.1.0"
