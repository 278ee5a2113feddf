"""Virtual-cell uplink resource allocation simulator."""

__version__ = "0.1.0"
