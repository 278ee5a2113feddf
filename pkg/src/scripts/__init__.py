"""Maintenance scripts for vcell-sim."""
