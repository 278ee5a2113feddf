"""Services package for vcell-sim."""
