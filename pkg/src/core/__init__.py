"""Core simulation modules."""
