"""Tests package for AI Girlfriend Agent."""
