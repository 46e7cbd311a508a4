"""Tests for bpire."""
