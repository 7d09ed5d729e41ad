"""Test suite for HCSP Tools."""
