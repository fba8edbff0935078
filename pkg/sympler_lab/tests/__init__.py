"""Tests for the SyMPLER lab."""
