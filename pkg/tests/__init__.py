"""Test suite for diqsim."""
