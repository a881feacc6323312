"""Test suite for Autonomous Tech Lead."""

