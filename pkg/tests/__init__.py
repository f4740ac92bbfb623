"""Tests package for Kernel Toolkit."""
