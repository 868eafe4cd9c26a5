"""Tests del LIM Benchmark."""
