"""Benchmark suite: cases, runner, metrics, rubric scoring, and reports."""
