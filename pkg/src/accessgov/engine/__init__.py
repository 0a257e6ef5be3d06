"""Decision pipeline: stages, gates, aggregation, rationale, and the controller."""
