"""Organization metadata: datasets, users, duties, agreements, and loaders."""
