"""Dataset ingestion, background-light accuracy and batch benchmarking."""
