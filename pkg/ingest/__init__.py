# Ingest module - Dataset parsers, writers, SVG plots
