# Utils module - Structured logging
